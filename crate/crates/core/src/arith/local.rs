//! Non-archimedean local fields `Q_p` and `F_q((t))` with explicit precision.
//!
//! An element is `val`, a digit vector starting at `val`, and an absolute
//! precision. Digits past the stored vector and below the absolute precision
//! are zero. `abs == None` marks an exact (terminating) element.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::residue::ResidueField;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Padic,
    Laurent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalField {
    kind: FieldKind,
    k: ResidueField,
    prec: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalElem {
    val: i64,
    digits: Vec<u32>,
    abs: Option<i64>,
}

impl LocalElem {
    /// Valuation, `None` for zero.
    pub fn val(&self) -> Option<i64> {
        if self.digits.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.abs.is_none()
    }

    pub fn abs_prec(&self) -> Option<i64> {
        self.abs
    }

    /// Relative precision, `None` if exact or zero.
    pub fn rel_prec(&self) -> Option<i64> {
        match (self.val(), self.abs) {
            (Some(v), Some(a)) => Some(a - v),
            _ => None,
        }
    }

    /// Lower bound for the valuation (the absolute precision for zero).
    pub fn val_lower_bound(&self) -> i64 {
        match (self.val(), self.abs) {
            (Some(v), _) => v,
            (None, Some(a)) => a,
            (None, None) => i64::MAX,
        }
    }

    pub fn stored_digits(&self) -> &[u32] {
        &self.digits
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl LocalField {
    pub fn qp(p: u32, prec: i64) -> Result<Self> {
        if prec < 1 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        Ok(LocalField { kind: FieldKind::Padic, k: ResidueField::prime(p)?, prec })
    }

    pub fn laurent(p: u32, f: u32, prec: i64, modulus: Option<Vec<u32>>) -> Result<Self> {
        if prec < 1 {
            return Err(Error::InvalidField("precision must be positive".into()));
        }
        Ok(LocalField { kind: FieldKind::Laurent, k: ResidueField::new(p, f, modulus)?, prec })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.k
    }

    pub fn p(&self) -> u32 {
        self.k.p()
    }

    pub fn q(&self) -> u32 {
        self.k.q()
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Same field with a different default precision.
    pub fn with_prec(&self, prec: i64) -> Self {
        LocalField { prec: prec.max(1), ..self.clone() }
    }

    /// Characteristic of the field itself (0 for `Q_p`).
    pub fn characteristic(&self) -> u32 {
        match self.kind {
            FieldKind::Padic => 0,
            FieldKind::Laurent => self.p(),
        }
    }

    pub fn is_padic(&self) -> bool {
        self.kind == FieldKind::Padic
    }

    /// Residue characteristic 2.
    pub fn is_dyadic(&self) -> bool {
        self.p() == 2
    }

    /// Equal characteristic 2, `F_q((t))` with `q` even.
    pub fn is_char2(&self) -> bool {
        self.kind == FieldKind::Laurent && self.p() == 2
    }

    /// Name of the uniformizer in printed output.
    pub fn uniformizer_name(&self) -> String {
        match self.kind {
            FieldKind::Padic => self.p().to_string(),
            FieldKind::Laurent => "t".into(),
        }
    }

    // ---- constructors ----

    pub fn zero(&self) -> LocalElem {
        LocalElem { val: 0, digits: Vec::new(), abs: None }
    }

    /// Zero known modulo `ϖ^abs`.
    pub fn zero_mod(&self, abs: i64) -> LocalElem {
        LocalElem { val: 0, digits: Vec::new(), abs: Some(abs) }
    }

    pub fn one(&self) -> LocalElem {
        self.from_digits(0, vec![1], None)
    }

    pub fn uniformizer(&self) -> LocalElem {
        self.from_digits(1, vec![1], None)
    }

    pub fn pi_pow(&self, k: i64) -> LocalElem {
        self.from_digits(k, vec![1], None)
    }

    /// Element with the given digits from position `val`; digits must be
    /// residue field indices (`< p` for `Q_p`).
    pub fn from_digits(&self, val: i64, digits: Vec<u32>, abs: Option<i64>) -> LocalElem {
        debug_assert!(digits.iter().all(|&d| d < self.q()));
        self.normalize(val, digits, abs)
    }

    /// Constant lift of a residue field element (digit at position 0).
    pub fn from_residue(&self, c: u32) -> LocalElem {
        self.from_digits(0, vec![c], None)
    }

    pub fn from_int(&self, n: i64) -> LocalElem {
        match self.kind {
            FieldKind::Laurent => self.from_residue(self.k.from_int(n)),
            FieldKind::Padic => self.from_bigint(&BigInt::from(n)),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> LocalElem {
        match self.kind {
            FieldKind::Laurent => {
                let r = n.mod_floor(&BigInt::from(self.p())).to_i64().unwrap();
                self.from_residue(self.k.from_int(r))
            }
            FieldKind::Padic => {
                if n.is_zero() {
                    return self.zero();
                }
                let p = BigInt::from(self.p());
                let mut v = 0i64;
                let mut m = n.clone();
                while m.is_multiple_of(&p) {
                    m /= &p;
                    v += 1;
                }
                if m.sign() == Sign::Minus {
                    let modulus = p.pow(self.prec as u32);
                    let r = m.mod_floor(&modulus).to_biguint().unwrap();
                    self.from_biguint_window(v, &r, Some(v + self.prec))
                } else {
                    self.from_biguint_window(v, &m.to_biguint().unwrap(), None)
                }
            }
        }
    }

    /// `num / den` with `den != 0`.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<LocalElem> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let a = self.from_int(num);
        let b = self.from_int(den);
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.div(&a, &b)
    }

    fn from_biguint_window(&self, val: i64, n: &BigUint, abs: Option<i64>) -> LocalElem {
        let p = self.p();
        let mut digits = Vec::new();
        let mut m = n.clone();
        let limit = abs.map(|a| (a - val).max(0) as usize);
        while !m.is_zero() {
            if limit.is_some_and(|l| digits.len() >= l) {
                break;
            }
            let (qq, r) = m.div_rem(&BigUint::from(p));
            digits.push(r.to_u32().unwrap());
            m = qq;
        }
        self.normalize(val, digits, abs)
    }

    fn window_to_biguint(&self, digits: &[u32], len: usize) -> BigUint {
        let p = BigUint::from(self.p());
        let mut acc = BigUint::zero();
        for i in (0..len.min(digits.len())).rev() {
            acc = acc * &p + BigUint::from(digits[i]);
        }
        acc
    }

    /// Canonical form: strip leading and trailing zeros, cut at the absolute
    /// precision and cap runaway exact expansions.
    fn normalize(&self, mut val: i64, mut digits: Vec<u32>, mut abs: Option<i64>) -> LocalElem {
        let lead = digits.iter().position(|&d| d != 0);
        match lead {
            None => return LocalElem { val: 0, digits: Vec::new(), abs },
            Some(i) => {
                digits.drain(..i);
                val += i as i64;
            }
        }
        if let Some(a) = abs {
            if val >= a {
                return LocalElem { val: 0, digits: Vec::new(), abs };
            }
            digits.truncate((a - val) as usize);
        } else if digits.len() as i64 > 4 * self.prec {
            digits.truncate(self.prec as usize);
            abs = Some(val + self.prec);
        }
        while digits.last() == Some(&0) {
            digits.pop();
        }
        LocalElem { val, digits, abs }
    }

    fn digit_at(x: &LocalElem, i: i64) -> u32 {
        if x.digits.is_empty() || i < x.val {
            return 0;
        }
        x.digits.get((i - x.val) as usize).copied().unwrap_or(0)
    }

    /// Digit of `ϖ^i` in `x`; fails beyond the known precision.
    pub fn digit(&self, x: &LocalElem, i: i64) -> Result<u32> {
        if let Some(a) = x.abs {
            if i >= a {
                return Err(Error::precision(format!("digit {i} beyond precision {a}")));
            }
        }
        Ok(Self::digit_at(x, i))
    }

    /// Digits at positions `0..k` of an integral element.
    pub fn residue_digits(&self, x: &LocalElem, k: i64) -> Result<Vec<u32>> {
        if x.val_lower_bound() < 0 {
            return Err(Error::InvalidArgument("element is not integral".into()));
        }
        (0..k).map(|i| self.digit(x, i)).collect()
    }

    /// Leading residue digit of a nonzero element.
    pub fn lead(&self, x: &LocalElem) -> Result<u32> {
        x.digits.first().copied().ok_or_else(|| self.zero_err(x))
    }

    fn zero_err(&self, x: &LocalElem) -> Error {
        if x.is_exact() {
            Error::DivisionByZero
        } else {
            Error::precision("element indistinguishable from zero")
        }
    }

    pub fn val_checked(&self, x: &LocalElem) -> Result<i64> {
        x.val().ok_or_else(|| self.zero_err(x))
    }

    /// `x * ϖ^k`.
    pub fn shift(&self, x: &LocalElem, k: i64) -> LocalElem {
        LocalElem {
            val: if x.digits.is_empty() { 0 } else { x.val + k },
            digits: x.digits.clone(),
            abs: x.abs.map(|a| a + k),
        }
    }

    /// `x / ϖ^{v(x)}`.
    pub fn unit_part(&self, x: &LocalElem) -> Result<LocalElem> {
        let v = self.val_checked(x)?;
        Ok(self.shift(x, -v))
    }

    /// Reduce to absolute precision `abs` (never increases precision).
    pub fn truncate(&self, x: &LocalElem, abs: i64) -> LocalElem {
        let a = min_opt(x.abs, Some(abs));
        self.normalize(x.val, x.digits.clone(), a)
    }

    /// Equality up to the precision of both operands.
    pub fn eq(&self, x: &LocalElem, y: &LocalElem) -> bool {
        self.sub(x, y).is_zero()
    }

    pub fn is_integral(&self, x: &LocalElem) -> bool {
        x.val_lower_bound() >= 0
    }

    pub fn is_unit(&self, x: &LocalElem) -> bool {
        x.val() == Some(0)
    }

    // ---- arithmetic ----

    pub fn add(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        self.lincomb(x, 1, y, 1)
    }

    pub fn sub(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        self.lincomb(x, 1, y, -1)
    }

    pub fn neg(&self, x: &LocalElem) -> LocalElem {
        self.lincomb(&self.zero(), 1, x, -1)
    }

    fn lincomb(&self, x: &LocalElem, sx: i64, y: &LocalElem, sy: i64) -> LocalElem {
        let abs = min_opt(x.abs, y.abs);
        let start = match (x.val(), y.val()) {
            (None, None) => return LocalElem { val: 0, digits: Vec::new(), abs },
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if abs.is_some_and(|a| start >= a) {
            return LocalElem { val: 0, digits: Vec::new(), abs };
        }
        let end_of = |e: &LocalElem| if e.is_zero() { start } else { e.val + e.digits.len() as i64 };
        let end = match abs {
            Some(a) => a,
            None => end_of(x).max(end_of(y)),
        };
        let len = (end - start) as usize;
        match self.kind {
            FieldKind::Laurent => {
                let k = &self.k;
                let mut out = vec![0u32; len];
                for (i, o) in out.iter_mut().enumerate() {
                    let pos = start + i as i64;
                    let mut a = Self::digit_at(x, pos);
                    let mut b = Self::digit_at(y, pos);
                    if sx < 0 {
                        a = k.neg(a);
                    }
                    if sy < 0 {
                        b = k.neg(b);
                    }
                    *o = k.add(a, b);
                }
                self.normalize(start, out, abs)
            }
            FieldKind::Padic => {
                let p = self.p() as i64;
                let mut out = Vec::with_capacity(len + 2);
                let mut carry = 0i64;
                for i in 0..len {
                    let pos = start + i as i64;
                    let c = sx * Self::digit_at(x, pos) as i64 + sy * Self::digit_at(y, pos) as i64 + carry;
                    out.push(c.rem_euclid(p) as u32);
                    carry = c.div_euclid(p);
                }
                if abs.is_none() {
                    if carry > 0 {
                        while carry > 0 {
                            out.push((carry % p) as u32);
                            carry /= p;
                        }
                    } else if carry < 0 {
                        // Negative exact value: infinite expansion of (p-1)s.
                        let lead = out.iter().position(|&d| d != 0).unwrap_or(len) as i64;
                        let target = (lead + self.prec).max(len as i64) as usize;
                        out.resize(target, (p - 1) as u32);
                        return self.normalize(start, out, Some(start + target as i64));
                    }
                }
                self.normalize(start, out, abs)
            }
        }
    }

    pub fn mul(&self, x: &LocalElem, y: &LocalElem) -> LocalElem {
        match (x.val(), y.val()) {
            (None, None) => {
                let abs = match (x.abs, y.abs) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(a + b),
                };
                return LocalElem { val: 0, digits: Vec::new(), abs };
            }
            (None, Some(v)) => {
                return LocalElem { val: 0, digits: Vec::new(), abs: x.abs.map(|a| a + v) };
            }
            (Some(v), None) => {
                return LocalElem { val: 0, digits: Vec::new(), abs: y.abs.map(|a| a + v) };
            }
            _ => {}
        }
        let val = x.val + y.val;
        let rel = min_opt(x.rel_prec(), y.rel_prec());
        let (lx, ly) = match rel {
            Some(r) => (x.digits.len().min(r as usize), y.digits.len().min(r as usize)),
            None => (x.digits.len(), y.digits.len()),
        };
        let out_len = match rel {
            Some(r) => (r as usize).min(lx + ly + 1),
            None => lx + ly + 1,
        };
        let abs = rel.map(|r| val + r);
        match self.kind {
            FieldKind::Laurent => {
                let k = &self.k;
                let mut out = vec![0u32; out_len];
                for i in 0..lx {
                    let a = x.digits[i];
                    if a == 0 {
                        continue;
                    }
                    for j in 0..ly.min(out_len.saturating_sub(i)) {
                        out[i + j] = k.add(out[i + j], k.mul(a, y.digits[j]));
                    }
                }
                self.normalize(val, out, abs)
            }
            FieldKind::Padic => {
                let p = self.p() as u64;
                let mut acc = vec![0u64; out_len];
                for i in 0..lx {
                    let a = x.digits[i] as u64;
                    if a == 0 {
                        continue;
                    }
                    for j in 0..ly.min(out_len.saturating_sub(i)) {
                        acc[i + j] += a * y.digits[j] as u64;
                    }
                    // keep accumulators bounded
                    if i % 1024 == 1023 {
                        Self::propagate(&mut acc, p);
                    }
                }
                let mut carry = 0u64;
                let mut out = Vec::with_capacity(out_len + 4);
                for a in acc {
                    let c = a + carry;
                    out.push((c % p) as u32);
                    carry = c / p;
                }
                if abs.is_none() {
                    while carry > 0 {
                        out.push((carry % p) as u32);
                        carry /= p;
                    }
                }
                self.normalize(val, out, abs)
            }
        }
    }

    fn propagate(acc: &mut [u64], p: u64) {
        let mut carry = 0;
        for a in acc.iter_mut() {
            let c = *a + carry;
            *a = c % p;
            carry = c / p;
        }
    }

    pub fn square(&self, x: &LocalElem) -> LocalElem {
        self.mul(x, x)
    }

    /// Multiplication by an integer.
    pub fn mul_int(&self, x: &LocalElem, n: i64) -> LocalElem {
        self.mul(x, &self.from_int(n))
    }

    pub fn inv(&self, x: &LocalElem) -> Result<LocalElem> {
        let v = self.val_checked(x)?;
        let unit = &x.digits;
        let r = match x.rel_prec() {
            Some(r) => r.min(self.prec.max(r)),
            None => {
                let trivial = match self.kind {
                    FieldKind::Laurent => unit.len() == 1,
                    FieldKind::Padic => unit.len() == 1 && unit[0] == 1,
                };
                if trivial {
                    let d = self.k.inv(unit[0])?;
                    return Ok(self.from_digits(-v, vec![d], None));
                }
                self.prec
            }
        } as usize;
        let w = match self.kind {
            FieldKind::Laurent => {
                let k = &self.k;
                let u0inv = k.inv(unit[0])?;
                let mut w = vec![0u32; r];
                w[0] = u0inv;
                for i in 1..r {
                    let mut s = 0;
                    for j in 1..=i.min(unit.len() - 1) {
                        s = k.add(s, k.mul(unit[j], w[i - j]));
                    }
                    w[i] = k.neg(k.mul(u0inv, s));
                }
                w
            }
            FieldKind::Padic => {
                let modulus = BigInt::from(self.p()).pow(r as u32);
                let u = BigInt::from(self.window_to_biguint(unit, r));
                let e = u.extended_gcd(&modulus);
                debug_assert!(e.gcd.is_one());
                let inv = e.x.mod_floor(&modulus).to_biguint().unwrap();
                return Ok(self.from_biguint_window(-v, &inv, Some(-v + r as i64)));
            }
        };
        Ok(self.normalize(-v, w, Some(-v + r as i64)))
    }

    pub fn div(&self, x: &LocalElem, y: &LocalElem) -> Result<LocalElem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &LocalElem, e: i64) -> Result<LocalElem> {
        let base = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut n = e.unsigned_abs();
        let mut r = self.one();
        let mut b = base;
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(&r, &b);
            }
            n >>= 1;
            if n > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(r)
    }

    /// Unit digits of a `Q_p` element as an integer modulo `p^len`.
    pub fn unit_window(&self, x: &LocalElem, len: usize) -> BigUint {
        self.window_to_biguint(&x.digits, len)
    }

    /// Integer value of an integral element modulo `p^k` (`Q_p` only).
    pub fn residue_int(&self, x: &LocalElem, k: i64) -> Result<BigUint> {
        let ds = self.residue_digits(x, k)?;
        Ok(self.window_to_biguint(&ds, ds.len()))
    }

    /// Rational approximation `x mod p^abs` for exact `Q_p` elements of
    /// nonnegative expansion; used for printing `Q_p` values as integers.
    pub fn to_bigint_exact(&self, x: &LocalElem) -> Option<BigInt> {
        if self.kind != FieldKind::Padic || !x.is_exact() {
            return None;
        }
        if x.is_zero() {
            return Some(BigInt::zero());
        }
        if x.val < 0 {
            return None;
        }
        let u = BigInt::from(self.window_to_biguint(&x.digits, x.digits.len()));
        Some(u * BigInt::from(self.p()).pow(x.val as u32))
    }

    /// Signed representative of a `Q_p` element known modulo `p^abs`, when
    /// it is integral and the symmetric representative is small.
    pub fn to_signed_int(&self, x: &LocalElem) -> Option<BigInt> {
        if let Some(n) = self.to_bigint_exact(x) {
            return Some(n);
        }
        if self.kind != FieldKind::Padic || x.val_lower_bound() < 0 {
            return None;
        }
        let a = x.abs?;
        let modulus = BigInt::from(self.p()).pow(a as u32);
        let u = if x.is_zero() {
            BigInt::zero()
        } else {
            BigInt::from(self.window_to_biguint(&x.digits, x.digits.len())) * BigInt::from(self.p()).pow(x.val as u32)
        };
        let neg = &u - &modulus;
        if neg.abs() < u {
            Some(neg)
        } else {
            Some(u)
        }
    }

    /// Formal derivative `d/dt` of a Laurent series.
    pub fn derivative(&self, x: &LocalElem) -> Result<LocalElem> {
        if self.kind != FieldKind::Laurent {
            return Err(Error::Unsupported("derivative is defined for Laurent series only".into()));
        }
        let Some(v) = x.val() else {
            return Ok(LocalElem { val: 0, digits: Vec::new(), abs: x.abs.map(|a| a - 1) });
        };
        let k = &self.k;
        let out: Vec<u32> = x
            .digits
            .iter()
            .enumerate()
            .map(|(i, &d)| k.mul(d, k.from_int(v + i as i64)))
            .collect();
        Ok(self.normalize(v - 1, out, x.abs.map(|a| a - 1)))
    }

    // ---- squares ----

    /// Square test. Requires enough precision to decide: one unit digit for
    /// odd `p`, three for `Q_2`, and all digits for `F_q((t))` with `q` even.
    pub fn is_square(&self, x: &LocalElem) -> Result<bool> {
        let v = self.val_checked(x)?;
        if self.is_char2() {
            // squares are exactly the series in t^2 (F_q is perfect)
            return Ok(x.digits.iter().enumerate().all(|(i, &d)| d == 0 || (v + i as i64) % 2 == 0));
        }
        if v % 2 != 0 {
            return Ok(false);
        }
        if self.p() != 2 {
            return Ok(self.k.is_square(x.digits[0]));
        }
        if x.rel_prec().is_some_and(|r| r < 3) {
            return Err(Error::precision("square test in Q_2 needs 3 unit digits"));
        }
        let u = self.unit_window(x, 3).to_u32().unwrap();
        Ok(u % 8 == 1)
    }

    /// A square root, if one exists.
    pub fn sqrt(&self, x: &LocalElem) -> Result<Option<LocalElem>> {
        if x.is_zero() {
            return Ok(Some(x.clone()));
        }
        if !self.is_square(x)? {
            return Ok(None);
        }
        let v = x.val;
        let u = self.unit_part(x)?;
        if self.is_char2() {
            let mut out = vec![0u32; x.digits.len().div_ceil(2)];
            for (i, &d) in x.digits.iter().enumerate() {
                if d != 0 {
                    out[i / 2] = self.k.sqrt(d).unwrap();
                }
            }
            let abs = x.abs.map(|a| (a + 1).div_euclid(2));
            return Ok(Some(self.normalize(v / 2, out, abs)));
        }
        let r = u.rel_prec().unwrap_or(self.prec);
        let root = if self.p() != 2 {
            // Newton iteration y <- (y + u/y)/2, quadratic convergence
            let mut y = self.from_residue(self.k.sqrt(u.digits[0]).unwrap());
            let half = self.from_ratio(1, 2)?;
            let mut known = 1;
            while known < r {
                let t = self.add(&y, &self.div(&u, &y)?);
                y = self.truncate(&self.mul(&t, &half), r);
                known *= 2;
            }
            self.truncate(&y, r)
        } else {
            // bitwise lifting: y^2 = u mod 2^k with y odd
            let r = r.max(3) as u32;
            let uu = self.unit_window(&u, r as usize);
            let mut y = BigUint::one();
            for k in 3..r {
                let m = BigUint::one() << (k + 1);
                if (&y * &y) % &m != &uu % &m {
                    y += BigUint::one() << (k - 1);
                }
            }
            // root known modulo 2^(r-1)
            self.from_biguint_window(0, &y, Some(r as i64 - 1))
        };
        Ok(Some(self.shift(&root, v / 2)))
    }
}
