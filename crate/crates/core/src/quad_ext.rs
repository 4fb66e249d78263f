//! Separable quadratic extensions `E = F[X]/(X^2 - 𝔱X + 𝔡)`.
//!
//! Elements are `a + bτ` with `τ` the class of `X`. The character `ε_{E/F}`
//! of `F^×` is evaluated through a closed symbol: the tame Hilbert symbol for
//! odd residue characteristic, the 2-adic Hilbert symbol for `Q_2`, and the
//! Artin–Schreier residue symbol `Tr Res(c·dx/x)` in characteristic 2.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_residues, format_elem, parse_elem, LocalElem, LocalField};
use crate::cyclo::CycloValue;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtKind {
    Split,
    Unramified,
    Ramified,
}

impl ExtKind {
    pub fn name(self) -> &'static str {
        match self {
            ExtKind::Split => "split",
            ExtKind::Unramified => "unramified",
            ExtKind::Ramified => "ramified",
        }
    }
}

impl fmt::Display for ExtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElem {
    pub a: LocalElem,
    pub b: LocalElem,
}

/// The constant `λ(E/F, ψ)` for the standard additive character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lambda {
    pub value: CycloValue,
    /// `false` when the value is a configured stand-in rather than computed.
    pub canonical: bool,
}

#[derive(Clone, Debug)]
pub struct QuadExt {
    base: LocalField,
    tr: LocalElem,
    det: LocalElem,
    kind: ExtKind,
    /// `v(𝔱^2 - 4𝔡)`, so that `|τ - τ̄|^2 = q^{-disc_val}`.
    disc_val: i64,
    lambda_override: Option<CycloValue>,
}

impl PartialEq for QuadExt {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.tr == other.tr && self.det == other.det
    }
}

impl QuadExt {
    /// Build and classify `F[X]/(X^2 - tr X + det)`. The presentation must be
    /// integral with `{1, τ}` an `O`-basis of the integral closure.
    pub fn new(base: &LocalField, tr: LocalElem, det: LocalElem) -> Result<Self> {
        let f = base;
        if det.is_zero() {
            return Err(Error::InvalidExtension("𝔡 must be nonzero".into()));
        }
        if !f.is_integral(&tr) || !f.is_integral(&det) {
            return Err(Error::InvalidExtension("𝔱 and 𝔡 must be integral".into()));
        }
        let disc = discriminant(f, &tr, &det);
        if disc.is_zero() {
            return Err(Error::InvalidExtension(if f.is_char2() {
                "inseparable: 𝔱 = 0 in characteristic 2".into()
            } else {
                "X^2 - 𝔱X + 𝔡 has a double root".into()
            }));
        }
        let (kind, basis_ok) = if f.is_char2() {
            classify_char2(f, &tr, &det)?
        } else if f.p() == 2 {
            classify_q2(f, &disc)?
        } else {
            let v = f.val_checked(&disc)?;
            let kind = if f.is_square(&disc)? {
                ExtKind::Split
            } else if v % 2 == 0 {
                ExtKind::Unramified
            } else {
                ExtKind::Ramified
            };
            let want = if kind == ExtKind::Ramified { 1 } else { 0 };
            (kind, v == want)
        };
        if !basis_ok {
            return Err(Error::InvalidExtension(format!(
                "{{1, τ}} is not an integral basis of the {kind} extension"
            )));
        }
        let disc_val = f.val_checked(&disc)?;
        Ok(QuadExt { base: f.clone(), tr, det, kind, disc_val, lambda_override: None })
    }

    /// Fixed presentation of each kind over the given base.
    pub fn canonical(base: &LocalField, kind: ExtKind) -> Result<Self> {
        let f = base;
        let (tr, det) = if f.is_char2() {
            match kind {
                ExtKind::Unramified => {
                    let c = f.residue_field().first_with_trace(1).expect("trace is onto");
                    (f.one(), f.from_residue(c))
                }
                ExtKind::Ramified => (f.uniformizer(), f.uniformizer()),
                ExtKind::Split => (f.one(), f.uniformizer()),
            }
        } else if f.p() == 2 {
            match kind {
                ExtKind::Unramified => (f.one(), f.from_int(-1)),
                ExtKind::Ramified => (f.zero(), f.from_int(-2)),
                ExtKind::Split => (f.from_int(3), f.from_int(2)),
            }
        } else {
            match kind {
                ExtKind::Unramified => {
                    let u = f.residue_field().first_nonsquare().expect("odd q has non-squares");
                    (f.zero(), f.neg(&f.from_residue(u)))
                }
                ExtKind::Ramified => (f.zero(), f.neg(&f.uniformizer())),
                ExtKind::Split => (f.from_int(3), f.from_int(2)),
            }
        };
        Self::new(f, tr, det)
    }

    /// `unramified`, `ramified`, `split`, or `ext:t=<elem>,d=<elem>`.
    pub fn parse(base: &LocalField, s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "unramified" => return Self::canonical(base, ExtKind::Unramified),
            "ramified" => return Self::canonical(base, ExtKind::Ramified),
            "split" => return Self::canonical(base, ExtKind::Split),
            _ => {}
        }
        let rest = s
            .strip_prefix("ext:")
            .ok_or_else(|| Error::InvalidExtension(format!("unknown extension `{s}`")))?;
        let mut tr = None;
        let mut det = None;
        for kv in rest.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidExtension(format!("expected key=value, got `{kv}`")))?;
            match k.trim() {
                "t" => tr = Some(parse_elem(base, v)?),
                "d" => det = Some(parse_elem(base, v)?),
                other => return Err(Error::InvalidExtension(format!("unknown key `{other}`"))),
            }
        }
        match (tr, det) {
            (Some(t), Some(d)) => Self::new(base, t, d),
            _ => Err(Error::InvalidExtension("need both t= and d=".into())),
        }
    }

    pub fn spec_string(&self) -> String {
        format!("ext:t={},d={}", format_elem(&self.base, &self.tr), format_elem(&self.base, &self.det))
    }

    pub fn base(&self) -> &LocalField {
        &self.base
    }

    pub fn kind(&self) -> ExtKind {
        self.kind
    }

    pub fn is_field(&self) -> bool {
        self.kind != ExtKind::Split
    }

    pub fn tr(&self) -> &LocalElem {
        &self.tr
    }

    pub fn det(&self) -> &LocalElem {
        &self.det
    }

    /// `v_F(𝔱^2 - 4𝔡) = v_F((τ - τ̄)^2)`.
    pub fn disc_val(&self) -> i64 {
        self.disc_val
    }

    /// Ramification index.
    pub fn e(&self) -> i64 {
        if self.kind == ExtKind::Ramified {
            2
        } else {
            1
        }
    }

    pub fn q(&self) -> u32 {
        self.base.q()
    }

    // ---- elements ----

    pub fn elem(&self, a: LocalElem, b: LocalElem) -> ExtElem {
        ExtElem { a, b }
    }

    pub fn from_base(&self, a: LocalElem) -> ExtElem {
        ExtElem { a, b: self.base.zero() }
    }

    pub fn one(&self) -> ExtElem {
        self.from_base(self.base.one())
    }

    pub fn tau(&self) -> ExtElem {
        ExtElem { a: self.base.zero(), b: self.base.one() }
    }

    pub fn add(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.add(&x.a, &y.a), b: f.add(&x.b, &y.b) }
    }

    pub fn sub(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.sub(&x.a, &y.a), b: f.sub(&x.b, &y.b) }
    }

    pub fn neg(&self, x: &ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.neg(&x.a), b: f.neg(&x.b) }
    }

    pub fn mul(&self, x: &ExtElem, y: &ExtElem) -> ExtElem {
        let f = &self.base;
        // τ^2 = 𝔱τ - 𝔡
        let bd = f.mul(&x.b, &y.b);
        let a = f.sub(&f.mul(&x.a, &y.a), &f.mul(&bd, &self.det));
        let b = f.add(&f.add(&f.mul(&x.a, &y.b), &f.mul(&x.b, &y.a)), &f.mul(&bd, &self.tr));
        ExtElem { a, b }
    }

    pub fn scale(&self, c: &LocalElem, x: &ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.mul(c, &x.a), b: f.mul(c, &x.b) }
    }

    /// Galois conjugate `a + bτ̄ = (a + b𝔱) - bτ`.
    pub fn conj(&self, x: &ExtElem) -> ExtElem {
        let f = &self.base;
        ExtElem { a: f.add(&x.a, &f.mul(&x.b, &self.tr)), b: f.neg(&x.b) }
    }

    pub fn norm(&self, x: &ExtElem) -> LocalElem {
        let f = &self.base;
        let t1 = f.square(&x.a);
        let t2 = f.mul(&f.mul(&x.a, &x.b), &self.tr);
        let t3 = f.mul(&f.square(&x.b), &self.det);
        f.add(&f.add(&t1, &t2), &t3)
    }

    pub fn trace(&self, x: &ExtElem) -> LocalElem {
        let f = &self.base;
        f.add(&f.mul_int(&x.a, 2), &f.mul(&x.b, &self.tr))
    }

    pub fn inv(&self, x: &ExtElem) -> Result<ExtElem> {
        let n = self.norm(x);
        let ninv = self.base.inv(&n)?;
        Ok(self.scale(&ninv, &self.conj(x)))
    }

    pub fn pow(&self, x: &ExtElem, e: i64) -> Result<ExtElem> {
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

    pub fn eq(&self, x: &ExtElem, y: &ExtElem) -> bool {
        self.base.eq(&x.a, &y.a) && self.base.eq(&x.b, &y.b)
    }

    pub fn is_integral(&self, x: &ExtElem) -> bool {
        self.base.is_integral(&x.a) && self.base.is_integral(&x.b)
    }

    pub fn format(&self, x: &ExtElem) -> String {
        format!("({}) + ({})*tau", format_elem(&self.base, &x.a), format_elem(&self.base, &x.b))
    }

    // ---- ε and λ ----

    /// `ε_{E/F}(x) ∈ {±1}`: `+1` iff `x` is a norm from `E`.
    pub fn epsilon(&self, x: &LocalElem) -> Result<i32> {
        let f = &self.base;
        if x.is_zero() {
            return Err(if x.is_exact() {
                Error::InvalidArgument("ε is defined on F^×".into())
            } else {
                Error::precision("argument indistinguishable from zero")
            });
        }
        if self.kind == ExtKind::Split {
            return Ok(1);
        }
        if f.is_char2() {
            return self.epsilon_char2(x);
        }
        let d = discriminant(f, &self.tr, &self.det);
        if f.p() == 2 {
            hilbert_q2(f, x, &d)
        } else {
            hilbert_odd(f, x, &d)
        }
    }

    fn epsilon_char2(&self, x: &LocalElem) -> Result<i32> {
        let f = &self.base;
        let k = f.residue_field();
        let c = f.div(&self.det, &f.square(&self.tr))?;
        let m = (-f.val_checked(&c)?).max(0);
        let v = f.val_checked(x)?;
        let u = f.unit_part(x)?;
        if u.rel_prec().is_some_and(|r| r < m.max(1)) {
            return Err(Error::precision(format!("ε needs {} unit digits", m.max(1))));
        }
        // Res(c · v dt/t) = v · c_0
        let mut res = if v.rem_euclid(2) == 1 { f.digit(&c, 0)? } else { 0 };
        if m > 0 {
            let g = f.div(&f.derivative(&u)?, &u)?;
            for i in -m..0 {
                let j = -1 - i;
                let ci = f.digit(&c, i)?;
                let gj = f.digit(&g, j)?;
                res = k.add(res, k.mul(ci, gj));
            }
        }
        Ok(if k.abs_trace(res) == 0 { 1 } else { -1 })
    }

    pub fn epsilon_minus_one(&self) -> i32 {
        self.epsilon(&self.base.from_int(-1)).expect("-1 is a unit of full precision")
    }

    /// A unit of `F` that is not a norm (ramified), or `ϖ` (unramified).
    pub fn non_norm(&self) -> Result<LocalElem> {
        let f = &self.base;
        match self.kind {
            ExtKind::Split => Err(Error::InvalidArgument("every element is a norm from a split algebra".into())),
            ExtKind::Unramified => Ok(f.uniformizer()),
            ExtKind::Ramified => {
                for level in 1..=6u32 {
                    for u in enumerate_residues(f, level)? {
                        if f.is_unit(&u) && self.epsilon(&u)? == -1 {
                            return Ok(u);
                        }
                    }
                }
                Err(Error::precision("no non-norm unit found below level 6"))
            }
        }
    }

    pub fn with_lambda(mut self, value: CycloValue) -> Result<Self> {
        let eps = CycloValue::from_int(self.epsilon_minus_one() as i64);
        if value.mul(&value) != eps {
            return Err(Error::InvalidArgument(format!("λ = {value} violates λ^2 = ε(-1)")));
        }
        self.lambda_override = Some(value);
        Ok(self)
    }

    /// `λ(E/F, ψ)` for `ψ` trivial on `O` and not on `ϖ^{-1}O`.
    pub fn lambda(&self) -> Lambda {
        if let Some(v) = &self.lambda_override {
            return Lambda { value: v.clone(), canonical: false };
        }
        match self.kind {
            ExtKind::Split | ExtKind::Unramified => Lambda { value: CycloValue::one(), canonical: true },
            ExtKind::Ramified if self.base.p() != 2 => {
                Lambda { value: normalized_gauss_sum(&self.base), canonical: true }
            }
            ExtKind::Ramified => {
                let value = if self.epsilon_minus_one() == 1 { CycloValue::one() } else { CycloValue::i() };
                Lambda { value, canonical: false }
            }
        }
    }
}

fn discriminant(f: &LocalField, tr: &LocalElem, det: &LocalElem) -> LocalElem {
    f.sub(&f.square(tr), &f.mul_int(det, 4))
}

/// `q^{-1/2} Σ_{u ∈ F_q^×} η(u) ζ_p^{Tr u}`.
pub fn normalized_gauss_sum(f: &LocalField) -> CycloValue {
    let k = f.residue_field();
    let p = k.p();
    let mut g = CycloValue::zero();
    for u in 1..k.q() {
        let z = CycloValue::root_of_unity(p, k.abs_trace(u) as i64);
        g = g.add(&z.scale_int(k.quadratic_char(u) as i64));
    }
    g.mul(&CycloValue::sqrt_q_pow(p, k.f(), -1))
}

/// Tame Hilbert symbol `(x, y)` for odd residue characteristic.
pub fn hilbert_odd(f: &LocalField, x: &LocalElem, y: &LocalElem) -> Result<i32> {
    let k = f.residue_field();
    let a = f.val_checked(x)?;
    let b = f.val_checked(y)?;
    let u = f.lead(x)?;
    let w = f.lead(y)?;
    let mut s = 1;
    if (a * b).rem_euclid(2) == 1 && ((k.q() - 1) / 2) % 2 == 1 {
        s = -s;
    }
    if b.rem_euclid(2) == 1 {
        s *= k.quadratic_char(u);
    }
    if a.rem_euclid(2) == 1 {
        s *= k.quadratic_char(w);
    }
    Ok(s)
}

fn unit_mod8(f: &LocalField, x: &LocalElem) -> Result<u32> {
    if x.rel_prec().is_some_and(|r| r < 3) {
        return Err(Error::precision("2-adic symbol needs 3 unit digits"));
    }
    Ok(f.unit_window(x, 3).iter_u32_digits().next().unwrap_or(0) % 8)
}

/// Hilbert symbol `(x, y)_2` on `Q_2`.
pub fn hilbert_q2(f: &LocalField, x: &LocalElem, y: &LocalElem) -> Result<i32> {
    let a = f.val_checked(x)?;
    let b = f.val_checked(y)?;
    let u = unit_mod8(f, x)?;
    let w = unit_mod8(f, y)?;
    let eps = |n: u32| ((n - 1) / 2) % 2;
    let omega = |n: u32| ((n * n - 1) / 8) % 2;
    let e = eps(u) * eps(w) + (a.rem_euclid(2) as u32) * omega(w) + (b.rem_euclid(2) as u32) * omega(u);
    Ok(if e % 2 == 0 { 1 } else { -1 })
}

fn classify_q2(f: &LocalField, disc: &LocalElem) -> Result<(ExtKind, bool)> {
    let v = f.val_checked(disc)?;
    let u = unit_mod8(f, disc)?;
    let kind = if v % 2 == 1 {
        ExtKind::Ramified
    } else {
        match u {
            1 => ExtKind::Split,
            5 => ExtKind::Unramified,
            _ => ExtKind::Ramified,
        }
    };
    let ok = match kind {
        ExtKind::Ramified => v == 2 || v == 3,
        _ => v == 0,
    };
    Ok((kind, ok))
}

/// Artin–Schreier reduction of `c = 𝔡/𝔱^2`: strip even polar terms by
/// `y^2 + y`; an odd pole means ramified, otherwise the residue trace decides.
fn classify_char2(f: &LocalField, tr: &LocalElem, det: &LocalElem) -> Result<(ExtKind, bool)> {
    let k = f.residue_field();
    let mut c = f.div(det, &f.square(tr))?;
    loop {
        let v = c.val_lower_bound();
        if v >= 0 {
            break;
        }
        if v % 2 != 0 {
            let m = -v;
            let vt = f.val_checked(tr)?;
            return Ok((ExtKind::Ramified, 2 * vt == m + 1));
        }
        let s = k.sqrt(f.lead(&c)?).expect("F_q is perfect");
        let y = f.from_digits(v / 2, vec![s], None);
        c = f.sub(&c, &f.add(&f.square(&y), &y));
    }
    let c0 = if c.is_zero() { 0 } else { f.digit(&c, 0)? };
    let kind = if k.abs_trace(c0) == 0 { ExtKind::Split } else { ExtKind::Unramified };
    Ok((kind, f.val_checked(tr)? == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;

    fn ext(field: &str, kind: ExtKind) -> QuadExt {
        QuadExt::canonical(&parse_field(field).unwrap(), kind).unwrap()
    }

    #[test]
    fn classification_examples() {
        let f = parse_field("Qp:p=5,prec=10").unwrap();
        let e = QuadExt::new(&f, f.zero(), f.from_int(-2)).unwrap();
        assert_eq!(e.kind(), ExtKind::Unramified);
        let e = QuadExt::new(&f, f.zero(), f.from_int(-5)).unwrap();
        assert_eq!(e.kind(), ExtKind::Ramified);
        let e = QuadExt::new(&f, f.zero(), f.from_int(-4)).unwrap();
        assert_eq!(e.kind(), ExtKind::Split);
        // X^2 - 25 has a non-maximal order
        assert!(QuadExt::new(&f, f.zero(), f.from_int(-50)).is_err());
    }

    #[test]
    fn canonical_kinds_everywhere() {
        for field in ["Qp:p=3,prec=10", "Qp:p=5,prec=10", "Qp:p=2,prec=12", "Fq:p=2,f=1,prec=12", "Fq:p=2,f=2,prec=12", "Fq:p=3,f=1,prec=10"] {
            for kind in [ExtKind::Split, ExtKind::Unramified, ExtKind::Ramified] {
                assert_eq!(ext(field, kind).kind(), kind, "{field} {kind}");
            }
        }
    }

    #[test]
    fn char2_rejections() {
        let f = parse_field("Fq:p=2,f=1,prec=10").unwrap();
        assert!(QuadExt::new(&f, f.zero(), f.one()).is_err());
        let tinv = f.inv(&f.uniformizer()).unwrap();
        assert!(QuadExt::new(&f, f.one(), tinv).is_err());
    }

    #[test]
    fn unramified_epsilon_is_parity_of_valuation() {
        let e = ext("Qp:p=3,prec=10", ExtKind::Unramified);
        let f = e.base();
        assert_eq!(e.epsilon(&f.from_int(3)).unwrap(), -1);
        assert_eq!(e.epsilon(&f.from_int(9)).unwrap(), 1);
        assert_eq!(e.epsilon(&f.from_int(2)).unwrap(), 1);
        let e = ext("Fq:p=2,f=1,prec=10", ExtKind::Unramified);
        let f = e.base();
        let x = f.from_digits(1, vec![1, 1, 0, 1], None);
        assert_eq!(e.epsilon(&x).unwrap(), -1);
    }

    #[test]
    fn lambda_values() {
        let e = ext("Qp:p=3,prec=10", ExtKind::Unramified);
        assert!(e.lambda().value.is_one());
        let e = ext("Qp:p=3,prec=10", ExtKind::Ramified);
        let l = e.lambda();
        assert!(l.canonical);
        assert_eq!(l.value, CycloValue::i());
        let e = ext("Qp:p=5,prec=10", ExtKind::Ramified);
        assert!(e.lambda().value.is_one());
        let e = ext("Fq:p=3,f=2,prec=10", ExtKind::Ramified);
        // Hasse–Davenport: -(-i)^2 = 1
        assert!(e.lambda().value.is_one());
        let e = ext("Fq:p=2,f=1,prec=10", ExtKind::Ramified);
        assert!(!e.lambda().canonical);
    }

    #[test]
    fn torus_arithmetic() {
        let e = ext("Qp:p=5,prec=10", ExtKind::Unramified);
        let f = e.base();
        let x = e.elem(f.from_int(2), f.from_int(3));
        let y = e.elem(f.from_int(1), f.from_int(-1));
        assert!(f.eq(&e.norm(&e.mul(&x, &y)), &f.mul(&e.norm(&x), &e.norm(&y))));
        assert!(f.eq(&e.norm(&x), &e.mul(&x, &e.conj(&x)).a));
        assert!(e.mul(&x, &e.conj(&x)).b.is_zero());
        let xi = e.inv(&x).unwrap();
        assert!(e.eq(&e.mul(&x, &xi), &e.one()));
    }
}
