//! Exact elements of cyclotomic fields `Q(ζ_m)`.
//!
//! A value is stored in the power basis `1, ζ, …, ζ^{φ(m)-1}` reduced modulo
//! the cyclotomic polynomial `Φ_m`. Binary operations lift both operands to
//! `Q(ζ_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Vec<i64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Integer coefficients of `Φ_m`, low degree first.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    cyclotomic_cache().lock().unwrap().insert(m, num.clone());
    num
}

fn exact_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    debug_assert_eq!(b[db], 1);
    let mut q = vec![0i64; r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db];
        q[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            r[i + j] -= c * bj;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|&k| k.gcd(&m) == 1).count() as u32
}

#[derive(Clone, Debug)]
pub struct CycloValue {
    m: u32,
    coeffs: Vec<BigRational>,
}

impl CycloValue {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycloValue { m: 1, coeffs: vec![r] }
    }

    /// `ζ_m^j`.
    pub fn root_of_unity(m: u32, j: i64) -> Self {
        assert!(m >= 1);
        let j = j.rem_euclid(m as i64) as usize;
        let mut v = vec![BigRational::zero(); m as usize];
        v[j] = BigRational::one();
        Self::reduce(m, v)
    }

    /// `i = ζ_4`.
    pub fn i() -> Self {
        Self::root_of_unity(4, 1)
    }

    /// Positive square root of a prime `p`, as an element of `Q(ζ_p)` or
    /// `Q(ζ_{4p})` (quadratic Gauss sum), or `Q(ζ_8)` for `p = 2`.
    pub fn sqrt_prime(p: u32) -> Self {
        if p == 2 {
            return Self::root_of_unity(8, 1).add(&Self::root_of_unity(8, 7));
        }
        // g = Σ_a (a/p) ζ_p^a, g^2 = (-1/p) p
        let mut g = Self::zero();
        for a in 1..p {
            let chi = legendre(a, p);
            g = g.add(&Self::root_of_unity(p, a as i64).scale_int(chi as i64));
        }
        if p % 4 == 1 {
            g
        } else {
            // g = i·sqrt(p)
            g.mul(&Self::root_of_unity(4, 3))
        }
    }

    /// `q^{e/2}` for a prime power `q = p^f`.
    pub fn sqrt_q_pow(p: u32, f: u32, e: i64) -> Self {
        // q^{e/2} = p^{f e / 2}
        let total = f as i64 * e;
        let half = total.div_euclid(2);
        let pb = BigRational::from_integer(BigInt::from(p));
        let rat = if half >= 0 {
            pb.pow(half as i32)
        } else {
            pb.recip().pow((-half) as i32)
        };
        let base = Self::from_rational(rat);
        if total.rem_euclid(2) == 1 {
            base.mul(&Self::sqrt_prime(p))
        } else {
            base
        }
    }

    pub fn order(&self) -> u32 {
        self.m
    }

    fn reduce(m: u32, mut v: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(m);
        let d = phi.len() - 1;
        while v.len() > d {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let k = v.len() - d;
            for (j, &c) in phi[..d].iter().enumerate() {
                if c != 0 {
                    v[k + j] -= &top * BigRational::from_integer(BigInt::from(c));
                }
            }
        }
        v.resize(d, BigRational::zero());
        CycloValue { m, coeffs: v }
    }

    /// Same value in `Q(ζ_n)`, `m | n`.
    fn lift(&self, n: u32) -> Self {
        if n == self.m {
            return self.clone();
        }
        debug_assert_eq!(n % self.m, 0);
        let step = (n / self.m) as usize;
        let mut v = vec![BigRational::zero(); n as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            v[(j * step) % n as usize] += c;
        }
        Self::reduce(n, v)
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let n = self.m.lcm(&other.m);
        (self.lift(n), other.lift(n))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycloValue { m: a.m, coeffs }
    }

    pub fn neg(&self) -> Self {
        CycloValue { m: self.m, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        if a.coeffs.len() == 1 {
            return b.scale(&a.coeffs[0]);
        }
        if b.coeffs.len() == 1 {
            return a.scale(&b.coeffs[0]);
        }
        let mut v = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        Self::reduce(a.m, v)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CycloValue { m: self.m, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut r = Self::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let m = self.m as usize;
        let mut v = vec![BigRational::zero(); m.max(1)];
        for (j, c) in self.coeffs.iter().enumerate() {
            v[(m - j) % m] += c;
        }
        Self::reduce(self.m, v)
    }

    /// Multiplicative inverse. Uses `x^{-1} = conj(x) / |x|^2` when `|x|^2`
    /// is rational, otherwise the norm to `Q` over the Galois conjugates.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rational() {
            return Some(Self::from_rational(r.recip()));
        }
        // product of all nontrivial Galois conjugates
        let m = self.m;
        let mut others = Self::one();
        for k in 2..m {
            if k.gcd(&m) == 1 {
                others = others.mul(&self.galois(k));
            }
        }
        let n = self.mul(&others).as_rational()?;
        Some(others.scale(&n.recip()))
    }

    /// Galois action `ζ ↦ ζ^k`, `gcd(k, m) = 1`.
    pub fn galois(&self, k: u32) -> Self {
        let m = self.m as usize;
        let mut v = vec![BigRational::zero(); m.max(1)];
        for (j, c) in self.coeffs.iter().enumerate() {
            v[(j * k as usize) % m] += c;
        }
        Self::reduce(self.m, v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// Complex value, for approximate display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let x = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / self.m as f64;
            re += x * ang.cos();
            im += x * ang.sin();
        }
        (re, im)
    }

    /// Smallest `n | m` with the value in `Q(ζ_n)`, as a value of that order.
    pub fn simplify(&self) -> Self {
        let m = self.m;
        for n in 1..m {
            if m % n != 0 {
                continue;
            }
            // candidate: invariant under ζ ↦ ζ^k for k ≡ 1 mod n
            let fixed = (1..m).filter(|&k| k.gcd(&m) == 1 && k % n == 1 % n).all(|k| self.galois(k) == *self);
            if fixed {
                return self.descend(n);
            }
        }
        self.clone()
    }

    /// Express a value known to lie in `Q(ζ_n)` at order `n`, by solving
    /// in the power basis of the subfield.
    fn descend(&self, n: u32) -> Self {
        let d = euler_phi(n) as usize;
        // basis images of 1, ζ_n, …, ζ_n^{d-1} in Q(ζ_m)
        let basis: Vec<CycloValue> = (0..d).map(|j| Self::root_of_unity(n, j as i64).lift(self.m)).collect();
        let rows = self.coeffs.len();
        // augmented matrix rows x (d + 1)
        let mut a: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<BigRational> = basis.iter().map(|b| b.coeffs[r].clone()).collect();
                row.push(self.coeffs[r].clone());
                row
            })
            .collect();
        let mut piv_row = 0;
        let mut pivots = Vec::new();
        for col in 0..d {
            let Some(pr) = (piv_row..rows).find(|&r| !a[r][col].is_zero()) else {
                continue;
            };
            a.swap(piv_row, pr);
            let inv = a[piv_row][col].recip();
            for x in a[piv_row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..rows {
                if r != piv_row && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..=d {
                        let t = &a[piv_row][c] * &f;
                        a[r][c] -= t;
                    }
                }
            }
            pivots.push(col);
            piv_row += 1;
        }
        let mut coeffs = vec![BigRational::zero(); d];
        for (r, &col) in pivots.iter().enumerate() {
            coeffs[col] = a[r][d].clone();
        }
        CycloValue { m: n, coeffs }
    }
}

fn legendre(a: u32, p: u32) -> i32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

impl PartialEq for CycloValue {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloValue {}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for CycloValue {
    /// Rationals print as `a/b`; other values as a sum of `c*zetaM^j` in the
    /// reduced power basis of the smallest cyclotomic field containing them.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.simplify();
        if let Some(r) = s.as_rational() {
            return write!(f, "{}", fmt_rat(&r));
        }
        let mut first = true;
        for (j, c) in s.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = if j == 0 {
                fmt_rat(&a)
            } else if a.is_one() {
                format!("zeta{}^{}", s.m, j)
            } else {
                format!("{}*zeta{}^{}", fmt_rat(&a), s.m, j)
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12).len(), 5);
    }

    #[test]
    fn roots_of_unity_relations() {
        let z = CycloValue::root_of_unity(6, 1);
        assert!(z.pow(6).is_one());
        assert!(!z.pow(3).is_one());
        let i = CycloValue::i();
        assert_eq!(i.mul(&i), CycloValue::from_int(-1));
        assert_eq!(CycloValue::root_of_unity(12, 3), i);
        assert_eq!(z.mul(&z.conj()), CycloValue::one());
    }

    #[test]
    fn square_roots_of_primes() {
        for p in [2, 3, 5, 7, 11, 13] {
            let s = CycloValue::sqrt_prime(p);
            assert_eq!(s.mul(&s), CycloValue::from_int(p as i64), "p = {p}");
            assert!(s.to_complex().0 > 0.0);
            assert!(s.to_complex().1.abs() < 1e-9);
        }
        let q = CycloValue::sqrt_q_pow(3, 3, -1);
        assert_eq!(q.mul(&q), CycloValue::from_ratio(1, 27));
    }

    #[test]
    fn display_forms() {
        assert_eq!(CycloValue::from_ratio(8, 6).to_string(), "4/3");
        assert_eq!(CycloValue::sqrt_prime(2).to_string(), "zeta8^1 - zeta8^3");
        assert_eq!(CycloValue::root_of_unity(12, 3).to_string(), "zeta4^1");
        assert_eq!(CycloValue::root_of_unity(3, 1).neg().to_string(), "-zeta3^1");
    }

    #[test]
    fn inverse() {
        let x = CycloValue::root_of_unity(5, 1).add(&CycloValue::from_int(2));
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
        assert!(CycloValue::zero().inv().is_none());
    }
}
