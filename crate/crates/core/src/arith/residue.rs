//! Finite residue fields `F_q`, `q = p^f`.
//!
//! Elements are encoded as integers in `[0, q)`: the base-`p` digits of the
//! index are the coefficients (low degree first) of a polynomial in the
//! generator `g`, reduced modulo the defining irreducible polynomial.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported residue field; multiplication is table driven.
pub const MAX_Q: u32 = 1024;

#[derive(Clone)]
pub struct ResidueField {
    p: u32,
    f: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Arc<Tables>,
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    sqrt: Vec<Option<u32>>,
}

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f && self.modulus == other.modulus
    }
}

impl Eq for ResidueField {}

impl fmt::Debug for ResidueField {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "F_{}(modulus={:?})", self.q, self.modulus)
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over Z/p, coefficient vectors low degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let m = trim(m.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv as u64 % p as u64;
        for (i, &mi) in m.iter().enumerate() {
            let idx = dr - dm + i;
            r[idx] = ((r[idx] as u64 + (p as u64 - c * mi as u64 % p as u64)) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

fn index_to_poly(mut x: u32, p: u32, len: usize) -> Vec<u32> {
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(x % p);
        x /= p;
    }
    v
}

fn poly_to_index(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `deg` with lower coefficients given by `idx`.
fn monic_from_index(idx: u32, p: u32, deg: usize) -> Vec<u32> {
    let mut v = index_to_poly(idx, p, deg);
    v.push(1);
    v
}

/// Irreducibility over Z/p by trial division with every monic polynomial of
/// degree at most half the degree.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let m = trim(m.to_vec());
    if m.len() < 2 {
        return false;
    }
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        for idx in 0..p.pow(d as u32) {
            let g = monic_from_index(idx, p, d);
            if poly_rem(&m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl ResidueField {
    /// Prime field `Z/p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// `F_{p^f}`. Without an explicit modulus the first irreducible monic
    /// polynomial of degree `f` in index order is used.
    pub fn new(p: u32, f: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if f == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::InvalidField(format!("q = {p}^{f} exceeds {MAX_Q}")))?;
        let modulus = match modulus {
            Some(m) => {
                let m = trim(m);
                if m.len() != f as usize + 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus must have {} coefficients in [0,{p})",
                        f + 1
                    )));
                }
                if m[f as usize] != 1 {
                    return Err(Error::InvalidField("modulus must be monic".into()));
                }
                if !is_irreducible(&m, p) {
                    return Err(Error::InvalidField(format!("modulus {m:?} is reducible mod {p}")));
                }
                m
            }
            None if f == 1 => vec![0, 1],
            None => (0..p.pow(f))
                .map(|i| monic_from_index(i, p, f as usize))
                .find(|m| is_irreducible(m, p))
                .expect("irreducible polynomials exist in every degree"),
        };
        let tables = Arc::new(Tables::build(p, f, q, &modulus));
        Ok(ResidueField { p, f, q, modulus, tables })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.tables.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.tables.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.tables.neg[a as usize]
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.tables.inv[a as usize])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut r = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// Embedding of an integer through the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn is_square(&self, a: u32) -> bool {
        self.tables.sqrt[a as usize].is_some()
    }

    pub fn sqrt(&self, a: u32) -> Option<u32> {
        self.tables.sqrt[a as usize]
    }

    /// Quadratic character of `F_q^x` (`p` odd); `0` maps to `0`.
    pub fn quadratic_char(&self, a: u32) -> i32 {
        if a == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    /// Absolute trace `F_q -> F_p`, returned as an element of `[0, p)`.
    pub fn abs_trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.f {
            acc = self.add(acc, x);
            x = self.pow(x, self.p as u64);
        }
        debug_assert!(acc < self.p);
        acc
    }

    /// First element of the given absolute trace, in index order.
    pub fn first_with_trace(&self, tr: u32) -> Option<u32> {
        (0..self.q).find(|&a| self.abs_trace(a) == tr)
    }

    /// First non-square in index order (`p` odd).
    pub fn first_nonsquare(&self) -> Option<u32> {
        (1..self.q).find(|&a| !self.is_square(a))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }
}

impl Tables {
    fn build(p: u32, f: u32, q: u32, modulus: &[u32]) -> Self {
        let n = q as usize;
        let f = f as usize;
        let polys: Vec<Vec<u32>> = (0..q).map(|i| index_to_poly(i, p, f)).collect();
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let s: Vec<u32> = polys[a].iter().zip(&polys[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * n + b] = poly_to_index(&s, p);
                let mut prod = vec![0u32; 2 * f];
                for (i, &x) in polys[a].iter().enumerate() {
                    for (j, &y) in polys[b].iter().enumerate() {
                        prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
                    }
                }
                let mut r = poly_rem(&prod, modulus, p);
                r.resize(f, 0);
                mul[a * n + b] = poly_to_index(&r, p);
            }
        }
        let neg = (0..n)
            .map(|a| {
                let v: Vec<u32> = polys[a].iter().map(|&c| (p - c) % p).collect();
                poly_to_index(&v, p)
            })
            .collect();
        let mut inv = vec![0; n];
        for a in 1..n {
            inv[a] = (1..n).find(|&b| mul[a * n + b] == 1).expect("field") as u32;
        }
        let mut sqrt = vec![None; n];
        for a in 0..n {
            let s = mul[a * n + a] as usize;
            if sqrt[s].is_none() {
                sqrt[s] = Some(a as u32);
            }
        }
        Tables { add, mul, neg, inv, sqrt }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_nonzero_element_invertible() {
        for (p, f) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
            let k = ResidueField::new(p, f, None).unwrap();
            assert_eq!(k.q(), p.pow(f));
            for a in 1..k.q() {
                assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
            }
            assert!(k.inv(0).is_err());
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(ResidueField::new(2, 2, Some(vec![1, 0, 1])).is_err());
        assert!(ResidueField::new(2, 2, Some(vec![1, 1, 1])).is_ok());
        // x^2 + 1 is irreducible over F_3
        assert!(ResidueField::new(3, 2, Some(vec![1, 0, 1])).is_ok());
        assert!(ResidueField::new(4, 1, None).is_err());
    }

    #[test]
    fn f4_generator_relation() {
        let k = ResidueField::new(2, 2, None).unwrap();
        // g = index 2; g^2 = g + 1 = index 3
        assert_eq!(k.mul(2, 2), 3);
        assert_eq!(k.abs_trace(2), 1);
        assert_eq!(k.abs_trace(1), 0);
    }

    #[test]
    fn squares_half_the_units_for_odd_p() {
        for (p, f) in [(3, 1), (3, 2), (5, 1)] {
            let k = ResidueField::new(p, f, None).unwrap();
            let count = (1..k.q()).filter(|&a| k.is_square(a)).count() as u32;
            assert_eq!(count, (k.q() - 1) / 2);
        }
    }
}
