//! 2×2 matrices over a local field, torus embeddings, Hecke-cell test
//! functions and the rational-class marker.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{format_elem, LocalElem, LocalField};
use crate::error::{Error, Result};
use crate::quad_ext::{ExtElem, QuadExt};

/// `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: LocalElem,
    pub b: LocalElem,
    pub c: LocalElem,
    pub d: LocalElem,
}

impl Mat2 {
    pub fn new(a: LocalElem, b: LocalElem, c: LocalElem, d: LocalElem) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity(f: &LocalField) -> Self {
        Mat2::new(f.one(), f.zero(), f.zero(), f.one())
    }

    pub fn diag(f: &LocalField, x: LocalElem, y: LocalElem) -> Self {
        Mat2::new(x, f.zero(), f.zero(), y)
    }

    pub fn entries(&self) -> [&LocalElem; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, f: &LocalField, o: &Mat2) -> Mat2 {
        let dot = |x: &LocalElem, y: &LocalElem, z: &LocalElem, w: &LocalElem| f.add(&f.mul(x, y), &f.mul(z, w));
        Mat2::new(
            dot(&self.a, &o.a, &self.b, &o.c),
            dot(&self.a, &o.b, &self.b, &o.d),
            dot(&self.c, &o.a, &self.d, &o.c),
            dot(&self.c, &o.b, &self.d, &o.d),
        )
    }

    pub fn det(&self, f: &LocalField) -> LocalElem {
        f.sub(&f.mul(&self.a, &self.d), &f.mul(&self.b, &self.c))
    }

    pub fn trace(&self, f: &LocalField) -> LocalElem {
        f.add(&self.a, &self.d)
    }

    pub fn inv(&self, f: &LocalField) -> Result<Mat2> {
        let di = f.inv(&self.det(f))?;
        Ok(Mat2::new(
            f.mul(&self.d, &di),
            f.neg(&f.mul(&self.b, &di)),
            f.neg(&f.mul(&self.c, &di)),
            f.mul(&self.a, &di),
        ))
    }

    /// `g^{-1} self g`.
    pub fn conjugate_by(&self, f: &LocalField, g: &Mat2) -> Result<Mat2> {
        Ok(g.inv(f)?.mul(f, self).mul(f, g))
    }

    pub fn truncate(&self, f: &LocalField, abs: i64) -> Mat2 {
        Mat2::new(f.truncate(&self.a, abs), f.truncate(&self.b, abs), f.truncate(&self.c, abs), f.truncate(&self.d, abs))
    }

    /// Minimum entry valuation. Fails when an inexact zero entry leaves the
    /// minimum undetermined.
    pub fn min_val(&self, _f: &LocalField) -> Result<i64> {
        let known = self.entries().iter().filter_map(|e| e.val()).min();
        let bound = self
            .entries()
            .iter()
            .filter(|e| e.is_zero())
            .filter_map(|e| e.abs_prec())
            .min();
        match (known, bound) {
            (Some(k), Some(b)) if b <= k => Err(Error::precision("matrix entry valuation undetermined")),
            (Some(k), _) => Ok(k),
            (None, _) => Err(Error::precision("matrix indistinguishable from zero")),
        }
    }

    pub fn format(&self, f: &LocalField) -> [String; 4] {
        self.entries().map(|e| format_elem(f, e))
    }
}

/// `x = a + bτ ↦ [[a, -b𝔡], [b, a + b𝔱]]`.
pub fn embed(e: &QuadExt, x: &ExtElem) -> Mat2 {
    let f = e.base();
    Mat2::new(
        x.a.clone(),
        f.neg(&f.mul(&x.b, e.det())),
        x.b.clone(),
        f.add(&x.a, &f.mul(&x.b, e.tr())),
    )
}

/// Embedding into `SL(2)`; requires `N(x) = 1`.
pub fn embed_sl2(e: &QuadExt, x: &ExtElem) -> Result<Mat2> {
    let f = e.base();
    if !f.eq(&e.norm(x), &f.one()) {
        return Err(Error::InvalidArgument("torus element must have norm 1".into()));
    }
    Ok(embed(e, x))
}

/// `α(μ)^{-1} t α(μ)` for `α(μ) = diag(μ, 1)`, `μ = ϖ^{-m}`:
/// `[[a, -b𝔡ϖ^m], [bϖ^{-m}, a + b𝔱]]`.
pub fn cell_matrix(e: &QuadExt, t: &ExtElem, m: i64) -> Mat2 {
    let f = e.base();
    let base = embed(e, t);
    Mat2::new(base.a, f.shift(&base.b, m), f.shift(&base.c, -m), base.d)
}

/// A bi-`K`-invariant function `Σ_r c_r 1_{K diag(ϖ^r, ϖ^{-r}) K}` on
/// `SL(2, F)`, `K = SL(2, O)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestFunction {
    cells: BTreeMap<u32, BigRational>,
}

impl TestFunction {
    pub fn unit() -> Self {
        Self::cell(0)
    }

    pub fn cell(r: u32) -> Self {
        let mut cells = BTreeMap::new();
        cells.insert(r, BigRational::one());
        TestFunction { cells }
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (u32, BigRational)>) -> Self {
        let mut map = BTreeMap::new();
        for (r, c) in cells {
            let e = map.entry(r).or_insert_with(BigRational::zero);
            *e += c;
        }
        map.retain(|_, c: &mut BigRational| !c.is_zero());
        TestFunction { cells: map }
    }

    /// `1K`, or `r:coeff,...` such as `0:1,1:-1/2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1K" {
            return Ok(Self::unit());
        }
        let mut cells = Vec::new();
        for part in s.split(',') {
            let (r, c) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidArgument(format!("expected r:coeff, got `{part}`")))?;
            let r: u32 = r
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad cell index `{r}`")))?;
            cells.push((r, parse_rational(c)?));
        }
        Ok(Self::from_cells(cells))
    }

    pub fn cells(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.cells.iter().map(|(r, c)| (*r, c))
    }

    pub fn coeff(&self, r: u32) -> BigRational {
        self.cells.get(&r).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn r_max(&self) -> u32 {
        self.cells.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        *self == Self::unit()
    }

    /// Cell index `r` with `M ∈ K diag(ϖ^r, ϖ^{-r}) K`, for `det M = 1`.
    pub fn cell_of(f: &LocalField, m: &Mat2) -> Result<u32> {
        let v = m.min_val(f)?;
        if v > 0 {
            return Err(Error::InvalidArgument("not of determinant 1".into()));
        }
        Ok((-v) as u32)
    }

    pub fn eval(&self, f: &LocalField, m: &Mat2) -> Result<BigRational> {
        Ok(self.coeff(Self::cell_of(f, m)?))
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1K");
        }
        let parts: Vec<String> = self.cells.iter().map(|(r, c)| format!("{r}:{c}")).collect();
        if parts.is_empty() {
            return f.write_str("0:0");
        }
        f.write_str(&parts.join(","))
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Stable class (characteristic polynomial) plus rational-class marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjClassId {
    pub trace: LocalElem,
    /// `ε(c)` for the lower-left entry `c` of the representative.
    pub marker: i32,
}

/// Marker `ε_{E/F}(c)` of a regular elliptic matrix `[[·,·],[c,·]]`.
pub fn class_marker(e: &QuadExt, m: &Mat2) -> Result<i32> {
    e.epsilon(&m.c)
}

/// The two rational classes in the stable class of `t`: the standard
/// embedding and its conjugate by `diag(s, 1)` with `ε(s) = -1`.
pub fn stable_class_split(e: &QuadExt, t: &ExtElem) -> Result<(ConjClassId, [Mat2; 2])> {
    let f = e.base();
    if !e.is_field() {
        return Err(Error::InvalidArgument("a split torus has a single rational class".into()));
    }
    if t.b.is_zero() {
        return Err(Error::InvalidArgument("central element".into()));
    }
    let m = embed_sl2(e, t)?;
    let eta = Mat2::diag(f, e.non_norm()?, f.one());
    let m2 = m.conjugate_by(f, &eta)?;
    let id = ConjClassId { trace: m.trace(f), marker: class_marker(e, &m)? };
    Ok((id, [m, m2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;
    use crate::quad_ext::ExtKind;

    #[test]
    fn hecke_cells() {
        let f = parse_field("Qp:p=3,prec=10").unwrap();
        let one = TestFunction::unit();
        assert_eq!(one.eval(&f, &Mat2::identity(&f)).unwrap(), BigRational::one());
        let a = Mat2::diag(&f, f.uniformizer(), f.inv(&f.uniformizer()).unwrap());
        assert!(one.eval(&f, &a).unwrap().is_zero());
        assert_eq!(TestFunction::cell(1).eval(&f, &a).unwrap(), BigRational::one());
        let tf = TestFunction::parse("0:1,1:-1/2").unwrap();
        assert_eq!(tf.to_string(), "0:1,1:-1/2");
        assert_eq!(tf.r_max(), 1);
        assert!(TestFunction::parse("x:1").is_err());
    }

    #[test]
    fn embedding_is_multiplicative() {
        let f = parse_field("Qp:p=5,prec=10").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
        let x = e.elem(f.from_int(2), f.from_int(1));
        let y = e.elem(f.from_int(-1), f.from_int(3));
        let lhs = embed(&e, &e.mul(&x, &y));
        let rhs = embed(&e, &x).mul(&f, &embed(&e, &y));
        for (u, v) in lhs.entries().iter().zip(rhs.entries()) {
            assert!(f.eq(u, v));
        }
        assert!(f.eq(&embed(&e, &x).det(&f), &e.norm(&x)));
        assert!(f.eq(&embed(&e, &x).trace(&f), &e.trace(&x)));
    }

    #[test]
    fn markers_of_the_two_classes_differ() {
        let f = parse_field("Qp:p=3,prec=10").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        // t = e/ē for e = 1 + 3τ
        let g = e.elem(f.one(), f.from_int(3));
        let t = e.mul(&g, &e.inv(&e.conj(&g)).unwrap());
        let (id, [m1, m2]) = stable_class_split(&e, &t).unwrap();
        assert_eq!(class_marker(&e, &m1).unwrap(), id.marker);
        assert_eq!(class_marker(&e, &m2).unwrap(), -id.marker);
        assert!(f.eq(&m1.trace(&f), &m2.trace(&f)));
    }
}
