//! Orbital integrals of bi-`K`-invariant functions at regular elliptic
//! `t = a + bτ ∈ E^1`, as finite sums over the cells
//! `M_m = α(ϖ^{-m})^{-1} t α(ϖ^{-m})`, and unipotent `κ`-orbital integrals.
//!
//! Measures: `vol(K) = 1`, `d^×μ` of mass 1 on `O^×`, `dn` of mass 1 on `O`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{enumerate_residues, format_elem, LocalElem, LocalField};
use crate::error::{Error, Result};
use crate::matrix::{cell_matrix, Mat2, TestFunction};
use crate::quad_ext::{ExtElem, ExtKind, QuadExt};

/// A quadratic character of `F^×`: trivial, or `ε_{E'/F}` for a carrier `E'`.
#[derive(Clone, Debug)]
pub enum KappaChar {
    Trivial,
    Ext(QuadExt),
}

impl KappaChar {
    pub fn eval(&self, x: &LocalElem) -> Result<i32> {
        match self {
            KappaChar::Trivial => Ok(1),
            KappaChar::Ext(e) => e.epsilon(x),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KappaChar::Trivial => "1".into(),
            KappaChar::Ext(e) => format!("eps[{}]", e.spec_string()),
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_pow(q: u32, m: u32) -> BigRational {
    BigRational::from_integer(num_bigint::BigInt::from(q).pow(m))
}

/// `C(ϖ^{-m})`: the measure of the `m`-th cell.
pub fn measure_constant(e: &QuadExt, m: u32) -> Result<BigRational> {
    let q = e.q();
    match e.kind() {
        ExtKind::Split => Err(Error::InvalidArgument("split tori use the parabolic route".into())),
        ExtKind::Unramified if m == 0 => Ok(BigRational::one()),
        ExtKind::Unramified => Ok((BigRational::one() + BigRational::new(1.into(), q.into())) * q_pow(q, m)),
        ExtKind::Ramified => Ok(rat(2) * q_pow(q, m)),
    }
}

/// One term `C · sign · f(M_m)` of the cell sum.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitalCell {
    pub m: u32,
    #[serde(rename = "C", serialize_with = "ser_rat")]
    pub c: BigRational,
    pub sign: i32,
    #[serde(serialize_with = "ser_rat")]
    pub f: BigRational,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Which pairing of `κ` with the torus was used.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum OrbitalRoute {
    CellSum,
    /// `κ` is not `ε_{E/F}` and not trivial: `s ∈ E^×` with `κ(N s) = -1`.
    Vanishing { witness: String, norm: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitalReport {
    #[serde(serialize_with = "ser_rat")]
    pub value: BigRational,
    pub cells: Vec<OrbitalCell>,
    pub kappa: String,
    pub route: OrbitalRoute,
    pub normalization: &'static str,
}

/// `κ`-sign of the `m`-th cell: `1` for trivial `κ`, `(-1)^m` for the
/// unramified `ε`, `0` for a ramified `ε` (the non-norm unit conjugates one
/// rational class onto the other inside `GL(2, O)`).
fn cell_sign(e: &QuadExt, kappa_is_eps: bool, m: u32) -> i32 {
    if !kappa_is_eps {
        return 1;
    }
    match e.kind() {
        ExtKind::Unramified => {
            if m % 2 == 0 {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

/// Search `s = x + yτ` (small digits) with `κ(N s) = -1`.
fn vanishing_witness(e: &QuadExt, kappa: &KappaChar) -> Result<Option<ExtElem>> {
    let f = e.base();
    let mut cands = vec![e.tau(), e.elem(f.uniformizer(), f.one())];
    for level in 1..=4u32 {
        let rs = enumerate_residues(f, level)?;
        if (rs.len() as u64).pow(2) > 200_000 {
            break;
        }
        for x in &rs {
            for y in &rs {
                cands.push(e.elem(x.clone(), y.clone()));
            }
        }
        for s in cands.drain(..) {
            let n = e.norm(&s);
            if n.is_zero() {
                continue;
            }
            if kappa.eval(&n)? == -1 {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Resolve `κ` against `E`: `Some(true)` for `ε_{E/F}`, `Some(false)` for
/// the trivial character, `None` (with witness) when `κ` kills the integral.
fn classify_kappa(e: &QuadExt, kappa: &KappaChar) -> Result<(Option<bool>, Option<ExtElem>)> {
    match kappa {
        KappaChar::Trivial => Ok((Some(false), None)),
        KappaChar::Ext(c) if !c.is_field() => Ok((Some(false), None)),
        KappaChar::Ext(c) if c.base().eq(c.tr(), e.tr()) && c.base().eq(c.det(), e.det()) => Ok((Some(true), None)),
        KappaChar::Ext(_) => match vanishing_witness(e, kappa)? {
            Some(s) => Ok((None, Some(s))),
            None => Ok((Some(true), None)),
        },
    }
}

/// `O^κ(t, f) = Σ_{m=0}^{v(b) + r_max} C(ϖ^{-m}) κ_m f(M_m)`.
pub fn kappa_orbital(e: &QuadExt, t: &ExtElem, tf: &TestFunction, kappa: &KappaChar) -> Result<OrbitalReport> {
    let f = e.base();
    if !e.is_field() {
        return Err(Error::InvalidArgument("elliptic orbital integrals need E a field".into()));
    }
    let vb = match t.b.val() {
        Some(v) => v,
        None if t.b.is_exact() => return Err(Error::InvalidArgument("t is central".into())),
        None => return Err(Error::precision("b indistinguishable from 0")),
    };
    if !f.eq(&e.norm(t), &f.one()) {
        return Err(Error::InvalidArgument("t must have norm 1".into()));
    }
    let (resolved, witness) = classify_kappa(e, kappa)?;
    let Some(is_eps) = resolved else {
        let s = witness.expect("witness accompanies vanishing");
        let n = e.norm(&s);
        return Ok(OrbitalReport {
            value: BigRational::zero(),
            cells: Vec::new(),
            kappa: kappa.name(),
            route: OrbitalRoute::Vanishing { witness: e.format(&s), norm: format_elem(f, &n) },
            normalization: "dn-mass-one",
        });
    };
    let top = vb.max(0) as u32 + tf.r_max();
    let mut cells = Vec::new();
    let mut value = BigRational::zero();
    for m in 0..=top {
        let c = measure_constant(e, m)?;
        let sign = cell_sign(e, is_eps, m);
        let fv = tf.eval(f, &cell_matrix(e, t, m as i64))?;
        value += &c * rat(sign as i64) * &fv;
        cells.push(OrbitalCell { m, c, sign, f: fv });
    }
    // beyond `top` every cell has r > r_max
    let past = cell_matrix(e, t, top as i64 + 1);
    debug_assert!(TestFunction::cell_of(f, &past)? > tf.r_max());
    Ok(OrbitalReport { value, cells, kappa: kappa.name(), route: OrbitalRoute::CellSum, normalization: "dn-mass-one" })
}

/// Stable orbital integral `O^1(t, f)`.
pub fn stable_orbital(e: &QuadExt, t: &ExtElem, tf: &TestFunction) -> Result<BigRational> {
    Ok(kappa_orbital(e, t, tf, &KappaChar::Trivial)?.value)
}

/// `O^ε(t, f)` for `ε = ε_{E/F}`.
pub fn eps_orbital(e: &QuadExt, t: &ExtElem, tf: &TestFunction) -> Result<BigRational> {
    Ok(kappa_orbital(e, t, tf, &KappaChar::Ext(e.clone()))?.value)
}

/// Plain orbital integrals `(O(t, f), O(t', f))` over the two rational
/// classes: the standard embedding of `t` and its conjugate by
/// `diag(s, 1)`, `ε(s) = -1`.
pub fn orbital_pair(e: &QuadExt, t: &ExtElem, tf: &TestFunction) -> Result<(BigRational, BigRational)> {
    let st = stable_orbital(e, t, tf)?;
    let ep = eps_orbital(e, t, tf)?;
    let half = BigRational::new(1.into(), 2.into());
    Ok((&half * (&st + &ep), &half * (&st - &ep)))
}

/// `O(M, f)` for a matrix `M` stably conjugate to the embedding of `t`;
/// the rational class is read off the marker `ε(c_M) ε(b)`.
pub fn orbital_of_matrix(e: &QuadExt, t: &ExtElem, m: &Mat2, tf: &TestFunction) -> Result<BigRational> {
    let f = e.base();
    if !f.eq(&m.trace(f), &e.trace(t)) || !f.eq(&m.det(f), &f.one()) {
        return Err(Error::InvalidArgument("matrix is not stably conjugate to t".into()));
    }
    let same = e.epsilon(&m.c)? == e.epsilon(&t.b)?;
    let (o, o2) = orbital_pair(e, t, tf)?;
    Ok(if same { o } else { o2 })
}

/// `∫_{v(n) = -r} κ(n) dn` summed into the cells of `f`:
/// `O^κ(zν, f)` for `z = ±1`, `ν = [[1, 1], [0, 1]]`.
pub fn unipotent_kappa_orbital(f: &LocalField, kappa: &KappaChar, tf: &TestFunction) -> Result<BigRational> {
    let q = f.q();
    let one = BigRational::one();
    let qinv = BigRational::new(1.into(), q.into());
    let kind = match kappa {
        KappaChar::Trivial => ExtKind::Split,
        KappaChar::Ext(e) => e.kind(),
    };
    let mut total = BigRational::zero();
    for (r, c) in tf.cells() {
        let ir = match (kind, r) {
            (ExtKind::Split, 0) => one.clone(),
            (ExtKind::Split, r) => (&one - &qinv) * q_pow(q, r),
            (ExtKind::Unramified, 0) => BigRational::new((q as i64 - 1).into(), (q as i64 + 1).into()),
            (ExtKind::Unramified, r) => {
                let s = if r % 2 == 0 { one.clone() } else { -one.clone() };
                s * (&one - &qinv) * q_pow(q, r)
            }
            // a ramified ε is nontrivial on O^× and integrates to 0 on each shell
            (ExtKind::Ramified, _) => BigRational::zero(),
        };
        total += c * ir;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;
    use crate::torus::torus_element;

    #[test]
    fn measure_constants() {
        let f = parse_field("Qp:p=3,prec=10").unwrap();
        let un = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let ra = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
        assert_eq!(measure_constant(&un, 2).unwrap(), rat(12));
        assert_eq!(measure_constant(&un, 0).unwrap(), rat(1));
        assert_eq!(measure_constant(&ra, 1).unwrap(), rat(6));
        assert_eq!(measure_constant(&ra, 0).unwrap(), rat(2));
    }

    #[test]
    fn unramified_depth_one() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let t = torus_element(&e, 1, None).unwrap().unwrap();
        let one = TestFunction::unit();
        assert_eq!(stable_orbital(&e, &t, &one).unwrap(), rat(5));
        assert_eq!(eps_orbital(&e, &t, &one).unwrap(), rat(-3));
    }

    #[test]
    fn foreign_kappa_vanishes() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let other = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
        let t = torus_element(&e, 1, None).unwrap().unwrap();
        let rep = kappa_orbital(&e, &t, &TestFunction::unit(), &KappaChar::Ext(other)).unwrap();
        assert!(rep.value.is_zero());
        assert!(matches!(rep.route, OrbitalRoute::Vanishing { .. }));
    }

    #[test]
    fn unipotent_values() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let un = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let one = TestFunction::unit();
        assert_eq!(unipotent_kappa_orbital(&f, &KappaChar::Trivial, &one).unwrap(), rat(1));
        assert_eq!(
            unipotent_kappa_orbital(&f, &KappaChar::Ext(un), &one).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
    }
}
