//! Characters of `E^1` at finite level, the endoscopic character
//! combination `Ξ_θ`, and the identities it satisfies.

mod group;
mod snf;
mod weyl;

pub use group::{TorusChar, TorusGroup};
pub use snf::smith_normal_form;
pub use weyl::{weyl_spectral_check, GeomSeq, WeylReport, WeylStatus};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclo::CycloValue;
use crate::error::{Error, Result};
use crate::quad_ext::{ExtElem, QuadExt};
use crate::transfer::{ser_display, transfer_factor, Constant};

/// `1 / |b(τ - τ̄)| = q^{v(b) + v(D)/2}`.
fn inv_abs_b_disc(e: &QuadExt, t: &ExtElem) -> Result<CycloValue> {
    let f = e.base();
    let vb = match t.b.val() {
        Some(v) => v,
        None => return Err(Error::InvalidArgument("Ξ is evaluated at regular t only".into())),
    };
    Ok(CycloValue::sqrt_q_pow(f.p(), f.residue_field().f(), 2 * vb + e.disc_val()))
}

/// `Ξ_θ(t) = λ ε(-1) ε(b) (θ(t) + θ(t)^{-1}) / |b(τ - τ̄)|`.
pub fn xi_value(e: &QuadExt, theta: &TorusChar, t: &ExtElem) -> Result<CycloValue> {
    let th = theta.eval(t)?;
    let sum = th.add(&th.conj());
    let sign = (e.epsilon_minus_one() * e.epsilon(&t.b)?) as i64;
    Ok(e.lambda().value.mul(&CycloValue::from_int(sign)).mul(&sum).mul(&inv_abs_b_disc(e, t)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct IdenRow {
    pub t: String,
    #[serde(serialize_with = "ser_display")]
    pub lhs: CycloValue,
    #[serde(serialize_with = "ser_display")]
    pub rhs: CycloValue,
    pub pass: bool,
}

/// `Δ(t, t) Ξ_θ(t)` against `ε(-1)(θ(t) + θ(t̄))`, with `θ(t̄)` read off
/// the class of the conjugate.
pub fn iden_check(e: &QuadExt, theta: &TorusChar, t: &ExtElem) -> Result<IdenRow> {
    if t.b.is_zero() {
        return Err(Error::InvalidArgument("t = ±1 is not regular".into()));
    }
    let delta = transfer_factor(e, t, &Constant::LambdaInverse)?.value;
    let lhs = delta.mul(&xi_value(e, theta, t)?);
    let tbar = e.conj(t);
    let rhs = CycloValue::from_int(e.epsilon_minus_one() as i64).mul(&theta.eval(t)?.add(&theta.eval(&tbar)?));
    Ok(IdenRow { t: e.format(t), pass: lhs == rhs, lhs, rhs })
}

/// `∫_{E^1} |θ(t) + θ(t^{-1})|^2 dt` as an average over the level quotient.
pub fn orthogonality_integral(theta: &TorusChar) -> Result<BigRational> {
    let g = theta.group();
    let e = g.ext();
    let mut acc = CycloValue::zero();
    for (_, t) in g.elements() {
        let s = theta.eval(t)?.add(&theta.eval(&e.inv(t)?)?);
        acc = acc.add(&s.mul(&s.conj()));
    }
    let avg = acc.scale(&BigRational::new(BigInt::one(), BigInt::from(g.order())));
    avg.as_rational().ok_or_else(|| Error::InvalidArgument("average is not rational".into()))
}

/// Expected value of [`orthogonality_integral`]: `2` if `θ^2 ≠ 1`, else `4`.
pub fn orthogonality_expected(theta: &TorusChar) -> BigRational {
    let n = if theta.square().is_trivial() { 4 } else { 2 };
    BigRational::from_integer(n.into())
}

/// Row and column orthogonality of the character table of `Q_k`.
pub fn character_table_check(g: &std::sync::Arc<TorusGroup>) -> Result<bool> {
    let chars = g.characters();
    if chars.len() as u64 != g.order() {
        return Ok(false);
    }
    let n = CycloValue::from_int(g.order() as i64);
    for (k, t) in g.elements() {
        let mut col = CycloValue::zero();
        let mut sq = CycloValue::zero();
        for th in &chars {
            let v = th.eval(t)?;
            sq = sq.add(&v.mul(&v.conj()));
            col = col.add(&v);
        }
        if sq != n {
            return Ok(false);
        }
        let want = if k == g.identity() { n.clone() } else { CycloValue::zero() };
        if col != want {
            return Ok(false);
        }
    }
    for th in &chars {
        let mut row = CycloValue::zero();
        for (_, t) in g.elements() {
            row = row.add(&th.eval(t)?);
        }
        let want = if th.is_trivial() { n.clone() } else { CycloValue::zero() };
        if row != want {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- intertwining scalar ----

/// `Z(s)/Z(1+s) = (1 - x/q)/(1 - x)` at `x = q^{-s}`.
pub fn intertwining_scalar(q: u32, x: &BigRational) -> Result<BigRational> {
    let one = BigRational::one();
    if *x == one {
        return Err(Error::InvalidArgument("pole at q^{-s} = 1".into()));
    }
    let qr = BigRational::from_integer(q.into());
    Ok((&one - x / qr) / (&one - x))
}

/// Integer `s`: `x = q^{-s}`.
pub fn intertwining_at(q: u32, s: i64) -> Result<BigRational> {
    let b = BigRational::from_integer(BigInt::from(q));
    let x = if s >= 0 { b.recip().pow(s as i32) } else { b.pow((-s) as i32) };
    intertwining_scalar(q, &x)
}

/// Coefficients of `(1 - x/q) Σ_{n ≥ 0} x^n` through `x^order`.
pub fn intertwining_series(q: u32, order: usize) -> Vec<BigRational> {
    let num = [BigRational::one(), -BigRational::new(BigInt::one(), BigInt::from(q))];
    let geo = vec![BigRational::one(); order + 1];
    let mut out = vec![BigRational::zero(); order + 1];
    for (i, a) in num.iter().enumerate() {
        for (j, b) in geo.iter().enumerate() {
            if i + j <= order {
                out[i + j] += a * b;
            }
        }
    }
    out
}

/// The series equals `1 + (1 - 1/q) Σ_{n ≥ 1} x^n` through `x^order`.
pub fn intertwining_series_identity(q: u32, order: usize) -> bool {
    let c = BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(q));
    intertwining_series(q, order)
        .iter()
        .enumerate()
        .all(|(n, a)| *a == if n == 0 { BigRational::one() } else { c.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;
    use crate::quad_ext::ExtKind;

    #[test]
    fn group_structure() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let g = TorusGroup::new(&e, 1).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.invariants, vec![4]);
        assert!(character_table_check(&g).unwrap());
        let g2 = TorusGroup::new(&e, 2).unwrap();
        assert_eq!(g2.order(), 12);
        assert!(character_table_check(&g2).unwrap());
    }

    #[test]
    fn orthogonality_branches() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let g = TorusGroup::new(&e, 1).unwrap();
        for th in g.characters() {
            assert_eq!(orthogonality_integral(&th).unwrap(), orthogonality_expected(&th));
        }
    }

    #[test]
    fn intertwining() {
        assert_eq!(intertwining_at(3, 1).unwrap(), BigRational::new(4.into(), 3.into()));
        assert!(intertwining_at(3, 0).is_err());
        assert!(intertwining_series_identity(3, 20));
        assert!(intertwining_series_identity(2, 20));
    }
}
