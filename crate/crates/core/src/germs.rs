//! Behaviour of orbital integrals as `t → 1`: the `κ`-germ profile and, for
//! odd residue characteristic, the comparison with the plain unipotent
//! orbits through finite Fourier inversion on `F^× / (F^×)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{enumerate_residues, LocalElem, LocalField};
use crate::cyclo::CycloValue;
use crate::error::{Error, Result};
use crate::matrix::{Mat2, TestFunction};
use crate::orbital::{kappa_orbital, unipotent_kappa_orbital, KappaChar};
use crate::quad_ext::{ExtElem, ExtKind, QuadExt};
use crate::torus::torus_element;
use crate::transfer::{central_value, delta_t_squared, ser_display, transfer_factor, Constant};

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_opt_rat<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// `O^κ(t, f) = A f(1) + B O^κ(ν, f)` on one shell.
#[derive(Clone, Debug, Serialize)]
pub struct ShellFit {
    #[serde(serialize_with = "ser_opt_rat")]
    pub a: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rat")]
    pub b: Option<BigRational>,
    /// The fit reproduces every function of the check family.
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GermRow {
    pub n: u32,
    pub marker: i32,
    pub t: String,
    #[serde(serialize_with = "ser_rat")]
    pub o_stable: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub o_eps: BigRational,
    #[serde(serialize_with = "ser_display")]
    pub delta: CycloValue,
    #[serde(serialize_with = "ser_display")]
    pub delta_o_eps: CycloValue,
    /// `Δ_T(t) O^1(t, f)`.
    #[serde(serialize_with = "ser_display")]
    pub delta_t_o_stable: CycloValue,
    pub stable_fit: ShellFit,
    pub eps_fit: ShellFit,
    /// `B^ε · Δ(t)`: constant when the `κ`-germ is `Δ^{-1}` up to scale.
    #[serde(serialize_with = "ser_opt_display")]
    pub eps_germ_times_delta: Option<CycloValue>,
}

fn ser_opt_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GermProfile {
    pub ext: String,
    pub kind: ExtKind,
    pub f: String,
    pub rows: Vec<GermRow>,
    /// Depths in range with no element of `E^1`.
    pub missing: Vec<u32>,
    /// `f^E(1)`.
    #[serde(serialize_with = "ser_display")]
    pub central: CycloValue,
    /// Smallest `n_0` with `Δ O^ε = f^E(1)` on every row with `n ≥ n_0`.
    pub n0: Option<u32>,
    /// `O^1(t_n) = α + β q^n`, fitted on two shells.
    #[serde(serialize_with = "ser_opt_rat")]
    pub alpha: Option<BigRational>,
    #[serde(serialize_with = "ser_opt_rat")]
    pub beta: Option<BigRational>,
    pub affine_holds: bool,
}

fn q_pow(q: u32, n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(q).pow(n))
}

/// The family used to separate `f(1)` from `O^κ(ν, f)`.
fn fit_family() -> (Vec<TestFunction>, Vec<TestFunction>) {
    let basis = vec![TestFunction::unit(), TestFunction::cell(1)];
    let check = vec![
        TestFunction::cell(2),
        TestFunction::cell(3),
        TestFunction::parse("0:1,1:-2,2:1/3").unwrap(),
    ];
    (basis, check)
}

/// Solve `y_i = A x_i + B w_i` from the two basis functions; `None` when
/// the system is degenerate (both unipotent columns vanish).
fn fit_shell(e: &QuadExt, t: &ExtElem, kappa: &KappaChar) -> Result<ShellFit> {
    let f = e.base();
    let (basis, check) = fit_family();
    let data = |tf: &TestFunction| -> Result<(BigRational, BigRational, BigRational)> {
        let y = kappa_orbital(e, t, tf, kappa)?.value;
        Ok((tf.coeff(0), unipotent_kappa_orbital(f, kappa, tf)?, y))
    };
    let (x1, w1, y1) = data(&basis[0])?;
    let (x2, w2, y2) = data(&basis[1])?;
    let det = &x1 * &w2 - &x2 * &w1;
    if det.is_zero() {
        // O^κ(ν, ·) vanishes on the family: the germ is the constant term
        let all_zero = y1.is_zero() && y2.is_zero();
        let mut holds = all_zero;
        for tf in &check {
            holds &= data(tf)?.2.is_zero();
        }
        return Ok(ShellFit { a: None, b: None, holds });
    }
    let a = (&y1 * &w2 - &y2 * &w1) / &det;
    let b = (&x1 * &y2 - &x2 * &y1) / &det;
    let mut holds = true;
    for tf in &check {
        let (x, w, y) = data(tf)?;
        holds &= &a * x + &b * w == y;
    }
    Ok(ShellFit { a: Some(a), b: Some(b), holds })
}

/// Germ profile along `t_n` with `v(b_n) = n`, both markers when they occur.
pub fn germ_profile(e: &QuadExt, tf: &TestFunction, n_range: std::ops::RangeInclusive<u32>, c: &Constant) -> Result<GermProfile> {
    if !e.is_field() {
        return Err(Error::InvalidArgument("germ profiles need E a field".into()));
    }
    let q = e.q();
    let eps = KappaChar::Ext(e.clone());
    let central = central_value(e, 1, tf, c)?;
    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for n in n_range.clone() {
        let mut found = false;
        for marker in [1, -1] {
            let Some(t) = torus_element(e, n, Some(marker))? else { continue };
            found = true;
            let o_stable = kappa_orbital(e, &t, tf, &KappaChar::Trivial)?.value;
            let o_eps = kappa_orbital(e, &t, tf, &eps)?.value;
            let delta = transfer_factor(e, &t, c)?.value;
            let dt = delta_t(e, &t)?;
            let eps_fit = fit_shell(e, &t, &eps)?;
            let eps_germ_times_delta = eps_fit.b.as_ref().map(|b| delta.scale(b));
            rows.push(GermRow {
                n,
                marker,
                t: e.format(&t),
                delta_o_eps: delta.scale(&o_eps),
                delta_t_o_stable: dt.scale(&o_stable),
                stable_fit: fit_shell(e, &t, &KappaChar::Trivial)?,
                eps_fit,
                eps_germ_times_delta,
                o_stable,
                o_eps,
                delta,
            });
        }
        if !found {
            missing.push(n);
        }
    }
    let mut n0 = None;
    for r in rows.iter().rev() {
        if r.delta_o_eps != central {
            break;
        }
        n0 = Some(r.n);
    }
    // α + β q^n through the first two distinct depths
    let mut depths: Vec<(u32, BigRational)> = Vec::new();
    for r in &rows {
        if depths.last().map(|d| d.0) != Some(r.n) {
            depths.push((r.n, r.o_stable.clone()));
        }
    }
    let (mut alpha, mut beta, mut affine_holds) = (None, None, false);
    if depths.len() >= 2 {
        let (n1, y1) = &depths[0];
        let (n2, y2) = &depths[1];
        let b = (y2 - y1) / (q_pow(q, *n2) - q_pow(q, *n1));
        let a = y1 - &b * q_pow(q, *n1);
        affine_holds = rows.iter().all(|r| &a + &b * q_pow(q, r.n) == r.o_stable);
        alpha = Some(a);
        beta = Some(b);
    }
    Ok(GermProfile {
        ext: e.spec_string(),
        kind: e.kind(),
        f: tf.to_string(),
        rows,
        missing,
        central,
        n0,
        alpha,
        beta,
        affine_holds,
    })
}

/// `Δ_T(t) = |b|_F q^{-v(D)/2}`, the positive square root of `|tr^2 - 4|`.
fn delta_t(e: &QuadExt, t: &ExtElem) -> Result<CycloValue> {
    let f = e.base();
    let sq = delta_t_squared(e, t)?;
    let vd = f.val_checked(&f.sub(&f.square(&e.trace(t)), &f.from_int(4)))?;
    let r = CycloValue::sqrt_q_pow(f.p(), f.residue_field().f(), -vd);
    debug_assert!(r.mul(&r) == CycloValue::from_rational(sq));
    Ok(r)
}

// ---- Fourier inversion on F^×/(F^×)^2 ----

#[derive(Clone, Debug, Serialize)]
pub struct ShalikaRow {
    /// Square-class representative `η`.
    pub eta: String,
    /// `¼ Σ_κ κ(η) O^κ(ν, f)`.
    #[serde(serialize_with = "ser_rat")]
    pub reconstructed: BigRational,
    /// `∫_{η (F^×)^2} f([[1, n], [0, 1]]) dn` by shells.
    #[serde(serialize_with = "ser_rat")]
    pub direct: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShalikaReport {
    pub field: String,
    pub f: String,
    /// Characters by carrier: `1`, then `F(√δ)` for `δ = u, ϖ, uϖ`.
    pub kappas: Vec<String>,
    #[serde(serialize_with = "ser_vec_rat")]
    pub kappa_orbitals: Vec<BigRational>,
    /// `κ(η)` with rows indexed by `κ`, columns by `η`.
    pub table: Vec<Vec<i32>>,
    pub table_orthogonal: bool,
    pub rows: Vec<ShalikaRow>,
    /// `Σ_η O(η, f) = O^1(ν, f)`.
    pub additive: bool,
    pub pass: bool,
}

fn ser_vec_rat<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&r.to_string())?;
    }
    seq.end()
}

/// `∫_{n ∈ η (F^×)^2} f(u(n)) dn`, summed over shells `v(n) = v` for
/// `-r_max ≤ v < S` by leading digit (squareness decided by `is_square`),
/// plus the exact tail `v ≥ S`, where `u(n) ∈ K`.
pub fn unipotent_class_integral(f: &LocalField, eta: &LocalElem, tf: &TestFunction) -> Result<BigRational> {
    let q = f.q();
    let r = tf.r_max() as i64;
    let s_cut = 2i64;
    let digits: Vec<LocalElem> = enumerate_residues(f, 1)?.into_iter().filter(|d| !d.is_zero()).collect();
    let mut total = BigRational::zero();
    let qr = |k: i64| -> BigRational {
        let b = BigRational::from_integer(BigInt::from(q));
        if k >= 0 {
            b.pow(k as i32)
        } else {
            b.recip().pow((-k) as i32)
        }
    };
    for v in -r..s_cut {
        for d in &digits {
            let n = f.shift(d, v);
            if !f.is_square(&f.div(&n, eta)?)? {
                continue;
            }
            let m = Mat2::new(f.one(), n, f.zero(), f.one());
            // the class of n mod 1 + ϖO has measure q^{-v-1}
            total += tf.eval(f, &m)? * qr(-v - 1);
        }
    }
    // v ≥ S with v ≡ v(η) mod 2, half of each shell
    let ve = f.val_checked(eta)?;
    let v1 = if (s_cut - ve).rem_euclid(2) == 0 { s_cut } else { s_cut + 1 };
    let one = BigRational::one();
    let shell = (&one - qr(-1)) / BigRational::from_integer(2.into());
    let tail = shell * qr(-v1) / (&one - qr(-2));
    total += tf.coeff(0) * tail;
    Ok(total)
}

/// Reconstruct the four plain unipotent orbital integrals from the four
/// `κ`-orbital integrals (odd residue characteristic only).
pub fn shalika_compare(f: &LocalField, tf: &TestFunction) -> Result<ShalikaReport> {
    if f.p() == 2 {
        let why = if f.is_char2() {
            "F^x/(F^x)^2 is infinite in characteristic 2, so there is no finite set of unipotent classes to invert over"
        } else {
            "residue characteristic 2: the four-class inversion applies to odd residue characteristic only"
        };
        return Err(Error::Refused(why.into()));
    }
    let u = f.from_residue(f.residue_field().first_nonsquare().expect("odd q has non-squares"));
    let pi = f.uniformizer();
    let etas = vec![f.one(), u.clone(), pi.clone(), f.mul(&u, &pi)];
    let mut kappas = vec![KappaChar::Trivial];
    for delta in &etas[1..] {
        kappas.push(KappaChar::Ext(QuadExt::new(f, f.zero(), f.neg(delta))?));
    }
    let mut table = Vec::new();
    for k in &kappas {
        table.push(etas.iter().map(|x| k.eval(x)).collect::<Result<Vec<i32>>>()?);
    }
    let mut orthogonal = true;
    for i in 0..4 {
        for j in 0..4 {
            let s: i32 = (0..4).map(|c| table[i][c] * table[j][c]).sum();
            orthogonal &= s == if i == j { 4 } else { 0 };
        }
    }
    let kappa_orbitals = kappas
        .iter()
        .map(|k| unipotent_kappa_orbital(f, k, tf))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut sum = BigRational::zero();
    for (j, eta) in etas.iter().enumerate() {
        let mut acc = BigRational::zero();
        for (i, o) in kappa_orbitals.iter().enumerate() {
            acc += o * BigRational::from_integer(table[i][j].into());
        }
        let reconstructed = acc / BigRational::from_integer(4.into());
        let direct = unipotent_class_integral(f, eta, tf)?;
        sum += &direct;
        rows.push(ShalikaRow { eta: crate::arith::format_elem(f, eta), reconstructed, direct });
    }
    let additive = sum == kappa_orbitals[0];
    let pass = orthogonal && additive && rows.iter().all(|r| r.reconstructed == r.direct);
    Ok(ShalikaReport {
        field: crate::arith::field_spec(f),
        f: tf.to_string(),
        kappas: kappas.iter().map(|k| k.name()).collect(),
        kappa_orbitals,
        table,
        table_orthogonal: orthogonal,
        rows,
        additive,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;

    #[test]
    fn unramified_profile_q3() {
        let f = parse_field("Qp:p=3,prec=16").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let p = germ_profile(&e, &TestFunction::unit(), 0..=4, &Constant::One).unwrap();
        assert_eq!(p.n0, Some(0));
        assert!(p.affine_holds);
        // 1 + (q+1)(q^n - 1)/(q - 1) = -1 + 2·3^n
        assert_eq!(p.alpha, Some(BigRational::from_integer((-1).into())));
        assert_eq!(p.beta, Some(BigRational::from_integer(2.into())));
        for r in &p.rows {
            assert!(r.stable_fit.holds && r.eps_fit.holds);
            assert_eq!(r.eps_fit.a, Some(BigRational::zero()));
            assert_eq!(r.eps_germ_times_delta, Some(CycloValue::from_int(2)));
        }
    }

    #[test]
    fn shalika_q3() {
        let f = parse_field("Qp:p=3,prec=12").unwrap();
        for tf in [TestFunction::unit(), TestFunction::cell(1), TestFunction::parse("0:1,2:5").unwrap()] {
            let rep = shalika_compare(&f, &tf).unwrap();
            assert!(rep.pass, "{tf}: {:?}", rep.rows);
        }
        let f2 = parse_field("Fq:p=2,f=1,prec=12").unwrap();
        assert!(matches!(shalika_compare(&f2, &TestFunction::unit()), Err(Error::Refused(_))));
    }
}
