//! Transfer factors and the transfer `f ↦ f^E` to the endoscopic torus.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{enumerate_residues, format_elem, LocalElem, LocalField};
use crate::cyclo::CycloValue;
use crate::error::{Error, Result};
use crate::matrix::{stable_class_split, TestFunction};
use crate::oracle::tree_orbital;
use crate::orbital::{kappa_orbital, unipotent_kappa_orbital, KappaChar, OrbitalCell};
use crate::quad_ext::{ExtElem, ExtKind, QuadExt};
use crate::torus::{quotient_reps, torus_element};

/// The constant `c` in front of the transfer factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constant {
    /// `λ(E/F, ψ)^{-1}`.
    LambdaInverse,
    /// `c = 1`, the setting of the fundamental lemma.
    One,
    Custom(CycloValue),
}

impl Constant {
    pub fn value(&self, e: &QuadExt) -> CycloValue {
        match self {
            // λ is a root of unity
            Constant::LambdaInverse => e.lambda().value.conj(),
            Constant::One => CycloValue::one(),
            Constant::Custom(c) => c.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Constant::LambdaInverse => "lambda^-1".into(),
            Constant::One => "1".into(),
            Constant::Custom(c) => c.to_string(),
        }
    }
}

fn q_rat(q: u32, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        b.pow(e as i32)
    } else {
        b.recip().pow((-e) as i32)
    }
}

/// `Δ(t, t)` with both absolute-value normalizations.
#[derive(Clone, Debug, Serialize)]
pub struct TransferFactor {
    #[serde(serialize_with = "ser_display")]
    pub c: CycloValue,
    pub eps_b: i32,
    /// `c ε(b) |b(τ - τ̄)|` with `|x| = |N x|_F^{1/2}`.
    #[serde(serialize_with = "ser_display")]
    pub value: CycloValue,
    /// The same with `|x|_E = |N x|_F`.
    #[serde(serialize_with = "ser_display")]
    pub value_e_normalized: CycloValue,
    pub normalization: &'static str,
}

pub(crate) fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn regular_b(t: &ExtElem) -> Result<i64> {
    match t.b.val() {
        Some(v) => Ok(v),
        None if t.b.is_exact() => Err(Error::InvalidArgument("t is central".into())),
        None => Err(Error::precision("b indistinguishable from 0")),
    }
}

/// `Δ(t, t) = c ε(b) |b|_F q^{-v(𝔱^2 - 4𝔡)/2}`.
pub fn transfer_factor(e: &QuadExt, t: &ExtElem, c: &Constant) -> Result<TransferFactor> {
    if !e.is_field() {
        return Err(Error::InvalidArgument("transfer factors here are for elliptic tori".into()));
    }
    let f = e.base();
    let vb = regular_b(t)?;
    let cv = c.value(e);
    let eps_b = e.epsilon(&t.b)?;
    let (p, deg) = (f.p(), f.residue_field().f());
    let abs_f = CycloValue::from_rational(q_rat(f.q(), -vb)).mul(&CycloValue::sqrt_q_pow(p, deg, -e.disc_val()));
    let abs_e = CycloValue::from_rational(q_rat(f.q(), -2 * vb - e.disc_val()));
    let sign = CycloValue::from_int(eps_b as i64);
    Ok(TransferFactor {
        value: cv.mul(&sign).mul(&abs_f),
        value_e_normalized: cv.mul(&sign).mul(&abs_e),
        c: cv,
        eps_b,
        normalization: "F",
    })
}

/// `c ε((γ - γ̄)/(τ - τ̄)) |γ - γ̄|`, evaluated through `E`-arithmetic and
/// the norm of `γ - γ̄`.
pub fn transfer_factor_intrinsic(e: &QuadExt, t: &ExtElem, c: &Constant) -> Result<CycloValue> {
    let f = e.base();
    regular_b(t)?;
    let g = e.sub(t, &e.conj(t));
    let tau = e.tau();
    let d = e.sub(&tau, &e.conj(&tau));
    let ratio = e.mul(&g, &e.inv(&d)?);
    if ratio.b.val().is_some() {
        return Err(Error::precision("(γ - γ̄)/(τ - τ̄) did not land in F"));
    }
    let sign = e.epsilon(&ratio.a)?;
    let vn = f.val_checked(&e.norm(&g))?;
    let abs = CycloValue::sqrt_q_pow(f.p(), f.residue_field().f(), -vn);
    Ok(c.value(e).mul(&CycloValue::from_int(sign as i64)).mul(&abs))
}

/// `Δ_T(t)^2 = |D(t)|_F = |tr(t)^2 - 4|_F`.
pub fn delta_t_squared(e: &QuadExt, t: &ExtElem) -> Result<BigRational> {
    let f = e.base();
    let tr = e.trace(t);
    let d = f.sub(&f.square(&tr), &f.from_int(4));
    Ok(q_rat(f.q(), -f.val_checked(&d)?))
}

/// Factor relating the central value of `f^E` to the unipotent
/// `κ`-orbital integral: `(q+1)/(q-1)` for unramified `E`, `1` otherwise.
pub fn central_factor(e: &QuadExt) -> BigRational {
    let q = e.q() as i64;
    match e.kind() {
        ExtKind::Unramified => BigRational::new((q + 1).into(), (q - 1).into()),
        _ => BigRational::one(),
    }
}

/// `z = ±1` for a central `t`, read from `a`.
pub fn central_sign(e: &QuadExt, t: &ExtElem) -> Option<i32> {
    let f = e.base();
    if !t.b.is_zero() {
        return None;
    }
    if f.eq(&t.a, &f.one()) {
        Some(1)
    } else if f.eq(&t.a, &f.from_int(-1)) {
        Some(-1)
    } else {
        None
    }
}

/// `f^E(t)`: `Δ(t, t) O^ε(t, f)` at regular `t`, and
/// `c · central_factor · O^κ(zν, f)` at `t = z`.
pub fn transfer_value(e: &QuadExt, t: &ExtElem, tf: &TestFunction, c: &Constant) -> Result<CycloValue> {
    let f = e.base();
    if !f.eq(&e.norm(t), &f.one()) {
        return Err(Error::InvalidArgument("t must lie in E^1".into()));
    }
    if let Some(z) = central_sign(e, t) {
        return central_value(e, z, tf, c);
    }
    let delta = transfer_factor(e, t, c)?;
    let o = kappa_orbital(e, t, tf, &KappaChar::Ext(e.clone()))?;
    Ok(delta.value.scale(&o.value))
}

/// `f^E(z)` for `z = ±1`; the unipotent integrals do not depend on `z`.
pub fn central_value(e: &QuadExt, _z: i32, tf: &TestFunction, c: &Constant) -> Result<CycloValue> {
    let u = unipotent_kappa_orbital(e.base(), &KappaChar::Ext(e.clone()), tf)?;
    Ok(c.value(e).scale(&(central_factor(e) * u)))
}

#[derive(Clone, Debug, Serialize)]
pub struct TableEntry {
    pub key: String,
    pub t: String,
    /// `v(b)`, absent at the centre.
    pub depth: Option<i64>,
    #[serde(serialize_with = "ser_display")]
    pub value: CycloValue,
    pub approx: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferTable {
    pub ext: String,
    pub kind: ExtKind,
    pub f: String,
    pub c: String,
    pub level: u32,
    pub table: Vec<TableEntry>,
    /// Smallest `k` such that `f^E` is constant on every coset of
    /// `E^1 ∩ (1 + ϖ^k O_E)`.
    pub smooth_level: u32,
    /// `f^E(t^{-1}) = f^E(t)` on every tabulated `t`.
    pub inverse_symmetric: bool,
}

fn key_string(k: &[u32]) -> String {
    k.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".")
}

/// `f^E` along `v(b) = n` (`None` when no torus element has that depth),
/// together with the central value.
pub fn depth_profile(
    e: &QuadExt,
    tf: &TestFunction,
    c: &Constant,
    n_max: u32,
) -> Result<(Vec<Option<CycloValue>>, CycloValue)> {
    let mut prof = Vec::new();
    for n in 0..=n_max {
        let mut val: Option<CycloValue> = None;
        for s in [1, -1] {
            if let Some(t) = torus_element(e, n, Some(s))? {
                let v = transfer_value(e, &t, tf, c)?;
                if let Some(w) = &val {
                    if *w != v {
                        return Err(Error::InvalidArgument(format!(
                            "f^E is not a function of v(b) at depth {n}"
                        )));
                    }
                }
                val = Some(v);
            }
        }
        prof.push(val);
    }
    Ok((prof, central_value(e, 1, tf, c)?))
}

/// Smallest `k` with `f^E(t) = f^E(1)` whenever `v(b) ≥ k`. Values of `f^E`
/// depend on `t` only through `v(b)` and `ε(b)`, and the cells of `M_m` are
/// those of the centre once `v(b) > r_max`.
pub fn smooth_level(e: &QuadExt, tf: &TestFunction, c: &Constant) -> Result<u32> {
    let n_max = tf.r_max() + 3;
    let (prof, centre) = depth_profile(e, tf, c, n_max)?;
    let mut k = n_max + 1;
    for n in (0..=n_max).rev() {
        match &prof[n as usize] {
            Some(v) if *v != centre => break,
            _ => k = n,
        }
    }
    Ok(k)
}

/// Tabulate `f^E` on representatives of `E^1` modulo level-`k` units.
pub fn transfer_table(e: &QuadExt, tf: &TestFunction, level: u32, c: &Constant) -> Result<TransferTable> {
    let reps = quotient_reps(e, level)?;
    let mut table = Vec::new();
    let mut symmetric = true;
    for (key, t) in &reps {
        let value = transfer_value(e, t, tf, c)?;
        let tinv = e.inv(t)?;
        if transfer_value(e, &tinv, tf, c)? != value {
            symmetric = false;
        }
        table.push(TableEntry {
            key: key_string(key),
            t: e.format(t),
            depth: t.b.val(),
            approx: value.to_complex(),
            value,
        });
    }
    Ok(TransferTable {
        ext: e.spec_string(),
        kind: e.kind(),
        f: tf.to_string(),
        c: c.name(),
        level,
        table,
        smooth_level: smooth_level(e, tf, c)?,
        inverse_symmetric: symmetric,
    })
}

// ---- split tori ----

/// `∫_F ∫_K f(k^{-1} [[a, n], [0, a^{-1}]] k) dk dn` with `vol(O) = 1`.
/// The matrix lies in cell `max(|v(a)|, -v(n))`.
pub fn split_transfer(f: &LocalField, a: &LocalElem, tf: &TestFunction) -> Result<BigRational> {
    let w = f.val_checked(a)?.unsigned_abs() as u32;
    let q = f.q();
    let mut total = BigRational::zero();
    for (r, c) in tf.cells() {
        let s = if r == w {
            q_rat(q, w as i64)
        } else if r > w {
            q_rat(q, r as i64) - q_rat(q, r as i64 - 1)
        } else {
            BigRational::zero()
        };
        total += c * s;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitEntry {
    pub a: String,
    pub val: i64,
    #[serde(serialize_with = "ser_display")]
    pub value: BigRational,
}

/// `f^E(diag(a, a^{-1}))` for `a = ϖ^v u`, `|v| ≤ level`, `u` over units
/// mod `ϖ^level`.
pub fn split_table(f: &LocalField, tf: &TestFunction, level: u32) -> Result<Vec<SplitEntry>> {
    let units: Vec<LocalElem> = enumerate_residues(f, level)?.into_iter().filter(|u| f.is_unit(u)).collect();
    let mut out = Vec::new();
    for v in -(level as i64)..=level as i64 {
        for u in &units {
            let a = f.shift(u, v);
            out.push(SplitEntry { a: format_elem(f, &a), val: v, value: split_transfer(f, &a, tf)? });
        }
    }
    Ok(out)
}

// ---- fundamental lemma ----

#[derive(Clone, Debug, Serialize)]
pub struct FlRow {
    pub n: u32,
    /// `None` when no element of `E^1` has `v(b) = n`.
    pub t: Option<String>,
    pub cells: Vec<OrbitalCell>,
    #[serde(serialize_with = "ser_opt")]
    pub o_eps: Option<BigRational>,
    #[serde(serialize_with = "ser_opt")]
    pub delta: Option<CycloValue>,
    #[serde(serialize_with = "ser_opt")]
    pub value: Option<CycloValue>,
    /// `O(t) - O(t')` counted on the tree.
    #[serde(serialize_with = "ser_opt")]
    pub oracle_o_eps: Option<BigRational>,
    pub pass: bool,
}

fn ser_opt<T: std::fmt::Display, S: serde::Serializer>(
    v: &Option<T>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlStatus {
    Checked,
    /// The extension is ramified; the statement does not apply.
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlReport {
    pub ext: String,
    pub kind: ExtKind,
    pub status: FlStatus,
    pub rows: Vec<FlRow>,
    /// `(z, f^E(z))` for the central elements.
    pub central: Vec<(i32, String)>,
    /// Split case: the level-3 table agrees with `1_{O^×}`.
    pub split_indicator: Option<bool>,
    pub fl_pass: bool,
}

/// Check that `f^E = 1` on `O_E^1` for `f = 1_K`, `c = 1`, through depth
/// `n_max`; optionally recount `O^ε` on the tree.
pub fn fl_check(e: &QuadExt, n_max: u32, with_oracle: bool) -> Result<FlReport> {
    let f = e.base();
    let one = TestFunction::unit();
    let c = Constant::One;
    let mut report = FlReport {
        ext: e.spec_string(),
        kind: e.kind(),
        status: FlStatus::Checked,
        rows: Vec::new(),
        central: Vec::new(),
        split_indicator: None,
        fl_pass: false,
    };
    match e.kind() {
        ExtKind::Ramified => {
            report.status = FlStatus::NotApplicable;
            return Ok(report);
        }
        ExtKind::Split => {
            let tab = split_table(f, &one, 3)?;
            let ok = tab.iter().all(|r| r.value == if r.val == 0 { BigRational::one() } else { BigRational::zero() });
            report.split_indicator = Some(ok);
            report.fl_pass = ok;
            return Ok(report);
        }
        ExtKind::Unramified => {}
    }
    let mut pass = true;
    for n in 0..=n_max {
        let Some(t) = torus_element(e, n, None)? else {
            report.rows.push(FlRow {
                n,
                t: None,
                cells: Vec::new(),
                o_eps: None,
                delta: None,
                value: None,
                oracle_o_eps: None,
                pass: true,
            });
            continue;
        };
        let rep = kappa_orbital(e, &t, &one, &KappaChar::Ext(e.clone()))?;
        let delta = transfer_factor(e, &t, &c)?.value;
        let value = delta.scale(&rep.value);
        let mut ok = value.is_one();
        let oracle = if with_oracle {
            let (_, [m1, m2]) = stable_class_split(e, &t)?;
            let radius = n + 3;
            let a = tree_orbital(f, &m1, &one, radius)?.even;
            let b = tree_orbital(f, &m2, &one, radius)?.even;
            let d = a - b;
            ok &= d == rep.value;
            Some(d)
        } else {
            None
        };
        pass &= ok;
        report.rows.push(FlRow {
            n,
            t: Some(e.format(&t)),
            cells: rep.cells,
            o_eps: Some(rep.value),
            delta: Some(delta),
            value: Some(value),
            oracle_o_eps: oracle,
            pass: ok,
        });
    }
    let zs: &[i32] = if f.characteristic() == 2 { &[1] } else { &[1, -1] };
    for &z in zs {
        let v = central_value(e, z, &one, &c)?;
        pass &= v.is_one();
        report.central.push((z, v.to_string()));
    }
    report.fl_pass = pass;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_field;

    #[test]
    fn fundamental_lemma_q3() {
        let f = parse_field("Qp:p=3,prec=14").unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let rep = fl_check(&e, 4, true).unwrap();
        assert!(rep.fl_pass, "{:?}", rep.rows.iter().map(|r| r.value.as_ref().map(|v| v.to_string())).collect::<Vec<_>>());
    }

    #[test]
    fn factor_forms_agree() {
        for fs in ["Qp:p=3,prec=14", "Qp:p=2,prec=16", "Fq:p=2,f=1,prec=16"] {
            let f = parse_field(fs).unwrap();
            for kind in [ExtKind::Unramified, ExtKind::Ramified] {
                let e = QuadExt::canonical(&f, kind).unwrap();
                for n in 0..4 {
                    for s in [1, -1] {
                        let Some(t) = torus_element(&e, n, Some(s)).unwrap() else { continue };
                        let a = transfer_factor(&e, &t, &Constant::LambdaInverse).unwrap().value;
                        let b = transfer_factor_intrinsic(&e, &t, &Constant::LambdaInverse).unwrap();
                        assert_eq!(a, b, "{fs} {kind} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn split_indicator() {
        let f = parse_field("Qp:p=3,prec=10").unwrap();
        let one = TestFunction::unit();
        assert_eq!(split_transfer(&f, &f.from_int(2), &one).unwrap(), BigRational::one());
        assert!(split_transfer(&f, &f.from_int(3), &one).unwrap().is_zero());
        let c1 = TestFunction::cell(1);
        assert_eq!(split_transfer(&f, &f.from_int(3), &c1).unwrap(), q_rat(3, 1));
        assert_eq!(split_transfer(&f, &f.one(), &c1).unwrap(), q_rat(3, 1) - BigRational::one());
    }
}
