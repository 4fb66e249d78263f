//! One function per subcommand, each returning an outcome and a JSON report.

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use sl2_endoscopy::arith::{format_elem, parse_elem, parse_field, LocalField};
use sl2_endoscopy::cyclo::CycloValue;
use sl2_endoscopy::germs::{germ_profile, shalika_compare};
use sl2_endoscopy::matrix::{stable_class_split, Mat2, TestFunction};
use sl2_endoscopy::oracle::{
    oracle_conjugacy, oracle_norm_membership, oracle_square_classes, oracle_unit_quotient, tree_orbital, MatGroup,
};
use sl2_endoscopy::orbital::{kappa_orbital, measure_constant, orbital_pair, KappaChar};
use sl2_endoscopy::quad_ext::{ExtElem, QuadExt};
use sl2_endoscopy::spectral::{
    character_table_check, iden_check, orthogonality_expected, orthogonality_integral, weyl_spectral_check, xi_value,
    TorusGroup, WeylStatus,
};
use sl2_endoscopy::suite::{run_suite, Verdict};
use sl2_endoscopy::torus::{random_torus_element, torus_element};
use sl2_endoscopy::transfer::{fl_check, transfer_factor, transfer_table, transfer_value, Constant, FlStatus};
use sl2_endoscopy::Error;

use crate::config::RunConfig;
use crate::output::Outcome;

pub enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CmdResult = Result<(Outcome, Value), CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Floating rendering, tagged as approximate wherever it appears.
fn approx(c: &CycloValue) -> String {
    let (re, im) = c.to_complex();
    format!("{re:.12}{im:+.12}i")
}

fn field(cfg: &RunConfig) -> Result<LocalField, CliError> {
    match &cfg.field {
        Some(s) => Ok(parse_field(s)?),
        None => usage("missing --field"),
    }
}

fn ext(cfg: &RunConfig, f: &LocalField) -> Result<QuadExt, CliError> {
    Ok(QuadExt::parse(f, cfg.ext.as_deref().unwrap_or("unramified"))?)
}

fn elliptic(cfg: &RunConfig) -> Result<(LocalField, QuadExt), CliError> {
    let f = field(cfg)?;
    let e = ext(cfg, &f)?;
    if !e.is_field() {
        return usage("this command needs E a field (unramified or ramified)");
    }
    Ok((f, e))
}

fn test_function(cfg: &RunConfig) -> Result<TestFunction, CliError> {
    Ok(TestFunction::parse(cfg.f.as_deref().unwrap_or("1K"))?)
}

fn constant(cfg: &RunConfig) -> Result<Constant, CliError> {
    match cfg.constant.as_deref().unwrap_or("lambda-inverse") {
        "lambda-inverse" => Ok(Constant::LambdaInverse),
        "one" | "1" => Ok(Constant::One),
        other => usage(format!("--constant: expected lambda-inverse or one, got `{other}`")),
    }
}

/// `depth=N[,marker=±1]` or `A;B`.
fn torus_point(cfg: &RunConfig, e: &QuadExt) -> Result<ExtElem, CliError> {
    let f = e.base();
    let s = cfg.t.as_deref().unwrap_or("depth=1");
    if let Some((a, b)) = s.split_once(';') {
        let t = e.elem(parse_elem(f, a)?, parse_elem(f, b)?);
        if !f.eq(&e.norm(&t), &f.one()) {
            return usage("--t must have norm 1");
        }
        return Ok(t);
    }
    let (mut depth, mut marker) = (None, None);
    for kv in s.split(',') {
        match kv.split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
            Some(("depth", v)) => depth = v.parse::<u32>().ok(),
            Some(("marker", v)) => marker = v.parse::<i32>().ok().filter(|m| m.abs() == 1),
            _ => return usage(format!("--t: expected depth=N[,marker=±1] or A;B, got `{s}`")),
        }
    }
    let Some(n) = depth else { return usage("--t: missing depth") };
    match torus_element(e, n, marker)? {
        Some(t) => Ok(t),
        None => usage(format!("no element of E^1 with v(b) = {n} and the requested marker")),
    }
}

fn n_range(cfg: &RunConfig) -> Result<std::ops::RangeInclusive<u32>, CliError> {
    let s = cfg.n_range.as_deref().unwrap_or("0..4");
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| CliError::Usage(format!("--n-range: expected a..b, got `{s}`")))?;
    match (a.trim().parse(), b.trim().parse()) {
        (Ok(a), Ok(b)) if a <= b => Ok(a..=b),
        _ => usage(format!("--n-range: expected a..b with a ≤ b, got `{s}`")),
    }
}

fn mat_json(f: &LocalField, m: &Mat2) -> Value {
    let [a, b, c, d] = m.format(f);
    json!([[a, b], [c, d]])
}

pub fn classify_ext(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    let e = ext(cfg, &f)?;
    let lam = e.lambda();
    let non_norm = if e.is_field() { Some(format_elem(&f, &e.non_norm()?)) } else { None };
    Ok((
        Outcome::Report,
        json!({
            "ext": e.spec_string(),
            "kind": e.kind(),
            "tr": format_elem(&f, e.tr()),
            "det": format_elem(&f, e.det()),
            "disc_val": e.disc_val(),
            "eps_minus_one": e.epsilon_minus_one(),
            "lambda": lam.value.to_string(),
            "lambda_canonical": lam.canonical,
            "non_norm": non_norm,
        }),
    ))
}

pub fn epsilon(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    let e = ext(cfg, &f)?;
    let Some(xs) = &cfg.x else { return usage("missing --x") };
    let x = parse_elem(&f, xs)?;
    let value = e.epsilon(&x)?;
    let level = cfg.level.unwrap_or(if f.p() == 2 { 4 } else { 2 });
    let oracle = match oracle_norm_membership(&e, &x, level) {
        Ok(b) => Some(b),
        Err(Error::SizeGuard(_)) => None,
        Err(err) => return Err(err.into()),
    };
    let outcome = match oracle {
        Some(b) => Outcome::from_pass(b == (value == 1)),
        None => Outcome::Report,
    };
    Ok((outcome, json!({"x": format_elem(&f, &x), "value": value, "oracle_is_norm": oracle, "oracle_level": level})))
}

pub fn lambda(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    let e = ext(cfg, &f)?;
    let lam = e.lambda();
    let sq = lam.value.mul(&lam.value);
    let em1 = e.epsilon_minus_one();
    let fourth = lam.value.pow(4).is_one();
    let pass = sq == CycloValue::from_int(em1 as i64) && fourth;
    Ok((
        Outcome::from_pass(pass),
        json!({
            "value": lam.value.to_string(),
            "approx": approx(&lam.value),
            "canonical": lam.canonical,
            "square": sq.to_string(),
            "eps_minus_one": em1,
            "fourth_power_is_one": fourth,
        }),
    ))
}

pub fn orbital(cfg: &RunConfig) -> CmdResult {
    let (f, e) = elliptic(cfg)?;
    let t = torus_point(cfg, &e)?;
    let tf = test_function(cfg)?;
    let st = kappa_orbital(&e, &t, &tf, &KappaChar::Trivial)?.value;
    let ep = kappa_orbital(&e, &t, &tf, &KappaChar::Ext(e.clone()))?.value;
    let (o, o2) = orbital_pair(&e, &t, &tf)?;
    let (_, [m1, m2]) = stable_class_split(&e, &t)?;
    let half = BigRational::new(1.into(), 2.into());
    let mut pass = o == (&st + &ep) * &half && ep == &o - &o2;
    let mut oracle = Value::Null;
    if cfg.with_oracle {
        let radius = t.b.val().unwrap_or(0).max(0) as u32 + tf.r_max() + 3;
        let c1 = tree_orbital(&f, &m1, &tf, radius)?.even;
        let c2 = tree_orbital(&f, &m2, &tf, radius)?.even;
        pass &= c1 == o && c2 == o2;
        oracle = json!({"radius": radius, "o_t": c1.to_string(), "o_t_prime": c2.to_string()});
    }
    Ok((
        Outcome::from_pass(pass),
        json!({
            "t": e.format(&t),
            "f": tf.to_string(),
            "matrices": [mat_json(&f, &m1), mat_json(&f, &m2)],
            "o_t": o.to_string(),
            "o_t_prime": o2.to_string(),
            "o_stable": st.to_string(),
            "o_eps": ep.to_string(),
            "tree_oracle": oracle,
        }),
    ))
}

pub fn kappa_orbital_cmd(cfg: &RunConfig) -> CmdResult {
    let (f, e) = elliptic(cfg)?;
    let t = torus_point(cfg, &e)?;
    let tf = test_function(cfg)?;
    let kappa = match cfg.kappa.as_deref().unwrap_or("eps") {
        "trivial" | "1" => KappaChar::Trivial,
        "eps" => KappaChar::Ext(e.clone()),
        other => KappaChar::Ext(QuadExt::parse(&f, other)?),
    };
    let rep = kappa_orbital(&e, &t, &tf, &kappa)?;
    let mut v = to_value(&rep);
    v["t"] = json!(e.format(&t));
    Ok((Outcome::Report, v))
}

pub fn transfer(cfg: &RunConfig) -> CmdResult {
    let (_, e) = elliptic(cfg)?;
    let tf = test_function(cfg)?;
    let c = constant(cfg)?;
    if cfg.t.is_some() {
        let t = torus_point(cfg, &e)?;
        let factor = transfer_factor(&e, &t, &c)?;
        let value = transfer_value(&e, &t, &tf, &c)?;
        return Ok((
            Outcome::Report,
            json!({
                "t": e.format(&t),
                "factor": to_value(&factor),
                "value": value.to_string(),
                "approx": approx(&value),
            }),
        ));
    }
    let tab = transfer_table(&e, &tf, cfg.level.unwrap_or(2), &c)?;
    Ok((Outcome::Report, to_value(&tab)))
}

pub fn fl(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    let e = ext(cfg, &f)?;
    let rep = fl_check(&e, cfg.depth.unwrap_or(4), cfg.with_oracle)?;
    let outcome = match rep.status {
        FlStatus::NotApplicable => Outcome::Inconclusive,
        FlStatus::Checked => Outcome::from_pass(rep.fl_pass),
    };
    Ok((outcome, to_value(&rep)))
}

pub fn germ_expand(cfg: &RunConfig) -> CmdResult {
    let (_, e) = elliptic(cfg)?;
    let tf = test_function(cfg)?;
    let p = germ_profile(&e, &tf, n_range(cfg)?, &constant(cfg)?)?;
    let settled = p.n0.is_some() && p.rows.iter().all(|r| r.eps_fit.holds);
    let outcome = if settled { Outcome::Pass } else { Outcome::Inconclusive };
    Ok((outcome, to_value(&p)))
}

pub fn shalika(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    match shalika_compare(&f, &test_function(cfg)?) {
        Ok(rep) => Ok((Outcome::from_pass(rep.pass), to_value(&rep))),
        Err(Error::Refused(reason)) => Ok((Outcome::Inconclusive, json!({"refused": true, "reason": reason}))),
        Err(err) => Err(err.into()),
    }
}

pub fn char_identity(cfg: &RunConfig) -> CmdResult {
    let (_, e) = elliptic(cfg)?;
    let g = TorusGroup::new(&e, cfg.level.unwrap_or(2))?;
    let points: Vec<ExtElem> = if cfg.t.is_some() {
        vec![torus_point(cfg, &e)?]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = cfg.samples.unwrap_or(if cfg.quick { 5 } else { 20 });
        (0..n).map(|_| random_torus_element(&e, &mut rng, 3, 3)).collect::<Result<_, _>>()?
    };
    let em1 = CycloValue::from_int(e.epsilon_minus_one() as i64);
    let mut rows = Vec::new();
    let mut pass = true;
    for th in g.characters() {
        for t in &points {
            let row = iden_check(&e, &th, t)?;
            let xi = xi_value(&e, &th, t)?;
            let symmetric = xi == xi_value(&e, &th.inverse(), t)? && xi_value(&e, &th, &e.conj(t))? == em1.mul(&xi);
            pass &= row.pass && symmetric;
            rows.push(json!({
                "theta": th.label(),
                "t": row.t,
                "lhs": row.lhs.to_string(),
                "rhs": row.rhs.to_string(),
                "xi_symmetric": symmetric,
                "pass": row.pass,
            }));
        }
    }
    Ok((Outcome::from_pass(pass), json!({"ext": e.spec_string(), "level": g.level, "group_invariants": g.invariants, "rows": rows})))
}

pub fn orthogonality(cfg: &RunConfig) -> CmdResult {
    let (_, e) = elliptic(cfg)?;
    let g = TorusGroup::new(&e, cfg.level.unwrap_or(2))?;
    let table = character_table_check(&g)?;
    let mut pass = table;
    let mut rows = Vec::new();
    for th in g.characters() {
        let v = orthogonality_integral(&th)?;
        let want = orthogonality_expected(&th);
        pass &= v == want;
        rows.push(json!({
            "theta": th.label(),
            "order": th.order(),
            "theta_squared_trivial": th.square().is_trivial(),
            "integral": v.to_string(),
            "expected": want.to_string(),
            "pass": v == want,
        }));
    }
    Ok((
        Outcome::from_pass(pass),
        json!({"ext": e.spec_string(), "level": g.level, "group_order": g.order(), "character_table": table, "rows": rows}),
    ))
}

pub fn weyl(cfg: &RunConfig) -> CmdResult {
    let (_, e) = elliptic(cfg)?;
    let tf = test_function(cfg)?;
    let g = TorusGroup::new(&e, cfg.level.unwrap_or(1))?;
    let (mut fail, mut inconclusive) = (false, false);
    let mut reports = Vec::new();
    for th in g.characters() {
        let rep = weyl_spectral_check(&e, &th, &tf)?;
        match rep.status {
            WeylStatus::Checked => fail |= !rep.pass,
            WeylStatus::Inconclusive(_) => inconclusive = true,
        }
        reports.push(to_value(&rep));
    }
    let outcome = if fail {
        Outcome::Fail
    } else if inconclusive {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    Ok((outcome, json!({"ext": e.spec_string(), "level": g.level, "f": tf.to_string(), "reports": reports})))
}

pub fn oracle(cfg: &RunConfig) -> CmdResult {
    let f = field(cfg)?;
    let which = cfg.oracle.as_deref().unwrap_or("unit-quotient");
    match which {
        "unit-quotient" => {
            let e = ext(cfg, &f)?;
            let m = cfg.level.unwrap_or(1);
            let count = oracle_unit_quotient(&e, m)?;
            let formula = measure_constant(&e, m)?;
            let pass = formula == BigRational::from_integer(count.into());
            Ok((Outcome::from_pass(pass), json!({"oracle": which, "m": m, "count": count, "formula": formula.to_string()})))
        }
        "norm" => {
            let e = ext(cfg, &f)?;
            let Some(xs) = &cfg.x else { return usage("missing --x") };
            let x = parse_elem(&f, xs)?;
            let k = cfg.level.unwrap_or(2);
            let member = oracle_norm_membership(&e, &x, k)?;
            let eps = e.epsilon(&x)?;
            Ok((
                Outcome::from_pass(member == (eps == 1)),
                json!({"oracle": which, "x": format_elem(&f, &x), "level": k, "is_norm": member, "epsilon": eps}),
            ))
        }
        "conjugacy" => {
            let (_, e) = elliptic(cfg)?;
            let t = torus_point(cfg, &e)?;
            let k = cfg.level.unwrap_or(2);
            let (_, [m1, m2]) = stable_class_split(&e, &t)?;
            let gl = oracle_conjugacy(&f, &m1, &m2, k, MatGroup::Gl2)?;
            let sl = oracle_conjugacy(&f, &m1, &m2, k, MatGroup::Sl2)?;
            // the two rational classes must stay apart under SL(2) at some level
            Ok((
                Outcome::from_pass(gl && !sl),
                json!({
                    "oracle": which,
                    "t": e.format(&t),
                    "level": k,
                    "matrices": [mat_json(&f, &m1), mat_json(&f, &m2)],
                    "gl_conjugate": gl,
                    "sl_conjugate": sl,
                }),
            ))
        }
        "square-classes" => {
            let k = cfg.level.unwrap_or(1);
            let n = oracle_square_classes(&f, k)?;
            Ok((Outcome::Report, json!({"oracle": which, "level": k, "unit_square_classes": n})))
        }
        other => usage(format!("--oracle: unknown oracle `{other}`")),
    }
}

pub fn verify_all(cfg: &RunConfig) -> CmdResult {
    let results = run_suite(cfg.quick);
    for r in &results {
        eprintln!("{}", r.line());
    }
    let outcome = if results.iter().any(|r| r.verdict == Verdict::Fail) {
        Outcome::Fail
    } else if results.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Outcome::Inconclusive
    } else {
        Outcome::Pass
    };
    Ok((outcome, json!({"criteria": to_value(&results)})))
}
