//! The acceptance suite: thirteen exact checks, shared by the test target
//! and `sl2e verify-all`.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::parse_field;
use crate::cyclo::CycloValue;
use crate::error::{Error, Result};
use crate::germs::{germ_profile, shalika_compare};
use crate::matrix::{stable_class_split, TestFunction};
use crate::oracle::{oracle_unit_quotient, tree_orbital};
use crate::orbital::{kappa_orbital, measure_constant, orbital_of_matrix, orbital_pair, KappaChar};
use crate::quad_ext::{ExtKind, QuadExt};
use crate::spectral::{
    intertwining_at, intertwining_series_identity, iden_check, orthogonality_expected, orthogonality_integral,
    weyl_spectral_check, TorusGroup, WeylStatus,
};
use crate::torus::random_torus_element;
use crate::transfer::{central_value, delta_t_squared, fl_check, split_table, transfer_factor, Constant};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub verdict: Verdict,
    /// Number of exact comparisons made.
    pub checks: usize,
    pub detail: String,
    /// Wall time, not part of the deterministic report.
    #[serde(skip)]
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let v = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        format!("[{v}] {:>2} {} ({} checks, {} ms){}", self.id, self.name, self.checks, self.millis, if self.detail.is_empty() { String::new() } else { format!(": {}", self.detail) })
    }
}

/// Tally of exact comparisons; the first mismatch is kept as the detail.
#[derive(Default)]
struct Tally {
    checks: usize,
    failure: Option<String>,
    inconclusive: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(what());
        }
    }

    fn verdict(self) -> (Verdict, usize, String) {
        match (self.failure, self.inconclusive) {
            (Some(f), _) => (Verdict::Fail, self.checks, f),
            (None, Some(i)) => (Verdict::Inconclusive, self.checks, i),
            (None, None) => (Verdict::Pass, self.checks, String::new()),
        }
    }
}

const FL_FIELDS: [&str; 4] = ["Qp:p=3,prec=14", "Qp:p=5,prec=12", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=14"];
const SAMPLE_FIELDS: [&str; 5] = ["Qp:p=3,prec=14", "Qp:p=5,prec=12", "Qp:p=2,prec=16", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=14"];

fn ext(fs: &str, kind: ExtKind) -> Result<QuadExt> {
    QuadExt::canonical(&parse_field(fs)?, kind)
}

fn cells_up_to_two() -> Vec<TestFunction> {
    vec![TestFunction::unit(), TestFunction::cell(1), TestFunction::cell(2)]
}

fn fundamental_lemma(t: &mut Tally) -> Result<()> {
    for fs in FL_FIELDS {
        let e = ext(fs, ExtKind::Unramified)?;
        let rep = fl_check(&e, 4, false)?;
        for row in &rep.rows {
            t.check(row.pass, || format!("{fs}: n={} f^E = {:?}", row.n, row.value.as_ref().map(|v| v.to_string())));
        }
        t.check(rep.fl_pass, || format!("{fs}: fl_pass = false"));
    }
    Ok(())
}

fn split_fundamental_lemma(t: &mut Tally) -> Result<()> {
    for fs in FL_FIELDS {
        let f = parse_field(fs)?;
        for row in split_table(&f, &TestFunction::unit(), 3)? {
            let want = BigRational::from_integer(BigInt::from((row.val == 0) as i32));
            t.check(row.value == want, || format!("{fs}: f^E({}) = {}", row.a, row.value));
        }
        let rep = fl_check(&QuadExt::canonical(&f, ExtKind::Split)?, 0, false)?;
        t.check(rep.fl_pass, || format!("{fs}: split fl_pass = false"));
    }
    Ok(())
}

fn measure_constants(t: &mut Tally) -> Result<()> {
    let cases = [
        ("Qp:p=3,prec=10", ExtKind::Unramified),
        ("Qp:p=3,prec=10", ExtKind::Ramified),
        ("Qp:p=5,prec=10", ExtKind::Unramified),
        ("Qp:p=5,prec=10", ExtKind::Ramified),
        ("Qp:p=2,prec=12", ExtKind::Unramified),
        ("Fq:p=2,f=1,prec=12", ExtKind::Unramified),
        ("Fq:p=2,f=1,prec=12", ExtKind::Ramified),
        ("Fq:p=2,f=2,prec=12", ExtKind::Unramified),
    ];
    for (fs, kind) in cases {
        let e = ext(fs, kind)?;
        for m in 0..=2 {
            let formula = measure_constant(&e, m)?;
            let oracle = BigRational::from_integer(BigInt::from(oracle_unit_quotient(&e, m)?));
            t.check(formula == oracle, || format!("{fs} {kind} m={m}: {formula} vs {oracle}"));
        }
    }
    Ok(())
}

fn stabilization(t: &mut Tally, quick: bool) -> Result<()> {
    let samples = if quick { 10 } else { 50 };
    let tfs = cells_up_to_two();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for fs in SAMPLE_FIELDS {
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            let e = ext(fs, kind)?;
            let f = e.base();
            for i in 0..samples {
                let x = random_torus_element(&e, &mut rng, 3, 3)?;
                let tf = &tfs[i % tfs.len()];
                let (_, [m1, m2]) = stable_class_split(&e, &x)?;
                let (o, o2) = (orbital_of_matrix(&e, &x, &m1, tf)?, orbital_of_matrix(&e, &x, &m2, tf)?);
                let st = kappa_orbital(&e, &x, tf, &KappaChar::Trivial)?.value;
                let ep = kappa_orbital(&e, &x, tf, &KappaChar::Ext(e.clone()))?.value;
                let half = BigRational::new(1.into(), 2.into());
                t.check(o == (&st + &ep) * &half, || format!("{fs} {kind} O(t) t={}", e.format(&x)));
                t.check(ep == &o - &o2, || format!("{fs} {kind} O^ε t={}", e.format(&x)));
                t.check((o.clone(), o2.clone()) == orbital_pair(&e, &x, tf)?, || format!("{fs} {kind} pair"));
                // lattice count on the tree for the shallow samples
                let vb = x.b.val().unwrap_or(0) as u32;
                if i % 5 == 0 && f.q() <= 3 && vb + tf.r_max() <= 3 {
                    let radius = vb + tf.r_max() + 3;
                    let c1 = tree_orbital(f, &m1, tf, radius)?.even;
                    t.check(c1 == o, || format!("{fs} {kind} tree O(t) t={}", e.format(&x)));
                }
            }
        }
    }
    Ok(())
}

fn kappa_vanishing(t: &mut Tally) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs = [
        ("Qp:p=3,prec=14", ExtKind::Unramified, ExtKind::Ramified),
        ("Qp:p=3,prec=14", ExtKind::Ramified, ExtKind::Unramified),
        ("Fq:p=2,f=1,prec=16", ExtKind::Unramified, ExtKind::Ramified),
        ("Qp:p=2,prec=16", ExtKind::Ramified, ExtKind::Unramified),
    ];
    for (fs, carrier, foreign) in pairs {
        let e = ext(fs, carrier)?;
        let kappa = KappaChar::Ext(ext(fs, foreign)?);
        for i in 0..20 {
            let x = random_torus_element(&e, &mut rng, 3, 3)?;
            let tf = &cells_up_to_two()[i % 3];
            let v = kappa_orbital(&e, &x, tf, &kappa)?.value;
            t.check(v == BigRational::from_integer(0.into()), || format!("{fs} {carrier} κ={foreign}: {v}"));
        }
    }
    Ok(())
}

fn transfer_identities(t: &mut Tally) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for fs in SAMPLE_FIELDS {
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            let e = ext(fs, kind)?;
            let em1 = CycloValue::from_int(e.epsilon_minus_one() as i64);
            for _ in 0..50 {
                let x = random_torus_element(&e, &mut rng, 3, 3)?;
                let c = Constant::LambdaInverse;
                let d = transfer_factor(&e, &x, &c)?.value;
                let dinv = transfer_factor(&e, &e.inv(&x)?, &c)?.value;
                t.check(dinv == em1.mul(&d), || format!("{fs} {kind} Δ(t^-1) t={}", e.format(&x)));
                let dt2 = CycloValue::from_rational(delta_t_squared(&e, &x)?);
                t.check(d.mul(&d) == em1.mul(&dt2), || format!("{fs} {kind} Δ² t={}", e.format(&x)));
            }
        }
    }
    Ok(())
}

fn char2_germs(t: &mut Tally) -> Result<()> {
    for fs in ["Fq:p=2,f=1,prec=18", "Fq:p=2,f=2,prec=16"] {
        let e = ext(fs, ExtKind::Unramified)?;
        for tf in [TestFunction::unit(), TestFunction::cell(1)] {
            let c = Constant::LambdaInverse;
            let p = germ_profile(&e, &tf, 0..=4, &c)?;
            t.check(p.central == central_value(&e, 1, &tf, &c)?, || format!("{fs} {tf}: central"));
            match p.n0 {
                None => t.check(false, || format!("{fs} {tf}: Δ O^ε not eventually constant")),
                Some(n0) => {
                    for r in p.rows.iter().filter(|r| r.n >= n0) {
                        t.check(r.delta_o_eps == p.central, || format!("{fs} {tf} n={}", r.n));
                    }
                    t.check(n0 <= tf.r_max() + 1, || format!("{fs} {tf}: n0 = {n0}"));
                }
            }
        }
    }
    Ok(())
}

fn shalika(t: &mut Tally) -> Result<()> {
    for fs in ["Fq:p=2,f=1,prec=12", "Qp:p=2,prec=12"] {
        let refused = matches!(shalika_compare(&parse_field(fs)?, &TestFunction::unit()), Err(Error::Refused(_)));
        t.check(refused, || format!("{fs}: not refused"));
    }
    let f = parse_field("Qp:p=3,prec=12")?;
    for tf in cells_up_to_two() {
        let rep = shalika_compare(&f, &tf)?;
        t.check(rep.kappas.len() == 4 && rep.table_orthogonal, || format!("{tf}: character table"));
        for row in &rep.rows {
            t.check(row.reconstructed == row.direct, || format!("{tf} η={}: {} vs {}", row.eta, row.reconstructed, row.direct));
        }
    }
    Ok(())
}

const SPECTRAL_CASES: [(&str, ExtKind); 4] = [
    ("Qp:p=3,prec=14", ExtKind::Unramified),
    ("Qp:p=3,prec=14", ExtKind::Ramified),
    ("Fq:p=2,f=1,prec=16", ExtKind::Unramified),
    ("Fq:p=2,f=1,prec=16", ExtKind::Ramified),
];

fn character_identity(t: &mut Tally, quick: bool) -> Result<()> {
    let per = if quick { 5 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (fs, kind) in SPECTRAL_CASES {
        let e = ext(fs, kind)?;
        for level in 1..=2 {
            let g = TorusGroup::new(&e, level)?;
            for th in g.characters() {
                for _ in 0..per {
                    let x = random_torus_element(&e, &mut rng, 3, 3)?;
                    let row = iden_check(&e, &th, &x)?;
                    t.check(row.pass, || format!("{fs} {kind} {} t={}: {} vs {}", th.label(), row.t, row.lhs, row.rhs));
                }
            }
        }
    }
    Ok(())
}

fn orthogonality(t: &mut Tally) -> Result<()> {
    for (fs, kind) in SPECTRAL_CASES {
        let e = ext(fs, kind)?;
        for level in 1..=2 {
            for th in TorusGroup::new(&e, level)?.characters() {
                let v = orthogonality_integral(&th)?;
                let want = orthogonality_expected(&th);
                t.check(v == want, || format!("{fs} {kind} {}: {v} vs {want}", th.label()));
            }
        }
    }
    Ok(())
}

fn weyl(t: &mut Tally) -> Result<()> {
    for fs in ["Qp:p=3,prec=16", "Fq:p=2,f=1,prec=18"] {
        let e = ext(fs, ExtKind::Unramified)?;
        for th in TorusGroup::new(&e, 1)?.characters() {
            let rep = weyl_spectral_check(&e, &th, &TestFunction::unit())?;
            match &rep.status {
                WeylStatus::Inconclusive(why) => {
                    t.checks += 1;
                    t.inconclusive.get_or_insert_with(|| format!("{fs} {}: {why}", th.label()));
                }
                WeylStatus::Checked => t.check(rep.pass, || format!("{fs} {}: {:?} vs {:?}", th.label(), rep.lhs, rep.rhs)),
            }
        }
    }
    Ok(())
}

fn intertwining(t: &mut Tally) -> Result<()> {
    t.check(intertwining_at(3, 1)? == BigRational::new(4.into(), 3.into()), || "Z(1)/Z(2) at q = 3".into());
    t.check(intertwining_at(3, 0).is_err(), || "pole at s = 0 not flagged".into());
    for q in [2, 3, 4, 5] {
        t.check(intertwining_series_identity(q, 20), || format!("series identity q={q}"));
    }
    Ok(())
}

fn lambda(t: &mut Tally) -> Result<()> {
    let fields = ["Qp:p=3,prec=10", "Qp:p=5,prec=10", "Qp:p=7,prec=8", "Qp:p=2,prec=12", "Fq:p=3,f=2,prec=10", "Fq:p=2,f=1,prec=12", "Fq:p=2,f=2,prec=12"];
    for fs in fields {
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            let e = ext(fs, kind)?;
            let l = e.lambda().value;
            if kind == ExtKind::Unramified {
                t.check(l.is_one(), || format!("{fs}: λ = {l} for unramified E"));
            }
            let em1 = CycloValue::from_int(e.epsilon_minus_one() as i64);
            t.check(l.mul(&l) == em1, || format!("{fs} {kind}: λ² = {}", l.mul(&l)));
            t.check(l.pow(4).is_one(), || format!("{fs} {kind}: λ⁴ ≠ 1"));
        }
    }
    Ok(())
}

type Runner = fn(&mut Tally, bool) -> Result<()>;

const CRITERIA: [(&str, Runner); 13] = [
    ("fundamental lemma, unramified", |t, _| fundamental_lemma(t)),
    ("fundamental lemma, split", |t, _| split_fundamental_lemma(t)),
    ("measure constants against unit quotients", |t, _| measure_constants(t)),
    ("stabilization of orbital integrals", stabilization),
    ("vanishing for foreign κ", |t, _| kappa_vanishing(t)),
    ("transfer factor identities", |t, _| transfer_identities(t)),
    ("κ-germ in characteristic 2", |t, _| char2_germs(t)),
    ("unipotent inversion and its refusal", |t, _| shalika(t)),
    ("character identity", character_identity),
    ("orthogonality", |t, _| orthogonality(t)),
    ("Weyl integration", |t, _| weyl(t)),
    ("intertwining scalar", |t, _| intertwining(t)),
    ("λ constraints", |t, _| lambda(t)),
];

pub fn criteria_count() -> usize {
    CRITERIA.len()
}

/// Run one criterion (`id` from 1); errors count as failures.
pub fn run_criterion(id: u32, quick: bool) -> Option<CriterionResult> {
    let (name, run) = *CRITERIA.get((id as usize).checked_sub(1)?)?;
    let start = Instant::now();
    let mut tally = Tally::default();
    let outcome = run(&mut tally, quick);
    let (mut verdict, checks, mut detail) = tally.verdict();
    if let Err(e) = outcome {
        verdict = Verdict::Fail;
        detail = format!("error: {e}");
    }
    Some(CriterionResult { id, name, verdict, checks, detail, millis: start.elapsed().as_millis() })
}

pub fn run_suite(quick: bool) -> Vec<CriterionResult> {
    (1..=CRITERIA.len() as u32).filter_map(|id| run_criterion(id, quick)).collect()
}
