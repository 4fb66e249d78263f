use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl2_endoscopy::arith::{enumerate_residues, parse_field};
use sl2_endoscopy::cyclo::CycloValue;
use sl2_endoscopy::matrix::{stable_class_split, TestFunction};
use sl2_endoscopy::oracle::{oracle_split_orbital, tree_orbital};
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};
use sl2_endoscopy::torus::{random_torus_element, torus_element};
use sl2_endoscopy::transfer::{
    central_value, delta_t_squared, fl_check, split_table, split_transfer, transfer_factor, transfer_table,
    transfer_value, Constant,
};

const FL_FIELDS: [&str; 4] = ["Qp:p=3,prec=14", "Qp:p=5,prec=12", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=14"];

#[test]
fn fundamental_lemma_unramified() {
    for fs in FL_FIELDS {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let rep = fl_check(&e, 4, true).unwrap();
        assert!(rep.fl_pass, "{fs}");
        let tab = transfer_table(&e, &TestFunction::unit(), 2, &Constant::One).unwrap();
        assert!(tab.table.iter().all(|r| r.value.is_one()), "{fs}");
        assert_eq!(tab.smooth_level, 0);
    }
}

#[test]
fn fundamental_lemma_split() {
    for fs in FL_FIELDS {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Split).unwrap();
        assert!(fl_check(&e, 0, false).unwrap().fl_pass, "{fs}");
    }
}

#[test]
fn split_transfer_matches_digit_sums() {
    for fs in ["Qp:p=3,prec=10", "Fq:p=2,f=1,prec=10", "Fq:p=2,f=2,prec=10"] {
        let f = parse_field(fs).unwrap();
        let units: Vec<_> = enumerate_residues(&f, 1).unwrap().into_iter().filter(|u| !u.is_zero()).collect();
        for r in 0..=2 {
            let tf = TestFunction::cell(r);
            for v in -3i64..=3 {
                for u in &units {
                    let a = f.shift(u, v);
                    assert_eq!(
                        split_transfer(&f, &a, &tf).unwrap(),
                        oracle_split_orbital(&f, &a, &tf).unwrap(),
                        "{fs} r={r} v={v}"
                    );
                }
            }
        }
        let tab = split_table(&f, &TestFunction::unit(), 3).unwrap();
        for row in tab {
            let want = if row.val == 0 { BigRational::one() } else { BigRational::zero() };
            assert_eq!(row.value, want);
        }
    }
}

#[test]
fn transfer_factor_identities() {
    let fields = ["Qp:p=3,prec=14", "Qp:p=5,prec=12", "Qp:p=2,prec=16", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=14"];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for fs in fields {
        let f = parse_field(fs).unwrap();
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            let e = QuadExt::canonical(&f, kind).unwrap();
            let em1 = CycloValue::from_int(e.epsilon_minus_one() as i64);
            for _ in 0..25 {
                let t = random_torus_element(&e, &mut rng, 3, 3).unwrap();
                let c = Constant::LambdaInverse;
                let d = transfer_factor(&e, &t, &c).unwrap().value;
                let dinv = transfer_factor(&e, &e.inv(&t).unwrap(), &c).unwrap().value;
                assert_eq!(dinv, em1.mul(&d), "{fs} {kind}");
                let dt2 = CycloValue::from_rational(delta_t_squared(&e, &t).unwrap());
                assert_eq!(d.mul(&d), em1.mul(&dt2), "{fs} {kind}");
            }
        }
    }
}

#[test]
fn central_value_is_the_limit() {
    for fs in ["Qp:p=3,prec=16", "Qp:p=5,prec=14", "Fq:p=2,f=1,prec=18"] {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        for tf in [TestFunction::unit(), TestFunction::cell(1), TestFunction::cell(2), TestFunction::parse("0:2,1:-1").unwrap()] {
            let centre = central_value(&e, 1, &tf, &Constant::One).unwrap();
            for n in tf.r_max() + 1..=tf.r_max() + 4 {
                if let Some(t) = torus_element(&e, n, None).unwrap() {
                    assert_eq!(transfer_value(&e, &t, &tf, &Constant::One).unwrap(), centre, "{fs} {tf} n={n}");
                }
            }
        }
    }
}

#[test]
fn product_is_constant_on_the_stable_class() {
    let f = parse_field("Qp:p=3,prec=14").unwrap();
    let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
    let tf = TestFunction::parse("0:1,1:2").unwrap();
    for n in 0..3 {
        let t = torus_element(&e, n, None).unwrap().unwrap();
        let (_, [m1, m2]) = stable_class_split(&e, &t).unwrap();
        let radius = n + tf.r_max() + 3;
        let o1 = tree_orbital(&f, &m1, &tf, radius).unwrap().even;
        let o2 = tree_orbital(&f, &m2, &tf, radius).unwrap().even;
        // Δ at the second representative carries the flipped marker
        let d = transfer_factor(&e, &t, &Constant::One).unwrap().value;
        let flip = CycloValue::from_int(
            (e.epsilon(&m2.c).unwrap() * e.epsilon(&m1.c).unwrap()) as i64,
        );
        let lhs = d.scale(&(&o1 - &o2));
        let rhs = d.mul(&flip).scale(&(&o2 - &o1));
        assert_eq!(lhs, rhs);
    }
}
