use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl2_endoscopy::arith::parse_field;
use sl2_endoscopy::cyclo::CycloValue;
use sl2_endoscopy::matrix::{stable_class_split, TestFunction};
use sl2_endoscopy::oracle::{oracle_conjugacy, MatGroup};
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};
use sl2_endoscopy::spectral::{
    character_table_check, iden_check, intertwining_at, intertwining_series_identity, orthogonality_expected,
    orthogonality_integral, weyl_spectral_check, xi_value, TorusGroup, WeylStatus,
};
use sl2_endoscopy::torus::{random_torus_element, torus_element};

const CASES: [(&str, ExtKind); 5] = [
    ("Qp:p=3,prec=14", ExtKind::Unramified),
    ("Qp:p=3,prec=14", ExtKind::Ramified),
    ("Fq:p=2,f=1,prec=16", ExtKind::Unramified),
    ("Fq:p=2,f=1,prec=16", ExtKind::Ramified),
    ("Qp:p=2,prec=16", ExtKind::Unramified),
];

#[test]
fn character_identity_on_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (fs, kind) in CASES {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, kind).unwrap();
        for level in 1..=2 {
            let g = TorusGroup::new(&e, level).unwrap();
            for th in g.characters() {
                for _ in 0..20 {
                    let t = random_torus_element(&e, &mut rng, 3, 3).unwrap();
                    let row = iden_check(&e, &th, &t).unwrap();
                    assert!(row.pass, "{fs} {kind} {} {}: {} vs {}", th.label(), row.t, row.lhs, row.rhs);
                    // Ξ_θ = Ξ_{θ^{-1}} and Ξ(t̄) = ε(-1) Ξ(t)
                    let xi = xi_value(&e, &th, &t).unwrap();
                    assert_eq!(xi, xi_value(&e, &th.inverse(), &t).unwrap());
                    let em1 = CycloValue::from_int(e.epsilon_minus_one() as i64);
                    assert_eq!(xi_value(&e, &th, &e.conj(&t)).unwrap(), em1.mul(&xi));
                }
            }
        }
    }
}

#[test]
fn orthogonality_and_character_tables() {
    for (fs, kind) in CASES {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, kind).unwrap();
        for level in 1..=2 {
            let g = TorusGroup::new(&e, level).unwrap();
            assert!(character_table_check(&g).unwrap(), "{fs} {kind} level {level}");
            for th in g.characters() {
                let v = orthogonality_integral(&th).unwrap();
                assert_eq!(v, orthogonality_expected(&th), "{fs} {kind} {}", th.label());
            }
        }
    }
}

#[test]
fn weyl_integration_unit() {
    for fs in ["Qp:p=3,prec=16", "Fq:p=2,f=1,prec=18"] {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        for level in 1..=2 {
            let g = TorusGroup::new(&e, level).unwrap();
            for th in g.characters() {
                let rep = weyl_spectral_check(&e, &th, &TestFunction::unit()).unwrap();
                assert!(matches!(rep.status, WeylStatus::Checked), "{fs} {:?}", rep.status);
                assert!(rep.pass, "{fs} {}: {:?} vs {:?}", th.label(), rep.lhs, rep.rhs);
                assert!(rep.deep.iter().all(|d| d.verified));
            }
        }
    }
}

#[test]
fn weyl_integration_other_test_functions() {
    let f = parse_field("Qp:p=3,prec=16").unwrap();
    let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
    let g = TorusGroup::new(&e, 2).unwrap();
    for tf in [TestFunction::cell(1), TestFunction::parse("0:2,1:-1/3").unwrap()] {
        for th in g.characters() {
            let rep = weyl_spectral_check(&e, &th, &tf).unwrap();
            if matches!(rep.status, WeylStatus::Checked) {
                assert!(rep.pass, "{tf} {}", th.label());
            }
        }
    }
}

#[test]
fn weyl_integration_ramified_is_inconclusive() {
    let f = parse_field("Qp:p=3,prec=12").unwrap();
    let e = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
    let g = TorusGroup::new(&e, 1).unwrap();
    let rep = weyl_spectral_check(&e, &g.characters()[0], &TestFunction::unit()).unwrap();
    assert!(matches!(rep.status, WeylStatus::Inconclusive(_)));
}

#[test]
fn inverse_is_stably_but_not_rationally_conjugate() {
    // ε(-1) = -1 for Q_3(√3): t and t^{-1} lie in the two rational classes
    let f = parse_field("Qp:p=3,prec=12").unwrap();
    let e = QuadExt::canonical(&f, ExtKind::Ramified).unwrap();
    assert_eq!(e.epsilon_minus_one(), -1);
    let t = torus_element(&e, 1, Some(1)).unwrap().unwrap();
    let (_, [m, _]) = stable_class_split(&e, &t).unwrap();
    let (_, [mi, _]) = stable_class_split(&e, &e.inv(&t).unwrap()).unwrap();
    assert!(oracle_conjugacy(&f, &m, &mi, 2, MatGroup::Gl2).unwrap());
    assert!(!oracle_conjugacy(&f, &m, &mi, 2, MatGroup::Sl2).unwrap());
}

#[test]
fn intertwining_scalar() {
    assert_eq!(intertwining_at(3, 1).unwrap(), BigRational::new(4.into(), 3.into()));
    assert!(intertwining_at(3, 0).is_err());
    for q in [2, 3, 4, 5] {
        assert!(intertwining_series_identity(q, 20));
    }
}
