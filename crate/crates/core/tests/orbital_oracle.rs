use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl2_endoscopy::arith::parse_field;
use sl2_endoscopy::matrix::{stable_class_split, TestFunction};
use sl2_endoscopy::oracle::{oracle_unit_quotient, tree_orbital};
use sl2_endoscopy::orbital::{measure_constant, orbital_of_matrix, orbital_pair, stable_orbital, eps_orbital};
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};
use sl2_endoscopy::torus::random_torus_element;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn measure_constants_match_unit_quotients() {
    let cases = [
        ("Qp:p=3,prec=10", ExtKind::Unramified),
        ("Qp:p=3,prec=10", ExtKind::Ramified),
        ("Qp:p=5,prec=10", ExtKind::Unramified),
        ("Qp:p=5,prec=10", ExtKind::Ramified),
        ("Fq:p=2,f=1,prec=12", ExtKind::Unramified),
        ("Fq:p=2,f=1,prec=12", ExtKind::Ramified),
        ("Fq:p=2,f=2,prec=12", ExtKind::Unramified),
        ("Qp:p=2,prec=12", ExtKind::Unramified),
    ];
    for (fs, kind) in cases {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, kind).unwrap();
        for m in 0..=2 {
            let oracle = oracle_unit_quotient(&e, m).unwrap();
            let formula = measure_constant(&e, m).unwrap();
            assert_eq!(formula, r(oracle as i64, 1), "{fs} {kind} m={m}");
        }
    }
}

fn test_functions() -> Vec<TestFunction> {
    vec![
        TestFunction::unit(),
        TestFunction::cell(1),
        TestFunction::cell(2),
        TestFunction::parse("0:1,1:-1/2,2:3").unwrap(),
    ]
}

fn check_against_tree(fs: &str, kind: ExtKind, samples: usize, max_depth: u32) {
    let f = parse_field(fs).unwrap();
    let e = QuadExt::canonical(&f, kind).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let tfs = test_functions();
    for i in 0..samples {
        let t = random_torus_element(&e, &mut rng, max_depth, 3).unwrap();
        let tf = &tfs[i % tfs.len()];
        let vb = t.b.val().unwrap() as u32;
        let (_, [m1, m2]) = stable_class_split(&e, &t).unwrap();
        let radius = vb + tf.r_max() + 3;
        let c1 = tree_orbital(&f, &m1, tf, radius).unwrap();
        let c2 = tree_orbital(&f, &m2, tf, radius).unwrap();
        let (o, o2) = orbital_pair(&e, &t, tf).unwrap();
        let st = stable_orbital(&e, &t, tf).unwrap();
        let ep = eps_orbital(&e, &t, tf).unwrap();
        assert_eq!(c1.even, o, "{fs} {kind} O(t) t={}", e.format(&t));
        assert_eq!(c2.even, o2, "{fs} {kind} O(t') t={}", e.format(&t));
        assert_eq!(&c1.even - &c2.even, ep);
        assert_eq!((&st + &ep) / r(2, 1), c1.even);
        assert_eq!(orbital_of_matrix(&e, &t, &m2, tf).unwrap(), c2.even);
    }
}

#[test]
fn cell_sums_match_tree_q3() {
    check_against_tree("Qp:p=3,prec=14", ExtKind::Unramified, 12, 2);
    check_against_tree("Qp:p=3,prec=14", ExtKind::Ramified, 12, 2);
}

#[test]
fn cell_sums_match_tree_char2() {
    check_against_tree("Fq:p=2,f=1,prec=16", ExtKind::Unramified, 12, 2);
    check_against_tree("Fq:p=2,f=1,prec=16", ExtKind::Ramified, 12, 3);
    check_against_tree("Fq:p=2,f=2,prec=16", ExtKind::Unramified, 6, 2);
}

#[test]
fn cell_sums_match_tree_q2_and_q5() {
    check_against_tree("Qp:p=2,prec=16", ExtKind::Unramified, 8, 2);
    check_against_tree("Qp:p=2,prec=16", ExtKind::Ramified, 8, 2);
    check_against_tree("Qp:p=5,prec=12", ExtKind::Unramified, 6, 1);
}
