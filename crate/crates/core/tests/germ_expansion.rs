use num_rational::BigRational;
use num_traits::Zero;

use sl2_endoscopy::arith::parse_field;
use sl2_endoscopy::error::Error;
use sl2_endoscopy::germs::{germ_profile, shalika_compare, unipotent_class_integral};
use sl2_endoscopy::matrix::TestFunction;
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};
use sl2_endoscopy::transfer::{central_value, Constant};

#[test]
fn char2_eps_germ_is_constant_near_one() {
    for fs in ["Fq:p=2,f=1,prec=18", "Fq:p=2,f=2,prec=16"] {
        let f = parse_field(fs).unwrap();
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            let e = QuadExt::canonical(&f, kind).unwrap();
            for tf in [TestFunction::unit(), TestFunction::cell(1), TestFunction::parse("0:1,1:-1").unwrap()] {
                let p = germ_profile(&e, &tf, 0..=4, &Constant::LambdaInverse).unwrap();
                assert_eq!(p.central, central_value(&e, 1, &tf, &Constant::LambdaInverse).unwrap());
                let n0 = p.n0.unwrap_or_else(|| panic!("{fs} {kind} {tf}: no stable range"));
                assert!(n0 <= tf.r_max() + 1, "{fs} {kind} {tf}: n0 = {n0}");
                for r in p.rows.iter().filter(|r| r.n >= n0) {
                    assert_eq!(r.delta_o_eps, p.central, "{fs} {kind} {tf} n={}", r.n);
                }
                assert!(p.rows.iter().all(|r| r.eps_fit.holds), "{fs} {kind} {tf}");
                if kind == ExtKind::Unramified {
                    assert!(p.affine_holds, "{fs} {tf}");
                    // unramified char 2: only even depths carry norm-one elements
                    assert_eq!(p.missing, vec![1, 3]);
                }
            }
        }
    }
}

#[test]
fn odd_eps_germ_matches_delta_inverse() {
    for fs in ["Qp:p=3,prec=16", "Qp:p=5,prec=12"] {
        let f = parse_field(fs).unwrap();
        let e = QuadExt::canonical(&f, ExtKind::Unramified).unwrap();
        let q = BigRational::from_integer(e.q().into());
        let c2 = (&q + BigRational::from_integer(1.into())) / (&q - BigRational::from_integer(1.into()));
        let p = germ_profile(&e, &TestFunction::cell(1), 0..=4, &Constant::One).unwrap();
        for r in &p.rows {
            assert!(r.eps_fit.holds);
            assert_eq!(r.eps_fit.a.as_ref(), Some(&BigRational::zero()));
            assert_eq!(r.eps_germ_times_delta.as_ref().and_then(|v| v.as_rational()), Some(c2.clone()));
        }
    }
}

#[test]
fn shalika_inversion_q3_q5() {
    for fs in ["Qp:p=3,prec=12", "Qp:p=5,prec=10"] {
        let f = parse_field(fs).unwrap();
        for tf in [TestFunction::unit(), TestFunction::cell(1), TestFunction::cell(2), TestFunction::parse("0:-1,1:1/2,2:3").unwrap()] {
            let rep = shalika_compare(&f, &tf).unwrap();
            assert_eq!(rep.kappas.len(), 4);
            assert!(rep.table_orthogonal && rep.additive, "{fs} {tf}");
            assert!(rep.pass, "{fs} {tf}: {:?}", rep.rows);
        }
    }
}

#[test]
fn shalika_refused_in_residue_characteristic_two() {
    for fs in ["Fq:p=2,f=1,prec=12", "Fq:p=2,f=2,prec=12", "Qp:p=2,prec=12"] {
        let f = parse_field(fs).unwrap();
        match shalika_compare(&f, &TestFunction::unit()) {
            Err(Error::Refused(reason)) => assert!(!reason.is_empty()),
            other => panic!("{fs}: expected refusal, got {other:?}"),
        }
    }
}

#[test]
fn unit_mass_splits_over_square_classes() {
    let f = parse_field("Qp:p=3,prec=12").unwrap();
    let tf = TestFunction::unit();
    let one = f.one();
    let u = f.from_int(2);
    let a = unipotent_class_integral(&f, &one, &tf).unwrap();
    let b = unipotent_class_integral(&f, &u, &tf).unwrap();
    assert_eq!(a, b);
    let pi = f.uniformizer();
    let c = unipotent_class_integral(&f, &pi, &tf).unwrap();
    assert_eq!(&a + &b + &c + &c, BigRational::from_integer(1.into()));
}
