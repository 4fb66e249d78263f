use sl2_endoscopy::arith::{enumerate_residues, parse_field};
use sl2_endoscopy::oracle::NormOracle;
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};

fn check(e: &QuadExt, level: u32) {
    let f = e.base();
    let oracle = NormOracle::new(e, level).unwrap();
    let mut seen = 0;
    for v in 0..2 {
        for u in enumerate_residues(f, level).unwrap() {
            if !f.is_unit(&u) {
                continue;
            }
            let x = f.shift(&u, v);
            let eps = e.epsilon(&x).unwrap();
            let member = oracle.contains(&x).unwrap();
            assert_eq!(eps == 1, member, "{} x = {:?}", e.spec_string(), x);
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn epsilon_matches_norm_enumeration_odd_p() {
    for field in ["Qp:p=3,prec=12", "Qp:p=5,prec=12", "Fq:p=3,f=1,prec=12", "Fq:p=3,f=2,prec=12"] {
        let f = parse_field(field).unwrap();
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            check(&QuadExt::canonical(&f, kind).unwrap(), 2);
        }
    }
}

#[test]
fn epsilon_matches_norm_enumeration_dyadic() {
    for field in ["Qp:p=2,prec=16", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=16"] {
        let f = parse_field(field).unwrap();
        for kind in [ExtKind::Unramified, ExtKind::Ramified] {
            check(&QuadExt::canonical(&f, kind).unwrap(), 4);
        }
    }
}

#[test]
fn epsilon_matches_for_deeper_char2_conductor() {
    let f = parse_field("Fq:p=2,f=1,prec=16").unwrap();
    for s in ["ext:t=t^2,d=t", "ext:t=t,d=t+t^2", "ext:t=t^3,d=t"] {
        let e = QuadExt::parse(&f, s).unwrap();
        assert_eq!(e.kind(), ExtKind::Ramified);
        check(&e, 7);
    }
    let q2 = parse_field("Qp:p=2,prec=16").unwrap();
    for s in ["ext:t=0,d=-3", "ext:t=0,d=-6", "ext:t=0,d=2", "ext:t=2,d=-1"] {
        if let Ok(e) = QuadExt::parse(&q2, s) {
            check(&e, 4);
        }
    }
}
