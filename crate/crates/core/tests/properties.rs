use proptest::prelude::*;

use sl2_endoscopy::arith::{parse_field, LocalElem, LocalField};
use sl2_endoscopy::matrix::{embed, Mat2, TestFunction};
use sl2_endoscopy::quad_ext::{ExtKind, QuadExt};

const FIELDS: [&str; 5] = ["Qp:p=3,prec=14", "Qp:p=5,prec=12", "Qp:p=2,prec=16", "Fq:p=2,f=1,prec=16", "Fq:p=2,f=2,prec=14"];

fn field(i: usize) -> LocalField {
    parse_field(FIELDS[i % FIELDS.len()]).unwrap()
}

/// `(val, lead, tail)` turned into `ϖ^val (lead + ...)` with `lead ≠ 0`.
fn elem(f: &LocalField, (val, lead, tail): &(i64, u32, Vec<u32>)) -> LocalElem {
    let q = f.q();
    let mut digits = vec![1 + lead % (q - 1)];
    digits.extend(tail.iter().map(|d| d % q));
    f.from_digits(*val, digits, None)
}

fn raw() -> impl Strategy<Value = (i64, u32, Vec<u32>)> {
    (-2i64..3, 0u32..64, prop::collection::vec(0u32..64, 0..5))
}

fn unit_raw() -> impl Strategy<Value = (i64, u32, Vec<u32>)> {
    (Just(0i64), 0u32..64, prop::collection::vec(0u32..64, 0..5))
}

fn integral_raw() -> impl Strategy<Value = (i64, u32, Vec<u32>)> {
    (0i64..3, 0u32..64, prop::collection::vec(0u32..64, 0..5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_ultrametric(i in 0usize..5, x in raw(), y in raw()) {
        let f = field(i);
        let (a, b) = (elem(&f, &x), elem(&f, &y));
        let s = f.add(&a, &b);
        let (va, vb) = (a.val().unwrap(), b.val().unwrap());
        if let Some(vs) = s.val() {
            prop_assert!(vs >= va.min(vb));
            if va != vb {
                prop_assert_eq!(vs, va.min(vb));
            }
        }
        prop_assert_eq!(f.mul(&a, &b).val(), Some(va + vb));
    }

    #[test]
    fn epsilon_is_multiplicative(i in 0usize..5, ramified in any::<bool>(), x in raw(), y in raw()) {
        let f = field(i);
        let kind = if ramified { ExtKind::Ramified } else { ExtKind::Unramified };
        let e = QuadExt::canonical(&f, kind).unwrap();
        let (a, b) = (elem(&f, &x), elem(&f, &y));
        let lhs = e.epsilon(&f.mul(&a, &b)).unwrap();
        prop_assert_eq!(lhs, e.epsilon(&a).unwrap() * e.epsilon(&b).unwrap());
    }

    #[test]
    fn epsilon_kills_norms(i in 0usize..5, ramified in any::<bool>(), x in raw(), y in raw()) {
        let f = field(i);
        let kind = if ramified { ExtKind::Ramified } else { ExtKind::Unramified };
        let e = QuadExt::canonical(&f, kind).unwrap();
        let z = e.elem(elem(&f, &x), elem(&f, &y));
        prop_assert_eq!(e.epsilon(&e.norm(&z)).unwrap(), 1);
    }

    #[test]
    fn embedding_is_multiplicative(i in 0usize..5, ramified in any::<bool>(), xs in prop::array::uniform4(integral_raw())) {
        let f = field(i);
        let kind = if ramified { ExtKind::Ramified } else { ExtKind::Unramified };
        let e = QuadExt::canonical(&f, kind).unwrap();
        let z = e.elem(elem(&f, &xs[0]), elem(&f, &xs[1]));
        let w = e.elem(elem(&f, &xs[2]), elem(&f, &xs[3]));
        let lhs = embed(&e, &e.mul(&z, &w));
        let rhs = embed(&e, &z).mul(&f, &embed(&e, &w));
        for (a, b) in lhs.entries().iter().zip(rhs.entries()) {
            prop_assert!(f.eq(a, b));
        }
        prop_assert!(f.eq(&lhs.det(&f), &e.norm(&e.mul(&z, &w))));
    }

    #[test]
    fn hecke_functions_are_bi_k_invariant(
        i in 0usize..5,
        r in 0u32..3,
        u in unit_raw(),
        x in integral_raw(),
        y in integral_raw(),
    ) {
        let f = field(i);
        let tf = TestFunction::parse("0:1,1:-1/2,2:3").unwrap();
        let cell = Mat2::diag(&f, f.pi_pow(r as i64), f.pi_pow(-(r as i64)));
        let (u, x, y) = (elem(&f, &u), elem(&f, &x), elem(&f, &y));
        let upper = Mat2::new(f.one(), x, f.zero(), f.one());
        let lower = Mat2::new(f.one(), f.zero(), y, f.one());
        let k = upper.mul(&f, &lower).mul(&f, &Mat2::diag(&f, u, f.one()));
        let m = k.mul(&f, &cell).mul(&f, &lower);
        prop_assert_eq!(tf.eval(&f, &m).unwrap(), tf.coeff(r));
        prop_assert_eq!(tf.eval(&f, &m.conjugate_by(&f, &k).unwrap()).unwrap(), tf.coeff(r));
    }
}
