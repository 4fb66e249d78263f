use sl2_endoscopy::suite::{criteria_count, run_criterion, Verdict};

fn criterion(id: u32) {
    let r = run_criterion(id, false).expect("criterion exists");
    println!("{}", r.line());
    assert_eq!(r.verdict, Verdict::Pass, "{}", r.line());
}

macro_rules! criteria {
    ($($name:ident = $id:expr;)*) => {
        $(#[test] fn $name() { criterion($id); })*

        #[test]
        fn every_criterion_has_a_test() {
            assert_eq!([$($id),*].len(), criteria_count());
        }
    };
}

criteria! {
    c01_fundamental_lemma_unramified = 1;
    c02_fundamental_lemma_split = 2;
    c03_measure_constants = 3;
    c04_stabilization = 4;
    c05_foreign_kappa_vanishes = 5;
    c06_transfer_factor_identities = 6;
    c07_char2_kappa_germ = 7;
    c08_unipotent_inversion = 8;
    c09_character_identity = 9;
    c10_orthogonality = 10;
    c11_weyl_integration = 11;
    c12_intertwining_scalar = 12;
    c13_lambda_constraints = 13;
}
