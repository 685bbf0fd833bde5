mod common;

use common::*;
use proptest::prelude::*;
use qtrace::verify::{run_all, CheckParams};

proptest! {
    #[test]
    fn series_ring_laws((a, b, c) in series_triple()) {
        ring_laws(&a, &b, &c)?;
    }

    #[test]
    fn rationals_form_a_field(x in rational(), y in rational(), z in rational()) {
        rational_field_laws(&x, &y, &z)?;
    }

    #[test]
    fn series_exp_log_roundtrip(a in series_without_constant()) {
        exp_log_roundtrip(&a)?;
    }

    #[test]
    fn q_derivative_is_a_derivation((a, b, _) in series_triple()) {
        leibniz(&a, &b)?;
    }

    #[test]
    fn w_exp_log_roundtrip_holds(a in w_series()) {
        w_exp_log_roundtrip(&a)?;
    }

    #[test]
    fn cycle_index_identity(x in prop::collection::vec(rational(), 1..=8)) {
        cycle_index(&x)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn multinomial_divides(parts in prop::collection::vec(1u64..=40, 1..=6)) {
        multinomial_divisibility(&parts)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn injected_faults_are_localized(f in fault()) {
        fault_is_localized(&f)?;
    }
}

#[test]
fn rank_counts_symmetric_and_sum_to_p() {
    rank_count_identities(30).unwrap();
}

#[test]
fn pentagonal_oracle_matches_known_values() {
    let p = partition_numbers(30);
    assert_eq!(&p[..11], &[1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    assert_eq!(p[30], 5604);
}

#[test]
fn reports_are_deterministic() {
    let params = CheckParams::default();
    let strip = |rs: Vec<_>| -> Vec<_> {
        rs.into_iter()
            .map(|r: Result<qtrace::verify::CheckReport, _>| r.unwrap().without_timing())
            .collect()
    };
    assert_eq!(strip(run_all(&params)), strip(run_all(&params)));
}
