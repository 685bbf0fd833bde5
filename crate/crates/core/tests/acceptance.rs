//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the summary lines are always shown.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use qtrace::arith::{int, rat};
use qtrace::eisenstein::{f_via_log, f_via_recursion1, f_via_recursion2};
use qtrace::relations::{default_generators, find_relations, monomial_basis, Generator, ORDER_MARGIN};
use qtrace::verify::{run_check, CheckParams};
use qtrace::{QSeries, Rational};

type Outcome = Result<String, String>;

/// Runs catalog checks at the given `(max_weight, order)` and requires all
/// of them to pass.
fn checks(list: &[(&str, usize, i64)]) -> Outcome {
    let mut done = Vec::new();
    for &(name, max_weight, order) in list {
        let params = CheckParams {
            max_weight: Some(max_weight),
            order: Some(order),
            ..CheckParams::default()
        };
        let r = run_check(name, &params).map_err(|e| format!("{name}: {e}"))?;
        if !r.passed {
            let m = r.mismatch.expect("failed check has a mismatch");
            return Err(format!(
                "{name}: {} at w^{:?} q^{}: {} vs {}",
                m.comparison, m.w_degree, m.exponent, m.left, m.right
            ));
        }
        let c = r.verified_to.comparisons;
        done.push(format!("{name} ({c} comparison{})", if c == 1 { "" } else { "s" }));
    }
    Ok(done.join(", "))
}

fn row(constant: Rational, rest: &[i64]) -> QSeries {
    let mut c = vec![constant, int(0)];
    c.extend(rest.iter().map(|&x| int(x)));
    QSeries::from_coeffs(c, 9)
}

fn criterion_1() -> Outcome {
    let table = [
        (2, row(rat(-1, 24), &[1, 3, 5, 7, 9, 10, 13])),
        (4, row(rat(1, 240), &[1, 15, 59, 139, 255, 406, 595])),
        (6, row(rat(-1, 504), &[1, 63, 635, 2827, 8199, 18550, 36043])),
        (8, row(rat(1, 480), &[1, 255, 6179, 53179, 253815, 844966, 2234875])),
    ];
    let log = f_via_log(8, 9).map_err(|e| e.to_string())?;
    let routes: [(&str, &dyn Fn(u32) -> QSeries); 3] = [
        ("logarithm", &|k| log[k as usize].clone()),
        ("linear recursion", &|k| f_via_recursion1(k, 9)),
        ("trace recursion", &|k| f_via_recursion2(k, 9)),
    ];
    for (name, f) in routes {
        for (k, expected) in &table {
            if let Some(m) = f(*k).first_mismatch(expected) {
                return Err(format!("f_{k} via {name} at q^{}: {} vs {}", m.exponent, m.left, m.right));
            }
        }
    }
    checks(&[("examples_table", 8, 9)]).map(|s| format!("table through q^8 on all three routes; {s}"))
}

fn criterion_2() -> Outcome {
    checks(&[("recursions_agree", 16, 25)])
}

fn criterion_3() -> Outcome {
    checks(&[("integrality", 16, 41)])
}

fn criterion_4() -> Outcome {
    checks(&[("d_f", 12, 20), ("d_f_examples", 4, 20)])
}

fn criterion_5() -> Outcome {
    checks(&[("rank_crank_pde", 10, 20)])
}

fn criterion_6() -> Outcome {
    checks(&[("crank_trace", 10, 20), ("crank_exp", 10, 20)])
}

fn criterion_7() -> Outcome {
    checks(&[("r_k_via_g", 14, 25), ("g_generating", 10, 20), ("fk_leading", 16, 4)])
}

fn criterion_8() -> Outcome {
    checks(&[("rank_moment_routes", 10, 25), ("crank_anomaly", 0, 26)])
}

fn criterion_9() -> Outcome {
    let gens = default_generators(12);
    let mut sizes = Vec::new();
    for w in (2..=12).step_by(2) {
        let count = monomial_basis(w, &gens).map_err(|e| e.to_string())?.len();
        let order = (count + ORDER_MARGIN) as i64;
        let r = find_relations(w, order, &gens).map_err(|e| e.to_string())?;
        if r.has_relation() {
            return Err(format!("unexpected relation at W = {w}, order {order}: {:?}", r.nullspace));
        }
        sizes.push(format!("W={w}:{count}"));
    }
    // positive controls: a redundant classical generator must be detected
    let r8 = find_relations(8, 20, &[Generator::G(4), Generator::G(8)]).map_err(|e| e.to_string())?;
    if r8.nullspace != [vec!["1".to_string(), "-120".to_string()]] {
        return Err(format!("G_8 = 120 G_4^2 not found: {:?}", r8.nullspace));
    }
    let classical = [Generator::G(4), Generator::G(6), Generator::G(12)];
    if find_relations(12, 20, &classical).map_err(|e| e.to_string())?.nullspace.len() != 1 {
        return Err("no relation among G_4^3, G_6^2, G_12".into());
    }
    for (w, extra) in [(8, 8), (12, 12)] {
        let mut g = gens.clone();
        g.push(Generator::G(extra));
        let count = monomial_basis(w, &g).map_err(|e| e.to_string())?.len();
        let r = find_relations(w, (count + ORDER_MARGIN) as i64, &g).map_err(|e| e.to_string())?;
        if r.nullspace.len() != 1 {
            return Err(format!("default generators plus G_{extra} at W = {w}: {} relations", r.nullspace.len()));
        }
    }
    Ok(format!(
        "no relation with order = monomials + {ORDER_MARGIN} ({}); controls found G_8, G_12",
        sizes.join(" ")
    ))
}

fn property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn criterion_10() -> Outcome {
    property("ring laws", 256, series_triple(), |(a, b, c)| ring_laws(&a, &b, &c))?;
    property("rational field laws", 256, (rational(), rational(), rational()), |(x, y, z)| {
        rational_field_laws(&x, &y, &z)
    })?;
    property("exp/log", 256, series_without_constant(), |a| exp_log_roundtrip(&a))?;
    property("w exp/log", 128, w_series(), |a| w_exp_log_roundtrip(&a))?;
    property("Leibniz", 256, series_triple(), |(a, b, _)| leibniz(&a, &b))?;
    property("cycle index", 128, prop::collection::vec(rational(), 1..=8), |x| cycle_index(&x))?;
    property("multinomial divisibility", 10_000, prop::collection::vec(1u64..=40, 1..=6), |p| {
        multinomial_divisibility(&p)
    })?;
    rank_count_identities(30).map_err(|e| format!("rank counts: {e}"))?;
    property("fault injection", 24, fault(), |f| fault_is_localized(&f))?;
    Ok("ring, field, exp/log, Leibniz, cycle index, 10^4 multinomial tuples, N(m,n) to n = 30, 24 localized faults".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "reference table", Duration::from_secs(5), criterion_1),
        (2, "three-route agreement", Duration::from_secs(60), criterion_2),
        (3, "integrality", Duration::from_secs(30), criterion_3),
        (4, "derivative of f_k", Duration::from_secs(60), criterion_4),
        (5, "rank-crank PDE", Duration::from_secs(60), criterion_5),
        (6, "crank identities", Duration::from_secs(30), criterion_6),
        (7, "g_l identities and leading terms", Duration::from_secs(30), criterion_7),
        (8, "route cross-validation", Duration::from_secs(60), criterion_8),
        (9, "relation search", Duration::from_secs(600), criterion_9),
        (10, "property suites", Duration::from_secs(60), criterion_10),
    ];
    let mut failed = 0;
    for (n, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget {budget:?}")),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS  {title} [{secs:.2} s] {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {title} [{secs:.2} s] {why}");
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
