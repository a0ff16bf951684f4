use loopforms_cli::config::{RunConfig, Suite};
use loopforms_cli::report::VerificationReport;
use loopforms_cli::run_suite;

fn residual_bits(report: &VerificationReport) -> Vec<(String, u64)> {
    report.checks.iter().map(|c| (c.name.clone(), c.residual.to_bits())).collect()
}

#[test]
fn same_config_and_seed_give_bitwise_identical_residuals() {
    let config = RunConfig { seed: 4242, ..RunConfig::default() };
    let (first, second) = (run_suite(&config).unwrap(), run_suite(&config).unwrap());
    assert_eq!(residual_bits(&first), residual_bits(&second));
    assert!(first.checks.len() >= 30);
}

#[test]
fn a_suite_alone_matches_its_part_of_all() {
    let all = run_suite(&RunConfig { seed: 11, ..RunConfig::default() }).unwrap();
    let alone = run_suite(&RunConfig { seed: 11, suite: Suite::Centralext, ..RunConfig::default() }).unwrap();
    let part: Vec<_> = residual_bits(&all).into_iter().filter(|(name, _)| name.starts_with("centralext.")).collect();
    assert_eq!(residual_bits(&alone), part);
}

#[test]
fn checks_are_sorted_and_pass_on_defaults() {
    let report = run_suite(&RunConfig::default()).unwrap();
    let names: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    let failures: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(report.checks.iter().all(|c| c.pass == (c.residual <= c.tolerance)));
}

#[test]
fn path_fibration_suite_on_defaults() {
    let report = run_suite(&RunConfig { suite: Suite::Pathfib, ..RunConfig::default() }).unwrap();
    let identity = report.checks.iter().find(|c| c.name == "pathfib.coefficient_identity").unwrap();
    assert_eq!((identity.residual, identity.tolerance, identity.pass), (0.0, 0.0, true));
    assert!(report.all_passed());
    assert!(report.checks.iter().all(|c| c.name.starts_with("pathfib.")));
}

#[test]
fn a_tolerance_override_can_fail_a_check() {
    let config = RunConfig { suite: Suite::Loops, tolerances: [("loops.holonomy_round_trip".to_string(), 0.0)].into(), ..RunConfig::default() };
    let report = run_suite(&config).unwrap();
    let check = report.checks.iter().find(|c| c.name == "loops.holonomy_round_trip").unwrap();
    assert!(!check.pass && check.tolerance == 0.0);
    assert!(!report.all_passed());
}

#[test]
fn the_cubic_closedness_check_needs_rank_three() {
    let names = |rank| {
        let report = run_suite(&RunConfig { suite: Suite::String, rank, ..RunConfig::default() }).unwrap();
        assert!(report.all_passed());
        report.checks.iter().map(|c| c.name.clone()).collect::<Vec<_>>()
    };
    assert!(!names(2).contains(&"string.closed_k3".to_string()));
    assert!(names(3).contains(&"string.closed_k3".to_string()));
}
