use std::path::{Path, PathBuf};
use std::process::Command;

use stochprod::generate::{GenerateParams, Preset};
use stochprod::report::{parse_report, ExitStatus};
use stochprod::stochastic::Tolerances;
use stochprod_cli::commands::{
    cmd_analyze, cmd_certify, cmd_generate, cmd_simulate, cmd_validate, InitialVector, Output,
    SimulateOptions,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn value<'a>(kv: &'a [(String, String, String)], section: &str, key: &str) -> Option<&'a str> {
    kv.iter()
        .find(|(s, k, _)| s == section && k == key)
        .map(|(_, _, v)| v.as_str())
}

fn values<'a>(kv: &'a [(String, String, String)], section: &str, key: &str) -> Vec<&'a str> {
    kv.iter()
        .filter(|(s, k, _)| s == section && k == key)
        .map(|(_, _, v)| v.as_str())
        .collect()
}

fn stochprod(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stochprod"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exited"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn simulate(path: &Path, x0: Option<&str>, epsilon: f64) -> Output {
    cmd_simulate(
        path,
        &tol(),
        &SimulateOptions {
            x0: x0.map(|s| InitialVector::Inline(s.to_string())),
            epsilon,
            csv: None,
        },
    )
}

#[test]
fn validate_reports_length_and_alpha() {
    let out = cmd_validate(&fixture("three_valid.txt"), &tol());
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "input", "n"), Some("3"));
    assert_eq!(value(&kv, "input", "length"), Some("3"));
    assert_eq!(value(&kv, "input", "alpha"), Some("0.2"));
}

#[test]
fn validate_names_record_and_row() {
    let out = cmd_validate(&fixture("bad_row_sum.txt"), &tol());
    assert_eq!(out.status, ExitStatus::InputError);
    assert!(out.stderr.contains("record 2: row 2"), "{}", out.stderr);
    assert!(out.stdout.is_empty());
}

#[test]
fn validate_rejects_empty_body() {
    let out = cmd_validate(&fixture("empty_body.txt"), &tol());
    assert_eq!(out.status, ExitStatus::InputError);
    assert!(out.stderr.contains("no matrices"));
}

#[test]
fn validate_missing_file_is_input_error() {
    let out = cmd_validate(&fixture("does_not_exist.txt"), &tol());
    assert_eq!(out.status, ExitStatus::InputError);
}

#[test]
fn analyze_lazy_walk_holds_with_full_core() {
    let out = cmd_analyze(&fixture("lazy_walk.txt"), &tol(), false);
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "hypotheses", "verdict"), Some("all-conditions-hold"));
    let core = value(&kv, "hypotheses", "core").unwrap();
    assert!(core.contains("1->1") && core.contains("2->2"));
}

#[test]
fn analyze_alternating_swap_has_no_core() {
    let out = cmd_analyze(&fixture("alternating_swap.txt"), &tol(), false);
    assert_eq!(out.status, ExitStatus::Violation);
    let kv = parse_report(&out.stdout);
    let violations = values(&kv, "hypotheses", "violation");
    assert_eq!(violations, vec!["condition 4 no-aperiodic-core nodes=1,2"]);
}

#[test]
fn analyze_triangular_factor_cites_its_index() {
    let out = cmd_analyze(&fixture("triangular.txt"), &tol(), false);
    assert_eq!(out.status, ExitStatus::Violation);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "hypotheses", "reducibility_failures"), Some("3"));
    assert_eq!(
        values(&kv, "hypotheses", "violation"),
        vec!["condition 3 not-completely-reducible indices=3"]
    );
}

#[test]
fn analyze_all_starts_checks_every_index() {
    let out = cmd_analyze(&fixture("lazy_walk.txt"), &tol(), true);
    let kv = parse_report(&out.stdout);
    let ep = value(&kv, "hypotheses", "eventual_positivity").unwrap();
    assert_eq!(ep.split(' ').count(), 60);
    assert!(ep.starts_with("1:1 2:2"));
}

#[test]
fn certify_rank_one_matches_closed_form() {
    let out = cmd_certify(&fixture("rank_one.txt"), &tol(), None);
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "certificate", "status"), Some("issued"));
    assert_eq!(value(&kv, "certificate", "contraction"), Some("0.96875"));
    assert_eq!(value(&kv, "certificate", "measured_seminorm"), Some("0"));
    assert_eq!(value(&kv, "certificate", "saturation_index"), Some("1"));
    assert_eq!(value(&kv, "certificate", "wielandt"), Some("2"));
}

#[test]
fn certify_refuses_alternating_swap() {
    let out = cmd_certify(&fixture("alternating_swap.txt"), &tol(), None);
    assert_eq!(out.status, ExitStatus::Violation);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "certificate", "status"), Some("refused"));
}

#[test]
fn certify_identity_exhausts_horizon() {
    let out = cmd_certify(&fixture("identity.txt"), &tol(), None);
    assert_eq!(out.status, ExitStatus::HorizonExhausted);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "certificate", "status"), Some("not-reached"));
}

#[test]
fn certify_alpha_override_must_not_exceed_minimum() {
    let out = cmd_certify(&fixture("rank_one.txt"), &tol(), Some(0.6));
    assert_eq!(out.status, ExitStatus::InputError);
    let out = cmd_certify(&fixture("rank_one.txt"), &tol(), Some(0.25));
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "certificate", "alpha"), Some("0.25"));
}

#[test]
fn simulate_lazy_walk_stops_at_31() {
    let out = simulate(&fixture("lazy_walk.txt"), None, 1e-3);
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "trajectory", "reached"), Some("31"));
    assert_eq!(values(&kv, "trajectory", "point").len(), 32);
    assert_eq!(value(&kv, "trajectory", "consensus_row"), Some("0.5 0.5"));
}

#[test]
fn simulate_constant_vector_stops_immediately() {
    let out = simulate(&fixture("lazy_walk.txt"), Some("2,2"), 1e-6);
    assert_eq!(out.status, ExitStatus::Success);
    let kv = parse_report(&out.stdout);
    assert_eq!(value(&kv, "trajectory", "reached"), Some("0"));
    assert_eq!(values(&kv, "trajectory", "point"), vec!["0 1 0"]);
}

#[test]
fn simulate_alternating_swap_exhausts_horizon() {
    let out = simulate(&fixture("alternating_swap.txt"), Some("-1 1"), 1e-6);
    assert_eq!(out.status, ExitStatus::HorizonExhausted);
    let kv = parse_report(&out.stdout);
    let points = values(&kv, "trajectory", "point");
    assert_eq!(points.len(), 11);
    for (k, p) in points.iter().enumerate() {
        assert_eq!(*p, format!("{k} 1 1"));
    }
}

#[test]
fn simulate_rejects_wrong_dimension() {
    let out = simulate(&fixture("lazy_walk.txt"), Some("1,2,3"), 1e-6);
    assert_eq!(out.status, ExitStatus::InputError);
    assert!(out.stderr.contains("dimension mismatch"), "{}", out.stderr);
}

#[test]
fn simulate_writes_csv_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("plot.csv");
    let out = cmd_simulate(
        &fixture("rank_one.txt"),
        &tol(),
        &SimulateOptions {
            x0: Some(InitialVector::Inline("0,1".into())),
            epsilon: 1e-9,
            csv: Some(csv.clone()),
        },
    );
    assert_eq!(out.status, ExitStatus::Success);
    let table = std::fs::read_to_string(csv).unwrap();
    assert_eq!(table, "k,seminorm,disagreement\n0,1,0.5\n1,0,0\n");
}

#[test]
fn simulate_reads_vector_file() {
    let dir = tempfile::tempdir().unwrap();
    let x0 = dir.path().join("x0.txt");
    std::fs::write(&x0, "# start\n0\n1\n").unwrap();
    let out = cmd_simulate(
        &fixture("rank_one.txt"),
        &tol(),
        &SimulateOptions {
            x0: Some(InitialVector::File(x0)),
            epsilon: 1e-9,
            csv: None,
        },
    );
    assert_eq!(out.status, ExitStatus::Success);
}

#[test]
fn generate_then_validate_round_trips_for_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    for preset in Preset::ALL {
        for n in [2, 3, 4] {
            if preset == Preset::PeriodicCounterexample && n % 2 == 1 {
                continue;
            }
            let params = GenerateParams {
                preset,
                n,
                length: preset.min_length(n) + 2,
                alpha: 1.0 / (2 * n) as f64,
                seed: 7,
            };
            let path = dir.path().join(format!("{preset}-{n}.txt"));
            let out = cmd_generate(&params, Some(&path));
            assert_eq!(out.status, ExitStatus::Success, "{}", out.stderr);
            let v = cmd_validate(&path, &tol());
            assert_eq!(v.status, ExitStatus::Success, "{preset} n={n}: {}", v.stderr);
            let expected = match preset {
                Preset::PeriodicCounterexample => ExitStatus::Violation,
                _ => ExitStatus::Success,
            };
            assert_eq!(cmd_analyze(&path, &tol(), false).status, expected, "{preset} n={n}");
        }
    }
}

#[test]
fn generate_is_byte_identical_for_equal_seeds() {
    let params = GenerateParams {
        preset: Preset::CycleCore,
        n: 4,
        length: 12,
        alpha: 0.1,
        seed: 99,
    };
    let a = cmd_generate(&params, None).stdout;
    let b = cmd_generate(&params, None).stdout;
    assert_eq!(a, b);
    assert!(a.starts_with("n=4\n# preset: cycle-core\n"));
}

#[test]
fn generate_rejects_bad_alpha() {
    let params = GenerateParams {
        preset: Preset::PositiveDiagonal,
        n: 3,
        length: 5,
        alpha: 0.5,
        seed: 0,
    };
    assert_eq!(cmd_generate(&params, None).status, ExitStatus::InputError);
}

#[test]
fn reports_are_stable_across_runs() {
    for path in ["lazy_walk.txt", "alternating_swap.txt", "triangular.txt", "rank_one.txt"] {
        let a = cmd_certify(&fixture(path), &tol(), None);
        let b = cmd_certify(&fixture(path), &tol(), None);
        assert_eq!(a, b);
    }
}

#[test]
fn binary_exit_codes_follow_contract() {
    let path = |name: &str| fixture(name).display().to_string();
    assert_eq!(stochprod(&["validate", &path("three_valid.txt")]).0, 0);
    assert_eq!(stochprod(&["analyze", &path("alternating_swap.txt")]).0, 1);
    let (code, stdout, stderr) = stochprod(&["validate", &path("bad_row_sum.txt")]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty() && stderr.contains("record 2"));
    assert_eq!(stochprod(&["certify", &path("identity.txt")]).0, 3);
    assert_eq!(
        stochprod(&["simulate", &path("lazy_walk.txt"), "--x0", "-1,1", "--epsilon", "1e-3"]).0,
        0
    );
    assert_eq!(stochprod(&["no-such-command"]).0, 2);
    let (code, stdout, _) = stochprod(&[
        "generate",
        "--preset",
        "periodic-counterexample",
        "--n",
        "2",
        "--length",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "n=2\n# preset: periodic-counterexample\n# length: 2\n# alpha: 0.25\n# seed: 0\n\n0 1\n1 0\n\n0 1\n1 0\n");
}
