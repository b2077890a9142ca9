//! End-to-end tests driving the compiled `ratk` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ratk::logic::{equivalent, parse_formula};

fn ratk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratk"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is text")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is text")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        stdout(out),
        stderr(out)
    );
}

/// Parses both sides and compares them over the union of their atoms.
fn assert_equivalent(got: &str, expected: &str) {
    let got_f = parse_formula(got.trim()).unwrap_or_else(|e| panic!("`{got}` reparses: {e}"));
    let want_f = parse_formula(expected).expect("the expected formula parses");
    let mut universe = got_f.atoms();
    universe.extend(want_f.atoms());
    let universe: Vec<String> = universe.into_iter().collect();
    assert!(
        equivalent(&got_f, &want_f, &universe),
        "`{}` is not equivalent to `{expected}`",
        got.trim()
    );
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).expect("test files are writable");
    path
}

const GOOUT: &str = "\
fluents: Outside Umbrella Dry Rain
action Go-out {
  causes Outside ;
  if Rain & -Umbrella causes -Dry
}
";

const TOGGLE: &str = "\
fluents: U_a U_b
actions: T_a T_b
ssa U_a: (-U_a & x = T_a) | (U_a & x != T_a)
ssa U_b: (-U_b & x = T_b) | (U_b & x != T_b)
";

const TURKEY: &str = "\
fluents: Loaded Alive
action load { causes Loaded }
action shoot {
  if Loaded causes -Alive ;
  if Loaded causes -Loaded
}
action wait { }
";

#[test]
fn progression_keeps_dryness_under_the_umbrella() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "goout.dom", GOOUT);
    let out = ratk(&[
        "progress",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--belief",
        "Dry & Umbrella",
        "--action",
        "Go-out",
    ]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "Outside & Umbrella & Dry");

    // The canonical form is full cubes over sorted atoms, byte-stable.
    let out = ratk(&[
        "progress",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--belief",
        "Dry & Umbrella",
        "--action",
        "Go-out",
        "--canonical",
    ]);
    assert_code(&out, 0);
    assert_eq!(
        stdout(&out),
        "Dry & Outside & -Rain & Umbrella | Dry & Outside & Rain & Umbrella\n"
    );
}

#[test]
fn progression_without_umbrella_leaves_dryness_open() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "goout.dom", GOOUT);
    let out = ratk(&[
        "progress",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--belief",
        "-Umbrella",
        "--action",
        "Go-out",
        "--canonical",
    ]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "Outside & -Umbrella & (Rain -> -Dry)");
}

#[test]
fn weak_regression_asks_for_the_umbrella() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "goout.dom", GOOUT);
    let out = ratk(&[
        "regress-weak",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--goal",
        "Dry & Rain",
        "--action",
        "Go-out",
    ]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "Umbrella & Rain & Dry");
}

#[test]
fn ssa_regression_cancels_the_double_toggle() {
    let dir = tempfile::tempdir().expect("tempdir");
    let th = write_file(dir.path(), "toggle.ssa", TOGGLE);
    let theory = th.to_str().expect("utf8 path");
    let out = ratk(&[
        "regress-ssa",
        "--theory",
        theory,
        "--formula",
        "U_a after T_a, T_a",
    ]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "U_a");

    let out = ratk(&["assignments", "--theory", theory, "--action", "T_a"]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "{ U_a := -U_a }");

    let out = ratk(&[
        "valid",
        "--theory",
        theory,
        "--formula",
        "U_a -> [T_a][T_a] U_a",
    ]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "valid");

    let out = ratk(&[
        "valid",
        "--theory",
        theory,
        "--formula",
        "U_a -> [T_a] U_a",
    ]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "not valid");
}

#[test]
fn every_update_operator_drops_only_the_banana() {
    for op in ["pma", "card", "dep"] {
        let out = ratk(&[
            "update",
            "--op",
            op,
            "--base",
            "(banana & -apple) | (apple & -banana)",
            "--by",
            "-banana",
        ]);
        assert_code(&out, 0);
        assert_equivalent(&stdout(&out), "-banana");
    }
}

#[test]
fn compiled_transition_formulas_use_timed_atoms() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(
        dir.path(),
        "flip.dom",
        "fluents: p q\naction flip { if q causes p ; if -q causes -p }\n",
    );
    let out = ratk(&[
        "compile",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--action",
        "flip",
        "--canonical",
    ]);
    assert_code(&out, 0);
    // Timed atoms print as `p@t` / `p@t1`; renaming them to plain
    // identifiers turns the output back into a parseable formula.
    let renamed = stdout(&out).replace("@t1", "_next").replace("@t", "_now");
    assert_equivalent(
        &renamed,
        "(q_now <-> q_next) & (q_now -> p_next) & (-q_now -> -p_next)",
    );
}

#[test]
fn scenario_monitoring_tracks_the_hunt() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let scn = write_file(
        dir.path(),
        "hunt.scn",
        "horizon: 2\ninit: Alive & -Loaded\ndo 0: load\ndo 1: shoot\n",
    );
    let out = ratk(&[
        "scenario",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--scenario",
        scn.to_str().expect("utf8 path"),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 3);
    assert_equivalent(lines[0].strip_prefix("t=0: ").expect("time label"), "Alive & -Loaded");
    assert_equivalent(lines[1].strip_prefix("t=1: ").expect("time label"), "Alive & Loaded");
    assert_equivalent(lines[2].strip_prefix("t=2: ").expect("time label"), "-Alive & -Loaded");
}

#[test]
fn monitoring_reports_the_first_inconsistent_time_point() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let scn = write_file(
        dir.path(),
        "mystery.scn",
        "horizon: 1\ninit: Alive & -Loaded\ndo 0: wait\nobserve 1: -Alive\n",
    );
    let out = ratk(&[
        "scenario",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--scenario",
        scn.to_str().expect("utf8 path"),
    ]);
    assert_code(&out, 0);
    assert!(
        stdout(&out).starts_with("inconsistent at t=1"),
        "got: {}",
        stdout(&out)
    );
}

#[test]
fn extrapolation_inserts_the_missing_load() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let scn = write_file(
        dir.path(),
        "mystery.scn",
        "horizon: 2\ninit: Alive & -Loaded\ndo 1: shoot\nobserve 2: -Alive\n",
    );
    let out = ratk(&[
        "extrapolate",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--scenario",
        scn.to_str().expect("utf8 path"),
    ]);
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(
        text.starts_with("explanation 1: insert load@0"),
        "got: {text}"
    );

    // Restricting the exogenous vocabulary can remove every explanation.
    let out = ratk(&[
        "extrapolate",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--scenario",
        scn.to_str().expect("utf8 path"),
        "--exo",
        "wait",
    ]);
    assert_code(&out, 1);
    assert!(stderr(&out).contains("NoExplanation"), "got: {}", stderr(&out));
}

#[test]
fn filtering_and_abduction_explain_the_observation() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let domain = dom.to_str().expect("utf8 path");
    let out = ratk(&[
        "filter",
        "--domain",
        domain,
        "--belief",
        "Alive",
        "--action",
        "shoot",
        "--observe",
        "-Alive",
    ]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "-Alive & -Loaded");

    // Shooting an unloaded gun cannot explain the death.
    let out = ratk(&[
        "filter",
        "--domain",
        domain,
        "--belief",
        "Alive & -Loaded",
        "--action",
        "shoot",
        "--observe",
        "-Alive",
    ]);
    assert_code(&out, 1);
    assert!(stderr(&out).contains("Inconsistent"), "got: {}", stderr(&out));

    let out = ratk(&[
        "abduce",
        "--domain",
        domain,
        "--before",
        "Alive & Loaded",
        "--after",
        "-Alive & -Loaded",
    ]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "shoot");
}

#[test]
fn chain_and_network_stepping_match_the_closed_forms() {
    let dir = tempfile::tempdir().expect("tempdir");
    let mat = write_file(
        dir.path(),
        "shutdown.mat",
        "fluents: on\nrow on: on 0.1, -on 0.9\nrow -on: -on 1\n",
    );
    let matrix = mat.to_str().expect("utf8 path");
    let out = ratk(&["chain", "--matrix", matrix, "--belief", "on: 1"]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "-on: 0.9\non: 0.1");

    let out = ratk(&["chain", "--matrix", matrix, "--belief", "on: 1", "--steps", "2"]);
    assert_code(&out, 0);
    let text = stdout(&out);
    let on_mass: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("on: "))
        .expect("a mass for `on`")
        .parse()
        .expect("masses parse");
    assert!((on_mass - 0.01).abs() < 1e-12);

    let net = write_file(
        dir.path(),
        "lamp.dbn",
        "dbn {\n  node Lit parents: Lit@t cpt: 0.05 0.95\n}\n",
    );
    let out = ratk(&[
        "dbn-step",
        "--network",
        net.to_str().expect("utf8 path"),
        "--belief",
        "Lit: 1",
    ]);
    assert_code(&out, 0);
    assert!(stdout(&out).contains("Lit: 0.95"), "got: {}", stdout(&out));
}

#[test]
fn postulate_report_lists_every_postulate_once() {
    let out = ratk(&["check-postulates", "--op", "pma", "--fluents", "2"]);
    assert_code(&out, 0);
    let text = stdout(&out);
    assert!(text.starts_with("operator pma over a, b (exhaustive)"));
    for id in ["U1", "U2", "U3", "U4", "U5", "U6", "U7", "U8", "U9"] {
        assert!(text.contains(&format!("{id} holds")), "{id} in: {text}");
    }
    assert!(!text.contains("fails"), "got: {text}");
}

#[test]
fn structured_records_are_json_with_verb_and_status() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "goout.dom", GOOUT);
    let out = ratk(&[
        "progress",
        "--domain",
        dom.to_str().expect("utf8 path"),
        "--belief",
        "Dry & Umbrella",
        "--action",
        "Go-out",
        "--format",
        "structured",
    ]);
    assert_code(&out, 0);
    let rec: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("one JSON record");
    assert_eq!(rec["verb"], "progress");
    assert_eq!(rec["status"], "ok");
    assert_equivalent(rec["payload"].as_str().expect("a formula payload"), "Outside & Umbrella & Dry");

    let out = ratk(&[
        "update",
        "--op",
        "pma",
        "--base",
        "a &",
        "--by",
        "b",
        "--format",
        "structured",
    ]);
    assert_code(&out, 2);
    let rec: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("one JSON record");
    assert_eq!(rec["status"], "error");
    assert_eq!(rec["error"]["kind"], "SyntaxError");
}

#[test]
fn identical_invocations_print_identical_bytes() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let domain = dom.to_str().expect("utf8 path");
    let args = [
        "regress-strong",
        "--domain",
        domain,
        "--goal",
        "-Alive",
        "--action",
        "shoot",
        "--canonical",
        "--format",
        "structured",
    ];
    let first = ratk(&args);
    let second = ratk(&args);
    assert_code(&first, 0);
    assert_eq!(first.stdout, second.stdout);

    let sampled = [
        "check-postulates",
        "--op",
        "card",
        "--fluents",
        "3",
        "--samples",
        "40",
        "--seed",
        "11",
    ];
    let first = ratk(&sampled);
    let second = ratk(&sampled);
    assert_code(&first, 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn usage_problems_exit_with_two_and_evaluation_dead_ends_with_one() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(
        dir.path(),
        "guard.dom",
        "fluents: on standby\naction boot { causes on }\nexecutable boot if -on & standby\n",
    );
    let domain = dom.to_str().expect("utf8 path");

    let out = ratk(&["progress", "--domain", domain, "--belief", "on &", "--action", "boot"]);
    assert_code(&out, 2);

    let out = ratk(&["progress", "--domain", domain, "--belief", "on", "--action", "reboot"]);
    assert_code(&out, 2);

    let out = ratk(&["progress", "--domain", domain, "--belief", "on & -standby", "--action", "boot"]);
    assert_code(&out, 1);
    assert!(stderr(&out).contains("Inexecutable"));

    let out = ratk(&["progress", "--domain", "/does/not/exist.dom", "--belief", "on", "--action", "boot"]);
    assert_code(&out, 2);

    let out = ratk(&["no-such-verb"]);
    assert_code(&out, 2);
}

#[test]
fn scenario_files_are_validated_before_running() {
    let dir = tempfile::tempdir().expect("tempdir");
    let dom = write_file(dir.path(), "turkey.dom", TURKEY);
    let domain = dom.to_str().expect("utf8 path");

    let late = write_file(
        dir.path(),
        "late.scn",
        "horizon: 1\ninit: Alive\ndo 3: load\n",
    );
    let out = ratk(&["scenario", "--domain", domain, "--scenario", late.to_str().expect("utf8 path")]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("outside the horizon"), "got: {}", stderr(&out));

    let no_init = write_file(dir.path(), "bare.scn", "horizon: 1\n");
    let out = ratk(&["scenario", "--domain", domain, "--scenario", no_init.to_str().expect("utf8 path")]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("init"), "got: {}", stderr(&out));
}

#[test]
fn matrix_files_reject_overlapping_rows_and_bad_mass() {
    let dir = tempfile::tempdir().expect("tempdir");
    let twice = write_file(
        dir.path(),
        "twice.mat",
        "fluents: on\nrow on: on 1\nrow true: on 1\n",
    );
    let out = ratk(&["chain", "--matrix", twice.to_str().expect("utf8 path"), "--belief", "on: 1"]);
    assert_code(&out, 2);
    assert!(stderr(&out).contains("two rows"), "got: {}", stderr(&out));

    let heavy = write_file(
        dir.path(),
        "heavy.mat",
        "fluents: on\nrow on: on 0.7, -on 0.6\nrow -on: -on 1\n",
    );
    let out = ratk(&["chain", "--matrix", heavy.to_str().expect("utf8 path"), "--belief", "on: 1"]);
    assert_code(&out, 2);

    // A state with no row is inexecutable once it carries mass.
    let partial = write_file(dir.path(), "partial.mat", "fluents: on\nrow on: -on 1\n");
    let out = ratk(&[
        "chain",
        "--matrix",
        partial.to_str().expect("utf8 path"),
        "--belief",
        "on: 1",
        "--steps",
        "2",
    ]);
    assert_code(&out, 1);
    assert!(stderr(&out).contains("Inexecutable"), "got: {}", stderr(&out));
}

#[test]
fn modularity_verb_reports_the_implied_static_law() {
    let dir = tempfile::tempdir().expect("tempdir");
    let laws = write_file(
        dir.path(),
        "broken.laws",
        "law P1 -> [A] Q\nlaw P2 -> [A] -Q\nexecutable A if true\n",
    );
    let out = ratk(&["modularity", "--laws", laws.to_str().expect("utf8 path")]);
    assert_code(&out, 0);
    assert_equivalent(&stdout(&out), "-(P1 & P2)");

    let fine = write_file(
        dir.path(),
        "fine.laws",
        "law P1 -> [A] Q\nlaw P2 -> [A] -Q\nexecutable A if -(P1 & P2)\nstatic: -(P1 & P2)\n",
    );
    let out = ratk(&["modularity", "--laws", fine.to_str().expect("utf8 path")]);
    assert_code(&out, 0);
    assert_eq!(stdout(&out).trim(), "modular");
}
