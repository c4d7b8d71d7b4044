use std::path::{Path, PathBuf};

use clap::Parser;
use mgroupoid::groupoid::interchange;
use mgroupoid::io::{load_body, parse_dump, parse_report, CHRISTOFFEL_FORMAT};
use mgroupoid::uniformity::Verdict;
use mgroupoid::{ArrowId, FiniteGroup, FiniteGroupoid};

use super::{commands, dispatch, thread_count, usage_code, Cli};

/// Exit code and captured stdout; errors come back with their message in place of stdout.
fn run(args: &[&str]) -> (u8, String) {
    let cli = match Cli::try_parse_from(std::iter::once("mgroupoid").chain(args.iter().copied())) {
        Ok(cli) => cli,
        Err(e) => return (usage_code(&e), e.to_string()),
    };
    let mut out = Vec::new();
    match dispatch(cli.command, &mut out) {
        Ok(code) => (code, String::from_utf8(out).unwrap()),
        Err(f) => (f.code, f.message),
    }
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["synthesize", "--out", p(&out)];
    args.extend_from_slice(extra);
    let (code, msg) = run(&args);
    assert_eq!(code, 0, "{msg}");
    out
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn usage_errors_exit_10() {
    assert_eq!(run(&[]).0, 10);
    assert_eq!(run(&["analyze"]).0, 10);
    assert_eq!(run(&["synthesize", "--kind", "twisted", "--out", "x.toml"]).0, 10);
}

#[test]
fn missing_input_exits_11() {
    let dir = tempfile::tempdir().unwrap();
    let (code, msg) = run(&["analyze", "--input", p(&dir.path().join("nope.toml")), "--out", p(dir.path())]);
    assert_eq!(code, 11);
    assert!(msg.contains("nope.toml"));
}

#[test]
fn parse_error_reports_line_and_exits_12() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "b.toml", &["--kind", "constant", "--n", "3"]);
    let text = std::fs::read_to_string(&body).unwrap();
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, text.replace("kind = \"neo_hookean_isotropic\"", "kind = \"clay\"")).unwrap();
    let (code, msg) = run(&["analyze", "--input", p(&broken), "--out", p(&dir.path().join("o"))]);
    assert_eq!(code, 12);
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn invalid_parameter_exits_13() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "b.toml", &["--kind", "constant", "--n", "3"]);
    let text = std::fs::read_to_string(&body).unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, text.replace("mu = 1.0", "mu = -1.0")).unwrap();
    let (code, msg) = run(&["analyze", "--input", p(&bad), "--out", p(&dir.path().join("o"))]);
    assert_eq!(code, 13, "{msg}");
    assert!(msg.contains("mu"), "{msg}");
}

#[test]
fn bad_configuration_exits_16() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "b.toml", &["--kind", "constant", "--n", "3"]);
    let out = dir.path().join("o");
    assert_eq!(run(&["analyze", "--input", p(&body), "--out", p(&out), "--eps-iso=-1"]).0, 16);
}

#[test]
fn thread_count_parsing() {
    assert_eq!(thread_count(None).unwrap(), None);
    assert_eq!(thread_count(Some("3")).unwrap(), Some(3));
    assert_eq!(thread_count(Some(" 2 ")).unwrap(), Some(2));
    for bad in ["0", "-1", "many", ""] {
        assert_eq!(thread_count(Some(bad)).unwrap_err().code, commands::EXIT_CONFIG, "{bad}");
    }
}

#[test]
fn synthesized_bodies_match_their_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 4] = [
        ("constant", &["--kind", "constant", "--n", "5"]),
        ("shear", &["--kind", "implanted", "--implant", "shear-x3", "--n", "9", "--h", "0.125"]),
        ("gradient", &["--kind", "implanted", "--implant", "gradient-x2", "--n", "9", "--h", "0.125"]),
        ("fgm", &["--kind", "fgm", "--n", "5", "--h", "0.25"]),
    ];
    for (name, args) in cases {
        let body_path = synth(dir.path(), &format!("{name}.toml"), args);
        let truth = load_body(&body_path).unwrap().file.ground_truth.unwrap();
        let out = dir.path().join(name);
        let (code, stdout) = run(&["analyze", "--input", p(&body_path), "--out", p(&out)]);
        let expected_code = match truth.verdict {
            Verdict::Uniform => 0,
            Verdict::NonUniform => 2,
            Verdict::Indeterminate => 3,
        };
        assert_eq!(code, expected_code, "{name}: {stdout}");
        let report = parse_report(&std::fs::read_to_string(out.join("report.toml")).unwrap()).unwrap();
        assert_eq!(report.verdict, truth.verdict, "{name}");
        assert_eq!(Some(report.symmetry.continuous_dimension), truth.symmetry_dimension, "{name}");
        match (truth.homogeneity, &report.connection) {
            (Some(h), Some(c)) => {
                assert_eq!(c.verdict, h, "{name}");
                let max = truth.torsion_max.unwrap();
                assert!((c.max_abs_torsion - max).abs() < 10.0 * 0.125 * 0.125, "{name}: {}", c.max_abs_torsion);
                for e in &truth.torsion {
                    let [i, j, k] = e.index;
                    let idx = 9 * (i - 1) + 3 * (j - 1) + (k - 1);
                    assert!((c.torsion_component_max[idx] - e.value.abs()).abs() < 1e-6, "{name}");
                }
                assert!(out.join("christoffel.dat").exists());
                assert!(out.join("torsion.dat").exists());
            }
            (None, None) => {
                assert!(!report.failures.is_empty());
                assert!(stdout.contains("failure:"));
                assert!(!out.join("christoffel.dat").exists());
            }
            (h, c) => panic!("{name}: expected homogeneity {h:?}, connection present {}", c.is_some()),
        }
    }
}

#[test]
fn connection_command_reuses_an_analyzed_gauge() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "shear.toml", &["--kind", "implanted", "--n", "7", "--h", "0.1"]);
    let a = dir.path().join("a");
    assert_eq!(run(&["analyze", "--input", p(&body), "--out", p(&a)]).0, 0);
    let c = dir.path().join("c");
    let (code, stdout) = run(&["connection", "--input", p(&body), "--gauge", p(&a.join("gauge.toml")), "--out", p(&c)]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("homogeneity: defective"));
    let text = std::fs::read_to_string(c.join("connection.toml")).unwrap();
    assert!(text.starts_with("format = \"mgroupoid-connection/1\"\n"));
    assert_eq!(
        std::fs::read(a.join("christoffel.dat")).unwrap(),
        std::fs::read(c.join("christoffel.dat")).unwrap()
    );
    let dump = parse_dump(&std::fs::read_to_string(c.join("christoffel.dat")).unwrap()).unwrap();
    assert_eq!(dump.format, CHRISTOFFEL_FORMAT);
    assert_eq!(dump.nodes.len(), 343);
    for row in &dump.values {
        assert!((row[5] - 0.2).abs() < 1e-6);
    }
}

#[test]
fn connection_rejects_a_gauge_on_another_grid() {
    let dir = tempfile::tempdir().unwrap();
    let small = synth(dir.path(), "small.toml", &["--kind", "constant", "--n", "3"]);
    let big = synth(dir.path(), "big.toml", &["--kind", "constant", "--n", "4"]);
    let a = dir.path().join("a");
    assert_eq!(run(&["analyze", "--input", p(&small), "--out", p(&a)]).0, 0);
    let (code, _) = run(&["connection", "--input", p(&big), "--gauge", p(&a.join("gauge.toml")), "--out", p(&dir.path().join("c"))]);
    assert_eq!(code, 13);
}

fn write_groupoid(dir: &Path, name: &str, g: &FiniteGroupoid) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, interchange::write(g)).unwrap();
    path
}

#[test]
fn validate_groupoid_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write_groupoid(dir.path(), "pair.toml", &FiniteGroupoid::pair(3));
    let (code, s) = run(&["validate-groupoid", "--input", p(&pair)]);
    assert_eq!(code, 0);
    assert!(s.contains("valid: yes"));
    assert!(s.contains("transitive: yes"));
    assert!(s.contains("vertex group order 1"));

    let trivial = write_groupoid(dir.path(), "trivial.toml", &FiniteGroupoid::trivial(2, &FiniteGroup::cyclic(2)));
    let (_, s) = run(&["validate-groupoid", "--input", p(&trivial)]);
    assert!(s.contains("vertex group order 2"), "{s}");

    let split = FiniteGroupoid::disjoint_union(&FiniteGroupoid::pair(2), &FiniteGroupoid::identities_only(1));
    let split = write_groupoid(dir.path(), "split.toml", &split);
    let (_, s) = run(&["validate-groupoid", "--input", p(&split)]);
    assert!(s.contains("transitive: no") && s.contains("orbits: 2"), "{s}");
}

#[test]
fn corrupted_groupoid_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let g = FiniteGroupoid::pair(3);
    let (&(a, b), &ab) = g.composition_table().iter().find(|(_, &r)| r != ArrowId(0)).unwrap();
    let other = if ab == ArrowId(0) { ArrowId(1) } else { ArrowId(0) };
    let bad = write_groupoid(dir.path(), "bad.toml", &g.with_product(a, b, other));
    let (code, s) = run(&["validate-groupoid", "--input", p(&bad)]);
    assert_eq!(code, 4, "{s}");
    assert!(s.contains("violation:"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "shear.toml", &["--kind", "implanted", "--n", "7", "--h", "0.1"]);
    let mut reports = Vec::new();
    for threads in [1, 3] {
        let out = dir.path().join(format!("t{threads}"));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let (code, s) = pool.install(|| run(&["analyze", "--input", p(&body), "--out", p(&out), "--seed", "5"]));
        assert_eq!(code, 0, "{s}");
        reports.push(std::fs::read(out.join("report.toml")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn seed_is_recorded_in_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let body = synth(dir.path(), "c.toml", &["--kind", "constant", "--n", "3"]);
    let out = dir.path().join("o");
    run(&["analyze", "--input", p(&body), "--out", p(&out), "--seed", "99", "--starts", "4"]);
    let report = parse_report(&std::fs::read_to_string(out.join("report.toml")).unwrap()).unwrap();
    assert_eq!(report.config.uniformity.solver.seed, 99);
    assert_eq!(report.config.uniformity.solver.starts, 4);
    assert!(report.config.tol_torsion.is_some());
}
