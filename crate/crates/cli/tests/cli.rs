use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use relhyp_cli::{from_dot, load_config, parse_config, run, to_dot, CliError, RunConfig};
use relhyp_core::explicit::{cycle_graph, path_graph, tree_ball};
use relhyp_core::graph::{GraphBall, Tag};
use relhyp_core::horoball::horoball;
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn run_quiet(c: &RunConfig, out: &Path) -> relhyp_cli::RunOutcome {
    run(c, out, false).unwrap()
}

const T3_ENDS: &str = r#"
name = "t3"
[construction]
kind = "preset-graph"
graph = { kind = "tree", degree = 3 }
radius = 6

[[analyzers]]
kind = "ends"
n = [1, 2, 3]
r = 6
expect = "many/growing"
"#;

#[test]
fn tree_ends_config_reports_growth() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&parse_config(T3_ENDS).unwrap(), dir.path());
    assert_eq!(out.exit_code, 0);
    let rep = read_json(&out.analyzers[0].report);
    assert_eq!(rep["result"]["verdict"], "many/growing");
    // the n-sphere of T_3 has 3 * 2^(n-1) vertices, each starting its own branch
    let counts: Vec<u64> = rep["result"]["rows"].as_array().unwrap().iter().map(|r| r["components"].as_u64().unwrap()).collect();
    assert_eq!(counts, [1u64, 2, 3].map(|n| 3 * (1 << (n - 1))));
    for f in ["t3.json", "t3.dot", "t3.adj", "t3-00-ends.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn negative_radius_is_a_config_error() {
    let c = parse_config(&T3_ENDS.replace("radius = 6", "radius = -6")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let e = run(&c, dir.path(), false).unwrap_err();
    assert!(matches!(e, CliError::Invalid(_)), "{e}");
    assert_eq!(e.exit_code(), 2);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing is written for a rejected config");
    let bad_n = parse_config(&T3_ENDS.replace("n = [1, 2, 3]", "n = [1, -2]")).unwrap();
    assert_eq!(run(&bad_n, dir.path(), false).unwrap_err().exit_code(), 2);
    let bad_seed = parse_config(&format!("seed = -1\n{T3_ENDS}")).unwrap();
    assert_eq!(run(&bad_seed, dir.path(), false).unwrap_err().exit_code(), 2);
}

#[test]
fn loop_census_grows_over_three_radii() {
    let c = load_config(&configs().join("z-loop-census.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&c, dir.path());
    assert_eq!(out.exit_code, 0);
    let rep = read_json(&out.analyzers[0].report);
    let rows = rep["result"]["rows"].as_array().unwrap();
    let fours: Vec<u64> = rows.iter().map(|r| r["census"]["counts"][4].as_u64().unwrap()).collect();
    // squares cone2 - 0 - cone3 - 6k - cone2 for the 2(r/6) nonzero multiples of 6 in the ball,
    // and the two squares cone2 - 0 - (+-1) - (+-2) - cone2
    let expect: Vec<u64> = [12u64, 24, 48].iter().map(|r| 2 * (r / 6) + 2).collect();
    assert_eq!(fours, expect);
    assert!(rep["assertions"][0]["pass"].as_bool().unwrap());
}

#[test]
fn parse_errors_carry_positions() {
    let text = "name = \"x\"\n[construction]\nkind = = \"cayley\"\n";
    match parse_config(text) {
        Err(CliError::Parse { line, column, .. }) => {
            assert_eq!(line, 3);
            assert!(column > 1);
        }
        other => panic!("{other:?}"),
    }
    match parse_config("{\n  \"construction\": 3,\n}") {
        Err(e @ CliError::Parse { line: 2, .. }) => assert_eq!(e.exit_code(), 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_config("[construction]\nkind = \"mystery\"\n"), Err(CliError::Parse { .. })));
    assert!(matches!(parse_config("colour = 1\n[construction]\nkind = \"cayley\"\n"), Err(CliError::Parse { .. })));
}

#[test]
fn unknown_preset_and_bad_words() {
    let text = "model = { preset = \"Z/zero\" }\n[construction]\nkind = \"cayley\"\ns = [\"V:1\"]\nradius = 2\n";
    let dir = tempfile::tempdir().unwrap();
    let e = run(&parse_config(text).unwrap(), dir.path(), false).unwrap_err();
    assert_eq!(e, CliError::UnknownPreset("Z/zero".into()));
    assert_eq!(e.exit_code(), 2);
    let words = "model = { preset = \"Z/5\" }\n[construction]\nkind = \"cayley\"\ns = [\"W:1\"]\nradius = 2\n";
    assert_eq!(run(&parse_config(words).unwrap(), dir.path(), false).unwrap_err().exit_code(), 2);
}

#[test]
fn cayley_graph_of_a_finite_group() {
    // Z/5 with S = {1, 4}: the 5-cycle
    let name = "Z/5";
    let text = format!("model = {{ preset = \"{name}\" }}\n[construction]\nkind = \"cayley\"\ns = [\"{name}:1\", \"{name}:4\"]\nradius = 3\n");
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&parse_config(&text).unwrap(), dir.path());
    assert_eq!(out.exit_code, 0);
    let adj = std::fs::read_to_string(dir.path().join("run.adj")).unwrap();
    let g = GraphBall::from_adjacency_text(&adj).unwrap();
    assert_eq!(g.vertex_count(), 5);
    assert!((0..5).all(|v| g.degree(v) == 2));
    assert!(g.is_finite_graph());
}

#[test]
fn analyzer_failure_still_writes_the_report() {
    let c = parse_config(&T3_ENDS.replace("many/growing", "2")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&c, dir.path());
    assert_eq!(out.exit_code, 1);
    assert!(!out.analyzers[0].pass);
    let rep = read_json(&out.analyzers[0].report);
    assert_eq!(rep["pass"], false);
    assert_eq!(read_json(&out.summary)["pass"], false);
    assert!(matches!(out.into_result(), Err(CliError::AnalyzerFailure { failed: 1, total: 1 })));
    // an analyzer that errors is a failure too
    let c = parse_config(&T3_ENDS.replace("r = 6", "r = 9")).unwrap();
    let out = run_quiet(&c, dir.path());
    assert_eq!(out.exit_code, 1);
    assert!(read_json(&out.analyzers[0].report)["error"].as_str().unwrap().contains("complete"));
}

#[test]
fn construction_failure_is_reported() {
    let text = "[construction]\nkind = \"amalgam\"\ntree_radius = 3\nspace_radius = 2\n\
                a = { kind = \"explicit\", model = { kind = \"tree\", degree = 3 } }\n\
                b = { kind = \"explicit\", model = { kind = \"grid\" } }\n";
    let c = parse_config(text).unwrap();
    assert!(!c.construction.needs_model());
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&c, dir.path());
    assert_eq!(out.exit_code, 0, "explicit pieces need no model");
    let mixed = text.replace("b = { kind = \"explicit\", model = { kind = \"grid\" } }", "");
    let with_model = format!("model = {{ path = \"{}\" }}\n{mixed}", configs().join("z4-z6.json").display());
    let out = run_quiet(&parse_config(&with_model).unwrap(), dir.path());
    assert_eq!(out.exit_code, 1);
    assert!(out.construction_error.unwrap().contains("cannot stand for"));
    assert!(read_json(&dir.path().join("run.json"))["construction"]["error"].is_string());
}

#[test]
fn reports_embed_config_and_seed_and_repeat_exactly() {
    let c = load_config(&configs().join("amalgam-z4-z6.json")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = run_quiet(&c, a.path());
    let ob = run_quiet(&c, b.path());
    assert_eq!(oa.exit_code, 0);
    for (x, y) in oa.analyzers.iter().zip(&ob.analyzers) {
        assert_eq!(std::fs::read(&x.report).unwrap(), std::fs::read(&y.report).unwrap());
    }
    assert_eq!(std::fs::read(&oa.summary).unwrap(), std::fs::read(&ob.summary).unwrap());
    let rep = read_json(&oa.analyzers[0].report);
    let mut resolved = c.clone();
    resolved.seed = Some(c.seed() as i64);
    assert_eq!(rep["config"], serde_json::to_value(&resolved).unwrap());
    assert_eq!(rep["seed"], c.seed());
    // the embedded config reads back as the same run
    let back: RunConfig = serde_json::from_value(rep["config"].clone()).unwrap();
    assert_eq!(back.construction, c.construction);
    assert_eq!(back.analyzers, c.analyzers);
}

#[test]
fn sampled_delta_uses_the_config_seed() {
    let text = |seed: u64| {
        format!(
            "seed = {seed}\n[construction]\nkind = \"preset-graph\"\ngraph = {{ kind = \"grid\" }}\nradius = 14\n\
             [export]\ndot = false\nadjacency = false\n[[analyzers]]\nkind = \"delta\"\nsamples = 2000\n"
        )
    };
    let dir = tempfile::tempdir().unwrap();
    let out = run_quiet(&parse_config(&text(11)).unwrap(), dir.path());
    let rep = read_json(&out.analyzers[0].report);
    assert_eq!(rep["result"]["seed"], 11);
    assert_eq!(rep["result"]["exhaustive"], false);
    assert!(!dir.path().join("run.dot").exists());
}

#[test]
fn dot_of_a_single_vertex() {
    let dot = to_dot(&path_graph(1), None);
    assert_eq!(dot.matches(" [label=").count(), 1);
    assert!(!dot.contains("--"));
    assert!(from_dot(&dot).unwrap().same_labelled_graph(&path_graph(1)));
}

#[test]
fn horoball_dot_ranks_levels() {
    let h = horoball(&path_graph(5), 3).unwrap();
    let dot = to_dot(&h.ball, None);
    let ranks: Vec<&str> = dot.lines().filter(|l| l.contains("rank=same")).collect();
    assert_eq!(ranks.len(), 4);
    for (k, line) in ranks.iter().enumerate() {
        assert!(line.contains(&format!("level {k} ")));
        assert_eq!(line.matches(';').count(), 1 + 5, "{line}");
    }
    assert_eq!(dot, to_dot(&h.ball, None), "deterministic");
}

#[test]
fn dot_round_trips_through_the_adjacency_format() {
    let x = GraphBall::from_edges(
        vec!["a \"quoted\"".into(), "b\\c".into(), "x -- y".into(), "[z]".into()],
        &[(0, 1), (1, 2), (2, 3)],
        1,
        vec![Tag::Plain, Tag::Cone { family: 2, copy: 1 }, Tag::Horo { copy: 0, level: 2 }, Tag::Coset],
        vec![false, false, true, false],
    )
    .unwrap();
    let back = from_dot(&to_dot(&x, Some(&[0, 0, 1, 1]))).unwrap();
    let adj = GraphBall::from_adjacency_text(&back.to_adjacency_text().unwrap()).unwrap();
    assert!(adj.same_labelled_graph(&x));
    assert_eq!(adj, x);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_relhyp");
    let dir = tempfile::tempdir().unwrap();
    let ok = Command::new(exe)
        .args(["--config", configs().join("t3-ends.toml").to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("PASS [0] ends"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, T3_ENDS.replace("radius = 6", "radius = -1")).unwrap();
    let out = Command::new(exe).arg("--config").arg(&bad).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));

    std::fs::write(&bad, T3_ENDS.replace("\"many/growing\"", "\"1\"")).unwrap();
    let out = Command::new(exe).arg("--config").arg(&bad).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let seeded = Command::new(exe)
        .args(["--seed", "99", "--config", configs().join("t3-ends.toml").to_str().unwrap(), "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(seeded.status.success());
    assert_eq!(read_json(&dir.path().join("t3-ends.json"))["seed"], 99);

    let quick = Command::new(exe)
        .args(["amalgam", "--tree-radius", "3", "--space-radius", "2", "--model"])
        .arg(configs().join("z4-z6.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(quick.status.success(), "{}", String::from_utf8_lossy(&quick.stderr));
    assert!(dir.path().join("amalgam.dot").exists());
    assert!(dir.path().join("amalgam-tree.dot").exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dot_round_trip_preserves_the_ball(which in 0usize..3, size in 1u32..6, base_shift in 0usize..50) {
        let x = match which {
            0 => tree_ball(3, size, 10_000).unwrap(),
            1 => cycle_graph(size as usize + 3),
            _ => horoball(&path_graph(size as usize + 1), size).unwrap().ball,
        };
        let x = x.rebased(base_shift % x.vertex_count());
        let y = from_dot(&to_dot(&x, None)).unwrap();
        prop_assert!(y.same_labelled_graph(&x));
        prop_assert_eq!(y.base(), x.base());
        prop_assert_eq!(to_dot(&y, None), to_dot(&x, None));
    }
}
