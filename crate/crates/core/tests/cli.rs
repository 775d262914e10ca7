use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nibble::io::{load_graph, load_labels};
use serde_json::Value;

fn nibble(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nibble"))
        .args(args)
        .env_remove("NIBBLE_OUT_DIR")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn two_cliques_file(dir: &Path, offset: usize, stride: usize) -> String {
    let mut text = String::from("# two K10 joined by one edge\n");
    let id = |u: usize| offset + stride * u;
    for base in [0, 10] {
        for i in 0..10 {
            for j in i + 1..10 {
                text.push_str(&format!("{} {}\n", id(base + i), id(base + j)));
            }
        }
    }
    text.push_str(&format!("{} {}\n", id(9), id(10)));
    let path = dir.join(format!("k10-{offset}-{stride}.el"));
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn cluster_two_cliques_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_cliques_file(dir.path(), 0, 1);
    let o = nibble(&[
        "cluster",
        "--graph",
        &g,
        "--seed-vertex",
        "5",
        "--conn",
        "0.1",
        "--vol0",
        "91",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["result"]["phi"].as_f64().unwrap(), 1.0 / 91.0);
    assert_eq!(v["result"]["set"], serde_json::json!((0..10).collect::<Vec<_>>()));
    assert_eq!(v["parameters"]["nibble"]["vol0"], 91.0);
    assert_eq!(v["parameters"]["nibble"]["tuning"]["conn"], 0.1);
}

#[test]
fn cluster_reports_file_ids_for_sparse_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_cliques_file(dir.path(), 100, 3);
    let o = nibble(&[
        "cluster",
        "--graph",
        &g,
        "--seed-vertex",
        "115",
        "--conn",
        "0.1",
        "--vol0",
        "91",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let set: Vec<u64> = json(&o)["result"]["set"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_u64().unwrap())
        .collect();
    assert_eq!(set, (0..10).map(|u| 100 + 3 * u).collect::<Vec<_>>());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_cliques_file(dir.path(), 0, 1);
    let o = nibble(&["cluster", "--seed-vertex", "5", "--conn", "0.1", "--vol0", "91"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = nibble(&[
        "cluster",
        "--graph",
        &g,
        "--seed-vertex",
        "5",
        "--conn",
        "0.1",
        "--vol0",
        "0.5",
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no candidate cut"));
    let o = nibble(&["verify-appendix", "--lemma", "A1", "--ell", "200", "--gamma", "1"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains(",PASS"));
    let o = nibble(&["verify-hard", "--ell", "100", "--phi-ell2", "0.25", "--gamma", "4"]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["result"]["pass"], false);
    assert_eq!(code(&nibble(&["--help"])), 0);
}

#[test]
fn generated_graphs_are_deterministic_and_labeled() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.el");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = nibble(&[
            "generate",
            "exp1",
            "--beta",
            "1",
            "--rng-seed",
            "7",
            "--out",
            a.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        runs.push(fs::read(&a).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("# command: generate-exp1\n# parameters: "));
    let g = load_graph(&a).unwrap();
    assert_eq!(g.graph.vertex_count(), 870);
    let labels = load_labels(a.with_extension("labels")).unwrap();
    assert_eq!(labels["A"].len(), 300);

    let ga = a.to_str().unwrap();
    let la = a.with_extension("labels");
    let la = la.to_str().unwrap();
    let o = nibble(&[
        "conn",
        "--graph",
        ga,
        "--labels",
        la,
        "--label",
        "A",
        "--definition",
        "lambda",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["result"]["definition"], "lambda");
    assert_eq!(v["result"]["set_size"], 300);

    let set = dir.path().join("a.set");
    fs::write(&set, (0..300).map(|u| format!("{u}\n")).collect::<String>()).unwrap();
    let o = nibble(&[
        "eval",
        "--graph",
        ga,
        "--set",
        set.to_str().unwrap(),
        "--labels",
        la,
        "--label",
        "A",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["accuracy"], 1.0);
}

#[test]
fn other_generators_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let cases: Vec<(Vec<String>, usize)> = vec![
        (
            vec![
                "ws".into(),
                "--n".into(),
                "40".into(),
                "--k".into(),
                "4".into(),
                "--beta".into(),
                "0.2".into(),
            ],
            40,
        ),
        (vec!["chain".into(), "--ell".into(), "12".into()], 13),
        (
            vec![
                "hard".into(),
                "--ell".into(),
                "100".into(),
                "--phi-ell2".into(),
                "0.25".into(),
            ],
            4894,
        ),
    ];
    for (i, (args, n)) in cases.into_iter().enumerate() {
        let path = out(&format!("g{i}.el"));
        let mut full = vec!["generate".to_string()];
        full.extend(args);
        full.extend(["--out".to_string(), path.clone()]);
        let refs: Vec<&str> = full.iter().map(String::as_str).collect();
        assert_eq!(code(&nibble(&refs)), 0);
        assert_eq!(load_graph(&path).unwrap().graph.vertex_count(), n);
    }
    let pts = out("p.csv");
    let rows: String = (0..30)
        .map(|i| {
            format!(
                "{},{},{}\n",
                i % 2,
                (i % 2) as f64 * 10.0 + i as f64 * 0.01,
                (i * 7 % 5) as f64 * 0.1
            )
        })
        .collect();
    fs::write(&pts, rows).unwrap();
    let knn = out("knn.el");
    let o = nibble(&[
        "generate",
        "knn",
        "--points",
        &pts,
        "--labeled",
        "--k",
        "4",
        "--out",
        &knn,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let labels = load_labels(Path::new(&knn).with_extension("labels")).unwrap();
    assert_eq!(labels["0"].len(), 15);
}

#[test]
fn out_dir_env_and_sweep_curve() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_cliques_file(dir.path(), 0, 1);
    let outdir = dir.path().join("results");
    let o = Command::new(env!("CARGO_BIN_EXE_nibble"))
        .args(["sweep-curve", "--graph", &g, "--seed-vertex", "0", "--alpha", "0.1"])
        .env("NIBBLE_OUT_DIR", &outdir)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(outdir.join("sweep-curve.csv")).unwrap();
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(
        lines.next().unwrap(),
        "rank,vertex,normalized_value,prefix_volume,prefix_mass,prefix_cut,prefix_conductance"
    );
    assert_eq!(lines.count(), 20);

    let o = nibble(&[
        "sweep-curve",
        "--graph",
        &g,
        "--seed-vertex",
        "0",
        "--alpha",
        "0.1",
        "--exact",
        "--format",
        "json",
    ]);
    let v = json(&o);
    assert_eq!(v["result"]["ls_breakpoints"][0], serde_json::json!([0.0, 0.0]));
    assert_eq!(v["result"]["best_cut"]["phi"].as_f64().unwrap(), 1.0 / 91.0);
}

#[test]
fn auto_cluster_and_seed_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let g = two_cliques_file(dir.path(), 0, 1);
    let o = nibble(&[
        "auto-cluster",
        "--graph",
        &g,
        "--seed-vertex",
        "3",
        "--conn",
        "0.5",
        "--vol0",
        "91",
        "--phi-target",
        "0.011",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!(v["result"]["gap_mode"]["phi"].is_number());
    assert!(v["result"]["classic_mode"]["alpha"].as_f64().unwrap() == 0.011);

    let target = dir.path().join("a.set");
    fs::write(&target, (0..10).map(|u| format!("{u}\n")).collect::<String>()).unwrap();
    let o = nibble(&[
        "seed-sweep",
        "--graph",
        &g,
        "--target",
        target.to_str().unwrap(),
        "--conn",
        "0.5",
        "--vol0",
        "91",
        "--max-phi",
        "1",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["result"]["fraction"], 1.0);

    let o = nibble(&[
        "cluster",
        "--graph",
        &g,
        "--seed-vertex",
        "0",
        "--conn",
        "0.5",
        "--phi-accept",
        "0.05",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["vol0"], 16.0);
}

#[test]
fn beta_sweep_writes_table_and_run_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("beta.csv");
    let o = nibble(&[
        "beta-sweep",
        "--betas",
        "0,1",
        "--runs",
        "2",
        "--rng-seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#')).collect();
    assert!(rows[0].starts_with("beta,mean_ratio,ci_ratio,mean_acc,ci_acc,failures"));
    assert_eq!(rows.len(), 3);
    let log = fs::read_to_string(dir.path().join("beta.runs.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 4);
}
