use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cuelex"))
}

fn toy(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/toy").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// 151 both-positive, 130 both-negative, 63 only judge 1 positive, 49 only
/// judge 2 positive.
fn two_judge_csv(dir: &Path) -> PathBuf {
    let mut text = String::from("word,judge1,judge2\n");
    let blocks = [(151, "pos", "pos"), (63, "pos", "neg"), (49, "neg", "pos"), (130, "neg", "neg")];
    let mut i = 0;
    for (n, a, b) in blocks {
        for _ in 0..n {
            text.push_str(&format!("w{i},{a},{b}\n"));
            i += 1;
        }
    }
    let path = dir.join("labels.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn agree_reports_percent_kappa_and_band() {
    let dir = tempfile::tempdir().unwrap();
    let labels = two_judge_csv(dir.path());
    let out = dir.path().join("out");
    let o = run(&["agree", "--annotations", labels.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("percent_agreement\t0.715"), "{text}");
    assert!(text.contains("kappa\t0.4291"), "{text}");
    assert!(text.contains("band\tmoderate"), "{text}");
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("agreement.json")).unwrap()).unwrap();
    assert!((json["data"]["kappa"].as_f64().unwrap() - 0.4291).abs() < 5e-4);
    assert_eq!(json["meta"]["rng_seed"], 0);
    assert!(std::fs::read_to_string(out.join("agreement.tsv")).unwrap().starts_with("# cuelex "));
}

#[test]
fn empty_lexicon_is_an_input_error_naming_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = dir.path().join("my-seeds.txt");
    std::fs::write(&seeds, "# nothing here\n\n").unwrap();
    let model = toy("google-toy.txt");
    let o = run(&[
        "expand",
        "--seeds",
        seeds.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("my-seeds.txt"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["agree"]).status.code(), Some(1));
    assert_eq!(run(&["train", "--dataset", "/nonexistent/dataset.json"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

fn pipeline(out: &Path) -> Output {
    run(&[
        "pipeline",
        "--model",
        toy("google-toy.txt").to_str().unwrap(),
        "--model",
        toy("pubmed-toy.txt").to_str().unwrap(),
        "--corpus",
        toy("corpus.jsonl").to_str().unwrap(),
        "--k",
        "20",
        "--rng-seed",
        "42",
        "--reproducible",
        "--out",
        out.to_str().unwrap(),
    ])
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn pipeline_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = pipeline(d);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (la, lb) = (listing(&a), listing(&b));
    assert_eq!(la, lb);
    let names: Vec<&str> = la.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["candidates.json", "candidates.tsv", "review.csv", "pairs.google-toy.tsv", "pairs.pubmed-toy.json"] {
        assert!(names.contains(&expected), "{names:?}");
    }
    let review = String::from_utf8(la.iter().find(|(n, _)| n == "review.csv").unwrap().1.clone()).unwrap();
    assert!(review.lines().nth(1).unwrap().ends_with("judge1,judge2"));
    let cands = String::from_utf8(la.iter().find(|(n, _)| n == "candidates.json").unwrap().1.clone()).unwrap();
    assert!(cands.contains("\"status\": \"unrated\""));
    assert!(!cands.contains("generated_unix"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let labels = two_judge_csv(dir.path());
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        serde_json::json!({ "annotations": labels, "rng_seed": 9, "out": dir.path().join("from-config") }).to_string(),
    )
    .unwrap();
    let o = run(&["agree", "--config", cfg.to_str().unwrap(), "--rng-seed", "3", "--reproducible"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tsv = std::fs::read_to_string(dir.path().join("from-config/agreement.tsv")).unwrap();
    assert!(tsv.lines().next().unwrap().ends_with("rng_seed=3"), "{tsv}");

    std::fs::write(&cfg, r#"{"anotations": "x"}"#).unwrap();
    let o = run(&["agree", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("anotations"));
}

#[test]
fn review_round_trip_feeds_agree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    assert!(pipeline(&out).status.success());
    let review = std::fs::read_to_string(out.join("review.csv")).unwrap();
    let filled: String = review
        .lines()
        .enumerate()
        .map(|(i, l)| match i {
            0 | 1 => format!("{l}\n"),
            _ if i % 2 == 0 => format!("{}pos,pos\n", &l[..l.len() - 1]),
            _ => format!("{}neg,pos\n", &l[..l.len() - 1]),
        })
        .collect();
    let filled_path = dir.path().join("filled.csv");
    std::fs::write(&filled_path, filled).unwrap();
    let o = run(&["agree", "--annotations", filled_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("kappa"));
}

#[test]
fn graph_cluster_rank_export_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = run(&[
        "expand",
        "--model",
        toy("google-toy.txt").to_str().unwrap(),
        "--model",
        toy("pubmed-toy.txt").to_str().unwrap(),
        "--k",
        "15",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let p1 = out.join("pairs.google-toy.tsv");
    let p2 = out.join("pairs.pubmed-toy.tsv");
    let o = run(&["graph", "--pairs", p1.to_str().unwrap(), "--pairs", p2.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g = out.join("graph.json");
    for cmd in [vec!["cluster"], vec!["rank"], vec!["export", "--format", "gexf"], vec!["export", "--format", "node_tsv"]] {
        let mut args = cmd.clone();
        args.extend(["--graph", g.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        let o = run(&args);
        assert!(o.status.success(), "{cmd:?}: {}", stderr(&o));
    }
    let gexf = std::fs::read_to_string(out.join("graph.gexf")).unwrap();
    assert!(gexf.starts_with("<?xml"));
    assert!(gexf.contains("<!-- cuelex "));
    assert_eq!(run(&["export", "--format", "svg", "--graph", g.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn collections_to_pca_and_mds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = run(&["relscore", "--collections", toy("collections.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = out.join("scores.matrix.tsv");
    let o = run(&["pca", "--matrix", m.to_str().unwrap(), "--components", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["mds", "--matrix", m.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("mds.json")).unwrap()).unwrap();
    let trace: Vec<f64> = json["data"]["stress_trace"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(trace.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn dataset_then_train() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = run(&[
        "dataset",
        "--annotations",
        toy("annotations.csv").to_str().unwrap(),
        "--model",
        toy("google-toy.txt").to_str().unwrap(),
        "--model",
        toy("pubmed-toy.txt").to_str().unwrap(),
        "--unrelated",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(&["train", "--dataset", out.join("dataset.json").to_str().unwrap(), "--folds", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let eval = std::fs::read_to_string(out.join("eval.tsv")).unwrap();
    assert_eq!(eval.lines().filter(|l| !l.starts_with('#')).count(), 5);
}
