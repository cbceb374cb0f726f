use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gzsi"));
    cmd.env_remove("GZSI_OUTPUT_ROOT");
    cmd
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic").join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("spawn gzsi")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    std::fs::write(
        &path,
        format!(
            "seeds = [11]\n[data]\nintents = {:?}\nutterances = {:?}\n[scorer]\nepochs = 2\n",
            data("intents.jsonl"),
            data("utterances.jsonl")
        ),
    )
    .unwrap();
    path
}

#[test]
fn split_writes_a_consistent_partition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("split.json");
    let res = run(bin()
        .args(["split", "--n-unseen", "5", "--seed", "3", "--intents"])
        .arg(data("intents.jsonl"))
        .arg("--utterances")
        .arg(data("utterances.jsonl"))
        .arg("--out")
        .arg(&out));
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stderr).contains("15 seen, 5 unseen"));
    let split: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(split["seen"].as_array().unwrap().len(), 15);
    assert_eq!(split["unseen"].as_array().unwrap().len(), 5);
}

#[test]
fn lexicalize_prints_one_sentence_per_label() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.txt");
    std::fs::write(&labels, "book_hotel\nreset_settings\n").unwrap();
    let res = run(bin().args(["lexicalize", "--template", "d1", "--labels"]).arg(&labels));
    assert!(res.status.success());
    let text = stdout(&res);
    assert!(text.contains("the user wants to book a hotel"), "{text}");
    assert!(text.contains("the user wants to reset settings"), "{text}");
}

#[test]
fn sweep_dry_run_lists_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let res = run(bin().args(["sweep", "--dry-run", "--config"]).arg(&config));
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("48 configurations"));
    let text = stdout(&res);
    assert_eq!(text.lines().filter(|l| l.starts_with('{')).count(), 48);
}

#[test]
fn eval_writes_reports_under_the_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let root = dir.path().join("out");
    let res = run(bin()
        .args(["eval", "--config"])
        .arg(&config)
        .arg("--out-root")
        .arg(&root));
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let runs: Vec<_> = std::fs::read_dir(&root).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(runs.len(), 1);
    let fingerprint = runs[0].file_name().unwrap().to_str().unwrap().to_string();
    assert_eq!(fingerprint.len(), 12);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(runs[0].join("report.json")).unwrap()).unwrap();
    assert!(report.is_object());
    let md = std::fs::read_to_string(runs[0].join("report.md")).unwrap();
    assert!(md.contains(&fingerprint));
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = run(bin().args(["eval", "--config"]).arg(dir.path().join("missing.toml")));
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error: "));

    let labels = dir.path().join("labels.txt");
    std::fs::write(&labels, "book_hotel\n").unwrap();
    let unknown = run(bin().args(["lexicalize", "--template", "zz", "--labels"]).arg(&labels));
    assert_eq!(unknown.status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seeds = [1]\nnot_a_field = 3\n").unwrap();
    let res = run(bin().args(["eval", "--config"]).arg(&bad));
    assert_eq!(res.status.code(), Some(1));

    let usage = run(bin().args(["split"]));
    assert_eq!(usage.status.code(), Some(2));
}
