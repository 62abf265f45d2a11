mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use disagree::cli::{run, EXIT_INVALID, EXIT_IO, EXIT_OK};
use disagree::corpus::Lang;
use disagree::labels::read_gold;
use disagree::metrics::{score_run, MetricConfig};
use disagree::runs::load_run;
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn disagree<S: AsRef<str>>(args: &[S]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("disagree".to_owned()).chain(args.iter().map(|a| a.as_ref().to_owned()));
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(p: &Path) -> String {
    p.to_str().unwrap().to_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: TempDir::new().unwrap(),
        };
        std::fs::write(ws.file("corpus.json"), common::corpus_bytes(12, 10, 5)).unwrap();
        ws
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        path(&self.file(name))
    }

    fn gold(&self, task: &str) -> String {
        let gold = self.arg(&format!("gold{task}.json"));
        let o = disagree(&["gold", &self.arg("corpus.json"), "--task", task, "-o", &gold]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        gold
    }
}

#[test]
fn validate_counts_per_split() {
    let ws = Workspace::new();
    let o = disagree(&["validate", &ws.arg("corpus.json")]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(
        o.stdout,
        "DEV_EN\t10\nDEV_ES\t10\nTEST_EN\t1\nTEST_ES\t1\nTRAIN_EN\t12\nTRAIN_ES\t12\ntotal\t46\n"
    );
}

#[test]
fn validate_lenient_reports_quarantine() {
    let ws = Workspace::new();
    let mut root = common::corpus_json(4, 0, 1);
    root["100000"]["labels_task1"] = serde_json::json!(["YES"]);
    std::fs::write(ws.file("bad.json"), serde_json::to_vec(&root).unwrap()).unwrap();

    let strict = disagree(&["validate", &ws.arg("bad.json")]);
    assert_eq!(strict.code, EXIT_INVALID);
    assert!(strict.stderr.contains("100000"), "{}", strict.stderr);

    let lenient = disagree(&["validate", "--lenient", &ws.arg("bad.json")]);
    assert_eq!(lenient.code, EXIT_OK);
    assert!(lenient.stdout.contains("quarantined\t1\n"), "{}", lenient.stdout);
    assert!(lenient.stderr.contains("quarantined 100000"));
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    let o = disagree(&["frobnicate"]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("Usage"), "{}", o.stderr);

    let o = disagree(&["validate", &ws.arg("missing.json")]);
    assert_eq!(o.code, EXIT_IO);

    std::fs::write(ws.file("broken.json"), b"{\"a\": [1, 2").unwrap();
    let o = disagree(&["validate", &ws.arg("broken.json")]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("malformed JSON at byte"), "{}", o.stderr);

    let gold = ws.gold("1");
    std::fs::write(ws.file("short.json"), b"[{\"id\":\"100000\",\"value\":\"YES\"}]").unwrap();
    let o = disagree(&["score", &gold, &ws.arg("short.json")]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stderr.contains("missing predictions"), "{}", o.stderr);

    let o = disagree(&["score", &gold, &ws.arg("nope.json")]);
    assert_eq!(o.code, EXIT_IO);

    let o = disagree(&["--help"]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("annotate"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_disagree");
    let status = Command::new(bin).arg("frobnicate").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_INVALID));
    let status = Command::new(bin)
        .args(["validate", "/definitely/not/here.json"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_IO));
}

#[test]
fn gold_run_scores_one_in_both_norms() {
    let ws = Workspace::new();
    let gold = ws.gold("1");
    let run = ws.arg("gold-run.json");
    let o = disagree(&["baseline", &gold, "--kind", "gold", "-o", &run]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = disagree(&["score", &gold, &run, "--format", "tsv"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let row: Vec<&str> = o.stdout.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(row[0], "gold-run");
    assert_eq!(row[2], "1.00", "{}", o.stdout);
    assert_eq!(row[5], "1.00", "{}", o.stdout);
    assert_eq!(row[6], "1.00", "{}", o.stdout);
}

#[test]
fn report_gold_row_is_exact_for_task2() {
    let ws = Workspace::new();
    let gold = ws.gold("2");
    let o = disagree(&["report", &gold, "--format", "tsv", "--lang", "es"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let row: Vec<&str> = o.stdout.lines().nth(2).unwrap().split('\t').collect();
    assert_eq!(row[0], "gold");
    assert_eq!([row[2], row[5], row[6]], ["1.00", "1.00", "1.00"], "{}", o.stdout);
}

#[test]
fn hard_baseline_has_no_soft_columns() {
    let ws = Workspace::new();
    let gold = ws.gold("1");
    let run = ws.arg("majority.json");
    let o = disagree(&["baseline", &gold, "--kind", "majority", "--as", "hard", "-o", &run]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = disagree(&["score", &gold, &run, "--format", "tsv"]);
    let row: Vec<&str> = o.stdout.lines().nth(1).unwrap().split('\t').collect();
    assert_eq!(&row[1..4], ["-", "-", "-"]);
    assert_ne!(row[4], "-");
}

#[test]
fn language_subsets_partition_the_gold() {
    let ws = Workspace::new();
    let gold = ws.gold("1");
    let run = ws.arg("minority.json");
    assert_eq!(
        disagree(&["baseline", &gold, "--kind", "minority", "-o", &run]).code,
        EXIT_OK
    );

    let en = disagree(&["score", &gold, &run, "--lang", "EN"]);
    let es = disagree(&["score", &gold, &run, "--lang", "ES"]);
    assert_eq!(en.code, EXIT_OK, "{}", en.stderr);
    assert_eq!(es.code, EXIT_OK, "{}", es.stderr);

    let (task, summaries) = read_gold(&std::fs::read(&gold).unwrap(), None).unwrap();
    let loaded = load_run(&std::fs::read(&run).unwrap(), task).unwrap();
    let cfg = MetricConfig::default();
    let all = score_run(&loaded, &summaries, &cfg, None).unwrap();
    let en = score_run(&loaded, &summaries, &cfg, Some(Lang::En)).unwrap();
    let es = score_run(&loaded, &summaries, &cfg, Some(Lang::Es)).unwrap();
    assert_eq!(en.n_hard + es.n_hard, all.n_hard);
    assert_eq!(en.n_soft + es.n_soft, all.n_soft);
    assert!(en.n_hard > 0 && es.n_hard > 0);
}

#[test]
fn report_lists_baselines_first_per_scope() {
    let ws = Workspace::new();
    let gold = ws.gold("2");
    let run = ws.arg("mine.json");
    assert_eq!(
        disagree(&["baseline", &gold, "--kind", "majority", "-o", &run]).code,
        EXIT_OK
    );
    let o = disagree(&["report", &gold, &run]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let headers: Vec<&str> = o.stdout.lines().filter(|l| l.starts_with('#')).collect();
    assert_eq!(headers, ["# Overall (task2)", "# EN (task2)", "# ES (task2)"]);
    let first: Vec<&str> = o
        .stdout
        .lines()
        .skip(2)
        .take(4)
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(first, ["gold", "majority-class", "minority-class", "mine"]);
    assert_eq!(o.stdout, disagree(&["report", &gold, &run]).stdout);
}

#[test]
fn prompt_and_dry_run_annotation() {
    let ws = Workspace::new();
    let corpus = ws.arg("corpus.json");
    let p1 = disagree(&["prompt", &corpus, "--target", "310000", "--seed", "9"]);
    assert_eq!(p1.code, EXIT_OK, "{}", p1.stderr);
    assert!(p1.stdout.contains("text of tweet 310000"));
    assert_eq!(p1.stdout.matches("Annotator votes:").count(), 6);
    assert_eq!(
        p1.stdout,
        disagree(&["prompt", &corpus, "--target", "310000", "--seed", "9"]).stdout
    );

    let o = disagree(&["prompt", &corpus, "--target", "nope", "--seed", "1"]);
    assert_eq!(o.code, EXIT_INVALID);

    std::fs::write(
        ws.file("endpoint.json"),
        br#"{"base_url": "http://127.0.0.1:9/v1", "model": "m", "backoff_ms": 0}"#,
    )
    .unwrap();
    std::fs::write(
        ws.file("script.jsonl"),
        "{\"id\": \"310000\", \"response\": \"hmm, not sure\"}\n{\"id\": \"*\", \"response\": \"NO\"}\n",
    )
    .unwrap();
    let args = [
        "annotate",
        &corpus,
        "--task",
        "1",
        "--endpoint-config",
        &ws.arg("endpoint.json"),
        "--dry-run",
        &ws.arg("script.jsonl"),
        "--split",
        "dev",
        "--log",
        &ws.arg("log.jsonl"),
    ];
    let o = disagree(&args);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stderr.contains("20 target(s): 19 ok, 1 unparseable"), "{}", o.stderr);
    let run = load_run(o.stdout.as_bytes(), disagree::labels::Task::Task1).unwrap();
    assert_eq!(run.len(), 20);
    let log = std::fs::read_to_string(ws.file("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 20);
    assert!(log.contains("\"status\":\"unparseable\""));
    assert_eq!(disagree(&args).stdout, o.stdout);
}

#[test]
fn unreachable_endpoint_exits_with_io_code() {
    let ws = Workspace::new();
    std::fs::write(
        ws.file("endpoint.json"),
        br#"{"base_url": "http://127.0.0.1:9/v1/chat/completions", "model": "m", "max_retries": 0, "timeout_secs": 2}"#,
    )
    .unwrap();
    let o = disagree(&[
        "annotate",
        &ws.arg("corpus.json"),
        "--task",
        "1",
        "--endpoint-config",
        &ws.arg("endpoint.json"),
        "--split",
        "test",
    ]);
    assert_eq!(o.code, EXIT_IO, "{}", o.stderr);
}

#[test]
fn single_category_slice_leaves_normalized_columns_empty() {
    let dir = TempDir::new().unwrap();
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus.json");
    let gold = path(&dir.path().join("gold.json"));
    let o = disagree(&["gold", &path(&corpus), "--task", "1", "-o", &gold]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = disagree(&["report", &gold, "--task", "1", "--format", "tsv"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let es: Vec<&str> = o.stdout.split("# ES").nth(1).unwrap().lines().collect();
    let gold_row: Vec<&str> = es.iter().find(|l| l.starts_with("gold")).unwrap().split('\t').collect();
    assert_eq!(gold_row[2], "-", "{}", o.stdout);
    assert_eq!(gold_row[5], "-", "{}", o.stdout);
}
