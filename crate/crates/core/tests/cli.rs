mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::{TOY_PANEL, TOY_QUERIES};
use pbwt_batch::report::accumulate;
use pbwt_batch::smem::collect_records;
use pbwt_batch::{build_full_arrays, build_index, parse_panel, parse_queries, BatchPolicy};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pbwt-batch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("panel.txt"), TOY_PANEL).unwrap();
        fs::write(dir.path().join("queries.txt"), TOY_QUERIES).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn built(self) -> Self {
        stdout(&run(&[
            "build",
            "-i",
            &self.arg("panel.txt"),
            "-o",
            &self.arg("panel.idx"),
        ]));
        self
    }
}

#[test]
fn build_prints_dimensions() {
    let fx = Fixture::new();
    let out = stdout(&run(&[
        "build",
        "-i",
        &fx.arg("panel.txt"),
        "-o",
        &fx.arg("panel.idx"),
    ]));
    assert_eq!(out.trim(), "h=8 l=8 sigma=2 r=35 B=20");
    assert!(Path::new(&fx.path("panel.idx")).exists());
}

#[test]
fn build_rejects_empty_panel() {
    let fx = Fixture::new();
    fs::write(fx.path("empty.txt"), "").unwrap();
    let out = run(&["build", "-i", &fx.arg("empty.txt"), "-o", &fx.arg("e.idx")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no haplotypes"));
}

#[test]
fn build_rejects_ragged_panel() {
    let fx = Fixture::new();
    fs::write(fx.path("ragged.txt"), "0101\n010\n").unwrap();
    let out = run(&["build", "-i", &fx.arg("ragged.txt"), "-o", &fx.arg("r.idx")]);
    assert!(!out.status.success());
}

#[test]
fn build_fails_on_unwritable_output() {
    let fx = Fixture::new();
    let target = fx.path("missing-dir").join("panel.idx");
    let out = run(&[
        "build",
        "-i",
        &fx.arg("panel.txt"),
        "-o",
        &target.to_string_lossy(),
    ]);
    assert!(!out.status.success());
}

#[test]
fn query_reports_every_matching_haplotype() {
    let fx = Fixture::new().built();
    let out = stdout(&run(&[
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "-i",
        &fx.arg("panel.txt"),
        "-q",
        &fx.arg("queries.txt"),
        "--with-starts",
    ]));
    let want = "1\t1\t6\t0\n1\t1\t7\t0\n0\t3\t5\t0\n1\t4\t3\t1\n0\t6\t3\t2\n0\t7\t6\t3\n1\t7\t2\t5\n1\t7\t7\t5\n";
    assert_eq!(out, want);
}

#[test]
fn query_modes_and_batch_files_agree() {
    let fx = Fixture::new().built();
    let base = [
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "-i",
        &fx.arg("panel.txt"),
        "-q",
        &fx.arg("queries.txt"),
    ]
    .map(String::from);
    let with = |extra: &[&str]| {
        let mut args: Vec<String> = base.to_vec();
        args.extend(extra.iter().map(|s| s.to_string()));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        stdout(&run(&refs))
    };
    let interval = with(&[]);
    assert_eq!(interval.lines().count(), 8);
    assert_eq!(with(&["--mode", "endpoints"]), interval);
    assert_eq!(with(&["--batch-threshold", "1"]), interval);
    assert_eq!(with(&[]), interval);

    let written = with(&["-o", &fx.arg("batch.bin")]);
    assert_eq!(written, interval);
    let replay = stdout(&run(&[
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "--batch",
        &fx.arg("batch.bin"),
        "--batch-threshold",
        "2",
    ]));
    assert_eq!(replay, interval);
}

#[test]
fn query_output_matches_in_memory_pipeline() {
    let fx = Fixture::new().built();
    let out = stdout(&run(&[
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "-i",
        &fx.arg("panel.txt"),
        "-q",
        &fx.arg("queries.txt"),
    ]));
    let panel = parse_panel(TOY_PANEL).unwrap();
    let index = build_index(&panel);
    let arrays = build_full_arrays(&panel);
    let queries = parse_queries(TOY_QUERIES, 8).unwrap();
    let batch = collect_records(&panel, &arrays, &queries, false).unwrap();
    let entries = accumulate(&index, BatchPolicy::default(), batch.records)
        .unwrap()
        .entries;
    let want: String = entries
        .iter()
        .map(|e| format!("{}\t{}\t{}\n", e.query_id, e.end_col, e.haplotype_id))
        .collect();
    assert_eq!(out, want);
}

#[test]
fn empty_query_file_reports_nothing() {
    let fx = Fixture::new().built();
    fs::write(fx.path("none.txt"), "").unwrap();
    let out = stdout(&run(&[
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "-i",
        &fx.arg("panel.txt"),
        "-q",
        &fx.arg("none.txt"),
    ]));
    assert!(out.is_empty());
}

#[test]
fn query_rejects_wrong_length() {
    let fx = Fixture::new().built();
    fs::write(fx.path("short.txt"), "0101\n").unwrap();
    let out = run(&[
        "query",
        "-x",
        &fx.arg("panel.idx"),
        "-i",
        &fx.arg("panel.txt"),
        "-q",
        &fx.arg("short.txt"),
    ]);
    assert!(!out.status.success());
}

#[test]
fn dump_prints_arrays() {
    let fx = Fixture::new().built();
    let pa = stdout(&run(&["dump", "-x", &fx.arg("panel.idx"), "--column", "4"]));
    assert_eq!(pa.trim(), "1 6 5 3 4 2 7 0");
    let da = stdout(&run(&[
        "dump",
        "-x",
        &fx.arg("panel.idx"),
        "--which",
        "da",
        "--column",
        "8",
    ]));
    assert_eq!(da.trim(), "7 6 0 5 7 5 2 6");
    let out = run(&["dump", "-x", &fx.arg("panel.idx"), "--column", "9"]);
    assert!(!out.status.success());
}

#[test]
fn verify_passes_and_is_deterministic() {
    let fx = Fixture::new().built();
    let out = stdout(&run(&[
        "verify",
        "-i",
        &fx.arg("panel.txt"),
        "-x",
        &fx.arg("panel.idx"),
        "-q",
        &fx.arg("queries.txt"),
    ]));
    assert!(out.ends_with("PASS\n"));
    let a = stdout(&run(&["verify", "--trials", "100", "--seed", "42"]));
    let b = stdout(&run(&["verify", "--trials", "100", "--seed", "42"]));
    assert!(a.ends_with("PASS\n"));
    assert_eq!(a, b);
}

#[test]
fn corrupted_index_is_rejected() {
    let fx = Fixture::new().built();
    let mut bytes = fs::read(fx.path("panel.idx")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0xff;
    fs::write(fx.path("bad.idx"), &bytes).unwrap();
    let out = run(&["dump", "-x", &fx.arg("bad.idx"), "--column", "3"]);
    assert!(!out.status.success());

    fs::write(fx.path("other.txt"), "0000\n1111\n").unwrap();
    let out = run(&[
        "verify",
        "-i",
        &fx.arg("other.txt"),
        "-x",
        &fx.arg("panel.idx"),
    ]);
    assert!(!out.status.success());
}

#[test]
fn bench_reports_counts() {
    let fx = Fixture::new();
    let out = stdout(&run(&[
        "bench",
        "-i",
        &fx.arg("panel.txt"),
        "--trials",
        "10",
        "--seed",
        "3",
    ]));
    assert!(out.contains("r=35"));
    assert!(out.contains("walk_steps="));
}
