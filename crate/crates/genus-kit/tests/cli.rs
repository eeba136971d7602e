//! End-to-end runs of the compiled binary: round trips, exit codes, and
//! report shapes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use genus_core::graph::Graph;
use genus_kit::formats;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_genus-kit"))
}

fn write_graph(dir: &Path, name: &str, g: &Graph) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, formats::format_graph(g)).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(report: &str, key: &str) -> String {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("missing key {key} in:\n{report}"))
        .to_string()
}

#[test]
fn estimate_embed_verify_round_trip() {
    let dir = TempDir::new().unwrap();
    let graph = write_graph(dir.path(), "k5.txt", &Graph::complete(5));
    let rot = dir.path().join("k5.rot");
    let report = dir.path().join("k5.report");

    let est = bin().args(["estimate"]).arg(&graph).args(["--eps", "0.2"]).output().unwrap();
    assert!(est.status.success(), "estimate failed: {est:?}");
    let est_text = stdout(&est);
    assert_eq!(field(&est_text, "phase"), "1");
    assert_eq!(field(&est_text, "estimate"), "1.000000");
    assert_eq!(field(&est_text, "lower"), "1.000000");
    assert_eq!(field(&est_text, "upper"), "1.000000");

    let emb = bin()
        .args(["embed"])
        .arg(&graph)
        .args(["--eps", "0.2", "--out"])
        .arg(&rot)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(emb.status.success(), "embed failed: {emb:?}");
    let emb_text = stdout(&emb);
    assert_eq!(field(&emb_text, "genus_achieved"), "1");
    assert_eq!(fs::read_to_string(&report).unwrap(), emb_text);

    let ver = bin().args(["verify"]).arg(&graph).arg(&rot).output().unwrap();
    assert!(ver.status.success(), "verify failed: {ver:?}");
    let ver_text = stdout(&ver);
    assert_eq!(field(&ver_text, "genus_achieved"), "1");
    assert_eq!(field(&ver_text, "f3"), field(&emb_text, "f3"));
}

#[test]
fn exact_reports_known_genus() {
    let dir = TempDir::new().unwrap();
    let graph = write_graph(dir.path(), "k33.txt", &Graph::complete_bipartite(3, 3));
    let out = bin().args(["exact"]).arg(&graph).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(field(&text, "genus_achieved"), "1");
    assert_eq!(field(&text, "lower"), "1.000000");
    // Bipartite, so no triangular faces in any embedding.
    assert_eq!(field(&text, "f3"), "0");
    field(&text, "f4").parse::<usize>().unwrap();
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3 2\n0 1\n").unwrap(); // promised 2 edges, gave 1
    let out = bin().args(["estimate"]).arg(&bad).args(["--eps", "0.2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let graph = write_graph(dir.path(), "k4.txt", &Graph::complete(4));
    let out = bin().args(["estimate"]).arg(&graph).args(["--eps", "0.9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "eps out of range must be an input error");

    let missing = dir.path().join("nope.txt");
    let out = bin().args(["estimate"]).arg(&missing).args(["--eps", "0.2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rejects_foreign_rotation() {
    let dir = TempDir::new().unwrap();
    let k5 = write_graph(dir.path(), "k5.txt", &Graph::complete(5));
    let c5 = write_graph(dir.path(), "c5.txt", &Graph::cycle(5));
    let rot = dir.path().join("k5.rot");
    let emb = bin()
        .args(["embed"])
        .arg(&k5)
        .args(["--eps", "0.2", "--out"])
        .arg(&rot)
        .output()
        .unwrap();
    assert!(emb.status.success());
    let out = bin().args(["verify"]).arg(&c5).arg(&rot).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn partition_prints_parts_and_quotient() {
    let dir = TempDir::new().unwrap();
    let graph = write_graph(dir.path(), "g.txt", &Graph::gnp(120, 0.5, 11));
    let out = bin().args(["partition"]).arg(&graph).args(["--eps", "0.25"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let part_lines = text.lines().filter(|l| l.contains(": ") && !l.starts_with("irregular")).count();
    let k: usize = text
        .lines()
        .find(|l| !l.contains(':'))
        .and_then(|l| l.trim().parse().ok())
        .expect("quotient order line");
    assert!(k >= 3, "dense graph should keep several parts, got {k}");
    assert!(part_lines >= k, "one dump line per part plus density rows");
    assert!(text.lines().any(|l| l.starts_with("irregular:")));
}

#[test]
fn embed_is_reproducible_across_processes() {
    let dir = TempDir::new().unwrap();
    let graph = write_graph(dir.path(), "g.txt", &Graph::gnp(100, 0.5, 9));
    let run = |tag: &str| {
        let rot = dir.path().join(format!("{tag}.rot"));
        let rep = dir.path().join(format!("{tag}.report"));
        let out = bin()
            .args(["embed"])
            .arg(&graph)
            .args(["--eps", "0.25", "--seed", "7", "--out"])
            .arg(&rot)
            .arg("--report")
            .arg(&rep)
            .output()
            .unwrap();
        assert!(out.status.success(), "embed failed: {out:?}");
        (fs::read(&rot).unwrap(), fs::read(&rep).unwrap())
    };
    let (rot_a, rep_a) = run("a");
    let (rot_b, rep_b) = run("b");
    assert_eq!(rot_a, rot_b);
    assert_eq!(rep_a, rep_b);
}
