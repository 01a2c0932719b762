//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_contour-codec"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout: {}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

/// A small two-blob mask.
const MASK: &str = "P1\n# blob fixture\n8 6\n0 0 0 0 0 0 0 0\n0 1 1 0 0 0 0 0\n0 1 1 0 0 1 1 1\n0 0 0 0 0 1 1 1\n0 0 1 0 0 0 0 0\n0 0 0 0 0 0 0 0\n";

fn sorted_lines(text: &str) -> Vec<String> {
    let mut lines: Vec<String> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_string)
        .collect();
    lines.sort();
    lines
}

#[test]
fn trace_single_pixel_mask() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("dot.pbm");
    write(&mask, "P1\n1 1\n1\n");
    run_ok(bin().arg("trace").arg("--out").arg(dir.path()).arg(&mask));
    let text = fs::read_to_string(dir.path().join("dot.txt")).unwrap();
    assert_eq!(text.trim(), "0,0 E rrr");
}

#[test]
fn trace_empty_mask_writes_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("empty.pbm");
    write(&mask, "P1\n3 3\n0 0 0\n0 0 0\n0 0 0\n");
    run_ok(bin().arg("trace").arg("--out").arg(dir.path()).arg(&mask));
    let text = fs::read_to_string(dir.path().join("empty.txt")).unwrap();
    assert!(text.trim().is_empty());
}

#[test]
fn malformed_pbm_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("bad.pbm");
    write(&mask, "P1\n2 2\n1 1 1\n");
    let out = bin()
        .arg("trace")
        .arg("--out")
        .arg(dir.path())
        .arg(&mask)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

fn traced_fixture(dir: &Path) -> PathBuf {
    let mask = dir.join("blobs.pbm");
    write(&mask, MASK);
    run_ok(bin().arg("trace").arg("--out").arg(dir).arg(&mask));
    dir.join("blobs.txt")
}

fn trained_model(dir: &Path) -> PathBuf {
    let model = dir.join("model.ctm");
    run_ok(
        bin()
            .arg("train")
            .arg("--out")
            .arg(&model)
            .arg("--synth")
            .arg("20000")
            .arg("--seed")
            .arg("1"),
    );
    model
}

#[test]
fn lossless_pipeline_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = trained_model(dir.path());
    let stream = dir.path().join("blobs.ctc");
    let out = run_ok(
        bin()
            .arg("encode")
            .arg("--model")
            .arg(&model)
            .arg("--out")
            .arg(&stream)
            .arg(&contours),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("payload_bits"));
    let decoded = dir.path().join("decoded.txt");
    run_ok(
        bin()
            .arg("decode")
            .arg("--model")
            .arg(&model)
            .arg("--out")
            .arg(&decoded)
            .arg(&stream),
    );
    let original = fs::read_to_string(&contours).unwrap();
    let roundtrip = fs::read_to_string(&decoded).unwrap();
    assert_eq!(sorted_lines(&original), sorted_lines(&roundtrip));
}

#[test]
fn train_on_traced_corpus_reports_objectives() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = dir.path().join("model.ctm");
    let out = run_ok(
        bin()
            .arg("train")
            .arg("--out")
            .arg(&model)
            .arg(&contours),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        stdout
            .lines()
            .find(|l| l.starts_with(key))
            .unwrap()
            .split_whitespace()
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(value("F(T*)") <= value("F(T0)") + 1e-9);
    assert!(model.exists());
}

#[test]
fn rd_sweep_madd_rate_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = trained_model(dir.path());
    let csv = dir.path().join("sweep.csv");
    run_ok(
        bin()
            .arg("rd-sweep")
            .arg("--model")
            .arg(&model)
            .arg("--mode")
            .arg("madd")
            .arg("--dmax")
            .arg("1,2,3")
            .arg("--csv")
            .arg(&csv)
            .arg(&contours),
    );
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "contour_id,mode,lambda_or_dmax,bits,ssdd,madd,states_expanded"
    );
    let mut last: Option<(u32, f64)> = None;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let id: u32 = fields[0].parse().unwrap();
        let d_max: f64 = fields[2].parse().unwrap();
        let bits: f64 = fields[3].parse().unwrap();
        let madd: f64 = fields[5].parse().unwrap();
        assert!(madd <= d_max);
        if let Some((last_id, last_bits)) = last {
            if last_id == id {
                assert!(bits <= last_bits + 1e-9);
            }
        }
        last = Some((id, bits));
    }
}

#[test]
fn rd_sweep_ssdd_zero_lambda_has_zero_distortion() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = trained_model(dir.path());
    let csv = dir.path().join("sweep.csv");
    run_ok(
        bin()
            .arg("rd-sweep")
            .arg("--model")
            .arg(&model)
            .arg("--mode")
            .arg("ssdd")
            .arg("--lambda")
            .arg("0")
            .arg("--dmax")
            .arg("2")
            .arg("--csv")
            .arg(&csv)
            .arg(&contours),
    );
    let text = fs::read_to_string(&csv).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1], "ssdd");
        assert_eq!(fields[4].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn stats_reports_model_summary() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = trained_model(dir.path());
    let out = run_ok(
        bin()
            .arg("stats")
            .arg("--model")
            .arg(&model)
            .arg(&contours),
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("end_nodes"));
    assert!(stdout.contains("bits_per_symbol"));
}

#[test]
fn threads_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let contours = traced_fixture(dir.path());
    let model = trained_model(dir.path());
    let csv = dir.path().join("sweep.csv");
    run_ok(
        bin()
            .env("CONTOUR_CODEC_THREADS", "1")
            .arg("rd-sweep")
            .arg("--model")
            .arg(&model)
            .arg("--mode")
            .arg("madd")
            .arg("--dmax")
            .arg("1")
            .arg("--csv")
            .arg(&csv)
            .arg(&contours),
    );
    assert!(csv.exists());
}
