#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

pub fn cbvrp(dir: &Path, args: &[&str]) -> Output {
    cbvrp_threads(dir, args, None)
}

/// `threads` sets the worker-pool size through the environment.
pub fn cbvrp_threads(dir: &Path, args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cbvrp"));
    cmd.args(args).current_dir(dir).env_remove("CBVRP_THREADS");
    if let Some(n) = threads {
        cmd.env("CBVRP_THREADS", n.to_string());
    }
    cmd.output().expect("spawn cbvrp")
}

/// Runs a command that must succeed and returns its stdout.
pub fn cbvrp_ok(dir: &Path, args: &[&str]) -> String {
    cbvrp_ok_threads(dir, args, None)
}

pub fn cbvrp_ok_threads(dir: &Path, args: &[&str], threads: Option<usize>) -> String {
    let out = cbvrp_threads(dir, args, threads);
    assert!(
        out.status.success(),
        "cbvrp {args:?} failed with {:?}:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn sha256(path: &Path) -> String {
    let digest = Sha256::digest(std::fs::read(path).unwrap());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Every regular file under `root`, relative and sorted.
pub fn files_under(root: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

/// synth -> train -> predict -> fuse -> eval with relative paths inside `dir`.
pub fn run_pipeline(dir: &Path, seed: &str, synth_extra: &[&str], threads: Option<usize>) {
    let cbvrp_ok = |dir: &Path, args: &[&str]| cbvrp_ok_threads(dir, args, threads);
    let mut synth = vec!["synth", "--out", "data", "--seed", seed];
    synth.extend_from_slice(synth_extra);
    cbvrp_ok(dir, &synth);
    for ch in ["0", "1"] {
        let features = format!("data/channel{ch}.cbvf");
        let model = format!("model{ch}.cbvm");
        let matrix = format!("sim{ch}.cbvs");
        let pred = format!("pred{ch}.pred");
        cbvrp_ok(
            dir,
            &[
                "train",
                "--features",
                &features,
                "--truth",
                "data/train.rel",
                "--candidates",
                "data/train.cand",
                "--out",
                &model,
                "--seed",
                seed,
            ],
        );
        cbvrp_ok(
            dir,
            &[
                "predict",
                "--features",
                &features,
                "--model",
                &model,
                "--matrix",
                &matrix,
                "--out",
                &pred,
            ],
        );
    }
    cbvrp_ok(
        dir,
        &[
            "fuse",
            "--inputs",
            "sim0.cbvs,sim1.cbvs",
            "--matrix",
            "fused.cbvs",
            "--out",
            "fused.pred",
        ],
    );
    let report = cbvrp_ok(
        dir,
        &[
            "eval",
            "--truth",
            "data/test.rel",
            "--pred",
            "fused.pred",
            "--out",
            "eval.txt",
        ],
    );
    std::fs::write(dir.join("eval.stdout"), report).unwrap();
}
