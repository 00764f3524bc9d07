//! Flat `key=value` run configuration shared by config files and flags.
//!
//! Every flag `--name value` has a config-file twin `name=value`. Values
//! resolve as defaults, then the config file, then flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;

#[derive(Clone, Copy)]
pub(crate) struct Key {
    pub name: &'static str,
    pub default: Option<&'static str>,
    pub required: bool,
    pub help: &'static str,
}

const fn opt(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: Some(default),
        required: false,
        help,
    }
}

const fn path(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: None,
        required: false,
        help,
    }
}

const fn req(name: &'static str, help: &'static str) -> Key {
    Key {
        name,
        default: None,
        required: true,
        help,
    }
}

const TRAIN_KEYS: [Key; 7] = [
    opt("dim", "64", "embedding dimension d"),
    opt("epochs", "4", "training epochs"),
    opt("margin", "1.0", "triplet margin m"),
    opt("lr", "0.01", "SGD learning rate"),
    opt(
        "triplets-per-anchor",
        "5",
        "positive/negative pairs drawn per anchor per epoch",
    ),
    opt("batch-size", "128", "triplets per SGD step"),
    opt("seed", "0", "random seed"),
];

pub(crate) const SYNTH: &[Key] = &[
    req("out", "output directory"),
    opt("seed", "0", "random seed"),
    opt("n-items", "500", "number of items"),
    opt("n-clusters", "20", "number of latent clusters"),
    opt("raw-dim", "64", "feature dimension per channel"),
    opt("channels", "2", "number of feature channels"),
    opt("noise", "0.5", "noise standard deviation"),
    opt("truth-len", "30", "ground-truth list length M"),
    opt("latent-dim", "16", "latent space dimension"),
];

pub(crate) const TRAIN: &[Key] = &[
    req("features", "feature file (.cbvf or .cbvt)"),
    req("truth", "training ground truth (.rel)"),
    path(
        "candidates",
        "candidate list (.cand); default: every id in the truth file",
    ),
    req("out", "model output (.cbvm)"),
    TRAIN_KEYS[0],
    TRAIN_KEYS[1],
    TRAIN_KEYS[2],
    TRAIN_KEYS[3],
    TRAIN_KEYS[4],
    TRAIN_KEYS[5],
    TRAIN_KEYS[6],
];

pub(crate) const PREDICT: &[Key] = &[
    req("features", "feature file (.cbvf or .cbvt)"),
    path("model", "embedding model (.cbvm); default: raw features"),
    opt("metric", "cosine", "cosine or neg-euclidean"),
    opt("k", "300", "prediction list length"),
    req("out", "prediction output (.pred)"),
    path("matrix", "also write the similarity matrix (.cbvs)"),
    path("queries", "query ids (.cand); default: every item"),
    path("candidates", "candidate ids (.cand); default: every item"),
    opt("exclude-self", "true", "never predict a query as its own neighbour"),
];

pub(crate) const FUSE: &[Key] = &[
    req("inputs", "comma-separated similarity matrices (.cbvs), at least two"),
    path(
        "weights",
        "comma-separated non-negative weights; default: plain average",
    ),
    path("out", "prediction output (.pred)"),
    path("matrix", "fused similarity matrix output (.cbvs)"),
    opt("k", "300", "prediction list length"),
    opt("exclude-self", "true", "never predict a query as its own neighbour"),
];

pub(crate) const EVAL: &[Key] = &[
    req("truth", "ground truth (.rel)"),
    req("pred", "predictions (.pred)"),
    path("candidates", "candidate list (.cand) for the ground truth"),
    opt("k-hit", "5,10,20,30", "K values for hit@K"),
    opt("k-recall", "50,100,200,300", "K values for recall@K"),
    path("out", "also write key=value results here"),
];

pub(crate) const SWEEP: &[Key] = &[
    req("features", "feature file (.cbvf or .cbvt)"),
    req("truth", "training ground truth (.rel)"),
    req("eval-truth", "evaluation ground truth (.rel)"),
    path("candidates", "candidate list (.cand) for training"),
    opt("dims", "64,128,256", "embedding dimensions to sweep"),
    opt("epochs", "4,8,16", "epoch counts to sweep"),
    TRAIN_KEYS[2],
    TRAIN_KEYS[3],
    TRAIN_KEYS[4],
    TRAIN_KEYS[5],
    TRAIN_KEYS[6],
    opt("metric", "cosine", "cosine or neg-euclidean"),
    opt("k-hit", "5,10,20,30", "K values for hit@K"),
    opt("k-recall", "50,100,200,300", "K values for recall@K"),
    opt("exclude-self", "true", "never predict a query as its own neighbour"),
    path("out", "also write the table here"),
];

/// Resolved settings of one command, in key-table order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    command: &'static str,
    values: Vec<(&'static str, Option<String>)>,
}

impl RunConfig {
    pub(crate) fn resolve(
        command: &'static str,
        keys: &'static [Key],
        file: Option<&Path>,
        flags: &[(&'static str, String)],
    ) -> Result<Self, CliError> {
        let mut values: Vec<(&'static str, Option<String>)> =
            keys.iter().map(|k| (k.name, k.default.map(str::to_owned))).collect();
        let mut set = |name: &str, value: String, origin: &str| -> Result<(), CliError> {
            match values.iter_mut().find(|(k, _)| *k == name) {
                Some((_, v)) => {
                    *v = Some(value);
                    Ok(())
                }
                None => Err(CliError::Usage(format!("unknown key {name:?} in {origin}"))),
            }
        };
        if let Some(path) = file {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut seen = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let origin = format!("{} line {}", path.display(), i + 1);
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("{origin}: expected key=value")))?;
                let k = k.trim();
                if seen.contains(&k) {
                    return Err(CliError::Usage(format!("{origin}: duplicate key {k:?}")));
                }
                seen.push(k);
                set(k, v.trim().to_owned(), &origin)?;
            }
        }
        for (k, v) in flags {
            set(k, v.clone(), "flags")?;
        }
        let cfg = RunConfig { command, values };
        for k in keys.iter().filter(|k| k.required) {
            cfg.require(k.name)?;
        }
        Ok(cfg)
    }

    pub fn command(&self) -> &str {
        self.command
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(k, _)| *k == key)
            .and_then(|(_, v)| v.as_deref())
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Usage(format!("missing required setting --{key}")))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf, CliError> {
        self.require(key).map(PathBuf::from)
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|e| CliError::Usage(format!("bad value {raw:?} for {key}: {e}")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .map_err(|e| CliError::Usage(format!("bad value {s:?} in {key}: {e}")))
            })
            .collect()
    }

    /// The settings as a config file; unset optional keys are omitted, so
    /// feeding the output back reproduces the run.
    pub fn to_config_text(&self) -> String {
        let mut out = format!("# cbvrp {} resolved config\n", self.command);
        for (k, v) in &self.values {
            if let Some(v) = v {
                writeln!(out, "{k}={v}").unwrap();
            }
        }
        out
    }
}
