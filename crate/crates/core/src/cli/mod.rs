//! The `cbvrp` command-line tool.
//!
//! Subcommands: `synth`, `train`, `predict`, `fuse`, `eval`, `sweep`. Every
//! setting is a `--key value` flag and may also come from `--config FILE`
//! (`key=value` lines, `#` comments); flags win. Exit codes: 0 success,
//! 1 runtime or data error, 2 usage error.
//!
//! `CBVRP_THREADS` sets the worker thread count (default: all cores).

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, Command};

use config::Key;
pub use config::RunConfig;

pub const THREADS_ENV: &str = "CBVRP_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or settings; exit code 2.
    Usage(String),
    /// Failure while running; exit code 1.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

struct Subcommand {
    name: &'static str,
    about: &'static str,
    keys: &'static [Key],
    run: fn(&RunConfig) -> Result<(), CliError>,
}

const SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "synth",
        about: "Generate a planted-cluster synthetic dataset",
        keys: config::SYNTH,
        run: commands::synth,
    },
    Subcommand {
        name: "train",
        about: "Train a triplet-loss linear embedding",
        keys: config::TRAIN,
        run: commands::train,
    },
    Subcommand {
        name: "predict",
        about: "Rank candidates by similarity and write top-K predictions",
        keys: config::PREDICT,
        run: commands::predict,
    },
    Subcommand {
        name: "fuse",
        about: "Average similarity matrices (late fusion)",
        keys: config::FUSE,
        run: commands::fuse,
    },
    Subcommand {
        name: "eval",
        about: "Score predictions with recall@K and hit@K",
        keys: config::EVAL,
        run: commands::eval,
    },
    Subcommand {
        name: "sweep",
        about: "Train, predict and evaluate over a dimension x epoch grid",
        keys: config::SWEEP,
        run: commands::sweep,
    },
];

fn cli() -> Command {
    let mut cmd = Command::new("cbvrp")
        .about("Content-based video relevance prediction toolkit")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in SUBCOMMANDS {
        let mut c = Command::new(sub.name).about(sub.about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("key=value settings file; flags override it"),
        );
        for k in sub.keys {
            let mut help = k.help.to_owned();
            if let Some(d) = k.default {
                help.push_str(&format!(" [default: {d}]"));
            }
            if k.required {
                help.push_str(" (required)");
            }
            c = c.arg(
                Arg::new(k.name)
                    .long(k.name)
                    .value_name("VALUE")
                    .action(ArgAction::Set)
                    .help(help),
            );
        }
        cmd = cmd.subcommand(c);
    }
    cmd
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // Fails only if a pool already exists, e.g. when run twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the chosen subcommand and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| {
        configure_threads()?;
        let (name, sub_matches) = matches.subcommand().expect("subcommand required");
        let sub = SUBCOMMANDS.iter().find(|s| s.name == name).expect("registered");
        let flags: Vec<(&'static str, String)> = sub
            .keys
            .iter()
            .filter(|k| sub_matches.value_source(k.name) == Some(ValueSource::CommandLine))
            .map(|k| {
                (
                    k.name,
                    sub_matches.get_one::<String>(k.name).cloned().unwrap_or_default(),
                )
            })
            .collect();
        let file = sub_matches.get_one::<String>("config").map(PathBuf::from);
        let cfg = RunConfig::resolve(sub.name, sub.keys, file.as_deref(), &flags)?;
        eprint!("{}", cfg.to_config_text());
        (sub.run)(&cfg)
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
