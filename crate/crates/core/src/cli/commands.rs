use std::path::Path;

use super::{CliError, RunConfig};
use crate::datamodel::{
    load_candidates, load_features, load_predictions, load_relevance, load_relevance_with_candidates, mean_pool,
    save_predictions, write_file, FeatureFormat, FeatureSet, RelevanceTable,
};
use crate::error::Error;
use crate::metrics::{evaluate, format_table, EvalReport};
use crate::retrieval::{fuse as fuse_matrices, similarity_matrix_with, top_k, Metric, SimilarityMatrix};
use crate::synth::{generate, SynthConfig};
use crate::trainer::{embed, train_traced, EmbeddingModel, TrainConfig};

/// Attaches the file name to data errors; I/O errors already carry it.
fn at(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::Io { .. } => CliError::Runtime(e.to_string()),
        other => CliError::Runtime(format!("{}: {other}", path.display())),
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn load_pooled(path: &Path) -> Result<FeatureSet, CliError> {
    let set = load_features(path, FeatureFormat::from_path(path)).map_err(at(path))?;
    if set.is_pooled() {
        Ok(set)
    } else {
        eprintln!("mean-pooling frame-level features from {}", path.display());
        Ok(mean_pool(&set))
    }
}

fn load_truth(cfg: &RunConfig, key: &str) -> Result<RelevanceTable, CliError> {
    let path = cfg.require_path(key)?;
    match cfg.path("candidates") {
        Some(cand) => load_relevance_with_candidates(&path, &cand).map_err(at(&path)),
        None => load_relevance(&path).map_err(at(&path)),
    }
}

fn train_config(cfg: &RunConfig, dim: usize, epochs: usize) -> Result<TrainConfig, CliError> {
    let tc = TrainConfig {
        embed_dim: dim,
        epochs,
        margin: cfg.parse("margin")?,
        learning_rate: cfg.parse("lr")?,
        triplets_per_anchor: cfg.parse("triplets-per-anchor")?,
        batch_size: cfg.parse("batch-size")?,
        seed: cfg.parse("seed")?,
    };
    tc.validate().map_err(usage)?;
    Ok(tc)
}

fn k_grids(cfg: &RunConfig) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    let hit: Vec<usize> = cfg.list("k-hit")?;
    let recall: Vec<usize> = cfg.list("k-recall")?;
    if hit.iter().chain(&recall).any(|&k| k == 0) {
        return Err(CliError::Usage("K values must be at least 1".into()));
    }
    Ok((hit, recall))
}

fn positive(cfg: &RunConfig, key: &str) -> Result<usize, CliError> {
    let v: usize = cfg.parse(key)?;
    if v == 0 {
        return Err(CliError::Usage(format!("{key} must be at least 1")));
    }
    Ok(v)
}

pub(super) fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let sc = SynthConfig {
        n_items: cfg.parse("n-items")?,
        n_clusters: cfg.parse("n-clusters")?,
        raw_dim: cfg.parse("raw-dim")?,
        n_channels: cfg.parse("channels")?,
        noise_sigma: cfg.parse("noise")?,
        truth_len: cfg.parse("truth-len")?,
        latent_dim: cfg.parse("latent-dim")?,
        seed: cfg.parse("seed")?,
    };
    sc.validate().map_err(usage)?;
    let out = cfg.require_path("out")?;
    let ds = generate(&sc)?;
    ds.write(&out)?;
    println!(
        "wrote {} items, {} channels of dim {} to {}",
        sc.n_items,
        sc.n_channels,
        sc.raw_dim,
        out.display()
    );
    Ok(())
}

pub(super) fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let tc = train_config(cfg, positive(cfg, "dim")?, cfg.parse("epochs")?)?;
    let features = load_pooled(&cfg.require_path("features")?)?;
    let truth = load_truth(cfg, "truth")?;
    let out = cfg.require_path("out")?;
    let (model, trace) = train_traced(&truth, &features, &tc)?;
    if let Some(l) = trace.initial_loss {
        eprintln!("initial mean triplet loss {l:.6}");
    }
    for (e, (l, n)) in trace.epoch_losses.iter().zip(&trace.triplets_per_epoch).enumerate() {
        eprintln!("epoch {}: {n} triplets, mean loss {l:.6}", e + 1);
    }
    if trace.skipped_anchors > 0 {
        eprintln!(
            "warning: {} anchors had no valid negative and were skipped",
            trace.skipped_anchors
        );
    }
    model.save(&out)?;
    println!(
        "wrote {}x{} model to {}",
        model.embed_dim(),
        model.input_dim(),
        out.display()
    );
    Ok(())
}

fn select(set: &FeatureSet, ids_path: Option<std::path::PathBuf>) -> Result<FeatureSet, CliError> {
    match ids_path {
        None => Ok(set.clone()),
        Some(p) => {
            let ids = load_candidates(&p).map_err(at(&p))?;
            set.select(&ids).map_err(at(&p))
        }
    }
}

pub(super) fn predict(cfg: &RunConfig) -> Result<(), CliError> {
    let metric: Metric = cfg.parse("metric")?;
    let k = positive(cfg, "k")?;
    let exclude_self: bool = cfg.parse("exclude-self")?;
    let out = cfg.require_path("out")?;
    let mut features = load_pooled(&cfg.require_path("features")?)?;
    if let Some(mp) = cfg.path("model") {
        let model = EmbeddingModel::load(&mp).map_err(at(&mp))?;
        features = embed(&model, &features).map_err(at(&mp))?;
    }
    let queries = select(&features, cfg.path("queries"))?;
    let candidates = select(&features, cfg.path("candidates"))?;
    let matrix = similarity_matrix_with(&queries, &candidates, metric)?;
    if let Some(mp) = cfg.path("matrix") {
        matrix.save(&mp)?;
    }
    let pred = top_k(&matrix, k, exclude_self)?;
    save_predictions(&pred, &out)?;
    println!(
        "wrote top-{k} {} predictions for {} queries to {}",
        metric.name(),
        pred.len(),
        out.display()
    );
    Ok(())
}

pub(super) fn fuse(cfg: &RunConfig) -> Result<(), CliError> {
    let inputs: Vec<String> = cfg.list("inputs")?;
    if inputs.len() < 2 {
        return Err(CliError::Usage("fuse needs at least two --inputs".into()));
    }
    let weights: Vec<f64> = match cfg.get("weights") {
        Some(_) => cfg.list("weights")?,
        None => Vec::new(),
    };
    if !weights.is_empty() {
        if weights.len() != inputs.len() {
            return Err(CliError::Usage(format!(
                "{} weights for {} inputs",
                weights.len(),
                inputs.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(CliError::Usage(
                "weights must be non-negative with a positive sum".into(),
            ));
        }
    }
    let out = cfg.path("out");
    let matrix_out = cfg.path("matrix");
    if out.is_none() && matrix_out.is_none() {
        return Err(CliError::Usage("fuse needs --out and/or --matrix".into()));
    }
    let k = positive(cfg, "k")?;
    let exclude_self: bool = cfg.parse("exclude-self")?;
    let matrices = inputs
        .iter()
        .map(|p| SimilarityMatrix::load(Path::new(p)).map_err(at(Path::new(p))))
        .collect::<Result<Vec<_>, _>>()?;
    let fused = fuse_matrices(&matrices, &weights)?;
    if let Some(p) = matrix_out {
        fused.save(&p)?;
        println!(
            "wrote fused {}x{} matrix to {}",
            fused.rows(),
            fused.cols(),
            p.display()
        );
    }
    if let Some(p) = out {
        save_predictions(&top_k(&fused, k, exclude_self)?, &p)?;
        println!("wrote top-{k} fused predictions to {}", p.display());
    }
    Ok(())
}

pub(super) fn eval(cfg: &RunConfig) -> Result<(), CliError> {
    let (k_hit, k_recall) = k_grids(cfg)?;
    let truth = load_truth(cfg, "truth")?;
    let pred_path = cfg.require_path("pred")?;
    let pred = load_predictions(&pred_path).map_err(at(&pred_path))?;
    let report = evaluate(&truth, &pred, &k_hit, &k_recall)?;
    print!("{}", report.to_text());
    if let Some(p) = cfg.path("out") {
        write_file(&p, report.to_key_values().as_bytes())?;
    }
    Ok(())
}

pub(super) fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let dims: Vec<usize> = cfg.list("dims")?;
    let epochs: Vec<usize> = cfg.list("epochs")?;
    let (k_hit, k_recall) = k_grids(cfg)?;
    let metric: Metric = cfg.parse("metric")?;
    let exclude_self: bool = cfg.parse("exclude-self")?;
    let configs = dims
        .iter()
        .flat_map(|&d| epochs.iter().map(move |&e| (d, e)))
        .map(|(d, e)| {
            if d == 0 {
                return Err(CliError::Usage("dims must be at least 1".into()));
            }
            train_config(cfg, d, e)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let features = load_pooled(&cfg.require_path("features")?)?;
    let truth = load_truth(cfg, "truth")?;
    let eval_path = cfg.require_path("eval-truth")?;
    let eval_truth = load_relevance(&eval_path).map_err(at(&eval_path))?;
    let k_max = k_hit.iter().chain(&k_recall).copied().max().unwrap_or(1);

    let mut rows: Vec<(Vec<String>, EvalReport)> = Vec::with_capacity(configs.len());
    for tc in &configs {
        let (model, _) = train_traced(&truth, &features, tc)?;
        let embedded = embed(&model, &features)?;
        let matrix = similarity_matrix_with(&embedded, &embedded, metric)?;
        let pred = top_k(&matrix, k_max, exclude_self)?;
        let report = evaluate(&eval_truth, &pred, &k_hit, &k_recall)?;
        eprintln!("dim {} epochs {} done", tc.embed_dim, tc.epochs);
        rows.push((vec![tc.embed_dim.to_string(), tc.epochs.to_string()], report));
    }
    let refs: Vec<(Vec<String>, &EvalReport)> = rows.iter().map(|(l, r)| (l.clone(), r)).collect();
    let table = format_table(&["#dim", "#epoch"], &refs);
    print!("{table}");
    if let Some(p) = cfg.path("out") {
        write_file(&p, table.as_bytes())?;
    }
    Ok(())
}
