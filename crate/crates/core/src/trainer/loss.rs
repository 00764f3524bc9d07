//! Triplet hinge loss over a linear embedding and its analytic gradient.
//!
//! With `D(u, v) = ‖u − v‖²` and `f(x) = W·x`, a triplet contributes
//! `max(0, m + ‖W·δp‖² − ‖W·δn‖²)` where `δp = xa − xp`, `δn = xa − xn`.
//! Its gradient is `2·(W·δp)·δpᵀ − 2·(W·δn)·δnᵀ` when the hinge argument is
//! strictly positive and zero otherwise.

use rayon::prelude::*;

use super::triplets::{Triplet, TripletBatch};
use super::EmbeddingModel;
use crate::datamodel::FeatureSet;
use crate::error::{Error, Result};

/// Triplets per parallel work unit. Partial sums are reduced in unit order,
/// so results do not depend on the thread count.
const CHUNK: usize = 16;

struct Scratch {
    dp: Vec<f64>,
    dn: Vec<f64>,
    wp: Vec<f64>,
    wn: Vec<f64>,
}

impl Scratch {
    fn new(input: usize, embed: usize) -> Self {
        Scratch {
            dp: vec![0.0; input],
            dn: vec![0.0; input],
            wp: vec![0.0; embed],
            wn: vec![0.0; embed],
        }
    }
}

fn diff(a: &[f32], b: &[f32], out: &mut [f64]) {
    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
        *o = f64::from(x) - f64::from(y);
    }
}

fn apply(weight: &[f64], input: usize, x: &[f64], out: &mut [f64]) {
    for (row, o) in weight.chunks_exact(input).zip(out.iter_mut()) {
        *o = row.iter().zip(x).map(|(w, v)| w * v).sum();
    }
}

/// Hinge argument of one triplet; fills the scratch projections.
fn hinge(t: &Triplet, features: &FeatureSet, weight: &[f64], input: usize, margin: f64, s: &mut Scratch) -> f64 {
    let a = features.vector(t.anchor);
    diff(a, features.vector(t.positive), &mut s.dp);
    diff(a, features.vector(t.negative), &mut s.dn);
    apply(weight, input, &s.dp, &mut s.wp);
    apply(weight, input, &s.dn, &mut s.wn);
    let dpos: f64 = s.wp.iter().map(|v| v * v).sum();
    let dneg: f64 = s.wn.iter().map(|v| v * v).sum();
    margin + dpos - dneg
}

/// Loss sum over `triples`, adding the gradient into `grad` when given.
fn accumulate_serial(
    triples: &[Triplet],
    features: &FeatureSet,
    weight: &[f64],
    input: usize,
    embed: usize,
    margin: f64,
    mut grad: Option<&mut [f64]>,
) -> f64 {
    let mut s = Scratch::new(input, embed);
    let mut loss = 0.0;
    for t in triples {
        let h = hinge(t, features, weight, input, margin, &mut s);
        if h <= 0.0 {
            continue;
        }
        loss += h;
        if let Some(g) = grad.as_deref_mut() {
            for ((row, &wp), &wn) in g.chunks_exact_mut(input).zip(&s.wp).zip(&s.wn) {
                let (cp, cn) = (2.0 * wp, 2.0 * wn);
                for ((gij, &p), &n) in row.iter_mut().zip(&s.dp).zip(&s.dn) {
                    *gij += cp * p - cn * n;
                }
            }
        }
    }
    loss
}

/// Loss sum and (optionally) gradient, chunked for parallelism with an
/// order-fixed reduction.
pub(crate) fn loss_and_gradient(
    triples: &[Triplet],
    features: &FeatureSet,
    weight: &[f64],
    input: usize,
    embed: usize,
    margin: f64,
    with_grad: bool,
) -> (f64, Option<Vec<f64>>) {
    let parts: Vec<(f64, Option<Vec<f64>>)> = triples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut g = with_grad.then(|| vec![0.0; input * embed]);
            let l = accumulate_serial(chunk, features, weight, input, embed, margin, g.as_deref_mut());
            (l, g)
        })
        .collect();
    let mut loss = 0.0;
    let mut grad = with_grad.then(|| vec![0.0; input * embed]);
    for (l, g) in parts {
        loss += l;
        if let (Some(total), Some(g)) = (grad.as_mut(), g) {
            for (t, v) in total.iter_mut().zip(g) {
                *t += v;
            }
        }
    }
    (loss, grad)
}

fn check(batch: &TripletBatch, features: &FeatureSet, model: &EmbeddingModel, margin: f64) -> Result<()> {
    model.check_input(features)?;
    features.require_pooled("triplet loss")?;
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(Error::invalid(format!(
            "margin must be finite and non-negative, got {margin}"
        )));
    }
    let n = features.len();
    if batch
        .triples
        .iter()
        .any(|t| t.anchor >= n || t.positive >= n || t.negative >= n)
    {
        return Err(Error::invalid("triplet refers to a row outside the feature set"));
    }
    Ok(())
}

/// `Σ max(0, m + D(f(xa), f(xp)) − D(f(xa), f(xn)))` over the batch.
pub fn triplet_loss(batch: &TripletBatch, features: &FeatureSet, model: &EmbeddingModel, margin: f64) -> Result<f64> {
    check(batch, features, model, margin)?;
    let (loss, _) = loss_and_gradient(
        &batch.triples,
        features,
        model.weight(),
        model.input_dim(),
        model.embed_dim(),
        margin,
        false,
    );
    Ok(loss)
}

/// `∂L/∂W` of [`triplet_loss`], row-major `embed_dim × input_dim`.
///
/// Triplets whose hinge argument is exactly zero contribute nothing.
pub fn loss_gradient(
    batch: &TripletBatch,
    features: &FeatureSet,
    model: &EmbeddingModel,
    margin: f64,
) -> Result<Vec<f64>> {
    check(batch, features, model, margin)?;
    let (_, grad) = loss_and_gradient(
        &batch.triples,
        features,
        model.weight(),
        model.input_dim(),
        model.embed_dim(),
        margin,
        true,
    );
    Ok(grad.expect("requested"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::ItemId;

    fn set(vectors: &[(&str, [f32; 2])]) -> FeatureSet {
        FeatureSet::from_vectors(2, vectors.iter().map(|(n, v)| (ItemId::new(*n).unwrap(), *v))).unwrap()
    }

    #[test]
    fn hinge_examples() {
        let f = set(&[
            ("a", [0.0, 0.0]),
            ("p", [0.0, 0.0]),
            ("n", [1.0, 0.0]),
            ("h", [0.5, 0.0]),
        ]);
        let w = EmbeddingModel::identity(2);
        let inactive = TripletBatch::from_ids(&f, &[("a", "p", "n")]).unwrap();
        assert_eq!(triplet_loss(&inactive, &f, &w, 1.0).unwrap(), 0.0);
        assert_eq!(loss_gradient(&inactive, &f, &w, 1.0).unwrap(), vec![0.0; 4]);

        let active = TripletBatch::from_ids(&f, &[("a", "p", "h")]).unwrap();
        assert_eq!(triplet_loss(&active, &f, &w, 1.0).unwrap(), 0.75);
        assert_eq!(loss_gradient(&active, &f, &w, 1.0).unwrap(), vec![-0.5, 0.0, 0.0, 0.0]);

        let both = TripletBatch::from_ids(&f, &[("a", "p", "n"), ("a", "p", "h")]).unwrap();
        assert_eq!(triplet_loss(&both, &f, &w, 1.0).unwrap(), 0.75);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let f = set(&[("a", [0.0, 0.0]), ("p", [0.0, 0.0]), ("n", [1.0, 0.0])]);
        let b = TripletBatch::from_ids(&f, &[("a", "p", "n")]).unwrap();
        let m = EmbeddingModel::identity(3);
        assert!(matches!(
            triplet_loss(&b, &f, &m, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(loss_gradient(&b, &f, &m, 1.0).is_err());
        assert!(triplet_loss(&b, &f, &EmbeddingModel::identity(2), -1.0).is_err());
    }
}
