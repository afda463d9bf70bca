use ndarray::Array2;
use rayon::prelude::*;

use super::nb::NbModel;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Skill posteriors for target occupations and their binarization.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillTaxonomy<F> {
    /// occupations x skills, `P(s=1 | tasks of o)`.
    pub posterior: Array2<F>,
    /// `posterior > threshold`.
    pub effective: Array2<bool>,
    pub threshold: F,
    /// Rows with no effective skill.
    pub degenerate: Vec<bool>,
}

/// Binarizes posteriors with a strict `>` comparison against `threshold`.
pub fn binarize<F: Scalar>(posterior: Array2<F>, threshold: F) -> Result<SkillTaxonomy<F>> {
    if !(threshold > F::zero() && threshold < F::one()) {
        return Err(Error::Validation(format!("binarization threshold must lie in (0, 1), got {threshold}")));
    }
    let effective = posterior.mapv(|p| p > threshold);
    let degenerate = effective.rows().into_iter().map(|r| !r.iter().any(|&b| b)).collect();
    Ok(SkillTaxonomy {
        posterior,
        effective,
        threshold,
        degenerate,
    })
}

/// Scores every token set with `model`. Returns `(log_odds, posterior,
/// unknown-token counts)`, one row per token set; rows run in parallel and
/// each is computed independently.
pub fn infer_taxonomy<F: Scalar, S: AsRef<str> + Sync>(
    model: &NbModel<F>,
    token_sets: &[Vec<S>],
) -> (Array2<F>, Array2<F>, Vec<usize>) {
    let results: Vec<_> = token_sets.par_iter().map(|toks| model.infer(toks)).collect();
    let shape = (token_sets.len(), model.n_skills());
    let mut log_odds = Array2::zeros(shape);
    let mut posterior = Array2::zeros(shape);
    let mut unknown = Vec::with_capacity(results.len());
    for (o, r) in results.into_iter().enumerate() {
        for i in 0..shape.1 {
            log_odds[[o, i]] = r.log_odds[i];
            posterior[[o, i]] = r.posterior[i];
        }
        unknown.push(r.unknown_tokens);
    }
    (log_odds, posterior, unknown)
}
