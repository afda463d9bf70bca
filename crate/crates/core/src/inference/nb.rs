use ndarray::{Array2, ArrayView2};

use crate::corpus::IdIndex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bernoulli naive Bayes over task presence, one binary class per skill.
///
/// Stored per skill `i` and task `k`: `p1[i][k] = P(t_k = 1 | s_i = 1)` and
/// `p0[i][k] = P(t_k = 1 | s_i = 0)`, all strictly inside `(0, 1)`.
#[derive(Debug, Clone)]
pub struct NbModel<F> {
    pub alpha: F,
    pub vocabulary: IdIndex,
    /// `P(s_i = 1)`, clamped away from 0 and 1.
    pub prior: Vec<F>,
    pub p1: Array2<F>,
    pub p0: Array2<F>,
    /// Log likelihood ratio contributed by a present task, skills x tasks.
    present_llr: Array2<F>,
    /// Log likelihood ratio contributed by an absent task, skills x tasks.
    absent_llr: Array2<F>,
}

/// Per-skill training diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillTraining<F> {
    pub positives: usize,
    pub prior: F,
    /// Skill effective in zero or in all occupations; its prior was clamped.
    pub degenerate: bool,
}

/// Result of scoring one token set.
#[derive(Debug, Clone, PartialEq)]
pub struct Inference<F> {
    pub log_odds: Vec<F>,
    pub posterior: Vec<F>,
    /// Tokens not in the model vocabulary, dropped before scoring.
    pub unknown_tokens: usize,
}

/// Trains the model from occupations x tasks presence and occupations x
/// skills effective use, with additive smoothing `alpha`:
///
/// `P(t=1|s=b) = (count(t=1, s=b) + alpha) / (count(s=b) + 2 alpha)` and
/// `P(s=1) = count(s=1) / |O|` clamped to `[alpha/|O|, 1 - alpha/|O|]`
/// (or 1/2 when that interval is empty).
pub fn train_nb<F: Scalar>(
    task_presence: ArrayView2<'_, bool>,
    effective: ArrayView2<'_, bool>,
    vocabulary: IdIndex,
    alpha: F,
) -> Result<(NbModel<F>, Vec<SkillTraining<F>>)> {
    if !(alpha > F::zero() && alpha.is_finite()) {
        return Err(Error::Validation(format!("smoothing alpha must be positive, got {alpha}")));
    }
    let (n_occ, n_tasks) = task_presence.dim();
    let (n_occ2, n_skills) = effective.dim();
    if n_occ != n_occ2 {
        return Err(Error::LengthMismatch {
            left: n_occ,
            right: n_occ2,
        });
    }
    if n_occ == 0 {
        return Err(Error::Validation("cannot train on zero occupations".into()));
    }
    if vocabulary.len() != n_tasks {
        return Err(Error::Shape(format!(
            "vocabulary has {} tokens but presence matrix has {} columns",
            vocabulary.len(),
            n_tasks
        )));
    }

    let two = F::lit(2.0);
    let n = F::count(n_occ);
    let lo = alpha / n;
    let hi = F::one() - alpha / n;
    let mut prior = Vec::with_capacity(n_skills);
    let mut report = Vec::with_capacity(n_skills);
    let mut p1 = Array2::zeros((n_skills, n_tasks));
    let mut p0 = Array2::zeros((n_skills, n_tasks));

    for i in 0..n_skills {
        let skill = effective.column(i);
        let pos = skill.iter().filter(|&&b| b).count();
        let neg = n_occ - pos;
        let raw = F::count(pos) / n;
        // With alpha >= |O|/2 the interval is empty; collapse to its midpoint.
        let clamped = if lo >= hi { F::lit(0.5) } else { raw.max(lo).min(hi) };
        prior.push(clamped);
        report.push(SkillTraining {
            positives: pos,
            prior: clamped,
            degenerate: pos == 0 || pos == n_occ,
        });
        for k in 0..n_tasks {
            let task = task_presence.column(k);
            let both = task.iter().zip(skill).filter(|(&t, &s)| t && s).count();
            let only_task = task.iter().zip(skill).filter(|(&t, &s)| t && !s).count();
            p1[[i, k]] = (F::count(both) + alpha) / (F::count(pos) + two * alpha);
            p0[[i, k]] = (F::count(only_task) + alpha) / (F::count(neg) + two * alpha);
        }
    }

    let present_llr = Array2::from_shape_fn((n_skills, n_tasks), |(i, k)| (p1[[i, k]] / p0[[i, k]]).ln());
    let absent_llr = Array2::from_shape_fn((n_skills, n_tasks), |(i, k)| {
        ((F::one() - p1[[i, k]]) / (F::one() - p0[[i, k]])).ln()
    });

    Ok((
        NbModel {
            alpha,
            vocabulary,
            prior,
            p1,
            p0,
            present_llr,
            absent_llr,
        },
        report,
    ))
}

fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

impl<F: Scalar> NbModel<F> {
    pub fn n_skills(&self) -> usize {
        self.prior.len()
    }

    /// Per-skill log posterior odds for a presence vector over the whole
    /// vocabulary. Every task contributes, present or absent, summed in
    /// vocabulary order.
    pub fn log_odds(&self, present: &[bool]) -> Result<Vec<F>> {
        if present.len() != self.vocabulary.len() {
            return Err(Error::LengthMismatch {
                left: present.len(),
                right: self.vocabulary.len(),
            });
        }
        Ok((0..self.n_skills())
            .map(|i| {
                let p = self.prior[i];
                let mut acc = (p / (F::one() - p)).ln();
                let pres = self.present_llr.row(i);
                let abs = self.absent_llr.row(i);
                for (k, &on) in present.iter().enumerate() {
                    acc = acc + if on { pres[k] } else { abs[k] };
                }
                acc
            })
            .collect())
    }

    /// Presence vector for a token set. Unknown tokens are counted and
    /// dropped; duplicates collapse.
    pub fn presence<S: AsRef<str>>(&self, tokens: &[S]) -> (Vec<bool>, usize) {
        let mut present = vec![false; self.vocabulary.len()];
        let mut unknown = 0;
        for t in tokens {
            match self.vocabulary.get(t.as_ref()) {
                Some(k) => present[k] = true,
                None => unknown += 1,
            }
        }
        (present, unknown)
    }

    /// Skill posteriors `P(s=1 | tasks)` for a token set.
    pub fn infer<S: AsRef<str>>(&self, tokens: &[S]) -> Inference<F> {
        let (present, unknown_tokens) = self.presence(tokens);
        let log_odds = self.log_odds(&present).expect("presence sized to vocabulary");
        let posterior = log_odds.iter().map(|&x| sigmoid(x)).collect();
        Inference {
            log_odds,
            posterior,
            unknown_tokens,
        }
    }
}
