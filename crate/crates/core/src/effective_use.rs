//! Revealed comparative advantage over a non-negative weight matrix, shared by
//! the occupation x skill and city x skill computations.

use ndarray::{Array2, ArrayView2, Zip};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// RCA values with the marginals they were computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaMatrix<F> {
    pub values: Array2<F>,
    pub row_sums: Vec<F>,
    pub col_sums: Vec<F>,
    pub total: F,
}

/// Threshold rule for turning RCA into effective use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// `rca > 1`, used for occupation x skill.
    Strict,
    /// `rca >= 1`, used for city x skill.
    NonStrict,
}

/// `rca[r][c] = (w[r][c] / rowsum(r)) / (colsum(c) / total)`, with 0 wherever
/// the row or column total is 0.
///
/// Marginals are accumulated sequentially in index order so the result does
/// not depend on any scheduling.
pub fn rca<F: Scalar>(weights: ArrayView2<'_, F>) -> Result<RcaMatrix<F>> {
    let (rows, cols) = weights.dim();
    if weights.iter().any(|w| !(w.is_finite() && *w >= F::zero())) {
        return Err(Error::Validation("RCA weights must be finite and non-negative".into()));
    }
    let mut row_sums = vec![F::zero(); rows];
    let mut col_sums = vec![F::zero(); cols];
    for r in 0..rows {
        for c in 0..cols {
            let w = weights[[r, c]];
            row_sums[r] = row_sums[r] + w;
            col_sums[c] = col_sums[c] + w;
        }
    }
    let total = row_sums.iter().fold(F::zero(), |acc, &x| acc + x);
    if total <= F::zero() {
        return Err(Error::Degenerate("RCA of an all-zero matrix".into()));
    }
    let mut values = Array2::zeros((rows, cols));
    for r in 0..rows {
        if row_sums[r] <= F::zero() {
            continue;
        }
        for c in 0..cols {
            if col_sums[c] > F::zero() {
                values[[r, c]] = (weights[[r, c]] / row_sums[r]) / (col_sums[c] / total);
            }
        }
    }
    Ok(RcaMatrix {
        values,
        row_sums,
        col_sums,
        total,
    })
}

/// Binary effective-use matrix from RCA values.
pub fn threshold_binary<F: Scalar>(rca: &RcaMatrix<F>, rule: Threshold) -> Array2<bool> {
    let mut out = Array2::from_elem(rca.values.dim(), false);
    Zip::from(&mut out).and(&rca.values).for_each(|e, &v| {
        *e = match rule {
            Threshold::Strict => v > F::one(),
            Threshold::NonStrict => v >= F::one(),
        }
    });
    out
}
