use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mutual information (bits) between task presence and skill effective use.
/// Rows are tasks, columns are skills.
#[derive(Debug, Clone, PartialEq)]
pub struct MiMatrix<F> {
    pub values: Array2<F>,
}

/// MI in bits of the empirical joint distribution of two binary variables,
/// given the four cell counts. `0 log 0 = 0`.
pub fn mutual_information_counts<F: Scalar>(n11: usize, n10: usize, n01: usize, n00: usize) -> F {
    let n = n11 + n10 + n01 + n00;
    if n == 0 {
        return F::zero();
    }
    let x1 = n11 + n10;
    let x0 = n01 + n00;
    let y1 = n11 + n01;
    let y0 = n10 + n00;
    let nf = F::count(n);
    let cell = |nxy: usize, nx: usize, ny: usize| -> F {
        if nxy == 0 {
            return F::zero();
        }
        // p_xy / (p_x p_y) = n_xy n / (n_x n_y); exactly 1 under independence.
        let ratio = (F::count(nxy) * nf) / (F::count(nx) * F::count(ny));
        F::count(nxy) / nf * ratio.log2()
    };
    let mi = cell(n11, x1, y1) + cell(n10, x1, y0) + cell(n01, x0, y1) + cell(n00, x0, y0);
    // Rounding can leave a tiny negative residue on near-independent tables.
    if mi < F::zero() {
        F::zero()
    } else {
        mi
    }
}

/// MI in bits between two equal-length binary vectors.
pub fn mutual_information<F: Scalar>(x: &[bool], y: &[bool]) -> Result<F> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Validation("mutual information of empty vectors".into()));
    }
    let (mut n11, mut n10, mut n01, mut n00) = (0, 0, 0, 0);
    for (&a, &b) in x.iter().zip(y) {
        match (a, b) {
            (true, true) => n11 += 1,
            (true, false) => n10 += 1,
            (false, true) => n01 += 1,
            (false, false) => n00 += 1,
        }
    }
    Ok(mutual_information_counts(n11, n10, n01, n00))
}

/// Task x skill MI matrix over the shared occupation axis.
///
/// `task_presence` is occupations x tasks, `effective` is occupations x
/// skills. Rows are computed in parallel; each entry depends only on integer
/// counts, so the result is independent of the thread count.
pub fn build_mi_matrix<F: Scalar>(
    task_presence: ArrayView2<'_, bool>,
    effective: ArrayView2<'_, bool>,
) -> Result<MiMatrix<F>> {
    let (n_occ, n_tasks) = task_presence.dim();
    let (n_occ2, n_skills) = effective.dim();
    if n_occ != n_occ2 {
        return Err(Error::LengthMismatch {
            left: n_occ,
            right: n_occ2,
        });
    }
    let skill_totals: Vec<usize> = (0..n_skills)
        .map(|i| effective.column(i).iter().filter(|&&b| b).count())
        .collect();
    let rows: Vec<Vec<F>> = (0..n_tasks)
        .into_par_iter()
        .map(|k| {
            let col = task_presence.column(k);
            let tk = col.iter().filter(|&&b| b).count();
            (0..n_skills)
                .map(|i| {
                    let n11 = col
                        .iter()
                        .zip(effective.column(i))
                        .filter(|(&a, &b)| a && b)
                        .count();
                    let n10 = tk - n11;
                    let n01 = skill_totals[i] - n11;
                    let n00 = n_occ - n11 - n10 - n01;
                    mutual_information_counts(n11, n10, n01, n00)
                })
                .collect()
        })
        .collect();
    let flat: Vec<F> = rows.into_iter().flatten().collect();
    let values = Array2::from_shape_vec((n_tasks, n_skills), flat).expect("shape matches");
    Ok(MiMatrix { values })
}
