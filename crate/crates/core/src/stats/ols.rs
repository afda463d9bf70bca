use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Ordinary least squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit<F> {
    pub coefficients: Vec<F>,
    pub std_errors: Vec<F>,
    /// `+inf` for every coefficient when the fit is exact.
    pub t_statistics: Vec<F>,
    pub r_squared: F,
    pub n: usize,
    pub dof: usize,
    pub ssr: F,
    pub residuals: Vec<F>,
    /// Residual variance is zero to working precision.
    pub exact_fit: bool,
}

/// Least squares via Householder QR of the design matrix. The design must
/// carry its own intercept column if one is wanted.
///
/// Standard errors use `sigma^2 (X'X)^-1` with `(X'X)^-1 = R^-1 R^-T`; the
/// coefficient of determination is `1 - SSR/SST` and is 0 for a constant
/// response.
pub fn ols<F: Scalar>(design: ArrayView2<'_, F>, response: ArrayView1<'_, F>) -> Result<OlsFit<F>> {
    let (n, p) = design.dim();
    if response.len() != n {
        return Err(Error::LengthMismatch { left: n, right: response.len() });
    }
    if p == 0 || n <= p {
        return Err(Error::Validation(format!("need more observations than parameters (n = {n}, p = {p})")));
    }
    if design.iter().chain(response.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Validation("design and response must be finite".into()));
    }

    let mut a: Array2<F> = design.to_owned();
    let mut qty: Array1<F> = response.to_owned();
    for j in 0..p {
        let norm = (j..n).fold(F::zero(), |s, i| s + a[[i, j]] * a[[i, j]]).sqrt();
        if norm == F::zero() {
            continue;
        }
        let alpha = if a[[j, j]] > F::zero() { -norm } else { norm };
        let mut v: Vec<F> = (j..n).map(|i| a[[i, j]]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(F::zero(), |s, &x| s + x * x);
        if vnorm2 == F::zero() {
            continue;
        }
        let two = F::lit(2.0);
        for col in j..p {
            let dot = (j..n).fold(F::zero(), |s, i| s + v[i - j] * a[[i, col]]);
            let f = two * dot / vnorm2;
            for i in j..n {
                a[[i, col]] = a[[i, col]] - f * v[i - j];
            }
        }
        let dot = (j..n).fold(F::zero(), |s, i| s + v[i - j] * qty[i]);
        let f = two * dot / vnorm2;
        for i in j..n {
            qty[i] = qty[i] - f * v[i - j];
        }
    }

    let max_diag = (0..p).fold(F::zero(), |m, j| m.max(a[[j, j]].abs()));
    let tol = F::epsilon().sqrt() * max_diag;
    if let Some(j) = (0..p).find(|&j| a[[j, j]].abs() <= tol) {
        return Err(Error::Degenerate(format!("design matrix is rank deficient at column {j}")));
    }

    let mut beta = vec![F::zero(); p];
    for j in (0..p).rev() {
        let mut s = qty[j];
        for k in (j + 1)..p {
            s = s - a[[j, k]] * beta[k];
        }
        beta[j] = s / a[[j, j]];
    }

    // R^-1, upper triangular
    let mut rinv = Array2::<F>::zeros((p, p));
    for j in 0..p {
        rinv[[j, j]] = F::one() / a[[j, j]];
        for i in (0..j).rev() {
            let mut s = F::zero();
            for k in (i + 1)..=j {
                s = s + a[[i, k]] * rinv[[k, j]];
            }
            rinv[[i, j]] = -s / a[[i, i]];
        }
    }

    let residuals: Vec<F> = (0..n)
        .map(|i| {
            let fitted = (0..p).fold(F::zero(), |s, j| s + design[[i, j]] * beta[j]);
            response[i] - fitted
        })
        .collect();
    let ssr = residuals.iter().fold(F::zero(), |s, &r| s + r * r);
    let nf = F::count(n);
    let mean = response.iter().fold(F::zero(), |s, &y| s + y) / nf;
    let sst = response.iter().fold(F::zero(), |s, &y| s + (y - mean) * (y - mean));
    let yy = response.iter().fold(F::zero(), |s, &y| s + y * y);
    let r_squared = if sst == F::zero() { F::zero() } else { F::one() - ssr / sst };

    let scale = F::epsilon() * F::lit(100.0);
    let exact_fit = ssr <= scale * scale * yy;
    let dof = n - p;
    let sigma2 = ssr / F::count(dof);
    let std_errors: Vec<F> = (0..p)
        .map(|j| {
            let d = (j..p).fold(F::zero(), |s, k| s + rinv[[j, k]] * rinv[[j, k]]);
            if exact_fit {
                F::zero()
            } else {
                (sigma2 * d).sqrt()
            }
        })
        .collect();
    let t_statistics = beta
        .iter()
        .zip(&std_errors)
        .map(|(&b, &se)| if exact_fit { F::infinity() } else { b / se })
        .collect();

    Ok(OlsFit {
        coefficients: beta,
        std_errors,
        t_statistics,
        r_squared,
        n,
        dof,
        ssr,
        residuals,
        exact_fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use ndarray::{array, Array2};

    fn with_intercept(x: &[f64]) -> Array2<f64> {
        Array2::from_shape_fn((x.len(), 2), |(i, j)| if j == 0 { 1.0 } else { x[i] })
    }

    /// Normal equations solved by Gauss-Jordan inversion of X'X.
    fn oracle(x: &Array2<f64>, y: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let (n, p) = x.dim();
        let mut g = vec![vec![0.0; 2 * p]; p];
        for i in 0..p {
            for j in 0..p {
                g[i][j] = (0..n).map(|r| x[[r, i]] * x[[r, j]]).sum();
            }
            g[i][p + i] = 1.0;
        }
        for c in 0..p {
            let piv = (c..p).max_by(|&a, &b| g[a][c].abs().partial_cmp(&g[b][c].abs()).unwrap()).unwrap();
            g.swap(c, piv);
            let d = g[c][c];
            for v in g[c].iter_mut() {
                *v /= d;
            }
            for r in 0..p {
                if r != c {
                    let f = g[r][c];
                    let row_c = g[c].clone();
                    for (v, rc) in g[r].iter_mut().zip(row_c) {
                        *v -= f * rc;
                    }
                }
            }
        }
        let inv: Vec<Vec<f64>> = g.iter().map(|r| r[p..].to_vec()).collect();
        let xty: Vec<f64> = (0..p).map(|j| (0..n).map(|r| x[[r, j]] * y[r]).sum()).collect();
        let beta: Vec<f64> = (0..p).map(|i| (0..p).map(|j| inv[i][j] * xty[j]).sum()).collect();
        let resid: Vec<f64> = (0..n).map(|r| y[r] - (0..p).map(|j| x[[r, j]] * beta[j]).sum::<f64>()).collect();
        let ssr: f64 = resid.iter().map(|e| e * e).sum();
        let mean = y.iter().sum::<f64>() / n as f64;
        let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
        let s2 = ssr / (n - p) as f64;
        let se = (0..p).map(|j| (s2 * inv[j][j]).sqrt()).collect();
        (beta, se, 1.0 - ssr / sst)
    }

    #[test]
    fn exact_line() {
        let x = with_intercept(&[1.0, 2.0, 3.0]);
        let fit = ols(x.view(), array![2.0, 4.0, 6.0].view()).unwrap();
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.exact_fit);
        assert!(fit.t_statistics.iter().all(|t| *t == f64::INFINITY));
    }

    #[test]
    fn constant_response() {
        let x = with_intercept(&[1.0, 2.0, 3.0, 4.0]);
        let fit = ols(x.view(), array![5.0, 5.0, 5.0, 5.0].view()).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn ten_point_fixture_matches_normal_equations() {
        let xs = [0.5, 1.0, 1.7, 2.2, 3.1, 3.9, 4.4, 5.0, 6.3, 7.1];
        let noise = [0.12, -0.3, 0.05, 0.22, -0.17, 0.08, -0.04, 0.31, -0.26, 0.1];
        let x2: Vec<f64> = xs.iter().map(|v: &f64| (v * 1.3).sin()).collect();
        let y: Vec<f64> = (0..10).map(|i| 1.5 + 0.8 * xs[i] - 2.0 * x2[i] + noise[i]).collect();
        let x = Array2::from_shape_fn((10, 3), |(i, j)| [1.0, xs[i], x2[i]][j]);
        let fit = ols(x.view(), Array1::from(y.clone()).view()).unwrap();
        let (b, se, r2) = oracle(&x, &y);
        for j in 0..3 {
            assert!((fit.coefficients[j] - b[j]).abs() < 1e-9);
            assert!((fit.std_errors[j] - se[j]).abs() < 1e-9);
        }
        assert!((fit.r_squared - r2).abs() < 1e-9);
        assert_eq!(fit.dof, 7);
    }

    #[test]
    fn errors() {
        let x = with_intercept(&[1.0, 2.0]);
        assert!(ols(x.view(), array![1.0, 2.0].view()).is_err());
        let collinear = Array2::from_shape_fn((4, 2), |(i, _)| i as f64);
        assert!(matches!(ols(collinear.view(), array![1.0, 2.0, 3.0, 5.0].view()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn residual_orthogonality_and_shift() {
        let mut rng = SeededRng::new(21);
        for _ in 0..200 {
            let n = 5 + rng.below(20) as usize;
            let x = Array2::from_shape_fn((n, 3), |(_, j)| if j == 0 { 1.0 } else { rng.unit_f64() * 10.0 - 5.0 });
            let y: Array1<f64> = (0..n).map(|i| 2.0 * x[[i, 1]] - x[[i, 2]] + rng.unit_f64()).collect();
            let fit = ols(x.view(), y.view()).unwrap();
            let scale = y.iter().map(|v| v.abs()).fold(1.0, f64::max) * n as f64;
            for j in 0..3 {
                let dot: f64 = (0..n).map(|i| x[[i, j]] * fit.residuals[i]).sum();
                assert!(dot.abs() < 1e-8 * scale, "{dot}");
            }
            let shifted = ols(x.view(), (&y + 3.0).view()).unwrap();
            assert!((shifted.coefficients[0] - fit.coefficients[0] - 3.0).abs() < 1e-10);
            for j in 1..3 {
                assert!((shifted.coefficients[j] - fit.coefficients[j]).abs() < 1e-10);
            }
            assert!((shifted.r_squared - fit.r_squared).abs() < 1e-10);
        }
    }
}
