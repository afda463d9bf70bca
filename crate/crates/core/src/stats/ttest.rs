use statrs::function::beta::checked_beta_reg;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult<F> {
    pub t: F,
    pub welch_df: F,
    pub p_two_sided: F,
}

fn mean_var<F: Scalar>(x: &[F]) -> (F, F) {
    let n = F::count(x.len());
    let mean = x.iter().fold(F::zero(), |a, &v| a + v) / n;
    let ss = x.iter().fold(F::zero(), |a, &v| a + (v - mean) * (v - mean));
    (mean, ss / (n - F::one()))
}

/// Two-sided tail probability of Student's t with `df` degrees of freedom:
/// `I_{df/(df+t^2)}(df/2, 1/2)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    if !(df > 0.0) {
        return Err(Error::Validation(format!("degrees of freedom must be positive, got {df}")));
    }
    if t.is_nan() {
        return Err(Error::Validation("t statistic is NaN".into()));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let x = df / (df + t * t);
    checked_beta_reg(df / 2.0, 0.5, x)
        .map(|p| p.clamp(0.0, 1.0))
        .map_err(|e| Error::Validation(format!("incomplete beta: {e}")))
}

/// Welch's unequal-variance t-test of `mean(a) - mean(b)`.
pub fn welch_ttest<F: Scalar>(a: &[F], b: &[F]) -> Result<TTestResult<F>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::Validation(format!(
            "Welch test needs at least 2 observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    if va == F::zero() && vb == F::zero() {
        return Err(Error::Degenerate("both samples have zero variance".into()));
    }
    let (na, nb) = (F::count(a.len()), F::count(b.len()));
    let (sa, sb) = (va / na, vb / nb);
    let se2 = sa + sb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (na - F::one()) + sb * sb / (nb - F::one()));
    let p = student_t_two_sided_p(t.as_f64(), df.as_f64())?;
    Ok(TTestResult {
        t,
        welch_df: df,
        p_two_sided: F::lit(p),
    })
}

/// Pearson correlation coefficient.
pub fn pearson<F: Scalar>(x: &[F], y: &[F]) -> Result<F> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Validation("correlation needs at least 2 points".into()));
    }
    let n = F::count(x.len());
    let mx = x.iter().fold(F::zero(), |a, &v| a + v) / n;
    let my = y.iter().fold(F::zero(), |a, &v| a + v) / n;
    let (mut sxy, mut sxx, mut syy) = (F::zero(), F::zero(), F::zero());
    for (&a, &b) in x.iter().zip(y) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
        syy = syy + (b - my) * (b - my);
    }
    if sxx == F::zero() || syy == F::zero() {
        return Err(Error::Degenerate("correlation of a constant vector".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    /// Two-sided tail by composite Simpson integration of the t density
    /// (normalizing constant from its own integral over a wide interval).
    fn simpson_p(t: f64, df: f64) -> f64 {
        let dens = |x: f64| (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
        let integrate = |a: f64, b: f64| {
            let n = 200_000;
            let h = (b - a) / n as f64;
            let mut s = dens(a) + dens(b);
            for i in 1..n {
                s += dens(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        // tail beyond 1e4 is negligible for df = 4 at this tolerance
        let whole = 2.0 * integrate(0.0, 1e4);
        2.0 * integrate(t.abs(), 1e4) / whole
    }

    #[test]
    fn identical_samples() {
        let r = welch_ttest(&[1.0f64, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn shifted_samples() {
        let r = welch_ttest(&[1.0f64, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!((r.t + 1.224_744_871_391_589).abs() < 1e-12);
        assert!((r.welch_df - 4.0).abs() < 1e-12);
        assert!((r.p_two_sided - 0.288).abs() < 1e-3);
        assert!((r.p_two_sided - simpson_p(r.t, 4.0)).abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(welch_ttest(&[1.0f64], &[1.0, 2.0]).is_err());
        assert!(matches!(welch_ttest(&[1.0f64, 1.0], &[2.0, 2.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn antisymmetric_and_monotone() {
        let mut rng = SeededRng::new(8);
        for _ in 0..200 {
            let a: Vec<f64> = (0..2 + rng.below(8)).map(|_| rng.unit_f64() * 3.0).collect();
            let b: Vec<f64> = (0..2 + rng.below(8)).map(|_| rng.unit_f64() * 3.0 + 0.5).collect();
            let ab = welch_ttest(&a, &b).unwrap();
            let ba = welch_ttest(&b, &a).unwrap();
            assert_eq!(ab.t, -ba.t);
            assert_eq!(ab.p_two_sided, ba.p_two_sided);
        }
        let mut last = 1.0;
        for i in 1..50 {
            let p = student_t_two_sided_p(i as f64 * 0.2, 7.0).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn correlation() {
        let r = pearson(&[1.0f64, 2.0, 3.0], &[2.0, 4.0, 6.5]).unwrap();
        assert!(r > 0.99 && r <= 1.0);
        assert!(pearson(&[1.0f64, 1.0], &[1.0, 2.0]).is_err());
    }
}
