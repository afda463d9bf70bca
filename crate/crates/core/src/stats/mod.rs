//! Least squares with t-statistics and Welch's two-sample t-test.

mod ols;
mod ttest;

pub use ols::{ols, OlsFit};
pub use ttest::{pearson, student_t_two_sided_p, welch_ttest, TTestResult};
