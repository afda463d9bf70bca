//! City skill profiles: workers per skill, city x skill effective use and the
//! employment share of socio-cognitive occupations.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::effective_use::{rca, threshold_binary, RcaMatrix, Threshold};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `CS(c, s) = sum over o of census(c, o) * e(o, s)`, in exact integers.
pub fn city_skill_workers(census: ArrayView2<'_, u64>, effective: ArrayView2<'_, bool>) -> Result<Array2<u64>> {
    let (n_city, n_occ) = census.dim();
    let (n_occ2, n_skill) = effective.dim();
    if n_occ != n_occ2 {
        return Err(Error::Shape(format!(
            "census has {n_occ} occupations but the taxonomy has {n_occ2}"
        )));
    }
    let mut out = Array2::zeros((n_city, n_skill));
    for c in 0..n_city {
        for o in 0..n_occ {
            let w = census[[c, o]];
            if w == 0 {
                continue;
            }
            for s in 0..n_skill {
                if effective[[o, s]] {
                    out[[c, s]] += w;
                }
            }
        }
    }
    Ok(out)
}

/// City x skill effective use.
#[derive(Debug, Clone, PartialEq)]
pub struct CitySkills<F> {
    pub rca: RcaMatrix<F>,
    pub effective: Array2<bool>,
    pub counts: Vec<usize>,
    /// Cities whose skill-worker row is entirely zero.
    pub empty: Vec<bool>,
}

/// RCA over the city x skill worker matrix with the non-strict `>= 1` rule.
pub fn city_effective_skills<F: Scalar>(cs: ArrayView2<'_, u64>) -> Result<CitySkills<F>> {
    let weights = cs.mapv(|x| F::from_u64(x).expect("count fits scalar"));
    let rca = rca(weights.view())?;
    let effective = threshold_binary(&rca, Threshold::NonStrict);
    let counts = effective
        .rows()
        .into_iter()
        .map(|r| r.iter().filter(|&&b| b).count())
        .collect();
    let empty = cs.rows().into_iter().map(|r| r.iter().all(|&x| x == 0)).collect();
    Ok(CitySkills {
        rca,
        effective,
        counts,
        empty,
    })
}

/// Share of a city's employment in occupations whose score is strictly above
/// `threshold`.
pub fn city_cognitive_score<F: Scalar>(
    census_row: ArrayView1<'_, u64>,
    occupation_scores: &[F],
    threshold: F,
) -> Result<F> {
    if census_row.len() != occupation_scores.len() {
        return Err(Error::LengthMismatch {
            left: census_row.len(),
            right: occupation_scores.len(),
        });
    }
    if !(threshold > F::zero() && threshold < F::one()) {
        return Err(Error::Validation(format!("cognitive threshold must lie in (0, 1), got {threshold}")));
    }
    let total: u64 = census_row.sum();
    if total == 0 {
        return Err(Error::Degenerate("city has zero employment".into()));
    }
    let above: u64 = census_row
        .iter()
        .zip(occupation_scores)
        .filter(|(_, &s)| s > threshold)
        .map(|(&w, _)| w)
        .sum();
    Ok(F::from_u64(above).unwrap() / F::from_u64(total).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};
    use proptest::prelude::*;

    #[test]
    fn workers_per_skill() {
        let census = array![[10u64, 5], [0, 0]];
        let e = array![[true], [false]];
        assert_eq!(city_skill_workers(census.view(), e.view()).unwrap(), array![[10], [0]]);
        let all = array![[true, true], [true, true]];
        assert_eq!(city_skill_workers(census.view(), all.view()).unwrap(), array![[15, 15], [0, 0]]);
        assert!(city_skill_workers(census.view(), array![[true]].view()).is_err());
    }

    #[test]
    fn single_city_uses_every_present_skill() {
        let cs = array![[3u64, 0, 8, 1]];
        let r = city_effective_skills::<f64>(cs.view()).unwrap();
        assert_eq!(r.counts, vec![3]);
    }

    #[test]
    fn mirrored_specializations() {
        let cs = array![[10u64, 5], [5, 10]];
        let r = city_effective_skills::<f64>(cs.view()).unwrap();
        assert_eq!(r.effective, array![[true, false], [false, true]]);
    }

    #[test]
    fn empty_city_flagged() {
        let cs = array![[0u64, 0], [4, 1]];
        let r = city_effective_skills::<f64>(cs.view()).unwrap();
        assert_eq!(r.counts[0], 0);
        assert_eq!(r.empty, vec![true, false]);
    }

    #[test]
    fn cognitive_share() {
        let scores = [0.9f64, 0.2, 0.6];
        assert_eq!(city_cognitive_score(array![30u64, 70, 0].view(), &scores, 0.6).unwrap(), 0.3);
        assert_eq!(city_cognitive_score(array![5u64, 0, 0].view(), &scores, 0.6).unwrap(), 1.0);
        // exactly at threshold is excluded
        assert_eq!(city_cognitive_score(array![0u64, 0, 9].view(), &scores, 0.6).unwrap(), 0.0);
        assert!(city_cognitive_score(array![0u64, 0, 0].view(), &scores, 0.6).is_err());
    }

    proptest! {
        #[test]
        fn exchange_of_summation(census in prop::collection::vec(0u64..1000, 12), e in prop::collection::vec(any::<bool>(), 20)) {
            let census = Array2::from_shape_vec((3, 4), census).unwrap();
            let e = Array2::from_shape_vec((4, 5), e).unwrap();
            let cs = city_skill_workers(census.view(), e.view()).unwrap();
            for c in 0..3 {
                let lhs: u64 = cs.row(c).sum();
                let rhs: u64 = (0..4).map(|o| census[[c, o]] * e.row(o).iter().filter(|&&b| b).count() as u64).sum();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn duplicated_city_keeps_count(row in prop::collection::vec(0u64..500, 6)) {
            prop_assume!(row.iter().any(|&x| x > 0));
            let one = Array2::from_shape_vec((1, 6), row.clone()).unwrap();
            let two = Array2::from_shape_vec((2, 6), [row.clone(), row].concat()).unwrap();
            let a = city_effective_skills::<f64>(one.view()).unwrap();
            let b = city_effective_skills::<f64>(two.view()).unwrap();
            prop_assert_eq!(a.counts[0], b.counts[0]);
            prop_assert_eq!(b.counts[0], b.counts[1]);
        }

        #[test]
        fn scale_and_threshold_monotone(row in prop::collection::vec(0u64..500, 5), scores in prop::collection::vec(0.0f64..1.0, 5), k in 1u64..50, t1 in 0.01f64..0.99, t2 in 0.01f64..0.99) {
            prop_assume!(row.iter().any(|&x| x > 0));
            let r = Array1::from(row);
            let base = city_cognitive_score(r.view(), &scores, t1).unwrap();
            let scaled = city_cognitive_score((&r * k).view(), &scores, t1).unwrap();
            prop_assert_eq!(base, scaled);
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(city_cognitive_score(r.view(), &scores, hi).unwrap() <= city_cognitive_score(r.view(), &scores, lo).unwrap());
        }
    }
}
