use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::welch_ttest;

/// Normalized discounted cumulative gain of `predicted` against an observed
/// top-k list.
///
/// With `k = observed.len()`, an observed item at rank `r` (1-based) has gain
/// `k + 1 - r`; everything else has gain 0. Position `p` is discounted by
/// `log2(p + 1)`. Only the first `k` predicted positions are scored, and the
/// ideal ordering is the observed list itself.
pub fn ndcg<F: Scalar, T: PartialEq>(predicted: &[T], observed: &[T]) -> Result<F> {
    let k = observed.len();
    if k == 0 {
        return Err(Error::Validation("NDCG needs a non-empty observed list".into()));
    }
    let gain = |item: &T| -> F {
        observed
            .iter()
            .position(|o| o == item)
            .map_or(F::zero(), |r| F::count(k - r))
    };
    let discount = |pos: usize| F::count(pos + 1).log2();
    let dcg = predicted
        .iter()
        .take(k)
        .enumerate()
        .fold(F::zero(), |acc, (i, item)| acc + gain(item) / discount(i + 1));
    let idcg = (0..k).fold(F::zero(), |acc, i| acc + F::count(k - i) / discount(i + 1));
    Ok(dcg / idcg)
}

/// Welch comparison of two mass fields' per-origin NDCG.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseWelch<F> {
    pub a: String,
    pub b: String,
    pub t: F,
    pub df: F,
    pub p: F,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassFieldComparison<F> {
    pub means: BTreeMap<String, F>,
    /// Every unordered pair in label order.
    pub pairs: Vec<PairwiseWelch<F>>,
}

/// Mean NDCG per field and a Welch t-test for every pair of fields.
pub fn compare_mass_fields<F: Scalar>(scenarios: &BTreeMap<String, Vec<F>>) -> Result<MassFieldComparison<F>> {
    let mut means = BTreeMap::new();
    for (label, v) in scenarios {
        if v.len() < 2 {
            return Err(Error::Validation(format!("mass field `{label}` has fewer than 2 NDCG samples")));
        }
        let mean = v.iter().fold(F::zero(), |a, &x| a + x) / F::count(v.len());
        means.insert(label.clone(), mean);
    }
    let labels: Vec<&String> = scenarios.keys().collect();
    let mut pairs = Vec::new();
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            let r = welch_ttest(&scenarios[*a], &scenarios[*b])?;
            pairs.push(PairwiseWelch {
                a: (*a).clone(),
                b: (*b).clone(),
                t: r.t,
                df: r.welch_df,
                p: r.p_two_sided,
            });
        }
    }
    Ok(MassFieldComparison { means, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let obs = ["A", "B", "C"];
        assert_eq!(ndcg::<f64, _>(&obs, &obs).unwrap(), 1.0);
        let v: f64 = ndcg(&["B", "A", "C"], &obs).unwrap();
        let hand = (2.0 + 3.0 / 3f64.log2() + 0.5) / (3.0 + 2.0 / 3f64.log2() + 0.5);
        assert!((v - hand).abs() < 1e-15);
        assert!((v - 0.9225).abs() < 1e-4);
        assert_eq!(ndcg::<f64, _>(&["X", "Y", "Z"], &obs).unwrap(), 0.0);
        assert!(ndcg::<f64, &str>(&["A"], &[]).is_err());
    }

    #[test]
    fn compare_examples() {
        let mut s = BTreeMap::new();
        s.insert("a".to_string(), vec![0.6f64, 0.7, 0.65]);
        s.insert("b".to_string(), vec![0.6f64, 0.7, 0.65]);
        let c = compare_mass_fields(&s).unwrap();
        assert_eq!(c.pairs[0].t, 0.0);
        assert_eq!(c.pairs[0].p, 1.0);
        s.insert("a".to_string(), vec![1.0, 2.0, 3.0]);
        s.insert("b".to_string(), vec![2.0, 3.0, 4.0]);
        let c = compare_mass_fields(&s).unwrap();
        assert!((c.pairs[0].t + 1.2247).abs() < 1e-4);
        assert!((c.pairs[0].df - 4.0).abs() < 1e-12);
        assert_eq!(c.means["b"], 3.0);
        s.insert("c".to_string(), vec![0.5]);
        assert!(compare_mass_fields(&s).is_err());
    }

    proptest! {
        #[test]
        fn bounded_and_tail_invariant(perm in Just((0u32..12).collect::<Vec<_>>()).prop_shuffle(), k in 1usize..8, extra in prop::collection::vec(100u32..200, 0..5)) {
            let observed: Vec<u32> = (0..k as u32).collect();
            let v: f64 = ndcg(&perm, &observed).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            let mut longer = perm[..k.min(perm.len())].to_vec();
            longer.extend(extra);
            let w: f64 = ndcg(&longer, &observed).unwrap();
            prop_assert_eq!(v, w);
            let perfect = perm[..k] == observed[..];
            prop_assert_eq!(v == 1.0, perfect);
        }
    }
}
