use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of skills effectively used.
pub fn skill_count(effective_row: &[bool]) -> usize {
    effective_row.iter().filter(|&&b| b).count()
}

/// Posterior mass aggregated by occupation group and skill category.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAggregate<F> {
    pub groups: Vec<String>,
    pub categories: Vec<String>,
    /// groups x categories.
    pub values: Array2<F>,
}

/// `values[g][k] = sum of posterior(o, s)` over occupations `o` in group `g`
/// and skills `s` in category `k`. Labels are sorted.
pub fn group_skillset_aggregate<F: Scalar>(
    posterior: ArrayView2<'_, F>,
    occupation_groups: &[String],
    skill_categories: &[String],
) -> Result<GroupAggregate<F>> {
    let (n_occ, n_skills) = posterior.dim();
    if occupation_groups.len() != n_occ || skill_categories.len() != n_skills {
        return Err(Error::Shape("labels do not match the taxonomy axes".into()));
    }
    if let Some(o) = occupation_groups.iter().position(|g| g.trim().is_empty()) {
        return Err(Error::Validation(format!("occupation #{o} has no major-group label")));
    }
    if let Some(s) = skill_categories.iter().position(|c| c.trim().is_empty()) {
        return Err(Error::Validation(format!("skill #{s} has no category")));
    }
    let index = |labels: &[String]| -> BTreeMap<String, usize> {
        let mut m: BTreeMap<String, usize> = labels.iter().map(|l| (l.clone(), 0)).collect();
        for (i, v) in m.values_mut().enumerate() {
            *v = i;
        }
        m
    };
    let gi = index(occupation_groups);
    let ki = index(skill_categories);
    let mut values = Array2::zeros((gi.len(), ki.len()));
    for o in 0..n_occ {
        let g = gi[&occupation_groups[o]];
        for s in 0..n_skills {
            let k = ki[&skill_categories[s]];
            values[[g, k]] = values[[g, k]] + posterior[[o, s]];
        }
    }
    Ok(GroupAggregate {
        groups: gi.into_keys().collect(),
        categories: ki.into_keys().collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn single_cell() {
        let a = group_skillset_aggregate(array![[0.3f64]].view(), &s(&["G"]), &s(&["K"])).unwrap();
        assert_eq!(a.values, array![[0.3]]);
    }

    #[test]
    fn hand_summed_fixture() {
        let post = array![[0.9f64, 0.1, 0.4], [0.2, 0.8, 0.6], [0.5, 0.5, 0.25]];
        let a = group_skillset_aggregate(post.view(), &s(&["B", "A", "B"]), &s(&["x", "y", "x"])).unwrap();
        assert_eq!(a.groups, s(&["A", "B"]));
        assert_eq!(a.categories, s(&["x", "y"]));
        let expect = array![[0.2 + 0.6, 0.8], [0.9 + 0.4 + 0.5 + 0.25, 0.1 + 0.5]];
        for (x, y) in a.values.iter().zip(expect.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn disjoint_groups_block_diagonal() {
        let post = array![[1.0f64, 0.0], [0.0, 1.0]];
        let a = group_skillset_aggregate(post.view(), &s(&["A", "B"]), &s(&["x", "y"])).unwrap();
        assert_eq!(a.values, array![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn unlabeled_occupation_rejected() {
        assert!(group_skillset_aggregate(array![[0.3f64]].view(), &s(&[""]), &s(&["K"])).is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(skill_count(&[false; 10]), 0);
        assert_eq!(skill_count(&[true; 161]), 161);
    }
}
