use ndarray::ArrayView2;
use rayon::prelude::*;

use super::{Edge, SkillSpace};
use crate::scalar::Scalar;

/// Proximity network from an occupations x skills effective-use matrix:
///
/// `theta(s, s') = co(s, s') / max(n(s), n(s'))`
///
/// where `co` counts occupations using both skills and `n` counts occupations
/// using one. Only pairs with positive co-occurrence become edges.
pub fn proximity<F: Scalar>(effective: ArrayView2<'_, bool>) -> SkillSpace<F> {
    let n_skills = effective.ncols();
    let use_count: Vec<usize> = (0..n_skills)
        .map(|s| effective.column(s).iter().filter(|&&b| b).count())
        .collect();
    let edges: Vec<Edge<F>> = (0..n_skills)
        .into_par_iter()
        .map(|a| {
            let col_a = effective.column(a);
            ((a + 1)..n_skills)
                .filter_map(|b| {
                    let co = col_a
                        .iter()
                        .zip(effective.column(b))
                        .filter(|(&x, &y)| x && y)
                        .count();
                    (co > 0).then(|| Edge {
                        a,
                        b,
                        theta: F::count(co) / F::count(use_count[a].max(use_count[b])),
                    })
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    SkillSpace { use_count, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};
    use proptest::prelude::*;

    #[test]
    fn hand_counted_example() {
        // o1 {s1, s2}, o2 {s1}, o3 {s2, s3}
        let e = array![[true, true, false], [true, false, false], [false, true, true]];
        let sp = proximity::<f64>(e.view());
        assert_eq!(sp.use_count, vec![2, 2, 1]);
        assert_eq!(
            sp.edges,
            vec![Edge { a: 0, b: 1, theta: 0.5 }, Edge { a: 1, b: 2, theta: 0.5 }]
        );
    }

    #[test]
    fn identical_and_disjoint_columns() {
        let e = array![[true, true, false], [true, true, false], [false, false, true]];
        let sp = proximity::<f64>(e.view());
        assert_eq!(sp.edges, vec![Edge { a: 0, b: 1, theta: 1.0 }]);
    }

    proptest! {
        #[test]
        fn theta_bounded_and_symmetric(v in prop::collection::vec(any::<bool>(), 30)) {
            let e = Array2::from_shape_vec((6, 5), v).unwrap();
            let sp = proximity::<f64>(e.view());
            let swapped = {
                let mut cols: Vec<usize> = (0..5).collect();
                cols.reverse();
                let m = e.select(ndarray::Axis(1), &cols);
                proximity::<f64>(m.view())
            };
            for edge in &sp.edges {
                prop_assert!(edge.theta > 0.0 && edge.theta <= 1.0);
                let other = swapped.edges.iter().find(|x| x.a == 4 - edge.b && x.b == 4 - edge.a).unwrap();
                prop_assert_eq!(other.theta, edge.theta);
            }
            prop_assert_eq!(sp.edges.len(), swapped.edges.len());
        }
    }
}
