use std::collections::BTreeMap;

use super::SkillSpace;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pole {
    SocioCognitive,
    SensoryPhysical,
}

impl Pole {
    pub fn as_str(self) -> &'static str {
        match self {
            Pole::SocioCognitive => "socio-cognitive",
            Pole::SensoryPhysical => "sensory-physical",
        }
    }
}

/// Two-way split of the skill space.
#[derive(Debug, Clone, PartialEq)]
pub struct Polarization {
    /// Per skill; `None` for nodes outside every community.
    pub pole: Vec<Option<Pole>>,
    /// Louvain communities merged into each pole, as original labels.
    pub socio_cognitive_communities: Vec<usize>,
    pub sensory_physical_communities: Vec<usize>,
}

impl Polarization {
    /// Skills on the socio-cognitive side, ascending.
    pub fn socio_cognitive_set(&self) -> Vec<usize> {
        self.members(Pole::SocioCognitive)
    }

    pub fn members(&self, pole: Pole) -> Vec<usize> {
        self.pole
            .iter()
            .enumerate()
            .filter(|(_, p)| **p == Some(pole))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Collapses a community labeling into two poles.
///
/// While more than two groups remain, the pair with the largest total
/// inter-group proximity is merged (first pair in label order wins ties).
/// The group holding more proximity weight on edges whose endpoints both
/// belong to socio-cognitive categories becomes the socio-cognitive pole;
/// ties go to the group with more nodes, then to the lower label.
pub fn reduce_to_two<F: Scalar>(
    labels: &[Option<usize>],
    space: &SkillSpace<F>,
    cognitive_category: &[bool],
) -> Result<Polarization> {
    if labels.len() != space.n_nodes() || cognitive_category.len() != space.n_nodes() {
        return Err(Error::Shape("labels and categories must cover every skill".into()));
    }
    // group id -> original community labels
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &l in labels.iter().flatten() {
        groups.entry(l).or_insert_with(|| vec![l]);
    }
    if groups.len() < 2 {
        return Err(Error::Degenerate(format!(
            "found {} community; at least 2 are needed, adjust the modularity resolution or the input",
            groups.len()
        )));
    }
    let mut group_of: BTreeMap<usize, usize> = groups.keys().map(|&c| (c, c)).collect();

    while groups.len() > 2 {
        let mut inter: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for e in &space.edges {
            let (Some(la), Some(lb)) = (labels[e.a], labels[e.b]) else { continue };
            let (ga, gb) = (group_of[&la], group_of[&lb]);
            if ga != gb {
                let key = (ga.min(gb), ga.max(gb));
                let w = inter.entry(key).or_insert(F::zero());
                *w = *w + e.theta;
            }
        }
        let keys: Vec<usize> = groups.keys().copied().collect();
        let mut best: Option<((usize, usize), F)> = None;
        for (x, &ga) in keys.iter().enumerate() {
            for &gb in &keys[x + 1..] {
                let w = inter.get(&(ga, gb)).copied().unwrap_or(F::zero());
                if best.map_or(true, |(_, bw)| w > bw) {
                    best = Some(((ga, gb), w));
                }
            }
        }
        let ((keep, gone), _) = best.expect("at least two groups");
        let moved = groups.remove(&gone).unwrap();
        for c in &moved {
            group_of.insert(*c, keep);
        }
        groups.get_mut(&keep).unwrap().extend(moved);
    }

    let ids: Vec<usize> = groups.keys().copied().collect();
    let mut cog_weight = [F::zero(); 2];
    let mut size = [0usize; 2];
    let slot = |l: usize| if group_of[&l] == ids[0] { 0 } else { 1 };
    for l in labels.iter().flatten() {
        size[slot(*l)] += 1;
    }
    for e in &space.edges {
        let (Some(la), Some(lb)) = (labels[e.a], labels[e.b]) else { continue };
        if slot(la) == slot(lb) && cognitive_category[e.a] && cognitive_category[e.b] {
            cog_weight[slot(la)] = cog_weight[slot(la)] + e.theta;
        }
    }
    let socio = if cog_weight[0] != cog_weight[1] {
        if cog_weight[0] > cog_weight[1] { 0 } else { 1 }
    } else if size[0] != size[1] {
        if size[0] > size[1] { 0 } else { 1 }
    } else {
        0
    };

    let pole = labels
        .iter()
        .map(|l| {
            l.map(|l| {
                if slot(l) == socio {
                    Pole::SocioCognitive
                } else {
                    Pole::SensoryPhysical
                }
            })
        })
        .collect();
    let sorted = |i: usize| {
        let mut v = groups[&ids[i]].clone();
        v.sort_unstable();
        v
    };
    Ok(Polarization {
        pole,
        socio_cognitive_communities: sorted(socio),
        sensory_physical_communities: sorted(1 - socio),
    })
}

/// Share of `cognitive_set` effectively used: `|effective ∩ set| / |set|`.
pub fn cognitive_score<F: Scalar>(effective_row: &[bool], cognitive_set: &[usize]) -> Result<F> {
    if cognitive_set.is_empty() {
        return Err(Error::Validation("socio-cognitive skill set is empty".into()));
    }
    let mut hits = 0usize;
    for &s in cognitive_set {
        match effective_row.get(s) {
            Some(true) => hits += 1,
            Some(false) => {}
            None => return Err(Error::Shape(format!("skill index {s} out of range"))),
        }
    }
    Ok(F::count(hits) / F::count(cognitive_set.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skillspace::{louvain, Edge};

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> SkillSpace<f64> {
        let mut e: Vec<Edge<f64>> = edges
            .iter()
            .map(|&(a, b, theta)| Edge { a: a.min(b), b: a.max(b), theta })
            .collect();
        e.sort_by_key(|x| (x.a, x.b));
        SkillSpace { use_count: vec![1; n], edges: e }
    }

    #[test]
    fn two_communities_pass_through() {
        let g = graph(4, &[(0, 1, 0.9), (2, 3, 0.9), (1, 2, 0.1)]);
        let labels = vec![Some(0), Some(0), Some(1), Some(1)];
        let p = reduce_to_two(&labels, &g, &[false, false, true, true]).unwrap();
        assert_eq!(p.socio_cognitive_communities, vec![1]);
        assert_eq!(p.sensory_physical_communities, vec![0]);
        assert_eq!(p.socio_cognitive_set(), vec![2, 3]);
    }

    #[test]
    fn heaviest_pair_merges() {
        // Communities 0 {0,1}, 1 {2,3}, 2 {4,5}; 1 and 2 share the heaviest cut.
        let g = graph(
            6,
            &[(0, 1, 0.9), (2, 3, 0.9), (4, 5, 0.9), (0, 2, 0.1), (3, 4, 0.4), (2, 5, 0.3), (1, 4, 0.05)],
        );
        let labels = vec![Some(0), Some(0), Some(1), Some(1), Some(2), Some(2)];
        let p = reduce_to_two(&labels, &g, &[true, true, false, false, false, false]).unwrap();
        assert_eq!(p.socio_cognitive_communities, vec![0]);
        assert_eq!(p.sensory_physical_communities, vec![1, 2]);
    }

    #[test]
    fn tie_goes_to_larger_group() {
        let g = graph(5, &[(0, 1, 0.5), (1, 2, 0.5), (3, 4, 0.5)]);
        let labels = vec![Some(0), Some(0), Some(0), Some(1), Some(1)];
        let p = reduce_to_two(&labels, &g, &[false; 5]).unwrap();
        assert_eq!(p.socio_cognitive_set(), vec![0, 1, 2]);
    }

    #[test]
    fn fewer_than_two_is_an_error() {
        let g = graph(2, &[(0, 1, 0.5)]);
        assert!(matches!(
            reduce_to_two(&[Some(0), Some(0)], &g, &[true, true]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn planted_two_blocks_recovered() {
        let n = 20;
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                let same = (a < n / 2) == (b < n / 2);
                edges.push((a, b, if same { 0.9 } else { 0.05 }));
            }
        }
        let g = graph(n, &edges);
        let cognitive: Vec<bool> = (0..n).map(|i| i < n / 2).collect();
        let r = louvain(&g, 11).unwrap();
        let p = reduce_to_two(&r.labels, &g, &cognitive).unwrap();
        let agree = (0..n)
            .filter(|&i| (p.pole[i] == Some(Pole::SocioCognitive)) == cognitive[i])
            .count();
        assert!(agree as f64 / n as f64 >= 0.95);
        assert!(r.modularity >= 0.0);
    }

    #[test]
    fn cognitive_score_examples() {
        let set: Vec<usize> = (0..97).collect();
        let mut row = vec![false; 161];
        assert_eq!(cognitive_score::<f64>(&row, &set).unwrap(), 0.0);
        for r in row.iter_mut().take(66) {
            *r = true;
        }
        let s: f64 = cognitive_score(&row, &set).unwrap();
        assert!((s - 66.0 / 97.0).abs() < 1e-12);
        assert_eq!(format!("{s:.2}"), "0.68");
        for r in row.iter_mut().take(97) {
            *r = true;
        }
        assert_eq!(cognitive_score::<f64>(&row, &set).unwrap(), 1.0);
        assert!(cognitive_score::<f64>(&row, &[]).is_err());
    }
}
