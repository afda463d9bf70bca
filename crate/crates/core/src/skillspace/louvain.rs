//! Fast-unfolding modularity optimization on the weighted skill graph.

use std::collections::BTreeMap;

use super::SkillSpace;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Scalar;

/// Community assignment for every node (`None` for isolated nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult<F> {
    pub labels: Vec<Option<usize>>,
    pub n_communities: usize,
    pub modularity: F,
    /// Modularity of the singleton partition followed by the value after each
    /// completed level.
    pub level_modularity: Vec<F>,
}

/// Symmetric weighted graph; `adj[i]` holds `(j, A_ij)` including any
/// diagonal entry `(i, A_ii)`.
struct Level<F> {
    adj: Vec<Vec<(usize, F)>>,
    degree: Vec<F>,
}

impl<F: Scalar> Level<F> {
    fn new(adj: Vec<Vec<(usize, F)>>) -> Self {
        let degree = adj
            .iter()
            .map(|list| list.iter().fold(F::zero(), |acc, &(_, w)| acc + w))
            .collect();
        Level { adj, degree }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, comm: &[usize], two_m: F) -> F {
        let n_comm = comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut inside = vec![F::zero(); n_comm];
        let mut total = vec![F::zero(); n_comm];
        for i in 0..self.len() {
            total[comm[i]] = total[comm[i]] + self.degree[i];
            for &(j, w) in &self.adj[i] {
                if comm[j] == comm[i] {
                    inside[comm[i]] = inside[comm[i]] + w;
                }
            }
        }
        (0..n_comm).fold(F::zero(), |q, c| {
            let share = total[c] / two_m;
            q + inside[c] / two_m - share * share
        })
    }

    /// Greedy local moves until a full sweep changes nothing. Returns the
    /// densely renumbered assignment and whether any node moved.
    fn local_moves(&self, two_m: F, rng: &mut SeededRng) -> (Vec<usize>, bool) {
        let n = self.len();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);

        let mut neigh_weight = vec![F::zero(); n];
        let mut touched: Vec<usize> = Vec::new();
        let mut any_move = false;
        const MAX_SWEEPS: usize = 10_000;
        for _ in 0..MAX_SWEEPS {
            let mut moved = false;
            for &i in &order {
                let ki = self.degree[i];
                let old = comm[i];
                touched.clear();
                for &(j, w) in &self.adj[i] {
                    if j == i {
                        continue;
                    }
                    let c = comm[j];
                    if neigh_weight[c] == F::zero() && !touched.contains(&c) {
                        touched.push(c);
                    }
                    neigh_weight[c] = neigh_weight[c] + w;
                }
                tot[old] = tot[old] - ki;
                let gain = |c: usize, w_in: F| w_in - tot[c] * ki / two_m;
                let mut best = old;
                let mut best_gain = gain(old, neigh_weight[old]);
                let tol = F::epsilon() * F::lit(64.0) * (ki + F::one());
                for &c in &touched {
                    let g = gain(c, neigh_weight[c]);
                    if g > best_gain + tol {
                        best = c;
                        best_gain = g;
                    }
                }
                for &c in &touched {
                    neigh_weight[c] = F::zero();
                }
                neigh_weight[old] = F::zero();
                tot[best] = tot[best] + ki;
                if best != old {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
            }
            if !moved {
                break;
            }
        }
        (renumber(&comm), any_move)
    }

    fn aggregate(&self, comm: &[usize]) -> Level<F> {
        let n_comm = comm.iter().copied().max().map_or(0, |c| c + 1);
        let mut merged: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); n_comm];
        for i in 0..self.len() {
            for &(j, w) in &self.adj[i] {
                let slot = merged[comm[i]].entry(comm[j]).or_insert(F::zero());
                *slot = *slot + w;
            }
        }
        Level::new(merged.into_iter().map(|m| m.into_iter().collect()).collect())
    }
}

/// Dense labels in order of first appearance.
fn renumber(comm: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    let mut out = Vec::with_capacity(comm.len());
    for &c in comm {
        let next = map.len();
        out.push(*map.entry(c).or_insert(next));
    }
    out
}

/// Runs two-phase fast unfolding (local moves, then aggregation) until a
/// level produces no move. Node visit order is shuffled by `seed` at every
/// level, so the result is a deterministic function of graph and seed.
///
/// Nodes without edges are left unlabeled.
pub fn louvain<F: Scalar>(space: &SkillSpace<F>, seed: u64) -> Result<LouvainResult<F>> {
    let full_adj = space.adjacency();
    let active: Vec<usize> = (0..space.n_nodes()).filter(|&i| !full_adj[i].is_empty()).collect();
    if active.is_empty() {
        return Err(Error::Degenerate("community detection on a graph without edges".into()));
    }
    let mut compact = vec![usize::MAX; space.n_nodes()];
    for (k, &i) in active.iter().enumerate() {
        compact[i] = k;
    }
    let adj = active
        .iter()
        .map(|&i| full_adj[i].iter().map(|&(j, w)| (compact[j], w)).collect())
        .collect();
    let mut level = Level::new(adj);
    let two_m = level.degree.iter().fold(F::zero(), |acc, &d| acc + d);

    let mut rng = SeededRng::new(seed);
    let mut membership: Vec<usize> = (0..active.len()).collect();
    let singletons: Vec<usize> = (0..active.len()).collect();
    let mut history = vec![level.modularity(&singletons, two_m)];

    loop {
        let (comm, moved) = level.local_moves(two_m, &mut rng);
        if !moved {
            break;
        }
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        history.push(level.modularity(&comm, two_m));
        level = level.aggregate(&comm);
        if level.len() == 1 {
            break;
        }
    }

    let membership = renumber(&membership);
    let n_communities = membership.iter().copied().max().map_or(0, |c| c + 1);
    let mut labels = vec![None; space.n_nodes()];
    for (k, &i) in active.iter().enumerate() {
        labels[i] = Some(membership[k]);
    }
    let modularity = modularity(space, &labels);
    Ok(LouvainResult {
        labels,
        n_communities,
        modularity,
        level_modularity: history,
    })
}

/// Weighted modularity of a labeling over the skill graph. Unlabeled nodes
/// must be isolated.
pub fn modularity<F: Scalar>(space: &SkillSpace<F>, labels: &[Option<usize>]) -> F {
    let adj = space.adjacency();
    let mut two_m = F::zero();
    let mut inside: BTreeMap<usize, F> = BTreeMap::new();
    let mut total: BTreeMap<usize, F> = BTreeMap::new();
    for (i, list) in adj.iter().enumerate() {
        let Some(ci) = labels[i] else { continue };
        for &(j, w) in list {
            two_m = two_m + w;
            let t = total.entry(ci).or_insert(F::zero());
            *t = *t + w;
            if labels[j] == Some(ci) {
                let s = inside.entry(ci).or_insert(F::zero());
                *s = *s + w;
            }
        }
    }
    if two_m == F::zero() {
        return F::zero();
    }
    total.iter().fold(F::zero(), |q, (c, &t)| {
        let share = t / two_m;
        q + inside.get(c).copied().unwrap_or(F::zero()) / two_m - share * share
    })
}
