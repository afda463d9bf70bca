use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::SkillSpace;
use crate::scalar::Scalar;

/// Length assigned to edges with `theta = 1`.
pub const ZERO_LENGTH: f64 = 1e-9;

/// Path length of an edge: `1 - theta`, floored at [`ZERO_LENGTH`].
pub fn edge_length<F: Scalar>(theta: F) -> F {
    let len = F::one() - theta;
    let floor = F::lit(ZERO_LENGTH);
    if len < floor {
        floor
    } else {
        len
    }
}

/// Tolerance under which two path lengths count as equal.
fn same_length_tol<F: Scalar>(d: F) -> F {
    F::lit(1e-12) * d.abs().max(F::one())
}

struct Item<F> {
    dist: F,
    node: usize,
}

impl<F: Scalar> PartialEq for Item<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<F: Scalar> Eq for Item<F> {}
impl<F: Scalar> PartialOrd for Item<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Scalar> Ord for Item<F> {
    // Min-heap on distance, then node id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn single_source<F: Scalar>(adj: &[Vec<(usize, F)>], s: usize) -> Vec<F> {
    let n = adj.len();
    let mut dist = vec![F::infinity(); n];
    let mut sigma = vec![F::zero(); n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut settled = vec![false; n];
    let mut stack = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();

    dist[s] = F::zero();
    sigma[s] = F::one();
    heap.push(Item { dist: F::zero(), node: s });
    while let Some(Item { node: v, .. }) = heap.pop() {
        if settled[v] {
            continue;
        }
        settled[v] = true;
        stack.push(v);
        for &(w, len) in &adj[v] {
            if settled[w] {
                continue;
            }
            let nd = dist[v] + len;
            let tol = same_length_tol(nd);
            if nd < dist[w] - tol {
                dist[w] = nd;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(Item { dist: nd, node: w });
            } else if (nd - dist[w]).abs() <= tol {
                sigma[w] = sigma[w] + sigma[v];
                preds[w].push(v);
            }
        }
    }

    let mut delta = vec![F::zero(); n];
    let mut contrib = vec![F::zero(); n];
    while let Some(w) = stack.pop() {
        for &v in &preds[w] {
            delta[v] = delta[v] + sigma[v] / sigma[w] * (F::one() + delta[w]);
        }
        if w != s {
            contrib[w] = delta[w];
        }
    }
    contrib
}

/// Exact weighted betweenness with edge length `1 - theta`.
///
/// Scores are unnormalized counts over unordered node pairs; a pair with
/// several shortest paths splits its unit evenly among them. Sources run in
/// parallel and are summed in source order.
pub fn betweenness<F: Scalar>(space: &SkillSpace<F>) -> Vec<F> {
    let adj: Vec<Vec<(usize, F)>> = space
        .adjacency()
        .into_iter()
        .map(|l| l.into_iter().map(|(j, t)| (j, edge_length(t))).collect())
        .collect();
    let per_source: Vec<Vec<F>> = (0..adj.len())
        .into_par_iter()
        .map(|s| single_source(&adj, s))
        .collect();
    let half = F::lit(0.5);
    let mut bc = vec![F::zero(); adj.len()];
    for contrib in per_source {
        for (b, c) in bc.iter_mut().zip(contrib) {
            *b = *b + c;
        }
    }
    bc.into_iter().map(|b| b * half).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::skillspace::Edge;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> SkillSpace<f64> {
        let mut e: Vec<Edge<f64>> = edges
            .iter()
            .map(|&(a, b, theta)| Edge { a: a.min(b), b: a.max(b), theta })
            .collect();
        e.sort_by_key(|x| (x.a, x.b));
        SkillSpace { use_count: vec![1; n], edges: e }
    }

    /// Floyd-Warshall distances plus explicit enumeration of every simple
    /// path whose length equals the shortest distance.
    pub(crate) fn brute_force(space: &SkillSpace<f64>) -> Vec<f64> {
        let n = space.n_nodes();
        let mut len = vec![vec![f64::INFINITY; n]; n];
        for e in &space.edges {
            let l = edge_length(e.theta);
            len[e.a][e.b] = l;
            len[e.b][e.a] = l;
        }
        let mut d = len.clone();
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
        fn walk(
            cur: usize,
            t: usize,
            acc: f64,
            target: f64,
            len: &[Vec<f64>],
            path: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur == t {
                if (acc - target).abs() <= 1e-12 * target.max(1.0) {
                    out.push(path.clone());
                }
                return;
            }
            for nxt in 0..len.len() {
                if len[cur][nxt].is_finite() && !path.contains(&nxt) {
                    let a = acc + len[cur][nxt];
                    if a <= target + 1e-12 * target.max(1.0) {
                        path.push(nxt);
                        walk(nxt, t, a, target, len, path, out);
                        path.pop();
                    }
                }
            }
        }
        let mut bc = vec![0.0; n];
        for s in 0..n {
            for t in (s + 1)..n {
                if !d[s][t].is_finite() {
                    continue;
                }
                let mut paths = Vec::new();
                walk(s, t, 0.0, d[s][t], &len, &mut vec![s], &mut paths);
                let total = paths.len() as f64;
                for p in &paths {
                    for &v in &p[1..p.len() - 1] {
                        bc[v] += 1.0 / total;
                    }
                }
            }
        }
        bc
    }

    #[test]
    fn path_and_star() {
        let path = graph(3, &[(0, 1, 0.5), (1, 2, 0.5)]);
        assert_eq!(betweenness(&path), vec![0.0, 1.0, 0.0]);
        let star = graph(4, &[(0, 1, 0.3), (0, 2, 0.3), (0, 3, 0.3)]);
        assert_eq!(betweenness(&star), vec![3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_theta_edges_use_floor_length() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 0.5)]);
        // 0-1-2 has length 2e-9, far shorter than the direct 0.5 edge.
        assert_eq!(betweenness(&g), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn even_split_on_square() {
        let g = graph(4, &[(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5), (3, 0, 0.5)]);
        assert_eq!(betweenness(&g), vec![0.5; 4]);
    }

    #[test]
    fn five_node_fixture_matches_enumeration() {
        let g = graph(
            5,
            &[(0, 1, 0.9), (1, 2, 0.4), (0, 2, 0.2), (2, 3, 0.7), (3, 4, 0.5), (1, 4, 0.1), (1, 3, 0.6)],
        );
        let fast = betweenness(&g);
        let slow = brute_force(&g);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-12, "{fast:?} vs {slow:?}");
        }
    }

    #[test]
    fn random_small_graphs_match_enumeration() {
        let mut rng = SeededRng::new(3);
        for _ in 0..200 {
            let n = 2 + rng.below(5) as usize;
            let mut edges = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.chance_ppm(600_000) {
                        // Coarse weights make ties between paths common.
                        edges.push((a, b, rng.range_inclusive(1, 4) as f64 / 4.0));
                    }
                }
            }
            let g = graph(n, &edges);
            let fast = betweenness(&g);
            let slow = brute_force(&g);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-12, "{edges:?}: {fast:?} vs {slow:?}");
            }
        }
    }
}
