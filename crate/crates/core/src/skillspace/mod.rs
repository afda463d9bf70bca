//! Skill co-occurrence network, its polarization into two clusters,
//! betweenness and occupation-level scores.

mod betweenness;
mod louvain;
mod polarization;
mod profile;
mod proximity;

pub use betweenness::{betweenness, edge_length, ZERO_LENGTH};
pub use louvain::{louvain, modularity, LouvainResult};
pub use polarization::{cognitive_score, reduce_to_two, Pole, Polarization};
pub use profile::{group_skillset_aggregate, skill_count, GroupAggregate};
pub use proximity::proximity;

/// Undirected weighted edge between two skills, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<F> {
    pub a: usize,
    pub b: usize,
    pub theta: F,
}

/// Skill graph weighted by proximity.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillSpace<F> {
    /// Number of occupations effectively using each skill.
    pub use_count: Vec<usize>,
    /// Sorted by `(a, b)`; pairs that never co-occur are absent.
    pub edges: Vec<Edge<F>>,
}

impl<F: crate::scalar::Scalar> SkillSpace<F> {
    pub fn n_nodes(&self) -> usize {
        self.use_count.len()
    }

    /// Neighbor lists `(node, theta)`, sorted by node.
    pub fn adjacency(&self) -> Vec<Vec<(usize, F)>> {
        let mut adj = vec![Vec::new(); self.n_nodes()];
        for e in &self.edges {
            adj[e.a].push((e.b, e.theta));
            adj[e.b].push((e.a, e.theta));
        }
        for list in &mut adj {
            list.sort_by_key(|&(j, _)| j);
        }
        adj
    }
}
