use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Mean Earth radius used for great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `m n / ((m + n)(m + n + s))`
    #[default]
    Paper,
    /// `m n / ((m + s)(m + n + s))`
    Classical,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Paper => "paper",
            Variant::Classical => "classical",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Variant::Paper),
            "classical" => Ok(Variant::Classical),
            _ => Err(Error::Validation(format!("unknown radiation variant `{s}` (paper|classical)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MassLabel {
    Employment,
    SkilledWorkers,
    DegreeHolders,
    Custom,
}

impl MassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MassLabel::Employment => "employment",
            MassLabel::SkilledWorkers => "skilled",
            MassLabel::DegreeHolders => "degree",
            MassLabel::Custom => "custom",
        }
    }
}

impl FromStr for MassLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "employment" => Ok(MassLabel::Employment),
            "skilled" | "skilled_workers" => Ok(MassLabel::SkilledWorkers),
            "degree" | "degree_holders" => Ok(MassLabel::DegreeHolders),
            "custom" => Ok(MassLabel::Custom),
            _ => Err(Error::Validation(format!("unknown mass field `{s}` (employment|skilled|degree)"))),
        }
    }
}

/// Per-city mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MassField<F> {
    pub label: MassLabel,
    pub masses: Vec<F>,
}

impl<F: Scalar> MassField<F> {
    pub fn new(label: MassLabel, masses: Vec<F>) -> Result<Self> {
        if masses.iter().any(|m| !(m.is_finite() && *m >= F::zero())) {
            return Err(Error::Validation(format!("{} masses must be finite and non-negative", label.as_str())));
        }
        if masses.iter().filter(|m| **m > F::zero()).count() < 2 {
            return Err(Error::Validation(format!(
                "{} mass field needs at least two cities with positive mass",
                label.as_str()
            )));
        }
        Ok(MassField { label, masses })
    }
}

/// Great-circle distance on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_km<F: Scalar>(lat1: F, lon1: F, lat2: F, lon2: F) -> F {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let half = F::lit(0.5);
    let h = (dp * half).sin().powi(2) + p1.cos() * p2.cos() * (dl * half).sin().powi(2);
    let h = h.min(F::one());
    F::lit(2.0 * EARTH_RADIUS_KM) * h.sqrt().asin()
}

/// Direct ring mass: the summed mass of cities `k` (other than `i` and `j`)
/// with `d(i, k) < d(i, j)`, accumulated in index order.
pub fn ring_mass<F: Scalar>(coords: &[(F, F)], masses: &[F], i: usize, j: usize) -> F {
    let d = |a: usize, b: usize| haversine_km(coords[a].0, coords[a].1, coords[b].0, coords[b].1);
    let radius = d(i, j);
    (0..coords.len())
        .filter(|&k| k != i && k != j && d(i, k) < radius)
        .fold(F::zero(), |acc, k| acc + masses[k])
}

/// Per-origin list of other cities sorted by `(distance, index)`, computed
/// once and shared across mass fields.
#[derive(Debug, Clone)]
pub struct RingIndex<F> {
    distance: Vec<Vec<F>>,
    by_distance: Vec<Vec<usize>>,
}

impl<F: Scalar> RingIndex<F> {
    pub fn new(coords: &[(F, F)]) -> Self {
        let n = coords.len();
        let distance: Vec<Vec<F>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| haversine_km(coords[i].0, coords[i].1, coords[k].0, coords[k].1))
                    .collect()
            })
            .collect();
        let by_distance = (0..n)
            .map(|i| {
                let mut others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
                others.sort_by(|&a, &b| {
                    distance[i][a]
                        .partial_cmp(&distance[i][b])
                        .unwrap_or(Ordering::Equal)
                        .then(a.cmp(&b))
                });
                others
            })
            .collect();
        RingIndex { distance, by_distance }
    }

    pub fn len(&self) -> usize {
        self.distance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distance.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> F {
        self.distance[i][j]
    }

    /// Ring masses `s_ij` for every destination `j` of origin `i`, from a
    /// prefix sum over the distance-sorted neighbors.
    pub fn ring_masses(&self, masses: &[F], i: usize) -> Vec<F> {
        let order = &self.by_distance[i];
        let mut prefix = Vec::with_capacity(order.len() + 1);
        prefix.push(F::zero());
        for &k in order {
            let last = *prefix.last().unwrap();
            prefix.push(last + masses[k]);
        }
        let dist = &self.distance[i];
        let mut out = vec![F::zero(); self.len()];
        for &j in order {
            let closer = order.partition_point(|&k| dist[k] < dist[j]);
            out[j] = prefix[closer];
        }
        out
    }
}

/// Expected flow share `T_ij` for one origin/destination pair.
pub fn radiation_flow<F: Scalar>(m: F, n: F, s: F, variant: Variant) -> Result<F> {
    if !(m > F::zero() && n > F::zero()) {
        return Err(Error::Validation(format!("radiation masses must be positive (m = {m}, n = {n})")));
    }
    if !(s >= F::zero()) {
        return Err(Error::Validation(format!("ring mass must be non-negative, got {s}")));
    }
    let first = match variant {
        Variant::Paper => m + n,
        Variant::Classical => m + s,
    };
    Ok(m * n / (first * (m + n + s)))
}

/// Ranked destinations for one origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPrediction<F> {
    pub origin: usize,
    pub variant: Variant,
    /// `(destination, T)`, sorted by `T` descending then index ascending.
    pub ranked: Vec<(usize, F)>,
}

impl<F> FlowPrediction<F> {
    pub fn destinations(&self) -> Vec<usize> {
        self.ranked.iter().map(|&(d, _)| d).collect()
    }
}

/// Top-`k` destinations of `origin`. Destinations with zero mass receive
/// `T = 0`. City indices follow id order, so index order is the id
/// tie-break.
pub fn predict_destinations<F: Scalar>(
    origin: usize,
    field: &MassField<F>,
    index: &RingIndex<F>,
    k: usize,
    variant: Variant,
) -> Result<FlowPrediction<F>> {
    if origin >= index.len() {
        return Err(Error::Validation(format!("unknown origin index {origin}")));
    }
    if k == 0 {
        return Err(Error::Validation("k must be at least 1".into()));
    }
    if field.masses.len() != index.len() {
        return Err(Error::LengthMismatch {
            left: field.masses.len(),
            right: index.len(),
        });
    }
    let m = field.masses[origin];
    if !(m > F::zero()) {
        return Err(Error::Validation(format!("origin {origin} has zero mass")));
    }
    let rings = index.ring_masses(&field.masses, origin);
    let mut ranked = Vec::with_capacity(index.len().saturating_sub(1));
    for j in (0..index.len()).filter(|&j| j != origin) {
        let n = field.masses[j];
        let t = if n > F::zero() {
            radiation_flow(m, n, rings[j], variant)?
        } else {
            F::zero()
        };
        ranked.push((j, t));
    }
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    Ok(FlowPrediction { origin, variant, ranked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn km_to_lon(km: f64) -> f64 {
        km / (EARTH_RADIUS_KM * std::f64::consts::PI / 180.0)
    }

    #[test]
    fn flow_examples() {
        assert_eq!(radiation_flow(3.0f64, 3.0, 0.0, Variant::Paper).unwrap(), 0.25);
        let p: f64 = radiation_flow(10.0, 5.0, 2.0, Variant::Paper).unwrap();
        assert!((p - 50.0 / (15.0 * 17.0)).abs() < 1e-15);
        assert!((p - 0.19608).abs() < 1e-5);
        let c: f64 = radiation_flow(10.0, 5.0, 2.0, Variant::Classical).unwrap();
        assert!((c - 50.0 / (12.0 * 17.0)).abs() < 1e-15);
        assert!((c - 0.24510).abs() < 1e-5);
        assert!(radiation_flow(0.0f64, 1.0, 0.0, Variant::Paper).is_err());
        assert_eq!(radiation_flow(2.0f32, 2.0, 0.0, Variant::Paper).unwrap(), 0.25f32);
    }

    #[test]
    fn haversine_along_equator() {
        let d: f64 = haversine_km(0.0, 0.0, 0.0, km_to_lon(10.0));
        assert!((d - 10.0).abs() < 1e-9);
    }

    #[test]
    fn ring_on_a_line() {
        // i at 0 km, j at 10 km, k at 5 km (mass 7), l at 20 km
        let coords: Vec<(f64, f64)> = [0.0, 10.0, 5.0, 20.0].iter().map(|&km| (0.0, km_to_lon(km))).collect();
        let masses = [1.0, 1.0, 7.0, 4.0];
        assert_eq!(ring_mass(&coords, &masses, 0, 1), 7.0);
        assert_eq!(ring_mass(&coords, &masses, 0, 2), 0.0);
        let idx = RingIndex::new(&coords);
        assert_eq!(idx.ring_masses(&masses, 0), vec![0.0, 7.0, 0.0, 8.0]);
    }

    #[test]
    fn ring_excludes_equidistant_city() {
        let coords: Vec<(f64, f64)> = [0.0, 10.0, -10.0].iter().map(|&km| (0.0, km_to_lon(km))).collect();
        let masses = [1.0, 2.0, 3.0];
        assert_eq!(ring_mass(&coords, &masses, 0, 1), 0.0);
        assert_eq!(RingIndex::new(&coords).ring_masses(&masses, 0)[1], 0.0);
    }

    #[test]
    fn symmetric_layout_tie_breaks_by_index() {
        let coords: Vec<(f64, f64)> = [0.0, 10.0, -10.0].iter().map(|&km| (0.0, km_to_lon(km))).collect();
        let field = MassField::new(MassLabel::Employment, vec![5.0, 5.0, 5.0]).unwrap();
        let idx = RingIndex::new(&coords);
        let p = predict_destinations(0, &field, &idx, 10, Variant::Paper).unwrap();
        assert_eq!(p.destinations(), vec![1, 2]);
        assert_eq!(p.ranked[0].1, p.ranked[1].1);
    }

    #[test]
    fn near_small_vs_far_large() {
        // origin 0; city 1 near (5 km, mass 2); city 2 far (50 km, mass 100)
        let coords: Vec<(f64, f64)> = [0.0, 5.0, 50.0].iter().map(|&km| (0.0, km_to_lon(km))).collect();
        let field = MassField::new(MassLabel::Employment, vec![10.0, 2.0, 100.0]).unwrap();
        let idx = RingIndex::new(&coords);
        // classical: 10*100/((10+2)(112)) beats 10*2/(10*12)
        let c_near: f64 = radiation_flow(10.0, 2.0, 0.0, Variant::Classical).unwrap();
        let c_far: f64 = radiation_flow(10.0, 100.0, 2.0, Variant::Classical).unwrap();
        assert!(c_far > c_near);
        let p = predict_destinations(0, &field, &idx, 1, Variant::Classical).unwrap();
        assert_eq!(p.ranked, vec![(2, c_far)]);
        // paper form peaks at n = m, so the small near city wins
        let t_near: f64 = radiation_flow(10.0, 2.0, 0.0, Variant::Paper).unwrap();
        let t_far: f64 = radiation_flow(10.0, 100.0, 2.0, Variant::Paper).unwrap();
        assert_eq!(t_near, 20.0 / 144.0);
        assert_eq!(t_far, 1000.0 / (110.0 * 112.0));
        let p = predict_destinations(0, &field, &idx, 1, Variant::Paper).unwrap();
        assert_eq!(p.ranked, vec![(1, t_near)]);
        let all = predict_destinations(0, &field, &idx, 99, Variant::Paper).unwrap();
        assert_eq!(all.ranked.len(), 2);
        assert!(predict_destinations(7, &field, &idx, 1, Variant::Paper).is_err());
    }

    #[test]
    fn flow_invariants() {
        let mut rng = SeededRng::new(17);
        for _ in 0..200 {
            let m = 0.1 + rng.unit_f64() * 100.0;
            let n = 0.1 + rng.unit_f64() * 100.0;
            let s = rng.unit_f64() * 100.0;
            let k = 0.01 + rng.unit_f64() * 50.0;
            for v in [Variant::Paper, Variant::Classical] {
                let t = radiation_flow(m, n, s, v).unwrap();
                let scaled = radiation_flow(k * m, k * n, k * s, v).unwrap();
                assert!((t - scaled).abs() <= 1e-12 * t.max(1e-300) + 1e-15);
                assert!((0.0..=1.0).contains(&t));
                assert!(radiation_flow(m, n, s + 0.5 + s * 0.01, v).unwrap() < t);
            }
            let p = radiation_flow(m, n, s, Variant::Paper).unwrap();
            let q = radiation_flow(n, m, s, Variant::Paper).unwrap();
            assert!((p - q).abs() <= 1e-15 * p.max(1.0));
        }
        let c1: f64 = radiation_flow(10.0, 5.0, 2.0, Variant::Classical).unwrap();
        let c2: f64 = radiation_flow(5.0, 10.0, 2.0, Variant::Classical).unwrap();
        assert!((c1 - c2).abs() > 1e-3);
    }

    #[test]
    fn prefix_ring_matches_direct_sum() {
        let mut rng = SeededRng::new(5);
        let coords: Vec<(f64, f64)> = (0..25)
            .map(|_| (20.0 + rng.unit_f64() * 10.0, 100.0 + rng.unit_f64() * 10.0))
            .collect();
        let masses: Vec<f64> = (0..25).map(|_| rng.range_inclusive(0, 1000) as f64).collect();
        let idx = RingIndex::new(&coords);
        for i in 0..25 {
            let rings = idx.ring_masses(&masses, i);
            for j in (0..25).filter(|&j| j != i) {
                assert_eq!(rings[j], ring_mass(&coords, &masses, i, j));
            }
        }
    }

    #[test]
    fn mass_field_validation() {
        assert!(MassField::new(MassLabel::Custom, vec![1.0f64, 0.0]).is_err());
        assert!(MassField::new(MassLabel::Custom, vec![1.0f64, -1.0, 3.0]).is_err());
        assert!("gravity".parse::<Variant>().is_err());
    }
}
