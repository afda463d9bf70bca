//! Radiation-model destination prediction and ranking evaluation.
//!
//! `T_ij` is computed from an origin mass `m_i`, a destination mass `n_j`
//! and the ring mass `s_ij` of all other cities strictly closer to `i` than
//! `j` is. Two forms are available: the one with `(m_i + n_j)` in the first
//! denominator factor ([`Variant::Paper`], the default) and the classical one
//! with `(m_i + s_ij)` ([`Variant::Classical`]).

mod ndcg;
mod radiation;

pub use ndcg::{compare_mass_fields, ndcg, MassFieldComparison, PairwiseWelch};
pub use radiation::{
    haversine_km, predict_destinations, radiation_flow, ring_mass, FlowPrediction, MassField, MassLabel,
    RingIndex, Variant, EARTH_RADIUS_KM,
};
