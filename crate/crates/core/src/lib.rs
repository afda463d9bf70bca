//! Skill taxonomy transfer and labor-market network analytics.
//!
//! The pipeline maps a skill taxonomy from a source occupation corpus (skill
//! importance plus task tokens) onto target occupations known only by their
//! task tokens, then builds the skill co-occurrence network, splits it into
//! socio-cognitive and sensory-physical poles, profiles cities, predicts
//! migration with a radiation model and runs the regression/t-test
//! comparisons.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix them to `f64`, which is what the pipeline uses.

pub mod cityprofile;
pub mod corpus;
pub mod effective_use;
pub mod error;
pub mod inference;
pub mod mobility;
pub mod output;
pub mod pipeline;
pub mod rng;
pub mod scalar;
pub mod skillspace;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Working precision of the pipeline.
pub type Real = f64;

pub type RcaMatrix = effective_use::RcaMatrix<Real>;
pub type MiMatrix = inference::MiMatrix<Real>;
pub type NbModel = inference::NbModel<Real>;
pub type SkillTaxonomy = inference::SkillTaxonomy<Real>;
pub type SkillSpace = skillspace::SkillSpace<Real>;
pub type LouvainResult = skillspace::LouvainResult<Real>;
pub type CitySkills = cityprofile::CitySkills<Real>;
pub type MassField = mobility::MassField<Real>;
pub type FlowPrediction = mobility::FlowPrediction<Real>;
pub type OlsFit = stats::OlsFit<Real>;
pub type TTestResult = stats::TTestResult<Real>;
