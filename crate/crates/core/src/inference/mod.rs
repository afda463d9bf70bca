//! Task/skill mutual information and the naive Bayes transfer of skills from
//! the source corpus to target occupations described only by task tokens.

mod mi;
mod nb;
mod taxonomy;

pub use mi::{build_mi_matrix, mutual_information, mutual_information_counts, MiMatrix};
pub use nb::{train_nb, Inference, NbModel, SkillTraining};
pub use taxonomy::{binarize, infer_taxonomy, SkillTaxonomy};
