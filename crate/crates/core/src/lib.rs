//! Quasi affine cartesian codes: locally recoverable evaluation codes on a
//! cartesian product of finite field subsets, with exact minimum distance
//! analysis, local repair and a small storage-cluster simulator.

pub mod distance_analysis;
pub mod finite_field;
pub mod linalg;
pub mod local_recovery;
pub mod multipoly;
pub mod qac_code;
pub mod storage_sim;

pub use distance_analysis::{exact_distance, DistanceReport, Method};
pub use finite_field::{Elem, FieldElement, FieldSpec, FiniteField};
pub use multipoly::{EvaluationGrid, Locality, Monomial, Polynomial};
pub use qac_code::{generator_matrix, CodeDescriptor, CodeSpec, Codeword, GeneratorMatrix};
