//! Multi-objective quality-diversity optimization.
//!
//! This crate provides the two archive containers used throughout the
//! toolkit — an unstructured archive with radius-based local Pareto
//! competition and a CVT grid archive holding one bounded Pareto front per
//! cell — together with the numeric kernels they rely on (dominance tests,
//! exact 2-D/3-D hypervolume, k-means tessellation, PCA feature learning),
//! the isoline variation operator, desk-scale benchmark tasks and the
//! evaluation metrics computed over projected grids.
//!
//! Numeric kernels are generic over the scalar type (see [`Real`]); the
//! domain types are instantiated at [`Scalar`].

pub mod error;
pub mod features;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pareto;
pub mod rng;
pub mod scalar;
pub mod tasks;
pub mod unstructured;
pub mod variation;

pub use error::CoreError;
pub use model::{
    DescriptorData, DescriptorLayout, EvaluationResult, FeatureVector, FitnessVector, Genome,
    Interval, Solution,
};
pub use scalar::{Real, Scalar};
pub use unstructured::{AdditionOutcome, AdditionStatus, UnstructuredArchive};
