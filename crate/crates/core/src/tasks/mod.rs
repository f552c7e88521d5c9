//! Desk-scale benchmark tasks covering three regimes: bounded hand-defined
//! features (rastrigin trade-offs), learned features (maze navigation with
//! raw occupancy descriptors) and unknown feature bounds (planar arm), plus
//! a replicated-evaluation wrapper that turns feature reproducibility into
//! an explicit objective.
//!
//! Every task is a pure function of `(genome, rng stream)`; deterministic
//! tasks ignore the stream entirely.

mod arm;
mod maze;
mod rastrigin;
mod uncertain;

pub use arm::PlanarArm;
pub use maze::{MazeTask, MazeWorld};
pub use rastrigin::{BiobjectiveRastrigin, TriobjectiveRastrigin};
pub use uncertain::{UncertainTask, REPLICATIONS};

use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::model::{EvaluationResult, Genome, Interval};
use crate::scalar::Scalar;

/// Static description of a task: dimensions, bounds, episode length and the
/// hypervolume reference point. Feature bounds are the analytic truth used
/// by the canonical metrics grid; containers may choose to ignore or
/// misestimate them.
#[derive(Debug, Clone)]
pub struct TaskSpec {
    pub name: &'static str,
    pub genome_dim: usize,
    pub objective_count: usize,
    pub feature_dim: usize,
    pub genome_bounds: Vec<Interval>,
    pub feature_bounds: Vec<Interval>,
    pub reference_point: Vec<Scalar>,
    pub episode_len: Option<usize>,
    pub noise_scale: Scalar,
}

impl TaskSpec {
    /// Reference component for one objective: the minimum achievable bound
    /// pushed 5% of the range further down, so it is dominated by every
    /// reachable fitness.
    pub(crate) fn reference_component(min_bound: Scalar, max_bound: Scalar) -> Scalar {
        min_bound - 0.05 * (max_bound - min_bound)
    }
}

/// A benchmark task mapping genomes to evaluations.
pub trait Task: Send + Sync {
    fn spec(&self) -> &TaskSpec;

    fn evaluate(&self, genome: &Genome, rng: &mut ChaCha8Rng)
        -> Result<EvaluationResult, CoreError>;

    /// A fresh genome with the task's bounds attached.
    fn genome(&self, values: Vec<Scalar>) -> Result<Genome, CoreError> {
        Genome::new(values, self.spec().genome_bounds.clone())
    }
}

/// Task registry keyed by the names accepted in run configurations.
pub fn by_name(name: &str) -> Result<Box<dyn Task>, CoreError> {
    match name {
        "biobjective-rastrigin" => Ok(Box::new(BiobjectiveRastrigin::new())),
        "triobjective-rastrigin" => Ok(Box::new(TriobjectiveRastrigin::new())),
        "planar-arm" => Ok(Box::new(PlanarArm::new())),
        "maze" => Ok(Box::new(MazeTask::snake())),
        "uncertain-arm" => Ok(Box::new(UncertainTask::around_arm(0.05))),
        other => Err(CoreError::Task {
            context: format!("unknown task '{other}'"),
        }),
    }
}

pub fn task_names() -> &'static [&'static str] {
    &[
        "biobjective-rastrigin",
        "triobjective-rastrigin",
        "planar-arm",
        "maze",
        "uncertain-arm",
    ]
}
