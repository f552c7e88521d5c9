//! Planar redundant arm with unit links. The feature is the end-effector
//! position, whose reachable set is a disc the optimizer is not told about;
//! the objectives reward smooth, low-effort joint configurations.

use std::f64::consts::PI;

use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::model::{
    DescriptorData, DescriptorLayout, EvaluationResult, FeatureVector, FitnessVector, Genome,
    Interval,
};
use crate::scalar::Scalar;
use crate::tasks::{Task, TaskSpec};

pub const LINKS: usize = 8;

/// Forward kinematics: each joint angle is relative to the previous link.
pub fn end_effector(angles: &[Scalar]) -> [Scalar; 2] {
    let mut heading = 0.0;
    let mut x = 0.0;
    let mut y = 0.0;
    for &a in angles {
        heading += a;
        x += heading.cos();
        y += heading.sin();
    }
    [x, y]
}

pub struct PlanarArm {
    spec: TaskSpec,
}

impl PlanarArm {
    pub fn new() -> Self {
        let reach = LINKS as Scalar;
        let max_variance = PI * PI;
        let max_effort = LINKS as Scalar * PI;
        Self {
            spec: TaskSpec {
                name: "planar-arm",
                genome_dim: LINKS,
                objective_count: 2,
                feature_dim: 2,
                genome_bounds: vec![Interval::new(-PI, PI); LINKS],
                feature_bounds: vec![Interval::new(-reach, reach); 2],
                reference_point: vec![
                    TaskSpec::reference_component(-max_variance, 0.0),
                    TaskSpec::reference_component(-max_effort, 0.0),
                ],
                episode_len: None,
                noise_scale: 0.0,
            },
        }
    }
}

impl Default for PlanarArm {
    fn default() -> Self {
        Self::new()
    }
}

impl Task for PlanarArm {
    fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    fn evaluate(
        &self,
        genome: &Genome,
        _rng: &mut ChaCha8Rng,
    ) -> Result<EvaluationResult, CoreError> {
        if genome.len() != LINKS {
            return Err(CoreError::DimensionMismatch {
                expected: LINKS,
                got: genome.len(),
            });
        }
        let angles = genome.values();
        let mean = angles.iter().sum::<Scalar>() / LINKS as Scalar;
        let variance =
            angles.iter().map(|a| (a - mean) * (a - mean)).sum::<Scalar>() / LINKS as Scalar;
        let effort: Scalar = angles.iter().map(|a| a.abs()).sum();
        let tip = end_effector(angles);
        Ok(EvaluationResult {
            fitness: FitnessVector::new(vec![-variance, -effort])?,
            descriptor: DescriptorData::new(
                1,
                LINKS,
                angles.to_vec(),
                DescriptorLayout::GenomeCopy,
            )?,
            hand_feature: FeatureVector::new(tip.to_vec())?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn eval(values: Vec<Scalar>) -> EvaluationResult {
        let task = PlanarArm::new();
        let g = task.genome(values).unwrap();
        task.evaluate(&g, &mut rng_from_seed(0)).unwrap()
    }

    #[test]
    fn straight_arm_reaches_full_extension() {
        let r = eval(vec![0.0; LINKS]);
        assert_eq!(r.hand_feature.values(), &[8.0, 0.0]);
        assert_eq!(r.fitness.values(), &[0.0, 0.0]);
    }

    #[test]
    fn alternating_angles_match_an_independent_kinematics_oracle() {
        // Second forward-kinematics implementation using an explicit
        // cumulative-sum array.
        fn oracle(angles: &[Scalar]) -> [Scalar; 2] {
            let mut cumulative = vec![0.0; angles.len()];
            let mut acc = 0.0;
            for (i, a) in angles.iter().enumerate() {
                acc += a;
                cumulative[i] = acc;
            }
            let x = cumulative.iter().map(|h| h.cos()).sum();
            let y = cumulative.iter().map(|h| h.sin()).sum();
            [x, y]
        }
        let alternating: Vec<Scalar> = (0..LINKS)
            .map(|i| if i % 2 == 0 { PI } else { -PI })
            .collect();
        let r = eval(alternating.clone());
        let expected = oracle(&alternating);
        assert!((r.hand_feature.values()[0] - expected[0]).abs() < 1e-12);
        assert!((r.hand_feature.values()[1] - expected[1]).abs() < 1e-12);

        let mut rng = rng_from_seed(8);
        for _ in 0..30 {
            let values: Vec<Scalar> =
                (0..LINKS).map(|_| (rng.random::<Scalar>() * 2.0 - 1.0) * PI).collect();
            let r = eval(values.clone());
            let expected = oracle(&values);
            assert!((r.hand_feature.values()[0] - expected[0]).abs() < 1e-10);
            assert!((r.hand_feature.values()[1] - expected[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn reach_never_exceeds_the_link_budget() {
        let mut rng = rng_from_seed(9);
        for _ in 0..100 {
            let values: Vec<Scalar> =
                (0..LINKS).map(|_| (rng.random::<Scalar>() * 2.0 - 1.0) * PI).collect();
            let r = eval(values);
            let f = r.hand_feature.values();
            assert!((f[0] * f[0] + f[1] * f[1]).sqrt() <= LINKS as Scalar + 1e-9);
        }
    }
}
