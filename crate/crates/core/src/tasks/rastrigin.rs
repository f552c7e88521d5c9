//! Shifted-rastrigin trade-off tasks on the unit box. Each objective is the
//! negated rastrigin value around a different center, so the objectives
//! conflict and the global optima of the objectives sit at opposite corners
//! of the diagonal.

use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::model::{
    DescriptorData, DescriptorLayout, EvaluationResult, FeatureVector, FitnessVector, Genome,
    Interval,
};
use crate::scalar::Scalar;
use crate::tasks::{Task, TaskSpec};

const GENOME_DIM: usize = 10;
const CENTER_A: Scalar = 0.25;
const CENTER_B: Scalar = 0.75;

/// `rastrigin(z) = 10 n + sum(z_i^2 - 10 cos(2 pi z_i))`; zero at `z = 0`.
fn rastrigin(shifted: impl Iterator<Item = Scalar>, n: usize) -> Scalar {
    let mut acc = 10.0 * n as Scalar;
    for z in shifted {
        acc += z * z - 10.0 * (2.0 * std::f64::consts::PI * z).cos();
    }
    acc
}

fn objective(genome: &[Scalar], center: Scalar) -> Scalar {
    -rastrigin(genome.iter().map(|g| g - center), genome.len())
}

/// Per-objective worst-case bound on the unit box: each shifted coordinate
/// lies in an interval of half-width at most 0.75, so the cosine term is
/// bounded by 10 and the quadratic term by 0.75^2.
fn worst_bound() -> Scalar {
    10.0 * GENOME_DIM as Scalar + GENOME_DIM as Scalar * (0.75 * 0.75 + 10.0)
}

fn base_spec(name: &'static str, objective_count: usize) -> TaskSpec {
    let worst = worst_bound();
    let mut reference_point = vec![TaskSpec::reference_component(-worst, 0.0); 2];
    if objective_count == 3 {
        // Sphere objective centered at 0.5: worst is 10 * 0.5^2.
        let sphere_worst = GENOME_DIM as Scalar * 0.25;
        reference_point.push(TaskSpec::reference_component(-sphere_worst, 0.0));
    }
    TaskSpec {
        name,
        genome_dim: GENOME_DIM,
        objective_count,
        feature_dim: 2,
        genome_bounds: vec![Interval::new(0.0, 1.0); GENOME_DIM],
        feature_bounds: vec![Interval::new(0.0, 1.0); 2],
        reference_point,
        episode_len: None,
        noise_scale: 0.0,
    }
}

fn evaluate_common(
    genome: &Genome,
    objective_count: usize,
) -> Result<EvaluationResult, CoreError> {
    if genome.len() != GENOME_DIM {
        return Err(CoreError::DimensionMismatch {
            expected: GENOME_DIM,
            got: genome.len(),
        });
    }
    let g = genome.values();
    let mut fitness = vec![objective(g, CENTER_A), objective(g, CENTER_B)];
    if objective_count == 3 {
        fitness.push(-g.iter().map(|x| (x - 0.5) * (x - 0.5)).sum::<Scalar>());
    }
    Ok(EvaluationResult {
        fitness: FitnessVector::new(fitness)?,
        descriptor: DescriptorData::new(1, GENOME_DIM, g.to_vec(), DescriptorLayout::GenomeCopy)?,
        hand_feature: FeatureVector::new(vec![g[0], g[1]])?,
    })
}

/// Two conflicting rastrigin objectives; features are the first two genes.
pub struct BiobjectiveRastrigin {
    spec: TaskSpec,
}

impl BiobjectiveRastrigin {
    pub fn new() -> Self {
        Self {
            spec: base_spec("biobjective-rastrigin", 2),
        }
    }
}

impl Default for BiobjectiveRastrigin {
    fn default() -> Self {
        Self::new()
    }
}

impl Task for BiobjectiveRastrigin {
    fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    fn evaluate(
        &self,
        genome: &Genome,
        _rng: &mut ChaCha8Rng,
    ) -> Result<EvaluationResult, CoreError> {
        evaluate_common(genome, 2)
    }
}

/// The bi-objective task plus a sphere objective centered at 0.5.
pub struct TriobjectiveRastrigin {
    spec: TaskSpec,
}

impl TriobjectiveRastrigin {
    pub fn new() -> Self {
        Self {
            spec: base_spec("triobjective-rastrigin", 3),
        }
    }
}

impl Default for TriobjectiveRastrigin {
    fn default() -> Self {
        Self::new()
    }
}

impl Task for TriobjectiveRastrigin {
    fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    fn evaluate(
        &self,
        genome: &Genome,
        _rng: &mut ChaCha8Rng,
    ) -> Result<EvaluationResult, CoreError> {
        evaluate_common(genome, 3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn eval_bi(values: Vec<Scalar>) -> EvaluationResult {
        let task = BiobjectiveRastrigin::new();
        let g = task.genome(values).unwrap();
        task.evaluate(&g, &mut rng_from_seed(0)).unwrap()
    }

    #[test]
    fn first_center_is_the_optimum_of_objective_one() {
        let r = eval_bi(vec![CENTER_A; GENOME_DIM]);
        assert!(r.fitness.values()[0].abs() < 1e-12);
        assert!(r.fitness.values()[1] < 0.0);
    }

    #[test]
    fn second_center_is_the_optimum_of_objective_two() {
        let r = eval_bi(vec![CENTER_B; GENOME_DIM]);
        assert!(r.fitness.values()[1].abs() < 1e-12);
        assert!(r.fitness.values()[0] < 0.0);
    }

    #[test]
    fn matches_an_independently_coded_oracle() {
        // Second implementation written from the formula with explicit
        // loops rather than iterator adapters.
        fn oracle(g: &[Scalar], c: Scalar) -> Scalar {
            let mut total = 10.0 * g.len() as Scalar;
            for i in 0..g.len() {
                let z = g[i] - c;
                total += z * z;
                total -= 10.0 * (2.0 * std::f64::consts::PI * z).cos();
            }
            -total
        }
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let values: Vec<Scalar> = (0..GENOME_DIM).map(|_| rng.random()).collect();
            let r = eval_bi(values.clone());
            assert!((r.fitness.values()[0] - oracle(&values, CENTER_A)).abs() < 1e-12);
            assert!((r.fitness.values()[1] - oracle(&values, CENTER_B)).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_objective_is_zero_at_its_center() {
        let task = TriobjectiveRastrigin::new();
        let g = task.genome(vec![0.5; GENOME_DIM]).unwrap();
        let r = task.evaluate(&g, &mut rng_from_seed(0)).unwrap();
        assert_eq!(r.fitness.values()[2], 0.0);
    }

    #[test]
    fn sphere_objective_matches_direct_formula() {
        let task = TriobjectiveRastrigin::new();
        let mut rng = rng_from_seed(4);
        for _ in 0..20 {
            let values: Vec<Scalar> = (0..GENOME_DIM).map(|_| rng.random()).collect();
            let g = task.genome(values.clone()).unwrap();
            let r = task.evaluate(&g, &mut rng_from_seed(0)).unwrap();
            let mut expected = 0.0;
            for v in &values {
                expected -= (v - 0.5) * (v - 0.5);
            }
            assert!((r.fitness.values()[2] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn wrong_genome_dimension_is_an_error() {
        let task = BiobjectiveRastrigin::new();
        let g = Genome::new(vec![0.5; 3], vec![Interval::new(0.0, 1.0); 3]).unwrap();
        assert!(task.evaluate(&g, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn features_are_the_leading_genes() {
        let mut values = vec![0.5; GENOME_DIM];
        values[0] = 0.12;
        values[1] = 0.93;
        let r = eval_bi(values);
        assert_eq!(r.hand_feature.values(), &[0.12, 0.93]);
    }
}
