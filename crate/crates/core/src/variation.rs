//! Parent selection and the isoline variation operator.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::CoreError;
use crate::model::{clip_genome, Genome};
use crate::scalar::{Real, Scalar};

/// Isoline operator scales: `sigma_iso` perturbs every gene independently,
/// `sigma_line` scales a single shared step along the parent difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsolineParams {
    pub sigma_iso: Scalar,
    pub sigma_line: Scalar,
}

impl IsolineParams {
    pub fn new(sigma_iso: Scalar, sigma_line: Scalar) -> Self {
        assert!(
            sigma_iso.is_finite() && sigma_iso >= 0.0,
            "sigma_iso must be finite and non-negative"
        );
        assert!(
            sigma_line.is_finite() && sigma_line >= 0.0,
            "sigma_line must be finite and non-negative"
        );
        Self {
            sigma_iso,
            sigma_line,
        }
    }
}

/// Uniform parent-pair selection with replacement over `len` archive
/// members; the two parents of a pair are drawn independently and may
/// coincide.
pub fn select_parent_pairs<G: Rng>(
    len: usize,
    count: usize,
    rng: &mut G,
) -> Result<Vec<(usize, usize)>, CoreError> {
    if len == 0 {
        return Err(CoreError::EmptyInput {
            context: "parent selection over an empty archive".into(),
        });
    }
    Ok((0..count)
        .map(|_| (rng.random_range(0..len), rng.random_range(0..len)))
        .collect())
}

/// Core isoline recombination on raw coordinate slices:
/// `child_i = p1_i + sigma_iso * eps_i + sigma_line * zeta * (p2_i - p1_i)`,
/// with one shared normal draw `zeta` (consumed first) and one independent
/// normal draw per gene. All draws are consumed regardless of the sigma
/// values so the stream stays aligned across configurations.
pub fn isoline_values<R: Real, G: Rng>(
    p1: &[R],
    p2: &[R],
    sigma_iso: R,
    sigma_line: R,
    rng: &mut G,
) -> Vec<R> {
    assert_eq!(p1.len(), p2.len(), "parent genomes differ in length");
    let zeta = R::from_f64(rng.sample::<f64, _>(StandardNormal)).unwrap();
    p1.iter()
        .zip(p2)
        .map(|(&a, &b)| {
            let eps = R::from_f64(rng.sample::<f64, _>(StandardNormal)).unwrap();
            a + sigma_iso * eps + sigma_line * zeta * (b - a)
        })
        .collect()
}

/// Isoline variation over genomes; the child is clipped into the first
/// parent's bounds.
pub fn isoline<G: Rng>(
    p1: &Genome,
    p2: &Genome,
    params: &IsolineParams,
    rng: &mut G,
) -> Result<Genome, CoreError> {
    if p1.len() != p2.len() {
        return Err(CoreError::DimensionMismatch {
            expected: p1.len(),
            got: p2.len(),
        });
    }
    let values = isoline_values(
        p1.values(),
        p2.values(),
        params.sigma_iso,
        params.sigma_line,
        rng,
    );
    let raw = Genome::new(values, p1.bounds().to_vec())?;
    Ok(clip_genome(&raw))
}
