//! Feature extraction: the hand-defined pass-through, a linear PCA encoder
//! fitted on raw descriptor data, container-size control for the distance
//! threshold, and the retrain-and-rebuild step that keeps an unstructured
//! archive consistent with a freshly trained encoder.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::model::{DescriptorData, DescriptorLayout, EvaluationResult, FeatureVector, Solution};
use crate::scalar::{Real, Scalar};
use crate::unstructured::UnstructuredArchive;

/// Trajectories are subsampled to this many time-steps before flattening,
/// giving the encoder a fixed-length input.
pub const TRAJECTORY_SUBSAMPLE: usize = 32;

/// Rows retained for encoder training: the most recent window of descriptor
/// data.
pub const DESCRIPTOR_BUFFER_ROWS: usize = 20_000;

/// Flattens raw descriptor data to the encoder's fixed-length input.
pub fn flatten_descriptor(d: &DescriptorData) -> Vec<Scalar> {
    match d.layout() {
        DescriptorLayout::GenomeCopy | DescriptorLayout::OccupancyImage => d.data().to_vec(),
        DescriptorLayout::Trajectory => {
            let rows = d.rows();
            let mut out = Vec::with_capacity(TRAJECTORY_SUBSAMPLE * d.cols());
            for i in 0..TRAJECTORY_SUBSAMPLE {
                let r = if rows == 1 {
                    0
                } else {
                    (i * (rows - 1) + (TRAJECTORY_SUBSAMPLE - 1) / 2) / (TRAJECTORY_SUBSAMPLE - 1)
                };
                out.extend_from_slice(d.row(r.min(rows - 1)));
            }
            out
        }
    }
}

/// Principal-component projection with an orthonormal basis; columns are
/// ordered by descending explained variance and carry a deterministic sign
/// (the largest-magnitude entry of each component is positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel<R: Real> {
    mean: Vec<R>,
    components: Vec<Vec<R>>,
}

impl<R: Real> PcaModel<R> {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn latent_dim(&self) -> usize {
        self.components.len()
    }

    pub fn mean(&self) -> &[R] {
        &self.mean
    }

    pub fn components(&self) -> &[Vec<R>] {
        &self.components
    }

    /// Fits mean-centered principal components by eigendecomposition of the
    /// sample covariance. Deterministic for fixed input.
    pub fn fit(rows: &[Vec<R>], latent_dim: usize) -> Result<Self, CoreError> {
        if latent_dim == 0 {
            return Err(CoreError::invalid("latent dimension must be positive"));
        }
        if rows.len() < latent_dim + 1 {
            return Err(CoreError::Encoder {
                context: format!(
                    "need at least {} rows to fit {} components, got {}",
                    latent_dim + 1,
                    latent_dim,
                    rows.len()
                ),
            });
        }
        let dim = rows[0].len();
        if latent_dim > dim {
            return Err(CoreError::Encoder {
                context: format!("latent dimension {latent_dim} exceeds input dimension {dim}"),
            });
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(CoreError::Encoder {
                context: "descriptor rows differ in length".into(),
            });
        }

        let n = R::from_usize(rows.len()).unwrap();
        let mut mean = vec![R::zero(); dim];
        for row in rows {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m = *m + v;
            }
        }
        for m in &mut mean {
            *m = *m / n;
        }

        let denom = R::from_usize(rows.len() - 1).unwrap();
        let mut cov = vec![vec![R::zero(); dim]; dim];
        let mut centered = vec![R::zero(); dim];
        for row in rows {
            for (c, (&v, &m)) in centered.iter_mut().zip(row.iter().zip(&mean)) {
                *c = v - m;
            }
            for i in 0..dim {
                let ci = centered[i];
                for j in i..dim {
                    cov[i][j] = cov[i][j] + ci * centered[j];
                }
            }
        }
        for i in 0..dim {
            for j in i..dim {
                let v = cov[i][j] / denom;
                cov[i][j] = v;
                cov[j][i] = v;
            }
        }

        let trace = (0..dim).map(|i| cov[i][i]).fold(R::zero(), |a, b| a + b);
        if trace <= R::from_f64(1e-300).unwrap() {
            return Err(CoreError::Encoder {
                context: "descriptor data has zero variance".into(),
            });
        }

        let (eigenvalues, eigenvectors) = jacobi_eigen(cov);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eigenvalues[b]
                .partial_cmp(&eigenvalues[a])
                .expect("non-finite eigenvalue")
                .then(a.cmp(&b))
        });

        let mut components = Vec::with_capacity(latent_dim);
        for &idx in order.iter().take(latent_dim) {
            let mut comp: Vec<R> = eigenvectors.iter().map(|row| row[idx]).collect();
            let mut pivot = 0;
            for (i, v) in comp.iter().enumerate() {
                if v.abs() > comp[pivot].abs() {
                    pivot = i;
                }
            }
            if comp[pivot] < R::zero() {
                for v in &mut comp {
                    *v = -*v;
                }
            }
            components.push(comp);
        }
        Ok(Self { mean, components })
    }

    /// Projects a flattened input onto the components.
    pub fn encode(&self, x: &[R]) -> Result<Vec<R>, CoreError> {
        if x.len() != self.input_dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(&c, (&v, &m))| c * (v - m))
                    .fold(R::zero(), |a, b| a + b)
            })
            .collect())
    }

    /// Maps a latent vector back into input space.
    pub fn reconstruct(&self, z: &[R]) -> Vec<R> {
        let mut out = self.mean.clone();
        for (comp, &w) in self.components.iter().zip(z) {
            for (o, &c) in out.iter_mut().zip(comp) {
                *o = *o + w * c;
            }
        }
        out
    }

    /// Largest absolute deviation of the component Gram matrix from the
    /// identity.
    pub fn orthonormality_defect(&self) -> R {
        let mut worst = R::zero();
        for (i, a) in self.components.iter().enumerate() {
            for (j, b) in self.components.iter().enumerate() {
                let dot = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| x * y)
                    .fold(R::zero(), |acc, v| acc + v);
                let target = if i == j { R::one() } else { R::zero() };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// `(eigenvalues, eigenvectors)` with eigenvectors stored as matrix columns.
fn jacobi_eigen<R: Real>(mut a: Vec<Vec<R>>) -> (Vec<R>, Vec<Vec<R>>) {
    let n = a.len();
    let mut v = vec![vec![R::zero(); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = R::one();
    }
    let tol = R::from_f64(1e-14).unwrap();
    for _sweep in 0..100 {
        let mut off = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= R::from_f64(1e-300).unwrap() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (R::from_f64(2.0).unwrap() * a[p][q]);
                let t = {
                    let sign = if theta < R::zero() { -R::one() } else { R::one() };
                    sign / (theta.abs() + (theta * theta + R::one()).sqrt())
                };
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    let eigenvalues = (0..n).map(|i| a[i][i]).collect();
    (eigenvalues, v)
}

/// Feature mapping used by a run: the task's hand-defined feature, or a
/// learned projection of raw descriptor data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Encoder {
    HandDefined,
    Pca(PcaModel<Scalar>),
}

impl Encoder {
    pub fn is_learned(&self) -> bool {
        matches!(self, Encoder::Pca(_))
    }

    pub fn latent_dim(&self) -> Option<usize> {
        match self {
            Encoder::HandDefined => None,
            Encoder::Pca(m) => Some(m.latent_dim()),
        }
    }

    /// Container feature for an evaluation: the hand-defined feature
    /// verbatim, or the PCA projection of the flattened descriptor.
    pub fn feature_for(&self, eval: &EvaluationResult) -> Result<FeatureVector, CoreError> {
        match self {
            Encoder::HandDefined => Ok(eval.hand_feature.clone()),
            Encoder::Pca(model) => {
                let flat = flatten_descriptor(&eval.descriptor);
                FeatureVector::new(model.encode(&flat)?)
            }
        }
    }

    /// Re-encodes a stored solution's raw descriptor.
    pub fn encode_descriptor(&self, d: &DescriptorData) -> Result<FeatureVector, CoreError> {
        match self {
            Encoder::HandDefined => Err(CoreError::Encoder {
                context: "hand-defined features have no descriptor encoding".into(),
            }),
            Encoder::Pca(model) => FeatureVector::new(model.encode(&flatten_descriptor(d))?),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("encoder serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        serde_json::from_str(text).map_err(|e| CoreError::parse(format!("encoder json: {e}")))
    }
}

/// Container-size control parameters: `l <- l * (1 + k * (|A| - n_target))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CscParams {
    pub k: Scalar,
    pub n_target: usize,
}

impl CscParams {
    pub fn new(k: Scalar, n_target: usize) -> Self {
        assert!(k > 0.0 && k.is_finite(), "csc rate must be positive");
        Self { k, n_target }
    }
}

/// One container-size-control update of the distance threshold, floored at
/// 1e-9 to stay positive. Exact fixed point at `archive_size == n_target`.
pub fn csc_update<R: Real>(l: R, archive_size: usize, k: R, n_target: usize) -> R {
    let deviation = R::from_isize(archive_size as isize - n_target as isize).unwrap();
    (l * (R::one() + k * deviation)).max(R::from_f64(1e-9).unwrap())
}

/// Encoder retraining points: iterations 2, 4, 8, 16, ... up to the run
/// budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrainSchedule {
    triggers: Vec<u64>,
}

impl RetrainSchedule {
    pub fn doubling(budget: u64) -> Self {
        let mut triggers = Vec::new();
        let mut t = 2u64;
        while t <= budget {
            triggers.push(t);
            t *= 2;
        }
        Self { triggers }
    }

    pub fn triggers(&self) -> &[u64] {
        &self.triggers
    }

    pub fn is_trigger(&self, iteration: u64) -> bool {
        self.triggers.binary_search(&iteration).is_ok()
    }
}

/// Sliding window over the most recent descriptor rows, used as encoder
/// training data.
#[derive(Debug, Clone, Default)]
pub struct DescriptorBuffer {
    rows: VecDeque<Vec<Scalar>>,
}

impl DescriptorBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, d: &DescriptorData) {
        if self.rows.len() == DESCRIPTOR_BUFFER_ROWS {
            self.rows.pop_front();
        }
        self.rows.push_back(flatten_descriptor(d));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.rows.iter().cloned().collect()
    }
}

/// Fits a fresh encoder on the accumulated descriptors, re-encodes every
/// archived solution, applies one CSC update to the threshold and rebuilds
/// the archive under it.
pub fn retrain_and_rebuild(
    archive: &UnstructuredArchive,
    buffer: &DescriptorBuffer,
    latent_dim: usize,
    l: Scalar,
    csc: &CscParams,
) -> Result<(UnstructuredArchive, Encoder, Scalar), CoreError> {
    let model = PcaModel::fit(&buffer.rows(), latent_dim)?;
    let encoder = Encoder::Pca(model);
    let mut re_encoded: Vec<Solution> = Vec::with_capacity(archive.len());
    for s in archive.solutions() {
        let descriptor = s.descriptor().ok_or_else(|| CoreError::Encoder {
            context: format!("solution {} has no stored descriptor to re-encode", s.id()),
        })?;
        re_encoded.push(s.with_feature(encoder.encode_descriptor(descriptor)?));
    }
    let new_l = csc_update(l, archive.len(), csc.k, csc.n_target);
    let rebuilt = archive.rebuild(re_encoded, new_l)?;
    Ok((rebuilt, encoder, new_l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn csc_fixed_point_is_exact() {
        assert_eq!(csc_update(0.1, 4864, 0.001, 4864), 0.1);
    }

    #[test]
    fn csc_matches_direct_evaluation() {
        let updated = csc_update(0.1, 5000, 0.001, 4864);
        assert!((updated - 0.1136).abs() < 1e-12, "got {updated}");
    }

    #[test]
    fn csc_shrinks_below_target() {
        assert!(csc_update(0.1, 100, 0.001, 4864) < 0.1);
        // Far below target the multiplier goes negative; the floor applies.
        assert_eq!(csc_update(0.1, 0, 1.0, 4864), 1e-9);
    }

    fn planar_rows(n: usize, dim: usize, seed: u64) -> Vec<Vec<Scalar>> {
        // Points on a 2-D plane embedded in `dim` dimensions.
        let mut rng = rng_from_seed(seed);
        let u: Vec<Scalar> = (0..dim).map(|i| ((i + 1) as Scalar * 0.37).sin()).collect();
        let v: Vec<Scalar> = (0..dim).map(|i| ((i + 2) as Scalar * 0.73).cos()).collect();
        (0..n)
            .map(|_| {
                let a: Scalar = rng.random::<Scalar>() * 4.0 - 2.0;
                let b: Scalar = rng.random::<Scalar>() * 4.0 - 2.0;
                (0..dim).map(|i| 1.5 + a * u[i] + b * v[i]).collect()
            })
            .collect()
    }

    #[test]
    fn planar_data_reconstructs_exactly() {
        let rows = planar_rows(200, 10, 5);
        let model = PcaModel::fit(&rows, 2).unwrap();
        assert!(model.orthonormality_defect() < 1e-9);
        for row in rows.iter().take(20) {
            let z = model.encode(row).unwrap();
            let back = model.reconstruct(&z);
            let err: Scalar = row
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<Scalar>()
                .sqrt();
            assert!(err < 1e-8, "reconstruction error {err}");
        }
    }

    #[test]
    fn single_axis_variance_recovers_that_axis() {
        let mut rng = rng_from_seed(6);
        let rows: Vec<Vec<Scalar>> = (0..100)
            .map(|_| {
                let mut r = vec![0.0; 5];
                r[0] = rng.random::<Scalar>() * 2.0 - 1.0;
                r
            })
            .collect();
        let model = PcaModel::fit(&rows, 1).unwrap();
        let comp = &model.components()[0];
        assert!((comp[0] - 1.0).abs() < 1e-9, "component {comp:?}");
        assert!(comp[1..].iter().all(|c| c.abs() < 1e-9));
    }

    #[test]
    fn constant_data_is_a_zero_variance_error() {
        let rows = vec![vec![3.0; 4]; 50];
        assert!(matches!(
            PcaModel::<Scalar>::fit(&rows, 2),
            Err(CoreError::Encoder { .. })
        ));
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let rows = planar_rows(2, 10, 1);
        assert!(PcaModel::fit(&rows, 2).is_err());
    }

    #[test]
    fn encoding_the_mean_gives_zero() {
        let rows = planar_rows(100, 6, 7);
        let model = PcaModel::fit(&rows, 2).unwrap();
        let z = model.encode(&model.mean().to_vec()).unwrap();
        assert!(z.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn fit_is_deterministic() {
        let rows = planar_rows(150, 8, 9);
        let a = PcaModel::fit(&rows, 3).unwrap();
        let b = PcaModel::fit(&rows, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn encoder_round_trips_through_json() {
        let rows = planar_rows(50, 4, 2);
        let enc = Encoder::Pca(PcaModel::fit(&rows, 2).unwrap());
        let back = Encoder::from_json(&enc.to_json()).unwrap();
        assert_eq!(enc, back);
    }

    #[test]
    fn retrain_schedule_doubles() {
        let s = RetrainSchedule::doubling(200);
        assert_eq!(s.triggers(), &[2, 4, 8, 16, 32, 64, 128]);
        assert!(s.is_trigger(16));
        assert!(!s.is_trigger(10));
    }

    #[test]
    fn descriptor_buffer_keeps_the_most_recent_window() {
        use crate::model::DescriptorLayout;
        let mut buf = DescriptorBuffer::new();
        for i in 0..(DESCRIPTOR_BUFFER_ROWS + 10) {
            let d = DescriptorData::new(
                1,
                2,
                vec![i as Scalar, 0.0],
                DescriptorLayout::GenomeCopy,
            )
            .unwrap();
            buf.push(&d);
        }
        assert_eq!(buf.len(), DESCRIPTOR_BUFFER_ROWS);
        assert_eq!(buf.rows()[0][0], 10.0);
    }

    #[test]
    fn trajectory_flattening_is_fixed_length() {
        use crate::model::DescriptorLayout;
        for rows in [1usize, 5, 32, 100] {
            let data: Vec<Scalar> = (0..rows * 3).map(|v| v as Scalar).collect();
            let d = DescriptorData::new(rows, 3, data, DescriptorLayout::Trajectory).unwrap();
            let flat = flatten_descriptor(&d);
            assert_eq!(flat.len(), TRAJECTORY_SUBSAMPLE * 3);
            // First and last rows are always represented.
            assert_eq!(flat[0], 0.0);
            assert_eq!(flat[flat.len() - 3], ((rows - 1) * 3) as Scalar);
        }
    }
}
