//! Shared domain types: genomes, fitness and feature vectors, descriptors
//! and the solution record every archive stores.
//!
//! All types are immutable after construction and validated on construction:
//! a NaN or infinity in a fitness or feature is a hard evaluation error and
//! is never stored.

use crate::error::CoreError;
use crate::scalar::Scalar;

/// Closed interval for one genome coordinate. `lo = -inf, hi = +inf` encodes
/// an unbounded coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        assert!(lo <= hi, "interval lower bound above upper bound");
        Self { lo, hi }
    }

    pub fn unbounded() -> Self {
        Self {
            lo: Scalar::NEG_INFINITY,
            hi: Scalar::INFINITY,
        }
    }

    pub fn clamp(&self, x: Scalar) -> Scalar {
        x.max(self.lo).min(self.hi)
    }

    pub fn contains(&self, x: Scalar) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> Scalar {
        self.hi - self.lo
    }

    pub fn center(&self) -> Scalar {
        0.5 * (self.lo + self.hi)
    }
}

/// Fixed-length real parameter vector with per-dimension bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    values: Vec<Scalar>,
    bounds: Vec<Interval>,
}

impl Genome {
    pub fn new(values: Vec<Scalar>, bounds: Vec<Interval>) -> Result<Self, CoreError> {
        if values.len() != bounds.len() {
            return Err(CoreError::DimensionMismatch {
                expected: bounds.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(CoreError::non_finite("genome values"));
        }
        Ok(Self { values, bounds })
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every bounded coordinate lies inside its interval.
    pub fn in_bounds(&self) -> bool {
        self.values
            .iter()
            .zip(&self.bounds)
            .all(|(v, b)| b.contains(*v))
    }
}

/// Clamps every coordinate into its interval; unbounded coordinates pass
/// through unchanged. Idempotent.
pub fn clip_genome(g: &Genome) -> Genome {
    let values = g
        .values
        .iter()
        .zip(&g.bounds)
        .map(|(v, b)| b.clamp(*v))
        .collect();
    Genome {
        values,
        bounds: g.bounds.clone(),
    }
}

/// Objective values of one evaluation, length `m >= 1`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessVector(Vec<Scalar>);

impl FitnessVector {
    pub fn new(values: Vec<Scalar>) -> Result<Self, CoreError> {
        if values.is_empty() {
            return Err(CoreError::EmptyInput {
                context: "fitness vector".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::non_finite("fitness vector"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Feature-space coordinates of one solution, length `d >= 1`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<Scalar>);

impl FeatureVector {
    pub fn new(values: Vec<Scalar>) -> Result<Self, CoreError> {
        if values.is_empty() {
            return Err(CoreError::EmptyInput {
                context: "feature vector".into(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::non_finite("feature vector"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[Scalar] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Identifies which task produced a raw descriptor and how its rows are laid
/// out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescriptorLayout {
    /// One row per coordinate of the genome.
    GenomeCopy,
    /// One row per episode time-step; columns are state dimensions.
    Trajectory,
    /// A flattened square occupancy image; one row, `side * side` columns.
    OccupancyImage,
}

impl DescriptorLayout {
    pub fn name(&self) -> &'static str {
        match self {
            DescriptorLayout::GenomeCopy => "genome-copy",
            DescriptorLayout::Trajectory => "trajectory",
            DescriptorLayout::OccupancyImage => "occupancy-image",
        }
    }
}

/// Raw data emitted by an evaluation, from which learned features are
/// encoded. Stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptorData {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
    layout: DescriptorLayout,
}

impl DescriptorData {
    pub fn new(
        rows: usize,
        cols: usize,
        data: Vec<Scalar>,
        layout: DescriptorLayout,
    ) -> Result<Self, CoreError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(CoreError::invalid(format!(
                "descriptor shape {rows}x{cols} does not match {} values",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::non_finite("descriptor data"));
        }
        Ok(Self {
            rows,
            cols,
            data,
            layout,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn layout(&self) -> DescriptorLayout {
        self.layout
    }
}

/// Everything a task reports about one genome. The hand-defined feature is
/// always computed, even for runs driven by learned features: the metrics
/// projection is keyed on it.
#[derive(Debug, Clone)]
pub struct EvaluationResult {
    pub fitness: FitnessVector,
    pub descriptor: DescriptorData,
    pub hand_feature: FeatureVector,
}

/// The unit stored in every archive.
#[derive(Debug, Clone)]
pub struct Solution {
    id: u64,
    genome: Genome,
    fitness: FitnessVector,
    feature: FeatureVector,
    hand_feature: FeatureVector,
    descriptor: Option<DescriptorData>,
}

impl Solution {
    pub fn new(
        id: u64,
        genome: Genome,
        fitness: FitnessVector,
        feature: FeatureVector,
        hand_feature: FeatureVector,
        descriptor: Option<DescriptorData>,
    ) -> Self {
        Self {
            id,
            genome,
            fitness,
            feature,
            hand_feature,
            descriptor,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn genome(&self) -> &Genome {
        &self.genome
    }

    pub fn fitness(&self) -> &FitnessVector {
        &self.fitness
    }

    pub fn feature(&self) -> &FeatureVector {
        &self.feature
    }

    /// The task's ground-truth feature, used for metric projection.
    pub fn hand_feature(&self) -> &FeatureVector {
        &self.hand_feature
    }

    pub fn descriptor(&self) -> Option<&DescriptorData> {
        self.descriptor.as_ref()
    }

    /// Copy with the container feature replaced (used when an encoder is
    /// retrained and stored solutions are re-encoded).
    pub fn with_feature(&self, feature: FeatureVector) -> Self {
        let mut s = self.clone();
        s.feature = feature;
        s
    }

    /// Copy with the descriptor dropped, for runs that never re-encode.
    pub fn without_descriptor(mut self) -> Self {
        self.descriptor = None;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box(n: usize) -> Vec<Interval> {
        vec![Interval::new(0.0, 1.0); n]
    }

    #[test]
    fn clip_clamps_at_upper_bound() {
        let g = Genome::new(vec![1.3, 0.5], unit_box(2)).unwrap();
        assert_eq!(clip_genome(&g).values(), &[1.0, 0.5]);
    }

    #[test]
    fn clip_keeps_in_bounds_values() {
        let g = Genome::new(vec![0.2, 0.8], unit_box(2)).unwrap();
        assert_eq!(clip_genome(&g).values(), &[0.2, 0.8]);
    }

    #[test]
    fn clip_clamps_at_lower_bound() {
        let g = Genome::new(vec![-0.1], unit_box(1)).unwrap();
        assert_eq!(clip_genome(&g).values(), &[0.0]);
    }

    #[test]
    fn clip_leaves_unbounded_coordinates() {
        let g = Genome::new(vec![123.0], vec![Interval::unbounded()]).unwrap();
        assert_eq!(clip_genome(&g).values(), &[123.0]);
    }

    #[test]
    fn fitness_rejects_non_finite() {
        assert!(FitnessVector::new(vec![1.0, Scalar::NAN]).is_err());
        assert!(FitnessVector::new(vec![Scalar::INFINITY]).is_err());
        assert!(FitnessVector::new(vec![]).is_err());
    }

    #[test]
    fn feature_rejects_non_finite() {
        assert!(FeatureVector::new(vec![Scalar::NEG_INFINITY]).is_err());
    }

    #[test]
    fn descriptor_shape_is_checked() {
        assert!(DescriptorData::new(2, 3, vec![0.0; 5], DescriptorLayout::Trajectory).is_err());
        let d = DescriptorData::new(2, 3, vec![0.0; 6], DescriptorLayout::Trajectory).unwrap();
        assert_eq!(d.row(1).len(), 3);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn clip_is_idempotent(values in proptest::collection::vec(-10.0f64..10.0, 1..8)) {
                let bounds = unit_box(values.len());
                let g = Genome::new(values, bounds).unwrap();
                let once = clip_genome(&g);
                let twice = clip_genome(&once);
                prop_assert_eq!(once.values(), twice.values());
                prop_assert!(once.in_bounds());
            }
        }
    }
}
