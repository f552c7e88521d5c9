//! CVT grid container: a centroidal tessellation of the feature space with
//! one bounded Pareto front per cell.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::CoreError;
use crate::model::{FeatureVector, Interval, Solution};
use crate::pareto::dominates;
use crate::rng::rng_from_seed;
use crate::scalar::{squared_distance, Scalar};
use crate::unstructured::{AdditionOutcome, AdditionStatus};

/// Uniform sample count for the k-means construction.
const CVT_SAMPLES: usize = 50_000;

/// Fixed Lloyd iteration count.
const CVT_ITERATIONS: usize = 100;

/// Centroidal Voronoi tessellation of a bounded feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct CvtTessellation {
    centroids: Vec<Vec<Scalar>>,
    bounds: Vec<Interval>,
    seed: u64,
}

impl CvtTessellation {
    pub fn centroids(&self) -> &[Vec<Scalar>] {
        &self.centroids
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cell_count(&self) -> usize {
        self.centroids.len()
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// Index of the nearest centroid, ties broken by the lowest index.
    /// Features outside the bounds still map to their nearest (boundary)
    /// centroid; nothing is rejected.
    pub fn assign_cell(&self, x: &[Scalar]) -> Result<usize, CoreError> {
        if x.len() != self.dim() {
            return Err(CoreError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(nearest_centroid(&self.centroids, x))
    }
}

fn nearest_centroid(centroids: &[Vec<Scalar>], x: &[Scalar]) -> usize {
    let mut best = 0;
    let mut best_d = Scalar::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(c.as_slice(), x);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Builds a tessellation by running k-means (fixed 100 iterations) over
/// 50,000 uniform samples of the bounded space. Deterministic for fixed
/// `(k, bounds, seed)` regardless of thread count.
pub fn build_cvt(k: usize, bounds: &[Interval], seed: u64) -> Result<CvtTessellation, CoreError> {
    if k == 0 {
        return Err(CoreError::invalid("tessellation needs at least one cell"));
    }
    if k > CVT_SAMPLES {
        return Err(CoreError::invalid(format!(
            "cell count {k} exceeds the {CVT_SAMPLES} construction samples"
        )));
    }
    if bounds.is_empty() || bounds.iter().any(|b| !b.lo.is_finite() || !b.hi.is_finite()) {
        return Err(CoreError::invalid("tessellation bounds must be finite"));
    }
    let d = bounds.len();
    let mut rng = rng_from_seed(seed);
    let mut samples = vec![0.0; CVT_SAMPLES * d];
    for row in samples.chunks_exact_mut(d) {
        for (v, b) in row.iter_mut().zip(bounds) {
            *v = b.lo + rng.random::<Scalar>() * b.width();
        }
    }
    let centroids = lloyd_kmeans(&samples, d, k);
    Ok(CvtTessellation {
        centroids,
        bounds: bounds.to_vec(),
        seed,
    })
}

fn lloyd_kmeans(samples: &[Scalar], d: usize, k: usize) -> Vec<Vec<Scalar>> {
    let mut centroids: Vec<Vec<Scalar>> = samples
        .chunks_exact(d)
        .take(k)
        .map(|row| row.to_vec())
        .collect();
    // Assignment fans out over fixed-size chunks; partial sums are merged
    // sequentially in chunk order so float accumulation is reproducible.
    const CHUNK_ROWS: usize = 4096;
    for _ in 0..CVT_ITERATIONS {
        let partials: Vec<(Vec<Scalar>, Vec<usize>)> = samples
            .par_chunks(CHUNK_ROWS * d)
            .map(|chunk| {
                let mut sums = vec![0.0; k * d];
                let mut counts = vec![0usize; k];
                for row in chunk.chunks_exact(d) {
                    let c = nearest_centroid(&centroids, row);
                    counts[c] += 1;
                    for (acc, v) in sums[c * d..(c + 1) * d].iter_mut().zip(row) {
                        *acc += v;
                    }
                }
                (sums, counts)
            })
            .collect();
        let mut sums = vec![0.0; k * d];
        let mut counts = vec![0usize; k];
        for (ps, pc) in partials {
            for (acc, v) in sums.iter_mut().zip(&ps) {
                *acc += v;
            }
            for (acc, v) in counts.iter_mut().zip(&pc) {
                *acc += v;
            }
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as Scalar;
                for (out, acc) in centroid.iter_mut().zip(&sums[c * d..(c + 1) * d]) {
                    *out = acc * inv;
                }
            }
            // Empty clusters keep their previous centroid.
        }
    }
    centroids
}

type CvtKey = (usize, Vec<(u64, u64)>, u64);
static CVT_CACHE: Lazy<Mutex<HashMap<CvtKey, Arc<CvtTessellation>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Memoized [`build_cvt`]: construction is a pure function of its inputs, so
/// repeated runs in one process share the result.
pub fn build_cvt_cached(
    k: usize,
    bounds: &[Interval],
    seed: u64,
) -> Result<Arc<CvtTessellation>, CoreError> {
    let key: CvtKey = (
        k,
        bounds
            .iter()
            .map(|b| (b.lo.to_bits(), b.hi.to_bits()))
            .collect(),
        seed,
    );
    if let Some(hit) = CVT_CACHE.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let built = Arc::new(build_cvt(k, bounds, seed)?);
    CVT_CACHE
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| built.clone());
    Ok(built)
}

/// Grid container: each cell stores a mutually non-dominated front of at
/// most `max_front_size` solutions.
#[derive(Debug, Clone)]
pub struct GridArchive {
    tessellation: Arc<CvtTessellation>,
    cells: Vec<Vec<Solution>>,
    max_front_size: usize,
    eviction_rng: ChaCha8Rng,
}

impl GridArchive {
    pub fn new(
        tessellation: Arc<CvtTessellation>,
        max_front_size: usize,
        eviction_rng: ChaCha8Rng,
    ) -> Self {
        assert!(max_front_size > 0, "front size cap must be positive");
        let cells = vec![Vec::new(); tessellation.cell_count()];
        Self {
            tessellation,
            cells,
            max_front_size,
            eviction_rng,
        }
    }

    pub fn tessellation(&self) -> &Arc<CvtTessellation> {
        &self.tessellation
    }

    pub fn max_front_size(&self) -> usize {
        self.max_front_size
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.iter().filter(|c| !c.is_empty()).count()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, index: usize) -> &[Solution] {
        &self.cells[index]
    }

    /// Occupied cells in index order.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, &[Solution])> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(i, c)| (i, c.as_slice()))
    }

    /// All stored solutions in cell order.
    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.cells.iter().flatten()
    }

    pub fn assign(&self, feature: &FeatureVector) -> Result<usize, CoreError> {
        self.tessellation.assign_cell(feature.values())
    }

    /// Adds a solution to the cell its feature maps to. Candidates dominated
    /// by (or fitness-identical to) an occupant are rejected; otherwise the
    /// candidate replaces every occupant it dominates. When the front then
    /// exceeds the cap, one uniformly random member other than the newcomer
    /// is evicted.
    pub fn try_add(&mut self, solution: Solution) -> Result<AdditionOutcome, CoreError> {
        let cell_index = self.assign(solution.feature())?;
        let fitness = solution.fitness().values();
        let cell = &mut self.cells[cell_index];

        let mut duplicate = false;
        for occupant in cell.iter() {
            let other = occupant.fitness().values();
            if dominates(other, fitness) {
                return Ok(AdditionOutcome {
                    status: AdditionStatus::RejectedDominated,
                    removed_ids: Vec::new(),
                });
            }
            if other == fitness {
                duplicate = true;
            }
        }
        if duplicate {
            return Ok(AdditionOutcome {
                status: AdditionStatus::RejectedDuplicate,
                removed_ids: Vec::new(),
            });
        }

        let mut removed_ids = Vec::new();
        cell.retain(|occupant| {
            if dominates(fitness, occupant.fitness().values()) {
                removed_ids.push(occupant.id());
                false
            } else {
                true
            }
        });
        cell.push(solution);
        if cell.len() > self.max_front_size {
            // The newcomer sits at the end; evict among the others.
            let victim = self.eviction_rng.random_range(0..cell.len() - 1);
            removed_ids.push(cell[victim].id());
            cell.remove(victim);
        }
        Ok(AdditionOutcome {
            status: AdditionStatus::Added,
            removed_ids,
        })
    }

    /// Empty grid sharing this grid's tessellation and cap.
    pub fn empty_like(&self, eviction_rng: ChaCha8Rng) -> Self {
        Self::new(self.tessellation.clone(), self.max_front_size, eviction_rng)
    }
}
