//! Capacity-bounded unstructured archive with radius-based local Pareto
//! competition.
//!
//! Solutions live at their feature coordinates with no cells. A candidate
//! competes with the stored solutions strictly closer than the threshold
//! `l`: it is rejected if any of them dominates it (or ties it exactly), and
//! otherwise it is inserted, removing every neighbor it dominates. Local
//! Pareto fronts are read back with a radius of `2l`.

use std::collections::{BTreeMap, HashMap};

use crate::error::CoreError;
use crate::model::{FeatureVector, Solution};
use crate::pareto::{dominates, extract_front, ParetoFront};
use crate::scalar::{euclidean_distance, Scalar};

/// Beyond this many solutions, neighbor queries go through a bucket index
/// instead of a linear scan.
const LINEAR_SCAN_MAX: usize = 2048;

/// Bucket indexing pays off only in low-dimensional feature spaces.
const MAX_INDEX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditionStatus {
    Added,
    RejectedDominated,
    RejectedDuplicate,
    RejectedCapacity,
}

/// What happened to one candidate. `removed_ids` is non-empty only for
/// accepted candidates; it lists dominated neighbors and, under capacity
/// pressure, the crowding eviction victim.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditionOutcome {
    pub status: AdditionStatus,
    pub removed_ids: Vec<u64>,
}

impl AdditionOutcome {
    pub fn added(&self) -> bool {
        self.status == AdditionStatus::Added
    }

    fn rejected(status: AdditionStatus) -> Self {
        Self {
            status,
            removed_ids: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
struct BucketIndex {
    cell: Scalar,
    buckets: HashMap<Vec<i64>, Vec<u64>>,
}

impl BucketIndex {
    fn new(cell: Scalar) -> Self {
        Self {
            cell: cell.max(1e-12),
            buckets: HashMap::new(),
        }
    }

    fn key(&self, x: &[Scalar]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    fn insert(&mut self, id: u64, x: &[Scalar]) {
        self.buckets.entry(self.key(x)).or_default().push(id);
    }

    fn remove(&mut self, id: u64, x: &[Scalar]) {
        let key = self.key(x);
        if let Some(ids) = self.buckets.get_mut(&key) {
            if let Some(pos) = ids.iter().position(|&i| i == id) {
                ids.swap_remove(pos);
            }
            if ids.is_empty() {
                self.buckets.remove(&key);
            }
        }
    }

    /// Ids of all solutions in buckets overlapping the ball of radius `r`
    /// around `x`. A superset of the true neighbor set; callers filter by
    /// exact distance.
    fn candidates(&self, x: &[Scalar], r: Scalar) -> Vec<u64> {
        let lo: Vec<i64> = x.iter().map(|v| ((v - r) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = x.iter().map(|v| ((v + r) / self.cell).floor() as i64).collect();
        let span: u128 = lo
            .iter()
            .zip(&hi)
            .map(|(&l, &h)| (h - l + 1) as u128)
            .product();
        let mut out = Vec::new();
        if span > self.buckets.len() as u128 {
            for (key, ids) in &self.buckets {
                if key.iter().zip(lo.iter().zip(&hi)).all(|(k, (l, h))| k >= l && k <= h) {
                    out.extend_from_slice(ids);
                }
            }
        } else {
            let mut key = lo.clone();
            loop {
                if let Some(ids) = self.buckets.get(&key) {
                    out.extend_from_slice(ids);
                }
                let mut dim = 0;
                loop {
                    if dim == key.len() {
                        return out;
                    }
                    key[dim] += 1;
                    if key[dim] <= hi[dim] {
                        break;
                    }
                    key[dim] = lo[dim];
                    dim += 1;
                }
            }
        }
        out
    }
}

/// Flat multi-objective archive over a continuous feature space.
#[derive(Debug, Clone)]
pub struct UnstructuredArchive {
    solutions: BTreeMap<u64, Solution>,
    threshold: Scalar,
    capacity: usize,
    dim: Option<usize>,
    index: Option<BucketIndex>,
}

impl UnstructuredArchive {
    pub fn new(threshold: Scalar, capacity: usize) -> Self {
        assert!(threshold > 0.0, "distance threshold must be positive");
        assert!(capacity > 0, "capacity must be positive");
        Self {
            solutions: BTreeMap::new(),
            threshold,
            capacity,
            dim: None,
            index: None,
        }
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn threshold(&self) -> Scalar {
        self.threshold
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stored solutions in id order.
    pub fn solutions(&self) -> impl Iterator<Item = &Solution> {
        self.solutions.values()
    }

    pub fn get(&self, id: u64) -> Option<&Solution> {
        self.solutions.get(&id)
    }

    fn check_dim(&self, x: &FeatureVector) -> Result<(), CoreError> {
        match self.dim {
            Some(d) if d != x.len() => Err(CoreError::DimensionMismatch {
                expected: d,
                got: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Ids of stored solutions strictly closer than `r`, ascending.
    fn neighbor_ids(&self, x: &[Scalar], r: Scalar) -> Vec<u64> {
        let mut ids: Vec<u64> = match &self.index {
            Some(index) => index
                .candidates(x, r)
                .into_iter()
                .filter(|id| {
                    euclidean_distance(self.solutions[id].feature().values(), x) < r
                })
                .collect(),
            None => self
                .solutions
                .values()
                .filter(|s| euclidean_distance(s.feature().values(), x) < r)
                .map(|s| s.id())
                .collect(),
        };
        ids.sort_unstable();
        ids
    }

    /// Stored solutions with strict Euclidean distance `< r` from `x`, in id
    /// order. The boundary is exclusive: a solution exactly `r` away is not
    /// a neighbor.
    pub fn neighbors(&self, x: &FeatureVector, r: Scalar) -> Result<Vec<&Solution>, CoreError> {
        self.check_dim(x)?;
        Ok(self
            .neighbor_ids(x.values(), r)
            .into_iter()
            .map(|id| &self.solutions[&id])
            .collect())
    }

    /// Pareto front of the neighbors within `r` of `x`. Neighbors farther
    /// than `l` from each other never competed, so the raw neighbor set may
    /// contain dominated members; they are filtered out here.
    pub fn local_front(
        &self,
        x: &FeatureVector,
        r: Scalar,
    ) -> Result<ParetoFront<Scalar>, CoreError> {
        let fitnesses = self
            .neighbors(x, r)?
            .into_iter()
            .map(|s| s.fitness().values().to_vec())
            .collect();
        Ok(extract_front(fitnesses))
    }

    /// Attempts to insert one solution under the local Pareto rule.
    pub fn try_add(&mut self, solution: Solution) -> Result<AdditionOutcome, CoreError> {
        self.check_dim(solution.feature())?;
        let feature = solution.feature().values();
        let fitness = solution.fitness().values();

        let neighbor_ids = self.neighbor_ids(feature, self.threshold);
        let mut removable = Vec::new();
        let mut duplicate = false;
        for id in &neighbor_ids {
            let other = self.solutions[id].fitness().values();
            if dominates(other, fitness) {
                return Ok(AdditionOutcome::rejected(AdditionStatus::RejectedDominated));
            }
            if other == fitness {
                duplicate = true;
            } else if dominates(fitness, other) {
                removable.push(*id);
            }
        }
        if duplicate {
            return Ok(AdditionOutcome::rejected(AdditionStatus::RejectedDuplicate));
        }

        let mut removed_ids = removable;
        if removed_ids.is_empty() && self.len() == self.capacity {
            match self.crowding_victim(feature) {
                Some(victim) => removed_ids.push(victim),
                None => {
                    return Ok(AdditionOutcome::rejected(AdditionStatus::RejectedCapacity))
                }
            }
        }
        for id in &removed_ids {
            self.remove(*id);
        }
        self.insert(solution);
        Ok(AdditionOutcome {
            status: AdditionStatus::Added,
            removed_ids,
        })
    }

    /// Eviction rule for a full archive: the candidate displaces the most
    /// crowded stored solution (smallest nearest-neighbor distance, ties to
    /// the lower id) only if the candidate itself would sit less crowded.
    fn crowding_victim(&self, candidate_feature: &[Scalar]) -> Option<u64> {
        let entries: Vec<(u64, &[Scalar])> = self
            .solutions
            .values()
            .map(|s| (s.id(), s.feature().values()))
            .collect();
        let candidate_nn = entries
            .iter()
            .map(|(_, f)| euclidean_distance(f, candidate_feature))
            .fold(Scalar::INFINITY, Scalar::min);
        let mut victim: Option<(Scalar, u64)> = None;
        for (i, (id, f)) in entries.iter().enumerate() {
            let mut nn = Scalar::INFINITY;
            for (j, (_, g)) in entries.iter().enumerate() {
                if i != j {
                    nn = nn.min(euclidean_distance(f, g));
                }
            }
            let better = match victim {
                None => true,
                Some((best, best_id)) => nn < best || (nn == best && *id < best_id),
            };
            if better {
                victim = Some((nn, *id));
            }
        }
        let (min_stored_nn, victim_id) = victim?;
        (candidate_nn > min_stored_nn).then_some(victim_id)
    }

    fn insert(&mut self, solution: Solution) {
        if self.dim.is_none() {
            self.dim = Some(solution.feature().len());
        }
        if self.index.is_none()
            && self.solutions.len() >= LINEAR_SCAN_MAX
            && self.dim.unwrap_or(usize::MAX) <= MAX_INDEX_DIM
        {
            let mut index = BucketIndex::new(self.threshold);
            for s in self.solutions.values() {
                index.insert(s.id(), s.feature().values());
            }
            self.index = Some(index);
        }
        if let Some(index) = &mut self.index {
            index.insert(solution.id(), solution.feature().values());
        }
        self.solutions.insert(solution.id(), solution);
    }

    fn remove(&mut self, id: u64) {
        if let Some(s) = self.solutions.remove(&id) {
            if let Some(index) = &mut self.index {
                index.remove(id, s.feature().values());
            }
        }
    }

    /// Fresh archive with the given threshold, populated by re-playing the
    /// input in id order through the addition rule. The result is always a
    /// subset of the input.
    pub fn rebuild(
        &self,
        solutions: Vec<Solution>,
        new_threshold: Scalar,
    ) -> Result<Self, CoreError> {
        let mut fresh = Self::new(new_threshold, self.capacity);
        let mut ordered = solutions;
        ordered.sort_by_key(Solution::id);
        for s in ordered {
            fresh.try_add(s)?;
        }
        Ok(fresh)
    }

    /// Updates `l`. Shrinking only relaxes local competition, so stored
    /// contents stay valid. Growing brings previously independent solutions
    /// into competition; the archive re-applies the addition rule in id
    /// order so its pairwise invariant holds under the new radius. Returns
    /// the ids dropped by that re-application.
    pub fn set_threshold(&mut self, new_threshold: Scalar) -> Result<Vec<u64>, CoreError> {
        assert!(new_threshold > 0.0, "distance threshold must be positive");
        if new_threshold <= self.threshold {
            self.threshold = new_threshold;
            return Ok(Vec::new());
        }
        let contents: Vec<Solution> = self.solutions.values().cloned().collect();
        let rebuilt = self.rebuild(contents, new_threshold)?;
        let dropped = self
            .solutions
            .keys()
            .filter(|id| !rebuilt.solutions.contains_key(id))
            .copied()
            .collect();
        *self = rebuilt;
        Ok(dropped)
    }

    /// Attempts the batch in order; each attempt sees the effects of the
    /// earlier ones.
    pub fn add_batch(
        &mut self,
        batch: Vec<Solution>,
    ) -> Result<Vec<AdditionOutcome>, CoreError> {
        batch.into_iter().map(|s| self.try_add(s)).collect()
    }

    /// Exhaustive pairwise scan for invariant checking: pairs of stored
    /// solutions within `r` of each other where one dominates the other.
    pub fn dominating_pairs_within(&self, r: Scalar) -> Vec<(u64, u64)> {
        let all: Vec<&Solution> = self.solutions.values().collect();
        let mut pairs = Vec::new();
        for (i, a) in all.iter().enumerate() {
            for b in all.iter().skip(i + 1) {
                if euclidean_distance(a.feature().values(), b.feature().values()) < r {
                    if dominates(a.fitness().values(), b.fitness().values()) {
                        pairs.push((a.id(), b.id()));
                    } else if dominates(b.fitness().values(), a.fitness().values()) {
                        pairs.push((b.id(), a.id()));
                    }
                }
            }
        }
        pairs
    }
}
