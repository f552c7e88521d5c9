//! Dominance tests, Pareto-front extraction and exact hypervolume for two
//! and three objectives, plus a Monte-Carlo hypervolume estimator used as a
//! test oracle for the exact kernels.
//!
//! All objectives are maximized. Comparisons are exact; there is no epsilon
//! dominance.

use crate::error::CoreError;
use crate::rng::rng_from_seed;
use crate::scalar::Real;
use rand::Rng;

/// Strict Pareto dominance: `a` is at least as good everywhere and strictly
/// better somewhere. A vector never dominates itself.
pub fn dominates<R: Real>(a: &[R], b: &[R]) -> bool {
    assert_eq!(a.len(), b.len(), "dimension mismatch in dominance test");
    let mut strict = false;
    for (&x, &y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Indices of the points not dominated by any other point. Exact-duplicate
/// vectors keep only their first occurrence.
pub fn non_dominated_indices<R: Real, P: AsRef<[R]>>(points: &[P]) -> Vec<usize> {
    let mut kept = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        let p = p.as_ref();
        for (j, q) in points.iter().enumerate() {
            let q = q.as_ref();
            if j != i && dominates(q, p) {
                continue 'outer;
            }
            if j < i && q == p {
                continue 'outer;
            }
        }
        kept.push(i);
    }
    kept
}

/// A mutually non-dominated, duplicate-free set of fitness vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront<R: Real> {
    points: Vec<Vec<R>>,
}

impl<R: Real> ParetoFront<R> {
    /// Filters the input down to its non-dominated members, deduplicating
    /// exact duplicates to the first occurrence. Input order is preserved.
    pub fn from_points(points: Vec<Vec<R>>) -> Self {
        let kept = non_dominated_indices(&points);
        let mut points = points;
        let mut keep_iter = kept.into_iter().peekable();
        let mut out = Vec::new();
        for (i, p) in points.drain(..).enumerate() {
            if keep_iter.peek() == Some(&i) {
                keep_iter.next();
                out.push(p);
            }
        }
        Self { points: out }
    }

    pub fn empty() -> Self {
        Self { points: Vec::new() }
    }

    pub fn points(&self) -> &[Vec<R>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hypervolume(&self, reference: &[R]) -> Result<R, CoreError> {
        hypervolume(&self.points, reference)
    }
}

/// Extracts the Pareto front of a point set.
pub fn extract_front<R: Real>(points: Vec<Vec<R>>) -> ParetoFront<R> {
    ParetoFront::from_points(points)
}

fn strictly_above<R: Real>(p: &[R], reference: &[R]) -> bool {
    p.iter().zip(reference).all(|(&x, &r)| x > r)
}

fn sort_desc_by<R: Real, T, F: Fn(&T) -> R>(items: &mut [T], key: F) {
    items.sort_by(|a, b| {
        key(b)
            .partial_cmp(&key(a))
            .expect("non-finite value in hypervolume input")
    });
}

/// Exact hypervolume of the region dominated by `points` and dominating
/// `reference`, for 2 or 3 objectives. Points that do not strictly dominate
/// the reference contribute nothing and are filtered out; an input that is
/// not a Pareto front is reduced to one first.
pub fn hypervolume<R: Real, P: AsRef<[R]>>(points: &[P], reference: &[R]) -> Result<R, CoreError> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(CoreError::UnsupportedObjectiveCount { m });
    }
    let mut filtered: Vec<&[R]> = Vec::new();
    for p in points {
        let p = p.as_ref();
        if p.len() != m {
            return Err(CoreError::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
        if strictly_above(p, reference) {
            filtered.push(p);
        }
    }
    let front: Vec<&[R]> = non_dominated_indices(&filtered)
        .into_iter()
        .map(|i| filtered[i])
        .collect();
    if front.is_empty() {
        return Ok(R::zero());
    }
    Ok(match m {
        2 => area_2d(&front, reference),
        _ => volume_3d(&front, reference),
    })
}

/// 2-D sweep over points sorted by the first objective, descending. Assumes
/// a deduplicated front strictly above the reference.
fn area_2d<R: Real>(front: &[&[R]], reference: &[R]) -> R {
    let mut pts: Vec<&[R]> = front.to_vec();
    sort_desc_by(&mut pts, |p| p[0]);
    let mut area = R::zero();
    let mut prev_y = reference[1];
    for p in pts {
        area = area + (p[0] - reference[0]) * (p[1] - prev_y);
        prev_y = p[1];
    }
    area
}

/// 3-D volume by slicing along the sorted third objective: each slab's
/// cross-section is the 2-D area of the points active at that level.
fn volume_3d<R: Real>(front: &[&[R]], reference: &[R]) -> R {
    let mut pts: Vec<&[R]> = front.to_vec();
    sort_desc_by(&mut pts, |p| p[2]);
    let ref2 = [reference[0], reference[1]];
    let mut volume = R::zero();
    let mut active: Vec<Vec<R>> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        let level = pts[i][2];
        while i < pts.len() && pts[i][2] == level {
            active.push(vec![pts[i][0], pts[i][1]]);
            i += 1;
        }
        let next_level = if i < pts.len() { pts[i][2] } else { reference[2] };
        let slice: Vec<&[R]> = non_dominated_indices(&active)
            .into_iter()
            .map(|k| active[k].as_slice())
            .collect();
        volume = volume + area_2d(&slice, &ref2) * (level - next_level);
    }
    volume
}

/// Monte-Carlo hypervolume estimate with its standard error. Samples
/// uniformly in the axis-aligned box spanned by the reference point and the
/// componentwise maxima of the front.
pub fn mc_hypervolume_with_error<R: Real, P: AsRef<[R]>>(
    points: &[P],
    reference: &[R],
    samples: u64,
    seed: u64,
) -> Result<(R, R), CoreError> {
    if samples == 0 {
        return Err(CoreError::invalid("mc_hypervolume requires samples > 0"));
    }
    let m = reference.len();
    let filtered: Vec<&[R]> = points
        .iter()
        .map(AsRef::as_ref)
        .inspect(|p| assert_eq!(p.len(), m, "dimension mismatch in mc_hypervolume"))
        .filter(|p| strictly_above(p, reference))
        .collect();
    if filtered.is_empty() {
        return Ok((R::zero(), R::zero()));
    }
    let mut hi = vec![R::neg_infinity(); m];
    for p in &filtered {
        for (h, &x) in hi.iter_mut().zip(p.iter()) {
            *h = h.max(x);
        }
    }
    let box_volume = hi
        .iter()
        .zip(reference)
        .map(|(&h, &r)| h - r)
        .fold(R::one(), |acc, w| acc * w);

    let mut rng = rng_from_seed(seed);
    let mut sample = vec![R::zero(); m];
    let mut hits: u64 = 0;
    for _ in 0..samples {
        for (s, (&h, &r)) in sample.iter_mut().zip(hi.iter().zip(reference)) {
            let u = R::from_f64(rng.random::<f64>()).unwrap();
            *s = r + u * (h - r);
        }
        if filtered
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(&x, &s)| x > s))
        {
            hits += 1;
        }
    }
    let p = R::from_u64(hits).unwrap() / R::from_u64(samples).unwrap();
    let estimate = box_volume * p;
    let std_error =
        box_volume * (p * (R::one() - p) / R::from_u64(samples).unwrap()).sqrt();
    Ok((estimate, std_error))
}

/// Monte-Carlo hypervolume estimate.
pub fn mc_hypervolume<R: Real, P: AsRef<[R]>>(
    points: &[P],
    reference: &[R],
    samples: u64,
    seed: u64,
) -> Result<R, CoreError> {
    mc_hypervolume_with_error(points, reference, samples, seed).map(|(est, _)| est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pts(raw: &[&[f64]]) -> Vec<Vec<f64>> {
        raw.iter().map(|p| p.to_vec()).collect()
    }

    /// Independently coded all-pairs oracle: a point survives iff no other
    /// point beats it everywhere with one strict win, and it is not a repeat
    /// of an earlier point.
    fn oracle_front(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for (i, p) in points.iter().enumerate() {
            let mut keep = true;
            for (j, q) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let ge_all = q.iter().zip(p).all(|(a, b)| a >= b);
                let gt_any = q.iter().zip(p).any(|(a, b)| a > b);
                if ge_all && gt_any {
                    keep = false;
                    break;
                }
                if j < i && q == p {
                    keep = false;
                    break;
                }
            }
            if keep {
                out.push(p.clone());
            }
        }
        out
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[2.0, 3.0], &[1.0, 3.0]));
        assert!(!dominates(&[2.0, 1.0], &[1.0, 2.0]));
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]));
    }

    #[test]
    fn extract_front_examples() {
        let front = extract_front(pts(&[&[1.0, 2.0], &[2.0, 1.0], &[0.0, 0.0]]));
        assert_eq!(front.points(), &pts(&[&[1.0, 2.0], &[2.0, 1.0]])[..]);

        let single = extract_front(pts(&[&[5.0, 5.0]]));
        assert_eq!(single.points(), &pts(&[&[5.0, 5.0]])[..]);

        assert!(extract_front::<f64>(vec![]).is_empty());
    }

    #[test]
    fn extract_front_deduplicates_exact_copies() {
        let front = extract_front(pts(&[&[1.0, 2.0], &[1.0, 2.0], &[2.0, 1.0]]));
        assert_eq!(front.len(), 2);
    }

    #[test]
    fn extract_front_matches_oracle_on_random_points() {
        let mut rng = rng_from_seed(7);
        for _ in 0..50 {
            let points: Vec<Vec<f64>> = (0..50)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let front = extract_front(points.clone());
            assert_eq!(front.points(), &oracle_front(&points)[..]);
        }
    }

    #[test]
    fn hypervolume_single_rectangle() {
        let hv = hypervolume(&pts(&[&[2.0, 1.0]]), &[0.0, 0.0]).unwrap();
        assert_eq!(hv, 2.0);
    }

    #[test]
    fn hypervolume_two_point_front() {
        let hv = hypervolume(&pts(&[&[1.0, 2.0], &[2.0, 1.0]]), &[0.0, 0.0]).unwrap();
        assert_eq!(hv, 3.0);
    }

    #[test]
    fn hypervolume_unit_cube() {
        let hv = hypervolume(&pts(&[&[1.0, 1.0, 1.0]]), &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(hv, 1.0);
    }

    #[test]
    fn hypervolume_filters_points_below_reference() {
        let hv = hypervolume(&pts(&[&[-1.0, 5.0]]), &[0.0, 0.0]).unwrap();
        assert_eq!(hv, 0.0);
    }

    #[test]
    fn hypervolume_rejects_unsupported_dimensions() {
        assert!(matches!(
            hypervolume(&pts(&[&[1.0]]), &[0.0]),
            Err(CoreError::UnsupportedObjectiveCount { m: 1 })
        ));
        assert!(hypervolume(&pts(&[&[1.0, 1.0, 1.0, 1.0]]), &[0.0; 4]).is_err());
    }

    #[test]
    fn hypervolume_three_point_3d_front_matches_inclusion_exclusion() {
        // Inclusion-exclusion over axis boxes: 3*6 - 3*2 + 1 = 13.
        let points = pts(&[&[1.0, 2.0, 3.0], &[2.0, 3.0, 1.0], &[3.0, 1.0, 2.0]]);
        let hv = hypervolume(&points, &[0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(hv, 13.0, max_relative = 1e-12);
        assert_relative_eq!(
            hv,
            inclusion_exclusion_volume(&points, &[0.0, 0.0, 0.0]),
            max_relative = 1e-12
        );
    }

    /// Exact oracle via inclusion-exclusion over all subsets; only viable
    /// for small fronts.
    fn inclusion_exclusion_volume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
        let n = points.len();
        let m = reference.len();
        let mut total = 0.0;
        for mask in 1u32..(1 << n) {
            let mut corner = vec![f64::INFINITY; m];
            for (i, p) in points.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (c, &x) in corner.iter_mut().zip(p) {
                        *c = c.min(x);
                    }
                }
            }
            let vol: f64 = corner
                .iter()
                .zip(reference)
                .map(|(&c, &r)| (c - r).max(0.0))
                .product();
            if mask.count_ones() % 2 == 1 {
                total += vol;
            } else {
                total -= vol;
            }
        }
        total
    }

    #[test]
    fn exact_matches_inclusion_exclusion_on_random_3d_fronts() {
        let mut rng = rng_from_seed(11);
        for _ in 0..40 {
            let points: Vec<Vec<f64>> = (0..10)
                .map(|_| {
                    (0..3)
                        .map(|_| 0.1 + 0.9 * rng.random::<f64>())
                        .collect()
                })
                .collect();
            let reference = [0.0, 0.0, 0.0];
            let exact = hypervolume(&points, &reference).unwrap();
            let oracle = inclusion_exclusion_volume(&points, &reference);
            assert_relative_eq!(exact, oracle, max_relative = 1e-10);
        }
    }

    #[test]
    fn mc_estimate_tracks_exact_values() {
        let (est, se) =
            mc_hypervolume_with_error(&pts(&[&[2.0, 1.0]]), &[0.0, 0.0], 1_000_000, 3).unwrap();
        assert!((est - 2.0).abs() < 0.02, "estimate {est}");
        assert!((est - 2.0).abs() <= 3.0 * se.max(1e-9));

        let (est, se) =
            mc_hypervolume_with_error(&pts(&[&[1.0, 2.0], &[2.0, 1.0]]), &[0.0, 0.0], 1_000_000, 4)
                .unwrap();
        assert!((est - 3.0).abs() < 0.03, "estimate {est}");
        assert!((est - 3.0).abs() <= 3.0 * se.max(1e-9));
    }

    #[test]
    fn mc_empty_front_is_zero() {
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(mc_hypervolume(&empty, &[0.0, 0.0], 100, 1).unwrap(), 0.0);
    }

    #[test]
    fn mc_rejects_zero_samples() {
        assert!(mc_hypervolume(&pts(&[&[1.0, 1.0]]), &[0.0, 0.0], 0, 1).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn point(m: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(0.01f64..1.0, m..=m)
        }

        fn point_set(m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
            proptest::collection::vec(point(m), 1..20)
        }

        proptest! {
            #[test]
            fn extract_front_is_idempotent(points in point_set(2)) {
                let once = extract_front(points);
                let twice = extract_front(once.points().to_vec());
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn hypervolume_is_permutation_invariant(points in point_set(3), swap in 0usize..19) {
                let reference = [0.0, 0.0, 0.0];
                let base = hypervolume(&points, &reference).unwrap();
                let mut shuffled = points;
                let n = shuffled.len();
                shuffled.swap(swap % n, (swap / 2) % n);
                shuffled.reverse();
                prop_assert_eq!(base, hypervolume(&shuffled, &reference).unwrap());
            }

            #[test]
            fn hypervolume_is_translation_covariant(points in point_set(2), shift in -5.0f64..5.0) {
                let reference = [0.0, 0.0];
                let base = hypervolume(&points, &reference).unwrap();
                let moved: Vec<Vec<f64>> =
                    points.iter().map(|p| p.iter().map(|x| x + shift).collect()).collect();
                let moved_ref = [shift, shift];
                let translated = hypervolume(&moved, &moved_ref).unwrap();
                prop_assert!((base - translated).abs() <= 1e-9 * base.abs().max(1.0));
            }

            #[test]
            fn adding_a_dominating_point_never_shrinks_hypervolume(
                points in point_set(2),
                pick in 0usize..19,
                bump in 0.01f64..0.5,
            ) {
                let reference = [0.0, 0.0];
                let base = hypervolume(&points, &reference).unwrap();
                let target = &points[pick % points.len()];
                let dominating: Vec<f64> = target.iter().map(|x| x + bump).collect();
                let mut extended = points.clone();
                extended.push(dominating);
                let grown = hypervolume(&extended, &reference).unwrap();
                prop_assert!(grown >= base);
                // The new point strictly encloses its target, so the region
                // strictly grows unless another member already covered it.
                let covered = points.iter().any(|p| {
                    p.iter().zip(&extended[extended.len() - 1]).all(|(a, b)| a >= b)
                });
                if !covered {
                    prop_assert!(grown > base);
                }
            }

            #[test]
            fn exact_agrees_with_monte_carlo(points in point_set(2), seed in 0u64..1000) {
                let reference = [0.0, 0.0];
                let exact = hypervolume(&points, &reference).unwrap();
                let (est, se) =
                    mc_hypervolume_with_error(&points, &reference, 200_000, seed).unwrap();
                prop_assert!((exact - est).abs() <= 3.0 * se.max(1e-4));
            }
        }
    }
}
