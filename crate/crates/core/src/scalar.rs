//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar the numeric kernels are generic over: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Concrete scalar used by the domain types. Hypervolume sums over thousands
/// of cells are precision-sensitive, so everything runs at 64 bits.
pub type Scalar = f64;

/// Squared Euclidean distance between two equal-length vectors.
pub fn squared_distance<R: Real>(a: &[R], b: &[R]) -> R {
    assert_eq!(a.len(), b.len(), "dimension mismatch in distance");
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(R::zero(), |acc, d| acc + d)
}

/// Euclidean distance between two equal-length vectors.
pub fn euclidean_distance<R: Real>(a: &[R], b: &[R]) -> R {
    squared_distance(a, b).sqrt()
}
