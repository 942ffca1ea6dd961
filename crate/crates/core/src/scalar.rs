//! Floating-point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for probabilities, weights and scores.
///
/// Implemented for `f32` and `f64`. Counting is always done in integers; the
/// scalar only carries the derived real-valued quantities.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for constants and accumulated sums.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 is representable")
    }

    fn of_usize(value: usize) -> Self {
        Self::from_usize(value).expect("usize is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Index of the largest entry, lowest index on ties. `None` for an empty slice.
pub fn argmax<T: Scalar>(values: &[T]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Divide every entry by the total. Leaves an all-zero slice unchanged.
pub fn normalize<T: Scalar>(values: &mut [T]) {
    let total: T = values.iter().copied().sum();
    if total > T::zero() {
        for v in values.iter_mut() {
            *v = *v / total;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.2f64, 0.7, 0.1]), Some(1));
        assert_eq!(argmax(&[0.5f64, 0.5]), Some(0));
        assert_eq!(argmax(&[0.25f32; 4]), Some(0));
        assert_eq!(argmax::<f64>(&[]), None);
    }

    #[test]
    fn normalize_sums_to_one() {
        let mut v = vec![1.0f64, 3.0];
        normalize(&mut v);
        assert_eq!(v, vec![0.25, 0.75]);
        let mut z = vec![0.0f32; 3];
        normalize(&mut z);
        assert_eq!(z, vec![0.0; 3]);
    }
}
