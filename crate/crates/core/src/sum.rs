//! Deterministic pairwise summation.
//!
//! Results depend only on the order of the input slice, never on thread
//! scheduling: parallel callers collect terms first and reduce here.

use num_traits::Zero;
use std::ops::Add;

const BLOCK: usize = 16;

pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Zero + Add<Output = T>,
{
    if xs.len() <= BLOCK {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
