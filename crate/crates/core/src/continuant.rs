//! Continuants: determinants of tridiagonal matrices via the three-term recursion.
//!
//! `D_{i,k}` has diagonal `a_i..a_{k-1}`, unit superdiagonal and subdiagonal
//! `b_{i+1}..b_{k-1}`, so that `D_{i,k+1} = a_k D_{i,k} - b_k D_{i,k-1}` with
//! `D_{i,i} = 1` and `D_{i,i-1} = 0`. Indices are read cyclically, which is
//! what the closure relations of a periodic sequence need.

use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::ops::{Mul, Sub};

/// Anything the recursion can run over: scalars or spectral polynomials.
pub trait Ring: Clone + Zero + One + Sub<Output = Self> + Mul<Output = Self> {}
impl<T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T>> Ring for T {}

fn at<T: Clone>(xs: &[T], k: i64) -> T {
    xs[k.rem_euclid(xs.len() as i64) as usize].clone()
}

/// `D_{i,k}` for `k >= i - 1`, with cyclic indices into `a` and `b`.
pub fn continuant_range<T: Ring>(a: &[T], b: &[T], i: i64, k: i64) -> Result<T> {
    if k < i - 1 {
        return Err(Error::IndexOrder { i, j: k - 1 });
    }
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidInput("continuant arrays must be nonempty and of equal length".into()));
    }
    let (mut prev, mut cur) = (T::zero(), T::one());
    if k == i - 1 {
        return Ok(prev);
    }
    for m in i..k {
        let next = at(a, m) * cur.clone() - at(b, m) * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// The tridiagonal determinant `D_{i,j+1}` over rows `a_i..a_j`.
pub fn continuant<T: Ring>(a: &[T], b: &[T], i: i64, j: i64) -> Result<T> {
    if i > j + 1 {
        return Err(Error::IndexOrder { i, j });
    }
    continuant_range(a, b, i, j + 1)
}
