use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// Fraction-free (Bareiss) forward elimination in place. Returns the rank
/// and the sign accumulated from row swaps; when the matrix is square and
/// of full rank the last pivot is the determinant up to that sign.
fn bareiss(a: &mut [BigInt], rows: usize, cols: usize) -> (usize, bool) {
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut negated = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i * cols + col].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
            negated = !negated;
        }
        let pivot = a[rank * cols + col].clone();
        for i in rank + 1..rows {
            let factor = a[i * cols + col].clone();
            for j in col + 1..cols {
                let v = (&pivot * &a[i * cols + j] - &factor * &a[rank * cols + j]) / &prev;
                a[i * cols + j] = v;
            }
            a[i * cols + col] = BigInt::zero();
        }
        // Entries left of `col` in rows below are already zero; columns
        // skipped without a pivot stay as they are, which is harmless
        // because they are never read again.
        prev = pivot;
        rank += 1;
    }
    (rank, negated)
}

/// Exact determinant by fraction-free elimination.
pub fn det(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.to_bigints();
    let (rank, negated) = bareiss(&mut a, n, n);
    if rank < n {
        return Ok(BigInt::zero());
    }
    let d = a[n * n - 1].clone();
    Ok(if negated { -d } else { d })
}

/// Rank over the rationals.
pub fn rank_over_q(m: &IntMatrix) -> usize {
    let mut a = m.to_bigints();
    bareiss(&mut a, m.rows(), m.cols()).0
}
