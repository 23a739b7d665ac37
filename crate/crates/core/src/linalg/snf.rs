//! Smith normal form by integer elimination.
//!
//! Each pivot is a nonzero entry of minimal absolute value in the remaining
//! submatrix. Its row and column are cleared with nearest-quotient
//! reductions, and a row from the submatrix is folded back into the pivot row
//! whenever the pivot fails to divide some remaining entry. The diagonal
//! produced this way satisfies the divisibility chain directly.
//!
//! The kernel runs over `i64` first. An operation that would overflow is
//! undone, and the matrix is carried over to `i128` and then `BigInt`,
//! keeping the pivot steps already finished.

use num_bigint::{BigInt, BigUint};

use super::matrix::IntMatrix;
use super::scalar::{widen, Overflow, Scalar};

/// Invariant factors of an integer matrix, with optional unimodular
/// transforms `U`, `V` such that `U * M * V` is the diagonal matrix of
/// invariant factors (padded with zeros to the shape of `M`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    /// `d_1 | d_2 | ... | d_rank`, unit factors included.
    pub invariant_factors: Vec<BigUint>,
    pub rank: usize,
    pub left_transform: Option<IntMatrix>,
    pub right_transform: Option<IntMatrix>,
}

impl SnfResult {
    /// The `rows x cols` matrix carrying the invariant factors on its
    /// leading diagonal.
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut data = vec![BigInt::from(0); rows * cols];
        for (i, d) in self.invariant_factors.iter().enumerate() {
            data[i * cols + i] = BigInt::from(d.clone());
        }
        IntMatrix::new(rows, cols, data).expect("shape of a valid matrix")
    }
}

struct Elimination<S> {
    rows: usize,
    cols: usize,
    a: Vec<S>,
    /// rows x rows, accumulates row operations
    left: Option<Vec<S>>,
    /// cols x cols, accumulates column operations
    right: Option<Vec<S>>,
    /// pivot steps completed
    done: usize,
    /// backup for `guard_row` / `guard_col`
    scratch: Vec<S>,
}

fn identity<S: Scalar>(n: usize) -> Vec<S> {
    let mut v = vec![S::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = S::one();
    }
    v
}

impl<S: Scalar> Elimination<S> {
    fn new(rows: usize, cols: usize, a: Vec<S>, transforms: bool) -> Self {
        let (left, right) = if transforms {
            (Some(identity(rows)), Some(identity(cols)))
        } else {
            (None, None)
        };
        Self {
            rows,
            cols,
            a,
            left,
            right,
            done: 0,
            scratch: Vec::new(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> &S {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        let c = self.cols;
        for j in 0..c {
            self.a.swap(i * c + j, k * c + j);
        }
        if let Some(u) = &mut self.left {
            let r = self.rows;
            for j in 0..r {
                u.swap(i * r + j, k * r + j);
            }
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        let c = self.cols;
        for i in 0..self.rows {
            self.a.swap(i * c + j, i * c + k);
        }
        if let Some(v) = &mut self.right {
            for i in 0..c {
                v.swap(i * c + j, i * c + k);
            }
        }
    }

    /// row_i -= q * row_t, touching only columns >= t of the working matrix.
    fn row_sub(&mut self, i: usize, t: usize, q: &S) -> Result<(), Overflow> {
        self.guard_row(i, t, |e| {
            let c = e.cols;
            for j in t..c {
                let pivot_row = &e.a[t * c + j];
                if pivot_row.is_zero() {
                    continue;
                }
                e.a[i * c + j] = e.a[i * c + j].sub_mul(q, pivot_row)?;
            }
            if let Some(u) = &mut e.left {
                let r = e.rows;
                for j in 0..r {
                    if u[t * r + j].is_zero() {
                        continue;
                    }
                    u[i * r + j] = u[i * r + j].sub_mul(q, &u[t * r + j])?;
                }
            }
            Ok(())
        })
    }

    /// col_j -= q * col_t, touching only rows >= t of the working matrix.
    fn col_sub(&mut self, j: usize, t: usize, q: &S) -> Result<(), Overflow> {
        self.guard_col(j, t, |e| {
            let c = e.cols;
            for i in t..e.rows {
                let pivot_col = &e.a[i * c + t];
                if pivot_col.is_zero() {
                    continue;
                }
                e.a[i * c + j] = e.a[i * c + j].sub_mul(q, pivot_col)?;
            }
            if let Some(v) = &mut e.right {
                for i in 0..c {
                    if v[i * c + t].is_zero() {
                        continue;
                    }
                    v[i * c + j] = v[i * c + j].sub_mul(q, &v[i * c + t])?;
                }
            }
            Ok(())
        })
    }

    /// row_t += row_i
    fn row_add(&mut self, t: usize, i: usize) -> Result<(), Overflow> {
        self.guard_row(t, t, |e| {
            let c = e.cols;
            for j in t..c {
                e.a[t * c + j] = e.a[t * c + j].add(&e.a[i * c + j])?;
            }
            if let Some(u) = &mut e.left {
                let r = e.rows;
                for j in 0..r {
                    u[t * r + j] = u[t * r + j].add(&u[i * r + j])?;
                }
            }
            Ok(())
        })
    }

    fn negate_row(&mut self, t: usize) -> Result<(), Overflow> {
        self.guard_row(t, t, |e| {
            let c = e.cols;
            for j in t..c {
                e.a[t * c + j] = e.a[t * c + j].neg()?;
            }
            if let Some(u) = &mut e.left {
                let r = e.rows;
                for j in 0..r {
                    u[t * r + j] = u[t * r + j].neg()?;
                }
            }
            Ok(())
        })
    }

    /// Runs `op`, which may only write row `i` (columns >= `from`) and row
    /// `i` of the left transform, restoring both if it overflows. The
    /// matrix therefore stays equivalent to the input after any error.
    fn guard_row(&mut self, i: usize, from: usize, op: impl FnOnce(&mut Self) -> Result<(), Overflow>) -> Result<(), Overflow> {
        if !S::BOUNDED {
            return op(self);
        }
        let (c, r) = (self.cols, self.rows);
        let mut saved = std::mem::take(&mut self.scratch);
        saved.clear();
        saved.extend_from_slice(&self.a[i * c + from..(i + 1) * c]);
        if let Some(u) = &self.left {
            saved.extend_from_slice(&u[i * r..(i + 1) * r]);
        }
        let out = op(self);
        if out.is_err() {
            let width = c - from;
            self.a[i * c + from..(i + 1) * c].clone_from_slice(&saved[..width]);
            if let Some(u) = &mut self.left {
                u[i * r..(i + 1) * r].clone_from_slice(&saved[width..]);
            }
        }
        self.scratch = saved;
        out
    }

    /// Column counterpart of `guard_row`: column `j` from row `from` down,
    /// and column `j` of the right transform.
    fn guard_col(&mut self, j: usize, from: usize, op: impl FnOnce(&mut Self) -> Result<(), Overflow>) -> Result<(), Overflow> {
        if !S::BOUNDED {
            return op(self);
        }
        let c = self.cols;
        let mut saved = std::mem::take(&mut self.scratch);
        saved.clear();
        saved.extend((from..self.rows).map(|i| self.a[i * c + j].clone()));
        if let Some(v) = &self.right {
            saved.extend((0..c).map(|i| v[i * c + j].clone()));
        }
        let out = op(self);
        if out.is_err() {
            let height = self.rows - from;
            for k in 0..height {
                self.a[(from + k) * c + j] = saved[k].clone();
            }
            if let Some(v) = &mut self.right {
                for i in 0..c {
                    v[i * c + j] = saved[height + i].clone();
                }
            }
        }
        self.scratch = saved;
        out
    }

    /// Position of a nonzero entry of minimal absolute value in the
    /// submatrix starting at (t, t).
    fn smallest_in_submatrix(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = self.at(i, j);
                if x.is_zero() {
                    continue;
                }
                if x.is_unit() {
                    return Some((i, j));
                }
                match best {
                    Some((bi, bj)) if !x.abs_lt(self.at(bi, bj)) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Smallest nonzero entry among row t and column t of the submatrix.
    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t);
        for j in t + 1..self.cols {
            let x = self.at(t, j);
            if !x.is_zero() && (self.at(best.0, best.1).is_zero() || x.abs_lt(self.at(best.0, best.1))) {
                best = (t, j);
            }
        }
        for i in t + 1..self.rows {
            let x = self.at(i, t);
            if !x.is_zero() && (self.at(best.0, best.1).is_zero() || x.abs_lt(self.at(best.0, best.1))) {
                best = (i, t);
            }
        }
        best
    }

    /// Clears row t and column t around the pivot at (t, t). Returns true
    /// when both are zero apart from the pivot.
    fn clear_cross(&mut self, t: usize) -> Result<bool, Overflow> {
        let mut clean = true;
        let pivot = self.at(t, t).clone();
        for i in t + 1..self.rows {
            if self.at(i, t).is_zero() {
                continue;
            }
            let q = self.at(i, t).round_div(&pivot)?;
            self.row_sub(i, t, &q)?;
            clean &= self.at(i, t).is_zero();
        }
        for j in t + 1..self.cols {
            if self.at(t, j).is_zero() {
                continue;
            }
            let q = self.at(t, j).round_div(&pivot)?;
            self.col_sub(j, t, &q)?;
            clean &= self.at(t, j).is_zero();
        }
        Ok(clean)
    }

    /// A row below t holding an entry the pivot does not divide.
    fn non_divisible_row(&self, t: usize) -> Option<usize> {
        let pivot = self.at(t, t);
        if pivot.is_unit() {
            return None;
        }
        (t + 1..self.rows).find(|&i| (t + 1..self.cols).any(|j| !pivot.divides(self.at(i, j))))
    }

    /// Diagonalizes from step `self.done` on. After an overflow the matrix
    /// is still equivalent to the input and `done` steps are finished, so a
    /// wider copy can pick up where this one stopped.
    fn run(&mut self) -> Result<(), Overflow> {
        let limit = self.rows.min(self.cols);
        while self.done < limit {
            let t = self.done;
            let Some((i, j)) = self.smallest_in_submatrix(t) else {
                break;
            };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                if !self.clear_cross(t)? {
                    let (i, j) = self.smallest_in_cross(t);
                    self.swap_rows(t, i);
                    self.swap_cols(t, j);
                    continue;
                }
                match self.non_divisible_row(t) {
                    Some(i) => self.row_add(t, i)?,
                    None => break,
                }
            }
            if self.at(t, t).is_negative() {
                self.negate_row(t)?;
            }
            self.done += 1;
        }
        Ok(())
    }

    fn convert<T: Scalar>(self) -> Elimination<T> {
        let cast = |v: Vec<S>| -> Vec<T> {
            v.iter().map(|x| T::try_from_big(&x.to_big()).expect("widening conversion")).collect()
        };
        Elimination {
            rows: self.rows,
            cols: self.cols,
            a: cast(self.a),
            left: self.left.map(cast),
            right: self.right.map(cast),
            done: self.done,
            scratch: Vec::new(),
        }
    }
}

fn finish<S: Scalar>(e: Elimination<S>) -> SnfResult {
    let to_matrix = |n: usize, v: Vec<S>| {
        IntMatrix::new(n, n, v.iter().map(Scalar::to_big).collect()).expect("square transform")
    };
    let invariant_factors: Vec<BigUint> = (0..e.done).map(|t| e.at(t, t).to_big().into_parts().1).collect();
    SnfResult {
        rank: invariant_factors.len(),
        invariant_factors,
        left_transform: e.left.map(|u| to_matrix(e.rows, u)),
        right_transform: e.right.map(|v| to_matrix(e.cols, v)),
    }
}

/// Runs `e` to completion, moving the partly reduced matrix to `i128` and
/// then `BigInt` when entries outgrow the current type.
fn complete<S: Scalar>(mut e: Elimination<S>) -> SnfResult {
    if e.run().is_ok() {
        return finish(e);
    }
    let mut wide: Elimination<i128> = e.convert();
    if wide.run().is_ok() {
        return finish(wide);
    }
    let mut big: Elimination<BigInt> = wide.convert();
    big.run().expect("arbitrary precision cannot overflow");
    finish(big)
}

/// Smith normal form of `m`. The invariant factors are canonical; the
/// transforms (when requested) are one valid choice among many.
pub fn smith_normal_form(m: &IntMatrix, want_transforms: bool) -> SnfResult {
    let (r, c) = (m.rows(), m.cols());
    if let Some(small) = m.as_i64() {
        return complete(Elimination::new(r, c, small.to_vec(), want_transforms));
    }
    let big = m.to_bigints();
    match widen::<BigInt, i128>(&big) {
        Some(wide) => complete(Elimination::new(r, c, wide, want_transforms)),
        None => {
            let mut e = Elimination::new(r, c, big, want_transforms);
            e.run().expect("arbitrary precision cannot overflow");
            finish(e)
        }
    }
}

#[cfg(test)]
pub(crate) fn smith_normal_form_bigint(m: &IntMatrix, want_transforms: bool) -> SnfResult {
    let mut e = Elimination::new(m.rows(), m.cols(), m.to_bigints(), want_transforms);
    e.run().unwrap();
    finish(e)
}
