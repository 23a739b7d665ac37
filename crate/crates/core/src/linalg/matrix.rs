use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
///
/// Entries are arbitrary precision. Matrices whose entries all fit in an
/// `i64` are stored as machine words; the representation is normalised on
/// construction so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Entries,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Entries {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

fn check_shape(rows: usize, cols: usize, len: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix { rows, cols });
    }
    if rows * cols != len {
        return Err(Error::ShapeMismatch {
            expected: rows * cols,
            got: len,
        });
    }
    Ok(())
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        check_shape(rows, cols, entries.len())?;
        let small: Option<Vec<i64>> = entries.iter().map(|x| x.to_i64()).collect();
        let entries = match small {
            Some(v) => Entries::Small(v),
            None => Entries::Big(entries),
        };
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        check_shape(rows, cols, entries.len())?;
        Ok(Self {
            rows,
            cols,
            entries: Entries::Small(entries),
        })
    }

    /// Builds a matrix from literal rows. Panics on ragged or empty input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(
            rows.iter().all(|r| r.as_ref().len() == cols),
            "ragged rows"
        );
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_i64(rows.len(), cols, data).expect("non-empty matrix")
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_i64(rows, cols, vec![0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Self::from_i64(n, n, data)
    }

    /// Square diagonal matrix.
    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Self::from_i64(n, n, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &self.entries {
            Entries::Small(v) => BigInt::from(v[i * self.cols + j]),
            Entries::Big(v) => v[i * self.cols + j].clone(),
        }
    }

    /// Row-major entries as machine words, when every entry fits.
    pub fn as_i64(&self) -> Option<&[i64]> {
        match &self.entries {
            Entries::Small(v) => Some(v),
            Entries::Big(_) => None,
        }
    }

    pub fn to_bigints(&self) -> Vec<BigInt> {
        match &self.entries {
            Entries::Small(v) => v.iter().map(|&x| BigInt::from(x)).collect(),
            Entries::Big(v) => v.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.entries {
            Entries::Small(v) => v.iter().all(|&x| x == 0),
            Entries::Big(v) => v.iter().all(Zero::is_zero),
        }
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        let data = self.to_bigints();
        let mut out = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                out.push(data[i * c + j].clone());
            }
        }
        Self::new(c, r, out).expect("shape preserved")
    }

    /// Matrix product; `None` when inner dimensions disagree.
    pub fn mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        if self.cols != other.rows {
            return None;
        }
        let a = self.to_bigints();
        let b = other.to_bigints();
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![BigInt::zero(); n * m];
        for i in 0..n {
            for l in 0..k {
                let x = &a[i * k + l];
                if x.is_zero() {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += x * &b[l * m + j];
                }
            }
        }
        Some(Self::new(n, m, out).expect("shape preserved"))
    }

    /// The matrix formed by the first `count` rows.
    pub fn top_rows(&self, count: usize) -> Result<Self> {
        let count = count.min(self.rows);
        match &self.entries {
            Entries::Small(v) => Self::from_i64(count, self.cols, v[..count * self.cols].to_vec()),
            Entries::Big(v) => Self::new(count, self.cols, v[..count * self.cols].to_vec()),
        }
    }

    /// `P M P^T` for the permutation sending index `i` to `perm[i]`.
    pub fn conjugate_by_permutation(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        let n = self.rows;
        let data = self.to_bigints();
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[perm[i] * n + perm[j]] = data[i * n + j].clone();
            }
        }
        Self::new(n, n, out).expect("shape preserved")
    }

    /// Parses the plain-text matrix format: a `rows cols` header line
    /// followed by `rows` lines of `cols` whitespace-separated integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            col: 1,
            msg: "missing 'rows cols' header".into(),
        })?;
        let dims = tokens(header)
            .map(|(col, tok)| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: hline + 1,
                    col,
                    msg: format!("expected a dimension, found {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if dims.len() != 2 {
            return Err(Error::Parse {
                line: hline + 1,
                col: 1,
                msg: format!("header must contain exactly 2 numbers, found {}", dims.len()),
            });
        }
        let (rows, cols) = (dims[0], dims[1]);
        if rows == 0 || cols == 0 {
            return Err(Error::Parse {
                line: hline + 1,
                col: 1,
                msg: "matrix dimensions must be positive".into(),
            });
        }
        let Some(total) = rows.checked_mul(cols) else {
            return Err(Error::Parse {
                line: hline + 1,
                col: 1,
                msg: "matrix dimensions overflow".into(),
            });
        };
        let mut entries = Vec::with_capacity(total.min(1 << 16));
        let mut last_line = hline + 1;
        for r in 0..rows {
            let (lno, line) = lines.next().ok_or(Error::Parse {
                line: last_line + 1,
                col: 1,
                msg: format!("expected {rows} rows, found {r}"),
            })?;
            last_line = lno + 1;
            let mut count = 0;
            for (col, tok) in tokens(line) {
                let x: BigInt = tok.parse().map_err(|_| Error::Parse {
                    line: lno + 1,
                    col,
                    msg: format!("expected an integer, found {tok:?}"),
                })?;
                count += 1;
                if count > cols {
                    return Err(Error::Parse {
                        line: lno + 1,
                        col,
                        msg: format!("row has more than {cols} entries"),
                    });
                }
                entries.push(x);
            }
            if count < cols {
                return Err(Error::Parse {
                    line: lno + 1,
                    col: line.len() + 1,
                    msg: format!("row has {count} entries, expected {cols}"),
                });
            }
        }
        if let Some((lno, _)) = lines.next() {
            return Err(Error::Parse {
                line: lno + 1,
                col: 1,
                msg: format!("unexpected data after {rows} rows"),
            });
        }
        Self::new(rows, cols, entries)
    }
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let tok = &tail[..len];
        let col = offset + start + 1;
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        let data = self.to_bigints();
        for row in data.chunks(self.cols) {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}
