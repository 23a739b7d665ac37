//! Random matrices, random digraphs and their sandpile groups.

mod distribution;
mod rng;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::groups::FiniteAbelianGroup;
use crate::linalg::{cokernel, Cokernel, IntMatrix};

pub use distribution::{
    bernoulli, named_distribution, paper_example, parse_rational, sparse_bernoulli, uniform_range,
    DistributionSpec, EntryDistribution, Rational,
};
pub use rng::Rng;

/// `rows x cols` matrix of i.i.d. draws, filled row by row (one draw per
/// entry).
pub fn sample_matrix(rows: usize, cols: usize, d: &EntryDistribution, rng: &mut Rng) -> IntMatrix {
    let entries: Vec<i64> = (0..rows * cols).map(|_| d.sample(rng)).collect();
    IntMatrix::from_i64(rows, cols, entries).expect("positive dimensions")
}

/// Simple digraph on `0..n`; `x_{ij} = 1` iff there is an edge `i -> j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    adjacency: Vec<bool>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph { n, adjacency: vec![false; n * n] }
    }

    pub fn from_adjacency(m: &IntMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        let mut g = Digraph::empty(n);
        for i in 0..n {
            for j in 0..n {
                let x = m.get(i, j);
                if i == j && !x.is_zero() {
                    return Err(Error::NonzeroDiagonal(i));
                }
                if x > BigInt::one() || x.is_negative() {
                    return Err(Error::BadParams(format!("adjacency entry ({i},{j}) = {x} is not 0/1")));
                }
                g.adjacency[i * n + j] = x.is_one();
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count()
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        let entries = self.adjacency.iter().map(|&e| e as i64).collect();
        IntMatrix::from_i64(self.n, self.n, entries).expect("n >= 1")
    }
}

/// Threshold for a Bernoulli(q) draw: the draw `x` succeeds iff `x < t`,
/// with `None` meaning always.
fn bernoulli_threshold(q: &BigRational) -> Result<Option<u64>> {
    if q.is_negative() || *q > BigRational::one() {
        return Err(Error::BadParams(format!("edge probability {q} is outside [0, 1]")));
    }
    if q.is_one() {
        return Ok(None);
    }
    let scaled = (q * BigRational::from_integer(BigInt::one() << 64u32)).floor().to_integer();
    Ok(Some(scaled.to_u64().unwrap_or(u64::MAX)))
}

/// Each of the `n(n-1)` possible edges independently with probability `q`,
/// drawn in row-major order (one draw per off-diagonal pair).
pub fn sample_digraph(n: usize, q: &BigRational, rng: &mut Rng) -> Result<Digraph> {
    let threshold = bernoulli_threshold(q)?;
    let mut g = Digraph::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let x = rng.next_u64();
                g.adjacency[i * n + j] = threshold.is_none_or(|t| x < t);
            }
        }
    }
    Ok(g)
}

/// `L_{ij} = -x_{ij}` off the diagonal and `L_{ii} = Σ_k x_{ki}`, so every
/// column sums to zero.
pub fn laplacian(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    for i in 0..n {
        if !m.get(i, i).is_zero() {
            return Err(Error::NonzeroDiagonal(i));
        }
    }
    if let Some(x) = m.as_i64() {
        let mut l = vec![0i64; n * n];
        for j in 0..n {
            let mut indeg = 0i64;
            for i in 0..n {
                let v = x[i * n + j];
                indeg = indeg.checked_add(v).ok_or(Error::BadParams("degree overflow".into()))?;
                l[i * n + j] = v.checked_neg().ok_or(Error::BadParams("entry overflow".into()))?;
            }
            l[j * n + j] = indeg;
        }
        let out = IntMatrix::from_i64(n, n, l)?;
        debug_assert!(columns_sum_to_zero(&out).is_ok());
        return Ok(out);
    }
    let mut l = vec![BigInt::default(); n * n];
    for j in 0..n {
        let mut indeg = BigInt::default();
        for i in 0..n {
            let v = m.get(i, j);
            indeg += &v;
            l[i * n + j] = -v;
        }
        l[j * n + j] = indeg;
    }
    IntMatrix::new(n, n, l)
}

/// Laplacian of a digraph.
pub fn digraph_laplacian(g: &Digraph) -> IntMatrix {
    laplacian(&g.adjacency_matrix()).expect("a digraph has zero diagonal")
}

fn columns_sum_to_zero(l: &IntMatrix) -> Result<()> {
    for j in 0..l.cols() {
        let s: BigInt = (0..l.rows()).map(|i| l.get(i, j)).sum();
        if !s.is_zero() {
            return Err(Error::ColumnsNotZeroSum(j));
        }
    }
    Ok(())
}

/// `Z_0^n / L Z^n` for a Laplacian `l`.
///
/// In the basis `e_i - e_n` (`i < n`) of the zero-sum lattice a zero-sum
/// vector has coordinates equal to its first `n - 1` entries, so the group
/// is the cokernel of the top `n - 1` rows of `l`.
pub fn total_sandpile(l: &IntMatrix) -> Result<Cokernel> {
    if !l.is_square() {
        return Err(Error::NotSquare { rows: l.rows(), cols: l.cols() });
    }
    columns_sum_to_zero(l)?;
    if l.rows() == 1 {
        return Ok(Cokernel { free_rank: 0, torsion: FiniteAbelianGroup::trivial() });
    }
    Ok(cokernel(&l.top_rows(l.rows() - 1)?))
}
