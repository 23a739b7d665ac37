//! Exact linear algebra over `Z` and `Z/p`.

mod det;
mod matrix;
mod modp;
mod scalar;
mod snf;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::groups::FiniteAbelianGroup;

pub use det::{det, rank_over_q};
pub use matrix::IntMatrix;
pub use modp::rank_mod_p;
pub use snf::{smith_normal_form, SnfResult};

/// `Z^rows / M(Z^cols)` split as `Z^free_rank ⊕ torsion`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cokernel {
    pub free_rank: usize,
    pub torsion: FiniteAbelianGroup,
}

impl Cokernel {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// The zero group.
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_trivial()
    }

    /// Cyclic in the sense that the whole group, free part included, needs
    /// at most one generator (so `Z` is cyclic and `Z ⊕ Z/2` is not).
    pub fn is_cyclic(&self) -> bool {
        self.free_rank + self.torsion.invariant_factors().len() <= 1
    }
}

impl fmt::Display for Cokernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        if !self.torsion.is_trivial() {
            parts.push(self.torsion.to_string());
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// Cokernel of `m` viewed as a map `Z^cols -> Z^rows`.
pub fn cokernel(m: &IntMatrix) -> Cokernel {
    let snf = smith_normal_form(m, false);
    Cokernel {
        free_rank: m.rows() - snf.rank,
        torsion: FiniteAbelianGroup::from_invariant_factors(snf.invariant_factors)
            .expect("Smith normal form yields a divisibility chain"),
    }
}
