//! Finite abelian groups in invariant-factor form.
//!
//! A group is stored as its chain `d_1 | d_2 | ... | d_k` with every
//! `d_i >= 2`; the empty chain is the trivial group. Construction always
//! canonicalises, so two values are isomorphic exactly when they are equal.

pub mod aut;
pub mod factor;
pub mod subgroups;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use factor::{factor, primes_up_to, valuation};

pub use aut::aut_order;
pub use subgroups::{count_surjections, SurjectionCounter, DEFAULT_SUBGROUP_BOUND};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigUint>,
}

/// Sylow decomposition: for each prime, the exponent partition in
/// non-increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PrimaryDecomposition {
    pub parts: BTreeMap<BigUint, Vec<u32>>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        canonicalize(&[BigUint::from(n)])
    }

    /// Wraps a chain that is already in invariant-factor form, dropping
    /// unit factors. Fails if the divisibility chain is broken or a factor
    /// is zero.
    pub fn from_invariant_factors(factors: Vec<BigUint>) -> Result<Self> {
        if factors.iter().any(Zero::is_zero) {
            return Err(Error::BadArgument("invariant factor 0".into()));
        }
        let factors: Vec<BigUint> = factors.into_iter().filter(|d| !d.is_one()).collect();
        if factors.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(Error::BadArgument(
                "invariant factors must form a divisibility chain".into(),
            ));
        }
        Ok(Self { factors })
    }

    /// Convenience for tests and literals: `⊕ Z/n_i`, canonicalised.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let v: Vec<BigUint> = orders.iter().map(|&n| BigUint::from(n)).collect();
        canonicalize(&v)
    }

    pub fn invariant_factors(&self) -> &[BigUint] {
        &self.factors
    }

    pub fn order(&self) -> BigUint {
        self.factors.iter().product()
    }

    /// Order as a machine word, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(d.to_u64()?))
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    /// Exponent (largest invariant factor).
    pub fn exponent(&self) -> BigUint {
        self.factors.last().cloned().unwrap_or_else(BigUint::one)
    }

    pub fn primary_decomposition(&self) -> PrimaryDecomposition {
        let mut parts = BTreeMap::new();
        let Some(top) = self.factors.last() else {
            return PrimaryDecomposition { parts };
        };
        let mut primes = factor(top);
        primes.dedup();
        for p in primes {
            let mut lambda: Vec<u32> = self
                .factors
                .iter()
                .rev()
                .map(|d| valuation(d, &p))
                .filter(|&e| e > 0)
                .collect();
            lambda.sort_unstable_by(|a, b| b.cmp(a));
            parts.insert(p, lambda);
        }
        PrimaryDecomposition { parts }
    }

    pub fn from_primary(decomp: &PrimaryDecomposition) -> Self {
        let len = decomp.parts.values().map(Vec::len).max().unwrap_or(0);
        // i-th factor from the top collects the i-th largest exponent of
        // every prime
        let mut factors = vec![BigUint::one(); len];
        for (p, lambda) in &decomp.parts {
            for (i, &e) in lambda.iter().enumerate() {
                factors[len - 1 - i] *= p.pow(e);
            }
        }
        Self::from_invariant_factors(factors).expect("CRT assembly yields a chain")
    }

    /// Product of the Sylow subgroups at the given primes.
    pub fn sylow(&self, primes: &[BigUint]) -> Self {
        let factors = self
            .factors
            .iter()
            .map(|d| {
                primes
                    .iter()
                    .filter(|p| !p.is_zero() && !p.is_one())
                    .map(|p| p.pow(valuation(d, p)))
                    .product::<BigUint>()
            })
            .collect();
        Self::from_invariant_factors(factors).expect("p-parts of a chain form a chain")
    }

    /// The group `G` with the full `p`-part removed for each listed prime.
    fn strip_primes(d: &BigUint, primes: &[u64]) -> BigUint {
        let mut d = d.clone();
        for &p in primes {
            while (&d % p).is_zero() {
                d /= p;
            }
        }
        d
    }
}

/// Invariant-factor form of `⊕ Z/n_i`. Orders equal to one are ignored.
pub fn canonicalize(cyclic_orders: &[BigUint]) -> FiniteAbelianGroup {
    assert!(
        cyclic_orders.iter().all(|n| !n.is_zero()),
        "cyclic orders must be positive"
    );
    let mut parts: BTreeMap<BigUint, Vec<u32>> = BTreeMap::new();
    for n in cyclic_orders.iter().filter(|n| !n.is_one()) {
        let f = factor(n);
        let mut i = 0;
        while i < f.len() {
            let j = f[i..].iter().take_while(|q| **q == f[i]).count();
            parts.entry(f[i].clone()).or_default().push(j as u32);
            i += j;
        }
    }
    for lambda in parts.values_mut() {
        lambda.sort_unstable_by(|a, b| b.cmp(a));
    }
    FiniteAbelianGroup::from_primary(&PrimaryDecomposition { parts })
}

pub fn sylow(g: &FiniteAbelianGroup, primes: &[BigUint]) -> FiniteAbelianGroup {
    g.sylow(primes)
}

pub fn is_cyclic(g: &FiniteAbelianGroup) -> bool {
    g.is_cyclic()
}

/// `#Hom(a, g) = ∏_{i,j} gcd(a_i, g_j)`.
pub fn count_homs(a: &FiniteAbelianGroup, g: &FiniteAbelianGroup) -> BigUint {
    let mut total = BigUint::one();
    for x in &a.factors {
        for y in &g.factors {
            total *= x.gcd(y);
        }
    }
    total
}

/// Whether `g` lies in the class `B × C` with `C` cyclic of order
/// divisible only by primes `>= k0`.
pub fn matches_b_times_cyclic(g: &FiniteAbelianGroup, b: &FiniteAbelianGroup, k0: u64) -> Result<bool> {
    check_k0(b, k0)?;
    let small: Vec<u64> = primes_up_to(k0.saturating_sub(1));
    let small_big: Vec<BigUint> = small.iter().map(|&p| BigUint::from(p)).collect();
    Ok(in_b_times_cyclic(g, b, &small, &small_big))
}

/// [`matches_b_times_cyclic`] with the primes below `k0` precomputed.
pub(crate) fn in_b_times_cyclic(
    g: &FiniteAbelianGroup,
    b: &FiniteAbelianGroup,
    small: &[u64],
    small_big: &[BigUint],
) -> bool {
    if g.sylow(small_big) != *b {
        return false;
    }
    // A p-part is cyclic iff p divides at most the top invariant factor.
    let n = g.factors.len();
    n < 2 || FiniteAbelianGroup::strip_primes(&g.factors[n - 2], small).is_one()
}

/// Ensures `k0` exceeds every prime divisor of `|b|`.
pub(crate) fn check_k0(b: &FiniteAbelianGroup, k0: u64) -> Result<()> {
    let largest = b
        .factors
        .last()
        .map(|d| factor(d).last().and_then(|p| p.to_u64()).unwrap_or(u64::MAX))
        .unwrap_or(0);
    if k0 < 2 || largest >= k0 {
        return Err(Error::K0TooSmall { k0, largest });
    }
    Ok(())
}

/// Partitions of `n` in non-increasing order.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every isomorphism class of abelian group of order `n`.
pub fn groups_of_order(n: u64) -> Vec<FiniteAbelianGroup> {
    let f = factor::factor_u64(n);
    let mut prime_powers: Vec<(u64, u32)> = Vec::new();
    for p in f {
        match prime_powers.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => prime_powers.push((p, 1)),
        }
    }
    let mut out = vec![PrimaryDecomposition::default()];
    for (p, e) in prime_powers {
        let mut next = Vec::new();
        for base in &out {
            for lambda in partitions(e) {
                let mut d = base.clone();
                d.parts.insert(BigUint::from(p), lambda);
                next.push(d);
            }
        }
        out = next;
    }
    out.iter().map(FiniteAbelianGroup::from_primary).collect()
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Accepts `0`, `1`, `trivial`, or `Z/a x Z/b x ...` (any cyclic
    /// orders; the result is canonicalised).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "0" | "1" | "trivial" | "{id}") {
            return Ok(Self::trivial());
        }
        let bad = |msg: String| Error::Parse {
            line: 1,
            col: 1,
            msg,
        };
        let mut orders = Vec::new();
        for part in s.split(['x', '⊕', '+']) {
            let part = part.trim();
            let digits = part
                .strip_prefix("Z/")
                .ok_or_else(|| bad(format!("expected Z/n, found {part:?}")))?;
            let n: BigUint = digits
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad cyclic order {digits:?}")))?;
            if n.is_zero() {
                return Err(bad("cyclic order must be positive".into()));
            }
            orders.push(n);
        }
        Ok(canonicalize(&orders))
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
