//! Subgroup lattices of small abelian groups and surjection counting by
//! Möbius inversion.
//!
//! `#Sur(A, G) = Σ_{H ≤ G} μ(H, G) · #Hom(A, H)`, with `μ(G, G) = 1` and
//! `Σ_{H ≤ K ≤ G} μ(K, G) = 0` for every proper `H`. The lattice is found
//! by closing the trivial subgroup under joins with cyclic subgroups until
//! nothing new appears.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{count_homs, FiniteAbelianGroup, PrimaryDecomposition};
use crate::error::{Error, Result};

pub const DEFAULT_SUBGROUP_BOUND: u64 = 256;

/// `Z/d_1 × ... × Z/d_k` with elements indexed in mixed radix.
#[derive(Clone, Debug)]
pub(crate) struct ConcreteGroup {
    moduli: Vec<u64>,
    order: usize,
}

impl ConcreteGroup {
    pub(crate) fn new(g: &FiniteAbelianGroup) -> Option<Self> {
        let moduli: Vec<u64> = g
            .invariant_factors()
            .iter()
            .map(|d| d.to_u64())
            .collect::<Option<_>>()?;
        let order = moduli.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize))?;
        Some(Self { moduli, order })
    }

    pub(crate) fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn decode(&self, mut x: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&d| {
                let c = (x as u64) % d;
                x /= d as usize;
                c
            })
            .collect()
    }

    pub(crate) fn encode(&self, coords: &[u64]) -> usize {
        let mut x = 0usize;
        for (c, &d) in coords.iter().zip(&self.moduli).rev() {
            x = x * d as usize + (*c % d) as usize;
        }
        x
    }

    pub(crate) fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
        self.encode(&sum)
    }

    pub(crate) fn element_order(&self, x: usize) -> u64 {
        use num_integer::Integer;
        self.decode(x)
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &d)| d / c.gcd(&d))
            .fold(1u64, |acc, o| acc.lcm(&o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct ElemSet(Vec<u64>);

impl ElemSet {
    fn empty(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }
    fn insert(&mut self, x: usize) {
        self.0[x / 64] |= 1 << (x % 64);
    }
    pub(crate) fn contains(&self, x: usize) -> bool {
        self.0[x / 64] >> (x % 64) & 1 == 1
    }
    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

/// `⟨H, x⟩` for a subgroup `H`.
fn join_cyclic(g: &ConcreteGroup, h: &ElemSet, x: usize) -> ElemSet {
    let base: Vec<usize> = h.iter().collect();
    let mut out = h.clone();
    let mut cur = x;
    while !h.contains(cur) {
        for &y in &base {
            out.insert(g.add(y, cur));
        }
        cur = g.add(cur, x);
    }
    out
}

/// All subgroups of `g`, each as an element set.
pub(crate) fn enumerate_subgroups(g: &ConcreteGroup) -> Vec<ElemSet> {
    let n = g.order();
    let mut trivial = ElemSet::empty(n);
    trivial.insert(0);
    // one generator per cyclic subgroup
    let mut seen_cyclic = HashSet::new();
    let mut generators = Vec::new();
    for x in 1..n {
        let c = join_cyclic(g, &trivial, x);
        if seen_cyclic.insert(c) {
            generators.push(x);
        }
    }
    let mut seen: HashSet<ElemSet> = HashSet::new();
    seen.insert(trivial.clone());
    let mut all = vec![trivial];
    let mut next = 0;
    while next < all.len() {
        let h = all[next].clone();
        next += 1;
        for &x in &generators {
            if h.contains(x) {
                continue;
            }
            let j = join_cyclic(g, &h, x);
            if seen.insert(j.clone()) {
                all.push(j);
            }
        }
    }
    all
}

/// Isomorphism type of a subgroup, read off from the numbers of elements
/// killed by each prime power.
pub(crate) fn subgroup_type(orders: &[u64], h: &ElemSet) -> FiniteAbelianGroup {
    let size = h.len() as u64;
    let primes = super::factor::factor_u64(size);
    let mut distinct = primes.clone();
    distinct.dedup();
    let mut parts = BTreeMap::new();
    for p in distinct {
        // killed[k] = #{x in H : ord(x) | p^k}
        let mut killed = vec![1u64];
        let mut pk = 1u64;
        let full = p.pow(primes.iter().filter(|&&q| q == p).count() as u32);
        while *killed.last().unwrap() < full {
            pk *= p;
            killed.push(h.iter().filter(|&x| pk % orders[x] == 0).count() as u64);
        }
        // number of parts >= k is log_p(killed[k] / killed[k-1])
        let at_least: Vec<u32> = killed
            .windows(2)
            .map(|w| (w[1] / w[0]).ilog(p))
            .collect();
        let len = at_least[0] as usize;
        let lambda: Vec<u32> = (0..len)
            .map(|i| at_least.iter().filter(|&&c| c as usize > i).count() as u32)
            .collect();
        parts.insert(BigUint::from(p), lambda);
    }
    FiniteAbelianGroup::from_primary(&PrimaryDecomposition { parts })
}

/// Precomputed Möbius data for counting surjections onto a fixed group.
#[derive(Clone, Debug)]
pub struct SurjectionCounter {
    target: FiniteAbelianGroup,
    /// (subgroup type, |H|, Σ μ(H, G) over subgroups of that type)
    terms: Vec<(FiniteAbelianGroup, BigUint, BigInt)>,
}

impl SurjectionCounter {
    pub fn new(target: &FiniteAbelianGroup, bound: u64) -> Result<Self> {
        let too_large = || Error::GroupTooLarge {
            order: target.order().to_string(),
            bound,
        };
        let order = target.order_u64().ok_or_else(too_large)?;
        if order > bound {
            return Err(too_large());
        }
        let g = ConcreteGroup::new(target).ok_or_else(too_large)?;
        let orders: Vec<u64> = (0..g.order()).map(|x| g.element_order(x)).collect();
        let mut subs = enumerate_subgroups(&g);
        subs.sort_by_key(|h| std::cmp::Reverse(h.len()));
        let sizes: Vec<usize> = subs.iter().map(ElemSet::len).collect();
        // mu[i] = μ(H_i, G); descending order puts G first
        let mut mu: Vec<BigInt> = Vec::with_capacity(subs.len());
        let mut nonzero: Vec<usize> = Vec::new();
        for (i, h) in subs.iter().enumerate() {
            let m = if i == 0 {
                BigInt::one()
            } else {
                let s: BigInt = nonzero
                    .iter()
                    .filter(|&&k| sizes[k] > sizes[i] && sizes[k] % sizes[i] == 0 && h.is_subset(&subs[k]))
                    .map(|&k| mu[k].clone())
                    .sum();
                -s
            };
            if !m.is_zero() {
                nonzero.push(i);
            }
            mu.push(m);
        }
        let mut by_type: HashMap<FiniteAbelianGroup, BigInt> = HashMap::new();
        for &i in &nonzero {
            let t = subgroup_type(&orders, &subs[i]);
            *by_type.entry(t).or_default() += &mu[i];
        }
        let mut terms: Vec<_> = by_type
            .into_iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(t, m)| {
                let size = t.order();
                (t, size, m)
            })
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self {
            target: target.clone(),
            terms,
        })
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    /// `#Sur(Z^free_rank ⊕ torsion, G)`.
    pub fn count(&self, free_rank: usize, torsion: &FiniteAbelianGroup) -> BigUint {
        let mut total = BigInt::zero();
        for (h, size, m) in &self.terms {
            let homs = size.pow(free_rank as u32) * count_homs(torsion, h);
            total += m * BigInt::from(homs);
        }
        debug_assert!(!total.is_negative());
        total.into_parts().1
    }
}

/// `#Sur(a, g)`, for `|g|` at most [`DEFAULT_SUBGROUP_BOUND`].
pub fn count_surjections(a: &FiniteAbelianGroup, g: &FiniteAbelianGroup) -> Result<BigUint> {
    Ok(SurjectionCounter::new(g, DEFAULT_SUBGROUP_BOUND)?.count(0, a))
}

/// Number of subgroups of `g` (used by tests and diagnostics).
pub fn subgroup_count(g: &FiniteAbelianGroup, bound: u64) -> Result<usize> {
    if g.order_u64().is_none_or(|n| n > bound) {
        return Err(Error::GroupTooLarge {
            order: g.order().to_string(),
            bound,
        });
    }
    let cg = ConcreteGroup::new(g).expect("order checked");
    Ok(enumerate_subgroups(&cg).len())
}
