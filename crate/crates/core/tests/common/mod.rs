//! Brute-force oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls into the library's closed forms; the functions only
//! enumerate.

#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// A small concrete group `Z/m_1 x ... x Z/m_k` with elements encoded in
/// mixed radix.
pub struct Concrete {
    pub mods: Vec<u64>,
    pub order: usize,
}

impl Concrete {
    pub fn new(mods: &[u64]) -> Self {
        let order = mods.iter().product::<u64>() as usize;
        Concrete { mods: mods.to_vec(), order }
    }

    fn digits(&self, mut x: usize) -> Vec<u64> {
        self.mods
            .iter()
            .map(|&m| {
                let d = x as u64 % m;
                x /= m as usize;
                d
            })
            .collect()
    }

    fn undigits(&self, d: &[u64]) -> usize {
        let mut x = 0usize;
        for (i, &m) in self.mods.iter().enumerate().rev() {
            x = x * m as usize + d[i] as usize;
        }
        x
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u64> = da
            .iter()
            .zip(&db)
            .zip(&self.mods)
            .map(|((x, y), m)| (x + y) % m)
            .collect();
        self.undigits(&s)
    }

    pub fn scale(&self, k: u64, a: usize) -> usize {
        let s: Vec<u64> = self
            .digits(a)
            .iter()
            .zip(&self.mods)
            .map(|(x, m)| (x * (k % m)) % m)
            .collect();
        self.undigits(&s)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.add(x, a);
            k += 1;
        }
        k
    }
}

/// Subgroup generated by the subgroup `h` (bitmask) and one element `g`.
fn join(grp: &Concrete, add: &[Vec<usize>], h: u64, g: usize) -> u64 {
    let mut out = h;
    let mut mult = 0usize;
    loop {
        for x in 0..grp.order {
            if h >> x & 1 == 1 {
                out |= 1 << add[x][mult];
            }
        }
        mult = add[mult][g];
        if mult == 0 {
            return out;
        }
    }
}

/// For every subgroup `H` of `Z/mods`, the number of tuples
/// `(x_1, ..., x_k)` with `a_i * x_i = 0` that generate exactly `H`.
///
/// Such tuples are exactly the homomorphisms `⊕ Z/a_i -> G` with image `H`.
pub fn homs_by_image(source: &[u64], mods: &[u64]) -> HashMap<u64, u64> {
    let grp = Concrete::new(mods);
    assert!(grp.order <= 64);
    let add: Vec<Vec<usize>> = (0..grp.order)
        .map(|a| (0..grp.order).map(|b| grp.add(a, b)).collect())
        .collect();
    let mut cache: HashMap<(u64, usize), u64> = HashMap::new();
    let mut states: HashMap<u64, u64> = HashMap::from([(1u64, 1u64)]);
    for &a in source {
        let allowed: Vec<usize> = (0..grp.order).filter(|&x| grp.scale(a, x) == 0).collect();
        let mut next: HashMap<u64, u64> = HashMap::new();
        for (&h, &count) in &states {
            for &x in &allowed {
                let j = *cache.entry((h, x)).or_insert_with(|| join(&grp, &add, h, x));
                *next.entry(j).or_default() += count;
            }
        }
        states = next;
    }
    states
}

/// Surjective homomorphisms `⊕ Z/source_i -> ⊕ Z/mods_j` by enumeration.
pub fn surjections(source: &[u64], mods: &[u64]) -> u64 {
    let full = Concrete::new(mods).order;
    let mask = if full == 64 { u64::MAX } else { (1u64 << full) - 1 };
    homs_by_image(source, mods).get(&mask).copied().unwrap_or(0)
}

/// Cyclic orders (prime powers) of the subgroup `h` of `Z/mods`, read off
/// from how many elements each `p^k` kills.
pub fn subgroup_type(mods: &[u64], h: u64) -> Vec<u64> {
    let grp = Concrete::new(mods);
    let elems: Vec<usize> = (0..grp.order).filter(|&x| h >> x & 1 == 1).collect();
    let n = elems.len() as u64;
    let mut out = Vec::new();
    for p in 2..=n {
        if n % p != 0 || !(2..p).all(|d| p % d != 0) {
            continue;
        }
        // ranks[k] = log_p #{x : p^k x = 0}
        let mut ranks = vec![0u32];
        let mut pk = 1u64;
        loop {
            pk *= p;
            let killed = elems.iter().filter(|&&x| grp.scale(pk, x) == 0).count() as u64;
            let exact_p_part = {
                let mut c = 0;
                let mut t = killed;
                while t % p == 0 && t > 1 {
                    t /= p;
                    c += 1;
                }
                c
            };
            if exact_p_part == *ranks.last().unwrap() {
                break;
            }
            ranks.push(exact_p_part);
        }
        // number of cyclic factors of order >= p^k is ranks[k] - ranks[k-1]
        let at_least: Vec<u32> = ranks.windows(2).map(|w| w[1] - w[0]).collect();
        for k in 0..at_least.len() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(at_least[k] - next) {
                out.push(p.pow(k as u32 + 1));
            }
        }
    }
    out
}

/// Every map from the source group to the target, kept when it is a
/// homomorphism; returns `(homs, surjections, bijections)`.
pub fn literal_count(source: &[u64], target: &[u64]) -> (u64, u64, u64) {
    let a = Concrete::new(source);
    let g = Concrete::new(target);
    let total = (g.order as u64).pow(a.order as u32);
    let mut counts = (0, 0, 0);
    let mut f = vec![0usize; a.order];
    for code in 0..total {
        let mut c = code;
        for slot in f.iter_mut() {
            *slot = (c % g.order as u64) as usize;
            c /= g.order as u64;
        }
        let hom = (0..a.order).all(|x| (0..a.order).all(|y| f[a.add(x, y)] == g.add(f[x], f[y])));
        if !hom {
            continue;
        }
        counts.0 += 1;
        let mut seen = vec![false; g.order];
        for &y in &f {
            seen[y] = true;
        }
        if seen.iter().all(|&s| s) {
            counts.1 += 1;
            if a.order == g.order {
                counts.2 += 1;
            }
        }
    }
    counts
}

/// Every invariant-factor chain `d_1 | ... | d_k` (each `>= 2`) with product `n`.
pub fn chains_of_order(n: u64) -> Vec<Vec<u64>> {
    fn go(rest: u64, last: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 1 {
            let mut c = prefix.clone();
            c.reverse();
            out.push(c);
            return;
        }
        // largest factor first; each later one divides the one before
        for d in 2..=rest {
            if rest % d == 0 && last % d == 0 {
                prefix.push(d);
                go(rest / d, d, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Invariant factors by determinantal divisors: `d_k` is the gcd of all
/// `k x k` minors and the `k`-th factor is `d_k / d_{k-1}`.
pub fn determinantal_factors(rows: usize, cols: usize, a: &[i64]) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<i64> = rs
                    .iter()
                    .flat_map(|&i| cs.iter().map(move |&j| a[i * cols + j]))
                    .collect();
                g = g.gcd(&cofactor_det(k, &sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(n: usize, a: &[i64]) -> BigInt {
    if n == 1 {
        return BigInt::from(a[0]);
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if a[j] == 0 {
            continue;
        }
        let minor: Vec<i64> = (1..n)
            .flat_map(|i| (0..n).filter(move |&c| c != j).map(move |c| a[i * n + c]))
            .collect();
        let term = BigInt::from(a[j]) * cofactor_det(n - 1, &minor);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

pub fn abs(x: &BigInt) -> BigInt {
    x.abs()
}

/// Tiny deterministic generator for test inputs.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next() % (hi - lo + 1) as u64) as i64
    }
}
