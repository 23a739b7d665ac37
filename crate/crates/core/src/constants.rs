//! Limiting probabilities as double-precision values with explicit error
//! bounds.
//!
//! Every Euler product here has local factor `1 + t^s / (1 - t)` at
//! `t = 1/p` for some `s >= 2`. Primes up to a cutoff are multiplied
//! directly; the rest enter through `Σ_j c_j Σ_{p > P} p^{-j}`, where `c_j`
//! are the Taylor coefficients of the log of the local factor and the prime
//! sums come from the prime zeta function
//! `P(j) = Σ_m μ(m)/m · log ζ(mj)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::factor::{is_prime_u64, primes_up_to};
use crate::groups::{aut_order, check_k0, FiniteAbelianGroup};

pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest tolerance accepted; below this double rounding dominates.
pub const MIN_TOL: f64 = 1e-13;

const EPS: f64 = f64::EPSILON;

/// Largest `k0` for which `prodcyc_prob` will enumerate the primes below it.
pub const MAX_K0: u64 = 10_000_000;

/// Number of Taylor coefficients used for the prime tail.
const TAIL_TERMS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancedReal {
    pub value: f64,
    pub abs_error_bound: f64,
    /// Set when the limit is a degenerate zero (e.g. a fixed finite group at
    /// `u = 0`) rather than a computed positive value.
    #[serde(default)]
    pub degenerate: bool,
}

impl TolerancedReal {
    pub fn exact(value: f64) -> Self {
        TolerancedReal { value, abs_error_bound: 0.0, degenerate: false }
    }

    fn scaled(self, factor: f64) -> Self {
        TolerancedReal {
            value: self.value * factor,
            abs_error_bound: self.abs_error_bound * factor + (self.value * factor).abs() * EPS,
            degenerate: self.degenerate,
        }
    }

    /// Product of two bounded values (both assumed in `[0, 1]`-ish ranges).
    fn times(self, other: Self) -> Self {
        let value = self.value * other.value;
        let bound = self.abs_error_bound * other.value.abs()
            + other.abs_error_bound * self.value.abs()
            + self.abs_error_bound * other.abs_error_bound
            + value.abs() * EPS;
        TolerancedReal { value, abs_error_bound: bound, degenerate: self.degenerate || other.degenerate }
    }
}

impl fmt::Display for TolerancedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.15} ± {:.3e}", self.value, self.abs_error_bound)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::BadArgument(format!("tolerance must be positive, got {tol}")));
    }
    if tol < MIN_TOL {
        return Err(Error::BadArgument(format!(
            "tolerance {tol:e} is below the double-precision floor {MIN_TOL:e}"
        )));
    }
    Ok(())
}

/// Compensated (Neumaier) summation.
#[derive(Default)]
struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `ζ(k)` for `k >= 2` by partial sums plus an Euler-Maclaurin tail.
///
/// With `f(x) = x^{-k}` the tail `Σ_{n >= N} f(n)` is
/// `N^{1-k}/(k-1) + N^{-k}/2 + k N^{-k-1}/12` up to an error below the
/// next term `k(k+1)(k+2) N^{-k-3}/720`.
pub fn zeta(k: u32, tol: f64) -> Result<TolerancedReal> {
    if k < 2 {
        return Err(Error::BadArgument(format!("zeta({k}) is not a convergent series")));
    }
    check_tol(tol)?;
    Ok(zeta_impl(k, tol))
}

/// Internal precision for zeta values feeding other products.
const INNER_TOL: f64 = 1e-17;

fn zeta_impl(k: u32, tol: f64) -> TolerancedReal {
    let kf = k as f64;
    let remainder = |n: f64| kf * (kf + 1.0) * (kf + 2.0) / 720.0 * n.powf(-kf - 3.0);
    let mut n = 8u64;
    while remainder(n as f64) > tol / 4.0 {
        n *= 2;
    }
    let mut s = Sum::default();
    for i in (1..n).rev() {
        s.add((i as f64).powf(-kf));
    }
    let nf = n as f64;
    s.add(nf.powf(1.0 - kf) / (kf - 1.0));
    s.add(nf.powf(-kf) / 2.0);
    s.add(kf * nf.powf(-kf - 1.0) / 12.0);
    let value = s.value();
    TolerancedReal {
        value,
        abs_error_bound: remainder(nf) + 4.0 * EPS * value,
        degenerate: false,
    }
}

/// `∏_{k=u+1}^∞ ζ(k)^{-1}`; exactly `0` at `u = 0` since `ζ(1)^{-1} = 0`.
pub fn zeta_tail_product(u: u32, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    Ok(tail_product_impl(u, tol))
}

fn tail_product_impl(u: u32, tol: f64) -> TolerancedReal {
    if u == 0 {
        return TolerancedReal::exact(0.0);
    }
    // ζ(k) - 1 <= 2^{1-k} for k >= 3, so stopping after K leaves a factor in
    // [1 - 2^{1-K}, 1].
    let mut last = (u + 1).max(3);
    while 2f64.powi(1 - last as i32) > tol / 4.0 {
        last += 1;
    }
    let mut value = 1.0f64;
    let mut rel = 0.0f64;
    for k in (u + 1)..=last {
        let z = zeta_impl(k, INNER_TOL);
        value /= z.value;
        rel += z.abs_error_bound / z.value + EPS;
    }
    let omitted = 2f64.powi(1 - last as i32);
    TolerancedReal {
        value,
        abs_error_bound: value * (rel + omitted) + value * 2.0 * EPS,
        degenerate: false,
    }
}

/// Taylor coefficients `c_0..c_{J}` of `log(1 + t^s/(1-t))`.
fn log_local_factor_coefficients(s: usize, count: usize) -> Vec<f64> {
    // h(t) = 1 - t + t^s, and log(1 + t^s/(1-t)) = log h(t) - log(1 - t).
    let mut h = vec![0.0; count + 1];
    h[0] = 1.0;
    h[1] -= 1.0;
    if s <= count {
        h[s] += 1.0;
    }
    // q = h'/h as a power series, then integrate.
    let dh: Vec<f64> = (0..count).map(|i| (i + 1) as f64 * h[i + 1]).collect();
    let mut q = vec![0.0; count];
    for i in 0..count {
        let mut acc = dh[i];
        for j in 1..=i.min(s) {
            acc -= h[j] * q[i - j];
        }
        q[i] = acc;
    }
    let mut c = vec![0.0; count + 1];
    for j in 1..=count {
        c[j] = q[j - 1] / j as f64 + 1.0 / j as f64;
    }
    c
}

/// `Σ_{p prime} p^{-j}` for `j >= 2`, with an error bound.
fn prime_zeta(j: u32) -> (f64, f64) {
    let mut s = Sum::default();
    let mut err = 0.0;
    let mut m = 1u32;
    loop {
        let k = m * j;
        // log ζ(k) <= 2^{1-k} once k >= 3; stop when the rest is negligible
        if k >= 3 && 2f64.powi(2 - k as i32) < 1e-20 {
            err += 2f64.powi(2 - k as i32);
            break;
        }
        let mu = mobius(m);
        if mu != 0 {
            let z = zeta_impl(k, INNER_TOL);
            let term = z.value.ln() / m as f64;
            s.add(mu as f64 * term);
            err += z.abs_error_bound / z.value / m as f64 + EPS * term.abs();
        }
        m += 1;
    }
    let v = s.value();
    (v, err + 4.0 * EPS * v)
}

fn mobius(mut n: u32) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// `∏_p (1 + t^s/(1-t))` at `t = 1/p`, primes `<= cutoff` multiplied
/// directly and the rest through the prime zeta function.
pub(crate) fn euler_product_with_cutoff(s: u32, cutoff: u64) -> TolerancedReal {
    assert!(s >= 2);
    let primes = primes_up_to(cutoff);
    let mut log_head = Sum::default();
    for &p in &primes {
        let t = 1.0 / p as f64;
        log_head.add((t.powi(s as i32) / (1.0 - t)).ln_1p());
    }
    // every term is positive with relative error about 2 eps
    let head_err = 4.0 * EPS * log_head.value();
    let c = log_local_factor_coefficients(s as usize, TAIL_TERMS + 1);
    let mut log_tail = Sum::default();
    let mut tail_err = 0.0;
    let pf = cutoff as f64;
    for j in (s as usize)..=TAIL_TERMS {
        if c[j] == 0.0 {
            continue;
        }
        let (pz, pz_err) = prime_zeta(j as u32);
        let mut head = Sum::default();
        for &p in primes.iter().rev() {
            head.add((p as f64).powi(-(j as i32)));
        }
        // the tail is nonnegative and at most ∫_P^∞ x^{-j} dx
        let cap = pf.powf(1.0 - j as f64) / (j as f64 - 1.0);
        let rest = (pz - head.value()).clamp(0.0, cap);
        log_tail.add(c[j] * rest);
        tail_err += c[j].abs() * (pz_err + 4.0 * EPS * pz).min(cap);
    }
    tail_err += omitted_taylor_bound(s, cutoff);
    let log_total = log_head.value() + log_tail.value();
    let value = log_total.exp();
    TolerancedReal {
        value,
        abs_error_bound: value * (head_err + tail_err + 4.0 * EPS) * 1.01,
        degenerate: false,
    }
}

/// Bound on `Σ_{j > J} |c_j| Σ_{p > P} p^{-j}`.
///
/// `1 - t + t^s` has no zero in `|t| < 1/2`, so `|c_j| <= (s+1) 2^j / j`;
/// with `Σ_{p > P} p^{-j} <= P^{1-j}/(j-1)` the sum is geometric in `2/P`.
fn omitted_taylor_bound(s: u32, cutoff: u64) -> f64 {
    let pf = cutoff as f64;
    let j = TAIL_TERMS as f64 + 1.0;
    2.0 * (s as f64 + 1.0) * pf * (2.0 / pf).powf(j)
}

/// Cutoff for the direct part of an Euler product, chosen from the tail
/// bound `Σ_{p > P} p^{-s} <= P^{1-s}/(s-1)` applied to the first omitted
/// Taylor term.
fn euler_cutoff(s: u32, tol: f64) -> u64 {
    let mut cutoff = 100u64;
    while cutoff < 1_000_000 && omitted_taylor_bound(s, cutoff) > tol / 4.0 {
        cutoff *= 10;
    }
    cutoff
}

fn euler_product(s: u32, tol: f64) -> TolerancedReal {
    euler_product_with_cutoff(s, euler_cutoff(s, tol))
}

/// Inverse of `|b|^u · |Aut(b)|` as a double.
fn group_weight(b: &FiniteAbelianGroup, u: u32) -> f64 {
    let denom: BigUint = b.order().pow(u) * aut_order(b);
    1.0 / denom.to_f64().unwrap_or(f64::INFINITY)
}

/// Limiting mass of `cok(M_{n x (n+u)}) ≅ b`.
///
/// At `u = 0` every finite group has limit mass zero; this is returned as an
/// exact `0` with `degenerate` set.
pub fn cohen_lenstra_prob(b: &FiniteAbelianGroup, u: u32, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    if u == 0 {
        return Ok(TolerancedReal { value: 0.0, abs_error_bound: 0.0, degenerate: true });
    }
    Ok(tail_product_impl(u, tol).scaled(group_weight(b, u)))
}

/// Limiting probability that `cok(M_{n x (n+u)})` is cyclic.
pub fn cyclic_prob(u: u32, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    let euler = euler_product(u + 2, tol / 2.0);
    Ok(euler.times(tail_product_impl(u + 1, tol / 4.0)))
}

/// Limiting probability that the cokernel is finite cyclic of squarefree
/// order (for square matrices: `det` squarefree).
pub fn squarefree_det_prob(u: u32, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    if u == 0 {
        return Err(Error::BadArgument("squarefree_det_prob needs u >= 1".into()));
    }
    let euler = euler_product(u + 1, tol / 2.0);
    Ok(euler.times(tail_product_impl(u, tol / 4.0)))
}

/// Limiting mass of the total sandpile group being `b`.
pub fn sandpile_prob(b: &FiniteAbelianGroup, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    Ok(tail_product_impl(1, tol).scaled(group_weight(b, 1)))
}

/// Limiting probability that the total sandpile group is cyclic.
pub fn sandpile_cyclic_prob(tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    let euler = euler_product(3, tol / 2.0);
    Ok(euler.times(tail_product_impl(2, tol / 4.0)))
}

/// Limiting probability that `cok(M_{n x n})` is `b` times a cyclic group
/// whose order has no prime factor below `k0`.
pub fn prodcyc_prob(b: &FiniteAbelianGroup, k0: u64, tol: f64) -> Result<TolerancedReal> {
    check_tol(tol)?;
    check_k0(b, k0)?;
    if k0 > MAX_K0 {
        return Err(Error::BadArgument(format!("k0 = {k0} exceeds the supported bound {MAX_K0}")));
    }
    let euler = euler_product(2, tol / 2.0);
    // swap the local factor at each p < k0 from (1 + 1/(p^2 - p)) to (1 - 1/p)
    let mut log_adjust = Sum::default();
    let small: Vec<u64> = primes_up_to(k0.saturating_sub(1));
    for &p in &small {
        let t = 1.0 / p as f64;
        log_adjust.add((-t).ln_1p() - (t * t / (1.0 - t)).ln_1p());
    }
    let adjust = log_adjust.value().exp();
    let adjust_err = adjust * (small.len() as f64 * 4.0 * EPS);
    let adjusted = euler.times(TolerancedReal { value: adjust, abs_error_bound: adjust_err, degenerate: false });
    let aut = aut_order(b).to_f64().unwrap_or(f64::INFINITY);
    Ok(adjusted.times(tail_product_impl(1, tol / 4.0)).scaled(1.0 / aut))
}

/// `|b|^{-u} |Aut(b)|^{-1} ∏_{p ∈ primes} ∏_{k >= 1} (1 - p^{-k-u})`: the
/// limiting law of the Sylow part at a finite set of primes.
pub fn sylow_restricted_prob(
    b: &FiniteAbelianGroup,
    u: u32,
    primes: &[u64],
    tol: f64,
) -> Result<TolerancedReal> {
    check_tol(tol)?;
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    if let Some(&bad) = ps.iter().find(|&&p| !is_prime_u64(p)) {
        return Err(Error::NonPrimeModulus(bad.to_string()));
    }
    let big: Vec<BigUint> = ps.iter().map(|&p| BigUint::from(p)).collect();
    if b.sylow(&big) != *b {
        return Err(Error::BadArgument(format!(
            "prime set {ps:?} misses a prime dividing |{b}|"
        )));
    }
    let mut value = group_weight(b, u);
    let mut rel = EPS;
    let per_prime = tol / (2.0 * ps.len().max(1) as f64);
    for &p in &ps {
        let pf = p as f64;
        let mut k = 1u32;
        let mut local = 1.0;
        loop {
            let term = pf.powi(-((k + u) as i32));
            local *= 1.0 - term;
            rel += 2.0 * EPS;
            // the rest of the product lies in [1 - Σ_{i>k} p^{-i-u}, 1]
            let omitted = term / (pf - 1.0);
            if omitted < per_prime {
                value *= local;
                rel += omitted;
                break;
            }
            k += 1;
        }
    }
    Ok(TolerancedReal { value, abs_error_bound: value * rel + EPS * value, degenerate: false })
}

fn check_prime(p: u64) -> Result<()> {
    if is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::NonPrimeModulus(p.to_string()))
    }
}

/// `∏_{j=1}^{n} (1 - p^{-j-u})`: the probability that a uniform
/// `n x (n+u)` matrix over `F_p` has full rank.
pub fn uniform_fullrank_prob(n: u32, u: u32, p: u64) -> Result<f64> {
    check_prime(p)?;
    let pf = p as f64;
    Ok((1..=n).map(|j| 1.0 - pf.powi(-((j + u) as i32))).product())
}

/// Probability that a uniform `n x m` matrix over `F_p` has rank
/// `min(n, m) - corank`, from the count of rank-`r` matrices:
/// `p^{-(n-r)(m-r)} ∏_{i<r} (1 - p^{i-n})(1 - p^{i-m}) / (1 - p^{i-r})`.
pub fn uniform_corank_prob(n: u32, m: u32, p: u64, corank: u32) -> Result<f64> {
    check_prime(p)?;
    let Some(r) = n.min(m).checked_sub(corank) else {
        return Ok(0.0);
    };
    let pf = p as f64;
    let pw = |e: i64| pf.powf(e as f64);
    let (n, m, r) = (n as i64, m as i64, r as i64);
    let mut prob = pw(-(n - r) * (m - r));
    for i in 0..r {
        prob *= (1.0 - pw(i - n)) * (1.0 - pw(i - m)) / (1.0 - pw(i - r));
    }
    Ok(prob)
}

/// `∏_{j=2}^{n} (1 - p^{-j}) · (1 - p^{-n-1})`.
pub fn heuristic_surjective_mod_p(n: u32, p: u64) -> Result<f64> {
    check_prime(p)?;
    let pf = p as f64;
    let head: f64 = (2..=n).map(|j| 1.0 - pf.powi(-(j as i32))).product();
    Ok(head * (1.0 - pf.powi(-(n as i32) - 1)))
}

/// `Σ_{B : |B| <= max_order} |B|^{-u} |Aut(B)|^{-1}`, without the zeta factor.
pub fn group_weight_sum(max_order: u64, u: u32) -> f64 {
    let mut s = Sum::default();
    for n in 1..=max_order {
        for g in crate::groups::groups_of_order(n) {
            s.add(group_weight(&g, u));
        }
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zeta_values() {
        let z2 = zeta(2, 1e-12).unwrap();
        assert!(close(z2.value, PI * PI / 6.0, 1e-12));
        assert!(z2.abs_error_bound <= 1e-12);
        let z4 = zeta(4, 1e-13).unwrap();
        assert!(close(z4.value, PI.powi(4) / 90.0, 1e-13));
        assert!(close(zeta(60, 1e-12).unwrap().value, 1.0, 1e-12));
        assert!(zeta(2, 0.0).is_err());
        assert!(zeta(1, 1e-6).is_err());
    }

    #[test]
    fn zeta_matches_slow_direct_sum() {
        // direct sum to 2·10^6 with the crude bound N^{1-k}/(k-1)
        for k in [3u32, 5, 7] {
            let n = 2_000_000u64;
            let mut s = Sum::default();
            for i in (1..=n).rev() {
                s.add((i as f64).powi(-(k as i32)));
            }
            let tail = (n as f64).powf(1.0 - k as f64) / (k as f64 - 1.0);
            let z = zeta(k, 1e-13).unwrap();
            let slack = z.abs_error_bound + 1e-15;
            assert!(z.value >= s.value() - slack && z.value <= s.value() + tail + slack);
        }
    }

    #[test]
    fn tail_product_values() {
        let v = zeta_tail_product(1, DEFAULT_TOL).unwrap();
        assert!(close(v.value, 0.4358, 5e-5), "{v}");
        assert!(v.abs_error_bound <= DEFAULT_TOL);
        assert_eq!(zeta_tail_product(0, DEFAULT_TOL).unwrap().value, 0.0);
        assert!(close(zeta_tail_product(100, 1e-12).unwrap().value, 1.0, 1e-12));
    }

    #[test]
    fn tail_product_increasing() {
        let mut prev = 0.0;
        for u in 1..40 {
            let v = zeta_tail_product(u, 1e-13).unwrap().value;
            assert!(v > prev && v <= 1.0, "u = {u}");
            prev = v;
        }
    }

    #[test]
    fn euler_product_s2_is_totient_constant() {
        // ∏_p (1 + 1/(p(p-1))) = ζ(2)ζ(3)/ζ(6)
        let z = |k| zeta(k, 1e-13).unwrap().value;
        let expected = z(2) * z(3) / z(6);
        let v = euler_product(2, 1e-12);
        assert!(close(v.value, expected, 1e-12), "{} vs {expected}", v.value);
        assert!(close(v.value, 1.943_596_436_820_759, 1e-12));
    }

    #[test]
    fn euler_product_s3_matches_long_direct_product() {
        // local factor minus one is at most 2/p^3, so the tail past P is
        // at most exp(1/P^2) - 1
        let cutoff = 2_000_000u64;
        let mut log = Sum::default();
        for p in primes_up_to(cutoff) {
            let t = 1.0 / p as f64;
            log.add((t.powi(3) / (1.0 - t)).ln_1p());
        }
        let direct = log.value().exp();
        let bound = 1.0 / (cutoff as f64).powi(2) * 2.0;
        let v = euler_product(3, 1e-12);
        assert!(v.value >= direct - 1e-14 && v.value <= direct + bound, "{} {direct}", v.value);
    }

    #[test]
    fn doubling_cutoff_within_bound() {
        for s in [2u32, 3, 4, 7] {
            for cutoff in [100u64, 1000, 10_000] {
                let a = euler_product_with_cutoff(s, cutoff);
                let b = euler_product_with_cutoff(s, 2 * cutoff);
                assert!((a.value - b.value).abs() < a.abs_error_bound.max(b.abs_error_bound));
            }
        }
        for u in 1..6 {
            let a = zeta_tail_product(u, 1e-8).unwrap();
            let b = zeta_tail_product(u, 1e-12).unwrap();
            assert!((a.value - b.value).abs() < a.abs_error_bound);
        }
    }

    #[test]
    fn cohen_lenstra_masses() {
        let triv = FiniteAbelianGroup::trivial();
        let base = cohen_lenstra_prob(&triv, 1, DEFAULT_TOL).unwrap();
        assert!(close(base.value, 0.4358, 5e-5));
        let z2 = cohen_lenstra_prob(&FiniteAbelianGroup::cyclic(2), 1, DEFAULT_TOL).unwrap();
        assert!(close(z2.value, base.value / 2.0, 1e-15));
        let zero = cohen_lenstra_prob(&triv, 0, DEFAULT_TOL).unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.degenerate);
    }

    #[test]
    fn cohen_lenstra_sums_to_one() {
        let mass = group_weight_sum(10_000, 1) * zeta_tail_product(1, DEFAULT_TOL).unwrap().value;
        assert!(mass >= 0.99 && mass <= 1.0, "{mass}");
    }

    #[test]
    fn squarefree_matches_sum_over_cyclic_groups() {
        let n = 10_000u64;
        let mut s = Sum::default();
        for m in 1..=n {
            if crate::groups::factor::is_squarefree(&BigUint::from(m)) {
                s.add(group_weight(&FiniteAbelianGroup::cyclic(m), 1));
            }
        }
        let v = squarefree_det_prob(1, DEFAULT_TOL).unwrap();
        let partial = s.value() * zeta_tail_product(1, DEFAULT_TOL).unwrap().value;
        assert!(partial <= v.value && v.value - partial < 1e-3, "{} {partial}", v.value);
        assert!(v.value > 0.0 && v.value < 1.0);
        assert!(close(squarefree_det_prob(100, 1e-10).unwrap().value, 1.0, 1e-9));
    }

    #[test]
    fn cyclic_probabilities() {
        let c0 = cyclic_prob(0, DEFAULT_TOL).unwrap();
        let c1 = cyclic_prob(1, DEFAULT_TOL).unwrap();
        assert!(c0.value > 0.0 && c0.value < 1.0);
        assert!(c1.value > 0.4358 && c1.value < 1.0);
        assert!(close(cyclic_prob(100, 1e-10).unwrap().value, 1.0, 1e-9));
        for u in 1..10 {
            assert!(cyclic_prob(u, 1e-10).unwrap().value >= zeta_tail_product(u, 1e-10).unwrap().value);
        }
        let sc = sandpile_cyclic_prob(DEFAULT_TOL).unwrap();
        assert!(close(sc.value, c1.value, 1e-14));
        assert!(sc.abs_error_bound <= DEFAULT_TOL);
        // cyclic at u = 0 and squarefree at u = 1 share the same formula
        assert!(close(c0.value, squarefree_det_prob(1, DEFAULT_TOL).unwrap().value, 1e-14));
    }

    #[test]
    fn sandpile_masses() {
        let t = sandpile_prob(&FiniteAbelianGroup::trivial(), DEFAULT_TOL).unwrap().value;
        assert!(close(t, 0.4358, 5e-5));
        let z2 = sandpile_prob(&FiniteAbelianGroup::cyclic(2), DEFAULT_TOL).unwrap().value;
        assert!(close(z2, t / 2.0, 1e-15));
        let z3 = sandpile_prob(&FiniteAbelianGroup::cyclic(3), DEFAULT_TOL).unwrap().value;
        assert!(close(z3, t / 6.0, 1e-15));
        for g in crate::groups::groups_of_order(72) {
            let a = sandpile_prob(&g, 1e-12).unwrap().value;
            let b = cohen_lenstra_prob(&g, 1, 1e-12).unwrap().value;
            assert!(close(a, b, 1e-12));
        }
    }

    #[test]
    fn prodcyc() {
        let triv = FiniteAbelianGroup::trivial();
        let a = prodcyc_prob(&triv, 2, DEFAULT_TOL).unwrap();
        assert!(close(a.value, cyclic_prob(0, DEFAULT_TOL).unwrap().value, 1e-13));
        let z2 = FiniteAbelianGroup::cyclic(2);
        let b = prodcyc_prob(&z2, 3, DEFAULT_TOL).unwrap();
        // the 2-part is exactly Z/2 and everything else cyclic
        let c = cyclic_prob(0, DEFAULT_TOL).unwrap().value;
        let expected = c * 0.5 / (1.0 + 0.5);
        assert!(close(b.value, expected, 1e-13), "{} {expected}", b.value);
        assert!(prodcyc_prob(&z2, 2, DEFAULT_TOL).is_err());
    }

    #[test]
    fn sylow_restricted() {
        let triv = FiniteAbelianGroup::trivial();
        let a = sylow_restricted_prob(&triv, 1, &[2], 1e-12).unwrap();
        let mut direct = 1.0;
        for k in 1..200 {
            direct *= 1.0 - 2f64.powi(-k - 1);
        }
        assert!(close(a.value, direct, 1e-12));
        let b = sylow_restricted_prob(&FiniteAbelianGroup::cyclic(2), 1, &[2], 1e-12).unwrap();
        assert!(close(b.value, a.value / 2.0, 1e-15));
        assert!(sylow_restricted_prob(&FiniteAbelianGroup::cyclic(6), 1, &[2], 1e-12).is_err());
        assert!(sylow_restricted_prob(&triv, 1, &[4], 1e-12).is_err());
    }

    #[test]
    fn finite_products() {
        assert_eq!(uniform_fullrank_prob(1, 0, 2).unwrap(), 0.5);
        assert_eq!(uniform_fullrank_prob(2, 0, 2).unwrap(), 0.375);
        let direct: f64 = (1..=30).map(|j| 1.0 - 5f64.powi(-(j + 1))).product();
        assert_eq!(uniform_fullrank_prob(30, 1, 5).unwrap(), direct);
        assert_eq!(heuristic_surjective_mod_p(1, 2).unwrap(), 0.75);
        assert_eq!(heuristic_surjective_mod_p(2, 2).unwrap(), 0.75 * 0.875);
        let h = heuristic_surjective_mod_p(50, 3).unwrap();
        let direct: f64 = (2..=50).map(|j| 1.0 - 3f64.powi(-j)).product::<f64>() * (1.0 - 3f64.powi(-51));
        assert_eq!(h, direct);
        assert!(uniform_fullrank_prob(3, 0, 6).is_err());
    }

    #[test]
    fn corank_law() {
        for (n, m, p) in [(30u32, 30u32, 5u64), (10, 13, 2), (4, 3, 7)] {
            let total: f64 = (0..=n.min(m)).map(|c| uniform_corank_prob(n, m, p, c).unwrap()).sum();
            assert!(close(total, 1.0, 1e-12));
            let full = uniform_fullrank_prob(n.min(m), n.max(m) - n.min(m), p).unwrap();
            assert!(close(uniform_corank_prob(n, m, p, 0).unwrap(), full, 1e-14));
        }
        assert_eq!(uniform_corank_prob(3, 3, 2, 4).unwrap(), 0.0);
        // every matrix over F_p in a few tiny shapes
        use crate::linalg::{rank_mod_p, IntMatrix};
        for (n, m, p) in [(2usize, 3usize, 2u64), (2, 2, 3), (3, 2, 2)] {
            let size = n * m;
            let count = p.pow(size as u32);
            let mut by_rank = vec![0u64; n.min(m) + 1];
            for code in 0..count {
                let entries: Vec<i64> =
                    (0..size).map(|k| (code / p.pow(k as u32) % p) as i64).collect();
                let mat = IntMatrix::from_i64(n, m, entries).unwrap();
                by_rank[rank_mod_p(&mat, &BigUint::from(p)).unwrap()] += 1;
            }
            for (r, &hits) in by_rank.iter().enumerate() {
                let c = (n.min(m) - r) as u32;
                let f = uniform_corank_prob(n as u32, m as u32, p, c).unwrap();
                assert!(close(f, hits as f64 / count as f64, 1e-14), "{n}x{m} mod {p} rank {r}");
            }
        }
    }

    #[test]
    fn mobius_values() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u32 + 1), e);
        }
    }
}
