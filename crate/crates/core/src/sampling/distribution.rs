use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rng::Rng;
use crate::error::{Error, Result};
use crate::groups::factor::prime_divisors;

/// Largest support accepted by [`EntryDistribution::new`].
pub const MAX_SUPPORT: usize = 4096;

/// A finite-support law on the integers with exact rational masses.
///
/// Sampling compares one 64-bit draw against the cumulative thresholds
/// `floor(F_i · 2^64)`, so each mass is reproduced up to `2^-64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntryDistribution {
    support: Vec<i64>,
    probs: Vec<BigRational>,
    thresholds: Vec<u64>,
}

impl EntryDistribution {
    /// Points with zero mass are dropped; masses must be nonnegative and sum
    /// to exactly one.
    pub fn new(support: Vec<i64>, probs: Vec<BigRational>) -> Result<Self> {
        if support.len() > MAX_SUPPORT {
            return Err(Error::BadParams(format!(
                "support has {} points, at most {MAX_SUPPORT} are allowed",
                support.len()
            )));
        }
        if support.len() != probs.len() {
            return Err(Error::BadParams(format!(
                "{} support values but {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        let mut seen = support.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadParams("support values must be distinct".into()));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative() || *p > &BigRational::one()) {
            return Err(Error::BadParams(format!("probability {p} outside [0, 1]")));
        }
        let total: BigRational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::BadParams(format!("probabilities sum to {total}, not 1")));
        }
        let (support, probs): (Vec<i64>, Vec<BigRational>) = support
            .into_iter()
            .zip(probs)
            .filter(|(_, p)| !p.is_zero())
            .unzip();
        let scale = BigRational::from_integer(BigInt::one() << 64u32);
        let mut cum = BigRational::zero();
        let mut thresholds = Vec::with_capacity(probs.len().saturating_sub(1));
        for p in &probs[..probs.len() - 1] {
            cum += p;
            let t = (&cum * &scale).floor().to_integer();
            thresholds.push(t.to_u64().unwrap_or(u64::MAX));
        }
        Ok(EntryDistribution { support, probs, thresholds })
    }

    pub fn point_mass(value: i64) -> Self {
        Self::new(vec![value], vec![BigRational::one()]).unwrap()
    }

    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.probs
    }

    /// `max |x|` over the support.
    pub fn entry_bound(&self) -> u64 {
        self.support.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    #[inline]
    pub fn sample(&self, rng: &mut Rng) -> i64 {
        if self.thresholds.is_empty() {
            // one draw per entry, even for a point mass
            rng.next_u64();
            return self.support[0];
        }
        let x = rng.next_u64();
        let i = self.thresholds.partition_point(|&t| t <= x);
        self.support[i]
    }

    /// Largest mass of a residue class mod `p`.
    pub fn max_class_mass(&self, p: u64) -> BigRational {
        let mut classes: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (x, w) in self.support.iter().zip(&self.probs) {
            let r = (*x as i128).rem_euclid(p as i128) as u64;
            *classes.entry(r).or_insert_with(BigRational::zero) += w;
        }
        classes.into_values().max().unwrap_or_else(BigRational::zero)
    }

    /// Primes at which two support points share a residue class.
    pub fn merging_primes(&self) -> Vec<u64> {
        let mut diffs = Vec::new();
        for (i, a) in self.support.iter().enumerate() {
            for b in &self.support[i + 1..] {
                diffs.push((*a as i128 - *b as i128).unsigned_abs());
            }
        }
        diffs.sort_unstable();
        diffs.dedup();
        let mut primes = Vec::new();
        for d in diffs {
            for p in prime_divisors(&BigUint::from(d)) {
                primes.push(p.to_u64().expect("difference of i64 values fits u64"));
            }
        }
        primes.sort_unstable();
        primes.dedup();
        primes
    }

    /// The balance `α = 1 - max_p max_r P(ξ ≡ r mod p)`, exactly.
    ///
    /// Only primes dividing a difference of support points can merge two
    /// points into one class; for every other prime the worst class is the
    /// heaviest single point.
    pub fn balance_parameter(&self) -> BigRational {
        let mut worst = self.probs.iter().max().cloned().unwrap_or_else(BigRational::one);
        for p in self.merging_primes() {
            worst = worst.max(self.max_class_mass(p));
        }
        BigRational::one() - worst
    }

    pub fn balance(&self) -> f64 {
        self.balance_parameter().to_f64().unwrap_or(0.0)
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .support
            .iter()
            .zip(&self.probs)
            .map(|(x, p)| format!("{x}: {p}"))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Exact rational from `"a/b"`, an integer or a plain decimal like `0.01`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::BadParams(format!("cannot read {s:?} as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !int.bytes().all(|b| b.is_ascii_digit())
        || !frac.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int}{frac}").parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(digits, denom);
    Ok(if neg { -r } else { r })
}

/// A rational parameter that reads from JSON strings or numbers and writes
/// back as a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("expected a rational, got {other}"))),
        };
        parse_rational(&text).map(Rational).map_err(serde::de::Error::custom)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn check_unit(name: &str, p: &BigRational) -> Result<()> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(Error::BadParams(format!("{name} = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// `P(1) = q`, `P(0) = 1 - q`.
pub fn bernoulli(q: &BigRational) -> Result<EntryDistribution> {
    check_unit("q", q)?;
    EntryDistribution::new(vec![0, 1], vec![BigRational::one() - q, q.clone()])
}

/// Uniform on `a..=b`.
pub fn uniform_range(a: i64, b: i64) -> Result<EntryDistribution> {
    if a > b {
        return Err(Error::BadParams(format!("empty range {a}..={b}")));
    }
    let count = b as i128 - a as i128 + 1;
    if count > MAX_SUPPORT as i128 {
        return Err(Error::BadParams(format!("range {a}..={b} is too wide")));
    }
    EntryDistribution::new((a..=b).collect(), vec![ratio(1, count as i64); count as usize])
}

/// `P(0) = 1 - n^{-1+ε}`, `P(1) = n^{-1+ε}`, where the power is taken in
/// double precision and then held exactly.
pub fn sparse_bernoulli(n: u64, eps: f64) -> Result<EntryDistribution> {
    if n == 0 {
        return Err(Error::BadParams("sparse_bernoulli needs n >= 1".into()));
    }
    let q = (n as f64).powf(-1.0 + eps);
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::BadParams(format!("n^(-1+eps) = {q} is outside [0, 1]")));
    }
    let q = BigRational::from_float(q).ok_or_else(|| Error::BadParams("non-finite q".into()))?;
    bernoulli(&q)
}

/// `{-17, 0, 6, 7}` with masses `{2/3, 1/n, 1/6 - 1/n, 1/6}` (needs `n >= 6`).
pub fn paper_example(n: u64) -> Result<EntryDistribution> {
    if n < 6 {
        return Err(Error::BadParams(format!("paper_example needs n >= 6, got {n}")));
    }
    let inv = ratio(1, n as i64);
    EntryDistribution::new(
        vec![-17, 0, 6, 7],
        vec![ratio(2, 3), inv.clone(), ratio(1, 6) - inv, ratio(1, 6)],
    )
}

fn param<'a>(params: &'a serde_json::Map<String, serde_json::Value>, key: &str) -> Result<&'a serde_json::Value> {
    params
        .get(key)
        .ok_or_else(|| Error::BadParams(format!("missing parameter {key:?}")))
}

fn rational_param(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<BigRational> {
    let v = param(params, key)?;
    Rational::deserialize(v.clone())
        .map(|r| r.0)
        .map_err(|e| Error::BadParams(format!("{key}: {e}")))
}

fn int_param(params: &serde_json::Map<String, serde_json::Value>, key: &str) -> Result<i64> {
    param(params, key)?
        .as_i64()
        .ok_or_else(|| Error::BadParams(format!("{key} must be an integer")))
}

/// Builds one of the named families from JSON parameters. `n` falls back to
/// `default_n` for the families that take it.
pub fn named_distribution(
    kind: &str,
    params: &serde_json::Map<String, serde_json::Value>,
    default_n: u64,
) -> Result<EntryDistribution> {
    let n = match params.get("n") {
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::BadParams("n must be a nonnegative integer".into()))?,
        None => default_n,
    };
    match kind.replace('-', "_").as_str() {
        "bernoulli" => bernoulli(&rational_param(params, "q")?),
        "uniform_range" => uniform_range(int_param(params, "a")?, int_param(params, "b")?),
        "sparse_bernoulli" => {
            let eps = param(params, "eps")?
                .as_f64()
                .ok_or_else(|| Error::BadParams("eps must be a number".into()))?;
            sparse_bernoulli(n, eps)
        }
        "paper_example" => paper_example(n),
        other => Err(Error::BadParams(format!("unknown distribution kind {other:?}"))),
    }
}

/// JSON description of an entry law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistributionSpec {
    Named {
        kind: String,
        #[serde(default)]
        params: serde_json::Map<String, serde_json::Value>,
    },
    Explicit {
        support: Vec<i64>,
        probs: Vec<Rational>,
    },
}

impl DistributionSpec {
    pub fn named(kind: &str, params: serde_json::Value) -> Self {
        let params = match params {
            serde_json::Value::Object(m) => m,
            _ => serde_json::Map::new(),
        };
        DistributionSpec::Named { kind: kind.to_string(), params }
    }

    pub fn build(&self, default_n: u64) -> Result<EntryDistribution> {
        match self {
            DistributionSpec::Named { kind, params } => named_distribution(kind, params, default_n),
            DistributionSpec::Explicit { support, probs } => {
                EntryDistribution::new(support.clone(), probs.iter().map(|r| r.0.clone()).collect())
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Named { kind, params } => {
                let args: Vec<String> = params
                    .iter()
                    .map(|(k, v)| match v {
                        serde_json::Value::String(s) => format!("{k}={s}"),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                write!(f, "{kind}({})", args.join(","))
            }
            DistributionSpec::Explicit { support, probs } => {
                let parts: Vec<String> = support
                    .iter()
                    .zip(probs)
                    .map(|(x, p)| format!("{x}:{}", p.0))
                    .collect();
                write!(f, "{{{}}}", parts.join(" "))
            }
        }
    }
}
