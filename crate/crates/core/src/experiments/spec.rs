use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::constants::MAX_K0;
use crate::error::{Error, Result};
use crate::groups::factor::is_prime_u64;
use crate::groups::{check_k0, FiniteAbelianGroup};
use crate::sampling::{DistributionSpec, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CokernelDist,
    Surjectivity,
    Cyclic,
    SquarefreeDet,
    SylowDist,
    Moment,
    CorankModP,
    Sandpile,
    SandpileCyclic,
    OdlyzkoSanity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::CokernelDist,
        ExperimentKind::Surjectivity,
        ExperimentKind::Cyclic,
        ExperimentKind::SquarefreeDet,
        ExperimentKind::SylowDist,
        ExperimentKind::Moment,
        ExperimentKind::CorankModP,
        ExperimentKind::Sandpile,
        ExperimentKind::SandpileCyclic,
        ExperimentKind::OdlyzkoSanity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::CokernelDist => "cokernel-dist",
            ExperimentKind::Surjectivity => "surjectivity",
            ExperimentKind::Cyclic => "cyclic",
            ExperimentKind::SquarefreeDet => "squarefree-det",
            ExperimentKind::SylowDist => "sylow-dist",
            ExperimentKind::Moment => "moment",
            ExperimentKind::CorankModP => "corank-mod-p",
            ExperimentKind::Sandpile => "sandpile",
            ExperimentKind::SandpileCyclic => "sandpile-cyclic",
            ExperimentKind::OdlyzkoSanity => "odlyzko-sanity",
        }
    }

    /// Kinds that sample a digraph rather than a matrix.
    pub fn is_sandpile(self) -> bool {
        matches!(self, ExperimentKind::Sandpile | ExperimentKind::SandpileCyclic)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a run classifies against. Which fields are needed depends on the
/// kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Targets {
    /// cokernel-dist, sylow-dist and sandpile: the groups to count.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<FiniteAbelianGroup>,
    /// sylow-dist: the prime set; corank-mod-p and odlyzko-sanity: one prime.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    /// moment: the group `G` in `E #Sur(cok, G)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<FiniteAbelianGroup>,
    /// odlyzko-sanity: normal vector of the hyperplane mod p (default `e_1`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal: Option<Vec<i64>>,
    /// cokernel-dist at `u = 0`: count `B x cyclic` classes instead of
    /// exact groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<u64>,
}

fn default_z() -> f64 {
    1.96
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    #[serde(default)]
    pub u: usize,
    pub trials: u64,
    pub seed: u64,
    /// Entry law for the matrix kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<DistributionSpec>,
    /// Edge probability for the sandpile kinds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rational>,
    #[serde(default)]
    pub targets: Targets,
    /// Absolute tolerance for PASS; without it the theory value must lie in
    /// the confidence interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default = "default_z")]
    pub z: f64,
}

/// Matrix sizes above this are refused.
pub const MAX_ENTRIES: usize = 1 << 22;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl ExperimentSpec {
    /// A spec with no targets, `u = 0` and default `z`.
    pub fn new(kind: ExperimentKind, n: usize, trials: u64, seed: u64) -> Self {
        ExperimentSpec {
            kind,
            n,
            u: 0,
            trials,
            seed,
            distribution: None,
            q: None,
            targets: Targets::default(),
            tolerance: None,
            z: default_z(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn cols(&self) -> usize {
        self.n + self.u
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(invalid(format!("z = {} must be positive", self.z)));
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(invalid(format!("tolerance = {t} must be finite and nonnegative")));
            }
        }
        if self.n.checked_mul(self.cols()).is_none_or(|e| e > MAX_ENTRIES) {
            return Err(invalid(format!("{} x {} is too large", self.n, self.cols())));
        }
        if kind.is_sandpile() {
            let q = self.q.as_ref().ok_or_else(|| invalid(format!("{kind} needs q")))?;
            if q.0.is_negative() || q.0 > BigRational::one() {
                return Err(invalid(format!("q = {} is outside [0, 1]", q.0)));
            }
            if self.distribution.is_some() {
                return Err(invalid(format!("{kind} takes q, not a distribution")));
            }
            if self.u != 0 {
                return Err(invalid(format!("{kind} has no offset u")));
            }
        } else {
            let d = self
                .distribution
                .as_ref()
                .ok_or_else(|| invalid(format!("{kind} needs a distribution")))?;
            d.build(self.n as u64)?;
            if self.q.is_some() {
                return Err(invalid(format!("{kind} takes a distribution, not q")));
            }
        }
        let t = &self.targets;
        if t.k0.is_some() && kind != ExperimentKind::CokernelDist {
            return Err(invalid("k0 is only used by cokernel-dist"));
        }
        if t.normal.is_some() && kind != ExperimentKind::OdlyzkoSanity {
            return Err(invalid("normal is only used by odlyzko-sanity"));
        }
        let need_groups = matches!(
            kind,
            ExperimentKind::CokernelDist | ExperimentKind::SylowDist | ExperimentKind::Sandpile
        );
        if need_groups {
            if t.groups.is_empty() {
                return Err(invalid(format!("{kind} needs targets.groups")));
            }
            let mut seen = t.groups.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != t.groups.len() {
                return Err(invalid("targets.groups has duplicates"));
            }
        }
        match kind {
            ExperimentKind::CokernelDist => {
                if let Some(k0) = t.k0 {
                    if self.u != 0 {
                        return Err(invalid("k0 classes are defined for square matrices (u = 0)"));
                    }
                    if k0 > MAX_K0 {
                        return Err(invalid(format!("k0 = {k0} exceeds {MAX_K0}")));
                    }
                    for b in &t.groups {
                        check_k0(b, k0)?;
                    }
                }
            }
            ExperimentKind::SylowDist => {
                if t.primes.is_empty() {
                    return Err(invalid("sylow-dist needs targets.primes"));
                }
                check_primes(&t.primes)?;
                let ps = self.prime_set();
                for g in &t.groups {
                    if g.sylow(&ps) != *g {
                        return Err(invalid(format!("{g} is not a group for the primes {:?}", t.primes)));
                    }
                }
            }
            ExperimentKind::Moment => {
                if t.group.is_none() {
                    return Err(invalid("moment needs targets.group"));
                }
            }
            ExperimentKind::CorankModP | ExperimentKind::OdlyzkoSanity => {
                if t.primes.len() != 1 {
                    return Err(invalid(format!("{kind} needs exactly one prime in targets.primes")));
                }
                check_primes(&t.primes)?;
                if let Some(c) = &t.normal {
                    let p = t.primes[0] as i128;
                    if c.len() != self.n {
                        return Err(invalid(format!("normal has {} entries, n = {}", c.len(), self.n)));
                    }
                    if c.iter().all(|&x| x as i128 % p == 0) {
                        return Err(invalid("normal vector vanishes mod p"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn prime_set(&self) -> Vec<BigUint> {
        self.targets.primes.iter().map(|&p| BigUint::from(p)).collect()
    }
}

fn check_primes(ps: &[u64]) -> Result<()> {
    match ps.iter().find(|&&p| !is_prime_u64(p)) {
        Some(p) => Err(Error::NonPrimeModulus(p.to_string())),
        None => Ok(()),
    }
}
