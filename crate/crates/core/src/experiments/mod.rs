//! Seeded Monte-Carlo runs comparing cokernel and sandpile statistics with
//! their limiting values.
//!
//! Trial `i` of a run draws from stream `i` of the spec's seed, and trials
//! are grouped into batches of [`BATCH`] that are tallied independently and
//! merged by addition. Counts therefore do not depend on the thread count.

mod output;
mod spec;
mod stats;

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{
    cohen_lenstra_prob, cyclic_prob, prodcyc_prob, sandpile_cyclic_prob, sandpile_prob,
    squarefree_det_prob, sylow_restricted_prob, uniform_corank_prob, TolerancedReal, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::groups::factor::{is_squarefree, primes_up_to};
use crate::groups::{in_b_times_cyclic, FiniteAbelianGroup, SurjectionCounter, DEFAULT_SUBGROUP_BOUND};
use crate::linalg::{cokernel, rank_mod_p, Cokernel};
use crate::sampling::{digraph_laplacian, sample_digraph, sample_matrix, total_sandpile, EntryDistribution, Rng};

pub use output::{csv_string, render_report, result_file_stem, write_result_files, CsvRow};
pub use spec::{ExperimentKind, ExperimentSpec, Targets, MAX_ENTRIES};
pub use stats::{wilson_interval, Check, Verdict};

/// Trials per batch.
pub const BATCH: u64 = 64;

/// Rows reported by corank-mod-p; larger coranks go to the other bucket.
pub const MAX_REPORTED_CORANK: usize = 3;

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Target(usize),
    Other,
    Infinite,
}

/// Index of the target isomorphic to a finite cokernel.
pub fn classify_cokernel(c: &Cokernel, targets: &[FiniteAbelianGroup]) -> Label {
    if c.free_rank > 0 {
        return Label::Infinite;
    }
    match targets.iter().position(|g| *g == c.torsion) {
        Some(i) => Label::Target(i),
        None => Label::Other,
    }
}

/// One target of a finished run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetRow {
    pub target: String,
    pub count: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub theory: Option<f64>,
    pub theory_err: Option<f64>,
    pub z: Option<f64>,
    pub check: Check,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<TargetRow>,
    pub other: u64,
    pub infinite: u64,
    /// corank-mod-p: trials per corank `0..=min(n, n+u)`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histogram: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

impl ExperimentResult {
    pub fn flagged(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Flag)
    }
}

/// One line of the comparison report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub target: String,
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub theory: Option<f64>,
    pub z: Option<f64>,
    pub verdict: Verdict,
}

/// Theory value, estimate, interval, z-score and verdict for every target.
pub fn compare_to_theory(result: &ExperimentResult) -> Vec<Comparison> {
    result
        .rows
        .iter()
        .map(|r| Comparison {
            target: r.target.clone(),
            estimate: r.estimate,
            lo: r.lo,
            hi: r.hi,
            theory: r.theory,
            z: r.z,
            verdict: stats::judge(r.check, r.estimate, r.lo, r.hi, r.theory, r.theory_err.unwrap_or(0.0), r.trials),
        })
        .collect()
}

enum Outcome {
    Label(Label),
    Moment { sur: BigUint, infinite: bool },
    Corank(usize),
}

#[derive(Clone, Debug)]
struct Tally {
    hits: Vec<u64>,
    other: u64,
    infinite: u64,
    sum: BigUint,
    sum_sq: BigUint,
    histogram: Vec<u64>,
}

impl Tally {
    fn new(rows: usize, histogram: usize) -> Self {
        Tally {
            hits: vec![0; rows],
            other: 0,
            infinite: 0,
            sum: BigUint::zero(),
            sum_sq: BigUint::zero(),
            histogram: vec![0; histogram],
        }
    }

    fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Label(Label::Target(i)) => self.hits[i] += 1,
            Outcome::Label(Label::Other) => self.other += 1,
            Outcome::Label(Label::Infinite) => self.infinite += 1,
            Outcome::Moment { sur, infinite } => {
                if !sur.is_zero() {
                    self.hits[0] += 1;
                } else if infinite {
                    self.infinite += 1;
                } else {
                    self.other += 1;
                }
                self.sum_sq += &sur * &sur;
                self.sum += sur;
            }
            Outcome::Corank(c) => {
                self.histogram[c] += 1;
                match self.hits.get_mut(c) {
                    Some(h) => *h += 1,
                    None => self.other += 1,
                }
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self.other += other.other;
        self.infinite += other.infinite;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }
}

/// Everything a trial needs, built once per run and shared read-only.
struct Plan {
    kind: ExperimentKind,
    n: usize,
    cols: usize,
    dist: Option<EntryDistribution>,
    q: Option<BigRational>,
    groups: Vec<FiniteAbelianGroup>,
    primes: Vec<BigUint>,
    k0_primes: Option<(Vec<u64>, Vec<BigUint>)>,
    counter: Option<SurjectionCounter>,
    normal: Vec<u64>,
    rows: usize,
}

impl Plan {
    fn new(spec: &ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let kind = spec.kind;
        let dist = match &spec.distribution {
            Some(d) if !kind.is_sandpile() => Some(d.build(spec.n as u64)?),
            _ => None,
        };
        let groups = match kind {
            ExperimentKind::Surjectivity => vec![FiniteAbelianGroup::trivial()],
            _ => spec.targets.groups.clone(),
        };
        let k0_primes = spec.targets.k0.map(|k0| {
            let small = primes_up_to(k0 - 1);
            let big = small.iter().map(|&p| BigUint::from(p)).collect();
            (small, big)
        });
        let counter = match (&spec.targets.group, kind) {
            (Some(g), ExperimentKind::Moment) => Some(SurjectionCounter::new(g, DEFAULT_SUBGROUP_BOUND)?),
            _ => None,
        };
        let mut normal = Vec::new();
        if kind == ExperimentKind::OdlyzkoSanity {
            let p = spec.targets.primes[0] as i128;
            normal = match &spec.targets.normal {
                Some(c) => c.iter().map(|&x| (x as i128).rem_euclid(p) as u64).collect(),
                None => (0..spec.n).map(|i| (i == 0) as u64).collect(),
            };
        }
        let rows = match kind {
            ExperimentKind::CokernelDist | ExperimentKind::SylowDist | ExperimentKind::Sandpile => groups.len(),
            ExperimentKind::CorankModP => spec.n.min(spec.cols()).min(MAX_REPORTED_CORANK) + 1,
            _ => 1,
        };
        Ok(Plan {
            kind,
            n: spec.n,
            cols: spec.cols(),
            dist,
            q: spec.q.as_ref().map(|q| q.0.clone()),
            groups,
            primes: spec.prime_set(),
            k0_primes,
            counter,
            normal,
            rows,
        })
    }

    fn histogram_len(&self) -> usize {
        if self.kind == ExperimentKind::CorankModP {
            self.n.min(self.cols) + 1
        } else {
            0
        }
    }

    fn dist(&self) -> &EntryDistribution {
        self.dist.as_ref().expect("matrix kinds carry a distribution")
    }

    fn classify(&self, c: &Cokernel) -> Outcome {
        use ExperimentKind::*;
        let label = |hit: bool| {
            if hit {
                Label::Target(0)
            } else if c.free_rank > 0 {
                Label::Infinite
            } else {
                Label::Other
            }
        };
        Outcome::Label(match self.kind {
            CokernelDist if self.k0_primes.is_some() => {
                let (small, big) = self.k0_primes.as_ref().unwrap();
                if c.free_rank > 0 {
                    Label::Infinite
                } else {
                    match self.groups.iter().position(|b| in_b_times_cyclic(&c.torsion, b, small, big)) {
                        Some(i) => Label::Target(i),
                        None => Label::Other,
                    }
                }
            }
            CokernelDist | Surjectivity | Sandpile => classify_cokernel(c, &self.groups),
            Cyclic | SandpileCyclic => label(c.is_cyclic()),
            SquarefreeDet => label(c.free_rank == 0 && c.torsion.is_cyclic() && is_squarefree(&c.torsion.order())),
            SylowDist => {
                if c.free_rank > 0 {
                    Label::Infinite
                } else {
                    let part = c.torsion.sylow(&self.primes);
                    match self.groups.iter().position(|g| *g == part) {
                        Some(i) => Label::Target(i),
                        None => Label::Other,
                    }
                }
            }
            Moment => {
                let counter = self.counter.as_ref().expect("moment runs carry a counter");
                return Outcome::Moment { sur: counter.count(c.free_rank, &c.torsion), infinite: c.free_rank > 0 };
            }
            CorankModP | OdlyzkoSanity => unreachable!("not a cokernel statistic"),
        })
    }

    fn trial(&self, seed: u64, index: u64) -> Result<Outcome> {
        let mut rng = Rng::new(seed, index);
        match self.kind {
            ExperimentKind::Sandpile | ExperimentKind::SandpileCyclic => {
                let q = self.q.as_ref().expect("sandpile kinds carry q");
                let g = sample_digraph(self.n, q, &mut rng)?;
                Ok(self.classify(&total_sandpile(&digraph_laplacian(&g))?))
            }
            ExperimentKind::OdlyzkoSanity => {
                let p = self.primes[0].to_u64().expect("validated prime") as u128;
                let d = self.dist();
                let mut acc = 0u128;
                for &c in &self.normal {
                    let x = (d.sample(&mut rng) as i128).rem_euclid(p as i128) as u128;
                    acc = (acc + c as u128 * x) % p;
                }
                Ok(Outcome::Label(if acc == 0 { Label::Target(0) } else { Label::Other }))
            }
            ExperimentKind::CorankModP => {
                let m = sample_matrix(self.n, self.cols, self.dist(), &mut rng);
                Ok(Outcome::Corank(self.n.min(self.cols) - rank_mod_p(&m, &self.primes[0])?))
            }
            _ => {
                let m = sample_matrix(self.n, self.cols, self.dist(), &mut rng);
                Ok(self.classify(&cokernel(&m)))
            }
        }
    }
}

fn tally(plan: &Plan, spec: &ExperimentSpec, threads: usize) -> Result<Tally> {
    if threads == 0 {
        return Err(Error::BadArgument("threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::BadArgument(format!("thread pool: {e}")))?;
    let batches = spec.trials.div_ceil(BATCH);
    let empty = || Tally::new(plan.rows, plan.histogram_len());
    pool.install(|| {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut t = empty();
                for i in b * BATCH..((b + 1) * BATCH).min(spec.trials) {
                    t.add(plan.trial(spec.seed, i)?);
                }
                Ok(t)
            })
            .try_reduce(empty, |a, b| Ok(a.merge(b)))
    })
}

type Theory = Option<(f64, f64)>;

fn toleranced(t: TolerancedReal) -> Theory {
    Some((t.value, t.abs_error_bound))
}

/// Row labels and theory values, in row order.
fn theory(plan: &Plan, spec: &ExperimentSpec) -> Result<Vec<(String, Theory)>> {
    use ExperimentKind::*;
    let u = spec.u as u32;
    let tol = DEFAULT_TOL;
    Ok(match spec.kind {
        CokernelDist => {
            let mut rows = Vec::new();
            for g in &plan.groups {
                rows.push(match spec.targets.k0 {
                    Some(k0) => (format!("{g} x cyclic(p >= {k0})"), toleranced(prodcyc_prob(g, k0, tol)?)),
                    None => (g.to_string(), toleranced(cohen_lenstra_prob(g, u, tol)?)),
                });
            }
            rows
        }
        Surjectivity => vec![("surjective".into(), toleranced(cohen_lenstra_prob(&plan.groups[0], u, tol)?))],
        Cyclic => vec![("cyclic".into(), toleranced(cyclic_prob(u, tol)?))],
        SquarefreeDet => {
            let t = if u == 0 { None } else { toleranced(squarefree_det_prob(u, tol)?) };
            vec![("squarefree".into(), t)]
        }
        SylowDist => {
            let mut rows = Vec::new();
            for g in &plan.groups {
                let t = sylow_restricted_prob(g, u, &spec.targets.primes, tol)?;
                rows.push((format!("{g} at {:?}", spec.targets.primes), toleranced(t)));
            }
            rows
        }
        Moment => {
            let g = spec.targets.group.as_ref().expect("validated");
            let value = BigRational::new(BigInt::one(), BigInt::from(g.order().pow(u))).to_f64().unwrap_or(0.0);
            vec![(format!("E #Sur(cok, {g})"), Some((value, value * EPS)))]
        }
        CorankModP => {
            let p = spec.targets.primes[0];
            let mut rows = Vec::new();
            for c in 0..plan.rows {
                let v = uniform_corank_prob(spec.n as u32, spec.cols() as u32, p, c as u32)?;
                rows.push((format!("corank {c} mod {p}"), Some((v, v * 8.0 * spec.n as f64 * EPS))));
            }
            rows
        }
        Sandpile => {
            let mut rows = Vec::new();
            for g in &plan.groups {
                rows.push((g.to_string(), toleranced(sandpile_prob(g, tol)?)));
            }
            rows
        }
        SandpileCyclic => vec![("cyclic".into(), toleranced(sandpile_cyclic_prob(tol)?))],
        OdlyzkoSanity => {
            let alpha = plan.dist().balance_parameter();
            let bound = (BigRational::one() - alpha).to_f64().unwrap_or(1.0);
            let p = spec.targets.primes[0];
            vec![(format!("X in V mod {p}"), Some((bound, 2.0 * EPS)))]
        }
    })
}

/// [`run_with_threads`] on one thread.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    run_with_threads(spec, 1)
}

pub fn run_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentResult> {
    let start = Instant::now();
    let plan = Plan::new(spec)?;
    let labels = theory(&plan, spec)?;
    let t = tally(&plan, spec, threads)?;
    let trials = spec.trials;
    let check = match (spec.kind, spec.tolerance) {
        (ExperimentKind::OdlyzkoSanity, _) => Check::UpperBound { sigmas: 4.0 },
        (_, Some(tolerance)) => Check::Tolerance { tolerance },
        (_, None) => Check::Interval,
    };
    let mut rows = Vec::with_capacity(labels.len());
    for (i, (target, th)) in labels.into_iter().enumerate() {
        let count = t.hits[i];
        let (estimate, lo, hi) = if spec.kind == ExperimentKind::Moment {
            let (mean, var) = moments(&t.sum, &t.sum_sq, trials);
            let (lo, hi) = stats::mean_interval(mean, var, trials, spec.z);
            (mean, lo, hi)
        } else {
            let (lo, hi) = wilson_interval(count, trials, spec.z)?;
            (count as f64 / trials as f64, lo, hi)
        };
        let theory = th.map(|x| x.0);
        let theory_err = th.map(|x| x.1);
        let z = theory.and_then(|v| stats::z_score(estimate, v, lo, hi, spec.z));
        let verdict = stats::judge(check, estimate, lo, hi, theory, theory_err.unwrap_or(0.0), trials);
        rows.push(TargetRow { target, count, trials, estimate, lo, hi, theory, theory_err, z, check, verdict });
    }
    debug_assert_eq!(t.hits.iter().sum::<u64>() + t.other + t.infinite, trials);
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        other: t.other,
        infinite: t.infinite,
        histogram: t.histogram,
        wall_time_secs: Some(start.elapsed().as_secs_f64()),
    })
}

/// Sample mean and unbiased variance from exact sums.
fn moments(sum: &BigUint, sum_sq: &BigUint, trials: u64) -> (f64, f64) {
    let n = BigInt::from(trials);
    let s = BigInt::from(sum.clone());
    let mean = BigRational::new(s.clone(), n.clone()).to_f64().unwrap_or(f64::INFINITY);
    if trials < 2 {
        return (mean, 0.0);
    }
    let num = &n * BigInt::from(sum_sq.clone()) - &s * &s;
    let var = BigRational::new(num, &n * (&n - 1)).to_f64().unwrap_or(f64::INFINITY);
    (mean, var)
}

/// Mean of `#Sur(cok(M), g)` over the spec's trials.
pub fn moment_estimate(spec: &ExperimentSpec, g: &FiniteAbelianGroup) -> Result<f64> {
    let mut s = spec.clone();
    s.kind = ExperimentKind::Moment;
    s.targets = Targets { group: Some(g.clone()), ..Targets::default() };
    Ok(run(&s)?.rows[0].estimate)
}

/// Empirical law of `min(n, n+u) - rank_p(M)`, indexed by corank.
pub fn corank_mod_p_estimate(spec: &ExperimentSpec, p: u64) -> Result<Vec<f64>> {
    let mut s = spec.clone();
    s.kind = ExperimentKind::CorankModP;
    s.targets = Targets { primes: vec![p], ..Targets::default() };
    let r = run(&s)?;
    Ok(r.histogram.iter().map(|&h| h as f64 / s.trials as f64).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdlyzkoReport {
    pub prime: u64,
    pub alpha: f64,
    pub estimate: f64,
    /// `1 - alpha`.
    pub bound: f64,
    pub sigma: f64,
    pub pass: bool,
}

/// Frequency of `c · X ≡ 0 (mod p)` for a column `X` against the bound
/// `1 - alpha` for a codimension-one subspace.
pub fn odlyzko_sanity(spec: &ExperimentSpec) -> Result<OdlyzkoReport> {
    let mut s = spec.clone();
    s.kind = ExperimentKind::OdlyzkoSanity;
    let r = run(&s)?;
    let row = &r.rows[0];
    let bound = row.theory.expect("odlyzko rows carry a bound");
    let alpha = s.distribution.as_ref().expect("validated").build(s.n as u64)?.balance();
    Ok(OdlyzkoReport {
        prime: s.targets.primes[0],
        alpha,
        estimate: row.estimate,
        bound,
        sigma: (bound * (1.0 - bound) / s.trials as f64).sqrt(),
        pass: row.verdict == Verdict::Pass,
    })
}
