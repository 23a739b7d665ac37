use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::BadArgument("wilson_interval needs trials >= 1".into()));
    }
    if successes > trials {
        return Err(Error::BadArgument(format!("{successes} successes out of {trials} trials")));
    }
    if !(z.is_finite() && z >= 0.0) {
        return Err(Error::BadArgument(format!("z = {z} must be finite and nonnegative")));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok((lo, hi))
}

/// Mean and symmetric normal interval from exact first and second sums.
pub(crate) fn mean_interval(mean: f64, variance: f64, trials: u64, z: f64) -> (f64, f64) {
    let se = (variance.max(0.0) / trials as f64).sqrt();
    (mean - z * se, mean + z * se)
}

/// How an estimate is judged against its theory value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Check {
    /// `|estimate - theory| <= tolerance`.
    Tolerance { tolerance: f64 },
    /// The theory value lies inside the interval, widened by its error bound.
    Interval,
    /// `estimate <= theory + sigmas · sqrt(theory (1 - theory) / trials)`.
    UpperBound { sigmas: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Flag,
    /// No theory value to compare with.
    Info,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Flag => "FLAG",
            Verdict::Info => "INFO",
        })
    }
}

/// `(estimate - theory) / se`, with `se` recovered from the interval width.
pub(crate) fn z_score(estimate: f64, theory: f64, lo: f64, hi: f64, z: f64) -> Option<f64> {
    let diff = estimate - theory;
    let se = if z > 0.0 { (hi - lo) / (2.0 * z) } else { 0.0 };
    if se > 0.0 {
        Some(diff / se)
    } else if diff == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

pub(crate) fn judge(
    check: Check,
    estimate: f64,
    lo: f64,
    hi: f64,
    theory: Option<f64>,
    theory_err: f64,
    trials: u64,
) -> Verdict {
    let Some(t) = theory else {
        return Verdict::Info;
    };
    let ok = match check {
        Check::Tolerance { tolerance } => (estimate - t).abs() <= tolerance,
        Check::Interval => lo - theory_err <= t && t <= hi + theory_err,
        Check::UpperBound { sigmas } => {
            let sigma = (t * (1.0 - t) / trials as f64).max(0.0).sqrt();
            estimate <= t + theory_err + sigmas * sigma
        }
    };
    if ok {
        Verdict::Pass
    } else {
        Verdict::Flag
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Wilson bounds are the roots of `(p - x)^2 = z^2 x (1 - x) / n`.
    fn is_root(p: f64, x: f64, n: f64, z: f64) -> bool {
        ((p - x).powi(2) - z * z * x * (1.0 - x) / n).abs() < 1e-12
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        assert!(is_root(0.0, hi, 100.0, 1.96));
        let (lo, hi) = wilson_interval(100, 100, 1.96).unwrap();
        assert_eq!(hi, 1.0);
        assert!(is_root(1.0, lo, 100.0, 1.96));
        let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((lo - 0.404).abs() < 1e-3 && (hi - 0.596).abs() < 1e-3, "{lo} {hi}");
        assert!(is_root(0.5, lo, 100.0, 1.96) && is_root(0.5, hi, 100.0, 1.96));
        assert!(wilson_interval(1, 0, 1.96).is_err());
        assert!(wilson_interval(5, 4, 1.96).is_err());
    }

    #[test]
    fn wilson_stays_in_unit_interval() {
        for n in [1u64, 2, 7, 1000] {
            for s in 0..=n.min(20) {
                for z in [0.0, 1.0, 1.96, 5.0] {
                    let (lo, hi) = wilson_interval(s, n, z).unwrap();
                    let p = s as f64 / n as f64;
                    assert!(0.0 <= lo && lo <= p + 1e-15 && p <= hi + 1e-15 && hi <= 1.0);
                }
            }
        }
    }

    #[test]
    fn verdicts() {
        let tol = Check::Tolerance { tolerance: 0.02 };
        assert_eq!(judge(tol, 0.45, 0.4, 0.5, Some(0.4358), 0.0, 100), Verdict::Pass);
        assert_eq!(judge(tol, 0.47, 0.4, 0.5, Some(0.4358), 0.0, 100), Verdict::Flag);
        assert_eq!(judge(Check::Interval, 0.5, 0.45, 0.55, Some(0.6), 0.0, 100), Verdict::Flag);
        assert_eq!(judge(Check::Interval, 0.5, 0.45, 0.55, Some(0.5), 0.0, 100), Verdict::Pass);
        assert_eq!(judge(Check::Interval, 0.5, 0.45, 0.55, None, 0.0, 100), Verdict::Info);
        let ub = Check::UpperBound { sigmas: 4.0 };
        assert_eq!(judge(ub, 1.0, 1.0, 1.0, Some(1.0), 0.0, 100), Verdict::Pass);
        assert_eq!(judge(ub, 0.69, 0.6, 0.7, Some(0.5), 0.0, 100), Verdict::Pass);
        assert_eq!(judge(ub, 0.71, 0.6, 0.8, Some(0.5), 0.0, 100), Verdict::Flag);
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(0.5, 0.5, 0.4, 0.6, 1.96), Some(0.0));
        assert_eq!(z_score(1.0, 1.0, 1.0, 1.0, 1.96), Some(0.0));
        assert_eq!(z_score(1.0, 0.5, 1.0, 1.0, 1.96), None);
        let z = z_score(0.6, 0.5, 0.5, 0.7, 2.0).unwrap();
        assert!((z - 2.0).abs() < 1e-12);
    }
}
