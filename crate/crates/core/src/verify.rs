//! Monte-Carlo suites for the ordering, CKW and invariant identities.
//!
//! Trial `t` of every suite draws from `RngStream::derive(seed, t)`, so the
//! reports are bit-identical however the work is split across threads.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::state_serde;
use crate::linalg::C64;
use crate::measures::{ckw_residual, kempe_by_pair, lu_invariants, measures_from_invariants, Measures};
use crate::rng::{sample_haar_state, RngStream};
use crate::tensor::{PureState, Qubit};

/// Ordering slack tolerance, relative to `n⁴`.
pub const ORDERING_TOL: f64 = 1e-10;
/// Bound on `|c²_{a|bc} − c²_{a|b} − c²_{a|c} − τ|`.
pub const CKW_TOL: f64 = 1e-8;
/// Native vs invariant-expressed squared measures, relative.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Spread of the Kempe invariant over the three pairings.
pub const KEMPE_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub trial: u64,
    #[serde(with = "state_serde")]
    pub state: PureState,
    pub value: f64,
}

/// Outcome of one named check inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckStats {
    /// What `worst` measures; violations are counted against `tolerance`.
    pub metric: String,
    pub tolerance: f64,
    pub violations: u64,
    pub worst: Option<WorstCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: u64,
    pub seed: u64,
    pub passed: bool,
    pub checks: BTreeMap<String, CheckStats>,
}

impl SuiteReport {
    /// Worst case of the first failing check, if any.
    pub fn failure(&self) -> Option<&WorstCase> {
        self.checks.values().find(|c| c.violations > 0).and_then(|c| c.worst.as_ref())
    }
}

/// One trial's contribution to a check: larger `badness` is worse.
#[derive(Debug, Clone, Copy)]
struct Probe {
    badness: f64,
    value: f64,
    violated: bool,
}

#[derive(Debug, Clone, Copy)]
struct Tally {
    violations: u64,
    /// `(badness, trial, value)` of the worst trial, ties to the lowest index.
    worst: Option<(f64, u64, f64)>,
}

impl Tally {
    const EMPTY: Tally = Tally { violations: 0, worst: None };

    fn push(mut self, trial: u64, p: Probe) -> Self {
        self.violations += p.violated as u64;
        self.merge(Tally { violations: 0, worst: Some((p.badness, trial, p.value)) })
    }

    fn merge(self, other: Self) -> Self {
        let worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => {
                let b_wins = b.0 > a.0 || (b.0 == a.0 && b.1 < a.1);
                Some(if b_wins { b } else { a })
            }
            (a, None) => a,
            (None, b) => b,
        };
        Tally { violations: self.violations + other.violations, worst }
    }
}

fn scan<const K: usize>(count: u64, probe: impl Fn(u64) -> [Probe; K] + Sync) -> [Tally; K] {
    (0..count)
        .into_par_iter()
        .fold(
            || [Tally::EMPTY; K],
            |acc, t| {
                let ps = probe(t);
                std::array::from_fn(|k| acc[k].push(t, ps[k]))
            },
        )
        .reduce(|| [Tally::EMPTY; K], |a, b| std::array::from_fn(|k| a[k].merge(b[k])))
}

fn check(metric: &str, tolerance: f64, tally: Tally, state_of: impl Fn(u64) -> PureState) -> CheckStats {
    CheckStats {
        metric: metric.to_string(),
        tolerance,
        violations: tally.violations,
        worst: tally.worst.map(|(_, trial, value)| WorstCase { trial, state: state_of(trial), value }),
    }
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    Ok(())
}

fn report(suite: &str, trials: u64, seed: u64, checks: Vec<(&str, CheckStats)>) -> SuiteReport {
    let passed = checks.iter().all(|(_, c)| c.violations == 0);
    SuiteReport {
        suite: suite.to_string(),
        trials,
        seed,
        passed,
        checks: checks.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    }
}

pub fn haar_trial(seed: u64, trial: u64) -> PureState {
    sample_haar_state(&mut RngStream::derive(seed, trial))
}

/// Number of unnormalized states appended to an ordering run of `trials`.
pub fn unnormalized_count(trials: u64) -> u64 {
    trials.div_ceil(100)
}

/// Trial `t < trials` is a Haar state; the rest are Haar states scaled by a
/// factor uniform in `[0.1, 10]`.
fn ordering_state(seed: u64, trials: u64, t: u64) -> PureState {
    let mut rng = RngStream::derive(seed, t);
    let psi = sample_haar_state(&mut rng);
    if t < trials {
        psi
    } else {
        psi.scaled(C64::new(0.1 + 9.9 * rng.uniform(), 0.0))
    }
}

/// `0 ≤ τ ≤ nω ≤ n²c_{a|bc} ≤ n⁴` on `trials` Haar states plus
/// [`unnormalized_count`] rescaled ones.
pub fn ordering_suite(trials: u64, seed: u64) -> Result<SuiteReport> {
    require_trials(trials)?;
    let total = trials + unnormalized_count(trials);
    let [slack] = scan(total, |t| {
        let m = Measures::of(&ordering_state(seed, trials, t));
        let rel = m.ordering_slack() / m.n.powi(4);
        [Probe { badness: -rel, value: rel, violated: rel < -ORDERING_TOL }]
    });
    let stats = check("min slack / n^4", ORDERING_TOL, slack, |t| ordering_state(seed, trials, t));
    Ok(report("ordering", total, seed, vec![("ordering", stats)]))
}

/// CKW equality for every pivot, and the stronger `τ ≤ c²_{a|bc}`.
pub fn ckw_suite(trials: u64, seed: u64) -> Result<SuiteReport> {
    require_trials(trials)?;
    let [equality, stronger] = scan(trials, |t| {
        let psi = haar_trial(seed, t);
        let m = Measures::of(&psi);
        let mut err: f64 = 0.0;
        let mut gap = f64::INFINITY;
        for a in Qubit::ALL {
            // A Wootters failure on a valid marginal counts as an infinite error.
            let r = ckw_residual(&psi, a).unwrap_or(f64::INFINITY);
            err = err.max((r - m.tau).abs());
            gap = gap.min(m.concurrence(a).powi(2) - m.tau);
        }
        [
            Probe { badness: err, value: err, violated: err.is_nan() || err >= CKW_TOL },
            Probe { badness: -gap, value: gap, violated: gap < -ORDERING_TOL },
        ]
    });
    Ok(report(
        "ckw",
        trials,
        seed,
        vec![
            ("ckw_equality", check("max |residual - tau|", CKW_TOL, equality, |t| haar_trial(seed, t))),
            ("tau_below_c_sq", check("min c^2 - tau", ORDERING_TOL, stronger, |t| haar_trial(seed, t))),
        ],
    ))
}

/// Measures recomputed from the LU invariants, and the Kempe invariant's
/// independence of the chosen pair.
pub fn identities_suite(trials: u64, seed: u64) -> Result<SuiteReport> {
    require_trials(trials)?;
    let [identity, kempe] = scan(trials, |t| {
        let psi = haar_trial(seed, t);
        let m = Measures::of(&psi);
        let sq = measures_from_invariants(&lu_invariants(&psi));
        let n2 = psi.norm_sqr();
        // Each pair is (native, from invariants, natural scale n^degree).
        let pairs = [
            (n2, sq.n2, n2),
            (m.c[0].powi(2), sq.c_sq[0], n2 * n2),
            (m.c[1].powi(2), sq.c_sq[1], n2 * n2),
            (m.c[2].powi(2), sq.c_sq[2], n2 * n2),
            (m.omega.powi(2), sq.omega_sq, n2.powi(3)),
            (m.tau.powi(2), sq.tau_sq, n2.powi(4)),
        ];
        let err = pairs.iter().map(|(a, b, s)| (a - b).abs() / s).fold(0.0, f64::max);
        let k = kempe_by_pair(&psi);
        let spread = (k[0].max(k[1]).max(k[2]) - k[0].min(k[1]).min(k[2])) / n2.powi(3);
        [
            Probe { badness: err, value: err, violated: err.is_nan() || err >= IDENTITY_TOL },
            Probe { badness: spread, value: spread, violated: spread.is_nan() || spread >= KEMPE_TOL },
        ]
    });
    Ok(report(
        "identities",
        trials,
        seed,
        vec![
            ("invariant_expressions", check("max relative error", IDENTITY_TOL, identity, |t| haar_trial(seed, t))),
            ("kempe_pairings", check("max spread / n^6", KEMPE_TOL, kempe, |t| haar_trial(seed, t))),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        for r in [ordering_suite(2000, 1).unwrap(), ckw_suite(500, 1).unwrap(), identities_suite(500, 1).unwrap()] {
            assert!(r.passed, "{r:?}");
            assert!(r.failure().is_none());
        }
    }

    #[test]
    fn ordering_includes_rescaled_states() {
        let r = ordering_suite(250, 3).unwrap();
        assert_eq!(r.trials, 253);
        let scaled = (250..253).map(|t| ordering_state(3, 250, t).norm());
        assert!(scaled.into_iter().all(|n| (0.1..=10.0).contains(&n)));
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(ckw_suite(300, 8).unwrap(), ckw_suite(300, 8).unwrap());
        assert_eq!(identities_suite(300, 8).unwrap(), identities_suite(300, 8).unwrap());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(ordering_suite(0, 1).is_err());
        assert!(ckw_suite(0, 1).is_err());
        assert!(identities_suite(0, 1).is_err());
    }

    #[test]
    fn tally_prefers_lowest_trial_on_ties() {
        let p = Probe { badness: 1.0, value: 1.0, violated: false };
        let a = Tally::EMPTY.push(7, p);
        let b = Tally::EMPTY.push(3, p);
        assert_eq!(a.merge(b).worst.unwrap().1, 3);
        assert_eq!(b.merge(a).worst.unwrap().1, 3);
    }
}
