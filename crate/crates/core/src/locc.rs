//! Two-outcome single-qubit pure-LOCC steps and the Monte-Carlo checks of
//! entanglement monotonicity built on them.
//!
//! A step on qubit `a` has Kraus operators `A_μ = U_μ · diag(√a_μ, √b_μ) · V†`
//! with `a₂ = 1 − a₁`, `b₂ = 1 − b₁`; every pure-LOCC protocol is a sequence
//! of such steps, so average non-increase under them is the monotone property.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canonical::ghz_w_superposition;
use crate::error::{Error, Result};
use crate::io::{matrix_serde, state_serde};
use crate::linalg::{SmallMatrix, C64};
use crate::measures::{concurrence_split, omega_measure, three_tangle, Measures, NORMALIZATION_TOL};
use crate::rng::{sample_haar_state, sample_haar_unitary, RngStream};
use crate::tensor::{PureState, Qubit};

/// Outcomes with probability below this are discarded.
pub const OUTCOME_DROP: f64 = 1e-14;
/// Margins below `-MONOTONE_TOL` count as violations.
pub const MONOTONE_TOL: f64 = 1e-9;
/// A counterexample must beat its inequality by at least this much.
pub const WITNESS_MARGIN: f64 = 1e-6;

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoOutcomeProtocol {
    #[serde(with = "qubit_label")]
    pub target: Qubit,
    #[serde(with = "matrix_serde")]
    pub v: SmallMatrix,
    #[serde(with = "matrix_serde")]
    pub u1: SmallMatrix,
    #[serde(with = "matrix_serde")]
    pub u2: SmallMatrix,
    pub a1: f64,
    pub b1: f64,
}

mod qubit_label {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Qubit, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(q.label() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Qubit, D::Error> {
        Qubit::new(usize::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn unitarity_defect(u: &SmallMatrix) -> f64 {
    (u.adjoint() * *u - SmallMatrix::identity(2).expect("dim 2")).frobenius_norm()
}

impl TwoOutcomeProtocol {
    pub fn new(target: Qubit, v: SmallMatrix, u1: SmallMatrix, u2: SmallMatrix, a1: f64, b1: f64) -> Result<Self> {
        for (name, u) in [("V", &v), ("U1", &u1), ("U2", &u2)] {
            if u.dim() != 2 || unitarity_defect(u) > UNITARY_TOL {
                return Err(Error::InvalidInput(format!("{name} is not a 2×2 unitary")));
            }
        }
        if !(0.0..=1.0).contains(&a1) || !(0.0..=1.0).contains(&b1) {
            return Err(Error::InvalidInput(format!("weights a1={a1}, b1={b1} outside [0, 1]")));
        }
        Ok(Self { target, v, u1, u2, a1, b1 })
    }

    /// Protocol with `V = U₁ = U₂ = 1`.
    pub fn diagonal(target: Qubit, a1: f64, b1: f64) -> Result<Self> {
        let id = SmallMatrix::identity(2)?;
        Self::new(target, id, id, id, a1, b1)
    }

    /// `[A₁, A₂]`.
    pub fn kraus(&self) -> [SmallMatrix; 2] {
        let weights = [(self.a1, self.b1), (1.0 - self.a1, 1.0 - self.b1)];
        let vd = self.v.adjoint();
        [(&self.u1, weights[0]), (&self.u2, weights[1])].map(|(u, (a, b))| {
            let d = SmallMatrix::diag(&[a.max(0.0).sqrt(), b.max(0.0).sqrt()]).expect("dim 2");
            *u * d * vd
        })
    }

    /// `‖A₁†A₁ + A₂†A₂ − 1‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let [k1, k2] = self.kraus();
        (k1.adjoint() * k1 + k2.adjoint() * k2 - SmallMatrix::identity(2).expect("dim 2")).frobenius_norm()
    }
}

/// Random protocol: uniform target, Haar `V, U₁, U₂`, uniform `a₁, b₁`.
pub fn sample_protocol(rng: &mut RngStream) -> TwoOutcomeProtocol {
    let target = Qubit::ALL[rng.below(3) as usize];
    let v = sample_haar_unitary(rng);
    let u1 = sample_haar_unitary(rng);
    let u2 = sample_haar_unitary(rng);
    let a1 = rng.uniform();
    let b1 = rng.uniform();
    TwoOutcomeProtocol { target, v, u1, u2, a1, b1 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub probability: f64,
    pub state: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolResult {
    pub outcomes: Vec<Outcome>,
    pub dropped_mass: f64,
}

/// Runs one step on a normalized state, returning the surviving branches.
pub fn apply_protocol(psi: &PureState, pr: &TwoOutcomeProtocol) -> Result<ProtocolResult> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm: n });
    }
    let mut outcomes = Vec::with_capacity(2);
    let mut dropped_mass = 0.0;
    for k in pr.kraus() {
        let branch = psi.apply_local(pr.target, &k);
        let p = branch.norm_sqr();
        if p < OUTCOME_DROP {
            dropped_mass += p;
            continue;
        }
        outcomes.push(Outcome { probability: p, state: branch.scaled(C64::new(1.0 / p.sqrt(), 0.0)) });
    }
    Ok(ProtocolResult { outcomes, dropped_mass })
}

/// Functions whose average behaviour under LOCC is checked.
#[derive(Clone, Copy)]
pub enum Measure {
    Tau,
    Omega,
    Concurrence(Qubit),
    TauSquared,
    OmegaSquared,
    ConcurrenceFourth(Qubit),
    Custom { name: &'static str, f: fn(&PureState) -> f64 },
}

impl Measure {
    pub fn evaluate(&self, psi: &PureState) -> f64 {
        match *self {
            Measure::Tau => three_tangle(psi),
            Measure::Omega => omega_measure(psi),
            Measure::Concurrence(a) => concurrence_split(psi, a),
            Measure::TauSquared => three_tangle(psi).powi(2),
            Measure::OmegaSquared => omega_measure(psi).powi(2),
            Measure::ConcurrenceFourth(a) => concurrence_split(psi, a).powi(4),
            Measure::Custom { f, .. } => f(psi),
        }
    }

    /// Whether the function is an entanglement monotone.
    pub fn is_monotone(&self) -> Option<bool> {
        match self {
            Measure::Tau | Measure::Omega | Measure::Concurrence(_) => Some(true),
            Measure::TauSquared | Measure::OmegaSquared | Measure::ConcurrenceFourth(_) => Some(false),
            Measure::Custom { .. } => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Measure::Tau => "tau".into(),
            Measure::Omega => "omega".into(),
            Measure::Concurrence(a) => format!("c{a}"),
            Measure::TauSquared => "tau_sq".into(),
            Measure::OmegaSquared => "omega_sq".into(),
            Measure::ConcurrenceFourth(a) => format!("c{a}_fourth"),
            Measure::Custom { name, .. } => (*name).into(),
        }
    }
}

impl fmt::Debug for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let concurrence = |digit: &str| -> Result<Qubit> {
            digit.parse::<usize>().map_err(|_| Error::InvalidInput(format!("unknown measure {s}"))).and_then(Qubit::new)
        };
        Ok(match s {
            "tau" => Measure::Tau,
            "omega" => Measure::Omega,
            "tau_sq" => Measure::TauSquared,
            "omega_sq" => Measure::OmegaSquared,
            _ if s.starts_with('c') && s.ends_with("_fourth") => {
                Measure::ConcurrenceFourth(concurrence(&s[1..s.len() - "_fourth".len()])?)
            }
            _ if s.starts_with('c') => Measure::Concurrence(concurrence(&s[1..])?),
            _ => return Err(Error::InvalidInput(format!("unknown measure {s}"))),
        })
    }
}

/// `f(ψ) − Σ_μ p_μ f(ψ'_μ)`.
pub fn monotonicity_margin(measure: &Measure, psi: &PureState, pr: &TwoOutcomeProtocol) -> Result<f64> {
    let result = apply_protocol(psi, pr)?;
    let after: f64 = result.outcomes.iter().map(|o| o.probability * measure.evaluate(&o.state)).sum();
    Ok(measure.evaluate(psi) - after)
}

/// One sampled trial of a monotonicity suite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityRecord {
    pub trial: u64,
    #[serde(with = "state_serde")]
    pub state: PureState,
    pub protocol: TwoOutcomeProtocol,
    pub probabilities: [f64; 2],
    pub margin: f64,
}

/// Histogram bin edges on the margin; bin `k` holds margins in `[edge_{k-1}, edge_k)`.
pub const MARGIN_BIN_EDGES: [f64; 9] = [-1e-6, -MONOTONE_TOL, MONOTONE_TOL, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteStats {
    pub measure: String,
    pub trials: u64,
    pub seed: u64,
    pub min_margin: f64,
    pub violations: u64,
    /// Counts per margin bin, `MARGIN_BIN_EDGES.len() + 1` entries.
    pub histogram: Vec<u64>,
    pub worst: Option<MonotonicityRecord>,
}

fn margin_bin(m: f64) -> usize {
    MARGIN_BIN_EDGES.iter().position(|&e| m < e).unwrap_or(MARGIN_BIN_EDGES.len())
}

fn trial_record(measure: &Measure, seed: u64, trial: u64) -> MonotonicityRecord {
    let mut rng = RngStream::derive(seed, trial);
    let state = sample_haar_state(&mut rng);
    let protocol = sample_protocol(&mut rng);
    let result = apply_protocol(&state, &protocol).expect("Haar samples are normalized");
    let mut probabilities = [0.0; 2];
    let mut after = 0.0;
    for (slot, o) in result.outcomes.iter().enumerate() {
        probabilities[slot] = o.probability;
        after += o.probability * measure.evaluate(&o.state);
    }
    MonotonicityRecord { trial, state, protocol, probabilities, margin: measure.evaluate(&state) - after }
}

#[derive(Clone)]
struct Accumulator {
    histogram: Vec<u64>,
    violations: u64,
    worst: Option<MonotonicityRecord>,
}

impl Accumulator {
    fn empty() -> Self {
        Self { histogram: vec![0; MARGIN_BIN_EDGES.len() + 1], violations: 0, worst: None }
    }

    fn push(mut self, r: MonotonicityRecord) -> Self {
        self.histogram[margin_bin(r.margin)] += 1;
        if r.margin < -MONOTONE_TOL {
            self.violations += 1;
        }
        self.worst = pick_worst(self.worst, Some(r));
        self
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.histogram.iter_mut().zip(other.histogram) {
            *a += b;
        }
        self.violations += other.violations;
        self.worst = pick_worst(self.worst, other.worst);
        self
    }
}

/// Smallest margin, ties to the lowest trial index.
fn pick_worst(a: Option<MonotonicityRecord>, b: Option<MonotonicityRecord>) -> Option<MonotonicityRecord> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if (y.margin, y.trial) < (x.margin, x.trial) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

/// Samples `trials` (Haar state, random protocol) pairs; trial `t` uses
/// sub-stream `t` of `seed`, so the statistics do not depend on scheduling.
pub fn run_monotonicity_suite(measure: &Measure, trials: u64, seed: u64) -> Result<SuiteStats> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let acc = (0..trials)
        .into_par_iter()
        .fold(Accumulator::empty, |acc, t| acc.push(trial_record(measure, seed, t)))
        .reduce(Accumulator::empty, Accumulator::merge);
    Ok(SuiteStats {
        measure: measure.name(),
        trials,
        seed,
        min_margin: acc.worst.map_or(f64::INFINITY, |w| w.margin),
        violations: acc.violations,
        histogram: acc.histogram,
        worst: acc.worst,
    })
}

/// Inequalities for which counterexamples are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleTarget {
    TauSq,
    OmegaSq,
    CFourth,
    NOmegaVsCSq,
    /// Negative control: τ itself is a monotone.
    Tau,
}

impl CounterexampleTarget {
    pub fn name(self) -> &'static str {
        match self {
            CounterexampleTarget::TauSq => "tau_sq",
            CounterexampleTarget::OmegaSq => "omega_sq",
            CounterexampleTarget::CFourth => "c_fourth",
            CounterexampleTarget::NOmegaVsCSq => "n_omega_vs_c_sq",
            CounterexampleTarget::Tau => "tau",
        }
    }
}

impl FromStr for CounterexampleTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tau_sq" => CounterexampleTarget::TauSq,
            "omega_sq" => CounterexampleTarget::OmegaSq,
            "c_fourth" => CounterexampleTarget::CFourth,
            "n_omega_vs_c_sq" => CounterexampleTarget::NOmegaVsCSq,
            "tau" => CounterexampleTarget::Tau,
            _ => return Err(Error::InvalidInput(format!("unknown counterexample target {s}"))),
        })
    }
}

/// A state (and protocol, for monotonicity targets) violating an inequality.
///
/// For monotonicity targets `lhs = f(ψ)`, `rhs = Σ p_μ f(ψ'_μ)`; for the
/// `nω ≤ c²` target `lhs = c²_{a|bc}`, `rhs = nω`. Either way the violation
/// is `lhs − rhs < −WITNESS_MARGIN`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub target: CounterexampleTarget,
    pub trial: u64,
    #[serde(with = "state_serde")]
    pub state: PureState,
    pub protocol: Option<TwoOutcomeProtocol>,
    #[serde(with = "qubit_label")]
    pub qubit: Qubit,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// Recomputes both sides from the stored state and protocol.
    pub fn recompute(
        target: CounterexampleTarget,
        state: &PureState,
        protocol: Option<&TwoOutcomeProtocol>,
        qubit: Qubit,
    ) -> Result<(f64, f64)> {
        match (target, protocol) {
            (CounterexampleTarget::NOmegaVsCSq, _) => {
                let m = Measures::of(state);
                Ok((m.concurrence(qubit).powi(2), m.n * m.omega))
            }
            (t, Some(pr)) => {
                let f = monotone_target_measure(t, qubit);
                let result = apply_protocol(state, pr)?;
                let after = result.outcomes.iter().map(|o| o.probability * f.evaluate(&o.state)).sum();
                Ok((f.evaluate(state), after))
            }
            (_, None) => Err(Error::InvalidInput("monotonicity witness needs a protocol".into())),
        }
    }

    /// True when a from-scratch recomputation still shows the violation.
    pub fn verify(&self) -> bool {
        Self::recompute(self.target, &self.state, self.protocol.as_ref(), self.qubit)
            .map(|(lhs, rhs)| lhs - rhs < -WITNESS_MARGIN)
            .unwrap_or(false)
    }
}

fn monotone_target_measure(target: CounterexampleTarget, qubit: Qubit) -> Measure {
    match target {
        CounterexampleTarget::TauSq => Measure::TauSquared,
        CounterexampleTarget::OmegaSq => Measure::OmegaSquared,
        CounterexampleTarget::CFourth => Measure::ConcurrenceFourth(qubit),
        CounterexampleTarget::Tau => Measure::Tau,
        CounterexampleTarget::NOmegaVsCSq => unreachable!("not a monotonicity target"),
    }
}

/// Number of leading trials spent on the GHZ–W superposition sweep.
const SWEEP_TRIALS: u64 = 1000;
const SEARCH_CHUNK: u64 = 4096;

fn candidate(target: CounterexampleTarget, seed: u64, trial: u64) -> Option<Witness> {
    let mut rng = RngStream::derive(seed, trial);
    match target {
        CounterexampleTarget::NOmegaVsCSq => {
            let state = if trial < SWEEP_TRIALS {
                ghz_w_superposition(-1.0 + 2.0 * (trial as f64 + 0.5) / SWEEP_TRIALS as f64)
            } else {
                sample_haar_state(&mut rng)
            };
            let m = Measures::of(&state);
            Qubit::ALL.iter().find_map(|&q| {
                let (lhs, rhs) = (m.concurrence(q).powi(2), m.n * m.omega);
                (lhs - rhs < -WITNESS_MARGIN).then_some(Witness { target, trial, state, protocol: None, qubit: q, lhs, rhs })
            })
        }
        _ => {
            let state = sample_haar_state(&mut rng);
            let mut protocol = sample_protocol(&mut rng);
            // Every other trial pushes the protocol towards maximal damping.
            if trial % 2 == 1 {
                protocol.a1 = 1.0 - 0.1 * rng.uniform();
                protocol.b1 = 0.1 * rng.uniform();
            }
            let qubits: &[Qubit] = if target == CounterexampleTarget::CFourth { &Qubit::ALL } else { &Qubit::ALL[..1] };
            qubits.iter().find_map(|&q| {
                let (lhs, rhs) = Witness::recompute(target, &state, Some(&protocol), q).ok()?;
                (lhs - rhs < -WITNESS_MARGIN).then_some(Witness {
                    target,
                    trial,
                    state,
                    protocol: Some(protocol),
                    qubit: q,
                    lhs,
                    rhs,
                })
            })
        }
    }
}

/// Searches up to `max_trials` candidates; returns the lowest-index witness,
/// re-verified, or `None`.
pub fn find_counterexample(target: CounterexampleTarget, max_trials: u64, seed: u64) -> Result<Option<Witness>> {
    if max_trials == 0 {
        return Err(Error::InvalidInput("max_trials must be at least 1".into()));
    }
    let mut start = 0;
    while start < max_trials {
        let end = (start + SEARCH_CHUNK).min(max_trials);
        let found = (start..end).into_par_iter().filter_map(|t| candidate(target, seed, t)).find_first(|w| w.verify());
        if found.is_some() {
            return Ok(found);
        }
        start = end;
    }
    Ok(None)
}

/// Degenerate protocols that leave the state unchanged on every branch.
pub fn identity_split(target: Qubit) -> TwoOutcomeProtocol {
    TwoOutcomeProtocol::diagonal(target, 0.5, 0.5).expect("valid weights")
}

/// Projective filter `A₁ = |0⟩⟨0|`, `A₂ = |1⟩⟨1|` on one qubit.
pub fn computational_measurement(target: Qubit) -> TwoOutcomeProtocol {
    TwoOutcomeProtocol::diagonal(target, 1.0, 0.0).expect("valid weights")
}
