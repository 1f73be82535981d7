//! Acín canonical form, its closed-form measures, the maximizations over it,
//! and the one-parameter curve families used for plots.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CurveRow;
use crate::linalg::C64;
use crate::measures::Measures;
use crate::nelder_mead::{self, Options};
use crate::rng::RngStream;
use crate::tensor::{hyperdeterminant, PureState};

/// `√η₀|000⟩ + e^{iθ}√η₁|100⟩ + √η₂|101⟩ + √η₃|110⟩ + √η₄|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub eta: [f64; 5],
    pub theta: f64,
}

impl CanonicalParams {
    /// Accepts any nonnegative weights; `Ση` is the squared norm of the state.
    pub fn new(eta: [f64; 5], theta: f64) -> Result<Self> {
        if let Some(e) = eta.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(Error::InvalidParams(format!("weights must be finite and nonnegative, got {e}")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParams(format!("theta must lie in [0, π], got {theta}")));
        }
        Ok(Self { eta, theta })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.eta.iter().sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    /// Uniform on the simplex, θ uniform on `[0, π]`.
    pub fn sample(rng: &mut RngStream) -> Self {
        let w: [f64; 5] = std::array::from_fn(|_| -rng.uniform().max(f64::MIN_POSITIVE).ln());
        let s: f64 = w.iter().sum();
        Self { eta: w.map(|x| x / s), theta: PI * rng.uniform() }
    }
}

pub fn canonical_state(p: &CanonicalParams) -> PureState {
    let r = p.eta.map(f64::sqrt);
    let mut amps = [C64::new(0.0, 0.0); 8];
    amps[0b000] = C64::new(r[0], 0.0);
    amps[0b100] = C64::from_polar(r[1], p.theta);
    amps[0b101] = C64::new(r[2], 0.0);
    amps[0b110] = C64::new(r[3], 0.0);
    amps[0b111] = C64::new(r[4], 0.0);
    PureState::new(amps).expect("finite amplitudes")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormReport {
    pub c1_23_sq: f64,
    pub c2_13_sq: f64,
    pub c3_12_sq: f64,
    pub omega_sq: f64,
    pub tau_sq: f64,
    #[serde(with = "complex")]
    pub delta: C64,
}

mod complex {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

impl ClosedFormReport {
    pub fn concurrences_sq(&self) -> [f64; 3] {
        [self.c1_23_sq, self.c2_13_sq, self.c3_12_sq]
    }
}

/// Squared measures of the canonical state straight from its weights.
pub fn closed_form_measures(p: &CanonicalParams) -> ClosedFormReport {
    let [e0, e1, e2, e3, e4] = p.eta;
    let delta = C64::from_polar((e1 * e4).sqrt(), p.theta) - (e2 * e3).sqrt();
    let d2 = delta.norm_sqr();
    let clamp = |x: f64| x.max(0.0);
    ClosedFormReport {
        c1_23_sq: clamp(4.0 * e0 * (e2 + e3 + e4)),
        c2_13_sq: clamp(4.0 * e0 * (e3 + e4) + 4.0 * d2),
        c3_12_sq: clamp(4.0 * e0 * (e2 + e4) + 4.0 * d2),
        omega_sq: clamp(4.0 * e0 * e4 * p.norm_sqr() - 16.0 * e0 * (e2 * e3).sqrt() * delta.re),
        tau_sq: clamp(16.0 * e0 * e0 * e4 * e4),
        delta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    OmegaOnWClosure,
    SimultaneousConcurrenceOnWClosure,
    AverageConcurrenceOnWClosure,
    OmegaGivenC1EqualsOne,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::OmegaOnWClosure,
        Objective::SimultaneousConcurrenceOnWClosure,
        Objective::AverageConcurrenceOnWClosure,
        Objective::OmegaGivenC1EqualsOne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::OmegaOnWClosure => "omega_on_W_closure",
            Objective::SimultaneousConcurrenceOnWClosure => "simultaneous_concurrence_on_W_closure",
            Objective::AverageConcurrenceOnWClosure => "average_concurrence_on_W_closure",
            Objective::OmegaGivenC1EqualsOne => "omega_given_c1_equals_1",
        }
    }

    fn dimension(self) -> usize {
        match self {
            Objective::OmegaGivenC1EqualsOne => 2,
            _ => 4,
        }
    }

    /// Maps free reals onto the constrained domain.
    ///
    /// W-closure objectives fix η₄ = 0 and spread the squares of four reals
    /// over η₀..η₃. With c_{1|23} = 1 pinned, η₀ = 1/(4(η₂+η₃)) together with
    /// η₀ + η₂ + η₃ ≤ 1 leaves only η₂ + η₃ = 1/2, η₀ = 1/2, η₁ = 0, so the
    /// two reals choose the split of η₂ and η₃.
    fn params(self, z: &[f64]) -> Option<CanonicalParams> {
        let s: f64 = z.iter().map(|x| x * x).sum();
        if !(s > 0.0 && s.is_finite()) {
            return None;
        }
        let eta = match self {
            Objective::OmegaGivenC1EqualsOne => {
                let (e2, e3) = (0.5 * z[0] * z[0] / s, 0.5 * z[1] * z[1] / s);
                [1.0 / (4.0 * (e2 + e3)), 0.0, e2, e3, 0.0]
            }
            _ => [z[0] * z[0] / s, z[1] * z[1] / s, z[2] * z[2] / s, z[3] * z[3] / s, 0.0],
        };
        Some(CanonicalParams { eta, theta: 0.0 })
    }

    /// Objective value, evaluated on the state through the tensor route.
    pub fn value(self, p: &CanonicalParams) -> f64 {
        let m = Measures::of(&canonical_state(p));
        match self {
            Objective::OmegaOnWClosure | Objective::OmegaGivenC1EqualsOne => m.omega,
            Objective::SimultaneousConcurrenceOnWClosure => m.c.iter().copied().fold(f64::INFINITY, f64::min),
            Objective::AverageConcurrenceOnWClosure => m.c.iter().sum::<f64>() / 3.0,
        }
    }

    /// Analytic optimum and its location.
    pub fn known_optimum(self) -> (f64, [f64; 5]) {
        let third = 1.0 / 3.0;
        match self {
            Objective::OmegaOnWClosure => (4.0 / 27f64.sqrt(), [third, 0.0, third, third, 0.0]),
            Objective::SimultaneousConcurrenceOnWClosure | Objective::AverageConcurrenceOnWClosure => {
                ((8.0f64 / 9.0).sqrt(), [third, 0.0, third, third, 0.0])
            }
            Objective::OmegaGivenC1EqualsOne => (0.5f64.sqrt(), [0.5, 0.0, 0.25, 0.25, 0.0]),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Objective::ALL
            .into_iter()
            .find(|o| o.name().eq_ignore_ascii_case(&key))
            .or_else(|| {
                // The short forms used on the command line.
                match key.to_ascii_lowercase().as_str() {
                    "simultaneous_concurrence" => Some(Objective::SimultaneousConcurrenceOnWClosure),
                    "average_concurrence" => Some(Objective::AverageConcurrenceOnWClosure),
                    "omega_given_c1_equals_one" => Some(Objective::OmegaGivenC1EqualsOne),
                    _ => None,
                }
            })
            .ok_or_else(|| Error::InvalidInput(format!("unknown objective '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub index: usize,
    pub value: f64,
    pub params: CanonicalParams,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub objective: Objective,
    pub seed: u64,
    pub value: f64,
    pub params: CanonicalParams,
    pub restarts: Vec<RestartOutcome>,
}

/// Multi-start Nelder–Mead. Restart `i` starts from `RngStream::derive(seed, i)`;
/// the best value wins, ties going to the lowest restart index.
pub fn maximize(objective: Objective, restarts: usize, seed: u64) -> Result<Maximum> {
    if restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let opts = Options::default();
    let trace: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|index| {
            let mut rng = RngStream::derive(seed, index as u64);
            let z0: Vec<f64> = (0..objective.dimension()).map(|_| 0.1 + 0.9 * rng.uniform()).collect();
            // The penalty pins |z| = 1, removing the flat radial direction.
            let cost = |z: &[f64]| match objective.params(z) {
                Some(p) => {
                    let r: f64 = z.iter().map(|x| x * x).sum();
                    -objective.value(&p) + (r - 1.0).powi(2)
                }
                None => f64::INFINITY,
            };
            let m = nelder_mead::minimize(cost, &z0, &opts);
            let params = objective.params(&m.x).expect("finite optimum");
            RestartOutcome { index, value: objective.value(&params), params, iterations: m.iterations, converged: m.converged }
        })
        .collect();
    let best = trace
        .iter()
        .fold(None::<&RestartOutcome>, |acc, r| match acc {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .expect("at least one restart");
    Ok(Maximum { objective, seed, value: best.value, params: best.params, restarts: trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveFamily {
    /// `√(1−x²)|W⟩ + x|GHZ⟩`.
    GhzW,
    /// The GHZ branch for `x ≥ 0`, `√(1−x²)|W⟩ − x|1⟩⊗(|01⟩+|10⟩)/√2` for `x ≤ 0`.
    WBisep,
}

impl CurveFamily {
    pub fn name(self) -> &'static str {
        match self {
            CurveFamily::GhzW => "ghz-w",
            CurveFamily::WBisep => "w-bisep",
        }
    }

    pub fn state(self, x: f64) -> PureState {
        match self {
            CurveFamily::GhzW => ghz_w_superposition(x),
            CurveFamily::WBisep if x >= 0.0 => ghz_w_superposition(x),
            CurveFamily::WBisep => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                let flipped = PureState::from_real([0.0, 0.0, 0.0, 0.0, 0.0, h, h, 0.0]).expect("finite");
                PureState::w().combine(C64::new(sqrt_one_minus_sq(x), 0.0), &flipped, C64::new(-x, 0.0))
            }
        }
    }
}

impl FromStr for CurveFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").to_ascii_lowercase().as_str() {
            "ghz-w" => Ok(CurveFamily::GhzW),
            "w-bisep" => Ok(CurveFamily::WBisep),
            _ => Err(Error::InvalidInput(format!("unknown curve family '{s}'"))),
        }
    }
}

fn sqrt_one_minus_sq(x: f64) -> f64 {
    ((1.0 - x) * (1.0 + x)).max(0.0).sqrt()
}

/// `√(1−x²)|W⟩ + x|GHZ⟩`.
pub fn ghz_w_superposition(x: f64) -> PureState {
    PureState::w().combine(C64::new(sqrt_one_minus_sq(x), 0.0), &PureState::ghz(), C64::new(x, 0.0))
}

pub fn curve_row(family: CurveFamily, x: f64) -> CurveRow {
    let m = Measures::of(&family.state(x));
    CurveRow { x, tau: m.tau, omega: m.omega, c1_23: m.c[0], c2_13: m.c[1], c3_12: m.c[2] }
}

/// `samples` rows on the uniform grid over `[−1, 1]`, endpoints exact.
pub fn curve_family(family: CurveFamily, samples: usize) -> Result<Vec<CurveRow>> {
    if samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {samples}")));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples)
        .into_par_iter()
        .map(|k| {
            // Symmetric formula so that x = 0 is exact on odd grids.
            let x = (2.0 * k as f64 - last) / last;
            curve_row(family, x)
        })
        .collect())
}

/// Bisection for a sign change of `f` on `[lo, hi]`, down to width `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Positive `x` where `ω = c_{a|bc}` on the GHZ–W curve.
///
/// Since `ω ≤ c` everywhere the two curves only touch there, so `c − ω` has
/// a double zero; the bisection runs on the sign change of its slope.
pub fn omega_concurrence_crossing(tol: f64) -> Result<f64> {
    let gap = |x: f64| {
        let m = Measures::of(&ghz_w_superposition(x));
        m.c[0] - m.omega
    };
    let h = 1e-6;
    bisect(|x| gap(x + h) - gap(x - h), 0.45, 0.8, tol)
}

/// Negative zero of the three-tangle on the GHZ–W curve. The hyperdeterminant
/// is real there and changes sign, so it is bisected instead of `τ`.
pub fn tau_root(tol: f64) -> Result<f64> {
    bisect(|x| hyperdeterminant(&ghz_w_superposition(x)).re, -0.9, -0.5, tol)
}

/// `−2√(32 + 9·2^{1/3} − 12·2^{2/3})/√155`.
///
/// On the curve `Det ψ_x = x(9x³ + 8√6(1−x²)^{3/2})/36`, so the root has
/// `x²/(1−x²) = 4·2^{1/3}/3`; rationalizing with `155 = 27 + 64·2` gives this form.
pub fn tau_root_closed_form() -> f64 {
    let c = 2f64.cbrt();
    -2.0 * (32.0 + 9.0 * c - 12.0 * c * c).sqrt() / 155f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, SloccClass, DEFAULT_TOL};

    fn params(eta: [f64; 5], theta: f64) -> CanonicalParams {
        CanonicalParams::new(eta, theta).unwrap()
    }

    #[test]
    fn ghz_parameters() {
        let p = params([0.5, 0.0, 0.0, 0.0, 0.5], 0.0);
        assert!((canonical_state(&p).inner(&PureState::ghz()).norm() - 1.0).abs() < 1e-15);
        let r = closed_form_measures(&p);
        for v in [r.c1_23_sq, r.c2_13_sq, r.c3_12_sq, r.omega_sq, r.tau_sq] {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn w_like_parameters() {
        let t = 1.0 / 3.0;
        let p = params([t, 0.0, t, t, 0.0], 0.0);
        let psi = canonical_state(&p);
        assert_eq!(classify(&psi, DEFAULT_TOL).unwrap().class, SloccClass::W);
        let r = closed_form_measures(&p);
        assert!((r.omega_sq.sqrt() - 4.0 / 27f64.sqrt()).abs() < 1e-15);
        assert!((Measures::of(&psi).omega - 4.0 / 27f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn product_parameters() {
        let psi = canonical_state(&params([1.0, 0.0, 0.0, 0.0, 0.0], 0.0));
        assert_eq!(psi, PureState::basis(0, 0, 0));
    }

    #[test]
    fn pinned_concurrence_slice() {
        let r = closed_form_measures(&params([0.5, 0.0, 0.25, 0.25, 0.0], 0.0));
        assert!((r.c1_23_sq - 1.0).abs() < 1e-15);
        assert!((r.omega_sq - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(CanonicalParams::new([-0.1, 0.5, 0.2, 0.2, 0.2], 0.0).is_err());
        assert!(CanonicalParams::new([0.2; 5], 3.5).is_err());
        assert!(CanonicalParams::new([0.2; 5], -0.1).is_err());
        assert!(CanonicalParams::new([f64::NAN, 0.0, 0.0, 0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn closed_form_matches_tensor_route() {
        let mut rng = RngStream::new(11);
        for i in 0..1000 {
            let mut p = CanonicalParams::sample(&mut rng);
            if i % 2 == 1 {
                // Unnormalized weights exercise the ‖ψ‖² factor in ω².
                let s = 0.1 + 9.9 * rng.uniform();
                p.eta = p.eta.map(|e| e * s);
            }
            let r = closed_form_measures(&p);
            let m = Measures::of(&canonical_state(&p));
            let scale = p.norm_sqr();
            let pairs = [
                (r.c1_23_sq, m.c[0].powi(2), scale * scale),
                (r.c2_13_sq, m.c[1].powi(2), scale * scale),
                (r.c3_12_sq, m.c[2].powi(2), scale * scale),
                (r.omega_sq, m.omega.powi(2), scale.powi(3)),
                (r.tau_sq, m.tau.powi(2), scale.powi(4)),
            ];
            for (k, (closed, tensor, s)) in pairs.into_iter().enumerate() {
                assert!((closed - tensor).abs() <= 1e-10 * s, "sample {i}, quantity {k}: {closed} vs {tensor}");
            }
        }
    }

    #[test]
    fn w_closure_slice_reduces() {
        let mut rng = RngStream::new(5);
        for _ in 0..500 {
            let mut p = CanonicalParams::sample(&mut rng);
            p.eta[4] = 0.0;
            let [e0, _, e2, e3, _] = p.eta;
            let r = closed_form_measures(&p);
            assert!((r.c1_23_sq - 4.0 * e0 * (e2 + e3)).abs() < 1e-14);
            assert!((r.c2_13_sq - 4.0 * e3 * (e0 + e2)).abs() < 1e-14);
            assert!((r.c3_12_sq - 4.0 * e2 * (e0 + e3)).abs() < 1e-14);
            assert!((r.omega_sq - 16.0 * e0 * e2 * e3).abs() < 1e-14);
        }
    }

    #[test]
    fn am_gm_bound_on_w_slice() {
        let bound = 4.0 / 27f64.sqrt();
        let mut rng = RngStream::new(6);
        for _ in 0..10_000 {
            let mut p = CanonicalParams::sample(&mut rng);
            p.eta[1] = 0.0;
            p.eta[4] = 0.0;
            let s = p.norm_sqr();
            p.eta = p.eta.map(|e| e / s);
            assert!(Measures::of(&canonical_state(&p)).omega <= bound + 1e-14);
        }
    }

    #[test]
    fn objective_names_round_trip() {
        for o in Objective::ALL {
            assert_eq!(o.name().parse::<Objective>().unwrap(), o);
        }
        assert_eq!("omega-on-w-closure".parse::<Objective>().unwrap(), Objective::OmegaOnWClosure);
        assert!("volume".parse::<Objective>().is_err());
    }

    #[test]
    fn maximize_omega_small() {
        let m = maximize(Objective::OmegaOnWClosure, 8, 1).unwrap();
        assert!((m.value - 4.0 / 27f64.sqrt()).abs() < 1e-6, "{}", m.value);
        assert_eq!(m.restarts.len(), 8);
        assert!(maximize(Objective::OmegaOnWClosure, 0, 1).is_err());
    }

    #[test]
    fn maximize_is_deterministic() {
        let a = maximize(Objective::OmegaGivenC1EqualsOne, 4, 9).unwrap();
        let b = maximize(Objective::OmegaGivenC1EqualsOne, 4, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.value - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn curve_anchors() {
        let at0 = curve_row(CurveFamily::GhzW, 0.0);
        assert!(at0.tau.abs() < 1e-15);
        assert!((at0.omega - (16.0f64 / 27.0).sqrt()).abs() < 1e-14);
        assert!((at0.c1_23 - (8.0f64 / 9.0).sqrt()).abs() < 1e-14);
        for x in [-1.0, 1.0] {
            let r = curve_row(CurveFamily::GhzW, x);
            for v in [r.tau, r.omega, r.c1_23, r.c2_13, r.c3_12] {
                assert!((v - 1.0).abs() < 1e-14);
            }
        }
        let x = 0.4f64.sqrt();
        let r = curve_row(CurveFamily::GhzW, x);
        assert!((r.omega - 2.0 / 5f64.sqrt()).abs() < 1e-14 && (r.c1_23 - 2.0 / 5f64.sqrt()).abs() < 1e-14);

        let end = curve_row(CurveFamily::WBisep, -1.0);
        assert!(end.tau.abs() < 1e-15 && end.omega.abs() < 1e-15 && end.c1_23.abs() < 1e-15);
        assert!((end.c2_13 - 1.0).abs() < 1e-14 && (end.c3_12 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn curve_grid() {
        let rows = curve_family(CurveFamily::GhzW, 201).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!((rows[0].x, rows[100].x, rows[200].x), (-1.0, 0.0, 1.0));
        assert!(curve_family(CurveFamily::GhzW, 1).is_err());
    }

    #[test]
    fn curve_roots() {
        let x = omega_concurrence_crossing(1e-13).unwrap();
        assert!((x - 0.4f64.sqrt()).abs() < 1e-8);
        let r = tau_root(1e-14).unwrap();
        assert!((r - tau_root_closed_form()).abs() < 1e-10, "{r} vs {}", tau_root_closed_form());
    }

    #[test]
    fn bisect_needs_a_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
        assert!((bisect(|x| x - 0.25, 0.0, 1.0, 1e-14).unwrap() - 0.25).abs() < 1e-14);
    }
}
