//! The three polynomial entanglement measures (concurrence, ω, τ), the
//! LU-invariant basis they are expressed in, and the Wootters concurrence of
//! two-qubit marginals used for the CKW relation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, SmallMatrix, C64, PSD_CLAMP, ZERO};
use crate::tensor::{cubic_tensor, gamma, quadratic_form, quartic_form, reduced_density, PureState, Qubit, TwoQubitState};

/// Tolerance on `‖ψ‖ = 1` for operations defined on normalized states.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Marginal eigenvalues below this fraction of the trace are treated as an
/// exact kernel when forming `√ρ ρ̃ √ρ`.
pub const WOOTTERS_RANK_TOL: f64 = 1e-13;

/// `c_{1|2}(φ) = |q(φ)|`.
pub fn concurrence_pure_2qb(phi: &TwoQubitState) -> f64 {
    quadratic_form(phi).norm()
}

/// `2√det(ω₁)` with `ω₁` the reduced state of the first qubit.
pub fn concurrence_pure_2qb_from_marginal(phi: &TwoQubitState) -> f64 {
    2.0 * phi.reduced_first().det().re.max(0.0).sqrt()
}

/// Three-tangle `τ = 2|q(ψ)| = 4|Det(ψ)|`.
pub fn three_tangle(psi: &PureState) -> f64 {
    2.0 * quartic_form(psi).norm()
}

/// W-measure `ω = 2‖T(ψ)‖`.
pub fn omega_measure(psi: &PureState) -> f64 {
    2.0 * cubic_tensor(psi).norm()
}

/// `c_{a|bc} = √(‖γ_b‖² + ‖γ_c‖²)`.
pub fn concurrence_split(psi: &PureState, a: Qubit) -> f64 {
    let (b, c) = a.others();
    let c_sq = gamma(psi, b).norm_sqr() + gamma(psi, c).norm_sqr();
    #[cfg(debug_assertions)]
    {
        let [_, det_route, trace_route] = concurrence_split_routes(psi, a);
        let scale = psi.norm_sqr().powi(2).max(f64::MIN_POSITIVE);
        debug_assert!((det_route * det_route - c_sq).abs() <= 1e-10 * scale);
        debug_assert!((trace_route * trace_route - c_sq).abs() <= 1e-10 * scale);
    }
    c_sq.sqrt()
}

/// `c_{a|bc}` by its three equivalent formulas: the γ tensors, `2√det ρ_a`
/// and `√(2(tr(ρ_a)² − tr(ρ_a²)))`.
pub fn concurrence_split_routes(psi: &PureState, a: Qubit) -> [f64; 3] {
    let (b, c) = a.others();
    let via_gamma = (gamma(psi, b).norm_sqr() + gamma(psi, c).norm_sqr()).sqrt();
    let rho = reduced_density(psi, &[a]).expect("single qubit marginal");
    let via_det = 2.0 * rho.det().re.max(0.0).sqrt();
    let tr = rho.trace().re;
    let tr_sq = (rho * rho).trace().re;
    let via_trace = (2.0 * (tr * tr - tr_sq)).max(0.0).sqrt();
    [via_gamma, via_det, via_trace]
}

/// All measures of one vector, evaluated once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    pub n: f64,
    pub tau: f64,
    pub omega: f64,
    /// `c_{1|23}, c_{2|13}, c_{3|12}`.
    pub c: [f64; 3],
}

impl Measures {
    pub fn of(psi: &PureState) -> Self {
        let g = Qubit::ALL.map(|q| gamma(psi, q).norm_sqr());
        let c = [(g[1] + g[2]).sqrt(), (g[0] + g[2]).sqrt(), (g[0] + g[1]).sqrt()];
        Self { n: psi.norm(), tau: three_tangle(psi), omega: omega_measure(psi), c }
    }

    pub fn concurrence(&self, a: Qubit) -> f64 {
        self.c[a.slot()]
    }

    /// Smallest slack in `0 ≤ τ ≤ nω ≤ n²c_{a|bc} ≤ n⁴` over all `a`.
    pub fn ordering_slack(&self) -> f64 {
        let n = self.n;
        let n4 = n.powi(4);
        let n_omega = n * self.omega;
        let mut slack = self.tau.min(n_omega - self.tau);
        for &c in &self.c {
            let n2c = n * n * c;
            slack = slack.min(n2c - n_omega).min(n4 - n2c);
        }
        slack
    }
}

/// LU invariants together with the measures computed from their own definitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    /// `I₀ = ‖ψ‖²`.
    pub n2: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// Kempe invariant.
    pub i4: f64,
    /// `|Det(ψ)|²`.
    pub i5: f64,
    pub tau: f64,
    pub omega: f64,
    pub c1_23: f64,
    pub c2_13: f64,
    pub c3_12: f64,
}

impl InvariantReport {
    pub fn local_purities(&self) -> [f64; 3] {
        [self.i1, self.i2, self.i3]
    }

    pub fn concurrences(&self) -> [f64; 3] {
        [self.c1_23, self.c2_13, self.c3_12]
    }
}

fn trace_power(m: &SmallMatrix, k: u32) -> f64 {
    let mut acc = *m;
    for _ in 1..k {
        acc = acc * *m;
    }
    acc.trace().re
}

/// Kempe invariant `3 tr(ρ_bc(ρ_b⊗ρ_c)) − tr(ρ_b³) − tr(ρ_c³)` for each
/// choice of pair `{b, c}`, indexed by the excluded qubit `a`.
pub fn kempe_by_pair(psi: &PureState) -> [f64; 3] {
    let singles = Qubit::ALL.map(|q| reduced_density(psi, &[q]).expect("single qubit marginal"));
    Qubit::ALL.map(|a| {
        let (b, c) = a.others();
        let rho_bc = reduced_density(psi, &[b, c]).expect("pair marginal");
        let (rb, rc) = (&singles[b.slot()], &singles[c.slot()]);
        let product = rb.kron(rc).expect("2×2 factors");
        3.0 * (rho_bc * product).trace().re - trace_power(rb, 3) - trace_power(rc, 3)
    })
}

/// Computes `I₀ … I₅` and the measures.
pub fn lu_invariants(psi: &PureState) -> InvariantReport {
    let purities = Qubit::ALL.map(|q| {
        let rho = reduced_density(psi, &[q]).expect("single qubit marginal");
        trace_power(&rho, 2)
    });
    let kempe = kempe_by_pair(psi);
    #[cfg(debug_assertions)]
    {
        let scale = psi.norm_sqr().powi(3).max(f64::MIN_POSITIVE);
        debug_assert!((kempe[0] - kempe[1]).abs() <= 1e-11 * scale);
        debug_assert!((kempe[0] - kempe[2]).abs() <= 1e-11 * scale);
    }
    let det = quartic_form(psi) * -0.5;
    let m = Measures::of(psi);
    InvariantReport {
        n2: psi.norm_sqr(),
        i1: purities[0],
        i2: purities[1],
        i3: purities[2],
        i4: kempe.iter().sum::<f64>() / 3.0,
        i5: det.norm_sqr(),
        tau: m.tau,
        omega: m.omega,
        c1_23: m.c[0],
        c2_13: m.c[1],
        c3_12: m.c[2],
    }
}

/// Squared measures re-expressed through the LU invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaredMeasures {
    pub n2: f64,
    pub c_sq: [f64; 3],
    pub omega_sq: f64,
    pub tau_sq: f64,
}

/// `n² = I₀`, `c²_{a|bc} = 2(I₀² − I_a)`, `ω² = (8/3)I₄ + (10/3)I₀³ − 2I₀ΣI_a`,
/// `τ² = 16 I₅` (with `I₅ = |Det|²` and `τ = 4|Det|`).
pub fn measures_from_invariants(r: &InvariantReport) -> SquaredMeasures {
    let i0 = r.n2;
    let purities = r.local_purities();
    let sum: f64 = purities.iter().sum();
    SquaredMeasures {
        n2: i0,
        c_sq: purities.map(|ia| 2.0 * (i0 * i0 - ia)),
        omega_sq: 8.0 / 3.0 * r.i4 + 10.0 / 3.0 * i0.powi(3) - 2.0 * i0 * sum,
        tau_sq: 16.0 * r.i5,
    }
}

fn pauli_yy() -> SmallMatrix {
    // Y⊗Y is real: anti-diagonal (-1, 1, 1, -1).
    let mut m = SmallMatrix::zeros(4).expect("dim 4");
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Wootters spin-flipped state `ρ̃ = (Y⊗Y) conj(ρ) (Y⊗Y)`.
pub fn wootters_flip(rho: &SmallMatrix) -> SmallMatrix {
    let yy = pauli_yy();
    yy * rho.conj() * yy
}

/// Descending `λ_k`, the square roots of the spectrum of `ρρ̃`, read off the
/// Hermitian matrix `√ρ ρ̃ √ρ`.
pub fn wootters_lambdas(rho: &SmallMatrix) -> Result<[f64; 4]> {
    if rho.dim() != 4 {
        return Err(Error::NotAState("two-qubit density matrix must be 4×4".into()));
    }
    let eig = hermitian_eigensystem(rho)?;
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotAState(format!("trace {tr} differs from 1")));
    }
    if let Some(&min) = eig.values.last() {
        if min < -PSD_CLAMP {
            return Err(Error::NotAState(format!("negative eigenvalue {min:.3e}")));
        }
    }
    // √ρ ρ̃ √ρ in the eigenbasis of ρ: entries √p_k √p_l ⟨v_k|ρ̃|v_l⟩. This is
    // unitarily similar to the matrix itself, and directions in the numerical
    // kernel of ρ contribute exact zero rows.
    let flipped = wootters_flip(rho);
    let v = eig.vectors;
    let in_basis = v.adjoint() * flipped * v;
    let roots: Vec<f64> = eig.values.iter().map(|&p| if p > WOOTTERS_RANK_TOL * tr { p.sqrt() } else { 0.0 }).collect();
    let mut r = SmallMatrix::zeros(4)?;
    for k in 0..4 {
        for l in 0..4 {
            r[(k, l)] = if roots[k] == 0.0 || roots[l] == 0.0 { ZERO } else { in_basis[(k, l)] * (roots[k] * roots[l]) };
        }
    }
    let spectrum = hermitian_eigensystem(&r)?;
    let mut out = [0.0; 4];
    for (o, &mu) in out.iter_mut().zip(spectrum.values.iter()) {
        *o = mu.max(0.0).sqrt();
    }
    Ok(out)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)` of a two-qubit state.
pub fn wootters_concurrence_mixed(rho: &SmallMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

fn require_normalized(psi: &PureState) -> Result<()> {
    let n = psi.norm();
    if (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm: n });
    }
    Ok(())
}

/// Concurrence `c_{a|b}` of the two-qubit marginal `ρ_ab`.
pub fn marginal_concurrence(psi: &PureState, a: Qubit, b: Qubit) -> Result<f64> {
    require_normalized(psi)?;
    let rho = reduced_density(psi, &[a, b])?;
    wootters_concurrence_mixed(&rho)
}

/// CKW residual `c²_{a|bc} − c²_{a|b} − c²_{a|c}`, equal to `τ(ψ)`.
pub fn ckw_residual(psi: &PureState, a: Qubit) -> Result<f64> {
    require_normalized(psi)?;
    let (b, c) = a.others();
    let whole = concurrence_split(psi, a);
    let ab = marginal_concurrence(psi, a, b)?;
    let ac = marginal_concurrence(psi, a, c)?;
    Ok(whole * whole - ab * ab - ac * ac)
}

/// Cayley–Hamilton trace identity on 2×2 matrices; returns
/// `(2 tr(A) tr(A²) − (2/3) tr(A)³, (4/3) tr(A³))`.
pub fn cayley_hamilton_sides(a: &SmallMatrix) -> (C64, C64) {
    let t1 = a.trace();
    let a2 = *a * *a;
    let t2 = a2.trace();
    let t3 = (a2 * *a).trace();
    (t1 * t2 * 2.0 - t1 * t1 * t1 * (2.0 / 3.0), t3 * (4.0 / 3.0))
}
