//! ε-contractions of three-qubit amplitude tensors.
//!
//! Amplitudes `ψ^{ijk}` are stored at linear index `4i + 2j + k`, so qubit 1
//! is the most significant bit. The antisymmetric form is `ε_{01} = +1`,
//! `ε_{10} = -1`, zero on the diagonal; every contraction below sums over an
//! unprimed index `x` with its partner fixed to `1 - x`, which are the only
//! non-vanishing terms.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::linalg::{SmallMatrix, C64, ZERO};

/// One of the three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qubit {
    One,
    Two,
    Three,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::One, Qubit::Two, Qubit::Three];

    pub fn new(label: usize) -> Result<Self> {
        match label {
            1 => Ok(Qubit::One),
            2 => Ok(Qubit::Two),
            3 => Ok(Qubit::Three),
            other => Err(Error::InvalidSubsystem(other)),
        }
    }

    /// Label in `{1, 2, 3}`.
    pub fn label(self) -> usize {
        self.slot() + 1
    }

    /// Position in `{0, 1, 2}`.
    pub fn slot(self) -> usize {
        match self {
            Qubit::One => 0,
            Qubit::Two => 1,
            Qubit::Three => 2,
        }
    }

    /// The two other qubits, in increasing order.
    pub fn others(self) -> (Qubit, Qubit) {
        match self {
            Qubit::One => (Qubit::Two, Qubit::Three),
            Qubit::Two => (Qubit::One, Qubit::Three),
            Qubit::Three => (Qubit::One, Qubit::Two),
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `ε_{x, 1-x}`: `+1` for `x = 0`, `-1` for `x = 1`.
#[inline]
fn flip_sign(x: usize) -> f64 {
    if x == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The antisymmetric bilinear form on one qubit.
pub fn epsilon(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

#[inline]
fn idx(i: usize, j: usize, k: usize) -> usize {
    4 * i + 2 * j + k
}

/// Amplitudes of a (not necessarily normalized) three-qubit vector.
#[derive(Clone, Copy, PartialEq)]
pub struct PureState {
    amps: [C64; 8],
}

impl PureState {
    pub fn new(amps: [C64; 8]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: [f64; 8]) -> Result<Self> {
        Self::new(amps.map(|x| C64::new(x, 0.0)))
    }

    pub fn zero() -> Self {
        Self { amps: [ZERO; 8] }
    }

    /// Computational basis vector `|ijk⟩`.
    pub fn basis(i: usize, j: usize, k: usize) -> Self {
        let mut s = Self::zero();
        s.amps[idx(i & 1, j & 1, k & 1)] = C64::new(1.0, 0.0);
        s
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    pub fn amp(&self, i: usize, j: usize, k: usize) -> C64 {
        self.amps[idx(i, j, k)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `n(ψ) = ‖ψ‖`.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.amps.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { amps: self.amps.map(|z| z * s) }
    }

    /// Unit vector along `ψ`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: C64, other: &Self, beta: C64) -> Self {
        let mut amps = [ZERO; 8];
        for (t, (a, b)) in amps.iter_mut().zip(self.amps.iter().zip(other.amps.iter())) {
            *t = alpha * a + beta * b;
        }
        Self { amps }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(other.amps.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies a 2×2 operator to one qubit.
    pub fn apply_local(&self, qubit: Qubit, op: &SmallMatrix) -> Self {
        assert_eq!(op.dim(), 2, "local operators are 2×2");
        let shift = 2 - qubit.slot();
        let mut amps = [ZERO; 8];
        for (out_idx, out) in amps.iter_mut().enumerate() {
            let row = (out_idx >> shift) & 1;
            let base = out_idx & !(1 << shift);
            *out = op[(row, 0)] * self.amps[base] + op[(row, 1)] * self.amps[base | (1 << shift)];
        }
        Self { amps }
    }

    /// `A₁ ⊗ A₂ ⊗ A₃ |ψ⟩`.
    pub fn apply_product(&self, ops: [&SmallMatrix; 3]) -> Self {
        Qubit::ALL.iter().zip(ops).fold(*self, |acc, (&q, op)| acc.apply_local(q, op))
    }

    /// Relabels qubits: slot `a` of the result holds original qubit `perm[a]`.
    pub fn permuted(&self, perm: [Qubit; 3]) -> Self {
        let mut amps = [ZERO; 8];
        for (out_idx, out) in amps.iter_mut().enumerate() {
            let bits = [(out_idx >> 2) & 1, (out_idx >> 1) & 1, out_idx & 1];
            let mut src = [0usize; 3];
            for (slot, &q) in perm.iter().enumerate() {
                src[q.slot()] = bits[slot];
            }
            *out = self.amps[idx(src[0], src[1], src[2])];
        }
        Self { amps }
    }

    pub fn ghz() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real([h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h]).expect("finite")
    }

    /// `(|001⟩ + |010⟩ + |100⟩)/√3`.
    pub fn w() -> Self {
        let t = 1.0 / 3f64.sqrt();
        Self::from_real([0.0, t, t, 0.0, t, 0.0, 0.0, 0.0]).expect("finite")
    }

    /// `|0⟩_a ⊗ |φ_B⟩_{bc}` with the Bell pair on the two other qubits.
    pub fn biseparable(a: Qubit) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (b, c) = a.others();
        let mut s = Self::zero();
        for x in 0..2 {
            let mut bits = [0usize; 3];
            bits[b.slot()] = x;
            bits[c.slot()] = x;
            s.amps[idx(bits[0], bits[1], bits[2])] = C64::new(h, 0.0);
        }
        s
    }

    /// Representative states addressable by name.
    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "ghz" => Self::ghz(),
            "w" => Self::w(),
            "bisep1" => Self::biseparable(Qubit::One),
            "bisep2" => Self::biseparable(Qubit::Two),
            "bisep3" => Self::biseparable(Qubit::Three),
            "sep" => Self::basis(0, 0, 0),
            "null" => Self::zero(),
            _ => return None,
        })
    }

    pub const NAMES: [&'static str; 7] = ["null", "sep", "bisep1", "bisep2", "bisep3", "w", "ghz"];
}

impl Index<(usize, usize, usize)> for PureState {
    type Output = C64;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &C64 {
        &self.amps[idx(i, j, k)]
    }
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.amps.iter().map(|z| (z.re, z.im))).finish()
    }
}

/// Two-qubit amplitudes `φ^{ij}` at linear index `2i + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [C64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|x| C64::new(x, 0.0)))
    }

    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real([h, 0.0, 0.0, h]).expect("finite")
    }

    pub fn amp(&self, i: usize, j: usize) -> C64 {
        self.amps[2 * i + j]
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    /// Reduced state of the first qubit, `tr_2 |φ⟩⟨φ|`.
    pub fn reduced_first(&self) -> SmallMatrix {
        let mut m = SmallMatrix::zeros(2).expect("dim 2");
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c)] = (0..2).map(|t| self.amp(r, t) * self.amp(c, t).conj()).sum();
            }
        }
        m
    }

    /// `|φ⟩⟨φ|` as a 4×4 matrix.
    pub fn projector(&self) -> SmallMatrix {
        let mut m = SmallMatrix::zeros(4).expect("dim 4");
        for r in 0..4 {
            for c in 0..4 {
                m[(r, c)] = self.amps[r] * self.amps[c].conj();
            }
        }
        m
    }
}

/// `ψ̃^{ijk} = Σ ε_{ii'}ε_{jj'}ε_{kk'} conj(ψ^{i'j'k'})`.
pub fn spin_flip(psi: &PureState) -> PureState {
    let mut amps = [ZERO; 8];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let s = flip_sign(i) * flip_sign(j) * flip_sign(k);
                amps[idx(i, j, k)] = psi[(1 - i, 1 - j, 1 - k)].conj() * s;
            }
        }
    }
    PureState { amps }
}

/// `q(φ) = Σ ε_{ii'}ε_{jj'} φ^{ij}φ^{i'j'} = 2 det(φ)`.
pub fn quadratic_form(phi: &TwoQubitState) -> C64 {
    let mut q = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            q += phi.amp(i, j) * phi.amp(1 - i, 1 - j) * (flip_sign(i) * flip_sign(j));
        }
    }
    q
}

/// The three equivalent index patterns of the quartic and cubic contractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    First,
    Second,
    Third,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::First, Pattern::Second, Pattern::Third];
}

/// Quartic form `q(ψ) = -2 Det(ψ)` evaluated with the given index pattern.
pub fn quartic_form_pattern(psi: &PureState, pattern: Pattern) -> C64 {
    let mut q = ZERO;
    for bits in 0..64usize {
        let [i, j, k, l, m, n] = [5, 4, 3, 2, 1, 0].map(|b| (bits >> b) & 1);
        let (ip, jp, kp, lp, mp, np) = (1 - i, 1 - j, 1 - k, 1 - l, 1 - m, 1 - n);
        let sign = flip_sign(i) * flip_sign(j) * flip_sign(k) * flip_sign(l) * flip_sign(m) * flip_sign(n);
        let term = match pattern {
            Pattern::First => psi[(l, m, n)] * psi[(i, mp, np)] * psi[(lp, j, k)] * psi[(ip, jp, kp)],
            Pattern::Second => psi[(l, m, n)] * psi[(lp, j, np)] * psi[(i, mp, k)] * psi[(ip, jp, kp)],
            Pattern::Third => psi[(l, m, n)] * psi[(lp, mp, k)] * psi[(i, j, np)] * psi[(ip, jp, kp)],
        };
        q += term * sign;
    }
    q
}

/// Quartic form `q(ψ) = -2 Det(ψ)`; debug builds cross-check all three patterns.
pub fn quartic_form(psi: &PureState) -> C64 {
    let q = quartic_form_pattern(psi, Pattern::First);
    #[cfg(debug_assertions)]
    {
        let scale = psi.norm_sqr().powi(2);
        for p in [Pattern::Second, Pattern::Third] {
            let other = quartic_form_pattern(psi, p);
            debug_assert!((other - q).norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "quartic pattern {p:?} disagrees");
        }
    }
    q
}

/// Cayley's hyperdeterminant `Det(ψ) = -q(ψ)/2`.
pub fn hyperdeterminant(psi: &PureState) -> C64 {
    quartic_form(psi) * -0.5
}

/// Cubic covariant `T(ψ)` evaluated with the given index pattern.
pub fn cubic_tensor_pattern(psi: &PureState, pattern: Pattern) -> PureState {
    let mut amps = [ZERO; 8];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                let mut t = ZERO;
                for l in 0..2 {
                    for m in 0..2 {
                        for n in 0..2 {
                            let (lp, mp, np) = (1 - l, 1 - m, 1 - n);
                            let sign = flip_sign(l) * flip_sign(m) * flip_sign(n);
                            let term = match pattern {
                                Pattern::First => psi[(i, m, n)] * psi[(l, mp, np)] * psi[(lp, j, k)],
                                Pattern::Second => psi[(l, j, n)] * psi[(lp, m, np)] * psi[(i, mp, k)],
                                Pattern::Third => psi[(l, m, k)] * psi[(lp, mp, n)] * psi[(i, j, np)],
                            };
                            t -= term * sign;
                        }
                    }
                }
                amps[idx(i, j, k)] = t;
            }
        }
    }
    PureState { amps }
}

/// Cubic covariant `T(ψ)`, the FTS rank-3 tensor.
pub fn cubic_tensor(psi: &PureState) -> PureState {
    let t = cubic_tensor_pattern(psi, Pattern::First);
    #[cfg(debug_assertions)]
    {
        let scale = psi.norm().powi(3);
        for p in [Pattern::Second, Pattern::Third] {
            let other = cubic_tensor_pattern(psi, p);
            let diff = other.combine(C64::new(1.0, 0.0), &t, C64::new(-1.0, 0.0)).norm();
            debug_assert!(diff <= 1e-12 * scale.max(f64::MIN_POSITIVE), "cubic pattern {p:?} disagrees");
        }
    }
    t
}

/// Symmetric quadratic tensor `γ_a(ψ) ∈ H_a ⊗ H_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTensor {
    pub qubit: Qubit,
    pub entries: [[C64; 2]; 2],
}

impl PairTensor {
    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn asymmetry(&self) -> f64 {
        (self.entries[0][1] - self.entries[1][0]).norm()
    }
}

/// `γ_a(ψ)`: contracts the two qubits other than `a` with `ε` across two copies of ψ.
pub fn gamma(psi: &PureState, a: Qubit) -> PairTensor {
    let mut entries = [[ZERO; 2]; 2];
    for (x, row) in entries.iter_mut().enumerate() {
        for (xp, e) in row.iter_mut().enumerate() {
            let mut g = ZERO;
            for u in 0..2 {
                for v in 0..2 {
                    let sign = flip_sign(u) * flip_sign(v);
                    let (lhs, rhs) = match a {
                        Qubit::One => (psi[(x, u, v)], psi[(xp, 1 - u, 1 - v)]),
                        Qubit::Two => (psi[(u, x, v)], psi[(1 - u, xp, 1 - v)]),
                        Qubit::Three => (psi[(u, v, x)], psi[(1 - u, 1 - v, xp)]),
                    };
                    g += lhs * rhs * sign;
                }
            }
            *e = g;
        }
    }
    PairTensor { qubit: a, entries }
}

/// Partial trace of `|ψ⟩⟨ψ|` onto the kept qubits (one or two of them).
///
/// The kept qubits are ordered by label; for two kept qubits the row index
/// is `2·x_first + x_second`.
pub fn reduced_density(psi: &PureState, keep: &[Qubit]) -> Result<SmallMatrix> {
    let mut kept: Vec<Qubit> = keep.to_vec();
    kept.sort();
    kept.dedup();
    if kept.len() != keep.len() || kept.is_empty() || kept.len() > 2 {
        return Err(Error::InvalidSubsystemSet(keep.iter().map(|q| q.label()).collect()));
    }
    let traced: Vec<Qubit> = Qubit::ALL.iter().copied().filter(|q| !kept.contains(q)).collect();
    let dim = 1 << kept.len();
    let mut rho = SmallMatrix::zeros(dim)?;
    let full_index = |kept_bits: usize, traced_bits: usize| {
        let mut bits = [0usize; 3];
        for (pos, q) in kept.iter().enumerate() {
            bits[q.slot()] = (kept_bits >> (kept.len() - 1 - pos)) & 1;
        }
        for (pos, q) in traced.iter().enumerate() {
            bits[q.slot()] = (traced_bits >> (traced.len() - 1 - pos)) & 1;
        }
        idx(bits[0], bits[1], bits[2])
    };
    let amps = psi.amplitudes();
    for r in 0..dim {
        for c in 0..dim {
            rho[(r, c)] = (0..(1 << traced.len())).map(|t| amps[full_index(r, t)] * amps[full_index(c, t)].conj()).sum();
        }
    }
    Ok(rho)
}

/// Labels accepted for a kept-subsystem set, e.g. `[1]` or `[2, 3]`.
pub fn subsystem_set(labels: &[usize]) -> Result<Vec<Qubit>> {
    labels.iter().map(|&l| Qubit::new(l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn epsilon_is_antisymmetric() {
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(epsilon(i, j), -epsilon(j, i));
            }
        }
        assert_eq!(epsilon(0, 1), 1.0);
        assert_eq!(flip_sign(0), epsilon(0, 1));
        assert_eq!(flip_sign(1), epsilon(1, 0));
    }

    #[test]
    fn qubit_labels() {
        assert_eq!(Qubit::new(2).unwrap(), Qubit::Two);
        assert!(matches!(Qubit::new(0), Err(Error::InvalidSubsystem(0))));
        assert!(matches!(Qubit::new(4), Err(Error::InvalidSubsystem(4))));
        assert_eq!(Qubit::Two.others(), (Qubit::One, Qubit::Three));
    }

    #[test]
    fn norms() {
        assert!((PureState::ghz().norm() - 1.0).abs() < TOL);
        assert_eq!(PureState::zero().norm(), 0.0);
        assert!((PureState::ghz().scaled(C64::new(2.0, 0.0)).norm() - 2.0).abs() < TOL);
    }

    #[test]
    fn spin_flip_of_ghz_by_hand() {
        // ψ̃^{000} = conj ψ^{111}, ψ̃^{111} = -conj ψ^{000}.
        let f = spin_flip(&PureState::ghz());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f[(0, 0, 0)] - C64::new(h, 0.0)).norm() < TOL);
        assert!((f[(1, 1, 1)] - C64::new(-h, 0.0)).norm() < TOL);
        assert!((f.norm() - 1.0).abs() < TOL);
    }

    #[test]
    fn spin_flip_overlap_vanishes_for_three_qubits() {
        // ε⊗ε⊗ε is antisymmetric, so ⟨ψ̃|ψ⟩ = 0 for every ψ.
        for psi in [PureState::ghz(), PureState::w(), PureState::basis(0, 0, 0)] {
            assert!(spin_flip(&psi).inner(&psi).norm() < TOL);
        }
        let f = spin_flip(&PureState::basis(0, 0, 0));
        assert!((f[(1, 1, 1)] + C64::new(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn double_flip_is_minus_identity() {
        let psi = PureState::new([
            C64::new(0.1, 0.2),
            C64::new(-0.3, 0.0),
            C64::new(0.5, -0.1),
            C64::new(0.0, 0.4),
            C64::new(0.2, 0.2),
            C64::new(-0.1, 0.3),
            C64::new(0.25, 0.0),
            C64::new(0.0, -0.15),
        ])
        .unwrap();
        let back = spin_flip(&spin_flip(&psi));
        assert!(back.combine(C64::new(1.0, 0.0), &psi, C64::new(1.0, 0.0)).norm() < TOL);
    }

    #[test]
    fn quadratic_form_examples() {
        assert!((quadratic_form(&TwoQubitState::bell()) - C64::new(1.0, 0.0)).norm() < TOL);
        assert!(quadratic_form(&TwoQubitState::from_real([1.0, 0.0, 0.0, 0.0]).unwrap()).norm() < TOL);
    }

    #[test]
    fn quadratic_form_local_covariance() {
        let phi = TwoQubitState::new([C64::new(0.3, 0.1), C64::new(-0.2, 0.5), C64::new(0.6, 0.0), C64::new(0.1, -0.4)]).unwrap();
        let a = SmallMatrix::from_row_major(&[C64::new(1.0, 0.2), C64::new(0.3, 0.0), C64::new(-0.5, 0.1), C64::new(2.0, -1.0)])
            .unwrap();
        let b = SmallMatrix::from_real_rows(&[&[0.5, 1.5], &[-1.0, 0.25]]).unwrap();
        let ab = a.kron(&b).unwrap();
        let moved = ab.apply(phi.amplitudes());
        let moved = TwoQubitState::new([moved[0], moved[1], moved[2], moved[3]]).unwrap();
        let expect = a.det() * b.det() * quadratic_form(&phi);
        assert!((quadratic_form(&moved) - expect).norm() < 1e-12);
    }

    #[test]
    fn quartic_form_of_canonical_states() {
        assert!((quartic_form(&PureState::ghz()).norm() - 0.5).abs() < TOL);
        assert!(quartic_form(&PureState::w()).norm() < TOL);
        // Direct Cayley hyperdeterminant of GHZ: a000² a111² = 1/4.
        assert!((hyperdeterminant(&PureState::ghz()) - C64::new(0.25, 0.0)).norm() < TOL);
    }

    #[test]
    fn cubic_tensor_examples() {
        assert!(cubic_tensor(&PureState::basis(0, 0, 0)).norm() < TOL);
        for q in Qubit::ALL {
            assert!(cubic_tensor(&PureState::biseparable(q)).norm() < TOL);
        }
        assert!((cubic_tensor(&PureState::ghz()).norm() - 0.5).abs() < TOL);
    }

    #[test]
    fn gamma_examples() {
        for q in Qubit::ALL {
            assert!(gamma(&PureState::basis(0, 0, 0), q).norm_sqr() < TOL);
            assert!((gamma(&PureState::ghz(), q).norm_sqr() - 0.5).abs() < TOL);
        }
        let b = PureState::biseparable(Qubit::One);
        let g: Vec<f64> = Qubit::ALL.iter().map(|&q| gamma(&b, q).norm_sqr()).collect();
        assert!((g[1] + g[2]).abs() < TOL);
        assert!((g[0] + g[2] - 1.0).abs() < TOL);
    }

    #[test]
    fn reduced_density_examples() {
        let rho = reduced_density(&PureState::ghz(), &[Qubit::One]).unwrap();
        assert!((rho - SmallMatrix::diag(&[0.5, 0.5]).unwrap()).frobenius_norm() < TOL);

        let rho = reduced_density(&PureState::basis(0, 0, 0), &[Qubit::Two, Qubit::Three]).unwrap();
        assert!((rho - SmallMatrix::diag(&[1.0, 0.0, 0.0, 0.0]).unwrap()).frobenius_norm() < TOL);

        let rho = reduced_density(&PureState::w(), &[Qubit::One]).unwrap();
        assert!((rho - SmallMatrix::diag(&[2.0 / 3.0, 1.0 / 3.0]).unwrap()).frobenius_norm() < TOL);
    }

    #[test]
    fn reduced_density_rejects_bad_sets() {
        let psi = PureState::ghz();
        assert!(reduced_density(&psi, &[]).is_err());
        assert!(reduced_density(&psi, &[Qubit::One, Qubit::One]).is_err());
        assert!(reduced_density(&psi, &Qubit::ALL).is_err());
        assert!(subsystem_set(&[1, 5]).is_err());
    }

    #[test]
    fn local_operator_on_each_qubit() {
        let x = SmallMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let s = PureState::basis(0, 0, 0);
        assert_eq!(s.apply_local(Qubit::One, &x), PureState::basis(1, 0, 0));
        assert_eq!(s.apply_local(Qubit::Two, &x), PureState::basis(0, 1, 0));
        assert_eq!(s.apply_local(Qubit::Three, &x), PureState::basis(0, 0, 1));
    }

    #[test]
    fn permutation_moves_amplitudes() {
        let s = PureState::basis(1, 0, 0);
        // Slot 1 of the result holds original qubit 3 and slot 3 holds qubit 1.
        let p = s.permuted([Qubit::Three, Qubit::Two, Qubit::One]);
        assert_eq!(p, PureState::basis(0, 0, 1));
    }

    #[test]
    fn named_states() {
        for name in PureState::NAMES {
            assert!(PureState::named(name).is_some(), "{name}");
        }
        assert!(PureState::named("bell").is_none());
        assert_eq!(PureState::named("bisep2").unwrap(), PureState::biseparable(Qubit::Two));
    }
}
