//! Dense complex linear algebra on 2×2 and 4×4 matrices.
//!
//! Only what the measures need: products, traces, determinants, Kronecker
//! products, a cyclic Jacobi eigensolver for Hermitian input and the PSD
//! square root built on it.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Entries within this absolute distance of their mirrored conjugate count
/// as Hermitian (scaled up for matrices of norm above one).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are rounded up to zero.
pub const PSD_CLAMP: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Square complex matrix of dimension 2 or 4, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct SmallMatrix {
    dim: usize,
    data: [C64; 16],
}

impl SmallMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::InvalidInput(format!("matrix dimension {dim} not in {{2, 4}}")));
        }
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(values.len())?;
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; the length must be 4 or 16.
    pub fn from_row_major(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(Error::InvalidInput(format!("{n} entries do not form a 2×2 or 4×4 matrix"))),
        };
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let mut m = Self::zeros(dim)?;
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let entries: Vec<C64> = rows.iter().flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0))).collect();
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(Error::InvalidInput("rows must form a square matrix".into()));
        }
        Self::from_row_major(&entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = *self;
        for z in out.data.iter_mut() {
            *z = z.conj();
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for z in out.data.iter_mut() {
            *z *= s;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Determinant by cofactor expansion (2×2) or partial-pivot elimination (4×4).
    pub fn det(&self) -> C64 {
        if self.dim == 2 {
            return self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)];
        }
        let n = self.dim;
        let mut a = *self;
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n).max_by(|&r, &s| a[(r, col)].norm().total_cmp(&a[(s, col)].norm())).unwrap_or(col);
            if a[(pivot, col)].norm() == 0.0 {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    let tmp = a[(col, k)];
                    a[(col, k)] = a[(pivot, k)];
                    a[(pivot, k)] = tmp;
                }
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for r in col + 1..n {
                let f = a[(r, col)] / p;
                for k in col..n {
                    let v = a[(col, k)];
                    a[(r, k)] -= f * v;
                }
            }
        }
        det
    }

    /// `self ⊗ other` for two 2×2 matrices.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::InvalidInput("kron is defined for 2×2 factors only".into()));
        }
        let mut out = Self::zeros(4)?;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[(2 * i + k, 2 * j + l)] = self[(i, j)] * other[(k, l)];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute deviation `|H_ij - conj(H_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.frobenius_norm().max(1.0)
    }

    fn check_hermitian(&self) -> Result<()> {
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        if !self.is_hermitian() {
            return Err(Error::NotHermitian { deviation: self.hermitian_deviation() });
        }
        Ok(())
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, k)]).collect()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }
}

impl Index<(usize, usize)> for SmallMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for SmallMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for SmallMatrix {
    type Output = SmallMatrix;
    fn mul(self, rhs: SmallMatrix) -> SmallMatrix {
        Mul::mul(&self, &rhs)
    }
}

impl Mul for &SmallMatrix {
    type Output = SmallMatrix;
    fn mul(self, rhs: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = SmallMatrix { dim: n, data: [ZERO; 16] };
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = (0..n).map(|k| self[(i, k)] * rhs[(k, j)]).sum();
            }
        }
        out
    }
}

impl Add for SmallMatrix {
    type Output = SmallMatrix;
    fn add(mut self, rhs: SmallMatrix) -> SmallMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for SmallMatrix {
    type Output = SmallMatrix;
    fn sub(mut self, rhs: SmallMatrix) -> SmallMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        self
    }
}

impl fmt::Debug for SmallMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SmallMatrix({}×{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{:+.6}{:+.6}i", self[(i, j)].re, self[(i, j)].im)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Spectrum of a Hermitian matrix: eigenvalues in descending order and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: SmallMatrix,
}

impl Eigensystem {
    /// `Σ_k f(λ_k) v_k v_k†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> SmallMatrix {
        let n = self.vectors.dim;
        let mut out = SmallMatrix { dim: n, data: [ZERO; 16] };
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `H_pq` with a diagonal
/// unitary and then applies the real symmetric Jacobi rotation. Sweeps run in
/// fixed row-major pivot order until the off-diagonal Frobenius norm drops
/// below `1e-14·‖H‖`.
pub fn hermitian_eigensystem(h: &SmallMatrix) -> Result<Eigensystem> {
    h.check_hermitian()?;
    let n = h.dim;
    // Symmetrize so round-off in the input does not leak into the rotations.
    let mut a = *h;
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = SmallMatrix::identity(n)?;
    let scale = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = SmallMatrix::zeros(n)?;
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(Eigensystem { values, vectors })
}

fn off_diagonal_norm(a: &SmallMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..a.dim {
        for j in 0..a.dim {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut SmallMatrix, v: &mut SmallMatrix, p: usize, q: usize) {
    let h = a[(p, q)];
    let mag = h.norm();
    if mag == 0.0 {
        return;
    }
    let phase = h / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = diag(1, conj(phase)) · [[c, s], [-s, c]] restricted to (p, q).
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    let n = a.dim;
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * g_pp + y * g_qp;
        a[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(h: &SmallMatrix) -> Result<SmallMatrix> {
    let eig = hermitian_eigensystem(h)?;
    if let Some(&min) = eig.values.last() {
        if min < -PSD_CLAMP {
            return Err(Error::NotPositive { eigenvalue: min });
        }
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}
