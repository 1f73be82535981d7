//! Seeded random streams and the Haar samplers built on them.
//!
//! Streams are ChaCha20 keyed by a 64-bit seed; independent sub-streams use
//! the ChaCha stream id, so trial `t` of a run with seed `s` always sees the
//! same numbers regardless of how trials are scheduled across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::linalg::{SmallMatrix, C64};
use crate::tensor::PureState;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Sub-stream `index` of `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(index);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal())
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Normalized vector of eight i.i.d. complex Gaussians (unitarily invariant).
pub fn sample_haar_state(rng: &mut RngStream) -> PureState {
    loop {
        let amps = std::array::from_fn(|_| rng.complex_normal());
        let psi = PureState::new(amps).expect("gaussians are finite");
        if let Some(unit) = psi.normalized() {
            return unit;
        }
    }
}

/// Haar-distributed element of U(2).
pub fn sample_haar_unitary(rng: &mut RngStream) -> SmallMatrix {
    let (a, b) = loop {
        let a = rng.complex_normal();
        let b = rng.complex_normal();
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n > 0.0 {
            break (a / n, b / n);
        }
    };
    let phase = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.uniform());
    SmallMatrix::from_row_major(&[a, -phase * b.conj(), b, phase * a.conj()]).expect("finite 2×2")
}
