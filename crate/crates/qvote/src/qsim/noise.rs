//! Seeded Monte-Carlo noise and the simulator's randomness stream.
//!
//! A [`Noise`] session owns one ChaCha12 stream seeded from
//! [`NoiseConfig::rng_seed`]. Everything stochastic in a run draws from that
//! single stream in application order, which makes any election or sweep
//! bit-reproducible. The draw protocol is fixed:
//!
//! - per gate application, per target qubit: one uniform `f64`; if it falls
//!   below `gate_error_p`, one uniform choice among {X, Y, Z} selects the
//!   Pauli inserted after the ideal gate. No draws happen at
//!   `gate_error_p == 0`.
//! - per measurement shot: one uniform `f64` selects the basis index from the
//!   Born distribution; then, only when `meas_error_p > 0`, one uniform `f64`
//!   per qubit (in qubit order) decides a classical readout flip of that bit.
//!
//! Gate noise is a symmetric depolarizing channel realized as a Monte-Carlo
//! trajectory: one stochastic Pauli insertion per draw rather than a density
//! matrix, keeping memory at one amplitude vector.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{GateKind, QsimError};

/// Gate-error and readout-error probabilities plus the stream seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Probability of one Pauli insertion per gate application per target qubit.
    pub gate_error_p: f64,
    /// Probability of a classical readout flip per measured bit.
    pub meas_error_p: f64,
    /// Seed of the ChaCha12 stream driving all draws.
    pub rng_seed: u64,
}

impl NoiseConfig {
    /// Zero error probabilities; the stream still drives shot sampling.
    pub fn noiseless(rng_seed: u64) -> Self {
        NoiseConfig {
            gate_error_p: 0.0,
            meas_error_p: 0.0,
            rng_seed,
        }
    }
}

/// A live noise session: validated probabilities plus the seeded stream.
pub struct Noise {
    gate_error_p: f64,
    meas_error_p: f64,
    rng: ChaCha12Rng,
}

impl Noise {
    pub fn new(config: &NoiseConfig) -> Result<Self, QsimError> {
        for p in [config.gate_error_p, config.meas_error_p] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(QsimError::InvalidProbability(p));
            }
        }
        Ok(Noise {
            gate_error_p: config.gate_error_p,
            meas_error_p: config.meas_error_p,
            rng: ChaCha12Rng::seed_from_u64(config.rng_seed),
        })
    }

    /// A session with zero error probabilities, still usable for sampling.
    pub fn noiseless(rng_seed: u64) -> Self {
        Noise::new(&NoiseConfig::noiseless(rng_seed)).expect("zero probabilities are valid")
    }

    pub fn gate_error_p(&self) -> f64 {
        self.gate_error_p
    }

    pub fn meas_error_p(&self) -> f64 {
        self.meas_error_p
    }

    /// One gate-noise decision for one target qubit.
    ///
    /// Draws nothing when `gate_error_p == 0`; otherwise consumes one uniform
    /// `f64` and, on error, one uniform Pauli choice.
    pub(crate) fn draw_pauli(&mut self) -> Option<GateKind> {
        if self.gate_error_p == 0.0 {
            return None;
        }
        if self.rng.random::<f64>() >= self.gate_error_p {
            return None;
        }
        Some(match self.rng.random_range(0..3u8) {
            0 => GateKind::X,
            1 => GateKind::Y,
            _ => GateKind::Z,
        })
    }

    /// One uniform draw in [0, 1) for Born-rule shot sampling.
    pub(crate) fn draw_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// One readout-flip decision; draws nothing when `meas_error_p == 0`.
    pub(crate) fn draw_readout_flip(&mut self) -> bool {
        self.meas_error_p > 0.0 && self.rng.random::<f64>() < self.meas_error_p
    }

    /// Direct access to the underlying stream, for key generation and other
    /// protocol-level draws that share the session.
    pub fn rng_mut(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }
}

/// Derives an independent sub-seed for a parallel trajectory or sweep point.
///
/// `sub_seed = first 8 bytes of SHA-256(master_seed_be || index_be)`, so
/// distinct indices give effectively independent streams while staying
/// reproducible from the master seed alone.
pub fn derive_sub_seed(master_seed: u64, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master_seed.to_be_bytes());
    hasher.update(index.to_be_bytes());
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
