//! Grover lookup of a hash ID in the registered-voter database.
//!
//! The database is padded with a sentinel digest to a power of two M = 2^m
//! and searched with m index qubits: a uniform superposition, then
//! k = ⌊π / (4·arcsin(1/√M))⌋ rounds of oracle phase flip plus inversion
//! about the mean. For a single present target the success probability is
//! sin²((2k+1)·arcsin(1/√M)) — exactly 1 at M = 4 — and an absent target
//! leaves the uniform distribution untouched.
//!
//! Two simulation privileges are declared here. The oracle compares digests
//! classically while building its phase-flip diagonal; no reversible hash
//! circuit is synthesized. And the oracle and diffusion steps each count as
//! one m-qubit gate application for Monte-Carlo noise, taking one Pauli
//! decision per index qubit, while the initial superposition runs through
//! ordinary per-gate H noise.
//!
//! Whatever the sampled modal outcome says, the hit is rechecked classically
//! against the database, so a noisy search can miss but can never falsely
//! accept.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::HashId;
use crate::ledger::Digest256;
use crate::qsim::{GateOp, Noise, QsimError, StateVector};

/// Reserved padding digest; a real SHA-256 hash ID never equals it.
pub const SENTINEL: Digest256 = Digest256([0xFF; 32]);

/// Search-space cap: 10 index qubits.
pub const MAX_DATABASE: usize = 1024;

/// Databases are padded to at least this size so that a freshly opened
/// registry with one entry still amplifies to certainty (M = 4, k = 1).
pub const MIN_DATABASE: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum GroverError {
    #[error("database size {0} exceeds the cap of {MAX_DATABASE}")]
    DatabaseTooLarge(usize),
    #[error("database size {0} must be a power of two of at least 2")]
    BadDatabaseSize(usize),
    #[error("target digest appears {0} times; registration guarantees at most one")]
    AmbiguousTarget(usize),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// A padded database, the digest to find, and the index-register width.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchProblem {
    pub database: Vec<Digest256>,
    pub target: HashId,
    pub index_qubits: usize,
}

impl SearchProblem {
    /// Pads the database with [`SENTINEL`] entries to a power of two (at
    /// least [`MIN_DATABASE`]) and derives the index-register width.
    pub fn new(mut database: Vec<Digest256>, target: HashId) -> Result<Self, GroverError> {
        if database.len() > MAX_DATABASE {
            return Err(GroverError::DatabaseTooLarge(database.len()));
        }
        let size = database.len().next_power_of_two().max(MIN_DATABASE);
        database.resize(size, SENTINEL);
        Ok(SearchProblem {
            database,
            target,
            index_qubits: size.trailing_zeros() as usize,
        })
    }
}

/// Result of one Grover lookup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// True iff the modal sampled index passes the classical recheck.
    pub found: bool,
    /// The verified database index, present only when `found`.
    pub index: Option<usize>,
    /// Exact |amplitude|² on the target index before sampling; zero when the
    /// target is absent.
    pub success_prob: f64,
}

/// The standard single-target iteration count ⌊π / (4·arcsin(1/√M))⌋.
pub fn iteration_count(database_size: usize) -> usize {
    let theta = (1.0 / (database_size as f64).sqrt()).asin();
    (std::f64::consts::PI / (4.0 * theta)).floor() as usize
}

/// Runs the Grover lookup and rechecks the modal outcome classically.
pub fn grover_search(
    problem: &SearchProblem,
    noise: &mut Noise,
    shots: u64,
) -> Result<SearchOutcome, GroverError> {
    let size = problem.database.len();
    if size < 2 || !size.is_power_of_two() {
        return Err(GroverError::BadDatabaseSize(size));
    }
    if size > MAX_DATABASE {
        return Err(GroverError::DatabaseTooLarge(size));
    }
    let m = size.trailing_zeros() as usize;
    let target_digest = Digest256(problem.target.digest);
    let marked: Vec<bool> = problem
        .database
        .iter()
        .map(|d| *d == target_digest)
        .collect();
    let n_marked = marked.iter().filter(|&&hit| hit).count();
    if n_marked > 1 {
        return Err(GroverError::AmbiguousTarget(n_marked));
    }
    let target_index = marked.iter().position(|&hit| hit);

    let mut state = StateVector::basis(m, 0)?;
    for q in 0..m {
        state.apply_gate(&GateOp::h(q), Some(noise))?;
    }
    for _ in 0..iteration_count(size) {
        oracle_phase_flip(&mut state, &marked);
        noise_layer(&mut state, noise)?;
        invert_about_mean(&mut state);
        noise_layer(&mut state, noise)?;
    }

    // Rounding through the H layer can push |amp|² a few ulps past 1.
    let success_prob = target_index.map_or(0.0, |t| state.probability(t).min(1.0));

    let counts = state.measure_shots(shots, noise);
    let modal = (0..size)
        .max_by_key(|&i| counts.count_index(i))
        .expect("nonempty database");
    let found = problem.database[modal] == target_digest;
    Ok(SearchOutcome {
        found,
        index: found.then_some(modal),
        success_prob,
    })
}

/// Replaces every copy of a hash ID by the sentinel, preserving size.
/// Idempotent; a removed ID can never be found again.
pub fn remove_id(database: &mut [Digest256], id: &HashId) {
    let digest = Digest256(id.digest);
    for entry in database.iter_mut() {
        if *entry == digest {
            *entry = SENTINEL;
        }
    }
}

fn oracle_phase_flip(state: &mut StateVector, marked: &[bool]) {
    let amps: Vec<_> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, &a)| if marked[i] { -a } else { a })
        .collect();
    *state = StateVector::from_amplitudes(amps).expect("phase flip preserves norm");
}

fn invert_about_mean(state: &mut StateVector) {
    let amps = state.amplitudes();
    let mean = amps.iter().sum::<num_complex::Complex64>() / amps.len() as f64;
    let reflected: Vec<_> = amps.iter().map(|&a| 2.0 * mean - a).collect();
    *state = StateVector::from_amplitudes(reflected).expect("reflection preserves norm");
}

/// One Pauli decision per index qubit, the noise cost of a full-register step.
fn noise_layer(state: &mut StateVector, noise: &mut Noise) -> Result<(), QsimError> {
    for q in 0..state.n_qubits() {
        if let Some(pauli) = noise.draw_pauli() {
            state.apply_gate(&GateOp::new(pauli, vec![q], false)?, None)?;
        }
    }
    Ok(())
}
