//! Dense state-vector simulation of small qubit registers.
//!
//! A [`StateVector`] holds the 2ⁿ complex amplitudes of an n-qubit register
//! and supports the fixed gate set of [`GateOp`], Bell-basis entangling via
//! [`EntangleSpec`], seeded Monte-Carlo noise ([`Noise`]), and shot-based
//! measurement into [`Counts`].
//!
//! # Conventions
//!
//! - Qubit 0 is the **leftmost** bit of a ket label: `|10⟩` means qubit 0 is
//!   one and qubit 1 is zero, and names basis index 2. Ecosystems disagree on
//!   this, so it is fixed here once.
//! - States equal up to a global phase are physically identical; equality
//!   checks go through [`StateVector::fidelity`].
//! - Registers are capped at 20 qubits, the sensible bound for dense
//!   desk-scale simulation.

mod counts;
mod gate;
mod noise;

pub use counts::{bitstring, Counts};
pub use gate::{GateKind, GateOp};
pub use noise::{derive_sub_seed, Noise, NoiseConfig};

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense-simulation register cap.
pub const MAX_QUBITS: usize = 20;

/// Normalization tolerance for Σ|amp|² = 1 checks.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("basis index {index} out of range for {n_qubits} qubit(s)")]
    InvalidBasisIndex { index: usize, n_qubits: usize },
    #[error("target qubit {target} out of range for {n_qubits} qubit(s)")]
    InvalidTarget { target: usize, n_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("state dimensions differ: {0} vs {1} qubit(s)")]
    DimensionMismatch(usize, usize),
    #[error("{0} qubits exceed the dense-simulation cap of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("amplitude vector is not normalized (Σ|amp|² = {0})")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two")]
    BadDimension(usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("malformed gate descriptor {0:?}")]
    BadGateDescriptor(String),
    #[error("unknown Bell variant {0:?}")]
    BadBellVariant(String),
}

/// Whether to apply an entangling unitary or its exact adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// The four maximally entangled two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellVariant {
    /// (|00⟩ + |11⟩)/√2
    PhiPlus,
    /// (|00⟩ − |11⟩)/√2
    PhiMinus,
    /// (|01⟩ + |10⟩)/√2
    PsiPlus,
    /// (|01⟩ − |10⟩)/√2
    PsiMinus,
}

impl BellVariant {
    pub const ALL: [BellVariant; 4] = [
        BellVariant::PhiPlus,
        BellVariant::PhiMinus,
        BellVariant::PsiPlus,
        BellVariant::PsiMinus,
    ];

    fn name(self) -> &'static str {
        match self {
            BellVariant::PhiPlus => "PhiPlus",
            BellVariant::PhiMinus => "PhiMinus",
            BellVariant::PsiPlus => "PsiPlus",
            BellVariant::PsiMinus => "PsiMinus",
        }
    }
}

impl fmt::Display for BellVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellVariant {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PhiPlus" => Ok(BellVariant::PhiPlus),
            "PhiMinus" => Ok(BellVariant::PhiMinus),
            "PsiPlus" => Ok(BellVariant::PsiPlus),
            "PsiMinus" => Ok(BellVariant::PsiMinus),
            _ => Err(QsimError::BadBellVariant(s.to_string())),
        }
    }
}

/// A chosen Bell-basis entangling unitary on an ordered qubit pair.
///
/// The forward unitary is a Pauli-X pre-layer selecting the variant (X on the
/// first pair element for the minus variants, X on the second for the Psi
/// variants) followed by H on the first element and CNOT(first → second).
/// Applied to |00⟩ of the pair it prepares the named Bell state; the inverse
/// applies the reversed adjoint sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntangleSpec {
    pub bell_variant: BellVariant,
    pub qubit_pair: (usize, usize),
}

impl EntangleSpec {
    pub fn new(bell_variant: BellVariant, qubit_pair: (usize, usize)) -> Result<Self, QsimError> {
        if qubit_pair.0 == qubit_pair.1 {
            return Err(QsimError::DuplicateTarget(qubit_pair.0));
        }
        Ok(EntangleSpec {
            bell_variant,
            qubit_pair,
        })
    }

    /// Gate sequence realizing the unitary in the given direction.
    pub fn gates(&self, direction: Direction) -> Vec<GateOp> {
        let (a, b) = self.qubit_pair;
        let mut forward = Vec::with_capacity(4);
        match self.bell_variant {
            BellVariant::PhiPlus => {}
            BellVariant::PhiMinus => forward.push(GateOp::x(a)),
            BellVariant::PsiPlus => forward.push(GateOp::x(b)),
            BellVariant::PsiMinus => {
                forward.push(GateOp::x(a));
                forward.push(GateOp::x(b));
            }
        }
        forward.push(GateOp::h(a));
        forward.push(GateOp::cnot(a, b).expect("pair indices differ"));
        match direction {
            Direction::Forward => forward,
            Direction::Inverse => forward.iter().rev().map(GateOp::inverse).collect(),
        }
    }

    /// Canonical descriptor, e.g. `PhiPlus@0,1`.
    pub fn descriptor(&self) -> String {
        format!("{}@{},{}", self.bell_variant, self.qubit_pair.0, self.qubit_pair.1)
    }
}

impl FromStr for EntangleSpec {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QsimError::BadBellVariant(s.to_string());
        let (name, pair) = s.split_once('@').ok_or_else(bad)?;
        let variant: BellVariant = name.parse()?;
        let (a, b) = pair.split_once(',').ok_or_else(bad)?;
        let a = a.trim().parse::<usize>().map_err(|_| bad())?;
        let b = b.trim().parse::<usize>().map_err(|_| bad())?;
        EntangleSpec::new(variant, (a, b))
    }
}

/// Complex amplitudes of an n-qubit register over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state |basis_index⟩ on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, basis_index: usize) -> Result<Self, QsimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if basis_index >= dim {
            return Err(QsimError::InvalidBasisIndex {
                index: basis_index,
                n_qubits,
            });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[basis_index] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Builds a state from explicit amplitudes.
    ///
    /// The length must be a power of two within the register cap and the
    /// vector must be normalized within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(QsimError::BadDimension(dim));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(QsimError::TooManyQubits(n_qubits));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QsimError::NotNormalized(norm));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Born probability of one basis index.
    pub fn probability(&self, basis_index: usize) -> f64 {
        self.amps[basis_index].norm_sqr()
    }

    /// Bit mask selecting qubit `q` inside a basis index (qubit 0 leftmost).
    fn qubit_mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    fn check_targets(&self, gate: &GateOp) -> Result<(), QsimError> {
        if gate.max_target() >= self.n_qubits {
            return Err(QsimError::InvalidTarget {
                target: gate.max_target(),
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Applies one gate, then one Monte-Carlo noise decision per target qubit
    /// when a session with nonzero gate error is supplied.
    pub fn apply_gate(&mut self, gate: &GateOp, noise: Option<&mut Noise>) -> Result<(), QsimError> {
        self.check_targets(gate)?;
        self.apply_unitary(gate);
        if let Some(noise) = noise {
            for &q in gate.targets() {
                if let Some(pauli) = noise.draw_pauli() {
                    self.apply_unitary(&GateOp::new(pauli, vec![q], false).expect("single target"));
                }
            }
        }
        Ok(())
    }

    /// Applies the Bell-basis entangling unitary of `spec` (or its adjoint).
    ///
    /// Realized as the gate sequence of [`EntangleSpec::gates`], so gate noise
    /// applies per constituent gate. Inverse∘forward is the identity on any
    /// state when noiseless.
    pub fn apply_entangle(
        &mut self,
        spec: &EntangleSpec,
        direction: Direction,
        mut noise: Option<&mut Noise>,
    ) -> Result<(), QsimError> {
        for gate in spec.gates(direction) {
            self.apply_gate(&gate, noise.as_deref_mut())?;
        }
        Ok(())
    }

    fn apply_unitary(&mut self, gate: &GateOp) {
        match gate.kind() {
            GateKind::X => {
                let mask = self.qubit_mask(gate.targets()[0]);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        self.amps.swap(i, i | mask);
                    }
                }
            }
            GateKind::Y => {
                let mask = self.qubit_mask(gate.targets()[0]);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let low = self.amps[i];
                        let high = self.amps[j];
                        self.amps[i] = -Complex64::i() * high;
                        self.amps[j] = Complex64::i() * low;
                    }
                }
            }
            GateKind::Z => {
                let mask = self.qubit_mask(gate.targets()[0]);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *amp = -*amp;
                    }
                }
            }
            GateKind::H => {
                let mask = self.qubit_mask(gate.targets()[0]);
                for i in 0..self.amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let low = self.amps[i];
                        let high = self.amps[j];
                        self.amps[i] = FRAC_1_SQRT_2 * (low + high);
                        self.amps[j] = FRAC_1_SQRT_2 * (low - high);
                    }
                }
            }
            GateKind::S | GateKind::T => {
                let mask = self.qubit_mask(gate.targets()[0]);
                let phase = match (gate.kind(), gate.is_adjoint()) {
                    (GateKind::S, false) => Complex64::i(),
                    (GateKind::S, true) => -Complex64::i(),
                    (GateKind::T, false) => Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
                    (GateKind::T, true) => Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
                    _ => unreachable!(),
                };
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask != 0 {
                        *amp *= phase;
                    }
                }
            }
            GateKind::Cnot => {
                let control = self.qubit_mask(gate.targets()[0]);
                let target = self.qubit_mask(gate.targets()[1]);
                for i in 0..self.amps.len() {
                    if i & control != 0 && i & target == 0 {
                        self.amps.swap(i, i | target);
                    }
                }
            }
            GateKind::Cz => {
                let a = self.qubit_mask(gate.targets()[0]);
                let b = self.qubit_mask(gate.targets()[1]);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & a != 0 && i & b != 0 {
                        *amp = -*amp;
                    }
                }
            }
        }
    }

    /// Samples `shots` measurements from the Born distribution.
    ///
    /// The state is not mutated: repeated preparation of the same register is
    /// modeled by re-sampling from one state vector, a declared simulation
    /// privilege. Readout bits flip independently with the session's
    /// `meas_error_p`.
    pub fn measure_shots(&self, shots: u64, noise: &mut Noise) -> Counts {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for amp in &self.amps {
            acc += amp.norm_sqr();
            cdf.push(acc);
        }
        // Guard the top of the range against rounding drift.
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        let mut index_counts = vec![0u64; self.amps.len()];
        for _ in 0..shots {
            let u = noise.draw_uniform();
            let mut outcome = cdf.partition_point(|&c| c <= u);
            if noise.meas_error_p() > 0.0 {
                for q in 0..self.n_qubits {
                    if noise.draw_readout_flip() {
                        outcome ^= self.qubit_mask(q);
                    }
                }
            }
            index_counts[outcome] += 1;
        }
        Counts::from_index_counts(self.n_qubits, &index_counts)
    }

    /// |⟨self|other⟩|²: 1 iff the states are equal up to global phase.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, QsimError> {
        if self.n_qubits != other.n_qubits {
            return Err(QsimError::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        let overlap: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(overlap.norm_sqr())
    }

    /// Σ|amp|², which any gate sequence must keep at 1.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    const TOL: f64 = 1e-10;

    fn eq1_state() -> StateVector {
        let w = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        StateVector::from_amplitudes(vec![w, w, Complex64::ZERO, w]).unwrap()
    }

    #[test]
    fn basis_states_place_unit_amplitude() {
        let s = StateVector::basis(2, 0).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::ONE);
        assert!(s.amplitudes()[1..].iter().all(|a| *a == Complex64::ZERO));

        let s = StateVector::basis(2, 3).unwrap();
        assert_eq!(s.amplitudes()[3], Complex64::ONE);
    }

    #[test]
    fn basis_index_out_of_range_rejected() {
        assert_eq!(
            StateVector::basis(1, 2),
            Err(QsimError::InvalidBasisIndex {
                index: 2,
                n_qubits: 1
            })
        );
    }

    #[test]
    fn qubit_count_cap_enforced() {
        assert!(StateVector::basis(MAX_QUBITS + 1, 0).is_err());
        assert!(StateVector::basis(0, 0).is_err());
    }

    #[test]
    fn from_amplitudes_rejects_unnormalized() {
        let amps = vec![Complex64::new(0.5, 0.0); 4];
        assert!(matches!(
            StateVector::from_amplitudes(amps.clone()).map(|_| ()),
            Err(QsimError::NotNormalized(_)) | Ok(())
        ));
        let bad = vec![Complex64::ONE; 4];
        assert!(matches!(
            StateVector::from_amplitudes(bad),
            Err(QsimError::NotNormalized(_))
        ));
        let odd = vec![Complex64::ONE; 3];
        assert!(matches!(
            StateVector::from_amplitudes(odd),
            Err(QsimError::BadDimension(3))
        ));
    }

    #[test]
    fn x_flips_leftmost_qubit_zero() {
        // Qubit 0 is the leftmost label bit: X@0 on |00⟩ gives |10⟩ (index 2).
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_gate(&GateOp::x(0), None).unwrap();
        assert!((s.probability(2) - 1.0).abs() < TOL);
    }

    #[test]
    fn hadamard_makes_equal_superposition() {
        let mut s = StateVector::basis(1, 0).unwrap();
        s.apply_gate(&GateOp::h(0), None).unwrap();
        assert!((s.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < TOL);
        assert!((s.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < TOL);
    }

    #[test]
    fn cnot_completes_bell_construction() {
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_gate(&GateOp::h(0), None).unwrap();
        s.apply_gate(&GateOp::cnot(0, 1).unwrap(), None).unwrap();
        assert!((s.probability(0) - 0.5).abs() < TOL);
        assert!((s.probability(3) - 0.5).abs() < TOL);
        assert!(s.probability(1) < TOL);
        assert!(s.probability(2) < TOL);
    }

    #[test]
    fn gate_target_out_of_range_rejected() {
        let mut s = StateVector::basis(2, 0).unwrap();
        assert_eq!(
            s.apply_gate(&GateOp::x(2), None),
            Err(QsimError::InvalidTarget {
                target: 2,
                n_qubits: 2
            })
        );
    }

    #[test]
    fn certain_gate_error_inserts_exactly_the_streamed_pauli() {
        // Oracle: replay the documented draw protocol on a fresh stream and
        // build the expected state independently.
        let seed = 11;
        let config = NoiseConfig {
            gate_error_p: 1.0,
            meas_error_p: 0.0,
            rng_seed: seed,
        };
        let mut noisy = StateVector::basis(1, 0).unwrap();
        let mut session = Noise::new(&config).unwrap();
        noisy.apply_gate(&GateOp::x(0), Some(&mut session)).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let u = rng.random::<f64>();
        assert!(u < 1.0);
        let pauli = match rng.random_range(0..3u8) {
            0 => GateOp::x(0),
            1 => GateOp::y(0),
            _ => GateOp::z(0),
        };
        let mut expected = StateVector::basis(1, 0).unwrap();
        expected.apply_gate(&GateOp::x(0), None).unwrap();
        expected.apply_gate(&pauli, None).unwrap();

        assert!((noisy.fidelity(&expected).unwrap() - 1.0).abs() < TOL);
        // And the extra Pauli moved the state off the ideal |1⟩ unless it was Z-like.
        let mut ideal = StateVector::basis(1, 0).unwrap();
        ideal.apply_gate(&GateOp::x(0), None).unwrap();
        let fid_ideal = noisy.fidelity(&ideal).unwrap();
        match pauli.kind() {
            GateKind::Z => assert!((fid_ideal - 1.0).abs() < TOL),
            _ => assert!(fid_ideal < 1.0 - 1e-6),
        }
    }

    #[test]
    fn forward_bell_variants_prepare_named_states() {
        let expect = |variant: BellVariant| -> Vec<Complex64> {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            match variant {
                BellVariant::PhiPlus => vec![h, Complex64::ZERO, Complex64::ZERO, h],
                BellVariant::PhiMinus => vec![h, Complex64::ZERO, Complex64::ZERO, -h],
                BellVariant::PsiPlus => vec![Complex64::ZERO, h, h, Complex64::ZERO],
                BellVariant::PsiMinus => vec![Complex64::ZERO, h, -h, Complex64::ZERO],
            }
        };
        for variant in BellVariant::ALL {
            let spec = EntangleSpec::new(variant, (0, 1)).unwrap();
            let mut s = StateVector::basis(2, 0).unwrap();
            s.apply_entangle(&spec, Direction::Forward, None).unwrap();
            let want = StateVector::from_amplitudes(expect(variant)).unwrap();
            assert!(
                (s.fidelity(&want).unwrap() - 1.0).abs() < TOL,
                "variant {variant} prepared {:?}",
                s.amplitudes()
            );
        }
    }

    #[test]
    fn entangle_inverse_of_forward_is_identity_on_eq1_state() {
        for variant in BellVariant::ALL {
            let spec = EntangleSpec::new(variant, (0, 1)).unwrap();
            let original = eq1_state();
            let mut s = original.clone();
            s.apply_entangle(&spec, Direction::Forward, None).unwrap();
            s.apply_entangle(&spec, Direction::Inverse, None).unwrap();
            assert!((s.fidelity(&original).unwrap() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn eq1_state_never_measures_the_unapproved_basis() {
        let mut session = Noise::noiseless(5);
        let counts = eq1_state().measure_shots(1024, &mut session);
        assert_eq!(counts.count("10"), 0);
        assert_eq!(counts.shots, 1024);
    }

    #[test]
    fn certain_readout_error_flips_every_bit() {
        let mut session = Noise::new(&NoiseConfig {
            gate_error_p: 0.0,
            meas_error_p: 1.0,
            rng_seed: 1,
        })
        .unwrap();
        let counts = StateVector::basis(2, 0).unwrap().measure_shots(64, &mut session);
        assert_eq!(counts.count("11"), 64);
    }

    #[test]
    fn born_frequencies_concentrate_on_thirds() {
        let mut session = Noise::noiseless(2024);
        let counts = eq1_state().measure_shots(300_000, &mut session);
        for index in [0usize, 1, 3] {
            let f = counts.frequency(index);
            assert!(
                (f - 1.0 / 3.0).abs() <= 0.01 / 3.0,
                "index {index} frequency {f}"
            );
        }
        assert_eq!(counts.count("10"), 0);
    }

    #[test]
    fn born_frequencies_pass_chi_square_at_one_hour_in_a_thousand() {
        let mut session = Noise::noiseless(77);
        let shots = 100_000u64;
        let counts = eq1_state().measure_shots(shots, &mut session);
        let expected = shots as f64 / 3.0;
        let chi2: f64 = [0usize, 1, 3]
            .iter()
            .map(|&i| {
                let o = counts.count_index(i) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        // Chi-square critical value, 2 degrees of freedom, significance 0.001.
        const CHI2_CRIT: f64 = 13.815510557964274;
        assert!(chi2 < CHI2_CRIT, "chi2 = {chi2}");
        assert_eq!(counts.count("10"), 0);
    }

    #[test]
    fn identical_sessions_give_bit_identical_counts() {
        let config = NoiseConfig {
            gate_error_p: 0.02,
            meas_error_p: 0.01,
            rng_seed: 31,
        };
        let run = |config: &NoiseConfig| {
            let mut session = Noise::new(config).unwrap();
            let mut s = StateVector::basis(2, 0).unwrap();
            s.apply_gate(&GateOp::h(0), Some(&mut session)).unwrap();
            s.apply_gate(&GateOp::cnot(0, 1).unwrap(), Some(&mut session))
                .unwrap();
            s.measure_shots(4096, &mut session)
        };
        assert_eq!(run(&config), run(&config));
    }

    #[test]
    fn fidelity_of_spec_pairs() {
        let a = StateVector::basis(2, 0).unwrap();
        let b = StateVector::basis(2, 3).unwrap();
        assert!((a.fidelity(&a).unwrap() - 1.0).abs() < TOL);
        assert!(a.fidelity(&b).unwrap() < TOL);
        assert!((eq1_state().fidelity(&a).unwrap() - 1.0 / 3.0).abs() < TOL);
        let c = StateVector::basis(1, 0).unwrap();
        assert_eq!(a.fidelity(&c), Err(QsimError::DimensionMismatch(2, 1)));
    }

    /// Random normalized states via random gate circuits on |0…0⟩.
    fn random_state(n_qubits: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut s = StateVector::basis(n_qubits, 0).unwrap();
        for _ in 0..16 {
            let gate = random_gate(n_qubits, &mut rng);
            s.apply_gate(&gate, None).unwrap();
        }
        s
    }

    fn random_gate(n_qubits: usize, rng: &mut ChaCha12Rng) -> GateOp {
        let q = rng.random_range(0..n_qubits);
        match rng.random_range(0..8u8) {
            0 => GateOp::x(q),
            1 => GateOp::y(q),
            2 => GateOp::z(q),
            3 => GateOp::h(q),
            4 => GateOp::s(q),
            5 => GateOp::t(q),
            6 if n_qubits > 1 => {
                let other = (q + 1 + rng.random_range(0..n_qubits - 1)) % n_qubits;
                GateOp::cnot(q, other).unwrap()
            }
            _ if n_qubits > 1 => {
                let other = (q + 1 + rng.random_range(0..n_qubits - 1)) % n_qubits;
                GateOp::cz(q, other).unwrap()
            }
            _ => GateOp::h(q),
        }
    }

    proptest! {
        #[test]
        fn normalization_survives_any_circuit(seed in any::<u64>(), n in 1usize..4, noisy in any::<bool>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut session = Noise::new(&NoiseConfig {
                gate_error_p: if noisy { 0.3 } else { 0.0 },
                meas_error_p: 0.0,
                rng_seed: seed ^ 0x5eed,
            }).unwrap();
            let mut s = StateVector::basis(n, 0).unwrap();
            for _ in 0..24 {
                let gate = random_gate(n, &mut rng);
                s.apply_gate(&gate, Some(&mut session)).unwrap();
            }
            prop_assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
        }

        #[test]
        fn every_gate_round_trips_through_its_inverse(seed in any::<u64>(), n in 1usize..4) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let original = random_state(n, seed);
            let gate = random_gate(n, &mut rng);
            let mut s = original.clone();
            s.apply_gate(&gate, None).unwrap();
            s.apply_gate(&gate.inverse(), None).unwrap();
            prop_assert!((s.fidelity(&original).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn bell_inversion_is_identity_on_random_states(seed in any::<u64>(), variant in 0usize..4) {
            let original = random_state(2, seed);
            let spec = EntangleSpec::new(BellVariant::ALL[variant], (0, 1)).unwrap();
            let mut s = original.clone();
            s.apply_entangle(&spec, Direction::Forward, None).unwrap();
            s.apply_entangle(&spec, Direction::Inverse, None).unwrap();
            prop_assert!((s.fidelity(&original).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
