//! Approval ballots as amplitude-encoded states, and back.
//!
//! A ballot over N candidates is a bit-vector with at least one approval.
//! Candidate i maps to basis index i of an n = ⌈log₂ N⌉ qubit register, and
//! encoding places equal amplitude 1/√k on each of the k approved indices.
//! Decoding thresholds observed shot frequencies: a candidate is approved
//! when its frequency reaches `decode_threshold`, and everything landing on
//! sub-threshold or unused basis states is reported as the noise fraction.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{Counts, QsimError, StateVector};

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("all-zero ballot cannot be encoded (abstention is expressed by not voting)")]
    EmptyBallot,
    #[error("a ballot needs at least two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("ballot covers {ballot} candidate(s) but the election has {config}")]
    ConfigMismatch { ballot: usize, config: usize },
    #[error("ballot string {0:?} must be '0'/'1' characters only")]
    BadBallotString(String),
    #[error("decode threshold {0} outside (0, 1)")]
    BadThreshold(f64),
    #[error("no ballots to tally")]
    NoBallots,
    #[error("decoded ballots disagree on candidate count")]
    LengthMismatch,
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// An approval ballot: one approve/disapprove bit per candidate.
///
/// At least one bit must be set; the zero vector has no normalizable
/// encoding. Parsed from and displayed as a bitstring such as `"1101"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ballot {
    approvals: Vec<bool>,
}

impl Ballot {
    pub fn new(approvals: Vec<bool>) -> Result<Self, EncodingError> {
        if approvals.len() < 2 {
            return Err(EncodingError::TooFewCandidates(approvals.len()));
        }
        if !approvals.iter().any(|&b| b) {
            return Err(EncodingError::EmptyBallot);
        }
        Ok(Ballot { approvals })
    }

    pub fn n_candidates(&self) -> usize {
        self.approvals.len()
    }

    pub fn approvals(&self) -> &[bool] {
        &self.approvals
    }

    pub fn approves(&self, candidate: usize) -> bool {
        self.approvals[candidate]
    }

    pub fn approval_count(&self) -> usize {
        self.approvals.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Ballot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.approvals {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl FromStr for Ballot {
    type Err = EncodingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let approvals = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(EncodingError::BadBallotString(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ballot::new(approvals)
    }
}

impl TryFrom<String> for Ballot {
    type Error = EncodingError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Ballot> for String {
    fn from(b: Ballot) -> String {
        b.to_string()
    }
}

/// Election-wide encoding parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectionConfig {
    pub n_candidates: usize,
    /// Smallest n with 2ⁿ ≥ n_candidates.
    pub n_qubits: usize,
    pub shots_per_ballot: u64,
    /// Frequency above which a candidate counts as approved. Must sit above
    /// realistic noise fractions and below the smallest legitimate frequency
    /// 1/N; the default 0.05 does both for N ≤ 16.
    pub decode_threshold: f64,
}

impl ElectionConfig {
    pub const DEFAULT_SHOTS: u64 = 1024;
    pub const DEFAULT_THRESHOLD: f64 = 0.05;

    pub fn new(n_candidates: usize) -> Result<Self, EncodingError> {
        Self::with_params(n_candidates, Self::DEFAULT_SHOTS, Self::DEFAULT_THRESHOLD)
    }

    pub fn with_params(
        n_candidates: usize,
        shots_per_ballot: u64,
        decode_threshold: f64,
    ) -> Result<Self, EncodingError> {
        if n_candidates < 2 {
            return Err(EncodingError::TooFewCandidates(n_candidates));
        }
        if !(decode_threshold > 0.0 && decode_threshold < 1.0) {
            return Err(EncodingError::BadThreshold(decode_threshold));
        }
        let n_qubits = (usize::BITS - (n_candidates - 1).leading_zeros()).max(1) as usize;
        Ok(ElectionConfig {
            n_candidates,
            n_qubits,
            shots_per_ballot,
            decode_threshold,
        })
    }
}

/// A decoded ballot: thresholded approvals plus the off-support shot mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedBallot {
    pub approvals: Vec<bool>,
    pub noise_fraction: f64,
}

impl DecodedBallot {
    /// Wraps an exact ballot as a noise-free decode, for direct tallies.
    pub fn exact(ballot: &Ballot) -> Self {
        DecodedBallot {
            approvals: ballot.approvals().to_vec(),
            noise_fraction: 0.0,
        }
    }
}

/// Approval totals, the argmax winner set, and the mean noise fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyResult {
    /// Approval count per candidate index.
    pub per_candidate_approvals: Vec<u64>,
    /// All candidates attaining the maximum approval count, ascending.
    pub winners: Vec<usize>,
    /// Mean off-support shot fraction over the tallied ballots.
    pub noise_fraction: f64,
}

/// Amplitude-encodes a ballot: 1/√k on each approved candidate's basis index.
///
/// Indices at and above `n_candidates` stay at amplitude zero, so non-power-
/// of-two candidate counts ride in the smallest register that fits them.
pub fn encode_ballot(
    ballot: &Ballot,
    config: &ElectionConfig,
) -> Result<StateVector, EncodingError> {
    if ballot.n_candidates() != config.n_candidates {
        return Err(EncodingError::ConfigMismatch {
            ballot: ballot.n_candidates(),
            config: config.n_candidates,
        });
    }
    let k = ballot.approval_count();
    if k == 0 {
        return Err(EncodingError::EmptyBallot);
    }
    let weight = Complex64::new(1.0 / (k as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::ZERO; 1 << config.n_qubits];
    for (candidate, &approved) in ballot.approvals().iter().enumerate() {
        if approved {
            amps[candidate] = weight;
        }
    }
    Ok(StateVector::from_amplitudes(amps)?)
}

/// Thresholds shot frequencies back into approvals.
///
/// Returns the decoded approvals and the noise fraction: the share of shots
/// on candidates that decoded to zero plus all shots on unused basis indices.
pub fn decode_counts(counts: &Counts, config: &ElectionConfig) -> DecodedBallot {
    let shots = counts.shots;
    let mut approvals = vec![false; config.n_candidates];
    let mut signal_shots = 0u64;
    for candidate in 0..config.n_candidates {
        let count = counts.count_index(candidate);
        if count as f64 / shots as f64 >= config.decode_threshold {
            approvals[candidate] = true;
            signal_shots += count;
        }
    }
    DecodedBallot {
        approvals,
        noise_fraction: (shots - signal_shots) as f64 / shots as f64,
    }
}

/// Sums per-candidate approvals and selects the argmax winner set.
///
/// Every winner attains the maximum count and ballot order never matters.
/// The result's noise fraction is the arithmetic mean of the inputs'.
pub fn tally(ballots: &[DecodedBallot]) -> Result<TallyResult, EncodingError> {
    let first = ballots.first().ok_or(EncodingError::NoBallots)?;
    let n = first.approvals.len();
    if ballots.iter().any(|b| b.approvals.len() != n) {
        return Err(EncodingError::LengthMismatch);
    }
    let mut per_candidate_approvals = vec![0u64; n];
    for ballot in ballots {
        for (candidate, &approved) in ballot.approvals.iter().enumerate() {
            if approved {
                per_candidate_approvals[candidate] += 1;
            }
        }
    }
    let max = *per_candidate_approvals.iter().max().expect("n >= 2");
    let winners = per_candidate_approvals
        .iter()
        .enumerate()
        .filter(|(_, &count)| count == max)
        .map(|(candidate, _)| candidate)
        .collect();
    let noise_fraction =
        ballots.iter().map(|b| b.noise_fraction).sum::<f64>() / ballots.len() as f64;
    Ok(TallyResult {
        per_candidate_approvals,
        winners,
        noise_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn config4() -> ElectionConfig {
        ElectionConfig::new(4).unwrap()
    }

    fn counts_from(pairs: &[(&str, u64)], n_qubits: usize) -> Counts {
        let table: BTreeMap<String, u64> =
            pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Counts {
            shots: table.values().sum(),
            n_qubits,
            table,
        }
    }

    #[test]
    fn encodes_the_three_way_superposition() {
        let ballot: Ballot = "1101".parse().unwrap();
        let state = encode_ballot(&ballot, &config4()).unwrap();
        let w = 1.0 / 3f64.sqrt();
        for (index, expected) in [(0, w), (1, w), (2, 0.0), (3, w)] {
            assert!(
                (state.amplitudes()[index].re - expected).abs() < 1e-12,
                "index {index}"
            );
            assert!(state.amplitudes()[index].im.abs() < 1e-12);
        }
    }

    #[test]
    fn single_approval_is_a_basis_state() {
        let ballot: Ballot = "1000".parse().unwrap();
        let state = encode_ballot(&ballot, &config4()).unwrap();
        assert!((state.probability(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_approval_is_the_uniform_superposition() {
        let ballot: Ballot = "1111".parse().unwrap();
        let state = encode_ballot(&ballot, &config4()).unwrap();
        for index in 0..4 {
            assert!((state.amplitudes()[index].re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_ballot_rejected() {
        assert_eq!("0000".parse::<Ballot>(), Err(EncodingError::EmptyBallot));
    }

    #[test]
    fn candidate_count_mismatch_rejected() {
        let ballot: Ballot = "110".parse().unwrap();
        assert_eq!(
            encode_ballot(&ballot, &config4()),
            Err(EncodingError::ConfigMismatch {
                ballot: 3,
                config: 4
            })
        );
    }

    #[test]
    fn qubit_count_is_the_log_ceiling() {
        for (n_candidates, n_qubits) in [(2, 1), (3, 2), (4, 2), (5, 3), (8, 3), (9, 4), (16, 4)] {
            assert_eq!(
                ElectionConfig::new(n_candidates).unwrap().n_qubits,
                n_qubits,
                "N={n_candidates}"
            );
        }
    }

    #[test]
    fn decodes_thirds_with_zero_noise() {
        let counts = counts_from(&[("00", 340), ("01", 350), ("11", 334)], 2);
        let decoded = decode_counts(&counts, &config4());
        assert_eq!(decoded.approvals, vec![true, true, false, true]);
        assert_eq!(decoded.noise_fraction, 0.0);
    }

    #[test]
    fn decodes_single_basis_mass() {
        let counts = counts_from(&[("00", 1024)], 2);
        let decoded = decode_counts(&counts, &config4());
        assert_eq!(decoded.approvals, vec![true, false, false, false]);
    }

    #[test]
    fn sub_threshold_mass_reports_as_noise() {
        let counts = counts_from(&[("00", 337), ("01", 331), ("10", 17), ("11", 339)], 2);
        let decoded = decode_counts(&counts, &config4());
        assert_eq!(decoded.approvals, vec![true, true, false, true]);
        assert!((decoded.noise_fraction - 17.0 / 1024.0).abs() < 1e-12);
    }

    #[test]
    fn unused_indices_encode_empty_and_decode_noisy() {
        let config = ElectionConfig::new(3).unwrap();
        let ballot: Ballot = "101".parse().unwrap();
        let state = encode_ballot(&ballot, &config).unwrap();
        assert_eq!(state.amplitudes()[3], Complex64::ZERO);

        let counts = counts_from(&[("00", 500), ("10", 480), ("11", 44)], 2);
        let decoded = decode_counts(&counts, &config);
        assert_eq!(decoded.approvals, vec![true, false, true]);
        assert!((decoded.noise_fraction - 44.0 / 1024.0).abs() < 1e-12);
    }

    #[test]
    fn tally_of_spec_scenarios() {
        let single = tally(&[DecodedBallot::exact(&"1101".parse().unwrap())]).unwrap();
        assert_eq!(single.per_candidate_approvals, vec![1, 1, 0, 1]);
        assert_eq!(single.winners, vec![0, 1, 3]);

        let majority = tally(&[
            DecodedBallot::exact(&"1000".parse().unwrap()),
            DecodedBallot::exact(&"1000".parse().unwrap()),
            DecodedBallot::exact(&"0100".parse().unwrap()),
        ])
        .unwrap();
        assert_eq!(majority.winners, vec![0]);

        let tie = tally(&[
            DecodedBallot::exact(&"1100".parse().unwrap()),
            DecodedBallot::exact(&"0011".parse().unwrap()),
        ])
        .unwrap();
        assert_eq!(tie.winners, vec![0, 1, 2, 3]);

        assert_eq!(tally(&[]), Err(EncodingError::NoBallots));
    }

    /// Exact Born-rule frequencies as a count table: each approved candidate
    /// gets an identical share, so frequencies are exactly 1/k.
    fn exact_counts(ballot: &Ballot, config: &ElectionConfig) -> Counts {
        let mut index_counts = vec![0u64; 1 << config.n_qubits];
        for (candidate, &approved) in ballot.approvals().iter().enumerate() {
            if approved {
                index_counts[candidate] = 1024;
            }
        }
        Counts::from_index_counts(config.n_qubits, &index_counts)
    }

    #[test]
    fn exact_round_trip_exhaustive_for_small_elections() {
        for n_candidates in [2usize, 3, 4, 5, 8] {
            let config = ElectionConfig::new(n_candidates).unwrap();
            for bits in 1u32..(1 << n_candidates) {
                let approvals: Vec<bool> =
                    (0..n_candidates).map(|c| bits & (1 << c) != 0).collect();
                let ballot = Ballot::new(approvals).unwrap();
                let decoded = decode_counts(&exact_counts(&ballot, &config), &config);
                assert_eq!(
                    decoded.approvals,
                    ballot.approvals(),
                    "N={n_candidates} b={ballot}"
                );
                assert_eq!(decoded.noise_fraction, 0.0);
            }
        }
    }

    #[test]
    fn exact_round_trip_sampled_for_sixteen_candidates() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(16);
        let config = ElectionConfig::new(16).unwrap();
        for _ in 0..64 {
            let bits: u16 = rng.random_range(1..=u16::MAX);
            let approvals: Vec<bool> = (0..16).map(|c| bits & (1 << c) != 0).collect();
            let ballot = Ballot::new(approvals).unwrap();
            let decoded = decode_counts(&exact_counts(&ballot, &config), &config);
            assert_eq!(decoded.approvals, ballot.approvals());
        }
    }

    proptest! {
        #[test]
        fn nonzero_amplitudes_share_one_magnitude(bits in 1u32..16) {
            let approvals: Vec<bool> = (0..4).map(|c| bits & (1 << c) != 0).collect();
            let ballot = Ballot::new(approvals).unwrap();
            let state = encode_ballot(&ballot, &config4()).unwrap();
            let mags: Vec<f64> = state
                .amplitudes()
                .iter()
                .map(|a| a.norm())
                .filter(|m| *m > 0.0)
                .collect();
            let max = mags.iter().cloned().fold(0.0, f64::max);
            let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
            prop_assert!((max / min - 1.0).abs() < 1e-12);
        }

        #[test]
        fn winners_attain_max_and_ignore_ballot_order(seed in any::<u64>(), n_ballots in 1usize..12) {
            use rand::seq::SliceRandom;
            use rand::Rng;
            use rand_chacha::rand_core::SeedableRng;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let mut ballots = Vec::new();
            for _ in 0..n_ballots {
                let bits = rng.random_range(1u32..16);
                let approvals: Vec<bool> = (0..4).map(|c| bits & (1 << c) != 0).collect();
                ballots.push(DecodedBallot { approvals, noise_fraction: 0.0 });
            }
            let result = tally(&ballots).unwrap();
            let max = *result.per_candidate_approvals.iter().max().unwrap();
            for &w in &result.winners {
                prop_assert_eq!(result.per_candidate_approvals[w], max);
            }
            prop_assert!(!result.winners.is_empty());
            let mut shuffled = ballots.clone();
            shuffled.shuffle(&mut rng);
            prop_assert_eq!(tally(&shuffled).unwrap(), result);
        }
    }
}
