//! Election runs, noise sweeps, and transcript replay behind the `qvote`
//! binary.
//!
//! Three entry points mirror the three subcommands:
//!
//! - [`run_election`] executes a configured election end to end and returns
//!   the replayable transcript plus a human summary,
//! - [`run_sweep`] scans one error axis, running full protocol trajectories
//!   per point and emitting CSV with the header
//!   `p,mean_noise_fraction,std,trajectories,shots`,
//! - [`replay`] re-executes a transcript and reports the first divergence.
//!
//! Everything is seeded, so identical inputs produce byte-identical
//! transcripts and CSV.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::SignatureSpec;
use crate::encoding::{Ballot, ElectionConfig, EncodingError};
use crate::protocol::{
    replay_transcript, run_standard_flow, CastPlan, ElectionRun, ProtocolError, ReplayReport,
    TallyOutcome, Transcript,
};
use crate::qsim::{
    bitstring, derive_sub_seed, BellVariant, Counts, EntangleSpec, GateOp, NoiseConfig, QsimError,
};
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Gate- and readout-error probabilities as they appear in config files.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct NoiseProbs {
    #[serde(default)]
    pub gate_error_p: f64,
    #[serde(default)]
    pub meas_error_p: f64,
}

/// One voter line in an election config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VoterEntry {
    pub unique_id: String,
    #[serde(default = "default_true")]
    pub eligible: bool,
    pub ballot: Ballot,
    /// Gate descriptors applied in order, e.g. `["Z@0", "X@1"]`.
    pub signature: Vec<String>,
    pub bell_variant: BellVariant,
    /// Qubit pair carrying the entanglement; defaults to `[0, 1]`.
    #[serde(default)]
    pub entangle_pair: Option<(usize, usize)>,
}

fn default_true() -> bool {
    true
}

fn default_shots() -> u64 {
    ElectionConfig::DEFAULT_SHOTS
}

fn default_threshold() -> f64 {
    ElectionConfig::DEFAULT_THRESHOLD
}

fn default_key_bits() -> usize {
    crate::protocol::DEFAULT_KEY_BITS
}

/// The `qvote run` config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElectionFile {
    pub n_candidates: usize,
    pub voters: Vec<VoterEntry>,
    #[serde(default)]
    pub noise: NoiseProbs,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub decode_threshold: f64,
    #[serde(default = "default_key_bits")]
    pub key_length_bits: usize,
}

impl ElectionFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Everything `qvote run` produces.
#[derive(Debug)]
pub struct ElectionReport {
    pub transcript: Transcript,
    pub outcome: TallyOutcome,
    pub summary: String,
    /// Security-relevant events observed during the run; nonempty means
    /// exit code 2.
    pub violations: Vec<String>,
}

/// Runs a configured election through the standard flow.
pub fn run_election(file: &ElectionFile) -> Result<ElectionReport, CliError> {
    let config =
        ElectionConfig::with_params(file.n_candidates, file.shots, file.decode_threshold)?;
    let noise = NoiseConfig {
        gate_error_p: file.noise.gate_error_p,
        meas_error_p: file.noise.meas_error_p,
        rng_seed: file.seed,
    };
    let mut run = ElectionRun::with_key_length(config, noise, file.key_length_bits)?;

    let mut violations = Vec::new();
    let mut plans = Vec::new();
    for voter in &file.voters {
        match run.register_voter(&voter.unique_id, voter.eligible) {
            Ok(_) => plans.push(CastPlan {
                handle: voter.unique_id.clone(),
                ballot: voter.ballot.clone(),
                signature: parse_signature(&voter.signature)?,
                entangle: EntangleSpec::new(
                    voter.bell_variant,
                    voter.entangle_pair.unwrap_or((0, 1)),
                )?,
            }),
            Err(e @ (ProtocolError::NotEligible | ProtocolError::AlreadyRegistered)) => {
                violations.push(format!("registration rejected: {e}"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let outcome = run_standard_flow(&mut run, &plans)?;
    let transcript = Transcript::from_run(&run, &outcome);

    if run.ledger().verify_chain().is_err() {
        violations.push("ledger chain invalid".into());
    }
    for rejection in run.rejections() {
        if rejection.starts_with("scrutiny") {
            violations.push(rejection.clone());
        }
    }
    for blocked in &outcome.blocked {
        violations.push(format!("tally blocked for voter {blocked}"));
    }
    // A fidelity flag under zero gate error can only be tampering; with gate
    // noise enabled it is the expected environmental degradation.
    if file.noise.gate_error_p == 0.0 {
        for voter in &transcript.voters {
            if let Some(cast) = &voter.cast {
                if cast.tamper_flagged {
                    violations.push(format!("tamper flagged for voter {}", voter.hash_id));
                }
            }
        }
    }

    let summary = render_summary(file, &transcript, &outcome, &violations);
    Ok(ElectionReport {
        transcript,
        outcome,
        summary,
        violations,
    })
}

fn parse_signature(descriptors: &[String]) -> Result<SignatureSpec, CliError> {
    let gates = descriptors
        .iter()
        .map(|d| d.parse::<GateOp>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SignatureSpec::new(gates))
}

fn render_summary(
    file: &ElectionFile,
    transcript: &Transcript,
    outcome: &TallyOutcome,
    violations: &[String],
) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "election: {} candidates, {} voter(s), seed {}, shots {}",
        file.n_candidates,
        file.voters.len(),
        file.seed,
        file.shots
    );
    let _ = writeln!(
        out,
        "noise: gate_error_p {:.6}, meas_error_p {:.6}",
        file.noise.gate_error_p, file.noise.meas_error_p
    );
    let _ = writeln!(
        out,
        "ballots counted: {}, blocked: {}",
        outcome.audits.len(),
        outcome.blocked.len()
    );

    let n_qubits = transcript.config.n_qubits;
    let dim = 1usize << n_qubits;
    let mut aggregate = vec![0u64; dim];
    for audit in &outcome.audits {
        for index in 0..dim {
            aggregate[index] += audit.counts.count_index(index);
        }
    }
    let counts_line = (0..dim)
        .map(|i| format!("{}={}", bitstring(i, n_qubits), aggregate[i]))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "aggregate counts: {counts_line}");

    match &outcome.result {
        Some(result) => {
            let approvals = result
                .per_candidate_approvals
                .iter()
                .enumerate()
                .map(|(candidate, count)| format!("c{}={count}", candidate + 1))
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "approvals: {approvals}");
            let winners = result
                .winners
                .iter()
                .map(|w| format!("c{}", w + 1))
                .collect::<Vec<_>>()
                .join(", ");
            let _ = writeln!(out, "winners: {winners}");
            let _ = writeln!(out, "noise fraction: {:.6}", result.noise_fraction);
        }
        None => {
            let _ = writeln!(out, "no ballots tallied");
        }
    }
    if violations.is_empty() {
        let _ = writeln!(out, "security: ok");
    } else {
        for violation in violations {
            let _ = writeln!(out, "security: {violation}");
        }
    }
    out
}

/// Which error probability a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorAxis {
    Gate,
    Measurement,
}

fn default_ballot() -> Ballot {
    "1101".parse().expect("default ballot is valid")
}

fn default_sweep_signature() -> Vec<String> {
    vec!["Z@0".into(), "X@1".into()]
}

fn default_bell() -> BellVariant {
    BellVariant::PhiPlus
}

/// The `qvote sweep` config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub error_axis: ErrorAxis,
    /// Strictly increasing probabilities in [0, 1].
    pub p_values: Vec<f64>,
    #[serde(default)]
    pub fixed_other_p: f64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    pub trajectories: u64,
    #[serde(default = "default_ballot")]
    pub ballot: Ballot,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sweep_signature")]
    pub signature: Vec<String>,
    #[serde(default = "default_bell")]
    pub bell_variant: BellVariant,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.p_values.is_empty() {
            return Err(CliError::Config("p_values must be nonempty".into()));
        }
        if !self
            .p_values
            .windows(2)
            .all(|pair| pair[0] < pair[1])
        {
            return Err(CliError::Config(
                "p_values must be strictly increasing".into(),
            ));
        }
        if self
            .p_values
            .iter()
            .chain([&self.fixed_other_p])
            .any(|p| !(0.0..=1.0).contains(p))
        {
            return Err(CliError::Config("probabilities must lie in [0, 1]".into()));
        }
        if self.trajectories == 0 {
            return Err(CliError::Config("trajectories must be positive".into()));
        }
        Ok(())
    }
}

/// One aggregated sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub mean_noise_fraction: f64,
    pub std: f64,
    /// Completed trajectories at this point; a noisy Grover miss during
    /// scrutiny discards that trajectory's ballot.
    pub trajectories: u64,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub csv: String,
}

pub const SWEEP_CSV_HEADER: &str = "p,mean_noise_fraction,std,trajectories,shots";

/// Fraction of shots landing outside the cast ballot's support: on basis
/// states of unapproved candidates or on unused indices. For the `1101`
/// ballot this is exactly the `|10⟩` fraction.
pub fn off_support_fraction(counts: &Counts, ballot: &Ballot) -> f64 {
    let mut off = 0u64;
    for (label, count) in &counts.table {
        let index = usize::from_str_radix(label, 2).expect("labels are binary");
        let approved = index < ballot.n_candidates() && ballot.approves(index);
        if !approved {
            off += count;
        }
    }
    off as f64 / counts.shots as f64
}

/// Runs one full single-voter protocol trajectory and reports the ballot's
/// off-support fraction, or `None` when scrutiny discarded the vote.
fn run_trajectory(spec: &SweepSpec, noise: NoiseConfig) -> Result<Option<f64>, CliError> {
    let config = ElectionConfig::with_params(
        spec.ballot.n_candidates(),
        spec.shots,
        ElectionConfig::DEFAULT_THRESHOLD,
    )?;
    let mut run = ElectionRun::new(config, noise)?;
    run.register_voter("sweep-voter", true)?;
    let plan = CastPlan {
        handle: "sweep-voter".into(),
        ballot: spec.ballot.clone(),
        signature: parse_signature(&spec.signature)?,
        entangle: EntangleSpec::new(spec.bell_variant, (0, 1))?,
    };
    let outcome = run_standard_flow(&mut run, std::slice::from_ref(&plan))?;
    Ok(outcome
        .audits
        .first()
        .map(|audit| off_support_fraction(&audit.counts, &spec.ballot)))
}

/// Sweeps one error axis: `trajectories` independent full protocol runs per
/// point, each on its own derived sub-seed. Trajectories run in parallel;
/// aggregation order is by p then trajectory index regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, CliError> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.p_values.len());
    for (point, &p) in spec.p_values.iter().enumerate() {
        let (gate_error_p, meas_error_p) = match spec.error_axis {
            ErrorAxis::Gate => (p, spec.fixed_other_p),
            ErrorAxis::Measurement => (spec.fixed_other_p, p),
        };
        let fractions: Vec<Option<f64>> = (0..spec.trajectories)
            .into_par_iter()
            .map(|trajectory| {
                let index = point as u64 * spec.trajectories + trajectory;
                let noise = NoiseConfig {
                    gate_error_p,
                    meas_error_p,
                    rng_seed: derive_sub_seed(spec.seed, index),
                };
                run_trajectory(spec, noise)
            })
            .collect::<Result<_, _>>()?;
        let completed: Vec<f64> = fractions.into_iter().flatten().collect();
        let n = completed.len() as f64;
        let (mean, std) = if completed.is_empty() {
            (0.0, 0.0)
        } else {
            let mean = completed.iter().sum::<f64>() / n;
            let var = completed.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        rows.push(SweepRow {
            p,
            mean_noise_fraction: mean,
            std,
            trajectories: completed.len() as u64,
            shots: spec.shots,
        });
    }
    let mut csv = String::from(SWEEP_CSV_HEADER);
    csv.push('\n');
    for row in &rows {
        csv.push_str(&format!(
            "{:.6},{:.6},{:.6},{},{}\n",
            row.p, row.mean_noise_fraction, row.std, row.trajectories, row.shots
        ));
    }
    Ok(SweepResult { rows, csv })
}

/// Re-executes a transcript and reports the first divergence, if any.
pub fn replay(transcript_json: &str) -> Result<ReplayReport, CliError> {
    let transcript = Transcript::from_json(transcript_json)?;
    Ok(replay_transcript(&transcript)?)
}
