//! Replayable election transcripts.
//!
//! A transcript carries everything needed to re-execute a run bit-exactly —
//! the election configuration, the master seed, each voter's hash ID and
//! cast choices in registration order — plus everything the run produced:
//! ledger, per-ballot count tables, tally, blocked set. Raw voter IDs never
//! appear; replay re-registers voters directly from their recorded hash IDs,
//! which leaves the key-generation draws identical without knowing the IDs.

use serde::{Deserialize, Serialize};

use super::{
    BallotAudit, ElectionRun, ProtocolError, TallyOutcome, VoterRecord,
};
use crate::crypto::{HashId, SignatureSpec, SIMULATED_QRNG_LABEL};
use crate::encoding::{Ballot, ElectionConfig, TallyResult};
use crate::ledger::{Digest256, Ledger};
use crate::qsim::NoiseConfig;

pub const TRANSCRIPT_FORMAT: &str = "qvote-transcript-v1";

/// One voter's recorded participation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptVoter {
    pub hash_id: Digest256,
    /// Absent when the voter registered but never cast.
    pub cast: Option<TranscriptCast>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptCast {
    pub ballot: Ballot,
    /// Canonical signature descriptor, e.g. `"Z@0;X@1"`.
    pub signature: String,
    /// Canonical entangle descriptor, e.g. `"PhiPlus@0,1"`.
    pub entangle: String,
    pub receipt_fidelity: f64,
    pub tamper_flagged: bool,
}

/// A full run record, sufficient to replay bit-exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub format: String,
    pub master_seed: u64,
    pub gate_error_p: f64,
    pub meas_error_p: f64,
    pub key_length_bits: usize,
    pub hash_algorithm: String,
    pub rng_label: String,
    pub config: ElectionConfig,
    pub voters: Vec<TranscriptVoter>,
    /// Final voting database; retired entries hold the sentinel digest.
    pub registry: Vec<Digest256>,
    pub ledger: Ledger,
    /// Per-ballot count tables in tally order.
    pub ballots: Vec<BallotAudit>,
    pub tally: Option<TallyResult>,
    pub blocked: Vec<Digest256>,
    pub rejections: Vec<String>,
}

impl Transcript {
    pub fn from_run(run: &ElectionRun, outcome: &TallyOutcome) -> Self {
        let voters = run
            .voters
            .iter()
            .map(|record: &VoterRecord| TranscriptVoter {
                hash_id: Digest256::from(&record.hash_id),
                cast: record.ballot.as_ref().map(|ballot| TranscriptCast {
                    ballot: ballot.clone(),
                    signature: record
                        .signature
                        .as_ref()
                        .expect("cast stores the signature")
                        .descriptor(),
                    entangle: record
                        .entangle
                        .as_ref()
                        .expect("cast stores the entangle spec")
                        .descriptor(),
                    receipt_fidelity: record
                        .receipt
                        .as_ref()
                        .map_or(1.0, |r| r.expected_fidelity),
                    tamper_flagged: record
                        .receipt
                        .as_ref()
                        .is_some_and(|r| r.tamper_flagged),
                }),
            })
            .collect();
        Transcript {
            format: TRANSCRIPT_FORMAT.to_string(),
            master_seed: run.noise_config.rng_seed,
            gate_error_p: run.noise_config.gate_error_p,
            meas_error_p: run.noise_config.meas_error_p,
            key_length_bits: run.key_length_bits,
            hash_algorithm: crate::crypto::HASH_ALGORITHM_ID.to_string(),
            rng_label: SIMULATED_QRNG_LABEL.to_string(),
            config: run.config,
            voters,
            registry: run.registry.clone(),
            ledger: run.ledger.clone(),
            ballots: outcome.audits.clone(),
            tally: outcome.result.clone(),
            blocked: outcome.blocked.clone(),
            rejections: run.rejections.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("transcript serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// The verdict of re-executing a transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReplayReport {
    Identical,
    Diverged { at: String },
}

impl ReplayReport {
    pub fn is_identical(&self) -> bool {
        matches!(self, ReplayReport::Identical)
    }
}

impl std::fmt::Display for ReplayReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReplayReport::Identical => f.write_str("identical"),
            ReplayReport::Diverged { at } => write!(f, "divergence at {at}"),
        }
    }
}

/// Re-executes a transcript from its master seed and compares every recorded
/// count table and hash, reporting the first divergence.
pub fn replay_transcript(transcript: &Transcript) -> Result<ReplayReport, ProtocolError> {
    let diverged = |at: String| Ok(ReplayReport::Diverged { at });

    // The recorded ledger must stand on its own before re-execution.
    if let Err(e) = transcript.ledger.verify_chain() {
        return diverged(format!("ledger verification: {e}"));
    }

    let noise = NoiseConfig {
        gate_error_p: transcript.gate_error_p,
        meas_error_p: transcript.meas_error_p,
        rng_seed: transcript.master_seed,
    };
    let mut run =
        ElectionRun::with_key_length(transcript.config, noise, transcript.key_length_bits)?;
    for voter in &transcript.voters {
        run.register_prehashed(HashId {
            digest: voter.hash_id.0,
            algorithm_id: transcript.hash_algorithm.clone(),
        })?;
    }
    let mut plans = Vec::new();
    for voter in &transcript.voters {
        let Some(cast) = &voter.cast else { continue };
        plans.push(super::CastPlan {
            handle: voter.hash_id.hex(),
            ballot: cast.ballot.clone(),
            signature: SignatureSpec::parse_descriptor(&cast.signature)?,
            entangle: cast.entangle.parse()?,
        });
    }
    let outcome = match super::run_standard_flow(&mut run, &plans) {
        Ok(outcome) => outcome,
        Err(e) => return diverged(format!("re-execution: {e}")),
    };

    if let Some(at) = first_divergence(transcript, &run, &outcome) {
        return diverged(at);
    }
    Ok(ReplayReport::Identical)
}

fn first_divergence(
    transcript: &Transcript,
    run: &ElectionRun,
    outcome: &TallyOutcome,
) -> Option<String> {
    let replayed_ledger: &Ledger = &run.ledger;
    if transcript.ledger.len() != replayed_ledger.len() {
        return Some(format!(
            "ledger length: recorded {} vs replayed {}",
            transcript.ledger.len(),
            replayed_ledger.len()
        ));
    }
    for (recorded, replayed) in transcript
        .ledger
        .blocks()
        .iter()
        .zip(replayed_ledger.blocks())
    {
        if recorded != replayed {
            return Some(format!("ledger block {}", recorded.index));
        }
    }
    if transcript.ballots.len() != outcome.audits.len() {
        return Some("ballot count".to_string());
    }
    for (position, (recorded, replayed)) in
        transcript.ballots.iter().zip(&outcome.audits).enumerate()
    {
        if recorded != replayed {
            return Some(format!(
                "counts for ballot {position} (voter {})",
                recorded.voter_hash_id
            ));
        }
    }
    if transcript.tally != outcome.result {
        return Some("tally".to_string());
    }
    if transcript.registry != run.registry {
        return Some("registry".to_string());
    }
    None
}
