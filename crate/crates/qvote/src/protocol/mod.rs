//! The three-party election protocol, end to end.
//!
//! One [`ElectionRun`] hosts a voter population (Alice), a tallyman (Bob),
//! and a scrutineer (Charlie), and drives the full message flow:
//!
//! 1. **Register** — Bob checks eligibility, issues a keyed hash ID, and
//!    distributes fresh secret keys: K_AB to the voter and himself, K_AC to
//!    the voter and the scrutineer. The hash ID enters the voting database.
//! 2. **Cast** — the voter amplitude-encodes her ballot, entangles it in her
//!    chosen Bell basis, signs it with her secret gate sequence, and sends
//!    the qubits to the scrutineer together with her K_AC-encrypted hash ID;
//!    she discloses the signing procedure over the classical channel and the
//!    scrutineer removes the signature.
//! 3. **Scrutinize** — the scrutineer decrypts the hash ID, finds it in the
//!    database by Grover search, appends a registration block to the ledger,
//!    and retires the ID so a second cast can never be found.
//! 4. **Verify** — the voter matches her hash ID and signing details against
//!    the ledger block.
//! 5. **Tally** — each verified voter releases her entanglement details
//!    encrypted under K_AB; Bob disentangles, measures, decodes, and tallies
//!    under the scrutineer's supervision via per-ballot audit records.
//!
//! A single seeded ChaCha stream owned by the run drives everything
//! stochastic, in application order: the election hash secret at
//! construction, key bits per registration, gate-noise decisions per gate,
//! and sampling plus readout-flip draws per measurement. Two runs from one
//! seed are therefore bit-identical, which is what makes [`Transcript`]
//! replay meaningful.
//!
//! Quantum messages move; they are never cloned between parties. Fidelity
//! receipts, ledger inspection, and [`ElectionRun::held_state`] are declared
//! simulation privileges for tests and audits, not protocol messages.

mod party;
mod transcript;

pub use party::{ClassicalMessage, Party, Payload, QuantumMessage, Role, VoterPhase};
pub use transcript::{replay_transcript, ReplayReport, Transcript, TranscriptVoter};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{
    gen_key, hash_id, otp, sign, unsign, CryptoError, HashId, KeyLabel, SignatureSpec,
};
use crate::encoding::{
    decode_counts, encode_ballot, tally, Ballot, DecodedBallot, ElectionConfig, EncodingError,
    TallyResult,
};
use crate::grover::{grover_search, remove_id, GroverError, SearchProblem};
use crate::ledger::{Block, Digest256, Ledger, LedgerError};
use crate::qsim::{
    Counts, Direction, EntangleSpec, GateOp, Noise, NoiseConfig, QsimError, StateVector,
};
use rand_chacha::rand_core::RngCore;

/// Default secret-key length in bits.
pub const DEFAULT_KEY_BITS: usize = 256;

/// A receipt is tamper-flagged when the scrutineer-side state drops below
/// 1 − FIDELITY_TOL fidelity against the noiseless expectation.
pub const FIDELITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ProtocolError {
    #[error("voter is not eligible")]
    NotEligible,
    #[error("voter is already registered")]
    AlreadyRegistered,
    #[error("protocol order violation: {0}")]
    ProtocolOrderViolation(String),
    #[error("hash ID not found in the voting database; vote discarded")]
    UnknownVoter,
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Grover(#[from] GroverError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// What the voter learns right after casting: the scrutineer-side fidelity
/// of her (unsigned) message against the noiseless expectation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CastReceipt {
    pub voter_hash_id: Digest256,
    pub expected_fidelity: f64,
    pub tamper_flagged: bool,
}

/// Per-ballot audit record: the tallyman's counts co-signed for the
/// scrutineer to check against the ledger's registration set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallotAudit {
    pub voter_hash_id: Digest256,
    pub counts: Counts,
    pub decoded: DecodedBallot,
}

/// Outcome of the tally phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyOutcome {
    /// Absent when every held ballot was blocked.
    pub result: Option<TallyResult>,
    pub audits: Vec<BallotAudit>,
    /// Hash IDs whose states stayed entangled because the entanglement
    /// details were withheld (voter never verified).
    pub blocked: Vec<Digest256>,
}

struct VoterRecord {
    handle: String,
    hash_id: HashId,
    k_ab: crate::crypto::SecretKey,
    k_ac: crate::crypto::SecretKey,
    phase: VoterPhase,
    ballot: Option<Ballot>,
    signature: Option<SignatureSpec>,
    entangle: Option<EntangleSpec>,
    receipt: Option<CastReceipt>,
}

struct PendingVote {
    voter_index: usize,
    message: QuantumMessage,
    encrypted_id: Vec<bool>,
    signing_details: String,
}

struct HeldState {
    voter_index: usize,
    message: QuantumMessage,
}

/// One election: configuration, parties, channels, database, ledger, clock,
/// and the seeded randomness stream.
pub struct ElectionRun {
    config: ElectionConfig,
    noise_config: NoiseConfig,
    key_length_bits: usize,
    session: Noise,
    election_secret: [u8; 32],
    tallyman: Party,
    scrutineer: Party,
    voters: Vec<VoterRecord>,
    registry: Vec<Digest256>,
    ledger: Ledger,
    pending: Vec<PendingVote>,
    held: Vec<HeldState>,
    clock: u64,
    messages: Vec<ClassicalMessage>,
    tamper: Option<GateOp>,
    rejections: Vec<String>,
}

impl ElectionRun {
    /// Opens an election. `noise.rng_seed` is the master seed of the run.
    pub fn new(config: ElectionConfig, noise: NoiseConfig) -> Result<Self, ProtocolError> {
        Self::with_key_length(config, noise, DEFAULT_KEY_BITS)
    }

    pub fn with_key_length(
        config: ElectionConfig,
        noise: NoiseConfig,
        key_length_bits: usize,
    ) -> Result<Self, ProtocolError> {
        if key_length_bits == 0 {
            return Err(ProtocolError::Crypto(CryptoError::InvalidLength));
        }
        let mut session = Noise::new(&noise)?;
        // First draw of the stream: the secret keying the hash-ID function.
        let mut election_secret = [0u8; 32];
        session.rng_mut().fill_bytes(&mut election_secret);
        Ok(ElectionRun {
            config,
            noise_config: noise,
            key_length_bits,
            session,
            election_secret,
            tallyman: Party::new(Role::Tallyman),
            scrutineer: Party::new(Role::Scrutineer),
            voters: Vec::new(),
            registry: Vec::new(),
            ledger: Ledger::new(),
            pending: Vec::new(),
            held: Vec::new(),
            clock: 0,
            messages: Vec::new(),
            tamper: None,
            rejections: Vec::new(),
        })
    }

    /// Installs (or clears) an adversarial gate applied to every quantum
    /// message in transit from voter to scrutineer. The adversary's gate
    /// consumes no protocol randomness.
    pub fn set_channel_tamper(&mut self, gate: Option<GateOp>) {
        self.tamper = gate;
    }

    pub fn config(&self) -> &ElectionConfig {
        &self.config
    }

    pub fn noise_config(&self) -> &NoiseConfig {
        &self.noise_config
    }

    pub fn key_length_bits(&self) -> usize {
        self.key_length_bits
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    /// Mutable ledger access, an adversary hook: tampering applied here is
    /// exactly what [`Ledger::verify_chain`] and
    /// [`ElectionRun::voter_verify`] must catch.
    pub fn ledger_mut(&mut self) -> &mut Ledger {
        &mut self.ledger
    }

    /// Bob's voting database, shared with the scrutineer. Retired entries
    /// hold the sentinel digest.
    pub fn registry(&self) -> &[Digest256] {
        &self.registry
    }

    /// Every classical message sent so far, in order.
    pub fn messages(&self) -> &[ClassicalMessage] {
        &self.messages
    }

    pub fn tallyman(&self) -> &Party {
        &self.tallyman
    }

    pub fn scrutineer(&self) -> &Party {
        &self.scrutineer
    }

    pub fn rejections(&self) -> &[String] {
        &self.rejections
    }

    pub fn voter_phase(&self, voter: &str) -> Option<VoterPhase> {
        self.find_voter(voter).map(|i| self.voters[i].phase)
    }

    pub fn voter_hash_id(&self, voter: &str) -> Option<&HashId> {
        self.find_voter(voter).map(|i| &self.voters[i].hash_id)
    }

    pub fn voter_receipt(&self, voter: &str) -> Option<&CastReceipt> {
        self.find_voter(voter)
            .and_then(|i| self.voters[i].receipt.as_ref())
    }

    /// The scrutineer-held state of a voter, pending or recorded.
    ///
    /// Simulation privilege: protocol parties cannot read amplitudes, but
    /// audits and the fairness tests can.
    pub fn held_state(&self, voter: &str) -> Option<&StateVector> {
        let index = self.find_voter(voter)?;
        self.pending
            .iter()
            .find(|p| p.voter_index == index)
            .map(|p| &p.message.state)
            .or_else(|| {
                self.held
                    .iter()
                    .find(|h| h.voter_index == index)
                    .map(|h| &h.message.state)
            })
    }

    fn find_voter(&self, handle: &str) -> Option<usize> {
        self.voters.iter().position(|v| v.handle == handle)
    }

    /// Registers a voter: eligibility gate, keyed hash ID, key distribution.
    ///
    /// Rejections happen before any randomness is consumed, so a run with
    /// rejected registrations replays identically without them.
    pub fn register_voter(
        &mut self,
        unique_id: &str,
        eligible: bool,
    ) -> Result<HashId, ProtocolError> {
        if !eligible {
            self.rejections.push("register: not eligible".into());
            return Err(ProtocolError::NotEligible);
        }
        if self.find_voter(unique_id).is_some() {
            self.rejections.push("register: already registered".into());
            return Err(ProtocolError::AlreadyRegistered);
        }
        let id = hash_id(unique_id.as_bytes(), &self.election_secret)?;
        self.admit(unique_id.to_string(), id.clone())?;
        Ok(id)
    }

    /// Replay-path registration from a recorded hash ID; draws the same key
    /// bits as the original registration without re-deriving the digest.
    pub fn register_prehashed(&mut self, id: HashId) -> Result<(), ProtocolError> {
        let handle = id.hex();
        if self.find_voter(&handle).is_some() {
            return Err(ProtocolError::AlreadyRegistered);
        }
        self.admit(handle, id)
    }

    fn admit(&mut self, handle: String, id: HashId) -> Result<(), ProtocolError> {
        let k_ab = gen_key(KeyLabel::Kab, self.key_length_bits, self.session.rng_mut())?;
        let k_ac = gen_key(KeyLabel::Kac, self.key_length_bits, self.session.rng_mut())?;
        self.tallyman.held_keys.push(k_ab.clone());
        self.scrutineer.held_keys.push(k_ac.clone());
        self.registry.push(Digest256::from(&id));
        self.voters.push(VoterRecord {
            handle,
            hash_id: id,
            k_ab,
            k_ac,
            phase: VoterPhase::Registered,
            ballot: None,
            signature: None,
            entangle: None,
            receipt: None,
        });
        Ok(())
    }

    /// The voting procedure: encode, entangle, sign, send, disclose, unsign.
    pub fn cast_vote(
        &mut self,
        voter: &str,
        ballot: Ballot,
        signature: SignatureSpec,
        entangle: EntangleSpec,
    ) -> Result<CastReceipt, ProtocolError> {
        self.cast_inner(voter, ballot, signature, entangle, true)
    }

    /// Casting without the voter-phase gate, modeling an adversary replaying
    /// the voting procedure. Everything downstream (scrutiny, the retired
    /// hash ID, the ledger) still stands between the replay and the tally.
    pub fn cast_vote_unchecked(
        &mut self,
        voter: &str,
        ballot: Ballot,
        signature: SignatureSpec,
        entangle: EntangleSpec,
    ) -> Result<CastReceipt, ProtocolError> {
        self.cast_inner(voter, ballot, signature, entangle, false)
    }

    fn cast_inner(
        &mut self,
        voter: &str,
        ballot: Ballot,
        signature: SignatureSpec,
        entangle: EntangleSpec,
        enforce_phase: bool,
    ) -> Result<CastReceipt, ProtocolError> {
        let index = self.find_voter(voter).ok_or_else(|| {
            ProtocolError::ProtocolOrderViolation("cast before registration".into())
        })?;
        if enforce_phase && self.voters[index].phase != VoterPhase::Registered {
            return Err(ProtocolError::ProtocolOrderViolation(format!(
                "cast in phase {:?}",
                self.voters[index].phase
            )));
        }
        // Validate everything before the first randomness draw so a rejected
        // cast leaves the stream untouched.
        let n = self.config.n_qubits;
        let (a, b) = entangle.qubit_pair;
        if a >= n || b >= n {
            return Err(ProtocolError::Qsim(QsimError::InvalidTarget {
                target: a.max(b),
                n_qubits: n,
            }));
        }
        for gate in &signature.gates {
            if gate.max_target() >= n {
                return Err(ProtocolError::Qsim(QsimError::InvalidTarget {
                    target: gate.max_target(),
                    n_qubits: n,
                }));
            }
        }
        let ideal = encode_ballot(&ballot, &self.config)?;

        // Noiseless expectation for the receipt's fidelity check.
        let mut expected = ideal.clone();
        expected.apply_entangle(&entangle, Direction::Forward, None)?;

        let mut state = ideal;
        state.apply_entangle(&entangle, Direction::Forward, Some(&mut self.session))?;
        sign(&mut state, &signature, Some(&mut self.session))?;
        if enforce_phase {
            self.voters[index].phase = VoterPhase::Encoded;
        }

        // Transit voter → scrutineer; the channel adversary acts here.
        if let Some(tamper) = &self.tamper {
            state.apply_gate(tamper, None)?;
        }

        let encrypted_id = otp(&self.voters[index].hash_id.to_bits(), &self.voters[index].k_ac)?;
        self.messages.push(ClassicalMessage {
            sender: Role::Voter,
            receiver: Role::Scrutineer,
            payload: Payload::Bits(encrypted_id.clone()),
            encrypted_with: Some(KeyLabel::Kac),
        });
        let signing_details = signature.descriptor();
        self.messages.push(ClassicalMessage {
            sender: Role::Voter,
            receiver: Role::Scrutineer,
            payload: Payload::Text(signing_details.clone()),
            encrypted_with: None,
        });

        // Scrutineer removes the disclosed signature.
        let disclosed = SignatureSpec::parse_descriptor(&signing_details)?;
        unsign(&mut state, &disclosed, Some(&mut self.session))?;

        let expected_fidelity = state.fidelity(&expected)?;
        let receipt = CastReceipt {
            voter_hash_id: Digest256::from(&self.voters[index].hash_id),
            expected_fidelity,
            tamper_flagged: expected_fidelity < 1.0 - FIDELITY_TOL,
        };

        self.pending.push(PendingVote {
            voter_index: index,
            message: QuantumMessage {
                state,
                sender: Role::Voter,
                receiver: Role::Scrutineer,
            },
            encrypted_id,
            signing_details,
        });
        let record = &mut self.voters[index];
        record.ballot = Some(ballot);
        record.signature = Some(signature);
        record.entangle = Some(entangle);
        record.receipt = Some(receipt.clone());
        if enforce_phase {
            record.phase = VoterPhase::Sent;
        }
        Ok(receipt)
    }

    /// The scrutineer's step: decrypt the hash ID, Grover-search the
    /// database, append the registration block, retire the ID.
    pub fn scrutinize_and_record(&mut self, voter: &str) -> Result<Block, ProtocolError> {
        let index = self.find_voter(voter).ok_or_else(|| {
            ProtocolError::ProtocolOrderViolation("scrutiny of an unregistered voter".into())
        })?;
        let position = self
            .pending
            .iter()
            .position(|p| p.voter_index == index)
            .ok_or_else(|| {
                ProtocolError::ProtocolOrderViolation(
                    "scrutiny without a held quantum message".into(),
                )
            })?;

        let decrypted = otp(&self.pending[position].encrypted_id, &self.voters[index].k_ac)?;
        let claimed = HashId::from_bits(&decrypted)
            .ok_or_else(|| ProtocolError::ProtocolOrderViolation("malformed hash ID".into()))?;

        let problem = SearchProblem::new(self.registry.clone(), claimed.clone())?;
        let outcome = grover_search(&problem, &mut self.session, self.config.shots_per_ballot)?;
        if !outcome.found {
            self.pending.remove(position);
            self.rejections.push("scrutiny: unknown voter".into());
            return Err(ProtocolError::UnknownVoter);
        }

        let pending = self.pending.remove(position);
        let block = self
            .ledger
            .append_block(
                Digest256::from(&claimed),
                pending.signing_details.clone(),
                self.clock,
            )?
            .clone();
        self.clock += 1;
        remove_id(&mut self.registry, &claimed);
        self.held.push(HeldState {
            voter_index: index,
            message: pending.message,
        });
        Ok(block)
    }

    /// The voter checks her ledger entry: hash ID and signing details both
    /// have to match her own records. Advances her phase on success.
    pub fn voter_verify(&mut self, voter: &str) -> bool {
        let Some(index) = self.find_voter(voter) else {
            return false;
        };
        let record = &self.voters[index];
        let Some(signature) = &record.signature else {
            return false;
        };
        let Some(block) = self.ledger.find_registration(&record.hash_id) else {
            return false;
        };
        let matches = block.voter_hash_id == Digest256::from(&record.hash_id)
            && block.signing_details == signature.descriptor();
        if matches && self.voters[index].phase == VoterPhase::Sent {
            self.voters[index].phase = VoterPhase::Verified;
        }
        matches
    }

    /// The tally phase over every held state.
    ///
    /// Verified voters release their entanglement details encrypted under
    /// K_AB; Bob decrypts, takes delivery of the qubits, applies the inverse
    /// entangling unitary, measures, and decodes. A held state whose voter
    /// never verified stays entangled and is reported as blocked.
    pub fn release_and_tally(&mut self) -> Result<TallyOutcome, ProtocolError> {
        let mut audits = Vec::new();
        let mut decoded_ballots = Vec::new();
        let mut blocked = Vec::new();
        let mut remaining = Vec::new();

        for held in self.held.drain(..) {
            let record = &self.voters[held.voter_index];
            let released = record.phase >= VoterPhase::Verified;
            let spec = record.entangle;
            if !(released && spec.is_some()) {
                blocked.push(Digest256::from(&record.hash_id));
                remaining.push(held);
                continue;
            }
            let spec = spec.expect("checked above");

            // Alice → Bob: entanglement details under K_AB.
            let descriptor_bits = text_bits(&spec.descriptor());
            let ciphertext = otp(&descriptor_bits, &record.k_ab)?;
            self.messages.push(ClassicalMessage {
                sender: Role::Voter,
                receiver: Role::Tallyman,
                payload: Payload::Bits(ciphertext.clone()),
                encrypted_with: Some(KeyLabel::Kab),
            });
            let plain_bits = otp(&ciphertext, &record.k_ab)?;
            let disclosed: EntangleSpec = text_from_bits(&plain_bits, descriptor_bits.len())
                .parse()
                .map_err(ProtocolError::Qsim)?;

            // Scrutineer hands the qubits to Bob; Bob disentangles and measures.
            let mut message = held.message;
            message.sender = Role::Scrutineer;
            message.receiver = Role::Tallyman;
            message
                .state
                .apply_entangle(&disclosed, Direction::Inverse, Some(&mut self.session))?;
            let counts = message
                .state
                .measure_shots(self.config.shots_per_ballot, &mut self.session);
            let decoded = decode_counts(&counts, &self.config);
            audits.push(BallotAudit {
                voter_hash_id: Digest256::from(&record.hash_id),
                counts,
                decoded: decoded.clone(),
            });
            decoded_ballots.push(decoded);
            self.voters[held.voter_index].phase = VoterPhase::KeysReleased;
        }
        self.held = remaining;

        let result = if decoded_ballots.is_empty() {
            None
        } else {
            Some(tally(&decoded_ballots)?)
        };
        Ok(TallyOutcome {
            result,
            audits,
            blocked,
        })
    }
}

/// One voter's cast choices for the standard orchestration.
#[derive(Debug, Clone)]
pub struct CastPlan {
    pub handle: String,
    pub ballot: Ballot,
    pub signature: SignatureSpec,
    pub entangle: EntangleSpec,
}

/// The canonical post-registration flow: per voter in order — cast,
/// scrutinize, verify — then one tally over everything held.
///
/// A noisy Grover miss ([`ProtocolError::UnknownVoter`]) discards that vote
/// and moves on, exactly as a live scrutineer would; any other error aborts.
/// Replay re-executes this same orchestration, which is what keeps the
/// randomness stream aligned between a run and its transcript.
pub fn run_standard_flow(
    run: &mut ElectionRun,
    plans: &[CastPlan],
) -> Result<TallyOutcome, ProtocolError> {
    for plan in plans {
        run.cast_vote(
            &plan.handle,
            plan.ballot.clone(),
            plan.signature.clone(),
            plan.entangle,
        )?;
        match run.scrutinize_and_record(&plan.handle) {
            Ok(_) | Err(ProtocolError::UnknownVoter) => {}
            Err(e) => return Err(e),
        }
        run.voter_verify(&plan.handle);
    }
    run.release_and_tally()
}

/// UTF-8 text as a bit-vector, most significant bit of each byte first.
fn text_bits(text: &str) -> Vec<bool> {
    text.as_bytes()
        .iter()
        .flat_map(|byte| (0..8).rev().map(move |bit| byte & (1 << bit) != 0))
        .collect()
}

fn text_from_bits(bits: &[bool], len: usize) -> String {
    let bytes: Vec<u8> = bits[..len]
        .chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .fold(0u8, |acc, &bit| (acc << 1) | u8::from(bit))
        })
        .collect();
    String::from_utf8(bytes).expect("descriptor bits decode to UTF-8")
}
