//! Desk-scale simulator of a quantum approval-voting protocol.
//!
//! Ballots are approval bit-vectors amplitude-encoded into a small qubit
//! register. A voter entangles the register in a Bell basis of her choice,
//! stamps it with a secret gate-sequence signature, and sends it to a
//! scrutineer together with a one-time-pad-encrypted keyed-hash identifier.
//! The scrutineer unsigns the qubits, locates the voter's hash ID in the
//! registration database with Grover search, appends a registration block to
//! a hash-chained ledger, and retires the ID so it cannot vote twice. Once
//! the voter has verified her ledger entry she releases the entanglement
//! details to the tallyman, who disentangles, measures, decodes, and tallies.
//!
//! The crate is organized around that flow:
//!
//! - [`qsim`] — dense state-vector simulation: gates, Bell-basis entangling,
//!   Monte-Carlo gate/readout noise, shot-based measurement.
//! - [`encoding`] — approval ballots to amplitude-encoded states and back.
//! - [`crypto`] — simulated-QRNG keys, one-time pads, keyed hash IDs, and
//!   gate-sequence signatures.
//! - [`ledger`] — the hash-chained registration ledger.
//! - [`grover`] — Grover lookup over the registered-ID database.
//! - [`protocol`] — the voter / tallyman / scrutineer state machines and a
//!   full election run with a replayable transcript.
//! - [`cli`] — election runs, noise sweeps, and transcript replay as used by
//!   the `qvote` binary.
//!
//! Every source of randomness is an explicitly seeded ChaCha stream, so any
//! election or sweep is bit-reproducible from its seed. See the `examples/`
//! directory for one runnable walkthrough per capability.

pub mod cli;
pub mod crypto;
pub mod encoding;
pub mod grover;
pub mod ledger;
pub mod protocol;
pub mod qsim;

pub use crypto::{HashId, KeyLabel, SecretKey, SignatureSpec};
pub use encoding::{Ballot, DecodedBallot, ElectionConfig, TallyResult};
pub use grover::{SearchOutcome, SearchProblem};
pub use ledger::{Block, Digest256, Ledger};
pub use protocol::{CastReceipt, ElectionRun, Transcript};
pub use qsim::{
    BellVariant, Counts, Direction, EntangleSpec, GateKind, GateOp, Noise, NoiseConfig,
    StateVector,
};
