//! Hash-chained, append-only record of vote registrations.
//!
//! Each block commits to the voter's hash ID, the signing details she can
//! later recognize, a caller-injected timestamp, and the predecessor's block
//! hash (256 zero bits for the genesis block). Block hashes are SHA-256 over
//! a fixed canonical byte layout, so any single-bit tamper anywhere in a
//! serialized block invalidates chain verification at that block or a
//! successor.
//!
//! Canonical block preimage, hashed into `block_hash`:
//!
//! ```text
//! index (u64 BE) ‖ voter digest (32 bytes)
//!                ‖ signing_details length (u32 BE) ‖ signing_details UTF-8
//!                ‖ timestamp_ms (u64 BE) ‖ prev_hash (32 bytes)
//! ```
//!
//! Timestamps come from the protocol clock, never from the wall clock, which
//! keeps chains bit-reproducible.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::HashId;

/// A 256-bit digest in ledger records, serialized as lowercase hex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Digest256(#[serde(with = "hex_bytes")] pub [u8; 32]);

impl Digest256 {
    pub const ZERO: Digest256 = Digest256([0u8; 32]);

    pub fn hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

impl From<&HashId> for Digest256 {
    fn from(id: &HashId) -> Self {
        Digest256(id.digest)
    }
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LedgerError {
    #[error("voter hash ID already registered in the ledger")]
    DuplicateVoter,
    #[error("chain invalid at block {first_bad_index}: {reason}")]
    InvalidChain {
        first_bad_index: usize,
        reason: String,
    },
    #[error("cannot decode block bytes: {0}")]
    BadBlockBytes(String),
}

/// One vote-registration record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub index: u64,
    pub voter_hash_id: Digest256,
    pub signing_details: String,
    pub timestamp_ms: u64,
    pub prev_hash: Digest256,
    pub block_hash: Digest256,
}

impl Block {
    /// The canonical preimage of `block_hash`.
    pub fn canonical_preimage(&self) -> Vec<u8> {
        let details = self.signing_details.as_bytes();
        let mut bytes = Vec::with_capacity(8 + 32 + 4 + details.len() + 8 + 32);
        bytes.extend_from_slice(&self.index.to_be_bytes());
        bytes.extend_from_slice(&self.voter_hash_id.0);
        bytes.extend_from_slice(&(details.len() as u32).to_be_bytes());
        bytes.extend_from_slice(details);
        bytes.extend_from_slice(&self.timestamp_ms.to_be_bytes());
        bytes.extend_from_slice(&self.prev_hash.0);
        bytes
    }

    pub fn compute_hash(&self) -> Digest256 {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_preimage());
        Digest256(hasher.finalize().into())
    }

    /// Full serialized form: canonical preimage followed by `block_hash`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = self.canonical_preimage();
        bytes.extend_from_slice(&self.block_hash.0);
        bytes
    }

    /// Strict inverse of [`Block::to_bytes`]: rejects trailing bytes, short
    /// buffers, and invalid UTF-8 in the signing details.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let err = |what: &str| LedgerError::BadBlockBytes(what.to_string());
        let take = |bytes: &[u8], at: usize, len: usize| -> Result<Vec<u8>, LedgerError> {
            bytes
                .get(at..at + len)
                .map(<[u8]>::to_vec)
                .ok_or_else(|| err("buffer too short"))
        };
        let index = u64::from_be_bytes(take(bytes, 0, 8)?.try_into().unwrap());
        let voter: [u8; 32] = take(bytes, 8, 32)?.try_into().unwrap();
        let details_len =
            u32::from_be_bytes(take(bytes, 40, 4)?.try_into().unwrap()) as usize;
        let details_bytes = take(bytes, 44, details_len)?;
        let signing_details =
            String::from_utf8(details_bytes).map_err(|_| err("signing details not UTF-8"))?;
        let at = 44 + details_len;
        let timestamp_ms = u64::from_be_bytes(take(bytes, at, 8)?.try_into().unwrap());
        let prev: [u8; 32] = take(bytes, at + 8, 32)?.try_into().unwrap();
        let hash: [u8; 32] = take(bytes, at + 40, 32)?.try_into().unwrap();
        if bytes.len() != at + 72 {
            return Err(err("trailing bytes"));
        }
        Ok(Block {
            index,
            voter_hash_id: Digest256(voter),
            signing_details,
            timestamp_ms,
            prev_hash: Digest256(prev),
            block_hash: Digest256(hash),
        })
    }
}

/// The append-only registration chain.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ledger {
    blocks: Vec<Block>,
}

impl Ledger {
    pub fn new() -> Self {
        Ledger::default()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Appends a registration block and returns it.
    ///
    /// Rejects a hash ID that already has a block: the ledger enforces
    /// one-vote-per-ID independently of the registry's own removal step.
    pub fn append_block(
        &mut self,
        voter_hash_id: Digest256,
        signing_details: String,
        timestamp_ms: u64,
    ) -> Result<&Block, LedgerError> {
        if self.blocks.iter().any(|b| b.voter_hash_id == voter_hash_id) {
            return Err(LedgerError::DuplicateVoter);
        }
        let prev_hash = self
            .blocks
            .last()
            .map_or(Digest256::ZERO, |b| b.block_hash);
        let mut block = Block {
            index: self.blocks.len() as u64,
            voter_hash_id,
            signing_details,
            timestamp_ms,
            prev_hash,
            block_hash: Digest256::ZERO,
        };
        block.block_hash = block.compute_hash();
        self.blocks.push(block);
        Ok(self.blocks.last().expect("just pushed"))
    }

    /// Checks every block invariant; reports the first violated index.
    pub fn verify_chain(&self) -> Result<(), LedgerError> {
        let mut expected_prev = Digest256::ZERO;
        for (position, block) in self.blocks.iter().enumerate() {
            let bad = |reason: &str| LedgerError::InvalidChain {
                first_bad_index: position,
                reason: reason.to_string(),
            };
            if block.index != position as u64 {
                return Err(bad("index does not match position"));
            }
            if block.prev_hash != expected_prev {
                return Err(bad("prev_hash does not match predecessor"));
            }
            if block.block_hash != block.compute_hash() {
                return Err(bad("block_hash does not match recomputation"));
            }
            expected_prev = block.block_hash;
        }
        Ok(())
    }

    /// The unique block registered under a hash ID, if any.
    pub fn find_registration(&self, voter_hash_id: &HashId) -> Option<&Block> {
        let digest = Digest256::from(voter_hash_id);
        self.blocks.iter().find(|b| b.voter_hash_id == digest)
    }

    /// Lowercase-hex JSON array of blocks.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Rebuilds a ledger from externally supplied blocks without validation;
    /// pair with [`Ledger::verify_chain`].
    pub fn from_blocks(blocks: Vec<Block>) -> Self {
        Ledger { blocks }
    }
}
