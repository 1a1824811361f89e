//! Parties, phases, and the messages that travel between them.

use serde::{Deserialize, Serialize};

use crate::crypto::{KeyLabel, SecretKey};
use crate::qsim::StateVector;

/// The three protocol roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Voter,
    Tallyman,
    Scrutineer,
}

/// A voter's place in the fixed protocol order. Transitions only ever move
/// forward; any out-of-order protocol call is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VoterPhase {
    Registered,
    Encoded,
    Sent,
    Verified,
    KeysReleased,
}

/// A protocol participant: its role and the secret keys it holds.
#[derive(Debug, Clone)]
pub struct Party {
    pub role: Role,
    pub held_keys: Vec<SecretKey>,
}

impl Party {
    pub fn new(role: Role) -> Self {
        Party {
            role,
            held_keys: Vec::new(),
        }
    }

    pub fn key(&self, label: KeyLabel) -> Option<&SecretKey> {
        self.held_keys.iter().find(|k| k.label == label)
    }
}

/// A qubit register in transit.
///
/// Deliberately not `Clone`: once delivered, the sender has no handle left,
/// a move-semantics stand-in for the no-cloning theorem.
#[derive(Debug)]
pub struct QuantumMessage {
    pub state: StateVector,
    pub sender: Role,
    pub receiver: Role,
}

/// Payload of a classical channel message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    /// Raw bits, e.g. a one-time-pad ciphertext.
    Bits(Vec<bool>),
    /// Plaintext structured records, e.g. disclosed signing details.
    Text(String),
}

/// One classical channel message, logged verbatim into the run transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub sender: Role,
    pub receiver: Role,
    pub payload: Payload,
    /// Key label when the payload is one-time-pad output.
    pub encrypted_with: Option<KeyLabel>,
}

impl ClassicalMessage {
    /// The payload as raw bytes, for artifact scanning.
    pub fn payload_bytes(&self) -> Vec<u8> {
        match &self.payload {
            Payload::Text(text) => text.as_bytes().to_vec(),
            Payload::Bits(bits) => bits
                .chunks(8)
                .map(|chunk| {
                    chunk
                        .iter()
                        .fold(0u8, |acc, &bit| (acc << 1) | u8::from(bit))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_order_forward() {
        assert!(VoterPhase::Registered < VoterPhase::Encoded);
        assert!(VoterPhase::Encoded < VoterPhase::Sent);
        assert!(VoterPhase::Sent < VoterPhase::Verified);
        assert!(VoterPhase::Verified < VoterPhase::KeysReleased);
    }

    #[test]
    fn payload_bytes_covers_both_forms() {
        let text = ClassicalMessage {
            sender: Role::Voter,
            receiver: Role::Scrutineer,
            payload: Payload::Text("Z@0;X@1".into()),
            encrypted_with: None,
        };
        assert_eq!(text.payload_bytes(), b"Z@0;X@1");

        let bits = ClassicalMessage {
            sender: Role::Voter,
            receiver: Role::Scrutineer,
            payload: Payload::Bits(vec![false, true, false, false, false, false, false, true]),
            encrypted_with: Some(KeyLabel::Kac),
        };
        assert_eq!(bits.payload_bytes(), vec![0b0100_0001]);
    }
}
