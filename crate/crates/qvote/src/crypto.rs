//! Keys, one-time pads, keyed hash IDs, and gate-sequence signatures.
//!
//! The hardware quantum random number generator of a real deployment is
//! replaced by a deterministic seeded stream labeled
//! [`SIMULATED_QRNG_LABEL`]; everything here is reproducible from the seed.
//! Hash IDs are keyed digests — `SHA-256(shared_secret ‖ unique_id)` — so the
//! linkage between a voter's raw ID and the ID circulating in protocol
//! records lives in the secret, not in an obscure algorithm.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::qsim::{GateOp, Noise, QsimError, StateVector};

/// Label recorded wherever the simulated key stream stands in for hardware.
pub const SIMULATED_QRNG_LABEL: &str = "simulated-qrng";

/// Wire-format identifier of the hash backing [`HashId`] digests.
pub const HASH_ALGORITHM_ID: &str = "sha-256";

#[derive(Debug, Error, PartialEq)]
pub enum CryptoError {
    #[error("key length must be at least one bit")]
    InvalidLength,
    #[error("message of {message} bits exceeds the {key}-bit key")]
    KeyTooShort { message: usize, key: usize },
    #[error("unique ID must be nonempty")]
    InvalidId,
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Which shared secret a key instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KeyLabel {
    /// Voter ↔ tallyman.
    Kab,
    /// Voter ↔ scrutineer.
    Kac,
}

impl fmt::Display for KeyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyLabel::Kab => "K_AB",
            KeyLabel::Kac => "K_AC",
        })
    }
}

/// A shared secret: random bits drawn from the seeded protocol stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub label: KeyLabel,
    bits: Vec<bool>,
}

impl SecretKey {
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Draws a fresh key of `length_bits` random bits.
pub fn gen_key<R: Rng + ?Sized>(
    label: KeyLabel,
    length_bits: usize,
    rng: &mut R,
) -> Result<SecretKey, CryptoError> {
    if length_bits == 0 {
        return Err(CryptoError::InvalidLength);
    }
    let bits = (0..length_bits).map(|_| rng.random::<bool>()).collect();
    Ok(SecretKey { label, bits })
}

/// One-time pad: XOR with the key prefix. Self-inverse.
pub fn otp(message: &[bool], key: &SecretKey) -> Result<Vec<bool>, CryptoError> {
    if message.len() > key.bits.len() {
        return Err(CryptoError::KeyTooShort {
            message: message.len(),
            key: key.bits.len(),
        });
    }
    Ok(message
        .iter()
        .zip(&key.bits)
        .map(|(m, k)| m ^ k)
        .collect())
}

/// A 256-bit keyed digest identifying a registered voter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashId {
    /// Lowercase-hex 256-bit digest.
    #[serde(with = "hex_digest")]
    pub digest: [u8; 32],
    pub algorithm_id: String,
}

impl HashId {
    /// The digest as a bit-vector (most significant bit of each byte first),
    /// ready for one-time-pad encryption.
    pub fn to_bits(&self) -> Vec<bool> {
        bytes_to_bits(&self.digest)
    }

    pub fn from_bits(bits: &[bool]) -> Option<Self> {
        if bits.len() != 256 {
            return None;
        }
        let bytes = bits_to_bytes(bits);
        Some(HashId {
            digest: bytes.try_into().expect("256 bits are 32 bytes"),
            algorithm_id: HASH_ALGORITHM_ID.to_string(),
        })
    }

    pub fn hex(&self) -> String {
        hex::encode(self.digest)
    }
}

impl fmt::Display for HashId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

mod hex_digest {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(digest: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(digest))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))
    }
}

/// Keyed hash ID: `SHA-256(shared_secret ‖ unique_id)`.
pub fn hash_id(unique_id: &[u8], shared_secret: &[u8]) -> Result<HashId, CryptoError> {
    if unique_id.is_empty() {
        return Err(CryptoError::InvalidId);
    }
    let mut hasher = Sha256::new();
    hasher.update(shared_secret);
    hasher.update(unique_id);
    Ok(HashId {
        digest: hasher.finalize().into(),
        algorithm_id: HASH_ALGORITHM_ID.to_string(),
    })
}

/// A voter's secret gate-sequence signature.
///
/// Signing applies the gates in order; unsigning applies the reversed
/// adjoints, so unsign∘sign is the identity when noiseless. The empty
/// sequence is a valid (identity) signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureSpec {
    pub gates: Vec<GateOp>,
}

impl SignatureSpec {
    pub fn new(gates: Vec<GateOp>) -> Self {
        SignatureSpec { gates }
    }

    /// The unsigning sequence: reversed adjoints.
    pub fn inverse_gates(&self) -> Vec<GateOp> {
        self.gates.iter().rev().map(GateOp::inverse).collect()
    }

    /// Canonical text form, e.g. `"Z@0;X@1"` — the ledger's signing details.
    pub fn descriptor(&self) -> String {
        self.gates
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses the canonical `;`-joined descriptor form.
    pub fn parse_descriptor(text: &str) -> Result<Self, QsimError> {
        if text.is_empty() {
            return Ok(SignatureSpec { gates: Vec::new() });
        }
        let gates = text
            .split(';')
            .map(str::parse)
            .collect::<Result<Vec<GateOp>, _>>()?;
        Ok(SignatureSpec { gates })
    }
}

/// Applies the signature gates in order.
pub fn sign(
    state: &mut StateVector,
    spec: &SignatureSpec,
    mut noise: Option<&mut Noise>,
) -> Result<(), CryptoError> {
    for gate in &spec.gates {
        state.apply_gate(gate, noise.as_deref_mut())?;
    }
    Ok(())
}

/// Removes the signature: reversed adjoint gates in order.
pub fn unsign(
    state: &mut StateVector,
    spec: &SignatureSpec,
    mut noise: Option<&mut Noise>,
) -> Result<(), CryptoError> {
    for gate in spec.inverse_gates() {
        state.apply_gate(&gate, noise.as_deref_mut())?;
    }
    Ok(())
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|byte| (0..8).rev().map(move |bit| byte & (1 << bit) != 0))
        .collect()
}

fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| {
            chunk
                .iter()
                .fold(0u8, |acc, &bit| (acc << 1) | u8::from(bit))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::GateKind;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn eq1_state() -> StateVector {
        let w = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        StateVector::from_amplitudes(vec![w, w, Complex64::ZERO, w]).unwrap()
    }

    #[test]
    fn keys_replay_from_the_same_seed() {
        let mut a = ChaCha12Rng::seed_from_u64(9);
        let mut b = ChaCha12Rng::seed_from_u64(9);
        let ka = gen_key(KeyLabel::Kab, 8, &mut a).unwrap();
        let kb = gen_key(KeyLabel::Kab, 8, &mut b).unwrap();
        assert_eq!(ka, kb);
        assert_eq!(ka.len(), 8);
    }

    #[test]
    fn distinct_seeds_give_distinct_long_keys() {
        for pair in 0..100u64 {
            let mut a = ChaCha12Rng::seed_from_u64(pair);
            let mut b = ChaCha12Rng::seed_from_u64(pair + 1_000_000);
            let ka = gen_key(KeyLabel::Kac, 256, &mut a).unwrap();
            let kb = gen_key(KeyLabel::Kac, 256, &mut b).unwrap();
            assert_ne!(ka.bits(), kb.bits(), "seed pair {pair}");
        }
    }

    #[test]
    fn zero_length_key_rejected() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert_eq!(
            gen_key(KeyLabel::Kab, 0, &mut rng),
            Err(CryptoError::InvalidLength)
        );
    }

    #[test]
    fn otp_identity_under_zero_key() {
        let key = SecretKey {
            label: KeyLabel::Kab,
            bits: vec![false; 16],
        };
        let message = vec![true, false, true, true];
        assert_eq!(otp(&message, &key).unwrap(), message);
    }

    #[test]
    fn message_longer_than_key_rejected() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let key = gen_key(KeyLabel::Kac, 256, &mut rng).unwrap();
        let message = vec![true; 257];
        assert_eq!(
            otp(&message, &key),
            Err(CryptoError::KeyTooShort {
                message: 257,
                key: 256
            })
        );
    }

    #[test]
    fn hash_id_is_deterministic_and_input_sensitive() {
        let a = hash_id(b"alice-01", b"secret").unwrap();
        let b = hash_id(b"alice-01", b"secret").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.algorithm_id, "sha-256");

        let c = hash_id(b"alice-02", b"secret").unwrap();
        assert_ne!(a.digest, c.digest);
        let d = hash_id(b"alice-01", b"tercet").unwrap();
        assert_ne!(a.digest, d.digest);

        assert_eq!(hash_id(b"", b"secret"), Err(CryptoError::InvalidId));
    }

    #[test]
    fn hash_id_bit_round_trip() {
        let id = hash_id(b"alice-01", b"secret").unwrap();
        let bits = id.to_bits();
        assert_eq!(bits.len(), 256);
        assert_eq!(HashId::from_bits(&bits).unwrap(), id);
    }

    #[test]
    fn signature_round_trip_on_the_standard_scenario() {
        let spec = SignatureSpec::new(vec![GateOp::z(0), GateOp::x(1)]);
        let original = eq1_state();
        let mut state = original.clone();
        sign(&mut state, &spec, None).unwrap();
        unsign(&mut state, &spec, None).unwrap();
        assert!((state.fidelity(&original).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_signature_is_identity() {
        let spec = SignatureSpec::new(Vec::new());
        let original = eq1_state();
        let mut state = original.clone();
        sign(&mut state, &spec, None).unwrap();
        assert_eq!(state, original);
        assert_eq!(spec.descriptor(), "");
        assert_eq!(SignatureSpec::parse_descriptor("").unwrap(), spec);
    }

    #[test]
    fn wrong_unsign_spec_breaks_fidelity() {
        // Signing [Z@0] then unsigning [X@0] leaves X0·Z0, which moves the
        // three-way superposition onto an orthogonal state: fidelity 0.
        let original = eq1_state();
        let mut state = original.clone();
        sign(&mut state, &SignatureSpec::new(vec![GateOp::z(0)]), None).unwrap();
        unsign(&mut state, &SignatureSpec::new(vec![GateOp::x(0)]), None).unwrap();
        let fid = state.fidelity(&original).unwrap();
        assert!(fid < 1e-10, "fidelity {fid}");
    }

    #[test]
    fn descriptor_round_trip() {
        let spec = SignatureSpec::new(vec![
            GateOp::z(0),
            GateOp::x(1),
            GateOp::cnot(0, 1).unwrap(),
            GateOp::s(1).inverse(),
        ]);
        let text = spec.descriptor();
        assert_eq!(text, "Z@0;X@1;CNOT@0,1;S'@1");
        assert_eq!(SignatureSpec::parse_descriptor(&text).unwrap(), spec);
    }

    fn random_signature(n_qubits: usize, len: usize, rng: &mut ChaCha12Rng) -> SignatureSpec {
        use rand::Rng;
        let mut gates = Vec::with_capacity(len);
        for _ in 0..len {
            let q = rng.random_range(0..n_qubits);
            let gate = match rng.random_range(0..8u8) {
                0 => GateOp::x(q),
                1 => GateOp::y(q),
                2 => GateOp::z(q),
                3 => GateOp::h(q),
                4 => GateOp::s(q),
                5 => GateOp::t(q),
                k => {
                    let other = (q + 1 + rng.random_range(0..n_qubits - 1)) % n_qubits;
                    if k == 6 {
                        GateOp::cnot(q, other).unwrap()
                    } else {
                        GateOp::cz(q, other).unwrap()
                    }
                }
            };
            gates.push(gate);
        }
        SignatureSpec::new(gates)
    }

    proptest! {
        #[test]
        fn otp_is_an_involution(seed in any::<u64>(), len in 1usize..256) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let key = gen_key(KeyLabel::Kab, 256, &mut rng).unwrap();
            let message: Vec<bool> = (0..len).map(|_| {
                use rand::Rng;
                rng.random::<bool>()
            }).collect();
            let once = otp(&message, &key).unwrap();
            prop_assert_eq!(otp(&once, &key).unwrap(), message);
        }

        #[test]
        fn random_signatures_round_trip(seed in any::<u64>(), n in 2usize..5, len in 0usize..9) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let spec = random_signature(n, len, &mut rng);
            let mut state = StateVector::basis(n, 0).unwrap();
            // Start from a scrambled but deterministic state.
            sign(&mut state, &random_signature(n, 6, &mut rng), None).unwrap();
            let original = state.clone();
            sign(&mut state, &spec, None).unwrap();
            unsign(&mut state, &spec, None).unwrap();
            prop_assert!((state.fidelity(&original).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn hash_ids_stay_256_bit_for_any_input(id in proptest::collection::vec(any::<u8>(), 1..1024)) {
            let digest = hash_id(&id, b"shared").unwrap();
            prop_assert_eq!(digest.digest.len(), 32);
            prop_assert_eq!(hash_id(&id, b"shared").unwrap(), digest);
        }
    }
}
