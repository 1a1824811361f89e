//! Build a registration ledger, verify the chain, and catch tampering.
//!
//! ```text
//! cargo run --example ledger_audit
//! ```

use qvote::crypto::hash_id;
use qvote::ledger::{Digest256, Ledger};

fn main() {
    let mut ledger = Ledger::new();
    for i in 0..6u64 {
        let id = hash_id(format!("voter-{i}").as_bytes(), b"audit-demo").unwrap();
        let block = ledger
            .append_block(Digest256::from(&id), "Z@0;X@1".to_string(), i)
            .unwrap();
        println!(
            "block {}: voter {}… prev {}…",
            block.index,
            &block.voter_hash_id.hex()[..12],
            &block.prev_hash.hex()[..12]
        );
    }
    println!("chain valid: {}", ledger.verify_chain().is_ok());

    // A duplicate registration is refused outright.
    let dup = hash_id(b"voter-2", b"audit-demo").unwrap();
    println!(
        "re-registering voter-2: {:?}",
        ledger
            .append_block(Digest256::from(&dup), "H@0".into(), 99)
            .err()
            .unwrap()
    );

    // Flip one bit in a middle block and watch verification name it.
    let mut blocks = ledger.blocks().to_vec();
    blocks[3].voter_hash_id.0[0] ^= 0x01;
    let tampered = Ledger::from_blocks(blocks);
    println!("after one flipped bit: {}", tampered.verify_chain().unwrap_err());

    // The JSON export round-trips and keeps the chain checkable.
    let json = ledger.to_json();
    let restored = Ledger::from_json(&json).unwrap();
    println!(
        "JSON round trip: {} blocks, chain valid: {}",
        restored.len(),
        restored.verify_chain().is_ok()
    );
}
