//! Amplitude-encode approval ballots and decode them back from counts.
//!
//! A ballot over N candidates becomes a state over ⌈log₂ N⌉ qubits with
//! equal amplitude on every approved candidate's basis index. Run with:
//!
//! ```text
//! cargo run --example amplitude_encoding
//! ```

use qvote::encoding::{decode_counts, encode_ballot, Ballot, ElectionConfig};
use qvote::qsim::{bitstring, Noise};

fn main() {
    let config = ElectionConfig::new(4).unwrap();

    for text in ["1101", "1000", "1111", "0011"] {
        let ballot: Ballot = text.parse().unwrap();
        let state = encode_ballot(&ballot, &config).unwrap();
        println!("ballot {text} encodes to:");
        for (index, amp) in state.amplitudes().iter().enumerate() {
            println!("  |{}⟩  amplitude {:+.6}", bitstring(index, 2), amp.re);
        }

        let mut sampler = Noise::noiseless(7);
        let counts = state.measure_shots(config.shots_per_ballot, &mut sampler);
        let decoded = decode_counts(&counts, &config);
        let recovered: String = decoded
            .approvals
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        println!(
            "  {} shots decode to {recovered} (noise fraction {:.4})\n",
            counts.shots, decoded.noise_fraction
        );
    }

    // Three candidates still fit in two qubits; index 3 stays empty.
    let config3 = ElectionConfig::new(3).unwrap();
    let ballot: Ballot = "101".parse().unwrap();
    let state = encode_ballot(&ballot, &config3).unwrap();
    println!(
        "ballot 101 over three candidates leaves |11⟩ at amplitude {:+.3}",
        state.amplitudes()[3].re
    );

    // The all-zero ballot has no normalizable encoding.
    println!("ballot 0000 parses to: {:?}", "0000".parse::<Ballot>().err().unwrap());
}
