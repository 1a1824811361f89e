//! Bell-basis entangling and gate-sequence signatures, forward and back.
//!
//! The voter entangles her encoded ballot in a Bell basis of her choice and
//! stamps it with a secret gate sequence. Only the matching inverse
//! sequences recover the original state; anything else shows up as lost
//! fidelity. Run with:
//!
//! ```text
//! cargo run --example bell_signatures
//! ```

use qvote::crypto::{sign, unsign, SignatureSpec};
use qvote::encoding::{encode_ballot, Ballot, ElectionConfig};
use qvote::qsim::{BellVariant, Direction, EntangleSpec, GateOp, StateVector};

fn main() {
    let config = ElectionConfig::new(4).unwrap();
    let ballot: Ballot = "1101".parse().unwrap();
    let original = encode_ballot(&ballot, &config).unwrap();

    // Each Bell variant prepares its named state from |00⟩.
    for variant in BellVariant::ALL {
        let spec = EntangleSpec::new(variant, (0, 1)).unwrap();
        let mut bell = StateVector::basis(2, 0).unwrap();
        bell.apply_entangle(&spec, Direction::Forward, None).unwrap();
        let amps: Vec<String> = bell
            .amplitudes()
            .iter()
            .map(|a| format!("{:+.3}", a.re))
            .collect();
        println!("{variant:9} from |00⟩: [{}]", amps.join(", "));
    }

    // Entangle + sign, then undo both: fidelity returns to 1.
    let entangle = EntangleSpec::new(BellVariant::PhiMinus, (0, 1)).unwrap();
    let signature = SignatureSpec::new(vec![GateOp::z(0), GateOp::x(1)]);
    println!("\nsignature descriptor: {}", signature.descriptor());

    let mut state = original.clone();
    state.apply_entangle(&entangle, Direction::Forward, None).unwrap();
    sign(&mut state, &signature, None).unwrap();
    println!(
        "after entangle+sign, fidelity with the ballot state: {:.6}",
        state.fidelity(&original).unwrap()
    );

    unsign(&mut state, &signature, None).unwrap();
    state.apply_entangle(&entangle, Direction::Inverse, None).unwrap();
    println!(
        "after unsign+disentangle, fidelity: {:.6}",
        state.fidelity(&original).unwrap()
    );

    // A wrong unsigning sequence leaves the state scrambled.
    let mut forged = original.clone();
    sign(&mut forged, &SignatureSpec::new(vec![GateOp::z(0)]), None).unwrap();
    unsign(&mut forged, &SignatureSpec::new(vec![GateOp::x(0)]), None).unwrap();
    println!(
        "unsigning Z@0 with X@0 instead leaves fidelity: {:.6}",
        forged.fidelity(&original).unwrap()
    );
}
