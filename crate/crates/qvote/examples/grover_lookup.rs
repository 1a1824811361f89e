//! Grover lookup over the registered hash-ID database.
//!
//! Shows the amplified success probability against the closed form
//! sin²((2k+1)·arcsin(1/√M)), what happens once an ID has been retired, and
//! how gate noise degrades the search. Run with:
//!
//! ```text
//! cargo run --example grover_lookup
//! ```

use qvote::crypto::hash_id;
use qvote::grover::{grover_search, iteration_count, remove_id, SearchProblem};
use qvote::ledger::Digest256;
use qvote::qsim::{derive_sub_seed, Noise, NoiseConfig};

fn database(size: usize) -> Vec<Digest256> {
    (0..size)
        .map(|i| Digest256::from(&hash_id(format!("voter-{i}").as_bytes(), b"demo").unwrap()))
        .collect()
}

fn main() {
    for size in [4usize, 8, 16, 64] {
        let target = hash_id(format!("voter-{}", size / 2).as_bytes(), b"demo").unwrap();
        let problem = SearchProblem::new(database(size), target).unwrap();
        let mut session = Noise::noiseless(1);
        let outcome = grover_search(&problem, &mut session, 1024).unwrap();
        let k = iteration_count(size);
        let theta = (1.0 / (size as f64).sqrt()).asin();
        let analytic = (((2 * k + 1) as f64) * theta).sin().powi(2);
        println!(
            "M={size:3}  k={k}  success_prob={:.9}  analytic={analytic:.9}  found={}",
            outcome.success_prob, outcome.found
        );
    }

    // Retire an ID: the search runs but can never find it again.
    let mut db = database(8);
    let alice = hash_id(b"voter-3", b"demo").unwrap();
    remove_id(&mut db, &alice);
    let problem = SearchProblem::new(db, alice).unwrap();
    let mut session = Noise::noiseless(2);
    let outcome = grover_search(&problem, &mut session, 1024).unwrap();
    println!(
        "\nafter removal: found={} success_prob={}",
        outcome.found, outcome.success_prob
    );

    // Gate noise pushes the mean success probability down.
    println!("\nmean success over 200 noisy trajectories (M=16):");
    for p in [0.0, 0.02, 0.05, 0.1] {
        let mut sum = 0.0;
        for t in 0..200u64 {
            let mut session = Noise::new(&NoiseConfig {
                gate_error_p: p,
                meas_error_p: 0.0,
                rng_seed: derive_sub_seed(10 + (p * 1000.0) as u64, t),
            })
            .unwrap();
            let target = hash_id(b"voter-5", b"demo").unwrap();
            let problem = SearchProblem::new(database(16), target).unwrap();
            sum += grover_search(&problem, &mut session, 64).unwrap().success_prob;
        }
        println!("  gate_error_p={p:<5}  mean={:.4}", sum / 200.0);
    }
}
