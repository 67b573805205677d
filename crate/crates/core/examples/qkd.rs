//! Entanglement-based key distribution with bit-flip noise.
//!
//! cargo run --example qkd

use qreduce::qkd::{estimate_qber, run_session, sift, MeasurerAgent, NoiseModel};
use qreduce::qstate::BlochVector;
use qreduce::seed::{derive, stream};

fn main() -> qreduce::Result<()> {
    let rounds = 20_000;
    for epsilon in [0.0, 0.05] {
        let seed = 42;
        let left = MeasurerAgent::left(
            [BlochVector::Z, BlochVector::X],
            derive(seed, stream::BASIS, 1),
        )?;
        let right = MeasurerAgent::right_of(&left, derive(seed, stream::BASIS, 2));
        let noise = NoiseModel::new(epsilon)?;
        let (l, r) = run_session(rounds, &left, &right, &noise, seed)?;
        let (lk, rk) = sift(&l, &r)?;
        let (q, fl, fr) = estimate_qber(&lk, &rk, 0.5, seed)?;
        println!(
            "epsilon {epsilon}: sifted {} of {rounds}, qber {:.4} (expected {:.4}), key {} bits, equal {}",
            lk.len(),
            q.qber,
            noise.expected_qber(),
            fl.len(),
            fl == fr
        );
        let hex = fl.to_hex();
        println!("  left key starts {}", &hex[..hex.len().min(32)]);
    }
    Ok(())
}
