//! Entangled pairs: joint probabilities, correlations and confirmation counts.
//!
//! cargo run --example epr_correlations

use qreduce::epr::{
    correlation_experiment, joint_probabilities, pair_state, required_events, singlet_state,
};
use qreduce::qstate::BlochVector;

fn main() -> qreduce::Result<()> {
    let singlet = singlet_state(BlochVector::Z)?;
    let a = BlochVector::planar(0.0);
    for angle in [0.0, 0.5, 1.0, std::f64::consts::PI] {
        let b = BlochVector::planar(angle);
        let p = joint_probabilities(&singlet, a, b)?;
        let r = correlation_experiment(&singlet, a, b, 100_000, 5)?;
        println!(
            "angle {angle:.3}: analytic {:+.4}, sampled {:+.4} +- {:.4}, left P(+1) {:.4}",
            p.covariance(),
            r.covariance,
            r.stderr(),
            p.left_marginal(1)
        );
    }

    let r = correlation_experiment(&singlet, BlochVector::Z, -BlochVector::Z, 9, 1)?;
    println!(
        "antiparallel, N = 9: mismatches {}, bound {:?}",
        r.mismatches, r.bound
    );
    println!("events needed for error 0.1: {}", required_events(0.1)?);

    let partial = pair_state(0.3, 0.7, BlochVector::Z)?;
    let p = joint_probabilities(&partial, BlochVector::X, BlochVector::Y)?;
    println!(
        "partially entangled: E = {:+.4}, left mean {:+.4}",
        p.correlation(),
        p.left_mean()
    );
    Ok(())
}
