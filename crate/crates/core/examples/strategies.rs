//! Measurement strategies on a photon stream and what a detector can infer.
//!
//! cargo run --example strategies

use qreduce::qstate::BlochVector;
use qreduce::strategy::{
    average_density, frequency_estimate, mean_observable, partition_by_observable, run_strategy,
    Selector, StrategyPlan,
};

fn main() -> qreduce::Result<()> {
    let k = 4000;
    let seed = 11;

    let pure = StrategyPlan::repeated(BlochVector::from_angles(1.0, 0.0), BlochVector::Z, k)?;
    let out = run_strategy(&pure, seed);
    let est = frequency_estimate(out.values(), 1)?;
    let predicted = 0.5 * (1.0 + mean_observable(&pure)?);
    println!(
        "single state: nu = {:.4} +- {:.4}, predicted {:.4}",
        est.nu, est.stderr, predicted
    );

    let mixed = StrategyPlan::cycled_states(
        &[BlochVector::Z, BlochVector::X, BlochVector::Y],
        BlochVector::Z,
        k,
    )?;
    let out = run_strategy(&mixed, seed);
    let est = frequency_estimate(out.values(), 1)?;
    let rho = average_density(&mixed, Selector::All)?;
    println!(
        "cycled states: nu = {:.4}, average bloch {}",
        est.nu,
        rho.bloch()
    );

    let plan = StrategyPlan::four_state_two_observable(k)?;
    let out = run_strategy(&plan, seed);
    for g in partition_by_observable(&plan, &out)?.groups {
        println!(
            "m = {}: {} events, nu = {:.4}, average density {:.4}, eigenvalues {:.4?}",
            g.direction,
            g.indices.len(),
            g.estimate.nu,
            g.average_density.matrix(),
            g.average_density.eigenvalues()
        );
    }
    let all = average_density(&plan, Selector::All)?;
    println!("all events: {:.4}", all.matrix());
    Ok(())
}
