//! CHSH on the singlet against the local deterministic maximum.
//!
//! cargo run --release --example chsh

use qreduce::epr::{
    chsh_experiment, chsh_singlet_analytic, local_deterministic_chsh_max, ChshSettings,
};

fn main() -> qreduce::Result<()> {
    let settings = ChshSettings::optimal_planar();
    let result = chsh_experiment(&settings, 100_000, 3)?;
    for (c, (l, r)) in result.per_setting.iter().zip(settings.pairs()) {
        println!("E({l}, {r}) = {:+.4}", c.correlation);
    }
    println!("S = {:+.4} +- {:.4}", result.s, result.stderr);
    println!("analytic {:+.6}", chsh_singlet_analytic(&settings));
    println!("local deterministic max {}", local_deterministic_chsh_max());
    Ok(())
}
