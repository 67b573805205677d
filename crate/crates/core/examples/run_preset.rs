//! Run a built-in experiment preset and write its artifacts.
//!
//! cargo run --example run_preset -- strategy4 out/strategy4

use qreduce::experiment::{preset, run, PRESETS};

fn main() -> qreduce::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "qkd-basic".into());
    let out = args.next().unwrap_or_else(|| format!("out/{name}"));
    if !PRESETS.contains(&name.as_str()) {
        eprintln!("presets: {}", PRESETS.join(", "));
    }
    let report = run(&preset(&name)?, out.as_ref())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.summary["results"])?
    );
    for path in report.artifacts {
        println!("wrote {}", path.display());
    }
    Ok(())
}
