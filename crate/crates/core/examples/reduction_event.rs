//! A single measurement event: outcome sampling and the reduction unitary.
//!
//! cargo run --example reduction_event

use qreduce::detector::sample_event;
use qreduce::qstate::{
    pre_analyzer_state, reduction_unitaries, unitarity_defect, BlochVector, Branch, PureKet,
};

fn main() -> qreduce::Result<()> {
    let n = BlochVector::from_angles(1.1, 0.4);
    let m = BlochVector::from_angles(0.3, 2.0);

    let pair = reduction_unitaries(n, m)?;
    let mes = pre_analyzer_state(n, m)?;
    for branch in [Branch::V, Branch::H] {
        let u = pair.get(branch);
        let target = match branch {
            Branch::V => PureKet::vertical(),
            Branch::H => PureKet::horizontal(),
        };
        let out = mes.apply(u)?;
        println!(
            "{branch:?}: unitarity defect {:.1e}, reaches target: {}",
            unitarity_defect(u),
            out.same_up_to_phase(&target, 1e-12)
        );
    }

    for seed in 0..5u64 {
        let event = sample_event(n, m, seed)?;
        println!(
            "seed {seed}: outcome {:+}, branch {:?}, post-state bloch {}",
            event.outcome,
            event.applied,
            event.post_photon_state.bloch()
        );
    }
    Ok(())
}
