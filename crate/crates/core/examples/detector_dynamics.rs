//! Photon-detector evolution: coherence loss, revivals and a finite pulse.
//!
//! cargo run --example detector_dynamics

use qreduce::detector::{
    build_joint_initial, decompose, recurrence_scan, DetectorInit, DetectorModel, Evolution,
};
use qreduce::qstate::{pre_analyzer_state, BlochVector};

fn main() -> qreduce::Result<()> {
    let g0 = 1.0;
    let photon = pre_analyzer_state(BlochVector::X, BlochVector::Z)?;

    // Two-level detector, coupling always on.
    let model = DetectorModel::ladder(2, 0.0, g0, 0.0, 1e9, DetectorInit::Ground)?;
    let initial = build_joint_initial(&model, &photon)?;
    let evolution = Evolution::new(&model);
    println!("{:>6} {:>8} {:>10}", "t", "p1", "|Tr lam|");
    for k in 0..=8 {
        let t = k as f64 * std::f64::consts::PI / 8.0;
        let d = decompose(&evolution.state_at(&initial, t)?);
        println!("{t:>6.3} {:>8.4} {:>10.6}", d.p1, d.lambda_norm);
    }
    let revivals = recurrence_scan(&model, &photon, 3.0 * std::f64::consts::PI, 1e-3, 0.9)?;
    println!("revivals: {revivals:.3?}");

    // Pulse switched off at pi/8: coherence stays where it was.
    let short = DetectorModel::ladder(
        2,
        0.0,
        g0,
        0.0,
        std::f64::consts::PI / 8.0,
        DetectorInit::Ground,
    )?;
    let evolution = Evolution::new(&short);
    for t in [0.5, 1.0, 5.0] {
        let d = decompose(&evolution.state_at(&initial, t)?);
        println!("short pulse t = {t}: |Tr lam| = {:.6}", d.lambda_norm);
    }

    // Larger incommensurate detector.
    let levels: Vec<f64> = (0..8).map(|k| (k as f64).sqrt() * 1.3).collect();
    let big = DetectorModel::with_levels(&levels, g0, 0.0, 1e9, DetectorInit::Ground)?;
    let start = build_joint_initial(&big, &photon)?;
    let evolution = Evolution::new(&big);
    let d = decompose(&evolution.state_at(&start, 2.0)?);
    println!(
        "D = 8 at t = 2: p1 = {:.4}, |Tr lam| = {:.4}",
        d.p1, d.lambda_norm
    );
    Ok(())
}
