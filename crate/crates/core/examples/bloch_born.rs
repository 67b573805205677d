//! Bloch vectors, density matrices and Born probabilities.
//!
//! cargo run --example bloch_born

use qreduce::qstate::{
    born_probabilities, density_from_bloch, pauli_commutator, pre_analyzer_state, BlochVector,
};

fn main() -> qreduce::Result<()> {
    let n = BlochVector::from_angles(std::f64::consts::FRAC_PI_3, 0.0);
    let m = BlochVector::Z;

    let rho = density_from_bloch(n)?;
    println!("n = {n}");
    println!("rho = {:.4}", rho.matrix());
    println!("purity = {:.6}", rho.purity());

    let (pv, ph) = born_probabilities(n, m)?;
    println!("P_v = {pv:.6}, P_h = {ph:.6}");

    let mes = pre_analyzer_state(n, m)?;
    let (a0, a1) = mes.amplitudes();
    println!("|mes> = {a1:.4}|1> + {a0:.4}|0>");

    // [n.s, m.s] = 2i (n x m).s
    let c = pauli_commutator(BlochVector::X, BlochVector::Y)?;
    println!("[s1, s2] = {c:.3}");

    let mixed = density_from_bloch(BlochVector::new(0.3, 0.0, 0.4))?;
    println!(
        "mixed purity = {:.4}, eigenvalues = {:?}",
        mixed.purity(),
        mixed.eigenvalues()
    );
    Ok(())
}
