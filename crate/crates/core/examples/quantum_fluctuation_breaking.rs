//! A classically stable long-range string broken by the transverse field.

use stringbreak::statics::{
    locate_avoided_crossing, perturbative_crossing, perturbative_energies, static_potential_curve, CrossingOptions,
    ScanAxis,
};
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    let kernel = CouplingKernel::power_law(2.2)?;
    let chain = ChainSpec::static_chain(7, kernel)?;
    let levels = perturbative_energies(&chain, 0.5)?;
    println!("second order at g = 0.5: E_s = {:.5}, E_bs = {:.5}", levels.e_s2, levels.e_bs2);
    println!("second-order crossing: g = {:?}", perturbative_crossing(&chain)?);

    let op = IsingHamiltonian::for_chain(&chain, 0.0, 0.0)?;
    let fit = locate_avoided_crossing(&op, ScanAxis::G, (0.05, 2.0), &CrossingOptions::default())?;
    println!("exact diagonalization: g_c = {:.4}, gap = {:.4}", fit.control_c, fit.gap_c);

    let ells: Vec<usize> = (1..=12).collect();
    for g in [0.0, 1.0] {
        let curve = static_potential_curve(kernel, g, 0.0, &ells)?;
        println!("g = {g}: ell_c = {}", curve.ell_c);
        for p in curve.points.iter().step_by(3) {
            println!("  ell = {:>2}  V_0 = {:.4}  V_1 = {:.4}", p.ell, p.v_ground, p.v_first);
        }
    }
    Ok(())
}
