//! Lowest levels and ground-state magnetization along a field scan.

use stringbreak::statics::{scan_spectrum, ScanAxis, SpectrumOptions};
use stringbreak::{ChainSpec, CouplingKernel, IsingHamiltonian};

fn main() -> stringbreak::Result<()> {
    let chain = ChainSpec::static_chain(7, CouplingKernel::exponential(1.0)?)?;
    let op = IsingHamiltonian::for_chain(&chain, 0.0, 1.2)?;
    let hs: Vec<f64> = (0..=12).map(|i| 0.05 * i as f64).collect();
    let slices = scan_spectrum(&op, ScanAxis::H, &hs, 4, false, &SpectrumOptions::default())?;
    println!("   h      E0         E1-E0     E2-E0     m_z(ground)");
    for s in &slices {
        let e = &s.energies;
        println!("{:.2}  {:>10.5}  {:>8.5}  {:>8.5}  {:>8.4}", s.control, e[0], e[1] - e[0], e[2] - e[0], s.magnetizations[0]);
    }
    Ok(())
}
