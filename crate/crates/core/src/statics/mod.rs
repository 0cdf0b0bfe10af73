//! Static properties: closed-form `g = 0` energetics, exact-diagonalization
//! spectra, avoided-crossing fits and the long-range phase structure.

mod closed_form;
mod crossing;
mod long_range;
mod spectrum;

pub use closed_form::{
    bubble_crossing_fields, config_energy, edge_block, enumerate_sector_minimum,
    g0_breaking_field, g0_energy_gap, g0_potentials, static_offset, BubbleCrossing,
    EnergyConvention, SectorMinimum, MAX_ENUMERATION_SITES,
};
pub use crossing::{
    default_h_interval, fit_gap_scaling, gap_length_scaling, locate_avoided_crossing,
    locate_gap_minimum, two_level_gap, CrossingFit, CrossingOptions, GapScaling,
};
pub use long_range::{
    alpha_max, alpha_min, breaking_alpha, breaking_length, lr_phase_boundaries,
    perturbative_crossing, perturbative_energies, static_potential_curve, BreakingLength,
    PerturbativeLevels, PhaseBoundary, PotentialCurve, PotentialPoint,
};
pub use spectrum::{
    lowest_spectrum, lowest_spectrum_with, scan_spectrum, ScanAxis, SpectrumOptions,
    SpectrumSlice,
};
