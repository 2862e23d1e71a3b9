//! Frequency-modulated Dicke model: Floquet reduction to an anisotropic
//! Dicke model, mean-field phase diagram, Bogoliubov spectra, and an exact
//! finite-N simulator that checks the reduction.

pub mod bessel;
pub mod bogoliubov;
pub mod error;
pub mod exact;
pub mod floquet;
pub mod fock;
pub mod meanfield;
pub mod oracle;
pub mod reduction;
pub mod scan;

pub use bessel::bessel_j;
pub use bogoliubov::{
    analyse, excitation_spectrum, expand_quadratic, expand_quadratic_at, spectrum_scan, QuadraticForm, Spectrum,
    SpectrumSample,
};
pub use error::{Error, Result};
pub use exact::{extrapolated_gap, finite_n_gap, GapExtrapolation};
pub use floquet::{
    build_lab_hamiltonian, compare_fidelity, effective_frame_propagator, propagate_exact, FidelityReport, InitialState,
    LabState, SimConfig, Trajectory,
};
pub use fock::SpinFockSpace;
pub use meanfield::{
    classical_energy, classify, classify_phase, ground_state, solve_displacements, GroundState, Phase, Symmetry,
};
pub use oracle::{minimize_energy_oracle, OracleMinimum};
pub use scan::{run, Command, Format, Output, ScanConfig, Table};
pub use reduction::{
    effective_model, rwa_report, sideband_select, EffectiveModel, ModulationParams, Regime, RwaReport, Sidebands,
    SystemParams,
};
