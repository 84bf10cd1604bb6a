//! Decides whether ordered arrays of quantum emitters can superradiate under
//! a catalog of dissipative interaction models.
//!
//! The pipeline: describe an array ([`lattice::LatticeSpec`]) and a coupling
//! profile ([`models::InteractionModel`]), build the collective decoherence
//! matrix, then ask questions of it — physical realizability
//! ([`spectral::analyze`]), photon statistics and burst criteria
//! ([`correlations`]), certified rate bounds ([`bounds`]), exact emission
//! dynamics for small arrays ([`dynamics`]), and cumulant dynamics for large
//! ones ([`meanfield`]).

pub mod bounds;
pub mod cli;
pub mod correlations;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod meanfield;
pub mod models;
mod ode;
mod sectors;
pub mod spectral;

pub use bounds::{
    applicable_bounds, brute_force_hgamma_max, exponential_1d_bound, gershgorin_nn_bound,
    powerlaw_1d_bound, BoundMethod, RateBound,
};
pub use correlations::{
    chiral_g2_closed, classify, correlation_report, g2_zero, g3_zero, gamma_s, gamma_s_bulk,
    gamma_s_numeric, nn_product_rdot0_closed, nnn_min_gamma2, nnn_region, nnn_region_finite,
    one_jump_rates, product_state_rdot0, radial_trace_gamma2, rate_derivative_initial,
    rate_second_derivative_initial, CorrelationReport, RegionVerdict,
};
pub use dynamics::{
    burst_time_grid, detect_burst, dicke_local_evolve, jump_operators, lindblad_evolve,
    BurstReport, EmissionTrace, InitialState,
};
pub use error::{Error, Result};
pub use lattice::{Boundary, LatticeSpec, SitePair};
pub use meanfield::{
    cumulant_evolve, cumulant_rate_derivative, nn_meanfield_bound, CumulantState,
    CumulantTrajectory,
};
pub use models::{
    build_coherent_coupling, build_decoherence, CoherentCoupling, DecoherenceMatrix,
    InteractionModel,
};
pub use spectral::{
    analyze, closed_form_spectrum, eigen_decompose, gamma_p, gamma_p_thermodynamic,
    psd_certificate, SpectralSummary,
};
