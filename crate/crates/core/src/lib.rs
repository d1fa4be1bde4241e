//! Simulation and analysis toolkit for a passive PT-symmetric two-level
//! system: a coherently driven qubit whose excited state leaks to a third
//! level at a tunable rate.
//!
//! The crate builds the non-Hermitian Hamiltonian and Liouvillian
//! generators, propagates density matrices by three independent methods
//! (fixed-step RK4, the closed-form Liouvillian eigenbasis, and explicit
//! solutions for the |0⟩ initial state), computes the order parameters that
//! witness the PT phase transition, locates the population turning point,
//! synthesizes shot-noise readout data, and recovers the loss rate from
//! such data by least squares.
//!
//! Everything is deterministic: the sampling PRNG is seeded and counter
//! based, and all numerics are fixed-step or bracketed searches.

pub mod dynamics;
pub mod error;
pub mod measurement;
pub mod model;
pub mod numerics;
pub mod order_params;
mod search;

pub use dynamics::{
    closed_form_lossy, closed_form_pt, normalize, observables, propagate_mat_exp,
    propagate_numeric, propagate_spectral, rho00_lossy, to_lossy_picture, to_pt_picture,
    trace_distance_to_steady, DensityMatrix, Observables, Picture, Trajectory,
};
pub use error::{PtError, Result};
pub use measurement::{
    exact_records, fit_gamma, readout_probability, reconstruct_pt_series, simulate_shots,
    FitResult, ReadoutObservable, ShotRecord, PRNG_ALGORITHM_ID,
};
pub use model::{
    build_h_eff, build_h_pt, build_liouvillian, classify_phase, ep_eigenmatrix,
    h_eff_eigenvalues, h_eigensystem, h_pt_eigenvalues, liouvillian_spectrum, sigma_x, sigma_y,
    sigma_z, unvec_rho, vec_rho, HamiltonianSpectrum, LiouvillianSpectrum, Phase, PhaseTag,
    SystemParams, EP_REL_TOL,
};
pub use num_complex::Complex64;
pub use numerics::{mat_exp, rk4_propagate, trace_norm_diff, CMat, CVec};
pub use order_params::{
    find_gamma_min, order_param_sweep, population_sweep, sigma_numeric, sigma_numeric_from,
    sigma_y_analytic, sigma_z_analytic, AverageMethod, OrderParamKind, OrderParamResult,
};
