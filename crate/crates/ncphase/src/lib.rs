//! Gaussian-state machinery for noncommutative phase-space quantum
//! mechanics: deformed symplectic forms and their Darboux maps, Wigner
//! functions in both variable pictures, quantumness and separability
//! verdicts, quadratic-Hamiltonian dynamics, and the displaced-parity
//! Bell functional.
//!
//! Conventions used throughout: covariance matrices are full second
//! moments (vacuum = (hbar/2) I), Wigner functions are normalized to unit
//! integral, and every matrix-valued object carries an explicit coordinate
//! layout tag. Mixing layouts without conversion is an error, never a
//! silent reinterpretation.

// Positivity guards are written as negated comparisons so NaN lands on
// the reject path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bell;
pub mod criteria;
pub mod darboux;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod ordering;
pub mod scenario;

pub use algebra::{
    build_d, build_j, build_lambda, build_omega, build_omega_prime, planar_stack_skew, FormRole,
    NCParameters, OmegaLayout, PhaseSpaceForm,
};
pub use bell::{
    bell_chsh, bell_optimize, compare_bell_trajectories, AmplitudePolicy, BellOptimum,
    CHSHEvaluation, SearchSpec, TrajectoryRow, WignerEvaluator,
};
pub use criteria::{
    hermitian_eigenvalues, hermitian_psd_min_eig, kinematic_entanglement_scan, mirror_covariance,
    pencil_margin, ppt_separability_check, rsup_check, PSDVerdict, ScanRecord, SeparabilityLabel,
    SeparabilityVerdict,
};
pub use darboux::{
    build_general_s, build_planar_s, planar_sw_constants, DarbouxMap, DarbouxMethod,
    PlanarSWConstants,
};
pub use dynamics::{evolve, hamiltonian_in_commutative_variables, QuadraticHamiltonian};
pub use error::{NcError, Result};
pub use gaussian::{
    make_thermal, make_two_mode_squeezed, make_vacuum, to_commutative_picture, to_nc_picture,
    wigner_eval, wigner_nc_eval, GaussianState, Picture, WignerKernel,
};
pub use ordering::{CoordOrdering, ModePartition};
pub use scenario::{Assembled, Scenario};
