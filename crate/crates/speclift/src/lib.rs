//! Solvability checks and constructive liftings for the spectral
//! Nevanlinna-Pick lifting problem.
//!
//! The library decides, node by node, whether a holomorphic map into the
//! symmetrized polydisc lifts through the spectral ball with prescribed
//! matrix values, by measuring vanishing orders of derivatives of the
//! characteristic polynomial against the Jordan structure of each target.
//! When every target is cyclic it also constructs the lifting explicitly as
//! a conjugated companion family and verifies it by sampling.
//!
//! Numerical building blocks are kept small and auditable: characteristic
//! polynomials by trace recurrences, simultaneous root iteration, one-sided
//! Jacobi singular values, and Pade-based matrix exponentials and
//! logarithms. Jordan decisions are threshold-driven and every report echoes
//! the thresholds it ran under.

pub mod cli;
pub mod config;
pub mod criterion;
pub mod error;
pub mod files;
pub mod instance;
pub mod jet;
pub mod jordan;
pub mod lift;
pub mod matfun;
pub mod matrix;
pub mod poly;
pub mod projection;

pub use config::ToleranceConfig;
pub use criterion::{
    check_consistency, check_global, check_local, chi_derivative_jet, BlockReading,
    GlobalVerdict, LocalProblem, LocalReport,
};
pub use error::{Error, Result};
pub use instance::LiftInstance;
pub use jet::{from_polynomial, Jet, VanishingOrder};
pub use jordan::{
    cluster_eigenvalues, d_oracle, d_sequence, is_cyclic, jordan_partition, jordan_structure,
    weyr, DSequence, EigenCluster, JordanStructure,
};
pub use lift::{
    connect_similar, global_cyclic_lift, local_cyclic_lift, similarity_transform, spray,
    spray_derivative, transvection_factorization, verify_lift, HoloMatrixMap, LinePath,
    LiftResult, LiftVerification,
};
pub use matfun::{mat_exp, mat_log};
pub use matrix::{commutator, ComplexMatrix};
pub use poly::{char_poly, poly_roots, spectral_radius, PolyCoeffs};
pub use projection::{
    companion, in_spectral_ball, in_symmetrized_polydisc, is_branch_point, project, sigma,
    Membership, SymPoint,
};
