//! Null Lagrangians: quasiaffine polynomials on `V` for a potential
//! `B = T ∘ D^k`, found as combinations of `s × s` minors of the jet matrix
//! that only depend on `T X`.

mod jet;
mod murat;
mod system;

pub use jet::{potential_to_jet_map, JetLinearMap, JetSpace};
pub use murat::{murat_check, polarization, MuratFailure, MuratReport};
pub use system::{
    assemble_system, det_poly, enumerate_minors, minor_count, solve_null_lagrangians,
    solve_null_lagrangians_with, Minor, MinorSystem, NullLagrangian, NullLagrangianBasis,
    SolveOptions, DEFAULT_MINOR_CAP, MAX_SYSTEM_ENTRIES,
};
