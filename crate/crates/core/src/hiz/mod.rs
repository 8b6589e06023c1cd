//! Symplectic (β = 4) and unitary (β = 2) HIZ integrals: correction factors χ,
//! their defining differential equation, and Haar Monte Carlo checks.

mod chi;

pub use chi::{chi_eval, ChiTable, OrbitGroup, TauTable, K3_TERMS, K4_F_GROUPS};
mod group;

pub use group::{
    group_integral_mc, hiz_unitary, symmetrized_hiz_sympl, symmetrized_zero_limit, sympl_hiz_k2, sympl_normalization, MIN_GROUP_SAMPLES,
    SYMPL_K2_CONSTANT, SYMPL_K3_CONSTANT, SYMPL_K4_CONSTANT,
};
mod pde;

pub use pde::{generic_pde_point, pde_residual, pde_residual_with, PdeCheckSpec, PDE_STEP};
