//! Generalized adiabatic impulse approximation (GAIA) for two-band multilevel
//! Landau–Zener models, with the older connection-matrix formulation, the
//! adiabatic impulse approximation, and a numerically exact propagator.

pub mod analysis;
pub mod error;
pub mod exact_oracle;
pub mod gaia_grid;
pub mod gaia_lzsm;
pub mod legacy_wkb;
pub mod linalg;
pub mod models;
mod quadrature;
pub mod special;

pub use error::{GaiaError, Result};
pub use linalg::{CMat, SMatrix};
pub use models::{build_grid, build_lzsm, build_spin_boson, GridModel, Hamiltonian, LzsmModel, TwoBand};
