//! Free-field lattice vertex algebras attached to toric Calabi-Yau threefolds
//! and divisors in them: GKM data, screening charges, exact kernels,
//! verification suites, characters and fixed-point localization.

pub mod ratfield;
pub mod gkm;
pub mod divisor;
pub mod fock;
pub mod vertexop;
pub mod screening;
pub mod verify;
pub mod chargen;
pub mod localization;
pub mod cli;
