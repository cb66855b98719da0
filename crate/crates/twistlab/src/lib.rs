//! A laboratory for twisted Hecke L-functions modulo a prime.
//!
//! The crate computes, for a fixed holomorphic newform `f` and a prime `q`
//! coprime to its level, the full family of central twisted values
//! `L(f ⊗ χ, s)` over the Dirichlet characters mod `q`, exact weight-2
//! modular symbols, and the complete exponential sum tables (Gauss,
//! hyper-Kloosterman, Evans) that control the family's statistics.  On top
//! of these it evaluates twisted first and second moments, mollified
//! moments, resonator runs, explicit-formula rank bounds and the
//! Mazur–Rubin mean/variance identities, comparing everything against the
//! predicted main terms — exactly where an identity is exact, statistically
//! where only an asymptotic is available.
//!
//! Batched evaluation over all characters at once is done with arbitrary
//! length DFTs (Bluestein chirp-z); the modular symbol layer is exact
//! rational arithmetic over big integers.

pub mod arith;
pub mod dft;
pub mod special;

pub mod cache;
pub mod error;

pub mod afe;
pub mod analysis;
pub mod chargroup;
pub mod hecke;
pub mod modsym;
pub mod moments;

pub mod cli;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
