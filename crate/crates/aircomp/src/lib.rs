//! Joint transceiver and IRS phase-shift design for over-the-air
//! computation (AirComp).
//!
//! An access point with `N` antennas aggregates symbols from `K`
//! single-antenna users over a multiple-access channel, assisted by an
//! intelligent reflecting surface (IRS) with `M` passive phase-shifting
//! elements. The crate jointly designs the receive decoding vector, the
//! per-user transmit scalars, and the IRS phase shifts to minimize the
//! mean-squared error of the aggregated symbol estimate.
//!
//! The main solver alternates between two rank-one constrained matrix
//! problems (decoding vector for fixed phases, phase feasibility for a
//! fixed decoding vector), each handled by difference-of-convex
//! programming with a trace-minus-spectral-norm penalty. A semidefinite
//! relaxation driver with Gaussian randomization and two fixed-phase
//! baselines are included for comparison, along with a Monte Carlo
//! experiment harness that reproduces the reference simulation setups.
//!
//! Module map:
//! - [`linalg`]: dense complex Hermitian primitives (eigh, PSD projection,
//!   spectral subgradient, rank-one factors).
//! - [`channel`]: deployment geometry, path loss, Rayleigh channel draws.
//! - [`model`]: AirComp MSE formulas and the lifted problem builders.
//! - [`sdp`]: a first-order operator-splitting solver for the SDP
//!   subproblems.
//! - [`dc`]: the difference-of-convex iteration for rank-one recovery.
//! - [`algorithms`]: alternating drivers and baselines.
//! - [`experiment`]: config-driven Monte Carlo runner and result emission.

pub mod algorithms;
pub mod channel;
pub mod dc;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod model;
pub mod sdp;

pub use error::{Error, Result};
pub use linalg::{C64, CMatrix, CVector, HermitianMatrix};
