//! Exact and asymptotic thermodynamics of permutation-invariant ensembles of
//! `n` identical `d`-level systems coupled collectively to a thermal bath.
//!
//! The state space of `n` qudits splits into irreducible blocks labelled by
//! integer partitions of `n` with at most `d` parts.  Collective dissipation
//! cannot move population between blocks, so the stationary state of a
//! collectively thermalised ensemble is block-diagonal with a Gibbs factor
//! inside each block.  This crate provides the combinatorial layer (block
//! labels, dimensions, multiplicities), the group-function layer (block
//! partition functions as Schur polynomials in Boltzmann weights), the
//! ensemble thermodynamics built on top of it, Otto-cycle work output,
//! a direct Lindblad simulator that verifies the stationary structure at
//! small size, and the large-`n` asymptotics of block-resolved quantities.
//!
//! # Example
//!
//! ```
//! use permutherm_core::{Ensemble, SpectrumSpec};
//! use permutherm_core::thermo::steady_state_quantities;
//!
//! // Ten three-level systems with a unit-spaced single-particle spectrum,
//! // prepared at inverse temperature 2 and collectively coupled to a bath
//! // at inverse temperature 1.
//! let ens = Ensemble::qudits(10, SpectrumSpec::ladder(3).unwrap()).unwrap();
//! let point = steady_state_quantities(&ens, 1.0, 2.0).unwrap();
//! assert!(point.energy < 0.0);
//! ```

pub mod asymptotics;
pub mod characters;
pub mod error;
pub mod lindblad;
mod numerics;
pub mod otto;
pub mod partitions;
pub mod su_cartan;
pub mod thermo;

pub use asymptotics::{MonteCarloEstimate, ScaledShape};
pub use error::{Error, Result};
pub use partitions::{CycleType, IrrepTable, Partition};
pub use su_cartan::{CartanBasis, Root, SpectrumSpec, SpinOperators};
pub use thermo::{BlockLabel, Ensemble, ThermoPoint};
