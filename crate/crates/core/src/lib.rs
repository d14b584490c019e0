//! Density-matrix simulation of a concatenated passive + active quantum
//! error-correcting code.
//!
//! The inner layer is a two-qubit decoherence-free subspace (DFS) encoding
//! `|0_L> = |01>`, `|1_L> = |10>` on physical qubits 3 and 4; the outer layer
//! is the three-qubit phase code protecting data qubit 2 with carriers
//! {1, 2, DFS pair}. Noise is engineered z-dephasing, either incoherent
//! (uniform random gradient phase, sinc attenuation) or Markovian
//! (Lindblad, exponential attenuation).
//!
//! Modules, bottom-up:
//! - [`qstate`]: dense operators, density matrices, tensor/embed/partial trace.
//! - [`channels`]: dephasing engines, error-model construction, noise strength.
//! - [`codes`]: gate library, phase code, DFS encoding, scenario circuits.
//! - [`metrics`]: correlations, entanglement fidelity, polarization,
//!   closed-form reference curves, error-rate fitting.
//! - [`experiments`]: scenario configuration and sweeps, CSV and SVG output.

pub mod channels;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod qstate;

pub use error::{Error, Result};
