//! Simulation and analytics for entanglement distribution over a lossy fiber
//! channel, where a single photon carrying several degrees of freedom
//! (polarization plus time bins) entangles many remote memory pairs at once.
//!
//! The crate is organized in four layers:
//!
//! - [`quantum`]: an exact pure-state / density-matrix engine for small
//!   labeled qubit systems (memory spins plus photonic DOF qubits).
//! - [`noise`]: channel transmission, memory dephasing and optical-switch
//!   models, as scalar formulas and as density-matrix channels.
//! - [`protocols`]: executable entangling, purification and error-correction
//!   protocols built on the engine, with closed-form counterparts.
//! - [`analytics`]: normalized-rate formulas, protocol rate ratios and
//!   waiting-time order statistics with a Monte Carlo cross-check.
//!
//! States are plain values: nothing is shared or hidden behind interior
//! mutability, every stochastic operation takes the caller's RNG, and all
//! sweep helpers are pure functions of their inputs.

pub mod analytics;
pub mod error;
pub mod format;
pub mod noise;
pub mod protocols;
pub mod quantum;

pub use error::{Error, Result};
pub use noise::PhysicalParams;
pub use quantum::{Basis, DensityMatrix, MeasurementRecord, PureState, QubitLabel, SystemLayout};

/// Tolerances used across the crate.
///
/// Structural checks (norms, traces, Hermiticity) get 1e-10; algebraic
/// identities between two exact computations get 1e-12; eigenvalues of a
/// valid density matrix may dip to -1e-9 from rounding.
pub mod tol {
    /// Norm / trace / Hermiticity tolerance.
    pub const STRUCTURAL: f64 = 1e-10;
    /// Tolerance for identities between two exact computation routes.
    pub const ALGEBRAIC: f64 = 1e-12;
    /// Most negative admissible density-matrix eigenvalue.
    pub const EIGEN_FLOOR: f64 = -1e-9;
}
