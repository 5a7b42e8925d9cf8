//! Exact quantum engine for small systems of labeled qubits.
//!
//! Qubits are addressed by [`QubitLabel`], never by raw index, so protocol
//! code reads like the physical setup: memory spins `QM1..`, the photon's
//! polarization `Pol` and its time bins `TB1..`. Basis conventions are fixed
//! once here:
//!
//! - memory: `|0⟩ = |g⟩`, `|1⟩ = |e⟩`
//! - polarization: `|0⟩ = |D⟩` (diagonal), `|1⟩ = |A⟩` (antidiagonal)
//! - time bin: `|0⟩ = |S⟩` (short), `|1⟩ = |L⟩` (long)
//!
//! The first qubit of a layout is the most significant bit of the basis
//! index, so a basis string reads off directly as a binary index.

mod gates;
mod layout;
mod state;

pub use gates::{nv_photon_interact, photonic_cnot, pol_to_timebin, swap_dofs, Gate, State};
pub use layout::{QubitLabel, SystemLayout, DEFAULT_QUBIT_CAP};
pub use state::{Basis, DensityMatrix, MeasurementRecord, PureState};
