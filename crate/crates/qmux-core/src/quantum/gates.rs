use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::layout::{QubitLabel, SystemLayout};
use crate::tol;

/// Unitary gates understood by the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(QubitLabel),
    X(QubitLabel),
    Z(QubitLabel),
    Cnot {
        control: QubitLabel,
        target: QubitLabel,
    },
    Swap(QubitLabel, QubitLabel),
    /// Rotation `exp(-i·angle·X/2)` about the X axis.
    XRot { qubit: QubitLabel, angle: f64 },
}

impl Gate {
    pub(crate) fn check_targets(&self) -> Result<()> {
        match *self {
            Gate::Cnot { control, target } if control == target => {
                Err(Error::DuplicateTargets(control))
            }
            Gate::Swap(a, b) if a == b => Err(Error::DuplicateTargets(a)),
            _ => Ok(()),
        }
    }

    /// 2x2 matrix for single-qubit gates, row major.
    pub(crate) fn single_qubit_matrix(&self) -> Option<(QubitLabel, [Complex64; 4])> {
        let re = Complex64::new;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            Gate::H(q) => Some((q, [re(s, 0.0), re(s, 0.0), re(s, 0.0), re(-s, 0.0)])),
            Gate::X(q) => Some((q, [re(0.0, 0.0), re(1.0, 0.0), re(1.0, 0.0), re(0.0, 0.0)])),
            Gate::Z(q) => Some((q, [re(1.0, 0.0), re(0.0, 0.0), re(0.0, 0.0), re(-1.0, 0.0)])),
            Gate::XRot { qubit, angle } => {
                let (c, sn) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                Some((
                    qubit,
                    [re(c, 0.0), re(0.0, -sn), re(0.0, -sn), re(c, 0.0)],
                ))
            }
            _ => None,
        }
    }
}

/// Common surface of [`PureState`](super::PureState) and
/// [`DensityMatrix`](super::DensityMatrix) needed by gate-level protocol code.
pub trait State {
    fn layout(&self) -> &SystemLayout;
    fn apply(&mut self, gate: &Gate) -> Result<()>;
    /// Probability of finding the qubit in `|1⟩` (computational basis).
    fn excitation_probability(&self, qubit: QubitLabel) -> Result<f64>;
}

/// Photon-memory entangling interaction: the photon picks up a π phase when
/// the memory is excited and the photon is vertically polarized, which in the
/// D/A basis is a D↔A flip conditioned on `|e⟩`. Exactly a CNOT with the
/// memory as control and the polarization as target.
pub fn nv_photon_interact<S: State>(state: &mut S, memory: QubitLabel, pol: QubitLabel) -> Result<()> {
    if !memory.is_memory() {
        return Err(Error::InvalidParameter(format!(
            "nv_photon_interact control must be a memory qubit, got {memory}"
        )));
    }
    if pol != QubitLabel::Polarization {
        return Err(Error::InvalidParameter(format!(
            "nv_photon_interact target must be the polarization qubit, got {pol}"
        )));
    }
    state.apply(&Gate::Cnot {
        control: memory,
        target: pol,
    })
}

/// Time-bin encoding converter: moves the polarization superposition onto a
/// fresh time-bin qubit, resetting the polarization to `|D⟩`:
/// `(α|D⟩+β|A⟩)|S⟩ → |D⟩(α|S⟩+β|L⟩)`.
///
/// Requires the time-bin qubit to be in `|S⟩` beforehand.
pub fn pol_to_timebin<S: State>(state: &mut S, pol: QubitLabel, tb: QubitLabel) -> Result<()> {
    check_pol_tb(pol, tb)?;
    let p_occupied = state.excitation_probability(tb)?;
    if p_occupied > tol::STRUCTURAL {
        return Err(Error::Precondition(format!(
            "pol_to_timebin needs {tb} in |S⟩, found P(L) = {p_occupied:.3e}"
        )));
    }
    state.apply(&Gate::Cnot {
        control: pol,
        target: tb,
    })?;
    state.apply(&Gate::Cnot {
        control: tb,
        target: pol,
    })
}

/// Switching setup: exchanges the polarization and time-bin values, i.e.
/// `|A S⟩ ↔ |D L⟩` while `|D S⟩` and `|A L⟩` are fixed.
pub fn swap_dofs<S: State>(state: &mut S, pol: QubitLabel, tb: QubitLabel) -> Result<()> {
    check_pol_tb(pol, tb)?;
    state.apply(&Gate::Swap(pol, tb))
}

/// Photonic CNOT: the antidiagonal polarization component flips the time bin,
/// the diagonal component leaves it alone.
pub fn photonic_cnot<S: State>(state: &mut S, pol: QubitLabel, tb: QubitLabel) -> Result<()> {
    check_pol_tb(pol, tb)?;
    state.apply(&Gate::Cnot {
        control: pol,
        target: tb,
    })
}

fn check_pol_tb(pol: QubitLabel, tb: QubitLabel) -> Result<()> {
    if pol != QubitLabel::Polarization {
        return Err(Error::InvalidParameter(format!(
            "expected the polarization qubit, got {pol}"
        )));
    }
    if !matches!(tb, QubitLabel::TimeBin(_)) {
        return Err(Error::InvalidParameter(format!(
            "expected a time-bin qubit, got {tb}"
        )));
    }
    Ok(())
}
