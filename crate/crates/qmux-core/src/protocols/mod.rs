//! Executable protocols: multiplexed and conventional entangling, Deutsch
//! purification (engine circuit and closed forms), the three-qubit
//! multiplexed protocol with built-in purification, and the three-qubit
//! error-correction round.
//!
//! Each protocol that the analytics layer summarizes by a formula is also
//! runnable gate-by-gate on the exact engine; the two routes are compared in
//! the test suites.

mod deutsch;
mod error_correct;
mod qmux;
mod three_qubit;
mod traditional;

pub use deutsch::{
    deutsch_round, deutsch_round_variant, purification_chain, qmux_deutsch_fidelity,
    qmux_deutsch_fidelity_engine, run_four_qubit_dephased_purification, trad_deutsch_fidelity,
    trad_deutsch_fidelity_engine, DeutschVariant,
};
pub use error_correct::run_three_qubit_ec;
pub use qmux::{qmux_loss_branch_memories, run_qmux_entangle, run_qmux_entangle_forced};
pub use three_qubit::{run_three_qubit_qmux, ThreeQubitRun};
pub use traditional::{run_traditional_entangle, run_traditional_entangle_expected};

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, MeasurementRecord, PureState, QubitLabel, State, SystemLayout};

/// Noise switches for the entangling runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntangleNoise {
    /// Ideal circuit.
    None,
    /// Channel loss only (heralded; failed rounds leave the loss-branch
    /// state on the memories).
    Loss,
    /// Channel loss plus memory dephasing over the travel-and-herald window.
    LossAndDephasing,
}

/// Noise switch for the three-qubit protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeQubitNoise {
    None,
    Dephasing,
}

/// One of the four Bell states on a memory pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Normalized Bell-state ket on the two given qubits.
pub fn bell_state(kind: BellKind, a: QubitLabel, b: QubitLabel) -> Result<PureState> {
    use num_complex::Complex64;
    let layout = SystemLayout::new(vec![a, b])?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let m = -h;
    let z = Complex64::new(0.0, 0.0);
    let amps = match kind {
        BellKind::PhiPlus => vec![h, z, z, h],
        BellKind::PhiMinus => vec![h, z, z, m],
        BellKind::PsiPlus => vec![z, h, h, z],
        BellKind::PsiMinus => vec![z, h, m, z],
    };
    PureState::from_amplitudes(layout, amps)
}

/// Bell-diagonal two-qubit state, stored as the weights of
/// ρ_{ψ+}, ρ_{ψ-}, ρ_{φ+}, ρ_{φ-}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonal {
    pub psi_plus: f64,
    pub psi_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl BellDiagonal {
    /// Weights in the order ψ+, ψ-, φ+, φ-; must be nonnegative and sum to 1.
    pub fn new(psi_plus: f64, psi_minus: f64, phi_plus: f64, phi_minus: f64) -> Result<Self> {
        let out = Self {
            psi_plus,
            psi_minus,
            phi_plus,
            phi_minus,
        };
        out.validate()?;
        Ok(out)
    }

    /// The rank-2 dephased-pair form `F ρ_{φ+} + (1-F) ρ_{φ-}`.
    pub fn rank2_dephased(fidelity: f64) -> Result<Self> {
        Self::new(0.0, 0.0, fidelity, 1.0 - fidelity)
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus];
        if ws.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter(
                "Bell-diagonal weights must be nonnegative".into(),
            ));
        }
        let sum: f64 = ws.iter().sum();
        if (sum - 1.0).abs() > crate::tol::ALGEBRAIC {
            return Err(Error::InvalidParameter(format!(
                "Bell-diagonal weights must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }

    pub fn to_density(&self, a: QubitLabel, b: QubitLabel) -> Result<DensityMatrix> {
        self.validate()?;
        DensityMatrix::mixture(&[
            (self.psi_plus, bell_state(BellKind::PsiPlus, a, b)?),
            (self.psi_minus, bell_state(BellKind::PsiMinus, a, b)?),
            (self.phi_plus, bell_state(BellKind::PhiPlus, a, b)?),
            (self.phi_minus, bell_state(BellKind::PhiMinus, a, b)?),
        ])
    }
}

/// Classical record of X/Z corrections implied by measurement outcomes.
/// Toggling twice cancels, so applying a frame twice is the identity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliFrame {
    x_flips: Vec<QubitLabel>,
    z_flips: Vec<QubitLabel>,
}

impl PauliFrame {
    pub fn toggle_x(&mut self, q: QubitLabel) {
        toggle(&mut self.x_flips, q);
    }

    pub fn toggle_z(&mut self, q: QubitLabel) {
        toggle(&mut self.z_flips, q);
    }

    pub fn x_flips(&self) -> &[QubitLabel] {
        &self.x_flips
    }

    pub fn z_flips(&self) -> &[QubitLabel] {
        &self.z_flips
    }

    pub fn is_identity(&self) -> bool {
        self.x_flips.is_empty() && self.z_flips.is_empty()
    }

    pub fn apply<S: State>(&self, state: &mut S) -> Result<()> {
        use crate::quantum::Gate;
        for &q in &self.x_flips {
            state.apply(&Gate::X(q))?;
        }
        for &q in &self.z_flips {
            state.apply(&Gate::Z(q))?;
        }
        Ok(())
    }
}

fn toggle(set: &mut Vec<QubitLabel>, q: QubitLabel) {
    if let Some(i) = set.iter().position(|&x| x == q) {
        set.remove(i);
    } else {
        set.push(q);
        set.sort();
    }
}

/// One line of a protocol execution trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub step: String,
    pub qubits: String,
    pub outcome: Option<String>,
    pub probability: Option<f64>,
}

impl TraceStep {
    pub fn gate(step: &str, qubits: String) -> Self {
        Self {
            step: step.to_string(),
            qubits,
            outcome: None,
            probability: None,
        }
    }

    pub fn measured(rec: &MeasurementRecord) -> Self {
        Self {
            step: "measure".to_string(),
            qubits: rec.qubit.to_string(),
            outcome: Some(rec.outcome_symbol().to_string()),
            probability: Some(rec.probability),
        }
    }

    pub fn render(&self) -> String {
        let mut line = format!("{:<24} {:<14}", self.step, self.qubits);
        if let Some(o) = &self.outcome {
            line.push_str(&format!(" outcome={o:<4}"));
        }
        if let Some(p) = self.probability {
            line.push_str(&format!(" p={}", crate::format::fmt_sig(p, 12)));
        }
        line
    }
}

/// Result of an entangling run.
#[derive(Debug, Clone)]
pub struct EntangleOutcome {
    /// Whether the photon heralded (always true for noiseless and for runs
    /// that retry until completion).
    pub success: bool,
    /// Per-round herald probability (switch-adjusted where loss is modeled).
    pub herald_probability: f64,
    /// Final state over the memory qubits only.
    pub state: DensityMatrix,
    /// Fidelity of each memory pair to φ+, in pair order.
    pub per_pair_fidelity: Vec<f64>,
    /// Protocol time in seconds.
    pub elapsed: f64,
    /// Photons consumed (expected count for analytic modes, actual for
    /// sampled runs).
    pub photons_consumed: f64,
    /// Corrections implied by the photon outcomes (already applied to
    /// `state`; reapply to recover the pre-correction state).
    pub frame: PauliFrame,
    /// Photon measurement records in measurement order.
    pub photon_outcomes: Vec<MeasurementRecord>,
    /// Step-by-step execution trace.
    pub steps: Vec<TraceStep>,
}

/// Result of one purification-style round.
#[derive(Debug, Clone)]
pub struct PurifyOutcome {
    /// Probability that the round is accepted.
    pub p_success: f64,
    /// Kept pair, conditioned on acceptance.
    pub out_state: DensityMatrix,
    /// Fidelity of the kept pair to φ+.
    pub out_fidelity: f64,
}
