//! Two-pair purification: one round consumes a measured pair to raise the
//! fidelity of the kept pair, post-selecting on matching target outcomes.
//!
//! The closed-form pipelines (`*_fidelity`) evaluate the published
//! recursions; the `*_engine` twins run the same round gate-by-gate and are
//! held to 1e-12 agreement in the tests.

use crate::error::{Error, Result};
use crate::noise::{self, PhysicalParams};
use crate::protocols::{bell_state, BellDiagonal, BellKind, PurifyOutcome};
use crate::quantum::{Basis, DensityMatrix, Gate, QubitLabel, State};

/// How the local pre-rotation of a purification round is realized. Both
/// choices turn phase errors into detectable bit-type errors and agree on
/// rank-2 dephased inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeutschVariant {
    /// Hadamards on all four qubits (the rotation the multiplexed pipeline
    /// gets for free during state creation).
    #[default]
    Hadamard,
    /// Textbook ±π/2 rotations about X: +π/2 on Alice's qubits, -π/2 on
    /// Bob's.
    XRotations,
}

/// One purification round in the Hadamard realization. `pair_a` is measured
/// and discarded, `pair_b` is kept; Alice holds the first qubit of each
/// pair, Bob the second. Inputs and output are in the computational frame,
/// so rounds compose.
pub fn deutsch_round(pair_a: &DensityMatrix, pair_b: &DensityMatrix) -> Result<PurifyOutcome> {
    deutsch_round_variant(pair_a, pair_b, DeutschVariant::Hadamard)
}

pub fn deutsch_round_variant(
    pair_a: &DensityMatrix,
    pair_b: &DensityMatrix,
    variant: DeutschVariant,
) -> Result<PurifyOutcome> {
    for (name, pair) in [("pair_a", pair_a), ("pair_b", pair_b)] {
        if pair.layout().n_qubits() != 2 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be a 2-qubit state, has {} qubits",
                pair.layout().n_qubits()
            )));
        }
    }
    let [a1, a2] = [pair_a.layout().labels()[0], pair_a.layout().labels()[1]];
    let [b1, b2] = [pair_b.layout().labels()[0], pair_b.layout().labels()[1]];

    let mut joint = pair_a.kron(pair_b)?;
    match variant {
        DeutschVariant::Hadamard => {
            for q in [a1, a2, b1, b2] {
                joint.apply(&Gate::H(q))?;
            }
        }
        DeutschVariant::XRotations => {
            let half_pi = std::f64::consts::FRAC_PI_2;
            for (q, angle) in [(a1, half_pi), (b1, half_pi), (a2, -half_pi), (b2, -half_pi)] {
                joint.apply(&Gate::XRot { qubit: q, angle })?;
            }
        }
    }
    joint.apply(&Gate::Cnot {
        control: b1,
        target: a1,
    })?;
    joint.apply(&Gate::Cnot {
        control: b2,
        target: a2,
    })?;

    // Keep when Alice's and Bob's target outcomes coincide.
    let mut p_success = 0.0;
    let mut kept: Option<DensityMatrix> = None;
    for outcome in [0u8, 1] {
        let Some((p1, mut branch)) = project(&joint, a1, outcome)? else {
            continue;
        };
        let p2 = branch.outcome_probability(a2, Basis::Computational, outcome)?;
        if p2 < 1e-14 {
            continue;
        }
        branch.measure_forced(a2, Basis::Computational, outcome)?;
        let weight = p1 * p2;
        let reduced = branch.partial_trace(&[b1, b2])?;
        p_success += weight;
        match &mut kept {
            None => {
                let mut first = reduced;
                first.scale(weight);
                kept = Some(first);
            }
            Some(acc) => acc.add_scaled(&reduced, weight),
        }
    }
    let mut out_state = kept.ok_or_else(|| {
        Error::InvariantViolation("purification round has no accepting branch".into())
    })?;
    out_state.scale(1.0 / p_success);

    // Rotate the kept pair back to the computational frame.
    match variant {
        DeutschVariant::Hadamard => {
            out_state.apply(&Gate::H(b1))?;
            out_state.apply(&Gate::H(b2))?;
        }
        DeutschVariant::XRotations => {
            let half_pi = std::f64::consts::FRAC_PI_2;
            out_state.apply(&Gate::XRot {
                qubit: b1,
                angle: -half_pi,
            })?;
            out_state.apply(&Gate::XRot {
                qubit: b2,
                angle: half_pi,
            })?;
        }
    }

    let out_fidelity = out_state.fidelity(&bell_state(BellKind::PhiPlus, b1, b2)?)?;
    Ok(PurifyOutcome {
        p_success,
        out_state,
        out_fidelity,
    })
}

/// Probability of `outcome` on `qubit` and the projected state; `None` when
/// the branch has (numerically) zero weight.
fn project(
    rho: &DensityMatrix,
    qubit: QubitLabel,
    outcome: u8,
) -> Result<Option<(f64, DensityMatrix)>> {
    let p = rho.outcome_probability(qubit, Basis::Computational, outcome)?;
    if p < 1e-14 {
        return Ok(None);
    }
    let mut branch = rho.clone();
    branch.measure_forced(qubit, Basis::Computational, outcome)?;
    Ok(Some((p, branch)))
}

fn dephase_factor(f: f64, exp_factor: f64) -> f64 {
    0.5 * (1.0 + (2.0 * f - 1.0) * exp_factor)
}

fn purified(fa: f64, fb: f64) -> (f64, f64) {
    let p = fa * fb + (1.0 - fa) * (1.0 - fb);
    (fa * fb / p, p)
}

/// Closed-form fidelity pipeline for the multiplexed Deutsch round: both
/// pairs at `F0 = (1+e^{-L/cT2})/2` (creation and purification share one
/// herald), one round, then the classical-communication window `2L/c`.
pub fn qmux_deutsch_fidelity(p: &PhysicalParams) -> Result<PurifyOutcome> {
    p.validate()?;
    let f0 = 0.5 * (1.0 + (-p.l / (p.c * p.t2)).exp());
    let (f_pur, p_d) = purified(f0, f0);
    let f_dph = dephase_factor(f_pur, (-2.0 * p.l / (p.c * p.t2)).exp());
    rank2_outcome(f_dph, p_d)
}

/// Engine twin of [`qmux_deutsch_fidelity`]: dephase two φ+ pairs for `L/c`,
/// run the round, dephase the kept pair for `2L/c`.
pub fn qmux_deutsch_fidelity_engine(p: &PhysicalParams) -> Result<PurifyOutcome> {
    p.validate()?;
    engine_pipeline(p, p.l / p.c, p.l / p.c)
}

/// Closed-form pipeline for the conventionally fed Deutsch round: pair
/// fidelities `F12` and `F'34`, one round, communication window `2L/c`.
pub fn trad_deutsch_fidelity(p: &PhysicalParams) -> Result<PurifyOutcome> {
    p.validate()?;
    let f12 = noise::pair_fidelity_qmux(p);
    let f34 = noise::pair_fidelity_trad_second(p);
    let (f_pur, p_d) = purified(f12, f34);
    let f_dph = dephase_factor(f_pur, (-2.0 * p.l / (p.c * p.t2)).exp());
    rank2_outcome(f_dph, p_d)
}

/// Engine twin of [`trad_deutsch_fidelity`].
pub fn trad_deutsch_fidelity_engine(p: &PhysicalParams) -> Result<PurifyOutcome> {
    p.validate()?;
    let p0 = noise::transmission_prob(p);
    let t_a = 3.0 * p.l / p.c;
    let t_b = p.l / p.c + 2.0 * p.l / (p.c * p0);
    engine_pipeline(p, t_a, t_b)
}

fn engine_pipeline(p: &PhysicalParams, t_pair_a: f64, t_pair_b: f64) -> Result<PurifyOutcome> {
    let (q1, q2, q3, q4) = (
        QubitLabel::Memory(1),
        QubitLabel::Memory(2),
        QubitLabel::Memory(3),
        QubitLabel::Memory(4),
    );
    let mut pair_a = bell_state(BellKind::PhiPlus, q1, q2)?.to_density();
    noise::dephase(&mut pair_a, q1, t_pair_a, p)?;
    let mut pair_b = bell_state(BellKind::PhiPlus, q3, q4)?.to_density();
    noise::dephase(&mut pair_b, q3, t_pair_b, p)?;

    let mut round = deutsch_round(&pair_a, &pair_b)?;
    noise::dephase(&mut round.out_state, q3, 2.0 * p.l / p.c, p)?;
    round.out_fidelity = round
        .out_state
        .fidelity(&bell_state(BellKind::PhiPlus, q3, q4)?)?;
    Ok(round)
}

fn rank2_outcome(fidelity: f64, p_success: f64) -> Result<PurifyOutcome> {
    let out_state = BellDiagonal::rank2_dephased(fidelity)?
        .to_density(QubitLabel::Memory(3), QubitLabel::Memory(4))?;
    Ok(PurifyOutcome {
        p_success,
        out_state,
        out_fidelity: fidelity,
    })
}

/// Dephased two-pair purification round in the rotated frame: both pairs
/// carry independent bit-type errors with probability `1-F`, the round keeps
/// matching outcomes. The kept state has weights `F²` on the target and
/// `(1-F)²` on the X-flipped target, renormalized.
pub fn run_four_qubit_dephased_purification(f: f64) -> Result<PurifyOutcome> {
    if !(0.5..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!(
            "pair fidelity must lie in [1/2, 1], got {f}"
        )));
    }
    let (q1, q2, q3, q4) = (
        QubitLabel::Memory(1),
        QubitLabel::Memory(2),
        QubitLabel::Memory(3),
        QubitLabel::Memory(4),
    );
    let base = bell_state(BellKind::PhiPlus, q1, q2)?
        .kron(&bell_state(BellKind::PhiPlus, q3, q4)?)?;
    let mut x1 = base.clone();
    x1.apply(&Gate::X(q1))?;
    let mut x3 = base.clone();
    x3.apply(&Gate::X(q3))?;
    let mut x13 = x1.clone();
    x13.apply(&Gate::X(q3))?;
    let mut rho = DensityMatrix::mixture(&[
        (f * f, base),
        (f * (1.0 - f), x1),
        (f * (1.0 - f), x3),
        ((1.0 - f) * (1.0 - f), x13),
    ])?;

    rho.apply(&Gate::Cnot {
        control: q3,
        target: q1,
    })?;
    rho.apply(&Gate::Cnot {
        control: q4,
        target: q2,
    })?;

    let mut p_success = 0.0;
    let mut kept: Option<DensityMatrix> = None;
    for outcome in [0u8, 1] {
        let Some((p1, mut branch)) = project(&rho, q1, outcome)? else {
            continue;
        };
        let p2 = branch.outcome_probability(q2, Basis::Computational, outcome)?;
        if p2 < 1e-14 {
            continue;
        }
        branch.measure_forced(q2, Basis::Computational, outcome)?;
        let weight = p1 * p2;
        let reduced = branch.partial_trace(&[q3, q4])?;
        p_success += weight;
        match &mut kept {
            None => {
                let mut first = reduced;
                first.scale(weight);
                kept = Some(first);
            }
            Some(acc) => acc.add_scaled(&reduced, weight),
        }
    }
    let mut out_state =
        kept.ok_or_else(|| Error::InvariantViolation("no accepting branch".into()))?;
    out_state.scale(1.0 / p_success);
    let out_fidelity = out_state.fidelity(&bell_state(BellKind::PhiPlus, q3, q4)?)?;
    Ok(PurifyOutcome {
        p_success,
        out_state,
        out_fidelity,
    })
}

/// Iterated purification bookkeeping: returns `(F_i, P_D(i))` for rounds
/// `i = 1..=k`, where `P_D(i) = F² + (1-F)²` is the acceptance probability of
/// round `i` on input fidelity `F`, and `inter_round_dephase` is the
/// `e^{-t/T2}`-style factor applied between rounds (1.0 when purification is
/// acknowledged together with the entanglement, smaller for pipelines that
/// pay a communication window per round).
pub fn purification_chain(
    k: u32,
    f_initial: f64,
    inter_round_dephase: f64,
) -> Result<Vec<(f64, f64)>> {
    if k < 1 {
        return Err(Error::InvalidParameter("need at least one round".into()));
    }
    if !(0.5..=1.0).contains(&f_initial) {
        return Err(Error::InvalidParameter(format!(
            "initial fidelity must lie in [1/2, 1], got {f_initial}"
        )));
    }
    if !(0.0..=1.0).contains(&inter_round_dephase) {
        return Err(Error::InvalidParameter(format!(
            "inter-round dephasing factor must lie in [0, 1], got {inter_round_dephase}"
        )));
    }
    let mut out = Vec::with_capacity(k as usize);
    let mut f = f_initial;
    for round in 1..=k {
        let (f_next, p_d) = purified(f, f);
        out.push((f_next, p_d));
        f = f_next;
        if round < k {
            f = dephase_factor(f, inter_round_dephase);
        }
    }
    Ok(out)
}
