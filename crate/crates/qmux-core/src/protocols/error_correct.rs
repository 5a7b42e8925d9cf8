//! Conventional three-pair error-correction round (bit-flip majority vote):
//! both sides copy their control qubit onto two target pairs, measure the
//! targets, and infer from the outcome parities whether the control pair
//! itself was flipped. Deterministic: no post-selection.

use crate::error::{Error, Result};
use crate::protocols::{bell_state, BellKind, PurifyOutcome};
use crate::quantum::{Basis, DensityMatrix, Gate, State};

/// Run one error-correction round on `[control, target1, target2]` pair
/// states (each two qubits, Alice first). The control pair is kept; the
/// correction table is the bit-flip majority vote: a flip is inferred on the
/// control exactly when both target parities disagree.
pub fn run_three_qubit_ec(pairs: &[DensityMatrix]) -> Result<PurifyOutcome> {
    let [control, target1, target2] = pairs else {
        return Err(Error::InvalidParameter(format!(
            "the three-qubit code consumes exactly 3 pairs, got {}",
            pairs.len()
        )));
    };
    for (name, pair) in [
        ("control", control),
        ("target1", target1),
        ("target2", target2),
    ] {
        if pair.layout().n_qubits() != 2 {
            return Err(Error::InvalidParameter(format!(
                "{name} must be a 2-qubit state, has {} qubits",
                pair.layout().n_qubits()
            )));
        }
    }
    let [c1, c2] = [control.layout().labels()[0], control.layout().labels()[1]];
    let [t11, t12] = [target1.layout().labels()[0], target1.layout().labels()[1]];
    let [t21, t22] = [target2.layout().labels()[0], target2.layout().labels()[1]];

    let mut joint = control.kron(target1)?.kron(target2)?;
    for (ctl, tgt) in [(c1, t11), (c1, t21), (c2, t12), (c2, t22)] {
        joint.apply(&Gate::Cnot {
            control: ctl,
            target: tgt,
        })?;
    }

    // Enumerate the 16 target outcomes, apply the majority-vote correction,
    // and average the corrected control pair.
    let mut total = 0.0;
    let mut kept: Option<DensityMatrix> = None;
    let mut stack = vec![(1.0f64, joint, 0usize, [0u8; 4])];
    let order = [t11, t12, t21, t22];
    while let Some((weight, state, depth, outcomes)) = stack.pop() {
        if depth == 4 {
            let parity1 = outcomes[0] ^ outcomes[1];
            let parity2 = outcomes[2] ^ outcomes[3];
            let mut reduced = state.partial_trace(&[c1, c2])?;
            if parity1 == 1 && parity2 == 1 {
                reduced.apply(&Gate::X(c2))?;
            }
            total += weight;
            match &mut kept {
                None => {
                    let mut first = reduced;
                    first.scale(weight);
                    kept = Some(first);
                }
                Some(acc) => acc.add_scaled(&reduced, weight),
            }
            continue;
        }
        let qubit = order[depth];
        for outcome in [0u8, 1] {
            let p = state.outcome_probability(qubit, Basis::Computational, outcome)?;
            if p < 1e-14 {
                continue;
            }
            let mut branch = state.clone();
            branch.measure_forced(qubit, Basis::Computational, outcome)?;
            let mut next_outcomes = outcomes;
            next_outcomes[depth] = outcome;
            stack.push((weight * p, branch, depth + 1, next_outcomes));
        }
    }
    let mut out_state =
        kept.ok_or_else(|| Error::InvariantViolation("no measurement branch".into()))?;
    debug_assert!((total - 1.0).abs() < 1e-10);
    out_state.scale(1.0 / total);
    let out_fidelity = out_state.fidelity(&bell_state(BellKind::PhiPlus, c1, c2)?)?;
    Ok(PurifyOutcome {
        p_success: 1.0,
        out_state,
        out_fidelity,
    })
}
