//! Three-memory multiplexed protocol with built-in purification: the
//! photon's time bin stands in for the fourth qubit of a two-pair
//! purification round, so only QM1 and QM3 (Alice) and QM4 (Bob) are needed.
//!
//! Success rule: Alice's diagonal-basis outcome on QM1 must match the time
//! bin (`+` with `S`, `-` with `L`). Mismatches flag a single dephasing
//! error and the round restarts. The kept pair (QM3, QM4) is returned in the
//! computational frame with the polarization-dependent bit flip already
//! applied.

use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::{self, PhysicalParams};
use crate::protocols::{bell_state, BellKind, PurifyOutcome, ThreeQubitNoise, TraceStep};
use crate::quantum::{
    nv_photon_interact, photonic_cnot, pol_to_timebin, Basis, DensityMatrix, Gate,
    MeasurementRecord, PureState, QubitLabel, State, SystemLayout,
};

/// Result of a three-qubit protocol run.
#[derive(Debug, Clone)]
pub struct ThreeQubitRun {
    /// Success-branch outcome: acceptance probability (given herald), kept
    /// pair state on (QM3, QM4) and its fidelity.
    pub outcome: PurifyOutcome,
    /// Photon herald probability for one round.
    pub herald_probability: f64,
    /// Time spent by the sampled run (attempts × 2L/c).
    pub elapsed: f64,
    /// Rounds the sampled run needed until the success rule fired.
    pub attempts: u32,
    /// Measurement records of the final (accepted) sampled round.
    pub sampled_records: Vec<MeasurementRecord>,
    /// Execution trace including restarted rounds.
    pub steps: Vec<TraceStep>,
}

const MAX_ATTEMPTS: u32 = 10_000;

pub fn run_three_qubit_qmux<R: Rng + ?Sized>(
    p: &PhysicalParams,
    noise: ThreeQubitNoise,
    rng: &mut R,
) -> Result<ThreeQubitRun> {
    p.validate()?;
    let (qm1, qm3, qm4) = (
        QubitLabel::Memory(1),
        QubitLabel::Memory(3),
        QubitLabel::Memory(4),
    );
    let (pol, tb) = (QubitLabel::Polarization, QubitLabel::TimeBin(1));

    let mut steps = Vec::new();
    let rho = prepared_state(p, noise, &mut steps)?;

    // Exact acceptance probability and success-branch mixture over the four
    // accepting outcome combinations (corrections applied per branch).
    let mut p_success = 0.0;
    let mut kept: Option<DensityMatrix> = None;
    for alice in [0u8, 1] {
        for pol_out in [0u8, 1] {
            let tb_out = alice; // success rule: time bin matches Alice
            let Some((weight, branch)) =
                success_branch(&rho, alice, pol_out, tb_out, (qm1, qm3, qm4, pol, tb))?
            else {
                continue;
            };
            p_success += weight;
            match &mut kept {
                None => {
                    let mut first = branch;
                    first.scale(weight);
                    kept = Some(first);
                }
                Some(acc) => acc.add_scaled(&branch, weight),
            }
        }
    }
    let mut out_state = kept.ok_or_else(|| {
        Error::InvariantViolation("three-qubit protocol has no accepting branch".into())
    })?;
    out_state.scale(1.0 / p_success);
    let out_fidelity = out_state.fidelity(&bell_state(BellKind::PhiPlus, qm3, qm4)?)?;

    // Sampled pass for the trace: restart until the success rule fires.
    let mut attempts = 0;
    let sampled_records;
    loop {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::Precondition(format!(
                "no accepting round within {MAX_ATTEMPTS} attempts"
            )));
        }
        let mut trial = rho.clone();
        let rec_alice = trial.measure(qm1, Basis::Diagonal, rng)?;
        let rec_pol = trial.measure(pol, Basis::Computational, rng)?;
        let rec_tb = trial.measure(tb, Basis::Computational, rng)?;
        steps.push(TraceStep::measured(&rec_alice));
        steps.push(TraceStep::measured(&rec_pol));
        steps.push(TraceStep::measured(&rec_tb));
        let accepted = rec_alice.outcome == rec_tb.outcome;
        steps.push(TraceStep {
            step: if accepted { "accept" } else { "restart" }.to_string(),
            qubits: "QM1/TB1".to_string(),
            outcome: Some(format!(
                "{}{}",
                rec_alice.outcome_symbol(),
                rec_tb.outcome_symbol()
            )),
            probability: None,
        });
        if accepted {
            sampled_records = vec![rec_alice, rec_pol, rec_tb];
            break;
        }
    }

    let herald_probability = noise::transmission_prob(p);
    Ok(ThreeQubitRun {
        outcome: PurifyOutcome {
            p_success,
            out_state,
            out_fidelity,
        },
        herald_probability,
        elapsed: attempts as f64 * 2.0 * p.l / p.c,
        attempts,
        sampled_records,
        steps,
    })
}

/// State just before the measurements, with trace steps appended.
fn prepared_state(
    p: &PhysicalParams,
    noise: ThreeQubitNoise,
    steps: &mut Vec<TraceStep>,
) -> Result<DensityMatrix> {
    let (qm1, qm3, qm4) = (
        QubitLabel::Memory(1),
        QubitLabel::Memory(3),
        QubitLabel::Memory(4),
    );
    let (pol, tb) = (QubitLabel::Polarization, QubitLabel::TimeBin(1));
    let layout = SystemLayout::new(vec![qm1, qm3, qm4, pol, tb])?;
    let mut psi = PureState::basis(layout, "00000")?;
    for q in [qm1, qm3, qm4] {
        psi.apply(&Gate::H(q))?;
    }
    steps.push(TraceStep::gate("init", "|+⟩ on QM1,QM3,QM4, photon |D⟩".into()));

    nv_photon_interact(&mut psi, qm1, pol)?;
    steps.push(TraceStep::gate("nv_interact", "QM1-Pol".into()));
    pol_to_timebin(&mut psi, pol, tb)?;
    steps.push(TraceStep::gate("pol_to_timebin", "Pol-TB1".into()));
    nv_photon_interact(&mut psi, qm3, pol)?;
    steps.push(TraceStep::gate("nv_interact", "QM3-Pol".into()));

    // Rotate Alice's memories into the diagonal basis.
    psi.apply(&Gate::H(qm1))?;
    psi.apply(&Gate::H(qm3))?;
    steps.push(TraceStep::gate("hadamard", "QM1, QM3".into()));

    let mut rho = psi.to_density();
    if noise == ThreeQubitNoise::Dephasing {
        let window = 3.0 * p.l / p.c;
        noise::dephase(&mut rho, qm1, window, p)?;
        noise::dephase(&mut rho, qm3, window, p)?;
        steps.push(TraceStep::gate("dephase", "QM1, QM3, t=3L/c".into()));
    }

    // Entangling CNOT drawn control-QM3 → target-QM1 in the diagonal frame,
    // which on the computational engine is CNOT(QM1 → QM3).
    rho.apply(&Gate::Cnot {
        control: qm1,
        target: qm3,
    })?;
    steps.push(TraceStep::gate("cnot (diagonal frame)", "QM3→QM1".into()));
    photonic_cnot(&mut rho, pol, tb)?;
    steps.push(TraceStep::gate("photonic_cnot", "Pol-TB1".into()));

    steps.push(TraceStep {
        step: "transmit".to_string(),
        qubits: "photon".to_string(),
        outcome: Some("herald".to_string()),
        probability: Some(noise::transmission_prob(p)),
    });

    nv_photon_interact(&mut rho, qm4, pol)?;
    steps.push(TraceStep::gate("nv_interact", "QM4-Pol".into()));
    rho.apply(&Gate::H(qm4))?;
    steps.push(TraceStep::gate("hadamard", "QM4".into()));
    Ok(rho)
}

/// Weight and corrected kept-pair state of one accepting outcome
/// combination, or `None` when that combination has zero probability.
fn success_branch(
    rho: &DensityMatrix,
    alice: u8,
    pol_out: u8,
    tb_out: u8,
    (qm1, qm3, qm4, pol, tb): (QubitLabel, QubitLabel, QubitLabel, QubitLabel, QubitLabel),
) -> Result<Option<(f64, DensityMatrix)>> {
    let mut branch = rho.clone();
    let mut weight = 1.0;
    for (qubit, basis, outcome) in [
        (qm1, Basis::Diagonal, alice),
        (pol, Basis::Computational, pol_out),
        (tb, Basis::Computational, tb_out),
    ] {
        let p = branch.outcome_probability(qubit, basis, outcome)?;
        if p < 1e-14 {
            return Ok(None);
        }
        branch.measure_forced(qubit, basis, outcome)?;
        weight *= p;
    }
    let mut kept = branch.partial_trace(&[qm3, qm4])?;
    // back to the computational frame, then the bit-flip correction flagged
    // by an antidiagonal polarization outcome
    kept.apply(&Gate::H(qm3))?;
    kept.apply(&Gate::H(qm4))?;
    if pol_out == 1 {
        kept.apply(&Gate::X(qm4))?;
    }
    Ok(Some((weight, kept)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_run_always_accepts_perfectly() {
        let p = PhysicalParams::default().with_l(40.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let run = run_three_qubit_qmux(&p, ThreeQubitNoise::None, &mut rng).unwrap();
        assert_eq!(run.attempts, 1);
        assert!((run.outcome.p_success - 1.0).abs() < 1e-12);
        assert!((run.outcome.out_fidelity - 1.0).abs() < 1e-10);
        run.outcome.out_state.validate().unwrap();
        assert!((run.herald_probability - (-40.0f64 / 25.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_outcomes_are_impossible_noiselessly() {
        let p = PhysicalParams::default().with_l(40.0);
        let mut steps = Vec::new();
        let rho = prepared_state(&p, ThreeQubitNoise::None, &mut steps).unwrap();
        // (+, L) branch: Alice + but long time bin
        let mut probe = rho.clone();
        probe
            .measure_forced(QubitLabel::Memory(1), Basis::Diagonal, 0)
            .unwrap();
        let p_l = probe
            .outcome_probability(QubitLabel::TimeBin(1), Basis::Computational, 1)
            .unwrap();
        assert!(p_l.abs() < 1e-12);
        // (-, S) branch
        let mut probe = rho.clone();
        probe
            .measure_forced(QubitLabel::Memory(1), Basis::Diagonal, 1)
            .unwrap();
        let p_s = probe
            .outcome_probability(QubitLabel::TimeBin(1), Basis::Computational, 0)
            .unwrap();
        assert!(p_s.abs() < 1e-12);
    }

    #[test]
    fn dephased_run_matches_two_class_form() {
        for l in [10.0, 50.0] {
            let p = PhysicalParams::default().with_l(l);
            let f = noise::pair_fidelity_qmux(&p);
            let n = f * f + (1.0 - f) * (1.0 - f);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let run = run_three_qubit_qmux(&p, ThreeQubitNoise::Dephasing, &mut rng).unwrap();
            assert!((run.outcome.p_success - n).abs() < 1e-12);
            assert!((run.outcome.out_fidelity - f * f / n).abs() < 1e-12);

            // the kept state is exactly the two-class mixture
            let (qm3, qm4) = (QubitLabel::Memory(3), QubitLabel::Memory(4));
            let good = bell_state(BellKind::PhiPlus, qm3, qm4).unwrap();
            let mut flipped = good.clone();
            flipped.apply(&Gate::X(qm3)).unwrap();
            let expect = DensityMatrix::mixture(&[
                (f * f / n, good),
                ((1.0 - f) * (1.0 - f) / n, flipped),
            ])
            .unwrap();
            for (a, b) in run.outcome.out_state.matrix().iter().zip(expect.matrix()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn failure_probability_complements_acceptance() {
        let p = PhysicalParams::default().with_l(50.0);
        let f = noise::pair_fidelity_qmux(&p);
        let mut steps = Vec::new();
        let rho = prepared_state(&p, ThreeQubitNoise::Dephasing, &mut steps).unwrap();
        // total probability of the two mismatch combinations
        let mut p_fail = 0.0;
        for (alice, tb_out) in [(0u8, 1u8), (1, 0)] {
            let mut probe = rho.clone();
            let pa = probe
                .outcome_probability(QubitLabel::Memory(1), Basis::Diagonal, alice)
                .unwrap();
            probe
                .measure_forced(QubitLabel::Memory(1), Basis::Diagonal, alice)
                .unwrap();
            let pt = probe
                .outcome_probability(QubitLabel::TimeBin(1), Basis::Computational, tb_out)
                .unwrap();
            p_fail += pa * pt;
        }
        assert!((p_fail - 2.0 * f * (1.0 - f)).abs() < 1e-12);
    }

    #[test]
    fn sampled_runs_retry_on_dephasing_errors() {
        let p = PhysicalParams::default().with_l(60.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut total_attempts = 0;
        for _ in 0..50 {
            let run = run_three_qubit_qmux(&p, ThreeQubitNoise::Dephasing, &mut rng).unwrap();
            total_attempts += run.attempts;
            assert_eq!(run.sampled_records.len(), 3);
            assert_eq!(
                run.sampled_records[0].outcome,
                run.sampled_records[2].outcome
            );
        }
        // some retries must have happened at this distance
        assert!(total_attempts > 50);
    }
}
