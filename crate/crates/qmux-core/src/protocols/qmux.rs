//! Multiplexed entangling run: one photon carrying polarization plus
//! `n_pairs - 1` time bins entangles `n_pairs` remote memory pairs in a
//! single transmission.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::{self, PhysicalParams};
use crate::protocols::{EntangleNoise, EntangleOutcome, PauliFrame, TraceStep};
use crate::quantum::{
    nv_photon_interact, pol_to_timebin, swap_dofs, Basis, DensityMatrix, Gate, PureState,
    QubitLabel, State, SystemLayout,
};

enum OutcomeSource<'a, R: Rng + ?Sized> {
    Sample(&'a mut R),
    /// Forced photon outcomes in measurement order (polarization first,
    /// then the time bins); the herald is forced to succeed.
    Forced(&'a [u8]),
}

/// Run the multiplexed entangling circuit with sampled photon outcomes.
///
/// Per Alice pair the photon interacts and is converted to a fresh time bin
/// (the last interaction stays on polarization); after transmission Bob's
/// side interleaves interactions with polarization/time-bin swaps; all
/// photonic qubits are measured and the implied bit-flip frame is applied.
/// On herald the memories end in `φ+` on every pair (noiseless).
///
/// `elapsed` is the heralded round time `2L/c`; `photons_consumed` is the
/// expected count `1/P0`.
pub fn run_qmux_entangle<R: Rng + ?Sized>(
    n_pairs: u32,
    p: &PhysicalParams,
    noise: EntangleNoise,
    rng: &mut R,
) -> Result<EntangleOutcome> {
    run(n_pairs, p, noise, OutcomeSource::Sample(rng))
}

/// Same circuit with forced photon outcomes (herald forced to succeed).
/// `photon_outcomes` holds 0/1 per photonic qubit, polarization first.
pub fn run_qmux_entangle_forced(
    n_pairs: u32,
    p: &PhysicalParams,
    noise: EntangleNoise,
    photon_outcomes: &[u8],
) -> Result<EntangleOutcome> {
    run::<rand::rngs::ThreadRng>(n_pairs, p, noise, OutcomeSource::Forced(photon_outcomes))
}

fn run<R: Rng + ?Sized>(
    n_pairs: u32,
    p: &PhysicalParams,
    noise: EntangleNoise,
    mut source: OutcomeSource<'_, R>,
) -> Result<EntangleOutcome> {
    p.validate()?;
    if n_pairs < 2 {
        return Err(Error::InvalidParameter(
            "the multiplexed scheme needs at least 2 pairs".into(),
        ));
    }
    if let OutcomeSource::Forced(outcomes) = &source {
        if outcomes.len() != n_pairs as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {} forced photon outcomes, got {}",
                n_pairs,
                outcomes.len()
            )));
        }
    }

    let n = n_pairs as usize;
    let memories: Vec<QubitLabel> = (1..=2 * n as u8).map(QubitLabel::Memory).collect();
    let pol = QubitLabel::Polarization;
    let timebins: Vec<QubitLabel> = (1..n as u8).map(QubitLabel::TimeBin).collect();
    let mut labels = memories.clone();
    labels.push(pol);
    labels.extend_from_slice(&timebins);
    let layout = SystemLayout::new(labels)?;

    let mut steps = Vec::new();
    let bits = "0".repeat(layout.n_qubits());
    let mut psi = PureState::basis(layout, &bits)?;
    for &m in &memories {
        psi.apply(&Gate::H(m))?;
    }
    steps.push(TraceStep::gate(
        "init",
        format!("|+⟩ on QM1..QM{}, photon |D⟩", 2 * n),
    ));

    // Alice: interact pair by pair, parking each parity on a fresh time bin
    // except the last, which rides on polarization.
    for a in 1..=n {
        let mem = QubitLabel::Memory((2 * a - 1) as u8);
        nv_photon_interact(&mut psi, mem, pol)?;
        steps.push(TraceStep::gate("nv_interact", format!("{mem}-Pol")));
        if a < n {
            let tb = QubitLabel::TimeBin(a as u8);
            pol_to_timebin(&mut psi, pol, tb)?;
            steps.push(TraceStep::gate("pol_to_timebin", format!("Pol-{tb}")));
        }
    }

    // Transmission over the lossy channel.
    let p0 = noise::transmission_prob(p);
    let herald_probability = match noise {
        EntangleNoise::None => p0,
        _ => noise::switch_adjusted_p0(p0, n_pairs, p.eta_os)?,
    };
    let elapsed = 2.0 * p.l / p.c;
    let photons_consumed = 1.0 / herald_probability;

    let heralded = match (&mut source, noise) {
        (_, EntangleNoise::None) => true,
        (OutcomeSource::Sample(rng), _) => rng.gen::<f64>() < herald_probability,
        (OutcomeSource::Forced(_), _) => true,
    };
    steps.push(TraceStep {
        step: "transmit".to_string(),
        qubits: "photon".to_string(),
        outcome: Some(if heralded { "herald" } else { "lost" }.to_string()),
        probability: Some(herald_probability),
    });

    if !heralded {
        let state = qmux_loss_branch_memories(n_pairs)?;
        let per_pair_fidelity = pair_fidelities(&state, n)?;
        return Ok(EntangleOutcome {
            success: false,
            herald_probability,
            state,
            per_pair_fidelity,
            elapsed,
            photons_consumed,
            frame: PauliFrame::default(),
            photon_outcomes: Vec::new(),
            steps,
        });
    }

    // Bob: first interaction on polarization, then swap in each time bin in
    // reverse order, interacting after every swap.
    nv_photon_interact(&mut psi, QubitLabel::Memory(2 * n as u8), pol)?;
    steps.push(TraceStep::gate(
        "nv_interact",
        format!("QM{}-Pol", 2 * n),
    ));
    for a in (1..n).rev() {
        let tb = QubitLabel::TimeBin(a as u8);
        swap_dofs(&mut psi, pol, tb)?;
        steps.push(TraceStep::gate("swap_dofs", format!("Pol-{tb}")));
        let mem = QubitLabel::Memory((2 * a) as u8);
        nv_photon_interact(&mut psi, mem, pol)?;
        steps.push(TraceStep::gate("nv_interact", format!("{mem}-Pol")));
    }

    // Measure the photon. Polarization carries pair 1's parity, time bin a
    // carries pair (a+1)'s.
    let mut frame = PauliFrame::default();
    let mut photon_outcomes = Vec::new();
    let mut photon_order = vec![pol];
    photon_order.extend_from_slice(&timebins);
    for (idx, &q) in photon_order.iter().enumerate() {
        let rec = match &mut source {
            OutcomeSource::Sample(rng) => psi.measure(q, Basis::Computational, *rng)?,
            OutcomeSource::Forced(outcomes) => {
                psi.measure_forced(q, Basis::Computational, outcomes[idx])?
            }
        };
        steps.push(TraceStep::measured(&rec));
        if rec.outcome == 1 {
            let bob = QubitLabel::Memory(2 * (idx as u8 + 1));
            frame.toggle_x(bob);
        }
        photon_outcomes.push(rec);
        psi.remove_product_qubit(q)?;
    }

    frame.apply(&mut psi)?;
    if !frame.is_identity() {
        steps.push(TraceStep::gate(
            "pauli_frame",
            frame
                .x_flips()
                .iter()
                .map(|q| format!("X {q}"))
                .collect::<Vec<_>>()
                .join(", "),
        ));
    }

    let mut state = psi.to_density();
    if noise == EntangleNoise::LossAndDephasing {
        // Travel plus herald window on one qubit of each pair.
        let window = 3.0 * p.l / p.c;
        for a in 1..=n {
            let mem = QubitLabel::Memory((2 * a - 1) as u8);
            noise::dephase(&mut state, mem, window, p)?;
            steps.push(TraceStep::gate("dephase", format!("{mem}, t=3L/c")));
        }
    }

    let per_pair_fidelity = pair_fidelities(&state, n)?;
    Ok(EntangleOutcome {
        success: true,
        herald_probability,
        state,
        per_pair_fidelity,
        elapsed,
        photons_consumed,
        frame,
        photon_outcomes,
        steps,
    })
}

/// Memory-side state left behind when the photon is lost: Alice's
/// already-interacted memories fully mixed, Bob's untouched memories still in
/// `|+⟩`.
pub fn qmux_loss_branch_memories(n_pairs: u32) -> Result<DensityMatrix> {
    if n_pairs < 1 {
        return Err(Error::InvalidParameter("need at least one pair".into()));
    }
    let n = n_pairs as usize;
    let memories: Vec<QubitLabel> = (1..=2 * n as u8).map(QubitLabel::Memory).collect();
    let layout = SystemLayout::new(memories)?;
    let dim = layout.dim();
    let nq = layout.n_qubits();
    // odd (Alice) positions are diagonal I/2 factors, even (Bob) are |+⟩⟨+|
    let odd_mask: usize = (0..nq)
        .filter(|pos| pos % 2 == 0) // positions 0,2,.. hold QM1, QM3, ..
        .map(|pos| 1usize << (nq - 1 - pos))
        .sum();
    let weight = 1.0 / (dim as f64); // (1/2)^N from I/2 diagonals, (1/2)^N from |+⟩⟨+|
    let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if (i & odd_mask) == (j & odd_mask) {
                mat[i * dim + j] = Complex64::new(weight, 0.0);
            }
        }
    }
    Ok(DensityMatrix::from_parts(layout, mat))
}

fn pair_fidelities(state: &DensityMatrix, n_pairs: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n_pairs);
    for a in 1..=n_pairs {
        let (qa, qb) = (
            QubitLabel::Memory((2 * a - 1) as u8),
            QubitLabel::Memory((2 * a) as u8),
        );
        let pair = state.partial_trace(&[qa, qb])?;
        let target = PureState::bell_phi_plus(qa, qb)?;
        out.push(pair.fidelity(&target)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::pair_fidelity_qmux;
    use crate::protocols::{bell_state, BellKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qm(i: u8) -> QubitLabel {
        QubitLabel::Memory(i)
    }

    /// φ+ or ψ+ products over the 2N memories, built independently.
    fn pair_product(kinds: &[BellKind]) -> PureState {
        let mut state = bell_state(kinds[0], qm(1), qm(2)).unwrap();
        for (i, &k) in kinds.iter().enumerate().skip(1) {
            let pair = bell_state(k, qm(2 * i as u8 + 1), qm(2 * i as u8 + 2)).unwrap();
            state = state.kron(&pair).unwrap();
        }
        state
    }

    #[test]
    fn noiseless_two_pairs_all_outcomes() {
        let p = PhysicalParams::default().with_l(50.0);
        let target = pair_product(&[BellKind::PhiPlus, BellKind::PhiPlus]);
        for outcomes in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let out =
                run_qmux_entangle_forced(2, &p, EntangleNoise::None, &outcomes).unwrap();
            assert!(out.success);
            // each photon outcome is equally likely
            for rec in &out.photon_outcomes {
                assert!((rec.probability - 0.5).abs() < 1e-12);
            }
            // post-correction state is φ+ ⊗ φ+
            assert!((out.state.fidelity(&target).unwrap() - 1.0).abs() < 1e-10);
            for f in &out.per_pair_fidelity {
                assert!((f - 1.0).abs() < 1e-10);
            }
            out.state.validate().unwrap();
        }
    }

    #[test]
    fn pre_correction_branches_match_photon_outcomes() {
        // A on polarization flags pair 1, L on the time bin flags pair 2.
        let p = PhysicalParams::default().with_l(30.0);
        let cases = [
            ([0u8, 0u8], [BellKind::PhiPlus, BellKind::PhiPlus]),
            ([1, 0], [BellKind::PsiPlus, BellKind::PhiPlus]),
            ([0, 1], [BellKind::PhiPlus, BellKind::PsiPlus]),
            ([1, 1], [BellKind::PsiPlus, BellKind::PsiPlus]),
        ];
        for (outcomes, kinds) in cases {
            let out =
                run_qmux_entangle_forced(2, &p, EntangleNoise::None, &outcomes).unwrap();
            // undo the frame to recover the pre-correction state
            let mut pre = out.state.clone();
            out.frame.apply(&mut pre).unwrap();
            let expect = pair_product(&kinds);
            assert!((pre.fidelity(&expect).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn three_and_four_pair_runs_stay_exact() {
        let p = PhysicalParams::default().with_l(10.0);
        for n in [3u32, 4] {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let out = run_qmux_entangle(n, &p, EntangleNoise::None, &mut rng).unwrap();
            assert_eq!(out.per_pair_fidelity.len(), n as usize);
            for f in &out.per_pair_fidelity {
                assert!((f - 1.0).abs() < 1e-10);
            }
        }
        assert!(run_qmux_entangle_forced(1, &PhysicalParams::default(), EntangleNoise::None, &[0]).is_err());
        // 5 pairs would need 15 qubits, over the cap
        assert!(matches!(
            run_qmux_entangle_forced(5, &PhysicalParams::default(), EntangleNoise::None, &[0; 5]),
            Err(Error::QubitCapExceeded { .. })
        ));
    }

    #[test]
    fn loss_mode_heralds_and_loss_branch() {
        let p = PhysicalParams::default().with_l(25.0);
        // herald probability reported even when the sampled round heralds
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut saw_success = false;
        let mut saw_loss = false;
        for _ in 0..64 {
            let out = run_qmux_entangle(2, &p, EntangleNoise::Loss, &mut rng).unwrap();
            assert!((out.herald_probability - (-1.0f64).exp()).abs() < 1e-15);
            assert!((out.photons_consumed - std::f64::consts::E).abs() < 1e-12);
            if out.success {
                saw_success = true;
                for f in &out.per_pair_fidelity {
                    assert!((f - 1.0).abs() < 1e-10);
                }
            } else {
                saw_loss = true;
                // I/2 ⊗ |+⟩⟨+| per pair has φ+ fidelity 1/4
                for f in &out.per_pair_fidelity {
                    assert!((f - 0.25).abs() < 1e-12);
                }
                out.state.validate().unwrap();
            }
        }
        assert!(saw_success && saw_loss);
    }

    #[test]
    fn dephasing_mode_reproduces_pair_fidelity_product() {
        let p = PhysicalParams::default().with_l(50.0);
        let out = run_qmux_entangle_forced(2, &p, EntangleNoise::LossAndDephasing, &[0, 0])
            .unwrap();
        let f = pair_fidelity_qmux(&p);
        for pf in &out.per_pair_fidelity {
            assert!((pf - f).abs() < 1e-12);
        }
        out.state.validate().unwrap();
        assert!((out.elapsed - 2.0 * 50.0 / 2.0e5).abs() < 1e-18);

        // the full state is the product of the two dephased pairs
        let mut expect = bell_state(BellKind::PhiPlus, qm(1), qm(2))
            .unwrap()
            .kron(&bell_state(BellKind::PhiPlus, qm(3), qm(4)).unwrap())
            .unwrap()
            .to_density();
        for mem in [qm(1), qm(3)] {
            crate::noise::dephase(&mut expect, mem, 3.0 * p.l / p.c, &p).unwrap();
        }
        for (a, b) in out.state.matrix().iter().zip(expect.matrix()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn trace_lists_steps_in_order_with_valid_probabilities() {
        let p = PhysicalParams::default().with_l(25.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let out = run_qmux_entangle(2, &p, EntangleNoise::Loss, &mut rng).unwrap();
        assert!(out.steps.len() >= 5);
        assert_eq!(out.steps[0].step, "init");
        for s in &out.steps {
            if let Some(pr) = s.probability {
                assert!((0.0..=1.0).contains(&pr));
            }
        }
    }
}
