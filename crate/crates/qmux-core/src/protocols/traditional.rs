//! Conventional prepare-and-measure entangling: one photon per pair, pairs
//! complete at different times, earlier pairs idle and dephase while the
//! rest are created.

use rand::Rng;

use crate::analytics::waiting;
use crate::error::{Error, Result};
use crate::noise::{self, PhysicalParams};
use crate::protocols::{EntangleOutcome, PauliFrame, TraceStep};
use crate::quantum::{Gate, PureState, QubitLabel, State, SystemLayout};

/// Expected-value run: pair `k` is created `k`-th from last (pair N first,
/// pair 1 last), so pair 1 dephases over the plain `3L/c` window while pair
/// `k > 1` idles an extra `(k-1)·2L/(c·P0)` for the remaining creations.
/// `elapsed` uses the order-statistics expectation from the analytics layer.
///
/// The fidelities are the plug-in closed forms; a sampled run averages to
/// them only up to the convexity gap of `e^{-t/T2}` in the waiting time.
pub fn run_traditional_entangle_expected(
    n_pairs: u32,
    p: &PhysicalParams,
) -> Result<EntangleOutcome> {
    let p0 = noise::transmission_prob(p);
    let windows: Vec<f64> = (1..=n_pairs).map(|k| dephase_window(k, p, p0)).collect();
    let elapsed = waiting::expected_attempts_n(n_pairs, p0)? * 2.0 * p.l / p.c;
    let photons = n_pairs as f64 / p0;
    build_outcome(n_pairs, p, &windows, elapsed, photons)
}

/// Sampled run: each pair draws its geometric attempt count; pairs that
/// finish early dephase for the extra rounds until the slowest completes.
pub fn run_traditional_entangle<R: Rng + ?Sized>(
    n_pairs: u32,
    p: &PhysicalParams,
    rng: &mut R,
) -> Result<EntangleOutcome> {
    let p0 = noise::transmission_prob(p);
    let attempts: Vec<f64> = (0..n_pairs)
        .map(|_| waiting::sample_geometric(p0, rng))
        .collect();
    let n_max = attempts.iter().copied().fold(0.0f64, f64::max);
    // pair 1 is created last, pair N first
    let mut sorted = attempts.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.reverse();
    let round = 2.0 * p.l / p.c;
    let windows: Vec<f64> = (1..=n_pairs as usize)
        .map(|k| {
            let extra = (n_max - sorted[n_pairs as usize - k]) * round;
            3.0 * p.l / p.c + extra
        })
        .collect();
    let elapsed = n_max * round;
    let photons: f64 = attempts.iter().sum();
    build_outcome(n_pairs, p, &windows, elapsed, photons)
}

/// Expected idle-plus-herald window of pair `k` (pair 1 is created last).
fn dephase_window(k: u32, p: &PhysicalParams, p0: f64) -> f64 {
    if k == 1 {
        3.0 * p.l / p.c
    } else {
        p.l / p.c + (k - 1) as f64 * 2.0 * p.l / (p.c * p0)
    }
}

fn build_outcome(
    n_pairs: u32,
    p: &PhysicalParams,
    windows: &[f64],
    elapsed: f64,
    photons: f64,
) -> Result<EntangleOutcome> {
    p.validate()?;
    if n_pairs < 1 {
        return Err(Error::InvalidParameter("need at least one pair".into()));
    }
    let n = n_pairs as usize;
    let memories: Vec<QubitLabel> = (1..=2 * n as u8).map(QubitLabel::Memory).collect();
    let layout = SystemLayout::new(memories.clone())?;
    let mut psi = PureState::basis(layout, &"0".repeat(2 * n))?;
    let mut steps = Vec::new();
    for a in 1..=n {
        let (qa, qb) = (memories[2 * a - 2], memories[2 * a - 1]);
        psi.apply(&Gate::H(qa))?;
        psi.apply(&Gate::Cnot {
            control: qa,
            target: qb,
        })?;
        steps.push(TraceStep::gate("create_pair", format!("{qa}-{qb}")));
    }
    let mut state = psi.to_density();
    let mut per_pair_fidelity = Vec::with_capacity(n);
    for a in 1..=n {
        let (qa, qb) = (memories[2 * a - 2], memories[2 * a - 1]);
        noise::dephase(&mut state, qa, windows[a - 1], p)?;
        steps.push(TraceStep::gate(
            "dephase",
            format!("{qa}, t={:.3e} s", windows[a - 1]),
        ));
        let pair = state.partial_trace(&[qa, qb])?;
        per_pair_fidelity.push(pair.fidelity(&PureState::bell_phi_plus(qa, qb)?)?);
    }
    Ok(EntangleOutcome {
        success: true,
        herald_probability: noise::transmission_prob(p),
        state,
        per_pair_fidelity,
        elapsed,
        photons_consumed: photons,
        frame: PauliFrame::default(),
        photon_outcomes: Vec::new(),
        steps,
    })
}
