//! Channel-loss, memory-dephasing and optical-switch models.
//!
//! Everything here exists in two forms where it makes sense: a closed-form
//! scalar (used by the rate analytics) and a density-matrix channel (used by
//! the engine-level protocol runs). The two are cross-checked in tests.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, PureState, QubitLabel, State};

/// Channel and memory constants.
///
/// Units: lengths in km, `c` in km/s, `t2` in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    /// Alice-Bob channel length (km).
    pub l: f64,
    /// Fiber attenuation length (km).
    pub l_att: f64,
    /// Signal speed in the fiber (km/s).
    pub c: f64,
    /// Memory coherence time (s).
    pub t2: f64,
    /// Optical-switch transmission, in (0, 1].
    pub eta_os: f64,
    /// Entanglement-swapping success probability, in (0, 1].
    pub p_es: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            l: 0.0,
            l_att: 25.0,
            c: 2.0e5,
            t2: 1.0e-3,
            eta_os: 0.99,
            p_es: 0.9,
        }
    }
}

impl PhysicalParams {
    /// Same constants at a different channel length.
    pub fn with_l(&self, l: f64) -> Self {
        Self { l, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if !self.l.is_finite() || self.l < 0.0 {
            return bad("L must be finite and >= 0");
        }
        if !self.l_att.is_finite() || self.l_att <= 0.0 {
            return bad("L_att must be finite and > 0");
        }
        if !self.c.is_finite() || self.c <= 0.0 {
            return bad("c must be finite and > 0");
        }
        if !self.t2.is_finite() || self.t2 <= 0.0 {
            return bad("T2 must be finite and > 0");
        }
        if !self.eta_os.is_finite() || self.eta_os <= 0.0 || self.eta_os > 1.0 {
            return bad("eta_OS must be in (0, 1]");
        }
        if !self.p_es.is_finite() || self.p_es <= 0.0 || self.p_es > 1.0 {
            return bad("P_ES must be in (0, 1]");
        }
        Ok(())
    }
}

/// Photon survival probability over the full channel, `e^{-L/L_att}`.
pub fn transmission_prob(p: &PhysicalParams) -> f64 {
    (-p.l / p.l_att).exp()
}

/// Single-qubit dephasing channel over a window `t`:
/// `ρ → λρ + (1-λ) ZρZ` with `λ = (1 + e^{-t/T2})/2`.
///
/// Applied to one qubit of a perfect pair this produces the rank-2 dephased
/// pair with fidelity `λ`.
pub fn dephase(rho: &mut DensityMatrix, qubit: QubitLabel, t: f64, p: &PhysicalParams) -> Result<()> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "dephasing duration must be >= 0, got {t}"
        )));
    }
    let lambda = 0.5 * (1.0 + (-t / p.t2).exp());
    let mut flipped = rho.clone();
    flipped.apply(&crate::quantum::Gate::Z(qubit))?;
    rho.scale(lambda);
    rho.add_scaled(&flipped, 1.0 - lambda);
    Ok(())
}

/// Pair fidelity of a multiplexed pair after the `3L/c` travel-plus-herald
/// window: `F = (1 + e^{-3L/(c T2)})/2`.
pub fn pair_fidelity_qmux(p: &PhysicalParams) -> f64 {
    0.5 * (1.0 + (-3.0 * p.l / (p.c * p.t2)).exp())
}

/// Fidelity of the earlier-created pair in the conventional two-pair scheme,
/// which idles for the expected creation time of the second pair:
/// `F' = (1 + e^{-L/(c T2) - 2L/(c P0 T2)})/2`.
pub fn pair_fidelity_trad_second(p: &PhysicalParams) -> f64 {
    let p0 = transmission_prob(p);
    0.5 * (1.0 + (-p.l / (p.c * p.t2) - 2.0 * p.l / (p.c * p0 * p.t2)).exp())
}

/// Labels of the photonic qubits in a layout.
fn photon_labels(state: &PureState) -> Vec<QubitLabel> {
    state
        .layout()
        .labels()
        .iter()
        .copied()
        .filter(|l| l.is_photonic())
        .collect()
}

/// Transmission of the photon over the lossy channel, applied to the
/// pre-transmission state (all of Alice's interactions done, photon about to
/// leave). Returns the mixture
///
/// `ρ_tot = P0 |ψ⟩⟨ψ| + (1-P0) · (I_A ⊗ ρ_B ⊗ |0⟩⟨0|_photon)`
///
/// where in the loss branch Alice's already-interacted memories (odd indices)
/// decohere to the maximally mixed state, Bob's untouched memories (even
/// indices) keep their reduced state, and the photonic qubits are parked in
/// `|0⟩` as a stand-in for the vacuum (no coherence with the success branch
/// exists, so the tag is classical).
pub fn apply_loss_mixture(state: &PureState, p: &PhysicalParams) -> Result<DensityMatrix> {
    p.validate()?;
    let photons = photon_labels(state);
    if photons.is_empty() {
        return Err(Error::InvalidParameter(
            "loss mixture needs at least one photonic qubit in the layout".into(),
        ));
    }
    let p0 = transmission_prob(p);

    let layout = state.layout().clone();
    let n = layout.n_qubits();
    let labels = layout.labels().to_vec();
    let alice: Vec<QubitLabel> = labels
        .iter()
        .copied()
        .filter(|l| matches!(l, QubitLabel::Memory(i) if i % 2 == 1))
        .collect();
    let bob: Vec<QubitLabel> = labels
        .iter()
        .copied()
        .filter(|l| matches!(l, QubitLabel::Memory(i) if i % 2 == 0))
        .collect();
    if bob.is_empty() {
        return Err(Error::InvalidParameter(
            "loss mixture needs at least one Bob-side memory".into(),
        ));
    }

    let rho_bob = state.to_density().partial_trace(&bob)?;
    let bob_positions: Vec<usize> = bob.iter().map(|&q| layout.position(q).unwrap()).collect();

    let dim = layout.dim();
    let alice_weight = 1.0 / (1 << alice.len()) as f64;
    let mut loss = vec![Complex64::new(0.0, 0.0); dim * dim];
    let sub_index = |full: usize| -> usize {
        bob_positions
            .iter()
            .fold(0usize, |acc, &pos| (acc << 1) | ((full >> (n - 1 - pos)) & 1))
    };
    let photon_or_alice_mask: usize = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.is_photonic() || alice.contains(l))
        .map(|(pos, _)| 1usize << (n - 1 - pos))
        .sum();
    let photon_mask: usize = photons
        .iter()
        .map(|&q| layout.mask(q).unwrap())
        .sum();
    let bdim = 1usize << bob.len();
    for i in 0..dim {
        if i & photon_mask != 0 {
            continue; // photon parked in |0⟩
        }
        for j in 0..dim {
            if j & photon_mask != 0 {
                continue;
            }
            // Alice factors are diagonal (I/2 each).
            if (i & photon_or_alice_mask) != (j & photon_or_alice_mask) {
                continue;
            }
            let (bi, bj) = (sub_index(i), sub_index(j));
            loss[i * dim + j] = rho_bob.matrix()[bi * bdim + bj] * alice_weight;
        }
    }

    let mut out = state.to_density();
    out.scale(p0);
    let loss_dm = DensityMatrix::from_parts(layout, loss);
    out.add_scaled(&loss_dm, 1.0 - p0);
    Ok(out)
}

/// Number of optical switches needed to weave `n_pairs` pairs onto one
/// photon: `(3/2)·N - 3`. Kept fractional for odd N (it only ever enters as
/// an attenuation exponent).
pub fn switch_count(n_pairs: u32) -> f64 {
    1.5 * n_pairs as f64 - 3.0
}

/// Switch-loss adjustment `P0' = η_OS^{(3/2)N-3} · P0`, with the exponent
/// overridable where a different switch inventory is assumed.
pub fn switch_adjusted_p0(p0: f64, n_pairs: u32, eta_os: f64) -> Result<f64> {
    switch_adjusted_p0_with_count(p0, switch_count(n_pairs), eta_os)
}

pub fn switch_adjusted_p0_with_count(p0: f64, count: f64, eta_os: f64) -> Result<f64> {
    if count < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "switch count must be >= 0, got {count}"
        )));
    }
    Ok(eta_os.powf(count) * p0)
}
