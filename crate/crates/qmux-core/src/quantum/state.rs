use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::quantum::gates::{Gate, State};
use crate::quantum::layout::{QubitLabel, SystemLayout};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Measurement basis of a single qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Computational,
    Diagonal,
}

/// Outcome of one projective single-qubit measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub qubit: QubitLabel,
    pub basis: Basis,
    /// 0 or 1; in the diagonal basis 0 means `+` and 1 means `-`.
    pub outcome: u8,
    /// Exact Born probability of this outcome at measurement time.
    pub probability: f64,
}

impl MeasurementRecord {
    /// Human-readable outcome symbol (`g/e`, `D/A`, `S/L`, or `+/-`).
    pub fn outcome_symbol(&self) -> char {
        match self.basis {
            Basis::Computational => self.qubit.basis_symbols()[self.outcome as usize],
            Basis::Diagonal => ['+', '-'][self.outcome as usize],
        }
    }
}

/// Pure state over a [`SystemLayout`], stored as a dense amplitude vector.
///
/// Unnormalized inputs are normalized on construction; every operation keeps
/// the norm at 1 within [`tol::STRUCTURAL`].
#[derive(Debug, Clone)]
pub struct PureState {
    layout: SystemLayout,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Computational basis state from per-qubit `0`/`1` assignments.
    pub fn basis(layout: SystemLayout, bits: &str) -> Result<Self> {
        if bits.len() != layout.n_qubits() {
            return Err(Error::InvalidParameter(format!(
                "basis string {bits:?} has {} characters for {} qubits",
                bits.len(),
                layout.n_qubits()
            )));
        }
        let mut index = 0usize;
        for ch in bits.chars() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "basis string may contain only 0/1, got {other:?}"
                    )))
                }
            }
        }
        let mut amps = vec![ZERO; layout.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    /// State from raw amplitudes; normalized on the way in.
    pub fn from_amplitudes(layout: SystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector length {} does not match dimension {}",
                amps.len(),
                layout.dim()
            )));
        }
        let mut state = Self { layout, amps };
        let norm = state.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        for a in &mut state.amps {
            *a /= norm;
        }
        Ok(state)
    }

    /// Maximally entangled pair `(|00⟩+|11⟩)/√2` on `[a, b]`.
    pub fn bell_phi_plus(a: QubitLabel, b: QubitLabel) -> Result<Self> {
        let layout = SystemLayout::new(vec![a, b])?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ok(Self {
            layout,
            amps: vec![
                Complex64::new(s, 0.0),
                ZERO,
                ZERO,
                Complex64::new(s, 0.0),
            ],
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::InvariantViolation(format!(
                "pure-state norm drifted to {norm:.15}"
            )));
        }
        Ok(())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        check_same_layout(&self.layout, &other.layout)?;
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm_sqr())
    }

    /// True when the two states differ only by a global phase.
    pub fn equal_up_to_phase(&self, other: &PureState, tolerance: f64) -> bool {
        if self.layout != other.layout {
            return false;
        }
        let pivot = (0..self.amps.len()).max_by(|&i, &j| {
            self.amps[i]
                .norm_sqr()
                .total_cmp(&self.amps[j].norm_sqr())
        });
        let Some(k) = pivot else { return false };
        if self.amps[k].norm() < tolerance {
            return other.amps.iter().all(|a| a.norm() < tolerance);
        }
        let phase = other.amps[k] / self.amps[k];
        if (phase.norm() - 1.0).abs() > tolerance {
            return false;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a * phase - b).norm() <= tolerance)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let dim = self.layout.dim();
        let mut mat = vec![ZERO; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = self.amps[i] * self.amps[j].conj();
            }
        }
        DensityMatrix {
            layout: self.layout.clone(),
            mat,
        }
    }

    /// Tensor product; layouts must be disjoint.
    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let layout = self.layout.join(&other.layout)?;
        let d2 = other.layout.dim();
        let mut amps = vec![ZERO; layout.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * d2 + j] = a * b;
            }
        }
        Ok(PureState { layout, amps })
    }

    /// Sample a projective measurement with the caller's RNG.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: QubitLabel,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        let p1 = self.outcome_probability(qubit, basis, 1)?;
        let outcome = u8::from(rng.gen::<f64>() < p1);
        self.project(qubit, basis, outcome)
    }

    /// Project onto a chosen outcome; errors when its probability is zero.
    pub fn measure_forced(
        &mut self,
        qubit: QubitLabel,
        basis: Basis,
        outcome: u8,
    ) -> Result<MeasurementRecord> {
        let p = self.outcome_probability(qubit, basis, outcome)?;
        if p < 1e-14 {
            return Err(Error::ImpossibleOutcome {
                outcome,
                probability: p,
            });
        }
        self.project(qubit, basis, outcome)
    }

    pub fn outcome_probability(&self, qubit: QubitLabel, basis: Basis, outcome: u8) -> Result<f64> {
        let mut probe = self.clone();
        if basis == Basis::Diagonal {
            probe.apply(&Gate::H(qubit))?;
        }
        let mask = probe.layout.mask(qubit)?;
        let p1: f64 = probe
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        Ok(if outcome == 0 { 1.0 - p1 } else { p1 })
    }

    fn project(&mut self, qubit: QubitLabel, basis: Basis, outcome: u8) -> Result<MeasurementRecord> {
        if basis == Basis::Diagonal {
            self.apply(&Gate::H(qubit))?;
        }
        let mask = self.layout.mask(qubit)?;
        let keep_set = outcome == 1;
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & mask) != 0) == keep_set {
                p += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        let scale = 1.0 / p.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
        if basis == Basis::Diagonal {
            self.apply(&Gate::H(qubit))?;
        }
        Ok(MeasurementRecord {
            qubit,
            basis,
            outcome,
            probability: p,
        })
    }

    /// Drop a qubit that is in a product state with the rest (e.g. one that
    /// was just measured). Picks the dominant computational slice, so it
    /// works for `|0⟩`, `|1⟩` and `|±⟩` factors alike.
    pub fn remove_product_qubit(&mut self, qubit: QubitLabel) -> Result<()> {
        let mask = self.layout.mask(qubit)?;
        let dim = self.layout.dim();
        let mut slice0 = Vec::with_capacity(dim / 2);
        let mut slice1 = Vec::with_capacity(dim / 2);
        for i in 0..dim {
            if i & mask == 0 {
                slice0.push(self.amps[i]);
                slice1.push(self.amps[i | mask]);
            }
        }
        let n0: f64 = slice0.iter().map(|a| a.norm_sqr()).sum();
        let n1: f64 = slice1.iter().map(|a| a.norm_sqr()).sum();
        let (mut amps, norm) = if n0 >= n1 { (slice0, n0) } else { (slice1, n1) };
        let scale = 1.0 / norm.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        self.layout = self.layout.without(qubit)?;
        self.amps = amps;
        Ok(())
    }

    /// Text dump: index, basis symbols, amplitude (re, im), 12 significant
    /// digits per component.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            out.push_str(&format!(
                "{i}\t{}\t{}\t{}\n",
                self.layout.basis_string(i),
                fmt_sig(a.re, 12),
                fmt_sig(a.im, 12),
            ));
        }
        out
    }
}

impl State for PureState {
    fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check_targets()?;
        if let Some((qubit, u)) = gate.single_qubit_matrix() {
            let mask = self.layout.mask(qubit)?;
            for i in 0..self.amps.len() {
                if i & mask == 0 {
                    let j = i | mask;
                    let (a, b) = (self.amps[i], self.amps[j]);
                    self.amps[i] = u[0] * a + u[1] * b;
                    self.amps[j] = u[2] * a + u[3] * b;
                }
            }
            return Ok(());
        }
        let perm = permutation(&self.layout, gate)?;
        for i in 0..self.amps.len() {
            let j = perm(i);
            if j > i {
                self.amps.swap(i, j);
            }
        }
        Ok(())
    }

    fn excitation_probability(&self, qubit: QubitLabel) -> Result<f64> {
        self.outcome_probability(qubit, Basis::Computational, 1)
    }
}

/// Dense density matrix over a [`SystemLayout`]; Hermitian, unit trace,
/// positive semidefinite within the crate tolerances.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    layout: SystemLayout,
    mat: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &PureState) -> Self {
        state.to_density()
    }

    pub(crate) fn from_parts(layout: SystemLayout, mat: Vec<Complex64>) -> Self {
        debug_assert_eq!(mat.len(), layout.dim() * layout.dim());
        Self { layout, mat }
    }

    /// Weighted mixture of pure states on a common layout. Weights are
    /// normalized to sum to one.
    pub fn mixture(parts: &[(f64, PureState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if total <= 0.0 || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidParameter(
                "mixture weights must be nonnegative with positive sum".into(),
            ));
        }
        let mut out = first.1.to_density();
        out.scale(first.0 / total);
        for (w, state) in &parts[1..] {
            check_same_layout(&out.layout, state.layout())?;
            out.add_scaled(&state.to_density(), w / total);
        }
        Ok(out)
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[row * self.layout.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        let dim = self.layout.dim();
        (0..dim).map(|i| self.mat[i * dim + i].re).sum()
    }

    pub(crate) fn scale(&mut self, w: f64) {
        for x in &mut self.mat {
            *x *= w;
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &DensityMatrix, w: f64) {
        for (x, y) in self.mat.iter_mut().zip(&other.mat) {
            *x += y * w;
        }
    }

    /// `⟨ref|ρ|ref⟩`.
    pub fn fidelity(&self, reference: &PureState) -> Result<f64> {
        check_same_layout(&self.layout, reference.layout())?;
        let dim = self.layout.dim();
        let v = reference.amplitudes();
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += v[i].conj() * self.mat[i * dim + j] * v[j];
            }
        }
        Ok(acc.re.clamp(0.0, 1.0 + 1e-9).min(1.0))
    }

    /// Reduced state over `keep` (original layout order is preserved).
    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "partial_trace needs a nonempty keep set".into(),
            ));
        }
        for &q in keep {
            self.layout.position(q)?;
        }
        let kept: Vec<QubitLabel> = self
            .layout
            .labels()
            .iter()
            .copied()
            .filter(|l| keep.contains(l))
            .collect();
        let new_layout = SystemLayout::new(kept.clone())?;
        let n = self.layout.n_qubits();
        let dim = self.layout.dim();

        // For every full index, its kept sub-index and traced sub-index.
        let mut kept_of = vec![0usize; dim];
        let mut traced_of = vec![0usize; dim];
        for i in 0..dim {
            let (mut k, mut t) = (0usize, 0usize);
            for (pos, label) in self.layout.labels().iter().enumerate() {
                let bit = (i >> (n - 1 - pos)) & 1;
                if kept.contains(label) {
                    k = (k << 1) | bit;
                } else {
                    t = (t << 1) | bit;
                }
            }
            kept_of[i] = k;
            traced_of[i] = t;
        }

        let kdim = new_layout.dim();
        let mut out = vec![ZERO; kdim * kdim];
        for i in 0..dim {
            for j in 0..dim {
                if traced_of[i] == traced_of[j] {
                    out[kept_of[i] * kdim + kept_of[j]] += self.mat[i * dim + j];
                }
            }
        }
        Ok(DensityMatrix {
            layout: new_layout,
            mat: out,
        })
    }

    /// Tensor product; layouts must be disjoint.
    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let layout = self.layout.join(&other.layout)?;
        let (d1, d2) = (self.layout.dim(), other.layout.dim());
        let dim = layout.dim();
        let mut mat = vec![ZERO; dim * dim];
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.mat[i1 * d1 + j1];
                if a == ZERO {
                    continue;
                }
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        mat[(i1 * d2 + i2) * dim + (j1 * d2 + j2)] =
                            a * other.mat[i2 * d2 + j2];
                    }
                }
            }
        }
        Ok(DensityMatrix { layout, mat })
    }

    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        qubit: QubitLabel,
        basis: Basis,
        rng: &mut R,
    ) -> Result<MeasurementRecord> {
        let p1 = self.outcome_probability(qubit, basis, 1)?;
        let outcome = u8::from(rng.gen::<f64>() < p1);
        self.project(qubit, basis, outcome)
    }

    pub fn measure_forced(
        &mut self,
        qubit: QubitLabel,
        basis: Basis,
        outcome: u8,
    ) -> Result<MeasurementRecord> {
        let p = self.outcome_probability(qubit, basis, outcome)?;
        if p < 1e-14 {
            return Err(Error::ImpossibleOutcome {
                outcome,
                probability: p,
            });
        }
        self.project(qubit, basis, outcome)
    }

    pub fn outcome_probability(&self, qubit: QubitLabel, basis: Basis, outcome: u8) -> Result<f64> {
        let p1 = match basis {
            Basis::Computational => {
                let mask = self.layout.mask(qubit)?;
                let dim = self.layout.dim();
                (0..dim)
                    .filter(|i| i & mask != 0)
                    .map(|i| self.mat[i * dim + i].re)
                    .sum()
            }
            Basis::Diagonal => {
                let mut probe = self.clone();
                probe.apply(&Gate::H(qubit))?;
                probe.outcome_probability(qubit, Basis::Computational, 1)?
            }
        };
        Ok(if outcome == 0 { 1.0 - p1 } else { p1 })
    }

    fn project(&mut self, qubit: QubitLabel, basis: Basis, outcome: u8) -> Result<MeasurementRecord> {
        if basis == Basis::Diagonal {
            self.apply(&Gate::H(qubit))?;
        }
        let mask = self.layout.mask(qubit)?;
        let dim = self.layout.dim();
        let keep_set = outcome == 1;
        let mut p = 0.0;
        for i in 0..dim {
            if ((i & mask) != 0) == keep_set {
                p += self.mat[i * dim + i].re;
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let keep = (((i & mask) != 0) == keep_set) && (((j & mask) != 0) == keep_set);
                if keep {
                    self.mat[i * dim + j] /= p;
                } else {
                    self.mat[i * dim + j] = ZERO;
                }
            }
        }
        if basis == Basis::Diagonal {
            self.apply(&Gate::H(qubit))?;
        }
        Ok(MeasurementRecord {
            qubit,
            basis,
            outcome,
            probability: p,
        })
    }

    /// Drop a qubit by tracing it out.
    pub fn remove_qubit(&mut self, qubit: QubitLabel) -> Result<()> {
        let keep: Vec<QubitLabel> = self
            .layout
            .labels()
            .iter()
            .copied()
            .filter(|&l| l != qubit)
            .collect();
        if keep.is_empty() {
            return Err(Error::InvalidParameter(
                "cannot remove the last qubit".into(),
            ));
        }
        *self = self.partial_trace(&keep)?;
        Ok(())
    }

    /// Check unit trace, Hermiticity and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let dim = self.layout.dim();
        let tr = self.trace();
        if (tr - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::InvariantViolation(format!(
                "density-matrix trace drifted to {tr:.15}"
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                let delta = (self.mat[i * dim + j] - self.mat[j * dim + i].conj()).norm();
                if delta > tol::STRUCTURAL {
                    return Err(Error::InvariantViolation(format!(
                        "Hermiticity breach of {delta:.3e} at ({i},{j})"
                    )));
                }
            }
        }
        let min = self.min_eigenvalue();
        if min < tol::EIGEN_FLOOR {
            return Err(Error::InvariantViolation(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the (Hermitian) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.layout.dim();
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| self.mat[r * dim + c]);
        let eig = m.symmetric_eigen();
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl State for DensityMatrix {
    fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.check_targets()?;
        let dim = self.layout.dim();
        if let Some((qubit, u)) = gate.single_qubit_matrix() {
            let mask = self.layout.mask(qubit)?;
            // U ρ
            for j in 0..dim {
                for i in 0..dim {
                    if i & mask == 0 {
                        let k = i | mask;
                        let (a, b) = (self.mat[i * dim + j], self.mat[k * dim + j]);
                        self.mat[i * dim + j] = u[0] * a + u[1] * b;
                        self.mat[k * dim + j] = u[2] * a + u[3] * b;
                    }
                }
            }
            // (Uρ) U†
            for i in 0..dim {
                for j in 0..dim {
                    if j & mask == 0 {
                        let k = j | mask;
                        let (a, b) = (self.mat[i * dim + j], self.mat[i * dim + k]);
                        self.mat[i * dim + j] = a * u[0].conj() + b * u[1].conj();
                        self.mat[i * dim + k] = a * u[2].conj() + b * u[3].conj();
                    }
                }
            }
            return Ok(());
        }
        let perm = permutation(&self.layout, gate)?;
        for i in 0..dim {
            for j in 0..dim {
                let (pi, pj) = (perm(i), perm(j));
                if (pi, pj) > (i, j) {
                    self.mat.swap(i * dim + j, pi * dim + pj);
                }
            }
        }
        Ok(())
    }

    fn excitation_probability(&self, qubit: QubitLabel) -> Result<f64> {
        self.outcome_probability(qubit, Basis::Computational, 1)
    }
}

/// Index permutation of a CNOT or SWAP gate; both are involutions.
fn permutation(layout: &SystemLayout, gate: &Gate) -> Result<impl Fn(usize) -> usize> {
    let (m1, m2, is_cnot) = match *gate {
        Gate::Cnot { control, target } => (layout.mask(control)?, layout.mask(target)?, true),
        Gate::Swap(a, b) => (layout.mask(a)?, layout.mask(b)?, false),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "not a two-qubit gate: {gate:?}"
            )))
        }
    };
    Ok(move |i: usize| {
        if is_cnot {
            if i & m1 != 0 {
                i ^ m2
            } else {
                i
            }
        } else if ((i & m1) != 0) != ((i & m2) != 0) {
            i ^ m1 ^ m2
        } else {
            i
        }
    })
}

fn check_same_layout(a: &SystemLayout, b: &SystemLayout) -> Result<()> {
    if a != b {
        return Err(Error::LayoutMismatch(format!(
            "expected {:?}, got {:?}",
            a.labels(),
            b.labels()
        )));
    }
    Ok(())
}
