use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the qubit count of one system (4 memory pairs plus the
/// photonic qubits). Guards against accidental exponential blowup; raise it
/// explicitly with [`SystemLayout::with_cap`] if you know what you are doing.
pub const DEFAULT_QUBIT_CAP: usize = 12;

/// A physical qubit in the setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitLabel {
    /// Memory spin; by convention odd indices sit at Alice, even at Bob,
    /// and pair `i` is `(Memory(2i-1), Memory(2i))`.
    Memory(u8),
    /// The photon's polarization qubit (D/A basis).
    Polarization,
    /// One of the photon's time-bin qubits (S/L basis).
    TimeBin(u8),
}

impl QubitLabel {
    pub fn is_memory(self) -> bool {
        matches!(self, QubitLabel::Memory(_))
    }

    pub fn is_photonic(self) -> bool {
        !self.is_memory()
    }

    /// Symbols for the two computational basis states of this qubit kind,
    /// used by the state dumps.
    pub fn basis_symbols(self) -> [char; 2] {
        match self {
            QubitLabel::Memory(_) => ['g', 'e'],
            QubitLabel::Polarization => ['D', 'A'],
            QubitLabel::TimeBin(_) => ['S', 'L'],
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitLabel::Memory(i) => write!(f, "QM{i}"),
            QubitLabel::Polarization => write!(f, "Pol"),
            QubitLabel::TimeBin(i) => write!(f, "TB{i}"),
        }
    }
}

/// Ordered list of the qubits making up one system.
///
/// The qubit at position 0 is the most significant bit of a basis index;
/// total dimension is exactly `2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    labels: Vec<QubitLabel>,
}

impl SystemLayout {
    pub fn new(labels: Vec<QubitLabel>) -> Result<Self> {
        Self::with_cap(labels, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(labels: Vec<QubitLabel>, cap: usize) -> Result<Self> {
        if labels.len() > cap {
            return Err(Error::QubitCapExceeded {
                requested: labels.len(),
                cap,
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::DuplicateLabel(*a));
            }
        }
        Ok(Self { labels })
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn labels(&self) -> &[QubitLabel] {
        &self.labels
    }

    pub fn contains(&self, label: QubitLabel) -> bool {
        self.labels.contains(&label)
    }

    pub fn position(&self, label: QubitLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    /// Bit mask of the given label inside a basis index (first qubit is the
    /// most significant bit).
    pub(crate) fn mask(&self, label: QubitLabel) -> Result<usize> {
        let pos = self.position(label)?;
        Ok(1 << (self.labels.len() - 1 - pos))
    }

    /// Layout left after dropping `removed`, preserving order.
    pub fn without(&self, removed: QubitLabel) -> Result<SystemLayout> {
        self.position(removed)?;
        Ok(SystemLayout {
            labels: self
                .labels
                .iter()
                .copied()
                .filter(|&l| l != removed)
                .collect(),
        })
    }

    /// Concatenation of two disjoint layouts (cap re-checked).
    pub fn join(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        SystemLayout::new(labels)
    }

    /// Kind symbols for one basis index, e.g. `geDS`.
    pub fn basis_string(&self, index: usize) -> String {
        let n = self.labels.len();
        self.labels
            .iter()
            .enumerate()
            .map(|(pos, label)| {
                let bit = (index >> (n - 1 - pos)) & 1;
                label.basis_symbols()[bit]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_cap() {
        let err = SystemLayout::new(vec![QubitLabel::Memory(1), QubitLabel::Memory(1)]);
        assert!(matches!(err, Err(Error::DuplicateLabel(_))));

        let labels: Vec<_> = (1..=13).map(QubitLabel::Memory).collect();
        assert!(matches!(
            SystemLayout::new(labels.clone()),
            Err(Error::QubitCapExceeded { .. })
        ));
        assert!(SystemLayout::with_cap(labels, 13).is_ok());
    }

    #[test]
    fn masks_are_big_endian() {
        let layout = SystemLayout::new(vec![
            QubitLabel::Memory(1),
            QubitLabel::Polarization,
            QubitLabel::TimeBin(1),
        ])
        .unwrap();
        assert_eq!(layout.mask(QubitLabel::Memory(1)).unwrap(), 0b100);
        assert_eq!(layout.mask(QubitLabel::TimeBin(1)).unwrap(), 0b001);
        assert_eq!(layout.basis_string(0b010), "gAS".to_string());
    }
}
