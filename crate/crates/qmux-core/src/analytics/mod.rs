//! Closed-form rate and waiting-time analytics: normalized rates under a
//! resource cost model, protocol rate ratios, the single-node repeater
//! comparison, error-correction rates, and the order statistics of the
//! entangling attempts with a Monte Carlo oracle.

mod rates;
mod sweep;
pub mod waiting;

pub use rates::{
    cost_sweep, deutsch_resources, normalized_rate, qmux_resources, rate_ec, rate_single_node_qr,
    ratio_ec, ratio_purification, ratio_purification_raw, ratio_repeater, raw_rate_deutsch,
    raw_rate_qmux, EcVariant, Switches,
};
pub use sweep::SweepTable;
pub use waiting::{
    expected_attempts_3, expected_attempts_n, geometric_pmf, max3_pmf, max_n_pmf,
    monte_carlo_attempts,
};

use crate::error::{Error, Result};

/// Cost weights multiplying the matter-qubit count and the expected photon
/// count in the normalized rate denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub c_m: f64,
    pub c_p: f64,
}

impl CostModel {
    pub fn new(c_m: f64, c_p: f64) -> Result<Self> {
        if c_m < 0.0 || c_p < 0.0 || (c_m == 0.0 && c_p == 0.0) {
            return Err(Error::InvalidParameter(
                "cost weights must be nonnegative and not both zero".into(),
            ));
        }
        Ok(Self { c_m, c_p })
    }

    pub fn unit() -> Self {
        Self { c_m: 1.0, c_p: 1.0 }
    }
}

/// Physical resources consumed per purified pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceCount {
    /// Matter qubits held across both stations.
    pub matter_qubits: u32,
    /// Expected number of single photons.
    pub photons: f64,
}

/// One evaluated sweep sample.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub l_km: f64,
    /// Purified pairs per second (infinite at L = 0).
    pub raw_rate: f64,
    /// Raw rate divided by the cost-weighted resource count.
    pub normalized_rate: f64,
    /// Named extras (P0, acceptance probabilities, fidelities).
    pub aux: Vec<(String, f64)>,
}
