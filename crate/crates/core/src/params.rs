use crate::error::{Error, Result};

/// Parameters governing one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    /// Vector dimension; even, at least 4.
    pub n: usize,
    /// Degradation divisor, `> 1`.
    pub k: f64,
    /// Sampling gauge multiplier, in units of `1/(2√(nk))`.
    pub gauge_k: f64,
    /// Repetition codeword length.
    pub code_len: usize,
    /// Privacy-amplification group size; 1 disables hashing.
    pub pa: usize,
    /// Publish `ρ_B` and center the sampling comb on `V_B`.
    pub border_fix: bool,
    /// Number of protocol rounds.
    pub rounds: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            n: 10_000,
            k: 16.0,
            gauge_k: 4.0,
            code_len: 4,
            pa: 1,
            border_fix: true,
            rounds: 5_000,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::invalid(format!("n must be even and >= 4, got {}", self.n)));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::invalid(format!("n = {} is too large", self.n)));
        }
        if !(self.k.is_finite() && self.k > 1.0) {
            return Err(Error::invalid(format!("k must be > 1, got {}", self.k)));
        }
        if !(self.gauge_k.is_finite() && self.gauge_k > 0.0) {
            return Err(Error::invalid(format!("K must be > 0, got {}", self.gauge_k)));
        }
        if self.code_len < 1 {
            return Err(Error::invalid("L must be >= 1"));
        }
        if !(1..=62).contains(&self.pa) {
            return Err(Error::invalid(format!("PA must be in 1..=62, got {}", self.pa)));
        }
        if self.rounds < 1 {
            return Err(Error::invalid("R must be >= 1"));
        }
        Ok(())
    }

    /// Whether `1 ≪ K ≪ √k` plausibly holds. Purely advisory.
    pub fn gauge_in_advised_range(&self) -> bool {
        self.gauge_k > 1.0 && self.gauge_k < self.k.sqrt()
    }

    /// Validates, and logs a warning when the gauge is outside its advised range.
    pub fn check(&self) -> Result<()> {
        self.validate()?;
        if !self.gauge_in_advised_range() {
            log::warn!(
                "K = {} is outside the advised range 1 << K << sqrt(k) = {:.3}",
                self.gauge_k,
                self.k.sqrt()
            );
        }
        Ok(())
    }

    /// Sampling bin width `g = K / (2√(nk))`.
    pub fn gauge(&self) -> f64 {
        gauge(self.n, self.k, self.gauge_k)
    }

    pub fn half(&self) -> usize {
        self.n / 2
    }
}

/// Bin width for dimension `n`, divisor `k` and multiplier `gauge_k`.
pub fn gauge(n: usize, k: f64, gauge_k: f64) -> f64 {
    gauge_k / (2.0 * (n as f64 * k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_examples() {
        assert!((gauge(10_000, 16.0, 4.0) - 0.005).abs() < 1e-15);
        let unit = gauge(10_000, 16.0, 1.0);
        assert_eq!(unit, 1.0 / (2.0 * 400.0));
        assert_eq!(gauge(10_000, 16.0, 2.0 * 3.7), 2.0 * gauge(10_000, 16.0, 3.7));
    }

    #[test]
    fn rejects_bad_params() {
        let ok = ProtocolParams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            ProtocolParams { n: 7, ..ok.clone() },
            ProtocolParams { n: 2, ..ok.clone() },
            ProtocolParams { k: 1.0, ..ok.clone() },
            ProtocolParams { k: f64::NAN, ..ok.clone() },
            ProtocolParams { gauge_k: 0.0, ..ok.clone() },
            ProtocolParams { code_len: 0, ..ok.clone() },
            ProtocolParams { pa: 0, ..ok.clone() },
            ProtocolParams { rounds: 0, ..ok.clone() },
        ] {
            let err = bad.validate().unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad:?}");
        }
    }

    #[test]
    fn advisory_is_soft() {
        // The published sweeps use K up to 10 with k = 16.
        let p = ProtocolParams { gauge_k: 10.0, ..Default::default() };
        assert!(!p.gauge_in_advised_range());
        assert!(p.check().is_ok());
        let q = ProtocolParams { gauge_k: 2.0, ..Default::default() };
        assert!(q.gauge_in_advised_range());
    }
}
