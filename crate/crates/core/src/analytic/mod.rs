//! Closed-form finite-SNR and asymptotic BER/outage expressions for the
//! N'th-best relay selection scheme, with singularity-safe numerics.
//!
//! The finite expressions share one algebraic skeleton: mixtures of
//! exponential rates produced by the order statistics of the per-relay
//! bottleneck SNR `min(γ_SR, γ_RD)`, combined through first and second
//! divided differences of a scalar kernel. Instantiating the kernel as
//! `e^{-r x}` yields the densities, as `ω(r)` the BPSK error rates, and as
//! `∫_0^φ e^{-r t} dt` the outage CDFs, so every reported quantity is the
//! same mixture evaluated under a different transform.

mod ber;
mod outage;
mod special;

pub mod asymptotic;

pub use ber::{
    avg_gamma_rnd, ber_bad_state, ber_error_prop_bad, ber_error_prop_nth, ber_mrc_bad, ber_mrc_nth,
    ber_nth_good, ber_overall, ber_relay_bad, ber_relay_nth, ber_relay_overall, cdf_gamma_sr_n,
    cdf_gamma_srnd, pdf_gamma_rnd, pdf_gamma_sr_bad, pdf_gamma_sr_n, pdf_gamma_srnd, BerPair,
};
pub use outage::{
    outage_bad_state, outage_mrc_bad, outage_nth_good, outage_overall, outage_sd, outage_sr_bad,
    outage_sr_nth, outage_srnd_nth,
};
pub use special::{chi, omega};

use crate::error::{Error, Result};
use crate::noise::LinkSnrs;

/// Average SNRs of the three link classes plus the impulsive-to-background
/// noise power ratio, from which the derived means follow.
#[derive(Clone, Copy, Debug)]
pub struct AvgSnrSet {
    sr: f64,
    rd: f64,
    sd: f64,
    rho: f64,
}

impl AvgSnrSet {
    pub fn new(sr: f64, rd: f64, sd: f64, rho: f64) -> Result<Self> {
        for (name, v) in [("sr", sr), ("rd", rd), ("sd", sd)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(
                    "avg_snr",
                    format!("{name} = {v} is not positive"),
                ));
            }
        }
        if !rho.is_finite() || rho < 1.0 {
            return Err(Error::invalid("rho", format!("{rho} is not in [1, inf)")));
        }
        Ok(Self { sr, rd, sd, rho })
    }

    pub fn from_links(links: LinkSnrs, rho: f64) -> Result<Self> {
        Self::new(links.sr, links.rd, links.sd, rho)
    }

    /// Average source→relay SNR (good state).
    pub fn sr(&self) -> f64 {
        self.sr
    }

    /// Average relay→destination SNR.
    pub fn rd(&self) -> f64 {
        self.rd
    }

    /// Average source→destination SNR.
    pub fn sd(&self) -> f64 {
        self.sd
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Mean of the per-relay bottleneck `min(γ_SR, γ_RD)`:
    /// `sr·rd/(sr + rd)`, always below both link means.
    pub fn gamma_a(&self) -> f64 {
        self.sr * self.rd / (self.sr + self.rd)
    }

    /// Rate (inverse mean) of the bottleneck, computed without the product
    /// form so it stays exact for extreme link asymmetries.
    pub(crate) fn rate_a(&self) -> f64 {
        1.0 / self.sr + 1.0 / self.rd
    }

    /// Average source→relay SNR while the relay sits in the impulsive
    /// state: the good-state mean divided by the noise power ratio.
    pub fn sr_bad(&self) -> f64 {
        self.sr / self.rho
    }
}

/// Outage SNR threshold `2^{2R} - 1` for a target rate `R` in bit/s/Hz.
pub fn threshold_phi(rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::invalid("rate", format!("{rate} is not positive")));
    }
    Ok(f64::exp2(2.0 * rate) - 1.0)
}

/// Diversity order achieved by selecting the N'th best of M relays with a
/// direct path: `M - N + 2`.
pub fn diversity_order(m: u32, n: u32) -> Result<u32> {
    validate_order(m, n)?;
    Ok(m - n + 2)
}

/// Evaluate a named end-to-end curve at one SNR point. Names: `ber_dest`,
/// `ber_relay`, `pout`, `asym_ber_dest`, `asym_ber_relay`, `asym_pout`.
pub fn curve_value(name: &str, snr: &AvgSnrSet, m: u32, p_b: f64, phi: f64) -> Result<f64> {
    match name {
        "ber_dest" => ber_overall(snr, m, p_b),
        "ber_relay" => ber_relay_overall(snr, m, p_b),
        "pout" => outage_overall(snr, m, p_b, phi),
        "asym_ber_dest" => asymptotic::ber_overall(snr, m, p_b),
        "asym_ber_relay" => asymptotic::ber_relay_overall(snr, m, p_b),
        "asym_pout" => asymptotic::outage_overall(snr, m, p_b, phi),
        other => Err(Error::invalid(
            "curve",
            format!(
                "unknown quantity {other:?}; expected one of ber_dest, ber_relay, pout, \
                 asym_ber_dest, asym_ber_relay, asym_pout"
            ),
        )),
    }
}

pub(crate) fn validate_order(m: u32, n: u32) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid(
            "m",
            "relay count must be at least 1".to_string(),
        ));
    }
    if n == 0 || n > m {
        return Err(Error::invalid("n", format!("rank {n} is not in 1..={m}")));
    }
    Ok(())
}

pub(crate) fn validate_p_b(p_b: f64) -> Result<()> {
    if !p_b.is_finite() || !(0.0..1.0).contains(&p_b) {
        return Err(Error::invalid("p_b", format!("{p_b} is not in [0, 1)")));
    }
    Ok(())
}

/// Number of ways the N'th best of M relays arises in the order statistics:
/// `M · binom(M-1, N-1)`.
pub(crate) fn order_weight(m: u32, n: u32) -> f64 {
    m as f64 * special::binomial(m - 1, n - 1)
}

/// Mixture of the per-rank good-state quantity and the all-bad fallback:
/// ranks weighted `(1-p_B)·p_B^{N-1}`, fallback weighted `p_B^M`.
pub(crate) fn state_mixture<F>(m: u32, p_b: f64, good: F, bad: f64) -> Result<f64>
where
    F: Fn(u32) -> Result<f64>,
{
    let mut total = 0.0;
    let mut weight = 1.0 - p_b;
    for n in 1..=m {
        total += weight * good(n)?;
        weight *= p_b;
    }
    Ok(total + p_b.powi(m as i32) * bad)
}

/// Clamp roundoff-scale negatives from alternating sums to zero; anything
/// materially negative is a genuine numerical failure.
pub(crate) fn settle(value: f64, scale: f64, context: &'static str) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::NumericalDegeneracy {
            context,
            reason: format!("non-finite value (term scale {scale:e})"),
        });
    }
    if value >= 0.0 {
        return Ok(value);
    }
    if value >= -1e-11 * scale.max(1.0) {
        return Ok(0.0);
    }
    Err(Error::NumericalDegeneracy {
        context,
        reason: format!("negative value {value:e} exceeds cancellation noise (scale {scale:e})"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn avg_snr_set_derives_means() {
        let s = AvgSnrSet::new(6.25, 2.5, 1.0, 100.0).unwrap();
        assert_relative_eq!(s.gamma_a(), 6.25 * 2.5 / 8.75, epsilon = 1e-15);
        assert_relative_eq!(s.rate_a(), 1.0 / s.gamma_a(), epsilon = 1e-15);
        assert!(s.gamma_a() < s.sr().min(s.rd()));
        assert_relative_eq!(s.sr_bad(), 0.0625, epsilon = 1e-15);
        assert!(AvgSnrSet::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(AvgSnrSet::new(1.0, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn phi_for_unit_rate_is_three() {
        assert_relative_eq!(threshold_phi(1.0).unwrap(), 3.0, epsilon = 1e-15);
        assert_relative_eq!(threshold_phi(0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert!(threshold_phi(0.0).is_err());
        assert!(threshold_phi(-1.0).is_err());
    }

    #[test]
    fn diversity_order_formula() {
        assert_eq!(diversity_order(5, 1).unwrap(), 6);
        assert_eq!(diversity_order(5, 3).unwrap(), 4);
        assert_eq!(diversity_order(1, 1).unwrap(), 2);
        assert!(diversity_order(5, 6).is_err());
        assert!(diversity_order(5, 0).is_err());
        assert!(diversity_order(0, 0).is_err());
    }

    #[test]
    fn settle_accepts_roundoff_rejects_real_negatives() {
        assert_eq!(settle(1.5, 1.0, "t").unwrap(), 1.5);
        assert_eq!(settle(-1e-14, 1.0, "t").unwrap(), 0.0);
        assert!(settle(-1e-3, 1.0, "t").is_err());
        assert!(settle(f64::NAN, 1.0, "t").is_err());
    }

    #[test]
    fn curve_value_rejects_unknown_names() {
        let s = AvgSnrSet::new(6.25, 2.5, 1.0, 100.0).unwrap();
        let err = curve_value("ber_destt", &s, 5, 0.01, 3.0).unwrap_err();
        assert!(err.is_validation());
        for name in [
            "ber_dest",
            "ber_relay",
            "pout",
            "asym_ber_dest",
            "asym_pout",
        ] {
            let v = curve_value(name, &s, 5, 0.01, 3.0).unwrap();
            assert!(v.is_finite() && v >= 0.0, "{name} -> {v}");
        }
    }
}
