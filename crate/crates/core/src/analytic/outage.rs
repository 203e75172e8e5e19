//! Finite-SNR outage probabilities at rate threshold `phi`.

use super::ber::{cdf_gamma_sr_n, cdf_gamma_srnd};
use super::{chi, state_mixture, validate_order, validate_p_b, AvgSnrSet};
use crate::error::{Error, Result};

fn validate_phi(phi: f64) -> Result<()> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::invalid("phi", format!("{phi} is not positive")));
    }
    Ok(())
}

/// Outage probability of the first hop to the N'th best relay.
pub fn outage_sr_nth(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    validate_phi(phi)?;
    cdf_gamma_sr_n(snr, m, n, phi)
}

/// Outage probability of the direct link.
pub fn outage_sd(snr: &AvgSnrSet, phi: f64) -> Result<f64> {
    validate_phi(phi)?;
    Ok(-f64::exp_m1(-phi / snr.sd()))
}

/// Outage probability of the MRC-combined destination SNR when the N'th
/// best relay forwards.
pub fn outage_srnd_nth(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    validate_phi(phi)?;
    cdf_gamma_srnd(snr, m, n, phi)
}

/// End-to-end outage for the N'th best relay in the good state: either the
/// relay decodes and the combined destination SNR falls short, or the relay
/// fails and the direct link falls short.
pub fn outage_nth_good(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    let f_sr = outage_sr_nth(snr, m, n, phi)?;
    let f_comb = outage_srnd_nth(snr, m, n, phi)?;
    let f_sd = outage_sd(snr, phi)?;
    Ok((1.0 - f_sr) * f_comb + f_sr * f_sd)
}

/// Outage probability of the first hop to the fallback relay when every
/// relay sits in the impulsive state: CDF of the max of M exponentials at
/// the bad-state mean.
pub fn outage_sr_bad(snr: &AvgSnrSet, m: u32, phi: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_phi(phi)?;
    Ok((-f64::exp_m1(-phi / snr.sr_bad())).powi(m as i32))
}

/// Combined-path outage at the destination under the impulsive fallback
/// (product approximation of the two branch CDFs).
pub fn outage_mrc_bad(snr: &AvgSnrSet, phi: f64) -> Result<f64> {
    validate_phi(phi)?;
    let v = 0.5 * chi(snr.sd(), phi)? * chi(snr.rd(), phi)? / (snr.sd() * snr.rd());
    Ok(v.min(1.0))
}

/// End-to-end outage when all relays are in the impulsive state.
pub fn outage_bad_state(snr: &AvgSnrSet, m: u32, phi: f64) -> Result<f64> {
    let f_sr = outage_sr_bad(snr, m, phi)?;
    let f_sd = outage_sd(snr, phi)?;
    let f_comb = outage_mrc_bad(snr, phi)?;
    Ok(f_sr * f_sd + (1.0 - f_sr) * f_comb)
}

/// Overall destination outage under the rank/state weighting.
pub fn outage_overall(snr: &AvgSnrSet, m: u32, p_b: f64, phi: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = outage_bad_state(snr, m, phi)?;
    state_mixture(m, p_b, |n| outage_nth_good(snr, m, n, phi), bad)
}
