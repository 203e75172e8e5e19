//! High-SNR power-law equivalents of the finite BER/outage expressions.
//!
//! Each quantity keeps only the leading diversity term, so slopes on a
//! log-log grid are exact integers and the finite curves converge to these
//! from above. All functions evaluate directly at any positive SNR; they
//! are only meaningful approximations at high SNR.

use super::ber::{ber_error_prop_bad, ber_mrc_bad};
use super::special::gamma_of_half;
use super::{order_weight, state_mixture, validate_order, validate_p_b, AvgSnrSet, BerPair};
use crate::error::{Error, Result};

fn sqrt_pi() -> f64 {
    std::f64::consts::PI.sqrt()
}

fn validate_phi(phi: f64) -> Result<f64> {
    if !phi.is_finite() || phi <= 0.0 {
        return Err(Error::invalid("phi", format!("{phi} is not positive")));
    }
    Ok(phi)
}

/// Asymptotic density of the source SNR at the N'th best relay: the pure
/// power term of the order statistics.
pub fn pdf_gamma_sr_n(snr: &AvgSnrSet, m: u32, n: u32, x: f64) -> Result<f64> {
    validate_order(m, n)?;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid("x", format!("{x} is not in [0, inf)")));
    }
    let d = (m - n) as i32;
    Ok(order_weight(m, n) / snr.sr() * (x / snr.gamma_a()).powi(d))
}

/// Asymptotic BPSK error probability at the N'th best relay.
pub fn ber_relay_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let d = m - n;
    let gamma_factor = gamma_of_half(2 * d + 3) / (2.0 * sqrt_pi() * (d + 1) as f64);
    Ok(order_weight(m, n) / snr.sr() * snr.gamma_a().powi(-(d as i32)) * gamma_factor)
}

/// Asymptotic destination error probability via the combined path when the
/// relayed bit is correct.
pub fn ber_mrc_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let d = m - n;
    let gamma_factor = gamma_of_half(2 * d + 5) / (2.0 * sqrt_pi() * ((d + 1) * (d + 2)) as f64);
    Ok(order_weight(m, n) / (snr.rd() * snr.sd()) * snr.gamma_a().powi(-(d as i32)) * gamma_factor)
}

/// Asymptotic expected second-hop SNR from the N'th best relay.
pub fn avg_gamma_rnd(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let d = m - n;
    Ok(order_weight(m, n) / snr.rd() * snr.gamma_a().powi(2) * gamma_of_half(2 * d + 4))
}

/// Error-propagation branch with the asymptotic second-hop mean.
pub fn ber_error_prop_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    let g_rnd = avg_gamma_rnd(snr, m, n)?;
    Ok(g_rnd / (g_rnd + snr.sd()))
}

/// Relay and end-to-end asymptotic error probabilities in the good state.
pub fn ber_nth_good(snr: &AvgSnrSet, m: u32, n: u32) -> Result<BerPair> {
    let relay = ber_relay_nth(snr, m, n)?;
    let ner = ber_mrc_nth(snr, m, n)?;
    let er = ber_error_prop_nth(snr, m, n)?;
    Ok(BerPair {
        relay,
        dest: relay * er + (1.0 - relay) * ner,
    })
}

/// Asymptotic error probability at the fallback relay when every relay is
/// in the impulsive state.
pub fn ber_relay_bad(snr: &AvgSnrSet, m: u32) -> Result<f64> {
    validate_order(m, 1)?;
    Ok(gamma_of_half(2 * m + 1) / (2.0 * sqrt_pi()) * snr.sr_bad().powi(-(m as i32)))
}

/// Asymptotic end-to-end error probability in the impulsive fallback; the
/// destination-side branches keep their finite forms.
pub fn ber_bad_state(snr: &AvgSnrSet, m: u32) -> Result<f64> {
    let relay = ber_relay_bad(snr, m)?;
    let ner = ber_mrc_bad(snr)?;
    let er = ber_error_prop_bad(snr)?;
    Ok(relay * er + (1.0 - relay) * ner)
}

/// Overall asymptotic destination error probability.
pub fn ber_overall(snr: &AvgSnrSet, m: u32, p_b: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = ber_bad_state(snr, m)?;
    state_mixture(m, p_b, |n| ber_nth_good(snr, m, n).map(|p| p.dest), bad)
}

/// Overall asymptotic error probability at the selected relay.
pub fn ber_relay_overall(snr: &AvgSnrSet, m: u32, p_b: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = ber_relay_bad(snr, m)?;
    state_mixture(m, p_b, |n| ber_relay_nth(snr, m, n), bad)
}

/// Asymptotic outage of the first hop to the N'th best relay.
pub fn outage_sr_nth(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_phi(phi)?;
    let d = (m - n) as i32;
    Ok(
        order_weight(m, n) / snr.sr() * snr.gamma_a().powi(-d) * phi.powi(d + 1)
            / (m - n + 1) as f64,
    )
}

/// Asymptotic outage of the direct link.
pub fn outage_sd(snr: &AvgSnrSet, phi: f64) -> Result<f64> {
    Ok(validate_phi(phi)? / snr.sd())
}

/// Asymptotic outage of the MRC-combined destination SNR.
pub fn outage_srnd_nth(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_phi(phi)?;
    let d = (m - n) as i32;
    Ok(
        order_weight(m, n) / ((m - n + 1) as f64 * snr.rd() * snr.sd())
            * snr.gamma_a().powi(-d)
            * phi.powi(d + 2)
            / (m - n + 2) as f64,
    )
}

/// Asymptotic end-to-end outage for the N'th best relay in the good state:
/// both fall-short routes survive at the same diversity order `M - N + 2`.
pub fn outage_nth_good(snr: &AvgSnrSet, m: u32, n: u32, phi: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_phi(phi)?;
    let d = (m - n) as i32;
    let bracket = 1.0 / ((m - n + 2) as f64 * snr.rd()) + 1.0 / snr.sr();
    Ok(order_weight(m, n) / ((m - n + 1) as f64 * snr.sd())
        * snr.gamma_a().powi(-d)
        * phi.powi(d + 2)
        * bracket)
}

/// Asymptotic outage of the first hop in the impulsive fallback.
pub fn outage_sr_bad(snr: &AvgSnrSet, m: u32, phi: f64) -> Result<f64> {
    validate_order(m, 1)?;
    Ok((validate_phi(phi)? / snr.sr_bad()).powi(m as i32))
}

/// Asymptotic combined-path outage in the impulsive fallback.
pub fn outage_mrc_bad(snr: &AvgSnrSet, phi: f64) -> Result<f64> {
    let phi = validate_phi(phi)?;
    Ok(phi * phi / (2.0 * snr.sd() * snr.rd()))
}

/// Asymptotic end-to-end outage when all relays are in the impulsive state.
pub fn outage_bad_state(snr: &AvgSnrSet, m: u32, phi: f64) -> Result<f64> {
    let f_sr = outage_sr_bad(snr, m, phi)?;
    let f_sd = outage_sd(snr, phi)?;
    let f_comb = outage_mrc_bad(snr, phi)?;
    Ok(f_sr * f_sd + (1.0 - f_sr) * f_comb)
}

/// Overall asymptotic destination outage.
pub fn outage_overall(snr: &AvgSnrSet, m: u32, p_b: f64, phi: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = outage_bad_state(snr, m, phi)?;
    state_mixture(m, p_b, |n| outage_nth_good(snr, m, n, phi), bad)
}
