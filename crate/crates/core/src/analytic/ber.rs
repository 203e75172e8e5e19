//! Finite-SNR densities and bit error rates for the N'th-best selection
//! scheme under BPSK and maximum-ratio combining.

use super::special::{
    binomial, Accumulator, ChiKernel, ExpKernel, InverseSquareKernel, OmegaKernel, RateKernel,
};
use super::{order_weight, settle, state_mixture, validate_order, validate_p_b, AvgSnrSet};
use crate::error::{Error, Result};

/// Error probabilities at the selected relay and at the destination.
#[derive(Clone, Copy, Debug)]
pub struct BerPair {
    pub relay: f64,
    pub dest: f64,
}

fn validate_nonneg(name: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::invalid(name, format!("{x} is not in [0, inf)")));
    }
    Ok(())
}

/// Signed binomial coefficient `(-1)^k binom(m-n, k)` of the order-statistic
/// expansion.
fn expansion_coeff(m: u32, n: u32, k: u32) -> f64 {
    let b = binomial(m - n, k);
    if k.is_multiple_of(2) {
        b
    } else {
        -b
    }
}

/// Mixture transform of the SNR from the source to the N'th best relay:
/// `C_M · Σ_k b_k [ dd1(r_SR, r_k)/(γ̄_SR γ̄_RD) + K(r_k)/γ̄_SR ]` with
/// `r_k = (k+N)/γ̄_a`. Returns the value and the cancellation scale.
fn sr_marginal<K: RateKernel>(kernel: &K, snr: &AvgSnrSet, m: u32, n: u32) -> (f64, f64) {
    let r_sr = 1.0 / snr.sr();
    let rate_a = snr.rate_a();
    let cross = 1.0 / (snr.sr() * snr.rd());
    let mut acc = Accumulator::default();
    for k in 0..=(m - n) {
        let b = expansion_coeff(m, n, k);
        let r_k = (k + n) as f64 * rate_a;
        acc.add(b * (kernel.dd1(r_sr, r_k) * cross + kernel.eval(r_k) / snr.sr()));
    }
    let c_m = order_weight(m, n);
    (c_m * acc.total(), c_m * acc.magnitude())
}

/// Mirror of [`sr_marginal`] for the SNR from the N'th best relay to the
/// destination (the two hops swap roles in the order statistics).
fn rd_marginal<K: RateKernel>(kernel: &K, snr: &AvgSnrSet, m: u32, n: u32) -> (f64, f64) {
    let r_rd = 1.0 / snr.rd();
    let rate_a = snr.rate_a();
    let cross = 1.0 / (snr.sr() * snr.rd());
    let mut acc = Accumulator::default();
    for k in 0..=(m - n) {
        let b = expansion_coeff(m, n, k);
        let r_k = (k + n) as f64 * rate_a;
        acc.add(b * (kernel.dd1(r_rd, r_k) * cross + kernel.eval(r_k) / snr.rd()));
    }
    let c_m = order_weight(m, n);
    (c_m * acc.total(), c_m * acc.magnitude())
}

/// Transform of the combined SNR `γ_SD + γ_RND` at the destination: the
/// convolution with the exponential direct path turns each first divided
/// difference of [`rd_marginal`] into a second one anchored at
/// `s = 1/γ̄_SD`.
fn srnd_mixture<K: RateKernel>(kernel: &K, snr: &AvgSnrSet, m: u32, n: u32) -> (f64, f64) {
    let s = 1.0 / snr.sd();
    let r_rd = 1.0 / snr.rd();
    let rate_a = snr.rate_a();
    let cross = 1.0 / (snr.sr() * snr.rd());
    let mut acc = Accumulator::default();
    for k in 0..=(m - n) {
        let b = expansion_coeff(m, n, k);
        let r_k = (k + n) as f64 * rate_a;
        acc.add(b * s * (kernel.dd2(s, r_rd, r_k) * cross + kernel.dd1(s, r_k) / snr.rd()));
    }
    let c_m = order_weight(m, n);
    (c_m * acc.total(), c_m * acc.magnitude())
}

/// Density of the source SNR at the N'th best relay.
pub fn pdf_gamma_sr_n(snr: &AvgSnrSet, m: u32, n: u32, x: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_nonneg("x", x)?;
    let (v, scale) = sr_marginal(&ExpKernel { x }, snr, m, n);
    settle(v, scale, "pdf_gamma_sr_n")
}

/// CDF companion of [`pdf_gamma_sr_n`]; at the outage threshold this is the
/// relay-side outage probability.
pub fn cdf_gamma_sr_n(snr: &AvgSnrSet, m: u32, n: u32, x: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_nonneg("x", x)?;
    let (v, scale) = sr_marginal(&ChiKernel { phi: x }, snr, m, n);
    settle(v, scale, "cdf_gamma_sr_n").map(|p| p.min(1.0))
}

/// Density of the second-hop SNR from the N'th best relay to the
/// destination.
pub fn pdf_gamma_rnd(snr: &AvgSnrSet, m: u32, n: u32, x: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_nonneg("x", x)?;
    let (v, scale) = rd_marginal(&ExpKernel { x }, snr, m, n);
    settle(v, scale, "pdf_gamma_rnd")
}

/// Density of the MRC-combined SNR `γ_SD + γ_RND` at the destination.
pub fn pdf_gamma_srnd(snr: &AvgSnrSet, m: u32, n: u32, theta: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_nonneg("theta", theta)?;
    let (v, scale) = srnd_mixture(&ExpKernel { x: theta }, snr, m, n);
    settle(v, scale, "pdf_gamma_srnd")
}

/// CDF companion of [`pdf_gamma_srnd`].
pub fn cdf_gamma_srnd(snr: &AvgSnrSet, m: u32, n: u32, theta: f64) -> Result<f64> {
    validate_order(m, n)?;
    validate_nonneg("theta", theta)?;
    let (v, scale) = srnd_mixture(&ChiKernel { phi: theta }, snr, m, n);
    settle(v, scale, "cdf_gamma_srnd").map(|p| p.min(1.0))
}

/// BPSK error probability at the N'th best relay (good state).
pub fn ber_relay_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let (v, scale) = sr_marginal(&OmegaKernel, snr, m, n);
    settle(v, scale, "ber_relay_nth")
}

/// Destination error probability when the relayed bit is correct: BPSK over
/// the MRC-combined SNR.
pub fn ber_mrc_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let (v, scale) = srnd_mixture(&OmegaKernel, snr, m, n);
    settle(v, scale, "ber_mrc_nth")
}

/// Expected second-hop SNR from the N'th best relay.
pub fn avg_gamma_rnd(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    validate_order(m, n)?;
    let (v, scale) = rd_marginal(&InverseSquareKernel, snr, m, n);
    settle(v, scale, "avg_gamma_rnd")
}

/// Destination error probability when the relay forwarded a wrong bit,
/// approximated by the mean-SNR ratio of the two combining branches.
pub fn ber_error_prop_nth(snr: &AvgSnrSet, m: u32, n: u32) -> Result<f64> {
    let g_rnd = avg_gamma_rnd(snr, m, n)?;
    Ok(g_rnd / (g_rnd + snr.sd()))
}

/// Relay and end-to-end error probabilities for the N'th best relay in the
/// good state: the destination combines the no-error and error-propagation
/// branches weighted by the relay error rate.
pub fn ber_nth_good(snr: &AvgSnrSet, m: u32, n: u32) -> Result<BerPair> {
    let relay = ber_relay_nth(snr, m, n)?;
    let ner = ber_mrc_nth(snr, m, n)?;
    let er = ber_error_prop_nth(snr, m, n)?;
    Ok(BerPair {
        relay,
        dest: relay * er + (1.0 - relay) * ner,
    })
}

/// Density of the source SNR at the fallback relay when every relay sits in
/// the impulsive state: the maximum of M exponentials with the bad-state
/// mean.
pub fn pdf_gamma_sr_bad(snr: &AvgSnrSet, m: u32, y: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_nonneg("y", y)?;
    let g = snr.sr_bad();
    let u = -f64::exp_m1(-y / g);
    Ok(m as f64 / g * u.powi(m as i32 - 1) * (-y / g).exp())
}

/// BPSK error probability at the fallback relay in the impulsive state.
pub fn ber_relay_bad(snr: &AvgSnrSet, m: u32) -> Result<f64> {
    validate_order(m, 1)?;
    let g = snr.sr_bad();
    let mut acc = Accumulator::default();
    for k in 0..m {
        let b = if k % 2 == 0 {
            binomial(m - 1, k)
        } else {
            -binomial(m - 1, k)
        };
        acc.add(b * super::special::omega((k + 1) as f64 / g)?);
    }
    let pre = m as f64 / g;
    settle(pre * acc.total(), pre * acc.magnitude(), "ber_relay_bad")
}

/// Two-branch MRC error probability over the direct and second-hop links
/// (used when the forwarding relay was selected in the impulsive state; the
/// second hop itself is clean).
pub fn ber_mrc_bad(snr: &AvgSnrSet) -> Result<f64> {
    let s = 1.0 / snr.sd();
    let r = 1.0 / snr.rd();
    Ok(s * r * OmegaKernel.dd1(s, r))
}

/// Error-propagation branch of the impulsive-state fallback.
pub fn ber_error_prop_bad(snr: &AvgSnrSet) -> Result<f64> {
    Ok(snr.rd() / (snr.rd() + snr.sd()))
}

/// End-to-end error probability when all relays are in the impulsive state.
pub fn ber_bad_state(snr: &AvgSnrSet, m: u32) -> Result<f64> {
    let relay = ber_relay_bad(snr, m)?;
    let ner = ber_mrc_bad(snr)?;
    let er = ber_error_prop_bad(snr)?;
    Ok(relay * er + (1.0 - relay) * ner)
}

/// Overall destination error probability: rank-N good-state terms weighted
/// by `(1-p_B)p_B^{N-1}` plus the all-bad fallback weighted by `p_B^M`.
pub fn ber_overall(snr: &AvgSnrSet, m: u32, p_b: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = ber_bad_state(snr, m)?;
    state_mixture(m, p_b, |n| ber_nth_good(snr, m, n).map(|p| p.dest), bad)
}

/// Overall error probability at the selected relay under the same state
/// weighting as [`ber_overall`].
pub fn ber_relay_overall(snr: &AvgSnrSet, m: u32, p_b: f64) -> Result<f64> {
    validate_order(m, 1)?;
    validate_p_b(p_b)?;
    let bad = ber_relay_bad(snr, m)?;
    state_mixture(m, p_b, |n| ber_relay_nth(snr, m, n), bad)
}
