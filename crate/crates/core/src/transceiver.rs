//! BPSK relaying chain: source broadcast, relay decode-and-forward,
//! destination combining, and per-epoch error/outage extraction.
//!
//! One simulated frame covers `K` epochs. The source broadcasts each bit to
//! every relay and to the destination; the configured strategy picks one
//! relay per epoch; that relay re-decides the bit coherently (no error
//! detection, so wrong bits propagate) and retransmits it on its own hop.
//! The destination combines the direct and relayed branches with equal-gain
//! noise weighting, which is maximal-ratio combining when both branches see
//! the same noise variance.
//!
//! Outage is an instantaneous-SNR event, evaluated from the true noise
//! states (not the detected ones): the chain is in outage when the selected
//! source hop supports the rate but the combined destination SNR does not,
//! or when the source hop fails and the direct link alone also fails.

use num_complex::Complex64;
use rand::Rng;

use crate::detector::RelayObservation;
use crate::error::Result;
use crate::noise::{ChannelMode, FrameTrace, NoiseState, Topology, TsmgParams};
use crate::selector::{
    EpochInputs, FallbackRule, RankingTable, SelectionDecision, SelectionStrategy,
};

/// Map a bit to its BPSK symbol: 0 ↔ +1, 1 ↔ −1.
#[inline]
pub fn bpsk_map(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

/// Decide a bit from a real combiner metric; a zero metric reads as bit 0.
#[inline]
pub fn bpsk_decide(metric: f64) -> bool {
    metric < 0.0
}

/// Coherent matched-filter bit decision at a relay.
#[inline]
pub fn relay_decode(y: Complex64, h: Complex64) -> bool {
    bpsk_decide((h.conj() * y).re)
}

/// Combined decision metric over the direct and relayed branches. Both
/// branches carry the same noise variance at the destination, so the
/// variance weights cancel and the matched-filter sum is the MRC metric.
#[inline]
pub fn mrc_combine(y_sd: Complex64, h_sd: Complex64, y_rd: Complex64, h_rd: Complex64) -> f64 {
    (h_sd.conj() * y_sd + h_rd.conj() * y_rd).re
}

/// What happened at one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpochOutcome {
    pub relay_bit_error: bool,
    pub dest_bit_error: bool,
    pub outage_event: bool,
    pub decision: SelectionDecision,
}

/// Everything one frame simulation needs besides the RNG.
#[derive(Clone, Copy)]
pub struct FrameParams<'a> {
    pub topo: &'a Topology,
    pub noise: &'a TsmgParams,
    pub strategy: &'a dyn SelectionStrategy,
    pub mode: ChannelMode,
    pub symbols: usize,
    /// Outage threshold 2^(2R) − 1 for target rate R.
    pub phi: f64,
    pub fallback: FallbackRule,
    /// When false the selected relay forwards the true bit, isolating the
    /// combining gain from decode-and-forward error propagation.
    pub error_propagation: bool,
}

/// Simulate one frame end to end.
///
/// Draw order is fixed (trace, then source bits, then any per-epoch strategy
/// randomness), so a seeded RNG reproduces the outcome sequence exactly.
/// Detector failures abort the frame with the underlying error.
pub fn simulate_frame<R: Rng>(params: &FrameParams<'_>, rng: &mut R) -> Result<Vec<EpochOutcome>> {
    let m = params.topo.relays();
    let k_len = params.symbols;
    let trace = FrameTrace::sample(params.noise, params.topo, params.mode, k_len, rng);
    let bits: Vec<bool> = (0..k_len).map(|_| rng.gen::<bool>()).collect();

    let sqrt_ps = params.topo.p_source().sqrt();
    let sqrt_pr = params.topo.p_relay().sqrt();
    let sigma_g2 = params.noise.sigma_g2();
    let rho = params.noise.rho();

    // Received source→relay samples; detectors see whole frames of these.
    let y_sr: Vec<Vec<Complex64>> = (0..m)
        .map(|r| {
            (0..k_len)
                .map(|k| trace.h_sr[r][k] * (sqrt_ps * bpsk_map(bits[k])) + trace.n_sr[r][k])
                .collect()
        })
        .collect();

    let detected: Option<Vec<crate::noise::StateSequence>> = match params.strategy.detector() {
        Some(det) => {
            let mut all = Vec::with_capacity(m);
            for ((y, h), states) in y_sr.iter().zip(&trace.h_sr).zip(&trace.states) {
                let obs = RelayObservation {
                    y,
                    h,
                    p_source: params.topo.p_source(),
                    true_states: states,
                };
                all.push(det.detect(&obs, params.noise)?.states);
            }
            Some(all)
        }
        None => None,
    };

    let mut gamma_sr = vec![0.0f64; m];
    let mut gamma_rd = vec![0.0f64; m];
    let mut states_k = vec![NoiseState::Good; m];
    let mut ranking = RankingTable::default();
    let mut outcomes = Vec::with_capacity(k_len);

    for k in 0..k_len {
        for r in 0..m {
            gamma_sr[r] = params.topo.p_source() * trace.h_sr[r][k].norm_sqr() / sigma_g2;
            gamma_rd[r] = params.topo.p_relay() * trace.h_rd[r][k].norm_sqr() / sigma_g2;
        }
        ranking.rebuild(&gamma_sr, &gamma_rd);
        let detected_k = detected.as_ref().map(|all| {
            for r in 0..m {
                states_k[r] = all[r][k];
            }
            &states_k[..]
        });
        let decision = params.strategy.select(
            &EpochInputs {
                ranking: &ranking,
                detected: detected_k,
                gamma_sr: &gamma_sr,
                gamma_rd: &gamma_rd,
                rho,
                fallback: params.fallback,
            },
            rng,
        )?;
        let sel = decision.relay;

        let relay_bit = relay_decode(y_sr[sel][k], trace.h_sr[sel][k]);
        let relay_bit_error = relay_bit != bits[k];
        let tx_bit = if params.error_propagation {
            relay_bit
        } else {
            bits[k]
        };

        let y_rd = trace.h_rd[sel][k] * (sqrt_pr * bpsk_map(tx_bit)) + trace.n_rd[sel][k];
        let y_sd = trace.h_sd[k] * (sqrt_ps * bpsk_map(bits[k])) + trace.n_sd[k];
        let metric = mrc_combine(y_sd, trace.h_sd[k], y_rd, trace.h_rd[sel][k]);
        let dest_bit_error = bpsk_decide(metric) != bits[k];

        let gamma_sd = params.topo.p_source() * trace.h_sd[k].norm_sqr() / sigma_g2;
        let gamma_sr_true = if trace.states[sel][k].is_bad() {
            gamma_sr[sel] / rho
        } else {
            gamma_sr[sel]
        };
        let outage_event = if gamma_sr_true > params.phi {
            gamma_rd[sel] + gamma_sd < params.phi
        } else {
            gamma_sd < params.phi
        };

        outcomes.push(EpochOutcome {
            relay_bit_error,
            dest_bit_error,
            outage_event,
            decision,
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_cscg_one, sample_fading};
    use crate::selector::strategy_by_name;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frame_params<'a>(
        topo: &'a Topology,
        noise: &'a TsmgParams,
        strategy: &'a dyn SelectionStrategy,
        symbols: usize,
    ) -> FrameParams<'a> {
        FrameParams {
            topo,
            noise,
            strategy,
            mode: ChannelMode::PerSymbol,
            symbols,
            phi: 3.0,
            fallback: FallbackRule::SourceHopOnly,
            error_propagation: true,
        }
    }

    #[test]
    fn bpsk_mapping_and_tie_rule() {
        assert_eq!(bpsk_map(false), 1.0);
        assert_eq!(bpsk_map(true), -1.0);
        assert!(!bpsk_decide(0.7));
        assert!(bpsk_decide(-2.1));
        assert!(!bpsk_decide(0.0));
    }

    #[test]
    fn relay_decode_noiseless() {
        let h = Complex64::new(0.3, -1.1);
        assert!(!relay_decode(h * 2.0, h));
        assert!(relay_decode(h * -2.0, h));
    }

    #[test]
    fn relay_decode_matches_rayleigh_closed_form() {
        // gamma_bar = 10: BER = (1 - sqrt(10/11)) / 2.
        let expected = 0.5 * (1.0 - (10.0f64 / 11.0).sqrt());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mut errors = 0u32;
        for _ in 0..n {
            let h = sample_fading(1.0, 1, &mut rng)[0];
            let noise = sample_cscg_one(0.1, &mut rng);
            let bit = rng.gen::<bool>();
            let y = h * bpsk_map(bit) + noise;
            if relay_decode(y, h) != bit {
                errors += 1;
            }
        }
        let ber = errors as f64 / n as f64;
        let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(
            (ber - expected).abs() <= 3.0 * sigma,
            "ber {ber} vs {expected}"
        );
    }

    #[test]
    fn mrc_noiseless_and_degenerate_branch() {
        let h_sd = Complex64::new(0.4, 0.9);
        let h_rd = Complex64::new(-1.2, 0.3);
        for bit in [false, true] {
            let x = bpsk_map(bit);
            let metric = mrc_combine(h_sd * x, h_sd, h_rd * x, h_rd);
            assert_eq!(bpsk_decide(metric), bit);
        }
        // Zero relayed branch reduces to direct-only detection.
        let x = bpsk_map(true);
        let metric = mrc_combine(
            h_sd * x,
            h_sd,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        assert_eq!(metric, (h_sd.conj() * (h_sd * x)).re);
        // A dominant relayed branch carrying the wrong symbol wins.
        let weak = Complex64::new(0.05, 0.0);
        let strong = Complex64::new(4.0, 0.0);
        let metric = mrc_combine(weak * 1.0, weak, strong * -1.0, strong);
        assert!(bpsk_decide(metric));
    }

    #[test]
    fn noiseless_chain_is_error_free_for_every_protocol() {
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        let noise = TsmgParams::from_stationary(0.01, 100.0, 100.0, 1e-12).unwrap();
        for name in crate::selector::STRATEGY_NAMES {
            let strategy = strategy_by_name(name).unwrap();
            let params = frame_params(&topo, &noise, strategy, 512);
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let outcomes = simulate_frame(&params, &mut rng).unwrap();
            assert_eq!(outcomes.len(), 512);
            for o in &outcomes {
                assert!(!o.relay_bit_error, "{name} relay error");
                assert!(!o.dest_bit_error, "{name} dest error");
                assert!(!o.outage_event, "{name} outage");
            }
        }
    }

    #[test]
    fn identical_seeds_reproduce_outcomes() {
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        let noise = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        for name in ["nth_best_map", "random"] {
            let strategy = strategy_by_name(name).unwrap();
            let params = frame_params(&topo, &noise, strategy, 256);
            let run = |seed: u64| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                simulate_frame(&params, &mut rng).unwrap()
            };
            assert_eq!(run(23), run(23), "{name} not reproducible");
            assert_ne!(run(23), run(24), "{name} ignores the seed");
        }
    }

    #[test]
    fn combining_without_error_propagation_beats_direct_only() {
        // Forced-correct relay bits isolate the diversity gain: the combined
        // BER must sit below the direct link's closed-form BER.
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        let strategy = strategy_by_name("nth_best_genie").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for snr_db in [5.0, 10.0] {
            let sigma_g2 = 10f64.powf(-snr_db / 10.0);
            let noise = TsmgParams::from_stationary(0.01, 100.0, 100.0, sigma_g2).unwrap();
            let mut params = frame_params(&topo, &noise, strategy, 1000);
            params.error_propagation = false;
            let frames = 100;
            let mut errors = 0u64;
            for _ in 0..frames {
                for o in simulate_frame(&params, &mut rng).unwrap() {
                    errors += o.dest_bit_error as u64;
                }
            }
            let n = (frames * 1000) as f64;
            let ber = errors as f64 / n;
            let g_sd = topo.average_snrs(sigma_g2).sd;
            let direct = 0.5 * (1.0 - (g_sd / (1.0 + g_sd)).sqrt());
            let sigma = (direct * (1.0 - direct) / n).sqrt();
            assert!(
                ber <= direct + 3.0 * sigma,
                "{snr_db} dB: combined {ber} vs direct {direct}"
            );
        }
    }

    #[test]
    fn genie_matches_analytic_destination_ber() {
        // Cross-module oracle at 15 dB, reference parameter set.
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        let sigma_g2 = 10f64.powf(-1.5);
        let noise = TsmgParams::from_stationary(0.01, 100.0, 100.0, sigma_g2).unwrap();
        let strategy = strategy_by_name("nth_best_genie").unwrap();
        let params = frame_params(&topo, &noise, strategy, 1000);
        let snr =
            crate::analytic::AvgSnrSet::from_links(topo.average_snrs(sigma_g2), 100.0).unwrap();
        let analytic = crate::analytic::ber_overall(&snr, 5, 0.01).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let frames = 2000;
        let mut errors = 0u64;
        for _ in 0..frames {
            for o in simulate_frame(&params, &mut rng).unwrap() {
                errors += o.dest_bit_error as u64;
            }
        }
        let n = (frames * 1000) as f64;
        let ber = errors as f64 / n;
        let sigma = (analytic * (1.0 - analytic) / n).sqrt();
        assert!(
            (ber - analytic).abs() <= 3.0 * sigma,
            "mc {ber} vs analytic {analytic} (sigma {sigma})"
        );
    }

    #[test]
    fn genie_matches_analytic_outage() {
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        let sigma_g2 = 10f64.powf(-1.0);
        let noise = TsmgParams::from_stationary(0.01, 100.0, 100.0, sigma_g2).unwrap();
        let strategy = strategy_by_name("nth_best_genie").unwrap();
        let params = frame_params(&topo, &noise, strategy, 1000);
        let snr =
            crate::analytic::AvgSnrSet::from_links(topo.average_snrs(sigma_g2), 100.0).unwrap();
        let analytic = crate::analytic::outage_overall(&snr, 5, 0.01, 3.0).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let frames = 2000;
        let mut events = 0u64;
        for _ in 0..frames {
            for o in simulate_frame(&params, &mut rng).unwrap() {
                events += o.outage_event as u64;
            }
        }
        let n = (frames * 1000) as f64;
        let p_out = events as f64 / n;
        let sigma = (analytic * (1.0 - analytic) / n).sqrt();
        assert!(
            (p_out - analytic).abs() <= 3.0 * sigma,
            "mc {p_out} vs analytic {analytic} (sigma {sigma})"
        );
    }
}
