//! Seeded Monte Carlo sweeps over an SNR grid.
//!
//! Each (grid point, frame) pair owns a dedicated RNG stream derived from
//! the master seed, so results are identical no matter how frames are
//! scheduled across workers: parallelism only changes who computes a frame,
//! never what it computes. Counts are reduced with commutative integer
//! sums and estimates are derived from the totals afterwards.
//!
//! The sweep axis is the normalized SNR: a grid point at `s` dB sets the
//! quiet-state noise variance to `10^(-s/10)` under unit transmit powers,
//! and the per-link average SNRs then follow from the topology's path-loss
//! factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, asymptotic, AvgSnrSet};
use crate::error::{Error, Result};
use crate::noise::{ChannelMode, Topology, TsmgParams};
use crate::selector::{strategy_by_name, FallbackRule};
use crate::transceiver::{simulate_frame, FrameParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fraction of failed frames (detector degeneracy) above which a sweep
/// point aborts instead of reporting a silently thinned estimate.
pub const FRAME_FAILURE_ABORT_RATE: f64 = 1e-3;

/// Full description of one sweep: topology, noise, protocol, and budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Number of relays M.
    pub relays: usize,
    /// Source→destination distance (the unit scale).
    pub lambda_sd: f64,
    /// Source→relay distance.
    pub lambda_sr: f64,
    /// Relay→destination distance; None places the relays on the line
    /// between source and destination.
    pub lambda_rd: Option<f64>,
    /// Path-loss exponent.
    pub eta: f64,
    /// Stationary impulsive-state occupancy.
    pub p_b: f64,
    /// Noise memory (mean decorrelation length in epochs).
    pub mu: f64,
    /// Impulsive-to-quiet variance ratio.
    pub rho: f64,
    /// Selection protocol registry name.
    pub protocol: String,
    /// Symbols per frame.
    pub symbols: usize,
    /// Frames per grid point.
    pub frames: u64,
    /// SNR grid in dB, strictly increasing.
    pub snr_db: Vec<f64>,
    /// Target rate R; the outage threshold is 2^(2R) − 1.
    pub rate: f64,
    /// Master seed; every (point, frame) stream derives from it.
    pub seed: u64,
    pub mode: ChannelMode,
    pub fallback: FallbackRule,
    /// False forces the relay to forward correct bits (diagnostic mode).
    pub error_propagation: bool,
}

impl Default for SimulationConfig {
    /// Reference parameter set: five relays at 0.4 of the unit span,
    /// path-loss exponent 2, 1% impulsive occupancy with memory 100 and
    /// variance ratio 100, rate 1, and a desk-scale sample budget.
    fn default() -> Self {
        SimulationConfig {
            relays: 5,
            lambda_sd: 1.0,
            lambda_sr: 0.4,
            lambda_rd: None,
            eta: 2.0,
            p_b: 0.01,
            mu: 100.0,
            rho: 100.0,
            protocol: "nth_best_genie".to_string(),
            symbols: 1_000,
            frames: 20_000,
            snr_db: (0..=8).map(|i| 5.0 * i as f64).collect(),
            rate: 1.0,
            seed: 0x52454c4159,
            mode: ChannelMode::PerSymbol,
            fallback: FallbackRule::SourceHopOnly,
            error_propagation: true,
        }
    }
}

impl SimulationConfig {
    /// Check everything the constructors downstream do not already check.
    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("frames", "must be at least 1"));
        }
        if self.symbols == 0 {
            return Err(Error::invalid("symbols", "must be at least 1"));
        }
        if self.snr_db.is_empty() {
            return Err(Error::EmptyInput("snr_db grid"));
        }
        if !self.snr_db.iter().all(|s| s.is_finite()) {
            return Err(Error::invalid("snr_db", "grid contains a non-finite value"));
        }
        if self.snr_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("snr_db", "grid must be strictly increasing"));
        }
        strategy_by_name(&self.protocol)?;
        analytic::threshold_phi(self.rate)?;
        self.topology()?;
        // Transition probabilities must be feasible for the given memory.
        TsmgParams::from_stationary(self.p_b, self.mu, self.rho, 1.0)?;
        Ok(())
    }

    pub fn topology(&self) -> Result<Topology> {
        Topology::new(
            self.relays,
            self.lambda_sd,
            self.lambda_sr,
            self.lambda_rd,
            self.eta,
        )
    }
}

/// One sweep point's estimates, intervals, and analytic references.
///
/// Analytic columns hold the state-aware selection's closed forms; for the
/// state-blind protocols (conventional, random) no closed form is in scope
/// and the columns are NaN.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub snr_db: f64,
    pub protocol: String,
    pub ber_relay: f64,
    pub ber_relay_ci: f64,
    pub ber_dest: f64,
    pub ber_dest_ci: f64,
    pub p_out: f64,
    pub p_out_ci: f64,
    pub analytic_ber: f64,
    pub analytic_pout: f64,
    pub asym_ber: f64,
    pub asym_pout: f64,
    pub frames: u64,
    pub symbols_per_frame: u64,
    pub seed: u64,
}

/// Binomial point estimate with a 95% normal-approximation half-width; an
/// empty (or full) count falls back to the rule-of-three bound.
pub fn estimate_with_ci(errors: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "estimate over zero trials");
    assert!(errors <= trials);
    let n = trials as f64;
    let p = errors as f64 / n;
    let ci = if errors == 0 || errors == trials {
        3.0 / n
    } else {
        1.96 * (p * (1.0 - p) / n).sqrt()
    };
    (p, ci)
}

/// Negated least-squares slope of log10(value) against snr_db/10 over the
/// window (inclusive); the diversity order of a clean power law.
pub fn fit_diversity_slope(points: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let selected: Vec<(f64, f64)> = points
        .iter()
        .filter(|(db, v)| *db >= window.0 && *db <= window.1 && *v > 0.0 && v.is_finite())
        .map(|&(db, v)| (db / 10.0, v.log10()))
        .collect();
    if selected.len() < 2 {
        return Err(Error::invalid(
            "window",
            format!(
                "need at least 2 positive points in [{}, {}] dB, found {}",
                window.0,
                window.1,
                selected.len()
            ),
        ));
    }
    let n = selected.len() as f64;
    let mean_x = selected.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = selected.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &selected {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    Ok(-(sxy / sxx))
}

#[derive(Clone, Copy, Default)]
struct Counts {
    relay_errors: u64,
    dest_errors: u64,
    outages: u64,
    epochs: u64,
    failed_frames: u64,
}

impl Counts {
    fn merge(self, other: Counts) -> Counts {
        Counts {
            relay_errors: self.relay_errors + other.relay_errors,
            dest_errors: self.dest_errors + other.dest_errors,
            outages: self.outages + other.outages,
            epochs: self.epochs + other.epochs,
            failed_frames: self.failed_frames + other.failed_frames,
        }
    }
}

/// Per-frame RNG: one ChaCha stream per (grid point, frame) pair, all from
/// the master seed. Stream ids never collide below 2^40 frames per point.
fn frame_rng(seed: u64, point: usize, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) | frame);
    rng
}

fn check_failures(failed: u64, total: u64) -> Result<()> {
    let rate = failed as f64 / total as f64;
    if rate > FRAME_FAILURE_ABORT_RATE {
        return Err(Error::ExcessiveFrameFailures {
            failed,
            total,
            rate,
            threshold: FRAME_FAILURE_ABORT_RATE,
        });
    }
    Ok(())
}

/// Run the full sweep described by `config` on the current rayon pool.
///
/// Deterministic for a fixed config: the same records come back under any
/// worker count. Detector-degenerate frames are skipped and counted; a
/// point aborts when they exceed [`FRAME_FAILURE_ABORT_RATE`].
pub fn run_sweep(config: &SimulationConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let topo = config.topology()?;
    let strategy = strategy_by_name(&config.protocol)?;
    let phi = analytic::threshold_phi(config.rate)?;
    let state_aware = strategy.detector().is_some();
    let m = config.relays as u32;

    let mut records = Vec::with_capacity(config.snr_db.len());
    for (point, &snr_db) in config.snr_db.iter().enumerate() {
        let sigma_g2 = 10f64.powf(-snr_db / 10.0);
        let noise = TsmgParams::from_stationary(config.p_b, config.mu, config.rho, sigma_g2)?;
        let params = FrameParams {
            topo: &topo,
            noise: &noise,
            strategy,
            mode: config.mode,
            symbols: config.symbols,
            phi,
            fallback: config.fallback,
            error_propagation: config.error_propagation,
        };

        let totals = (0..config.frames)
            .into_par_iter()
            .map(|frame| {
                let mut rng = frame_rng(config.seed, point, frame);
                match simulate_frame(&params, &mut rng) {
                    Ok(outcomes) => {
                        let mut c = Counts {
                            epochs: outcomes.len() as u64,
                            ..Counts::default()
                        };
                        for o in &outcomes {
                            c.relay_errors += o.relay_bit_error as u64;
                            c.dest_errors += o.dest_bit_error as u64;
                            c.outages += o.outage_event as u64;
                        }
                        c
                    }
                    Err(_) => Counts {
                        failed_frames: 1,
                        ..Counts::default()
                    },
                }
            })
            .reduce(Counts::default, Counts::merge);

        check_failures(totals.failed_frames, config.frames)?;
        let (ber_relay, ber_relay_ci) = estimate_with_ci(totals.relay_errors, totals.epochs);
        let (ber_dest, ber_dest_ci) = estimate_with_ci(totals.dest_errors, totals.epochs);
        let (p_out, p_out_ci) = estimate_with_ci(totals.outages, totals.epochs);

        let snr = AvgSnrSet::from_links(topo.average_snrs(sigma_g2), config.rho)?;
        let (analytic_ber, analytic_pout, asym_ber, asym_pout) = if state_aware {
            (
                analytic::ber_overall(&snr, m, config.p_b)?,
                analytic::outage_overall(&snr, m, config.p_b, phi)?,
                asymptotic::ber_overall(&snr, m, config.p_b)?,
                asymptotic::outage_overall(&snr, m, config.p_b, phi)?,
            )
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };

        records.push(SweepRecord {
            snr_db,
            protocol: config.protocol.clone(),
            ber_relay,
            ber_relay_ci,
            ber_dest,
            ber_dest_ci,
            p_out,
            p_out_ci,
            analytic_ber,
            analytic_pout,
            asym_ber,
            asym_pout,
            frames: config.frames,
            symbols_per_frame: config.symbols as u64,
            seed: config.seed,
        });
    }
    Ok(records)
}

/// Analytic-only curves on the same record schema: Monte Carlo columns are
/// NaN, reference columns are filled. Valid only for state-aware protocols.
pub fn analytic_curves(config: &SimulationConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let topo = config.topology()?;
    let strategy = strategy_by_name(&config.protocol)?;
    if strategy.detector().is_none() {
        return Err(Error::invalid(
            "protocol",
            format!(
                "`{}` has no closed-form reference; use a state-aware protocol",
                config.protocol
            ),
        ));
    }
    let phi = analytic::threshold_phi(config.rate)?;
    let m = config.relays as u32;
    let mut records = Vec::with_capacity(config.snr_db.len());
    for &snr_db in &config.snr_db {
        let sigma_g2 = 10f64.powf(-snr_db / 10.0);
        let snr = AvgSnrSet::from_links(topo.average_snrs(sigma_g2), config.rho)?;
        records.push(SweepRecord {
            snr_db,
            protocol: config.protocol.clone(),
            ber_relay: f64::NAN,
            ber_relay_ci: f64::NAN,
            ber_dest: f64::NAN,
            ber_dest_ci: f64::NAN,
            p_out: f64::NAN,
            p_out_ci: f64::NAN,
            analytic_ber: analytic::ber_overall(&snr, m, config.p_b)?,
            analytic_pout: analytic::outage_overall(&snr, m, config.p_b, phi)?,
            asym_ber: asymptotic::ber_overall(&snr, m, config.p_b)?,
            asym_pout: asymptotic::outage_overall(&snr, m, config.p_b, phi)?,
            frames: 0,
            symbols_per_frame: 0,
            seed: config.seed,
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn small_config() -> SimulationConfig {
        SimulationConfig {
            frames: 50,
            symbols: 100,
            snr_db: vec![5.0, 10.0],
            ..SimulationConfig::default()
        }
    }

    #[test]
    fn estimate_examples() {
        let (p, ci) = estimate_with_ci(0, 1000);
        assert_eq!(p, 0.0);
        assert_abs_diff_eq!(ci, 0.003, epsilon = 1e-15);
        let (p, ci) = estimate_with_ci(500, 1000);
        assert_eq!(p, 0.5);
        assert_relative_eq!(ci, 1.96 * (0.25f64 / 1000.0).sqrt(), epsilon = 1e-12);
        let (p, ci) = estimate_with_ci(10, 1_000_000);
        assert_relative_eq!(p, 1e-5, epsilon = 1e-18);
        assert_relative_eq!(ci, 6.19793e-6, max_relative = 1e-4);
        let (_, ci_full) = estimate_with_ci(1000, 1000);
        assert_abs_diff_eq!(ci_full, 0.003, epsilon = 1e-15);
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let ok = small_config();
        ok.validate().unwrap();
        type Patch = fn(&mut SimulationConfig);
        let cases: [(Patch, &str); 8] = [
            (|c| c.frames = 0, "frames"),
            (|c| c.symbols = 0, "symbols"),
            (|c| c.snr_db.clear(), "grid"),
            (|c| c.snr_db = vec![10.0, 10.0], "non-increasing"),
            (|c| c.protocol = "psychic".to_string(), "protocol"),
            (|c| c.rate = 0.0, "rate"),
            (|c| c.p_b = 1.0, "p_b"),
            (|c| c.mu = 0.4, "infeasible memory"),
        ];
        for (patch, name) in cases {
            let mut bad = small_config();
            patch(&mut bad);
            assert!(bad.validate().is_err(), "{name} accepted");
        }
    }

    #[test]
    fn slope_fit_recovers_power_laws() {
        let points: Vec<(f64, f64)> = (0..6)
            .map(|i| {
                let db = 30.0 + 2.0 * i as f64;
                let gamma = 10f64.powf(db / 10.0);
                (db, 2.5 * gamma.powi(-6))
            })
            .collect();
        let slope = fit_diversity_slope(&points, (30.0, 40.0)).unwrap();
        assert_abs_diff_eq!(slope, 6.0, epsilon = 1e-9);
        assert!(fit_diversity_slope(&points, (50.0, 60.0)).is_err());
        assert!(fit_diversity_slope(&points[..1], (28.0, 31.0)).is_err());
    }

    #[test]
    fn slope_of_asymptotic_outage_is_the_diversity_order() {
        let topo = Topology::new(5, 1.0, 0.4, None, 2.0).unwrap();
        for (n, want) in [(1u32, 6.0), (3, 4.0)] {
            let points: Vec<(f64, f64)> = [35.0, 37.5, 40.0]
                .iter()
                .map(|&db| {
                    let snr =
                        AvgSnrSet::from_links(topo.average_snrs(10f64.powf(-db / 10.0)), 100.0)
                            .unwrap();
                    (db, asymptotic::outage_nth_good(&snr, 5, n, 3.0).unwrap())
                })
                .collect();
            let slope = fit_diversity_slope(&points, (35.0, 40.0)).unwrap();
            assert_abs_diff_eq!(slope, want, epsilon = 0.05);
        }
    }

    #[test]
    fn sweep_is_deterministic_across_worker_counts() {
        let config = small_config();
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| run_sweep(&config).unwrap())
        };
        let one = run_with(1);
        let eight = run_with(8);
        assert_eq!(one, eight);
    }

    #[test]
    fn sweep_counts_and_ranges_are_consistent() {
        let config = small_config();
        let records = run_sweep(&config).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert_eq!(r.frames, 50);
            assert_eq!(r.symbols_per_frame, 100);
            for v in [r.ber_relay, r.ber_dest, r.p_out] {
                assert!((0.0..=1.0).contains(&v));
            }
            for ci in [r.ber_relay_ci, r.ber_dest_ci, r.p_out_ci] {
                assert!(ci > 0.0 && ci <= 1.0);
            }
            assert!(r.analytic_ber.is_finite() && r.analytic_pout.is_finite());
        }
        // Higher SNR does not increase the destination BER materially.
        assert!(records[1].ber_dest <= records[0].ber_dest + records[0].ber_dest_ci);
    }

    #[test]
    fn ci_follows_inverse_root_n() {
        // Low SNR so the error count is large and the normal-approximation
        // branch (not the rule-of-three bound) is exercised.
        let mut config = small_config();
        config.snr_db = vec![0.0];
        config.frames = 100;
        let base = run_sweep(&config).unwrap()[0].clone();
        config.frames = 400;
        let bigger = run_sweep(&config).unwrap()[0].clone();
        let ratio = bigger.ber_dest_ci / base.ber_dest_ci;
        assert!((ratio - 0.5).abs() < 0.05, "ci ratio {ratio}");
    }

    #[test]
    fn analytic_columns_are_nan_for_state_blind_protocols() {
        let mut config = small_config();
        config.protocol = "conventional".to_string();
        let records = run_sweep(&config).unwrap();
        for r in &records {
            assert!(r.analytic_ber.is_nan());
            assert!(r.asym_pout.is_nan());
            assert!(r.ber_dest.is_finite());
        }
        assert!(analytic_curves(&config).is_err());
        config.protocol = "nth_best_map".to_string();
        let curves = analytic_curves(&config).unwrap();
        for c in &curves {
            assert!(c.ber_dest.is_nan());
            assert!(c.analytic_ber.is_finite());
            assert_eq!(c.frames, 0);
        }
    }

    #[test]
    fn failure_accounting_thresholds() {
        assert!(check_failures(0, 1000).is_ok());
        assert!(check_failures(1, 1000).is_ok());
        assert!(matches!(
            check_failures(2, 1000),
            Err(Error::ExcessiveFrameFailures { .. })
        ));
    }

    #[test]
    fn frame_rng_streams_are_distinct_and_stable() {
        use rand::RngCore;
        let mut a = frame_rng(9, 0, 0);
        let mut b = frame_rng(9, 0, 1);
        let mut c = frame_rng(9, 1, 0);
        let mut a2 = frame_rng(9, 0, 0);
        let da: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        assert_eq!(da, (0..4).map(|_| a2.next_u64()).collect::<Vec<_>>());
        assert_ne!(da, (0..4).map(|_| b.next_u64()).collect::<Vec<_>>());
        assert_ne!(da[0], c.next_u64());
    }
}
