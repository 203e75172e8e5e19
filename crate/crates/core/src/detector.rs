//! Noise-state detection on one source→relay link.
//!
//! Each relay observes one frame of matched-filter samples and must decide,
//! per epoch, whether its link noise sat in the quiet state or the impulsive
//! one. Three detectors share the [`StateDetector`] trait:
//!
//! * genie: reads the true state trajectory (performance bound),
//! * map: forward-backward smoothing over the two-state trellis, exploiting
//!   the state memory,
//! * memoryless: per-sample likelihood-ratio test against the stationary
//!   prior, ignoring memory.
//!
//! Both estimators marginalize the unknown equiprobable BPSK symbol out of
//! the emission density, and both renormalize every recursion step: raw
//! products of thousands of densities underflow long before a frame ends.
//! Emission rows are rescaled by their per-epoch maximum exponent, so a
//! vanishing joint likelihood is a genuine model contradiction and is
//! reported as a numerical-degeneracy error rather than a NaN.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::noise::{FrameTrace, NoiseState, StateSequence, TsmgParams};

/// Which detector produced a state estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    Genie,
    Map,
    Memoryless,
}

impl DetectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DetectorKind::Genie => "genie",
            DetectorKind::Map => "map",
            DetectorKind::Memoryless => "memoryless",
        }
    }
}

impl std::fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-epoch hard state decisions for one relay's frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetectedStates {
    pub states: StateSequence,
    pub source: DetectorKind,
}

/// Smoothed per-epoch state inference over one frame.
///
/// `alpha[k]` is the scaled forward (predictive) metric, initialized with
/// the stationary distribution; `beta[k]` the scaled backward metric with
/// the one-past-the-end row implicitly all ones. `posterior[k]` sums to one
/// at every epoch and `llr[k] = ln(posterior_G / posterior_B)`, which may be
/// infinite when an emission underflows to zero in exactly one state.
#[derive(Clone, Debug)]
pub struct TrellisPosteriors {
    pub alpha: Vec<[f64; 2]>,
    pub beta: Vec<[f64; 2]>,
    pub llr: Vec<f64>,
    pub posterior: Vec<[f64; 2]>,
}

impl TrellisPosteriors {
    pub fn len(&self) -> usize {
        self.llr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llr.is_empty()
    }

    /// Hard decisions per the sign rule; ties go to Good.
    pub fn hard_decisions(&self) -> Result<StateSequence> {
        let mut states = Vec::with_capacity(self.llr.len());
        for &l in &self.llr {
            states.push(llr_to_state(l)?);
        }
        Ok(StateSequence(states))
    }
}

/// Everything a detector may consult about one relay's frame: the received
/// samples, the link gains, the source power, and (for the genie only) the
/// true state trajectory.
#[derive(Clone, Copy, Debug)]
pub struct RelayObservation<'a> {
    pub y: &'a [Complex64],
    pub h: &'a [Complex64],
    pub p_source: f64,
    pub true_states: &'a StateSequence,
}

/// Hard decision on one log-likelihood ratio: Good wins ties.
pub fn llr_to_state(llr: f64) -> Result<NoiseState> {
    if llr.is_nan() {
        return Err(Error::NumericalDegeneracy {
            context: "state decision",
            reason: "NaN log-likelihood ratio".to_string(),
        });
    }
    Ok(if llr >= 0.0 {
        NoiseState::Good
    } else {
        NoiseState::Bad
    })
}

fn validate_frame(y: &[Complex64], h: &[Complex64], p_source: f64) -> Result<()> {
    if y.is_empty() {
        return Err(Error::EmptyInput("observation frame"));
    }
    if y.len() != h.len() {
        return Err(Error::invalid(
            "h",
            format!("gain length {} != observation length {}", h.len(), y.len()),
        ));
    }
    if p_source <= 0.0 || !p_source.is_finite() {
        return Err(Error::invalid(
            "p_source",
            format!("{p_source} is not a positive finite power"),
        ));
    }
    Ok(())
}

/// Symbol-marginalized emission weights for one epoch, one row per state,
/// rescaled so the largest exponent maps to 1. The common rescaling cancels
/// in every normalized recursion; a row may underflow to exactly zero only
/// when that state is astronomically worse at explaining the sample.
fn scaled_emissions(
    y: Complex64,
    h: Complex64,
    sqrt_p: f64,
    variances: [f64; 2],
) -> Result<[f64; 2]> {
    let image = h * sqrt_p;
    let d = [(y - image).norm_sqr(), (y + image).norm_sqr()];
    let mut exponents = [[0.0f64; 2]; 2];
    let mut top = f64::NEG_INFINITY;
    for (s, &var) in variances.iter().enumerate() {
        let log_norm = (std::f64::consts::PI * var).ln();
        for (x, &dist) in d.iter().enumerate() {
            let e = -dist / var - log_norm;
            exponents[s][x] = e;
            top = top.max(e);
        }
    }
    if !top.is_finite() {
        return Err(Error::NumericalDegeneracy {
            context: "emission density",
            reason: "non-finite sample, gain, or variance".to_string(),
        });
    }
    Ok([
        0.5 * ((exponents[0][0] - top).exp() + (exponents[0][1] - top).exp()),
        0.5 * ((exponents[1][0] - top).exp() + (exponents[1][1] - top).exp()),
    ])
}

fn degenerate(context: &'static str, epoch: usize) -> Error {
    Error::NumericalDegeneracy {
        context,
        reason: format!("joint state likelihood vanished at epoch {epoch}"),
    }
}

fn normalized(row: [f64; 2], context: &'static str, epoch: usize) -> Result<[f64; 2]> {
    let norm = row[0] + row[1];
    if norm <= 0.0 || !norm.is_finite() {
        return Err(degenerate(context, epoch));
    }
    Ok([row[0] / norm, row[1] / norm])
}

/// Forward-backward state smoothing over the whole frame.
///
/// `alpha[k]` carries the observations before epoch `k` and `beta[k]` the
/// observations from `k` on, so their product is proportional to the
/// per-epoch posterior given the complete frame.
pub fn map_posteriors(
    y: &[Complex64],
    h: &[Complex64],
    p_source: f64,
    params: &TsmgParams,
) -> Result<TrellisPosteriors> {
    validate_frame(y, h, p_source)?;
    let len = y.len();
    let sqrt_p = p_source.sqrt();
    let variances = [params.sigma_g2(), params.sigma_b2()];
    let t = params.transition_matrix();

    let mut emit = Vec::with_capacity(len);
    for k in 0..len {
        emit.push(scaled_emissions(y[k], h[k], sqrt_p, variances)?);
    }

    let mut alpha = vec![[0.0f64; 2]; len];
    alpha[0] = params.stationary();
    for k in 1..len {
        let prev = alpha[k - 1];
        let e = emit[k - 1];
        let weighted = [prev[0] * e[0], prev[1] * e[1]];
        let next = [
            weighted[0] * t[0][0] + weighted[1] * t[1][0],
            weighted[0] * t[0][1] + weighted[1] * t[1][1],
        ];
        alpha[k] = normalized(next, "forward recursion", k)?;
    }

    let mut beta = vec![[0.0f64; 2]; len];
    beta[len - 1] = normalized(emit[len - 1], "backward recursion", len - 1)?;
    for k in (0..len - 1).rev() {
        let next = beta[k + 1];
        let e = emit[k];
        let row = [
            e[0] * (t[0][0] * next[0] + t[0][1] * next[1]),
            e[1] * (t[1][0] * next[0] + t[1][1] * next[1]),
        ];
        beta[k] = normalized(row, "backward recursion", k)?;
    }

    let mut posterior = Vec::with_capacity(len);
    let mut llr = Vec::with_capacity(len);
    for k in 0..len {
        let p = normalized(
            [alpha[k][0] * beta[k][0], alpha[k][1] * beta[k][1]],
            "posterior combination",
            k,
        )?;
        posterior.push(p);
        llr.push(p[0].ln() - p[1].ln());
    }

    Ok(TrellisPosteriors {
        alpha,
        beta,
        llr,
        posterior,
    })
}

/// Per-sample likelihood-ratio test against the stationary prior; epochs are
/// treated independently, so this is the memory-blind baseline.
pub fn memoryless_posteriors(
    y: &[Complex64],
    h: &[Complex64],
    p_source: f64,
    params: &TsmgParams,
) -> Result<TrellisPosteriors> {
    validate_frame(y, h, p_source)?;
    let len = y.len();
    let sqrt_p = p_source.sqrt();
    let variances = [params.sigma_g2(), params.sigma_b2()];
    let pi = params.stationary();

    let mut alpha = Vec::with_capacity(len);
    let mut beta = Vec::with_capacity(len);
    let mut posterior = Vec::with_capacity(len);
    let mut llr = Vec::with_capacity(len);
    for k in 0..len {
        let e = scaled_emissions(y[k], h[k], sqrt_p, variances)?;
        let p = normalized([pi[0] * e[0], pi[1] * e[1]], "posterior combination", k)?;
        alpha.push(pi);
        beta.push(normalized(e, "posterior combination", k)?);
        posterior.push(p);
        llr.push(p[0].ln() - p[1].ln());
    }

    Ok(TrellisPosteriors {
        alpha,
        beta,
        llr,
        posterior,
    })
}

/// True state trajectory of one relay, verbatim.
pub fn genie_states(trace: &FrameTrace, relay: usize) -> DetectedStates {
    DetectedStates {
        states: trace.states[relay].clone(),
        source: DetectorKind::Genie,
    }
}

/// Common interface over the three detectors; the engine holds these as
/// trait objects chosen by protocol name.
pub trait StateDetector: Send + Sync {
    fn kind(&self) -> DetectorKind;

    fn detect(&self, obs: &RelayObservation<'_>, params: &TsmgParams) -> Result<DetectedStates>;
}

pub struct GenieDetector;

impl StateDetector for GenieDetector {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Genie
    }

    fn detect(&self, obs: &RelayObservation<'_>, _params: &TsmgParams) -> Result<DetectedStates> {
        Ok(DetectedStates {
            states: obs.true_states.clone(),
            source: DetectorKind::Genie,
        })
    }
}

pub struct MapDetector;

impl StateDetector for MapDetector {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Map
    }

    fn detect(&self, obs: &RelayObservation<'_>, params: &TsmgParams) -> Result<DetectedStates> {
        let post = map_posteriors(obs.y, obs.h, obs.p_source, params)?;
        Ok(DetectedStates {
            states: post.hard_decisions()?,
            source: DetectorKind::Map,
        })
    }
}

pub struct MemorylessDetector;

impl StateDetector for MemorylessDetector {
    fn kind(&self) -> DetectorKind {
        DetectorKind::Memoryless
    }

    fn detect(&self, obs: &RelayObservation<'_>, params: &TsmgParams) -> Result<DetectedStates> {
        let post = memoryless_posteriors(obs.y, obs.h, obs.p_source, params)?;
        Ok(DetectedStates {
            states: post.hard_decisions()?,
            source: DetectorKind::Memoryless,
        })
    }
}

pub const DETECTOR_NAMES: [&str; 3] = ["genie", "map", "memoryless"];

/// Look up a detector by its registry name.
pub fn detector_by_name(name: &str) -> Result<&'static dyn StateDetector> {
    static GENIE: GenieDetector = GenieDetector;
    static MAP: MapDetector = MapDetector;
    static MEMORYLESS: MemorylessDetector = MemorylessDetector;
    match name {
        "genie" => Ok(&GENIE),
        "map" => Ok(&MAP),
        "memoryless" => Ok(&MEMORYLESS),
        _ => Err(Error::UnknownStrategy {
            name: name.to_string(),
            available: DETECTOR_NAMES.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{sample_fading, sample_state_sequence, sample_tsmg_noise};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn synth_frame(
        params: &TsmgParams,
        len: usize,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<Complex64>, Vec<Complex64>, StateSequence) {
        let states = sample_state_sequence(params, len, rng);
        let h = sample_fading(1.0, len, rng);
        let noise = sample_tsmg_noise(params, &states, rng);
        let y: Vec<Complex64> = (0..len)
            .map(|k| {
                let x = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                h[k] * x + noise[k]
            })
            .collect();
        (y, h, states)
    }

    fn error_rate(detected: &StateSequence, truth: &StateSequence) -> f64 {
        let errs = detected
            .as_slice()
            .iter()
            .zip(truth.as_slice())
            .filter(|(a, b)| a != b)
            .count();
        errs as f64 / truth.len() as f64
    }

    #[test]
    fn llr_decision_rule() {
        assert_eq!(llr_to_state(0.0).unwrap(), NoiseState::Good);
        assert_eq!(llr_to_state(3.2).unwrap(), NoiseState::Good);
        assert_eq!(llr_to_state(-0.001).unwrap(), NoiseState::Bad);
        assert_eq!(llr_to_state(f64::INFINITY).unwrap(), NoiseState::Good);
        assert_eq!(llr_to_state(f64::NEG_INFINITY).unwrap(), NoiseState::Bad);
        assert!(llr_to_state(f64::NAN).is_err());
    }

    #[test]
    fn genie_is_identity() {
        let params = TsmgParams::from_stationary(0.1, 10.0, 100.0, 0.5).unwrap();
        let topo = crate::noise::Topology::new(3, 1.0, 0.4, None, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trace = FrameTrace::sample(
            &params,
            &topo,
            crate::noise::ChannelMode::PerSymbol,
            64,
            &mut rng,
        );
        for m in 0..3 {
            let out = genie_states(&trace, m);
            assert_eq!(out.states, trace.states[m]);
            assert_eq!(out.source, DetectorKind::Genie);
        }
    }

    #[test]
    fn single_epoch_map_equals_memoryless() {
        let params = TsmgParams::from_stationary(0.05, 20.0, 50.0, 0.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (y, h, _) = synth_frame(&params, 1, &mut rng);
            let map = map_posteriors(&y, &h, 1.0, &params).unwrap();
            let mem = memoryless_posteriors(&y, &h, 1.0, &params).unwrap();
            assert_relative_eq!(map.llr[0], mem.llr[0], max_relative = 1e-12);
            for s in 0..2 {
                assert_abs_diff_eq!(map.posterior[0][s], mem.posterior[0][s], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn memoryless_chain_collapses_map_to_memoryless() {
        // mu = 1 makes transitions equal to the stationary law, so smoothing
        // gains nothing and the two detectors agree sample by sample.
        let params = TsmgParams::from_stationary(0.01, 1.0, 100.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (y, h, _) = synth_frame(&params, 500, &mut rng);
        let map = map_posteriors(&y, &h, 1.0, &params).unwrap();
        let mem = memoryless_posteriors(&y, &h, 1.0, &params).unwrap();
        for k in 0..500 {
            let diff = (map.llr[k] - mem.llr[k]).abs();
            assert!(
                diff <= 1e-9 || (map.llr[k].is_infinite() && map.llr[k] == mem.llr[k]),
                "llr mismatch at {k}: {} vs {}",
                map.llr[k],
                mem.llr[k]
            );
        }
        assert_eq!(map.hard_decisions().unwrap(), mem.hard_decisions().unwrap());
    }

    #[test]
    fn equal_variances_leave_the_prior() {
        // rho = 1: the observation carries no state information, so every
        // posterior equals the stationary distribution.
        let params = TsmgParams::from_stationary(0.3, 7.0, 1.0, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let (y, h, _) = synth_frame(&params, 200, &mut rng);
        let pi = params.stationary();
        for post in [
            map_posteriors(&y, &h, 1.0, &params).unwrap(),
            memoryless_posteriors(&y, &h, 1.0, &params).unwrap(),
        ] {
            for k in 0..200 {
                assert_abs_diff_eq!(post.posterior[k][0], pi[0], epsilon = 1e-12);
                assert_abs_diff_eq!(post.posterior[k][1], pi[1], epsilon = 1e-12);
            }
            let states = post.hard_decisions().unwrap();
            let expect = if (pi[0] / pi[1]).ln() >= 0.0 {
                NoiseState::Good
            } else {
                NoiseState::Bad
            };
            assert!(states.as_slice().iter().all(|&s| s == expect));
        }
    }

    #[test]
    fn posteriors_normalize_everywhere() {
        let params = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let (y, h, _) = synth_frame(&params, 1000, &mut rng);
        for post in [
            map_posteriors(&y, &h, 1.0, &params).unwrap(),
            memoryless_posteriors(&y, &h, 1.0, &params).unwrap(),
        ] {
            for k in 0..1000 {
                assert_abs_diff_eq!(
                    post.posterior[k][0] + post.posterior[k][1],
                    1.0,
                    epsilon = 1e-9
                );
                if post.posterior[k][0] > 0.0 && post.posterior[k][1] > 0.0 {
                    assert_relative_eq!(
                        post.llr[k],
                        (post.posterior[k][0] / post.posterior[k][1]).ln(),
                        max_relative = 1e-9,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn scaled_recursions_match_unnormalized_reference() {
        // Short frame with mild variances: the raw product-form recursions
        // stay in range, giving an exact reference for the scaled ones. The
        // raw alpha.beta product is the frame likelihood at every epoch.
        let params = TsmgParams::from_stationary(0.2, 5.0, 4.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let (y, h, _) = synth_frame(&params, 24, &mut rng);
        let len = y.len();
        let t = params.transition_matrix();
        let variances = [params.sigma_g2(), params.sigma_b2()];

        let emission = |k: usize, s: usize| -> f64 {
            let image = h[k];
            let var = variances[s];
            let d0 = (y[k] - image).norm_sqr();
            let d1 = (y[k] + image).norm_sqr();
            0.5 * ((-d0 / var).exp() + (-d1 / var).exp()) / (std::f64::consts::PI * var)
        };

        let mut alpha = vec![[0.0f64; 2]; len];
        alpha[0] = params.stationary();
        for k in 1..len {
            for to in 0..2 {
                alpha[k][to] = (0..2)
                    .map(|s| alpha[k - 1][s] * emission(k - 1, s) * t[s][to])
                    .sum();
            }
        }
        let mut beta = vec![[0.0f64; 2]; len];
        beta[len - 1] = [emission(len - 1, 0), emission(len - 1, 1)];
        for k in (0..len - 1).rev() {
            for s in 0..2 {
                beta[k][s] =
                    emission(k, s) * (0..2).map(|sn| t[s][sn] * beta[k + 1][sn]).sum::<f64>();
            }
        }

        // Frame likelihood is epoch-invariant.
        let like: Vec<f64> = (0..len)
            .map(|k| alpha[k][0] * beta[k][0] + alpha[k][1] * beta[k][1])
            .collect();
        for k in 1..len {
            assert_relative_eq!(like[k], like[0], max_relative = 1e-9);
        }

        let post = map_posteriors(&y, &h, 1.0, &params).unwrap();
        for k in 0..len {
            for s in 0..2 {
                assert_abs_diff_eq!(
                    post.posterior[k][s],
                    alpha[k][s] * beta[k][s] / like[k],
                    epsilon = 1e-9
                );
            }
        }
    }

    #[test]
    fn outlier_sample_reads_as_impulsive() {
        let params = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        let y = vec![Complex64::new(40.0, 0.0)];
        let h = vec![Complex64::new(1.0, 0.0)];
        let post = memoryless_posteriors(&y, &h, 1.0, &params).unwrap();
        assert!(post.llr[0] < 0.0);
        assert!(post.posterior[0][1] > 0.999);
        assert_eq!(
            post.hard_decisions().unwrap().as_slice()[0],
            NoiseState::Bad
        );
    }

    #[test]
    fn smoothing_beats_memoryless_on_bursty_noise() {
        // Persistent bursts are where memory pays: over many frames the MAP
        // hard-decision error rate must sit strictly below memoryless.
        let params = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let frames = 100;
        let len = 10_000;
        let mut err_map = 0.0;
        let mut err_mem = 0.0;
        for _ in 0..frames {
            let (y, h, truth) = synth_frame(&params, len, &mut rng);
            let map = map_posteriors(&y, &h, 1.0, &params)
                .unwrap()
                .hard_decisions()
                .unwrap();
            let mem = memoryless_posteriors(&y, &h, 1.0, &params)
                .unwrap()
                .hard_decisions()
                .unwrap();
            err_map += error_rate(&map, &truth);
            err_mem += error_rate(&mem, &truth);
        }
        err_map /= frames as f64;
        err_mem /= frames as f64;
        assert!(
            err_map < err_mem,
            "map {err_map} not below memoryless {err_mem}"
        );
        // Both detectors must do better than ignoring the observation.
        assert!(err_mem < params.stationary_bad());
    }

    #[test]
    fn impossible_observation_is_a_degeneracy_error() {
        // A period-2 chain (p_gb = p_bg = 1) forbids two consecutive Good
        // epochs; two huge outliers in a row leave no consistent path once
        // the Good-state emission underflows.
        let params = TsmgParams::new(1.0, 1.0, 100.0, 1.0).unwrap();
        let y = vec![Complex64::new(60.0, 0.0), Complex64::new(60.0, 0.0)];
        let h = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        match map_posteriors(&y, &h, 1.0, &params) {
            Err(Error::NumericalDegeneracy { .. }) => {}
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        let params = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        let y = vec![Complex64::new(f64::NAN, 0.0)];
        let h = vec![Complex64::new(1.0, 0.0)];
        assert!(matches!(
            map_posteriors(&y, &h, 1.0, &params),
            Err(Error::NumericalDegeneracy { .. })
        ));
        assert!(memoryless_posteriors(&y, &h, 1.0, &params).is_err());
        assert!(map_posteriors(&[], &[], 1.0, &params).is_err());
        let y2 = vec![Complex64::new(1.0, 0.0)];
        assert!(map_posteriors(&y2, &h, 0.0, &params).is_err());
        assert!(map_posteriors(&y2, &[], 1.0, &params).is_err());
    }

    #[test]
    fn registry_resolves_all_names() {
        for name in DETECTOR_NAMES {
            let det = detector_by_name(name).unwrap();
            assert_eq!(det.kind().as_str(), name);
        }
        assert!(matches!(
            detector_by_name("oracle"),
            Err(Error::UnknownStrategy { .. })
        ));
    }

    #[test]
    fn trait_objects_match_direct_calls() {
        let params = TsmgParams::from_stationary(0.01, 100.0, 100.0, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (y, h, truth) = synth_frame(&params, 256, &mut rng);
        let obs = RelayObservation {
            y: &y,
            h: &h,
            p_source: 1.0,
            true_states: &truth,
        };
        let genie = detector_by_name("genie")
            .unwrap()
            .detect(&obs, &params)
            .unwrap();
        assert_eq!(genie.states, truth);
        let map = detector_by_name("map")
            .unwrap()
            .detect(&obs, &params)
            .unwrap();
        let direct = map_posteriors(&y, &h, 1.0, &params)
            .unwrap()
            .hard_decisions()
            .unwrap();
        assert_eq!(map.states, direct);
        assert_eq!(map.source, DetectorKind::Map);
    }
}
