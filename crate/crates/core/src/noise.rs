//! Bursty impulsive noise, Rayleigh fading, and per-frame channel traces.
//!
//! The noise on the source→relay links is a two-state Markov-Gaussian
//! process: each epoch the link sits in a `Good` state (circularly symmetric
//! complex Gaussian noise, total variance `sigma_g2`) or a `Bad` impulsive
//! state (variance `rho * sigma_g2`), and the state evolves as a first-order
//! Markov chain. Links into the destination carry plain AWGN of variance
//! `sigma_g2`. Fading is Rayleigh: coefficients are complex Gaussian with
//! per-link mean power set by the path-loss law `omega = lambda^-eta`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Noise occupancy state of one link at one epoch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NoiseState {
    Good,
    Bad,
}

impl NoiseState {
    /// Dense index used by trellis code: Good = 0, Bad = 1.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            NoiseState::Good => 0,
            NoiseState::Bad => 1,
        }
    }

    #[inline]
    pub fn other(self) -> Self {
        match self {
            NoiseState::Good => NoiseState::Bad,
            NoiseState::Bad => NoiseState::Good,
        }
    }

    #[inline]
    pub fn is_bad(self) -> bool {
        matches!(self, NoiseState::Bad)
    }
}

/// Derive per-epoch transition probabilities from the stationary bad-state
/// occupancy `p_b` and the channel memory `mu` (mean number of epochs over
/// which the state decorrelates; `mu = 1` makes the chain memoryless).
///
/// Returns `(p_gb, p_bg)`, the Good→Bad and Bad→Good switch probabilities.
pub fn derive_transition_probs(p_b: f64, mu: f64) -> Result<(f64, f64)> {
    if !(p_b > 0.0 && p_b < 1.0) {
        return Err(Error::invalid("p_b", format!("{p_b} is outside (0, 1)")));
    }
    if !mu.is_finite() || mu <= 0.0 {
        return Err(Error::invalid("mu", format!("{mu} is not positive")));
    }
    let p_gb = p_b / mu;
    let p_bg = (1.0 - p_b) / mu;
    if p_gb > 1.0 || p_bg > 1.0 {
        return Err(Error::invalid(
            "mu",
            format!("memory {mu} is infeasible for p_b = {p_b}: it would need a switch probability above 1"),
        ));
    }
    Ok((p_gb, p_bg))
}

/// Parameters of the two-state Markov-Gaussian noise process.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TsmgParams {
    p_gb: f64,
    p_bg: f64,
    rho: f64,
    sigma_g2: f64,
}

impl TsmgParams {
    /// Build from raw transition probabilities. Absorbing chains (a switch
    /// probability of exactly 0 or 1) are accepted so degenerate corners can
    /// be exercised; `p_gb + p_bg` must stay positive for the stationary
    /// distribution to exist.
    pub fn new(p_gb: f64, p_bg: f64, rho: f64, sigma_g2: f64) -> Result<Self> {
        for (name, p) in [("p_gb", p_gb), ("p_bg", p_bg)] {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(name, format!("{p} is outside [0, 1]")));
            }
        }
        if p_gb + p_bg <= 0.0 {
            return Err(Error::invalid(
                "p_gb",
                "p_gb + p_bg must be positive for a stationary distribution to exist",
            ));
        }
        if !rho.is_finite() || rho < 1.0 {
            return Err(Error::invalid("rho", format!("{rho} is below 1")));
        }
        if !sigma_g2.is_finite() || sigma_g2 <= 0.0 {
            return Err(Error::invalid(
                "sigma_g2",
                format!("{sigma_g2} is not positive"),
            ));
        }
        Ok(Self {
            p_gb,
            p_bg,
            rho,
            sigma_g2,
        })
    }

    /// Build from the stationary description `(p_b, mu)`.
    pub fn from_stationary(p_b: f64, mu: f64, rho: f64, sigma_g2: f64) -> Result<Self> {
        let (p_gb, p_bg) = derive_transition_probs(p_b, mu)?;
        Self::new(p_gb, p_bg, rho, sigma_g2)
    }

    /// Rescale to a different good-state noise floor, keeping the chain.
    pub fn with_sigma_g2(&self, sigma_g2: f64) -> Result<Self> {
        Self::new(self.p_gb, self.p_bg, self.rho, sigma_g2)
    }

    #[inline]
    pub fn p_gb(&self) -> f64 {
        self.p_gb
    }

    #[inline]
    pub fn p_bg(&self) -> f64 {
        self.p_bg
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn sigma_g2(&self) -> f64 {
        self.sigma_g2
    }

    #[inline]
    pub fn sigma_b2(&self) -> f64 {
        self.rho * self.sigma_g2
    }

    /// Stationary probability of the bad state.
    #[inline]
    pub fn stationary_bad(&self) -> f64 {
        self.p_gb / (self.p_gb + self.p_bg)
    }

    #[inline]
    pub fn stationary_good(&self) -> f64 {
        1.0 - self.stationary_bad()
    }

    /// Channel memory `mu = 1 / (p_gb + p_bg)`.
    #[inline]
    pub fn memory(&self) -> f64 {
        1.0 / (self.p_gb + self.p_bg)
    }

    /// Total complex noise variance in the given state.
    #[inline]
    pub fn variance(&self, state: NoiseState) -> f64 {
        match state {
            NoiseState::Good => self.sigma_g2,
            NoiseState::Bad => self.sigma_b2(),
        }
    }

    /// Transition matrix indexed `[from][to]` with Good = 0, Bad = 1.
    #[inline]
    pub fn transition_matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p_gb, self.p_gb], [self.p_bg, 1.0 - self.p_bg]]
    }

    /// Stationary distribution as `[p_good, p_bad]`.
    #[inline]
    pub fn stationary(&self) -> [f64; 2] {
        let pb = self.stationary_bad();
        [1.0 - pb, pb]
    }
}

/// Per-epoch noise states of one link over one frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSequence(pub Vec<NoiseState>);

impl StateSequence {
    #[inline]
    pub fn as_slice(&self) -> &[NoiseState] {
        &self.0
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for StateSequence {
    type Output = NoiseState;

    #[inline]
    fn index(&self, k: usize) -> &NoiseState {
        &self.0[k]
    }
}

/// Sample a state trajectory of length `len`, starting from the stationary
/// distribution.
pub fn sample_state_sequence<R: Rng + ?Sized>(
    params: &TsmgParams,
    len: usize,
    rng: &mut R,
) -> StateSequence {
    let mut states = Vec::with_capacity(len);
    if len == 0 {
        return StateSequence(states);
    }
    let mut s = if rng.gen::<f64>() < params.stationary_bad() {
        NoiseState::Bad
    } else {
        NoiseState::Good
    };
    states.push(s);
    for _ in 1..len {
        let switch = match s {
            NoiseState::Good => params.p_gb,
            NoiseState::Bad => params.p_bg,
        };
        if rng.gen::<f64>() < switch {
            s = s.other();
        }
        states.push(s);
    }
    StateSequence(states)
}

/// One circularly symmetric complex Gaussian draw with total variance `var`
/// (each real component carries `var / 2`).
#[inline]
pub fn sample_cscg_one<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let scale = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// `len` independent CSCG draws of total variance `var`.
pub fn sample_cscg<R: Rng + ?Sized>(var: f64, len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len).map(|_| sample_cscg_one(var, rng)).collect()
}

/// Noise samples that follow a given state trajectory: CSCG with variance
/// `sigma_g2` in Good epochs and `rho * sigma_g2` in Bad ones.
pub fn sample_tsmg_noise<R: Rng + ?Sized>(
    params: &TsmgParams,
    states: &StateSequence,
    rng: &mut R,
) -> Vec<Complex64> {
    states
        .as_slice()
        .iter()
        .map(|&s| sample_cscg_one(params.variance(s), rng))
        .collect()
}

/// Rayleigh fading coefficients: CSCG with mean power `omega`.
pub fn sample_fading<R: Rng + ?Sized>(omega: f64, len: usize, rng: &mut R) -> Vec<Complex64> {
    sample_cscg(omega, len, rng)
}

/// How fading evolves within one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Independent coefficients every epoch.
    PerSymbol,
    /// One coefficient per link, constant over the frame.
    QuasiStatic,
}

/// Node geometry and transmit powers.
///
/// Relays sit at normalized distance `lambda_sr` from the source on the
/// source→destination axis (distance `lambda_sd`); mean link powers follow
/// `omega = lambda^-eta`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Topology {
    relays: usize,
    lambda_sd: f64,
    lambda_sr: f64,
    lambda_rd: f64,
    eta: f64,
    p_source: f64,
    p_relay: f64,
}

impl Topology {
    /// `lambda_rd = None` places the relays on the source→destination line,
    /// i.e. `lambda_rd = lambda_sd - lambda_sr`.
    pub fn new(
        relays: usize,
        lambda_sd: f64,
        lambda_sr: f64,
        lambda_rd: Option<f64>,
        eta: f64,
    ) -> Result<Self> {
        if relays == 0 {
            return Err(Error::invalid("relays", "at least one relay is required"));
        }
        for (name, v) in [("lambda_sd", lambda_sd), ("lambda_sr", lambda_sr)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("{v} is not positive")));
            }
        }
        let lambda_rd = match lambda_rd {
            Some(v) => {
                if !v.is_finite() || v <= 0.0 {
                    return Err(Error::invalid("lambda_rd", format!("{v} is not positive")));
                }
                v
            }
            None => {
                let v = lambda_sd - lambda_sr;
                if v <= 0.0 {
                    return Err(Error::invalid(
                        "lambda_sr",
                        format!(
                            "collinear default needs lambda_sr < lambda_sd, got {lambda_sr} >= {lambda_sd}"
                        ),
                    ));
                }
                v
            }
        };
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::invalid("eta", format!("{eta} is not positive")));
        }
        Ok(Self {
            relays,
            lambda_sd,
            lambda_sr,
            lambda_rd,
            eta,
            p_source: 1.0,
            p_relay: 1.0,
        })
    }

    pub fn with_powers(mut self, p_source: f64, p_relay: f64) -> Result<Self> {
        for (name, v) in [("p_source", p_source), ("p_relay", p_relay)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::invalid(name, format!("{v} is not positive")));
            }
        }
        self.p_source = p_source;
        self.p_relay = p_relay;
        Ok(self)
    }

    #[inline]
    pub fn relays(&self) -> usize {
        self.relays
    }

    #[inline]
    pub fn lambda_sd(&self) -> f64 {
        self.lambda_sd
    }

    #[inline]
    pub fn lambda_sr(&self) -> f64 {
        self.lambda_sr
    }

    #[inline]
    pub fn lambda_rd(&self) -> f64 {
        self.lambda_rd
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    #[inline]
    pub fn p_source(&self) -> f64 {
        self.p_source
    }

    #[inline]
    pub fn p_relay(&self) -> f64 {
        self.p_relay
    }

    #[inline]
    pub fn omega_sd(&self) -> f64 {
        self.lambda_sd.powf(-self.eta)
    }

    #[inline]
    pub fn omega_sr(&self) -> f64 {
        self.lambda_sr.powf(-self.eta)
    }

    #[inline]
    pub fn omega_rd(&self) -> f64 {
        self.lambda_rd.powf(-self.eta)
    }

    /// Per-link average SNRs at a given good-state noise floor.
    pub fn average_snrs(&self, sigma_g2: f64) -> LinkSnrs {
        LinkSnrs {
            sr: self.p_source * self.omega_sr() / sigma_g2,
            rd: self.p_relay * self.omega_rd() / sigma_g2,
            sd: self.p_source * self.omega_sd() / sigma_g2,
        }
    }
}

/// Average SNRs of the three link classes.
#[derive(Clone, Copy, Debug)]
pub struct LinkSnrs {
    pub sr: f64,
    pub rd: f64,
    pub sd: f64,
}

impl LinkSnrs {
    /// Harmonic combination `sr * rd / (sr + rd)`: the rate parameter of the
    /// per-relay max-min selection metric.
    #[inline]
    pub fn harmonic(&self) -> f64 {
        self.sr * self.rd / (self.sr + self.rd)
    }
}

/// Everything the channel decides for one frame: fading coefficients, true
/// noise states, and noise samples for every link. Relay links carry the
/// impulsive process; destination links carry AWGN at the good-state floor.
#[derive(Clone, Debug)]
pub struct FrameTrace {
    pub len: usize,
    /// Per-relay noise state trajectories on the source→relay links.
    pub states: Vec<StateSequence>,
    pub h_sr: Vec<Vec<Complex64>>,
    pub h_rd: Vec<Vec<Complex64>>,
    pub h_sd: Vec<Complex64>,
    pub n_sr: Vec<Vec<Complex64>>,
    pub n_rd: Vec<Vec<Complex64>>,
    pub n_sd: Vec<Complex64>,
}

impl FrameTrace {
    /// Draw a full frame. The draw order is fixed (per relay: states, SR
    /// fading, SR noise, RD fading, RD noise; then SD fading, SD noise) so a
    /// seeded generator reproduces the trace exactly.
    pub fn sample<R: Rng + ?Sized>(
        noise: &TsmgParams,
        topo: &Topology,
        mode: ChannelMode,
        len: usize,
        rng: &mut R,
    ) -> Self {
        let m = topo.relays();
        let mut states = Vec::with_capacity(m);
        let mut h_sr = Vec::with_capacity(m);
        let mut h_rd = Vec::with_capacity(m);
        let mut n_sr = Vec::with_capacity(m);
        let mut n_rd = Vec::with_capacity(m);
        let fade = |omega: f64, rng: &mut R| -> Vec<Complex64> {
            match mode {
                ChannelMode::PerSymbol => sample_fading(omega, len, rng),
                ChannelMode::QuasiStatic => {
                    let h = sample_cscg_one(omega, rng);
                    vec![h; len]
                }
            }
        };
        for _ in 0..m {
            let s = sample_state_sequence(noise, len, rng);
            h_sr.push(fade(topo.omega_sr(), rng));
            n_sr.push(sample_tsmg_noise(noise, &s, rng));
            states.push(s);
            h_rd.push(fade(topo.omega_rd(), rng));
            n_rd.push(sample_cscg(noise.sigma_g2(), len, rng));
        }
        let h_sd = fade(topo.omega_sd(), rng);
        let n_sd = sample_cscg(noise.sigma_g2(), len, rng);
        Self {
            len,
            states,
            h_sr,
            h_rd,
            h_sd,
            n_sr,
            n_rd,
            n_sd,
        }
    }
}
