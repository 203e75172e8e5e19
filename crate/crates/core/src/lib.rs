//! Simulator and analytic engine for decode-and-forward relay selection
//! under bursty impulsive noise.
//!
//! A source reaches a destination directly and through one of `M`
//! decode-and-forward relays over Rayleigh fading. Source→relay links suffer
//! two-state Markov-Gaussian impulsive noise; relays estimate their own
//! noise state (trellis smoothing, a memoryless test, or a genie) and the
//! N'th-best selection policy picks the highest-ranked relay believed to sit
//! in the good state. The crate provides:
//!
//! * [`noise`]: the noise/fading processes and per-frame channel traces,
//! * [`detector`]: noise-state detectors behind a common trait,
//! * [`selector`]: selection strategies behind a registry keyed by name,
//! * [`transceiver`]: BPSK relaying, MRC combining, per-epoch outcomes,
//! * [`analytic`]: closed-form and asymptotic BER/outage references,
//! * [`quadrature`]: the adaptive integrator used as a consistency oracle,
//! * [`engine`]: seeded, parallel Monte Carlo sweeps,
//! * [`record`]: the stable on-disk record format.

pub mod analytic;
pub mod detector;
pub mod engine;
pub mod error;
pub mod noise;
pub mod quadrature;
pub mod record;
pub mod selector;
pub mod transceiver;

pub use error::{Error, Result};
