//! Relay-selection strategies.
//!
//! Every protocol starts from the same ranking: relays ordered by the
//! max-min of their per-hop SNRs, best first. The state-aware N'th-best
//! policy walks that order and takes the first relay whose detected noise
//! state is quiet; if every relay looks impulsive it falls back to a
//! source-hop-only choice. The conventional policy always takes the top of
//! the table and the random policy ignores it entirely.
//!
//! Strategies live behind the [`SelectionStrategy`] trait and are resolved
//! by name through [`strategy_by_name`], so the engine and CLI select them
//! from configuration without knowing the concrete types.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::detector::{detector_by_name, DetectorKind, StateDetector};
use crate::error::{Error, Result};
use crate::noise::NoiseState;

/// Relays ordered by the max-min ranking key, best first.
///
/// `key[m]` is `min(gamma_sr[m], gamma_rd[m])` for relay `m`; `order` is the
/// permutation of relay indices sorted by key descending, ties broken by the
/// lower index so results are reproducible.
#[derive(Clone, Debug, Default)]
pub struct RankingTable {
    pub order: Vec<usize>,
    pub key: Vec<f64>,
}

impl RankingTable {
    /// Recompute in place, reusing the buffers (this runs once per epoch).
    pub fn rebuild(&mut self, gamma_sr: &[f64], gamma_rd: &[f64]) {
        debug_assert!(!gamma_sr.is_empty());
        debug_assert_eq!(gamma_sr.len(), gamma_rd.len());
        self.key.clear();
        self.key
            .extend(gamma_sr.iter().zip(gamma_rd).map(|(&a, &b)| a.min(b)));
        self.order.clear();
        self.order.extend(0..gamma_sr.len());
        let key = &self.key;
        self.order
            .sort_unstable_by(|&a, &b| key[b].total_cmp(&key[a]).then(a.cmp(&b)));
    }

    /// 1-based position of a relay in the ranking.
    pub fn rank_of(&self, relay: usize) -> usize {
        self.order.iter().position(|&m| m == relay).unwrap() + 1
    }
}

/// Rank relays by `min(gamma_sr, gamma_rd)` descending.
pub fn rank_max_min(gamma_sr: &[f64], gamma_rd: &[f64]) -> RankingTable {
    let mut table = RankingTable::default();
    table.rebuild(gamma_sr, gamma_rd);
    table
}

/// How to pick a relay when every detected state is impulsive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackRule {
    /// Best source hop only: `argmax gamma_sr` (the scaling by the impulsive
    /// variance ratio preserves the argmax, so it drops out).
    #[default]
    SourceHopOnly,
    /// Max-min with the source hop derated by the impulsive variance ratio:
    /// `argmax min(gamma_sr / rho, gamma_rd)`.
    MaxMinScaled,
}

/// Outcome of one epoch's selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectionDecision {
    pub relay: usize,
    /// 1-based position of the chosen relay in the ranking table.
    pub rank_used: usize,
    /// True when every detected state was impulsive and the fallback rule
    /// chose the relay.
    pub fallback: bool,
    /// Detector consulted, if the strategy is state-aware.
    pub detector: Option<DetectorKind>,
}

/// Fallback choice when all relays are detected impulsive.
pub fn select_all_bad(gamma_sr: &[f64], _rho: f64) -> usize {
    debug_assert!(!gamma_sr.is_empty());
    let mut best = 0;
    for m in 1..gamma_sr.len() {
        if gamma_sr[m] > gamma_sr[best] {
            best = m;
        }
    }
    best
}

/// Fallback variant keeping the max-min form with the source hop derated.
pub fn select_all_bad_max_min(gamma_sr: &[f64], gamma_rd: &[f64], rho: f64) -> usize {
    debug_assert!(!gamma_sr.is_empty());
    debug_assert_eq!(gamma_sr.len(), gamma_rd.len());
    let keyed = |m: usize| (gamma_sr[m] / rho).min(gamma_rd[m]);
    let mut best = 0;
    for m in 1..gamma_sr.len() {
        if keyed(m) > keyed(best) {
            best = m;
        }
    }
    best
}

/// Highest-ranked relay whose detected state is quiet; falls back when none
/// is. `source` tags the decision with the detector that produced `detected`.
pub fn select_nth_best(
    ranking: &RankingTable,
    detected: &[NoiseState],
    gamma_sr: &[f64],
    gamma_rd: &[f64],
    rho: f64,
    rule: FallbackRule,
    source: Option<DetectorKind>,
) -> SelectionDecision {
    debug_assert_eq!(detected.len(), ranking.order.len());
    for (pos, &relay) in ranking.order.iter().enumerate() {
        if !detected[relay].is_bad() {
            return SelectionDecision {
                relay,
                rank_used: pos + 1,
                fallback: false,
                detector: source,
            };
        }
    }
    let relay = match rule {
        FallbackRule::SourceHopOnly => select_all_bad(gamma_sr, rho),
        FallbackRule::MaxMinScaled => select_all_bad_max_min(gamma_sr, gamma_rd, rho),
    };
    SelectionDecision {
        relay,
        rank_used: ranking.rank_of(relay),
        fallback: true,
        detector: source,
    }
}

/// State-blind choice: always the top of the ranking.
pub fn select_conventional(ranking: &RankingTable) -> SelectionDecision {
    SelectionDecision {
        relay: ranking.order[0],
        rank_used: 1,
        fallback: false,
        detector: None,
    }
}

/// Uniform choice over the relays.
pub fn select_random(ranking: &RankingTable, rng: &mut dyn RngCore) -> SelectionDecision {
    let relay = rng.gen_range(0..ranking.order.len());
    SelectionDecision {
        relay,
        rank_used: ranking.rank_of(relay),
        fallback: false,
        detector: None,
    }
}

/// Per-epoch inputs shared by every strategy.
#[derive(Clone, Copy, Debug)]
pub struct EpochInputs<'a> {
    pub ranking: &'a RankingTable,
    /// Detected state of each relay at this epoch; None for state-blind
    /// strategies.
    pub detected: Option<&'a [NoiseState]>,
    pub gamma_sr: &'a [f64],
    pub gamma_rd: &'a [f64],
    pub rho: f64,
    pub fallback: FallbackRule,
}

/// A named selection protocol. `detector()` names the state detector the
/// engine must run per relay before calling `select`, if any.
pub trait SelectionStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn detector(&self) -> Option<&'static dyn StateDetector>;

    fn select(&self, epoch: &EpochInputs<'_>, rng: &mut dyn RngCore) -> Result<SelectionDecision>;
}

struct NthBest {
    name: &'static str,
    detector: DetectorKind,
}

impl SelectionStrategy for NthBest {
    fn name(&self) -> &'static str {
        self.name
    }

    fn detector(&self) -> Option<&'static dyn StateDetector> {
        Some(detector_by_name(self.detector.as_str()).expect("registered detector"))
    }

    fn select(&self, epoch: &EpochInputs<'_>, _rng: &mut dyn RngCore) -> Result<SelectionDecision> {
        let detected = epoch.detected.ok_or_else(|| {
            Error::invalid("detected", "state-aware strategy needs detected states")
        })?;
        Ok(select_nth_best(
            epoch.ranking,
            detected,
            epoch.gamma_sr,
            epoch.gamma_rd,
            epoch.rho,
            epoch.fallback,
            Some(self.detector),
        ))
    }
}

struct Conventional;

impl SelectionStrategy for Conventional {
    fn name(&self) -> &'static str {
        "conventional"
    }

    fn detector(&self) -> Option<&'static dyn StateDetector> {
        None
    }

    fn select(&self, epoch: &EpochInputs<'_>, _rng: &mut dyn RngCore) -> Result<SelectionDecision> {
        Ok(select_conventional(epoch.ranking))
    }
}

struct Random;

impl SelectionStrategy for Random {
    fn name(&self) -> &'static str {
        "random"
    }

    fn detector(&self) -> Option<&'static dyn StateDetector> {
        None
    }

    fn select(&self, epoch: &EpochInputs<'_>, rng: &mut dyn RngCore) -> Result<SelectionDecision> {
        Ok(select_random(epoch.ranking, rng))
    }
}

pub const STRATEGY_NAMES: [&str; 5] = [
    "nth_best_genie",
    "nth_best_map",
    "nth_best_memoryless",
    "conventional",
    "random",
];

/// Look up a selection protocol by its registry name.
pub fn strategy_by_name(name: &str) -> Result<&'static dyn SelectionStrategy> {
    static NTH_GENIE: NthBest = NthBest {
        name: "nth_best_genie",
        detector: DetectorKind::Genie,
    };
    static NTH_MAP: NthBest = NthBest {
        name: "nth_best_map",
        detector: DetectorKind::Map,
    };
    static NTH_MEMORYLESS: NthBest = NthBest {
        name: "nth_best_memoryless",
        detector: DetectorKind::Memoryless,
    };
    static CONVENTIONAL: Conventional = Conventional;
    static RANDOM: Random = Random;
    match name {
        "nth_best_genie" => Ok(&NTH_GENIE),
        "nth_best_map" => Ok(&NTH_MAP),
        "nth_best_memoryless" => Ok(&NTH_MEMORYLESS),
        "conventional" => Ok(&CONVENTIONAL),
        "random" => Ok(&RANDOM),
        _ => Err(Error::UnknownStrategy {
            name: name.to_string(),
            available: STRATEGY_NAMES.join(", "),
        }),
    }
}
