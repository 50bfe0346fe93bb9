//! Centralized greedy selection.
//!
//! `Greedy` adds, at every step, the candidate maximizing
//! `relevance_scale * (g(S + u) - g(S)) + diversity_scale * sum_{x in S} d(x, u)`.
//! `AltGreedy` is identical except that the relevance marginal is halved.
//! Both start from the candidate with the largest `g({u})`.
//!
//! Ties (scores within [`TIE_TOLERANCE`] of the best) go to the smallest
//! feature id, so the output depends only on the candidate set and removing a
//! candidate that was not chosen leaves the output unchanged.

use serde::Serialize;

use crate::data::FeatureId;
use crate::error::SelectError;
use crate::info::InfoCache;
use crate::objective::{evaluate, ObjectiveConfig, SelectionState};
use crate::scalar::Scalar;

pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GreedyVariant {
    Greedy,
    AltGreedy,
}

impl GreedyVariant {
    /// Weight on the relevance marginal; the distance term is never reweighted.
    pub fn relevance_weight<T: Scalar>(self) -> T {
        match self {
            GreedyVariant::Greedy => T::one(),
            GreedyVariant::AltGreedy => T::of(0.5),
        }
    }
}

impl std::str::FromStr for GreedyVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(GreedyVariant::Greedy),
            "altgreedy" => Ok(GreedyVariant::AltGreedy),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Smallest id among the scores within tolerance of the maximum.
/// `scored` must be sorted by id.
fn pick<T: Scalar>(scored: impl Iterator<Item = (FeatureId, T)> + Clone) -> Option<FeatureId> {
    let best = scored
        .clone()
        .map(|(_, s)| s)
        .fold(T::neg_infinity(), T::max);
    let floor = best - T::of(TIE_TOLERANCE);
    scored
        .into_iter()
        .find(|&(_, s)| s >= floor)
        .map(|(id, _)| id)
}

fn normalize(candidates: &[FeatureId]) -> Vec<FeatureId> {
    let mut c = candidates.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// The candidate with the largest `sum_l MI(u, l)`.
pub fn select_first<T: Scalar>(
    candidates: &[FeatureId],
    cfg: &ObjectiveConfig<T>,
) -> Result<FeatureId, SelectError> {
    let candidates = normalize(candidates);
    if candidates.is_empty() {
        return Err(SelectError::EmptyCandidates);
    }
    let scored = candidates
        .iter()
        .map(|&u| {
            let row = cfg.mi().row(u)?;
            Ok((u, row.iter().fold(T::zero(), |a, &v| a + v)))
        })
        .collect::<Result<Vec<_>, SelectError>>()?;
    Ok(pick(scored.iter().copied()).expect("non-empty"))
}

/// Runs `variant` for `min(k, |candidates|)` steps and returns the chosen ids
/// in selection order.
pub fn greedy_select<T: Scalar>(
    candidates: &[FeatureId],
    k: usize,
    variant: GreedyVariant,
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
) -> Result<Vec<FeatureId>, SelectError> {
    Ok(greedy_state(candidates, k, variant, cfg, cache)?
        .selected()
        .to_vec())
}

/// Like [`greedy_select`], returning the final state for inspection.
pub fn greedy_state<T: Scalar>(
    candidates: &[FeatureId],
    k: usize,
    variant: GreedyVariant,
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
) -> Result<SelectionState<T>, SelectError> {
    if k == 0 {
        return Err(SelectError::InvalidK { k, min: 1 });
    }
    if candidates.is_empty() {
        return Err(SelectError::EmptyCandidates);
    }
    let mut state = SelectionState::new(candidates, cfg);
    let target = k.min(state.candidates().len());
    let first = select_first(state.candidates(), cfg)?;
    state.add(first, cfg, cache)?;

    let weight = variant.relevance_weight::<T>() * cfg.relevance_scale();
    let ds = cfg.diversity_scale();
    let mut scores: Vec<(FeatureId, T)> = Vec::with_capacity(state.candidates().len());
    while state.selected().len() < target {
        scores.clear();
        let (ids, chosen, dist) = state.slots();
        for (s, &u) in ids.iter().enumerate() {
            if chosen[s] {
                continue;
            }
            let gain = state.trackers().marginal(cfg.mi().row(u)?);
            scores.push((u, weight * gain + ds * dist[s]));
        }
        let next = pick(scores.iter().copied()).expect("unselected candidates remain");
        state.add(next, cfg, cache)?;
    }
    Ok(state)
}

/// Largest observed niceness ratios of one `Greedy` run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NicenessReport {
    pub selected: Vec<FeatureId>,
    pub objective: f64,
    /// max over rejected `t` of `(f(S + t) - f(S)) / (f(S) / k)`; bounded by 5.
    pub max_marginal_ratio: f64,
    /// max over rejected `t` of `sum_{x in S} d(t, x) / (f(S) / (k - 1))`; bounded by 4.5.
    pub max_distance_ratio: f64,
    /// Rejected elements whose removal changed the output.
    pub unstable: Vec<FeatureId>,
}

impl NicenessReport {
    pub fn stable(&self) -> bool {
        self.unstable.is_empty()
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num <= 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Runs `Greedy` on `candidates` and measures both niceness inequalities and
/// removal stability over every rejected candidate.
pub fn niceness_witness<T: Scalar>(
    candidates: &[FeatureId],
    k: usize,
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
) -> Result<NicenessReport, SelectError> {
    let candidates = normalize(candidates);
    if k < 10 {
        return Err(SelectError::InvalidK { k, min: 10 });
    }
    if candidates.len() <= k {
        return Err(SelectError::KTooLarge {
            k,
            available: candidates.len(),
        });
    }
    let selected = greedy_select(&candidates, k, GreedyVariant::Greedy, cfg, cache)?;
    let base = evaluate(&selected, cfg, cache)?.h.as_f64();
    let rejected: Vec<FeatureId> = candidates
        .iter()
        .copied()
        .filter(|c| !selected.contains(c))
        .collect();

    let mut max_marginal_ratio = 0.0f64;
    let mut max_distance_ratio = 0.0f64;
    let mut unstable = Vec::new();
    let mut extended = selected.clone();
    for &t in &rejected {
        extended.push(t);
        let gain = evaluate(&extended, cfg, cache)?.h.as_f64() - base;
        extended.pop();
        let dist: f64 = selected
            .iter()
            .map(|&x| cache.distance(t, x).map(|d| d.as_f64()))
            .sum::<Result<f64, _>>()?
            * cfg.diversity_scale().as_f64();
        max_marginal_ratio = max_marginal_ratio.max(ratio(gain, base / k as f64));
        max_distance_ratio = max_distance_ratio.max(ratio(dist, base / (k - 1) as f64));

        let without: Vec<FeatureId> = candidates.iter().copied().filter(|&c| c != t).collect();
        if greedy_select(&without, k, GreedyVariant::Greedy, cfg, cache)? != selected {
            unstable.push(t);
        }
    }
    Ok(NicenessReport {
        selected,
        objective: base,
        max_marginal_ratio,
        max_distance_ratio,
        unstable,
    })
}
