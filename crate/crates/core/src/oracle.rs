//! Exhaustive optimum and approximation-ratio harness for small instances.

use rayon::prelude::*;
use serde::Serialize;

use crate::coreset::{default_machine_count, distributed_select};
use crate::data::{Dataset, FeatureId};
use crate::error::SelectError;
use crate::greedy::{greedy_select, GreedyVariant};
use crate::info::InfoCache;
use crate::objective::{evaluate, MiTable, ObjectiveConfig, ObjectiveParams};
use crate::scalar::Scalar;

pub const DEFAULT_BUDGET: u128 = 2_000_000;

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum<T> {
    /// Ascending ids.
    pub set: Vec<FeatureId>,
    pub value: T,
}

fn better<T: Scalar>(a: &Optimum<T>, b: &Optimum<T>) -> bool {
    a.value > b.value || (a.value == b.value && a.set < b.set)
}

/// Maximizer of the configured objective over all `k`-subsets of
/// `candidates`; equal values resolve to the lexicographically smallest set.
/// Enumeration is sharded over the current rayon pool by smallest element.
pub fn brute_force_opt<T: Scalar>(
    candidates: &[FeatureId],
    k: usize,
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
    budget: u128,
) -> Result<Optimum<T>, SelectError> {
    let mut ids = candidates.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if k == 0 {
        return Err(SelectError::InvalidK { k, min: 1 });
    }
    if k > ids.len() {
        return Err(SelectError::KTooLarge {
            k,
            available: ids.len(),
        });
    }
    let needed = binomial(ids.len(), k);
    if needed > budget {
        return Err(SelectError::BudgetExceeded { needed, budget });
    }

    let shards: Vec<Option<Optimum<T>>> = (0..=ids.len() - k)
        .into_par_iter()
        .map(|first| -> Result<Option<Optimum<T>>, SelectError> {
            let mut best: Option<Optimum<T>> = None;
            // index combination with a fixed first element, advanced lexicographically
            let mut idx: Vec<usize> = (first..first + k).collect();
            loop {
                let set: Vec<FeatureId> = idx.iter().map(|&i| ids[i]).collect();
                let value = evaluate(&set, cfg, cache)?.h;
                let cand = Optimum { set, value };
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
                // rightmost position after the first that can still move
                let mut pos = k;
                let movable = loop {
                    if pos == 1 {
                        break None;
                    }
                    pos -= 1;
                    if idx[pos] < ids.len() - (k - pos) {
                        break Some(pos);
                    }
                };
                let Some(pos) = movable else {
                    return Ok(best);
                };
                idx[pos] += 1;
                for j in pos + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        })
        .collect::<Result<_, _>>()?;

    Ok(shards
        .into_iter()
        .flatten()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one subset"))
}

/// A dataset plus objective settings small enough for [`brute_force_opt`].
#[derive(Debug, Clone)]
pub struct OracleInstance<'a, T> {
    pub data: &'a Dataset,
    pub params: ObjectiveParams<T>,
    /// Defaults to `ceil(sqrt(d / k))`.
    pub machines: Option<usize>,
    pub budget: u128,
}

impl<'a, T: Scalar> OracleInstance<'a, T> {
    pub fn new(data: &'a Dataset, params: ObjectiveParams<T>) -> Self {
        OracleInstance {
            data,
            params,
            machines: None,
            budget: DEFAULT_BUDGET,
        }
    }

    fn machines(&self) -> Result<usize, SelectError> {
        match self.machines {
            Some(m) => Ok(m),
            None => default_machine_count(self.data.d(), self.params.k),
        }
    }

    fn setup(&self) -> Result<(ObjectiveConfig<T>, InfoCache<T>), SelectError> {
        let cfg = ObjectiveConfig::new(self.params, MiTable::compute(self.data)?)?;
        Ok((cfg, InfoCache::for_dataset(self.data)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedRatio {
    pub seed: u64,
    pub selected: Vec<FeatureId>,
    pub value: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub d: usize,
    pub k: usize,
    pub machines: usize,
    pub opt_set: Vec<FeatureId>,
    pub opt_value: f64,
    pub greedy_value: f64,
    pub greedy_ratio: f64,
    pub altgreedy_value: f64,
    pub altgreedy_ratio: f64,
    pub distributed: Vec<SeedRatio>,
    pub mean_distributed_ratio: f64,
    pub min_distributed_ratio: f64,
    /// `altgreedy_ratio >= 1/2 - 1e-9`.
    pub altgreedy_bound_holds: bool,
    /// Every distributed ratio `>= 1/31 - 1e-9`.
    pub distributed_bound_holds: bool,
}

pub const ALTGREEDY_BOUND: f64 = 0.5;
pub const DISTRIBUTED_BOUND: f64 = 1.0 / 31.0;
pub const BOUND_SLACK: f64 = 1e-9;

/// `value / opt`, capped at 1 against rounding; an all-zero optimum scores 1.
fn ratio(value: f64, opt: f64) -> f64 {
    if opt <= 0.0 {
        1.0
    } else {
        (value / opt).clamp(0.0, 1.0)
    }
}

/// Ratios of `Greedy`, `AltGreedy` and the distributed pipeline (one run per
/// seed) to the exhaustive optimum.
pub fn approximation_report<T: Scalar>(
    instance: &OracleInstance<'_, T>,
    seeds: &[u64],
) -> Result<ApproximationReport, SelectError> {
    let data = instance.data;
    let k = instance.params.k;
    let machines = instance.machines()?;
    let (cfg, cache) = instance.setup()?;
    let ids = data.feature_ids();
    let opt = brute_force_opt(&ids, k, &cfg, &cache, instance.budget)?;
    let opt_value = opt.value.as_f64();

    let value_of = |set: &[FeatureId]| -> Result<f64, SelectError> {
        Ok(evaluate(set, &cfg, &cache)?.h.as_f64())
    };
    let greedy_value = value_of(&greedy_select(
        &ids,
        k,
        GreedyVariant::Greedy,
        &cfg,
        &cache,
    )?)?;
    let altgreedy_value = value_of(&greedy_select(
        &ids,
        k,
        GreedyVariant::AltGreedy,
        &cfg,
        &cache,
    )?)?;

    let distributed = seeds
        .iter()
        .map(|&seed| {
            let report = distributed_select(data, instance.params, machines, seed, 1)?;
            let selected = report.selected_ids();
            let value = value_of(&selected)?;
            Ok(SeedRatio {
                seed,
                selected,
                value,
                ratio: ratio(value, opt_value),
            })
        })
        .collect::<Result<Vec<_>, SelectError>>()?;

    let ratios: Vec<f64> = distributed.iter().map(|r| r.ratio).collect();
    let mean_distributed_ratio = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let min_distributed_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let altgreedy_ratio = ratio(altgreedy_value, opt_value);

    Ok(ApproximationReport {
        d: data.d(),
        k,
        machines,
        opt_set: opt.set,
        opt_value,
        greedy_value,
        greedy_ratio: ratio(greedy_value, opt_value),
        altgreedy_value,
        altgreedy_ratio,
        mean_distributed_ratio,
        min_distributed_ratio,
        altgreedy_bound_holds: altgreedy_ratio >= ALTGREEDY_BOUND - BOUND_SLACK,
        distributed_bound_holds: ratios.iter().all(|&r| r >= DISTRIBUTED_BOUND - BOUND_SLACK),
        distributed,
    })
}

/// Per-seed quantities behind the two core-set bounds: the weighted diversity
/// and relevance terms of the global optimum `O`, and the optimum over the
/// union of the machines' core-sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoresetBounds {
    pub opt_diversity_term: f64,
    pub opt_relevance_term: f64,
    pub union_opt_values: Vec<f64>,
    pub mean_union_opt: f64,
    /// `D(O) <= 8.5 f(OPT(union))` for every seed (slack 1e-6).
    pub diversity_bound_holds: bool,
    /// `g(O) <= 6 f(OPT(union)) + mean f(OPT(union))` for every seed (slack 1e-6).
    pub relevance_bound_holds: bool,
}

pub fn coreset_bounds<T: Scalar>(
    instance: &OracleInstance<'_, T>,
    seeds: &[u64],
) -> Result<CoresetBounds, SelectError> {
    let data = instance.data;
    let k = instance.params.k;
    let machines = instance.machines()?;
    let (cfg, cache) = instance.setup()?;
    let opt = brute_force_opt(&data.feature_ids(), k, &cfg, &cache, instance.budget)?;
    let parts = evaluate(&opt.set, &cfg, &cache)?;
    let opt_diversity_term = parts.diversity_term.as_f64();
    let opt_relevance_term = parts.relevance_term.as_f64();

    let union_opt_values = seeds
        .iter()
        .map(|&seed| {
            let report = distributed_select(data, instance.params, machines, seed, 1)?;
            let union: Vec<FeatureId> = report
                .plan
                .as_ref()
                .expect("distributed runs carry a plan")
                .coresets
                .iter()
                .flatten()
                .copied()
                .collect();
            let k_union = k.min(union.len());
            Ok(
                brute_force_opt(&union, k_union, &cfg, &cache, instance.budget)?
                    .value
                    .as_f64(),
            )
        })
        .collect::<Result<Vec<f64>, SelectError>>()?;
    let mean_union_opt =
        union_opt_values.iter().sum::<f64>() / union_opt_values.len().max(1) as f64;
    const SLACK: f64 = 1e-6;
    Ok(CoresetBounds {
        opt_diversity_term,
        opt_relevance_term,
        diversity_bound_holds: union_opt_values
            .iter()
            .all(|&u| opt_diversity_term <= 8.5 * u + SLACK),
        relevance_bound_holds: union_opt_values
            .iter()
            .all(|&u| opt_relevance_term <= 6.0 * u + mean_union_opt + SLACK),
        union_opt_values,
        mean_union_opt,
    })
}
