//! Randomized composable core-sets: partition the features over `m` simulated
//! machines, keep each machine's `Greedy` output, and run `AltGreedy` over the
//! union. The streaming runner applies the same schedule one partition at a
//! time and only retains the surviving columns.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::{Dataset, DiscreteColumn, FeatureId};
use crate::error::SelectError;
use crate::greedy::{greedy_select, GreedyVariant};
use crate::info::InfoCache;
use crate::objective::{evaluate, MiTable, ObjectiveBreakdown, ObjectiveConfig, ObjectiveParams};
use crate::scalar::Scalar;

/// Assignment of every feature to one machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionPlan {
    pub machines: usize,
    pub seed: u64,
    pub assignment: Vec<usize>,
}

impl PartitionPlan {
    /// Feature ids per machine, ascending.
    pub fn parts(&self) -> Vec<Vec<FeatureId>> {
        let mut parts = vec![Vec::new(); self.machines];
        for (id, &m) in self.assignment.iter().enumerate() {
            parts[m].push(id);
        }
        parts
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.machines];
        for &m in &self.assignment {
            sizes[m] += 1;
        }
        sizes
    }
}

/// Each feature independently goes to a uniformly random machine.
pub fn random_partition(
    d: usize,
    machines: usize,
    seed: u64,
) -> Result<PartitionPlan, SelectError> {
    if machines == 0 {
        return Err(SelectError::NoMachines);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = (0..d).map(|_| rng.gen_range(0..machines)).collect();
    Ok(PartitionPlan {
        machines,
        seed,
        assignment,
    })
}

/// `ceil(sqrt(d / k))`, the count that balances machine and merge cost.
pub fn default_machine_count(d: usize, k: usize) -> Result<usize, SelectError> {
    if k == 0 {
        return Err(SelectError::InvalidK { k, min: 1 });
    }
    if d < k {
        return Err(SelectError::KTooLarge { k, available: d });
    }
    // smallest m with m^2 * k >= d
    let mut m = ((d as f64 / k as f64).sqrt().ceil() as usize).max(1);
    while m > 1 && (m - 1) * (m - 1) * k >= d {
        m -= 1;
    }
    while m * m * k < d {
        m += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Centralized,
    Distributed,
    Streaming,
}

/// Wall-clock per phase in milliseconds. `prepare` is the MI table, `map` the
/// per-machine core-sets and `reduce` the final selection (the only selection
/// phase of a centralized run).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub prepare_ms: f64,
    pub partition_ms: f64,
    pub map_ms: f64,
    pub reduce_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedFeature {
    pub id: FeatureId,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub machines: usize,
    pub seed: u64,
    pub partition_sizes: Vec<usize>,
    pub assignment: Vec<usize>,
    /// Each machine's `Greedy` output in selection order; empty for empty partitions.
    pub coresets: Vec<Vec<FeatureId>>,
}

/// Settings echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub lambda: f64,
    pub p: usize,
    pub k: usize,
    pub bins: Option<usize>,
    pub seed: Option<u64>,
    pub algorithm: GreedyVariant,
    pub parallelism: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub mode: RunMode,
    pub selected: Vec<SelectedFeature>,
    pub objective: ObjectiveBreakdown<f64>,
    pub timings: Timings,
    pub plan: Option<PlanReport>,
    /// Streaming only: most feature columns held at once.
    pub peak_retained_columns: Option<usize>,
    pub config: ConfigEcho,
}

impl RunReport {
    pub fn selected_ids(&self) -> Vec<FeatureId> {
        self.selected.iter().map(|s| s.id).collect()
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

fn breakdown<T: Scalar>(b: ObjectiveBreakdown<T>) -> ObjectiveBreakdown<f64> {
    ObjectiveBreakdown {
        h: b.h.as_f64(),
        diversity: b.diversity.as_f64(),
        relevance: b.relevance.as_f64(),
        diversity_term: b.diversity_term.as_f64(),
        relevance_term: b.relevance_term.as_f64(),
    }
}

fn named(ids: &[FeatureId], names: &[String]) -> Vec<SelectedFeature> {
    ids.iter()
        .map(|&id| SelectedFeature {
            id,
            name: names[id].clone(),
        })
        .collect()
}

fn check_k(d: usize, k: usize) -> Result<(), SelectError> {
    if k == 0 {
        return Err(SelectError::InvalidK { k, min: 1 });
    }
    if k > d {
        return Err(SelectError::KTooLarge { k, available: d });
    }
    Ok(())
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool")
}

/// Single-machine selection over all features.
pub fn centralized_select<T: Scalar>(
    data: &Dataset,
    params: ObjectiveParams<T>,
    variant: GreedyVariant,
) -> Result<RunReport, SelectError> {
    check_k(data.d(), params.k)?;
    let start = Instant::now();
    let mi = MiTable::compute(data)?;
    let cfg = ObjectiveConfig::new(params, mi)?;
    let prepare_ms = ms(start);

    let reduce_start = Instant::now();
    let cache = InfoCache::for_dataset(data);
    let selected = greedy_select(&data.feature_ids(), params.k, variant, &cfg, &cache)?;
    let reduce_ms = ms(reduce_start);
    let objective = breakdown(evaluate(&selected, &cfg, &cache)?);

    Ok(RunReport {
        mode: RunMode::Centralized,
        selected: named(&selected, data.feature_names()),
        objective,
        timings: Timings {
            prepare_ms,
            reduce_ms,
            total_ms: ms(start),
            ..Default::default()
        },
        plan: None,
        peak_retained_columns: None,
        config: ConfigEcho {
            lambda: params.lambda.as_f64(),
            p: params.p,
            k: params.k,
            bins: None,
            seed: None,
            algorithm: variant,
            parallelism: None,
        },
    })
}

fn columns_of(data: &Dataset, ids: &[FeatureId]) -> Vec<(FeatureId, Arc<DiscreteColumn>)> {
    ids.iter()
        .map(|&i| (i, Arc::clone(data.feature(i))))
        .collect()
}

/// Core-set pipeline over `machines` simulated machines run on a pool of
/// `parallelism` threads. The result does not depend on `parallelism`.
pub fn distributed_select<T: Scalar>(
    data: &Dataset,
    params: ObjectiveParams<T>,
    machines: usize,
    seed: u64,
    parallelism: usize,
) -> Result<RunReport, SelectError> {
    check_k(data.d(), params.k)?;
    let k = params.k;
    let workers = pool(parallelism);
    let start = Instant::now();

    let cfg = workers.install(|| -> Result<_, SelectError> {
        ObjectiveConfig::new(params, MiTable::compute(data)?)
    })?;
    let prepare_ms = ms(start);

    let t = Instant::now();
    let plan = random_partition(data.d(), machines, seed)?;
    let parts = plan.parts();
    let partition_ms = ms(t);

    let t = Instant::now();
    let coresets: Vec<Vec<FeatureId>> = workers.install(|| {
        parts
            .par_iter()
            .map(|part| {
                if part.is_empty() {
                    return Ok(Vec::new());
                }
                // a machine only sees its own columns
                let cache = InfoCache::from_columns(columns_of(data, part));
                greedy_select(part, k, GreedyVariant::Greedy, &cfg, &cache)
            })
            .collect::<Result<_, SelectError>>()
    })?;
    let map_ms = ms(t);

    let t = Instant::now();
    let union: Vec<FeatureId> = coresets.iter().flatten().copied().collect();
    let cache = InfoCache::from_columns(columns_of(data, &union));
    let selected = greedy_select(&union, k, GreedyVariant::AltGreedy, &cfg, &cache)?;
    let reduce_ms = ms(t);
    let objective = breakdown(evaluate(&selected, &cfg, &cache)?);

    Ok(RunReport {
        mode: RunMode::Distributed,
        selected: named(&selected, data.feature_names()),
        objective,
        timings: Timings {
            prepare_ms,
            partition_ms,
            map_ms,
            reduce_ms,
            total_ms: ms(start),
        },
        plan: Some(PlanReport {
            machines,
            seed,
            partition_sizes: plan.sizes(),
            assignment: plan.assignment,
            coresets,
        }),
        peak_retained_columns: None,
        config: ConfigEcho {
            lambda: params.lambda.as_f64(),
            p: params.p,
            k,
            bins: None,
            seed: Some(seed),
            algorithm: GreedyVariant::AltGreedy,
            parallelism: Some(parallelism),
        },
    })
}

/// Supplies feature columns on demand, one partition at a time.
pub trait ColumnSource {
    fn n_features(&self) -> usize;
    fn labels(&self) -> &[Arc<DiscreteColumn>];
    fn feature_name(&self, id: FeatureId) -> String;
    /// Columns for `ids`, in the same order.
    fn fetch(&mut self, ids: &[FeatureId]) -> Result<Vec<Arc<DiscreteColumn>>, SelectError>;
}

/// [`ColumnSource`] over an in-memory dataset.
#[derive(Debug, Clone)]
pub struct DatasetStream<'a> {
    data: &'a Dataset,
    fetched: usize,
}

impl<'a> DatasetStream<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        DatasetStream { data, fetched: 0 }
    }

    /// Total columns handed out so far.
    pub fn fetched(&self) -> usize {
        self.fetched
    }
}

impl ColumnSource for DatasetStream<'_> {
    fn n_features(&self) -> usize {
        self.data.d()
    }

    fn labels(&self) -> &[Arc<DiscreteColumn>] {
        self.data.labels()
    }

    fn feature_name(&self, id: FeatureId) -> String {
        self.data.feature_names()[id].clone()
    }

    fn fetch(&mut self, ids: &[FeatureId]) -> Result<Vec<Arc<DiscreteColumn>>, SelectError> {
        self.fetched += ids.len();
        ids.iter()
            .map(|&i| {
                if i < self.data.d() {
                    Ok(Arc::clone(self.data.feature(i)))
                } else {
                    Err(SelectError::UnknownFeature(i))
                }
            })
            .collect()
    }
}

#[derive(Debug, Default)]
struct RetentionCounter {
    current: usize,
    peak: usize,
}

impl RetentionCounter {
    fn hold(&mut self, n: usize) {
        self.current += n;
        self.peak = self.peak.max(self.current);
    }

    fn release(&mut self, n: usize) {
        self.current -= n;
    }
}

/// Streaming version of [`distributed_select`]: partitions are processed in
/// machine order on the calling thread; after each one only its core-set
/// columns stay in memory. MI values and distances at the merge step are
/// recomputed from the retained columns, so the output matches the
/// distributed run for the same `(machines, seed)`.
pub fn streaming_select<T: Scalar, S: ColumnSource>(
    source: &mut S,
    params: ObjectiveParams<T>,
    machines: usize,
    seed: u64,
) -> Result<RunReport, SelectError> {
    let d = source.n_features();
    check_k(d, params.k)?;
    let k = params.k;
    // the whole stream runs on one worker
    let single = pool(1);
    let start = Instant::now();

    let t = Instant::now();
    let plan = random_partition(d, machines, seed)?;
    let parts = plan.parts();
    let partition_ms = ms(t);

    let labels: Vec<Arc<DiscreteColumn>> = source.labels().to_vec();
    let mut retained: BTreeMap<FeatureId, Arc<DiscreteColumn>> = BTreeMap::new();
    let mut counter = RetentionCounter::default();
    let mut coresets = Vec::with_capacity(machines);
    let mut prepare_ms = 0.0;

    let t = Instant::now();
    for part in &parts {
        if part.is_empty() {
            coresets.push(Vec::new());
            continue;
        }
        let cols: Vec<(FeatureId, Arc<DiscreteColumn>)> =
            part.iter().copied().zip(source.fetch(part)?).collect();
        counter.hold(cols.len());

        let mi_start = Instant::now();
        let mi = single.install(|| MiTable::compute_for(&cols, &labels))?;
        prepare_ms += ms(mi_start);
        let cfg = ObjectiveConfig::new(params, mi)?;
        let cache = InfoCache::from_columns(cols.iter().cloned());
        let core = greedy_select(part, k, GreedyVariant::Greedy, &cfg, &cache)?;
        drop(cache);

        for (id, col) in cols {
            if core.contains(&id) {
                retained.insert(id, col);
            }
        }
        counter.release(part.len() - core.len());
        coresets.push(core);
    }
    let map_ms = ms(t) - prepare_ms;

    let t = Instant::now();
    let survivors: Vec<(FeatureId, Arc<DiscreteColumn>)> = retained.into_iter().collect();
    let union: Vec<FeatureId> = survivors.iter().map(|(id, _)| *id).collect();
    let mi = single.install(|| MiTable::compute_for(&survivors, &labels))?;
    let cfg = ObjectiveConfig::new(params, mi)?;
    let cache = InfoCache::from_columns(survivors);
    let selected = greedy_select(&union, k, GreedyVariant::AltGreedy, &cfg, &cache)?;
    let reduce_ms = ms(t);
    let objective = breakdown(evaluate(&selected, &cfg, &cache)?);

    Ok(RunReport {
        mode: RunMode::Streaming,
        selected: selected
            .iter()
            .map(|&id| SelectedFeature {
                id,
                name: source.feature_name(id),
            })
            .collect(),
        objective,
        timings: Timings {
            prepare_ms,
            partition_ms,
            map_ms,
            reduce_ms,
            total_ms: ms(start),
        },
        plan: Some(PlanReport {
            machines,
            seed,
            partition_sizes: plan.sizes(),
            assignment: plan.assignment,
            coresets,
        }),
        peak_retained_columns: Some(counter.peak),
        config: ConfigEcho {
            lambda: params.lambda.as_f64(),
            p: params.p,
            k,
            bins: None,
            seed: Some(seed),
            algorithm: GreedyVariant::AltGreedy,
            parallelism: Some(1),
        },
    })
}
