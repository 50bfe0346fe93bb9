//! The selection objective.
//!
//! For a feature set `S`:
//!
//! * `D(S)` sums the NVI distance over unordered pairs of `S`;
//! * `g(S)` sums, for every label, the `p` largest normalized mutual
//!   information values `MI(x, label)` with `x` in `S`;
//! * the weighted objective is `h(S) = relevance_scale * g(S) + diversity_scale * D(S)`
//!   with `diversity_scale = lambda` and
//!   `relevance_scale = (1 - lambda) * k (k - 1) / (2 p |L|)`.
//!
//! The unweighted `f = D + g` is the special case where both scales are 1.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{Dataset, DiscreteColumn, FeatureId};
use crate::error::SelectError;
use crate::info::{self, InfoCache};
use crate::scalar::Scalar;

/// User-facing knobs of the weighted objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams<T> {
    pub lambda: T,
    pub p: usize,
    pub k: usize,
}

impl<T: Scalar> ObjectiveParams<T> {
    pub fn new(lambda: T, p: usize, k: usize) -> Self {
        ObjectiveParams { lambda, p, k }
    }
}

impl<T: Scalar> Default for ObjectiveParams<T> {
    fn default() -> Self {
        ObjectiveParams {
            lambda: T::of(0.5),
            p: 10,
            k: 10,
        }
    }
}

/// Normalized mutual information between each known feature and every label.
/// Rows are indexed by global feature id; a table built for a subset of the
/// features leaves the other rows absent.
#[derive(Debug, Clone, PartialEq)]
pub struct MiTable<T> {
    n_labels: usize,
    rows: Vec<Option<Box<[T]>>>,
}

impl<T: Scalar> MiTable<T> {
    /// Full `d x t` table. Rows are computed in parallel on the current rayon
    /// pool; each row is independent, so the result does not depend on the
    /// thread count.
    pub fn compute(data: &Dataset) -> Result<Self, SelectError> {
        let ids = data.feature_ids();
        let cols: Vec<(FeatureId, Arc<DiscreteColumn>)> = ids
            .iter()
            .map(|&i| (i, Arc::clone(data.feature(i))))
            .collect();
        Self::compute_for(&cols, data.labels())
    }

    /// Table restricted to the given feature columns.
    pub fn compute_for(
        features: &[(FeatureId, Arc<DiscreteColumn>)],
        labels: &[Arc<DiscreteColumn>],
    ) -> Result<Self, SelectError> {
        if labels.is_empty() {
            return Err(SelectError::InvalidConfig("no labels".into()));
        }
        let label_h: Vec<T> = labels
            .iter()
            .map(|l| info::entropy(l))
            .collect::<Result<_, _>>()?;
        let computed: Vec<(FeatureId, Box<[T]>)> = features
            .par_iter()
            .map(|(id, col)| {
                let hx: T = info::entropy(col)?;
                let row = labels
                    .iter()
                    .zip(&label_h)
                    .map(|(l, &hl)| {
                        let hxl = info::joint_entropy(col, l)?;
                        Ok(info::nmi_from_entropies(hx, hl, hxl))
                    })
                    .collect::<Result<Vec<T>, SelectError>>()?;
                Ok((*id, row.into_boxed_slice()))
            })
            .collect::<Result<_, SelectError>>()?;
        let mut table = MiTable {
            n_labels: labels.len(),
            rows: Vec::new(),
        };
        for (id, row) in computed {
            table.set_row(id, row);
        }
        Ok(table)
    }

    /// Table from explicit rows; row `i` belongs to feature `i`.
    pub fn from_rows(n_labels: usize, rows: Vec<Vec<T>>) -> Result<Self, SelectError> {
        let mut table = MiTable {
            n_labels,
            rows: Vec::new(),
        };
        for (id, row) in rows.into_iter().enumerate() {
            if row.len() != n_labels {
                return Err(SelectError::DimensionMismatch(format!(
                    "row {id} has {} entries, expected {n_labels}",
                    row.len()
                )));
            }
            table.set_row(id, row.into_boxed_slice());
        }
        Ok(table)
    }

    fn set_row(&mut self, id: FeatureId, row: Box<[T]>) {
        if self.rows.len() <= id {
            self.rows.resize(id + 1, None);
        }
        self.rows[id] = Some(row);
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn row(&self, id: FeatureId) -> Result<&[T], SelectError> {
        self.rows
            .get(id)
            .and_then(|r| r.as_deref())
            .ok_or(SelectError::UnknownFeature(id))
    }

    pub fn contains(&self, id: FeatureId) -> bool {
        self.row(id).is_ok()
    }

    fn entries(&self) -> impl Iterator<Item = T> + '_ {
        self.rows.iter().flatten().flat_map(|r| r.iter().copied())
    }
}

/// Resolved objective: scales, `p`, `k` and the MI table.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveConfig<T> {
    lambda: Option<T>,
    p: usize,
    k: usize,
    relevance_scale: T,
    diversity_scale: T,
    mi: MiTable<T>,
}

impl<T: Scalar> ObjectiveConfig<T> {
    /// The weighted objective `h`.
    ///
    /// For `k = 1` the pair count `k (k - 1)` is taken as 1 so the relevance
    /// term keeps a positive weight; the diversity term is empty there anyway.
    pub fn new(params: ObjectiveParams<T>, mi: MiTable<T>) -> Result<Self, SelectError> {
        let ObjectiveParams { lambda, p, k } = params;
        if !(lambda >= T::zero() && lambda <= T::one()) {
            return Err(SelectError::InvalidConfig(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        Self::check_counts(p, k, &mi)?;
        let pairs = T::of_usize((k * k.saturating_sub(1)).max(1));
        let coefficient = pairs / (T::of(2.0) * T::of_usize(p) * T::of_usize(mi.n_labels()));
        let mut cfg = Self::with_scales(p, k, lambda, (T::one() - lambda) * coefficient, mi)?;
        cfg.lambda = Some(lambda);
        Ok(cfg)
    }

    /// The unweighted `f = D + g`.
    pub fn unweighted(p: usize, k: usize, mi: MiTable<T>) -> Result<Self, SelectError> {
        Self::with_scales(p, k, T::one(), T::one(), mi)
    }

    /// Arbitrary non-negative weights on the two terms.
    pub fn with_scales(
        p: usize,
        k: usize,
        diversity_scale: T,
        relevance_scale: T,
        mi: MiTable<T>,
    ) -> Result<Self, SelectError> {
        Self::check_counts(p, k, &mi)?;
        if !(diversity_scale >= T::zero() && relevance_scale >= T::zero()) {
            return Err(SelectError::InvalidConfig(
                "scales must be non-negative".into(),
            ));
        }
        if diversity_scale == T::zero() && relevance_scale == T::zero() {
            return Err(SelectError::InvalidConfig("both scales are zero".into()));
        }
        Ok(ObjectiveConfig {
            lambda: None,
            p,
            k,
            relevance_scale,
            diversity_scale,
            mi,
        })
    }

    fn check_counts(p: usize, k: usize, mi: &MiTable<T>) -> Result<(), SelectError> {
        if p == 0 {
            return Err(SelectError::InvalidConfig("p must be at least 1".into()));
        }
        if k == 0 {
            return Err(SelectError::InvalidK { k, min: 1 });
        }
        if mi.n_labels() == 0 {
            return Err(SelectError::InvalidConfig("no labels".into()));
        }
        let tol = T::of(1e-12);
        if let Some(bad) = mi.entries().find(|v| !(*v >= -tol && *v <= T::one() + tol)) {
            return Err(SelectError::InvalidConfig(format!(
                "MI entry {bad} outside [0, 1]"
            )));
        }
        Ok(())
    }

    pub fn lambda(&self) -> Option<T> {
        self.lambda
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_labels(&self) -> usize {
        self.mi.n_labels()
    }

    pub fn relevance_scale(&self) -> T {
        self.relevance_scale
    }

    pub fn diversity_scale(&self) -> T {
        self.diversity_scale
    }

    pub fn mi(&self) -> &MiTable<T> {
        &self.mi
    }

    /// Same scales over a different MI table (e.g. one recomputed at a merge step).
    pub fn with_mi(&self, mi: MiTable<T>) -> Result<Self, SelectError> {
        if mi.n_labels() != self.n_labels() {
            return Err(SelectError::DimensionMismatch(format!(
                "MI table has {} labels, expected {}",
                mi.n_labels(),
                self.n_labels()
            )));
        }
        Ok(ObjectiveConfig { mi, ..self.clone() })
    }
}

/// Per-label multiset of the `p` largest MI values among selected features.
/// Values below the `p`-th largest can never re-enter the top `p` as the set
/// grows, so only the top `p` are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TopPTracker<T> {
    p: usize,
    // descending, at most p entries per label
    top: Vec<Vec<T>>,
    sums: Vec<T>,
}

impl<T: Scalar> TopPTracker<T> {
    pub fn new(p: usize, n_labels: usize) -> Self {
        TopPTracker {
            p,
            top: vec![Vec::with_capacity(p.min(64)); n_labels],
            sums: vec![T::zero(); n_labels],
        }
    }

    /// The `p`-th largest stored value for `label`, or 0 with fewer than `p` stored.
    pub fn threshold(&self, label: usize) -> T {
        let top = &self.top[label];
        if top.len() == self.p {
            top[self.p - 1]
        } else {
            T::zero()
        }
    }

    /// `g(S + x) - g(S)` for a feature with MI row `row`.
    pub fn marginal(&self, row: &[T]) -> T {
        row.iter()
            .enumerate()
            .map(|(l, &v)| (v - self.threshold(l)).max(T::zero()))
            .fold(T::zero(), |acc, v| acc + v)
    }

    pub fn insert(&mut self, row: &[T]) {
        for (l, &v) in row.iter().enumerate() {
            let top = &mut self.top[l];
            if top.len() == self.p {
                if v <= top[self.p - 1] {
                    continue;
                }
                let dropped = top.pop().expect("p >= 1");
                self.sums[l] = self.sums[l] - dropped;
            }
            let at = top.partition_point(|&x| x >= v);
            top.insert(at, v);
            self.sums[l] = self.sums[l] + v;
        }
    }

    /// Running `g(S)` from the incremental per-label sums.
    pub fn value(&self) -> T {
        self.sums.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    /// `g(S)` re-summed from the stored values.
    pub fn recompute(&self) -> T {
        self.top
            .iter()
            .map(|t| t.iter().fold(T::zero(), |acc, &v| acc + v))
            .fold(T::zero(), |acc, v| acc + v)
    }
}

/// Incremental state of one greedy run over a fixed candidate list.
#[derive(Debug, Clone)]
pub struct SelectionState<T> {
    candidates: Vec<FeatureId>,
    selected: Vec<FeatureId>,
    is_selected: Vec<bool>,
    dist_sum: Vec<T>,
    trackers: TopPTracker<T>,
    objective: T,
}

impl<T: Scalar> SelectionState<T> {
    /// Candidates are deduplicated and sorted by id.
    pub fn new(candidates: &[FeatureId], cfg: &ObjectiveConfig<T>) -> Self {
        let mut candidates = candidates.to_vec();
        candidates.sort_unstable();
        candidates.dedup();
        let m = candidates.len();
        SelectionState {
            candidates,
            selected: Vec::new(),
            is_selected: vec![false; m],
            dist_sum: vec![T::zero(); m],
            trackers: TopPTracker::new(cfg.p(), cfg.n_labels()),
            objective: T::zero(),
        }
    }

    pub fn candidates(&self) -> &[FeatureId] {
        &self.candidates
    }

    pub fn selected(&self) -> &[FeatureId] {
        &self.selected
    }

    pub fn trackers(&self) -> &TopPTracker<T> {
        &self.trackers
    }

    /// Current weighted objective of the selected set.
    pub fn objective_value(&self) -> T {
        self.objective
    }

    fn slot(&self, id: FeatureId) -> Result<usize, SelectError> {
        self.candidates
            .binary_search(&id)
            .map_err(|_| SelectError::UnknownFeature(id))
    }

    pub fn is_selected(&self, id: FeatureId) -> bool {
        self.slot(id).map(|s| self.is_selected[s]).unwrap_or(false)
    }

    /// Unweighted `sum_{x in S} d(x, id)`.
    pub fn dist_sum(&self, id: FeatureId) -> Result<T, SelectError> {
        Ok(self.dist_sum[self.slot(id)?])
    }

    /// Slot-indexed view used by the greedy loop.
    pub(crate) fn slots(&self) -> (&[FeatureId], &[bool], &[T]) {
        (&self.candidates, &self.is_selected, &self.dist_sum)
    }

    /// Unweighted `g(S + x) - g(S)`.
    pub fn marginal_g(&self, x: FeatureId, cfg: &ObjectiveConfig<T>) -> Result<T, SelectError> {
        let slot = self.slot(x)?;
        if self.is_selected[slot] {
            return Err(SelectError::AlreadySelected(x));
        }
        Ok(self.trackers.marginal(cfg.mi().row(x)?))
    }

    /// Adds `x` and refreshes every other candidate's distance sum.
    pub fn add(
        &mut self,
        x: FeatureId,
        cfg: &ObjectiveConfig<T>,
        cache: &InfoCache<T>,
    ) -> Result<(), SelectError> {
        let slot = self.slot(x)?;
        let gain = self.marginal_g(x, cfg)?;
        self.objective = self.objective
            + cfg.relevance_scale() * gain
            + cfg.diversity_scale() * self.dist_sum[slot];
        self.trackers.insert(cfg.mi().row(x)?);
        self.is_selected[slot] = true;
        self.selected.push(x);
        for (s, &u) in self.candidates.iter().enumerate() {
            if s != slot {
                self.dist_sum[s] = self.dist_sum[s] + cache.distance_uncached(x, u)?;
            }
        }
        Ok(())
    }
}

/// Objective value of a set split into its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveBreakdown<T> {
    /// Weighted objective.
    pub h: T,
    /// Unweighted sum of pairwise distances.
    pub diversity: T,
    /// Unweighted relevance `g`.
    pub relevance: T,
    /// `diversity_scale * diversity`.
    pub diversity_term: T,
    /// `relevance_scale * relevance`.
    pub relevance_term: T,
}

fn sorted_set(set: &[FeatureId]) -> Vec<FeatureId> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// `D(S)`: NVI summed over unordered pairs, in ascending id order.
pub fn diversity<T: Scalar>(set: &[FeatureId], cache: &InfoCache<T>) -> Result<T, SelectError> {
    let s = sorted_set(set);
    for &x in &s {
        cache.column(x)?;
    }
    let mut total = T::zero();
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[i + 1..] {
            total = total + cache.distance(a, b)?;
        }
    }
    Ok(total)
}

/// Unweighted `g(S)` from scratch.
pub fn relevance_g<T: Scalar>(
    set: &[FeatureId],
    cfg: &ObjectiveConfig<T>,
) -> Result<T, SelectError> {
    let s = sorted_set(set);
    let rows: Vec<&[T]> = s
        .iter()
        .map(|&x| cfg.mi().row(x))
        .collect::<Result<_, _>>()?;
    let mut total = T::zero();
    let mut column: Vec<T> = Vec::with_capacity(rows.len());
    for l in 0..cfg.n_labels() {
        column.clear();
        column.extend(rows.iter().map(|r| r[l]));
        column.sort_by(|a, b| b.partial_cmp(a).expect("MI values are finite"));
        total = total
            + column
                .iter()
                .take(cfg.p())
                .fold(T::zero(), |acc, &v| acc + v);
    }
    Ok(total)
}

/// `g(S + x) - g(S)` against a selection state.
pub fn marginal_g<T: Scalar>(
    x: FeatureId,
    state: &SelectionState<T>,
    cfg: &ObjectiveConfig<T>,
) -> Result<T, SelectError> {
    state.marginal_g(x, cfg)
}

pub fn h_value<T: Scalar>(
    set: &[FeatureId],
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
) -> Result<T, SelectError> {
    Ok(evaluate(set, cfg, cache)?.h)
}

pub fn evaluate<T: Scalar>(
    set: &[FeatureId],
    cfg: &ObjectiveConfig<T>,
    cache: &InfoCache<T>,
) -> Result<ObjectiveBreakdown<T>, SelectError> {
    let diversity = diversity(set, cache)?;
    let relevance = relevance_g(set, cfg)?;
    let diversity_term = cfg.diversity_scale() * diversity;
    let relevance_term = cfg.relevance_scale() * relevance;
    Ok(ObjectiveBreakdown {
        h: relevance_term + diversity_term,
        diversity,
        relevance,
        diversity_term,
        relevance_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DiscreteColumn;

    fn one_label(values: &[f64]) -> MiTable<f64> {
        MiTable::from_rows(1, values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    fn fixture_cache() -> InfoCache<f64> {
        let cols = [[0u32, 0, 1, 1], [0, 1, 0, 1], [0, 0, 0, 1]];
        InfoCache::from_columns(
            cols.iter()
                .enumerate()
                .map(|(i, c)| (i, Arc::new(DiscreteColumn::from_codes(c)))),
        )
    }

    #[test]
    fn diversity_examples() {
        let cache = fixture_cache();
        assert_eq!(diversity::<f64>(&[], &cache).unwrap(), 0.0);
        assert_eq!(diversity(&[1], &cache).unwrap(), 0.0);
        // pairwise values from direct NVI evaluation
        let ab = 1.0;
        let ac = info::nvi_distance::<f64>(
            &DiscreteColumn::from_codes(&[0, 0, 1, 1]),
            &DiscreteColumn::from_codes(&[0, 0, 0, 1]),
        )
        .unwrap();
        let bc = info::nvi_distance::<f64>(
            &DiscreteColumn::from_codes(&[0, 1, 0, 1]),
            &DiscreteColumn::from_codes(&[0, 0, 0, 1]),
        )
        .unwrap();
        assert!((ac - 0.792481).abs() < 1e-6 && (bc - 0.792481).abs() < 1e-6);
        let d = diversity(&[2, 0, 1], &cache).unwrap();
        assert!((d - (ab + ac + bc)).abs() < 1e-12);
        assert!((d - 2.584962).abs() < 1e-6);
        assert_eq!(
            diversity(&[0, 9], &cache),
            Err(SelectError::UnknownFeature(9))
        );

        let dup = InfoCache::<f64>::from_columns(
            (0..2).map(|i| (i, Arc::new(DiscreteColumn::from_codes(&[1, 0, 1])))),
        );
        assert_eq!(diversity(&[0, 1], &dup).unwrap(), 0.0);
    }

    #[test]
    fn relevance_examples() {
        let cfg = ObjectiveConfig::unweighted(2, 3, one_label(&[0.9, 0.5, 0.2])).unwrap();
        assert_eq!(relevance_g::<f64>(&[], &cfg).unwrap(), 0.0);
        assert!((relevance_g(&[0, 1, 2], &cfg).unwrap() - 1.4).abs() < 1e-15);
        assert!((relevance_g(&[2], &cfg).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(relevance_g(&[5], &cfg), Err(SelectError::UnknownFeature(5)));

        // p = d with one label is the modular sum
        let values = [0.3, 0.1, 0.7, 0.25];
        let cfg = ObjectiveConfig::unweighted(4, 2, one_label(&values)).unwrap();
        let g = relevance_g(&[0, 1, 2, 3], &cfg).unwrap();
        assert!((g - values.iter().sum::<f64>()).abs() < 1e-15);
        assert!((relevance_g(&[1, 3], &cfg).unwrap() - 0.35).abs() < 1e-15);
    }

    #[test]
    fn marginal_examples() {
        let cache = InfoCache::<f64>::from_columns(
            (0..4).map(|i| (i, Arc::new(DiscreteColumn::from_codes(&[i as u32, 1, 0])))),
        );
        let mi = MiTable::from_rows(
            2,
            vec![
                vec![0.9, 0.1],
                vec![0.5, 0.3],
                vec![0.4, 0.0],
                vec![0.7, 0.2],
            ],
        )
        .unwrap();
        let cfg = ObjectiveConfig::<f64>::unweighted(2, 4, mi).unwrap();
        let mut state = SelectionState::new(&[0, 1, 2, 3], &cfg);
        // empty set: every threshold is zero
        assert!((marginal_g(3, &state, &cfg).unwrap() - 0.9).abs() < 1e-15);

        state.add(0, &cfg, &cache).unwrap();
        state.add(1, &cfg, &cache).unwrap();
        assert_eq!(
            marginal_g(0, &state, &cfg),
            Err(SelectError::AlreadySelected(0))
        );
        // label 0 holds {0.9, 0.5}: 0.4 is below the threshold, 0.7 gains 0.2
        let label0_only = |x: usize| {
            let row = cfg.mi().row(x).unwrap()[0];
            (row - state.trackers().threshold(0)).max(0.0)
        };
        assert_eq!(label0_only(2), 0.0);
        assert!((label0_only(3) - 0.2).abs() < 1e-15);
        for x in [2, 3] {
            let brute =
                relevance_g(&[0, 1, x], &cfg).unwrap() - relevance_g(&[0, 1], &cfg).unwrap();
            assert!((marginal_g(x, &state, &cfg).unwrap() - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn h_value_endpoints() {
        let cache = fixture_cache();
        let mi = one_label(&[0.6, 0.2, 0.45]);
        let set = [0, 1, 2];
        let h1 = ObjectiveConfig::new(ObjectiveParams::new(1.0, 1, 2), mi.clone()).unwrap();
        assert!(
            (h_value(&set, &h1, &cache).unwrap() - diversity(&set, &cache).unwrap()).abs() < 1e-12
        );
        let h0 = ObjectiveConfig::new(ObjectiveParams::new(0.0, 1, 2), mi.clone()).unwrap();
        let coeff = 2.0 * 1.0 / (2.0 * 1.0 * 1.0);
        assert!(
            (h_value(&set, &h0, &cache).unwrap() - coeff * relevance_g(&set, &h0).unwrap()).abs()
                < 1e-12
        );
        // lambda = 0.5, k = 2, p = 1, one label: 0.5 * g + 0.5 * D; g = max MI = 0.6
        let half = ObjectiveConfig::new(ObjectiveParams::new(0.5, 1, 2), mi).unwrap();
        let expected = 0.5 * 0.6 + 0.5 * 2.584962500721156;
        assert!((h_value(&set, &half, &cache).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let mi = one_label(&[0.5]);
        assert!(ObjectiveConfig::new(ObjectiveParams::new(1.5, 1, 2), mi.clone()).is_err());
        assert!(ObjectiveConfig::new(ObjectiveParams::new(0.5, 0, 2), mi.clone()).is_err());
        assert!(ObjectiveConfig::new(ObjectiveParams::new(0.5, 1, 0), mi.clone()).is_err());
        assert!(ObjectiveConfig::with_scales(1, 2, 0.0, 0.0, mi.clone()).is_err());
        assert!(ObjectiveConfig::unweighted(1, 2, one_label(&[1.5])).is_err());
        let k1 = ObjectiveConfig::new(ObjectiveParams::new(0.0, 10, 1), mi).unwrap();
        assert!(k1.relevance_scale() > 0.0);
        assert_eq!(k1.diversity_scale(), 0.0);
    }

    #[test]
    fn mi_table_from_dataset() {
        let ds = Dataset::new(
            4,
            vec![
                ("a".into(), DiscreteColumn::from_codes(&[0, 0, 1, 1])),
                ("b".into(), DiscreteColumn::from_codes(&[0, 1, 0, 1])),
            ],
            vec![("y".into(), DiscreteColumn::from_codes(&[0, 0, 1, 1]))],
            false,
        )
        .unwrap();
        let table = MiTable::<f64>::compute(&ds).unwrap();
        assert_eq!(table.row(0).unwrap(), &[1.0]);
        assert_eq!(table.row(1).unwrap(), &[0.0]);
        assert!(table.row(2).is_err());
    }
}
