//! Empirical information measures over discrete columns.
//!
//! All quantities are in bits and use raw frequencies (no smoothing, `0 log 0 = 0`).
//! Every entropy is accumulated over the non-zero cell counts sorted ascending,
//! so the value depends only on the multiset of counts: `H(a, b)` and `H(b, a)`
//! are bit-identical, and so are `H(a, a)` and `H(a)`.

use std::sync::Arc;

use dashmap::DashMap;

use crate::data::{DiscreteColumn, FeatureId};
use crate::error::SelectError;
use crate::scalar::Scalar;

/// Co-occurrence counts of two columns of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    rows: usize,
    cols: usize,
    total: u64,
}

impl ContingencyTable {
    pub fn from_columns(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<Self, SelectError> {
        check_pair(a, b)?;
        let rows = a.cardinality() as usize;
        let cols = b.cardinality() as usize;
        let mut counts = vec![0u64; rows * cols];
        for (&x, &y) in a.codes().iter().zip(b.codes()) {
            counts[x as usize * cols + y as usize] += 1;
        }
        Ok(ContingencyTable {
            counts,
            rows,
            cols,
            total: a.len() as u64,
        })
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cells(&self) -> &[u64] {
        &self.counts
    }

    pub fn row_counts(&self) -> Vec<u64> {
        self.counts
            .chunks(self.cols.max(1))
            .map(|r| r.iter().sum())
            .collect()
    }

    pub fn col_counts(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.cols];
        for row in self.counts.chunks(self.cols.max(1)) {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }

    /// Joint entropy of the two columns.
    pub fn joint_entropy<T: Scalar>(&self) -> T {
        entropy_of_counts(self.counts.iter().copied(), self.total)
    }
}

fn check_pair(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<(), SelectError> {
    if a.len() != b.len() {
        return Err(SelectError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(SelectError::EmptyColumn);
    }
    Ok(())
}

/// `-sum (c/n) log2(c/n)` over the non-zero counts, accumulated in ascending
/// count order.
pub fn entropy_of_counts<T: Scalar>(counts: impl Iterator<Item = u64>, total: u64) -> T {
    let mut nonzero: Vec<u64> = counts.filter(|&c| c > 0).collect();
    nonzero.sort_unstable();
    let n = T::from_u64(total).expect("count fits the scalar type");
    let mut h = T::zero();
    for c in nonzero {
        let p = T::from_u64(c).expect("count fits the scalar type") / n;
        h = h - p * p.log2();
    }
    h
}

fn code_counts(col: &DiscreteColumn) -> Vec<u64> {
    let mut counts = vec![0u64; col.cardinality() as usize];
    for &c in col.codes() {
        counts[c as usize] += 1;
    }
    counts
}

pub fn entropy<T: Scalar>(col: &DiscreteColumn) -> Result<T, SelectError> {
    if col.is_empty() {
        return Err(SelectError::EmptyColumn);
    }
    Ok(entropy_of_counts(
        code_counts(col).into_iter(),
        col.len() as u64,
    ))
}

pub fn joint_entropy<T: Scalar>(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<T, SelectError> {
    Ok(ContingencyTable::from_columns(a, b)?.joint_entropy())
}

/// `I(a; b) = H(a) + H(b) - H(a, b)`, with rounding residue below zero clamped.
pub fn mutual_information<T: Scalar>(
    a: &DiscreteColumn,
    b: &DiscreteColumn,
) -> Result<T, SelectError> {
    let hab = joint_entropy::<T>(a, b)?;
    Ok(mi_from_entropies(entropy(a)?, entropy(b)?, hab))
}

/// Normalized variation of information `1 - I(a; b) / H(a, b)`; 0 when both
/// columns are constant.
pub fn nvi_distance<T: Scalar>(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<T, SelectError> {
    let hab = joint_entropy::<T>(a, b)?;
    Ok(nvi_from_entropies(entropy(a)?, entropy(b)?, hab))
}

/// `I(a; b) / sqrt(H(a) H(b))`; 0 when either marginal entropy is 0.
pub fn normalized_mi<T: Scalar>(a: &DiscreteColumn, b: &DiscreteColumn) -> Result<T, SelectError> {
    let hab = joint_entropy::<T>(a, b)?;
    Ok(nmi_from_entropies(entropy(a)?, entropy(b)?, hab))
}

pub(crate) fn mi_from_entropies<T: Scalar>(ha: T, hb: T, hab: T) -> T {
    (ha + hb - hab).max(T::zero())
}

pub(crate) fn nvi_from_entropies<T: Scalar>(ha: T, hb: T, hab: T) -> T {
    if hab <= T::zero() {
        return T::zero();
    }
    let d = T::one() - mi_from_entropies(ha, hb, hab) / hab;
    d.max(T::zero()).min(T::one())
}

pub(crate) fn nmi_from_entropies<T: Scalar>(ha: T, hb: T, hab: T) -> T {
    if ha <= T::zero() || hb <= T::zero() {
        return T::zero();
    }
    (mi_from_entropies(ha, hb, hab) / (ha * hb).sqrt()).min(T::one())
}

/// Memoized entropies and pairwise distances for a set of feature columns
/// keyed by their global [`FeatureId`].
///
/// Lookups and inserts are safe from many threads. Two threads racing on the
/// same key both compute it; the values are identical, so either insert wins.
#[derive(Debug)]
pub struct InfoCache<T> {
    columns: Vec<Option<Arc<DiscreteColumn>>>,
    entropies: DashMap<FeatureId, T>,
    distances: DashMap<(FeatureId, FeatureId), T>,
    nmi: DashMap<(FeatureId, FeatureId), T>,
}

impl<T: Scalar> InfoCache<T> {
    /// Cache over every feature of `data`.
    pub fn for_dataset(data: &crate::data::Dataset) -> Self {
        Self::from_columns(data.features().iter().cloned().enumerate())
    }

    /// Cache over an explicit subset of columns, e.g. the features of one
    /// partition or the columns retained by a stream.
    pub fn from_columns(
        columns: impl IntoIterator<Item = (FeatureId, Arc<DiscreteColumn>)>,
    ) -> Self {
        let mut slots: Vec<Option<Arc<DiscreteColumn>>> = Vec::new();
        for (id, col) in columns {
            if slots.len() <= id {
                slots.resize(id + 1, None);
            }
            slots[id] = Some(col);
        }
        InfoCache {
            columns: slots,
            entropies: DashMap::new(),
            distances: DashMap::new(),
            nmi: DashMap::new(),
        }
    }

    pub fn column(&self, id: FeatureId) -> Result<&Arc<DiscreteColumn>, SelectError> {
        self.columns
            .get(id)
            .and_then(Option::as_ref)
            .ok_or(SelectError::UnknownFeature(id))
    }

    pub fn contains(&self, id: FeatureId) -> bool {
        self.column(id).is_ok()
    }

    /// Ids of all columns held by the cache, ascending.
    pub fn ids(&self) -> Vec<FeatureId> {
        (0..self.columns.len())
            .filter(|&i| self.columns[i].is_some())
            .collect()
    }

    pub fn entropy(&self, id: FeatureId) -> Result<T, SelectError> {
        if let Some(h) = self.entropies.get(&id) {
            return Ok(*h);
        }
        let h = entropy(self.column(id)?)?;
        self.entropies.insert(id, h);
        Ok(h)
    }

    fn joint(&self, a: FeatureId, b: FeatureId) -> Result<(T, T, T), SelectError> {
        let ha = self.entropy(a)?;
        let hb = self.entropy(b)?;
        let hab = joint_entropy(self.column(a)?, self.column(b)?)?;
        Ok((ha, hb, hab))
    }

    pub fn distance(&self, a: FeatureId, b: FeatureId) -> Result<T, SelectError> {
        if a == b {
            self.column(a)?;
            return Ok(T::zero());
        }
        let key = (a.min(b), a.max(b));
        if let Some(d) = self.distances.get(&key) {
            return Ok(*d);
        }
        let (ha, hb, hab) = self.joint(key.0, key.1)?;
        let d = nvi_from_entropies(ha, hb, hab);
        self.distances.insert(key, d);
        Ok(d)
    }

    /// Distance without populating the pair memo; the per-column entropies are
    /// still memoized. Greedy loops evaluate each pair once and use this.
    pub fn distance_uncached(&self, a: FeatureId, b: FeatureId) -> Result<T, SelectError> {
        if a == b {
            self.column(a)?;
            return Ok(T::zero());
        }
        let key = (a.min(b), a.max(b));
        if let Some(d) = self.distances.get(&key) {
            return Ok(*d);
        }
        let (ha, hb, hab) = self.joint(key.0, key.1)?;
        Ok(nvi_from_entropies(ha, hb, hab))
    }

    pub fn normalized_mi(&self, a: FeatureId, b: FeatureId) -> Result<T, SelectError> {
        let key = (a.min(b), a.max(b));
        if let Some(v) = self.nmi.get(&key) {
            return Ok(*v);
        }
        let (ha, hb, hab) = self.joint(key.0, key.1)?;
        let v = nmi_from_entropies(ha, hb, hab);
        self.nmi.insert(key, v);
        Ok(v)
    }

    /// Number of memoized pair distances.
    pub fn cached_pairs(&self) -> usize {
        self.distances.len()
    }
}
