//! Bounded, deduplicated collection of the lowest-priority lattice vectors.

use std::collections::{BTreeMap, HashSet};

use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub vector: Vec<i64>,
    pub priority: f64,
    pub source_matrix_id: usize,
    pub tour: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Origin {
    source: usize,
    tour: usize,
}

/// Keeps at most `capacity` distinct vectors (up to sign) with the smallest
/// `(priority, vector)` keys; the largest key is evicted first.
#[derive(Clone, Debug)]
pub struct ShortVectorPool {
    capacity: usize,
    entries: BTreeMap<(OrderedFloat<f64>, Vec<i64>), Origin>,
    present: HashSet<Vec<i64>>,
}

/// Flips the sign so that the first nonzero entry is positive.
pub fn sign_normalize(v: &[i64]) -> Vec<i64> {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => v.iter().map(|&y| -y).collect(),
        _ => v.to_vec(),
    }
}

impl ShortVectorPool {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "pool capacity must be positive");
        Self { capacity, entries: BTreeMap::new(), present: HashSet::new() }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Offers a vector; returns whether it was stored.
    pub fn offer(&mut self, vector: &[i64], priority: f64, source_matrix_id: usize, tour: usize) -> bool {
        if priority.is_nan() || vector.iter().all(|&x| x == 0) {
            return false;
        }
        let v = sign_normalize(vector);
        if self.present.contains(&v) {
            return false;
        }
        let key = (OrderedFloat(priority), v);
        if self.entries.len() >= self.capacity {
            let worst = self.entries.keys().next_back().expect("non-empty pool");
            if key >= *worst {
                return false;
            }
            let (evicted, _) = self.entries.pop_last().expect("non-empty pool");
            self.present.remove(&evicted.1);
        }
        self.present.insert(key.1.clone());
        self.entries.insert(key, Origin { source: source_matrix_id, tour });
        true
    }

    /// Offers every entry of `other`.
    pub fn merge(&mut self, other: &ShortVectorPool) {
        for e in other.entries() {
            self.offer(&e.vector, e.priority, e.source_matrix_id, e.tour);
        }
    }

    /// Entries in ascending priority order.
    pub fn entries(&self) -> Vec<PoolEntry> {
        self.entries
            .iter()
            .map(|((p, v), o)| PoolEntry {
                vector: v.clone(),
                priority: p.0,
                source_matrix_id: o.source,
                tour: o.tour,
            })
            .collect()
    }

    pub fn mean_priority(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        Some(self.entries.keys().map(|(p, _)| p.0).sum::<f64>() / self.entries.len() as f64)
    }

    pub fn from_entries(capacity: usize, entries: &[PoolEntry]) -> Self {
        let mut pool = Self::new(capacity);
        for e in entries {
            pool.offer(&e.vector, e.priority, e.source_matrix_id, e.tour);
        }
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_lowest_and_dedups() {
        let mut p = ShortVectorPool::new(2);
        assert!(p.offer(&[1, 2], 5.0, 0, 0));
        assert!(!p.offer(&[-1, -2], 5.0, 0, 1));
        assert!(p.offer(&[0, 3], 1.0, 0, 0));
        assert!(p.offer(&[2, 2], 2.0, 1, 0));
        assert!(!p.offer(&[4, 4], 9.0, 1, 0));
        let pr: Vec<f64> = p.entries().iter().map(|e| e.priority).collect();
        assert_eq!(pr, vec![1.0, 2.0]);
        assert!(!p.offer(&[0, 0], 0.0, 0, 0));
    }

    #[test]
    fn merge_order_irrelevant() {
        let offers: Vec<(Vec<i64>, f64)> = (0..40)
            .map(|i| (vec![i % 7, i / 7 + 1], ((i * 13) % 11) as f64))
            .collect();
        let mut a = ShortVectorPool::new(5);
        let mut b = ShortVectorPool::new(5);
        for (v, p) in &offers[..20] {
            a.offer(v, *p, 0, 0);
        }
        for (v, p) in &offers[20..] {
            b.offer(v, *p, 1, 0);
        }
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        let key = |p: &ShortVectorPool| p.entries().into_iter().map(|e| (e.vector, e.priority)).collect::<Vec<_>>();
        assert_eq!(key(&ab), key(&ba));
        assert_eq!(ab.len(), 5);
    }
}
