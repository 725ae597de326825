//! Deterministic cross-validation fold assignment: seeded shuffle followed by
//! round-robin.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FoldAssignment {
    pub unit_ids: Vec<String>,
    pub fold_of: HashMap<String, usize>,
    pub k: usize,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn fold(&self, unit: &str) -> Option<usize> {
        self.fold_of.get(unit).copied()
    }

    /// Members of fold `f`, in the original `unit_ids` order.
    pub fn members(&self, f: usize) -> Vec<&str> {
        self.unit_ids
            .iter()
            .filter(|u| self.fold_of[*u] == f)
            .map(String::as_str)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in self.fold_of.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Splits `unit_ids` into `k` folds: the ids are shuffled with a ChaCha RNG
/// seeded by `seed`, then dealt round-robin. Fold sizes differ by at most 1
/// and identical inputs always produce the identical assignment.
pub fn split_folds(unit_ids: &[String], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 || unit_ids.len() < k {
        return Err(Error::BadFoldCount {
            units: unit_ids.len(),
            k,
        });
    }
    let mut seen = std::collections::HashSet::with_capacity(unit_ids.len());
    for unit in unit_ids {
        if !seen.insert(unit.as_str()) {
            return Err(Error::DuplicateUnit { id: unit.clone() });
        }
    }
    let mut shuffled: Vec<String> = unit_ids.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let mut fold_of = HashMap::with_capacity(unit_ids.len());
    for (i, unit) in shuffled.into_iter().enumerate() {
        fold_of.insert(unit, i % k);
    }
    Ok(FoldAssignment {
        unit_ids: unit_ids.to_vec(),
        fold_of,
        k,
        seed,
    })
}

/// Mixes a context tag into a base seed (FNV-1a), so that different pipeline
/// stages draw from unrelated deterministic streams.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64 ^ base;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
