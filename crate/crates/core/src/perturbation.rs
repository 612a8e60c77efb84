//! Bootstrap replicates with out-of-bag complements.
//!
//! Replicate `j` draws from its own ChaCha stream keyed by
//! `(master_seed, j, attempt)`, so the index sets do not depend on how many
//! replicates are requested or on the order they are built in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Redraw budget for a replicate with an empty OOB set or a one-class in-bag set.
pub const MAX_REDRAWS: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationPlan {
    pub m: usize,
    pub master_seed: u64,
}

impl Default for PerturbationPlan {
    fn default() -> Self {
        PerturbationPlan { m: 50, master_seed: 42 }
    }
}

impl PerturbationPlan {
    pub fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::Config(format!("need at least 2 replicates, got {}", self.m)));
        }
        Ok(())
    }
}

/// One bootstrap draw. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicateSet {
    /// `n` indices sampled with replacement, in draw order.
    pub in_bag: Vec<usize>,
    /// Indices never drawn, ascending.
    pub out_of_bag: Vec<usize>,
    /// One-based replicate number.
    pub replicate_id: usize,
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for attempt `attempt` of replicate `replicate_id`.
pub fn replicate_seed(master_seed: u64, replicate_id: usize, attempt: u32) -> u64 {
    mix64(mix64(mix64(master_seed) ^ replicate_id as u64) ^ u64::from(attempt))
}

fn draw(n: usize, seed: u64, replicate_id: usize) -> ReplicateSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = vec![false; n];
    let in_bag: Vec<usize> = (0..n)
        .map(|_| {
            let i = rng.random_range(0..n);
            seen[i] = true;
            i
        })
        .collect();
    let out_of_bag = (0..n).filter(|&i| !seen[i]).collect();
    ReplicateSet { in_bag, out_of_bag, replicate_id }
}

fn is_usable(rep: &ReplicateSet, labels: &[f64]) -> bool {
    if rep.out_of_bag.is_empty() {
        return false;
    }
    let first = labels[rep.in_bag[0]];
    rep.in_bag.iter().any(|&i| labels[i] != first)
}

/// Builds replicate `replicate_id`, redrawing until it has a non-empty OOB
/// set and both classes in bag.
pub fn make_replicate(labels: &[f64], master_seed: u64, replicate_id: usize) -> Result<ReplicateSet> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::Perturbation(format!("need at least 2 samples, got {n}")));
    }
    for attempt in 0..=MAX_REDRAWS {
        let rep = draw(n, replicate_seed(master_seed, replicate_id, attempt), replicate_id);
        if is_usable(&rep, labels) {
            return Ok(rep);
        }
    }
    Err(Error::Perturbation(format!(
        "replicate {replicate_id}: no usable bootstrap draw after {MAX_REDRAWS} redraws (n = {n})"
    )))
}

/// Builds replicates `1..=m` for a dataset with the given labels.
pub fn make_replicates(labels: &[f64], plan: &PerturbationPlan) -> Result<Vec<ReplicateSet>> {
    plan.validate()?;
    (1..=plan.m).map(|j| make_replicate(labels, plan.master_seed, j)).collect()
}

/// Same result as [`make_replicates`], built on the rayon pool.
pub fn make_replicates_par(labels: &[f64], plan: &PerturbationPlan) -> Result<Vec<ReplicateSet>> {
    plan.validate()?;
    (1..=plan.m).into_par_iter().map(|j| make_replicate(labels, plan.master_seed, j)).collect()
}
