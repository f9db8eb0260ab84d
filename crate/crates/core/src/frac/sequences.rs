//! Sequences of distinct indices (the query space S_n^k) and the
//! block-collision probability.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Enumeration budget for S_n^k.
pub const SEQUENCE_ENUM_LIMIT: u128 = 10_000_000;

/// A sequence of k distinct 0-based indices in [0, n); order significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceIndex(Vec<usize>);

impl SequenceIndex {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self> {
        let k = entries.len();
        if k == 0 || k > n {
            return Err(Error::BadSequence { n, k });
        }
        for (i, &e) in entries.iter().enumerate() {
            if e >= n || entries[..i].contains(&e) {
                return Err(Error::BadSequence { n, k });
            }
        }
        Ok(SequenceIndex(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// Rank of this sequence in the lexicographic enumeration of S_n^k.
    pub fn lexicographic_rank(&self, n: usize) -> usize {
        let k = self.0.len();
        let mut rank = 0usize;
        let mut used = vec![false; n];
        for (i, &e) in self.0.iter().enumerate() {
            let smaller_unused = (0..e).filter(|&j| !used[j]).count();
            rank += smaller_unused * falling_factorial(n - i - 1, k - i - 1);
            used[e] = true;
        }
        rank
    }
}

fn falling_factorial(n: usize, k: usize) -> usize {
    (0..k).map(|i| n - i).product()
}

/// |S_n^k| = k! C(n,k) = n (n-1) ... (n-k+1).
pub fn sequence_count(n: usize, k: usize) -> u128 {
    (0..k).map(|i| (n - i) as u128).product()
}

/// All of S_n^k in lexicographic order (the order used as the database
/// layout by the PR-box protocol).
pub fn sequences_enumerate(n: usize, k: usize) -> Result<Vec<SequenceIndex>> {
    if k == 0 || k > n {
        return Err(Error::BadSequence { n, k });
    }
    let count = sequence_count(n, k);
    if count > SEQUENCE_ENUM_LIMIT {
        return Err(Error::BudgetExceeded {
            needed: count,
            limit: SEQUENCE_ENUM_LIMIT,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = Vec::with_capacity(k);
    let mut used = vec![false; n];
    fn recurse(
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<SequenceIndex>,
    ) {
        if current.len() == k {
            out.push(SequenceIndex(current.clone()));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                recurse(n, k, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    recurse(n, k, &mut current, &mut used, &mut out);
    Ok(out)
}

/// Uniform sample from S_n^k.
pub fn sequences_sample<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SequenceIndex> {
    if k == 0 || k > n {
        return Err(Error::BadSequence { n, k });
    }
    // partial Fisher-Yates over 0..n
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + (rng.random::<u64>() as usize) % (n - i);
        pool.swap(i, j);
    }
    pool.truncate(k);
    Ok(SequenceIndex(pool))
}

/// How to evaluate the probability that k random distinct indices land in
/// k different blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionMode {
    /// The exact product formula (n/l)^k C(l,k) / C(n,k).
    Exact,
    /// The lower bound 1 - k(k-1)/(2l).
    Bound,
}

/// Probability that a uniform S in S_n^k has all indices in distinct
/// blocks, for n split into l equal blocks.
pub fn collision_probability(
    blocks: usize,
    n: usize,
    k: usize,
    mode: CollisionMode,
) -> Result<f64> {
    if blocks == 0 || !n.is_multiple_of(blocks) {
        return Err(Error::Divisibility {
            divisor: blocks,
            value: n,
        });
    }
    if k == 0 || k > n {
        return Err(Error::BadSequence { n, k });
    }
    match mode {
        CollisionMode::Exact => {
            if k > blocks {
                return Ok(0.0);
            }
            // prod_{j=1}^{k-1} (1 - j/l) / (1 - j/n)
            let l = blocks as f64;
            let nf = n as f64;
            let mut p = 1.0;
            for j in 1..k {
                p *= (1.0 - j as f64 / l) / (1.0 - j as f64 / nf);
            }
            Ok(p)
        }
        CollisionMode::Bound => Ok(1.0 - (k * (k - 1)) as f64 / (2.0 * blocks as f64)),
    }
}
