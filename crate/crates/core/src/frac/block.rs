//! The block protocol: split the (padded) input into m equal blocks, run a
//! one-bit base code on each block, decode the k queried bits and apply f.
//! Queries hitting the same block collide and are answered by a fair coin.

use std::sync::OnceLock;

use rand::{Rng, RngCore};

use crate::boolfn::{BitString, BooleanFunction};
use crate::codes::{earac1, qrac1_sr, rac1_sr, BaseCode, BaseResource};
use crate::error::{Error, Result};
use crate::frac::{Protocol, SequenceIndex};

/// Budget for the number of equal-size partitions enumerated in exact mode.
pub const PARTITION_LIMIT: u128 = 1_000_000;

pub struct BlockProtocol {
    base: BaseCode,
    n: usize,
    n_padded: usize,
    m: usize,
    b: usize,
    f: BooleanFunction,
    name: String,
    partitions: OnceLock<Vec<Vec<u8>>>,
    // exact per-bit success indexed by content_index * b + pos
    bit_success: OnceLock<Option<Vec<f64>>>,
}

impl BlockProtocol {
    /// n-bit input, m messages, base code picked by resource. When m does
    /// not divide n the input is padded with +1 bits; padded coordinates
    /// are never queried.
    pub fn new(resource: BaseResource, n: usize, m: usize, f: BooleanFunction) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::Invalid(format!("need 1 <= m <= n, got m={m} n={n}")));
        }
        let n_padded = n.div_ceil(m) * m;
        let b = n_padded / m;
        if f.arity() > n {
            return Err(Error::Invalid(format!(
                "function arity {} exceeds input length {n}",
                f.arity()
            )));
        }
        let base = match resource {
            BaseResource::RacSr => rac1_sr(b)?,
            BaseResource::QracSr => qrac1_sr(b)?,
            BaseResource::Earac => earac1(b)?,
        };
        let name = format!("block-{}", resource.name());
        Ok(BlockProtocol {
            base,
            n,
            n_padded,
            m,
            b,
            f,
            name,
            partitions: OnceLock::new(),
            bit_success: OnceLock::new(),
        })
    }

    pub fn block_len(&self) -> usize {
        self.b
    }

    pub fn padded_len(&self) -> usize {
        self.n_padded
    }

    pub fn base(&self) -> &BaseCode {
        &self.base
    }

    fn padded(&self, x: &BitString) -> BitString {
        if self.n_padded == self.n {
            return x.clone();
        }
        let mut bits = x.bits().to_vec();
        bits.resize(self.n_padded, 1);
        BitString::from_vec_unchecked(bits)
    }

    /// Number of ways to split [0, n_padded) into m unordered blocks of
    /// size b: n'! / (b!^m m!).
    pub fn partition_count(&self) -> u128 {
        let mut count: u128 = 1;
        // place elements one block at a time: prod C(remaining - 1, b - 1)
        let mut remaining = self.n_padded;
        while remaining > 0 {
            count *= binom_u128(remaining - 1, self.b - 1);
            remaining -= self.b;
        }
        count
    }

    fn partitions(&self) -> Result<&[Vec<u8>]> {
        let count = self.partition_count();
        if count > PARTITION_LIMIT {
            return Err(Error::BudgetExceeded {
                needed: count,
                limit: PARTITION_LIMIT,
            });
        }
        Ok(self.partitions.get_or_init(|| {
            let mut out = Vec::with_capacity(count as usize);
            let mut part = vec![u8::MAX; self.n_padded];
            let mut fill = vec![0usize; self.m];
            enumerate_partitions(&mut part, &mut fill, 0, self.b, &mut out);
            out
        }))
    }

    fn bit_success_table(&self) -> Result<&[f64]> {
        let table = self.bit_success.get_or_init(|| {
            let mut t = Vec::with_capacity((1usize << self.b) * self.b);
            for idx in 0..1usize << self.b {
                let content = BitString::from_index(idx, self.b);
                for pos in 0..self.b {
                    match self.base.exact_bit_success(&content, pos) {
                        Some(p) => t.push(p),
                        None => return None,
                    }
                }
            }
            Some(t)
        });
        match table {
            Some(t) => Ok(t),
            None => Err(Error::ContinuousRandomness),
        }
    }

    fn check_query(&self, x: &BitString, s: &SequenceIndex) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if s.len() != self.f.arity() {
            return Err(Error::LengthMismatch {
                expected: self.f.arity(),
                got: s.len(),
            });
        }
        if s.indices().iter().any(|&i| i >= self.n) {
            return Err(Error::BadSequence {
                n: self.n,
                k: s.len(),
            });
        }
        Ok(())
    }
}

fn binom_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Canonical enumeration: each unassigned smallest element opens the next
/// block, so every unordered partition appears exactly once.
fn enumerate_partitions(
    part: &mut Vec<u8>,
    fill: &mut Vec<usize>,
    elem: usize,
    b: usize,
    out: &mut Vec<Vec<u8>>,
) {
    let n = part.len();
    if elem == n {
        out.push(part.clone());
        return;
    }
    let opened = fill.iter().take_while(|&&f| f > 0).count();
    for blk in 0..fill.len().min(opened + 1) {
        if fill[blk] == b {
            continue;
        }
        // only the first empty block may be opened
        if fill[blk] == 0 && blk != opened {
            break;
        }
        fill[blk] += 1;
        part[elem] = blk as u8;
        enumerate_partitions(part, fill, elem + 1, b, out);
        fill[blk] -= 1;
        part[elem] = u8::MAX;
    }
}

impl Protocol for BlockProtocol {
    fn input_len(&self) -> usize {
        self.n
    }

    fn query_len(&self) -> usize {
        self.f.arity()
    }

    fn function(&self) -> &BooleanFunction {
        &self.f
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn trial(&self, x: &BitString, s: &SequenceIndex, rng: &mut dyn RngCore) -> Result<bool> {
        self.check_query(x, s)?;
        let xp = self.padded(x);
        // uniform partition: shuffle coordinates, chunk into blocks of b
        let mut order: Vec<usize> = (0..self.n_padded).collect();
        for i in (1..self.n_padded).rev() {
            let j = (rng.random::<u64>() as usize) % (i + 1);
            order.swap(i, j);
        }
        let mut slot = vec![0usize; self.n_padded];
        for (pos, &idx) in order.iter().enumerate() {
            slot[idx] = pos;
        }
        let blocks: Vec<usize> = s.indices().iter().map(|&i| slot[i] / self.b).collect();
        for i in 1..blocks.len() {
            if blocks[..i].contains(&blocks[i]) {
                // collision: Bob outputs a fresh fair coin
                return Ok(rng.random::<bool>());
            }
        }
        let mut z = Vec::with_capacity(s.len());
        for (&idx, &blk) in s.indices().iter().zip(&blocks) {
            let mut members: Vec<usize> = order[blk * self.b..(blk + 1) * self.b].to_vec();
            members.sort_unstable();
            let content = xp.select(&members);
            let pos = members.iter().position(|&j| j == idx).unwrap();
            z.push(self.base.trial_decode(&content, pos, &mut *rng)?);
        }
        let z = BitString::from_vec_unchecked(z);
        let truth = self.f.eval(&x.select(s.indices()))?;
        Ok(self.f.eval(&z)? == truth)
    }

    fn exact_success(&self, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        self.check_query(x, s)?;
        let table = self.bit_success_table()?;
        let parts = self.partitions()?;
        let xp = self.padded(x);
        let xs = x.select(s.indices());
        let truth = self.f.eval(&xs)?;
        let k = s.len();
        let mut total = 0.0;
        for part in parts {
            let blocks: Vec<u8> = s.indices().iter().map(|&i| part[i]).collect();
            let collide = (1..k).any(|i| blocks[..i].contains(&blocks[i]));
            if collide {
                total += 0.5;
                continue;
            }
            // per-bit success probabilities under this partition
            let mut p = Vec::with_capacity(k);
            for (&idx, &blk) in s.indices().iter().zip(&blocks) {
                let members: Vec<usize> = (0..self.n_padded).filter(|&j| part[j] == blk).collect();
                let content = xp.select(&members);
                let pos = members.iter().position(|&j| j == idx).unwrap();
                p.push(table[content.to_index() * self.b + pos]);
            }
            let mut success = 0.0;
            for e in 0..1usize << k {
                let mut prob = 1.0;
                let mut z = xs.bits().to_vec();
                for (i, zi) in z.iter_mut().enumerate() {
                    if e >> i & 1 == 1 {
                        prob *= 1.0 - p[i];
                        *zi = -*zi;
                    } else {
                        prob *= p[i];
                    }
                }
                if self.f.eval(&BitString::from_vec_unchecked(z))? == truth {
                    success += prob;
                }
            }
            total += success;
        }
        Ok(total / parts.len() as f64)
    }

    fn exact_cost(&self) -> Option<u128> {
        self.base
            .exact_bit_success(&BitString::from_index(0, self.b), 0)?;
        Some(self.partition_count() * (1u128 << self.f.arity()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::BooleanFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_counts() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::RacSr, 8, 4, f.clone()).unwrap();
        assert_eq!(p.partition_count(), 105);
        let p = BlockProtocol::new(BaseResource::RacSr, 6, 3, f.clone()).unwrap();
        assert_eq!(p.partition_count(), 15);
        let p = BlockProtocol::new(BaseResource::RacSr, 6, 2, f).unwrap();
        assert_eq!(p.partition_count(), 10);
    }

    #[test]
    fn enumerated_partitions_are_distinct_and_complete() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::RacSr, 6, 3, f).unwrap();
        let parts = p.partitions().unwrap();
        assert_eq!(parts.len(), 15);
        let mut seen = std::collections::HashSet::new();
        for part in parts {
            assert!(part.iter().all(|&b| b < 3));
            for blk in 0..3u8 {
                assert_eq!(part.iter().filter(|&&b| b == blk).count(), 2);
            }
            // canonical labels make equality a faithful partition test
            assert!(seen.insert(part.clone()));
        }
    }

    #[test]
    fn padding_rounds_up() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::RacSr, 7, 3, f).unwrap();
        assert_eq!(p.padded_len(), 9);
        assert_eq!(p.block_len(), 3);
    }

    #[test]
    fn exact_matches_monte_carlo() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::RacSr, 6, 3, f).unwrap();
        let x = BitString::from_index(0b101101, 6);
        let s = SequenceIndex::new(6, vec![0, 4]).unwrap();
        let exact = p.exact_success(&x, &s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 400_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            if p.trial(&x, &s, &mut rng).unwrap() {
                hits += 1;
            }
        }
        let est = hits as f64 / trials as f64;
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (est - exact).abs() < 4.5 * sigma,
            "exact {exact} vs mc {est}"
        );
    }

    #[test]
    fn earac_has_no_exact_mode() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::Earac, 8, 4, f).unwrap();
        let x = BitString::from_index(3, 8);
        let s = SequenceIndex::new(8, vec![0, 5]).unwrap();
        assert!(matches!(
            p.exact_success(&x, &s),
            Err(Error::ContinuousRandomness)
        ));
        assert!(p.exact_cost().is_none());
    }

    #[test]
    fn query_validation() {
        let f = BooleanFunction::xor(2).unwrap();
        let p = BlockProtocol::new(BaseResource::RacSr, 8, 4, f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = BitString::from_index(0, 8);
        let bad_len = BitString::from_index(0, 7);
        let s = SequenceIndex::new(8, vec![0, 1]).unwrap();
        assert!(p.trial(&bad_len, &s, &mut rng).is_err());
        let s1 = SequenceIndex::new(8, vec![0]).unwrap();
        assert!(p.trial(&x, &s1, &mut rng).is_err());
    }
}
