//! Private-randomness protocols built from covering codes, with the shared
//! randomness replaced by a small derandomized table of (permutation, mask)
//! pairs.

use num_bigint::BigInt;
use rand::{Rng, RngCore};

use crate::boolfn::{BitString, BooleanFunction};
use crate::codes::{binomial, greedy_covering_code, krawtchouk, CoveringCode};
use crate::error::{Error, Result};
use crate::frac::sequences::{sequence_count, sequences_enumerate, SequenceIndex};
use crate::frac::Protocol;

pub const NEWMAN_MAX_RETRIES: usize = 20;

/// Exhaustive-verification budget: 2^n * |S_n^k| * rows.
pub const NEWMAN_VERIFY_LIMIT: u128 = 1_000_000_000;

/// One row of shared randomness: a permutation of [0, n) and a sign mask.
#[derive(Debug, Clone)]
pub struct PermMask {
    pub perm: Vec<usize>,
    pub mask: BitString,
}

impl PermMask {
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = (rng.random::<u64>() as usize) % (i + 1);
            perm.swap(i, j);
        }
        PermMask {
            perm,
            mask: BitString::uniform(n, rng),
        }
    }

    pub fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.perm.len()];
        for (p, &i) in self.perm.iter().enumerate() {
            inv[i] = p;
        }
        inv
    }
}

/// Sample ceil(n / slack^2) rows and verify exhaustively that for every
/// (x, S) the average success over the table stays within `slack` of
/// `target`. Retries with fresh rows up to NEWMAN_MAX_RETRIES times.
///
/// `success` reports the success probability of one row on one (x, S).
pub fn newman_derandomize<F, R>(
    n: usize,
    k: usize,
    target: f64,
    slack: f64,
    success: F,
    rng: &mut R,
) -> Result<Vec<PermMask>>
where
    F: Fn(&PermMask, &BitString, &SequenceIndex) -> Result<f64>,
    R: Rng + ?Sized,
{
    if !(0.0..=1.0).contains(&target) || slack <= 0.0 {
        return Err(Error::Invalid(format!(
            "need target in [0,1] and slack > 0, got target={target} slack={slack}"
        )));
    }
    if slack > target {
        return Err(Error::SlackTooLarge { target, slack });
    }
    let rows = (n as f64 / (slack * slack)).ceil() as usize;
    let seqs = sequences_enumerate(n, k)?;
    let work = (1u128 << n) * sequence_count(n, k) * rows as u128;
    if work > NEWMAN_VERIFY_LIMIT {
        return Err(Error::BudgetExceeded {
            needed: work,
            limit: NEWMAN_VERIFY_LIMIT,
        });
    }
    for _ in 0..NEWMAN_MAX_RETRIES {
        let table: Vec<PermMask> = (0..rows).map(|_| PermMask::random(n, rng)).collect();
        let mut ok = true;
        'verify: for idx in 0..1usize << n {
            let x = BitString::from_index(idx, n);
            for s in &seqs {
                let mut sum = 0.0;
                for row in &table {
                    sum += success(row, &x, s)?;
                }
                if sum / (rows as f64) < target - slack {
                    ok = false;
                    break 'verify;
                }
            }
        }
        if ok {
            return Ok(table);
        }
    }
    Err(Error::DerandomizationFailed {
        attempts: NEWMAN_MAX_RETRIES,
        target,
        slack,
    })
}

/// Blockwise covering-code protocol with a derandomized table. Alice sends
/// the nearest codeword of each block of pi(x . r); Bob inverts the row to
/// read his bits, colliding blocks cost a coin flip.
pub struct FracPr {
    n: usize,
    l: usize,
    b: usize,
    f: BooleanFunction,
    code: CoveringCode,
    table: Vec<PermMask>,
}

impl FracPr {
    /// Build the greedy covering code for block length n/l and radius r,
    /// then derandomize against the code's own exact success map.
    pub fn new<R: Rng + ?Sized>(
        n: usize,
        l: usize,
        radius: usize,
        f: BooleanFunction,
        target: f64,
        slack: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if l == 0 || !n.is_multiple_of(l) {
            return Err(Error::Divisibility {
                divisor: l,
                value: n,
            });
        }
        let b = n / l;
        let code = greedy_covering_code(b, radius)?;
        let k = f.arity();
        let stub = FracPr {
            n,
            l,
            b,
            f: f.clone(),
            code,
            table: Vec::new(),
        };
        let table = newman_derandomize(
            n,
            k,
            target,
            slack,
            |row, x, s| stub.row_success(row, x, s),
            rng,
        )?;
        Ok(FracPr { table, ..stub })
    }

    pub const fn blocks(&self) -> usize {
        self.l
    }

    pub fn code(&self) -> &CoveringCode {
        &self.code
    }

    pub fn table(&self) -> &[PermMask] {
        &self.table
    }

    /// Total message length in bits: l log2 |C| for the codewords plus
    /// log2(rows) for Alice's row announcement.
    pub fn message_bits(&self) -> f64 {
        self.l as f64 * (self.code.codewords().len() as f64).log2()
            + (self.table.len().max(1) as f64).log2()
    }

    /// Bob's decoded bits under one row, or None on a block collision.
    fn decode_row(
        &self,
        row: &PermMask,
        x: &BitString,
        s: &SequenceIndex,
    ) -> Result<Option<BitString>> {
        let xr = x.pointwise_mul(&row.mask)?;
        let inv = row.inverse_perm();
        let mut block_of = Vec::with_capacity(s.len());
        for &i in s.indices() {
            block_of.push(inv[i] / self.b);
        }
        for i in 1..block_of.len() {
            if block_of[..i].contains(&block_of[i]) {
                return Ok(None);
            }
        }
        // w_p = (x . r)_{perm(p)}; z = blockwise nearest codewords of w
        let mut y = Vec::with_capacity(s.len());
        for (&i, &blk) in s.indices().iter().zip(&block_of) {
            let members: Vec<usize> = (blk * self.b..(blk + 1) * self.b)
                .map(|p| row.perm[p])
                .collect();
            let w = xr.select(&members);
            let z = self.code.nearest_codeword(&w)?;
            y.push(z.get(inv[i] % self.b) * row.mask.get(i));
        }
        Ok(Some(BitString::from_vec_unchecked(y)))
    }

    fn row_success(&self, row: &PermMask, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        let truth = self.f.eval(&x.select(s.indices()))?;
        match self.decode_row(row, x, s)? {
            None => Ok(0.5),
            Some(y) => Ok(if self.f.eval(&y)? == truth { 1.0 } else { 0.0 }),
        }
    }

    fn check_query(&self, x: &BitString, s: &SequenceIndex) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if s.len() != self.f.arity() || s.indices().iter().any(|&i| i >= self.n) {
            return Err(Error::BadSequence {
                n: self.n,
                k: s.len(),
            });
        }
        Ok(())
    }
}

impl Protocol for FracPr {
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
        "frac-pr"
    }

    fn trial(&self, x: &BitString, s: &SequenceIndex, rng: &mut dyn RngCore) -> Result<bool> {
        self.check_query(x, s)?;
        let row = &self.table[(rng.random::<u64>() as usize) % self.table.len()];
        let truth = self.f.eval(&x.select(s.indices()))?;
        match self.decode_row(row, x, s)? {
            None => Ok(rng.random::<bool>()),
            Some(y) => Ok(self.f.eval(&y)? == truth),
        }
    }

    fn exact_success(&self, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        self.check_query(x, s)?;
        let mut sum = 0.0;
        for row in &self.table {
            sum += self.row_success(row, x, s)?;
        }
        Ok(sum / self.table.len() as f64)
    }

    fn exact_cost(&self) -> Option<u128> {
        Some(self.table.len() as u128)
    }
}

/// XOR_k over a single full-length covering code: Alice sends the nearest
/// codeword of pi(x . r), Bob answers with the parity of his k positions.
pub struct XorRacPr {
    n: usize,
    f: BooleanFunction,
    code: CoveringCode,
    table: Vec<PermMask>,
}

impl XorRacPr {
    pub fn new<R: Rng + ?Sized>(
        n: usize,
        radius: usize,
        k: usize,
        target: f64,
        slack: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let code = greedy_covering_code(n, radius)?;
        let f = BooleanFunction::xor(k)?;
        let stub = XorRacPr {
            n,
            f,
            code,
            table: Vec::new(),
        };
        let table = newman_derandomize(
            n,
            k,
            target,
            slack,
            |row, x, s| stub.row_success(row, x, s),
            rng,
        )?;
        Ok(XorRacPr { table, ..stub })
    }

    pub fn code(&self) -> &CoveringCode {
        &self.code
    }

    pub fn table(&self) -> &[PermMask] {
        &self.table
    }

    /// Communication cost: one codeword index plus the private row index.
    pub fn message_bits(&self) -> f64 {
        (self.code.codewords().len() as f64).log2() + (self.table.len() as f64).log2()
    }

    /// Bob's view of all n bits under one row.
    fn decode_row(&self, row: &PermMask, x: &BitString) -> Result<BitString> {
        let xr = x.pointwise_mul(&row.mask)?;
        let w = xr.select(&row.perm);
        let z = self.code.nearest_codeword(&w)?;
        let inv = row.inverse_perm();
        let y: Vec<i8> = (0..self.n)
            .map(|i| z.get(inv[i]) * row.mask.get(i))
            .collect();
        Ok(BitString::from_vec_unchecked(y))
    }

    fn row_success(&self, row: &PermMask, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        let y = self.decode_row(row, x)?;
        let truth = self.f.eval(&x.select(s.indices()))?;
        Ok(if self.f.eval(&y.select(s.indices()))? == truth {
            1.0
        } else {
            0.0
        })
    }

    fn check_query(&self, x: &BitString, s: &SequenceIndex) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if s.len() != self.f.arity() || s.indices().iter().any(|&i| i >= self.n) {
            return Err(Error::BadSequence {
                n: self.n,
                k: s.len(),
            });
        }
        Ok(())
    }
}

impl Protocol for XorRacPr {
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
        "xor-rac-pr"
    }

    fn trial(&self, x: &BitString, s: &SequenceIndex, rng: &mut dyn RngCore) -> Result<bool> {
        self.check_query(x, s)?;
        let row = &self.table[(rng.random::<u64>() as usize) % self.table.len()];
        Ok(self.row_success(row, x, s)? > 0.5)
    }

    fn exact_success(&self, x: &BitString, s: &SequenceIndex) -> Result<f64> {
        self.check_query(x, s)?;
        let mut sum = 0.0;
        for row in &self.table {
            sum += self.row_success(row, x, s)?;
        }
        Ok(sum / self.table.len() as f64)
    }

    fn exact_cost(&self) -> Option<u128> {
        Some(self.table.len() as u128)
    }
}

/// Count, over all C(n, k) unordered k-subsets, how many have
/// parity(x_S) == parity(y_S). With d the Hamming distance between x and
/// y this equals (C(n,k) + K_k(d)) / 2 where K is the Krawtchouk
/// polynomial; the identity is exercised by exact integer comparison.
pub fn count_parity_agreement(
    x: &BitString,
    y: &BitString,
    k: usize,
) -> Result<(usize, BigInt, BigInt)> {
    let n = x.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if k == 0 || k > n {
        return Err(Error::BadSequence { n, k });
    }
    let d = x.hamming_distance(y);
    // agree over S iff |S intersect D| is even, D the disagreement set
    let mut agree = BigInt::from(0);
    for j in (0..=k.min(d)).step_by(2) {
        agree += binomial(d, j) * binomial(n - d, k - j);
    }
    let total = binomial(n, k);
    Ok((d, agree, total))
}

/// The closed form matching `count_parity_agreement`: agreement count
/// (C(n,k) + K_k(d)) / 2 as an exact integer.
pub fn parity_agreement_closed_form(n: usize, k: usize, d: usize) -> Result<BigInt> {
    let kr = krawtchouk(k, n, d)?;
    Ok((binomial(n, k) + kr) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn perm_mask_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let row = PermMask::random(9, &mut rng);
            let inv = row.inverse_perm();
            for (i, &p) in inv.iter().enumerate() {
                assert_eq!(row.perm[p], i);
            }
        }
    }

    #[test]
    fn newman_rejects_bad_slack() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = newman_derandomize(4, 2, 0.4, 0.5, |_, _, _| Ok(1.0), &mut rng);
        assert!(matches!(err, Err(Error::SlackTooLarge { .. })));
    }

    #[test]
    fn newman_fails_on_impossible_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let err = newman_derandomize(4, 2, 0.9, 0.3, |_, _, _| Ok(0.5), &mut rng);
        assert!(matches!(err, Err(Error::DerandomizationFailed { .. })));
    }

    #[test]
    fn newman_row_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let table = newman_derandomize(6, 2, 0.5, 0.5, |_, _, _| Ok(0.6), &mut rng).unwrap();
        assert_eq!(table.len(), 24); // ceil(6 / 0.25)
    }

    fn exhaustive_worst_success(p: &dyn Protocol) -> f64 {
        let n = p.input_len();
        let seqs = sequences_enumerate(n, p.query_len()).unwrap();
        let mut worst = 1.0f64;
        for idx in 0..1usize << n {
            let x = BitString::from_index(idx, n);
            for s in &seqs {
                worst = worst.min(p.exact_success(&x, s).unwrap());
            }
        }
        worst
    }

    #[test]
    fn frac_pr_meets_its_derandomization_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = BooleanFunction::xor(2).unwrap();
        // b = 3, radius 1 greedy code; single-row worst success is at
        // least the collision-free parity agreement, target kept modest
        let p = FracPr::new(6, 2, 1, f, 0.55, 0.25, &mut rng).unwrap();
        assert!(exhaustive_worst_success(&p) >= 0.55 - 0.25 - 1e-12);
        assert_eq!(p.table().len(), 96); // ceil(6 / 0.0625)
        assert!(p.message_bits() > 0.0);
    }

    #[test]
    fn xor_rac_pr_meets_its_derandomization_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = XorRacPr::new(5, 1, 2, 0.55, 0.25, &mut rng).unwrap();
        assert!(exhaustive_worst_success(&p) >= 0.55 - 0.25 - 1e-12);
    }

    #[test]
    fn trial_agrees_with_exact_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = BooleanFunction::xor(2).unwrap();
        let p = FracPr::new(6, 2, 1, f, 0.55, 0.25, &mut rng).unwrap();
        let x = BitString::from_index(0b110100, 6);
        let s = SequenceIndex::new(6, vec![1, 5]).unwrap();
        let exact = p.exact_success(&x, &s).unwrap();
        let trials = 200_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            if p.trial(&x, &s, &mut rng).unwrap() {
                hits += 1;
            }
        }
        let est = hits as f64 / trials as f64;
        let sigma = (exact.max(1e-6) * (1.0 - exact).max(1e-6) / trials as f64).sqrt();
        assert!((est - exact).abs() < 4.5 * sigma.max(1e-4));
    }

    #[test]
    fn parity_agreement_matches_krawtchouk() {
        for n in 2..=9usize {
            for k in 1..=n.min(4) {
                for idx in 0..1usize << n {
                    let x = BitString::from_index(0, n);
                    let y = BitString::from_index(idx, n);
                    let (d, agree, total) = count_parity_agreement(&x, &y, k).unwrap();
                    assert_eq!(agree, parity_agreement_closed_form(n, k, d).unwrap());
                    assert_eq!(total, binomial(n, k));
                }
            }
        }
    }
}
