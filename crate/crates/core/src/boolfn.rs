//! Boolean functions on the hypercube {-1,1}^k and their spectral analysis.
//!
//! Inputs live in {-1,1}^k. Truth tables are indexed by interpreting the
//! input as a k-bit integer: bit `i` of the index is input coordinate `i`,
//! with -1 mapped to 1 and +1 mapped to 0. Every module in this crate shares
//! that convention.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest arity for which truth tables are stored.
pub const MAX_ARITY: usize = 20;
/// Largest arity accepted by exhaustive (2^k-enumeration) oracles.
pub const MAX_EXHAUSTIVE_ARITY: usize = 12;

const PARSEVAL_TOL: f64 = 1e-10;

/// A string over {-1,+1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString(Vec<i8>);

impl BitString {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Invalid("bit string must be non-empty".into()));
        }
        for (i, &b) in bits.iter().enumerate() {
            if b != 1 && b != -1 {
                return Err(Error::NonSignEntry {
                    index: i,
                    value: b as i64,
                });
            }
        }
        Ok(BitString(bits))
    }

    /// Decodes the shared index convention: bit `i` of `index` set means
    /// coordinate `i` equals -1.
    pub fn from_index(index: usize, len: usize) -> Self {
        let bits = (0..len)
            .map(|i| if index >> i & 1 == 1 { -1 } else { 1 })
            .collect();
        BitString(bits)
    }

    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (((b == -1) as usize) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    /// Substring x_S for a sequence of coordinate indices.
    pub fn select(&self, indices: &[usize]) -> BitString {
        BitString(indices.iter().map(|&i| self.0[i]).collect())
    }

    /// Coordinate-wise product.
    pub fn pointwise_mul(&self, other: &BitString) -> Result<BitString> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(BitString(
            self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect(),
        ))
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn uniform<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        BitString(
            (0..len)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect(),
        )
    }

    pub(crate) fn from_vec_unchecked(bits: Vec<i8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b == 1 || b == -1));
        BitString(bits)
    }
}

/// How to obtain named function instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Xor,
    Maj,
    And,
    Or,
    Dictator(usize),
}

/// A Boolean function f: {-1,1}^k -> {-1,1} stored as a truth table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleanFunction {
    k: usize,
    table: Vec<i8>,
}

impl BooleanFunction {
    pub fn construct(kind: FunctionKind, k: usize) -> Result<Self> {
        check_arity(k)?;
        let table = match kind {
            FunctionKind::Xor => build_table(k, |x| x.bits().iter().product::<i8>()),
            FunctionKind::Maj => {
                if k.is_multiple_of(2) {
                    return Err(Error::EvenMajority(k));
                }
                build_table(k, |x| {
                    let s: i32 = x.bits().iter().map(|&b| b as i32).sum();
                    if s > 0 {
                        1
                    } else {
                        -1
                    }
                })
            }
            // -1 plays the role of logical "true" under the index convention,
            // so AND is -1 exactly when every coordinate is -1.
            FunctionKind::And => build_table(k, |x| {
                if x.bits().iter().all(|&b| b == -1) {
                    -1
                } else {
                    1
                }
            }),
            FunctionKind::Or => build_table(k, |x| if x.bits().contains(&-1) { -1 } else { 1 }),
            FunctionKind::Dictator(i) => {
                if i == 0 || i > k {
                    return Err(Error::DictatorCoordinate { coord: i, arity: k });
                }
                build_table(k, |x| x.get(i - 1))
            }
        };
        Ok(BooleanFunction { k, table })
    }

    pub fn xor(k: usize) -> Result<Self> {
        Self::construct(FunctionKind::Xor, k)
    }

    pub fn maj(k: usize) -> Result<Self> {
        Self::construct(FunctionKind::Maj, k)
    }

    pub fn and(k: usize) -> Result<Self> {
        Self::construct(FunctionKind::And, k)
    }

    pub fn or(k: usize) -> Result<Self> {
        Self::construct(FunctionKind::Or, k)
    }

    /// Dictator on coordinate `i` (1-based).
    pub fn dictator(k: usize, i: usize) -> Result<Self> {
        Self::construct(FunctionKind::Dictator(i), k)
    }

    pub fn constant(k: usize, value: i8) -> Result<Self> {
        check_arity(k)?;
        if value != 1 && value != -1 {
            return Err(Error::NonSignEntry {
                index: 0,
                value: value as i64,
            });
        }
        Ok(BooleanFunction {
            k,
            table: vec![value; 1 << k],
        })
    }

    pub fn from_table(k: usize, table: Vec<i8>) -> Result<Self> {
        check_arity(k)?;
        if table.len() != 1 << k {
            return Err(Error::TableLength {
                expected: 1 << k,
                got: table.len(),
            });
        }
        for (i, &v) in table.iter().enumerate() {
            if v != 1 && v != -1 {
                return Err(Error::NonSignEntry {
                    index: i,
                    value: v as i64,
                });
            }
        }
        Ok(BooleanFunction { k, table })
    }

    /// Parses the table file format: first line `k`, second line 2^k
    /// space-separated entries. Entries are in {-1,+1}, or in {0,1} when
    /// `zero_one` is set (0 maps to +1, 1 maps to -1).
    pub fn from_table_text(text: &str, zero_one: bool) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let k: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing arity line".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad arity: {e}")))?;
        let entries = lines
            .next()
            .ok_or_else(|| Error::Parse("missing table line".into()))?;
        let mut table = Vec::new();
        for tok in entries.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|e| Error::Parse(format!("bad entry '{tok}': {e}")))?;
            let v = if zero_one {
                match v {
                    0 => 1,
                    1 => -1,
                    _ => {
                        return Err(Error::NonSignEntry {
                            index: table.len(),
                            value: v,
                        })
                    }
                }
            } else {
                match v {
                    1 => 1,
                    -1 => -1,
                    _ => {
                        return Err(Error::NonSignEntry {
                            index: table.len(),
                            value: v,
                        })
                    }
                }
            };
            table.push(v);
        }
        Self::from_table(k, table)
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn eval_index(&self, index: usize) -> i8 {
        self.table[index]
    }

    pub fn eval(&self, x: &BitString) -> Result<i8> {
        if x.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: x.len(),
            });
        }
        Ok(self.table[x.to_index()])
    }

    /// Fourier transform via the fast Walsh-Hadamard transform, O(k 2^k).
    pub fn fourier_transform(&self) -> FourierSpectrum {
        let mut coeffs: Vec<f64> = self.table.iter().map(|&v| v as f64).collect();
        walsh_hadamard(&mut coeffs);
        let scale = 1.0 / (1u64 << self.k) as f64;
        for c in &mut coeffs {
            *c *= scale;
        }
        FourierSpectrum { k: self.k, coeffs }
    }

    pub fn uniform_random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Self> {
        check_arity(k)?;
        let table = (0..1usize << k)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Ok(BooleanFunction { k, table })
    }

    /// True when the value depends only on the number of -1 coordinates.
    pub fn is_symmetric(&self) -> bool {
        (0..self.table.len()).all(|idx| {
            let ones = idx.count_ones() as usize;
            self.table[idx] == self.table[(1usize << ones) - 1]
        })
    }
}

fn check_arity(k: usize) -> Result<()> {
    if k == 0 || k > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            got: k,
            min: 1,
            max: MAX_ARITY,
        });
    }
    Ok(())
}

fn build_table(k: usize, f: impl Fn(&BitString) -> i8) -> Vec<i8> {
    (0..1usize << k)
        .map(|idx| f(&BitString::from_index(idx, k)))
        .collect()
}

/// In-place Walsh-Hadamard butterfly. After the call, entry S holds
/// sum_x v[x] * chi_S(x) under the shared index convention.
fn walsh_hadamard(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(half * 2) {
            for i in block..block + half {
                let (a, b) = (v[i], v[i + half]);
                v[i] = a + b;
                v[i + half] = a - b;
            }
        }
        half *= 2;
    }
}

/// chi_S(x) evaluated on index representations.
pub(crate) fn character(subset_mask: usize, x_index: usize) -> f64 {
    if (subset_mask & x_index).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// The Fourier spectrum of a function on {-1,1}^k, indexed by subset mask.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierSpectrum {
    k: usize,
    coeffs: Vec<f64>,
}

impl FourierSpectrum {
    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn coefficient(&self, subset_mask: usize) -> f64 {
        self.coeffs[subset_mask]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates the multilinear Fourier expansion at x.
    pub fn evaluate_expansion(&self, x: &BitString) -> Result<f64> {
        if x.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: x.len(),
            });
        }
        let xi = x.to_index();
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, &c)| c * character(mask, xi))
            .sum())
    }

    /// Sum of squared coefficients; 1 for any {-1,1}-valued source.
    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn satisfies_parseval(&self) -> bool {
        (self.parseval_sum() - 1.0).abs() <= PARSEVAL_TOL
    }
}

/// Choice of noise-stability computation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityMethod {
    /// sum_l q^l W^l[f] from the Fourier weights.
    Fourier,
    /// Exact expectation E[f(x) f(y)] summed over all inputs and flip
    /// patterns with their exact probabilities. Limited to small arity.
    Exhaustive,
}

fn check_correlation(q: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&q) || q.is_nan() {
        return Err(Error::CorrelationOutOfRange(q));
    }
    Ok(())
}

/// Draws y with each bit independently equal to x_i with probability (1+q)/2.
pub fn sample_correlated_pair<R: Rng + ?Sized>(
    x: &BitString,
    q: f64,
    rng: &mut R,
) -> Result<BitString> {
    check_correlation(q)?;
    let keep = 0.5 + 0.5 * q;
    let bits = x
        .bits()
        .iter()
        .map(|&b| if rng.random::<f64>() < keep { b } else { -b })
        .collect();
    Ok(BitString::from_vec_unchecked(bits))
}

/// Noise stability Stab_q[f] = E[f(x) f(y)] over q-correlated pairs.
pub fn noise_stability(f: &BooleanFunction, q: f64, method: StabilityMethod) -> Result<f64> {
    check_correlation(q)?;
    match method {
        StabilityMethod::Fourier => {
            let weights = spectrum_profile(f).weights;
            Ok(weights
                .iter()
                .enumerate()
                .map(|(level, w)| q.powi(level as i32) * w)
                .sum())
        }
        StabilityMethod::Exhaustive => {
            let k = f.arity();
            if k > MAX_EXHAUSTIVE_ARITY {
                return Err(Error::ExhaustiveTooLarge {
                    got: k,
                    max: MAX_EXHAUSTIVE_ARITY,
                });
            }
            let keep = 0.5 + 0.5 * q;
            let flip = 0.5 - 0.5 * q;
            // Probability of a flip pattern depends only on its popcount.
            let pattern_prob: Vec<f64> = (0..=k)
                .map(|j| flip.powi(j as i32) * keep.powi((k - j) as i32))
                .collect();
            let size = 1usize << k;
            let mut total = 0.0;
            for x in 0..size {
                let fx = f.eval_index(x) as f64;
                for pattern in 0..size {
                    let fy = f.eval_index(x ^ pattern) as f64;
                    total += pattern_prob[pattern.count_ones() as usize] * fx * fy;
                }
            }
            Ok(total / size as f64)
        }
    }
}

/// Computes stability from a precomputed spectrum (Fourier route).
pub fn noise_stability_from_spectrum(spectrum: &FourierSpectrum, q: f64) -> Result<f64> {
    check_correlation(q)?;
    Ok(spectrum
        .coeffs
        .iter()
        .enumerate()
        .map(|(mask, c)| q.powi(mask.count_ones() as i32) * c * c)
        .sum())
}

/// The noise operator T_q applied to f, evaluated at x.
pub fn noise_operator(f: &BooleanFunction, q: f64, x: &BitString) -> Result<f64> {
    check_correlation(q)?;
    let spectrum = f.fourier_transform();
    if x.len() != f.arity() {
        return Err(Error::LengthMismatch {
            expected: f.arity(),
            got: x.len(),
        });
    }
    let xi = x.to_index();
    Ok(spectrum
        .coeffs
        .iter()
        .enumerate()
        .map(|(mask, &c)| q.powi(mask.count_ones() as i32) * c * character(mask, xi))
        .sum())
}

const GRANULARITY_TOL: f64 = 1e-9;

/// Level-by-level summary of a function's Fourier spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumProfile {
    /// W^l[f]: squared 2-norm of each level, index l in 0..=k.
    pub weights: Vec<f64>,
    /// L_{1,l}(f): 1-norm of each level.
    pub level_one_norms: Vec<f64>,
    /// Highest level with a nonzero coefficient.
    pub degree: usize,
    /// Lowest level with a nonzero coefficient (pure high degree).
    pub pure_high_degree: usize,
    /// Total Fourier 1-norm.
    pub one_norm: f64,
    /// Whether every coefficient is an integer multiple of 2^(1-degree).
    pub granular: bool,
}

pub fn spectrum_profile(f: &BooleanFunction) -> SpectrumProfile {
    let spectrum = f.fourier_transform();
    profile_from_spectrum(&spectrum)
}

pub fn profile_from_spectrum(spectrum: &FourierSpectrum) -> SpectrumProfile {
    let k = spectrum.arity();
    let mut weights = vec![0.0; k + 1];
    let mut level_one_norms = vec![0.0; k + 1];
    let mut degree = 0;
    let mut phd = k;
    let mut one_norm = 0.0;
    for (mask, &c) in spectrum.coeffs.iter().enumerate() {
        let level = mask.count_ones() as usize;
        weights[level] += c * c;
        level_one_norms[level] += c.abs();
        one_norm += c.abs();
        if c.abs() > GRANULARITY_TOL {
            degree = degree.max(level);
            phd = phd.min(level);
        }
    }
    // constant functions have coefficients in {-1, 0, 1}, grain 1
    let grain = 2f64.powi(1 - degree.max(1) as i32);
    let granular = spectrum.coeffs.iter().all(|&c| {
        let ratio = c / grain;
        (ratio - ratio.round()).abs() * grain <= GRANULARITY_TOL
    });
    SpectrumProfile {
        weights,
        level_one_norms,
        degree,
        pure_high_degree: phd,
        one_norm,
        granular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(bits: &[i8]) -> BitString {
        BitString::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn xor2_table_follows_index_convention() {
        let f = BooleanFunction::xor(2).unwrap();
        // index 0 = (+1,+1), 1 = (-1,+1), 2 = (+1,-1), 3 = (-1,-1)
        assert_eq!(f.table(), &[1, -1, -1, 1]);
    }

    #[test]
    fn dictator_projects() {
        let f = BooleanFunction::dictator(3, 1).unwrap();
        for idx in 0..8 {
            let x = BitString::from_index(idx, 3);
            assert_eq!(f.eval(&x).unwrap(), x.get(0));
        }
    }

    #[test]
    fn maj3_is_sign_of_sum() {
        let f = BooleanFunction::maj(3).unwrap();
        for idx in 0..8 {
            let x = BitString::from_index(idx, 3);
            let s: i32 = x.bits().iter().map(|&b| b as i32).sum();
            assert_eq!(f.eval(&x).unwrap() as i32, s.signum());
        }
    }

    #[test]
    fn maj_rejects_even_arity() {
        assert!(matches!(
            BooleanFunction::maj(4),
            Err(Error::EvenMajority(4))
        ));
    }

    #[test]
    fn from_table_rejects_bad_entries() {
        assert!(BooleanFunction::from_table(1, vec![1, 0]).is_err());
        assert!(BooleanFunction::from_table(2, vec![1, -1]).is_err());
    }

    #[test]
    fn xor2_spectrum_is_top_character() {
        let spec = BooleanFunction::xor(2).unwrap().fourier_transform();
        assert!((spec.coefficient(0b11) - 1.0).abs() < 1e-12);
        for mask in 0..3 {
            assert!(spec.coefficient(mask).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_spectrum_concentrates_on_empty_set() {
        let spec = BooleanFunction::constant(3, 1).unwrap().fourier_transform();
        assert!((spec.coefficient(0) - 1.0).abs() < 1e-12);
        for mask in 1..8 {
            assert!(spec.coefficient(mask).abs() < 1e-12);
        }
    }

    #[test]
    fn maj3_spectrum_matches_brute_force() {
        let f = BooleanFunction::maj(3).unwrap();
        let spec = f.fourier_transform();
        for mask in 0..8usize {
            // independent oracle: direct inner product over all 8 inputs
            let mut inner = 0.0;
            for idx in 0..8 {
                inner += f.eval_index(idx) as f64 * character(mask, idx);
            }
            inner /= 8.0;
            assert!((spec.coefficient(mask) - inner).abs() < 1e-12);
            let expect = match mask.count_ones() {
                1 => 0.5,
                3 => -0.5,
                _ => 0.0,
            };
            assert!((spec.coefficient(mask) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 1..=10 {
            let f = BooleanFunction::uniform_random(k, &mut rng).unwrap();
            let spec = f.fourier_transform();
            for idx in 0..1usize << k {
                let x = BitString::from_index(idx, k);
                let v = spec.evaluate_expansion(&x).unwrap();
                assert!((v - f.eval_index(idx) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn expansion_examples() {
        let spec = BooleanFunction::xor(2).unwrap().fourier_transform();
        assert!((spec.evaluate_expansion(&bs(&[-1, 1])).unwrap() + 1.0).abs() < 1e-12);
        let spec = BooleanFunction::maj(3).unwrap().fourier_transform();
        assert!((spec.evaluate_expansion(&bs(&[1, 1, -1])).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlated_pair_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = BitString::uniform(6, &mut rng);
        let y = sample_correlated_pair(&x, 1.0, &mut rng).unwrap();
        assert_eq!(x, y);
        let y = sample_correlated_pair(&x, -1.0, &mut rng).unwrap();
        for i in 0..6 {
            assert_eq!(y.get(i), -x.get(i));
        }
        assert!(sample_correlated_pair(&x, 1.5, &mut rng).is_err());
    }

    #[test]
    fn correlated_pair_uncorrelated_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = bs(&[1, -1, 1, -1]);
        let samples = 100_000usize;
        let mut agree = [0usize; 4];
        for _ in 0..samples {
            let y = sample_correlated_pair(&x, 0.0, &mut rng).unwrap();
            for (i, slot) in agree.iter_mut().enumerate() {
                if y.get(i) == x.get(i) {
                    *slot += 1;
                }
            }
        }
        // 3 sigma of Binomial(1e5, 1/2)
        let sigma = (samples as f64 * 0.25).sqrt();
        for &a in &agree {
            assert!((a as f64 - samples as f64 / 2.0).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn xor_stability_is_q_to_the_k() {
        let f = BooleanFunction::xor(3).unwrap();
        let s = noise_stability(&f, 0.5, StabilityMethod::Fourier).unwrap();
        assert!((s - 0.125).abs() < 1e-12);
        let s = noise_stability(&f, 0.5, StabilityMethod::Exhaustive).unwrap();
        assert!((s - 0.125).abs() < 1e-12);
    }

    #[test]
    fn maj3_stability_at_half() {
        let f = BooleanFunction::maj(3).unwrap();
        // W^1 = 3/4, W^3 = 1/4 from the enumerated spectrum
        let s = noise_stability(&f, 0.5, StabilityMethod::Fourier).unwrap();
        assert!((s - 0.40625).abs() < 1e-12);
    }

    #[test]
    fn stability_at_one_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let f = BooleanFunction::uniform_random(5, &mut rng).unwrap();
            let s = noise_stability(&f, 1.0, StabilityMethod::Fourier).unwrap();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn stability_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let k = 1 + (rng.random::<u32>() % 8) as usize;
            let f = BooleanFunction::uniform_random(k, &mut rng).unwrap();
            for &q in &[-1.0, -0.5, 0.0, 0.3, 0.7, 1.0] {
                let a = noise_stability(&f, q, StabilityMethod::Fourier).unwrap();
                let b = noise_stability(&f, q, StabilityMethod::Exhaustive).unwrap();
                assert!((a - b).abs() < 1e-10, "k={k} q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn stability_monotone_on_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let f = BooleanFunction::uniform_random(6, &mut rng).unwrap();
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=100 {
                let q = i as f64 / 100.0;
                let s = noise_stability(&f, q, StabilityMethod::Fourier).unwrap();
                assert!(s >= prev - 1e-12);
                prev = s;
            }
        }
    }

    #[test]
    fn dictator_stability_identity() {
        // Stab_q[chi_S] = q^{|S|}
        for k in 1..=4 {
            let f = BooleanFunction::xor(k).unwrap();
            for &q in &[0.0, 0.25, 0.5, 0.9] {
                let s = noise_stability(&f, q, StabilityMethod::Fourier).unwrap();
                assert!((s - q.powi(k as i32)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noise_operator_identities() {
        let f = BooleanFunction::maj(3).unwrap();
        for idx in 0..8 {
            let x = BitString::from_index(idx, 3);
            let t1 = noise_operator(&f, 1.0, &x).unwrap();
            assert!((t1 - f.eval_index(idx) as f64).abs() < 1e-10);
            let t0 = noise_operator(&f, 0.0, &x).unwrap();
            assert!((t0 - f.fourier_transform().coefficient(0)).abs() < 1e-10);
        }
        // <f, T_q f> equals the noise stability
        let mut inner = 0.0;
        for idx in 0..8 {
            let x = BitString::from_index(idx, 3);
            inner += f.eval_index(idx) as f64 * noise_operator(&f, 0.5, &x).unwrap();
        }
        inner /= 8.0;
        assert!((inner - 0.40625).abs() < 1e-10);
    }

    #[test]
    fn profile_of_named_functions() {
        let p = spectrum_profile(&BooleanFunction::xor(4).unwrap());
        for l in 0..4 {
            assert!(p.level_one_norms[l].abs() < 1e-12);
        }
        assert!((p.level_one_norms[4] - 1.0).abs() < 1e-12);
        assert_eq!(p.degree, 4);
        assert_eq!(p.pure_high_degree, 4);

        let p = spectrum_profile(&BooleanFunction::maj(3).unwrap());
        assert!((p.weights[1] - 0.75).abs() < 1e-12);
        assert!((p.weights[3] - 0.25).abs() < 1e-12);
        assert!((p.level_one_norms[1] - 1.5).abs() < 1e-12);
        assert!((p.level_one_norms[3] - 0.5).abs() < 1e-12);
        assert_eq!(p.degree, 3);
        assert_eq!(p.pure_high_degree, 1);
        assert!((p.one_norm - 2.0).abs() < 1e-12);
        assert!(p.granular);

        let p = spectrum_profile(&BooleanFunction::constant(3, -1).unwrap());
        assert_eq!(p.degree, 0);
        assert!((p.one_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_and_granularity_hold_for_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for k in 1..=12 {
            let f = BooleanFunction::uniform_random(k, &mut rng).unwrap();
            let spec = f.fourier_transform();
            assert!(spec.satisfies_parseval(), "k={k}");
            assert!(spectrum_profile(&f).granular, "k={k}");
        }
    }

    #[test]
    fn table_text_round_trip() {
        let f = BooleanFunction::from_table_text("2\n1 -1 -1 1\n", false).unwrap();
        assert_eq!(f.table(), BooleanFunction::xor(2).unwrap().table());
        let f = BooleanFunction::from_table_text("2\n0 1 1 0\n", true).unwrap();
        assert_eq!(f.table(), BooleanFunction::xor(2).unwrap().table());
    }
}
