//! Base encoding primitives: greedy covering codes, Krawtchouk polynomials,
//! and the three n -> 1 random access codes used as blocks by the f-RAC
//! protocols.

use crate::boolfn::BitString;
use crate::error::{Error, Result};
use crate::quantum::{singlet_conditional, BlochVector};
use num_bigint::BigInt;
use rand::Rng;

/// Largest block length for exhaustive covering-radius verification.
pub const MAX_BLOCK_LEN: usize = 16;

/// An explicit code with exhaustively verified covering radius.
#[derive(Debug, Clone)]
pub struct CoveringCode {
    block_len: usize,
    codewords: Vec<BitString>,
    radius: usize,
}

impl CoveringCode {
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn codewords(&self) -> &[BitString] {
        &self.codewords
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Nearest codeword, ties broken by lowest codeword index.
    pub fn nearest_codeword(&self, x: &BitString) -> Result<&BitString> {
        if x.len() != self.block_len {
            return Err(Error::LengthMismatch {
                expected: self.block_len,
                got: x.len(),
            });
        }
        let mut best = 0;
        let mut best_dist = usize::MAX;
        for (i, c) in self.codewords.iter().enumerate() {
            let d = c.hamming_distance(x);
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        Ok(&self.codewords[best])
    }

    pub fn nearest_distance(&self, x: &BitString) -> Result<usize> {
        Ok(self.nearest_codeword(x)?.hamming_distance(x))
    }

    /// Text form: header line "b radius count", then one hex-packed
    /// codeword index per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.block_len,
            self.radius,
            self.codewords.len()
        );
        for c in &self.codewords {
            out.push_str(&format!("{:x}\n", c.to_index()));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing covering-code header".into()))?;
        let fields: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|e| Error::Parse(format!("bad header: {e}")))
            })
            .collect::<Result<_>>()?;
        if fields.len() != 3 {
            return Err(Error::Parse("header must be 'b radius count'".into()));
        }
        let (b, radius, count) = (fields[0], fields[1], fields[2]);
        let mut codewords = Vec::with_capacity(count);
        for line in lines.take(count) {
            let idx = usize::from_str_radix(line.trim(), 16)
                .map_err(|e| Error::Parse(format!("bad codeword: {e}")))?;
            codewords.push(BitString::from_index(idx, b));
        }
        if codewords.len() != count {
            return Err(Error::Parse("codeword count mismatch".into()));
        }
        let code = CoveringCode {
            block_len: b,
            codewords,
            radius,
        };
        let actual = code.verify_radius()?;
        if actual > radius {
            return Err(Error::Parse(format!(
                "declared radius {radius} but verified radius is {actual}"
            )));
        }
        Ok(code)
    }

    /// Exhaustive covering-radius check: max over all strings of the
    /// distance to the nearest codeword.
    pub fn verify_radius(&self) -> Result<usize> {
        let mut worst = 0usize;
        for idx in 0..1usize << self.block_len {
            let x = BitString::from_index(idx, self.block_len);
            worst = worst.max(self.nearest_distance(&x)?);
        }
        Ok(worst)
    }
}

/// Greedy set-cover construction: repeatedly pick the point whose radius-r
/// ball covers the most still-uncovered strings. The resulting radius is
/// verified exhaustively.
pub fn greedy_covering_code(b: usize, r: usize) -> Result<CoveringCode> {
    if b == 0 || b > MAX_BLOCK_LEN {
        return Err(Error::BlockTooLarge {
            got: b,
            max: MAX_BLOCK_LEN,
        });
    }
    if r > b {
        return Err(Error::BadCoveringParams {
            block_len: b,
            radius: r,
        });
    }
    let size = 1usize << b;
    // all XOR masks of weight <= r
    let ball: Vec<usize> = (0..size).filter(|m| m.count_ones() as usize <= r).collect();
    let mut counts: Vec<u32> = vec![ball.len() as u32; size];
    let mut covered = vec![false; size];
    let mut remaining = size;
    let mut codewords = Vec::new();
    while remaining > 0 {
        let pick = counts
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
            .map(|(i, _)| i)
            .unwrap();
        codewords.push(BitString::from_index(pick, b));
        for &m in &ball {
            let u = pick ^ m;
            if !covered[u] {
                covered[u] = true;
                remaining -= 1;
                for &m2 in &ball {
                    counts[u ^ m2] -= 1;
                }
            }
        }
    }
    let mut code = CoveringCode {
        block_len: b,
        codewords,
        radius: r,
    };
    let actual = code.verify_radius()?;
    debug_assert!(actual <= r);
    code.radius = actual;
    Ok(code)
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut num = BigInt::from(1);
    for i in 0..k {
        num *= n - i;
        num /= i + 1; // always divides: running value is C(n-?,..) prefix
    }
    num
}

fn binomial_big(x: &BigInt, k: usize) -> BigInt {
    // C(x, k) for non-negative integer x given as BigInt
    let mut num = BigInt::from(1);
    for i in 0..k {
        num *= x - BigInt::from(i);
        num /= i + 1;
    }
    num
}

/// Krawtchouk polynomial K_{k,n}(x) = sum_j (-1)^j C(x,j) C(n-x,k-j),
/// in exact integer arithmetic.
pub fn krawtchouk(k: usize, n: usize, x: usize) -> Result<BigInt> {
    if k > n || x > n {
        return Err(Error::KrawtchoukArgs { k, n, x });
    }
    let mut total = BigInt::from(0);
    for j in 0..=k {
        let term = binomial_big(&BigInt::from(x), j) * binomial(n - x, k - j);
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    Ok(total)
}

/// Resource behind a base n -> 1 code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseResource {
    /// Classical one-bit message with a shared XOR mask (majority vote).
    RacSr,
    /// One-qubit message with shared measurement directions.
    QracSr,
    /// Classical one-bit message plus shared singlets (nested 2 -> 1).
    Earac,
}

impl BaseResource {
    pub fn name(&self) -> &'static str {
        match self {
            BaseResource::RacSr => "rac-sr",
            BaseResource::QracSr => "qrac-sr",
            BaseResource::Earac => "earac",
        }
    }
}

/// A base b -> 1 random access code: encodes b bits into one message
/// symbol, any single bit recoverable with bias `nominal_bias`.
#[derive(Debug, Clone)]
pub struct BaseCode {
    resource: BaseResource,
    b: usize,
    levels: usize, // EARAC nesting depth, 0 otherwise
}

/// Optimal classical b -> 1 RAC with shared randomness (masked majority).
pub fn rac1_sr(b: usize) -> Result<BaseCode> {
    if b == 0 {
        return Err(Error::ArityOutOfRange {
            got: b,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(BaseCode {
        resource: BaseResource::RacSr,
        b,
        levels: 0,
    })
}

/// b -> 1 QRAC with shared randomness. Uses the fixed optimal constructions
/// for b <= 3 and shared uniformly random measurement directions otherwise.
pub fn qrac1_sr(b: usize) -> Result<BaseCode> {
    if b == 0 {
        return Err(Error::ArityOutOfRange {
            got: b,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(BaseCode {
        resource: BaseResource::QracSr,
        b,
        levels: 0,
    })
}

/// b -> 1 EARAC built by nesting the optimal 2 -> 1 EARAC; b must be a
/// power of two (callers pad).
pub fn earac1(b: usize) -> Result<BaseCode> {
    if b == 0 || !b.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(b));
    }
    Ok(BaseCode {
        resource: BaseResource::Earac,
        b,
        levels: b.trailing_zeros() as usize,
    })
}

// CHSH-optimal equatorial angles for the 2 -> 1 EARAC round: the pair
// (alpha(x), beta(y)) realizes Pr[A xor B = x.y] = cos^2(pi/8) on the
// singlet for every input pair.
fn earac_alice_angle(x: u8) -> f64 {
    x as f64 * std::f64::consts::FRAC_PI_2
}

fn earac_bob_angle(y: u8) -> f64 {
    if y == 0 {
        -3.0 * std::f64::consts::FRAC_PI_4
    } else {
        3.0 * std::f64::consts::FRAC_PI_4
    }
}

impl BaseCode {
    pub fn resource(&self) -> BaseResource {
        self.resource
    }

    pub fn input_len(&self) -> usize {
        self.b
    }

    /// The closed-form per-bit bias this code is built to achieve. Exact
    /// for rac-sr, earac and qrac-sr with b <= 3; the asymptotic rate
    /// sqrt(8 / (3 pi b)) for larger qrac-sr.
    pub fn nominal_bias(&self) -> f64 {
        match self.resource {
            BaseResource::RacSr => rac1_closed_form_bias(self.b),
            BaseResource::QracSr => match self.b {
                1 => 1.0,
                2 | 3 => 1.0 / (self.b as f64).sqrt(),
                b => (8.0 / (3.0 * std::f64::consts::PI * b as f64)).sqrt(),
            },
            BaseResource::Earac => 1.0 / (self.b as f64).sqrt(),
        }
    }

    /// One shared-randomness draw: encode `content` and decode bit `pos`.
    pub fn trial_decode<R: Rng + ?Sized>(
        &self,
        content: &BitString,
        pos: usize,
        rng: &mut R,
    ) -> Result<i8> {
        if content.len() != self.b {
            return Err(Error::LengthMismatch {
                expected: self.b,
                got: content.len(),
            });
        }
        if pos >= self.b {
            return Err(Error::Invalid(format!("bit position {pos} out of range")));
        }
        match self.resource {
            BaseResource::RacSr => {
                let mask = BitString::uniform(self.b, rng);
                let s: i32 = content
                    .bits()
                    .iter()
                    .zip(mask.bits())
                    .map(|(&x, &r)| (x * r) as i32)
                    .sum();
                let msg = if s > 0 {
                    1
                } else if s < 0 {
                    -1
                } else if rng.random::<bool>() {
                    // even-length ties: one extra shared fair bit
                    1
                } else {
                    -1
                };
                Ok(msg * mask.get(pos))
            }
            BaseResource::QracSr => {
                if self.b <= 3 {
                    // fixed axis-aligned construction
                    let u = 1.0 / (self.b as f64).sqrt();
                    let p_plus = 0.5 + 0.5 * content.get(pos) as f64 * u;
                    Ok(if rng.random::<f64>() < p_plus { 1 } else { -1 })
                } else {
                    let dirs: Vec<BlochVector> =
                        (0..self.b).map(|_| BlochVector::random_unit(rng)).collect();
                    let mut w = BlochVector::new(0.0, 0.0, 0.0);
                    for (i, v) in dirs.iter().enumerate() {
                        let x = content.get(i) as f64;
                        w = BlochVector::new(w.x + x * v.x, w.y + x * v.y, w.z + x * v.z);
                    }
                    let norm = w.norm();
                    if norm < 1e-12 {
                        // probability-zero degenerate sum; redraw
                        return self.trial_decode(content, pos, rng);
                    }
                    let u = BlochVector::new(w.x / norm, w.y / norm, w.z / norm);
                    let p_plus = 0.5 + 0.5 * u.dot(&dirs[pos]);
                    Ok(if rng.random::<f64>() < p_plus { 1 } else { -1 })
                }
            }
            BaseResource::Earac => {
                let data: Vec<u8> = content.bits().iter().map(|&x| (x == -1) as u8).collect();
                let bit = earac_nested_decode(&data, pos, self.levels, rng);
                Ok(if bit == 1 { -1 } else { 1 })
            }
        }
    }

    /// Exact probability that the decoded bit equals the true bit, for
    /// base codes with discrete (or exactly computable) randomness.
    /// None for protocols that need Monte Carlo.
    pub fn exact_bit_success(&self, content: &BitString, pos: usize) -> Option<f64> {
        match self.resource {
            BaseResource::RacSr => {
                let b = self.b;
                let mut total = 0.0;
                for mask_idx in 0..1usize << b {
                    let mask = BitString::from_index(mask_idx, b);
                    let s: i32 = content
                        .bits()
                        .iter()
                        .zip(mask.bits())
                        .map(|(&x, &r)| (x * r) as i32)
                        .sum();
                    if s == 0 {
                        total += 0.5;
                    } else {
                        let msg = if s > 0 { 1 } else { -1 };
                        if msg * mask.get(pos) == content.get(pos) {
                            total += 1.0;
                        }
                    }
                }
                Some(total / (1u64 << b) as f64)
            }
            BaseResource::QracSr if self.b <= 3 => Some(0.5 + 0.5 / (self.b as f64).sqrt()),
            _ => None,
        }
    }
}

/// 2^{1-b} C(b-1, floor((b-1)/2)): the per-bit bias of the masked-majority
/// RAC, exact for odd b (and matching the tie-broken protocol for even b).
pub fn rac1_closed_form_bias(b: usize) -> f64 {
    let num = binomial(b - 1, (b - 1) / 2);
    // b <= ~60 keeps this in f64 range comfortably
    let num: f64 = num.to_string().parse().unwrap();
    2.0f64.powi(1 - b as i32) * num
}

/// Exhaustive per-bit bias of the masked-majority RAC: enumerates every
/// mask and content, so it is an independent oracle for the closed form.
pub fn rac1_exhaustive_bias(b: usize) -> Result<f64> {
    if b > MAX_BLOCK_LEN {
        return Err(Error::BlockTooLarge {
            got: b,
            max: MAX_BLOCK_LEN,
        });
    }
    let code = rac1_sr(b)?;
    let mut worst: f64 = 1.0;
    // by mask symmetry the value is content-independent, but enumerate anyway
    for content_idx in 0..1usize << b {
        let content = BitString::from_index(content_idx, b);
        for pos in 0..b {
            let p = code.exact_bit_success(&content, pos).unwrap();
            worst = worst.min(2.0 * p - 1.0);
        }
    }
    Ok(worst)
}

/// Nested van Dam-style EARAC decode of one data bit, run jointly for both
/// parties. Returns the decoded bit in {0,1}.
fn earac_nested_decode<R: Rng + ?Sized>(data: &[u8], pos: usize, levels: usize, rng: &mut R) -> u8 {
    debug_assert_eq!(data.len(), 1 << levels);
    if levels == 0 {
        return data[0];
    }
    // Alice: bottom-up messages; heap layout, root at 1.
    let nodes = 1usize << levels; // 2^L - 1 used, index 0 unused
    let mut alice_a = vec![0i8; nodes];
    let mut alice_alpha = vec![0.0f64; nodes];
    // message produced by the subtree rooted at `node` covering data[lo..hi]
    fn encode<R: Rng + ?Sized>(
        node: usize,
        lo: usize,
        hi: usize,
        data: &[u8],
        alice_a: &mut [i8],
        alice_alpha: &mut [f64],
        rng: &mut R,
    ) -> u8 {
        let (m0, m1) = if hi - lo == 2 {
            (data[lo], data[lo + 1])
        } else {
            let mid = (lo + hi) / 2;
            (
                encode(2 * node, lo, mid, data, alice_a, alice_alpha, rng),
                encode(2 * node + 1, mid, hi, data, alice_a, alice_alpha, rng),
            )
        };
        let x = m0 ^ m1;
        let alpha = earac_alice_angle(x);
        let a: i8 = if rng.random::<bool>() { 1 } else { -1 };
        alice_a[node] = a;
        alice_alpha[node] = alpha;
        m0 ^ (((1 - a) / 2) as u8)
    }
    let mut m = encode(1, 0, data.len(), data, &mut alice_a, &mut alice_alpha, rng);
    // Bob: walks the address path top-down, most significant bit first.
    let mut node = 1usize;
    for level in (0..levels).rev() {
        let y = ((pos >> level) & 1) as u8;
        let beta = earac_bob_angle(y);
        let b_out = singlet_conditional(alice_a[node], alice_alpha[node], beta, rng);
        m ^= ((1 - b_out) / 2) as u8;
        node = 2 * node + y as usize;
    }
    m
}
