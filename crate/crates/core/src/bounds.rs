//! Closed-form bias bounds and inequality verifiers: entropy bounds, the
//! Fourier level-1-norm upper bound and its corollaries, noise-stability
//! lower bounds per resource, the matrix hypercontractive inequality and
//! the Majority stability sandwich. Unknown multiplicative constants are
//! normalized to 1 and the results treated as shapes, not certificates.

use serde::Serialize;

use crate::boolfn::{
    noise_stability, spectrum_profile, BooleanFunction, SpectrumProfile, StabilityMethod,
};
use crate::error::{Error, Result};
use crate::frac::{collision_probability, CollisionMode};
use crate::quantum::{matrix_fourier_transform, trace_norm, ComplexMatrix};

/// Default eta; any value > 2 ln 2 is admissible.
pub const DEFAULT_ETA: f64 = 1.40;

pub const TWO_LN_TWO: f64 = 2.0 * std::f64::consts::LN_2;

/// -p log2 p - (1-p) log2 (1-p), with H(0) = H(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Quadratic sandwich around H: 1 - 4(p-1/2)^2 <= H(p) <= 1 - (2/ln2)(p-1/2)^2,
/// checked on a uniform 1001-point grid.
pub fn entropy_sandwich_check() -> Result<()> {
    for i in 0..=1000usize {
        let p = i as f64 / 1000.0;
        let h = binary_entropy(p)?;
        let d2 = (p - 0.5) * (p - 0.5);
        let lower = 1.0 - 4.0 * d2;
        let upper = 1.0 - 2.0 / std::f64::consts::LN_2 * d2;
        if h < lower - 1e-12 || h > upper + 1e-12 {
            return Err(Error::Invalid(format!(
                "entropy sandwich violated at p={p}: {lower} <= {h} <= {upper}"
            )));
        }
    }
    Ok(())
}

/// Minimum message length (1 - H(p)) n for an n -> m RAC with per-bit
/// success probability p.
pub fn nayak_bound(n: usize, p: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok((1.0 - binary_entropy(p)?) * n as f64)
}

/// Fourier upper bound sum_l L_{1,l}(f) (eta m / n)^{l/2}, with the
/// unknown constant normalized to 1.
pub fn thm44_upper(f: &BooleanFunction, n: usize, m: usize, eta: f64) -> Result<f64> {
    thm44_upper_from_profile(&spectrum_profile(f), n, m, eta)
}

pub fn thm44_upper_from_profile(
    profile: &SpectrumProfile,
    n: usize,
    m: usize,
    eta: f64,
) -> Result<f64> {
    if eta <= TWO_LN_TWO {
        return Err(Error::EtaTooSmall(eta));
    }
    let k = profile.weights.len() - 1;
    if k > n / 4 {
        return Err(Error::Invalid(format!(
            "bound assumes k small against n; need k <= n/4, got k={k} n={n}"
        )));
    }
    let base = eta * m as f64 / n as f64;
    Ok(profile
        .level_one_norms
        .iter()
        .enumerate()
        .map(|(l, l1)| l1 * base.powf(l as f64 / 2.0))
        .sum())
}

/// The three corollary forms of the Fourier upper bound at q = sqrt(eta m / n).
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryBounds {
    pub q: f64,
    /// sqrt(Stab_{q^{2r}}[f] * sum over the spectrum support of q^{2(1-r)|S|})
    pub eq_a: f64,
    /// (Fourier 1-norm) * q^{pure high degree}
    pub eq_b: f64,
    /// 2^{deg f - 1} Stab_q[f]
    pub eq_c: f64,
    /// true when q > 1 and the forms carry no information
    pub vacuous: bool,
}

pub fn corollary_bounds(
    f: &BooleanFunction,
    n: usize,
    m: usize,
    eta: f64,
    r: f64,
) -> Result<CorollaryBounds> {
    if eta <= TWO_LN_TWO {
        return Err(Error::EtaTooSmall(eta));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Invalid(format!("interpolation r={r} outside [0,1]")));
    }
    let q = (eta * m as f64 / n as f64).sqrt();
    let vacuous = q > 1.0;
    let qc = q.min(1.0); // stability arguments stay valid correlations
    let spectrum = f.fourier_transform();
    let profile = spectrum_profile(f);
    let mut support_sum = 0.0;
    for (mask, &c) in spectrum.coefficients().iter().enumerate() {
        if c.abs() > 1e-12 {
            support_sum += qc.powf(2.0 * (1.0 - r) * mask.count_ones() as f64);
        }
    }
    let stab_low = noise_stability(f, qc.powf(2.0 * r), StabilityMethod::Fourier)?;
    let stab = noise_stability(f, qc, StabilityMethod::Fourier)?;
    Ok(CorollaryBounds {
        q,
        eq_a: (stab_low * support_sum).sqrt(),
        eq_b: profile.one_norm * qc.powi(profile.pure_high_degree as i32),
        eq_c: (2.0f64).powi(profile.degree as i32 - 1) * stab,
        vacuous,
    })
}

/// One lower-bound row: the correlation q the resource achieves, the
/// resulting Stab_q[f], and the exact finite-n collision factor standing
/// in for the asymptotic (1 - o(1)).
#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub resource: String,
    pub q: f64,
    pub stability: f64,
    pub collision_factor: f64,
    pub bias: f64,
    /// true when the q-formula's radicand went negative
    pub vacuous: bool,
}

/// Lower-bound sheet across the four resources. `l` is the block count of
/// the private-randomness construction; the shared-randomness rows use m
/// blocks.
pub fn lower_bound_sheet(
    f: &BooleanFunction,
    n: usize,
    m: usize,
    k: usize,
    l: usize,
) -> Result<Vec<LowerBound>> {
    let mut rows = Vec::with_capacity(4);
    let specs: [(&str, f64, usize); 4] = [
        (
            "rac-pr",
            m as f64 / n as f64 - 5.0 * ((n as f64 / l as f64).log2()) / (n as f64 / l as f64),
            l,
        ),
        ("rac-sr", m as f64 / (2.0 * n as f64), m),
        (
            "qrac-sr",
            8.0 * m as f64 / (3.0 * std::f64::consts::PI * n as f64),
            m,
        ),
        ("earac", m as f64 / n as f64, m),
    ];
    for (name, radicand, blocks) in specs {
        let vacuous = radicand < 0.0;
        let q = radicand.max(0.0).sqrt().min(1.0);
        let stability = noise_stability(f, q, StabilityMethod::Fourier)?;
        let collision_factor = if n.is_multiple_of(blocks) {
            collision_probability(blocks, n, k, CollisionMode::Exact)?
        } else {
            collision_probability(blocks, n.div_ceil(blocks) * blocks, k, CollisionMode::Exact)?
        };
        rows.push(LowerBound {
            resource: name.to_string(),
            q,
            stability,
            collision_factor,
            bias: collision_factor * stability,
            vacuous,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct HypercontractivityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// sum_S delta^{|S|} ||F_hat(S)||_tr^2 <= 2^{2 delta m} for F mapping n
/// bits to density matrices on m qubits.
pub fn hypercontractivity_check(
    values: &[ComplexMatrix],
    n: usize,
    m: usize,
    delta: f64,
) -> Result<HypercontractivityCheck> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::ProbabilityOutOfRange(delta));
    }
    if values.is_empty() || values[0].dim() != 1 << m {
        return Err(Error::DimensionMismatch(
            1 << m,
            values.first().map_or(0, |v| v.dim()),
        ));
    }
    let coeffs = matrix_fourier_transform(values, n)?;
    let mut lhs = 0.0;
    for (mask, c) in coeffs.iter().enumerate() {
        let t = trace_norm(c)?;
        lhs += delta.powi(mask.count_ones() as i32) * t * t;
    }
    let rhs = (2.0f64).powf(2.0 * delta * m as f64);
    Ok(HypercontractivityCheck {
        lhs,
        rhs,
        pass: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichPoint {
    pub q: f64,
    pub lower: f64,
    pub stability: f64,
    pub upper: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// (2/pi) arcsin q <= Stab_q[MAJ_k] on a grid. The lower side is a hard
/// inequality; the upper side adds 1/(sqrt(1-q^2) sqrt(k)) whose constant
/// the source leaves open, so its failures are reported, not fatal.
pub fn maj_stability_sandwich(k: usize, grid: &[f64]) -> Result<Vec<SandwichPoint>> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenMajority(k));
    }
    let f = BooleanFunction::maj(k)?;
    let mut out = Vec::with_capacity(grid.len());
    for &q in grid {
        if !(0.0..=0.95 + 1e-9).contains(&q) {
            return Err(Error::CorrelationOutOfRange(q));
        }
        let stab = noise_stability(&f, q, StabilityMethod::Fourier)?;
        let lower = 2.0 / std::f64::consts::PI * q.asin();
        let upper = lower + 1.0 / ((1.0 - q * q).sqrt() * (k as f64).sqrt());
        out.push(SandwichPoint {
            q,
            lower,
            stability: stab,
            upper,
            lower_ok: lower <= stab + 1e-12,
            upper_ok: stab <= upper + 1e-12,
        });
    }
    Ok(out)
}

/// Success probability 1/2 + (1/2n) sum_i sqrt(r_i) of an identity EARAC
/// split into blocks of sizes r_i.
pub fn earac_block_tradeoff(n: usize, sizes: &[usize]) -> Result<f64> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.iter().sum::<usize>() != n {
        return Err(Error::BadComposition(sizes.to_vec(), n));
    }
    let s: f64 = sizes.iter().map(|&r| (r as f64).sqrt()).sum();
    Ok(0.5 + s / (2.0 * n as f64))
}

/// Exhaustively confirms the equal split r_i = n/m maximizes the
/// trade-off over every integer composition of n into m positive parts.
pub fn equal_split_is_maximal(n: usize, m: usize) -> Result<bool> {
    if m == 0 || m > n || n > 20 || m > 4 {
        return Err(Error::Invalid(format!(
            "exhaustive composition check limited to n <= 20, m <= 4; got n={n} m={m}"
        )));
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_sizes = Vec::new();
    let mut sizes = vec![0usize; m];
    fn recurse(
        n: usize,
        sizes: &mut Vec<usize>,
        pos: usize,
        left: usize,
        best: &mut f64,
        best_sizes: &mut Vec<usize>,
    ) -> Result<()> {
        let m = sizes.len();
        if pos == m - 1 {
            sizes[pos] = left;
            let v = earac_block_tradeoff(n, sizes)?;
            if v > *best + 1e-15 {
                *best = v;
                *best_sizes = sizes.clone();
            }
            return Ok(());
        }
        for r in 1..=left - (m - 1 - pos) {
            sizes[pos] = r;
            recurse(n, sizes, pos + 1, left - r, best, best_sizes)?;
        }
        Ok(())
    }
    recurse(n, &mut sizes, 0, n, &mut best, &mut best_sizes)?;
    // optimum must be attained by the most even split
    let base = n / m;
    let rem = n % m;
    let mut even: Vec<usize> = vec![base + 1; rem];
    even.extend(std::iter::repeat_n(base, m - rem));
    let even_value = earac_block_tradeoff(n, &even)?;
    Ok(even_value >= best - 1e-12)
}

/// Everything the harness attaches to a bias report.
#[derive(Debug, Clone, Serialize)]
pub struct BoundSheet {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub eta: f64,
    /// unknowable multiplicative constant, published as 1
    pub c_eta: f64,
    pub lower: Vec<LowerBound>,
    pub thm44_upper: f64,
    pub corollaries: CorollaryBounds,
}

pub fn bound_sheet(
    f: &BooleanFunction,
    n: usize,
    m: usize,
    l: usize,
    eta: f64,
) -> Result<BoundSheet> {
    let k = f.arity();
    Ok(BoundSheet {
        n,
        m,
        k,
        eta,
        c_eta: 1.0,
        lower: lower_bound_sheet(f, n, m, k, l)?,
        thm44_upper: thm44_upper(f, n, m, eta)?,
        corollaries: corollary_bounds(f, n, m, eta, 0.5)?,
    })
}
