//! Small dense complex linear algebra for m-qubit encodings.
//!
//! Dimensions stay at or below 64, so everything is done with straight
//! O(d^3) loops and a hand-rolled cyclic Jacobi eigensolver. No external
//! linear-algebra dependency.

use crate::boolfn::{character, BitString, BooleanFunction};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 64;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const JACOBI_OFFDIAG_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                got: dim,
                max: MAX_DIM,
            });
        }
        Ok(ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> ComplexMatrix {
        let mut out = self.clone();
        for a in &mut out.data {
            *a *= c;
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d)?;
        for i in 0..d {
            for l in 0..d {
                let a = self.get(i, l);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn dagger(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = self.clone();
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn check_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    /// Row-major [re, im] pairs, for the harness JSON output.
    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| [self.get(i, j).re, self.get(i, j).im])
                    .collect()
            })
            .collect();
        serde_json::json!({ "dim": self.dim, "rows": rows })
    }
}

pub fn pauli_x() -> ComplexMatrix {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[vec![z, o], vec![o, z]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_rows(&[vec![o, z], vec![z, -o]]).unwrap()
}

/// A validated density matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let (eigs, _) = jacobi_eigh(&m)?;
        if let Some(&lambda) = eigs.iter().find(|&&l| l < -PSD_TOL) {
            return Err(Error::NotPositive(lambda));
        }
        Ok(DensityMatrix(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Ok(DensityMatrix(
            ComplexMatrix::identity(dim)?.scale(1.0 / dim as f64),
        ))
    }

    /// Pure state |psi><psi| from an unnormalized amplitude vector.
    pub fn pure_state(amplitudes: &[Complex64]) -> Result<Self> {
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm2 <= 0.0 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        let dim = amplitudes.len();
        let mut m = ComplexMatrix::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, amplitudes[i] * amplitudes[j].conj() / norm2);
            }
        }
        Ok(DensityMatrix(m))
    }
}

/// Single-qubit Bloch representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        BlochVector { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Uniform direction on the 2-sphere, by normalizing a Gaussian triple.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let mut g = || -> f64 {
                // Box-Muller
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            };
            let v = BlochVector::new(g(), g(), g());
            let n = v.norm();
            if n > 1e-12 {
                return BlochVector::new(v.x / n, v.y / n, v.z / n);
            }
        }
    }
}

/// (I + v_x X + v_y Y + v_z Z) / 2.
pub fn bloch_to_state(v: &BlochVector) -> Result<DensityMatrix> {
    let n = v.norm();
    if n > 1.0 + 1e-12 {
        return Err(Error::BlochNormTooLarge(n));
    }
    let mut m = ComplexMatrix::identity(2)?;
    let terms = [(v.x, pauli_x()), (v.y, pauli_y()), (v.z, pauli_z())];
    for (c, p) in terms {
        m = m.add(&p.scale(c))?;
    }
    DensityMatrix::new(m.scale(0.5))
}

/// Probability of outcome +1 when measuring along a unit Bloch direction.
pub fn measure_direction(rho: &DensityMatrix, v: &BlochVector) -> Result<f64> {
    let n = v.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitDirection(n));
    }
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(rho.dim(), 2));
    }
    // Tr(rho (I + v.sigma)/2) = 1/2 + (u.v)/2 for u the Bloch vector of rho
    let mut effect = ComplexMatrix::identity(2)?;
    effect = effect.add(&pauli_x().scale(v.x))?;
    effect = effect.add(&pauli_y().scale(v.y))?;
    effect = effect.add(&pauli_z().scale(v.z))?;
    let p = rho.matrix().matmul(&effect.scale(0.5))?.trace().re;
    // guard against round-off just outside [0,1]
    Ok(p.clamp(0.0, 1.0))
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns (eigenvalues, V) with M = V diag(eigenvalues) V^dagger.
pub fn jacobi_eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = m.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian(defect));
    }
    let d = m.dim();
    let mut a = m.clone();
    // symmetrize away round-off so the iteration preserves Hermiticity
    for i in 0..d {
        for j in 0..d {
            let v = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, v);
        }
    }
    let mut v = ComplexMatrix::identity(d)?;
    let scale = m.max_abs_entry().max(1.0);
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut offdiag = 0.0f64;
        for p in 0..d {
            for q in p + 1..d {
                offdiag = offdiag.max(a.get(p, q).norm());
            }
        }
        if offdiag <= JACOBI_OFFDIAG_TOL * scale {
            let eigs = (0..d).map(|i| a.get(i, i).re).collect();
            return Ok((eigs, v));
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a.get(p, q);
                if apq.norm() <= JACOBI_OFFDIAG_TOL * scale * 1e-3 {
                    continue;
                }
                // Unitary 2x2 rotation zeroing the (p,q) entry:
                // J = [[c, -s e^{i phi}], [s e^{-i phi}, c]] with
                // apq = |apq| e^{i phi}.
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let abs = apq.norm();
                let phase = apq / abs;
                let theta = 0.5 * (2.0 * abs).atan2(aqq - app);
                let c = theta.cos();
                let s = theta.sin();
                // rows/columns p and q update
                for j in 0..d {
                    let ap = a.get(p, j);
                    let aq = a.get(q, j);
                    a.set(p, j, ap * c - aq * phase * s);
                    a.set(q, j, ap * phase.conj() * s + aq * c);
                }
                for i in 0..d {
                    let ap = a.get(i, p);
                    let aq = a.get(i, q);
                    a.set(i, p, ap * c - aq * phase.conj() * s);
                    a.set(i, q, ap * phase * s + aq * c);
                }
                for i in 0..d {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, vp * c - vq * phase.conj() * s);
                    v.set(i, q, vp * phase * s + vq * c);
                }
            }
        }
    }
    let mut offdiag = 0.0f64;
    for p in 0..d {
        for q in p + 1..d {
            offdiag = offdiag.max(a.get(p, q).norm());
        }
    }
    Err(Error::JacobiNoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
        offdiag,
    })
}

/// Trace norm of a Hermitian matrix: sum of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let (eigs, _) = jacobi_eigh(m)?;
    Ok(eigs.iter().map(|l| l.abs()).sum())
}

/// Optimal two-state discrimination bias || p rho0 - (1-p) rho1 ||_tr.
pub fn helstrom_bias(rho0: &DensityMatrix, rho1: &DensityMatrix, p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let diff = rho0.matrix().scale(p).sub(&rho1.matrix().scale(1.0 - p))?;
    trace_norm(&diff)
}

/// Optimal average-case decoding bias 2^{-n} || sum_x f(x_S) rho(x) ||_tr
/// for one query sequence S (0-based indices into x).
pub fn optimal_qrac_bias(
    encoding: &[DensityMatrix],
    n: usize,
    f: &BooleanFunction,
    s: &[usize],
) -> Result<f64> {
    if n > 14 {
        return Err(Error::DimensionTooLarge { got: n, max: 14 });
    }
    if encoding.len() != 1 << n {
        return Err(Error::TableLength {
            expected: 1 << n,
            got: encoding.len(),
        });
    }
    let dim = encoding[0].dim();
    let mut acc = ComplexMatrix::zeros(dim)?;
    for (idx, rho) in encoding.iter().enumerate() {
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch(dim, rho.dim()));
        }
        let x = BitString::from_index(idx, n);
        let sign = f.eval(&x.select(s))? as f64;
        acc = acc.add(&rho.matrix().scale(sign))?;
    }
    Ok(trace_norm(&acc)? / (1u64 << n) as f64)
}

/// Joint outcome of equatorial singlet measurements at angles alpha, beta:
/// P(a, b) = (1 - a b cos(alpha - beta)) / 4, uniform marginals.
pub fn singlet_sample<R: Rng + ?Sized>(alpha: f64, beta: f64, rng: &mut R) -> (i8, i8) {
    let a: i8 = if rng.random::<bool>() { 1 } else { -1 };
    let b = singlet_conditional(a, alpha, beta, rng);
    (a, b)
}

/// Second party's outcome given the first party already measured `a` at
/// angle `alpha`: P(b | a) = (1 - a b cos(alpha - beta)) / 2.
pub fn singlet_conditional<R: Rng + ?Sized>(a: i8, alpha: f64, beta: f64, rng: &mut R) -> i8 {
    let p_plus = 0.5 * (1.0 - a as f64 * (alpha - beta).cos());
    if rng.random::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// Matrix-valued Fourier transform: F_hat(S) = 2^{-n} sum_x F(x) chi_S(x).
///
/// `values` is indexed by the shared input-index convention; the output is
/// indexed by subset mask.
pub fn matrix_fourier_transform(values: &[ComplexMatrix], n: usize) -> Result<Vec<ComplexMatrix>> {
    if n > 12 {
        return Err(Error::DimensionTooLarge { got: n, max: 12 });
    }
    if values.len() != 1 << n {
        return Err(Error::TableLength {
            expected: 1 << n,
            got: values.len(),
        });
    }
    let dim = values[0].dim();
    if dim > 16 {
        return Err(Error::DimensionTooLarge { got: dim, max: 16 });
    }
    let size = 1usize << n;
    let scale = 1.0 / size as f64;
    let mut out = Vec::with_capacity(size);
    for mask in 0..size {
        let mut acc = ComplexMatrix::zeros(dim)?;
        for (idx, m) in values.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch(dim, m.dim()));
            }
            acc = acc.add(&m.scale(character(mask, idx)))?;
        }
        out.push(acc.scale(scale));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(dim).unwrap();
        for i in 0..dim {
            m.set(i, i, Complex64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0));
            for j in i + 1..dim {
                let v = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        m
    }

    #[test]
    fn bloch_states() {
        let up = bloch_to_state(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!((up.matrix().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(up.matrix().get(1, 1).norm() < 1e-12);

        let mixed = bloch_to_state(&BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert!((mixed.matrix().get(0, 0).re - 0.5).abs() < 1e-12);

        let plus = bloch_to_state(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((plus.matrix().get(i, j).re - 0.5).abs() < 1e-12);
                assert!(plus.matrix().get(i, j).im.abs() < 1e-12);
            }
        }

        assert!(bloch_to_state(&BlochVector::new(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn measurement_probabilities() {
        let z = BlochVector::new(0.0, 0.0, 1.0);
        let up = bloch_to_state(&z).unwrap();
        assert!((measure_direction(&up, &z).unwrap() - 1.0).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((measure_direction(&mixed, &z).unwrap() - 0.5).abs() < 1e-12);

        let x_state = bloch_to_state(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        assert!((measure_direction(&x_state, &z).unwrap() - 0.5).abs() < 1e-12);

        assert!(measure_direction(&mixed, &BlochVector::new(0.0, 0.0, 0.5)).is_err());
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for trial in 0..100 {
            let dim = 2 + (trial % 9) * 7; // 2..=58, hits 64 below
            let dim = dim.min(MAX_DIM);
            let m = random_hermitian(dim, &mut rng);
            let (eigs, v) = jacobi_eigh(&m).unwrap();
            // M = V diag V^dagger
            let mut lam = ComplexMatrix::zeros(dim).unwrap();
            for (i, &e) in eigs.iter().enumerate() {
                lam.set(i, i, Complex64::new(e, 0.0));
            }
            let rebuilt = v.matmul(&lam).unwrap().matmul(&v.dagger()).unwrap();
            let err = rebuilt.sub(&m).unwrap().max_abs_entry();
            assert!(err < 1e-9, "dim={dim} err={err}");
        }
    }

    #[test]
    fn jacobi_handles_dim_64() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let m = random_hermitian(64, &mut rng);
        let (eigs, v) = jacobi_eigh(&m).unwrap();
        let mut lam = ComplexMatrix::zeros(64).unwrap();
        for (i, &e) in eigs.iter().enumerate() {
            lam.set(i, i, Complex64::new(e, 0.0));
        }
        let rebuilt = v.matmul(&lam).unwrap().matmul(&v.dagger()).unwrap();
        assert!(rebuilt.sub(&m).unwrap().max_abs_entry() < 1e-9);
    }

    #[test]
    fn trace_norm_examples() {
        let mut d = ComplexMatrix::zeros(2).unwrap();
        d.set(0, 0, Complex64::new(1.0, 0.0));
        d.set(1, 1, Complex64::new(-1.0, 0.0));
        assert!((trace_norm(&d).unwrap() - 2.0).abs() < 1e-12);

        let z = ComplexMatrix::zeros(3).unwrap();
        assert!(trace_norm(&z).unwrap() < 1e-12);

        // |0><0| - |+><+| has eigenvalues +-1/sqrt(2)
        let zero = bloch_to_state(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        let plus = bloch_to_state(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();
        let diff = zero.matrix().sub(plus.matrix()).unwrap();
        assert!((trace_norm(&diff).unwrap() - std::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn trace_norm_is_a_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let a = random_hermitian(6, &mut rng);
            let b = random_hermitian(6, &mut rng);
            let na = trace_norm(&a).unwrap();
            let nb = trace_norm(&b).unwrap();
            let nab = trace_norm(&a.add(&b).unwrap()).unwrap();
            assert!(nab <= na + nb + 1e-9);
            let c = rng.random::<f64>() * 4.0 - 2.0;
            let nca = trace_norm(&a.scale(c)).unwrap();
            assert!((nca - c.abs() * na).abs() < 1e-9);
        }
    }

    #[test]
    fn helstrom_examples() {
        let zero = bloch_to_state(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        let one = bloch_to_state(&BlochVector::new(0.0, 0.0, -1.0)).unwrap();
        let plus = bloch_to_state(&BlochVector::new(1.0, 0.0, 0.0)).unwrap();

        assert!((helstrom_bias(&zero, &one, 0.5).unwrap() - 1.0).abs() < 1e-10);
        assert!(helstrom_bias(&zero, &zero, 0.5).unwrap() < 1e-10);
        assert!(
            (helstrom_bias(&zero, &plus, 0.5).unwrap() - 1.0 / std::f64::consts::SQRT_2).abs()
                < 1e-10
        );
        // equals |2p-1| for identical states
        for &p in &[0.0, 0.2, 0.7, 1.0] {
            let b = helstrom_bias(&zero, &zero, p).unwrap();
            assert!((b - (2.0 * p - 1.0).abs()).abs() < 1e-10);
        }
        assert!(helstrom_bias(&zero, &one, 1.5).is_err());
    }

    #[test]
    fn qrac_bias_examples() {
        // maximally mixed encoding gives zero bias for any non-constant f
        let n = 3;
        let f = BooleanFunction::xor(2).unwrap();
        let enc: Vec<DensityMatrix> = (0..1usize << n)
            .map(|_| DensityMatrix::maximally_mixed(2).unwrap())
            .collect();
        let b = optimal_qrac_bias(&enc, n, &f, &[0, 1]).unwrap();
        assert!(b < 1e-10);

        // perfect 1 -> 1 code
        let f1 = BooleanFunction::dictator(1, 1).unwrap();
        let enc: Vec<DensityMatrix> = (0..2usize)
            .map(|idx| {
                let z = if idx == 0 { 1.0 } else { -1.0 };
                bloch_to_state(&BlochVector::new(0.0, 0.0, z)).unwrap()
            })
            .collect();
        let b = optimal_qrac_bias(&enc, 1, &f1, &[0]).unwrap();
        assert!((b - 1.0).abs() < 1e-10);

        // standard 2 -> 1 QRAC: bias 1/sqrt(2) on each bit
        let enc: Vec<DensityMatrix> = (0..4usize)
            .map(|idx| {
                let x = BitString::from_index(idx, 2);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                bloch_to_state(&BlochVector::new(
                    x.get(0) as f64 * s,
                    x.get(1) as f64 * s,
                    0.0,
                ))
                .unwrap()
            })
            .collect();
        let f_id = BooleanFunction::dictator(1, 1).unwrap();
        for pos in 0..2 {
            let b = optimal_qrac_bias(&enc, 2, &f_id, &[pos]).unwrap();
            assert!((b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn singlet_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        // perfect anticorrelation at equal angles
        for _ in 0..1000 {
            let (a, b) = singlet_sample(0.7, 0.7, &mut rng);
            assert_eq!(a, -b);
        }
        // E[ab] = -cos(pi/4) at angle difference pi/4
        let trials = 100_000;
        let mut sum = 0i64;
        for _ in 0..trials {
            let (a, b) = singlet_sample(std::f64::consts::FRAC_PI_4, 0.0, &mut rng);
            sum += (a * b) as i64;
        }
        let e = sum as f64 / trials as f64;
        let sigma = (1.0 / trials as f64).sqrt();
        assert!((e + std::f64::consts::FRAC_1_SQRT_2).abs() < 3.0 * sigma + 0.01);
        // independence at pi/2
        let mut sum = 0i64;
        for _ in 0..trials {
            let (a, b) = singlet_sample(std::f64::consts::FRAC_PI_2, 0.0, &mut rng);
            sum += (a * b) as i64;
        }
        assert!((sum as f64 / trials as f64).abs() < 3.0 * sigma + 0.01);
    }

    #[test]
    fn singlet_marginals_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let trials = 1_000_000usize;
        let (mut sa, mut sb) = (0i64, 0i64);
        for _ in 0..trials {
            let (a, b) = singlet_sample(0.3, 1.1, &mut rng);
            sa += a as i64;
            sb += b as i64;
        }
        let sigma = (trials as f64).sqrt();
        assert!((sa as f64).abs() < 4.0 * sigma);
        assert!((sb as f64).abs() < 4.0 * sigma);
    }

    #[test]
    fn matrix_fourier_examples() {
        let rho = bloch_to_state(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        let n = 3;
        let values: Vec<ComplexMatrix> = (0..1usize << n).map(|_| rho.matrix().clone()).collect();
        let hat = matrix_fourier_transform(&values, n).unwrap();
        assert!(hat[0].sub(rho.matrix()).unwrap().max_abs_entry() < 1e-12);
        for coeff in hat.iter().skip(1) {
            assert!(coeff.max_abs_entry() < 1e-12);
        }

        // F(x) = x_1 Z concentrates on the singleton {1}
        let values: Vec<ComplexMatrix> = (0..1usize << n)
            .map(|idx| {
                let x1 = BitString::from_index(idx, n).get(0) as f64;
                pauli_z().scale(x1)
            })
            .collect();
        let hat = matrix_fourier_transform(&values, n).unwrap();
        assert!(hat[1].sub(&pauli_z()).unwrap().max_abs_entry() < 1e-12);
        for (mask, coeff) in hat.iter().enumerate() {
            if mask != 1 {
                assert!(coeff.max_abs_entry() < 1e-12);
            }
        }
    }

    #[test]
    fn matrix_fourier_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for n in 1..=6usize {
            let values: Vec<ComplexMatrix> = (0..1usize << n)
                .map(|_| random_hermitian(2, &mut rng))
                .collect();
            let hat = matrix_fourier_transform(&values, n).unwrap();
            for (idx, value) in values.iter().enumerate() {
                let mut rebuilt = ComplexMatrix::zeros(2).unwrap();
                for (mask, coeff) in hat.iter().enumerate() {
                    rebuilt = rebuilt.add(&coeff.scale(character(mask, idx))).unwrap();
                }
                assert!(rebuilt.sub(value).unwrap().max_abs_entry() < 1e-10);
            }
        }
    }
}
