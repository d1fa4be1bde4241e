//! Small-dimension complex linear algebra and integration kernels.
//!
//! Everything here operates on dense matrices of dimension 2–4 (the
//! density-matrix and vectorized-superoperator sizes of this crate), so the
//! implementations favor directness over generality: the matrix exponential
//! is scaling-and-squaring with a truncated Taylor series, Hermitian
//! eigenvalues come from a cyclic Jacobi sweep on the real symmetric
//! embedding, and the ODE integrator is fixed-step classical RK4.

use num_complex::Complex64;

use crate::error::{PtError, Result};

/// Dense row-major complex matrix of small dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Build from row-major entries; rejects wrong lengths and non-finite values.
    pub fn from_rows(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(PtError::DimensionMismatch(entries.len(), dim * dim));
        }
        let m = CMat { dim, data: entries.to_vec() };
        if !m.is_finite() {
            return Err(PtError::InvalidArgument("non-finite matrix entry".into()));
        }
        Ok(m)
    }

    #[inline]
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        CMat { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &CVec) -> CVec {
        assert_eq!(self.dim, v.dim(), "matvec dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::ZERO; n];
        for (i, out_i) in out.iter_mut().enumerate() {
            for j in 0..n {
                *out_i += self.get(i, j) * v.get(j);
            }
        }
        CVec::new(out)
    }

    /// Hilbert-Schmidt inner product Tr[self† other].
    pub fn hs_inner(&self, other: &CMat) -> Complex64 {
        assert_eq!(self.dim, other.dim, "hs_inner dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Sum of squared entries (transpose inner product Tr[selfᵀ self], no conjugation).
    pub fn entry_square_sum(&self) -> Complex64 {
        self.data.iter().map(|z| z * z).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in i..self.dim {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Embeds H = X + iY into the real symmetric [[X, −Y], [Y, X]] (whose
    /// spectrum is that of H doubled) and runs cyclic Jacobi sweeps. The
    /// caller is responsible for Hermiticity; small anti-Hermitian parts are
    /// symmetrized away by the embedding.
    pub fn herm_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                // Symmetrized entry of (H + H†)/2.
                let h = 0.5 * (self.get(i, j) + self.get(j, i).conj());
                a[i * m + j] = h.re;
                a[(i + n) * m + (j + n)] = h.re;
                a[i * m + (j + n)] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        jacobi_sym_eigenvalues(&mut a, m);
        let mut vals = Vec::with_capacity(m);
        for i in 0..m {
            vals.push(a[i * m + i]);
        }
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Each eigenvalue of H appears twice in the embedding.
        (0..n).map(|i| 0.5 * (vals[2 * i] + vals[2 * i + 1])).collect()
    }
}

impl std::ops::Add<&CMat> for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub<&CMat> for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        CMat {
            dim: self.dim,
            data: self.data.iter().zip(rhs.data.iter()).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Cyclic Jacobi on a dense real symmetric matrix, in place; diagonal holds
/// the eigenvalues afterwards.
fn jacobi_sym_eigenvalues(a: &mut [f64], m: usize) {
    let scale: f64 = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return;
    }
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..m {
            for q in (p + 1)..m {
                off = off.max(a[p * m + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

/// Dense complex vector (vectorized density matrices and state vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct CVec {
    data: Vec<Complex64>,
}

impl CVec {
    pub fn new(data: Vec<Complex64>) -> Self {
        CVec { data }
    }

    pub fn zeros(dim: usize) -> Self {
        CVec { data: vec![Complex64::ZERO; dim] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: Complex64) {
        self.data[i] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn scale(&self, c: Complex64) -> CVec {
        CVec { data: self.data.iter().map(|z| z * c).collect() }
    }

    /// self + c * other
    pub fn axpy(&self, c: Complex64, other: &CVec) -> CVec {
        assert_eq!(self.dim(), other.dim(), "axpy dimension mismatch");
        CVec {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Matrix exponential exp(m·t) by scaling-and-squaring with a truncated
/// Taylor series (terms dropped below 1e-16 in max norm). Exact at t = 0.
pub fn mat_exp(m: &CMat, t: f64) -> Result<CMat> {
    if !m.is_finite() || !t.is_finite() {
        return Err(PtError::InvalidArgument("non-finite input to mat_exp".into()));
    }
    if t < 0.0 {
        return Err(PtError::InvalidArgument(format!("mat_exp requires t >= 0, got {t}")));
    }
    let a = m.scale(Complex64::new(t, 0.0));
    let norm = a.max_abs() * a.dim() as f64;
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let b = a.scale(Complex64::new(0.5f64.powi(s as i32), 0.0));

    let mut sum = CMat::identity(m.dim());
    let mut term = CMat::identity(m.dim());
    for k in 1..=64 {
        term = term.matmul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = &sum + &term;
        if term.max_abs() < 1e-16 {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    Ok(sum)
}

/// Fixed-step classical 4th-order Runge-Kutta from t = 0 to t_end.
///
/// The step is `dt` with a shorter final step when `dt` does not divide
/// `t_end`; global error is O(dt⁴).
pub fn rk4_propagate<F>(deriv: F, y0: &CVec, t_end: f64, dt: f64) -> Result<CVec>
where
    F: Fn(&CVec) -> CVec,
{
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PtError::InvalidArgument(format!("rk4 requires dt > 0, got {dt}")));
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(PtError::InvalidArgument(format!("rk4 requires t_end >= 0, got {t_end}")));
    }
    let n_full = (t_end / dt).floor() as u64;
    let remainder = t_end - n_full as f64 * dt;
    let mut y = y0.clone();
    for _ in 0..n_full {
        y = rk4_step(&deriv, &y, dt);
    }
    if remainder > dt * 1e-12 {
        y = rk4_step(&deriv, &y, remainder);
    }
    Ok(y)
}

fn rk4_step<F>(deriv: &F, y: &CVec, h: f64) -> CVec
where
    F: Fn(&CVec) -> CVec,
{
    let half = Complex64::new(0.5 * h, 0.0);
    let k1 = deriv(y);
    let k2 = deriv(&y.axpy(half, &k1));
    let k3 = deriv(&y.axpy(half, &k2));
    let k4 = deriv(&y.axpy(Complex64::new(h, 0.0), &k3));
    let sixth = h / 6.0;
    let mut out = y.clone();
    out = out.axpy(Complex64::new(sixth, 0.0), &k1);
    out = out.axpy(Complex64::new(2.0 * sixth, 0.0), &k2);
    out = out.axpy(Complex64::new(2.0 * sixth, 0.0), &k3);
    out = out.axpy(Complex64::new(sixth, 0.0), &k4);
    out
}

/// Trace-norm distance Tr[√((a−b)†(a−b))] between Hermitian matrices, i.e.
/// the sum of singular values of a − b. No factor 1/2.
pub fn trace_norm_diff(a: &CMat, b: &CMat) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(PtError::DimensionMismatch(a.dim(), b.dim()));
    }
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    if !a.is_hermitian(1e-8 * scale) || !b.is_hermitian(1e-8 * scale) {
        return Err(PtError::InvalidArgument("trace_norm_diff requires Hermitian inputs".into()));
    }
    let d = a - b;
    // For Hermitian d the singular values are |eigenvalues|.
    Ok(d.herm_eigenvalues().iter().map(|l| l.abs()).sum())
}

/// sinh(z)/z, series-evaluated near zero.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::ONE + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// 2(cosh(z) − 1)/z², series-evaluated near zero.
pub fn coshm1c(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::ONE + z2 / 12.0 + z2 * z2 / 360.0
    } else {
        (z.cosh() - Complex64::ONE) * 2.0 / (z * z)
    }
}
