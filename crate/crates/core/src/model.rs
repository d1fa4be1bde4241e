//! System generators and their closed-form spectra.
//!
//! The model is a driven two-level system with coherent coupling Ω between
//! |0⟩ and |1⟩ and a tunable loss γ out of |1⟩. Dropping the quantum jumps
//! leaves the non-Hermitian generator
//!
//!   H_eff = (Ω/2)σ_x − iγ|1⟩⟨1| = H_PT − i(γ/2)I,
//!
//! with H_PT = (Ω/2)σ_x − i(γ/2)σ_z the gain-loss-balanced Hamiltonian. The
//! two-level density matrix obeys ρ̇ = −i(H_eff ρ − ρ H_eff†), represented
//! here as a 4×4 matrix acting on vec(ρ) = (ρ₁₁, ρ₁₀, ρ₀₁, ρ₀₀).
//!
//! Basis and sign conventions, fixed once for the whole crate:
//! * matrices are written in the internal order (|0⟩, |1⟩), index 0 ↔ |0⟩;
//! * σ_z assigns −1 to |0⟩ and +1 to |1⟩ (the lossy state carries +1), so
//!   σ_z = diag(−1, 1) and σ_y = [[0, i], [−i, 0]] in the internal order.
//!
//! All closed forms below hold verbatim under these conventions; that is the
//! criterion that fixed them. κ = √(γ² − Ω²) is kept complex (purely
//! imaginary in the PT-symmetric phase), and everything is expressed in
//! angular frequency (rad/s).

use num_complex::Complex64;

use crate::error::{PtError, Result};
use crate::numerics::{CMat, CVec};

/// Relative half-width |κ|/Ω of the exceptional-point band. Below this the
/// spectral decomposition loses ~12 digits to cancellation and callers must
/// use the matrix-exponential or limit-form paths.
pub const EP_REL_TOL: f64 = 1e-6;

const IM: Complex64 = Complex64::new(0.0, 1.0);

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Rabi rate Ω and loss rate γ, both angular frequencies (rad/s).
///
/// These two numbers define every generator in the crate. γ ≥ 0 always;
/// Ω = 0 is accepted for building the bare generators, but the spectral and
/// phase machinery requires Ω > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega: f64,
    gamma: f64,
}

impl SystemParams {
    pub fn new(omega: f64, gamma: f64) -> Result<Self> {
        if !omega.is_finite() || !gamma.is_finite() {
            return Err(PtError::InvalidArgument("non-finite system parameter".into()));
        }
        if omega < 0.0 {
            return Err(PtError::InvalidArgument(format!("omega must be >= 0, got {omega}")));
        }
        if gamma < 0.0 {
            return Err(PtError::InvalidArgument(format!("gamma must be >= 0, got {gamma}")));
        }
        Ok(SystemParams { omega, gamma })
    }

    /// Boundary-unit constructor: ordinary frequencies in kHz, converted to
    /// rad/s here and nowhere else.
    pub fn from_khz(omega_khz: f64, gamma_khz: f64) -> Result<Self> {
        let f = 2.0 * std::f64::consts::PI * 1e3;
        SystemParams::new(omega_khz * f, gamma_khz * f)
    }

    #[inline]
    pub fn omega(&self) -> f64 {
        self.omega
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// κ² = γ² − Ω² (rad/s)².
    #[inline]
    pub fn kappa_sq(&self) -> f64 {
        self.gamma * self.gamma - self.omega * self.omega
    }

    /// Principal κ = √(γ² − Ω²): real in the broken phase, +i|κ| in the
    /// symmetric phase.
    pub fn kappa(&self) -> Complex64 {
        let ksq = self.kappa_sq();
        if ksq >= 0.0 {
            cr(ksq.sqrt())
        } else {
            Complex64::new(0.0, (-ksq).sqrt())
        }
    }

    /// |κ| (rad/s); in the symmetric phase this is the oscillation angular
    /// frequency ω = √(Ω² − γ²).
    #[inline]
    pub fn kappa_abs(&self) -> f64 {
        self.kappa_sq().abs().sqrt()
    }

    /// Whether the parameters sit inside the exceptional-point band
    /// |κ| ≤ EP_REL_TOL·Ω.
    pub fn at_ep(&self) -> bool {
        self.kappa_abs() <= EP_REL_TOL * self.omega
    }

    /// Default integrator step: one thousandth of the Rabi period, clamped
    /// to at most 1/(10γ) so strong decay stays resolved. Requires Ω > 0.
    pub fn default_dt(&self) -> Result<f64> {
        if self.omega <= 0.0 {
            return Err(PtError::InvalidArgument("default_dt requires omega > 0".into()));
        }
        let dt = (2.0 * std::f64::consts::PI / self.omega) / 1000.0;
        Ok(if self.gamma > 0.0 { dt.min(1.0 / (10.0 * self.gamma)) } else { dt })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseTag {
    /// PT-symmetric: γ < Ω, oscillatory dynamics.
    Pts,
    /// Exceptional point: |κ| within the EP band.
    Ep,
    /// PT-broken: γ > Ω, one mode dominates.
    Ptb,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub tag: PhaseTag,
    /// κ² = γ² − Ω² (rad/s)².
    pub kappa_sq: f64,
}

/// Classify the PT phase of the parameters; the EP band is |κ| ≤ EP_REL_TOL·Ω.
pub fn classify_phase(p: &SystemParams) -> Phase {
    let kappa_sq = p.kappa_sq();
    let tag = if p.at_ep() {
        PhaseTag::Ep
    } else if kappa_sq < 0.0 {
        PhaseTag::Pts
    } else {
        PhaseTag::Ptb
    };
    Phase { tag, kappa_sq }
}

/// σ_x = `[[0,1],[1,0]]`.
pub fn sigma_x() -> CMat {
    CMat::from_rows(2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]).unwrap()
}

/// σ_y in the crate convention: [[0, i], [−i, 0]].
pub fn sigma_y() -> CMat {
    CMat::from_rows(2, &[cr(0.0), IM, -IM, cr(0.0)]).unwrap()
}

/// σ_z in the crate convention: diag(−1, +1), i.e. −1 on |0⟩.
pub fn sigma_z() -> CMat {
    CMat::from_rows(2, &[cr(-1.0), cr(0.0), cr(0.0), cr(1.0)]).unwrap()
}

/// H_eff = (Ω/2)σ_x − iγ|1⟩⟨1| = [[0, Ω/2], [Ω/2, −iγ]].
pub fn build_h_eff(p: &SystemParams) -> CMat {
    let half = cr(p.omega() / 2.0);
    CMat::from_rows(2, &[cr(0.0), half, half, -IM * p.gamma()]).unwrap()
}

/// H_PT = (Ω/2)σ_x − i(γ/2)σ_z; satisfies H_eff = H_PT − i(γ/2)I entrywise.
pub fn build_h_pt(p: &SystemParams) -> CMat {
    let half = cr(p.omega() / 2.0);
    let g2 = p.gamma() / 2.0;
    CMat::from_rows(2, &[IM * g2, half, half, -IM * g2]).unwrap()
}

/// Eigenvalues of H_eff: E± = ½(−iγ ± √(Ω² − γ²)), branch-evaluated so real
/// and imaginary parts are exact in each phase.
pub fn h_eff_eigenvalues(p: &SystemParams) -> [Complex64; 2] {
    let g2 = p.gamma() / 2.0;
    if p.at_ep() {
        return [Complex64::new(0.0, -g2), Complex64::new(0.0, -g2)];
    }
    let half = p.kappa_abs() / 2.0;
    if p.kappa_sq() < 0.0 {
        // PTS: √(Ω²−γ²) real.
        [Complex64::new(half, -g2), Complex64::new(-half, -g2)]
    } else {
        // PTB: √(Ω²−γ²) = iκ.
        [Complex64::new(0.0, half - g2), Complex64::new(0.0, -half - g2)]
    }
}

/// Eigenvalues of H_PT: ±½√(Ω² − γ²); real in the symmetric phase, purely
/// imaginary in the broken phase, exactly zero at the EP.
pub fn h_pt_eigenvalues(p: &SystemParams) -> [Complex64; 2] {
    if p.at_ep() {
        return [Complex64::ZERO, Complex64::ZERO];
    }
    let half = p.kappa_abs() / 2.0;
    if p.kappa_sq() < 0.0 {
        [Complex64::new(half, 0.0), Complex64::new(-half, 0.0)]
    } else {
        [Complex64::new(0.0, half), Complex64::new(0.0, -half)]
    }
}

/// Closed-form eigensystem of H_eff.
#[derive(Debug, Clone)]
pub struct HamiltonianSpectrum {
    pub e1: Complex64,
    pub e2: Complex64,
    /// Unnormalized eigenvector for e1, internal order: (Ω, −iγ + √(Ω²−γ²)).
    pub v1: CVec,
    /// Unnormalized eigenvector for e2, internal order: (Ω, −iγ − √(Ω²−γ²)).
    pub v2: CVec,
    /// At the EP both eigenvectors coincide (∝ (1, −i)); this flags it.
    pub at_ep: bool,
}

/// Closed-form eigenvalues and eigenvectors of H_eff.
pub fn h_eigensystem(p: &SystemParams) -> Result<HamiltonianSpectrum> {
    if p.omega() <= 0.0 {
        return Err(PtError::InvalidArgument("h_eigensystem requires omega > 0".into()));
    }
    let [e1, e2] = h_eff_eigenvalues(p);
    // e = (−iγ ± s)/2, so s = e1 − e2 on the same branch as the eigenvalues.
    let s = e1 - e2;
    let minus_ig = -IM * p.gamma();
    let om = cr(p.omega());
    let v1 = CVec::new(vec![om, minus_ig + s]);
    let v2 = CVec::new(vec![om, minus_ig - s]);
    Ok(HamiltonianSpectrum { e1, e2, v1, v2, at_ep: p.at_ep() })
}

/// The 4×4 generator of ρ̇ = −i(H_eff ρ − ρ H_eff†) acting on
/// vec(ρ) = (ρ₁₁, ρ₁₀, ρ₀₁, ρ₀₀):
///
/// ```text
///   ⎛ −2γ     iΩ/2   −iΩ/2   0    ⎞
///   ⎜ iΩ/2   −γ       0     −iΩ/2 ⎟
///   ⎜ −iΩ/2   0      −γ      iΩ/2 ⎟
///   ⎝  0     −iΩ/2    iΩ/2   0    ⎠
/// ```
pub fn build_liouvillian(p: &SystemParams) -> CMat {
    let g = p.gamma();
    let ih = IM * (p.omega() / 2.0);
    let z = Complex64::ZERO;
    CMat::from_rows(
        4,
        &[
            cr(-2.0 * g), ih, -ih, z,
            ih, cr(-g), z, -ih,
            -ih, z, cr(-g), ih,
            z, -ih, ih, z,
        ],
    )
    .unwrap()
}

/// Vectorize an internal-order 2×2 matrix into the (ρ₁₁, ρ₁₀, ρ₀₁, ρ₀₀)
/// ordering used by [`build_liouvillian`].
pub fn vec_rho(rho: &CMat) -> CVec {
    assert_eq!(rho.dim(), 2, "vec_rho expects a 2x2 matrix");
    CVec::new(vec![rho.get(1, 1), rho.get(1, 0), rho.get(0, 1), rho.get(0, 0)])
}

/// Inverse of [`vec_rho`].
pub fn unvec_rho(v: &CVec) -> CMat {
    assert_eq!(v.dim(), 4, "unvec_rho expects a 4-vector");
    CMat::from_rows(2, &[v.get(3), v.get(2), v.get(1), v.get(0)]).unwrap()
}

/// The coalesced eigenmatrix at the EP: ½[[1, i], [−i, 1]] in internal
/// order, the projector onto (|0⟩ − i|1⟩)/√2.
pub fn ep_eigenmatrix() -> CMat {
    CMat::from_rows(2, &[cr(0.5), IM * 0.5, -IM * 0.5, cr(0.5)]).unwrap()
}

/// Closed-form spectral decomposition of the two-level Liouvillian.
///
/// Off the EP: four eigenvalues {−γ+κ, −γ, −γ, −γ−κ} (ordered by
/// non-increasing real part) with right eigenmatrices R_i and left
/// eigenmatrices L_i biorthonormalized so that Tr[L_i†R_j] = δ_ij.
///
/// At the EP the modes R₁ and R₄ coalesce onto [`ep_eigenmatrix`]; the
/// spectrum is returned with `at_ep = true`, the coalesced matrix in the
/// outer right slots, and no usable left basis (spectral propagation must
/// go through the matrix exponential instead).
#[derive(Debug, Clone)]
pub struct LiouvillianSpectrum {
    pub params: SystemParams,
    pub lambdas: [Complex64; 4],
    pub rights: [CMat; 4],
    pub lefts: [CMat; 4],
    pub at_ep: bool,
}

/// Closed-form eigensystem of the Liouvillian, internal basis order.
pub fn liouvillian_spectrum(p: &SystemParams) -> Result<LiouvillianSpectrum> {
    if p.omega() <= 0.0 {
        return Err(PtError::InvalidArgument("liouvillian_spectrum requires omega > 0".into()));
    }
    let g = cr(p.gamma());
    let om = cr(p.omega());
    let om2 = om * om;
    let k = p.kappa();
    let lambdas = [-g + k, -g, -g, -g - k];

    // Right eigenmatrices, internal order. R1 and R4 are the (unnormalized)
    // decay/growth modes; R2 and R3 span the doubly degenerate −γ eigenspace
    // and are chosen Hermitian so they double as fixed-point initial states.
    let r1 = CMat::from_rows(
        2,
        &[
            cr(1.0),
            -IM * (k - g) / om,
            IM * (k - g) / om,
            -(g * (k - g) * 2.0 + om2) / om2,
        ],
    )?;
    let r2 = CMat::from_rows(2, &[cr(1.0), IM * g / om, -IM * g / om, cr(1.0)])?;
    let r3 = CMat::from_rows(2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])?;
    let r4 = CMat::from_rows(
        2,
        &[
            cr(1.0),
            IM * (g + k) / om,
            -IM * (g + k) / om,
            (g * (g + k) * 2.0 - om2) / om2,
        ],
    )?;

    if p.at_ep() {
        let rep = ep_eigenmatrix();
        return Ok(LiouvillianSpectrum {
            params: *p,
            lambdas,
            rights: [rep.clone(), r2, r3, rep],
            lefts: [CMat::zeros(2), CMat::zeros(2), CMat::zeros(2), CMat::zeros(2)],
            at_ep: true,
        });
    }

    // Both the 4×4 generator and H_eff are complex symmetric in this basis,
    // so the left eigenmatrices are the entrywise conjugates of the rights;
    // the transpose inner product Σ (R_i)_ab² fixes the normalization.
    let rights = [r1, r2, r3, r4];
    let mut lefts = [CMat::zeros(2), CMat::zeros(2), CMat::zeros(2), CMat::zeros(2)];
    for (i, r) in rights.iter().enumerate() {
        let n = r.entry_square_sum();
        if n.norm() < 1e-300 {
            return Err(PtError::EpDegenerate(
                "self-orthogonal eigenmatrix outside the EP band".into(),
            ));
        }
        lefts[i] = r.conj().scale(Complex64::ONE / n.conj());
    }

    Ok(LiouvillianSpectrum { params: *p, lambdas, rights, lefts, at_ep: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{mat_exp, rk4_propagate};
    use approx::assert_relative_eq;

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn h_eff_pure_sigma_x() {
        let p = SystemParams::new(2.0, 0.0).unwrap();
        let h = build_h_eff(&p);
        let expected = sigma_x();
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn h_eff_pure_loss() {
        let p = SystemParams::new(0.0, 2.0).unwrap();
        let h = build_h_eff(&p);
        assert_eq!(h.get(0, 0), Complex64::ZERO);
        assert_eq!(h.get(0, 1), Complex64::ZERO);
        assert_eq!(h.get(1, 0), Complex64::ZERO);
        assert_eq!(h.get(1, 1), c(0.0, -2.0));
    }

    #[test]
    fn h_eff_degenerate_at_ep() {
        let p = SystemParams::from_khz(32.0, 32.0).unwrap();
        let [e1, e2] = h_eff_eigenvalues(&p);
        let expected = c(0.0, -p.gamma() / 2.0);
        assert!((e1 - expected).norm() < 1e-9);
        assert!((e2 - expected).norm() < 1e-9);
    }

    #[test]
    fn h_pt_hermitian_limit() {
        let p = SystemParams::from_khz(32.0, 0.0).unwrap();
        let h = build_h_pt(&p);
        assert!(h.is_hermitian(1e-12));
        let [e1, e2] = h_pt_eigenvalues(&p);
        assert_relative_eq!(e1.re, p.omega() / 2.0, epsilon = 1e-9);
        assert_relative_eq!(e2.re, -p.omega() / 2.0, epsilon = 1e-9);
        assert_eq!(e1.im, 0.0);
        assert_eq!(e2.im, 0.0);
    }

    #[test]
    fn h_pt_real_spectrum_below_ep() {
        // 2x2 characteristic polynomial: eigenvalues ±(1/2)√(Ω²−γ²).
        let p = SystemParams::from_khz(32.0, 16.0).unwrap();
        let [e1, e2] = h_pt_eigenvalues(&p);
        let expected = 0.5 * (p.omega() * p.omega() - p.gamma() * p.gamma()).sqrt();
        assert_relative_eq!(e1.re, expected, max_relative = 1e-12);
        assert_relative_eq!(e2.re, -expected, max_relative = 1e-12);
        assert_eq!(e1.im, 0.0);
    }

    #[test]
    fn h_pt_imaginary_spectrum_above_ep() {
        let p = SystemParams::from_khz(32.0, 47.0).unwrap();
        let [e1, e2] = h_pt_eigenvalues(&p);
        let expected = 0.5 * (p.gamma() * p.gamma() - p.omega() * p.omega()).sqrt();
        assert_eq!(e1.re, 0.0);
        assert_eq!(e2.re, 0.0);
        assert_relative_eq!(e1.im, expected, max_relative = 1e-12);
        assert_relative_eq!(e2.im, -expected, max_relative = 1e-12);
    }

    #[test]
    fn h_eigensystem_sigma_x_limit() {
        let p = SystemParams::new(2.0, 0.0).unwrap();
        let s = h_eigensystem(&p).unwrap();
        assert!((s.e1 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.e2 - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn h_eigensystem_ep_vectors_parallel() {
        let p = SystemParams::from_khz(32.0, 32.0).unwrap();
        let s = h_eigensystem(&p).unwrap();
        assert!(s.at_ep);
        // Both ∝ (Ω, −iγ) = Ω(1, −i): the maximum coherent superposition.
        for v in [&s.v1, &s.v2] {
            let ratio = v.get(1) / v.get(0);
            assert!((ratio - c(0.0, -1.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn h_eigensystem_broken_phase_values() {
        // Ω = 2π·32 kHz, γ = 2π·47 kHz: E = −i(γ ∓ κ)/2 with κ = 2π·34.424 kHz.
        let p = SystemParams::from_khz(32.0, 47.0).unwrap();
        let s = h_eigensystem(&p).unwrap();
        let kappa = p.kappa_abs();
        assert_relative_eq!(kappa / TAU / 1e3, 34.4238, epsilon = 1e-3);
        assert!((s.e1 - c(0.0, -(p.gamma() - kappa) / 2.0)).norm() < 1e-6);
        assert!((s.e2 - c(0.0, -(p.gamma() + kappa) / 2.0)).norm() < 1e-6);
    }

    #[test]
    fn h_eigensystem_trace_and_determinant() {
        // Characteristic-polynomial roots: e1 + e2 = tr H_eff = −iγ and
        // e1·e2 = det H_eff = −Ω²/4.
        for (okhz, gkhz) in [(32.0, 1.0), (32.0, 32.0), (32.0, 47.0), (7.0, 90.0)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let s = h_eigensystem(&p).unwrap();
            let scale = p.omega().max(p.gamma());
            assert!((s.e1 + s.e2 - c(0.0, -p.gamma())).norm() < 1e-12 * scale);
            let det = c(-p.omega() * p.omega() / 4.0, 0.0);
            assert!((s.e1 * s.e2 - det).norm() < 1e-12 * scale * scale);
        }
    }

    #[test]
    fn h_eigensystem_vectors_satisfy_eigen_relation() {
        for (okhz, gkhz) in [(32.0, 1.0), (32.0, 47.0), (17.0, 3.5)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let h = build_h_eff(&p);
            let s = h_eigensystem(&p).unwrap();
            for (e, v) in [(s.e1, &s.v1), (s.e2, &s.v2)] {
                let hv = h.matvec(v);
                let ev = v.scale(e);
                let err: f64 = hv
                    .entries()
                    .iter()
                    .zip(ev.entries())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-6 * p.omega(), "eigen residual {err}");
            }
        }
    }

    #[test]
    fn h_eff_equals_h_pt_minus_half_gamma() {
        for (okhz, gkhz) in [(32.0, 0.0), (32.0, 16.0), (32.0, 47.0), (5.0, 80.0)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let lhs = build_h_eff(&p);
            let shift = CMat::identity(2).scale(IM * (p.gamma() / 2.0));
            let rhs = &build_h_pt(&p) - &shift;
            assert!(lhs.max_abs_diff(&rhs) < 1e-12 * p.omega().max(p.gamma()).max(1.0));
        }
    }

    #[test]
    fn liouvillian_action_matches_component_odes() {
        // dρ₁₁ = −2γρ₁₁ − i(Ω/2)(ρ₀₁ − ρ₁₀), dρ₀₀ = i(Ω/2)(ρ₀₁ − ρ₁₀),
        // dρ₀₁ = −γρ₀₁ + i(Ω/2)(ρ₀₀ − ρ₁₁), applied to 100 random matrices.
        let p = SystemParams::from_khz(32.0, 7.0).unwrap();
        let l = build_liouvillian(&p);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let ih = IM * (p.omega() / 2.0);
        for _ in 0..100 {
            let rho = CMat::from_rows(
                2,
                &[c(next(), next()), c(next(), next()), c(next(), next()), c(next(), next())],
            )
            .unwrap();
            let got = l.matvec(&vec_rho(&rho));
            let r00 = rho.get(0, 0);
            let r11 = rho.get(1, 1);
            let r01 = rho.get(0, 1);
            let r10 = rho.get(1, 0);
            let d11 = cr(-2.0 * p.gamma()) * r11 - ih * (r01 - r10);
            let d00 = ih * (r01 - r10);
            let d01 = cr(-p.gamma()) * r01 + ih * (r00 - r11);
            let d10 = cr(-p.gamma()) * r10 - ih * (r00 - r11);
            let expect = [d11, d10, d01, d00];
            for (i, e) in expect.iter().enumerate() {
                assert!(
                    (got.get(i) - e).norm() < 1e-9 * p.omega(),
                    "component {i} mismatch"
                );
            }
        }
    }

    #[test]
    fn liouvillian_unitary_limit_spectrum() {
        // γ = 0: κ = iΩ, eigenvalues {iΩ, 0, 0, −iΩ}.
        let p = SystemParams::from_khz(32.0, 0.0).unwrap();
        let s = liouvillian_spectrum(&p).unwrap();
        assert!((s.lambdas[0] - c(0.0, p.omega())).norm() < 1e-9);
        assert!((s.lambdas[1]).norm() < 1e-12);
        assert!((s.lambdas[2]).norm() < 1e-12);
        assert!((s.lambdas[3] - c(0.0, -p.omega())).norm() < 1e-9);
        // Coherence mode for λ = +iΩ is traceless.
        assert!(s.rights[0].trace().norm() < 1e-12);
    }

    #[test]
    fn liouvillian_spectrum_weak_loss() {
        // Eigenvalues {−γ±κ, −γ, −γ} with κ imaginary for γ < Ω.
        let p = SystemParams::from_khz(32.0, 1.0).unwrap();
        let s = liouvillian_spectrum(&p).unwrap();
        let g = p.gamma();
        let k = p.kappa();
        assert!(k.re == 0.0 && k.im > 0.0);
        assert!((s.lambdas[0] - (c(-g, 0.0) + k)).norm() < 1e-9);
        assert!((s.lambdas[1] - c(-g, 0.0)).norm() < 1e-9);
        assert!((s.lambdas[2] - c(-g, 0.0)).norm() < 1e-9);
        assert!((s.lambdas[3] - (c(-g, 0.0) - k)).norm() < 1e-9);
    }

    #[test]
    fn liouvillian_eigen_relation_and_biorthonormality() {
        for (okhz, gkhz) in [(32.0, 1.0), (32.0, 16.0), (32.0, 47.0), (11.0, 60.0)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let l = build_liouvillian(&p);
            let s = liouvillian_spectrum(&p).unwrap();
            let scale = p.omega().max(p.gamma());
            for i in 0..4 {
                let lv = l.matvec(&vec_rho(&s.rights[i]));
                let ev = vec_rho(&s.rights[i]).scale(s.lambdas[i]);
                let err: f64 = lv
                    .entries()
                    .iter()
                    .zip(ev.entries())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10 * scale, "eigen residual {err} at i={i}");
                for j in 0..4 {
                    let g = s.lefts[i].hs_inner(&s.rights[j]);
                    let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                    assert!((g - target).norm() < 1e-10, "gram ({i},{j}) = {g}");
                }
            }
        }
    }

    #[test]
    fn liouvillian_eigenvalues_match_hamiltonian_pairs() {
        // λ multiset equals {−i(E_j − E_k*)} over H_eff eigenvalue pairs.
        for (okhz, gkhz) in [(32.0, 1.0), (32.0, 47.0), (9.0, 2.0)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let s = liouvillian_spectrum(&p).unwrap();
            let [e1, e2] = h_eff_eigenvalues(&p);
            let mut pairs: Vec<Complex64> = [(e1, e1), (e1, e2), (e2, e1), (e2, e2)]
                .iter()
                .map(|(a, b)| -IM * (a - b.conj()))
                .collect();
            let mut lams = s.lambdas.to_vec();
            let key = |z: &Complex64| (z.re, z.im);
            pairs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            lams.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
            for (a, b) in pairs.iter().zip(lams.iter()) {
                assert!((a - b).norm() < 1e-10 * p.omega().max(p.gamma()));
            }
        }
    }

    #[test]
    fn liouvillian_spectral_reconstruction() {
        // Σ λ_i vec(R_i) vec(L_i)† rebuilds the generator.
        for (okhz, gkhz) in [(32.0, 1.0), (32.0, 47.0)] {
            let p = SystemParams::from_khz(okhz, gkhz).unwrap();
            let l = build_liouvillian(&p);
            let s = liouvillian_spectrum(&p).unwrap();
            let mut rec = CMat::zeros(4);
            for i in 0..4 {
                let r = vec_rho(&s.rights[i]);
                let lf = vec_rho(&s.lefts[i]);
                for a in 0..4 {
                    for b in 0..4 {
                        let cur = rec.get(a, b);
                        rec.set(a, b, cur + s.lambdas[i] * r.get(a) * lf.get(b).conj());
                    }
                }
            }
            assert!(rec.max_abs_diff(&l) < 1e-9 * p.omega().max(p.gamma()));
        }
    }

    #[test]
    fn liouvillian_ep_structure() {
        let p = SystemParams::from_khz(32.0, 32.0).unwrap();
        let s = liouvillian_spectrum(&p).unwrap();
        assert!(s.at_ep);
        let rep = ep_eigenmatrix();
        assert!(s.rights[0].max_abs_diff(&rep) < 1e-12);
        assert!(s.rights[3].max_abs_diff(&rep) < 1e-12);
        for l in &s.lambdas {
            assert!((l - c(-p.gamma(), 0.0)).norm() < 1e-6 * p.gamma());
        }
    }

    #[test]
    fn classify_phase_examples() {
        let pts = SystemParams::from_khz(32.0, 1.0).unwrap();
        let ptb = SystemParams::from_khz(32.0, 47.0).unwrap();
        let ep = SystemParams::from_khz(32.0, 32.0).unwrap();
        assert_eq!(classify_phase(&pts).tag, PhaseTag::Pts);
        assert_eq!(classify_phase(&ptb).tag, PhaseTag::Ptb);
        assert_eq!(classify_phase(&ep).tag, PhaseTag::Ep);
    }

    #[test]
    fn classify_phase_monotone_in_gamma() {
        let omega = TAU * 32e3;
        let mut seen_ep = false;
        let mut seen_ptb = false;
        for k in 0..=400 {
            let gamma = omega * 2.0 * k as f64 / 400.0;
            let p = SystemParams::new(omega, gamma).unwrap();
            match classify_phase(&p).tag {
                PhaseTag::Pts => {
                    assert!(!seen_ep && !seen_ptb, "PTS after EP/PTB at gamma={gamma}")
                }
                PhaseTag::Ep => {
                    assert!(!seen_ptb, "EP after PTB");
                    seen_ep = true;
                }
                PhaseTag::Ptb => seen_ptb = true,
            }
        }
        assert!(seen_ep && seen_ptb);
    }

    #[test]
    fn rk4_half_rabi_period_empties_ground_state() {
        // Unitary limit: after t = π/Ω the population has fully swapped.
        let p = SystemParams::from_khz(32.0, 0.0).unwrap();
        let l = build_liouvillian(&p);
        let rho0 = CMat::from_rows(
            2,
            &[Complex64::ONE, Complex64::ZERO, Complex64::ZERO, Complex64::ZERO],
        )
        .unwrap();
        let t = std::f64::consts::PI / p.omega();
        let y = rk4_propagate(|v| l.matvec(v), &vec_rho(&rho0), t, p.default_dt().unwrap()).unwrap();
        let rho = unvec_rho(&y);
        assert!(rho.get(0, 0).norm() < 1e-8);
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            #[test]
            fn h_eff_is_shifted_h_pt(okhz in 0.5f64..200.0, ratio in 0.0f64..4.0) {
                let p = SystemParams::from_khz(okhz, okhz * ratio).unwrap();
                let shift = CMat::identity(2).scale(IM * (p.gamma() / 2.0));
                let lhs = build_h_eff(&p);
                let rhs = &build_h_pt(&p) - &shift;
                prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * p.omega().max(p.gamma()));
            }

            #[test]
            fn liouvillian_matches_hamiltonian_pairs(okhz in 0.5f64..200.0, ratio in 0.0f64..4.0) {
                let p = SystemParams::from_khz(okhz, okhz * ratio).unwrap();
                let s = liouvillian_spectrum(&p).unwrap();
                let [e1, e2] = h_eff_eigenvalues(&p);
                let mut pairs: Vec<Complex64> = [(e1, e1), (e1, e2), (e2, e1), (e2, e2)]
                    .iter()
                    .map(|(a, b)| -IM * (a - b.conj()))
                    .collect();
                let mut lams = s.lambdas.to_vec();
                let key = |z: &Complex64| (z.re, z.im);
                pairs.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
                lams.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
                let scale = p.omega().max(p.gamma());
                for (a, b) in pairs.iter().zip(lams.iter()) {
                    prop_assert!((a - b).norm() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn spectrum_agrees_with_mat_exp() {
        // e^{Lt} from the spectral decomposition vs scaling-and-squaring.
        let p = SystemParams::from_khz(32.0, 12.0).unwrap();
        let l = build_liouvillian(&p);
        let s = liouvillian_spectrum(&p).unwrap();
        let t = 18e-6;
        let exact = mat_exp(&l, t).unwrap();
        let mut spec = CMat::zeros(4);
        for i in 0..4 {
            let w = (s.lambdas[i] * t).exp();
            let r = vec_rho(&s.rights[i]);
            let lf = vec_rho(&s.lefts[i]);
            for a in 0..4 {
                for b in 0..4 {
                    let cur = spec.get(a, b);
                    spec.set(a, b, cur + w * r.get(a) * lf.get(b).conj());
                }
            }
        }
        assert!(exact.max_abs_diff(&spec) < 1e-10);
    }
}
