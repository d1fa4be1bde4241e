//! State propagation by three independent routes, picture conversion,
//! renormalization and observables.
//!
//! The lossy two-level state ρ(t) and the gain-loss-balanced state
//! ρ^PT(t) = e^{γt}ρ(t) carry the same normalized dynamics; this module
//! always propagates in the lossy picture and converts on request. Three
//! propagators are provided and cross-checked against each other:
//!
//! * [`propagate_numeric`] — fixed-step RK4 on the master equation, either
//!   the two-level non-Hermitian form or the full three-level Lindblad form
//!   with the leaked population tracked in |2⟩;
//! * [`propagate_spectral`] — the Liouvillian eigenbasis sum
//!   ρ(t) = Σᵢ e^{λᵢt} Tr[Lᵢ†ρ(0)] Rᵢ, unavailable inside the EP band;
//! * [`closed_form_pt`] / [`closed_form_lossy`] — the explicit solution for
//!   the initial state |0⟩, written with sinh(z)/z and 2(cosh(z)−1)/z²
//!   kernels so the expressions stay finite through κ → 0 (the EP limits
//!   ρ^PT₀₀ = (1 + Ωt/2)², ρ^PT₁₁ = Ω²t²/4 are their series limits).

use num_complex::Complex64;

use crate::error::{PtError, Result};
use crate::model::{
    build_liouvillian, classify_phase, liouvillian_spectrum, unvec_rho, vec_rho, LiouvillianSpectrum,
    PhaseTag, SystemParams,
};
use crate::numerics::{coshm1c, mat_exp, rk4_propagate, sinhc, trace_norm_diff, CMat, CVec};

const IM: Complex64 = Complex64::new(0.0, 1.0);

fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Which scalar prefactor convention a state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    /// Dissipative state ρ(t); trace decays from 1.
    Lossy,
    /// Balanced-gain-loss state ρ^PT(t) = e^{γt}ρ(t); trace may exceed 1.
    Pt,
}

/// Two- or three-level density matrix with a picture tag.
///
/// [`DensityMatrix::new`] enforces Hermiticity (1e-12), positive
/// semidefiniteness (eigenvalues ≥ −1e-9 relative to the trace scale) and
/// the picture's trace bound. `new_unchecked` skips validation; the
/// fixed-point analysis uses it to propagate Liouvillian eigenmatrices,
/// which are Hermitian but need not be positive.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
    picture: Picture,
}

impl DensityMatrix {
    pub fn new(mat: CMat, picture: Picture) -> Result<Self> {
        let dim = mat.dim();
        if dim != 2 && dim != 3 {
            return Err(PtError::InvalidArgument(format!("density matrix dim must be 2 or 3, got {dim}")));
        }
        if !mat.is_finite() {
            return Err(PtError::InvalidArgument("non-finite density matrix entry".into()));
        }
        let scale = mat.max_abs().max(1.0);
        if !mat.is_hermitian(1e-12 * scale) {
            return Err(PtError::InvalidArgument("density matrix must be Hermitian".into()));
        }
        let tr = mat.trace().re;
        let psd_floor = -1e-9 * tr.abs().max(1.0);
        if mat.herm_eigenvalues().iter().any(|l| *l < psd_floor) {
            return Err(PtError::InvalidArgument("density matrix must be positive semidefinite".into()));
        }
        match picture {
            Picture::Lossy => {
                if !(-1e-9..=1.0 + 1e-9).contains(&tr) {
                    return Err(PtError::InvalidArgument(format!(
                        "lossy-picture trace must lie in [0, 1], got {tr}"
                    )));
                }
            }
            Picture::Pt => {
                if tr < -1e-9 {
                    return Err(PtError::InvalidArgument(format!("PT-picture trace must be >= 0, got {tr}")));
                }
            }
        }
        Ok(DensityMatrix { mat, picture })
    }

    pub fn new_unchecked(mat: CMat, picture: Picture) -> Self {
        DensityMatrix { mat, picture }
    }

    /// |0⟩⟨0| in the lossy picture.
    pub fn ket0() -> Self {
        let mut m = CMat::zeros(2);
        m.set(0, 0, Complex64::ONE);
        DensityMatrix { mat: m, picture: Picture::Lossy }
    }

    /// |1⟩⟨1| in the lossy picture.
    pub fn ket1() -> Self {
        let mut m = CMat::zeros(2);
        m.set(1, 1, Complex64::ONE);
        DensityMatrix { mat: m, picture: Picture::Lossy }
    }

    /// Pure qubit state from amplitudes (normalized here).
    pub fn from_pure(c0: Complex64, c1: Complex64) -> Result<Self> {
        let n2 = c0.norm_sqr() + c1.norm_sqr();
        if !n2.is_finite() || n2 <= 1e-300 {
            return Err(PtError::InvalidArgument("pure-state amplitudes must be normalizable".into()));
        }
        let a = c0 / n2.sqrt();
        let b = c1 / n2.sqrt();
        let m = CMat::from_rows(2, &[a * a.conj(), a * b.conj(), b * a.conj(), b * b.conj()])?;
        Ok(DensityMatrix { mat: m, picture: Picture::Lossy })
    }

    #[inline]
    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Embed a qubit state into the three-level space with ρ₂₂ = 0.
    pub fn embed_three_level(&self) -> Result<DensityMatrix> {
        if self.dim() != 2 {
            return Err(PtError::DimensionMismatch(self.dim(), 2));
        }
        let mut m = CMat::zeros(3);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, self.mat.get(i, j));
            }
        }
        Ok(DensityMatrix { mat: m, picture: self.picture })
    }

    /// The (|0⟩, |1⟩) block of a three-level state (identity on qubit states).
    pub fn qubit_block(&self) -> DensityMatrix {
        if self.dim() == 2 {
            return self.clone();
        }
        let mut m = CMat::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, self.mat.get(i, j));
            }
        }
        DensityMatrix { mat: m, picture: self.picture }
    }
}

/// Normalized expectation values and raw populations of a state.
///
/// For three-level states the σ expectations are taken on the qubit block
/// and normalized by the block trace, so a three-level run reports exactly
/// the same σ columns as the equivalent two-level run; `trace` is always the
/// full trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub sigma_z_norm: f64,
    pub sigma_y_norm: f64,
    pub rho00: f64,
    pub rho11: f64,
    pub trace: f64,
}

/// Compute normalized observables; errors on vanishing (block) trace.
pub fn observables(rho: &DensityMatrix) -> Result<Observables> {
    let m = rho.mat();
    let r00 = m.get(0, 0).re;
    let r11 = m.get(1, 1).re;
    let block = r00 + r11;
    if !block.is_finite() || block <= 1e-300 {
        return Err(PtError::DegenerateState("zero trace in observables".into()));
    }
    // Tr[σ_z ρ] = ρ₁₁ − ρ₀₀ and Tr[σ_y ρ] = 2 Im ρ₀₁ in the crate convention.
    Ok(Observables {
        sigma_z_norm: (r11 - r00) / block,
        sigma_y_norm: 2.0 * m.get(0, 1).im / block,
        rho00: r00,
        rho11: r11,
        trace: m.trace().re,
    })
}

/// Time-indexed states with derived observables.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    /// Assemble a trajectory from sampled states, recomputing observables.
    pub fn from_states(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Trajectory> {
        if times.len() != states.len() {
            return Err(PtError::DimensionMismatch(times.len(), states.len()));
        }
        let obs = states.iter().map(observables).collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { times, states, observables: obs })
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(PtError::InvalidArgument("empty time grid".into()));
    }
    if t_grid[0].abs() > 1e-18 {
        return Err(PtError::InvalidArgument("time grid must start at 0".into()));
    }
    if t_grid.windows(2).any(|w| !w[1].is_finite() || w[1] <= w[0]) {
        return Err(PtError::InvalidArgument("time grid must be strictly increasing".into()));
    }
    Ok(())
}

/// RK4 integration of the master equation sampled on `t_grid`.
///
/// `levels = 2` integrates the two-level non-Hermitian form via the 4×4
/// generator; `levels = 3` integrates the full Lindblad equation with jump
/// operator √(2γ)|2⟩⟨1| (populations decay at 2γ, coherences at γ), so the
/// total population is conserved and the (|0⟩, |1⟩) block reproduces the
/// two-level run. Two-level initial states are embedded with ρ₂₂ = 0.
pub fn propagate_numeric(
    p: &SystemParams,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    dt: f64,
    levels: usize,
) -> Result<Trajectory> {
    check_grid(t_grid)?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PtError::InvalidArgument(format!("dt must be > 0, got {dt}")));
    }
    if rho0.picture() != Picture::Lossy {
        return Err(PtError::InvalidArgument("propagate_numeric expects a lossy-picture state".into()));
    }
    match (levels, rho0.dim()) {
        (2, 2) => {
            let l = build_liouvillian(p);
            let deriv = |v: &CVec| l.matvec(v);
            let mut y = vec_rho(rho0.mat());
            let mut states = Vec::with_capacity(t_grid.len());
            let mut t_prev = 0.0;
            for &t in t_grid {
                if t > t_prev {
                    y = rk4_propagate(deriv, &y, t - t_prev, dt)?;
                    t_prev = t;
                }
                states.push(DensityMatrix::new_unchecked(unvec_rho(&y), Picture::Lossy));
            }
            Trajectory::from_states(t_grid.to_vec(), states)
        }
        (3, 2) | (3, 3) => {
            let rho3 = if rho0.dim() == 2 { rho0.embed_three_level()? } else { rho0.clone() };
            let h = three_level_hamiltonian(p);
            let g = p.gamma();
            let deriv = |v: &CVec| {
                let rho = unvec3(v);
                let hr = h.matmul(&rho);
                let rh = rho.matmul(&h);
                let mut out = (&hr - &rh).scale(-IM);
                // Dissipator of J = √(2γ)|2⟩⟨1|: JρJ† = 2γρ₁₁|2⟩⟨2| and
                // ½{J†J, ρ} acts as γ on row 1 and column 1.
                let two_g = cr(2.0 * g);
                let cur = out.get(2, 2);
                out.set(2, 2, cur + two_g * rho.get(1, 1));
                for k in 0..3 {
                    let c1 = out.get(1, k);
                    out.set(1, k, c1 - cr(g) * rho.get(1, k));
                    let c2 = out.get(k, 1);
                    out.set(k, 1, c2 - cr(g) * rho.get(k, 1));
                }
                // The k = 1 diagonal entry was hit twice: total −2γρ₁₁, as required.
                vec3(&out)
            };
            let mut y = vec3(rho3.mat());
            let mut states = Vec::with_capacity(t_grid.len());
            let mut t_prev = 0.0;
            for &t in t_grid {
                if t > t_prev {
                    y = rk4_propagate(deriv, &y, t - t_prev, dt)?;
                    t_prev = t;
                }
                states.push(DensityMatrix::new_unchecked(unvec3(&y), Picture::Lossy));
            }
            Trajectory::from_states(t_grid.to_vec(), states)
        }
        (2, 3) => Err(PtError::InvalidArgument("cannot run a 3-level state through a 2-level propagation".into())),
        _ => Err(PtError::InvalidArgument(format!("levels must be 2 or 3, got {levels}"))),
    }
}

fn three_level_hamiltonian(p: &SystemParams) -> CMat {
    let mut h = CMat::zeros(3);
    let half = cr(p.omega() / 2.0);
    h.set(0, 1, half);
    h.set(1, 0, half);
    h
}

fn vec3(m: &CMat) -> CVec {
    CVec::new(m.entries().to_vec())
}

fn unvec3(v: &CVec) -> CMat {
    CMat::from_rows(3, v.entries()).expect("3-level state became non-finite")
}

/// Spectral propagation ρ(t) = Σᵢ e^{λᵢt} cᵢ Rᵢ with cᵢ = Tr[Lᵢ†ρ(0)].
///
/// The eigenvalues already carry the −γ shift, so the result is in the
/// lossy picture; dropping the overall e^{−γt} factor is what
/// [`to_pt_picture`] does. Refuses EP-band spectra, where R₁ and R₄
/// coalesce and the decomposition does not exist — use
/// [`propagate_mat_exp`] there.
pub fn propagate_spectral(
    spec: &LiouvillianSpectrum,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    if spec.at_ep {
        return Err(PtError::EpDegenerate(
            "spectral propagation is undefined at the exceptional point; use the matrix-exponential path".into(),
        ));
    }
    if rho0.dim() != 2 {
        return Err(PtError::DimensionMismatch(rho0.dim(), 2));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(PtError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let mut out = CMat::zeros(2);
    for i in 0..4 {
        let c = spec.lefts[i].hs_inner(rho0.mat());
        let w = (spec.lambdas[i] * t).exp();
        out = &out + &spec.rights[i].scale(c * w);
    }
    Ok(DensityMatrix::new_unchecked(out, rho0.picture()))
}

/// Jordan-safe propagation through the matrix exponential of the 4×4
/// generator; valid in every phase including the EP band.
pub fn propagate_mat_exp(p: &SystemParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != 2 {
        return Err(PtError::DimensionMismatch(rho0.dim(), 2));
    }
    let u = mat_exp(&build_liouvillian(p), t)?;
    let y = u.matvec(&vec_rho(rho0.mat()));
    Ok(DensityMatrix::new_unchecked(unvec_rho(&y), rho0.picture()))
}

/// Closed-form ρ^PT(t) for the initial state |0⟩, any phase.
///
/// Entries (internal order), with f(z) = sinh(z)/z and g(z) = 2(cosh z − 1)/z²:
///
/// ```text
///   ρ^PT₀₀ = 1 + γt·f(κt) + (2γ² − Ω²)(t²/4)·g(κt)
///   ρ^PT₁₁ = (Ω²t²/4)·f(κt/2)²
///   ρ^PT₀₁ = i(Ωt/2)·[f(κt) + (γt/2)·g(κt)]
/// ```
///
/// Both kernels are analytic through κ → 0, so the EP band needs no special
/// casing; at κ = 0 exactly they reduce to ρ^PT₀₀ = (1 + Ωt/2)² and
/// ρ^PT₁₁ = Ω²t²/4.
pub fn closed_form_pt(p: &SystemParams, t: f64) -> Result<DensityMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(PtError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let k = p.kappa();
    if k.re * t > 700.0 {
        return Err(PtError::Overflow("PT-picture entries exceed the f64 range".into()));
    }
    let g = p.gamma();
    let om = p.omega();
    let x = k * t;
    let f = sinhc(x);
    let gg = coshm1c(x);
    // The kernels are real for real or purely imaginary κt; take real parts
    // to keep the matrix exactly Hermitian.
    let r00 = 1.0 + g * t * f.re + (2.0 * g * g - om * om) * t * t / 4.0 * gg.re;
    let fh = sinhc(k * (t / 2.0)).re;
    let r11 = om * om * t * t / 4.0 * fh * fh;
    let s = om * t / 2.0 * (f.re + g * t / 2.0 * gg.re);
    let mut m = CMat::zeros(2);
    m.set(0, 0, cr(r00));
    m.set(1, 1, cr(r11));
    m.set(0, 1, IM * s);
    m.set(1, 0, -IM * s);
    if !m.is_finite() {
        return Err(PtError::Overflow("PT-picture entries exceed the f64 range".into()));
    }
    Ok(DensityMatrix::new_unchecked(m, Picture::Pt))
}

/// Closed-form lossy ρ(t) = e^{−γt} ρ^PT(t) for the initial state |0⟩.
///
/// Deep in the broken phase the e^{−γt} factor is folded into the
/// hyperbolics analytically (all exponent arguments become non-positive),
/// so this stays finite at arbitrarily large t where the PT picture would
/// overflow.
pub fn closed_form_lossy(p: &SystemParams, t: f64) -> Result<DensityMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(PtError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    let g = p.gamma();
    let om = p.omega();
    let ksq = p.kappa_sq();
    let k = p.kappa();
    if ksq > 0.0 && k.re * t > 30.0 {
        // e^{−γt}cosh(κt) = (e⁺ + e⁻)/2, e^{−γt}sinh(κt) = (e⁺ − e⁻)/2
        // with e⁺ = e^{(κ−γ)t}, e⁻ = e^{−(κ+γ)t}; κ < γ so both decay.
        let kr = k.re;
        let epos = ((kr - g) * t).exp();
        let eneg = (-(kr + g) * t).exp();
        let e0 = (-g * t).exp();
        let a = 0.5 * (epos + eneg);
        let b = 0.5 * (epos - eneg);
        let r00 = (-om * om * e0 + (2.0 * g * g - om * om) * a + 2.0 * g * kr * b) / (2.0 * ksq);
        let r11 = om * om * (a - e0) / (2.0 * ksq);
        let s = om * (g * (a - e0) + kr * b) / (2.0 * ksq);
        let mut m = CMat::zeros(2);
        m.set(0, 0, cr(r00));
        m.set(1, 1, cr(r11));
        m.set(0, 1, IM * s);
        m.set(1, 0, -IM * s);
        return Ok(DensityMatrix::new_unchecked(m, Picture::Lossy));
    }
    let pt = closed_form_pt(p, t)?;
    let scale = cr((-g * t).exp());
    Ok(DensityMatrix::new_unchecked(pt.mat().scale(scale), Picture::Lossy))
}

/// Fast scalar path for the lossy ground-state population from |0⟩; the
/// fitting and sweep code hammer this.
pub fn rho00_lossy(p: &SystemParams, t: f64) -> f64 {
    let g = p.gamma();
    let om = p.omega();
    let ksq = p.kappa_sq();
    let k = p.kappa();
    if ksq > 0.0 && k.re * t > 30.0 {
        let kr = k.re;
        let epos = ((kr - g) * t).exp();
        let eneg = (-(kr + g) * t).exp();
        let e0 = (-g * t).exp();
        let a = 0.5 * (epos + eneg);
        let b = 0.5 * (epos - eneg);
        return (-om * om * e0 + (2.0 * g * g - om * om) * a + 2.0 * g * kr * b) / (2.0 * ksq);
    }
    let x = k * t;
    let pt00 = 1.0 + g * t * sinhc(x).re + (2.0 * g * g - om * om) * t * t / 4.0 * coshm1c(x).re;
    (-g * t).exp() * pt00
}

/// ρ^PT(t) = e^{γt} ρ(t): entrywise rescale with an overflow guard at
/// γt > 700 (where e^{γt} leaves the f64 range). The picture relation holds
/// for the two-level state only; three-level states are rejected.
pub fn to_pt_picture(rho: &DensityMatrix, gamma: f64, t: f64) -> Result<DensityMatrix> {
    if rho.picture() != Picture::Lossy {
        return Err(PtError::InvalidArgument("to_pt_picture expects a lossy-picture state".into()));
    }
    if rho.dim() != 2 {
        return Err(PtError::DimensionMismatch(rho.dim(), 2));
    }
    if gamma * t > 700.0 {
        return Err(PtError::Overflow(format!("gamma*t = {} would overflow the PT trace", gamma * t)));
    }
    let scale = cr((gamma * t).exp());
    Ok(DensityMatrix::new_unchecked(rho.mat().scale(scale), Picture::Pt))
}

/// Inverse of [`to_pt_picture`].
pub fn to_lossy_picture(rho: &DensityMatrix, gamma: f64, t: f64) -> Result<DensityMatrix> {
    if rho.picture() != Picture::Pt {
        return Err(PtError::InvalidArgument("to_lossy_picture expects a PT-picture state".into()));
    }
    if rho.dim() != 2 {
        return Err(PtError::DimensionMismatch(rho.dim(), 2));
    }
    if gamma * t > 700.0 {
        return Err(PtError::Overflow(format!("gamma*t = {} would underflow every entry", gamma * t)));
    }
    let scale = cr((-gamma * t).exp());
    Ok(DensityMatrix::new_unchecked(rho.mat().scale(scale), Picture::Lossy))
}

/// Divide by the trace. Lossy and PT inputs at the same (params, t) give
/// identical outputs, since the pictures differ by a scalar.
pub fn normalize(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let tr = rho.trace();
    if !tr.is_finite() || tr <= 1e-300 {
        return Err(PtError::DegenerateState(format!("cannot normalize trace {tr}")));
    }
    Ok(DensityMatrix::new_unchecked(rho.mat().scale(cr(1.0 / tr)), rho.picture()))
}

/// Per-time trace distance between the normalized trajectory and the
/// normalized dominant eigenmatrix R₁. Only meaningful in the broken phase,
/// where R₁ is the steady state; other phases are rejected.
pub fn trace_distance_to_steady(p: &SystemParams, traj: &Trajectory) -> Result<Vec<f64>> {
    if classify_phase(p).tag != PhaseTag::Ptb {
        return Err(PtError::PhaseError("steady-state distance requires the PT-broken phase".into()));
    }
    let spec = liouvillian_spectrum(p)?;
    let r1 = normalize(&DensityMatrix::new_unchecked(spec.rights[0].clone(), Picture::Lossy))?;
    let mut out = Vec::with_capacity(traj.states.len());
    for state in &traj.states {
        if state.dim() != 2 {
            return Err(PtError::DimensionMismatch(state.dim(), 2));
        }
        let n = normalize(state)?;
        out.push(trace_norm_diff(n.mat(), r1.mat())?);
    }
    Ok(out)
}
