//! Symplectic and optical tomograms.
//!
//! The symplectic tomogram `w(X, μ, ν)` is the distribution of the
//! quadrature `X = μq + νp`; the optical tomogram `w₀(X, θ)` is its section
//! at `(μ, ν) = (cos θ, sin θ)`. Both are homogeneous:
//! `w(λX, λμ, λν) = w(X, μ, ν) / |λ|`.

mod grid;
mod table;

pub use grid::{radon_forward, radon_forward_with_step, WignerGrid};
pub use table::TomogramTable;

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_state::{GaussianState, PhaseSpacePoint};
use crate::quadrature::{integrate_interval, integrate_polar_many, QuadratureSpec, TAIL_EPSILON};

/// Half-width of a Gaussian support in standard deviations.
const GAUSSIAN_SUPPORT_SIGMAS: f64 = 10.0;

/// Limit on the imaginary part of a reconstructed Wigner value.
pub const WIGNER_IMAG_LIMIT: f64 = 1e-6;

/// Coefficients `(μ, ν)` of the quadrature `X = μq + νp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymplecticFrame {
    pub mu: f64,
    pub nu: f64,
}

impl SymplecticFrame {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && nu.is_finite()) || (mu == 0.0 && nu == 0.0) {
            return Err(Error::DegenerateFrame { mu, nu });
        }
        Ok(Self { mu, nu })
    }

    /// The optical frame `(cos θ, sin θ)`.
    pub fn optical(theta: f64) -> Self {
        Self {
            mu: theta.cos(),
            nu: theta.sin(),
        }
    }

    /// `(r, θ)` with `μ = r cos θ`, `ν = r sin θ`.
    pub fn polar(&self) -> (f64, f64) {
        (self.mu.hypot(self.nu), self.nu.atan2(self.mu))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.mu * self.mu + self.nu * self.nu
    }
}

/// An optical tomogram `w₀(X, θ)`, usable from several threads.
pub trait OpticalTomogram: Sync {
    fn density(&self, x: f64, theta: f64) -> f64;

    /// Interval outside which the density is negligible.
    fn support(&self, theta: f64) -> (f64, f64);

    /// `F(k, θ) = ∫ e^{ikX} w₀(X, θ) dX` when known without quadrature.
    fn closed_form_characteristic(&self, _k: f64, _theta: f64) -> Option<Complex64> {
        None
    }

    /// Number of equispaced angles in `[0, 2π)` to which the tomogram is
    /// restricted, if any. Angular integrals then use exactly these nodes.
    fn angle_grid(&self) -> Option<usize> {
        None
    }
}

/// A symplectic tomogram `w(X, μ, ν)`.
pub trait SymplecticTomogram: Sync {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64;

    fn support(&self, frame: SymplecticFrame) -> (f64, f64);

    /// `∫ e^{iX} w(X, r cos θ, r sin θ) dX`, which by homogeneity equals the
    /// optical characteristic function at `k = r`.
    fn closed_form_characteristic(&self, _r: f64, _theta: f64) -> Option<Complex64> {
        None
    }
}

/// Gaussian density with the given mean and variance.
fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let dx = x - mean;
    (-dx * dx / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// Symplectic tomogram of a Gaussian state: a normal density in `x` with
/// mean `μ⟨q⟩ + ν⟨p⟩` and variance `μ²σ_qq + ν²σ_pp + 2μνσ_pq`.
pub fn symplectic_gaussian(state: &GaussianState, frame: SymplecticFrame, x: f64) -> Result<f64> {
    let var = state.quadrature_variance(frame.mu, frame.nu);
    if !(var > 0.0) {
        return Err(Error::DegenerateFrame {
            mu: frame.mu,
            nu: frame.nu,
        });
    }
    Ok(normal_pdf(x, state.quadrature_mean(frame.mu, frame.nu), var))
}

/// Optical tomogram of a Gaussian state,
/// `w₀(X, θ) = exp[−(X − ⟨X⟩_θ)² / (2σ_θ²)] / √(2πσ_θ²)`.
pub fn optical_gaussian(state: &GaussianState, theta: f64, x: f64) -> f64 {
    let (c, s) = (theta.cos(), theta.sin());
    normal_pdf(x, state.quadrature_mean(c, s), state.quadrature_variance(c, s))
}

/// Normalized Hermite functions `ψ_0 … ψ_m` at `y`, by the stable three-term
/// recurrence. `ψ_m(y)² = e^{−y²} H_m(y)² / (√π 2^m m!)`.
fn hermite_functions(m: usize, y: f64) -> Vec<f64> {
    let mut psi = Vec::with_capacity(m + 1);
    psi.push(PI.powf(-0.25) * (-y * y / 2.0).exp());
    if m >= 1 {
        psi.push(SQRT_2 * y * psi[0]);
    }
    for j in 1..m {
        let next = (2.0 / (j + 1) as f64).sqrt() * y * psi[j] - (j as f64 / (j + 1) as f64).sqrt() * psi[j - 1];
        psi.push(next);
    }
    psi
}

/// Symplectic tomogram of the Fock state `|m⟩`,
/// `w_m = e^{−X²/s} H_m²(X/√s) / (√(πs) 2^m m!)` with `s = μ² + ν²`.
pub fn fock_symplectic(m: usize, frame: SymplecticFrame, x: f64) -> f64 {
    let s = frame.norm_sqr();
    let psi = hermite_functions(m, x / s.sqrt());
    psi[m] * psi[m] / s.sqrt()
}

/// `F_m(k) = e^{−k²/4} L_m(k²/2)`, the characteristic function of every
/// optical section of the Fock state `|m⟩`.
pub fn fock_characteristic(m: usize, k: f64) -> f64 {
    let u = k * k / 2.0;
    (-u / 2.0).exp() * crate::polynomials::laguerre_sequence(m, 0.0, u)[m]
}

/// Closed-form tomogram of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTomogram {
    state: GaussianState,
}

impl GaussianTomogram {
    pub fn new(state: GaussianState) -> Self {
        Self { state }
    }

    pub fn state(&self) -> &GaussianState {
        &self.state
    }

    fn moments(&self, mu: f64, nu: f64) -> (f64, f64) {
        (self.state.quadrature_mean(mu, nu), self.state.quadrature_variance(mu, nu))
    }

    fn characteristic(&self, k: f64, theta: f64) -> Complex64 {
        let (mean, var) = self.moments(theta.cos(), theta.sin());
        Complex64::from_polar((-k * k * var / 2.0).exp(), k * mean)
    }
}

impl OpticalTomogram for GaussianTomogram {
    fn density(&self, x: f64, theta: f64) -> f64 {
        optical_gaussian(&self.state, theta, x)
    }

    fn support(&self, theta: f64) -> (f64, f64) {
        let (mean, var) = self.moments(theta.cos(), theta.sin());
        let half = GAUSSIAN_SUPPORT_SIGMAS * var.sqrt();
        (mean - half, mean + half)
    }

    fn closed_form_characteristic(&self, k: f64, theta: f64) -> Option<Complex64> {
        Some(self.characteristic(k, theta))
    }
}

impl SymplecticTomogram for GaussianTomogram {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64 {
        let (mean, var) = self.moments(frame.mu, frame.nu);
        normal_pdf(x, mean, var)
    }

    fn support(&self, frame: SymplecticFrame) -> (f64, f64) {
        let (mean, var) = self.moments(frame.mu, frame.nu);
        let half = GAUSSIAN_SUPPORT_SIGMAS * var.sqrt();
        (mean - half, mean + half)
    }

    fn closed_form_characteristic(&self, r: f64, theta: f64) -> Option<Complex64> {
        Some(self.characteristic(r, theta))
    }
}

/// Tomogram of the Fock state `|m⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTomogram {
    pub m: usize,
}

impl FockTomogram {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    /// Half-width of the support on the unit frame.
    fn unit_half_width(&self) -> f64 {
        (2.0 * self.m as f64 + 1.0).sqrt() + 8.0
    }
}

impl OpticalTomogram for FockTomogram {
    fn density(&self, x: f64, _theta: f64) -> f64 {
        fock_symplectic(self.m, SymplecticFrame { mu: 1.0, nu: 0.0 }, x)
    }

    fn support(&self, _theta: f64) -> (f64, f64) {
        let h = self.unit_half_width();
        (-h, h)
    }

    fn closed_form_characteristic(&self, k: f64, _theta: f64) -> Option<Complex64> {
        Some(Complex64::new(fock_characteristic(self.m, k), 0.0))
    }
}

impl SymplecticTomogram for FockTomogram {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64 {
        fock_symplectic(self.m, frame, x)
    }

    fn support(&self, frame: SymplecticFrame) -> (f64, f64) {
        let h = self.unit_half_width() * frame.norm_sqr().sqrt();
        (-h, h)
    }

    fn closed_form_characteristic(&self, r: f64, _theta: f64) -> Option<Complex64> {
        Some(Complex64::new(fock_characteristic(self.m, r), 0.0))
    }
}

/// An optical tomogram given by a closure on a fixed `X` interval.
pub struct OpticalFn<F> {
    f: F,
    range: (f64, f64),
}

impl<F: Fn(f64, f64) -> f64 + Sync> OpticalFn<F> {
    pub fn new(f: F, range: (f64, f64)) -> Result<Self> {
        check_range(range)?;
        Ok(Self { f, range })
    }
}

impl<F: Fn(f64, f64) -> f64 + Sync> OpticalTomogram for OpticalFn<F> {
    fn density(&self, x: f64, theta: f64) -> f64 {
        (self.f)(x, theta)
    }

    fn support(&self, _theta: f64) -> (f64, f64) {
        self.range
    }
}

/// A symplectic tomogram given by a closure; `range` is the support on
/// unit-norm frames and is scaled with `|(μ, ν)|`.
pub struct SymplecticFn<F> {
    f: F,
    range: (f64, f64),
}

impl<F: Fn(f64, f64, f64) -> f64 + Sync> SymplecticFn<F> {
    pub fn new(f: F, range: (f64, f64)) -> Result<Self> {
        check_range(range)?;
        Ok(Self { f, range })
    }
}

impl<F: Fn(f64, f64, f64) -> f64 + Sync> SymplecticTomogram for SymplecticFn<F> {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64 {
        (self.f)(x, frame.mu, frame.nu)
    }

    fn support(&self, frame: SymplecticFrame) -> (f64, f64) {
        let r = frame.norm_sqr().sqrt();
        (self.range.0 * r, self.range.1 * r)
    }
}

/// Views an optical tomogram as symplectic through homogeneity,
/// `w(X, μ, ν) = w₀(X/r, θ) / r`.
pub struct FromOptical<'a, T: ?Sized>(pub &'a T);

impl<T: OpticalTomogram + ?Sized> SymplecticTomogram for FromOptical<'_, T> {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64 {
        let (r, theta) = frame.polar();
        self.0.density(x / r, theta) / r
    }

    fn support(&self, frame: SymplecticFrame) -> (f64, f64) {
        let (r, theta) = frame.polar();
        let (lo, hi) = self.0.support(theta);
        (lo * r, hi * r)
    }

    fn closed_form_characteristic(&self, r: f64, theta: f64) -> Option<Complex64> {
        self.0.closed_form_characteristic(r, theta)
    }
}

/// Hides any closed-form characteristic so that the quadrature path is used.
pub struct NumericOnly<'a, T: ?Sized>(pub &'a T);

impl<T: OpticalTomogram + ?Sized> OpticalTomogram for NumericOnly<'_, T> {
    fn density(&self, x: f64, theta: f64) -> f64 {
        self.0.density(x, theta)
    }

    fn support(&self, theta: f64) -> (f64, f64) {
        self.0.support(theta)
    }

    fn angle_grid(&self) -> Option<usize> {
        self.0.angle_grid()
    }
}

impl<T: SymplecticTomogram + ?Sized> SymplecticTomogram for NumericOnly<'_, T> {
    fn density(&self, x: f64, frame: SymplecticFrame) -> f64 {
        self.0.density(x, frame)
    }

    fn support(&self, frame: SymplecticFrame) -> (f64, f64) {
        self.0.support(frame)
    }
}

fn check_range(range: (f64, f64)) -> Result<()> {
    if range.0.is_finite() && range.1.is_finite() && range.1 > range.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("invalid support [{}, {}]", range.0, range.1)))
    }
}

/// `∫ e^{iX} w(X, r cos θ, r sin θ) dX`, from the closed form when available.
pub fn symplectic_characteristic<T>(tomo: &T, r: f64, theta: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    T: SymplecticTomogram + ?Sized,
{
    if let Some(f) = tomo.closed_form_characteristic(r, theta) {
        return Ok(f);
    }
    if r == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // X = rY turns this into ∫ e^{irY} w₀(Y, θ) dY on the unit frame.
    let unit = SymplecticFrame::optical(theta);
    let frame = SymplecticFrame {
        mu: r * unit.mu,
        nu: r * unit.nu,
    };
    let (lo, hi) = tomo.support(unit);
    let res = integrate_interval(
        |y| Complex64::from_polar(r * tomo.density(r * y, frame), r * y),
        lo,
        hi,
        spec,
    )?;
    Ok(res.value)
}

/// Smallest variance over `n` equispaced optical sections, by quadrature.
fn min_section_variance<T>(tomo: &T, n: usize, spec: &QuadratureSpec) -> Result<f64>
where
    T: SymplecticTomogram + ?Sized,
{
    let mut min_var = f64::INFINITY;
    for j in 0..n {
        let frame = SymplecticFrame::optical(PI * j as f64 / n as f64);
        let (lo, hi) = tomo.support(frame);
        let m = integrate_interval(
            |x| {
                let w = tomo.density(x, frame);
                Complex64::new(w, w * x)
            },
            lo,
            hi,
            spec,
        )?
        .value;
        let mean = m.im / m.re;
        let var = integrate_interval(
            |x| Complex64::new(tomo.density(x, frame) * (x - mean) * (x - mean), 0.0),
            lo,
            hi,
            spec,
        )?
        .value
        .re
            / m.re;
        min_var = min_var.min(var);
    }
    Ok(min_var)
}

/// Radial cutoff for the Wigner inversion: starts from the Gaussian decay of
/// the narrowest section and grows until `|F|` is below the tail fraction
/// on a ring of angles.
fn inversion_cutoff<T>(tomo: &T, spec: &QuadratureSpec) -> Result<f64>
where
    T: SymplecticTomogram + ?Sized,
{
    let eps = spec.tail_epsilon().max(TAIL_EPSILON);
    let var = min_section_variance(tomo, 16, spec)?.max(1e-6);
    let mut k = (2.0 * (1.0 / eps).ln() / var).sqrt();
    for _ in 0..40 {
        let mut worst: f64 = 0.0;
        for j in 0..32 {
            let theta = 2.0 * PI * j as f64 / 32.0;
            worst = worst.max(symplectic_characteristic(tomo, k, theta, spec)?.norm());
        }
        if worst < eps {
            return Ok(k);
        }
        k *= 1.25;
    }
    Err(Error::QuadratureFailure {
        what: "characteristic function does not decay".into(),
        estimate: k,
    })
}

/// Reconstructs `W(q, p)` from a symplectic tomogram,
///
/// ```text
/// W(q, p) = (1/2π) ∫₀^∞ r dr ∫₀^{2π} dθ F(r, θ) e^{−ir(q cos θ + p sin θ)},
/// ```
///
/// the polar form of `(1/2π) ∫ w(X, μ, ν) e^{−i(μq + νp − X)} dμ dν dX`.
pub fn wigner_from_tomogram<T>(tomo: &T, pts: &[PhaseSpacePoint], spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    T: SymplecticTomogram + ?Sized,
{
    if pts.is_empty() {
        return Ok(Vec::new());
    }
    let k_max = inversion_cutoff(tomo, spec)?;
    // Quadrature failures inside the integrand are recorded and surfaced
    // after the sweep, since the callback cannot return an error.
    let failure = std::sync::Mutex::new(None);
    let res = integrate_polar_many(
        |r, theta, out| {
            let f = match symplectic_characteristic(tomo, r, theta, spec) {
                Ok(f) => f,
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            };
            let (s, c) = theta.sin_cos();
            for (o, pt) in out.iter_mut().zip(pts) {
                *o = r * f * Complex64::from_polar(1.0, -r * (pt.q * c + pt.p * s));
            }
        },
        pts.len(),
        k_max,
        spec,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    res.value
        .into_iter()
        .map(|v| {
            let w = v / (2.0 * PI);
            if w.im.abs() > WIGNER_IMAG_LIMIT {
                Err(Error::ImaginaryResidual {
                    residual: w.im.abs(),
                    limit: WIGNER_IMAG_LIMIT,
                })
            } else {
                Ok(w.re)
            }
        })
        .collect()
}
