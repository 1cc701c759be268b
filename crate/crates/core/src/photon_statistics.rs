//! Photon-number distributions and photon-number tomograms.
//!
//! For a Gaussian state the distribution is `P_n = P₀ H_nn(y₁, y₂) / n!`.
//! The printed arguments `y` have the denominator `2T − 4d − 1`, which is
//! zero for every coherent state, so the generating function is instead
//! parameterized by the products `a₁ = R₁₁y₁ + R₁₂y₂` (and `a₂ = a₁*`), which
//! reduce to
//!
//! ```text
//! a₁ = 2[(T + 1) z + (σ_pp − σ_qq − 2iσ_pq) z*] / (1 + 2T + 4d)
//! ```
//!
//! and are regular everywhere.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian_state::GaussianState;
use crate::polynomials::{hermite2d_diag_scaled_real, laguerre_envelope_cutoff, laguerre_sequence, HermiteParams};
use crate::quadrature::{integrate_2d_many, QuadratureSpec};

/// Slack below zero tolerated on a computed probability before clamping.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// Default target for the neglected tail in adaptive truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Hard cap on adaptive truncation.
pub const MAX_ADAPTIVE_N: usize = 512;

/// Largest photon number accepted by [`fock_oracle`].
pub const ORACLE_MAX_N: usize = 60;

/// Complex displacement amplitude α of `D(α) = exp(α a† − α* a)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DisplacementAmplitude {
    pub re: f64,
    pub im: f64,
}

impl DisplacementAmplitude {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Self {
        let c = Complex64::from_polar(modulus, phase);
        Self { re: c.re, im: c.im }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl From<Complex64> for DisplacementAmplitude {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Probabilities `P_0 … P_{n_max}` with the mass missing from the truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonDistribution {
    n_max: usize,
    probs: Vec<f64>,
    tail_mass: f64,
}

impl PhotonDistribution {
    /// Checks that no entry is below `-NEGATIVE_SLACK` and that the total
    /// does not exceed one, then clamps roundoff negatives to zero.
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        Self::from_probabilities_with_slack(probs, NEGATIVE_SLACK)
    }

    /// As [`from_probabilities`](Self::from_probabilities) with a caller
    /// chosen slack, for values carrying quadrature error.
    pub fn from_probabilities_with_slack(mut probs: Vec<f64>, slack: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter("a photon distribution needs at least one entry".into()));
        }
        for (n, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() || *p < -slack || *p > 1.0 + slack {
                return Err(Error::InvalidParameter(format!("P_{n} = {p} is not a probability")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + slack.max(1e-10) {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total} > 1")));
        }
        Ok(Self::from_estimate(probs))
    }

    /// Keeps the values as given, without range checks or clamping. Used for
    /// statistical estimates whose noise may push entries below zero.
    pub fn from_estimate(probs: Vec<f64>) -> Self {
        let total: f64 = probs.iter().sum();
        Self {
            n_max: probs.len().saturating_sub(1),
            tail_mass: 1.0 - total,
            probs,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.probs.get(n).copied()
    }

    /// `1 − Σ P_n`
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn total(&self) -> f64 {
        1.0 - self.tail_mass
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn truncated(&self, n_max: usize) -> Self {
        Self::from_estimate(self.probs[..=n_max.min(self.n_max)].to_vec())
    }

    /// CSV with header `n,prob`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "prob"]).map_err(csv_err)?;
        for (n, p) in self.probs.iter().enumerate() {
            w.write_record([n.to_string(), format!("{p:e}")]).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// `R₁₁ = 2(σ_pp − σ_qq − 2iσ_pq)/L`, `R₁₂ = (1 − 4d)/L`, and `a₁` in the
/// regular form, with `L = 1 + 2T + 4d` and `z` the state's complex mean.
fn hermite_params_for_mean(state: &GaussianState, z: Complex64) -> Result<HermiteParams> {
    let c = state.cov();
    let inv = state.invariants();
    let l = 1.0 + 2.0 * inv.trace + 4.0 * inv.d;
    let asym = Complex64::new(c.sigma_pp - c.sigma_qq, -2.0 * c.sigma_pq);
    let r11 = 2.0 * asym / l;
    let r12 = (1.0 - 4.0 * inv.d) / l;
    let a1 = 2.0 * ((inv.trace + 1.0) * z + asym * z.conj()) / l;
    HermiteParams::hermitian(r11, r12, a1)
}

/// Generating-function parameters of the photon distribution of `state`.
pub fn hermite_params(state: &GaussianState) -> Result<HermiteParams> {
    hermite_params_for_mean(state, state.z())
}

/// `P₀ = (d + T/2 + 1/4)^{−1/2} exp{−[⟨p⟩²(2σ_qq+1) + ⟨q⟩²(2σ_pp+1) − 4σ_pq⟨p⟩⟨q⟩]/(1 + 2T + 4d)}`.
pub fn zero_photon_probability(state: &GaussianState) -> f64 {
    let c = state.cov();
    let inv = state.invariants();
    let (q, p) = (state.mean_q(), state.mean_p());
    let l = 1.0 + 2.0 * inv.trace + 4.0 * inv.d;
    let exponent = -(p * p * (2.0 * c.sigma_qq + 1.0) + q * q * (2.0 * c.sigma_pp + 1.0) - 4.0 * c.sigma_pq * p * q) / l;
    (inv.d + 0.5 * inv.trace + 0.25).powf(-0.5) * exponent.exp()
}

/// `P₀(α)` of the displaced state, `(2/√L) exp{…}` with `L = 1 + 2T + 4d`.
pub fn zero_photon_probability_displaced(state: &GaussianState, alpha: DisplacementAmplitude) -> f64 {
    let c = state.cov();
    let inv = state.invariants();
    let l = 1.0 + 2.0 * inv.trace + 4.0 * inv.d;
    let p = state.mean_p() + SQRT_2 * alpha.im;
    let q = state.mean_q() + SQRT_2 * alpha.re;
    let quadratic = -((2.0 * c.sigma_qq + 1.0) * p * p + (2.0 * c.sigma_pp + 1.0) * q * q) / l;
    let cross = 4.0 * c.sigma_pq * p * q / l;
    2.0 / l.sqrt() * quadratic.exp() * cross.exp()
}

fn distribution_from_hermite(p0: f64, params: &HermiteParams, n_max: usize) -> Result<PhotonDistribution> {
    let diag = hermite2d_diag_scaled_real(params, n_max)?;
    PhotonDistribution::from_probabilities(diag.into_iter().map(|h| p0 * h).collect())
}

/// `P_n` for `n = 0..=n_max` through the diagonal two-variable Hermite
/// polynomials.
pub fn photon_distribution(state: &GaussianState, n_max: usize) -> Result<PhotonDistribution> {
    distribution_from_hermite(zero_photon_probability(state), &hermite_params(state)?, n_max)
}

/// Photon distribution truncated where the neglected tail drops below
/// `tail_tol`, with at most [`MAX_ADAPTIVE_N`] terms.
///
/// Each round extrapolates the tail geometrically from the last ten terms
/// to choose the next truncation.
pub fn photon_distribution_adaptive(state: &GaussianState, tail_tol: f64) -> Result<PhotonDistribution> {
    adaptive(|n| photon_distribution(state, n), tail_tol)
}

fn adaptive<F>(compute: F, tail_tol: f64) -> Result<PhotonDistribution>
where
    F: Fn(usize) -> Result<PhotonDistribution>,
{
    if !(tail_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tail tolerance must be positive, got {tail_tol}")));
    }
    let mut n_max = 31;
    loop {
        let dist = compute(n_max)?;
        if dist.tail_mass() < tail_tol || n_max >= MAX_ADAPTIVE_N {
            return Ok(trim(dist, tail_tol));
        }
        let next = match geometric_tail(dist.probs()) {
            Some((last, ratio)) if ratio < 1.0 && last > 0.0 => {
                let extra = ((tail_tol * (1.0 - ratio)) / last).ln() / ratio.ln();
                n_max + (extra.ceil().max(10.0) as usize)
            }
            _ => 2 * n_max + 1,
        };
        n_max = next.clamp(n_max + 1, MAX_ADAPTIVE_N);
    }
}

/// Last positive entry and the mean decay ratio over the last ten entries.
fn geometric_tail(probs: &[f64]) -> Option<(f64, f64)> {
    let window = &probs[probs.len().saturating_sub(10)..];
    let positive: Vec<(usize, f64)> = window.iter().copied().enumerate().filter(|(_, p)| *p > 0.0).collect();
    let (&(i0, p0), &(i1, p1)) = (positive.first()?, positive.last()?);
    if i1 == i0 {
        return None;
    }
    Some((p1, (p1 / p0).powf(1.0 / (i1 - i0) as f64)))
}

/// Drops trailing entries that are not needed to keep the tail below `tol`.
fn trim(dist: PhotonDistribution, tol: f64) -> PhotonDistribution {
    let probs = dist.probs();
    let mut cumulative = 0.0;
    for (n, p) in probs.iter().enumerate() {
        cumulative += p;
        if 1.0 - cumulative < tol {
            return dist.truncated(n);
        }
    }
    dist
}

/// Photon-number tomogram `ω(n, α) = ⟨n| D(α) ρ D(α)† |n⟩` of a Gaussian
/// state, from `P₀(α)` and the Hermite diagonal with `z → z + α`.
pub fn pnt_gaussian(state: &GaussianState, alpha: DisplacementAmplitude, n_max: usize) -> Result<PhotonDistribution> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("displacement must be finite: {alpha:?}")));
    }
    let params = hermite_params_for_mean(state, state.z() + alpha.as_complex())?;
    distribution_from_hermite(zero_photon_probability_displaced(state, alpha), &params, n_max)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Photon-number tomogram of the Fock state `|m⟩`:
/// `|⟨n| D(γ) |m⟩|² = (n_<! / n_>!) |γ|^{2(n_> − n_<)} e^{−|γ|²} (L_{n_<}^{(n_> − n_<)}(|γ|²))²`.
pub fn fock_pnt(m: usize, n: usize, gamma: DisplacementAmplitude) -> f64 {
    let x = gamma.norm_sqr();
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    let diff = hi - lo;
    let lag = laguerre_sequence(lo, diff as f64, x)[lo];
    if diff == 0 {
        return (-x).exp() * lag * lag;
    }
    if x == 0.0 {
        return 0.0;
    }
    let log_prefactor = ln_factorial(lo) - ln_factorial(hi) + diff as f64 * x.ln() - x;
    log_prefactor.exp() * lag * lag
}

/// `P_n` by direct phase-space integration of the Wigner function against
/// the Fock-state Wigner kernel,
/// `P_n = (−1)ⁿ/π ∫∫ W(q, p) e^{−(q²+p²)} L_n(2(q²+p²)) dq dp`.
///
/// Independent of the Hermite-polynomial route; intended as a test oracle.
pub fn fock_oracle(state: &GaussianState, n_max: usize, spec: &QuadratureSpec) -> Result<PhotonDistribution> {
    if n_max > ORACLE_MAX_N {
        return Err(Error::OrderTooLarge {
            order: n_max,
            max: ORACLE_MAX_N,
        });
    }
    // Beyond this radius the kernel is below 1e-17 for every n ≤ n_max.
    let r_kernel = kernel_radius(n_max, 1e-17);
    let ((q_lo, q_hi), (p_lo, p_hi)) = state.wigner_box(10.0);
    let q_range = (q_lo.max(-r_kernel), q_hi.min(r_kernel));
    let p_range = (p_lo.max(-r_kernel), p_hi.min(r_kernel));
    if q_range.0 >= q_range.1 || p_range.0 >= p_range.1 {
        // The state's support misses the kernel entirely.
        return PhotonDistribution::from_probabilities(vec![0.0; n_max + 1]);
    }
    let dim = n_max + 1;
    let result = integrate_2d_many(
        |q, p, out| {
            let r2 = q * q + p * p;
            let w = state.wigner(crate::gaussian_state::PhaseSpacePoint::new(q, p));
            let weight = w * (-r2).exp() / PI;
            let lag = laguerre_sequence(n_max, 0.0, 2.0 * r2);
            for (n, o) in out.iter_mut().enumerate() {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                *o = sign * weight * lag[n];
            }
        },
        dim,
        q_range,
        p_range,
        spec,
    )?;
    // Mass of W outside a ±10σ box is below e^{−50}; the kernel cut adds at
    // most 1e-17 per unit area.
    let tail_estimate = 1e-17 * (q_range.1 - q_range.0) * (p_range.1 - p_range.0) * state.cov().det().powf(-0.5);
    if tail_estimate > spec.tolerance(1.0) {
        return Err(Error::QuadratureFailure {
            what: "Fock-kernel oracle tail".into(),
            estimate: tail_estimate,
        });
    }
    PhotonDistribution::from_probabilities_with_slack(result.value, spec.tolerance(1.0).max(result.error_estimate) * 10.0)
}

fn kernel_radius(n_max: usize, eps: f64) -> f64 {
    (laguerre_envelope_cutoff(n_max, eps) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn factorial(n: usize) -> f64 {
        (1..=n).fold(1.0, |a, k| a * k as f64)
    }

    fn poisson(mean: f64, n: usize) -> f64 {
        (-mean).exp() * mean.powi(n as i32) / factorial(n)
    }

    #[test]
    fn vacuum_distribution() {
        let d = photon_distribution(&GaussianState::vacuum(), 12).unwrap();
        assert_abs_diff_eq!(d.probs()[0], 1.0, epsilon = 1e-15);
        for p in &d.probs()[1..] {
            assert_eq!(*p, 0.0);
        }
    }

    #[test]
    fn thermal_distribution_is_geometric() {
        for nbar in [0.5, 1.0, 2.0] {
            let d = photon_distribution(&GaussianState::thermal(nbar).unwrap(), 40).unwrap();
            for (n, p) in d.probs().iter().enumerate() {
                let want = nbar.powi(n as i32) / (nbar + 1.0).powi(n as i32 + 1);
                assert!((p - want).abs() < 1e-14, "nbar={nbar} n={n}: {p} vs {want}");
            }
        }
    }

    #[test]
    fn coherent_distribution_is_poisson() {
        let s = GaussianState::coherent(1.3, -0.4);
        let mean = s.z().norm_sqr();
        let d = photon_distribution(&s, 30).unwrap();
        for (n, p) in d.probs().iter().enumerate() {
            assert!((p - poisson(mean, n)).abs() < 1e-14);
        }
    }

    #[test]
    fn squeezed_vacuum_suppresses_odd_numbers() {
        let d = photon_distribution(&GaussianState::squeezed(1.0, 0.0, 0.0).unwrap(), 20).unwrap();
        assert_abs_diff_eq!(d.probs()[0], 1.0 / 1f64.cosh(), epsilon = 1e-14);
        for n in (1..=20).step_by(2) {
            assert!(d.probs()[n].abs() < 1e-15);
        }
        // P_2 = tanh²r / (2 cosh r)
        let t = 1f64.tanh();
        assert_abs_diff_eq!(d.probs()[2], t * t / (2.0 * 1f64.cosh()), epsilon = 1e-14);
    }

    #[test]
    fn regular_form_matches_singular_arguments() {
        // a₁ = R₁₁ y₁ + R₁₂ y₂ where the printed y is defined
        let s = GaussianState::from_parameters(0.7, -0.4, 1.3, 0.4, 0.25).unwrap();
        let c = s.cov();
        let inv = s.invariants();
        let z = s.z();
        let y1 = 2.0 * ((inv.trace - 1.0) * z.conj() + Complex64::new(c.sigma_pp - c.sigma_qq, 2.0 * c.sigma_pq) * z)
            / (2.0 * inv.trace - 4.0 * inv.d - 1.0);
        let params = hermite_params(&s).unwrap();
        let a1 = params.r11 * y1 + params.r12 * y1.conj();
        assert!((a1 - params.a1).norm() < 1e-14);
    }

    #[test]
    fn adaptive_truncation_reaches_tail_target() {
        let s = GaussianState::squeezed_thermal(2.0, 0.5, 0.3, 2.0, -1.0).unwrap();
        let d = photon_distribution_adaptive(&s, 1e-8).unwrap();
        assert!(d.tail_mass() < 1e-8, "{}", d.tail_mass());
        assert!(d.total() >= 1.0 - 1e-6);
        let coherent = photon_distribution_adaptive(&GaussianState::coherent(8.0, 0.0), 1e-10).unwrap();
        assert!(coherent.tail_mass() < 1e-10);
        assert!(coherent.n_max() > 32);
    }

    #[test]
    fn displaced_tomogram_examples() {
        for modulus in [0.5, 1.0, 2.0] {
            let alpha = DisplacementAmplitude::from_polar(modulus, 0.9);
            let d = pnt_gaussian(&GaussianState::vacuum(), alpha, 20).unwrap();
            for (n, p) in d.probs().iter().enumerate() {
                assert!((p - poisson(modulus * modulus, n)).abs() < 1e-12);
            }
        }
        let s = GaussianState::from_parameters(0.3, 0.9, 0.8, 0.6, -0.1).unwrap();
        let a = pnt_gaussian(&s, DisplacementAmplitude::ZERO, 15).unwrap();
        let b = photon_distribution(&s, 15).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
        let coh = GaussianState::coherent(0.8, -1.1);
        let z = coh.z();
        let d = pnt_gaussian(&coh, DisplacementAmplitude::new(-z.re, -z.im), 10).unwrap();
        assert_abs_diff_eq!(d.probs()[0], 1.0, epsilon = 1e-14);
        assert!(d.probs()[1..].iter().all(|p| p.abs() < 1e-14));
    }

    #[test]
    fn fock_pnt_examples() {
        let zero = DisplacementAmplitude::ZERO;
        for m in 0..5 {
            for n in 0..5 {
                assert_eq!(fock_pnt(m, n, zero), if m == n { 1.0 } else { 0.0 });
            }
        }
        let g = DisplacementAmplitude::new(0.6, -0.8);
        for n in 0..10 {
            assert_abs_diff_eq!(fock_pnt(0, n, g), poisson(1.0, n), epsilon = 1e-15);
        }
        assert_abs_diff_eq!(fock_pnt(1, 0, g), (-1f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn fock_pnt_normalized_and_symmetric() {
        for m in 0..=5 {
            for modulus in [0.0, 0.3, 1.0, 1.7, 2.0] {
                let g = DisplacementAmplitude::from_polar(modulus, 2.2);
                let total: f64 = (0..80).map(|n| fock_pnt(m, n, g)).sum();
                assert!((total - 1.0).abs() < 1e-8, "m={m} |g|={modulus}: {total}");
                for n in 0..12 {
                    assert!((fock_pnt(m, n, g) - fock_pnt(n, m, g)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let spec = QuadratureSpec::default();
        let vac = fock_oracle(&GaussianState::vacuum(), 10, &spec).unwrap();
        assert_abs_diff_eq!(vac.probs()[0], 1.0, epsilon = 1e-8);
        assert!(vac.probs()[1..].iter().all(|p| p.abs() < 1e-8));
        let th = fock_oracle(&GaussianState::thermal(1.0).unwrap(), 10, &spec).unwrap();
        for (n, p) in th.probs().iter().enumerate() {
            assert!((p - 0.5f64.powi(n as i32 + 1)).abs() < 1e-8);
        }
        let sq = fock_oracle(&GaussianState::squeezed(1.0, 0.0, 0.0).unwrap(), 10, &spec).unwrap();
        assert_abs_diff_eq!(sq.probs()[0], 1.0 / 1f64.cosh(), epsilon = 1e-8);
        for n in (1..=9).step_by(2) {
            assert!(sq.probs()[n].abs() < 1e-8);
        }
        assert!(matches!(
            fock_oracle(&GaussianState::vacuum(), 61, &spec),
            Err(Error::OrderTooLarge { .. })
        ));
    }

    #[test]
    fn distribution_constructor_checks() {
        assert!(PhotonDistribution::from_probabilities(vec![0.5, -1e-3]).is_err());
        assert!(PhotonDistribution::from_probabilities(vec![0.7, 0.7]).is_err());
        let d = PhotonDistribution::from_probabilities(vec![0.9, -1e-13, 0.05]).unwrap();
        assert_eq!(d.probs()[1], 0.0);
        assert_abs_diff_eq!(d.tail_mass(), 0.05, epsilon = 1e-15);
        let est = PhotonDistribution::from_estimate(vec![1.01, -0.01]);
        assert_eq!(est.probs(), &[1.01, -0.01]);
    }

    #[test]
    fn json_and_csv_formats() {
        let d = PhotonDistribution::from_probabilities(vec![0.5, 0.25]).unwrap();
        let v: serde_json::Value = serde_json::to_value(&d).unwrap();
        assert_eq!(v["n_max"], 1);
        assert_eq!(v["probs"][1], 0.25);
        assert_eq!(v["tail_mass"], 0.25);
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,prob\n0,5e-1\n1,2.5e-1\n");
    }
}
