//! From optical tomograms to photon-number tomograms.
//!
//! The photon-number tomogram is recovered from the optical tomogram as
//!
//! ```text
//! ω(n, α) = (1/2π) ∫₀^{2π} dθ ∫₀^∞ dk k e^{−k²/4} L_n(k²/2) F(k, θ) e^{ik√2(α₁ cos θ + α₂ sin θ)}
//! ```
//!
//! with `F(k, θ) = ∫ e^{ikX} w₀(X, θ) dX`. The displacement enters with a
//! plus sign so that `ω(n, α) = ⟨n| D(α) ρ D(α)† |n⟩`, the same object as
//! [`pnt_gaussian`](crate::photon_statistics::pnt_gaussian).

use std::f64::consts::{PI, SQRT_2};
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photon_statistics::{fock_pnt, DisplacementAmplitude, PhotonDistribution, MAX_ADAPTIVE_N};
use crate::polynomials::{laguerre_envelope_cutoff, laguerre_sequence};
use crate::quadrature::{integrate_interval, integrate_polar_from, AngularNodes, CompositeRule, QuadratureSpec, PANEL_ORDER};
use crate::tomograms::OpticalTomogram;

/// Limit on the imaginary part of a photon-number probability.
pub const IMAG_RESIDUAL_LIMIT: f64 = 1e-6;

/// Highest moment order accepted by [`tomogram_moments`].
pub const MAX_MOMENT_ORDER: usize = 64;

/// Highest Fock order accepted by [`verify_identity_p14`].
pub const MAX_IDENTITY_ORDER: usize = 30;

/// Arguments of the kernel `K(X, μ, ν, n, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub x: f64,
    pub mu: f64,
    pub nu: f64,
    pub n: usize,
    pub alpha: DisplacementAmplitude,
}

impl KernelPoint {
    pub fn new(x: f64, mu: f64, nu: f64, n: usize, alpha: DisplacementAmplitude) -> Result<Self> {
        if !(x.is_finite() && mu.is_finite() && nu.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter("kernel arguments must be finite".into()));
        }
        Ok(Self { x, mu, nu, n, alpha })
    }
}

/// `K = (1/2π) exp[iX + (ν − iμ)α*/√2 − (ν + iμ)α/√2] e^{−(μ²+ν²)/4} L_n((μ²+ν²)/2)`.
pub fn kernel(pt: &KernelPoint) -> Complex64 {
    let g = Complex64::new(pt.nu, pt.mu) / SQRT_2;
    let a = pt.alpha.as_complex();
    let phase = Complex64::new(0.0, pt.x) + g.conj() * a.conj() - g * a;
    let s = pt.mu * pt.mu + pt.nu * pt.nu;
    let lag = laguerre_sequence(pt.n, 0.0, s / 2.0)[pt.n];
    phase.exp() * (-s / 4.0).exp() * lag / (2.0 * PI)
}

/// `F(k, θ) = ∫ e^{ikX} w₀(X, θ) dX`, closed form when the tomogram has one.
pub fn characteristic_function<T>(tomo: &T, k: f64, theta: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    T: OpticalTomogram + ?Sized,
{
    if !(k >= 0.0) {
        return Err(Error::InvalidParameter(format!("k must be non-negative, got {k}")));
    }
    if let Some(f) = tomo.closed_form_characteristic(k, theta) {
        return Ok(f);
    }
    let (lo, hi) = tomo.support(theta);
    Ok(integrate_interval(|x| Complex64::from_polar(tomo.density(x, theta), k * x), lo, hi, spec)?.value)
}

/// Radial cutoff past which `k e^{−k²/4} |L_n(k²/2)| < eps` for `n ≤ n_max`.
pub fn transform_cutoff(n_max: usize, eps: f64) -> f64 {
    // the extra 1/100 absorbs the factor k
    (2.0 * laguerre_envelope_cutoff(n_max, eps / 100.0)).sqrt()
}

/// Result of the optical-to-photon-number transform with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformOutcome {
    /// Real parts of `ω(n, α)` for `n = 0..=n_max`, not clamped.
    pub values: Vec<f64>,
    /// Largest imaginary part over `n`.
    pub imag_residual: f64,
    pub error_estimate: f64,
    pub k_max: f64,
}

/// `ω(n, α)` for `n = 0..=n_max` with diagnostics.
///
/// Fails with `ImaginaryResidual` if any imaginary part exceeds
/// [`IMAG_RESIDUAL_LIMIT`].
pub fn pnt_from_optical_detailed<T>(
    tomo: &T,
    alpha: DisplacementAmplitude,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<TransformOutcome>
where
    T: OpticalTomogram + ?Sized,
{
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("displacement must be finite: {alpha:?}")));
    }
    let k_max = transform_cutoff(n_max, spec.tail_epsilon());
    let angles = match tomo.angle_grid() {
        Some(n) => AngularNodes::Fixed(n),
        None => AngularNodes::Adaptive(spec.initial_nodes.max(4)),
    };
    let failure = Mutex::new(None);
    let res = integrate_polar_from(
        |k, theta, out| {
            let f = match characteristic_function(tomo, k, theta, spec) {
                Ok(f) => f,
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            };
            let (s, c) = theta.sin_cos();
            let shift = Complex64::from_polar(1.0, k * SQRT_2 * (alpha.re * c + alpha.im * s));
            let common = f * shift * (k * (-k * k / 4.0).exp());
            let lag = laguerre_sequence(n_max, 0.0, k * k / 2.0);
            for (o, l) in out.iter_mut().zip(lag) {
                *o = common * l;
            }
        },
        n_max + 1,
        k_max,
        angles,
        spec,
    )?;
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let omega: Vec<Complex64> = res.value.iter().map(|v| v / (2.0 * PI)).collect();
    let imag_residual = omega.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    if imag_residual > IMAG_RESIDUAL_LIMIT {
        return Err(Error::ImaginaryResidual {
            residual: imag_residual,
            limit: IMAG_RESIDUAL_LIMIT,
        });
    }
    Ok(TransformOutcome {
        values: omega.iter().map(|w| w.re).collect(),
        imag_residual,
        error_estimate: res.error_estimate / (2.0 * PI),
        k_max,
    })
}

/// `ω(n, α)` for `n = 0..=n_max` from an optical tomogram.
///
/// The values are returned as computed; for measured or tabulated tomograms
/// they need not form a probability distribution, and a warning is logged
/// when an entry is negative or the total exceeds one beyond the quadrature
/// tolerance.
pub fn pnt_from_optical<T>(
    tomo: &T,
    alpha: DisplacementAmplitude,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<PhotonDistribution>
where
    T: OpticalTomogram + ?Sized,
{
    let outcome = pnt_from_optical_detailed(tomo, alpha, n_max, spec)?;
    let dist = PhotonDistribution::from_estimate(outcome.values);
    let tol = spec.tolerance(1.0).max(outcome.error_estimate);
    if dist.total() > 1.0 + tol || dist.probs().iter().any(|p| *p < -tol) {
        log::warn!(
            "photon-number tomogram is not normalized: total {}, smallest entry {}",
            dist.total(),
            dist.probs().iter().copied().fold(f64::INFINITY, f64::min)
        );
    }
    Ok(dist)
}

/// [`pnt_from_optical`] with `n_max` grown until `1 − Σ ω < tail_tol`.
pub fn pnt_from_optical_adaptive<T>(
    tomo: &T,
    alpha: DisplacementAmplitude,
    tail_tol: f64,
    spec: &QuadratureSpec,
) -> Result<PhotonDistribution>
where
    T: OpticalTomogram + ?Sized,
{
    let mut n_max = 15;
    loop {
        let dist = pnt_from_optical(tomo, alpha, n_max, spec)?;
        if dist.tail_mass() < tail_tol || n_max >= MAX_ADAPTIVE_N {
            return Ok(dist);
        }
        n_max = (2 * n_max + 1).min(MAX_ADAPTIVE_N);
    }
}

/// Raw moments `⟨X^m⟩_θ` for `m = 0..=m_max`.
pub fn tomogram_moments<T>(tomo: &T, theta: f64, m_max: usize, spec: &QuadratureSpec) -> Result<Vec<f64>>
where
    T: OpticalTomogram + ?Sized,
{
    if m_max > MAX_MOMENT_ORDER {
        return Err(Error::OrderTooLarge {
            order: m_max,
            max: MAX_MOMENT_ORDER,
        });
    }
    let (lo, hi) = tomo.support(theta);
    let (center, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    (0..=m_max)
        .map(|m| {
            // X^m w peaks further out than w; widen the range accordingly.
            let h = half * (((m as f64).sqrt() + 8.0) / 10.0).max(1.0);
            let res = integrate_interval(
                |x| Complex64::new(tomo.density(x, theta) * x.powi(m as i32), 0.0),
                center - h,
                center + h,
                spec,
            )?;
            Ok(res.value.re)
        })
        .collect()
}

/// Truncated moment-series estimate of `ω(n, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSeriesEstimate {
    pub value: f64,
    /// Radial cutoff at which the series was integrated.
    pub k_cut: f64,
    /// Estimated absolute error: series truncation inside the cutoff plus
    /// the neglected integrand beyond it.
    pub error_estimate: f64,
    pub converged: bool,
    pub tolerance: f64,
}

impl MomentSeriesEstimate {
    pub fn require_converged(&self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::SeriesNotConverged {
                estimate: self.error_estimate,
                tolerance: self.tolerance,
            })
        }
    }
}

/// Radial panels scanned for the series cutoff.
const MOMENT_PANELS: usize = 128;

/// `ω(n, α)` from the moment series `F(k, θ) ≈ Σ_{m ≤ m_max} (ik)^m ⟨X^m⟩_θ / m!`.
///
/// The power series only represents `F` for small `k`, so the radial
/// integral is cut at `K`, chosen to minimize
///
/// ```text
/// E(K) = ∫₀^K env(k) (|t_{M−1}(k)| + |t_M(k)|) dk + ∫_K^∞ env(k) dk · min(1, |F_M(K)|),
/// ```
///
/// where `env = k e^{−k²/4} |L_n(k²/2)|`, `t_m` are the last series terms
/// (maximized over θ) and ties go to the larger `K`. The estimate is
/// flagged converged when `E(K)` is within `spec.tolerance(1)`. With
/// `m_max = 0` the series is the constant 1 and the value is the biased
/// `∫ env`, which is 2 for `n = 0`.
pub fn pnt_via_moments<T>(
    tomo: &T,
    alpha: DisplacementAmplitude,
    n: usize,
    m_max: usize,
    spec: &QuadratureSpec,
) -> Result<MomentSeriesEstimate>
where
    T: OpticalTomogram + ?Sized,
{
    let n_theta = (4 * (m_max + 1)).max(64);
    let thetas: Vec<f64> = (0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect();
    let moments: Vec<Vec<f64>> = thetas
        .par_iter()
        .map(|&t| tomogram_moments(tomo, t, m_max, spec))
        .collect::<Result<_>>()?;
    // c[j][m] = ⟨X^m⟩_θj / m!
    let scaled: Vec<Vec<f64>> = moments
        .iter()
        .map(|row| {
            let mut fact = 1.0;
            row.iter()
                .enumerate()
                .map(|(m, mu)| {
                    if m > 0 {
                        fact *= m as f64;
                    }
                    mu / fact
                })
                .collect()
        })
        .collect();
    let series = |k: f64, j: usize| -> Complex64 {
        // Horner in ik
        let ik = Complex64::new(0.0, k);
        scaled[j].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * ik + c)
    };
    let last_terms = |k: f64| -> f64 {
        let lo = m_max.saturating_sub(1);
        (0..n_theta)
            .map(|j| (lo..=m_max).map(|m| k.powi(m as i32) * scaled[j][m].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let env = |k: f64| k * (-k * k / 4.0).exp() * laguerre_sequence(n, 0.0, k * k / 2.0)[n].abs();

    let k_env = transform_cutoff(n, 1e-16);
    let rule = CompositeRule::new(0.0, k_env, MOMENT_PANELS, PANEL_ORDER);
    let mut inside = vec![0.0; MOMENT_PANELS + 1];
    let mut env_mass = vec![0.0; MOMENT_PANELS + 1];
    for p in 0..MOMENT_PANELS {
        let (mut a, mut b) = (0.0, 0.0);
        for i in p * PANEL_ORDER..(p + 1) * PANEL_ORDER {
            let (k, w) = (rule.nodes[i], rule.weights[i]);
            let e = env(k) * w;
            a += e * last_terms(k);
            b += e;
        }
        inside[p + 1] = inside[p] + a;
        env_mass[p + 1] = env_mass[p] + b;
    }
    let total_env = env_mass[MOMENT_PANELS];
    let panel = k_env / MOMENT_PANELS as f64;
    let mut best = (f64::INFINITY, 0.0);
    for p in 1..=MOMENT_PANELS {
        let k = panel * p as f64;
        let f_max = (0..n_theta).map(|j| series(k, j).norm()).fold(0.0, f64::max);
        let e = inside[p] + (total_env - env_mass[p]) * f_max.min(1.0);
        if e <= best.0 {
            best = (e, k);
        }
    }
    let (error_estimate, k_cut) = best;

    let res = integrate_interval(
        |k| {
            let (s, c): (Vec<f64>, Vec<f64>) = thetas.iter().map(|t| t.sin_cos()).unzip();
            let sum: Complex64 = (0..n_theta)
                .map(|j| series(k, j) * Complex64::from_polar(1.0, k * SQRT_2 * (alpha.re * c[j] + alpha.im * s[j])))
                .sum();
            sum / n_theta as f64 * k * (-k * k / 4.0).exp() * laguerre_sequence(n, 0.0, k * k / 2.0)[n]
        },
        0.0,
        k_cut,
        spec,
    )?;
    let tolerance = spec.tolerance(1.0);
    Ok(MomentSeriesEstimate {
        value: res.value.re,
        k_cut,
        error_estimate,
        converged: error_estimate <= tolerance,
        tolerance,
    })
}

/// Either side of a verification: one value or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Values {
    Scalar(f64),
    List(Vec<f64>),
}

/// Quadrature settings and diagnostics attached to a verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadReport {
    #[serde(flatten)]
    pub spec: QuadratureSpec,
    pub error_estimate: f64,
    pub imag_residual: f64,
}

/// Outcome of comparing a closed form (`lhs`) with a numerical integral (`rhs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub lhs: Values,
    pub rhs: Values,
    pub abs_err: f64,
    pub quad: QuadReport,
}

/// `∫ e^{iX} w_m(X, μ, ν) dX` at `r = |(μ, ν)|` from the linearization
/// `H_m(y)² = Σ_k 2^k k! C(m, k)² H_{2m−2k}(y)` (up to the Gaussian moment
/// integrals), giving
/// `e^{−r²/4} Σ_k 2^k k! C(m, k)² (−1)^{m−k} r^{2m−2k} / (2^m m!)`.
fn fock_characteristic_linearized(m: usize, r: f64) -> f64 {
    let fact = |j: usize| (1..=j).fold(1.0, |a, i| a * i as f64);
    let binom = |k: usize| fact(m) / (fact(k) * fact(m - k));
    let sum: f64 = (0..=m)
        .map(|k| {
            let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            2f64.powi(k as i32) * fact(k) * binom(k).powi(2) * sign * r.powi(2 * (m - k) as i32)
        })
        .sum();
    (-r * r / 4.0).exp() * sum / (2f64.powi(m as i32) * fact(m))
}

/// Both sides of the Hermite–Laguerre relation for `m ≤ n`:
///
/// ```text
/// (m!/n!) |γ|^{2(n−m)} e^{−|γ|²} (L_m^{(n−m)}(|γ|²))²
///     = ∫ K(X, μ, ν, n, γ) w_m(X, μ, ν) dX dμ dν,
/// ```
///
/// with the right side in polar `(μ, ν)` and the `X` integral in closed form.
pub fn verify_identity_p14(
    m: usize,
    n: usize,
    gamma: DisplacementAmplitude,
    spec: &QuadratureSpec,
) -> Result<VerificationReport> {
    if m > n {
        return Err(Error::InvalidParameter(format!("the relation needs m <= n, got m = {m}, n = {n}")));
    }
    if n > MAX_IDENTITY_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_IDENTITY_ORDER,
        });
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be finite: {gamma:?}")));
    }
    let lhs = fock_pnt(m, n, gamma);
    // |e^{−u/2} L_n(u)| ≤ 1, so the decay of the m factor bounds the product.
    let r_max = transform_cutoff(m, spec.tail_epsilon());
    let res = integrate_polar_from(
        |r, theta, out| {
            let (s, c) = theta.sin_cos();
            let phase = Complex64::from_polar(1.0, -SQRT_2 * r * (gamma.re * c + gamma.im * s));
            let kernel_radial = (-r * r / 4.0).exp() * laguerre_sequence(n, 0.0, r * r / 2.0)[n];
            out[0] = phase * (r * kernel_radial * fock_characteristic_linearized(m, r));
        },
        1,
        r_max,
        AngularNodes::Adaptive(spec.initial_nodes.max(4)),
        spec,
    )?;
    let rhs = res.value[0] / (2.0 * PI);
    Ok(VerificationReport {
        identity: "p14".into(),
        lhs: Values::Scalar(lhs),
        rhs: Values::Scalar(rhs.re),
        abs_err: (lhs - rhs.re).abs(),
        quad: QuadReport {
            spec: *spec,
            error_estimate: res.error_estimate / (2.0 * PI),
            imag_residual: rhs.im.abs(),
        },
    })
}

/// The ground-state check: the full triple integral for the vacuum
/// tomogram `e^{−X²}/√π` at `n = 0`, `α = 0`, with the `X` integral done
/// by quadrature. The exact value is 1.
pub fn verify_ground_state(spec: &QuadratureSpec) -> Result<VerificationReport> {
    let vacuum = crate::tomograms::OpticalFn::new(|x, _| (-x * x).exp() / PI.sqrt(), (-9.0, 9.0))?;
    let outcome = pnt_from_optical_detailed(&vacuum, DisplacementAmplitude::ZERO, 0, spec)?;
    let rhs = outcome.values[0];
    Ok(VerificationReport {
        identity: "p9".into(),
        lhs: Values::Scalar(1.0),
        rhs: Values::Scalar(rhs),
        abs_err: (rhs - 1.0).abs(),
        quad: QuadReport {
            spec: *spec,
            error_estimate: outcome.error_estimate,
            imag_residual: outcome.imag_residual,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_state::GaussianState;
    use crate::photon_statistics::{photon_distribution, pnt_gaussian};
    use crate::tomograms::{fock_characteristic, FockTomogram, GaussianTomogram, NumericOnly};
    use approx::assert_abs_diff_eq;

    fn alpha0() -> DisplacementAmplitude {
        DisplacementAmplitude::ZERO
    }

    #[test]
    fn table_transform_uses_its_own_angles() {
        use crate::tomograms::{optical_gaussian, TomogramTable};
        let state = GaussianState::squeezed_thermal(0.5, 0.5, 0.5, 0.8, 0.4).unwrap();
        let thetas: Vec<f64> = (0..64).map(|j| 2.0 * PI * j as f64 / 64.0).collect();
        let xs: Vec<f64> = (0..=600).map(|j| -10.0 + j as f64 / 30.0).collect();
        let values = thetas.iter().map(|&t| xs.iter().map(|&x| optical_gaussian(&state, t, x)).collect()).collect();
        let table = TomogramTable::new(thetas, xs, values).unwrap();
        let alpha = DisplacementAmplitude::new(-0.5, 0.2);
        let got = pnt_from_optical(&table, alpha, 6, &QuadratureSpec::default()).unwrap();
        let want = pnt_gaussian(&state, alpha, 6).unwrap();
        assert!(got.max_abs_diff(&want) < 2e-4, "{:?}", got.probs());
    }

    #[test]
    fn kernel_examples() {
        let at = |x, mu, nu, n| kernel(&KernelPoint::new(x, mu, nu, n, alpha0()).unwrap());
        assert!((at(0.0, 0.0, 0.0, 0) - 1.0 / (2.0 * PI)).norm() < 1e-16);
        assert!(at(0.0, 1.0, 1.0, 1).norm() < 1e-16);
        assert!((at(0.0, SQRT_2, 0.0, 0) - (-0.5f64).exp() / (2.0 * PI)).norm() < 1e-16);
        // the displacement only contributes a phase
        let k = kernel(&KernelPoint::new(0.3, 0.7, -0.2, 2, DisplacementAmplitude::new(1.0, 0.5)).unwrap());
        assert_abs_diff_eq!(k.norm(), at(0.3, 0.7, -0.2, 2).norm(), epsilon = 1e-16);
    }

    #[test]
    fn characteristic_examples() {
        let spec = QuadratureSpec::default();
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        for (k, theta) in [(0.0, 0.0), (1.0, 0.5), (2.5, 3.0)] {
            let f = characteristic_function(&NumericOnly(&vac), k, theta, &spec).unwrap();
            assert!((f - Complex64::new((-k * k / 4.0).exp(), 0.0)).norm() < 1e-12);
        }
        let s = GaussianState::squeezed_thermal(1.0, 0.4, 1.0, 1.0, -0.5).unwrap();
        let t = GaussianTomogram::new(s);
        for j in 0..20 {
            let f = characteristic_function(&NumericOnly(&t), 0.3 * j as f64, 0.31 * j as f64, &spec).unwrap();
            assert!(f.norm() <= 1.0 + 1e-12);
        }
        assert!(characteristic_function(&t, -1.0, 0.0, &spec).is_err());
    }

    #[test]
    fn ground_state_integral_is_one() {
        let report = verify_ground_state(&QuadratureSpec::default()).unwrap();
        assert!(report.abs_err < 1e-8, "{report:?}");
    }

    #[test]
    fn transform_examples() {
        let spec = QuadratureSpec::default();
        let vac = pnt_from_optical(&GaussianTomogram::new(GaussianState::vacuum()), alpha0(), 5, &spec).unwrap();
        assert_abs_diff_eq!(vac.probs()[0], 1.0, epsilon = 1e-9);
        let th = pnt_from_optical(&GaussianTomogram::new(GaussianState::thermal(1.0).unwrap()), alpha0(), 10, &spec).unwrap();
        for (n, p) in th.probs().iter().enumerate() {
            assert_abs_diff_eq!(*p, 0.5f64.powi(n as i32 + 1), epsilon = 1e-9);
        }
        let sq = GaussianState::squeezed(1.0, 0.0, 0.0).unwrap();
        let got = pnt_from_optical(&GaussianTomogram::new(sq), alpha0(), 10, &spec).unwrap();
        let want = pnt_gaussian(&sq, alpha0(), 10).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-9);
        for n in (1..=9).step_by(2) {
            assert!(got.probs()[n].abs() < 1e-9);
        }
    }

    #[test]
    fn displacement_sign_matches_closed_form() {
        let spec = QuadratureSpec::default();
        let s = GaussianState::from_parameters(0.6, -0.2, 0.9, 0.5, 0.15).unwrap();
        let alpha = DisplacementAmplitude::new(0.7, 0.4);
        let got = pnt_from_optical(&GaussianTomogram::new(s), alpha, 10, &spec).unwrap();
        let want = pnt_gaussian(&s, alpha, 10).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-8, "{}", got.max_abs_diff(&want));
    }

    #[test]
    fn numeric_characteristic_path() {
        let spec = QuadratureSpec::default().with_tolerances(1e-9, 1e-11);
        let s = GaussianState::squeezed_thermal(0.5, 0.5, 0.4, 0.5, 0.3).unwrap();
        let alpha = DisplacementAmplitude::new(-0.3, 0.2);
        let got = pnt_from_optical(&NumericOnly(&GaussianTomogram::new(s)), alpha, 6, &spec).unwrap();
        let want = pnt_gaussian(&s, alpha, 6).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-7, "{}", got.max_abs_diff(&want));
    }

    #[test]
    fn fock_consistency() {
        let spec = QuadratureSpec::default();
        for m in 0..=3 {
            let alpha = DisplacementAmplitude::new(0.6, -0.5);
            let got = pnt_from_optical(&FockTomogram::new(m), alpha, 6, &spec).unwrap();
            for n in 0..=6 {
                assert_abs_diff_eq!(got.probs()[n], fock_pnt(m, n, alpha), epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn adaptive_transform_is_normalized() {
        let spec = QuadratureSpec::default();
        let s = GaussianState::squeezed_thermal(0.5, 0.5, 0.2, 1.0, 0.5).unwrap();
        let d = pnt_from_optical_adaptive(&GaussianTomogram::new(s), alpha0(), 1e-6, &spec).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn moments_examples() {
        let spec = QuadratureSpec::default();
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let m = tomogram_moments(&vac, 0.4, 4, &spec).unwrap();
        assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m[2], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m[4], 0.75, epsilon = 1e-12);
        let s = GaussianState::from_parameters(0.8, -1.1, 0.7, 0.6, 0.1).unwrap();
        let theta: f64 = 1.2;
        let m = tomogram_moments(&GaussianTomogram::new(s), theta, 1, &spec).unwrap();
        assert_abs_diff_eq!(m[1], 0.8 * theta.cos() - 1.1 * theta.sin(), epsilon = 1e-12);
        // (2j−1)!! σ^{2j} up to high order
        let m = tomogram_moments(&vac, 0.0, 30, &spec).unwrap();
        let double_fact: f64 = (1..30).step_by(2).map(|j| j as f64).product();
        assert!((m[30] / (double_fact * 0.5f64.powi(15)) - 1.0).abs() < 1e-10);
        assert!(matches!(tomogram_moments(&vac, 0.0, 65, &spec), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn moment_series_degenerate_truncation() {
        let spec = QuadratureSpec::default().with_tolerances(1e-4, 1e-4);
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let est = pnt_via_moments(&vac, alpha0(), 0, 0, &spec).unwrap();
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-8);
        assert!(!est.converged);
        assert!(matches!(est.require_converged(), Err(Error::SeriesNotConverged { .. })));
    }

    #[test]
    fn moment_series_accuracy() {
        // The truncated power series represents F only on a bounded k-range,
        // so accuracy is limited by m_max; these are the attainable levels.
        let spec = QuadratureSpec::default().with_tolerances(1e-4, 1e-4);
        let vac = GaussianTomogram::new(GaussianState::vacuum());
        let est = pnt_via_moments(&vac, alpha0(), 0, 20, &spec).unwrap();
        assert!((est.value - 1.0).abs() < 3e-3, "{est:?}");
        assert!(est.error_estimate >= (est.value - 1.0).abs());
        let est = pnt_via_moments(&vac, alpha0(), 0, 40, &spec).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4, "{est:?}");
        assert!(est.converged);

        let th = GaussianTomogram::new(GaussianState::thermal(0.5).unwrap());
        let reference = pnt_from_optical(&th, alpha0(), 1, &QuadratureSpec::default()).unwrap().probs()[1];
        let est = pnt_via_moments(&th, alpha0(), 1, 30, &spec).unwrap();
        assert!((est.value - reference).abs() < 5e-3, "{est:?} vs {reference}");
    }

    #[test]
    fn moment_series_with_displacement() {
        let spec = QuadratureSpec::default().with_tolerances(1e-4, 1e-4);
        let s = GaussianState::coherent(0.3, 0.2);
        let alpha = DisplacementAmplitude::new(0.1, -0.2);
        let est = pnt_via_moments(&GaussianTomogram::new(s), alpha, 0, 40, &spec).unwrap();
        let want = pnt_gaussian(&s, alpha, 0).unwrap().probs()[0];
        assert!((est.value - want).abs() < 1e-3, "{est:?} vs {want}");
    }

    #[test]
    fn identity_examples() {
        let spec = QuadratureSpec::default();
        let r = verify_identity_p14(0, 0, alpha0(), &spec).unwrap();
        assert!(r.abs_err < 1e-6 && (matches!(r.lhs, Values::Scalar(v) if v == 1.0)));
        let r = verify_identity_p14(0, 1, alpha0(), &spec).unwrap();
        assert!(r.abs_err < 1e-6);
        let r = verify_identity_p14(1, 2, DisplacementAmplitude::from_polar(1.0, 0.3), &spec).unwrap();
        assert!(r.abs_err < 1e-6, "{r:?}");
        assert!(verify_identity_p14(2, 1, alpha0(), &spec).is_err());
    }

    #[test]
    fn linearized_characteristic_matches_laguerre_form() {
        for m in 0..=8 {
            for r in [0.0, 0.4, 1.3, 3.0, 6.0] {
                assert_abs_diff_eq!(fock_characteristic_linearized(m, r), fock_characteristic(m, r), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn report_json_shape() {
        let r = verify_identity_p14(0, 0, alpha0(), &QuadratureSpec::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        for key in ["lhs", "rhs", "abs_err", "quad"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(v["quad"]["rel_tol"].is_number());
    }

    #[test]
    fn photon_distribution_round_trip() {
        let spec = QuadratureSpec::default();
        let s = GaussianState::squeezed_thermal(2.0, 1.0, PI / 6.0, 1.0, -1.0).unwrap();
        let got = pnt_from_optical(&GaussianTomogram::new(s), alpha0(), 10, &spec).unwrap();
        let want = photon_distribution(&s, 10).unwrap();
        assert!(got.max_abs_diff(&want) < 1e-8);
    }
}
