//! The five-parameter one-mode Gaussian state.
//!
//! Units are fixed at ħ = ω = 1. The Wigner function carries the prefactor
//! `d^{-1/2}`, which fixes its normalization to `∫∫ W dq dp = 2π` rather than
//! the `∫∫ W = 1` convention used elsewhere; every quantity in this crate
//! that integrates `W` divides by 2π accordingly.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photon_statistics::DisplacementAmplitude;

/// Slack on the bound `det σ ≥ 1/4` so that pure states survive rounding.
pub const DET_TOLERANCE: f64 = 1e-12;

/// Real symmetric variance matrix `[[σ_pp, σ_pq], [σ_pq, σ_qq]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix {
    pub sigma_pp: f64,
    pub sigma_qq: f64,
    pub sigma_pq: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    /// `det σ`
    pub d: f64,
    /// `Tr σ`
    pub trace: f64,
}

impl CovarianceMatrix {
    pub fn new(sigma_pp: f64, sigma_qq: f64, sigma_pq: f64) -> Result<Self> {
        let cov = Self {
            sigma_pp,
            sigma_qq,
            sigma_pq,
        };
        validate(&cov)?;
        Ok(cov)
    }

    pub fn det(&self) -> f64 {
        self.sigma_pp * self.sigma_qq - self.sigma_pq * self.sigma_pq
    }

    pub fn trace(&self) -> f64 {
        self.sigma_pp + self.sigma_qq
    }

    /// Covariance after rotating phase space by `phi`, i.e. `R σ Rᵀ` for the
    /// map `q → q cos φ − p sin φ`, `p → q sin φ + p cos φ`.
    pub fn rotated(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (a, b, e) = (self.sigma_qq, self.sigma_pq, self.sigma_pp);
        Self {
            sigma_qq: c * c * a - 2.0 * s * c * b + s * s * e,
            sigma_pp: s * s * a + 2.0 * s * c * b + c * c * e,
            sigma_pq: s * c * (a - e) + (c * c - s * s) * b,
        }
    }

    /// Variance of the quadrature `X = μq + νp`.
    pub fn quadrature_variance(&self, mu: f64, nu: f64) -> f64 {
        mu * mu * self.sigma_qq + nu * nu * self.sigma_pp + 2.0 * mu * nu * self.sigma_pq
    }

    /// Largest eigenvalue of σ.
    pub fn max_eigenvalue(&self) -> f64 {
        let half_trace = 0.5 * self.trace();
        let disc = (0.25 * (self.sigma_pp - self.sigma_qq).powi(2) + self.sigma_pq * self.sigma_pq).sqrt();
        half_trace + disc
    }

    /// Smallest eigenvalue of σ.
    pub fn min_eigenvalue(&self) -> f64 {
        self.det() / self.max_eigenvalue()
    }
}

/// Checks positivity of the variances and the uncertainty bound `d ≥ 1/4`.
pub fn validate(cov: &CovarianceMatrix) -> Result<()> {
    let finite = [cov.sigma_pp, cov.sigma_qq, cov.sigma_pq].iter().all(|v| v.is_finite());
    if !finite {
        return Err(Error::InvalidParameter(format!("covariance entries must be finite: {cov:?}")));
    }
    if cov.sigma_pp <= 0.0 || cov.sigma_qq <= 0.0 {
        return Err(Error::NonPositiveVariance {
            sigma_pp: cov.sigma_pp,
            sigma_qq: cov.sigma_qq,
        });
    }
    let d = cov.det();
    if d < 0.25 - DET_TOLERANCE {
        return Err(Error::UncertaintyViolation { d });
    }
    Ok(())
}

pub fn invariants(cov: &CovarianceMatrix) -> Invariants {
    Invariants {
        d: cov.det(),
        trace: cov.trace(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub q: f64,
    pub p: f64,
}

impl PhaseSpacePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }
}

/// A validated Gaussian state: means `⟨q⟩`, `⟨p⟩` and covariance σ.
///
/// Serializes as the flat object
/// `{"mean_q", "mean_p", "sigma_pp", "sigma_qq", "sigma_pq"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct GaussianState {
    mean_q: f64,
    mean_p: f64,
    cov: CovarianceMatrix,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    mean_q: f64,
    mean_p: f64,
    sigma_pp: f64,
    sigma_qq: f64,
    sigma_pq: f64,
}

impl TryFrom<StateRecord> for GaussianState {
    type Error = Error;

    fn try_from(r: StateRecord) -> Result<Self> {
        GaussianState::new(r.mean_q, r.mean_p, CovarianceMatrix::new(r.sigma_pp, r.sigma_qq, r.sigma_pq)?)
    }
}

impl From<GaussianState> for StateRecord {
    fn from(s: GaussianState) -> Self {
        Self {
            mean_q: s.mean_q,
            mean_p: s.mean_p,
            sigma_pp: s.cov.sigma_pp,
            sigma_qq: s.cov.sigma_qq,
            sigma_pq: s.cov.sigma_pq,
        }
    }
}

impl GaussianState {
    pub fn new(mean_q: f64, mean_p: f64, cov: CovarianceMatrix) -> Result<Self> {
        validate(&cov)?;
        if !(mean_q.is_finite() && mean_p.is_finite()) {
            return Err(Error::InvalidParameter(format!("means must be finite: <q> = {mean_q}, <p> = {mean_p}")));
        }
        Ok(Self { mean_q, mean_p, cov })
    }

    pub fn from_parameters(mean_q: f64, mean_p: f64, sigma_pp: f64, sigma_qq: f64, sigma_pq: f64) -> Result<Self> {
        Self::new(mean_q, mean_p, CovarianceMatrix::new(sigma_pp, sigma_qq, sigma_pq)?)
    }

    pub fn vacuum() -> Self {
        Self::coherent(0.0, 0.0)
    }

    pub fn coherent(mean_q: f64, mean_p: f64) -> Self {
        Self {
            mean_q,
            mean_p,
            cov: CovarianceMatrix {
                sigma_pp: 0.5,
                sigma_qq: 0.5,
                sigma_pq: 0.0,
            },
        }
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("mean photon number must be >= 0, got {nbar}")));
        }
        let v = nbar + 0.5;
        Ok(Self {
            mean_q: 0.0,
            mean_p: 0.0,
            cov: CovarianceMatrix {
                sigma_pp: v,
                sigma_qq: v,
                sigma_pq: 0.0,
            },
        })
    }

    /// Squeezed state with `σ_pp = e^{2r}/2`, `σ_qq = e^{−2r}/2`.
    pub fn squeezed(r: f64, mean_q: f64, mean_p: f64) -> Result<Self> {
        Self::squeezed_thermal(0.0, r, 0.0, mean_q, mean_p)
    }

    /// Thermal state with `nbar` photons, squeezed by `r` and with the
    /// squeezing ellipse rotated by `phi`, displaced to the given means.
    pub fn squeezed_thermal(nbar: f64, r: f64, phi: f64, mean_q: f64, mean_p: f64) -> Result<Self> {
        if !r.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("squeezing parameters must be finite: r = {r}, phi = {phi}")));
        }
        let thermal = Self::thermal(nbar)?;
        let v = thermal.cov.sigma_pp;
        let cov = CovarianceMatrix {
            sigma_pp: v * (2.0 * r).exp(),
            sigma_qq: v * (-2.0 * r).exp(),
            sigma_pq: 0.0,
        }
        .rotated(phi);
        Self::new(mean_q, mean_p, cov)
    }

    pub fn mean_q(&self) -> f64 {
        self.mean_q
    }

    pub fn mean_p(&self) -> f64 {
        self.mean_p
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn invariants(&self) -> Invariants {
        invariants(&self.cov)
    }

    /// `z = (⟨q⟩ + i⟨p⟩)/√2`, the mean of the annihilation operator.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.mean_q, self.mean_p) / SQRT_2
    }

    /// Purity `Tr ρ² = 1/(2√d)`.
    pub fn purity(&self) -> f64 {
        0.5 / self.cov.det().sqrt()
    }

    /// The state `D(α) ρ D(α)†`: means shift by `√2 (Re α, Im α)`.
    pub fn displaced(&self, alpha: DisplacementAmplitude) -> Self {
        Self {
            mean_q: self.mean_q + SQRT_2 * alpha.re,
            mean_p: self.mean_p + SQRT_2 * alpha.im,
            cov: self.cov,
        }
    }

    /// Mean of the quadrature `X = μq + νp`.
    pub fn quadrature_mean(&self, mu: f64, nu: f64) -> f64 {
        mu * self.mean_q + nu * self.mean_p
    }

    pub fn quadrature_variance(&self, mu: f64, nu: f64) -> f64 {
        self.cov.quadrature_variance(mu, nu)
    }

    /// Rectangle `mean ± width·√σ` in (q, p) holding all but a Gaussian
    /// tail of the Wigner function.
    pub fn wigner_box(&self, width: f64) -> ((f64, f64), (f64, f64)) {
        let hq = width * self.cov.sigma_qq.sqrt();
        let hp = width * self.cov.sigma_pp.sqrt();
        ((self.mean_q - hq, self.mean_q + hq), (self.mean_p - hp, self.mean_p + hp))
    }

    /// `W(p, q) = d^{−1/2} exp{−[σ_qq Δp² + σ_pp Δq² − 2σ_pq Δp Δq]/(2d)}`.
    pub fn wigner(&self, pt: PhaseSpacePoint) -> f64 {
        wigner_eval(self, pt)
    }
}

pub fn wigner_eval(state: &GaussianState, pt: PhaseSpacePoint) -> f64 {
    let c = &state.cov;
    let d = c.det();
    let dp = pt.p - state.mean_p;
    let dq = pt.q - state.mean_q;
    let quad = c.sigma_qq * dp * dp + c.sigma_pp * dq * dq - 2.0 * c.sigma_pq * dp * dq;
    (-quad / (2.0 * d)).exp() / d.sqrt()
}

pub fn make_vacuum() -> GaussianState {
    GaussianState::vacuum()
}

pub fn make_coherent(mean_q: f64, mean_p: f64) -> GaussianState {
    GaussianState::coherent(mean_q, mean_p)
}

pub fn make_thermal(nbar: f64) -> Result<GaussianState> {
    GaussianState::thermal(nbar)
}

pub fn make_squeezed(r: f64, mean_q: f64, mean_p: f64) -> Result<GaussianState> {
    GaussianState::squeezed(r, mean_q, mean_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_2d, QuadratureSpec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn validate_examples() {
        assert!(CovarianceMatrix::new(0.5, 0.5, 0.0).is_ok());
        match CovarianceMatrix::new(0.5, 0.5, 0.5) {
            Err(Error::UncertaintyViolation { d }) => assert_abs_diff_eq!(d, 0.0),
            other => panic!("expected uncertainty violation, got {other:?}"),
        }
        assert!(CovarianceMatrix::new(1.5, 1.5, 0.0).is_ok());
        assert!(matches!(
            CovarianceMatrix::new(-0.5, -0.5, 0.0),
            Err(Error::NonPositiveVariance { .. })
        ));
        assert!(matches!(
            CovarianceMatrix::new(f64::NAN, 0.5, 0.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn invariants_examples() {
        let inv = invariants(&CovarianceMatrix::new(0.5, 0.5, 0.0).unwrap());
        assert_eq!((inv.d, inv.trace), (0.25, 1.0));
        let inv = invariants(&CovarianceMatrix::new(1.5, 1.5, 0.0).unwrap());
        assert_eq!((inv.d, inv.trace), (2.25, 3.0));
        let e2 = 2f64.exp();
        let inv = invariants(&CovarianceMatrix::new(e2 / 2.0, 1.0 / (2.0 * e2), 0.0).unwrap());
        assert_abs_diff_eq!(inv.d, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.trace, 2f64.cosh(), epsilon = 1e-14);
    }

    #[test]
    fn wigner_examples() {
        let vac = make_vacuum();
        assert_abs_diff_eq!(vac.wigner(PhaseSpacePoint::new(0.0, 0.0)), 2.0);
        let th = make_thermal(1.0).unwrap();
        assert_abs_diff_eq!(th.wigner(PhaseSpacePoint::new(0.0, 0.0)), 2.0 / 3.0, epsilon = 1e-15);
        let s = GaussianState::from_parameters(0.3, -1.2, 1.1, 0.7, 0.2).unwrap();
        let at_mean = s.wigner(PhaseSpacePoint::new(0.3, -1.2));
        assert_abs_diff_eq!(at_mean, s.cov().det().powf(-0.5), epsilon = 1e-15);
    }

    #[test]
    fn constructors() {
        assert_eq!(make_thermal(0.0).unwrap(), make_vacuum());
        assert_eq!(make_squeezed(0.0, 0.0, 0.0).unwrap(), make_vacuum());
        let th = make_thermal(1.0).unwrap();
        assert_eq!((th.cov().sigma_pp, th.cov().sigma_qq), (1.5, 1.5));
        assert!(matches!(make_thermal(-0.1), Err(Error::InvalidParameter(_))));
        let sq = make_squeezed(1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(sq.cov().sigma_pp, 2f64.exp() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.cov().sigma_qq, (-2f64).exp() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(make_vacuum().purity(), 1.0);
        assert_abs_diff_eq!(th.purity(), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn wigner_normalization_and_marginal_variances() {
        // The printed quadratic form pairs σ_qq with (p − ⟨p⟩)²; the q
        // marginal must still have variance σ_qq.
        let s = GaussianState::from_parameters(0.4, -0.3, 1.3, 0.4, 0.25).unwrap();
        let (qr, pr) = s.wigner_box(12.0);
        let spec = QuadratureSpec::default();
        let norm = integrate_2d(|q, p| s.wigner(PhaseSpacePoint::new(q, p)), qr, pr, &spec).unwrap();
        assert_abs_diff_eq!(norm.value, 2.0 * PI, epsilon = 1e-8);
        let var_q = integrate_2d(|q, p| (q - 0.4).powi(2) * s.wigner(PhaseSpacePoint::new(q, p)), qr, pr, &spec).unwrap();
        assert_abs_diff_eq!(var_q.value / (2.0 * PI), 0.4, epsilon = 1e-9);
        let var_p = integrate_2d(|q, p| (p + 0.3).powi(2) * s.wigner(PhaseSpacePoint::new(q, p)), qr, pr, &spec).unwrap();
        assert_abs_diff_eq!(var_p.value / (2.0 * PI), 1.3, epsilon = 1e-9);
        let cov = integrate_2d(|q, p| (q - 0.4) * (p + 0.3) * s.wigner(PhaseSpacePoint::new(q, p)), qr, pr, &spec).unwrap();
        assert_abs_diff_eq!(cov.value / (2.0 * PI), 0.25, epsilon = 1e-9);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let s = GaussianState::from_parameters(0.1, 0.2, 1.0, 0.5, 0.1).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"sigma_pq\":0.1"));
        let back: GaussianState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"mean_q":0,"mean_p":0,"sigma_pp":0.5,"sigma_qq":0.5,"sigma_pq":0.5}"#;
        let err = serde_json::from_str::<GaussianState>(bad).unwrap_err();
        assert!(err.to_string().contains("uncertainty"), "{err}");
    }

    proptest! {
        #[test]
        fn validate_matches_determinant_bound(
            spp in 0.01f64..3.0, sqq in 0.01f64..3.0, spq in -2.0f64..2.0,
        ) {
            let cov = CovarianceMatrix { sigma_pp: spp, sigma_qq: sqq, sigma_pq: spq };
            let d = spp * sqq - spq * spq;
            prop_assert_eq!(validate(&cov).is_ok(), d >= 0.25 - 1e-12);
        }

        #[test]
        fn invariants_survive_rotation(
            nbar in 0.0f64..3.0, r in -1.5f64..1.5, phi0 in 0.0f64..6.3, phi in -10.0f64..10.0,
        ) {
            let s = GaussianState::squeezed_thermal(nbar, r, phi0, 0.0, 0.0).unwrap();
            let a = invariants(s.cov());
            let b = invariants(&s.cov().rotated(phi));
            prop_assert!((a.d - b.d).abs() <= 1e-12 * a.d.max(1.0));
            prop_assert!((a.trace - b.trace).abs() <= 1e-12 * a.trace.max(1.0));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn wigner_integrates_to_two_pi(
            nbar in 0.0f64..2.0, r in -1.0f64..1.0, phi in 0.0f64..3.2,
            q0 in -2.0f64..2.0, p0 in -2.0f64..2.0,
        ) {
            let s = GaussianState::squeezed_thermal(nbar, r, phi, q0, p0).unwrap();
            let (qr, pr) = s.wigner_box(10.0);
            let v = integrate_2d(|q, p| s.wigner(PhaseSpacePoint::new(q, p)), qr, pr, &QuadratureSpec::default()).unwrap();
            prop_assert!((v.value - 2.0 * PI).abs() < 1e-8);
        }
    }
}
