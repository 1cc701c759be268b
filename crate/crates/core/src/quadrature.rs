//! Numerical integration shared by every transform in the crate.
//!
//! All rules are fixed-order Gauss–Legendre panels or periodic trapezoid
//! grids, refined by doubling until two successive estimates agree. Node
//! evaluations may run in parallel, but every reduction is a pairwise sum
//! over an ordered vector, so results are bit-identical across runs and
//! thread counts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative size of the neglected Gaussian tail when truncating half-line
/// integrals.
pub const TAIL_EPSILON: f64 = 1e-14;

/// Nodes per Gauss–Legendre panel.
pub const PANEL_ORDER: usize = 16;

/// Relative accuracy below which cancellation makes further refinement
/// meaningless.
pub const ROUNDOFF_FLOOR: f64 = 1e-14;

/// Environment variable overriding the default relative tolerance.
pub const RTOL_ENV: &str = "TOMO_QUAD_RTOL";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: usize,
    pub initial_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_refinements: 10,
            initial_nodes: 32,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_refinements: usize, initial_nodes: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_refinements,
            initial_nodes,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default spec, with the relative tolerance taken from `TOMO_QUAD_RTOL`
    /// when that variable is set.
    pub fn from_env() -> Result<Self> {
        let mut spec = Self::default();
        if let Ok(raw) = std::env::var(RTOL_ENV) {
            spec.rel_tol = raw.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{RTOL_ENV}={raw:?} is not a number"))
            })?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_refinements < 1 {
            return Err(Error::InvalidParameter("max_refinements must be at least 1".into()));
        }
        if self.initial_nodes < 1 {
            return Err(Error::InvalidParameter("initial_nodes must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    /// Acceptable difference between successive estimates of magnitude `scale`.
    pub fn tolerance(&self, scale: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * scale)
    }

    /// Tail fraction used for truncating Gaussian-damped domains.
    pub fn tail_epsilon(&self) -> f64 {
        TAIL_EPSILON.min(self.abs_tol / 10.0)
    }

    fn initial_panels(&self) -> usize {
        self.initial_nodes.div_ceil(PANEL_ORDER).max(1)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    /// Error estimate after each refinement, oldest first.
    pub history: Vec<f64>,
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "Gauss-Legendre order must be positive");
        if order == 1 {
            return Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            };
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and its derivative.
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = nf * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }
}

/// Composite Gauss–Legendre rule over `[a, b]` split into equal panels.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let base = GaussLegendre::new(order);
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for (x, w) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Equispaced periodic nodes `2πj/n` with uniform weight `2π/n`.
pub fn periodic_nodes(n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 * PI / n as f64;
    ((0..n).map(|j| h * j as f64).collect(), h)
}

pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Component-wise pairwise sum of `rows` records of length `dim` stored
/// back to back in `flat`.
fn pairwise_reduce_flat<T>(flat: &[T], dim: usize, sum: fn(&[T]) -> T) -> Vec<T>
where
    T: Copy,
{
    if dim == 0 {
        return Vec::new();
    }
    let rows = flat.len() / dim;
    let mut column = Vec::with_capacity(rows);
    (0..dim)
        .map(|d| {
            column.clear();
            column.extend((0..rows).map(|r| flat[r * dim + d]));
            sum(&column)
        })
        .collect()
}

fn max_abs_diff_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_norm_c(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn max_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Truncation point of a half-line integral whose integrand decays like
/// `exp(-(k / damping_scale)^2)`.
pub fn damped_cutoff(damping_scale: f64, epsilon: f64) -> f64 {
    damping_scale * (1.0 / epsilon).ln().sqrt()
}

/// `∫_0^b f(k) dk` by composite Gauss–Legendre with panel doubling.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    spec.validate()?;
    // Returns the integral and the integral of |f|; the latter sets the
    // roundoff floor when the integral cancels to near zero.
    let eval = |panels: usize| {
        let rule = CompositeRule::new(a, b, panels, PANEL_ORDER);
        let terms: Vec<Complex64> = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(&x, &w)| f(x) * w)
            .collect();
        let magnitudes: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
        (pairwise_sum_complex(&terms), pairwise_sum(&magnitudes))
    };
    let mut panels = spec.initial_panels();
    let (mut current, _) = eval(panels);
    let mut history = Vec::new();
    for _ in 0..spec.max_refinements {
        panels *= 2;
        let (next, magnitude) = eval(panels);
        let err = (next - current).norm();
        history.push(err);
        current = next;
        if err <= spec.tolerance(current.norm()).max(ROUNDOFF_FLOOR * magnitude) {
            return Ok(Integral {
                value: current,
                error_estimate: err,
                history,
            });
        }
    }
    Err(Error::QuadratureFailure {
        what: format!("interval [{a}, {b}]"),
        estimate: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// `∫_0^∞ f(k) dk` for integrands damped like `exp(-(k / damping_scale)^2)`.
///
/// The domain is cut where the damping falls below the tail fraction, then
/// integrated by panel-doubling Gauss–Legendre.
pub fn integrate_damped_halfline<F>(f: F, damping_scale: f64, spec: &QuadratureSpec) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(damping_scale > 0.0 && damping_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "damping scale must be positive, got {damping_scale}"
        )));
    }
    let k_max = damped_cutoff(damping_scale, spec.tail_epsilon());
    integrate_interval(f, 0.0, k_max, spec)
}

/// `∫_0^{2π} f(θ) dθ` for 2π-periodic integrands by trapezoid doubling.
pub fn integrate_periodic<F>(f: F, spec: &QuadratureSpec) -> Result<Integral<Complex64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    spec.validate()?;
    let mut n = spec.initial_nodes.max(2);
    let (nodes, h) = periodic_nodes(n);
    let mut values: Vec<Complex64> = nodes.par_iter().map(|&t| f(t)).collect();
    let mut current = pairwise_sum_complex(&values) * h;
    let mut history = Vec::new();
    for _ in 0..spec.max_refinements {
        // Doubling keeps the old nodes; only midpoints are new.
        let h_new = 2.0 * PI / (2 * n) as f64;
        let mids: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|j| f(h_new * (2 * j + 1) as f64))
            .collect();
        let mut merged = Vec::with_capacity(2 * n);
        for (old, mid) in values.iter().zip(&mids) {
            merged.push(*old);
            merged.push(*mid);
        }
        values = merged;
        n *= 2;
        let next = pairwise_sum_complex(&values) * h_new;
        let err = (next - current).norm();
        history.push(err);
        current = next;
        if err <= spec.tolerance(current.norm()) {
            return Ok(Integral {
                value: current,
                error_estimate: err,
                history,
            });
        }
    }
    Err(Error::QuadratureFailure {
        what: "periodic integral".into(),
        estimate: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Vector-valued tensor-product integral over a rectangle.
///
/// `f(q, p, out)` adds nothing: it must overwrite all `dim` entries of `out`.
pub fn integrate_2d_many<F>(
    f: F,
    dim: usize,
    q_range: (f64, f64),
    p_range: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<Integral<Vec<f64>>>
where
    F: Fn(f64, f64, &mut [f64]) + Sync,
{
    spec.validate()?;
    for (lo, hi) in [q_range, p_range] {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::InvalidParameter(format!("invalid integration range [{lo}, {hi}]")));
        }
    }
    let eval = |panels: usize| -> Vec<f64> {
        let qr = CompositeRule::new(q_range.0, q_range.1, panels, PANEL_ORDER);
        let pr = CompositeRule::new(p_range.0, p_range.1, panels, PANEL_ORDER);
        let rows: Vec<Vec<f64>> = qr
            .nodes
            .par_iter()
            .zip(qr.weights.par_iter())
            .map(|(&q, &wq)| {
                let mut flat = vec![0.0; dim * pr.len()];
                for ((&p, &wp), out) in pr.nodes.iter().zip(&pr.weights).zip(flat.chunks_mut(dim)) {
                    f(q, p, out);
                    out.iter_mut().for_each(|v| *v *= wq * wp);
                }
                pairwise_reduce_flat(&flat, dim, pairwise_sum)
            })
            .collect();
        pairwise_reduce_flat(&rows.concat(), dim, pairwise_sum)
    };
    let mut panels = spec.initial_panels();
    let mut current = eval(panels);
    let mut history = Vec::new();
    for _ in 0..spec.max_refinements {
        panels *= 2;
        let next = eval(panels);
        let err = max_abs_diff(&next, &current);
        history.push(err);
        current = next;
        if err <= spec.tolerance(max_norm(&current)) {
            return Ok(Integral {
                value: current,
                error_estimate: err,
                history,
            });
        }
    }
    Err(Error::QuadratureFailure {
        what: "2d integral".into(),
        estimate: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

/// Scalar tensor-product integral over a rectangle.
pub fn integrate_2d<F>(f: F, q_range: (f64, f64), p_range: (f64, f64), spec: &QuadratureSpec) -> Result<Integral<f64>>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let res = integrate_2d_many(|q, p, out| out[0] = f(q, p), 1, q_range, p_range, spec)?;
    Ok(Integral {
        value: res.value[0],
        error_estimate: res.error_estimate,
        history: res.history,
    })
}

/// Vector-valued integral over the disc of radius `k_max` in polar form,
/// `∫_0^{k_max} dk ∫_0^{2π} dθ f(k, θ)`, with `f` writing `dim` values.
///
/// The radial rule is composite Gauss–Legendre and the angular rule is the
/// periodic trapezoid; the two are refined independently by doubling
/// whichever one still changes the result. The Jacobian is the caller's.
pub fn integrate_polar_many<F>(f: F, dim: usize, k_max: f64, spec: &QuadratureSpec) -> Result<Integral<Vec<Complex64>>>
where
    F: Fn(f64, f64, &mut [Complex64]) + Sync,
{
    integrate_polar_from(f, dim, k_max, AngularNodes::Adaptive(spec.initial_nodes.max(4)), spec)
}

/// Angular grid of a polar integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularNodes {
    /// Start from this many equispaced angles and refine.
    Adaptive(usize),
    /// Use exactly this many equispaced angles; only the radial rule refines.
    Fixed(usize),
}

/// As [`integrate_polar_many`] with a chosen angular grid.
pub fn integrate_polar_from<F>(
    f: F,
    dim: usize,
    k_max: f64,
    angles: AngularNodes,
    spec: &QuadratureSpec,
) -> Result<Integral<Vec<Complex64>>>
where
    F: Fn(f64, f64, &mut [Complex64]) + Sync,
{
    spec.validate()?;
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("radial cutoff must be positive, got {k_max}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let eval = |n_theta: usize, panels: usize| -> Vec<Complex64> {
        let kr = CompositeRule::new(0.0, k_max, panels, PANEL_ORDER);
        let (thetas, h) = periodic_nodes(n_theta);
        let rows: Vec<Vec<Complex64>> = kr
            .nodes
            .par_iter()
            .zip(kr.weights.par_iter())
            .map(|(&k, &wk)| {
                let mut flat = vec![zero; dim * thetas.len()];
                for (&t, out) in thetas.iter().zip(flat.chunks_mut(dim)) {
                    f(k, t, out);
                    out.iter_mut().for_each(|v| *v *= wk * h);
                }
                pairwise_reduce_flat(&flat, dim, pairwise_sum_complex)
            })
            .collect();
        pairwise_reduce_flat(&rows.concat(), dim, pairwise_sum_complex)
    };

    let (mut n_theta, fixed) = match angles {
        AngularNodes::Adaptive(n) => (n.max(2), false),
        AngularNodes::Fixed(n) => (n.max(1), true),
    };
    let mut panels = spec.initial_panels();
    let mut current = eval(n_theta, panels);
    let mut history = Vec::new();
    for _ in 0..spec.max_refinements {
        let theta_refined = if fixed { current.clone() } else { eval(2 * n_theta, panels) };
        let radial_refined = eval(n_theta, 2 * panels);
        let tol = spec.tolerance(max_norm_c(&current));
        let d_theta = max_abs_diff_c(&theta_refined, &current);
        let d_radial = max_abs_diff_c(&radial_refined, &current);
        let err = d_theta.max(d_radial);
        history.push(err);
        if err <= tol {
            // Both refinements agree with the current grid; report the
            // finer of the two as the value.
            let value = if d_theta >= d_radial { theta_refined } else { radial_refined };
            return Ok(Integral {
                value,
                error_estimate: err,
                history,
            });
        }
        if d_theta > tol {
            n_theta *= 2;
        }
        if d_radial > tol {
            panels *= 2;
        }
        current = match (d_theta > tol, d_radial > tol) {
            (true, false) => theta_refined,
            (false, true) => radial_refined,
            _ => eval(n_theta, panels),
        };
    }
    Err(Error::QuadratureFailure {
        what: format!("polar integral (k_max = {k_max}, {n_theta} angles, {panels} radial panels)"),
        estimate: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(16);
        let sum: f64 = rule.weights.iter().sum();
        assert_abs_diff_eq!(sum, 2.0, epsilon = 1e-14);
        // degree 30 is the highest exact degree for 16 nodes
        let m: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(30)).sum();
        assert_abs_diff_eq!(m, 2.0 / 31.0, epsilon = 1e-14);
        for order in 1..6 {
            let r = GaussLegendre::new(order);
            let s: f64 = r.weights.iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn damped_halfline_ground_state_reduction() {
        // ∫ k exp(-k²/2) dk = 1
        let spec = QuadratureSpec::default();
        let r = integrate_damped_halfline(|k| c(k * (-k * k / 2.0).exp()), 2f64.sqrt(), &spec).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn damped_halfline_gaussian_and_third_moment() {
        let spec = QuadratureSpec::default();
        let r = integrate_damped_halfline(|k| c((-k * k).exp()), 1.0, &spec).unwrap();
        assert_abs_diff_eq!(r.value.re, PI.sqrt() / 2.0, epsilon = 1e-12);
        // integration by parts: ∫ k³ e^{-k²/2} = 2 ∫ k e^{-k²/2} = 2
        let r = integrate_damped_halfline(|k| c(k.powi(3) * (-k * k / 2.0).exp()), 2f64.sqrt(), &spec).unwrap();
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-11);
    }

    /// I₀(1) from its power series Σ (1/4)^j / (j!)².
    fn bessel_i0_one() -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..40 {
            term *= 0.25 / (j as f64 * j as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn periodic_examples() {
        let spec = QuadratureSpec::default();
        let one = integrate_periodic(|_| c(1.0), &spec).unwrap();
        assert_abs_diff_eq!(one.value.re, 2.0 * PI, epsilon = 1e-13);
        let cos = integrate_periodic(|t| c(t.cos()), &spec).unwrap();
        assert_abs_diff_eq!(cos.value.norm(), 0.0, epsilon = 1e-13);
        let e = integrate_periodic(|t| c(t.cos().exp()), &spec).unwrap();
        let expected = 2.0 * PI * bessel_i0_one();
        assert_abs_diff_eq!(e.value.re, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 7.95493, epsilon = 1e-5);
    }

    #[test]
    fn two_dimensional_examples() {
        let spec = QuadratureSpec::default();
        let unit = integrate_2d(|_, _| 1.0, (0.0, 1.0), (0.0, 1.0), &spec).unwrap();
        assert_abs_diff_eq!(unit.value, 1.0, epsilon = 1e-14);
        let g = integrate_2d(|q, p| (-q * q - p * p).exp(), (-8.0, 8.0), (-8.0, 8.0), &spec).unwrap();
        assert_abs_diff_eq!(g.value, PI, epsilon = 1e-10);
        // vacuum Wigner function, ∫ W = 2π
        let w = integrate_2d(|q, p| 2.0 * (-q * q - p * p).exp(), (-9.0, 9.0), (-9.0, 9.0), &spec).unwrap();
        assert_abs_diff_eq!(w.value, 2.0 * PI, epsilon = 1e-8);
    }

    #[test]
    fn polar_disc_area_and_gaussian() {
        let spec = QuadratureSpec::default();
        // area of the unit disc with Jacobian k
        let area = integrate_polar_many(|k, _, out| out[0] = c(k), 1, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(area.value[0].re, PI, epsilon = 1e-12);
        let g = integrate_polar_many(|k, t, out| out[0] = c(k * (-k * k).exp() * (1.0 + t.sin())), 1, 7.0, &spec).unwrap();
        assert_abs_diff_eq!(g.value[0].re, PI, epsilon = 1e-12);
    }

    #[test]
    fn refinement_error_estimates_decrease() {
        let spec = QuadratureSpec {
            initial_nodes: 4,
            ..QuadratureSpec::default()
        };
        let r = integrate_damped_halfline(|k| c((k * 3.0).cos() * (-k * k / 4.0).exp()), 2.0, &spec).unwrap();
        assert!(r.history.len() >= 2);
        for w in r.history.windows(2) {
            assert!(w[1] <= w[0], "history not decreasing: {:?}", r.history);
        }
        let p = integrate_periodic(|t| c((2.0 * t.cos()).exp()), &spec).unwrap();
        for w in p.history.windows(2) {
            assert!(w[1] <= w[0], "history not decreasing: {:?}", p.history);
        }
    }

    #[test]
    fn results_are_bit_identical() {
        let spec = QuadratureSpec::default();
        let f = |q: f64, p: f64| (q.sin() * p).exp() * (-q * q - p * p).exp();
        let a = integrate_2d(f, (-5.0, 5.0), (-5.0, 5.0), &spec).unwrap();
        let b = integrate_2d(f, (-5.0, 5.0), (-5.0, 5.0), &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn failure_after_max_refinements() {
        let spec = QuadratureSpec {
            max_refinements: 1,
            initial_nodes: 1,
            ..QuadratureSpec::default()
        };
        let err = integrate_interval(|k| c((200.0 * k).sin()), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, Error::QuadratureFailure { .. }));
    }

    #[test]
    fn invalid_spec_rejected() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 4, 8).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 0, 8).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 3, 8).is_ok());
    }
}
