//! Associated Laguerre, physicists' Hermite and two-variable Hermite
//! polynomials.
//!
//! The two-variable polynomials `H_mn^{R}` are defined by the generating
//! function
//!
//! ```text
//! exp[−½(R₁₁β*² + R₂₂α² + 2R₁₂αβ*) + a₁β* + a₂α] = Σ_{m,n} H_mn α^n β*^m / (m! n!)
//! ```
//!
//! with `m` counting powers of β* and `n` powers of α. Differentiating in β*
//! and α gives the two recurrences used by [`hermite2d_diag`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by [`hermite2d_oracle`].
pub const ORACLE_MAX_ORDER: usize = 12;

/// Largest factorial that fits in an `f64`.
const MAX_FACTORIAL_ORDER: usize = 170;

const HERMITIAN_TOL: f64 = 1e-12;

/// Relative size of the imaginary part tolerated on the diagonal for
/// Hermitian parameters.
pub const DIAGONAL_IMAG_TOL: f64 = 1e-10;

/// Associated Laguerre polynomial `L_n^{α}(x)` by upward recurrence in `n`.
pub fn laguerre(n: usize, alpha: i64, x: f64) -> Result<f64> {
    if (n as i64) + alpha < 0 {
        return Err(Error::InvalidOrder { n, alpha });
    }
    Ok(laguerre_unchecked(n, alpha as f64, x))
}

fn laguerre_unchecked(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^{α}(x), …, L_{n_max}^{α}(x)` in one pass.
pub fn laguerre_sequence(n_max: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Smallest `u` past which `e^{−u/2} |L_n(u)| < eps` for every `n ≤ n_max`,
/// from the bound `|L_n(u)| ≤ Σ_j C(n, j) u^j / j!`.
pub fn laguerre_envelope_cutoff(n_max: usize, eps: f64) -> f64 {
    let bound = |u: f64| -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..=n_max {
            term *= (n_max + 1 - j) as f64 / j as f64 * u / j as f64;
            sum += term;
        }
        (-u / 2.0).exp() * sum
    };
    // The bound peaks below u = 2 n_max; search from there.
    let mut u = 2.0 * n_max as f64;
    while bound(u) >= eps {
        u += 0.25;
    }
    u
}

/// Physicists' Hermite polynomial `H_m(x)`.
pub fn hermite_phys(m: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..m {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Matrix `R` and linear coefficients `a` of the generating function.
///
/// For the parameters arising from a physical state, `R₂₂ = R₁₁*`,
/// `a₂ = a₁*` and `R₁₂` is real; [`HermiteParams::new`] enforces this.
/// [`HermiteParams::general`] skips the check and accepts arbitrary complex
/// entries, for which the diagonal is complex in general.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteParams {
    pub r11: Complex64,
    pub r12: Complex64,
    pub r22: Complex64,
    pub a1: Complex64,
    pub a2: Complex64,
}

impl HermiteParams {
    pub fn new(r11: Complex64, r12: f64, r22: Complex64, a1: Complex64, a2: Complex64) -> Result<Self> {
        let params = Self::general(r11, Complex64::new(r12, 0.0), r22, a1, a2)?;
        let scale = 1.0 + r11.norm() + a1.norm();
        if (r22 - r11.conj()).norm() > HERMITIAN_TOL * scale || (a2 - a1.conj()).norm() > HERMITIAN_TOL * scale {
            return Err(Error::InvalidParameter(format!(
                "Hermite parameters must satisfy r22 = conj(r11), a2 = conj(a1): {params:?}"
            )));
        }
        Ok(params)
    }

    /// Hermitian parameters from `R₁₁`, `R₁₂` and `a₁`.
    pub fn hermitian(r11: Complex64, r12: f64, a1: Complex64) -> Result<Self> {
        Self::new(r11, r12, r11.conj(), a1, a1.conj())
    }

    pub fn general(r11: Complex64, r12: Complex64, r22: Complex64, a1: Complex64, a2: Complex64) -> Result<Self> {
        let all_finite = [r11, r12, r22, a1, a2].iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter("Hermite parameters must be finite".into()));
        }
        Ok(Self { r11, r12, r22, a1, a2 })
    }

    pub fn is_hermitian(&self) -> bool {
        let scale = 1.0 + self.r11.norm() + self.a1.norm();
        (self.r22 - self.r11.conj()).norm() <= HERMITIAN_TOL * scale
            && (self.a2 - self.a1.conj()).norm() <= HERMITIAN_TOL * scale
            && self.r12.im.abs() <= HERMITIAN_TOL * (1.0 + self.r12.norm())
    }
}

/// Row-major `(n_max+1)²` triangle of `H_mn / √(m! n!)`.
///
/// The rescaled recurrences are
/// `G_{m+1,n} = (a₁G_mn − √m R₁₁G_{m−1,n} − √n R₁₂G_{m,n−1}) / √(m+1)` and
/// `G_{m,n+1} = (a₂G_mn − √n R₂₂G_{m,n−1} − √m R₁₂G_{m−1,n}) / √(n+1)`;
/// they are the plain recurrences divided through by `√((m+1)! n!)`.
pub fn hermite2d_scaled_triangle(params: &HermiteParams, n_max: usize) -> Vec<Vec<Complex64>> {
    let size = n_max + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut g = vec![vec![zero; size]; size];
    let sqrt: Vec<f64> = (0..=size).map(|k| (k as f64).sqrt()).collect();
    g[0][0] = Complex64::new(1.0, 0.0);
    // m = 0 row via the α recurrence
    for n in 0..n_max {
        let lower = if n > 0 { g[0][n - 1] } else { zero };
        g[0][n + 1] = (params.a2 * g[0][n] - params.r22 * sqrt[n] * lower) / sqrt[n + 1];
    }
    // remaining rows via the β* recurrence
    for m in 0..n_max {
        for n in 0..size {
            let down_m = if m > 0 { g[m - 1][n] } else { zero };
            let down_n = if n > 0 { g[m][n - 1] } else { zero };
            g[m + 1][n] =
                (params.a1 * g[m][n] - params.r11 * sqrt[m] * down_m - params.r12 * sqrt[n] * down_n) / sqrt[m + 1];
        }
    }
    g
}

/// Diagonal `H_mm / m!` for `m = 0..=n_max`, free of factorial overflow.
pub fn hermite2d_diag_scaled(params: &HermiteParams, n_max: usize) -> Vec<Complex64> {
    let g = hermite2d_scaled_triangle(params, n_max);
    (0..=n_max).map(|m| g[m][m]).collect()
}

/// Real diagonal `H_mm / m!` for Hermitian parameters.
///
/// Fails if an imaginary part exceeds [`DIAGONAL_IMAG_TOL`] relative to the
/// largest diagonal entry; entries that vanish by symmetry carry only
/// roundoff, so a per-entry relative test would be meaningless for them.
pub fn hermite2d_diag_scaled_real(params: &HermiteParams, n_max: usize) -> Result<Vec<f64>> {
    if !params.is_hermitian() {
        return Err(Error::InvalidParameter("real diagonal requires Hermitian parameters".into()));
    }
    let diag = hermite2d_diag_scaled(params, n_max);
    let scale = diag.iter().map(|h| h.norm()).fold(0.0, f64::max);
    let limit = DIAGONAL_IMAG_TOL * scale;
    diag.into_iter()
        .map(|h| {
            if h.im.abs() > limit {
                Err(Error::ImaginaryResidual {
                    residual: h.im.abs(),
                    limit,
                })
            } else {
                Ok(h.re)
            }
        })
        .collect()
}

/// Diagonal `H_mm` for `m = 0..=n_max`.
pub fn hermite2d_diag(params: &HermiteParams, n_max: usize) -> Result<Vec<Complex64>> {
    if n_max > MAX_FACTORIAL_ORDER {
        return Err(Error::OrderTooLarge {
            order: n_max,
            max: MAX_FACTORIAL_ORDER,
        });
    }
    let mut factorial = 1.0;
    Ok(hermite2d_diag_scaled(params, n_max)
        .into_iter()
        .enumerate()
        .map(|(m, g)| {
            if m > 0 {
                factorial *= m as f64;
            }
            g * factorial
        })
        .collect())
}

/// `H_mn` by direct expansion of the generating function.
///
/// Writes the exponent as five monomials `c_j β*^{b_j} α^{a_j}`, expands
/// `exp` of each as its power series and collects the coefficient of
/// `α^n β*^m`, then multiplies by `m! n!`. Independent of the recurrences.
pub fn hermite2d_oracle(params: &HermiteParams, m: usize, n: usize) -> Result<Complex64> {
    let max = m.max(n);
    if max > ORACLE_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: max,
            max: ORACLE_MAX_ORDER,
        });
    }
    let fact: Vec<f64> = (0..=2 * ORACLE_MAX_ORDER)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();
    let pow = |c: Complex64, e: usize| -> Complex64 { (0..e).fold(Complex64::new(1.0, 0.0), |acc, _| acc * c) };
    let c_bb = -0.5 * params.r11; // β*²
    let c_aa = -0.5 * params.r22; // α²
    let c_ab = -params.r12; // αβ*
    let mut total = Complex64::new(0.0, 0.0);
    // i: power of β*², j: power of α², k: power of αβ*; the linear terms
    // take up the remaining degrees.
    for i in 0..=m / 2 {
        for j in 0..=n / 2 {
            for k in 0..=(m - 2 * i).min(n - 2 * j) {
                let l = m - 2 * i - k; // a₁β*
                let o = n - 2 * j - k; // a₂α
                let term = pow(c_bb, i) / fact[i]
                    * (pow(c_aa, j) / fact[j])
                    * (pow(c_ab, k) / fact[k])
                    * (pow(params.a1, l) / fact[l])
                    * (pow(params.a2, o) / fact[o]);
                total += term;
            }
        }
    }
    Ok(total * fact[m] * fact[n])
}
