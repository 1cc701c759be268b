use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;

use super::table::{csv_io, csv_line, write_metadata};
use super::SymplecticFrame;
use crate::error::{Error, Result};
use crate::gaussian_state::{GaussianState, PhaseSpacePoint};
use crate::quadrature::pairwise_sum;

/// Allowed deviation of `∫∫ W` from 2π.
pub const NORMALIZATION_SLACK: f64 = 1e-3;

/// Wigner function sampled on a uniform `(q, p)` grid, normalized so that
/// `∫∫ W dq dp = 2π`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    qs: Vec<f64>,
    ps: Vec<f64>,
    /// `values[i][j] = W(qs[i], ps[j])`
    values: Vec<Vec<f64>>,
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|j| lo + h * j as f64).collect()
}

fn grid_step(xs: &[f64]) -> f64 {
    (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64
}

impl WignerGrid {
    pub fn new(qs: Vec<f64>, ps: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        for (name, axis) in [("q", &qs), ("p", &ps)] {
            if axis.len() < 2 {
                return Err(Error::InvalidParameter(format!("{name} grid needs at least two nodes")));
            }
            let h = grid_step(axis);
            if !(h > 0.0 && h.is_finite()) || axis.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
                return Err(Error::InvalidParameter(format!("{name} grid must be uniform and increasing")));
            }
        }
        if values.len() != qs.len() || values.iter().any(|row| row.len() != ps.len()) {
            return Err(Error::InvalidParameter("values must be a qs × ps matrix".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("values must be finite".into()));
        }
        let grid = Self { qs, ps, values };
        let total = grid.integral();
        if (total - 2.0 * PI).abs() > NORMALIZATION_SLACK {
            return Err(Error::InvalidParameter(format!("grid integrates to {total}, expected 2π")));
        }
        Ok(grid)
    }

    /// Samples `f(q, p)` on an `n × n` grid over the given ranges.
    pub fn from_fn<F>(f: F, q_range: (f64, f64), p_range: (f64, f64), n: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        if n < 2 {
            return Err(Error::InvalidParameter("grid needs at least two nodes per axis".into()));
        }
        let qs = uniform_grid(q_range.0, q_range.1, n);
        let ps = uniform_grid(p_range.0, p_range.1, n);
        let values = qs.par_iter().map(|&q| ps.iter().map(|&p| f(q, p)).collect()).collect();
        Self::new(qs, ps, values)
    }

    /// Samples a Gaussian state's Wigner function over its ±`width`σ box.
    pub fn from_state(state: &GaussianState, width: f64, n: usize) -> Result<Self> {
        let (q_range, p_range) = state.wigner_box(width);
        Self::from_fn(|q, p| state.wigner(PhaseSpacePoint::new(q, p)), q_range, p_range, n)
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn q_step(&self) -> f64 {
        grid_step(&self.qs)
    }

    pub fn p_step(&self) -> f64 {
        grid_step(&self.ps)
    }

    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> f64 {
        let trap = |xs: &[f64]| -> f64 {
            let inner: f64 = xs.iter().sum();
            inner - 0.5 * (xs[0] + xs[xs.len() - 1])
        };
        let rows: Vec<f64> = self.values.iter().map(|row| trap(row)).collect();
        trap(&rows) * self.q_step() * self.p_step()
    }

    /// Bilinear interpolation; zero outside the grid.
    pub fn interpolate(&self, q: f64, p: f64) -> f64 {
        let (hq, hp) = (self.q_step(), self.p_step());
        let (u, v) = ((q - self.qs[0]) / hq, (p - self.ps[0]) / hp);
        let (nq, np) = (self.qs.len() - 1, self.ps.len() - 1);
        if !(u >= 0.0 && u <= nq as f64 && v >= 0.0 && v <= np as f64) {
            return 0.0;
        }
        let i = (u.floor() as usize).min(nq - 1);
        let j = (v.floor() as usize).min(np - 1);
        let (s, t) = (u - i as f64, v - j as f64);
        let w = &self.values;
        (1.0 - s) * ((1.0 - t) * w[i][j] + t * w[i][j + 1]) + s * ((1.0 - t) * w[i + 1][j] + t * w[i + 1][j + 1])
    }

    /// Reads CSV with header `q,p,w`, rows sorted by `(q, p)`; `#` lines are
    /// skipped.
    pub fn read_csv<R: Read>(input: R, source_name: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let header = reader.headers().map_err(|e| parse_err(csv_line(&e), e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["q", "p", "w"] {
            let line = header.position().map_or(1, |p| p.line() as usize);
            return Err(parse_err(line, "expected header `q,p,w`".into()));
        }
        let mut qs: Vec<f64> = Vec::new();
        let mut ps: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let field = |idx: usize, name: &str| -> Result<f64> {
                let raw = record.get(idx).unwrap_or("");
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(line, format!("invalid {name} value `{raw}`")))
            };
            let (q, p, w) = (field(0, "q")?, field(1, "p")?, field(2, "w")?);
            if qs.last() != Some(&q) {
                if qs.last().is_some_and(|&last| q < last) {
                    return Err(parse_err(line, format!("q {q} is out of order")));
                }
                if values.len() > 1 && values.last().map(Vec::len) != Some(ps.len()) {
                    return Err(parse_err(line, "previous q row has a different p grid".into()));
                }
                qs.push(q);
                values.push(Vec::new());
            }
            let row = values.last_mut().expect("row pushed above");
            if qs.len() == 1 {
                if ps.last().is_some_and(|&last| p <= last) {
                    return Err(parse_err(line, format!("p {p} is out of order")));
                }
                ps.push(p);
            } else if ps.get(row.len()).is_none_or(|&want| (want - p).abs() > 1e-9 * want.abs().max(1.0)) {
                return Err(parse_err(line, format!("p {p} does not match the p grid of the first row")));
            }
            row.push(w);
        }
        Self::new(qs, ps, values).map_err(|e| match e {
            Error::InvalidParameter(m) => parse_err(0, m),
            other => other,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        write_metadata(&mut out, metadata)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["q", "p", "w"]).map_err(csv_io)?;
        for (q, row) in self.qs.iter().zip(&self.values) {
            for (p, v) in self.ps.iter().zip(row) {
                w.write_record([q.to_string(), p.to_string(), v.to_string()]).map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Symplectic tomogram of a gridded Wigner function at the points `xs`,
/// sampling each line at half the finer grid step.
pub fn radon_forward(grid: &WignerGrid, frame: SymplecticFrame, xs: &[f64]) -> Result<Vec<f64>> {
    let step = 0.5 * grid.q_step().min(grid.p_step());
    radon_forward_with_step(grid, frame, xs, step)
}

/// `w(X, μ, ν) = (1/2π) ∫∫ W(q, p) δ(X − μq − νp) dq dp`, as a trapezoid sum
/// along the line `μq + νp = X` with bilinear interpolation of the grid.
pub fn radon_forward_with_step(grid: &WignerGrid, frame: SymplecticFrame, xs: &[f64], step: f64) -> Result<Vec<f64>> {
    let frame = SymplecticFrame::new(frame.mu, frame.nu)?;
    let half = 0.5 * grid.q_step().min(grid.p_step());
    if !(step > 0.0) || step > half * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse {
            step,
            half_grid_step: half,
        });
    }
    let r = frame.norm_sqr().sqrt();
    let (nq, np) = (frame.mu / r, frame.nu / r);
    // Half-length of the longest chord through the grid rectangle.
    let (q0, q1) = (grid.qs[0], grid.qs[grid.qs.len() - 1]);
    let (p0, p1) = (grid.ps[0], grid.ps[grid.ps.len() - 1]);
    let reach = q0.abs().max(q1.abs()).hypot(p0.abs().max(p1.abs()));
    let n_half = (reach / step).ceil() as i64;
    Ok(xs
        .par_iter()
        .map(|&x| {
            let d = x / r;
            let (cq, cp) = (d * nq, d * np);
            let samples: Vec<f64> = (-n_half..=n_half)
                .map(|j| {
                    let s = j as f64 * step;
                    grid.interpolate(cq - s * np, cp + s * nq)
                })
                .collect();
            // The endpoints lie outside the grid, so the plain sum is the
            // trapezoid rule.
            pairwise_sum(&samples) * step / (2.0 * PI * r)
        })
        .collect())
}
