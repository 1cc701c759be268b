use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;

use super::OpticalTomogram;
use crate::error::{Error, Result};

/// Allowed deviation of each row's trapezoid integral from one.
pub const NORMALIZATION_SLACK: f64 = 1e-3;

/// Relative deviation tolerated between grid spacings.
const UNIFORM_SLACK: f64 = 1e-6;

/// Optical tomogram sampled on a uniform `X` grid at a sorted set of angles.
///
/// As a tomogram it interpolates linearly in `X` (zero outside the grid) and
/// cyclically linearly in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TomogramTable {
    thetas: Vec<f64>,
    xs: Vec<f64>,
    /// Row per angle.
    values: Vec<Vec<f64>>,
}

impl TomogramTable {
    pub fn new(thetas: Vec<f64>, xs: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let table = Self { thetas, xs, values };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.thetas.is_empty() {
            return Err(Error::InvalidParameter("table has no angles".into()));
        }
        if self.xs.len() < 2 {
            return Err(Error::InvalidParameter("table needs at least two X nodes".into()));
        }
        for pair in self.thetas.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidParameter("angles must be strictly increasing".into()));
            }
        }
        if let (Some(&first), Some(&last)) = (self.thetas.first(), self.thetas.last()) {
            if !(first >= 0.0 && last < 2.0 * PI) {
                return Err(Error::InvalidParameter("angles must lie in [0, 2π)".into()));
            }
        }
        let h = self.step();
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter("X grid must be increasing".into()));
        }
        for (j, pair) in self.xs.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - h).abs() > UNIFORM_SLACK * h {
                return Err(Error::InvalidParameter(format!("X grid is not uniform at index {}", j + 1)));
            }
        }
        if self.values.len() != self.thetas.len() {
            return Err(Error::InvalidParameter("one row of values is needed per angle".into()));
        }
        for (i, row) in self.values.iter().enumerate() {
            if row.len() != self.xs.len() {
                return Err(Error::InvalidParameter(format!("row {i} has {} values, expected {}", row.len(), self.xs.len())));
            }
            if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidParameter(format!("row {i} contains the invalid density {v}")));
            }
            let total = self.row_integral(i);
            if (total - 1.0).abs() > NORMALIZATION_SLACK {
                return Err(Error::InvalidParameter(format!(
                    "row {i} (theta = {}) integrates to {total}",
                    self.thetas[i]
                )));
            }
        }
        Ok(())
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64
    }

    /// Trapezoid integral of row `i` over the grid.
    pub fn row_integral(&self, i: usize) -> f64 {
        let row = &self.values[i];
        let inner: f64 = row.iter().sum();
        self.step() * (inner - 0.5 * (row[0] + row[row.len() - 1]))
    }

    /// Whether the angles are `2πj/n` for `j = 0..n`.
    fn is_equispaced(&self) -> bool {
        let n = self.thetas.len() as f64;
        self.thetas
            .iter()
            .enumerate()
            .all(|(j, t)| (t - 2.0 * PI * j as f64 / n).abs() < 1e-9)
    }

    /// Neighbouring rows and the weight of the second, cyclically in θ.
    fn bracket(&self, theta: f64) -> (usize, usize, f64) {
        let n = self.thetas.len();
        if n == 1 {
            return (0, 0, 0.0);
        }
        let t = theta.rem_euclid(2.0 * PI);
        let upper = self.thetas.partition_point(|&a| a <= t);
        let (i0, i1) = match upper {
            0 => (n - 1, 0),
            u if u == n => (n - 1, 0),
            u => (u - 1, u),
        };
        let t0 = self.thetas[i0];
        let mut t1 = self.thetas[i1];
        if i1 <= i0 {
            t1 += 2.0 * PI;
        }
        let tt = if t < t0 { t + 2.0 * PI } else { t };
        (i0, i1, (tt - t0) / (t1 - t0))
    }

    fn row_density(&self, i: usize, x: f64) -> f64 {
        let h = self.step();
        let pos = (x - self.xs[0]) / h;
        let last = self.xs.len() - 1;
        if !(pos >= 0.0 && pos <= last as f64) {
            return 0.0;
        }
        let j = (pos.floor() as usize).min(last - 1);
        let frac = pos - j as f64;
        let row = &self.values[i];
        row[j] * (1.0 - frac) + row[j + 1] * frac
    }

    /// Exact `∫ e^{ikX} f(X) dX` of the piecewise-linear interpolant of row `i`.
    fn row_characteristic(&self, i: usize, k: f64) -> Complex64 {
        let h = self.step();
        let z = Complex64::new(0.0, k * h);
        let (phi1, psi) = segment_weights(z);
        let row = &self.values[i];
        let step = Complex64::from_polar(1.0, k * h);
        let mut phase = Complex64::from_polar(1.0, k * self.xs[0]);
        let mut sum = Complex64::new(0.0, 0.0);
        for pair in row.windows(2) {
            sum += phase * (pair[0] * phi1 + (pair[1] - pair[0]) * psi);
            phase *= step;
        }
        h * sum
    }

    /// Averages each row with the mirrored row at `θ + π`, enforcing
    /// `w(X, θ + π) = w(−X, θ)`. Needs an even number of equispaced angles
    /// and an `X` grid symmetric about zero.
    ///
    /// Makes the characteristic function satisfy `F(k, θ + π) = F(k, θ)*`
    /// exactly, so that sampled data yield real photon-number tomograms.
    pub fn symmetrized(&self) -> Result<Self> {
        let n = self.thetas.len();
        if !n.is_multiple_of(2) || !self.is_equispaced() {
            return Err(Error::InvalidParameter(
                "symmetrization needs an even number of equispaced angles".into(),
            ));
        }
        let last = self.xs.len() - 1;
        let h = self.step();
        if (0..=last).any(|j| (self.xs[j] + self.xs[last - j]).abs() > 1e-9 * h) {
            return Err(Error::InvalidParameter("symmetrization needs an X grid symmetric about zero".into()));
        }
        let values = (0..n)
            .map(|i| {
                let mirror = &self.values[(i + n / 2) % n];
                self.values[i]
                    .iter()
                    .enumerate()
                    .map(|(j, v)| 0.5 * (v + mirror[last - j]))
                    .collect()
            })
            .collect();
        Self::new(self.thetas.clone(), self.xs.clone(), values)
    }

    /// Reads the CSV format `theta,x,w`, rows sorted by `(theta, x)`. Lines
    /// starting with `#` are skipped. Errors name the offending line.
    pub fn read_csv<R: Read>(input: R, source_name: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let header = reader.headers().map_err(|e| parse_err(csv_line(&e), e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["theta", "x", "w"] {
            let line = header.position().map_or(1, |p| p.line() as usize);
            return Err(parse_err(line, format!("expected header `theta,x,w`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
        }
        let mut thetas: Vec<f64> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut first_line_of_row = 0;
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
            let (theta, x, w) = (field(0, "theta")?, field(1, "x")?, field(2, "w")?);
            if w < 0.0 {
                return Err(parse_err(line, format!("negative density {w}")));
            }
            match thetas.last() {
                Some(&t) if t == theta => {}
                Some(&t) if theta < t => {
                    return Err(parse_err(line, format!("theta {theta} is out of order")));
                }
                prev => {
                    if prev.is_some() && values.last().map(Vec::len) != Some(xs.len()) {
                        return Err(parse_err(first_line_of_row, "angle has a different X grid than the first angle".into()));
                    }
                    thetas.push(theta);
                    values.push(Vec::new());
                    first_line_of_row = line;
                }
            }
            let row = values.last_mut().expect("row pushed above");
            let j = row.len();
            if thetas.len() == 1 {
                if xs.last().is_some_and(|&last| x <= last) {
                    return Err(parse_err(line, format!("x {x} is out of order")));
                }
                xs.push(x);
            } else if xs.get(j).is_none_or(|&want| (want - x).abs() > 1e-9 * want.abs().max(1.0)) {
                return Err(parse_err(line, format!("x {x} does not match the X grid of the first angle")));
            }
            row.push(w);
        }
        if values.last().map(Vec::len).is_some_and(|n| n != xs.len()) {
            return Err(parse_err(first_line_of_row, "angle has a different X grid than the first angle".into()));
        }
        Self::new(thetas, xs, values).map_err(|e| match e {
            Error::InvalidParameter(m) => parse_err(0, m),
            other => other,
        })
    }

    /// Writes the CSV format with optional `# key: value` comment lines first.
    pub fn write_csv<W: Write>(&self, mut out: W, metadata: &[(String, String)]) -> Result<()> {
        write_metadata(&mut out, metadata)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["theta", "x", "w"]).map_err(csv_io)?;
        for (theta, row) in self.thetas.iter().zip(&self.values) {
            for (x, v) in self.xs.iter().zip(row) {
                w.write_record([theta.to_string(), x.to_string(), v.to_string()]).map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// `φ₁(z) = (e^z − 1)/z` and `ψ(z) = (e^z(z − 1) + 1)/z²`, the weights of
/// the constant and linear parts of a segment, with series near zero.
fn segment_weights(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 1e-2 {
        // φ₁ = Σ z^j/(j+1)!, ψ = Σ z^j/(j!(j+2))
        let mut phi1 = Complex64::new(0.0, 0.0);
        let mut psi = Complex64::new(0.0, 0.0);
        let mut zj_over_fact = Complex64::new(1.0, 0.0);
        for j in 0..8 {
            phi1 += zj_over_fact / (j + 1) as f64;
            psi += zj_over_fact / (j + 2) as f64;
            zj_over_fact *= z / (j + 1) as f64;
        }
        (phi1, psi)
    } else {
        let e = z.exp();
        ((e - 1.0) / z, (e * (z - 1.0) + 1.0) / (z * z))
    }
}

pub(crate) fn csv_line(e: &csv::Error) -> usize {
    e.position().map_or(0, |p| p.line() as usize)
}

pub(crate) fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub(crate) fn write_metadata<W: Write>(out: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (key, value) in metadata {
        writeln!(out, "# {key}: {value}")?;
    }
    Ok(())
}

impl OpticalTomogram for TomogramTable {
    fn density(&self, x: f64, theta: f64) -> f64 {
        let (i0, i1, t) = self.bracket(theta);
        let a = self.row_density(i0, x);
        if t == 0.0 {
            return a;
        }
        a * (1.0 - t) + self.row_density(i1, x) * t
    }

    fn support(&self, _theta: f64) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn closed_form_characteristic(&self, k: f64, theta: f64) -> Option<Complex64> {
        let (i0, i1, t) = self.bracket(theta);
        let a = self.row_characteristic(i0, k);
        Some(if t == 0.0 {
            a
        } else {
            a * (1.0 - t) + self.row_characteristic(i1, k) * t
        })
    }

    fn angle_grid(&self) -> Option<usize> {
        self.is_equispaced().then_some(self.thetas.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_interval, QuadratureSpec};
    use approx::assert_abs_diff_eq;

    fn vacuum_table(n_angles: usize) -> TomogramTable {
        let xs: Vec<f64> = (0..=400).map(|j| -8.0 + 0.04 * j as f64).collect();
        let row: Vec<f64> = xs.iter().map(|x| (-x * x).exp() / PI.sqrt()).collect();
        let thetas = (0..n_angles).map(|j| 2.0 * PI * j as f64 / n_angles as f64).collect();
        TomogramTable::new(thetas, xs, vec![row; n_angles]).unwrap()
    }

    #[test]
    fn interpolation() {
        let t = TomogramTable::new(
            vec![0.0, PI],
            vec![0.0, 1.0, 2.0],
            vec![vec![0.0, 1.0, 0.0], vec![0.5, 0.5, 0.5]],
        )
        .unwrap();
        assert_abs_diff_eq!(t.density(0.5, 0.0), 0.5);
        assert_abs_diff_eq!(t.density(2.5, 0.0), 0.0);
        assert_abs_diff_eq!(t.density(-0.1, 0.0), 0.0);
        assert_abs_diff_eq!(t.density(1.0, PI / 2.0), 0.75, epsilon = 1e-15);
        // wraps from π back to 2π ≡ 0
        assert_abs_diff_eq!(t.density(1.0, 1.5 * PI), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(t.density(1.0, 2.0 * PI), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_characteristic_matches_quadrature() {
        let t = vacuum_table(4);
        let spec = QuadratureSpec::default();
        for k in [0.0, 1e-4, 0.3, 2.0, 7.5] {
            let closed = t.closed_form_characteristic(k, 0.4).unwrap();
            // integrate panel by panel so that kinks fall on panel edges
            let mut numeric = Complex64::new(0.0, 0.0);
            for pair in t.xs().windows(2) {
                numeric += integrate_interval(|x| Complex64::from_polar(t.density(x, 0.4), k * x), pair[0], pair[1], &spec)
                    .unwrap()
                    .value;
            }
            assert!((closed - numeric).norm() < 1e-12, "k={k}: {closed} vs {numeric}");
        }
        assert_abs_diff_eq!(t.closed_form_characteristic(1.0, 0.0).unwrap().re, (-0.25f64).exp(), epsilon = 1e-3);
    }

    #[test]
    fn symmetrization() {
        let xs = vec![-1.0, 0.0, 1.0];
        let thetas = vec![0.0, PI / 2.0, PI, 1.5 * PI];
        let rows = vec![vec![0.0, 1.0, 0.0], vec![0.4, 0.8, 0.0], vec![0.0, 0.6, 0.8], vec![0.0, 1.0, 0.0]];
        let t = TomogramTable::new(thetas, xs, rows).unwrap();
        let s = t.symmetrized().unwrap();
        for (got, want) in [(&s.values()[0], [0.4, 0.8, 0.0]), (&s.values()[2], [0.0, 0.8, 0.4])] {
            for (a, b) in got.iter().zip(want) {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
            }
        }
        for k in [0.5, 2.0] {
            let a = s.closed_form_characteristic(k, 0.0).unwrap();
            let b = s.closed_form_characteristic(k, PI).unwrap();
            assert!((a - b.conj()).norm() < 1e-15);
        }
        assert!(vacuum_table(3).symmetrized().is_err());
    }

    #[test]
    fn validation() {
        let xs = vec![0.0, 1.0, 2.0];
        assert!(TomogramTable::new(vec![0.0], xs.clone(), vec![vec![0.0, 1.0, 0.0]]).is_ok());
        assert!(TomogramTable::new(vec![0.0], xs.clone(), vec![vec![0.0, 2.0, 0.0]]).is_err());
        assert!(TomogramTable::new(vec![0.0], xs.clone(), vec![vec![-0.1, 1.0, 0.1]]).is_err());
        assert!(TomogramTable::new(vec![1.0, 0.5], xs.clone(), vec![vec![0.0, 1.0, 0.0]; 2]).is_err());
        assert!(TomogramTable::new(vec![7.0], xs, vec![vec![0.0, 1.0, 0.0]]).is_err());
        assert!(TomogramTable::new(vec![0.0], vec![0.0, 1.0, 3.0], vec![vec![0.0, 1.0, 0.0]]).is_err());
    }

    #[test]
    fn csv_round_trip_with_metadata() {
        let t = vacuum_table(3);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, &[("source".into(), "test".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# source: test\ntheta,x,w\n"));
        let back = TomogramTable::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(back, t);
        assert_eq!(back.angle_grid(), Some(3));
    }

    #[test]
    fn csv_errors_name_the_line() {
        let bad = "theta,x,w\n0,0,0\n0,1,abc\n0,2,0\n";
        match TomogramTable::read_csv(bad.as_bytes(), "t.csv") {
            Err(Error::Parse { line, source_name, message }) => {
                assert_eq!(line, 3);
                assert_eq!(source_name, "t.csv");
                assert!(message.contains("abc"));
            }
            other => panic!("{other:?}"),
        }
        let header = "angle,x,w\n";
        assert!(matches!(TomogramTable::read_csv(header.as_bytes(), "h"), Err(Error::Parse { line: 1, .. })));
        let short = "theta,x,w\n0,0,0\n0,1\n";
        assert!(matches!(TomogramTable::read_csv(short.as_bytes(), "s"), Err(Error::Parse { line: 3, .. })));
        let unordered = "theta,x,w\n1,0,0\n1,1,1\n1,2,0\n0.5,0,0\n";
        assert!(matches!(TomogramTable::read_csv(unordered.as_bytes(), "u"), Err(Error::Parse { line: 5, .. })));
    }
}
