//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain error, 2 numerical failure (including a
//! verification outside its tolerance), 64 usage error or unreadable input.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::gaussian_state::{GaussianState, PhaseSpacePoint};
use crate::homodyne::{estimate_photon_stats, HomodyneConfig, BOOTSTRAP_RESAMPLES};
use crate::photon_statistics::{
    photon_distribution, photon_distribution_adaptive, pnt_gaussian, DisplacementAmplitude, PhotonDistribution,
    DEFAULT_TAIL_TOL,
};
use crate::pnt_transform::{
    pnt_from_optical, verify_ground_state, verify_identity_p14, QuadReport, Values, VerificationReport,
};
use crate::quadrature::QuadratureSpec;
use crate::tomograms::{optical_gaussian, wigner_from_tomogram, GaussianTomogram, TomogramTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser, Serialize)]
#[command(name = "gausstomo", version, about = "Tomograms and photon statistics of one-mode Gaussian light")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Relative quadrature tolerance (overrides TOMO_QUAD_RTOL).
    #[arg(long, global = true)]
    pub rtol: Option<f64>,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub atol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Photon-number distribution P_n of a Gaussian state.
    PhotonDist {
        #[command(flatten)]
        state: StateArgs,
        /// Truncation; adaptive (tail below 1e-8) when omitted.
        #[arg(long)]
        nmax: Option<usize>,
    },
    /// Photon-number tomogram ω(n, α) of a Gaussian state.
    Pnt {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
    },
    /// Optical tomogram table of a Gaussian state.
    Optical {
        #[command(flatten)]
        state: StateArgs,
        /// Number of equispaced angles in [0, 2π).
        #[arg(long, default_value_t = 8)]
        n_angles: usize,
        #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 121)]
        x_points: usize,
    },
    /// Integral transforms on tabulated data.
    Transform {
        #[command(subcommand)]
        kind: TransformKind,
    },
    /// Numerical checks of closed forms against integrals.
    Verify {
        #[arg(long, value_enum)]
        identity: Identity,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        n: usize,
        /// Modulus of γ.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        /// Phase of γ.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma_phase: f64,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        /// Largest accepted abs_err; beyond it the exit code is 2.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Simulated homodyne measurement with bootstrap errors.
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1_000_000)]
        nsamples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        n_angles: usize,
        #[arg(long, default_value_t = 200)]
        x_bins: usize,
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, default_value_t = BOOTSTRAP_RESAMPLES)]
        bootstrap: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    /// Photon-number tomogram from an optical tomogram table (CSV `theta,x,w`).
    OpticalToPnt {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 10)]
        nmax: usize,
        /// Average each angle with its θ + π mirror before transforming.
        #[arg(long)]
        symmetrize: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    /// Vacuum triple integral equal to one.
    P9,
    /// Hermite–Laguerre relation for Fock states.
    P14,
    /// Wigner reconstruction from the closed-form tomogram.
    Roundtrip,
    /// Optical-to-photon-number transform against the closed form.
    Transform,
}

/// State parameters, inline or from a JSON file.
#[derive(Debug, Args, Serialize)]
pub struct StateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_pp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_qq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_pq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mean_q: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub mean_p: Option<f64>,
    /// JSON file with mean_q, mean_p, sigma_pp, sigma_qq, sigma_pq.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_im: f64,
}

impl AlphaArgs {
    fn amplitude(&self) -> DisplacementAmplitude {
        DisplacementAmplitude::new(self.alpha_re, self.alpha_im)
    }
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::Io(_) => EXIT_USAGE,
            e if e.is_domain_error() => EXIT_DOMAIN,
            _ => EXIT_NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl StateArgs {
    fn resolve(&self) -> Result<GaussianState, Failure> {
        let inline = [self.sigma_pp, self.sigma_qq, self.sigma_pq, self.mean_q, self.mean_p];
        if let Some(path) = &self.state {
            if inline.iter().any(Option::is_some) {
                return Err(usage("give the state either inline or with --state, not both"));
            }
            let file = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            return serde_json::from_reader(BufReader::new(file)).map_err(|e| {
                Failure {
                    code: if e.is_data() { EXIT_DOMAIN } else { EXIT_USAGE },
                    message: format!("{}:{}: {e}", path.display(), e.line()),
                }
            });
        }
        Ok(GaussianState::from_parameters(
            self.mean_q.unwrap_or(0.0),
            self.mean_p.unwrap_or(0.0),
            self.sigma_pp.unwrap_or(0.5),
            self.sigma_qq.unwrap_or(0.5),
            self.sigma_pq.unwrap_or(0.0),
        )?)
    }
}

/// Printed-equation deviations in force, echoed in every output.
fn corrections() -> Value {
    json!({
        "ground_state_tomogram": "exp(-X^2)/sqrt(pi)",
        "fock_tomogram_exponent": "X^2/(mu^2+nu^2)",
        "kernel_gaussian_factor": "exp(-(mu^2+nu^2)/4) included",
        "moment_series_denominator": "m!",
        "transform_displacement_sign": "+sqrt(2)(alpha_1 cos + alpha_2 sin), matching D(alpha) rho D(alpha)^dagger",
    })
}

/// A command's result before formatting.
enum Output {
    Distribution(PhotonDistribution),
    Table(TomogramTable),
    Report(VerificationReport),
    Json(Value),
}

fn quad_spec(cli: &Cli) -> Result<QuadratureSpec, Failure> {
    let mut spec = QuadratureSpec::from_env().map_err(|e| usage(format!("TOMO_QUAD_RTOL: {e}")))?;
    if let Some(r) = cli.rtol {
        spec.rel_tol = r;
    }
    if let Some(a) = cli.atol {
        spec.abs_tol = a;
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn execute(cli: &Cli, spec: &QuadratureSpec) -> Result<(Output, Value, bool), Failure> {
    let mut extra = json!({});
    let mut passed = true;
    let output = match &cli.command {
        Command::PhotonDist { state, nmax } => {
            let s = state.resolve()?;
            extra["state"] = serde_json::to_value(s).unwrap_or(Value::Null);
            Output::Distribution(match nmax {
                Some(n) => photon_distribution(&s, *n)?,
                None => photon_distribution_adaptive(&s, DEFAULT_TAIL_TOL)?,
            })
        }
        Command::Pnt { state, alpha, nmax } => {
            let s = state.resolve()?;
            extra["state"] = serde_json::to_value(s).unwrap_or(Value::Null);
            Output::Distribution(pnt_gaussian(&s, alpha.amplitude(), *nmax)?)
        }
        Command::Optical {
            state,
            n_angles,
            x_min,
            x_max,
            x_points,
        } => {
            let s = state.resolve()?;
            extra["state"] = serde_json::to_value(s).unwrap_or(Value::Null);
            if *n_angles == 0 || *x_points < 2 || !(x_max > x_min) {
                return Err(usage("need n-angles >= 1, x-points >= 2 and x-max > x-min"));
            }
            let h = (x_max - x_min) / (*x_points - 1) as f64;
            let xs: Vec<f64> = (0..*x_points).map(|j| x_min + h * j as f64).collect();
            let thetas: Vec<f64> = (0..*n_angles)
                .map(|j| 2.0 * std::f64::consts::PI * j as f64 / *n_angles as f64)
                .collect();
            let values = thetas
                .iter()
                .map(|&t| xs.iter().map(|&x| optical_gaussian(&s, t, x)).collect())
                .collect();
            Output::Table(TomogramTable::new(thetas, xs, values)?)
        }
        Command::Transform {
            kind:
                TransformKind::OpticalToPnt {
                    input,
                    alpha,
                    nmax,
                    symmetrize,
                },
        } => {
            let table = read_table(input)?;
            let table = if *symmetrize { table.symmetrized()? } else { table };
            Output::Distribution(pnt_from_optical(&table, alpha.amplitude(), *nmax, spec)?)
        }
        Command::Verify {
            identity,
            m,
            n,
            gamma,
            gamma_phase,
            state,
            alpha,
            nmax,
            tolerance,
        } => {
            let report = match identity {
                Identity::P9 => verify_ground_state(spec)?,
                Identity::P14 => verify_identity_p14(*m, *n, DisplacementAmplitude::from_polar(*gamma, *gamma_phase), spec)?,
                Identity::Roundtrip => {
                    let s = state.resolve()?;
                    extra["state"] = serde_json::to_value(s).unwrap_or(Value::Null);
                    verify_roundtrip(&s, spec)?
                }
                Identity::Transform => {
                    let s = state.resolve()?;
                    extra["state"] = serde_json::to_value(s).unwrap_or(Value::Null);
                    let a = alpha.amplitude();
                    let lhs = pnt_gaussian(&s, a, *nmax)?;
                    let rhs = pnt_from_optical(&GaussianTomogram::new(s), a, *nmax, spec)?;
                    VerificationReport {
                        identity: "transform".into(),
                        abs_err: lhs.max_abs_diff(&rhs),
                        lhs: Values::List(lhs.probs().to_vec()),
                        rhs: Values::List(rhs.probs().to_vec()),
                        quad: QuadReport {
                            spec: *spec,
                            error_estimate: f64::NAN,
                            imag_residual: f64::NAN,
                        },
                    }
                }
            };
            passed = report.abs_err <= *tolerance;
            Output::Report(report)
        }
        Command::Simulate {
            state,
            nsamples,
            seed,
            n_angles,
            x_bins,
            nmax,
            bootstrap,
        } => {
            let s = state.resolve()?;
            let config = HomodyneConfig {
                n_samples: *nsamples,
                n_angles: *n_angles,
                x_bins: *x_bins,
                seed: *seed,
                n_max: *nmax,
                x_range: None,
                bootstrap_resamples: *bootstrap,
            };
            let report = estimate_photon_stats(&s, &config, spec)?;
            Output::Json(serde_json::to_value(report).map_err(|e| usage(e.to_string()))?)
        }
    };
    Ok((output, extra, passed))
}

fn read_table(path: &Path) -> Result<TomogramTable, Failure> {
    let file = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(TomogramTable::read_csv(BufReader::new(file), &path.display().to_string())?)
}

/// Reconstructed against exact Wigner values on a 7 × 7 grid over [−3, 3]².
fn verify_roundtrip(state: &GaussianState, spec: &QuadratureSpec) -> crate::Result<VerificationReport> {
    let pts: Vec<PhaseSpacePoint> = (0..7)
        .flat_map(|i| (0..7).map(move |j| PhaseSpacePoint::new(-3.0 + i as f64, -3.0 + j as f64)))
        .collect();
    let exact: Vec<f64> = pts.iter().map(|p| state.wigner(*p)).collect();
    let rebuilt = wigner_from_tomogram(&GaussianTomogram::new(*state), &pts, spec)?;
    let abs_err = exact.iter().zip(&rebuilt).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(VerificationReport {
        identity: "roundtrip".into(),
        lhs: Values::List(exact),
        rhs: Values::List(rebuilt),
        abs_err,
        quad: QuadReport {
            spec: *spec,
            error_estimate: f64::NAN,
            imag_residual: f64::NAN,
        },
    })
}

fn metadata(cli: &Cli, spec: &QuadratureSpec, extra: Value) -> Value {
    json!({
        "program": concat!("gausstomo ", env!("CARGO_PKG_VERSION")),
        "config": cli,
        "quadrature": spec,
        "corrections": corrections(),
        "derived": extra,
    })
}

fn render(output: Output, meta: Value, format: Format, out: &mut dyn Write) -> crate::Result<()> {
    match format {
        Format::Json => {
            let mut value = match output {
                Output::Distribution(d) => serde_json::to_value(d),
                Output::Report(r) => serde_json::to_value(r),
                Output::Json(v) => Ok(v),
                Output::Table(t) => Ok(json!({ "theta": t.thetas(), "x": t.xs(), "w": t.values() })),
            }
            .map_err(|e| Error::Io(e.to_string()))?;
            value["meta"] = meta;
            serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut lines: Vec<(String, String)> = meta
                .as_object()
                .map(|m| m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect())
                .unwrap_or_default();
            match output {
                Output::Distribution(d) => {
                    lines.push(("tail_mass".into(), d.tail_mass().to_string()));
                    write_comments(out, &lines)?;
                    d.write_csv(out)?;
                }
                Output::Table(t) => t.write_csv(out, &lines)?,
                Output::Report(r) => {
                    lines.push(("identity".into(), r.identity.clone()));
                    lines.push(("abs_err".into(), r.abs_err.to_string()));
                    lines.push(("quad".into(), serde_json::to_string(&r.quad).unwrap_or_default()));
                    write_comments(out, &lines)?;
                    writeln!(out, "index,lhs,rhs")?;
                    let (l, r) = (as_list(&r.lhs), as_list(&r.rhs));
                    for (i, (a, b)) in l.iter().zip(&r).enumerate() {
                        writeln!(out, "{i},{a:e},{b:e}")?;
                    }
                }
                Output::Json(v) => {
                    // the simulation report has no flat table; emit estimate rows
                    write_comments(out, &lines)?;
                    writeln!(out, "n,estimated,stderr,exact")?;
                    let est = v["estimated"]["probs"].as_array().cloned().unwrap_or_default();
                    let se = v["per_n_stderr"].as_array().cloned().unwrap_or_default();
                    let ex = v["exact"]["probs"].as_array().cloned().unwrap_or_default();
                    for (n, ((a, b), c)) in est.iter().zip(&se).zip(&ex).enumerate() {
                        writeln!(out, "{n},{a},{b},{c}")?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn as_list(v: &Values) -> Vec<f64> {
    match v {
        Values::Scalar(x) => vec![*x],
        Values::List(xs) => xs.clone(),
    }
}

fn write_comments(out: &mut dyn Write, lines: &[(String, String)]) -> crate::Result<()> {
    for (k, v) in lines {
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `stdout` unless `--output` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    match run_cli(&cli, stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            let _ = writeln!(stderr, "error: verification exceeded its tolerance");
            EXIT_NUMERICAL
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn run_cli(cli: &Cli, stdout: &mut dyn Write) -> Result<bool, Failure> {
    let spec = quad_spec(cli)?;
    let (output, extra, passed) = execute(cli, &spec)?;
    let meta = metadata(cli, &spec, extra);
    match &cli.output {
        Some(path) => {
            let mut file = File::create(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            render(output, meta, cli.format, &mut file)?;
        }
        None => render(output, meta, cli.format, stdout)?,
    }
    Ok(passed)
}
