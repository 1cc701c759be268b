//! Photon-number tomogram from an optical tomogram: closed-form tomogram,
//! tabulated tomogram, and closed-form reference.

use gausstomo::photon_statistics::pnt_gaussian;
use gausstomo::pnt_transform::{pnt_from_optical, pnt_from_optical_detailed};
use gausstomo::tomograms::{optical_gaussian, GaussianTomogram, TomogramTable};
use gausstomo::{DisplacementAmplitude, GaussianState, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let state = GaussianState::squeezed_thermal(0.5, 0.5, std::f64::consts::FRAC_PI_6, 0.8, 0.4)?;
    let alpha = DisplacementAmplitude::new(-0.5, 0.2);
    let spec = QuadratureSpec::default();

    let exact = pnt_gaussian(&state, alpha, 6)?;
    let detailed = pnt_from_optical_detailed(&GaussianTomogram::new(state), alpha, 6, &spec)?;
    println!(
        "closed-form tomogram: k_max {:.2}, imaginary residual {:.1e}, error estimate {:.1e}",
        detailed.k_max, detailed.imag_residual, detailed.error_estimate
    );

    let thetas: Vec<f64> = (0..64).map(|j| std::f64::consts::TAU * j as f64 / 64.0).collect();
    let xs: Vec<f64> = (0..=600).map(|j| -10.0 + j as f64 / 30.0).collect();
    let values = thetas
        .iter()
        .map(|&t| xs.iter().map(|&x| optical_gaussian(&state, t, x)).collect())
        .collect();
    let table = TomogramTable::new(thetas, xs, values)?;
    let tabulated = pnt_from_optical(&table, alpha, 6, &spec)?;

    println!("   n       exact    from closed form    from table");
    for n in 0..=6 {
        println!(
            "{n:>4} {:>11.8} {:>19.8} {:>13.8}",
            exact.probs()[n],
            detailed.values[n],
            tabulated.probs()[n]
        );
    }
    Ok(())
}
