//! Photon-number tomogram from tomogram moments: how the truncated series
//! behaves as the number of moments grows.

use gausstomo::photon_statistics::pnt_gaussian;
use gausstomo::pnt_transform::pnt_via_moments;
use gausstomo::tomograms::GaussianTomogram;
use gausstomo::{DisplacementAmplitude, GaussianState, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let spec = QuadratureSpec::default();
    let cases = [
        ("vacuum", GaussianState::vacuum(), DisplacementAmplitude::ZERO, 0),
        ("thermal 0.5", GaussianState::thermal(0.5)?, DisplacementAmplitude::ZERO, 1),
        ("coherent", GaussianState::coherent(0.5, 0.0), DisplacementAmplitude::new(0.2, 0.0), 0),
    ];
    for (name, state, alpha, n) in cases {
        let exact = pnt_gaussian(&state, alpha, n)?.probs()[n];
        println!("{name}, n = {n}, exact {exact:.8}");
        println!("   M       value       error    estimate   K_cut  converged");
        for m_max in [0, 4, 10, 20, 30, 40, 60] {
            let est = pnt_via_moments(&GaussianTomogram::new(state), alpha, n, m_max, &spec)?;
            println!(
                "{m_max:>4} {:>11.8} {:>11.2e} {:>11.2e} {:>7.2}  {}",
                est.value,
                (est.value - exact).abs(),
                est.error_estimate,
                est.k_cut,
                est.converged
            );
        }
    }
    Ok(())
}
