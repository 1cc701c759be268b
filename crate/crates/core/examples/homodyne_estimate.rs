//! Simulated homodyne measurement of three states, with photon statistics
//! estimated from the binned tomogram and bootstrap standard errors.

use std::time::Instant;

use gausstomo::homodyne::{estimate_photon_stats, HomodyneConfig};
use gausstomo::{GaussianState, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let states = [
        ("vacuum", GaussianState::vacuum()),
        ("thermal nbar=1", GaussianState::thermal(1.0)?),
        ("squeezed r=0.5", GaussianState::squeezed(0.5, 0.0, 0.0)?),
    ];
    let config = HomodyneConfig {
        seed: 2024,
        ..HomodyneConfig::default()
    };
    let spec = QuadratureSpec::default();
    for (name, state) in states {
        let start = Instant::now();
        let report = estimate_photon_stats(&state, &config, &spec)?;
        println!("{name} ({:.1} s, {} clipped)", start.elapsed().as_secs_f64(), report.clipped);
        println!("   n   estimated      stderr       exact    z");
        for n in 0..=config.n_max {
            let est = report.estimated.probs()[n];
            let exact = report.exact.probs()[n];
            let se = report.per_n_stderr[n];
            println!("{n:>4} {est:>11.6} {se:>11.6} {exact:>11.6} {:>5.2}", (est - exact) / se);
        }
    }
    Ok(())
}
