//! Photon-number distributions and photon-number tomograms of a few
//! Gaussian states, from the closed form and the Fock-basis oracle.

use gausstomo::photon_statistics::{fock_oracle, photon_distribution, photon_distribution_adaptive, pnt_gaussian};
use gausstomo::{DisplacementAmplitude, GaussianState, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let states = [
        ("coherent z=1", GaussianState::coherent(2f64.sqrt(), 0.0)),
        ("thermal nbar=0.5", GaussianState::thermal(0.5)?),
        ("squeezed r=0.8", GaussianState::squeezed(0.8, 0.0, 0.0)?),
        ("squeezed thermal", GaussianState::squeezed_thermal(0.5, 0.5, 0.5, 1.0, -0.5)?),
    ];
    let spec = QuadratureSpec::default();
    for (name, state) in states {
        let dist = photon_distribution(&state, 8)?;
        let oracle = fock_oracle(&state, 8, &spec)?;
        let adaptive = photon_distribution_adaptive(&state, 1e-10)?;
        println!(
            "{name}: <n> = {:.4}, oracle gap {:.1e}, n_max for tail < 1e-10: {}",
            adaptive.mean_photon_number(),
            dist.max_abs_diff(&oracle),
            adaptive.n_max()
        );
        for (n, p) in dist.probs().iter().enumerate() {
            println!("  P_{n} = {p:.8}");
        }
    }

    // Displacing the vacuum gives a Poissonian tomogram
    let alpha = DisplacementAmplitude::from_polar(1.0, 0.3);
    let pnt = pnt_gaussian(&GaussianState::vacuum(), alpha, 5)?;
    println!("vacuum omega(n, alpha), |alpha| = 1: {:?}", pnt.probs());
    Ok(())
}
