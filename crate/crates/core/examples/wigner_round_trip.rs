//! Optical tomogram of a squeezed thermal state, its Radon-transform check
//! on a Wigner grid, and the Wigner function reconstructed from it.

use gausstomo::tomograms::{optical_gaussian, radon_forward, wigner_from_tomogram, GaussianTomogram, WignerGrid};
use gausstomo::{GaussianState, PhaseSpacePoint, QuadratureSpec, SymplecticFrame};

fn main() -> gausstomo::Result<()> {
    let state = GaussianState::squeezed_thermal(0.3, 0.6, 0.4, 0.5, -0.3)?;
    let theta = 1.0;
    let frame = SymplecticFrame::optical(theta);

    let grid = WignerGrid::from_state(&state, 6.0, 801)?;
    let xs: Vec<f64> = (-4..=4).map(|j| 0.5 * j as f64).collect();
    let radon = radon_forward(&grid, frame, &xs)?;
    println!("   X    closed form     grid Radon");
    for (x, r) in xs.iter().zip(&radon) {
        println!("{x:>5.1} {:>14.8} {r:>14.8}", optical_gaussian(&state, theta, *x));
    }

    let pts: Vec<PhaseSpacePoint> = [(0.0, 0.0), (0.5, -0.3), (1.5, 1.0), (-2.0, 0.5)]
        .iter()
        .map(|&(q, p)| PhaseSpacePoint::new(q, p))
        .collect();
    let rebuilt = wigner_from_tomogram(&GaussianTomogram::new(state), &pts, &QuadratureSpec::default())?;
    println!("     q     p          W     rebuilt");
    for (pt, w) in pts.iter().zip(rebuilt) {
        println!("{:>6.2}{:>6.2} {:>10.7} {w:>11.7}", pt.q, pt.p, state.wigner(*pt));
    }
    Ok(())
}
