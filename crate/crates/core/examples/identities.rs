//! Numerical checks of closed forms: the ground-state transform integral,
//! the Fock-state Hermite–Laguerre relation, and Fock photon-number
//! tomogram normalization.

use gausstomo::photon_statistics::fock_pnt;
use gausstomo::pnt_transform::{verify_ground_state, verify_identity_p14};
use gausstomo::{DisplacementAmplitude, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let spec = QuadratureSpec::default();
    let ground = verify_ground_state(&spec)?;
    println!("ground state: abs_err {:.2e}", ground.abs_err);

    println!(" m  n  |gamma|      abs_err");
    for (m, n) in [(0, 0), (0, 3), (1, 2), (2, 4), (4, 4)] {
        for modulus in [0.0, 0.7, 1.5] {
            let gamma = DisplacementAmplitude::from_polar(modulus, 0.4);
            let report = verify_identity_p14(m, n, gamma, &spec)?;
            println!("{m:>2} {n:>2} {modulus:>8.1} {:>12.2e}", report.abs_err);
        }
    }

    let gamma = DisplacementAmplitude::from_polar(1.5, -1.0);
    for m in 0..=3 {
        let total: f64 = (0..=100).map(|n| fock_pnt(m, n, gamma)).sum();
        println!("sum_n omega_{m}(n) = {total:.15}");
    }
    Ok(())
}
