//! Library-only workflow: write a tomogram table to CSV, read it back,
//! transform it and serialize the result as JSON.

use std::io::Cursor;

use gausstomo::pnt_transform::pnt_from_optical;
use gausstomo::tomograms::{optical_gaussian, TomogramTable};
use gausstomo::{DisplacementAmplitude, GaussianState, QuadratureSpec};

fn main() -> gausstomo::Result<()> {
    let state: GaussianState =
        serde_json::from_str(r#"{"mean_q": 0.4, "mean_p": 0.0, "sigma_pp": 0.8, "sigma_qq": 0.4, "sigma_pq": 0.1}"#)
            .map_err(|e| gausstomo::Error::InvalidParameter(e.to_string()))?;
    let thetas: Vec<f64> = (0..32).map(|j| std::f64::consts::TAU * j as f64 / 32.0).collect();
    let xs: Vec<f64> = (0..=400).map(|j| -8.0 + j as f64 / 25.0).collect();
    let values = thetas
        .iter()
        .map(|&t| xs.iter().map(|&x| optical_gaussian(&state, t, x)).collect())
        .collect();
    let table = TomogramTable::new(thetas, xs, values)?;

    let mut csv = Vec::new();
    table.write_csv(&mut csv, &[("source".into(), "closed form".into())])?;
    let table = TomogramTable::read_csv(Cursor::new(csv), "memory")?;

    let pnt = pnt_from_optical(&table, DisplacementAmplitude::ZERO, 4, &QuadratureSpec::default())?;
    println!("{}", serde_json::to_string_pretty(&pnt).expect("serializable"));
    Ok(())
}
