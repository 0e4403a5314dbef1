//! Writes the bundled synthetic tensile-test curve used by the acceptance suite.
//!
//! Strain runs over [0, 0.25] in steps of 0.001. The curve is linear-elastic up
//! to a strain of 0.06, hardens along a parabola to a peak near 0.12, and then
//! softens linearly after 0.14 as the specimen fails. Gaussian noise is added
//! at 25 dB with a fixed seed.
//!
//!     cargo run --example stress_strain -- crates/core/data/stress_strain_synthetic.csv

use std::path::PathBuf;

use rdp::cli::io::write_samples;
use rdp::synth::{add_noise, NoiseSpec};
use rdp::SampleSet;

const MODULUS: f64 = 400.0;
const YIELD_STRAIN: f64 = 0.06;
const FAILURE_STRAIN: f64 = 0.14;

fn stress(strain: f64) -> f64 {
    let yield_stress = MODULUS * YIELD_STRAIN;
    let hardening = |e: f64| {
        let d = e - YIELD_STRAIN;
        yield_stress + 300.0 * d - 2500.0 * d * d
    };
    if strain < YIELD_STRAIN {
        MODULUS * strain
    } else if strain < FAILURE_STRAIN {
        hardening(strain)
    } else {
        hardening(FAILURE_STRAIN) - 250.0 * (strain - FAILURE_STRAIN)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("stress_strain_synthetic.csv"));
    let strain: Vec<f64> = (0..=250).map(|i| i as f64 / 1000.0).collect();
    let clean: Vec<f64> = strain.iter().map(|&e| stress(e)).collect();
    let clean = SampleSet::from_xy(&strain, &clean)?;
    let noisy = add_noise(&clean, NoiseSpec::new(25.0, 7)?)?;
    write_samples(&out, &noisy)?;
    eprintln!("wrote {} rows to {}", noisy.len(), out.display());
    Ok(())
}
