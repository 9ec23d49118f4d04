use rayon::prelude::*;

use crate::error::{usage, Result};

/// IGD+: mean over reference points of the dominance-aware distance to the
/// nearest approximation point.
pub fn igd_plus(approx: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if approx.is_empty() || reference.is_empty() {
        return Err(usage("IGD+ needs nonempty approximation and reference sets"));
    }
    let m = reference[0].len();
    if approx.iter().chain(reference).any(|v| v.len() != m) {
        return Err(usage("IGD+ objective dimensions differ"));
    }
    let distances: Vec<f64> = reference
        .par_iter()
        .map(|z| {
            approx
                .iter()
                .map(|a| {
                    a.iter()
                        .zip(z)
                        .map(|(ai, zi)| (ai - zi).max(0.0).powi(2))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect();
    // summed in order so the result does not depend on the worker count
    let total: f64 = distances.iter().sum();
    Ok(total / reference.len() as f64)
}
