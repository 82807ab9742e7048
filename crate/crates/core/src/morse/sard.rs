use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytic::sard_directional_derivative;
use crate::error::{Error, Result};
use crate::legendre::{arccot, normal_bundle, shape_operator, EmbeddedSurface};
use crate::rng::{sample_rng, unit_vector};

/// Minimum angular gap between a generic radius and every curvature-sphere radius.
pub const GENERIC_RADIUS_GAP: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SardSample {
    pub index: usize,
    pub vertex: usize,
    pub sheet: usize,
    pub radius: f64,
    pub curvature: Option<f64>,
    pub curvature_sphere: bool,
    pub derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SardReport {
    pub step: f64,
    pub seed: u64,
    pub samples: Vec<SardSample>,
    /// Largest derivative norm over curvature-sphere configurations.
    pub curvature_max: f64,
    /// Smallest derivative norm over the other configurations.
    pub generic_min: f64,
    pub pass: bool,
}

/// Finite-difference derivative of the Sard map along a principal direction,
/// alternately at curvature-sphere radii and at radii away from them.
///
/// Passes when the first stay below `10·step` and the second above `1e3·step`.
pub fn sard_check(s: &EmbeddedSurface, num_samples: usize, seed: u64, step: f64) -> Result<SardReport> {
    if s.codim() != 1 {
        return Err(Error::Precondition("the Sard check needs a hypersurface of S^3".into()));
    }
    let frames = normal_bundle(s, 2)?;
    let samples: Vec<SardSample> = (0..num_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let frame = &frames[rng.random_range(0..frames.len())];
            let sd = shape_operator(s, frame)?;
            let which = rng.random_range(0..sd.principal_curvatures.len());
            let focal = i % 2 == 0;
            let radius = if focal {
                arccot(sd.principal_curvatures[which])
            } else {
                loop {
                    let r: f64 = rng.random_range(0.05..PI - 0.05);
                    if sd.principal_curvatures.iter().all(|&k| (arccot(k) - r).abs() > GENERIC_RADIUS_GAP) {
                        break r;
                    }
                }
            };
            let q = &frame.point * radius.cos() + &frame.normal * radius.sin();
            let g: DVector<f64> = unit_vector(&mut rng, q.len());
            let eta = (&g - &q * q.dot(&g)).normalize();
            let derivative =
                sard_directional_derivative(s, frame, radius, &eta, &sd.principal_directions[which], step)?;
            Ok(SardSample {
                index: i,
                vertex: frame.base_index,
                sheet: frame.sheet,
                radius,
                curvature: focal.then_some(sd.principal_curvatures[which]),
                curvature_sphere: focal,
                derivative,
            })
        })
        .collect::<Result<_>>()?;
    let curvature_max = samples.iter().filter(|x| x.curvature_sphere).map(|x| x.derivative).fold(0.0, f64::max);
    let generic_min = samples
        .iter()
        .filter(|x| !x.curvature_sphere)
        .map(|x| x.derivative)
        .fold(f64::INFINITY, f64::min);
    Ok(SardReport {
        step,
        seed,
        pass: curvature_max < 10.0 * step && generic_min > 1e3 * step,
        samples,
        curvature_max,
        generic_min,
    })
}
