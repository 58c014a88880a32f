//! Near-uniform point systems on the unit sphere with cubature weights.

use std::f64::consts::PI;
use std::path::Path;

use crate::error::{domain_err, EpwError, Result};

/// Directions (θ₁, θ₂) with positive cubature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSystem {
    pub angles: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

impl SphereSystem {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        self.angles
            .iter()
            .map(|&(t, p)| {
                let (st, ct) = t.sin_cos();
                let (sp, cp) = p.sin_cos();
                [st * cp, st * sp, ct]
            })
            .collect()
    }
}

/// Spherical Fibonacci lattice with equal weights 4π/count.
pub fn sphere_directions(count: usize) -> Result<SphereSystem> {
    if count == 0 {
        return domain_err("sphere point count must be >= 1");
    }
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let n = count as f64;
    let angles = (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n;
            let phi = (2.0 * PI * i as f64 / golden).rem_euclid(2.0 * PI);
            (z.acos(), phi)
        })
        .collect();
    Ok(SphereSystem { angles, weights: vec![4.0 * PI / n; count] })
}

/// Reads "theta1 theta2 weight" records, one per line; `#` starts a comment.
pub fn read_sphere_system(path: &Path) -> Result<SphereSystem> {
    parse_sphere_system(&std::fs::read_to_string(path)?)
}

pub fn parse_sphere_system(text: &str) -> Result<SphereSystem> {
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| EpwError::Parse { line: i + 1, msg };
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| err(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", vals.len())));
        }
        if !(0.0..=PI).contains(&vals[0]) || !(vals[2] > 0.0) {
            return Err(err("theta1 must lie in [0, pi] and weight be positive".into()));
        }
        angles.push((vals[0], vals[1].rem_euclid(2.0 * PI)));
        weights.push(vals[2]);
    }
    if angles.is_empty() {
        return domain_err("sphere point file holds no records");
    }
    Ok(SphereSystem { angles, weights })
}
