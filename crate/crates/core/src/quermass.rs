//! Enclosed volume, quermassintegrals and average Gauss curvature.
//!
//! For smooth convex domains the quermassintegrals follow from curvature
//! integrals:
//!
//! ```text
//! 𝒜₋₁ = |Ω|,   𝒜₀ = |∂Ω|,
//! 𝒜₁  = ∫σ₁ dμ − n 𝒜₋₁,
//! 𝒜_k = ∫σ_k dμ − (n−k+1)/(k−1) 𝒜_{k−2},   2 ≤ k ≤ n.
//! ```
//!
//! The top value produced by this chain is the Gauss–Bonnet constant
//! `𝒜_n = ω_n = |S^n|` for every closed convex hypersurface.

use crate::error::{Error, Result};
use crate::geometry::GeometryFields;
use crate::graph::RadialGraph;

/// Volume of the geodesic cone of radius `r` per unit solid angle:
/// `∫₀^r sinh^n t dt`.
pub fn radial_volume_kernel(n: usize, r: f64) -> f64 {
    match n {
        1 => {
            let s = (0.5 * r).sinh();
            2.0 * s * s
        }
        2 => 0.25 * ((2.0 * r).sinh() - 2.0 * r),
        _ => unreachable!("dimension checked by the grid"),
    }
}

/// Volume of the geodesic ball of radius `r` in H^{n+1}.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    sphere_area(n) * radial_volume_kernel(n, r)
}

/// `ω_n = |S^n|`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0 * std::f64::consts::PI,
        2 => 4.0 * std::f64::consts::PI,
        _ => unreachable!("dimension checked by the grid"),
    }
}

/// Radius of the geodesic ball with the given volume.
pub fn ball_radius_for_volume(n: usize, volume: f64) -> Result<f64> {
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::InvalidArgument(format!("volume must be positive, got {volume}")));
    }
    let w = sphere_area(n);
    // start from the Euclidean radius, which overestimates
    let mut r = match n {
        1 => (volume / std::f64::consts::PI).sqrt(),
        _ => (3.0 * volume / (4.0 * std::f64::consts::PI)).cbrt(),
    };
    for _ in 0..100 {
        let step = (ball_volume(n, r) - volume) / (w * r.sinh().powi(n as i32));
        r -= step;
        if step.abs() <= 1e-15 * r {
            return Ok(r);
        }
    }
    Err(Error::NoConvergence {
        iterations: 100,
        residual: ball_volume(n, r) - volume,
    })
}

/// `𝒜₋₁ = ∫_{S^n} V_n(ρ(θ)) dσ(θ)`.
pub fn enclosed_volume(graph: &RadialGraph) -> Result<f64> {
    graph.check_range()?;
    let n = graph.dimension();
    let kernel: Vec<f64> = graph.rho().iter().map(|&r| radial_volume_kernel(n, r)).collect();
    Ok(graph.grid().integrate(&kernel))
}

/// `d/dc 𝒜₋₁(ρ + c) = ∫ sinh^n ρ dσ`.
pub fn enclosed_volume_shift_derivative(graph: &RadialGraph) -> f64 {
    let n = graph.dimension() as i32;
    let v: Vec<f64> = graph.rho().iter().map(|r| r.sinh().powi(n)).collect();
    graph.grid().integrate(&v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuermassVector {
    n: usize,
    values: Vec<f64>,
    /// Average Gauss curvature `∫K dμ / |M|`.
    pub kbar: f64,
}

impl QuermassVector {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// `𝒜_k` for `-1 ≤ k ≤ n`.
    pub fn get(&self, k: i32) -> f64 {
        assert!(k >= -1 && k <= self.n as i32, "quermassintegral index {k} out of range");
        self.values[(k + 1) as usize]
    }

    /// `𝒜₋₁, 𝒜₀, …, 𝒜_n` in order.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn volume(&self) -> f64 {
        self.values[0]
    }

    pub fn area(&self) -> f64 {
        self.values[1]
    }
}

/// Relative tolerance between the direct and recursion forms of `K̄`.
pub const KBAR_TOLERANCE: f64 = 1e-6;

pub fn quermassintegrals(graph: &RadialGraph, fields: &GeometryFields) -> Result<QuermassVector> {
    let n = graph.dimension();
    debug_assert_eq!(fields.len(), graph.len());
    let mut values = Vec::with_capacity(n + 2);
    values.push(enclosed_volume(graph)?);
    values.push(fields.area());
    for k in 1..=n {
        let sigma_k: Vec<f64> = (0..fields.len()).map(|j| fields.sigma_at(j, k)).collect();
        let integral = fields.integrate(&sigma_k);
        let a = if k == 1 {
            integral - n as f64 * values[0]
        } else {
            integral - (n - k + 1) as f64 / (k - 1) as f64 * values[k - 1]
        };
        values.push(a);
    }

    let area = values[1];
    let direct = fields.integrate(&fields.gauss) / area;
    let recursion = if n == 1 {
        (values[2] + values[0]) / area
    } else {
        (values[n + 1] + values[n - 1] / (n - 1) as f64) / area
    };
    if (direct - recursion).abs() > KBAR_TOLERANCE * direct.abs() {
        return Err(Error::RecursionMismatch { direct, recursion });
    }
    Ok(QuermassVector {
        n,
        values,
        kbar: direct,
    })
}

/// First variation of `𝒜_k` along a normal velocity `η`:
/// `(k+1) ∫ η σ_{k+1} dμ` for `0 ≤ k ≤ n−1`, and `∫ η dμ` for `k = −1`.
pub fn quermass_variation(fields: &GeometryFields, normal_velocity: &[f64], k: i32) -> f64 {
    let n = fields.dimension() as i32;
    assert!((-1..n).contains(&k), "variation defined for -1 <= k <= n-1");
    if k == -1 {
        return fields.integrate(normal_velocity);
    }
    let m = (k + 1) as usize;
    let integrand: Vec<f64> = normal_velocity
        .iter()
        .enumerate()
        .map(|(j, eta)| eta * fields.sigma_at(j, m))
        .collect();
    (k + 1) as f64 * fields.integrate(&integrand)
}
