//! Hyperboloid model of H^{n+1}: `{x ∈ R^{1,n+1} : ⟨x,x⟩ = -1, x₀ > 0}`.
//!
//! Radial graphs live in geodesic polar coordinates about a center; this
//! module converts between those coordinates and the ambient Minkowski
//! coordinates and moves centers by pure boosts.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzPoint(Vec<f64>);

/// Minkowski product `-x₀y₀ + Σ xᵢyᵢ`.
pub fn minkowski_dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    -x[0] * y[0] + x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

impl LorentzPoint {
    /// The base point `(1, 0, …, 0)` of H^{n+1}.
    pub fn origin(n: usize) -> Self {
        let mut x = vec![0.0; n + 2];
        x[0] = 1.0;
        Self(x)
    }

    /// Lift a spatial vector onto the upper sheet.
    pub fn from_spatial(spatial: &[f64]) -> Self {
        let s2: f64 = spatial.iter().map(|v| v * v).sum();
        let mut x = Vec::with_capacity(spatial.len() + 1);
        x.push((1.0 + s2).sqrt());
        x.extend_from_slice(spatial);
        Self(x)
    }

    /// Point at geodesic distance `rho` from the origin in unit direction `dir`.
    pub fn from_polar(rho: f64, dir: &[f64]) -> Self {
        let s = rho.sinh();
        let mut x = Vec::with_capacity(dir.len() + 1);
        x.push(rho.cosh());
        x.extend(dir.iter().map(|d| s * d));
        Self(x)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn spatial(&self) -> &[f64] {
        &self.0[1..]
    }

    /// Dimension of the ambient hyperbolic space H^{n+1}.
    pub fn ambient_dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (-minkowski_dot(&self.0, &other.0)).max(1.0).acosh()
    }

    /// Distance to the origin.
    pub fn norm(&self) -> f64 {
        self.0[0].max(1.0).acosh()
    }

    /// Image of `x` under the pure boost taking the origin to `self`.
    pub fn boost(&self, x: &[f64]) -> Vec<f64> {
        boost_apply(self.0[0], &self.0[1..], x, 1.0)
    }

    /// Image of `x` under the inverse boost, i.e. `x` expressed about `self`.
    pub fn unboost(&self, x: &[f64]) -> Vec<f64> {
        boost_apply(self.0[0], &self.0[1..], x, -1.0)
    }

    /// Geodesic polar coordinates `(distance, unit direction)` of `x` about `self`.
    pub fn polar_about(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let y = self.unboost(x);
        let r = y[0].max(1.0).acosh();
        let len = y[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let dir = if len > 0.0 {
            y[1..].iter().map(|v| v / len).collect()
        } else {
            vec![0.0; y.len() - 1]
        };
        (r, dir)
    }

    /// Exponential map at `self` of a tangent vector given in the frame
    /// carried over from the origin by the pure boost to `self`.
    pub fn exp(&self, tangent: &[f64]) -> Self {
        let len = tangent.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            return self.clone();
        }
        let dir: Vec<f64> = tangent.iter().map(|v| v / len).collect();
        let local = Self::from_polar(len, &dir);
        Self(self.boost(&local.0))
    }
}

fn boost_apply(gamma: f64, beta: &[f64], x: &[f64], sign: f64) -> Vec<f64> {
    let bx: f64 = beta.iter().zip(&x[1..]).map(|(b, v)| b * v).sum();
    let mut y = Vec::with_capacity(x.len());
    y.push(gamma * x[0] + sign * bx);
    let k = bx / (gamma + 1.0);
    for (b, v) in beta.iter().zip(&x[1..]) {
        y.push(v + sign * b * x[0] + k * b);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boost_moves_origin_and_preserves_form() {
        let p = LorentzPoint::from_spatial(&[0.3, -0.2, 0.1]);
        let o = LorentzPoint::origin(2);
        let img = p.boost(o.coords());
        for (a, b) in img.iter().zip(p.coords()) {
            assert!((a - b).abs() < 1e-15);
        }
        let q = LorentzPoint::from_polar(1.2, &[0.0, 0.6, 0.8]);
        let back = p.unboost(&p.boost(q.coords()));
        for (a, b) in back.iter().zip(q.coords()) {
            assert!((a - b).abs() < 1e-14);
        }
        let moved = LorentzPoint(p.boost(q.coords()));
        assert!((minkowski_dot(moved.coords(), moved.coords()) + 1.0).abs() < 1e-13);
        // boosts are isometries
        let r = LorentzPoint::from_polar(0.4, &[1.0, 0.0, 0.0]);
        let d0 = q.distance(&r);
        let d1 = moved.distance(&LorentzPoint(p.boost(r.coords())));
        assert!((d0 - d1).abs() < 1e-13);
    }

    #[test]
    fn exp_travels_geodesic_distance() {
        let p = LorentzPoint::from_polar(0.7, &[0.0, 1.0]);
        let q = p.exp(&[0.25, 0.0]);
        assert!((p.distance(&q) - 0.25).abs() < 1e-14);
        let (r, dir) = p.polar_about(q.coords());
        assert!((r - 0.25).abs() < 1e-14);
        assert!((dir[0] - 1.0).abs() < 1e-13);
    }
}
