//! Initial hypersurfaces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compute_geometry, convexity_class, ConvexityClass};
use crate::graph::RadialGraph;
use crate::grid::{GridKind, SphereGrid};
use crate::quermass::ball_volume;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    /// `ρ ≡ r`.
    Sphere { r: f64 },
    /// `ρ = r + eps·Y_l`, with `Y_l = cos lθ` (n = 1) or `P_l(cos θ)` (n = 2).
    Perturbed {
        r: f64,
        eps: f64,
        l: u32,
        /// Shift radially afterwards so the volume equals that of the ball of
        /// this radius.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        match_radius: Option<f64>,
    },
    /// `ρ = r + eps·exp(−θ²/width²)`, periodized in θ so the profile is even
    /// about both θ = 0 and θ = π.
    Bump { r: f64, eps: f64, width: f64 },
}

impl ShapeSpec {
    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("shape.{name} must be positive, got {v}")))
            }
        };
        match *self {
            ShapeSpec::Sphere { r } => positive("r", r),
            ShapeSpec::Perturbed {
                r, eps, match_radius, ..
            } => {
                positive("r", r)?;
                if !eps.is_finite() {
                    return Err(Error::Config("shape.eps must be finite".into()));
                }
                match match_radius {
                    Some(m) => positive("match_radius", m),
                    None => Ok(()),
                }
            }
            ShapeSpec::Bump { r, eps, width } => {
                positive("r", r)?;
                positive("width", width)?;
                if !eps.is_finite() {
                    return Err(Error::Config("shape.eps must be finite".into()));
                }
                Ok(())
            }
        }
    }
}

/// Legendre polynomial `P_l(x)` by the three-term recurrence.
pub fn legendre(l: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Degree-`l` zonal harmonic in the grid's angle.
pub fn zonal_mode(kind: GridKind, l: u32, theta: f64) -> f64 {
    match kind {
        GridKind::Circle => (l as f64 * theta).cos(),
        GridKind::Axisymmetric => legendre(l, theta.cos()),
    }
}

/// Build the initial graph and reject it unless strictly convex.
pub fn make_shape(spec: &ShapeSpec, grid: SphereGrid) -> Result<RadialGraph> {
    spec.validate()?;
    let kind = grid.kind();
    let graph = match *spec {
        ShapeSpec::Sphere { r } => RadialGraph::sphere(grid, r)?,
        ShapeSpec::Perturbed {
            r,
            eps,
            l,
            match_radius,
        } => {
            let g = RadialGraph::from_fn(grid, |t| r + eps * zonal_mode(kind, l, t))?;
            match match_radius {
                Some(m) => {
                    let target = ball_volume(g.dimension(), m);
                    crate::flow::project_volume(&g, target)?
                }
                None => g,
            }
        }
        ShapeSpec::Bump { r, eps, width } => RadialGraph::from_fn(grid, |t| {
            let bump: f64 = (-3..=3)
                .map(|m| {
                    let d = t - 2.0 * PI * m as f64;
                    (-(d * d) / (width * width)).exp()
                })
                .sum();
            r + eps * bump
        })?,
    };
    let fields = compute_geometry(&graph)?;
    if convexity_class(&fields) == ConvexityClass::Nonconvex {
        return Err(Error::NonConvexShape {
            kappa_min: fields.kappa_min(),
        });
    }
    Ok(graph)
}

/// Geodesic sphere of radius `r` whose center is displaced by geodesic
/// distance `offset` from the origin, written as a radial graph about the
/// origin. The displacement is along `x₁` on the circle grid and along the
/// symmetry axis on the axisymmetric grid.
///
/// Solves `cosh r = cosh ρ cosh δ − sinh ρ sinh δ cos ψ` in closed form, `ψ`
/// being the angle between the node direction and the displacement.
pub fn off_center_sphere(grid: SphereGrid, r: f64, offset: f64) -> Result<RadialGraph> {
    if !(offset.abs() < r) {
        return Err(Error::InvalidArgument(format!(
            "offset {offset} must be smaller than the radius {r}"
        )));
    }
    RadialGraph::from_fn(grid, |psi| {
        let a = offset.cosh();
        let b = offset.sinh() * psi.cos();
        let c = r.cosh();
        // (a − b) e^{2ρ} − 2c e^ρ + (a + b) = 0
        let x = (c + (c * c - (a * a - b * b)).sqrt()) / (a - b);
        x.ln()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperboloid::LorentzPoint;

    #[test]
    fn sphere_and_perturbations() {
        let g = make_shape(&ShapeSpec::Sphere { r: 1.0 }, SphereGrid::circle(256).unwrap()).unwrap();
        assert!(g.rho().iter().all(|&r| r == 1.0));

        let spec = ShapeSpec::Perturbed {
            r: 1.0,
            eps: 0.1,
            l: 2,
            match_radius: None,
        };
        let g = make_shape(&spec, SphereGrid::circle(256).unwrap()).unwrap();
        let f = compute_geometry(&g).unwrap();
        assert!(f.kappa_min() > 0.5 && f.kappa_max() < 2.5);

        let bad = ShapeSpec::Perturbed {
            r: 1.0,
            eps: 0.9,
            l: 6,
            match_radius: None,
        };
        for grid in [SphereGrid::circle(256).unwrap(), SphereGrid::axisymmetric(128).unwrap()] {
            match make_shape(&bad, grid) {
                Err(Error::NonConvexShape { kappa_min }) => assert!(kappa_min < 0.0),
                other => panic!("expected rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn volume_matching() {
        let spec = ShapeSpec::Perturbed {
            r: 1.0,
            eps: 0.01,
            l: 2,
            match_radius: Some(1.0),
        };
        let g = make_shape(&spec, SphereGrid::circle(128).unwrap()).unwrap();
        let v = crate::quermass::enclosed_volume(&g).unwrap();
        assert!((v - ball_volume(1, 1.0)).abs() < 1e-13);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(0, 0.3), 1.0);
        assert!((legendre(2, 0.5) - (-0.125)).abs() < 1e-15);
        assert!((legendre(3, 0.5) - (-0.4375)).abs() < 1e-15);
    }

    #[test]
    fn bump_is_even_on_both_grids() {
        let spec = ShapeSpec::Bump {
            r: 1.0,
            eps: 0.05,
            width: 0.8,
        };
        let g = make_shape(&spec, SphereGrid::circle(64).unwrap()).unwrap();
        for j in 1..32 {
            assert!((g.rho()[j] - g.rho()[64 - j]).abs() < 1e-15);
        }
        assert!(make_shape(&spec, SphereGrid::axisymmetric(64).unwrap()).is_ok());
    }

    #[test]
    fn off_center_sphere_is_equidistant() {
        let g = off_center_sphere(SphereGrid::axisymmetric(32).unwrap(), 1.0, 0.3).unwrap();
        let center = LorentzPoint::from_polar(0.3, &[0.0, 0.0, 1.0]);
        for p in g.embedding() {
            assert!((p.distance(&center) - 1.0).abs() < 1e-13);
        }
        let g = off_center_sphere(SphereGrid::circle(32).unwrap(), 0.7, -0.2).unwrap();
        let center = LorentzPoint::from_polar(0.2, &[-1.0, 0.0]);
        for p in g.embedding() {
            assert!((p.distance(&center) - 0.7).abs() < 1e-13);
        }
    }
}
