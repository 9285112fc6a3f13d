use crate::error::{Error, Result};
use crate::grid::{GridKind, SphereGrid};
use crate::hyperboloid::LorentzPoint;

/// Admissible range for the radial function; keeps `sinh`/`cosh` finite
/// with headroom and away from the degenerate point at the center.
pub const RHO_MIN: f64 = 1e-6;
pub const RHO_MAX: f64 = 50.0;

/// Star-shaped hypersurface `{(ρ(θ), θ)}` in geodesic polar coordinates
/// about `center`, sampled on a [`SphereGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGraph {
    grid: SphereGrid,
    rho: Vec<f64>,
    center: LorentzPoint,
}

impl RadialGraph {
    /// Graph about the origin of the hyperboloid model.
    pub fn new(grid: SphereGrid, rho: Vec<f64>) -> Result<Self> {
        let center = LorentzPoint::origin(grid.dimension());
        Self::with_center(grid, rho, center)
    }

    pub fn with_center(grid: SphereGrid, rho: Vec<f64>, center: LorentzPoint) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} radial values for a {}-node grid",
                rho.len(),
                grid.len()
            )));
        }
        if center.ambient_dimension() != grid.dimension() + 1 {
            return Err(Error::InvalidGrid(
                "center lives in a hyperbolic space of the wrong dimension".into(),
            ));
        }
        if let Some((node, &r)) = rho
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::DegenerateRho { node, rho: r });
        }
        Ok(Self { grid, rho, center })
    }

    /// Geodesic sphere of radius `r` about the origin.
    pub fn sphere(grid: SphereGrid, r: f64) -> Result<Self> {
        let rho = vec![r; grid.len()];
        Self::new(grid, rho)
    }

    /// Sample `rho(θ)` at the grid nodes.
    pub fn from_fn(grid: SphereGrid, rho: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.theta().iter().map(|&t| rho(t)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn kind(&self) -> GridKind {
        self.grid.kind()
    }

    /// Dimension `n` of the hypersurface.
    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn center(&self) -> &LorentzPoint {
        &self.center
    }

    /// Same grid and center, new radial values.
    pub fn with_rho(&self, rho: Vec<f64>) -> Result<Self> {
        Self::with_center(self.grid.clone(), rho, self.center.clone())
    }

    /// Uniform radial shift `ρ → ρ + c`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        self.with_rho(self.rho.iter().map(|r| r + c).collect())
    }

    /// `max ρ − min ρ` about the stored center.
    pub fn oscillation(&self) -> f64 {
        let (lo, hi) = self
            .rho
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            });
        hi - lo
    }

    /// Check the guard range used by the geometry kernels.
    pub fn check_range(&self) -> Result<()> {
        match self
            .rho
            .iter()
            .enumerate()
            .find(|(_, r)| !(RHO_MIN..=RHO_MAX).contains(*r))
        {
            Some((node, &rho)) => Err(Error::DegenerateRho { node, rho }),
            None => Ok(()),
        }
    }

    /// Embedded node positions in the hyperboloid model.
    pub fn embedding(&self) -> Vec<LorentzPoint> {
        self.grid
            .theta()
            .iter()
            .zip(&self.rho)
            .map(|(&t, &r)| {
                let local = LorentzPoint::from_polar(r, &direction(self.kind(), t));
                LorentzPoint::from_spatial(&self.center.boost(local.coords())[1..])
            })
            .collect()
    }
}

/// Unit direction in the ambient space for a node angle. The axisymmetric
/// profile lives in the `(x₁, x₃)` half-plane with the symmetry axis along `x₃`.
pub fn direction(kind: GridKind, theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    match kind {
        GridKind::Circle => vec![c, s],
        GridKind::Axisymmetric => vec![s, 0.0, c],
    }
}
