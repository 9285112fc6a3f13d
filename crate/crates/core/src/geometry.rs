//! Pointwise extrinsic geometry of a radial graph in H^{n+1}.
//!
//! With `s = sinh ρ`, `c = cosh ρ`, round-sphere metric `σ` and covariant
//! derivatives `ρ_i`, `ρ_ij` on S^n:
//!
//! ```text
//! g_ij = ρ_i ρ_j + s² σ_ij
//! h_ij = (−s ρ_ij + 2c ρ_i ρ_j + s² c σ_ij) / √(s² + |∇̄ρ|²)
//! u    = s² / √(s² + |∇̄ρ|²)
//! K    = det(−s ρ_ij + 2c ρ_i ρ_j + s² c σ_ij) / ((s² + |∇̄ρ|²)^{(n+2)/2} s^{2(n−1)} det σ)
//! ```
//!
//! On the axisymmetric grid the coordinates are `(θ, φ)` with
//! `σ = diag(1, sin²θ)`. The only nonzero Christoffel symbols are
//! `Γ^θ_φφ = −sinθ cosθ` and `Γ^φ_θφ = cotθ`, so for `ρ = ρ(θ)`:
//!
//! * `ρ_θθ = ρ''`
//! * `ρ_θφ = 0`
//! * `ρ_φφ = −Γ^θ_φφ ρ' = sinθ cosθ ρ'`

use crate::error::{Error, Result};
use crate::graph::RadialGraph;
use crate::grid::GridKind;

/// Row-major 2×2 matrix; for n = 1 only entry `[0][0]` is used.
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields {
    n: usize,
    /// Induced metric `g_ij` in coordinate components.
    pub metric: Vec<Mat2>,
    /// Second fundamental form `h_ij` in coordinate components.
    pub second_form: Vec<Mat2>,
    /// Weingarten map `h_i^j = g^{jk} h_ki`.
    pub weingarten: Vec<Mat2>,
    /// Principal curvatures, ascending; first `n` entries valid.
    pub kappa: Vec<[f64; 2]>,
    /// `σ_1 … σ_n`; first `n` entries valid.
    pub sigma: Vec<[f64; 2]>,
    /// Gauss curvature from the determinant formula.
    pub gauss: Vec<f64>,
    /// Mean curvature `σ_1` (trace of the Weingarten map).
    pub mean: Vec<f64>,
    /// Support function `u = ⟨sinh ρ ∂_ρ, ν⟩`.
    pub support: Vec<f64>,
    /// `√det g / √det σ` times the quadrature weight: `Σ area_weight = |M|`.
    pub area_weight: Vec<f64>,
    /// `|∇̄ρ|` in the round metric.
    pub grad_rho_norm: Vec<f64>,
}

impl GeometryFields {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.gauss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gauss.is_empty()
    }

    /// Principal curvatures at node `j`.
    pub fn kappa_at(&self, j: usize) -> &[f64] {
        &self.kappa[j][..self.n]
    }

    /// `σ_k` at node `j`, `1 ≤ k ≤ n`.
    pub fn sigma_at(&self, j: usize, k: usize) -> f64 {
        self.sigma[j][k - 1]
    }

    pub fn kappa_min(&self) -> f64 {
        (0..self.len())
            .flat_map(|j| self.kappa_at(j).iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn kappa_max(&self) -> f64 {
        (0..self.len())
            .flat_map(|j| self.kappa_at(j).iter().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gauss_max(&self) -> f64 {
        self.gauss.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gauss_min(&self) -> f64 {
        self.gauss.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest principal radius `max_i 1/κ_i` over the surface.
    pub fn b_max(&self) -> f64 {
        1.0 / self.kappa_min()
    }

    /// `|M| = Σ area_weight`.
    pub fn area(&self) -> f64 {
        crate::grid::weighted_sum(&vec![1.0; self.len()], &self.area_weight)
    }

    /// `∫_M F dμ` for nodal values `F`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        crate::grid::weighted_sum(&self.area_weight, values)
    }
}

/// Compute all extrinsic geometry of `graph`.
pub fn compute_geometry(graph: &RadialGraph) -> Result<GeometryFields> {
    graph.check_range()?;
    let grid = graph.grid();
    let n = graph.dimension();
    let len = graph.len();
    let (d1, d2) = grid.derivatives(graph.rho());

    let mut out = GeometryFields {
        n,
        metric: Vec::with_capacity(len),
        second_form: Vec::with_capacity(len),
        weingarten: Vec::with_capacity(len),
        kappa: Vec::with_capacity(len),
        sigma: Vec::with_capacity(len),
        gauss: Vec::with_capacity(len),
        mean: Vec::with_capacity(len),
        support: Vec::with_capacity(len),
        area_weight: Vec::with_capacity(len),
        grad_rho_norm: Vec::with_capacity(len),
    };

    for j in 0..len {
        let rho = graph.rho()[j];
        let (s, c) = (rho.sinh(), rho.cosh());
        let (p, pp) = (d1[j], d2[j]);
        let grad2 = p * p;
        let w = (s * s + grad2).sqrt();
        let u = s * s / w;
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::NonStarShaped { node: j, u });
        }

        // A_ij = −s ρ_ij + 2c ρ_i ρ_j + s² c σ_ij
        let a_tt = -s * pp + 2.0 * c * grad2 + s * s * c;
        let (g, a, det_sigma) = match grid.kind() {
            GridKind::Circle => ([[grad2 + s * s, 0.0], [0.0, 0.0]], [[a_tt, 0.0], [0.0, 0.0]], 1.0),
            GridKind::Axisymmetric => {
                let (st, ct) = grid.theta()[j].sin_cos();
                let hess_pp = st * ct * p;
                let a_pp = -s * hess_pp + s * s * c * st * st;
                (
                    [[grad2 + s * s, 0.0], [0.0, s * s * st * st]],
                    [[a_tt, 0.0], [0.0, a_pp]],
                    st * st,
                )
            }
        };
        let h = scale(&a, 1.0 / w);

        let (weing, kappa, gauss, mean) = if n == 1 {
            let k = h[0][0] / g[0][0];
            let gauss = a[0][0] / (w * w * w);
            ([[k, 0.0], [0.0, 0.0]], [k, 0.0], gauss, k)
        } else {
            let weing = mul(&inverse(&g), &h);
            let kappa = eigenvalues(&weing);
            let gauss = det(&a) / (w.powi(4) * s * s * det_sigma);
            (weing, kappa, gauss, weing[0][0] + weing[1][1])
        };

        out.metric.push(g);
        out.second_form.push(h);
        out.weingarten.push(weing);
        out.kappa.push(kappa);
        out.sigma.push(if n == 1 { [gauss, 0.0] } else { [mean, gauss] });
        out.gauss.push(gauss);
        out.mean.push(mean);
        out.support.push(u);
        out.area_weight.push(grid.weights()[j] * w * s.powi(n as i32 - 1));
        out.grad_rho_norm.push(p.abs());
    }
    Ok(out)
}

fn scale(m: &Mat2, k: f64) -> Mat2 {
    [[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]]
}

fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inverse(m: &Mat2) -> Mat2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][k] + a[i][1] * b[1][k];
        }
    }
    out
}

/// Real eigenvalues of a 2×2 matrix that is self-adjoint for some inner
/// product, ascending. The larger-magnitude root is taken from the quadratic
/// formula and the other from `det/λ` to avoid cancellation.
pub fn eigenvalues(m: &Mat2) -> [f64; 2] {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    let disc = (half_diff * half_diff + m[0][1] * m[1][0]).max(0.0).sqrt();
    let d = det(m);
    let big = if half_tr >= 0.0 { half_tr + disc } else { half_tr - disc };
    let small = if big != 0.0 { d / big } else { half_tr - disc };
    if big <= small {
        [big, small]
    } else {
        [small, big]
    }
}

/// Nested convexity classes, weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConvexityClass {
    Nonconvex,
    /// All `κ_i > 0`.
    Convex,
    /// All `κ_i κ_j > 1` for `i ≠ j` (for curves, `κ² > 1`).
    PositiveSectional,
    /// All `κ_i ≥ 1` (horospherically convex).
    HConvex,
}

/// Strongest convexity class satisfied at every node.
pub fn convexity_class(fields: &GeometryFields) -> ConvexityClass {
    let kmin = fields.kappa_min();
    if !(kmin > 0.0) {
        return ConvexityClass::Nonconvex;
    }
    if kmin >= 1.0 {
        return ConvexityClass::HConvex;
    }
    let sectional_min = (0..fields.len())
        .map(|j| {
            let k = fields.kappa_at(j);
            if k.len() == 1 {
                k[0] * k[0]
            } else {
                k[0] * k[1]
            }
        })
        .fold(f64::INFINITY, f64::min);
    if sectional_min > 1.0 {
        ConvexityClass::PositiveSectional
    } else {
        ConvexityClass::Convex
    }
}
