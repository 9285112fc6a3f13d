//! Node layouts on S^n, quadrature, differentiation and interpolation.
//!
//! Two layouts are supported:
//!
//! * [`GridKind::Circle`] (n = 1): `N` uniform angles `θ_j = 2πj/N`.
//!   Derivatives are trigonometric spectral derivatives and the quadrature
//!   is the trapezoid rule, both spectrally accurate for smooth periodic data.
//! * [`GridKind::Axisymmetric`] (n = 2): `N` polar angles on the staggered
//!   grid `θ_j = (j + ½)π/N`, so no node sits on a pole. Derivatives are
//!   fourth-order central differences with even-reflection ghost values
//!   across both poles. Quadrature uses Fejér's first rule in `x = cos θ`,
//!   whose nodes coincide with the staggered grid.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    /// Uniform periodic grid on S^1.
    Circle,
    /// Rotationally symmetric functions on S^2, sampled in the polar angle.
    Axisymmetric,
}

impl GridKind {
    pub fn from_dimension(n: usize) -> Result<Self> {
        match n {
            1 => Ok(GridKind::Circle),
            2 => Ok(GridKind::Axisymmetric),
            _ => Err(Error::InvalidGrid(format!(
                "dimension n = {n} unsupported (expected 1 or 2)"
            ))),
        }
    }

    /// Dimension `n` of the sphere S^n the grid discretizes.
    pub fn dimension(self) -> usize {
        match self {
            GridKind::Circle => 1,
            GridKind::Axisymmetric => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    kind: GridKind,
    theta: Vec<f64>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(kind: GridKind, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "{nodes} nodes requested, at least {MIN_NODES} required"
            )));
        }
        let (theta, weights) = match kind {
            GridKind::Circle => {
                let h = 2.0 * PI / nodes as f64;
                let theta = (0..nodes).map(|j| j as f64 * h).collect();
                (theta, vec![h; nodes])
            }
            GridKind::Axisymmetric => {
                let h = PI / nodes as f64;
                let theta: Vec<f64> = (0..nodes).map(|j| (j as f64 + 0.5) * h).collect();
                let weights = fejer_weights(&theta)
                    .into_iter()
                    .map(|w| 2.0 * PI * w)
                    .collect();
                (theta, weights)
            }
        };
        Ok(Self {
            kind,
            theta,
            weights,
        })
    }

    pub fn circle(nodes: usize) -> Result<Self> {
        Self::new(GridKind::Circle, nodes)
    }

    pub fn axisymmetric(nodes: usize) -> Result<Self> {
        Self::new(GridKind::Axisymmetric, nodes)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Node angles (azimuth for the circle, polar angle for the axisymmetric grid).
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Quadrature weights for `∫_{S^n} F dσ ≈ Σ w_j F(θ_j)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Uniform node spacing in θ.
    pub fn spacing(&self) -> f64 {
        match self.kind {
            GridKind::Circle => 2.0 * PI / self.len() as f64,
            GridKind::Axisymmetric => PI / self.len() as f64,
        }
    }

    /// Area `ω_n` of the unit sphere S^n.
    pub fn sphere_area(&self) -> f64 {
        match self.kind {
            GridKind::Circle => 2.0 * PI,
            GridKind::Axisymmetric => 4.0 * PI,
        }
    }

    /// Quadrature of nodal values over S^n.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        weighted_sum(&self.weights, values)
    }

    /// First and second θ-derivatives of nodal values.
    pub fn derivatives(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(values.len(), self.len());
        match self.kind {
            GridKind::Circle => spectral_derivatives(values),
            GridKind::Axisymmetric => {
                reflected_fd_derivatives(values, self.spacing())
            }
        }
    }

    /// Band-limited interpolant through nodal values.
    pub fn interpolant(&self, values: &[f64]) -> Interpolant {
        Interpolant::new(self, values)
    }
}

/// Neumaier-compensated `Σ w_i v_i` in index order.
pub fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (w, v) in weights.iter().zip(values) {
        let term = w * v;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Fejér's first rule on `x_j = cos θ_j`, `θ_j = (j + ½)π/N`; the weights
/// integrate `∫_0^π F(θ) sin θ dθ` exactly for polynomials in `cos θ` of
/// degree below `N`.
fn fejer_weights(theta: &[f64]) -> Vec<f64> {
    let n = theta.len();
    theta
        .iter()
        .map(|&t| {
            let tail: f64 = (1..=n / 2)
                .map(|k| {
                    let k = k as f64;
                    (2.0 * k * t).cos() / (4.0 * k * k - 1.0)
                })
                .sum();
            2.0 / n as f64 * (1.0 - 2.0 * tail)
        })
        .collect()
}

fn spectral_derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = values.len();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });
    let mut spec: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fwd.process(&mut spec);

    let mut d1 = spec.clone();
    let mut d2 = spec;
    let half = n / 2;
    for k in 0..n {
        let wave = if k <= half {
            k as f64
        } else {
            k as f64 - n as f64
        };
        // The Nyquist mode has no odd partner on an even grid.
        if n % 2 == 0 && k == half {
            d1[k] = Complex64::new(0.0, 0.0);
        } else {
            d1[k] *= Complex64::new(0.0, wave);
        }
        d2[k] *= -wave * wave;
    }
    inv.process(&mut d1);
    inv.process(&mut d2);
    let scale = 1.0 / n as f64;
    (
        d1.iter().map(|c| c.re * scale).collect(),
        d2.iter().map(|c| c.re * scale).collect(),
    )
}

fn reflected_fd_derivatives(values: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = values.len() as isize;
    // Even reflection across θ = 0 and θ = π on the staggered grid:
    // node -1 mirrors node 0, node N mirrors node N-1.
    let at = |i: isize| -> f64 {
        let j = if i < 0 {
            -i - 1
        } else if i >= n {
            2 * n - 1 - i
        } else {
            i
        };
        values[j as usize]
    };
    let mut d1 = Vec::with_capacity(values.len());
    let mut d2 = Vec::with_capacity(values.len());
    for i in 0..n {
        let (m2, m1, c, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
        d1.push((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h));
        d2.push((-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h));
    }
    (d1, d2)
}

/// Trigonometric interpolant of nodal data.
///
/// On the circle this is the standard Fourier interpolant (Nyquist term as a
/// pure cosine). On the axisymmetric grid the data are extended evenly across
/// both poles and interpolated by a cosine series, which is the natural
/// representation of a smooth rotationally symmetric function in its polar
/// angle.
#[derive(Debug, Clone)]
pub struct Interpolant {
    kind: GridKind,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Interpolant {
    fn new(grid: &SphereGrid, values: &[f64]) -> Self {
        let n = values.len();
        let theta = grid.theta();
        match grid.kind {
            GridKind::Circle => {
                let kmax = n / 2;
                let mut cos = vec![0.0; kmax + 1];
                let mut sin = vec![0.0; kmax + 1];
                for k in 0..=kmax {
                    let (mut a, mut b) = (0.0, 0.0);
                    for (t, v) in theta.iter().zip(values) {
                        let (s, c) = (k as f64 * t).sin_cos();
                        a += v * c;
                        b += v * s;
                    }
                    let norm = if k == 0 || (n % 2 == 0 && k == kmax) {
                        1.0 / n as f64
                    } else {
                        2.0 / n as f64
                    };
                    cos[k] = a * norm;
                    sin[k] = if n % 2 == 0 && k == kmax { 0.0 } else { b * norm };
                }
                sin[0] = 0.0;
                Self {
                    kind: grid.kind,
                    cos,
                    sin,
                }
            }
            GridKind::Axisymmetric => {
                let cos = (0..n)
                    .map(|k| {
                        let a: f64 = theta
                            .iter()
                            .zip(values)
                            .map(|(t, v)| v * (k as f64 * t).cos())
                            .sum();
                        if k == 0 {
                            a / n as f64
                        } else {
                            2.0 * a / n as f64
                        }
                    })
                    .collect();
                Self {
                    kind: grid.kind,
                    cos,
                    sin: Vec::new(),
                }
            }
        }
    }

    /// Value and first derivative at angle `theta`.
    pub fn eval(&self, theta: f64) -> (f64, f64) {
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (1.0_f64, 0.0_f64);
        let mut value = self.cos[0];
        let mut deriv = 0.0;
        for k in 1..self.cos.len() {
            let c_next = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = c_next;
            let kf = k as f64;
            let a = self.cos[k];
            let b = if self.kind == GridKind::Circle {
                self.sin[k]
            } else {
                0.0
            };
            value += a * ck + b * sk;
            deriv += kf * (b * ck - a * sk);
        }
        (value, deriv)
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }
}
