//! Shared oracles and fixtures for the integration and acceptance tests.
#![allow(dead_code)]

use gaussflow::hyperboloid::minkowski_dot;
use gaussflow::{FlowEngine, FlowState, RadialGraph, SphereGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Eighth-order periodic central difference of the first and second
/// derivatives of samples on a uniform periodic grid with spacing `h`.
fn periodic_fd8(values: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
    const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let n = values.len() as isize;
    let at = |j: isize| values[j.rem_euclid(n) as usize];
    let mut d1 = Vec::with_capacity(values.len());
    let mut d2 = Vec::with_capacity(values.len());
    for j in 0..n {
        let mut a = 0.0;
        let mut b = D2[0] * at(j);
        for m in 1..=4isize {
            a += D1[m as usize - 1] * (at(j + m) - at(j - m));
            b += D2[m as usize] * (at(j + m) + at(j - m));
        }
        d1.push(a / h);
        d2.push(b / (h * h));
    }
    (d1, d2)
}

/// Geodesic curvature of a closed curve in H² computed from its embedding in
/// the hyperboloid `⟨X, X⟩ = −1` of Minkowski space, by finite differences of
/// the ambient coordinates. Positive for curves that bend towards the origin.
pub fn hyperboloid_curvature(graph: &RadialGraph) -> Vec<f64> {
    assert_eq!(graph.dimension(), 1);
    let pts: Vec<Vec<f64>> = graph.embedding().iter().map(|p| p.coords().to_vec()).collect();
    let h = 2.0 * std::f64::consts::PI / pts.len() as f64;
    let comps: Vec<(Vec<f64>, Vec<f64>)> = (0..3)
        .map(|c| periodic_fd8(&pts.iter().map(|p| p[c]).collect::<Vec<_>>(), h))
        .collect();
    (0..pts.len())
        .map(|j| {
            let x = &pts[j];
            let v: Vec<f64> = (0..3).map(|c| comps[c].0[j]).collect();
            let a: Vec<f64> = (0..3).map(|c| comps[c].1[j]).collect();
            // Lorentz cross product x ⊠ v is tangent to H² and orthogonal to v.
            let cross = |p: &[f64], q: &[f64]| {
                let e = [
                    p[1] * q[2] - p[2] * q[1],
                    p[2] * q[0] - p[0] * q[2],
                    p[0] * q[1] - p[1] * q[0],
                ];
                // Coordinates are (x0 timelike, x1, x2); flip the timelike sign.
                vec![-e[0], e[1], e[2]]
            };
            let mut nu = cross(x, &v);
            // Orient along the outward radial direction ∂ρ.
            let r_s = (x[1] * x[1] + x[2] * x[2]).sqrt();
            let d_rho = [r_s, x[0] * x[1] / r_s, x[0] * x[2] / r_s];
            if minkowski_dot(&nu, &d_rho) < 0.0 {
                nu.iter_mut().for_each(|c| *c = -*c);
            }
            let nu_norm = minkowski_dot(&nu, &nu).sqrt();
            -minkowski_dot(&a, &nu) / (nu_norm * minkowski_dot(&v, &v))
        })
        .collect()
}

/// Seeded random smooth convex curve `ρ = r₀ + Σ (a_m cos mθ + b_m sin mθ)`.
pub fn random_convex_graph(seed: u64, nodes: usize) -> RadialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let r0: f64 = rng.random_range(0.4..2.0);
        let coeffs: Vec<(f64, f64)> = (1..=6)
            .map(|m| {
                let s = 0.08 * r0.min(1.0) / (m * m) as f64;
                (rng.random_range(-s..s), rng.random_range(-s..s))
            })
            .collect();
        let g = RadialGraph::from_fn(SphereGrid::circle(nodes).unwrap(), |t| {
            r0 + coeffs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let m = (i + 1) as f64;
                    a * (m * t).cos() + b * (m * t).sin()
                })
                .sum::<f64>()
        })
        .unwrap();
        if hyperboloid_curvature(&g).iter().all(|&k| k > 0.0) {
            return g;
        }
    }
}

/// Finite-difference Jacobian of `dρ/dt` at `graph`, columns by central
/// differences with step `delta`.
pub fn rhs_jacobian(engine: &FlowEngine, graph: &RadialGraph, delta: f64) -> nalgebra::DMatrix<f64> {
    let m = graph.len();
    let mut jac = nalgebra::DMatrix::zeros(m, m);
    let rhs_at = |rho: Vec<f64>| -> Vec<f64> {
        let state: FlowState = engine.init(graph.with_rho(rho).unwrap()).unwrap();
        state.velocity().to_vec()
    };
    for c in 0..m {
        let mut plus = graph.rho().to_vec();
        let mut minus = graph.rho().to_vec();
        plus[c] += delta;
        minus[c] -= delta;
        let (vp, vm) = (rhs_at(plus), rhs_at(minus));
        for r in 0..m {
            jac[(r, c)] = (vp[r] - vm[r]) / (2.0 * delta);
        }
    }
    jac
}

/// Slowest decaying rate of the discrete linearized operator: the smallest
/// `−Re μ` after discarding the `neutral` eigenvalues of smallest modulus
/// (volume change and translations).
pub fn slowest_decay_rate(jac: &nalgebra::DMatrix<f64>, neutral: usize) -> f64 {
    let mut eig: Vec<nalgebra::Complex<f64>> = jac.complex_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    eig[neutral..].iter().map(|z| -z.re).fold(f64::INFINITY, f64::min)
}

/// Number of neutral modes of the linearization: `l = 0` and the `l = 1`
/// translations representable on the grid.
pub fn neutral_modes(kind: gaussflow::GridKind) -> usize {
    match kind {
        gaussflow::GridKind::Circle => 3,
        gaussflow::GridKind::Axisymmetric => 2,
    }
}
