use gaussflow::quermass::quermass_variation;
use gaussflow::{compute_geometry, quermassintegrals, RadialGraph, SphereGrid};

fn check(grid: SphereGrid, rho: impl Fn(f64) -> f64, psi: impl Fn(f64) -> f64) {
    let g = RadialGraph::from_fn(grid.clone(), rho).unwrap();
    let n = g.dimension() as i32;
    let fields = compute_geometry(&g).unwrap();
    let dir: Vec<f64> = grid.theta().iter().map(|&t| psi(t)).collect();
    // A radial displacement δρ moves the surface normally by δρ·u/sinh ρ.
    let eta: Vec<f64> = dir
        .iter()
        .zip(g.rho())
        .zip(&fields.support)
        .map(|((d, r), u)| d * u / r.sinh())
        .collect();
    let ds = 1e-5;
    let moved = |s: f64| {
        let rho: Vec<f64> = g.rho().iter().zip(&dir).map(|(r, d)| r + s * d).collect();
        let h = g.with_rho(rho).unwrap();
        quermassintegrals(&h, &compute_geometry(&h).unwrap()).unwrap()
    };
    let (plus, minus) = (moved(ds), moved(-ds));
    for k in -1..n {
        let fd = (plus.get(k) - minus.get(k)) / (2.0 * ds);
        let exact = quermass_variation(&fields, &eta, k);
        assert!(
            (fd - exact).abs() <= 1e-3 * exact.abs().max(1e-12),
            "n={n} k={k}: finite difference {fd} vs variation {exact}"
        );
    }
}

#[test]
fn first_variation_matches_finite_differences_on_curves() {
    check(
        SphereGrid::circle(256).unwrap(),
        |t| 1.0 + 0.1 * (2.0 * t).cos() + 0.02 * (3.0 * t).sin(),
        |t| 1.0 + 0.5 * t.cos() + 0.3 * (2.0 * t).sin(),
    );
}

#[test]
fn first_variation_matches_finite_differences_on_surfaces() {
    check(
        SphereGrid::axisymmetric(128).unwrap(),
        |t| 0.9 + 0.05 * t.cos().powi(2),
        |t| 1.0 + 0.4 * t.cos() + 0.2 * (3.0 * t.cos().powi(2) - 1.0),
    );
}

#[test]
fn top_quermassintegral_has_no_variation() {
    let g = RadialGraph::from_fn(SphereGrid::circle(128).unwrap(), |t| 1.2 + 0.1 * (2.0 * t).cos()).unwrap();
    let a = quermassintegrals(&g, &compute_geometry(&g).unwrap()).unwrap().get(1);
    let h = RadialGraph::from_fn(g.grid().clone(), |t| {
        1.2 + 0.1 * (2.0 * t).cos() + 1e-3 * (3.0 * t).sin()
    })
    .unwrap();
    let b = quermassintegrals(&h, &compute_geometry(&h).unwrap()).unwrap().get(1);
    assert!((a - b).abs() < 1e-9);
}
