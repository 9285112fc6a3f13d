//! Observables along the flow: quermassintegrals, curvature oscillation,
//! best-fit geodesic sphere, and exponential decay rates.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::graph::{direction, RadialGraph};
use crate::grid::GridKind;
use crate::hyperboloid::{minkowski_dot, LorentzPoint};
use crate::quermass::quermassintegrals;
use crate::speed::SpeedFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub volume: f64,
    /// `𝒜₋₁, 𝒜₀, …, 𝒜_n`.
    pub quermass: Vec<f64>,
    pub kbar: f64,
    /// `∫ |K − K̄| dμ`.
    pub osc_k_l1: f64,
    pub kappa_min: f64,
    pub k_max: f64,
    /// `max 1/κ_i`.
    pub b_max: f64,
    pub center: LorentzPoint,
    pub r_fit: f64,
    /// `max |ρ_c − r_fit|` about the fitted center.
    pub hausdorff_proxy: f64,
    /// `max ρ_c − min ρ_c` about the fitted center.
    pub osc_rho: f64,
    /// `−n ∫ (f(K) − f(K̄))(K − K̄) dμ`, the exact rate of change of `𝒜_{n−1}`.
    pub da_pred: f64,
}

impl DiagnosticsRecord {
    /// `𝒜_{n−1}`, the monotone quermassintegral.
    pub fn monotone_quermass(&self) -> f64 {
        self.quermass[self.quermass.len() - 2]
    }
}

pub fn record(state: &FlowState, speed: &SpeedFunction) -> Result<DiagnosticsRecord> {
    let graph = &state.graph;
    let fields = &state.fields;
    let n = graph.dimension();
    let q = quermassintegrals(graph, fields)?;
    let kbar = q.kbar;
    let f_bar = speed.value(kbar)?;

    let dev: Vec<f64> = fields.gauss.iter().map(|k| (k - kbar).abs()).collect();
    let osc_k_l1 = fields.integrate(&dev);
    let prod: Vec<f64> = fields
        .gauss
        .iter()
        .map(|&k| Ok((speed.value(k)? - f_bar) * (k - kbar)))
        .collect::<Result<_>>()?;
    let da_pred = -(n as f64) * fields.integrate(&prod);

    let fit = fit_sphere(graph)?;
    Ok(DiagnosticsRecord {
        t: state.t,
        volume: q.volume(),
        quermass: q.as_slice().to_vec(),
        kbar,
        osc_k_l1,
        kappa_min: fields.kappa_min(),
        k_max: fields.gauss_max(),
        b_max: fields.b_max(),
        center: fit.center,
        r_fit: fit.r_fit,
        hausdorff_proxy: fit.hausdorff_proxy,
        osc_rho: fit.osc_rho,
        da_pred,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFit {
    pub center: LorentzPoint,
    pub r_fit: f64,
    pub hausdorff_proxy: f64,
    pub osc_rho: f64,
    /// Radial function about the fitted center on the original grid angles.
    pub rho_centered: Vec<f64>,
    pub iterations: usize,
}

const FIT_MAX_ITERATIONS: usize = 100;
const FIT_RELATIVE_TOL: f64 = 1e-10;
/// Below this the first-harmonic content is roundoff.
const FIT_ABSOLUTE_TOL: f64 = 1e-13;

/// Locate the center about which the graph has no first-harmonic content,
/// and report the radial deviation from the mean radius about it.
///
/// Moving the center by a small geodesic displacement `δe` changes the
/// radial function by `−δ⟨θ, e⟩` to first order, so the `l = 1` coefficient
/// vector is itself the displacement towards the fitted center.
pub fn fit_sphere(graph: &RadialGraph) -> Result<SphereFit> {
    let resampler = Resampler::new(graph);
    let mut center = graph.center().clone();
    let mut rho_c = resampler.resample(&center)?;
    let mut shift = resampler.first_harmonic(&rho_c);
    let initial = norm(&shift);
    let mut current = initial;
    let tol = (FIT_RELATIVE_TOL * initial).max(FIT_ABSOLUTE_TOL * graph.rho()[0].max(1.0));
    let mut iterations = 0;
    let mut damping = 1.0;

    while current > tol {
        if iterations >= FIT_MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: current,
            });
        }
        iterations += 1;
        let step: Vec<f64> = shift.iter().map(|v| damping * v).collect();
        let trial = center.exp(&step);
        let trial_rho = resampler.resample(&trial)?;
        let trial_shift = resampler.first_harmonic(&trial_rho);
        let trial_norm = norm(&trial_shift);
        if trial_norm < current {
            center = trial;
            rho_c = trial_rho;
            shift = trial_shift;
            current = trial_norm;
            damping = (2.0 * damping).min(1.0);
        } else {
            damping *= 0.5;
        }
    }

    let weights = graph.grid().weights();
    let r_fit = crate::grid::weighted_sum(weights, &rho_c) / graph.grid().sphere_area();
    let (lo, hi) = rho_c
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let hausdorff_proxy = rho_c.iter().map(|r| (r - r_fit).abs()).fold(0.0, f64::max);
    Ok(SphereFit {
        center,
        r_fit,
        hausdorff_proxy,
        osc_rho: hi - lo,
        rho_centered: rho_c,
        iterations,
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Re-expresses a radial graph about another center on the same grid angles.
struct Resampler<'a> {
    graph: &'a RadialGraph,
    interpolant: crate::grid::Interpolant,
}

impl<'a> Resampler<'a> {
    fn new(graph: &'a RadialGraph) -> Self {
        Self {
            graph,
            interpolant: graph.grid().interpolant(graph.rho()),
        }
    }

    fn kind(&self) -> GridKind {
        self.graph.kind()
    }

    /// Ambient point of the interpolated surface at parameter angle `theta`.
    fn point(&self, theta: f64) -> Vec<f64> {
        let (rho, _) = self.interpolant.eval(theta);
        let local = LorentzPoint::from_polar(rho, &direction(self.kind(), theta));
        self.graph.center().boost(local.coords())
    }

    /// Angle of the direction from `center` to the surface point at `theta`.
    fn angle_about(&self, center: &LorentzPoint, theta: f64) -> f64 {
        let y = center.unboost(&self.point(theta));
        match self.kind() {
            GridKind::Circle => y[2].atan2(y[1]),
            GridKind::Axisymmetric => y[1].hypot(y[2]).atan2(y[3]),
        }
    }

    fn resample(&self, center: &LorentzPoint) -> Result<Vec<f64>> {
        let grid = self.graph.grid();
        let theta = grid.theta();
        let len = theta.len();

        // angles of the parameter nodes about `center`, unwrapped to be increasing
        let mut knots: Vec<f64> = theta.iter().map(|&t| self.angle_about(center, t)).collect();
        let (params, period) = match self.kind() {
            GridKind::Circle => {
                for j in 1..len {
                    while knots[j] <= knots[j - 1] {
                        knots[j] += 2.0 * PI;
                    }
                }
                knots.push(knots[0] + 2.0 * PI);
                let mut p = theta.to_vec();
                p.push(2.0 * PI);
                (p, Some(2.0 * PI))
            }
            GridKind::Axisymmetric => {
                knots.insert(0, 0.0);
                knots.push(PI);
                let mut p = Vec::with_capacity(len + 2);
                p.push(0.0);
                p.extend_from_slice(theta);
                p.push(PI);
                (p, None)
            }
        };
        // not star-shaped about the trial center: angles fail to increase
        if let Some(j) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!(
                "graph is not star-shaped about the trial center near node {j}"
            )));
        }

        let mut out = Vec::with_capacity(len);
        for &target in theta {
            let target = match period {
                Some(p) => {
                    let mut t = target;
                    while t < knots[0] {
                        t += p;
                    }
                    while t >= knots[0] + p {
                        t -= p;
                    }
                    t
                }
                None => target,
            };
            let i = knots.partition_point(|&k| k <= target).clamp(1, knots.len() - 1) - 1;
            let reference = knots[i];
            let angle = |s: f64| {
                let a = self.angle_about(center, s);
                match period {
                    Some(p) => reference + wrap(a - reference, p),
                    None => a,
                }
            };
            let s = solve_bracketed(|s| angle(s) - target, params[i], params[i + 1]);
            let x = self.point(s);
            out.push((-minkowski_dot(center.coords(), &x)).max(1.0).acosh());
        }
        Ok(out)
    }

    /// First-harmonic coefficients of nodal data, as an ambient spatial vector.
    fn first_harmonic(&self, rho_c: &[f64]) -> Vec<f64> {
        let grid = self.graph.grid();
        let theta = grid.theta();
        match self.kind() {
            GridKind::Circle => {
                let scale = 2.0 / theta.len() as f64;
                let (mut a, mut b) = (0.0, 0.0);
                for (t, r) in theta.iter().zip(rho_c) {
                    a += r * t.cos();
                    b += r * t.sin();
                }
                vec![scale * a, scale * b]
            }
            GridKind::Axisymmetric => {
                let v: Vec<f64> = theta.iter().zip(rho_c).map(|(t, r)| r * t.cos()).collect();
                let c1 = 3.0 / (4.0 * PI) * grid.integrate(&v);
                vec![0.0, 0.0, c1]
            }
        }
    }
}

/// Wrap into `[-p/2, p/2)`.
fn wrap(x: f64, p: f64) -> f64 {
    x - p * (x / p + 0.5).floor()
}

/// Root of an increasing function on `[lo, hi]` by Newton with a bisection
/// safeguard.
fn solve_bracketed(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let (flo, fhi) = (f(lo), f(hi));
    if flo >= 0.0 {
        return lo;
    }
    if fhi <= 0.0 {
        return hi;
    }
    // linear start
    let mut x = lo - flo * (hi - lo) / (fhi - flo);
    for _ in 0..80 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let h = 1e-7 * (hi - lo).max(1e-9);
        let slope = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut next = x - fx / slope;
        if !(next > lo && next < hi) || !slope.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) || hi - lo <= 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// Decay rate of the slowest stable mode (`l = 2`) of the linearization about
/// the geodesic sphere of radius `rho_inf`:
/// `coth^{n−1}ρ∞ · f'(coth^n ρ∞) · (n + 2) / sinh²ρ∞`.
///
/// The `l = 0` and `l = 1` modes are neutral (volume constraint, translations).
pub fn predicted_rate(rho_inf: f64, speed: &SpeedFunction, n: usize) -> Result<f64> {
    if !(rho_inf > 0.0) {
        return Err(Error::InvalidArgument(format!("rho_inf must be positive, got {rho_inf}")));
    }
    let coth = 1.0 / rho_inf.tanh();
    let s = rho_inf.sinh();
    let df = speed.derivative(coth.powi(n as i32))?;
    Ok(coth.powi(n as i32 - 1) * df * (n as f64 + 2.0) / (s * s))
}

/// Spherical-harmonic eigenvalue factor `l(l+n−1) − n` of `Δ̄ + n` on S^n.
pub fn mode_factor(l: usize, n: usize) -> f64 {
    (l * (l + n - 1)) as f64 - n as f64
}

/// Oscillation window over which the decay rate is fitted.
pub const FIT_WINDOW: (f64, f64) = (1e-8, 1e-3);

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub lambda: f64,
    /// `[t_lo, t_hi]` of the samples used.
    pub window: (f64, f64),
    /// RMS residual of `ln osc` about the fitted line.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares fit of `ln osc = c − λ t` over samples with
/// `osc ∈ [1e-8, 1e-3]`.
pub fn fit_decay(samples: &[(f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, o)| *o >= FIT_WINDOW.0 && *o <= FIT_WINDOW.1)
        .map(|&(t, o)| (t, o.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientDecay);
    }
    let (ymin, ymax) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if ymax - ymin < 100f64.ln() {
        return Err(Error::InsufficientDecay);
    }
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let slope = sty / stt;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - ym - slope * (p.0 - tm)).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(DecayFit {
        lambda: -slope,
        window: (pts[0].0, pts[pts.len() - 1].0),
        residual,
        points: pts.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction {
    pub rho_inf: f64,
    pub lambda_star: f64,
    pub lambda_fit: f64,
    pub window: (f64, f64),
    pub residual: f64,
}

impl RatePrediction {
    pub fn relative_gap(&self) -> f64 {
        (self.lambda_fit - self.lambda_star).abs() / self.lambda_star
    }
}

/// Fit the observed decay of `osc_rho` and compare with the linearized rate at
/// the final fitted radius.
pub fn fit_rate(records: &[DiagnosticsRecord], speed: &SpeedFunction, n: usize) -> Result<RatePrediction> {
    let samples: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.osc_rho)).collect();
    let rho_inf = records.last().ok_or(Error::InsufficientDecay)?.r_fit;
    rate_from_series(&samples, rho_inf, speed, n)
}

pub fn rate_from_series(
    samples: &[(f64, f64)],
    rho_inf: f64,
    speed: &SpeedFunction,
    n: usize,
) -> Result<RatePrediction> {
    let fit = fit_decay(samples)?;
    Ok(RatePrediction {
        rho_inf,
        lambda_star: predicted_rate(rho_inf, speed, n)?,
        lambda_fit: fit.lambda,
        window: fit.window,
        residual: fit.residual,
    })
}

/// Geodesic distance travelled by the fitted center between consecutive
/// records, summed over records with `t ≥ t_from`.
pub fn center_drift(records: &[DiagnosticsRecord], t_from: f64) -> f64 {
    records
        .windows(2)
        .filter(|w| w[0].t >= t_from)
        .map(|w| w[0].center.distance(&w[1].center))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SphereGrid;
    use crate::shapes::off_center_sphere;

    #[test]
    fn centered_sphere_fit_is_trivial() {
        for grid in [SphereGrid::circle(64).unwrap(), SphereGrid::axisymmetric(64).unwrap()] {
            let g = RadialGraph::sphere(grid, 1.0).unwrap();
            let fit = fit_sphere(&g).unwrap();
            assert!(fit.center.norm() < 1e-14);
            assert!((fit.r_fit - 1.0).abs() < 1e-14);
            assert!(fit.hausdorff_proxy < 1e-12);
        }
    }

    #[test]
    fn recovers_translated_sphere() {
        for grid in [SphereGrid::circle(128).unwrap(), SphereGrid::axisymmetric(128).unwrap()] {
            let g = off_center_sphere(grid, 1.0, 0.1).unwrap();
            let fit = fit_sphere(&g).unwrap();
            let offset = fit.center.spatial();
            let axis = if g.dimension() == 1 { 0 } else { 2 };
            let expected = 0.1f64.sinh();
            assert!((offset[axis] - expected).abs() < 1e-8, "{offset:?}");
            assert!((fit.r_fit - 1.0).abs() < 1e-8);
            assert!(fit.hausdorff_proxy < 1e-8, "{}", fit.hausdorff_proxy);
        }
    }

    #[test]
    fn even_perturbation_keeps_center() {
        let eps = 1e-3;
        let g = RadialGraph::from_fn(SphereGrid::circle(64).unwrap(), |t| 1.0 + eps * (2.0 * t).cos()).unwrap();
        let fit = fit_sphere(&g).unwrap();
        assert!(fit.center.norm() < 1e-14);
        assert!((fit.hausdorff_proxy - eps).abs() < 1e-12);
        assert!(fit.hausdorff_proxy <= fit.osc_rho);
    }

    #[test]
    fn predicted_rates() {
        let s2 = 1.0f64.sinh().powi(2);
        let f1 = SpeedFunction::power(1.0).unwrap();
        let l1 = predicted_rate(1.0, &f1, 1).unwrap();
        assert!((l1 - 3.0 / s2).abs() < 1e-14);
        assert!((l1 - 2.1722).abs() < 1e-4);
        let l2 = predicted_rate(1.0, &SpeedFunction::power(2.0).unwrap(), 1).unwrap();
        let coth = 1.0 / 1.0f64.tanh();
        assert!((l2 / l1 - 2.0 * coth).abs() < 1e-13);
        let l = predicted_rate(1.0, &f1, 2).unwrap();
        assert!((l - 4.0 * coth / s2).abs() < 1e-14);
        assert!((l - 3.8030).abs() < 1e-3);
        assert_eq!(mode_factor(2, 1), 3.0);
        assert_eq!(mode_factor(2, 2), 4.0);
        assert_eq!(mode_factor(1, 2), 0.0);
    }

    #[test]
    fn decay_fit_on_exact_exponential() {
        let samples: Vec<(f64, f64)> = (0..200).map(|i| {
            let t = i as f64 * 0.05;
            (t, 2e-3 * (-2.5 * t).exp())
        }).collect();
        let fit = fit_decay(&samples).unwrap();
        assert!((fit.lambda - 2.5).abs() < 1e-10);
        assert!(fit.residual < 1e-10);
        assert!(fit_decay(&samples[..3]).is_err());
        assert_eq!(fit_decay(&[(0.0, 1.0), (1.0, 0.5)]), Err(Error::InsufficientDecay));
    }
}
