//! Time integration of the radial flow
//!
//! ```text
//! ∂ₜρ = (φ(t) − f(K)) √(1 + |∇̄ρ|²/sinh²ρ),   φ(t) = ∫ f(K) dμ / |M_t|
//! ```
//!
//! The radical equals `sinh ρ / u` and is evaluated through the support
//! function. Steps are classical RK4 with `φ` recomputed at every stage,
//! followed by an optional uniform radial shift restoring the initial volume.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{record, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::geometry::{compute_geometry, GeometryFields};
use crate::graph::RadialGraph;
use crate::quermass::{enclosed_volume, enclosed_volume_shift_derivative};
use crate::speed::SpeedFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Fraction of the parabolic stability limit used for `dt`.
    pub cfl: f64,
    /// Restore the initial volume after every step.
    pub projection: bool,
    pub t_max: f64,
    /// Stop once the oscillation of ρ about the fitted center drops below this.
    pub conv_tol: f64,
    /// Steps between diagnostics records.
    pub record_every: usize,
    /// Include the volume-preserving global term φ(t); when false φ ≡ 0.
    pub global_term: bool,
    /// Relative volume tolerance enforced after projection.
    pub vol_tol: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            projection: true,
            t_max: 10.0,
            conv_tol: 1e-9,
            record_every: 50,
            global_term: true,
            vol_tol: 1e-9,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("engine.{name} must be positive, got {v}")))
            }
        };
        positive("cfl", self.cfl)?;
        positive("t_max", self.t_max)?;
        positive("conv_tol", self.conv_tol)?;
        positive("vol_tol", self.vol_tol)?;
        if self.record_every == 0 {
            return Err(Error::Config("engine.record_every must be at least 1".into()));
        }
        if self.projection && !self.global_term {
            return Err(Error::Config(
                "volume projection requires the global term".into(),
            ));
        }
        Ok(())
    }
}

/// Snapshot of the evolving hypersurface with cached geometry.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub graph: RadialGraph,
    pub t: f64,
    pub fields: GeometryFields,
    /// Global term φ at the current state.
    pub phi: f64,
    /// Enclosed volume at t = 0.
    pub v0: f64,
    pub step_count: usize,
    pub dt_last: f64,
    velocity: Vec<f64>,
}

impl FlowState {
    /// Cached `dρ/dt` at the current state.
    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }
}

/// `φ = Σ f(K)·dμ / Σ dμ`.
pub fn global_term(fields: &GeometryFields, speed: &SpeedFunction) -> Result<f64> {
    let f: Vec<f64> = fields
        .gauss
        .iter()
        .map(|&k| speed.value(k))
        .collect::<Result<_>>()?;
    Ok(fields.integrate(&f) / fields.area())
}

/// Explicit stability limit `cfl·h²/(2n·D_max)` with
/// `D = f'(K)·K·max_i(1/κ_i)/sinh²ρ`, the largest eigenvalue of the
/// linearized diffusion `f'(K) K b^{ij}` in round-sphere units.
pub fn stable_dt(state: &FlowState, speed: &SpeedFunction, cfl: f64) -> Result<f64> {
    let fields = &state.fields;
    let mut d_max = 0.0f64;
    for j in 0..fields.len() {
        let k = fields.gauss[j];
        let kmin = fields.kappa_at(j).iter().copied().fold(f64::INFINITY, f64::min);
        let s = state.graph.rho()[j].sinh();
        let d = speed.derivative(k)? * k / (kmin * s * s);
        d_max = d_max.max(d);
    }
    let h = state.graph.grid().spacing();
    let n = state.graph.dimension() as f64;
    Ok(cfl * h * h / (2.0 * n * d_max))
}

#[derive(Debug, Clone)]
pub enum RunStatus {
    Converged,
    TMaxReached,
    Aborted(Error),
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub records: Vec<DiagnosticsRecord>,
    pub final_state: FlowState,
}

#[derive(Debug, Clone)]
pub struct FlowEngine {
    speed: SpeedFunction,
    config: EngineConfig,
}

impl FlowEngine {
    pub fn new(speed: SpeedFunction, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        if !speed.is_admissible_for_flow() {
            return Err(Error::Config(format!(
                "speed family {:?} is a validator-only negative control",
                speed.family()
            )));
        }
        Ok(Self { speed, config })
    }

    pub fn speed(&self) -> &SpeedFunction {
        &self.speed
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    /// Geometry, global term and `dρ/dt` for a graph.
    fn evaluate(&self, graph: &RadialGraph, t: f64) -> Result<(GeometryFields, f64, Vec<f64>)> {
        let fields = compute_geometry(graph)?;
        let f: Vec<f64> = fields
            .gauss
            .iter()
            .map(|&k| self.speed.value(k))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::ConvexityLost {
                t,
                kappa_min: fields.kappa_min(),
            })?;
        let phi = if self.config.global_term {
            fields.integrate(&f) / fields.area()
        } else {
            0.0
        };
        let velocity = graph
            .rho()
            .iter()
            .zip(&f)
            .zip(&fields.support)
            .map(|((r, fk), u)| (phi - fk) * r.sinh() / u)
            .collect();
        Ok((fields, phi, velocity))
    }

    /// Initial state; rejects graphs that are not strictly convex.
    pub fn init(&self, graph: RadialGraph) -> Result<FlowState> {
        let fields = compute_geometry(&graph)?;
        let kmin = fields.kappa_min();
        if !(kmin > 0.0) {
            return Err(Error::ConvexityLost {
                t: 0.0,
                kappa_min: kmin,
            });
        }
        let (fields, phi, velocity) = self.evaluate(&graph, 0.0)?;
        let v0 = enclosed_volume(&graph)?;
        Ok(FlowState {
            graph,
            t: 0.0,
            fields,
            phi,
            v0,
            step_count: 0,
            dt_last: 0.0,
            velocity,
        })
    }

    /// `dρ/dt` at the current state.
    pub fn rhs<'a>(&self, state: &'a FlowState) -> &'a [f64] {
        state.velocity()
    }

    pub fn stable_dt(&self, state: &FlowState) -> Result<f64> {
        stable_dt(state, &self.speed, self.config.cfl)
    }

    /// One step at the stability-limited `dt`.
    pub fn step(&self, state: &FlowState) -> Result<FlowState> {
        let dt = self.stable_dt(state)?;
        self.step_with_dt(state, dt)
    }

    /// One RK4 step of size `dt`, then projection and convexity check.
    pub fn step_with_dt(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let t = state.t;
        let rho = state.graph.rho();
        let reject = |reason: &str| Error::StepRejected {
            t,
            reason: reason.to_string(),
        };
        let stage = |k: &[f64], a: f64| -> Result<RadialGraph> {
            let values: Vec<f64> = rho.iter().zip(k).map(|(r, v)| r + a * v).collect();
            if values.iter().any(|v| !v.is_finite()) {
                return Err(reject("non-finite stage value"));
            }
            state.graph.with_rho(values)
        };

        let k1 = &state.velocity;
        let (_, _, k2) = self.evaluate(&stage(k1, 0.5 * dt)?, t + 0.5 * dt)?;
        let (_, _, k3) = self.evaluate(&stage(&k2, 0.5 * dt)?, t + 0.5 * dt)?;
        let (_, _, k4) = self.evaluate(&stage(&k3, dt)?, t + dt)?;
        let next: Vec<f64> = (0..rho.len())
            .map(|j| rho[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(reject("non-finite radial function"));
        }
        let mut graph = state.graph.with_rho(next)?;

        if self.config.projection {
            graph = project_volume(&graph, state.v0)?;
            let v = enclosed_volume(&graph)?;
            if (v - state.v0).abs() > self.config.vol_tol * state.v0 {
                return Err(reject("volume projection failed"));
            }
        }

        let t_new = t + dt;
        let (fields, phi, velocity) = self.evaluate(&graph, t_new)?;
        let kmin = fields.kappa_min();
        if !(kmin > 0.0) {
            return Err(Error::ConvexityLost {
                t: t_new,
                kappa_min: kmin,
            });
        }
        Ok(FlowState {
            graph,
            t: t_new,
            fields,
            phi,
            v0: state.v0,
            step_count: state.step_count + 1,
            dt_last: dt,
            velocity,
        })
    }

    /// Evolve until convergence or `t_max`, recording diagnostics every
    /// `record_every` steps and at the end.
    pub fn run(&self, graph: RadialGraph) -> Result<RunOutcome> {
        self.run_with(graph, |_, _| {})
    }

    /// As [`run`](Self::run), calling `observer` on every record.
    pub fn run_with<F>(&self, graph: RadialGraph, mut observer: F) -> Result<RunOutcome>
    where
        F: FnMut(&DiagnosticsRecord, &FlowState),
    {
        let mut state = self.init(graph)?;
        let first = record(&state, &self.speed)?;
        observer(&first, &state);
        let converged = first.osc_rho < self.config.conv_tol;
        let mut records = vec![first];
        if converged {
            return Ok(RunOutcome {
                status: RunStatus::Converged,
                records,
                final_state: state,
            });
        }

        let t_max = self.config.t_max;
        let status = loop {
            if state.t >= t_max * (1.0 - 1e-14) {
                break RunStatus::TMaxReached;
            }
            let dt = match self.stable_dt(&state) {
                Ok(dt) => dt.min(t_max - state.t),
                Err(e) => break RunStatus::Aborted(e),
            };
            state = match self.step_with_dt(&state, dt) {
                Ok(s) => s,
                Err(e) => break RunStatus::Aborted(e),
            };
            if state.step_count % self.config.record_every == 0 {
                match record(&state, &self.speed) {
                    Ok(rec) => {
                        observer(&rec, &state);
                        let done = rec.osc_rho < self.config.conv_tol;
                        records.push(rec);
                        if done {
                            break RunStatus::Converged;
                        }
                    }
                    Err(e) => break RunStatus::Aborted(e),
                }
            }
        };

        let recorded_last = records.last().map(|r| r.t) == Some(state.t);
        if !recorded_last && !matches!(status, RunStatus::Aborted(_)) {
            let rec = record(&state, &self.speed)?;
            observer(&rec, &state);
            records.push(rec);
        }
        Ok(RunOutcome {
            status,
            records,
            final_state: state,
        })
    }
}

/// Uniform shift `ρ → ρ + c` with `enclosed_volume(ρ + c) = target`, by at
/// most three Newton iterations.
pub fn project_volume(graph: &RadialGraph, target: f64) -> Result<RadialGraph> {
    let mut shifted = graph.clone();
    let mut c = 0.0;
    for _ in 0..3 {
        let residual = enclosed_volume(&shifted)? - target;
        if residual.abs() <= 4.0 * f64::EPSILON * target {
            break;
        }
        c -= residual / enclosed_volume_shift_derivative(&shifted);
        shifted = graph.shifted(c)?;
    }
    Ok(shifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SphereGrid;

    fn perturbed(n_nodes: usize, eps: f64) -> RadialGraph {
        RadialGraph::from_fn(SphereGrid::circle(n_nodes).unwrap(), |t| 1.0 + eps * (2.0 * t).cos()).unwrap()
    }

    #[test]
    fn sphere_is_stationary() {
        for r in [0.5, 1.0, 2.0] {
            let g = RadialGraph::sphere(SphereGrid::circle(64).unwrap(), r).unwrap();
            let engine = FlowEngine::new(SpeedFunction::power(2.0).unwrap(), EngineConfig::default()).unwrap();
            let s = engine.init(g).unwrap();
            let max = engine.rhs(&s).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max <= 1e-11, "r = {r}: {max}");
        }
    }

    #[test]
    fn global_term_is_mean_of_speed() {
        let g = perturbed(128, 0.1);
        let f = SpeedFunction::power(1.0).unwrap();
        let fields = compute_geometry(&g).unwrap();
        let phi = global_term(&fields, &f).unwrap();
        assert!(phi >= fields.gauss_min() && phi <= fields.gauss_max());
        let s = RadialGraph::sphere(SphereGrid::circle(32).unwrap(), 1.0).unwrap();
        let phi = global_term(&compute_geometry(&s).unwrap(), &SpeedFunction::exp_minus_one()).unwrap();
        assert!((phi - (1.0f64 / 1.0f64.tanh()).exp_m1()).abs() < 1e-13);
    }

    #[test]
    fn rhs_relaxes_toward_sphere_and_keeps_parity() {
        let g = perturbed(64, 0.01);
        let engine = FlowEngine::new(SpeedFunction::power(1.0).unwrap(), EngineConfig::default()).unwrap();
        let s = engine.init(g).unwrap();
        let v = engine.rhs(&s);
        // ρ maximal at θ = 0, π; minimal at θ = π/2, 3π/2
        assert!(v[0] < 0.0 && v[32] < 0.0);
        assert!(v[16] > 0.0 && v[48] > 0.0);
        for j in 0..64 {
            assert!((v[j] - v[(j + 32) % 64]).abs() < 1e-12);
        }
    }

    #[test]
    fn stable_dt_formula() {
        let g = RadialGraph::sphere(SphereGrid::circle(256).unwrap(), 1.0).unwrap();
        let engine = FlowEngine::new(SpeedFunction::power(1.0).unwrap(), EngineConfig::default()).unwrap();
        let s = engine.init(g).unwrap();
        let h = 2.0 * std::f64::consts::PI / 256.0;
        let d = 1.0 / 1.0f64.sinh().powi(2);
        let expected = 0.4 * h * h / (2.0 * d);
        assert!((engine.stable_dt(&s).unwrap() - expected).abs() < 1e-15);

        // dt ∝ N⁻²
        let g2 = RadialGraph::sphere(SphereGrid::circle(512).unwrap(), 1.0).unwrap();
        let s2 = engine.init(g2).unwrap();
        assert!((engine.stable_dt(&s2).unwrap() * 4.0 - expected).abs() < 1e-15);

        // doubling f' halves dt
        let engine2 = FlowEngine::new(SpeedFunction::power_sum(&[(2.0, 1.0)]).unwrap(), EngineConfig::default()).unwrap();
        let s3 = engine2.init(RadialGraph::sphere(SphereGrid::circle(256).unwrap(), 1.0).unwrap()).unwrap();
        assert!((engine2.stable_dt(&s3).unwrap() * 2.0 - expected).abs() < 1e-15);
    }

    #[test]
    fn projection_holds_volume() {
        let engine = FlowEngine::new(SpeedFunction::power(1.0).unwrap(), EngineConfig::default()).unwrap();
        let mut s = engine.init(perturbed(64, 0.1)).unwrap();
        for _ in 0..200 {
            s = engine.step(&s).unwrap();
            let v = enclosed_volume(&s.graph).unwrap();
            assert!((v - s.v0).abs() <= 1e-10 * s.v0);
        }
    }

    #[test]
    fn rejects_nonconvex_and_negative_control() {
        let engine = FlowEngine::new(SpeedFunction::power(1.0).unwrap(), EngineConfig::default()).unwrap();
        let g = RadialGraph::from_fn(SphereGrid::circle(128).unwrap(), |t| 1.0 + 0.5 * (6.0 * t).cos()).unwrap();
        assert!(matches!(engine.init(g), Err(Error::ConvexityLost { t, .. }) if t == 0.0));
        assert!(FlowEngine::new(SpeedFunction::log1p(), EngineConfig::default()).is_err());
        let bad = EngineConfig {
            projection: true,
            global_term: false,
            ..EngineConfig::default()
        };
        assert!(FlowEngine::new(SpeedFunction::power(1.0).unwrap(), bad).is_err());
    }
}
