//! Speed functions `f(K)` and a sampling validator for their admissibility.
//!
//! An admissible speed satisfies, for `x > 0`:
//!
//! 1. `f(x) > 0`, `f'(x) > 0`;
//! 2. `f(x) → ∞` as `x → ∞`;
//! 3. `f(x) ≤ Θ x f'(x)` for some constant `Θ`;
//! 4. `x f''(x) + f'(x) ≥ 0`.
//!
//! Items 2 and 3 are statements about `x → ∞` and cannot be certified on a
//! finite sample; [`validate_assumption`] is a falsifier for them, not a proof.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `a·x^k` of a power sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub a: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SpeedFamily {
    /// `x^α`
    Power { alpha: f64 },
    /// `Σ aᵢ x^{kᵢ}`
    PowerSum { terms: Vec<PowerTerm> },
    /// `eˣ − 1`
    ExpMinusOne,
    /// `x^α ln(1 + x)`
    PowerLog { alpha: f64 },
    /// `ln(1 + x)`: violates the growth bound, kept as a negative control for
    /// the validator. The flow engine refuses it.
    Log1p,
}

impl SpeedFamily {
    fn check_params(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidArgument(format!(
                "{what} must be positive and finite, got {v}"
            )))
        };
        match self {
            SpeedFamily::Power { alpha } | SpeedFamily::PowerLog { alpha } => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return bad("alpha", *alpha);
                }
            }
            SpeedFamily::PowerSum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument("power sum needs at least one term".into()));
                }
                for t in terms {
                    if !(t.a.is_finite() && t.a > 0.0) {
                        return bad("coefficient a", t.a);
                    }
                    if !(t.k.is_finite() && t.k > 0.0) {
                        return bad("exponent k", t.k);
                    }
                }
            }
            SpeedFamily::ExpMinusOne | SpeedFamily::Log1p => {}
        }
        Ok(())
    }

    /// Closed-form `sup_{x>0} f/(x f')` where it exists.
    fn analytic_theta(&self) -> f64 {
        match self {
            SpeedFamily::Power { alpha } | SpeedFamily::PowerLog { alpha } => 1.0 / alpha,
            SpeedFamily::PowerSum { terms } => {
                1.0 / terms.iter().map(|t| t.k).fold(f64::INFINITY, f64::min)
            }
            SpeedFamily::ExpMinusOne => 1.0,
            SpeedFamily::Log1p => f64::INFINITY,
        }
    }
}

/// `(f, f', f'')` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedFunction {
    family: SpeedFamily,
    theta_bound: f64,
}

impl SpeedFunction {
    pub fn new(family: SpeedFamily) -> Result<Self> {
        family.check_params()?;
        let theta_bound = family.analytic_theta();
        Ok(Self {
            family,
            theta_bound,
        })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(SpeedFamily::Power { alpha })
    }

    pub fn power_sum(terms: &[(f64, f64)]) -> Result<Self> {
        Self::new(SpeedFamily::PowerSum {
            terms: terms.iter().map(|&(a, k)| PowerTerm { a, k }).collect(),
        })
    }

    pub fn exp_minus_one() -> Self {
        Self::new(SpeedFamily::ExpMinusOne).expect("parameter-free family")
    }

    pub fn power_log(alpha: f64) -> Result<Self> {
        Self::new(SpeedFamily::PowerLog { alpha })
    }

    pub fn log1p() -> Self {
        Self::new(SpeedFamily::Log1p).expect("parameter-free family")
    }

    pub fn family(&self) -> &SpeedFamily {
        &self.family
    }

    /// Constant `Θ` with `f(x) ≤ Θ x f'(x)`; infinite for the negative control.
    pub fn theta_bound(&self) -> f64 {
        self.theta_bound
    }

    /// Whether the flow engine accepts this function.
    pub fn is_admissible_for_flow(&self) -> bool {
        !matches!(self.family, SpeedFamily::Log1p)
    }

    pub fn eval(&self, x: f64) -> Result<SpeedValue> {
        if !(x > 0.0) {
            return Err(Error::NonPositiveCurvature { x });
        }
        let v = match &self.family {
            SpeedFamily::Power { alpha } => power_term(1.0, *alpha, x),
            SpeedFamily::PowerSum { terms } => {
                terms.iter().fold(
                    SpeedValue {
                        f: 0.0,
                        df: 0.0,
                        d2f: 0.0,
                    },
                    |acc, t| {
                        let v = power_term(t.a, t.k, x);
                        SpeedValue {
                            f: acc.f + v.f,
                            df: acc.df + v.df,
                            d2f: acc.d2f + v.d2f,
                        }
                    },
                )
            }
            SpeedFamily::ExpMinusOne => {
                let e = x.exp();
                SpeedValue {
                    f: x.exp_m1(),
                    df: e,
                    d2f: e,
                }
            }
            SpeedFamily::PowerLog { alpha } => {
                let a = *alpha;
                let l = x.ln_1p();
                let p = x.powf(a);
                let q = 1.0 / (1.0 + x);
                SpeedValue {
                    f: p * l,
                    df: a * p / x * l + p * q,
                    d2f: a * (a - 1.0) * p / (x * x) * l + 2.0 * a * p / x * q - p * q * q,
                }
            }
            SpeedFamily::Log1p => {
                let q = 1.0 / (1.0 + x);
                SpeedValue {
                    f: x.ln_1p(),
                    df: q,
                    d2f: -q * q,
                }
            }
        };
        Ok(v)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.f)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.eval(x).map(|v| v.df)
    }
}

fn power_term(a: f64, k: f64, x: f64) -> SpeedValue {
    let p = a * x.powf(k);
    SpeedValue {
        f: p,
        df: k * p / x,
        d2f: k * (k - 1.0) * p / (x * x),
    }
}

/// Safety factor applied to the sampled sup of `f/(x f')`.
pub const THETA_SAFETY: f64 = 1.2;

/// Relative deceleration below which growth of `f/(x f')` across the top
/// decade counts as saturating rather than unbounded.
pub const SATURATION_RATIO: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// `f > 0` and `f' > 0` on all samples.
    pub positivity: bool,
    /// Heuristic divergence check; sampled, not certified.
    pub divergence: bool,
    /// Growth bound with sampled constant; sampled, not certified.
    pub growth_bound: bool,
    /// `x f'' + f' ≥ 0` on all samples.
    pub concavity: bool,
    /// `1.2 × max f/(x f')` over the samples.
    pub theta_estimate: f64,
    /// Largest sampled `f/(x f')`.
    pub ratio_max: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub samples: usize,
    /// First sample at which `f` or a derivative overflowed, if any; checks
    /// then cover only the samples below it.
    pub overflow_at: Option<f64>,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.positivity && self.divergence && self.growth_bound && self.concavity
    }

    /// Pass flags for items (1)–(4) in order.
    pub fn items(&self) -> [bool; 4] {
        [self.positivity, self.divergence, self.growth_bound, self.concavity]
    }
}

impl std::fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = |b: bool| if b { "pass" } else { "FAIL" };
        writeln!(
            f,
            "range [{:e}, {:e}], {} log-spaced samples",
            self.x_lo, self.x_hi, self.samples
        )?;
        if let Some(x) = self.overflow_at {
            writeln!(f, "f overflows at x = {x:e}; checks use the samples below")?;
        }
        writeln!(f, "(1) f > 0, f' > 0            : {}", mark(self.positivity))?;
        writeln!(
            f,
            "(2) f -> infinity             : {} (sampled, not certified)",
            mark(self.divergence)
        )?;
        writeln!(
            f,
            "(3) f <= Theta x f'           : {} (sampled, not certified), Theta_hat = {:.6}",
            mark(self.growth_bound),
            self.theta_estimate
        )?;
        write!(f, "(4) x f'' + f' >= 0          : {}", mark(self.concavity))
    }
}

/// Sample `f` on `samples` log-spaced points of `[x_lo, x_hi]` and check the
/// four admissibility items.
pub fn validate_assumption(
    speed: &SpeedFunction,
    x_lo: f64,
    x_hi: f64,
    samples: usize,
) -> Result<AssumptionReport> {
    if !(x_lo > 0.0 && x_hi > x_lo && x_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "validation range must satisfy 0 < x_lo < x_hi, got [{x_lo}, {x_hi}]"
        )));
    }
    if samples < 1000 {
        return Err(Error::InvalidArgument(format!(
            "at least 1000 samples required, got {samples}"
        )));
    }
    let (l0, l1) = (x_lo.ln(), x_hi.ln());
    let xs: Vec<f64> = (0..samples)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (samples - 1) as f64).exp())
        .collect();
    let mut vals: Vec<SpeedValue> = xs
        .iter()
        .map(|&x| speed.eval(x))
        .collect::<Result<_>>()?;

    // Past the double-precision range of f the samples carry no information;
    // overflow itself is taken as evidence of divergence.
    let finite = vals
        .iter()
        .position(|v| !(v.f.is_finite() && v.df.is_finite() && v.d2f.is_finite()))
        .unwrap_or(samples);
    let overflowed = finite < samples;
    if finite < 2 {
        return Err(Error::InvalidArgument(format!(
            "f overflows already at x = {:e}",
            xs[finite]
        )));
    }
    let overflow_at = overflowed.then(|| xs[finite]);
    let mut xs = xs;
    xs.truncate(finite);
    vals.truncate(finite);
    let x_top = xs[finite - 1];

    let positivity = vals.iter().all(|v| v.f > 0.0 && v.df > 0.0);

    let top_start = xs.partition_point(|&x| x < x_top / 10.0);
    let tail = &vals[top_start..];
    let tail_increasing = tail.windows(2).all(|w| w[1].f > w[0].f);
    let divergence = vals[finite - 1].f > 10.0 * vals[0].f && tail_increasing;

    let ratios: Vec<f64> = xs
        .iter()
        .zip(&vals)
        .map(|(x, v)| v.f / (x * v.df))
        .collect();
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let growth_bound = ratio_max.is_finite() && !looks_unbounded(&xs, &ratios, x_top);

    let concavity = xs
        .iter()
        .zip(&vals)
        .all(|(x, v)| x * v.d2f + v.df >= -1e-12 * v.df.abs());

    Ok(AssumptionReport {
        positivity,
        divergence,
        growth_bound,
        concavity,
        theta_estimate: THETA_SAFETY * ratio_max,
        ratio_max,
        x_lo,
        x_hi,
        samples,
        overflow_at,
    })
}

/// The ratio is flagged when it rises monotonically across the top decade
/// and that rise is not clearly smaller than the rise over the preceding
/// decade (logarithmic-type growth rather than saturation).
fn looks_unbounded(xs: &[f64], ratios: &[f64], x_hi: f64) -> bool {
    let top = xs.partition_point(|&x| x < x_hi / 10.0);
    let prev = xs.partition_point(|&x| x < x_hi / 100.0);
    let tail = &ratios[top..];
    if tail.len() < 2 {
        return false;
    }
    let scale = tail.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let monotone = tail.windows(2).all(|w| w[1] - w[0] > 1e-12 * scale);
    if !monotone {
        return false;
    }
    let rise_top = tail[tail.len() - 1] - tail[0];
    if prev >= top {
        return true;
    }
    let rise_prev = ratios[top] - ratios[prev];
    rise_prev <= 0.0 || rise_top >= SATURATION_RATIO * rise_prev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<SpeedFunction> {
        vec![
            SpeedFunction::power(1.0).unwrap(),
            SpeedFunction::power(2.0).unwrap(),
            SpeedFunction::power(0.5).unwrap(),
            SpeedFunction::power_sum(&[(1.0, 1.0), (0.5, 3.0)]).unwrap(),
            SpeedFunction::exp_minus_one(),
            SpeedFunction::power_log(1.0).unwrap(),
            SpeedFunction::power_log(0.5).unwrap(),
        ]
    }

    #[test]
    fn closed_form_values() {
        let v = SpeedFunction::power(1.0).unwrap().eval(2.0).unwrap();
        assert_eq!((v.f, v.df, v.d2f), (2.0, 1.0, 0.0));

        let v = SpeedFunction::exp_minus_one().eval(1e-300).unwrap();
        assert!(v.f < 1e-299 && (v.df - 1.0).abs() < 1e-15 && (v.d2f - 1.0).abs() < 1e-15);

        let x = 1.0f64.cosh() / 1.0f64.sinh();
        let v = SpeedFunction::power(2.0).unwrap().eval(x).unwrap();
        assert!((v.f - x * x).abs() < 1e-15);
        assert!((v.f - 1.724_061_6).abs() < 1e-6);
        assert!((v.df - 2.626_070_6).abs() < 1e-6);
    }

    #[test]
    fn rejects_nonpositive_arguments_and_parameters() {
        let f = SpeedFunction::power(1.0).unwrap();
        assert_eq!(f.eval(0.0), Err(Error::NonPositiveCurvature { x: 0.0 }));
        assert!(f.eval(-1.0).is_err());
        assert!(SpeedFunction::power(0.0).is_err());
        assert!(SpeedFunction::power_log(-1.0).is_err());
        assert!(SpeedFunction::power_sum(&[(1.0, -2.0)]).is_err());
        assert!(SpeedFunction::power_sum(&[]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for f in builtins().into_iter().chain([SpeedFunction::log1p()]) {
            for _ in 0..100 {
                let x: f64 = rng.random_range(0.1..10.0);
                let h = 1e-4 * x;
                let v = f.eval(x).unwrap();
                let p = f.eval(x + h).unwrap();
                let m = f.eval(x - h).unwrap();
                let df = (p.f - m.f) / (2.0 * h);
                let d2f = (p.df - m.df) / (2.0 * h);
                assert!((df - v.df).abs() <= 1e-6 * v.df.abs(), "{:?} f' at {x}", f.family());
                assert!(
                    (d2f - v.d2f).abs() <= 1e-6 * v.d2f.abs().max(v.df.abs()),
                    "{:?} f'' at {x}",
                    f.family()
                );
            }
        }
    }

    #[test]
    fn validator_accepts_builtins_and_rejects_log1p_on_item_3() {
        for f in builtins() {
            let r = validate_assumption(&f, 1e-3, 1e3, 2000).unwrap();
            assert!(r.all_pass(), "{:?}: {r}", f.family());
            assert!(f.theta_bound() >= r.ratio_max * (1.0 - 1e-12));
        }
        let r = validate_assumption(&SpeedFunction::log1p(), 1e-3, 1e3, 1000).unwrap();
        assert_eq!(r.items(), [true, true, false, true]);
    }

    #[test]
    fn power_theta_estimate_is_exact() {
        for alpha in [0.5, 1.0, 2.0, 3.5] {
            let r = validate_assumption(&SpeedFunction::power(alpha).unwrap(), 1e-3, 1e3, 1000).unwrap();
            assert!((r.theta_estimate / THETA_SAFETY - 1.0 / alpha).abs() < 1e-10);
        }
        let r = validate_assumption(&SpeedFunction::power(2.0).unwrap(), 1e-3, 1e3, 1000).unwrap();
        assert!((r.theta_estimate - 0.6).abs() < 1e-10);
    }

    #[test]
    fn validator_checks_preconditions() {
        let f = SpeedFunction::power(1.0).unwrap();
        assert!(validate_assumption(&f, 0.0, 1.0, 1000).is_err());
        assert!(validate_assumption(&f, 2.0, 1.0, 1000).is_err());
        assert!(validate_assumption(&f, 1e-3, 1e3, 999).is_err());
    }

    #[test]
    fn speed_family_serde_shape() {
        let f: SpeedFamily = toml::from_str("family = \"power_sum\"\nterms = [{a = 1.0, k = 2.0}]").unwrap();
        assert_eq!(
            f,
            SpeedFamily::PowerSum {
                terms: vec![PowerTerm { a: 1.0, k: 2.0 }]
            }
        );
    }
}
