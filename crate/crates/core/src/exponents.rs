//! Laplace-exponent models `Φ(t; λ) = -ln E[exp(-λ X_t)]` of additive
//! processes, with the analytic metadata the moment engine relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::specfun::{log_bessel_i_normalized, BesselOrder};

pub type PhiFn<T> = Arc<dyn Fn(T, T) -> Result<T> + Send + Sync>;
pub type LevyFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;
pub type TailFn<T> = Arc<dyn Fn(u32) -> TailDecay<T> + Send + Sync>;
pub type TimeChange<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Large-time behaviour of `g_n(t) = exp(-(Φ(t;n) - Φ(t;n-1)))`, or of
/// any integrand handed to the semi-infinite quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailDecay<T> {
    /// Decays like `exp(-rate·t)` up to polynomial factors; `rate > 0`.
    Exponential(T),
    /// Decays like `t^(-exponent)`.
    Polynomial(T),
    /// No usable decay information.
    Undetermined,
}

/// Geometric Brownian motion first-hit parameters, `ν = (μ - σ²/2)/σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams<T> {
    pub nu: T,
    pub sigma: T,
}

impl<T: Real> GbmParams<T> {
    /// `ρ(β) = (sqrt(2β + ν²) - ν) / σ`.
    pub fn rho(&self, beta: T) -> T {
        ((lit::<T>(2.0) * beta + self.nu * self.nu).sqrt() - self.nu) / self.sigma
    }
}

/// Which analytic moment formula applies to a model, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedMoments<T> {
    None,
    LevyClosedForm,
    GbmClosedForm(GbmParams<T>),
}

/// Optional metadata accepted by [`ExponentModel::custom`].
pub struct CustomMetadata<T> {
    pub levy_exponent: Option<LevyFn<T>>,
    pub tail_rate: Option<TailFn<T>>,
    pub increasing: bool,
}

impl<T> Default for CustomMetadata<T> {
    fn default() -> Self {
        Self { levy_exponent: None, tail_rate: None, increasing: false }
    }
}

/// A named Laplace exponent. Immutable once built and cheap to clone.
#[derive(Clone)]
pub struct ExponentModel<T> {
    name: String,
    params: Vec<(String, T)>,
    phi: PhiFn<T>,
    levy: Option<LevyFn<T>>,
    closed: ClosedMoments<T>,
    tail: Option<TailFn<T>>,
    increasing: bool,
    note: Option<String>,
}

impl<T: Real> fmt::Debug for ExponentModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("levy", &self.levy.is_some())
            .field("closed", &self.closed)
            .field("increasing", &self.increasing)
            .finish()
    }
}

impl<T: Real> ExponentModel<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Construction parameters, in the order they were given.
    pub fn params(&self) -> &[(String, T)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<T> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    /// Caveat attached at construction (e.g. an untested parameter range).
    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    /// `Φ(t; λ)`. Exactly zero when `t = 0` or `λ = 0`.
    pub fn phi(&self, t: T, lambda: T) -> Result<T> {
        if !(t >= T::zero()) || t.is_infinite() {
            return Err(Error::domain("phi", format!("time must be finite and >= 0, got {t}")));
        }
        if !(lambda >= T::zero()) || lambda.is_infinite() {
            return Err(Error::domain("phi", format!("λ must be finite and >= 0, got {lambda}")));
        }
        if t == T::zero() || lambda == T::zero() {
            return Ok(T::zero());
        }
        let v = (self.phi)(t, lambda)?;
        if v.is_nan() {
            return Err(Error::domain("phi", format!("model `{}` returned NaN at t={t}, λ={lambda}", self.name)));
        }
        Ok(v)
    }

    /// `Φ(λ)` for time-homogeneous (Lévy) models.
    pub fn levy_exponent(&self, lambda: T) -> Option<T> {
        self.levy.as_ref().map(|f| f(lambda))
    }

    pub fn is_levy(&self) -> bool {
        self.levy.is_some()
    }

    pub fn closed_moments(&self) -> ClosedMoments<T> {
        self.closed
    }

    pub fn tail_rate(&self, n: u32) -> TailDecay<T> {
        self.tail.as_ref().map_or(TailDecay::Undetermined, |f| f(n))
    }

    pub fn has_tail_rate(&self) -> bool {
        self.tail.is_some()
    }

    /// True for models of increasing processes (first-hit processes,
    /// positive deterministic drift).
    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    fn levy_model(name: &str, params: Vec<(String, T)>, exponent: LevyFn<T>, increasing: bool) -> Self {
        let e = exponent.clone();
        let phi: PhiFn<T> = Arc::new(move |t, l| Ok(t * e(l)));
        let e = exponent.clone();
        let tail: TailFn<T> = Arc::new(move |n| {
            let nf = T::from_u32(n).expect("order fits scalar");
            let rate = e(nf) - e(nf - T::one());
            if rate > T::zero() {
                TailDecay::Exponential(rate)
            } else {
                TailDecay::Undetermined
            }
        });
        Self {
            name: name.to_string(),
            params,
            phi,
            levy: Some(exponent),
            closed: ClosedMoments::LevyClosedForm,
            tail: Some(tail),
            increasing,
            note: None,
        }
    }

    /// `X_t = σ W_t + μ t`: `Φ(λ) = λμ - λ²σ²/2`.
    pub fn brownian_drift(mu: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::model("brownian-drift", format!("mu must be finite, got {mu}")));
        }
        if !(sigma > T::zero()) || sigma.is_infinite() {
            return Err(Error::model("brownian-drift", format!("sigma must be positive, got {sigma}")));
        }
        let half = lit::<T>(0.5);
        let exponent: LevyFn<T> = Arc::new(move |l| l * mu - half * l * l * sigma * sigma);
        Ok(Self::levy_model("brownian-drift", vec![("mu".into(), mu), ("sigma".into(), sigma)], exponent, false))
    }

    /// `X_t = μ t`: `Φ(λ) = λμ`.
    pub fn deterministic_drift(mu: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::model("deterministic-drift", format!("mu must be finite, got {mu}")));
        }
        let exponent: LevyFn<T> = Arc::new(move |l| l * mu);
        Ok(Self::levy_model("deterministic-drift", vec![("mu".into(), mu)], exponent, mu > T::zero()))
    }

    /// `L_{g(t)}` for a Lévy base `L` and an increasing continuous time
    /// change with `g(0) = 0`: `Φ(t; λ) = g(t) Φ_L(λ)`.
    pub fn time_changed_levy(base: &Self, g: TimeChange<T>, label: &str) -> Result<Self> {
        let name = format!("time-changed-{}", base.name);
        let levy = base
            .levy
            .clone()
            .ok_or_else(|| Error::model(&name, format!("base model `{}` is not a Lévy model", base.name)))?;
        let g0 = g(T::zero());
        if g0 != T::zero() {
            return Err(Error::model(&name, format!("time change must satisfy g(0) = 0, got {g0}")));
        }
        let gg = g.clone();
        let phi: PhiFn<T> = Arc::new(move |t, l| Ok(gg(t) * levy(l)));
        Ok(Self {
            name,
            params: base.params.clone(),
            phi,
            levy: None,
            closed: ClosedMoments::None,
            tail: None,
            increasing: base.increasing,
            note: Some(format!("time change g(t) = {label}")),
        })
    }

    /// First-hit process `t ↦ H_{t+v}` of a Bessel process of dimension
    /// `δ > 0` started at `v >= 0`. For `v = 0` the exponent is the
    /// analytic small-start limit.
    pub fn bessel_first_hit(delta: T, v: T) -> Result<Self> {
        let name = "bessel-first-hit";
        if !(delta > T::zero()) || delta.is_infinite() {
            return Err(Error::model(name, format!("dimension delta must be positive, got {delta}")));
        }
        if !(v >= T::zero()) || v.is_infinite() {
            return Err(Error::model(name, format!("starting level v must be >= 0, got {v}")));
        }
        let order = BesselOrder::from_dimension(delta)?;
        let two = lit::<T>(2.0);
        // ln ψ_β(x) up to β-only terms: ln I_p(x√2β) relative to its small-argument law
        let phi: PhiFn<T> = Arc::new(move |t, beta| {
            let k = (two * beta).sqrt();
            let upper = log_bessel_i_normalized(order, (t + v) * k)?;
            if v == T::zero() {
                Ok(upper)
            } else {
                Ok(upper - log_bessel_i_normalized(order, v * k)?)
            }
        });
        let tail: TailFn<T> = Arc::new(move |n| {
            let nf = T::from_u32(n).expect("order fits scalar");
            TailDecay::Exponential((two * nf).sqrt() - (two * (nf - T::one())).sqrt())
        });
        let note = (delta < two).then(|| {
            "dimension below 2: boundary 0 is treated as reflecting; not validated against simulation".to_string()
        });
        Ok(Self {
            name: name.to_string(),
            params: vec![("delta".into(), delta), ("v".into(), v)],
            phi,
            levy: None,
            closed: ClosedMoments::None,
            tail: Some(tail),
            increasing: true,
            note,
        })
    }

    /// First-hit process `t ↦ H_{1+t}` of geometric Brownian motion started
    /// at 1: `Φ(t; β) = ρ(β) ln(1 + t)`. Requires `μ >= σ²/2`.
    pub fn gbm_first_hit(mu: T, sigma: T) -> Result<Self> {
        let name = "gbm-first-hit";
        if !(sigma > T::zero()) || sigma.is_infinite() {
            return Err(Error::model(name, format!("sigma must be positive, got {sigma}")));
        }
        if !mu.is_finite() {
            return Err(Error::model(name, format!("mu must be finite, got {mu}")));
        }
        let half_var = lit::<T>(0.5) * sigma * sigma;
        // allow rounding in the boundary case mu = sigma²/2 entered as decimals
        let slack = lit::<T>(1e-9) * half_var.max(T::one());
        if mu < half_var - slack {
            return Err(Error::model(
                name,
                format!(
                    "mu = {mu} < sigma²/2 = {half_var}: the diffusion is transient to 0 and does not reach all levels"
                ),
            ));
        }
        let nu = ((mu - half_var) / sigma).max(T::zero());
        let gbm = GbmParams { nu, sigma };
        let phi: PhiFn<T> = Arc::new(move |t, beta| Ok(gbm.rho(beta) * t.ln_1p()));
        let tail: TailFn<T> = Arc::new(move |n| {
            let nf = T::from_u32(n).expect("order fits scalar");
            TailDecay::Polynomial(gbm.rho(nf) - gbm.rho(nf - T::one()))
        });
        Ok(Self {
            name: name.to_string(),
            params: vec![("mu".into(), mu), ("sigma".into(), sigma)],
            phi,
            levy: None,
            closed: ClosedMoments::GbmClosedForm(gbm),
            tail: Some(tail),
            increasing: true,
            note: None,
        })
    }

    /// A user-supplied exponent. `Φ(0; λ) = 0` and `Φ(t; 0) = 0` are
    /// checked on a sample grid before the model is accepted.
    pub fn custom(name: &str, phi: PhiFn<T>, meta: CustomMetadata<T>) -> Result<Self> {
        let grid: Vec<T> = [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0].iter().map(|&x| lit(x)).collect();
        let tol = lit::<T>(1e-12);
        for &x in &grid {
            let at_zero_time = phi(T::zero(), x)?;
            if !(at_zero_time.abs() <= tol) {
                return Err(Error::model(name, format!("Φ(0; {x}) = {at_zero_time}, expected 0")));
            }
            let at_zero_lambda = phi(x, T::zero())?;
            if !(at_zero_lambda.abs() <= tol) {
                return Err(Error::model(name, format!("Φ({x}; 0) = {at_zero_lambda}, expected 0")));
            }
        }
        let closed = if meta.levy_exponent.is_some() { ClosedMoments::LevyClosedForm } else { ClosedMoments::None };
        Ok(Self {
            name: name.to_string(),
            params: Vec::new(),
            phi,
            levy: meta.levy_exponent,
            closed,
            tail: meta.tail_rate,
            increasing: meta.increasing,
            note: None,
        })
    }

    /// Builds a built-in model from its registry name and parameters.
    ///
    /// Names: `brownian-drift` (mu, sigma), `deterministic-drift` (mu),
    /// `bessel-first-hit` (delta, v = 0), `gbm-first-hit` (mu, sigma),
    /// `time-changed-brownian` (mu, sigma, power) with `g(t) = t^power`.
    pub fn from_name(name: &str, params: &BTreeMap<String, T>) -> Result<Self> {
        let get = |key: &str| {
            params.get(key).copied().ok_or_else(|| Error::model(name, format!("missing parameter `{key}`")))
        };
        let known: &[&str] = match name {
            "brownian-drift" | "gbm-first-hit" => &["mu", "sigma"],
            "deterministic-drift" => &["mu"],
            "bessel-first-hit" => &["delta", "v"],
            "time-changed-brownian" => &["mu", "sigma", "power"],
            _ => return Err(Error::model(name, "unknown model name")),
        };
        if let Some(extra) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::model(name, format!("unexpected parameter `{extra}`")));
        }
        match name {
            "brownian-drift" => Self::brownian_drift(get("mu")?, get("sigma")?),
            "deterministic-drift" => Self::deterministic_drift(get("mu")?),
            "bessel-first-hit" => Self::bessel_first_hit(get("delta")?, params.get("v").copied().unwrap_or_default()),
            "gbm-first-hit" => Self::gbm_first_hit(get("mu")?, get("sigma")?),
            _ => {
                let power = get("power")?;
                if !(power > T::zero()) {
                    return Err(Error::model(name, format!("power must be positive, got {power}")));
                }
                let base = Self::brownian_drift(get("mu")?, get("sigma")?)?;
                let mut m = Self::time_changed_levy(&base, Arc::new(move |t: T| t.powf(power)), &format!("t^{power}"))?;
                m.name = name.to_string();
                m.params.push(("power".into(), power));
                Ok(m)
            }
        }
    }
}

/// Registry names accepted by [`ExponentModel::from_name`].
pub const MODEL_NAMES: [&str; 5] =
    ["brownian-drift", "deterministic-drift", "bessel-first-hit", "gbm-first-hit", "time-changed-brownian"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_i;
    use approx::assert_relative_eq;

    type Model = ExponentModel<f64>;

    fn builtins() -> Vec<Model> {
        vec![
            Model::brownian_drift(6.0, 2.0).unwrap(),
            Model::deterministic_drift(1.0).unwrap(),
            Model::deterministic_drift(-1.0).unwrap(),
            Model::bessel_first_hit(2.0, 0.0).unwrap(),
            Model::bessel_first_hit(3.0, 0.5).unwrap(),
            Model::bessel_first_hit(1.5, 0.0).unwrap(),
            Model::gbm_first_hit(0.25, 0.5f64.sqrt()).unwrap(),
            Model::gbm_first_hit(1.0, 1.0).unwrap(),
            Model::time_changed_levy(&Model::brownian_drift(6.0, 2.0).unwrap(), Arc::new(|t: f64| t * t), "t^2")
                .unwrap(),
        ]
    }

    #[test]
    fn brownian_examples() {
        let m = Model::brownian_drift(6.0, 2.0).unwrap();
        assert_eq!(m.phi(1.0, 1.0).unwrap(), 4.0);
        assert_eq!(m.phi(3.7, 0.0).unwrap(), 0.0);
        let b = Model::brownian_drift(1.0, 2f64.sqrt()).unwrap();
        assert!(b.levy_exponent(1.0).unwrap().abs() < 1e-15);
        assert!(Model::brownian_drift(1.0, 0.0).is_err());
        assert!(Model::brownian_drift(1.0, -1.0).is_err());
        assert_eq!(m.tail_rate(1), TailDecay::Exponential(4.0));
        assert_eq!(m.tail_rate(2), TailDecay::Undetermined);
    }

    #[test]
    fn deterministic_examples() {
        let zero = Model::deterministic_drift(0.0).unwrap();
        assert_eq!(zero.phi(2.0, 3.0).unwrap(), 0.0);
        let neg = Model::deterministic_drift(-1.0).unwrap();
        assert_eq!(neg.phi(1.0, 1.0).unwrap(), -1.0);
        assert!(Model::deterministic_drift(1.0).unwrap().is_increasing());
    }

    #[test]
    fn time_change_examples() {
        let base = Model::brownian_drift(6.0, 2.0).unwrap();
        let ident = Model::time_changed_levy(&base, Arc::new(|t: f64| t), "t").unwrap();
        for &(t, l) in &[(0.3, 0.5), (1.0, 2.0), (4.0, 1.5)] {
            assert_eq!(ident.phi(t, l).unwrap(), base.phi(t, l).unwrap());
        }
        let sq = Model::time_changed_levy(&base, Arc::new(|t: f64| t * t), "t^2").unwrap();
        assert_eq!(sq.phi(2.0, 1.0).unwrap(), 16.0);
        assert_eq!(sq.phi(0.0, 1.0).unwrap(), 0.0);
        assert!(!sq.is_levy());
        assert!(Model::time_changed_levy(&base, Arc::new(|t: f64| t + 1.0), "t+1").is_err());
        let gbm = Model::gbm_first_hit(1.0, 1.0).unwrap();
        assert!(Model::time_changed_levy(&gbm, Arc::new(|t: f64| t), "t").is_err());
    }

    #[test]
    fn bessel_examples() {
        let m = Model::bessel_first_hit(2.0, 0.0).unwrap();
        let o = BesselOrder::new(0.0).unwrap();
        assert_relative_eq!((-m.phi(1.0, 0.5).unwrap()).exp(), 1.0 / bessel_i(o, 1.0).unwrap(), max_relative = 1e-14);
        assert_eq!(m.phi(0.0, 3.0).unwrap(), 0.0);
        assert!(Model::bessel_first_hit(0.0, 0.0).is_err());
        assert!(Model::bessel_first_hit(-1.0, 0.0).is_err());
        assert!(Model::bessel_first_hit(1.5, 0.0).unwrap().note().is_some());
    }

    #[test]
    fn bessel_v0_matches_explicit_limit_formula() {
        // e^{-Φ} = (√(2β)/2)^p t^p / (Γ(p+1) I_p(t√(2β)))
        let delta = 3.0;
        let p = 0.5;
        let m = Model::bessel_first_hit(delta, 0.0).unwrap();
        let o = BesselOrder::new(p).unwrap();
        for &(t, b) in &[(0.5f64, 1.0f64), (2.0, 0.3), (7.0, 2.0)] {
            let k = (2.0 * b).sqrt();
            let expect = (k / 2.0).powf(p) * t.powf(p)
                / (crate::specfun::log_gamma(p + 1.0).unwrap().exp() * bessel_i(o, t * k).unwrap());
            assert_relative_eq!((-m.phi(t, b).unwrap()).exp(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_small_start_limit() {
        let limit = Model::bessel_first_hit(3.0, 0.0).unwrap();
        let near = Model::bessel_first_hit(3.0, 1e-8).unwrap();
        for &(t, b) in &[(0.5, 1.0), (2.0, 0.3), (7.0, 2.0)] {
            let a = limit.phi(t, b).unwrap();
            let c = near.phi(t, b).unwrap();
            assert!((a - c).abs() <= 1e-4 * a.abs());
        }
    }

    #[test]
    fn bessel_tail_ratio_asymptotics() {
        // δ = 3: g_n(t) e^{t(√2n - √2(n-1))} tends to (n/(n-1))^{p/2 + 1/4}
        let m = Model::bessel_first_hit(3.0, 0.0).unwrap();
        let p = 0.5;
        for n in 2..=4u32 {
            let nf = n as f64;
            let rate = (2.0 * nf).sqrt() - (2.0 * (nf - 1.0)).sqrt();
            let t = 400.0;
            let g = (-(m.phi(t, nf).unwrap() - m.phi(t, nf - 1.0).unwrap())).exp();
            let scaled = g * (rate * t).exp();
            let limit = (nf / (nf - 1.0)).powf(p / 2.0 + 0.25);
            assert!((scaled / limit - 1.0).abs() < 5e-3, "n={n}: {scaled} vs {limit}");
            assert_eq!(m.tail_rate(n), TailDecay::Exponential(rate));
        }
    }

    #[test]
    fn gbm_examples() {
        let sigma = 0.5f64.sqrt();
        let m = Model::gbm_first_hit(0.25, sigma).unwrap();
        let ClosedMoments::GbmClosedForm(g) = m.closed_moments() else { panic!() };
        assert_eq!(g.nu, 0.0);
        for &b in &[0.5, 1.0, 4.0] {
            assert_relative_eq!(g.rho(b), 2.0 * f64::sqrt(b), max_relative = 1e-14);
        }
        assert_relative_eq!(m.phi(3.0, 1.0).unwrap(), 2.0 * 4f64.ln(), max_relative = 1e-14);
        assert_eq!(m.phi(0.0, 2.0).unwrap(), 0.0);
        let unit = Model::gbm_first_hit(0.5, 1.0).unwrap();
        let ClosedMoments::GbmClosedForm(u) = unit.closed_moments() else { panic!() };
        assert_relative_eq!(u.rho(2.0), 2.0, max_relative = 1e-14);
        assert!(Model::gbm_first_hit(0.1, 1.0).unwrap_err().to_string().contains("transient"));
        assert!(Model::gbm_first_hit(1.0, 0.0).is_err());
    }

    #[test]
    fn gbm_laplace_transform_is_a_power() {
        let m = Model::gbm_first_hit(1.3, 0.8).unwrap();
        let ClosedMoments::GbmClosedForm(g) = m.closed_moments() else { panic!() };
        for &t in &[0.1, 1.0, 10.0, 1e4] {
            for &b in &[0.2, 1.0, 3.0] {
                let lhs = (-m.phi(t, b).unwrap()).exp();
                assert_relative_eq!(lhs, (1.0 + t).powf(-g.rho(b)), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn exponent_identities_on_grid() {
        for m in builtins() {
            for &x in &[0.0, 0.25, 1.0, 3.0, 10.0] {
                assert_eq!(m.phi(0.0, x).unwrap(), 0.0, "{}", m.name());
                assert_eq!(m.phi(x, 0.0).unwrap(), 0.0, "{}", m.name());
            }
        }
    }

    #[test]
    fn continuity_in_time() {
        for m in builtins() {
            for &t in &[1e-9, 1e-6] {
                assert!(m.phi(t, 2.0).unwrap().abs() < 1e-4, "{} at t={t}", m.name());
            }
        }
    }

    #[test]
    fn levy_homogeneity() {
        let m = Model::brownian_drift(1.5, 0.7).unwrap();
        for &l in &[0.5, 1.0, 2.0] {
            let rate = m.phi(1.0, l).unwrap();
            for &t in &[0.3, 2.0, 11.0] {
                assert_relative_eq!(m.phi(t, l).unwrap() / t, rate, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn increasing_models_are_concave_nondecreasing_in_lambda() {
        for m in builtins().into_iter().filter(|m| m.is_increasing()) {
            for &t in &[0.5, 2.0, 20.0] {
                let lam: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
                let v: Vec<f64> = lam.iter().map(|&l| m.phi(t, l).unwrap()).collect();
                for w in v.windows(2) {
                    assert!(w[1] >= w[0] - 1e-12, "{} not monotone", m.name());
                }
                for w in v.windows(3) {
                    assert!(w[0] + w[2] - 2.0 * w[1] <= 1e-9 * (1.0 + w[1].abs()), "{} not concave", m.name());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let m = Model::brownian_drift(6.0, 2.0).unwrap();
        assert!(m.phi(-1.0, 1.0).is_err());
        assert!(m.phi(1.0, -1.0).is_err());
        assert!(m.phi(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn custom_models_are_validated() {
        let ok = Model::custom("linear", Arc::new(|t: f64, l: f64| Ok(t * l)), CustomMetadata::default());
        assert!(ok.is_ok());
        let bad = Model::custom("offset", Arc::new(|t: f64, l: f64| Ok(t * l + 1.0)), CustomMetadata::default());
        assert!(bad.is_err());
        let bad_lambda =
            Model::custom("offset", Arc::new(|t: f64, l: f64| Ok(t * (l + 1.0))), CustomMetadata::default());
        assert!(bad_lambda.is_err());
    }

    #[test]
    fn registry_lookup() {
        let mut p = BTreeMap::new();
        p.insert("mu".to_string(), 6.0);
        p.insert("sigma".to_string(), 2.0);
        let m = Model::from_name("brownian-drift", &p).unwrap();
        assert_eq!(m.phi(1.0, 1.0).unwrap(), 4.0);
        assert!(Model::from_name("nope", &p).is_err());
        assert!(Model::from_name("deterministic-drift", &p).is_err());
        p.insert("power".to_string(), 2.0);
        let tc = Model::from_name("time-changed-brownian", &p).unwrap();
        assert_eq!(tc.phi(2.0, 1.0).unwrap(), 16.0);
        let mut b = BTreeMap::new();
        b.insert("delta".to_string(), 2.0);
        assert!(Model::from_name("bessel-first-hit", &b).is_ok());
    }
}
