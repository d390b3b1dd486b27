//! Integer moments `m(n; s, t) = E[I_{s,t}^n]` of `I_{s,t} = ∫_s^t exp(-X_u) du`.
//!
//! Three paths compute the same quantity:
//!
//! * [`moment_recursive`] runs the backward recursion
//!   `M_0 ≡ 1`, `M_k(u) = k ∫_u^t M_{k-1}(r) g_k(r) dr` on a finite interval,
//!   tabulating each `M_k` on Chebyshev–Lobatto nodes from cumulative
//!   panel integrals.
//! * [`moment_product`] evaluates the nested product integral innermost-out,
//!   tabulating each layer on Chebyshev roots with one independent integral
//!   per node. It also handles `t = ∞`.
//! * [`moment_closed_levy`] and [`moment_closed_gbm`] use the analytic
//!   formulas on `[0, ∞)`.
//!
//! Here `g_k(u) = exp(-(Φ(u;k) - Φ(u;k-1)))` is [`weight`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exponents::{ClosedMoments, ExponentModel, TailDecay};
use crate::layer::{self, BuiltLayer, Domain, Envelope, Layer, NodeFamily, NodeValues};
use crate::quadrature::{try_integrate, try_integrate_to_infinity, QuadConfig, QuadResult, QuadStatus};
use crate::scalar::{from_usize, lit, Real};

/// Relative slack under which `Φ(n)` (or `ρ(n) - n`) counts as zero.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Recursive,
    ProductFormula,
    ClosedForm,
    Auto,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Recursive => "recursive",
            Method::ProductFormula => "product-formula",
            Method::ClosedForm => "closed-form",
            Method::Auto => "auto",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Method::Recursive),
            "product-formula" | "product" => Ok(Method::ProductFormula),
            "closed-form" | "closed" => Ok(Method::ClosedForm),
            "auto" => Ok(Method::Auto),
            other => Err(Error::InvalidQuery(format!(
                "unknown method `{other}` (expected recursive, product-formula, closed-form or auto)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MomentQuery<T: Real> {
    pub model: ExponentModel<T>,
    pub order: u32,
    pub s: T,
    /// End time; `T::infinity()` for `[s, ∞)`.
    pub t: T,
    pub method: Method,
    pub quad: QuadConfig<T>,
}

impl<T: Real> MomentQuery<T> {
    pub fn new(model: ExponentModel<T>, order: u32, s: T, t: T) -> Self {
        Self { model, order, s, t, method: Method::Auto, quad: QuadConfig::default() }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_quad(mut self, quad: QuadConfig<T>) -> Self {
        self.quad = quad;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::InvalidQuery("order must be at least 1".into()));
        }
        if !(self.s >= T::zero()) || !self.s.is_finite() {
            return Err(Error::InvalidQuery(format!("start time must be finite and >= 0, got {}", self.s)));
        }
        if !(self.t > self.s) {
            return Err(Error::InvalidQuery(format!("need s < t, got s={}, t={}", self.s, self.t)));
        }
        self.quad.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<T> {
    Finite { value: T, error_estimate: T },
    Infinite,
    Inconclusive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult<T> {
    pub verdict: Verdict<T>,
    pub method_used: Method,
    pub evaluations: usize,
}

impl<T: Real> MomentResult<T> {
    pub fn value(&self) -> Option<T> {
        match self.verdict {
            Verdict::Finite { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn error_estimate(&self) -> Option<T> {
        match self.verdict {
            Verdict::Finite { error_estimate, .. } => Some(error_estimate),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.verdict == Verdict::Infinite
    }

    fn infinite(method_used: Method, evaluations: usize) -> Self {
        Self { verdict: Verdict::Infinite, method_used, evaluations }
    }
}

/// Smallest order whose moment on `[0, ∞)` is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalIndex {
    At(u32),
    /// No critical order up to the queried one.
    Unbounded,
}

impl CriticalIndex {
    /// True when the moment of order `n` is finite.
    pub fn admits(self, n: u32) -> bool {
        match self {
            CriticalIndex::At(k) => n < k,
            CriticalIndex::Unbounded => true,
        }
    }
}

impl fmt::Display for CriticalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CriticalIndex::At(k) => write!(f, "{k}"),
            CriticalIndex::Unbounded => f.write_str("unbounded"),
        }
    }
}

fn order_scalar<T: Real>(n: u32) -> T {
    from_usize(n as usize)
}

fn factorial<T: Real>(n: u32) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * order_scalar::<T>(k))
}

/// `exp(-(Φ(u;n) - Φ(u;n-1)))`, the kernel shared by every path.
pub fn weight<T: Real>(model: &ExponentModel<T>, n: u32, u: T) -> Result<T> {
    if n < 1 {
        return Err(Error::InvalidQuery("weight order must be at least 1".into()));
    }
    let nf = order_scalar::<T>(n);
    let d = model.phi(u, nf)? - model.phi(u, nf - T::one())?;
    Ok((-d).exp())
}

/// On a finite interval the order-`j` layer of an order-`n` moment is
/// tabulated as `P_j(x) · exp(d(x) - d(s))` with `d = Φ(·;j) - Φ(·;n)`.
/// That factor is the sensitivity of the moment to `P_j(x)` up to a
/// bounded term, so the interpolation tolerance measures error that
/// actually reaches the result even when the outer kernels grow.
#[derive(Debug, Clone, Copy)]
struct Shift<T> {
    j: T,
    n: T,
    base: T,
}

impl<T: Real> Shift<T> {
    fn new(model: &ExponentModel<T>, j: u32, n: u32, s: T) -> Result<Self> {
        let (j, n) = (order_scalar(j), order_scalar(n));
        let base = model.phi(s, j)? - model.phi(s, n)?;
        Ok(Self { j, n, base })
    }

    fn factor(&self, model: &ExponentModel<T>, x: T) -> Result<T> {
        Ok((model.phi(x, self.j)? - model.phi(x, self.n)? - self.base).exp())
    }
}

/// A tabulated layer and the shift its values carry.
struct Tabulated<T> {
    layer: Layer<T>,
    shift: Option<Shift<T>>,
}

impl<T: Real> Tabulated<T> {
    fn eval(&self, model: &ExponentModel<T>, x: T) -> Result<T> {
        let v = self.layer.eval(x);
        match self.shift {
            Some(sh) => Ok(v / sh.factor(model, x)?),
            None => Ok(v),
        }
    }
}

fn layer_integrand<T: Real>(model: &ExponentModel<T>, order: u32, inner: Option<&Tabulated<T>>, x: T) -> Result<T> {
    let w = weight(model, order, x)?;
    if w == T::zero() {
        return Ok(w);
    }
    Ok(match inner {
        Some(l) => w * l.eval(model, x)?,
        None => w,
    })
}

/// Factors `Φ(k)` (Lévy) or `ρ(k) - k` (GBM) of the closed-form denominator.
fn closed_factors<T: Real>(model: &ExponentModel<T>, n: u32) -> Result<Vec<T>> {
    match model.closed_moments() {
        ClosedMoments::LevyClosedForm => (1..=n)
            .map(|k| {
                model
                    .levy_exponent(order_scalar(k))
                    .ok_or_else(|| Error::model(model.name(), "closed form tagged but no Lévy exponent"))
            })
            .collect(),
        ClosedMoments::GbmClosedForm(p) => Ok((1..=n).map(|k| p.rho(order_scalar(k)) - order_scalar::<T>(k)).collect()),
        ClosedMoments::None => Err(Error::InvalidQuery(format!("model `{}` has no closed-form moments", model.name()))),
    }
}

fn critical_from_factors<T: Real>(factors: &[T], magnitudes: &[T]) -> CriticalIndex {
    for (i, (&f, &m)) in factors.iter().zip(magnitudes).enumerate() {
        if f <= lit::<T>(TIE_TOLERANCE) * (T::one() + m) {
            return CriticalIndex::At(i as u32 + 1);
        }
    }
    CriticalIndex::Unbounded
}

/// Critical order `n* = min{k <= up_to : factor(k) <= 0}` for models with
/// closed-form moments. Factors within a relative `1e-12` of zero count as
/// zero, so exact ties land on the infinite side.
pub fn critical_index<T: Real>(model: &ExponentModel<T>, up_to: u32) -> Result<CriticalIndex> {
    let factors = closed_factors(model, up_to)?;
    let magnitudes: Vec<T> = match model.closed_moments() {
        ClosedMoments::GbmClosedForm(p) => (1..=up_to).map(|k| p.rho(order_scalar(k)).abs()).collect(),
        _ => {
            let m = factors.iter().fold(T::zero(), |acc, f| acc.max(f.abs()));
            vec![m; factors.len()]
        }
    };
    Ok(critical_from_factors(&factors, &magnitudes))
}

fn closed_form<T: Real>(model: &ExponentModel<T>, n: u32) -> Result<MomentResult<T>> {
    if n < 1 {
        return Err(Error::InvalidQuery("order must be at least 1".into()));
    }
    let factors = closed_factors(model, n)?;
    if !critical_index(model, n)?.admits(n) {
        return Ok(MomentResult::infinite(Method::ClosedForm, n as usize));
    }
    let value = factors.iter().fold(factorial::<T>(n), |acc, &f| acc / f);
    let error_estimate = lit::<T>(4.0) * order_scalar::<T>(n + 1) * T::epsilon() * value;
    Ok(MomentResult {
        verdict: Verdict::Finite { value, error_estimate },
        method_used: Method::ClosedForm,
        evaluations: n as usize,
    })
}

/// `n! / ∏_{k<=n} Φ(k)` on `[0, ∞)`, or `Infinite` when `n >= n*`.
pub fn moment_closed_levy<T: Real>(model: &ExponentModel<T>, n: u32) -> Result<MomentResult<T>> {
    if model.closed_moments() != ClosedMoments::LevyClosedForm {
        return Err(Error::InvalidQuery(format!("model `{}` is not a Lévy model", model.name())));
    }
    closed_form(model, n)
}

/// `n! / ∏_{k<=n} (ρ(k) - k)` on `[0, ∞)` for the GBM first-hit model.
pub fn moment_closed_gbm<T: Real>(model: &ExponentModel<T>, n: u32) -> Result<MomentResult<T>> {
    if !matches!(model.closed_moments(), ClosedMoments::GbmClosedForm(_)) {
        return Err(Error::InvalidQuery(format!("model `{}` is not a GBM first-hit model", model.name())));
    }
    closed_form(model, n)
}

/// Collects per-layer diagnostics.
struct Tally<T> {
    evaluations: usize,
    rel_error: T,
    divergent: Option<String>,
    inconclusive: Option<String>,
}

impl<T: Real> Tally<T> {
    fn new() -> Self {
        Self { evaluations: 0, rel_error: T::zero(), divergent: None, inconclusive: None }
    }

    fn observe(&mut self, r: &QuadResult<T>, what: impl FnOnce() -> String) {
        match r.status {
            QuadStatus::Converged => {}
            QuadStatus::NonConvergence => {
                if self.inconclusive.is_none() {
                    self.inconclusive = Some(format!("{} did not converge", what()));
                }
            }
            QuadStatus::DivergenceSuspected => {
                if self.divergent.is_none() {
                    self.divergent = Some(what());
                }
            }
        }
    }

    fn absorb(&mut self, built: &BuiltLayer<T>, order: u32) {
        self.evaluations += built.evaluations;
        self.rel_error = self.rel_error + built.interp_rel_error + built.quad_rel_error;
        if !built.converged && self.inconclusive.is_none() {
            self.inconclusive = Some(format!(
                "layer of order {order} did not reach the interpolation tolerance with {} nodes",
                built.layer.nodes()
            ));
        }
    }

    fn finish(self, method: Method, scaled: T, outer_error: T, infinite_horizon: bool) -> MomentResult<T> {
        if infinite_horizon && self.divergent.is_some() {
            return MomentResult::infinite(method, self.evaluations);
        }
        let verdict = if let Some(why) = self.divergent {
            Verdict::Inconclusive(format!("{why} overflowed"))
        } else if let Some(why) = self.inconclusive {
            Verdict::Inconclusive(why)
        } else if !(scaled > T::zero()) || !scaled.is_finite() {
            Verdict::Inconclusive(format!("non-positive or non-finite value {scaled}"))
        } else {
            Verdict::Finite { value: scaled, error_estimate: outer_error + scaled * self.rel_error }
        };
        MomentResult { verdict, method_used: method, evaluations: self.evaluations }
    }
}

/// Backward recursion on a finite interval.
pub fn moment_recursive<T: Real>(q: &MomentQuery<T>) -> Result<MomentResult<T>> {
    q.validate()?;
    if !q.t.is_finite() {
        return Err(Error::InvalidQuery("the recursive path needs a finite end time".into()));
    }
    let model = &q.model;
    let mut tally = Tally::new();
    let mut inner: Option<Tabulated<T>> = None;
    for k in 1..q.order {
        let kf = order_scalar::<T>(k);
        let shift = Shift::new(model, k, q.order, q.s)?;
        let mut issues = Tally::new();
        let built = {
            let prev = inner.as_ref();
            let issues = &mut issues;
            layer::build(
                Domain::Finite { a: q.s, b: q.t },
                NodeFamily::Lobatto,
                None,
                q.quad.abs_tol,
                q.quad.rel_tol,
                |xs| {
                    let factors = xs.iter().map(|&x| shift.factor(model, x)).collect::<Result<Vec<T>>>()?;
                    // a panel feeds every node to its left
                    let mut tols = Vec::with_capacity(xs.len());
                    let mut tightest = T::infinity();
                    for f in &factors {
                        tightest = tightest.min(q.quad.abs_tol * (T::one() / *f).min(T::one()));
                        tols.push(tightest / from_usize(xs.len()));
                    }
                    let mut values = vec![T::zero(); xs.len()];
                    let (mut acc, mut err, mut worst, mut evals) = (T::zero(), T::zero(), T::zero(), 0);
                    for i in (0..xs.len() - 1).rev() {
                        let panel_cfg = QuadConfig { abs_tol: tols[i], ..q.quad };
                        let r = try_integrate(|x| layer_integrand(model, k, prev, x), xs[i], xs[i + 1], &panel_cfg)?;
                        issues.observe(&r, || format!("panel integral of order {k}"));
                        acc = acc + r.value;
                        err = err + r.error_estimate;
                        evals += r.evaluations;
                        values[i] = kf * acc * factors[i];
                        worst = worst.max(err * factors[i]);
                    }
                    Ok(NodeValues { values, quad_error: kf * worst, evaluations: evals })
                },
            )?
        };
        tally.absorb(&built, k);
        merge_issues(&mut tally, issues);
        inner = Some(Tabulated { layer: built.layer, shift: Some(shift) });
    }
    let n = q.order;
    let nf = order_scalar::<T>(n);
    let r = try_integrate(|x| layer_integrand(model, n, inner.as_ref(), x), q.s, q.t, &q.quad)?;
    tally.evaluations += r.evaluations;
    tally.observe(&r, || format!("outer integral of order {n}"));
    Ok(tally.finish(Method::Recursive, nf * r.value, nf * r.error_estimate, false))
}

fn merge_issues<T: Real>(tally: &mut Tally<T>, issues: Tally<T>) {
    if tally.divergent.is_none() {
        tally.divergent = issues.divergent;
    }
    if tally.inconclusive.is_none() {
        tally.inconclusive = issues.inconclusive;
    }
}

/// Decay of the order-`j` layer integrand `g_j · P_{j-1}` on `[s, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum LayerTail<T> {
    Decay(TailDecay<T>),
    NotIntegrable,
}

fn layer_tail<T: Real>(model: &ExponentModel<T>, j: u32) -> LayerTail<T> {
    let tie = |x: T, scale: T| x <= lit::<T>(TIE_TOLERANCE) * (T::one() + scale.abs());
    if let Some(rate) = model.levy_exponent(order_scalar(j)) {
        // g_j · P_{j-1} is exactly a multiple of exp(-Φ(j) x)
        let scale = (1..=j).filter_map(|k| model.levy_exponent(order_scalar(k))).fold(T::zero(), |m, v| m.max(v.abs()));
        return if tie(rate, scale) {
            LayerTail::NotIntegrable
        } else {
            LayerTail::Decay(TailDecay::Exponential(rate))
        };
    }
    if !model.has_tail_rate() {
        return LayerTail::Decay(TailDecay::Undetermined);
    }
    let tails: Vec<TailDecay<T>> = (1..=j).map(|k| model.tail_rate(k)).collect();
    if tails.iter().all(|d| matches!(d, TailDecay::Exponential(_))) {
        let rate = tails.iter().fold(T::zero(), |acc, d| match d {
            TailDecay::Exponential(r) => acc + *r,
            _ => acc,
        });
        return LayerTail::Decay(TailDecay::Exponential(rate));
    }
    if tails.iter().all(|d| matches!(d, TailDecay::Polynomial(_))) {
        // each inner integration lowers the power by one
        let mut total = T::zero();
        for (i, d) in tails.iter().enumerate() {
            if let TailDecay::Polynomial(q) = d {
                total = total + *q;
            }
            let power = total - from_usize::<T>(i);
            if tie(power - T::one(), total) {
                return LayerTail::NotIntegrable;
            }
        }
        return LayerTail::Decay(TailDecay::Polynomial(total - from_usize::<T>(tails.len() - 1)));
    }
    LayerTail::Decay(TailDecay::Undetermined)
}

/// Nested product integral, innermost variable first. The variable `t_k`
/// carries the kernel of order `n - k + 1`.
pub fn moment_product<T: Real>(q: &MomentQuery<T>) -> Result<MomentResult<T>> {
    q.validate()?;
    let model = &q.model;
    let n = q.order;
    let infinite = q.t.is_infinite();
    let mut tails = Vec::with_capacity(n as usize);
    if infinite {
        for j in 1..=n {
            match layer_tail(model, j) {
                LayerTail::NotIntegrable => return Ok(MomentResult::infinite(Method::ProductFormula, 0)),
                LayerTail::Decay(d) => tails.push(d),
            }
        }
    }
    let mut tally = Tally::new();
    let mut inner: Option<Tabulated<T>> = None;
    for k in (2..=n).rev() {
        let order = n - k + 1;
        let shift = if infinite { None } else { Some(Shift::new(model, order, n, q.s)?) };
        let (domain, envelope, decay) = if infinite {
            let decay = tails[order as usize - 1];
            let base = q.quad.infinite_map_scale;
            match decay {
                TailDecay::Exponential(r) => {
                    (Domain::SemiInfinite { a: q.s, scale: base * lit::<T>(2.0) / r }, None, decay)
                }
                TailDecay::Polynomial(p) => (
                    Domain::SemiInfinite { a: q.s, scale: base * (T::one() + q.s) },
                    Some(Envelope { a: q.s, exponent: p - T::one() }),
                    decay,
                ),
                TailDecay::Undetermined => {
                    (Domain::SemiInfinite { a: q.s, scale: base * q.s.max(T::one()) }, None, decay)
                }
            }
        } else {
            (Domain::Finite { a: q.s, b: q.t }, None, TailDecay::Undetermined)
        };
        let mut issues = Tally::new();
        let built = {
            let prev = inner.as_ref();
            let issues = &mut issues;
            layer::build(domain, NodeFamily::Gauss, envelope, q.quad.abs_tol, q.quad.rel_tol, |xs| {
                let mut values = Vec::with_capacity(xs.len());
                let (mut err, mut evals) = (T::zero(), 0);
                for &x in xs {
                    let mut cfg = q.quad;
                    if let Some(e) = envelope {
                        let env = ((T::one() + x) / (T::one() + e.a)).powf(-e.exponent);
                        cfg.abs_tol = cfg.abs_tol * env.min(T::one());
                    }
                    let factor = match shift {
                        Some(sh) => sh.factor(model, x)?,
                        None => T::one(),
                    };
                    cfg.abs_tol = cfg.abs_tol * (T::one() / factor).min(T::one());
                    let f = |y| layer_integrand(model, order, prev, y);
                    let r = if infinite {
                        try_integrate_to_infinity(f, x, &cfg, Some(decay))?
                    } else {
                        try_integrate(f, x, q.t, &cfg)?
                    };
                    issues.observe(&r, || format!("node integral of order {order}"));
                    values.push(r.value * factor);
                    err = err.max(r.error_estimate * factor);
                    evals += r.evaluations;
                }
                Ok(NodeValues { values, quad_error: err, evaluations: evals })
            })?
        };
        tally.absorb(&built, order);
        merge_issues(&mut tally, issues);
        if infinite && tally.divergent.is_some() {
            return Ok(MomentResult::infinite(Method::ProductFormula, tally.evaluations));
        }
        inner = Some(Tabulated { layer: built.layer, shift });
    }
    let f = |x| layer_integrand(model, n, inner.as_ref(), x);
    let r = if infinite {
        try_integrate_to_infinity(f, q.s, &q.quad, Some(tails[n as usize - 1]))?
    } else {
        try_integrate(f, q.s, q.t, &q.quad)?
    };
    tally.evaluations += r.evaluations;
    tally.observe(&r, || format!("outer integral of order {n}"));
    let nf = factorial::<T>(n);
    Ok(tally.finish(Method::ProductFormula, nf * r.value, nf * r.error_estimate, infinite))
}

/// Computes the moment with the requested path; `Auto` picks the closed
/// form on `[0, ∞)` when available, the recursion for finite `t`, and the
/// product formula otherwise.
pub fn moment<T: Real>(q: &MomentQuery<T>) -> Result<MomentResult<T>> {
    q.validate()?;
    let whole_line = q.s == T::zero() && q.t.is_infinite();
    match q.method {
        Method::Recursive => moment_recursive(q),
        Method::ProductFormula => moment_product(q),
        Method::ClosedForm => {
            if !whole_line {
                return Err(Error::InvalidQuery("closed forms apply only to s = 0, t = ∞".into()));
            }
            closed_form(&q.model, q.order)
        }
        Method::Auto => {
            if whole_line && q.model.closed_moments() != ClosedMoments::None {
                closed_form(&q.model, q.order)
            } else if q.t.is_finite() {
                moment_recursive(q)
            } else {
                moment_product(q)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sufficiency {
    Sufficient,
    NotSufficient,
    Inconclusive,
}

impl Sufficiency {
    pub fn as_str(self) -> &'static str {
        match self {
            Sufficiency::Sufficient => "sufficient",
            Sufficiency::NotSufficient => "not-sufficient",
            Sufficiency::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinitenessReport<T> {
    pub order: u32,
    pub verdict: Sufficiency,
    pub integral: QuadResult<T>,
}

/// Tests `∫_0^∞ g_n(u) du < ∞`.
///
/// This is a one-directional criterion: when it holds for every order
/// `k <= n`, the `n`-th moment of `I_{0,∞}` is finite. `NotSufficient`
/// does not mean the moment is infinite.
pub fn finiteness_sufficient<T: Real>(
    model: &ExponentModel<T>,
    n: u32,
    cfg: &QuadConfig<T>,
) -> Result<FinitenessReport<T>> {
    if n < 1 {
        return Err(Error::InvalidQuery("order must be at least 1".into()));
    }
    cfg.validate()?;
    let decay = model.has_tail_rate().then(|| model.tail_rate(n));
    let integral = try_integrate_to_infinity(|u| weight(model, n, u), T::zero(), cfg, decay)?;
    let verdict = match integral.status {
        QuadStatus::Converged => Sufficiency::Sufficient,
        QuadStatus::DivergenceSuspected => Sufficiency::NotSufficient,
        QuadStatus::NonConvergence => Sufficiency::Inconclusive,
    };
    Ok(FinitenessReport { order: n, verdict, integral })
}
