//! Monte Carlo estimates of moments of `I = ∫ exp(-X_u) du`, used as an
//! independent check on the quadrature engine.
//!
//! Every path draws from its own ChaCha8 stream keyed by the seed and the
//! path index, so estimates do not depend on how paths are split across
//! worker threads.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exponents::{ClosedMoments, ExponentModel, GbmParams, TailDecay};
use crate::quadrature::{integrate_to_infinity, QuadConfig};
use crate::specfun::log_gamma;

pub const DEFAULT_SEED: u64 = 42;

/// Relative size below which the expected remaining functional ends a path.
const EARLY_STOP: f64 = 1e-13;
/// Bessel paths have no closed remainder; stop once `exp(-H)` is this
/// small relative to the accumulated functional.
const BESSEL_EARLY_STOP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub paths: usize,
    /// Euler step for Brownian and Bessel paths.
    pub dt: f64,
    /// Truncation time for `t = ∞` targets.
    pub horizon: f64,
    pub seed: u64,
    pub streams: usize,
    /// Log-time step for GBM first-hit paths and level step for Bessel ones.
    pub grid_step: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            paths: 200_000,
            dt: 1e-3,
            horizon: 50.0,
            seed: DEFAULT_SEED,
            streams: thread::available_parallelism().map_or(1, |n| n.get()),
            grid_step: 0.01,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 100 {
            return Err(Error::InvalidSimConfig(format!("paths must be >= 100, got {}", self.paths)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidSimConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::InvalidSimConfig(format!("horizon must be positive and finite, got {}", self.horizon)));
        }
        if self.streams < 1 {
            return Err(Error::InvalidSimConfig("streams must be >= 1".into()));
        }
        if !(self.grid_step > 0.0) || !self.grid_step.is_finite() {
            return Err(Error::InvalidSimConfig(format!("grid_step must be positive, got {}", self.grid_step)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(paths_used)`.
    pub std_error: f64,
    pub paths_used: usize,
    /// Bound on the bias from truncating a `t = ∞` functional at the horizon.
    pub truncation_bias_bound: Option<f64>,
}

impl MomentEstimate {
    /// `|mean - target| / (std_error + extra)`, with `extra` covering the
    /// target's own error and the truncation bound.
    pub fn z_score(&self, target: f64, extra: f64) -> f64 {
        let slack = extra + self.truncation_bias_bound.unwrap_or(0.0);
        let d = (self.mean - target).abs();
        if d <= slack {
            0.0
        } else {
            (d - slack) / self.std_error
        }
    }

    fn from_values(values: impl Iterator<Item = f64>, truncation_bias_bound: Option<f64>) -> Self {
        let v: Vec<f64> = values.collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        Self { mean, std_error: (var / n).sqrt(), paths_used: v.len(), truncation_bias_bound }
    }
}

/// Per-path random streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStreams {
    seed: u64,
    streams: usize,
}

pub fn rng_streams(seed: u64, streams: usize) -> Result<RngStreams> {
    if streams < 1 {
        return Err(Error::InvalidSimConfig("streams must be >= 1".into()));
    }
    Ok(RngStreams { seed, streams })
}

impl RngStreams {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn streams(&self) -> usize {
        self.streams
    }

    /// Generator for path `path`; the same for every worker count.
    pub fn path_rng(&self, path: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path);
        rng
    }

    /// Worker that simulates `path` when `paths` are split into contiguous blocks.
    pub fn stream_of(&self, path: usize, paths: usize) -> usize {
        let block = paths.div_ceil(self.streams);
        path / block.max(1)
    }

    /// Runs `f` once per path and returns the results in path order.
    pub fn map_paths<F>(&self, paths: usize, f: F) -> Vec<f64>
    where
        F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
    {
        let block = paths.div_ceil(self.streams).max(1);
        let run =
            |range: std::ops::Range<usize>| -> Vec<f64> { range.map(|i| f(&mut self.path_rng(i as u64))).collect() };
        if self.streams == 1 {
            return run(0..paths);
        }
        thread::scope(|scope| {
            let handles: Vec<_> = (0..paths)
                .step_by(block)
                .map(|start| {
                    let end = (start + block).min(paths);
                    let run = &run;
                    scope.spawn(move || run(start..end))
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("simulation worker panicked")).collect()
        })
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Inverse Gaussian draw by the transformation method with a uniform
/// acceptance step, written to avoid cancellation when `shape << mean·v²`.
fn inverse_gaussian<R: Rng>(rng: &mut R, mean: f64, shape: f64) -> f64 {
    let v = normal(rng);
    let y = mean * v * v;
    let s = (4.0 * shape * y + y * y).sqrt();
    // smaller root of the quadratic, mean - mean/(2 shape) (s - y)
    let x = 4.0 * mean * shape * y / ((s + y) * (s + y));
    let x = if y == 0.0 { mean } else { x };
    let u: f64 = rng.random();
    if u <= mean / (mean + x) {
        x
    } else {
        mean * mean / x
    }
}

/// How the horizon truncation of a `t = ∞` functional is bounded.
#[derive(Debug, Clone)]
enum Truncation {
    None,
    Brownian { mu: f64, sigma: f64, horizon: f64 },
    Gbm { params: GbmParams<f64>, horizon: f64 },
    Bessel { delta: f64, horizon: f64 },
}

impl Truncation {
    /// `∫_T^∞ exp(-Φ(u;α)/α) du`, a bound on the `L^α` norm of the
    /// discarded tail when `α >= 1`.
    fn tail_norm(&self, alpha: f64) -> Option<f64> {
        match *self {
            Truncation::None => Some(0.0),
            Truncation::Brownian { mu, sigma, horizon } => {
                let c = mu - alpha * sigma * sigma / 2.0;
                (c > 0.0).then(|| (-c * horizon).exp() / c)
            }
            Truncation::Gbm { params, horizon } => {
                let c = params.rho(alpha) / alpha;
                (c > 1.0).then(|| (1.0 + horizon).powf(1.0 - c) / (c - 1.0))
            }
            Truncation::Bessel { delta, horizon } => {
                let model = ExponentModel::bessel_first_hit(delta, 0.0).ok()?;
                let rate = (2.0 * alpha).sqrt() / alpha;
                let r = integrate_to_infinity(
                    |u| model.phi(u, alpha).map_or(f64::NAN, |p| (-p / alpha).exp()),
                    horizon,
                    &QuadConfig { abs_tol: 1e-300, rel_tol: 1e-6, ..QuadConfig::default() },
                    Some(TailDecay::Exponential(rate)),
                )
                .ok()?;
                r.converged.then_some(r.value)
            }
        }
    }

    /// Bias bound for the `α`-th moment: with `a` the norm of the
    /// truncated functional and `b` the tail norm, `(a + b)^α - a^α`.
    fn bias(&self, alpha: f64, truncated_moment: f64) -> Option<f64> {
        if let Truncation::None = self {
            return None;
        }
        if alpha < 1.0 {
            return None;
        }
        let b = self.tail_norm(alpha)?;
        let a = truncated_moment.max(0.0).powf(1.0 / alpha);
        Some((a + b).powf(alpha) - a.powf(alpha))
    }
}

/// Simulated functionals, one per path in path order.
#[derive(Debug, Clone)]
pub struct FunctionalSample {
    values: Vec<f64>,
    truncation: Truncation,
}

impl FunctionalSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sample moment of order `alpha > 0`.
    pub fn moment(&self, alpha: f64) -> MomentEstimate {
        let mut est = MomentEstimate::from_values(self.values.iter().map(|v| v.powf(alpha)), None);
        est.truncation_bias_bound = self.truncation.bias(alpha, est.mean);
        est
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidSimConfig(format!("moment order must be positive, got {alpha}")));
    }
    Ok(())
}

/// Paths of `I_{0,t}` for `X_u = σ W_u + μ u` on an Euler grid with
/// trapezoidal accumulation. `t = ∞` is truncated at `cfg.horizon`.
pub fn sample_brownian_drift_functional(mu: f64, sigma: f64, t: f64, cfg: &SimConfig) -> Result<FunctionalSample> {
    cfg.validate()?;
    if !mu.is_finite() || !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::model("brownian-drift", format!("need finite μ and σ >= 0, got μ={mu}, σ={sigma}")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidSimConfig(format!("end time must be positive, got {t}")));
    }
    if t.is_infinite() && mu <= 0.0 {
        return Err(Error::InvalidSimConfig("t = ∞ needs μ > 0 for the functional to be finite".into()));
    }
    let end = if t.is_finite() { t } else { cfg.horizon };
    let phi1 = mu - sigma * sigma / 2.0;
    let remainder = (phi1 > 0.0).then(|| 1.0 / phi1);
    let dt = cfg.dt;
    let sdt = dt.sqrt();
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let (mut x, mut e, mut acc, mut u) = (0.0f64, 1.0f64, 0.0f64, 0.0f64);
        while u < end {
            let h = dt.min(end - u);
            let sh = if h == dt { sdt } else { h.sqrt() };
            x += mu * h + sigma * sh * normal(rng);
            let e1 = (-x).exp();
            acc += 0.5 * (e + e1) * h;
            e = e1;
            u += h;
            if let Some(r) = remainder {
                if e * r < EARLY_STOP * acc {
                    break;
                }
            }
        }
        acc
    });
    let truncation =
        if t.is_infinite() { Truncation::Brownian { mu, sigma, horizon: cfg.horizon } } else { Truncation::None };
    Ok(FunctionalSample { values, truncation })
}

/// Moment of order `alpha` of `I_{0,t}` for Brownian motion with drift.
pub fn simulate_brownian_drift_functional(
    mu: f64,
    sigma: f64,
    alpha: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<MomentEstimate> {
    check_alpha(alpha)?;
    Ok(sample_brownian_drift_functional(mu, sigma, t, cfg)?.moment(alpha))
}

/// `E[(1/(2 Z))^α]` for `Z ~ Gamma(μ/2, 1)`, the law of `I_{0,∞}` when `σ = 2`.
pub fn dufresne_gamma_oracle(mu: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(mu > 0.0) {
        return Err(Error::InvalidQuery(format!("μ must be positive, got {mu}")));
    }
    let shape = mu / 2.0;
    if alpha >= shape {
        return Err(Error::InvalidQuery(format!(
            "moment of order {alpha} is infinite for μ = {mu} (needs order < μ/2)"
        )));
    }
    let lg = log_gamma(shape - alpha)? - log_gamma(shape)?;
    Ok((lg - alpha * std::f64::consts::LN_2).exp())
}

fn gbm_params(mu: f64, sigma: f64) -> Result<GbmParams<f64>> {
    match ExponentModel::gbm_first_hit(mu, sigma)?.closed_moments() {
        ClosedMoments::GbmClosedForm(p) => Ok(p),
        _ => unreachable!("gbm model carries its parameters"),
    }
}

/// Walks `X` of the GBM first-hit model over the geometric grid
/// `ln(1 + t_j) = j·h` up to `end`, calling `visit(t, X_t)` at each grid
/// point; stops when `visit` returns false.
fn gbm_walk<R: Rng>(rng: &mut R, p: GbmParams<f64>, h: f64, end: f64, mut visit: impl FnMut(f64, f64) -> bool) {
    let log_end = end.ln_1p();
    let (mut s, mut x) = (0.0f64, 0.0f64);
    while s < log_end {
        let hs = h.min(log_end - s);
        let da = hs / p.sigma;
        x += if p.nu > 0.0 {
            inverse_gaussian(rng, da / p.nu, da * da)
        } else {
            let g = normal(rng);
            da * da / (g * g)
        };
        s = if hs == h { s + h } else { log_end };
        if !visit(s.exp_m1(), x) {
            return;
        }
    }
}

/// Paths of `I_{0,∞}` (truncated at `cfg.horizon`) for the GBM first-hit
/// model; increments are exact first-passage times of a drifted Brownian
/// motion.
pub fn sample_gbm_first_hit_functional(mu: f64, sigma: f64, cfg: &SimConfig) -> Result<FunctionalSample> {
    cfg.validate()?;
    let p = gbm_params(mu, sigma)?;
    let rho1 = p.rho(1.0);
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let (mut t0, mut e, mut acc) = (0.0f64, 1.0f64, 0.0f64);
        gbm_walk(rng, p, cfg.grid_step, cfg.horizon, |t, x| {
            let e1 = (-x).exp();
            acc += 0.5 * (e + e1) * (t - t0);
            e = e1;
            t0 = t;
            // E[remaining] = exp(-X_t) (1 + t) / (ρ(1) - 1)
            !(rho1 > 1.0 && e * (1.0 + t) / (rho1 - 1.0) < EARLY_STOP * acc)
        });
        acc
    });
    Ok(FunctionalSample { values, truncation: Truncation::Gbm { params: p, horizon: cfg.horizon } })
}

pub fn simulate_gbm_first_hit_functional(mu: f64, sigma: f64, n: f64, cfg: &SimConfig) -> Result<MomentEstimate> {
    check_alpha(n)?;
    Ok(sample_gbm_first_hit_functional(mu, sigma, cfg)?.moment(n))
}

/// Empirical `E[exp(-λ X_t)]` for the GBM first-hit process.
pub fn laplace_gbm_first_hit(mu: f64, sigma: f64, t: f64, lambda: f64, cfg: &SimConfig) -> Result<MomentEstimate> {
    cfg.validate()?;
    check_time_and_lambda(t, lambda)?;
    let p = gbm_params(mu, sigma)?;
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let mut last = 0.0;
        gbm_walk(rng, p, cfg.grid_step, t, |_, x| {
            last = x;
            true
        });
        (-lambda * last).exp()
    });
    Ok(MomentEstimate::from_values(values.into_iter(), None))
}

/// Empirical `E[exp(-λ X_t)]` for Brownian motion with drift, simulated
/// on the Euler grid.
pub fn laplace_brownian_drift(mu: f64, sigma: f64, t: f64, lambda: f64, cfg: &SimConfig) -> Result<MomentEstimate> {
    cfg.validate()?;
    check_time_and_lambda(t, lambda)?;
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let (mut x, mut u) = (0.0f64, 0.0f64);
        while u < t {
            let h = cfg.dt.min(t - u);
            x += mu * h + sigma * h.sqrt() * normal(rng);
            u += h;
        }
        (-lambda * x).exp()
    });
    Ok(MomentEstimate::from_values(values.into_iter(), None))
}

fn check_time_and_lambda(t: f64, lambda: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidSimConfig(format!("time must be positive and finite, got {t}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidSimConfig(format!("λ must be finite and >= 0, got {lambda}")));
    }
    Ok(())
}

/// Radial part of a Bessel path started at 0.
struct BesselWalker {
    coords: Option<Vec<f64>>,
    drift: f64,
    r: f64,
    t: f64,
    dt: f64,
    sdt: f64,
}

impl BesselWalker {
    fn new(delta: f64, dt: f64) -> Self {
        let integer = delta.fract() == 0.0 && delta <= 64.0;
        let sdt = dt.sqrt();
        Self {
            coords: integer.then(|| vec![0.0; delta as usize]),
            drift: (delta - 1.0) / 2.0,
            r: if integer { 0.0 } else { sdt },
            t: 0.0,
            dt,
            sdt,
        }
    }

    /// One step; returns the path maximum over the step given that only
    /// values at or above `level` matter.
    fn step<R: Rng>(&mut self, rng: &mut R, level: f64) -> f64 {
        let r0 = self.r;
        let r1 = match self.coords.as_mut() {
            Some(c) => {
                let mut ss = 0.0;
                for x in c.iter_mut() {
                    *x += self.sdt * normal(rng);
                    ss += *x * *x;
                }
                ss.sqrt()
            }
            None => (r0 + self.drift / r0 * self.dt + self.sdt * normal(rng)).abs().max(f64::MIN_POSITIVE),
        };
        self.r = r1;
        self.t += self.dt;
        let hi = r0.max(r1);
        if hi >= level {
            return hi;
        }
        // Brownian-bridge maximum between the endpoints
        let gap = 2.0 * (level - r0) * (level - r1) / self.dt;
        if gap > 40.0 {
            return hi;
        }
        let u: f64 = rng.random();
        let d = r1 - r0;
        0.5 * (r0 + r1 + (d * d - 2.0 * self.dt * (1.0 - u).ln()).sqrt())
    }
}

/// Calls `visit(H_ℓ)` for `ℓ = h, 2h, ...` in order, where `H_ℓ` is the
/// first time the radial path reaches `ℓ`; stops when `visit` returns false.
fn bessel_hits<R: Rng>(rng: &mut R, delta: f64, dt: f64, h: f64, mut visit: impl FnMut(f64) -> bool) {
    let mut walker = BesselWalker::new(delta, dt);
    let mut level = h;
    // levels below a non-zero start are reached at time zero
    while level <= walker.r {
        if !visit(0.0) {
            return;
        }
        level += h;
    }
    loop {
        let t0 = walker.t;
        let top = walker.step(rng, level);
        while top >= level {
            if !visit(t0 + 0.5 * dt) {
                return;
            }
            level += h;
        }
    }
}

fn check_bessel(delta: f64) -> Result<()> {
    if !(delta >= 2.0) || !delta.is_finite() {
        return Err(Error::InvalidSimConfig(format!(
            "Bessel simulation needs δ >= 2, got {delta} (reflection at 0 is not simulated)"
        )));
    }
    Ok(())
}

/// Paths of `I_{0,∞} = ∫ exp(-H_ℓ) dℓ` for the first-hit process of a
/// δ-dimensional Bessel process from 0, accumulated by trapezoid over a
/// level grid of step `cfg.grid_step` and truncated at level `cfg.horizon`.
pub fn sample_bessel_first_hit_functional(delta: f64, cfg: &SimConfig) -> Result<FunctionalSample> {
    cfg.validate()?;
    check_bessel(delta)?;
    let h = cfg.grid_step;
    let last_level = (cfg.horizon / h).round().max(1.0) as u64;
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let (mut e, mut acc, mut k) = (1.0f64, 0.0f64, 0u64);
        bessel_hits(rng, delta, cfg.dt, h, |hit| {
            let e1 = (-hit).exp();
            acc += 0.5 * (e + e1) * h;
            e = e1;
            k += 1;
            k < last_level && e >= BESSEL_EARLY_STOP * acc
        });
        acc
    });
    Ok(FunctionalSample { values, truncation: Truncation::Bessel { delta, horizon: cfg.horizon } })
}

pub fn simulate_bessel_first_hit_functional(delta: f64, n: f64, cfg: &SimConfig) -> Result<MomentEstimate> {
    check_alpha(n)?;
    Ok(sample_bessel_first_hit_functional(delta, cfg)?.moment(n))
}

/// Empirical `E[exp(-λ H_ℓ)]` for the Bessel first-hit process at level `ℓ`.
pub fn laplace_bessel_first_hit(delta: f64, level: f64, lambda: f64, cfg: &SimConfig) -> Result<MomentEstimate> {
    cfg.validate()?;
    check_bessel(delta)?;
    check_time_and_lambda(level, lambda)?;
    let h = cfg.grid_step;
    let target = (level / h).round().max(1.0) as u64;
    let streams = rng_streams(cfg.seed, cfg.streams)?;
    let values = streams.map_paths(cfg.paths, |rng| {
        let (mut k, mut at) = (0u64, 0.0);
        bessel_hits(rng, delta, cfg.dt, h, |hit| {
            k += 1;
            at = hit;
            k < target
        });
        (-lambda * at).exp()
    });
    Ok(MomentEstimate::from_values(values.into_iter(), None))
}
