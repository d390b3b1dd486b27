//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and semi-infinite
//! intervals.
//!
//! Non-convergence and suspected divergence are reported through
//! [`QuadStatus`], never by aborting: the finiteness checks deliberately
//! integrate functions whose integral may be infinite. A NaN from the
//! integrand is the only hard failure.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::exponents::TailDecay;
use crate::scalar::{lit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Doublings tried by the horizon test when no decay information is known.
const MAX_DOUBLINGS: u32 = 40;

/// Consecutive non-shrinking increments that classify a tail as divergent.
const NON_SHRINKING_LIMIT: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    pub infinite_map_scale: T,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self { abs_tol: lit(1e-10), rel_tol: lit(1e-8), max_subdivisions: 2000, infinite_map_scale: T::one() }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > T::zero()) || !(self.rel_tol > T::zero()) {
            return Err(Error::InvalidQuery("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidQuery("max_subdivisions must be at least 1".into()));
        }
        if !(self.infinite_map_scale > T::zero()) {
            return Err(Error::InvalidQuery("infinite_map_scale must be positive".into()));
        }
        Ok(())
    }

    /// Tolerance target for an integral of size `value`.
    pub fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadStatus {
    Converged,
    /// Subdivision or doubling budget exhausted without meeting the tolerance.
    NonConvergence,
    /// Partial integrals grow without bound, or the decay hint is not integrable.
    DivergenceSuspected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub converged: bool,
    pub status: QuadStatus,
    pub evaluations: usize,
}

impl<T: Real> QuadResult<T> {
    fn with_status(value: T, error_estimate: T, status: QuadStatus, evaluations: usize) -> Self {
        Self { value, error_estimate, converged: status == QuadStatus::Converged, status, evaluations }
    }

    fn diverged(partial: T, evaluations: usize) -> Self {
        Self::with_status(partial, T::infinity(), QuadStatus::DivergenceSuspected, evaluations)
    }
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn eval<T: Real, F: FnMut(T) -> Result<T>>(f: &mut F, x: T) -> Result<T> {
    let y = f(x)?;
    if y.is_nan() {
        return Err(Error::NanIntegrand { at: x.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(y)
}

/// One 15-point Kronrod panel with the embedded 7-point Gauss estimate.
fn gk15<T: Real, F: FnMut(T) -> Result<T>>(f: &mut F, a: T, b: T) -> Result<Segment<T>> {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = eval(f, center)?;
    let mut res_k = fc * lit(WGK[7]);
    let mut res_g = fc * lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half_len * lit(XGK[j]);
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + lit::<T>(WGK[j]) * (f1 + f2);
        res_abs = res_abs + lit::<T>(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + lit::<T>(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * half;
    let mut res_asc = lit::<T>(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + lit::<T>(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half_len;
    let res_abs = res_abs * half_len.abs();
    let res_asc = res_asc * half_len.abs();
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let scale = (lit::<T>(200.0) * error / res_asc).powf(lit(1.5));
        error = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = lit::<T>(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (lit::<T>(50.0) * T::epsilon()) && floor > error {
        error = floor;
    }
    Ok(Segment { a, b, value, error })
}

/// Adaptive integration of a fallible integrand over a finite interval.
pub fn try_integrate<T, F>(mut f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidQuery(format!("integration bounds must be finite with a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult::with_status(T::zero(), T::zero(), QuadStatus::Converged, 0));
    }
    let first = gk15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut segments = vec![first];
    let mut status = QuadStatus::Converged;
    while total_err > cfg.target(total) {
        if segments.len() >= cfg.max_subdivisions {
            status = QuadStatus::NonConvergence;
            break;
        }
        let worst = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc })
            .0;
        let seg = segments.swap_remove(worst);
        let mid = lit::<T>(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted at working precision
            segments.push(seg);
            status = QuadStatus::NonConvergence;
            break;
        }
        let left = gk15(&mut f, seg.a, mid)?;
        let right = gk15(&mut f, mid, seg.b)?;
        evaluations += 30;
        total = total - seg.value + left.value + right.value;
        segments.push(left);
        segments.push(right);
        // re-sum to keep the running totals free of drift
        total_err = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
    }
    total = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
    if !total.is_finite() {
        return Ok(QuadResult::diverged(total, evaluations));
    }
    Ok(QuadResult::with_status(total, total_err, status, evaluations))
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    try_integrate(|x| Ok(f(x)), a, b, cfg)
}

fn combine<T: Real>(head: QuadResult<T>, tail: QuadResult<T>, cfg: &QuadConfig<T>) -> QuadResult<T> {
    let value = head.value + tail.value;
    let error = head.error_estimate + tail.error_estimate;
    let evaluations = head.evaluations + tail.evaluations;
    if head.status == QuadStatus::DivergenceSuspected
        || tail.status == QuadStatus::DivergenceSuspected
        || !value.is_finite()
        || value.abs() > cfg.abs_tol.recip()
    {
        return QuadResult::diverged(value, evaluations);
    }
    let status = if head.converged && tail.converged && error <= cfg.target(value) {
        QuadStatus::Converged
    } else {
        QuadStatus::NonConvergence
    };
    QuadResult::with_status(value, error, status, evaluations)
}

/// Integration of a fallible integrand over `[a, ∞)`.
///
/// The strategy follows the decay hint: an exponential rate `r` splits the
/// range at `a + 30/r` and maps the tail with `x = c - ln(v)/r`; a power
/// `q > 1` uses the algebraic map `x = a + s·v/(1-v)`; a power `q <= 1` is
/// not integrable. Without a hint, integrals over `[a, 2^k max(a, 1)]` are
/// accumulated until successive partial integrals settle.
pub fn try_integrate_to_infinity<T, F>(
    mut f: F,
    a: T,
    cfg: &QuadConfig<T>,
    decay: Option<TailDecay<T>>,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !a.is_finite() {
        return Err(Error::InvalidQuery(format!("lower bound must be finite, got {a}")));
    }
    match decay.unwrap_or(TailDecay::Undetermined) {
        TailDecay::Exponential(rate) if rate > T::zero() => {
            let split = a + lit::<T>(30.0) / rate;
            let head = try_integrate(&mut f, a, split, cfg)?;
            let tail = try_integrate(
                |v: T| {
                    let x = split - v.ln() / rate;
                    if !x.is_finite() {
                        return Ok(T::zero());
                    }
                    let y = f(x)?;
                    Ok(if y == T::zero() { y } else { y / (rate * v) })
                },
                T::zero(),
                T::one(),
                cfg,
            )?;
            Ok(combine(head, tail, cfg))
        }
        TailDecay::Polynomial(q) if q <= T::one() => Ok(QuadResult::diverged(T::infinity(), 0)),
        TailDecay::Polynomial(_) => {
            let scale = cfg.infinite_map_scale * (T::one() + a.abs());
            let r = try_integrate(
                |v: T| {
                    let w = T::one() - v;
                    let x = a + scale * v / w;
                    if !x.is_finite() {
                        return Ok(T::zero());
                    }
                    let y = f(x)?;
                    Ok(if y == T::zero() { y } else { y * scale / (w * w) })
                },
                T::zero(),
                T::one(),
                cfg,
            )?;
            let zero = QuadResult::with_status(T::zero(), T::zero(), QuadStatus::Converged, 0);
            Ok(combine(zero, r, cfg))
        }
        _ => doubling_horizon(f, a, cfg),
    }
}

/// Integration of `f` over `[a, ∞)`; see [`try_integrate_to_infinity`].
pub fn integrate_to_infinity<T, F>(
    mut f: F,
    a: T,
    cfg: &QuadConfig<T>,
    decay: Option<TailDecay<T>>,
) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    try_integrate_to_infinity(|x| Ok(f(x)), a, cfg, decay)
}

fn doubling_horizon<T, F>(mut f: F, a: T, cfg: &QuadConfig<T>) -> Result<QuadResult<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let base = a.max(T::one());
    let mut lo = a;
    let mut partial = T::zero();
    let mut error = T::zero();
    let mut evaluations = 0;
    let mut all_converged = true;
    let mut settled = 0;
    let mut prev_increment = T::infinity();
    let mut non_shrinking = 0;
    for k in 1..=MAX_DOUBLINGS {
        let hi = base * lit::<T>(2.0).powi(k as i32);
        let piece = try_integrate(&mut f, lo, hi, cfg)?;
        evaluations += piece.evaluations;
        all_converged &= piece.converged;
        partial = partial + piece.value;
        error = error + piece.error_estimate;
        lo = hi;
        let inc = piece.value.abs();
        if !partial.is_finite() || partial.abs() > cfg.abs_tol.recip() {
            return Ok(QuadResult::diverged(partial, evaluations));
        }
        // increments of an integrable tail eventually shrink geometrically
        if inc > cfg.abs_tol && inc >= lit::<T>(0.995) * prev_increment {
            non_shrinking += 1;
            if non_shrinking >= NON_SHRINKING_LIMIT {
                return Ok(QuadResult::diverged(partial, evaluations));
            }
        } else {
            non_shrinking = 0;
        }
        prev_increment = inc;
        if inc < cfg.abs_tol {
            settled += 1;
            if settled >= 2 {
                let status = if all_converged { QuadStatus::Converged } else { QuadStatus::NonConvergence };
                return Ok(QuadResult::with_status(partial, error + inc, status, evaluations));
            }
        } else {
            settled = 0;
        }
    }
    Ok(QuadResult::with_status(partial, error, QuadStatus::NonConvergence, evaluations))
}
