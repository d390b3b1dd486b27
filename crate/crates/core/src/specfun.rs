//! Real-order special functions: `ln Γ` and the modified Bessel function of
//! the first kind `I_p(x)` for `p > -1`, `x >= 0`.
//!
//! `I_p` is evaluated from its ascending series below a crossover point and
//! from the large-argument expansion above it. Everything is carried in log
//! space so that ratios such as `I_p(a) / I_p(b)` stay finite for large
//! arguments.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(k)` for `k = 2..=30`.
const ZETA: [f64; 29] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_370_0,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
];

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(1 + e)` for `|e| <= 0.25` from the Taylor series around 1.
fn log_gamma_1p<T: Real>(e: T) -> T {
    let mut sum = -lit::<T>(EULER_GAMMA) * e;
    let mut pow = -e;
    for (i, z) in ZETA.iter().enumerate() {
        let k = i + 2;
        pow = pow * -e;
        let term = lit::<T>(*z) * pow / from_usize::<T>(k);
        sum = sum + term;
        if term.abs() <= T::epsilon() * lit(1e-3) * sum.abs() {
            break;
        }
    }
    sum
}

fn log_gamma_lanczos<T: Real>(x: T) -> T {
    let z = x - T::one();
    let mut acc = lit::<T>(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<T>(*c) / (z + from_usize(i));
    }
    let t = z + lit(LANCZOS_G + 0.5);
    lit::<T>(0.5) * (T::TAU()).ln() + (z + lit(0.5)) * t.ln() - t + acc.ln()
}

fn log_gamma_stirling<T: Real>(x: T) -> T {
    let inv = x.recip();
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1})
    let series = inv
        * (lit::<T>(1.0 / 12.0)
            + inv2
                * (lit::<T>(-1.0 / 360.0)
                    + inv2
                        * (lit::<T>(1.0 / 1260.0) + inv2 * (lit::<T>(-1.0 / 1680.0) + inv2 * lit::<T>(1.0 / 1188.0)))));
    (x - lit(0.5)) * x.ln() - x + lit::<T>(0.5) * T::TAU().ln() + series
}

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || x.is_infinite() {
        return Err(Error::domain("log_gamma", format!("argument must be positive and finite, got {x}")));
    }
    let quarter = lit::<T>(0.25);
    let one = T::one();
    let two = lit::<T>(2.0);
    let v = if (x - one).abs() <= quarter {
        log_gamma_1p(x - one)
    } else if (x - two).abs() <= quarter {
        let e = x - two;
        log_gamma_1p(e) + e.ln_1p()
    } else if x < lit(0.75) {
        // Γ(x) = Γ(x + 1) / x
        log_gamma(x + one)? - x.ln()
    } else if x >= lit(10.0) {
        log_gamma_stirling(x)
    } else {
        log_gamma_lanczos(x)
    };
    Ok(v)
}

/// Order of `I_p`, restricted to `p > -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder<T> {
    p: T,
}

impl<T: Real> BesselOrder<T> {
    pub fn new(p: T) -> Result<Self> {
        if !p.is_finite() || p <= -T::one() {
            return Err(Error::domain("BesselOrder", format!("order must be finite and > -1, got {p}")));
        }
        Ok(Self { p })
    }

    /// Order `δ/2 - 1` associated with Bessel dimension `δ > 0`.
    pub fn from_dimension(delta: T) -> Result<Self> {
        if !(delta > T::zero()) {
            return Err(Error::domain("BesselOrder", format!("dimension must be positive, got {delta}")));
        }
        Self::new(delta / lit(2.0) - T::one())
    }

    pub fn value(self) -> T {
        self.p
    }

    /// Argument above which the large-argument expansion is used.
    pub fn crossover(self) -> T {
        lit::<T>(12.0).max(self.p * self.p / lit(2.0))
    }
}

fn check_arg<T: Real>(function: &'static str, x: T) -> Result<()> {
    if !(x >= T::zero()) || x.is_infinite() {
        return Err(Error::domain(function, format!("argument must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// `ln Σ_k (x²/4)^k Γ(p+1) / (k! Γ(k+p+1))`, i.e. `ln I_p(x)` with the
/// leading factor `(x/2)^p / Γ(p+1)` divided out. All terms are positive.
fn log_series_normalized<T: Real>(p: T, x: T) -> T {
    let q = x * x / lit(4.0);
    let big = T::max_value().sqrt();
    let mut term = T::one();
    let mut sum = T::one();
    let mut log_scale = T::zero();
    let tiny = T::epsilon() * lit(0.05);
    let mut k = 1usize;
    loop {
        let kf = from_usize::<T>(k);
        let ratio = q / (kf * (kf + p));
        term = term * ratio;
        sum = sum + term;
        if ratio < T::one() && term <= tiny * sum {
            break;
        }
        if sum > big {
            sum = sum / big;
            term = term / big;
            log_scale = log_scale + big.ln();
        }
        k += 1;
    }
    sum.ln() + log_scale
}

/// `ln I_p(x)` from the large-argument expansion
/// `e^x / sqrt(2πx) · Σ_k (-1)^k a_k(p) / x^k`.
fn log_asymptotic<T: Real>(p: T, x: T) -> T {
    let mu = lit::<T>(4.0) * p * p;
    let eight_x = lit::<T>(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    let mut prev_abs = T::infinity();
    for k in 1..200usize {
        let odd = from_usize::<T>(2 * k - 1);
        let next = -term * (mu - odd * odd) / (from_usize::<T>(k) * eight_x);
        let a = next.abs();
        if next == T::zero() {
            break;
        }
        // optimal truncation once the terms stop shrinking
        if k > 6 && a >= prev_abs {
            break;
        }
        term = next;
        sum = sum + term;
        prev_abs = a;
        if a <= T::epsilon() * lit(0.01) * sum.abs() && k >= 6 {
            break;
        }
    }
    x - lit::<T>(0.5) * (T::TAU() * x).ln() + sum.ln()
}

/// `ln I_p(x)`. Never overflows for representable `x`.
///
/// Returns `-inf` at `x = 0` for `p > 0`; fails with a range error at `x = 0`
/// for `-1 < p < 0` where `I_p` is unbounded.
pub fn log_bessel_i<T: Real>(order: BesselOrder<T>, x: T) -> Result<T> {
    check_arg("log_bessel_i", x)?;
    let p = order.value();
    if x == T::zero() {
        return if p == T::zero() {
            Ok(T::zero())
        } else if p > T::zero() {
            Ok(T::neg_infinity())
        } else {
            Err(Error::Range { function: "log_bessel_i", detail: format!("I_{p}(0) is unbounded for negative order") })
        };
    }
    if x > order.crossover() {
        Ok(log_asymptotic(p, x))
    } else {
        Ok(p * (x / lit(2.0)).ln() - log_gamma(p + T::one())? + log_series_normalized(p, x))
    }
}

/// `ln( I_p(x) Γ(p+1) / (x/2)^p )`: the log of `I_p` relative to its
/// small-argument law. Equals `0` at `x = 0` and is free of the
/// `p ln x` cancellation near the origin.
pub fn log_bessel_i_normalized<T: Real>(order: BesselOrder<T>, x: T) -> Result<T> {
    check_arg("log_bessel_i_normalized", x)?;
    let p = order.value();
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x > order.crossover() {
        Ok(log_asymptotic(p, x) - p * (x / lit(2.0)).ln() + log_gamma(p + T::one())?)
    } else {
        Ok(log_series_normalized(p, x))
    }
}

/// `I_p(x)`. Fails with a range error where `I_p(x)` is not representable.
pub fn bessel_i<T: Real>(order: BesselOrder<T>, x: T) -> Result<T> {
    let l = log_bessel_i(order, x).map_err(|e| match e {
        Error::Domain { detail, .. } => Error::Domain { function: "bessel_i", detail },
        Error::Range { detail, .. } => Error::Range { function: "bessel_i", detail },
        other => other,
    })?;
    if l > T::max_value().ln() {
        return Err(Error::Range { function: "bessel_i", detail: format!("I_p({x}) overflows; use log_bessel_i") });
    }
    Ok(l.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(p: f64) -> BesselOrder<f64> {
        BesselOrder::new(p).unwrap()
    }

    #[test]
    fn log_gamma_examples() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert_relative_eq!(log_gamma(0.5).unwrap(), std::f64::consts::PI.sqrt().ln(), max_relative = 1e-14);
        assert!(log_gamma(0.0_f64).is_err());
        assert!(log_gamma(-1.5_f64).is_err());
    }

    #[test]
    fn log_gamma_recurrence_across_branches() {
        // ln Γ(x + 1) = ln Γ(x) + ln x covers each branch boundary
        let mut x = 0.01;
        while x < 50.0 {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + f64::ln(x);
            assert!((lhs - rhs).abs() <= 2e-14 * (1.0 + lhs.abs()), "x = {x}: {lhs} vs {rhs}");
            x *= 1.07;
        }
    }

    #[test]
    fn log_gamma_f32() {
        assert!((log_gamma(0.5_f32).unwrap() - 0.572_364_9).abs() < 1e-6);
    }

    #[test]
    fn order_validation() {
        assert!(BesselOrder::new(-1.0).is_err());
        assert!(BesselOrder::new(-2.0).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(BesselOrder::new(-0.5).is_ok());
        assert_eq!(BesselOrder::from_dimension(3.0).unwrap().value(), 0.5);
        assert!(BesselOrder::from_dimension(0.0).is_err());
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(bessel_i(order(0.0), 0.0).unwrap(), 1.0);
        let half = (2.0 / std::f64::consts::PI).sqrt() * 1.0_f64.sinh();
        assert_relative_eq!(bessel_i(order(0.5), 1.0).unwrap(), half, max_relative = 1e-13);
        assert_relative_eq!(bessel_i(order(0.0), 30.0).unwrap(), 781_672_297_823.977_5, max_relative = 1e-10);
        assert_relative_eq!(bessel_i(order(1.0), 2.0).unwrap(), 1.590_636_854_637_329, max_relative = 1e-13);
        assert_eq!(log_bessel_i(order(0.0), 0.0).unwrap(), 0.0);
        assert_relative_eq!(log_bessel_i(order(0.0), 100.0).unwrap(), 96.779_732_689_942_58, max_relative = 1e-13);
    }

    #[test]
    fn asymptotic_leading_term_within_one_percent_at_30() {
        let lead = 30.0_f64.exp() / (60.0 * std::f64::consts::PI).sqrt();
        let v = bessel_i(order(0.0), 30.0).unwrap();
        assert!((v / lead - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_arguments_stay_in_log_space() {
        assert!(bessel_i(order(0.0), 1000.0).is_err());
        let l = log_bessel_i(order(0.0), 1.0e6).unwrap();
        assert!(l.is_finite());
        assert_relative_eq!(l, 1.0e6 - 0.5 * (std::f64::consts::TAU * 1.0e6).ln(), max_relative = 1e-12);
    }

    #[test]
    fn zero_argument_edge_cases() {
        assert_eq!(bessel_i(order(1.0), 0.0).unwrap(), 0.0);
        assert_eq!(log_bessel_i(order(2.5), 0.0).unwrap(), f64::NEG_INFINITY);
        assert!(log_bessel_i(order(-0.5), 0.0).is_err());
        assert_eq!(log_bessel_i_normalized(order(-0.5), 0.0).unwrap(), 0.0);
        assert!(log_bessel_i(order(0.0), -1.0).is_err());
    }

    #[test]
    fn log_and_linear_agree() {
        for &p in &[-0.5, 0.0, 0.5, 1.0, 2.5] {
            for &x in &[1e-6, 0.3, 2.0, 11.9, 12.1, 40.0, 300.0] {
                let a = log_bessel_i(order(p), x).unwrap();
                let b = bessel_i(order(p), x).unwrap().ln();
                assert!((a - b).abs() <= 1e-10, "p={p} x={x}");
            }
        }
    }

    #[test]
    fn continuous_across_crossover() {
        for &p in &[-0.5, 0.0, 0.3, 1.0, 2.5, 7.0] {
            let o = order(p);
            let c = o.crossover();
            let below = log_bessel_i(o, c).unwrap();
            let above = log_bessel_i(o, c * (1.0 + 1e-12)).unwrap();
            assert!((below - above).abs() < 1e-9 * below.abs().max(1.0), "p={p}: {below} {above}");
        }
    }

    #[test]
    fn small_argument_law() {
        for &p in &[-0.5, 0.0, 0.5, 1.0, 2.5] {
            let x = 1e-8_f64;
            let lead = (x / 2.0).powf(p) / log_gamma(p + 1.0).unwrap().exp();
            let v = bessel_i(order(p), x).unwrap();
            assert!((v / lead - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn recurrence_identity() {
        for &p in &[0.5, 1.0, 1.7, 3.0] {
            for &x in &[0.1, 1.0, 5.0, 12.5, 25.0, 80.0] {
                let lhs = bessel_i(order(p - 1.0), x).unwrap() - bessel_i(order(p + 1.0), x).unwrap();
                let rhs = 2.0 * p / x * bessel_i(order(p), x).unwrap();
                assert!((lhs / rhs - 1.0).abs() < 1e-8, "p={p} x={x}: {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn monotone_in_argument() {
        for &p in &[0.0, 0.5, 2.5] {
            let mut prev = log_bessel_i(order(p), 1e-6).unwrap();
            let mut x = 1e-6 * 1.3;
            while x < 1e3 {
                let v = log_bessel_i(order(p), x).unwrap();
                assert!(v > prev, "p={p} x={x}");
                prev = v;
                x *= 1.3;
            }
        }
    }
}
