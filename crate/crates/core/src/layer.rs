//! Memoized layer functions for the nested moment integrals.
//!
//! A layer `u ↦ ∫_u^t g(r) dr` is tabulated on Chebyshev nodes and then
//! evaluated anywhere by barycentric interpolation. The node count starts
//! at 65 and doubles until the interpolant reproduces the next refinement
//! to the requested tolerance. Semi-infinite domains are mapped onto
//! `[-1, 1)` with `x = a + L (1 + ξ) / (1 - ξ)`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::scalar::{lit, Real};

pub(crate) const INITIAL_NODES: usize = 65;
/// Six refinements of either family: 4097 Lobatto or 4160 Gauss nodes.
pub(crate) const MAX_NODES: usize = 4160;

#[derive(Debug, Clone, Copy)]
pub(crate) enum Domain<T> {
    Finite { a: T, b: T },
    SemiInfinite { a: T, scale: T },
}

impl<T: Real> Domain<T> {
    fn to_x(self, xi: T) -> T {
        let one = T::one();
        match self {
            Domain::Finite { a, b } => {
                let half = lit::<T>(0.5);
                half * (a + b) + half * (b - a) * xi
            }
            Domain::SemiInfinite { a, scale } => a + scale * (one + xi) / (one - xi),
        }
    }

    fn to_xi(self, x: T) -> T {
        let one = T::one();
        match self {
            Domain::Finite { a, b } => ((x - a) - (b - x)) / (b - a),
            Domain::SemiInfinite { a, scale } => {
                if x.is_infinite() {
                    return one;
                }
                let d = x - a;
                (d - scale) / (d + scale)
            }
        }
    }
}

/// Chebyshev points of the second kind (extrema, endpoints included) or of
/// the first kind (roots, endpoints excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeFamily {
    Lobatto,
    Gauss,
}

impl NodeFamily {
    /// Nodes in increasing order with their barycentric weights.
    fn nodes<T: Real>(self, n: usize) -> (Vec<T>, Vec<T>) {
        let mut xi = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        match self {
            NodeFamily::Lobatto => {
                let m = (n - 1) as f64;
                for j in 0..n {
                    // ascending: cos(π (m - j) / m)
                    xi.push(lit::<T>((PI * (m - j as f64) / m).cos()));
                    let mut wj: f64 = if j % 2 == 0 { 1.0 } else { -1.0 };
                    if j == 0 || j == n - 1 {
                        wj *= 0.5;
                    }
                    w.push(lit::<T>(wj));
                }
            }
            NodeFamily::Gauss => {
                let nf = n as f64;
                for j in 0..n {
                    let k = (n - 1 - j) as f64;
                    let theta = PI * (2.0 * k + 1.0) / (2.0 * nf);
                    xi.push(lit::<T>(theta.cos()));
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    w.push(lit::<T>(sign * theta.sin()));
                }
            }
        }
        (xi, w)
    }

    fn refine(self, n: usize) -> usize {
        match self {
            NodeFamily::Lobatto => 2 * n - 1,
            NodeFamily::Gauss => 2 * n,
        }
    }
}

/// Algebraic envelope `((1 + x) / (1 + a))^(-exponent)` divided out before
/// interpolation on semi-infinite domains with power-law decay.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Envelope<T> {
    pub a: T,
    pub exponent: T,
}

impl<T: Real> Envelope<T> {
    fn at(&self, x: T) -> T {
        ((T::one() + x) / (T::one() + self.a)).powf(-self.exponent)
    }
}

/// Tabulated layer function.
#[derive(Debug, Clone)]
pub(crate) struct Layer<T> {
    domain: Domain<T>,
    envelope: Option<Envelope<T>>,
    xi: Vec<T>,
    weights: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> Layer<T> {
    pub(crate) fn eval(&self, x: T) -> T {
        let xi = self.domain.to_xi(x);
        let mut num = T::zero();
        let mut den = T::zero();
        for ((&node, &w), &v) in self.xi.iter().zip(&self.weights).zip(&self.values) {
            let d = xi - node;
            if d == T::zero() {
                return self.scale(x, v);
            }
            let c = w / d;
            num = num + c * v;
            den = den + c;
        }
        self.scale(x, num / den)
    }

    fn scale(&self, x: T, v: T) -> T {
        match self.envelope {
            Some(e) => v * e.at(x),
            None => v,
        }
    }

    pub(crate) fn nodes(&self) -> usize {
        self.xi.len()
    }
}

/// Values of a layer at a set of nodes, with the quadrature error bound
/// accumulated while computing them.
pub(crate) struct NodeValues<T> {
    pub values: Vec<T>,
    pub quad_error: T,
    pub evaluations: usize,
}

pub(crate) struct BuiltLayer<T> {
    pub layer: Layer<T>,
    /// Interpolation error relative to the layer's sup norm.
    pub interp_rel_error: T,
    /// Node quadrature error relative to the layer's sup norm.
    pub quad_rel_error: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tabulates a layer, doubling the node count until successive
/// interpolants agree to `rel_tol` of the sup norm (or `abs_tol`).
///
/// `compute` receives physical node positions in increasing order and
/// returns the layer values there (before any envelope is divided out).
pub(crate) fn build<T, F>(
    domain: Domain<T>,
    family: NodeFamily,
    envelope: Option<Envelope<T>>,
    abs_tol: T,
    rel_tol: T,
    mut compute: F,
) -> Result<BuiltLayer<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Result<NodeValues<T>>,
{
    let mut n = INITIAL_NODES;
    let mut evaluations = 0;
    let mut previous: Option<(Layer<T>, T)> = None;
    loop {
        let (xi, weights) = family.nodes::<T>(n);
        let xs: Vec<T> = xi.iter().map(|&v| domain.to_x(v)).collect();
        let raw = compute(&xs)?;
        evaluations += raw.evaluations;
        let values: Vec<T> = match envelope {
            Some(e) => raw.values.iter().zip(&xs).map(|(&v, &x)| v / e.at(x)).collect(),
            None => raw.values,
        };
        let sup = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let layer = Layer { domain, envelope, xi, weights, values };
        let quad_rel = if sup > T::zero() { raw.quad_error / sup } else { T::zero() };
        if let Some((coarse, coarse_sup)) = previous.take() {
            // compare the coarse interpolant against the fresh values
            let mut diff = T::zero();
            for (k, &x) in xs.iter().enumerate() {
                let fresh = layer.values[k];
                let old = match envelope {
                    Some(e) => coarse.eval(x) / e.at(x),
                    None => coarse.eval(x),
                };
                diff = diff.max((fresh - old).abs());
            }
            let scale = sup.max(coarse_sup);
            let target = abs_tol.max(rel_tol * scale) / lit(10.0);
            let rel = if scale > T::zero() { diff / scale } else { T::zero() };
            if diff <= target || family.refine(n) > MAX_NODES {
                return Ok(BuiltLayer {
                    layer,
                    interp_rel_error: rel,
                    quad_rel_error: quad_rel,
                    evaluations,
                    converged: diff <= target,
                });
            }
        }
        previous = Some((layer, sup));
        n = family.refine(n);
    }
}
