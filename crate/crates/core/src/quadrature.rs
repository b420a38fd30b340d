//! Numerical integration on finite intervals.

use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{GkpError, Result};

const BASE_ORDER: usize = 20;
const MAX_DEPTH: usize = 48;
const MAX_SPLITS: usize = 20_000;

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn legendre_rule(order: usize) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order.max(1)).expect("order is at least one");
    GaussLegendre::new(order).as_node_weight_pairs().to_vec()
}

fn base_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(BASE_ORDER))
}

fn apply_rule<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> T {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    base_rule()
        .iter()
        .fold(T::zero(), |acc, &(x, w)| acc + f(mid + half * x) * (w * half))
}

/// Adaptive bisection on a 20-point Gauss-Legendre rule until the estimated absolute
/// error is below `tol`.
///
/// Differences below a few ulps of the interval's own estimate are treated as converged,
/// and the number of subdivisions is capped.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, tol: f64) -> Result<T> {
    if !(a.is_finite() && b.is_finite()) || !(tol > 0.0) {
        return Err(GkpError::Domain("integration bounds and tol must be finite".into()));
    }
    if a == b {
        return Ok(T::zero());
    }
    let whole = apply_rule(&f, a, b);
    let mut state = Refinement {
        floor: 64.0 * f64::EPSILON * whole.magnitude(),
        budget: MAX_SPLITS,
        unresolved: 0.0,
    };
    let value = refine(&f, a, b, whole, tol, 0, &mut state);
    if state.unresolved > tol {
        return Err(GkpError::Quadrature {
            tol,
            estimate: state.unresolved,
        });
    }
    Ok(value)
}

struct Refinement {
    floor: f64,
    budget: usize,
    unresolved: f64,
}

fn refine<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    whole: T,
    tol: f64,
    depth: usize,
    state: &mut Refinement,
) -> T {
    let mid = 0.5 * (a + b);
    let left = apply_rule(f, a, mid);
    let right = apply_rule(f, mid, b);
    let halves = left + right;
    let err = (halves - whole).magnitude();
    if err <= tol.max(state.floor).max(4.0 * f64::EPSILON * halves.magnitude()) {
        return halves;
    }
    if depth >= MAX_DEPTH || state.budget == 0 {
        state.unresolved += err;
        return halves;
    }
    state.budget -= 1;
    refine(f, a, mid, left, 0.5 * tol, depth + 1, state)
        + refine(f, mid, b, right, 0.5 * tol, depth + 1, state)
}

/// [`integrate`] over consecutive intervals between sorted `points`.
///
/// Placing a break at every narrow feature guarantees that no feature falls between the
/// initial sample nodes unnoticed.
pub fn integrate_pieces<T: QuadValue, F: Fn(f64) -> T>(f: F, points: &[f64], tol: f64) -> Result<T> {
    if points.len() < 2 {
        return Ok(T::zero());
    }
    let share = tol / (points.len() - 1) as f64;
    let mut total = T::zero();
    for w in points.windows(2) {
        total = total + integrate(&f, w[0], w[1], share)?;
    }
    Ok(total)
}

/// Nodes and weights of a composite Gauss-Legendre rule with `panels` equal panels.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = legendre_rule(order);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for k in 0..panels {
        let lo = a + h * k as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in &rule {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Composite trapezoid rule weights for `n` equally spaced samples on `[a, b]`.
pub fn trapezoid_weights(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "trapezoid rule needs at least two samples");
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h })
        .collect()
}
