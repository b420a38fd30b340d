//! Theta functions with real characteristics and the genus-2 Riemann theta function.
//!
//! The one-dimensional function is
//!
//! ```text
//! theta[a; b](z, tau) = sum_s exp(pi i tau (s + a)^2 + 2 pi i (z + b)(s + a))
//! ```
//!
//! Evaluation first brings `tau` into the fundamental domain with integer
//! shifts `tau -> tau - n` and the inversion `tau -> -1/tau`, then sums a window
//! of terms centred on the dominant one. Every intermediate result carries a
//! separate real log-scale so that the Gaussian prefactors produced by the
//! inversion never overflow on their own.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{GkpError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Upper bound returned by [`series_radius`] when no radius satisfies the bound.
pub const RADIUS_CAP: usize = 1 << 24;

const MAX_REDUCTION_STEPS: usize = 256;

/// Arguments of `theta[a; b](z, tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaArgs {
    pub a: f64,
    pub b: f64,
    pub z: Complex64,
    pub tau: Complex64,
}

impl ThetaArgs {
    pub fn new(a: f64, b: f64, z: Complex64, tau: Complex64) -> Self {
        Self { a, b, z, tau }
    }

    /// The form used throughout the code-state formulas: real `z = x`, `tau = i t`.
    pub fn imag_tau(a: f64, b: f64, x: f64, t: f64) -> Self {
        Self {
            a,
            b,
            z: Complex64::new(x, 0.0),
            tau: Complex64::new(0.0, t),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(GkpError::Domain("characteristics must be finite".into()));
        }
        if !(self.z.re.is_finite() && self.z.im.is_finite() && self.tau.re.is_finite()) {
            return Err(GkpError::Domain("z and tau must be finite".into()));
        }
        if !(self.tau.im > 0.0 && self.tau.im.is_finite()) {
            return Err(GkpError::Domain(format!(
                "Im(tau) must be positive, got {}",
                self.tau.im
            )));
        }
        Ok(())
    }
}

/// Truncation controls shared by every series in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute tolerance relative to the dominant term of a sum.
    pub tol: f64,
    /// Largest admissible one-sided summation radius.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: 1e-16,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        let ctrl = Self { tol, max_terms };
        ctrl.validate()?;
        Ok(ctrl)
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::check_range("tol", self.tol, self.tol > 0.0, "tol > 0")?;
        crate::error::check_range(
            "max_terms",
            self.max_terms as f64,
            self.max_terms >= 1,
            "max_terms >= 1",
        )
    }
}

/// Smallest `S >= 1` for which the tail `sum_{|s+a| > S} exp(-pi im_tau (s+a)^2 + 2 pi |im_z| |s+a|)`
/// is bounded by `tol`.
///
/// Each side is bounded by a geometric series started at its first lattice point beyond `S`,
/// which is valid once the summand is decreasing (`S >= |im_z| / im_tau`).
/// Returns [`RADIUS_CAP`] if no radius up to the cap works.
pub fn series_radius(im_tau: f64, im_z: f64, a: f64, tol: f64) -> usize {
    if !(im_tau > 0.0) || !(tol > 0.0) || !a.is_finite() || !im_z.is_finite() {
        return RADIUS_CAP;
    }
    let y = im_z.abs();
    let log_tol = tol.ln();
    let side = |x0: f64| -> f64 {
        let log_ratio = -PI * im_tau * (2.0 * x0 + 1.0) + 2.0 * PI * y;
        if log_ratio >= 0.0 {
            return f64::INFINITY;
        }
        -PI * im_tau * x0 * x0 + 2.0 * PI * y * x0 - (-log_ratio.exp()).ln_1p()
    };
    let first_beyond = |s: f64, shift: f64| -> f64 {
        let gap = (shift - s).rem_euclid(1.0);
        s + if gap == 0.0 { 1.0 } else { gap }
    };
    let start = ((y / im_tau).ceil() as usize).max(1);
    for s in start..RADIUS_CAP {
        let sf = s as f64;
        let right = side(first_beyond(sf, a));
        let left = side(first_beyond(sf, -a));
        let hi = right.max(left);
        let log_tail = hi + (1.0 + (right.min(left) - hi).exp()).ln();
        if log_tail < log_tol {
            return s;
        }
    }
    RADIUS_CAP
}

/// Value with its first derivatives in `z` and `tau`, all scaled by `exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThetaJet {
    pub value: Complex64,
    pub dz: Complex64,
    pub dtau: Complex64,
    pub log_scale: f64,
}

impl ThetaJet {
    fn scale(self, factor: Complex64, log: f64) -> Self {
        Self {
            value: self.value * factor,
            dz: self.dz * factor,
            dtau: self.dtau * factor,
            log_scale: self.log_scale + log,
        }
    }
}

/// `c * exp(log)` without overflowing in the intermediate `exp`.
pub(crate) fn unscale(c: Complex64, log: f64) -> Complex64 {
    if c.re == 0.0 && c.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let norm = c.norm();
    Complex64::from_polar((norm.ln() + log).exp(), c.arg())
}

/// Splits a real number into an integer and a remainder in `[-1/2, 1/2)`.
fn split_half(x: f64) -> (f64, f64) {
    let n = (x + 0.5).floor();
    (n, x - n)
}

/// Theta value (and derivatives when `derivs` is set) in scaled form.
pub(crate) fn theta_jet(args: &ThetaArgs, ctrl: &SeriesControl, derivs: bool) -> Result<ThetaJet> {
    args.validate()?;
    ctrl.validate()?;
    jet_rec(*args, ctrl, derivs, 0)
}

fn jet_rec(args: ThetaArgs, ctrl: &SeriesControl, derivs: bool, depth: usize) -> Result<ThetaJet> {
    if depth > MAX_REDUCTION_STEPS {
        return Err(GkpError::NonConvergence {
            needed: depth,
            cap: MAX_REDUCTION_STEPS,
        });
    }
    let ThetaArgs { a, b, z, tau } = args;

    // theta[a + m; b] = theta[a; b]; theta[a; b + m] = exp(2 pi i a m) theta[a; b].
    let (_, a) = split_half(a);
    let (mb, b) = split_half(b);
    let char_phase = Complex64::from_polar(1.0, 2.0 * PI * a * mb);

    // tau = tau' + n: theta[a;b](z, tau) = exp(-pi i n a (1 + a)) theta[a; b + n a + n/2](z, tau').
    let n = tau.re.round();
    if n != 0.0 {
        let inner = ThetaArgs {
            a,
            b: b + n * a + 0.5 * n,
            z,
            tau: Complex64::new(tau.re - n, tau.im),
        };
        let phase = Complex64::from_polar(1.0, -PI * n * a * (1.0 + a));
        return Ok(jet_rec(inner, ctrl, derivs, depth + 1)?.scale(char_phase * phase, 0.0));
    }

    if tau.norm_sqr() < 1.0 - 1e-12 {
        // theta[a;b](z,tau) = (-i tau)^(-1/2) exp(-pi i z^2/tau) exp(2 pi i a b) theta[-b;a](z/tau, -1/tau)
        let u = z / tau;
        let inner_args = ThetaArgs {
            a: -b,
            b: a,
            z: u,
            tau: -1.0 / tau,
        };
        let inner = jet_rec(inner_args, ctrl, derivs, depth + 1)?;
        let gauss = -PI * I * z * z / tau;
        let mantissa = (-I * tau).powf(-0.5)
            * Complex64::from_polar(1.0, gauss.im + 2.0 * PI * a * b)
            * char_phase;
        let value = inner.value;
        let (dz, dtau) = if derivs {
            let dz = (-2.0 * PI * I * z / tau) * value + inner.dz / tau;
            let tau2 = tau * tau;
            let dtau = (-0.5 / tau + PI * I * z * z / tau2) * value - (z / tau2) * inner.dz
                + inner.dtau / tau2;
            (dz, dtau)
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        };
        return Ok(ThetaJet {
            value: value * mantissa,
            dz: dz * mantissa,
            dtau: dtau * mantissa,
            log_scale: inner.log_scale + gauss.re,
        });
    }

    Ok(direct_sum(a, b, z, tau, ctrl, derivs)?.scale(char_phase, 0.0))
}

/// Windowed summation around the dominant term.
fn direct_sum(
    a: f64,
    b: f64,
    z: Complex64,
    tau: Complex64,
    ctrl: &SeriesControl,
    derivs: bool,
) -> Result<ThetaJet> {
    let t = tau.im;
    let w = z + b;
    // Re of the exponent is -pi t x^2 - 2 pi Im(w) x, peaked at x* = -Im(w)/t.
    let x_peak = -w.im / t;
    let n0 = (x_peak - a).round();
    let x_center = n0 + a;
    let (t_eff, tol_eff) = if derivs {
        // x^2 exp(-pi t x^2) <= C exp(-pi t x^2 / 2) bounds the moment tails.
        let grow = 2.0 + x_center.abs();
        (0.5 * t, ctrl.tol * t.min(1.0) / (4.0 * grow * grow))
    } else {
        (t, ctrl.tol)
    };
    let radius = series_radius(t_eff, 0.0, x_center - x_peak, tol_eff);
    if radius > ctrl.max_terms {
        return Err(GkpError::NonConvergence {
            needed: radius,
            cap: ctrl.max_terms,
        });
    }
    let r = radius as i64 + 1;
    let mut value = Complex64::new(0.0, 0.0);
    let mut m1 = Complex64::new(0.0, 0.0);
    let mut m2 = Complex64::new(0.0, 0.0);
    for k in -r..=r {
        let x = x_center + k as f64;
        let dx = x - x_peak;
        let term = Complex64::from_polar(
            (-PI * t * dx * dx).exp(),
            PI * tau.re * x * x + 2.0 * PI * w.re * x,
        );
        value += term;
        if derivs {
            m1 += term * x;
            m2 += term * (x * x);
        }
    }
    Ok(ThetaJet {
        value,
        dz: 2.0 * PI * I * m1,
        dtau: PI * I * m2,
        log_scale: PI * w.im * w.im / t,
    })
}

/// `theta[a; b](z, tau)`.
pub fn theta_char(args: &ThetaArgs, ctrl: &SeriesControl) -> Result<Complex64> {
    let jet = theta_jet(args, ctrl, false)?;
    Ok(unscale(jet.value, jet.log_scale))
}

/// Derivative of `theta[a; b](z, tau)` with respect to `tau`.
pub fn theta_char_dtau(args: &ThetaArgs, ctrl: &SeriesControl) -> Result<Complex64> {
    let jet = theta_jet(args, ctrl, true)?;
    Ok(unscale(jet.dtau, jet.log_scale))
}

/// Derivative of `theta[a; b](z, tau)` with respect to `z`.
pub fn theta_char_dz(args: &ThetaArgs, ctrl: &SeriesControl) -> Result<Complex64> {
    let jet = theta_jet(args, ctrl, true)?;
    Ok(unscale(jet.dz, jet.log_scale))
}

/// One inversion step `tau -> -1/tau`.
///
/// Returns the arguments `[-b; a](z/tau, -1/tau)` together with the factor
/// `P = (-i tau)^(1/2) exp(pi i z^2/tau) exp(-2 pi i a b)` for which
/// `theta(transformed) = P * theta(original)`.
pub fn jacobi_transform(args: &ThetaArgs) -> Result<(ThetaArgs, Complex64)> {
    args.validate()?;
    let ThetaArgs { a, b, z, tau } = *args;
    let out = ThetaArgs {
        a: -b,
        b: a,
        z: z / tau,
        tau: -1.0 / tau,
    };
    let prefactor = (-I * tau).sqrt() * (PI * I * z * z / tau).exp()
        * Complex64::from_polar(1.0, -2.0 * PI * a * b);
    Ok((out, prefactor))
}

/// Arguments of the genus-2 Riemann theta function
/// `sum_{s in Z^2} exp(pi i (s+a)^T tau (s+a) + 2 pi i (z+b).(s+a))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannThetaArgs {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub z: [Complex64; 2],
    pub tau: [[Complex64; 2]; 2],
}

impl RiemannThetaArgs {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tau;
        let asym = (t[0][1] - t[1][0]).norm();
        let scale = t[0][1].norm().max(1.0);
        if asym > 1e-13 * scale {
            return Err(GkpError::Domain("tau matrix must be symmetric".into()));
        }
        let (y11, y12, y22) = (t[0][0].im, t[0][1].im, t[1][1].im);
        if !(y11 > 0.0 && y11 * y22 - y12 * y12 > 0.0) {
            return Err(GkpError::Domain(
                "imaginary part of tau matrix must be positive definite".into(),
            ));
        }
        let finite = self.a.iter().chain(self.b.iter()).all(|v| v.is_finite())
            && self.z.iter().all(|v| v.re.is_finite() && v.im.is_finite())
            && t.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(GkpError::Domain("Riemann theta arguments must be finite".into()));
        }
        Ok(())
    }

    fn min_eigen_imag(&self) -> f64 {
        let (y11, y12, y22) = (self.tau[0][0].im, self.tau[0][1].im, self.tau[1][1].im);
        let mean = 0.5 * (y11 + y22);
        let half_gap = (0.25 * (y11 - y22).powi(2) + y12 * y12).sqrt();
        // Product form avoids cancellation when the eigenvalues differ a lot.
        let det = y11 * y22 - y12 * y12;
        det / (mean + half_gap)
    }
}

/// Lattice sum with the diagonal second moments `sum x_i^2 term`, all scaled by `exp(log_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RiemannJet {
    pub value: Complex64,
    pub moment_11: Complex64,
    pub moment_22: Complex64,
    pub log_scale: f64,
}

/// Smallest box half-width `R` such that the lattice terms outside the box around the peak
/// sum to less than `tol`, given the smallest eigenvalue of `Im(tau)`.
pub(crate) fn box_radius(min_eig: f64, tol: f64) -> usize {
    let log_tol = tol.ln();
    for r in 1..RADIUS_CAP {
        // Shell k (k-1 < |x - x*|_inf <= k) holds at most 8k + 8 points, each below exp(-pi lambda (k-1)^2).
        let mut tail = 0.0;
        let mut k = r + 1;
        loop {
            let kf = (k - 1) as f64;
            let log_term = -PI * min_eig * kf * kf + (8.0 * k as f64 + 8.0).ln();
            let term = (log_term - log_tol).exp();
            tail += term;
            if term < 1e-3 * tail || k > r + 10_000 {
                break;
            }
            k += 1;
        }
        if tail < 0.5 {
            return r;
        }
    }
    RADIUS_CAP
}

pub(crate) fn riemann_jet(
    args: &RiemannThetaArgs,
    ctrl: &SeriesControl,
    moments: bool,
) -> Result<RiemannJet> {
    args.validate()?;
    ctrl.validate()?;
    let tau = args.tau;
    let y = [
        [tau[0][0].im, tau[0][1].im],
        [tau[1][0].im, tau[1][1].im],
    ];
    let w = [args.z[0] + args.b[0], args.z[1] + args.b[1]];
    // Re exponent = -pi x^T Y x - 2 pi Im(w).x, maximal at x* = -Y^{-1} Im(w).
    let det = y[0][0] * y[1][1] - y[0][1] * y[1][0];
    let x_peak = [
        -(y[1][1] * w[0].im - y[0][1] * w[1].im) / det,
        -(-y[1][0] * w[0].im + y[0][0] * w[1].im) / det,
    ];
    let peak_log = PI * (w[0].im * x_peak[0] + w[1].im * x_peak[1]) * -1.0;
    let n0 = [
        (x_peak[0] - args.a[0]).round(),
        (x_peak[1] - args.a[1]).round(),
    ];
    let center = [n0[0] + args.a[0], n0[1] + args.a[1]];
    let lambda = args.min_eigen_imag();
    let (lambda_eff, tol_eff) = if moments {
        let grow = 2.0 + center[0].abs().max(center[1].abs());
        (0.5 * lambda, ctrl.tol * lambda.min(1.0) / (4.0 * grow * grow))
    } else {
        (lambda, ctrl.tol)
    };
    let radius = box_radius(lambda_eff, tol_eff);
    if radius > ctrl.max_terms {
        return Err(GkpError::NonConvergence {
            needed: radius,
            cap: ctrl.max_terms,
        });
    }
    let r = radius as i64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut m11 = Complex64::new(0.0, 0.0);
    let mut m22 = Complex64::new(0.0, 0.0);
    for k0 in -r..=r {
        let x0 = center[0] + k0 as f64;
        let d0 = x0 - x_peak[0];
        for k1 in -r..=r {
            let x1 = center[1] + k1 as f64;
            let d1 = x1 - x_peak[1];
            let re = -PI * (y[0][0] * d0 * d0 + 2.0 * y[0][1] * d0 * d1 + y[1][1] * d1 * d1);
            let im = PI * (tau[0][0].re * x0 * x0 + 2.0 * tau[0][1].re * x0 * x1 + tau[1][1].re * x1 * x1)
                + 2.0 * PI * (w[0].re * x0 + w[1].re * x1);
            let term = Complex64::from_polar(re.exp(), im);
            value += term;
            if moments {
                m11 += term * (x0 * x0);
                m22 += term * (x1 * x1);
            }
        }
    }
    Ok(RiemannJet {
        value,
        moment_11: m11,
        moment_22: m22,
        log_scale: peak_log,
    })
}

/// Genus-2 Riemann theta function with characteristics.
pub fn riemann_theta2(args: &RiemannThetaArgs, ctrl: &SeriesControl) -> Result<Complex64> {
    let jet = riemann_jet(args, ctrl, false)?;
    Ok(unscale(jet.value, jet.log_scale))
}
