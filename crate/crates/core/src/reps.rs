//! Position, momentum, grid and Fock representations of standard-form states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_range, GkpError, Result};
use crate::observables::normalization;
use crate::params::StandardParams;
use crate::quadrature::composite_rule;
use crate::theta::{theta_jet, unscale, SeriesControl, ThetaArgs};

/// Which comb of Gaussian-weighted delta functions to convolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CombMode {
    /// `exp(-x^2/2mu) sum_s delta(x - (s+a) Gamma)`.
    Plain,
    /// `exp(-x^2/2mu) sum_s exp(2 pi i a s) delta(x + s Gamma)`.
    Phased,
}

/// How to evaluate a comb convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EvalPath {
    /// Closed form through a theta function.
    Theta,
    /// Truncated sum over the comb teeth.
    Direct,
}

/// Gaussian-weighted Dirac comb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombSpec {
    pub mu: f64,
    pub period: f64,
    pub shift: f64,
    pub phase_mode: CombMode,
}

impl CombSpec {
    pub fn new(mu: f64, period: f64, shift: f64, phase_mode: CombMode) -> Result<Self> {
        let spec = Self {
            mu,
            period,
            shift,
            phase_mode,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("mu", self.mu, self.mu > 0.0, "mu > 0")?;
        check_range("period", self.period, self.period > 0.0, "period > 0")?;
        check_range("shift", self.shift, true, "shift finite")
    }
}

/// One sample of a wave function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeSample {
    pub x: f64,
    pub value: Complex64,
}

/// Gaussian density with variance `nu`.
pub fn gauss(nu: f64, x: f64) -> f64 {
    (-x * x / (2.0 * nu)).exp() / (2.0 * PI * nu).sqrt()
}

/// Comb convolved with a Gaussian, `E * G_nu (x)` or `E~ * G_nu (x)`, via the theta closed form.
pub fn comb_gauss(spec: &CombSpec, nu: f64, x: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    comb_gauss_with(spec, nu, x, EvalPath::Theta, ctrl)
}

pub fn comb_gauss_with(
    spec: &CombSpec,
    nu: f64,
    x: f64,
    path: EvalPath,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    spec.validate()?;
    check_range("nu", nu, nu > 0.0, "nu > 0")?;
    check_range("x", x, true, "x finite")?;
    ctrl.validate()?;
    match path {
        EvalPath::Theta => comb_theta(spec, nu, x, ctrl),
        EvalPath::Direct => comb_direct(spec, nu, x, ctrl),
    }
}

fn comb_theta(spec: &CombSpec, nu: f64, x: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    let CombSpec {
        mu, period, shift, ..
    } = *spec;
    let ratio = 1.0 + nu / mu;
    let z = -x / (ratio * period);
    let t = 2.0 * PI * nu / (ratio * period * period);
    let args = match spec.phase_mode {
        CombMode::Plain => ThetaArgs::imag_tau(0.0, shift, z, t),
        CombMode::Phased => ThetaArgs::imag_tau(shift, 0.0, z, t),
    };
    let jet = theta_jet(&args, ctrl, false)?;
    // The envelope exp(-x^2 / 2(mu+nu)) is folded into the log-scale to avoid underflow.
    let log_env = -x * x / (2.0 * (mu + nu)) + 0.5 * (mu / (period * period * (mu + nu))).ln();
    Ok(unscale(jet.value, jet.log_scale + log_env))
}

fn comb_direct(spec: &CombSpec, nu: f64, x: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    let CombSpec {
        mu,
        period,
        shift,
        phase_mode,
    } = *spec;
    // Tooth position y contributes exp(-y^2/2mu - (x-y)^2/2nu), a Gaussian in y
    // centred at x mu/(mu+nu) with variance mu nu/(mu+nu).
    let centre = x * mu / (mu + nu);
    let var = mu * nu / (mu + nu);
    let reach = (2.0 * var * (-ctrl.tol.ln()).max(1.0)).sqrt() + period;
    let norm = 1.0 / (2.0 * PI * nu).sqrt();
    let log_peak = -x * x / (2.0 * (mu + nu));
    let term = |y: f64| ((-y * y / (2.0 * mu) - (x - y).powi(2) / (2.0 * nu)) - log_peak).exp();
    let (lo, hi) = match phase_mode {
        // y = (s + a) Gamma
        CombMode::Plain => (
            ((centre - reach) / period - shift).floor(),
            ((centre + reach) / period - shift).ceil(),
        ),
        // y = -s Gamma
        CombMode::Phased => ((-(centre + reach) / period).floor(), (-(centre - reach) / period).ceil()),
    };
    let count = (hi - lo) as usize + 1;
    if count > 2 * ctrl.max_terms + 1 {
        return Err(GkpError::NonConvergence {
            needed: count / 2,
            cap: ctrl.max_terms,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut s = lo;
    while s <= hi {
        match phase_mode {
            CombMode::Plain => sum += term((s + shift) * period),
            CombMode::Phased => {
                sum += Complex64::from_polar(term(-s * period), 2.0 * PI * shift * s);
            }
        }
        s += 1.0;
    }
    Ok(unscale(sum * norm, log_peak))
}

fn position_comb(p: &StandardParams) -> CombSpec {
    CombSpec {
        mu: p.lambda() / (2.0 * p.sigma_p2),
        period: p.gamma_spacing,
        shift: p.label.j as f64 / p.label.d as f64,
        phase_mode: CombMode::Plain,
    }
}

fn momentum_comb(p: &StandardParams) -> CombSpec {
    let lambda = p.lambda();
    CombSpec {
        mu: lambda / (2.0 * p.sigma_q2),
        period: 2.0 * PI * lambda / p.gamma_spacing,
        shift: p.label.j as f64 / p.label.d as f64,
        phase_mode: CombMode::Phased,
    }
}

/// `sqrt(2 Gamma / (sqrt(Lambda) N))`.
pub fn position_prefactor(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let n = normalization(p, ctrl)?;
    Ok((2.0 * p.gamma_spacing / (p.lambda().sqrt() * n)).sqrt())
}

/// `sqrt(4 pi sqrt(Lambda) / (Gamma N))`.
pub fn momentum_prefactor(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let n = normalization(p, ctrl)?;
    Ok((4.0 * PI * p.lambda().sqrt() / (p.gamma_spacing * n)).sqrt())
}

/// Position wave function; without `normalized` the bare comb convolution is returned.
pub fn position_amplitude(
    p: &StandardParams,
    q: f64,
    normalized: bool,
    ctrl: &SeriesControl,
) -> Result<f64> {
    position_amplitude_with(p, q, normalized, EvalPath::Theta, ctrl)
}

pub fn position_amplitude_with(
    p: &StandardParams,
    q: f64,
    normalized: bool,
    path: EvalPath,
    ctrl: &SeriesControl,
) -> Result<f64> {
    p.validate()?;
    let bare = comb_gauss_with(&position_comb(p), 2.0 * p.sigma_q2, q, path, ctrl)?.re;
    if normalized {
        Ok(position_prefactor(p, ctrl)? * bare)
    } else {
        Ok(bare)
    }
}

/// Momentum wave function with the convention `psi(p) = (2 pi)^(-1/2) int exp(-i p q) psi(q) dq`.
pub fn momentum_amplitude(
    p: &StandardParams,
    mom: f64,
    normalized: bool,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    momentum_amplitude_with(p, mom, normalized, EvalPath::Theta, ctrl)
}

pub fn momentum_amplitude_with(
    p: &StandardParams,
    mom: f64,
    normalized: bool,
    path: EvalPath,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    p.validate()?;
    let bare = comb_gauss_with(&momentum_comb(p), 2.0 * p.sigma_p2, mom, path, ctrl)?;
    if normalized {
        Ok(bare * momentum_prefactor(p, ctrl)?)
    } else {
        Ok(bare)
    }
}

/// Normalized position amplitudes on a set of points, sharing one normalization.
pub fn position_samples(
    p: &StandardParams,
    xs: &[f64],
    ctrl: &SeriesControl,
) -> Result<Vec<AmplitudeSample>> {
    let pref = position_prefactor(p, ctrl)?;
    let comb = position_comb(p);
    xs.iter()
        .map(|&x| {
            let v = comb_gauss(&comb, 2.0 * p.sigma_q2, x, ctrl)?.re * pref;
            Ok(AmplitudeSample {
                x,
                value: Complex64::new(v, 0.0),
            })
        })
        .collect()
}

/// Radius beyond which the normalized position amplitude is below `tol` times its peak.
///
/// The amplitude envelope is `exp(-q^2 sigma_p^2)` up to the comb structure.
pub fn position_cutoff(p: &StandardParams, tol: f64) -> f64 {
    (-tol.min(0.5).ln() / p.sigma_p2).sqrt() + 2.0 * p.gamma_spacing
}

/// Momentum counterpart of [`position_cutoff`]; the envelope is `exp(-p^2 sigma_q^2)`.
pub fn momentum_cutoff(p: &StandardParams, tol: f64) -> f64 {
    (-tol.min(0.5).ln() / p.sigma_q2).sqrt() + 4.0 * PI * p.lambda() / p.gamma_spacing
}

/// Grid (Zak) representation
/// `phi(u, v) = sqrt(alpha_d d) sum_s exp(-2 pi i v (s + u/2)) psi(alpha_d d (u + s))`
/// of the normalized state.
pub fn grid_amplitude(p: &StandardParams, u: f64, v: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    p.validate()?;
    check_range("u", u, true, "u finite")?;
    check_range("v", v, true, "v finite")?;
    let cell = p.label.alpha_d() * p.label.d as f64;
    let pref = position_prefactor(p, ctrl)?;
    let comb = position_comb(p);
    let cut = position_cutoff(p, ctrl.tol);
    let lo = (-cut / cell - u).floor();
    let hi = (cut / cell - u).ceil();
    if (hi - lo) as usize > 2 * ctrl.max_terms + 1 {
        return Err(GkpError::NonConvergence {
            needed: ((hi - lo) / 2.0) as usize,
            cap: ctrl.max_terms,
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut s = lo;
    while s <= hi {
        let psi = comb_gauss(&comb, 2.0 * p.sigma_q2, cell * (u + s), ctrl)?.re;
        sum += Complex64::from_polar(psi, -2.0 * PI * v * (s + 0.5 * u));
        s += 1.0;
    }
    Ok(sum * (cell.sqrt() * pref))
}

/// Harmonic-oscillator eigenfunctions `psi_0(q) .. psi_{n_max}(q)`.
pub fn hermite_functions(n_max: usize, q: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(PI.powf(-0.25) * (-0.5 * q * q).exp());
    if n_max >= 1 {
        out.push(2f64.sqrt() * q * out[0]);
    }
    for n in 1..n_max {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * q * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Single harmonic-oscillator eigenfunction.
pub fn hermite_function(n: usize, q: f64) -> f64 {
    hermite_functions(n, q)[n]
}

/// Fock coefficients `c_n = int psi_n(q) psi(q) dq`, `n = 0..=n_max`, of the normalized state.
///
/// Computed with a composite Gauss-Legendre rule whose panels resolve both the
/// Gaussian spikes of the state and the oscillations of `psi_{n_max}`.
pub fn fock_coefficients(p: &StandardParams, n_max: usize, ctrl: &SeriesControl) -> Result<Vec<Complex64>> {
    p.validate()?;
    let pref = position_prefactor(p, ctrl)?;
    let comb = position_comb(p);
    let turning = (2.0 * n_max as f64 + 1.0).sqrt();
    let cut = position_cutoff(p, 1e-18).max(turning + 10.0);
    let spike = (2.0 * p.sigma_q2).sqrt();
    let wave = 1.0 / turning;
    let width = spike.min(wave).min(0.5);
    let panels = (2.0 * cut / width).ceil() as usize;
    let rule = composite_rule(-cut, cut, panels, 16);
    let mut coeffs = vec![0.0f64; n_max + 1];
    for (q, w) in rule {
        let psi = comb_gauss(&comb, 2.0 * p.sigma_q2, q, ctrl)?.re * pref;
        if psi == 0.0 {
            continue;
        }
        let h = hermite_functions(n_max, q);
        for (c, hn) in coeffs.iter_mut().zip(h) {
            *c += w * psi * hn;
        }
    }
    Ok(coeffs.into_iter().map(|c| Complex64::new(c, 0.0)).collect())
}

/// `sum_n c_n psi_n(q)`.
pub fn fock_reconstruct(coeffs: &[Complex64], q: f64) -> Complex64 {
    if coeffs.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    hermite_functions(coeffs.len() - 1, q)
        .into_iter()
        .zip(coeffs)
        .map(|(h, c)| c * h)
        .sum()
}
