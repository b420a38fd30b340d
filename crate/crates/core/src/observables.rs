//! Normalization constants, inner products and the average photon number.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GkpError, Result};
use crate::params::StandardParams;
use crate::quadrature::integrate_pieces;
use crate::reps::{
    fock_coefficients, momentum_amplitude, momentum_cutoff, position_amplitude, position_cutoff,
};
use crate::theta::{
    riemann_jet, theta_char, theta_jet, unscale, RiemannThetaArgs, SeriesControl, ThetaArgs,
};

/// Route used to compute the average photon number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonRoute {
    /// Log-derivative of the two-term theta product.
    ThetaFormula,
    /// Quadrature of `q^2 |psi(q)|^2` and `p^2 |psi(p)|^2`.
    MomentIntegral,
    /// `sum n |c_n|^2` over Fock coefficients.
    FockSum,
    /// Log-derivative of the genus-2 Riemann theta form.
    RiemannTheta,
}

impl PhotonRoute {
    pub const ALL: [PhotonRoute; 4] = [
        PhotonRoute::ThetaFormula,
        PhotonRoute::MomentIntegral,
        PhotonRoute::FockSum,
        PhotonRoute::RiemannTheta,
    ];
}

/// Average photon number with the quadrature second moments it comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhotonBreakdown {
    pub n_avg: f64,
    pub q2_moment: f64,
    pub p2_moment: f64,
    pub route: PhotonRoute,
}

/// Imaginary parts of the two lattice parameters: `(2 Gamma^2 sigma_p^2 / (pi Lambda), 2 pi sigma_q^2 Lambda / Gamma^2)`.
fn lattice_params(p: &StandardParams) -> (f64, f64) {
    let lambda = p.lambda();
    let g2 = p.gamma_spacing * p.gamma_spacing;
    (
        2.0 * g2 * p.sigma_p2 / (PI * lambda),
        2.0 * PI * p.sigma_q2 * lambda / g2,
    )
}

/// `theta[a1; 0](0, i t1) theta[0; b2](0, i t2) + theta[a1 + 1/2; 0](0, i t1) theta[0; b2 + 1/2](0, i t2)`.
fn two_term(p: &StandardParams, a1: f64, b2: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    let (t1, t2) = lattice_params(p);
    let th = |a: f64, b: f64, t: f64| theta_char(&ThetaArgs::imag_tau(a, b, 0.0, t), ctrl);
    Ok(th(a1, 0.0, t1)? * th(0.0, b2, t2)? + th(a1 + 0.5, 0.0, t1)? * th(0.0, b2 + 0.5, t2)?)
}

/// Normalization constant `N` of the standard-form state `|j>`.
pub fn normalization(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    p.validate()?;
    let j = p.label.j as f64 / p.label.d as f64;
    let n = two_term(p, j, 0.0, ctrl)?.re;
    if !(n > 0.0 && n.is_finite()) {
        return Err(GkpError::Domain(format!("normalization evaluated to {n}")));
    }
    Ok(n)
}

/// `<j'|j>` for two states sharing `(sigma_q^2, sigma_p^2, Gamma, d)`; the label index of `p` is ignored.
pub fn inner_product(p: &StandardParams, j: u32, j_prime: u32, ctrl: &SeriesControl) -> Result<Complex64> {
    let pj = p.with_j(j)?;
    let pk = p.with_j(j_prime)?;
    let d = p.label.d as f64;
    let raw = two_term(p, (j + j_prime) as f64 / (2.0 * d), (j as f64 - j_prime as f64) / (2.0 * d), ctrl)?;
    Ok(raw / (normalization(&pj, ctrl)? * normalization(&pk, ctrl)?).sqrt())
}

/// `1 / sqrt(4 sigma_q^2 sigma_p^2)`.
pub fn asymptotic_normalization(sigma_q2: f64, sigma_p2: f64) -> Result<f64> {
    crate::error::check_range("sigma_q2", sigma_q2, sigma_q2 > 0.0 && sigma_q2 < 0.5, "0 < sigma_q2 < 1/2")?;
    crate::error::check_range("sigma_p2", sigma_p2, sigma_p2 > 0.0 && sigma_p2 < 0.5, "0 < sigma_p2 < 1/2")?;
    Ok(1.0 / (4.0 * sigma_q2 * sigma_p2).sqrt())
}

/// `exp(-(j' - j)^2 Gamma^2 / (8 d^2 sigma_q^2))`.
///
/// Valid while `|j - j'| / 2d` stays well below `1/2`; near that edge the exact overlap
/// is up to twice as large.
pub fn asymptotic_overlap(p: &StandardParams, j: u32, j_prime: u32) -> Result<f64> {
    p.validate()?;
    p.with_j(j)?;
    p.with_j(j_prime)?;
    let dj = j_prime as f64 - j as f64;
    let d = p.label.d as f64;
    Ok((-(dj * dj) * p.gamma_spacing.powi(2) / (8.0 * d * d * p.sigma_q2)).exp())
}

/// Average photon number by the selected route.
pub fn avg_photon(p: &StandardParams, route: PhotonRoute, ctrl: &SeriesControl) -> Result<PhotonBreakdown> {
    p.validate()?;
    let (q2, p2) = match route {
        PhotonRoute::ThetaFormula => moments_theta(p, ctrl)?,
        PhotonRoute::MomentIntegral => moments_quadrature(p, ctrl)?,
        PhotonRoute::FockSum => moments_fock(p, ctrl)?,
        PhotonRoute::RiemannTheta => moments_riemann(p, ctrl)?,
    };
    Ok(PhotonBreakdown {
        n_avg: 0.5 * (q2 + p2 - 1.0),
        q2_moment: q2,
        p2_moment: p2,
        route,
    })
}

/// Runs every route and reports a disagreement beyond `rel_tol` relative to the theta formula.
pub fn avg_photon_checked(p: &StandardParams, rel_tol: f64, ctrl: &SeriesControl) -> Result<Vec<PhotonBreakdown>> {
    let all = PhotonRoute::ALL
        .iter()
        .map(|&r| avg_photon(p, r, ctrl))
        .collect::<Result<Vec<_>>>()?;
    let reference = all[0].n_avg;
    let threshold = rel_tol * reference.abs().max(1.0);
    for b in &all[1..] {
        let residual = (b.n_avg - reference).abs();
        if residual > threshold {
            return Err(GkpError::RouteDisagreement { residual, threshold });
        }
    }
    Ok(all)
}

/// `<q^2>` and `<p^2>` from `sigma^2 - 2 d/dx ln N~`.
fn moments_theta(p: &StandardParams, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    let (t1, t2) = lattice_params(p);
    let jd = p.label.j as f64 / p.label.d as f64;
    let lambda = p.lambda();
    let g2 = p.gamma_spacing * p.gamma_spacing;
    let jet = |a: f64, b: f64, t: f64| theta_jet(&ThetaArgs::imag_tau(a, b, 0.0, t), ctrl, true);
    let ja = jet(jd, 0.0, t1)?;
    let jb = jet(0.0, 0.0, t2)?;
    let jc = jet(jd + 0.5, 0.0, t1)?;
    let jdd = jet(0.0, 0.5, t2)?;
    // All jets in a pair share one log-scale, so the ratios below are scale free.
    let scale_ab = ja.log_scale + jb.log_scale;
    let scale_cd = jc.log_scale + jdd.log_scale;
    let top = scale_ab.max(scale_cd);
    let wa = (scale_ab - top).exp();
    let wc = (scale_cd - top).exp();
    let n = wa * ja.value * jb.value + wc * jc.value * jdd.value;
    // d tau1/dx = i Gamma^2 / 2 pi, d tau2/dy = i pi Lambda^2 / (2 Gamma^2).
    let dx = Complex64::new(0.0, g2 / (2.0 * PI));
    let dy = Complex64::new(0.0, PI * lambda * lambda / (2.0 * g2));
    let nx = dx * (wa * ja.dtau * jb.value + wc * jc.dtau * jdd.value);
    let ny = dy * (wa * ja.value * jb.dtau + wc * jc.value * jdd.dtau);
    Ok((
        p.sigma_q2 - 2.0 * (nx / n).re,
        p.sigma_p2 - 2.0 * (ny / n).re,
    ))
}

/// Break points at every spike centre and between spikes of a comb.
fn comb_breaks(period: f64, offset: f64, cut: f64) -> Vec<f64> {
    let half = 0.5 * period;
    let start = ((-cut - offset) / half).floor() as i64;
    let end = ((cut - offset) / half).ceil() as i64;
    let mut pts: Vec<f64> = (start..=end).map(|k| offset + half * k as f64).collect();
    pts.retain(|x| x.abs() < cut);
    pts.insert(0, -cut);
    pts.push(cut);
    pts
}

fn moments_quadrature(p: &StandardParams, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    let quad_tol = 1e-12;
    let jd = p.label.j as f64 / p.label.d as f64;
    let qcut = position_cutoff(p, 1e-20);
    let qbreaks = comb_breaks(p.gamma_spacing, jd * p.gamma_spacing, qcut);
    let fq = |q: f64| -> f64 {
        match position_amplitude(p, q, true, ctrl) {
            Ok(v) => q * q * v * v,
            Err(_) => f64::NAN,
        }
    };
    let q2: f64 = integrate_pieces(fq, &qbreaks, quad_tol)?;
    let period_p = 2.0 * PI * p.lambda() / p.gamma_spacing;
    let pcut = momentum_cutoff(p, 1e-20);
    let pbreaks = comb_breaks(period_p, 0.0, pcut);
    let fp = |m: f64| -> f64 {
        match momentum_amplitude(p, m, true, ctrl) {
            Ok(v) => m * m * v.norm_sqr(),
            Err(_) => f64::NAN,
        }
    };
    let p2: f64 = integrate_pieces(fp, &pbreaks, quad_tol)?;
    if !(q2.is_finite() && p2.is_finite()) {
        return Err(GkpError::Quadrature {
            tol: quad_tol,
            estimate: f64::INFINITY,
        });
    }
    Ok((q2, p2))
}

/// Fock coefficients with `n_max` doubled until the missing weight is below `1e-11`.
pub fn converged_fock(p: &StandardParams, ctrl: &SeriesControl) -> Result<Vec<Complex64>> {
    let mut n_max = 64usize;
    loop {
        let c = fock_coefficients(p, n_max, ctrl)?;
        let weight: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        if 1.0 - weight < 1e-11 {
            return Ok(c);
        }
        if n_max >= 1 << 14 {
            return Err(GkpError::NonConvergence {
                needed: n_max * 2,
                cap: 1 << 14,
            });
        }
        n_max *= 2;
    }
}

fn moments_fock(p: &StandardParams, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    let c = converged_fock(p, ctrl)?;
    let diag: f64 = c
        .iter()
        .enumerate()
        .map(|(n, v)| (n as f64 + 0.5) * v.norm_sqr())
        .sum();
    // <n|q^2|n+2> = -<n|p^2|n+2> = sqrt((n+1)(n+2)) / 2.
    let off: f64 = (0..c.len().saturating_sub(2))
        .map(|n| {
            let nf = n as f64;
            ((nf + 1.0) * (nf + 2.0)).sqrt() * (c[n].conj() * c[n + 2]).re
        })
        .sum();
    Ok((diag + off, diag - off))
}

/// Genus-2 lattice parameter of the alternative normalization form.
fn riemann_tau(p: &StandardParams) -> [[Complex64; 2]; 2] {
    let lambda = p.lambda();
    let g2 = p.gamma_spacing * p.gamma_spacing;
    let off = Complex64::new(-0.5, 0.0);
    [
        [Complex64::new(0.0, p.sigma_p2 * g2 / (2.0 * PI * lambda)), off],
        [off, Complex64::new(0.0, 2.0 * PI * p.sigma_q2 * lambda / g2)],
    ]
}

fn riemann_args(p: &StandardParams, j: u32, j_prime: u32) -> RiemannThetaArgs {
    let d = p.label.d as f64;
    let zero = Complex64::new(0.0, 0.0);
    RiemannThetaArgs {
        a: [(j + j_prime) as f64 / d, 0.0],
        b: [0.0, j_prime as f64 / d],
        z: [zero; 2],
        tau: riemann_tau(p),
    }
}

fn moments_riemann(p: &StandardParams, ctrl: &SeriesControl) -> Result<(f64, f64)> {
    let j = p.label.j;
    let jet = riemann_jet(&riemann_args(p, j, j), ctrl, true)?;
    let lambda = p.lambda();
    let g2 = p.gamma_spacing * p.gamma_spacing;
    let d11 = -g2 / 8.0 * jet.moment_11 / jet.value;
    let d22 = -(PI * PI * lambda * lambda) / (2.0 * g2) * jet.moment_22 / jet.value;
    Ok((p.sigma_q2 - 2.0 * d11.re, p.sigma_p2 - 2.0 * d22.re))
}

/// Normalization, overlap and photon number of the genus-2 alternative forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiemannVariants {
    pub norm: f64,
    pub overlap: Complex64,
    pub n_avg: f64,
}

/// Genus-2 Riemann theta evaluations of `N_j`, `<j'|j>` and the photon number of `|j>`.
pub fn riemann_variants(p: &StandardParams, j: u32, j_prime: u32, ctrl: &SeriesControl) -> Result<RiemannVariants> {
    p.validate()?;
    let pj = p.with_j(j)?;
    let pk = p.with_j(j_prime)?;
    let norm_of = |s: &StandardParams| -> Result<f64> {
        let jet = riemann_jet(&riemann_args(s, s.label.j, s.label.j), ctrl, false)?;
        Ok(unscale(jet.value, jet.log_scale).re)
    };
    let nj = norm_of(&pj)?;
    let nk = norm_of(&pk)?;
    let jet = riemann_jet(&riemann_args(p, j, j_prime), ctrl, false)?;
    let overlap = unscale(jet.value, jet.log_scale) / (nj * nk).sqrt();
    let (q2, p2) = moments_riemann(&pj, ctrl)?;
    Ok(RiemannVariants {
        norm: nj,
        overlap,
        n_avg: 0.5 * (q2 + p2 - 1.0),
    })
}
