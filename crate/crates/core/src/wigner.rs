//! Wigner functions of `|j><j'|` for standard-form states.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, GkpError, Result};
use crate::observables::normalization;
use crate::params::StandardParams;
use crate::reps::{comb_gauss_with, CombMode, CombSpec, EvalPath};
use crate::theta::{riemann_jet, unscale, RiemannThetaArgs, SeriesControl};

/// Evaluation route for the Wigner function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WignerRoute {
    /// Two comb-product terms, each comb summed directly.
    CombProduct,
    /// The same two terms with each comb in theta closed form.
    Theta,
    /// Genus-2 Riemann theta convolution form.
    Riemann,
}

impl WignerRoute {
    pub const ALL: [WignerRoute; 3] = [WignerRoute::CombProduct, WignerRoute::Theta, WignerRoute::Riemann];
}

/// Rectangular phase-space sampling grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSpaceGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nq: usize,
    pub np: usize,
}

impl PhaseSpaceGrid {
    pub fn new(q_min: f64, q_max: f64, p_min: f64, p_max: f64, nq: usize, np: usize) -> Result<Self> {
        let g = Self {
            q_min,
            q_max,
            p_min,
            p_max,
            nq,
            np,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("q_max", self.q_max, self.q_min.is_finite() && self.q_max > self.q_min, "q_min < q_max")?;
        check_range("p_max", self.p_max, self.p_min.is_finite() && self.p_max > self.p_min, "p_min < p_max")?;
        check_range("nq", self.nq as f64, self.nq >= 2, "nq >= 2")?;
        check_range("np", self.np as f64, self.np >= 2, "np >= 2")
    }

    pub fn q_values(&self) -> Vec<f64> {
        linspace(self.q_min, self.q_max, self.nq)
    }

    pub fn p_values(&self) -> Vec<f64> {
        linspace(self.p_min, self.p_max, self.np)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|k| if k == n - 1 { b } else { a + h * k as f64 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerSample {
    pub q: f64,
    pub p: f64,
    pub value: Complex64,
}

/// Wigner function of `|j><j'|` with the normalization constants evaluated once.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    params: StandardParams,
    j: u32,
    j_prime: u32,
    inv_norm: f64,
    ctrl: SeriesControl,
}

impl WignerFunction {
    pub fn new(p: &StandardParams, j: u32, j_prime: u32, ctrl: &SeriesControl) -> Result<Self> {
        p.validate()?;
        ctrl.validate()?;
        let nj = normalization(&p.with_j(j)?, ctrl)?;
        let nk = normalization(&p.with_j(j_prime)?, ctrl)?;
        Ok(Self {
            params: *p,
            j,
            j_prime,
            inv_norm: 1.0 / (nj * nk).sqrt(),
            ctrl: *ctrl,
        })
    }

    pub fn value(&self, q: f64, mom: f64, route: WignerRoute) -> Result<Complex64> {
        check_range("q", q, true, "q finite")?;
        check_range("p", mom, true, "p finite")?;
        let raw = match route {
            WignerRoute::CombProduct => self.comb_terms(q, mom, EvalPath::Direct)?,
            WignerRoute::Theta => self.comb_terms(q, mom, EvalPath::Theta)?,
            WignerRoute::Riemann => self.riemann(q, mom)?,
        };
        Ok(raw * self.inv_norm)
    }

    /// Value by the theta route, cross-checked against the other two routes.
    ///
    /// Fails when any route differs by more than `10 max(tol, 1e-13) max(1, |W|)`.
    pub fn value_checked(&self, q: f64, mom: f64) -> Result<Complex64> {
        let w = self.value(q, mom, WignerRoute::Theta)?;
        let threshold = 10.0 * self.ctrl.tol.max(1e-13) * w.norm().max(1.0);
        for route in [WignerRoute::CombProduct, WignerRoute::Riemann] {
            let residual = (self.value(q, mom, route)? - w).norm();
            if residual > threshold {
                return Err(GkpError::RouteDisagreement { residual, threshold });
            }
        }
        Ok(w)
    }

    fn comb_terms(&self, q: f64, mom: f64, path: EvalPath) -> Result<Complex64> {
        let p = &self.params;
        let lambda = p.lambda();
        let d = p.label.d as f64;
        let a = (self.j + self.j_prime) as f64 / (2.0 * d);
        let a_p = (self.j as f64 - self.j_prime as f64) / (2.0 * d);
        let mu_q = lambda / (4.0 * p.sigma_p2);
        let mu_p = lambda / (4.0 * p.sigma_q2);
        let period_p = PI * lambda / p.gamma_spacing;
        let mut total = Complex64::new(0.0, 0.0);
        for half in [0.0, 0.5] {
            let eq = CombSpec::new(mu_q, p.gamma_spacing, a + half, CombMode::Plain)?;
            let ep = CombSpec::new(mu_p, period_p, a_p + half, CombMode::Phased)?;
            let fq = comb_gauss_with(&eq, p.sigma_q2, q, path, &self.ctrl)?;
            let fp = comb_gauss_with(&ep, p.sigma_p2, mom, path, &self.ctrl)?;
            total += fq * fp;
        }
        Ok(total)
    }

    fn riemann(&self, q: f64, mom: f64) -> Result<Complex64> {
        let p = &self.params;
        let lambda = p.lambda();
        let d = p.label.d as f64;
        let g = p.gamma_spacing;
        let d1 = 0.5 * g;
        let d2 = PI * lambda / g;
        let i2pi = Complex64::new(0.0, 1.0 / (2.0 * PI));
        let t11 = i2pi * d1 * d1 * (4.0 * p.sigma_p2 / lambda + 1.0 / p.sigma_q2);
        let t22 = i2pi * d2 * d2 * (4.0 * p.sigma_q2 / lambda + 1.0 / p.sigma_p2);
        let t12 = Complex64::new(-0.5, 0.0);
        let args = RiemannThetaArgs {
            a: [(self.j + self.j_prime) as f64 / d, 0.0],
            b: [0.0, self.j_prime as f64 / d],
            z: [-i2pi * (d1 * q / p.sigma_q2), -i2pi * (d2 * mom / p.sigma_p2)],
            tau: [[t11, t12], [t12, t22]],
        };
        let jet = riemann_jet(&args, &self.ctrl, false)?;
        let envelope = -0.5 * q * q / p.sigma_q2 - 0.5 * mom * mom / p.sigma_p2;
        let pref = 1.0 / (2.0 * PI * (p.sigma_q2 * p.sigma_p2).sqrt());
        Ok(unscale(jet.value, jet.log_scale + envelope) * pref)
    }
}

/// Wigner function of `|j><j'|` at one phase-space point.
pub fn wigner_point(
    p: &StandardParams,
    j: u32,
    j_prime: u32,
    q: f64,
    mom: f64,
    route: WignerRoute,
    ctrl: &SeriesControl,
) -> Result<Complex64> {
    WignerFunction::new(p, j, j_prime, ctrl)?.value(q, mom, route)
}

/// [`wigner_point`] on every grid node, row-major with `q` outer and `p` inner.
pub fn wigner_grid(
    p: &StandardParams,
    j: u32,
    j_prime: u32,
    grid: &PhaseSpaceGrid,
    route: WignerRoute,
    ctrl: &SeriesControl,
) -> Result<Vec<WignerSample>> {
    grid.validate()?;
    let w = WignerFunction::new(p, j, j_prime, ctrl)?;
    let ps = grid.p_values();
    let rows: Vec<Vec<WignerSample>> = grid
        .q_values()
        .into_par_iter()
        .map(|q| {
            ps.iter()
                .map(|&m| {
                    Ok(WignerSample {
                        q,
                        p: m,
                        value: w.value(q, m, route)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}
