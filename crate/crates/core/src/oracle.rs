//! Position amplitudes of the three approximations evaluated from their definitions.
//!
//! Each definition is a lattice sum `sum_s exp(-(a q^2 + 2 b q x_s + c x_s^2))` over
//! `x_s = alpha (d s + j)`, normalized by adaptive quadrature. Nothing here goes through a
//! theta function, so these amplitudes serve as independent references.

use serde::Serialize;

use crate::error::{check_range, Result};
use crate::params::{Approx1Params, Approx2Params, Approx3Params, CodeLabel};
use crate::quadrature::integrate_pieces;

const LOG_CUT: f64 = 46.0;

/// Normalized definitional amplitude `sqrt(zeta) psi(zeta q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefinitionalState {
    a: f64,
    b: f64,
    c: f64,
    alpha: f64,
    label: CodeLabel,
    zeta: f64,
    scale: f64,
}

impl DefinitionalState {
    /// `sum_s exp(-kappa^2 x_s^2 / 2) exp(-(q - x_s)^2 / (2 Delta^2))`.
    pub fn approx1(p: &Approx1Params) -> Result<Self> {
        p.validate()?;
        let w = 0.5 / (p.delta_sq_param * p.delta_sq_param);
        Self::build(w, -w, 0.5 * p.kappa * p.kappa + w, p.alpha, p.label)
    }

    /// `sum_s exp(-gamma^2 (q + x_s)^2 / 8 - (q - x_s)^2 / (2 delta^2))`.
    pub fn approx2(p: &Approx2Params) -> Result<Self> {
        p.validate()?;
        let g = p.gamma * p.gamma / 8.0;
        let w = 0.5 / (p.delta * p.delta);
        Self::build(g + w, g - w, g + w, p.alpha, p.label)
    }

    /// Mehler kernel `sum_s exp(-((1 + e^-2b)(q^2 + x_s^2) - 4 e^-b q x_s) / (2 (1 - e^-2b)))`.
    pub fn approx3(p: &Approx3Params) -> Result<Self> {
        p.validate()?;
        let e = (-p.beta).exp();
        let den = -2.0 * (-2.0 * p.beta).exp_m1();
        let diag = (1.0 + e * e) / den;
        Self::build(diag, -2.0 * e / den, diag, p.alpha, p.label)
    }

    /// The state `S(ln zeta)|psi>`.
    pub fn squeezed(mut self, zeta: f64) -> Result<Self> {
        check_range("zeta", zeta, zeta > 0.0, "zeta > 0")?;
        self.zeta *= zeta;
        Ok(self)
    }

    fn build(a: f64, b: f64, c: f64, alpha: f64, label: CodeLabel) -> Result<Self> {
        check_range("a", a, a > 0.0 && c > 0.0 && a * c > b * b, "positive definite form")?;
        let mut s = Self {
            a,
            b,
            c,
            alpha,
            label,
            zeta: 1.0,
            scale: 1.0,
        };
        let pts = s.breaks();
        let mass: f64 = integrate_pieces(|q| s.bare(q).powi(2), &pts, 1e-15 * s.peak_sq())?;
        s.scale = 1.0 / mass.sqrt();
        Ok(s)
    }

    fn spacing(&self) -> f64 {
        self.alpha * self.label.d as f64
    }

    /// Spike positions are `-b x_s / a`.
    fn spike_ratio(&self) -> f64 {
        -self.b / self.a
    }

    fn peak_sq(&self) -> f64 {
        (0..self.label.d as i64 * 4)
            .map(|k| {
                let q = self.spike_ratio() * self.alpha * (k - 2 * self.label.d as i64) as f64;
                self.bare(q).powi(2)
            })
            .fold(0.0, f64::max)
    }

    fn breaks(&self) -> Vec<f64> {
        let ratio = self.spike_ratio().abs();
        let env = self.c - self.b * self.b / self.a;
        let cut = ratio * ((LOG_CUT / env).sqrt() + 2.0 * self.spacing());
        let half = 0.5 * ratio * self.spacing();
        let offset = ratio * self.alpha * self.label.j as f64;
        let n = (cut / half).ceil() as i64 + 1;
        let mut pts = vec![-cut];
        pts.extend(
            (-n..=n)
                .map(|k| offset + half * k as f64)
                .filter(|x| x.abs() < cut),
        );
        pts.push(cut);
        pts
    }

    /// Unnormalized lattice sum at `q`.
    fn bare(&self, q: f64) -> f64 {
        let x_star = -self.b * q / self.c;
        let floor_val = -q * q * (self.a - self.b * self.b / self.c);
        let reach = (LOG_CUT / self.c).sqrt() + self.spacing();
        let d = self.label.d as f64;
        let j = self.label.j as f64;
        let lo = (((x_star - reach) / self.alpha - j) / d).floor() as i64;
        let hi = (((x_star + reach) / self.alpha - j) / d).ceil() as i64;
        (lo..=hi)
            .map(|s| {
                let x = self.alpha * (d * s as f64 + j);
                (-self.c * (x - x_star).powi(2) + floor_val).exp()
            })
            .sum()
    }

    /// Normalized amplitude at `q`.
    pub fn amplitude(&self, q: f64) -> f64 {
        self.zeta.sqrt() * self.scale * self.bare(self.zeta * q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{standard_from_approx3, Approx3Params};
    use crate::reps::position_amplitude;
    use crate::theta::SeriesControl;

    #[test]
    fn approx3_matches_standard_form() {
        let l = CodeLabel::new(3, 2).unwrap();
        let p3 = Approx3Params::new(0.15, l.alpha_d(), l).unwrap();
        let o = DefinitionalState::approx3(&p3).unwrap();
        let s = standard_from_approx3(&p3).unwrap();
        for k in 0..40 {
            let q = -4.0 + 0.2 * k as f64;
            let want = position_amplitude(&s, q, true, &SeriesControl::default()).unwrap();
            assert!((o.amplitude(q) - want).abs() < 1e-10 * want.abs().max(1e-3), "{q}");
        }
    }

    #[test]
    fn squeeze_preserves_norm() {
        let l = CodeLabel::new(2, 0).unwrap();
        let p1 = Approx1Params::new(0.3, 0.3, l.alpha_d(), l).unwrap();
        let o = DefinitionalState::approx1(&p1).unwrap().squeezed(1.7).unwrap();
        let mass: f64 = integrate_pieces(|q| o.amplitude(q).powi(2), &[-20.0, -10.0, 0.0, 10.0, 20.0], 1e-12).unwrap();
        assert!((mass - 1.0).abs() < 1e-9);
    }
}
