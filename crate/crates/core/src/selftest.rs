//! Cross-route and oracle checks over every module.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GkpError, Result};
use crate::observables::{
    asymptotic_normalization, avg_photon, inner_product, normalization, riemann_variants, PhotonRoute,
};
use crate::oracle::DefinitionalState;
use crate::params::{
    apply_squeeze, approx1_from_standard, remark1_convert, sigma2_from_db, standard_from_approx1,
    standard_from_approx2, standard_from_approx3, theorem1_parameters, Approx1Params, Approx2Params,
    Approx3Params, CodeLabel, StandardParams,
};
use crate::quadrature::{composite_rule, integrate_pieces};
use crate::reps::{
    comb_gauss_with, grid_amplitude, momentum_amplitude, position_amplitude, position_cutoff,
    position_prefactor, CombMode, CombSpec, EvalPath,
};
use crate::theta::{
    jacobi_transform, riemann_theta2, theta_char, theta_char_dtau, RiemannThetaArgs, SeriesControl,
    ThetaArgs,
};
use crate::wigner::{WignerFunction, WignerRoute};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    Theta,
    Params,
    Reps,
    Wigner,
    Observables,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 5] = [
        CheckGroup::Theta,
        CheckGroup::Params,
        CheckGroup::Reps,
        CheckGroup::Wigner,
        CheckGroup::Observables,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Theta => "theta",
            CheckGroup::Params => "params",
            CheckGroup::Reps => "reps",
            CheckGroup::Wigner => "wigner",
            CheckGroup::Observables => "observables",
        }
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckGroup {
    type Err = GkpError;

    fn from_str(s: &str) -> Result<Self> {
        CheckGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| GkpError::Domain(format!("unknown check group '{s}'")))
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check_name: String,
    pub group: CheckGroup,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestConfig {
    /// Groups to run; empty means all.
    pub only: Vec<CheckGroup>,
    /// Replaces every pass threshold.
    pub tol_override: Option<f64>,
    pub ctrl: SeriesControl,
}

type CheckFn = fn(&SeriesControl) -> Result<f64>;

struct Check {
    name: &'static str,
    group: CheckGroup,
    tolerance: f64,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check { name: "jacobi_transformation", group: CheckGroup::Theta, tolerance: 1e-12, run: jacobi_transformation },
    Check { name: "dtau_vs_finite_difference", group: CheckGroup::Theta, tolerance: 1e-7, run: dtau_vs_finite_difference },
    Check { name: "riemann_diagonal_factorization", group: CheckGroup::Theta, tolerance: 1e-12, run: riemann_diagonal },
    Check { name: "theorem1_standard_params", group: CheckGroup::Params, tolerance: 1e-13, run: theorem1_standard_params },
    Check { name: "approx1_round_trip", group: CheckGroup::Params, tolerance: 1e-14, run: approx1_round_trip },
    Check { name: "lemma1_theta_vs_direct", group: CheckGroup::Reps, tolerance: 1e-11, run: lemma1_paths },
    Check { name: "theorem1_amplitudes", group: CheckGroup::Reps, tolerance: 1e-10, run: theorem1_amplitudes },
    Check { name: "remark1_amplitudes", group: CheckGroup::Reps, tolerance: 1e-9, run: remark1_amplitudes },
    Check { name: "momentum_vs_fourier_quadrature", group: CheckGroup::Reps, tolerance: 1e-6, run: momentum_fourier },
    Check { name: "grid_quasi_periodicity", group: CheckGroup::Reps, tolerance: 1e-9, run: grid_quasi_periodicity },
    Check { name: "grid_norm", group: CheckGroup::Reps, tolerance: 1e-6, run: grid_norm },
    Check { name: "wigner_route_agreement", group: CheckGroup::Wigner, tolerance: 1e-10, run: wigner_routes },
    Check { name: "wigner_trace", group: CheckGroup::Wigner, tolerance: 1e-6, run: wigner_trace },
    Check { name: "wigner_marginals", group: CheckGroup::Wigner, tolerance: 1e-6, run: wigner_marginals },
    Check { name: "normalization_vs_quadrature", group: CheckGroup::Observables, tolerance: 1e-8, run: normalization_quadrature },
    Check { name: "photon_route_agreement", group: CheckGroup::Observables, tolerance: 1e-6, run: photon_routes },
    Check { name: "riemann_variants", group: CheckGroup::Observables, tolerance: 1e-10, run: riemann_forms },
    Check { name: "asymptotic_normalization_15db", group: CheckGroup::Observables, tolerance: 1e-3, run: asymptotic_15db },
];

/// Runs the selected checks in parallel and reports them in a fixed order.
pub fn run_selftest(cfg: &SelftestConfig) -> Vec<CheckResult> {
    CHECKS
        .par_iter()
        .filter(|c| cfg.only.is_empty() || cfg.only.contains(&c.group))
        .map(|c| {
            let tolerance = cfg.tol_override.unwrap_or(c.tolerance);
            let (residual, error) = match (c.run)(&cfg.ctrl) {
                Ok(r) => (r, None),
                Err(e) => (f64::INFINITY, Some(e.to_string())),
            };
            CheckResult {
                check_name: c.name.to_string(),
                group: c.group,
                residual,
                tolerance,
                pass: residual.is_finite() && residual <= tolerance,
                error,
            }
        })
        .collect()
}

/// Residual of the named check, or `None` for an unknown name.
pub fn check_residual(name: &str, ctrl: &SeriesControl) -> Option<Result<f64>> {
    CHECKS.iter().find(|c| c.name == name).map(|c| (c.run)(ctrl))
}

const CHARS: [f64; 7] = [0.0, 0.5, -0.5, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 6.0, -1.0 / 6.0];

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<R: Rng>(r: &mut R) -> f64 {
    CHARS[r.gen_range(0..CHARS.len())]
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn jacobi_transformation(ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let tau = Complex64::from_polar(r.gen_range(0.05..20.0), PI * r.gen_range(0.02..0.98));
        let z = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-0.3..0.3));
        let args = ThetaArgs::new(pick(&mut r), pick(&mut r), z, tau);
        let (out, pref) = jacobi_transform(&args)?;
        worst = worst.max(rel(theta_char(&out, ctrl)?, pref * theta_char(&args, ctrl)?));
    }
    Ok(worst)
}

fn dtau_vs_finite_difference(ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(2);
    let h = 1e-6;
    let ih = Complex64::new(0.0, h);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (a, b) = (pick(&mut r), pick(&mut r));
        let z = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-0.2..0.2));
        let tau = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(0.5..5.0));
        let plus = theta_char(&ThetaArgs::new(a, b, z, tau + ih), ctrl)?;
        let minus = theta_char(&ThetaArgs::new(a, b, z, tau - ih), ctrl)?;
        let fd = -Complex64::i() * (plus - minus) / (2.0 * h);
        let args = ThetaArgs::new(a, b, z, tau);
        let exact = theta_char_dtau(&args, ctrl)?;
        let scale = exact.norm().max(theta_char(&args, ctrl)?.norm());
        worst = worst.max((fd - exact).norm() / scale);
    }
    Ok(worst)
}

fn riemann_diagonal(ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(3);
    let zero = Complex64::new(0.0, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t0 = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(0.2..5.0));
        let t1 = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(0.2..5.0));
        let args = RiemannThetaArgs {
            a: [pick(&mut r), pick(&mut r)],
            b: [pick(&mut r), pick(&mut r)],
            z: [
                Complex64::new(r.gen_range(-1.0..1.0), 0.1),
                Complex64::new(r.gen_range(-1.0..1.0), -0.1),
            ],
            tau: [[t0, zero], [zero, t1]],
        };
        let f0 = theta_char(&ThetaArgs::new(args.a[0], args.b[0], args.z[0], t0), ctrl)?;
        let f1 = theta_char(&ThetaArgs::new(args.a[1], args.b[1], args.z[1], t1), ctrl)?;
        worst = worst.max(rel(riemann_theta2(&args, ctrl)?, f0 * f1));
    }
    Ok(worst)
}

/// The three Theorem 1 routes into the standard form, and their definitional amplitudes.
fn theorem1_routes(beta: f64, l: CodeLabel) -> Result<([StandardParams; 3], [DefinitionalState; 3])> {
    let t = theorem1_parameters(beta)?;
    let zeta = (1.0 + (t.kappa * t.delta_sq_param).powi(2)).sqrt();
    let a1 = Approx1Params::new(t.kappa, t.delta_sq_param, l.alpha_d(), l)?;
    let a2 = Approx2Params::new(t.gamma, t.delta, l.alpha_d(), l)?;
    let a3 = Approx3Params::new(beta, l.alpha_d(), l)?;
    Ok((
        [
            apply_squeeze(&standard_from_approx1(&a1)?, zeta)?,
            standard_from_approx2(&a2)?,
            standard_from_approx3(&a3)?,
        ],
        [
            DefinitionalState::approx1(&a1)?.squeezed(zeta)?,
            DefinitionalState::approx2(&a2)?,
            DefinitionalState::approx3(&a3)?,
        ],
    ))
}

const THEOREM1_BETAS: [f64; 4] = [0.05, 0.1, 0.2, 0.5];

fn theorem1_standard_params(_: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for beta in THEOREM1_BETAS {
        for d in [2, 3] {
            let (routes, _) = theorem1_routes(beta, CodeLabel::new(d, 0)?)?;
            for r in &routes[..2] {
                for (x, y) in [
                    (r.sigma_q2, routes[2].sigma_q2),
                    (r.sigma_p2, routes[2].sigma_p2),
                    (r.gamma_spacing, routes[2].gamma_spacing),
                ] {
                    worst = worst.max((x - y).abs() / y);
                }
            }
        }
    }
    Ok(worst)
}

fn approx1_round_trip(_: &SeriesControl) -> Result<f64> {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let l = CodeLabel::new(r.gen_range(2..7), 0)?;
        let p = Approx1Params::new(r.gen_range(0.05..0.8), r.gen_range(0.05..0.8), l.alpha_d(), l)?;
        let back = approx1_from_standard(&standard_from_approx1(&p)?)?;
        worst = worst
            .max((back.kappa - p.kappa).abs() / p.kappa)
            .max((back.delta_sq_param - p.delta_sq_param).abs() / p.delta_sq_param);
    }
    Ok(worst)
}

fn lemma1_paths(ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let mode = if k % 2 == 0 { CombMode::Plain } else { CombMode::Phased };
        let spec = CombSpec::new(r.gen_range(0.05..5.0), r.gen_range(0.3..4.0), r.gen_range(-1.0..1.0), mode)?;
        let nu = r.gen_range(0.01..1.0);
        let x = r.gen_range(-6.0..6.0);
        let t = comb_gauss_with(&spec, nu, x, EvalPath::Theta, ctrl)?;
        let d = comb_gauss_with(&spec, nu, x, EvalPath::Direct, ctrl)?;
        worst = worst.max(rel(t, d));
    }
    Ok(worst)
}

fn sample_line(half_width: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -half_width + 2.0 * half_width * k as f64 / (n - 1) as f64)
}

/// Maximum pointwise relative difference over 400 points on `+-3 Gamma`.
pub fn theorem1_amplitude_residual(beta: f64, d: u32, ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in 0..d {
        let (routes, oracles) = theorem1_routes(beta, CodeLabel::new(d, j)?)?;
        for q in sample_line(3.0 * routes[2].gamma_spacing, 400) {
            let reference = position_amplitude(&routes[2], q, true, ctrl)?;
            let mut values = Vec::with_capacity(5);
            for r in &routes[..2] {
                values.push(position_amplitude(r, q, true, ctrl)?);
            }
            values.extend(oracles.iter().map(|o| o.amplitude(q)));
            for v in values {
                worst = worst.max((v - reference).abs() / reference.abs());
            }
        }
    }
    Ok(worst)
}

fn theorem1_amplitudes(ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for beta in THEOREM1_BETAS {
        for d in [2, 3] {
            worst = worst.max(theorem1_amplitude_residual(beta, d, ctrl)?);
        }
    }
    Ok(worst)
}

/// Amplitude residual of the Remark 1 conversion for one Approximation 2 state, relative
/// to the peak amplitude.
pub fn remark1_residual(p: &Approx2Params, ctrl: &SeriesControl) -> Result<f64> {
    let conv = remark1_convert(p)?;
    let standard = standard_from_approx2(p)?;
    let defs = [
        DefinitionalState::approx2(p)?,
        DefinitionalState::approx1(&conv.approx1)?,
        DefinitionalState::approx3(&conv.approx3)?.squeezed(conv.zeta)?,
    ];
    let mut values = Vec::new();
    for q in sample_line(3.0 * standard.gamma_spacing, 400) {
        let reference = position_amplitude(&standard, q, true, ctrl)?;
        values.push((reference, defs.iter().map(|o| o.amplitude(q)).collect::<Vec<_>>()));
    }
    let peak = values.iter().map(|(r, _)| r.abs()).fold(0.0, f64::max);
    Ok(values
        .iter()
        .flat_map(|(r, vs)| vs.iter().map(move |v| (v - r).abs()))
        .fold(0.0, f64::max)
        / peak)
}

/// Deterministic Approximation 2 samples with `gamma delta < 1.5`.
pub fn remark1_samples(count: usize, seed: u64) -> Result<Vec<Approx2Params>> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let gamma = r.gen_range(0.1..1.2);
        let delta = r.gen_range(0.1..1.2);
        if gamma * delta >= 1.5 {
            continue;
        }
        let d = r.gen_range(2..4);
        let l = CodeLabel::new(d, r.gen_range(0..d))?;
        let alpha = l.alpha_d() * r.gen_range(0.7..1.3);
        out.push(Approx2Params::new(gamma, delta, alpha, l)?);
    }
    Ok(out)
}

fn remark1_amplitudes(ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in remark1_samples(20, 6)? {
        worst = worst.max(remark1_residual(&p, ctrl)?);
    }
    Ok(worst)
}

fn momentum_fourier(ctrl: &SeriesControl) -> Result<f64> {
    let p = StandardParams::symmetric(0.05, CodeLabel::new(2, 1)?)?;
    let cut = position_cutoff(&p, 1e-18);
    let half = 0.25 * p.gamma_spacing;
    let n = (cut / half).ceil() as i64;
    let mut pts: Vec<f64> = (-n..=n).map(|k| k as f64 * half).collect();
    pts[0] = -cut;
    pts[2 * n as usize] = cut;
    let mut worst = 0.0f64;
    for mom in [0.0, 0.3, -0.8, 1.7, 2.9] {
        let ft: Complex64 = integrate_pieces(
            |q| Complex64::from_polar(position_amplitude(&p, q, true, ctrl).unwrap_or(f64::NAN), -mom * q),
            &pts,
            1e-11,
        )? / (2.0 * PI).sqrt();
        worst = worst.max((ft - momentum_amplitude(&p, mom, true, ctrl)?).norm());
    }
    Ok(worst)
}

/// Largest `|phi(u + n1, v + n2) - exp(-pi i (n1 n2 + u n2 - v n1)) phi(u, v)|` over 20 samples.
pub fn grid_quasi_periodicity_residual(p: &StandardParams, seed: u64, ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (u, v) = (r.gen_range(0.0..1.0), r.gen_range(0.0..1.0));
        let (n1, n2) = (r.gen_range(-3i32..=3), r.gen_range(-3i32..=3));
        let base = grid_amplitude(p, u, v, ctrl)?;
        let shifted = grid_amplitude(p, u + n1 as f64, v + n2 as f64, ctrl)?;
        let phase = Complex64::from_polar(1.0, -PI * ((n1 * n2) as f64 + u * n2 as f64 - v * n1 as f64));
        worst = worst.max((shifted - phase * base).norm());
    }
    Ok(worst)
}

fn grid_quasi_periodicity(ctrl: &SeriesControl) -> Result<f64> {
    let p = StandardParams::symmetric(0.07, CodeLabel::new(3, 1)?)?;
    grid_quasi_periodicity_residual(&p, 7, ctrl)
}

/// `int_0^1 int_0^1 |phi|^2 du dv`: composite Gauss-Legendre in `u`, periodic trapezoid in `v`.
pub fn grid_norm_integral(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let nv = 48;
    let rule = composite_rule(0.0, 1.0, 100, 16);
    let rows: Vec<f64> = rule
        .par_iter()
        .map(|&(u, w)| -> Result<f64> {
            let mut s = 0.0;
            for k in 0..nv {
                s += grid_amplitude(p, u, k as f64 / nv as f64, ctrl)?.norm_sqr();
            }
            Ok(w * s / nv as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.iter().sum())
}

fn grid_norm(ctrl: &SeriesControl) -> Result<f64> {
    let p = StandardParams::symmetric(0.07, CodeLabel::new(3, 1)?)?;
    Ok((grid_norm_integral(&p, ctrl)? - 1.0).abs())
}

fn wigner_routes(ctrl: &SeriesControl) -> Result<f64> {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = [2u32, 3, 6][r.gen_range(0..3)];
        let p = StandardParams::new(r.gen_range(0.03..0.3), r.gen_range(0.03..0.3), r.gen_range(1.0..4.0), CodeLabel::new(d, 0)?)?;
        let (j, k) = (r.gen_range(0..d), r.gen_range(0..d));
        let w = WignerFunction::new(&p, j, k, ctrl)?;
        let q = 2.0 * p.gamma_spacing * r.gen_range(-1.0..1.0);
        let m = 2.0 * p.gamma_spacing * r.gen_range(-1.0..1.0);
        let a = w.value(q, m, WignerRoute::CombProduct)?;
        for route in [WignerRoute::Theta, WignerRoute::Riemann] {
            worst = worst.max(rel(a, w.value(q, m, route)?));
        }
    }
    Ok(worst)
}

/// Symmetric trapezoid nodes on `[-half_width, half_width]` with spacing at most `h`.
pub fn trapezoid_axis(half_width: f64, h: f64) -> (Vec<f64>, f64) {
    let n = (half_width / h).ceil() as i64;
    let step = half_width / n as f64;
    ((-n..=n).map(|k| k as f64 * step).collect(), step)
}

/// Half-width outside which the Wigner function of a state is below roughly `1e-10`.
pub fn wigner_window(p: &StandardParams) -> f64 {
    (23.0 / (2.0 * p.sigma_q2.min(p.sigma_p2))).sqrt() + p.gamma_spacing
}

/// Trapezoid `int int W_{|j><j'|}` minus `<j'|j>`.
pub fn wigner_trace_residual(p: &StandardParams, j: u32, j_prime: u32, ctrl: &SeriesControl) -> Result<f64> {
    let w = WignerFunction::new(p, j, j_prime, ctrl)?;
    let (xs, h) = trapezoid_axis(wigner_window(p), 0.1);
    let rows: Vec<Complex64> = xs
        .par_iter()
        .map(|&q| -> Result<Complex64> {
            let mut s = Complex64::new(0.0, 0.0);
            for &m in &xs {
                s += w.value(q, m, WignerRoute::Theta)?;
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    let total: Complex64 = rows.iter().sum::<Complex64>() * (h * h);
    Ok((total - inner_product(p, j_prime, j, ctrl)?).norm())
}

fn wigner_trace(ctrl: &SeriesControl) -> Result<f64> {
    let p = StandardParams::symmetric(0.1, CodeLabel::new(2, 0)?)?;
    let mut worst = 0.0f64;
    for (j, k) in [(0, 0), (0, 1)] {
        worst = worst.max(wigner_trace_residual(&p, j, k, ctrl)?);
    }
    Ok(worst)
}

/// Largest marginal error `|int W dp - psi_q^2|`, `|int W dq - |psi_p|^2|` at a few points.
pub fn wigner_marginal_residual(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let w = WignerFunction::new(p, p.label.j, p.label.j, ctrl)?;
    let (xs, h) = trapezoid_axis(wigner_window(p), 0.08);
    let mut worst = 0.0f64;
    let g = p.gamma_spacing;
    for x in [0.0, 0.25 * g, 0.5 * g, -0.8 * g, 1.3] {
        let mut mq = 0.0;
        let mut mp = 0.0;
        for &y in &xs {
            mq += w.value(x, y, WignerRoute::Theta)?.re;
            mp += w.value(y, x, WignerRoute::Theta)?.re;
        }
        let want_q = position_amplitude(p, x, true, ctrl)?.powi(2);
        let want_p = momentum_amplitude(p, x, true, ctrl)?.norm_sqr();
        worst = worst.max((mq * h - want_q).abs()).max((mp * h - want_p).abs());
    }
    Ok(worst)
}

fn wigner_marginals(ctrl: &SeriesControl) -> Result<f64> {
    let p = StandardParams::new(0.05, 0.08, 2.4, CodeLabel::new(2, 1)?)?;
    wigner_marginal_residual(&p, ctrl)
}

/// `|N_quadrature / N - 1|` where `N_quadrature = int psi_bare^2 * prefactor^2 * N`.
pub fn normalization_residual(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let cut = position_cutoff(p, 1e-20);
    let half = 0.5 * p.gamma_spacing / p.label.d as f64;
    let n = (cut / half).ceil() as i64;
    let mut pts = vec![-cut];
    pts.extend((-n + 1..n).map(|k| k as f64 * half));
    pts.push(cut);
    let mass: f64 = integrate_pieces(
        |q| position_amplitude(p, q, false, ctrl).map(|v| v * v).unwrap_or(f64::NAN),
        &pts,
        1e-13,
    )?;
    let pref = position_prefactor(p, ctrl)?;
    Ok((mass * pref * pref - 1.0).abs())
}

fn normalization_quadrature(ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for sigma2 in [0.05, 0.15, 0.3] {
        for d in [2, 3, 6] {
            for j in 0..d {
                let p = StandardParams::symmetric(sigma2, CodeLabel::new(d, j)?)?;
                worst = worst.max(normalization_residual(&p, ctrl)?);
            }
        }
    }
    Ok(worst)
}

/// Largest relative spread of the four photon-number routes.
pub fn photon_route_spread(p: &StandardParams, ctrl: &SeriesControl) -> Result<f64> {
    let values = PhotonRoute::ALL
        .iter()
        .map(|&r| avg_photon(p, r, ctrl).map(|b| b.n_avg))
        .collect::<Result<Vec<_>>>()?;
    let reference = values[0];
    Ok(values
        .iter()
        .map(|v| (v - reference).abs() / reference.abs())
        .fold(0.0, f64::max))
}

fn photon_routes(ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for db in [6.0, 8.0, 10.0, 14.0] {
        let p = StandardParams::symmetric(sigma2_from_db(db)?, CodeLabel::new(2, 0)?)?;
        worst = worst.max(photon_route_spread(&p, ctrl)?);
    }
    Ok(worst)
}

fn riemann_forms(ctrl: &SeriesControl) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in [
        StandardParams::symmetric(0.1, CodeLabel::new(2, 0)?)?,
        StandardParams::new(0.07, 0.12, 1.8, CodeLabel::new(3, 1)?)?,
    ] {
        for k in 0..p.label.d {
            let r = riemann_variants(&p, p.label.j, k, ctrl)?;
            let n = normalization(&p, ctrl)?;
            let o = inner_product(&p, p.label.j, k, ctrl)?;
            let t = avg_photon(&p, PhotonRoute::ThetaFormula, ctrl)?.n_avg;
            worst = worst
                .max((r.norm - n).abs() / n)
                .max((r.overlap - o).norm())
                .max((r.n_avg - t).abs() / t.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn asymptotic_15db(ctrl: &SeriesControl) -> Result<f64> {
    let s2 = sigma2_from_db(15.0)?;
    let p = StandardParams::symmetric(s2, CodeLabel::new(2, 0)?)?;
    Ok((normalization(&p, ctrl)? / asymptotic_normalization(s2, s2)? - 1.0).abs())
}
