use std::f64::consts::PI;

use gkpkit::observables::{converged_fock, normalization};
use gkpkit::oracle::DefinitionalState;
use gkpkit::params::{
    apply_squeeze, standard_from_approx1, standard_from_approx2, standard_from_approx3,
    theorem1_parameters, Approx1Params, Approx2Params, Approx3Params,
};
use gkpkit::quadrature::integrate_pieces;
use gkpkit::reps::{
    comb_gauss_with, fock_coefficients, fock_reconstruct, grid_amplitude, momentum_amplitude,
    position_amplitude, position_cutoff, CombMode, CombSpec, EvalPath,
};
use gkpkit::{CodeLabel, SeriesControl, StandardParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn ctrl() -> SeriesControl {
    SeriesControl::default()
}

fn mode() -> impl Strategy<Value = CombMode> {
    prop_oneof![Just(CombMode::Plain), Just(CombMode::Phased)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lemma_paths_agree(
        mu in 0.05f64..5.0,
        period in 0.3f64..4.0,
        shift in -1.0f64..1.0,
        nu in 0.01f64..1.0,
        x in -6.0f64..6.0,
        m in mode(),
    ) {
        let spec = CombSpec::new(mu, period, shift, m).unwrap();
        let t = comb_gauss_with(&spec, nu, x, EvalPath::Theta, &ctrl()).unwrap();
        let d = comb_gauss_with(&spec, nu, x, EvalPath::Direct, &ctrl()).unwrap();
        prop_assert!((t - d).norm() < 1e-11 * d.norm().max(1.0), "{t} vs {d}");
    }

    #[test]
    fn comb_scaling(
        mu in 0.1f64..3.0,
        period in 0.5f64..3.0,
        shift in -0.5f64..0.5,
        nu in 0.02f64..0.5,
        x in -4.0f64..4.0,
        b in 0.3f64..3.0,
        m in mode(),
    ) {
        let lhs = comb_gauss_with(&CombSpec::new(mu, period, shift, m).unwrap(), nu, b * x, EvalPath::Theta, &ctrl()).unwrap();
        let scaled = CombSpec::new(mu / (b * b), period / b, shift, m).unwrap();
        let rhs = comb_gauss_with(&scaled, nu / (b * b), x, EvalPath::Theta, &ctrl()).unwrap() / b;
        prop_assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn theorem1_statewise() {
    for beta in [0.05, 0.2] {
        for d in [2u32, 3] {
            for j in 0..d {
                let l = CodeLabel::new(d, j).unwrap();
                let t = theorem1_parameters(beta).unwrap();
                let zeta = (1.0 + (t.kappa * t.delta_sq_param).powi(2)).sqrt();
                let a1 = Approx1Params::new(t.kappa, t.delta_sq_param, l.alpha_d(), l).unwrap();
                let a2 = Approx2Params::new(t.gamma, t.delta, l.alpha_d(), l).unwrap();
                let a3 = Approx3Params::new(beta, l.alpha_d(), l).unwrap();
                let routes = [
                    apply_squeeze(&standard_from_approx1(&a1).unwrap(), zeta).unwrap(),
                    standard_from_approx2(&a2).unwrap(),
                    standard_from_approx3(&a3).unwrap(),
                ];
                let oracles = [
                    DefinitionalState::approx1(&a1).unwrap().squeezed(zeta).unwrap(),
                    DefinitionalState::approx2(&a2).unwrap(),
                    DefinitionalState::approx3(&a3).unwrap(),
                ];
                let g = routes[2].gamma_spacing;
                for k in 0..400 {
                    let q = -3.0 * g + 6.0 * g * k as f64 / 399.0;
                    let reference = position_amplitude(&routes[2], q, true, &ctrl()).unwrap();
                    let scale = reference.abs();
                    for r in &routes {
                        let v = position_amplitude(r, q, true, &ctrl()).unwrap();
                        assert!((v - reference).abs() <= 1e-10 * scale, "beta {beta} d {d} q {q}");
                    }
                    for o in &oracles {
                        assert!((o.amplitude(q) - reference).abs() <= 1e-10 * scale, "oracle beta {beta} d {d} q {q}");
                    }
                }
            }
        }
    }
}

#[test]
fn position_theta_matches_direct() {
    let p = StandardParams::symmetric(0.05, CodeLabel::new(2, 0).unwrap()).unwrap();
    let g = p.gamma_spacing;
    for k in 0..=120 {
        let q = -3.0 * g + 6.0 * g * k as f64 / 120.0;
        let t = gkpkit::reps::position_amplitude_with(&p, q, false, EvalPath::Theta, &ctrl()).unwrap();
        let d = gkpkit::reps::position_amplitude_with(&p, q, false, EvalPath::Direct, &ctrl()).unwrap();
        assert!((t - d).abs() < 1e-10);
    }
}

#[test]
fn momentum_is_fourier_transform() {
    let p = StandardParams::symmetric(0.05, CodeLabel::new(2, 1).unwrap()).unwrap();
    let cut = position_cutoff(&p, 1e-18);
    let half = 0.25 * p.gamma_spacing;
    let n = (cut / half).ceil() as i64;
    let mut pts: Vec<f64> = (-n..=n).map(|k| k as f64 * half).collect();
    pts[0] = -cut;
    *pts.last_mut().unwrap() = cut;
    for mom in [0.0, 0.3, -0.8, 1.7, 2.9] {
        let ft: Complex64 = integrate_pieces(
            |q| Complex64::from_polar(position_amplitude(&p, q, true, &ctrl()).unwrap(), -mom * q),
            &pts,
            1e-11,
        )
        .unwrap()
            / (2.0 * PI).sqrt();
        let m = momentum_amplitude(&p, mom, true, &ctrl()).unwrap();
        assert!((ft - m).norm() < 1e-6, "{mom}: {ft} vs {m}");
    }
}

#[test]
fn momentum_of_even_state_is_real_and_even() {
    let p = StandardParams::new(0.04, 0.07, 2.1, CodeLabel::new(3, 0).unwrap()).unwrap();
    for mom in [0.2, 1.3, 2.8] {
        let a = momentum_amplitude(&p, mom, true, &ctrl()).unwrap();
        let b = momentum_amplitude(&p, -mom, true, &ctrl()).unwrap();
        assert!(a.im.abs() < 1e-14 && (a - b).norm() < 1e-14);
    }
}

#[test]
fn symmetric_fourier_relation() {
    for d in [2u32, 3, 6] {
        let base = StandardParams::symmetric(0.06, CodeLabel::new(d, 0).unwrap()).unwrap();
        let states: Vec<_> = (0..d).map(|k| base.with_j(k).unwrap()).collect();
        let norms: Vec<f64> = states.iter().map(|s| normalization(s, &ctrl()).unwrap()).collect();
        for j in 0..d as usize {
            for x in [0.0, 0.45, -1.2, 2.3] {
                let m = momentum_amplitude(&states[j], x, true, &ctrl()).unwrap();
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..d as usize {
                    let v = position_amplitude(&states[k], x, true, &ctrl()).unwrap() * (norms[k] / norms[j]).sqrt();
                    sum += Complex64::from_polar(v, -2.0 * PI * (j * k) as f64 / d as f64);
                }
                sum /= (d as f64).sqrt();
                assert!((m - sum).norm() < 1e-9, "d {d} j {j} x {x}");
            }
        }
    }
}

#[test]
fn parseval_is_monotone() {
    let p = StandardParams::symmetric(0.08, CodeLabel::new(2, 0).unwrap()).unwrap();
    let mut prev = 0.0;
    for n_max in [8usize, 16, 32, 64, 128, 256] {
        let c = fock_coefficients(&p, n_max, &ctrl()).unwrap();
        let w: f64 = c.iter().map(|v| v.norm_sqr()).sum();
        assert!(w >= prev - 1e-14 && w <= 1.0 + 1e-12, "{n_max}: {w} after {prev}");
        prev = w;
    }
    assert!((prev - 1.0).abs() < 1e-10);
}

#[test]
fn fock_reconstruction_matches_amplitude() {
    let p = StandardParams::symmetric(0.09, CodeLabel::new(2, 1).unwrap()).unwrap();
    let c = converged_fock(&p, &ctrl()).unwrap();
    for k in 0..=40 {
        let q = -4.0 + 0.2 * k as f64;
        let direct = position_amplitude(&p, q, true, &ctrl()).unwrap();
        assert!((fock_reconstruct(&c, q).re - direct).abs() < 1e-6);
    }
}

#[test]
fn fock_thermal_factorization() {
    // c_n = (2/(sqrt(Lambda) N))^(1/2) e^{-beta(n+1/2)} sqrt(alpha_d d) sum_s psi_n(alpha_d (d s + j)).
    let sigma2: f64 = 0.1;
    let l = CodeLabel::new(2, 1).unwrap();
    let p = StandardParams::symmetric(sigma2, l).unwrap();
    let beta = (2.0 * sigma2).atanh();
    let c = fock_coefficients(&p, 60, &ctrl()).unwrap();
    let pref = (2.0 / (p.lambda().sqrt() * normalization(&p, &ctrl()).unwrap())).sqrt();
    let cell = l.alpha_d() * 2.0;
    for (n, cn) in c.iter().enumerate() {
        let ideal: f64 = (-30..=30)
            .map(|s| gkpkit::reps::hermite_function(n, l.alpha_d() * (2.0 * s as f64 + 1.0)))
            .sum();
        let want = pref * (-beta * (n as f64 + 0.5)).exp() * cell.sqrt() * ideal;
        assert!((cn.re - want).abs() < 1e-10, "n {n}: {} vs {want}", cn.re);
    }
}

#[test]
fn grid_quasi_periodicity_and_norm() {
    let p = StandardParams::symmetric(0.07, CodeLabel::new(3, 1).unwrap()).unwrap();
    for (u, v, n1, n2) in [(0.1, 0.2, 1i32, 0i32), (0.37, -0.4, -2, 1), (0.8, 0.05, 1, 3)] {
        let base = grid_amplitude(&p, u, v, &ctrl()).unwrap();
        let shifted = grid_amplitude(&p, u + n1 as f64, v + n2 as f64, &ctrl()).unwrap();
        let phase = Complex64::from_polar(1.0, -PI * ((n1 * n2) as f64 + u * n2 as f64 - v * n1 as f64));
        assert!((shifted - phase * base).norm() < 1e-9);
    }
    let peak = grid_amplitude(&p, 1.0 / 3.0, 0.0, &ctrl()).unwrap().norm();
    for (u, v) in [(0.2, 0.0), (1.0 / 3.0, 0.2), (0.6, 0.5)] {
        assert!(grid_amplitude(&p, u, v, &ctrl()).unwrap().norm() < peak);
    }
}
