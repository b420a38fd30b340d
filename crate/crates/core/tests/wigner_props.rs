use gkpkit::observables::inner_product;
use gkpkit::reps::{momentum_amplitude, position_amplitude};
use gkpkit::wigner::{wigner_grid, PhaseSpaceGrid, WignerFunction, WignerRoute};
use gkpkit::{CodeLabel, SeriesControl, StandardParams};
use num_complex::Complex64;
use proptest::prelude::*;

fn ctrl() -> SeriesControl {
    SeriesControl::default()
}

fn axis(half_width: f64, h: f64) -> (Vec<f64>, f64) {
    let n = (half_width / h).ceil() as i64;
    let step = half_width / n as f64;
    ((-n..=n).map(|k| k as f64 * step).collect(), step)
}

/// Half-width beyond which `exp(-2 sigma^2 x^2 / Lambda)`-type envelopes drop below `1e-10`.
fn window(p: &StandardParams) -> f64 {
    (23.0 / (2.0 * p.sigma_q2.min(p.sigma_p2))).sqrt() + p.gamma_spacing
}

#[test]
fn realness_and_hermiticity() {
    let p = StandardParams::new(0.06, 0.09, 2.2, CodeLabel::new(3, 0).unwrap()).unwrap();
    for j in 0..3 {
        for k in 0..3 {
            let a = WignerFunction::new(&p, j, k, &ctrl()).unwrap();
            let b = WignerFunction::new(&p, k, j, &ctrl()).unwrap();
            for (q, m) in [(0.1, 0.2), (-1.3, 0.8), (2.2, -1.9), (0.0, 0.0)] {
                let wa = a.value(q, m, WignerRoute::Theta).unwrap();
                let wb = b.value(q, m, WignerRoute::Theta).unwrap();
                assert!((wa - wb.conj()).norm() < 1e-12);
                if j == k {
                    assert!(wa.im.abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn trace_equals_overlap() {
    let p = StandardParams::symmetric(0.1, CodeLabel::new(2, 0).unwrap()).unwrap();
    let l = window(&p);
    let (xs, h) = axis(l, 0.1);
    for (j, k) in [(0u32, 0u32), (0, 1), (1, 0)] {
        let w = WignerFunction::new(&p, j, k, &ctrl()).unwrap();
        let mut total = Complex64::new(0.0, 0.0);
        for &q in &xs {
            for &m in &xs {
                total += w.value(q, m, WignerRoute::Theta).unwrap();
            }
        }
        total *= h * h;
        let want = inner_product(&p, k, j, &ctrl()).unwrap();
        assert!((total - want).norm() < 1e-6, "({j},{k}): {total} vs {want}");
    }
}

#[test]
fn marginals_match_amplitudes() {
    let p = StandardParams::new(0.05, 0.08, 2.4, CodeLabel::new(2, 1).unwrap()).unwrap();
    let w = WignerFunction::new(&p, 1, 1, &ctrl()).unwrap();
    let (xs, h) = axis(window(&p), 0.08);
    for q in [0.0, 0.6, 1.2, -2.0] {
        let m: f64 = xs.iter().map(|&y| w.value(q, y, WignerRoute::Theta).unwrap().re).sum::<f64>() * h;
        let want = position_amplitude(&p, q, true, &ctrl()).unwrap().powi(2);
        assert!((m - want).abs() < 1e-6, "q {q}: {m} vs {want}");
    }
    for mom in [0.0, 0.7, -1.5] {
        let m: f64 = xs.iter().map(|&x| w.value(x, mom, WignerRoute::Theta).unwrap().re).sum::<f64>() * h;
        let want = momentum_amplitude(&p, mom, true, &ctrl()).unwrap().norm_sqr();
        assert!((m - want).abs() < 1e-6, "p {mom}: {m} vs {want}");
    }
}

#[test]
fn point_symmetry_of_even_state() {
    let p = StandardParams::symmetric(0.05, CodeLabel::new(2, 0).unwrap()).unwrap();
    let g = p.gamma_spacing;
    let grid = PhaseSpaceGrid::new(-0.3 * g, 0.3 * g, -0.7, 0.7, 2, 2).unwrap();
    let s = wigner_grid(&p, 0, 0, &grid, WignerRoute::CombProduct, &ctrl()).unwrap();
    assert!((s[0].value - s[3].value).norm() < 1e-13);
    assert!((s[1].value - s[2].value).norm() < 1e-13);
}

#[test]
fn ideal_limit_concentrates_on_lattice() {
    let radius = 3.0 * 0.02f64.sqrt();
    let mut prev = 0.0;
    for sigma2 in [0.1, 0.05, 0.02] {
        let l = CodeLabel::new(2, 0).unwrap();
        let p = StandardParams::new(sigma2, sigma2, l.alpha_d() * 2.0, l).unwrap();
        let w = WignerFunction::new(&p, 0, 0, &ctrl()).unwrap();
        let q_step = 0.5 * p.gamma_spacing;
        let p_step = std::f64::consts::PI * p.lambda() / p.gamma_spacing;
        let (xs, _) = axis(2.0 * p.gamma_spacing, 0.02);
        let (mut near, mut all) = (0.0, 0.0);
        for &q in &xs {
            for &m in &xs {
                let v = w.value(q, m, WignerRoute::Theta).unwrap().re.abs();
                let dq = q - q_step * (q / q_step).round();
                let dp = m - p_step * (m / p_step).round();
                all += v;
                if dq.hypot(dp) <= radius {
                    near += v;
                }
            }
        }
        let frac = near / all;
        assert!(frac > prev, "sigma2 {sigma2}: {frac} after {prev}");
        prev = frac;
    }
}

fn params() -> impl Strategy<Value = (StandardParams, u32, u32)> {
    (0.03f64..0.3, 0.03f64..0.3, 1.0f64..4.0, prop_oneof![Just(2u32), Just(3), Just(6)], 0u32..6, 0u32..6)
        .prop_map(|(sq, sp, g, d, j, k)| {
            (StandardParams::new(sq, sp, g, CodeLabel::new(d, 0).unwrap()).unwrap(), j % d, k % d)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn routes_agree((p, j, k) in params(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let w = WignerFunction::new(&p, j, k, &ctrl()).unwrap();
        let q = 2.0 * p.gamma_spacing * u;
        let m = 2.0 * p.gamma_spacing * v;
        let a = w.value(q, m, WignerRoute::CombProduct).unwrap();
        let b = w.value(q, m, WignerRoute::Theta).unwrap();
        let c = w.value(q, m, WignerRoute::Riemann).unwrap();
        let scale = a.norm().max(1.0);
        prop_assert!((a - b).norm() < 1e-10 * scale, "{a} {b}");
        prop_assert!((a - c).norm() < 1e-10 * scale, "{a} {c}");
        prop_assert!(w.value_checked(q, m).is_ok());
    }
}
