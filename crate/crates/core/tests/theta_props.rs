use std::f64::consts::PI;

use gkpkit::theta::{
    jacobi_transform, riemann_theta2, theta_char, theta_char_dtau, RiemannThetaArgs,
};
use gkpkit::{SeriesControl, ThetaArgs};
use num_complex::Complex64;
use proptest::prelude::*;

const CHARS: [f64; 7] = [0.0, 0.5, -0.5, 1.0 / 3.0, -1.0 / 3.0, 1.0 / 6.0, -1.0 / 6.0];

fn naive(args: &ThetaArgs, radius: i64) -> Complex64 {
    let i = Complex64::i();
    (-radius..=radius)
        .map(|s| {
            let x = s as f64 + args.a;
            (PI * i * args.tau * x * x + 2.0 * PI * i * (args.z + args.b) * x).exp()
        })
        .sum()
}

fn tau_strategy() -> impl Strategy<Value = Complex64> {
    (0.05f64..20.0, 0.02f64..0.98).prop_map(|(r, frac)| Complex64::from_polar(r, PI * frac))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_identity(ia in 0usize..7, ib in 0usize..7, zr in -1.0f64..1.0, zi in -0.3f64..0.3, tau in tau_strategy()) {
        let ctrl = SeriesControl::default();
        let args = ThetaArgs::new(CHARS[ia], CHARS[ib], Complex64::new(zr, zi), tau);
        let (out, prefactor) = jacobi_transform(&args).unwrap();
        let lhs = theta_char(&out, &ctrl).unwrap();
        let rhs = prefactor * theta_char(&args, &ctrl).unwrap();
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        prop_assert!((lhs - rhs).norm() < 1e-12 * scale, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn quasi_periodicity(ia in 0usize..7, ib in 0usize..7, zr in -1.0f64..1.0, zi in -0.3f64..0.3, tau in tau_strategy()) {
        let ctrl = SeriesControl::default();
        let a = CHARS[ia];
        let z = Complex64::new(zr, zi);
        let base = theta_char(&ThetaArgs::new(a, CHARS[ib], z, tau), &ctrl).unwrap();
        let shifted = theta_char(&ThetaArgs::new(a, CHARS[ib], z + 1.0, tau), &ctrl).unwrap();
        let expected = Complex64::from_polar(1.0, 2.0 * PI * a) * base;
        prop_assert!((shifted - expected).norm() < 1e-12 * base.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn agrees_with_naive_sum(zr in -1.0f64..1.0, zi in -0.5f64..0.5, tr in -3.0f64..3.0, ti in 0.5f64..4.0) {
        let ctrl = SeriesControl::default();
        let args = ThetaArgs::new(0.0, 0.0, Complex64::new(zr, zi), Complex64::new(tr, ti));
        let fast = theta_char(&args, &ctrl).unwrap();
        let slow = naive(&args, 50);
        prop_assert!((fast - slow).norm() < 1e-12 * slow.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn dtau_matches_finite_difference(ia in 0usize..7, ib in 0usize..7, zr in -1.0f64..1.0, zi in -0.2f64..0.2, tr in -1.0f64..1.0, ti in 0.5f64..5.0) {
        let ctrl = SeriesControl::default();
        let (a, b, z) = (CHARS[ia], CHARS[ib], Complex64::new(zr, zi));
        let tau = Complex64::new(tr, ti);
        let h = 1e-6;
        // Holomorphic in tau, so the derivative along the imaginary axis is -i d/d(Im tau).
        let plus = theta_char(&ThetaArgs::new(a, b, z, tau + Complex64::new(0.0, h)), &ctrl).unwrap();
        let minus = theta_char(&ThetaArgs::new(a, b, z, tau - Complex64::new(0.0, h)), &ctrl).unwrap();
        let fd = -Complex64::i() * (plus - minus) / (2.0 * h);
        let exact = theta_char_dtau(&ThetaArgs::new(a, b, z, tau), &ctrl).unwrap();
        let scale = exact.norm().max(theta_char(&ThetaArgs::new(a, b, z, tau), &ctrl).unwrap().norm());
        prop_assert!((fd - exact).norm() < 1e-7 * scale, "fd {fd} exact {exact}");
    }

    #[test]
    fn riemann_diagonal_factorizes(a0 in 0usize..7, a1 in 0usize..7, b0 in 0usize..7, b1 in 0usize..7,
                                   z0 in -1.0f64..1.0, z1 in -1.0f64..1.0, t0 in 0.2f64..5.0, t1 in 0.2f64..5.0,
                                   r0 in -1.0f64..1.0, r1 in -1.0f64..1.0) {
        let ctrl = SeriesControl::default();
        let zero = Complex64::new(0.0, 0.0);
        let tau0 = Complex64::new(r0, t0);
        let tau1 = Complex64::new(r1, t1);
        let args = RiemannThetaArgs {
            a: [CHARS[a0], CHARS[a1]],
            b: [CHARS[b0], CHARS[b1]],
            z: [Complex64::new(z0, 0.1), Complex64::new(z1, -0.1)],
            tau: [[tau0, zero], [zero, tau1]],
        };
        let two = riemann_theta2(&args, &ctrl).unwrap();
        let f0 = theta_char(&ThetaArgs::new(args.a[0], args.b[0], args.z[0], tau0), &ctrl).unwrap();
        let f1 = theta_char(&ThetaArgs::new(args.a[1], args.b[1], args.z[1], tau1), &ctrl).unwrap();
        prop_assert!((two - f0 * f1).norm() < 1e-12 * (f0 * f1).norm().max(1.0));
    }
}
