use std::io::Write;

use rayon::prelude::*;
use serde_json::json;

use gkpkit::observables::{
    asymptotic_normalization, asymptotic_overlap, avg_photon, inner_product, normalization, PhotonRoute,
};
use gkpkit::params::{
    approx1_from_standard, approx2_from_approx1, db_from_sigma2, sigma2_from_db, squeezed_approx3,
    standard_from_approx1, standard_from_approx2, standard_from_approx3, theorem1_parameters, Approx1Params,
    Approx2Params, Approx3Params,
};
use gkpkit::reps::{momentum_amplitude, momentum_prefactor, position_samples};
use gkpkit::selftest::{run_selftest, CheckGroup, SelftestConfig};
use gkpkit::wigner::{wigner_grid, PhaseSpaceGrid, WignerRoute};
use gkpkit::{CodeLabel, GkpError, SeriesControl, StandardParams};

use crate::output::{float, sink, write_record, Table};
use crate::{
    Basis, Cli, Command, Failure, Format, Quantity, RouteArg, SelftestArgs, StateArgs, SweepArgs,
    WavefunctionArgs, WignerArgs,
};

type Outcome = std::result::Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Convert(a) => convert(cli, a),
        Command::Wavefunction(a) => wavefunction(cli, a),
        Command::Wigner(a) => wigner(cli, a),
        Command::Sweep(a) => sweep(cli, a),
        Command::Selftest(a) => selftest(cli, a),
    }
}

fn control(cli: &Cli) -> Result<SeriesControl, Failure> {
    let base = SeriesControl::default();
    Ok(SeriesControl::new(cli.tol.unwrap_or(base.tol), cli.max_terms.unwrap_or(base.max_terms))?)
}

fn need(value: Option<f64>, flag: &str, input: &str) -> Result<f64, Failure> {
    value.ok_or_else(|| Failure::Invalid(format!("--{input} requires --{flag}")))
}

fn label(a: &StateArgs) -> Result<CodeLabel, Failure> {
    Ok(CodeLabel::new(a.d, a.j)?)
}

/// How the state was specified, for reporting alongside the standard form.
enum Input {
    Approx1(Approx1Params),
    Approx2(Approx2Params),
    Approx3(Approx3Params),
    Symmetric(f64),
    Standard,
}

fn resolve(a: &StateArgs) -> Result<(StandardParams, Input), Failure> {
    let l = label(a)?;
    let alpha = a.alpha.unwrap_or_else(|| l.alpha_d());
    if a.approx1 {
        let p = Approx1Params::new(need(a.kappa, "kappa", "approx1")?, need(a.squeeze_width, "squeeze-width", "approx1")?, alpha, l)?;
        Ok((standard_from_approx1(&p)?, Input::Approx1(p)))
    } else if a.approx2 {
        let p = Approx2Params::new(need(a.gamma, "gamma", "approx2")?, need(a.delta, "delta", "approx2")?, alpha, l)?;
        Ok((standard_from_approx2(&p)?, Input::Approx2(p)))
    } else if a.approx3 {
        let p = Approx3Params::new(need(a.beta, "beta", "approx3")?, alpha, l)?;
        Ok((standard_from_approx3(&p)?, Input::Approx3(p)))
    } else if a.symmetric {
        let s2 = match (a.sigma2, a.db) {
            (Some(s), _) => s,
            (None, Some(db)) => sigma2_from_db(db)?,
            (None, None) => return Err(Failure::Invalid("--symmetric requires --sigma2 or --db".into())),
        };
        Ok((StandardParams::symmetric(s2, l)?, Input::Symmetric(s2)))
    } else {
        let p = StandardParams::new(
            need(a.sigma_q2, "sigma-q2", "standard")?,
            need(a.sigma_p2, "sigma-p2", "standard")?,
            need(a.gamma_spacing, "gamma-spacing", "standard")?,
            l,
        )?;
        Ok((p, Input::Standard))
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn convert(cli: &Cli, a: &StateArgs) -> Outcome {
    let (std_params, input) = resolve(a)?;
    let approx1 = approx1_from_standard(&std_params)?;
    let approx2 = approx2_from_approx1(&approx1)?;
    let (zeta, approx3) = squeezed_approx3(&approx1)?;
    let t1 = theorem1_parameters(approx3.beta)?;
    let t1_zeta = (1.0 + (t1.kappa * t1.delta_sq_param).powi(2)).sqrt();
    let input_json = match &input {
        Input::Approx1(p) => json!({"kind": "approx1", "params": to_json(p)}),
        Input::Approx2(p) => json!({"kind": "approx2", "params": to_json(p)}),
        Input::Approx3(p) => json!({"kind": "approx3", "params": to_json(p)}),
        Input::Symmetric(s2) => json!({"kind": "symmetric", "sigma2": float(*s2)}),
        Input::Standard => json!({"kind": "standard"}),
    };
    let db = |s2: f64| db_from_sigma2(s2).map_or(serde_json::Value::Null, float);
    let record = json!({
        "input": input_json,
        "standard": {
            "sigma_q2": float(std_params.sigma_q2),
            "sigma_p2": float(std_params.sigma_p2),
            "gamma_spacing": float(std_params.gamma_spacing),
            "lambda": float(std_params.lambda()),
            "d": std_params.label.d,
            "j": std_params.label.j,
        },
        "squeezing_db": {"q": db(std_params.sigma_q2), "p": db(std_params.sigma_p2)},
        "approx1": to_json(&approx1),
        "approx2": to_json(&approx2),
        "squeezed_approx3": {"zeta": float(zeta), "approx3": to_json(&approx3)},
        "theorem1": {
            "beta": float(approx3.beta),
            "kappa": float(t1.kappa),
            "delta_sq_param": float(t1.delta_sq_param),
            "gamma": float(t1.gamma),
            "delta": float(t1.delta),
            "zeta": float(t1_zeta),
        },
    });
    let mut w = sink(cli.out.as_deref())?;
    write_record(&mut *w, &record, cli.format.unwrap_or(Format::Json))?;
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

fn wavefunction(cli: &Cli, a: &WavefunctionArgs) -> Outcome {
    let ctrl = control(cli)?;
    let (p, _) = resolve(&a.state)?;
    let g = p.gamma_spacing;
    let (lo, hi) = (a.x_min.unwrap_or(-3.0 * g), a.x_max.unwrap_or(3.0 * g));
    if !(a.points >= 2 && lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(GkpError::Domain(format!(
            "need points >= 2 and x_min < x_max, got {} points on [{lo}, {hi}]",
            a.points
        ))
        .into());
    }
    let xs = linspace(lo, hi, a.points);
    let rows: Vec<Vec<f64>> = match a.basis {
        Basis::Position => position_samples(&p, &xs, &ctrl)?
            .into_iter()
            .map(|s| vec![s.x, s.value.re, s.value.im])
            .collect(),
        Basis::Momentum => {
            let pref = momentum_prefactor(&p, &ctrl)?;
            xs.par_iter()
                .map(|&x| momentum_amplitude(&p, x, false, &ctrl).map(|v| vec![x, pref * v.re, pref * v.im]))
                .collect::<gkpkit::Result<_>>()?
        }
    };
    let table = Table {
        columns: vec!["x", "re", "im"],
        rows,
    };
    let mut w = sink(cli.out.as_deref())?;
    table.write(&mut *w, cli.format.unwrap_or(Format::Csv))?;
    Ok(())
}

fn wigner(cli: &Cli, a: &WignerArgs) -> Outcome {
    let ctrl = control(cli)?;
    let (p, _) = resolve(&a.state)?;
    let g = 2.0 * p.gamma_spacing;
    let grid = PhaseSpaceGrid::new(
        a.q_min.unwrap_or(-g),
        a.q_max.unwrap_or(g),
        a.p_min.unwrap_or(-g),
        a.p_max.unwrap_or(g),
        a.nq,
        a.np,
    )?;
    let route = match a.route {
        RouteArg::Theta => WignerRoute::Theta,
        RouteArg::Comb => WignerRoute::CombProduct,
        RouteArg::Riemann => WignerRoute::Riemann,
    };
    let samples = wigner_grid(&p, a.state.j, a.j_prime.unwrap_or(a.state.j), &grid, route, &ctrl)?;
    let table = Table {
        columns: vec!["q", "p", "re", "im"],
        rows: samples.iter().map(|s| vec![s.q, s.p, s.value.re, s.value.im]).collect(),
    };
    let mut w = sink(cli.out.as_deref())?;
    table.write(&mut *w, cli.format.unwrap_or(Format::Csv))?;
    Ok(())
}

fn sweep_point(a: &SweepArgs, level_db: f64, ctrl: &SeriesControl) -> gkpkit::Result<Vec<f64>> {
    let s2 = sigma2_from_db(level_db)?;
    let p = StandardParams::symmetric(s2, CodeLabel::new(a.d, a.j)?)?;
    let (value, estimate) = match a.quantity {
        Quantity::Normalization => (normalization(&p, ctrl)?, asymptotic_normalization(s2, s2)?),
        Quantity::Photon => (
            avg_photon(&p, PhotonRoute::ThetaFormula, ctrl)?.n_avg,
            0.25 / s2 - 0.5,
        ),
        Quantity::Overlap => (
            -inner_product(&p, a.j, a.j_prime, ctrl)?.norm().ln(),
            -asymptotic_overlap(&p, a.j, a.j_prime)?.ln(),
        ),
    };
    Ok(vec![level_db, s2, value, estimate])
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Outcome {
    let ctrl = control(cli)?;
    if a.db_steps < 2 {
        return Err(GkpError::Domain(format!("db_steps = {} must be at least 2", a.db_steps)).into());
    }
    if !(a.db_min > 0.0 && a.db_max > a.db_min && a.db_max.is_finite()) {
        return Err(GkpError::Domain(format!(
            "need 0 < db_min < db_max, got [{}, {}]",
            a.db_min, a.db_max
        ))
        .into());
    }
    CodeLabel::new(a.d, a.j)?;
    CodeLabel::new(a.d, a.j_prime)?;
    let rows = linspace(a.db_min, a.db_max, a.db_steps)
        .into_par_iter()
        .map(|level| sweep_point(a, level, &ctrl))
        .collect::<gkpkit::Result<Vec<_>>>()?;
    let table = Table {
        columns: vec!["db", "sigma2", "value", "estimate"],
        rows,
    };
    let mut w = sink(cli.out.as_deref())?;
    table.write(&mut *w, cli.format.unwrap_or(Format::Csv))?;
    Ok(())
}

fn selftest(cli: &Cli, a: &SelftestArgs) -> Outcome {
    let only = a
        .only
        .iter()
        .map(|s| s.trim().parse::<CheckGroup>())
        .collect::<gkpkit::Result<Vec<_>>>()?;
    let mut ctrl = SeriesControl::default();
    if let Some(m) = cli.max_terms {
        ctrl = SeriesControl::new(ctrl.tol, m)?;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(GkpError::Domain(format!("tol = {t} must be positive")).into());
        }
    }
    let cfg = SelftestConfig {
        only,
        tol_override: cli.tol,
        ctrl,
    };
    let results = run_selftest(&cfg);
    let mut w = sink(cli.out.as_deref())?;
    match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, &results).map_err(std::io::Error::from)?;
            writeln!(w)?;
        }
        Format::Csv => {
            writeln!(w, "check_name,group,residual,tolerance,pass")?;
            for r in &results {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    r.check_name,
                    r.group,
                    crate::output::num(r.residual),
                    crate::output::num(r.tolerance),
                    r.pass
                )?;
            }
        }
    }
    w.flush()?;
    if results.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Selftest)
    }
}
