//! Parametrizations of approximate code states and exact conversions between them.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_range, GkpError, Result};

/// Logical dimension `d` and logical index `j` of a code state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodeLabel {
    pub d: u32,
    pub j: u32,
}

impl CodeLabel {
    pub fn new(d: u32, j: u32) -> Result<Self> {
        let label = Self { d, j };
        label.validate()?;
        Ok(label)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("d", self.d as f64, self.d >= 1, "d >= 1")?;
        check_range("j", self.j as f64, self.j < self.d, "0 <= j <= d - 1")
    }

    /// Same dimension, different index.
    pub fn with_j(&self, j: u32) -> Result<Self> {
        Self::new(self.d, j)
    }

    /// `alpha_d = sqrt(2 pi / d)`.
    pub fn alpha_d(&self) -> f64 {
        (2.0 * PI / self.d as f64).sqrt()
    }
}

/// Gaussian envelope times a comb of squeezed states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx1Params {
    pub kappa: f64,
    /// Width `Delta` of each squeezed spike.
    pub delta_sq_param: f64,
    pub alpha: f64,
    pub label: CodeLabel,
}

impl Approx1Params {
    pub fn new(kappa: f64, delta_sq_param: f64, alpha: f64, label: CodeLabel) -> Result<Self> {
        let p = Self {
            kappa,
            delta_sq_param,
            alpha,
            label,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("kappa", self.kappa, self.kappa > 0.0, "kappa > 0")?;
        check_range(
            "delta_sq_param",
            self.delta_sq_param,
            self.delta_sq_param > 0.0,
            "Delta > 0",
        )?;
        check_range("alpha", self.alpha, self.alpha > 0.0, "alpha > 0")?;
        self.label.validate()
    }
}

/// Ideal state smeared by Gaussian displacements in position and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx2Params {
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    pub label: CodeLabel,
}

impl Approx2Params {
    pub fn new(gamma: f64, delta: f64, alpha: f64, label: CodeLabel) -> Result<Self> {
        let p = Self {
            gamma,
            delta,
            alpha,
            label,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("gamma", self.gamma, self.gamma > 0.0, "gamma > 0")?;
        check_range("delta", self.delta, self.delta > 0.0, "delta > 0")?;
        let prod = self.gamma * self.delta;
        check_range("gamma*delta", prod, prod < 2.0, "0 < gamma*delta < 2")?;
        check_range("alpha", self.alpha, self.alpha > 0.0, "alpha > 0")?;
        self.label.validate()
    }

    /// `lambda = 1 + gamma^2 delta^2 / 4`.
    pub fn lambda(&self) -> f64 {
        1.0 + 0.25 * (self.gamma * self.delta).powi(2)
    }

    /// Fractional lattice narrowing `gamma^2 delta^2 / (2 lambda)`.
    fn narrowing(&self) -> f64 {
        (self.gamma * self.delta).powi(2) / (2.0 * self.lambda())
    }
}

/// Ideal state damped by `exp(-beta n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approx3Params {
    pub beta: f64,
    pub alpha: f64,
    pub label: CodeLabel,
}

impl Approx3Params {
    pub fn new(beta: f64, alpha: f64, label: CodeLabel) -> Result<Self> {
        let p = Self { beta, alpha, label };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_range("beta", self.beta, self.beta > 0.0, "beta > 0")?;
        check_range("alpha", self.alpha, self.alpha > 0.0, "alpha > 0")?;
        self.label.validate()
    }
}

/// Standard form `(sigma_q^2, sigma_p^2, Gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardParams {
    pub sigma_q2: f64,
    pub sigma_p2: f64,
    /// Position comb period `Gamma`.
    pub gamma_spacing: f64,
    pub label: CodeLabel,
}

impl StandardParams {
    pub fn new(sigma_q2: f64, sigma_p2: f64, gamma_spacing: f64, label: CodeLabel) -> Result<Self> {
        let p = Self {
            sigma_q2,
            sigma_p2,
            gamma_spacing,
            label,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric code with `sigma_q^2 = sigma_p^2 = sigma2` and `Gamma = alpha_d d sqrt(Lambda)`.
    pub fn symmetric(sigma2: f64, label: CodeLabel) -> Result<Self> {
        SymmetricParams::new(sigma2, label)?.to_standard()
    }

    pub fn validate(&self) -> Result<()> {
        check_range(
            "sigma_q2",
            self.sigma_q2,
            self.sigma_q2 > 0.0 && self.sigma_q2 < 0.5,
            "0 < sigma_q2 < 1/2",
        )?;
        check_range(
            "sigma_p2",
            self.sigma_p2,
            self.sigma_p2 > 0.0 && self.sigma_p2 < 0.5,
            "0 < sigma_p2 < 1/2",
        )?;
        check_range(
            "gamma_spacing",
            self.gamma_spacing,
            self.gamma_spacing > 0.0,
            "Gamma > 0",
        )?;
        self.label.validate()
    }

    /// `Lambda = 1 - 4 sigma_q^2 sigma_p^2`.
    pub fn lambda(&self) -> f64 {
        1.0 - 4.0 * self.sigma_q2 * self.sigma_p2
    }

    /// Same state family with a different logical index.
    pub fn with_j(&self, j: u32) -> Result<Self> {
        Ok(Self {
            label: self.label.with_j(j)?,
            ..*self
        })
    }
}

/// Symmetric code described by a single variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricParams {
    pub sigma2: f64,
    pub label: CodeLabel,
}

impl SymmetricParams {
    pub fn new(sigma2: f64, label: CodeLabel) -> Result<Self> {
        check_range("sigma2", sigma2, sigma2 > 0.0 && sigma2 < 0.5, "0 < sigma2 < 1/2")?;
        label.validate()?;
        Ok(Self { sigma2, label })
    }

    pub fn lambda(&self) -> f64 {
        1.0 - 4.0 * self.sigma2 * self.sigma2
    }

    pub fn to_standard(&self) -> Result<StandardParams> {
        let gamma = self.label.alpha_d() * self.label.d as f64 * self.lambda().sqrt();
        StandardParams::new(self.sigma2, self.sigma2, gamma, self.label)
    }
}

pub fn standard_from_approx1(p: &Approx1Params) -> Result<StandardParams> {
    p.validate()?;
    let k2 = p.kappa * p.kappa;
    let d2 = p.delta_sq_param * p.delta_sq_param;
    StandardParams::new(
        0.5 * d2,
        k2 / (2.0 * (1.0 + k2 * d2)),
        p.alpha * p.label.d as f64,
        p.label,
    )
}

/// Approximation 1 parameters describing the same state as `p`.
pub fn approx1_from_standard(p: &StandardParams) -> Result<Approx1Params> {
    p.validate()?;
    Approx1Params::new(
        (2.0 * p.sigma_p2 / p.lambda()).sqrt(),
        (2.0 * p.sigma_q2).sqrt(),
        p.gamma_spacing / p.label.d as f64,
        p.label,
    )
}

pub fn standard_from_approx2(p: &Approx2Params) -> Result<StandardParams> {
    p.validate()?;
    let lambda = p.lambda();
    StandardParams::new(
        p.delta * p.delta / (2.0 * lambda),
        p.gamma * p.gamma / (2.0 * lambda),
        p.alpha * p.label.d as f64 * (1.0 - p.narrowing()),
        p.label,
    )
}

pub fn standard_from_approx3(p: &Approx3Params) -> Result<StandardParams> {
    p.validate()?;
    let s2 = 0.5 * p.beta.tanh();
    StandardParams::new(s2, s2, p.alpha * p.label.d as f64 / p.beta.cosh(), p.label)
}

/// Parameters of Approximations 1 and 2 that coincide with Approximation 3 at a given `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Params {
    pub kappa: f64,
    pub delta_sq_param: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// `kappa^2 = tanh beta`, `Delta^2 = sinh beta cosh beta`, `gamma^2 = delta^2 = 2 tanh(beta/2)`.
///
/// Approximation 1 with `(kappa, Delta)` must additionally be squeezed by
/// `zeta = sqrt(1 + kappa^2 Delta^2)` to coincide with the other two.
pub fn theorem1_parameters(beta: f64) -> Result<Theorem1Params> {
    check_range("beta", beta, beta > 0.0, "beta > 0")?;
    let g = (2.0 * (0.5 * beta).tanh()).sqrt();
    Ok(Theorem1Params {
        kappa: beta.tanh().sqrt(),
        delta_sq_param: (beta.sinh() * beta.cosh()).sqrt(),
        gamma: g,
        delta: g,
    })
}

/// Standard form of `S(ln zeta)|psi>`, whose position amplitude at `q` is `sqrt(zeta) psi(zeta q)`.
pub fn apply_squeeze(p: &StandardParams, zeta: f64) -> Result<StandardParams> {
    p.validate()?;
    check_range("zeta", zeta, zeta > 0.0, "zeta > 0")?;
    let z2 = zeta * zeta;
    StandardParams::new(
        p.sigma_q2 / z2,
        z2 * p.sigma_p2,
        p.gamma_spacing / zeta,
        p.label,
    )
}

/// Result of converting an Approximation 2 state into the other two descriptions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Remark1Conversion {
    /// The same state written as Approximation 1.
    pub approx1: Approx1Params,
    /// Squeezing parameter with `state = S(ln zeta) |approx3>`.
    pub zeta: f64,
    pub approx3: Approx3Params,
}

/// Rewrites an Approximation 2 state as Approximation 1 and as squeezed Approximation 3.
pub fn remark1_convert(p: &Approx2Params) -> Result<Remark1Conversion> {
    p.validate()?;
    let lambda = p.lambda();
    let shrink = 1.0 - p.narrowing();
    let kappa = p.gamma / (lambda.sqrt() * shrink);
    let big_delta = p.delta / lambda.sqrt();
    let approx1 = Approx1Params::new(kappa, big_delta, p.alpha * shrink, p.label)?;
    let (zeta, approx3) = squeezed_approx3(&approx1)?;
    Ok(Remark1Conversion {
        approx1,
        zeta,
        approx3,
    })
}

/// Solves `approx1 = S(ln zeta) |approx3>` for `(zeta, beta, alpha'')`.
pub fn squeezed_approx3(p: &Approx1Params) -> Result<(f64, Approx3Params)> {
    p.validate()?;
    // kappa^2 Delta^2 = sinh^2 beta.
    let beta = (p.kappa * p.delta_sq_param).asinh();
    let zeta = beta.tanh().sqrt() / p.delta_sq_param;
    let alpha3 = p.alpha * zeta * beta.cosh();
    if !(beta > 0.0 && zeta.is_finite() && zeta > 0.0 && alpha3.is_finite()) {
        return Err(GkpError::Unsolvable(format!(
            "no squeezed Approximation 3 for kappa = {}, Delta = {}",
            p.kappa, p.delta_sq_param
        )));
    }
    let approx3 = Approx3Params::new(beta, alpha3, p.label)
        .map_err(|e| GkpError::Unsolvable(e.to_string()))?;
    Ok((zeta, approx3))
}

/// Inverse of the Approximation 2 to Approximation 1 correspondence.
pub fn approx2_from_approx1(p: &Approx1Params) -> Result<Approx2Params> {
    p.validate()?;
    // With u = gamma^2 delta^2 / 4: kappa^2 Delta^2 = 4u / (1 - u)^2.
    let k = (p.kappa * p.delta_sq_param).powi(2);
    let root = (k + 1.0).sqrt();
    let u = (root - 1.0) / (root + 1.0);
    let lambda = 1.0 + u;
    let delta2 = p.delta_sq_param * p.delta_sq_param * lambda;
    let gamma2 = 4.0 * u / delta2;
    let shrink = (1.0 - u) / (1.0 + u);
    Approx2Params::new(gamma2.sqrt(), delta2.sqrt(), p.alpha / shrink, p.label)
}

/// Squeezing level in dB to symmetric variance: `sigma^2 = 10^(-dB/10) / 2`.
pub fn sigma2_from_db(level_db: f64) -> Result<f64> {
    check_range("level_db", level_db, level_db > 0.0, "level_db > 0")?;
    let s2 = 0.5 * 10f64.powf(-level_db / 10.0);
    check_range("sigma2", s2, s2 > 0.0 && s2 < 0.5, "0 < sigma2 < 1/2")?;
    Ok(s2)
}

/// Symmetric variance to squeezing level `-10 log10(2 sigma^2)`.
pub fn db_from_sigma2(sigma2: f64) -> Result<f64> {
    check_range("sigma2", sigma2, sigma2 > 0.0 && sigma2 < 0.5, "0 < sigma2 < 1/2")?;
    Ok(-10.0 * (2.0 * sigma2).log10())
}
