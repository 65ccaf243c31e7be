//! Order-level depth, width and parameter estimates with implied constants set to 1.

use gdn_manifold::{Error, ExtendedReal, Result};
use gdn_nn::ActivationClass;
use serde::{Deserialize, Serialize};

use crate::modulus::{modulus_inverse, smooth_modulus, Modulus};

#[derive(Debug, Clone)]
pub struct EstimateRequest {
    pub class: ActivationClass,
    pub p: usize,
    pub m: usize,
    pub eps: f64,
    pub delta: f64,
    /// Modulus of the target in charts.
    pub modulus: Modulus,
    pub kappa1: f64,
    pub kappa2: f64,
    /// Constant of the continuous row; defaults to 1 there.
    pub b: Option<f64>,
    /// Modulus of the activation; required for the continuous row.
    pub activation_modulus: Option<Modulus>,
    /// Modulus of a readout; replaces `eps` by the smoothed inverse at `eps / 2`.
    pub readout_modulus: Option<Modulus>,
}

impl EstimateRequest {
    pub fn new(class: ActivationClass, p: usize, m: usize, eps: f64, delta: f64, modulus: Modulus) -> Self {
        EstimateRequest {
            class,
            p,
            m,
            eps,
            delta,
            modulus,
            kappa1: 1.0,
            kappa2: 1.0,
            b: None,
            activation_modulus: None,
            readout_modulus: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthEstimate {
    pub activation_class: ActivationClass,
    pub depth_order: f64,
    pub width: usize,
    pub params_order: Option<f64>,
    pub p: usize,
    pub m: usize,
    pub eps: f64,
    /// `eps` after the readout substitution, equal to `eps` without a readout.
    pub eps_effective: f64,
    pub delta: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    /// The inverse modulus of the target at the row's argument.
    pub omega_inverse: Option<f64>,
    pub notes: Vec<String>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::validation(format!("{name} must be a positive finite number, got {v}")));
    }
    Ok(())
}

pub fn depth_estimate(req: &EstimateRequest) -> Result<DepthEstimate> {
    positive("eps", req.eps)?;
    positive("delta", req.delta)?;
    positive("kappa1", req.kappa1)?;
    positive("kappa2", req.kappa2)?;
    if req.p == 0 || req.m == 0 {
        return Err(Error::validation("p and m must be at least 1"));
    }
    let continuous = matches!(req.class, ActivationClass::ContinuousNonpoly | ActivationClass::PiecewiseLinear);
    if continuous {
        if let Some(b) = req.b {
            positive("B", b)?;
        }
        if req.activation_modulus.is_none() {
            return Err(Error::validation("the continuous row needs the activation modulus"));
        }
    }
    let (p, m) = (req.p as f64, req.m as f64);
    let mut notes = Vec::new();
    let b = if continuous {
        Some(req.b.unwrap_or_else(|| {
            notes.push("B not supplied; using B = 1, which the depth order depends on".into());
            1.0
        }))
    } else {
        req.b
    };
    let eps = match &req.readout_modulus {
        None => req.eps,
        Some(rho) => {
            let rho = rho.clone();
            let smoothed = Modulus::custom(move |t| smooth_modulus(&rho, t));
            match modulus_inverse(&smoothed, req.eps / 2.0) {
                ExtendedReal::Finite(v) if v > 0.0 => v,
                ExtendedReal::Finite(_) => return Err(Error::Singular("readout modulus inverse vanished".into())),
                ExtendedReal::Infinite => {
                    notes.push("readout modulus is bounded by eps/2; eps kept unchanged".into());
                    req.eps
                }
            }
        }
    };
    let base = 1.0 + p / 4.0;
    let arg = if continuous { eps * req.kappa1 / (2.0 * m * base) } else { eps * req.kappa1 / (base * m) };
    let inv = modulus_inverse(&req.modulus, arg);
    let w = match inv {
        ExtendedReal::Finite(v) if v > 0.0 => v,
        ExtendedReal::Finite(_) => {
            return Err(Error::Singular(format!("target modulus inverse is 0 at {arg}")));
        }
        ExtendedReal::Infinite => f64::INFINITY,
    };
    let two_delta = 2.0 * req.delta;
    let (depth, width) = match req.class {
        ActivationClass::SmoothNonpoly => {
            let e = 2.0 * p;
            (m * two_delta.powf(e) / (req.kappa2.powf(e) * w.powf(e)), req.p + req.m + 2)
        }
        ActivationClass::NonaffinePoly => {
            let e = 4.0 * p + 2.0;
            (m * (m + p) * two_delta.powf(e) / (req.kappa2.powf(e) * w.powf(e)), req.p + req.m + 3)
        }
        ActivationClass::ContinuousNonpoly | ActivationClass::PiecewiseLinear => {
            let e = 2.0 * p;
            let b = b.expect("set for the continuous row");
            let growth = (two_delta * two_delta / (w * w) + 1.0).exp2() - 1.0;
            let inner = eps / (2.0 * b * m * growth);
            let sigma_inv = match modulus_inverse(req.activation_modulus.as_ref().expect("checked"), inner) {
                ExtendedReal::Finite(v) if v > 0.0 => v,
                ExtendedReal::Finite(_) => {
                    return Err(Error::Singular(format!("activation modulus inverse is 0 at {inner:e}")));
                }
                ExtendedReal::Infinite => f64::INFINITY,
            };
            let denom = req.kappa2.powf(e) * w.powf(e) * req.kappa2 * sigma_inv;
            (m * two_delta.powf(e) / denom, req.p + req.m + 2)
        }
    };
    if w.is_infinite() {
        notes.push("target modulus inverse is infinite; the target is constant at this scale".into());
    }
    if !depth.is_finite() {
        return Err(Error::Singular(format!("depth order overflowed ({depth})")));
    }
    Ok(DepthEstimate {
        activation_class: req.class,
        depth_order: depth,
        width,
        params_order: None,
        p: req.p,
        m: req.m,
        eps: req.eps,
        eps_effective: eps,
        delta: req.delta,
        kappa1: req.kappa1,
        kappa2: req.kappa2,
        b,
        omega_inverse: inv.finite(),
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficientComplexity {
    pub p: usize,
    pub m: usize,
    pub n: usize,
    pub eps: f64,
    pub width_lo: usize,
    pub width_hi: usize,
    pub depth_order: f64,
    pub params_order: f64,
    pub error_factor: f64,
    /// Set when `m (m^2 - 1)` vanishes and the parameter order is identically zero.
    pub degenerate: bool,
}

/// Width `m..=m(4p+10)`, depth `m + m eps^(2p/(3(np+1)) - p/(np+1))`,
/// parameters `m(m^2-1) eps^(-2p/(3(np+1)))`, error factor `sqrt(m)`.
pub fn efficient_complexity(p: usize, m: usize, n: usize, eps: f64) -> Result<EfficientComplexity> {
    if p == 0 || m == 0 || n == 0 {
        return Err(Error::validation("p, m and n must be at least 1"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::validation(format!("eps must lie in (0, 1], got {eps}")));
    }
    let (pf, mf) = (p as f64, m as f64);
    let np1 = (n * p + 1) as f64;
    let depth = mf + mf * eps.powf(2.0 * pf / (3.0 * np1) - pf / np1);
    let coeff = mf * (mf * mf - 1.0);
    Ok(EfficientComplexity {
        p,
        m,
        n,
        eps,
        width_lo: m,
        width_hi: m * (4 * p + 10),
        depth_order: depth,
        params_order: coeff * eps.powf(-2.0 * pf / (3.0 * np1)),
        error_factor: mf.sqrt(),
        degenerate: coeff == 0.0,
    })
}
