//! Activation registry.
//!
//! Every activation carries its declared class. Smooth activations expose analytic
//! derivatives of all orders, and piecewise-linear ones expose a linear piece on
//! which they act as an affine map (used to route values through deep-narrow nets).

use std::fmt;

use gdn_manifold::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Declared regularity class of an activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActivationClass {
    SmoothNonpoly,
    ContinuousNonpoly,
    NonaffinePoly,
    PiecewiseLinear,
}

impl ActivationClass {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smooth" | "smooth-nonpoly" => Ok(ActivationClass::SmoothNonpoly),
            "continuous" | "continuous-nonpoly" => Ok(ActivationClass::ContinuousNonpoly),
            "poly" | "nonaffine-poly" => Ok(ActivationClass::NonaffinePoly),
            "pwl" | "piecewise-linear" => Ok(ActivationClass::PiecewiseLinear),
            _ => Err(Error::Parse(format!(
                "unknown activation class '{s}'; use smooth, continuous, poly or pwl"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ActivationClass::SmoothNonpoly => "smooth-nonpoly",
            ActivationClass::ContinuousNonpoly => "continuous-nonpoly",
            ActivationClass::NonaffinePoly => "nonaffine-poly",
            ActivationClass::PiecewiseLinear => "piecewise-linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Relu,
    LeakyRelu,
    HardTanh,
    Exp,
    Softplus,
    Sigmoid,
    Tanh,
    Elu,
    Square,
}

const LEAKY_SLOPE: f64 = 0.01;

pub const ACTIVATION_NAMES: [&str; 9] =
    ["relu", "leaky_relu", "hard_tanh", "exp", "softplus", "sigmoid", "tanh", "elu", "square"];

/// An affine piece of a piecewise-linear activation: `sigma(t) = slope t + intercept`
/// for `lo <= t <= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

/// Registered activation with its metadata.
#[derive(Clone, Copy, PartialEq)]
pub struct ActivationInfo {
    kind: Kind,
}

impl fmt::Debug for ActivationInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ActivationInfo({})", self.name())
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `k`-th derivative of the logistic sigmoid, through polynomials in `s = sigmoid(t)`.
fn sigmoid_derivative(k: usize, t: f64) -> f64 {
    // P_0(s) = s and P_{k+1}(s) = P_k'(s) s (1 - s).
    let mut poly = vec![0.0, 1.0];
    for _ in 0..k {
        let deriv: Vec<f64> = poly.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
        let mut next = vec![0.0; deriv.len() + 2];
        for (i, c) in deriv.iter().enumerate() {
            next[i + 1] += c;
            next[i + 2] -= c;
        }
        poly = next;
    }
    let s = sigmoid(t);
    poly.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

impl ActivationInfo {
    pub fn by_name(name: &str) -> Result<Self> {
        let kind = match name {
            "relu" => Kind::Relu,
            "leaky_relu" => Kind::LeakyRelu,
            "hard_tanh" => Kind::HardTanh,
            "exp" => Kind::Exp,
            "softplus" => Kind::Softplus,
            "sigmoid" => Kind::Sigmoid,
            "tanh" => Kind::Tanh,
            "elu" => Kind::Elu,
            "square" => Kind::Square,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown activation '{name}'; known: {}",
                    ACTIVATION_NAMES.join(", ")
                )))
            }
        };
        Ok(ActivationInfo { kind })
    }

    pub fn relu() -> Self {
        ActivationInfo { kind: Kind::Relu }
    }

    pub fn exp() -> Self {
        ActivationInfo { kind: Kind::Exp }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            Kind::Relu => "relu",
            Kind::LeakyRelu => "leaky_relu",
            Kind::HardTanh => "hard_tanh",
            Kind::Exp => "exp",
            Kind::Softplus => "softplus",
            Kind::Sigmoid => "sigmoid",
            Kind::Tanh => "tanh",
            Kind::Elu => "elu",
            Kind::Square => "square",
        }
    }

    pub fn class(&self) -> ActivationClass {
        match self.kind {
            Kind::Relu | Kind::LeakyRelu | Kind::HardTanh => ActivationClass::PiecewiseLinear,
            Kind::Exp | Kind::Softplus | Kind::Sigmoid | Kind::Tanh => ActivationClass::SmoothNonpoly,
            Kind::Elu => ActivationClass::ContinuousNonpoly,
            Kind::Square => ActivationClass::NonaffinePoly,
        }
    }

    /// Number of breakpoints for piecewise-linear activations.
    pub fn breakpoints(&self) -> Option<usize> {
        match self.kind {
            Kind::Relu | Kind::LeakyRelu => Some(1),
            Kind::HardTanh => Some(2),
            _ => None,
        }
    }

    /// Registered shift with nonvanishing derivatives, before numerical checking.
    pub fn known_theta0(&self) -> Option<f64> {
        match self.kind {
            Kind::Exp | Kind::Softplus | Kind::Sigmoid => Some(0.0),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            Kind::Relu => t.max(0.0),
            Kind::LeakyRelu => {
                if t >= 0.0 {
                    t
                } else {
                    LEAKY_SLOPE * t
                }
            }
            Kind::HardTanh => t.clamp(-1.0, 1.0),
            Kind::Exp => t.exp(),
            Kind::Softplus => {
                if t > 30.0 {
                    t + (-t).exp().ln_1p()
                } else {
                    t.exp().ln_1p()
                }
            }
            Kind::Sigmoid => sigmoid(t),
            Kind::Tanh => t.tanh(),
            Kind::Elu => {
                if t >= 0.0 {
                    t
                } else {
                    t.exp_m1()
                }
            }
            Kind::Square => t * t,
        }
    }

    /// Analytic `k`-th derivative where the activation is smooth (or polynomial).
    pub fn derivative(&self, k: usize, t: f64) -> Option<f64> {
        if k == 0 {
            return Some(self.eval(t));
        }
        match self.kind {
            Kind::Exp => Some(t.exp()),
            Kind::Sigmoid => Some(sigmoid_derivative(k, t)),
            Kind::Softplus => Some(sigmoid_derivative(k - 1, t)),
            Kind::Tanh => Some(2.0 * 2f64.powi(k as i32) * sigmoid_derivative(k, 2.0 * t)),
            Kind::Square => Some(match k {
                1 => 2.0 * t,
                2 => 2.0,
                _ => 0.0,
            }),
            _ => None,
        }
    }

    /// The piece used to carry values unchanged through a layer.
    pub fn linear_piece(&self) -> Option<LinearPiece> {
        match self.kind {
            Kind::Relu | Kind::LeakyRelu | Kind::Elu => {
                Some(LinearPiece { lo: 0.0, hi: f64::INFINITY, slope: 1.0, intercept: 0.0 })
            }
            Kind::HardTanh => Some(LinearPiece { lo: -1.0, hi: 1.0, slope: 1.0, intercept: 0.0 }),
            _ => None,
        }
    }

    /// Global Lipschitz constant, when finite.
    pub fn lipschitz(&self) -> Option<f64> {
        match self.kind {
            Kind::Relu | Kind::LeakyRelu | Kind::HardTanh | Kind::Tanh | Kind::Softplus | Kind::Elu => {
                Some(1.0)
            }
            Kind::Sigmoid => Some(0.25),
            Kind::Exp | Kind::Square => None,
        }
    }

    /// Modulus of continuity of the activation restricted to `[lo, hi]` at scale `delta`.
    pub fn modulus_on(&self, lo: f64, hi: f64, delta: f64) -> f64 {
        if let Some(l) = self.lipschitz() {
            return l * delta;
        }
        match self.kind {
            Kind::Exp => hi.exp() * (1.0 - (-delta).exp()),
            Kind::Square => {
                let m = lo.abs().max(hi.abs());
                2.0 * m * delta + delta * delta
            }
            _ => unreachable!("all registered kinds covered"),
        }
    }

    /// Every activation in the registry is monotone nondecreasing except `square`.
    pub fn is_monotone(&self) -> bool {
        !matches!(self.kind, Kind::Square)
    }

    /// One-point numerical check that the activation is non-affine with a point of
    /// nonzero derivative.
    pub fn spot_check(&self) -> bool {
        let s = |t| self.eval(t);
        let left = (s(0.3) - s(-1.0)) / 1.3;
        let right = (s(2.0) - s(0.3)) / 1.7;
        let slope = (s(0.5 + 1e-4) - s(0.5 - 1e-4)) / 2e-4;
        (left - right).abs() > 1e-6 && slope.abs() > 1e-8
    }
}

impl fmt::Display for ActivationInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Serialize, Deserialize)]
struct ActivationJson {
    name: String,
    class: ActivationClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoints: Option<usize>,
}

impl Serialize for ActivationInfo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ActivationJson { name: self.name().into(), class: self.class(), breakpoints: self.breakpoints() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ActivationInfo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ActivationJson::deserialize(d)?;
        let info = ActivationInfo::by_name(&raw.name).map_err(serde::de::Error::custom)?;
        if info.class() != raw.class {
            return Err(serde::de::Error::custom(format!(
                "activation '{}' is {}, not {}",
                raw.name,
                info.class().as_str(),
                raw.class.as_str()
            )));
        }
        Ok(info)
    }
}
