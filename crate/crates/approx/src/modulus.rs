//! Moduli of continuity: estimation, generalized inverse, concave majorant, smoothing,
//! and the McShane extension they control.

use std::fmt;
use std::sync::Arc;

use gdn_manifold::{Error, ExtendedReal, Result};
use serde::{Deserialize, Serialize};

/// How a tabulated modulus is read between knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusKind {
    /// Piecewise constant and right-continuous.
    Empirical,
    /// Piecewise linear, constant past the last knot.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEstimate")]
pub struct ModulusEstimate {
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: ModulusKind,
}

#[derive(Deserialize)]
struct RawEstimate {
    knots: Vec<f64>,
    values: Vec<f64>,
    kind: ModulusKind,
}

impl TryFrom<RawEstimate> for ModulusEstimate {
    type Error = Error;
    fn try_from(r: RawEstimate) -> Result<Self> {
        ModulusEstimate::new(r.knots, r.values, r.kind)
    }
}

impl ModulusEstimate {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, kind: ModulusKind) -> Result<Self> {
        if knots.is_empty() || knots.len() != values.len() {
            return Err(Error::validation("modulus needs matching nonempty knots and values"));
        }
        if knots[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::validation("modulus must start at (0, 0)"));
        }
        if knots.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::validation("modulus entries must be finite"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::validation("modulus knots must be strictly increasing"));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::validation("modulus values must be nondecreasing"));
        }
        Ok(ModulusEstimate { knots, values, kind })
    }

    /// The modulus `t -> l t` tabulated on `knots`.
    pub fn linear(l: f64, knots: &[f64]) -> Result<Self> {
        ModulusEstimate::new(knots.to_vec(), knots.iter().map(|t| l * t).collect(), ModulusKind::Analytic)
    }

    pub fn zero() -> Self {
        ModulusEstimate { knots: vec![0.0], values: vec![0.0], kind: ModulusKind::Empirical }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| *k <= t) - 1;
        match self.kind {
            ModulusKind::Empirical => self.values[i],
            ModulusKind::Analytic => {
                if i + 1 == self.knots.len() {
                    return self.values[i];
                }
                let (t0, t1) = (self.knots[i], self.knots[i + 1]);
                let (v0, v1) = (self.values[i], self.values[i + 1]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn sup(&self) -> f64 {
        *self.values.last().expect("nonempty")
    }
}

/// A modulus of continuity, tabulated or in closed form.
#[derive(Clone)]
pub enum Modulus {
    Estimate(ModulusEstimate),
    /// `t -> l t`.
    Lipschitz(f64),
    /// `t -> c t^alpha`.
    Holder { c: f64, alpha: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Estimate(e) => f.debug_tuple("Estimate").field(e).finish(),
            Modulus::Lipschitz(l) => f.debug_tuple("Lipschitz").field(l).finish(),
            Modulus::Holder { c, alpha } => f.debug_struct("Holder").field("c", c).field("alpha", alpha).finish(),
            Modulus::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Modulus {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Modulus::Custom(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Modulus::Estimate(e) => e.eval(t),
            Modulus::Lipschitz(l) => l * t,
            Modulus::Holder { c, alpha } => c * t.powf(*alpha),
            Modulus::Custom(f) => f(t),
        }
    }
}

impl From<ModulusEstimate> for Modulus {
    fn from(e: ModulusEstimate) -> Self {
        Modulus::Estimate(e)
    }
}

/// Running maximum of output distances over input distances `<= t`.
pub fn empirical_modulus(pairs: &[(f64, f64)]) -> Result<ModulusEstimate> {
    if pairs.is_empty() {
        return Err(Error::validation("no distance pairs"));
    }
    if let Some((a, b)) = pairs.iter().find(|(a, b)| !(*a >= 0.0 && *b >= 0.0) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::validation(format!("invalid distance pair ({a}, {b})")));
    }
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some((_, b)) = sorted.iter().find(|(a, b)| *a == 0.0 && *b > 0.0) {
        return Err(Error::validation(format!("coincident inputs with output distance {b}")));
    }
    let mut knots = vec![0.0];
    let mut values = vec![0.0];
    let mut run = 0.0f64;
    for (a, b) in sorted.into_iter().filter(|(a, _)| *a > 0.0) {
        run = run.max(b);
        if *knots.last().unwrap() == a {
            *values.last_mut().unwrap() = run;
        } else if run > *values.last().unwrap() {
            knots.push(a);
            values.push(run);
        }
    }
    ModulusEstimate::new(knots, values, ModulusKind::Empirical)
}

/// `sup { t : omega(t) <= eps }`.
pub fn modulus_inverse(omega: &Modulus, eps: f64) -> ExtendedReal {
    match omega {
        Modulus::Estimate(e) => estimate_inverse(e, eps),
        Modulus::Lipschitz(l) => {
            if *l <= 0.0 {
                ExtendedReal::Infinite
            } else {
                ExtendedReal::Finite(eps / l)
            }
        }
        Modulus::Holder { c, alpha } => {
            if *c <= 0.0 {
                ExtendedReal::Infinite
            } else {
                ExtendedReal::Finite((eps / c).powf(1.0 / alpha))
            }
        }
        Modulus::Custom(f) => bisect_inverse(|t| f(t), eps),
    }
}

fn estimate_inverse(e: &ModulusEstimate, eps: f64) -> ExtendedReal {
    let Some(i) = e.values.iter().position(|v| *v > eps) else {
        return ExtendedReal::Infinite;
    };
    match e.kind {
        ModulusKind::Empirical => ExtendedReal::Finite(e.knots[i]),
        ModulusKind::Analytic => {
            let (t0, t1) = (e.knots[i - 1], e.knots[i]);
            let (v0, v1) = (e.values[i - 1], e.values[i]);
            ExtendedReal::Finite(t0 + (eps - v0) / (v1 - v0) * (t1 - t0))
        }
    }
}

fn bisect_inverse(f: impl Fn(f64) -> f64, eps: f64) -> ExtendedReal {
    let mut hi = 1.0;
    while f(hi) <= eps {
        hi *= 2.0;
        if hi > 1e300 {
            return ExtendedReal::Infinite;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtendedReal::Finite(lo)
}

/// Least concave majorant: upper hull of the knots together with the origin.
pub fn concave_majorant(omega: &ModulusEstimate) -> ModulusEstimate {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for (t, v) in omega.knots.iter().copied().zip(omega.values.iter().copied()) {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (v - a.1) - (b.1 - a.1) * (t - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((t, v));
    }
    let (knots, values) = hull.into_iter().unzip();
    ModulusEstimate { knots, values, kind: ModulusKind::Analytic }
}

/// `(1/s) int_s^{2s} omega` at `s = t (1 + 1e-9)`, trapezoid rule on 64 panels.
pub fn smooth_modulus(omega: &Modulus, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let s = t * (1.0 + 1e-9);
    let panels = 64;
    let h = s / panels as f64;
    let mut acc = 0.5 * (omega.eval(s) + omega.eval(2.0 * s));
    for i in 1..panels {
        acc += omega.eval(s + i as f64 * h);
    }
    acc * h / s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtensionVariant {
    #[default]
    Plain,
    /// Half of the plain value.
    PaperHalf,
}

/// `sup_y { f(y) - omega_c(|x - y|) }` over the samples.
pub fn mcshane_extend(
    samples: &[(Vec<f64>, f64)],
    omega_c: &Modulus,
    x: &[f64],
    variant: ExtensionVariant,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::validation("McShane extension needs at least one sample"));
    }
    let mut best = f64::NEG_INFINITY;
    for (y, v) in samples {
        if y.len() != x.len() {
            return Err(Error::validation("sample dimension differs from query dimension"));
        }
        let d = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        best = best.max(v - omega_c.eval(d));
    }
    Ok(match variant {
        ExtensionVariant::Plain => best,
        ExtensionVariant::PaperHalf => 0.5 * best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> ModulusEstimate {
        ModulusEstimate::new(vec![0.0, 1.0], vec![0.0, 1.0], ModulusKind::Empirical).unwrap()
    }

    #[test]
    fn empirical_examples() {
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let mut pairs = Vec::new();
        for a in &grid {
            for b in &grid {
                pairs.push(((a - b).abs(), (2.0 * a - 2.0 * b).abs()));
            }
        }
        let e = empirical_modulus(&pairs).unwrap();
        for (t, v) in e.knots.iter().zip(&e.values) {
            assert!((v - 2.0 * t).abs() < 1e-12);
        }
        assert_eq!(empirical_modulus(&[(0.0, 0.0)]).unwrap(), ModulusEstimate::zero());
        let flat = empirical_modulus(&[(0.3, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(flat.sup(), 0.0);
        assert!(empirical_modulus(&[(-1.0, 0.0)]).is_err());
        assert!(empirical_modulus(&[(0.0, 1.0)]).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(modulus_inverse(&Modulus::Lipschitz(4.0), 2.0), ExtendedReal::Finite(0.5));
        assert_eq!(modulus_inverse(&ModulusEstimate::zero().into(), 3.0), ExtendedReal::Infinite);
        assert_eq!(modulus_inverse(&step().into(), 0.5), ExtendedReal::Finite(1.0));
        let lin = ModulusEstimate::linear(2.0, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(modulus_inverse(&lin.into(), 1.0), ExtendedReal::Finite(0.5));
        let sq = modulus_inverse(&Modulus::custom(|t| t * t), 0.25).to_f64();
        assert!((sq - 0.5).abs() < 1e-11);
        assert_eq!(modulus_inverse(&Modulus::custom(|t| t.min(1.0)), 2.0), ExtendedReal::Infinite);
        let h = modulus_inverse(&Modulus::Holder { c: 2.0, alpha: 0.5 }, 1.0).to_f64();
        assert!((h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn majorant_examples() {
        let lin = ModulusEstimate::linear(3.0, &[0.0, 0.5, 1.0]).unwrap();
        let c = concave_majorant(&lin);
        for t in [0.1, 0.5, 0.9] {
            assert!((c.eval(t) - 3.0 * t).abs() < 1e-12);
        }
        let knots: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let convex = ModulusEstimate::new(knots.clone(), knots.iter().map(|t| t * t).collect(), ModulusKind::Analytic).unwrap();
        let c = concave_majorant(&convex);
        assert_eq!(c.knots, vec![0.0, 1.0]);
        assert!((c.eval(0.3) - 0.3).abs() < 1e-15);
        let s = concave_majorant(&step());
        assert_eq!(s.eval(0.5), 0.5);
        assert_eq!(s.eval(4.0), 1.0);
    }

    #[test]
    fn smooth_examples() {
        let v = smooth_modulus(&Modulus::Lipschitz(2.0), 0.4);
        assert!((v - 1.5 * 2.0 * 0.4).abs() < 1e-6);
        assert_eq!(smooth_modulus(&ModulusEstimate::zero().into(), 1.0), 0.0);
        assert_eq!(smooth_modulus(&Modulus::Lipschitz(2.0), 0.0), 0.0);
    }

    #[test]
    fn mcshane_examples() {
        let s = vec![(vec![0.0], 0.0), (vec![1.0], 1.0)];
        let wc: Modulus = concave_majorant(&step()).into();
        assert_eq!(mcshane_extend(&s, &wc, &[1.0], ExtensionVariant::Plain).unwrap(), 1.0);
        assert_eq!(mcshane_extend(&s, &wc, &[0.5], ExtensionVariant::Plain).unwrap(), 0.5);
        assert_eq!(mcshane_extend(&s, &wc, &[0.5], ExtensionVariant::PaperHalf).unwrap(), 0.25);
        let flat = vec![(vec![0.0, 0.0], 2.0), (vec![1.0, 1.0], 2.0)];
        assert_eq!(mcshane_extend(&flat, &ModulusEstimate::zero().into(), &[0.3, 0.7], ExtensionVariant::Plain).unwrap(), 2.0);
        assert!(mcshane_extend(&[], &wc, &[0.0], ExtensionVariant::Plain).is_err());
    }
}
