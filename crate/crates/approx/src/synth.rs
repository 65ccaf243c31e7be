//! Shallow network synthesis from polynomials through finite differences of the
//! activation in its weight parameter.

use gdn_manifold::{Error, Result};
use gdn_nn::{ActivationClass, ActivationInfo, AffineLayer, FeedforwardNet};

use crate::bernstein::{bernstein_bound, bernstein_degree_for, to_polynomials, BernsteinModel, DEFAULT_DEGREE_CAP};
use crate::modulus::Modulus;
use crate::poly::{binomial, decompose_polynomial, LinearFormPoly};

const MIN_DERIVATIVE: f64 = 1e-6;

/// `h^-k sum_j (-1)^(k-j) C(k,j) sigma(j h z - theta0)`, a forward difference in `w` of
/// `sigma(w z - theta0)` at `w = 0`.
pub fn finite_diff_derivative(sigma: &ActivationInfo, k: usize, z: f64, theta0: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..=k {
        let s = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
        acc += s * binomial(k as u64, j as u64) * sigma.eval(j as f64 * h * z - theta0);
    }
    acc / h.powi(k as i32)
}

/// `sigma^(k)(t)`, analytic when known and a forward difference otherwise.
pub fn derivative_estimate(sigma: &ActivationInfo, k: usize, t: f64) -> f64 {
    sigma.derivative(k, t).unwrap_or_else(|| finite_diff_derivative(sigma, k, 1.0, -t, 1e-3))
}

fn min_derivative(sigma: &ActivationInfo, max_k: usize, theta0: f64) -> f64 {
    (1..=max_k).map(|k| derivative_estimate(sigma, k, -theta0).abs()).fold(f64::INFINITY, f64::min)
}

/// A `theta0` at which `sigma^(k)(-theta0)` is nonzero for `1 <= k <= max_k`.
///
/// The registry value is used when it passes; otherwise `[-3, 3]` is scanned for the
/// point maximizing the smallest derivative magnitude.
pub fn select_theta0(sigma: &ActivationInfo, max_k: usize) -> Result<f64> {
    if let Some(t) = sigma.known_theta0() {
        if min_derivative(sigma, max_k, t) > MIN_DERIVATIVE {
            return Ok(t);
        }
    }
    let (best, score) = (0..=600)
        .map(|i| -3.0 + i as f64 * 0.01)
        .map(|t| (t, min_derivative(sigma, max_k, t)))
        .fold((0.0, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
    if score > MIN_DERIVATIVE {
        Ok(best)
    } else {
        Err(Error::BadTheta0(format!(
            "{} has a vanishing derivative of order <= {max_k} at every theta0 in [-3, 3]",
            sigma.name()
        )))
    }
}

fn require_smooth(sigma: &ActivationInfo) -> Result<()> {
    if sigma.class() != ActivationClass::SmoothNonpoly {
        return Err(Error::Unsupported(format!(
            "weight-level compilation needs a smooth non-polynomial activation, {} is {}",
            sigma.name(),
            sigma.class().as_str()
        )));
    }
    Ok(())
}

/// One-hidden-layer net approximating `terms` with `O(h)` error.
///
/// A term of degree `K` with direction `a` uses the neurons `sigma(j h <a, x> - theta0)`
/// for `j = 1..K`; the `j = 0` stencil point is constant and goes into the output bias.
pub fn compile_poly_to_shallow(
    terms: &LinearFormPoly,
    sigma: &ActivationInfo,
    theta0: f64,
    h: f64,
) -> Result<FeedforwardNet> {
    require_smooth(sigma)?;
    if !(h > 0.0) {
        return Err(Error::validation("finite-difference step must be positive"));
    }
    let p = terms.dim;
    let deg = terms.degree();
    let mut bias = 0.0;
    if deg == 0 {
        bias = terms.terms.iter().map(|t| t.coeffs.first().copied().unwrap_or(0.0)).sum();
        return Ok(FeedforwardNet::constant(p, vec![bias], *sigma));
    }
    let mut deriv = vec![0.0; deg + 1];
    for (k, d) in deriv.iter_mut().enumerate().skip(1) {
        *d = derivative_estimate(sigma, k, -theta0);
        if d.abs() <= MIN_DERIVATIVE {
            return Err(Error::BadTheta0(format!(
                "derivative of order {k} of {} vanishes at {}; try a grid search for theta0",
                sigma.name(),
                -theta0
            )));
        }
    }
    let s0 = sigma.eval(-theta0);
    let mut rows = Vec::new();
    let mut row_bias = Vec::new();
    let mut out = Vec::new();
    for t in &terms.terms {
        let k_max = t.degree();
        bias += t.coeffs.first().copied().unwrap_or(0.0);
        // scaled[k] = b_k / (h^k sigma^(k)(-theta0))
        let scaled: Vec<f64> = (0..=k_max)
            .map(|k| if k == 0 { 0.0 } else { t.coeffs[k] / (h.powi(k as i32) * deriv[k]) })
            .collect();
        for j in 0..=k_max {
            let c: f64 = (j.max(1)..=k_max)
                .map(|k| {
                    let s = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                    s * binomial(k as u64, j as u64) * scaled[k]
                })
                .sum();
            if j == 0 {
                bias += c * s0;
            } else {
                rows.push(t.direction.iter().map(|a| j as f64 * h * a).collect());
                row_bias.push(-theta0);
                out.push(c);
            }
        }
    }
    FeedforwardNet::new(
        vec![AffineLayer::new(rows, row_bias)?, AffineLayer::new(vec![out], vec![bias])?],
        *sigma,
    )
}

/// Side-by-side union of shallow nets sharing input dimension and activation.
pub fn stack_shallow(nets: &[FeedforwardNet]) -> Result<FeedforwardNet> {
    let first = nets.first().ok_or_else(|| Error::validation("nothing to stack"))?;
    let p = first.in_dim();
    for n in nets {
        if n.in_dim() != p || n.activation != first.activation {
            return Err(Error::validation("stacked nets must share input dimension and activation"));
        }
        if n.depth() > 1 {
            return Err(Error::validation("only nets with at most one hidden layer can be stacked"));
        }
        if n.depth() == 0 && n.layers[0].weights.iter().flatten().any(|w| *w != 0.0) {
            return Err(Error::Unsupported("stacking a non-constant affine net".into()));
        }
    }
    let hidden: usize = nets.iter().filter(|n| n.depth() == 1).map(|n| n.layers[0].out_dim()).sum();
    let outputs: usize = nets.iter().map(|n| n.out_dim()).sum();
    if hidden == 0 {
        let bias = nets.iter().flat_map(|n| n.layers[0].bias.clone()).collect();
        return Ok(FeedforwardNet::constant(p, bias, first.activation));
    }
    let mut w1 = Vec::with_capacity(hidden);
    let mut b1 = Vec::with_capacity(hidden);
    let mut w2 = Vec::with_capacity(outputs);
    let mut b2 = Vec::with_capacity(outputs);
    let mut offset = 0;
    for n in nets {
        let last = n.layers.last().expect("nonempty");
        if n.depth() == 1 {
            w1.extend(n.layers[0].weights.iter().cloned());
            b1.extend(n.layers[0].bias.iter().copied());
        }
        let width = if n.depth() == 1 { n.layers[0].out_dim() } else { 0 };
        for (i, b) in last.bias.iter().enumerate() {
            let mut row = vec![0.0; hidden];
            if width > 0 {
                row[offset..offset + width].copy_from_slice(&last.weights[i]);
            }
            w2.push(row);
            b2.push(*b);
        }
        offset += width;
    }
    FeedforwardNet::new(vec![AffineLayer::new(w1, b1)?, AffineLayer::new(w2, b2)?], first.activation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileOptions {
    pub theta0: Option<f64>,
    pub h: Option<f64>,
    /// Fraction of `eps` assigned to the Bernstein stage.
    pub bernstein_share: f64,
    /// Largest Bernstein degree that is materialized.
    pub max_degree: usize,
    pub degree_cap: u64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { theta0: None, h: None, bernstein_share: 0.5, max_degree: 12, degree_cap: DEFAULT_DEGREE_CAP }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledShallow {
    pub net: FeedforwardNet,
    /// Bernstein degree actually compiled.
    pub degree: usize,
    /// Total degree of the compiled polynomial.
    pub poly_degree: usize,
    /// Degree guaranteed by the modulus bound for the Bernstein share of `eps`.
    pub apriori_degree: u64,
    /// `m (1 + p/4) omega(1/sqrt(degree))` plus the measured synthesis residual.
    pub bound: f64,
    pub synthesis_residual: f64,
    pub audit_error: f64,
    pub theta0: f64,
    pub h: f64,
    /// Total linear-form terms and the reference count `C(p - 1 + k, k)` summed over outputs.
    pub terms: usize,
    pub term_bound: f64,
}

/// The `10^p` audit grid on the unit cube.
pub fn audit_grid(p: usize) -> Vec<Vec<f64>> {
    (0..10usize.pow(p as u32))
        .map(|mut idx| {
            let mut x = vec![0.0; p];
            for v in x.iter_mut().rev() {
                *v = (idx % 10) as f64 / 9.0;
                idx /= 10;
            }
            x
        })
        .collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Bernstein polynomial, linear-form decomposition and finite-difference synthesis for a
/// map `[0,1]^p -> R^m`.
///
/// Degrees `1, 2, ...` up to the smaller of the a-priori degree and `max_degree` are
/// tried in turn; the first net whose audit error is at most `eps` is returned.
pub fn compile_function_to_shallow(
    target: &dyn Fn(&[f64]) -> Vec<f64>,
    p: usize,
    m: usize,
    omega: &Modulus,
    eps: f64,
    sigma: &ActivationInfo,
    opts: &CompileOptions,
) -> Result<CompiledShallow> {
    require_smooth(sigma)?;
    if !(eps > 0.0) || !(opts.bernstein_share > 0.0 && opts.bernstein_share < 1.0) {
        return Err(Error::validation("eps must be positive and the Bernstein share in (0, 1)"));
    }
    let apriori = bernstein_degree_for(eps * opts.bernstein_share, p, m, omega, opts.degree_cap)?;
    let grid = audit_grid(p);
    let truth: Vec<Vec<f64>> = grid.iter().map(|x| target(x)).collect();
    if truth.iter().any(|v| v.len() != m || v.iter().any(|c| !c.is_finite())) {
        return Err(Error::validation("target must return finite vectors of length m on the cube"));
    }
    let top = (apriori as usize).min(opts.max_degree);
    let mut best: Option<CompiledShallow> = None;
    for n in 1..=top {
        let model = BernsteinModel::from_fn(n, p, m, target)?;
        let polys = to_polynomials(&model);
        let forms: Vec<LinearFormPoly> = polys.iter().map(decompose_polynomial).collect();
        let deg = forms.iter().map(LinearFormPoly::degree).max().unwrap_or(0);
        let theta0 = match opts.theta0 {
            Some(t) => t,
            None => select_theta0(sigma, deg.max(1))?,
        };
        let h0 = opts
            .h
            .unwrap_or_else(|| (eps * (1.0 - opts.bernstein_share) / deg.max(1) as f64 * 0.1).clamp(1e-7, 1e-2));
        let halvings = if opts.h.is_some() { 0 } else { 6 };
        for step in 0..=halvings {
            let h = h0 / 2f64.powi(step);
            if h < 1e-7 {
                break;
            }
            let nets = forms
                .iter()
                .map(|f| compile_poly_to_shallow(f, sigma, theta0, h))
                .collect::<Result<Vec<_>>>()?;
            let net = stack_shallow(&nets)?;
            let mut audit = 0.0f64;
            let mut residual = 0.0f64;
            for (x, y) in grid.iter().zip(&truth) {
                let out = match net.eval(x) {
                    Ok(v) => v,
                    Err(_) => {
                        audit = f64::INFINITY;
                        break;
                    }
                };
                let poly: Vec<f64> = polys.iter().map(|q| q.eval(x)).collect();
                audit = audit.max(euclid(&out, y));
                residual = residual.max(euclid(&out, &poly));
            }
            let candidate = CompiledShallow {
                net,
                degree: n,
                poly_degree: deg,
                apriori_degree: apriori,
                bound: m as f64 * bernstein_bound(p, n as u64, omega) + residual,
                synthesis_residual: residual,
                audit_error: audit,
                theta0,
                h,
                terms: forms.iter().map(|f| f.terms.len()).sum(),
                term_bound: forms.iter().map(|f| f.term_bound).sum(),
            };
            let improves = best.as_ref().is_none_or(|b| candidate.audit_error < b.audit_error);
            if candidate.audit_error <= eps {
                return Ok(candidate);
            }
            if improves {
                best = Some(candidate);
            }
        }
    }
    Err(Error::Numeric(format!(
        "no compiled net up to degree {top} met eps = {eps}; best audit error {}",
        best.map_or(f64::INFINITY, |b| b.audit_error)
    )))
}
