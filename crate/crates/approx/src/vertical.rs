//! Rewriting shallow nets as deep nets of width `p + m + 1`, one hidden neuron per layer.
//!
//! Every hidden layer carries `p` input registers, `m` output accumulators and one compute
//! neuron. Registers and accumulators pass through the activation on a piece where it is
//! affine (exact) or through a scaled identity `(sigma(t0 + lambda v) - sigma(t0)) /
//! (lambda sigma'(t0))` (approximate).

use gdn_manifold::sampling::halton;
use gdn_manifold::{Error, Result};
use gdn_nn::{ActivationClass, ActivationInfo, AffineLayer, FeedforwardNet};
use serde::{Deserialize, Serialize};

use crate::synth::derivative_estimate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerticalStrategy {
    ExactPwl,
    /// Carried channels stay within `lambda` of the point of steepest slope.
    ScaledIdentity { lambda: f64 },
}

#[derive(Debug, Clone)]
pub struct VerticalNet {
    pub net: FeedforwardNet,
    /// Sup deviation from the stacked shallow outputs on 1000 Halton samples of the box.
    pub measured_error: f64,
}

/// How a carried value `v` enters a neuron and is read back: `u = alpha v + beta`,
/// `v = scale sigma(u) + offset`.
#[derive(Debug, Clone, Copy)]
struct Codec {
    alpha: f64,
    beta: f64,
    scale: f64,
    offset: f64,
}

#[derive(Debug, Clone, Copy)]
enum Carrier {
    Piece { lo: f64, hi: f64, slope: f64, intercept: f64 },
    Scaled { t0: f64, lambda: f64, value: f64, slope: f64 },
}

impl Carrier {
    fn codec(&self, lo: f64, hi: f64) -> Codec {
        match *self {
            Carrier::Piece { lo: plo, hi: phi, slope, intercept } => {
                let (alpha, beta) = match (plo.is_finite(), phi.is_finite()) {
                    (true, true) => {
                        let alpha = if hi > lo { ((phi - plo) / (hi - lo)).min(1.0) } else { 1.0 };
                        (alpha, plo - alpha * lo)
                    }
                    (true, false) => (1.0, plo - lo),
                    (false, true) => (1.0, phi - hi),
                    (false, false) => (1.0, 0.0),
                };
                Codec {
                    alpha,
                    beta,
                    scale: 1.0 / (slope * alpha),
                    offset: -(intercept + slope * beta) / (slope * alpha),
                }
            }
            Carrier::Scaled { t0, lambda, value, slope } => {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                let alpha = if half > 0.0 { lambda / half } else { lambda };
                Codec {
                    alpha,
                    beta: t0 - alpha * mid,
                    scale: 1.0 / (alpha * slope),
                    offset: mid - value / (alpha * slope),
                }
            }
        }
    }
}

/// Affine combination of the previous layer's outputs under construction.
struct Row {
    weights: Vec<f64>,
    bias: f64,
}

impl Row {
    fn new(width: usize) -> Self {
        Row { weights: vec![0.0; width], bias: 0.0 }
    }

    /// Adds `c * v` where `v = scale y_i + offset`.
    fn add(&mut self, i: usize, c: f64, scale: f64, offset: f64) {
        self.weights[i] += c * scale;
        self.bias += c * offset;
    }

    fn encode(mut self, codec: &Codec) -> Row {
        self.weights.iter_mut().for_each(|w| *w *= codec.alpha);
        self.bias = codec.alpha * self.bias + codec.beta;
        self
    }
}

struct Neuron {
    weights: Vec<f64>,
    bias: f64,
    /// `(global output index, output weight)`.
    outputs: Vec<(usize, f64)>,
}

fn interval_dot(w: &[f64], bounds: &[(f64, f64)], b: f64) -> (f64, f64) {
    w.iter().zip(bounds).fold((b, b), |(lo, hi), (wi, (a, c))| {
        let (x, y) = (wi * a, wi * c);
        (lo + x.min(y), hi + x.max(y))
    })
}

/// Concatenated outputs of `shallow` realized as one deep narrow net on `bounds`.
pub fn verticalize(shallow: &[FeedforwardNet], bounds: &[(f64, f64)], strategy: VerticalStrategy) -> Result<VerticalNet> {
    let first = shallow.first().ok_or_else(|| Error::validation("no shallow nets"))?;
    let p = first.in_dim();
    let sigma: ActivationInfo = first.activation;
    if bounds.len() != p {
        return Err(Error::validation(format!("box has {} sides, inputs have dimension {p}", bounds.len())));
    }
    if bounds.iter().any(|(a, b)| !(a <= b)) {
        return Err(Error::validation("box has a side with lo > hi"));
    }
    for n in shallow {
        if n.in_dim() != p || n.activation != sigma {
            return Err(Error::validation("shallow nets must share input dimension and activation"));
        }
        if n.depth() > 1 {
            return Err(Error::validation("verticalize expects nets with at most one hidden layer"));
        }
    }
    let carrier = match strategy {
        VerticalStrategy::ExactPwl => {
            if bounds.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                return Err(Error::validation("exact piecewise-linear verticalization needs a bounded box"));
            }
            match sigma.linear_piece() {
                Some(lp) if sigma.is_monotone() => {
                    Carrier::Piece { lo: lp.lo, hi: lp.hi, slope: lp.slope, intercept: lp.intercept }
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "exact verticalization needs a monotone activation with an affine piece, {} has none",
                        sigma.name()
                    )))
                }
            }
        }
        VerticalStrategy::ScaledIdentity { lambda } => {
            if sigma.class() != ActivationClass::SmoothNonpoly {
                return Err(Error::Unsupported(format!(
                    "scaled-identity verticalization needs a smooth activation, {} is {}",
                    sigma.name(),
                    sigma.class().as_str()
                )));
            }
            if !(lambda > 0.0) {
                return Err(Error::validation("lambda must be positive"));
            }
            let (t0, slope) = (0..=600)
                .map(|i| -3.0 + i as f64 * 0.01)
                .map(|t| (t, derivative_estimate(&sigma, 1, t)))
                .fold((0.0f64, 0.0f64), |acc, c| if c.1.abs() > acc.1.abs() { c } else { acc });
            Carrier::Scaled { t0, lambda, value: sigma.eval(t0), slope }
        }
    };

    let m: usize = shallow.iter().map(FeedforwardNet::out_dim).sum();
    let mut neurons = Vec::new();
    let mut out_bias = vec![0.0; m];
    let mut out_linear = vec![vec![0.0; p]; m];
    let mut offset = 0;
    for n in shallow {
        let last = n.layers.last().expect("nonempty");
        for (q, b) in last.bias.iter().enumerate() {
            out_bias[offset + q] = *b;
        }
        if n.depth() == 0 {
            for (q, row) in last.weights.iter().enumerate() {
                out_linear[offset + q] = row.clone();
            }
        } else {
            let hidden = &n.layers[0];
            for j in 0..hidden.out_dim() {
                neurons.push(Neuron {
                    weights: hidden.weights[j].clone(),
                    bias: hidden.bias[j],
                    outputs: (0..last.out_dim()).map(|q| (offset + q, last.weights[q][j])).collect(),
                });
            }
        }
        offset += n.out_dim();
    }

    let net = if neurons.is_empty() {
        FeedforwardNet::new(vec![AffineLayer::new(out_linear, out_bias)?], sigma)?
    } else {
        build_deep(p, m, bounds, &sigma, carrier, &neurons, out_linear, out_bias)?
    };

    let reference = |x: &[f64]| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(m);
        for n in shallow {
            out.extend(n.eval(x)?);
        }
        Ok(out)
    };
    let mut measured = 0.0f64;
    if bounds.iter().all(|(a, b)| a.is_finite() && b.is_finite()) {
        for i in 0..1000u64 {
            let u = halton(i + 1, p);
            let x: Vec<f64> = u.iter().zip(bounds).map(|(t, (a, b))| a + t * (b - a)).collect();
            let want = reference(&x)?;
            let got = net.eval(&x)?;
            measured = want.iter().zip(&got).fold(measured, |acc, (a, b)| acc.max((a - b).abs()));
        }
    } else {
        measured = f64::INFINITY;
    }
    Ok(VerticalNet { net, measured_error: measured })
}

#[allow(clippy::too_many_arguments)]
fn build_deep(
    p: usize,
    m: usize,
    bounds: &[(f64, f64)],
    sigma: &ActivationInfo,
    carrier: Carrier,
    neurons: &[Neuron],
    out_linear: Vec<Vec<f64>>,
    out_bias: Vec<f64>,
) -> Result<FeedforwardNet> {
    let reg_codecs: Vec<Codec> = bounds.iter().map(|(a, b)| carrier.codec(*a, *b)).collect();
    let mut acc_range = vec![(0.0f64, 0.0f64); m];
    let mut layers = Vec::with_capacity(neurons.len() + 1);
    // decoders of the previous layer's channels: (scale, offset)
    let mut reg_dec: Vec<(f64, f64)> = vec![(1.0, 0.0); p];
    let mut acc_dec: Vec<Option<(f64, f64)>> = vec![None; m];
    let mut compute_ix: Option<usize> = None;
    let mut prev_width = p;
    let mut prev_neuron: Option<&Neuron> = None;
    for neuron in neurons {
        let width = p + m + 1;
        let mut rows: Vec<Row> = Vec::with_capacity(width);
        for i in 0..p {
            let mut r = Row::new(prev_width);
            r.add(i, 1.0, reg_dec[i].0, reg_dec[i].1);
            rows.push(r.encode(&reg_codecs[i]));
        }
        let mut new_acc_dec = Vec::with_capacity(m);
        let mut contrib = vec![0.0; m];
        if let Some(prev) = prev_neuron {
            let (zlo, zhi) = interval_dot(&prev.weights, bounds, prev.bias);
            let (slo, shi) = (sigma.eval(zlo), sigma.eval(zhi));
            for (q, c) in &prev.outputs {
                contrib[*q] = *c;
                let (x, y) = (c * slo, c * shi);
                acc_range[*q].0 += x.min(y);
                acc_range[*q].1 += x.max(y);
            }
        }
        for q in 0..m {
            let mut r = Row::new(prev_width);
            if let Some((s, o)) = acc_dec[q] {
                r.add(p + q, 1.0, s, o);
            }
            if let Some(ci) = compute_ix {
                r.add(ci, contrib[q], 1.0, 0.0);
            }
            let codec = carrier.codec(acc_range[q].0, acc_range[q].1);
            new_acc_dec.push(Some((codec.scale, codec.offset)));
            rows.push(r.encode(&codec));
        }
        let mut r = Row::new(prev_width);
        for (i, w) in neuron.weights.iter().enumerate() {
            r.add(i, *w, reg_dec[i].0, reg_dec[i].1);
        }
        r.bias += neuron.bias;
        rows.push(r);
        let (w, b): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().map(|r| (r.weights, r.bias)).unzip();
        layers.push(AffineLayer::new(w, b)?);
        reg_dec = reg_codecs.iter().map(|c| (c.scale, c.offset)).collect();
        acc_dec = new_acc_dec;
        compute_ix = Some(p + m);
        prev_width = width;
        prev_neuron = Some(neuron);
    }
    let last = prev_neuron.expect("at least one neuron");
    let mut contrib = vec![0.0; m];
    for (q, c) in &last.outputs {
        contrib[*q] = *c;
    }
    let mut w = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for q in 0..m {
        let mut r = Row::new(prev_width);
        if let Some((s, o)) = acc_dec[q] {
            r.add(p + q, 1.0, s, o);
        }
        r.add(p + m, contrib[q], 1.0, 0.0);
        for (i, lin) in out_linear[q].iter().enumerate() {
            r.add(i, *lin, reg_dec[i].0, reg_dec[i].1);
        }
        r.bias += out_bias[q];
        w.push(r.weights);
        b.push(r.bias);
    }
    layers.push(AffineLayer::new(w, b)?);
    FeedforwardNet::new(layers, *sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_shallow(rng: &mut ChaCha8Rng, p: usize, width: usize, act: ActivationInfo) -> FeedforwardNet {
        let w1 = (0..width).map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let b1 = (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w2 = vec![(0..width).map(|_| rng.gen_range(-1.0..1.0)).collect()];
        let b2 = vec![rng.gen_range(-1.0..1.0)];
        FeedforwardNet::new(vec![AffineLayer::new(w1, b1).unwrap(), AffineLayer::new(w2, b2).unwrap()], act).unwrap()
    }

    #[test]
    fn single_neuron_stays_one_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = random_shallow(&mut rng, 2, 1, ActivationInfo::relu());
        let v = verticalize(&[n], &[(-2.0, 2.0); 2], VerticalStrategy::ExactPwl).unwrap();
        assert_eq!(v.net.depth(), 1);
        assert!(v.measured_error <= 1e-12);
    }

    #[test]
    fn relu_width_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = random_shallow(&mut rng, 2, 5, ActivationInfo::relu());
        let v = verticalize(&[n], &[(-2.0, 2.0); 2], VerticalStrategy::ExactPwl).unwrap();
        assert_eq!(v.net.depth(), 5);
        assert!(v.net.width() <= 2 + 1 + 2);
        assert!(v.measured_error <= 1e-9, "{}", v.measured_error);
    }

    #[test]
    fn two_nets_depth_seven() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_shallow(&mut rng, 3, 3, ActivationInfo::relu());
        let b = random_shallow(&mut rng, 3, 4, ActivationInfo::relu());
        let v = verticalize(&[a, b], &[(-2.0, 2.0); 3], VerticalStrategy::ExactPwl).unwrap();
        assert_eq!(v.net.depth(), 7);
        assert!(v.net.width() <= 3 + 2 + 2);
        assert!(v.measured_error <= 1e-9, "{}", v.measured_error);
    }

    #[test]
    fn hard_tanh_registers_are_rescaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let act = ActivationInfo::by_name("hard_tanh").unwrap();
        let a = random_shallow(&mut rng, 2, 6, act);
        let v = verticalize(&[a], &[(-3.0, 5.0), (-2.0, 2.0)], VerticalStrategy::ExactPwl).unwrap();
        assert!(v.measured_error <= 1e-9, "{}", v.measured_error);
    }

    #[test]
    fn scaled_identity_improves_with_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let act = ActivationInfo::by_name("tanh").unwrap();
        let a = random_shallow(&mut rng, 2, 4, act);
        let e1 = verticalize(std::slice::from_ref(&a), &[(-1.0, 1.0); 2], VerticalStrategy::ScaledIdentity { lambda: 1e-2 }).unwrap();
        let e2 = verticalize(&[a], &[(-1.0, 1.0); 2], VerticalStrategy::ScaledIdentity { lambda: 5e-3 }).unwrap();
        assert!(e2.measured_error < e1.measured_error, "{} {}", e1.measured_error, e2.measured_error);
        assert!(e1.measured_error < 1e-2);
    }

    #[test]
    fn guards() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let relu = random_shallow(&mut rng, 1, 2, ActivationInfo::relu());
        let unbounded = [(f64::NEG_INFINITY, 1.0)];
        assert!(matches!(verticalize(std::slice::from_ref(&relu), &unbounded, VerticalStrategy::ExactPwl), Err(Error::Validation(_))));
        assert!(matches!(
            verticalize(&[relu], &[(0.0, 1.0)], VerticalStrategy::ScaledIdentity { lambda: 0.1 }),
            Err(Error::Unsupported(_))
        ));
        let e = random_shallow(&mut rng, 1, 2, ActivationInfo::exp());
        assert!(matches!(verticalize(&[e], &[(0.0, 1.0)], VerticalStrategy::ExactPwl), Err(Error::Unsupported(_))));
    }
}
