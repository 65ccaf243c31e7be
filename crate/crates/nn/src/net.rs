use gdn_manifold::{Error, Matrix, Result};
use serde::{Deserialize, Serialize};

use crate::activation::ActivationInfo;

/// `x -> W x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineLayer {
    /// Row-major `out x in` weights.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl AffineLayer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        let layer = AffineLayer { weights, bias };
        layer.validate()?;
        Ok(layer)
    }

    pub fn from_matrix(w: &Matrix, bias: Vec<f64>) -> Result<Self> {
        AffineLayer::new(w.to_rows(), bias)
    }

    pub fn identity(n: usize) -> Self {
        AffineLayer { weights: Matrix::identity(n).to_rows(), bias: vec![0.0; n] }
    }

    pub fn out_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.first().map_or(0, |r| r.len())
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_rows(&self.weights).unwrap_or_else(|_| Matrix::zeros(0, 0))
    }

    fn validate(&self) -> Result<()> {
        if self.weights.len() != self.bias.len() {
            return Err(Error::validation(format!(
                "layer has {} weight rows but {} biases",
                self.weights.len(),
                self.bias.len()
            )));
        }
        let cols = self.in_dim();
        if self.weights.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("ragged weight matrix"));
        }
        if self.weights.iter().flatten().chain(&self.bias).any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite layer parameter"));
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }
}

/// `W_{J+1} o sigma o W_J o ... o sigma o W_1`, activation applied between layers only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetJson")]
pub struct FeedforwardNet {
    pub layers: Vec<AffineLayer>,
    pub activation: ActivationInfo,
}

#[derive(Deserialize)]
struct NetJson {
    layers: Vec<AffineLayer>,
    activation: ActivationInfo,
}

impl TryFrom<NetJson> for FeedforwardNet {
    type Error = Error;
    fn try_from(raw: NetJson) -> Result<Self> {
        FeedforwardNet::new(raw.layers, raw.activation)
    }
}

impl FeedforwardNet {
    pub fn new(layers: Vec<AffineLayer>, activation: ActivationInfo) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::validation("a network needs at least one layer"));
        }
        for l in &layers {
            l.validate()?;
        }
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::validation(format!(
                    "layer {} outputs {} values but layer {} expects {}",
                    i,
                    pair[0].out_dim(),
                    i + 1,
                    pair[1].in_dim()
                )));
            }
        }
        Ok(FeedforwardNet { layers, activation })
    }

    /// Single affine layer `x -> W x + b`.
    pub fn affine(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: ActivationInfo) -> Result<Self> {
        FeedforwardNet::new(vec![AffineLayer::new(weights, bias)?], activation)
    }

    /// Network returning the constant `value` on inputs of length `in_dim`.
    pub fn constant(in_dim: usize, value: Vec<f64>, activation: ActivationInfo) -> Self {
        let rows = vec![vec![0.0; in_dim]; value.len()];
        FeedforwardNet { layers: vec![AffineLayer { weights: rows, bias: value }], activation }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim())
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Largest hidden layer size, zero for a purely affine net.
    pub fn width(&self) -> usize {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.out_dim()).max().unwrap_or(0)
    }

    /// `sum_j out_j (in_j + 1)`.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.out_dim() * (l.in_dim() + 1)).sum()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim() {
            return Err(Error::validation(format!(
                "input has length {}, network expects {}",
                x.len(),
                self.in_dim()
            )));
        }
        let mut h = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            h = layer.apply(&h);
            if i < last {
                h.iter_mut().for_each(|v| *v = self.activation.eval(*v));
            }
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::numeric(format!("non-finite value after layer {i}")));
            }
        }
        Ok(h)
    }

    /// The net `x -> self(A x + b)`.
    pub fn precompose_affine(&self, a: &Matrix, b: &[f64]) -> Result<Self> {
        let first = &self.layers[0];
        if a.rows() != first.in_dim() || b.len() != a.rows() {
            return Err(Error::validation("precomposed map does not match the input dimension"));
        }
        let w = first.matrix();
        let new_w = w.matmul(a);
        let shift = w.matvec(b);
        let bias = first.bias.iter().zip(&shift).map(|(c, s)| c + s).collect();
        let mut layers = self.layers.clone();
        layers[0] = AffineLayer::from_matrix(&new_w, bias)?;
        FeedforwardNet::new(layers, self.activation)
    }

    /// The net `x -> C self(x) + d`.
    pub fn postcompose_affine(&self, c: &Matrix, d: &[f64]) -> Result<Self> {
        let last = self.layers.last().expect("nonempty");
        if c.cols() != last.out_dim() || d.len() != c.rows() {
            return Err(Error::validation("postcomposed map does not match the output dimension"));
        }
        let w = last.matrix();
        let new_w = c.matmul(&w);
        let mapped = c.matvec(&last.bias);
        let bias = mapped.iter().zip(d).map(|(m, e)| m + e).collect();
        let mut layers = self.layers.clone();
        let n = layers.len();
        layers[n - 1] = AffineLayer::from_matrix(&new_w, bias)?;
        FeedforwardNet::new(layers, self.activation)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite parameters serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("network JSON: {e}")))
    }
}

pub fn eval_net(net: &FeedforwardNet, x: &[f64]) -> Result<Vec<f64>> {
    net.eval(x)
}

pub fn param_count(net: &FeedforwardNet) -> usize {
    net.param_count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu_sign_net() -> FeedforwardNet {
        FeedforwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0]).unwrap(),
                AffineLayer::new(vec![vec![1.0, -1.0]], vec![0.0]).unwrap(),
            ],
            ActivationInfo::relu(),
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = FeedforwardNet::new(vec![AffineLayer::identity(3)], ActivationInfo::relu()).unwrap();
        assert_eq!(id.eval(&[1.0, -2.0, 3.0]).unwrap(), vec![1.0, -2.0, 3.0]);
        let net = relu_sign_net();
        assert_eq!(net.eval(&[2.0]).unwrap(), vec![2.0]);
        assert_eq!(net.eval(&[-2.0]).unwrap(), vec![-2.0]);
        let zero = FeedforwardNet::new(
            vec![
                AffineLayer::new(vec![vec![0.0; 2]; 3], vec![1.0; 3]).unwrap(),
                AffineLayer::new(vec![vec![0.0; 3]], vec![4.5]).unwrap(),
            ],
            ActivationInfo::relu(),
        )
        .unwrap();
        assert_eq!(zero.eval(&[7.0, 8.0]).unwrap(), vec![4.5]);
        assert!(matches!(net.eval(&[1.0, 2.0]), Err(Error::Validation(_))));
    }

    #[test]
    fn numeric_error_names_layer() {
        let net = FeedforwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1000.0]], vec![0.0]).unwrap(),
                AffineLayer::new(vec![vec![1.0]], vec![0.0]).unwrap(),
            ],
            ActivationInfo::exp(),
        )
        .unwrap();
        let err = net.eval(&[1.0]).unwrap_err();
        assert!(err.to_string().contains("layer 0"), "{err}");
    }

    #[test]
    fn param_counts() {
        let one = FeedforwardNet::affine(vec![vec![0.0; 3]; 2], vec![0.0; 2], ActivationInfo::relu()).unwrap();
        assert_eq!(one.param_count(), 8);
        let id = FeedforwardNet::new(vec![AffineLayer::identity(1)], ActivationInfo::relu()).unwrap();
        assert_eq!(id.param_count(), 2);
        let deep = FeedforwardNet::new(
            vec![
                AffineLayer::new(vec![vec![0.0; 2]; 5], vec![0.0; 5]).unwrap(),
                AffineLayer::new(vec![vec![0.0; 5]; 3], vec![0.0; 3]).unwrap(),
            ],
            ActivationInfo::relu(),
        )
        .unwrap();
        assert_eq!(deep.param_count(), 33);
        assert_eq!((deep.width(), deep.depth()), (5, 1));
    }

    #[test]
    fn chain_mismatch_rejected() {
        let err = FeedforwardNet::new(
            vec![AffineLayer::identity(2), AffineLayer::identity(3)],
            ActivationInfo::relu(),
        );
        assert!(matches!(err, Err(Error::Validation(_))));
    }

    #[test]
    fn affine_composition() {
        let net = relu_sign_net();
        let a = Matrix::from_rows(&[vec![2.0, 1.0]]).unwrap();
        let pre = net.precompose_affine(&a, &[0.5]).unwrap();
        assert_eq!(pre.eval(&[1.0, -1.0]).unwrap(), vec![1.5]);
        let c = Matrix::from_rows(&[vec![3.0], vec![-1.0]]).unwrap();
        let post = net.postcompose_affine(&c, &[1.0, 0.0]).unwrap();
        assert_eq!(post.eval(&[2.0]).unwrap(), vec![7.0, -2.0]);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let net = FeedforwardNet::new(
            vec![
                AffineLayer::new(vec![vec![0.1, -1.0 / 3.0]], vec![std::f64::consts::PI]).unwrap(),
                AffineLayer::new(vec![vec![1e-300]], vec![-2.718281828459045e17]).unwrap(),
            ],
            ActivationInfo::exp(),
        )
        .unwrap();
        let s = net.to_json();
        assert!(s.starts_with(r#"{"layers":[{"weights":[[0.1,"#), "{s}");
        let back = FeedforwardNet::from_json(&s).unwrap();
        assert_eq!(back, net);
        assert!(FeedforwardNet::from_json(r#"{"layers":[],"activation":{"name":"relu","class":"piecewise-linear"}}"#).is_err());
    }
}
