use gdn_manifold::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::modulus::Modulus;
use crate::poly::{binomial, Polynomial};

/// Samples of an `m`-valued map on the lattice `{0, 1/n, ..., 1}^p`, lexicographic with
/// the first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct BernsteinModel {
    pub n: usize,
    pub p: usize,
    pub m: usize,
    pub values: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawModel {
    n: usize,
    p: usize,
    m: usize,
    values: Vec<Vec<f64>>,
}

impl TryFrom<RawModel> for BernsteinModel {
    type Error = Error;
    fn try_from(r: RawModel) -> Result<Self> {
        BernsteinModel::new(r.n, r.p, r.m, r.values)
    }
}

pub const DEFAULT_DEGREE_CAP: u64 = 1_000_000_000;

impl BernsteinModel {
    pub fn new(n: usize, p: usize, m: usize, values: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 || p == 0 || m == 0 {
            return Err(Error::validation("Bernstein model needs n, p, m >= 1"));
        }
        let expected = (n + 1).checked_pow(p as u32).ok_or_else(|| Error::validation("lattice too large"))?;
        if values.len() != expected {
            return Err(Error::validation(format!("grid has {} values, expected {expected}", values.len())));
        }
        if values.iter().any(|v| v.len() != m || v.iter().any(|c| !c.is_finite())) {
            return Err(Error::validation("grid values must be finite vectors of length m"));
        }
        Ok(BernsteinModel { n, p, m, values })
    }

    pub fn from_fn(n: usize, p: usize, m: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let count = (n + 1).checked_pow(p as u32).ok_or_else(|| Error::validation("lattice too large"))?;
        let values = (0..count).map(|i| f(&lattice_point(n, p, i))).collect();
        BernsteinModel::new(n, p, m, values)
    }
}

/// The `index`-th lattice point.
pub fn lattice_point(n: usize, p: usize, mut index: usize) -> Vec<f64> {
    let mut x = vec![0.0; p];
    for i in (0..p).rev() {
        x[i] = (index % (n + 1)) as f64 / n as f64;
        index /= n + 1;
    }
    x
}

/// `C(n,k) t^k (1-t)^(n-k)` for all `k`, through logarithms so large `n` stays finite.
fn basis_weights(n: usize, t: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    if t <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if t >= 1.0 {
        w[n] = 1.0;
        return w;
    }
    let (lt, ls) = (t.ln(), (1.0 - t).ln());
    let mut log_binom = 0.0;
    for (k, wk) in w.iter_mut().enumerate() {
        if k > 0 {
            log_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        *wk = (log_binom + k as f64 * lt + (n - k) as f64 * ls).exp();
    }
    w
}

pub fn bernstein_eval(model: &BernsteinModel, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != model.p {
        return Err(Error::validation(format!("point has length {}, expected {}", x.len(), model.p)));
    }
    if let Some(v) = x.iter().find(|v| !(**v >= -1e-12 && **v <= 1.0 + 1e-12)) {
        return Err(Error::domain(format!("coordinate {v} is outside [0, 1]")));
    }
    let (n, m) = (model.n, model.m);
    // contract one axis at a time, last coordinate first
    let last = basis_weights(n, x[model.p - 1].clamp(0.0, 1.0));
    let mut cur = vec![0.0; model.values.len() / (n + 1) * m];
    for (out, block) in cur.chunks_exact_mut(m).zip(model.values.chunks_exact(n + 1)) {
        for (wk, vals) in last.iter().zip(block) {
            if *wk != 0.0 {
                out.iter_mut().zip(vals).for_each(|(o, c)| *o += wk * c);
            }
        }
    }
    for v in x[..model.p - 1].iter().rev() {
        let w = basis_weights(n, v.clamp(0.0, 1.0));
        let mut next = vec![0.0; cur.len() / (n + 1)];
        for (out, block) in next.chunks_exact_mut(m).zip(cur.chunks_exact((n + 1) * m)) {
            for (wk, vals) in w.iter().zip(block.chunks_exact(m)) {
                if *wk != 0.0 {
                    out.iter_mut().zip(vals).for_each(|(o, c)| *o += wk * c);
                }
            }
        }
        cur = next;
    }
    let out = cur;
    Ok(out)
}

/// Monomial coefficients of each output component of `B_n f`.
pub fn to_polynomials(model: &BernsteinModel) -> Vec<Polynomial> {
    let n = model.n;
    let side = n + 1;
    // a[j][k] = C(n,k) C(n-k, j-k) (-1)^(j-k)
    let mut a = vec![vec![0.0; side]; side];
    for (j, row) in a.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate().take(j + 1) {
            let s = if (j - k) % 2 == 0 { 1.0 } else { -1.0 };
            *v = s * binomial(n as u64, k as u64) * binomial((n - k) as u64, (j - k) as u64);
        }
    }
    (0..model.m)
        .map(|c| {
            let mut t: Vec<f64> = model.values.iter().map(|v| v[c]).collect();
            for axis in 0..model.p {
                let stride = side.pow((model.p - 1 - axis) as u32);
                let mut next = vec![0.0; t.len()];
                for (idx, slot) in next.iter_mut().enumerate() {
                    let j = (idx / stride) % side;
                    let base = idx - j * stride;
                    *slot = (0..=j).map(|k| a[j][k] * t[base + k * stride]).sum();
                }
                t = next;
            }
            let terms = t.iter().enumerate().map(|(idx, c)| {
                let e = lattice_point(n, model.p, idx).iter().map(|v| (v * n as f64).round() as u32).collect();
                (e, *c)
            });
            Polynomial::from_terms(model.p, terms).expect("consistent dimension")
        })
        .collect()
}

/// Smallest `n` with `m (1 + p/4) omega(1/sqrt(n)) <= eps`.
pub fn bernstein_degree_for(eps: f64, p: usize, m: usize, omega: &Modulus, cap: u64) -> Result<u64> {
    if !(eps > 0.0) {
        return Err(Error::validation("eps must be positive"));
    }
    let factor = m as f64 * (1.0 + p as f64 / 4.0);
    let ok = |n: u64| factor * omega.eval(1.0 / (n as f64).sqrt()) <= eps;
    if ok(1) {
        return Ok(1);
    }
    let mut hi = 2u64;
    while !ok(hi) {
        if hi >= cap {
            return Err(Error::InfeasibleDegree { cap });
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `(1 + p/4) omega(1/sqrt(n))`.
pub fn bernstein_bound(p: usize, n: u64, omega: &Modulus) -> f64 {
    (1.0 + p as f64 / 4.0) * omega.eval(1.0 / (n as f64).sqrt())
}
