//! Sampling in geodesic balls and parallel sup-error audits.

use gdn_manifold::sampling::halton_ball;
use gdn_manifold::zoo::{exp_map, tangent_basis};
use gdn_manifold::{distance, ManifoldSpec, Matrix, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const KAPPA_PAIRS: usize = 10_000;
pub const KAPPA_INFLATION: f64 = 1.1;

/// Tangent frame at a base point and the map from intrinsic coordinates to points.
#[derive(Debug, Clone)]
pub struct Frame {
    pub spec: ManifoldSpec,
    pub base: Vec<f64>,
    /// `chart_dim x dim` orthonormal tangent basis.
    pub basis: Matrix,
}

impl Frame {
    pub fn new(spec: &ManifoldSpec, base: &[f64]) -> Result<Self> {
        Ok(Frame { spec: spec.clone(), base: base.to_vec(), basis: tangent_basis(spec, base)? })
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn exp(&self, v: &[f64]) -> Result<Vec<f64>> {
        exp_map(&self.spec, &self.base, &self.basis.matvec(v))
    }

    pub fn log(&self, y: &[f64]) -> Result<Vec<f64>> {
        let w = gdn_manifold::log_map(&self.spec, &self.base, y)?;
        Ok(self.basis.transpose().matvec(&w))
    }
}

/// `count` Halton points of the geodesic ball of `radius` around the frame's base.
pub fn ball_points(frame: &Frame, radius: f64, count: usize) -> Result<Vec<Vec<f64>>> {
    halton_ball(count, frame.dim(), radius).iter().map(|v| frame.exp(v)).collect()
}

fn uniform_in_ball(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
            return v;
        }
    }
}

/// Largest difference quotient of `f` over random pairs drawn by `draw`, inflated by 1.1.
pub fn lipschitz_estimate(
    rng: &mut ChaCha8Rng,
    draw: impl Fn(&mut ChaCha8Rng) -> Vec<f64>,
    f: impl Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    dist: impl Fn(&[f64], &[f64]) -> Result<f64> + Sync,
) -> Result<f64> {
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..KAPPA_PAIRS).map(|_| (draw(rng), draw(rng))).collect();
    let ratios = pairs
        .par_iter()
        .map(|(a, b)| {
            let d_in = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            if d_in < 1e-12 {
                return Ok(0.0);
            }
            Ok(dist(&f(a)?, &f(b)?)? / d_in)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max) * KAPPA_INFLATION)
}

/// Lipschitz constant of `v -> Exp(B v)` on the tangent ball of `radius`.
pub fn exp_lipschitz(rng: &mut ChaCha8Rng, frame: &Frame, radius: f64) -> Result<f64> {
    let dim = frame.dim();
    lipschitz_estimate(
        rng,
        |r| uniform_in_ball(r, dim, radius),
        |v| frame.exp(v),
        |a, b| distance(&frame.spec, a, b),
    )
}

pub fn euclid(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// `sup_i d(model(x_i), truth(x_i))` computed in parallel; the maximum is order independent.
pub fn sup_error(
    points: &[Vec<f64>],
    model: impl Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    truth: impl Fn(&[f64]) -> Result<Vec<f64>> + Sync,
    dist: impl Fn(&[f64], &[f64]) -> Result<f64> + Sync,
) -> Result<f64> {
    let errs = points
        .par_iter()
        .map(|x| dist(&model(x)?, &truth(x)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(errs.into_iter().fold(0.0, f64::max))
}
