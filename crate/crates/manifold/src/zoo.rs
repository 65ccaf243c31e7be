//! Closed-form exponential and logarithm maps, geodesic distances and tangent norms.
//!
//! Point and tangent conventions per geometry:
//!
//! * `euclidean:p` points and tangents are plain `p`-vectors.
//! * `sphere:p` and `rp:m` use unit vectors in the ambient space, with tangents
//!   given as ambient vectors orthogonal to the base point.
//! * `poincare:p:c` lives in the open ball of radius `1/sqrt(c)`; exp and log are
//!   Möbius translates of the maps at the origin.
//! * `spd:n` points and tangents are both upper-triangular coordinates of
//!   symmetric matrices, with the affine-invariant metric.
//! * `gaussian:n` points are `(mean, cov)` packed as mean followed by the
//!   triangular coordinates of the covariance. The chart replaces the covariance
//!   by its matrix logarithm and the geometry is the flat one pulled back through it.
//! * `torus:m` points are representatives in `[0,1)^m` of the flat torus.

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::linalg::{
    check_spd, sym_decode, sym_eigen, sym_encode, sym_matrix_function, Direction, Matrix, MatrixFn,
};
use crate::spec::{ManifoldKind, ManifoldSpec};

const UNIT_TOL: f64 = 1e-9;
const ORTHO_TOL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + yi).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_len(v: &[f64], want: usize, what: &str) -> Result<()> {
    if v.len() != want {
        return Err(Error::validation(format!("{what} has length {}, expected {want}", v.len())));
    }
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::validation(format!("{what} has a non-finite entry")));
    }
    Ok(())
}

/// Checks that `x` is a valid point of `spec`.
pub fn validate_point(spec: &ManifoldSpec, x: &[f64]) -> Result<()> {
    check_len(x, spec.point_len, "point")?;
    match spec.kind {
        ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } => {
            if (norm(x) - 1.0).abs() > UNIT_TOL {
                return Err(Error::validation(format!("point norm {} is not 1", norm(x))));
            }
        }
        ManifoldKind::Poincare { c, .. } => {
            if c * dot(x, x) >= 1.0 {
                return Err(Error::validation("point lies outside the Poincare ball"));
            }
        }
        ManifoldKind::Spd { .. } => {
            check_spd(&sym_encode(x)?)?;
        }
        ManifoldKind::Gaussian { n } => {
            check_spd(&sym_encode(&x[n..])?)?;
        }
        ManifoldKind::Torus { .. } => {
            if x.iter().any(|c| !(0.0..1.0).contains(c)) {
                return Err(Error::validation("torus representative outside [0,1)"));
            }
        }
        ManifoldKind::Euclidean { .. } => {}
    }
    Ok(())
}

/// Checks that `v` is a tangent vector at `x`.
pub fn validate_tangent(spec: &ManifoldSpec, x: &[f64], v: &[f64]) -> Result<()> {
    check_len(v, spec.chart_dim, "tangent")?;
    if let ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } = spec.kind {
        let d = dot(x, v);
        if d.abs() > ORTHO_TOL * norm(v).max(1.0) {
            return Err(Error::validation(format!("tangent is not orthogonal to base (dot {d:e})")));
        }
    }
    Ok(())
}

/// Riemannian norm of the tangent `v` at `x`.
///
/// Equal to the Euclidean norm of the representation except on `spd:n`, where it is
/// the affine-invariant norm `|A^{-1/2} V A^{-1/2}|_F`.
pub fn tangent_norm(spec: &ManifoldSpec, x: &[f64], v: &[f64]) -> Result<f64> {
    validate_tangent(spec, x, v)?;
    match spec.kind {
        ManifoldKind::Spd { .. } => {
            let a = sym_encode(x)?;
            let w = sym_encode(v)?;
            let is = sym_matrix_function(MatrixFn::InvSqrt, &a)?;
            Ok(is.matmul(&w).matmul(&is).frobenius())
        }
        _ => Ok(norm(v)),
    }
}

fn sphere_exp(x: &[f64], v: &[f64], radius: f64) -> Result<Vec<f64>> {
    let t = norm(v);
    if t >= radius {
        return Err(Error::OutOfInjectivity { norm: t, radius });
    }
    if t == 0.0 {
        return Ok(x.to_vec());
    }
    let y = axpy(t.sin() / t, v, &x.iter().map(|c| c * t.cos()).collect::<Vec<_>>());
    let n = norm(&y);
    Ok(y.iter().map(|c| c / n).collect())
}

/// Returns `(angle, unit direction)` of `y` seen from `x` on the unit sphere.
fn sphere_angle(x: &[f64], y: &[f64]) -> (f64, Vec<f64>) {
    let c = dot(x, y);
    let w = axpy(-c, x, y);
    let s = norm(&w);
    (s.atan2(c), w)
}

fn sphere_log(x: &[f64], y: &[f64], radius: f64) -> Result<Vec<f64>> {
    let (theta, w) = sphere_angle(x, y);
    let s = norm(&w);
    if theta >= radius || (s == 0.0 && dot(x, y) < 0.0) {
        return Err(Error::OutOfInjectivity { norm: theta, radius });
    }
    if s == 0.0 {
        return Ok(vec![0.0; x.len()]);
    }
    Ok(w.iter().map(|c| c * theta / s).collect())
}

/// Makes the first exactly-nonzero coordinate positive.
pub fn rp_sign_fix(x: &[f64]) -> Vec<f64> {
    match x.iter().find(|c| **c != 0.0) {
        Some(c) if *c < 0.0 => x.iter().map(|v| -v).collect(),
        _ => x.to_vec(),
    }
}

/// Möbius addition on the Poincaré ball with curvature scale `c`.
pub fn mobius_add(x: &[f64], y: &[f64], c: f64) -> Vec<f64> {
    let xy = dot(x, y);
    let xx = dot(x, x);
    let yy = dot(y, y);
    let a = 1.0 + 2.0 * c * xy + c * yy;
    let b = 1.0 - c * xx;
    let den = 1.0 + 2.0 * c * xy + c * c * xx * yy;
    x.iter().zip(y).map(|(xi, yi)| (a * xi + b * yi) / den).collect()
}

fn poincare_exp0(v: &[f64], c: f64) -> Vec<f64> {
    let t = norm(v);
    if t == 0.0 {
        return v.to_vec();
    }
    let k = c.sqrt();
    let s = (k * t / 2.0).tanh() / (k * t);
    v.iter().map(|vi| vi * s).collect()
}

fn poincare_log0(y: &[f64], c: f64) -> Vec<f64> {
    let t = norm(y);
    if t == 0.0 {
        return y.to_vec();
    }
    let k = c.sqrt();
    let s = 2.0 / k * (k * t).atanh() / t;
    y.iter().map(|yi| yi * s).collect()
}

fn neg(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| -v).collect()
}

fn spd_exp(x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let a = sym_encode(x)?;
    let w = sym_encode(v)?;
    let s = sym_matrix_function(MatrixFn::Sqrt, &a)?;
    let is = sym_matrix_function(MatrixFn::InvSqrt, &a)?;
    let inner = is.matmul(&w).matmul(&is).symmetrize();
    let e = sym_matrix_function(MatrixFn::Exp, &inner)?;
    sym_decode(&s.matmul(&e).matmul(&s).symmetrize())
}

fn spd_log(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let a = sym_encode(x)?;
    let b = sym_encode(y)?;
    let s = sym_matrix_function(MatrixFn::Sqrt, &a)?;
    let is = sym_matrix_function(MatrixFn::InvSqrt, &a)?;
    let inner = is.matmul(&b).matmul(&is).symmetrize();
    let l = sym_matrix_function(MatrixFn::Log, &inner)?;
    sym_decode(&s.matmul(&l).matmul(&s).symmetrize())
}

fn spd_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    let a = sym_encode(x)?;
    let b = sym_encode(y)?;
    let is = sym_matrix_function(MatrixFn::InvSqrt, &a)?;
    let inner = is.matmul(&b).matmul(&is).symmetrize();
    let eig = sym_eigen(&inner)?;
    if eig.min_value() <= 0.0 {
        return Err(Error::domain("second argument is not positive definite"));
    }
    Ok(eig.values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt())
}

fn torus_wrap(d: f64) -> f64 {
    d - d.round()
}

fn torus_frac(z: f64) -> f64 {
    let f = z - z.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Per-coordinate flat torus distance `sqrt(sum min(|d|, 1-|d|)^2)`.
pub fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b).abs();
            let m = d.min(1.0 - d);
            m * m
        })
        .sum::<f64>()
        .sqrt()
}

/// Canonical torus representative (fractional parts).
pub fn torus_canonical(z: &[f64]) -> Vec<f64> {
    z.iter().map(|v| torus_frac(*v)).collect()
}

/// Riemannian exponential at `x`.
pub fn exp_map(spec: &ManifoldSpec, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    validate_point(spec, x)?;
    validate_tangent(spec, x, v)?;
    match spec.kind {
        ManifoldKind::Euclidean { .. } => Ok(axpy(1.0, v, x)),
        ManifoldKind::Sphere { .. } => sphere_exp(x, v, std::f64::consts::PI),
        ManifoldKind::Rp { .. } => {
            Ok(rp_sign_fix(&sphere_exp(x, v, std::f64::consts::FRAC_PI_2)?))
        }
        ManifoldKind::Poincare { c, .. } => Ok(mobius_add(x, &poincare_exp0(v, c), c)),
        ManifoldKind::Spd { .. } => spd_exp(x, v),
        ManifoldKind::Gaussian { n } => {
            let chart = gaussian_encode_vec(x, n)?;
            gaussian_decode_vec(&axpy(1.0, v, &chart), n)
        }
        ManifoldKind::Torus { .. } => {
            let t = norm(v);
            if t >= 0.5 {
                return Err(Error::OutOfInjectivity { norm: t, radius: 0.5 });
            }
            Ok(torus_canonical(&axpy(1.0, v, x)))
        }
    }
}

/// Riemannian logarithm at `x`.
pub fn log_map(spec: &ManifoldSpec, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    validate_point(spec, x)?;
    validate_point(spec, y)?;
    match spec.kind {
        ManifoldKind::Euclidean { .. } => Ok(sub(y, x)),
        ManifoldKind::Sphere { .. } => sphere_log(x, y, std::f64::consts::PI),
        ManifoldKind::Rp { .. } => {
            let d = dot(x, y);
            let y = if d < 0.0 { neg(y) } else { y.to_vec() };
            sphere_log(x, &y, std::f64::consts::FRAC_PI_2)
        }
        ManifoldKind::Poincare { c, .. } => Ok(poincare_log0(&mobius_add(&neg(x), y, c), c)),
        ManifoldKind::Spd { .. } => spd_log(x, y),
        ManifoldKind::Gaussian { n } => {
            Ok(sub(&gaussian_encode_vec(y, n)?, &gaussian_encode_vec(x, n)?))
        }
        ManifoldKind::Torus { .. } => {
            let v: Vec<f64> = x.iter().zip(y).map(|(a, b)| torus_wrap(b - a)).collect();
            let t = norm(&v);
            if t >= 0.5 {
                return Err(Error::OutOfInjectivity { norm: t, radius: 0.5 });
            }
            Ok(v)
        }
    }
}

/// Geodesic distance.
pub fn distance(spec: &ManifoldSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    validate_point(spec, x)?;
    validate_point(spec, y)?;
    if x == y {
        return Ok(0.0);
    }
    match spec.kind {
        ManifoldKind::Euclidean { .. } => Ok(norm(&sub(x, y))),
        ManifoldKind::Sphere { .. } => Ok(sphere_angle(x, y).0),
        ManifoldKind::Rp { .. } => {
            let (theta, _) = sphere_angle(x, y);
            let (theta_neg, _) = sphere_angle(x, &neg(y));
            Ok(theta.min(theta_neg))
        }
        ManifoldKind::Poincare { c, .. } => {
            let k = c.sqrt();
            Ok(2.0 / k * (k * norm(&mobius_add(&neg(x), y, c))).atanh())
        }
        ManifoldKind::Spd { .. } => spd_distance(x, y),
        ManifoldKind::Gaussian { n } => {
            Ok(norm(&sub(&gaussian_encode_vec(x, n)?, &gaussian_encode_vec(y, n)?)))
        }
        ManifoldKind::Torus { .. } => Ok(torus_distance(x, y)),
    }
}

pub fn inj_lower(spec: &ManifoldSpec, x: &[f64]) -> ExtendedReal {
    spec.inj_lower(x)
}

/// Orthonormal basis of the tangent space at `x` as a `chart_dim x dim` matrix.
///
/// Identity except on spheres and projective spaces, where the columns span the
/// orthogonal complement of `x`.
pub fn tangent_basis(spec: &ManifoldSpec, x: &[f64]) -> Result<Matrix> {
    validate_point(spec, x)?;
    match spec.kind {
        ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } => {
            let d = spec.chart_dim;
            let skip = (0..d)
                .max_by(|a, b| x[*a].abs().total_cmp(&x[*b].abs()))
                .unwrap_or(0);
            let mut basis: Vec<Vec<f64>> = vec![x.to_vec()];
            for i in (0..d).filter(|i| *i != skip) {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(b, &e);
                        e = axpy(-c, b, &e);
                    }
                }
                let n = norm(&e);
                basis.push(e.iter().map(|v| v / n).collect());
            }
            let cols = &basis[1..];
            let mut m = Matrix::zeros(d, cols.len());
            for (j, col) in cols.iter().enumerate() {
                for i in 0..d {
                    m[(i, j)] = col[i];
                }
            }
            Ok(m)
        }
        _ => Ok(Matrix::identity(spec.chart_dim)),
    }
}

/// A non-degenerate Gaussian measure.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParam {
    pub mean: Vec<f64>,
    pub cov: Matrix,
}

impl GaussianParam {
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        if !cov.is_square() || cov.rows() != mean.len() {
            return Err(Error::validation("covariance order does not match mean length"));
        }
        check_spd(&cov)?;
        Ok(GaussianParam { mean, cov })
    }

    pub fn order(&self) -> usize {
        self.mean.len()
    }

    /// Packs into the point representation used by `gaussian:n`.
    pub fn to_point(&self) -> Result<Vec<f64>> {
        let mut v = self.mean.clone();
        v.extend(sym_decode(&self.cov)?);
        Ok(v)
    }

    pub fn from_point(v: &[f64], n: usize) -> Result<Self> {
        if v.len() != n + n * (n + 1) / 2 {
            return Err(Error::validation("gaussian point has wrong length"));
        }
        GaussianParam::new(v[..n].to_vec(), sym_encode(&v[n..])?)
    }
}

/// Argument or result of [`gaussian_chart`].
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianArg {
    Param(GaussianParam),
    Vector(Vec<f64>),
}

/// `(mean, cov) <-> (mean, triangular coordinates of log cov)`.
pub fn gaussian_chart(direction: Direction, arg: GaussianArg) -> Result<GaussianArg> {
    match (direction, arg) {
        (Direction::Encode, GaussianArg::Param(g)) => {
            let mut v = g.mean.clone();
            v.extend(sym_decode(&sym_matrix_function(MatrixFn::Log, &g.cov)?)?);
            Ok(GaussianArg::Vector(v))
        }
        (Direction::Decode, GaussianArg::Vector(v)) => {
            let tri = v.len();
            let n = (1..=tri).find(|n| n + n * (n + 1) / 2 >= tri).unwrap_or(0);
            if n == 0 || n + n * (n + 1) / 2 != tri {
                return Err(Error::validation(format!("length {tri} is not n + n(n+1)/2")));
            }
            let cov = sym_matrix_function(MatrixFn::Exp, &sym_encode(&v[n..])?)?;
            Ok(GaussianArg::Param(GaussianParam { mean: v[..n].to_vec(), cov }))
        }
        _ => Err(Error::validation("encode takes a Gaussian, decode takes a vector")),
    }
}

fn gaussian_encode_vec(point: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut v = point[..n].to_vec();
    v.extend(sym_decode(&sym_matrix_function(MatrixFn::Log, &sym_encode(&point[n..])?)?)?);
    Ok(v)
}

fn gaussian_decode_vec(chart: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut v = chart[..n].to_vec();
    v.extend(sym_decode(&sym_matrix_function(MatrixFn::Exp, &sym_encode(&chart[n..])?)?)?);
    Ok(v)
}

/// Wasserstein-2 distance between Gaussians.
///
/// The Bures term is evaluated as `|S1 - S2 Q^T|_F^2` with `S_i = cov_i^{1/2}` and `Q`
/// the orthogonal polar factor of `S1 S2`; this equals
/// `tr(cov1 + cov2 - 2 (S1 cov2 S1)^{1/2})` and vanishes exactly for equal inputs.
pub fn wasserstein2(a: &GaussianParam, b: &GaussianParam) -> Result<f64> {
    if a.order() != b.order() {
        return Err(Error::validation("Gaussian orders differ"));
    }
    let dm = norm(&sub(&a.mean, &b.mean));
    let s1 = sym_matrix_function(MatrixFn::Sqrt, &a.cov)?;
    let s2 = sym_matrix_function(MatrixFn::Sqrt, &b.cov)?;
    let m = s1.matmul(&s2);
    let mtm = m.transpose().matmul(&m).symmetrize();
    let q = m.matmul(&sym_matrix_function(MatrixFn::InvSqrt, &mtm)?);
    let bures = s1.sub(&s2.matmul(&q.transpose())).frobenius();
    Ok((dm * dm + bures * bures).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::resolve_manifold;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sphere_examples() {
        let s = resolve_manifold("sphere:2").unwrap();
        let e3 = [0.0, 0.0, 1.0];
        assert_eq!(exp_map(&s, &e3, &[0.0; 3]).unwrap(), e3.to_vec());
        let y = exp_map(&s, &e3, &[FRAC_PI_2, 0.0, 0.0]).unwrap();
        assert!(close(&y, &[1.0, 0.0, 0.0], 1e-15));
        let v = log_map(&s, &e3, &[1.0, 0.0, 0.0]).unwrap();
        assert!(close(&v, &[FRAC_PI_2, 0.0, 0.0], 1e-15));
        let d = distance(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn sphere_errors() {
        let s = resolve_manifold("sphere:2").unwrap();
        let e3 = [0.0, 0.0, 1.0];
        assert!(matches!(exp_map(&s, &e3, &[PI, 0.0, 0.0]), Err(Error::OutOfInjectivity { .. })));
        assert!(matches!(exp_map(&s, &e3, &[0.0, 0.0, 0.1]), Err(Error::Validation(_))));
        assert!(matches!(log_map(&s, &e3, &[0.0, 0.0, -1.0]), Err(Error::OutOfInjectivity { .. })));
    }

    #[test]
    fn log_of_self_is_zero() {
        for id in ["euclidean:2", "sphere:2", "poincare:2:1", "spd:2", "gaussian:1", "torus:2", "rp:2"] {
            let s = resolve_manifold(id).unwrap();
            let x: Vec<f64> = match s.kind {
                ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } => vec![0.0, 0.6, 0.8],
                ManifoldKind::Spd { .. } => vec![2.0, 0.5, 1.0],
                ManifoldKind::Gaussian { .. } => vec![0.3, 2.0],
                _ => vec![0.25, 0.5],
            };
            let v = log_map(&s, &x, &x).unwrap();
            assert!(v.iter().all(|c| c.abs() < 1e-14), "{id}: {v:?}");
        }
    }

    #[test]
    fn spd_examples() {
        let s = resolve_manifold("spd:2").unwrap();
        let i2 = [1.0, 0.0, 1.0];
        let e2 = 2f64.exp();
        let y = exp_map(&s, &i2, &[2.0, 0.0, 0.0]).unwrap();
        assert!(close(&y, &[e2, 0.0, 1.0], 1e-12));
        let v = log_map(&s, &i2, &[e2, 0.0, 1.0]).unwrap();
        assert!(close(&v, &[2.0, 0.0, 0.0], 1e-12));
        let d = distance(&s, &i2, &[e2, 0.0, 1.0]).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn poincare_distance_example() {
        let s = resolve_manifold("poincare:2:1").unwrap();
        let d = distance(&s, &[0.0, 0.0], &[0.5, 0.0]).unwrap();
        assert!((d - 2.0 * 0.5f64.atanh()).abs() < 1e-15);
        assert!((d - 1.0986123).abs() < 1e-7);
    }

    #[test]
    fn rp_distance_identifies_antipodes() {
        let s = resolve_manifold("rp:2").unwrap();
        let d = distance(&s, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(distance(&s, &[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let s = resolve_manifold("sphere:3").unwrap();
        let x = [0.5, 0.5, 0.5, 0.5];
        let b = tangent_basis(&s, &x).unwrap();
        assert_eq!((b.rows(), b.cols()), (4, 3));
        let btb = b.transpose().matmul(&b);
        assert!(btb.sub(&Matrix::identity(3)).frobenius() < 1e-14);
        assert!(b.transpose().matvec(&x).iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn gaussian_chart_examples() {
        let zero = gaussian_chart(Direction::Decode, GaussianArg::Vector(vec![0.0; 5])).unwrap();
        assert_eq!(
            zero,
            GaussianArg::Param(GaussianParam { mean: vec![0.0; 2], cov: Matrix::identity(2) })
        );
        let g = GaussianParam::new(vec![0.0, 0.0], Matrix::diag(&[2f64.exp(), 1.0])).unwrap();
        match gaussian_chart(Direction::Encode, GaussianArg::Param(g)).unwrap() {
            GaussianArg::Vector(v) => assert!(close(&v, &[0.0, 0.0, 2.0, 0.0, 0.0], 1e-12)),
            other => panic!("{other:?}"),
        }
        assert!(gaussian_chart(Direction::Decode, GaussianArg::Vector(vec![0.0; 4])).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        let id = GaussianParam::new(vec![0.0, 0.0], Matrix::identity(2)).unwrap();
        assert_eq!(wasserstein2(&id, &id).unwrap(), 0.0);
        let shifted = GaussianParam::new(vec![3.0, 4.0], Matrix::identity(2)).unwrap();
        assert!((wasserstein2(&id, &shifted).unwrap() - 5.0).abs() < 1e-10);
        let a = GaussianParam::new(vec![0.0; 3], Matrix::identity(3).scale(4.0)).unwrap();
        let b = GaussianParam::new(vec![0.0; 3], Matrix::identity(3).scale(0.25)).unwrap();
        assert!((wasserstein2(&a, &b).unwrap() - 3f64.sqrt() * 1.5).abs() < 1e-12);
        let c = GaussianParam::new(vec![0.0; 2], Matrix::identity(3)).unwrap_err();
        assert!(matches!(c, Error::Validation(_)));
    }
}
