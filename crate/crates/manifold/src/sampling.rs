//! Seeded random points and tangents, plus Halton low-discrepancy sequences.

use rand::Rng;

use crate::error::Result;
use crate::linalg::{sym_decode, Matrix};
use crate::spec::{ManifoldKind, ManifoldSpec};
use crate::zoo::{dot, norm, rp_sign_fix, tangent_norm};

/// Standard normal draw by Box-Muller.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

fn unit_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, n);
        let s = norm(&v);
        if s > 1e-8 {
            return v.iter().map(|c| c / s).collect();
        }
    }
}

/// Random SPD matrix `B B^T + I/2` with entries of `B` uniform in `[-1, 1]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let b = Matrix::from_vec(n, n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .expect("square data");
    b.matmul(&b.transpose()).add(&Matrix::identity(n).scale(0.5)).symmetrize()
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < n {
        let mut v = gaussian_vec(rng, n);
        for _ in 0..2 {
            for c in &cols {
                let d = dot(c, &v);
                v.iter_mut().zip(c).for_each(|(vi, ci)| *vi -= d * ci);
            }
        }
        let s = norm(&v);
        if s > 1e-6 {
            cols.push(v.iter().map(|c| c / s).collect());
        }
    }
    let mut m = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = c[i];
        }
    }
    m
}

/// A random valid point of `spec`.
pub fn random_point<R: Rng + ?Sized>(spec: &ManifoldSpec, rng: &mut R) -> Vec<f64> {
    match spec.kind {
        ManifoldKind::Euclidean { p } => (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        ManifoldKind::Sphere { p } => unit_vec(rng, p + 1),
        ManifoldKind::Rp { m } => rp_sign_fix(&unit_vec(rng, m + 1)),
        ManifoldKind::Poincare { p, c } => {
            let r = rng.gen_range(0.0..0.5) / c.sqrt();
            unit_vec(rng, p).iter().map(|v| v * r).collect()
        }
        ManifoldKind::Spd { n } => sym_decode(&random_spd(rng, n)).expect("symmetric"),
        ManifoldKind::Gaussian { n } => {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            v.extend(sym_decode(&random_spd(rng, n)).expect("symmetric"));
            v
        }
        ManifoldKind::Torus { m } => (0..m).map(|_| rng.gen::<f64>()).collect(),
    }
}

/// A random tangent at `x` whose Riemannian norm is uniform in `[0, max_norm)`.
pub fn random_tangent<R: Rng + ?Sized>(
    spec: &ManifoldSpec,
    x: &[f64],
    max_norm: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut dir = gaussian_vec(rng, spec.chart_dim);
    if let ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } = spec.kind {
        for _ in 0..2 {
            let d = dot(&dir, x);
            dir.iter_mut().zip(x).for_each(|(v, xi)| *v -= d * xi);
        }
    }
    let s = tangent_norm(spec, x, &dir)?;
    let t = rng.gen::<f64>() * max_norm;
    Ok(dir.iter().map(|v| v * t / s).collect())
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in base `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += (index % b) as f64 * f;
        index /= b;
        f *= inv;
    }
    r
}

/// The `index`-th Halton point in `[0,1)^dim` (index 0 is skipped by callers that
/// want to avoid the origin).
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension above {}", PRIMES.len());
    (0..dim).map(|k| radical_inverse(index, PRIMES[k])).collect()
}

/// `count` Halton points mapped to the closed ball of `radius` in `R^dim` by rejection
/// from the enclosing cube. The centre is always included first.
pub fn halton_ball(count: usize, dim: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; dim]];
    let mut i = 1u64;
    while out.len() < count {
        let u: Vec<f64> = halton(i, dim).iter().map(|h| radius * (2.0 * h - 1.0)).collect();
        if norm(&u) <= radius {
            out.push(u);
        }
        i += 1;
    }
    out.truncate(count);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::resolve_manifold;
    use crate::zoo::validate_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_points_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in ["euclidean:3", "sphere:2", "poincare:2:0.5", "spd:3", "gaussian:2", "torus:2", "rp:3"] {
            let s = resolve_manifold(id).unwrap();
            for _ in 0..20 {
                let x = random_point(&s, &mut rng);
                validate_point(&s, &x).unwrap();
                let v = random_tangent(&s, &x, 0.4, &mut rng).unwrap();
                assert!(tangent_norm(&s, &x, &v).unwrap() < 0.4 + 1e-12);
            }
        }
    }

    #[test]
    fn halton_first_points() {
        assert_eq!(halton(1, 2), vec![0.5, 1.0 / 3.0]);
        assert_eq!(halton(2, 2), vec![0.25, 2.0 / 3.0]);
        let b = halton_ball(50, 3, 2.0);
        assert_eq!(b.len(), 50);
        assert!(b.iter().all(|u| norm(u) <= 2.0));
    }
}
