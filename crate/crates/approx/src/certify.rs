//! Normalizability and efficiency checks for finite datasets.

use gdn_manifold::zoo::tangent_basis;
use gdn_manifold::{distance, log_map, Error, ExtendedReal, ManifoldSpec, Result};
use serde::{Deserialize, Serialize};

use crate::poly::{binomial, multi_indices, Polynomial};

pub const INTERPOLATION_TOL: f64 = 1e-8;
const HULL_GRID: usize = 1001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyCertificate {
    pub normalizable: bool,
    pub witness_base: Vec<f64>,
    /// Per-coordinate `[min(0, lo), hi]` of the chart image of the dataset.
    pub witness_box: Vec<(f64, f64)>,
    pub n: Option<usize>,
    #[serde(rename = "M")]
    pub m_const: Option<f64>,
    /// Largest subset size checked; saturates at the dataset size.
    pub c_star: usize,
    pub interpolation_residual: Option<f64>,
    /// Largest `|d^beta p_c(x_c)_i|` over the checked orders.
    pub max_derivative: Option<f64>,
    /// Smallest constant satisfying the pairwise compatibility inequalities.
    pub compatibility_constant: Option<f64>,
    pub chart_points: Vec<Vec<f64>>,
    pub chart_values: Vec<Vec<f64>>,
    /// One polynomial per output coordinate for the interpolation path.
    pub polynomials: Option<Vec<Polynomial>>,
    pub notes: Vec<String>,
}

/// Coordinates of `Log_base(y)` in an orthonormal tangent basis.
fn intrinsic_log(spec: &ManifoldSpec, base: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let d = distance(spec, base, y)?;
    if let ExtendedReal::Finite(r) = spec.inj_lower(base) {
        if d >= r {
            return Err(Error::OutsideBall { distance: d, radius: r });
        }
    }
    let v = log_map(spec, base, y)?;
    Ok(tangent_basis(spec, base)?.transpose().matvec(&v))
}

/// `C* = min(#X, (C + 1)^(2^C))` with `C = binom(p + np, p)`.
pub fn c_star(count: usize, p: usize, n: usize) -> usize {
    let c = binomial((p + n * p) as u64, p as u64);
    let log_bound = c.exp2() * (c + 1.0).ln();
    if log_bound >= (count as f64).ln() {
        count
    } else {
        ((c + 1.0).powf(c.exp2()) + 1e-9).floor() as usize
    }
}

fn lagrange(points: &[f64], values: &[Vec<f64>], m: usize) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::zero(1); m];
    for (c, xc) in points.iter().enumerate() {
        let mut basis = Polynomial::constant(1, 1.0);
        for (j, xj) in points.iter().enumerate() {
            if j != c {
                let factor = Polynomial::from_terms(1, [(vec![1], 1.0), (vec![0], -xj)]).expect("1-D");
                basis = basis.mul(&factor).scale(1.0 / (xc - xj));
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.add(&basis.scale(values[c][i]));
        }
    }
    out
}

fn residual(polys: &[Polynomial], points: &[Vec<f64>], values: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(values)
        .flat_map(|(x, y)| polys.iter().zip(y).map(move |(q, t)| (q.eval(x) - t).abs()))
        .fold(0.0, f64::max)
}

#[allow(clippy::too_many_arguments)]
pub fn certify_efficient(
    dataset: &[Vec<f64>],
    values: &[Vec<f64>],
    domain: &ManifoldSpec,
    codomain: &ManifoldSpec,
    base_x: &[f64],
    base_y: &[f64],
    candidates: Option<&[Vec<Polynomial>]>,
    n: Option<usize>,
) -> Result<EfficiencyCertificate> {
    if dataset.is_empty() {
        return Err(Error::validation("dataset is empty"));
    }
    if dataset.len() != values.len() {
        return Err(Error::validation(format!(
            "{} points but {} values",
            dataset.len(),
            values.len()
        )));
    }
    let p = domain.dim;
    let m = codomain.dim;
    let chart_points = dataset
        .iter()
        .map(|x| intrinsic_log(domain, base_x, x))
        .collect::<Result<Vec<_>>>()?;
    let chart_values = values
        .iter()
        .map(|y| intrinsic_log(codomain, base_y, y))
        .collect::<Result<Vec<_>>>()?;
    let witness_box: Vec<(f64, f64)> = (0..p)
        .map(|k| {
            let lo = chart_points.iter().map(|z| z[k]).fold(0.0, f64::min);
            let hi = chart_points.iter().map(|z| z[k]).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let normalizable = witness_box.iter().all(|(lo, hi)| *lo >= 0.0 && *hi <= 1.0);
    let mut cert = EfficiencyCertificate {
        normalizable,
        witness_base: base_x.to_vec(),
        witness_box,
        n: None,
        m_const: None,
        c_star: dataset.len(),
        interpolation_residual: None,
        max_derivative: None,
        compatibility_constant: None,
        chart_points,
        chart_values,
        polynomials: None,
        notes: Vec::new(),
    };
    if !normalizable {
        cert.notes.push("chart image of the dataset is not contained in the unit cube".into());
        return Ok(cert);
    }
    match candidates {
        None if p == 1 => certify_lagrange(cert, m),
        None => Err(Error::unsupported(format!(
            "no interpolation construction for p = {p} > 1: the coordinate products (z - y) are vectors, so supply candidate polynomials and n"
        ))),
        Some(cands) => {
            let n = n.ok_or_else(|| Error::validation("candidate polynomials need an efficiency order n"))?;
            certify_candidates(cert, cands, p, m, n)
        }
    }
}

fn certify_lagrange(mut cert: EfficiencyCertificate, m: usize) -> Result<EfficiencyCertificate> {
    let mut points: Vec<f64> = Vec::new();
    let mut vals: Vec<Vec<f64>> = Vec::new();
    for (z, y) in cert.chart_points.iter().zip(&cert.chart_values) {
        match points.iter().position(|q| *q == z[0]) {
            Some(k) if vals[k] == *y => {}
            Some(_) => return Err(Error::validation(format!("two values at the chart point {}", z[0]))),
            None => {
                points.push(z[0]);
                vals.push(y.clone());
            }
        }
    }
    let count = points.len();
    if count < cert.chart_points.len() {
        cert.notes.push(format!("{} repeated points merged", cert.chart_points.len() - count));
    }
    let polys = if count == 1 {
        cert.notes.push("singleton dataset: constant polynomial, compatibility vacuous".into());
        vals[0].iter().map(|v| Polynomial::constant(1, *v)).collect()
    } else {
        lagrange(&points, &vals, m)
    };
    let n = (count - 1).max(1);
    let diam = points
        .iter()
        .flat_map(|a| points.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    let radius = points.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let hull_max = (0..HULL_GRID)
        .map(|k| -radius + 2.0 * radius * k as f64 / (HULL_GRID - 1) as f64)
        .map(|z| polys.iter().map(|q| q.eval(&[z]).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let max_order = count as u32;
    let derivs: Vec<Vec<Polynomial>> = (0..=max_order)
        .map(|k| polys.iter().map(|q| q.derivative(&[k])).collect())
        .collect();
    let mut max_derivative = 0.0f64;
    let mut deriv_sum = 0.0f64;
    for z in &points {
        let mut s = 0.0;
        for level in &derivs {
            for q in level {
                let v = q.eval(&[*z]).abs();
                max_derivative = max_derivative.max(v);
                s += v;
            }
        }
        deriv_sum = deriv_sum.max(s);
    }
    let big_m = 2.0 * diam * hull_max + deriv_sum;
    cert.interpolation_residual = Some(residual(&polys, &cert.chart_points, &cert.chart_values));
    cert.max_derivative = Some(max_derivative);
    cert.compatibility_constant = Some(0.0);
    cert.m_const = Some(big_m);
    cert.n = Some(n);
    cert.c_star = c_star(count, 1, n);
    cert.polynomials = Some(polys);
    Ok(cert)
}

fn certify_candidates(
    mut cert: EfficiencyCertificate,
    cands: &[Vec<Polynomial>],
    p: usize,
    m: usize,
    n: usize,
) -> Result<EfficiencyCertificate> {
    let count = cert.chart_points.len();
    if cands.len() != count {
        return Err(Error::validation(format!("{} candidates for {count} points", cands.len())));
    }
    let order = (n * p) as u32;
    for (c, cand) in cands.iter().enumerate() {
        if cand.len() != m || cand.iter().any(|q| q.dim != p) {
            return Err(Error::validation(format!("candidate {c} must have {m} polynomials in {p} variables")));
        }
        if let Some(q) = cand.iter().find(|q| q.degree() > order) {
            cert.notes.push(format!("candidate {c} has degree {} > np = {order}", q.degree()));
        }
    }
    cert.c_star = c_star(count, p, n);
    let points = &cert.chart_points;
    let betas = multi_indices(p, order);
    let mut res = 0.0f64;
    let mut max_derivative = 0.0f64;
    let mut compat = 0.0f64;
    for c in 0..count {
        let own = std::slice::from_ref(&points[c]);
        res = res.max(residual(&cands[c], own, std::slice::from_ref(&cert.chart_values[c])));
        for beta in &betas {
            for q in &cands[c] {
                max_derivative = max_derivative.max(q.derivative(beta).eval(&points[c]).abs());
            }
        }
        for j in 0..count {
            if j == c {
                continue;
            }
            let dist = points[c].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            for beta in &betas {
                let exponent = order as i32 - beta.iter().sum::<u32>() as i32;
                for (qc, qj) in cands[c].iter().zip(&cands[j]) {
                    let gap = qc.add(&qj.scale(-1.0)).derivative(beta).eval(&points[c]).abs();
                    if gap == 0.0 {
                        continue;
                    }
                    if dist == 0.0 {
                        cert.notes.push(format!("points {c} and {j} coincide but their candidates differ"));
                        compat = f64::INFINITY;
                    } else {
                        compat = compat.max(gap / dist.powi(exponent));
                    }
                }
            }
        }
    }
    cert.interpolation_residual = Some(res);
    cert.max_derivative = Some(max_derivative);
    cert.compatibility_constant = Some(compat);
    if res > INTERPOLATION_TOL {
        cert.notes.push(format!("interpolation residual {res:e} exceeds {INTERPOLATION_TOL:e}"));
    }
    if !compat.is_finite() {
        cert.notes.push("no finite constant satisfies the compatibility inequalities".into());
    }
    if cert.notes.is_empty() {
        cert.m_const = Some(max_derivative.max(compat));
        cert.n = Some(n);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gdn_manifold::resolve_manifold;

    fn line() -> ManifoldSpec {
        resolve_manifold("euclidean:1").unwrap()
    }

    #[test]
    fn three_point_lagrange() {
        let xs = vec![vec![0.0], vec![0.5], vec![1.0]];
        let ys = vec![vec![0.0], vec![0.25], vec![1.0]];
        let cert = certify_efficient(&xs, &ys, &line(), &line(), &[0.0], &[0.0], None, None).unwrap();
        assert!(cert.normalizable);
        assert_eq!(cert.n, Some(2));
        assert!(cert.interpolation_residual.unwrap() <= 1e-12);
        let q = &cert.polynomials.as_ref().unwrap()[0];
        for z in [-0.3, 0.2, 0.7] {
            assert!((q.eval(&[z]) - z * z).abs() < 1e-12);
        }
        assert!(cert.m_const.unwrap() >= cert.max_derivative.unwrap());
        assert_eq!(cert.c_star, 3);
    }

    #[test]
    fn singleton_is_constant() {
        let cert = certify_efficient(&[vec![0.3]], &[vec![2.0]], &line(), &line(), &[0.0], &[0.0], None, None).unwrap();
        assert_eq!(cert.n, Some(1));
        assert_eq!(cert.polynomials.unwrap()[0].degree(), 0);
        assert_eq!(cert.compatibility_constant, Some(0.0));
    }

    #[test]
    fn denormalized_box() {
        let plane = resolve_manifold("euclidean:2").unwrap();
        let xs = vec![vec![1.2, 0.3], vec![0.5, 0.1]];
        let ys = vec![vec![0.0], vec![1.0]];
        let cert = certify_efficient(&xs, &ys, &plane, &line(), &[0.0, 0.0], &[0.0], None, None).unwrap();
        assert!(!cert.normalizable);
        assert_eq!(cert.witness_box, vec![(0.0, 1.2), (0.0, 0.3)]);
        assert_eq!(cert.n, None);
    }

    #[test]
    fn guards() {
        let plane = resolve_manifold("euclidean:2").unwrap();
        let xs = vec![vec![0.2, 0.3]];
        let r = certify_efficient(&xs, &[vec![0.0]], &plane, &line(), &[0.0, 0.0], &[0.0], None, None);
        assert!(matches!(r, Err(Error::Unsupported(_))));
        let sphere = resolve_manifold("sphere:2").unwrap();
        let r = certify_efficient(
            &[vec![0.0, 0.0, -1.0]],
            &[vec![0.0]],
            &sphere,
            &line(),
            &[0.0, 0.0, 1.0],
            &[0.0],
            None,
            None,
        );
        assert!(matches!(r, Err(Error::OutsideBall { .. })));
    }

    #[test]
    fn candidate_path() {
        let plane = resolve_manifold("euclidean:2").unwrap();
        let xs = vec![vec![0.1, 0.2], vec![0.5, 0.9], vec![0.7, 0.4]];
        let f = |z: &[f64]| z[0] * z[1] + z[0];
        let ys: Vec<Vec<f64>> = xs.iter().map(|z| vec![f(z)]).collect();
        let shared = Polynomial::from_terms(2, [(vec![1, 1], 1.0), (vec![1, 0], 1.0)]).unwrap();
        let cands = vec![vec![shared.clone()]; 3];
        let cert = certify_efficient(&xs, &ys, &plane, &line(), &[0.0, 0.0], &[0.0], Some(&cands), Some(1)).unwrap();
        assert_eq!(cert.n, Some(1));
        assert_eq!(cert.compatibility_constant, Some(0.0));
        assert!(cert.interpolation_residual.unwrap() < 1e-15);
        let mut bad = cands.clone();
        bad[1] = vec![shared.add(&Polynomial::constant(2, 0.1))];
        let cert = certify_efficient(&xs, &ys, &plane, &line(), &[0.0, 0.0], &[0.0], Some(&bad), Some(1)).unwrap();
        assert_eq!(cert.n, None);
        assert!(!cert.notes.is_empty());
    }

    #[test]
    fn c_star_saturates() {
        assert_eq!(c_star(1000, 1, 1), 81);
        assert_eq!(c_star(81, 1, 1), 81);
        assert_eq!(c_star(5, 2, 3), 5);
    }
}
