//! Multivariate polynomials and their rewriting as sums of univariate polynomials in
//! linear forms.

use std::collections::BTreeMap;

use gdn_manifold::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

/// Sparse polynomial in `dim` variables; terms are merged and sorted by exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial::from_terms(dim, [(vec![0; dim], c)]).expect("well formed")
    }

    /// Coordinate `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Polynomial::from_terms(dim, [(e, 1.0)]).expect("well formed")
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::validation(format!("monomial has {} exponents, expected {dim}", e.len())));
            }
            if !c.is_finite() {
                return Err(Error::validation("non-finite polynomial coefficient"));
            }
            *map.entry(e).or_insert(0.0) += c;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(exponents, coeff)| Monomial { exponents, coeff })
            .collect();
        Ok(Polynomial { dim, terms })
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.exponents.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.exponents.iter().zip(x).map(|(e, v)| v.powi(*e as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let all = self.terms.iter().chain(&other.terms).map(|t| (t.exponents.clone(), t.coeff));
        Polynomial::from_terms(self.dim, all).expect("same dimension")
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let e = a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect();
                out.push((e, a.coeff * b.coeff));
            }
        }
        Polynomial::from_terms(self.dim, out).expect("same dimension")
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::from_terms(self.dim, self.terms.iter().map(|t| (t.exponents.clone(), s * t.coeff)))
            .expect("same dimension")
    }

    /// Partial derivative of multi-order `beta`.
    pub fn derivative(&self, beta: &[u32]) -> Polynomial {
        let mut out = Vec::new();
        'terms: for t in &self.terms {
            let mut c = t.coeff;
            let mut e = t.exponents.clone();
            for (ei, bi) in e.iter_mut().zip(beta) {
                if *bi > *ei {
                    continue 'terms;
                }
                for j in 0..*bi {
                    c *= (*ei - j) as f64;
                }
                *ei -= bi;
            }
            out.push((e, c));
        }
        Polynomial::from_terms(self.dim, out).expect("same dimension")
    }
}

/// All multi-indices in `dim` variables with total order at most `max`.
pub fn multi_indices(dim: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; dim]];
    for i in 0..dim {
        let mut next = Vec::new();
        for base in &out {
            let used: u32 = base.iter().sum();
            for k in 0..=(max - used) {
                let mut e = base.clone();
                e[i] = k;
                next.push(e);
            }
        }
        out = next;
    }
    out.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    out
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `z -> sum_k coeffs[k] <direction, z>^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTerm {
    pub direction: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl LinearTerm {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = self.direction.iter().zip(x).map(|(a, b)| a * b).sum();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFormPoly {
    pub dim: usize,
    pub terms: Vec<LinearTerm>,
    /// `C(dim - 1 + degree, degree)`, the reference term count for comparison.
    pub term_bound: f64,
}

impl LinearFormPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(LinearTerm::degree).max().unwrap_or(0)
    }
}

/// Rewrites `poly` as `sum_i p_i(<a_i, x>)`.
///
/// Each monomial `x^alpha` of degree `k` is expanded by polarization,
/// `y_1...y_k = (2^k k!)^-1 sum_{e in {-1,1}^k} (prod e) (sum e_j y_j)^k`, grouping sign
/// patterns by the integer direction they produce. Directions `a` and `-a` are merged.
/// Monomials in a single variable keep the coordinate direction.
pub fn decompose_polynomial(poly: &Polynomial) -> LinearFormPoly {
    let p = poly.dim;
    let k_max = poly.degree() as usize;
    let mut forms: BTreeMap<Vec<i64>, Vec<f64>> = BTreeMap::new();
    let mut constant = 0.0;
    for t in &poly.terms {
        let k: u32 = t.exponents.iter().sum();
        if k == 0 {
            constant += t.coeff;
            continue;
        }
        let support: Vec<usize> = (0..p).filter(|i| t.exponents[*i] > 0).collect();
        if support.len() == 1 {
            let mut d = vec![0i64; p];
            d[support[0]] = 1;
            add_power(&mut forms, d, k as usize, t.coeff, k_max);
            continue;
        }
        let norm = 1.0 / (2f64.powi(k as i32) * (1..=k).map(f64::from).product::<f64>());
        let alpha: Vec<u32> = support.iter().map(|i| t.exponents[*i]).collect();
        let mut s = vec![0u32; alpha.len()];
        loop {
            let mut d = vec![0i64; p];
            let mut weight = 1.0;
            for (j, i) in support.iter().enumerate() {
                d[*i] = 2 * s[j] as i64 - alpha[j] as i64;
                weight *= binomial(alpha[j] as u64, s[j] as u64);
                if (alpha[j] - s[j]) % 2 == 1 {
                    weight = -weight;
                }
            }
            if d.iter().any(|v| *v != 0) {
                add_power(&mut forms, d, k as usize, t.coeff * weight * norm, k_max);
            }
            let mut j = 0;
            while j < s.len() && s[j] == alpha[j] {
                s[j] = 0;
                j += 1;
            }
            if j == s.len() {
                break;
            }
            s[j] += 1;
        }
    }
    forms.retain(|_, c| c.iter().any(|v| *v != 0.0));
    if forms.is_empty() {
        let mut d = vec![0i64; p];
        if p > 0 {
            d[0] = 1;
        }
        forms.insert(d, vec![0.0; k_max + 1]);
    }
    let mut terms: Vec<LinearTerm> = forms
        .into_iter()
        .rev()
        .map(|(d, mut coeffs)| {
            let deg = coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0);
            coeffs.truncate(deg + 1);
            LinearTerm { direction: d.iter().map(|v| *v as f64).collect(), coeffs }
        })
        .collect();
    terms[0].coeffs[0] += constant;
    let term_bound = binomial((p + k_max).saturating_sub(1) as u64, k_max as u64);
    LinearFormPoly { dim: p, terms, term_bound }
}

fn add_power(forms: &mut BTreeMap<Vec<i64>, Vec<f64>>, mut d: Vec<i64>, k: usize, c: f64, k_max: usize) {
    let lead = d.iter().find(|v| **v != 0).copied().unwrap_or(1);
    let mut c = c;
    if lead < 0 {
        d.iter_mut().for_each(|v| *v = -*v);
        if k % 2 == 1 {
            c = -c;
        }
    }
    forms.entry(d).or_insert_with(|| vec![0.0; k_max + 1])[k] += c;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_check(poly: &Polynomial, lf: &LinearFormPoly) {
        let k = poly.degree().max(1) as usize;
        let pts = k + 1;
        let total = pts.pow(poly.dim as u32);
        for idx in 0..total {
            let mut r = idx;
            let x: Vec<f64> = (0..poly.dim)
                .map(|_| {
                    let v = (r % pts) as f64 / k as f64 * 2.0 - 1.0;
                    r /= pts;
                    v
                })
                .collect();
            assert!((poly.eval(&x) - lf.eval(&x)).abs() <= 1e-8, "{x:?}");
        }
    }

    #[test]
    fn univariate_single_term() {
        let p = Polynomial::from_terms(2, [(vec![0, 0], 1.0), (vec![1, 0], -2.0), (vec![3, 0], 0.5)]).unwrap();
        let lf = decompose_polynomial(&p);
        assert_eq!(lf.terms.len(), 1);
        assert_eq!(lf.terms[0].direction, vec![1.0, 0.0]);
        assert_eq!(lf.terms[0].coeffs, vec![1.0, -2.0, 0.0, 0.5]);
        grid_check(&p, &lf);
    }

    #[test]
    fn product_polarizes_into_two_squares() {
        let p = Polynomial::from_terms(2, [(vec![1, 1], 1.0)]).unwrap();
        let lf = decompose_polynomial(&p);
        assert_eq!(lf.terms.len(), 2);
        for t in &lf.terms {
            assert_eq!(t.degree(), 2);
            assert!((t.coeffs[2].abs() - 0.25).abs() < 1e-15);
        }
        grid_check(&p, &lf);
    }

    #[test]
    fn cubic_mixed_monomial() {
        let p = Polynomial::from_terms(2, [(vec![2, 1], 1.0)]).unwrap();
        let lf = decompose_polynomial(&p);
        let dirs: Vec<Vec<f64>> = lf.terms.iter().map(|t| t.direction.clone()).collect();
        assert_eq!(dirs, vec![vec![2.0, 1.0], vec![2.0, -1.0], vec![0.0, 1.0]]);
        grid_check(&p, &lf);
    }

    #[test]
    fn constant_and_zero() {
        let c = Polynomial::constant(3, 2.5);
        let lf = decompose_polynomial(&c);
        assert_eq!(lf.degree(), 0);
        assert_eq!(lf.eval(&[1.0, 2.0, 3.0]), 2.5);
        assert_eq!(decompose_polynomial(&Polynomial::zero(2)).eval(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn derivative_and_indices() {
        let p = Polynomial::from_terms(2, [(vec![3, 2], 2.0), (vec![1, 0], 5.0)]).unwrap();
        let d = p.derivative(&[2, 1]);
        assert_eq!(d, Polynomial::from_terms(2, [(vec![1, 1], 24.0)]).unwrap());
        assert_eq!(multi_indices(2, 2).len(), 6);
        assert_eq!(multi_indices(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(binomial(5, 2), 10.0);
    }
}
