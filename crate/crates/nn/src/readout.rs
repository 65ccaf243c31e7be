//! Readout maps onto convex targets and the simplex, with their right inverses and
//! contracting homotopies.

use std::fmt;
use std::sync::Arc;

use gdn_manifold::linalg::Direction;
use gdn_manifold::{Error, Result};

const SIMPLEX_TOL: f64 = 1e-12;

/// `forward`: `R^(C-1) -> int(simplex_C)` as softmax of `(x, 1)`.
/// `inverse`: `y -> (ln y_c - ln y_C + 1)_{c < C}`.
pub fn softmax_chart(direction: Direction, v: &[f64]) -> Result<Vec<f64>> {
    match direction {
        Direction::Encode => {
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::validation("non-finite softmax input"));
            }
            let mut w = v.to_vec();
            w.push(1.0);
            let m = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let e: Vec<f64> = w.iter().map(|c| (c - m).exp()).collect();
            let s: f64 = e.iter().sum();
            Ok(e.iter().map(|c| c / s).collect())
        }
        Direction::Decode => {
            if v.len() < 2 {
                return Err(Error::validation("simplex point needs at least two entries"));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::validation(format!("simplex point sums to {sum}")));
            }
            if let Some(c) = v.iter().find(|c| !(**c > 0.0)) {
                return Err(Error::domain(format!("simplex point has nonpositive entry {c}")));
            }
            let last = v[v.len() - 1].ln();
            Ok(v[..v.len() - 1].iter().map(|c| c.ln() - last + 1.0).collect())
        }
    }
}

/// Minkowski gauge of a convex body containing the origin in its interior.
#[derive(Clone)]
pub enum Gauge {
    /// Unit Euclidean ball.
    Euclidean,
    /// Unit cube `[-1,1]^n`.
    Sup,
    /// Cross-polytope.
    L1,
    Custom(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>),
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Euclidean => f.write_str("Euclidean"),
            Gauge::Sup => f.write_str("Sup"),
            Gauge::L1 => f.write_str("L1"),
            Gauge::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Gauge {
    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Gauge::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Gauge::Sup => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            Gauge::L1 => v.iter().map(|c| c.abs()).sum(),
            Gauge::Custom(f) => f(v),
        }
    }
}

/// `forward`: `y -> y / (1 + mu(y))`; `inverse`: `z -> z / (1 - mu(z))`.
pub fn gauge_chart(mu: &Gauge, direction: Direction, v: &[f64]) -> Result<Vec<f64>> {
    let g = mu.eval(v);
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::validation(format!("gauge value {g} is not a finite nonnegative number")));
    }
    match direction {
        Direction::Encode => Ok(v.iter().map(|c| c / (1.0 + g)).collect()),
        Direction::Decode => {
            if g >= 1.0 {
                return Err(Error::domain(format!("gauge {g} is not below 1")));
            }
            Ok(v.iter().map(|c| c / (1.0 - g)).collect())
        }
    }
}

/// Closed convex targets with a computable Euclidean projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexShape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Simplex { c: usize },
}

impl ConvexShape {
    fn validate(&self, len: usize) -> Result<()> {
        match self {
            ConvexShape::Box { lo, hi } => {
                if lo.len() != len || hi.len() != len {
                    return Err(Error::validation("box bounds do not match the point length"));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
                    return Err(Error::validation("box has lo > hi"));
                }
            }
            ConvexShape::Ball { center, radius } => {
                if center.len() != len {
                    return Err(Error::validation("ball center does not match the point length"));
                }
                if !(*radius > 0.0) {
                    return Err(Error::validation("ball radius must be positive"));
                }
            }
            ConvexShape::Simplex { c } => {
                if *c == 0 || *c != len {
                    return Err(Error::validation("simplex order does not match the point length"));
                }
            }
        }
        Ok(())
    }
}

/// Simplex projection by sort-and-threshold.
///
/// The threshold is fixed from the sorted prefix sums and then recomputed over the
/// selected support in index order, so the result depends only on the support.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        prefix += uj;
        let t = (prefix - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    simplex_from_support(y, &y.iter().map(|v| *v > theta).collect::<Vec<_>>())
}

/// Projection of `y` onto the face of the simplex spanned by `support`.
pub fn simplex_from_support(y: &[f64], support: &[bool]) -> Vec<f64> {
    let k = support.iter().filter(|s| **s).count();
    let sum: f64 = y.iter().zip(support).filter(|(_, s)| **s).map(|(v, _)| *v).sum();
    let theta = (sum - 1.0) / k as f64;
    y.iter().zip(support).map(|(v, s)| if *s { v - theta } else { 0.0 }).collect()
}

/// Euclidean nearest point of `shape`.
pub fn project_convex(shape: &ConvexShape, y: &[f64]) -> Result<Vec<f64>> {
    shape.validate(y.len())?;
    if y.iter().any(|c| !c.is_finite()) {
        return Err(Error::validation("non-finite point"));
    }
    Ok(match shape {
        ConvexShape::Box { lo, hi } => {
            y.iter().zip(lo.iter().zip(hi)).map(|(v, (a, b))| v.clamp(*a, *b)).collect()
        }
        ConvexShape::Ball { center, radius } => {
            let d: Vec<f64> = y.iter().zip(center).map(|(a, b)| a - b).collect();
            let n = d.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n <= *radius {
                y.to_vec()
            } else {
                center.iter().zip(&d).map(|(c, di)| c + di * radius / n).collect()
            }
        }
        ConvexShape::Simplex { .. } => {
            let inside = y.iter().all(|v| *v >= 0.0) && (y.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL;
            if inside {
                y.to_vec()
            } else {
                project_simplex(y)
            }
        }
    })
}

/// Anchor of a contracting homotopy.
#[derive(Debug, Clone, PartialEq)]
pub enum HomotopyShape {
    Star { anchor: Vec<f64> },
    Simplex { c: usize },
}

/// `H_t(y) = t (y - a) + a` with `a` the star anchor or the simplex barycenter.
pub fn homotopy_shrink(shape: &HomotopyShape, t: f64, y: &[f64]) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::validation(format!("homotopy time {t} outside [0,1]")));
    }
    let anchor = match shape {
        HomotopyShape::Star { anchor } => {
            if anchor.len() != y.len() {
                return Err(Error::validation("anchor length differs from point length"));
            }
            anchor.clone()
        }
        HomotopyShape::Simplex { c } => {
            if *c != y.len() {
                return Err(Error::validation("simplex order differs from point length"));
            }
            if y.iter().any(|v| *v < 0.0) || (y.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::validation("point is not in the simplex"));
            }
            vec![1.0 / *c as f64; *c]
        }
    };
    if t == 1.0 {
        return Ok(y.to_vec());
    }
    Ok(y.iter().zip(&anchor).map(|(v, a)| t * (v - a) + a).collect())
}

/// A readout applied to the concatenated branch outputs of a pipeline.
#[derive(Debug, Clone)]
pub enum Readout {
    Softmax,
    Gauge(Gauge),
    Projection(ConvexShape),
}

impl Readout {
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Readout::Softmax => softmax_chart(Direction::Encode, v),
            Readout::Gauge(g) => gauge_chart(g, Direction::Encode, v),
            Readout::Projection(shape) => project_convex(shape, v),
        }
    }

    /// Right inverse on the interior of the target, where one is known.
    pub fn right_inverse(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Readout::Softmax => softmax_chart(Direction::Decode, v),
            Readout::Gauge(g) => gauge_chart(g, Direction::Decode, v),
            Readout::Projection(shape) => {
                let p = project_convex(shape, v)?;
                if p != v {
                    return Err(Error::domain("point is outside the projection target"));
                }
                Ok(p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn softmax_examples() {
        let e = 1f64.exp();
        let y = softmax_chart(Direction::Encode, &[0.0]).unwrap();
        assert!(close(&y, &[1.0 / (1.0 + e), e / (1.0 + e)], 1e-15));
        assert!((y[0] - 0.26894).abs() < 1e-5);
        let y3 = softmax_chart(Direction::Encode, &[1.0, 1.0]).unwrap();
        assert!(close(&y3, &[1.0 / 3.0; 3], 1e-15));
        let back = softmax_chart(Direction::Decode, &y).unwrap();
        assert!(back[0].abs() < 1e-15);
        assert!(matches!(softmax_chart(Direction::Decode, &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(gauge_chart(&Gauge::Euclidean, Direction::Encode, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let f = gauge_chart(&Gauge::Euclidean, Direction::Encode, &[3.0, 0.0]).unwrap();
        assert_eq!(f, vec![0.75, 0.0]);
        assert_eq!(gauge_chart(&Gauge::Euclidean, Direction::Decode, &f).unwrap(), vec![3.0, 0.0]);
        assert_eq!(gauge_chart(&Gauge::Sup, Direction::Encode, &[1.0, 1.0]).unwrap(), vec![0.5, 0.5]);
        assert!(matches!(gauge_chart(&Gauge::Sup, Direction::Decode, &[1.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn projection_examples() {
        let b = ConvexShape::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
        assert_eq!(project_convex(&b, &[2.0, -1.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(project_convex(&b, &[0.5, 0.25]).unwrap(), vec![0.5, 0.25]);
        let s = ConvexShape::Simplex { c: 3 };
        let p = project_convex(&s, &[1.0, 1.0, 1.0]).unwrap();
        assert!(close(&p, &[1.0 / 3.0; 3], 1e-15));
        let ball = ConvexShape::Ball { center: vec![1.0, 0.0], radius: 2.0 };
        assert!(close(&project_convex(&ball, &[5.0, 0.0]).unwrap(), &[3.0, 0.0], 1e-15));
        assert!(project_convex(&ConvexShape::Box { lo: vec![1.0], hi: vec![0.0] }, &[0.0]).is_err());
        assert!(project_convex(&ConvexShape::Ball { center: vec![0.0], radius: 0.0 }, &[0.0]).is_err());
    }

    #[test]
    fn homotopy_examples() {
        let star = HomotopyShape::Star { anchor: vec![0.0, 0.0] };
        assert_eq!(homotopy_shrink(&star, 1.0, &[2.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(homotopy_shrink(&star, 0.5, &[2.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let simplex = HomotopyShape::Simplex { c: 2 };
        assert_eq!(homotopy_shrink(&simplex, 0.0, &[1.0, 0.0]).unwrap(), vec![0.5, 0.5]);
        assert!(homotopy_shrink(&star, 1.5, &[0.0, 0.0]).is_err());
    }
}
