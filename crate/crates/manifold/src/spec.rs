use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;

/// The closed-form geometries the toolkit knows about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManifoldKind {
    Euclidean { p: usize },
    Sphere { p: usize },
    Poincare { p: usize, c: f64 },
    Spd { n: usize },
    Gaussian { n: usize },
    Torus { m: usize },
    Rp { m: usize },
}

/// Descriptor of a geometry: dimensions, curvature bound and radii.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub id: String,
    pub kind: ManifoldKind,
    /// Intrinsic dimension.
    pub dim: usize,
    /// Length of tangent vectors and chart images.
    pub chart_dim: usize,
    /// Length of point coordinate vectors.
    pub point_len: usize,
    pub curvature_bound: ExtendedReal,
}

pub const VALID_FORMS: &str =
    "euclidean:p, sphere:p, poincare:p:c, spd:n, gaussian:n, torus:m, rp:m";

fn parse_count(s: &str, id: &str) -> Result<usize> {
    let v: i64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer '{s}' in '{id}'; valid forms: {VALID_FORMS}")))?;
    if v <= 0 {
        return Err(Error::validation(format!("parameter in '{id}' must be positive, got {v}")));
    }
    Ok(v as usize)
}

/// Parses a manifold identifier such as `sphere:2` or `poincare:3:0.5`.
pub fn resolve_manifold(id: &str) -> Result<ManifoldSpec> {
    let parts: Vec<&str> = id.trim().split(':').collect();
    let unknown = || Error::Parse(format!("unknown manifold '{id}'; valid forms: {VALID_FORMS}"));
    let kind = match parts.as_slice() {
        ["euclidean", p] => ManifoldKind::Euclidean { p: parse_count(p, id)? },
        ["sphere", p] => ManifoldKind::Sphere { p: parse_count(p, id)? },
        ["poincare", p, c] => {
            let p = parse_count(p, id)?;
            let c: f64 = c.trim().parse().map_err(|_| unknown())?;
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::validation(format!("curvature scale in '{id}' must be positive")));
            }
            ManifoldKind::Poincare { p, c }
        }
        ["spd", n] => ManifoldKind::Spd { n: parse_count(n, id)? },
        ["gaussian", n] => ManifoldKind::Gaussian { n: parse_count(n, id)? },
        ["torus", m] => ManifoldKind::Torus { m: parse_count(m, id)? },
        ["rp", m] => ManifoldKind::Rp { m: parse_count(m, id)? },
        _ => return Err(unknown()),
    };
    Ok(ManifoldSpec::from_kind(kind))
}

impl ManifoldSpec {
    pub fn from_kind(kind: ManifoldKind) -> Self {
        let tri = |n: usize| n * (n + 1) / 2;
        let (id, dim, chart_dim, point_len, curv) = match kind {
            ManifoldKind::Euclidean { p } => (format!("euclidean:{p}"), p, p, p, 0.0),
            ManifoldKind::Sphere { p } => (format!("sphere:{p}"), p, p + 1, p + 1, 1.0),
            ManifoldKind::Poincare { p, c } => (format!("poincare:{p}:{c}"), p, p, p, c),
            ManifoldKind::Spd { n } => (format!("spd:{n}"), tri(n), tri(n), tri(n), 0.5),
            ManifoldKind::Gaussian { n } => {
                (format!("gaussian:{n}"), n + tri(n), n + tri(n), n + tri(n), 0.0)
            }
            ManifoldKind::Torus { m } => (format!("torus:{m}"), m, m, m, 0.0),
            ManifoldKind::Rp { m } => (format!("rp:{m}"), m, m + 1, m + 1, 1.0),
        };
        ManifoldSpec {
            id,
            kind,
            dim,
            chart_dim,
            point_len,
            curvature_bound: ExtendedReal::Finite(curv),
        }
    }

    /// Lower bound on the injectivity radius at `x`; constant for every zoo member.
    pub fn inj_lower(&self, _x: &[f64]) -> ExtendedReal {
        match self.kind {
            ManifoldKind::Sphere { .. } => ExtendedReal::Finite(PI),
            ManifoldKind::Rp { .. } => ExtendedReal::Finite(PI / 2.0),
            ManifoldKind::Torus { .. } => ExtendedReal::Finite(0.5),
            _ => ExtendedReal::Infinite,
        }
    }

    /// Whether geodesic balls have a closed-form or quadrature volume.
    pub fn has_volume(&self) -> bool {
        !matches!(self.kind, ManifoldKind::Spd { .. } | ManifoldKind::Torus { .. })
    }

    /// Riemannian volume of the geodesic ball of radius `r` about `x`.
    pub fn volume_of_ball(&self, _x: &[f64], r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::validation("negative radius"));
        }
        match self.kind {
            ManifoldKind::Euclidean { p } => Ok(unit_ball_volume(p) * r.powi(p as i32)),
            ManifoldKind::Gaussian { .. } => {
                Ok(unit_ball_volume(self.dim) * r.powi(self.dim as i32))
            }
            ManifoldKind::Sphere { p } => {
                let r = r.min(PI);
                Ok(sphere_area(p - 1) * radial_integral(r, |s| s.sin().powi(p as i32 - 1)))
            }
            ManifoldKind::Rp { m } => {
                if r > PI / 2.0 {
                    return Err(Error::unsupported("projective ball volume beyond radius pi/2"));
                }
                Ok(sphere_area(m - 1) * radial_integral(r, |s| s.sin().powi(m as i32 - 1)))
            }
            ManifoldKind::Poincare { p, c } => {
                let k = c.sqrt();
                Ok(sphere_area(p - 1)
                    * radial_integral(r, |s| ((k * s).sinh() / k).powi(p as i32 - 1)))
            }
            ManifoldKind::Spd { .. } | ManifoldKind::Torus { .. } => Err(Error::unsupported(
                format!("no ball volume available for {}", self.id),
            )),
        }
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// Volume of the unit ball in `R^p`.
pub fn unit_ball_volume(p: usize) -> f64 {
    let mut even = 1.0;
    let mut odd = 2.0;
    if p == 0 {
        return 1.0;
    }
    let mut k = 1;
    while k < p {
        k += 1;
        let next = 2.0 * PI / k as f64;
        if k % 2 == 0 {
            even *= next;
        } else {
            odd *= next;
        }
    }
    if p % 2 == 0 {
        even
    } else {
        odd
    }
}

/// Surface area of the unit sphere `S^q` in `R^(q+1)`.
pub fn sphere_area(q: usize) -> f64 {
    (q + 1) as f64 * unit_ball_volume(q + 1)
}

fn radial_integral(r: f64, f: impl Fn(f64) -> f64) -> f64 {
    const PANELS: usize = 512;
    if r == 0.0 {
        return 0.0;
    }
    let h = r / PANELS as f64;
    let mut s = f(0.0) + f(r);
    for i in 1..PANELS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(i as f64 * h);
    }
    s * h / 3.0
}

/// `pi / (4 sqrt(K))` for positive curvature, `+inf` otherwise.
pub fn k_star(k: f64) -> ExtendedReal {
    if k > 0.0 {
        ExtendedReal::Finite(PI / (4.0 * k.sqrt()))
    } else {
        ExtendedReal::Infinite
    }
}

/// Result of [`delta_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaBound {
    pub value: f64,
    /// Radius at which the maximum was attained.
    pub radius: f64,
    /// Set when the radius cap was infinite and the search was truncated.
    pub unbounded: bool,
}

pub const DEFAULT_DELTA_GRID: usize = 256;
pub const DEFAULT_DELTA_RMAX: f64 = 3.0;

/// Grid maximum of `r V(r) / (V(r) + V_T(2r))` over log-spaced radii below `k_cap`.
///
/// `V` is the geodesic ball volume and `V_T` the Euclidean ball volume in the
/// intrinsic dimension. With an infinite cap the search stops at `r_max` and the
/// result is flagged unbounded.
pub fn delta_bound(
    spec: &ManifoldSpec,
    x: &[f64],
    k_cap: ExtendedReal,
    grid: usize,
    r_max: f64,
) -> Result<DeltaBound> {
    if grid < 16 {
        return Err(Error::validation("delta grid needs at least 16 points"));
    }
    if !spec.has_volume() {
        return Err(Error::unsupported(format!("no ball volume available for {}", spec.id)));
    }
    let (r_hi, unbounded) = match k_cap {
        ExtendedReal::Finite(k) if k > 0.0 => (k * (1.0 - 1e-12), false),
        ExtendedReal::Finite(_) => return Err(Error::validation("radius cap must be positive")),
        ExtendedReal::Infinite => (r_max, true),
    };
    let r_lo = r_hi * 1e-6;
    let ratio = (r_hi / r_lo).ln();
    let mut best = DeltaBound { value: 0.0, radius: r_lo, unbounded };
    for i in 0..grid {
        let r = if i + 1 == grid {
            r_hi
        } else {
            r_lo * (ratio * i as f64 / (grid - 1) as f64).exp()
        };
        let v = spec.volume_of_ball(x, r)?;
        let vt = unit_ball_volume(spec.dim) * (2.0 * r).powi(spec.dim as i32);
        if !v.is_finite() || !vt.is_finite() {
            return Err(Error::numeric(format!("non-finite ball volume at radius {r}")));
        }
        let value = r * v / (v + vt);
        if value > best.value {
            best.value = value;
            best.radius = r;
        }
    }
    Ok(best)
}

/// `min(inj_x, modulus_inv(inj_fx))`.
pub fn universality_radius(
    inj_x: ExtendedReal,
    inj_fx: ExtendedReal,
    modulus_inv: impl Fn(ExtendedReal) -> ExtendedReal,
) -> ExtendedReal {
    inj_x.min(modulus_inv(inj_fx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_examples() {
        let e = resolve_manifold("euclidean:3").unwrap();
        assert_eq!((e.dim, e.chart_dim), (3, 3));
        assert_eq!(e.curvature_bound, ExtendedReal::Finite(0.0));
        assert!(e.inj_lower(&[0.0; 3]).is_infinite());
        let s = resolve_manifold("sphere:2").unwrap();
        assert_eq!((s.dim, s.point_len), (2, 3));
        assert_eq!(s.inj_lower(&[0.0, 0.0, 1.0]), ExtendedReal::Finite(PI));
        let p = resolve_manifold("spd:2").unwrap();
        assert_eq!((p.dim, p.chart_dim), (3, 3));
        assert!(p.inj_lower(&[1.0, 0.0, 1.0]).is_infinite());
        assert_eq!(resolve_manifold("gaussian:2").unwrap().chart_dim, 5);
        assert!(resolve_manifold("poincare:4:0.5").unwrap().inj_lower(&[0.0; 4]).is_infinite());
        assert_eq!(resolve_manifold("sphere:7").unwrap().inj_lower(&[0.0; 8]), ExtendedReal::Finite(PI));
    }

    #[test]
    fn resolve_errors() {
        let err = resolve_manifold("klein:2").unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("sphere:p"));
        assert!(matches!(resolve_manifold("sphere:0"), Err(Error::Validation(_))));
        assert!(matches!(resolve_manifold("poincare:2:-1"), Err(Error::Validation(_))));
    }

    #[test]
    fn k_star_examples() {
        assert!(k_star(0.0).is_infinite());
        assert!(k_star(-5.0).is_infinite());
        let v = k_star(PI * PI / 16.0).finite().unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert_eq!(unit_ball_volume(1), 2.0);
        let s = resolve_manifold("sphere:2").unwrap();
        let v = s.volume_of_ball(&[0.0, 0.0, 1.0], 1.0).unwrap();
        assert!((v - 2.0 * PI * (1.0 - 1f64.cos())).abs() < 1e-10);
    }

    #[test]
    fn delta_euclidean_line() {
        let e = resolve_manifold("euclidean:1").unwrap();
        let d = delta_bound(&e, &[0.0], ExtendedReal::Infinite, 256, 3.0).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
        assert!(d.unbounded);
    }

    #[test]
    fn delta_sphere_against_closed_form() {
        let s = resolve_manifold("sphere:2").unwrap();
        let cap = k_star(1.0);
        let d = delta_bound(&s, &[0.0, 0.0, 1.0], cap, 256, 3.0).unwrap();
        let r_hi = PI / 4.0 * (1.0 - 1e-12);
        let oracle = (0..2560)
            .map(|i| {
                let r = r_hi * 1e-6 * ((1e6f64).ln() * i as f64 / 2559.0).exp();
                let v = 2.0 * PI * (1.0 - r.cos());
                r * v / (v + PI * 4.0 * r * r)
            })
            .fold(0.0, f64::max);
        assert!(d.value > 0.0 && d.value < PI / 4.0);
        assert!((d.value - oracle).abs() <= 0.01 * oracle);
    }

    #[test]
    fn universality_radius_examples() {
        let inf = ExtendedReal::Infinite;
        assert!(universality_radius(inf, inf, |e| e).is_infinite());
        let pi = ExtendedReal::Finite(PI);
        assert_eq!(universality_radius(pi, pi, |e| e), pi);
        let half = |e: ExtendedReal| ExtendedReal::from_f64(e.to_f64() / 2.0);
        assert_eq!(universality_radius(pi, pi, half), ExtendedReal::Finite(PI / 2.0));
    }
}
