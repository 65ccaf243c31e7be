//! Quotients of closed-form geometries by discrete isometry groups, and max-metric products.
//!
//! The flat torus is `R^m / Z^m` with the axis-aligned integer lattice, and real
//! projective space is the sphere modulo the antipodal map. Arbitrary finite groups
//! can be supplied as explicit lists of maps over a base geometry.

use std::fmt;
use std::sync::Arc;

use gdn_manifold::zoo::{self, rp_sign_fix, torus_canonical, torus_distance};
use gdn_manifold::{resolve_manifold, Error, ManifoldKind, ManifoldSpec, Result};

const AXIOM_TOL: f64 = 1e-9;

/// A point map used as a group element of a finite action.
#[derive(Clone)]
pub struct PointMap {
    pub name: String,
    f: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl PointMap {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        PointMap { name: name.into(), f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        PointMap::new("identity", |z| z.to_vec())
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        (self.f)(z)
    }
}

impl fmt::Debug for PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointMap({})", self.name)
    }
}

/// A discrete group acting by isometries on a base geometry.
#[derive(Debug, Clone)]
pub enum GroupAction {
    /// `Z^m` acting on `R^m` by translation; `window` bounds the enumerated shifts.
    LatticeTranslation { m: usize, window: Option<i64> },
    /// `{id, -id}` acting on the unit sphere in `R^(m+1)`.
    Antipodal { m: usize },
    /// Explicit list of maps over `base`.
    FiniteList { base: ManifoldSpec, maps: Vec<PointMap> },
}

/// One element of a [`GroupAction`].
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Shift(Vec<i64>),
    Sign(bool),
    Index(usize),
}

impl GroupAction {
    pub fn base(&self) -> ManifoldSpec {
        match self {
            GroupAction::LatticeTranslation { m, .. } => {
                resolve_manifold(&format!("euclidean:{m}")).expect("valid id")
            }
            GroupAction::Antipodal { m } => resolve_manifold(&format!("sphere:{m}")).expect("valid id"),
            GroupAction::FiniteList { base, .. } => base.clone(),
        }
    }

    pub fn apply(&self, g: &GroupElement, z: &[f64]) -> Result<Vec<f64>> {
        match (self, g) {
            (GroupAction::LatticeTranslation { m, .. }, GroupElement::Shift(k)) if k.len() == *m => {
                Ok(z.iter().zip(k).map(|(a, b)| a + *b as f64).collect())
            }
            (GroupAction::Antipodal { .. }, GroupElement::Sign(flip)) => {
                Ok(if *flip { z.iter().map(|v| -v).collect() } else { z.to_vec() })
            }
            (GroupAction::FiniteList { maps, .. }, GroupElement::Index(i)) if *i < maps.len() => {
                Ok(maps[*i].apply(z))
            }
            _ => Err(Error::validation("group element does not belong to this action")),
        }
    }

    /// Elements worth trying when minimizing `d(z1, g z2)`.
    pub fn enumerate_near(&self, _z1: &[f64], _z2: &[f64]) -> Result<Vec<GroupElement>> {
        self.elements()
    }

    /// All elements of an enumerable action.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        match self {
            GroupAction::LatticeTranslation { m, window } => {
                let w = window.ok_or_else(|| {
                    Error::unsupported("lattice action is not enumerable without a window")
                })?;
                let side: Vec<i64> = (-w..=w).collect();
                let mut out = vec![Vec::new()];
                for _ in 0..*m {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            side.iter().map(move |s| {
                                let mut v = prefix.clone();
                                v.push(*s);
                                v
                            })
                        })
                        .collect();
                }
                Ok(out.into_iter().map(GroupElement::Shift).collect())
            }
            GroupAction::Antipodal { .. } => {
                Ok(vec![GroupElement::Sign(false), GroupElement::Sign(true)])
            }
            GroupAction::FiniteList { maps, .. } => {
                Ok((0..maps.len()).map(GroupElement::Index).collect())
            }
        }
    }
}

/// A quotient of a base geometry by a group action.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    pub id: String,
    pub base: ManifoldSpec,
    pub action: GroupAction,
}

impl QuotientSpace {
    pub fn torus(m: usize) -> Self {
        QuotientSpace {
            id: format!("torus:{m}"),
            base: resolve_manifold(&format!("euclidean:{m}")).expect("valid id"),
            action: GroupAction::LatticeTranslation { m, window: Some(1) },
        }
    }

    pub fn rp(m: usize) -> Self {
        QuotientSpace {
            id: format!("rp:{m}"),
            base: resolve_manifold(&format!("sphere:{m}")).expect("valid id"),
            action: GroupAction::Antipodal { m },
        }
    }

    pub fn finite(base: ManifoldSpec, maps: Vec<PointMap>) -> Self {
        QuotientSpace {
            id: format!("{}/finite({})", base.id, maps.len()),
            base: base.clone(),
            action: GroupAction::FiniteList { base, maps },
        }
    }

    /// Builds `torus:m` or `rp:m`.
    pub fn from_id(id: &str) -> Result<Self> {
        let spec = resolve_manifold(id)?;
        match spec.kind {
            ManifoldKind::Torus { m } => Ok(QuotientSpace::torus(m)),
            ManifoldKind::Rp { m } => Ok(QuotientSpace::rp(m)),
            _ => Err(Error::Parse(format!("'{id}' is not a quotient; use torus:m or rp:m"))),
        }
    }

    /// The manifold spec describing the quotient itself, when it is a zoo member.
    pub fn as_manifold(&self) -> Option<ManifoldSpec> {
        match self.action {
            GroupAction::LatticeTranslation { m, .. } => resolve_manifold(&format!("torus:{m}")).ok(),
            GroupAction::Antipodal { m } => resolve_manifold(&format!("rp:{m}")).ok(),
            GroupAction::FiniteList { .. } => None,
        }
    }
}

fn check_unit(z: &[f64], len: usize) -> Result<()> {
    if z.len() != len {
        return Err(Error::validation(format!("representative has length {}, expected {len}", z.len())));
    }
    let n = zoo::norm(z);
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::validation(format!("representative norm {n} is not 1")));
    }
    Ok(())
}

fn check_torus_rep(z: &[f64], m: usize) -> Result<()> {
    if z.len() != m || z.iter().any(|c| !(0.0..1.0).contains(c)) {
        return Err(Error::validation("torus representative must lie in [0,1)^m"));
    }
    Ok(())
}

/// `inf_g d(y1, g y2)` computed in closed form where available.
pub fn quotient_distance(q: &QuotientSpace, y1: &[f64], y2: &[f64]) -> Result<f64> {
    match &q.action {
        GroupAction::LatticeTranslation { m, .. } => {
            check_torus_rep(y1, *m)?;
            check_torus_rep(y2, *m)?;
            Ok(torus_distance(y1, y2))
        }
        GroupAction::Antipodal { m } => {
            check_unit(y1, m + 1)?;
            check_unit(y2, m + 1)?;
            let rp = resolve_manifold(&format!("rp:{m}"))?;
            zoo::distance(&rp, y1, y2)
        }
        GroupAction::FiniteList { base, maps } => {
            let mut best = f64::INFINITY;
            for g in maps {
                best = best.min(zoo::distance(base, y1, &g.apply(y2))?);
            }
            Ok(best)
        }
    }
}

/// Canonical representative of the class of `z`.
pub fn canonical_rep(q: &QuotientSpace, z: &[f64]) -> Result<Vec<f64>> {
    match &q.action {
        GroupAction::LatticeTranslation { m, .. } => {
            if z.len() != *m || z.iter().any(|c| !c.is_finite()) {
                return Err(Error::validation("bad torus point"));
            }
            Ok(torus_canonical(z))
        }
        GroupAction::Antipodal { m } => {
            if z.len() != m + 1 {
                return Err(Error::validation("bad projective point length"));
            }
            let n = zoo::norm(z);
            if n == 0.0 || !n.is_finite() {
                return Err(Error::validation("zero vector has no projective class"));
            }
            Ok(rp_sign_fix(&z.iter().map(|c| c / n).collect::<Vec<_>>()))
        }
        GroupAction::FiniteList { maps, .. } => {
            let mut best: Option<Vec<f64>> = None;
            for g in maps {
                let w = g.apply(z);
                let smaller = match &best {
                    None => true,
                    Some(b) => w.iter().zip(b).find(|(a, c)| a != c).is_some_and(|(a, c)| a < c),
                };
                if smaller {
                    best = Some(w);
                }
            }
            best.ok_or_else(|| Error::validation("finite action has no maps"))
        }
    }
}

/// The group axioms, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Identity,
    Isometry,
    Closure,
    FixedPointFree,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Identity => "identity missing",
            Axiom::Isometry => "not an isometry",
            Axiom::Closure => "not closed under composition with inverses",
            Axiom::FixedPointFree => "non-identity element has a fixed point",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub passed: bool,
    pub violated: Option<Axiom>,
    pub detail: String,
}

impl AxiomReport {
    fn pass() -> Self {
        AxiomReport { passed: true, violated: None, detail: String::new() }
    }

    fn fail(axiom: Axiom, detail: String) -> Self {
        AxiomReport { passed: false, violated: Some(axiom), detail }
    }
}

fn same_on(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p - q).abs() <= AXIOM_TOL))
}

/// Sample-based check of identity, isometry, closure and fixed-point freeness.
pub fn check_group_axioms(action: &GroupAction, sample: &[Vec<f64>]) -> Result<AxiomReport> {
    if sample.is_empty() {
        return Err(Error::validation("axiom check needs a nonempty sample"));
    }
    let base = action.base();
    let elements = action.elements()?;
    let images: Vec<Vec<Vec<f64>>> = elements
        .iter()
        .map(|g| sample.iter().map(|z| action.apply(g, z)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;

    let identity: Vec<bool> = images.iter().map(|img| same_on(img, sample)).collect();
    if !identity.iter().any(|b| *b) {
        return Ok(AxiomReport::fail(Axiom::Identity, "no element fixes the whole sample".into()));
    }

    for (g, img) in elements.iter().zip(&images) {
        for i in 0..sample.len() {
            for j in (i + 1)..sample.len() {
                let d0 = zoo::distance(&base, &sample[i], &sample[j])?;
                let d1 = zoo::distance(&base, &img[i], &img[j])?;
                if (d0 - d1).abs() > AXIOM_TOL {
                    return Ok(AxiomReport::fail(
                        Axiom::Isometry,
                        format!("{g:?} maps a pair at distance {d0} to distance {d1}"),
                    ));
                }
            }
        }
    }

    for (g1, img1) in elements.iter().zip(&images) {
        for (g2, img2) in elements.iter().zip(&images) {
            let ok = match action {
                GroupAction::LatticeTranslation { .. } => {
                    let disp: Vec<Vec<f64>> = img1
                        .iter()
                        .zip(img2)
                        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p - q).collect())
                        .collect();
                    let first = &disp[0];
                    first.iter().all(|d| (d - d.round()).abs() <= AXIOM_TOL)
                        && disp.iter().all(|d| same_on(std::slice::from_ref(d), std::slice::from_ref(first)))
                }
                _ => {
                    // g1 g2^{-1} sends img2[i] to img1[i]; some element must do the same.
                    elements.iter().any(|k| {
                        img2.iter().zip(img1).all(|(src, dst)| {
                            action
                                .apply(k, src)
                                .map(|w| w.iter().zip(dst).all(|(p, q)| (p - q).abs() <= AXIOM_TOL))
                                .unwrap_or(false)
                        })
                    })
                }
            };
            if !ok {
                return Ok(AxiomReport::fail(
                    Axiom::Closure,
                    format!("{g1:?} composed with the inverse of {g2:?} is not in the group"),
                ));
            }
        }
    }

    for ((g, img), is_id) in elements.iter().zip(&images).zip(&identity) {
        if *is_id {
            continue;
        }
        for (z, w) in sample.iter().zip(img) {
            if same_on(std::slice::from_ref(z), std::slice::from_ref(w)) {
                return Ok(AxiomReport::fail(
                    Axiom::FixedPointFree,
                    format!("{g:?} fixes {z:?}"),
                ));
            }
        }
    }
    Ok(AxiomReport::pass())
}

/// A factor of a [`ProductSpace`].
#[derive(Debug, Clone)]
pub enum Component {
    Manifold(ManifoldSpec),
    Quotient(QuotientSpace),
}

impl Component {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            Component::Manifold(spec) => zoo::distance(spec, a, b),
            Component::Quotient(q) => quotient_distance(q, a, b),
        }
    }
}

/// Finite product with the max metric.
#[derive(Debug, Clone)]
pub struct ProductSpace {
    pub components: Vec<Component>,
}

impl ProductSpace {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::validation("product needs at least one component"));
        }
        Ok(ProductSpace { components })
    }
}

/// `max_i d_i(a_i, b_i)`.
pub fn product_distance(p: &ProductSpace, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.len() != p.components.len() || b.len() != p.components.len() {
        return Err(Error::validation(format!(
            "tuples of arity {} and {} for a product of {} components",
            a.len(),
            b.len(),
            p.components.len()
        )));
    }
    let mut best = 0.0f64;
    for ((c, x), y) in p.components.iter().zip(a).zip(b) {
        best = best.max(c.distance(x, y)?);
    }
    Ok(best)
}
