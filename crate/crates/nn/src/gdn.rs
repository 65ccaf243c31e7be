use gdn_manifold::zoo::{self, dot, tangent_norm};
use gdn_manifold::{resolve_manifold, Error, ExtendedReal, ManifoldKind, ManifoldSpec, Result};
use serde::{Deserialize, Serialize};

use crate::net::FeedforwardNet;

/// `Exp_{Y, base_y} o core o Log_{X, base_x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GdnModel {
    pub domain: ManifoldSpec,
    pub codomain: ManifoldSpec,
    pub base_x: Vec<f64>,
    pub base_y: Vec<f64>,
    pub core: FeedforwardNet,
}

impl GdnModel {
    pub fn new(
        domain: ManifoldSpec,
        codomain: ManifoldSpec,
        base_x: Vec<f64>,
        base_y: Vec<f64>,
        core: FeedforwardNet,
    ) -> Result<Self> {
        zoo::validate_point(&domain, &base_x)?;
        zoo::validate_point(&codomain, &base_y)?;
        if core.in_dim() != domain.chart_dim {
            return Err(Error::validation(format!(
                "core input dimension {} differs from domain chart dimension {}",
                core.in_dim(),
                domain.chart_dim
            )));
        }
        if core.out_dim() != codomain.chart_dim {
            return Err(Error::validation(format!(
                "core output dimension {} differs from codomain chart dimension {}",
                core.out_dim(),
                codomain.chart_dim
            )));
        }
        Ok(GdnModel { domain, codomain, base_x, base_y, core })
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        gdn_eval(self, x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GdnJson::from(self)).expect("finite parameters serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: GdnJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("GDN JSON: {e}")))?;
        GdnModel::new(
            resolve_manifold(&raw.domain)?,
            resolve_manifold(&raw.codomain)?,
            raw.base_x,
            raw.base_y,
            raw.core,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct GdnJson {
    domain: String,
    codomain: String,
    base_x: Vec<f64>,
    base_y: Vec<f64>,
    #[serde(flatten)]
    core: FeedforwardNet,
}

impl From<&GdnModel> for GdnJson {
    fn from(m: &GdnModel) -> Self {
        GdnJson {
            domain: m.domain.id.clone(),
            codomain: m.codomain.id.clone(),
            base_x: m.base_x.clone(),
            base_y: m.base_y.clone(),
            core: m.core.clone(),
        }
    }
}

/// Evaluates a GDN inside the injectivity ball of its domain base point.
///
/// On sphere and projective codomains the core output is read in ambient coordinates
/// and its component along `base_y` is discarded before the exponential.
pub fn gdn_eval(model: &GdnModel, x: &[f64]) -> Result<Vec<f64>> {
    let d = zoo::distance(&model.domain, &model.base_x, x)?;
    let inj = model.domain.inj_lower(&model.base_x);
    if ExtendedReal::Finite(d) >= inj {
        return Err(Error::OutsideBall { distance: d, radius: inj.to_f64() });
    }
    let v = zoo::log_map(&model.domain, &model.base_x, x)?;
    let mut u = model.core.eval(&v)?;
    if let ManifoldKind::Sphere { .. } | ManifoldKind::Rp { .. } = model.codomain.kind {
        let c = dot(&u, &model.base_y);
        u.iter_mut().zip(&model.base_y).for_each(|(ui, yi)| *ui -= c * yi);
    }
    if let ExtendedReal::Finite(r) = model.codomain.inj_lower(&model.base_y) {
        let n = tangent_norm(&model.codomain, &model.base_y, &u)?;
        if n >= r {
            return Err(Error::Range(format!(
                "core output norm {n} is outside the codomain injectivity radius {r}"
            )));
        }
    }
    zoo::exp_map(&model.codomain, &model.base_y, &u)
}
