use std::fmt;
use std::sync::Arc;

use gdn_manifold::{Error, Result};
use gdn_quotient::{canonical_rep, QuotientSpace};

use crate::gdn::GdnModel;
use crate::readout::{ConvexShape, Readout};

/// Continuous injective feature map applied before the branches.
///
/// Injectivity is the caller's responsibility.
#[derive(Clone)]
pub struct Feature {
    pub name: String,
    f: Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>,
}

impl Feature {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        Feature { name: name.into(), f: Arc::new(f) }
    }

    pub fn identity() -> Self {
        Feature::new("identity", |x| Ok(x.to_vec()))
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.f)(x)
    }
}

impl fmt::Debug for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Feature({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct Branch {
    pub gdn: GdnModel,
    pub projection: Option<QuotientSpace>,
}

impl Branch {
    pub fn plain(gdn: GdnModel) -> Self {
        Branch { gdn, projection: None }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineModel {
    pub feature: Option<Feature>,
    pub branches: Vec<Branch>,
    pub readout: Option<Readout>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineOutput {
    Single(Vec<f64>),
    Tuple(Vec<Vec<f64>>),
}

impl PipelineOutput {
    pub fn components(&self) -> Vec<Vec<f64>> {
        match self {
            PipelineOutput::Single(v) => vec![v.clone()],
            PipelineOutput::Tuple(vs) => vs.clone(),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.components().concat()
    }
}

impl PipelineModel {
    pub fn new(feature: Option<Feature>, branches: Vec<Branch>, readout: Option<Readout>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::validation("a pipeline needs at least one branch"));
        }
        if let Some(r) = &readout {
            let total: usize = branches.iter().map(|b| b.gdn.codomain.point_len).sum();
            let expected = match r {
                Readout::Softmax | Readout::Gauge(_) => None,
                Readout::Projection(ConvexShape::Box { lo, .. }) => Some(lo.len()),
                Readout::Projection(ConvexShape::Ball { center, .. }) => Some(center.len()),
                Readout::Projection(ConvexShape::Simplex { c }) => Some(*c),
            };
            if let Some(e) = expected {
                if e != total {
                    return Err(Error::validation(format!(
                        "readout expects {e} coordinates but the branches produce {total}"
                    )));
                }
            }
        }
        Ok(PipelineModel { feature, branches, readout })
    }

    pub fn single(gdn: GdnModel) -> Self {
        PipelineModel { feature: None, branches: vec![Branch::plain(gdn)], readout: None }
    }

    pub fn eval(&self, x: &[f64]) -> Result<PipelineOutput> {
        pipeline_eval(self, x)
    }
}

/// Runs `models` side by side on a common input.
pub fn parallelize(models: Vec<GdnModel>) -> Result<PipelineModel> {
    let first = models.first().ok_or_else(|| Error::validation("nothing to parallelize"))?;
    for (i, m) in models.iter().enumerate().skip(1) {
        if m.domain != first.domain || m.base_x != first.base_x {
            return Err(Error::validation(format!(
                "branch {i} does not share the domain and base point of branch 0"
            )));
        }
    }
    PipelineModel::new(None, models.into_iter().map(Branch::plain).collect(), None)
}

/// Feature, then every branch with its optional projection, then the readout on the
/// concatenated branch outputs.
pub fn pipeline_eval(p: &PipelineModel, x: &[f64]) -> Result<PipelineOutput> {
    let z = match &p.feature {
        Some(f) => f.apply(x)?,
        None => x.to_vec(),
    };
    let mut outs = Vec::with_capacity(p.branches.len());
    for (index, b) in p.branches.iter().enumerate() {
        let wrap = |e: Error| Error::Branch { index, source: Box::new(e) };
        let mut y = b.gdn.eval(&z).map_err(wrap)?;
        if let Some(q) = &b.projection {
            y = canonical_rep(q, &y).map_err(wrap)?;
        }
        outs.push(y);
    }
    match &p.readout {
        Some(r) => Ok(PipelineOutput::Single(r.apply(&outs.concat())?)),
        None if outs.len() == 1 => Ok(PipelineOutput::Single(outs.pop().expect("one branch"))),
        None => Ok(PipelineOutput::Tuple(outs)),
    }
}
