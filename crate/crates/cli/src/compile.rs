//! Compiling a registered target into a GDN over a geodesic ball and auditing it.

use gdn_approx::{
    compile_function_to_shallow, depth_estimate, verticalize, CompileOptions, EstimateRequest, Modulus,
    VerticalStrategy,
};
use gdn_manifold::{distance, resolve_manifold, Error, ExtendedReal, Result};
use gdn_nn::{ActivationClass, ActivationInfo, GdnModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::audit::{ball_points, euclid, exp_lipschitz, lipschitz_estimate, sup_error, Frame};
use crate::targets::{resolve_target, Target};

pub const DEFAULT_AUDIT_POINTS: usize = 1000;
const VERTICAL_TRIES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileConfig {
    pub domain: String,
    pub codomain: String,
    pub base_x: Vec<f64>,
    /// Defaults to the image of `base_x`.
    #[serde(default)]
    pub base_y: Option<Vec<f64>>,
    pub target: String,
    pub radius: f64,
    pub eps: f64,
    pub activation: String,
    #[serde(default = "default_audit")]
    pub audit_points: usize,
    #[serde(default)]
    pub seed: u64,
    /// Rebuild the shallow core as a deep narrow net with this scaled-identity factor.
    #[serde(default)]
    pub verticalize_lambda: Option<f64>,
}

fn default_audit() -> usize {
    DEFAULT_AUDIT_POINTS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileReport {
    pub target: String,
    pub eps: f64,
    /// Sup geodesic distance to the target over the audit points.
    pub measured_error: f64,
    pub audit_points: usize,
    /// Chart-level error of the shallow core on its cube grid.
    pub chart_audit_error: f64,
    /// `kappa2` times the chart-level a-priori bound.
    pub apriori_bound: f64,
    pub chart_eps: f64,
    pub degree: usize,
    pub apriori_degree: u64,
    pub width: usize,
    pub depth: usize,
    pub param_count: usize,
    pub theta0: f64,
    pub h: f64,
    /// Lipschitz estimate of the local representation on the unit cube.
    pub cube_lipschitz: f64,
    pub kappa2: f64,
    pub depth_order: Option<f64>,
    pub verticalization_error: Option<f64>,
    pub success: bool,
}

pub struct Compiled {
    pub model: GdnModel,
    pub report: CompileReport,
}

/// `v -> v` inside the closed ball of `radius`, radial projection outside.
fn retract(v: &[f64], radius: f64) -> Vec<f64> {
    let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if n <= radius {
        v.to_vec()
    } else {
        v.iter().map(|c| c * radius / n).collect()
    }
}

/// Local representation at `u` in the unit cube, whose image `v = r (2u - 1)` covers the ball.
///
/// Corners beyond the injectivity radius are retracted radially onto `reach`.
fn local_rep(target: &Target, from: &Frame, to: &Frame, radius: f64, reach: f64, u: &[f64]) -> Result<Vec<f64>> {
    let v: Vec<f64> = u.iter().map(|c| radius * (2.0 * c - 1.0)).collect();
    to.log(&target.apply(&from.exp(&retract(&v, reach))?)?)
}

pub fn compile_gdn(cfg: &CompileConfig) -> Result<Compiled> {
    let domain = resolve_manifold(&cfg.domain)?;
    let codomain = resolve_manifold(&cfg.codomain)?;
    let sigma = ActivationInfo::by_name(&cfg.activation)?;
    if !(cfg.eps > 0.0) || !cfg.eps.is_finite() {
        return Err(Error::validation(format!("eps must be positive, got {}", cfg.eps)));
    }
    if !(cfg.radius > 0.0) || !cfg.radius.is_finite() {
        return Err(Error::validation(format!("radius must be positive, got {}", cfg.radius)));
    }
    let inj = domain.inj_lower(&cfg.base_x);
    if let ExtendedReal::Finite(inj) = inj {
        if cfg.radius >= inj {
            return Err(Error::validation(format!(
                "radius {} is not below the injectivity radius {inj} at the base point",
                cfg.radius
            )));
        }
    }
    if cfg.audit_points == 0 {
        return Err(Error::validation("audit needs at least one point"));
    }
    let target = resolve_target(&cfg.target, &domain, &codomain)?;
    let from = Frame::new(&domain, &cfg.base_x)?;
    let base_y = match &cfg.base_y {
        Some(b) => b.clone(),
        None => target.apply(&cfg.base_x)?,
    };
    let to = Frame::new(&codomain, &base_y)?;
    let (p, m, r) = (from.dim(), to.dim(), cfg.radius);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let corner = r * (p as f64).sqrt();
    let reach = match inj {
        ExtendedReal::Finite(inj) => corner.min(inj * (1.0 - 1e-6)),
        ExtendedReal::Infinite => corner,
    };
    let rep = |u: &[f64]| local_rep(&target, &from, &to, r, reach, u);
    let cube_lipschitz = lipschitz_estimate(
        &mut rng,
        |g| (0..p).map(|_| rand::Rng::gen::<f64>(g)).collect(),
        rep,
        euclid,
    )?;
    let chart_values = ball_points(&from, r, 200)?
        .iter()
        .map(|x| to.log(&target.apply(x)?))
        .collect::<Result<Vec<_>>>()?;
    let out_radius = chart_values.iter().map(|w| w.iter().map(|c| c * c).sum::<f64>().sqrt()).fold(0.0, f64::max);
    let kappa2 = exp_lipschitz(&mut rng, &to, (out_radius * 1.1).max(1e-3))?.max(1e-12);
    let chart_eps = cfg.eps / kappa2;

    let cell = std::cell::RefCell::new(None::<Error>);
    let target_fn = |u: &[f64]| -> Vec<f64> {
        rep(u).unwrap_or_else(|e| {
            cell.borrow_mut().get_or_insert(e);
            vec![f64::NAN; m]
        })
    };
    let compiled = compile_function_to_shallow(
        &target_fn,
        p,
        m,
        &Modulus::Lipschitz(cube_lipschitz),
        chart_eps,
        &sigma,
        &CompileOptions::default(),
    );
    if let Some(e) = cell.into_inner() {
        return Err(e);
    }
    let compiled = compiled?;

    let (shallow_or_deep, verticalization_error) = match cfg.verticalize_lambda {
        None => (compiled.net.clone(), None),
        Some(lambda) => {
            // shrink lambda until the deep net fits in what the shallow audit left over
            let budget = 0.5 * (chart_eps - compiled.audit_error).max(0.0);
            let mut lambda = lambda;
            let mut v = None;
            for _ in 0..VERTICAL_TRIES {
                let cand = verticalize(
                    std::slice::from_ref(&compiled.net),
                    &vec![(0.0, 1.0); p],
                    VerticalStrategy::ScaledIdentity { lambda },
                )?;
                let done = cand.measured_error <= budget;
                v = Some(cand);
                if done {
                    break;
                }
                lambda /= 4.0;
            }
            let v = v.expect("at least one try");
            (v.net, Some(v.measured_error))
        }
    };
    // u = B_x^T t / (2r) + 1/2 on ambient tangent vectors t, then w -> B_y w
    let a = from.basis.transpose().scale(1.0 / (2.0 * r));
    let core = shallow_or_deep
        .precompose_affine(&a, &vec![0.5; p])?
        .postcompose_affine(&to.basis, &vec![0.0; codomain.chart_dim])?;
    let model = GdnModel::new(domain.clone(), codomain.clone(), cfg.base_x.clone(), base_y, core)?;

    let points = ball_points(&from, r, cfg.audit_points)?;
    let measured =
        sup_error(&points, |x| model.eval(x), |x| target.apply(x), |a, b| distance(&codomain, a, b))?;

    let depth_order = if sigma.class() == ActivationClass::SmoothNonpoly {
        let req = EstimateRequest::new(
            ActivationClass::SmoothNonpoly,
            p,
            m,
            cfg.eps,
            r,
            Modulus::Lipschitz(cube_lipschitz / (2.0 * r)),
        );
        depth_estimate(&req).ok().map(|d| d.depth_order)
    } else {
        None
    };
    let net = &model.core;
    let report = CompileReport {
        target: cfg.target.clone(),
        eps: cfg.eps,
        measured_error: measured,
        audit_points: points.len(),
        chart_audit_error: compiled.audit_error,
        apriori_bound: kappa2 * compiled.bound,
        chart_eps,
        degree: compiled.degree,
        apriori_degree: compiled.apriori_degree,
        width: net.width(),
        depth: net.depth(),
        param_count: net.param_count(),
        theta0: compiled.theta0,
        h: compiled.h,
        cube_lipschitz,
        kappa2,
        depth_order,
        verticalization_error,
        success: measured <= cfg.eps,
    };
    Ok(Compiled { model, report })
}
