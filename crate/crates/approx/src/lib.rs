//! Constructive approximation: moduli of continuity, Bernstein compilation,
//! shallow network synthesis, verticalization and complexity estimates.

pub mod bernstein;
pub mod certify;
pub mod counts;
pub mod estimate;
pub mod modulus;
pub mod poly;
pub mod riemann;
pub mod synth;
pub mod vertical;

pub use bernstein::{
    bernstein_bound, bernstein_degree_for, bernstein_eval, lattice_point, to_polynomials, BernsteinModel,
    DEFAULT_DEGREE_CAP,
};
pub use certify::{certify_efficient, EfficiencyCertificate};
pub use counts::{monomial_counts, reciprocal_approx, MonomialCounts};
pub use estimate::{depth_estimate, efficient_complexity, DepthEstimate, EfficientComplexity, EstimateRequest};
pub use modulus::{
    concave_majorant, empirical_modulus, mcshane_extend, modulus_inverse, smooth_modulus, ExtensionVariant,
    Modulus, ModulusEstimate, ModulusKind,
};
pub use poly::{decompose_polynomial, LinearFormPoly, LinearTerm, Monomial, Polynomial};
pub use riemann::riemann_smooth_activation;
pub use synth::{
    compile_function_to_shallow, compile_poly_to_shallow, finite_diff_derivative, select_theta0, stack_shallow,
    CompileOptions, CompiledShallow,
};
pub use vertical::{verticalize, VerticalNet, VerticalStrategy};
