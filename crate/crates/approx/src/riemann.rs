//! Riemann sums of an activation convolved with a smooth bump.

use gdn_manifold::{Error, Result};
use gdn_nn::ActivationInfo;

/// Unnormalized bump `exp(-1 / (1 - u^2))` with `u` the affine image of `y` in `(-1, 1)`.
fn bump(a: f64, b: f64, y: f64) -> f64 {
    let u = (2.0 * y - a - b) / (b - a);
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn validate_support(a: f64, b: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::validation(format!("mollifier support [{a}, {b}] is not a bounded interval")));
    }
    Ok(())
}

/// Cell masses `c_l` of the unit-mass bump over `l_count` equal cells of `[a, b]`.
pub fn bump_weights(a: f64, b: f64, l_count: usize) -> Result<Vec<f64>> {
    validate_support(a, b)?;
    if l_count == 0 {
        return Err(Error::validation("need at least one Riemann cell"));
    }
    let width = (b - a) / l_count as f64;
    let raw: Vec<f64> = (0..l_count)
        .map(|l| {
            let lo = a + l as f64 * width;
            simpson(|y| bump(a, b, y), lo, lo + width, 64)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|c| c / total).collect())
}

/// `(sigma * phi)(t)` by Simpson's rule on `panels` panels.
pub fn mollified_value(sigma: &ActivationInfo, a: f64, b: f64, t: f64, panels: usize) -> Result<f64> {
    validate_support(a, b)?;
    let mass = simpson(|y| bump(a, b, y), a, b, panels.max(2));
    Ok(simpson(|y| sigma.eval(t - y) * bump(a, b, y), a, b, panels.max(2)) / mass)
}

/// `sum_l c_l sigma(t - y_l)` with cell midpoints `y_l`, and the bound
/// `omega(sigma, (b - a) / L)` on its distance to the convolution.
pub fn riemann_smooth_activation(sigma: &ActivationInfo, support: (f64, f64), l_count: usize, t: f64) -> Result<(f64, f64)> {
    let (a, b) = support;
    let weights = bump_weights(a, b, l_count)?;
    let width = (b - a) / l_count as f64;
    let value = weights
        .iter()
        .enumerate()
        .map(|(l, c)| c * sigma.eval(t - (a + (l as f64 + 0.5) * width)))
        .sum();
    Ok((value, sigma.modulus_on(t - b, t - a, width)))
}
