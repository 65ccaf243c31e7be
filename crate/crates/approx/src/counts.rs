use gdn_manifold::{Error, Result};
use serde::{Deserialize, Serialize};

/// `r(x) = prod_{i=0}^{n_a} (1 + (1 - x)^(2^i))` and the exact error `|(1-x)^(2^(n_a+1)) / x|`.
pub fn reciprocal_approx(x: f64, n_a: u32) -> Result<(f64, f64)> {
    if !(x > 0.0 && x < 2.0) {
        return Err(Error::domain(format!("reciprocal approximant needs x in (0, 2), got {x}")));
    }
    let y = 1.0 - x;
    let mut pow = y;
    let mut r = 1.0;
    for _ in 0..=n_a {
        r *= 1.0 + pow;
        pow *= pow;
    }
    Ok((r, (pow / x).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialCounts {
    #[serde(rename = "M")]
    pub m: u128,
    #[serde(rename = "M0")]
    pub m0: u128,
    #[serde(rename = "P1")]
    pub p1: u128,
}

/// `M = ((n+1)(n+2)/2)^p`, `M0 = np + 1`, `P1 = np M`.
pub fn monomial_counts(n: u32, p: u32) -> Result<MonomialCounts> {
    if n == 0 || p == 0 {
        return Err(Error::validation("monomial counts need n, p >= 1"));
    }
    let per = (n as u128 + 1) * (n as u128 + 2) / 2;
    let m = per.checked_pow(p).ok_or_else(|| Error::numeric("monomial count overflows u128"))?;
    let np = n as u128 * p as u128;
    let p1 = np.checked_mul(m).ok_or_else(|| Error::numeric("monomial count overflows u128"))?;
    Ok(MonomialCounts { m, m0: np + 1, p1 })
}
