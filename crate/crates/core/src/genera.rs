//! Genus point functions on the Cartan subalgebra.
//!
//! All three functions use one normalized variable x, in which alpha(x) is
//! the natural argument of sin/sinh. In terms of the Chern-Simons field
//! phi restricted to the Cartan, x = i phi / 2 pi.
//!
//! * j(x) = prod_{alpha>0} (sin(alpha(x)/2) / (alpha(x)/2))^2
//! * A-hat(x, g) = prod_{alpha>0} ((alpha(x)/2) / sinh(alpha(x)/2))^(2g-2) = j(ix)^(1-g)
//! * Todd(x, g, c1) = exp(c1/2) prod_{alpha>0} (sin(alpha(x)/4) / (alpha(x)/4))^(2-2g)
//!
//! The Todd function takes its argument at half scale (the determinant over
//! both root spaces of sin(ad/4)/(ad/4)), so Todd(x, g, 0) = A-hat(ix/2, g)
//! = j(x/2)^(1-g).

use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{CartanElement, RootSystem};

/// Distance from a singular wall of j^(-1/2) below which evaluation is refused.
pub const WALL_TOLERANCE: f64 = 1e-6;

/// sin(z)/z, with its Taylor series near the removable singularity.
pub fn sinc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::one() - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// sinh(z)/z.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        Complex64::one() + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Regularized determinant of the fibre modes.
pub fn j_function(rs: &RootSystem, x: &CartanElement) -> Complex64 {
    let s = j_sqrt(rs, x);
    s * s
}

/// The entire square root prod_{alpha>0} sin(alpha(x)/2)/(alpha(x)/2).
pub fn j_sqrt(rs: &RootSystem, x: &CartanElement) -> Complex64 {
    rs.positive_root_values(x)
        .into_iter()
        .map(|a| sinc(a / 2.0))
        .product()
}

/// j^(-1/2), refused within [`WALL_TOLERANCE`] of alpha(x) in 2 pi Z \ {0}.
pub fn j_inv_sqrt(rs: &RootSystem, x: &CartanElement) -> Result<Complex64> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Complex64::one();
    for a in rs.positive_root_values(x) {
        let m = (a.re / two_pi).round();
        if m != 0.0 {
            let dist = (a - two_pi * m).norm();
            if dist < WALL_TOLERANCE {
                return Err(Error::NearSingularWall {
                    root_value: format!("{a}"),
                    distance: dist,
                });
            }
        }
        out /= sinc(a / 2.0);
    }
    Ok(out)
}

pub fn a_hat_function(rs: &RootSystem, x: &CartanElement, genus: u32) -> Complex64 {
    let exponent = 2 - 2 * genus as i32;
    rs.positive_root_values(x)
        .into_iter()
        .map(|a| sinhc(a / 2.0).powi(exponent))
        .product()
}

pub fn todd_function(rs: &RootSystem, x: &CartanElement, genus: u32, c1_part: Complex64) -> Complex64 {
    let exponent = 2 - 2 * genus as i32;
    let det: Complex64 = rs
        .positive_root_values(x)
        .into_iter()
        .map(|a| sinc(a / 4.0).powi(exponent))
        .product();
    (c1_part / 2.0).exp() * det
}

/// Truncated Euler product prod_{n<=N} prod_{alpha>0} (1 - (alpha(x)/2 pi n)^2)^2,
/// which converges to j(x) with error O(1/N).
pub fn j_euler_product(rs: &RootSystem, x: &CartanElement, terms: u64) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let roots = rs.positive_root_values(x);
    let mut prod = Complex64::one();
    for n in 1..=terms {
        let scale = two_pi * n as f64;
        for &a in &roots {
            let u = a / scale;
            let f = Complex64::one() - u * u;
            prod *= f * f;
        }
    }
    prod
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenusKind {
    J,
    AHat,
    Todd,
}

impl std::str::FromStr for GenusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "j" => Ok(GenusKind::J),
            "ahat" | "a-hat" => Ok(GenusKind::AHat),
            "todd" => Ok(GenusKind::Todd),
            other => Err(Error::InvalidInput(format!("unknown genus function '{other}'"))),
        }
    }
}

/// A genus function evaluated at a point.
#[derive(Clone, Debug)]
pub struct GenusValue {
    pub value: Complex64,
    /// Power applied to the per-root product (2 for j, 2-2g for A-hat and Todd).
    pub genus_exponent: i32,
    pub point: CartanElement,
}

pub fn evaluate(kind: GenusKind, rs: &RootSystem, x: &CartanElement, genus: u32) -> GenusValue {
    let (value, genus_exponent) = match kind {
        GenusKind::J => (j_function(rs, x), 2),
        GenusKind::AHat => (a_hat_function(rs, x, genus), 2 - 2 * genus as i32),
        GenusKind::Todd => (todd_function(rs, x, genus, Complex64::new(0.0, 0.0)), 2 - 2 * genus as i32),
    };
    GenusValue {
        value,
        genus_exponent,
        point: x.clone(),
    }
}
