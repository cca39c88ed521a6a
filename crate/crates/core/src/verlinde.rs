//! Verlinde dimensions of spaces of conformal blocks.
//!
//! ```text
//! dim H^0(M_g, L^k) = sum_lambda S_{0 lambda}^{2-2g} prod_i S_{L_i lambda} / S_{0 lambda}
//! ```
//!
//! The sum is taken in floating point with pairwise summation and then
//! rounded. When the binary64 value misses an integer by more than
//! [`INTEGRALITY_TOLERANCE`] (large cancelling terms at high genus), the sum
//! is repeated over an extended-precision S-matrix; a miss at that precision is an
//! error, never rounded silently.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cft::{s_matrix, ModularData};
use crate::hp::HpComplex;
use crate::error::{Error, Result};
use crate::lie::{RootSystem, Weight};
use crate::sum::pairwise_sum;

pub const INTEGRALITY_TOLERANCE: f64 = 1e-6;

/// Largest integer that a binary64 sum can certify.
const MAX_CERTIFIABLE: f64 = 4_503_599_627_370_496.0; // 2^52

#[derive(Clone, Debug)]
pub struct VerlindeRequest {
    pub rs: RootSystem,
    pub level: u32,
    pub genus: u32,
    pub labels: Vec<Weight>,
}

/// The raw complex Verlinde sum, before rounding.
pub fn verlinde_sum(md: &ModularData, genus: u32, labels: &[Weight]) -> Result<Complex64> {
    let idx: Vec<usize> = labels.iter().map(|w| md.require_integrable(w)).collect::<Result<_>>()?;
    let exponent = 2 - 2 * genus as i32;
    let terms: Vec<Complex64> = (0..md.len())
        .map(|l| {
            let s0 = md.s(0, l);
            idx.iter().fold(s0.powi(exponent), |acc, &i| acc * md.s(i, l) / s0)
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

/// The Verlinde sum over extended-precision S entries; `None` if `md` does
/// not carry them.
pub fn verlinde_sum_hp(md: &ModularData, genus: u32, labels: &[Weight]) -> Result<Option<Complex64>> {
    let idx: Vec<usize> = labels.iter().map(|w| md.require_integrable(w)).collect::<Result<_>>()?;
    if md.s_hp(0, 0).is_none() {
        return Ok(None);
    }
    let bits = md.precision_bits() as usize;
    let entry = |a: usize, b: usize| md.s_hp(a, b).expect("checked above");
    let exponent = 2 - 2 * genus as i32;
    let mut acc = HpComplex::zero(bits);
    for l in 0..md.len() {
        let s0 = entry(0, l);
        let term = idx
            .iter()
            .fold(s0.powi(exponent, bits), |t, &i| t.mul(entry(i, l), bits).div(s0, bits));
        acc = acc.add(&term, bits);
    }
    Ok(Some(acc.to_c64()))
}

/// Rounds a Verlinde sum to a non-negative integer under the integrality tolerance.
pub fn round_dimension(value: Complex64) -> Result<u64> {
    let rounded = value.re.round();
    let residual = (value - Complex64::new(rounded, 0.0)).norm();
    if residual >= INTEGRALITY_TOLERANCE || !(0.0..=MAX_CERTIFIABLE).contains(&rounded) {
        return Err(Error::Integrality {
            value: value.re,
            residual,
        });
    }
    Ok(rounded as u64)
}

pub fn verlinde_dimension_with(md: &ModularData, genus: u32, labels: &[Weight]) -> Result<u64> {
    match round_dimension(verlinde_sum(md, genus, labels)?) {
        Err(Error::Integrality { .. }) => {
            let hi = md.to_extended()?;
            let value = verlinde_sum_hp(&hi, genus, labels)?.expect("extended-precision data");
            round_dimension(value)
        }
        other => other,
    }
}

pub fn verlinde_dimension(req: &VerlindeRequest) -> Result<u64> {
    let md = s_matrix(&req.rs, req.level)?;
    verlinde_dimension_with(&md, req.genus, &req.labels)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerlindeRow {
    pub k: u32,
    pub dimension: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerlindeTable {
    pub algebra: String,
    pub genus: u32,
    pub labels: Vec<Weight>,
    pub rows: Vec<VerlindeRow>,
    /// Whether dimensions are nondecreasing in k. Expected for empty labels,
    /// reported rather than enforced.
    pub monotone: bool,
}

pub fn verlinde_table(
    rs: &RootSystem,
    genus: u32,
    levels: RangeInclusive<u32>,
    labels: &[Weight],
) -> Result<VerlindeTable> {
    let rows: Vec<VerlindeRow> = levels
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let md = s_matrix(rs, k)?;
            Ok(VerlindeRow {
                k,
                dimension: verlinde_dimension_with(&md, genus, labels)?,
            })
        })
        .collect::<Result<_>>()?;
    let monotone = rows.windows(2).all(|w| w[0].dimension <= w[1].dimension);
    Ok(VerlindeTable {
        algebra: rs.label(),
        genus,
        labels: labels.to_vec(),
        rows,
        monotone,
    })
}
