//! Chern-Simons invariants of circle bundles M_(g,p) with fibre Wilson lines.
//!
//! ```text
//! Z = N sum_lambda S_{0 lambda}^{2-2g-n} prod_i S_{L_i lambda} phase_p(lambda)
//! ```
//!
//! with n fibre knots labelled L_i. Under the bare framing
//! phase_p(lambda) = exp(-i pi p <lambda+rho, lambda+rho> / (k+h)); under the
//! canonical framing it is T_lambda^{-p}, which differs by the
//! lambda-independent phase exp(i pi p |rho|^2/(k+h) + 2 pi i p c/24), so
//! |Z| does not depend on the framing. N is 1, or 1/|centre| on request.
//! At p = 0 the sum is the Verlinde dimension; at g = 0, p = 1 (the
//! three-sphere) |Z| = S_00.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cft::{s_matrix, t_exponent, FramingConvention, ModularData};
use crate::error::{Error, Result};
use crate::lie::{shifted_norm_scaled, RootSystem, Weight};
use crate::sum::pairwise_sum;

/// Default bound on weight-term evaluations for a scan.
pub const DEFAULT_TERM_BUDGET: u128 = 10_000_000;

/// A fibre knot: a base-point tag and its representation label. The tag
/// never enters the value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreLabel {
    pub point: String,
    pub weight: Weight,
}

impl FibreLabel {
    pub fn new(point: impl Into<String>, weight: Weight) -> Self {
        FibreLabel {
            point: point.into(),
            weight,
        }
    }

    /// Labels tagged x1, x2, ... in order.
    pub fn tagged(weights: &[Weight]) -> Vec<FibreLabel> {
        weights
            .iter()
            .enumerate()
            .map(|(i, w)| FibreLabel::new(format!("x{}", i + 1), w.clone()))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SeifertSpec {
    pub rs: RootSystem,
    pub level: u32,
    pub genus: u32,
    /// The bundle has degree -p.
    pub degree: i64,
    pub labels: Vec<FibreLabel>,
    pub framing: FramingConvention,
    pub include_centre_factor: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conventions {
    pub framing: FramingConvention,
    pub centre_factor: bool,
    /// The quadratic form in the phase, with its sign.
    pub exponent: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeifertValue {
    pub value_re: f64,
    pub value_im: f64,
    pub modulus: f64,
    pub terms: u64,
    pub conventions: Conventions,
}

impl SeifertValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// The phase of the lambda summand as an exact fraction of a full turn.
fn phase_turns(md: &ModularData, weight: &Weight, degree: i64, framing: FramingConvention) -> (i128, i128) {
    let rs = md.rs();
    let (num, den) = match framing {
        // <lambda+rho, lambda+rho> / 2(k+h), scaled by det
        FramingConvention::Bare => (
            shifted_norm_scaled(rs, weight),
            2 * rs.pairing_denominator() * md.shifted_level(),
        ),
        FramingConvention::Canonical => t_exponent(rs, md.level(), weight, FramingConvention::Canonical),
    };
    let den = den as i128;
    ((-(degree as i128) * num as i128).rem_euclid(den), den)
}

/// The summands of Z, in the order of `md.weights()`.
pub fn seifert_terms(
    md: &ModularData,
    genus: u32,
    degree: i64,
    labels: &[Weight],
    framing: FramingConvention,
) -> Result<Vec<Complex64>> {
    let idx: Vec<usize> = labels.iter().map(|w| md.require_integrable(w)).collect::<Result<_>>()?;
    let exponent = 2 - 2 * genus as i32 - idx.len() as i32;
    Ok(md
        .weights()
        .iter()
        .enumerate()
        .map(|(l, w)| {
            let s0 = md.s(0, l);
            let amp = idx.iter().fold(s0.powi(exponent), |acc, &i| acc * md.s(i, l));
            if degree == 0 {
                return amp;
            }
            let (num, den) = phase_turns(md, w, degree, framing);
            let theta = 2.0 * std::f64::consts::PI * (num as f64 / den as f64);
            amp * Complex64::from_polar(1.0, theta)
        })
        .collect())
}

fn conventions(framing: FramingConvention, centre: bool) -> Conventions {
    Conventions {
        framing,
        centre_factor: centre,
        exponent: match framing {
            FramingConvention::Bare => "exp(-i pi p <lambda+rho,lambda+rho>/(k+h))".into(),
            FramingConvention::Canonical => "T_lambda^(-p), T = exp(2 pi i (h_lambda - c/24))".into(),
        },
    }
}

/// Z for given modular data, genus, degree and labels.
pub fn seifert_with(
    md: &ModularData,
    genus: u32,
    degree: i64,
    labels: &[Weight],
    framing: FramingConvention,
    include_centre_factor: bool,
) -> Result<SeifertValue> {
    let terms = seifert_terms(md, genus, degree, labels, framing)?;
    let mut value = pairwise_sum(&terms);
    if include_centre_factor {
        value /= md.rs().centre_order() as f64;
    }
    Ok(SeifertValue {
        value_re: value.re,
        value_im: value.im,
        modulus: value.norm(),
        terms: terms.len() as u64,
        conventions: conventions(framing, include_centre_factor),
    })
}

pub fn seifert_partition(spec: &SeifertSpec) -> Result<SeifertValue> {
    let md = s_matrix(&spec.rs, spec.level)?;
    let weights: Vec<Weight> = spec.labels.iter().map(|l| l.weight.clone()).collect();
    seifert_with(
        &md,
        spec.genus,
        spec.degree,
        &weights,
        spec.framing,
        spec.include_centre_factor,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeifertCell {
    pub k: u32,
    pub genus: u32,
    pub degree: i64,
    pub value: SeifertValue,
}

#[derive(Clone, Debug)]
pub struct ScanRequest {
    pub rs: RootSystem,
    pub genera: RangeInclusive<u32>,
    pub degrees: RangeInclusive<i64>,
    pub levels: RangeInclusive<u32>,
    pub labels: Vec<Weight>,
    pub framing: FramingConvention,
    pub include_centre_factor: bool,
    pub budget: u128,
}

/// Weight-term evaluations a scan needs, counted before any work is done.
pub fn scan_cost(req: &ScanRequest) -> u128 {
    let cells = req.genera.clone().count() as u128 * req.degrees.clone().count() as u128;
    let per_term = 1 + req.labels.len() as u128;
    req.levels
        .clone()
        .map(|k| crate::cft::integrable_weights(&req.rs, k).len() as u128 * cells * per_term)
        .sum()
}

/// Every (k, g, p) cell, ordered by k, then g, then p. All-or-nothing: a
/// scan over budget computes nothing.
pub fn seifert_scan(req: &ScanRequest) -> Result<Vec<SeifertCell>> {
    let needed = scan_cost(req);
    if needed > req.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: req.budget,
        });
    }
    let per_level: Vec<Vec<SeifertCell>> = req
        .levels
        .clone()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let md = s_matrix(&req.rs, k)?;
            let mut cells = Vec::new();
            for g in req.genera.clone() {
                for p in req.degrees.clone() {
                    let value = seifert_with(&md, g, p, &req.labels, req.framing, req.include_centre_factor)?;
                    cells.push(SeifertCell {
                        k,
                        genus: g,
                        degree: p,
                        value,
                    });
                }
            }
            Ok(cells)
        })
        .collect::<Result<_>>()?;
    Ok(per_level.into_iter().flatten().collect())
}
