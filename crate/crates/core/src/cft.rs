//! Level-k modular data of the WZW model.
//!
//! The S-matrix is assembled from the Kac-Peterson formula
//!
//! ```text
//! S_{LM} = i^{|D+|} |P/(k+h)Q|^{-1/2} sum_w e(w) exp(-2 pi i <w(L+rho), M+rho> / (k+h))
//! ```
//!
//! Every pairing <w(L+rho), M+rho> is an exact rational with denominator
//! det(Cartan), so the phases are roots of unity of order det*(k+h) and are
//! read from a precomputed table rather than from a floating-point angle.
//! The matrix is certified (unitary, symmetric, S^2 a permutation C with
//! C^2 = 1, (ST)^3 = S^2, positive first row); a failed certification is
//! retried once in double-double arithmetic before giving up.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hp::{hp_sqrt, roots_of_unity, HpComplex, DEFAULT_BITS};
use crate::error::{Error, Result};
use crate::lie::{casimir_scaled, RootSystem, Weight};
use crate::sum::pairwise_sum;

pub const CERTIFICATION_TOLERANCE: f64 = 1e-10;

/// Default bound on |W| * |weights|^2 for S-matrix assembly.
pub const DEFAULT_S_BUDGET: u128 = 4_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FramingConvention {
    /// Phases exp(2 pi i h_L) with no central-charge correction.
    Bare,
    /// Phases exp(2 pi i (h_L - c/24)), for which (ST)^3 = S^2.
    Canonical,
}

impl FromStr for FramingConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bare" => Ok(FramingConvention::Bare),
            "canonical" => Ok(FramingConvention::Canonical),
            other => Err(Error::UnknownConvention(other.to_string())),
        }
    }
}

impl fmt::Display for FramingConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FramingConvention::Bare => write!(f, "bare"),
            FramingConvention::Canonical => write!(f, "canonical"),
        }
    }
}

/// Working precision of S-matrix assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    Double,
    /// Software binary float with the given mantissa bits.
    Extended(u32),
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::Extended(b) => b,
        }
    }

    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            0..=52 => Err(Error::InvalidInput(format!("precision of {bits} bits is below binary64"))),
            53 => Ok(Precision::Double),
            54..=4096 => Ok(Precision::Extended(bits)),
            _ => Err(Error::InvalidInput(format!("precision of {bits} bits unsupported (max 4096)"))),
        }
    }

    /// The precision used when certification at `self` fails.
    fn retry(self) -> Option<Precision> {
        match self {
            Precision::Double => Some(Precision::Extended(DEFAULT_BITS as u32)),
            Precision::Extended(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ModularOptions {
    pub precision: Precision,
    pub budget: u128,
    pub tolerance: f64,
}

impl Default for ModularOptions {
    fn default() -> Self {
        ModularOptions {
            precision: Precision::Double,
            budget: DEFAULT_S_BUDGET,
            tolerance: CERTIFICATION_TOLERANCE,
        }
    }
}

/// Residual norms (max-entry) of the modular identities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub unitarity: f64,
    pub symmetry: f64,
    /// Distance of S^2 from the nearest permutation matrix.
    pub s_squared_permutation: f64,
    /// 0 when C^2 = 1 exactly, 1 otherwise.
    pub charge_conjugation_involution: f64,
    /// (ST)^3 - S^2 under the canonical framing.
    pub modular_relation: f64,
    /// min_L Re S_{0L}, together with max |Im S_{0L}|.
    pub first_row_min: f64,
    pub first_row_imag: f64,
    pub tolerance: f64,
}

impl Certification {
    pub fn max_residual(&self) -> f64 {
        [
            self.unitarity,
            self.symmetry,
            self.s_squared_permutation,
            self.charge_conjugation_involution,
            self.modular_relation,
            self.first_row_imag,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() < self.tolerance && self.first_row_min > 0.0
    }
}

/// Certified level-k modular data.
#[derive(Clone, Debug)]
pub struct ModularData {
    rs: RootSystem,
    level: u32,
    weights: Vec<Weight>,
    index: HashMap<Weight, usize>,
    s: Vec<Complex64>,
    /// S at extended precision, kept when assembled at that precision.
    s_hp: Option<Vec<HpComplex>>,
    t: Vec<Complex64>,
    conjugation: Vec<usize>,
    precision: Precision,
    certification: Certification,
}

impl ModularData {
    pub fn rs(&self) -> &RootSystem {
        &self.rs
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// k + dual Coxeter number.
    pub fn shifted_level(&self) -> i64 {
        self.level as i64 + self.rs.dual_coxeter()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn s(&self, a: usize, b: usize) -> Complex64 {
        self.s[a * self.len() + b]
    }

    /// S_ab at extended precision, when assembled at that precision.
    pub fn s_hp(&self, a: usize, b: usize) -> Option<&HpComplex> {
        self.s_hp.as_ref().map(|s| &s[a * self.len() + b])
    }

    /// The same data assembled (or kept) at extended precision.
    pub fn to_extended(&self) -> Result<ModularData> {
        if self.s_hp.is_some() {
            return Ok(self.clone());
        }
        s_matrix_with(
            &self.rs,
            self.level,
            ModularOptions {
                precision: Precision::Extended(DEFAULT_BITS as u32),
                budget: u128::MAX,
                tolerance: self.certification.tolerance,
            },
        )
    }

    /// Canonical-framing T eigenvalue.
    pub fn t(&self, a: usize) -> Complex64 {
        self.t[a]
    }

    /// Index of the charge conjugate L* (from S^2 = C).
    pub fn conjugate(&self, a: usize) -> usize {
        self.conjugation[a]
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision.bits()
    }

    pub fn certification(&self) -> &Certification {
        &self.certification
    }

    pub fn index_of(&self, w: &Weight) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn require_integrable(&self, w: &Weight) -> Result<usize> {
        self.rs.check_weight(w)?;
        self.index_of(w).ok_or_else(|| Error::NotIntegrable {
            weight: w.to_string(),
            level: self.level,
        })
    }

    /// S as a row-major matrix.
    pub fn s_rows(&self) -> Vec<Vec<Complex64>> {
        self.s.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    /// Verlinde fusion coefficient N_{ab}^c.
    pub fn fusion(&self, a: usize, b: usize, c: usize) -> Complex64 {
        let terms: Vec<Complex64> = (0..self.len())
            .map(|q| self.s(a, q) * self.s(b, q) * self.s(c, q).conj() / self.s(0, q))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Dominant weights with <L, theta> <= k, in lexicographic order of their
/// fundamental-weight coordinates.
pub fn integrable_weights(rs: &RootSystem, level: u32) -> Vec<Weight> {
    fn rec(r: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if prefix.len() == r {
            out.push(Weight(prefix.clone()));
            return;
        }
        for a in 0..=left {
            prefix.push(a);
            rec(r, left - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rs.rank(), level as i64, &mut Vec::with_capacity(rs.rank()), &mut out);
    debug_assert!(out.iter().all(|w| rs.level_of(w) <= level as i64));
    out
}

pub fn s_matrix(rs: &RootSystem, level: u32) -> Result<ModularData> {
    s_matrix_with(rs, level, ModularOptions::default())
}

pub fn s_matrix_with(rs: &RootSystem, level: u32, opts: ModularOptions) -> Result<ModularData> {
    if level == 0 {
        return Err(Error::InvalidInput("level must be >= 1".into()));
    }
    let weights = integrable_weights(rs, level);
    let n = weights.len() as u128;
    let needed = rs.weyl_order() * n * n;
    if needed > opts.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: opts.budget,
        });
    }
    let first = assemble(rs, level, &weights, opts.precision, opts.tolerance)?;
    match opts.precision.retry() {
        Some(p) if !first.certification.passed() => finish(assemble(rs, level, &weights, p, opts.tolerance)?),
        _ => finish(first),
    }
}

fn finish(md: ModularData) -> Result<ModularData> {
    let c = &md.certification;
    if c.passed() {
        return Ok(md);
    }
    let (what, residual) = if c.first_row_min <= 0.0 {
        ("first-row positivity", -c.first_row_min)
    } else {
        let named = [
            ("unitarity", c.unitarity),
            ("symmetry", c.symmetry),
            ("S^2 permutation", c.s_squared_permutation),
            ("C^2 = 1", c.charge_conjugation_involution),
            ("(ST)^3 = S^2", c.modular_relation),
            ("first-row reality", c.first_row_imag),
        ];
        named
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty")
    };
    Err(Error::Certification {
        what: format!("S-matrix {} at level {}: {what}", md.rs.label(), md.level),
        residual,
        tolerance: c.tolerance,
    })
}

fn assemble(
    rs: &RootSystem,
    level: u32,
    weights: &[Weight],
    precision: Precision,
    tolerance: f64,
) -> Result<ModularData> {
    let weyl = rs.weyl()?;
    let n = weights.len();
    let kh = level as i64 + rs.dual_coxeter();
    let order = rs.pairing_denominator() * kh;

    // w(L + rho) for every weight and Weyl element
    let shifted: Vec<Vec<i64>> = weights.iter().map(|w| w.0.iter().map(|a| a + 1).collect()).collect();
    let images: Vec<Vec<(Vec<i64>, i8)>> = shifted
        .iter()
        .map(|l| weyl.elements().iter().map(|e| (e.act(l), e.sign())).collect())
        .collect();

    // index of exp(-2 pi i <img, M+rho>/(k+h)) in the root-of-unity table
    let phase_index = |b: usize, img: &[i64]| -> usize {
        (-rs.pairing_scaled(img, &shifted[b])).rem_euclid(order) as usize
    };

    let positive = rs.positive_roots().len();
    // i^{|D+|}
    let rot = match positive % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let norm_sq = (rs.pairing_denominator() as f64) * (kh as f64).powi(rs.rank() as i32);

    let (s, s_hp): (Vec<Complex64>, Option<Vec<HpComplex>>) = match precision {
        Precision::Double => {
            let table: Vec<Complex64> = (0..order)
                .map(|m| {
                    let theta = 2.0 * std::f64::consts::PI * (m as f64) / (order as f64);
                    Complex64::new(theta.cos(), theta.sin())
                })
                .collect();
            let scale = 1.0 / norm_sq.sqrt();
            let s = (0..n * n)
                .into_par_iter()
                .map(|ab| {
                    let (a, b) = (ab / n, ab % n);
                    let terms: Vec<Complex64> = images[a]
                        .iter()
                        .map(|(img, sign)| table[phase_index(b, img)] * (*sign as f64))
                        .collect();
                    rot * pairwise_sum(&terms) * scale
                })
                .collect();
            (s, None)
        }
        Precision::Extended(bits) => {
            let bits = bits as usize;
            let table = roots_of_unity(order, bits)?;
            let scale = hp_sqrt(norm_sq, bits).reciprocal(bits, astro_float::RoundingMode::ToEven);
            let s_hp: Vec<HpComplex> = (0..n * n)
                .into_par_iter()
                .map(|ab| {
                    let (a, b) = (ab / n, ab % n);
                    let mut acc = HpComplex::zero(bits);
                    for (img, sign) in &images[a] {
                        let z = &table[phase_index(b, img)];
                        acc = if *sign > 0 { acc.add(z, bits) } else { acc.sub(z, bits) };
                    }
                    acc.scale(&scale, bits).rotate_quarter(positive)
                })
                .collect();
            (s_hp.iter().map(|z| z.to_c64()).collect(), Some(s_hp))
        }
    };

    let t = t_phases(rs, level, weights, FramingConvention::Canonical);
    let index: HashMap<Weight, usize> = weights.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let (certification, conjugation) = certify(&s, &t, n, tolerance);
    Ok(ModularData {
        rs: rs.clone(),
        level,
        weights: weights.to_vec(),
        index,
        s,
        s_hp,
        t,
        conjugation,
        precision,
        certification,
    })
}

fn matmul(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let terms: Vec<Complex64> = (0..n).map(|l| a[i * n + l] * b[l * n + j]).collect();
            pairwise_sum(&terms)
        })
        .collect()
}

fn certify(s: &[Complex64], t: &[Complex64], n: usize, tolerance: f64) -> (Certification, Vec<usize>) {
    let mut cert = Certification {
        tolerance,
        ..Default::default()
    };
    let s_dag: Vec<Complex64> = (0..n * n).map(|ij| s[(ij % n) * n + ij / n].conj()).collect();
    let uu = matmul(s, &s_dag, n);
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            cert.unitarity = cert.unitarity.max((uu[i * n + j] - target).norm());
            cert.symmetry = cert.symmetry.max((s[i * n + j] - s[j * n + i]).norm());
        }
    }
    let s2 = matmul(s, s, n);
    let mut conjugation = vec![0usize; n];
    for i in 0..n {
        let row = &s2[i * n..(i + 1) * n];
        let j = (0..n)
            .max_by(|&a, &b| row[a].norm().total_cmp(&row[b].norm()))
            .unwrap_or(0);
        conjugation[i] = j;
        for (l, v) in row.iter().enumerate() {
            let target = if l == j { 1.0 } else { 0.0 };
            cert.s_squared_permutation = cert.s_squared_permutation.max((v - target).norm());
        }
    }
    let is_involution = (0..n).all(|i| conjugation[conjugation[i]] == i);
    cert.charge_conjugation_involution = if is_involution { 0.0 } else { 1.0 };

    let st: Vec<Complex64> = (0..n * n).map(|ij| s[ij] * t[ij % n]).collect();
    let st3 = matmul(&matmul(&st, &st, n), &st, n);
    cert.modular_relation = st3
        .iter()
        .zip(&s2)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);

    cert.first_row_min = (0..n).map(|j| s[j].re).fold(f64::INFINITY, f64::min);
    cert.first_row_imag = (0..n).map(|j| s[j].im.abs()).fold(0.0, f64::max);
    (cert, conjugation)
}

/// Exponent of T_L as an exact fraction num/den of a full turn.
pub(crate) fn t_exponent(rs: &RootSystem, level: u32, w: &Weight, framing: FramingConvention) -> (i64, i64) {
    let kh = level as i64 + rs.dual_coxeter();
    let det = rs.pairing_denominator();
    // h_L = C(L) / 2(k+h);  c/24 = k dim g / 24(k+h)
    let mut num = 12 * casimir_scaled(rs, w);
    if framing == FramingConvention::Canonical {
        num -= level as i64 * rs.dimension() * det;
    }
    let den = 24 * det * kh;
    (num.rem_euclid(den), den)
}

fn t_phases(rs: &RootSystem, level: u32, weights: &[Weight], framing: FramingConvention) -> Vec<Complex64> {
    weights
        .iter()
        .map(|w| {
            let (num, den) = t_exponent(rs, level, w, framing);
            let theta = 2.0 * std::f64::consts::PI * num as f64 / den as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// Diagonal of the T-matrix under the given framing convention.
pub fn t_matrix(rs: &RootSystem, level: u32, framing: FramingConvention) -> Result<Vec<Complex64>> {
    if level == 0 {
        return Err(Error::InvalidInput("level must be >= 1".into()));
    }
    Ok(t_phases(rs, level, &integrable_weights(rs, level), framing))
}

/// The central charge k dim g / (k + h).
pub fn central_charge(rs: &RootSystem, level: u32) -> f64 {
    let kh = level as i64 + rs.dual_coxeter();
    (level as i64 * rs.dimension()) as f64 / kh as f64
}
