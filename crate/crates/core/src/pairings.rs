//! Quasi-polynomial structure of Verlinde dimensions in the level.
//!
//! By Riemann-Roch, dim H^0(M, L^k) = int_M Todd(M) ch(L^k) is a
//! quasi-polynomial in k whose coefficient of k^d pairs Omega^d/d! with a
//! component of the Todd class; the top coefficient is the symplectic volume
//! over (dim_C M)!. The fit here is exact: integer samples go through
//! fraction-free (Bareiss) elimination and come out as rationals, and every
//! sample not used to solve is checked with zero tolerance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::RootSystem;
use crate::verlinde::verlinde_table;
use crate::ym2::{verlinde_ym2_crosscheck, VerlindeYm2Report};

/// A function polynomial on each residue class of k modulo `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPolynomial {
    pub period: usize,
    pub degree: usize,
    /// coeffs[c][j] is the coefficient of k^j on the class k = c mod period.
    pub coeffs: Vec<Vec<BigRational>>,
}

impl QuasiPolynomial {
    pub fn eval(&self, k: i64) -> BigRational {
        let class = k.rem_euclid(self.period as i64) as usize;
        let x = BigRational::from_integer(BigInt::from(k));
        self.coeffs[class]
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * &x + c)
    }

    /// Coefficient of k^degree on each class.
    pub fn leading(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|c| c[self.degree].clone()).collect()
    }

    /// True when every class carries the same polynomial.
    pub fn is_polynomial(&self) -> bool {
        self.coeffs.windows(2).all(|w| w[0] == w[1])
    }
}

/// Solves V c = y for the Vandermonde system on the nodes `xs` by Bareiss
/// elimination over the integers.
fn solve_vandermonde(xs: &[i64], ys: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = xs.len();
    let mut m: Vec<Vec<BigInt>> = xs
        .iter()
        .zip(ys)
        .map(|(&x, y)| {
            let mut row: Vec<BigInt> = Vec::with_capacity(n + 1);
            let mut p = BigInt::one();
            for _ in 0..n {
                row.push(p.clone());
                p *= x;
            }
            row.push(y.clone());
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero())?;
            m.swap(k, swap);
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                // exact division is the Bareiss invariant
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut sol = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = BigRational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= BigRational::from_integer(m[i][j].clone()) * &sol[j];
        }
        sol[i] = acc / BigRational::from_integer(m[i][i].clone());
    }
    Some(sol)
}

fn eval_poly(coeffs: &[BigRational], k: i64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(k));
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
}

/// Lowest-degree exact fit of one residue class, with the class's best
/// residual at the degree bound when none exists.
fn fit_class(points: &[(i64, BigInt)], degree_bound: usize) -> std::result::Result<(usize, Vec<BigRational>), BigRational> {
    let mut best = None;
    for d in 0..=degree_bound {
        if points.len() < d + 2 {
            break;
        }
        let xs: Vec<i64> = points[..=d].iter().map(|p| p.0).collect();
        let ys: Vec<BigInt> = points[..=d].iter().map(|p| p.1.clone()).collect();
        let Some(c) = solve_vandermonde(&xs, &ys) else { continue };
        let residual = points[d + 1..]
            .iter()
            .map(|(k, v)| (eval_poly(&c, *k) - BigRational::from_integer(v.clone())).abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        if residual.is_zero() {
            return Ok((d, c));
        }
        best = Some(residual);
    }
    Err(best.unwrap_or_else(|| BigRational::from_integer(BigInt::from(-1))))
}

/// The quasi-polynomial of least period (then least degree) reproducing
/// every sample exactly.
///
/// A residue class is only accepted if it has a sample beyond those used to
/// solve for its coefficients, so every fit is checked at least once.
pub fn fit_quasi_polynomial(samples: &[(i64, BigInt)], degree_bound: usize, max_period: usize) -> Result<QuasiPolynomial> {
    let mut ks: Vec<i64> = samples.iter().map(|s| s.0).collect();
    ks.sort_unstable();
    if ks.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput("sample points must be distinct".into()));
    }
    if max_period == 0 {
        return Err(Error::InvalidInput("max_period must be >= 1".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|s| s.0);
    let mut best_residual: Option<BigRational> = None;
    'period: for period in 1..=max_period {
        let mut classes: Vec<Vec<(i64, BigInt)>> = vec![Vec::new(); period];
        for (k, v) in &sorted {
            classes[k.rem_euclid(period as i64) as usize].push((*k, v.clone()));
        }
        let mut fits = Vec::with_capacity(period);
        for class in &classes {
            match fit_class(class, degree_bound) {
                Ok(f) => fits.push(f),
                Err(r) => {
                    if r.is_positive() && best_residual.as_ref().is_none_or(|b| &r < b) {
                        best_residual = Some(r);
                    }
                    continue 'period;
                }
            }
        }
        let degree = fits.iter().map(|f| f.0).max().unwrap_or(0);
        let coeffs = fits
            .into_iter()
            .map(|(_, mut c)| {
                c.resize(degree + 1, BigRational::zero());
                c
            })
            .collect();
        return Ok(QuasiPolynomial { period, degree, coeffs });
    }
    Err(Error::NotQuasiPolynomial {
        degree_bound,
        max_period,
        best_residual: best_residual.map_or_else(|| "insufficient samples".to_string(), |r| r.to_string()),
    })
}

/// Degree of the Verlinde quasi-polynomial: 0 in genus 0, the rank in genus
/// 1 (counting integrable weights), and (g-1) dim g (the complex dimension
/// of the moduli space) in genus >= 2.
pub fn expected_degree(rs: &RootSystem, genus: u32) -> usize {
    match genus {
        0 => 0,
        1 => rs.rank(),
        g => (g as usize - 1) * rs.dimension() as usize,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub algebra: String,
    pub genus: u32,
    pub k_max: u32,
    pub expected_degree: usize,
    pub degree: usize,
    pub period: usize,
    /// Exact coefficients of k^0..k^degree per residue class, as fractions.
    pub coefficients: Vec<Vec<String>>,
    /// Coefficient of k^degree: the top pairing, volume / degree!.
    pub leading_coefficient: Vec<String>,
    /// leading coefficient times degree!, the symplectic volume.
    pub leading_pairing: Vec<String>,
    /// Scaled Verlinde values against Z_g(0), genus >= 2 only.
    pub ym2_crosscheck: Option<VerlindeYm2Report>,
}

/// Fits the Verlinde table for k = 1..=k_max and reads off the pairings.
pub fn pairing_report(rs: &RootSystem, genus: u32, k_max: u32, max_period: usize) -> Result<PairingReport> {
    let expected = expected_degree(rs, genus);
    let needed = (3 * expected).max(expected + 2) as u32;
    if k_max < needed {
        return Err(Error::InvalidInput(format!(
            "k_max must be at least {needed} for genus {genus} (expected degree {expected})"
        )));
    }
    let table = verlinde_table(rs, genus, 1..=k_max, &[])?;
    let samples: Vec<(i64, BigInt)> = table
        .rows
        .iter()
        .map(|r| (r.k as i64, BigInt::from(r.dimension)))
        .collect();
    let qp = fit_quasi_polynomial(&samples, expected, max_period)?;
    let factorial: BigInt = (1..=qp.degree as u64).map(BigInt::from).product();
    let leading = qp.leading();
    let ym2_crosscheck = if genus >= 2 {
        Some(verlinde_ym2_crosscheck(rs, genus, &[10, 20, 40, 80])?)
    } else {
        None
    };
    Ok(PairingReport {
        algebra: rs.label(),
        genus,
        k_max,
        expected_degree: expected,
        degree: qp.degree,
        period: qp.period,
        coefficients: qp
            .coeffs
            .iter()
            .map(|c| c.iter().map(|x| x.to_string()).collect())
            .collect(),
        leading_pairing: leading
            .iter()
            .map(|c| (c * BigRational::from_integer(factorial.clone())).to_string())
            .collect(),
        leading_coefficient: leading.iter().map(|c| c.to_string()).collect(),
        ym2_crosscheck,
    })
}
