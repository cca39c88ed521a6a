//! Heat-kernel partition function of two-dimensional Yang-Mills theory.
//!
//! ```text
//! Z_g(eps) = sum_{Lambda dominant} (dim Lambda)^{2-2g} exp(-eps C(Lambda)/2)
//! ```
//!
//! on a genus-g surface of unit area. The sum converges for g >= 2 and is
//! truncated at a level cutoff L (all Lambda with <Lambda, theta> <= L),
//! with a certified bound on the discarded tail.
//!
//! For su(2), with n = dim Lambda and C = (n^2-1)/2, the summand
//! f(n) = n^{-s} exp(-eps (n^2-1)/4), s = 2g-2, is decreasing, so the tail is
//! bracketed by the integrals of f over [N+1, inf) and [N, inf); the midpoint
//! of the bracket is added and half its width is the error bound.
//!
//! For rank r >= 2, dim Lambda >= prod (a_i+1) (m+r)/r at level m, every
//! composition of m has a part >= m/r, and C >= r m, which gives
//!
//! ```text
//! tail <= r^{1+2s} zeta(s)^{r-1} (L+r)^{1-2s} / (2s-1) * exp(-eps r (L+1)/2).
//! ```

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cft::integrable_weights;
use crate::error::{Error, Result};
use crate::lie::{casimir_scaled, weyl_dimension_f64, RootSystem};
use crate::sum::pairwise_sum;
use crate::verlinde::verlinde_sum;

/// Largest level cutoff searched automatically.
pub const MAX_AUTO_CUTOFF: u64 = 10_000_000;

/// Share of the target tolerance given to truncation; the rest covers
/// rounding in the partial sum.
const TRUNCATION_SHARE: f64 = 0.9;

/// Largest number of dominant weights summed for rank >= 2.
pub const MAX_WEIGHT_TERMS: u64 = 20_000_000;

#[derive(Clone, Debug)]
pub struct YM2Request {
    pub rs: RootSystem,
    pub genus: u32,
    pub epsilon: f64,
    /// Level cutoff L; chosen automatically when `None`.
    pub cutoff: Option<u64>,
    pub target_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YM2Value {
    pub value: f64,
    /// Certified bound on |value - Z_g(eps)|: truncation plus rounding.
    pub tail_bound: f64,
    pub cutoff: u64,
    pub terms: u64,
}

fn check_request(genus: u32, epsilon: f64, tol: f64) -> Result<()> {
    if genus < 2 {
        return Err(Error::DivergentSum { genus });
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("target tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// Upper bound on int_x^inf t^{-s} exp(-beta (t^2 - 1)) dt for x >= 1.
fn su2_tail_integral(x: f64, s: f64, beta: f64) -> f64 {
    (-beta * (x * x - 1.0)).exp() * x.powf(1.0 - s) / (s - 1.0)
}

/// (estimate of the tail beyond n = N, half-width of its bracket).
fn su2_tail(n_max: u64, s: f64, beta: f64) -> (f64, f64) {
    let n = n_max as f64;
    if beta == 0.0 {
        // both bracket ends are exact
        let upper = n.powf(1.0 - s) / (s - 1.0);
        let lower = (n + 1.0).powf(1.0 - s) / (s - 1.0);
        ((upper + lower) / 2.0, (upper - lower) / 2.0)
    } else {
        let upper = su2_tail_integral(n, s, beta);
        (upper / 2.0, upper / 2.0)
    }
}

fn higher_rank_tail(r: usize, level: u64, s: f64, epsilon: f64) -> f64 {
    let rf = r as f64;
    let zeta_bound = 1.0 + 1.0 / (s - 1.0);
    rf.powf(1.0 + 2.0 * s) * zeta_bound.powi(r as i32 - 1) * (level as f64 + rf).powf(1.0 - 2.0 * s)
        / (2.0 * s - 1.0)
        * (-epsilon * rf * (level as f64 + 1.0) / 2.0).exp()
}

/// Error bound for cutoff L (midpoint half-width for su(2), tail for r >= 2).
fn error_bound(rs: &RootSystem, level: u64, s: f64, epsilon: f64) -> f64 {
    if rs.rank() == 1 {
        su2_tail(level + 1, s, epsilon / 4.0).1
    } else {
        higher_rank_tail(rs.rank(), level, s, epsilon)
    }
}

/// Smallest level cutoff whose error bound is below `tol`, if within `cap`.
pub fn suggested_cutoff(rs: &RootSystem, genus: u32, epsilon: f64, tol: f64, cap: u64) -> Option<u64> {
    let s = 2.0 * genus as f64 - 2.0;
    let mut hi = 1u64;
    while error_bound(rs, hi, s, epsilon) >= tol {
        if hi >= cap {
            return None;
        }
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    if error_bound(rs, lo, s, epsilon) < tol {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if error_bound(rs, mid, s, epsilon) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

pub fn ym2_partition(req: &YM2Request) -> Result<YM2Value> {
    check_request(req.genus, req.epsilon, req.target_tol)?;
    let rs = &req.rs;
    let s = 2.0 * req.genus as f64 - 2.0;
    let cap = if rs.rank() == 1 { MAX_AUTO_CUTOFF } else { weight_level_cap(rs.rank()) };
    let budget = TRUNCATION_SHARE * req.target_tol;
    let suggested = suggested_cutoff(rs, req.genus, req.epsilon, budget, cap);
    let cutoff = match (req.cutoff, suggested) {
        (Some(c), _) if error_bound(rs, c, s, req.epsilon) < budget => c,
        (Some(c), sugg) => {
            return Err(Error::CutoffInsufficient {
                requested: c,
                suggested: sugg.unwrap_or(cap),
                target_tol: req.target_tol,
            })
        }
        (None, Some(c)) => c,
        (None, None) => {
            return Err(Error::CutoffInsufficient {
                requested: cap,
                suggested: cap,
                target_tol: req.target_tol,
            })
        }
    };
    if rs.rank() == 1 {
        Ok(su2_sum(cutoff + 1, s, req.epsilon))
    } else {
        higher_rank_sum(rs, cutoff, s, req.epsilon)
    }
}

/// Terms [`ym2_partition`] would sum for `req`, counted before any work;
/// `None` when no cutoff reaches the target tolerance.
pub fn ym2_cost(req: &YM2Request) -> Result<Option<u128>> {
    check_request(req.genus, req.epsilon, req.target_tol)?;
    let r = req.rs.rank();
    let cap = if r == 1 { MAX_AUTO_CUTOFF } else { weight_level_cap(r) };
    let level = match req.cutoff {
        Some(c) => c,
        None => match suggested_cutoff(&req.rs, req.genus, req.epsilon, TRUNCATION_SHARE * req.target_tol, cap) {
            Some(c) => c,
            None => return Ok(None),
        },
    };
    if r == 1 {
        return Ok(Some(level as u128 + 1));
    }
    // binom(level + r, r)
    let mut count = 1u128;
    for i in 1..=r as u128 {
        count = count * (level as u128 + i) / i;
    }
    Ok(Some(count))
}

/// The largest level whose weight count stays within [`MAX_WEIGHT_TERMS`].
fn weight_level_cap(r: usize) -> u64 {
    // number of weights at level <= L is binom(L + r, r)
    let count = |l: u64| -> f64 { (1..=r as u64).map(|i| (l + i) as f64 / i as f64).product() };
    let mut l = 1;
    while count(l * 2) <= MAX_WEIGHT_TERMS as f64 {
        l *= 2;
    }
    l
}

fn su2_sum(n_max: u64, s: f64, epsilon: f64) -> YM2Value {
    let beta = epsilon / 4.0;
    let terms: Vec<f64> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let nf = n as f64;
            nf.powf(-s) * (-beta * (nf * nf - 1.0)).exp()
        })
        .collect();
    let (tail, half_width) = su2_tail(n_max, s, beta);
    // rounding of the partial sum, pairwise summation of positive terms
    let rounding = 1e-15 * (1.0 + terms.len() as f64).log2();
    let partial = pairwise_sum(&terms);
    YM2Value {
        value: partial + tail,
        tail_bound: half_width + rounding * partial,
        cutoff: n_max - 1,
        terms: n_max,
    }
}

fn higher_rank_sum(rs: &RootSystem, level: u64, s: f64, epsilon: f64) -> Result<YM2Value> {
    let weights = integrable_weights(rs, level as u32);
    let det = rs.pairing_denominator() as f64;
    let terms: Vec<f64> = weights
        .par_iter()
        .map(|w| {
            let dim = weyl_dimension_f64(rs, &w.0);
            let c = casimir_scaled(rs, w) as f64 / det;
            dim.powf(-s) * (-epsilon * c / 2.0).exp()
        })
        .collect();
    let partial = pairwise_sum(&terms);
    let rounding = 1e-15 * (1.0 + terms.len() as f64).log2() * partial;
    Ok(YM2Value {
        value: partial,
        tail_bound: higher_rank_tail(rs.rank(), level, s, epsilon) + rounding,
        cutoff: level,
        terms: terms.len() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub epsilon: f64,
    pub z: f64,
    /// |Z(eps) - Z(0)|
    pub deviation: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YM2Profile {
    pub algebra: String,
    pub genus: u32,
    pub z0: f64,
    pub rows: Vec<ProfileRow>,
    /// Deviations shrink as eps decreases along the list.
    pub deviation_monotone: bool,
}

/// Z_g(eps) - Z_g(0) on a sorted list of positive couplings.
pub fn ym2_epsilon_profile(rs: &RootSystem, genus: u32, eps_list: &[f64], tol: f64) -> Result<YM2Profile> {
    check_request(genus, 0.0, tol)?;
    if eps_list.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidInput("couplings must be finite and positive".into()));
    }
    if eps_list.windows(2).any(|w| w[0] >= w[1]) && eps_list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput("couplings must be sorted".into()));
    }
    let eval = |eps: f64| {
        ym2_partition(&YM2Request {
            rs: rs.clone(),
            genus,
            epsilon: eps,
            cutoff: None,
            target_tol: tol,
        })
    };
    let z0 = eval(0.0)?;
    let rows: Vec<ProfileRow> = eps_list
        .iter()
        .map(|&eps| {
            let z = eval(eps)?;
            Ok(ProfileRow {
                epsilon: eps,
                z: z.value,
                deviation: (z.value - z0.value).abs(),
                tail_bound: z.tail_bound,
            })
        })
        .collect::<Result<_>>()?;
    // order rows by decreasing eps to read the eps -> 0 limit
    let mut by_eps: Vec<&ProfileRow> = rows.iter().collect();
    by_eps.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let deviation_monotone = by_eps.windows(2).all(|w| w[1].deviation < w[0].deviation);
    Ok(YM2Profile {
        algebra: rs.label(),
        genus,
        z0: z0.value,
        rows,
        deviation_monotone,
    })
}

/// Strictly decreasing and convex (increasing slopes) on the sampled grid.
pub fn decreasing_and_convex(points: &[(f64, f64)]) -> (bool, bool) {
    let decreasing = points.windows(2).all(|w| w[1].1 < w[0].1);
    let slopes: Vec<f64> = points
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let convex = slopes.windows(2).all(|s| s[1] >= s[0]);
    (decreasing, convex)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub k: u32,
    pub verlinde: f64,
    pub scaled: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerlindeYm2Report {
    pub algebra: String,
    pub genus: u32,
    /// V_k (k+h)^{-(g-1) dim g}
    pub scaling_exponent: i64,
    pub z0: f64,
    pub rows: Vec<CrosscheckRow>,
    /// Successive ratio differences shrink from the first pair to the last.
    pub converging: bool,
    /// The last ratio, as an estimate of the limiting constant.
    pub fitted_constant: f64,
}

/// Scaled Verlinde dimensions against Z_g(0).
pub fn verlinde_ym2_crosscheck(rs: &RootSystem, genus: u32, k_list: &[u32]) -> Result<VerlindeYm2Report> {
    if genus < 2 {
        return Err(Error::DivergentSum { genus });
    }
    if k_list.len() < 4 || k_list.windows(2).any(|w| w[0] >= w[1]) || k_list[0] == 0 {
        return Err(Error::InvalidInput("need at least 4 increasing positive levels".into()));
    }
    let z0 = ym2_partition(&YM2Request {
        rs: rs.clone(),
        genus,
        epsilon: 0.0,
        cutoff: None,
        target_tol: 1e-8,
    })?;
    let exponent = (genus as i64 - 1) * rs.dimension();
    let rows: Vec<CrosscheckRow> = k_list
        .par_iter()
        .map(|&k| {
            let md = crate::cft::s_matrix(rs, k)?;
            let v = verlinde_sum(&md, genus, &[])?.re;
            let scaled = v * (md.shifted_level() as f64).powf(-(exponent as f64));
            Ok(CrosscheckRow {
                k,
                verlinde: v,
                scaled,
                ratio: scaled / z0.value,
            })
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    let first = (rows[1].ratio - rows[0].ratio).abs();
    let last = (rows[n - 1].ratio - rows[n - 2].ratio).abs();
    Ok(VerlindeYm2Report {
        algebra: rs.label(),
        genus,
        scaling_exponent: exponent,
        z0: z0.value,
        converging: last < first,
        fitted_constant: rows[n - 1].ratio,
        rows,
    })
}
