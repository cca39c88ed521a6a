//! Consistency suites tying the modules together.
//!
//! Each check reports its tolerance and the largest residual it saw. Reports
//! carry no timings or other run-dependent data, so a fixed seed gives
//! byte-identical JSON.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cft::{s_matrix, FramingConvention};
use crate::error::{Error, Result};
use crate::genera::{j_euler_product, j_function};
use crate::lie::{build_root_system, CartanElement, RootSystem, Series, Weight};
use crate::orbits::{kirillov_check, orbit_fourier, su2_orbit_quadrature, wilson_point, wilson_weight, CoadjointOrbit};
use crate::pairings::fit_quasi_polynomial;
use crate::seifert::seifert_with;
use crate::verlinde::{verlinde_dimension_with, verlinde_sum, verlinde_sum_hp, verlinde_table, INTEGRALITY_TOLERANCE};
use crate::ym2::{decreasing_and_convex, ym2_partition, YM2Request};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(Error::InvalidInput(format!("unknown suite {other:?} (quick|full)"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Suite::Quick => write!(f, "quick"),
            Suite::Full => write!(f, "full"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub tolerance: f64,
    /// None when the check raised an error.
    pub max_residual: Option<f64>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub schema: u32,
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

type Check = (&'static str, f64, Box<dyn Fn(u64) -> Result<(f64, String)>>);

fn a(r: usize) -> RootSystem {
    build_root_system(Series::A, r).expect("type A exists in every rank")
}

fn w(v: &[i64]) -> Weight {
    Weight(v.to_vec())
}

fn random_point(rng: &mut ChaCha8Rng, r: usize, scale: f64) -> CartanElement {
    CartanElement::from_real(&(0..r).map(|_| rng.gen_range(-scale..scale)).collect::<Vec<_>>())
}

fn run(name: &'static str, tolerance: f64, seed: u64, f: &dyn Fn(u64) -> Result<(f64, String)>) -> CheckResult {
    match f(seed) {
        Ok((residual, detail)) => CheckResult {
            name: name.into(),
            tolerance,
            max_residual: Some(residual),
            passed: residual <= tolerance,
            detail,
        },
        Err(e) => CheckResult {
            name: name.into(),
            tolerance,
            max_residual: None,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// |Z(p=0)| - Verlinde over levels, genera and label sets.
fn p0_reduction(r: usize, kmax: u32, gmax: u32, label_sets: &[Vec<Weight>]) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=kmax {
        let md = s_matrix(&a(r), k)?;
        for g in 0..=gmax {
            for labels in label_sets {
                let z = seifert_with(&md, g, 0, labels, FramingConvention::Bare, false)?;
                let v = verlinde_dimension_with(&md, g, labels)? as f64;
                worst = worst.max((z.value() - v).norm());
                cases += 1;
            }
        }
    }
    Ok((worst, format!("A{r}, k<={kmax}, g<={gmax}: {cases} cases")))
}

fn integrality(r: usize, kmax: u32, gmax: u32, label_sets: &[Vec<Weight>]) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for k in 1..=kmax {
        let md = s_matrix(&a(r), k)?;
        for g in 0..=gmax {
            for labels in label_sets {
                let n = verlinde_dimension_with(&md, g, labels)? as f64;
                let mut residual = (verlinde_sum(&md, g, labels)? - n).norm();
                if residual >= INTEGRALITY_TOLERANCE {
                    // the dimension came from the extended-precision retry
                    let hp = verlinde_sum_hp(&md.to_extended()?, g, labels)?.expect("extended-precision data");
                    residual = (hp - n).norm();
                }
                worst = worst.max(residual);
                cases += 1;
            }
        }
        if gmax >= 1 {
            let n = verlinde_dimension_with(&md, 1, &[])? as usize;
            if n != md.len() {
                return Err(Error::InvalidInput(format!("genus 1 at k={k}: {n} != {}", md.len())));
            }
        }
    }
    Ok((worst, format!("A{r}, k<={kmax}, g<={gmax}: {cases} cases")))
}

fn certification(r: usize, kmax: u32) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let md = s_matrix(&a(r), k)?;
        worst = worst.max(md.certification().max_residual());
    }
    Ok((worst, format!("A{r}, k<={kmax}: unitarity, symmetry, S^2 = C, C^2 = 1, (ST)^3 = S^2")))
}

fn kirillov_random(ranks: &[usize], cases: usize, seed: u64) -> Result<(f64, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for case in 0..cases {
        let r = ranks[case % ranks.len()];
        let rs = a(r);
        let hw = Weight((0..r).map(|_| rng.gen_range(0..4)).collect());
        let x = random_point(&mut rng, r, 1.5);
        worst = worst.max(kirillov_check(&rs, &hw, &x)?);
    }
    Ok((worst, format!("{cases} random cases over ranks {ranks:?}")))
}

fn quadrature(max_label: i64, samples: usize) -> Result<(f64, String)> {
    let rs = a(1);
    let mut worst = 0.0f64;
    for n in 0..=max_label {
        let orbit = CoadjointOrbit::for_highest_weight(&rs, &w(&[n]))?;
        for s in 0..samples {
            let t = 0.05 + 0.15 * s as f64;
            let q = su2_orbit_quadrature(n as f64 / 2.0, t, 64)?;
            let x = CartanElement::from_coroot_coords(vec![Complex64::new(t, 0.0)]);
            worst = worst.max((q - orbit_fourier(&orbit, &x)?).norm());
        }
    }
    Ok((worst, format!("Lambda <= {max_label} omega_1, {samples} values of t, 64 nodes")))
}

fn wilson_character(r: usize, kmax: u32) -> Result<(f64, String)> {
    let rs = a(r);
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let md = s_matrix(&rs, k)?;
        for lab in md.weights() {
            for lam in md.weights() {
                let chi = crate::lie::weyl_character(&rs, lab, &wilson_point(&md, lam))?;
                worst = worst.max((wilson_weight(&md, lab, lam)? - chi).norm());
            }
        }
    }
    Ok((worst, format!("A{r}, k<={kmax}, all label pairs")))
}

fn three_sphere(kmax: u32) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let md = s_matrix(&a(1), k)?;
        let z = seifert_with(&md, 0, 1, &[], FramingConvention::Bare, false)?;
        worst = worst.max((z.modulus - md.s(0, 0).re).abs());
    }
    Ok((worst, format!("|Z(M_(0,1))| = S_00 for A1, k<={kmax}")))
}

fn conjugation(kmax: u32, gmax: u32, pmax: i64) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let md = s_matrix(&a(1), k)?;
        for g in 0..=gmax {
            for p in 1..=pmax {
                let plus = seifert_with(&md, g, p, &[], FramingConvention::Bare, false)?;
                let minus = seifert_with(&md, g, -p, &[], FramingConvention::Bare, false)?;
                worst = worst.max((plus.value() - minus.value().conj()).norm());
            }
        }
    }
    Ok((worst, format!("Z(p) = conj Z(-p), A1, k<={kmax}, g<={gmax}, |p|<={pmax}")))
}

fn framing_modulus(kmax: u32) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for (r, km) in [(1, kmax), (2, kmax.min(3))] {
        for k in 1..=km {
            let md = s_matrix(&a(r), k)?;
            for g in 0..=2 {
                for p in -3..=3 {
                    let b = seifert_with(&md, g, p, &[], FramingConvention::Bare, false)?;
                    let c = seifert_with(&md, g, p, &[], FramingConvention::Canonical, false)?;
                    worst = worst.max((b.modulus - c.modulus).abs());
                }
            }
        }
    }
    Ok((worst, "|Z| under bare and canonical framing".into()))
}

/// Number of points where the Euler-product error fails to shrink.
fn euler_product(ranks: &[usize], points: usize, seed: u64) -> Result<(f64, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    for &r in ranks {
        let rs = a(r);
        for _ in 0..points {
            let x = random_point(&mut rng, r, 2.0);
            let exact = j_function(&rs, &x);
            let errs: Vec<f64> = [100u64, 1_000, 10_000]
                .iter()
                .map(|&n| (j_euler_product(&rs, &x, n) - exact).norm())
                .collect();
            if !(errs[1] < errs[0] && errs[2] < errs[1]) {
                violations += 1;
            }
        }
    }
    Ok((violations as f64, format!("N in {{100, 1000, 10000}}, {points} points per rank {ranks:?}")))
}

fn zeta_anchor(genus: u32, tol: f64) -> Result<(f64, String)> {
    let exact = match genus {
        2 => PI.powi(2) / 6.0,
        3 => PI.powi(4) / 90.0,
        4 => PI.powi(6) / 945.0,
        _ => return Err(Error::InvalidInput(format!("no zeta anchor for genus {genus}"))),
    };
    let v = ym2_partition(&YM2Request {
        rs: a(1),
        genus,
        epsilon: 0.0,
        cutoff: None,
        target_tol: tol,
    })?;
    if v.tail_bound > tol {
        return Err(Error::Certification {
            what: "truncation certificate".into(),
            residual: v.tail_bound,
            tolerance: tol,
        });
    }
    Ok(((v.value - exact).abs(), format!("zeta({}) with cutoff {}", 2 * genus - 2, v.cutoff)))
}

/// 0 when Z_g(eps) is strictly decreasing and convex on the grid.
fn ym2_shape() -> Result<(f64, String)> {
    let grid = [0.0, 0.001, 0.01, 0.1, 1.0];
    let mut bad = 0;
    for g in 2..=4 {
        let pts: Vec<(f64, f64)> = grid
            .iter()
            .map(|&e| {
                ym2_partition(&YM2Request {
                    rs: a(1),
                    genus: g,
                    epsilon: e,
                    cutoff: None,
                    target_tol: 1e-12,
                })
                .map(|v| (e, v.value))
            })
            .collect::<Result<_>>()?;
        let (dec, conv) = decreasing_and_convex(&pts);
        bad += usize::from(!dec) + usize::from(!conv);
    }
    Ok((bad as f64, "A1, g in 2..=4, eps in {0, 0.001, 0.01, 0.1, 1}".into()))
}

/// Largest |prediction - value| over the extrapolated levels; 0 means exact.
fn hrr_fit(genus: u32, fit_to: u32, predict_to: u32, degree: usize) -> Result<(f64, String)> {
    let rs = a(1);
    let table = verlinde_table(&rs, genus, 1..=predict_to, &[])?;
    let samples: Vec<(i64, BigInt)> = table
        .rows
        .iter()
        .filter(|r| r.k <= fit_to)
        .map(|r| (r.k as i64, BigInt::from(r.dimension)))
        .collect();
    let qp = fit_quasi_polynomial(&samples, degree, 4)?;
    let mut worst = 0.0f64;
    for row in table.rows.iter().filter(|r| r.k > fit_to) {
        let diff = qp.eval(row.k as i64) - BigRational::from_integer(BigInt::from(row.dimension));
        let d: f64 = diff.to_string().parse::<f64>().unwrap_or(f64::MAX);
        worst = worst.max(d.abs());
    }
    Ok((
        worst,
        format!(
            "A1 g={genus}: fit k<={fit_to} (period {}, degree {}), predict k<={predict_to}",
            qp.period, qp.degree
        ),
    ))
}

fn genus_factorisation(kmax: u32) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let md = s_matrix(&a(1), k)?;
        let total = verlinde_dimension_with(&md, 2, &[])?;
        let mut glued = 0u64;
        for (i, wt) in md.weights().iter().enumerate() {
            let dual = md.weights()[md.conjugate(i)].clone();
            glued += verlinde_dimension_with(&md, 1, std::slice::from_ref(wt))? * verlinde_dimension_with(&md, 1, &[dual])?;
        }
        worst = worst.max((total as f64 - glued as f64).abs());
    }
    Ok((worst, format!("V_2 = sum V_1(L) V_1(L*), A1 k<={kmax}")))
}

fn quick_checks() -> Vec<Check> {
    let w1 = w(&[1]);
    let sets = vec![vec![], vec![w1.clone()], vec![w1.clone(), w1]];
    let sets2 = sets.clone();
    vec![
        ("p0-reduction-a1", 1e-9, Box::new(move |_| p0_reduction(1, 6, 2, &sets))),
        ("verlinde-integrality-a1", 1e-6, Box::new(move |_| integrality(1, 10, 3, &sets2))),
        ("modular-certification", 1e-9, Box::new(|_| {
            let (a1, _) = certification(1, 10)?;
            let (a2, _) = certification(2, 3)?;
            Ok((a1.max(a2), "A1 k<=10, A2 k<=3".into()))
        })),
        ("kirillov-a1-a2", 1e-9, Box::new(|seed| kirillov_random(&[1, 2], 10, seed))),
        ("quadrature-vs-weyl-sum", 1e-10, Box::new(|_| quadrature(3, 5))),
        ("wilson-character-a1", 1e-9, Box::new(|_| wilson_character(1, 4))),
        ("three-sphere-anchor", 1e-9, Box::new(|_| three_sphere(3))),
        ("euler-product-a1", 0.0, Box::new(|seed| euler_product(&[1], 3, seed))),
        ("ym2-zeta2", 1e-8, Box::new(|_| zeta_anchor(2, 1e-8))),
    ]
}

fn full_checks() -> Vec<Check> {
    let w1 = w(&[1]);
    let a1_sets = vec![vec![], vec![w1.clone()], vec![w1.clone(), w1]];
    let a1_sets2 = a1_sets.clone();
    let a2_sets = vec![vec![], vec![w(&[1, 0])], vec![w(&[1, 0]), w(&[0, 1])]];
    let a2_sets2 = a2_sets.clone();
    vec![
        ("p0-reduction-a1", 1e-9, Box::new(move |_| p0_reduction(1, 10, 3, &a1_sets))),
        ("p0-reduction-a2", 1e-9, Box::new(move |_| p0_reduction(2, 4, 2, &a2_sets))),
        ("verlinde-integrality-a1", 1e-6, Box::new(move |_| integrality(1, 20, 4, &a1_sets2))),
        ("verlinde-integrality-a2", 1e-6, Box::new(move |_| integrality(2, 6, 3, &a2_sets2))),
        ("genus-factorisation", 0.0, Box::new(|_| genus_factorisation(4))),
        ("modular-certification-a1", 1e-9, Box::new(|_| certification(1, 20))),
        ("modular-certification-a2", 1e-9, Box::new(|_| certification(2, 6))),
        ("kirillov-a1-a2-a3", 1e-9, Box::new(|seed| kirillov_random(&[1, 2, 3], 50, seed))),
        ("kirillov-a2", 1e-9, Box::new(|seed| kirillov_random(&[2], 20, seed ^ 0x5eed))),
        ("quadrature-vs-weyl-sum", 1e-10, Box::new(|_| quadrature(6, 20))),
        ("wilson-character", 1e-9, Box::new(|_| {
            let (x, _) = wilson_character(1, 6)?;
            let (y, _) = wilson_character(2, 3)?;
            Ok((x.max(y), "A1 k<=6, A2 k<=3".into()))
        })),
        ("three-sphere-anchor", 1e-9, Box::new(|_| three_sphere(3))),
        ("orientation-conjugation", 1e-12, Box::new(|_| conjugation(4, 2, 3))),
        ("framing-modulus", 1e-10, Box::new(|_| framing_modulus(4))),
        ("euler-product-a1-a2", 0.0, Box::new(|seed| euler_product(&[1, 2], 10, seed))),
        ("ym2-zeta2", 1e-10, Box::new(|_| zeta_anchor(2, 1e-10))),
        ("ym2-zeta4", 1e-10, Box::new(|_| zeta_anchor(3, 1e-10))),
        ("ym2-zeta6", 1e-10, Box::new(|_| zeta_anchor(4, 1e-10))),
        ("ym2-decreasing-convex", 0.0, Box::new(|_| ym2_shape())),
        ("hrr-genus2", 0.0, Box::new(|_| hrr_fit(2, 12, 17, 3))),
        ("hrr-genus3", 0.0, Box::new(|_| hrr_fit(3, 24, 30, 6))),
    ]
}

pub fn crosscheck_suite(suite: Suite, seed: u64) -> CrosscheckReport {
    let checks = match suite {
        Suite::Quick => quick_checks(),
        Suite::Full => full_checks(),
    };
    let results: Vec<CheckResult> = checks
        .iter()
        .map(|(name, tol, f)| run(name, *tol, seed, f.as_ref()))
        .collect();
    let passed = results.iter().all(|c| c.passed);
    CrosscheckReport {
        schema: SCHEMA_VERSION,
        suite,
        seed,
        checks: results,
        passed,
    }
}
