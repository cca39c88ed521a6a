//! Coadjoint orbits and the Kirillov character formula.
//!
//! For a regular orbit through lambda = Lambda + rho the Duistermaat-Heckman
//! localisation of the orbit integral is the closed Weyl sum
//!
//! ```text
//! F_lambda(x) = sum_w e(w) exp(i <w lambda, x>) / prod_{alpha>0} i alpha(x)
//!             = j(x)^{1/2} chi_Lambda(ix)
//! ```
//!
//! normalised so that F_lambda(0) = dim Lambda. For su(2) the same integral
//! is evaluated directly on the sphere by Gauss-Legendre quadrature in
//! cos(theta), which gives an oracle independent of the Weyl group.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cft::ModularData;
use crate::error::{Error, Result};
use crate::genera::{j_inv_sqrt, j_sqrt};
use crate::lie::{weyl_character, CartanElement, RootSystem, Weight, WEYL_RATIO_MAX_CONDITION};

/// The orbit of a (shifted) weight lambda under the coadjoint action.
#[derive(Clone, Debug)]
pub struct CoadjointOrbit<'a> {
    rs: &'a RootSystem,
    lambda: Weight,
    regular: bool,
}

impl<'a> CoadjointOrbit<'a> {
    /// The orbit through lambda; the representative is moved to the
    /// dominant chamber, so `regular` holds iff it is strictly dominant.
    pub fn through(rs: &'a RootSystem, lambda: &Weight) -> Result<Self> {
        rs.check_weight(lambda)?;
        let lambda = Weight(rs.dominant_conjugate(&lambda.0));
        let regular = lambda.0.iter().all(|&a| a > 0);
        Ok(CoadjointOrbit { rs, lambda, regular })
    }

    /// The orbit through Lambda + rho attached to a highest weight.
    pub fn for_highest_weight(rs: &'a RootSystem, highest: &Weight) -> Result<Self> {
        rs.check_weight(highest)?;
        if !highest.is_dominant() {
            return Err(Error::NonDominant {
                weight: highest.to_string(),
            });
        }
        Self::through(rs, &highest.add(&rs.rho()))
    }

    pub fn rs(&self) -> &RootSystem {
        self.rs
    }

    pub fn lambda(&self) -> &Weight {
        &self.lambda
    }

    pub fn is_regular(&self) -> bool {
        self.regular
    }

    /// Real dimension: twice the number of positive roots not orthogonal to lambda.
    pub fn dimension(&self) -> usize {
        2 * self
            .rs
            .positive_roots()
            .iter()
            .filter(|root| self.rs.weight_root_pairing(&self.lambda.0, root) != 0)
            .count()
    }

    /// Lambda = lambda - rho, defined for regular orbits.
    pub fn highest_weight(&self) -> Option<Weight> {
        self.regular.then(|| self.lambda.sub(&self.rs.rho()))
    }

    fn require_regular(&self) -> Result<Weight> {
        self.highest_weight().ok_or_else(|| Error::DegenerateOrbit {
            label: self.lambda.to_string(),
        })
    }
}

/// Fourier transform of the Liouville measure of a regular orbit at x.
pub fn orbit_fourier(orbit: &CoadjointOrbit<'_>, x: &CartanElement) -> Result<Complex64> {
    let highest = orbit.require_regular()?;
    let rs = orbit.rs;
    let ix = x.scale(Complex64::i());
    let (num, scale) = rs.weyl()?.alternating_sum(&orbit.lambda.0, &ix);
    let den: Complex64 = rs
        .positive_root_values(x)
        .into_iter()
        .map(|a| a * Complex64::i())
        .product();
    if num.norm() * WEYL_RATIO_MAX_CONDITION > scale && den.norm() > f64::MIN_POSITIVE {
        return Ok(num / den);
    }
    // near a wall or a zero of the character: use the entire form
    Ok(j_sqrt(rs, x) * weyl_character(rs, &highest, &ix)?)
}

/// |chi_Lambda(ix) - j(x)^{-1/2} F_{Lambda+rho}(x)|.
pub fn kirillov_check(rs: &RootSystem, highest: &Weight, x: &CartanElement) -> Result<f64> {
    let orbit = CoadjointOrbit::for_highest_weight(rs, highest)?;
    let inv = j_inv_sqrt(rs, x)?;
    let f = orbit_fourier(&orbit, x)?;
    let chi = weyl_character(rs, highest, &x.scale(Complex64::i()))?;
    Ok((chi - inv * f).norm())
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(z) and P_{n-1}(z) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// The su(2) orbit integral computed on the sphere of radius lambda = 2j+1.
///
/// The azimuthal integral is exact, leaving
/// (lambda/2) int_{-1}^{1} exp(i lambda t c) dc = sin(lambda t)/t, which is
/// the orbit transform of spin j at alpha(x) = 2t.
pub fn su2_orbit_quadrature(j_label: f64, t: f64, n_points: usize) -> Result<Complex64> {
    let twice = 2.0 * j_label;
    if !(twice >= 0.0 && twice.fract() == 0.0) {
        return Err(Error::InvalidInput(format!("spin {j_label} is not a non-negative half-integer")));
    }
    if n_points < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 quadrature points, got {n_points}")));
    }
    let lambda = twice + 1.0;
    let (nodes, weights) = gauss_legendre(n_points);
    let terms: Vec<Complex64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&c, &w)| Complex64::from_polar(w, lambda * t * c))
        .collect();
    Ok(crate::sum::pairwise_sum(&terms) * (lambda / 2.0))
}

/// x_lambda = -2 pi i (lambda + rho)/(k + h), the point at which
/// S_{L lambda}/S_{0 lambda} = chi_L(x_lambda).
pub fn wilson_point(md: &ModularData, lambda: &Weight) -> CartanElement {
    let rs = md.rs();
    let shifted = lambda.add(&rs.rho());
    let factor = Complex64::new(0.0, -2.0 * std::f64::consts::PI / md.shifted_level() as f64);
    CartanElement::dual_to_weight(rs, &shifted.0).scale(factor)
}

/// S_{L_i lambda} / S_{0 lambda}: a Wilson line in the fibre direction.
pub fn wilson_weight(md: &ModularData, label: &Weight, lambda: &Weight) -> Result<Complex64> {
    let i = md.require_integrable(label)?;
    let l = md.require_integrable(lambda)?;
    Ok(md.s(i, l) / md.s(0, l))
}

/// One row of the `kirillov` report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KirillovRow {
    pub point: Vec<f64>,
    pub character: [f64; 2],
    pub orbit_integral: [f64; 2],
    pub residual: f64,
}

/// Character against j^{-1/2} times orbit integral at the given real points.
pub fn kirillov_table(rs: &RootSystem, highest: &Weight, points: &[Vec<f64>]) -> Result<Vec<KirillovRow>> {
    let orbit = CoadjointOrbit::for_highest_weight(rs, highest)?;
    points
        .iter()
        .map(|p| {
            let x = CartanElement::from_real(p);
            let chi = weyl_character(rs, highest, &x.scale(Complex64::i()))?;
            let scaled = j_inv_sqrt(rs, &x)? * orbit_fourier(&orbit, &x)?;
            Ok(KirillovRow {
                point: p.clone(),
                character: [chi.re, chi.im],
                orbit_integral: [scaled.re, scaled.im],
                residual: (chi - scaled).norm(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cft::s_matrix;
    use crate::lie::{build_root_system, character_from_multiplicities, weyl_dimension_u64, Series};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn a(r: usize) -> RootSystem {
        build_root_system(Series::A, r).unwrap()
    }

    fn a1_point(alpha: Complex64) -> CartanElement {
        CartanElement::from_coroot_coords(vec![alpha / 2.0])
    }

    #[test]
    fn normalisation_at_origin() {
        let rs = a(1);
        for n in 0..8 {
            let o = CoadjointOrbit::for_highest_weight(&rs, &Weight(vec![n])).unwrap();
            let v = orbit_fourier(&o, &CartanElement::zero(1)).unwrap();
            assert!((v - (n + 1) as f64).norm() < 1e-12);
        }
        let rs = a(3);
        let hw = Weight(vec![1, 0, 2]);
        let o = CoadjointOrbit::for_highest_weight(&rs, &hw).unwrap();
        let v = orbit_fourier(&o, &CartanElement::zero(3)).unwrap();
        assert!((v - weyl_dimension_u64(&rs, &hw).unwrap() as f64).norm() < 1e-9);
        assert_eq!(o.dimension(), 12);
    }

    #[test]
    fn a1_closed_form() {
        // F(x) = 2 sin((n+1) a/2) / a at alpha(x) = a
        let rs = a(1);
        let o = CoadjointOrbit::for_highest_weight(&rs, &Weight(vec![2])).unwrap();
        for a in [0.3f64, 1.7, 5.0, -2.2] {
            let v = orbit_fourier(&o, &a1_point(Complex64::new(a, 0.0))).unwrap();
            assert!((v - 2.0 * (1.5 * a).sin() / a).norm() < 1e-13);
        }
        // alpha(x) = 2 theta gives j^{1/2} sin(3 theta)/sin(theta)
        let theta = 0.3f64;
        let x = a1_point(Complex64::new(2.0 * theta, 0.0));
        let v = orbit_fourier(&o, &x).unwrap();
        let expect = theta.sin() / theta * (3.0 * theta).sin() / theta.sin();
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn degenerate_orbits_are_rejected() {
        let rs = a(2);
        let o = CoadjointOrbit::through(&rs, &Weight(vec![1, 0])).unwrap();
        assert!(!o.is_regular());
        assert_eq!(o.dimension(), 4);
        assert!(matches!(
            orbit_fourier(&o, &CartanElement::zero(2)),
            Err(Error::DegenerateOrbit { .. })
        ));
        // a regular weight outside the dominant chamber is the same orbit
        let o = CoadjointOrbit::through(&rs, &Weight(vec![-1, 2])).unwrap();
        assert!(o.is_regular());
        assert_eq!(o.lambda(), &Weight(vec![1, 1]));
    }

    #[test]
    fn kirillov_examples() {
        let rs = a(1);
        let r = kirillov_check(&rs, &Weight(vec![3]), &a1_point(Complex64::new(0.0, 0.9))).unwrap();
        assert!(r < 1e-10);
        let rs2 = a(2);
        let x = CartanElement::from_real(&[0.37, -0.81]);
        assert!(kirillov_check(&rs2, &Weight(vec![1, 2]), &x).unwrap() < 1e-9);
        for r in 1..=3 {
            let rs = a(r);
            let x = CartanElement::from_real(&vec![1e-3; r]);
            assert!(kirillov_check(&rs, &Weight::zero(r), &x).unwrap() < 1e-10);
        }
        let wall = a1_point(Complex64::new(2.0 * PI, 0.0));
        assert!(matches!(
            kirillov_check(&rs, &Weight(vec![1]), &wall),
            Err(Error::NearSingularWall { .. })
        ));
    }

    #[test]
    fn kirillov_randomized_suite() {
        // orbit transform divided by j^{1/2} against the multiplicity expansion
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut worst = 0.0f64;
        for case in 0..50 {
            let r = 1 + case % 3;
            let rs = a(r);
            let hw = Weight((0..r).map(|_| rng.gen_range(0..4)).collect());
            let x = CartanElement::from_real(&(0..r).map(|_| rng.gen_range(-1.5..1.5)).collect::<Vec<_>>());
            let o = CoadjointOrbit::for_highest_weight(&rs, &hw).unwrap();
            let lhs = j_inv_sqrt(&rs, &x).unwrap() * orbit_fourier(&o, &x).unwrap();
            let oracle = character_from_multiplicities(&rs, &hw, &x.scale(Complex64::i())).unwrap();
            worst = worst.max((lhs - oracle).norm());
            assert!(kirillov_check(&rs, &hw, &x).unwrap() < 1e-9);
        }
        assert!(worst < 1e-9, "worst residual {worst}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact up to degree 31
        for d in [2, 10, 30] {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d)).sum();
            assert!((q - 2.0 / (d as f64 + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn quadrature_examples() {
        assert!((su2_orbit_quadrature(0.0, 0.0, 16).unwrap() - 1.0).norm() < 1e-15);
        let rs = a(1);
        let o = CoadjointOrbit::for_highest_weight(&rs, &Weight(vec![1])).unwrap();
        let q = su2_orbit_quadrature(0.5, 0.7, 64).unwrap();
        let w = orbit_fourier(&o, &a1_point(Complex64::new(1.4, 0.0))).unwrap();
        assert!((q - w).norm() < 1e-10);
        // analytic antiderivative: (lambda/2) * 2 sin(lambda t)/(lambda t)
        let t = PI / 2.0;
        let q = su2_orbit_quadrature(1.0, t, 64).unwrap();
        assert!((q - (3.0 * t).sin() / t).norm() < 1e-12);
        assert!(su2_orbit_quadrature(0.25, 1.0, 16).is_err());
        assert!(su2_orbit_quadrature(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn quadrature_converges_in_node_count() {
        let t = 2.3f64;
        let exact = (7.0 * t).sin() / t;
        let errs: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| (su2_orbit_quadrature(3.0, t, n).unwrap() - exact).norm())
            .collect();
        assert!(errs[2] <= errs[0] && errs[2] < 1e-12, "{errs:?}");
    }

    #[test]
    fn quadrature_matches_weyl_sum() {
        let rs = a(1);
        for n in 0..=6 {
            let o = CoadjointOrbit::for_highest_weight(&rs, &Weight(vec![n])).unwrap();
            for s in 0..20 {
                let t = 0.05 + 0.15 * s as f64;
                let q = su2_orbit_quadrature(n as f64 / 2.0, t, 64).unwrap();
                let w = orbit_fourier(&o, &a1_point(Complex64::new(2.0 * t, 0.0))).unwrap();
                assert!((q - w).norm() < 1e-10, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn wilson_examples() {
        let md = s_matrix(&a(1), 2).unwrap();
        let z = Weight(vec![0]);
        assert!((wilson_weight(&md, &z, &Weight(vec![1])).unwrap() - 1.0).norm() < 1e-15);
        let v = wilson_weight(&md, &Weight(vec![1]), &z).unwrap();
        assert!((v - 2f64.sqrt()).norm() < 1e-13);
        let v = wilson_weight(&md, &Weight(vec![2]), &Weight(vec![2])).unwrap();
        // quantum dimension sin(3 * 3pi/4)/sin(3pi/4) = 1
        assert!((v - 1.0).norm() < 1e-13);
        assert!(matches!(
            wilson_weight(&md, &Weight(vec![3]), &z),
            Err(Error::NotIntegrable { .. })
        ));
    }

    #[test]
    fn wilson_is_character_at_distinguished_point() {
        for (r, kmax) in [(1usize, 6u32), (2, 3), (3, 2)] {
            let rs = a(r);
            for k in 1..=kmax {
                let md = s_matrix(&rs, k).unwrap();
                for lab in md.weights() {
                    for lam in md.weights() {
                        let w = wilson_weight(&md, lab, lam).unwrap();
                        let chi = weyl_character(&rs, lab, &wilson_point(&md, lam)).unwrap();
                        assert!((w - chi).norm() < 1e-9, "{lab} {lam} k={k}");
                    }
                }
            }
        }
    }
}
