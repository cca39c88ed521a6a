//! Root systems, weights and Weyl groups of simple Lie algebras.
//!
//! Weights are stored in the fundamental-weight (Dynkin) basis, roots in the
//! simple-root basis, and Cartan-subalgebra points in the simple-coroot basis.
//! The invariant form is normalized so long roots have squared length 2, so
//! for simply laced algebras the Gram matrix of the fundamental weights is the
//! inverse Cartan matrix. With this form the level-k Chern-Simons action
//! changes by 2 pi i n under large gauge transformations.
//!
//! All lattice pairings are exact: the inverse Cartan matrix is kept as an
//! integer matrix over a common denominator.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sum::pairwise_sum;

/// Default bound on |W| for explicit Weyl group enumeration (10!).
pub const DEFAULT_WEYL_BOUND: u128 = 3_628_800;

/// Condition number of the alternating Weyl sum above which the character
/// is evaluated from weight multiplicities instead.
pub const WEYL_RATIO_MAX_CONDITION: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Series::A => write!(f, "A"),
        }
    }
}

impl FromStr for Series {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Series::A),
            other => Err(Error::UnsupportedAlgebra(other.to_string())),
        }
    }
}

/// An integral weight in the fundamental-weight basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    /// The i-th fundamental weight (0-based index).
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Weight(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        if s.is_empty() {
            return Err(Error::InvalidInput("empty weight".into()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidInput(format!("bad weight coordinate '{t}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Weight)
    }
}

/// A point of the complexified Cartan subalgebra, in simple-coroot
/// coordinates: x = sum_i c_i alpha_i^vee, so that <omega_i, x> = c_i.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanElement {
    coords: Vec<Complex64>,
}

impl CartanElement {
    pub fn from_coroot_coords(coords: Vec<Complex64>) -> Self {
        CartanElement { coords }
    }

    pub fn from_real(coords: &[f64]) -> Self {
        CartanElement {
            coords: coords.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        CartanElement {
            coords: vec![Complex64::zero(); rank],
        }
    }

    /// The unique point with prescribed simple-root values alpha_i(x).
    pub fn from_simple_root_values(rs: &RootSystem, values: &[Complex64]) -> Self {
        let r = rs.rank();
        let den = rs.gram_den as f64;
        let coords = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| values[j] * (rs.gram_num[i][j] as f64))
                    .sum::<Complex64>()
                    / den
            })
            .collect();
        CartanElement { coords }
    }

    /// The point x_mu with <nu, x_mu> = <nu, mu> for every weight nu.
    pub fn dual_to_weight(rs: &RootSystem, mu: &[i64]) -> Self {
        let r = rs.rank();
        let den = rs.gram_den as f64;
        let coords = (0..r)
            .map(|i| {
                let num: i64 = (0..r).map(|j| rs.gram_num[i][j] * mu[j]).sum();
                Complex64::new(num as f64 / den, 0.0)
            })
            .collect();
        CartanElement { coords }
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn scale(&self, z: Complex64) -> Self {
        CartanElement {
            coords: self.coords.iter().map(|&c| c * z).collect(),
        }
    }

    pub fn add(&self, other: &CartanElement) -> Self {
        CartanElement {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Root data of a simple Lie algebra.
#[derive(Clone, Debug)]
pub struct RootSystem {
    series: Series,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    /// gram_num / gram_den is the inverse Cartan matrix, i.e. the Gram matrix
    /// <omega_i, omega_j> of the fundamental weights.
    gram_num: Vec<Vec<i64>>,
    gram_den: i64,
    positive_roots: Vec<Vec<i64>>,
    /// Coefficients of the highest coroot; <Lambda, theta> = sum comark_i a_i.
    comarks: Vec<i64>,
    dual_coxeter: i64,
    weyl: OnceLock<Arc<WeylGroup>>,
}

pub fn build_root_system(series: Series, rank: usize) -> Result<RootSystem> {
    if rank == 0 {
        return Err(Error::InvalidInput("rank must be >= 1".into()));
    }
    match series {
        Series::A => Ok(type_a(rank)),
    }
}

fn type_a(r: usize) -> RootSystem {
    let mut cartan = vec![vec![0i64; r]; r];
    for i in 0..r {
        cartan[i][i] = 2;
        if i + 1 < r {
            cartan[i][i + 1] = -1;
            cartan[i + 1][i] = -1;
        }
    }
    // (A_r^{-1})_{ij} = min(i,j) - ij/(r+1), 1-based.
    let n = r as i64 + 1;
    let gram_num = (1..=r as i64)
        .map(|i| (1..=r as i64).map(|j| i.min(j) * n - i * j).collect())
        .collect();
    // alpha_i + ... + alpha_{j-1} for 0 <= i < j <= r
    let mut positive_roots = Vec::with_capacity(r * (r + 1) / 2);
    for len in 1..=r {
        for i in 0..=(r - len) {
            let mut root = vec![0; r];
            for c in root.iter_mut().skip(i).take(len) {
                *c = 1;
            }
            positive_roots.push(root);
        }
    }
    RootSystem {
        series: Series::A,
        rank: r,
        cartan,
        gram_num,
        gram_den: n,
        positive_roots,
        comarks: vec![1; r],
        dual_coxeter: n,
        weyl: OnceLock::new(),
    }
}

impl RootSystem {
    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.series, self.rank)
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Positive roots in the simple-root basis.
    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    /// Simple roots in the simple-root basis (unit vectors).
    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        (0..self.rank)
            .map(|i| {
                let mut v = vec![0; self.rank];
                v[i] = 1;
                v
            })
            .collect()
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.dual_coxeter
    }

    /// dim g = rank + 2 |positive roots|.
    pub fn dimension(&self) -> i64 {
        (self.rank + 2 * self.positive_roots.len()) as i64
    }

    /// Order of the centre of the simply connected group.
    pub fn centre_order(&self) -> i64 {
        match self.series {
            Series::A => self.rank as i64 + 1,
        }
    }

    pub fn weyl_order(&self) -> u128 {
        match self.series {
            Series::A => (1..=self.rank as u128 + 1).product(),
        }
    }

    pub fn rho(&self) -> Weight {
        Weight(vec![1; self.rank])
    }

    /// Common denominator of all weight pairings.
    pub fn pairing_denominator(&self) -> i64 {
        self.gram_den
    }

    /// Gram matrix of fundamental weights as exact rationals.
    pub fn inner_product_matrix(&self) -> Vec<Vec<BigRational>> {
        self.gram_num
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&a| BigRational::new(BigInt::from(a), BigInt::from(self.gram_den)))
                    .collect()
            })
            .collect()
    }

    /// Fundamental weights expressed in the simple-root basis.
    pub fn fundamental_weights(&self) -> Vec<Vec<BigRational>> {
        self.inner_product_matrix()
    }

    pub fn check_weight(&self, w: &Weight) -> Result<()> {
        if w.rank() != self.rank {
            return Err(Error::InvalidInput(format!(
                "weight {w} has {} coordinates, algebra {} needs {}",
                w.rank(),
                self.label(),
                self.rank
            )));
        }
        Ok(())
    }

    /// <mu, nu> * pairing_denominator(), an exact integer.
    pub fn pairing_scaled(&self, mu: &[i64], nu: &[i64]) -> i64 {
        let mut s = 0;
        for (i, &a) in mu.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in nu.iter().enumerate() {
                s += a * self.gram_num[i][j] * b;
            }
        }
        s
    }

    pub fn pairing(&self, mu: &Weight, nu: &Weight) -> BigRational {
        BigRational::new(
            BigInt::from(self.pairing_scaled(&mu.0, &nu.0)),
            BigInt::from(self.gram_den),
        )
    }

    /// <mu, alpha> for a root alpha in the simple-root basis.
    pub fn weight_root_pairing(&self, mu: &[i64], root: &[i64]) -> i64 {
        // <omega_i, alpha_j> = delta_ij for simply laced normalisation
        mu.iter().zip(root).map(|(a, s)| a * s).sum()
    }

    /// A root (simple-root basis) rewritten in the fundamental-weight basis.
    pub fn root_to_weight(&self, root: &[i64]) -> Vec<i64> {
        (0..self.rank)
            .map(|j| (0..self.rank).map(|i| root[i] * self.cartan[i][j]).sum())
            .collect()
    }

    /// <Lambda, theta> with theta the highest root.
    pub fn level_of(&self, w: &Weight) -> i64 {
        w.0.iter().zip(&self.comarks).map(|(a, m)| a * m).sum()
    }

    pub fn simple_root_values(&self, x: &CartanElement) -> Vec<Complex64> {
        (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| x.coords[j] * (self.cartan[i][j] as f64))
                    .sum()
            })
            .collect()
    }

    /// alpha(x) for every positive root, in the order of `positive_roots`.
    pub fn positive_root_values(&self, x: &CartanElement) -> Vec<Complex64> {
        let simple = self.simple_root_values(x);
        self.positive_roots
            .iter()
            .map(|root| root.iter().zip(&simple).map(|(&s, &v)| v * (s as f64)).sum())
            .collect()
    }

    /// <mu, x> for an integral weight mu.
    pub fn pair_with_point(&self, mu: &[i64], x: &CartanElement) -> Complex64 {
        mu.iter().zip(&x.coords).map(|(&a, &c)| c * (a as f64)).sum()
    }

    /// Simple reflection s_i acting on a point.
    pub fn reflect_point(&self, i: usize, x: &CartanElement) -> CartanElement {
        let ai: Complex64 = (0..self.rank)
            .map(|j| x.coords[j] * (self.cartan[i][j] as f64))
            .sum();
        let mut coords = x.coords.clone();
        coords[i] -= ai;
        CartanElement { coords }
    }

    /// Simple reflection s_i acting on a weight in place.
    fn reflect_weight(&self, i: usize, mu: &mut [i64]) {
        let a = mu[i];
        if a != 0 {
            for (j, m) in mu.iter_mut().enumerate() {
                *m -= a * self.cartan[i][j];
            }
        }
    }

    /// The dominant weight in the Weyl orbit of `mu`.
    pub fn dominant_conjugate(&self, mu: &[i64]) -> Vec<i64> {
        let mut v = mu.to_vec();
        while let Some(i) = v.iter().position(|&a| a < 0) {
            self.reflect_weight(i, &mut v);
        }
        v
    }

    /// The Weyl group under the default size bound, built once and cached.
    pub fn weyl(&self) -> Result<&WeylGroup> {
        if let Some(w) = self.weyl.get() {
            return Ok(w);
        }
        let w = weyl_group(self, DEFAULT_WEYL_BOUND)?;
        let _ = self.weyl.set(Arc::new(w));
        Ok(self.weyl.get().expect("set above"))
    }
}

/// One element of the Weyl group: its matrix on fundamental-weight
/// coordinates, a word in simple reflections, and its sign.
#[derive(Clone, Debug)]
pub struct WeylElement {
    matrix: Vec<i64>,
    word: Vec<u8>,
    sign: i8,
}

impl WeylElement {
    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn act(&self, mu: &[i64]) -> Vec<i64> {
        let r = mu.len();
        (0..r)
            .map(|i| (0..r).map(|j| self.matrix[i * r + j] * mu[j]).sum())
            .collect()
    }

    fn pair_acted(&self, mu: &[i64], x: &CartanElement) -> Complex64 {
        let r = mu.len();
        let mut s = Complex64::zero();
        for i in 0..r {
            let wi: i64 = (0..r).map(|j| self.matrix[i * r + j] * mu[j]).sum();
            if wi != 0 {
                s += x.coords[i] * (wi as f64);
            }
        }
        s
    }

    pub fn act_point(&self, rs: &RootSystem, x: &CartanElement) -> CartanElement {
        self.word
            .iter()
            .rev()
            .fold(x.clone(), |p, &i| rs.reflect_point(i as usize, &p))
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    rank: usize,
    elements: Vec<WeylElement>,
}

impl WeylGroup {
    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Alternating sum sum_w sign(w) exp(<w mu, x>), together with the sum
    /// of the absolute values of its terms.
    pub fn alternating_sum(&self, mu: &[i64], x: &CartanElement) -> (Complex64, f64) {
        let terms: Vec<Complex64> = self
            .elements
            .iter()
            .map(|w| w.pair_acted(mu, x).exp() * (w.sign as f64))
            .collect();
        let scale = terms.iter().map(|t| t.norm()).sum();
        (pairwise_sum(&terms), scale)
    }
}

/// Enumerates the Weyl group by breadth-first closure under simple
/// reflections.
pub fn weyl_group(rs: &RootSystem, bound: u128) -> Result<WeylGroup> {
    let order = rs.weyl_order();
    if order > bound {
        return Err(Error::WeylGroupTooLarge { order, bound });
    }
    let r = rs.rank;
    let mut identity = vec![0i64; r * r];
    for i in 0..r {
        identity[i * r + i] = 1;
    }
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::with_capacity(order as usize);
    let mut elements = Vec::with_capacity(order as usize);
    let mut queue = VecDeque::new();
    seen.insert(identity.clone(), ());
    queue.push_back(WeylElement {
        matrix: identity,
        word: Vec::new(),
        sign: 1,
    });
    while let Some(w) = queue.pop_front() {
        for i in 0..r {
            // s_i * M: row operation on the image coordinates
            let mut m = w.matrix.clone();
            for col in 0..r {
                let a = w.matrix[i * r + col];
                if a != 0 {
                    for row in 0..r {
                        m[row * r + col] -= a * rs.cartan[i][row];
                    }
                }
            }
            if seen.contains_key(&m) {
                continue;
            }
            seen.insert(m.clone(), ());
            let mut word = Vec::with_capacity(w.word.len() + 1);
            word.push(i as u8);
            word.extend_from_slice(&w.word);
            queue.push_back(WeylElement {
                matrix: m,
                word,
                sign: -w.sign,
            });
        }
        elements.push(w);
    }
    debug_assert_eq!(elements.len() as u128, order);
    Ok(WeylGroup { rank: r, elements })
}

/// <Lambda, Lambda + 2 rho>, exact.
pub fn casimir(rs: &RootSystem, lambda: &Weight) -> Result<BigRational> {
    rs.check_weight(lambda)?;
    Ok(BigRational::new(
        BigInt::from(casimir_scaled(rs, lambda)),
        BigInt::from(rs.gram_den),
    ))
}

/// casimir * pairing_denominator, as an integer.
pub fn casimir_scaled(rs: &RootSystem, lambda: &Weight) -> i64 {
    let shifted: Vec<i64> = lambda.0.iter().map(|a| a + 2).collect();
    rs.pairing_scaled(&lambda.0, &shifted)
}

/// <Lambda + rho, Lambda + rho> * pairing_denominator.
pub fn shifted_norm_scaled(rs: &RootSystem, lambda: &Weight) -> i64 {
    let shifted: Vec<i64> = lambda.0.iter().map(|a| a + 1).collect();
    rs.pairing_scaled(&shifted, &shifted)
}

fn require_dominant(rs: &RootSystem, lambda: &Weight) -> Result<()> {
    rs.check_weight(lambda)?;
    if !lambda.is_dominant() {
        return Err(Error::NonDominant {
            weight: lambda.to_string(),
        });
    }
    Ok(())
}

/// Weyl dimension formula prod_{alpha>0} <Lambda+rho, alpha>/<rho, alpha>.
pub fn weyl_dimension(rs: &RootSystem, lambda: &Weight) -> Result<BigUint> {
    require_dominant(rs, lambda)?;
    let shifted: Vec<i64> = lambda.0.iter().map(|a| a + 1).collect();
    let rho = vec![1; rs.rank];
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for root in &rs.positive_roots {
        num *= rs.weight_root_pairing(&shifted, root) as u64;
        den *= rs.weight_root_pairing(&rho, root) as u64;
    }
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// Floating-point Weyl dimension for use inside large sums.
pub fn weyl_dimension_f64(rs: &RootSystem, lambda: &[i64]) -> f64 {
    let mut d = 1.0;
    for root in &rs.positive_roots {
        let num: i64 = lambda.iter().zip(root).map(|(a, s)| (a + 1) * s).sum();
        let den: i64 = root.iter().sum();
        d *= num as f64 / den as f64;
    }
    d
}

/// Distinct weights of the Weyl orbit of `mu`, sorted.
pub fn weyl_orbit(rs: &RootSystem, mu: &Weight) -> Result<Vec<Weight>> {
    let w = rs.weyl()?;
    let set: HashSet<Vec<i64>> = w.elements().iter().map(|e| e.act(&mu.0)).collect();
    let mut orbit: Vec<Weight> = set.into_iter().map(Weight).collect();
    orbit.sort();
    Ok(orbit)
}

/// Dominant weights of the irreducible representation with highest weight
/// `lambda` and their multiplicities, by Freudenthal's recursion.
///
/// Returned in order of increasing depth below `lambda`.
pub fn dominant_weight_multiplicities(rs: &RootSystem, lambda: &Weight) -> Result<Vec<(Weight, u64)>> {
    require_dominant(rs, lambda)?;
    let roots_w: Vec<Vec<i64>> = rs.positive_roots.iter().map(|a| rs.root_to_weight(a)).collect();

    // Dominant weights below lambda, each with its depth (height of lambda - mu).
    let mut depth: HashMap<Vec<i64>, i64> = HashMap::new();
    depth.insert(lambda.0.clone(), 0);
    let mut queue = VecDeque::from([lambda.0.clone()]);
    while let Some(mu) = queue.pop_front() {
        let d = depth[&mu];
        for (root, aw) in rs.positive_roots.iter().zip(&roots_w) {
            let nu: Vec<i64> = mu.iter().zip(aw).map(|(m, a)| m - a).collect();
            if nu.iter().all(|&a| a >= 0) && !depth.contains_key(&nu) {
                depth.insert(nu.clone(), d + root.iter().sum::<i64>());
                queue.push_back(nu);
            }
        }
    }
    let mut order: Vec<(Vec<i64>, i64)> = depth.into_iter().collect();
    order.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));

    let plus_rho = |mu: &[i64]| -> Vec<i64> { mu.iter().map(|a| a + 1).collect() };
    let top = plus_rho(&lambda.0);
    let top_norm = rs.pairing_scaled(&top, &top);

    let mut mult: HashMap<Vec<i64>, u64> = HashMap::new();
    let mut out = Vec::with_capacity(order.len());
    for (mu, _) in order {
        let m = if mu == lambda.0 {
            1
        } else {
            let mut acc: i128 = 0;
            for aw in &roots_w {
                let mut shifted = mu.clone();
                loop {
                    for (s, a) in shifted.iter_mut().zip(aw) {
                        *s += a;
                    }
                    let dom = rs.dominant_conjugate(&shifted);
                    let Some(&ms) = mult.get(&dom) else { break };
                    // <mu + j alpha, alpha> scaled by the pairing denominator
                    let p = rs.pairing_scaled(&shifted, aw);
                    acc += (p as i128) * (ms as i128);
                }
            }
            let mr = plus_rho(&mu);
            let gap = (top_norm - rs.pairing_scaled(&mr, &mr)) as i128;
            debug_assert!(gap > 0);
            let num = 2 * acc;
            debug_assert_eq!(num % gap, 0, "Freudenthal recursion must divide exactly");
            (num / gap) as u64
        };
        mult.insert(mu.clone(), m);
        out.push((Weight(mu), m));
    }
    Ok(out)
}

/// Character chi_Lambda(x) = sum_w e(w) e^{<w(Lambda+rho), x>} / sum_w e(w) e^{<w rho, x>}.
///
/// The denominator is evaluated as prod_{alpha>0} 2 sinh(alpha(x)/2). When
/// the alternating numerator suffers cancellation (x near a wall, or a zero of
/// the character) the value is taken from the weight-multiplicity expansion,
/// which is entire in x.
pub fn weyl_character(rs: &RootSystem, lambda: &Weight, x: &CartanElement) -> Result<Complex64> {
    require_dominant(rs, lambda)?;
    if lambda.is_zero() {
        return Ok(Complex64::one());
    }
    let w = rs.weyl()?;
    let shifted: Vec<i64> = lambda.0.iter().map(|a| a + 1).collect();
    let (num, scale) = w.alternating_sum(&shifted, x);
    let den: Complex64 = rs
        .positive_root_values(x)
        .into_iter()
        .map(|a| (a / 2.0).sinh() * 2.0)
        .product();
    if num.norm() * WEYL_RATIO_MAX_CONDITION > scale && den.norm() > f64::MIN_POSITIVE {
        return Ok(num / den);
    }
    character_from_multiplicities(rs, lambda, x)
}

/// sum over weights mu of mult(mu) e^{<mu, x>}.
pub fn character_from_multiplicities(rs: &RootSystem, lambda: &Weight, x: &CartanElement) -> Result<Complex64> {
    let dom = dominant_weight_multiplicities(rs, lambda)?;
    let w = rs.weyl()?;
    let mut terms = Vec::new();
    for (mu, m) in dom {
        let orbit: HashSet<Vec<i64>> = w.elements().iter().map(|e| e.act(&mu.0)).collect();
        let mut orbit: Vec<Vec<i64>> = orbit.into_iter().collect();
        orbit.sort();
        for nu in orbit {
            terms.push(rs.pair_with_point(&nu, x).exp() * (m as f64));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// Shorthand used in tests and reports: `weyl_dimension` as u64.
pub fn weyl_dimension_u64(rs: &RootSystem, lambda: &Weight) -> Result<u64> {
    weyl_dimension(rs, lambda)?
        .to_u64()
        .ok_or_else(|| Error::InvalidInput(format!("dimension of {lambda} overflows u64")))
}
