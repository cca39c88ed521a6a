//! Command-line front end: one subcommand per module, JSON or CSV reports.
//!
//! Every flag may also come from a TOML file given by `--config`, using the
//! flag names with `_` for `-`; flags win. Exit codes: 0 on success, 2 on a
//! violated precondition, 3 on a failed certification, integrality or
//! cross-check, 64 on a usage error, 74 when the report cannot be written.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cft::{central_charge, s_matrix_with, t_matrix, Certification, FramingConvention, ModularOptions, Precision};
use crate::crosscheck::{crosscheck_suite, Suite};
use crate::error::Error;
use crate::genera::{evaluate, GenusKind};
use crate::lie::{
    build_root_system, casimir, dominant_weight_multiplicities, weyl_dimension, CartanElement, RootSystem, Series,
    Weight,
};
use crate::orbits::{kirillov_table, KirillovRow};
use crate::pairings::{expected_degree, pairing_report};
use crate::seifert::{seifert_scan, FibreLabel, ScanRequest, SeifertCell, SeifertValue, DEFAULT_TERM_BUDGET};
use crate::verlinde::verlinde_table;
use crate::ym2::{ym2_cost, ym2_partition, YM2Request};

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "SEIFERT_CS_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Parser, Debug)]
#[command(name = "seifert-cs", version, about = "Chern-Simons invariants of circle bundles over surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Default)]
pub struct GlobalArgs {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: $SEIFERT_CS_THREADS, else all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomly drawn test points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Working precision of the modular data; 53 is binary64.
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Maximum number of weight-term evaluations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
pub struct AlgebraArgs {
    /// Lie algebra, e.g. A2, or a series letter together with --rank.
    #[arg(long)]
    pub algebra: Option<String>,
    #[arg(long)]
    pub rank: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Root-system data and, for a weight, its dimension and Casimir.
    Lie(LieArgs),
    /// Level-k S and T matrices with their certification.
    Modular(ModularArgs),
    /// Verlinde dimensions over a range of levels.
    Verlinde(VerlindeArgs),
    /// The partition function of M_(g,p) with fibre Wilson lines.
    Seifert(SeifertArgs),
    /// Characters against orbit integrals.
    Kirillov(KirillovArgs),
    /// j, A-hat or Todd functions on a grid of real points (CSV by default).
    Genera(GeneraArgs),
    /// 2D Yang-Mills partition functions (CSV by default).
    Ym2(Ym2Args),
    /// Quasi-polynomial fit of Verlinde dimensions in k.
    Pairings(PairingsArgs),
    /// Consistency suite across all modules.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args, Debug)]
pub struct LieArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// Highest weight in Dynkin labels, e.g. "1,0".
    #[arg(long)]
    pub weight: Option<String>,
}

#[derive(Args, Debug)]
pub struct ModularArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long)]
    pub framing: Option<FramingConvention>,
}

#[derive(Args, Debug)]
pub struct VerlindeArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// A level or an inclusive range such as 1..10.
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long)]
    pub genus: Option<String>,
    /// Marked-point label in Dynkin labels; repeat for several.
    #[arg(long = "label")]
    pub labels: Vec<String>,
}

#[derive(Args, Debug)]
pub struct SeifertArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// A level or an inclusive range such as 1..10.
    #[arg(long)]
    pub level: Option<String>,
    /// A genus or an inclusive range.
    #[arg(long)]
    pub genus: Option<String>,
    /// p, or an inclusive range such as -3..3.
    #[arg(long, allow_hyphen_values = true)]
    pub degree: Option<String>,
    /// Fibre Wilson-line label in Dynkin labels; repeat for several.
    #[arg(long = "label")]
    pub labels: Vec<String>,
    #[arg(long)]
    pub framing: Option<FramingConvention>,
    /// Divide by the order of the centre.
    #[arg(long)]
    pub centre_factor: bool,
}

#[derive(Args, Debug)]
pub struct KirillovArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long)]
    pub weight: Option<String>,
    /// Real point in coroot coordinates, e.g. "0.3,-0.2"; repeat for several.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Number of seeded random points when no --point is given.
    #[arg(long)]
    pub random_points: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GeneraArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    /// j, ahat or todd.
    #[arg(long)]
    pub kind: Option<GenusKind>,
    #[arg(long)]
    pub genus: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    /// Grid points per coordinate.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct Ym2Args {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long)]
    pub genus: Option<String>,
    /// Coupling; repeat for several.
    #[arg(long = "epsilon")]
    pub epsilon: Vec<f64>,
    /// Level cutoff; chosen from the tolerance when absent.
    #[arg(long)]
    pub cutoff: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct PairingsArgs {
    #[command(flatten)]
    pub algebra: AlgebraArgs,
    #[arg(long)]
    pub genus: Option<String>,
    /// Largest level in the fitted table.
    #[arg(long)]
    pub k_max: Option<u32>,
    #[arg(long)]
    pub max_period: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    /// quick or full.
    #[arg(long)]
    pub suite: Option<Suite>,
}

/// Integers in the config may be written bare or as range strings.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum IntOrText {
    Int(i64),
    Text(String),
}

fn de_text<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    Ok(Option::<IntOrText>::deserialize(d)?.map(|v| match v {
        IntOrText::Int(i) => i.to_string(),
        IntOrText::Text(s) => s,
    }))
}

/// All run parameters; the union of the subcommand flags.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algebra: Option<String>,
    pub rank: Option<usize>,
    #[serde(default, deserialize_with = "de_text")]
    pub level: Option<String>,
    #[serde(default, deserialize_with = "de_text")]
    pub genus: Option<String>,
    #[serde(default, deserialize_with = "de_text")]
    pub degree: Option<String>,
    pub labels: Option<Vec<String>>,
    pub framing: Option<FramingConvention>,
    pub centre_factor: Option<bool>,
    pub precision_bits: Option<u32>,
    pub budget: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub weight: Option<String>,
    pub points: Option<Vec<String>>,
    pub random_points: Option<usize>,
    pub kind: Option<GenusKind>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub steps: Option<usize>,
    pub epsilon: Option<Vec<f64>>,
    pub cutoff: Option<u64>,
    pub tol: Option<f64>,
    pub k_max: Option<u32>,
    pub max_period: Option<usize>,
    pub suite: Option<Suite>,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($f:ident),* $(,)?) => {{
        let (top, base) = ($top, $base);
        RunConfig { $($f: top.$f.or(base.$f)),* }
    }};
}

impl RunConfig {
    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(self, base;
            algebra, rank, level, genus, degree, labels, framing, centre_factor, precision_bits, budget,
            format, output, seed, threads, weight, points, random_points, kind, grid_min, grid_max, steps,
            epsilon, cutoff, tol, k_max, max_period, suite)
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Cli {
    /// The flags as a config layer.
    pub fn to_config(&self) -> RunConfig {
        let g = &self.global;
        let mut c = RunConfig {
            threads: g.threads,
            format: g.format,
            output: g.output.clone(),
            seed: g.seed,
            precision_bits: g.precision_bits,
            budget: g.budget,
            ..RunConfig::default()
        };
        let alg = |c: &mut RunConfig, a: &AlgebraArgs| {
            c.algebra = a.algebra.clone();
            c.rank = a.rank;
        };
        match &self.command {
            Command::Lie(a) => {
                alg(&mut c, &a.algebra);
                c.weight = a.weight.clone();
            }
            Command::Modular(a) => {
                alg(&mut c, &a.algebra);
                c.level = a.level.clone();
                c.framing = a.framing;
            }
            Command::Verlinde(a) => {
                alg(&mut c, &a.algebra);
                c.level = a.level.clone();
                c.genus = a.genus.clone();
                c.labels = nonempty(a.labels.clone());
            }
            Command::Seifert(a) => {
                alg(&mut c, &a.algebra);
                c.level = a.level.clone();
                c.genus = a.genus.clone();
                c.degree = a.degree.clone();
                c.labels = nonempty(a.labels.clone());
                c.framing = a.framing;
                c.centre_factor = a.centre_factor.then_some(true);
            }
            Command::Kirillov(a) => {
                alg(&mut c, &a.algebra);
                c.weight = a.weight.clone();
                c.points = nonempty(a.points.clone());
                c.random_points = a.random_points;
            }
            Command::Genera(a) => {
                alg(&mut c, &a.algebra);
                c.kind = a.kind;
                c.genus = a.genus.clone();
                c.grid_min = a.grid_min;
                c.grid_max = a.grid_max;
                c.steps = a.steps;
            }
            Command::Ym2(a) => {
                alg(&mut c, &a.algebra);
                c.genus = a.genus.clone();
                c.epsilon = nonempty(a.epsilon.clone());
                c.cutoff = a.cutoff;
                c.tol = a.tol;
            }
            Command::Pairings(a) => {
                alg(&mut c, &a.algebra);
                c.genus = a.genus.clone();
                c.k_max = a.k_max;
                c.max_period = a.max_period;
            }
            Command::Crosscheck(a) => c.suite = a.suite,
        }
        c
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn required<T: Clone>(v: &Option<T>, flag: &str) -> Outcome<T> {
    v.clone().ok_or_else(|| usage(format!("--{flag} is required (flag or config)")))
}

/// Reports are wrapped with the schema version.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema: u32,
    #[serde(flatten)]
    pub report: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightInfo {
    pub weight: Weight,
    pub dimension: String,
    pub casimir: String,
    pub dominant_multiplicities: Vec<(Weight, u64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieReport {
    pub algebra: String,
    pub rank: usize,
    pub dimension: i64,
    pub dual_coxeter: i64,
    pub centre_order: i64,
    pub weyl_order: u64,
    pub cartan_matrix: Vec<Vec<i64>>,
    /// In simple-root coordinates.
    pub positive_roots: Vec<Vec<i64>>,
    pub rho: Weight,
    pub weight: Option<WeightInfo>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularReport {
    pub algebra: String,
    pub level: u32,
    pub framing: FramingConvention,
    pub precision_bits: u32,
    pub central_charge: f64,
    pub weights: Vec<Weight>,
    /// Entries as [re, im].
    pub s: Vec<Vec<[f64; 2]>>,
    pub t: Vec<[f64; 2]>,
    pub certification: Certification,
}

/// A single (k, g, p) value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeifertReport {
    pub algebra: String,
    pub level: u32,
    pub genus: u32,
    pub degree: i64,
    pub labels: Vec<FibreLabel>,
    #[serde(flatten)]
    pub value: SeifertValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeifertScanReport {
    pub algebra: String,
    pub labels: Vec<FibreLabel>,
    pub cells: Vec<SeifertCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KirillovReport {
    pub algebra: String,
    pub highest_weight: Weight,
    pub rows: Vec<KirillovRow>,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneraRow {
    pub point: Vec<f64>,
    pub value: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneraReport {
    pub algebra: String,
    pub kind: GenusKind,
    pub genus: u32,
    pub rows: Vec<GeneraRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ym2Row {
    pub epsilon: f64,
    pub z: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
    pub terms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ym2Report {
    pub algebra: String,
    pub genus: u32,
    pub target_tol: f64,
    pub rows: Vec<Ym2Row>,
}

/// A finished report: JSON always, CSV for tables.
struct Rendered {
    json: String,
    csv: Option<String>,
    /// False when the report itself records a failure (exit 3).
    passed: bool,
}

fn render<T: Serialize>(report: &T, csv: Option<String>) -> Outcome<Rendered> {
    let mut json = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    json.push('\n');
    Ok(Rendered {
        json,
        csv,
        passed: true,
    })
}

fn enveloped<T: Serialize>(report: T, csv: Option<String>) -> Outcome<Rendered> {
    render(
        &Envelope {
            schema: SCHEMA_VERSION,
            report,
        },
        csv,
    )
}

fn csv_table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Outcome<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

/// Shortest round-trip form, in exponent notation away from unit scale.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn parse_algebra(cfg: &RunConfig) -> Outcome<RootSystem> {
    let text = required(&cfg.algebra, "algebra")?;
    let text = text.trim();
    let split = text.find(|c: char| c.is_ascii_digit()).unwrap_or(text.len());
    let series: Series = text[..split].parse()?;
    let rank = match (&text[split..], cfg.rank) {
        ("", Some(r)) => r,
        ("", None) => return Err(usage(format!("algebra {text:?} needs a rank (e.g. A2 or --rank 2)"))),
        (digits, given) => {
            let r: usize = digits
                .parse()
                .map_err(|_| usage(format!("cannot read the rank in {text:?}")))?;
            if given.is_some_and(|g| g != r) {
                return Err(usage(format!("--rank {} disagrees with --algebra {text}", given.unwrap_or(r))));
            }
            r
        }
    };
    Ok(build_root_system(series, rank)?)
}

fn parse_weight(rs: &RootSystem, text: &str) -> Outcome<Weight> {
    let coords: Vec<i64> = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("cannot read weight {text:?}; expected Dynkin labels like 1,0")))?;
    let w = Weight(coords);
    rs.check_weight(&w)?;
    Ok(w)
}

fn parse_point(rs: &RootSystem, text: &str) -> Outcome<Vec<f64>> {
    let p: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| usage(format!("cannot read point {text:?}")))?;
    if p.len() != rs.rank() {
        return Err(Failure::Run(Error::InvalidInput(format!(
            "point {text:?} has {} coordinates, rank is {}",
            p.len(),
            rs.rank()
        ))));
    }
    Ok(p)
}

/// "5", "1..10" or "1..=10", both ends inclusive.
pub fn parse_range<T: std::str::FromStr + PartialOrd + Copy>(text: &str, flag: &str) -> Result<RangeInclusive<T>, String> {
    let bad = || format!("cannot read --{flag} {text:?}; expected N or A..B");
    let one = |s: &str| s.trim().parse::<T>().map_err(|_| bad());
    let range = match text.split_once("..") {
        None => {
            let v = one(text)?;
            v..=v
        }
        Some((a, b)) => one(a)?..=one(b.strip_prefix('=').unwrap_or(b))?,
    };
    if range.start() > range.end() {
        return Err(format!("--{flag} range {text:?} is empty"));
    }
    Ok(range)
}

fn range_of<T: std::str::FromStr + PartialOrd + Copy>(v: &Option<String>, flag: &str) -> Outcome<RangeInclusive<T>> {
    parse_range(&required(v, flag)?, flag).map_err(Failure::Usage)
}

fn single<T: std::str::FromStr + PartialOrd + Copy>(v: &Option<String>, flag: &str) -> Outcome<T> {
    let r = range_of::<T>(v, flag)?;
    if r.start() != r.end() {
        return Err(usage(format!("--{flag} takes a single value here")));
    }
    Ok(*r.start())
}

fn labels_of(rs: &RootSystem, cfg: &RunConfig) -> Outcome<Vec<Weight>> {
    cfg.labels
        .iter()
        .flatten()
        .map(|l| parse_weight(rs, l))
        .collect()
}

fn budget_of(cfg: &RunConfig) -> u128 {
    cfg.budget.map_or(DEFAULT_TERM_BUDGET, u128::from)
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn run_lie(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let weight = match &cfg.weight {
        None => None,
        Some(t) => {
            let w = parse_weight(&rs, t)?;
            if !w.is_dominant() {
                return Err(Failure::Run(Error::NonDominant { weight: t.clone() }));
            }
            Some(WeightInfo {
                dimension: weyl_dimension(&rs, &w)?.to_string(),
                casimir: casimir(&rs, &w)?.to_string(),
                dominant_multiplicities: dominant_weight_multiplicities(&rs, &w)?,
                weight: w,
            })
        }
    };
    let report = LieReport {
        algebra: rs.label(),
        rank: rs.rank(),
        dimension: rs.dimension(),
        dual_coxeter: rs.dual_coxeter(),
        centre_order: rs.centre_order(),
        weyl_order: u64::try_from(rs.weyl_order()).map_err(|_| Error::WeylGroupTooLarge {
            order: rs.weyl_order(),
            bound: u64::MAX as u128,
        })?,
        cartan_matrix: rs.cartan_matrix().to_vec(),
        positive_roots: rs.positive_roots().to_vec(),
        rho: rs.rho(),
        weight,
    };
    enveloped(report, None)
}

fn run_modular(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let level: u32 = single(&cfg.level, "level")?;
    let framing = cfg.framing.unwrap_or(FramingConvention::Canonical);
    let precision = Precision::from_bits(cfg.precision_bits.unwrap_or(53))?;
    let md = s_matrix_with(
        &rs,
        level,
        ModularOptions {
            precision,
            ..ModularOptions::default()
        },
    )?;
    let t = t_matrix(&rs, level, framing)?;
    let report = ModularReport {
        algebra: rs.label(),
        level,
        framing,
        precision_bits: md.precision_bits(),
        central_charge: central_charge(&rs, level),
        weights: md.weights().to_vec(),
        s: md.s_rows().into_iter().map(|row| row.into_iter().map(c2).collect()).collect(),
        t: t.into_iter().map(c2).collect(),
        certification: md.certification().clone(),
    };
    enveloped(report, None)
}

fn run_verlinde(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let levels: RangeInclusive<u32> = range_of(&cfg.level, "level")?;
    let genus: u32 = single(&cfg.genus, "genus")?;
    let labels = labels_of(&rs, cfg)?;
    if *levels.start() == 0 {
        return Err(Failure::Run(Error::InvalidInput("level must be >= 1".into())));
    }
    let table = verlinde_table(&rs, genus, levels, &labels)?;
    let csv = csv_table(
        &names(&["k", "dimension"]),
        table.rows.iter().map(|r| vec![r.k.to_string(), r.dimension.to_string()]),
    )?;
    enveloped(table, Some(csv))
}

fn run_seifert(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let levels: RangeInclusive<u32> = range_of(&cfg.level, "level")?;
    let genera: RangeInclusive<u32> = range_of(&cfg.genus, "genus")?;
    let degrees: RangeInclusive<i64> = range_of(&cfg.degree, "degree")?;
    if *levels.start() == 0 {
        return Err(Failure::Run(Error::InvalidInput("level must be >= 1".into())));
    }
    let labels = labels_of(&rs, cfg)?;
    let req = ScanRequest {
        rs: rs.clone(),
        genera: genera.clone(),
        degrees: degrees.clone(),
        levels: levels.clone(),
        labels: labels.clone(),
        framing: cfg.framing.unwrap_or(FramingConvention::Bare),
        include_centre_factor: cfg.centre_factor.unwrap_or(false),
        budget: budget_of(cfg),
    };
    let cells = seifert_scan(&req)?;
    let tagged = FibreLabel::tagged(&labels);
    let csv = csv_table(
        &names(&["k", "genus", "degree", "value_re", "value_im", "modulus"]),
        cells.iter().map(|c| {
            vec![
                c.k.to_string(),
                c.genus.to_string(),
                c.degree.to_string(),
                num(c.value.value_re),
                num(c.value.value_im),
                num(c.value.modulus),
            ]
        }),
    )?;
    if cells.len() == 1 {
        let c = cells.into_iter().next().expect("one cell");
        let report = SeifertReport {
            algebra: rs.label(),
            level: c.k,
            genus: c.genus,
            degree: c.degree,
            labels: tagged,
            value: c.value,
        };
        return enveloped(report, Some(csv));
    }
    let report = SeifertScanReport {
        algebra: rs.label(),
        labels: tagged,
        cells,
    };
    enveloped(report, Some(csv))
}

fn run_kirillov(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let weight = parse_weight(&rs, &required(&cfg.weight, "weight")?)?;
    let points: Vec<Vec<f64>> = match &cfg.points {
        Some(ps) => ps.iter().map(|p| parse_point(&rs, p)).collect::<Outcome<_>>()?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
            (0..cfg.random_points.unwrap_or(10))
                .map(|_| (0..rs.rank()).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect()
        }
    };
    let rows = kirillov_table(&rs, &weight, &points)?;
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut header: Vec<String> = (1..=rs.rank()).map(|i| format!("x{i}")).collect();
    header.extend(names(&["character_re", "character_im", "orbit_re", "orbit_im", "residual"]));
    let csv = csv_table(
        &header,
        rows.iter().map(|r| {
            let mut v: Vec<String> = r.point.iter().map(|&x| num(x)).collect();
            v.extend(
                [r.character[0], r.character[1], r.orbit_integral[0], r.orbit_integral[1], r.residual]
                    .iter()
                    .map(|&x| num(x)),
            );
            v
        }),
    )?;
    let report = KirillovReport {
        algebra: rs.label(),
        highest_weight: weight,
        rows,
        max_residual,
    };
    enveloped(report, Some(csv))
}

fn run_genera(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let kind = cfg.kind.unwrap_or(GenusKind::J);
    let genus: u32 = match &cfg.genus {
        Some(_) => single(&cfg.genus, "genus")?,
        None => 0,
    };
    let (lo, hi) = (cfg.grid_min.unwrap_or(-3.0), cfg.grid_max.unwrap_or(3.0));
    let steps = cfg.steps.unwrap_or(7);
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(Failure::Run(Error::InvalidInput(format!(
            "grid needs finite min <= max and steps >= 1, got [{lo}, {hi}] with {steps} steps"
        ))));
    }
    let r = rs.rank() as u32;
    let count = (steps as u128).checked_pow(r).unwrap_or(u128::MAX);
    if count > budget_of(cfg) {
        return Err(Failure::Run(Error::BudgetExceeded {
            needed: count,
            budget: budget_of(cfg),
        }));
    }
    let axis: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
        .collect();
    let rows: Vec<GeneraRow> = (0..count as usize)
        .map(|mut idx| {
            let point: Vec<f64> = (0..rs.rank())
                .map(|_| {
                    let v = axis[idx % steps];
                    idx /= steps;
                    v
                })
                .collect();
            let value = evaluate(kind, &rs, &CartanElement::from_real(&point), genus).value;
            GeneraRow {
                point,
                value: c2(value),
            }
        })
        .collect();
    let mut header: Vec<String> = (1..=rs.rank()).map(|i| format!("x{i}")).collect();
    header.extend(names(&["value_re", "value_im"]));
    let csv = csv_table(
        &header,
        rows.iter().map(|row| {
            let mut v: Vec<String> = row.point.iter().map(|&x| num(x)).collect();
            v.push(num(row.value[0]));
            v.push(num(row.value[1]));
            v
        }),
    )?;
    let report = GeneraReport {
        algebra: rs.label(),
        kind,
        genus,
        rows,
    };
    enveloped(report, Some(csv))
}

fn run_ym2(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let genus: u32 = single(&cfg.genus, "genus")?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let eps = cfg.epsilon.clone().unwrap_or_else(|| vec![0.0]);
    let budget = budget_of(cfg);
    let requests: Vec<YM2Request> = eps
        .iter()
        .map(|&e| YM2Request {
            rs: rs.clone(),
            genus,
            epsilon: e,
            cutoff: cfg.cutoff,
            target_tol: tol,
        })
        .collect();
    let mut needed = 0u128;
    for req in &requests {
        // an unreachable tolerance is reported by the sum itself
        needed += ym2_cost(req)?.unwrap_or(0);
    }
    if needed > budget {
        return Err(Failure::Run(Error::BudgetExceeded { needed, budget }));
    }
    let rows: Vec<Ym2Row> = requests
        .iter()
        .map(|req| {
            ym2_partition(req).map(|v| Ym2Row {
                epsilon: req.epsilon,
                z: v.value,
                tail_bound: v.tail_bound,
                cutoff: v.cutoff,
                terms: v.terms,
            })
        })
        .collect::<crate::Result<_>>()?;
    let csv = csv_table(
        &names(&["epsilon", "Z", "tail_bound"]),
        rows.iter()
            .map(|r| vec![num(r.epsilon), num(r.z), num(r.tail_bound)]),
    )?;
    let report = Ym2Report {
        algebra: rs.label(),
        genus,
        target_tol: tol,
        rows,
    };
    enveloped(report, Some(csv))
}

fn run_pairings(cfg: &RunConfig) -> Outcome<Rendered> {
    let rs = parse_algebra(cfg)?;
    let genus: u32 = single(&cfg.genus, "genus")?;
    let d = expected_degree(&rs, genus) as u32;
    let k_max = cfg.k_max.unwrap_or((3 * d).max(d + 2).max(8));
    let report = pairing_report(&rs, genus, k_max, cfg.max_period.unwrap_or(4))?;
    enveloped(report, None)
}

fn run_crosscheck(cfg: &RunConfig) -> Outcome<Rendered> {
    let report = crosscheck_suite(cfg.suite.unwrap_or(Suite::Quick), cfg.seed.unwrap_or(0));
    let mut out = render(&report, None)?;
    out.passed = report.passed;
    Ok(out)
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Genera(_) | Command::Ym2(_) => Format::Csv,
        _ => Format::Json,
    }
}

fn thread_count(cfg: &RunConfig) -> Outcome<Option<usize>> {
    let n = match cfg.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse()
                    .map_err(|_| usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(usage("thread count must be >= 1"));
    }
    Ok(n)
}

fn execute(cli: &Cli) -> Outcome<(Rendered, Format, Option<PathBuf>)> {
    let file = match &cli.global.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let cfg = cli.to_config().over(file);
    let format = cfg.format.unwrap_or_else(|| default_format(&cli.command));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(&cfg)? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::Io(e.to_string()))?;
    let rendered = pool.install(|| match &cli.command {
        Command::Lie(_) => run_lie(&cfg),
        Command::Modular(_) => run_modular(&cfg),
        Command::Verlinde(_) => run_verlinde(&cfg),
        Command::Seifert(_) => run_seifert(&cfg),
        Command::Kirillov(_) => run_kirillov(&cfg),
        Command::Genera(_) => run_genera(&cfg),
        Command::Ym2(_) => run_ym2(&cfg),
        Command::Pairings(_) => run_pairings(&cfg),
        Command::Crosscheck(_) => run_crosscheck(&cfg),
    })?;
    Ok((rendered, format, cfg.output))
}

fn write_report(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
            // a closed pipe (e.g. `| head`) is not a failure
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other.map_err(|e| Failure::Io(e.to_string())),
        },
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = execute(&cli).and_then(|(rendered, format, output)| {
        let text = match format {
            Format::Json => rendered.json.clone(),
            Format::Csv => rendered
                .csv
                .clone()
                .ok_or_else(|| usage("CSV output is only offered for tabular subcommands"))?,
        };
        write_report(&text, output.as_deref(), stdout)?;
        Ok(rendered)
    });
    match result {
        Ok(rendered) if rendered.passed => EXIT_OK,
        Ok(rendered) => {
            if let Ok(report) = serde_json::from_str::<crate::crosscheck::CrosscheckReport>(&rendered.json) {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    let _ = writeln!(
                        stderr,
                        "FAILED {}: residual {:?}, tolerance {:e}: {}",
                        c.name, c.max_residual, c.tolerance, c.detail
                    );
                }
            }
            EXIT_CERTIFICATION
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_certification() {
                EXIT_CERTIFICATION
            } else {
                EXIT_PRECONDITION
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("seifert-cs").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range::<u32>("5", "level").unwrap(), 5..=5);
        assert_eq!(parse_range::<u32>("1..10", "level").unwrap(), 1..=10);
        assert_eq!(parse_range::<i64>("-3..=3", "degree").unwrap(), -3..=3);
        assert!(parse_range::<u32>("4..2", "level").is_err());
        assert!(parse_range::<u32>("x", "level").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let file = RunConfig::from_toml("algebra = \"A2\"\nlevel = 3\ngenus = \"0..2\"\nseed = 9").unwrap();
        let flags = RunConfig {
            level: Some("5".into()),
            ..RunConfig::default()
        };
        let c = flags.over(file);
        assert_eq!(c.level.as_deref(), Some("5"));
        assert_eq!(c.algebra.as_deref(), Some("A2"));
        assert_eq!(c.genus.as_deref(), Some("0..2"));
        assert_eq!(c.seed, Some(9));
        assert!(RunConfig::from_toml("levle = 3").is_err());
    }

    #[test]
    fn algebra_forms() {
        let cfg = |a: &str, r: Option<usize>| RunConfig {
            algebra: Some(a.into()),
            rank: r,
            ..RunConfig::default()
        };
        assert_eq!(parse_algebra(&cfg("A2", None)).unwrap().rank(), 2);
        assert_eq!(parse_algebra(&cfg("A", Some(3))).unwrap().rank(), 3);
        assert!(matches!(parse_algebra(&cfg("A", None)), Err(Failure::Usage(_))));
        assert!(matches!(parse_algebra(&cfg("A2", Some(3))), Err(Failure::Usage(_))));
        assert!(matches!(parse_algebra(&cfg("E8", None)), Err(Failure::Run(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["--help"]).0, EXIT_OK);
        assert_eq!(call(&["--version"]).0, EXIT_OK);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(call(&["verlinde", "--bogus"]).0, EXIT_USAGE);
        assert_eq!(call(&["verlinde", "--algebra", "A1", "--genus", "1"]).0, EXIT_USAGE);
        // label not integrable at level 1
        assert_eq!(
            call(&["verlinde", "--algebra", "A1", "--genus", "1", "--level", "1", "--label", "3"]).0,
            EXIT_PRECONDITION
        );
        assert_eq!(call(&["ym2", "--algebra", "A1", "--genus", "1"]).0, EXIT_PRECONDITION);
        assert_eq!(call(&["modular", "--algebra", "A1", "--level", "2", "--format", "csv"]).0, EXIT_USAGE);
    }

    #[test]
    fn seifert_and_verlinde_examples() {
        let (code, out, _) = call(&["seifert", "--algebra", "A1", "--level", "1", "--genus", "2", "--degree", "0"]);
        assert_eq!(code, 0);
        let r: Envelope<SeifertReport> = serde_json::from_str(&out).unwrap();
        assert!((r.report.value.value_re - 4.0).abs() < 1e-9);
        assert_eq!(r.schema, 1);

        let (code, out, _) = call(&["verlinde", "--algebra", "A1", "--genus", "1", "--level", "5"]);
        assert_eq!(code, 0);
        let t: Envelope<crate::verlinde::VerlindeTable> = serde_json::from_str(&out).unwrap();
        assert_eq!(t.report.rows[0].dimension, 6);
    }

    #[test]
    fn budget_is_enforced() {
        let (code, _, err) = call(&[
            "seifert", "--algebra", "A1", "--level", "1..50", "--genus", "0..3", "--degree", "-5..5", "--budget", "100",
        ]);
        assert_eq!(code, EXIT_PRECONDITION, "{err}");
        let (code, _, _) = call(&["ym2", "--algebra", "A1", "--genus", "2", "--budget", "10"]);
        assert_eq!(code, EXIT_PRECONDITION);
    }
}
