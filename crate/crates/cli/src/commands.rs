use log::{info, warn};
use projspec::commute::{equivalence_report, EquivalenceConfig, EquivalenceReport};
use projspec::linalg::determinant;
use projspec::random::{commuting_normal, disk_point, gaussian_tuple, independent_normal, rng};
use projspec::spectra::{csv_number, sample_curve, CurveSample};
use projspec::{charpoly, Complex64, ComplexMatrix, MultiPoly, OperatorTuple};
use serde::Serialize;

use crate::document::TupleDocument;
use crate::CliError;

pub const SELF_CHECK_POINTS: usize = 10;
/// Largest `|p(z) − det(I + Σ z_k A_k)| / (1 + |det|)` accepted by the
/// charpoly self-check.
pub const SELF_CHECK_TOL: f64 = 1e-8;
pub const DEFAULT_SPECTRUM_GRID: usize = 21;
pub const MAX_DIM: usize = 64;
pub const MAX_ARITY: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    CommutingNormal,
    RandomNormal,
    Random,
    Counterexample,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub tol: f64,
    pub seed: u64,
    pub grid: Option<usize>,
    pub format: Option<Format>,
}

/// What a command produced: the text to write and whether the run is flagged.
pub struct Output {
    pub text: String,
    pub flagged: bool,
}

impl Output {
    fn plain(text: String) -> Self {
        Self { text, flagged: false }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Input(format!("{command} has no CSV output"))),
        _ => Ok(()),
    }
}

/// Largest relative mismatch between `p` and the pencil determinant at
/// seeded points of a polydisk scaled to the tuple.
fn self_check(tuple: &OperatorTuple, p: &MultiPoly, seed: u64) -> Result<f64, CliError> {
    let radius = 1.0 / (1.0 + tuple.norms().iter().sum::<f64>());
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..SELF_CHECK_POINTS {
        let z: Vec<Complex64> = (0..tuple.arity()).map(|_| disk_point(2.0 * radius, &mut r)).collect();
        let direct = determinant(&tuple.pencil(&z)?);
        let value = p.evaluate(&z)?;
        worst = worst.max((value - direct).norm() / (1.0 + direct.norm()));
    }
    Ok(worst)
}

fn polynomial_csv(p: &MultiPoly) -> String {
    let mut s: String = (1..=p.arity()).map(|k| format!("e{k},")).collect();
    s.push_str("re,im\n");
    for (exp, c) in p.terms() {
        for e in exp {
            s.push_str(&format!("{e},"));
        }
        s.push_str(&format!("{},{}\n", csv_number(c.re), csv_number(c.im)));
    }
    s
}

pub fn cmd_charpoly(doc: &TupleDocument, cfg: &RunConfig) -> Result<Output, CliError> {
    let tuple = doc.to_tuple()?;
    let p = charpoly(&tuple)?;
    let mismatch = self_check(&tuple, &p, cfg.seed)?;
    info!("charpoly self-check: max relative mismatch {mismatch:e} over {SELF_CHECK_POINTS} points");
    if mismatch > SELF_CHECK_TOL {
        return Err(CliError::Numeric(format!(
            "interpolated polynomial disagrees with the determinant by {mismatch:e}"
        )));
    }
    let text = match cfg.format {
        Some(Format::Csv) => polynomial_csv(&p),
        _ => to_json(&p)?,
    };
    Ok(Output::plain(text))
}

#[derive(Debug, Serialize)]
pub struct AnalyzeOutput {
    #[serde(rename = "N")]
    pub dim: usize,
    pub n: usize,
    pub tol: f64,
    pub seed: u64,
    /// Inconsistent, or consistent with the non-normal gap or a violation.
    pub flagged: bool,
    pub report: EquivalenceReport,
}

pub fn cmd_analyze(doc: &TupleDocument, cfg: &RunConfig) -> Result<Output, CliError> {
    json_only(cfg, "analyze")?;
    let tuple = doc.to_tuple()?;
    let ecfg = EquivalenceConfig {
        tol: cfg.tol,
        seed: cfg.seed,
        samples: cfg.grid.unwrap_or(EquivalenceConfig::default().samples),
    };
    let report = equivalence_report(&tuple, &ecfg)?;
    let flagged = !report.consistent || report.flagged();
    if report.non_normal_gap {
        warn!("reducible with hyperplane spectrum, yet the tuple does not commute (non-normal members)");
    }
    if report.violation {
        warn!("report violates the equivalence expected for normal tuples");
    }
    let out = AnalyzeOutput {
        dim: tuple.dim(),
        n: tuple.arity(),
        tol: cfg.tol,
        seed: cfg.seed,
        flagged,
        report,
    };
    Ok(Output {
        text: to_json(&out)?,
        flagged,
    })
}

/// `count` equispaced real values of `w` on `[−1, 1]`.
pub fn real_grid(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::new(-1.0 + 2.0 * k as f64 / (count - 1) as f64, 0.0))
        .collect()
}

pub fn cmd_spectrum(doc: &TupleDocument, cfg: &RunConfig) -> Result<Output, CliError> {
    let tuple = doc.to_tuple()?;
    if tuple.arity() != 2 {
        return Err(CliError::Input(format!("spectrum needs a pair, got n = {}", tuple.arity())));
    }
    let count = cfg.grid.unwrap_or(DEFAULT_SPECTRUM_GRID);
    if count < 2 {
        return Err(CliError::Input("the w grid needs at least two points".into()));
    }
    let sample: CurveSample = sample_curve(tuple.get(0), tuple.get(1), &real_grid(count))?;
    let text = match cfg.format {
        Some(Format::Json) => to_json(&sample)?,
        _ => sample.to_csv(),
    };
    Ok(Output::plain(text))
}

/// The pair `diag(1, 2)`, `[[3, 0], [4, 5]]`: completely reducible
/// characteristic polynomial, non-commuting members.
pub fn counterexample() -> OperatorTuple {
    let a = ComplexMatrix::from_real_diag(&[1.0, 2.0]);
    let b = ComplexMatrix::from_real_rows(&[&[3.0, 0.0], &[4.0, 5.0]]).expect("square rows");
    OperatorTuple::pair(a, b).expect("nonzero pair")
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("A{k}")).collect()
}

pub fn cmd_generate(kind: Kind, dim: usize, arity: usize, cfg: &RunConfig) -> Result<Output, CliError> {
    json_only(cfg, "generate")?;
    if !(1..=MAX_DIM).contains(&dim) || !(1..=MAX_ARITY).contains(&arity) {
        return Err(CliError::Input(format!(
            "need 1 ≤ N ≤ {MAX_DIM} and 1 ≤ n ≤ {MAX_ARITY}, got N = {dim}, n = {arity}"
        )));
    }
    let mut r = rng(cfg.seed);
    let doc = match kind {
        Kind::Counterexample => {
            if (dim, arity) != (2, 2) {
                return Err(CliError::Input("the counterexample is a pair of 2×2 matrices".into()));
            }
            TupleDocument::from_tuple(&counterexample(), Some(vec!["A".into(), "B".into()]), None)
        }
        Kind::CommutingNormal => TupleDocument::from_tuple(
            &commuting_normal(dim, arity, &mut r).tuple,
            Some(default_labels(arity)),
            Some(cfg.seed),
        ),
        Kind::RandomNormal => TupleDocument::from_tuple(
            &independent_normal(dim, arity, &mut r),
            Some(default_labels(arity)),
            Some(cfg.seed),
        ),
        Kind::Random => TupleDocument::from_tuple(
            &gaussian_tuple(dim, arity, &mut r),
            Some(default_labels(arity)),
            Some(cfg.seed),
        ),
    };
    Ok(Output::plain(doc.to_json()))
}
