//! Batch experiments: a config file describing families × sizes × fields ×
//! theorems is expanded into cells, each cell generates its configuration,
//! runs the requested verifier, and lands in one report file plus a CSV
//! summary row. Cell errors are recorded and the run continues.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    greedy_k_free_subset, report_to_json, verify_i0, verify_i1, verify_r, verify_trivial,
    TheoremTag, VerificationReport, DEFAULT_ALARM_THRESHOLD,
};
use crate::concentrate::ConcOracle;
use crate::error::{Error, Result};
use crate::exactfield::FieldSpec;
use crate::geom::generate::{generate, Family, GeneratorConfig};
use crate::incidence::rich_points;
use crate::rng::SplitMix64;

/// A generator family with the swept size left open.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTemplate {
    /// size = number of lines.
    GenericLines,
    /// size = total lines; must be divisible by `flats`.
    LinesInFlats { flat_dim: usize, flats: usize },
    /// size = grid side.
    Grid {
        #[serde(default)]
        with_lines: bool,
    },
    /// size = number of concurrent lines.
    ConcurrentBundle,
    /// size ignored: always p + 1 lines.
    DirectionCover,
}

impl FamilyTemplate {
    fn instantiate(&self, size: usize) -> Result<Family> {
        Ok(match self {
            FamilyTemplate::GenericLines => Family::GenericLines { count: size },
            FamilyTemplate::LinesInFlats { flat_dim, flats } => {
                if !size.is_multiple_of(*flats) {
                    return Err(Error::InvalidParameter(format!(
                        "size {size} is not divisible by {flats} flats"
                    )));
                }
                Family::LinesInFlats {
                    flat_dim: *flat_dim,
                    flats: *flats,
                    lines_per_flat: size / flats,
                }
            }
            FamilyTemplate::Grid { with_lines } => Family::Grid {
                side: size,
                with_lines: *with_lines,
            },
            FamilyTemplate::ConcurrentBundle => Family::ConcurrentBundle { count: size },
            FamilyTemplate::DirectionCover => Family::DirectionCover,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            FamilyTemplate::GenericLines => "generic_lines",
            FamilyTemplate::LinesInFlats { .. } => "lines_in_flats",
            FamilyTemplate::Grid { .. } => "grid",
            FamilyTemplate::ConcurrentBundle => "concurrent_bundle",
            FamilyTemplate::DirectionCover => "direction_cover",
        }
    }
}

/// One sweep: a family crossed with field moduli (0 means the rationals),
/// sizes, and theorems.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub family: FamilyTemplate,
    pub ambient_dim: usize,
    pub fields: Vec<u64>,
    pub sizes: Vec<usize>,
    pub theorems: Vec<TheoremTag>,
}

fn default_alarm() -> f64 {
    DEFAULT_ALARM_THRESHOLD
}

fn default_r() -> u32 {
    2
}

/// Default freeness parameter: for line families two points determine at
/// most one line.
fn default_k() -> u32 {
    2
}

fn default_oracle() -> ConcOracle {
    ConcOracle::Spanned
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_alarm")]
    pub alarm: f64,
    #[serde(default = "default_r")]
    pub r: u32,
    #[serde(default = "default_k")]
    pub k: u32,
    #[serde(default = "default_oracle")]
    pub oracle: ConcOracle,
    pub sweeps: Vec<SweepSpec>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellOutcome {
    pub index: usize,
    pub family: String,
    pub n: usize,
    /// 0 for the rationals.
    pub p: u64,
    pub size: usize,
    pub theorem: TheoremTag,
    pub report: Option<VerificationReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub cells: usize,
    pub errors: usize,
    pub alarm: f64,
    pub alarm_breaches: usize,
    pub max_ratio: f64,
}

fn run_cell(
    cfg: &ExperimentConfig,
    sweep: &SweepSpec,
    p: u64,
    size: usize,
    theorem: TheoremTag,
    seed: u64,
) -> Result<VerificationReport> {
    let field = if p == 0 {
        FieldSpec::Rational
    } else {
        FieldSpec::prime(p)?
    };
    let t = generate(&GeneratorConfig {
        field,
        ambient_dim: sweep.ambient_dim,
        family: sweep.family.instantiate(size)?,
        seed,
    })?;
    match theorem {
        TheoremTag::I0 => {
            let s = rich_points(&t, cfg.r)?.points;
            verify_i0(&s, &t, cfg.oracle)
        }
        TheoremTag::I1 => verify_i1(&t, cfg.r, cfg.k, cfg.oracle),
        TheoremTag::R => {
            let rich = rich_points(&t, cfg.r)?.points;
            let s = greedy_k_free_subset(&rich, &t, cfg.k)?;
            verify_r(&s, &t, cfg.k, cfg.oracle)
        }
        TheoremTag::Trivial => {
            let rich = rich_points(&t, cfg.r)?.points;
            let s = greedy_k_free_subset(&rich, &t, cfg.k)?;
            verify_trivial(&s, &t, cfg.k)
        }
        other => Err(Error::InvalidParameter(format!(
            "theorem {} is not an experiment cell",
            other.as_str()
        ))),
    }
}

/// Expands the config, runs every cell, and writes one report JSON per cell
/// plus `summary.csv` and `errors.json` into `out_dir`. Deterministic for a
/// fixed config.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ExperimentSummary> {
    fs::create_dir_all(out_dir)?;
    let rng = SplitMix64::new(cfg.seed);
    let mut csv = String::from("family,n,p,size,theorem,lhs,rhs_total,ratio\n");
    let mut outcomes: Vec<CellOutcome> = Vec::new();
    let mut index = 0usize;
    let mut alarm_breaches = 0usize;
    let mut max_ratio = 0.0f64;
    for sweep in &cfg.sweeps {
        for &p in &sweep.fields {
            for &size in &sweep.sizes {
                for &theorem in &sweep.theorems {
                    let cell_seed = rng.fork(index as u64).next_u64();
                    let result = run_cell(cfg, sweep, p, size, theorem, cell_seed);
                    let mut outcome = CellOutcome {
                        index,
                        family: sweep.family.name().to_string(),
                        n: sweep.ambient_dim,
                        p,
                        size,
                        theorem,
                        report: None,
                        error: None,
                    };
                    match result {
                        Ok(report) => {
                            let _ = writeln!(
                                csv,
                                "{},{},{},{},{},{},{},{}",
                                outcome.family,
                                outcome.n,
                                p,
                                size,
                                theorem.as_str(),
                                report.lhs,
                                report.rhs_total,
                                report.ratio
                            );
                            if report.ratio > cfg.alarm {
                                alarm_breaches += 1;
                            }
                            max_ratio = max_ratio.max(report.ratio);
                            let path = out_dir.join(format!(
                                "report_{index:03}_{}_{}.json",
                                outcome.family,
                                theorem.as_str()
                            ));
                            fs::write(
                                &path,
                                serde_json::to_string_pretty(&report_to_json(&report))?,
                            )?;
                            outcome.report = Some(report);
                        }
                        Err(e) => outcome.error = Some(e.to_string()),
                    }
                    outcomes.push(outcome);
                    index += 1;
                }
            }
        }
    }
    fs::write(out_dir.join("summary.csv"), &csv)?;
    let errors: Vec<_> = outcomes
        .iter()
        .filter(|o| o.error.is_some())
        .map(|o| {
            json!({
                "index": o.index,
                "family": o.family,
                "n": o.n,
                "p": o.p,
                "size": o.size,
                "theorem": o.theorem.as_str(),
                "error": o.error,
            })
        })
        .collect();
    fs::write(
        out_dir.join("errors.json"),
        serde_json::to_string_pretty(&serde_json::Value::Array(errors))?,
    )?;
    Ok(ExperimentSummary {
        cells: outcomes.len(),
        errors: outcomes.iter().filter(|o| o.error.is_some()).count(),
        alarm: cfg.alarm,
        alarm_breaches,
        max_ratio,
    })
}
