//! `ilab`: generate configurations, count incidences, build vanishing
//! polynomials, measure concentration, run partitions, and verify incidence
//! bounds. All inputs and outputs are the JSON formats of ilab-core.
//!
//! Exit codes: 0 success, 1 verification violation, 2 input error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ilab_core::concentrate::{concentration, ConcOracle};
use ilab_core::error::Error;
use ilab_core::geom::generate::{generate, Family, GeneratorConfig};
use ilab_core::harness::experiment::{run_experiment, ExperimentConfig};
use ilab_core::harness::{
    greedy_k_free_subset, report_to_json, verify_cii_suite, verify_i0, verify_i1, verify_r,
    verify_trivial, TheoremTag, DEFAULT_ALARM_THRESHOLD,
};
use ilab_core::incidence::{bezout_line_check, incidence_degree, k_free_check, rich_points};
use ilab_core::io;
use ilab_core::partition::{good_partition_search, parse_fraction, partition_iterate, BudgetRule};
use ilab_core::vanish::{min_vanishing_degree, relative_degree, vanishing_poly};
use ilab_core::{FieldSpec, VarietySet};

#[derive(Parser)]
#[command(name = "ilab", about = "exact incidence-geometry laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a configuration family as an object-set file.
    Gen {
        /// generic_lines | lines_in_flats | grid | concurrent_bundle | direction_cover
        #[arg(long)]
        family: String,
        /// Prime modulus, or "rational".
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 2)]
        ambient_dim: usize,
        /// Lines for generic_lines / concurrent_bundle.
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        flat_dim: usize,
        #[arg(long, default_value_t = 0)]
        flats: usize,
        #[arg(long, default_value_t = 0)]
        lines_per_flat: usize,
        /// Grid side.
        #[arg(long, default_value_t = 0)]
        side: usize,
        /// Grid: emit the axis-parallel lines instead of the points.
        #[arg(long, default_value_t = false)]
        with_lines: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Incidence count I(S, T), with optional rich-point and k-freeness
    /// fragments.
    Incidence {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        /// Also report the r-rich point count.
        #[arg(long)]
        rich: Option<u32>,
        /// Also check k-freeness of S with respect to T.
        #[arg(long)]
        k_free: Option<u32>,
        #[command(flatten)]
        out: OutArg,
    },
    /// The r-rich points of a line family.
    Rich {
        #[arg(long)]
        t: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[command(flatten)]
        out: OutArg,
    },
    /// Minimum-degree vanishing polynomial, or relative degree when --avoid
    /// is given.
    Vanish {
        #[arg(long)]
        t: PathBuf,
        /// Check a single degree instead of sweeping.
        #[arg(long)]
        max_degree: Option<usize>,
        /// Flats the witness must not die on (object-set file).
        #[arg(long)]
        avoid: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Concentration parameter D_m(T).
    Conc {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "spanned")]
        oracle: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Iterated partition of (S, T) with exact error accounting.
    Partition {
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        t: PathBuf,
        /// Exact fraction, e.g. 0.4 or 2/5.
        #[arg(long)]
        tau: String,
        /// "relative" or "fixed:D".
        #[arg(long, default_value = "relative")]
        budget: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Single-polynomial split proposal for T (absence is reported, not an
    /// error).
    Split {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 1)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Bezout check of a line against a polynomial file.
    Bezout {
        #[arg(long)]
        t: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Verify a bound: i0 | i1 | r | trivial | cii.
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        s: Option<PathBuf>,
        #[arg(long)]
        t: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = "spanned")]
        oracle: String,
        /// Ratio alarm threshold; exceeding it is a verification failure.
        #[arg(long, default_value_t = DEFAULT_ALARM_THRESHOLD)]
        alarm: f64,
        /// Instance count for the cii suite.
        #[arg(long, default_value_t = 1000)]
        instances: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run an experiment config: reports, CSV summary and error log.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn parse_field(s: &str) -> Result<FieldSpec, Error> {
    match s {
        "rational" | "q" | "Q" | "0" => Ok(FieldSpec::Rational),
        other => {
            let p: u64 = other
                .parse()
                .map_err(|_| Error::Parse(format!("bad field {other:?}")))?;
            FieldSpec::prime(p)
        }
    }
}

fn load_set(path: &PathBuf) -> Result<VarietySet, Error> {
    io::object_set_from_json(&fs::read_to_string(path)?)
}

fn emit(out: &OutArg, value: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match &out.out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Ok(true) = success, Ok(false) = verification violation.
fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Gen {
            family,
            field,
            ambient_dim,
            count,
            flat_dim,
            flats,
            lines_per_flat,
            side,
            with_lines,
            seed,
            out,
        } => {
            let family = match family.as_str() {
                "generic_lines" => Family::GenericLines { count },
                "lines_in_flats" => Family::LinesInFlats {
                    flat_dim,
                    flats,
                    lines_per_flat,
                },
                "grid" => Family::Grid { side, with_lines },
                "concurrent_bundle" => Family::ConcurrentBundle { count },
                "direction_cover" => Family::DirectionCover,
                other => return Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
            };
            let set = generate(&GeneratorConfig {
                field: parse_field(&field)?,
                ambient_dim,
                family,
                seed,
            })?;
            emit(&out, &io::object_set_to_json(&set))?;
            Ok(true)
        }
        Command::Incidence {
            s,
            t,
            rich,
            k_free,
            out,
        } => {
            let s = load_set(&s)?;
            let t = load_set(&t)?;
            let count = incidence_degree(&s, &t)?;
            let mut fragment = json!({ "incidence_total": count.total });
            if let Some(r) = rich {
                let rs = rich_points(&t, r)?;
                fragment["rich"] = json!({ "r": r, "count": rs.points.len() });
            }
            if let Some(k) = k_free {
                fragment["k_free"] = json!(k_free_check(&s, &t, k)?.free);
            }
            emit(&out, &fragment)?;
            Ok(true)
        }
        Command::Rich { t, r, out } => {
            let t = load_set(&t)?;
            let rs = rich_points(&t, r)?;
            emit(&out, &io::rich_set_to_json(&rs))?;
            Ok(true)
        }
        Command::Vanish {
            t,
            max_degree,
            avoid,
            out,
        } => {
            let ts = load_set(&t)?;
            let value = match avoid {
                Some(path) => {
                    let flats = io::flats_from_json(&fs::read_to_string(path)?)?;
                    let res = relative_degree(&ts, &flats)?;
                    io::relative_degree_to_json(&res)
                }
                None => {
                    let res = match max_degree {
                        Some(d) => vanishing_poly(&ts, d)?,
                        None => min_vanishing_degree(&ts)?,
                    };
                    io::vanish_result_to_json(&res)
                }
            };
            emit(&out, &value)?;
            Ok(true)
        }
        Command::Conc { t, m, oracle, out } => {
            let ts = load_set(&t)?;
            let est = concentration(&ts, m, oracle.parse::<ConcOracle>()?)?;
            emit(&out, &io::concentration_to_json(&est))?;
            Ok(true)
        }
        Command::Partition {
            s,
            t,
            tau,
            budget,
            seed,
            out,
        } => {
            let s = load_set(&s)?;
            let t = load_set(&t)?;
            let rule = match budget.as_str() {
                "relative" => BudgetRule::Relative,
                other => match other.strip_prefix("fixed:") {
                    Some(d) => BudgetRule::Fixed {
                        degree: d
                            .parse()
                            .map_err(|_| Error::Parse(format!("bad budget {other:?}")))?,
                    },
                    None => return Err(Error::Parse(format!("bad budget {other:?}"))),
                },
            };
            let trace = partition_iterate(&s, &t, parse_fraction(&tau)?, rule, seed)?;
            let ok = trace.global_inequality_holds() && trace.steps.iter().all(|st| st.holds());
            emit(&out, &io::partition_trace_to_json(&trace))?;
            Ok(ok)
        }
        Command::Split {
            t,
            tau,
            budget,
            seed,
            out,
        } => {
            let t = load_set(&t)?;
            let found = good_partition_search(&t, parse_fraction(&tau)?, budget, seed)?;
            emit(
                &out,
                &json!({ "found": found.as_ref().map(io::poly_to_json) }),
            )?;
            Ok(true)
        }
        Command::Bezout { t, poly, out } => {
            let ts = load_set(&t)?;
            let f = io::poly_from_json(&fs::read_to_string(poly)?, ts.spec())?;
            let mut checks = Vec::new();
            let mut ok = true;
            for line in ts.members() {
                let check = bezout_line_check(line, &f)?;
                let value = match &check {
                    ilab_core::incidence::BezoutCheck::Contained => json!("contained"),
                    ilab_core::incidence::BezoutCheck::Count(c) => {
                        if *c > f.total_degree().unwrap_or(0) {
                            ok = false;
                        }
                        json!(c)
                    }
                };
                checks.push(value);
            }
            emit(
                &out,
                &json!({ "deg_f": f.total_degree(), "checks": checks }),
            )?;
            Ok(ok)
        }
        Command::Verify {
            theorem,
            s,
            t,
            r,
            k,
            oracle,
            alarm,
            instances,
            seed,
            out,
        } => {
            let theorem: TheoremTag = theorem.parse()?;
            let oracle: ConcOracle = oracle.parse()?;
            if theorem == TheoremTag::Cii {
                let summary = verify_cii_suite(instances, seed)?;
                let ok = summary.violations.is_empty();
                emit(&out, &serde_json::to_value(&summary)?)?;
                return Ok(ok);
            }
            let t = t.ok_or_else(|| {
                Error::InvalidParameter("--t is required for this theorem".into())
            })?;
            let t = load_set(&t)?;
            let report = match theorem {
                TheoremTag::I0 => {
                    let s = match s {
                        Some(path) => load_set(&path)?,
                        None => rich_points(&t, r)?.points,
                    };
                    verify_i0(&s, &t, oracle)?
                }
                TheoremTag::I1 => verify_i1(&t, r, k, oracle)?,
                TheoremTag::R => {
                    let s = match s {
                        Some(path) => load_set(&path)?,
                        None => {
                            let rich = rich_points(&t, r)?.points;
                            greedy_k_free_subset(&rich, &t, k)?
                        }
                    };
                    verify_r(&s, &t, k, oracle)?
                }
                TheoremTag::Trivial => {
                    let s = match s {
                        Some(path) => load_set(&path)?,
                        None => {
                            let rich = rich_points(&t, r)?.points;
                            greedy_k_free_subset(&rich, &t, k)?
                        }
                    };
                    verify_trivial(&s, &t, k)?
                }
                TheoremTag::Cii | TheoremTag::BezoutSuite => unreachable!(),
            };
            let ok = report.ratio <= alarm;
            emit(&out, &report_to_json(&report))?;
            Ok(ok)
        }
        Command::Experiment { config, out_dir } => {
            let cfg: ExperimentConfig = serde_json::from_str(&fs::read_to_string(config)?)?;
            let summary = run_experiment(&cfg, &out_dir)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(summary.alarm_breaches == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
