use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use planar::conicweb::{self, ConicSystem, KhovanskiiCase, WebCase};
use planar::dualize::{self, PlanarizationClass};
use planar::gen::{self, MapKind};
use planar::jetplan::{MapEvaluator, RationalSource, SampleGrid};
use planar::poly::{implicitize, RatMap};
use planar::ratfit::{self, FLOAT_FIT_TOL};
use planar::scalar::to_f64;
use planar::{Error, Mode};

#[derive(Parser)]
#[command(name = "planar", version, about = "Planarizations, their duals and maps taking lines to conics")]
struct Cli {
    #[arg(long, value_enum, global = true, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest residual accepted from a float fit.
    #[arg(long, global = true, default_value_t = FLOAT_FIT_TOL)]
    tolerance: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write sampled image curves of a few lines as CSV.
    #[arg(long, global = true)]
    emit_curves: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Dual map of a rational map (JSON).
    Dualize {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Trivial / co-trivial / rational verdict for a map (JSON) or samples (CSV).
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rational map reproducing a CSV sample grid.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        degree_max: usize,
    },
    /// Which web case a map into the plane falls under.
    WebClassify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Web of conics (JSON); the circle web when omitted.
        #[arg(long)]
        web: Option<PathBuf>,
    },
    /// Lowest-degree relation satisfied by the components of a map.
    Implicitize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        degree_max: u32,
    },
    /// Circle-preserving maps into the unit sphere.
    Khovanskii {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Seeded random map.
    Gen {
        #[arg(long)]
        kind: String,
    },
}

enum Outcome {
    Definite(Value),
    Open(Value),
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<RatMap, Error> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_source(path: &Path, mode: Mode) -> Result<Box<dyn MapEvaluator>, Error> {
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(Box::new(SampleGrid::from_csv(&read(path)?, mode)?))
    } else {
        Ok(Box::new(RationalSource::unit(load_map(path)?)?))
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Errors that reflect bad input rather than an inconclusive computation.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::ZeroVector
            | Error::AllZero
            | Error::DependentBasis
            | Error::NotOnSphere(_)
            | Error::NotALinesToCurvesMap(_)
    )
}

fn class_report(c: &PlanarizationClass) -> Outcome {
    let name = c.name();
    match c {
        PlanarizationClass::Trivial(h) => Outcome::Definite(json!({"class": name, "witness": to_value(h), "degree": null})),
        PlanarizationClass::CoTrivial(o) => Outcome::Definite(json!({"class": name, "witness": to_value(o), "degree": null})),
        PlanarizationClass::Rational(d) => Outcome::Definite(json!({"class": name, "witness": null, "degree": d})),
        PlanarizationClass::Indeterminate(why) => {
            Outcome::Open(json!({"class": name, "witness": null, "degree": null, "reason": why}))
        }
    }
}

fn emit_curves(f: &dyn MapEvaluator, seed: u64, path: &Path) -> Result<(), Error> {
    let n = f.target_dim();
    let mut out = String::from("line,u,v");
    for k in 1..=n {
        out.push_str(&format!(",y{k}"));
    }
    out.push('\n');
    for (i, line) in conicweb::screening_lines(f, 5, seed).iter().enumerate() {
        for (u, v, y) in conicweb::line_samples(f, line, 41) {
            let y0 = to_f64(&y[0]);
            if y0 == 0.0 {
                continue;
            }
            out.push_str(&format!("{i},{},{}", to_f64(&u), to_f64(&v)));
            for c in &y[1..] {
                out.push_str(&format!(",{}", to_f64(c) / y0));
            }
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let mode: Mode = cli.mode.into();
    let seed = cli.seed;
    let curves = |f: &dyn MapEvaluator| match &cli.emit_curves {
        Some(p) => emit_curves(f, seed, p),
        None => Ok(()),
    };
    match &cli.command {
        Command::Dualize { input } => {
            let map = load_map(input)?;
            curves(&RationalSource::unit(map.clone())?)?;
            match dualize::dual_map(&map, seed) {
                Ok(d) => Ok(Outcome::Definite(json!({"dual": to_value(&d), "degree": d.degree()}))),
                Err(e) if !is_input_error(&e) => Ok(Outcome::Open(json!({"dual": null, "degree": null, "reason": e.to_string()}))),
                Err(e) => Err(e),
            }
        }
        Command::Classify { input } => {
            let f = load_source(input, mode)?;
            curves(f.as_ref())?;
            Ok(class_report(&dualize::classify_sampled(f.as_ref(), seed)?))
        }
        Command::Fit { input, degree_max } => {
            let f = load_source(input, mode)?;
            curves(f.as_ref())?;
            match ratfit::fit_map(f.as_ref(), *degree_max, seed) {
                Ok(fit) => {
                    let report = json!({
                        "map": to_value(&fit.map),
                        "degree": fit.map.degree(),
                        "chart": fit.chart,
                        "checked": fit.checked,
                        "max_residual": fit.max_residual,
                    });
                    Ok(if fit.max_residual <= cli.tolerance {
                        Outcome::Definite(report)
                    } else {
                        Outcome::Open(report)
                    })
                }
                Err(e) if !is_input_error(&e) => Ok(Outcome::Open(json!({"map": null, "reason": e.to_string()}))),
                Err(e) => Err(e),
            }
        }
        Command::WebClassify { input, web } => {
            let f = load_source(input, mode)?;
            curves(f.as_ref())?;
            let web = match web {
                Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?,
                None => ConicSystem::circle_web(),
            };
            let v = conicweb::classify_web(f.as_ref(), &web, seed)?;
            let witness = match &v.case {
                WebCase::InConic(l) => to_value(l),
                WebCase::InverseQuadratic(w) | WebCase::Quadratic(w) => to_value(w),
                WebCase::QuadricFactor { q, phi, f_composite } => {
                    json!({"q": to_value(q), "phi": to_value(phi), "f": to_value(f_composite)})
                }
                WebCase::Unresolved(_) => Value::Null,
            };
            let report = json!({"case": v.case.name(), "witness": witness, "diagnostics": v.diagnostics});
            Ok(match v.case {
                WebCase::Unresolved(_) => Outcome::Open(report),
                _ => Outcome::Definite(report),
            })
        }
        Command::Implicitize { input, degree_max } => {
            let map = load_map(input)?;
            Ok(match implicitize(&map, *degree_max) {
                Some(imp) => Outcome::Definite(json!({"degree": imp.degree, "relation": to_value(&imp.relation)})),
                None => Outcome::Open(json!({"degree": null, "relation": null, "searched_up_to": degree_max})),
            })
        }
        Command::Khovanskii { input } => {
            let f = load_source(input, mode)?;
            curves(f.as_ref())?;
            match conicweb::khovanskii_classify(f.as_ref(), seed) {
                Ok(c) => {
                    let (witness, center) = match &c {
                        KhovanskiiCase::InCircle(h) => (to_value(h), Value::Null),
                        KhovanskiiCase::CoTrivial(o) => (to_value(o), Value::Null),
                        KhovanskiiCase::Quadratic { map, center } => (to_value(map), to_value(center)),
                    };
                    Ok(Outcome::Definite(json!({"case": c.name(), "witness": witness, "center": center})))
                }
                Err(e) if !is_input_error(&e) => Ok(Outcome::Open(json!({"case": null, "reason": e.to_string()}))),
                Err(e) => Err(e),
            }
        }
        Command::Gen { kind } => {
            let kind: MapKind = kind.parse()?;
            Ok(Outcome::Definite(to_value(&gen::generate(kind, seed))))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let (report, code) = match run(&cli) {
        Ok(Outcome::Definite(v)) => (v, 0),
        Ok(Outcome::Open(v)) => (v, 2),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("json") + "\n";
    match &cli.out {
        Some(p) => {
            if let Err(e) = fs::write(p, text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}
