use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use qcurve::corpus;
use qcurve::curve::Curve;
use qcurve::homotopy::{measure_jump, Scenario};
use qcurve::indexing::index_curve;
use qcurve::invariants::analyze;
use qcurve::render::{render_svg, RenderOptions};
use qcurve::verify::{read_document, verify, Corpus};
use qcurve::{Error, Tolerances};

const EXIT_PARSE: u8 = 1;
const EXIT_NOT_GENERIC: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Quantized total curvature and related invariants of plane curves.
#[derive(Parser)]
#[command(name = "qcurve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the invariant report of each curve file.
    Compute {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Evaluation points for I_q.
        #[arg(long = "q", value_delimiter = ',', value_parser = positive)]
        q: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// List arcs and double points with their indices.
    Index {
        path: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every consistency suite on a corpus directory (builtin corpus by default).
    Verify {
        dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Homotopy scenarios.
    Scenario {
        #[command(subcommand)]
        action: ScenarioAction,
    },
    /// Draw a curve with its indices as SVG.
    Render {
        path: PathBuf,
        /// Picture size in pixels.
        #[arg(long, default_value_t = 600)]
        size: u32,
        #[arg(long)]
        no_labels: bool,
        /// Print winding numbers inside regions.
        #[arg(long)]
        regions: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write the builtin curves and scenarios as JSON files.
    ExportCorpus { dir: PathBuf },
}

#[derive(Subcommand)]
enum ScenarioAction {
    /// Measure the invariant jumps across each scenario's event.
    Run {
        paths: Vec<PathBuf>,
        /// Run the builtin scenarios.
        #[arg(long)]
        builtin: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Positional tolerance for crossing detection.
    #[arg(long, value_parser = positive)]
    tol_pos: Option<f64>,
    /// Minimal crossing angle, in radians, for a crossing to count as transversal.
    #[arg(long, value_parser = positive)]
    tol_angle: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not positive")),
        Err(e) => Err(e.to_string()),
    }
}

impl Common {
    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(p) = self.tol_pos {
            tol.position = p;
        }
        if let Some(a) = self.tol_angle {
            tol.angle_guard = a;
        }
        tol
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, e)),
            None => {
                let mut out = std::io::stdout().lock();
                let _ = out.write_all(text.as_bytes());
                if !text.ends_with('\n') {
                    let _ = out.write_all(b"\n");
                }
                Ok(())
            }
        }
    }
}

/// A message and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: EXIT_PARSE,
            message: format!("{}: {e}", path.display()),
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidPath { .. } => EXIT_PARSE,
            Error::NotGeneric(_) | Error::NonImmersion { .. } => EXIT_NOT_GENERIC,
            _ => EXIT_VERIFY,
        };
        Failure {
            code,
            message: format!("{context}: {e}"),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports always serialize")
}

/// Serializes one item bare and several as a list.
fn json_items<T: Serialize>(items: &[T]) -> String {
    match items {
        [one] => to_json(one),
        many => to_json(&many),
    }
}

fn load_curve(path: &Path) -> Result<(Option<String>, Curve), Failure> {
    let context = path.display().to_string();
    let doc = read_document(path).map_err(|e| Failure::from_error(&context, e))?;
    let name = doc.name.clone();
    let curve = Curve::try_from(doc).map_err(|e| Failure::from_error(&context, e))?;
    Ok((name, curve))
}

/// Output for the successful items, then the highest failure code.
fn finish<T>(
    results: Vec<Result<T, Failure>>,
    common: &Common,
    render: impl FnOnce(&[T]) -> String,
    failed: impl Fn(&T) -> bool,
) -> Result<(), Failure> {
    let mut code = 0;
    let mut ok = Vec::new();
    for r in results {
        match r {
            Ok(v) => {
                if failed(&v) {
                    code = code.max(EXIT_VERIFY);
                }
                ok.push(v);
            }
            Err(f) => {
                eprintln!("error: {}", f.message);
                code = code.max(f.code);
            }
        }
    }
    if !ok.is_empty() {
        common.emit(&render(&ok))?;
    }
    if code == 0 {
        Ok(())
    } else {
        Err(Failure {
            code,
            message: String::new(),
        })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { paths, q, common } => {
            let tol = common.tolerances();
            let results: Vec<_> = paths
                .par_iter()
                .map(|path| {
                    let (name, curve) = load_curve(path)?;
                    let mut report = analyze(&curve, &tol, &q)
                        .map_err(|e| Failure::from_error(&path.display().to_string(), e))?;
                    report.name = name;
                    Ok(report)
                })
                .collect();
            let format = common.format;
            finish(
                results,
                &common,
                |reports| match format {
                    Format::Json => json_items(reports),
                    Format::Text => reports
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join("\n\n"),
                },
                |r| !r.checks.all(),
            )
        }
        Command::Index { path, common } => {
            let (_, curve) = load_curve(&path)?;
            let indexed = index_curve(&curve, &common.tolerances())
                .map_err(|e| Failure::from_error(&path.display().to_string(), e))?;
            let dump = indexed.dump();
            let text = match common.format {
                Format::Json => to_json(&dump),
                Format::Text => {
                    let mut s = String::new();
                    for (i, a) in dump.arcs.iter().enumerate() {
                        s += &format!(
                            "arc {i}: component {} t in [{:.6}, {:.6}] index {} turning {:.6}\n",
                            a.component, a.interval[0], a.interval[1], a.index, a.turning
                        );
                    }
                    for (i, d) in dump.double_points.iter().enumerate() {
                        s += &format!(
                            "double point {i}: ({:.6}, {:.6}) t = {:.6}, {:.6} theta {:.6} index {}\n",
                            d.position.x, d.position.y, d.t1, d.t2, d.theta, d.index
                        );
                    }
                    for (i, c) in dump.smoothed.iter().enumerate() {
                        s += &format!("smoothed {i}: rotation {} index {}\n", c.rotation, c.index);
                    }
                    s
                }
            };
            common.emit(&text)
        }
        Command::Verify { dir, common } => {
            let corpus = match &dir {
                Some(d) => Corpus::load(d).map_err(|e| Failure::from_error(&d.display().to_string(), e))?,
                None => Corpus::builtin(),
            };
            let summary = verify(&corpus, &common.tolerances());
            common.emit(&match common.format {
                Format::Json => to_json(&summary),
                Format::Text => summary.to_string(),
            })?;
            if summary.passed() {
                Ok(())
            } else {
                Err(Failure {
                    code: EXIT_VERIFY,
                    message: "verification failed".into(),
                })
            }
        }
        Command::Scenario {
            action:
                ScenarioAction::Run {
                    paths,
                    builtin,
                    common,
                },
        } => {
            let mut scenarios: Vec<Result<Scenario, Failure>> = paths
                .iter()
                .map(|p| {
                    fs::read_to_string(p)
                        .map_err(|e| Failure::io(p, e))
                        .and_then(|t| {
                            Scenario::from_json(&t).map_err(|e| Failure::from_error(&p.display().to_string(), e))
                        })
                })
                .collect();
            if builtin || paths.is_empty() {
                scenarios.extend(corpus::builtin_scenarios().into_iter().map(Ok));
            }
            let tol = common.tolerances();
            let results: Vec<_> = scenarios
                .into_par_iter()
                .map(|s| {
                    let s = s?;
                    measure_jump(&s, &tol).map_err(|e| Failure::from_error(&s.name, e))
                })
                .collect();
            let format = common.format;
            finish(
                results,
                &common,
                |reports| match format {
                    Format::Json => to_json(&reports),
                    Format::Text => reports
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join("\n\n"),
                },
                |r| !r.passed(),
            )
        }
        Command::Render {
            path,
            size,
            no_labels,
            regions,
            common,
        } => {
            let (_, curve) = load_curve(&path)?;
            let indexed = index_curve(&curve, &common.tolerances())
                .map_err(|e| Failure::from_error(&path.display().to_string(), e))?;
            let opts = RenderOptions {
                size,
                labels: !no_labels,
                regions,
            };
            common.emit(&render_svg(&indexed, &opts))
        }
        Command::ExportCorpus { dir } => {
            corpus::export(&dir).map_err(|e| Failure::from_error(&dir.display().to_string(), e))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
