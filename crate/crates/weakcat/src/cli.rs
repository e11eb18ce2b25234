//! `weakcat` command line. [`run`] takes argv and output streams so it can
//! be driven from tests; `main` only forwards the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use weakcat_core::scenarios::{consistency_audit, evaluate_scenario, Interpretation, Scenario, BUILTIN_NAMES};
use weakcat_core::vonneumann::{
    couple_and_postselect, gaussian_pointer, weak_limit_report, DEFAULT_GRID_POINTS, DEFAULT_SPAN_SIGMAS,
};
use weakcat_core::weakval::{reversed_weak_value, weak_value, SpectralDecomposition};
use weakcat_core::{LinearOperator, PrePostEnsemble};

use crate::builtins;
use crate::report::{self, number};
use crate::sdl;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SEED_VAR: &str = "WEAKCAT_SEED";

#[derive(Parser, Debug)]
#[command(name = "weakcat", version, about = "Weak values of pre- and post-selected scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InterpretationArg {
    Literal,
    Evolved,
}

impl From<InterpretationArg> for Interpretation {
    fn from(a: InterpretationArg) -> Self {
        match a {
            InterpretationArg::Literal => Interpretation::Literal,
            InterpretationArg::Evolved => Interpretation::Evolved,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in scenarios.
    List,
    /// Evaluate every observable of a scenario.
    Run {
        /// Built-in name or scenario file.
        target: String,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Weak value of one observable.
    Weak {
        target: String,
        #[arg(long)]
        observable: String,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
    },
    /// Couple a Gaussian pointer to an observable and post-select.
    Pointer {
        target: String,
        #[arg(long)]
        observable: String,
        #[arg(long)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Grid points (power of two, 64 to 512).
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        n: usize,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
    },
    /// Pointer shifts over geometrically spaced coupling strengths.
    Sweep {
        target: String,
        #[arg(long)]
        observable: String,
        #[arg(long)]
        g_from: f64,
        #[arg(long)]
        g_to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Consistency audit of a scenario.
    Audit {
        target: String,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
    },
    /// Strong (projective) measurements at the measurement plane, seeded by WEAKCAT_SEED.
    Sample {
        target: String,
        #[arg(long)]
        observable: String,
        #[arg(long, default_value_t = 10_000)]
        shots: usize,
        #[arg(long, value_enum)]
        interpretation: Option<InterpretationArg>,
    },
    /// Print a scenario in canonical file form.
    Export { target: String },
    /// Parse and check a scenario file.
    Check { file: String },
}

/// Where a command stopped early: the exit code, the message already written.
struct Exit(i32);

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.err, "weakcat: {msg}");
        Exit(code)
    }
}

/// Reads a scenario file, mapping a missing file to the usage exit code.
fn read_source(path: &str, io: &mut Io) -> Result<String, Exit> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Err(io.fail(EXIT_USAGE, format!("file not found: {path}")))
        }
        Err(e) => Err(io.fail(EXIT_USAGE, format!("cannot read {path}: {e}"))),
    }
}

fn compile_file(path: &str, io: &mut Io) -> Result<Scenario, Exit> {
    let text = read_source(path, io)?;
    let stem = Path::new(path).file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    match sdl::compile(&text, stem) {
        Ok(lowered) => {
            for w in &lowered.warnings {
                let _ = writeln!(io.err, "{path}:{w}");
            }
            Ok(lowered.scenario)
        }
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(io.err, "{path}:{d}");
            }
            Err(Exit(EXIT_FAILURE))
        }
    }
}

/// Built-ins default to the literal reading; files keep their declared one.
fn load(target: &str, interpretation: Option<InterpretationArg>, io: &mut Io) -> Result<Scenario, Exit> {
    let scenario = if builtins::is_builtin(target) && !Path::new(target).exists() {
        builtins::scenario(target, Interpretation::Literal).expect("known built-in")
    } else {
        compile_file(target, io)?
    };
    Ok(match interpretation {
        Some(i) => scenario.with_interpretation(i.into()),
        None => scenario,
    })
}

fn observable<'a>(s: &'a Scenario, name: &str, io: &mut Io) -> Result<&'a LinearOperator, Exit> {
    s.observable(name).ok_or_else(|| {
        let known: Vec<&str> = s.observables.iter().map(|(n, _)| n.as_str()).collect();
        io.fail(EXIT_FAILURE, format!("unknown observable `{name}` (scenario has: {})", known.join(", ")))
    })
}

fn feasible_ensemble(s: &Scenario, io: &mut Io) -> Result<PrePostEnsemble, Exit> {
    let e = s.ensemble().map_err(|e| io.fail(EXIT_FAILURE, e))?;
    if e.is_orthogonal() {
        return Err(io.fail(EXIT_FAILURE, format!("{} ({}): post-selection impossible", s.name, s.interpretation)));
    }
    Ok(e)
}

fn emit(io: &mut Io, text: &str) -> Result<i32, Exit> {
    io.out.write_all(text.as_bytes()).map_err(|_| Exit(EXIT_FAILURE))?;
    Ok(EXIT_OK)
}

fn seed_from_env(io: &mut Io) -> Result<u64, Exit> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map_err(|_| io.fail(EXIT_USAGE, format!("{SEED_VAR} must be a non-negative integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

/// `steps` points from `from` to `to`, evenly spaced in log g, largest first.
pub fn geometric_steps(from: f64, to: f64, steps: usize) -> Option<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && from > 0.0 && to > 0.0) || steps == 0 {
        return None;
    }
    let (hi, lo) = if from >= to { (from, to) } else { (to, from) };
    if steps == 1 {
        return Some(vec![hi]);
    }
    if hi == lo {
        return None;
    }
    let ratio = (lo / hi).ln() / (steps - 1) as f64;
    Some((0..steps).map(|k| if k + 1 == steps { lo } else { hi * (ratio * k as f64).exp() }).collect())
}

fn execute(cmd: Command, io: &mut Io) -> Result<i32, Exit> {
    match cmd {
        Command::List => {
            let mut text = String::new();
            for name in BUILTIN_NAMES {
                let s = builtins::scenario(name, Interpretation::Literal).expect("known built-in");
                text.push_str(&format!("{name:<22}{}\n", s.summary));
            }
            emit(io, &text)
        }
        Command::Run { target, interpretation, format } => {
            let s = load(&target, interpretation, io)?;
            let r = evaluate_scenario(&s).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let text = match format {
                Format::Json => report::render(&report::scenario_json(&r)),
                Format::Csv => report::scenario_csv(&r),
                Format::Text => report::scenario_text(&r),
            };
            emit(io, &text)?;
            if r.feasible {
                Ok(EXIT_OK)
            } else {
                Err(io.fail(EXIT_FAILURE, format!("{} ({}): post-selection impossible", r.scenario, r.interpretation)))
            }
        }
        Command::Weak { target, observable: name, interpretation } => {
            let s = load(&target, interpretation, io)?;
            let a = observable(&s, &name, io)?;
            let e = feasible_ensemble(&s, io)?;
            let w = weak_value(&name, a, &e).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let rev = reversed_weak_value(a, &e).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let mut m = report::envelope(&s.name, s.interpretation.name());
            m.insert("observable".into(), name.into());
            m.insert("weak_value".into(), report::complex(w.value));
            m.insert("reversed".into(), report::complex(rev));
            m.insert("postselect_prob".into(), number(w.postselect_prob));
            emit(io, &report::render(&Value::Object(m)))
        }
        Command::Pointer { target, observable: name, g, sigma, n, interpretation } => {
            let s = load(&target, interpretation, io)?;
            let a = observable(&s, &name, io)?;
            let e = feasible_ensemble(&s, io)?;
            let ptr = gaussian_pointer(sigma, n, DEFAULT_SPAN_SIGMAS * sigma).map_err(|e| io.fail(EXIT_USAGE, e))?;
            let aw = weak_value(&name, a, &e).map_err(|e| io.fail(EXIT_FAILURE, e))?.value;
            let r = couple_and_postselect(a, &e, &ptr, g).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let mut m = report::envelope(&s.name, s.interpretation.name());
            m.insert("observable".into(), name.into());
            let v = report::coupling_json(m, &r, sigma, n, aw, ptr.momentum_variance());
            emit(io, &report::render(&v))
        }
        Command::Sweep { target, observable: name, g_from, g_to, steps, sigma, interpretation, format } => {
            let gs = geometric_steps(g_from, g_to, steps).ok_or_else(|| {
                io.fail(EXIT_USAGE, "--g-from and --g-to must be positive and distinct, --steps at least 1")
            })?;
            let s = load(&target, interpretation, io)?;
            let a = observable(&s, &name, io)?;
            let e = feasible_ensemble(&s, io)?;
            let rows = weak_limit_report(a, &e, sigma, &gs).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let text = match format {
                Format::Json => {
                    let mut m = report::envelope(&s.name, s.interpretation.name());
                    m.insert("observable".into(), name.into());
                    m.insert("sigma".into(), number(sigma));
                    report::render(&report::sweep_json(m, &rows))
                }
                Format::Csv | Format::Text => report::sweep_csv(&rows),
            };
            emit(io, &text)
        }
        Command::Audit { target, interpretation } => {
            let s = load(&target, interpretation, io)?;
            let audit = consistency_audit(&s);
            let mut m = report::envelope(&s.name, s.interpretation.name());
            m.insert("passed".into(), audit.passed().into());
            m.insert("findings".into(), report::audit_json(&audit));
            emit(io, &report::render(&Value::Object(m)))?;
            let infeasible = audit.finding("postselection").is_some_and(|f| f.value.is_none());
            if infeasible {
                Err(io.fail(EXIT_FAILURE, format!("{} ({}): post-selection impossible", s.name, s.interpretation)))
            } else {
                Ok(EXIT_OK)
            }
        }
        Command::Sample { target, observable: name, shots, interpretation } => {
            let seed = seed_from_env(io)?;
            let s = load(&target, interpretation, io)?;
            let a = observable(&s, &name, io)?;
            let e = s.ensemble().map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let spectrum = SpectralDecomposition::new(a).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let state = e.evolved_pre();
            let probs = spectrum.probabilities(state).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let counts = spectrum.sample_counts(state, shots, seed).map_err(|e| io.fail(EXIT_FAILURE, e))?;
            let outcomes: Vec<Value> = spectrum
                .eigenvalues()
                .iter()
                .zip(&probs)
                .zip(&counts)
                .map(|((l, p), c)| {
                    json!({
                        "eigenvalue": number(*l),
                        "probability": number(*p),
                        "count": c,
                        "frequency": number(if shots == 0 { 0.0 } else { *c as f64 / shots as f64 }),
                    })
                })
                .collect();
            let mut m = report::envelope(&s.name, s.interpretation.name());
            m.insert("observable".into(), name.into());
            m.insert("seed".into(), seed.into());
            m.insert("shots".into(), shots.into());
            m.insert("outcomes".into(), Value::Array(outcomes));
            emit(io, &report::render(&Value::Object(m)))
        }
        Command::Export { target } => {
            if builtins::is_builtin(&target) && !Path::new(&target).exists() {
                return emit(io, &builtins::canonical_source(&target).expect("known built-in"));
            }
            let text = read_source(&target, io)?;
            match sdl::parse(&text) {
                Ok(doc) => emit(io, &sdl::serialize(&doc)),
                Err(diags) => {
                    for d in &diags {
                        let _ = writeln!(io.err, "{target}:{d}");
                    }
                    Err(Exit(EXIT_FAILURE))
                }
            }
        }
        Command::Check { file } => {
            let s = compile_file(&file, io)?;
            emit(
                io,
                &format!(
                    "{}: ok ({} observables, dimension {}, {} interpretation)\n",
                    s.name,
                    s.observables.len(),
                    s.basis.dim(),
                    s.interpretation
                ),
            )
        }
    }
}

/// Runs one command. Data goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    let code = match execute(cli.command, &mut io) {
        Ok(code) => code,
        Err(Exit(code)) => code,
    };
    let _ = io.out.flush();
    code
}
