//! Argument parsing and command execution for the `compstruct` binary.
//!
//! [`parse`] turns an argument vector into a validated [`Command`];
//! [`execute`] runs it against a writer and reports whether every check
//! passed. Errors are split into usage errors (bad flags or parameters) and
//! internal errors, which the binary maps to distinct exit codes.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use compstruct::combinatorics::enumerate_compositions_capped;
use compstruct::formulas::pmf_table_capped;
use compstruct::rational::parse_rational;
use compstruct::samplers::{
    paintbox_realization, write_samples, PaintboxKind, Sampler, SamplerKind, SeededRng,
    StreamFormat, DEFAULT_STICK_STOP,
};
use compstruct::verifier::{
    check_closed_vs_product, check_consistency, check_normalization, check_symmetry,
    ep_family_scan, exact_suite, monte_carlo_suite, suite_passes, CheckReport, Witness,
};
use compstruct::{ClosedForm, Error, Model, Rational, DEFAULT_MAX_N};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment variable that overrides the enumeration cap.
pub const MAX_N_VAR: &str = "COMPSTRUCT_MAX_N";

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation; the message names the offending flag or value.
    Usage(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) | Self::Internal(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Size { .. }
            | Error::Parameter(_)
            | Error::Domain(_)
            | Error::Unsupported(_)
            | Error::Parse(_) => Self::Usage(e.to_string()),
            _ => Self::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Internal(format!("write failed: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "compstruct",
    version,
    about = "Exact tables, samplers and checks for regenerative composition structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Print the probability table of all compositions of n.
    Pmf {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        /// Print probabilities as exact "p/q" strings.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Draw random compositions of n.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = SamplerName::Sequential)]
        sampler: SamplerName,
        /// Jump truncation of the subordinator sampler.
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a verification suite and print its reports.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Exact)]
        suite: Suite,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Draws per Monte Carlo check.
        #[arg(long, default_value_t = 100_000)]
        draws: u64,
        /// Restrict the exact checks to one model.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_parser = rational_arg)]
        alpha: Option<Rational>,
        #[arg(long, value_parser = rational_arg)]
        theta: Option<Rational>,
    },
    /// Print one paintbox realization resolved against n uniform points.
    Paintbox {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List all compositions of n in canonical order.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// e (ordered Ewens), p (Pitman), g (harmonic), beta, g2.
    #[arg(long)]
    model: String,
    #[arg(long, value_parser = rational_arg)]
    alpha: Option<Rational>,
    #[arg(long, value_parser = rational_arg)]
    theta: Option<Rational>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerName {
    /// Regenerative recursion on the decrement matrix.
    Sequential,
    /// The model's own paintbox: stick-breaking or subordinator.
    Paintbox,
    /// Shuffled two-parameter seating, fitted to Pitman's structure.
    Crp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Mc,
    All,
}

/// A validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Pmf {
        model: Model,
        n: usize,
        exact: bool,
        format: Format,
        cap: usize,
    },
    Sample {
        model: Model,
        n: usize,
        count: u64,
        seed: u64,
        sampler: SamplerName,
        epsilon: f64,
        format: Format,
    },
    Verify {
        suite: Suite,
        n_max: usize,
        seed: Option<u64>,
        draws: u64,
        model: Option<Model>,
    },
    Paintbox {
        model: Model,
        n: usize,
        seed: u64,
        epsilon: f64,
        format: Format,
    },
    Enumerate {
        n: usize,
        format: Format,
        cap: usize,
    },
}

fn enumeration_cap() -> Result<usize, CliError> {
    match std::env::var(MAX_N_VAR) {
        Err(_) => Ok(DEFAULT_MAX_N),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(cap),
            _ => Err(CliError::Usage(format!(
                "{MAX_N_VAR} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn model_of(args: ModelArgs) -> Result<Model, CliError> {
    Model::from_parts(&args.model, args.alpha, args.theta)
        .map_err(|e| CliError::Usage(format!("--model: {e}")))
}

fn seed_of(seed: Option<u64>, sub: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage(format!("{sub} requires --seed")))
}

fn positive_n(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(n)
}

fn check_epsilon(eps: f64) -> Result<f64, CliError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must lie in (0,1), got {eps}"
        )));
    }
    Ok(eps)
}

/// Parses `argv` (including the program name) into a validated command.
///
/// Help and version requests come back as [`CliError::Usage`] carrying the
/// rendered text; use [`is_informational`] to tell them apart.
pub fn parse<I, T>(argv: I) -> Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.render().to_string()))?;
    Ok(match cli.command {
        Sub::Pmf {
            model,
            n,
            exact,
            format,
        } => Command::Pmf {
            model: model_of(model)?,
            n: positive_n(n)?,
            exact,
            format,
            cap: enumeration_cap()?,
        },
        Sub::Sample {
            model,
            n,
            count,
            seed,
            sampler,
            epsilon,
            format,
        } => {
            let seed = seed_of(seed, "sample")?;
            Command::Sample {
                model: model_of(model)?,
                n: positive_n(n)?,
                count,
                seed,
                sampler,
                epsilon: check_epsilon(epsilon)?,
                format,
            }
        }
        Sub::Verify {
            suite,
            n_max,
            seed,
            draws,
            model,
            alpha,
            theta,
        } => {
            if suite != Suite::Exact && seed.is_none() {
                return Err(CliError::Usage(
                    "verify --suite mc|all requires --seed".into(),
                ));
            }
            if n_max < 2 {
                return Err(CliError::Usage("--n-max must be at least 2".into()));
            }
            let model = match model {
                Some(name) => Some(model_of(ModelArgs {
                    model: name,
                    alpha,
                    theta,
                })?),
                None if alpha.is_some() || theta.is_some() => {
                    return Err(CliError::Usage("--alpha/--theta need --model".into()))
                }
                None => None,
            };
            if model.is_some() && suite != Suite::Exact {
                return Err(CliError::Usage(
                    "--model restricts the exact suite only; use --suite exact".into(),
                ));
            }
            Command::Verify {
                suite,
                n_max,
                seed,
                draws,
                model,
            }
        }
        Sub::Paintbox {
            model,
            n,
            seed,
            epsilon,
            format,
        } => {
            let seed = seed_of(seed, "paintbox")?;
            Command::Paintbox {
                model: model_of(model)?,
                n: positive_n(n)?,
                seed,
                epsilon: check_epsilon(epsilon)?,
                format,
            }
        }
        Sub::Enumerate { n, format } => Command::Enumerate {
            n: positive_n(n)?,
            format,
            cap: enumeration_cap()?,
        },
    })
}

/// True when a parse error is a help or version request.
pub fn is_informational<I, T>(argv: I) -> bool
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::error::ErrorKind;
    matches!(
        Cli::try_parse_from(argv).map_err(|e| e.kind()),
        Err(ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
    )
}

/// Result of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Some check did not have its expected outcome.
    CheckFailed,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => EXIT_PASS,
            Self::CheckFailed => EXIT_CHECK_FAILED,
        }
    }
}

fn sampler_kind(model: &Model, name: SamplerName, epsilon: f64) -> Result<SamplerKind, CliError> {
    Ok(match name {
        SamplerName::Sequential => SamplerKind::Sequential,
        SamplerName::Paintbox => SamplerKind::natural_paintbox(model, epsilon)?,
        SamplerName::Crp => {
            if !matches!(model, Model::Psf { .. }) {
                return Err(CliError::Usage(format!(
                    "--sampler crp is fitted to Pitman's structure, not {model}"
                )));
            }
            let scan = ep_family_scan(model, 3, 4, 0.0)?;
            let Some(Witness::Fit { alpha, theta, .. }) = scan.witness else {
                return Err(CliError::Internal("family scan returned no fit".into()));
            };
            SamplerKind::CrpShuffle { alpha, theta }
        }
    })
}

fn paintbox_kind(model: &Model, epsilon: f64) -> Result<PaintboxKind, CliError> {
    Ok(match SamplerKind::natural_paintbox(model, epsilon)? {
        SamplerKind::Stick { alpha, theta } => PaintboxKind::Stick {
            alpha,
            theta,
            stop: DEFAULT_STICK_STOP,
        },
        SamplerKind::Subordinator(cfg) => PaintboxKind::Subordinator(cfg),
        other => return Err(CliError::Internal(format!("no paintbox for {other:?}"))),
    })
}

fn model_checks(model: &Model, n_max: usize) -> Result<Vec<CheckReport>, CliError> {
    let mut out = vec![
        check_normalization(model, n_max),
        check_consistency(model, n_max),
    ];
    if model.has_closed_form() {
        out.push(check_closed_vs_product(
            model,
            n_max,
            ClosedForm::Corrected,
        )?);
    }
    if matches!(model, Model::Psf { .. } | Model::GnedinG { .. }) {
        out.push(check_symmetry(model, n_max));
    }
    Ok(out)
}

/// Runs `cmd`, writing its output to `out`.
pub fn execute<W: Write>(cmd: &Command, out: &mut W) -> Result<Outcome, CliError> {
    match cmd {
        Command::Pmf {
            model,
            n,
            exact,
            format,
            cap,
        } => {
            let table = pmf_table_capped(model, *n, *cap)?;
            match format {
                Format::Json => writeln!(out, "{}", table.to_json(*exact))?,
                Format::Csv => write!(out, "{}", table.to_csv(*exact)?)?,
            }
        }
        Command::Sample {
            model,
            n,
            count,
            seed,
            sampler,
            epsilon,
            format,
        } => {
            let kind = sampler_kind(model, *sampler, *epsilon)?;
            let sampler = Sampler::new(model, &kind, *n)?;
            let mut rng = SeededRng::new(*seed);
            let samples = (0..*count)
                .map(|_| sampler.sample(*n, &mut rng))
                .collect::<compstruct::Result<Vec<_>>>()?;
            let format = match format {
                Format::Json => StreamFormat::Json,
                Format::Csv => StreamFormat::Csv,
            };
            write_samples(out, &samples, format)?;
        }
        Command::Verify {
            suite,
            n_max,
            seed,
            draws,
            model,
        } => {
            let mut reports = match model {
                Some(m) => model_checks(m, *n_max)?,
                None if *suite == Suite::Mc => Vec::new(),
                None => exact_suite(*n_max),
            };
            if *suite != Suite::Exact {
                let seed = seed.ok_or_else(|| CliError::Usage("verify requires --seed".into()))?;
                reports.extend(monte_carlo_suite(seed, *draws));
            }
            let text = serde_json::to_string_pretty(&reports)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            writeln!(out, "{text}")?;
            if !suite_passes(&reports) {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Paintbox {
            model,
            n,
            seed,
            epsilon,
            format,
        } => {
            let kind = paintbox_kind(model, *epsilon)?;
            let mut rng = SeededRng::new(*seed);
            let r = paintbox_realization(&kind, *n, &mut rng)?;
            match format {
                Format::Json => {
                    let doc = json!({
                        "model": model.to_string(),
                        "seed": seed,
                        "intervals": r.paintbox.intervals(),
                        "residual": r.paintbox.residual(),
                        "points": r.points,
                        "parts": r.composition.parts(),
                    });
                    writeln!(out, "{doc}")?;
                }
                Format::Csv => {
                    writeln!(out, "left,right")?;
                    for (a, b) in r.paintbox.intervals() {
                        writeln!(out, "{a},{b}")?;
                    }
                }
            }
        }
        Command::Enumerate { n, format, cap } => {
            let all = enumerate_compositions_capped(*n, *cap)?;
            let format = match format {
                Format::Json => StreamFormat::Json,
                Format::Csv => StreamFormat::Csv,
            };
            write_samples(out, &all, format)?;
        }
    }
    Ok(Outcome::Pass)
}

/// Parses and executes, returning the process exit code. Diagnostics go
/// to `err`.
pub fn run<I, T, W, E>(argv: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
    W: Write,
    E: Write,
{
    let argv: Vec<T> = argv.into_iter().collect();
    let result = parse(argv.clone()).and_then(|cmd| execute(&cmd, out));
    match result {
        Ok(outcome) => outcome.exit_code(),
        Err(CliError::Usage(text)) if is_informational(argv) => {
            let _ = write!(out, "{text}");
            EXIT_PASS
        }
        Err(e) => {
            let text = e.to_string();
            let _ = if text.ends_with('\n') {
                write!(err, "{text}")
            } else {
                writeln!(err, "compstruct: {text}")
            };
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use compstruct::rational::{int, ratio};

    fn args(s: &str) -> Vec<String> {
        std::iter::once("compstruct")
            .chain(s.split_whitespace())
            .map(String::from)
            .collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse(args("pmf --model g --theta 1 --n 3 --exact --format json")).unwrap(),
            Command::Pmf {
                model: Model::gnedin_g(int(1)).unwrap(),
                n: 3,
                exact: true,
                format: Format::Json,
                cap: enumeration_cap().unwrap(),
            }
        );
        let Command::Sample {
            model,
            n,
            count,
            seed,
            ..
        } = parse(args(
            "sample --model p --alpha 0.5 --n 6 --count 100000 --seed 42",
        ))
        .unwrap()
        else {
            panic!("sample expected")
        };
        assert_eq!(model, Model::psf(ratio(1, 2)).unwrap());
        assert_eq!((n, count, seed), (6, 100_000, 42));
    }

    #[test]
    fn usage_errors() {
        let usage = |s: &str| match parse(args(s)) {
            Err(CliError::Usage(m)) => m,
            other => panic!("{s}: {other:?}"),
        };
        assert!(usage("sample --model e --theta 1 --n 5").contains("--seed"));
        assert!(usage("paintbox --model e --theta 1").contains("--seed"));
        assert!(usage("verify --suite mc").contains("--seed"));
        assert!(usage("pmf --model e --theta 1 --n 3 --bogus").contains("--bogus"));
        assert!(usage("pmf --model p --alpha 3/2 --n 3").contains("--model"));
        assert!(usage("pmf --model e --n 3").contains("--theta"));
        assert!(usage("pmf --model e --theta x --n 3").contains("--theta"));
        assert!(usage("pmf --model e --theta 1 --n 0").contains("--n"));
        assert!(
            usage("sample --model g --theta 1 --n 3 --seed 1 --epsilon 2").contains("--epsilon")
        );
    }

    fn output(s: &str) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args(s), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn exit_codes() {
        assert_eq!(output("enumerate --n 1").0, EXIT_PASS);
        assert_eq!(output("sample --model e --theta 1 --n 5").0, EXIT_USAGE);
        assert_eq!(output("enumerate --n 40").0, EXIT_USAGE);
        assert_eq!(
            output("sample --model p --alpha 1/2 --n 3 --seed 1 --sampler paintbox").0,
            EXIT_USAGE
        );
        assert_eq!(output("--help").0, EXIT_PASS);
    }

    #[test]
    fn outputs() {
        assert_eq!(output("enumerate --n 1").1, "[{\"parts\":[1]}]\n");
        assert_eq!(output("enumerate --n 2 --format csv").1, "parts\n1-1\n2\n");
        assert_eq!(
            output("pmf --model g --theta 1 --n 3 --exact --format json").1,
            "[{\"parts\":[1,1,1],\"prob\":\"4/11\"},{\"parts\":[1,2],\"prob\":\"2/11\"},\
             {\"parts\":[2,1],\"prob\":\"3/11\"},{\"parts\":[3],\"prob\":\"2/11\"}]\n"
        );
    }

    #[test]
    fn single_model_checks_pass() {
        let cmd = parse(args("verify --model g --theta 1 --n-max 4")).unwrap();
        let mut sink = Vec::new();
        assert_eq!(execute(&cmd, &mut sink).unwrap(), Outcome::Pass);
    }
}
