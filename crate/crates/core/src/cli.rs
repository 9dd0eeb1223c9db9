//! Command-line front end.
//!
//! [`run`] parses arguments, writes results to `out` and diagnostics to
//! `err`, and returns the process exit code: 0 for success, 1 when a
//! verification check fails, 2 for usage or domain errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cf::KParameter;
use crate::error::{Error, Result};
use crate::experiments::{
    emit_plot_data, injectivity_witness, region_curves, run_suite, write_boundary,
    write_boundary_csv, ExperimentConfig, RegionSelection, Suite, DEFAULT_K_LIST,
};
use crate::geometry::DEFAULT_CURVE_POINTS;
use crate::jager::{Evaluator, OrbitTrace};
use crate::scalar::{Number, PrecisionMode, TolerancePolicy, DEFAULT_EXTENDED_BITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "jager-lab",
    version,
    about = "k-continued fractions, approximation coefficients and the space of Jager pairs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Arithmetic backend [default: hw for expand/orbit, ext for verify/plot]
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Mantissa bits for the extended backend
    #[arg(long, global = true, default_value_t = DEFAULT_EXTENDED_BITS)]
    pub bits: u32,
    /// Absolute comparison tolerance
    #[arg(long, global = true)]
    pub eps_compare: Option<f64>,
    /// Relative window for snapping digits up to the next integer
    #[arg(long, global = true)]
    pub eps_snap: Option<f64>,
    /// Dead zone around region boundaries
    #[arg(long, global = true)]
    pub eps_boundary: Option<f64>,
    /// Output format for tables and reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Hw,
    Ext,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Digits, convergents and approximation coefficients of x0
    Expand(OrbitArgs),
    /// Dynamic pairs, Jager pairs and correspondence residuals of x0
    Orbit(OrbitArgs),
    /// Boundary polylines of a region as label,u,v CSV
    Region {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        /// p0, pa:<a>, gamma-constructive or gamma-literal
        #[arg(long)]
        which: String,
        /// Points per curved boundary piece
        #[arg(long, default_value_t = DEFAULT_CURVE_POINTS)]
        points: usize,
        /// Output file [default: stdout]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two fold-related points with one image, for k < 1
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Run verification checks and report pass/fail
    Verify(VerifyArgs),
    /// Write region_boundary.csv and jager_pairs.csv for one k
    Plot {
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
    },
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// k > 0, as a decimal or num/den
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    /// x0 in (0, 1), as a decimal or num/den
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    /// Number of steps
    #[arg(short = 'n', long = "steps", default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, correspondence, containment, regions, witness, identities or oracle
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Comma-separated k values
    #[arg(long, value_delimiter = ',')]
    pub k_list: Option<Vec<f64>>,
    /// Orbits (and region samples) per k
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    /// Draw x0 from this many first-digit strata instead of uniformly
    #[arg(long)]
    pub strata: Option<u64>,
    /// Directory for report.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GlobalArgs {
    fn mode_or(&self, default: ModeArg) -> PrecisionMode {
        match self.mode.unwrap_or(default) {
            ModeArg::Hw => PrecisionMode::Hardware,
            ModeArg::Ext => PrecisionMode::Extended { bits: self.bits },
            ModeArg::Exact => PrecisionMode::Exact,
        }
    }

    fn policy(&self, mode: PrecisionMode) -> Result<TolerancePolicy> {
        let mut p = TolerancePolicy::for_mode(mode);
        if let Some(v) = self.eps_compare {
            p.eps_compare = v;
        }
        if let Some(v) = self.eps_snap {
            p.eps_snap = v;
        }
        if let Some(v) = self.eps_boundary {
            p.eps_boundary = v;
        }
        p.validate()?;
        Ok(p)
    }
}

fn parse_inputs(args: &OrbitArgs, mode: PrecisionMode) -> Result<(Number, Number)> {
    let k: Number = args.k.parse()?;
    let x0: Number = args.x0.parse()?;
    if mode == PrecisionMode::Exact {
        for (name, v) in [("k", &k), ("x0", &x0)] {
            if !matches!(v, Number::Ratio(_)) {
                return Err(Error::NotRational(format!("{name} = {v}")));
            }
        }
    }
    if args.n == 0 {
        return Err(Error::InvalidConfig("-n must be at least 1".into()));
    }
    Ok((k, x0))
}

#[derive(Serialize)]
struct TraceDoc<'a> {
    k: String,
    x0: String,
    #[serde(flatten)]
    trace: &'a OrbitTrace,
}

/// Shortest round-trip form, in scientific notation when very small or large.
fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn write_trace(
    out: &mut dyn Write,
    format: Format,
    k: &Number,
    x0: &Number,
    trace: &OrbitTrace,
    expand: bool,
) -> Result<()> {
    match format {
        Format::Json => {
            let doc = TraceDoc {
                k: k.to_string(),
                x0: x0.to_string(),
                trace,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if expand {
                w.write_record(["n", "a_n", "p_n", "q_n", "p_n/q_n", "theta_n"])?;
                for r in &trace.rows {
                    w.write_record([
                        r.n.to_string(),
                        r.digit.to_string(),
                        num(r.p),
                        num(r.q),
                        num(r.convergent),
                        num(r.theta),
                    ])?;
                }
            } else {
                w.write_record(["n", "x_n", "y_n", "u", "v", "residual"])?;
                for r in &trace.rows {
                    w.write_record([
                        r.n.to_string(),
                        num(r.x),
                        num(r.y),
                        num(r.theta_prev),
                        num(r.theta),
                        num(r.residual),
                    ])?;
                }
            }
            w.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(())
}

fn cmd_trace(
    g: &GlobalArgs,
    args: &OrbitArgs,
    expand: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let mode = g.mode_or(ModeArg::Hw);
    let (k, x0) = parse_inputs(args, mode)?;
    let trace = Evaluator::new(mode, g.policy(mode)?).trace(&k, &x0, args.n)?;
    write_trace(out, g.format, &k, &x0, &trace, expand)?;
    if trace.terminated {
        let at = trace.rows.last().map_or(0, |r| r.n);
        let _ = writeln!(err, "expansion terminated at n = {at}");
    }
    if trace.backend != mode {
        let _ = writeln!(
            err,
            "note: evaluated in {} to certify the result",
            trace.backend
        );
    }
    Ok(EXIT_OK)
}

fn cmd_region(
    g: &GlobalArgs,
    k: f64,
    which: &str,
    points: usize,
    target: Option<&PathBuf>,
    out: &mut dyn Write,
) -> Result<i32> {
    let k = KParameter::f64(k)?;
    let which: RegionSelection = which.parse()?;
    let curves = region_curves(&k, which, points)?;
    match (target, g.format) {
        (Some(path), _) => {
            write_boundary_csv(path, &curves)?;
        }
        (None, Format::Json) => {
            writeln!(out, "{}", serde_json::to_string_pretty(&curves)?)
                .map_err(|e| Error::io("<stdout>", e))?;
        }
        (None, Format::Csv) => {
            write_boundary(out, &curves)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    g: &GlobalArgs,
    args: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let suite: Suite = args.suite.parse()?;
    let mode = g.mode_or(ModeArg::Ext);
    let cfg = ExperimentConfig {
        k_list: args
            .k_list
            .clone()
            .unwrap_or_else(|| DEFAULT_K_LIST.to_vec()),
        samples: args.samples,
        n_min: args.n_min,
        n_max: args.n_max,
        seed: args.seed,
        mode,
        policy: g.policy(mode)?,
        strata: args.strata,
        output_dir: args.out.clone(),
    };
    let report = run_suite(suite, &cfg)?;
    match g.format {
        Format::Json => {
            writeln!(out, "{}", report.to_json()?).map_err(|e| Error::io("<stdout>", e))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "check",
                "k",
                "samples",
                "failures",
                "boundary_skips",
                "worst_residual",
                "status",
            ])?;
            for c in &report.checks {
                w.write_record([
                    c.name.clone(),
                    c.k.map_or(String::new(), num),
                    c.samples.to_string(),
                    c.failures.to_string(),
                    c.boundary_skips.to_string(),
                    format!("{:e}", c.worst_residual),
                    if c.passed() { "pass" } else { "FAIL" }.to_string(),
                ])?;
            }
            w.flush().map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    if report.pass {
        Ok(EXIT_OK)
    } else {
        for c in report.failures() {
            let at = c.k.map(|k| format!(" at k = {k}")).unwrap_or_default();
            let _ = writeln!(
                err,
                "check {}{at} failed {} of {}",
                c.name, c.failures, c.samples
            );
        }
        Ok(EXIT_CHECK_FAILED)
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Expand(args) => cmd_trace(g, args, true, out, err),
        Command::Orbit(args) => cmd_trace(g, args, false, out, err),
        Command::Region {
            k,
            which,
            points,
            out: target,
        } => cmd_region(g, *k, which, *points, target.as_ref(), out),
        Command::Witness { k, seed } => {
            let w = injectivity_witness(&KParameter::f64(*k)?, *seed)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&w)?)
                .map_err(|e| Error::io("<stdout>", e))?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => cmd_verify(g, args, out, err),
        Command::Plot {
            k,
            out: dir,
            samples,
            seed,
            n_min,
            n_max,
        } => {
            let mode = g.mode_or(ModeArg::Ext);
            let cfg = ExperimentConfig {
                k_list: vec![*k],
                samples: *samples,
                n_min: *n_min,
                n_max: *n_max,
                seed: *seed,
                mode,
                policy: g.policy(mode)?,
                strata: None,
                output_dir: Some(dir.clone()),
            };
            let files = emit_plot_data(&KParameter::f64(*k)?, &cfg, dir)?;
            writeln!(
                out,
                "wrote {} ({} rows) and {} ({} rows)",
                files.boundary.display(),
                files.boundary_rows,
                files.pairs.display(),
                files.pair_rows
            )
            .map_err(|e| Error::io("<stdout>", e))?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
