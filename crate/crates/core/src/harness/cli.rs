//! The `fkgs` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use super::output::{
    self, BENCH_FILE, DIAGNOSTICS_FILE, ERRORS_SPACE_FILE, ERRORS_TIME_FILE, FIELDS_FILE,
    METADATA_FILE,
};
use super::{
    bench, max_drifts, run_with_diagnostics, spatial_error_table, temporal_error_table, ErrorTable,
    ExampleKind, Refinement, RunConfig, U0Variant,
};
use crate::error::{Error, Result};
use crate::integrators::SchemeKind;

#[derive(Parser, Debug)]
#[command(
    name = "fkgs",
    args_override_self = true,
    version,
    about = "Conservative spectral solver for the fractional Klein-Gordon-Schrödinger system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation; writes diagnostics.csv, fields.csv and metadata.toml.
    Run(RunArgs),
    /// Temporal refinement study; writes errors_time.csv.
    ConvergeTime {
        #[command(flatten)]
        common: RunArgs,
        /// Comma-separated time steps, each half the previous one.
        #[arg(long, value_delimiter = ',', default_values_t = [0.025, 0.0125, 0.00625, 0.003125])]
        taus: Vec<f64>,
    },
    /// Spatial refinement study; writes errors_space.csv.
    ConvergeSpace {
        #[command(flatten)]
        common: RunArgs,
        /// Comma-separated point counts, each twice the previous one.
        #[arg(long, value_delimiter = ',', default_values_t = [8, 16, 32, 64])]
        ns: Vec<usize>,
    },
    /// Mass and energy drift series; writes diagnostics.csv.
    Invariants(RunArgs),
    /// Wall time and solver iterations per scheme; writes bench.csv.
    Bench {
        #[command(flatten)]
        common: RunArgs,
        /// Comma-separated schemes to time.
        #[arg(long, value_delimiter = ',', default_values_t = SchemeKind::MAIN.map(|s| s.name().to_string()))]
        schemes: Vec<String>,
    },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Flat TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ex41, ex42, ex43 or custom.
    #[arg(long)]
    example: Option<String>,
    /// favf, fpavf, fpavf-adj, fpavf-c or fpavf-p.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Points per axis: one count, or one per axis separated by commas.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Box as lo,hi[,lo,hi].
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
    bounds: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    sample_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Soliton velocity (ex41).
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    /// Soliton phase (ex41).
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    /// exact or printed (ex41).
    #[arg(long)]
    u0_variant: Option<String>,
    /// fields.csv snapshot to start from (custom).
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(untagged)]
enum Counts {
    #[default]
    None,
    One(usize),
    Many(Vec<usize>),
}

#[derive(Deserialize, Debug, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ConfigFile {
    example: Option<String>,
    scheme: Option<String>,
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(default)]
    n: Counts,
    #[serde(rename = "box")]
    bounds: Option<Vec<f64>>,
    tau: Option<f64>,
    t_final: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    sample_every: Option<usize>,
    out: Option<PathBuf>,
    r: Option<f64>,
    x0: Option<f64>,
    u0_variant: Option<String>,
    init: Option<PathBuf>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// The file's settings as flag values, with `flags` taking precedence.
    fn merged_with(self, flags: &RunArgs) -> RunArgs {
        let n = match self.n {
            Counts::None => None,
            Counts::One(k) => Some(vec![k]),
            Counts::Many(v) => Some(v),
        };
        RunArgs {
            config: None,
            example: flags.example.clone().or(self.example),
            scheme: flags.scheme.clone().or(self.scheme),
            alpha: flags.alpha.or(self.alpha),
            beta: flags.beta.or(self.beta),
            n: flags.n.clone().or(n),
            bounds: flags.bounds.clone().or(self.bounds),
            tau: flags.tau.or(self.tau),
            t_final: flags.t_final.or(self.t_final),
            tol: flags.tol.or(self.tol),
            max_iter: flags.max_iter.or(self.max_iter),
            sample_every: flags.sample_every.or(self.sample_every),
            out: flags.out.clone().or(self.out),
            r: flags.r.or(self.r),
            x0: flags.x0.or(self.x0),
            u0_variant: flags.u0_variant.clone().or(self.u0_variant),
            init: flags.init.clone().or(self.init),
        }
    }
}

fn parse_bounds(v: &[f64]) -> Result<Vec<[f64; 2]>> {
    if v.is_empty() || !v.len().is_multiple_of(2) || v.len() > 4 {
        return Err(Error::Config(format!(
            "box needs lo,hi or lo,hi,lo,hi, got {} values",
            v.len()
        )));
    }
    Ok(v.chunks(2).map(|c| [c[0], c[1]]).collect())
}

/// Example preset, then config file, then flags.
fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let a = match &args.config {
        Some(path) => ConfigFile::load(path)?.merged_with(args),
        None => ConfigFile::default().merged_with(args),
    };
    let example: ExampleKind = a.example.as_deref().unwrap_or("ex41").parse()?;
    let mut cfg = RunConfig::preset(example);
    if let Some(s) = &a.scheme {
        cfg.scheme = s.parse()?;
    }
    if let Some(b) = &a.bounds {
        cfg.bounds = parse_bounds(b)?;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(v) = &a.u0_variant {
        cfg.u0_variant = v.parse::<U0Variant>()?;
    }
    macro_rules! take {
        ($($f:ident),*) => { $(if let Some(x) = a.$f { cfg.$f = x; })* };
    }
    take!(
        alpha,
        beta,
        tau,
        t_final,
        tol,
        max_iter,
        sample_every,
        r,
        x0
    );
    if let Some(out) = a.out {
        cfg.output_dir = out;
    }
    if a.init.is_some() {
        cfg.init = a.init;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn prepare_output(cfg: &RunConfig, command: &str) -> Result<()> {
    fs::create_dir_all(&cfg.output_dir)?;
    output::write_metadata(&cfg.output_dir.join(METADATA_FILE), command, cfg)
}

fn print_header(cfg: &RunConfig) {
    let n: Vec<String> = cfg.n.iter().map(|n| n.to_string()).collect();
    println!(
        "example {}  scheme {}  alpha {}  beta {}  n {}  tau {}  T {}",
        cfg.example,
        cfg.scheme,
        cfg.alpha,
        cfg.beta,
        n.join("x"),
        cfg.tau,
        cfg.t_final
    );
}

fn print_table(table: &ErrorTable) {
    let label = match table.refinement {
        Refinement::Time => "tau",
        Refinement::Space => "n",
    };
    println!("{label:>12} {:>12} {:>8}", "error", "order");
    for r in &table.rows {
        let order = r
            .order
            .map(|o| format!("{o:8.3}"))
            .unwrap_or_else(|| format!("{:>8}", "-"));
        println!("{:>12.6e} {:>12.4e} {order}", r.param, r.error);
    }
}

fn diagnostics(cfg: &RunConfig, command: &str, with_fields: bool) -> Result<()> {
    prepare_output(cfg, command)?;
    let (rows, outcome) = run_with_diagnostics(cfg)?;
    output::write_diagnostics(&cfg.output_dir.join(DIAGNOSTICS_FILE), &rows)?;
    if with_fields {
        output::write_fields(&cfg.output_dir.join(FIELDS_FILE), &outcome.state)?;
    }
    let (rm, rh) = max_drifts(&rows);
    print_header(cfg);
    println!(
        "{:>8} {:>12} {:>10} {:>12} {:>12} {:>10}",
        "steps", "t", "iters", "max rm", "max rh", "seconds"
    );
    println!(
        "{:>8} {:>12.6} {:>10} {:>12.3e} {:>12.3e} {:>10.3}",
        outcome.steps, outcome.state.t, outcome.iterations, rm, rh, outcome.seconds
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => diagnostics(&resolve(&args)?, "run", true),
        Command::Invariants(args) => diagnostics(&resolve(&args)?, "invariants", false),
        Command::ConvergeTime { common, taus } => {
            let cfg = resolve(&common)?;
            prepare_output(&cfg, "converge-time")?;
            let table = temporal_error_table(&cfg, &taus)?;
            output::write_error_table(&cfg.output_dir.join(ERRORS_TIME_FILE), &table)?;
            print_header(&cfg);
            print_table(&table);
            Ok(())
        }
        Command::ConvergeSpace { common, ns } => {
            let cfg = resolve(&common)?;
            prepare_output(&cfg, "converge-space")?;
            let table = spatial_error_table(&cfg, &ns)?;
            output::write_error_table(&cfg.output_dir.join(ERRORS_SPACE_FILE), &table)?;
            print_header(&cfg);
            print_table(&table);
            Ok(())
        }
        Command::Bench { common, schemes } => {
            let cfg = resolve(&common)?;
            let schemes = schemes
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<SchemeKind>>>()?;
            prepare_output(&cfg, "bench")?;
            let rows = bench(&cfg, &schemes)?;
            output::write_bench(&cfg.output_dir.join(BENCH_FILE), &rows)?;
            print_header(&cfg);
            println!(
                "{:>10} {:>8} {:>10} {:>10}",
                "scheme", "steps", "iters", "seconds"
            );
            for r in &rows {
                println!(
                    "{:>10} {:>8} {:>10} {:>10.3}",
                    r.scheme.name(),
                    r.steps,
                    r.iterations,
                    r.seconds
                );
            }
            Ok(())
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            1
        }
    }
}
