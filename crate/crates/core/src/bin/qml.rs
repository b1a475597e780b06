use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qml::ambient::microlocal_check;
use qml::combinatorics::{DefectMatrix, GammaVector};
use qml::error::{Error, Result};
use qml::graded::remark_scenario;
use qml::harness::{analyze, emit, enumerate, sweep, with_jobs, Document, EnumKind, Format, OracleRange, Schedule, SweepConfig};

/// Exact checks of tangent-space and microlocal bounds at the torus-fixed
/// points of Laumon's resolution of Drinfeld's quasimaps' space.
#[derive(Parser, Debug)]
#[command(name = "qml", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format: json, csv or human
    #[arg(long, global = true, default_value = "human", value_parser = parse_format)]
    format: Format,

    /// Write the document here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Seed for witness sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List Kostant partitions, defect matrices or partitions of gamma
    Enum {
        /// kostant, defects or partitions
        #[arg(value_parser = parse_enum_kind)]
        kind: EnumKind,
        #[arg(long)]
        n: usize,
        /// comma-separated coefficients, e.g. 2,2
        #[arg(long)]
        gamma: String,
    },
    /// All checks at one fixed point
    Fixedpoint {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: String,
        /// rows separated by ';', entries by ',', e.g. 2;1,1
        #[arg(long)]
        defect: String,
    },
    /// Every fixed point with n <= n-max and 0 < |gamma| <= gamma-max
    Sweep {
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[arg(long, default_value_t = 3)]
        gamma_max: u32,
        /// oracle range as GAMMA or N,GAMMA (default 3,4)
        #[arg(long)]
        oracle_max: Option<String>,
    },
    /// The SL_3, gamma = (2,2) example and its one-parameter family
    Remark,
    /// Microlocal test at one fixed point
    Microlocal {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        defect: String,
    },
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_enum_kind(s: &str) -> std::result::Result<EnumKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_gamma(n: usize, s: &str) -> Result<GammaVector> {
    let g = GammaVector::parse(s)?;
    if g.n() != n {
        return Err(Error::Mismatch(format!("gamma ({s}) has {} entries, n={n} needs {}", g.n() - 1, n - 1)));
    }
    Ok(g)
}

fn parse_defect(n: usize, gamma: &str, defect: &str) -> Result<DefectMatrix> {
    let g = parse_gamma(n, gamma)?;
    let d = DefectMatrix::parse(defect)?;
    if d.n() != n || d.gamma() != g {
        return Err(Error::Mismatch(format!("defect {defect} has profile ({}), not ({g})", d.gamma())));
    }
    Ok(d)
}

fn parse_oracle(s: &str) -> Result<OracleRange> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<u32>().map_err(|_| Error::Parse(format!("bad oracle range {s:?}")));
    match parts.as_slice() {
        [g] => Ok(OracleRange { n_max: 3, gamma_max: num(g)? }),
        [n, g] => Ok(OracleRange { n_max: num(n)? as usize, gamma_max: num(g)? }),
        _ => Err(Error::Parse(format!("bad oracle range {s:?}"))),
    }
}

fn write_out(cli: &Cli, doc: &impl Document) -> Result<()> {
    let text = emit(doc, cli.format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Returns whether every check passed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Enum { kind, n, gamma } => {
            let g = parse_gamma(*n, gamma)?;
            write_out(cli, &enumerate(*kind, &g))?;
            Ok(true)
        }
        Command::Fixedpoint { n, gamma, defect } => {
            let d = parse_defect(*n, gamma, defect)?;
            let mut config = SweepConfig::new(*n, d.gamma().size());
            config.seed = cli.seed;
            let rec = analyze(&d, &config)?;
            write_out(cli, &rec)?;
            Ok(rec.pass)
        }
        Command::Sweep { n_max, gamma_max, oracle_max } => {
            let mut config = SweepConfig::new(*n_max, *gamma_max);
            config.seed = cli.seed;
            if let Some(o) = oracle_max {
                config.oracle = parse_oracle(o)?;
            }
            let out = with_jobs(cli.jobs, || sweep(&config, Schedule::Parallel))??;
            write_out(cli, &out.report)?;
            if let Some(path) = &cli.out {
                let side = path.with_extension("timings.json");
                let text = emit(&out.timings, Format::Json)?;
                std::fs::write(&side, text).map_err(|e| Error::Invalid(format!("{}: {e}", side.display())))?;
            }
            Ok(out.report.all_pass())
        }
        Command::Remark => {
            let r = remark_scenario(cli.seed)?;
            write_out(cli, &r)?;
            Ok(r.pass)
        }
        Command::Microlocal { n, gamma, defect } => {
            let d = parse_defect(*n, gamma, defect)?;
            let r = microlocal_check(&d, cli.seed, qml::ambient::DEFAULT_WITNESS_DRAWS)?;
            write_out(cli, &r)?;
            Ok(r.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
