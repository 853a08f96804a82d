//! `transtat` command-line entrypoint.

mod summary;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use transtat::modelfile::{write_presets, ModelFile};
use transtat::replay::replay_report;
use transtat::report::{run, Command as ReportCommand, Report, RunOptions, SeriesMode};
use transtat::Error;

const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "transtat", version)]
#[command(about = "exact checks for quadratic statistics algebras")]
struct Cli {
    /// Cap on any ambient dimension. Overrides the model file's guard and
    /// the TRANSTAT_GUARD_DIM environment variable.
    #[arg(long, global = true)]
    guard_dim: Option<usize>,

    /// Re-evaluate every witness stored in a JSON report and exit.
    #[arg(long, value_name = "REPORT")]
    replay: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Common {
    /// Model file (JSON).
    file: PathBuf,

    /// Write the JSON report here (atomically); `-` prints it to stdout
    /// instead of the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Single,
    Full,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse the model, assemble P_gen, check projector and rank bookkeeping
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Braid identities and the PBW cubic criterion
    Yb {
        #[command(flatten)]
        common: Common,
    },
    /// Hilbert series, termination and the factorization check
    Hilbert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
    },
    /// Classify the single-mode series with a root certificate
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Koszul dual series and the G(t)·G!(−t) identity
    Koszul {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Fock realization and its operator identities
    Fock {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Every section above in one report
    ReportAll {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Write the preset model files
    Preset {
        /// Output directory.
        #[arg(long, default_value = "models")]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, Error> {
    if let Some(path) = &cli.replay {
        return replay(path, cli.guard_dim);
    }
    let Some(command) = cli.command else {
        return Err(Error::Parse {
            path: "<args>".into(),
            message: "a subcommand or --replay is required (see --help)".into(),
        });
    };
    let (which, common, degree, mode) = match command {
        Command::Preset { dir } => {
            for p in write_presets(&dir)? {
                println!("{}", p.display());
            }
            return Ok(0);
        }
        Command::Validate { common } => (ReportCommand::Validate, common, None, Mode::Both),
        Command::Yb { common } => (ReportCommand::Yb, common, None, Mode::Both),
        Command::Hilbert { common, degree, mode } => (ReportCommand::Hilbert, common, degree, mode),
        Command::Classify { common, degree } => (ReportCommand::Classify, common, degree, Mode::Both),
        Command::Koszul { common, degree } => (ReportCommand::Koszul, common, degree, Mode::Both),
        Command::Fock { common, degree } => (ReportCommand::Fock, common, degree, Mode::Both),
        Command::ReportAll { common, degree } => (ReportCommand::ReportAll, common, degree, Mode::Both),
    };
    let file = ModelFile::load(&common.file)?;
    let opts = RunOptions {
        degree,
        mode: match mode {
            Mode::Single => SeriesMode::Single,
            Mode::Full => SeriesMode::Full,
            Mode::Both => SeriesMode::Both,
        },
        guard_dim: cli.guard_dim,
    };
    let report = run(&file, which, &opts)?;
    let json = report.to_json_pretty();
    match common.out.as_deref() {
        Some(p) if p == Path::new("-") => print!("{json}"),
        Some(p) => {
            write_atomic(p, &json)?;
            print!("{}", summary::render(&json));
        }
        None => print!("{}", summary::render(&json)),
    }
    Ok(report.exit_code() as u8)
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let fail = |e: std::io::Error| Error::Parse {
        path: path.display().to_string(),
        message: format!("cannot write report: {e}"),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn replay(path: &Path, guard_dim: Option<usize>) -> Result<u8, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: format!("cannot read report: {e}"),
    })?;
    let report: Report = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: format!("not a report: {e}"),
    })?;
    let outcome = replay_report(&report, guard_dim)?;
    if outcome.entries.is_empty() {
        println!("no witnesses to replay");
    }
    for e in &outcome.entries {
        let tag = if e.reproduced { "REPRODUCED" } else { "DIFFERS" };
        println!("{tag:<10}  {}.{}  {}", e.section, e.check, e.detail);
    }
    Ok(if outcome.all_reproduced() { 0 } else { 1 })
}
