use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod svg;

#[derive(Parser, Debug)]
#[command(name = "farey-subsets", version, about = "Gap statistics of Farey fractions with denominators prime to p")]
struct Cli {
    /// Worker threads for the parallel kernels (output does not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the main output to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum JsonFormat {
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TextFormat {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List F_Q, or F_{Q,p} with --p.
    Enumerate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Histogram of gap signatures of H consecutive gaps in F_{Q,p}.
    Stats {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        /// Only the m most frequent signatures.
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Limiting density of a gap signature, truncated at N_cut.
    Density {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<u64>,
        #[arg(long)]
        n_cut: Option<u64>,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
    },
    /// Residue/index families contributing to a gap signature.
    Families {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<u64>,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
    },
    /// Exact area (and optionally vertices) of T_{n1,...,nK}.
    Region {
        #[arg(long, value_delimiter = ',', required = true)]
        tuple: Vec<u64>,
        #[arg(long)]
        vertices: bool,
    },
    /// Empirical densities at order Q next to the limits, for all Δ with entries ≤ K.
    Compare {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long, default_value_t = 4)]
        delta_max: u64,
        #[arg(long)]
        n_cut: Option<u64>,
        /// Also write a bar chart here.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Coprime lattice counts in a region: brute force, Möbius sum and main term.
    Lemma1 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        /// `triangle`, `square`, or `tuple n1,...`.
        #[arg(long, num_args = 1..=2, default_value = "triangle")]
        region: Vec<String>,
        #[arg(long, value_enum, default_value_t = TextFormat::Text)]
        format: TextFormat,
    },
    /// Both sides of the finite lattice-count identity at order Q.
    Identity3 {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        h: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<u64>,
        #[arg(long, value_enum, default_value_t = JsonFormat::Json)]
        format: JsonFormat,
    },
}

#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<farey_subsets::Error> for CliError {
    fn from(e: farey_subsets::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let mut out = open_output(&cli.output)?;
    match cli.command {
        Command::Enumerate { q, p, format } => commands::enumerate(&mut out, q, p, format)?,
        Command::Stats { q, p, h, top, format } => commands::stats(&mut out, q, p, h, top, format)?,
        Command::Density { p, h, delta, n_cut, format: _ } => commands::density(&mut out, p, h, delta, n_cut)?,
        Command::Families { p, h, delta, format: _ } => commands::families(&mut out, p, h, delta)?,
        Command::Region { tuple, vertices } => commands::region(&mut out, &tuple, vertices)?,
        Command::Compare { q, p, h, delta_max, n_cut, svg, format } => {
            commands::compare(&mut out, q, p, h, delta_max, n_cut, svg.as_deref(), format)?
        }
        Command::Lemma1 { q, p, region, format } => commands::lemma1(&mut out, q, p, &region, format)?,
        Command::Identity3 { q, p, h, delta, format: _ } => commands::identity3(&mut out, q, p, h, delta)?,
    }
    out.flush()?;
    Ok(())
}

#[cfg(feature = "parallel")]
fn run(cli: Cli) -> CliResult<()> {
    match cli.threads {
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

#[cfg(not(feature = "parallel"))]
fn run(cli: Cli) -> CliResult<()> {
    if cli.threads == Some(0) {
        return Err(CliError::Invalid("--threads must be at least 1".into()));
    }
    dispatch(cli)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("farey-subsets: {e}");
            ExitCode::from(e.code())
        }
    }
}
