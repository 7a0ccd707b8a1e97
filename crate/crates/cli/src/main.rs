use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(name = "smoothable", version, about = "Smoothable cycles of log symplectic Poisson structures")]
struct Cli {
    /// Output format; not every command supports every format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
    Tikz,
    Svg,
    Csv,
}

/// A biresidue matrix from a family tag or a matrix file (text or JSON).
#[derive(Args, Clone, Debug)]
pub struct MatrixSource {
    /// Family tag: C:n,k  C:n,k,I=0110  X4  X5  Y:n  Z:n
    #[arg(long, conflicts_with = "file")]
    tag: Option<String>,
    /// Matrix file; `-` reads stdin.
    #[arg(long, alias = "matrix")]
    file: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a family member, or list the deduplicated catalog for one n.
    Catalog {
        /// Family tag to print.
        tag: Option<String>,
        /// List every catalog member of this size instead.
        #[arg(short, long, conflicts_with = "tag")]
        n: Option<usize>,
    },
    /// Smoothing diagram: smoothable edges and angle weights.
    Diagram {
        #[command(flatten)]
        src: MatrixSource,
    },
    /// Smoothable chains and cycles, and the catalog family when the cycle is full.
    Classify {
        #[command(flatten)]
        src: MatrixSource,
    },
    /// Rank and minimal polydisc dimension.
    Rank {
        #[command(flatten)]
        src: MatrixSource,
    },
    /// Check every odd principal submatrix for the all-ones vector in its row span.
    Holonomic {
        #[command(flatten)]
        src: MatrixSource,
    },
    /// Feigin-Odesskii brackets.
    Fo {
        #[command(subcommand)]
        cmd: FoCmd,
    },
    /// Semi-toric realizations, rho bivectors and the example deformations.
    Deform {
        #[command(subcommand)]
        cmd: DeformCmd,
    },
}

#[derive(Args, Clone, Copy, Debug)]
pub struct NK {
    #[arg(short)]
    n: usize,
    #[arg(short)]
    k: usize,
}

#[derive(Subcommand)]
enum FoCmd {
    /// Toric limit q0 / (2 pi i) and the first-order terms q1.
    Limit {
        #[command(flatten)]
        nk: NK,
    },
    /// Exact checks: B Pi = I - U/n, the identified family, and q1 against rho bivectors.
    Verify {
        #[command(flatten)]
        nk: NK,
    },
    /// The codimension-two split (n1, n2, k1, k2).
    Codim2 {
        #[command(flatten)]
        nk: NK,
    },
    /// Numeric theta-function sweep over Im(tau); CSV output.
    Sweep {
        #[command(flatten)]
        nk: NK,
        /// `a:b` for a, a+1, ..., b, or `a:b:step`.
        #[arg(long, default_value = "4:7")]
        imtau: String,
    },
}

#[derive(Subcommand)]
enum DeformCmd {
    /// The rho bivector of one smoothable edge in a minimal (or given) realization.
    Rho {
        #[command(flatten)]
        src: MatrixSource,
        /// Use a worked example's realization instead of a matrix.
        #[arg(long, conflicts_with_all = ["tag", "file"])]
        preset: Option<String>,
        #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
        edge: Vec<usize>,
        /// Polydisc dimension; default is the minimal one.
        #[arg(short)]
        m: Option<usize>,
    },
    /// Verify the master equation of x4, c41 or x5 and print table, Pfaffian and u fields.
    Check { name: String },
    /// RK4 integration of an example's derivation table.
    Integrate {
        name: String,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        xmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Write the samples here instead of stdout.
        #[arg(long)]
        csv: Option<String>,
    },
}

fn threads_from_env() -> Result<(), String> {
    let Ok(v) = std::env::var("SMOOTHABLE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("SMOOTHABLE_THREADS must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err("SMOOTHABLE_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(msg) = threads_from_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    let format = if cli.json { Some(Format::Json) } else { cli.format };
    match commands::run(cli.cmd, format) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_defect() { 3 } else { 2 })
        }
    }
}
