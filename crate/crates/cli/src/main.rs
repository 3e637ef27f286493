//! `spx`: validate simplicial posets, run the Gorenstein* test, choose
//! parameter systems, evaluate the index map and certify facet parity.

mod failure;
mod verbs;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::{Exit, Failure};

#[derive(Parser, Debug)]
#[command(name = "spx", version, about = "Exact checks on simplicial posets and their face rings")]
struct Cli {
    /// Seed for the parameter-system search.
    #[arg(long, global = true, env = "SPX_SEED", default_value_t = 0)]
    seed: u64,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for per-facet work; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Check the poset axioms and boolean lower intervals.
    Validate { input: Option<PathBuf> },
    /// Print the f-vector.
    Fvector { input: Option<PathBuf> },
    /// Print the f- and h-vectors.
    Hvector { input: Option<PathBuf> },
    /// Gorenstein* test with ridge and orientation checks.
    Gorenstein {
        input: Option<PathBuf>,
        /// Write the order complex and its boundary matrices to this file.
        #[arg(long)]
        export_complex: Option<PathBuf>,
    },
    /// Orient the facets of a pseudomanifold.
    Orient { input: Option<PathBuf> },
    /// Choose a linear system of parameters from the seed.
    Lsop {
        input: Option<PathBuf>,
        /// Also compare quotient dimensions against the h-vector.
        #[arg(long)]
        check_dims: bool,
    },
    /// Evaluate the index map on a face-ring element.
    Index {
        input: Option<PathBuf>,
        /// Element expression, e.g. `x1*x2 + 2*e7^2` or `t1*x3`.
        #[arg(long)]
        element: String,
    },
    /// Full pipeline ending in the facet-parity verdict.
    Parity { input: Option<PathBuf> },
    /// Emit a generated poset as JSON.
    Gen {
        /// Kind (`boundary-simplex`, `doubled-sphere`, `cross-polytope`, `rp2`)
        /// or a full spec such as `join(doubled-sphere:2,boundary-simplex:1)`.
        spec: String,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Run the invariant suite on the built-in corpus.
    Selftest,
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Failure::input("IO", format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::input("IO", format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

/// What a verb produced: the report body and, for a failed check, the reason.
pub struct Outcome {
    pub body: String,
    pub failure: Option<Failure>,
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let fmt = cli.format;
    let seed = cli.seed;
    match &cli.verb {
        Verb::Validate { input } => verbs::validate(&read_input(input)?, fmt),
        Verb::Fvector { input } => verbs::vectors(&read_input(input)?, fmt, false),
        Verb::Hvector { input } => verbs::vectors(&read_input(input)?, fmt, true),
        Verb::Gorenstein {
            input,
            export_complex,
        } => verbs::gorenstein(&read_input(input)?, fmt, export_complex.as_deref()),
        Verb::Orient { input } => verbs::orient(&read_input(input)?, fmt),
        Verb::Lsop { input, check_dims } => verbs::lsop(&read_input(input)?, fmt, seed, *check_dims),
        Verb::Index { input, element } => verbs::index(&read_input(input)?, fmt, seed, element),
        Verb::Parity { input } => verbs::parity(&read_input(input)?, fmt, seed),
        Verb::Gen { spec, d } => verbs::generate(spec, *d),
        Verb::Selftest => verbs::selftest(fmt, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            eprintln!("{}", Failure::new(Exit::Internal, "THREADS", e.to_string()));
            return ExitCode::from(Exit::Internal as u8);
        }
    }
    let exit = match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.body.as_bytes());
            if !out.body.ends_with('\n') {
                let _ = stdout.write_all(b"\n");
            }
            let _ = stdout.flush();
            match out.failure {
                Some(f) => {
                    eprintln!("{f}");
                    f.exit
                }
                None => Exit::Ok,
            }
        }
        Err(f) => {
            eprintln!("{f}");
            f.exit
        }
    };
    ExitCode::from(exit as u8)
}
