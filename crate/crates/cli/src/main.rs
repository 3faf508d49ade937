//! `topodeck`: enumerate finite topological spaces, compute decks and
//! invariants, and audit catalogs for deck collisions and theorem
//! conformance.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or unsupported
//! scale, 3 theorem-suite verification failure.

use clap::{Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use topodeck_core::audit::{audit_report, theorem_suite, DeckMode};
use topodeck_core::deck::deck_summary;
use topodeck_core::enumerate::{enumerate_upto_homeo, read_catalog, write_catalog, Catalog};
use topodeck_core::props::property_vector;
use topodeck_core::space::{space_from_json, FiniteSpace};
use topodeck_core::Error;

#[derive(Parser)]
#[command(name = "topodeck", version, about = "Finite-space deck and reconstruction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for enumeration and audits (0 = one per core).
    #[arg(long, global = true, env = "TOPODECK_WORKERS", default_value_t = 0)]
    workers: usize,

    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all spaces on n points up to homeomorphism into a
    /// JSONL catalog.
    Enumerate {
        /// Point count (1..=7).
        #[arg(long)]
        n: usize,
        /// Catalog output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the deck and multi-deck of a space as JSON.
    Deck {
        /// Space JSON file ({"n", "opens"} or {"n", "preorder"}).
        space: PathBuf,
    },
    /// Print the property vector of a space as JSON.
    Props {
        /// Space JSON file.
        space: PathBuf,
    },
    /// Group a catalog by deck, list collisions, audit properties, and run
    /// the theorem suite.
    Audit {
        /// Catalog file produced by `enumerate`.
        #[arg(long)]
        catalog: PathBuf,
        /// Compare decks as sets or multisets.
        #[arg(long, value_enum, default_value_t = ModeArg::Set)]
        mode: ModeArg,
        /// Report output path (stdout when absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run only the theorem suite; exits 3 if a proved check fails.
    Verify {
        /// Catalog file produced by `enumerate`.
        #[arg(long)]
        catalog: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Set,
    Multi,
}

impl From<ModeArg> for DeckMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Set => DeckMode::Set,
            ModeArg::Multi => DeckMode::Multi,
        }
    }
}

enum Failure {
    Io(String),
    Input(String),
    Verification,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Io(e) => Failure::Io(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn io_failure(context: &str, err: std::io::Error) -> Failure {
    Failure::Io(format!("{context}: {err}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        if let Err(err) = rayon_pool(cli.workers) {
            eprintln!("topodeck: cannot build worker pool: {err}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Io(msg) => eprintln!("topodeck: i/o error: {msg}"),
                Failure::Input(msg) => eprintln!("topodeck: {msg}"),
                Failure::Verification => eprintln!("topodeck: theorem suite failed"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn rayon_pool(workers: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Enumerate { n, out } => cmd_enumerate(n, &out, cli.quiet),
        Command::Deck { space } => cmd_deck(&space),
        Command::Props { space } => cmd_props(&space),
        Command::Audit {
            catalog,
            mode,
            report,
        } => cmd_audit(&catalog, mode.into(), report.as_deref()),
        Command::Verify { catalog } => cmd_verify(&catalog),
    }
}

fn cmd_enumerate(n: usize, out: &Path, quiet: bool) -> Result<(), Failure> {
    let catalog = enumerate_upto_homeo(n)?;
    let file = File::create(out).map_err(|e| io_failure("creating catalog", e))?;
    let mut writer = BufWriter::new(file);
    write_catalog(&mut writer, &catalog)?;
    writer
        .flush()
        .map_err(|e| io_failure("writing catalog", e))?;
    if !quiet {
        eprintln!("wrote {}", out.display());
    }
    println!("{} classes", catalog.len());
    Ok(())
}

fn load_space(path: &Path) -> Result<FiniteSpace, Failure> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_failure("reading space file", e))?;
    Ok(space_from_json(&text)?)
}

fn cmd_deck(path: &Path) -> Result<(), Failure> {
    let space = load_space(path)?;
    let summary = deck_summary(&space)?;
    println!(
        "{}",
        serde_json::to_string(&summary).expect("deck summary serializes")
    );
    Ok(())
}

fn cmd_props(path: &Path) -> Result<(), Failure> {
    let space = load_space(path)?;
    let vector = property_vector(&space)?;
    println!(
        "{}",
        serde_json::to_string(&vector).expect("property vector serializes")
    );
    Ok(())
}

fn load_catalog(path: &Path) -> Result<Catalog, Failure> {
    let file = File::open(path).map_err(|e| io_failure("opening catalog", e))?;
    Ok(read_catalog(BufReader::new(file))?)
}

fn cmd_audit(catalog_path: &Path, mode: DeckMode, report_path: Option<&Path>) -> Result<(), Failure> {
    let catalog = load_catalog(catalog_path)?;
    let report = audit_report(&catalog, mode)?;
    let rendered =
        serde_json::to_string_pretty(&report).expect("audit report serializes");
    match report_path {
        Some(path) => {
            std::fs::write(path, rendered + "\n").map_err(|e| io_failure("writing report", e))?;
            println!(
                "{} classes, {} collisions -> {}",
                report.classes.len(),
                report.collisions.len(),
                path.display()
            );
        }
        None => println!("{rendered}"),
    }
    Ok(())
}

fn cmd_verify(catalog_path: &Path) -> Result<(), Failure> {
    let catalog = load_catalog(catalog_path)?;
    let suite = theorem_suite(&catalog)?;
    let document = serde_json::json!({
        "n": catalog.n,
        "theorems": suite.theorems,
        "analogs": suite.analogs,
        "all_proved_pass": suite.all_proved_pass(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&document).expect("suite serializes")
    );
    if suite.all_proved_pass() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
