use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use abelcov::paper::{render_all_checks, verify_paper};
use abelcov::scan::{emit_outcome, parse_points, run_scan, GroupSpec, OutputFormat, ScanJob};
use abelcov::{classify_with, Assertion, AutBounds, ClassifierConfig, LabelEquality, MonodromyDatum};

#[derive(Parser)]
#[command(name = "abelcov", version, about = "Classify families of abelian covers of the projective line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one monodromy datum read from a JSON file.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// The generic Jacobian is known to split into elliptic curves.
        #[arg(long)]
        assert_totally_decomposable: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
        /// Also identify Sp(2m) with SU(m,m) in the pairwise-distinctness test.
        #[arg(long)]
        symplectic_as_unitary: bool,
    },
    /// Enumerate and classify every datum within the given bounds.
    Scan {
        /// `all:N` or a comma-separated list such as `6,2x2x2`.
        #[arg(long, default_value = "all:64")]
        groups: String,
        /// Branch-point range `LO..HI`, inclusive.
        #[arg(long, default_value = "4..12")]
        points: String,
        #[arg(long)]
        genus_max: Option<u64>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        assert_totally_decomposable: bool,
    },
    /// Check the built-in worked examples.
    VerifyPaper {
        /// List every checked quantity, not only failures.
        #[arg(long)]
        verbose: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Md,
}

fn assertions(flag: bool) -> BTreeSet<Assertion> {
    if flag {
        BTreeSet::from([Assertion::TotallyDecomposable])
    } else {
        BTreeSet::new()
    }
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn analyze(input: PathBuf, td: bool, format: ReportFormat, sp_as_su: bool) -> ExitCode {
    let text = match std::fs::read_to_string(&input) {
        Ok(t) => t,
        Err(e) => return invalid(format!("{}: {e}", input.display())),
    };
    let datum = match MonodromyDatum::from_json(&text).and_then(|d| d.validate()) {
        Ok(d) => d,
        Err(e) => return invalid(e),
    };
    let mut config = ClassifierConfig::default();
    if sp_as_su {
        config.equality = LabelEquality::SymplecticAsUnitary;
    }
    let report = match classify_with(&datum, &assertions(td), &config) {
        Ok(r) => r,
        Err(e) => return invalid(e),
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let text = match format {
        ReportFormat::Json => report.to_json_string() + "\n",
        ReportFormat::Md => report.to_markdown(),
    };
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = std::io::stdout().write_all(text.as_bytes());
    ExitCode::SUCCESS
}

fn scan(
    groups: &str,
    points: &str,
    genus_max: Option<u64>,
    jobs: usize,
    out: PathBuf,
    format: &str,
    td: bool,
) -> ExitCode {
    let setup = || -> Result<(ScanJob, OutputFormat), abelcov::scan::ScanError> {
        let format: OutputFormat = format.parse()?;
        let mut job = ScanJob::new(groups.parse::<GroupSpec>()?, parse_points(points)?);
        job.genus_max = genus_max;
        job.jobs = jobs;
        job.assertions = assertions(td);
        Ok((job, format))
    };
    let (job, format) = match setup() {
        Ok(v) => v,
        Err(e) => return invalid(e),
    };
    let outcome = match run_scan(&job, &AutBounds::from_env()) {
        Ok(o) => o,
        Err(e) => return invalid(e),
    };
    if let Err(e) = std::fs::write(&out, emit_outcome(&outcome, format)) {
        return invalid(format!("{}: {e}", out.display()));
    }
    let s = &outcome.summary;
    eprintln!(
        "{} rows: {} SPECIAL, {} NOT_SPECIAL, {} INCONCLUSIVE",
        s.rows, s.special, s.not_special, s.inconclusive
    );
    for g in &s.skipped_groups {
        eprintln!("skipped group {:?}: {}", g.group, g.reason);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze {
            input,
            assert_totally_decomposable,
            format,
            symplectic_as_unitary,
        } => analyze(input, assert_totally_decomposable, format, symplectic_as_unitary),
        Command::Scan {
            groups,
            points,
            genus_max,
            jobs,
            out,
            format,
            assert_totally_decomposable,
        } => scan(&groups, &points, genus_max, jobs, out, &format, assert_totally_decomposable),
        Command::VerifyPaper { verbose } => {
            let v = verify_paper(&ClassifierConfig::default());
            if verbose {
                print!("{}", render_all_checks(&v));
            }
            print!("{v}");
            if v.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
