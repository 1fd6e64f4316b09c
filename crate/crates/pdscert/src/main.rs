use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use pdscert::cert::{certify, CertError, CertifyOptions, Verdict};
use pdscert::design::build_plane;
use pdscert::diophantine::{enumerate_solutions, CSystem, DiophantineError};
use pdscert::group::GroupSpec;
use pdscert::pds::{
    is_regular, is_trivial, lmt_closed, search_pds, verify_pds, CandidateSet, PdsParams,
    SearchOptions, SetFile,
};

// exit codes: 0 pass/ok, 1 verification failure, 2 input or I/O error,
// 3 inconclusive certificate, 4 pipeline integrity failure
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_INTEGRITY: u8 = 4;

#[derive(Parser)]
#[command(
    name = "pdscert",
    version,
    about = "Partial difference set verification and nonexistence certificates \
             in finite Abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the machine-readable output to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads. Outputs are byte-identical for every value.
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check a candidate set file against parameters.
    ///
    /// Exits 0 when every set passes, 1 on a verification failure, 2 on a
    /// parse or I/O error. The set file holds either one JSON object
    /// {"group": "...", "elements": [[...], ...]} or an array of them.
    Verify {
        /// Group notation, e.g. Z3^2 or Z2^3xZ3^3.
        group: String,
        /// Path to the candidate set file.
        set_file: PathBuf,
        /// Parameter quadruple v,k,lambda,mu, e.g. 9,4,1,2.
        params: String,
    },
    /// Build the staged nonexistence certificate for a parameter set.
    ///
    /// Exits 0 when the verdict is NONEXISTENT, 3 when INCONCLUSIVE, 4 on
    /// an internal integrity failure.
    Certify {
        /// Parameter quadruple v,k,lambda,mu, e.g. 216,40,4,8.
        params: String,
        /// Restrict weight searches to symmetry representatives. Emptiness
        /// verdicts are unaffected; assignment listings shrink to orbit
        /// representatives.
        #[arg(long)]
        prune_automorphisms: bool,
    },
    /// List every nonincreasing tuple with the given sum and sum of squares.
    #[command(name = "solve-c")]
    SolveC {
        /// Target sum of the tuple entries.
        sum: u64,
        /// Target sum of squared entries.
        sumsq: u64,
        /// Tuple length.
        length: usize,
    },
    /// Export the 13-point plane of a group: one block per line, as
    /// 0-based point indices.
    Plane {
        /// Group notation, e.g. Z2^3xZ3^3.
        group: String,
    },
    /// Search for regular partial difference sets by backtracking.
    Search {
        /// Group notation, e.g. Z3^2.
        group: String,
        /// Parameter quadruple v,k,lambda,mu.
        params: String,
        /// Abort after this many seconds and flag the result as partial.
        #[arg(long, value_name = "SECONDS")]
        timeout: Option<u64>,
        /// Stop after this many sets.
        #[arg(long, value_name = "N")]
        max_sets: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version requests are not errors
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("pdscert: {}", failure.message);
            failure.code
        }
    };
    ExitCode::from(code)
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Verify {
            group,
            set_file,
            params,
        } => cmd_verify(group, set_file, params, cli.out.as_deref()),
        Command::Certify {
            params,
            prune_automorphisms,
        } => cmd_certify(params, *prune_automorphisms, cli.jobs, cli.out.as_deref()),
        Command::SolveC { sum, sumsq, length } => {
            cmd_solve_c(*sum, *sumsq, *length, cli.out.as_deref())
        }
        Command::Plane { group } => cmd_plane(group, cli.out.as_deref()),
        Command::Search {
            group,
            params,
            timeout,
            max_sets,
        } => cmd_search(group, params, *timeout, *max_sets, cli.out.as_deref()),
    }
}

fn parse_group(notation: &str) -> Result<GroupSpec, Failure> {
    notation
        .parse()
        .map_err(|e| fail(EXIT_INPUT, format!("{e}")))
}

fn parse_params(literal: &str) -> Result<PdsParams, Failure> {
    literal
        .parse()
        .map_err(|e| fail(EXIT_INPUT, format!("{e}")))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| fail(EXIT_INPUT, format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| fail(EXIT_INPUT, format!("cannot write to stdout: {e}")))
        }
    }
}

fn cmd_verify(
    group: &str,
    set_file: &Path,
    params: &str,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let group = parse_group(group)?;
    let params = parse_params(params)?;
    let raw = fs::read_to_string(set_file)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot read {}: {e}", set_file.display())))?;
    // a set file holds one object or an array of them
    let files: Vec<SetFile> = match serde_json::from_str::<SetFile>(&raw) {
        Ok(single) => vec![single],
        Err(_) => serde_json::from_str(&raw).map_err(|e| {
            fail(
                EXIT_INPUT,
                format!("{} is not a valid set file: {e}", set_file.display()),
            )
        })?,
    };
    if files.is_empty() {
        return Err(fail(EXIT_INPUT, "the set file contains no sets"));
    }

    let mut report = String::new();
    let mut passed = 0usize;
    for (index, file) in files.iter().enumerate() {
        let file_group = parse_group(&file.group)?;
        if file_group != group {
            return Err(fail(
                EXIT_INPUT,
                format!(
                    "set {} belongs to {} but the command names {}",
                    index + 1,
                    file_group,
                    group
                ),
            ));
        }
        let set = CandidateSet::from_set_file(file)
            .map_err(|e| fail(EXIT_INPUT, format!("set {}: {e}", index + 1)))?;
        let verdict = verify_pds(&set, &params);
        passed += usize::from(verdict.pass);
        report.push_str(&format!(
            "set {}: group {} (order {}), {} elements\n",
            index + 1,
            group,
            group.order(),
            set.len()
        ));
        match &verdict.failure {
            None => {
                report.push_str(&format!(
                    "  spectrum: ok (lambda={}, mu={})\n",
                    params.lambda(),
                    params.mu()
                ));
            }
            Some(failure) => {
                report.push_str(&format!("  spectrum: FAIL ({failure})\n"));
            }
        }
        report.push_str(&format!(
            "  regular: {}\n  trivial: {}\n  lmt-closed: {}\n  result: {}\n",
            yes_no(is_regular(&set)),
            yes_no(is_trivial(&set)),
            yes_no(lmt_closed(&set)),
            if verdict.pass { "PASS" } else { "FAIL" }
        ));
    }
    let all_pass = passed == files.len();
    report.push_str(&format!(
        "overall: {} ({}/{} sets)\n",
        if all_pass { "PASS" } else { "FAIL" },
        passed,
        files.len()
    ));
    write_output(out, &report)?;
    Ok(if all_pass { 0 } else { EXIT_FAIL })
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn cmd_certify(
    params: &str,
    prune_automorphisms: bool,
    jobs: usize,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let params = parse_params(params)?;
    let options = CertifyOptions {
        jobs,
        prune_automorphisms,
    };
    match certify(&params, &options) {
        Ok(cert) => {
            write_output(out, &cert.to_json())?;
            Ok(match cert.overall() {
                Verdict::Nonexistent => 0,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Err(CertError::Integrity { stage, message }) => Err(fail(
            EXIT_INTEGRITY,
            format!("integrity failure at stage {stage}: {message}"),
        )),
    }
}

fn cmd_solve_c(sum: u64, sumsq: u64, length: usize, out: Option<&Path>) -> Result<u8, Failure> {
    let solutions = match CSystem::new(length, sum, sumsq) {
        Ok(system) => enumerate_solutions(&system),
        // a Cauchy-Schwarz violation just means there are no solutions
        Err(DiophantineError::CauchySchwarz { .. }) => Vec::new(),
        Err(err) => return Err(fail(EXIT_INPUT, err.to_string())),
    };
    let mut output = String::new();
    for tuple in solutions {
        let line: Vec<String> = tuple.iter().map(u64::to_string).collect();
        output.push_str(&line.join(" "));
        output.push('\n');
    }
    write_output(out, &output)?;
    Ok(0)
}

fn cmd_plane(group: &str, out: Option<&Path>) -> Result<u8, Failure> {
    let group = parse_group(group)?;
    let plane = build_plane(&group).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    write_output(out, &plane.export_blocks())?;
    Ok(0)
}

fn cmd_search(
    group: &str,
    params: &str,
    timeout: Option<u64>,
    max_sets: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let group = parse_group(group)?;
    let params = parse_params(params)?;
    let options = SearchOptions {
        timeout: timeout.map(Duration::from_secs),
        max_sets,
    };
    let outcome =
        search_pds(&group, &params, &options).map_err(|e| fail(EXIT_INPUT, e.to_string()))?;
    if !outcome.complete {
        eprintln!("pdscert: search stopped early; results may be incomplete");
    }
    let files: Vec<SetFile> = outcome
        .hits
        .iter()
        .map(|hit| hit.set.to_set_file(Some(hit.trivial)))
        .collect();
    let mut body = serde_json::to_string_pretty(&files)
        .map_err(|e| fail(EXIT_INPUT, format!("cannot serialize results: {e}")))?;
    body.push('\n');
    write_output(out, &body)?;
    Ok(0)
}
