//! Subcommand implementations.
//!
//! Each command returns an [`Output`] instead of printing, so the binary
//! only has to forward the text and the exit status.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use stochprod::convergence::{self, entry_floor, CertifyOptions};
use stochprod::generate::{self, GenerateParams};
use stochprod::hypotheses::{self, AnalysisOptions, MatrixSequence, PositivityStarts};
use stochprod::report::{
    CertificateSection, ExitStatus, InputDigest, RunReport, TrajectorySection,
};
use stochprod::seqfile::{self, SequenceFile};
use stochprod::stochastic::{self, Tolerances};
use stochprod::Error;

/// What a command prints and how the process should exit.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub status: ExitStatus,
    /// Report text for standard output.
    pub stdout: String,
    /// Diagnostics for standard error.
    pub stderr: String,
}

impl Output {
    fn report(report: &RunReport) -> Self {
        Self {
            status: report.exit,
            stdout: report.to_string(),
            stderr: String::new(),
        }
    }

    fn input_error(context: impl Display, err: impl Display) -> Self {
        Self {
            status: ExitStatus::InputError,
            stdout: String::new(),
            stderr: format!("error: {context}: {err}\n"),
        }
    }

    pub fn code(&self) -> i32 {
        self.status.code()
    }
}

/// Initial vector for `simulate`.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialVector {
    Inline(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulateOptions {
    pub x0: Option<InitialVector>,
    pub epsilon: f64,
    /// Where to write the `k,seminorm` plot table.
    pub csv: Option<PathBuf>,
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

struct Loaded {
    sequence: MatrixSequence,
    digest: InputDigest,
}

fn load(path: &Path, tol: &Tolerances) -> Result<Loaded, Output> {
    let shown = path.display();
    let text = fs::read_to_string(path).map_err(|e| Output::input_error(&shown, e))?;
    let file = SequenceFile::parse(&text).map_err(|e| Output::input_error(&shown, e))?;
    let sequence = file
        .to_sequence(tol)
        .map_err(|e| Output::input_error(&shown, e))?;
    let digest = InputDigest {
        path: path.display().to_string(),
        n: sequence.n(),
        length: sequence.len(),
        alpha: stochastic::min_positive_entry(sequence.as_slice(), tol.pos),
    };
    Ok(Loaded { sequence, digest })
}

fn analysis_options(tol: &Tolerances, all_starts: bool) -> AnalysisOptions {
    AnalysisOptions {
        tol_pos: tol.pos,
        starts: if all_starts {
            PositivityStarts::All
        } else {
            PositivityStarts::First
        },
    }
}

/// Parses and validates every record; reports `n`, `L` and `alpha`.
pub fn cmd_validate(path: &Path, tol: &Tolerances) -> Output {
    match load(path, tol) {
        Ok(loaded) => Output::report(&RunReport::new(loaded.digest)),
        Err(out) => out,
    }
}

/// Runs the four hypothesis checks; exit 0 iff all hold.
pub fn cmd_analyze(path: &Path, tol: &Tolerances, all_starts: bool) -> Output {
    let loaded = match load(path, tol) {
        Ok(l) => l,
        Err(out) => return out,
    };
    let opts = analysis_options(tol, all_starts);
    let h = match hypotheses::analyze(&loaded.sequence, &opts) {
        Ok(h) => h,
        Err(e) => return Output::input_error(path.display(), e),
    };
    let mut report = RunReport::new(loaded.digest);
    report.exit = if h.verdict.holds() {
        ExitStatus::Success
    } else {
        ExitStatus::Violation
    };
    report.hypotheses = Some(h);
    Output::report(&report)
}

/// Analyzes, then tries to issue a contraction certificate. Exit 0 when
/// issued, 1 when refused, 3 when the prefix ends before saturation.
pub fn cmd_certify(path: &Path, tol: &Tolerances, alpha: Option<f64>) -> Output {
    let loaded = match load(path, tol) {
        Ok(l) => l,
        Err(out) => return out,
    };
    let opts = CertifyOptions {
        analysis: analysis_options(tol, false),
        alpha,
    };
    let h = match hypotheses::analyze(&loaded.sequence, &opts.analysis) {
        Ok(h) => h,
        Err(e) => return Output::input_error(path.display(), e),
    };
    let n = loaded.sequence.n();
    let (section, status) = match convergence::contraction_certificate(&loaded.sequence, &opts) {
        Ok(Some(cert)) => (CertificateSection::Issued(cert), ExitStatus::Success),
        Ok(None) => {
            let alpha = alpha.or(h.alpha).expect("condition 1 holds when not refused");
            let floor = match entry_floor(alpha, n) {
                Ok(f) => f,
                Err(e) => return Output::input_error(path.display(), e),
            };
            (
                CertificateSection::NotReached {
                    alpha,
                    entry_floor: floor,
                },
                ExitStatus::HorizonExhausted,
            )
        }
        Err(Error::CertificationRefused { violations }) => {
            (CertificateSection::Refused(violations), ExitStatus::Violation)
        }
        Err(e) => return Output::input_error(path.display(), e),
    };
    let mut report = RunReport::new(loaded.digest);
    report.hypotheses = Some(h);
    report.certificate = Some(section);
    report.exit = status;
    Output::report(&report)
}

fn read_initial_vector(x0: &InitialVector) -> Result<Vec<f64>, Output> {
    match x0 {
        InitialVector::Inline(text) => {
            seqfile::parse_vector(text).map_err(|e| Output::input_error("--x0", e))
        }
        InitialVector::File(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Output::input_error(path.display(), e))?;
            seqfile::parse_vector(&text).map_err(|e| Output::input_error(path.display(), e))
        }
    }
}

/// Tracks `||P(k)||` (and `||P(k) x0||` when `x0` is given) until the
/// tracked quantity drops to `epsilon`. Exit 0 when reached, 3 otherwise.
pub fn cmd_simulate(path: &Path, tol: &Tolerances, opts: &SimulateOptions) -> Output {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Output::input_error("--epsilon", format!("must be positive, got {}", opts.epsilon));
    }
    let loaded = match load(path, tol) {
        Ok(l) => l,
        Err(out) => return out,
    };
    let seq = &loaded.sequence;
    let x0 = match opts.x0.as_ref().map(read_initial_vector).transpose() {
        Ok(x) => x,
        Err(out) => return out,
    };
    let mut seminorms = Vec::with_capacity(seq.len() + 1);
    let mut products = Vec::with_capacity(seq.len() + 1);
    for state in convergence::backward_products(seq) {
        seminorms.push(state.seminorm);
        products.push(state.product);
    }
    let disagreement = match x0 {
        Some(x) => match convergence::disagreement_trajectory(seq, &x) {
            Ok(d) => Some(d),
            Err(e) => return Output::input_error("--x0", e),
        },
        None => None,
    };
    let tracked = disagreement.as_ref().unwrap_or(&seminorms);
    let reached = tracked.iter().position(|&v| v <= opts.epsilon);
    let end = reached.map_or(seminorms.len(), |k| k + 1);
    seminorms.truncate(end);
    let disagreement = disagreement.map(|mut d| {
        d.truncate(end);
        d
    });
    let trajectory = TrajectorySection {
        epsilon: opts.epsilon,
        reached,
        seminorms,
        disagreement,
        consensus_row: reached.map(|k| products[k].midrange_row()),
    };
    if let Some(csv) = &opts.csv {
        if let Err(e) = write_atomic(csv, &trajectory.to_csv()) {
            return Output::input_error(csv.display(), e);
        }
    }
    let mut report = RunReport::new(loaded.digest);
    report.exit = if reached.is_some() {
        ExitStatus::Success
    } else {
        ExitStatus::HorizonExhausted
    };
    report.trajectory = Some(trajectory);
    Output::report(&report)
}

/// Writes a preset sequence to `out`, or to standard output when absent.
pub fn cmd_generate(params: &GenerateParams, out: Option<&Path>) -> Output {
    let generated = match generate::generate(params) {
        Ok(g) => g,
        Err(e) => return Output::input_error("generate", e),
    };
    let text = generated.to_file().to_string();
    match out {
        Some(path) => match write_atomic(path, &text) {
            Ok(()) => Output {
                status: ExitStatus::Success,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Output::input_error(path.display(), e),
        },
        None => Output {
            status: ExitStatus::Success,
            stdout: text,
            stderr: String::new(),
        },
    }
}
