//! Key-value run reports.
//!
//! A report is a sequence of `[section]` headers each followed by
//! `key = value` lines. Sections appear only for the stages that ran, in a
//! fixed order, so identical input yields identical text. Repeated keys
//! (`violation`, `point`) form lists.

use std::fmt::{self, Write as _};

use crate::convergence::ConvergenceCertificate;
use crate::hypotheses::{HypothesisReport, Verdict, Violation};

/// Process exit codes shared by every subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitStatus {
    /// The check passed or the run succeeded.
    Success,
    /// A hypothesis is violated.
    Violation,
    /// Unreadable or invalid input.
    InputError,
    /// The prefix ended before the target was reached.
    HorizonExhausted,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::Violation => 1,
            Self::InputError => 2,
            Self::HorizonExhausted => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub n: usize,
    pub length: usize,
    /// Smallest positive entry over the sequence.
    pub alpha: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateSection {
    Issued(ConvergenceCertificate),
    Refused(Vec<Violation>),
    /// Hypotheses not contradicted, but no saturation index in the prefix.
    NotReached { alpha: f64, entry_floor: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySection {
    pub epsilon: f64,
    /// Index at which the tracked semi-norm first dropped to `epsilon`.
    pub reached: Option<usize>,
    /// `||P(k)||` from `k = 0`.
    pub seminorms: Vec<f64>,
    /// `||P(k) x0||` from `k = 0`, when an initial vector was given.
    pub disagreement: Option<Vec<f64>>,
    pub consensus_row: Option<Vec<f64>>,
}

impl TrajectorySection {
    /// Plot table with header `k,seminorm` (plus `,disagreement` when an
    /// initial vector was given).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,seminorm");
        if self.disagreement.is_some() {
            out.push_str(",disagreement");
        }
        out.push('\n');
        for (k, s) in self.seminorms.iter().enumerate() {
            let _ = write!(out, "{k},{s}");
            if let Some(d) = &self.disagreement {
                let _ = write!(out, ",{}", d[k]);
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub input: InputDigest,
    pub hypotheses: Option<HypothesisReport>,
    pub certificate: Option<CertificateSection>,
    pub trajectory: Option<TrajectorySection>,
    pub exit: ExitStatus,
}

impl RunReport {
    pub fn new(input: InputDigest) -> Self {
        Self {
            input,
            hypotheses: None,
            certificate: None,
            trajectory: None,
            exit: ExitStatus::Success,
        }
    }
}

fn list<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if parts.is_empty() {
        "-".to_string()
    } else {
        parts.join(" ")
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub fn write_hypotheses(f: &mut impl fmt::Write, h: &HypothesisReport) -> fmt::Result {
    writeln!(f, "[hypotheses]")?;
    writeln!(f, "alpha = {}", opt(h.alpha))?;
    writeln!(
        f,
        "completely_reducible = {}",
        h.reducibility_failures.is_empty()
    )?;
    writeln!(f, "reducibility_failures = {}", list(&h.reducibility_failures))?;
    writeln!(f, "intersection = {}", h.core.intersection)?;
    writeln!(f, "node_periods = {}", list(&h.core.node_periods))?;
    writeln!(f, "core = {}", opt(h.core.core.as_ref()))?;
    writeln!(
        f,
        "offending_nodes = {}",
        list(h.core.offending_nodes.iter().map(|v| v + 1))
    )?;
    writeln!(
        f,
        "eventual_positivity = {}",
        list(
            h.eventual_positivity
                .iter()
                .map(|(k, big)| format!("{k}:{}", opt(*big)))
        )
    )?;
    match &h.verdict {
        Verdict::AllConditionsHold => writeln!(f, "verdict = all-conditions-hold")?,
        Verdict::ConditionsViolated(vs) => {
            writeln!(f, "verdict = conditions-violated")?;
            for v in vs {
                writeln!(f, "violation = {v}")?;
            }
        }
    }
    Ok(())
}

pub fn write_certificate(f: &mut impl fmt::Write, c: &CertificateSection) -> fmt::Result {
    writeln!(f, "[certificate]")?;
    match c {
        CertificateSection::Issued(cert) => {
            writeln!(f, "status = issued")?;
            writeln!(f, "n = {}", cert.n)?;
            writeln!(f, "alpha = {}", cert.alpha)?;
            writeln!(f, "wielandt = {}", cert.wielandt)?;
            writeln!(f, "saturation_index = {}", cert.saturation_index)?;
            writeln!(f, "entry_floor = {:e}", cert.entry_floor)?;
            writeln!(f, "contraction = {}", cert.contraction())?;
            writeln!(f, "contraction_gap = {:e}", cert.contraction_gap)?;
            writeln!(f, "measured_seminorm = {}", cert.measured_seminorm)?;
        }
        CertificateSection::Refused(vs) => {
            writeln!(f, "status = refused")?;
            for v in vs {
                writeln!(f, "reason = {v}")?;
            }
        }
        CertificateSection::NotReached { alpha, entry_floor } => {
            writeln!(f, "status = not-reached")?;
            writeln!(f, "alpha = {alpha}")?;
            writeln!(f, "entry_floor = {entry_floor:e}")?;
            writeln!(f, "reason = no saturation index within the prefix")?;
        }
    }
    Ok(())
}

pub fn write_trajectory(f: &mut impl fmt::Write, t: &TrajectorySection) -> fmt::Result {
    writeln!(f, "[trajectory]")?;
    writeln!(f, "epsilon = {}", t.epsilon)?;
    writeln!(f, "reached = {}", opt(t.reached))?;
    writeln!(
        f,
        "consensus_row = {}",
        t.consensus_row.as_ref().map_or("-".to_string(), list)
    )?;
    for (k, s) in t.seminorms.iter().enumerate() {
        match &t.disagreement {
            Some(d) => writeln!(f, "point = {k} {s} {}", d[k])?,
            None => writeln!(f, "point = {k} {s}")?,
        }
    }
    Ok(())
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[input]")?;
        writeln!(f, "path = {}", self.input.path)?;
        writeln!(f, "n = {}", self.input.n)?;
        writeln!(f, "length = {}", self.input.length)?;
        writeln!(f, "alpha = {}", opt(self.input.alpha))?;
        if let Some(h) = &self.hypotheses {
            writeln!(f)?;
            write_hypotheses(f, h)?;
        }
        if let Some(c) = &self.certificate {
            writeln!(f)?;
            write_certificate(f, c)?;
        }
        if let Some(t) = &self.trajectory {
            writeln!(f)?;
            write_trajectory(f, t)?;
        }
        writeln!(f)?;
        writeln!(f, "[status]")?;
        writeln!(f, "exit = {}", self.exit.code())
    }
}

/// Splits report text into `(section, key, value)` triples.
pub fn parse_report(text: &str) -> Vec<(String, String, String)> {
    let mut section = String::new();
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.to_string();
        } else if let Some((k, v)) = line.split_once(" = ") {
            out.push((section.clone(), k.to_string(), v.to_string()));
        }
    }
    out
}
