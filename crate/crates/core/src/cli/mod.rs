//! Command-line front end: argument parsing, dispatch and report emission.

pub mod commands;
pub mod expr;
pub mod spec;

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::sampling::Sampler;
use commands::Ctx;
use spec::SpecDocument;

pub const REPORT_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "z2graded", version, about = "Exact checks for Z2^n-graded algebras, domains and their Lambda-points")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON spec file.
    #[arg(long, global = true)]
    pub spec: Option<std::path::PathBuf>,

    /// Truncation order used for sampled algebras.
    #[arg(long, global = true, default_value_t = 6)]
    pub truncation: usize,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Override the per-command sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Record wall-clock time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Ring axioms and the sign rule.
    Laws,
    /// Evaluate maps at Lambda-points.
    Eval,
    /// Commutation with pushforward along algebra morphisms.
    Naturality,
    /// Propagation criterion and Lambda0-linearity.
    Classify,
    /// Separating Lambda-points for pairs of morphisms.
    Separate,
    /// Inverse-pair and cocycle checks on atlases.
    Cocycle,
    /// Group-object laws.
    Group,
    /// Invariance of the pairing under orthogonal rotations.
    Rotate,
    /// Every command above, in order.
    ReportAll,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Laws => "laws",
            Command::Eval => "eval",
            Command::Naturality => "naturality",
            Command::Classify => "classify",
            Command::Separate => "separate",
            Command::Cocycle => "cocycle",
            Command::Group => "group",
            Command::Rotate => "rotate",
            Command::ReportAll => "report-all",
        }
    }

    const ALL: [Command; 8] = [
        Command::Laws,
        Command::Eval,
        Command::Naturality,
        Command::Classify,
        Command::Separate,
        Command::Cocycle,
        Command::Group,
        Command::Rotate,
    ];
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// One block of a report.
#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: String,
    pub pass: bool,
    pub witnesses: Vec<Value>,
    pub samples_run: usize,
    pub effective_truncation: Option<usize>,
    pub details: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub verdict: &'static str,
    pub seed: u64,
    pub samples_run: usize,
    pub effective_truncation: Option<usize>,
    pub witnesses: Vec<Value>,
    pub sections: Vec<Section>,
    pub error: Option<String>,
    pub wall_time: Option<f64>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            "PASS" => 0,
            "FAIL" => 1,
            _ => 2,
        }
    }

    fn text(&self) -> String {
        let mut out = format!("{} {} (seed {}, {} samples", self.command, self.verdict, self.seed, self.samples_run);
        if let Some(k) = self.effective_truncation {
            out.push_str(&format!(", K = {k}"));
        }
        out.push_str(")\n");
        for s in &self.sections {
            out.push_str(&format!("  [{}] {}\n", if s.pass { "PASS" } else { "FAIL" }, s.name));
            for w in &s.witnesses {
                out.push_str(&format!("      witness: {w}\n"));
            }
        }
        if let Some(e) = &self.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        out
    }
}

/// What a CLI invocation produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn run_one(command: Command, ctx: &mut Ctx) -> Result<Vec<Section>> {
    match command {
        Command::Laws => commands::laws(ctx),
        Command::Eval => commands::eval(ctx),
        Command::Naturality => commands::naturality(ctx),
        Command::Classify => commands::classify(ctx),
        Command::Separate => commands::separate(ctx),
        Command::Cocycle => commands::cocycle(ctx),
        Command::Group => commands::group(ctx),
        Command::Rotate => commands::rotate(ctx),
        Command::ReportAll => {
            let mut all = Vec::new();
            for c in Command::ALL {
                for mut s in run_one(c, ctx)? {
                    s.name = format!("{}: {}", c.name(), s.name);
                    all.push(s);
                }
            }
            Ok(all)
        }
    }
}

/// Run a parsed invocation and assemble its report.
pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let loaded: Result<Option<SpecDocument>> = cli
        .spec
        .as_ref()
        .map(|path| {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
            SpecDocument::from_json(&text)
        })
        .transpose();
    let result = loaded.and_then(|doc| {
        let mut ctx = Ctx { spec: doc.as_ref(), truncation: cli.truncation, samples: cli.samples, sampler: Sampler::new(cli.seed) };
        run_one(cli.command, &mut ctx)
    });
    let (sections, error) = match result {
        Ok(s) => (s, None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let verdict = match (&error, sections.iter().all(|s| s.pass)) {
        (Some(_), _) => "ERROR",
        (None, true) => "PASS",
        (None, false) => "FAIL",
    };
    Report {
        report_version: REPORT_VERSION,
        command: cli.command.name().to_string(),
        verdict,
        seed: cli.seed,
        samples_run: sections.iter().map(|s| s.samples_run).sum(),
        effective_truncation: sections.iter().filter_map(|s| s.effective_truncation).min(),
        witnesses: sections.iter().flat_map(|s| s.witnesses.iter().cloned()).collect(),
        sections,
        error,
        wall_time: cli.timing.then(|| start.elapsed().as_secs_f64()),
    }
}

/// Parse `argv` (including the program name), run, and write `--out` if given.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { exit_code: 0, stdout: text, stderr: String::new() }
            } else {
                Outcome { exit_code: 2, stdout: String::new(), stderr: text }
            };
        }
    };
    let report = execute(&cli);
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => report.text(),
    };
    let mut stderr = report.text();
    let mut exit_code = report.exit_code();
    let stdout = match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
                exit_code = 2;
            }
            String::new()
        }
        None => body,
    };
    Outcome { exit_code, stdout, stderr }
}
