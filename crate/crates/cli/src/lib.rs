//! Library side of the `graphfold` command: configuration, result
//! documents, witness verification and constraint diagrams.

pub mod diagram;
pub mod report;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use graphfold::csp::CspInstance;
use graphfold::decider::Stats;
use graphfold::flow::{csp_to_flow, solve, FlowNetwork};
use graphfold::oracle::{
    brute_force_decide, random_instance, unit_grid_instance, GenMode, GenParams,
};
use graphfold::{
    decide_with, load_instance, DecideError, DecideOptions, Decision, Instance, InstanceDocument,
};
use serde::Serialize;
use thiserror::Error;

pub use report::ResultDocument;

#[derive(Debug, Error)]
pub enum CliError {
    /// Anything wrong with what the user handed us.
    #[error("{0}")]
    Input(String),
    #[error("cannot read `{path}`: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write `{path}`: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A self-check failed: a bug, never an answer.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Read { .. } | CliError::Write { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<DecideError> for CliError {
    fn from(e: DecideError) -> Self {
        match e {
            DecideError::TooLarge { .. } => CliError::Input(e.to_string()),
            DecideError::Internal(m) => CliError::Internal(m),
        }
    }
}

pub const EXIT_SAT: u8 = 0;
pub const EXIT_UNSAT: u8 = 1;

/// Everything `decide` needs, checked before any work starts.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub input: PathBuf,
    /// Standard output when absent.
    pub output: Option<PathBuf>,
    pub dump_csp: Option<PathBuf>,
    pub dump_flow: Option<PathBuf>,
    pub emit_diagram: Option<PathBuf>,
    /// Decide by exhaustive search instead of the flow pipeline.
    pub oracle: bool,
    /// Re-check the emitted document before reporting success.
    pub verify: bool,
    /// Include wall-clock time in the stats, which makes output vary.
    pub timing: bool,
    pub parallel: bool,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.oracle {
            let wants = [
                ("--dump-csp", &self.dump_csp),
                ("--dump-flow", &self.dump_flow),
                ("--emit-diagram", &self.emit_diagram),
            ];
            if let Some((flag, _)) = wants.iter().find(|(_, p)| p.is_some()) {
                return Err(CliError::Input(format!(
                    "{flag} needs the constraint pipeline and cannot be combined with --oracle"
                )));
            }
        }
        let outputs = [
            &self.output,
            &self.dump_csp,
            &self.dump_flow,
            &self.emit_diagram,
        ];
        for path in outputs.into_iter().flatten() {
            if path == &self.input {
                return Err(CliError::Input(format!(
                    "`{}` is both input and output",
                    path.display()
                )));
            }
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if !dir.is_dir() {
                    return Err(CliError::Input(format!(
                        "directory `{}` does not exist",
                        dir.display()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// What a `decide` run produced; the caller prints or writes it.
pub struct RunOutcome {
    pub document: ResultDocument,
    pub exit_code: u8,
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<Instance, CliError> {
    let text = read(path)?;
    load_instance(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// The constraint systems of every component that reached assembly, merged
/// into one instance. Variable ranges are disjoint across components.
pub fn combined_csp(decision: &Decision) -> Result<CspInstance, CliError> {
    let clauses = decision
        .artifacts
        .iter()
        .flat_map(|a| a.assembly.csp.clauses().iter().cloned())
        .collect();
    CspInstance::new(clauses)
        .map_err(|e| CliError::Internal(format!("merged constraint system: {e}")))
}

pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    let instance = load(&config.input)?;
    let start = Instant::now();
    let (verdict, stats, decision) = if config.oracle {
        let verdict = brute_force_decide(&instance)?;
        let stats = Stats {
            angles: instance.graph.angle_count(),
            ..Stats::default()
        };
        (verdict, stats, None)
    } else {
        let wants_artifacts = config.dump_csp.is_some()
            || config.dump_flow.is_some()
            || config.emit_diagram.is_some();
        let options = DecideOptions {
            keep_artifacts: wants_artifacts,
            parallel: config.parallel,
            ..Default::default()
        };
        let decision = decide_with(&instance, &options)?;
        (
            decision.verdict.clone(),
            decision.stats.clone(),
            Some(decision),
        )
    };
    let elapsed = start.elapsed();

    if let Some(decision) = &decision {
        let needs_csp = config.dump_csp.is_some()
            || config.dump_flow.is_some()
            || config.emit_diagram.is_some();
        if needs_csp {
            let csp = combined_csp(decision)?;
            if let Some(path) = &config.dump_csp {
                write(path, &csp.to_text())?;
            }
            if let Some(path) = &config.dump_flow {
                let network: FlowNetwork = csp_to_flow(&csp);
                write(path, &network.to_text())?;
            }
            if let Some(path) = &config.emit_diagram {
                write(path, &diagram::emit_diagram(&instance, decision))?;
            }
        }
    }

    let mut document = ResultDocument::new(&instance, &verdict, &stats);
    if config.timing {
        document.stats.elapsed_ms = Some(elapsed.as_secs_f64() * 1000.0);
    }
    if config.verify {
        // Check what a reader of the document would see, not the in-memory verdict.
        let reparsed: ResultDocument = serde_json::from_str(&document.to_json())
            .map_err(|e| CliError::Internal(format!("result document does not parse back: {e}")))?;
        verify::verify_document(&instance, &reparsed)
            .map_err(|e| CliError::Internal(format!("result does not verify: {e}")))?;
    }
    let exit_code = if verdict.is_sat() {
        EXIT_SAT
    } else {
        EXIT_UNSAT
    };
    Ok(RunOutcome {
        document,
        exit_code,
    })
}

pub fn parse_mode(s: &str) -> Result<GenMode, String> {
    match s {
        "random" => Ok(GenMode::Random),
        "closed" => Ok(GenMode::Closed),
        "cycle" => Ok(GenMode::Cycle),
        other => Err(format!(
            "unknown mode `{other}` (expected random, closed or cycle)"
        )),
    }
}

/// An instance document for `gen`.
pub fn generate(seed: u64, size: usize, mode: GenMode) -> String {
    InstanceDocument::from_instance(&random_instance(seed, &GenParams::new(size, mode))).to_json()
}

/// One row of `bench` output.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub angles: usize,
    pub status: &'static str,
    pub millis: f64,
}

/// Times `decide` on unit grids of roughly `target` angles each.
pub fn bench(targets: &[usize]) -> Result<Vec<BenchRow>, CliError> {
    targets
        .iter()
        .map(|&target| {
            let side = ((target as f64 / 4.0).sqrt().round() as usize).max(1);
            let instance = unit_grid_instance(side, side);
            let start = Instant::now();
            let decision = decide_with(&instance, &DecideOptions::default())?;
            Ok(BenchRow {
                angles: instance.graph.angle_count(),
                status: decision.verdict.status(),
                millis: start.elapsed().as_secs_f64() * 1000.0,
            })
        })
        .collect()
}

/// Result of `solve` on a standalone constraint system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveDocument {
    pub status: &'static str,
    pub red_total: u64,
    pub blue_total: u64,
    pub flow_value: u64,
    /// Variables set true; absent when unsatisfiable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_vars: Option<Vec<u32>>,
}

/// Decides a constraint system given in its text form.
pub fn solve_csp(text: &str) -> Result<SolveDocument, CliError> {
    let csp: CspInstance = text
        .parse()
        .map_err(|e| CliError::Input(format!("constraint system: {e}")))?;
    let (red_total, blue_total) = csp.totals();
    let unsat = |flow_value| SolveDocument {
        status: "UNSAT",
        red_total,
        blue_total,
        flow_value,
        true_vars: None,
    };
    if red_total != blue_total {
        return Ok(unsat(0));
    }
    let (_, flow, assignment) = solve(&csp);
    let Ok(assignment) = assignment else {
        return Ok(unsat(flow.value));
    };
    if let Some(i) = csp.first_violated(&assignment) {
        return Err(CliError::Internal(format!(
            "flow assignment violates clause {i}"
        )));
    }
    let true_vars = csp
        .variables()
        .filter(|&v| assignment.get(v) == Some(true))
        .map(|v| v.0)
        .collect();
    Ok(SolveDocument {
        status: "SAT",
        red_total,
        blue_total,
        flow_value: flow.value,
        true_vars: Some(true_vars),
    })
}
