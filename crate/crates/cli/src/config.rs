use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hamrep::{BuiltinCode, CodeSpec, Error};
use serde::Deserialize;

use crate::args::{GlobalArgs, Task};

/// Orthonormality tolerance for codewords read from a file.
pub const CODE_FILE_TOL: f64 = 1e-10;

/// Invalid input: bad ranges, unknown codes, malformed configs. Maps to
/// exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// JSON run description: a task plus the global options.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub jobs: Option<usize>,
    pub task: Task,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn split(self) -> (GlobalArgs, Task) {
        let global = GlobalArgs {
            out: self.out,
            tol: self.tol,
            seed: self.seed,
            jobs: self.jobs,
        };
        (global, self.task)
    }
}

/// Built-in code by name, otherwise a JSON code file.
pub fn load_code(spec: &str) -> anyhow::Result<CodeSpec> {
    if let Ok(builtin) = BuiltinCode::from_str(spec) {
        return Ok(CodeSpec::builtin(builtin));
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(Error::UnknownCode(spec.to_string()).into());
    }
    CodeSpec::load(path, CODE_FILE_TOL).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn unit_interval(name: &str, v: f64) -> anyhow::Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(usage(format!("{name} = {v} outside (0, 1]")))
    }
}

fn positive(name: &str, v: f64) -> anyhow::Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("{name} = {v} must be positive and finite")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> anyhow::Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(usage(format!("{name} = {v} must be at least {min}")))
    }
}

pub fn validate_global(g: &GlobalArgs) -> anyhow::Result<()> {
    if let Some(tol) = g.tol {
        positive("tol", tol)?;
    }
    if let Some(jobs) = g.jobs {
        at_least("jobs", jobs, 1)?;
    }
    Ok(())
}

/// Range checks run before any computation.
pub fn validate_task(task: &Task) -> anyhow::Result<()> {
    match task {
        Task::ChannelCompare(a) => {
            unit_interval("eta", a.eta)?;
            at_least("modes", a.modes, 1)?;
            at_least("cutoff", a.cutoff, 1)?;
            at_least("states", a.states, 1)?;
        }
        Task::CodesValidate(a) => unit_interval("eta", a.eta)?,
        Task::RepeaterBuild(a) => {
            at_least("ancilla-k", a.ancilla_k, 1)?;
            at_least("trials", a.trials, 1)?;
        }
        Task::ScanRegion(a) => {
            a.eta_c.validate().map_err(|e| usage(e.to_string()))?;
            a.sep.validate().map_err(|e| usage(e.to_string()))?;
            unit_interval("eta-c", a.eta_c.lo)?;
            unit_interval("eta-c", a.eta_c.hi)?;
            positive("sep", a.sep.lo)?;
            positive("alpha", a.alpha)?;
            at_least("max-segments", a.max_segments, 1)?;
        }
        Task::RateCurve(a) => {
            unit_interval("eta-c", a.eta_c)?;
            match (a.sep, a.optimize_sep) {
                (Some(_), true) => return Err(usage("sep and optimize-sep are exclusive")),
                (None, false) => return Err(usage("one of sep or optimize-sep is required")),
                (Some(l), false) => positive("sep", l)?,
                (None, true) => {}
            }
            positive("max-km", a.max_km)?;
            positive("alpha", a.alpha)?;
        }
        Task::ChainSimulate(a) => {
            unit_interval("eta-c", a.eta_c)?;
            positive("sep", a.sep)?;
            at_least("segments", a.segments, 1)?;
            positive("alpha", a.alpha)?;
        }
    }
    Ok(())
}
