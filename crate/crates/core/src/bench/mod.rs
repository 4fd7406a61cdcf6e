//! Batch runs over an instance × solver grid and Dolan–Moré performance
//! profiles of the results.

mod plot;
mod profile;

pub use plot::{emit_profile_plot, render_svg};
pub use profile::{performance_profile, write_profile_csv, PerfProfile, ProfileCurve, TIE_TOL};

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instances::BpInstance;
use crate::solvers::{SolveStatus, SolverKind, SolverOptions};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("nothing to run: {0}")]
    Empty(&'static str),
    #[error("duplicate instance label '{0}'")]
    DuplicateLabel(String),
    #[error("incomplete record grid, missing cells: {}", .0.iter().map(|(i, s)| format!("({i}, {s})")).collect::<Vec<_>>().join(", "))]
    IncompleteGrid(Vec<(String, String)>),
    #[error("duplicate record for ({0}, {1})")]
    DuplicateRecord(String, String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Outcome of one benchmark cell. `Error` covers solver errors and panics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchStatus {
    Optimal,
    HocOptimal,
    Stalled,
    IterLimit,
    TimeLimit,
    Error,
}

impl BenchStatus {
    pub fn is_solved(self) -> bool {
        matches!(self, BenchStatus::Optimal | BenchStatus::HocOptimal)
    }
}

impl From<SolveStatus> for BenchStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => BenchStatus::Optimal,
            SolveStatus::HocOptimal => BenchStatus::HocOptimal,
            SolveStatus::Stalled => BenchStatus::Stalled,
            SolveStatus::IterLimit => BenchStatus::IterLimit,
            SolveStatus::TimeLimit => BenchStatus::TimeLimit,
        }
    }
}

impl fmt::Display for BenchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for BenchStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Error" => BenchStatus::Error,
            other => SolveStatus::from_str(other)?.into(),
        })
    }
}

/// One row of `records.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub solver: String,
    pub status: BenchStatus,
    /// Wall time; runs that did not solve carry the time limit.
    pub time_s: f64,
    pub objective: f64,
    pub residual: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub solver: SolverOptions,
    /// Worker cap; 0 uses the available parallelism.
    pub workers: usize,
    /// File receiving records as they complete (completion order).
    pub stream: Option<PathBuf>,
}

fn run_cell(inst: &BpInstance, kind: SolverKind, opts: &SolverOptions) -> BenchRecord {
    let limit = opts.time_limit.as_secs_f64();
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| kind.solve(inst, opts)));
    let elapsed = start.elapsed().as_secs_f64();
    let mut rec = BenchRecord {
        instance: inst.meta.label.clone(),
        solver: kind.name().to_string(),
        status: BenchStatus::Error,
        time_s: limit,
        objective: f64::NAN,
        residual: f64::NAN,
        outer_iters: 0,
        inner_iters: 0,
    };
    if let Ok(Ok(res)) = outcome {
        rec.status = res.status.into();
        rec.objective = res.objective;
        rec.residual = res.residual;
        rec.outer_iters = res.outer_iterations;
        rec.inner_iters = res.inner_iterations;
        if rec.status.is_solved() {
            rec.time_s = elapsed;
        }
    }
    rec
}

/// Runs every (instance, solver) cell and returns the records sorted by
/// instance label, then solver name.
pub fn run_suite(
    instances: &[BpInstance],
    solvers: &[SolverKind],
    opts: &SuiteOptions,
) -> Result<Vec<BenchRecord>, BenchError> {
    if instances.is_empty() {
        return Err(BenchError::Empty("no instances"));
    }
    if solvers.is_empty() {
        return Err(BenchError::Empty("no solvers"));
    }
    let mut seen = HashSet::new();
    for inst in instances {
        if !seen.insert(inst.meta.label.as_str()) {
            return Err(BenchError::DuplicateLabel(inst.meta.label.clone()));
        }
    }

    let stream = match &opts.stream {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| BenchError::Io {
                path: path.clone(),
                source: e,
            })?;
            Some((path.clone(), Mutex::new(csv::Writer::from_writer(file))))
        }
        None => None,
    };
    let cells: Vec<(&BpInstance, SolverKind)> = instances
        .iter()
        .flat_map(|i| solvers.iter().map(move |&s| (i, s)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let results: Vec<Result<BenchRecord, BenchError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(inst, kind)| {
                let rec = run_cell(inst, kind, &opts.solver);
                if let Some((path, w)) = &stream {
                    let mut w = w.lock().unwrap_or_else(|p| p.into_inner());
                    w.serialize(&rec)
                        .and_then(|_| w.flush().map_err(csv::Error::from))
                        .map_err(|e| BenchError::Csv {
                            path: path.clone(),
                            source: e,
                        })?;
                }
                Ok(rec)
            })
            .collect()
    });
    let mut records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    sort_records(&mut records);
    Ok(records)
}

pub fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| (&a.instance, &a.solver).cmp(&(&b.instance, &b.solver)));
}

pub fn write_records_csv(records: &[BenchRecord], path: &Path) -> Result<(), BenchError> {
    let wrap = |e: csv::Error| BenchError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    for rec in records {
        w.serialize(rec).map_err(wrap)?;
    }
    w.flush().map_err(|e| wrap(e.into()))
}

pub fn read_records_csv(path: &Path) -> Result<Vec<BenchRecord>, BenchError> {
    let wrap = |e: csv::Error| BenchError::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    r.deserialize().collect::<Result<Vec<_>, _>>().map_err(wrap)
}
