use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use super::{BenchError, BenchRecord};

/// Times within this relative distance of the best count as ratio 1.
pub const TIE_TOL: f64 = 1e-9;

/// Step function of one solver: `rho(τ) = points[i].1` for the last
/// `points[i].0 ≤ τ`, and 0 left of the first point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub solver: String,
    pub points: Vec<(f64, f64)>,
    /// Performance ratio per problem, `+∞` for failures.
    pub ratios: Vec<f64>,
}

impl ProfileCurve {
    pub fn rho(&self, tau: f64) -> f64 {
        self.points
            .iter()
            .take_while(|(t, _)| *t <= tau)
            .last()
            .map_or(0.0, |&(_, r)| r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfProfile {
    pub problems: Vec<String>,
    pub curves: Vec<ProfileCurve>,
}

impl PerfProfile {
    pub fn solvers(&self) -> Vec<&str> {
        self.curves.iter().map(|c| c.solver.as_str()).collect()
    }

    pub fn curve(&self, solver: &str) -> Option<&ProfileCurve> {
        self.curves.iter().find(|c| c.solver == solver)
    }

    pub fn rho(&self, solver: &str, tau: f64) -> Option<f64> {
        self.curve(solver).map(|c| c.rho(tau))
    }

    /// Largest finite ratio over all curves, at least 1.
    pub fn max_finite_ratio(&self) -> f64 {
        self.curves
            .iter()
            .flat_map(|c| c.ratios.iter())
            .copied()
            .filter(|r| r.is_finite())
            .fold(1.0, f64::max)
    }
}

/// Builds the profile from a complete instance × solver grid. Problems and
/// solvers are ordered by name.
pub fn performance_profile(records: &[BenchRecord]) -> Result<PerfProfile, BenchError> {
    if records.is_empty() {
        return Err(BenchError::Empty("no records"));
    }
    let problems: BTreeSet<&str> = records.iter().map(|r| r.instance.as_str()).collect();
    let solvers: BTreeSet<&str> = records.iter().map(|r| r.solver.as_str()).collect();
    let mut grid: BTreeMap<(&str, &str), &BenchRecord> = BTreeMap::new();
    for r in records {
        if grid.insert((&r.instance, &r.solver), r).is_some() {
            return Err(BenchError::DuplicateRecord(
                r.instance.clone(),
                r.solver.clone(),
            ));
        }
    }
    let missing: Vec<(String, String)> = problems
        .iter()
        .flat_map(|p| solvers.iter().map(move |s| (*p, *s)))
        .filter(|cell| !grid.contains_key(cell))
        .map(|(p, s)| (p.to_string(), s.to_string()))
        .collect();
    if !missing.is_empty() {
        return Err(BenchError::IncompleteGrid(missing));
    }

    let time = |p: &str, s: &str| -> Option<f64> {
        let r = grid[&(p, s)];
        (r.status.is_solved() && r.time_s.is_finite()).then_some(r.time_s.max(0.0))
    };
    let best: Vec<Option<f64>> = problems
        .iter()
        .map(|p| {
            solvers
                .iter()
                .filter_map(|s| time(p, s))
                .min_by(f64::total_cmp)
        })
        .collect();

    let np = problems.len() as f64;
    let curves = solvers
        .iter()
        .map(|s| {
            let ratios: Vec<f64> = problems
                .iter()
                .zip(&best)
                .map(|(p, b)| match (time(p, s), b) {
                    (Some(t), Some(b)) if t <= b * (1.0 + TIE_TOL) => 1.0,
                    (Some(t), Some(b)) => t / b,
                    _ => f64::INFINITY,
                })
                .collect();
            let mut finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
            finite.sort_by(f64::total_cmp);
            let mut points = vec![(1.0, 0.0)];
            for (i, &r) in finite.iter().enumerate() {
                let rho = (i + 1) as f64 / np;
                match points.last_mut() {
                    Some(last) if last.0 == r => last.1 = rho,
                    _ => points.push((r, rho)),
                }
            }
            ProfileCurve {
                solver: s.to_string(),
                points,
                ratios,
            }
        })
        .collect();
    Ok(PerfProfile {
        problems: problems.into_iter().map(String::from).collect(),
        curves,
    })
}

/// Writes `solver,tau,rho`, one row per step point.
pub fn write_profile_csv<W: Write>(profile: &PerfProfile, w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["solver", "tau", "rho"])?;
    for c in &profile.curves {
        for (tau, rho) in &c.points {
            wtr.write_record([c.solver.clone(), tau.to_string(), rho.to_string()])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub(super) fn save_profile_csv(profile: &PerfProfile, path: &Path) -> Result<(), BenchError> {
    let file = std::fs::File::create(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    write_profile_csv(profile, std::io::BufWriter::new(file)).map_err(|e| BenchError::Csv {
        path: path.to_path_buf(),
        source: e,
    })
}
