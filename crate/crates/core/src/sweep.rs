//! Parameter sweeps over synthetic instances, written as CSV.
//!
//! For every swept value and trial an instance is generated, its Big-M box is
//! calibrated once, and each solver variant runs on the same instance and box.
//! Variants that terminate optimally must agree on the optimum; disagreement
//! is reported as [`Error::SafetyViolation`].

use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bnb::{solve, SolverConfig, Termination};
use crate::instance::{calibrate_big_m, default_m0, generate_instance, ExperimentConfig};
use crate::{Error, Result};

/// Optimal values of two variants may differ by this much.
pub const P_STAR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Gamma,
    Sigma,
    Rho,
    K,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Gamma => "gamma",
            SweepVariable::Sigma => "sigma",
            SweepVariable::Rho => "rho",
            SweepVariable::K => "k",
        }
    }

    fn apply(&self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        match self {
            SweepVariable::Gamma => cfg.gamma = value,
            SweepVariable::Sigma => cfg.sigma = value,
            SweepVariable::Rho => cfg.rho = value,
            SweepVariable::K => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "k must be a positive integer, got {value}"
                    )));
                }
                cfg.k = value as usize;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gamma" => Ok(SweepVariable::Gamma),
            "sigma" => Ok(SweepVariable::Sigma),
            "rho" => Ok(SweepVariable::Rho),
            "k" => Ok(SweepVariable::K),
            _ => Err(Error::UnknownSweepVariable(s.to_string())),
        }
    }
}

/// A named solver setting compared across the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub peeling: bool,
}

impl Variant {
    /// `no_peel` and `peel`, in that order.
    pub fn standard() -> Vec<Variant> {
        vec![
            Variant {
                name: "no_peel".into(),
                peeling: false,
            },
            Variant {
                name: "peel".into(),
                peeling: true,
            },
        ]
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub variants: Vec<Variant>,
    /// Growth factor of the Big-M calibration.
    pub eta: f64,
    /// Add a `wall_time_ms` column. Off by default so reruns are byte-identical.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(
        base: ExperimentConfig,
        variable: SweepVariable,
        values: Vec<f64>,
        trials: usize,
    ) -> Self {
        Self {
            base,
            variable,
            values,
            trials,
            variants: Variant::standard(),
            eta: 1.1,
            timing: false,
        }
    }
}

/// Outcome of one run. Budget exhaustion is recorded, not fatal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Optimal,
    BudgetExhausted,
    /// The Big-M calibration itself ran out of budget; the variants were not run.
    CalibrationFailed,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Optimal => "optimal",
            RowStatus::BudgetExhausted => "budget_exhausted",
            RowStatus::CalibrationFailed => "calibration_failed",
        }
    }
}

impl From<Termination> for RowStatus {
    fn from(t: Termination) -> Self {
        match t {
            Termination::Optimal => RowStatus::Optimal,
            Termination::BudgetExhausted => RowStatus::BudgetExhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    pub variant: String,
    pub status: RowStatus,
    pub node_count: usize,
    pub peel_fire_count: usize,
    pub relax_sweeps: usize,
    pub p_star: f64,
    pub support_size: usize,
    pub big_m: f64,
    pub wall_time_ms: f64,
}

/// Means over the trials of one swept value, one entry per variant in
/// [`SweepSpec::variants`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub value: f64,
    pub variants: Vec<VariantSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantSummary {
    pub name: String,
    pub trials: usize,
    pub optimal: usize,
    pub mean_nodes: f64,
    pub mean_peels: f64,
    /// `mean_nodes / mean_nodes` of the first variant.
    pub node_ratio: f64,
}

impl AggregateRow {
    pub fn variant(&self, name: &str) -> Option<&VariantSummary> {
        self.variants.iter().find(|v| v.name == name)
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one instance. γ only changes the box, so a γ sweep reuses the same
/// instance for a given trial across all values.
pub fn trial_seed(base_seed: u64, variable: SweepVariable, value: f64, trial: usize) -> u64 {
    let mut s = splitmix(base_seed ^ splitmix(trial as u64));
    if variable != SweepVariable::Gamma {
        s = splitmix(s ^ value.to_bits());
    }
    s
}

fn run_cell(spec: &SweepSpec, value: f64, trial: usize) -> Result<Vec<SweepRow>> {
    let mut cfg = spec.variable.apply(&spec.base, value)?;
    let seed = trial_seed(spec.base.seed, spec.variable, value, trial);
    cfg.seed = seed;
    let (inst, _truth) = generate_instance(&cfg)?;
    let calib_solver = SolverConfig {
        peeling: true,
        ..cfg.solver.clone()
    };
    let calib = match calibrate_big_m(&inst, cfg.gamma, spec.eta, default_m0(&inst), &calib_solver)
    {
        Ok(c) => c,
        Err(Error::CalibrationFailed { .. }) => {
            return Ok(spec
                .variants
                .iter()
                .map(|v| SweepRow {
                    value,
                    trial,
                    seed,
                    variant: v.name.clone(),
                    status: RowStatus::CalibrationFailed,
                    node_count: 0,
                    peel_fire_count: 0,
                    relax_sweeps: 0,
                    p_star: f64::NAN,
                    support_size: 0,
                    big_m: f64::NAN,
                    wall_time_ms: 0.0,
                })
                .collect())
        }
        Err(e) => return Err(e),
    };
    let bounds = calib.bounds(inst.n());

    let mut rows = Vec::with_capacity(spec.variants.len());
    let mut supports = Vec::with_capacity(spec.variants.len());
    for variant in &spec.variants {
        let solver = SolverConfig {
            peeling: variant.peeling,
            ..cfg.solver.clone()
        };
        let report = solve(&inst, &bounds, &solver)?;
        supports.push(report.support());
        rows.push(SweepRow {
            value,
            trial,
            seed,
            variant: variant.name.clone(),
            status: report.status.into(),
            node_count: report.node_count,
            peel_fire_count: report.peel_fire_count,
            relax_sweeps: report.relax_sweeps,
            p_star: report.p_star,
            support_size: report.support().len(),
            big_m: calib.big_m,
            wall_time_ms: report.wall_time.as_secs_f64() * 1e3,
        });
    }
    check_agreement(&rows, &supports, seed)?;
    Ok(rows)
}

/// Optimal variants must report the same `p*` (within [`P_STAR_TOL`],
/// relative) and the same support.
fn check_agreement(rows: &[SweepRow], supports: &[Vec<usize>], seed: u64) -> Result<()> {
    let optimal: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].status == RowStatus::Optimal)
        .collect();
    let Some(&first) = optimal.first() else {
        return Ok(());
    };
    for &i in &optimal[1..] {
        let (a, b) = (&rows[first], &rows[i]);
        if (a.p_star - b.p_star).abs() > P_STAR_TOL * (1.0 + a.p_star.abs()) {
            return Err(Error::SafetyViolation {
                seed,
                message: format!(
                    "variant {} found p* = {} but {} found p* = {}",
                    a.variant, a.p_star, b.variant, b.p_star
                ),
            });
        }
        if supports[first] != supports[i] {
            return Err(Error::SafetyViolation {
                seed,
                message: format!(
                    "variant {} has support {:?} but {} has {:?}",
                    a.variant, supports[first], b.variant, supports[i]
                ),
            });
        }
    }
    Ok(())
}

/// Run every `(value, trial)` cell, in parallel, and return the rows in
/// `(value, trial, variant)` order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.values.is_empty() || spec.trials == 0 || spec.variants.is_empty() {
        return Err(Error::InvalidParameter(
            "a sweep needs at least one value, one trial and one variant".into(),
        ));
    }
    let cells: Vec<(f64, usize)> = spec
        .values
        .iter()
        .flat_map(|&v| (0..spec.trials).map(move |t| (v, t)))
        .collect();
    let chunks: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(v, t)| run_cell(spec, v, t))
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Per-value means, values and variants in first-seen order. Runs whose
/// calibration failed are left out of the means.
pub fn aggregate(rows: &[SweepRow]) -> Vec<AggregateRow> {
    let mut out: Vec<AggregateRow> = Vec::new();
    for row in rows {
        let idx = match out
            .iter()
            .position(|a| a.value.to_bits() == row.value.to_bits())
        {
            Some(i) => i,
            None => {
                out.push(AggregateRow {
                    value: row.value,
                    variants: Vec::new(),
                });
                out.len() - 1
            }
        };
        let agg = &mut out[idx];
        let vi = match agg.variants.iter().position(|v| v.name == row.variant) {
            Some(i) => i,
            None => {
                agg.variants.push(VariantSummary {
                    name: row.variant.clone(),
                    trials: 0,
                    optimal: 0,
                    mean_nodes: 0.0,
                    mean_peels: 0.0,
                    node_ratio: 1.0,
                });
                agg.variants.len() - 1
            }
        };
        let v = &mut agg.variants[vi];
        if row.status == RowStatus::CalibrationFailed {
            continue;
        }
        v.trials += 1;
        v.optimal += usize::from(row.status == RowStatus::Optimal);
        v.mean_nodes += row.node_count as f64;
        v.mean_peels += row.peel_fire_count as f64;
    }
    for agg in &mut out {
        for v in &mut agg.variants {
            let t = v.trials as f64;
            v.mean_nodes /= t;
            v.mean_peels /= t;
        }
        let reference = agg.variants[0].mean_nodes;
        for v in &mut agg.variants {
            v.node_ratio = v.mean_nodes / reference;
        }
    }
    out
}

/// Column names of the per-run CSV.
pub fn row_header(variable: SweepVariable, timing: bool) -> Vec<&'static str> {
    let mut h = vec![
        variable.as_str(),
        "trial",
        "seed",
        "variant",
        "status",
        "node_count",
        "peel_fire_count",
        "relax_sweeps",
        "p_star",
        "support_size",
        "big_m",
    ];
    if timing {
        h.push("wall_time_ms");
    }
    h
}

pub fn write_rows(
    path: &Path,
    variable: SweepVariable,
    rows: &[SweepRow],
    timing: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(row_header(variable, timing))?;
    for r in rows {
        let mut rec = vec![
            r.value.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.variant.clone(),
            r.status.as_str().to_string(),
            r.node_count.to_string(),
            r.peel_fire_count.to_string(),
            r.relax_sweeps.to_string(),
            format!("{:.12e}", r.p_star),
            r.support_size.to_string(),
            format!("{:.12e}", r.big_m),
        ];
        if timing {
            rec.push(format!("{:.3}", r.wall_time_ms));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per swept value; for each variant `<name>_mean_nodes`,
/// `<name>_mean_peels`, `<name>_optimal`, and for every variant after the
/// first `<name>_node_ratio` (its mean nodes over the first variant's).
pub fn write_aggregate(path: &Path, variable: SweepVariable, agg: &[AggregateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let Some(first) = agg.first() else {
        w.flush()?;
        return Ok(());
    };
    let mut header = vec![variable.as_str().to_string(), "trials".to_string()];
    for v in &first.variants {
        header.push(format!("{}_mean_nodes", v.name));
        header.push(format!("{}_mean_peels", v.name));
        header.push(format!("{}_optimal", v.name));
    }
    for v in &first.variants[1..] {
        header.push(format!("{}_node_ratio", v.name));
    }
    w.write_record(&header)?;
    for a in agg {
        let mut rec = vec![a.value.to_string(), a.variants[0].trials.to_string()];
        for v in &a.variants {
            rec.push(format!("{:.6}", v.mean_nodes));
            rec.push(format!("{:.6}", v.mean_peels));
            rec.push(v.optimal.to_string());
        }
        for v in &a.variants[1..] {
            rec.push(format!("{:.6}", v.node_ratio));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `runs.csv` → `runs.aggregate.csv`.
pub fn aggregate_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}.aggregate.csv"))
}

/// [`run_sweep`], then write the rows to `out` and the means next to it.
pub fn run_sweep_to_csv(spec: &SweepSpec, out: &Path) -> Result<Vec<AggregateRow>> {
    let rows = run_sweep(spec)?;
    write_rows(out, spec.variable, &rows, spec.timing)?;
    let agg = aggregate(&rows);
    write_aggregate(&aggregate_path(out), spec.variable, &agg)?;
    Ok(agg)
}
