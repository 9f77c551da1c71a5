//! Monte-Carlo harness for the nine-function additive benchmark.
//!
//! Each replication draws its own design and noise from a ChaCha20 stream
//! selected by the replication index, so serial and parallel runs give the
//! same numbers. Results are reduced in replication order.

mod baseline;
mod sampling;

pub use baseline::{additive_truth, eval_baseline, BASELINE_COUNT};
pub use sampling::{beta_3half_cdf, beta_3half_quantile, DesignDistribution};

use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fit, FitConfig, SigmaMethod};
use crate::rng;

/// Replications used when none are requested.
pub const DESK_REPLICATIONS: usize = 25;
/// Replications of the full grid.
pub const FULL_REPLICATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationScenario {
    pub design: DesignDistribution,
    pub sigma2: f64,
    pub n: usize,
    pub filter: String,
    pub replications: usize,
    pub seed: u64,
    pub sigma_method: SigmaMethod,
}

impl SimulationScenario {
    pub fn new(design: DesignDistribution, sigma2: f64, n: usize, filter: &str) -> Self {
        SimulationScenario {
            design,
            sigma2,
            n,
            filter: filter.to_string(),
            replications: DESK_REPLICATIONS,
            seed: rng::DEFAULT_SEED,
            sigma_method: SigmaMethod::MadDetail,
        }
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Number of predictors (one per baseline function).
    pub fn predictors(&self) -> usize {
        BASELINE_COUNT
    }

    pub fn label(&self) -> String {
        format!(
            "design={} filter={} sigma2={} n={} B={} seed={}",
            self.design, self.filter, self.sigma2, self.n, self.replications, self.seed
        )
    }

    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        if !(self.sigma2 >= 0.0) || !self.sigma2.is_finite() {
            return Err(Error::Config(format!(
                "noise variance must be non-negative, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

/// Mean squared errors of one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationErrors {
    pub aggregate_mse: f64,
    pub component_mse: [f64; BASELINE_COUNT],
    pub level: u32,
    pub beta_n: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: SimulationScenario,
    /// `sqrt(mean_b mean_i (f(x_i) − f̂(x_i))²)` for the full additive fit.
    pub aggregate_rmse: f64,
    /// Same measure for each component against its baseline function.
    pub component_rmse: [f64; BASELINE_COUNT],
    pub level: u32,
    pub replications: Vec<ReplicationErrors>,
}

fn simulate_replication(s: &SimulationScenario, index: usize) -> Result<ReplicationErrors> {
    let mut rng = rng::stream(s.seed, index as u64);
    let p = s.predictors();
    let n = s.n;
    let mut x = DMatrix::<f64>::zeros(n, p);
    // row-major draw order
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = s.design.sample(&mut rng);
        }
    }
    let sigma = s.sigma2.sqrt();
    let mut truth = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut row = vec![0.0; p];
    for i in 0..n {
        for j in 0..p {
            row[j] = x[(i, j)];
        }
        truth[i] = additive_truth(&row);
        let eps: f64 = rng.sample(StandardNormal);
        y[i] = truth[i] + sigma * eps;
    }
    let config = FitConfig {
        filter: s.filter.clone(),
        sigma_method: s.sigma_method,
        ..FitConfig::default()
    };
    let (model, report) = fit(&x, &y, &config)?;

    let mut unit = vec![0.0; p];
    let mut aggregate = 0.0;
    let mut comp = [0.0; BASELINE_COUNT];
    for i in 0..n {
        for j in 0..p {
            row[j] = x[(i, j)];
        }
        model.rescale_row(&row, &mut unit, false)?;
        let (score, components) = model.decompose_unit(&unit)?;
        let estimate = model.y_mean() + model.y_std() * crate::model::truncate(score, model.beta_n());
        aggregate += (truth[i] - estimate).powi(2);
        for j in 0..p {
            let fj = eval_baseline(j + 1, row[j])?;
            comp[j] += (fj - model.y_std() * components[j]).powi(2);
        }
    }
    let nf = n as f64;
    Ok(ReplicationErrors {
        aggregate_mse: aggregate / nf,
        component_mse: comp.map(|c| c / nf),
        level: report.level,
        beta_n: report.beta_n,
    })
}

/// Runs all replications of a scenario on the current rayon pool.
pub fn run_scenario(s: &SimulationScenario) -> Result<ScenarioResult> {
    s.validate()?;
    let wrap = |e: Error| Error::Scenario {
        scenario: s.label(),
        source: Box::new(e),
    };
    let reps: Vec<ReplicationErrors> = (0..s.replications)
        .into_par_iter()
        .map(|b| simulate_replication(s, b))
        .collect::<Result<Vec<_>>>()
        .map_err(wrap)?;
    let b = reps.len() as f64;
    let mut aggregate = 0.0;
    let mut comp = [0.0; BASELINE_COUNT];
    for r in &reps {
        aggregate += r.aggregate_mse;
        for (c, v) in comp.iter_mut().zip(r.component_mse) {
            *c += v;
        }
    }
    Ok(ScenarioResult {
        scenario: s.clone(),
        aggregate_rmse: (aggregate / b).sqrt(),
        component_rmse: comp.map(|c| (c / b).sqrt()),
        level: reps[0].level,
        replications: reps,
    })
}

/// Runs a scenario on a dedicated pool of `threads` workers.
pub fn run_scenario_with_threads(s: &SimulationScenario, threads: usize) -> Result<ScenarioResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_scenario(s))
}

/// Least-squares slope of `ln(RMSE²)` against `ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// `−2γ/(2γ+1)` with `γ = N + 1`, when the vanishing moments are known.
    pub theoretical_slope: Option<f64>,
}

pub fn theoretical_slope(vanishing_moments: usize) -> f64 {
    let gamma = vanishing_moments as f64 + 1.0;
    -2.0 * gamma / (2.0 * gamma + 1.0)
}

pub fn rate_check(ns: &[usize], rmse: &[f64], vanishing_moments: Option<usize>) -> Result<RateFit> {
    if ns.len() != rmse.len() {
        return Err(Error::Shape(format!(
            "{} sample sizes for {} RMSE values",
            ns.len(),
            rmse.len()
        )));
    }
    if ns.len() < 3 {
        return Err(Error::Domain(format!(
            "rate fit needs at least 3 points, got {}",
            ns.len()
        )));
    }
    if rmse.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || ns.contains(&0) {
        return Err(Error::Domain(
            "rate fit needs positive RMSE values and sample sizes".into(),
        ));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = rmse.iter().map(|r| (r * r).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain(
            "rate fit needs at least two distinct sample sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        theoretical_slope: vanishing_moments.map(theoretical_slope),
    })
}

pub const TABLE_HEADER: [&str; 8] = [
    "design",
    "filter",
    "sigma2",
    "n",
    "function_index",
    "rmse",
    "replications",
    "seed",
];

/// One row per baseline function plus an `aggregate` row per scenario.
pub fn table_rows(results: &[ScenarioResult]) -> Vec<[String; 8]> {
    let mut rows = Vec::new();
    for r in results {
        let s = &r.scenario;
        let mut push = |index: String, value: f64| {
            rows.push([
                s.design.to_string(),
                s.filter.clone(),
                format!("{}", s.sigma2),
                s.n.to_string(),
                index,
                format!("{value:.10}"),
                s.replications.to_string(),
                s.seed.to_string(),
            ]);
        };
        for (j, v) in r.component_rmse.iter().enumerate() {
            push((j + 1).to_string(), *v);
        }
        push("aggregate".into(), r.aggregate_rmse);
    }
    rows
}

pub fn write_table_csv<W: Write>(results: &[ScenarioResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Csv {
        path: "<table>".into(),
        message: e.to_string(),
    };
    w.write_record(TABLE_HEADER).map_err(err)?;
    for row in table_rows(results) {
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))
}

/// Column-aligned text rendering of the same table.
pub fn write_table_pretty<W: Write>(results: &[ScenarioResult], mut out: W) -> Result<()> {
    let rows = table_rows(results);
    let mut widths: Vec<usize> = TABLE_HEADER.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let io = |e| Error::io("<table>", e);
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    writeln!(out, "{}", line(TABLE_HEADER.to_vec())).map_err(io)?;
    for row in &rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect())).map_err(io)?;
    }
    Ok(())
}
