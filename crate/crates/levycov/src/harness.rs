//! Monte Carlo orchestration: replication runs, bias/RMSE statistics,
//! convergence-rate slope fits, and the deterministic-error diagnostic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{
    realized_covariance, spectral_estimate, trc_estimate, SpectralConfig, TrcConfig,
};
use crate::model::{check_class_membership, ClassParams, LevyModelSpec};
use crate::num::{as_f64, Real};
use crate::quad;
use crate::simulate::{simulate_path_stream, PathSample, SimulationConfig};

/// One estimator to run in a benchmark cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorConfig<T> {
    Spectral(SpectralConfig<T>),
    Trc { u_exp: T },
    RealizedCovariance,
}

impl<T: Real> EstimatorConfig<T> {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorConfig::Spectral(_) => "spectral",
            EstimatorConfig::Trc { .. } => "trc",
            EstimatorConfig::RealizedCovariance => "rc",
        }
    }

    /// NaN marks an invalid spectral estimate.
    fn apply(&self, sample: &PathSample<T>) -> Result<T> {
        match self {
            EstimatorConfig::Spectral(cfg) => Ok(spectral_estimate(sample, cfg)?.value),
            EstimatorConfig::Trc { u_exp } => {
                let cfg = TrcConfig::for_sample_size(sample.n, *u_exp)?;
                Ok(trc_estimate(sample, &cfg))
            }
            EstimatorConfig::RealizedCovariance => Ok(realized_covariance(sample)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan<T> {
    pub model: LevyModelSpec<T>,
    pub sim_cfg: SimulationConfig<T>,
    pub estimators: Vec<EstimatorConfig<T>>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl<T: Real> ExperimentPlan<T> {
    pub fn validate(&self) -> Result<()> {
        self.sim_cfg.validate()?;
        if self.replications < 2 {
            return Err(Error::InvalidParameter("replications must be at least 2".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidParameter("estimator set must not be empty".into()));
        }
        if self.n_grid.is_empty() || !self.n_grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("n_grid must be non-empty and strictly increasing".into()));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::InvalidParameter("all n in n_grid must be at least 2".into()));
        }
        Ok(())
    }
}

/// Replication statistics for one (estimator, n) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub estimator: &'static str,
    pub n: usize,
    pub replications: usize,
    pub mean: f64,
    pub bias: f64,
    pub sd: f64,
    pub rmse: f64,
    /// Spectral validity failures, excluded from the statistics above.
    pub invalid: usize,
    /// Set when more than half the replications were invalid.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawEstimate {
    pub estimator: &'static str,
    pub n: usize,
    pub replication: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub true_c12: f64,
    pub cells: Vec<CellStats>,
    pub raw: Option<Vec<RawEstimate>>,
}

impl BenchmarkReport {
    pub fn cell(&self, estimator: &str, n: usize) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.estimator == estimator && c.n == n)
    }

    /// RMSE per grid point for one estimator, in grid order.
    pub fn rmse_curve(&self, estimator: &str) -> Vec<(usize, f64)> {
        self.cells
            .iter()
            .filter(|c| c.estimator == estimator)
            .map(|c| (c.n, c.rmse))
            .collect()
    }
}

/// Runs the full plan. Paths are shared across estimators within a cell
/// (common random numbers); across n and replications the paths are fresh,
/// with sub-streams derived from `(master_seed, cell, replication)` so the
/// report is independent of scheduling.
pub fn run_experiment<T: Real>(plan: &ExperimentPlan<T>, force: bool, keep_raw: bool) -> Result<BenchmarkReport> {
    plan.validate()?;
    if !force {
        for est in &plan.estimators {
            if let EstimatorConfig::Spectral(cfg) = est {
                let report = check_class_membership(&plan.model, &cfg.class_params)?;
                if !report.passes {
                    return Err(Error::ClassMembership(
                        report.reason.unwrap_or_else(|| "model outside the class".into()),
                    ));
                }
            }
        }
    }

    let true_c12 = as_f64(plan.model.true_cointegrated_volatility());
    let mut cells = Vec::new();
    let mut raw = keep_raw.then(Vec::new);

    for (cell_idx, &n) in plan.n_grid.iter().enumerate() {
        // one row of estimates per replication, all estimators on one path
        let rows: Result<Vec<Vec<f64>>> = (0..plan.replications)
            .into_par_iter()
            .map(|rep| {
                let counter = (cell_idx as u64) << 32 | rep as u64;
                let path =
                    simulate_path_stream(&plan.model, &plan.sim_cfg, n, plan.master_seed, counter)?;
                plan.estimators.iter().map(|est| est.apply(&path).map(as_f64)).collect()
            })
            .collect();
        let rows = rows?;

        for (est_idx, est) in plan.estimators.iter().enumerate() {
            let values: Vec<f64> = rows.iter().map(|row| row[est_idx]).collect();
            if let Some(raw) = raw.as_mut() {
                raw.extend(values.iter().enumerate().map(|(rep, &value)| RawEstimate {
                    estimator: est.name(),
                    n,
                    replication: rep,
                    value,
                }));
            }
            cells.push(cell_stats(est.name(), n, &values, true_c12));
        }
    }

    Ok(BenchmarkReport { true_c12, cells, raw })
}

fn cell_stats(estimator: &'static str, n: usize, values: &[f64], true_c12: f64) -> CellStats {
    let valid: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let invalid = values.len() - valid.len();
    let r = valid.len() as f64;
    let (mean, bias, sd, rmse) = if valid.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean = valid.iter().sum::<f64>() / r;
        let bias = mean - true_c12;
        let var = if valid.len() > 1 {
            valid.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        let rmse = (valid.iter().map(|v| (v - true_c12).powi(2)).sum::<f64>() / r).sqrt();
        (mean, bias, var.sqrt(), rmse)
    };
    CellStats {
        estimator,
        n,
        replications: valid.len(),
        mean,
        bias,
        sd,
        rmse,
        invalid,
        flagged: invalid * 2 > values.len(),
    }
}

/// Minimax-rate prediction for the spectral estimator: exponent `-1/2` for
/// `r <= 1` (fit against `log n`), `(r - 2)/2` for `r > 1` (fit against
/// `log(n log n)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTarget {
    pub r: f64,
    pub predicted_exponent: f64,
}

impl RateTarget {
    pub fn for_activity_index(r: f64) -> Self {
        let predicted_exponent = if r <= 1.0 { -0.5 } else { (r - 2.0) / 2.0 };
        Self { r, predicted_exponent }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted_exponent: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// OLS of log RMSE on the rate predictor over the grid.
pub fn fit_rate(curve: &[(usize, f64)], target: RateTarget, tolerance: f64) -> Result<RateFit> {
    if curve.len() < 3 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 3 grid points, got {}",
            curve.len()
        )));
    }
    let xs: Vec<f64> = curve
        .iter()
        .map(|&(n, _)| {
            let n = n as f64;
            if target.r <= 1.0 {
                n.ln()
            } else {
                (n * n.ln()).ln()
            }
        })
        .collect();
    let ys: Vec<f64> = curve.iter().map(|&(_, rmse)| rmse.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::DegenerateRegression("non-finite log RMSE".into()));
    }
    let (slope, intercept, r_squared) = ols(&xs, &ys)?;
    let pass = (slope - target.predicted_exponent).abs() <= tolerance;
    Ok(RateFit { slope, intercept, r_squared, predicted_exponent: target.predicted_exponent, tolerance, pass })
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateRegression("zero variance in predictor".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok((slope, intercept, r_squared))
}

/// Deterministic error `D_n` at frequency `U` together with its theoretical
/// bound `(2^{r/2} M / 2) U^{r-2} + A U^{-2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicErrorDiagnostic {
    pub u: f64,
    /// Quadrature value of the co-jump integral over the finite window.
    pub d_n: f64,
    /// Certified bound on the truncated oscillatory tail; `|D_n|` lies within
    /// `|d_n| +- tail_bound`.
    pub tail_bound: f64,
    pub bound: f64,
    pub large_jump_mass: f64,
}

impl DeterministicErrorDiagnostic {
    /// Worst-case |D_n| accounting for the truncated tail.
    pub fn d_n_abs_upper(&self) -> f64 {
        self.d_n.abs() + self.tail_bound
    }

    pub fn within_bound(&self) -> bool {
        self.d_n_abs_upper() <= self.bound
    }
}

/// Computes `D_n = (1/4U^2) int (cos<u~,x> - cos<u,x>) F(dx)` by 1-D
/// quadrature along the dependence graph (axis jumps contribute zero), and
/// the bound with `A` the large-jump mass. The oscillatory tail beyond the
/// integration window is bounded analytically and reported separately.
pub fn deterministic_error_diagnostic<T: Real>(
    model: &LevyModelSpec<T>,
    params: &ClassParams<T>,
    u: T,
) -> Result<DeterministicErrorDiagnostic> {
    if !(u > T::zero()) {
        return Err(Error::Domain(format!("U must be positive, got {u:?}")));
    }
    let jumps = model
        .jumps
        .as_ref()
        .ok_or_else(|| Error::Domain("diagnostic requires a jump component".into()))?;
    let uf = as_f64(u);
    let m = as_f64(params.m);
    let r = as_f64(params.r);
    let mass = as_f64(jumps.large_jump_mass()?);
    let bound = 2f64.powf(r / 2.0) * m / 2.0 * uf.powf(r - 2.0) + mass * uf.powi(-2);

    if !jumps.has_cojumps() {
        // independence copula: the integrand vanishes on the axes
        return Ok(DeterministicErrorDiagnostic { u: uf, d_n: 0.0, tail_bound: 0.0, bound, large_jump_mass: mass });
    }

    let weight = 1.0 - as_f64(jumps.gamma());
    let c1 = as_f64(jumps.c1());
    let r1 = as_f64(jumps.r1());
    let scale = as_f64(jumps.graph_scale()?);
    let graph_exp = as_f64(jumps.r1() / jumps.r2());
    let f = |x: f64| scale * x.powf(graph_exp);
    let osc = |x: f64| {
        ((uf * (x - f(x))).cos() - (uf * (x + f(x))).cos()) * c1 * x.powf(-1.0 - r1)
    };

    // near the origin the integrand behaves like x^{a-1} with
    // a = 1 + r1/r2 - r1 > 0; substitute x = x_b t^{1/a} to smooth it out
    let xb = as_f64(jumps.unit_ball_exit()?);
    let a = 1.0 + graph_exp - r1;
    let inner = quad::integrate(
        &|t: f64| {
            if t <= 0.0 {
                return 0.0;
            }
            let x = xb * t.powf(1.0 / a);
            osc(x) * xb / a * t.powf(1.0 / a - 1.0)
        },
        0.0,
        1.0,
        1e-12,
        1e-8,
        // large U packs many oscillations into the window; give the
        // subdivision budget room to resolve them
        50_000,
    )?;

    // extend past the unit ball one half-period at a time until the analytic
    // remainder |tail| <= 2 * weight * U1(X) is negligible against the bound
    let mut total = inner;
    let mut x = xb;
    let half_period = std::f64::consts::PI / uf;
    let tail_mass = |x: f64| 2.0 * weight * c1 * x.powf(-r1) / r1;
    let target = 1e-6 * bound * 4.0 * uf * uf;
    let mut chunks = 0usize;
    while tail_mass(x) > target && chunks < 200_000 {
        let (v, _) = quad::qk15(&osc, x, x + half_period);
        total += v;
        x += half_period;
        chunks += 1;
    }

    let d_n = weight * total / (4.0 * uf * uf);
    let tail_bound = tail_mass(x) / (4.0 * uf * uf);
    Ok(DeterministicErrorDiagnostic { u: uf, d_n, tail_bound, bound, large_jump_mass: mass })
}
