//! JSON config documents and CSV import/export. All on-disk schemas are
//! fixed here; the core types stay serde-free and are validated on the way
//! in through `TryFrom` conversions.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::estimators::SpectralConfig;
use crate::harness::{BenchmarkReport, EstimatorConfig, ExperimentPlan, RateFit};
use crate::model::{BrownianSpec, ClassParams, LevyModelSpec, StableJumpSpec};
use crate::simulate::{JumpEvent, PathSample, SimulationConfig, SmallJumpPolicy};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn io_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::Io { path: path.display().to_string(), source }
}

// ---------------------------------------------------------------------------
// model spec document
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BrownianDoc {
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpsDoc {
    pub r1: f64,
    pub r2: f64,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub symmetric: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDoc {
    pub brownian: BrownianDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<JumpsDoc>,
    #[serde(default)]
    pub drift: [f64; 2],
}

impl TryFrom<&ModelDoc> for LevyModelSpec<f64> {
    type Error = Error;

    fn try_from(doc: &ModelDoc) -> Result<Self, Error> {
        let brownian = BrownianSpec::new(doc.brownian.sigma1, doc.brownian.sigma2, doc.brownian.rho)?;
        let jumps = doc
            .jumps
            .as_ref()
            .map(|j| StableJumpSpec::new(j.r1, j.r2, j.c1, j.c2, j.gamma, j.symmetric))
            .transpose()?;
        let mut model = LevyModelSpec::new(brownian, jumps);
        model.drift = doc.drift;
        Ok(model)
    }
}

impl From<&LevyModelSpec<f64>> for ModelDoc {
    fn from(model: &LevyModelSpec<f64>) -> Self {
        ModelDoc {
            brownian: BrownianDoc {
                sigma1: model.brownian.sigma1,
                sigma2: model.brownian.sigma2,
                rho: model.brownian.rho,
            },
            jumps: model.jumps.as_ref().map(|j| JumpsDoc {
                r1: j.r1(),
                r2: j.r2(),
                c1: j.c1(),
                c2: j.c2(),
                gamma: j.gamma(),
                symmetric: j.symmetric(),
            }),
            drift: model.drift,
        }
    }
}

// ---------------------------------------------------------------------------
// simulation / estimator / plan documents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallJumpPolicyDoc {
    Discard,
    GaussianApproximation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimDoc {
    #[serde(default = "default_eps")]
    pub jump_truncation_eps: f64,
    #[serde(default = "default_policy")]
    pub small_jump_policy: SmallJumpPolicyDoc,
    #[serde(default = "default_cap")]
    pub max_series_terms: usize,
}

fn default_eps() -> f64 {
    1e-5
}
fn default_policy() -> SmallJumpPolicyDoc {
    SmallJumpPolicyDoc::Discard
}
fn default_cap() -> usize {
    10_000_000
}

impl Default for SimDoc {
    fn default() -> Self {
        Self {
            jump_truncation_eps: default_eps(),
            small_jump_policy: default_policy(),
            max_series_terms: default_cap(),
        }
    }
}

impl From<&SimDoc> for SimulationConfig<f64> {
    fn from(doc: &SimDoc) -> Self {
        SimulationConfig {
            jump_truncation_eps: doc.jump_truncation_eps,
            small_jump_policy: match doc.small_jump_policy {
                SmallJumpPolicyDoc::Discard => SmallJumpPolicy::Discard,
                SmallJumpPolicyDoc::GaussianApproximation => SmallJumpPolicy::GaussianApproximation,
            },
            max_series_terms: doc.max_series_terms,
        }
    }
}

/// Estimator selector shared by the `estimate` config and benchmark plans:
/// `{"estimator": "spectral"|"trc"|"rc", "M":..., "r":..., "u_override":..., "u_exp":...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorDoc {
    pub estimator: String,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_exp: Option<f64>,
}

impl TryFrom<&EstimatorDoc> for EstimatorConfig<f64> {
    type Error = IoError;

    fn try_from(doc: &EstimatorDoc) -> IoResult<Self> {
        match doc.estimator.as_str() {
            "spectral" => {
                let m = doc.m.ok_or_else(|| IoError::Invalid("spectral estimator needs \"M\"".into()))?;
                let r = doc.r.ok_or_else(|| IoError::Invalid("spectral estimator needs \"r\"".into()))?;
                let params = ClassParams::new(m, r)?;
                let cfg = match doc.u_override {
                    Some(u) => SpectralConfig::with_u_override(params, u)?,
                    None => SpectralConfig::new(params),
                };
                Ok(EstimatorConfig::Spectral(cfg))
            }
            "trc" => {
                let u_exp = doc
                    .u_exp
                    .ok_or_else(|| IoError::Invalid("trc estimator needs \"u_exp\"".into()))?;
                Ok(EstimatorConfig::Trc { u_exp })
            }
            "rc" => Ok(EstimatorConfig::RealizedCovariance),
            other => Err(IoError::Invalid(format!(
                "unknown estimator {other:?}; expected \"spectral\", \"trc\" or \"rc\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanDoc {
    pub model: ModelDoc,
    #[serde(default)]
    pub sim: SimDoc,
    pub estimators: Vec<EstimatorDoc>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl TryFrom<&PlanDoc> for ExperimentPlan<f64> {
    type Error = IoError;

    fn try_from(doc: &PlanDoc) -> IoResult<Self> {
        let plan = ExperimentPlan {
            model: (&doc.model).try_into()?,
            sim_cfg: (&doc.sim).into(),
            estimators: doc
                .estimators
                .iter()
                .map(EstimatorConfig::try_from)
                .collect::<IoResult<Vec<_>>>()?,
            n_grid: doc.n_grid.clone(),
            replications: doc.replications,
            master_seed: doc.master_seed,
        };
        plan.validate()?;
        Ok(plan)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateDoc {
    pub model: ModelDoc,
    #[serde(default)]
    pub sim: SimDoc,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckClassDoc {
    pub model: ModelDoc,
    #[serde(rename = "M")]
    pub m: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateTargetDoc {
    pub estimator: String,
    pub r: f64,
    #[serde(default = "default_slope_tolerance")]
    pub slope_tolerance: f64,
}

fn default_slope_tolerance() -> f64 {
    0.15
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatesDoc {
    pub plan: PlanDoc,
    pub targets: Vec<RateTargetDoc>,
}

// ---------------------------------------------------------------------------
// result documents
// ---------------------------------------------------------------------------

/// `estimate` output: `{"value":..., "valid":..., "u_used":..., "n":...}`.
/// `value` is null when the estimate is invalid (JSON has no NaN).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateResultDoc {
    pub value: Option<f64>,
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_used: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RateFitDoc {
    pub estimator: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted_exponent: f64,
    pub slope_tolerance: f64,
    pub pass: bool,
}

impl RateFitDoc {
    pub fn new(estimator: &str, fit: &RateFit) -> Self {
        Self {
            estimator: estimator.to_string(),
            slope: fit.slope,
            intercept: fit.intercept,
            r_squared: fit.r_squared,
            predicted_exponent: fit.predicted_exponent,
            slope_tolerance: fit.tolerance,
            pass: fit.pass,
        }
    }
}

/// JSON sidecar of a benchmark report: plan echo for provenance, the applied
/// seed, and any rate fits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSidecarDoc {
    pub plan: PlanDoc,
    pub true_c12: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rate_fits: Vec<RateFitDoc>,
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> IoResult<T> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| io_err(path, e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV schemas
// ---------------------------------------------------------------------------

/// Writes increments as `j,dx1,dx2`, one row per increment, j starting at 1.
pub fn write_increments_csv(path: &Path, sample: &PathSample<f64>) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["j", "dx1", "dx2"])?;
    for (j, inc) in sample.increments.iter().enumerate() {
        w.write_record([(j + 1).to_string(), inc[0].to_string(), inc[1].to_string()])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn read_increments_csv(path: &Path) -> IoResult<PathSample<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["j", "dx1", "dx2"] {
        return Err(IoError::Invalid(format!(
            "expected increments header \"j,dx1,dx2\", got {headers:?}"
        )));
    }
    let mut increments = Vec::new();
    for record in r.records() {
        let record = record?;
        let parse = |idx: usize| -> IoResult<f64> {
            record
                .get(idx)
                .ok_or_else(|| IoError::Invalid("short CSV record".into()))?
                .parse::<f64>()
                .map_err(|e| IoError::Invalid(format!("bad number in increments CSV: {e}")))
        };
        increments.push([parse(1)?, parse(2)?]);
    }
    if increments.is_empty() {
        return Err(IoError::Invalid("increments CSV contains no rows".into()));
    }
    Ok(PathSample::from_increments(increments, 0))
}

/// Writes the jump log as `t,size1,size2,kind`.
pub fn write_jump_log_csv(path: &Path, log: &[JumpEvent<f64>]) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "size1", "size2", "kind"])?;
    for e in log {
        w.write_record([
            e.time.to_string(),
            e.size1.to_string(),
            e.size2.to_string(),
            e.kind.as_str().to_string(),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Writes per-cell statistics as
/// `estimator,n,replications,mean,bias,sd,rmse,invalid`.
pub fn write_report_csv(path: &Path, report: &BenchmarkReport) -> IoResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["estimator", "n", "replications", "mean", "bias", "sd", "rmse", "invalid"])?;
    for c in &report.cells {
        w.write_record([
            c.estimator.to_string(),
            c.n.to_string(),
            c.replications.to_string(),
            c.mean.to_string(),
            c.bias.to_string(),
            c.sd.to_string(),
            c.rmse.to_string(),
            c.invalid.to_string(),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Writes retained raw estimates as `estimator,n,rep,value`.
pub fn write_raw_csv(path: &Path, report: &BenchmarkReport) -> IoResult<()> {
    let raw = report
        .raw
        .as_ref()
        .ok_or_else(|| IoError::Invalid("report does not retain raw estimates".into()))?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["estimator", "n", "rep", "value"])?;
    for e in raw {
        w.write_record([
            e.estimator.to_string(),
            e.n.to_string(),
            e.replication.to_string(),
            e.value.to_string(),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}
