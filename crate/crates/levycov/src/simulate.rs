//! Path generation: correlated Brownian increments plus copula-structured
//! stable jumps via the inverse-tail series representation.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{dependence_graph, BrownianSpec, LevyModelSpec, StableJumpSpec};
use crate::num::{real, Real};
use crate::rng::{derive_stream, StreamTag};

/// What to do with series terms below the truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmallJumpPolicy {
    #[default]
    Discard,
    /// Asmussen-Rosinski style: add a centered normal with the variance of
    /// the discarded terms.
    GaussianApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig<T> {
    /// Series terms with magnitude below this level follow `small_jump_policy`.
    pub jump_truncation_eps: T,
    pub small_jump_policy: SmallJumpPolicy,
    /// Hard cap on series length; exceeding it is an error, never a silent bias.
    pub max_series_terms: usize,
}

impl<T: Real> Default for SimulationConfig<T> {
    fn default() -> Self {
        Self {
            jump_truncation_eps: real(1e-5),
            small_jump_policy: SmallJumpPolicy::Discard,
            max_series_terms: 10_000_000,
        }
    }
}

impl<T: Real> SimulationConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.jump_truncation_eps > T::zero()) {
            return Err(Error::InvalidParameter("jump_truncation_eps must be positive".into()));
        }
        if self.max_series_terms == 0 {
            return Err(Error::InvalidParameter("max_series_terms must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    Common,
    Axis1,
    Axis2,
}

impl JumpKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            JumpKind::Common => "common",
            JumpKind::Axis1 => "axis1",
            JumpKind::Axis2 => "axis2",
        }
    }
}

/// One logged jump above the truncation level (signed sizes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent<T> {
    pub time: T,
    pub size1: T,
    pub size2: T,
    pub kind: JumpKind,
}

/// Discrete observations of one path: `n` increments on the mesh `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<T> {
    pub n: usize,
    pub increments: Vec<[T; 2]>,
    pub seed: u64,
    pub model: Option<LevyModelSpec<T>>,
    pub jump_log: Vec<JumpEvent<T>>,
}

impl<T: Real> PathSample<T> {
    /// Wraps externally provided increments (e.g. read from CSV).
    pub fn from_increments(increments: Vec<[T; 2]>, seed: u64) -> Self {
        Self { n: increments.len(), increments, seed, model: None, jump_log: Vec::new() }
    }

    /// Terminal value per coordinate.
    pub fn terminal(&self) -> [T; 2] {
        self.increments.iter().fold([T::zero(); 2], |acc, inc| [acc[0] + inc[0], acc[1] + inc[1]])
    }
}

/// Correlated Brownian increments: row j is
/// `(sigma1 sqrt(1/n) Z1, sigma2 sqrt(1/n) (rho Z1 + sqrt(1-rho^2) Z3))`.
pub fn simulate_brownian<T: Real, R: Rng>(
    brownian: &BrownianSpec<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<[T; 2]>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let sqrt_dt = real::<T>(1.0 / n as f64).sqrt();
    let orth = (T::one() - brownian.rho * brownian.rho).sqrt();
    let mut increments = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: T = real(rng.sample::<f64, _>(StandardNormal));
        let z3: T = real(rng.sample::<f64, _>(StandardNormal));
        increments.push([
            brownian.sigma1 * sqrt_dt * z1,
            brownian.sigma2 * sqrt_dt * (brownian.rho * z1 + orth * z3),
        ]);
    }
    Ok(increments)
}

struct StreamDef<T> {
    kind: JumpKind,
    /// tail weight: count of jumps with first-listed size above x is Poisson
    /// with mean `weight * c * x^{-r} / r`
    weight: T,
    c: T,
    r: T,
}

/// Jump increments for one path, binned to the mesh, plus the jump log.
///
/// Three independent Poissonian streams: common jumps with tail
/// `(1-gamma) U1` (second coordinate on the dependence graph, shared time
/// and sign), axis-1 jumps with tail `gamma U1`, axis-2 jumps with tail
/// `gamma U2`. Sizes come from inverting the tail at unit-rate Poisson
/// arrivals; times are i.i.d. uniform on [0, 1].
pub fn simulate_stable_jumps<T: Real, R: Rng>(
    jumps: &StableJumpSpec<T>,
    cfg: &SimulationConfig<T>,
    n: usize,
    rng: &mut R,
) -> Result<(Vec<[T; 2]>, Vec<JumpEvent<T>>)> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !jumps.symmetric() && (jumps.r1() >= T::one() || jumps.r2() >= T::one()) {
        return Err(Error::OneSidedInfiniteVariation);
    }

    let one = T::one();
    let streams = [
        StreamDef { kind: JumpKind::Common, weight: one - jumps.gamma(), c: jumps.c1(), r: jumps.r1() },
        StreamDef { kind: JumpKind::Axis1, weight: jumps.gamma(), c: jumps.c1(), r: jumps.r1() },
        StreamDef { kind: JumpKind::Axis2, weight: jumps.gamma(), c: jumps.c2(), r: jumps.r2() },
    ];

    let mut increments = vec![[T::zero(); 2]; n];
    let mut log = Vec::new();
    let n_t = real::<T>(n as f64);

    for stream in &streams {
        if stream.weight <= T::zero() || stream.r <= T::zero() {
            continue;
        }
        if stream.kind == JumpKind::Common && !jumps.has_cojumps() {
            continue;
        }
        let rate = stream.weight * stream.c / stream.r;
        let mut arrival = T::zero();
        let mut terms = 0usize;
        loop {
            arrival += real::<T>(rng.sample::<f64, _>(Exp1));
            // invert the tail: x with weight * U(x) = arrival
            let x = (rate / arrival).powf(stream.r.recip());
            if x < cfg.jump_truncation_eps {
                break;
            }
            terms += 1;
            if terms > cfg.max_series_terms {
                return Err(Error::SeriesCapExceeded {
                    stream: stream.kind.as_str(),
                    terms: cfg.max_series_terms,
                });
            }
            let time: T = real(rng.random::<f64>());
            let sign = if jumps.symmetric() {
                if rng.random::<bool>() {
                    one
                } else {
                    -one
                }
            } else {
                one
            };
            let (size1, size2) = match stream.kind {
                JumpKind::Common => (sign * x, sign * dependence_graph(jumps, x)?),
                JumpKind::Axis1 => (sign * x, T::zero()),
                JumpKind::Axis2 => (T::zero(), sign * x),
            };
            let bin = (time * n_t).to_usize().unwrap_or(0).min(n - 1);
            increments[bin][0] += size1;
            increments[bin][1] += size2;
            log.push(JumpEvent { time, size1, size2, kind: stream.kind });
        }
    }

    if cfg.small_jump_policy == SmallJumpPolicy::GaussianApproximation {
        add_small_jump_gaussian(jumps, cfg, &mut increments, rng)?;
    }

    Ok((increments, log))
}

/// Centered bivariate normal per increment with the covariance of the
/// discarded sub-threshold series terms.
fn add_small_jump_gaussian<T: Real, R: Rng>(
    jumps: &StableJumpSpec<T>,
    cfg: &SimulationConfig<T>,
    increments: &mut [[T; 2]],
    rng: &mut R,
) -> Result<()> {
    let eps = cfg.jump_truncation_eps;
    let one = T::one();
    let two = real::<T>(2.0);
    let w = one - jumps.gamma();
    let moment = |c: T, exponent: T| -> T {
        // int_0^eps x^{exponent} c x^{-1-r} dx with the power collected in `exponent`
        c * eps.powf(exponent) / exponent
    };

    let mut var1 = T::zero();
    let mut var2 = T::zero();
    let mut cov = T::zero();
    if jumps.has_cojumps() {
        let scale = jumps.graph_scale()?;
        let g = jumps.r1() / jumps.r2();
        var1 += w * moment(jumps.c1(), two - jumps.r1());
        var2 += w * scale * scale * moment(jumps.c1(), two * g - jumps.r1());
        cov += w * scale * moment(jumps.c1(), one + g - jumps.r1());
    }
    if jumps.gamma() > T::zero() {
        if jumps.r1() > T::zero() {
            var1 += jumps.gamma() * moment(jumps.c1(), two - jumps.r1());
        }
        if jumps.r2() > T::zero() {
            var2 += jumps.gamma() * moment(jumps.c2(), two - jumps.r2());
        }
    }
    if var1 <= T::zero() && var2 <= T::zero() {
        return Ok(());
    }

    let n_inv = real::<T>(1.0 / increments.len() as f64);
    // Cholesky factor of [[var1, cov], [cov, var2]]
    let l11 = var1.max(T::zero()).sqrt();
    let (l21, l22) = if l11 > T::zero() {
        let l21 = cov / l11;
        (l21, (var2 - l21 * l21).max(T::zero()).sqrt())
    } else {
        (T::zero(), var2.max(T::zero()).sqrt())
    };
    let s = n_inv.sqrt();
    for inc in increments.iter_mut() {
        let z1: T = real(rng.sample::<f64, _>(StandardNormal));
        let z2: T = real(rng.sample::<f64, _>(StandardNormal));
        inc[0] += s * l11 * z1;
        inc[1] += s * (l21 * z1 + l22 * z2);
    }
    Ok(())
}

/// Full path: Brownian plus jumps plus drift, deterministic in
/// `(model, cfg, n, seed)`.
pub fn simulate_path<T: Real>(
    model: &LevyModelSpec<T>,
    cfg: &SimulationConfig<T>,
    n: usize,
    seed: u64,
) -> Result<PathSample<T>> {
    simulate_path_stream(model, cfg, n, seed, 0)
}

/// Like [`simulate_path`] with an explicit replication counter for the
/// benchmark harness's sub-stream derivation.
pub fn simulate_path_stream<T: Real>(
    model: &LevyModelSpec<T>,
    cfg: &SimulationConfig<T>,
    n: usize,
    seed: u64,
    replication: u64,
) -> Result<PathSample<T>> {
    cfg.validate()?;
    let mut brownian_rng = derive_stream(seed, replication, StreamTag::Brownian);
    let mut increments = simulate_brownian(&model.brownian, n, &mut brownian_rng)?;

    let jump_log = if let Some(jumps) = &model.jumps {
        let mut jump_rng = derive_stream(seed, replication, StreamTag::Jumps);
        let (jump_increments, log) = simulate_stable_jumps(jumps, cfg, n, &mut jump_rng)?;
        for (inc, j) in increments.iter_mut().zip(jump_increments) {
            inc[0] += j[0];
            inc[1] += j[1];
        }
        log
    } else {
        Vec::new()
    };

    let dt = real::<T>(1.0 / n as f64);
    if model.drift != [T::zero(); 2] {
        for inc in increments.iter_mut() {
            inc[0] += model.drift[0] * dt;
            inc[1] += model.drift[1] * dt;
        }
    }

    Ok(PathSample { n, increments, seed, model: Some(*model), jump_log })
}
