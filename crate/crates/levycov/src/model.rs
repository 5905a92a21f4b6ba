//! Bivariate Levy model class: Brownian covariance, copula-structured stable
//! jumps, and the numeric class-membership check.

use crate::error::{Error, Result};
use crate::num::{real, Real};
use crate::quad;

/// Correlated Brownian component of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianSpec<T> {
    pub sigma1: T,
    pub sigma2: T,
    pub rho: T,
}

impl<T: Real> BrownianSpec<T> {
    pub fn new(sigma1: T, sigma2: T, rho: T) -> Result<Self> {
        if !(sigma1 > T::zero()) || !sigma1.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma1 must be positive, got {sigma1:?}")));
        }
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma2 must be positive, got {sigma2:?}")));
        }
        if !(rho >= -T::one() && rho <= T::one()) {
            return Err(Error::InvalidParameter(format!("rho must lie in [-1, 1], got {rho:?}")));
        }
        let spec = Self { sigma1, sigma2, rho };
        debug_assert!(spec.covariance_determinant() >= -T::epsilon());
        Ok(spec)
    }

    /// Covariance matrix of the Brownian part at t = 1.
    pub fn covariance(&self) -> [[T; 2]; 2] {
        let c12 = self.rho * self.sigma1 * self.sigma2;
        [[self.sigma1 * self.sigma1, c12], [c12, self.sigma2 * self.sigma2]]
    }

    fn covariance_determinant(&self) -> T {
        let c = self.covariance();
        c[0][0] * c[1][1] - c[0][1] * c[1][0]
    }

    /// Maximum absolute row sum of the covariance matrix.
    pub fn covariance_inf_norm(&self) -> T {
        let c = self.covariance();
        let row0 = c[0][0].abs() + c[0][1].abs();
        let row1 = c[1][0].abs() + c[1][1].abs();
        row0.max(row1)
    }

    /// Constructs the spec from a target covariance matrix `[[a, b], [b, d]]`.
    pub fn from_covariance(a: T, b: T, d: T) -> Result<Self> {
        if !(a > T::zero() && d > T::zero()) {
            return Err(Error::InvalidParameter("diagonal covariance entries must be positive".into()));
        }
        let sigma1 = a.sqrt();
        let sigma2 = d.sqrt();
        Self::new(sigma1, sigma2, b / (sigma1 * sigma2))
    }
}

/// Stable jump component with a gamma-mixture Levy copula: weight `1 - gamma`
/// on completely dependent co-jumps, weight `gamma` on independent axis jumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableJumpSpec<T> {
    r1: T,
    r2: T,
    c1: T,
    c2: T,
    gamma: T,
    symmetric: bool,
    swapped: bool,
}

impl<T: Real> StableJumpSpec<T> {
    /// Components are reordered so that `r1 <= r2`; `swapped()` records it.
    pub fn new(r1: T, r2: T, c1: T, c2: T, gamma: T, symmetric: bool) -> Result<Self> {
        let two = real::<T>(2.0);
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !(r >= T::zero() && r < two) {
                return Err(Error::InvalidParameter(format!("{name} must lie in [0, 2), got {r:?}")));
            }
        }
        for (name, c) in [("c1", c1), ("c2", c2)] {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {c:?}")));
            }
        }
        if !(gamma >= T::zero() && gamma <= T::one()) {
            return Err(Error::InvalidParameter(format!("gamma must lie in [0, 1], got {gamma:?}")));
        }
        let swapped = r1 > r2;
        let (r1, r2, c1, c2) = if swapped { (r2, r1, c2, c1) } else { (r1, r2, c1, c2) };
        Ok(Self { r1, r2, c1, c2, gamma, symmetric, swapped })
    }

    pub fn r1(&self) -> T {
        self.r1
    }
    pub fn r2(&self) -> T {
        self.r2
    }
    pub fn c1(&self) -> T {
        self.c1
    }
    pub fn c2(&self) -> T {
        self.c2
    }
    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn symmetric(&self) -> bool {
        self.symmetric
    }
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Marginal tail integral `U_1(x) = c1 x^{-r1} / r1`; zero when `r1 = 0`
    /// (that component has no jumps).
    pub fn tail1(&self, x: T) -> T {
        tail(self.c1, self.r1, x)
    }

    /// Marginal tail integral `U_2(x) = c2 x^{-r2} / r2`.
    pub fn tail2(&self, x: T) -> T {
        tail(self.c2, self.r2, x)
    }

    pub fn has_cojumps(&self) -> bool {
        self.r1 > T::zero() && self.r2 > T::zero() && self.gamma < T::one()
    }

    /// Prefactor of the dependence graph `f(x) = graph_scale * x^{r1/r2}`.
    pub fn graph_scale(&self) -> Result<T> {
        if self.r1 <= T::zero() || self.r2 <= T::zero() {
            return Err(Error::Domain("dependence graph requires r1 > 0 and r2 > 0".into()));
        }
        let ratio = self.c1 * self.r2 / (self.r1 * self.c2);
        Ok(ratio.powf(-self.r2.recip()))
    }

    /// Smallest `x1` whose graph point `(x1, f(x1))` leaves the unit ball.
    pub fn unit_ball_exit(&self) -> Result<T> {
        let scale = self.graph_scale()?;
        let exponent = self.r1 / self.r2;
        let norm2 = |x: T| x * x + {
            let y = scale * x.powf(exponent);
            y * y
        };
        // f is strictly increasing, so the squared norm is too; bisect.
        let mut lo = real::<T>(1e-12);
        let mut hi = T::one();
        while norm2(hi) < T::one() {
            hi = hi + hi;
            if hi > real::<T>(1e12) {
                return Err(Error::Domain("unit ball exit point out of range".into()));
            }
        }
        for _ in 0..200 {
            let mid = real::<T>(0.5) * (lo + hi);
            if norm2(mid) < T::one() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(real::<T>(0.5) * (lo + hi))
    }

    /// Mass of the Levy measure outside the unit ball, in closed form from the
    /// stable tails: axis streams contribute `gamma (U1(1) + U2(1))`, the
    /// common stream `(1 - gamma) U1(x_b)` with `x_b` the unit-ball exit of
    /// the dependence graph.
    pub fn large_jump_mass(&self) -> Result<T> {
        let axis = self.gamma * (self.tail1(T::one()) + self.tail2(T::one()));
        let common = if self.has_cojumps() {
            (T::one() - self.gamma) * self.tail1(self.unit_ball_exit()?)
        } else {
            // with one marginal jump-free the only jumps sit on one axis
            (T::one() - self.gamma)
                * if self.r1 > T::zero() {
                    self.tail1(T::one())
                } else if self.r2 > T::zero() {
                    self.tail2(T::one())
                } else {
                    T::zero()
                }
        };
        Ok(axis + common)
    }
}

fn tail<T: Real>(c: T, r: T, x: T) -> T {
    if r <= T::zero() {
        T::zero()
    } else {
        c * x.powf(-r) / r
    }
}

/// Full generative description of the bivariate model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyModelSpec<T> {
    pub brownian: BrownianSpec<T>,
    pub jumps: Option<StableJumpSpec<T>>,
    pub drift: [T; 2],
}

impl<T: Real> LevyModelSpec<T> {
    pub fn new(brownian: BrownianSpec<T>, jumps: Option<StableJumpSpec<T>>) -> Self {
        Self { brownian, jumps, drift: [T::zero(); 2] }
    }

    /// The estimation target `C12 = rho sigma1 sigma2` at t = 1.
    pub fn true_cointegrated_volatility(&self) -> T {
        self.brownian.rho * self.brownian.sigma1 * self.brownian.sigma2
    }
}

/// Parameters of the estimation class: covariance-plus-co-jump bound `m` and
/// co-jump activity index `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams<T> {
    pub m: T,
    pub r: T,
}

impl<T: Real> ClassParams<T> {
    pub fn new(m: T, r: T) -> Result<Self> {
        if !(m > T::zero()) || !m.is_finite() {
            return Err(Error::InvalidParameter(format!("M must be positive, got {m:?}")));
        }
        if !(r >= T::zero() && r < real::<T>(2.0)) {
            return Err(Error::InvalidParameter(format!("r must lie in [0, 2), got {r:?}")));
        }
        Ok(Self { m, r })
    }
}

/// Lower bound on the co-jump activity index: `2 r1 r2 / (r1 + r2)`.
///
/// Defined as 0 by continuity when both indices vanish.
pub fn harmonic_mean_bound<T: Real>(r1: T, r2: T) -> T {
    if r1 == T::zero() && r2 == T::zero() {
        return T::zero();
    }
    real::<T>(2.0) * r1 * r2 / (r1 + r2)
}

/// Second coordinate of a common jump whose first coordinate is `x1`:
/// `f(x1) = U2^{-1}(U1(x1))`, strictly increasing.
pub fn dependence_graph<T: Real>(spec: &StableJumpSpec<T>, x1: T) -> Result<T> {
    if !(x1 > T::zero()) {
        return Err(Error::Domain(format!("dependence graph requires x1 > 0, got {x1:?}")));
    }
    Ok(spec.graph_scale()? * x1.powf(spec.r1() / spec.r2()))
}

/// Result of the co-jump moment integral; the divergent case carries the
/// analytically computed singularity exponent `p <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CojumpIntegral<T> {
    Convergent(T),
    Divergent { exponent: T },
}

impl<T: Real> CojumpIntegral<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Self::Convergent(v) => Some(*v),
            Self::Divergent { .. } => None,
        }
    }
    pub fn is_divergent(&self) -> bool {
        matches!(self, Self::Divergent { .. })
    }
}

/// Singularity exponent of the co-jump integrand at the origin:
/// `p = (1 + r1/r2)(r/2) - r1`; the integral converges iff `p > 0`.
pub fn cojump_exponent<T: Real>(spec: &StableJumpSpec<T>, r: T) -> T {
    (T::one() + spec.r1() / spec.r2()) * r * real::<T>(0.5) - spec.r1()
}

/// `(1 - gamma)`-weighted small co-jump moment
/// `int_0^eps (x f(x))^{r/2} c1 x^{-1-r1} dx`, computed by adaptive
/// quadrature after the power-law substitution `x = eps t^{1/p}`.
///
/// Divergence is declared from the sign of the exponent `p`, never inferred
/// from quadrature behavior.
pub fn cojump_integral<T: Real>(spec: &StableJumpSpec<T>, r: T, eps: T) -> Result<CojumpIntegral<T>> {
    if !(eps > T::zero() && eps <= T::one()) {
        return Err(Error::Domain(format!("eps must lie in (0, 1], got {eps:?}")));
    }
    if !(r >= T::zero() && r < real::<T>(2.0)) {
        return Err(Error::Domain(format!("r must lie in [0, 2), got {r:?}")));
    }
    if !spec.has_cojumps() {
        // independence copula or a jump-free marginal: no mass off the axes
        return Ok(CojumpIntegral::Convergent(T::zero()));
    }
    let p = cojump_exponent(spec, r);
    // the analytic boundary p = 0 can land a few ulps to either side when the
    // inputs sit exactly at the harmonic mean; absorb that into divergence
    if p <= real::<T>(1e-12) {
        return Ok(CojumpIntegral::Divergent { exponent: p });
    }
    let scale = spec.graph_scale()?;
    let c1 = spec.c1();
    let r1 = spec.r1();
    let half_r = r * real::<T>(0.5);
    let graph_exp = spec.r1() / spec.r2();
    let weight = T::one() - spec.gamma();

    // substitution x = eps t^{1/p} maps the power singularity to a smooth
    // integrand on (0, 1]
    let integrand = |t: T| {
        if t <= T::zero() {
            return T::zero();
        }
        let x = eps * t.powf(p.recip());
        let fx = scale * x.powf(graph_exp);
        let h = (x * fx).powf(half_r) * c1 * x.powf(-T::one() - r1);
        h * eps / p * t.powf(p.recip() - T::one())
    };
    let value = quad::integrate(&integrand, T::zero(), T::one(), real::<T>(1e-14), real::<T>(1e-10), 400)?;
    Ok(CojumpIntegral::Convergent(weight * value))
}

/// Outcome of the class-membership check against `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport<T> {
    pub covariance_norm: T,
    pub cojump_term: Option<T>,
    pub large_jump_mass: T,
    pub total: Option<T>,
    pub m: T,
    pub passes: bool,
    pub reason: Option<String>,
}

/// Checks `||SigmaSigma^T||_inf + small co-jump moment + large-jump mass <= M`.
pub fn check_class_membership<T: Real>(
    model: &LevyModelSpec<T>,
    params: &ClassParams<T>,
) -> Result<MembershipReport<T>> {
    let covariance_norm = model.brownian.covariance_inf_norm();
    let (cojump, mass) = match &model.jumps {
        None => (CojumpIntegral::Convergent(T::zero()), T::zero()),
        Some(spec) => (cojump_integral(spec, params.r, T::one())?, spec.large_jump_mass()?),
    };
    match cojump {
        CojumpIntegral::Divergent { exponent } => Ok(MembershipReport {
            covariance_norm,
            cojump_term: None,
            large_jump_mass: mass,
            total: None,
            m: params.m,
            passes: false,
            reason: Some(format!(
                "divergent co-jump integral: r below harmonic-mean bound (exponent p = {exponent:?})"
            )),
        }),
        CojumpIntegral::Convergent(v) => {
            let total = covariance_norm + v + mass;
            let passes = total <= params.m;
            Ok(MembershipReport {
                covariance_norm,
                cojump_term: Some(v),
                large_jump_mass: mass,
                total: Some(total),
                m: params.m,
                passes,
                reason: if passes {
                    None
                } else {
                    Some(format!("total {total:?} exceeds M = {:?}", params.m))
                },
            })
        }
    }
}
