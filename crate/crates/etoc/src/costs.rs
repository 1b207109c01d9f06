//! Local convex cost functions with analytic derivatives, estimated curvature
//! bounds, and the centralized optimum oracle for the global cost
//! `f(s) = sum_i f_i(s)`.
//!
//! Curvature bounds are estimated on a working interval rather than globally:
//! one of the builtin costs has an unbounded second derivative in the large,
//! and the simulations only ever visit a bounded range.

use thiserror::Error;

/// Default working interval for curvature estimation; covers the reference
/// scenario's initial-condition range with margin.
pub const DEFAULT_WORKING_INTERVAL: (f64, f64) = (-50.0, 50.0);
/// Default grid size for curvature estimation.
pub const DEFAULT_CURVATURE_GRID: usize = 2001;

#[derive(Debug, Error)]
pub enum CostError {
    #[error("unknown cost function '{0}'")]
    UnknownName(String),
    #[error("cost '{name}' expects {expected}, got {got} parameter(s)")]
    BadParams { name: String, expected: &'static str, got: usize },
    #[error("quadratic curvature must be positive, got {0}")]
    NonPositiveCurvature(f64),
    #[error("invalid interval [{0}, {1}]")]
    BadInterval(f64, f64),
    #[error("curvature grid must have at least 2 points, got {0}")]
    BadGrid(usize),
    #[error("non-finite Hessian sample at s = {0}")]
    NonFiniteHessian(f64),
    #[error("optimum bracket expansion failed: gradient has no sign change within +-{0}")]
    BracketFailure(f64),
    #[error("cost ensemble must be non-empty")]
    EmptyEnsemble,
}

/// Analytic form of a builtin cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostKind {
    /// `a/2 * (s - b)^2`
    Quadratic { a: f64, b: f64 },
    /// `1/2 * (s - 2)^2`
    PaperF1,
    /// `s^2 ln(1 + s^2) + (s + 1)^2`
    PaperF2,
    /// `ln(e^{-0.1 s} + e^{0.3 s}) + s^2`
    PaperF3,
    /// `s^2 / (25 sqrt(s^2 + 1)) + (s - 3)^2`
    PaperF4,
}

impl CostKind {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            CostKind::Quadratic { a, b } => 0.5 * a * (s - b) * (s - b),
            CostKind::PaperF1 => 0.5 * (s - 2.0) * (s - 2.0),
            CostKind::PaperF2 => s * s * (1.0 + s * s).ln() + (s + 1.0) * (s + 1.0),
            CostKind::PaperF3 => log_sum_exp(-0.1 * s, 0.3 * s) + s * s,
            CostKind::PaperF4 => s * s / (25.0 * (s * s + 1.0).sqrt()) + (s - 3.0) * (s - 3.0),
        }
    }

    pub fn gradient(&self, s: f64) -> f64 {
        match *self {
            CostKind::Quadratic { a, b } => a * (s - b),
            CostKind::PaperF1 => s - 2.0,
            CostKind::PaperF2 => {
                let q = 1.0 + s * s;
                2.0 * s * q.ln() + 2.0 * s * s * s / q + 2.0 * (s + 1.0)
            }
            CostKind::PaperF3 => {
                // softmax weight of the 0.3 s exponent, computed stably
                let sigma_b = 1.0 / (1.0 + (-0.4 * s).exp());
                -0.1 * (1.0 - sigma_b) + 0.3 * sigma_b + 2.0 * s
            }
            CostKind::PaperF4 => {
                let q = 1.0 + s * s;
                s * (s * s + 2.0) / (25.0 * q.powf(1.5)) + 2.0 * (s - 3.0)
            }
        }
    }

    pub fn hessian(&self, s: f64) -> f64 {
        match *self {
            CostKind::Quadratic { a, .. } => a,
            CostKind::PaperF1 => 1.0,
            CostKind::PaperF2 => {
                let q = 1.0 + s * s;
                2.0 * q.ln() + 4.0 * s * s / q + (6.0 * s * s + 2.0 * s.powi(4)) / (q * q) + 2.0
            }
            CostKind::PaperF3 => {
                let sigma_b = 1.0 / (1.0 + (-0.4 * s).exp());
                0.16 * sigma_b * (1.0 - sigma_b) + 2.0
            }
            CostKind::PaperF4 => {
                let q = 1.0 + s * s;
                (2.0 - s * s) / (25.0 * q.powf(2.5)) + 2.0
            }
        }
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// A local cost with analytic derivatives and curvature bounds estimated on
/// the working interval.
#[derive(Debug, Clone)]
pub struct CostFunction {
    pub kind: CostKind,
    pub h_lo: f64,
    pub h_hi: f64,
    pub label: String,
}

impl CostFunction {
    pub fn new(kind: CostKind, label: impl Into<String>) -> Result<Self, CostError> {
        Self::with_interval(kind, label, DEFAULT_WORKING_INTERVAL, DEFAULT_CURVATURE_GRID)
    }

    pub fn with_interval(
        kind: CostKind,
        label: impl Into<String>,
        interval: (f64, f64),
        grid: usize,
    ) -> Result<Self, CostError> {
        let (h_lo, h_hi) = curvature_bounds_of_kind(&kind, interval, grid)?;
        Ok(Self { kind, h_lo, h_hi, label: label.into() })
    }

    pub fn value(&self, s: f64) -> f64 {
        self.kind.value(s)
    }

    pub fn gradient(&self, s: f64) -> f64 {
        self.kind.gradient(s)
    }

    pub fn hessian(&self, s: f64) -> f64 {
        self.kind.hessian(s)
    }
}

/// Builds a named builtin cost. `quadratic` takes `[a, b]`; the paper
/// functions take no parameters. Bounds use the default working interval.
pub fn builtin_cost(name: &str, params: &[f64]) -> Result<CostFunction, CostError> {
    builtin_cost_on(name, params, DEFAULT_WORKING_INTERVAL, DEFAULT_CURVATURE_GRID)
}

/// As [`builtin_cost`] with an explicit working interval and grid.
pub fn builtin_cost_on(
    name: &str,
    params: &[f64],
    interval: (f64, f64),
    grid: usize,
) -> Result<CostFunction, CostError> {
    let expect_none = |kind: CostKind| -> Result<CostKind, CostError> {
        if params.is_empty() {
            Ok(kind)
        } else {
            Err(CostError::BadParams { name: name.into(), expected: "none", got: params.len() })
        }
    };
    let kind = match name {
        "quadratic" => {
            if params.len() != 2 {
                return Err(CostError::BadParams {
                    name: name.into(),
                    expected: "[a, b]",
                    got: params.len(),
                });
            }
            if !(params[0] > 0.0) {
                return Err(CostError::NonPositiveCurvature(params[0]));
            }
            CostKind::Quadratic { a: params[0], b: params[1] }
        }
        "paper_f1" => expect_none(CostKind::PaperF1)?,
        "paper_f2" => expect_none(CostKind::PaperF2)?,
        "paper_f3" => expect_none(CostKind::PaperF3)?,
        "paper_f4" => expect_none(CostKind::PaperF4)?,
        other => return Err(CostError::UnknownName(other.into())),
    };
    CostFunction::with_interval(kind, name, interval, grid)
}

/// Min/max of the Hessian over a uniform grid on `[lo, hi]`. A non-positive
/// minimum is clamped to a tiny positive value so downstream strong-convexity
/// formulas stay well defined.
pub fn estimate_curvature_bounds(
    cost: &CostFunction,
    interval: (f64, f64),
    grid: usize,
) -> Result<(f64, f64), CostError> {
    curvature_bounds_of_kind(&cost.kind, interval, grid)
}

fn curvature_bounds_of_kind(
    kind: &CostKind,
    (lo, hi): (f64, f64),
    grid: usize,
) -> Result<(f64, f64), CostError> {
    if !(lo < hi) {
        return Err(CostError::BadInterval(lo, hi));
    }
    if grid < 2 {
        return Err(CostError::BadGrid(grid));
    }
    let mut h_lo = f64::INFINITY;
    let mut h_hi = f64::NEG_INFINITY;
    for k in 0..grid {
        let s = lo + (hi - lo) * k as f64 / (grid - 1) as f64;
        let h = kind.hessian(s);
        if !h.is_finite() {
            return Err(CostError::NonFiniteHessian(s));
        }
        h_lo = h_lo.min(h);
        h_hi = h_hi.max(h);
    }
    Ok((h_lo.max(f64::MIN_POSITIVE), h_hi))
}

/// The agents' costs together with the aggregate curvature bounds
/// `h_lo_min = min_i h_lo_i` and `h_hi_max = max_i h_hi_i`.
#[derive(Debug, Clone)]
pub struct CostEnsemble {
    pub costs: Vec<CostFunction>,
    pub h_lo_min: f64,
    pub h_hi_max: f64,
}

impl CostEnsemble {
    pub fn new(costs: Vec<CostFunction>) -> Result<Self, CostError> {
        if costs.is_empty() {
            return Err(CostError::EmptyEnsemble);
        }
        let h_lo_min = costs.iter().map(|c| c.h_lo).fold(f64::INFINITY, f64::min);
        let h_hi_max = costs.iter().map(|c| c.h_hi).fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { costs, h_lo_min, h_hi_max })
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }
}

pub fn global_value(ensemble: &CostEnsemble, s: f64) -> f64 {
    ensemble.costs.iter().map(|c| c.value(s)).sum()
}

pub fn global_gradient(ensemble: &CostEnsemble, s: f64) -> f64 {
    ensemble.costs.iter().map(|c| c.gradient(s)).sum()
}

pub fn global_hessian(ensemble: &CostEnsemble, s: f64) -> f64 {
    ensemble.costs.iter().map(|c| c.hessian(s)).sum()
}

const BRACKET_LIMIT: f64 = 1e6;

/// Minimizer of the global cost, to `|f'(y*)| < tol`.
///
/// Brackets the gradient's sign change by doubling expansion from 0, then runs
/// safeguarded Newton: each Newton step must stay inside the bracket and is
/// otherwise replaced by bisection, so convexity of the sum (strictly
/// increasing gradient on the bracket) is all that is required.
pub fn solve_optimum(ensemble: &CostEnsemble, tol: f64) -> Result<f64, CostError> {
    let g0 = global_gradient(ensemble, 0.0);
    if g0.abs() < tol {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while global_gradient(ensemble, lo) > 0.0 {
        lo *= 2.0;
        if lo < -BRACKET_LIMIT {
            return Err(CostError::BracketFailure(BRACKET_LIMIT));
        }
    }
    while global_gradient(ensemble, hi) < 0.0 {
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(CostError::BracketFailure(BRACKET_LIMIT));
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let g = global_gradient(ensemble, s);
        if g.abs() < tol {
            return Ok(s);
        }
        if g > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let h = global_hessian(ensemble, s);
        let newton = s - g / h;
        s = if h > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON * (1.0 + s.abs()) {
            return Ok(s);
        }
    }
    Ok(s)
}

/// The four-agent reference ensemble.
pub fn paper_ensemble() -> CostEnsemble {
    CostEnsemble::new(vec![
        builtin_cost("paper_f1", &[]).unwrap(),
        builtin_cost("paper_f2", &[]).unwrap(),
        builtin_cost("paper_f3", &[]).unwrap(),
        builtin_cost("paper_f4", &[]).unwrap(),
    ])
    .unwrap()
}
