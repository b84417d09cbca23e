//! Distributions as classes of fundamental sequences.
//!
//! A [`FundamentalSeq`] carries a tower of functions `levels[i](n, x)` in
//! which each level is the primitive, anchored at 0, of the one before it.
//! The term `φₙ` sits at `term_index`; the `k`-th primitive `Φₙ` is the level
//! `k` steps up. Levels beyond the stored tower are produced on demand by
//! anchored quadrature (the repeated-integration formula
//! `∫₀ˣ (x-t)^{m-1}/(m-1)! φ(t) dt`), and differentiation shifts the term
//! one level down, or prepends a finite-difference level when no closed
//! form is stored.
//!
//! Almost-uniform convergence is checked on finite grids over finitely many
//! intervals; reports say which bound was used.

use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::families::{LimitObject, RegFamily};
use crate::pairing::{extrapolate_limit, ExtrapolationMode, PairingResult};
use crate::quad::Integrator;
use crate::testfn::{central_derivative, Interval, TestFunction};

pub type SeqFn = Arc<dyn Fn(u32, f64) -> f64 + Send + Sync>;
pub type LimitFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Default number of grid nodes per interval.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Half-widths of the intervals `[-M, M]` used for almost-uniform checks.
pub const ALMOST_UNIFORM_HALF_WIDTHS: [f64; 3] = [1.0, 5.0, 10.0];

/// Indices at which sequences without a declared limit are extrapolated.
const EXTRAPOLATION_INDICES: [u32; 4] = [100, 200, 400, 800];

#[derive(Clone)]
enum Level {
    Closed(SeqFn),
    NumericDerivative(Box<Level>),
}

impl Level {
    fn eval(&self, n: u32, x: f64) -> f64 {
        match self {
            Level::Closed(f) => f(n, x),
            Level::NumericDerivative(inner) => {
                central_derivative(|t| inner.eval(n, t), x, 1).expect("order 1 is supported")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqKind {
    FourierKernel,
    Lorentz,
    Zero,
    Other,
}

#[derive(Clone)]
pub struct FundamentalSeq {
    name: String,
    kind: SeqKind,
    levels: Vec<Level>,
    term_index: usize,
    order: usize,
    limit: Option<(usize, LimitFn)>,
    differentiable: bool,
}

impl fmt::Debug for FundamentalSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FundamentalSeq")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("order", &self.order)
            .field("stored_levels", &self.levels.len())
            .field("term_index", &self.term_index)
            .field("has_limit", &self.limit().is_some())
            .finish()
    }
}

fn closed<F>(f: F) -> Level
where
    F: Fn(u32, f64) -> f64 + Send + Sync + 'static,
{
    Level::Closed(Arc::new(f))
}

impl FundamentalSeq {
    /// A sequence given by its terms only; primitives up to `order` are
    /// lifted numerically unless supplied with [`with_primitives`](Self::with_primitives).
    pub fn new<F>(name: impl Into<String>, term: F, order: usize) -> Self
    where
        F: Fn(u32, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: SeqKind::Other,
            levels: vec![closed(term)],
            term_index: 0,
            order,
            limit: None,
            differentiable: true,
        }
    }

    /// Appends closed-form anchored primitives above the stored tower.
    pub fn with_primitives(mut self, primitives: Vec<SeqFn>) -> Self {
        self.levels
            .extend(primitives.into_iter().map(Level::Closed));
        self
    }

    /// Stores a closed-form derivative of the term below the tower.
    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(u32, f64) -> f64 + Send + Sync + 'static,
    {
        self.levels.insert(self.term_index, closed(derivative));
        self.term_index += 1;
        self
    }

    /// Declares `Φ`, the almost-uniform limit of the primitives of the
    /// current order.
    pub fn with_limit<F>(mut self, limit: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.limit = Some((self.order, Arc::new(limit)));
        self
    }

    /// Marks the terms as merely continuous.
    pub fn non_differentiable(mut self) -> Self {
        self.differentiable = false;
        self
    }

    /// `δₙ(x) = sin(nx)/(πx)` with primitives `θₙ`, `Δₙ`; `k = 2`, `Φ = |x|/2`.
    pub fn fourier_kernel() -> Self {
        let kernel = |n: u32| RegFamily::fourier(f64::from(n)).expect("n ≥ 1");
        let mut seq = Self::new("fourier_kernel", move |n, x| kernel(n).eval(x), 2)
            .with_primitives(vec![
                Arc::new(move |n, x| kernel(n).primitive1(x)),
                Arc::new(move |n, x| kernel(n).primitive2(x)),
            ])
            .with_derivative(move |n, x| kernel(n).derivative(x))
            .with_limit(|x| LimitObject::AbsHalf.eval(x));
        seq.kind = SeqKind::FourierKernel;
        seq
    }

    /// `δ̃ₙ(x) = (n/π)/(1 + n²x²)` with primitives `θ̃ₙ`, `Δ̃ₙ`; `k = 2`.
    pub fn lorentz() -> Self {
        let kernel = |n: u32| RegFamily::lorentz_seq(f64::from(n)).expect("n ≥ 1");
        let mut seq = Self::new("lorentz", move |n, x| kernel(n).eval(x), 2)
            .with_primitives(vec![
                Arc::new(move |n, x| kernel(n).primitive1(x)),
                Arc::new(move |n, x| kernel(n).primitive2(x)),
            ])
            .with_derivative(move |n, x| kernel(n).derivative(x))
            .with_limit(|x| LimitObject::AbsHalf.eval(x));
        seq.kind = SeqKind::Lorentz;
        seq
    }

    /// `n cos(nx)` with primitives `sin(nx)` and `(1 - cos(nx))/n`; `k = 2`.
    pub fn cosine() -> Self {
        Self::new(
            "n_cos_nx",
            |n, x| f64::from(n) * (f64::from(n) * x).cos(),
            2,
        )
        .with_primitives(vec![
            Arc::new(|n, x| (f64::from(n) * x).sin()),
            Arc::new(|n, x| {
                let h = (0.5 * f64::from(n) * x).sin();
                2.0 * h * h / f64::from(n)
            }),
        ])
        .with_derivative(|n, x| -f64::from(n * n) * (f64::from(n) * x).sin())
        .with_limit(|_| 0.0)
    }

    /// The constant zero sequence at order 0.
    pub fn zero() -> Self {
        let mut seq = Self::new("zero", |_, _| 0.0, 0)
            .with_primitives(vec![Arc::new(|_, _| 0.0), Arc::new(|_, _| 0.0)])
            .with_derivative(|_, _| 0.0)
            .with_limit(|_| 0.0);
        seq.kind = SeqKind::Zero;
        seq
    }

    /// The constant sequence `φₙ = Φ` at order 0.
    pub fn constant<F>(name: impl Into<String>, phi: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    {
        let limit = phi.clone();
        Self::new(name, move |_, x| phi(x), 0).with_limit(limit)
    }

    /// The sequence of `j`-th primitives, with order lowered by `j`.
    /// A declared limit survives when it still sits at a non-negative order.
    pub fn integrated(&self, j: usize) -> Result<Self> {
        if self.term_index + j >= self.levels.len() {
            return Err(Error::InvalidParameter {
                name: "j",
                value: j as f64,
                reason: "no closed-form primitive stored at that level",
            });
        }
        let mut seq = self.clone();
        seq.term_index += j;
        seq.order = self.order.saturating_sub(j);
        seq.limit = self
            .limit
            .as_ref()
            .and_then(|(k, f)| k.checked_sub(j).map(|k| (k, Arc::clone(f))));
        seq.kind = SeqKind::Other;
        seq.name = format!("{}^(-{j})", self.name);
        Ok(seq)
    }

    /// Same terms, checked at a different primitive order.
    pub fn at_order(&self, order: usize) -> Self {
        let mut seq = self.clone();
        seq.order = order;
        seq
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SeqKind {
        self.kind
    }

    /// `k`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// `Φ`, when declared for the current order.
    pub fn limit(&self) -> Option<&LimitFn> {
        match &self.limit {
            Some((k, f)) if *k == self.order => Some(f),
            _ => None,
        }
    }

    pub fn term(&self, n: u32, x: f64) -> f64 {
        self.primitive(0, n, x)
    }

    /// Anchored primitive of level `j` (`j = 0` is the term itself).
    pub fn primitive(&self, j: usize, n: u32, x: f64) -> f64 {
        let idx = self.term_index + j;
        if let Some(level) = self.levels.get(idx) {
            return level.eval(n, x);
        }
        let top = self.levels.len() - 1;
        let base = &self.levels[top];
        let m = (idx - top) as i32;
        let factorial: f64 = (1..m).map(f64::from).product();
        let width = (PI / f64::from(n.max(1))).min(0.5);
        Integrator::new(1e-12, 1e-12)
            .with_max_panel_width(width)
            .sequential()
            .integrate(
                |t| (x - t).powi(m - 1) / factorial * base.eval(n, t),
                0.0,
                x,
            )
            .map(|q| q.value)
            .unwrap_or(f64::NAN)
    }

    /// `Φₙ`, the primitive of the sequence's own order.
    pub fn order_primitive(&self, n: u32, x: f64) -> f64 {
        self.primitive(self.order, n, x)
    }
}

/// `⟨φₙ⟩' = ⟨φₙ'⟩`: the result has order `k + 1` and its first primitive is
/// the old term, so its order primitive (and declared limit) are unchanged.
pub fn derivative(seq: &FundamentalSeq) -> Result<FundamentalSeq> {
    let mut out = seq.clone();
    if seq.term_index > 0 {
        out.term_index -= 1;
    } else if seq.differentiable {
        out.levels
            .insert(0, Level::NumericDerivative(Box::new(seq.levels[0].clone())));
    } else {
        return Err(Error::NotDifferentiable(seq.name.clone()));
    }
    out.order += 1;
    out.limit = seq.limit.as_ref().map(|(k, f)| (k + 1, Arc::clone(f)));
    out.kind = if seq.kind == SeqKind::Zero {
        SeqKind::Zero
    } else {
        SeqKind::Other
    };
    out.name = format!("{}'", seq.name);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        *self == Verdict::Pass
    }
}

/// Sup-norm errors on a grid, one per sequence index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub interval: Interval,
    pub grid_points: usize,
    pub n_values: Vec<u32>,
    pub sup_error: Vec<f64>,
    pub verdict: Verdict,
    pub bound_used: String,
}

impl GridReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn final_error(&self) -> f64 {
        self.sup_error.last().copied().unwrap_or(0.0)
    }
}

/// Which indices are evaluated up to `n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NSampling {
    /// Every index `1..=n_max`.
    All,
    /// About this many geometrically spaced indices, always including `n_max`.
    Geometric(usize),
    /// `All` up to 256, `Geometric(64)` above.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub grid_points: usize,
    pub sampling: NSampling,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            sampling: NSampling::Auto,
        }
    }
}

pub fn sample_indices(n_max: u32, sampling: NSampling) -> Vec<u32> {
    let sampling = match sampling {
        NSampling::Auto if n_max <= 256 => NSampling::All,
        NSampling::Auto => NSampling::Geometric(64),
        other => other,
    };
    match sampling {
        NSampling::All => (1..=n_max).collect(),
        NSampling::Geometric(count) => {
            let count = count.max(2);
            let ratio = f64::from(n_max).ln() / (count - 1) as f64;
            let mut ns: Vec<u32> = (0..count)
                .map(|i| ((ratio * i as f64).exp().round() as u32).clamp(1, n_max))
                .collect();
            ns.push(n_max);
            ns.sort_unstable();
            ns.dedup();
            ns
        }
        NSampling::Auto => unreachable!(),
    }
}

fn validate_n_max(n_max: u32) -> Result<()> {
    if n_max < 2 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: f64::from(n_max),
            reason: "need at least two sequence indices",
        });
    }
    Ok(())
}

fn sup_over<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> f64 {
    grid.iter().map(|&x| f(x).abs()).fold(0.0, f64::max)
}

/// Largest `sup |Φₙ - Φₘ|` among (up to 16) indices in the upper half.
fn tail_diameter(seq: &FundamentalSeq, ns: &[u32], grid: &[f64], order: usize) -> f64 {
    let n_max = *ns.last().expect("nonempty");
    let tail: Vec<u32> = ns.iter().copied().filter(|&n| 2 * n >= n_max).collect();
    let stride = tail.len().div_ceil(16).max(1);
    let mut picked: Vec<u32> = tail.iter().copied().step_by(stride).collect();
    if picked.last() != Some(&n_max) {
        picked.push(n_max);
    }
    let values: Vec<Vec<f64>> = picked
        .par_iter()
        .map(|&n| grid.iter().map(|&x| seq.primitive(order, n, x)).collect())
        .collect();
    let mut diameter = 0.0_f64;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            for (a, b) in values[i].iter().zip(&values[j]) {
                diameter = diameter.max((a - b).abs());
            }
        }
    }
    diameter
}

fn non_increasing_overall(errors: &[f64], tol: f64) -> bool {
    match (errors.first(), errors.last()) {
        (Some(&first), Some(&last)) => first <= tol || last <= first,
        _ => true,
    }
}

/// Almost-uniform convergence of the order-`k` primitives on one interval.
pub fn check_fundamental(
    seq: &FundamentalSeq,
    interval: Interval,
    n_max: u32,
    tol: f64,
) -> Result<GridReport> {
    check_fundamental_with(seq, interval, n_max, tol, &CheckOptions::default())
}

pub fn check_fundamental_with(
    seq: &FundamentalSeq,
    interval: Interval,
    n_max: u32,
    tol: f64,
    opts: &CheckOptions,
) -> Result<GridReport> {
    validate_n_max(n_max)?;
    require_positive("tol", tol)?;
    let grid = interval.grid(opts.grid_points);
    let ns = sample_indices(n_max, opts.sampling);
    let k = seq.order();
    let diameter = tail_diameter(seq, &ns, &grid, k);

    // A declared limit is checked directly; otherwise the Cauchy tail diameter.
    let (sup_error, limit_ok, bound_used) = match seq.limit() {
        Some(limit) => {
            let errs: Vec<f64> = ns
                .par_iter()
                .map(|&n| sup_over(&grid, |x| seq.primitive(k, n, x) - limit(x)))
                .collect();
            let ok = errs.last().is_some_and(|&e| e <= tol) && non_increasing_overall(&errs, tol);
            (
                errs,
                ok,
                format!("sup|Phi_n - Phi| <= {tol:e} at n = {n_max}; tail diameter {diameter:e}"),
            )
        }
        None => {
            let reference: Vec<f64> = grid.iter().map(|&x| seq.primitive(k, n_max, x)).collect();
            let errs: Vec<f64> = ns
                .par_iter()
                .map(|&n| {
                    grid.iter()
                        .zip(&reference)
                        .map(|(&x, r)| (seq.primitive(k, n, x) - r).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            (
                errs,
                diameter <= tol,
                format!("Cauchy: tail diameter {diameter:e} <= {tol:e}"),
            )
        }
    };
    let verdict = Verdict::from_bool(limit_ok);
    Ok(GridReport {
        interval,
        grid_points: grid.len(),
        n_values: ns,
        sup_error,
        verdict,
        bound_used,
    })
}

/// [`check_fundamental`] on `[-M, M]` for every `M` in [`ALMOST_UNIFORM_HALF_WIDTHS`].
pub fn check_almost_uniform(seq: &FundamentalSeq, n_max: u32, tol: f64) -> Result<Vec<GridReport>> {
    ALMOST_UNIFORM_HALF_WIDTHS
        .iter()
        .map(|&m| check_fundamental(seq, Interval::symmetric(m)?, n_max, tol))
        .collect()
}

/// Checks `sup |Φₙ - Φ| ≤ bound(n)` for every listed `n`.
pub fn check_rate<B>(
    seq: &FundamentalSeq,
    interval: Interval,
    n_values: &[u32],
    grid_points: usize,
    bound: B,
    description: &str,
) -> Result<GridReport>
where
    B: Fn(u32) -> f64 + Sync,
{
    let limit = seq.limit().ok_or(Error::InvalidParameter {
        name: "seq",
        value: seq.order() as f64,
        reason: "no limit declared at this order",
    })?;
    let grid = interval.grid(grid_points);
    let k = seq.order();
    let sup_error: Vec<f64> = n_values
        .par_iter()
        .map(|&n| sup_over(&grid, |x| seq.primitive(k, n, x) - limit(x)))
        .collect();
    let ok = n_values
        .iter()
        .zip(&sup_error)
        .all(|(&n, &e)| e <= bound(n));
    Ok(GridReport {
        interval,
        grid_points: grid.len(),
        n_values: n_values.to_vec(),
        sup_error,
        verdict: Verdict::from_bool(ok),
        bound_used: description.to_string(),
    })
}

/// Equivalence: primitives of a common order agree in the limit.
pub fn check_equivalent(
    a: &FundamentalSeq,
    b: &FundamentalSeq,
    interval: Interval,
    n_max: u32,
    tol: f64,
) -> Result<GridReport> {
    check_equivalent_with(a, b, interval, n_max, tol, &CheckOptions::default())
}

pub fn check_equivalent_with(
    a: &FundamentalSeq,
    b: &FundamentalSeq,
    interval: Interval,
    n_max: u32,
    tol: f64,
    opts: &CheckOptions,
) -> Result<GridReport> {
    validate_n_max(n_max)?;
    require_positive("tol", tol)?;
    let k = a.order().max(b.order());
    let grid = interval.grid(opts.grid_points);
    let ns = sample_indices(n_max, opts.sampling);
    let sup_error: Vec<f64> = ns
        .par_iter()
        .map(|&n| sup_over(&grid, |x| a.primitive(k, n, x) - b.primitive(k, n, x)))
        .collect();
    let tail_ok = ns
        .iter()
        .zip(&sup_error)
        .filter(|(&n, _)| 2 * n >= n_max)
        .all(|(_, &e)| e <= tol);
    let verdict = Verdict::from_bool(tail_ok && non_increasing_overall(&sup_error, tol));
    Ok(GridReport {
        interval,
        grid_points: grid.len(),
        n_values: ns,
        sup_error,
        verdict,
        bound_used: format!("sup|Phi_n - Psi_n| <= {tol:e} for n >= n_max/2 at order {k}"),
    })
}

/// Default verdict tolerance for sequences without a closed-form bound.
pub const RESTRICT_DEFAULT_TOL: f64 = 1e-2;

/// Convergence to zero on `a ≤ |x| ≤ a + 5`, i.e. away from the origin.
///
/// For the Lorentzian the terms themselves are checked against
/// `δ̃ₙ(a)`; for the sinc kernel, `θₙ` against the step with bound
/// `2/(πna)`; anything else must fall below [`RESTRICT_DEFAULT_TOL`].
pub fn restrict_check_zero(seq: &FundamentalSeq, a: f64, n_max: u32) -> Result<GridReport> {
    restrict_check_zero_with(seq, a, n_max, &CheckOptions::default())
}

pub fn restrict_check_zero_with(
    seq: &FundamentalSeq,
    a: f64,
    n_max: u32,
    opts: &CheckOptions,
) -> Result<GridReport> {
    require_positive("a", a)?;
    validate_n_max(n_max)?;
    let interval = Interval::new(a, a + 5.0)?;
    let right = interval.grid(opts.grid_points);
    let grid: Vec<f64> = right.iter().flat_map(|&x| [x, -x]).collect();
    let ns = sample_indices(n_max, opts.sampling);

    let (sup_error, bound_used, ok): (Vec<f64>, String, bool) = match seq.kind() {
        SeqKind::Lorentz => {
            let errs: Vec<f64> = ns
                .par_iter()
                .map(|&n| sup_over(&grid, |x| seq.term(n, x)))
                .collect();
            let bound = |n: u32| {
                let n = f64::from(n);
                FRAC_1_PI * n / (1.0 + n * n * a * a)
            };
            let ok = ns
                .iter()
                .zip(&errs)
                .all(|(&n, &e)| e <= bound(n) * (1.0 + 1e-12));
            (
                errs,
                format!("|term_n(x)| <= term_n({a}) = n/(pi(1+n^2 a^2))"),
                ok,
            )
        }
        SeqKind::FourierKernel => {
            let errs: Vec<f64> = ns
                .par_iter()
                .map(|&n| {
                    sup_over(&grid, |x| {
                        seq.primitive(1, n, x) - LimitObject::StepTheta.eval(x)
                    })
                })
                .collect();
            let bound = |n: u32| 2.0 / (PI * f64::from(n) * a);
            let ok = ns.iter().zip(&errs).all(|(&n, &e)| e <= bound(n));
            (errs, format!("|theta_n(x) - theta(x)| <= 2/(pi n {a})"), ok)
        }
        SeqKind::Zero | SeqKind::Other => {
            let errs: Vec<f64> = ns
                .par_iter()
                .map(|&n| sup_over(&grid, |x| seq.term(n, x)))
                .collect();
            let ok = errs.last().is_some_and(|&e| e <= RESTRICT_DEFAULT_TOL)
                && non_increasing_overall(&errs, RESTRICT_DEFAULT_TOL);
            (
                errs,
                format!("sup|term_n| <= {RESTRICT_DEFAULT_TOL:e} at n = {n_max}"),
                ok,
            )
        }
    };
    Ok(GridReport {
        interval,
        grid_points: grid.len(),
        n_values: ns,
        sup_error,
        verdict: Verdict::from_bool(ok),
        bound_used,
    })
}

/// `∫ φₙ f` for a single index, on panels no wider than `π/n`.
pub fn pair_term(seq: &FundamentalSeq, n: u32, f: &TestFunction) -> Result<PairingResult> {
    let support = f.support();
    let mut breaks = vec![support.lo(), support.hi()];
    if support.lo() < 0.0 && support.hi() > 0.0 {
        breaks.insert(1, 0.0);
    }
    let q = Integrator::new(1e-12, 1e-12)
        .with_max_panel_width(PI / f64::from(n.max(1)))
        .integrate_with_breaks(|x| seq.term(n, x) * f.eval(x), &breaks)?;
    Ok(PairingResult {
        value: q.value,
        abs_error_estimate: q.abs_error_estimate,
        param: Some(f64::from(n)),
        panels_used: q.panels_used,
    })
}

/// `(-1)^k ∫ Φ f^{(k)}`, the limit of `φₙ[f]` after `k` integrations by
/// parts. Without a declared `Φ`, `∫ Φₙ f^{(k)}` is extrapolated from
/// `n ∈ {100, 200, 400, 800}`.
pub fn pair_by_parts(seq: &FundamentalSeq, f: &TestFunction) -> Result<f64> {
    let k = seq.order();
    if k > f.max_derivative_order() {
        return Err(Error::DerivativeOrder {
            order: k,
            max: f.max_derivative_order(),
        });
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let support = f.support();
    let mut breaks = vec![support.lo(), support.hi()];
    if support.lo() < 0.0 && support.hi() > 0.0 {
        breaks.insert(1, 0.0);
    }
    let df = |x: f64| f.derivative_or_value(x, k).unwrap_or(f64::NAN);

    if let Some(limit) = seq.limit() {
        let q = Integrator::new(1e-12, 1e-12)
            .with_max_panel_width(support.width() / 64.0)
            .integrate_with_breaks(|x| limit(x) * df(x), &breaks)?;
        return Ok(sign * q.value);
    }

    let samples: Vec<(f64, f64)> = EXTRAPOLATION_INDICES
        .par_iter()
        .map(|&n| {
            Integrator::new(1e-12, 1e-12)
                .with_max_panel_width((PI / f64::from(n)).min(support.width() / 64.0))
                .sequential()
                .integrate_with_breaks(|x| seq.primitive(k, n, x) * df(x), &breaks)
                .map(|q| (f64::from(n), sign * q.value))
        })
        .collect::<Result<_>>()?;
    extrapolate_limit(&samples, ExtrapolationMode::InverseParam)
}
