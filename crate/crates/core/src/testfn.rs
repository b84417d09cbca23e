//! Smooth compactly supported test functions built from `exp(-1/x)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Highest derivative order the finite-difference stencils support.
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// Below this argument `exp(-1/x)` would be subnormal; the mollifier
/// returns an exact zero instead.
pub const MOLLIFIER_CUTOFF: f64 = 1.0 / 745.0;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    /// `[-m, m]`.
    pub fn symmetric(m: f64) -> Result<Self> {
        Self::new(-m, m)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `points` equally spaced nodes including both ends.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![0.5 * (self.lo + self.hi)],
            _ => {
                let step = self.width() / (points - 1) as f64;
                (0..points)
                    .map(|i| {
                        if i + 1 == points {
                            self.hi
                        } else {
                            self.lo + step * i as f64
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn translated(&self, shift: f64) -> Result<Self> {
        Self::new(self.lo + shift, self.hi + shift)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `exp(-1/x)` for `x > 0`, zero otherwise.
pub fn mollifier(x: f64) -> f64 {
    if x < MOLLIFIER_CUTOFF {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth unit step rising from 0 at `alpha` to 1 at `beta`.
#[derive(Debug, Clone, Copy)]
pub struct StepUp {
    alpha: f64,
    beta: f64,
}

impl StepUp {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.alpha {
            return 0.0;
        }
        if x >= self.beta {
            return 1.0;
        }
        let rising = mollifier(x - self.alpha);
        let falling = mollifier(self.beta - x);
        rising / (rising + falling)
    }
}

/// Smooth unit step falling from 1 at `gamma` to 0 at `delta`.
#[derive(Debug, Clone, Copy)]
pub struct StepDown {
    gamma: f64,
    delta: f64,
}

impl StepDown {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.gamma {
            return 1.0;
        }
        if x >= self.delta {
            return 0.0;
        }
        let rising = mollifier(x - self.gamma);
        let falling = mollifier(self.delta - x);
        falling / (rising + falling)
    }
}

fn require_increasing(names: &'static str, lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: names,
            value: hi - lo,
            reason: "knots must be finite and strictly increasing",
        })
    }
}

pub fn smooth_step_up(alpha: f64, beta: f64) -> Result<StepUp> {
    require_increasing("alpha < beta", alpha, beta)?;
    Ok(StepUp { alpha, beta })
}

pub fn smooth_step_down(gamma: f64, delta: f64) -> Result<StepDown> {
    require_increasing("gamma < delta", gamma, delta)?;
    Ok(StepDown { gamma, delta })
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth function that vanishes outside a known closed interval.
///
/// Evaluation outside the support short-circuits to an exact zero, so the
/// support is honored bit-exactly whatever the inner closure does there.
#[derive(Clone)]
pub struct TestFunction {
    inner: RealFn,
    support: Interval,
    max_order: usize,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("support", &self.support)
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl TestFunction {
    /// Wraps an arbitrary smooth closure. The caller vouches for smoothness
    /// and for `f` vanishing at the support ends.
    pub fn from_fn<F>(support: Interval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            inner: Arc::new(f),
            support,
            max_order: MAX_DERIVATIVE_ORDER,
        }
    }

    /// `F_{α,β}(x)·G_{γ,δ}(x)`: one on `[β, γ]`, zero off `[α, δ]`.
    pub fn bump(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        require_increasing("alpha < beta", alpha, beta)?;
        require_increasing("beta < gamma", beta, gamma)?;
        require_increasing("gamma < delta", gamma, delta)?;
        let up = StepUp { alpha, beta };
        let down = StepDown { gamma, delta };
        Ok(Self::from_fn(Interval::new(alpha, delta)?, move |x| {
            up.eval(x) * down.eval(x)
        }))
    }

    pub fn with_max_derivative_order(mut self, order: usize) -> Result<Self> {
        if order == 0 || order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                order,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        self.max_order = order;
        Ok(self)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.inner);
        Self {
            inner: Arc::new(move |x| factor * inner(x)),
            ..self.clone()
        }
    }

    /// `x ↦ f(x - shift)`.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let inner = Arc::clone(&self.inner);
        Ok(Self {
            inner: Arc::new(move |x| inner(x - shift)),
            support: self.support.translated(shift)?,
            max_order: self.max_order,
        })
    }

    /// `a·f + b·h` supported on the hull of both supports.
    pub fn linear_combination(a: f64, f: &Self, b: f64, h: &Self) -> Self {
        let (f, h) = (f.clone(), h.clone());
        let support = Interval {
            lo: f.support.lo.min(h.support.lo),
            hi: f.support.hi.max(h.support.hi),
        };
        let max_order = f.max_order.min(h.max_order);
        Self {
            inner: Arc::new(move |x| a * f.eval(x) + b * h.eval(x)),
            support,
            max_order,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            (self.inner)(x)
        } else {
            0.0
        }
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn max_derivative_order(&self) -> usize {
        self.max_order
    }

    /// Finite-difference derivative of the given order at `x`.
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if order == 0 || order > self.max_order {
            return Err(Error::DerivativeOrder {
                order,
                max: self.max_order,
            });
        }
        central_derivative(|t| self.eval(t), x, order)
    }

    /// Like [`derivative`](Self::derivative) but order 0 returns the value.
    pub fn derivative_or_value(&self, x: f64, order: usize) -> Result<f64> {
        if order == 0 {
            Ok(self.eval(x))
        } else {
            self.derivative(x, order)
        }
    }
}

fn stencil<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, order: usize) -> f64 {
    match order {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => {
            (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h)
        }
        4 => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
        _ => unreachable!("order checked by caller"),
    }
}

/// Step used for a central difference of the given order at `x`.
pub fn default_step(x: f64, order: usize) -> f64 {
    let base = if order == 1 {
        f64::EPSILON.cbrt()
    } else {
        f64::EPSILON.powf(1.0 / (order as f64 + 2.0))
    };
    let h = base * x.abs().max(1.0);
    // round so that x + h - x == h
    (x + h) - x
}

/// Second-order central difference with one Richardson level, O(h⁴).
pub fn central_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: usize) -> Result<f64> {
    central_derivative_with_step(f, x, order, default_step(x, order))
}

pub fn central_derivative_with_step<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: usize,
    h: f64,
) -> Result<f64> {
    if order == 0 || order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeOrder {
            order,
            max: MAX_DERIVATIVE_ORDER,
        });
    }
    let coarse = stencil(&f, x, h, order);
    let fine = stencil(&f, x, 0.5 * h, order);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// `g(x) = (f(x) - f(0)) / x`, continued by `f'(0)` at the origin.
#[derive(Debug, Clone)]
pub struct DifferenceQuotient {
    f: TestFunction,
    f0: f64,
    d1: f64,
    d2: f64,
    threshold: f64,
}

impl DifferenceQuotient {
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() < self.threshold {
            self.d1 + 0.5 * x * self.d2
        } else {
            (self.f.eval(x) - self.f0) / x
        }
    }

    pub fn value_at_origin(&self) -> f64 {
        self.f0
    }

    /// Radius around 0 where the Taylor form replaces the quotient.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

pub fn difference_quotient(f: &TestFunction) -> DifferenceQuotient {
    let eval = |t| f.eval(t);
    // Orders 1 and 2 are always available from the stencils, independent
    // of the function's configured maximum.
    let d1 = central_derivative(eval, 0.0, 1).expect("order 1 is supported");
    let d2 = central_derivative(eval, 0.0, 2).expect("order 2 is supported");
    DifferenceQuotient {
        f: f.clone(),
        f0: f.eval(0.0),
        d1,
        d2,
        threshold: 1e-6 * f.support().width(),
    }
}
