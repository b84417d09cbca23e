//! Sine integral, Dirichlet tails, the `sin²y/y²` integral and the
//! two-order double integral of `e^{-αx} sin x` over a square.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::quad::Integrator;
pub use crate::quad::QuadResult;

/// Beyond this argument `Si` and the Dirichlet tail use the asymptotic series.
pub const ASYMPTOTIC_SWITCH: f64 = 50.0;

/// Series replaces the quotient form of `sin t / t` below this radius.
const SERIES_RADIUS: f64 = 1e-4;

/// `sin t / t` with the removable singularity filled in.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < SERIES_RADIUS {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

/// `sin²y / y²` with value 1 at the origin.
pub fn sinc_squared(y: f64) -> f64 {
    if y.abs() < SERIES_RADIUS {
        let y2 = y * y;
        1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0
    } else {
        let s = y.sin() / y;
        s * s
    }
}

fn panel_engine(width: f64) -> Integrator {
    Integrator::new(1e-15, 0.0)
        .with_max_panel_width(width)
        .with_max_panels(4_000)
        .sequential()
}

/// Auxiliary pair `(f, g)` with `Si(x) = π/2 - f(x) cos x - g(x) sin x`,
/// summed from their asymptotic series until the terms stop shrinking.
fn auxiliary(x: f64) -> (f64, f64) {
    let inv2 = 1.0 / (x * x);
    let mut f_sum = 0.0;
    let mut g_sum = 0.0;
    // f ~ (1/x) Σ (-1)^k (2k)!/x^{2k},  g ~ (1/x²) Σ (-1)^k (2k+1)!/x^{2k}
    let mut f_term = 1.0 / x;
    let mut g_term = inv2;
    let mut k = 0u32;
    loop {
        f_sum += f_term;
        g_sum += g_term;
        let kk = f64::from(k);
        let next_f = -f_term * (2.0 * kk + 1.0) * (2.0 * kk + 2.0) * inv2;
        let next_g = -g_term * (2.0 * kk + 2.0) * (2.0 * kk + 3.0) * inv2;
        if next_g.abs() >= g_term.abs() || next_f.abs() < 1e-18 * f_sum.abs() || k > 60 {
            break;
        }
        f_term = next_f;
        g_term = next_g;
        k += 1;
    }
    (f_sum, g_sum)
}

/// Sine integral `Si(x) = ∫₀ˣ sin t / t dt`.
pub fn si(x: f64) -> f64 {
    if x < 0.0 {
        return -si(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x > ASYMPTOTIC_SWITCH {
        let (f, g) = auxiliary(x);
        return FRAC_PI_2 - f * x.cos() - g * x.sin();
    }
    panel_engine(PI)
        .integrate(sinc, 0.0, x)
        .map(|r| r.value)
        .expect("sinc is finite everywhere")
}

/// `∫ₓ^∞ sin t / t dt = π/2 - Si(x)` for `x > 0`.
pub fn dirichlet_tail(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    if x > ASYMPTOTIC_SWITCH {
        let (f, g) = auxiliary(x);
        Ok(f * x.cos() + g * x.sin())
    } else {
        Ok(FRAC_PI_2 - si(x))
    }
}

/// `∫ₐ^∞ sin²y/y² dy` for large `a`, from repeated integration by parts of
/// `(1 - cos 2y) / (2y²)`.
fn sinc_squared_tail_asymptotic(a: f64) -> f64 {
    // ∫ₐ^∞ e^{2iy} y^{-2} dy = (i/2) e^{2ia} Σ_k (k+1)! / ((2i)^k a^{k+2})
    let (mut re, mut im) = (1.0 / (a * a), 0.0);
    let (mut sum_re, mut sum_im) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..80u32 {
        let mag = re.hypot(im);
        if mag >= last || mag < 1e-19 {
            break;
        }
        sum_re += re;
        sum_im += im;
        last = mag;
        // multiply by (k+2)/(2a) · (-i)
        let scale = (f64::from(k) + 2.0) / (2.0 * a);
        (re, im) = (im * scale, -re * scale);
    }
    let (s2, c2) = (2.0 * a).sin_cos();
    let oscillatory = 0.5 * (-s2 * sum_re - c2 * sum_im);
    0.5 / a - 0.5 * oscillatory
}

fn sinc_squared_quad(a: f64, b: f64) -> f64 {
    panel_engine(0.5 * PI)
        .integrate(sinc_squared, a, b)
        .map(|r| r.value)
        .expect("sinc² is finite everywhere")
}

fn sinc_squared_tail(a: f64) -> f64 {
    if a > ASYMPTOTIC_SWITCH {
        sinc_squared_tail_asymptotic(a)
    } else {
        FRAC_PI_2 - sinc_squared_quad(0.0, a)
    }
}

/// `∫ₐᵇ sin²y/y² dy` with `0 ≤ a < b`; `b` may be `f64::INFINITY`.
pub fn sinc_sq_integral(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "lower limit must be finite and non-negative",
        });
    }
    if b.is_nan() || b <= a {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "upper limit must exceed the lower limit",
        });
    }
    if b.is_infinite() {
        return Ok(sinc_squared_tail(a));
    }
    if b <= 4.0 * ASYMPTOTIC_SWITCH {
        Ok(sinc_squared_quad(a, b))
    } else {
        Ok(sinc_squared_tail(a) - sinc_squared_tail_asymptotic(b))
    }
}

/// Which variable the inner integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FubiniOrder {
    /// Inner integral over `x`, outer over `α`.
    XFirst,
    /// Inner integral over `α`, outer over `x`.
    AlphaFirst,
}

const FUBINI_STEP: f64 = 0.5;

/// `S(R) = ∫∫_{[0,R]²} e^{-αx} sin x`, integrated numerically in the given
/// order. The inner integrals are not replaced by their closed forms, so
/// the two orders are independent computations.
///
/// The error estimate adds the outer estimate to `R` times the largest
/// inner estimate; `panels_used` counts outer panels.
pub fn fubini_s(r: f64, order: FubiniOrder) -> Result<QuadResult> {
    require_positive("R", r)?;
    let inner = Integrator::new(1e-14, 1e-14)
        .with_max_panel_width(FUBINI_STEP)
        .sequential();
    let outer = Integrator::new(1e-12, 1e-13).with_max_panel_width(FUBINI_STEP);
    let worst_inner = Mutex::new(0.0_f64);

    let kernel = |alpha: f64, x: f64| (-alpha * x).exp() * x.sin();
    let outer_integrand = |t: f64| {
        let res = match order {
            FubiniOrder::XFirst => inner.integrate(|x| kernel(t, x), 0.0, r),
            FubiniOrder::AlphaFirst => inner.integrate(|alpha| kernel(alpha, t), 0.0, r),
        };
        match res {
            Ok(q) => {
                let mut w = worst_inner.lock().expect("poisoned");
                *w = w.max(q.abs_error_estimate);
                q.value
            }
            Err(_) => f64::NAN,
        }
    };
    let total = outer.integrate(outer_integrand, 0.0, r)?;
    let worst = *worst_inner.lock().expect("poisoned");
    Ok(QuadResult {
        value: total.value,
        abs_error_estimate: total.abs_error_estimate + r * worst,
        panels_used: total.panels_used,
    })
}
