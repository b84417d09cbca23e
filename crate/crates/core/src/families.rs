//! Closed-form regularized delta families and their anchored primitives.
//!
//! Two kernels are provided:
//!
//! * the truncated Fourier kernel `δ_R(x) = sin(Rx)/(πx)`, whose primitives
//!   are `Si(Rx)/π` and `(x/π) Si(Rx) + (cos(Rx) - 1)/(Rπ)`;
//! * the Lorentzian `δ̃^ε(x) = (ε/π)/(x² + ε²)`, whose primitives are
//!   `arctan(x/ε)/π` and `x arctan(x/ε)/π - ε ln(1 + x²/ε²)/(2π)`.
//!
//! All primitives are anchored at the origin. The Fourier kernel is indexed
//! by a continuous `R > 0` (integer `R = n` gives the sequence view); the
//! Lorentzian by `ε > 0`, with `ε = 1/n` for the sequence view.

use std::f64::consts::{FRAC_1_PI, PI};

use serde::Serialize;

use crate::error::{require_positive, Result};
use crate::special::si;

const SERIES_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    FourierKernel,
    Lorentz,
}

/// One member of a regularized family, with its parameter validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegFamily {
    kind: FamilyKind,
    param: f64,
}

impl RegFamily {
    /// `sin(Rx)/(πx)`.
    pub fn fourier(r: f64) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::FourierKernel,
            param: require_positive("R", r)?,
        })
    }

    /// `(ε/π)/(x² + ε²)`.
    pub fn lorentz(eps: f64) -> Result<Self> {
        Ok(Self {
            kind: FamilyKind::Lorentz,
            param: require_positive("eps", eps)?,
        })
    }

    /// Sequence view of the Lorentzian, `ε = 1/n`.
    pub fn lorentz_seq(n: f64) -> Result<Self> {
        Self::lorentz(1.0 / require_positive("n", n)?)
    }

    pub fn new(kind: FamilyKind, param: f64) -> Result<Self> {
        match kind {
            FamilyKind::FourierKernel => Self::fourier(param),
            FamilyKind::Lorentz => Self::lorentz(param),
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FourierKernel => sinc_kernel(self.param, x),
            FamilyKind::Lorentz => {
                let eps = self.param;
                FRAC_1_PI * eps / (x * x + eps * eps)
            }
        }
    }

    /// `∫₀ˣ eval`.
    pub fn primitive1(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FourierKernel => FRAC_1_PI * si(self.param * x),
            FamilyKind::Lorentz => FRAC_1_PI * (x / self.param).atan(),
        }
    }

    /// `∫₀ˣ primitive1`.
    pub fn primitive2(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FourierKernel => {
                let r = self.param;
                // cos(Rx) - 1 = -2 sin²(Rx/2)
                let half = (0.5 * r * x).sin();
                FRAC_1_PI * (x * si(r * x) - 2.0 * half * half / r)
            }
            FamilyKind::Lorentz => {
                let eps = self.param;
                let u = x / eps;
                FRAC_1_PI * (x * u.atan() - 0.5 * eps * ln_one_plus_square(u))
            }
        }
    }

    /// `d/dx eval`.
    pub fn derivative(&self, x: f64) -> f64 {
        match self.kind {
            FamilyKind::FourierKernel => {
                let r = self.param;
                let rx = r * x;
                if rx.abs() < SERIES_RADIUS {
                    // d/dx [R/π (1 - (Rx)²/6 + (Rx)⁴/120)]
                    FRAC_1_PI * r * r * (-rx / 3.0 + rx * rx * rx / 30.0)
                } else {
                    FRAC_1_PI * (rx * rx.cos() - rx.sin()) / (x * x)
                }
            }
            FamilyKind::Lorentz => {
                let eps = self.param;
                let d = x * x + eps * eps;
                -2.0 * FRAC_1_PI * eps * x / (d * d)
            }
        }
    }
}

/// `ln(1 + u²)` without loss for small `u` or overflow for huge `u`.
fn ln_one_plus_square(u: f64) -> f64 {
    let a = u.abs();
    if a > 1e150 {
        2.0 * a.ln() + (1.0 / (a * a)).ln_1p()
    } else {
        (a * a).ln_1p()
    }
}

fn sinc_kernel(r: f64, x: f64) -> f64 {
    let rx = r * x;
    if rx.abs() < SERIES_RADIUS {
        let t2 = rx * rx;
        FRAC_1_PI * r * (1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0)))
    } else {
        rx.sin() / (PI * x)
    }
}

/// `δ_R(x) = sin(Rx)/(πx)`, with `δ_R(0) = R/π`.
pub fn delta_r(r: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::fourier(r)?.eval(x))
}

/// `θₙ(x) = Si(nx)/π`.
pub fn theta_n(n: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::fourier(n)?.primitive1(x))
}

/// `Δₙ(x) = (x/π) Si(nx) + (cos(nx) - 1)/(nπ)`.
pub fn big_delta_n(n: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::fourier(n)?.primitive2(x))
}

/// `δ̃^ε(x) = (ε/π)/(x² + ε²)`.
pub fn lorentz_delta(eps: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::lorentz(eps)?.eval(x))
}

/// `θ̃ₙ(x) = arctan(nx)/π`.
pub fn lorentz_theta(n: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::lorentz_seq(n)?.primitive1(x))
}

/// `Δ̃ₙ(x) = x arctan(nx)/π - ln(1 + n²x²)/(2πn)`.
pub fn lorentz_big_delta(n: f64, x: f64) -> Result<f64> {
    Ok(RegFamily::lorentz_seq(n)?.primitive2(x))
}

/// Pointwise limits of the first and second primitives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitObject {
    /// `-1/2`, `0`, `1/2` for `x < 0`, `x = 0`, `x > 0`.
    StepTheta,
    /// `|x|/2`.
    AbsHalf,
}

impl LimitObject {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LimitObject::StepTheta => {
                if x > 0.0 {
                    0.5
                } else if x < 0.0 {
                    -0.5
                } else {
                    0.0
                }
            }
            LimitObject::AbsHalf => 0.5 * x.abs(),
        }
    }
}

pub fn limit_object(kind: LimitObject) -> LimitObject {
    kind
}

/// Bound on `sup_{|x| ≤ m} |Δ̃ₙ(x) - |x|/2|`, using `π/2 - arctan u ≤ 1/u`.
pub fn lorentz_uniform_bound(n: f64, m: f64) -> f64 {
    FRAC_1_PI / n + ln_one_plus_square(n * m) / (2.0 * PI * n)
}

/// Bound on `sup |Δₙ(x) - |x|/2|` over the whole line.
pub fn fourier_uniform_bound(n: f64) -> f64 {
    2.0 / (n * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::Integrator;
    use proptest::prelude::*;

    #[test]
    fn delta_r_examples() {
        assert!((delta_r(1.0, 0.0).unwrap() - FRAC_1_PI).abs() < 1e-17);
        assert!(delta_r(1.0, PI).unwrap().abs() < 1e-16);
        // sin(1)/(0.5π), mpmath
        assert!((delta_r(2.0, 0.5).unwrap() - 0.535_697_066_802_327_57).abs() < 1e-15);
        assert!(delta_r(0.0, 1.0).is_err());
        assert!(delta_r(-1.0, 1.0).is_err());
    }

    #[test]
    fn delta_r_matches_cosine_integral_oracle() {
        let q = Integrator::new(1e-14, 1e-14);
        for &(r, x) in &[(2.0, 0.5), (7.5, -1.3), (20.0, 4.9), (3.0, 1e-6)] {
            let oracle = q.integrate(|k: f64| (k * x).cos(), -r, r).unwrap().value / (2.0 * PI);
            assert!(
                (delta_r(r, x).unwrap() - oracle).abs() < 1e-12,
                "R={r} x={x}"
            );
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_n(3.0, 0.0).unwrap(), 0.0);
        assert!((theta_n(1.0, PI).unwrap() - 0.589_489_872_236_083_64).abs() < 1e-12);
        assert!((theta_n(1e7, 1.0).unwrap() - 0.5).abs() < 1e-7);
        assert!((theta_n(1e7, -1.0).unwrap() + 0.5).abs() < 1e-7);
        assert!(theta_n(0.0, 1.0).is_err());
    }

    #[test]
    fn big_delta_examples() {
        assert_eq!(big_delta_n(4.0, 0.0).unwrap(), 0.0);
        // Si(1)/π + (cos 1 - 1)/π, mpmath
        assert!((big_delta_n(1.0, 1.0).unwrap() - 0.154_821_273_750_925_78).abs() < 1e-12);
        let via_theta = Integrator::new(1e-13, 1e-13)
            .integrate(|t| theta_n(1.0, t).unwrap(), 0.0, 1.0)
            .unwrap()
            .value;
        assert!((big_delta_n(1.0, 1.0).unwrap() - via_theta).abs() < 1e-12);
        for &n in &[1.0, 7.0, 50.0] {
            for i in -50..=50 {
                let x = 0.1 * i as f64;
                let d = (big_delta_n(n, x).unwrap() - 0.5 * x.abs()).abs();
                assert!(d <= fourier_uniform_bound(n) + 1e-12);
            }
        }
        assert!(big_delta_n(-2.0, 1.0).is_err());
    }

    #[test]
    fn lorentz_examples() {
        let n = 7.0;
        assert!((lorentz_delta(1.0 / n, 0.0).unwrap() - n / PI).abs() < 1e-14);
        let eps = 0.3;
        assert!((lorentz_delta(eps, eps).unwrap() - 1.0 / (2.0 * PI * eps)).abs() < 1e-15);
        // ∫ over the line: integrate on [-L, L] and add the arctan tails
        let l = 50.0;
        let eps = 0.1;
        let body = Integrator::new(1e-14, 1e-14)
            .integrate_with_breaks(|x| lorentz_delta(eps, x).unwrap(), &[-l, -1.0, 0.0, 1.0, l])
            .unwrap()
            .value;
        let tails = 1.0 - 2.0 * (l / eps).atan() / PI;
        assert!((body + tails - 1.0).abs() < 1e-12);
        assert!(lorentz_delta(0.0, 1.0).is_err());
    }

    #[test]
    fn lorentz_primitive_examples() {
        assert_eq!(lorentz_theta(5.0, 0.0).unwrap(), 0.0);
        assert!((lorentz_theta(2.0, 1.0).unwrap() - 0.352_416_382_349_566_73).abs() < 1e-15);
        let quad = Integrator::new(1e-14, 1e-14)
            .integrate(|x| lorentz_delta(0.5, x).unwrap(), 0.0, 1.0)
            .unwrap()
            .value;
        assert!((lorentz_theta(2.0, 1.0).unwrap() - quad).abs() < 1e-13);
        assert!((lorentz_theta(1e9, 2.0).unwrap() - 0.5).abs() < 1e-9);

        assert_eq!(lorentz_big_delta(3.0, 0.0).unwrap(), 0.0);
        assert!((lorentz_big_delta(1e8, 1.5).unwrap() - 0.75).abs() < 1e-6);
        let (n, m) = (100.0, 5.0);
        let bound = lorentz_uniform_bound(n, m);
        for i in -500..=500 {
            let x = 0.01 * i as f64;
            let d = (lorentz_big_delta(n, x).unwrap() - 0.5 * x.abs()).abs();
            assert!(d <= bound, "x = {x}");
        }
        assert!(lorentz_theta(0.0, 1.0).is_err());
        assert!(lorentz_big_delta(-1.0, 1.0).is_err());
    }

    #[test]
    fn limit_objects() {
        let step = limit_object(LimitObject::StepTheta);
        assert_eq!(step.eval(0.0), 0.0);
        assert_eq!(step.eval(1e-9), 0.5);
        assert_eq!(step.eval(-4.0), -0.5);
        assert_eq!(limit_object(LimitObject::AbsHalf).eval(-3.0), 1.5);
    }

    #[test]
    fn primitives_are_anchored() {
        for fam in [
            RegFamily::fourier(3.0).unwrap(),
            RegFamily::lorentz(0.2).unwrap(),
        ] {
            assert_eq!(fam.primitive1(0.0), 0.0);
            assert_eq!(fam.primitive2(0.0), 0.0);
        }
    }

    #[test]
    fn primitive_consistency_by_differentiation() {
        use crate::testfn::central_derivative;
        for fam in [
            RegFamily::fourier(1.0).unwrap(),
            RegFamily::fourier(13.0).unwrap(),
            RegFamily::lorentz(0.5).unwrap(),
            RegFamily::lorentz(0.05).unwrap(),
        ] {
            for i in -40..=40 {
                let x = 0.1 * i as f64 + 0.0371;
                if x.abs() < 0.01 {
                    continue;
                }
                let d1 = central_derivative(|t| fam.primitive1(t), x, 1).unwrap();
                let d2 = central_derivative(|t| fam.primitive2(t), x, 1).unwrap();
                let dd = central_derivative(|t| fam.eval(t), x, 1).unwrap();
                assert!((d1 - fam.eval(x)).abs() < 1e-6, "{fam:?} x={x}");
                assert!((d2 - fam.primitive1(x)).abs() < 1e-6, "{fam:?} x={x}");
                assert!(
                    (dd - fam.derivative(x)).abs() < 1e-5 * (1.0 + dd.abs()),
                    "{fam:?} x={x}"
                );
            }
        }
    }

    #[test]
    fn primitive_consistency_by_quadrature() {
        let q = Integrator::new(1e-13, 1e-13);
        for &lambda in &[0.5, 4.0, 20.0] {
            for fam in [
                RegFamily::fourier(lambda).unwrap(),
                RegFamily::lorentz(1.0 / lambda).unwrap(),
            ] {
                for &x in &[-5.0, -1.7, -0.2, 0.3, 2.2, 5.0] {
                    let width = (PI / lambda).min(0.5);
                    let quad = q
                        .with_max_panel_width(width)
                        .integrate(|t| fam.eval(t), 0.0, x)
                        .unwrap()
                        .value;
                    assert!((fam.primitive1(x) - quad).abs() < 1e-8, "{fam:?} x={x}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn parity(lambda in 0.01f64..50.0, x in 0.0f64..10.0, lorentz in any::<bool>()) {
            let fam = if lorentz { RegFamily::lorentz(lambda) } else { RegFamily::fourier(lambda) }.unwrap();
            prop_assert!((fam.eval(x) - fam.eval(-x)).abs() <= 1e-14 * fam.eval(x).abs().max(1.0));
            prop_assert!((fam.primitive1(x) + fam.primitive1(-x)).abs() <= 1e-14);
            prop_assert!((fam.primitive2(x) - fam.primitive2(-x)).abs() <= 1e-14 * fam.primitive2(x).abs().max(1.0));
        }

        #[test]
        fn lemma4_bound_holds(n in 1u32..=200, x in -5.0f64..5.0) {
            let n = f64::from(n);
            let d = (big_delta_n(n, x).unwrap() - 0.5 * x.abs()).abs();
            prop_assert!(d <= fourier_uniform_bound(n) + 1e-9);
        }
    }
}
