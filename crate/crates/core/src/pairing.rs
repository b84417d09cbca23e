//! Pairing of kernels with test functions, `φ[f] = ∫ φ(x) f(x) dx`.
//!
//! Integration runs over the support of `f` only, with a forced panel edge
//! at the origin where every kernel concentrates. The sinc kernel is
//! integrated on panels no wider than half its oscillation period `π/R`.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_1_PI, PI};

use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::families::RegFamily;
use crate::quad::Integrator;
use crate::special::si;
use crate::testfn::{central_derivative, difference_quotient, Interval, TestFunction};

/// Value of `φ[f]` with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Regularization parameter (`R` or `ε`) when the kernel has one.
    pub param: Option<f64>,
    pub panels_used: usize,
}

fn pairing_engine() -> Integrator {
    Integrator::new(1e-12, 1e-12)
}

/// Support endpoints plus any extra break points strictly inside.
fn breaks_within(support: Interval, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![support.lo(), support.hi()];
    pts.extend(
        extra
            .iter()
            .copied()
            .filter(|&x| x > support.lo() && x < support.hi()),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn pair_on<F>(
    engine: Integrator,
    phi: F,
    f: &TestFunction,
    extra: &[f64],
    param: Option<f64>,
) -> Result<PairingResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    let breaks = breaks_within(f.support(), extra);
    let q = engine.integrate_with_breaks(|x| phi(x) * f.eval(x), &breaks)?;
    Ok(PairingResult {
        value: q.value,
        abs_error_estimate: q.abs_error_estimate,
        param,
        panels_used: q.panels_used,
    })
}

/// `φ[f]` for a locally integrable `φ`.
pub fn pair<F>(phi: F, f: &TestFunction) -> Result<PairingResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    let engine = pairing_engine().with_max_panel_width(f.support().width() / 16.0);
    pair_on(engine, phi, f, &[0.0], None)
}

/// `δ_R[f] = ∫ sin(Rx)/(πx) f(x) dx`.
pub fn pair_delta_r(r: f64, f: &TestFunction) -> Result<PairingResult> {
    let kernel = RegFamily::fourier(r)?;
    let engine = pairing_engine().with_max_panel_width(PI / r);
    pair_on(engine, |x| kernel.eval(x), f, &[0.0], Some(r))
}

/// `δ̃^ε[f] = ∫ (ε/π)/(x² + ε²) f(x) dx`, with panel edges at `±ε·10^j`.
pub fn pair_lorentz(eps: f64, f: &TestFunction) -> Result<PairingResult> {
    let kernel = RegFamily::lorentz(eps)?;
    let mut extra = vec![0.0];
    let mut scale = eps;
    let reach = f.support().lo().abs().max(f.support().hi().abs());
    while scale < reach {
        extra.push(scale);
        extra.push(-scale);
        scale *= 10.0;
    }
    let engine = pairing_engine().with_max_panel_width(f.support().width() / 16.0);
    pair_on(engine, |x| kernel.eval(x), f, &extra, Some(eps))
}

/// The two pieces of `δ_R[f]` over the symmetric hull `[-M, M]` of the
/// support: an oscillatory integral of the difference quotient, which
/// vanishes as `R → ∞`, and `f(0)/π ∫ sin(Rx)/x`, which tends to `f(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub oscillatory: PairingResult,
    pub dirichlet: f64,
    pub half_width: f64,
}

impl Decomposition {
    pub fn total(&self) -> f64 {
        self.oscillatory.value + self.dirichlet
    }
}

pub fn pair_decomposed(r: f64, f: &TestFunction) -> Result<Decomposition> {
    require_positive("R", r)?;
    let support = f.support();
    let m = support.lo().abs().max(support.hi().abs());
    let g = difference_quotient(f);
    let q = pairing_engine()
        .with_max_panel_width(PI / r)
        .integrate_with_breaks(|x| FRAC_1_PI * (r * x).sin() * g.eval(x), &[-m, 0.0, m])?;
    let f0 = f.eval(0.0);
    Ok(Decomposition {
        oscillatory: PairingResult {
            value: q.value,
            abs_error_estimate: q.abs_error_estimate,
            param: Some(r),
            panels_used: q.panels_used,
        },
        dirichlet: 2.0 * FRAC_1_PI * f0 * si(r * m),
        half_width: m,
    })
}

/// Majorant of `|δ̃^ε[f] - f(0)|`:
/// `(Sε/π)(ln(M² + ε²) - ln ε²) + |2 arctan(M/ε)/π - 1|·|f(0)|`
/// where `S = sup |g|` on `[-M, M]` is taken on a dense grid.
pub fn lorentz_majorant(eps: f64, f: &TestFunction) -> Result<f64> {
    require_positive("eps", eps)?;
    let support = f.support();
    let m = support.lo().abs().max(support.hi().abs());
    let g = difference_quotient(f);
    let s = Interval::symmetric(m)?
        .grid(20_001)
        .into_iter()
        .map(|x| g.eval(x).abs())
        .fold(0.0, f64::max);
    let log_part = s * eps * FRAC_1_PI * ((m * m + eps * eps).ln() - (eps * eps).ln());
    let f0 = f.eval(0.0);
    let arctan_part = (2.0 * (m / eps).atan() * FRAC_1_PI - 1.0).abs() * f0.abs();
    Ok(log_part + arctan_part)
}

/// Log-log least-squares fit `err ≈ A·param^p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub samples: Vec<(f64, f64)>,
    pub fitted_exponent: f64,
    pub log_intercept: f64,
    /// Root-mean-square residual in natural-log units.
    pub fit_residual: f64,
    /// Samples with an exactly zero error, left out of the fit.
    pub excluded: usize,
}

impl RateFit {
    pub fn fit(samples: Vec<(f64, f64)>) -> Result<Self> {
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(p, e)| *p > 0.0 && e.abs() > 0.0)
            .map(|(p, e)| (p.ln(), e.abs().ln()))
            .collect();
        let excluded = samples.len() - pts.len();
        if pts.len() < 2 {
            return Err(Error::FitFailure { usable: pts.len() });
        }
        let (slope, intercept) = least_squares_line(&pts)?;
        let ss: f64 = pts
            .iter()
            .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
            .sum();
        Ok(Self {
            samples,
            fitted_exponent: slope,
            log_intercept: intercept,
            fit_residual: (ss / pts.len() as f64).sqrt(),
            excluded,
        })
    }
}

/// Returns `(slope, intercept)` of the least-squares line through `pts`.
fn least_squares_line(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * n {
        return Err(Error::SingularFit("abscissae are all equal"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Decay of `I(R) = ∫ g(x) sin(Rx) dx` over an interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    /// `(R, I(R))` in input order.
    pub integrals: Vec<(f64, f64)>,
    /// `|g(a)| + |g(b)| + ∫|g'|`, so that `|I(R)| ≤ constant / R`.
    pub constant: f64,
    pub bound_satisfied: bool,
    /// `None` when fewer than two integrals are nonzero.
    pub fit: Option<RateFit>,
}

pub fn lemma2_decay<G>(g: G, interval: Interval, r_list: &[f64]) -> Result<DecayReport>
where
    G: Fn(f64) -> f64 + Sync,
{
    if r_list.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "r_list",
            value: r_list.len() as f64,
            reason: "need at least two frequencies",
        });
    }
    if r_list
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(Ordering::Greater))
        || r_list[0].partial_cmp(&0.0) != Some(Ordering::Greater)
    {
        return Err(Error::InvalidParameter {
            name: "r_list",
            value: r_list[0],
            reason: "frequencies must be positive and strictly increasing",
        });
    }
    let (a, b) = (interval.lo(), interval.hi());
    let variation = pairing_engine()
        .with_max_panel_width(interval.width() / 64.0)
        .integrate(
            |x| {
                central_derivative(&g, x, 1)
                    .map(f64::abs)
                    .unwrap_or(f64::NAN)
            },
            a,
            b,
        )?
        .value;
    let constant = g(a).abs() + g(b).abs() + variation;

    let mut integrals = Vec::with_capacity(r_list.len());
    let mut bound_satisfied = true;
    for &r in r_list {
        let q = pairing_engine().with_max_panel_width(PI / r).integrate(
            |x| g(x) * (r * x).sin(),
            a,
            b,
        )?;
        if q.value.abs() > constant / r + q.abs_error_estimate {
            bound_satisfied = false;
        }
        integrals.push((r, q.value));
    }
    let fit = RateFit::fit(integrals.clone()).ok();
    Ok(DecayReport {
        integrals,
        constant,
        bound_satisfied,
        fit,
    })
}

/// Rate law assumed when extrapolating a limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationMode {
    /// `value ≈ L + c/param` (sinc kernel, `param = R`).
    #[default]
    InverseParam,
    /// `value ≈ L + c·ε·ln(1/ε)` (Lorentzian, `param = ε`).
    LogCorrected,
}

/// Least-squares fit of `L + c·φ(param)`; returns `L`.
pub fn extrapolate_limit(samples: &[(f64, f64)], mode: ExtrapolationMode) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples.len() as f64,
            reason: "need at least three samples",
        });
    }
    let increasing = samples.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = samples.windows(2).all(|w| w[1].0 < w[0].0);
    if !(increasing || decreasing)
        || samples
            .iter()
            .any(|s| s.0.partial_cmp(&0.0) != Some(Ordering::Greater))
    {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: f64::NAN,
            reason: "parameters must be positive and strictly monotone",
        });
    }
    let basis = |p: f64| match mode {
        ExtrapolationMode::InverseParam => 1.0 / p,
        ExtrapolationMode::LogCorrected => -p * p.ln(),
    };
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(p, v)| (basis(p), v)).collect();
    let (_, intercept) = least_squares_line(&pts)?;
    Ok(intercept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plateau_bump() -> TestFunction {
        TestFunction::bump(-2.0, -1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn pair_examples() {
        let f = plateau_bump();
        assert_eq!(pair(|_| 0.0, &f).unwrap().value, 0.0);
        let area = pair(|_| 1.0, &f).unwrap();
        assert!(area.value > 2.0 && area.value < 4.0);
        // F_{-2,-1} and G_{1,2} are point-symmetric about their midpoints,
        // so each transition contributes exactly half its width.
        assert!((area.value - 3.0).abs() < 1e-12);
        let near = pair(|x| RegFamily::fourier(1000.0).unwrap().eval(x), &f).unwrap();
        assert!((near.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn pair_reports_non_finite_kernel() {
        let f = plateau_bump();
        let err = pair(|x| 1.0 / x, &f).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn pair_delta_r_examples() {
        let f = plateau_bump();
        let v = pair_delta_r(500.0, &f).unwrap();
        assert!((v.value - 1.0).abs() < 2e-2);
        assert_eq!(v.param, Some(500.0));
        let away = TestFunction::bump(1.0, 1.25, 1.75, 2.0).unwrap();
        assert!(pair_delta_r(500.0, &away).unwrap().value.abs() < 1e-2);
        assert!(pair_delta_r(0.0, &f).is_err());
    }

    #[test]
    fn cosine_kernel_gives_same_pairing() {
        let f = plateau_bump();
        let r = 10.0;
        let inner = Integrator::new(1e-14, 1e-14).sequential();
        let cosine = |x: f64| {
            inner
                .integrate(|k: f64| (k * x).cos(), -r, r)
                .unwrap()
                .value
                / (2.0 * PI)
        };
        let by_cos = pair_on(
            pairing_engine().with_max_panel_width(PI / r),
            cosine,
            &f,
            &[0.0],
            None,
        )
        .unwrap();
        let by_sin = pair_delta_r(r, &f).unwrap();
        assert!((by_cos.value - by_sin.value).abs() < 1e-11);
    }

    #[test]
    fn decomposition_identity() {
        let corpus = [
            plateau_bump(),
            TestFunction::bump(-1.0, 1.0, 2.0, 3.0).unwrap(),
            TestFunction::bump(0.5, 1.0, 2.0, 3.0).unwrap(),
        ];
        for f in &corpus {
            for r in [1.0, 20.0, 100.0] {
                let d = pair_decomposed(r, f).unwrap();
                let direct = pair_delta_r(r, f).unwrap();
                assert!((d.total() - direct.value).abs() < 1e-8, "R={r}");
            }
        }
    }

    #[test]
    fn decomposition_limits() {
        let f = plateau_bump();
        let big = pair_decomposed(2000.0, &f).unwrap();
        assert!((big.dirichlet - 1.0).abs() < 1e-3);
        assert!(big.oscillatory.value.abs() < 1e-3);
        assert_eq!(big.half_width, 2.0);
        let small = pair_decomposed(10.0, &f).unwrap();
        assert!(big.oscillatory.value.abs() < small.oscillatory.value.abs());
    }

    #[test]
    fn pair_lorentz_examples() {
        let f = plateau_bump();
        let v = pair_lorentz(1e-3, &f).unwrap();
        assert!((v.value - 1.0).abs() < 5e-3);
        let away = TestFunction::bump(1.0, 1.25, 1.75, 2.0).unwrap();
        let w1 = pair_lorentz(1e-2, &away).unwrap().value.abs();
        let w2 = pair_lorentz(1e-4, &away).unwrap().value.abs();
        assert!(w2 < w1 && w2 < 1e-4);
        for eps in [1e-1, 1e-2, 1e-3] {
            let err = (pair_lorentz(eps, &f).unwrap().value - 1.0).abs();
            assert!(err <= lorentz_majorant(eps, &f).unwrap(), "eps={eps}");
        }
        assert!(pair_lorentz(-1.0, &f).is_err());
    }

    #[test]
    fn linearity() {
        let f = plateau_bump();
        let h = TestFunction::bump(-0.5, 0.5, 1.5, 3.0).unwrap();
        let (a, b) = (0.7, -2.3);
        let combo = TestFunction::linear_combination(a, &f, b, &h);
        let r = 40.0;
        let lhs = pair_delta_r(r, &combo).unwrap();
        let pf = pair_delta_r(r, &f).unwrap();
        let ph = pair_delta_r(r, &h).unwrap();
        let tol = lhs.abs_error_estimate
            + a.abs() * pf.abs_error_estimate
            + b.abs() * ph.abs_error_estimate;
        assert!((lhs.value - (a * pf.value + b * ph.value)).abs() <= tol.max(1e-13));
    }

    #[test]
    fn lemma2_examples() {
        let zero = lemma2_decay(|_| 0.0, Interval::new(-1.0, 1.0).unwrap(), &[1.0, 10.0]).unwrap();
        assert!(zero.integrals.iter().all(|&(_, v)| v == 0.0));
        assert!(zero.fit.is_none());

        let r = 10.0;
        let lin = lemma2_decay(|x| x, Interval::new(-1.0, 1.0).unwrap(), &[r, 20.0]).unwrap();
        let exact = 2.0 * (r.sin() - r * r.cos()) / (r * r);
        assert!((lin.integrals[0].1 - exact).abs() < 1e-10);
        assert!(lin.bound_satisfied);
        assert!((lin.constant - 4.0).abs() < 1e-9);

        let g = difference_quotient(&plateau_bump());
        let rs: Vec<f64> = (0..=30)
            .map(|i| 10.0 * 10f64.powf(i as f64 / 10.0))
            .collect();
        let rep = lemma2_decay(|x| g.eval(x), Interval::new(-2.0, 2.0).unwrap(), &rs).unwrap();
        assert!(rep.bound_satisfied);
        let fit = rep.fit.unwrap();
        assert!(
            fit.fitted_exponent <= -0.8,
            "exponent {}",
            fit.fitted_exponent
        );

        assert!(lemma2_decay(|x| x, Interval::new(-1.0, 1.0).unwrap(), &[5.0]).is_err());
        assert!(lemma2_decay(|x| x, Interval::new(-1.0, 1.0).unwrap(), &[5.0, 5.0]).is_err());
    }

    #[test]
    fn rate_fit_recovers_power_law() {
        let samples: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&r| (r, 3.0 / r))
            .collect();
        let fit = RateFit::fit(samples).unwrap();
        assert!((fit.fitted_exponent + 1.0).abs() < 1e-12);
        assert!(fit.fit_residual < 1e-12);
        let with_zero = RateFit::fit(vec![(1.0, 0.0), (2.0, 0.5), (4.0, 0.25)]).unwrap();
        assert_eq!(with_zero.excluded, 1);
        assert!(RateFit::fit(vec![(1.0, 0.0), (2.0, 0.5)]).is_err());
    }

    #[test]
    fn extrapolation_examples() {
        let constant = [(1.0, 0.25), (2.0, 0.25), (4.0, 0.25)];
        assert!(
            (extrapolate_limit(&constant, ExtrapolationMode::InverseParam).unwrap() - 0.25).abs()
                < 1e-15
        );

        let f = plateau_bump();
        let samples: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&r| (r, pair_delta_r(r, &f).unwrap().value))
            .collect();
        let limit = extrapolate_limit(&samples, ExtrapolationMode::InverseParam).unwrap();
        assert!((limit - 1.0).abs() < 1e-3);

        let exact = [
            (10.0, 2.0 + 3.0 / 10.0),
            (20.0, 2.0 + 3.0 / 20.0),
            (50.0, 2.0 + 3.0 / 50.0),
        ];
        assert!(
            (extrapolate_limit(&exact, ExtrapolationMode::InverseParam).unwrap() - 2.0).abs()
                < 1e-13
        );
        let logs: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&e: &f64| (e, 1.0 + 0.7 * e * (1.0 / e).ln()))
            .collect();
        assert!(
            (extrapolate_limit(&logs, ExtrapolationMode::LogCorrected).unwrap() - 1.0).abs()
                < 1e-13
        );

        assert!(extrapolate_limit(&constant[..2], ExtrapolationMode::InverseParam).is_err());
        let unsorted = [(1.0, 0.0), (3.0, 0.0), (2.0, 0.0)];
        assert!(extrapolate_limit(&unsorted, ExtrapolationMode::InverseParam).is_err());
    }

    #[test]
    fn extrapolated_pairing_recovers_value_at_origin() {
        let f = TestFunction::bump(-1.0, 1.0, 2.0, 3.0).unwrap();
        let samples: Vec<(f64, f64)> = [100.0, 200.0, 400.0, 800.0]
            .iter()
            .map(|&r| (r, pair_delta_r(r, &f).unwrap().value))
            .collect();
        let limit = extrapolate_limit(&samples, ExtrapolationMode::InverseParam).unwrap();
        assert!((limit - f.eval(0.0)).abs() < 1e-4, "limit {limit}");
    }
}
