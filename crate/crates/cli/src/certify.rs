//! Named numerical certificates.

use std::f64::consts::{FRAC_PI_2, PI};

use clap::ValueEnum;
use deltakit::families::lorentz_uniform_bound;
use deltakit::seqdist::{
    check_rate, restrict_check_zero_with, CheckOptions, FundamentalSeq, GridReport, NSampling,
};
use deltakit::special::{dirichlet_tail, fubini_s, si, sinc_sq_integral, FubiniOrder};
use serde_json::{json, Value};

use crate::{CliError, Report, Settings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Certificate {
    /// `sup |Δₙ - |x|/2| ≤ 2/(nπ)` for n = 1..n_max. Params: `n_max` (200).
    #[value(name = "lemma4")]
    SincUniformBound,
    /// `sup |Δ̃ₙ - |x|/2|` below its closed-form bound on `[-M, M]`. Params: `n_max` (200).
    #[value(name = "lemma5_rate")]
    LorentzUniformRate,
    /// `|δ̃ₙ(x)| ≤ δ̃ₙ(a)` for `|x| ≥ a`. Params: `a,n_max` (0.5, 1000).
    #[value(name = "lemma6_lorentz")]
    LorentzOffOrigin,
    /// `|θₙ(x) - θ(x)| ≤ 2/(πna)` for `|x| ≥ a`. Params: `a,n_max` (1, 1000).
    #[value(name = "lemma6_theta")]
    StepOffOrigin,
    /// Both integration orders of `S(R)` agree. Params: `R` (10).
    #[value(name = "fubini")]
    Fubini,
    /// `|∫ₓ^∞ sin t/t dt| ≤ 2/x`. Params: list of `x` (10,100,1e3,1e4,1e6).
    #[value(name = "si_tail")]
    SiTail,
    /// `Si(t) = (1 - cos t)/t + ∫₀^{t/2} sinc²`. Params: list of `n` (1,5,20).
    #[value(name = "eq23_identity")]
    SiIdentity,
}

impl Certificate {
    fn label(self) -> &'static str {
        match self {
            Certificate::SincUniformBound => "lemma4",
            Certificate::LorentzUniformRate => "lemma5_rate",
            Certificate::LorentzOffOrigin => "lemma6_lorentz",
            Certificate::StepOffOrigin => "lemma6_theta",
            Certificate::Fubini => "fubini",
            Certificate::SiTail => "si_tail",
            Certificate::SiIdentity => "eq23_identity",
        }
    }
}

fn param(params: &[f64], idx: usize, default: f64) -> f64 {
    params.get(idx).copied().unwrap_or(default)
}

fn index_param(params: &[f64], idx: usize, default: u32, name: &str) -> Result<u32, CliError> {
    let v = param(params, idx, f64::from(default));
    if v.fract() != 0.0 || !(2.0..=1e7).contains(&v) {
        return Err(CliError::Config(format!(
            "{name} must be an integer in [2, 1e7], got {v}"
        )));
    }
    Ok(v as u32)
}

fn grid_value(report: &GridReport) -> Value {
    serde_json::to_value(report).expect("grid report serializes")
}

pub fn run(cert: Certificate, params: &[f64], settings: &Settings) -> Result<Report, CliError> {
    let mut config = settings.echo();
    config["certificate"] = json!(cert.label());
    config["params"] = json!(params);
    let opts = CheckOptions {
        grid_points: settings.grid,
        sampling: NSampling::Auto,
    };

    let (results, passed) = match cert {
        Certificate::SincUniformBound => {
            let n_max = index_param(params, 0, 200, "n_max")?;
            let interval = settings.interval_or(-5.0, 5.0);
            let ns: Vec<u32> = (1..=n_max).collect();
            let rep = check_rate(
                &FundamentalSeq::fourier_kernel(),
                interval,
                &ns,
                settings.grid,
                |n| 2.0 / (f64::from(n) * PI) + 1e-9,
                "2/(n pi) + 1e-9",
            )?;
            (vec![grid_value(&rep)], rep.passed())
        }
        Certificate::LorentzUniformRate => {
            let n_max = index_param(params, 0, 200, "n_max")?;
            let interval = settings.interval_or(-5.0, 5.0);
            let m = interval.lo().abs().max(interval.hi().abs());
            let ns: Vec<u32> = (1..=n_max).collect();
            let rep = check_rate(
                &FundamentalSeq::lorentz(),
                interval,
                &ns,
                settings.grid,
                |n| lorentz_uniform_bound(f64::from(n), m) * (1.0 + 1e-12),
                "1/(pi n) + ln(1 + n^2 M^2)/(2 pi n)",
            )?;
            (vec![grid_value(&rep)], rep.passed())
        }
        Certificate::LorentzOffOrigin | Certificate::StepOffOrigin => {
            let (seq, default_a) = if cert == Certificate::LorentzOffOrigin {
                (FundamentalSeq::lorentz(), 0.5)
            } else {
                (FundamentalSeq::fourier_kernel(), 1.0)
            };
            let a = param(params, 0, default_a);
            let n_max = index_param(params, 1, 1000, "n_max")?;
            let rep = restrict_check_zero_with(&seq, a, n_max, &opts)?;
            (vec![grid_value(&rep)], rep.passed())
        }
        Certificate::Fubini => {
            let r = param(params, 0, 10.0);
            let tol = settings.tol.unwrap_or(1e-8);
            let x_first = fubini_s(r, FubiniOrder::XFirst)?;
            let alpha_first = fubini_s(r, FubiniOrder::AlphaFirst)?;
            let gap = (x_first.value - alpha_first.value).abs();
            let results = vec![
                json!({"order": "x_first", "result": x_first}),
                json!({"order": "alpha_first", "result": alpha_first}),
                json!({"order_gap": gap, "distance_to_half_pi": (x_first.value - FRAC_PI_2).abs()}),
            ];
            (results, gap <= tol)
        }
        Certificate::SiTail => {
            let xs: Vec<f64> = if params.is_empty() {
                vec![10.0, 100.0, 1e3, 1e4, 1e6]
            } else {
                params.to_vec()
            };
            let mut ok = true;
            let mut results = Vec::new();
            for x in xs {
                let tail = dirichlet_tail(x)?;
                let bound = 2.0 / x;
                ok &= tail.abs() <= bound;
                results.push(json!({"x": x, "si": si(x), "tail": tail, "bound": bound}));
            }
            (results, ok)
        }
        Certificate::SiIdentity => {
            let ns: Vec<f64> = if params.is_empty() {
                vec![1.0, 5.0, 20.0]
            } else {
                params.to_vec()
            };
            let tol = settings.tol.unwrap_or(1e-9);
            let interval = settings.interval_or(0.1, 5.0);
            if interval.lo() <= 0.0 {
                return Err(CliError::Config(
                    "identity interval must lie in x > 0".into(),
                ));
            }
            let grid = interval.grid(settings.grid);
            let mut ok = true;
            let mut results = Vec::new();
            for n in ns {
                let mut worst = 0.0_f64;
                for &x in &grid {
                    let t = n * x;
                    let residual = si(t) - (1.0 - t.cos()) / t - sinc_sq_integral(0.0, 0.5 * t)?;
                    worst = worst.max(residual.abs());
                }
                ok &= worst <= tol;
                results.push(json!({"n": n, "max_residual": worst}));
            }
            (results, ok)
        }
    };
    Ok(Report {
        command: "certify",
        config,
        results,
        passed,
    })
}
