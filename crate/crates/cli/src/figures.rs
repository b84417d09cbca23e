//! Figure datasets as `(x, value, series)` rows.

use std::f64::consts::FRAC_1_PI;

use deltakit::families::RegFamily;
use deltakit::testfn::{mollifier, smooth_step_down, smooth_step_up};

use crate::{CliError, Settings};

pub struct Row {
    pub x: f64,
    pub value: f64,
    pub series: String,
}

/// Index used by the high-frequency figures.
const HIGH_INDEX: f64 = 180.0;

/// Parameter values of the surface figure.
const SURFACE_PARAMS: std::ops::RangeInclusive<u32> = 1..=20;

fn series<F: Fn(f64) -> f64>(rows: &mut Vec<Row>, grid: &[f64], label: &str, f: F) {
    rows.extend(grid.iter().map(|&x| Row {
        x,
        value: f(x),
        series: label.to_string(),
    }));
}

fn first_five<F>(rows: &mut Vec<Row>, grid: &[f64], prefix: &str, make: F) -> Result<(), CliError>
where
    F: Fn(f64) -> Result<RegFamily, deltakit::Error>,
{
    for n in 1..=5 {
        let fam = make(f64::from(n))?;
        series(rows, grid, &format!("{prefix}_{n}"), |x| fam.eval(x));
    }
    Ok(())
}

pub fn dataset(fig: u8, settings: &Settings) -> Result<Vec<Row>, CliError> {
    let interval = match fig {
        8 | 9 => settings.interval_or(0.0, 5.0),
        _ => settings.interval_or(-5.0, 5.0),
    };
    let grid = interval.grid(settings.grid);
    let mut rows = Vec::new();
    match fig {
        1 => {
            for r in SURFACE_PARAMS {
                let fam = RegFamily::fourier(f64::from(r))?;
                series(&mut rows, &grid, &format!("R={r}"), |x| fam.eval(x));
            }
        }
        2 => {
            let fam = RegFamily::fourier(HIGH_INDEX)?;
            series(&mut rows, &grid, "delta_180", |x| fam.eval(x));
            let off_origin: Vec<f64> = grid.iter().copied().filter(|&x| x != 0.0).collect();
            series(&mut rows, &off_origin, "envelope_upper", |x| FRAC_1_PI / x);
            series(&mut rows, &off_origin, "envelope_lower", |x| -FRAC_1_PI / x);
        }
        3 => first_five(&mut rows, &grid, "delta", RegFamily::fourier)?,
        4 => {
            for n in 1..=5 {
                let fam = RegFamily::fourier(f64::from(n))?;
                series(&mut rows, &grid, &format!("theta_{n}"), |x| {
                    fam.primitive1(x)
                });
            }
        }
        5 => {
            let fam = RegFamily::fourier(HIGH_INDEX)?;
            series(&mut rows, &grid, "theta_180", |x| fam.primitive1(x));
        }
        6 => {
            for n in 1..=5 {
                let fam = RegFamily::fourier(f64::from(n))?;
                series(&mut rows, &grid, &format!("Delta_{n}"), |x| {
                    fam.primitive2(x)
                });
            }
        }
        7 => first_five(&mut rows, &grid, "lorentz_delta", RegFamily::lorentz_seq)?,
        8 => {
            series(&mut rows, &grid, "f_1", |x| mollifier(x - 1.0));
            series(&mut rows, &grid, "g_2", |x| mollifier(2.0 - x));
        }
        9 => {
            let up = smooth_step_up(1.0, 2.0)?;
            let down = smooth_step_down(3.0, 4.0)?;
            series(&mut rows, &grid, "F_1_2", |x| up.eval(x));
            series(&mut rows, &grid, "G_3_4", |x| down.eval(x));
            series(&mut rows, &grid, "F_1_2*G_3_4", |x| {
                up.eval(x) * down.eval(x)
            });
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown figure {other}; expected 1..9"
            )))
        }
    }
    Ok(rows)
}
