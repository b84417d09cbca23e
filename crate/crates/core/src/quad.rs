//! Adaptive Gauss–Kronrod panel quadrature.
//!
//! The interval is first tiled into panels no wider than a configurable cap
//! (half an oscillation period for the oscillatory kernels), then the panel
//! with the largest error estimate is bisected until the summed estimate
//! meets the tolerance. Panel values are summed pairwise in left-to-right
//! order, so a given panel set always produces the same bits regardless of
//! how many threads evaluated it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Gauss–Kronrod 15-point abscissae (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Weights of the embedded 7-point Gauss rule (odd Kronrod nodes).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of a one-dimensional quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// True when the raw Kronrod–Gauss difference is already below the
    /// roundoff floor; bisecting such a panel cannot improve anything.
    at_floor: bool,
}

/// Applies the 15-point Kronrod rule with its embedded 7-point Gauss rule.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = eval_finite(f, center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval_finite(f, center - dx)?;
        let f2 = eval_finite(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let value = res_k * half;
    let res_abs = res_abs * width;
    let res_asc = res_asc * width;
    let raw = ((res_k - res_g) * half).abs();

    let mut error = raw;
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let at_floor = error <= floor;
    if at_floor {
        error = floor;
    }

    Ok(Panel {
        lo,
        hi,
        value,
        error,
        at_floor,
    })
}

fn eval_finite<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite { x, value: y })
    }
}

/// Sums in a balanced binary tree; the order depends only on `values.len()`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (left, right) = values.split_at(n / 2);
            pairwise_sum(left) + pairwise_sum(right)
        }
    }
}

struct HeapEntry {
    error: f64,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Configuration for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the width of every initial panel.
    pub max_panel_width: f64,
    /// Hard cap on the number of panels after refinement.
    pub max_panels: usize,
    /// Initial panel counts at or above this are evaluated on the rayon pool.
    pub parallel_threshold: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_panel_width: f64::INFINITY,
            max_panels: 200_000,
            parallel_threshold: 256,
        }
    }
}

impl Integrator {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_max_panel_width(mut self, width: f64) -> Self {
        self.max_panel_width = width;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Runs everything on the calling thread.
    pub fn sequential(mut self) -> Self {
        self.parallel_threshold = usize::MAX;
        self
    }

    /// Integrates `f` over `[a, b]`; `b < a` yields the negated integral.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadResult>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.integrate_with_breaks(f, &[a, b])
    }

    /// Integrates over `[breaks[0], breaks[last]]`, forcing panel edges at
    /// every interior break. Breaks must be sorted (either direction is
    /// accepted as long as it is monotone).
    pub fn integrate_with_breaks<F>(&self, f: F, breaks: &[f64]) -> Result<QuadResult>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        if breaks.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "breaks",
                value: breaks.len() as f64,
                reason: "at least two break points are required",
            });
        }
        if breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "breaks",
                value: f64::NAN,
                reason: "integration limits must be finite",
            });
        }
        let first = breaks[0];
        let last = breaks[breaks.len() - 1];
        if first == last {
            return Ok(QuadResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                panels_used: 1,
            });
        }
        let (sign, mut pts): (f64, Vec<f64>) = if last > first {
            (1.0, breaks.to_vec())
        } else {
            (-1.0, breaks.iter().rev().copied().collect())
        };
        pts.dedup();
        if pts.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter {
                name: "breaks",
                value: f64::NAN,
                reason: "break points must be monotone",
            });
        }

        let mut edges = Vec::new();
        for w in pts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let pieces = if self.max_panel_width.is_finite() && self.max_panel_width > 0.0 {
                ((hi - lo) / self.max_panel_width).ceil().max(1.0) as usize
            } else {
                1
            };
            let step = (hi - lo) / pieces as f64;
            for i in 0..pieces {
                let a = lo + step * i as f64;
                let b = if i + 1 == pieces {
                    hi
                } else {
                    lo + step * (i + 1) as f64
                };
                edges.push((a, b));
            }
        }

        let mut panels: Vec<Panel> = if edges.len() >= self.parallel_threshold {
            edges
                .par_iter()
                .map(|&(a, b)| kronrod15(&f, a, b))
                .collect::<Result<_>>()?
        } else {
            edges
                .iter()
                .map(|&(a, b)| kronrod15(&f, a, b))
                .collect::<Result<_>>()?
        };

        let mut heap: BinaryHeap<HeapEntry> = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.at_floor)
            .map(|(index, p)| HeapEntry {
                error: p.error,
                index,
            })
            .collect();

        let mut total_value: f64 = panels.iter().map(|p| p.value).sum();
        let mut total_error: f64 = panels.iter().map(|p| p.error).sum();
        let max_panels = self.max_panels.max(panels.len());

        while panels.len() < max_panels {
            let target = self.abs_tol.max(self.rel_tol * total_value.abs());
            if total_error <= target {
                break;
            }
            let Some(entry) = heap.pop() else { break };
            let parent = panels[entry.index];
            let mid = 0.5 * (parent.lo + parent.hi);
            if mid <= parent.lo || mid >= parent.hi {
                continue;
            }
            let left = kronrod15(&f, parent.lo, mid)?;
            let right = kronrod15(&f, mid, parent.hi)?;
            total_value += left.value + right.value - parent.value;
            total_error += left.error + right.error - parent.error;

            panels[entry.index] = left;
            let right_index = panels.len();
            panels.push(right);
            if !left.at_floor {
                heap.push(HeapEntry {
                    error: left.error,
                    index: entry.index,
                });
            }
            if !right.at_floor {
                heap.push(HeapEntry {
                    error: right.error,
                    index: right_index,
                });
            }
        }

        panels.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        let values: Vec<f64> = panels.iter().map(|p| p.value).collect();
        let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
        Ok(QuadResult {
            value: sign * pairwise_sum(&values),
            abs_error_estimate: pairwise_sum(&errors),
            panels_used: panels.len(),
        })
    }
}
