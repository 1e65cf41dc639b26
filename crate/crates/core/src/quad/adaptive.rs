//! Adaptive panel integration built on the 15-point Gauss-Kronrod pair.
//!
//! Panels are kept in a max-heap keyed by their error estimate; the worst
//! panel is bisected until the summed error bound meets the mixed
//! absolute/relative tolerance or the panel budget runs out. Initial
//! panelling honours caller-supplied breakpoints (peak and edge locations)
//! and a hard panel-width cap used to resolve oscillatory integrands.

#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;

#[allow(unused_imports)] // float intrinsics under no_std
use num_traits::Float;

use crate::error::{Error, Result};

/// 15-point Kronrod abscissae on [-1, 1] (positive half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// 7-point Gauss weights embedded in the Kronrod rule.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod weights.
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

/// QUADPACK-style conservative rescaling of the raw Kronrod-Gauss gap.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One Gauss-Kronrod evaluation over [a, b]: (value, error estimate).
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for (j, wg) in WG.iter().enumerate().take(3) {
        let jtw = j * 2 + 1;
        let x = half * XGK[jtw];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    res_gauss += WG[3] * f_center;

    for j in 0..4 {
        let jtwm1 = j * 2;
        let x = half * XGK[jtwm1];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_kronrod += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    )
}

/// Heap entry ordered by error estimate (max-heap).
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then(self.a.total_cmp(&other.a))
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    #[allow(dead_code)]
    pub panels: usize,
}

/// Compensated (Kahan) accumulator; panel counts can reach 2^20 and the
/// target absolute tolerances sit near the f64 noise floor.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Adaptively integrates `f` over `[a, b]`.
///
/// `breakpoints` seed the initial panelling (values outside `(a, b)` are
/// ignored); `max_width` caps every panel so oscillations of a known period
/// stay resolved; the loop stops once the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    max_width: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    debug_assert!(a < b);
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    for &x in breakpoints {
        if x > a && x < b {
            edges.push(x);
        }
    }
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut value = Kahan::default();
    let mut err_sum = Kahan::default();
    let mut n_panels = 0usize;

    let push = |heap: &mut BinaryHeap<Panel>,
                value: &mut Kahan,
                err_sum: &mut Kahan,
                n: &mut usize,
                f: &mut F,
                lo: f64,
                hi: f64| {
        let (v, e) = gk15(f, lo, hi);
        value.add(v);
        err_sum.add(e);
        *n += 1;
        heap.push(Panel {
            a: lo,
            b: hi,
            value: v,
            err: e,
        });
    };

    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let span = hi - lo;
        let chunks = if max_width.is_finite() && span > max_width {
            (span / max_width).ceil() as usize
        } else {
            1
        };
        for k in 0..chunks {
            let x0 = lo + span * (k as f64) / (chunks as f64);
            let x1 = if k + 1 == chunks {
                hi
            } else {
                lo + span * ((k + 1) as f64) / (chunks as f64)
            };
            push(
                &mut heap,
                &mut value,
                &mut err_sum,
                &mut n_panels,
                &mut f,
                x0,
                x1,
            );
        }
    }

    loop {
        let tol = abs_tol.max(rel_tol * value.sum.abs());
        if err_sum.sum <= tol {
            return Ok(Estimate {
                value: value.sum,
                abs_error: err_sum.sum,
                panels: n_panels,
            });
        }
        if n_panels >= max_panels {
            return Err(Error::NonConvergence {
                estimate: value.sum,
                error: err_sum.sum,
            });
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => {
                return Ok(Estimate {
                    value: value.sum,
                    abs_error: err_sum.sum,
                    panels: n_panels,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted floating-point resolution; accept as-is.
            let tol = abs_tol.max(rel_tol * value.sum.abs());
            if err_sum.sum <= tol || heap.is_empty() {
                return Ok(Estimate {
                    value: value.sum,
                    abs_error: err_sum.sum,
                    panels: n_panels,
                });
            }
            continue;
        }
        value.add(-worst.value);
        err_sum.add(-worst.err);
        push(
            &mut heap,
            &mut value,
            &mut err_sum,
            &mut n_panels,
            &mut f,
            worst.a,
            mid,
        );
        push(
            &mut heap,
            &mut value,
            &mut err_sum,
            &mut n_panels,
            &mut f,
            mid,
            worst.b,
        );
    }
}
