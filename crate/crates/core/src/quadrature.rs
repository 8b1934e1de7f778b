//! Adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Intervals are bisected until each one's Kronrod/Gauss discrepancy is
/// below its share of `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, Error> {
    integrate_from_pieces(f, a, b, tol, 1)
}

/// Like [`integrate`], but starts from `pieces` equal subintervals.
///
/// Oscillatory integrands (trigonometric polynomials of moderate degree over a
/// full period) need a few initial pieces so the first error estimate is meaningful.
pub fn integrate_from_pieces<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    pieces: usize,
) -> Result<f64, Error> {
    if a == b {
        return Ok(0.0);
    }
    let length = (b - a).abs();
    let pieces = pieces.max(1);
    let step = (b - a) / pieces as f64;
    let mut stack: Vec<(f64, f64)> = (0..pieces)
        .rev()
        .map(|i| {
            let lo = a + step * i as f64;
            let hi = if i + 1 == pieces { b } else { a + step * (i + 1) as f64 };
            (lo, hi)
        })
        .collect();
    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut processed = 0;
    while let Some((lo, hi)) = stack.pop() {
        processed += 1;
        let (value, err) = gk15(&f, lo, hi);
        if !value.is_finite() {
            return Err(Error::Quadrature {
                a,
                b,
                estimate: f64::INFINITY,
            });
        }
        let share = tol * ((hi - lo).abs() / length);
        let mid = 0.5 * (lo + hi);
        let splittable = mid != lo && mid != hi;
        if err <= share || !splittable {
            if !splittable && err > share && err > tol {
                return Err(Error::Quadrature { a, b, estimate: err });
            }
            // Kahan summation keeps thousands of leaf contributions exact enough.
            let y = value - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
        } else {
            if processed > MAX_INTERVALS {
                return Err(Error::Quadrature { a, b, estimate: err });
            }
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    Ok(total)
}
