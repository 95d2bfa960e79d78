//! Special functions: complementary error function, its scaled form, and
//! spherical Bessel functions of the first kind.
//!
//! The error functions use W. J. Cody's rational Chebyshev approximations
//! (three intervals, split at 0.46875 and 4). Spherical Bessel values come
//! from upward recurrence when the argument exceeds the largest order and
//! from a normalized downward (Miller) recurrence otherwise.

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const CODY_SPLIT: f64 = 0.46875;
/// Beyond this, erfc(x) underflows to zero in double precision.
const ERFC_UNDERFLOW: f64 = 27.3;

const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
const ERF_B: [f64; 4] = [
    23.601_290_952_344_12,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];
const ERFC_C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_5,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
const ERFC_D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];
const ERFC_P: [f64; 6] = [
    0.305_326_634_961_232_36,
    0.360_344_899_949_804_45,
    0.125_781_726_111_229_24,
    0.016_083_785_148_742_275,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_4,
    1.872_952_849_923_460_4,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

/// erf(x) / x for |x| <= 0.46875, as a function of z = x^2.
fn erf_small(z: f64) -> f64 {
    let num = (((ERF_A[4] * z + ERF_A[0]) * z + ERF_A[1]) * z + ERF_A[2]) * z + ERF_A[3];
    let den = (((z + ERF_B[0]) * z + ERF_B[1]) * z + ERF_B[2]) * z + ERF_B[3];
    num / den
}

/// erfcx(y) for 0.46875 < y.
fn erfcx_large(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = ERFC_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERFC_C[i]) * y;
            den = (den + ERFC_D[i]) * y;
        }
        (num + ERFC_C[7]) / (den + ERFC_D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERFC_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERFC_P[i]) * z;
            den = (den + ERFC_Q[i]) * z;
        }
        let r = z * (num + ERFC_P[4]) / (den + ERFC_Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// exp(-y^2) evaluated in two pieces so the rounding of y^2 does not
/// leak into the result for large y.
fn exp_neg_sq(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    (-head * head).exp() * (-(y - head) * (y + head)).exp()
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= CODY_SPLIT {
        return 1.0 - x * erf_small(y * y);
    }
    let tail = if y >= ERFC_UNDERFLOW {
        0.0
    } else {
        erfcx_large(y) * exp_neg_sq(y)
    };
    if x < 0.0 {
        2.0 - tail
    } else {
        tail
    }
}

/// Scaled complementary error function `exp(x^2) * erfc(x)` for `x >= 0`.
///
/// Finite for every non-negative argument; behaves as `1 / (x sqrt(pi))`
/// for large `x`.
pub fn erfcx(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain("erfcx", "x", x, "must be >= 0"));
    }
    Ok(erfcx_nonneg(x))
}

/// Unchecked `erfcx` used on hot paths whose callers guarantee `x >= 0`.
pub(crate) fn erfcx_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x <= CODY_SPLIT {
        let z = x * x;
        z.exp() * (1.0 - x * erf_small(z))
    } else if x > 1e8 {
        // the rational tail is exact to rounding here; skip it
        FRAC_1_SQRT_PI / x
    } else {
        erfcx_large(x)
    }
}

/// Spherical Bessel functions `j_0(x) .. j_{l_max}(x)` at one argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselEval {
    pub l_max: usize,
    pub x: f64,
    pub values: Vec<f64>,
}

impl BesselEval {
    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }
}

/// Below this argument the closed forms of j_1, j_2 lose too many digits
/// to cancellation and the downward recurrence takes over.
const CLOSED_FORM_MIN_X: f64 = 0.5;

fn j0_closed(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

fn j1_closed(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    s / (x * x) - c / x
}

fn j2_closed(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x)
}

/// Evaluate `j_l(x)` for every `l` in `0..=l_max`.
pub fn spherical_bessel_j(l_max: usize, x: f64) -> Result<BesselEval> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain("spherical_bessel_j", "x", x, "must be finite and >= 0"));
    }
    let mut values = vec![0.0; l_max + 1];
    if x == 0.0 {
        values[0] = 1.0;
        return Ok(BesselEval { l_max, x, values });
    }
    if x > l_max as f64 {
        upward(&mut values, x);
    } else {
        downward(&mut values, x);
    }
    if x >= CLOSED_FORM_MIN_X {
        values[0] = j0_closed(x);
        if l_max >= 1 {
            values[1] = j1_closed(x);
        }
        if l_max >= 2 {
            values[2] = j2_closed(x);
        }
    }
    Ok(BesselEval { l_max, x, values })
}

/// Single order convenience wrapper.
pub fn sph_j(l: usize, x: f64) -> Result<f64> {
    Ok(spherical_bessel_j(l, x)?.values[l])
}

fn upward(values: &mut [f64], x: f64) {
    values[0] = j0_closed(x);
    if values.len() == 1 {
        return;
    }
    values[1] = j1_closed(x);
    for l in 1..values.len() - 1 {
        values[l + 1] = (2 * l + 1) as f64 / x * values[l] - values[l - 1];
    }
}

/// Miller's algorithm: recur downward from a start order well above both
/// `l_max` and `x`, then normalize against whichever of j_0, j_1 is larger.
fn downward(values: &mut [f64], x: f64) {
    let l_max = values.len() - 1;
    let top = l_max.max(x.ceil() as usize).max(1);
    let start = top + 16 + (40.0 * top as f64).sqrt() as usize;
    let mut seq = vec![0.0; start + 2];
    seq[start] = 1e-300;
    for l in (1..=start).rev() {
        seq[l - 1] = (2 * l + 1) as f64 / x * seq[l] - seq[l + 1];
        if seq[l - 1].abs() > 1e250 {
            for v in seq[l - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let j0 = j0_closed(x);
    let j1 = if x >= CLOSED_FORM_MIN_X {
        j1_closed(x)
    } else {
        j1_series(x)
    };
    let scale = if j0.abs() >= j1.abs() { j0 / seq[0] } else { j1 / seq[1] };
    for (v, s) in values.iter_mut().zip(&seq) {
        *v = s * scale;
    }
}

/// j_1 by its Taylor series, accurate for small arguments.
fn j1_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x / 3.0;
    let mut sum = term;
    for k in 1..20 {
        term *= -x2 / (2.0 * k as f64 * (2 * k + 3) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Derivative `d/dx j_l(x) = j_{l-1}(x) - (l+1)/x j_l(x)` for `l >= 1`, `x > 0`.
pub(crate) fn sph_j_derivative(l: usize, x: f64, jl_minus: f64, jl: f64) -> f64 {
    jl_minus - (l + 1) as f64 / x * jl
}
