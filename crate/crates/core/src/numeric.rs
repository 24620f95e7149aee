//! Adaptive quadrature and small numerical helpers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Stopping rule for adaptive quadrature: stop once the estimated error is
/// below `max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl QuadTol {
    pub const DEFAULT: QuadTol = QuadTol { abs: 1e-12, rel: 1e-8, max_intervals: 4000 };
    /// Used for the inner layer of nested integrals.
    pub const INNER: QuadTol = QuadTol { abs: 1e-14, rel: 1e-10, max_intervals: 4000 };

    pub const fn new(abs: f64, rel: f64) -> Self {
        QuadTol { abs, rel, max_intervals: 4000 }
    }
}

impl Default for QuadTol {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss-Kronrod 7/15 panel with the usual QUADPACK error heuristic.
/// Returns `None` if the integrand produced a non-finite value.
fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> Option<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return None;
    }
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return None;
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * h;
    res_abs *= h.abs();
    res_asc *= h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let uflow = f64::MIN_POSITIVE / f64::EPSILON;
    if res_abs > uflow / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Some((value, err))
}

/// Globally adaptive integration over the union of the given intervals.
pub fn integrate_segments<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    pieces: &[(f64, f64)],
    tol: QuadTol,
) -> QuadOutcome {
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut evals = 0usize;
    for &(a, b) in pieces {
        if a == b {
            continue;
        }
        evals += 15;
        match gk15(f, a, b) {
            Some((value, error)) => heap.push(Segment { a, b, value, error }),
            None => return QuadOutcome { value: f64::NAN, error: f64::INFINITY, evals, converged: false },
        }
    }
    let mut live_value: f64 = heap.iter().map(|s: &Segment| s.value).sum();
    let mut live_error: f64 = heap.iter().map(|s: &Segment| s.error).sum();
    let mut since_resum = 0usize;
    loop {
        if since_resum > 64 {
            // Resum to stop rounding drift in the running totals.
            live_value = heap.iter().map(|s| s.value).sum();
            live_error = heap.iter().map(|s| s.error).sum();
            since_resum = 0;
        }
        since_resum += 1;
        let total = frozen_value + live_value;
        let err = frozen_error + live_error.max(0.0);
        let target = tol.abs.max(tol.rel * total.abs());
        if err <= target {
            return QuadOutcome { value: total, error: err, evals, converged: true };
        }
        if heap.len() >= tol.max_intervals {
            return QuadOutcome { value: total, error: err, evals, converged: false };
        }
        let Some(worst) = heap.pop() else {
            return QuadOutcome { value: total, error: err, evals, converged: err <= target };
        };
        live_value -= worst.value;
        live_error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        // Interval too small to split further: freeze it.
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) || (worst.b - worst.a).abs() < 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            if heap.is_empty() {
                let converged = frozen_error <= tol.abs.max(tol.rel * frozen_value.abs());
                return QuadOutcome { value: frozen_value, error: frozen_error, evals, converged };
            }
            continue;
        }
        evals += 30;
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        match (left, right) {
            (Some((lv, le)), Some((rv, re))) => {
                live_value += lv + rv;
                live_error += le + re;
                heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
                heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
            }
            _ => return QuadOutcome { value: f64::NAN, error: f64::INFINITY, evals, converged: false },
        }
    }
}

fn finish(op: &'static str, out: QuadOutcome, tol: QuadTol) -> Result<f64> {
    if out.converged && out.value.is_finite() {
        Ok(out.value)
    } else {
        Err(Error::Quadrature {
            op,
            achieved: out.error,
            target: tol.abs.max(tol.rel * out.value.abs()),
        })
    }
}

/// Integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64 + ?Sized>(op: &'static str, f: &F, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    finish(op, integrate_segments(f, &[(a, b)], tol), tol)
}

/// Integral of `f` over `[a, b]` with forced breakpoints (sorted, inside the interval).
pub fn integrate_with_breaks<F: Fn(f64) -> f64 + ?Sized>(
    op: &'static str,
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: QuadTol,
) -> Result<f64> {
    let mut pts = vec![a];
    for &x in breaks {
        if x > a && x < b && x > *pts.last().unwrap() {
            pts.push(x);
        }
    }
    pts.push(b);
    let pieces: Vec<(f64, f64)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    finish(op, integrate_segments(f, &pieces, tol), tol)
}

/// Integral of `f` over `[a, inf)` via `x = a + t / (1 - t)`.
pub fn integrate_to_inf<F: Fn(f64) -> f64 + ?Sized>(op: &'static str, f: &F, a: f64, tol: QuadTol) -> Result<f64> {
    let g = |t: f64| {
        let one_m = 1.0 - t;
        let x = a + t / one_m;
        if x.is_infinite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (one_m * one_m)
        }
    };
    finish(op, integrate_segments(&g, &[(0.0, 0.5), (0.5, 1.0)], tol), tol)
}

/// Integral of `f` over `(0, inf)` where `f` may have an integrable
/// power singularity at zero: `x = v^4` on `[0, 1]` and the tail map beyond.
pub fn integrate_positive_line<F: Fn(f64) -> f64 + ?Sized>(op: &'static str, f: &F, tol: QuadTol) -> Result<f64> {
    let head = |v: f64| {
        let v3 = v * v * v;
        let x = v3 * v;
        if x == 0.0 {
            return 0.0;
        }
        4.0 * v3 * f(x)
    };
    let h = integrate(op, &head, 0.0, 1.0, tol)?;
    let t = integrate_to_inf(op, f, 1.0, tol)?;
    Ok(h + t)
}

/// `int_0^x h(t) t^(beta-1) dt` for bounded `h`, via `t = x v^(1/beta)`,
/// which removes the power singularity at the origin.
pub fn integrate_origin_power<F: Fn(f64) -> f64 + ?Sized>(
    op: &'static str,
    h: &F,
    x: f64,
    beta: f64,
    tol: QuadTol,
) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    let inv = 1.0 / beta;
    let g = |v: f64| h(x * v.powf(inv));
    let v = integrate(op, &g, 0.0, 1.0, tol)?;
    Ok(v * x.powf(beta) / beta)
}

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Bisection for an increasing function on `[lo, hi]`; returns the point
/// where `f` crosses `target`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub use statrs::function::beta::ln_beta;
pub use statrs::function::gamma::{gamma, ln_gamma};

/// Regularized lower incomplete gamma `P(a, x)`, total on `x`.
pub fn gamma_lr(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        statrs::function::gamma::gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`, total on `x`.
pub fn gamma_ur(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        statrs::function::gamma::gamma_ur(a, x)
    }
}

/// Regularized incomplete beta `I_x(a, b)`, total on `x`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        statrs::function::beta::beta_reg(a, b, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate("t", &|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, QuadTol::DEFAULT).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn log_endpoint_singularity() {
        // int_0^1 log(x) dx = -1
        let v = integrate("t", &|x: f64| x.ln(), 0.0, 1.0, QuadTol::DEFAULT).unwrap();
        assert!((v + 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn power_singularity_on_half_line() {
        // int_0^inf x^{-1/2} e^{-x} dx = sqrt(pi)
        let v = integrate_positive_line("t", &|x: f64| x.powf(-0.5) * (-x).exp(), QuadTol::DEFAULT).unwrap();
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn semi_infinite_tail() {
        let v = integrate_to_inf("t", &|x: f64| 1.0 / (1.0 + x * x), 0.0, QuadTol::DEFAULT).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_fails() {
        let r = integrate("t", &|_x: f64| f64::NAN, 0.0, 1.0, QuadTol::DEFAULT);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let v = integrate_with_breaks("t", &|x: f64| (x - 0.3).abs().ln(), 0.0, 1.0, &[0.3], QuadTol::DEFAULT).unwrap();
        let exact = 0.3 * 0.3f64.ln() + 0.7 * 0.7f64.ln() - 1.0;
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn origin_power_substitution() {
        // int_0^2 t^{-0.9} dt = 2^{0.1} / 0.1
        let v = integrate_origin_power("t", &|_t: f64| 1.0, 2.0, 0.1, QuadTol::DEFAULT).unwrap();
        assert!((v - 2f64.powf(0.1) / 0.1).abs() < 1e-9);
    }

    #[test]
    fn bisection_finds_root() {
        let r = bisect_increasing(|x| x * x, 2.0, 0.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
