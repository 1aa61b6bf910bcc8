//! Special functions used by the oscillator and phase-space modules.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate_1d, Interval, QuadOptions};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for real `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires z > 0, got {z}")));
    }
    Ok(log_gamma_complex(Complex64::new(z, 0.0)).re)
}

/// `Γ(z)` for real `z > 0`.
pub fn gamma(z: f64) -> Result<f64> {
    log_gamma(z).map(f64::exp)
}

/// `ln Γ(z)` on the closed right half plane, continuous in `Im z`.
///
/// Shifts `Re z` above 8 by the recurrence and then applies the Stirling
/// series; small real arguments go through the Lanczos form instead.
pub fn log_gamma_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 8.0 && z.re > 0.0 {
        // Lanczos is accurate to a few ulps on the real axis.
        let x = z.re - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        let v = 0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln();
        return Complex64::new(v, 0.0);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 8.0 {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) w^{2k-1}).
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0))))));
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// Trigamma function `ψ⁽¹⁾(z)` for `z > 0`.
pub fn trigamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("trigamma requires z > 0, got {z}")));
    }
    let mut acc = 0.0;
    let mut x = z;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // 1/x + 1/(2x²) + Σ B_{2k}/x^{2k+1}, through B_12.
    let tail = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0
                + inv2
                    * (-1.0 / 30.0
                        + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * (5.0 / 66.0 + inv2 * (-691.0 / 2730.0))))));
    Ok(acc + tail)
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by upward recurrence in `n`.
pub fn laguerre_assoc(n: usize, k: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + k - x;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + k + 1.0 - x) * cur - (m + k) * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Largest exponent before `e^{-x}` underflows in double precision.
pub const UNDERFLOW_EXPONENT: f64 = 745.0;

/// Below this argument `K_{iν}` is summed from its power series.
const MACDONALD_SERIES_MAX_X: f64 = 2.0;
/// Below this order the series loses relative accuracy to `sinh(πν)`.
const MACDONALD_SERIES_MIN_NU: f64 = 1e-3;

/// Macdonald function of purely imaginary order, `K_{iν}(x)`, for `x > 0`.
///
/// Uses the power series for small arguments and the integral
/// representation `∫₀^∞ e^{−x cosh t} cos(νt) dt` otherwise.
pub fn macdonald_imag_order(nu: f64, x: f64) -> Result<f64> {
    macdonald_imag_order_tol(nu, x, None)
}

/// As [`macdonald_imag_order`], with an absolute accuracy target for the
/// integral path. `None` asks for `1e-15` of the `K₀`-type envelope.
pub fn macdonald_imag_order_tol(nu: f64, x: f64, abs_tol: Option<f64>) -> Result<f64> {
    if !(x > 0.0) || nu.is_nan() {
        return Err(Error::Domain(format!("K_(i nu)(x) requires x > 0, got {x}")));
    }
    let nu = nu.abs();
    if x < MACDONALD_SERIES_MAX_X && nu >= MACDONALD_SERIES_MIN_NU {
        Ok(macdonald_imag_order_series(nu, x))
    } else {
        integral(nu, x, abs_tol)
    }
}

/// `K_{iν}(x)` by adaptive quadrature of its integral representation,
/// truncated where `x cosh t` exceeds the underflow exponent.
pub fn macdonald_imag_order_integral(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || nu.is_nan() {
        return Err(Error::Domain(format!("K_(i nu)(x) requires x > 0, got {x}")));
    }
    integral(nu, x, None)
}

fn integral(nu: f64, x: f64, abs_tol: Option<f64>) -> Result<f64> {
    if x >= UNDERFLOW_EXPONENT {
        return Ok(0.0);
    }
    let t_max = (UNDERFLOW_EXPONENT / x).acosh();
    // |K_{iν}(x)| ≤ K_0(x); the roundoff floor scales with that envelope.
    let envelope = (-x).exp() * (1.0 + (1.0 / x).ln().max(0.0));
    let floor = 1e-15 * envelope;
    let tol = abs_tol.map_or(floor, |t| t.max(floor));
    let opts = QuadOptions::new(tol, 1e-11, 50_000);
    let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cos();
    match integrate_1d(f, Interval::new(0.0, t_max)?, &opts) {
        Ok(r) => Ok(r.value),
        // Cancellation at large ν can stall below the requested floor; the
        // best estimate is still accurate to the envelope scale.
        Err(Error::NonConvergence { value, .. }) => Ok(value),
        Err(e) => Err(e),
    }
}

/// `K_{iν}(x) = −π Im I_{iν}(x) / sinh(πν)` with `I_{iν}` from its power
/// series. Accurate for `x ≲ 2` and `ν` away from zero.
pub fn macdonald_imag_order_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let one_plus = Complex64::new(1.0, nu);
    let mut term = (Complex64::new(0.0, nu * half.ln()) - log_gamma_complex(one_plus)).exp();
    let mut sum = term;
    for k in 0..200 {
        let kp1 = (k + 1) as f64;
        term *= q / (kp1 * Complex64::new(kp1, nu));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -PI * sum.im / (PI * nu).sinh()
}

/// Entropy of a single-mode Gaussian state with symplectic eigenvalue `x`:
/// `(x+½) ln(x+½) − (x−½) ln(x−½)`, with `0 ln 0 = 0`.
pub fn h_entropy(x: f64) -> Result<f64> {
    if !(x >= 0.5) || !x.is_finite() {
        return Err(Error::Domain(format!("h requires x >= 1/2, got {x}")));
    }
    let a = x + 0.5;
    let b = x - 0.5;
    let tail = if b > 0.0 { b * b.ln() } else { 0.0 };
    Ok(a * a.ln() - tail)
}
