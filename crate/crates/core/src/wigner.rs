//! Wigner functions and their negativity volume.
//!
//! Every field is normalized so that `∫∫ W dx dp = 1`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_points, Execution};
use crate::fock::FockState;
use crate::oscillators::{morse_scaled_support, Covariance2, MhoParams, MorseParams};
use crate::quad::{gauss_legendre, integrate_1d, integrate_2d, Interval, QuadOptions, QuadResult, Region};
use crate::specfun::{laguerre_assoc, log_gamma, macdonald_imag_order_tol};
use crate::wavefn::Wavefunction;

/// Axis-aligned phase-space rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBox {
    pub x: (f64, f64),
    pub p: (f64, f64),
}

impl PhaseBox {
    pub fn symmetric(x_half: f64, p_half: f64) -> Self {
        PhaseBox {
            x: (-x_half, x_half),
            p: (-p_half, p_half),
        }
    }

    /// Same centre, both sides twice as long.
    pub fn doubled(&self) -> Self {
        let grow = |(lo, hi): (f64, f64)| {
            let half = 0.5 * (hi - lo);
            (lo - half, hi + half)
        };
        PhaseBox {
            x: grow(self.x),
            p: grow(self.p),
        }
    }

    pub fn region(&self) -> Result<Region> {
        Region::rect(self.x.0, self.x.1, self.p.0, self.p.1)
    }

    pub fn area(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.p.1 - self.p.0)
    }
}

type Evaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Real function on phase space together with a box holding almost all of
/// its absolute mass.
#[derive(Clone)]
pub struct WignerField {
    f: Evaluator,
    bbox: PhaseBox,
}

impl WignerField {
    pub fn new<F>(f: F, bbox: PhaseBox) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        WignerField { f: Arc::new(f), bbox }
    }

    #[inline]
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        (self.f)(x, p)
    }

    pub fn bbox(&self) -> PhaseBox {
        self.bbox
    }

    pub fn with_bbox(&self, bbox: PhaseBox) -> Self {
        WignerField {
            f: Arc::clone(&self.f),
            bbox,
        }
    }

    /// `∫∫ W` over the bounding box.
    pub fn total(&self, opts: &QuadOptions) -> Result<QuadResult> {
        integrate_2d(|x, p| self.eval(x, p), self.bbox.region()?, opts)
    }

    /// Samples `W` on an `nx × ny` lattice including the end points; row `j`
    /// holds `p_j`, column `i` holds `x_i`.
    pub fn sample_grid(
        &self,
        x: (f64, f64),
        nx: usize,
        p: (f64, f64),
        ny: usize,
        exec: Execution,
    ) -> Result<Vec<Vec<f64>>> {
        if nx < 1 || ny < 1 {
            return Err(Error::Domain("grid needs at least one point per axis".into()));
        }
        if !(x.0 <= x.1) || !(p.0 <= p.1) || !(x.0.is_finite() && x.1.is_finite() && p.0.is_finite() && p.1.is_finite())
        {
            return Err(Error::Domain(format!("invalid grid ranges x={x:?} p={p:?}")));
        }
        let node = |(lo, hi): (f64, f64), n: usize, i: usize| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let rows: Vec<usize> = (0..ny).collect();
        Ok(map_points(exec, &rows, |&j| {
            let pj = node(p, ny, j);
            (0..nx).map(|i| self.eval(node(x, nx, i), pj)).collect()
        }))
    }
}

impl fmt::Debug for WignerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WignerField")
            .field("bbox", &self.bbox)
            .finish_non_exhaustive()
    }
}

/// Gaussian Wigner function with the given moments.
pub fn gaussian_wigner(cov: &Covariance2) -> Result<WignerField> {
    cov.validate()?;
    let c = *cov;
    let det = c.det();
    let amp = 1.0 / (2.0 * PI * det.sqrt());
    let f = move |x: f64, p: f64| {
        let (u, v) = (x - c.dx, p - c.dp);
        let q = (c.spp * u * u - 2.0 * c.sxp * u * v + c.sxx * v * v) / det;
        amp * (-0.5 * q).exp()
    };
    let bbox = PhaseBox {
        x: (c.dx - 9.0 * c.sxx.sqrt(), c.dx + 9.0 * c.sxx.sqrt()),
        p: (c.dp - 9.0 * c.spp.sqrt(), c.dp + 9.0 * c.spp.sqrt()),
    };
    Ok(WignerField::new(f, bbox))
}

/// MHO ground-state Wigner function in `q = βx`, `p = βy/α`:
/// `e^{−(q²+p²)/τ²}(cosh 2q + e^{τ²} cos 2p) / (πτ²(1+e^{τ²}))`.
pub fn mho_wigner(tau: f64) -> Result<WignerField> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("MHO Wigner function needs tau > 0, got {tau}")));
    }
    let t2 = tau * tau;
    // ln(1 + e^{τ²})
    let ln_den = t2 + (-t2).exp().ln_1p();
    let pre = 1.0 / (PI * t2);
    let f = move |q: f64, p: f64| {
        let g = -(q * q + p * p) / t2 - ln_den;
        let a = 2.0 * q.abs();
        // ln cosh a
        let ln_cosh = a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2;
        pre * ((g + ln_cosh).exp() + (g + t2).exp() * (2.0 * p).cos())
    };
    // The two lobes peak at q = ±τ².
    Ok(WignerField::new(f, PhaseBox::symmetric(t2 + 8.0 * tau, 8.0 * tau)))
}

/// MHO Wigner function in physical `(x, y)`; Gaussian when `β = 0`.
pub fn mho_wigner_physical(params: &MhoParams) -> Result<WignerField> {
    let (a, b) = (params.alpha(), params.beta());
    if b == 0.0 {
        return gaussian_wigner(&Covariance2::diagonal(0.5 / a, 0.5 * a));
    }
    let tau = params.tau();
    let scaled = mho_wigner(tau)?;
    let jac = tau * tau;
    let rbox = scaled.bbox();
    let bbox = PhaseBox {
        x: (rbox.x.0 / b, rbox.x.1 / b),
        p: (rbox.p.0 * a / b, rbox.p.1 * a / b),
    };
    Ok(WignerField::new(move |x, y| jac * scaled.eval(b * x, b * y / a), bbox))
}

/// Absolute accuracy of a single Morse Wigner value.
const MORSE_POINT_TOL: f64 = 1e-12;

/// Morse ground-state Wigner function in `q = αx`, `p = y/α`:
/// `2 z^{2N} K_{2ip}(z) / (π Γ(2N))` with `z = (2N+1)e^{−q}`.
pub fn morse_wigner(n: f64) -> Result<WignerField> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::BoundState(format!("Morse Wigner function needs N > 0, got {n}")));
    }
    let ln_pre = 2f64.ln() - PI.ln() - log_gamma(2.0 * n)?;
    let ln_lead = (2.0 * n + 1.0).ln();
    let f = move |q: f64, p: f64| {
        let ln_z = ln_lead - q;
        let z = ln_z.exp();
        if z == 0.0 || !z.is_finite() {
            return 0.0;
        }
        let pre = (ln_pre + 2.0 * n * ln_z).exp();
        match macdonald_imag_order_tol(2.0 * p, z, Some(MORSE_POINT_TOL / pre)) {
            Ok(0.0) => 0.0,
            Ok(k) => pre * k,
            Err(_) => f64::NAN,
        }
    };
    let (lo, hi) = morse_scaled_support(n);
    // Momentum spread in p = y/α is √(N/2).
    let p_half = (8.0 * (0.5 * n).sqrt()).max(4.0);
    Ok(WignerField::new(
        f,
        PhaseBox {
            x: (lo, hi),
            p: (-p_half, p_half),
        },
    ))
}

/// Morse Wigner function in physical `(x, y)`; the rescaling has unit
/// Jacobian.
pub fn morse_wigner_physical(params: &MorseParams) -> Result<WignerField> {
    let a = params.alpha();
    let scaled = morse_wigner(params.n())?;
    let rbox = scaled.bbox();
    let bbox = PhaseBox {
        x: (rbox.x.0 / a, rbox.x.1 / a),
        p: (rbox.p.0 * a, rbox.p.1 * a),
    };
    Ok(WignerField::new(move |x, y| scaled.eval(a * x, y / a), bbox))
}

/// Pöschl-Teller ground state at `s = 1` in closed form:
/// `sin(2px) / (sinh(2αx) sinh(πp/α))`.
pub fn pt_wigner_s1(alpha: f64) -> Result<WignerField> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParams(format!("alpha must be positive, got {alpha}")));
    }
    let f = move |x: f64, p: f64| {
        let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        let ratio = |t: f64, k: f64| if t == 0.0 { 1.0 / k } else { t / (k * t).sinh() };
        2.0 * sinc(2.0 * p * x) * ratio(x, 2.0 * alpha) * ratio(p, PI / alpha)
    };
    Ok(WignerField::new(f, PhaseBox::symmetric(20.0 / alpha, 12.0 * alpha)))
}

/// Options for the inner integral of [`wavefunction_wigner`].
const DEFINITION_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-11,
    rel_tol: 1e-9,
    max_evals: 100_000,
};

/// `W(x,p) = (2/π) ∫₀^∞ φ(x−u) φ(x+u) cos(2up) du` for a real normalized `φ`.
pub fn wavefunction_wigner(phi: &Wavefunction) -> Result<WignerField> {
    let (lo, hi) = phi.support();
    let p_half = 10.0 * momentum_spread(phi)?.max(1e-3);
    let psi = phi.clone();
    let f = move |x: f64, p: f64| {
        let u_max = (x - lo).min(hi - x);
        if !(u_max > 0.0) {
            return 0.0;
        }
        let g = |u: f64| psi.eval(x - u) * psi.eval(x + u) * (2.0 * u * p).cos();
        let interval = match Interval::new(0.0, u_max) {
            Ok(i) => i,
            Err(_) => return 0.0,
        };
        let v = match integrate_1d(g, interval, &DEFINITION_OPTS) {
            Ok(r) => r.value,
            Err(Error::NonConvergence { value, .. }) => value,
            Err(_) => f64::NAN,
        };
        2.0 / PI * v
    };
    Ok(WignerField::new(
        f,
        PhaseBox {
            x: (lo, hi),
            p: (-p_half, p_half),
        },
    ))
}

/// `√∫(φ′)²`, with `φ′` from central differences on a Gauss-Legendre grid.
fn momentum_spread(phi: &Wavefunction) -> Result<f64> {
    let (lo, hi) = phi.support();
    let (t, w) = gauss_legendre(20);
    let panels = 400;
    let width = (hi - lo) / panels as f64;
    let h = 1e-4 * width;
    let mut acc = 0.0;
    for k in 0..panels {
        let c = lo + (k as f64 + 0.5) * width;
        for (ti, wi) in t.iter().zip(&w) {
            let x = c + 0.5 * width * ti;
            let d = (phi.eval(x + h) - phi.eval(x - h)) / (2.0 * h);
            acc += 0.5 * width * wi * d * d;
        }
    }
    if !acc.is_finite() {
        return Err(Error::Domain("wavefunction derivative is not finite".into()));
    }
    Ok(acc.sqrt())
}

/// `⟨m|D(β)|n⟩` for `m ≥ n`: `√(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²)`.
fn displacement_element(m: usize, n: usize, beta: Complex64, ln_fact: &[f64]) -> Complex64 {
    debug_assert!(m >= n);
    let r2 = beta.norm_sqr();
    let k = m - n;
    let lag = laguerre_assoc(n, k as f64, r2);
    if k == 0 {
        return Complex64::new((-0.5 * r2).exp() * lag, 0.0);
    }
    if r2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let ln_mag = 0.5 * (ln_fact[n] - ln_fact[m]) + 0.5 * k as f64 * r2.ln() - 0.5 * r2;
    let phase = Complex64::from_polar(1.0, k as f64 * beta.arg());
    phase * (ln_mag.exp() * lag)
}

/// Displaced-parity Wigner function of a Fock superposition:
/// `W(z) = (2/π) Σ c*_m c_n ⟨m|D(2z)|n⟩ (−1)^n` with `z = (x+ip)/√2`, and
/// `W(x,p) = W(z)/2`.
pub fn fock_wigner(state: &FockState) -> Result<WignerField> {
    let support: Vec<(usize, Complex64)> = state
        .coeffs()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .collect();
    if support.is_empty() {
        return Err(Error::Domain("zero state has no Wigner function".into()));
    }
    let n_max = support.last().map_or(0, |s| s.0);
    let ln_fact: Vec<f64> = (0..=n_max).map(|n| log_gamma(n as f64 + 1.0)).collect::<Result<_>>()?;
    let f = move |x: f64, p: f64| {
        let beta = Complex64::new(x, p) * SQRT_2;
        let mut acc = 0.0;
        for (i, &(m, cm)) in support.iter().enumerate() {
            let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign_m * cm.norm_sqr() * displacement_element(m, m, beta, &ln_fact).re;
            for &(n, cn) in &support[..i] {
                let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
                acc += 2.0 * sign_n * (cm.conj() * cn * displacement_element(m, n, beta, &ln_fact)).re;
            }
        }
        acc / PI
    };
    let half = (2.0 * n_max as f64 + 1.0).sqrt() + 7.0;
    Ok(WignerField::new(f, PhaseBox::symmetric(half, half)))
}

/// Wigner function of `γ₀|0⟩ + γ₂|2⟩ + γ₄|4⟩ + γ₆|6⟩` (real `γ`) written out
/// term by term in `z = (x+ip)/√2`:
///
/// `W(z) = (2/π) e^{−2|z|²} [Σ γ_n² L_n(4|z|²) + Σ_{m>n} c_{mn} γ_m γ_n Re(z^{m−n}) L_n^{(m−n)}(4|z|²)]`.
pub fn even_superposition_wigner(gamma: [f64; 4]) -> WignerField {
    let [g0, g2, g4, g6] = gamma;
    let f = move |x: f64, p: f64| {
        let (zr, zi) = (x / SQRT_2, p / SQRT_2);
        let r2 = zr * zr + zi * zi;
        let t = 4.0 * r2;
        // Re z², Re z⁴, Re z⁶
        let re2 = zr * zr - zi * zi;
        let im2 = 2.0 * zr * zi;
        let re4 = re2 * re2 - im2 * im2;
        let im4 = 2.0 * re2 * im2;
        let re6 = re4 * re2 - im4 * im2;
        let diag = g0 * g0
            + g2 * g2 * laguerre_assoc(2, 0.0, t)
            + g4 * g4 * laguerre_assoc(4, 0.0, t)
            + g6 * g6 * laguerre_assoc(6, 0.0, t);
        let cross = 4.0 * SQRT_2 * g2 * g0 * re2
            + 16.0 / 6f64.sqrt() * g4 * g0 * re4
            + 32.0 / (3.0 * 5f64.sqrt()) * g6 * g0 * re6
            + 4.0 / 3f64.sqrt() * g4 * g2 * re2 * laguerre_assoc(2, 2.0, t)
            + 16.0 / (3.0 * 10f64.sqrt()) * g6 * g2 * re4 * laguerre_assoc(2, 4.0, t)
            + 8.0 / 30f64.sqrt() * g6 * g4 * re2 * laguerre_assoc(4, 2.0, t);
        (-2.0 * r2).exp() * (diag + cross) / PI
    };
    WignerField::new(f, PhaseBox::symmetric(11.0, 11.0))
}

/// Result of [`negativity_volume`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negativity {
    /// `∫∫|W| − 1`
    pub delta: f64,
    /// `δ/(1+δ)`
    pub nu: f64,
    /// `∫∫|W|` over the final box.
    pub abs_integral: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub bbox: PhaseBox,
}

/// Largest change of the `|W|` integral allowed from one more box doubling.
pub const BOX_GROWTH_TOL: f64 = 1e-6;
const MAX_BOX_DOUBLINGS: usize = 8;

/// `δ = ∫∫|W| dx dp − 1` and `ν = δ/(1+δ)`.
///
/// The box is doubled until the mass picked up in the new frame is below
/// [`BOX_GROWTH_TOL`]; only the frame is integrated at each step.
pub fn negativity_volume(w: &WignerField, opts: &QuadOptions) -> Result<Negativity> {
    let abs_w = |x: f64, p: f64| w.eval(x, p).abs();
    let mut bbox = w.bbox();
    let first = integrate_2d(abs_w, bbox.region()?, opts)?;
    let mut total = first.value;
    let mut err = first.abs_error_estimate;
    let mut evals = first.evaluations;
    for _ in 0..MAX_BOX_DOUBLINGS {
        let grown = bbox.doubled();
        let frame = [
            Region::rect(grown.x.0, grown.x.1, grown.p.0, bbox.p.0)?,
            Region::rect(grown.x.0, grown.x.1, bbox.p.1, grown.p.1)?,
            Region::rect(grown.x.0, bbox.x.0, bbox.p.0, bbox.p.1)?,
            Region::rect(bbox.x.1, grown.x.1, bbox.p.0, bbox.p.1)?,
        ];
        let frame_opts = QuadOptions::new(0.25 * opts.abs_tol.min(BOX_GROWTH_TOL), opts.rel_tol, opts.max_evals);
        let mut added = 0.0;
        for r in frame {
            let part = integrate_2d(abs_w, r, &frame_opts)?;
            added += part.value;
            err += part.abs_error_estimate;
            evals += part.evaluations;
        }
        total += added;
        bbox = grown;
        if added < BOX_GROWTH_TOL {
            let delta = total - 1.0;
            // Within the error estimate of zero the field is taken as nonnegative.
            let delta = if delta <= err { 0.0 } else { delta };
            return Ok(Negativity {
                delta,
                nu: delta / (1.0 + delta),
                abs_integral: total,
                abs_error_estimate: err,
                evaluations: evals,
                bbox,
            });
        }
    }
    Err(Error::NonConvergence {
        value: total - 1.0,
        error_estimate: err,
        evaluations: evals,
    })
}
