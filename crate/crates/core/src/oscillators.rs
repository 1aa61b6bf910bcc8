//! Exactly solvable anharmonic oscillators: the modified harmonic oscillator
//! (MHO), the Morse potential and the Pöschl-Teller (PT) well.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quad::{integrate_1d, Interval, QuadOptions};
use crate::specfun::{log_gamma, trigamma, UNDERFLOW_EXPONENT};
use crate::wavefn::Wavefunction;

/// Second moments of a single-mode state, in units of `x²`, `xp`, `p²`, plus
/// first moments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Covariance2 {
    pub sxx: f64,
    pub sxp: f64,
    pub spp: f64,
    pub dx: f64,
    pub dp: f64,
}

/// Slack allowed below the pure-state bound `det σ ≥ 1/4`.
pub const UNCERTAINTY_SLACK: f64 = 1e-10;

impl Covariance2 {
    pub fn diagonal(sxx: f64, spp: f64) -> Self {
        Covariance2 {
            sxx,
            spp,
            ..Default::default()
        }
    }

    pub fn det(&self) -> f64 {
        self.sxx * self.spp - self.sxp * self.sxp
    }

    /// Checks positivity and the uncertainty bound.
    pub fn validate(&self) -> Result<()> {
        if !(self.sxx > 0.0) || !(self.spp > 0.0) || !self.sxp.is_finite() {
            return Err(Error::Domain(format!("covariance is not positive: {self:?}")));
        }
        if self.det() < 0.25 - UNCERTAINTY_SLACK {
            return Err(Error::Domain(format!(
                "covariance violates det >= 1/4: det = {}",
                self.det()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub wavefunction: Wavefunction,
    pub energy: f64,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `V(x) = α²x²/2 − αβ x tanh(βx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhoParams {
    alpha: f64,
    beta: f64,
}

impl MhoParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        check_positive("MHO alpha", alpha)?;
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParams(format!("MHO requires beta >= 0, got {beta}")));
        }
        Ok(MhoParams { alpha, beta })
    }

    /// Parameters with the given `α` and `τ = β/√α`.
    pub fn with_tau(alpha: f64, tau: f64) -> Result<Self> {
        check_positive("MHO alpha", alpha)?;
        MhoParams::new(alpha, tau * alpha.sqrt())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        (self.beta * self.beta / self.alpha).sqrt()
    }

    pub fn potential(&self, x: f64) -> f64 {
        0.5 * self.alpha * self.alpha * x * x - self.alpha * self.beta * x * (self.beta * x).tanh()
    }

    pub fn energy(&self) -> f64 {
        0.5 * (self.alpha - self.beta * self.beta)
    }

    /// Peaks sit at `±β/α` with Gaussian width `1/√α`.
    pub fn support(&self) -> (f64, f64) {
        let half = self.beta / self.alpha + 12.0 / self.alpha.sqrt();
        (-half, half)
    }
}

/// `φ(x) ∝ e^{−αx²/2} cosh(βx)`, evaluated as a sum of two shifted Gaussians
/// so large `β` does not overflow.
pub fn mho_ground(params: &MhoParams) -> Result<GroundState> {
    let (a, b) = (params.alpha, params.beta);
    let t2 = params.tau().powi(2);
    let amp = (2.0 / ((PI / a).sqrt() * (1.0 + (-t2).exp()))).sqrt();
    let raw = move |x: f64| {
        let g = -0.5 * a * x * x - 0.5 * t2;
        0.5 * amp * ((g + b * x).exp() + (g - b * x).exp())
    };
    let phi = renormalized(Wavefunction::new(raw, params.support()))?;
    Ok(GroundState {
        wavefunction: phi,
        energy: params.energy(),
    })
}

/// Diagonal covariance of the MHO ground state.
pub fn mho_covariance(params: &MhoParams) -> Covariance2 {
    let (a, b) = (params.alpha, params.beta);
    let t2 = params.tau().powi(2);
    let upper = 1.0 / (1.0 + (-t2).exp());
    let lower = (-t2).exp() * upper;
    Covariance2::diagonal(0.5 / a + b * b / (a * a) * upper, 0.5 * a - b * b * lower)
}

/// `det σ` of the MHO ground state as a function of `τ` alone.
pub fn mho_determinant(tau: f64) -> f64 {
    let t2 = tau * tau;
    let e = (-t2).exp();
    0.25 - 0.5 * t2 * (2.0 * t2 * e - 1.0 + e * e) / ((1.0 + e) * (1.0 + e))
}

/// `V(x) = D(e^{−2αx} − 2e^{−αx})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    depth: f64,
    alpha: f64,
    n: f64,
}

impl MorseParams {
    pub fn new(depth: f64, alpha: f64) -> Result<Self> {
        check_positive("Morse D", depth)?;
        check_positive("Morse alpha", alpha)?;
        let n = -0.5 + (2.0 * depth).sqrt() / alpha;
        if !(n > 0.0) {
            return Err(Error::BoundState(format!(
                "Morse requires alpha < 2*sqrt(2D), got D = {depth}, alpha = {alpha}"
            )));
        }
        Ok(MorseParams { depth, alpha, n })
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `N = −1/2 + √(2D)/α`.
    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn potential(&self, x: f64) -> f64 {
        let e = (-self.alpha * x).exp();
        self.depth * (e * e - 2.0 * e)
    }

    pub fn energy(&self) -> f64 {
        -0.5 * self.alpha * self.alpha * self.n * self.n
    }

    /// Window in units of `αx`.
    pub fn scaled_support(&self) -> (f64, f64) {
        morse_scaled_support(self.n)
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.scaled_support();
        (lo / self.alpha, hi / self.alpha)
    }
}

/// Window `[q₋, q₊]` in `q = αx`: on the left `(N+½)e^{−q}` reaches the
/// underflow exponent, on the right the `e^{−2Nq}` tail holds `< 1e-12` of
/// the probability.
pub fn morse_scaled_support(n: f64) -> (f64, f64) {
    let lo = -(UNDERFLOW_EXPONENT / (n + 0.5)).ln();
    let two_n = 2.0 * n;
    let ln_g = log_gamma(two_n + 1.0).unwrap_or(0.0);
    let hi = (two_n * (two_n + 1.0).ln() - ln_g + 12.0 * 10f64.ln()) / two_n;
    (lo, hi.max(lo + 1.0))
}

/// `φ(x) = √(α/Γ(2N)) ξ^N e^{−ξ/2}` with `ξ = (2N+1)e^{−αx}`.
pub fn morse_ground(params: &MorseParams) -> Result<GroundState> {
    let (a, n) = (params.alpha, params.n);
    let ln_norm = 0.5 * (a.ln() - log_gamma(2.0 * n)?);
    let ln_lead = (2.0 * n + 1.0).ln();
    let raw = move |x: f64| {
        let ln_xi = ln_lead - a * x;
        (ln_norm + n * ln_xi - 0.5 * ln_xi.exp()).exp()
    };
    let phi = renormalized(Wavefunction::new(raw, params.support()))?;
    Ok(GroundState {
        wavefunction: phi,
        energy: params.energy(),
    })
}

/// `diag(ψ⁽¹⁾(2N)/α², α²N/2)`.
pub fn morse_covariance(params: &MorseParams) -> Result<Covariance2> {
    let a2 = params.alpha * params.alpha;
    Ok(Covariance2::diagonal(
        trigamma(2.0 * params.n)? / a2,
        0.5 * a2 * params.n,
    ))
}

/// `N ψ⁽¹⁾(2N)/2`.
pub fn morse_determinant(n: f64) -> Result<f64> {
    Ok(0.5 * n * trigamma(2.0 * n)?)
}

/// `V(x) = −A sech²(αx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtParams {
    depth: f64,
    alpha: f64,
    s: f64,
}

impl PtParams {
    pub fn new(depth: f64, alpha: f64) -> Result<Self> {
        check_positive("Poschl-Teller A", depth)?;
        check_positive("Poschl-Teller alpha", alpha)?;
        let s = 0.5 * (-1.0 + (1.0 + 8.0 * depth / (alpha * alpha)).sqrt());
        if !(s > 0.0) {
            return Err(Error::BoundState(format!(
                "Poschl-Teller well too shallow for a bound state: s = {s}"
            )));
        }
        Ok(PtParams { depth, alpha, s })
    }

    /// Parameters with `A = α² s(s+1)/2`.
    pub fn with_s(alpha: f64, s: f64) -> Result<Self> {
        check_positive("Poschl-Teller s", s)?;
        check_positive("Poschl-Teller alpha", alpha)?;
        PtParams::new(0.5 * alpha * alpha * s * (s + 1.0), alpha)
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn potential(&self, x: f64) -> f64 {
        -self.depth / (self.alpha * x).cosh().powi(2)
    }

    pub fn energy(&self) -> f64 {
        -0.5 * self.alpha * self.alpha * self.s * self.s
    }

    /// Symmetric window in units of `αx`.
    pub fn scaled_support(&self) -> (f64, f64) {
        pt_scaled_support(self.s)
    }

    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.scaled_support();
        (lo / self.alpha, hi / self.alpha)
    }
}

fn pt_ln_norm(s: f64) -> f64 {
    0.5 * (log_gamma(s + 0.5).unwrap_or(0.0) - log_gamma(s).unwrap_or(0.0) - 0.5 * PI.ln())
}

/// `|u| ≤ U` with the `4^s e^{−2s|u|}` tails holding `< 1e-12` of the mass.
pub fn pt_scaled_support(s: f64) -> (f64, f64) {
    let ln_tail = 2.0 * pt_ln_norm(s) + 2.0 * s * 2f64.ln() - (2.0 * s).ln();
    let u = ((ln_tail + 12.0 * 10f64.ln()) / (2.0 * s)).max(8.0);
    (-u, u)
}

/// `φ(x) = π^{−1/4} √(αΓ(s+½)/Γ(s)) cosh^{−s}(αx)`.
pub fn pt_ground(params: &PtParams) -> Result<GroundState> {
    let (a, s) = (params.alpha, params.s);
    let phi = renormalized(Wavefunction::new(pt_shape(a, s), params.support()))?;
    Ok(GroundState {
        wavefunction: phi,
        energy: params.energy(),
    })
}

fn pt_shape(a: f64, s: f64) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let ln_norm = pt_ln_norm(s) + 0.5 * a.ln();
    move |x: f64| {
        let u = (a * x).abs();
        // ln cosh u = u + ln(1 + e^{−2u}) − ln 2
        let ln_cosh = u + (-2.0 * u).exp().ln_1p() - std::f64::consts::LN_2;
        (ln_norm - s * ln_cosh).exp()
    }
}

type PtMoments = (f64, f64);

fn pt_cache() -> &'static Mutex<HashMap<u64, PtMoments>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, PtMoments>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `(⟨u²⟩, ∫(dφ/du)²)` for the unit-width well, by quadrature.
fn pt_scaled_moments(s: f64) -> Result<PtMoments> {
    if let Some(&m) = pt_cache().lock().expect("cache poisoned").get(&s.to_bits()) {
        return Ok(m);
    }
    let shape = pt_shape(1.0, s);
    let opts = QuadOptions::new(1e-14, 1e-13, 400_000);
    let half = Interval::new(0.0, f64::INFINITY)?;
    let norm = 2.0 * integrate_1d(|u| shape(u).powi(2), half, &opts)?.value;
    let x2 = 2.0 * integrate_1d(|u| u * u * shape(u).powi(2), half, &opts)?.value / norm;
    let p2 = 2.0 * integrate_1d(|u| (s * u.tanh() * shape(u)).powi(2), half, &opts)?.value / norm;
    // Concurrent writers insert identical values.
    pt_cache().lock().expect("cache poisoned").insert(s.to_bits(), (x2, p2));
    Ok((x2, p2))
}

/// `σ_xx = ⟨x²⟩`, `σ_pp = ∫(φ′)²`, computed for `u = αx` and rescaled so the
/// determinant depends on `s` only.
pub fn pt_covariance(params: &PtParams) -> Result<Covariance2> {
    let (x2, p2) = pt_scaled_moments(params.s).map_err(|e| e.context(format!("PT covariance at s = {}", params.s)))?;
    let a2 = params.alpha * params.alpha;
    Ok(Covariance2::diagonal(x2 / a2, p2 * a2))
}

/// Divides `phi` by its quadrature norm over its support.
pub fn renormalized(phi: Wavefunction) -> Result<Wavefunction> {
    let norm = wavefunction_norm(&phi)?;
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain("wavefunction has zero norm".into()));
    }
    Ok(phi.scaled(1.0 / norm.sqrt()))
}

/// `∫ φ² dx` over the support.
pub fn wavefunction_norm(phi: &Wavefunction) -> Result<f64> {
    let (lo, hi) = phi.support();
    let opts = QuadOptions::new(1e-15, 1e-13, 400_000);
    Ok(integrate_1d(|x| phi.eval(x).powi(2), Interval::new(lo, hi)?, &opts)?.value)
}
