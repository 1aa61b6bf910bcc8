//! Harmonic oscillator with quartic and sextic perturbations,
//! `H = ½(p² + ω²x²) + ε₄x⁴ + ε₆x⁶`.
//!
//! States are expressed in the number basis of the unperturbed oscillator
//! of frequency `ω`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_points, Execution};
use crate::fock::{fidelity, ladder_matrices, symmetric_eigen, FockState, SymMatrix};
use crate::oscillators::Covariance2;

/// Upper corner of the parameter box in which first-order results are
/// expected to hold at `ω = 1`.
pub const EPS4_BOX: f64 = 0.1;
pub const EPS6_BOX: f64 = 0.03;

/// Number of levels used for exact diagonalization by default.
pub const DEFAULT_DIAG_DIM: usize = 61;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyParams {
    omega: f64,
    eps4: f64,
    eps6: f64,
}

impl PolyParams {
    pub fn new(omega: f64, eps4: f64, eps6: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
        }
        for (name, v) in [("eps4", eps4), ("eps6", eps6)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(PolyParams { omega, eps4, eps6 })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn eps4(&self) -> f64 {
        self.eps4
    }

    pub fn eps6(&self) -> f64 {
        self.eps6
    }

    /// False when the parameters lie outside the box where first-order
    /// perturbation theory was validated.
    pub fn in_validity_box(&self) -> bool {
        self.omega == 1.0 && self.eps4 <= EPS4_BOX && self.eps6 <= EPS6_BOX
    }
}

/// `⟨n|x̂⁴|n+dn⟩` for the frequency-`ω` oscillator.
pub fn x4_element(n: usize, dn: usize, omega: f64) -> f64 {
    let nf = n as f64;
    let rise = |k: usize| (1..=k).map(|j| nf + j as f64).product::<f64>().sqrt();
    let v = match dn {
        0 => 6.0 * nf * nf + 6.0 * nf + 3.0,
        2 => (4.0 * nf + 6.0) * rise(2),
        4 => rise(4),
        _ => 0.0,
    };
    v / (4.0 * omega * omega)
}

/// `⟨n|x̂⁶|n+dn⟩` for the frequency-`ω` oscillator.
pub fn x6_element(n: usize, dn: usize, omega: f64) -> f64 {
    let nf = n as f64;
    let rise = |k: usize| (1..=k).map(|j| nf + j as f64).product::<f64>().sqrt();
    let v = match dn {
        0 => 5.0 * (4.0 * nf.powi(3) + 6.0 * nf * nf + 8.0 * nf + 3.0),
        2 => 15.0 * (nf * nf + 3.0 * nf + 3.0) * rise(2),
        4 => 3.0 * (2.0 * nf + 5.0) * rise(4),
        6 => rise(6),
        _ => 0.0,
    };
    v / (8.0 * omega.powi(3))
}

/// Amplitudes of `|0⟩, |2⟩, |4⟩, |6⟩` in the first-order ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoeffs {
    pub gamma0: f64,
    pub gamma2: f64,
    pub gamma4: f64,
    pub gamma6: f64,
}

impl GammaCoeffs {
    pub fn as_array(&self) -> [f64; 4] {
        [self.gamma0, self.gamma2, self.gamma4, self.gamma6]
    }

    /// `C = 1/γ₀`.
    pub fn normalization(&self) -> f64 {
        1.0 / self.gamma0
    }

    pub fn state(&self, dim: usize) -> FockState {
        let mut c = vec![0.0; dim.max(7)];
        c[0] = self.gamma0;
        c[2] = self.gamma2;
        c[4] = self.gamma4;
        c[6] = self.gamma6;
        FockState::from_real(&c).expect("dim >= 7")
    }
}

/// `γ_k ∝ −V_{k0}/(kω)` with `V = ε₄x⁴ + ε₆x⁶`, normalized.
pub fn gamma_coeffs(params: &PolyParams) -> GammaCoeffs {
    let w = params.omega;
    let v = |k: usize| params.eps4 * x4_element(0, k, w) + params.eps6 * x6_element(0, k, w);
    let r = |k: usize| -v(k) / (k as f64 * w);
    let (r2, r4, r6) = (r(2), r(4), r(6));
    let c = (1.0 + r2 * r2 + r4 * r4 + r6 * r6).sqrt();
    GammaCoeffs {
        gamma0: 1.0 / c,
        gamma2: r2 / c,
        gamma4: r4 / c,
        gamma6: r6 / c,
    }
}

/// First-order ground state, padded to `dim` (at least 7) levels.
pub fn perturbative_ground(params: &PolyParams, dim: usize) -> FockState {
    gamma_coeffs(params).state(dim)
}

/// Hamiltonian matrix on the first `dim` levels.
pub fn hamiltonian(params: &PolyParams, dim: usize) -> Result<SymMatrix> {
    let ops = ladder_matrices(dim, params.omega)?;
    let w2 = params.omega * params.omega;
    Ok(SymMatrix::from_upper(dim, |i, j| {
        0.5 * ops.p2.get(i, j)
            + 0.5 * w2 * ops.x2.get(i, j)
            + params.eps4 * ops.x4.get(i, j)
            + params.eps6 * ops.x6.get(i, j)
    }))
}

/// `⟨ψ|H|ψ⟩` for a real state.
pub fn energy_expectation(params: &PolyParams, state: &FockState) -> Result<f64> {
    let dim = state.dim().max(2);
    let h = hamiltonian(params, dim)?;
    let c: Vec<f64> = (0..dim).map(|n| state.coeff(n).re).collect();
    Ok(c.iter().zip(h.mul_vec(&c)).map(|(a, b)| a * b).sum())
}

#[derive(Debug, Clone)]
pub struct NumericGround {
    pub state: FockState,
    pub energy: f64,
}

/// Lowest eigenpair of the truncated Hamiltonian, sign fixed so `γ₀ > 0`.
pub fn numeric_ground(params: &PolyParams, dim: usize) -> Result<NumericGround> {
    if dim < 31 {
        return Err(Error::InvalidParams(format!(
            "diagonalization needs dim >= 31, got {dim}"
        )));
    }
    let eig = symmetric_eigen(&hamiltonian(params, dim)?)?;
    let mut v = eig.vectors[0].clone();
    if v[0] < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(NumericGround {
        state: FockState::from_real(&v)?.normalized()?,
        energy: eig.values[0],
    })
}

/// Covariance from `⟨â⟩`, `⟨â†â⟩`, `⟨â²⟩` with `x̂ = (â+â†)/√(2ω)`,
/// `p̂ = i√(ω/2)(â†−â)`.
pub fn pol_covariance(state: &FockState, omega: f64) -> Result<Covariance2> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParams(format!("omega must be positive, got {omega}")));
    }
    let norm = state.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::Domain("zero state".into()));
    }
    let a: Complex64 = state.lowering_moment(1) / norm;
    let a2: Complex64 = state.lowering_moment(2) / norm;
    let n = state.mean_number() / norm;
    let sxx = (1.0 + 2.0 * a2.re + 2.0 * n - 4.0 * a.re * a.re) / (2.0 * omega);
    let spp = 0.5 * omega * (1.0 + 2.0 * n - 2.0 * a2.re) - 2.0 * omega * a.im * a.im;
    let sxp = a2.im - 2.0 * a.re * a.im;
    Ok(Covariance2 {
        sxx,
        sxp,
        spp,
        dx: 2.0 * a.re / (2.0 * omega).sqrt(),
        dp: (2.0 * omega).sqrt() * a.im,
    })
}

/// One cell of a fidelity map.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCell {
    pub eps4: f64,
    pub eps6: f64,
    pub fidelity: Option<f64>,
    pub error: Option<String>,
}

/// `n` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// `|⟨ψ_pert|ψ_num⟩|²` over the grid `eps4 × eps6`, row-major in `eps4`.
pub fn fidelity_map(eps4: &[f64], eps6: &[f64], omega: f64, dim: usize, exec: Execution) -> Vec<FidelityCell> {
    let cells: Vec<(f64, f64)> = eps4.iter().flat_map(|&a| eps6.iter().map(move |&b| (a, b))).collect();
    map_points(exec, &cells, |&(e4, e6)| {
        let run = || -> Result<f64> {
            let params = PolyParams::new(omega, e4, e6)?;
            let exact = numeric_ground(&params, dim)?;
            Ok(fidelity(&perturbative_ground(&params, dim), &exact.state))
        };
        match run() {
            Ok(f) => FidelityCell {
                eps4: e4,
                eps6: e6,
                fidelity: Some(f),
                error: None,
            },
            Err(e) => FidelityCell {
                eps4: e4,
                eps6: e6,
                fidelity: None,
                error: Some(e.to_string()),
            },
        }
    })
}
