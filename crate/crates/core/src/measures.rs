//! Figures of merit of a ground state: the nonlinearity `η_NG`, the Wigner
//! nonclassicality `ν`, the entanglement potential `ℰ` and the squeezing
//! ratios `r_x`, `r_p`.

use crate::error::{Error, Result};
use crate::exec::{map_points, Execution};
use crate::fock::{
    beam_splitter_50_50, entanglement_entropy, fidelity, fock_expand_adaptive, hermite_functions, FockState,
};
use crate::oscillators::{
    mho_covariance, mho_ground, morse_covariance, morse_ground, pt_covariance, pt_ground, Covariance2, MhoParams,
    MorseParams, PtParams, UNCERTAINTY_SLACK,
};
use crate::perturb::{numeric_ground, perturbative_ground, pol_covariance, PolyParams, DEFAULT_DIAG_DIM};
use crate::quad::QuadOptions;
use crate::rng::SplitMix64;
use crate::specfun::h_entropy;
use crate::wavefn::Wavefunction;
use crate::wigner::{
    fock_wigner, mho_wigner, mho_wigner_physical, morse_wigner, morse_wigner_physical, negativity_volume, pt_wigner_s1,
    wavefunction_wigner, PhaseBox, WignerField,
};

/// `h(√det σ)` for a pure state.
pub fn nonlinearity_eta(cov: &Covariance2) -> Result<f64> {
    cov.validate()?;
    let root = cov.det().sqrt();
    let root = if root < 0.5 && root >= (0.25 - UNCERTAINTY_SLACK).sqrt() {
        0.5
    } else {
        root
    };
    h_entropy(root)
}

/// `(2σ_xx, 2σ_pp)`: variances relative to the unit-frequency vacuum.
pub fn squeezing_ratios(cov: &Covariance2) -> (f64, f64) {
    (2.0 * cov.sxx, 2.0 * cov.spp)
}

/// Entanglement entropy (nats) behind a 50:50 beam splitter with vacuum in
/// the other port.
pub fn entanglement_potential(state: &FockState) -> Result<f64> {
    entanglement_entropy(&beam_splitter_50_50(state))
}

/// A model and its raw parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Mho(MhoParams),
    Morse(MorseParams),
    Pt(PtParams),
    Poly(PolyParams),
}

impl ModelParams {
    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Mho(_) => "mho",
            ModelParams::Morse(_) => "morse",
            ModelParams::Pt(_) => "pt",
            ModelParams::Poly(_) => "poly",
        }
    }

    /// `τ`, `N` or `s`; the polynomial model has none.
    pub fn effective(&self) -> Option<f64> {
        match self {
            ModelParams::Mho(p) => Some(p.tau()),
            ModelParams::Morse(p) => Some(p.n()),
            ModelParams::Pt(p) => Some(p.s()),
            ModelParams::Poly(_) => None,
        }
    }

    /// Name of [`ModelParams::effective`].
    pub fn effective_name(&self) -> Option<&'static str> {
        match self {
            ModelParams::Mho(_) => Some("tau"),
            ModelParams::Morse(_) => Some("N"),
            ModelParams::Pt(_) => Some("s"),
            ModelParams::Poly(_) => None,
        }
    }

    /// Raw parameters as `(name, value)` pairs in a fixed order.
    pub fn raw(&self) -> Vec<(&'static str, f64)> {
        match self {
            ModelParams::Mho(p) => vec![("alpha", p.alpha()), ("beta", p.beta())],
            ModelParams::Morse(p) => vec![("d", p.depth()), ("alpha", p.alpha())],
            ModelParams::Pt(p) => vec![("a", p.depth()), ("alpha", p.alpha())],
            ModelParams::Poly(p) => vec![("omega", p.omega()), ("eps4", p.eps4()), ("eps6", p.eps6())],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    /// Tolerances for negativity volumes.
    pub quad_2d: QuadOptions,
    /// Starting Fock dimension for `ℰ`.
    pub dim_fock: usize,
    /// Largest Fock dimension tried before giving up on `ℰ`.
    pub max_dim_fock: usize,
    /// Levels for exact diagonalization of the polynomial model.
    pub dim_diag: usize,
    /// Whether polynomial records carry the fidelity against diagonalization.
    pub fidelity: bool,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            quad_2d: QuadOptions::DEFAULT_2D,
            dim_fock: 60,
            max_dim_fock: 400,
            dim_diag: DEFAULT_DIAG_DIM,
            fidelity: true,
        }
    }
}

/// A measure that could not be computed while the rest of the record could.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRecord {
    pub model: ModelParams,
    pub eta_ng: f64,
    pub nu: Option<f64>,
    /// Nats.
    pub ent_potential: Option<f64>,
    pub r_x: f64,
    pub r_p: f64,
    pub energy: f64,
    /// Polynomial model only.
    pub fidelity: Option<f64>,
    pub failures: Vec<FieldError>,
}

impl MeasureRecord {
    pub fn effective(&self) -> Option<f64> {
        self.model.effective()
    }

    /// `failures` joined into one line, if any.
    pub fn error_message(&self) -> Option<String> {
        if self.failures.is_empty() {
            return None;
        }
        Some(
            self.failures
                .iter()
                .map(|f| format!("{}: {}", f.field, f.error))
                .collect::<Vec<_>>()
                .join("; "),
        )
    }
}

/// Everything [`measure_model`] needs about one ground state.
struct Prepared {
    cov: Covariance2,
    energy: f64,
    wigner: Option<Result<WignerField>>,
    /// Unit-frequency position wavefunction, or the unit-frequency state.
    ent_input: EntInput,
    fidelity: Option<Result<f64>>,
}

enum EntInput {
    Wave(Wavefunction),
    State(FockState),
}

fn prepare(model: &ModelParams, opts: &MeasureOptions) -> Result<Prepared> {
    match model {
        ModelParams::Mho(p) => {
            let g = mho_ground(p)?;
            // β = 0 is the Gaussian ground state.
            let wigner = (p.beta() > 0.0).then(|| mho_wigner(p.tau()));
            Ok(Prepared {
                cov: mho_covariance(p),
                energy: g.energy,
                wigner,
                ent_input: EntInput::Wave(g.wavefunction),
                fidelity: None,
            })
        }
        ModelParams::Morse(p) => {
            let g = morse_ground(p)?;
            Ok(Prepared {
                cov: morse_covariance(p)?,
                energy: g.energy,
                wigner: Some(morse_wigner(p.n())),
                ent_input: EntInput::Wave(g.wavefunction),
                fidelity: None,
            })
        }
        ModelParams::Pt(p) => {
            let g = pt_ground(p)?;
            // ν depends on s only; the unit-width well is cheapest.
            let unit = PtParams::with_s(1.0, p.s())?;
            let wigner = pt_ground(&unit).and_then(|u| wavefunction_wigner(&u.wavefunction));
            Ok(Prepared {
                cov: pt_covariance(p)?,
                energy: g.energy,
                wigner: Some(wigner),
                ent_input: EntInput::Wave(g.wavefunction),
                fidelity: None,
            })
        }
        ModelParams::Poly(p) => {
            let state = perturbative_ground(p, 7);
            let exact = numeric_ground(p, opts.dim_diag)?;
            let fid = opts.fidelity.then(|| Ok(fidelity(&state, &exact.state)));
            // Negativity is unchanged by the x ↦ √ω x rescaling, so the ω-basis
            // state can be used as is.
            let wigner = Some(fock_wigner(&state));
            let ent_input = if p.omega() == 1.0 {
                EntInput::State(state.clone())
            } else {
                EntInput::Wave(omega_basis_wavefunction(&state, p.omega()))
            };
            Ok(Prepared {
                cov: pol_covariance(&state, p.omega())?,
                energy: exact.energy,
                wigner,
                ent_input,
                fidelity: fid,
            })
        }
    }
}

/// `Σ c_n ω^{1/4} ψ_n(√ω x)` for real coefficients in the frequency-`ω` basis.
fn omega_basis_wavefunction(state: &FockState, omega: f64) -> Wavefunction {
    let coeffs: Vec<f64> = state.coeffs().iter().map(|c| c.re).collect();
    let scale = omega.sqrt();
    let amp = omega.powf(0.25);
    let reach = ((2.0 * coeffs.len() as f64 + 1.0).sqrt() + 12.0) / scale;
    Wavefunction::new(
        move |x| {
            hermite_functions(scale * x, coeffs.len())
                .iter()
                .zip(&coeffs)
                .map(|(h, c)| h * c)
                .sum::<f64>()
                * amp
        },
        (-reach, reach),
    )
}

/// Ground-state Wigner function in physical `(x, p)`.
pub fn model_wigner(model: &ModelParams) -> Result<WignerField> {
    match model {
        ModelParams::Mho(p) => mho_wigner_physical(p),
        ModelParams::Morse(p) => morse_wigner_physical(p),
        ModelParams::Pt(p) if p.s() == 1.0 => pt_wigner_s1(p.alpha()),
        ModelParams::Pt(p) => wavefunction_wigner(&pt_ground(p)?.wavefunction),
        ModelParams::Poly(p) => {
            let unit = fock_wigner(&perturbative_ground(p, 7))?;
            let k = p.omega().sqrt();
            let b = unit.bbox();
            let bbox = PhaseBox {
                x: (b.x.0 / k, b.x.1 / k),
                p: (b.p.0 * k, b.p.1 * k),
            };
            Ok(WignerField::new(move |x, y| unit.eval(k * x, y / k), bbox))
        }
    }
}

/// Computes every measure for one model. Failures of `ν`, `ℰ` or the
/// fidelity are recorded in the result; anything else is an error.
pub fn measure_model(model: &ModelParams, opts: &MeasureOptions) -> Result<MeasureRecord> {
    let ctx = |e: Error| e.context(format!("{} {:?}", model.name(), model.raw()));
    let prep = prepare(model, opts).map_err(ctx)?;
    let eta_ng = nonlinearity_eta(&prep.cov).map_err(ctx)?;
    let (r_x, r_p) = squeezing_ratios(&prep.cov);
    let mut failures = Vec::new();

    let nu = match prep.wigner {
        None => Some(0.0),
        Some(w) => match w.and_then(|w| negativity_volume(&w, &opts.quad_2d)) {
            Ok(n) => Some(n.nu),
            Err(error) => {
                failures.push(FieldError { field: "nu", error });
                None
            }
        },
    };

    let ent = match prep.ent_input {
        EntInput::State(s) => entanglement_potential(&s),
        EntInput::Wave(phi) => {
            fock_expand_adaptive(&phi, opts.dim_fock, opts.max_dim_fock).and_then(|e| entanglement_potential(&e.state))
        }
    };
    let ent_potential = match ent {
        Ok(v) => Some(v),
        Err(error) => {
            failures.push(FieldError {
                field: "ent_potential",
                error,
            });
            None
        }
    };

    let fidelity = match prep.fidelity {
        None => None,
        Some(Ok(f)) => Some(f),
        Some(Err(error)) => {
            failures.push(FieldError {
                field: "fidelity",
                error,
            });
            None
        }
    };

    Ok(MeasureRecord {
        model: *model,
        eta_ng,
        nu,
        ent_potential,
        r_x,
        r_p,
        energy: prep.energy,
        fidelity,
        failures,
    })
}

/// [`measure_model`] over many models, results in input order.
pub fn measure_many(models: &[ModelParams], opts: &MeasureOptions, exec: Execution) -> Vec<Result<MeasureRecord>> {
    map_points(exec, models, |m| measure_model(m, opts))
}

/// Draws `n` points uniformly from `[0, eps4_max] × [0, eps6_max]`, `ε₄`
/// first for each point.
pub fn scatter_params(n: usize, eps4_max: f64, eps6_max: f64, omega: f64, seed: u64) -> Result<Vec<PolyParams>> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let e4 = rng.uniform(0.0, eps4_max);
            let e6 = rng.uniform(0.0, eps6_max);
            PolyParams::new(omega, e4, e6)
        })
        .collect()
}
