//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed:
//! `cargo test -p anharmonic --test acceptance`.

use std::f64::consts::LN_2;
use std::time::Instant;

use anharmonic::exec::Execution;
use anharmonic::fock::{hermite_functions, FockState};
use anharmonic::measures::{
    entanglement_potential, measure_many, measure_model, model_wigner, nonlinearity_eta, scatter_params,
    MeasureOptions, MeasureRecord, ModelParams,
};
use anharmonic::oscillators::{
    mho_covariance, mho_ground, morse_covariance, morse_ground, pt_covariance, pt_ground, Covariance2, MhoParams,
    MorseParams, PtParams,
};
use anharmonic::perturb::{fidelity_map, linspace, perturbative_ground, pol_covariance, PolyParams};
use anharmonic::quad::{integrate_1d, integrate_2d, Interval, QuadOptions, Region};
use anharmonic::rng::SplitMix64;
use anharmonic::wavefn::Wavefunction;
use anharmonic::wigner::{
    even_superposition_wigner, fock_wigner, gaussian_wigner, mho_wigner, mho_wigner_physical, morse_wigner,
    morse_wigner_physical, negativity_volume, pt_wigner_s1, wavefunction_wigner, WignerField,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts_2d() -> QuadOptions {
    QuadOptions::DEFAULT_2D
}

/// Simpson's rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Spearman correlation for samples without ties.
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            r[i] = k as f64;
        }
        r
    };
    let (ra, rb) = (rank(a), rank(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn morse_with_n(alpha: f64, n: f64) -> MorseParams {
    let d = (alpha * (n + 0.5)).powi(2) / 2.0;
    MorseParams::new(d, alpha).unwrap()
}

// 1
fn fock_one_negativity() -> Outcome {
    // W(r) = (2r² − 1) e^{−r²}/π, so ∫∫|W| = 2∫₀^∞ |2r²−1| e^{−r²} r dr.
    let radial = |r: f64| 2.0 * ((2.0 * r * r - 1.0) * (-r * r).exp() * r).abs();
    let knee = 0.5f64.sqrt();
    let abs_total = simpson(radial, 0.0, knee, 20_000) + simpson(radial, knee, 12.0, 200_000);
    let oracle = abs_total - 1.0;
    let closed = 4.0 * (-0.5f64).exp() - 2.0;
    ensure((oracle - closed).abs() < 1e-9, || {
        format!("radial oracle {oracle} vs closed form {closed}")
    })?;
    let t = Instant::now();
    let neg =
        negativity_volume(&fock_wigner(&FockState::number(1, 2)).unwrap(), &opts_2d()).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    let nu_oracle = oracle / (1.0 + oracle);
    ensure((neg.delta - oracle).abs() < 1e-3, || {
        format!("delta {} vs {oracle}", neg.delta)
    })?;
    ensure((neg.nu - nu_oracle).abs() < 1e-3, || {
        format!("nu {} vs {nu_oracle}", neg.nu)
    })?;
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "delta {:.7} (oracle {oracle:.7}), nu {:.7}, {secs:.2} s",
        neg.delta, neg.nu
    ))
}

// 2
fn fock_entanglement() -> Outcome {
    let one = entanglement_potential(&FockState::number(1, 2)).map_err(|e| e.to_string())?;
    let vac = entanglement_potential(&FockState::vacuum(2)).map_err(|e| e.to_string())?;
    ensure((one - LN_2).abs() < 1e-9, || format!("E(|1>) = {one}"))?;
    ensure(vac.abs() < 1e-12, || format!("E(|0>) = {vac}"))?;
    Ok(format!("E(|1>) - ln 2 = {:.1e}, E(|0>) = {vac:.1e}", one - LN_2))
}

// 3
fn fidelity_floor() -> Outcome {
    let t = Instant::now();
    let cells = fidelity_map(
        &linspace(0.0, 0.1, 5),
        &linspace(0.0, 0.03, 5),
        1.0,
        61,
        Execution::Parallel,
    );
    let secs = t.elapsed().as_secs_f64();
    let mut min = f64::INFINITY;
    for c in &cells {
        let f = c
            .fidelity
            .ok_or_else(|| format!("cell ({}, {}) failed: {:?}", c.eps4, c.eps6, c.error))?;
        min = min.min(f);
    }
    let corner = cells.last().and_then(|c| c.fidelity).unwrap();
    ensure(min >= 0.976, || format!("min fidelity {min}"))?;
    ensure(corner <= 0.9999, || format!("corner fidelity {corner}"))?;
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!("min {min:.5}, far corner {corner:.5}, {secs:.2} s"))
}

fn records(models: &[ModelParams]) -> Result<Vec<MeasureRecord>, String> {
    measure_many(models, &MeasureOptions::default(), Execution::Parallel)
        .into_iter()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect()
}

// 4
fn mho_monotonicity() -> Outcome {
    let taus = linspace(0.1, 6.0, 20);
    let mut rows = Vec::new();
    for &tau in &taus {
        let cov = mho_covariance(&MhoParams::with_tau(1.0, tau).unwrap());
        let eta = nonlinearity_eta(&cov).map_err(|e| e.to_string())?;
        let nu = negativity_volume(&mho_wigner(tau).unwrap(), &opts_2d())
            .map_err(|e| e.to_string())?
            .nu;
        rows.push((eta, nu));
    }
    let (eta0, nu0) = rows[0];
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in rows.windows(2) {
        ensure(w[1].1 >= w[0].1 - 1e-6, || {
            format!("nu drops from {} to {} at eta {}", w[0].1, w[1].1, w[1].0)
        })?;
    }
    ensure(eta0 < 1e-2, || format!("eta(0.1) = {eta0}"))?;
    ensure(nu0 < 1e-3, || format!("nu(0.1) = {nu0}"))?;
    Ok(format!(
        "20 points, nu {:.4} -> {:.4}, eta(0.1) {eta0:.1e}",
        nu0,
        rows.last().unwrap().1
    ))
}

// 5
fn morse_monotonicity() -> Outcome {
    let alphas = linspace(0.15, 2.7, 15);
    let mut rows = Vec::new();
    for &a in &alphas {
        let n = MorseParams::new(1.0, a).unwrap().n();
        let nu = negativity_volume(&morse_wigner(n).unwrap(), &opts_2d())
            .map_err(|e| e.to_string())?
            .nu;
        rows.push((n, nu));
    }
    let (n_hi, n_lo) = (rows[0].0, rows.last().unwrap().0);
    ensure((n_hi - 8.928).abs() < 1e-3, || format!("N(0.15) = {n_hi}"))?;
    ensure((n_lo - 0.0238).abs() < 1e-3, || format!("N(2.7) = {n_lo}"))?;
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in rows.windows(2) {
        ensure(w[1].1 <= w[0].1 + 1e-6, || {
            format!("nu rises from {} to {} at N {}", w[0].1, w[1].1, w[1].0)
        })?;
    }
    Ok(format!(
        "N in [{n_lo:.4}, {n_hi:.3}], nu {:.4} -> {:.4}",
        rows[0].1,
        rows.last().unwrap().1
    ))
}

fn nu_of(w: &WignerField) -> Result<f64, String> {
    negativity_volume(w, &opts_2d())
        .map(|n| n.nu)
        .map_err(|e| e.to_string())
}

// 6
fn single_parameter_collapse() -> Outcome {
    let eta = |c: Covariance2| nonlinearity_eta(&c).map_err(|e| e.to_string());
    let mut report = Vec::new();

    let (m1, m2) = (
        MhoParams::with_tau(1.0, 2.0).unwrap(),
        MhoParams::with_tau(3.0, 2.0).unwrap(),
    );
    let de = (eta(mho_covariance(&m1))? - eta(mho_covariance(&m2))?).abs();
    let dn = (nu_of(&mho_wigner_physical(&m1).unwrap())? - nu_of(&mho_wigner_physical(&m2).unwrap())?).abs();
    ensure(de < 1e-10 && dn < 2e-3, || format!("MHO d_eta {de}, d_nu {dn}"))?;
    report.push(format!("MHO {de:.0e}/{dn:.0e}"));

    let (r1, r2) = (morse_with_n(0.5, 1.5), morse_with_n(1.3, 1.5));
    let de = (eta(morse_covariance(&r1).unwrap())? - eta(morse_covariance(&r2).unwrap())?).abs();
    let dn = (nu_of(&morse_wigner_physical(&r1).unwrap())? - nu_of(&morse_wigner_physical(&r2).unwrap())?).abs();
    ensure(de < 1e-10 && dn < 2e-3, || format!("Morse d_eta {de}, d_nu {dn}"))?;
    report.push(format!("Morse {de:.0e}/{dn:.0e}"));

    let (p1, p2) = (PtParams::with_s(1.0, 1.5).unwrap(), PtParams::with_s(2.0, 1.5).unwrap());
    let de = (eta(pt_covariance(&p1).unwrap())? - eta(pt_covariance(&p2).unwrap())?).abs();
    let w = |p: &PtParams| wavefunction_wigner(&pt_ground(p).unwrap().wavefunction).unwrap();
    let dn = (nu_of(&w(&p1))? - nu_of(&w(&p2))?).abs();
    ensure(de < 1e-10 && dn < 2e-3, || format!("PT d_eta {de}, d_nu {dn}"))?;
    report.push(format!("PT {de:.0e}/{dn:.0e}"));
    Ok(format!("|d_eta|/|d_nu|: {}", report.join(", ")))
}

// 7
fn entanglement_non_collapse() -> Outcome {
    let models: Vec<ModelParams> = [1.0, 2.0, 3.0]
        .iter()
        .map(|&b: &f64| ModelParams::Mho(MhoParams::new(b * b, b).unwrap()))
        .collect();
    let recs = records(&models)?;
    let ent: Vec<f64> = recs
        .iter()
        .map(|r| r.ent_potential.ok_or("missing E"))
        .collect::<Result<_, _>>()?;
    let squeeze: Vec<f64> = recs.iter().map(|r| r.r_x.min(r.r_p)).collect();
    let spread = ent.iter().cloned().fold(f64::MIN, f64::max) - ent.iter().cloned().fold(f64::MAX, f64::min);
    ensure(spread > 10.0 * 1e-6, || format!("E spread {spread}"))?;
    let rho = spearman(&squeeze, &ent);
    ensure(rho < 0.0, || format!("rank correlation {rho}"))?;
    Ok(format!("E = {ent:.4?}, spread {spread:.3}, rank corr {rho:.2}"))
}

// 8
fn dual_pipeline() -> Outcome {
    let mut rng = SplitMix64::new(8);
    let mho = MhoParams::with_tau(1.0, 1.0).unwrap();
    let morse1 = morse_with_n(1.0, 1.0);
    let morse5 = morse_with_n(1.0, 5.0);
    let pt = PtParams::with_s(1.0, 1.0).unwrap();
    type Case = (&'static str, WignerField, Wavefunction, (f64, f64), (f64, f64));
    let cases: Vec<Case> = vec![
        (
            "MHO",
            mho_wigner(1.0).unwrap(),
            mho_ground(&mho).unwrap().wavefunction,
            (-4.0, 4.0),
            (-3.0, 3.0),
        ),
        (
            "Morse N=1",
            morse_wigner(1.0).unwrap(),
            morse_ground(&morse1).unwrap().wavefunction,
            (-1.5, 4.0),
            (-2.0, 2.0),
        ),
        (
            "Morse N=5",
            morse_wigner(5.0).unwrap(),
            morse_ground(&morse5).unwrap().wavefunction,
            (-0.8, 1.5),
            (-4.0, 4.0),
        ),
        (
            "PT",
            pt_wigner_s1(1.0).unwrap(),
            pt_ground(&pt).unwrap().wavefunction,
            (-4.0, 4.0),
            (-3.0, 3.0),
        ),
    ];
    let mut report = Vec::new();
    for (name, analytic, phi, xr, pr) in cases {
        let definition = wavefunction_wigner(&phi).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let x = rng.uniform(xr.0, xr.1);
            let p = rng.uniform(pr.0, pr.1);
            worst = worst.max((analytic.eval(x, p) - definition.eval(x, p)).abs());
        }
        ensure(worst < 1e-6, || format!("{name}: pointwise error {worst}"))?;
        let (na, nd) = (nu_of(&analytic)?, nu_of(&definition)?);
        ensure((na - nd).abs() < 2e-3, || format!("{name}: nu {na} vs {nd}"))?;
        report.push(format!("{name} {worst:.0e}/{:.0e}", (na - nd).abs()));
    }
    Ok(format!("pointwise/nu gaps: {}", report.join(", ")))
}

fn moments(phi: &Wavefunction) -> Result<Covariance2, String> {
    let (lo, hi) = phi.support();
    let opts = QuadOptions::new(1e-13, 1e-11, 2_000_000);
    let iv = Interval::new(lo, hi).map_err(|e| e.to_string())?;
    let int = |f: &dyn Fn(f64) -> f64| integrate_1d(f, iv, &opts).map(|r| r.value).map_err(|e| e.to_string());
    let norm = int(&|x| phi.eval(x).powi(2))?;
    let mean = int(&|x| x * phi.eval(x).powi(2))? / norm;
    let sxx = int(&|x| (x - mean).powi(2) * phi.eval(x).powi(2))? / norm;
    let h = 1e-4 * sxx.sqrt();
    let d = |x: f64| {
        (phi.eval(x - 2.0 * h) - 8.0 * phi.eval(x - h) + 8.0 * phi.eval(x + h) - phi.eval(x + 2.0 * h)) / (12.0 * h)
    };
    let spp = int(&|x| d(x).powi(2))? / norm;
    Ok(Covariance2 {
        sxx,
        sxp: 0.0,
        spp,
        dx: mean,
        dp: 0.0,
    })
}

fn compare_cov(name: &str, analytic: &Covariance2, phi: &Wavefunction) -> Result<f64, String> {
    ensure(analytic.det() >= 0.25 - 1e-10, || {
        format!("{name}: det {}", analytic.det())
    })?;
    let q = moments(phi)?;
    let rel = ((analytic.sxx - q.sxx) / q.sxx)
        .abs()
        .max(((analytic.spp - q.spp) / q.spp).abs());
    ensure(rel < 1e-6, || {
        format!("{name}: covariance {analytic:?} vs moments {q:?}")
    })?;
    Ok(rel)
}

// 9
fn normalization_suite() -> Outcome {
    let total_opts = QuadOptions::new(1e-7, 1e-7, 20_000_000);
    let fields: Vec<(String, WignerField)> = vec![
        (
            "gaussian".into(),
            gaussian_wigner(&Covariance2::diagonal(0.25, 1.0)).unwrap(),
        ),
        ("mho tau=0.5".into(), mho_wigner(0.5).unwrap()),
        ("mho tau=1".into(), mho_wigner(1.0).unwrap()),
        ("mho tau=3".into(), mho_wigner(3.0).unwrap()),
        (
            "mho physical".into(),
            mho_wigner_physical(&MhoParams::new(2.0, 1.0).unwrap()).unwrap(),
        ),
        ("morse N=0.5".into(), morse_wigner(0.5).unwrap()),
        ("morse N=1".into(), morse_wigner(1.0).unwrap()),
        ("morse N=5".into(), morse_wigner(5.0).unwrap()),
        (
            "morse physical".into(),
            morse_wigner_physical(&MorseParams::new(1.0, 1.0).unwrap()).unwrap(),
        ),
        ("pt s=1".into(), pt_wigner_s1(1.0).unwrap()),
        (
            "pt s=2".into(),
            wavefunction_wigner(&pt_ground(&PtParams::with_s(1.0, 2.0).unwrap()).unwrap().wavefunction).unwrap(),
        ),
        ("fock 1".into(), fock_wigner(&FockState::number(1, 2)).unwrap()),
        ("fock 3".into(), fock_wigner(&FockState::number(3, 4)).unwrap()),
        (
            "even superposition".into(),
            even_superposition_wigner([0.9, -0.3, 0.3, 0.1]),
        ),
        (
            "poly omega=2".into(),
            model_wigner(&ModelParams::Poly(PolyParams::new(2.0, 0.1, 0.03).unwrap())).unwrap(),
        ),
    ];
    let mut worst_norm: f64 = 0.0;
    for (name, w) in &fields {
        let total = w.total(&total_opts).map_err(|e| format!("{name}: {e}"))?.value;
        ensure((total - 1.0).abs() < 1e-4, || format!("{name}: integral {total}"))?;
        worst_norm = worst_norm.max((total - 1.0).abs());
    }

    let mut worst_rel: f64 = 0.0;
    let mut count = 0;
    for tau in linspace(0.1, 6.0, 20) {
        let p = MhoParams::with_tau(1.0, tau).unwrap();
        worst_rel = worst_rel.max(compare_cov(
            "mho",
            &mho_covariance(&p),
            &mho_ground(&p).unwrap().wavefunction,
        )?);
        count += 1;
    }
    for a in linspace(0.15, 2.52, 14) {
        let p = MorseParams::new(1.0, a).unwrap();
        let c = morse_covariance(&p).map_err(|e| e.to_string())?;
        worst_rel = worst_rel.max(compare_cov("morse", &c, &morse_ground(&p).unwrap().wavefunction)?);
        count += 1;
    }
    for s in [0.5, 1.0, 2.0, 4.0] {
        let p = PtParams::with_s(1.5, s).unwrap();
        let c = pt_covariance(&p).map_err(|e| e.to_string())?;
        worst_rel = worst_rel.max(compare_cov("pt", &c, &pt_ground(&p).unwrap().wavefunction)?);
        count += 1;
    }
    for e4 in linspace(0.0, 0.1, 5) {
        for e6 in linspace(0.0, 0.03, 5) {
            let state = perturbative_ground(&PolyParams::new(1.0, e4, e6).unwrap(), 7);
            let c = pol_covariance(&state, 1.0).map_err(|e| e.to_string())?;
            let coeffs: Vec<f64> = state.coeffs().iter().map(|c| c.re).collect();
            let phi = Wavefunction::new(
                move |x| {
                    hermite_functions(x, coeffs.len())
                        .iter()
                        .zip(&coeffs)
                        .map(|(h, c)| h * c)
                        .sum()
                },
                (-12.0, 12.0),
            );
            worst_rel = worst_rel.max(compare_cov("poly", &c, &phi)?);
            count += 1;
        }
    }
    Ok(format!(
        "{} fields, worst |int W - 1| {worst_norm:.1e}; {count} covariances, worst rel {worst_rel:.1e}",
        fields.len()
    ))
}

// 10
fn explicit_expansion() -> Outcome {
    let mut rng = SplitMix64::new(10);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let raw: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let norm = raw.iter().map(|g| g * g).sum::<f64>().sqrt();
        let g: Vec<f64> = raw.iter().map(|g| g / norm).collect();
        let explicit = even_superposition_wigner([g[0], g[1], g[2], g[3]]);
        let state = FockState::from_real(&[g[0], 0.0, g[1], 0.0, g[2], 0.0, g[3]]).unwrap();
        let generic = fock_wigner(&state).unwrap();
        for _ in 0..50 {
            let x = rng.uniform(-4.0, 4.0);
            let p = rng.uniform(-4.0, 4.0);
            worst = worst.max((explicit.eval(x, p) - generic.eval(x, p)).abs());
        }
    }
    ensure(worst < 1e-10, || format!("worst gap {worst}"))?;
    Ok(format!("500 points, worst gap {worst:.1e}"))
}

struct Curve {
    eta: Vec<f64>,
    nu: Vec<f64>,
    ent: Vec<f64>,
}

impl Curve {
    fn new(recs: &[MeasureRecord]) -> Result<Self, String> {
        let mut c = Curve {
            eta: Vec::new(),
            nu: Vec::new(),
            ent: Vec::new(),
        };
        for r in recs {
            c.eta.push(r.eta_ng);
            c.nu.push(r.nu.ok_or("boundary nu missing")?);
            c.ent.push(r.ent_potential.ok_or("boundary E missing")?);
        }
        ensure(c.eta.windows(2).all(|w| w[1] > w[0]), || {
            "boundary eta not increasing".into()
        })?;
        Ok(c)
    }

    /// Linear interpolation, `None` outside the curve's `η` range.
    fn at(&self, ys: &[f64], eta: f64) -> Option<f64> {
        if eta < self.eta[0] || eta > *self.eta.last().unwrap() {
            return None;
        }
        let i = self.eta.partition_point(|&e| e < eta).clamp(1, self.eta.len() - 1);
        let t = (eta - self.eta[i - 1]) / (self.eta[i] - self.eta[i - 1]);
        Some(ys[i - 1] + t * (ys[i] - ys[i - 1]))
    }
}

/// Largest amount by which points fall on the wrong side of a boundary curve,
/// and how many points the curve covers.
fn violation(curve: &Curve, ys: fn(&Curve) -> &[f64], pts: &[(f64, f64)], lower: bool) -> (f64, usize) {
    let mut worst = f64::NEG_INFINITY;
    let mut n = 0;
    for &(eta, v) in pts {
        if let Some(b) = curve.at(ys(curve), eta) {
            n += 1;
            worst = worst.max(if lower { b - v } else { v - b });
        }
    }
    (worst, n)
}

fn scatter_records(exec: Execution) -> Result<Vec<MeasureRecord>, String> {
    let params = scatter_params(1000, 0.1, 0.03, 1.0, 42).map_err(|e| e.to_string())?;
    let models: Vec<ModelParams> = params.into_iter().map(ModelParams::Poly).collect();
    measure_many(&models, &MeasureOptions::default(), exec)
        .into_iter()
        .map(|r| r.map_err(|e| e.to_string()))
        .collect()
}

// 11
fn scatter_envelopes(scatter: &[MeasureRecord]) -> Outcome {
    let edge = |fixed4: Option<f64>, fixed6: Option<f64>| -> Result<Curve, String> {
        let models: Vec<ModelParams> = match (fixed4, fixed6) {
            (None, Some(e6)) => linspace(0.0, 0.1, 50)
                .into_iter()
                .map(|e4| (e4, e6))
                .collect::<Vec<_>>(),
            (Some(e4), None) => linspace(0.0, 0.03, 50).into_iter().map(|e6| (e4, e6)).collect(),
            _ => unreachable!(),
        }
        .into_iter()
        .map(|(e4, e6)| ModelParams::Poly(PolyParams::new(1.0, e4, e6).unwrap()))
        .collect();
        Curve::new(&records(&models)?)
    };
    let eps6_zero = edge(None, Some(0.0))?;
    let eps6_max = edge(None, Some(0.03))?;
    let eps4_zero = edge(Some(0.0), None)?;
    let eps4_max = edge(Some(0.1), None)?;

    let nu_pts: Vec<(f64, f64)> = scatter.iter().map(|r| (r.eta_ng, r.nu.unwrap_or(f64::NAN))).collect();
    let ent_pts: Vec<(f64, f64)> = scatter
        .iter()
        .map(|r| (r.eta_ng, r.ent_potential.unwrap_or(f64::NAN)))
        .collect();
    ensure(nu_pts.iter().chain(&ent_pts).all(|p| p.1.is_finite()), || {
        "scatter record missing a measure".into()
    })?;
    let tol = 1e-4;
    let nu: fn(&Curve) -> &[f64] = |c| &c.nu;
    let ent: fn(&Curve) -> &[f64] = |c| &c.ent;
    let checks = [
        ("nu above eps6=0", violation(&eps6_zero, nu, &nu_pts, true)),
        ("nu below eps6=0.03", violation(&eps6_max, nu, &nu_pts, false)),
        ("E above eps4=0", violation(&eps4_zero, ent, &ent_pts, true)),
        ("E below eps4=0.1", violation(&eps4_max, ent, &ent_pts, false)),
        // Role inversion: the ε₆ = 0 curve bounds ν from below but ℰ from above.
        ("E below eps6=0", violation(&eps6_zero, ent, &ent_pts, false)),
    ];
    for (name, (worst, n)) in &checks {
        ensure(*n > 0, || format!("{name}: no points in range"))?;
        ensure(*worst <= tol, || {
            format!("{name}: violated by {worst:.2e} over {n} points")
        })?;
    }
    // Where the ε₆ = 0 curve has points, ν sits above it and ℰ below it.
    let (nu_above, _) = violation(&eps6_zero, nu, &nu_pts, false);
    let (ent_below, _) = violation(&eps6_zero, ent, &ent_pts, true);
    ensure(nu_above > tol && ent_below > tol, || {
        "eps6=0 curve does not swap roles".into()
    })?;
    let worst = checks.iter().map(|c| c.1 .0).fold(f64::MIN, f64::max);
    Ok(format!(
        "{} points, worst signed excursion {worst:.1e} (tol {tol:.0e})",
        scatter.len()
    ))
}

fn fingerprint(recs: &[MeasureRecord]) -> Vec<u64> {
    recs.iter()
        .flat_map(|r| {
            [
                r.eta_ng,
                r.nu.unwrap_or(f64::NAN),
                r.ent_potential.unwrap_or(f64::NAN),
                r.r_x,
                r.r_p,
                r.energy,
                r.fidelity.unwrap_or(f64::NAN),
            ]
        })
        .map(f64::to_bits)
        .collect()
}

// 12
fn determinism(scatter: &[MeasureRecord]) -> Outcome {
    let again = scatter_records(Execution::Sequential)?;
    ensure(fingerprint(scatter) == fingerprint(&again), || {
        "scatter runs differ".into()
    })?;
    let f = |x: f64, p: f64| (-(x * x + 2.0 * p * p)).exp() * (3.0 * x * p).cos();
    let region = Region::rect(-5.0, 5.0, -5.0, 5.0).unwrap();
    let a = integrate_2d(f, region, &opts_2d()).map_err(|e| e.to_string())?;
    let b = integrate_2d(f, region, &opts_2d()).map_err(|e| e.to_string())?;
    ensure(
        a.value.to_bits() == b.value.to_bits() && a.abs_error_estimate.to_bits() == b.abs_error_estimate.to_bits(),
        || "2D quadrature differs between runs".into(),
    )?;
    let g = |x: f64| (-x * x).exp() * x.cos();
    let iv = Interval::new(f64::NEG_INFINITY, f64::INFINITY).unwrap();
    let c = integrate_1d(g, iv, &QuadOptions::DEFAULT_1D).map_err(|e| e.to_string())?;
    let d = integrate_1d(g, iv, &QuadOptions::DEFAULT_1D).map_err(|e| e.to_string())?;
    ensure(c.value.to_bits() == d.value.to_bits(), || {
        "1D quadrature differs between runs".into()
    })?;
    let w = fock_wigner(&FockState::from_real(&[0.6, 0.0, 0.8]).unwrap()).unwrap();
    let n1 = negativity_volume(&w, &opts_2d()).map_err(|e| e.to_string())?;
    let n2 = negativity_volume(&w, &opts_2d()).map_err(|e| e.to_string())?;
    ensure(n1.delta.to_bits() == n2.delta.to_bits(), || {
        "negativity differs between runs".into()
    })?;
    let p = ModelParams::Poly(PolyParams::new(1.0, 0.07, 0.02).unwrap());
    let r1 = measure_model(&p, &MeasureOptions::default()).map_err(|e| e.to_string())?;
    let r2 = measure_model(&p, &MeasureOptions::default()).map_err(|e| e.to_string())?;
    ensure(fingerprint(&[r1]) == fingerprint(&[r2]), || {
        "single record differs between runs".into()
    })?;
    Ok(format!(
        "{} scatter records bit-identical (parallel vs sequential), quadrature bit-identical",
        scatter.len()
    ))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        let line = match &out {
            Ok(msg) => format!("PASS [{id:2}] {name}: {msg} ({secs:.1} s)"),
            Err(msg) => format!("FAIL [{id:2}] {name}: {msg} ({secs:.1} s)"),
        };
        println!("{line}");
        results.push((id, name, out, secs));
    };
    run(1, "Fock |1> negativity", &fock_one_negativity);
    run(2, "Fock entanglement potential", &fock_entanglement);
    run(3, "fidelity floor", &fidelity_floor);
    run(4, "MHO monotonicity", &mho_monotonicity);
    run(5, "Morse monotonicity", &morse_monotonicity);
    run(6, "single-parameter collapse", &single_parameter_collapse);
    run(7, "entanglement non-collapse", &entanglement_non_collapse);
    run(8, "dual-pipeline Wigner equivalence", &dual_pipeline);
    run(9, "normalization suite", &normalization_suite);
    run(10, "explicit even-superposition expansion", &explicit_expansion);
    let scatter = scatter_records(Execution::Parallel);
    run(11, "scatter envelopes", &|| {
        scatter_envelopes(scatter.as_ref().map_err(Clone::clone)?)
    });
    run(12, "determinism", &|| {
        determinism(scatter.as_ref().map_err(Clone::clone)?)
    });
    let failed: Vec<_> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!(
        "{} of {} criteria passed in {:.1} s",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
