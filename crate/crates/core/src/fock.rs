//! Truncated Fock space of a single oscillator mode (`ħ = m = 1`).
//!
//! States, quadrature operator matrices, a cyclic Jacobi eigensolver,
//! Hermite-function expansion of wavefunctions, the 50:50 beam splitter and
//! the entanglement entropy of its two-mode output.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::specfun::log_gamma;
use crate::wavefn::Wavefunction;

/// Pure state in the number basis `|0⟩ … |dim−1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    coeffs: Vec<Complex64>,
}

impl FockState {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("Fock state needs dim >= 1".into()));
        }
        Ok(FockState { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        FockState::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Number state `|n⟩` in a space of dimension `dim > n`.
    pub fn number(n: usize, dim: usize) -> Self {
        assert!(n < dim, "number state |{n}> does not fit in dim {dim}");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        coeffs[n] = Complex64::new(1.0, 0.0);
        FockState { coeffs }
    }

    pub fn vacuum(dim: usize) -> Self {
        FockState::number(0, dim)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero state".into()));
        }
        for c in &mut self.coeffs {
            *c /= n;
        }
        Ok(self)
    }

    /// Zero-padded (or truncated) copy with the given dimension.
    pub fn resized(&self, dim: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim.max(1), Complex64::new(0.0, 0.0));
        FockState { coeffs }
    }

    /// `⟨self|other⟩`, padding the shorter state with zeros.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        FockState {
            coeffs: self.coeffs.iter().map(|c| c * phase).collect(),
        }
    }

    /// `⟨ψ|â†â|ψ⟩`.
    pub fn mean_number(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// `⟨ψ|â^k|ψ⟩ = Σ_n c*_{n} c_{n+k} √((n+1)…(n+k))`.
    pub fn lowering_moment(&self, k: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..self.dim().saturating_sub(k) {
            let factor: f64 = (n + 1..=n + k).map(|m| m as f64).product::<f64>().sqrt();
            acc += self.coeffs[n].conj() * self.coeffs[n + k] * factor;
        }
        acc
    }
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &FockState, b: &FockState) -> f64 {
    a.inner(b).norm_sqr()
}

/// Dense real symmetric matrix stored in full.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds the matrix from its upper triangle `f(i, j)`, `i <= j`.
    pub fn from_upper<F: Fn(usize, usize) -> f64>(n: usize, f: F) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self · other`, symmetrized. Exact for commuting arguments such as
    /// powers of one operator.
    pub fn mul_commuting(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut a = 0.0;
                let mut b = 0.0;
                for k in 0..n {
                    a += self.get(i, k) * other.get(k, j);
                    b += self.get(j, k) * other.get(k, i);
                }
                out.set(i, j, 0.5 * (a + b));
            }
        }
        out
    }

    /// Leading `dim × dim` block.
    pub fn cropped(&self, dim: usize) -> SymMatrix {
        SymMatrix::from_upper(dim, |i, j| self.get(i, j))
    }

    pub fn add_scaled(&mut self, factor: f64, other: &SymMatrix) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Extra levels used when forming operator powers, so the retained block is
/// free of truncation artifacts from the band structure.
pub const POWER_PADDING: usize = 8;

/// Quadrature operators in the number basis of an oscillator with frequency
/// `ω`: `x̂ = (â + â†)/√(2ω)`, `p̂ = i√(ω/2)(â† − â)`.
#[derive(Debug, Clone)]
pub struct LadderOps {
    pub dim: usize,
    pub omega: f64,
    pub x: SymMatrix,
    pub x2: SymMatrix,
    pub x4: SymMatrix,
    pub x6: SymMatrix,
    pub p2: SymMatrix,
}

pub fn ladder_matrices(dim: usize, omega: f64) -> Result<LadderOps> {
    if dim < 2 {
        return Err(Error::Domain("ladder matrices need dim >= 2".into()));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    let work = dim + POWER_PADDING;
    let scale = 1.0 / (2.0 * omega).sqrt();
    let x_big = SymMatrix::from_upper(work, |i, j| if j == i + 1 { (j as f64).sqrt() * scale } else { 0.0 });
    let x2_big = x_big.mul_commuting(&x_big);
    let x4_big = x2_big.mul_commuting(&x2_big);
    let x6_big = x4_big.mul_commuting(&x2_big);
    let p2 = SymMatrix::from_upper(dim, |i, j| {
        let n = i as f64;
        if i == j {
            0.5 * omega * (2.0 * n + 1.0)
        } else if j == i + 2 {
            -0.5 * omega * ((n + 1.0) * (n + 2.0)).sqrt()
        } else {
            0.0
        }
    });
    Ok(LadderOps {
        dim,
        omega,
        x: x_big.cropped(dim),
        x2: x2_big.cropped(dim),
        x4: x4_big.cropped(dim),
        x6: x6_big.cropped(dim),
        p2,
    })
}

/// Eigen-decomposition with eigenvalues ascending; `vectors[k]` is the unit
/// eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `1e-12 ‖m‖`.
pub fn symmetric_eigen(m: &SymMatrix) -> Result<Eigen> {
    let n = m.dim();
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm = m.frobenius();
    let threshold = 1e-12 * norm;
    let off = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = norm == 0.0 || off(&a) <= threshold;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                value: off(&a),
                error_estimate: threshold,
                evaluations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        converged = off(&a) <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// Unit-frequency Hermite functions `ψ_0(x) … ψ_{count−1}(x)`.
///
/// The recurrence runs on a rescaled copy with the exponent tracked
/// separately, so large `n` at large `|x|` neither overflows nor loses the
/// values to premature underflow of `ψ_0`.
pub fn hermite_functions(x: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    if count == 0 {
        return out;
    }
    let mut log_scale = -0.5 * x * x - 0.25 * PI.ln();
    let mut prev = 0.0;
    let mut cur = 1.0;
    out[0] = log_scale.exp();
    for n in 0..count - 1 {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
        out[n + 1] = cur * log_scale.exp();
    }
    out
}

/// `Σ c_n ψ_n(x)`, real part.
pub fn synthesize(state: &FockState, x: f64) -> f64 {
    hermite_functions(x, state.dim())
        .iter()
        .zip(state.coeffs())
        .map(|(h, c)| h * c.re)
        .sum()
}

/// Largest probability outside the retained levels accepted by
/// [`fock_expand`].
pub const MAX_TAIL_MASS: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct FockExpansion {
    pub state: FockState,
    pub tail_mass: f64,
}

const EXPANSION_NODES: usize = 20;

/// Composite Gauss-Legendre nodes covering `support`, fine enough to resolve
/// `ψ_{dim}`.
fn expansion_grid(support: (f64, f64), dim: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = support;
    let wavelength = 2.0 * PI / (2.0 * dim as f64 + 1.0).sqrt();
    let panel = wavelength.min(0.25);
    let panels = (((hi - lo) / panel).ceil() as usize).max(1);
    let h = (hi - lo) / panels as f64;
    let (t, w) = gauss_legendre(EXPANSION_NODES);
    let mut grid = Vec::with_capacity(panels * EXPANSION_NODES);
    for p in 0..panels {
        let c = lo + (p as f64 + 0.5) * h;
        for (ti, wi) in t.iter().zip(&w) {
            grid.push((c + 0.5 * h * ti, 0.5 * h * wi));
        }
    }
    grid
}

/// Projects `phi` onto the first `dim` unit-frequency number states.
///
/// The tail mass `1 − Σ|c_n|²` is measured against the norm of `phi` on the
/// same quadrature grid; the returned state is renormalized.
pub fn fock_expand(phi: &Wavefunction, dim: usize) -> Result<FockExpansion> {
    let expansion = project(phi, dim)?;
    if expansion.tail_mass > MAX_TAIL_MASS {
        return Err(Error::Truncation {
            dim,
            tail_mass: expansion.tail_mass,
        });
    }
    Ok(expansion)
}

/// Like [`fock_expand`] but grows the dimension (by half again each step) from
/// `start_dim` up to `max_dim` until the tail mass is acceptable.
pub fn fock_expand_adaptive(phi: &Wavefunction, start_dim: usize, max_dim: usize) -> Result<FockExpansion> {
    let mut dim = start_dim.max(1);
    loop {
        let expansion = project(phi, dim)?;
        if expansion.tail_mass <= MAX_TAIL_MASS {
            return Ok(expansion);
        }
        if dim >= max_dim {
            return Err(Error::Truncation {
                dim,
                tail_mass: expansion.tail_mass,
            });
        }
        dim = (dim + dim / 2).min(max_dim);
    }
}

fn project(phi: &Wavefunction, dim: usize) -> Result<FockExpansion> {
    if dim == 0 {
        return Err(Error::Domain("expansion needs dim >= 1".into()));
    }
    let (lo, hi) = phi.support();
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty support [{lo}, {hi}]")));
    }
    let mut coeffs = vec![0.0; dim];
    let mut norm = 0.0;
    for (x, w) in expansion_grid((lo, hi), dim) {
        let f = phi.eval(x);
        if f == 0.0 {
            continue;
        }
        norm += w * f * f;
        for (c, h) in coeffs.iter_mut().zip(hermite_functions(x, dim)) {
            *c += w * f * h;
        }
    }
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Domain("wavefunction has no mass on its support".into()));
    }
    let captured: f64 = coeffs.iter().map(|c| c * c).sum();
    let tail_mass = (1.0 - captured / norm).max(0.0);
    let state = FockState::from_real(&coeffs)?.normalized()?;
    Ok(FockExpansion { state, tail_mass })
}

/// Two-mode pure state `Σ M[k][m] |k⟩⊗|m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeAmplitudes {
    dim_a: usize,
    dim_b: usize,
    data: Vec<Complex64>,
}

impl TwoModeAmplitudes {
    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        TwoModeAmplitudes {
            dim_a,
            dim_b,
            data: vec![Complex64::new(0.0, 0.0); dim_a * dim_b],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim_a = rows.len();
        let dim_b = rows.first().map_or(0, Vec::len);
        if dim_a == 0 || dim_b == 0 || rows.iter().any(|r| r.len() != dim_b) {
            return Err(Error::Domain(
                "amplitude matrix must be rectangular and non-empty".into(),
            ));
        }
        Ok(TwoModeAmplitudes {
            dim_a,
            dim_b,
            data: rows.concat(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    #[inline]
    pub fn get(&self, k: usize, m: usize) -> Complex64 {
        self.data[k * self.dim_b + m]
    }

    fn add(&mut self, k: usize, m: usize, v: Complex64) {
        self.data[k * self.dim_b + m] += v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        TwoModeAmplitudes {
            dim_a: self.dim_a,
            dim_b: self.dim_b,
            data: self.data.iter().map(|c| c * phase).collect(),
        }
    }
}

/// 50:50 beam splitter `exp[(π/4)(â†b̂ − âb̂†)]` acting on `state ⊗ |0⟩`:
/// `|n⟩|0⟩ ↦ Σ_k √C(n,k) 2^{−n/2} (−1)^{n−k} |k⟩|n−k⟩`.
pub fn beam_splitter_50_50(state: &FockState) -> TwoModeAmplitudes {
    let dim = state.dim();
    let mut out = TwoModeAmplitudes::zeros(dim, dim);
    let ln_fact: Vec<f64> = (0..dim)
        .map(|n| log_gamma(n as f64 + 1.0).expect("positive argument"))
        .collect();
    for (n, &c) in state.coeffs().iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..=n {
            let ln_amp = 0.5 * (ln_fact[n] - ln_fact[k] - ln_fact[n - k]) - 0.5 * n as f64 * std::f64::consts::LN_2;
            let sign = if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            out.add(k, n - k, c * (sign * ln_amp.exp()));
        }
    }
    out
}

/// Von Neumann entropy (nats) of the first mode's reduced state.
///
/// The reduced density matrix `M M†` is split into the connected blocks of
/// its sparsity pattern and each block is diagonalized separately.
pub fn entanglement_entropy(m: &TwoModeAmplitudes) -> Result<f64> {
    let (da, db) = m.dims();
    let norm = m.norm_sqr();
    if !(norm > 0.0) {
        return Err(Error::Domain("zero two-mode state".into()));
    }
    let mut rho = vec![Complex64::new(0.0, 0.0); da * da];
    for i in 0..da {
        for j in i..da {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..db {
                s += m.get(i, k) * m.get(j, k).conj();
            }
            let s = s / norm;
            rho[i * da + j] = s;
            rho[j * da + i] = s.conj();
        }
    }
    let complex = rho.iter().any(|c| c.im != 0.0);

    // Union-find over nonzero couplings.
    let mut parent: Vec<usize> = (0..da).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut i = i;
        while parent[i] != r {
            let next = parent[i];
            parent[i] = r;
            i = next;
        }
        r
    }
    for i in 0..da {
        for j in i + 1..da {
            if rho[i * da + j] != Complex64::new(0.0, 0.0) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![usize::MAX; da];
    for i in 0..da {
        let r = find(&mut parent, i);
        if block_of[r] == usize::MAX {
            block_of[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[block_of[r]].push(i);
    }

    let mut entropy = 0.0;
    for block in &blocks {
        if block.iter().all(|&i| rho[i * da + i].re == 0.0) {
            continue;
        }
        let b = block.len();
        let eigenvalues = if complex {
            // Hermitian A + iB as the real symmetric [[A, −B], [B, A]]; each
            // eigenvalue appears twice.
            let big = SymMatrix::from_upper(2 * b, |i, j| {
                let (bi, ri) = (i / b, i % b);
                let (bj, rj) = (j / b, j % b);
                let z = rho[block[ri] * da + block[rj]];
                match (bi, bj) {
                    (0, 0) | (1, 1) => z.re,
                    (0, 1) => -z.im,
                    _ => z.im,
                }
            });
            (0.5, symmetric_eigen(&big)?.values)
        } else {
            let small = SymMatrix::from_upper(b, |i, j| rho[block[i] * da + block[j]].re);
            (1.0, symmetric_eigen(&small)?.values)
        };
        let (multiplicity, values) = eigenvalues;
        for l in values {
            if l > 0.0 {
                entropy -= multiplicity * l * l.ln();
            }
        }
    }
    Ok(entropy.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ladder_elements() {
        let ops = ladder_matrices(2, 1.0).unwrap();
        assert!((ops.x.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-15);
        for &w in &[1.0, 0.7, 2.3] {
            let ops = ladder_matrices(12, w).unwrap();
            assert!((ops.x4.get(0, 0) - 3.0 / (4.0 * w * w)).abs() < 1e-13);
            assert!((ops.x6.get(0, 0) - 15.0 / (8.0 * w * w * w)).abs() < 1e-13);
        }
        assert!(ladder_matrices(1, 1.0).is_err());
    }

    #[test]
    fn padded_powers_match_closed_forms_in_last_rows() {
        // Without padding the bottom rows of x⁴ would be wrong.
        let w = 1.3;
        let dim = 10;
        let ops = ladder_matrices(dim, w).unwrap();
        for n in 0..dim {
            let nf = n as f64;
            let want = (6.0 * nf * nf + 6.0 * nf + 3.0) / (4.0 * w * w);
            assert!((ops.x4.get(n, n) - want).abs() < 1e-12, "n={n}");
            let want6 = 5.0 * (4.0 * nf.powi(3) + 6.0 * nf * nf + 8.0 * nf + 3.0) / (8.0 * w.powi(3));
            assert!((ops.x6.get(n, n) - want6).abs() < 1e-10 * want6, "n={n}");
        }
    }

    #[test]
    fn x_squared_is_positive() {
        let ops = ladder_matrices(30, 1.0).unwrap();
        let ev = symmetric_eigen(&ops.x2).unwrap();
        assert!(ev.values.iter().all(|&l| l > -1e-12));
    }

    #[test]
    fn eigen_small_cases() {
        let d = SymMatrix::from_upper(3, |i, j| if i == j { [3.0, 1.0, 2.0][i] } else { 0.0 });
        let e = symmetric_eigen(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);

        let flip = SymMatrix::from_upper(2, |i, j| if i != j { 1.0 } else { 0.0 });
        let e = symmetric_eigen(&flip).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let v0 = &e.vectors[0];
        assert!((v0[0] + v0[1]).abs() < 1e-14);
        assert!((v0[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn harmonic_spectrum() {
        let ops = ladder_matrices(61, 1.0).unwrap();
        let mut h = ops.p2.clone();
        h.add_scaled(1.0, &ops.x2);
        let h = SymMatrix::from_upper(61, |i, j| 0.5 * h.get(i, j));
        let e = symmetric_eigen(&h).unwrap();
        assert!((e.values[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn eigen_residuals_and_trace() {
        let m = SymMatrix::from_upper(25, |i, j| {
            ((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 0.5 * i as f64 } else { 0.0 }
        });
        let e = symmetric_eigen(&m).unwrap();
        let norm = m.frobenius();
        for (l, v) in e.values.iter().zip(&e.vectors) {
            let mv = m.mul_vec(v);
            let r: f64 = mv.iter().zip(v).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
            assert!(r < 1e-9 * norm);
        }
        let tr: f64 = e.values.iter().sum();
        assert!((tr - m.trace()).abs() < 1e-9);
        for i in 0..25 {
            for j in 0..25 {
                let d: f64 = e.vectors[i].iter().zip(&e.vectors[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fidelity_basics() {
        let s = FockState::from_real(&[0.6, 0.0, 0.8]).unwrap();
        assert!((fidelity(&s, &s) - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&FockState::vacuum(3), &FockState::number(2, 3)), 0.0);
        // Shorter state is zero padded.
        assert!((fidelity(&FockState::vacuum(1), &s) - 0.36).abs() < 1e-15);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let grid = expansion_grid((-20.0, 20.0), 80);
        let count = 80;
        let mut gram = vec![0.0; count * count];
        for (x, w) in grid {
            let h = hermite_functions(x, count);
            for i in 0..count {
                for j in 0..count {
                    gram[i * count + j] += w * h[i] * h[j];
                }
            }
        }
        for i in 0..count {
            for j in 0..count {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i * count + j] - want).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn hermite_functions_survive_large_arguments() {
        let h = hermite_functions(45.0, 1500);
        assert!(h.iter().all(|v| v.is_finite()));
        assert!(h[1499].abs() > 0.0);
    }

    #[test]
    fn expand_ground_state() {
        let phi = Wavefunction::new(|x| PI.powf(-0.25) * (-0.5 * x * x).exp(), (-12.0, 12.0));
        let e = fock_expand(&phi, 4).unwrap();
        assert!((e.state.coeff(0).re - 1.0).abs() < 1e-12);
        for n in 1..4 {
            assert!(e.state.coeff(n).norm() < 1e-12);
        }
        assert!(e.tail_mass < 1e-12);
    }

    #[test]
    fn expand_reports_truncation() {
        // A displaced Gaussian needs many levels.
        let phi = Wavefunction::new(|x| PI.powf(-0.25) * (-0.5 * (x - 6.0) * (x - 6.0)).exp(), (-6.0, 18.0));
        match fock_expand(&phi, 10) {
            Err(Error::Truncation { dim, tail_mass }) => {
                assert_eq!(dim, 10);
                assert!(tail_mass > 1e-2);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
        let e = fock_expand_adaptive(&phi, 10, 200).unwrap();
        assert!(e.tail_mass <= MAX_TAIL_MASS);
        // Coherent amplitude 6/√2: Poisson weights.
        let nbar = 18.0f64;
        let p5 = (-nbar).exp() * nbar.powi(5) / 120.0;
        assert!((e.state.coeff(5).norm_sqr() - p5).abs() < 1e-9);
    }

    #[test]
    fn synthesis_round_trip() {
        let phi = Wavefunction::new(
            |x| {
                let n = (2.0 / PI.sqrt() / (1.0 + (1.0f64).exp())).sqrt();
                n * (-0.5 * x * x).exp() * x.cosh()
            },
            (-14.0, 14.0),
        );
        let e = fock_expand(&phi, 60).unwrap();
        for i in 0..40 {
            let x = -5.0 + 0.25 * i as f64;
            assert!((synthesize(&e.state, x) - phi.eval(x)).abs() < 1e-6, "x={x}");
        }
    }

    #[test]
    fn beam_splitter_outputs() {
        let m = beam_splitter_50_50(&FockState::vacuum(3));
        assert!((m.get(0, 0) - c(1.0)).norm() < 1e-15);
        assert!((m.norm_sqr() - 1.0).abs() < 1e-15);

        let m = beam_splitter_50_50(&FockState::number(1, 2));
        assert!((m.get(1, 0).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((m.get(0, 1).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((m.get(1, 0) + m.get(0, 1)).norm() < 1e-15);

        let m = beam_splitter_50_50(&FockState::number(2, 3));
        assert!((m.get(2, 0).norm_sqr() - 0.25).abs() < 1e-15);
        assert!((m.get(1, 1).norm_sqr() - 0.5).abs() < 1e-15);
        assert!((m.get(0, 2).norm_sqr() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        let product = TwoModeAmplitudes::from_rows(&[vec![c(0.6), c(0.8)], vec![c(0.0), c(0.0)]]).unwrap();
        assert!(entanglement_entropy(&product).unwrap().abs() < 1e-15);

        let h = 0.5f64.sqrt();
        let bell = TwoModeAmplitudes::from_rows(&[vec![c(h), c(0.0)], vec![c(0.0), c(h)]]).unwrap();
        assert!((entanglement_entropy(&bell).unwrap() - 2f64.ln()).abs() < 1e-14);

        let split = beam_splitter_50_50(&FockState::number(1, 2));
        assert!((entanglement_entropy(&split).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn entropy_of_complex_state() {
        // (|00⟩ + i|11⟩)/√2 has one ebit regardless of the phase.
        let h = 0.5f64.sqrt();
        let m = TwoModeAmplitudes::from_rows(&[vec![c(h), c(0.0)], vec![c(0.0), Complex64::new(0.0, h)]]).unwrap();
        assert!((entanglement_entropy(&m).unwrap() - 2f64.ln()).abs() < 1e-13);
        let s = FockState::new(vec![c(0.6), Complex64::new(0.0, 0.8)]).unwrap();
        let a = entanglement_entropy(&beam_splitter_50_50(&s)).unwrap();
        let b = entanglement_entropy(&beam_splitter_50_50(&FockState::from_real(&[0.6, 0.8]).unwrap())).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
