//! Globally adaptive quadrature in one and two dimensions.
//!
//! One dimension uses the 7/15-point Gauss-Kronrod pair with the QUADPACK
//! error heuristic; two dimensions use the degree-7/degree-5 Genz-Malik
//! cubature pair on rectangles, bisecting along the axis with the largest
//! fourth divided difference. Infinite bounds are compactified with
//! `x = u / (1 - u²)` on the affected axis.
//!
//! Subdivision is driven by a priority queue ordered by error estimate, with
//! insertion order breaking ties, so every run on the same input performs the
//! same floating point operations in the same order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Closed interval on the extended real line. Use `f64::NEG_INFINITY` /
/// `f64::INFINITY` for unbounded ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Domain(format!("interval requires lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Axis-aligned rectangle, each side possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub x: Interval,
    pub y: Interval,
}

impl Region {
    pub fn new(x: Interval, y: Interval) -> Self {
        Region { x, y }
    }

    pub fn rect(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        Ok(Region {
            x: Interval::new(x_lo, x_hi)?,
            y: Interval::new(y_lo, y_hi)?,
        })
    }

    pub fn plane() -> Self {
        Region {
            x: Interval::real_line(),
            y: Interval::real_line(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadOptions {
    pub const DEFAULT_1D: QuadOptions = QuadOptions {
        abs_tol: 1e-9,
        rel_tol: 1e-7,
        max_evals: 200_000,
    };

    /// Defaults for negativity volumes of Wigner functions.
    pub const DEFAULT_2D: QuadOptions = QuadOptions {
        abs_tol: 1e-6,
        rel_tol: 1e-5,
        max_evals: 60_000_000,
    };

    pub fn new(abs_tol: f64, rel_tol: f64, max_evals: usize) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            max_evals,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        if self.max_evals == 0 {
            return Err(Error::Domain("max_evals must be at least 1".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Maps an axis onto a finite parameter interval.
#[derive(Debug, Clone, Copy)]
enum AxisMap {
    Finite { lo: f64, hi: f64 },
    Line,
    Above(f64),
    Below(f64),
}

impl AxisMap {
    fn of(iv: Interval) -> Self {
        match (iv.lo.is_finite(), iv.hi.is_finite()) {
            (true, true) => AxisMap::Finite { lo: iv.lo, hi: iv.hi },
            (false, false) => AxisMap::Line,
            (true, false) => AxisMap::Above(iv.lo),
            (false, true) => AxisMap::Below(iv.hi),
        }
    }

    fn domain(&self) -> (f64, f64) {
        match *self {
            AxisMap::Finite { lo, hi } => (lo, hi),
            AxisMap::Line => (-1.0, 1.0),
            AxisMap::Above(_) => (0.0, 1.0),
            AxisMap::Below(_) => (-1.0, 0.0),
        }
    }

    /// Returns `(x, dx/du)`.
    #[inline]
    fn map(&self, u: f64) -> (f64, f64) {
        let compact = |u: f64| {
            let d = 1.0 - u * u;
            (u / d, (1.0 + u * u) / (d * d))
        };
        match *self {
            AxisMap::Finite { .. } => (u, 1.0),
            AxisMap::Line => compact(u),
            AxisMap::Above(a) => {
                let (t, j) = compact(u);
                (a + t, j)
            }
            AxisMap::Below(b) => {
                let (t, j) = compact(u);
                (b + t, j)
            }
        }
    }
}

#[inline]
fn guarded(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Heap entry ordered by error, then by age (older first) on ties.
struct Cell<T> {
    err: f64,
    seq: u64,
    item: T,
}

impl<T> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Cell<T> {}
impl<T> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Cell<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.seq.cmp(&self.seq))
    }
}

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn gk15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, err }
}

/// Adaptive integral of `f` over `interval`.
///
/// Returns `Error::NonConvergence` carrying the best estimate when
/// `max_evals` is exhausted before the tolerance is met.
pub fn integrate_1d<F>(f: F, interval: Interval, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    opts.validate()?;
    Interval::new(interval.lo, interval.hi)?;
    let map = AxisMap::of(interval);
    let g = |u: f64| {
        let (x, j) = map.map(u);
        guarded(f(x) * j)
    };
    let (u0, u1) = map.domain();

    let first = gk15(&g, u0, u1);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut value = first.value;
    let mut err = first.err;
    heap.push(Cell {
        err: first.err,
        seq,
        item: first,
    });

    let mut iter = 0usize;
    loop {
        if err <= opts.target(value) {
            break;
        }
        if evaluations + 30 > opts.max_evals {
            return Err(Error::NonConvergence {
                value,
                error_estimate: err,
                evaluations,
            });
        }
        let Some(Cell { item: worst, .. }) = heap.pop() else {
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine resolution.
            frozen_value += worst.value;
            frozen_err += worst.err;
            continue;
        }
        let left = gk15(&g, worst.a, mid);
        let right = gk15(&g, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        for s in [left, right] {
            seq += 1;
            heap.push(Cell {
                err: s.err,
                seq,
                item: s,
            });
        }
        iter += 1;
        if iter.is_multiple_of(64) {
            let (v, e) = resum(heap.iter().map(|c| (c.item.value, c.item.err)));
            value = v + frozen_value;
            err = e + frozen_err;
        }
    }
    let (v, e) = resum(heap.iter().map(|c| (c.item.value, c.item.err)));
    let value = v + frozen_value;
    let err = e + frozen_err;
    if err > opts.target(value) {
        return Err(Error::NonConvergence {
            value,
            error_estimate: err,
            evaluations,
        });
    }
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations,
    })
}

/// Recomputes running totals from scratch to shed accumulated drift.
fn resum<I: Iterator<Item = (f64, f64)>>(cells: I) -> (f64, f64) {
    cells.fold((0.0, 0.0), |(v, e), (cv, ce)| (v + cv, e + ce))
}

// Genz-Malik degree 7 rule with embedded degree 5 rule, specialised to two
// dimensions (17 points).
const GM_L2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const GM_L4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const GM_L5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)
const GM_W1: f64 = (12824.0 - 9120.0 * 2.0 + 400.0 * 4.0) / 19683.0;
const GM_W2: f64 = 980.0 / 6561.0;
const GM_W3: f64 = (1820.0 - 400.0 * 2.0) / 19683.0;
const GM_W4: f64 = 200.0 / 19683.0;
const GM_W5: f64 = 6859.0 / 19683.0 / 4.0;
const GM_E1: f64 = (729.0 - 950.0 * 2.0 + 50.0 * 4.0) / 729.0;
const GM_E2: f64 = 245.0 / 486.0;
const GM_E3: f64 = (265.0 - 100.0 * 2.0) / 1458.0;
const GM_E4: f64 = 25.0 / 729.0;

#[derive(Clone, Copy)]
struct Rect {
    cx: f64,
    cy: f64,
    hx: f64,
    hy: f64,
    value: f64,
    err: f64,
    split_x: bool,
}

fn genz_malik<F: Fn(f64, f64) -> f64>(g: &F, cx: f64, cy: f64, hx: f64, hy: f64) -> Rect {
    let f0 = g(cx, cy);
    let (ax2, bx2) = (g(cx - GM_L2 * hx, cy), g(cx + GM_L2 * hx, cy));
    let (ay2, by2) = (g(cx, cy - GM_L2 * hy), g(cx, cy + GM_L2 * hy));
    let (ax4, bx4) = (g(cx - GM_L4 * hx, cy), g(cx + GM_L4 * hx, cy));
    let (ay4, by4) = (g(cx, cy - GM_L4 * hy), g(cx, cy + GM_L4 * hy));
    let s2 = ax2 + bx2 + ay2 + by2;
    let s3 = ax4 + bx4 + ay4 + by4;
    let s4 = g(cx - GM_L4 * hx, cy - GM_L4 * hy)
        + g(cx + GM_L4 * hx, cy - GM_L4 * hy)
        + g(cx - GM_L4 * hx, cy + GM_L4 * hy)
        + g(cx + GM_L4 * hx, cy + GM_L4 * hy);
    let s5 = g(cx - GM_L5 * hx, cy - GM_L5 * hy)
        + g(cx + GM_L5 * hx, cy - GM_L5 * hy)
        + g(cx - GM_L5 * hx, cy + GM_L5 * hy)
        + g(cx + GM_L5 * hx, cy + GM_L5 * hy);
    let vol = 4.0 * hx * hy;
    let r7 = vol * (GM_W1 * f0 + GM_W2 * s2 + GM_W3 * s3 + GM_W4 * s4 + GM_W5 * s5);
    let r5 = vol * (GM_E1 * f0 + GM_E2 * s2 + GM_E3 * s3 + GM_E4 * s4);
    let ratio = (GM_L2 * GM_L2) / (GM_L4 * GM_L4);
    let dx = (ax2 + bx2 - 2.0 * f0 - ratio * (ax4 + bx4 - 2.0 * f0)).abs();
    let dy = (ay2 + by2 - 2.0 * f0 - ratio * (ay4 + by4 - 2.0 * f0)).abs();
    // Equal differences: split the longer side.
    let split_x = if dx == dy { hx >= hy } else { dx > dy };
    let err = (r7 - r5).abs().max(50.0 * f64::EPSILON * r7.abs());
    Rect {
        cx,
        cy,
        hx,
        hy,
        value: r7,
        err,
        split_x,
    }
}

/// The 2D heap starts from a `k × k` grid of cells; a single 17-point rule
/// over a large box can miss small features and report a tiny error.
const INITIAL_SPLITS: usize = 4;

/// Adaptive integral of `f(x, y)` over `region`.
pub fn integrate_2d<F>(f: F, region: Region, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64,
{
    opts.validate()?;
    Interval::new(region.x.lo, region.x.hi)?;
    Interval::new(region.y.lo, region.y.hi)?;
    let mx = AxisMap::of(region.x);
    let my = AxisMap::of(region.y);
    let g = |u: f64, v: f64| {
        let (x, jx) = mx.map(u);
        let (y, jy) = my.map(v);
        guarded(f(x, y) * jx * jy)
    };
    let (u0, u1) = mx.domain();
    let (v0, v1) = my.domain();

    let k = INITIAL_SPLITS;
    let (hu, hv) = (0.5 * (u1 - u0) / k as f64, 0.5 * (v1 - v0) / k as f64);
    let mut evaluations = 0;
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for i in 0..k {
        for j in 0..k {
            let cu = u0 + (2 * i + 1) as f64 * hu;
            let cv = v0 + (2 * j + 1) as f64 * hv;
            let r = genz_malik(&g, cu, cv, hu, hv);
            evaluations += 17;
            seq += 1;
            heap.push(Cell {
                err: r.err,
                seq,
                item: r,
            });
        }
    }
    let (mut value, mut err) = resum(heap.iter().map(|c| (c.item.value, c.item.err)));

    let mut iter = 0usize;
    loop {
        if err <= opts.target(value) {
            break;
        }
        if evaluations + 34 > opts.max_evals {
            return Err(Error::NonConvergence {
                value,
                error_estimate: err,
                evaluations,
            });
        }
        let Some(Cell { item: worst, .. }) = heap.pop() else {
            break;
        };
        let (a, b) = if worst.split_x {
            let h = 0.5 * worst.hx;
            if !(worst.cx - h < worst.cx) {
                frozen_value += worst.value;
                frozen_err += worst.err;
                continue;
            }
            (
                genz_malik(&g, worst.cx - h, worst.cy, h, worst.hy),
                genz_malik(&g, worst.cx + h, worst.cy, h, worst.hy),
            )
        } else {
            let h = 0.5 * worst.hy;
            if !(worst.cy - h < worst.cy) {
                frozen_value += worst.value;
                frozen_err += worst.err;
                continue;
            }
            (
                genz_malik(&g, worst.cx, worst.cy - h, worst.hx, h),
                genz_malik(&g, worst.cx, worst.cy + h, worst.hx, h),
            )
        };
        evaluations += 34;
        value += a.value + b.value - worst.value;
        err += a.err + b.err - worst.err;
        for r in [a, b] {
            seq += 1;
            heap.push(Cell {
                err: r.err,
                seq,
                item: r,
            });
        }
        iter += 1;
        if iter.is_multiple_of(256) {
            let (v, e) = resum(heap.iter().map(|c| (c.item.value, c.item.err)));
            value = v + frozen_value;
            err = e + frozen_err;
        }
    }
    let (v, e) = resum(heap.iter().map(|c| (c.item.value, c.item.err)));
    let value = v + frozen_value;
    let err = e + frozen_err;
    if err > opts.target(value) {
        return Err(Error::NonConvergence {
            value,
            error_estimate: err,
            evaluations,
        });
    }
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n` from Chebyshev starting points.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
