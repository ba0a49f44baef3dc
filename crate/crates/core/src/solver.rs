//! Fixed-point solver for `|f'(ξ)| = Φ(ξ, f(ξ))` with prescribed critical
//! points.
//!
//! Solutions are exactly the fixed points of
//!
//! ```text
//! T(f)(z) = ∫_0^z B(ζ) exp(S[log Φ(·, f(·))](ζ)) dζ
//! ```
//!
//! where `S` is the Schwarz integral and `B` the Blaschke product carrying
//! the critical points. [`solve`] runs damped Picard iteration on Taylor
//! coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::spectral::{
    antiderivative, grid_node, schwarz_integral, BoundaryGrid, DiskFunction, RESOLVED_TAIL,
};
use crate::weight::{ContractionCertificate, WeightField};

pub const DEFAULT_GRID: usize = 512;
pub const MAX_GRID: usize = 1 << 15;
const DIVERGENCE_FACTOR: f64 = 1e6;
const WINDING_SAMPLES: usize = 50;

#[derive(Debug, Clone)]
pub enum InitialMap {
    Zero,
    ScaledIdentity(f64),
    Explicit(DiskFunction),
}

impl InitialMap {
    fn build(&self) -> DiskFunction {
        match self {
            InitialMap::Zero => DiskFunction::zero(),
            InitialMap::ScaledIdentity(r) => DiskFunction::scaled_identity(*r),
            InitialMap::Explicit(f) => f.clone(),
        }
    }
}

/// Which fixed point the solver reports when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Whatever the iteration settles on from the initial map.
    Nearest,
    /// After settling, restart from dilations `(1+s)f` and keep any new
    /// fixed point with a larger `f'(0)`, shrinking `s` until it drops below
    /// `1e-3`. A heuristic for the maximal solution.
    Maximal,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub grid: usize,
    pub damping: f64,
    pub max_iters: usize,
    pub tol_update: f64,
    pub tol_residual: f64,
    /// `None` starts from `(M/2)·z`.
    pub initial_map: Option<InitialMap>,
    pub target: Target,
    /// Largest grid the resolution check may double to.
    pub max_grid: usize,
    /// Fail with [`Error::ResolutionExceeded`] when the solution stays
    /// unresolved at `max_grid`; otherwise report it with a diagnostic.
    pub require_resolved: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            damping: 0.5,
            max_iters: 2000,
            tol_update: 1e-12,
            tol_residual: 1e-9,
            initial_map: None,
            target: Target::Nearest,
            max_grid: MAX_GRID,
            require_resolved: true,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 8 || !self.grid.is_power_of_two() {
            return Err(Error::InvalidInput(format!("grid {} is not a power of two >= 8", self.grid)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidInput(format!("damping {} not in (0, 1]", self.damping)));
        }
        if !(self.tol_update > 0.0 && self.tol_residual > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".to_string()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be positive".to_string()));
        }
        Ok(())
    }

    pub fn with_initial(mut self, init: InitialMap) -> Self {
        self.initial_map = Some(init);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub f: DiskFunction,
    pub f_prime: DiskFunction,
    pub zeros: Vec<Complex64>,
    pub grid: usize,
    /// Iterations of the main run plus any maximal-continuation restarts.
    pub iterations: usize,
    /// `sup_ξ ||f'(ξ)| − Φ(ξ, f(ξ))|` on the grid.
    pub residual_sup: f64,
    /// Boundary sup norm of each coefficient update.
    pub update_history: Vec<f64>,
    /// Boundary `L²` norm of each coefficient update.
    pub update_l2_history: Vec<f64>,
    pub converged: bool,
    pub univalent: bool,
    pub locally_univalent: bool,
    pub tail_ratio: f64,
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    pub fn blaschke(&self) -> BlaschkeProduct {
        BlaschkeProduct::new(self.zeros.clone()).expect("zeros were validated by solve")
    }
}

/// `T` on a fixed grid, with the Blaschke trace precomputed.
pub(crate) struct Operator<'a> {
    field: &'a WeightField,
    n: usize,
    nodes: Vec<Complex64>,
    blaschke_trace: Vec<Complex64>,
}

impl<'a> Operator<'a> {
    pub(crate) fn new(field: &'a WeightField, blaschke: &BlaschkeProduct, n: usize) -> Result<Self> {
        let nodes = (0..n).map(|j| grid_node(j, n)).collect();
        let blaschke_trace = blaschke.trace(n)?.into_values();
        Ok(Self {
            field,
            n,
            nodes,
            blaschke_trace,
        })
    }

    /// `log Φ(ξ_j, f(ξ_j))` on the grid.
    pub(crate) fn log_weight_trace(&self, f: &DiskFunction) -> Result<BoundaryGrid> {
        let trace = f.trace(self.n)?;
        let logs = self
            .nodes
            .iter()
            .zip(trace.values())
            .map(|(&xi, &w)| self.field.evaluate(xi, w).map(f64::ln))
            .collect::<Result<Vec<_>>>()?;
        BoundaryGrid::from_real(logs)
    }

    /// `B·exp(S[log Φ∘f])` sampled on the grid.
    pub(crate) fn representation_trace(&self, f: &DiskFunction) -> Result<Vec<Complex64>> {
        let exponent = schwarz_integral(&self.log_weight_trace(f)?)?;
        let exponent = exponent.trace(self.n)?;
        Ok(exponent
            .values()
            .iter()
            .zip(&self.blaschke_trace)
            .map(|(&s, &b)| b * s.exp())
            .collect())
    }

    /// Returns `(T(f), T(f)')`.
    pub(crate) fn apply(&self, f: &DiskFunction) -> Result<(DiskFunction, DiskFunction)> {
        let derivative_trace = BoundaryGrid::new(self.representation_trace(f)?)?;
        let mut coefficients = DiskFunction::from_trace(&derivative_trace).coefficients().to_vec();
        // T(f)'(0) = B(0)·exp(mean log Φ∘f) is real.
        coefficients[0].im = 0.0;
        let derivative = DiskFunction::new(coefficients)?;
        let image = antiderivative(&derivative).truncated(self.n / 2);
        Ok((image, derivative))
    }
}

/// One application of `T` on an `n`-point grid.
pub fn apply_t(
    f: &DiskFunction,
    field: &WeightField,
    blaschke: &BlaschkeProduct,
    n: usize,
) -> Result<DiskFunction> {
    Ok(Operator::new(field, blaschke, n)?.apply(f)?.0)
}

/// `T(f)` on the smallest grid in `n, 2n, ...` where its derivative is
/// resolved.
pub fn apply_t_resolved(
    f: &DiskFunction,
    field: &WeightField,
    blaschke: &BlaschkeProduct,
    n: usize,
    max_n: usize,
) -> Result<DiskFunction> {
    let mut n = n.max(f.natural_grid());
    loop {
        let (image, derivative) = Operator::new(field, blaschke, n)?.apply(f)?;
        let tail = derivative.tail_ratio();
        if tail < RESOLVED_TAIL {
            return Ok(image);
        }
        if 2 * n > max_n {
            return Err(Error::ResolutionExceeded { n, tail });
        }
        n *= 2;
    }
}

/// `sup_ξ ||f'(ξ)| − Φ(ξ, f(ξ))|` on an `n`-point grid.
pub fn residual_on(f: &DiskFunction, field: &WeightField, n: usize) -> Result<f64> {
    let trace = f.trace(n)?;
    let slope = f.derivative().trace(n)?;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let phi = field.evaluate(grid_node(j, n), trace.values()[j])?;
        worst = worst.max((slope.values()[j].norm() - phi).abs());
    }
    Ok(worst)
}

/// Residual on the default grid (or finer when `f` needs it).
pub fn residual(f: &DiskFunction, field: &WeightField) -> Result<f64> {
    residual_on(f, field, DEFAULT_GRID.max(f.natural_grid()))
}

/// `sup_ξ |f'(ξ) − B(ξ)·exp(S[log Φ∘f](ξ))|`: distance of `f` from the
/// fixed-point representation.
pub fn representation_distance(
    f: &DiskFunction,
    field: &WeightField,
    blaschke: &BlaschkeProduct,
    n: usize,
) -> Result<f64> {
    let op = Operator::new(field, blaschke, n)?;
    let target = op.representation_trace(f)?;
    let slope = f.derivative().trace(n)?;
    Ok(slope
        .values()
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

struct Run {
    f: DiskFunction,
    updates: Vec<f64>,
    updates_l2: Vec<f64>,
    settled: bool,
}

fn iterate(op: &Operator<'_>, start: DiskFunction, options: &SolveOptions) -> Result<Run> {
    let n = op.n;
    let theta = options.damping;
    let mut f = start.truncated(n / 2);
    let mut updates = Vec::new();
    let mut updates_l2 = Vec::new();
    for _ in 0..options.max_iters {
        let (image, _) = op.apply(&f)?;
        let step = image.sub(&f).scale(Complex64::new(theta, 0.0));
        let step_trace = step.trace(n)?;
        let size = step_trace.sup_norm();
        updates.push(size);
        updates_l2.push(step_trace.l2_norm());
        f = f.combine(1.0, &step, 1.0).truncated(n / 2);
        if size < options.tol_update {
            return Ok(Run {
                f,
                updates,
                updates_l2,
                settled: true,
            });
        }
        let first = updates[0];
        if first > 0.0 && size > DIVERGENCE_FACTOR * first || !size.is_finite() {
            return Err(Error::Divergence {
                iterations: updates.len(),
                last: size,
                history: updates,
            });
        }
    }
    Ok(Run {
        f,
        updates,
        updates_l2,
        settled: false,
    })
}

/// Solves `|f'| = Φ(ξ, f)` on the circle with critical points `zeros` and
/// no others (when the iteration converges).
pub fn solve(field: &WeightField, zeros: &[Complex64], options: &SolveOptions) -> Result<SolveReport> {
    options.validate()?;
    let blaschke = BlaschkeProduct::new(zeros.to_vec())?;
    let init = options
        .initial_map
        .clone()
        .unwrap_or(InitialMap::ScaledIdentity(field.sup_bound() / 2.0))
        .build();

    let mut diagnostics = Vec::new();
    let mut n = options.grid.max(init.natural_grid());
    let mut updates = Vec::new();
    let mut updates_l2 = Vec::new();
    let mut f = init;
    let mut settled;
    loop {
        let op = Operator::new(field, &blaschke, n)?;
        let run = iterate(&op, f, options)?;
        updates.extend(run.updates);
        updates_l2.extend(run.updates_l2);
        f = run.f;
        settled = run.settled;
        let tail = f.derivative().tail_ratio();
        if tail < RESOLVED_TAIL || !settled {
            break;
        }
        if 2 * n > options.max_grid {
            if options.require_resolved {
                return Err(Error::ResolutionExceeded { n, tail });
            }
            diagnostics.push(format!("solution unresolved at n = {n} (tail ratio {tail:.3e})"));
            break;
        }
        diagnostics.push(format!("tail ratio {tail:.3e} at n = {n}; doubling grid"));
        n *= 2;
    }

    let mut continuation_iterations = 0;
    if settled && options.target == Target::Maximal {
        let op = Operator::new(field, &blaschke, n)?;
        let mut best_slope = f.coefficient(1).re;
        let mut stretch = 0.1;
        while stretch >= 1e-3 {
            let trial = f.scale(Complex64::new(1.0 + stretch, 0.0));
            let attempt = iterate(&op, trial, options);
            if let Ok(run) = &attempt {
                continuation_iterations += run.updates.len();
            }
            let accepted = match attempt {
                Ok(run) if run.settled => {
                    let slope = run.f.coefficient(1).re;
                    let ok = slope > best_slope * (1.0 + 1e-9)
                        && residual_on(&run.f, field, n)? <= options.tol_residual;
                    if ok {
                        diagnostics.push(format!(
                            "maximal continuation: f'(0) {best_slope} -> {slope} (stretch {stretch})"
                        ));
                        best_slope = slope;
                        f = run.f;
                    }
                    ok
                }
                _ => false,
            };
            if !accepted {
                stretch /= 2.0;
            }
        }
    }

    let residual_sup = residual_on(&f, field, n)?;
    let converged = settled && residual_sup <= options.tol_residual;
    if !settled {
        diagnostics.push(format!(
            "update norm {:.3e} above tolerance after {} iterations",
            updates.last().copied().unwrap_or(f64::NAN),
            updates.len()
        ));
    } else if !converged {
        diagnostics.push(format!(
            "iteration settled but residual {residual_sup:.3e} exceeds {:.3e}",
            options.tol_residual
        ));
    }
    let f_prime = f.derivative();
    let tail_ratio = f_prime.tail_ratio();
    let univalent = is_univalent(&f, n)?;
    let locally_univalent = zeros.is_empty() && derivative_zero_count(&f_prime, n)? == 0;
    Ok(SolveReport {
        f,
        f_prime,
        zeros: zeros.to_vec(),
        grid: n,
        iterations: updates.len() + continuation_iterations,
        residual_sup,
        update_history: updates,
        update_l2_history: updates_l2,
        converged,
        univalent,
        locally_univalent,
        tail_ratio,
        diagnostics,
    })
}

/// Winding number of a closed polygon about `point`.
pub fn winding_number(polygon: &[Complex64], point: Complex64) -> i64 {
    let mut total = 0.0;
    for j in 0..polygon.len() {
        let a = polygon[j] - point;
        let b = polygon[(j + 1) % polygon.len()] - point;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Number of zeros of `g` in the disk by the argument principle on its
/// boundary trace.
pub fn derivative_zero_count(g: &DiskFunction, n: usize) -> Result<i64> {
    let trace = g.trace(n.max(g.natural_grid()))?;
    if trace.values().iter().any(|v| v.norm() == 0.0) {
        return Err(Error::Degenerate("derivative vanishes on the boundary grid".to_string()));
    }
    Ok(winding_number(trace.values(), Complex64::new(0.0, 0.0)))
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Complex64, b: Complex64, p: Complex64, d: f64| {
        d == 0.0
            && p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// True when the closed polygon has no self-intersections between
/// non-adjacent edges. Edges are swept in order of their left end.
pub fn polygon_is_simple(polygon: &[Complex64]) -> bool {
    let n = polygon.len();
    if n < 3 {
        return false;
    }
    let edge = |i: usize| (polygon[i], polygon[(i + 1) % n]);
    let mut order: Vec<usize> = (0..n).collect();
    let left = |i: usize| {
        let (a, b) = edge(i);
        a.re.min(b.re)
    };
    order.sort_by(|&a, &b| left(a).total_cmp(&left(b)));
    for (pos, &i) in order.iter().enumerate() {
        let (a, b) = edge(i);
        let right = a.re.max(b.re);
        for &j in &order[pos + 1..] {
            if left(j) > right {
                break;
            }
            let gap = (i + n - j) % n;
            if gap == 1 || gap == n - 1 {
                continue;
            }
            let (c, d) = edge(j);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Deterministic interior sample points (golden-angle spiral, radius ≤ 0.95).
fn interior_samples() -> impl Iterator<Item = Complex64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..WINDING_SAMPLES).map(move |i| {
        let r = 0.95 * ((i as f64 + 0.5) / WINDING_SAMPLES as f64).sqrt();
        Complex64::from_polar(r, golden * i as f64)
    })
}

/// Univalence surrogate: the boundary image polygon is simple and winds
/// exactly once around the images of 50 interior points.
pub fn is_univalent(f: &DiskFunction, n: usize) -> Result<bool> {
    let trace = f.trace(n.max(f.natural_grid()))?;
    let polygon = trace.values();
    if !polygon_is_simple(polygon) {
        return Ok(false);
    }
    Ok(interior_samples().all(|z| winding_number(polygon, f.eval(z)) == 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

pub const RADIAL_SCAN_TOL: f64 = 1e-9;

/// Radii `r ∈ [r_min, r_max]` for which `f(z) = rz` solves the problem,
/// i.e. `r = Φ(r)`, grouped into maximal intervals. Endpoints and isolated
/// roots are refined by bisection.
pub fn radial_scan(
    field: &WeightField,
    r_min: f64,
    r_max: f64,
    steps: usize,
) -> Result<Vec<Interval>> {
    radial_scan_with_tol(field, r_min, r_max, steps, RADIAL_SCAN_TOL)
}

pub fn radial_scan_with_tol(
    field: &WeightField,
    r_min: f64,
    r_max: f64,
    steps: usize,
    tol: f64,
) -> Result<Vec<Interval>> {
    if !field.is_radial() {
        return Err(Error::UnsupportedField(format!(
            "radial scan needs a rotation-invariant weight; {} is not",
            field.name()
        )));
    }
    if !(r_min >= 0.0 && r_max > r_min) || steps == 0 {
        return Err(Error::InvalidInput(format!("bad scan range [{r_min}, {r_max}] / {steps}")));
    }
    let gap = |r: f64| field.radial_profile(r).expect("radial field") - r;
    let on = |r: f64| gap(r).abs() <= tol;
    let radius = |k: usize| r_min + (r_max - r_min) * k as f64 / steps as f64;

    // Boundary of the `on` set between an off point and an on point.
    let edge = |mut off: f64, mut inside: f64| {
        for _ in 0..100 {
            let mid = 0.5 * (off + inside);
            if on(mid) {
                inside = mid;
            } else {
                off = mid;
            }
        }
        inside
    };
    let root = |mut a: f64, mut b: f64| {
        let sa = gap(a).signum();
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if gap(mid).signum() == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };

    let mut intervals: Vec<Interval> = Vec::new();
    let mut start: Option<f64> = None;
    for k in 0..=steps {
        let r = radius(k);
        match (on(r), start) {
            (true, None) => start = Some(if k == 0 { r } else { edge(radius(k - 1), r) }),
            (false, Some(lo)) => {
                intervals.push(Interval { lo, hi: edge(r, radius(k - 1)) });
                start = None;
            }
            (false, None) if k > 0 => {
                let prev = radius(k - 1);
                if !on(prev) && gap(prev).signum() != gap(r).signum() {
                    let x = root(prev, r);
                    intervals.push(Interval { lo: x, hi: x });
                }
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        intervals.push(Interval { lo, hi: r_max });
    }
    Ok(intervals)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub q: f64,
    /// Largest boundary sup distance between limits from different starts.
    pub max_disagreement: f64,
    pub limits_agree: bool,
    /// Largest ratio of consecutive boundary `L²` update norms.
    pub observed_factor: f64,
    pub runs: Vec<ContractionRun>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionRun {
    pub initial_slope: f64,
    pub iterations: usize,
    pub converged: bool,
    pub factor: f64,
}

/// Largest ratio `d_{k+1}/d_k` among updates with `d_k` above `floor`.
pub fn observed_contraction(updates: &[f64], floor: f64) -> f64 {
    updates
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

/// Runs undamped iteration from three starts under a valid contraction
/// certificate and compares limits and per-step contraction against `q`.
pub fn contraction_rate(
    field: &WeightField,
    zeros: &[Complex64],
    options: &SolveOptions,
    certificate: &ContractionCertificate,
) -> Result<ContractionReport> {
    if !certificate.valid {
        return Err(Error::Precondition(format!(
            "contraction certificate is not valid (q = {})",
            certificate.q
        )));
    }
    let m0 = certificate.self_bound;
    let starts = [
        InitialMap::Zero,
        InitialMap::ScaledIdentity(0.5 * m0),
        InitialMap::ScaledIdentity(m0),
    ];
    let floor = 1e-10 * m0.max(1.0);
    let mut limits = Vec::new();
    let mut runs = Vec::new();
    let mut observed: f64 = 0.0;
    for start in starts {
        let slope = start.build().coefficient(1).re;
        let opts = SolveOptions {
            damping: 1.0,
            target: Target::Nearest,
            initial_map: Some(start),
            ..options.clone()
        };
        let report = solve(field, zeros, &opts)?;
        let factor = observed_contraction(&report.update_l2_history, floor);
        observed = observed.max(factor);
        runs.push(ContractionRun {
            initial_slope: slope,
            iterations: report.iterations,
            converged: report.converged,
            factor,
        });
        limits.push(report);
    }
    let n = limits.iter().map(|r| r.grid).max().unwrap_or(options.grid);
    let mut max_disagreement: f64 = 0.0;
    for (i, a) in limits.iter().enumerate() {
        for b in &limits[i + 1..] {
            max_disagreement = max_disagreement.max(a.f.sub(&b.f).trace(n)?.sup_norm());
        }
    }
    let limits_agree = max_disagreement <= 10.0 * options.tol_update.max(1e-12);
    if !limits_agree {
        return Err(Error::ContractViolation(format!(
            "limits disagree by {max_disagreement:.3e} under q = {}",
            certificate.q
        )));
    }
    Ok(ContractionReport {
        q: certificate.q,
        max_disagreement,
        limits_agree,
        observed_factor: observed,
        runs,
    })
}
