//! Boundary regularity diagnostics: decay of the Taylor coefficients of
//! `f'` and an independent route to `f''` through the Herglotz identity
//!
//! ```text
//! f''(z) = f'(z)·( B'(z)/B(z) + S[d/dt log Φ∘f](z) / (i z) )
//! ```
//!
//! where `S` is the Schwarz integral.

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::solver::DEFAULT_GRID;
use crate::spectral::{
    grid_node, periodic_derivative, periodic_difference, periodic_tail_ratio, schwarz_integral,
    BoundaryGrid, DiskFunction,
};
use crate::weight::WeightField;

/// Fewer usable coefficients than this leaves the decay undetermined.
pub const MIN_FIT_POINTS: usize = 8;
/// Coefficients below this fraction of the largest are treated as zero.
const COEFFICIENT_FLOOR: f64 = 1e-14;
/// Relative tolerance of the Herglotz/spectral agreement contract.
pub const HERGLOTZ_TOL: f64 = 1e-6;
/// Tail ratio above which `log Φ∘f` is differentiated by centered differences.
const SMOOTH_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    Geometric,
    Algebraic,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub decay_kind: DecayKind,
    /// `ρ` for geometric decay `|c_k| ~ ρ^k`, `s` for algebraic `|c_k| ~ k^{-s}`.
    pub rate: f64,
    /// RMS residual of the selected fit in `log|c_k|`.
    pub fit_residual: f64,
    /// RMS residuals of the geometric and algebraic fits (NaN when not run).
    pub geometric_residual: f64,
    pub algebraic_residual: f64,
    /// Half-open index window `[lo, hi)` of the fit.
    pub window: (usize, usize),
    pub points: usize,
    pub smoothness_claim: String,
}

/// Least-squares line `y = a + b x`; returns `(a, b, rms residual)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    (a, b, (rss / m).sqrt())
}

fn usable(coefficients: &[Complex64], lo: usize, hi: usize, floor: f64) -> Vec<(usize, f64)> {
    (lo.max(1)..hi.min(coefficients.len()))
        .filter_map(|k| {
            let a = coefficients[k].norm();
            (a > floor).then(|| (k, a.ln()))
        })
        .collect()
}

fn undetermined(window: (usize, usize), points: usize) -> SpectrumReport {
    SpectrumReport {
        decay_kind: DecayKind::Undetermined,
        rate: f64::NAN,
        fit_residual: f64::NAN,
        geometric_residual: f64::NAN,
        algebraic_residual: f64::NAN,
        window,
        points,
        smoothness_claim: format!(
            "only {points} nonzero coefficients of f' in the fit window; decay undetermined \
             (a finite spectrum is consistent with an analytic extension across the circle)"
        ),
    }
}

/// Classifies the decay of the Taylor coefficients of `f'`.
///
/// The fit window is `[n/8, n/2)` for the grid `n = 2·len(f')`; when it holds
/// fewer than eight coefficients above the noise floor the window falls back
/// to `[1, n/8)`.
pub fn spectrum_report(f: &DiskFunction) -> Result<SpectrumReport> {
    if !f.is_resolved() {
        return Err(Error::Unresolved { tail: f.tail_ratio() });
    }
    let slope = f.derivative();
    let coefficients = slope.coefficients();
    let n = 2 * coefficients.len().max(4);
    let peak = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = COEFFICIENT_FLOOR * peak;
    let mut window = (n / 8, n / 2);
    let mut points = usable(coefficients, window.0, window.1, floor);
    if points.len() < MIN_FIT_POINTS {
        window = (1, n / 8);
        points = usable(coefficients, window.0, window.1, floor);
    }
    if points.len() < MIN_FIT_POINTS || peak == 0.0 {
        return Ok(undetermined(window, points.len()));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ks: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let logs: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let (_, geo_slope, geo_res) = line_fit(&ks, &ys);
    let (_, alg_slope, alg_res) = line_fit(&logs, &ys);
    let rho = geo_slope.exp();
    let s = -alg_slope;
    let geometric_ok = rho > 0.0 && rho < 1.0;
    let algebraic_ok = s > 0.0;
    let pick_geometric = match (geometric_ok, algebraic_ok) {
        (true, true) => geo_res <= alg_res,
        (true, false) => true,
        (false, true) => false,
        (false, false) => {
            let mut report = undetermined(window, points.len());
            report.geometric_residual = geo_res;
            report.algebraic_residual = alg_res;
            report.smoothness_claim =
                "coefficients of f' do not decay over the fit window; decay undetermined".to_string();
            return Ok(report);
        }
    };
    let (decay_kind, rate, fit_residual, smoothness_claim) = if pick_geometric {
        (
            DecayKind::Geometric,
            rho,
            geo_res,
            format!(
                "geometric decay |c_k| ~ {rho:.4}^k is consistent with an analytic extension \
                 of f across the circle to radius about {:.4}",
                1.0 / rho
            ),
        )
    } else {
        (
            DecayKind::Algebraic,
            s,
            alg_res,
            format!(
                "algebraic decay |c_k| ~ k^-{s:.3} is consistent with f in C^(k+1,a) on the \
                 circle for k + a up to about {:.3}",
                (s - 1.0).max(0.0)
            ),
        )
    };
    Ok(SpectrumReport {
        decay_kind,
        rate,
        fit_residual,
        geometric_residual: geo_res,
        algebraic_residual: alg_res,
        window,
        points: points.len(),
        smoothness_claim,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HerglotzDerivative {
    pub second_derivative: DiskFunction,
    /// Boundary sup distance to the spectral derivative of `f'`.
    pub distance: f64,
    pub tolerance: f64,
    /// False when `log Φ∘f` was differentiated by centered differences.
    pub spectral_tangent: bool,
    pub grid: usize,
}

/// `f''` through the Herglotz identity, checked against differentiating the
/// coefficients of `f'`. Fails with [`Error::ContractViolation`] when the two
/// disagree beyond `1e-6·(1 + sup|f''|)` (widened when `log Φ∘f` is not
/// smooth enough for spectral differentiation).
pub fn second_derivative_herglotz(
    f: &DiskFunction,
    field: &WeightField,
    blaschke: &BlaschkeProduct,
) -> Result<HerglotzDerivative> {
    let n = DEFAULT_GRID.max(f.natural_grid());
    let trace = f.trace(n)?;
    let slopes = f.derivative().trace(n)?;
    let logs = trace
        .values()
        .iter()
        .enumerate()
        .map(|(j, &w)| field.evaluate(grid_node(j, n), w).map(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    let logs = BoundaryGrid::from_real(logs)?;
    let spectral_tangent = periodic_tail_ratio(&logs) < SMOOTH_TAIL;
    let tangent = if spectral_tangent {
        periodic_derivative(&logs)?
    } else {
        log::warn!("log Φ∘f is not resolved on the grid; using centered differences");
        periodic_difference(&logs)?
    };
    let herglotz = schwarz_integral(&tangent)?.trace(n)?;
    let mut values = Vec::with_capacity(n);
    for j in 0..n {
        let xi = grid_node(j, n);
        let b = blaschke.eval(xi)?;
        if b.norm() < 1e-14 {
            return Err(Error::Degenerate(format!("Blaschke trace vanishes at {xi}")));
        }
        let log_derivative = blaschke.derivative(xi)? / b + herglotz.values()[j] / (Complex64::i() * xi);
        values.push(slopes.values()[j] * log_derivative);
    }
    let second_derivative = DiskFunction::from_trace(&BoundaryGrid::new(values)?);

    let spectral = f.derivative().derivative();
    let diff = second_derivative.sub(&spectral).trace(n)?;
    let distance = diff.sup_norm();
    let scale = 1.0 + spectral.trace(n)?.sup_norm();
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let relative = if spectral_tangent {
        HERGLOTZ_TOL
    } else {
        HERGLOTZ_TOL.max(10.0 * h * h)
    };
    let tolerance = relative * scale;
    if distance > tolerance {
        return Err(Error::ContractViolation(format!(
            "Herglotz f'' differs from spectral f'' by {distance:.3e} (tolerance {tolerance:.3e})"
        )));
    }
    Ok(HerglotzDerivative {
        second_derivative,
        distance,
        tolerance,
        spectral_tangent,
        grid: n,
    })
}
