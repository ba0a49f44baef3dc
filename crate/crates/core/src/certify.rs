//! Interior certificates for sub- and supersolutions, starlikeness and the
//! free-boundary gradient identity.
//!
//! Sub/supersolutions are tested through the interior inequalities
//!
//! ```text
//! log|f'(z)| ≤ P[log Φ(ξ, f(ξ))](z)     (subsolution)
//! log|g'(z)| ≥ P[log Φ(ξ, g(ξ))](z)     (supersolution, g univalent)
//! ```
//!
//! on a polar lattice of 16 radii `0.999·i/16` times the grid angles.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::{is_univalent, residual_on, DEFAULT_GRID};
use crate::spectral::{grid_node, schwarz_integral, BoundaryGrid, DiskFunction};
use crate::weight::WeightField;

pub const TOL_CERT: f64 = 1e-8;
pub const LATTICE_RADII: usize = 16;
pub const LATTICE_MAX_RADIUS: f64 = 0.999;
/// Residual bound required by [`free_boundary_identity`].
pub const IDENTITY_TOL_RESIDUAL: f64 = 1e-9;

/// Critical points closer than this to a lattice point are skipped.
const CRITICAL_GUARD: f64 = 1e-12;
const SPOT_CHECKS: usize = 16;
const SPOT_OFFSET: f64 = 1e-3;
const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-5;
const NEWTON_ITERS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Subsolution,
    Supersolution,
    Starlike,
    FreeBoundaryIdentity,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub pass: bool,
    pub worst_margin: f64,
    /// Point of the disk (interior sample or boundary node) where the
    /// margin is smallest.
    pub worst_location: Complex64,
    pub tolerance: f64,
    pub radii: usize,
    pub angles: usize,
    pub max_radius: f64,
    /// Lattice points excluded from the test, e.g. critical points of `f`.
    pub skipped: Vec<Complex64>,
    pub notes: Vec<String>,
}

impl Certificate {
    fn new(kind: CertificateKind, angles: usize) -> Self {
        Self {
            kind,
            pass: true,
            worst_margin: f64::INFINITY,
            worst_location: Complex64::new(0.0, 0.0),
            tolerance: TOL_CERT,
            radii: 0,
            angles,
            max_radius: 1.0,
            skipped: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, at: Complex64) {
        if margin < self.worst_margin {
            self.worst_margin = margin;
            self.worst_location = at;
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.worst_margin >= -self.tolerance;
        self
    }
}

fn grid_for(f: &DiskFunction) -> usize {
    DEFAULT_GRID.max(f.natural_grid())
}

fn require_resolved(f: &DiskFunction) -> Result<()> {
    let tail = f.tail_ratio();
    if !f.is_resolved() {
        return Err(Error::Unresolved { tail });
    }
    Ok(())
}

fn require_univalent(f: &DiskFunction, n: usize) -> Result<()> {
    if !is_univalent(f, n)? {
        return Err(Error::NotUnivalent(
            "boundary image is not a simple curve winding once".to_string(),
        ));
    }
    Ok(())
}

fn lattice_radius(i: usize) -> f64 {
    LATTICE_MAX_RADIUS * i as f64 / LATTICE_RADII as f64
}

/// `log Φ(ξ_j, f(ξ_j))` on the `n`-point grid.
fn log_weight_trace(f: &DiskFunction, field: &WeightField, n: usize) -> Result<BoundaryGrid> {
    let trace = f.trace(n)?;
    let logs = trace
        .values()
        .iter()
        .enumerate()
        .map(|(j, &w)| field.evaluate(grid_node(j, n), w).map(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    BoundaryGrid::from_real(logs)
}

/// Scans the lattice with `margin = sign·(P[log Φ∘f] − log|f'|)`.
fn lattice_certificate(
    kind: CertificateKind,
    f: &DiskFunction,
    field: &WeightField,
    sign: f64,
) -> Result<Certificate> {
    let n = grid_for(f);
    let poisson = schwarz_integral(&log_weight_trace(f, field, n)?)?;
    let slope = f.derivative();
    let mut cert = Certificate::new(kind, n);
    cert.radii = LATTICE_RADII;
    cert.max_radius = LATTICE_MAX_RADIUS;
    for i in 1..=LATTICE_RADII {
        let r = lattice_radius(i);
        let harmonic = poisson.circle_values(r, n)?;
        let derivative = slope.circle_values(r, n)?;
        for j in 0..n {
            let z = grid_node(j, n) * r;
            let modulus = derivative[j].norm();
            if modulus < CRITICAL_GUARD {
                cert.skipped.push(z);
                continue;
            }
            cert.record(sign * (harmonic[j].re - modulus.ln()), z);
        }
    }
    if !cert.skipped.is_empty() {
        cert.notes.push(format!(
            "{} lattice points skipped where f' vanishes",
            cert.skipped.len()
        ));
    }
    Ok(cert.finish())
}

/// Subsolution inequality on the interior lattice.
pub fn check_subsolution(f: &DiskFunction, field: &WeightField) -> Result<Certificate> {
    require_resolved(f)?;
    lattice_certificate(CertificateKind::Subsolution, f, field, 1.0)
}

/// Supersolution inequality on the interior lattice; `g` must be univalent.
pub fn check_supersolution(g: &DiskFunction, field: &WeightField) -> Result<Certificate> {
    require_resolved(g)?;
    require_univalent(g, grid_for(g))?;
    lattice_certificate(CertificateKind::Supersolution, g, field, -1.0)
}

/// `min_ξ Re(ξ f'(ξ)/f(ξ))` over the boundary grid.
pub fn check_starlike(f: &DiskFunction) -> Result<Certificate> {
    require_resolved(f)?;
    let lead = f.coefficient(1);
    if !(lead.re > 0.0 && lead.im.abs() <= 1e-12 * lead.re) {
        return Err(Error::Precondition(format!("f'(0) = {lead} is not positive")));
    }
    let n = grid_for(f);
    require_univalent(f, n)?;
    let values = f.trace(n)?;
    let slopes = f.derivative().trace(n)?;
    let mut cert = Certificate::new(CertificateKind::Starlike, n);
    for j in 0..n {
        let xi = grid_node(j, n);
        let w = values.values()[j];
        if w.norm() == 0.0 {
            return Err(Error::Degenerate(format!("f vanishes at boundary node {xi}")));
        }
        cert.record((xi * slopes.values()[j] / w).re, xi);
    }
    Ok(cert.finish())
}

/// Solves `f(z) = w` by Newton's method from `start`, staying in the disk.
fn invert(f: &DiskFunction, slope: &DiskFunction, w: Complex64, start: Complex64) -> Option<Complex64> {
    let mut z = start;
    let scale = w.norm().max(1.0);
    for _ in 0..NEWTON_ITERS {
        let d = slope.eval(z);
        if d.norm() < CRITICAL_GUARD {
            return None;
        }
        let step = (f.eval(z) - w) / d;
        z -= step;
        if !(z.norm() < 1.0) {
            return None;
        }
        if step.norm() <= 1e-15 * scale {
            return Some(z);
        }
    }
    ((f.eval(z) - w).norm() <= 1e-13 * scale).then_some(z)
}

/// `|∇u(w)|` for `u = log|f⁻¹|` by centered differences.
fn gradient_fd(f: &DiskFunction, slope: &DiskFunction, z: Complex64) -> Option<f64> {
    let w = f.eval(z);
    let h = FD_STEP * w.norm().max(1.0);
    let u = |dw: Complex64| invert(f, slope, w + dw, z).map(|p| p.norm().ln());
    let dx = (u(Complex64::new(h, 0.0))? - u(Complex64::new(-h, 0.0))?) / (2.0 * h);
    let dy = (u(Complex64::new(0.0, h))? - u(Complex64::new(0.0, -h))?) / (2.0 * h);
    Some(dx.hypot(dy))
}

/// Checks `|∇u| = 1/Φ` on the boundary image, `u = log|f⁻¹|`.
///
/// On the boundary grid `1/|f'(ξ)|` is compared with `1/Φ(ξ, f(ξ))` with an
/// allowance derived from the residual. At interior points `(1−δ)ξ` the
/// gradient of `u` is recomputed by finite differences through Newton
/// inversion and compared with `1/(|z||f'(z)|)`. Each margin is the allowance
/// minus the observed error.
pub fn free_boundary_identity(f: &DiskFunction, field: &WeightField) -> Result<Certificate> {
    require_resolved(f)?;
    let n = grid_for(f);
    require_univalent(f, n)?;
    let residual = residual_on(f, field, n)?;
    if residual > IDENTITY_TOL_RESIDUAL {
        return Err(Error::Precondition(format!(
            "residual {residual:.3e} exceeds {IDENTITY_TOL_RESIDUAL:.0e}"
        )));
    }
    let values = f.trace(n)?;
    let slope = f.derivative();
    let slopes = slope.trace(n)?;
    let mut cert = Certificate::new(CertificateKind::FreeBoundaryIdentity, n);
    for j in 0..n {
        let xi = grid_node(j, n);
        let a = slopes.values()[j].norm();
        let phi = field.evaluate(xi, values.values()[j])?;
        if a < CRITICAL_GUARD {
            return Err(Error::Degenerate(format!("f' vanishes at boundary node {xi}")));
        }
        let error = (1.0 / a - 1.0 / phi).abs();
        let allowance = residual / (a * phi) + 1e-12 / phi;
        cert.record(allowance - error, xi);
    }

    let stride = (n / SPOT_CHECKS).max(1);
    for j in (0..n).step_by(stride) {
        let xi = grid_node(j, n);
        let mut offset = SPOT_OFFSET;
        let mut checked = false;
        for _ in 0..4 {
            let z = xi * (1.0 - offset);
            let expected = 1.0 / (z.norm() * slope.eval(z).norm());
            if let Some(observed) = gradient_fd(f, &slope, z) {
                cert.record(FD_REL_TOL * expected - (observed - expected).abs(), z);
                checked = true;
                break;
            }
            offset /= 2.0;
        }
        if !checked {
            cert.skipped.push(xi);
            cert.notes.push(format!("Newton inversion failed near {xi}"));
        }
    }
    Ok(cert.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn subsolution_examples() {
        let unit = WeightField::constant(1.0).unwrap();
        let cert = check_subsolution(&DiskFunction::scaled_identity(0.5), &unit).unwrap();
        assert!(cert.pass);
        assert!((cert.worst_margin - 2f64.ln()).abs() < 1e-12);

        let cert = check_subsolution(&DiskFunction::scaled_identity(2.0), &unit).unwrap();
        assert!(!cert.pass);
        assert!((cert.worst_margin + 2f64.ln()).abs() < 1e-12);

        let field = WeightField::benchmark();
        let cert = check_subsolution(&DiskFunction::scaled_identity(6.0), &field).unwrap();
        assert!(cert.pass);
        assert!(cert.worst_margin.abs() < 1e-12);
    }

    #[test]
    fn supersolution_examples() {
        let field = WeightField::benchmark();
        let m = field.sup_bound();
        assert!(check_supersolution(&DiskFunction::scaled_identity(m), &field).unwrap().pass);

        let cert = check_supersolution(&DiskFunction::scaled_identity(3.0), &field).unwrap();
        assert!(cert.pass);
        assert!(cert.worst_margin.abs() < 1e-12);

        let cert = check_supersolution(&DiskFunction::scaled_identity(2.0), &field).unwrap();
        assert!(!cert.pass);
        assert!((cert.worst_margin - (2.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn supersolution_requires_univalence() {
        let field = WeightField::benchmark();
        let f = DiskFunction::real_polynomial(&[0.0, 1.0, 1.0]);
        assert!(matches!(check_supersolution(&f, &field), Err(Error::NotUnivalent(_))));
    }

    #[test]
    fn branched_solution_is_subsolution_with_skipped_critical_point() {
        let field = WeightField::benchmark();
        let f = DiskFunction::real_polynomial(&[0.0, 1.0, 1.0]);
        let cert = check_subsolution(&f, &field).unwrap();
        assert!(cert.pass, "{}", cert.worst_margin);
        assert!(cert.worst_margin > -1e-6);
    }

    #[test]
    fn starlike_examples() {
        let cert = check_starlike(&DiskFunction::scaled_identity(3.7)).unwrap();
        assert!(cert.pass);
        assert!((cert.worst_margin - 1.0).abs() < 1e-14);
        let f = DiskFunction::real_polynomial(&[0.0, 1.0, 1.0]);
        assert!(matches!(check_starlike(&f), Err(Error::NotUnivalent(_))));
        assert!(matches!(
            check_starlike(&DiskFunction::scaled_identity(-1.0)),
            Err(Error::Precondition(_))
        ));
        let g = DiskFunction::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.45, 0.0)]).unwrap();
        assert!(check_starlike(&g).unwrap().pass);
    }

    #[test]
    fn free_boundary_identity_examples() {
        let field = WeightField::constant(2.5).unwrap();
        let cert = free_boundary_identity(&DiskFunction::scaled_identity(2.5), &field).unwrap();
        assert!(cert.pass, "{cert:?}");
        assert!(cert.skipped.is_empty());

        let field = WeightField::benchmark();
        assert!(free_boundary_identity(&DiskFunction::scaled_identity(6.0), &field).unwrap().pass);

        let f = DiskFunction::real_polynomial(&[0.0, 1.0, 1.0]);
        assert!(matches!(free_boundary_identity(&f, &field), Err(Error::NotUnivalent(_))));
        // Not a solution.
        assert!(matches!(
            free_boundary_identity(&DiskFunction::scaled_identity(2.0), &field),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn certificate_serializes() {
        let cert = check_starlike(&DiskFunction::scaled_identity(1.0)).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["kind"], "starlike");
        assert_eq!(json["pass"], true);
    }
}
