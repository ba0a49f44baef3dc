//! Boundary weights `Φ(ξ, w)` and sampled checks of the hypotheses placed
//! on them: bounds, Lipschitz contraction, the radial monotonicity
//! condition `Φ(w) ≤ Φ(ρw)/ρ`, and superharmonicity of `log Φ`.
//!
//! Every check runs on a fixed, documented lattice so results are
//! reproducible:
//!
//! * polar lattice for `w`: 256 angles × 256 radii,
//! * 64 values of `ρ = j/65`,
//! * 64 boundary angles for `ξ` when the field depends on `ξ`,
//! * Laplacian lattice spacing `h = M/128`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type PointFn = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;
pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub const POLAR_ANGLES: usize = 256;
pub const POLAR_RADII: usize = 256;
pub const RHO_SAMPLES: usize = 64;
pub const XI_SAMPLES: usize = 64;
pub const LAPLACIAN_STEPS: usize = 128;

/// Floor applied to tabulated weights so `log Φ` stays finite.
pub const TABLE_FLOOR: f64 = 1e-9;

const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Constant,
    RadialPiecewise,
    ProductSeparable,
    Tabulated,
}

#[derive(Clone)]
pub struct RadialPiece {
    /// Upper end of the radius interval this piece covers (inclusive).
    pub upto: f64,
    pub profile: ProfileFn,
}

impl RadialPiece {
    pub fn new(upto: f64, profile: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            upto,
            profile: Arc::new(profile),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableLayout {
    /// Columns `r,theta,phi`.
    Polar,
    /// Columns `x,y,phi`.
    Cartesian,
}

/// Regular lattice of weight samples, interpolated bilinearly.
#[derive(Debug, Clone)]
pub struct WeightTable {
    layout: TableLayout,
    first: Vec<f64>,
    second: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Clone)]
enum Model {
    Constant(f64),
    Radial(Vec<RadialPiece>),
    Separable {
        boundary: Option<PointFn>,
        image: PointFn,
    },
    Tabulated(WeightTable),
}

/// The weight `Φ(ξ, w)` with its sup bound `M = ‖Φ‖`.
#[derive(Clone)]
pub struct WeightField {
    name: String,
    model: Model,
    sup_bound: f64,
}

impl fmt::Debug for WeightField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightField")
            .field("name", &self.name)
            .field("kind", &self.kind())
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl WeightField {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidInput(format!("constant weight must be positive, got {c}")));
        }
        Ok(Self {
            name: format!("constant({c})"),
            model: Model::Constant(c),
            sup_bound: c,
        })
    }

    /// Rotation-invariant weight given piecewise in `|w|`. The last piece
    /// must extend to infinity; adjacent pieces must agree at breakpoints.
    pub fn radial_piecewise(name: impl Into<String>, pieces: Vec<RadialPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("no radial pieces".to_string()));
        }
        for pair in pieces.windows(2) {
            if !(pair[1].upto > pair[0].upto) {
                return Err(Error::InvalidInput(
                    "radial breakpoints must be strictly increasing".to_string(),
                ));
            }
            let r = pair[0].upto;
            let (left, right) = ((pair[0].profile)(r), (pair[1].profile)(r));
            if (left - right).abs() > CONTINUITY_TOL * left.abs().max(1.0) {
                return Err(Error::ModelViolation(format!(
                    "radial weight jumps at r = {r}: {left} vs {right}"
                )));
            }
        }
        if pieces.last().map(|p| p.upto) != Some(f64::INFINITY) {
            return Err(Error::InvalidInput(
                "last radial piece must extend to infinity".to_string(),
            ));
        }
        let last_break = pieces
            .iter()
            .rev()
            .map(|p| p.upto)
            .find(|u| u.is_finite())
            .unwrap_or(1.0);
        let reach = (2.0 * last_break).max(16.0);
        let mut field = Self {
            name: name.into(),
            model: Model::Radial(pieces),
            sup_bound: f64::INFINITY,
        };
        let samples = 1 << 16;
        let mut sup: f64 = 0.0;
        for i in 0..=samples {
            let r = reach * i as f64 / samples as f64;
            let v = field.profile_value(r);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ModelViolation(format!("radial weight {v} at r = {r}")));
            }
            sup = sup.max(v);
        }
        for far in [10.0 * reach, 1e3 * reach, 1e6 * reach] {
            if field.profile_value(far) > sup * (1.0 + 1e-12) {
                return Err(Error::ModelViolation(format!(
                    "radial weight keeps growing beyond r = {reach}"
                )));
            }
        }
        field.sup_bound = sup;
        Ok(field)
    }

    /// `Φ(ξ, w) = a(ξ)·b(w)`, or `b(w)` alone when `boundary` is `None`.
    /// The declared bound is checked by sampling.
    pub fn product_separable(
        name: impl Into<String>,
        boundary: Option<PointFn>,
        image: PointFn,
        sup_bound: f64,
    ) -> Result<Self> {
        if !(sup_bound > 0.0 && sup_bound.is_finite()) {
            return Err(Error::InvalidInput(format!("sup bound must be positive, got {sup_bound}")));
        }
        let field = Self {
            name: name.into(),
            model: Model::Separable { boundary, image },
            sup_bound,
        };
        field.validate_by_sampling()?;
        Ok(field)
    }

    /// Weight depending on the image point only.
    pub fn from_fn(
        name: impl Into<String>,
        sup_bound: f64,
        image: impl Fn(Complex64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::product_separable(name, None, Arc::new(image), sup_bound)
    }

    /// The piecewise weight
    ///
    /// ```text
    /// Φ(w) = √(2|w|²+1)  |w| ≤ 2
    ///        3            2 < |w| ≤ 3
    ///        |w|          3 < |w| ≤ 6
    ///        6            |w| > 6
    /// ```
    ///
    /// for which every `rz` with `3 ≤ r ≤ 6` and `z² + z` are solutions.
    pub fn benchmark() -> Self {
        Self::radial_piecewise(
            "benchmark",
            vec![
                RadialPiece::new(2.0, |r| (2.0 * r * r + 1.0).sqrt()),
                RadialPiece::new(3.0, |_| 3.0),
                RadialPiece::new(6.0, |r| r),
                RadialPiece::new(f64::INFINITY, |_| 6.0),
            ],
        )
        .expect("example weight is valid")
    }

    pub fn tabulated(name: impl Into<String>, table: WeightTable) -> Result<Self> {
        let sup_bound = table.values.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            name: name.into(),
            model: Model::Tabulated(table),
            sup_bound,
        })
    }

    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let table = WeightTable::from_reader(std::fs::File::open(path)?)?;
        Self::tabulated(path.display().to_string(), table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> WeightKind {
        match self.model {
            Model::Constant(_) => WeightKind::Constant,
            Model::Radial(_) => WeightKind::RadialPiecewise,
            Model::Separable { .. } => WeightKind::ProductSeparable,
            Model::Tabulated(_) => WeightKind::Tabulated,
        }
    }

    /// `M = ‖Φ‖`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    pub fn xi_dependent(&self) -> bool {
        matches!(self.model, Model::Separable { boundary: Some(_), .. })
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.model, Model::Constant(_) | Model::Radial(_))
    }

    /// Positive multiple `λΦ`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("scale must be positive, got {lambda}")));
        }
        let model = match &self.model {
            Model::Constant(c) => Model::Constant(c * lambda),
            Model::Radial(pieces) => Model::Radial(
                pieces
                    .iter()
                    .map(|p| {
                        let profile = p.profile.clone();
                        RadialPiece::new(p.upto, move |r| lambda * profile(r))
                    })
                    .collect(),
            ),
            Model::Separable { boundary, image } => {
                let image = image.clone();
                Model::Separable {
                    boundary: boundary.clone(),
                    image: Arc::new(move |w| lambda * image(w)),
                }
            }
            Model::Tabulated(table) => {
                let mut table = table.clone();
                table.values.iter_mut().for_each(|v| *v *= lambda);
                Model::Tabulated(table)
            }
        };
        Ok(Self {
            name: format!("{}*{lambda}", self.name),
            model,
            sup_bound: self.sup_bound * lambda,
        })
    }

    fn profile_value(&self, r: f64) -> f64 {
        match &self.model {
            Model::Constant(c) => *c,
            Model::Radial(pieces) => {
                let piece = pieces.iter().find(|p| r <= p.upto).unwrap_or(&pieces[pieces.len() - 1]);
                (piece.profile)(r)
            }
            _ => self.raw(Complex64::new(1.0, 0.0), Complex64::new(r, 0.0)),
        }
    }

    /// Radial profile `r ↦ Φ(r)` for rotation-invariant fields.
    pub fn radial_profile(&self, r: f64) -> Option<f64> {
        self.is_radial().then(|| self.profile_value(r))
    }

    fn raw(&self, xi: Complex64, w: Complex64) -> f64 {
        match &self.model {
            Model::Constant(c) => *c,
            Model::Radial(_) => self.profile_value(w.norm()),
            Model::Separable { boundary, image } => {
                let a = boundary.as_ref().map_or(1.0, |b| b(xi));
                a * image(w)
            }
            Model::Tabulated(table) => table.interpolate(w),
        }
    }

    /// `Φ(ξ, w)` for unimodular `ξ`.
    pub fn evaluate(&self, xi: Complex64, w: Complex64) -> Result<f64> {
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("ξ = {xi} is not unimodular")));
        }
        let v = self.raw(xi, w);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::ModelViolation(format!(
                "{}: Φ({xi}, {w}) = {v} is not positive",
                self.name
            )));
        }
        Ok(v)
    }

    /// `Φ(w)` for fields that do not depend on `ξ`.
    pub fn evaluate_image(&self, w: Complex64) -> Result<f64> {
        self.evaluate(Complex64::new(1.0, 0.0), w)
    }

    fn xi_samples(&self) -> Vec<Complex64> {
        if self.xi_dependent() {
            (0..XI_SAMPLES)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / XI_SAMPLES as f64))
                .collect()
        } else {
            vec![Complex64::new(1.0, 0.0)]
        }
    }

    fn validate_by_sampling(&self) -> Result<()> {
        let m = self.sup_bound;
        let reach = 2.0 * m;
        for xi in self.xi_samples().into_iter().step_by(4) {
            for i in 0..=64 {
                let r = reach * i as f64 / 64.0;
                for a in 0..64 {
                    let w = Complex64::from_polar(r, 2.0 * PI * a as f64 / 64.0);
                    let v = self.evaluate(xi, w)?;
                    if v > m * (1.0 + 1e-12) {
                        return Err(Error::ModelViolation(format!(
                            "{}: Φ({xi}, {w}) = {v} exceeds declared bound {m}",
                            self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn require_xi_free(&self, what: &str) -> Result<()> {
        if self.xi_dependent() {
            return Err(Error::UnsupportedField(format!(
                "{what} needs a weight independent of ξ; {} depends on ξ",
                self.name
            )));
        }
        Ok(())
    }
}

impl WeightTable {
    pub fn new(layout: TableLayout, first: Vec<f64>, second: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        if first.len() < 2 || second.len() < 2 || values.len() != first.len() * second.len() {
            return Err(Error::InvalidInput(format!(
                "table needs at least 2×2 nodes and {}×{} values, got {}",
                first.len(),
                second.len(),
                values.len()
            )));
        }
        for axis in [&first, &second] {
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidInput("table axes must be strictly increasing".to_string()));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite table value".to_string()));
        }
        let clamped = values.iter().filter(|&&v| v < TABLE_FLOOR).count();
        if clamped > 0 {
            log::warn!("{clamped} tabulated weight values clamped to {TABLE_FLOOR}");
            values.iter_mut().for_each(|v| *v = v.max(TABLE_FLOOR));
        }
        Ok(Self {
            layout,
            first,
            second,
            values,
        })
    }

    /// Reads `r,theta,phi` or `x,y,phi` rows covering a full regular lattice
    /// in any order.
    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.to_string()).collect();
        let layout = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
            ["r", "theta", "phi"] => TableLayout::Polar,
            ["x", "y", "phi"] => TableLayout::Cartesian,
            other => {
                return Err(Error::Parse(format!(
                    "weight table header must be `r,theta,phi` or `x,y,phi`, got {other:?}"
                )))
            }
        };
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {:?}: {e}", record.position())))
            };
            rows.push((parse(0)?, parse(1)?, parse(2)?));
        }
        let axis = |sel: fn(&(f64, f64, f64)) -> f64| {
            let mut v: Vec<f64> = rows.iter().map(sel).collect();
            v.sort_by(|a, b| a.total_cmp(b));
            v.dedup();
            v
        };
        let first = axis(|r| r.0);
        let second = axis(|r| r.1);
        let mut values = vec![f64::NAN; first.len() * second.len()];
        for &(a, b, phi) in &rows {
            let i = first.binary_search_by(|x| x.total_cmp(&a)).expect("axis value present");
            let j = second.binary_search_by(|x| x.total_cmp(&b)).expect("axis value present");
            values[i * second.len() + j] = phi;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Parse("weight table does not cover a full lattice".to_string()));
        }
        Self::new(layout, first, second, values)
    }

    fn locate(axis: &[f64], x: f64) -> (usize, f64) {
        let x = x.clamp(axis[0], axis[axis.len() - 1]);
        let i = match axis.binary_search_by(|a| a.total_cmp(&x)) {
            Ok(i) => i.min(axis.len() - 2),
            Err(i) => i.saturating_sub(1).min(axis.len() - 2),
        };
        let s = (x - axis[i]) / (axis[i + 1] - axis[i]);
        (i, s)
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.second.len() + j]
    }

    pub fn interpolate(&self, w: Complex64) -> f64 {
        let (a, b) = match self.layout {
            TableLayout::Cartesian => (w.re, w.im),
            TableLayout::Polar => (w.norm(), w.arg().rem_euclid(2.0 * PI)),
        };
        let (i, s) = Self::locate(&self.first, a);
        if self.layout == TableLayout::Polar {
            // Periodic in theta: wrap between the last node and 2π + first node.
            let m = self.second.len();
            let first_theta = self.second[0];
            let last_theta = self.second[m - 1];
            let (j0, j1, u) = if b >= first_theta && b <= last_theta {
                let (j, u) = Self::locate(&self.second, b);
                (j, j + 1, u)
            } else {
                let span = first_theta + 2.0 * PI - last_theta;
                let offset = if b > last_theta { b - last_theta } else { b + 2.0 * PI - last_theta };
                (m - 1, 0, if span > 0.0 { offset / span } else { 0.0 })
            };
            let lerp = |jj: usize| self.at(i, jj) * (1.0 - s) + self.at(i + 1, jj) * s;
            return lerp(j0) * (1.0 - u) + lerp(j1) * u;
        }
        let (j, u) = Self::locate(&self.second, b);
        let v0 = self.at(i, j) * (1.0 - s) + self.at(i + 1, j) * s;
        let v1 = self.at(i, j + 1) * (1.0 - s) + self.at(i + 1, j + 1) * s;
        v0 * (1.0 - u) + v1 * u
    }
}

/// Sampled evidence for the contraction hypothesis `L(1 + M0/m0) < 1`.
#[derive(Debug, Clone, Serialize)]
pub struct ContractionCertificate {
    /// Caller-supplied Lipschitz constant in `w`.
    pub lipschitz: f64,
    /// Largest difference quotient seen on the lattice.
    pub sampled_lipschitz: f64,
    /// Smallest radius `M0` with `Φ ≤ M0` on `{|w| ≤ M0}`.
    pub self_bound: f64,
    /// `m0 = min Φ` over `{|ξ| = 1, |w| ≤ M0}`.
    pub floor: f64,
    pub q: f64,
    pub valid: bool,
    pub diagnostic: Option<String>,
}

fn polar_point(radius: f64, i: usize, a: usize) -> Complex64 {
    Complex64::from_polar(
        radius * i as f64 / POLAR_RADII as f64,
        2.0 * PI * a as f64 / POLAR_ANGLES as f64,
    )
}

/// Largest `Φ` over all sampled `ξ` and angles on the circle `|w| = r`.
fn ring_max(field: &WeightField, xis: &[Complex64], r: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &xi in xis {
        for a in 0..POLAR_ANGLES {
            let w = Complex64::from_polar(r, 2.0 * PI * a as f64 / POLAR_ANGLES as f64);
            best = best.max(field.evaluate(xi, w)?);
        }
    }
    Ok(best)
}

/// Builds the contraction certificate for a caller-supplied Lipschitz
/// constant `lipschitz`. The constant is spot-checked against difference
/// quotients on the lattice but cannot be proven.
pub fn contraction_certificate(field: &WeightField, lipschitz: f64) -> Result<ContractionCertificate> {
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "Lipschitz constant must be finite and nonnegative, got {lipschitz}"
        )));
    }
    let m = field.sup_bound();
    let xis = field.xi_samples();

    // Running maximum of Φ over discs of radius r_i = M i / 256.
    let mut running = 0.0f64;
    let mut bracket = None;
    for i in 0..=POLAR_RADII {
        let r = m * i as f64 / POLAR_RADII as f64;
        let previous_running = running;
        running = running.max(ring_max(field, &xis, r)?);
        if running <= r * (1.0 + 1e-12) {
            bracket = Some((i, previous_running));
            break;
        }
    }
    let Some((i, inner_max)) = bracket else {
        return Ok(ContractionCertificate {
            lipschitz,
            sampled_lipschitz: f64::NAN,
            self_bound: f64::NAN,
            floor: f64::NAN,
            q: f64::INFINITY,
            valid: false,
            diagnostic: Some(format!(
                "no radius M0 <= {m} with Φ <= M0 on the sampled disk"
            )),
        });
    };
    let mut lo = if i == 0 { 0.0 } else { m * (i - 1) as f64 / POLAR_RADII as f64 };
    let mut hi = m * i as f64 / POLAR_RADII as f64;
    let start = lo;
    for _ in 0..48 {
        let mid = 0.5 * (lo + hi);
        let mut disc_max = inner_max;
        for s in 0..=8 {
            let r = start + (mid - start) * s as f64 / 8.0;
            disc_max = disc_max.max(ring_max(field, &xis, r)?);
        }
        if disc_max <= mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let self_bound = hi;

    let mut floor = f64::INFINITY;
    for &xi in &xis {
        for i in 0..=POLAR_RADII {
            for a in 0..POLAR_ANGLES {
                floor = floor.min(field.evaluate(xi, polar_point(self_bound, i, a))?);
            }
        }
    }

    let sampled_lipschitz = sampled_lipschitz(field, &xis, m)?;
    let q = lipschitz * (1.0 + self_bound / floor);
    let mut diagnostic = None;
    let mut valid = q < 1.0;
    if sampled_lipschitz > lipschitz * (1.0 + 1e-9) + 1e-12 {
        valid = false;
        diagnostic = Some(format!(
            "supplied L = {lipschitz} is below the sampled difference quotient {sampled_lipschitz}"
        ));
    } else if !valid {
        diagnostic = Some(format!("q = {q} >= 1"));
    }
    Ok(ContractionCertificate {
        lipschitz,
        sampled_lipschitz,
        self_bound,
        floor,
        q,
        valid,
        diagnostic,
    })
}

fn sampled_lipschitz(field: &WeightField, xis: &[Complex64], m: f64) -> Result<f64> {
    let mut best: f64 = 0.0;
    for &xi in xis {
        for i in 0..=POLAR_RADII {
            for a in 0..POLAR_ANGLES {
                let w = polar_point(m, i, a);
                let v = field.evaluate(xi, w)?;
                let mut neighbors = vec![polar_point(m, i, (a + 1) % POLAR_ANGLES)];
                if i < POLAR_RADII {
                    neighbors.push(polar_point(m, i + 1, a));
                }
                for u in neighbors {
                    let d = (u - w).norm();
                    if d > 0.0 {
                        best = best.max((field.evaluate(xi, u)? - v).abs() / d);
                    }
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct TepperReport {
    pub strict: bool,
    /// `min (Φ(ρw)/ρ − Φ(w))` over the lattice.
    pub worst_margin: f64,
    pub worst_w: Complex64,
    pub worst_rho: f64,
    pub pass: bool,
}

pub const TEPPER_TOL: f64 = 1e-10;
pub const TEPPER_STRICT_MARGIN: f64 = 1e-6;

/// Samples `Φ(ρw)/ρ − Φ(w)` for `ρ = j/65` and `w` on the polar lattice
/// up to `|w| = M`.
pub fn tepper_check(field: &WeightField, strict: bool) -> Result<TepperReport> {
    field.require_xi_free("the radial monotonicity check")?;
    let m = field.sup_bound();
    let mut worst = (f64::INFINITY, Complex64::new(0.0, 0.0), 0.0);
    for i in 1..=POLAR_RADII {
        for a in 0..POLAR_ANGLES {
            let w = polar_point(m, i, a);
            let at_w = field.evaluate_image(w)?;
            for j in 1..=RHO_SAMPLES {
                let rho = j as f64 / (RHO_SAMPLES + 1) as f64;
                let margin = field.evaluate_image(w * rho)? / rho - at_w;
                if margin < worst.0 {
                    worst = (margin, w, rho);
                }
            }
        }
    }
    let pass = if strict {
        worst.0 > TEPPER_STRICT_MARGIN
    } else {
        worst.0 >= -TEPPER_TOL
    };
    Ok(TepperReport {
        strict,
        worst_margin: worst.0,
        worst_w: worst.1,
        worst_rho: worst.2,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuperharmonicReport {
    pub spacing: f64,
    pub tolerance: f64,
    /// Largest five-point Laplacian of `log Φ` over interior nodes.
    pub worst_laplacian: f64,
    pub worst_node: Complex64,
    pub pass: bool,
}

/// Five-point Laplacian of `log Φ` on the square lattice of spacing
/// `h = M/128` covering `{|w| ≤ M}`; passes when every interior value is at
/// most `10h`.
pub fn superharmonic_check(field: &WeightField) -> Result<SuperharmonicReport> {
    field.require_xi_free("the superharmonicity check")?;
    let m = field.sup_bound();
    let steps = LAPLACIAN_STEPS as i64;
    let h = m / LAPLACIAN_STEPS as f64;
    let inside = |i: i64, j: i64| (i * i + j * j) <= steps * steps;
    let side = (2 * steps + 1) as usize;
    let mut logs = vec![f64::NAN; side * side];
    let idx = |i: i64, j: i64| ((i + steps) as usize) * side + (j + steps) as usize;
    for i in -steps..=steps {
        for j in -steps..=steps {
            if inside(i, j) {
                let w = Complex64::new(i as f64 * h, j as f64 * h);
                logs[idx(i, j)] = field.evaluate_image(w)?.ln();
            }
        }
    }
    let tolerance = 10.0 * h;
    let mut worst = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
    for i in -steps + 1..steps {
        for j in -steps + 1..steps {
            if !(inside(i, j) && inside(i + 1, j) && inside(i - 1, j) && inside(i, j + 1) && inside(i, j - 1)) {
                continue;
            }
            let lap = (logs[idx(i + 1, j)] + logs[idx(i - 1, j)] + logs[idx(i, j + 1)]
                + logs[idx(i, j - 1)]
                - 4.0 * logs[idx(i, j)])
                / (h * h);
            if lap > worst.0 {
                worst = (lap, Complex64::new(i as f64 * h, j as f64 * h));
            }
        }
    }
    Ok(SuperharmonicReport {
        spacing: h,
        tolerance,
        worst_laplacian: worst.0,
        worst_node: worst.1,
        pass: worst.0 <= tolerance,
    })
}
