//! Fourier machinery on the unit circle.
//!
//! Boundary traces live on uniform grids `t_j = 2πj/n` with `n` a power of
//! two. Analytic functions on the disk are held as Taylor coefficients
//! ([`DiskFunction`]); the two representations are linked by the DFT pair
//!
//! ```text
//! c_k = (1/n) Σ_j v_j e^{-i k t_j},      v_j = Σ_k c_k e^{i k t_j}
//! ```
//!
//! so that a grid → coefficients → grid round trip is the identity.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail ratio below which a [`DiskFunction`] counts as resolved.
pub const RESOLVED_TAIL: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Normalized forward transform: grid values → Fourier coefficients.
pub(crate) fn dft(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    forward_plan(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`dft`]: Fourier coefficients → grid values.
pub(crate) fn idft(coefficients: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coefficients.to_vec();
    inverse_plan(buf.len()).process(&mut buf);
    buf
}

/// Signed frequency of DFT bin `k` on an `n`-point grid. The Nyquist bin
/// maps to `n/2`.
#[inline]
pub(crate) fn frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

#[inline]
pub fn grid_angle(j: usize, n: usize) -> f64 {
    2.0 * PI * j as f64 / n as f64
}

#[inline]
pub fn grid_node(j: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, grid_angle(j, n))
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "grid size must be a power of two >= 8, got {n}"
        )));
    }
    Ok(())
}

/// Complex samples of a function on the uniform circle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    values: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_grid_size(values.len())?;
        if let Some(j) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {j}")));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f(t_j)`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|j| f(grid_angle(j, n))).collect())
    }

    pub fn from_real_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(n, |t| Complex64::new(f(t), 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn angle(&self, j: usize) -> f64 {
        grid_angle(j, self.len())
    }

    pub fn node(&self, j: usize) -> Complex64 {
        grid_node(j, self.len())
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |imaginary part| relative to the largest modulus.
    fn imaginary_ratio(&self) -> f64 {
        let scale = self.sup_norm().max(1.0);
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / scale
    }

    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        dft(&self.values)
    }

    /// Pointwise map producing a new grid of the same size.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Boundary `L²` norm, `(∫|v|² dt)^{1/2}` by the trapezoidal rule.
    pub fn l2_norm(&self) -> f64 {
        let h = 2.0 * PI / self.len() as f64;
        (h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }
}

fn require_real(data: &BoundaryGrid) -> Result<()> {
    if data.imaginary_ratio() > 1e-12 {
        return Err(Error::InvalidInput(
            "boundary data must be real-valued".to_string(),
        ));
    }
    Ok(())
}

/// Analytic function on the unit disk held by its Taylor coefficients.
///
/// The boundary trace is recomputed on demand with [`DiskFunction::trace`];
/// values are immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskFunction {
    coefficients: Vec<Complex64>,
}

impl DiskFunction {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidInput("empty coefficient list".to_string()));
        }
        if let Some(k) = coefficients
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidInput(format!("non-finite coefficient c_{k}")));
        }
        Ok(Self { coefficients })
    }

    /// Polynomial with real coefficients `c_0, c_1, ...`.
    pub fn real_polynomial(coefficients: &[f64]) -> Self {
        Self {
            coefficients: if coefficients.is_empty() {
                vec![Complex64::new(0.0, 0.0)]
            } else {
                coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect()
            },
        }
    }

    pub fn zero() -> Self {
        Self::real_polynomial(&[0.0])
    }

    /// `f(z) = r z`.
    pub fn scaled_identity(r: f64) -> Self {
        Self::real_polynomial(&[0.0, r])
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, k: usize) -> Complex64 {
        self.coefficients.get(k).copied().unwrap_or_default()
    }

    /// Horner evaluation at any point (no domain check).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coefficients.len() <= 1 {
            return Self::zero();
        }
        Self {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Smallest power-of-two grid (at least 8) holding the spectrum with
    /// two-fold oversampling.
    pub fn natural_grid(&self) -> usize {
        (2 * self.coefficients.len()).next_power_of_two().max(8)
    }

    /// Values on the circle of radius `r` at the `n` grid angles.
    pub fn circle_values(&self, r: f64, n: usize) -> Result<Vec<Complex64>> {
        check_grid_size(n)?;
        if self.coefficients.len() > n {
            return Err(Error::InvalidInput(format!(
                "{} coefficients cannot be sampled on an {n}-point grid without aliasing",
                self.coefficients.len()
            )));
        }
        let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
        let mut rk = 1.0;
        for (k, &c) in self.coefficients.iter().enumerate() {
            spectrum[k] = c * rk;
            rk *= r;
        }
        Ok(idft(&spectrum))
    }

    /// Boundary trace `f(e^{i t_j})` on an `n`-point grid.
    pub fn trace(&self, n: usize) -> Result<BoundaryGrid> {
        BoundaryGrid::new(self.circle_values(1.0, n)?)
    }

    /// Analytic projection of a boundary trace: keeps the frequencies
    /// `0..n/2` and drops the rest.
    pub fn from_trace(grid: &BoundaryGrid) -> Self {
        let n = grid.len();
        let mut coefficients = grid.fourier_coefficients();
        coefficients.truncate(n / 2);
        Self { coefficients }
    }

    /// Largest coefficient modulus in the top quarter of the stored
    /// spectrum relative to the largest overall. Representations with fewer
    /// than eight coefficients count as exact.
    pub fn tail_ratio(&self) -> f64 {
        let len = self.coefficients.len().max(8);
        let start = 3 * len / 4;
        let peak = self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let tail = self
            .coefficients
            .iter()
            .skip(start)
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        tail / peak
    }

    pub fn is_resolved(&self) -> bool {
        self.tail_ratio() < RESOLVED_TAIL
    }

    pub fn truncated(&self, len: usize) -> Self {
        let mut coefficients = self.coefficients.clone();
        coefficients.truncate(len.max(1));
        Self { coefficients }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|&c| c * factor).collect(),
        }
    }

    /// `a·self + b·other`, padding the shorter spectrum with zeros.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let len = self.len().max(other.len());
        Self {
            coefficients: (0..len)
                .map(|k| self.coefficient(k) * a + other.coefficient(k) * b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(1.0, other, -1.0)
    }

    /// Shared grid size adequate for both operands.
    pub fn common_grid(&self, other: &Self) -> usize {
        self.natural_grid().max(other.natural_grid())
    }
}

/// Harmonic conjugate of real periodic data, normalized to zero mean.
///
/// Applies the multiplier `-i·sign(k)`; the mean and the Nyquist mode are
/// annihilated.
pub fn conjugate_periodic(data: &BoundaryGrid) -> Result<BoundaryGrid> {
    require_real(data)?;
    let n = data.len();
    let mut spectrum = data.fourier_coefficients();
    let minus_i = Complex64::new(0.0, -1.0);
    for (k, c) in spectrum.iter_mut().enumerate() {
        let freq = frequency(k, n);
        *c = if freq == 0 || freq == n as i64 / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *c * minus_i * (freq.signum() as f64)
        };
    }
    BoundaryGrid::from_real(idft(&spectrum).into_iter().map(|v| v.re).collect())
}

/// Schwarz integral of real boundary data: the analytic `F` with
/// `Re F = data` on the circle and `Im F(0) = 0`.
pub fn schwarz_integral(data: &BoundaryGrid) -> Result<DiskFunction> {
    require_real(data)?;
    let n = data.len();
    let spectrum = data.fourier_coefficients();
    let mut coefficients = Vec::with_capacity(n / 2);
    coefficients.push(Complex64::new(spectrum[0].re, 0.0));
    coefficients.extend(spectrum[1..n / 2].iter().map(|&c| c * 2.0));
    DiskFunction::new(coefficients)
}

/// Poisson integral of real boundary data evaluated at an interior point.
pub fn poisson_extend(data: &BoundaryGrid, z: Complex64) -> Result<f64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutOfDomain(z));
    }
    Ok(schwarz_integral(data)?.eval(z).re)
}

/// `G` with `G(0) = 0` and `G' = g`.
pub fn antiderivative(g: &DiskFunction) -> DiskFunction {
    let mut coefficients = Vec::with_capacity(g.len() + 1);
    coefficients.push(Complex64::new(0.0, 0.0));
    coefficients.extend(
        g.coefficients()
            .iter()
            .enumerate()
            .map(|(k, &c)| c / (k + 1) as f64),
    );
    DiskFunction { coefficients }
}

/// Trapezoidal value of `∫_0^{2π} |f − g|^p dt` on a grid fine enough for
/// both operands.
pub fn hp_boundary_distance(f: &DiskFunction, g: &DiskFunction, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::InvalidInput(format!("exponent p = {p} not in (0, 1/2)")));
    }
    for h in [f, g] {
        let tail = h.tail_ratio();
        if tail >= RESOLVED_TAIL {
            return Err(Error::Unresolved { tail });
        }
    }
    let n = f.common_grid(g);
    let diff = f.sub(g).trace(n)?;
    let h = 2.0 * PI / n as f64;
    Ok(h * diff.values().iter().map(|v| v.norm().powf(p)).sum::<f64>())
}

/// Spectral `d/dt` of real periodic data (Nyquist mode dropped).
pub fn periodic_derivative(data: &BoundaryGrid) -> Result<BoundaryGrid> {
    require_real(data)?;
    let n = data.len();
    let mut spectrum = data.fourier_coefficients();
    for (k, c) in spectrum.iter_mut().enumerate() {
        let freq = frequency(k, n);
        *c = if freq == n as i64 / 2 {
            Complex64::new(0.0, 0.0)
        } else {
            *c * Complex64::new(0.0, freq as f64)
        };
    }
    BoundaryGrid::from_real(idft(&spectrum).into_iter().map(|v| v.re).collect())
}

/// Centered-difference `d/dt` of real periodic data.
pub fn periodic_difference(data: &BoundaryGrid) -> Result<BoundaryGrid> {
    require_real(data)?;
    let n = data.len();
    let v = data.real_parts();
    let h = 2.0 * PI / n as f64;
    BoundaryGrid::from_real(
        (0..n)
            .map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * h))
            .collect(),
    )
}

/// Ratio of the largest Fourier mode modulus in the upper eighth of the
/// frequency band to the largest overall, for real periodic data.
pub fn periodic_tail_ratio(data: &BoundaryGrid) -> f64 {
    let n = data.len();
    let spectrum = data.fourier_coefficients();
    let peak = spectrum.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let tail = spectrum
        .iter()
        .enumerate()
        .filter(|(k, _)| frequency(*k, n).unsigned_abs() as usize >= 3 * n / 8)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    tail / peak
}
