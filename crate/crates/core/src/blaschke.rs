//! Finite Blaschke products normalized by `B(0) > 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{grid_node, BoundaryGrid};

const POLE_GUARD: f64 = 1e-14;

/// `B(z) = η Π (z − z_j)/(1 − conj(z_j) z)` with `|η| = 1` chosen so that
/// `B(0) > 0`. Zeros repeat to encode multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    eta: Complex64,
}

impl BlaschkeProduct {
    pub fn identity() -> Self {
        Self {
            zeros: Vec::new(),
            eta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn new(zeros: Vec<Complex64>) -> Result<Self> {
        for (i, z) in zeros.iter().enumerate() {
            let r = z.norm();
            if !r.is_finite() || r == 0.0 || r >= 1.0 {
                return Err(Error::InvalidInput(format!(
                    "zero #{i} = {z} must satisfy 0 < |z| < 1"
                )));
            }
        }
        if zeros.is_empty() {
            return Ok(Self::identity());
        }
        let u: Complex64 = zeros.iter().map(|&z| -z).product();
        let eta = u.conj() / u.norm();
        Ok(Self { zeros, eta })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// `B(0) = |Π z_j|`, exactly real and positive.
    pub fn value_at_origin(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).product()
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::OutOfDomain(z));
        }
        let mut value = self.eta;
        for &a in &self.zeros {
            let denom = Complex64::new(1.0, 0.0) - a.conj() * z;
            if denom.norm() < POLE_GUARD {
                return Err(Error::Degenerate(format!("pole of factor {a} near {z}")));
            }
            value *= (z - a) / denom;
        }
        Ok(value)
    }

    /// Logarithmic derivative `B'/B = Σ (1 − |a|²)/((z − a)(1 − conj(a) z))`
    /// multiplied back by `B`, i.e. `B'(z)`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if self.zeros.is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // Product rule over factors, avoiding division by B at its zeros.
        let factors: Vec<(Complex64, Complex64)> = self
            .zeros
            .iter()
            .map(|&a| {
                let denom = Complex64::new(1.0, 0.0) - a.conj() * z;
                if denom.norm() < POLE_GUARD {
                    return Err(Error::Degenerate(format!("pole of factor {a} near {z}")));
                }
                let value = (z - a) / denom;
                let slope = (1.0 - a.norm_sqr()) / (denom * denom);
                Ok((value, slope))
            })
            .collect::<Result<_>>()?;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..factors.len() {
            let mut term = factors[i].1;
            for (j, f) in factors.iter().enumerate() {
                if j != i {
                    term *= f.0;
                }
            }
            total += term;
        }
        Ok(self.eta * total)
    }

    /// `B(e^{i t_j})` on an `n`-point grid.
    pub fn trace(&self, n: usize) -> Result<BoundaryGrid> {
        let values = (0..n)
            .map(|j| self.eval(grid_node(j, n)))
            .collect::<Result<Vec<_>>>()?;
        BoundaryGrid::new(values)
    }

    pub fn derivative_trace(&self, n: usize) -> Result<BoundaryGrid> {
        let values = (0..n)
            .map(|j| self.derivative(grid_node(j, n)))
            .collect::<Result<Vec<_>>>()?;
        BoundaryGrid::new(values)
    }
}

impl Default for BlaschkeProduct {
    fn default() -> Self {
        Self::identity()
    }
}
