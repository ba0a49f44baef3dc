//! Checks shared by the property suites and the acceptance target. Each
//! returns `Ok(detail)` on success and `Err(detail)` on failure.

use beurling::solver::{contraction_rate, is_univalent, representation_distance, residual};
use beurling::spectral::hp_boundary_distance;
use beurling::weight::{contraction_certificate, superharmonic_check};
use beurling::{solve, BlaschkeProduct, DiskFunction, InitialMap, SolveOptions};

use super::*;

pub type Outcome = Result<String, String>;

/// Solves with random smooth fields and zeros; on each converged solution,
/// and on a perturbation of it, the representation distance and the
/// residual must both be small or both be large.
pub fn representation_equivalence(cases: usize, seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut solved = 0;
    let mut attempts = 0;
    let mut worst_small: f64 = 0.0;
    let mut least_large = f64::INFINITY;
    while solved < cases {
        attempts += 1;
        if attempts > 3 * cases {
            return Err(format!("only {solved} of {attempts} solves converged"));
        }
        let field = bump_field(&mut r);
        let zeros = random_zeros(&mut r);
        let report = solve(&field, &zeros, &SolveOptions::default()).map_err(|e| e.to_string())?;
        if !report.converged {
            continue;
        }
        solved += 1;
        let blaschke = BlaschkeProduct::new(zeros).unwrap();
        let perturbed = report.f.combine(1.0, &DiskFunction::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1e-3, 0.0)]).unwrap(), 1.0);
        for (f, expect_small) in [(&report.f, true), (&perturbed, false)] {
            let n = report.grid.max(f.natural_grid());
            let rep = representation_distance(f, &field, &blaschke, n).map_err(|e| e.to_string())?;
            let res = residual(f, &field).map_err(|e| e.to_string())?;
            let small = rep <= 1e-8 && res <= 1e-8;
            let large = rep > 1e-6 && res > 1e-6;
            if !(small || large) {
                return Err(format!("mixed outcome: representation {rep:.3e}, residual {res:.3e}"));
            }
            if small != expect_small {
                return Err(format!("unexpected outcome: representation {rep:.3e}, residual {res:.3e}"));
            }
            if small {
                worst_small = worst_small.max(rep.max(res));
            } else {
                least_large = least_large.min(rep.min(res));
            }
        }
    }
    Ok(format!(
        "{solved} solves ({attempts} drawn): solutions <= {worst_small:.1e}, perturbations >= {least_large:.1e}"
    ))
}

/// Contraction suite over generated Lipschitz fields with `q < 0.5`.
pub fn contraction_suite(fields: usize, seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut used = 0;
    let mut lines = Vec::new();
    for _ in 0..20 * fields {
        if used == fields {
            break;
        }
        let (field, lipschitz) = wave_field(&mut r);
        let cert = contraction_certificate(&field, lipschitz).map_err(|e| e.to_string())?;
        if !(cert.valid && cert.q < 0.5) {
            continue;
        }
        used += 1;
        let report = contraction_rate(&field, &[], &SolveOptions::default(), &cert).map_err(|e| e.to_string())?;
        if report.max_disagreement > 1e-6 || report.observed_factor > cert.q + 0.05 {
            return Err(format!(
                "q = {:.3}: disagreement {:.2e}, observed factor {:.3}",
                cert.q, report.max_disagreement, report.observed_factor
            ));
        }
        lines.push(format!("q={:.3} obs={:.3}", cert.q, report.observed_factor));
    }
    if used < fields {
        return Err(format!("only {used} fields certified q < 0.5"));
    }
    Ok(lines.join(", "))
}

/// Superharmonic fields: three starts reach the same univalent limit.
pub fn superharmonic_uniqueness(fields: usize, seed: u64) -> Outcome {
    let mut r = rng(seed);
    let mut used = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..20 * fields {
        if used == fields {
            break;
        }
        let field = superharmonic_field(&mut r);
        if !superharmonic_check(&field).map_err(|e| e.to_string())?.pass {
            continue;
        }
        used += 1;
        let m = field.sup_bound();
        let mut limits = Vec::new();
        for start in [InitialMap::Zero, InitialMap::ScaledIdentity(0.25 * m), InitialMap::ScaledIdentity(m)] {
            let report = solve(&field, &[], &SolveOptions::default().with_initial(start)).map_err(|e| e.to_string())?;
            if !report.converged {
                return Err(format!("{}: solve did not converge", field.name()));
            }
            if !is_univalent(&report.f, report.grid).map_err(|e| e.to_string())? {
                return Err(format!("{}: limit is not univalent", field.name()));
            }
            limits.push(report.f);
        }
        for (i, a) in limits.iter().enumerate() {
            for b in &limits[i + 1..] {
                worst = worst.max(sup_distance(a, b));
            }
        }
        if worst > 1e-6 {
            return Err(format!("{}: limits differ by {worst:.3e}", field.name()));
        }
    }
    if used < fields {
        return Err(format!("only {used} fields passed the superharmonic check"));
    }
    Ok(format!("{used} fields, limits agree within {worst:.1e}"))
}

/// `f_n(z) = z + 2^{-n} z²` converges to `z`; its `H^p` boundary distance
/// is `2π·2^{-np}`. The parameter runs far enough to pass `1e-4`.
pub fn hp_family_convergence(p: f64) -> Outcome {
    let last = (24.0 / p).ceil() as i32;
    let limit = DiskFunction::scaled_identity(1.0);
    let mut previous = f64::INFINITY;
    let mut distances = Vec::new();
    for n in (0..=last).step_by(8) {
        let eps = 2f64.powi(-n);
        let f = DiskFunction::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(eps, 0.0)]).unwrap();
        let d = hp_boundary_distance(&f, &limit, p).map_err(|e| e.to_string())?;
        if d >= previous {
            return Err(format!("distance increased at n = {n}: {d:.3e} >= {previous:.3e}"));
        }
        previous = d;
        distances.push(d);
    }
    if previous >= 1e-4 {
        return Err(format!("final distance {previous:.3e} is not below 1e-4"));
    }
    Ok(format!("distances {:.2e} .. {:.2e}", distances[0], previous))
}
