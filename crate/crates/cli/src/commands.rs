use beurling::certify::{check_starlike, check_subsolution, check_supersolution, free_boundary_identity};
use beurling::regions::{
    build_spiral_family, extended_union, kernel_of_shrinking, reduced_intersection,
    schoenfliess_test, svg_overlay, RasterRegion,
};
use beurling::regularity::{second_derivative_herglotz, spectrum_report};
use beurling::solver::{radial_scan, residual};
use beurling::weight::{contraction_certificate, superharmonic_check, tepper_check};
use beurling::{solve, BlaschkeProduct, DiskFunction};
use serde_json::{json, Value};

use crate::config::{ConfigError, RunConfig};
use crate::output::{image_svg, read_coefficients, write_boundary, write_coefficients, write_json};

/// Outcome of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration or unreadable input: exit 2.
    Config(String),
    /// Solve or certificate failure: exit 1.
    Check(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

type Outcome = Result<(), Failure>;

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("cannot write output: {e}"))
}

fn prepare_out(config: &RunConfig) -> Result<std::path::PathBuf, Failure> {
    let out = config.out_dir();
    std::fs::create_dir_all(&out).map_err(io_failure)?;
    Ok(out)
}

fn load_map(config: &RunConfig) -> Result<DiskFunction, Failure> {
    let path = config.path("map")?;
    read_coefficients(&path).map_err(|e| Failure::Config(format!("map {}: {e}", path.display())))
}

pub fn cmd_solve(config: &RunConfig) -> Outcome {
    let field = config.weight()?;
    let zeros = config.zeros()?;
    let options = config.solve_options()?;
    let emit = config.emit()?;
    let out = prepare_out(config)?;
    let report = solve(&field, &zeros, &options).map_err(|e| Failure::Check(format!("solve failed: {e}")))?;

    if emit.json {
        let doc = json!({
            "command": "solve",
            "weight": field.name(),
            "sup_bound": field.sup_bound(),
            "options": {
                "grid": options.grid,
                "damping": options.damping,
                "max_iters": options.max_iters,
                "tol_update": options.tol_update,
                "tol_residual": options.tol_residual,
                "target": options.target,
                "max_grid": options.max_grid,
            },
            "report": report,
        });
        write_json(&out.join("report.json"), &doc).map_err(io_failure)?;
    }
    if emit.csv {
        write_coefficients(&out.join("coefficients.csv"), &report.f).map_err(io_failure)?;
        write_boundary(&out.join("boundary.csv"), &report.f, &field, report.grid).map_err(io_failure)?;
    }
    if emit.svg {
        let svg = image_svg(&report.f, report.grid).map_err(io_failure)?;
        std::fs::write(out.join("image.svg"), svg).map_err(io_failure)?;
    }
    println!(
        "solve: converged={} iterations={} grid={} residual={:.3e} f'(0)={:.12} univalent={}",
        report.converged,
        report.iterations,
        report.grid,
        report.residual_sup,
        report.f.coefficient(1).re,
        report.univalent
    );
    if report.converged {
        Ok(())
    } else {
        Err(Failure::Check(format!("not converged: {}", report.diagnostics.join("; "))))
    }
}

pub fn cmd_certify(config: &RunConfig) -> Outcome {
    let field = config.weight()?;
    let f = load_map(config)?;
    let out = prepare_out(config)?;
    let checks = config
        .get("checks")
        .unwrap_or("subsolution,supersolution,starlike,free_boundary")
        .to_string();
    let mut results = Vec::new();
    let mut all_pass = true;
    for check in checks.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let outcome = match check {
            "subsolution" => check_subsolution(&f, &field),
            "supersolution" => check_supersolution(&f, &field),
            "starlike" => check_starlike(&f),
            "free_boundary" => free_boundary_identity(&f, &field),
            other => return Err(Failure::Config(format!("checks: unknown certificate {other:?}"))),
        };
        let entry = match outcome {
            Ok(cert) => {
                println!("{check}: pass={} worst_margin={:.3e}", cert.pass, cert.worst_margin);
                all_pass &= cert.pass;
                json!({ "check": check, "certificate": cert })
            }
            Err(e) => {
                println!("{check}: rejected ({e})");
                all_pass = false;
                json!({ "check": check, "error": e.to_string() })
            }
        };
        results.push(entry);
    }
    let residual = residual(&f, &field).ok();
    let doc = json!({
        "command": "certify",
        "weight": field.name(),
        "residual": residual,
        "results": results,
    });
    if config.emit()?.json {
        write_json(&out.join("certificates.json"), &doc).map_err(io_failure)?;
    }
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Check("at least one certificate failed".to_string()))
    }
}

pub fn cmd_scan(config: &RunConfig) -> Outcome {
    let field = config.weight()?;
    let out = prepare_out(config)?;
    let m = field.sup_bound();
    let r_min = config.f64_or("r_min", 0.1)?;
    let r_max = config.f64_or("r_max", 1.2 * m)?;
    let steps = config.usize_or("steps", 10_000)?;
    let as_value = |r: beurling::Result<Value>| r.unwrap_or_else(|e| json!({ "error": e.to_string() }));

    let intervals = radial_scan(&field, r_min, r_max, steps);
    if let Ok(list) = &intervals {
        for i in list {
            println!("radial solutions: [{:.9}, {:.9}]", i.lo, i.hi);
        }
    }
    let tepper = tepper_check(&field, false);
    let strict = tepper_check(&field, true);
    let superharmonic = superharmonic_check(&field);
    let contraction = match config.optional_f64("lipschitz")? {
        Some(l) => as_value(contraction_certificate(&field, l).map(|c| json!(c))),
        None => Value::Null,
    };
    if let Ok(t) = &tepper {
        println!("tepper: pass={} worst_margin={:.3e}", t.pass, t.worst_margin);
    }
    if let Ok(s) = &superharmonic {
        println!("superharmonic: pass={} worst_laplacian={:.3e}", s.pass, s.worst_laplacian);
    }
    let doc = json!({
        "command": "scan",
        "weight": field.name(),
        "sup_bound": m,
        "range": [r_min, r_max],
        "steps": steps,
        "radial_solutions": as_value(intervals.map(|v| json!(v))),
        "tepper": as_value(tepper.map(|v| json!(v))),
        "tepper_strict": as_value(strict.map(|v| json!(v))),
        "superharmonic": as_value(superharmonic.map(|v| json!(v))),
        "contraction": contraction,
    });
    if config.emit()?.json {
        write_json(&out.join("scan.json"), &doc).map_err(io_failure)?;
    }
    Ok(())
}

fn load_region(config: &RunConfig, key: &str) -> Result<RasterRegion, Failure> {
    let path = config.path(key)?;
    RasterRegion::load(&path).map_err(|e| Failure::Config(format!("{key} {}: {e}", path.display())))
}

fn region_summary(r: &RasterRegion) -> Value {
    json!({
        "cells": r.count(),
        "simply_connected": r.is_simply_connected(),
        "holes": r.hole_count(),
        "basepoint": [r.basepoint().0, r.basepoint().1],
    })
}

pub fn cmd_geometry(config: &RunConfig) -> Outcome {
    let out = prepare_out(config)?;
    let emit = config.emit()?;
    let mode = config.get("mode").unwrap_or("spiral");
    let geometry_error = |e: beurling::Error| Failure::Check(format!("{mode}: {e}"));
    let doc = match mode {
        "spiral" => {
            let levels = config.usize_or("levels", 3)?;
            let size = config.usize_or("grid_size", 512)?;
            let family = build_spiral_family(levels, size).map_err(|e| Failure::Config(e.to_string()))?;
            let kernel = kernel_of_shrinking(&family).map_err(geometry_error)?;
            let report = schoenfliess_test(&kernel);
            println!(
                "spiral: {} levels, kernel {} cells, schoenfliess={}",
                family.len(),
                kernel.count(),
                report.is_schoenfliess
            );
            if emit.svg {
                const COLORS: [&str; 3] = ["#1f4fd8", "#d81f2a", "#1f9d3a"];
                let layers: Vec<(&RasterRegion, &str)> = family
                    .iter()
                    .enumerate()
                    .map(|(i, d)| (d, COLORS[i % COLORS.len()]))
                    .collect();
                std::fs::write(out.join("spiral.svg"), svg_overlay(&layers)).map_err(io_failure)?;
                std::fs::write(out.join("kernel.svg"), svg_overlay(&[(&kernel, "#555555")]))
                    .map_err(io_failure)?;
            }
            for (i, d) in family.iter().enumerate() {
                d.save(&out.join(format!("level{}.pbm", i + 1))).map_err(io_failure)?;
            }
            kernel.save(&out.join("kernel.pbm")).map_err(io_failure)?;
            json!({
                "mode": mode,
                "levels": family.iter().map(region_summary).collect::<Vec<_>>(),
                "kernel": region_summary(&kernel),
                "kernel_schoenfliess": report,
            })
        }
        "union" | "intersection" => {
            let a = load_region(config, "region_a")?;
            let b = load_region(config, "region_b")?;
            let result = if mode == "union" {
                extended_union(&a, &b)
            } else {
                reduced_intersection(&a, &b)
            }
            .map_err(geometry_error)?;
            result.save(&out.join(format!("{mode}.pbm"))).map_err(io_failure)?;
            if emit.svg {
                let svg = svg_overlay(&[(&result, "#999999"), (&a, "#1f4fd8"), (&b, "#d81f2a")]);
                std::fs::write(out.join(format!("{mode}.svg")), svg).map_err(io_failure)?;
            }
            println!("{mode}: {} cells", result.count());
            json!({ "mode": mode, "result": region_summary(&result) })
        }
        "schoenfliess" => {
            let a = load_region(config, "region_a")?;
            let report = schoenfliess_test(&a);
            println!("schoenfliess={}", report.is_schoenfliess);
            json!({ "mode": mode, "region": region_summary(&a), "schoenfliess": report })
        }
        other => return Err(Failure::Config(format!("mode: unknown geometry mode {other:?}"))),
    };
    if emit.json {
        write_json(&out.join("geometry.json"), &doc).map_err(io_failure)?;
    }
    Ok(())
}

pub fn cmd_spectrum(config: &RunConfig) -> Outcome {
    let field = config.weight()?;
    let zeros = config.zeros()?;
    let out = prepare_out(config)?;
    let f = if config.get("map").is_some() {
        load_map(config)?
    } else {
        let options = config.solve_options()?;
        let report = solve(&field, &zeros, &options).map_err(|e| Failure::Check(format!("solve failed: {e}")))?;
        if !report.converged {
            return Err(Failure::Check("solve did not converge".to_string()));
        }
        report.f
    };
    let spectrum = spectrum_report(&f).map_err(|e| Failure::Check(e.to_string()))?;
    println!("spectrum: {:?} rate={:.6} ({})", spectrum.decay_kind, spectrum.rate, spectrum.smoothness_claim);
    let blaschke = BlaschkeProduct::new(zeros).map_err(|e| Failure::Config(e.to_string()))?;
    let herglotz = second_derivative_herglotz(&f, &field, &blaschke);
    let herglotz_value = match &herglotz {
        Ok(h) => {
            println!("herglotz f'': distance={:.3e} tolerance={:.3e}", h.distance, h.tolerance);
            json!({ "distance": h.distance, "tolerance": h.tolerance, "spectral_tangent": h.spectral_tangent })
        }
        Err(e) => {
            println!("herglotz f'': {e}");
            json!({ "error": e.to_string() })
        }
    };
    if config.emit()?.json {
        let doc = json!({
            "command": "spectrum",
            "weight": field.name(),
            "spectrum": spectrum,
            "herglotz": herglotz_value,
        });
        write_json(&out.join("spectrum.json"), &doc).map_err(io_failure)?;
    }
    herglotz.map(|_| ()).map_err(|e| Failure::Check(e.to_string()))
}
