//! Report files: coefficient and boundary CSV, JSON, SVG.

use std::fmt::Write as _;
use std::path::Path;

use beurling::spectral::grid_angle;
use beurling::{DiskFunction, Error, Result, WeightField};
use num_complex::Complex64;
use serde::Serialize;

/// Coefficient CSV with header `k,re_ck,im_ck`. Missing indices are zero.
pub fn read_coefficients(path: &Path) -> Result<DiskFunction> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = ["k", "re_ck", "im_ck"];
    if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
        return Err(Error::Parse(format!(
            "{}: expected header k,re_ck,im_ck",
            path.display()
        )));
    }
    let mut coefficients = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").trim();
        let bad = || Error::Parse(format!("{}: bad row {}", path.display(), line + 2));
        let k: usize = field(0).parse().map_err(|_| bad())?;
        let re: f64 = field(1).parse().map_err(|_| bad())?;
        let im: f64 = field(2).parse().map_err(|_| bad())?;
        if coefficients.len() <= k {
            coefficients.resize(k + 1, Complex64::new(0.0, 0.0));
        }
        coefficients[k] = Complex64::new(re, im);
    }
    DiskFunction::new(coefficients)
}

pub fn write_coefficients(path: &Path, f: &DiskFunction) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["k", "re_ck", "im_ck"])?;
    for (k, c) in f.coefficients().iter().enumerate() {
        writer.write_record([k.to_string(), c.re.to_string(), c.im.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

/// Boundary trace `t,re_f,im_f,abs_fprime,phi` on an `n`-point grid.
pub fn write_boundary(path: &Path, f: &DiskFunction, field: &WeightField, n: usize) -> Result<()> {
    let values = f.trace(n)?;
    let slopes = f.derivative().trace(n)?;
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["t", "re_f", "im_f", "abs_fprime", "phi"])?;
    for j in 0..n {
        let t = grid_angle(j, n);
        let w = values.values()[j];
        let phi = field.evaluate(Complex64::from_polar(1.0, t), w)?;
        writer.write_record([
            t.to_string(),
            w.re.to_string(),
            w.im.to_string(),
            slopes.values()[j].norm().to_string(),
            phi.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Image curve `f(e^{it})` as an SVG polyline, with the origin marked.
pub fn image_svg(f: &DiskFunction, n: usize) -> Result<String> {
    let values = f.trace(n)?.into_values();
    let extent = values.iter().map(|v| v.re.abs().max(v.im.abs())).fold(1e-12, f64::max) * 1.1;
    let size = 512.0;
    let scale = size / (2.0 * extent);
    let point = |w: Complex64| ((w.re + extent) * scale, (extent - w.im) * scale);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" width="{size}" height="{size}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = write!(svg, r#"<polygon fill="none" stroke="navy" stroke-width="1" points=""#);
    for w in values {
        let (x, y) = point(w);
        let _ = write!(svg, "{x:.3},{y:.3} ");
    }
    let _ = writeln!(svg, r#""/>"#);
    let (x, y) = point(Complex64::new(0.0, 0.0));
    let _ = writeln!(svg, r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="crimson"/>"#);
    svg.push_str("</svg>\n");
    Ok(svg)
}
