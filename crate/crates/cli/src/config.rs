//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use beurling::{InitialMap, SolveOptions, Target, WeightField};
use num_complex::Complex64;

/// Keys accepted in config files and `--set` overrides, with their meaning.
pub const KEYS: &[(&str, &str)] = &[
    ("weight", "benchmark | constant | analytic | csv (default benchmark)"),
    ("weight_value", "value of the constant weight (default 1)"),
    ("weight_csv", "path of a tabulated weight (header r,theta,phi or x,y,phi)"),
    ("weight_scale", "positive multiplier applied to the weight (default 1)"),
    ("zeros", "critical points as 're,im; re,im; ...' (default none)"),
    ("grid", "initial grid size, a power of two (default 512)"),
    ("damping", "relaxation parameter in (0, 1] (default 0.5)"),
    ("max_iters", "iteration cap (default 2000)"),
    ("tol_update", "sup norm of the last update (default 1e-12)"),
    ("tol_residual", "boundary residual bound (default 1e-9)"),
    ("max_grid", "largest grid for resolution doubling (default 32768)"),
    ("init", "zero | scaled:R | file:PATH (default scaled:M/2)"),
    ("target", "nearest | maximal (default nearest)"),
    ("map", "coefficient CSV (k,re_ck,im_ck) for certify and spectrum"),
    ("checks", "certificates: subsolution,supersolution,starlike,free_boundary"),
    ("r_min", "radial scan lower end (default 0.1)"),
    ("r_max", "radial scan upper end (default 1.2 M)"),
    ("steps", "radial scan steps (default 10000)"),
    ("lipschitz", "Lipschitz constant for the contraction certificate"),
    ("mode", "geometry: spiral | union | intersection | schoenfliess"),
    ("region_a", "first PBM region (sidecar JSON next to it)"),
    ("region_b", "second PBM region"),
    ("levels", "spiral levels (default 3)"),
    ("grid_size", "spiral raster size (default 512)"),
    ("out", "output directory (default .)"),
    ("emit", "outputs among csv,svg,json (default csv,json)"),
];

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

fn err<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    /// Directory relative paths in the file are resolved against.
    base: PathBuf,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Emit {
    pub csv: bool,
    pub svg: bool,
    pub json: bool,
}

impl RunConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut config = Self {
            values: BTreeMap::new(),
            base: base.to_path_buf(),
        };
        for (number, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", number + 1));
            };
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return err(format!("unknown key {key:?}"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError(format!("{key}: cannot parse {v:?}"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.number(key)?.unwrap_or(default))
    }

    pub fn optional_f64(&self, key: &str) -> Result<Option<f64>> {
        self.number(key)
    }

    pub fn path(&self, key: &str) -> Result<PathBuf> {
        match self.get(key) {
            Some(p) => Ok(self.base.join(p)),
            None => err(format!("missing key {key:?}")),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.get("out").map_or_else(|| PathBuf::from("."), PathBuf::from)
    }

    pub fn emit(&self) -> Result<Emit> {
        let spec = self.get("emit").unwrap_or("csv,json");
        let mut emit = Emit::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "csv" => emit.csv = true,
                "svg" => emit.svg = true,
                "json" => emit.json = true,
                other => return err(format!("emit: unknown output {other:?}")),
            }
        }
        Ok(emit)
    }

    pub fn weight(&self) -> Result<WeightField> {
        let field = match self.get("weight").unwrap_or("benchmark") {
            "benchmark" => WeightField::benchmark(),
            "constant" => WeightField::constant(self.f64_or("weight_value", 1.0)?)
                .map_err(|e| ConfigError(format!("weight: {e}")))?,
            "analytic" => analytic_weight(),
            "csv" => WeightField::from_csv(self.path("weight_csv")?)
                .map_err(|e| ConfigError(format!("weight_csv: {e}")))?,
            other => return err(format!("weight: unknown family {other:?}")),
        };
        match self.optional_f64("weight_scale")? {
            None => Ok(field),
            Some(s) => field.scaled(s).map_err(|e| ConfigError(format!("weight_scale: {e}"))),
        }
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        parse_zeros(self.get("zeros").unwrap_or(""))
    }

    pub fn solve_options(&self) -> Result<SolveOptions> {
        let defaults = SolveOptions::default();
        let initial_map = match self.get("init") {
            None => None,
            Some("zero") => Some(InitialMap::Zero),
            Some(v) if v.starts_with("scaled:") => {
                let r = v["scaled:".len()..]
                    .trim()
                    .parse()
                    .map_err(|_| ConfigError(format!("init: bad radius in {v:?}")))?;
                Some(InitialMap::ScaledIdentity(r))
            }
            Some(v) if v.starts_with("file:") => {
                let path = self.base.join(v["file:".len()..].trim());
                let f = crate::output::read_coefficients(&path)
                    .map_err(|e| ConfigError(format!("init: {e}")))?;
                Some(InitialMap::Explicit(f))
            }
            Some(v) => return err(format!("init: expected zero, scaled:R or file:PATH, got {v:?}")),
        };
        let target = match self.get("target").unwrap_or("nearest") {
            "nearest" => Target::Nearest,
            "maximal" => Target::Maximal,
            other => return err(format!("target: unknown value {other:?}")),
        };
        let options = SolveOptions {
            grid: self.usize_or("grid", defaults.grid)?,
            damping: self.f64_or("damping", defaults.damping)?,
            max_iters: self.usize_or("max_iters", defaults.max_iters)?,
            tol_update: self.f64_or("tol_update", defaults.tol_update)?,
            tol_residual: self.f64_or("tol_residual", defaults.tol_residual)?,
            initial_map,
            target,
            max_grid: self.usize_or("max_grid", defaults.max_grid)?,
            require_resolved: defaults.require_resolved,
        };
        options.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(options)
    }
}

/// `Φ(w) = 2 + cos(Re w)·exp(−|w|²)`, real analytic with `1 ≤ Φ ≤ 3`.
pub fn analytic_weight() -> WeightField {
    WeightField::from_fn("analytic", 3.0, |w| 2.0 + w.re.cos() * (-w.norm_sqr()).exp())
        .expect("analytic weight is valid")
}

pub fn parse_zeros(text: &str) -> Result<Vec<Complex64>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (re, im) = pair.split_once(',').unwrap_or((pair, "0"));
            match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
                _ => err(format!("zeros: cannot parse {pair:?}")),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let c = RunConfig::parse("# comment\nweight = constant\nweight_value = 2.5\nzeros = -0.5, 0; 0.1,0.2\n", Path::new(".")).unwrap();
        assert_eq!(c.weight().unwrap().sup_bound(), 2.5);
        assert_eq!(c.zeros().unwrap(), vec![Complex64::new(-0.5, 0.0), Complex64::new(0.1, 0.2)]);
        assert!(RunConfig::parse("colour = red\n", Path::new(".")).is_err());
        assert!(RunConfig::parse("grid 512\n", Path::new(".")).is_err());
    }

    #[test]
    fn solve_options_are_validated() {
        let c = RunConfig::parse("init = scaled:5.5\ntarget = maximal\n", Path::new(".")).unwrap();
        let o = c.solve_options().unwrap();
        assert_eq!(o.target, Target::Maximal);
        assert!(matches!(o.initial_map, Some(InitialMap::ScaledIdentity(r)) if r == 5.5));
        let c = RunConfig::parse("damping = 1.5\n", Path::new(".")).unwrap();
        assert!(c.solve_options().is_err());
        let c = RunConfig::parse("emit = csv,pdf\n", Path::new(".")).unwrap();
        assert!(c.emit().is_err());
    }
}
