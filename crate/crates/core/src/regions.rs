//! Planar domains on a raster: extended union, reduced intersection,
//! Schoenfliess test and kernels of shrinking sequences.
//!
//! Regions are 4-connected and complements 8-connected, the usual digital
//! topology pairing. Closure is dilation by one cell (3×3 square) and
//! interior is erosion by one cell. Every region keeps a one-cell empty
//! margin, so the unbounded complement component is the one touching the
//! border.
//!
//! Cell `(x, y)` has its center at `origin + ((x + ½)·h, (y + ½)·h)`; row `y`
//! is line `y` of a PBM image.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const N4: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const N8: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// Plain bitmask with flood fills and morphology.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    fn filled(width: usize, height: usize, value: bool) -> Self {
        Self {
            width,
            height,
            bits: vec![value; width * height],
        }
    }

    #[inline]
    fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    fn zip(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    fn is_subset_of(&self, other: &Self) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    fn morph(&self, keep: impl Fn(&[bool]) -> bool) -> Self {
        let mut bits = vec![false; self.bits.len()];
        let mut window = [false; 9];
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                let mut i = 0;
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        window[i] = self.get(x + dx, y + dy);
                        i += 1;
                    }
                }
                bits[y as usize * self.width + x as usize] = keep(&window);
            }
        }
        Self {
            width: self.width,
            height: self.height,
            bits,
        }
    }

    fn dilate(&self) -> Self {
        self.morph(|w| w.iter().any(|&b| b))
    }

    fn erode(&self) -> Self {
        self.morph(|w| w.iter().all(|&b| b))
    }

    /// Component labels of the set cells; `None` for unset cells.
    fn labels(&self, neighbors: &[(i64, i64)]) -> (Vec<Option<usize>>, usize) {
        let mut labels = vec![None; self.bits.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || labels[start].is_some() {
                continue;
            }
            labels[start] = Some(count);
            queue.push_back(start);
            while let Some(i) = queue.pop_front() {
                let (x, y) = ((i % self.width) as i64, (i / self.width) as i64);
                for &(dx, dy) in neighbors {
                    let (nx, ny) = (x + dx, y + dy);
                    if self.get(nx, ny) {
                        let j = ny as usize * self.width + nx as usize;
                        if labels[j].is_none() {
                            labels[j] = Some(count);
                            queue.push_back(j);
                        }
                    }
                }
            }
            count += 1;
        }
        (labels, count)
    }

    /// 4-connected component containing `(x, y)` (empty when unset).
    fn component4(&self, x: usize, y: usize) -> Self {
        let mut out = Self::filled(self.width, self.height, false);
        if !self.get(x as i64, y as i64) {
            return out;
        }
        let mut queue = VecDeque::from([(x as i64, y as i64)]);
        out.bits[y * self.width + x] = true;
        while let Some((cx, cy)) = queue.pop_front() {
            for &(dx, dy) in &N4 {
                let (nx, ny) = (cx + dx, cy + dy);
                if self.get(nx, ny) && !out.get(nx, ny) {
                    out.bits[ny as usize * self.width + nx as usize] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        out
    }

    /// Unset cells 8-connected to the grid border (border cells included).
    fn outside(&self) -> Self {
        let empty = self.complement();
        let mut out = Self::filled(self.width, self.height, false);
        let mut queue = VecDeque::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let border = x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height;
                if border && empty.bits[y * self.width + x] {
                    out.bits[y * self.width + x] = true;
                    queue.push_back((x as i64, y as i64));
                }
            }
        }
        while let Some((cx, cy)) = queue.pop_front() {
            for &(dx, dy) in &N8 {
                let (nx, ny) = (cx + dx, cy + dy);
                if empty.get(nx, ny) && !out.get(nx, ny) {
                    out.bits[ny as usize * self.width + nx as usize] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        out
    }

    /// Set cells with an unset 8-neighbor.
    fn boundary(&self) -> Self {
        let mut out = Self::filled(self.width, self.height, false);
        for y in 0..self.height as i64 {
            for x in 0..self.width as i64 {
                if self.get(x, y) && N8.iter().any(|&(dx, dy)| !self.get(x + dx, y + dy)) {
                    out.bits[y as usize * self.width + x as usize] = true;
                }
            }
        }
        out
    }

    fn has_border_cells(&self) -> bool {
        (0..self.width).any(|x| self.bits[x] || self.bits[(self.height - 1) * self.width + x])
            || (0..self.height)
                .any(|y| self.bits[y * self.width] || self.bits[y * self.width + self.width - 1])
    }
}

/// Placement of a raster in the plane, stored next to PBM files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMeta {
    pub width: usize,
    pub height: usize,
    pub origin: [f64; 2],
    pub cell_size: f64,
    pub basepoint: [usize; 2],
}

/// Domain on a `W×H` raster with a marked basepoint cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterRegion {
    mask: Mask,
    origin: [f64; 2],
    cell_size: f64,
    basepoint: (usize, usize),
}

impl RasterRegion {
    /// Validates the margin and basepoint. Connectivity is checked separately
    /// by [`RasterRegion::validate_domain`].
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<bool>,
        origin: [f64; 2],
        cell_size: f64,
        basepoint: (usize, usize),
    ) -> Result<Self> {
        if width < 3 || height < 3 || cells.len() != width * height {
            return Err(Error::InvalidInput(format!(
                "raster {width}x{height} needs {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidInput(format!("cell size {cell_size} must be positive")));
        }
        let region = Self {
            mask: Mask {
                width,
                height,
                bits: cells,
            },
            origin,
            cell_size,
            basepoint,
        };
        if region.mask.has_border_cells() {
            return Err(Error::InvalidInput("set cells touch the one-cell margin".to_string()));
        }
        if !region.get(basepoint.0, basepoint.1) {
            return Err(Error::InvalidInput(format!(
                "basepoint ({}, {}) is not a set cell",
                basepoint.0, basepoint.1
            )));
        }
        Ok(region)
    }

    /// Region of cells `(x, y)` with `inside(x, y)`, unit cells at the origin.
    pub fn from_fn(
        width: usize,
        height: usize,
        basepoint: (usize, usize),
        inside: impl Fn(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                cells.push(inside(x, y));
            }
        }
        Self::new(width, height, cells, [0.0, 0.0], 1.0, basepoint)
    }

    fn with_mask(&self, mask: Mask) -> Result<Self> {
        Self::new(mask.width, mask.height, mask.bits, self.origin, self.cell_size, self.basepoint)
    }

    pub fn width(&self) -> usize {
        self.mask.width
    }

    pub fn height(&self) -> usize {
        self.mask.height
    }

    pub fn basepoint(&self) -> (usize, usize) {
        self.basepoint
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn meta(&self) -> RegionMeta {
        RegionMeta {
            width: self.width(),
            height: self.height(),
            origin: self.origin,
            cell_size: self.cell_size,
            basepoint: [self.basepoint.0, self.basepoint.1],
        }
    }

    pub fn cells(&self) -> &[bool] {
        &self.mask.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.mask.get(x as i64, y as i64)
    }

    pub fn count(&self) -> usize {
        self.mask.count()
    }

    pub fn cell_center(&self, x: usize, y: usize) -> [f64; 2] {
        [
            self.origin[0] + (x as f64 + 0.5) * self.cell_size,
            self.origin[1] + (y as f64 + 0.5) * self.cell_size,
        ]
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask.is_subset_of(&other.mask)
    }

    /// All set cells are 4-connected to the basepoint.
    pub fn is_connected(&self) -> bool {
        self.mask.component4(self.basepoint.0, self.basepoint.1).count() == self.count()
    }

    /// Number of bounded 8-connected components of the complement.
    pub fn hole_count(&self) -> usize {
        self.mask.complement().labels(&N8).1.saturating_sub(1)
    }

    pub fn is_simply_connected(&self) -> bool {
        self.is_connected() && self.hole_count() == 0
    }

    pub fn validate_domain(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::InvalidInput("region is not 4-connected".to_string()));
        }
        Ok(())
    }

    /// Set cells with an unset 8-neighbor, as `(x, y)` pairs.
    pub fn boundary_cells(&self) -> Vec<(usize, usize)> {
        let b = self.mask.boundary();
        (0..b.bits.len())
            .filter(|&i| b.bits[i])
            .map(|i| (i % b.width, i / b.width))
            .collect()
    }

    /// The region with all holes filled.
    pub fn filled(&self) -> Self {
        let mask = self.mask.outside().complement();
        Self {
            mask,
            ..self.clone()
        }
    }

    /// One-cell dilation, clipped to keep the margin empty.
    pub fn dilated(&self) -> Self {
        let mut mask = self.mask.dilate();
        let (w, h) = (mask.width, mask.height);
        for y in 0..h {
            for x in 0..w {
                if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                    mask.bits[y * w + x] = false;
                }
            }
        }
        Self {
            mask,
            ..self.clone()
        }
    }

    /// One-cell erosion; fails when the basepoint does not survive.
    pub fn eroded(&self) -> Result<Self> {
        self.with_mask(self.mask.erode())
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.width() != other.width()
            || self.height() != other.height()
            || self.origin != other.origin
            || self.cell_size != other.cell_size
        {
            return Err(Error::InvalidInput("regions live on different rasters".to_string()));
        }
        if self.basepoint != other.basepoint {
            return Err(Error::InvalidInput(format!(
                "basepoint mismatch: {:?} vs {:?}",
                self.basepoint, other.basepoint
            )));
        }
        Ok(())
    }

    pub fn write_pbm(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "P4\n{} {}", self.width(), self.height())?;
        let stride = self.width().div_ceil(8);
        let mut row = vec![0u8; stride];
        for y in 0..self.height() {
            row.iter_mut().for_each(|b| *b = 0);
            for x in 0..self.width() {
                if self.get(x, y) {
                    row[x / 8] |= 0x80 >> (x % 8);
                }
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    /// Reads a plain (P1) or raw (P4) bitmap; black (1) cells are set.
    pub fn read_pbm(input: &mut impl BufRead, meta: &RegionMeta) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut token = |bytes: &[u8]| -> Result<String> {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Parse("truncated PBM header".to_string()));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        let magic = token(&bytes)?;
        let parse = |s: String| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad PBM dimension {s:?}")))
        };
        let width = parse(token(&bytes)?)?;
        let height = parse(token(&bytes)?)?;
        if width != meta.width || height != meta.height {
            return Err(Error::Parse(format!(
                "PBM is {width}x{height} but sidecar says {}x{}",
                meta.width, meta.height
            )));
        }
        let mut cells = Vec::with_capacity(width * height);
        match magic.as_str() {
            "P1" => {
                while cells.len() < width * height {
                    while pos < bytes.len() && (bytes[pos].is_ascii_whitespace()) {
                        pos += 1;
                    }
                    match bytes.get(pos) {
                        Some(b'0') => cells.push(false),
                        Some(b'1') => cells.push(true),
                        Some(b'#') => {
                            while pos < bytes.len() && bytes[pos] != b'\n' {
                                pos += 1;
                            }
                            continue;
                        }
                        _ => return Err(Error::Parse("truncated or invalid P1 data".to_string())),
                    }
                    pos += 1;
                }
            }
            "P4" => {
                pos += 1;
                let stride = width.div_ceil(8);
                let data = bytes
                    .get(pos..pos + stride * height)
                    .ok_or_else(|| Error::Parse("truncated P4 data".to_string()))?;
                for y in 0..height {
                    for x in 0..width {
                        cells.push(data[y * stride + x / 8] & (0x80 >> (x % 8)) != 0);
                    }
                }
            }
            other => return Err(Error::Parse(format!("unsupported bitmap format {other:?}"))),
        }
        Self::new(
            width,
            height,
            cells,
            meta.origin,
            meta.cell_size,
            (meta.basepoint[0], meta.basepoint[1]),
        )
    }

    /// Writes `path` (PBM) and `path` with extension `.json` (placement).
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_pbm(&mut file)?;
        file.flush()?;
        std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&self.meta())?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let meta: RegionMeta = serde_json::from_str(&std::fs::read_to_string(path.with_extension("json"))?)?;
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_pbm(&mut file, &meta)
    }
}

/// Smallest simply connected region containing both: the union with every
/// bounded complement component filled in.
pub fn extended_union(d1: &RasterRegion, d2: &RasterRegion) -> Result<RasterRegion> {
    d1.compatible(d2)?;
    let union = d1.mask.zip(&d2.mask, |a, b| a || b);
    d1.with_mask(union.outside().complement())
}

/// Component of the intersection containing the basepoint.
pub fn reduced_intersection(d1: &RasterRegion, d2: &RasterRegion) -> Result<RasterRegion> {
    d1.compatible(d2)?;
    let meet = d1.mask.zip(&d2.mask, |a, b| a && b);
    let (x, y) = d1.basepoint;
    if !meet.get(x as i64, y as i64) {
        return Err(Error::EmptyResult("basepoint is not in the intersection".to_string()));
    }
    d1.with_mask(meet.component4(x, y))
}

#[derive(Debug, Clone, Serialize)]
pub struct SchoenfliessReport {
    pub is_schoenfliess: bool,
    /// 8-connected components of the complement of the closure.
    pub complement_components: usize,
    /// Cells of `closure ∖ D` not adjacent to the unbounded complement.
    pub unexposed_boundary_cells: usize,
    pub closure_cells: usize,
}

/// `Ω` = complement of the one-cell dilation must be connected and every
/// cell of `closure ∖ D` must touch `Ω`.
pub fn schoenfliess_test(d: &RasterRegion) -> SchoenfliessReport {
    let closure = d.mask.dilate();
    let omega = closure.complement();
    let components = omega.labels(&N8).1;
    let mut unexposed = 0;
    for y in 0..closure.height as i64 {
        for x in 0..closure.width as i64 {
            if closure.get(x, y)
                && !d.mask.get(x, y)
                && !N8.iter().any(|&(dx, dy)| omega.get(x + dx, y + dy))
            {
                unexposed += 1;
            }
        }
    }
    SchoenfliessReport {
        is_schoenfliess: components == 1 && unexposed == 0,
        complement_components: components,
        unexposed_boundary_cells: unexposed,
        closure_cells: closure.count(),
    }
}

/// Basepoint component of the interior of `∩ D_n`, after checking that each
/// dilated successor lies in its predecessor.
pub fn kernel_of_shrinking(sequence: &[RasterRegion]) -> Result<RasterRegion> {
    let first = sequence
        .first()
        .ok_or_else(|| Error::InvalidInput("empty region sequence".to_string()))?;
    for (i, d) in sequence.iter().enumerate().skip(1) {
        first.compatible(d).map_err(|e| Error::InvalidSequence {
            index: i,
            reason: e.to_string(),
        })?;
        if !d.mask.dilate().is_subset_of(&sequence[i - 1].mask) {
            return Err(Error::InvalidSequence {
                index: i,
                reason: "closure is not contained in the previous region".to_string(),
            });
        }
    }
    let meet = sequence
        .iter()
        .skip(1)
        .fold(first.mask.clone(), |acc, d| acc.zip(&d.mask, |a, b| a && b));
    let interior = meet.erode();
    let (x, y) = first.basepoint;
    if !interior.get(x as i64, y as i64) {
        return Err(Error::EmptyResult("basepoint is not interior to the intersection".to_string()));
    }
    first.with_mask(interior.component4(x, y))
}

/// Chebyshev distance from each cell to the nearest unset cell (0 on unset
/// cells), by two-pass chamfer propagation.
fn chessboard_distance(mask: &Mask) -> Vec<usize> {
    let (w, h) = (mask.width, mask.height);
    let big = w + h;
    let mut d: Vec<usize> = mask.bits.iter().map(|&b| if b { big } else { 0 }).collect();
    let at = |x: i64, y: i64, d: &[usize]| {
        if x < 0 || y < 0 || x as usize >= w || y as usize >= h {
            0
        } else {
            d[y as usize * w + x as usize]
        }
    };
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let m = [(-1, 0), (-1, -1), (0, -1), (1, -1)]
                .iter()
                .map(|&(dx, dy)| at(x + dx, y + dy, &d))
                .min()
                .unwrap_or(0);
            d[i] = d[i].min(m + 1);
        }
    }
    for y in (0..h as i64).rev() {
        for x in (0..w as i64).rev() {
            let i = y as usize * w + x as usize;
            if d[i] == 0 {
                continue;
            }
            let m = [(1, 0), (1, 1), (0, 1), (-1, 1)]
                .iter()
                .map(|&(dx, dy)| at(x + dx, y + dy, &d))
                .min()
                .unwrap_or(0);
            d[i] = d[i].min(m + 1);
        }
    }
    d
}

/// Nested domains modelled on the shrinking-spiral counterexample.
///
/// The outermost domain is a disk with an inner disk and a two-turn
/// Archimedean spiral wall removed; the wall joins the inner disk to the
/// outside, so what remains is a simply connected corridor winding around
/// the inner disk. Level `k` keeps the cells at chessboard distance `≥ k`
/// from the removed set, so each level strictly contains the closure of the
/// next and the corridor narrows by two cells per level.
pub fn build_spiral_family(n_levels: usize, grid_size: usize) -> Result<Vec<RasterRegion>> {
    if n_levels < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 levels, got {n_levels}")));
    }
    if grid_size < 256 {
        return Err(Error::InvalidInput(format!("grid size {grid_size} is below 256")));
    }
    let g = grid_size as f64;
    let center = g / 2.0;
    let inner = 0.12 * g;
    let outer = 0.45 * g;
    let turns = 2.0;
    let pitch = (outer - inner) / turns;
    let wall = 1.5;
    let spiral_end = 2.0 * std::f64::consts::PI * turns;
    let slope = pitch / (2.0 * std::f64::consts::PI);

    let on_wall = |r: f64, theta: f64| {
        (0..=turns as i64 + 1).any(|m| {
            let s = theta + 2.0 * std::f64::consts::PI * m as f64;
            s <= spiral_end && (r - (inner + slope * s)).abs() <= wall
        })
    };
    let base = Mask {
        width: grid_size,
        height: grid_size,
        bits: (0..grid_size * grid_size)
            .map(|i| {
                let dx = (i % grid_size) as f64 + 0.5 - center;
                let dy = (i / grid_size) as f64 + 0.5 - center;
                let r = dx.hypot(dy);
                let theta = dy.atan2(dx).rem_euclid(2.0 * std::f64::consts::PI);
                r > inner && r < outer && !on_wall(r, theta)
            })
            .collect(),
    };
    let distance = chessboard_distance(&base);

    // Basepoint: deepest cell of the outer turn along the positive x-axis.
    let y0 = grid_size / 2;
    let x0 = (grid_size / 2..grid_size)
        .filter(|&x| {
            let r = x as f64 + 0.5 - center;
            r > inner + pitch
        })
        .max_by_key(|&x| (distance[y0 * grid_size + x], std::cmp::Reverse(x)))
        .ok_or_else(|| Error::InvalidInput("grid too coarse".to_string()))?;
    let depth = distance[y0 * grid_size + x0];
    // Levels 1..=n plus one erosion for the kernel must leave the basepoint.
    if depth < n_levels + 2 {
        return Err(Error::InvalidInput(format!(
            "grid {grid_size} too coarse for {n_levels} levels (corridor depth {depth})"
        )));
    }

    let mut family = Vec::with_capacity(n_levels);
    for k in 1..=n_levels {
        let level = Mask {
            width: grid_size,
            height: grid_size,
            bits: distance.iter().map(|&d| d >= k).collect(),
        };
        let region = level.component4(x0, y0);
        let region = RasterRegion::new(
            grid_size,
            grid_size,
            region.bits,
            [-0.5, -0.5],
            1.0 / grid_size as f64,
            (x0, y0),
        )?;
        if !region.is_simply_connected() {
            return Err(Error::InvalidInput(format!("level {k} is not simply connected")));
        }
        family.push(region);
    }
    Ok(family)
}

/// SVG drawing of several regions on a shared raster, later regions on top.
/// Each region is drawn as merged horizontal runs of cells.
pub fn svg_overlay(regions: &[(&RasterRegion, &str)]) -> String {
    let (w, h) = regions
        .first()
        .map(|(r, _)| (r.width(), r.height()))
        .unwrap_or((0, 0));
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{}" height="{}" shape-rendering="crispEdges">"#,
        w.max(512),
        h.max(512)
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (region, color) in regions {
        let _ = write!(svg, r#"<path fill="{color}" fill-opacity="0.6" d=""#);
        for y in 0..region.height() {
            let mut x = 0;
            while x < region.width() {
                if region.get(x, y) {
                    let start = x;
                    while x < region.width() && region.get(x, y) {
                        x += 1;
                    }
                    let _ = write!(svg, "M{start} {y}h{}v1h-{}z", x - start, x - start);
                } else {
                    x += 1;
                }
            }
        }
        let _ = writeln!(svg, r#""/>"#);
        let (bx, by) = region.basepoint();
        let _ = writeln!(
            svg,
            r#"<circle cx="{}" cy="{}" r="1.5" fill="black"/>"#,
            bx as f64 + 0.5,
            by as f64 + 0.5
        );
    }
    svg.push_str("</svg>\n");
    svg
}
