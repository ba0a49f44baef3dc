//! Shared generators and independent oracles for the integration suites.
#![allow(dead_code)]

pub mod criteria;

use std::collections::VecDeque;

use beurling::{DiskFunction, RasterRegion, WeightField};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Boundary sup distance between two maps.
pub fn sup_distance(a: &DiskFunction, b: &DiskFunction) -> f64 {
    a.sub(b).trace(a.common_grid(b).max(512)).unwrap().sup_norm()
}

/// `a + b·exp(−|w − c|²/s²)`: smooth, bounded, bounded below.
pub fn bump_field(r: &mut impl Rng) -> WeightField {
    let a = r.gen_range(1.0..2.0);
    let b = r.gen_range(0.0..1.0);
    let center = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let s2 = r.gen_range(0.5f64..2.0).powi(2);
    WeightField::from_fn("bump", a + b, move |w| a + b * (-(w - center).norm_sqr() / s2).exp()).unwrap()
}

/// `a + ε·cos(α·Re w + β·Im w + φ)` with `α² + β² = 1`, so `ε` is a
/// Lipschitz constant in `w`.
pub fn wave_field(r: &mut impl Rng) -> (WeightField, f64) {
    let a = r.gen_range(1.5..3.0);
    let eps = r.gen_range(0.05..0.15);
    let dir = r.gen_range(0.0..std::f64::consts::TAU);
    let phase = r.gen_range(0.0..std::f64::consts::TAU);
    let (alpha, beta) = (dir.cos(), dir.sin());
    let field = WeightField::from_fn("wave", a + eps, move |w| {
        a + eps * (alpha * w.re + beta * w.im + phase).cos()
    })
    .unwrap();
    (field, eps)
}

/// Fields with superharmonic `log Φ`: Gaussian bumps and inverse powers of
/// `1 + |w − c|²`.
pub fn superharmonic_field(r: &mut impl Rng) -> WeightField {
    let a = r.gen_range(1.0..3.0);
    let center = c(r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5));
    if r.gen_bool(0.5) {
        let k = r.gen_range(0.02..0.2);
        WeightField::from_fn("gaussian", a, move |w| a * (-k * (w - center).norm_sqr()).exp()).unwrap()
    } else {
        let beta = r.gen_range(0.1..1.0);
        WeightField::from_fn("inverse", a, move |w| a * (1.0 + (w - center).norm_sqr()).powf(-beta)).unwrap()
    }
}

/// Bumps with `r·∂Φ/∂r ≤ Φ`, which is the radial monotonicity condition
/// `Φ(ρw) ≥ ρ·Φ(w)`.
pub fn tepper_field(r: &mut impl Rng) -> WeightField {
    let a = r.gen_range(1.0..2.0);
    let b = r.gen_range(0.0..0.5) * a;
    let center = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    WeightField::from_fn("tepper", a + b, move |w| a + b * (-(w - center).norm_sqr()).exp()).unwrap()
}

/// Up to one critical point in `|z| < 0.5`.
pub fn random_zeros(r: &mut impl Rng) -> Vec<Complex64> {
    if r.gen_bool(0.5) {
        vec![Complex64::from_polar(r.gen_range(0.0..0.5), r.gen_range(0.0..std::f64::consts::TAU))]
    } else {
        Vec::new()
    }
}

// Raster oracle: plain breadth-first fills, written independently of the
// library's morphology.

pub const SIZE: usize = 128;
pub const BASE: (usize, usize) = (64, 64);
/// Generated cells keep at least this many empty cells to the border.
pub const MARGIN: usize = 2;

pub type Grid = Vec<Vec<bool>>;

pub fn to_grid(r: &RasterRegion) -> Grid {
    (0..r.height()).map(|y| (0..r.width()).map(|x| r.get(x, y)).collect()).collect()
}

pub fn from_grid(g: &Grid) -> RasterRegion {
    RasterRegion::from_fn(SIZE, SIZE, BASE, |x, y| g[y][x]).unwrap()
}

fn neighbors(g: &Grid, x: usize, y: usize, diagonal: bool) -> impl Iterator<Item = (usize, usize)> {
    let (w, h) = (g[0].len(), g.len());
    let steps: &[(i64, i64)] = if diagonal {
        &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    } else {
        &[(1, 0), (-1, 0), (0, 1), (0, -1)]
    };
    steps.iter().filter_map(move |&(dx, dy)| {
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        (nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h).then_some((nx as usize, ny as usize))
    })
}

/// Cells with value `value` reachable from `seeds` through cells of the same
/// value.
pub fn flood(g: &Grid, seeds: &[(usize, usize)], value: bool, diagonal: bool) -> Grid {
    let mut seen = vec![vec![false; g[0].len()]; g.len()];
    let mut queue = VecDeque::new();
    for &(x, y) in seeds {
        if g[y][x] == value && !seen[y][x] {
            seen[y][x] = true;
            queue.push_back((x, y));
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        for (nx, ny) in neighbors(g, x, y, diagonal) {
            if g[ny][nx] == value && !seen[ny][nx] {
                seen[ny][nx] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    seen
}

pub fn border(g: &Grid) -> Vec<(usize, usize)> {
    let (w, h) = (g[0].len(), g.len());
    let rows = (0..w).flat_map(|x| [(x, 0), (x, h - 1)]);
    let cols = (0..h).flat_map(|y| [(0, y), (w - 1, y)]);
    rows.chain(cols).collect()
}

/// Complement cells 8-connected to the border.
pub fn outside(g: &Grid) -> Grid {
    flood(g, &border(g), false, true)
}

pub fn holes(g: &Grid) -> usize {
    let out = outside(g);
    let mut marked = out.clone();
    let mut count = 0;
    for y in 0..g.len() {
        for x in 0..g[0].len() {
            if !g[y][x] && !marked[y][x] {
                count += 1;
                let comp = flood(g, &[(x, y)], false, true);
                for (my, row) in comp.iter().enumerate() {
                    for (mx, &v) in row.iter().enumerate() {
                        if v {
                            marked[my][mx] = true;
                        }
                    }
                }
            }
        }
    }
    count
}

pub fn is_boundary(g: &Grid, x: usize, y: usize) -> bool {
    g[y][x] && neighbors(g, x, y, true).any(|(nx, ny)| !g[ny][nx])
}

pub fn cells(g: &Grid) -> Vec<(usize, usize)> {
    let w = g[0].len();
    (0..g.len()).flat_map(|y| (0..w).map(move |x| (x, y))).filter(|&(x, y)| g[y][x]).collect()
}

pub fn subset(a: &Grid, b: &Grid) -> bool {
    cells(a).into_iter().all(|(x, y)| b[y][x])
}

pub fn combine(a: &Grid, b: &Grid, op: impl Fn(bool, bool) -> bool) -> Grid {
    (0..SIZE).map(|y| (0..SIZE).map(|x| op(a[y][x], b[y][x])).collect()).collect()
}

/// One leg of a walk: direction (0..4), length, thickness, and whether to
/// restart from the basepoint first.
pub type Step = (u8, usize, usize, bool);

/// Paints the walk as thick bars; positions are clamped so every bar keeps
/// `MARGIN` empty cells to the border.
fn paint_walk(g: &mut Grid, steps: &[Step]) {
    let lo = MARGIN as i64;
    let hi = (SIZE - 1 - MARGIN) as i64;
    let (mut x, mut y) = (BASE.0 as i64, BASE.1 as i64);
    for &(dir, len, thick, restart) in steps {
        if restart {
            (x, y) = (BASE.0 as i64, BASE.1 as i64);
        }
        let (dx, dy) = [(1, 0), (-1, 0), (0, 1), (0, -1)][dir as usize % 4];
        for _ in 0..len {
            for a in 0..thick as i64 {
                for b in 0..thick as i64 {
                    let (px, py) = ((x + a).clamp(lo, hi), (y + b).clamp(lo, hi));
                    g[py as usize][px as usize] = true;
                }
            }
            x = (x + dx).clamp(lo, hi);
            y = (y + dy).clamp(lo, hi);
        }
    }
}

/// Simply connected domain: a seed square plus the painted walk, with holes
/// filled.
pub fn domain(steps: &[Step]) -> Grid {
    let mut g = vec![vec![false; SIZE]; SIZE];
    paint_walk(&mut g, &[(0, 3, 3, false)]);
    paint_walk(&mut g, steps);
    let g = flood(&g, &[BASE], true, false);
    let out = outside(&g);
    (0..SIZE).map(|y| (0..SIZE).map(|x| !out[y][x]).collect()).collect()
}

pub fn walk() -> impl Strategy<Value = Vec<Step>> {
    prop::collection::vec((0u8..4, 4usize..50, 1usize..4, prop::bool::weighted(0.15)), 1..10)
}

/// Two domains and enlargements of each.
#[derive(Debug, Clone)]
pub struct NestedPair {
    pub d1: Grid,
    pub d2: Grid,
    pub d1_big: Grid,
    pub d2_big: Grid,
}

pub fn nested_pair() -> impl Strategy<Value = NestedPair> {
    (walk(), walk(), walk(), walk()).prop_map(|(a, b, ea, eb)| {
        let grow = |base: &[Step], extra: &[Step]| {
            let all: Vec<Step> = base.iter().chain(extra).copied().collect();
            domain(&all)
        };
        NestedPair {
            d1: domain(&a),
            d2: domain(&b),
            d1_big: grow(&a, &ea),
            d2_big: grow(&b, &eb),
        }
    })
}

pub const REGION_CASES: u32 = 200;

/// Runs `check` on `REGION_CASES` seeded nested pairs, with shrinking.
pub fn run_region_property(
    check: impl Fn(&NestedPair) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases: REGION_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&nested_pair(), |pair| check(&pair)).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

/// Extended union is the union with every bounded complement component
/// filled: simply connected, containing both, adding only hole cells.
pub fn union_cover(p: &NestedPair) -> Result<(), TestCaseError> {
    let eu = to_grid(&beurling::regions::extended_union(&from_grid(&p.d1), &from_grid(&p.d2)).unwrap());
    let union = combine(&p.d1, &p.d2, |a, b| a || b);
    ensure(holes(&eu) == 0, || "extended union has holes".into())?;
    ensure(flood(&eu, &[BASE], true, false) == eu, || "extended union is not connected".into())?;
    ensure(subset(&union, &eu), || "extended union misses cells of the union".into())?;
    let out = outside(&union);
    ensure(cells(&eu).into_iter().all(|(x, y)| union[y][x] || !out[y][x]), || "added cell is not a hole cell".into())?;
    ensure(cells(&eu).len() == SIZE * SIZE - cells(&out).len(), || "extended union is not smallest".into())
}

pub fn union_monotone(p: &NestedPair) -> Result<(), TestCaseError> {
    let eu = |a: &Grid, b: &Grid| to_grid(&beurling::regions::extended_union(&from_grid(a), &from_grid(b)).unwrap());
    ensure(subset(&eu(&p.d1, &p.d2), &eu(&p.d1_big, &p.d2_big)), || "extended union is not monotone".into())
}

pub fn union_boundary(p: &NestedPair) -> Result<(), TestCaseError> {
    let eu = to_grid(&beurling::regions::extended_union(&from_grid(&p.d1), &from_grid(&p.d2)).unwrap());
    ensure(
        cells(&eu)
            .into_iter()
            .filter(|&(x, y)| is_boundary(&eu, x, y))
            .all(|(x, y)| is_boundary(&p.d1, x, y) || is_boundary(&p.d2, x, y)),
        || "extended union has a boundary cell interior to both inputs".into(),
    )
}

/// Reduced intersection is the basepoint component of the intersection:
/// simply connected, inside both, and not extendable by an adjacent common
/// cell.
pub fn intersection_part(p: &NestedPair) -> Result<(), TestCaseError> {
    let ri = to_grid(&beurling::regions::reduced_intersection(&from_grid(&p.d1), &from_grid(&p.d2)).unwrap());
    let meet = combine(&p.d1, &p.d2, |a, b| a && b);
    ensure(holes(&ri) == 0, || "reduced intersection has holes".into())?;
    ensure(subset(&ri, &meet), || "reduced intersection leaves the intersection".into())?;
    ensure(ri == flood(&meet, &[BASE], true, false), || "reduced intersection is not the basepoint component".into())?;
    ensure(
        cells(&ri).into_iter().all(|(x, y)| neighbors(&ri, x, y, false).all(|(nx, ny)| ri[ny][nx] || !meet[ny][nx])),
        || "reduced intersection is not maximal".into(),
    )
}

pub fn intersection_monotone(p: &NestedPair) -> Result<(), TestCaseError> {
    let ri = |a: &Grid, b: &Grid| {
        to_grid(&beurling::regions::reduced_intersection(&from_grid(a), &from_grid(b)).unwrap())
    };
    ensure(subset(&ri(&p.d1, &p.d2), &ri(&p.d1_big, &p.d2_big)), || "reduced intersection is not monotone".into())
}

pub fn intersection_boundary(p: &NestedPair) -> Result<(), TestCaseError> {
    let ri = to_grid(&beurling::regions::reduced_intersection(&from_grid(&p.d1), &from_grid(&p.d2)).unwrap());
    ensure(
        cells(&ri)
            .into_iter()
            .filter(|&(x, y)| is_boundary(&ri, x, y))
            .all(|(x, y)| is_boundary(&p.d1, x, y) || is_boundary(&p.d2, x, y)),
        || "reduced intersection has a boundary cell interior to both inputs".into(),
    )
}

pub const REGION_PROPERTIES: [(&str, fn(&NestedPair) -> Result<(), TestCaseError>); 6] =
    [
    ("union is the smallest simply connected cover", union_cover),
    ("union is monotone", union_monotone),
    ("union boundary comes from the inputs", union_boundary),
    ("intersection is the largest simply connected part", intersection_part),
    ("intersection is monotone", intersection_monotone),
    ("intersection boundary comes from the inputs", intersection_boundary),
];
