//! Finite point sets standing in for compact sets: Hutchinson iteration,
//! chaos-game sampling and exact Hausdorff distance.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;
use crate::similitude::Ifs;

/// Points closer than this are merged by [`iterate_attractor`].
pub const DEDUP_TOL: f64 = 1e-12;
pub const DEFAULT_BURN_IN: usize = 32;

/// Finite multiset of plane points with finite coordinates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet<T> {
    points: Vec<Point<T>>,
}

impl<T: Real> PointSet<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("point set"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index(&self) -> GridIndex<T> {
        GridIndex::build(&self.points)
    }

    /// Keeps the first of any group of points lying within `tol` of a kept point.
    pub fn dedup(&self, tol: T) -> Self {
        if tol <= T::zero() {
            let mut seen = std::collections::HashSet::new();
            let points = self
                .points
                .iter()
                .filter(|p| seen.insert((p.x.to_f64_lossy().to_bits(), p.y.to_f64_lossy().to_bits())))
                .copied()
                .collect();
            return Self { points };
        }
        let cell_of = |v: T| (v / tol).floor().to_f64_lossy() as i64;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let mut kept: Vec<Point<T>> = Vec::with_capacity(self.points.len());
        let tol_sq = tol * tol;
        for p in &self.points {
            let (cx, cy) = (cell_of(p.x), cell_of(p.y));
            let mut duplicate = false;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(ids) = buckets.get(&(cx + dx, cy + dy)) {
                        if ids.iter().any(|&j| kept[j].distance_squared(*p) <= tol_sq) {
                            duplicate = true;
                            break 'search;
                        }
                    }
                }
            }
            if !duplicate {
                buckets.entry((cx, cy)).or_default().push(kept.len());
                kept.push(*p);
            }
        }
        Self { points: kept }
    }
}

/// One application of `A ↦ ⋃ᵢ Sᵢ(A)`, as a multiset of size `k·|A|`.
///
/// Output order is map-major: all of `S₁(A)`, then `S₂(A)`, and so on.
pub fn hutchinson_step<T: Real>(ifs: &Ifs<T>, ps: &PointSet<T>) -> PointSet<T> {
    let mut out = Vec::with_capacity(ifs.k() * ps.len());
    for m in ifs.maps() {
        out.extend(ps.points().iter().map(|&p| m.apply(p)));
    }
    PointSet { points: out }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttractorMode {
    /// Every word up to the requested depth was enumerated.
    Deterministic,
    /// The point budget ran out at `switched_at_depth`; the remaining levels
    /// were sampled with random words drawn from a generator seeded by `rng_seed`.
    ChaosGame { switched_at_depth: usize, rng_seed: u64 },
}

#[derive(Debug, Clone)]
pub struct AttractorRun<T> {
    pub points: PointSet<T>,
    pub depth: usize,
    pub mode: AttractorMode,
}

/// Deterministic Hutchinson iteration from `seed` with deduplication at
/// [`DEDUP_TOL`], falling back to random words once `k·|current|` would
/// exceed `point_budget`.
pub fn iterate_attractor<T: Real>(
    ifs: &Ifs<T>,
    seed: &PointSet<T>,
    depth: usize,
    point_budget: usize,
    rng_seed: u64,
) -> Result<AttractorRun<T>> {
    if point_budget == 0 {
        return Err(Error::ZeroBudget);
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if seed.is_empty() {
        return Err(Error::Empty("attractor seed"));
    }
    let tol = T::lit(DEDUP_TOL);
    let mut current = seed.dedup(tol);
    for level in 1..=depth {
        if current.len() * ifs.k() > point_budget {
            let remaining = depth - level + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            let maps = ifs.maps();
            let sampled = (0..point_budget)
                .map(|_| {
                    let start = current.points[rng.gen_range(0..current.len())];
                    (0..remaining).fold(start, |p, _| maps[rng.gen_range(0..maps.len())].apply(p))
                })
                .collect();
            return Ok(AttractorRun {
                points: PointSet { points: sampled },
                depth,
                mode: AttractorMode::ChaosGame {
                    switched_at_depth: level,
                    rng_seed,
                },
            });
        }
        current = hutchinson_step(ifs, &current).dedup(tol);
    }
    Ok(AttractorRun {
        points: current,
        depth,
        mode: AttractorMode::Deterministic,
    })
}

/// Random-iteration sampling of the attractor, started from the fixed point
/// of the first map. The first `burn_in` iterates are discarded.
pub fn chaos_game<T: Real>(ifs: &Ifs<T>, n_points: usize, rng_seed: u64, burn_in: usize) -> Result<PointSet<T>> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("chaos game needs at least one point".into()));
    }
    let maps = ifs.maps();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut p = maps[0].fixed_point();
    let mut out = Vec::with_capacity(n_points);
    for i in 0..burn_in + n_points {
        p = maps[rng.gen_range(0..maps.len())].apply(p);
        if i >= burn_in {
            out.push(p);
        }
    }
    Ok(PointSet { points: out })
}

/// Uniform bucket grid over a point set for exact nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct GridIndex<T> {
    origin: Point<T>,
    cell: T,
    nx: usize,
    ny: usize,
    /// CSR layout: points of cell `c` are `points[starts[c]..starts[c + 1]]`.
    starts: Vec<usize>,
    points: Vec<Point<T>>,
}

impl<T: Real> GridIndex<T> {
    /// Sizes the grid so the cell count is close to the number of points.
    pub fn build(points: &[Point<T>]) -> Self {
        let n = points.len().max(1);
        let mut lo = Point::new(T::infinity(), T::infinity());
        let mut hi = Point::new(T::neg_infinity(), T::neg_infinity());
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if points.is_empty() {
            lo = Point::origin();
            hi = Point::origin();
        }
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let nf = T::from_usize_lossy(n);
        let extent = w.max(h);
        let mut cell = (w * h / nf).sqrt().max(extent / nf);
        if !(cell > T::zero()) || !cell.is_finite() {
            cell = T::one();
        }
        let count = |len: T| (len / cell).floor().to_usize().unwrap_or(0) + 1;
        let (nx, ny) = (count(w), count(h));

        let cell_of = |p: &Point<T>| -> usize {
            let i = (((p.x - lo.x) / cell).floor().to_usize().unwrap_or(0)).min(nx - 1);
            let j = (((p.y - lo.y) / cell).floor().to_usize().unwrap_or(0)).min(ny - 1);
            j * nx + i
        };
        let mut counts = vec![0usize; nx * ny + 1];
        let cells: Vec<usize> = points.iter().map(cell_of).collect();
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..nx * ny {
            counts[c + 1] += counts[c];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut sorted = vec![Point::origin(); points.len()];
        for (p, &c) in points.iter().zip(&cells) {
            sorted[fill[c]] = *p;
            fill[c] += 1;
        }
        Self {
            origin: lo,
            cell,
            nx,
            ny,
            starts,
            points: sorted,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn cell_coord(&self, v: T, origin: T) -> i64 {
        let c = ((v - origin) / self.cell).floor();
        c.to_f64_lossy().clamp(-1e15, 1e15) as i64
    }

    /// Squared distance from `q` to the nearest indexed point. If
    /// `good_enough_sq` is given, the search may stop at any point within
    /// that squared distance and return its (exact) squared distance.
    pub fn nearest_distance_squared(&self, q: Point<T>, good_enough_sq: Option<T>) -> T {
        let mut best = T::infinity();
        if self.points.is_empty() {
            return best;
        }
        let qi = self.cell_coord(q.x, self.origin.x);
        let qj = self.cell_coord(q.y, self.origin.y);
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        // Rings closer than the grid itself are empty; start at its Chebyshev distance.
        let first_ring = (qi - qi.clamp(0, nx - 1)).abs().max((qj - qj.clamp(0, ny - 1)).abs());
        let max_ring = qi.abs().max((nx - 1 - qi).abs()).max(qj.abs()).max((ny - 1 - qj).abs());
        let shrink = T::one() - T::lit(1e-9);
        let scan = |i: i64, j: i64, best: &mut T| {
            let c = (j * nx + i) as usize;
            for p in &self.points[self.starts[c]..self.starts[c + 1]] {
                let d = p.distance_squared(q);
                if d < *best {
                    *best = d;
                }
            }
        };
        let mut ring = first_ring;
        loop {
            if ring == 0 {
                scan(qi, qj, &mut best);
            } else {
                let (i_lo, i_hi) = ((qi - ring).max(0), (qi + ring).min(nx - 1));
                for j in [qj - ring, qj + ring] {
                    if (0..ny).contains(&j) {
                        for i in i_lo..=i_hi {
                            scan(i, j, &mut best);
                        }
                    }
                }
                let (j_lo, j_hi) = ((qj - ring + 1).max(0), (qj + ring - 1).min(ny - 1));
                for i in [qi - ring, qi + ring] {
                    if (0..nx).contains(&i) {
                        for j in j_lo..=j_hi {
                            scan(i, j, &mut best);
                        }
                    }
                }
            }
            if let Some(g) = good_enough_sq {
                if best <= g {
                    return best;
                }
            }
            // Points in rings beyond `ring` are at least `ring·cell` away.
            let bound = T::from_i64(ring).unwrap() * self.cell * shrink;
            if (best.is_finite() && best < bound * bound) || ring >= max_ring {
                return best;
            }
            ring += 1;
        }
    }
}

/// `sup_{a ∈ A} dist(a, B)` using the grid index over `b`.
pub fn directed_hausdorff<T: Real>(a: &PointSet<T>, b: &GridIndex<T>) -> T {
    a.points
        .par_chunks(1024)
        .map(|chunk| {
            let mut worst = T::zero();
            for &p in chunk {
                // Only exact values above the running maximum matter.
                let d = b.nearest_distance_squared(p, Some(worst));
                if d > worst {
                    worst = d;
                }
            }
            worst
        })
        .reduce(T::zero, |x, y| x.max(y))
        .sqrt()
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance<T: Real>(a: &PointSet<T>, b: &PointSet<T>) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("Hausdorff distance operand"));
    }
    let ab = directed_hausdorff(a, &b.index());
    let ba = directed_hausdorff(b, &a.index());
    Ok(ab.max(ba))
}
