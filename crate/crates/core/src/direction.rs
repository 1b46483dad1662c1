//! Directions of graph points seen from a base point, arcs in that
//! direction set, orbits of arcs under rotations, and the rotation test
//! built from them.
//!
//! Angles are polar angles in `[0, 2π)`. The rotation `ρ_θ` sends the
//! polar angle `φ` to `φ − θ` (see [`crate::similitude`]). The vertical
//! directions are `N = π/2` and `S = 3π/2`.
//!
//! Every verdict here is computed from a sampled graph. A rejection is a
//! failed necessary condition on the sampled data, not a proof about the
//! underlying function.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::SampledGraph;
use crate::geometry::Point;
use crate::scalar::{circle_distance, normalize_angle, Real};
use crate::similitude::{classify_rotation, RotationClass};

/// Minimum number of consecutive small gaps forming an arc.
pub const ARC_MIN_GAPS: usize = 8;
/// Angles closer than this are treated as one direction.
pub const ANGLE_MERGE_TOL: f64 = 1e-9;
/// Default exclusion radius around the base point, in grid spacings.
pub const DEFAULT_EXCLUSION_SPACINGS: f64 = 4.0;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 64;
pub const DEFAULT_RATIONAL_TOL: f64 = 1e-9;
pub const DEFAULT_LINE_TOL: f64 = 1e-9;
pub const DEFAULT_ORBIT_STEPS: usize = 100_000;

fn north<T: Real>() -> T {
    T::FRAC_PI_2()
}

fn south<T: Real>() -> T {
    T::PI() + T::FRAC_PI_2()
}

/// Sorted angles in `[0, 2π)` with a description of where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet<T> {
    angles: Vec<T>,
    source: String,
}

impl<T: Real> DirectionSet<T> {
    pub fn new(angles: impl IntoIterator<Item = T>, source: impl Into<String>) -> Result<Self> {
        let mut angles: Vec<T> = angles.into_iter().map(normalize_angle).collect();
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite("direction angles"));
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self {
            angles,
            source: source.into(),
        })
    }

    pub fn angles(&self) -> &[T] {
        &self.angles
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Angles with near-duplicates (within `tol`, circularly) removed.
    pub fn distinct(&self, tol: T) -> Vec<T> {
        let mut out: Vec<T> = Vec::with_capacity(self.angles.len());
        for &a in &self.angles {
            if out.last().is_none_or(|&l| a - l > tol) {
                out.push(a);
            }
        }
        if out.len() > 1 && out[0] + T::two_pi() - out[out.len() - 1] <= tol {
            out.pop();
        }
        out
    }

    /// Distance from `phi` to the nearest angle of the set in the circle metric.
    pub fn nearest_distance(&self, phi: T) -> Option<T> {
        let n = self.angles.len();
        if n == 0 {
            return None;
        }
        let phi = normalize_angle(phi);
        let j = self.angles.partition_point(|&a| a < phi);
        let after = self.angles[j % n];
        let before = self.angles[(j + n - 1) % n];
        Some(circle_distance(phi, after).min(circle_distance(phi, before)))
    }
}

/// Image of `p ↦ (p − p*)/‖p − p*‖` on the grid nodes of `g`, skipping nodes
/// within `exclusion_radius` of `p_star` (default 4 grid spacings).
pub fn phi_image<T: Real>(g: &SampledGraph<T>, p_star: Point<T>, exclusion_radius: Option<T>) -> Result<DirectionSet<T>> {
    if !p_star.is_finite() {
        return Err(Error::NonFinite("base point"));
    }
    let eps = T::lit(1e-12);
    let on_graph_tol = T::lit(2.0) * g.eval_error() + g.modulus();
    let defect = if p_star.x < -eps || p_star.x > T::one() + eps {
        T::infinity()
    } else {
        (p_star.y - g.value_at(p_star.x)).abs()
    };
    if !(defect <= on_graph_tol + eps) {
        return Err(Error::NotOnGraph {
            x: p_star.x.to_f64_lossy(),
            y: p_star.y.to_f64_lossy(),
            defect: defect.to_f64_lossy(),
        });
    }
    let radius = exclusion_radius.unwrap_or_else(|| T::lit(DEFAULT_EXCLUSION_SPACINGS) * g.h());
    if !(radius > T::zero()) {
        return Err(Error::InvalidArgument("exclusion radius must be positive".into()));
    }
    let r2 = radius * radius;
    let angles: Vec<T> = (0..g.xs().len())
        .map(|i| g.point(i))
        .filter(|p| p.distance_squared(p_star) > r2)
        .map(|p| normalize_angle((p.y - p_star.y).atan2(p.x - p_star.x)))
        .collect();
    if angles.is_empty() {
        return Err(Error::AllNodesExcluded);
    }
    DirectionSet::new(angles, format!("{} from ({}, {})", g.name(), p_star.x, p_star.y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc<T> {
    pub start: T,
    pub length: T,
}

impl<T: Real> Arc<T> {
    /// Whether `phi` lies on the closed arc.
    pub fn contains(&self, phi: T) -> bool {
        normalize_angle(phi - self.start) <= self.length
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcReport<T> {
    pub contains_arc: bool,
    pub witness: Option<Arc<T>>,
    pub max_gap: T,
    pub resolution: T,
}

/// Default arc resolution `2π/√m` for `m` sampled directions.
pub fn default_resolution<T: Real>(count: usize) -> T {
    T::two_pi() / T::from_usize_lossy(count.max(1)).sqrt()
}

/// Looks for an arc: a run of at least 8 consecutive circular gaps, each at
/// most `resolution`, none of which crosses `N` or `S`. The witness is the
/// longest such run.
pub fn contains_arc<T: Real>(d: &DirectionSet<T>, resolution: T) -> Result<ArcReport<T>> {
    if !(resolution > T::zero()) {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let a = d.distinct(T::lit(ANGLE_MERGE_TOL));
    let m = a.len();
    if m < 3 {
        return Ok(ArcReport {
            contains_arc: false,
            witness: None,
            max_gap: T::two_pi(),
            resolution,
        });
    }
    let two_pi = T::two_pi();
    let gap = |i: usize| {
        if i + 1 < m {
            a[i + 1] - a[i]
        } else {
            a[0] + two_pi - a[m - 1]
        }
    };
    let crosses_vertical = |i: usize| {
        let g = gap(i);
        [north::<T>(), south::<T>()]
            .iter()
            .any(|&v| normalize_angle(v - a[i]) <= g)
    };
    let good: Vec<bool> = (0..m).map(|i| !crosses_vertical(i) && gap(i) <= resolution).collect();
    let max_gap = (0..m).map(gap).fold(T::zero(), T::max);

    // some gap always crosses N, so start the circular scan right after a bad one
    let first_bad = good.iter().position(|&g| !g).expect("a gap contains N");
    let mut best: Option<(usize, usize, T)> = None;
    let mut run_start = 0;
    let mut run_len = 0usize;
    let mut run_sum = T::zero();
    for step in 1..=m {
        let i = (first_bad + step) % m;
        if good[i] {
            if run_len == 0 {
                run_start = i;
                run_sum = T::zero();
            }
            run_len += 1;
            run_sum = run_sum + gap(i);
        } else {
            if run_len >= ARC_MIN_GAPS && best.is_none_or(|(_, _, s)| run_sum > s) {
                best = Some((run_start, run_len, run_sum));
            }
            run_len = 0;
        }
    }
    let witness = best.map(|(i, _, s)| Arc { start: a[i], length: s });
    Ok(ArcReport {
        contains_arc: witness.is_some(),
        witness,
        max_gap,
        resolution,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitCover<T> {
    /// Least `N` with `⋃_{i≤N} ρ_θⁱ(J)` leaving at most `ε` of the circle uncovered.
    Covered { covered_at: usize },
    /// Coverage after the last examined step.
    Uncovered { max_gap: T, uncovered: T, steps: usize },
}

/// Follows the orbit `ρ_θⁱ(J)` of the arc `J = [arc_start, arc_start + arc_len]`
/// and reports the first step at which the union leaves total uncovered
/// measure at most `ε`. Periodic orbits stop early.
pub fn rotation_orbit_cover<T: Real>(arc_start: T, arc_len: T, theta: T, eps: T, max_steps: usize) -> Result<OrbitCover<T>> {
    let two_pi = T::two_pi();
    if !(arc_len > T::zero() && arc_len < two_pi) {
        return Err(Error::InvalidArgument(format!("arc length {arc_len} is not in (0, 2π)")));
    }
    if !(eps > T::zero()) || !theta.is_finite() || !arc_start.is_finite() {
        return Err(Error::InvalidArgument("ε must be positive and angles finite".into()));
    }
    let dup_tol = T::lit(ANGLE_MERGE_TOL);
    let uncovered_gap = |g: T| (g - arc_len).max(T::zero());
    let first = normalize_angle(arc_start);
    let mut starts = vec![first];
    let mut uncovered = uncovered_gap(two_pi);
    let exact = |starts: &[T]| -> (T, T) {
        let m = starts.len();
        let mut total = T::zero();
        let mut max_gap = T::zero();
        for i in 0..m {
            let g = if i + 1 < m { starts[i + 1] - starts[i] } else { starts[0] + two_pi - starts[m - 1] };
            let u = uncovered_gap(g);
            total = total + u;
            max_gap = max_gap.max(u);
        }
        (total, max_gap)
    };
    if uncovered <= eps {
        return Ok(OrbitCover::Covered { covered_at: 0 });
    }
    let mut steps = 0;
    for i in 1..=max_steps {
        steps = i;
        let s = normalize_angle(first - T::from_usize_lossy(i) * theta);
        if circle_distance(s, first) <= dup_tol {
            break;
        }
        let m = starts.len();
        let j = starts.partition_point(|&x| x < s);
        let next = starts[j % m];
        let prev = starts[(j + m - 1) % m];
        if circle_distance(s, next) <= dup_tol || circle_distance(s, prev) <= dup_tol {
            continue;
        }
        let old = normalize_angle(next - prev);
        let old = if m == 1 { two_pi } else { old };
        uncovered = uncovered - uncovered_gap(old) + uncovered_gap(normalize_angle(s - prev)) + uncovered_gap(normalize_angle(next - s));
        starts.insert(j, s);
        if uncovered <= eps {
            // confirm against a fresh sum to rule out drift
            let (total, _) = exact(&starts);
            uncovered = total;
            if total <= eps {
                return Ok(OrbitCover::Covered { covered_at: i });
            }
        }
    }
    let (total, max_gap) = exact(&starts);
    Ok(OrbitCover::Uncovered {
        max_gap,
        uncovered: total,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport<T> {
    pub forward_ok: bool,
    pub backward_ok: bool,
    pub worst_defect: T,
}

/// Checks `ρ_θ(d) ⊂ d` (forward, `φ ↦ φ − θ`) and `ρ_{−θ}(d) ⊂ d`
/// (backward) up to `tol` in the circle metric.
pub fn invariance_check<T: Real>(d: &DirectionSet<T>, theta: T, tol: T) -> Result<InvarianceReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if d.is_empty() {
        return Ok(InvarianceReport {
            forward_ok: true,
            backward_ok: true,
            worst_defect: T::zero(),
        });
    }
    let defect = |shift: T| {
        d.angles()
            .par_iter()
            .map(|&a| d.nearest_distance(a + shift).unwrap())
            .reduce(T::zero, T::max)
    };
    let fwd = defect(-theta);
    let bwd = defect(theta);
    Ok(InvarianceReport {
        forward_ok: fwd <= tol,
        backward_ok: bwd <= tol,
        worst_defect: fwd.max(bwd),
    })
}

/// Best rational approximation `m/n` of `x` from its continued-fraction
/// convergents with `n ≤ max_den` and `|x − m/n| ≤ tol`.
pub fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let ai = a as i64;
        let h2 = ai * h1 + h0;
        let k2 = ai as u64 * k1 + k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    /// `θ = 2πm/n` with `n ≥ 3`: the rotated copies of the arc land in `components`
    /// different pieces of the circle cut at the rotated vertical directions.
    RationalComponents { m: i64, n: u64, components: usize },
    /// `θ = 2πm/n` and some copy `ρ_θⁱ(J)` contains a direction excluded from the image.
    RationalExcludedHit { m: i64, n: u64, copy: usize },
    /// No rational proxy: `ρ_θ^steps(J)` reaches the vertical direction.
    IrrationalOrbit { steps: usize, direction: char },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RationalComponents { m, n, components } => write!(
                f,
                "rational θ=2π·{m}/{n} (n={n} ≥ 3): image would need {components} > 2 components"
            ),
            Self::RationalExcludedHit { m, n, copy } => write!(
                f,
                "rational θ=2π·{m}/{n} (n={n} ≥ 3): rotated arc copy {copy} meets an excluded vertical direction"
            ),
            Self::IrrationalOrbit { steps, direction } => write!(
                f,
                "irrational proxy: arc orbit reaches {direction} after {steps} rotations"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RotationVerdict {
    /// The graph samples lie on a line; the rotation test does not apply.
    Line(RotationClass),
    Admissible(RotationClass),
    Rejected(RejectReason),
    /// The sampled data cannot decide (no arc found, or orbit horizon exhausted).
    Undecided(String),
}

impl fmt::Display for RotationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line(c) => write!(f, "line ({c})"),
            Self::Admissible(c) => write!(f, "admissible ({c})"),
            Self::Rejected(r) => write!(f, "rejected: {r}"),
            Self::Undecided(why) => write!(f, "undecided: {why}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateVerdict<T> {
    pub theta: T,
    pub class: RotationClass,
    pub verdict: RotationVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleOptions<T> {
    /// Base point `p*`; defaults to the left endpoint `(0, f(0))`.
    pub base_point: Option<Point<T>>,
    pub exclusion_radius: Option<T>,
    /// Arc resolution; defaults to `2π/√m`.
    pub resolution: Option<T>,
    pub max_denominator: u64,
    pub rational_tol: f64,
    pub line_tol: T,
    pub max_orbit_steps: usize,
}

impl<T: Real> Default for AdmissibleOptions<T> {
    fn default() -> Self {
        Self {
            base_point: None,
            exclusion_radius: None,
            resolution: None,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            rational_tol: DEFAULT_RATIONAL_TOL,
            line_tol: T::lit(DEFAULT_LINE_TOL),
            max_orbit_steps: DEFAULT_ORBIT_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationAnalysis<T> {
    pub directions: DirectionSet<T>,
    pub arc: ArcReport<T>,
    pub is_line: bool,
    pub verdicts: Vec<CandidateVerdict<T>>,
}

/// Whether the directions form at most two clusters, antipodal when two.
pub fn is_line_direction_set<T: Real>(d: &DirectionSet<T>, tol: T) -> bool {
    let clusters = d.distinct(tol);
    match clusters.len() {
        0 | 1 => true,
        2 => {
            // cluster representatives are the lowest angle; allow the cluster spread
            let spread = cluster_spread(d, tol);
            (circle_distance(clusters[0], clusters[1]) - T::PI()).abs() <= tol + spread
        }
        _ => false,
    }
}

fn cluster_spread<T: Real>(d: &DirectionSet<T>, tol: T) -> T {
    let mut spread = T::zero();
    let mut start = match d.angles().first() {
        Some(&a) => a,
        None => return spread,
    };
    let mut prev = start;
    for &a in &d.angles()[1..] {
        if a - prev > tol {
            start = a;
        }
        spread = spread.max(a - start);
        prev = a;
    }
    spread
}

/// Runs the rotation test on each candidate angle:
///
/// * samples on a line: every candidate is flagged `Line`;
/// * angles classified as 0 or π: `Admissible`;
/// * otherwise, with an arc `J` in the direction image, `θ = 2πm/n` with
///   `n ≥ 3` is rejected because the copies `ρ_θⁱ(J)` must avoid the rotated
///   vertical directions and so split the image into more than two pieces;
///   angles with no rational proxy are rejected once the orbit of `J`
///   reaches `N` or `S`.
pub fn admissible_rotations<T: Real>(
    g: &SampledGraph<T>,
    candidates: &[T],
    tol: T,
    options: &AdmissibleOptions<T>,
) -> Result<RotationAnalysis<T>> {
    let base = options.base_point.unwrap_or_else(|| g.point(0));
    let directions = phi_image(g, base, options.exclusion_radius)?;
    let resolution = options
        .resolution
        .unwrap_or_else(|| default_resolution(directions.len()));
    let arc = contains_arc(&directions, resolution)?;
    let is_line = is_line_direction_set(&directions, options.line_tol);
    let verdicts = candidates
        .par_iter()
        .map(|&theta| {
            let theta = normalize_angle(theta);
            let class = classify_rotation(theta, tol);
            let verdict = if is_line {
                RotationVerdict::Line(class)
            } else if class != RotationClass::Other {
                RotationVerdict::Admissible(class)
            } else if let Some(j) = arc.witness {
                judge_other(theta, j, options)
            } else {
                RotationVerdict::Undecided(format!(
                    "no arc found in the direction image at resolution {resolution}"
                ))
            };
            CandidateVerdict { theta, class, verdict }
        })
        .collect();
    Ok(RotationAnalysis {
        directions,
        arc,
        is_line,
        verdicts,
    })
}

fn judge_other<T: Real>(theta: T, j: Arc<T>, options: &AdmissibleOptions<T>) -> RotationVerdict {
    let frac = (theta / T::two_pi()).to_f64_lossy();
    match rational_approximation(frac, options.max_denominator, options.rational_tol) {
        Some((m, n)) if n >= 3 => judge_rational(j, m, n),
        Some((m, n)) => RotationVerdict::Undecided(format!(
            "θ is within the rational tolerance of 2π·{m}/{n} but outside the 0/π classification tolerance"
        )),
        None => judge_irrational(theta, j, options.max_orbit_steps),
    }
}

fn judge_rational<T: Real>(j: Arc<T>, m: i64, n: u64) -> RotationVerdict {
    let theta_exact = T::two_pi() * T::from_i64(m).unwrap() / T::from_u64(n).unwrap();
    let n_us = n as usize;
    // excluded points ρ_{−θ}ⁱ(N), ρ_{−θ}ⁱ(S) sit at π/2 + iθ, 3π/2 + iθ
    let mut excluded: Vec<T> = (0..n_us)
        .flat_map(|i| {
            let s = T::from_usize_lossy(i) * theta_exact;
            [normalize_angle(north::<T>() + s), normalize_angle(south::<T>() + s)]
        })
        .collect();
    excluded.sort_by(|a, b| a.partial_cmp(b).unwrap());
    excluded.dedup_by(|a, b| circle_distance(*a, *b) <= T::lit(ANGLE_MERGE_TOL));
    let copies: Vec<Arc<T>> = (0..n_us)
        .map(|i| Arc {
            start: normalize_angle(j.start - T::from_usize_lossy(i) * theta_exact),
            length: j.length,
        })
        .collect();
    for (i, c) in copies.iter().enumerate() {
        if excluded.iter().any(|&e| c.contains(e)) {
            return RotationVerdict::Rejected(RejectReason::RationalExcludedHit { m, n, copy: i });
        }
    }
    let e = excluded.len();
    let mut segments: Vec<usize> = copies
        .iter()
        .map(|c| (excluded.partition_point(|&x| x <= c.start) + e - 1) % e)
        .collect();
    segments.sort_unstable();
    segments.dedup();
    if segments.len() > 2 {
        RotationVerdict::Rejected(RejectReason::RationalComponents {
            m,
            n,
            components: segments.len(),
        })
    } else {
        RotationVerdict::Undecided(format!(
            "rational θ=2π·{m}/{n}: arc copies occupy only {} pieces",
            segments.len()
        ))
    }
}

fn judge_irrational<T: Real>(theta: T, j: Arc<T>, max_steps: usize) -> RotationVerdict {
    for i in 0..=max_steps {
        let c = Arc {
            start: normalize_angle(j.start - T::from_usize_lossy(i) * theta),
            length: j.length,
        };
        if c.contains(north()) {
            return RotationVerdict::Rejected(RejectReason::IrrationalOrbit { steps: i, direction: 'N' });
        }
        if c.contains(south()) {
            return RotationVerdict::Rejected(RejectReason::IrrationalOrbit { steps: i, direction: 'S' });
        }
    }
    RotationVerdict::Undecided(format!("arc orbit avoided N and S for {max_steps} rotations"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample, FunctionSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn uniform(lo: f64, hi: f64, m: usize) -> DirectionSet<f64> {
        DirectionSet::new((0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64), "synthetic").unwrap()
    }

    #[test]
    fn phi_image_of_lines() {
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 256).unwrap();
        let d = phi_image(&g, Point::new(0.0, 0.0), None).unwrap();
        assert!(d.angles().iter().all(|&a| (a - PI / 4.0).abs() < 1e-12));
        let d = phi_image(&g, Point::new(0.5, 0.5), None).unwrap();
        let distinct = d.distinct(1e-9);
        assert_eq!(distinct.len(), 2);
        assert!((distinct[0] - PI / 4.0).abs() < 1e-12);
        assert!((distinct[1] - 5.0 * PI / 4.0).abs() < 1e-12);
        assert!(is_line_direction_set(&d, 1e-9));
        assert!(matches!(
            phi_image(&g, Point::new(0.5, 0.9), None),
            Err(Error::NotOnGraph { .. })
        ));
        assert!(matches!(
            phi_image(&g, Point::new(0.5, 0.5), Some(10.0)),
            Err(Error::AllNodesExcluded)
        ));
    }

    #[test]
    fn takagi_direction_image_contains_arc() {
        let g = sample(&FunctionSpec::<f64>::takagi(), 1 << 16).unwrap();
        let d = phi_image(&g, Point::new(0.0, 0.0), None).unwrap();
        assert!(d.angles().iter().all(|&a| !(PI / 2.0..=3.0 * PI / 2.0).contains(&a)));
        let r = contains_arc(&d, default_resolution(d.len())).unwrap();
        assert!(r.contains_arc);
        assert!(r.witness.unwrap().length > 0.5);
        assert!(!is_line_direction_set(&d, 1e-9));
    }

    #[test]
    fn contains_arc_examples() {
        let single = DirectionSet::new(vec![1.0; 50], "s").unwrap();
        let r = contains_arc(&single, 0.01).unwrap();
        assert!(!r.contains_arc && r.witness.is_none());
        assert_eq!(r.max_gap, 2.0 * PI);

        let mut two = vec![0.3; 20];
        two.extend(vec![0.3 + PI; 20]);
        let r = contains_arc(&DirectionSet::new(two, "a").unwrap(), 0.01).unwrap();
        assert!(!r.contains_arc);

        let d = uniform(0.0, 0.5, 10_000);
        let r = contains_arc(&d, default_resolution(d.len())).unwrap();
        let w = r.witness.unwrap();
        assert!(w.start.abs() < 1e-12 && (w.length - 0.5).abs() < 1e-12);
        assert!((r.max_gap - (2.0 * PI - 0.5)).abs() < 1e-12);
        assert!(contains_arc(&d, 0.0).is_err());
    }

    #[test]
    fn arcs_do_not_cross_vertical_directions() {
        let d = uniform(PI / 2.0 - 0.2, PI / 2.0 + 0.3, 1000);
        let r = contains_arc(&d, 0.01).unwrap();
        let w = r.witness.unwrap();
        assert!(!w.contains(PI / 2.0));
        assert!((w.length - 0.3).abs() < 1e-3);
    }

    /// Marks covered cells of a fine circle discretization.
    fn bitmap_cover_oracle(len: f64, theta: f64, eps: f64, max_steps: usize) -> Option<usize> {
        let cells = 1 << 20;
        let w = 2.0 * PI / cells as f64;
        let mut covered = vec![false; cells];
        let mut count = 0usize;
        for i in 0..=max_steps {
            let s = (-(i as f64) * theta).rem_euclid(2.0 * PI);
            // cells entirely inside [s, s + len]
            let first = (s / w).ceil() as usize;
            let last = ((s + len) / w).floor() as usize;
            for c in first..last {
                let c = c % cells;
                if !covered[c] {
                    covered[c] = true;
                    count += 1;
                }
            }
            if (cells - count) as f64 * w <= eps {
                return Some(i);
            }
        }
        None
    }

    #[test]
    fn golden_rotation_covers() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let theta = 2.0 * PI * golden;
        let r = rotation_orbit_cover(0.0, 0.1, theta, 0.01, 10_000).unwrap();
        // frozen from the bitmap oracle
        assert_eq!(r, OrbitCover::Covered { covered_at: 88 });
        let oracle = bitmap_cover_oracle(0.1, theta, 0.01, 10_000).unwrap();
        assert!(oracle.abs_diff(88) <= 1, "oracle {oracle}");
    }

    #[test]
    fn rational_rotation_never_covers() {
        match rotation_orbit_cover(0.0, 0.1, PI / 2.0, 0.01, 10_000).unwrap() {
            OrbitCover::Uncovered { uncovered, max_gap, .. } => {
                assert!((uncovered - (2.0 * PI - 0.4)).abs() < 1e-9);
                assert!((max_gap - (PI / 2.0 - 0.1)).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            rotation_orbit_cover(0.3, 2.0 * PI - 0.005, 1.0, 0.01, 10).unwrap(),
            OrbitCover::Covered { covered_at: 0 }
        );
        assert!(rotation_orbit_cover(0.0, 0.0, 1.0, 0.01, 10).is_err());
    }

    #[test]
    fn rational_cover_rule_exhaustive() {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let eps = 0.01;
        for n in 1..=12u64 {
            for m in 0..n {
                if gcd(m, n) != 1 {
                    continue;
                }
                let theta = 2.0 * PI * m as f64 / n as f64;
                for len in [0.05, 0.3, 0.5, 0.9, 1.3, 2.0, 3.5, 6.0] {
                    let expected = n as f64 * len >= 2.0 * PI - eps;
                    let got = matches!(rotation_orbit_cover(0.7, len, theta, eps, 200).unwrap(), OrbitCover::Covered { .. });
                    assert_eq!(got, expected, "m={m} n={n} len={len}");
                }
            }
        }
    }

    #[test]
    fn invariance_examples() {
        let full = uniform(0.0, 2.0 * PI * (1.0 - 1e-4), 10_000);
        let r = invariance_check(&full, 1.234, 1e-3).unwrap();
        assert!(r.forward_ok && r.worst_defect <= 2.0 * PI / 1e4);
        let one = DirectionSet::new(vec![PI / 4.0], "p").unwrap();
        assert!(!invariance_check(&one, PI / 2.0, 1e-9).unwrap().forward_ok);
        let pair = DirectionSet::new(vec![PI / 4.0, 5.0 * PI / 4.0], "p").unwrap();
        let r = invariance_check(&pair, PI, 1e-9).unwrap();
        assert!(r.forward_ok && r.backward_ok && r.worst_defect < 1e-15);
        let empty = DirectionSet::<f64>::new(vec![], "e").unwrap();
        assert_eq!(invariance_check(&empty, 1.0, 1e-9).unwrap().worst_defect, 0.0);
    }

    #[test]
    fn forward_uses_matrix_convention() {
        // Φ(S(p)) = ρ_θ(Φ(p)) around the fixed point of S
        use crate::similitude::Similitude;
        let theta = 0.7;
        let s = Similitude::new(0.5, theta, Point::new(0.3, -0.2)).unwrap();
        let fp = s.fixed_point();
        let p = Point::new(1.0, 2.0);
        let phi = |q: Point<f64>| normalize_angle((q.y - fp.y).atan2(q.x - fp.x));
        assert!(circle_distance(phi(s.apply(p)), phi(p) - theta) < 1e-12);
        let d = DirectionSet::new(vec![phi(p), phi(s.apply(p))], "pair").unwrap();
        let r = invariance_check(&d, theta, 1e-9).unwrap();
        assert!(!r.forward_ok && r.worst_defect > 0.1);
        let d2 = DirectionSet::new((0..7).map(|i| 1.0 + i as f64 * 2.0 * PI / 7.0), "ring").unwrap();
        assert!(invariance_check(&d2, 2.0 * PI / 7.0, 1e-9).unwrap().forward_ok);
    }

    #[test]
    fn rational_approximations() {
        assert_eq!(rational_approximation(0.25, 64, 1e-9), Some((1, 4)));
        assert_eq!(rational_approximation(0.0, 64, 1e-9), Some((0, 1)));
        assert_eq!(rational_approximation(1.0 / 6.0, 64, 1e-9), Some((1, 6)));
        assert_eq!(rational_approximation((5f64.sqrt() - 1.0) / 2.0, 64, 1e-9), None);
        assert_eq!(rational_approximation(5.0 / 7.0 + 1e-12, 64, 1e-9), Some((5, 7)));
    }

    #[test]
    fn admissible_examples() {
        let line = sample(&FunctionSpec::affine(2.0, 1.0), 512).unwrap();
        let a = admissible_rotations(&line, &[0.0, PI, PI / 3.0], 1e-9, &AdmissibleOptions::default()).unwrap();
        assert!(a.is_line);
        assert!(a.verdicts.iter().all(|v| matches!(v.verdict, RotationVerdict::Line(_))));

        let t = sample(&FunctionSpec::<f64>::takagi(), 1 << 14).unwrap();
        let golden = 2.0 * PI * (5f64.sqrt() - 1.0) / 2.0;
        let a = admissible_rotations(&t, &[PI / 2.0, 0.0, PI, golden, 2.0 * PI / 3.0], 1e-9, &AdmissibleOptions::default()).unwrap();
        assert!(!a.is_line && a.arc.contains_arc);
        let v: Vec<_> = a.verdicts.iter().map(|c| c.verdict.clone()).collect();
        assert!(matches!(v[0], RotationVerdict::Rejected(RejectReason::RationalComponents { n: 4, .. } | RejectReason::RationalExcludedHit { n: 4, .. })), "{}", v[0]);
        assert_eq!(v[1], RotationVerdict::Admissible(RotationClass::Identity));
        assert_eq!(v[2], RotationVerdict::Admissible(RotationClass::PointReflection));
        assert!(matches!(v[3], RotationVerdict::Rejected(RejectReason::IrrationalOrbit { .. })), "{}", v[3]);
        assert!(matches!(v[4], RotationVerdict::Rejected(_)), "{}", v[4]);
    }

    proptest! {
        #[test]
        fn arc_detection_monotone_in_resolution(raw in prop::collection::vec(0.0..(2.0 * PI), 3..200), r in 0.001..0.5f64, factor in 1.0..10.0f64) {
            let d = DirectionSet::new(raw, "p").unwrap();
            let fine = contains_arc(&d, r).unwrap();
            let coarse = contains_arc(&d, r * factor).unwrap();
            prop_assert!(!fine.contains_arc || coarse.contains_arc);
        }

        #[test]
        fn zero_rotation_is_invariant(raw in prop::collection::vec(0.0..(2.0 * PI), 1..100)) {
            let d = DirectionSet::new(raw, "p").unwrap();
            let r = invariance_check(&d, 0.0, 1e-12).unwrap();
            prop_assert!(r.forward_ok && r.worst_defect == 0.0);
        }

        #[test]
        fn line_images_have_two_antipodal_clusters(a in -10.0..10.0f64, b in -10.0..10.0f64, x0 in 0.0..1.0f64) {
            let g = sample(&FunctionSpec::affine(a, b), 256).unwrap();
            let d = phi_image(&g, Point::new(x0, a * x0 + b), Some(1e-3)).unwrap();
            prop_assert!(is_line_direction_set(&d, 1e-9));
        }

        #[test]
        fn other_rotations_never_admissible(theta in 0.0..(2.0 * PI), seed_shift in 0.0..0.3f64) {
            let t = sample(&FunctionSpec::<f64>::Weierstrass { a: 0.5, b: 3, depth: 20 }, 2048).unwrap();
            let opts = AdmissibleOptions { base_point: Some(Point::new(seed_shift, t.value_at(seed_shift))), ..AdmissibleOptions::default() };
            let a = admissible_rotations(&t, &[theta], 1e-9, &opts).unwrap();
            if a.arc.contains_arc && !a.is_line && a.verdicts[0].class == RotationClass::Other {
                prop_assert!(!matches!(a.verdicts[0].verdict, RotationVerdict::Admissible(_)));
            }
        }
    }
}
