//! Slope witnesses, the Cantor-like refinement `C_n`, the affine-deviation
//! certificate and the two-map IFS of an affine graph.
//!
//! Witness intervals are `I_α = A_α([0, 1])` for the axis-aligned maps
//! `A_i`. Prepending a letter nests: `I_{(j)α} = A_α(A_j([0, 1])) ⊂ I_α`
//! whenever every `A_j([0, 1]) ⊂ [0, 1]`, so the search for the shortest
//! word whose interval holds the midpoint only follows children of words
//! that already hold it.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Interval, Point};
use crate::graph::SampledGraph;
use crate::scalar::Real;
use crate::similitude::{AxisSimilitude, Ifs, RotationClass, Similitude, Word, DEFAULT_ROTATION_TOL};

/// Containment tolerance for word intervals.
pub const CONTAIN_TOL: f64 = 1e-12;
pub const MAX_SEARCH_DEPTH: usize = 60;
const MAX_CANDIDATES: usize = 1 << 16;

/// `S₁(v) = ½v + (0, f(0)/2)` and `S₂(v) = ½v + (½, f(1)/2)` for
/// `f(x) = a·x + b`; their attractor is the graph of `f` on `[0, 1]`.
pub fn converse_ifs<T: Real>(a: T, b: T) -> Result<Ifs<T>> {
    let half = T::lit(0.5);
    Ifs::from_params(&[
        (half, T::zero(), Point::new(T::zero(), b * half)),
        (half, T::zero(), Point::new(half, (a + b) * half)),
    ])
}

/// Whether `s` maps the chord to one with the same slope, within `tol`.
pub fn slope_invariance_check<T: Real>(
    s: &Similitude<T>,
    chord: (Point<T>, Point<T>),
    image_chord: (Point<T>, Point<T>),
    tol: T,
) -> Result<bool> {
    if s.classify_rotation(T::lit(DEFAULT_ROTATION_TOL)) == RotationClass::Other {
        return Err(Error::Precondition(format!(
            "rotation angle {} is neither 0 nor π",
            s.angle()
        )));
    }
    let (p, q) = chord;
    let (pi, qi) = image_chord;
    if s.apply(p).distance(pi) > tol || s.apply(q).distance(qi) > tol {
        return Err(Error::Precondition("image chord is not the image of the chord".into()));
    }
    let slope = |a: Point<T>, b: Point<T>| {
        let dx = b.x - a.x;
        if dx == T::zero() {
            Err(Error::VerticalChord(a.x.to_f64_lossy()))
        } else {
            Ok((b.y - a.y) / dx)
        }
    };
    Ok((slope(p, q)? - slope(pi, qi)?).abs() <= tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeWitness<T> {
    /// `[s, t] = I_α`.
    pub interval: Interval<T>,
    pub word: Word,
    pub depth: usize,
    /// `(f(t) − f(s))/(t − s)` on the sampled graph.
    pub slope: T,
    /// Allowed `|slope − λ|`: `(2·eval_error + 2·modulus)/(t − s)`.
    pub slack: T,
}

fn unit_interval_maps<T: Real>(ifs: &Ifs<T>) -> Result<Vec<AxisSimilitude<T>>> {
    let maps = ifs.axis_aligned(T::lit(DEFAULT_ROTATION_TOL))?;
    let tol = T::lit(CONTAIN_TOL);
    for (i, m) in maps.iter().enumerate() {
        let im = m.image_x(&Interval::unit());
        if im.lo < -tol || im.hi > T::one() + tol {
            return Err(Error::Precondition(format!(
                "map {} sends [0, 1] to [{}, {}], outside [0, 1]",
                i + 1,
                im.lo,
                im.hi
            )));
        }
    }
    Ok(maps)
}

/// Shortest word whose interval holds the midpoint of `target` and has
/// length at most half of it; the lexicographically smallest on ties.
pub fn find_slope_subinterval<T: Real>(ifs: &Ifs<T>, g: &SampledGraph<T>, target: &Interval<T>) -> Result<SlopeWitness<T>> {
    let maps = unit_interval_maps(ifs)?;
    find_with_maps(&maps, g, target)
}

fn find_with_maps<T: Real>(maps: &[AxisSimilitude<T>], g: &SampledGraph<T>, target: &Interval<T>) -> Result<SlopeWitness<T>> {
    let tol = T::lit(CONTAIN_TOL);
    if !(target.length() > T::zero()) {
        return Err(Error::InvalidArgument("target interval must have positive length".into()));
    }
    if target.lo < -tol || target.hi > T::one() + tol {
        return Err(Error::OutsideUnitInterval {
            lo: target.lo.to_f64_lossy(),
            hi: target.hi.to_f64_lossy(),
        });
    }
    let mid = target.midpoint();
    let half = target.length() / T::lit(2.0);
    let unit = Interval::unit();
    // candidates hold letters innermost-first
    let mut level: Vec<(Vec<usize>, AxisSimilitude<T>)> = vec![(Vec::new(), AxisSimilitude::identity())];
    for depth in 1..=MAX_SEARCH_DEPTH {
        let mut next = Vec::new();
        for (w, m) in &level {
            for (j, mj) in maps.iter().enumerate() {
                let child = mj.then(m);
                if child.image_x(&unit).contains_with_tol(mid, tol) {
                    let mut cw = Vec::with_capacity(w.len() + 1);
                    cw.push(j);
                    cw.extend_from_slice(w);
                    next.push((cw, child));
                }
            }
        }
        if next.is_empty() {
            return Err(Error::NoContainingWord {
                depth,
                point: mid.to_f64_lossy(),
            });
        }
        if next.len() > MAX_CANDIDATES {
            return Err(Error::Precondition(format!(
                "more than {MAX_CANDIDATES} words hold the midpoint at depth {depth}"
            )));
        }
        let best = next
            .iter()
            .filter(|(_, m)| m.ratio() <= half * (T::one() + tol))
            .min_by(|a, b| a.0.cmp(&b.0));
        if let Some((w, m)) = best {
            let iv = m.image_x(&unit);
            let (s, t) = (iv.lo, iv.hi);
            let len = t - s;
            let slope = (g.value_at(t) - g.value_at(s)) / len;
            let slack = (T::lit(2.0) * g.eval_error() + T::lit(2.0) * g.modulus()) / len;
            return Ok(SlopeWitness {
                interval: iv,
                word: Word::new(w.clone()).expect("nonempty"),
                depth,
                slope,
                slack,
            });
        }
        level = next;
    }
    Err(Error::DepthExceeded(MAX_SEARCH_DEPTH))
}

/// A removed open gap `(lo, hi)` with the witness that produced it. Gaps cut
/// out of degenerate intervals are empty and carry no witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Gap<T> {
    pub interval: Interval<T>,
    pub witness: Option<SlopeWitness<T>>,
}

/// `C_n`: `2ⁿ` closed intervals in order with the `2ⁿ − 1` gaps between them.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorStage<T> {
    pub stage: usize,
    pub intervals: Vec<Interval<T>>,
    pub gaps: Vec<Gap<T>>,
    pub total_length: T,
}

impl<T: Real> CantorStage<T> {
    pub fn initial(target: Interval<T>) -> Self {
        Self {
            stage: 0,
            intervals: vec![target],
            gaps: Vec::new(),
            total_length: target.length(),
        }
    }

    pub fn gap_length(&self) -> T {
        self.gaps.iter().map(|g| g.interval.length()).sum()
    }

    /// Gaps removed at the latest refinement (every other gap).
    pub fn newest_gaps(&self) -> impl Iterator<Item = &Gap<T>> {
        self.gaps.iter().step_by(2)
    }
}

/// Removes the open interior of a slope witness from every interval.
pub fn cantor_refine<T: Real>(ifs: &Ifs<T>, g: &SampledGraph<T>, stage: &CantorStage<T>) -> Result<CantorStage<T>> {
    let maps = unit_interval_maps(ifs)?;
    refine_with_maps(&maps, g, stage)
}

fn refine_with_maps<T: Real>(maps: &[AxisSimilitude<T>], g: &SampledGraph<T>, stage: &CantorStage<T>) -> Result<CantorStage<T>> {
    let splits = stage
        .intervals
        .par_iter()
        .map(|iv| {
            if iv.length() > T::zero() {
                let w = find_with_maps(maps, g, iv)?;
                let (s, t) = (w.interval.lo.max(iv.lo), w.interval.hi.min(iv.hi));
                Ok((Interval::new(iv.lo, s), Gap { interval: Interval::new(s, t), witness: Some(w) }, Interval::new(t, iv.hi)))
            } else {
                Ok((*iv, Gap { interval: *iv, witness: None }, *iv))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut intervals = Vec::with_capacity(2 * splits.len());
    let mut gaps = Vec::with_capacity(2 * splits.len());
    for (i, (left, gap, right)) in splits.into_iter().enumerate() {
        if i > 0 {
            gaps.push(stage.gaps[i - 1].clone());
        }
        intervals.push(left);
        gaps.push(gap);
        intervals.push(right);
    }
    let total_length = intervals.iter().map(|i| i.length()).sum();
    Ok(CantorStage {
        stage: stage.stage + 1,
        intervals,
        gaps,
        total_length,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageReport<T> {
    pub stage: usize,
    pub interval_count: usize,
    pub total_length: T,
    /// `(1 − c)ⁿ(b − a)`.
    pub length_bound: T,
    /// `|Σ intervals + Σ gaps − (b − a)|`.
    pub partition_error: T,
    /// `|f(b) − f(a) − Σ interval increments − Σ gap increments|`.
    pub telescoping_error: T,
    /// Largest `|slope − λ| − slack` over this stage's new gaps (≤ 0 when all fit).
    pub worst_gap_excess: T,
    /// `(L + |λ|)(1 − c)ⁿ(b − a)`.
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AffineVerdict {
    AffineConsistent,
    NotSelfSimilar { stage: usize, reason: String },
}

impl fmt::Display for AffineVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AffineConsistent => f.write_str("AFFINE-CONSISTENT"),
            Self::NotSelfSimilar { stage, reason } => write!(f, "NOT-SELF-SIMILAR at stage {stage}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineCertificate<T> {
    pub interval: Interval<T>,
    pub lambda: T,
    pub lipschitz: T,
    pub c: T,
    pub stages: usize,
    pub measured_deviation: T,
    /// Bound at the last completed stage.
    pub bound: T,
    /// Slack added to the bound for sampling: `2·eval_error + 2·modulus`.
    pub slack: T,
    pub reports: Vec<StageReport<T>>,
    pub final_stage: CantorStage<T>,
    pub verdict: AffineVerdict,
}

/// Runs `stages` refinements of `[a, b]` and checks at each stage the
/// partition and telescoping identities, `|C_n| ≤ (1 − c)ⁿ(b − a)`, the gap
/// slopes against `λ = f(1) − f(0)`, `|f(v) − f(u)| ≤ L·|v − u|` on the
/// remaining intervals, and `|f(b) − f(a) − λ(b − a)| ≤ (L + |λ|)(1 − c)ⁿ(b − a)`.
/// `lipschitz` is `L = 4ω_f` from a passing cover certificate.
pub fn certify_affine<T: Real>(
    ifs: &Ifs<T>,
    g: &SampledGraph<T>,
    target: &Interval<T>,
    stages: usize,
    lipschitz: T,
) -> Result<AffineCertificate<T>> {
    let maps = unit_interval_maps(ifs)?;
    if !(target.length() > T::zero()) {
        return Err(Error::InvalidArgument("target interval must have positive length".into()));
    }
    let lambda = g.endpoint_slope();
    let c = ifs.c();
    let width = target.length();
    let slack = T::lit(2.0) * g.eval_error() + T::lit(2.0) * g.modulus();
    let deviation = (g.value_at(target.hi) - g.value_at(target.lo) - lambda * width).abs();
    let exact_tol = T::lit(CONTAIN_TOL);
    let mut stage = CantorStage::initial(*target);
    let mut reports = Vec::with_capacity(stages);
    let mut verdict = AffineVerdict::AffineConsistent;
    let mut bound = (lipschitz + lambda.abs()) * width;

    for n in 1..=stages {
        stage = match refine_with_maps(&maps, g, &stage) {
            Ok(s) => s,
            Err(e @ (Error::NoContainingWord { .. } | Error::DepthExceeded(_))) => {
                verdict = AffineVerdict::NotSelfSimilar {
                    stage: n,
                    reason: e.to_string(),
                };
                break;
            }
            Err(e) => return Err(e),
        };
        let shrink = (T::one() - c).powi(n as i32);
        let length_bound = shrink * width;
        bound = (lipschitz + lambda.abs()) * length_bound;
        let partition_error = (stage.total_length + stage.gap_length() - width).abs();
        let mut increments = T::zero();
        let mut scale = T::zero();
        let mut lip_excess: Option<(Interval<T>, T)> = None;
        for iv in &stage.intervals {
            let d = g.value_at(iv.hi) - g.value_at(iv.lo);
            increments = increments + d;
            scale = scale + d.abs();
            let excess = d.abs() - (lipschitz * iv.length() + slack);
            if excess > T::zero() && lip_excess.is_none() {
                lip_excess = Some((*iv, d));
            }
        }
        for gp in &stage.gaps {
            let d = g.value_at(gp.interval.hi) - g.value_at(gp.interval.lo);
            increments = increments + d;
            scale = scale + d.abs();
        }
        let total_increment = g.value_at(target.hi) - g.value_at(target.lo);
        let telescoping_error = (total_increment - increments).abs();
        let worst_gap_excess = stage
            .newest_gaps()
            .filter_map(|gp| gp.witness.as_ref())
            .map(|w| (w.slope - lambda).abs() - w.slack)
            .fold(T::neg_infinity(), T::max);
        let worst_gap_excess = if worst_gap_excess.is_finite() { worst_gap_excess } else { T::zero() };
        reports.push(StageReport {
            stage: n,
            interval_count: stage.intervals.len(),
            total_length: stage.total_length,
            length_bound,
            partition_error,
            telescoping_error,
            worst_gap_excess,
            bound,
        });

        let fail = if stage.intervals.len() != 1 << n {
            Some(format!("{} intervals instead of {}", stage.intervals.len(), 1u64 << n))
        } else if partition_error > exact_tol {
            Some(format!("partition identity off by {partition_error:.3e}"))
        } else if telescoping_error > exact_tol * (T::one() + scale) {
            Some(format!("telescoping identity off by {telescoping_error:.3e}"))
        } else if stage.total_length > length_bound + exact_tol {
            Some(format!(
                "|C_n| = {} exceeds (1−c)ⁿ(b−a) = {}",
                stage.total_length, length_bound
            ))
        } else if worst_gap_excess > T::zero() {
            let w = stage
                .newest_gaps()
                .filter_map(|gp| gp.witness.as_ref())
                .find(|w| (w.slope - lambda).abs() > w.slack)
                .expect("a gap exceeds its slack");
            Some(format!(
                "gap {} over word {} has slope {} but λ = {} (slack {})",
                w.interval.lo, w.word, w.slope, lambda, w.slack
            ))
        } else if let Some((iv, d)) = lip_excess {
            Some(format!(
                "|f(v) − f(u)| = {} exceeds L·|v − u| on [{}, {}]",
                d.abs(),
                iv.lo,
                iv.hi
            ))
        } else if deviation > bound + slack {
            Some(format!(
                "deviation {deviation} exceeds (L+|λ|)(1−c)ⁿ(b−a) = {bound} + slack {slack}"
            ))
        } else {
            None
        };
        if let Some(reason) = fail {
            verdict = AffineVerdict::NotSelfSimilar { stage: n, reason };
            break;
        }
    }
    Ok(AffineCertificate {
        interval: *target,
        lambda,
        lipschitz,
        c,
        stages,
        measured_deviation: deviation,
        bound,
        slack,
        reports,
        final_stage: stage,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::{hausdorff_distance, hutchinson_step};
    use crate::graph::{sample, FunctionSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn iv(a: f64, b: f64) -> Interval<f64> {
        Interval::new(a, b)
    }

    /// All words up to `max_depth`, shortest first, smallest word among the
    /// shortest whose interval holds the midpoint with length ≤ half.
    fn exhaustive_witness(ifs: &Ifs<f64>, target: &Interval<f64>, max_depth: usize) -> Option<(Word, Interval<f64>)> {
        let mid = target.midpoint();
        let half = target.length() / 2.0;
        for depth in 1..=max_depth {
            let k = ifs.k();
            let mut found: Vec<(Word, Interval<f64>)> = Vec::new();
            for code in 0..k.pow(depth as u32) {
                let mut letters = Vec::with_capacity(depth);
                let mut c = code;
                for _ in 0..depth {
                    letters.push(c % k);
                    c /= k;
                }
                letters.reverse();
                let w = Word::new(letters).unwrap();
                let s = crate::similitude::compose_word(ifs, &w).unwrap();
                let a = s.apply(Point::new(0.0, 0.0)).x;
                let b = s.apply(Point::new(1.0, 0.0)).x;
                let i = Interval::new(a, b);
                if i.contains_with_tol(mid, 1e-12) && i.length() <= half * (1.0 + 1e-12) {
                    found.push((w, i));
                }
            }
            if let Some(best) = found.into_iter().min_by(|a, b| a.0.cmp(&b.0)) {
                return Some(best);
            }
        }
        None
    }

    #[test]
    fn converse_examples() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let m = ifs.maps();
        assert_eq!((m[0].ratio(), m[0].angle(), m[0].translation()), (0.5, 0.0, Point::new(0.0, 0.0)));
        assert_eq!(m[1].translation(), Point::new(0.5, 0.5));
        let c = converse_ifs(0.0, 5.0).unwrap();
        assert_eq!(c.maps()[0].fixed_point(), Point::new(0.0, 5.0));
        assert_eq!(c.maps()[1].fixed_point(), Point::new(1.0, 5.0));
        assert_eq!(converse_ifs(-2.0, 1.0).unwrap().maps()[1].translation(), Point::new(0.5, -0.5));
    }

    #[test]
    fn converse_residual_is_grid_quantization() {
        for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for b in [-2.0, 0.0, 2.0] {
                let n = 1024;
                let g = sample(&FunctionSpec::affine(a, b), n).unwrap();
                let ps = g.point_set();
                let d = hausdorff_distance(&ps, &hutchinson_step(&converse_ifs(a, b).unwrap(), &ps)).unwrap();
                assert!(d <= 2.0 / n as f64, "a={a} b={b} d={d}");
            }
        }
    }

    #[test]
    fn slope_invariance_examples() {
        let p = (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
        let s = Similitude::new(0.5, 0.0, Point::new(0.25, 0.0)).unwrap();
        assert!(slope_invariance_check(&s, p, (s.apply(p.0), s.apply(p.1)), 1e-12).unwrap());
        let r = Similitude::new(0.5, PI, Point::new(0.5, 0.5)).unwrap();
        assert!(slope_invariance_check(&r, p, (r.apply(p.0), r.apply(p.1)), 1e-12).unwrap());
        let q = Similitude::new(0.5, PI / 2.0, Point::origin()).unwrap();
        assert!(matches!(
            slope_invariance_check(&q, p, (q.apply(p.0), q.apply(p.1)), 1e-12),
            Err(Error::Precondition(_))
        ));
        let vert = (Point::new(0.3, 0.0), Point::new(0.3, 1.0));
        assert!(matches!(
            slope_invariance_check(&s, vert, (s.apply(vert.0), s.apply(vert.1)), 1e-12),
            Err(Error::VerticalChord(_))
        ));
    }

    #[test]
    fn witness_examples() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 1024).unwrap();
        let w = find_slope_subinterval(&ifs, &g, &Interval::unit()).unwrap();
        assert_eq!(w.depth, 1);
        assert_eq!(w.interval, iv(0.0, 0.5));
        assert_eq!(w.word, Word::from_one_based(&[1]).unwrap());
        assert!((w.slope - 1.0).abs() <= w.slack);
        let w = find_slope_subinterval(&ifs, &g, &iv(0.0, 0.5)).unwrap();
        assert_eq!(w.interval.length(), 0.25);
        assert!(w.interval.contains(0.25));
        assert!((w.slope - 1.0).abs() < 1e-12);

        let mixed = Ifs::from_params(&[(0.5, 0.0, Point::origin()), (1.0 / 3.0, 0.0, Point::new(2.0 / 3.0, 0.0)), (1.0 / 6.0, 0.0, Point::new(0.5, 0.0))]).unwrap();
        let c = Ifs::from_params(&[(0.5_f64, 0.0, Point::origin()), (1.0 / 3.0, 0.0, Point::new(2.0 / 3.0, 0.0))]).unwrap().c();
        assert!((c - 1.0 / 6.0).abs() < 1e-16);
        for (a, b) in [(0.0, 1.0), (0.1, 0.9), (0.37, 0.41), (0.6, 0.61)] {
            let t = iv(a, b);
            let w = find_slope_subinterval(&mixed, &g, &t).unwrap();
            assert!(w.interval.length() >= mixed.c() * t.length() - 1e-15);
            assert!(w.interval.length() <= t.length() / 2.0 + 1e-15);
            assert!(w.interval.contains_with_tol(t.midpoint(), 1e-12));
        }
    }

    #[test]
    fn witness_errors() {
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 64).unwrap();
        let gap = Ifs::from_params(&[(0.25, 0.0, Point::origin()), (0.25, 0.0, Point::new(0.75, 0.0))]).unwrap();
        assert!(matches!(
            find_slope_subinterval(&gap, &g, &Interval::unit()),
            Err(Error::NoContainingWord { depth: 1, .. })
        ));
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        assert!(find_slope_subinterval(&ifs, &g, &Interval::point(0.5)).is_err());
        let out = Ifs::from_params(&[(0.5, 0.0, Point::new(0.8, 0.0))]).unwrap();
        assert!(matches!(find_slope_subinterval(&out, &g, &Interval::unit()), Err(Error::Precondition(_))));
    }

    #[test]
    fn cantor_stages() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 1024).unwrap();
        let s0 = CantorStage::initial(iv(0.1, 0.9));
        let s1 = cantor_refine(&ifs, &g, &s0).unwrap();
        assert_eq!(s1.intervals.len(), 2);
        assert!(s1.total_length <= 0.75 * 0.8);
        let mut s = s1;
        for n in 2..=6 {
            s = cantor_refine(&ifs, &g, &s).unwrap();
            assert_eq!(s.intervals.len(), 1 << n);
            assert_eq!(s.gaps.len(), (1 << n) - 1);
            assert!(s.total_length <= 0.75f64.powi(n) * 0.8);
            for gp in s.gaps.iter().filter_map(|g| g.witness.as_ref()) {
                assert!((gp.slope - 1.0).abs() <= gp.slack);
            }
        }
    }

    #[test]
    fn affine_certificate_example() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 2048).unwrap();
        let cert = certify_affine(&ifs, &g, &Interval::unit(), 10, 4.0).unwrap();
        assert_eq!(cert.verdict, AffineVerdict::AffineConsistent);
        assert!(cert.measured_deviation <= 1e-9);
        assert!((cert.bound - 5.0 * 0.75f64.powi(10)).abs() < 1e-12);
        assert!((cert.bound - 0.2816).abs() < 1e-4);
        let bounds: Vec<f64> = cert.reports.iter().map(|r| r.bound).collect();
        assert!(bounds.windows(2).all(|w| w[1] < w[0]));

        let flat = sample(&FunctionSpec::affine(0.0, 3.0), 256).unwrap();
        let cert = certify_affine(&converse_ifs(0.0, 3.0).unwrap(), &flat, &iv(0.2, 0.7), 6, 0.0).unwrap();
        assert_eq!(cert.lambda, 0.0);
        assert_eq!(cert.measured_deviation, 0.0);
        assert_eq!(cert.verdict, AffineVerdict::AffineConsistent);
    }

    #[test]
    fn deep_certificate_on_converse_graph() {
        let ifs = converse_ifs(-1.5, 0.25).unwrap();
        let g = sample(&FunctionSpec::affine(-1.5, 0.25), 4096).unwrap();
        let cert = certify_affine(&ifs, &g, &iv(0.13, 0.77), 20, 6.0).unwrap();
        assert_eq!(cert.verdict, AffineVerdict::AffineConsistent, "{}", cert.verdict);
        assert_eq!(cert.final_stage.intervals.len(), 1 << 20);
    }

    #[test]
    fn takagi_is_not_certified() {
        let g = sample(&FunctionSpec::<f64>::takagi(), 4096).unwrap();
        let ifs = converse_ifs(0.0, 0.0).unwrap();
        let cert = certify_affine(&ifs, &g, &iv(0.0, 0.3), 10, 4.0 * 2.0 / 3.0).unwrap();
        assert!(matches!(cert.verdict, AffineVerdict::NotSelfSimilar { .. }));
    }

    proptest! {
        #[test]
        fn witness_matches_exhaustive_enumeration(a in 0.0..1.0f64, w in 0.01..1.0f64, reflect in any::<bool>()) {
            let b = (a + w).min(1.0);
            prop_assume!(b - a > 1e-3);
            let ifs = if reflect {
                Ifs::from_params(&[(0.5, PI, Point::new(0.5, 0.5)), (0.5, 0.0, Point::new(0.5, 0.0))]).unwrap()
            } else {
                Ifs::from_params(&[(0.4, 0.0, Point::origin()), (0.6, 0.0, Point::new(0.4, 0.0))]).unwrap()
            };
            let g = sample(&FunctionSpec::affine(1.0, 0.0), 64).unwrap();
            let t = iv(a, b);
            let got = find_slope_subinterval(&ifs, &g, &t).unwrap();
            if let Some((word, interval)) = exhaustive_witness(&ifs, &t, 8) {
                prop_assert_eq!(&got.word, &word);
                prop_assert!((got.interval.lo - interval.lo).abs() < 1e-12 && (got.interval.hi - interval.hi).abs() < 1e-12);
                prop_assert!(got.interval.length() >= ifs.c() * t.length() * (1.0 - 1e-12));
            }
        }

        #[test]
        fn converse_graphs_certify(a in -3.0..3.0f64, b in -3.0..3.0f64, lo in 0.0..0.5f64, w in 0.05..0.5f64, stages in 1usize..8) {
            let g = sample(&FunctionSpec::affine(a, b), 512).unwrap();
            let cert = certify_affine(&converse_ifs(a, b).unwrap(), &g, &iv(lo, lo + w), stages, 4.0 * a.abs()).unwrap();
            prop_assert_eq!(cert.verdict, AffineVerdict::AffineConsistent);
            let st = &cert.final_stage;
            prop_assert_eq!(st.intervals.len(), 1 << stages);
            prop_assert!(st.total_length <= 0.75f64.powi(stages as i32) * w);
            prop_assert!((st.total_length + st.gap_length() - w).abs() <= 1e-12);
        }
    }
}
