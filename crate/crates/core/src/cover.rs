//! Interval families `I_α = π(S_α(R))`, minimal subcovers and the
//! `4ω_f` Lipschitz certificate.
//!
//! All interval endpoints come from word arithmetic on the axis-aligned
//! maps, never from samples. Sampled quantities (oscillations, increments)
//! are compared with a declared slack of `8·eval_error + 4·modulus`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Interval, Rectangle};
use crate::graph::{framing_rectangle, oscillation, SampledGraph};
use crate::scalar::Real;
use crate::similitude::{AxisSimilitude, Ifs, Word, DEFAULT_ROTATION_TOL};

/// Tolerance for interval coverage on word-generated endpoints.
pub const COVER_TOL: f64 = 1e-12;
/// Refuse to enumerate more words than this at one depth.
pub const MAX_WORDS: usize = 1 << 22;
pub const DEFAULT_PAIR_BUDGET: usize = 4096;

/// Least `n₀ ≥ 1` with `r_max^{n₀} ≤ δ`.
pub fn depth_for_width<T: Real>(ifs: &Ifs<T>, delta: T) -> Result<usize> {
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::InvalidArgument(format!("δ = {delta} is not in (0, 1]")));
    }
    let r = ifs.r_max();
    let mut p = r;
    let mut n = 1;
    while p > delta {
        p = p * r;
        n += 1;
    }
    Ok(n)
}

/// Intervals `I_α` for all `kⁿ⁰` words in lexicographic order, checking that
/// they cover the base of `r`.
pub fn generate_intervals<T: Real>(ifs: &Ifs<T>, r: &Rectangle<T>, n0: usize) -> Result<Vec<(Word, Interval<T>)>> {
    let family = word_maps(ifs, n0)?;
    let out: Vec<(Word, Interval<T>)> = family
        .into_iter()
        .map(|(w, m)| (w, m.image_x(&r.x_interval)))
        .collect();
    let ivs: Vec<Interval<T>> = out.iter().map(|(_, i)| *i).collect();
    if let Some(p) = first_uncovered(&ivs, &r.x_interval, T::lit(COVER_TOL)) {
        return Err(Error::NotCovering {
            first_uncovered: p.to_f64_lossy(),
        });
    }
    Ok(out)
}

/// All composed axis-aligned maps at depth `n0`, lexicographic in the word.
pub fn word_maps<T: Real>(ifs: &Ifs<T>, n0: usize) -> Result<Vec<(Word, AxisSimilitude<T>)>> {
    if n0 == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    let maps = ifs.axis_aligned(T::lit(DEFAULT_ROTATION_TOL))?;
    let k = maps.len();
    let total = (k as f64).powi(n0 as i32);
    if total > MAX_WORDS as f64 {
        return Err(Error::InvalidArgument(format!("{k}^{n0} words exceed the enumeration cap")));
    }
    let mut level: Vec<(Vec<usize>, AxisSimilitude<T>)> = vec![(Vec::new(), AxisSimilitude::identity())];
    for _ in 0..n0 {
        let mut next = Vec::with_capacity(level.len() * k);
        for (w, m) in &level {
            for (l, map) in maps.iter().enumerate() {
                let mut w2 = w.clone();
                w2.push(l);
                next.push((w2, m.then(map)));
            }
        }
        level = next;
    }
    Ok(level
        .into_iter()
        .map(|(w, m)| (Word::new(w).expect("nonempty"), m))
        .collect())
}

/// First point of `target` not covered by the union of `intervals`, if any.
pub fn first_uncovered<T: Real>(intervals: &[Interval<T>], target: &Interval<T>, tol: T) -> Option<T> {
    let mut sorted: Vec<&Interval<T>> = intervals.iter().collect();
    sorted.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let mut reach = target.lo;
    let mut started = false;
    for i in sorted {
        if i.hi < reach - tol {
            continue;
        }
        if i.lo > reach + tol {
            break;
        }
        started = true;
        reach = reach.max(i.hi);
        if reach >= target.hi - tol {
            return None;
        }
    }
    (!started || reach < target.hi - tol).then_some(reach)
}

fn covers<T: Real>(intervals: &[Interval<T>], target: &Interval<T>, tol: T) -> bool {
    first_uncovered(intervals, target, tol).is_none()
}

/// Greedy cover of `target` followed by prune passes until removing any
/// member breaks coverage. Returns indices into `intervals` ordered by left
/// endpoint.
pub fn minimal_subcover<T: Real>(intervals: &[Interval<T>], target: &Interval<T>, tol: T) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| intervals[a].lo.partial_cmp(&intervals[b].lo).unwrap().then(a.cmp(&b)));
    let chosen = greedy_sorted(intervals, &order, &prefix_argmax(intervals, &order), target, tol)?;
    Ok(prune(intervals, chosen, target, tol))
}

/// Index into `order` of the interval with the largest right endpoint among
/// `order[..=j]`.
fn prefix_argmax<T: Real>(intervals: &[Interval<T>], order: &[usize]) -> Vec<usize> {
    let mut best = 0;
    order
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            if intervals[i].hi > intervals[order[best]].hi {
                best = j;
            }
            best
        })
        .collect()
}

fn greedy_sorted<T: Real>(
    intervals: &[Interval<T>],
    order: &[usize],
    argmax: &[usize],
    target: &Interval<T>,
    tol: T,
) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut frontier = target.lo;
    loop {
        let count = order.partition_point(|&i| intervals[i].lo <= frontier + tol);
        if count == 0 {
            return Err(Error::NotCovering {
                first_uncovered: frontier.to_f64_lossy(),
            });
        }
        let pick = order[argmax[count - 1]];
        let hi = intervals[pick].hi;
        let progressed = chosen.is_empty() || hi > frontier + tol;
        if hi < frontier - tol || !progressed {
            return Err(Error::NotCovering {
                first_uncovered: frontier.to_f64_lossy(),
            });
        }
        chosen.push(pick);
        frontier = hi;
        if frontier >= target.hi - tol {
            return Ok(chosen);
        }
    }
}

fn prune<T: Real>(intervals: &[Interval<T>], mut chosen: Vec<usize>, target: &Interval<T>, tol: T) -> Vec<usize> {
    loop {
        let removable = (0..chosen.len()).rev().find(|&j| {
            let rest: Vec<Interval<T>> = chosen
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != j)
                .map(|(_, &i)| intervals[i])
                .collect();
            !rest.is_empty() && covers(&rest, target, tol)
        });
        match removable {
            Some(j) => {
                chosen.remove(j);
            }
            None => break,
        }
    }
    chosen.sort_by(|&a, &b| intervals[a].lo.partial_cmp(&intervals[b].lo).unwrap().then(a.cmp(&b)));
    chosen
}

/// Why a cover certificate failed, with the offending data.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverFailure<T> {
    /// The depth-`n₀` intervals leave part of `[0, 1]` uncovered.
    NotCovering { point: T },
    /// `|ω_f(I_α) − r_α·ω_f|` exceeds its slack.
    OscillationScaling { word: Word, oscillation: T, expected: T },
    /// A minimal subcover has `I_j ∩ I_{j+2} ≠ ∅`.
    Overlap { x: T, y: T, j: usize },
    /// Interior odd or even members sum to more than `|x − y|`.
    ParitySum { x: T, y: T, odd: bool, sum: T },
    TotalLength { x: T, y: T, total: T, bound: T },
    /// `Σ ω_f(I_j) < |f(y) − f(x)|` beyond slack.
    Chain { x: T, y: T, increment: T, chain: T },
    /// `|f(y) − f(x)| > 4ω_f·|x − y|` beyond slack.
    Ratio { x: T, y: T, increment: T, bound: T },
}

impl<T: Real> fmt::Display for CoverFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotCovering { point } => write!(f, "intervals leave {point:.17e} uncovered"),
            Self::OscillationScaling { word, oscillation, expected } => write!(
                f,
                "word {word}: oscillation {oscillation:.17e} differs from r_α·ω_f = {expected:.17e}"
            ),
            Self::Overlap { x, y, j } => write!(f, "pair ({x:.17e}, {y:.17e}): I_{j} meets I_{}", j + 2),
            Self::ParitySum { x, y, odd, sum } => write!(
                f,
                "pair ({x:.17e}, {y:.17e}): interior {} lengths sum to {sum:.17e}",
                if *odd { "odd" } else { "even" }
            ),
            Self::TotalLength { x, y, total, bound } => {
                write!(f, "pair ({x:.17e}, {y:.17e}): total length {total:.17e} > {bound:.17e}")
            }
            Self::Chain { x, y, increment, chain } => write!(
                f,
                "pair ({x:.17e}, {y:.17e}): |Δf| = {increment:.17e} exceeds chained oscillation {chain:.17e}"
            ),
            Self::Ratio { x, y, increment, bound } => {
                write!(f, "pair ({x:.17e}, {y:.17e}): |Δf| = {increment:.17e} > 4ω_f·|x−y| = {bound:.17e}")
            }
        }
    }
}

/// Certificate for one `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCertificate<T> {
    /// Requested `δ`.
    pub delta: T,
    /// Pair distance actually tested, `round(δ/h)·h`.
    pub effective_delta: T,
    pub n0: usize,
    /// `Λ` of the pair with the largest total length.
    pub lambda_set: Vec<(Word, Interval<T>)>,
    pub total_length: T,
    pub bound_4delta: T,
    pub omega_f: T,
    pub lipschitz_constant: T,
    pub checked_pairs: usize,
    pub worst_ratio: T,
    pub max_scaling_defect: T,
    pub failure: Option<CoverFailure<T>>,
}

impl<T> CoverCertificate<T> {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCertificate<T> {
    pub omega_f: T,
    pub lipschitz_constant: T,
    pub slack: T,
    pub scaling_slack: T,
    pub grid_n: usize,
    pub pair_budget: usize,
    pub entries: Vec<CoverCertificate<T>>,
    pub worst_ratio: T,
}

impl<T: Real> LipschitzCertificate<T> {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed())
    }

    pub fn first_failure(&self) -> Option<(&CoverCertificate<T>, &CoverFailure<T>)> {
        self.entries.iter().find_map(|e| e.failure.as_ref().map(|f| (e, f)))
    }
}

/// Checks the cover argument for `f` being `4ω_f`-Lipschitz for every `δ`:
///
/// * `ω_f(I_α) = r_α·ω_f` for every depth-`n₀` word (up to slack);
/// * for sampled pairs at distance `δ`, the minimal subcover `Λ` has
///   separated `I_j`, `I_{j+2}`, odd and even interior sums at most `δ`,
///   total length at most `4δ`;
/// * `|f(y) − f(x)| ≤ Σ_Λ ω_f(I_j)` and `|f(y) − f(x)| ≤ 4ω_f·δ` (up to slack).
pub fn certify_lipschitz<T: Real>(
    ifs: &Ifs<T>,
    g: &SampledGraph<T>,
    deltas: &[T],
    pair_budget: usize,
) -> Result<LipschitzCertificate<T>> {
    if deltas.is_empty() {
        return Err(Error::Empty("δ list"));
    }
    if pair_budget == 0 {
        return Err(Error::ZeroBudget);
    }
    ifs.axis_aligned(T::lit(DEFAULT_ROTATION_TOL))?;
    let frame = framing_rectangle(g, &Interval::unit())?;
    let omega = frame.height();
    let slack = T::lit(8.0) * g.eval_error() + T::lit(4.0) * g.modulus();
    let scaling_slack = T::lit(4.0) * g.eval_error() + g.modulus();
    let entries = deltas
        .par_iter()
        .map(|&d| certify_delta(ifs, g, &frame, omega, d, pair_budget, slack, scaling_slack))
        .collect::<Result<Vec<_>>>()?;
    let worst_ratio = entries.iter().map(|e| e.worst_ratio).fold(T::zero(), T::max);
    Ok(LipschitzCertificate {
        omega_f: omega,
        lipschitz_constant: T::lit(4.0) * omega,
        slack,
        scaling_slack,
        grid_n: g.n(),
        pair_budget,
        entries,
        worst_ratio,
    })
}

#[allow(clippy::too_many_arguments)]
fn certify_delta<T: Real>(
    ifs: &Ifs<T>,
    g: &SampledGraph<T>,
    frame: &Rectangle<T>,
    omega: T,
    delta: T,
    pair_budget: usize,
    slack: T,
    scaling_slack: T,
) -> Result<CoverCertificate<T>> {
    let n = g.n();
    let steps = (delta * T::from_usize_lossy(n)).round().to_usize().unwrap_or(0).clamp(1, n);
    let d = T::from_usize_lossy(steps) * g.h();
    let n0 = depth_for_width(ifs, d)?;
    let lip = T::lit(4.0) * omega;
    let mut cert = CoverCertificate {
        delta,
        effective_delta: d,
        n0,
        lambda_set: Vec::new(),
        total_length: T::zero(),
        bound_4delta: T::lit(4.0) * d,
        omega_f: omega,
        lipschitz_constant: lip,
        checked_pairs: 0,
        worst_ratio: T::zero(),
        max_scaling_defect: T::zero(),
        failure: None,
    };
    let family = match generate_intervals(ifs, frame, n0) {
        Ok(f) => f,
        Err(Error::NotCovering { first_uncovered }) => {
            cert.failure = Some(CoverFailure::NotCovering {
                point: T::lit(first_uncovered),
            });
            return Ok(cert);
        }
        Err(e) => return Err(e),
    };
    let ratios: Vec<T> = word_maps(ifs, n0)?.iter().map(|(_, m)| m.ratio()).collect();

    for ((w, iv), &r) in family.iter().zip(&ratios) {
        let clipped = Interval::new(iv.lo.max(T::zero()), iv.hi.min(T::one()));
        let osc = oscillation(g, &clipped)?;
        let expected = r * omega;
        let defect = (osc - expected).abs();
        cert.max_scaling_defect = cert.max_scaling_defect.max(defect);
        if defect > scaling_slack && cert.failure.is_none() {
            cert.failure = Some(CoverFailure::OscillationScaling {
                word: w.clone(),
                oscillation: osc,
                expected,
            });
        }
    }

    let intervals: Vec<Interval<T>> = family.iter().map(|(_, i)| *i).collect();
    let mut order: Vec<usize> = (0..intervals.len()).collect();
    order.sort_by(|&a, &b| intervals[a].lo.partial_cmp(&intervals[b].lo).unwrap().then(a.cmp(&b)));
    let argmax = prefix_argmax(&intervals, &order);
    let tol = T::lit(COVER_TOL);

    let count = n - steps + 1;
    let picks: Vec<usize> = if count <= pair_budget {
        (0..count).collect()
    } else if pair_budget == 1 {
        vec![0]
    } else {
        (0..pair_budget).map(|j| j * (count - 1) / (pair_budget - 1)).collect()
    };
    let mut worst_total = -T::one();
    for &i in &picks {
        let (x, y) = (g.xs()[i], g.xs()[i + steps]);
        let target = Interval::new(x, y);
        let chosen = match greedy_sorted(&intervals, &order, &argmax, &target, tol) {
            Ok(c) => prune(&intervals, c, &target, tol),
            Err(Error::NotCovering { first_uncovered }) => {
                cert.failure.get_or_insert(CoverFailure::NotCovering {
                    point: T::lit(first_uncovered),
                });
                break;
            }
            Err(e) => return Err(e),
        };
        cert.checked_pairs += 1;
        let lam: Vec<Interval<T>> = chosen.iter().map(|&c| intervals[c]).collect();
        let total = lam.iter().map(|i| i.length()).sum::<T>();
        let increment = (g.ys()[i + steps] - g.ys()[i]).abs();
        cert.worst_ratio = cert.worst_ratio.max(increment / d);
        if total > worst_total {
            worst_total = total;
            cert.total_length = total;
            cert.lambda_set = chosen.iter().map(|&c| (family[c].0.clone(), intervals[c])).collect();
        }
        if cert.failure.is_none() {
            cert.failure = check_pair(g, &lam, x, y, d, increment, lip, slack)?;
        }
    }
    Ok(cert)
}

#[allow(clippy::too_many_arguments)]
fn check_pair<T: Real>(
    g: &SampledGraph<T>,
    lam: &[Interval<T>],
    x: T,
    y: T,
    d: T,
    increment: T,
    lip: T,
    slack: T,
) -> Result<Option<CoverFailure<T>>> {
    let m = lam.len();
    if let Some(j) = (0..m.saturating_sub(2)).find(|&j| lam[j].intersects(&lam[j + 2])) {
        return Ok(Some(CoverFailure::Overlap { x, y, j: j + 1 }));
    }
    // interior members, one-based positions 2..m-1
    for odd in [true, false] {
        let sum = (1..m.saturating_sub(1))
            .filter(|j| ((j + 1) % 2 == 1) == odd)
            .map(|j| lam[j].length())
            .sum::<T>();
        if sum > d + T::lit(COVER_TOL) {
            return Ok(Some(CoverFailure::ParitySum { x, y, odd, sum }));
        }
    }
    let total = lam.iter().map(|i| i.length()).sum::<T>();
    if total > T::lit(4.0) * d + T::lit(COVER_TOL) {
        return Ok(Some(CoverFailure::TotalLength {
            x,
            y,
            total,
            bound: T::lit(4.0) * d,
        }));
    }
    let mut chain = T::zero();
    for iv in lam {
        let clipped = Interval::new(iv.lo.max(T::zero()), iv.hi.min(T::one()));
        chain = chain + oscillation(g, &clipped)?;
    }
    if increment > chain + slack {
        return Ok(Some(CoverFailure::Chain { x, y, increment, chain }));
    }
    if increment > lip * d + slack {
        return Ok(Some(CoverFailure::Ratio {
            x,
            y,
            increment,
            bound: lip * d,
        }));
    }
    Ok(None)
}
