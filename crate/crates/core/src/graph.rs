//! Sampled function graphs on `[0, 1]`, the built-in function catalog,
//! oscillation and framing rectangles.
//!
//! Catalog functions are evaluated at grid nodes `i/n` with exact integer
//! arithmetic for their periodic phases, so the recorded `eval_error` is
//! the series truncation bound plus a few rounding units.

use crate::attractor::PointSet;
use crate::error::{Error, Result};
use crate::geometry::{Interval, Point, Rectangle};
use crate::scalar::Real;

pub const DEFAULT_TAKAGI_DEPTH: usize = 60;
pub const DEFAULT_WEIERSTRASS_A: f64 = 0.5;
pub const DEFAULT_WEIERSTRASS_B: u32 = 3;
pub const DEFAULT_WEIERSTRASS_DEPTH: usize = 40;
pub const DEFAULT_CANTOR_DEPTH: usize = 50;

/// Slack allowed when checking that an interval lies inside `[0, 1]`.
const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec<T> {
    Affine { slope: T, intercept: T },
    /// `T(x) = Σ_{n=0}^{depth} 2⁻ⁿ·dist(2ⁿx, ℤ)`.
    Takagi { depth: usize },
    /// `W(x) = Σ_{n=0}^{depth} aⁿ·cos(bⁿπx)` with `b` odd.
    Weierstrass { a: T, b: u32, depth: usize },
    /// Cantor–Lebesgue function by a base-3 digit scan of `depth` digits.
    CantorLebesgue { depth: usize },
    /// Samples of an arbitrary function with their own error bound; resampled
    /// by linear interpolation.
    Custom { xs: Vec<T>, ys: Vec<T>, eval_error: T },
}

impl<T: Real> FunctionSpec<T> {
    pub fn takagi() -> Self {
        Self::Takagi {
            depth: DEFAULT_TAKAGI_DEPTH,
        }
    }

    pub fn weierstrass() -> Self {
        Self::Weierstrass {
            a: T::lit(DEFAULT_WEIERSTRASS_A),
            b: DEFAULT_WEIERSTRASS_B,
            depth: DEFAULT_WEIERSTRASS_DEPTH,
        }
    }

    pub fn cantor_lebesgue() -> Self {
        Self::CantorLebesgue {
            depth: DEFAULT_CANTOR_DEPTH,
        }
    }

    pub fn affine(slope: T, intercept: T) -> Self {
        Self::Affine { slope, intercept }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Affine { .. } => "affine",
            Self::Takagi { .. } => "takagi",
            Self::Weierstrass { .. } => "weierstrass",
            Self::CantorLebesgue { .. } => "cantor",
            Self::Custom { .. } => "custom",
        }
    }

    pub fn depth(&self) -> Option<usize> {
        match *self {
            Self::Takagi { depth } | Self::Weierstrass { depth, .. } | Self::CantorLebesgue { depth } => Some(depth),
            _ => None,
        }
    }

    /// One-line parameter summary, e.g. `weierstrass(a=0.5, b=3, depth=40)`.
    pub fn describe(&self) -> String {
        match self {
            Self::Affine { slope, intercept } => format!("affine(a={slope}, b={intercept})"),
            Self::Takagi { depth } => format!("takagi(depth={depth})"),
            Self::Weierstrass { a, b, depth } => format!("weierstrass(a={a}, b={b}, depth={depth})"),
            Self::CantorLebesgue { depth } => format!("cantor(depth={depth})"),
            Self::Custom { xs, .. } => format!("custom(samples={})", xs.len()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Affine { slope, intercept } if !(slope.is_finite() && intercept.is_finite()) => {
                Err(Error::NonFinite("affine coefficients"))
            }
            Self::Takagi { depth } | Self::CantorLebesgue { depth } | Self::Weierstrass { depth, .. } if *depth == 0 => {
                Err(Error::InvalidArgument("series depth must be at least 1".into()))
            }
            Self::Weierstrass { a, b, .. } => {
                if !(*a > T::zero() && *a < T::one()) {
                    Err(Error::InvalidArgument(format!("Weierstrass a = {a} is not in (0, 1)")))
                } else if b % 2 == 0 {
                    Err(Error::InvalidArgument(format!("Weierstrass b = {b} is not odd")))
                } else {
                    Ok(())
                }
            }
            Self::Custom { xs, ys, eval_error } => {
                if xs.len() != ys.len() || xs.len() < 2 {
                    return Err(Error::InvalidArgument("custom samples need matching xs/ys of length ≥ 2".into()));
                }
                if xs.iter().chain(ys).any(|v| !v.is_finite()) || !eval_error.is_finite() {
                    return Err(Error::NonFinite("custom samples"));
                }
                if xs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidArgument("custom xs must be strictly increasing".into()));
                }
                if xs[0] > T::zero() || xs[xs.len() - 1] < T::one() {
                    return Err(Error::InvalidArgument("custom samples must span [0, 1]".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the (truncated) function at an arbitrary `x` in floating point.
    pub fn evaluate(&self, x: T) -> T {
        match self {
            Self::Affine { slope, intercept } => *slope * x + *intercept,
            Self::Takagi { depth } => {
                let mut scale = T::one();
                let mut y = x;
                let mut sum = T::zero();
                for _ in 0..=*depth {
                    sum = sum + scale * (y - y.round()).abs();
                    y = y + y;
                    scale = scale / T::lit(2.0);
                }
                sum
            }
            Self::Weierstrass { a, b, depth } => {
                let bf = T::from_u32(*b).unwrap();
                let mut weight = T::one();
                let mut freq = T::one();
                let mut sum = T::zero();
                for _ in 0..=*depth {
                    sum = sum + weight * (freq * T::PI() * x).cos();
                    weight = weight * *a;
                    freq = freq * bf;
                }
                sum
            }
            Self::CantorLebesgue { depth } => {
                if x >= T::one() {
                    return T::one();
                }
                if x <= T::zero() {
                    return T::zero();
                }
                let three = T::lit(3.0);
                let mut r = x;
                let mut bit = T::lit(0.5);
                let mut sum = T::zero();
                for _ in 0..*depth {
                    r = r * three;
                    let d = r.floor();
                    r = r - d;
                    if d >= T::lit(2.0) {
                        sum = sum + bit;
                    } else if d >= T::one() {
                        return sum + bit;
                    }
                    bit = bit / T::lit(2.0);
                }
                sum
            }
            Self::Custom { xs, ys, .. } => interpolate(xs, ys, x),
        }
    }

    /// Value at the grid node `i/n` together with a bound on its error.
    fn node_value(&self, i: usize, n: usize) -> (T, T) {
        let eps = T::epsilon();
        match self {
            Self::Affine { slope, intercept } => {
                let x = T::from_usize_lossy(i) / T::from_usize_lossy(n);
                let y = *slope * x + *intercept;
                (y, T::lit(2.0) * eps * (slope.abs() + intercept.abs()))
            }
            Self::Takagi { depth } => {
                // dist(2^k·i/n, ℤ) = min(r, n − r)/n with r = 2^k·i mod n
                let n128 = n as u128;
                let mut r = (i as u128) % n128;
                let mut scale = T::one();
                let mut sum = T::zero();
                let nf = T::from_usize_lossy(n);
                for _ in 0..=*depth {
                    let d = r.min(n128 - r);
                    if d != 0 {
                        sum = sum + scale * (T::from_u128(d).unwrap() / nf);
                    }
                    r = (2 * r) % n128;
                    scale = scale / T::lit(2.0);
                }
                let trunc = T::lit(0.5).powi(*depth as i32 + 1);
                (sum, trunc + T::from_usize_lossy(depth + 2) * eps)
            }
            Self::Weierstrass { a, b, depth } => {
                // cos(bᵏπ·i/n) = cos(π·(bᵏ·i mod 2n)/n) because bᵏ is odd
                let m = 2 * n as u128;
                let b128 = *b as u128;
                let mut phase = (i as u128) % m;
                let nf = T::from_usize_lossy(n);
                let mut weight = T::one();
                let mut sum = T::zero();
                for _ in 0..=*depth {
                    let angle = T::PI() * T::from_u128(phase).unwrap() / nf;
                    sum = sum + weight * angle.cos();
                    phase = (phase * b128) % m;
                    weight = weight * *a;
                }
                let one_minus = T::one() - *a;
                let trunc = a.powi(*depth as i32 + 1) / one_minus;
                (sum, trunc + T::lit(4.0) * T::from_usize_lossy(depth + 1) * eps / one_minus)
            }
            Self::CantorLebesgue { depth } => {
                if i >= n {
                    return (T::one(), T::zero());
                }
                // base-3 digits of i/n from integer long division
                let n128 = n as u128;
                let mut r = i as u128;
                let mut bit = T::lit(0.5);
                let mut sum = T::zero();
                for _ in 0..*depth {
                    if r == 0 {
                        return (sum, T::zero());
                    }
                    r *= 3;
                    let d = r / n128;
                    r %= n128;
                    match d {
                        0 => {}
                        1 => return (sum + bit, T::zero()),
                        _ => sum = sum + bit,
                    }
                    bit = bit / T::lit(2.0);
                }
                let err = if r == 0 { T::zero() } else { T::lit(0.5).powi(*depth as i32) };
                (sum, err)
            }
            Self::Custom { xs, ys, eval_error } => {
                let x = T::from_usize_lossy(i) / T::from_usize_lossy(n);
                (interpolate(xs, ys, x), *eval_error)
            }
        }
    }
}

fn interpolate<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    let last = xs.len() - 1;
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[last] {
        return ys[last];
    }
    let j = xs.partition_point(|&v| v <= x).clamp(1, last);
    let (x0, x1) = (xs[j - 1], xs[j]);
    if x == x0 {
        return ys[j - 1];
    }
    let t = (x - x0) / (x1 - x0);
    ys[j - 1] + t * (ys[j] - ys[j - 1])
}

/// A function graph sampled on the uniform grid `xs[i] = i/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    eval_error: T,
    name: String,
    depth: Option<usize>,
}

impl<T: Real> SampledGraph<T> {
    /// Wraps raw samples. `xs` must be a strictly increasing grid from 0 to 1.
    pub fn from_samples(xs: Vec<T>, ys: Vec<T>, eval_error: T, name: impl Into<String>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 3 {
            return Err(Error::InvalidArgument("a sampled graph needs matching xs/ys with at least 3 nodes".into()));
        }
        if xs[0] != T::zero() || xs[xs.len() - 1] != T::one() {
            return Err(Error::InvalidArgument("grid must start at 0 and end at 1".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if ys.iter().any(|y| !y.is_finite()) || !(eval_error >= T::zero()) {
            return Err(Error::NonFinite("graph samples"));
        }
        Ok(Self {
            xs,
            ys,
            eval_error,
            name: name.into(),
            depth: None,
        })
    }

    /// Records the truncation depth the samples were computed with.
    pub fn with_depth(mut self, depth: Option<usize>) -> Self {
        self.depth = depth;
        self
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn eval_error(&self) -> T {
        self.eval_error
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depth(&self) -> Option<usize> {
        self.depth
    }

    /// Number of grid intervals (`n`, one less than the node count).
    pub fn n(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn h(&self) -> T {
        T::one() / T::from_usize_lossy(self.n())
    }

    /// Linear interpolation between grid nodes.
    pub fn value_at(&self, x: T) -> T {
        interpolate(&self.xs, &self.ys, x)
    }

    /// `f(1) − f(0)`.
    pub fn endpoint_slope(&self) -> T {
        self.ys[self.n()] - self.ys[0]
    }

    /// Largest absolute change of `y` over one grid step.
    pub fn modulus(&self) -> T {
        self.ys
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(T::zero(), T::max)
    }

    pub fn point(&self, i: usize) -> Point<T> {
        Point::new(self.xs[i], self.ys[i])
    }

    pub fn to_points(&self) -> Vec<Point<T>> {
        (0..self.xs.len()).map(|i| self.point(i)).collect()
    }

    pub fn point_set(&self) -> PointSet<T> {
        PointSet::new(self.to_points()).expect("graph samples are finite")
    }

    /// Evenly strided subsample keeping both endpoints, at most `max_points` nodes.
    pub fn subsample_points(&self, max_points: usize) -> Vec<Point<T>> {
        let count = self.xs.len();
        if max_points >= count || max_points < 2 {
            return self.to_points();
        }
        (0..max_points)
            .map(|j| self.point(j * (count - 1) / (max_points - 1)))
            .collect()
    }
}

/// Samples a catalog function on the uniform grid with `n` intervals.
pub fn sample<T: Real>(spec: &FunctionSpec<T>, n: usize) -> Result<SampledGraph<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n ≥ 2 grid intervals, got {n}")));
    }
    spec.validate()?;
    let nf = T::from_usize_lossy(n);
    let xs: Vec<T> = (0..=n).map(|i| T::from_usize_lossy(i) / nf).collect();
    let mut ys = Vec::with_capacity(n + 1);
    let mut err = T::zero();
    for i in 0..=n {
        let (y, e) = spec.node_value(i, n);
        ys.push(y);
        err = err.max(e);
    }
    if let FunctionSpec::Custom { xs: sx, ys: sy, .. } = spec {
        // linear resampling can miss variation between source samples
        let local = sx
            .windows(2)
            .zip(sy.windows(2))
            .map(|(_, w)| (w[1] - w[0]).abs())
            .fold(T::zero(), T::max);
        err = err + local;
    }
    Ok(SampledGraph {
        xs,
        ys,
        eval_error: err,
        name: spec.name().to_string(),
        depth: spec.depth(),
    })
}

fn check_domain<T: Real>(i: &Interval<T>) -> Result<Interval<T>> {
    let tol = T::lit(DOMAIN_TOL);
    if i.lo < -tol || i.hi > T::one() + tol || !(i.lo.is_finite() && i.hi.is_finite()) {
        return Err(Error::OutsideUnitInterval {
            lo: i.lo.to_f64_lossy(),
            hi: i.hi.to_f64_lossy(),
        });
    }
    Ok(Interval::new(i.lo.max(T::zero()), i.hi.min(T::one())))
}

/// `(min, max)` of the sampled values over `i`: grid nodes inside plus
/// interpolated values at both endpoints.
pub fn value_range<T: Real>(g: &SampledGraph<T>, i: &Interval<T>) -> Result<(T, T)> {
    let i = check_domain(i)?;
    let a = g.value_at(i.lo);
    let b = g.value_at(i.hi);
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let start = g.xs.partition_point(|&x| x < i.lo);
    let end = g.xs.partition_point(|&x| x <= i.hi);
    for &y in &g.ys[start..end.max(start)] {
        lo = lo.min(y);
        hi = hi.max(y);
    }
    Ok((lo, hi))
}

/// Sampled oscillation `ω_f(I) = sup_{x,y ∈ I} |f(x) − f(y)|`.
pub fn oscillation<T: Real>(g: &SampledGraph<T>, i: &Interval<T>) -> Result<T> {
    let (lo, hi) = value_range(g, i)?;
    Ok(hi - lo)
}

/// `I × [min f, max f]`; its height equals the oscillation on `I`.
pub fn framing_rectangle<T: Real>(g: &SampledGraph<T>, i: &Interval<T>) -> Result<Rectangle<T>> {
    let (lo, hi) = value_range(g, i)?;
    Ok(Rectangle::new(*i, Interval::new(lo, hi)))
}

/// Least-squares line `y ≈ slope·x + intercept` through the samples and the
/// root-mean-square deviation from it.
pub fn least_squares_line<T: Real>(g: &SampledGraph<T>) -> (T, T, T) {
    let m = T::from_usize_lossy(g.xs.len());
    let mx = g.xs.iter().copied().sum::<T>() / m;
    let my = g.ys.iter().copied().sum::<T>() / m;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in g.xs.iter().zip(&g.ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = g
        .xs
        .iter()
        .zip(&g.ys)
        .map(|(&x, &y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum::<T>();
    (slope, intercept, (ss / m).sqrt())
}
