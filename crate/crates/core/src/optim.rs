//! Nelder–Mead simplex descent inside a box, with an exact budget on
//! objective evaluations.

/// Coordinate box. Periodic coordinates wrap instead of clamping.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub periodic: Vec<bool>,
}

impl Bounds {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            let (lo, hi) = (self.lo[i], self.hi[i]);
            if self.periodic[i] {
                *v = lo + (*v - lo).rem_euclid(hi - lo);
            } else {
                *v = v.clamp(lo, hi);
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(i, &v)| v >= self.lo[i] && (v <= self.hi[i] || (self.periodic[i] && v < self.hi[i])))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// True when the run stopped because the budget ran out.
    pub exhausted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Initial simplex edge as a fraction of each box side.
    pub initial_step: f64,
    /// Stop once the spread of simplex values falls below this.
    pub value_tol: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            value_tol: 1e-12,
            max_evaluations: 2000,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `start`, keeping every evaluated point inside `bounds`.
    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, start: &[f64], bounds: &Bounds) -> Minimum {
        let n = start.len();
        let mut evals = 0usize;
        let budget = self.max_evaluations.max(1);
        let eval = |x: &mut Vec<f64>, evals: &mut usize| {
            bounds.project(x);
            *evals += 1;
            let v = f(x);
            if v.is_nan() { f64::INFINITY } else { v }
        };

        let mut x0 = start.to_vec();
        let f0 = eval(&mut x0, &mut evals);
        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), f0)];
        for i in 0..n {
            if evals >= budget {
                break;
            }
            let mut x = x0.clone();
            let step = self.initial_step * (bounds.hi[i] - bounds.lo[i]);
            x[i] += if x[i] + step <= bounds.hi[i] || bounds.periodic[i] { step } else { -step };
            let v = eval(&mut x, &mut evals);
            simplex.push((x, v));
        }
        let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.total_cmp(&b.1);

        let mut exhausted = false;
        while simplex.len() == n + 1 {
            simplex.sort_by(by_value);
            if simplex[n].1 - simplex[0].1 <= self.value_tol {
                break;
            }
            if evals >= budget {
                exhausted = true;
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|j| simplex[..n].iter().map(|p| p.0[j]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let mut xr = along(1.0);
            let fr = eval(&mut xr, &mut evals);
            if fr < simplex[0].1 {
                if evals >= budget {
                    simplex[n] = (xr, fr);
                    exhausted = true;
                    break;
                }
                let mut xe = along(2.0);
                let fe = eval(&mut xe, &mut evals);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
            } else {
                if evals >= budget {
                    exhausted = true;
                    break;
                }
                let outside = fr < simplex[n].1;
                let mut xc = if outside { along(0.5) } else { along(-0.5) };
                let fc = eval(&mut xc, &mut evals);
                if fc < fr.min(simplex[n].1) {
                    simplex[n] = (xc, fc);
                } else {
                    // shrink toward the best vertex
                    let best = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        if evals >= budget {
                            exhausted = true;
                            break;
                        }
                        let mut x: Vec<f64> = best.iter().zip(&p.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
                        let v = eval(&mut x, &mut evals);
                        *p = (x, v);
                    }
                    if exhausted {
                        break;
                    }
                }
            }
        }
        if simplex.len() < n + 1 {
            exhausted = true;
        }
        let (x, value) = simplex.into_iter().min_by(by_value).expect("simplex has a vertex");
        Minimum {
            x,
            value,
            evaluations: evals,
            exhausted,
        }
    }
}
