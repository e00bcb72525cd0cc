//! Derivative-free minimization: adaptive Nelder-Mead with seeded restarts.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Relative tolerance on the spread of objective values across the simplex.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 5_000,
            f_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

fn spread_ok(fs: &[f64], tol: f64) -> bool {
    let best = fs[0];
    let worst = fs[fs.len() - 1];
    worst.is_finite() && (worst - best) <= tol * best.abs().max(1.0)
}

/// Minimize `f` from `x0` with an axis-aligned initial simplex of edge lengths `steps`.
///
/// Uses the dimension-adaptive coefficients of Gao and Han (2012). Non-finite objective
/// values are treated as +inf, so an objective may signal infeasibility that way.
pub fn nelder_mead<F>(f: F, x0: &[f64], steps: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n);
    let nf = n as f64;
    let (rho, chi, gamma, sigma) = if n > 1 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut fs: Vec<f64> = simplex.iter().map(|v| eval(&f, v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let point =
        |c: &[f64], w: &[f64], t: f64| -> Vec<f64> { c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect() };

    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        fs = order.iter().map(|&i| fs[i]).collect();

        if spread_ok(&fs, opts.f_tol) {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for v in &simplex[..n] {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / nf;
            }
        }

        let worst = simplex[n].clone();
        let xr = point(&centroid, &worst, rho);
        let fr = eval(&f, &xr);

        if fr < fs[0] {
            let xe = point(&centroid, &worst, rho * chi);
            let fe = eval(&f, &xe);
            if fe < fr {
                simplex[n] = xe;
                fs[n] = fe;
            } else {
                simplex[n] = xr;
                fs[n] = fr;
            }
            continue;
        }
        if fr < fs[n - 1] {
            simplex[n] = xr;
            fs[n] = fr;
            continue;
        }

        let (xc, fc, accept) = if fr < fs[n] {
            let xc = point(&centroid, &worst, rho * gamma);
            let fc = eval(&f, &xc);
            let ok = fc <= fr;
            (xc, fc, ok)
        } else {
            let xc = point(&centroid, &worst, -gamma);
            let fc = eval(&f, &xc);
            let ok = fc < fs[n];
            (xc, fc, ok)
        };
        if accept {
            simplex[n] = xc;
            fs[n] = fc;
            continue;
        }

        // Shrink toward the best vertex.
        let best = simplex[0].clone();
        for i in 1..=n {
            for (vj, bj) in simplex[i].iter_mut().zip(&best) {
                *vj = bj + sigma * (*vj - bj);
            }
            fs[i] = eval(&f, &simplex[i]);
        }
    }

    let (mut bi, mut bf) = (0, fs[0]);
    for (i, &v) in fs.iter().enumerate() {
        if v < bf {
            bi = i;
            bf = v;
        }
    }
    Minimum {
        x: simplex[bi].clone(),
        f: bf,
        iterations,
        converged,
    }
}

/// Run Nelder-Mead from every start, keep the best, then restart from the incumbent
/// until a restart improves the objective by less than `opts.f_tol` (relative).
pub fn minimize_multistart<F>(f: F, starts: &[Vec<f64>], steps: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    assert!(!starts.is_empty());
    let mut best: Option<Minimum> = None;
    let mut total_iter = 0;
    for s in starts {
        let m = nelder_mead(&f, s, steps, opts);
        total_iter += m.iterations;
        if best.as_ref().is_none_or(|b| m.f < b.f) {
            best = Some(m);
        }
    }
    let mut best = best.expect("non-empty starts");

    let mut settled = false;
    for _ in 0..20 {
        let m = nelder_mead(&f, &best.x, steps, opts);
        total_iter += m.iterations;
        let improvement = best.f - m.f;
        let last_converged = m.converged;
        if m.f < best.f {
            best = m;
        }
        if improvement.abs() <= opts.f_tol * best.f.abs().max(1.0) {
            settled = last_converged;
            break;
        }
    }
    best.iterations = total_iter;
    best.converged = settled && best.f.is_finite();
    best
}
