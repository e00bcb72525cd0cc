//! Univariate GARCH(1,1) with a constant mean and Gaussian innovations.
//!
//! ```text
//! r_t = mu + eps_t,   eps_t = sqrt(h_t) u_t,   u_t ~ N(0, 1)
//! h_t = omega + alpha eps_{t-1}^2 + beta h_{t-1}
//! ```
//!
//! The recursion is started from a backcast: the pre-sample squared shock and variance are
//! both set to the variance of the demeaned series, so `h_1 = omega + (alpha + beta) s^2`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;
use crate::optim::{minimize_multistart, NelderMeadOptions};
use crate::stats;

/// Upper bound on alpha + beta enforced by the optimizer's parameter map.
pub const PERSISTENCE_CAP: f64 = 0.999;
/// Fits whose alpha + beta lands this close to the cap are flagged as not converged.
pub const BOUNDARY_MARGIN: f64 = 1e-4;

pub const MIN_FIT_OBS: usize = 50;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub mu: f64,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl GarchParams {
    pub fn new(mu: f64, omega: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { mu, omega, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.mu.is_finite()
            && self.omega > 0.0
            && self.omega.is_finite()
            && self.alpha >= 0.0
            && self.beta >= 0.0
            && self.alpha + self.beta < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "GARCH(1,1) needs omega > 0, alpha >= 0, beta >= 0, alpha + beta < 1; got {self:?}"
            )))
        }
    }

    pub fn persistence(&self) -> f64 {
        self.alpha + self.beta
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.omega / (1.0 - self.alpha - self.beta)
    }

    /// Map to R^4: `[mu, ln omega, ln(alpha/s), ln(beta/s)]` with `s = cap - alpha - beta`.
    fn to_unconstrained(self) -> [f64; 4] {
        let slack = PERSISTENCE_CAP - self.alpha - self.beta;
        [
            self.mu,
            self.omega.ln(),
            (self.alpha / slack).ln(),
            (self.beta / slack).ln(),
        ]
    }

    fn from_unconstrained(x: &[f64]) -> Self {
        // Logistic map onto the open simplex {alpha, beta > 0, alpha + beta < cap}.
        let m = x[2].max(x[3]).max(0.0);
        let (ea, eb, e0) = ((x[2] - m).exp(), (x[3] - m).exp(), (-m).exp());
        let denom = e0 + ea + eb;
        Self {
            mu: x[0],
            omega: x[1].exp(),
            alpha: PERSISTENCE_CAP * ea / denom,
            beta: PERSISTENCE_CAP * eb / denom,
        }
    }
}

/// Optimizer settings shared by the GARCH and DCC fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Relative log-likelihood change that counts as converged.
    pub tolerance: f64,
    /// Nelder-Mead iteration cap per run.
    pub max_iter: usize,
    /// Jittered starting points in addition to the default one.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iter: 5_000,
            restarts: 3,
            seed: 20_200_311,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub params: GarchParams,
    /// Conditional variances h_t.
    pub h: Vec<f64>,
    /// (r_t - mu) / sqrt(h_t)
    pub std_residuals: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Pre-sample variance used to start the recursion.
fn backcast(r: &[f64]) -> f64 {
    stats::population_variance(r)
}

/// Conditional variance path.
pub fn variance_path(params: &GarchParams, r: &[f64]) -> Vec<f64> {
    let s2 = backcast(r);
    let mut h = Vec::with_capacity(r.len());
    let mut prev = params.omega + (params.alpha + params.beta) * s2;
    h.push(prev);
    for w in r.windows(2) {
        let e = w[0] - params.mu;
        prev = params.omega + params.alpha * e * e + params.beta * prev;
        h.push(prev);
    }
    h
}

/// Unchecked log-likelihood. NaN when the variance path degenerates.
fn loglik_raw(params: &GarchParams, r: &[f64], s2: f64) -> f64 {
    let mut h = params.omega + (params.alpha + params.beta) * s2;
    let mut ll = 0.0;
    let mut prev_e2 = 0.0;
    for (t, &x) in r.iter().enumerate() {
        if t > 0 {
            h = params.omega + params.alpha * prev_e2 + params.beta * h;
        }
        if h.is_nan() || h <= 0.0 {
            return f64::NAN;
        }
        let e = x - params.mu;
        prev_e2 = e * e;
        ll += -0.5 * (LN_2PI + h.ln() + prev_e2 / h);
    }
    ll
}

/// Gaussian log-likelihood of the series under `params`.
pub fn garch_loglik(params: &GarchParams, r: &[f64]) -> Result<f64> {
    params.validate()?;
    if r.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: r.len(),
        });
    }
    let ll = loglik_raw(params, r, backcast(r));
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::NonFinite("GARCH log-likelihood".into()))
    }
}

/// Analytic gradient of the log-likelihood in `(mu, omega, alpha, beta)`.
pub fn garch_loglik_gradient(params: &GarchParams, r: &[f64]) -> [f64; 4] {
    let s2 = backcast(r);
    let GarchParams { mu, omega, alpha, beta } = *params;
    let mut h = omega + (alpha + beta) * s2;
    // dh/d(mu, omega, alpha, beta)
    let mut dh = [0.0, 1.0, s2, s2];
    let mut g = [0.0; 4];
    let mut prev_e = 0.0;
    for (t, &x) in r.iter().enumerate() {
        if t > 0 {
            let dh_prev = dh;
            let h_prev = h;
            h = omega + alpha * prev_e * prev_e + beta * h_prev;
            dh = [
                -2.0 * alpha * prev_e + beta * dh_prev[0],
                1.0 + beta * dh_prev[1],
                prev_e * prev_e + beta * dh_prev[2],
                h_prev + beta * dh_prev[3],
            ];
        }
        let e = x - mu;
        let w = 0.5 * (e * e / (h * h) - 1.0 / h);
        for k in 0..4 {
            g[k] += w * dh[k];
        }
        g[0] += e / h;
        prev_e = e;
    }
    g
}

fn feasible(p: &GarchParams) -> bool {
    p.omega > 0.0 && p.alpha >= 0.0 && p.beta >= 0.0 && p.alpha + p.beta < PERSISTENCE_CAP
}

fn as_array(p: &GarchParams) -> [f64; 4] {
    [p.mu, p.omega, p.alpha, p.beta]
}

fn from_array(a: &[f64; 4]) -> GarchParams {
    GarchParams {
        mu: a[0],
        omega: a[1],
        alpha: a[2],
        beta: a[3],
    }
}

/// Newton refinement in the natural parameters with a finite-difference Hessian of the
/// analytic gradient. Steps that leave the feasible set or lower the likelihood are halved.
fn newton_polish(start: GarchParams, r: &[f64], s2: f64) -> (GarchParams, f64, usize) {
    let mut p = start;
    let mut ll = loglik_raw(&p, r, s2);
    let mut iters = 0;
    for _ in 0..50 {
        iters += 1;
        let g = garch_loglik_gradient(&p, r);
        let x = as_array(&p);
        let mut hess = DMatrix::<f64>::zeros(4, 4);
        for j in 0..4 {
            let step = 1e-5 * x[j].abs().max(1e-3);
            let (mut up, mut dn) = (x, x);
            up[j] += step;
            dn[j] -= step;
            let (gu, gd) = (
                garch_loglik_gradient(&from_array(&up), r),
                garch_loglik_gradient(&from_array(&dn), r),
            );
            for i in 0..4 {
                hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * step);
            }
        }
        let hess = (&hess + hess.transpose()) * 0.5;
        // Ascent direction requires a negative-definite Hessian.
        let neg = -&hess;
        let Some(chol) = neg.cholesky() else { break };
        let delta = chol.solve(&DVector::from_row_slice(&g));

        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: [f64; 4] = std::array::from_fn(|i| x[i] + t * delta[i]);
            let cp = from_array(&cand);
            if feasible(&cp) {
                let cl = loglik_raw(&cp, r, s2);
                if cl.is_finite() && cl >= ll {
                    improved = cl > ll || t == 1.0;
                    p = cp;
                    ll = cl;
                    break;
                }
            }
            t *= 0.5;
        }
        let rel_step = (0..4)
            .map(|i| (t * delta[i]).abs() / x[i].abs().max(1e-3))
            .fold(0.0, f64::max);
        if !improved || rel_step < 1e-12 {
            break;
        }
    }
    (p, ll, iters)
}

/// Quasi-maximum-likelihood GARCH(1,1) fit.
///
/// The series is standardized before optimization and the estimates mapped back, which makes
/// the fit equivariant to rescaling: alpha and beta are unchanged, mu scales by c and omega by c^2.
pub fn fit_garch11(r: &ReturnSeries, opts: &FitOptions) -> Result<GarchFit> {
    fit_garch11_values(r.values(), opts)
}

/// [`fit_garch11`] on a raw slice.
pub fn fit_garch11_values(r: &[f64], opts: &FitOptions) -> Result<GarchFit> {
    let n = r.len();
    if n < MIN_FIT_OBS {
        return Err(Error::TooShort {
            needed: MIN_FIT_OBS,
            got: n,
        });
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("return series".into()));
    }
    let center = stats::mean(r);
    let var = stats::population_variance(r);
    let scale = var.sqrt();
    if scale.is_nan() || scale <= 0.0 || scale <= 1e-12 * center.abs() {
        return Err(Error::DegenerateSeries("zero sample variance".into()));
    }
    let z: Vec<f64> = r.iter().map(|v| (v - center) / scale).collect();
    let s2 = backcast(&z);

    let start = |alpha: f64, beta: f64, mu: f64| {
        GarchParams {
            mu,
            omega: s2 * (1.0 - alpha - beta),
            alpha,
            beta,
        }
        .to_unconstrained()
        .to_vec()
    };
    let mut starts = vec![start(0.05, 0.90, 0.0), start(0.15, 0.70, 0.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let alpha = rng.random_range(0.01..0.25);
        let beta = rng.random_range(0.30..0.95_f64).min(0.98 - alpha);
        let mu = rng.random_range(-0.05..0.05);
        starts.push(start(alpha, beta, mu));
    }

    let objective = |x: &[f64]| -loglik_raw(&GarchParams::from_unconstrained(x), &z, s2);
    let nm = NelderMeadOptions {
        max_iter: opts.max_iter,
        f_tol: opts.tolerance,
    };
    let best = minimize_multistart(objective, &starts, &[0.1, 0.5, 0.5, 0.5], nm);
    if !best.f.is_finite() {
        return Err(Error::NoConvergence("no finite likelihood found".into()));
    }
    if !best.converged {
        return Err(Error::NoConvergence(format!(
            "likelihood still changing after {} iterations",
            best.iterations
        )));
    }

    let (pz, _, polish_iters) = newton_polish(GarchParams::from_unconstrained(&best.x), &z, s2);
    let params = GarchParams {
        mu: center + scale * pz.mu,
        omega: pz.omega * var,
        alpha: pz.alpha,
        beta: pz.beta,
    };
    let h = variance_path(&params, r);
    let std_residuals = r.iter().zip(&h).map(|(x, hv)| (x - params.mu) / hv.sqrt()).collect();
    let loglik = loglik_raw(&params, r, backcast(r));
    let at_boundary = params.persistence() >= PERSISTENCE_CAP - BOUNDARY_MARGIN;

    Ok(GarchFit {
        params,
        h,
        std_residuals,
        loglik,
        converged: !at_boundary,
        iterations: best.iterations + polish_iters,
    })
}

/// Simulate `t` returns, starting from the unconditional variance.
pub fn simulate_garch11_values(params: &GarchParams, t: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = params.unconditional_variance();
    let mut out = Vec::with_capacity(t);
    for _ in 0..t {
        let u: f64 = StandardNormal.sample(&mut rng);
        let e = h.sqrt() * u;
        out.push(params.mu + e);
        h = params.omega + params.alpha * e * e + params.beta * h;
    }
    Ok(out)
}

/// [`simulate_garch11_values`] dated on consecutive business days from 2000-01-03.
pub fn simulate_garch11(params: &GarchParams, t: usize, seed: u64) -> Result<ReturnSeries> {
    if t == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let values = simulate_garch11_values(params, t, seed)?;
    Ok(ReturnSeries::on_business_days("simulated", simulation_start(), values))
}

pub(crate) fn simulation_start() -> chrono::NaiveDate {
    chrono::NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}
