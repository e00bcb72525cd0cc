//! Bivariate DCC(1,1): correlation-targeted dynamics on GARCH standardized residuals.
//!
//! ```text
//! Q_t = (1 - a - b) Qbar + a phi_{t-1} phi_{t-1}' + b Q_{t-1},   Q_1 = Qbar
//! rho_t = q12_t / sqrt(q11_t q22_t)
//! ```
//!
//! `Qbar` is fixed at the sample correlation matrix of the standardized residuals, leaving
//! `(a, b)` to the second-stage likelihood.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::{simulation_start, FitOptions, GarchFit, GarchParams, BOUNDARY_MARGIN, PERSISTENCE_CAP};
use crate::ingest::{AlignedPair, ReturnSeries, MIN_OVERLAP};
use crate::optim::{minimize_multistart, NelderMeadOptions};
use crate::stats;

/// |rho| is clamped to this inside the likelihood.
pub const RHO_CLAMP: f64 = 0.9999;

/// |Qbar_12| at or above this makes a pair degenerate (perfectly correlated residuals).
const DEGENERATE_CORR: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DccParams {
    pub a: f64,
    pub b: f64,
}

impl DccParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = Self { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a >= 0.0 && self.b >= 0.0 && self.a + self.b < 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "DCC needs a >= 0, b >= 0, a + b < 1; got {self:?}"
            )))
        }
    }

    fn from_unconstrained(x: &[f64]) -> Self {
        let m = x[0].max(x[1]).max(0.0);
        let (ea, eb, e0) = ((x[0] - m).exp(), (x[1] - m).exp(), (-m).exp());
        let denom = e0 + ea + eb;
        Self {
            a: PERSISTENCE_CAP * ea / denom,
            b: PERSISTENCE_CAP * eb / denom,
        }
    }

    fn to_unconstrained(self) -> Vec<f64> {
        let slack = PERSISTENCE_CAP - self.a - self.b;
        vec![(self.a / slack).ln(), (self.b / slack).ln()]
    }
}

/// Symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sym2 {
    pub q11: f64,
    pub q12: f64,
    pub q22: f64,
}

impl Sym2 {
    pub fn correlation(rho: f64) -> Self {
        Self {
            q11: 1.0,
            q12: rho,
            q22: 1.0,
        }
    }

    pub fn identity() -> Self {
        Self::correlation(0.0)
    }

    pub fn det(&self) -> f64 {
        self.q11 * self.q22 - self.q12 * self.q12
    }

    pub fn is_positive_definite(&self) -> bool {
        self.q11 > 0.0 && self.det() > 0.0
    }

    /// Off-diagonal entry of the implied correlation matrix.
    pub fn rho(&self) -> f64 {
        self.q12 / (self.q11 * self.q22).sqrt()
    }
}

/// Dated conditional correlations for one (asset, index) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPath {
    pub asset_id: String,
    pub index_id: String,
    pub dates: Vec<NaiveDate>,
    pub rho: Vec<f64>,
}

impl CorrelationPath {
    /// Mean correlation over `start <= date <= end`, `None` if no date falls in the range.
    pub fn mean_over(&self, start: NaiveDate, end: NaiveDate) -> Option<f64> {
        let v: Vec<f64> = self
            .dates
            .iter()
            .zip(&self.rho)
            .filter(|(d, _)| **d >= start && **d <= end)
            .map(|(_, r)| *r)
            .collect();
        (!v.is_empty()).then(|| stats::mean(&v))
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.rho.is_empty()).then(|| stats::mean(&self.rho))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DccFit {
    pub params: DccParams,
    pub q_bar: Sym2,
    pub q_path: Vec<Sym2>,
    pub rho_path: CorrelationPath,
    pub loglik: f64,
    pub converged: bool,
    /// Standardized residuals are perfectly (anti)correlated; no dynamics were estimated.
    pub degenerate: bool,
    /// Observations at which |rho_t| hit [`RHO_CLAMP`] in the final likelihood evaluation.
    pub clamp_events: usize,
    pub iterations: usize,
}

fn check_pair(phi_a: &[f64], phi_b: &[f64]) -> Result<()> {
    if phi_a.len() != phi_b.len() {
        return Err(Error::DimensionMismatch(format!(
            "standardized residual lengths {} and {}",
            phi_a.len(),
            phi_b.len()
        )));
    }
    Ok(())
}

/// Correlation-targeted Qbar: unit diagonal, sample correlation off the diagonal.
pub fn estimate_q_bar(phi_a: &[f64], phi_b: &[f64]) -> Result<Sym2> {
    check_pair(phi_a, phi_b)?;
    if phi_a.len() < MIN_OVERLAP {
        return Err(Error::TooShort {
            needed: MIN_OVERLAP,
            got: phi_a.len(),
        });
    }
    let rho = stats::pearson(phi_a, phi_b)
        .ok_or_else(|| Error::DegenerateSeries("standardized residuals have zero variance".into()))?;
    Ok(Sym2::correlation(rho))
}

fn recursion_unchecked(params: DccParams, q_bar: Sym2, phi_a: &[f64], phi_b: &[f64]) -> Vec<Sym2> {
    let w = 1.0 - params.a - params.b;
    let mut out = Vec::with_capacity(phi_a.len());
    let mut q = q_bar;
    for t in 0..phi_a.len() {
        if t > 0 {
            let (x, y) = (phi_a[t - 1], phi_b[t - 1]);
            q = Sym2 {
                q11: w * q_bar.q11 + params.a * x * x + params.b * q.q11,
                q12: w * q_bar.q12 + params.a * x * y + params.b * q.q12,
                q22: w * q_bar.q22 + params.a * y * y + params.b * q.q22,
            };
        }
        out.push(q);
    }
    out
}

/// Run the Q_t recursion and normalize to correlations.
pub fn dcc_recursion(params: DccParams, q_bar: Sym2, phi_a: &[f64], phi_b: &[f64]) -> Result<(Vec<Sym2>, Vec<f64>)> {
    params.validate()?;
    check_pair(phi_a, phi_b)?;
    if !q_bar.is_positive_definite() {
        return Err(Error::InvalidParams(format!("Qbar not positive definite: {q_bar:?}")));
    }
    let q_path = recursion_unchecked(params, q_bar, phi_a, phi_b);
    let rho: Vec<f64> = q_path.iter().map(Sym2::rho).collect();
    if rho.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("DCC correlation path".into()));
    }
    Ok((q_path, rho))
}

/// Correlation part of the Gaussian log-likelihood and the number of clamped observations.
fn loglik_terms(params: DccParams, q_bar: Sym2, phi_a: &[f64], phi_b: &[f64]) -> (f64, usize) {
    let w = 1.0 - params.a - params.b;
    let mut q = q_bar;
    let mut ll = 0.0;
    let mut clamps = 0;
    for t in 0..phi_a.len() {
        if t > 0 {
            let (x, y) = (phi_a[t - 1], phi_b[t - 1]);
            q = Sym2 {
                q11: w * q_bar.q11 + params.a * x * x + params.b * q.q11,
                q12: w * q_bar.q12 + params.a * x * y + params.b * q.q12,
                q22: w * q_bar.q22 + params.a * y * y + params.b * q.q22,
            };
        }
        let mut rho = q.rho();
        if rho.abs() > RHO_CLAMP {
            rho = rho.signum() * RHO_CLAMP;
            clamps += 1;
        }
        let (x, y) = (phi_a[t], phi_b[t]);
        let one_m = 1.0 - rho * rho;
        let quad = (x * x - 2.0 * rho * x * y + y * y) / one_m;
        ll += -0.5 * (one_m.ln() + quad - (x * x + y * y));
    }
    (ll, clamps)
}

/// Second-stage DCC log-likelihood, `sum_t -0.5 [ln|R_t| + phi_t' R_t^{-1} phi_t - phi_t' phi_t]`.
pub fn dcc_loglik(params: DccParams, q_bar: Sym2, phi_a: &[f64], phi_b: &[f64]) -> Result<f64> {
    params.validate()?;
    check_pair(phi_a, phi_b)?;
    let (ll, _) = loglik_terms(params, q_bar, phi_a, phi_b);
    if ll.is_finite() {
        Ok(ll)
    } else {
        Err(Error::NonFinite("DCC log-likelihood".into()))
    }
}

/// Estimate `(a, b)` for one aligned pair from its first-stage GARCH fits.
pub fn fit_dcc(pair: &AlignedPair, garch_a: &GarchFit, garch_b: &GarchFit, opts: &FitOptions) -> Result<DccFit> {
    let phi_a = &garch_a.std_residuals;
    let phi_b = &garch_b.std_residuals;
    check_pair(phi_a, phi_b)?;
    if phi_a.len() != pair.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} standardized residuals for {} aligned dates",
            phi_a.len(),
            pair.len()
        )));
    }
    fit_dcc_residuals(
        pair.asset.asset_id(),
        pair.index.asset_id(),
        pair.common_dates(),
        phi_a,
        phi_b,
        opts,
    )
}

/// [`fit_dcc`] on raw standardized residuals.
pub fn fit_dcc_residuals(
    asset_id: &str,
    index_id: &str,
    dates: &[NaiveDate],
    phi_a: &[f64],
    phi_b: &[f64],
    opts: &FitOptions,
) -> Result<DccFit> {
    check_pair(phi_a, phi_b)?;
    if dates.len() != phi_a.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} dates for {} residuals",
            dates.len(),
            phi_a.len()
        )));
    }
    let q_bar = estimate_q_bar(phi_a, phi_b)?;
    let path = |q_path: &[Sym2]| CorrelationPath {
        asset_id: asset_id.to_string(),
        index_id: index_id.to_string(),
        dates: dates.to_vec(),
        rho: q_path.iter().map(Sym2::rho).collect(),
    };

    if q_bar.q12.abs() >= DEGENERATE_CORR {
        let params = DccParams { a: 0.0, b: 0.0 };
        let q_path = recursion_unchecked(params, q_bar, phi_a, phi_b);
        let (loglik, clamp_events) = loglik_terms(params, q_bar, phi_a, phi_b);
        return Ok(DccFit {
            params,
            q_bar,
            rho_path: path(&q_path),
            q_path,
            loglik,
            converged: false,
            degenerate: true,
            clamp_events,
            iterations: 0,
        });
    }

    let mut starts: Vec<Vec<f64>> = [(0.05, 0.90), (0.02, 0.97), (0.10, 0.60)]
        .iter()
        .map(|&(a, b)| DccParams { a, b }.to_unconstrained())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x0dcc);
    for _ in 0..opts.restarts {
        let a = rng.random_range(0.005..0.20);
        let b = rng.random_range(0.30..0.97_f64).min(0.985 - a);
        starts.push(DccParams { a, b }.to_unconstrained());
    }
    let objective = |x: &[f64]| -loglik_terms(DccParams::from_unconstrained(x), q_bar, phi_a, phi_b).0;
    let nm = NelderMeadOptions {
        max_iter: opts.max_iter,
        f_tol: opts.tolerance,
    };
    let best = minimize_multistart(objective, &starts, &[0.5, 0.5], nm);
    if !best.f.is_finite() {
        return Err(Error::NoConvergence("no finite DCC likelihood found".into()));
    }
    if !best.converged {
        return Err(Error::NoConvergence(format!(
            "DCC likelihood still changing after {} iterations",
            best.iterations
        )));
    }

    let mut params = DccParams::from_unconstrained(&best.x);
    let mut ll = -best.f;
    let static_params = DccParams { a: 0.0, b: 0.0 };
    let (static_ll, _) = loglik_terms(static_params, q_bar, phi_a, phi_b);
    if static_ll > ll {
        params = static_params;
        ll = static_ll;
    }
    let (loglik, clamp_events) = loglik_terms(params, q_bar, phi_a, phi_b);
    debug_assert!((loglik - ll).abs() <= 1e-9 * ll.abs().max(1.0));
    let q_path = recursion_unchecked(params, q_bar, phi_a, phi_b);
    let at_boundary = params.a + params.b >= PERSISTENCE_CAP - BOUNDARY_MARGIN;

    Ok(DccFit {
        params,
        q_bar,
        rho_path: path(&q_path),
        q_path,
        loglik,
        converged: !at_boundary,
        degenerate: false,
        clamp_events,
        iterations: best.iterations,
    })
}

/// Simulated pair together with the correlation path that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedDcc {
    pub asset: ReturnSeries,
    pub index: ReturnSeries,
    /// True conditional correlations rho_t.
    pub rho: Vec<f64>,
}

/// Run the GARCH and DCC recursions generatively.
///
/// At each step `u_t` is drawn from the bivariate normal with correlation `R_t`, scaled by the
/// two GARCH conditional standard deviations, and fed back into both recursions.
pub fn simulate_dcc_full(
    garch_a: &GarchParams,
    garch_b: &GarchParams,
    dcc: DccParams,
    q_bar: Sym2,
    t: usize,
    seed: u64,
) -> Result<SimulatedDcc> {
    garch_a.validate()?;
    garch_b.validate()?;
    dcc.validate()?;
    if !q_bar.is_positive_definite() {
        return Err(Error::InvalidParams(format!("Qbar not positive definite: {q_bar:?}")));
    }
    if t == 0 {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ha, mut hb) = (garch_a.unconditional_variance(), garch_b.unconditional_variance());
    let mut q = q_bar;
    let w = 1.0 - dcc.a - dcc.b;
    let (mut ra, mut rb, mut rho_path) = (Vec::with_capacity(t), Vec::with_capacity(t), Vec::with_capacity(t));
    for _ in 0..t {
        let rho = q.rho();
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let ua = z1;
        let ub = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
        let (ea, eb) = (ha.sqrt() * ua, hb.sqrt() * ub);
        ra.push(garch_a.mu + ea);
        rb.push(garch_b.mu + eb);
        rho_path.push(rho);

        ha = garch_a.omega + garch_a.alpha * ea * ea + garch_a.beta * ha;
        hb = garch_b.omega + garch_b.alpha * eb * eb + garch_b.beta * hb;
        q = Sym2 {
            q11: w * q_bar.q11 + dcc.a * ua * ua + dcc.b * q.q11,
            q12: w * q_bar.q12 + dcc.a * ua * ub + dcc.b * q.q12,
            q22: w * q_bar.q22 + dcc.a * ub * ub + dcc.b * q.q22,
        };
    }
    let start = simulation_start();
    Ok(SimulatedDcc {
        asset: ReturnSeries::on_business_days("asset", start, ra),
        index: ReturnSeries::on_business_days("index", start, rb),
        rho: rho_path,
    })
}

/// Simulated (asset, index) returns from a GARCH-DCC process.
pub fn simulate_dcc(
    garch_a: &GarchParams,
    garch_b: &GarchParams,
    dcc: DccParams,
    q_bar: Sym2,
    t: usize,
    seed: u64,
) -> Result<(ReturnSeries, ReturnSeries)> {
    let sim = simulate_dcc_full(garch_a, garch_b, dcc, q_bar, t, seed)?;
    Ok((sim.asset, sim.index))
}
