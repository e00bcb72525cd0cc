//! Safe-haven analysis of candidate hedge assets against equity indices.
//!
//! The pipeline runs in stages, each a module:
//!
//! - [`ingest`]: CSV loading, percent log returns, calendar alignment, descriptive statistics
//! - [`stationarity`]: augmented Dickey-Fuller and Phillips-Perron unit-root tests
//! - [`diagnostics`]: ARCH-LM and Breusch-Pagan-Godfrey heteroskedasticity tests
//! - [`garch`]: univariate GARCH(1,1) quasi-maximum-likelihood fits and simulation
//! - [`dcc`]: bivariate DCC(1,1) correlation estimation over standardized residuals
//! - [`regression`]: OLS and iterated Prais-Winsten with HC1 errors, crisis-dummy regressions
//! - [`classify`]: safe-haven / hedge / diversifier labelling
//! - [`report`]: configuration, orchestration and every file output

pub mod classify;
pub mod dcc;
pub mod diagnostics;
pub mod error;
pub mod garch;
pub mod ingest;
pub mod linalg;
pub mod optim;
pub mod regression;
pub mod report;
pub mod stationarity;
pub mod stats;

pub use error::{Error, Result};
