//! Unified-(q,s) entropy and its von Neumann, Rényi and Tsallis limits.
//!
//! All logarithms are natural: the `q -> 1` limit of the unified entropy is
//! `-tr rho ln rho` in nats, so a Bell pair carries `ln 2` of entanglement, not 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

/// Half-width of the seams `q = 1` and `s = 0` where the closed form is replaced by its limit.
pub const EPS_LIMIT: f64 = 1e-7;

/// Which closed form evaluates the entropy for a given `(q, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    VonNeumann,
    Renyi,
    Tsallis,
}

/// Validated `(q, s)` pair with its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct QSParams {
    q: f64,
    s: f64,
    regime: Regime,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    q: f64,
    s: f64,
}

impl TryFrom<RawParams> for QSParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        QSParams::new(r.q, r.s)
    }
}

impl From<QSParams> for RawParams {
    fn from(p: QSParams) -> Self {
        RawParams { q: p.q, s: p.s }
    }
}

impl QSParams {
    pub fn new(q: f64, s: f64) -> Result<Self> {
        if !(q.is_finite() && s.is_finite()) || q < 0.0 || s < 0.0 {
            return Err(Error::domain(q, s, "q >= 0 and s >= 0"));
        }
        let regime = if (q - 1.0).abs() < EPS_LIMIT {
            Regime::VonNeumann
        } else if s.abs() < EPS_LIMIT {
            Regime::Renyi
        } else if (s - 1.0).abs() < EPS_LIMIT {
            Regime::Tsallis
        } else {
            Regime::Generic
        };
        Ok(Self { q, s, regime })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }
}

/// `sum_i lambda_i^q` over the strictly positive part of the spectrum.
pub fn power_trace(spectrum: &[f64], q: f64) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| if q == 1.0 { l } else { l.powf(q) })
        .sum()
}

/// `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn shannon(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Unified entropy of a probability spectrum.
pub fn unified_entropy_of_spectrum(spectrum: &[f64], params: QSParams) -> f64 {
    let (q, s) = (params.q, params.s);
    match params.regime {
        Regime::VonNeumann => shannon(spectrum),
        Regime::Renyi => power_trace(spectrum, q).ln() / (1.0 - q),
        Regime::Tsallis => (power_trace(spectrum, q) - 1.0) / (1.0 - q),
        // (P^s - 1) written as expm1(s ln P) to keep precision when P^s is near 1.
        Regime::Generic => (s * power_trace(spectrum, q).ln()).exp_m1() / ((1.0 - q) * s),
    }
}

/// `[(tr rho^q)^s - 1] / [(1 - q) s]`, switching to the von Neumann or Rényi
/// limit inside the seams.
pub fn unified_entropy(rho: &DensityMatrix, params: QSParams) -> f64 {
    unified_entropy_of_spectrum(rho.spectrum(), params)
}

pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    shannon(rho.spectrum())
}

/// `ln(tr rho^q) / (1 - q)`; at `q = 1` the von Neumann entropy.
pub fn renyi_q(rho: &DensityMatrix, q: f64) -> Result<f64> {
    let params = QSParams::new(q, 0.0)?;
    Ok(unified_entropy(rho, params))
}

/// `(tr rho^q - 1) / (1 - q)`: the unified entropy at `s = 1`, same code path.
pub fn tsallis_q(rho: &DensityMatrix, q: f64) -> Result<f64> {
    let params = QSParams::new(q, 1.0)?;
    Ok(unified_entropy(rho, params))
}
