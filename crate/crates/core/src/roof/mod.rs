//! Convex-roof (minimum) and assistance (maximum) averages of pure-state payoffs
//! over the decompositions of a mixed state.
//!
//! Every decomposition of `rho` into `k` pure states is `v_i = sum_j M_ij sqrt(l_j) e_j`
//! for a `k x r` isometry `M`. The engine searches over `M` with a multi-start
//! coordinate search and reports the best average found, which is an upper
//! estimate of a roof minimum and a lower estimate of a roof maximum.

mod payoff;
mod search;

pub use payoff::{FnPayoff, MarginalEntropy, Payoff, PureConcurrence};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::QSParams;
use crate::error::{Error, Result};
use crate::linalg::{haar_unitary, isometry_defect, CMatrix, ZERO};
use crate::qstate::{DensityMatrix, PureState};
use crate::rng::{derive_seed, rng_from_seed};
use search::{coordinate_search, SearchOptions};

/// Decomposition weights below this are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Smoothing scales visited before the exact stage, for payoffs with cone points.
pub const SMOOTHING_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// Largest cardinality used when none is configured.
pub const MAX_DEFAULT_CARDINALITY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Min,
    Max,
}

/// How a reported value relates to the exact roof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    UpperEstimate,
    LowerEstimate,
}

/// A pure-state ensemble `{(w_i, psi_i)}`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    entries: Vec<(f64, PureState)>,
}

impl Decomposition {
    pub fn new(entries: Vec<(f64, PureState)>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::InvalidState("empty decomposition".into()));
        };
        let n = first.1.n_qubits();
        if let Some((_, psi)) = entries.iter().find(|(_, p)| p.n_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                got: psi.dim(),
            });
        }
        if entries.iter().any(|(w, _)| w.is_nan() || *w <= 0.0) {
            return Err(Error::InvalidState(
                "decomposition weights must be positive".into(),
            ));
        }
        let total: f64 = entries.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "decomposition weights sum to {total}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, PureState)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|(w, _)| *w).collect()
    }

    /// `sum_i w_i |psi_i><psi_i|`.
    pub fn mixture(&self) -> CMatrix {
        let d = self.entries[0].1.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, psi) in &self.entries {
            let a = psi.amplitudes();
            for r in 0..d {
                for c in 0..d {
                    m[(r, c)] += a[r] * a[c].conj() * *w;
                }
            }
        }
        m
    }

    /// Largest elementwise difference between the mixture and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        rho.max_abs_diff(&self.mixture())
    }

    /// `sum_i w_i payoff(psi_i)`.
    pub fn average(&self, payoff: &dyn Payoff) -> f64 {
        self.entries
            .iter()
            .map(|(w, psi)| w * payoff.value(psi.amplitudes()))
            .sum()
    }
}

/// Optimizer settings. `cardinality: None` selects `min(r^2, 16)`, at least `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoofConfig {
    pub cardinality: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            cardinality: None,
            restarts: 32,
            max_iters: 2000,
            step_tol: 1e-8,
            value_tol: 1e-10,
            seed: 0,
        }
    }
}

impl RoofConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if !(self.step_tol > 0.0 && self.step_tol.is_finite()) {
            return Err(Error::InvalidConfig("step_tol must be positive".into()));
        }
        if !(self.value_tol >= 0.0 && self.value_tol.is_finite()) {
            return Err(Error::InvalidConfig(
                "value_tol must be non-negative".into(),
            ));
        }
        if self.cardinality == Some(0) {
            return Err(Error::InvalidConfig(
                "cardinality must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Cardinality used for a target of rank `r`.
    pub fn cardinality_for(&self, rank: usize) -> usize {
        self.cardinality
            .unwrap_or_else(|| (rank * rank).min(MAX_DEFAULT_CARDINALITY).max(rank))
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub decomposition: Decomposition,
    /// Whether the winning restart met a stopping tolerance before `max_iters`.
    pub converged: bool,
    pub restarts_used: usize,
    pub direction: Direction,
    pub bound: BoundKind,
    pub cardinality: usize,
    /// Value reached by each restart, in restart order.
    pub restart_values: Vec<f64>,
}

impl RoofResult {
    /// Best value after each restart; monotone in the optimization direction.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = match self.direction {
            Direction::Min => f64::INFINITY,
            Direction::Max => f64::NEG_INFINITY,
        };
        self.restart_values
            .iter()
            .map(|&v| {
                best = match self.direction {
                    Direction::Min => best.min(v),
                    Direction::Max => best.max(v),
                };
                best
            })
            .collect()
    }
}

/// Ensemble `v_i = sum_j mixer[i,j] sqrt(l_j) e_j`, normalized, zero-weight entries dropped.
pub fn decomposition_from_mixer(rho: &DensityMatrix, mixer: &CMatrix) -> Result<Decomposition> {
    let ens = rho.sqrt_ensemble();
    if mixer.ncols() != ens.len() {
        return Err(Error::DimensionMismatch {
            expected: ens.len(),
            got: mixer.ncols(),
        });
    }
    let defect = isometry_defect(mixer);
    if defect.is_nan() || defect > 1e-10 {
        return Err(Error::NonIsometricMixer(defect));
    }
    let rows: Vec<Vec<Complex64>> = (0..mixer.nrows())
        .map(|i| mixer.row(i).iter().copied().collect())
        .collect();
    decomposition_from_rows(&ens, &rows)
}

fn decomposition_from_rows(
    ens: &[Vec<Complex64>],
    rows: &[Vec<Complex64>],
) -> Result<Decomposition> {
    let d = ens[0].len();
    let mut raw = Vec::with_capacity(rows.len());
    for row in rows {
        let mut v = vec![ZERO; d];
        for (m, e) in row.iter().zip(ens) {
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi += m * ei;
            }
        }
        let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if w >= WEIGHT_FLOOR {
            raw.push((w, v));
        }
    }
    let total: f64 = raw.iter().map(|(w, _)| w).sum();
    let entries = raw
        .into_iter()
        .map(|(w, v)| Ok((w / total, PureState::new(v)?)))
        .collect::<Result<Vec<_>>>()?;
    Decomposition::new(entries)
}

fn identity_rows(k: usize, r: usize) -> Vec<Vec<Complex64>> {
    (0..k)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
                .collect()
        })
        .collect()
}

/// Best average of `payoff` over decompositions of `rho` in `direction`.
///
/// Restart 0 starts from the eigendecomposition, so the result is never worse
/// than the eigen-ensemble average. Restart `i > 0` starts from a Haar-random
/// unitary seeded by `derive_seed(config.seed, i)`.
pub fn roof_optimize(
    rho: &DensityMatrix,
    payoff: &dyn Payoff,
    direction: Direction,
    config: &RoofConfig,
) -> Result<RoofResult> {
    config.validate()?;
    if payoff.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: payoff.dim(),
        });
    }
    let ens = rho.sqrt_ensemble();
    let r = ens.len();
    if r == 0 {
        return Err(Error::InvalidState(
            "density matrix has empty support".into(),
        ));
    }
    if r == 1 {
        let psi = PureState::new(ens[0].clone())?;
        let value = payoff.value(psi.amplitudes());
        return Ok(RoofResult {
            value,
            decomposition: Decomposition::new(vec![(1.0, psi)])?,
            converged: true,
            restarts_used: 0,
            direction,
            bound: BoundKind::Exact,
            cardinality: 1,
            restart_values: vec![value],
        });
    }
    let k = config.cardinality_for(r);
    if k < r {
        return Err(Error::InvalidConfig(format!(
            "cardinality {k} below rank {r}"
        )));
    }
    let sign = match direction {
        Direction::Min => 1.0,
        Direction::Max => -1.0,
    };
    // Cone points are local minima of the payoff, so they only obstruct minimization.
    let stages: Vec<Option<f64>> = if payoff.has_smoothing() && direction == Direction::Min {
        SMOOTHING_SCHEDULE
            .iter()
            .map(|&mu| Some(mu))
            .chain([None])
            .collect()
    } else {
        vec![None]
    };

    let outcomes: Vec<_> = (0..config.restarts)
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                identity_rows(k, r)
            } else {
                let u = haar_unitary(k, &mut rng_from_seed(derive_seed(config.seed, i as u64)));
                (0..k)
                    .map(|a| (0..r).map(|b| u[(a, b)]).collect())
                    .collect()
            };
            let mut mixer = start;
            let mut converged = false;
            for &mu in &stages {
                // Smoothed stages only need to land near the exact basin.
                let value_tol = match mu {
                    Some(mu) => config.value_tol.max(1e-2 * mu * mu),
                    None => config.value_tol,
                };
                let opts = SearchOptions {
                    max_iters: config.max_iters,
                    step_tol: config.step_tol,
                    value_tol,
                    mu,
                };
                let out = coordinate_search(payoff, sign, &ens, mixer, &opts);
                mixer = out.mixer;
                converged = out.converged;
            }
            let dec = decomposition_from_rows(&ens, &mixer)?;
            let value = dec.average(payoff);
            Ok((value, dec, converged))
        })
        .collect::<Result<Vec<_>>>()?;

    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if sign * o.0 < sign * outcomes[best].0 {
            best = i;
        }
    }
    let (value, decomposition, converged) = outcomes.into_iter().nth(best).expect("restarts >= 1");
    if !value.is_finite() {
        return Err(Error::Optimizer(format!("non-finite roof value {value}")));
    }
    Ok(RoofResult {
        value,
        decomposition,
        converged,
        restarts_used: config.restarts,
        direction,
        bound: match direction {
            Direction::Min => BoundKind::UpperEstimate,
            Direction::Max => BoundKind::LowerEstimate,
        },
        cardinality: k,
        restart_values,
    })
}

/// Local positions of `side_a` labels within `rho`'s label list.
fn local_side(rho: &DensityMatrix, side_a: &[usize]) -> Result<Vec<usize>> {
    side_a
        .iter()
        .map(|l| {
            rho.labels().iter().position(|x| x == l).ok_or_else(|| {
                Error::InvalidPartition(format!("qubit {l} not in labels {:?}", rho.labels()))
            })
        })
        .collect()
}

/// Roof of the unified entropy of the `side_a` marginal (given as labels of `rho`).
pub fn marginal_entropy_roof(
    rho: &DensityMatrix,
    side_a: &[usize],
    params: QSParams,
    direction: Direction,
    config: &RoofConfig,
) -> Result<RoofResult> {
    let payoff = MarginalEntropy::new(rho.n_qubits(), &local_side(rho, side_a)?, params)?;
    roof_optimize(rho, &payoff, direction, config)
}

/// Roof of the pure-state concurrence across `side_a | rest`.
pub fn concurrence_roof(
    rho: &DensityMatrix,
    side_a: &[usize],
    direction: Direction,
    config: &RoofConfig,
) -> Result<RoofResult> {
    let payoff = PureConcurrence::new(rho.n_qubits(), &local_side(rho, side_a)?)?;
    roof_optimize(rho, &payoff, direction, config)
}

fn first_label(rho: &DensityMatrix) -> [usize; 1] {
    [rho.labels()[0]]
}

/// Unified-(q,s) entanglement across the first qubit and the rest (roof minimum).
pub fn unified_entanglement(
    rho: &DensityMatrix,
    params: QSParams,
    config: &RoofConfig,
) -> Result<RoofResult> {
    marginal_entropy_roof(rho, &first_label(rho), params, Direction::Min, config)
}

/// Unified-(q,s) entanglement of assistance across the first qubit and the rest.
pub fn ueoa(rho: &DensityMatrix, params: QSParams, config: &RoofConfig) -> Result<RoofResult> {
    marginal_entropy_roof(rho, &first_label(rho), params, Direction::Max, config)
}

/// Entanglement of formation, in nats.
pub fn eof(rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult> {
    unified_entanglement(rho, QSParams::new(1.0, 1.0)?, config)
}

/// Entanglement of assistance, in nats.
pub fn eoa(rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult> {
    ueoa(rho, QSParams::new(1.0, 1.0)?, config)
}

/// Tsallis-q entanglement of assistance.
pub fn teoa(rho: &DensityMatrix, q: f64, config: &RoofConfig) -> Result<RoofResult> {
    ueoa(rho, QSParams::new(q, 1.0)?, config)
}

/// Concurrence of assistance across the first qubit and the rest.
pub fn coa(rho: &DensityMatrix, config: &RoofConfig) -> Result<RoofResult> {
    concurrence_roof(rho, &first_label(rho), Direction::Max, config)
}
