//! Seeded Monte-Carlo campaigns over random states.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{haar_random_pure, random_mixed, State, StateJson};
use crate::rng::{derive_seed, rng_from_seed, RNG_ALGORITHM};
use crate::roof::RoofConfig;

use super::registry::{inequality_registry, EvalContext, Inequality};
use super::{Mode, SlackRecord, REPORT_CSV_HEADER};

/// Distribution the campaign samples states from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateKind {
    HaarPure,
    /// Marginal of a Haar pure state on system (x) C^rank.
    InducedMixed {
        rank: usize,
    },
}

impl StateKind {
    fn is_mixed(&self) -> bool {
        matches!(self, StateKind::InducedMixed { .. })
    }

    fn sample(&self, n_qubits: usize, seed: u64) -> Result<State> {
        let mut rng = rng_from_seed(seed);
        match *self {
            StateKind::HaarPure => Ok(State::Pure(haar_random_pure(n_qubits, &mut rng)?)),
            StateKind::InducedMixed { rank } => {
                Ok(State::Mixed(random_mixed(n_qubits, rank, &mut rng)?))
            }
        }
    }
}

/// The target inequality and the deduplicated effective `(q, s)` points.
pub type Plan = (&'static dyn Inequality, Vec<(f64, f64)>);

fn default_qs_points() -> Vec<[f64; 2]> {
    vec![[1.0, 1.0], [1.0, 0.25], [1.5, 0.75], [1.5, 1.0], [2.0, 1.0]]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub inequality: String,
    pub samples: usize,
    pub n_qubits: usize,
    /// Requested `(q, s)` points; ignored by parameter-free inequalities.
    pub qs_points: Vec<[f64; 2]>,
    pub mode: Mode,
    pub state_kind: StateKind,
    pub seed: u64,
    pub focus: usize,
    /// Evaluate every qubit as the focus party instead of `focus` alone.
    pub sweep_focus: bool,
    /// Violation tolerance; defaults to the mode's tolerance.
    pub tolerance: Option<f64>,
    pub roof: RoofConfig,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            inequality: "theorem1".into(),
            samples: 100,
            n_qubits: 3,
            qs_points: default_qs_points(),
            mode: Mode::Analytic,
            state_kind: StateKind::HaarPure,
            seed: 0,
            focus: 0,
            sweep_focus: false,
            tolerance: None,
            roof: RoofConfig::default(),
        }
    }
}

impl CampaignConfig {
    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or_else(|| self.mode.default_tolerance())
    }

    /// Checks the whole configuration against the target inequality before any
    /// sampling, returning the inequality and the deduplicated effective points.
    pub fn validate(&self) -> Result<Plan> {
        let ineq = inequality_registry().get(&self.inequality)?;
        ineq.check_applicable(self.n_qubits, self.state_kind.is_mixed(), self.mode)?;
        if let StateKind::InducedMixed { rank } = self.state_kind {
            let max = 1usize << self.n_qubits;
            if rank == 0 || rank > max {
                return Err(Error::RankOutOfBounds { rank, max });
            }
        }
        if !self.sweep_focus && self.focus >= self.n_qubits {
            return Err(Error::InvalidPartition(format!(
                "focus qubit {} not in 0..{}",
                self.focus, self.n_qubits
            )));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::InvalidConfig(
                    "tolerance must be non-negative".into(),
                ));
            }
        }
        if self.qs_points.is_empty() {
            return Err(Error::InvalidConfig("qs_points is empty".into()));
        }
        self.roof.validate()?;
        let mut points: Vec<(f64, f64)> = Vec::new();
        for &[q, s] in &self.qs_points {
            ineq.check_domain(q, s)?;
            let eff = ineq.effective_params(q, s);
            let seen = points
                .iter()
                .any(|p| p.0.to_bits() == eff.0.to_bits() && p.1.to_bits() == eff.1.to_bits());
            if !seen {
                points.push(eff);
            }
        }
        Ok((ineq, points))
    }

    fn foci(&self) -> Vec<usize> {
        if self.sweep_focus {
            (0..self.n_qubits).collect()
        } else {
            vec![self.focus]
        }
    }
}

/// The record with the smallest slack, with the state needed to reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub state_seed: u64,
    pub q: f64,
    pub s: f64,
    pub focus: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub state: StateJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignSummary {
    pub inequality: String,
    pub mode: Mode,
    pub samples: usize,
    pub records: usize,
    pub tolerance: f64,
    pub min_slack: Option<f64>,
    pub witness: Option<Witness>,
    pub violations: usize,
    pub violating_seeds: Vec<u64>,
    pub bound_direction_note: Option<String>,
    pub rng_algorithm: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub records: Vec<SlackRecord>,
    pub summary: CampaignSummary,
}

impl CampaignReport {
    /// CSV with [`REPORT_CSV_HEADER`], one row per record, newline-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(REPORT_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

/// Runs `config.samples` independent samples; sample `i` uses the state seed
/// `derive_seed(config.seed, i)`. Records are ordered by sample, then point, then focus.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    let (ineq, points) = config.validate()?;
    let foci = config.foci();
    let per_sample: Vec<Vec<SlackRecord>> = (0..config.samples)
        .into_par_iter()
        .map(|i| -> Result<Vec<SlackRecord>> {
            let seed = derive_seed(config.seed, i as u64);
            let state = config.state_kind.sample(config.n_qubits, seed)?;
            let mut out = Vec::with_capacity(points.len() * foci.len());
            for &(q, s) in &points {
                for &focus in &foci {
                    let ctx = EvalContext {
                        q,
                        s,
                        mode: config.mode,
                        focus,
                        roof: config.roof.clone(),
                    };
                    let mut rec = ineq.evaluate(state.as_ref(), &ctx)?;
                    rec.state_seed = Some(seed);
                    out.push(rec);
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<SlackRecord> = per_sample.into_iter().flatten().collect();
    let summary = summarize(config, &records)?;
    Ok(CampaignReport { records, summary })
}

fn summarize(config: &CampaignConfig, records: &[SlackRecord]) -> Result<CampaignSummary> {
    let tolerance = config.tolerance();
    // NaN slack sorts as the minimum so it is reported rather than hidden.
    let argmin = records
        .iter()
        .min_by(|a, b| match (a.slack.is_nan(), b.slack.is_nan()) {
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            _ => a
                .slack
                .partial_cmp(&b.slack)
                .unwrap_or(std::cmp::Ordering::Equal),
        });
    let witness = match argmin {
        Some(r) => {
            let seed = r.state_seed.expect("campaign records carry seeds");
            Some(Witness {
                state_seed: seed,
                q: r.q,
                s: r.s,
                focus: r.focus,
                lhs: r.lhs,
                rhs: r.rhs,
                slack: r.slack,
                state: config.state_kind.sample(config.n_qubits, seed)?.to_json(),
            })
        }
        None => None,
    };
    let violating: Vec<&SlackRecord> = records
        .iter()
        .filter(|r| r.is_violation(tolerance))
        .collect();
    let mut violating_seeds: Vec<u64> = violating.iter().filter_map(|r| r.state_seed).collect();
    violating_seeds.dedup();
    Ok(CampaignSummary {
        inequality: config.inequality.clone(),
        mode: config.mode,
        samples: config.samples,
        records: records.len(),
        tolerance,
        min_slack: argmin.map(|r| r.slack),
        witness,
        violations: violating.len(),
        violating_seeds,
        bound_direction_note: records.first().map(|r| r.bound_direction_note.clone()),
        rng_algorithm: RNG_ALGORITHM,
    })
}
