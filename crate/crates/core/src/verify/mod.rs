//! Numerical checks of the polygamy and monogamy inequalities for multi-qubit
//! states, one [`SlackRecord`] per check, plus seeded Monte-Carlo campaigns.
//!
//! Slack is always `rhs - lhs`: a nonnegative slack means the instance obeys
//! the inequality.

mod campaign;
mod registry;

pub use campaign::{
    run_campaign, CampaignConfig, CampaignReport, CampaignSummary, StateKind, Witness,
};
pub use registry::{inequality_registry, EvalContext, Inequality};

use serde::{Deserialize, Serialize};

use crate::entropy::{tsallis_q, unified_entropy, QSParams};
use crate::error::{Error, Result};
use crate::format::fmt_g17;
use crate::qstate::{partial_trace, Bipartition, PureState, StateRef};
use crate::roof::{concurrence_roof, marginal_entropy_roof, Direction, RoofConfig};
use crate::twoqubit::{concurrence_pure, f_qs, f_qs_unchecked, FRange, WoottersSpectrum};

/// How the pairwise terms of an inequality are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Closed forms from the Wootters spectrum.
    Analytic,
    /// Roof-optimizer estimates.
    Variational,
    /// The larger of the two for each assisted term.
    Hybrid,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Variational => "variational",
            Mode::Hybrid => "hybrid",
        }
    }

    /// Default violation tolerance: tight for closed forms, optimizer accuracy otherwise.
    pub fn default_tolerance(&self) -> f64 {
        match self {
            Mode::Analytic => 1e-9,
            Mode::Variational | Mode::Hybrid => 1e-4,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "variational" => Ok(Mode::Variational),
            "hybrid" => Ok(Mode::Hybrid),
            other => Err(Error::UnknownName {
                kind: "mode",
                name: other.to_string(),
                known: "analytic, variational, hybrid".into(),
            }),
        }
    }
}

pub const NOTE_PURE_CONSERVATIVE: &str =
    "pure input: LHS exact, RHS terms are lower bounds of the assisted pair terms; nonnegative slack certifies the instance";
pub const NOTE_MIXED_HEURISTIC: &str =
    "mixed input: LHS is a roof-max lower estimate; nonnegative slack is heuristic, not a certificate";
pub const NOTE_EXACT: &str = "all terms exact closed forms";
pub const NOTE_THEOREM2_VARIATIONAL: &str =
    "C_AB is a roof-min upper estimate and C^a_AC a roof-max lower estimate; slack is heuristic";
pub const NOTE_IDENTITY: &str = "identity: lhs is |residual|, rhs is 0, slack is -|residual|";

/// One checked inequality instance. `q` and `s` are NaN for parameter-free
/// inequalities; `state_seed` is set for campaign samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlackRecord {
    pub inequality_id: String,
    pub n_qubits: usize,
    pub q: f64,
    pub s: f64,
    pub mode: Mode,
    pub state_seed: Option<u64>,
    pub focus: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub bound_direction_note: String,
}

impl SlackRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        inequality_id: &str,
        n_qubits: usize,
        (q, s): (f64, f64),
        mode: Mode,
        focus: usize,
        lhs: f64,
        rhs: f64,
        note: &str,
    ) -> Self {
        Self {
            inequality_id: inequality_id.to_string(),
            n_qubits,
            q,
            s,
            mode,
            state_seed: None,
            focus,
            lhs,
            rhs,
            slack: rhs - lhs,
            bound_direction_note: note.to_string(),
        }
    }

    pub fn is_violation(&self, tolerance: f64) -> bool {
        self.slack.is_nan() || self.slack < -tolerance
    }

    /// Row matching [`REPORT_CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.inequality_id,
            self.n_qubits,
            fmt_g17(self.q),
            fmt_g17(self.s),
            self.mode.as_str(),
            self.state_seed.map(|s| s.to_string()).unwrap_or_default(),
            fmt_g17(self.lhs),
            fmt_g17(self.rhs),
            fmt_g17(self.slack)
        )
    }
}

pub const REPORT_CSV_HEADER: &str = "inequality_id,n_qubits,q,s,mode,state_seed,lhs,rhs,slack";

/// Qubit labels of a state: `0..n` for pure states.
fn labels_of(state: StateRef<'_>) -> Vec<usize> {
    match state {
        StateRef::Pure(p) => (0..p.n_qubits()).collect(),
        StateRef::Mixed(r) => r.labels().to_vec(),
    }
}

fn check_focus(labels: &[usize], focus: usize) -> Result<()> {
    if !labels.contains(&focus) {
        return Err(Error::InvalidPartition(format!(
            "focus qubit {focus} not in {labels:?}"
        )));
    }
    Ok(())
}

fn require_qubits(n: usize, min: usize, max: Option<usize>) -> Result<()> {
    if n < min || max.is_some_and(|m| n > m) {
        let want = match max {
            Some(m) if m == min => format!("exactly {min}"),
            Some(m) => format!("{min} to {m}"),
            None => format!("at least {min}"),
        };
        return Err(Error::InvalidState(format!("needs {want} qubits, got {n}")));
    }
    Ok(())
}

fn require_pure<'a>(state: StateRef<'a>, what: &str) -> Result<&'a PureState> {
    match state {
        StateRef::Pure(p) => Ok(p),
        StateRef::Mixed(_) => Err(Error::InvalidState(format!("{what} requires a pure state"))),
    }
}

/// Wootters spectrum of the two-qubit reduction on `(a, b)`. Pure inputs use the
/// reduced ensemble directly, which keeps the spectrum exact on rank-deficient pairs.
pub fn pair_spectrum(state: StateRef<'_>, a: usize, b: usize) -> Result<WoottersSpectrum> {
    match state {
        StateRef::Pure(p) => WoottersSpectrum::from_ensemble(&p.reduced_ensemble(&[a, b])?),
        StateRef::Mixed(r) => WoottersSpectrum::from_density(&partial_trace(r, &[a, b])?),
    }
}

/// Concurrence of a pure state across `focus | rest`.
fn one_vs_rest(psi: &PureState, focus: usize) -> Result<f64> {
    concurrence_pure(psi, &Bipartition::single(psi.n_qubits(), focus)?)
}

fn others(labels: &[usize], focus: usize) -> Vec<usize> {
    labels.iter().copied().filter(|&l| l != focus).collect()
}

/// Polygamy of unified entanglement of assistance:
/// `E^a(A1 | A2...An) <= sum_i E^a(A1 Ai)`, for `1 <= q <= 2`, `-q^2 + 4q - 3 <= s <= 1`.
pub fn verify_theorem1(
    state: StateRef<'_>,
    q: f64,
    s: f64,
    mode: Mode,
    focus: usize,
    roof: &RoofConfig,
) -> Result<SlackRecord> {
    let range = FRange::new(q, s);
    range.require_lemma2()?;
    let params = QSParams::new(q, s)?;
    let labels = labels_of(state);
    require_qubits(labels.len(), 3, None)?;
    check_focus(&labels, focus)?;

    let (lhs, note) = match state {
        StateRef::Pure(psi) => (
            unified_entropy(&partial_trace(psi, &[focus])?, params),
            NOTE_PURE_CONSERVATIVE,
        ),
        StateRef::Mixed(rho) => (
            marginal_entropy_roof(rho, &[focus], params, Direction::Max, roof)?.value,
            NOTE_MIXED_HEURISTIC,
        ),
    };
    let mut rhs = 0.0;
    for other in others(&labels, focus) {
        let analytic = || f_qs(pair_spectrum(state, focus, other)?.assisted(), &range);
        let variational = || -> Result<f64> {
            let pair = partial_trace(state, &[focus, other])?;
            Ok(marginal_entropy_roof(&pair, &[focus], params, Direction::Max, roof)?.value)
        };
        rhs += match mode {
            Mode::Analytic => analytic()?,
            Mode::Variational => variational()?,
            Mode::Hybrid => analytic()?.max(variational()?),
        };
    }
    Ok(SlackRecord::new(
        "theorem1",
        labels.len(),
        (q, s),
        mode,
        focus,
        lhs,
        rhs,
        note,
    ))
}

/// Theorem-1 slack for a pure state with the analytic right-hand side, evaluated
/// with the raw formulas at any `q > 0`, `s >= 0`. Used by region scans that
/// deliberately step outside the proven domain.
pub fn theorem1_slack_unchecked(psi: &PureState, q: f64, s: f64, focus: usize) -> Result<f64> {
    let params = QSParams::new(q, s)?;
    let lhs = unified_entropy(&partial_trace(psi, &[focus])?, params);
    let mut rhs = 0.0;
    for other in others(&labels_of(psi.into()), focus) {
        let ca = pair_spectrum(psi.into(), focus, other)?.assisted().min(1.0);
        rhs += f_qs_unchecked(ca, q, s);
    }
    Ok(rhs - lhs)
}

/// Three-qubit refinement: `f(C_{A|BC}) <= f(C_AB) + f(C^a_AC)`.
pub fn verify_theorem2(
    psi: &PureState,
    q: f64,
    s: f64,
    mode: Mode,
    focus: usize,
    roof: &RoofConfig,
) -> Result<SlackRecord> {
    let range = FRange::new(q, s);
    range.require_lemma2()?;
    require_qubits(psi.n_qubits(), 3, Some(3))?;
    let labels = labels_of(psi.into());
    check_focus(&labels, focus)?;
    let [b, c] = others(&labels, focus)[..] else {
        unreachable!("three qubits leave two others")
    };
    let lhs = f_qs(one_vs_rest(psi, focus)?, &range)?;
    let c_ab = pair_spectrum(psi.into(), focus, b)?.concurrence();
    let ca_ac = pair_spectrum(psi.into(), focus, c)?.assisted();
    let var_ab = || -> Result<f64> {
        let pair = partial_trace(psi, &[focus, b])?;
        Ok(concurrence_roof(&pair, &[focus], Direction::Min, roof)?.value)
    };
    let var_ac = || -> Result<f64> {
        let pair = partial_trace(psi, &[focus, c])?;
        Ok(concurrence_roof(&pair, &[focus], Direction::Max, roof)?.value)
    };
    let (x_ab, x_ac, note) = match mode {
        Mode::Analytic => (c_ab, ca_ac, NOTE_EXACT),
        Mode::Variational => (var_ab()?, var_ac()?, NOTE_THEOREM2_VARIATIONAL),
        Mode::Hybrid => (c_ab, ca_ac.max(var_ac()?), NOTE_EXACT),
    };
    let rhs = f_qs(x_ab.min(1.0), &range)? + f_qs(x_ac.min(1.0), &range)?;
    Ok(SlackRecord::new(
        "theorem2",
        3,
        (q, s),
        mode,
        focus,
        lhs,
        rhs,
        note,
    ))
}

/// Squared-concurrence monogamy: `sum_i C^2(A1 Ai) <= C^2(A1 | rest)`.
pub fn verify_ckw_monogamy(psi: &PureState, focus: usize) -> Result<SlackRecord> {
    require_qubits(psi.n_qubits(), 3, None)?;
    let labels = labels_of(psi.into());
    check_focus(&labels, focus)?;
    let mut lhs = 0.0;
    for other in others(&labels, focus) {
        lhs += pair_spectrum(psi.into(), focus, other)?
            .concurrence()
            .powi(2);
    }
    let rhs = one_vs_rest(psi, focus)?.powi(2);
    Ok(SlackRecord::new(
        "ckw",
        psi.n_qubits(),
        (f64::NAN, f64::NAN),
        Mode::Analytic,
        focus,
        lhs,
        rhs,
        NOTE_EXACT,
    ))
}

/// Concurrence-of-assistance polygamy: `C^2(A1 | rest) <= sum_i (C^a(A1 Ai))^2`.
pub fn verify_coa_polygamy(psi: &PureState, focus: usize) -> Result<SlackRecord> {
    require_qubits(psi.n_qubits(), 3, None)?;
    let labels = labels_of(psi.into());
    check_focus(&labels, focus)?;
    let lhs = one_vs_rest(psi, focus)?.powi(2);
    let mut rhs = 0.0;
    for other in others(&labels, focus) {
        rhs += pair_spectrum(psi.into(), focus, other)?.assisted().powi(2);
    }
    Ok(SlackRecord::new(
        "coa_polygamy",
        psi.n_qubits(),
        (f64::NAN, f64::NAN),
        Mode::Analytic,
        focus,
        lhs,
        rhs,
        NOTE_EXACT,
    ))
}

/// Residual of `C^2(A | BC) = C^2(AB) + (C^a(AC))^2` for three-qubit pure states.
pub fn tangle_residual(psi: &PureState, focus: usize) -> Result<f64> {
    require_qubits(psi.n_qubits(), 3, Some(3))?;
    let labels = labels_of(psi.into());
    check_focus(&labels, focus)?;
    let [b, c] = others(&labels, focus)[..] else {
        unreachable!("three qubits leave two others")
    };
    let c_abc = one_vs_rest(psi, focus)?;
    let c_ab = pair_spectrum(psi.into(), focus, b)?.concurrence();
    let ca_ac = pair_spectrum(psi.into(), focus, c)?.assisted();
    Ok(c_abc * c_abc - c_ab * c_ab - ca_ac * ca_ac)
}

/// The tangle identity as a record: `lhs = |residual|`, `rhs = 0`.
pub fn verify_tangle_identity(psi: &PureState, focus: usize) -> Result<SlackRecord> {
    let r = tangle_residual(psi, focus)?;
    Ok(SlackRecord::new(
        "tangle",
        3,
        (f64::NAN, f64::NAN),
        Mode::Analytic,
        focus,
        r.abs(),
        0.0,
        NOTE_IDENTITY,
    ))
}

/// Theorem 1 at `s = 1` (Tsallis-q entanglement of assistance). The record is
/// the Theorem-1 record relabelled; the `s = 1` unified payoff is checked
/// against the Tsallis entropy on the focus marginal.
pub fn verify_tsallis_reduction(
    state: StateRef<'_>,
    q: f64,
    mode: Mode,
    focus: usize,
    roof: &RoofConfig,
) -> Result<SlackRecord> {
    let mut record = verify_theorem1(state, q, 1.0, mode, focus, roof)?;
    let marginal = partial_trace(state, &[focus])?;
    let unified = unified_entropy(&marginal, QSParams::new(q, 1.0)?);
    let tsallis = tsallis_q(&marginal, q)?;
    if (unified - tsallis).abs() > 1e-12 {
        return Err(Error::Consistency(format!(
            "unified entropy at s = 1 ({unified}) differs from Tsallis ({tsallis})"
        )));
    }
    record.inequality_id = "tsallis".into();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{haar_random_pure, random_mixed};
    use crate::rng::rng_from_seed;
    use std::f64::consts::LN_2;

    fn cfg() -> RoofConfig {
        RoofConfig {
            restarts: 4,
            ..RoofConfig::default()
        }
    }

    #[test]
    fn theorem1_examples() {
        let ghz = PureState::ghz(3).unwrap();
        let r = verify_theorem1((&ghz).into(), 1.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        assert!((r.lhs - LN_2).abs() < 1e-12);
        assert!((r.rhs - 2.0 * LN_2).abs() < 1e-12);
        assert!((r.slack - LN_2).abs() < 1e-12);

        let w = PureState::w(3).unwrap();
        let r = verify_theorem1((&w).into(), 2.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        assert!((r.lhs - 4.0 / 9.0).abs() < 1e-12);
        assert!((r.rhs - 4.0 / 9.0).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-10);

        let prod = PureState::basis(3, 0).unwrap();
        for &(q, s) in &[(1.0, 0.25), (1.5, 0.75), (2.0, 1.0)] {
            let r = verify_theorem1((&prod).into(), q, s, Mode::Analytic, 0, &cfg()).unwrap();
            assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
        }
        assert!(matches!(
            verify_theorem1((&w).into(), 2.0, 0.5, Mode::Analytic, 0, &cfg()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn theorem1_modes_agree_on_pure_states() {
        let psi = haar_random_pure(3, &mut rng_from_seed(2)).unwrap();
        let a = verify_theorem1((&psi).into(), 1.5, 0.9, Mode::Analytic, 0, &cfg()).unwrap();
        let v = verify_theorem1((&psi).into(), 1.5, 0.9, Mode::Variational, 0, &cfg()).unwrap();
        let h = verify_theorem1((&psi).into(), 1.5, 0.9, Mode::Hybrid, 0, &cfg()).unwrap();
        assert_eq!(a.lhs, v.lhs);
        // Roof-max UEoA dominates f(C^a) (up to optimizer accuracy).
        assert!(v.rhs >= a.rhs - 1e-4);
        assert!(h.rhs >= a.rhs && h.rhs >= v.rhs);
    }

    #[test]
    fn theorem1_mixed_is_heuristic() {
        let rho = random_mixed(3, 2, &mut rng_from_seed(8)).unwrap();
        let r = verify_theorem1((&rho).into(), 1.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        assert_eq!(r.bound_direction_note, NOTE_MIXED_HEURISTIC);
        assert!(r.slack >= -1e-9);
    }

    #[test]
    fn theorem2_examples() {
        let ghz = PureState::ghz(3).unwrap();
        let r = verify_theorem2(&ghz, 1.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        assert!((r.lhs - LN_2).abs() < 1e-12 && (r.rhs - LN_2).abs() < 1e-12);
        assert!(r.slack.abs() < 1e-12);
        let w = PureState::w(3).unwrap();
        let r = verify_theorem2(&w, 2.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        assert!((r.lhs - 4.0 / 9.0).abs() < 1e-12 && r.slack.abs() < 1e-10);
        let prod = PureState::basis(3, 5).unwrap();
        let r = verify_theorem2(&prod, 1.5, 0.9, Mode::Analytic, 0, &cfg()).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(verify_theorem2(
            &PureState::ghz(4).unwrap(),
            1.0,
            1.0,
            Mode::Analytic,
            0,
            &cfg()
        )
        .is_err());
    }

    #[test]
    fn classical_inequalities() {
        let ghz = PureState::ghz(3).unwrap();
        let w = PureState::w(3).unwrap();
        let prod = PureState::basis(3, 0).unwrap();
        let r = verify_ckw_monogamy(&ghz, 0).unwrap();
        assert!((r.rhs - 1.0).abs() < 1e-12 && r.lhs.abs() < 1e-12);
        let r = verify_ckw_monogamy(&w, 0).unwrap();
        assert!((r.rhs - 8.0 / 9.0).abs() < 1e-12 && (r.lhs - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(verify_ckw_monogamy(&prod, 0).unwrap().slack, 0.0);
        let r = verify_coa_polygamy(&ghz, 0).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-12);
        let r = verify_coa_polygamy(&w, 0).unwrap();
        assert!(r.slack.abs() < 1e-12);
        assert!(r.q.is_nan() && r.s.is_nan());
    }

    #[test]
    fn tangle_identity_examples() {
        for psi in [
            PureState::ghz(3).unwrap(),
            PureState::w(3).unwrap(),
            PureState::basis(3, 3).unwrap(),
        ] {
            assert!(tangle_residual(&psi, 0).unwrap().abs() < 1e-12);
        }
        let mut rng = rng_from_seed(12);
        for _ in 0..50 {
            let psi = haar_random_pure(3, &mut rng).unwrap();
            for focus in 0..3 {
                let r = verify_tangle_identity(&psi, focus).unwrap();
                assert!(r.lhs <= 1e-12 && r.slack <= 0.0);
            }
        }
    }

    #[test]
    fn tsallis_record_matches_theorem1() {
        let w = PureState::w(3).unwrap();
        let t = verify_tsallis_reduction((&w).into(), 2.0, Mode::Analytic, 0, &cfg()).unwrap();
        let mut r = verify_theorem1((&w).into(), 2.0, 1.0, Mode::Analytic, 0, &cfg()).unwrap();
        r.inequality_id = "tsallis".into();
        assert_eq!(t, r);
    }

    #[test]
    fn csv_rows() {
        let mut r = verify_ckw_monogamy(&PureState::w(3).unwrap(), 0).unwrap();
        r.state_seed = Some(42);
        let row = r.csv_row();
        assert!(row.starts_with("ckw,3,nan,nan,analytic,42,"), "{row}");
        assert_eq!(row.split(',').count(), REPORT_CSV_HEADER.split(',').count());
    }
}
