//! Inequalities as named strategies, so campaigns and the command line can
//! select them at runtime.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::qstate::StateRef;
use crate::registry::{Named, Registry};
use crate::roof::RoofConfig;
use crate::twoqubit::FRange;

use super::{
    require_pure, verify_ckw_monogamy, verify_coa_polygamy, verify_tangle_identity,
    verify_theorem1, verify_theorem2, verify_tsallis_reduction, Mode, SlackRecord,
};

/// Parameters shared by every evaluation in a run.
#[derive(Debug, Clone)]
pub struct EvalContext {
    pub q: f64,
    pub s: f64,
    pub mode: Mode,
    pub focus: usize,
    pub roof: RoofConfig,
}

pub trait Inequality: Named + Send + Sync {
    fn description(&self) -> &str;

    /// Smallest and largest supported register size.
    fn qubit_range(&self) -> (usize, Option<usize>);

    fn accepts_mixed(&self) -> bool {
        false
    }

    fn modes(&self) -> &'static [Mode] {
        &[Mode::Analytic]
    }

    /// The `(q, s)` actually evaluated for a requested point: NaN for
    /// parameter-free inequalities.
    fn effective_params(&self, q: f64, s: f64) -> (f64, f64) {
        let _ = (q, s);
        (f64::NAN, f64::NAN)
    }

    /// Rejects requested parameters outside the inequality's stated domain.
    fn check_domain(&self, q: f64, s: f64) -> Result<()> {
        let _ = (q, s);
        Ok(())
    }

    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord>;

    /// Register size, purity and mode checks shared by all inequalities.
    fn check_applicable(&self, n_qubits: usize, mixed: bool, mode: Mode) -> Result<()> {
        let (lo, hi) = self.qubit_range();
        if n_qubits < lo || hi.is_some_and(|h| n_qubits > h) {
            return Err(Error::InvalidConfig(format!(
                "{} needs {} qubits, got {n_qubits}",
                self.name(),
                match hi {
                    Some(h) if h == lo => format!("exactly {lo}"),
                    Some(h) => format!("{lo} to {h}"),
                    None => format!("at least {lo}"),
                }
            )));
        }
        if mixed && !self.accepts_mixed() {
            return Err(Error::InvalidConfig(format!(
                "{} requires pure states",
                self.name()
            )));
        }
        if !self.modes().contains(&mode) {
            return Err(Error::InvalidConfig(format!(
                "{} does not support {} mode",
                self.name(),
                mode.as_str()
            )));
        }
        Ok(())
    }
}

const ALL_MODES: &[Mode] = &[Mode::Analytic, Mode::Variational, Mode::Hybrid];

fn lemma_domain(q: f64, s: f64) -> Result<()> {
    FRange::new(q, s).require_lemma2()
}

struct Theorem1;
impl Named for Theorem1 {
    fn name(&self) -> &str {
        "theorem1"
    }
}
impl Inequality for Theorem1 {
    fn description(&self) -> &str {
        "unified-(q,s) entanglement of assistance is polygamous: E^a(A1|rest) <= sum_i E^a(A1 Ai)"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, None)
    }
    fn accepts_mixed(&self) -> bool {
        true
    }
    fn modes(&self) -> &'static [Mode] {
        ALL_MODES
    }
    fn effective_params(&self, q: f64, s: f64) -> (f64, f64) {
        (q, s)
    }
    fn check_domain(&self, q: f64, s: f64) -> Result<()> {
        lemma_domain(q, s)
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_theorem1(state, ctx.q, ctx.s, ctx.mode, ctx.focus, &ctx.roof)
    }
}

struct Theorem2;
impl Named for Theorem2 {
    fn name(&self) -> &str {
        "theorem2"
    }
}
impl Inequality for Theorem2 {
    fn description(&self) -> &str {
        "three-qubit refinement: f(C_A|BC) <= f(C_AB) + f(C^a_AC)"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, Some(3))
    }
    fn modes(&self) -> &'static [Mode] {
        ALL_MODES
    }
    fn effective_params(&self, q: f64, s: f64) -> (f64, f64) {
        (q, s)
    }
    fn check_domain(&self, q: f64, s: f64) -> Result<()> {
        lemma_domain(q, s)
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_theorem2(
            require_pure(state, "theorem2")?,
            ctx.q,
            ctx.s,
            ctx.mode,
            ctx.focus,
            &ctx.roof,
        )
    }
}

struct Ckw;
impl Named for Ckw {
    fn name(&self) -> &str {
        "ckw"
    }
}
impl Inequality for Ckw {
    fn description(&self) -> &str {
        "squared-concurrence monogamy: sum_i C^2(A1 Ai) <= C^2(A1|rest)"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, None)
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_ckw_monogamy(require_pure(state, "ckw")?, ctx.focus)
    }
}

struct CoaPolygamy;
impl Named for CoaPolygamy {
    fn name(&self) -> &str {
        "coa_polygamy"
    }
}
impl Inequality for CoaPolygamy {
    fn description(&self) -> &str {
        "concurrence-of-assistance polygamy: C^2(A1|rest) <= sum_i C^a(A1 Ai)^2"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, None)
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_coa_polygamy(require_pure(state, "coa_polygamy")?, ctx.focus)
    }
}

struct Tangle;
impl Named for Tangle {
    fn name(&self) -> &str {
        "tangle"
    }
}
impl Inequality for Tangle {
    fn description(&self) -> &str {
        "three-qubit identity C^2(A|BC) = C^2(AB) + C^a(AC)^2, reported as -|residual|"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, Some(3))
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_tangle_identity(require_pure(state, "tangle")?, ctx.focus)
    }
}

struct Tsallis;
impl Named for Tsallis {
    fn name(&self) -> &str {
        "tsallis"
    }
}
impl Inequality for Tsallis {
    fn description(&self) -> &str {
        "Tsallis-q specialization of theorem1 (s = 1; requested s is ignored)"
    }
    fn qubit_range(&self) -> (usize, Option<usize>) {
        (3, None)
    }
    fn accepts_mixed(&self) -> bool {
        true
    }
    fn modes(&self) -> &'static [Mode] {
        ALL_MODES
    }
    fn effective_params(&self, q: f64, _s: f64) -> (f64, f64) {
        (q, 1.0)
    }
    fn check_domain(&self, q: f64, _s: f64) -> Result<()> {
        lemma_domain(q, 1.0)
    }
    fn evaluate(&self, state: StateRef<'_>, ctx: &EvalContext) -> Result<SlackRecord> {
        verify_tsallis_reduction(state, ctx.q, ctx.mode, ctx.focus, &ctx.roof)
    }
}

/// Built-in inequalities: theorem1, theorem2, ckw, coa_polygamy, tangle, tsallis.
pub fn inequality_registry() -> &'static Registry<dyn Inequality> {
    static REGISTRY: OnceLock<Registry<dyn Inequality>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Inequality> = Registry::new("inequality");
        let builtins: Vec<Box<dyn Inequality>> = vec![
            Box::new(Theorem1),
            Box::new(Theorem2),
            Box::new(Ckw),
            Box::new(CoaPolygamy),
            Box::new(Tangle),
            Box::new(Tsallis),
        ];
        for b in builtins {
            reg.register(b).expect("builtin names are unique");
        }
        reg
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::PureState;

    #[test]
    fn registry_lookup() {
        let reg = inequality_registry();
        assert_eq!(
            reg.names(),
            [
                "theorem1",
                "theorem2",
                "ckw",
                "coa_polygamy",
                "tangle",
                "tsallis"
            ]
        );
        assert!(reg.get("theorem3").is_err());
        let t1 = reg.get("theorem1").unwrap();
        assert!(t1.check_domain(2.0, 0.5).is_err());
        assert!(t1.check_domain(1.5, 0.75).is_ok());
        assert!(reg
            .get("tangle")
            .unwrap()
            .check_applicable(4, false, Mode::Analytic)
            .is_err());
        assert!(reg
            .get("ckw")
            .unwrap()
            .check_applicable(3, false, Mode::Variational)
            .is_err());
        assert!(reg
            .get("theorem2")
            .unwrap()
            .check_applicable(3, true, Mode::Analytic)
            .is_err());
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let w = PureState::w(3).unwrap();
        let ctx = EvalContext {
            q: 2.0,
            s: 1.0,
            mode: Mode::Analytic,
            focus: 0,
            roof: RoofConfig::default(),
        };
        let via = inequality_registry()
            .get("theorem2")
            .unwrap()
            .evaluate((&w).into(), &ctx)
            .unwrap();
        let direct = verify_theorem2(&w, 2.0, 1.0, Mode::Analytic, 0, &ctx.roof).unwrap();
        assert_eq!(via, direct);
    }
}
