//! Entanglement measures as named strategies for the command line.

use std::sync::OnceLock;

use serde::Serialize;

use crate::entropy::{unified_entropy, QSParams};
use crate::error::{Error, Result};
use crate::qstate::{partial_trace, Bipartition, DensityMatrix, State};
use crate::registry::{Named, Registry};
use crate::roof::{self, concurrence_roof, BoundKind, Direction, RoofConfig, RoofResult};
use crate::twoqubit::{
    cal_e_checked, coa_analytic, concurrence_pure, concurrence_wootters, f_qs, FRange,
};

/// Arguments a measure may draw on; each measure states which it needs.
#[derive(Debug, Clone, Default)]
pub struct MeasureInput {
    pub state: Option<State>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub x: Option<f64>,
    /// Qubit labels kept before taking an entropy; the whole state if absent.
    pub subsystem: Option<Vec<usize>>,
    pub roof: RoofConfig,
}

impl MeasureInput {
    fn state(&self, measure: &str) -> Result<&State> {
        self.state
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig(format!("{measure} needs a state")))
    }

    fn param(&self, v: Option<f64>, name: &str, measure: &str) -> Result<f64> {
        v.ok_or_else(|| Error::InvalidConfig(format!("{measure} needs --{name}")))
    }

    fn params(&self, measure: &str) -> Result<QSParams> {
        QSParams::new(
            self.param(self.q, "q", measure)?,
            self.param(self.s, "s", measure)?,
        )
    }

    fn x(&self, measure: &str) -> Result<f64> {
        self.param(self.x, "x", measure)
    }
}

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMode {
    Analytic,
    Variational,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureOutput {
    pub measure: String,
    pub value: f64,
    pub mode: MeasureMode,
    /// Relation of `value` to the exact quantity; absent for closed forms.
    pub bound: Option<BoundKind>,
    pub converged: Option<bool>,
    pub restarts_used: Option<usize>,
    pub cardinality: Option<usize>,
}

impl MeasureOutput {
    fn analytic(measure: &str, value: f64) -> Self {
        Self {
            measure: measure.to_string(),
            value,
            mode: MeasureMode::Analytic,
            bound: None,
            converged: None,
            restarts_used: None,
            cardinality: None,
        }
    }

    fn from_roof(measure: &str, r: &RoofResult) -> Self {
        Self {
            measure: measure.to_string(),
            value: r.value,
            mode: MeasureMode::Variational,
            bound: Some(r.bound),
            converged: Some(r.converged),
            restarts_used: Some(r.restarts_used),
            cardinality: Some(r.cardinality),
        }
    }
}

pub trait Measure: Named + Send + Sync {
    fn description(&self) -> &str;
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput>;
}

type RoofFn = fn(&DensityMatrix, &MeasureInput, &RoofConfig) -> Result<RoofResult>;

/// A roof-type measure across the first qubit and the rest.
struct RoofMeasure {
    name: &'static str,
    description: &'static str,
    run: RoofFn,
}

impl Named for RoofMeasure {
    fn name(&self) -> &str {
        self.name
    }
}

impl Measure for RoofMeasure {
    fn description(&self) -> &str {
        self.description
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        let rho = input.state(self.name)?.to_density();
        if rho.n_qubits() < 2 {
            return Err(Error::InvalidState(format!(
                "{} needs at least two qubits",
                self.name
            )));
        }
        let r = (self.run)(&rho, input, &input.roof)?;
        Ok(MeasureOutput::from_roof(self.name, &r))
    }
}

struct UnifiedEntropy;
impl Named for UnifiedEntropy {
    fn name(&self) -> &str {
        "unified_entropy"
    }
}
impl Measure for UnifiedEntropy {
    fn description(&self) -> &str {
        "unified-(q,s) entropy of the state, or of its marginal on --subsystem"
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        let params = input.params(self.name())?;
        let state = input.state(self.name())?;
        let rho = match &input.subsystem {
            Some(keep) => partial_trace(state.as_ref(), keep)?,
            None => state.to_density(),
        };
        Ok(MeasureOutput::analytic(
            self.name(),
            unified_entropy(&rho, params),
        ))
    }
}

struct Concurrence;
impl Named for Concurrence {
    fn name(&self) -> &str {
        "concurrence"
    }
}
impl Measure for Concurrence {
    fn description(&self) -> &str {
        "concurrence across the first qubit and the rest: pure closed form, Wootters for two-qubit mixed states, roof minimum otherwise"
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        match input.state(self.name())? {
            State::Pure(p) => {
                let v = concurrence_pure(p, &Bipartition::single(p.n_qubits(), 0)?)?;
                Ok(MeasureOutput::analytic(self.name(), v))
            }
            State::Mixed(r) if r.n_qubits() == 2 => Ok(MeasureOutput::analytic(
                self.name(),
                concurrence_wootters(r)?,
            )),
            State::Mixed(r) => {
                let res = concurrence_roof(r, &[r.labels()[0]], Direction::Min, &input.roof)?;
                Ok(MeasureOutput::from_roof(self.name(), &res))
            }
        }
    }
}

struct CoaAnalytic;
impl Named for CoaAnalytic {
    fn name(&self) -> &str {
        "coa_analytic"
    }
}
impl Measure for CoaAnalytic {
    fn description(&self) -> &str {
        "concurrence of assistance of a two-qubit state from the Wootters spectrum"
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        let rho = input.state(self.name())?.to_density();
        Ok(MeasureOutput::analytic(self.name(), coa_analytic(&rho)?))
    }
}

struct FQs;
impl Named for FQs {
    fn name(&self) -> &str {
        "f_qs"
    }
}
impl Measure for FQs {
    fn description(&self) -> &str {
        "f_{q,s}(x), the unified entanglement of a two-qubit state with concurrence x"
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        let (q, s) = (
            input.param(input.q, "q", "f_qs")?,
            input.param(input.s, "s", "f_qs")?,
        );
        Ok(MeasureOutput::analytic(
            self.name(),
            f_qs(input.x("f_qs")?, &FRange::new(q, s))?,
        ))
    }
}

struct CalE;
impl Named for CalE {
    fn name(&self) -> &str {
        "calE"
    }
}
impl Measure for CalE {
    fn description(&self) -> &str {
        "E(x), the entanglement of formation of a two-qubit state with concurrence x (nats)"
    }
    fn evaluate(&self, input: &MeasureInput) -> Result<MeasureOutput> {
        Ok(MeasureOutput::analytic(
            self.name(),
            cal_e_checked(input.x("calE")?)?,
        ))
    }
}

/// Built-in measures.
pub fn measure_registry() -> &'static Registry<dyn Measure> {
    static REGISTRY: OnceLock<Registry<dyn Measure>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Measure> = Registry::new("measure");
        let roofs: [(&'static str, &'static str, RoofFn); 6] = [
            (
                "unified_entanglement",
                "roof minimum of the unified-(q,s) marginal entropy",
                |r, i, c| roof::unified_entanglement(r, i.params("unified_entanglement")?, c),
            ),
            (
                "ueoa",
                "roof maximum of the unified-(q,s) marginal entropy",
                |r, i, c| roof::ueoa(r, i.params("ueoa")?, c),
            ),
            ("eof", "entanglement of formation (nats)", |r, _, c| {
                roof::eof(r, c)
            }),
            ("eoa", "entanglement of assistance (nats)", |r, _, c| {
                roof::eoa(r, c)
            }),
            ("teoa", "Tsallis-q entanglement of assistance", |r, i, c| {
                roof::teoa(r, i.param(i.q, "q", "teoa")?, c)
            }),
            (
                "coa",
                "concurrence of assistance (roof maximum)",
                |r, _, c| roof::coa(r, c),
            ),
        ];
        let mut all: Vec<Box<dyn Measure>> = vec![Box::new(UnifiedEntropy)];
        for (name, description, run) in roofs {
            all.push(Box::new(RoofMeasure {
                name,
                description,
                run,
            }));
        }
        all.push(Box::new(Concurrence));
        all.push(Box::new(CoaAnalytic));
        all.push(Box::new(FQs));
        all.push(Box::new(CalE));
        for m in all {
            reg.register(m).expect("builtin names are unique");
        }
        reg
    })
}
