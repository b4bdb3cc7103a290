//! Parameter-grid scans as named strategies for the command line.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemmafn::{h_region_scan, m_critical_surface, Axis, DomainMode, GridSpec, ScanCell};
use crate::qstate::{haar_random_pure, PureState};
use crate::registry::{Named, Registry};
use crate::rng::{derive_seed, rng_from_seed};
use crate::verify::theorem1_slack_unchecked;

/// Grid plus the sampling knobs used by state-based scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRequest {
    pub grid: GridSpec,
    /// Haar states per cell for state-based scans.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_qubits")]
    pub n_qubits: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    20
}

fn default_qubits() -> usize {
    3
}

pub trait Scan: Named + Send + Sync {
    fn description(&self) -> &str;
    fn default_grid(&self) -> GridSpec;
    fn run(&self, request: &ScanRequest) -> Result<Vec<ScanCell>>;

    fn default_request(&self) -> ScanRequest {
        ScanRequest {
            grid: self.default_grid(),
            samples: default_samples(),
            n_qubits: default_qubits(),
            seed: 0,
        }
    }
}

/// The extended box `[0.5, 2.5] x [0, 1.5]` around the lemma region.
fn extended_box(steps: usize, x_steps: usize) -> GridSpec {
    GridSpec {
        q_range: Axis {
            lo: 0.5,
            hi: 2.5,
            steps,
        },
        s_range: Axis {
            lo: 0.0,
            hi: 1.5,
            steps,
        },
        x_steps,
        domain_mode: DomainMode::FullBox,
    }
}

struct MSurface;
impl Named for MSurface {
    fn name(&self) -> &str {
        "m_surface"
    }
}
impl Scan for MSurface {
    fn description(&self) -> &str {
        "m_{q,s}(1/sqrt 2) at every (q, s) node"
    }
    fn default_grid(&self) -> GridSpec {
        extended_box(50, 2)
    }
    fn run(&self, request: &ScanRequest) -> Result<Vec<ScanCell>> {
        m_critical_surface(&request.grid)
    }
}

struct HRegion;
impl Named for HRegion {
    fn name(&self) -> &str {
        "h_region"
    }
}
impl Scan for HRegion {
    fn description(&self) -> &str {
        "grid maximum of h_{q,s} over the quarter disk, with its location"
    }
    fn default_grid(&self) -> GridSpec {
        GridSpec {
            q_range: Axis {
                lo: 1.0,
                hi: 2.0,
                steps: 50,
            },
            s_range: Axis {
                lo: 0.0,
                hi: 1.0,
                steps: 50,
            },
            x_steps: 200,
            domain_mode: DomainMode::Lemma2Region,
        }
    }
    fn run(&self, request: &ScanRequest) -> Result<Vec<ScanCell>> {
        h_region_scan(&request.grid)
    }
}

struct DomainRegion;
impl Named for DomainRegion {
    fn name(&self) -> &str {
        "domain_region"
    }
}
impl Scan for DomainRegion {
    fn description(&self) -> &str {
        "minimum analytic theorem1 slack over a Haar sample, focus qubit 0, at every (q, s) node"
    }
    fn default_grid(&self) -> GridSpec {
        extended_box(26, 2)
    }
    fn run(&self, request: &ScanRequest) -> Result<Vec<ScanCell>> {
        request.grid.validate()?;
        if request.samples == 0 {
            return Err(Error::InvalidConfig(
                "domain_region needs samples >= 1".into(),
            ));
        }
        if request.n_qubits < 3 {
            return Err(Error::InvalidConfig(
                "domain_region needs at least 3 qubits".into(),
            ));
        }
        let states: Vec<PureState> = (0..request.samples)
            .map(|i| {
                haar_random_pure(
                    request.n_qubits,
                    &mut rng_from_seed(derive_seed(request.seed, i as u64)),
                )
            })
            .collect::<Result<_>>()?;
        request
            .grid
            .parameter_nodes()
            .into_par_iter()
            .map(|(q, s)| {
                let mut min = f64::INFINITY;
                for psi in &states {
                    min = min.min(theorem1_slack_unchecked(psi, q, s, 0)?);
                }
                Ok(ScanCell::new(q, s, f64::NAN, f64::NAN, min))
            })
            .collect()
    }
}

/// Built-in scans: m_surface, h_region, domain_region.
pub fn scan_registry() -> &'static Registry<dyn Scan> {
    static REGISTRY: OnceLock<Registry<dyn Scan>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut reg: Registry<dyn Scan> = Registry::new("scan");
        let all: Vec<Box<dyn Scan>> = vec![
            Box::new(MSurface),
            Box::new(HRegion),
            Box::new(DomainRegion),
        ];
        for s in all {
            reg.register(s).expect("builtin names are unique");
        }
        reg
    })
}
