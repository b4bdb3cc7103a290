//! Exact two-qubit layer: spin flip, the Wootters spectrum (concurrence and
//! concurrence of assistance), the `f_{q,s}` family and its `q -> 1` limit.

use num_complex::Complex64;
use serde::Serialize;

use crate::entropy::{shannon, unified_entropy, QSParams, EPS_LIMIT};
use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::qstate::{
    partial_trace, schmidt_coeffs, single_qubit_gram, Bipartition, DensityMatrix, PureState,
};

/// Lower edge `-q^2 + 4q - 3` of the `s` interval in the polygamy domain.
pub fn lemma2_s_lower(q: f64) -> f64 {
    -q * q + 4.0 * q - 3.0
}

/// `(q, s)` with the two domain flags, evaluated exactly (no tolerance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FRange {
    q: f64,
    s: f64,
    valid_functional: bool,
    valid_lemma2: bool,
}

impl FRange {
    pub fn new(q: f64, s: f64) -> Self {
        let valid_functional = q >= 1.0 && (0.0..=1.0).contains(&s) && q * s <= 3.0;
        let valid_lemma2 = (1.0..=2.0).contains(&q) && lemma2_s_lower(q) <= s && s <= 1.0;
        Self {
            q,
            s,
            valid_functional,
            valid_lemma2,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `q >= 1`, `0 <= s <= 1`, `qs <= 3`: where `E_{q,s} = f_{q,s}(C)` holds.
    pub fn valid_functional(&self) -> bool {
        self.valid_functional
    }

    /// `1 <= q <= 2`, `-q^2 + 4q - 3 <= s <= 1`: where the polygamy inequalities hold.
    pub fn valid_lemma2(&self) -> bool {
        self.valid_lemma2
    }

    /// Accepts the functional domain plus the `q -> 1` seam.
    pub(crate) fn require_functional(&self) -> Result<()> {
        let seam = (self.q - 1.0).abs() < EPS_LIMIT && (0.0..=1.0).contains(&self.s);
        if self.valid_functional || seam {
            Ok(())
        } else {
            Err(Error::domain(
                self.q,
                self.s,
                "q >= 1, 0 <= s <= 1 and qs <= 3",
            ))
        }
    }

    pub(crate) fn require_lemma2(&self) -> Result<()> {
        if !(1.0..=2.0).contains(&self.q) {
            return Err(Error::domain(self.q, self.s, "1 <= q <= 2"));
        }
        let lower = lemma2_s_lower(self.q);
        if !(lower <= self.s && self.s <= 1.0) {
            return Err(Error::domain(
                self.q,
                self.s,
                format!("-q^2 + 4q - 3 <= s <= 1 (here {lower} <= s <= 1)"),
            ));
        }
        Ok(())
    }
}

/// `Theta(t) = 1 + sqrt(1 - t^2)`.
pub fn theta(t: f64) -> f64 {
    1.0 + (1.0 - t * t).max(0.0).sqrt()
}

/// `Xi(t) = 1 - sqrt(1 - t^2)`, evaluated as `t^2 / Theta(t)`.
pub fn xi(t: f64) -> f64 {
    t * t / theta(t)
}

fn check_unit_interval(x: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-12).contains(&x) {
        return Err(Error::OutOfRange(format!("x = {x} not in [0, 1]")));
    }
    Ok(x.min(1.0))
}

/// `f_{q,s}(x) = [(Theta^q + Xi^q)^s / 2^{qs} - 1] / [(1 - q) s]` on `[0, 1]`.
///
/// Inside the `q = 1` seam this is the binary-entropy limit [`cal_e`]; inside the
/// `s = 0` seam the Rényi limit `ln[(Theta^q + Xi^q) / 2^q] / (1 - q)`.
pub fn f_qs(x: f64, range: &FRange) -> Result<f64> {
    range.require_functional()?;
    let x = check_unit_interval(x)?;
    Ok(f_qs_unchecked(x, range.q, range.s))
}

/// Formula evaluation without the domain check, for scans that deliberately
/// leave the functional domain.
pub(crate) fn f_qs_unchecked(x: f64, q: f64, s: f64) -> f64 {
    if (q - 1.0).abs() < EPS_LIMIT {
        return cal_e(x);
    }
    // 2^q is folded into the two terms: (Theta/2)^q + (Xi/2)^q, exactly 1 at x = 0.
    let half_theta = 0.5 * theta(x);
    let half_xi = 0.5 * xi(x);
    let sum = half_theta.powf(q) + if half_xi > 0.0 { half_xi.powf(q) } else { 0.0 };
    if s.abs() < EPS_LIMIT {
        sum.ln() / (1.0 - q)
    } else if (s - 1.0).abs() < EPS_LIMIT {
        (sum - 1.0) / (1.0 - q)
    } else {
        (s * sum.ln()).exp_m1() / ((1.0 - q) * s)
    }
}

/// `E(x) = H((1 - sqrt(1 - x^2)) / 2)` with the natural-log binary entropy `H`.
pub fn cal_e(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    shannon(&[0.5 * theta(x), 0.5 * xi(x)])
}

/// Checked [`cal_e`].
pub fn cal_e_checked(x: f64) -> Result<f64> {
    Ok(cal_e(check_unit_interval(x)?))
}

/// `v^T (sigma_y (x) sigma_y) w` for two-qubit vectors.
fn yy_form(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    -v[0] * w[3] - v[3] * w[0] + v[1] * w[2] + v[2] * w[1]
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    Ok(())
}

/// `(sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y)` in the computational basis.
pub fn spin_flip(rho: &DensityMatrix) -> Result<DensityMatrix> {
    require_two_qubit(rho)?;
    let mut yy = CMatrix::zeros(4, 4);
    yy[(0, 3)] = Complex64::new(-1.0, 0.0);
    yy[(3, 0)] = Complex64::new(-1.0, 0.0);
    yy[(1, 2)] = Complex64::new(1.0, 0.0);
    yy[(2, 1)] = Complex64::new(1.0, 0.0);
    let conj = rho.matrix().map(|z| z.conj());
    DensityMatrix::new(rho.labels().to_vec(), &yy * conj * &yy)
}

/// Eigenvalues of `sqrt(sqrt(rho) rho~ sqrt(rho))`, descending, padded to four.
///
/// For any ensemble `{v_i}` with `sum v_i v_i^dagger = rho` these are the singular
/// values of `tau_ij = v_i^T (sigma_y (x) sigma_y) v_j`. Working from an ensemble
/// avoids taking square roots of eigensolver noise on rank-deficient states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WoottersSpectrum {
    lambdas: [f64; 4],
}

impl WoottersSpectrum {
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        require_two_qubit(rho)?;
        Self::from_ensemble(&rho.sqrt_ensemble())
    }

    /// From unnormalized two-qubit vectors whose outer products sum to the state.
    pub fn from_ensemble(vectors: &[Vec<Complex64>]) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != 4) {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: bad.len(),
            });
        }
        let k = vectors.len();
        let tau = CMatrix::from_fn(k, k, |i, j| yy_form(&vectors[i], &vectors[j]));
        let sv = singular_values(&tau);
        let mut lambdas = [0.0; 4];
        for (slot, v) in lambdas.iter_mut().zip(sv) {
            *slot = v;
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> [f64; 4] {
        self.lambdas
    }

    /// `max{0, l1 - l2 - l3 - l4}`.
    pub fn concurrence(&self) -> f64 {
        let [l1, l2, l3, l4] = self.lambdas;
        (l1 - l2 - l3 - l4).max(0.0)
    }

    /// `l1 + l2 + l3 + l4`: the concurrence of assistance.
    pub fn assisted(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// Pure-state concurrence `sqrt(2 (1 - tr rho_A^2))` across `cut`.
///
/// When either side is a single qubit this is `2 sqrt(det rho_A)`, computed from
/// the Lagrange identity without cancellation.
pub fn concurrence_pure(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    if cut.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: psi.n_qubits(),
            got: cut.n_qubits(),
        });
    }
    if cut.side_a().len() == 1 {
        return Ok(single_qubit_concurrence(psi.amplitudes(), cut.side_a()[0]));
    }
    if cut.side_b().len() == 1 {
        return Ok(single_qubit_concurrence(psi.amplitudes(), cut.side_b()[0]));
    }
    let m = psi.bipartite_matrix(cut.side_a())?;
    let rho = &m * m.adjoint();
    let purity: f64 = rho.iter().map(|z| z.norm_sqr()).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// `2 sqrt(det rho_qubit)` scaled by the squared norm; homogeneous of degree two,
/// so for an unnormalized vector it returns `|v|^2 C(v / |v|)`.
pub(crate) fn single_qubit_concurrence(amps: &[Complex64], qubit: usize) -> f64 {
    2.0 * single_qubit_gram(amps, qubit).1.sqrt()
}

/// `max{0, l1 - l2 - l3 - l4}` of the Wootters spectrum.
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    Ok(WoottersSpectrum::from_density(rho)?.concurrence())
}

/// Concurrence of assistance, `l1 + l2 + l3 + l4`, which equals
/// `fidelity_root_sum(rho, spin_flip(rho))`.
pub fn coa_analytic(rho: &DensityMatrix) -> Result<f64> {
    Ok(WoottersSpectrum::from_density(rho)?.assisted())
}

/// `f_{q,s}(C(rho))`: the unified-(q,s) entanglement of a two-qubit state.
pub fn ue_2q_analytic(rho: &DensityMatrix, range: &FRange) -> Result<f64> {
    range.require_functional()?;
    f_qs(concurrence_wootters(rho)?, range)
}

/// `f_{q,s}(C^a(rho))`, a lower bound on the unified entanglement of assistance.
pub fn ueoa_lower_bound(rho: &DensityMatrix, range: &FRange) -> Result<f64> {
    range.require_functional()?;
    f_qs(coa_analytic(rho)?, range)
}

/// `E_{2,1}` of a pure state with Schmidt rank at most two across `cut`: the
/// Tsallis-2 entropy of the side-A marginal, which equals `C^2 / 2`.
pub fn e21_pure(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    let coeffs = schmidt_coeffs(psi, cut)?;
    if coeffs.iter().skip(2).any(|&c| c > 1e-7) {
        return Err(Error::InvalidState("Schmidt rank exceeds 2".into()));
    }
    let rho_a = partial_trace(psi, cut.side_a())?;
    Ok(unified_entropy(&rho_a, QSParams::new(2.0, 1.0)?))
}
