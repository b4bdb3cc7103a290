//! Qubit-register states: pure vectors, density matrices, reductions,
//! purification, fidelity and seeded random sampling.
//!
//! Index convention: little-endian. Qubit `k` is bit `k` of the basis index, so
//! for two qubits the basis order is `|q1 q0> = 00, 01, 10, 11` with qubit 0
//! varying fastest.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    complex_normal, hermitian_eigen, hermiticity_defect, singular_values, symmetrize, CMatrix,
    CLIP_TOL, SPECTRAL_FLOOR, ZERO,
};

const TRACE_TOL: f64 = 1e-10;

/// Unit-norm amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them. The length must be a
    /// power of two of at least 2.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sqr.is_finite() || norm_sqr <= 0.0 {
            return Err(Error::InvalidState(format!(
                "amplitude vector has squared norm {norm_sqr}"
            )));
        }
        // Vectors already normalized to roundoff are kept bit-for-bit.
        let amplitudes = if (norm_sqr - 1.0).abs() <= 8.0 * f64::EPSILON {
            amplitudes
        } else {
            let scale = 1.0 / norm_sqr.sqrt();
            amplitudes.into_iter().map(|a| a * scale).collect()
        };
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || index >= (1usize << n_qubits) {
            return Err(Error::OutOfRange(format!(
                "basis index {index} on {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// `(|00> + |11>) / sqrt 2`.
    pub fn bell() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, 1.0]).expect("static state")
    }

    /// `(|0...0> + |1...1>) / sqrt 2`.
    pub fn ghz(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut amps = vec![0.0; dim];
        amps[0] = 1.0;
        amps[dim - 1] = 1.0;
        Self::from_real(&amps)
    }

    /// Uniform superposition of the `n_qubits` single-excitation basis states.
    pub fn w(n_qubits: usize) -> Result<Self> {
        let mut amps = vec![0.0; 1usize << n_qubits];
        for k in 0..n_qubits {
            amps[1 << k] = 1.0;
        }
        Self::from_real(&amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `|psi><psi|` with labels `0..n`.
    pub fn to_density(&self) -> DensityMatrix {
        let v = CMatrix::from_column_slice(self.dim(), 1, &self.amplitudes);
        let rho = &v * v.adjoint();
        DensityMatrix::new((0..self.n_qubits).collect(), rho).expect("projector is a valid state")
    }

    /// Amplitudes reshaped into a `2^|keep| x 2^(n-|keep|)` matrix whose rows are
    /// indexed by the kept qubits and whose columns by the rest.
    pub fn bipartite_matrix(&self, keep: &[usize]) -> Result<CMatrix> {
        let split = Split::new(self.n_qubits, keep)?;
        let mut m = CMatrix::zeros(split.dim_keep(), split.dim_rest());
        for (i, &a) in self.amplitudes.iter().enumerate() {
            let (r, c) = split.split(i);
            m[(r, c)] = a;
        }
        Ok(m)
    }

    /// Unnormalized vectors `w_e = (1 (x) <e|) |psi>` on the kept qubits, one per
    /// basis state `e` of the traced-out qubits. They satisfy
    /// `sum_e w_e w_e^dagger = rho_keep`.
    pub fn reduced_ensemble(&self, keep: &[usize]) -> Result<Vec<Vec<Complex64>>> {
        let m = self.bipartite_matrix(keep)?;
        Ok((0..m.ncols())
            .map(|c| m.column(c).iter().copied().collect())
            .filter(|v: &Vec<Complex64>| v.iter().any(|z| z.norm_sqr() > 0.0))
            .collect())
    }
}

/// Partition of `0..n` into two nonempty complementary sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_qubits: usize, side_a: &[usize]) -> Result<Self> {
        let split = Split::new(n_qubits, side_a)?;
        Ok(Self {
            side_a: split.keep.clone(),
            side_b: split.rest.clone(),
        })
    }

    /// `{qubit} | rest`.
    pub fn single(n_qubits: usize, qubit: usize) -> Result<Self> {
        Self::new(n_qubits, &[qubit])
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn n_qubits(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }
}

/// Hermitian, positive-semidefinite, unit-trace matrix over labeled qubits.
///
/// Position `k` of `labels` is bit `k` of the local matrix index. The clipped,
/// renormalized spectrum is computed once at construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: CMatrix,
    spectrum: Vec<f64>,
    eigenvectors: CMatrix,
}

impl DensityMatrix {
    pub fn new(labels: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}, not square",
                dim,
                matrix.ncols()
            )));
        }
        if labels.is_empty() || dim != 1usize << labels.len() {
            return Err(Error::DimensionMismatch {
                expected: 1usize << labels.len(),
                got: dim,
            });
        }
        let mut seen = labels.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(Error::InvalidState(format!(
                "duplicate labels in {labels:?}"
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite matrix entry".into()));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > CLIP_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {defect:e})"
            )));
        }
        let matrix = symmetrize(&matrix);
        let trace: f64 = (0..dim).map(|i| matrix[(i, i)].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, not 1")));
        }
        let (mut spectrum, eigenvectors) = hermitian_eigen(&matrix);
        let min = spectrum.last().copied().unwrap_or(0.0);
        if min < -CLIP_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        for v in spectrum.iter_mut() {
            if *v < SPECTRAL_FLOOR {
                *v = 0.0;
            }
        }
        let total: f64 = spectrum.iter().sum();
        for v in spectrum.iter_mut() {
            *v /= total;
        }
        Ok(Self {
            labels,
            matrix,
            spectrum,
            eigenvectors,
        })
    }

    /// Maximally mixed state on qubits `0..n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(1.0 / dim as f64, 0.0)
            } else {
                ZERO
            }
        });
        Self::new((0..n_qubits).collect(), m).expect("valid state")
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues in descending order, clipped at zero and renormalized.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    /// Eigenvectors as columns, aligned with [`spectrum`](Self::spectrum).
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn rank(&self) -> usize {
        self.spectrum.iter().filter(|&&v| v > 0.0).count()
    }

    /// `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Square-root ensemble `sqrt(lambda_j) |e_j>` over the support.
    pub fn sqrt_ensemble(&self) -> Vec<Vec<Complex64>> {
        self.spectrum
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(k, &v)| {
                let s = v.sqrt();
                self.eigenvectors.column(k).iter().map(|z| z * s).collect()
            })
            .collect()
    }

    /// `d x r` matrix whose columns are the square-root ensemble.
    pub fn sqrt_factor(&self) -> CMatrix {
        let ens = self.sqrt_ensemble();
        CMatrix::from_fn(self.dim(), ens.len(), |i, j| ens[j][i])
    }

    /// Largest elementwise difference to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn positions_of(&self, keep: &[usize]) -> Result<Vec<usize>> {
        keep.iter()
            .map(|k| {
                self.labels.iter().position(|l| l == k).ok_or_else(|| {
                    Error::InvalidPartition(format!("qubit {k} not in labels {:?}", self.labels))
                })
            })
            .collect()
    }
}

/// Either kind of state, borrowed.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(p: &'a PureState) -> Self {
        StateRef::Pure(p)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

/// Reduced state on `keep` (qubit labels; for pure states the labels are `0..n`).
/// The result's labels are `keep` sorted ascending.
pub fn partial_trace<'a>(state: impl Into<StateRef<'a>>, keep: &[usize]) -> Result<DensityMatrix> {
    match state.into() {
        StateRef::Pure(psi) => {
            let m = psi.bipartite_matrix(keep)?;
            let mut labels = keep.to_vec();
            labels.sort_unstable();
            DensityMatrix::new(labels, &m * m.adjoint())
        }
        StateRef::Mixed(rho) => {
            let positions = rho.positions_of(keep)?;
            let split = Split::new(rho.n_qubits(), &positions)?;
            let dk = split.dim_keep();
            let mut out = CMatrix::zeros(dk, dk);
            for a in 0..dk {
                for b in 0..dk {
                    let mut acc = ZERO;
                    for e in 0..split.dim_rest() {
                        acc += rho.matrix[(split.join(a, e), split.join(b, e))];
                    }
                    out[(a, b)] = acc;
                }
            }
            let labels = split.keep.iter().map(|&p| rho.labels[p]).collect();
            DensityMatrix::new(labels, out)
        }
    }
}

/// Schmidt coefficients across `cut`, descending. Their squares sum to one.
pub fn schmidt_coeffs(psi: &PureState, cut: &Bipartition) -> Result<Vec<f64>> {
    if cut.n_qubits() != psi.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: psi.n_qubits(),
            got: cut.n_qubits(),
        });
    }
    Ok(singular_values(&psi.bipartite_matrix(cut.side_a())?))
}

/// Purification `sum_j sqrt(lambda_j) |e_j> (x) |j>`. The system occupies qubits
/// `0..n`, the ancilla the next `ceil(log2 rank)` qubits.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let ensemble = rho.sqrt_ensemble();
    let rank = ensemble.len();
    let anc_qubits = rank.next_power_of_two().trailing_zeros() as usize;
    let dim = rho.dim();
    let mut amps = vec![ZERO; dim << anc_qubits];
    for (j, v) in ensemble.iter().enumerate() {
        for (i, &z) in v.iter().enumerate() {
            amps[i + j * dim] = z;
        }
    }
    PureState::new(amps).expect("purification of a valid state is normalizable")
}

/// `sum_i lambda_i` over the eigenvalues of `sqrt(sqrt(rho) sigma sqrt(rho))`,
/// evaluated as the nuclear norm of `B_sigma^dagger B_rho` for square-root factors
/// `B B^dagger = rho`.
pub fn fidelity_root_sum(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let m = sigma.sqrt_factor().adjoint() * rho.sqrt_factor();
    Ok(singular_values(&m).iter().sum())
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn haar_random_pure<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    if n_qubits == 0 {
        return Err(Error::OutOfRange("n_qubits must be at least 1".into()));
    }
    let amps = (0..1usize << n_qubits)
        .map(|_| complex_normal(rng))
        .collect();
    PureState::new(amps)
}

/// Random mixed state from the induced measure: the system marginal of a Haar
/// pure state on system (x) C^rank.
pub fn random_mixed<R: Rng + ?Sized>(
    n_qubits: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if n_qubits == 0 {
        return Err(Error::OutOfRange("n_qubits must be at least 1".into()));
    }
    let dim = 1usize << n_qubits;
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfBounds { rank, max: dim });
    }
    let g = CMatrix::from_fn(dim, rank, |_, _| complex_normal(rng));
    let m = &g * g.adjoint();
    let trace: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new((0..n_qubits).collect(), m.unscale(trace))
}

/// `(|v|^2, det G)` for the Gram matrix `G` of the two branches `u0`, `u1` of `amps`
/// with `qubit` in state 0 and 1; `G` is the unnormalized single-qubit marginal.
/// The determinant uses the Lagrange identity
/// `det G = sum_{i<j} |u0_i u1_j - u0_j u1_i|^2`, which has no cancellation.
pub(crate) fn single_qubit_gram(amps: &[Complex64], qubit: usize) -> (f64, f64) {
    let bit = 1usize << qubit;
    let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let mut det = 0.0;
    for i in (0..amps.len()).filter(|i| i & bit == 0) {
        for j in (i + 1..amps.len()).filter(|j| j & bit == 0) {
            det += (amps[i] * amps[j | bit] - amps[j] * amps[i | bit]).norm_sqr();
        }
    }
    (norm_sqr, det)
}

/// Descending spectrum of the single-qubit marginal of the normalized `amps / |amps|`.
pub(crate) fn single_qubit_spectrum(amps: &[Complex64], qubit: usize) -> [f64; 2] {
    let (w, det) = single_qubit_gram(amps, qubit);
    if w <= 0.0 {
        return [1.0, 0.0];
    }
    let x = det / (w * w);
    let big = 0.5 * (1.0 + (1.0 - 4.0 * x).max(0.0).sqrt());
    [big, x / big]
}

fn qubits_for_dim(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "amplitude vector length {len} is not a power of two >= 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Bit bookkeeping for a kept/traced split of `n` local qubit positions.
struct Split {
    keep: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    fn new(n: usize, keep: &[usize]) -> Result<Self> {
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        if k.len() != keep.len() {
            return Err(Error::InvalidPartition(format!(
                "duplicate qubits in {keep:?}"
            )));
        }
        if k.is_empty() {
            return Err(Error::InvalidPartition("kept set is empty".into()));
        }
        if k.iter().any(|&q| q >= n) {
            return Err(Error::InvalidPartition(format!(
                "qubit out of range in {keep:?} for {n} qubits"
            )));
        }
        if k.len() == n {
            return Err(Error::InvalidPartition(
                "kept set covers every qubit".into(),
            ));
        }
        let rest = (0..n).filter(|q| !k.contains(q)).collect();
        Ok(Self { keep: k, rest })
    }

    fn dim_keep(&self) -> usize {
        1 << self.keep.len()
    }

    fn dim_rest(&self) -> usize {
        1 << self.rest.len()
    }

    fn split(&self, index: usize) -> (usize, usize) {
        (gather(index, &self.keep), gather(index, &self.rest))
    }

    fn join(&self, a: usize, e: usize) -> usize {
        scatter(a, &self.keep) | scatter(e, &self.rest)
    }
}

fn gather(index: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &p)| acc | (((index >> p) & 1) << t))
}

fn scatter(bits: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &p)| acc | (((bits >> t) & 1) << p))
}

// ---------------------------------------------------------------------------
// JSON I/O

/// `{"n_qubits": n, "amplitudes": [[re, im], ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateJson {
    pub n_qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

/// `{"labels": [...], "matrix": [[[re, im], ...], ...]}`, row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub labels: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Pure(PureStateJson),
    Mixed(DensityMatrixJson),
}

/// An owned state of either kind, as read from a state file.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn as_ref(&self) -> StateRef<'_> {
        match self {
            State::Pure(p) => StateRef::Pure(p),
            State::Mixed(r) => StateRef::Mixed(r),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(p) => p.n_qubits(),
            State::Mixed(r) => r.n_qubits(),
        }
    }

    /// Density matrix of the state (the projector for pure states).
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        Self::try_from(raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> StateJson {
        match self {
            State::Pure(p) => StateJson::Pure(PureStateJson {
                n_qubits: p.n_qubits(),
                amplitudes: p.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            }),
            State::Mixed(r) => StateJson::Mixed(DensityMatrixJson {
                labels: r.labels().to_vec(),
                matrix: (0..r.dim())
                    .map(|i| {
                        (0..r.dim())
                            .map(|j| [r.matrix()[(i, j)].re, r.matrix()[(i, j)].im])
                            .collect()
                    })
                    .collect(),
            }),
        }
    }
}

impl TryFrom<StateJson> for State {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        match raw {
            StateJson::Pure(p) => {
                let psi = PureState::new(
                    p.amplitudes
                        .iter()
                        .map(|&[re, im]| Complex64::new(re, im))
                        .collect(),
                )?;
                if psi.n_qubits() != p.n_qubits {
                    return Err(Error::DimensionMismatch {
                        expected: 1usize << p.n_qubits,
                        got: psi.dim(),
                    });
                }
                Ok(State::Pure(psi))
            }
            StateJson::Mixed(d) => {
                let n = d.matrix.len();
                if d.matrix.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidState(
                        "matrix rows have unequal length".into(),
                    ));
                }
                let m = CMatrix::from_fn(n, n, |i, j| {
                    Complex64::new(d.matrix[i][j][0], d.matrix[i][j][1])
                });
                Ok(State::Mixed(DensityMatrix::new(d.labels, m)?))
            }
        }
    }
}
