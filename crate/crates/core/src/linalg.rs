//! Dense Hermitian helpers for the small (at most 2^5 x 2^5) matrices in scope.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues in `[-CLIP_TOL, 0)` are treated as roundoff and clipped to zero.
pub const CLIP_TOL: f64 = 1e-10;

/// Eigenvalues with magnitude below this floor are treated as exact zeros. The
/// Hermitian eigensolver leaves ~1e-16 noise in null directions; square roots of
/// that noise would otherwise surface as 1e-8 errors in fidelities and
/// concurrences.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
/// Column `i` of the returned matrix is the eigenvector of value `i`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `(m + m^dagger) / 2`.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Square root of a positive-semidefinite Hermitian matrix, clipping the spectrum at zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &v) in values.iter().enumerate() {
        if v <= SPECTRAL_FLOOR {
            continue;
        }
        let col = vectors.column(k);
        out += (col * col.adjoint()).scale(v.sqrt());
    }
    out
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Eigenvalues `(larger, smaller)` of the 2x2 Hermitian matrix `[[a, b], [b*, d]]`.
/// The smaller one comes from the determinant so it keeps full relative precision.
pub fn eig2_hermitian(a: f64, d: f64, b: Complex64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let big = mean + half_gap;
    if big <= 0.0 {
        return (big, mean - half_gap);
    }
    let det = a * d - b.norm_sqr();
    (big, det / big)
}

/// Complex standard normal sample (independent unit-variance real and imaginary parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-random `k x k` unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(k, k, |_, _| complex_normal(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..k {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..k {
            q[(row, c)] *= phase;
        }
    }
    q
}

/// Largest elementwise deviation of `m^dagger m` from the identity.
pub fn isometry_defect(m: &CMatrix) -> f64 {
    let g = m.adjoint() * m;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}
