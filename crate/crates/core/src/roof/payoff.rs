use num_complex::Complex64;

use crate::entropy::{unified_entropy, unified_entropy_of_spectrum, QSParams};
use crate::error::{Error, Result};
use crate::qstate::{
    partial_trace, single_qubit_gram, single_qubit_spectrum, Bipartition, PureState,
};
use crate::twoqubit::single_qubit_concurrence;

/// A functional on pure states of a fixed dimension, averaged by the roof engine.
pub trait Payoff: Send + Sync {
    fn name(&self) -> &str;

    /// Length of the amplitude vectors the payoff accepts.
    fn dim(&self) -> usize;

    /// Value on a normalized amplitude vector.
    fn value(&self, amps: &[Complex64]) -> f64;

    /// `|v|^2 value(v / |v|)` for an unnormalized vector; zero for `v = 0`.
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if w <= 0.0 {
            return 0.0;
        }
        let scale = 1.0 / w.sqrt();
        let normalized: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
        w * self.value(&normalized)
    }

    /// Whether `weighted_smoothed` differs from `weighted`. Payoffs with cone
    /// points (such as concurrence at product states) override both methods so
    /// the search can run a continuation in `mu`.
    fn has_smoothing(&self) -> bool {
        false
    }

    /// Smooth surrogate of `weighted` that tends to it as `mu -> 0`.
    fn weighted_smoothed(&self, v: &[Complex64], _mu: f64) -> f64 {
        self.weighted(v)
    }
}

/// If either side of `cut` is one qubit, that qubit: its marginal spectrum
/// determines every spectral function of either marginal.
fn single_side(cut: &Bipartition) -> Option<usize> {
    match (cut.side_a(), cut.side_b()) {
        ([q], _) | (_, [q]) => Some(*q),
        _ => None,
    }
}

/// Unified-(q,s) entropy of the side-A marginal: the pure-state unified entanglement.
#[derive(Debug, Clone)]
pub struct MarginalEntropy {
    cut: Bipartition,
    params: QSParams,
    single: Option<usize>,
}

impl MarginalEntropy {
    /// `side_a` holds local qubit positions of the payoff's register.
    pub fn new(n_qubits: usize, side_a: &[usize], params: QSParams) -> Result<Self> {
        let cut = Bipartition::new(n_qubits, side_a)?;
        let single = single_side(&cut);
        Ok(Self {
            cut,
            params,
            single,
        })
    }

    pub fn params(&self) -> QSParams {
        self.params
    }
}

impl Payoff for MarginalEntropy {
    fn name(&self) -> &str {
        "unified_entropy_of_marginal"
    }

    fn dim(&self) -> usize {
        1 << self.cut.n_qubits()
    }

    fn value(&self, amps: &[Complex64]) -> f64 {
        match self.single {
            Some(q) => unified_entropy_of_spectrum(&single_qubit_spectrum(amps, q), self.params),
            None => {
                let psi =
                    PureState::new(amps.to_vec()).expect("payoff evaluated on a nonzero vector");
                let rho = partial_trace(&psi, self.cut.side_a()).expect("validated cut");
                unified_entropy(&rho, self.params)
            }
        }
    }

    fn weighted(&self, v: &[Complex64]) -> f64 {
        match self.single {
            Some(q) => {
                let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if w <= 0.0 {
                    return 0.0;
                }
                w * unified_entropy_of_spectrum(&single_qubit_spectrum(v, q), self.params)
            }
            None => {
                let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if w <= 0.0 {
                    return 0.0;
                }
                w * self.value(v)
            }
        }
    }
}

/// Pure-state concurrence `sqrt(2 (1 - tr rho_A^2))` across a cut.
#[derive(Debug, Clone)]
pub struct PureConcurrence {
    cut: Bipartition,
    single: Option<usize>,
}

impl PureConcurrence {
    pub fn new(n_qubits: usize, side_a: &[usize]) -> Result<Self> {
        let cut = Bipartition::new(n_qubits, side_a)?;
        let single = single_side(&cut);
        Ok(Self { cut, single })
    }
}

impl Payoff for PureConcurrence {
    fn name(&self) -> &str {
        "concurrence"
    }

    fn dim(&self) -> usize {
        1 << self.cut.n_qubits()
    }

    fn value(&self, amps: &[Complex64]) -> f64 {
        match self.single {
            Some(q) => single_qubit_concurrence(amps, q),
            None => {
                let psi =
                    PureState::new(amps.to_vec()).expect("payoff evaluated on a nonzero vector");
                crate::twoqubit::concurrence_pure(&psi, &self.cut).expect("validated cut")
            }
        }
    }

    fn has_smoothing(&self) -> bool {
        self.single.is_some()
    }

    /// `2 sqrt(det + mu^2 w^2)`, with `det` the one-qubit Gram determinant.
    fn weighted_smoothed(&self, v: &[Complex64], mu: f64) -> f64 {
        match self.single {
            Some(q) => {
                let (w, det) = single_qubit_gram(v, q);
                2.0 * (det + mu * mu * w * w).sqrt()
            }
            None => self.weighted(v),
        }
    }

    fn weighted(&self, v: &[Complex64]) -> f64 {
        match self.single {
            Some(q) => single_qubit_concurrence(v, q),
            None => {
                let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                if w <= 0.0 {
                    return 0.0;
                }
                w * self.value(v)
            }
        }
    }
}

/// Adapter turning a closure on normalized amplitudes into a payoff.
pub struct FnPayoff<F> {
    name: String,
    dim: usize,
    f: F,
}

impl<F> FnPayoff<F>
where
    F: Fn(&[Complex64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, dim: usize, f: F) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidConfig(format!("payoff dimension {dim}")));
        }
        Ok(Self {
            name: name.into(),
            dim,
            f,
        })
    }
}

impl<F> Payoff for FnPayoff<F>
where
    F: Fn(&[Complex64]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, amps: &[Complex64]) -> f64 {
        (self.f)(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::haar_random_pure;
    use crate::rng::rng_from_seed;

    #[test]
    fn weighted_is_homogeneous() {
        let mut rng = rng_from_seed(41);
        let params = QSParams::new(1.5, 0.8).unwrap();
        let payoffs: Vec<Box<dyn Payoff>> = vec![
            Box::new(MarginalEntropy::new(3, &[0], params).unwrap()),
            Box::new(MarginalEntropy::new(3, &[0, 2], params).unwrap()),
            Box::new(PureConcurrence::new(3, &[1]).unwrap()),
            Box::new(PureConcurrence::new(4, &[0, 1]).unwrap()),
        ];
        for p in &payoffs {
            let n = p.dim().trailing_zeros() as usize;
            let psi = haar_random_pure(n, &mut rng).unwrap();
            let scaled: Vec<Complex64> = psi.amplitudes().iter().map(|z| z * 0.3).collect();
            let expect = 0.09 * p.value(psi.amplitudes());
            assert!((p.weighted(&scaled) - expect).abs() < 1e-14, "{}", p.name());
            assert_eq!(p.weighted(&vec![Complex64::new(0.0, 0.0); p.dim()]), 0.0);
        }
    }

    #[test]
    fn single_side_shortcut_matches_general_path() {
        let mut rng = rng_from_seed(43);
        let params = QSParams::new(2.0, 0.6).unwrap();
        let psi = haar_random_pure(3, &mut rng).unwrap();
        // {0,1} | {2}: the shortcut uses qubit 2's marginal.
        let fast = MarginalEntropy::new(3, &[0, 1], params).unwrap();
        let rho = partial_trace(&psi, &[0, 1]).unwrap();
        let slow = unified_entropy(&rho, params);
        assert!((fast.value(psi.amplitudes()) - slow).abs() < 1e-12);
    }
}
