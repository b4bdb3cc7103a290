//! Coordinate search over the mixer unitary group.
//!
//! Each coordinate is one generator of `u(k)` acting on a pair of rows, in a
//! chart re-centred at the current iterate. A generator moves only two
//! ensemble vectors, so a trial costs two payoff evaluations.

use num_complex::Complex64;

use super::payoff::Payoff;

/// Largest step along one generator; rotations have period `pi` up to phases.
const MAX_STEP: f64 = 0.8;
const INITIAL_STEP: f64 = 0.3;
/// Sweeps with improvement below `value_tol` before stopping.
const STALL_SWEEPS: usize = 3;

#[derive(Clone, Copy)]
enum Generator {
    Real,
    Imag,
}

/// Coefficients `(alpha, beta)` of `row_i' = c row_i + alpha row_j`, `row_j' = beta row_i + c row_j`.
fn coefficients(g: Generator, t: f64) -> (f64, Complex64, Complex64) {
    let (s, c) = t.sin_cos();
    match g {
        Generator::Real => (c, Complex64::new(s, 0.0), Complex64::new(-s, 0.0)),
        Generator::Imag => (c, Complex64::new(0.0, s), Complex64::new(0.0, s)),
    }
}

fn rotate_into(
    a: &[Complex64],
    b: &[Complex64],
    coef: (f64, Complex64, Complex64),
    out_a: &mut [Complex64],
    out_b: &mut [Complex64],
) {
    let (c, alpha, beta) = coef;
    for ((x, y), (oa, ob)) in a.iter().zip(b).zip(out_a.iter_mut().zip(out_b.iter_mut())) {
        *oa = x * c + alpha * y;
        *ob = beta * x + y * c;
    }
}

pub(crate) struct SearchOptions {
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    /// Smoothing scale for this stage; `None` evaluates the exact payoff.
    pub mu: Option<f64>,
}

pub(crate) struct SearchOutcome {
    /// Final mixer rows, `k x r`.
    pub mixer: Vec<Vec<Complex64>>,
    pub converged: bool,
}

struct State<'a> {
    payoff: &'a dyn Payoff,
    sign: f64,
    mu: Option<f64>,
    vecs: Vec<Vec<Complex64>>,
    mixer: Vec<Vec<Complex64>>,
    contrib: Vec<f64>,
    buf_a: Vec<Complex64>,
    buf_b: Vec<Complex64>,
}

impl State<'_> {
    fn eval(&self, v: &[Complex64]) -> f64 {
        self.sign
            * match self.mu {
                Some(mu) => self.payoff.weighted_smoothed(v, mu),
                None => self.payoff.weighted(v),
            }
    }

    fn trial(&mut self, i: usize, j: usize, g: Generator, t: f64) -> f64 {
        let coef = coefficients(g, t);
        rotate_into(
            &self.vecs[i],
            &self.vecs[j],
            coef,
            &mut self.buf_a,
            &mut self.buf_b,
        );
        self.eval(&self.buf_a) + self.eval(&self.buf_b)
    }

    fn commit(&mut self, i: usize, j: usize, g: Generator, t: f64) {
        let coef = coefficients(g, t);
        rotate_into(
            &self.vecs[i],
            &self.vecs[j],
            coef,
            &mut self.buf_a,
            &mut self.buf_b,
        );
        self.vecs[i].copy_from_slice(&self.buf_a);
        self.vecs[j].copy_from_slice(&self.buf_b);
        let r = self.mixer[i].len();
        let mut ma = vec![Complex64::new(0.0, 0.0); r];
        let mut mb = vec![Complex64::new(0.0, 0.0); r];
        rotate_into(&self.mixer[i], &self.mixer[j], coef, &mut ma, &mut mb);
        self.mixer[i] = ma;
        self.mixer[j] = mb;
        self.contrib[i] = self.eval(&self.vecs[i]);
        self.contrib[j] = self.eval(&self.vecs[j]);
    }

    fn is_zero(&self, i: usize) -> bool {
        self.vecs[i].iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }
}

/// Minimizes `sign * sum_i payoff.weighted(v_i)` with `v_i = sum_j mixer[i][j] sqrt_ens[j]`.
pub(crate) fn coordinate_search(
    payoff: &dyn Payoff,
    sign: f64,
    sqrt_ens: &[Vec<Complex64>],
    mixer: Vec<Vec<Complex64>>,
    opts: &SearchOptions,
) -> SearchOutcome {
    let d = sqrt_ens[0].len();
    let k = mixer.len();
    let vecs: Vec<Vec<Complex64>> = mixer
        .iter()
        .map(|row| {
            let mut v = vec![Complex64::new(0.0, 0.0); d];
            for (m, e) in row.iter().zip(sqrt_ens) {
                for (vi, ei) in v.iter_mut().zip(e) {
                    *vi += m * ei;
                }
            }
            v
        })
        .collect();
    let mut st = State {
        payoff,
        sign,
        mu: opts.mu,
        contrib: Vec::new(),
        vecs,
        mixer,
        buf_a: vec![Complex64::new(0.0, 0.0); d],
        buf_b: vec![Complex64::new(0.0, 0.0); d],
    };
    st.contrib = st.vecs.iter().map(|v| st.eval(v)).collect();

    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let mut steps = vec![INITIAL_STEP; 2 * pairs.len()];
    let mut stall = 0;
    let mut converged = pairs.is_empty();

    for _ in 0..opts.max_iters {
        if converged {
            break;
        }
        let mut improvement = 0.0;
        let mut max_step: f64 = 0.0;
        for (p, &(i, j)) in pairs.iter().enumerate() {
            if st.is_zero(i) && st.is_zero(j) {
                continue;
            }
            for (gi, g) in [Generator::Real, Generator::Imag].into_iter().enumerate() {
                let c = 2 * p + gi;
                let h = steps[c];
                let f0 = st.contrib[i] + st.contrib[j];
                let fp = st.trial(i, j, g, h);
                let fm = st.trial(i, j, g, -h);
                let (mut bt, mut bf) = (0.0, f0);
                if fp < bf {
                    (bt, bf) = (h, fp);
                }
                if fm < bf {
                    (bt, bf) = (-h, fm);
                }
                let curv = fp + fm - 2.0 * f0;
                if curv > 0.0 {
                    let t = (0.5 * h * (fm - fp) / curv).clamp(-4.0 * h, 4.0 * h);
                    if t != 0.0 && (t - bt).abs() > 1e-3 * h {
                        let ft = st.trial(i, j, g, t);
                        if ft < bf {
                            (bt, bf) = (t, ft);
                        }
                    }
                }
                if bt != 0.0 && bf < f0 {
                    st.commit(i, j, g, bt);
                    improvement += f0 - bf;
                    steps[c] = (1.5 * bt.abs()).min(MAX_STEP);
                } else {
                    steps[c] = 0.5 * h;
                }
                max_step = max_step.max(steps[c]);
            }
        }
        if max_step < opts.step_tol {
            converged = true;
        } else if improvement < opts.value_tol {
            stall += 1;
            converged = stall >= STALL_SWEEPS;
        } else {
            stall = 0;
        }
    }
    SearchOutcome {
        mixer: st.mixer,
        converged,
    }
}
