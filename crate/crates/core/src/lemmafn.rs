//! The auxiliary function family behind the `f_{q,s}` subadditivity lemma:
//! `h(x, y) = f(sqrt(x^2 + y^2)) - f(x) - f(y)`, its gradient factor `n`, the
//! boundary restriction `l` and its sign-equivalent numerator `m`, plus grid
//! scans over parameters and over the quarter disk `D`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EPS_LIMIT;
use crate::error::{Error, Result};
use crate::twoqubit::{f_qs_unchecked, lemma2_s_lower, theta, xi, FRange};

/// Slack allowed when checking membership of the quarter disk.
const DISK_TOL: f64 = 1e-12;

fn check_params(q: f64, s: f64) -> Result<()> {
    if !(q.is_finite() && s.is_finite()) || q <= 0.0 || s < 0.0 {
        return Err(Error::domain(q, s, "q > 0 and s >= 0"));
    }
    Ok(())
}

fn check_disk(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
        return Err(Error::OutOfRange(format!(
            "(x, y) = ({x}, {y}) has a negative coordinate"
        )));
    }
    let r2 = x * x + y * y;
    if r2 > 1.0 + DISK_TOL {
        return Err(Error::OutOfRange(format!(
            "(x, y) = ({x}, {y}) lies outside the unit disk"
        )));
    }
    Ok(r2.min(1.0).sqrt())
}

/// `h_{q,s}(x, y) = f(sqrt(x^2 + y^2)) - f(x) - f(y)` on `D = {x, y >= 0, x^2 + y^2 <= 1}`.
///
/// Evaluated for any `q > 0, s >= 0` so scans can leave the lemma's domain;
/// callers read the domain from [`FRange::valid_lemma2`].
pub fn h_qs(x: f64, y: f64, q: f64, s: f64) -> Result<f64> {
    check_params(q, s)?;
    let r = check_disk(x, y)?;
    Ok(f_qs_unchecked(r, q, s) - (f_qs_unchecked(x, q, s) + f_qs_unchecked(y, q, s)))
}

/// `Gamma = 1 / [(1 - q) s 2^{qs}]`.
pub fn gamma(q: f64, s: f64) -> f64 {
    1.0 / ((1.0 - q) * s * 2f64.powf(q * s))
}

fn n_unchecked(t: f64, q: f64, s: f64) -> f64 {
    let (th, x) = (theta(t), xi(t));
    let sum = th.powf(q) + x.powf(q);
    q * s / (1.0 - t * t).sqrt() * sum.powf(s - 1.0) * (th.powf(q - 1.0) - x.powf(q - 1.0))
}

/// `n_{q,s}(t) = qs / sqrt(1 - t^2) (Theta^q + Xi^q)^{s-1} (Theta^{q-1} - Xi^{q-1})` on `0 < t < 1`.
///
/// Inside the lemma's domain with `1 < q < 2` this is strictly decreasing in `t`
/// (constant at `q = 2, s = 1`), so `n(x0) = n(y0)` still forces `x0 = y0`.
pub fn n_qs(t: f64, q: f64, s: f64) -> Result<f64> {
    check_params(q, s)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::OutOfRange(format!("t = {t} not in (0, 1)")));
    }
    Ok(n_unchecked(t, q, s))
}

/// `f'(t) / t`. Away from the `q = 1` seam this is `-Gamma n(t)` written without
/// the `s` in both numerator and denominator, so it also covers `s = 0`; on the
/// seam it is the binary-entropy slope `ln(Theta / Xi) / (2 sqrt(1 - t^2))`.
fn slope_factor(t: f64, q: f64, s: f64) -> f64 {
    let (th, x) = (theta(t), xi(t));
    let root = (1.0 - t * t).sqrt();
    if (q - 1.0).abs() < EPS_LIMIT {
        return (th / x).ln() / (2.0 * root);
    }
    let sum = th.powf(q) + x.powf(q);
    -q * sum.powf(s - 1.0) * (th.powf(q - 1.0) - x.powf(q - 1.0))
        / ((1.0 - q) * 2f64.powf(q * s) * root)
}

/// Closed-form gradient of [`h_qs`] at an interior point of `D`:
/// `(Gamma x (n(x) - n(r)), Gamma y (n(y) - n(r)))` with `r = sqrt(x^2 + y^2)`.
pub fn grad_h(x: f64, y: f64, q: f64, s: f64) -> Result<(f64, f64)> {
    check_params(q, s)?;
    let r = check_disk(x, y)?;
    if !(x > 0.0 && y > 0.0 && r < 1.0) {
        return Err(Error::OutOfRange(format!(
            "(x, y) = ({x}, {y}) is not interior to D"
        )));
    }
    if (q - 1.0).abs() < EPS_LIMIT || s == 0.0 {
        let nr = slope_factor(r, q, s);
        return Ok((
            x * (nr - slope_factor(x, q, s)),
            y * (nr - slope_factor(y, q, s)),
        ));
    }
    let g = gamma(q, s);
    let nr = n_unchecked(r, q, s);
    Ok((
        g * x * (n_unchecked(x, q, s) - nr),
        g * y * (n_unchecked(y, q, s) - nr),
    ))
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(format!("x = {x} not in [0, 1]")));
    }
    Ok(())
}

fn m_unchecked(x: f64, q: f64, s: f64) -> f64 {
    let a = (theta(x).powf(q) + xi(x).powf(q)).powf(s);
    let b = ((1.0 + x).powf(q) + (1.0 - x).powf(q)).powf(s);
    a + b - 2f64.powf(s) - 2f64.powf(q * s)
}

/// `m_{q,s}(x) = (Theta^q + Xi^q)^s + ((1+x)^q + (1-x)^q)^s - 2^s - 2^{qs}`.
pub fn m_qs(x: f64, q: f64, s: f64) -> Result<f64> {
    check_params(q, s)?;
    check_unit(x)?;
    Ok(m_unchecked(x, q, s))
}

/// `l_{q,s}(x) = m_{q,s}(x) / [(q - 1) s 2^{qs}]`, the restriction of `h` to the arc
/// `x^2 + y^2 = 1`.
pub fn l_qs(x: f64, q: f64, s: f64) -> Result<f64> {
    check_params(q, s)?;
    check_unit(x)?;
    if q == 1.0 || s == 0.0 {
        return Err(Error::domain(
            q,
            s,
            "q != 1 and s != 0 (denominator (q - 1) s 2^{qs})",
        ));
    }
    Ok(m_unchecked(x, q, s) / ((q - 1.0) * s * 2f64.powf(q * s)))
}

/// Closed-form `dm/dx` on `0 < x < 1`.
pub fn dm_dx(x: f64, q: f64, s: f64) -> Result<f64> {
    check_params(q, s)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfRange(format!("x = {x} not in (0, 1)")));
    }
    Ok(dm_unchecked(x, q, s))
}

fn dm_unchecked(x: f64, q: f64, s: f64) -> f64 {
    let (p, m) = (1.0 + x, 1.0 - x);
    let outer = s * q * (p.powf(q) + m.powf(q)).powf(s - 1.0) * (p.powf(q - 1.0) - m.powf(q - 1.0));
    let (th, xv) = (theta(x), xi(x));
    let inner = s * q * x * (th.powf(q) + xv.powf(q)).powf(s - 1.0) / (1.0 - x * x).sqrt()
        * (th.powf(q - 1.0) - xv.powf(q - 1.0));
    outer - inner
}

// ---------------------------------------------------------------------------
// Grids

/// Which `(q, s)` nodes a grid visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainMode {
    /// Only the lemma's region: `q` clipped to `[1, 2]`, and for each `q` the `s`
    /// nodes span `[max(lo, -q^2 + 4q - 3), min(hi, 1)]`.
    Lemma2Region,
    /// Every node of the rectangular box.
    FullBox,
}

/// Inclusive range `[lo, hi]` sampled at `steps` equispaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let axis = Self { lo, hi, steps };
        axis.validate()?;
        Ok(axis)
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::InvalidGrid(format!(
                "need lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "need steps >= 2, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    /// Nodes `lo (1 - t) + hi t`, which hit both endpoints exactly.
    pub fn nodes(&self) -> Vec<f64> {
        interval_nodes(self.lo, self.hi, self.steps)
    }
}

fn interval_nodes(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if lo == hi {
        return vec![lo];
    }
    (0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            lo * (1.0 - t) + hi * t
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub q_range: Axis,
    pub s_range: Axis,
    /// Nodes per axis of the point grid on `D`.
    pub x_steps: usize,
    pub domain_mode: DomainMode,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.q_range.validate()?;
        self.s_range.validate()?;
        if self.x_steps < 2 {
            return Err(Error::InvalidGrid(format!(
                "need x_steps >= 2, got {}",
                self.x_steps
            )));
        }
        if self.domain_mode == DomainMode::Lemma2Region && self.parameter_nodes().is_empty() {
            return Err(Error::InvalidGrid(
                "box does not meet the lemma region".into(),
            ));
        }
        Ok(())
    }

    /// `(q, s)` nodes in row-major order (`q` outer).
    pub fn parameter_nodes(&self) -> Vec<(f64, f64)> {
        match self.domain_mode {
            DomainMode::FullBox => {
                let ss = self.s_range.nodes();
                self.q_range
                    .nodes()
                    .into_iter()
                    .flat_map(|q| ss.iter().map(move |&s| (q, s)))
                    .collect()
            }
            DomainMode::Lemma2Region => {
                let q_lo = self.q_range.lo.max(1.0);
                let q_hi = self.q_range.hi.min(2.0);
                if q_lo > q_hi {
                    return Vec::new();
                }
                interval_nodes(q_lo, q_hi, self.q_range.steps)
                    .into_iter()
                    .flat_map(|q| {
                        let lo = self.s_range.lo.max(lemma2_s_lower(q));
                        let hi = self.s_range.hi.min(1.0);
                        let nodes = if lo <= hi {
                            interval_nodes(lo, hi, self.s_range.steps)
                        } else {
                            Vec::new()
                        };
                        nodes.into_iter().map(move |s| (q, s))
                    })
                    .collect()
            }
        }
    }
}

/// One scanned `(q, s)` node. `x`, `y` locate the evaluated or extremal point
/// of `D` (NaN when not applicable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub q: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub in_domain: bool,
}

impl ScanCell {
    pub fn new(q: f64, s: f64, x: f64, y: f64, value: f64) -> Self {
        Self {
            q,
            s,
            x,
            y,
            value,
            in_domain: FRange::new(q, s).valid_lemma2(),
        }
    }
}

/// `m_{q,s}(1/sqrt 2)` at every parameter node; the point is recorded as
/// `(1/sqrt 2, 1/sqrt 2)` on the arc.
pub fn m_critical_surface(grid: &GridSpec) -> Result<Vec<ScanCell>> {
    grid.validate()?;
    let x = std::f64::consts::FRAC_1_SQRT_2;
    grid.parameter_nodes()
        .into_par_iter()
        .map(|(q, s)| {
            check_params(q, s)?;
            Ok(ScanCell::new(q, s, x, x, m_unchecked(x, q, s)))
        })
        .collect()
}

/// Maximum of `h` over a point grid of `D` and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HScan {
    pub max: f64,
    pub x: f64,
    pub y: f64,
}

/// Grid maximum of `h_{q,s}` over `{(i, j) / (x_steps - 1)} ∩ D`. Ties keep the
/// first cell in row-major order.
pub fn h_nonpositivity_scan(q: f64, s: f64, x_steps: usize) -> Result<HScan> {
    check_params(q, s)?;
    if x_steps < 2 {
        return Err(Error::InvalidGrid(format!(
            "need x_steps >= 2, got {x_steps}"
        )));
    }
    let nodes: Vec<f64> = (0..x_steps)
        .map(|i| i as f64 / (x_steps - 1) as f64)
        .collect();
    let f: Vec<f64> = nodes.iter().map(|&t| f_qs_unchecked(t, q, s)).collect();
    let mut best = HScan {
        max: f64::NEG_INFINITY,
        x: f64::NAN,
        y: f64::NAN,
    };
    for (i, &x) in nodes.iter().enumerate() {
        for (j, &y) in nodes.iter().enumerate() {
            let r2 = x * x + y * y;
            if r2 > 1.0 + DISK_TOL {
                break;
            }
            let value = f_qs_unchecked(r2.min(1.0).sqrt(), q, s) - (f[i] + f[j]);
            if value > best.max {
                best = HScan { max: value, x, y };
            }
        }
    }
    Ok(best)
}

/// [`h_nonpositivity_scan`] at every parameter node of `grid`.
pub fn h_region_scan(grid: &GridSpec) -> Result<Vec<ScanCell>> {
    grid.validate()?;
    grid.parameter_nodes()
        .into_par_iter()
        .map(|(q, s)| {
            let scan = h_nonpositivity_scan(q, s, grid.x_steps)?;
            Ok(ScanCell::new(q, s, scan.x, scan.y, scan.max))
        })
        .collect()
}

/// Sign changes of `dm/dx` located on a grid of `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalCheck {
    /// True iff exactly one sign change was found.
    pub unique: bool,
    /// Linear-interpolation estimates of each crossing.
    pub critical_points: Vec<f64>,
}

/// Derivative values at or below this magnitude carry no sign.
const DERIVATIVE_ZERO: f64 = 1e-13;

/// Scans `dm/dx` at `x_steps` interior nodes of `(0, 1)`. For `q = 1` the
/// derivative vanishes identically, so no crossing is reported.
pub fn m_unique_critical_check(q: f64, s: f64, x_steps: usize) -> Result<CriticalCheck> {
    check_params(q, s)?;
    if x_steps < 2 {
        return Err(Error::InvalidGrid(format!(
            "need x_steps >= 2, got {x_steps}"
        )));
    }
    let samples: Vec<(f64, f64)> = (1..=x_steps)
        .map(|i| {
            let x = i as f64 / (x_steps + 1) as f64;
            (x, dm_unchecked(x, q, s))
        })
        .filter(|(_, d)| d.abs() > DERIVATIVE_ZERO)
        .collect();
    let critical_points: Vec<f64> = samples
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let ((x0, d0), (x1, d1)) = (w[0], w[1]);
            x0 + (x1 - x0) * d0 / (d0 - d1)
        })
        .collect();
    Ok(CriticalCheck {
        unique: critical_points.len() == 1,
        critical_points,
    })
}
