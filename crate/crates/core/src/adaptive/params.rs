use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted accuracy parameter.
pub const MAX_EPS: f64 = 0.3;

/// Ratio between the user accuracy `eps` and the per-threshold slack used in
/// the acceptance, filtering and stopping rules. With `slack = eps / 12` the
/// stopping value is `(1 − e^{−(1−eps)})·M`.
pub const SLACK_DIVISOR: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Sample counts large enough for the high-probability analysis.
    Theory,
    /// Smaller sample counts for desk-scale runs.
    Practical,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theory => "theory",
            Mode::Practical => "practical",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "practical" => Ok(Mode::Practical),
            other => Err(Error::Parameter(format!("unknown mode `{other}` (theory|practical)"))),
        }
    }
}

/// Every derived constant for one run at a fixed guess `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgoParams {
    pub eps: f64,
    pub slack: f64,
    pub k: usize,
    pub n: usize,
    /// The guess `M` for the optimal value.
    pub guess: f64,
    /// Random sets per gain step and per filter batch.
    pub samples: usize,
    /// Size of each random set.
    pub ell: usize,
    /// Filter batches per filter step.
    pub batches: usize,
    pub gain_threshold_factor: f64,
    pub batch_avg_factor: f64,
    pub elem_sum_factor: f64,
    pub filter_factor: f64,
    /// A phase ends once `f(S)` has grown by this much.
    pub phase_gain: f64,
    /// A run ends once `f(S)` reaches this value.
    pub stop_value: f64,
    pub mode: Mode,
}

/// `max(1, floor(eps² k / (100 ln n)))`.
pub fn sample_size(n: usize, k: usize, eps: f64) -> usize {
    let raw = eps * eps * k as f64 / (100.0 * (n as f64).ln());
    (raw.floor() as usize).max(1)
}

/// Random sets per round: `(samples, batches)`.
pub fn sample_counts(n: usize, eps: f64, mode: Mode) -> (usize, usize) {
    let ln_n = (n as f64).ln();
    match mode {
        Mode::Theory => (
            (9.0 * ln_n * ln_n / eps.powi(4)).ceil() as usize,
            (3.0 * ln_n / eps).ceil() as usize,
        ),
        Mode::Practical => (
            ((4.0 * ln_n / eps.powi(2)).ceil() as usize).max(20),
            ((2.0 * ln_n / eps).ceil() as usize).max(5),
        ),
    }
}

pub fn validate_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= MAX_EPS {
        Ok(())
    } else {
        Err(Error::Parameter(format!("eps = {eps} outside (0, {MAX_EPS}]")))
    }
}

pub fn derive_params(n: usize, k: usize, eps: f64, guess: f64, mode: Mode) -> Result<AlgoParams> {
    validate_eps(eps)?;
    if n < 2 {
        return Err(Error::Parameter(format!("ground set of size {n}; need n >= 2")));
    }
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} outside [1, {n}]")));
    }
    if !(guess.is_finite() && guess > 0.0) {
        return Err(Error::Parameter(format!("guess M = {guess} must be positive")));
    }
    let slack = eps / SLACK_DIVISOR;
    let (samples, batches) = sample_counts(n, eps, mode);
    Ok(AlgoParams {
        eps,
        slack,
        k,
        n,
        guess,
        samples,
        ell: sample_size(n, k, eps).min(k),
        batches,
        gain_threshold_factor: 1.0 - 10.0 * slack,
        batch_avg_factor: 1.0 - 8.0 * slack,
        elem_sum_factor: 1.0 - 8.0 * slack,
        filter_factor: 1.0 - 7.0 * slack,
        phase_gain: eps * guess / 100.0,
        stop_value: (1.0 - (-(1.0 - 12.0 * slack)).exp()) * guess,
        mode,
    })
}

impl AlgoParams {
    /// `ceil(64/eps) · (ceil(6 ln n / eps) + ceil(2 ln n / eps) + 2) · (1 + B) + 2`:
    /// phases times iterations per phase times rounds per iteration.
    pub fn round_budget(&self) -> u64 {
        let ln_n = (self.n as f64).ln();
        let phases = (64.0 / self.eps).ceil() as u64;
        let gains = (6.0 * ln_n / self.eps).ceil() as u64;
        let filters = (2.0 * ln_n / self.eps).ceil() as u64;
        phases * (gains + filters + 2) * (1 + self.batches as u64) + 2
    }

    /// Bound on the gap `M − f(S)` after `set_size` elements have been added
    /// by accepted gain steps.
    pub fn induction_bound(&self, set_size: usize) -> f64 {
        (-(1.0 - 11.0 * self.slack) * set_size as f64 / self.k as f64).exp() * self.guess
    }
}

/// `[M0·(1+eps)^i for i in 0..=G]` with `G = ceil(2 ln n / eps)`.
pub fn build_guess_ladder(m0: f64, eps: f64, n: usize) -> Vec<f64> {
    let steps = (2.0 * (n as f64).ln() / eps).ceil().max(0.0) as usize;
    (0..=steps).map(|i| m0 * (1.0 + eps).powi(i as i32)).collect()
}
