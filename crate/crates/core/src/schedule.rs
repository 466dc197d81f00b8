//! Variance-preserving diffusion schedule.
//!
//! Levels run from 0 (the image of interest) to `T` (pure noise). The
//! transition into level `t` attenuates by `k_t = sqrt(1 - beta_t)` and
//! adds variance `beta_t`, so unit-variance signals stay unit-variance.
//! `alpha_bar_t` is the cumulative squared attenuation, i.e. the signal
//! energy surviving at level `t`.

use crate::error::{Error, Result};

/// Per-step coefficients of the variance-preserving chain.
///
/// `beta`, `k` are indexed by the transition level `t` in `1..=T`;
/// `v_back` by the output level `t` in `0..T` (the transition out of
/// level `t+1` into `t`). Immutable after construction, safe to share
/// across chains.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: usize,
    beta: Vec<f64>,
    k: Vec<f64>,
    alpha_bar: Vec<f64>,
    v_back: Vec<f64>,
}

impl Schedule {
    /// Linear beta profile from `beta_min` (t=1) to `beta_max` (t=T).
    ///
    /// The backward variances use the usual posterior-variance formula
    /// `v_back_t = beta_{t+1} (1 - alpha_bar_t) / (1 - alpha_bar_{t+1})`
    /// for `t >= 1`; the formula degenerates at `t = 0`, where the exact
    /// value under a unit-variance Gaussian prior, `beta_1`, is used
    /// instead. Analytic denoisers override `v_back` with their exact
    /// conditional variance where they know it.
    pub fn linear_vp(steps: usize, beta_min: f64, beta_max: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Parameter("schedule needs at least one step".into()));
        }
        if !(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0) {
            return Err(Error::Parameter(format!(
                "beta range must satisfy 0 < beta_min <= beta_max < 1, got ({beta_min}, {beta_max})"
            )));
        }
        let beta: Vec<f64> = if steps == 1 {
            vec![beta_min]
        } else {
            (0..steps)
                .map(|i| beta_min + (beta_max - beta_min) * i as f64 / (steps - 1) as f64)
                .collect()
        };
        Ok(Self::from_beta(beta))
    }

    /// Builds the derived coefficient vectors from an explicit beta profile.
    pub(crate) fn from_beta(beta: Vec<f64>) -> Self {
        let steps = beta.len();
        let k: Vec<f64> = beta.iter().map(|b| (1.0 - b).sqrt()).collect();
        let mut alpha_bar = Vec::with_capacity(steps);
        let mut acc = 1.0;
        for kt in &k {
            acc *= kt * kt;
            alpha_bar.push(acc);
        }
        let mut v_back = Vec::with_capacity(steps);
        for t in 0..steps {
            if t == 0 {
                v_back.push(beta[0]);
            } else {
                v_back.push(beta[t] * (1.0 - alpha_bar[t - 1]) / (1.0 - alpha_bar[t]));
            }
        }
        Self { steps, beta, k, alpha_bar, v_back }
    }

    /// Raw-coefficient constructor for tests that need non-VP chains.
    #[cfg(test)]
    pub(crate) fn raw(beta: Vec<f64>, k: Vec<f64>, v_back: Vec<f64>) -> Self {
        let steps = beta.len();
        let mut alpha_bar = Vec::with_capacity(steps);
        let mut acc = 1.0;
        for kt in &k {
            acc *= kt * kt;
            alpha_bar.push(acc);
        }
        Self { steps, beta, k, alpha_bar, v_back }
    }

    /// Degenerate schedule with no latent levels; the chain is just `x0`.
    pub fn empty() -> Self {
        Self { steps: 0, beta: vec![], k: vec![], alpha_bar: vec![], v_back: vec![] }
    }

    /// Number of diffusion steps `T` (latent levels `1..=T`).
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Forward transition variance into level `t`, `t` in `1..=T`.
    pub fn beta(&self, t: usize) -> f64 {
        self.beta[t - 1]
    }

    /// Attenuation into level `t`, `t` in `1..=T`.
    pub fn k(&self, t: usize) -> f64 {
        self.k[t - 1]
    }

    /// Cumulative squared attenuation at level `t`, `t` in `0..=T`,
    /// with `alpha_bar(0) = 1`.
    pub fn alpha_bar(&self, t: usize) -> f64 {
        if t == 0 {
            1.0
        } else {
            self.alpha_bar[t - 1]
        }
    }

    /// Backward variance for the transition into level `t`, `t` in `0..T`.
    pub fn v_back(&self, t: usize) -> f64 {
        self.v_back[t]
    }

    /// Residual signal energy at the terminal level; small values mean
    /// the forward terminal marginal of a unit-variance prior is close
    /// to standard normal.
    pub fn terminal_gap(&self) -> f64 {
        self.alpha_bar(self.steps)
    }
}
