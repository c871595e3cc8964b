//! Piecewise-uniform time grids anchored at the waiting time.
//!
//! All solver and control grids are selections from one integer-indexed
//! family, so shared nodes compare bit-equal across refinements: a node is
//! `tau * (i/n_pre)` or `tau + (T-tau) * (j/n_act)`, and f64 division is
//! correctly rounded, so `j/n_act` and `(j*m)/(n_act*m)` round identically.

use crate::error::{Error, Result};

/// Time grid on [0, T]: `n_pre` uniform steps on [0, tau], `n_act` uniform
/// steps on [tau, T]. Contains 0, tau, and T exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tau: f64,
    t_final: f64,
    n_pre: usize,
    n_act: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, t_final: f64, n_pre: usize, n_act: usize) -> Result<Self> {
        if !(0.0 < tau && tau < t_final) {
            return Err(Error::Grid(format!(
                "need 0 < tau < T, got tau = {tau}, T = {t_final}"
            )));
        }
        if n_pre == 0 || n_act == 0 {
            return Err(Error::Grid("grid needs at least one step per window".into()));
        }
        Ok(TimeGrid { tau, t_final, n_pre, n_act })
    }

    /// Grid with step targets `dt_pre`, `dt_act`; the active count is rounded
    /// up to a multiple of `act_multiple` so checkpoint fractions land on
    /// nodes.
    pub fn with_steps(
        tau: f64,
        t_final: f64,
        dt_pre: f64,
        dt_act: f64,
        act_multiple: usize,
    ) -> Result<Self> {
        if dt_pre <= 0.0 || dt_act <= 0.0 {
            return Err(Error::Grid("time steps must be positive".into()));
        }
        let n_pre = (tau / dt_pre).ceil().max(1.0) as usize;
        let mult = act_multiple.max(1);
        let raw = ((t_final - tau) / dt_act).ceil().max(1.0) as usize;
        let n_act = raw.div_ceil(mult) * mult;
        TimeGrid::new(tau, t_final, n_pre, n_act)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_pre(&self) -> usize {
        self.n_pre
    }

    pub fn n_act(&self) -> usize {
        self.n_act
    }

    pub fn len(&self) -> usize {
        self.n_pre + self.n_act + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the node equal to tau.
    pub fn tau_index(&self) -> usize {
        self.n_pre
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.len());
        if i < self.n_pre {
            self.tau * (i as f64 / self.n_pre as f64)
        } else if i == self.n_pre {
            self.tau
        } else if i == self.n_pre + self.n_act {
            self.t_final
        } else {
            let j = i - self.n_pre;
            self.tau + (self.t_final - self.tau) * (j as f64 / self.n_act as f64)
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }

    /// Step of the active window.
    pub fn dt_act(&self) -> f64 {
        (self.t_final - self.tau) / self.n_act as f64
    }

    /// Same windows, every step split `m` times. Shared nodes are bit-equal.
    pub fn refined(&self, m: usize) -> TimeGrid {
        TimeGrid {
            tau: self.tau,
            t_final: self.t_final,
            n_pre: self.n_pre * m,
            n_act: self.n_act * m,
        }
    }

    /// Checkpoint times: tau plus `q` equal fractions of the active window.
    /// Requires `q` to divide `n_act` so every checkpoint is a grid node.
    pub fn checkpoints(&self, q: usize) -> Result<Vec<f64>> {
        if q == 0 || self.n_act % q != 0 {
            return Err(Error::Grid(format!(
                "{q} checkpoints do not divide the {} active steps",
                self.n_act
            )));
        }
        let stride = self.n_act / q;
        Ok((0..=q)
            .map(|i| self.node(self.n_pre + i * stride))
            .collect())
    }
}
