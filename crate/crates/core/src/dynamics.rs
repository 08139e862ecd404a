//! Intention dynamics: a forced linear multi-agent system on the social graph.
//!
//! Worker `i` evolves as
//!
//! ```text
//! dx_i/dt = a x_i + f * sum_j w_ij (x_j - x_i) + b v
//! ```
//!
//! i.e. `dx/dt = (a I - f L) x + b v 1`. The common input `b v` shifts every
//! worker equally, so it never affects the relative states `x_i - x_j`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigen::EigenError;
use crate::graph::{has_spanning_tree, laplacian, SocialGraph};
use crate::spectrum::spectrum;

/// Default bound on `|x_i|` beyond which a step reports divergence.
pub const DEFAULT_BLOWUP_BOUND: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsParams {
    /// Inertia, 1/day.
    pub a: f64,
    /// Social-influence gain, 1/day.
    pub f: f64,
    /// Gain applied to the wage differential, 1/day per wage unit.
    pub input_gain: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        Self {
            a: 0.0008,
            f: 0.001,
            input_gain: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentionState {
    pub x: Vec<f64>,
    /// Days.
    pub t: f64,
}

impl IntentionState {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, t: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusVerdict {
    pub has_spanning_tree: bool,
    pub lambda2_re: Option<f64>,
    pub consensus_predicted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("intention of worker {worker} reached {value} at t = {t} days")]
    Diverged { worker: usize, value: f64, t: f64 },
    #[error("time step must be positive, got {0}")]
    BadStep(f64),
}

/// Writes `dx/dt` into `out`. Neighbor sums run in ascending source order.
pub fn rhs_into(x: &[f64], g: &SocialGraph, params: &DynamicsParams, v: f64, out: &mut [f64]) {
    debug_assert_eq!(x.len(), g.order());
    debug_assert_eq!(out.len(), g.order());
    let forcing = params.input_gain * v;
    for (i, slot) in out.iter_mut().enumerate() {
        let xi = x[i];
        let social: f64 = g.in_arcs(i).map(|(j, w)| w * (x[j] - xi)).sum();
        *slot = params.a * xi + params.f * social + forcing;
    }
}

pub fn rhs(state: &IntentionState, g: &SocialGraph, params: &DynamicsParams, v: f64) -> Vec<f64> {
    let mut out = vec![0.0; state.len()];
    rhs_into(&state.x, g, params, v, &mut out);
    out
}

/// Classical fourth-order Runge-Kutta with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
    blowup_bound: f64,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Self::with_bound(n, DEFAULT_BLOWUP_BOUND)
    }

    pub fn with_bound(n: usize, blowup_bound: f64) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            stage: vec![0.0; n],
            blowup_bound,
        }
    }

    /// Advances `state` by `dt` with `v` held constant.
    ///
    /// On divergence the state has already been advanced; the error names the
    /// first worker whose intention left the bound.
    pub fn step(
        &mut self,
        state: &mut IntentionState,
        g: &SocialGraph,
        params: &DynamicsParams,
        v: f64,
        dt: f64,
    ) -> Result<(), DynamicsError> {
        if !(dt > 0.0) {
            return Err(DynamicsError::BadStep(dt));
        }
        let x = &mut state.x;
        let half = 0.5 * dt;

        rhs_into(x, g, params, v, &mut self.k1);
        for ((s, xi), k) in self.stage.iter_mut().zip(x.iter()).zip(&self.k1) {
            *s = xi + half * k;
        }
        rhs_into(&self.stage, g, params, v, &mut self.k2);
        for ((s, xi), k) in self.stage.iter_mut().zip(x.iter()).zip(&self.k2) {
            *s = xi + half * k;
        }
        rhs_into(&self.stage, g, params, v, &mut self.k3);
        for ((s, xi), k) in self.stage.iter_mut().zip(x.iter()).zip(&self.k3) {
            *s = xi + dt * k;
        }
        rhs_into(&self.stage, g, params, v, &mut self.k4);

        let sixth = dt / 6.0;
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += sixth * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
        state.t += dt;

        match x
            .iter()
            .position(|v| !(libm::fabs(*v) <= self.blowup_bound))
        {
            Some(worker) => Err(DynamicsError::Diverged {
                worker,
                value: x[worker],
                t: state.t,
            }),
            None => Ok(()),
        }
    }
}

/// One RK4 step returning the new state.
pub fn step(
    state: &IntentionState,
    g: &SocialGraph,
    params: &DynamicsParams,
    v: f64,
    dt: f64,
) -> Result<IntentionState, DynamicsError> {
    let mut next = state.clone();
    Rk4::new(state.len()).step(&mut next, g, params, v, dt)?;
    Ok(next)
}

/// Consensus iff the graph has a spanning tree and `a < f * Re(lambda_2)`.
///
/// The boundary `a == f * Re(lambda_2)` is marginally stable and reported as
/// no consensus. The common input does not enter.
pub fn predict_consensus(
    g: &SocialGraph,
    params: &DynamicsParams,
    zero_tol: f64,
) -> Result<ConsensusVerdict, EigenError> {
    let spanning = has_spanning_tree(g);
    let spec = spectrum(&laplacian(g), zero_tol)?;
    let consensus_predicted = spanning
        && spec
            .lambda2_re
            .is_some_and(|l2| params.a < params.f * l2);
    Ok(ConsensusVerdict {
        has_spanning_tree: spanning,
        lambda2_re: spec.lambda2_re,
        consensus_predicted,
    })
}

/// `max x - min x`; zero for an empty slice.
pub fn intention_spread(x: &[f64]) -> f64 {
    let mut it = x.iter().copied();
    let Some(first) = it.next() else {
        return 0.0;
    };
    let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}
