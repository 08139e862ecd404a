//! Monthly migration decisions.

use alloc::vec::Vec;

use rand::Rng;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dynamics::IntentionState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Urban,
    Rural,
}

impl Sector {
    pub fn other(self) -> Self {
        match self {
            Sector::Urban => Sector::Rural,
            Sector::Rural => Sector::Urban,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sector::Urban => "urban",
            Sector::Rural => "rural",
        }
    }
}

/// Per-worker sector and hukou status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerRoster {
    sector: Vec<Sector>,
    hukou: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RosterError {
    pub worker: usize,
}

impl core::fmt::Display for RosterError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "worker {} holds hukou but is not urban", self.worker)
    }
}

impl core::error::Error for RosterError {}

impl WorkerRoster {
    /// Fails if a hukou holder is not urban or the lengths differ.
    pub fn new(sector: Vec<Sector>, hukou: Vec<bool>) -> Result<Self, RosterError> {
        if sector.len() != hukou.len() {
            return Err(RosterError {
                worker: sector.len().min(hukou.len()),
            });
        }
        if let Some(worker) = sector
            .iter()
            .zip(&hukou)
            .position(|(s, &h)| h && *s != Sector::Urban)
        {
            return Err(RosterError { worker });
        }
        Ok(Self { sector, hukou })
    }

    pub fn without_hukou(sector: Vec<Sector>) -> Self {
        let hukou = alloc::vec![false; sector.len()];
        Self { sector, hukou }
    }

    pub fn len(&self) -> usize {
        self.sector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sector.is_empty()
    }

    pub fn sector(&self, i: usize) -> Sector {
        self.sector[i]
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sector
    }

    pub fn hukou(&self, i: usize) -> bool {
        self.hukou[i]
    }

    pub fn hukou_flags(&self) -> &[bool] {
        &self.hukou
    }

    /// Urban head-count `N_u`.
    pub fn urban_count(&self) -> usize {
        self.sector.iter().filter(|s| **s == Sector::Urban).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MigrationParams {
    /// Sensitivity; same units as intention. Smaller means more migration.
    pub beta: f64,
    pub review_period_days: f64,
}

impl Default for MigrationParams {
    fn default() -> Self {
        Self {
            beta: 3.0,
            review_period_days: 30.0,
        }
    }
}

/// Workers who moved during one review.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MigrationCounts {
    /// Rural to urban.
    pub inflow: usize,
    /// Urban to rural.
    pub outflow: usize,
}

/// `|x| / (|x| + beta)`: zero at `x = 0`, one half at `|x| = beta`, below one
/// for every finite `x`.
pub fn migration_probability(x: f64, beta: f64) -> f64 {
    let m = libm::fabs(x);
    m / (m + beta)
}

/// Whether an intention points away from the worker's current sector.
pub fn wants_to_leave(sector: Sector, x: f64) -> bool {
    match sector {
        Sector::Urban => x < 0.0,
        Sector::Rural => x > 0.0,
    }
}

/// One monthly review.
///
/// Workers are visited in ascending index order. Every candidate (intention
/// pointing at the other sector) consumes exactly one uniform draw, including
/// hukou holders, whose draw is discarded. Intentions are left untouched.
pub fn monthly_review<R: RngCore + ?Sized>(
    roster: &mut WorkerRoster,
    state: &IntentionState,
    params: &MigrationParams,
    rng: &mut R,
) -> MigrationCounts {
    assert_eq!(roster.len(), state.len(), "roster and state disagree on size");
    let mut counts = MigrationCounts::default();
    for (i, &x) in state.x.iter().enumerate() {
        let current = roster.sector[i];
        if !wants_to_leave(current, x) {
            continue;
        }
        let u: f64 = rng.gen();
        if roster.hukou[i] {
            continue;
        }
        if u < migration_probability(x, params.beta) {
            roster.sector[i] = current.other();
            match current {
                Sector::Rural => counts.inflow += 1,
                Sector::Urban => counts.outflow += 1,
            }
        }
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use alloc::vec;

    #[test]
    fn probability_examples() {
        assert_eq!(migration_probability(0.0, 2.0), 0.0);
        assert_eq!(migration_probability(2.0, 2.0), 0.5);
        assert_eq!(migration_probability(-2.0, 2.0), 0.5);
        assert_eq!(migration_probability(3.0, 1.0), 0.75);
        assert!(migration_probability(1e300, 1.0) <= 1.0);
        assert!(migration_probability(1e15, 1.0) < 1.0);
    }

    #[test]
    fn zero_intentions_never_move() {
        let mut roster = WorkerRoster::without_hukou(vec![Sector::Urban, Sector::Rural, Sector::Rural]);
        let before = roster.clone();
        let state = IntentionState::new(vec![0.0; 3]);
        let c = monthly_review(&mut roster, &state, &MigrationParams::default(), &mut seeded(1));
        assert_eq!(c, MigrationCounts::default());
        assert_eq!(roster, before);
    }

    #[test]
    fn hukou_holders_stay() {
        let n = 50;
        let mut roster = WorkerRoster::new(vec![Sector::Urban; n], vec![true; n]).unwrap();
        let state = IntentionState::new(vec![-1000.0; n]);
        let c = monthly_review(&mut roster, &state, &MigrationParams { beta: 1.0, review_period_days: 30.0 }, &mut seeded(9));
        assert_eq!(c.outflow, 0);
        assert_eq!(roster.urban_count(), n);
    }

    #[test]
    fn roster_rejects_rural_hukou() {
        assert_eq!(
            WorkerRoster::new(vec![Sector::Urban, Sector::Rural], vec![false, true]),
            Err(RosterError { worker: 1 })
        );
    }

    #[test]
    fn content_workers_consume_no_draws() {
        // Only the two candidates draw; the stream afterwards must match a
        // stream that produced exactly two values.
        let mut roster = WorkerRoster::without_hukou(vec![
            Sector::Urban,
            Sector::Rural,
            Sector::Urban,
            Sector::Rural,
        ]);
        let state = IntentionState::new(vec![1.0, -1.0, -0.5, 0.5]);
        let mut rng = seeded(42);
        monthly_review(&mut roster, &state, &MigrationParams::default(), &mut rng);
        let mut reference = seeded(42);
        let _: f64 = reference.gen();
        let _: f64 = reference.gen();
        assert_eq!(rng.gen::<u64>(), reference.gen::<u64>());
    }
}
