//! Scenario engine: initialization, the monthly loop and summary metrics.
//!
//! One seeded stream drives everything random in a run, in this order:
//! graph weights, then (only for [`InitialIntention::Uniform`]) initial
//! intention magnitudes, then the migration draws of each review.
//!
//! Within a month the wage differential is frozen at its value for the
//! current urban head-count and intentions are integrated with RK4. The month
//! ends with a review, after which the differential is re-evaluated.

use alloc::string::String;
use alloc::vec::Vec;

use rand::distributions::{Distribution, Open01};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    intention_spread, predict_consensus, ConsensusVerdict, DynamicsError, DynamicsParams,
    IntentionState, Rk4, DEFAULT_BLOWUP_BOUND,
};
use crate::econ::{EconError, EconParams, Economy};
use crate::eigen::EigenError;
use crate::graph::{random_graph, GraphError, SocialGraph};
use crate::migration::{monthly_review, MigrationCounts, MigrationParams, Sector, WorkerRoster};
use crate::rng::{seeded, SimRng};
use crate::spectrum::DEFAULT_ZERO_TOL;

pub const SCHEMA_VERSION: u32 = 1;

/// Trailing fraction of the series used for the oscillation amplitude.
pub const DEFAULT_AMPLITUDE_WINDOW: f64 = 0.25;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialIntention {
    /// `+x0_magnitude` for urban workers, `-x0_magnitude` for rural ones.
    #[default]
    Aligned,
    /// Sign as for `Aligned`, magnitude uniform on `(0, x0_magnitude)`.
    Uniform,
}

/// Full specification of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "defaults::schema_version")]
    pub schema_version: u32,
    pub n_workers: usize,
    pub seed: u64,
    pub horizon_months: usize,
    #[serde(default = "defaults::sparse_factor")]
    pub sparse_factor: f64,
    #[serde(default = "defaults::weight_upper")]
    pub weight_upper: f64,
    #[serde(default = "defaults::initial_urban_fraction")]
    pub initial_urban_fraction: f64,
    #[serde(default)]
    pub hukou_initial_urban: bool,
    #[serde(default = "defaults::x0_magnitude")]
    pub x0_magnitude: f64,
    #[serde(default)]
    pub initial_intention: InitialIntention,
    #[serde(default = "defaults::dt_days")]
    pub dt_days: f64,
    #[serde(default = "defaults::zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "defaults::blowup_bound")]
    pub blowup_bound: f64,
    #[serde(default = "defaults::clamp_on_blowup")]
    pub clamp_on_blowup: bool,
    #[serde(default)]
    pub econ: EconParams,
    #[serde(default)]
    pub dynamics: DynamicsParams,
    #[serde(default)]
    pub migration: MigrationParams,
}

mod defaults {
    pub fn schema_version() -> u32 {
        super::SCHEMA_VERSION
    }
    pub fn sparse_factor() -> f64 {
        0.09
    }
    pub fn weight_upper() -> f64 {
        0.1
    }
    pub fn initial_urban_fraction() -> f64 {
        0.2
    }
    pub fn x0_magnitude() -> f64 {
        1.0
    }
    pub fn dt_days() -> f64 {
        0.25
    }
    pub fn zero_tol() -> f64 {
        super::DEFAULT_ZERO_TOL
    }
    pub fn blowup_bound() -> f64 {
        super::DEFAULT_BLOWUP_BOUND
    }
    pub fn clamp_on_blowup() -> bool {
        true
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n_workers: 100,
            seed: 0,
            horizon_months: 120,
            sparse_factor: defaults::sparse_factor(),
            weight_upper: defaults::weight_upper(),
            initial_urban_fraction: defaults::initial_urban_fraction(),
            hukou_initial_urban: false,
            x0_magnitude: defaults::x0_magnitude(),
            initial_intention: InitialIntention::Aligned,
            dt_days: defaults::dt_days(),
            zero_tol: defaults::zero_tol(),
            blowup_bound: defaults::blowup_bound(),
            clamp_on_blowup: defaults::clamp_on_blowup(),
            econ: EconParams::default(),
            dynamics: DynamicsParams::default(),
            migration: MigrationParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("`{field}` = {value} violates {constraint}")]
    Field {
        field: &'static str,
        constraint: &'static str,
        value: String,
    },
    #[error(transparent)]
    Econ(#[from] EconError),
}

fn field_err(field: &'static str, constraint: &'static str, value: impl core::fmt::Display) -> ConfigError {
    ConfigError::Field {
        field,
        constraint,
        value: alloc::format!("{value}"),
    }
}

fn check(ok: bool, field: &'static str, constraint: &'static str, value: impl core::fmt::Display) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(field_err(field, constraint, value))
    }
}

impl ScenarioConfig {
    /// Economic parameters with `n_total` set to the worker count.
    pub fn econ_params(&self) -> EconParams {
        EconParams {
            n_total: self.n_workers as f64,
            ..self.econ
        }
    }

    pub fn initial_urban_count(&self) -> usize {
        libm::floor(self.initial_urban_fraction * self.n_workers as f64) as usize
    }

    /// RK4 steps per review period.
    pub fn steps_per_month(&self) -> usize {
        libm::round(self.migration.review_period_days / self.dt_days) as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        check(
            self.schema_version == SCHEMA_VERSION,
            "schema_version",
            "value == 1",
            self.schema_version,
        )?;
        check(self.n_workers >= 2, "n_workers", "value >= 2", self.n_workers)?;
        check(
            self.weight_upper > 0.0 && self.weight_upper.is_finite(),
            "weight_upper",
            "value > 0",
            self.weight_upper,
        )?;
        check(
            self.sparse_factor >= 0.0 && self.sparse_factor < self.weight_upper,
            "sparse_factor",
            "0 <= value < weight_upper",
            self.sparse_factor,
        )?;
        check(
            self.initial_urban_fraction > 0.0 && self.initial_urban_fraction < 1.0,
            "initial_urban_fraction",
            "0 < value < 1",
            self.initial_urban_fraction,
        )?;
        let n_u0 = self.initial_urban_count();
        check(
            n_u0 >= 1 && n_u0 < self.n_workers,
            "initial_urban_fraction",
            "both sectors nonempty at start",
            self.initial_urban_fraction,
        )?;
        check(
            self.x0_magnitude >= 0.0 && self.x0_magnitude.is_finite(),
            "x0_magnitude",
            "value >= 0",
            self.x0_magnitude,
        )?;
        check(
            self.dt_days > 0.0 && self.dt_days.is_finite(),
            "dt_days",
            "value > 0",
            self.dt_days,
        )?;
        check(self.zero_tol > 0.0, "zero_tol", "value > 0", self.zero_tol)?;
        check(self.blowup_bound > 0.0, "blowup_bound", "value > 0", self.blowup_bound)?;
        check(self.dynamics.a.is_finite(), "dynamics.a", "finite", self.dynamics.a)?;
        check(
            self.dynamics.f >= 0.0 && self.dynamics.f.is_finite(),
            "dynamics.f",
            "value >= 0",
            self.dynamics.f,
        )?;
        check(
            self.dynamics.input_gain >= 0.0 && self.dynamics.input_gain.is_finite(),
            "dynamics.input_gain",
            "value >= 0",
            self.dynamics.input_gain,
        )?;
        check(
            self.migration.beta > 0.0 && self.migration.beta.is_finite(),
            "migration.beta",
            "value > 0",
            self.migration.beta,
        )?;
        check(
            self.migration.review_period_days > 0.0 && self.migration.review_period_days.is_finite(),
            "migration.review_period_days",
            "value > 0",
            self.migration.review_period_days,
        )?;
        let ratio = self.migration.review_period_days / self.dt_days;
        check(
            ratio >= 1.0 && libm::fabs(ratio - libm::round(ratio)) <= 1e-9 * ratio,
            "dt_days",
            "divides migration.review_period_days evenly",
            self.dt_days,
        )?;
        self.econ_params().validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("spectral analysis failed: {0}")]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Econ(#[from] EconError),
}

/// Row-major lattice placement used only for plotting: `side = ceil(sqrt(n))`.
pub fn lattice_position(index: usize, n: usize) -> (usize, usize) {
    let side = libm::ceil(libm::sqrt(n as f64)).max(1.0) as usize;
    (index / side, index % side)
}

/// Builds graph, roster and initial intentions, drawing from `rng`.
pub fn initialize_with<R: RngCore + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<(SocialGraph, WorkerRoster, IntentionState), SimError> {
    config.validate()?;
    let n = config.n_workers;
    let graph = random_graph(n, config.weight_upper, config.sparse_factor, rng)?;
    let n_u0 = config.initial_urban_count();
    let sector: Vec<Sector> = (0..n)
        .map(|i| if i < n_u0 { Sector::Urban } else { Sector::Rural })
        .collect();
    let hukou: Vec<bool> = (0..n).map(|i| config.hukou_initial_urban && i < n_u0).collect();
    let x: Vec<f64> = sector
        .iter()
        .map(|s| {
            let magnitude = match config.initial_intention {
                InitialIntention::Aligned => config.x0_magnitude,
                InitialIntention::Uniform => {
                    let u: f64 = Open01.sample(rng);
                    u * config.x0_magnitude
                }
            };
            match s {
                Sector::Urban => magnitude,
                Sector::Rural => -magnitude,
            }
        })
        .collect();
    let roster = WorkerRoster::new(sector, hukou).expect("hukou only assigned to urban workers");
    Ok((graph, roster, IntentionState::new(x)))
}

/// [`initialize_with`] on a fresh stream seeded from the config.
pub fn initialize(config: &ScenarioConfig) -> Result<(SocialGraph, WorkerRoster, IntentionState), SimError> {
    initialize_with(config, &mut seeded(config.seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthRecord {
    pub month: usize,
    pub t_days: f64,
    pub n_u: usize,
    /// Wage differential at this row's `n_u`; absent once a sector is empty.
    pub v: Option<f64>,
    pub bv: Option<f64>,
    pub spread: f64,
    pub inflow: usize,
    pub outflow: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// A review emptied one sector; the wage differential is undefined there.
    SectorCollapse { month: usize, empty: Sector },
    /// Intentions left the blow-up bound with clamping disabled.
    Diverged { month: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub overshoot_ratio: Option<f64>,
    pub oscillation_amplitude: f64,
    pub amplitude_window: f64,
    pub initial_urban: usize,
    pub final_urban: usize,
    pub net_shift: i64,
    pub total_inflow: usize,
    pub total_outflow: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub series: Vec<MonthRecord>,
    pub verdict: ConsensusVerdict,
    pub diverged: bool,
    pub status: RunStatus,
    pub summary: Summary,
    pub initial_roster: WorkerRoster,
    pub final_roster: WorkerRoster,
    pub final_state: IntentionState,
}

impl SimResult {
    pub fn urban_series(&self) -> Vec<usize> {
        self.series.iter().map(|r| r.n_u).collect()
    }
}

/// Everything a run needs besides the config, for callers that supply their
/// own graph (for instance one loaded from disk).
pub struct Prepared {
    pub graph: SocialGraph,
    pub roster: WorkerRoster,
    pub state: IntentionState,
    pub rng: SimRng,
}

impl Prepared {
    pub fn from_config(config: &ScenarioConfig) -> Result<Self, SimError> {
        let mut rng = seeded(config.seed);
        let (graph, roster, state) = initialize_with(config, &mut rng)?;
        Ok(Self {
            graph,
            roster,
            state,
            rng,
        })
    }
}

pub fn run(config: &ScenarioConfig) -> Result<SimResult, SimError> {
    run_prepared(config, Prepared::from_config(config)?)
}

/// Runs the month loop from a prepared initial condition.
pub fn run_prepared(config: &ScenarioConfig, prepared: Prepared) -> Result<SimResult, SimError> {
    config.validate()?;
    let Prepared {
        graph,
        mut roster,
        mut state,
        mut rng,
    } = prepared;
    let n = config.n_workers;
    if graph.order() != n || roster.len() != n || state.len() != n {
        return Err(field_err("n_workers", "matches graph, roster and state", n).into());
    }

    let verdict = predict_consensus(&graph, &config.dynamics, config.zero_tol)?;
    let economy = Economy::new(config.econ_params())?;
    let initial_roster = roster.clone();
    let period = config.migration.review_period_days;
    let steps = config.steps_per_month();
    let gain = config.dynamics.input_gain;

    let differential = |n_u: usize| -> Result<Option<f64>, EconError> {
        if n_u == 0 || n_u == n {
            Ok(None)
        } else {
            economy.wage_differential(n_u as f64).map(Some)
        }
    };

    let n_u0 = roster.urban_count();
    let mut v = differential(n_u0)?;
    let mut series = Vec::with_capacity(config.horizon_months + 1);
    series.push(MonthRecord {
        month: 0,
        t_days: 0.0,
        n_u: n_u0,
        v,
        bv: v.map(|v| gain * v),
        spread: intention_spread(&state.x),
        inflow: 0,
        outflow: 0,
    });

    let mut rk = Rk4::with_bound(n, config.blowup_bound);
    let mut diverged = false;
    let mut status = RunStatus::Completed;

    'months: for month in 1..=config.horizon_months {
        let Some(v_now) = v else { break };
        for _ in 0..steps {
            match rk.step(&mut state, &graph, &config.dynamics, v_now, config.dt_days) {
                Ok(()) => {}
                Err(DynamicsError::Diverged { .. }) => {
                    diverged = true;
                    if config.clamp_on_blowup {
                        let b = config.blowup_bound;
                        for x in &mut state.x {
                            // NaN cannot arise from clamped finite inputs, but map it to 0 if it does.
                            *x = if x.is_nan() { 0.0 } else { x.clamp(-b, b) };
                        }
                    } else {
                        status = RunStatus::Diverged { month };
                        series.push(MonthRecord {
                            month,
                            t_days: state.t,
                            n_u: roster.urban_count(),
                            v,
                            bv: v.map(|v| gain * v),
                            spread: intention_spread(&state.x),
                            inflow: 0,
                            outflow: 0,
                        });
                        break 'months;
                    }
                }
                Err(e @ DynamicsError::BadStep(_)) => unreachable!("validated dt: {e}"),
            }
        }
        // Pin the clock to the calendar so float drift never accumulates.
        state.t = month as f64 * period;

        let MigrationCounts { inflow, outflow } =
            monthly_review(&mut roster, &state, &config.migration, &mut rng);
        let n_u = roster.urban_count();
        v = differential(n_u)?;
        series.push(MonthRecord {
            month,
            t_days: state.t,
            n_u,
            v,
            bv: v.map(|v| gain * v),
            spread: intention_spread(&state.x),
            inflow,
            outflow,
        });
        if v.is_none() {
            let empty = if n_u == 0 { Sector::Urban } else { Sector::Rural };
            status = RunStatus::SectorCollapse { month, empty };
        }
    }

    let urban: Vec<usize> = series.iter().map(|r| r.n_u).collect();
    let final_urban = *urban.last().expect("series starts with the initial sample");
    let summary = Summary {
        overshoot_ratio: (!diverged).then(|| overshoot_ratio(&urban)),
        oscillation_amplitude: oscillation_amplitude(&urban, DEFAULT_AMPLITUDE_WINDOW),
        amplitude_window: DEFAULT_AMPLITUDE_WINDOW,
        initial_urban: n_u0,
        final_urban,
        net_shift: final_urban as i64 - n_u0 as i64,
        total_inflow: series.iter().map(|r| r.inflow).sum(),
        total_outflow: series.iter().map(|r| r.outflow).sum(),
    };

    Ok(SimResult {
        series,
        verdict,
        diverged,
        status,
        summary,
        initial_roster,
        final_roster: roster,
        final_state: state,
    })
}

/// Transient excursion beyond the final level, relative to the net shift.
///
/// For a rising trajectory this is `(max N_u - N_final) / max(1, |N_final - N_0|)`
/// with the maximum taken from the first time the trajectory reaches the
/// final level; falling trajectories are handled symmetrically. Zero if the
/// trajectory never passes its final value.
pub fn overshoot_ratio(urban: &[usize]) -> f64 {
    let (Some(&first), Some(&last)) = (urban.first(), urban.last()) else {
        return 0.0;
    };
    let (first, last) = (first as f64, last as f64);
    let rising = last >= first;
    let beyond = |v: f64| if rising { v - last } else { last - v };
    let excursion = urban
        .iter()
        .map(|&v| v as f64)
        .skip_while(|&v| beyond(v) < 0.0)
        .map(beyond)
        .fold(0.0, f64::max);
    excursion / libm::fabs(last - first).max(1.0)
}

/// `max - min` of the trailing `window_fraction` of the series, at least one
/// sample.
///
/// # Panics
///
/// If `window_fraction` is not in `(0, 1]`.
pub fn oscillation_amplitude(urban: &[usize], window_fraction: f64) -> f64 {
    assert!(
        window_fraction > 0.0 && window_fraction <= 1.0,
        "window fraction must lie in (0, 1]"
    );
    if urban.is_empty() {
        return 0.0;
    }
    let k = (libm::ceil(urban.len() as f64 * window_fraction) as usize).clamp(1, urban.len());
    let tail = &urban[urban.len() - k..];
    let hi = tail.iter().max().copied().unwrap_or(0);
    let lo = tail.iter().min().copied().unwrap_or(0);
    (hi - lo) as f64
}
