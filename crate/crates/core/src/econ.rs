//! Dual-sector economy: urban manufacturing firms and rural farms.
//!
//! Everything here is a pure function of [`EconParams`] and the urban
//! head-count `n_u`. The head-count is taken as a real number so wages can be
//! evaluated between integer populations.

use libm::pow;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EconError {
    #[error("economic parameter `{name}` = {value} violates {constraint}")]
    InvalidParam {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    /// A formula was evaluated where one sector is empty, or a power had a
    /// nonpositive base.
    #[error("{what} undefined at {value}")]
    Domain { what: &'static str, value: f64 },
}

/// Constants of the economic setting.
///
/// `econ_b` is the share parameter that enters the manufacturing constants as
/// `1 - eta / econ_b`; it is unrelated to the input gain of the intention
/// dynamics. `n_total` is the population of the whole society and is filled
/// from the worker count by the scenario engine, never read from config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconParams {
    pub alpha: f64,
    pub phi: f64,
    pub eta: f64,
    pub econ_b: f64,
    pub a_m: f64,
    pub a_a: f64,
    pub z_m: f64,
    pub z_a: f64,
    pub rho: f64,
    pub gamma: f64,
    #[serde(skip)]
    pub n_total: f64,
    pub r_u: f64,
}

impl Default for EconParams {
    /// Artifact defaults. With 100 workers the wage differential is positive
    /// at 20% urbanization and changes sign near 54 urban workers.
    fn default() -> Self {
        Self {
            alpha: 0.7,
            phi: 0.5,
            eta: 0.5,
            econ_b: 2.0,
            a_m: 0.5,
            a_a: 1.0,
            z_m: 5.0,
            z_a: 10.0,
            rho: 1.0,
            gamma: 0.5,
            n_total: 100.0,
            r_u: 0.1,
        }
    }
}

fn open_unit(name: &'static str, value: f64) -> Result<(), EconError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(EconError::InvalidParam {
            name,
            constraint: "0 < value < 1",
            value,
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), EconError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(EconError::InvalidParam {
            name,
            constraint: "value > 0",
            value,
        })
    }
}

impl EconParams {
    pub fn validate(&self) -> Result<(), EconError> {
        open_unit("alpha", self.alpha)?;
        open_unit("phi", self.phi)?;
        open_unit("eta", self.eta)?;
        positive("econ_b", self.econ_b)?;
        positive("A_m", self.a_m)?;
        positive("A_a", self.a_a)?;
        positive("Z_m", self.z_m)?;
        positive("Z_a", self.z_a)?;
        positive("rho", self.rho)?;
        positive("gamma", self.gamma)?;
        if !(self.r_u >= 0.0 && self.r_u < 1.0) {
            return Err(EconError::InvalidParam {
                name: "r_u",
                constraint: "0 <= value < 1",
                value: self.r_u,
            });
        }
        if !(self.n_total >= 2.0 && self.n_total.is_finite()) {
            return Err(EconError::InvalidParam {
                name: "N_total",
                constraint: "value >= 2",
                value: self.n_total,
            });
        }
        let share = 1.0 - self.eta / self.econ_b;
        if share <= 0.0 {
            return Err(EconError::InvalidParam {
                name: "econ_b",
                constraint: "1 - eta/econ_b > 0",
                value: self.econ_b,
            });
        }
        Ok(())
    }
}

/// The four composite constants of the production and wage formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconDerived {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub xi4: f64,
}

/// `base^exp`, refusing nonpositive bases instead of producing NaN.
fn checked_pow(what: &'static str, base: f64, exp: f64) -> Result<f64, EconError> {
    if base > 0.0 && base.is_finite() {
        Ok(pow(base, exp))
    } else {
        Err(EconError::Domain { what, value: base })
    }
}

pub fn derive_constants(params: &EconParams) -> Result<EconDerived, EconError> {
    params.validate()?;
    let EconParams {
        alpha,
        phi,
        eta,
        econ_b,
        a_m,
        a_a,
        z_m,
        z_a,
        ..
    } = *params;
    let odds = eta / (1.0 - eta);
    let share = 1.0 - eta / econ_b;

    let inner = checked_pow("eta odds", odds, eta)? * share;
    let xi1 = a_m * checked_pow("Z_m", z_m, 1.0 - alpha)? * checked_pow("xi1 bracket", inner, alpha)?;
    let xi2 = alpha
        * a_m
        * checked_pow("eta odds", odds, alpha * eta)?
        * checked_pow("xi2 bracket", share / z_m, alpha - 1.0)?;
    let xi3 = a_a * checked_pow("Z_a", z_a, 1.0 - phi)?;
    let xi4 = a_a * phi / checked_pow("Z_a", z_a, phi - 1.0)?;

    Ok(EconDerived { xi1, xi2, xi3, xi4 })
}

/// Average manufacturing wage `xi2 * n_u^(alpha - 1)`.
pub fn manufacturing_wage(
    derived: &EconDerived,
    params: &EconParams,
    n_u: f64,
) -> Result<f64, EconError> {
    if !(n_u > 0.0) {
        return Err(EconError::Domain {
            what: "manufacturing wage (empty urban sector)",
            value: n_u,
        });
    }
    Ok(derived.xi2 * checked_pow("urban population", n_u, params.alpha - 1.0)?)
}

fn rural_population(params: &EconParams, n_u: f64) -> Result<f64, EconError> {
    let rural = params.n_total - n_u;
    if rural > 0.0 {
        Ok(rural)
    } else {
        Err(EconError::Domain {
            what: "rural sector (empty)",
            value: n_u,
        })
    }
}

/// Average agricultural income `xi4 * p * (N - n_u)^(phi - 1)`.
pub fn agricultural_income(
    derived: &EconDerived,
    params: &EconParams,
    price: f64,
    n_u: f64,
) -> Result<f64, EconError> {
    let rural = rural_population(params, n_u)?;
    Ok(derived.xi4 * price * checked_pow("rural population", rural, params.phi - 1.0)?)
}

/// Aggregate manufacturing and agricultural output `(Y_m, Y_a)`.
pub fn productions(
    derived: &EconDerived,
    params: &EconParams,
    n_u: f64,
) -> Result<(f64, f64), EconError> {
    if !(n_u > 0.0) {
        return Err(EconError::Domain {
            what: "manufacturing output (empty urban sector)",
            value: n_u,
        });
    }
    let rural = rural_population(params, n_u)?;
    let y_m = derived.xi1 * checked_pow("urban population", n_u, params.alpha)?;
    let y_a = derived.xi3 * checked_pow("rural population", rural, params.phi)?;
    Ok((y_m, y_a))
}

/// Relative price of agricultural goods `rho * (Y_m / Y_a)^gamma`.
pub fn relative_price(
    derived: &EconDerived,
    params: &EconParams,
    n_u: f64,
) -> Result<f64, EconError> {
    let (y_m, y_a) = productions(derived, params, n_u)?;
    Ok(params.rho * checked_pow("output ratio", y_m / y_a, params.gamma)?)
}

/// Expected urban-rural wage differential `(1 - r_u) * w_m - w_a`.
///
/// Positive values pull workers toward the cities.
pub fn expected_wage_differential(
    derived: &EconDerived,
    params: &EconParams,
    n_u: f64,
) -> Result<f64, EconError> {
    let w_m = manufacturing_wage(derived, params, n_u)?;
    let price = relative_price(derived, params, n_u)?;
    let w_a = agricultural_income(derived, params, price, n_u)?;
    Ok((1.0 - params.r_u) * w_m - w_a)
}

/// Pairs validated parameters with their derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Economy {
    params: EconParams,
    derived: EconDerived,
}

impl Economy {
    pub fn new(params: EconParams) -> Result<Self, EconError> {
        let derived = derive_constants(&params)?;
        Ok(Self { params, derived })
    }

    pub fn params(&self) -> &EconParams {
        &self.params
    }

    pub fn derived(&self) -> &EconDerived {
        &self.derived
    }

    pub fn wage_differential(&self, n_u: f64) -> Result<f64, EconError> {
        expected_wage_differential(&self.derived, &self.params, n_u)
    }
}
