//! Headline outputs: LCOE, gasoline equivalence, bills, monthly savings,
//! crossover years and driving economics.

use serde::Serialize;

use crate::costs::CostTrajectory;
use crate::error::{Error, Result};
use crate::finance::{baseline_series, cashflow_series, npv};
use crate::scenario::Scenario;

/// Σ C_t/(1+r)^t ÷ Σ E_t/(1+r)^t over `t < service_yr`.
pub fn lcoe(costs: &[f64], energy: &[f64], real_discount: f64, service_yr: u32) -> Result<f64> {
    let n = service_yr as usize;
    if costs.len() != energy.len() || costs.len() < n {
        return Err(Error::domain(format!(
            "cost ({}) and energy ({}) series must have equal length >= service time {service_yr}",
            costs.len(),
            energy.len()
        )));
    }
    let discounted_energy = npv(&energy[..n], real_discount);
    if discounted_energy.is_nan() || discounted_energy <= 0.0 {
        return Err(Error::domain("discounted energy must be positive"));
    }
    Ok(npv(&costs[..n], real_discount) / discounted_energy)
}

/// Lifetime cost of owning the scenario's system per kWh of PV output.
pub fn scenario_lcoe(s: &Scenario, install_year: i32, costs: &CostTrajectory) -> Result<f64> {
    let series = cashflow_series(s, install_year, costs)?;
    lcoe(
        &series.system_cost_flows(),
        &series.generation_kwh(),
        s.finance.real_discount_rate(),
        s.finance.service_time_yr,
    )
}

/// LCOE of the scenario's PV array alone (no storage, charger or EV).
pub fn marginal_pv_lcoe(s: &Scenario, install_year: i32, costs: &CostTrajectory) -> Result<f64> {
    let mut pv_only = s.clone();
    pv_only.system.v2h = None;
    pv_only.system.battery_nameplate_kwh = 0.0;
    pv_only.system.storage_fraction = 0.0;
    pv_only.flags.annual_ev_miles = 0.0;
    scenario_lcoe(&pv_only, install_year, costs)
}

/// Electricity price expressed per gallon of gasoline displaced.
pub fn gas_equivalent(price_usd_per_kwh: f64, mpg: f64, ev_mi_per_kwh: f64) -> f64 {
    price_usd_per_kwh * mpg / ev_mi_per_kwh
}

pub fn monthly_grid_bill(annual_kwh: f64, price_usd_per_kwh: f64) -> f64 {
    annual_kwh * price_usd_per_kwh / 12.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SavingsPoint {
    pub install_year: i32,
    pub monthly_savings_usd: f64,
    pub scenario_label: String,
}

/// Levelized real monthly savings versus buying the home's pre-improvement
/// consumption from the grid. Positive means the customer saves.
pub fn monthly_savings(s: &Scenario, install_year: i32, costs: &CostTrajectory, label: &str) -> Result<SavingsPoint> {
    let rate = s.finance.real_discount_rate();
    let service = s.finance.service_time_yr;
    let with_system = cashflow_series(s, install_year, costs)?.levelized_monthly(rate, service)?;
    let baseline = baseline_series(s, install_year).levelized_monthly(rate, service)?;
    Ok(SavingsPoint {
        install_year,
        monthly_savings_usd: with_system - baseline,
        scenario_label: label.to_string(),
    })
}

/// First install year whose savings are non-negative.
pub fn crossover_year(points: &[SavingsPoint]) -> Result<Option<i32>> {
    if points.is_empty() {
        return Err(Error::domain("crossover year of an empty savings series"));
    }
    Ok(points
        .iter()
        .find(|p| p.monthly_savings_usd >= 0.0)
        .map(|p| p.install_year))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrivingSavings {
    pub gas_cost_yr: f64,
    pub ev_cost_yr: f64,
    pub savings_yr: f64,
    pub savings_month: f64,
}

pub fn driving_savings(
    annual_mi: f64,
    mpg: f64,
    gas_usd_per_gal: f64,
    ev_mi_per_kwh: f64,
    elec_usd_per_kwh: f64,
) -> DrivingSavings {
    let gas_cost_yr = annual_mi / mpg * gas_usd_per_gal;
    let ev_cost_yr = annual_mi / ev_mi_per_kwh * elec_usd_per_kwh;
    let savings_yr = gas_cost_yr - ev_cost_yr;
    DrivingSavings {
        gas_cost_yr,
        ev_cost_yr,
        savings_yr,
        savings_month: savings_yr / 12.0,
    }
}

/// Driving economics of the scenario's EV miles charged at the marginal PV LCOE
/// for the install year.
pub fn scenario_driving_savings(s: &Scenario, install_year: i32, costs: &CostTrajectory) -> Result<DrivingSavings> {
    let price = marginal_pv_lcoe(s, install_year, costs)?;
    Ok(driving_savings(
        s.flags.annual_ev_miles,
        s.tariff.gasoline_mpg,
        s.tariff.gasoline_price_usd_per_gal,
        s.ev_mi_per_kwh(),
        price,
    ))
}

/// Share of statewide fuel spending that leaves the state.
pub fn statewide_outflow(total_spend_usd: f64, import_share: f64) -> f64 {
    total_spend_usd * import_share
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolarDrivingRange {
    pub energy_kwh_yr: f64,
    pub miles_yr: f64,
}

/// Annual miles that extra PV capacity can power.
pub fn solar_driving_range(extra_pv_kw: f64, specific_yield: f64, ev_mi_per_kwh: f64) -> SolarDrivingRange {
    let energy_kwh_yr = extra_pv_kw * specific_yield;
    SolarDrivingRange {
        energy_kwh_yr,
        miles_yr: energy_kwh_yr * ev_mi_per_kwh,
    }
}
