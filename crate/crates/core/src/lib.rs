//! Techno-economic engine for net-zero-energy homes: rooftop PV, wall battery or
//! vehicle-to-home storage, and EV driving, evaluated as real-dollar cash flows
//! against buying electricity from the grid.
//!
//! All money is real 2020 USD unless a field says otherwise.

pub mod costs;
pub mod error;
pub mod finance;
pub mod metrics;
pub mod production;
pub mod scenario;
pub mod sizing;
pub mod sweep;

pub use costs::{load_cost_table, CostComponent, CostRow, CostTrajectory};
pub use error::{Error, Result, Violation};
pub use finance::{
    amortization_schedule, apply_itc, baseline_series, cashflow_series, levelize_monthly, npv, real_rate,
    AmortizationSchedule, CashflowSeries, CashflowYear,
};
pub use metrics::{
    crossover_year, driving_savings, gas_equivalent, lcoe, monthly_grid_bill, monthly_savings, scenario_lcoe,
    solar_driving_range, statewide_outflow, DrivingSavings, SavingsPoint,
};
pub use production::{battery_usable_kwh, ev_efficiency, pv_energy_year, replacement_years};
pub use scenario::{load_scenario, validate, Scenario, SystemSpec};
pub use sizing::{apply_efficiency_improvement, battery_for_fraction, netzero_pv_kw};
pub use sweep::{compute_sweep, explain_run, run_sweep, OutputFormat, SweepRequest, Variant};
