//! Cash-flow engine: capital with down payment and loan, ITC, interest tax
//! shield, replacements, O&M, energy bills, discounting and levelization.
//!
//! Index convention: offset `t` is operating year `t + 1`. Upfront capital and
//! all flows of the first operating year sit at `t = 0` and are undiscounted;
//! flows at `t` are discounted by `(1 + r)^t`. Loan payments fall at
//! `t = 0..loan_term`. Nominal loan amounts are deflated to real 2020 dollars
//! with the same index.

use crate::costs::{CostComponent, CostTrajectory};
use crate::error::{Error, Result};
use crate::production::{age_at, battery_usable_kwh, pv_energy_year, replacement_years};
use crate::scenario::{defaults, Scenario};

/// Fisher identity.
pub fn real_rate(nominal: f64, inflation: f64) -> f64 {
    (1.0 + nominal) / (1.0 + inflation) - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmortizationRow {
    /// 1-based payment number.
    pub period: u32,
    pub payment: f64,
    pub interest: f64,
    pub principal: f64,
    pub remaining_balance: f64,
}

/// Level-payment schedule in nominal dollars.
#[derive(Debug, Clone, PartialEq)]
pub struct AmortizationSchedule {
    pub rows: Vec<AmortizationRow>,
}

impl AmortizationSchedule {
    pub fn payment(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.payment)
    }

    pub fn total_interest(&self) -> f64 {
        self.rows.iter().map(|r| r.interest).sum()
    }
}

/// Level annual payment `P = B r / (1 - (1 + r)^-n)`; `B / n` at zero rate.
pub fn amortization_schedule(principal: f64, annual_rate: f64, term_yr: u32) -> Result<AmortizationSchedule> {
    if !annual_rate.is_finite() || annual_rate <= -1.0 {
        return Err(Error::domain(format!(
            "loan rate must be finite and > -100%, got {annual_rate}"
        )));
    }
    if !principal.is_finite() || principal < 0.0 {
        return Err(Error::domain(format!(
            "loan principal must be finite and >= 0, got {principal}"
        )));
    }
    if term_yr == 0 {
        return Err(Error::domain("loan term must be at least 1 year"));
    }
    let n = term_yr as i32;
    let payment = if annual_rate == 0.0 {
        principal / f64::from(term_yr)
    } else {
        principal * annual_rate / (1.0 - (1.0 + annual_rate).powi(-n))
    };
    let mut balance = principal;
    let rows = (1..=term_yr)
        .map(|period| {
            let interest = balance * annual_rate;
            let principal_portion = payment - interest;
            balance -= principal_portion;
            AmortizationRow {
                period,
                payment,
                interest,
                principal: principal_portion,
                remaining_balance: balance,
            }
        })
        .collect();
    Ok(AmortizationSchedule { rows })
}

pub fn apply_itc(capex: f64, itc_rate: f64, enabled: bool) -> f64 {
    if enabled {
        capex * (1.0 - itc_rate)
    } else {
        capex
    }
}

/// Σ flows_t / (1 + r)^t.
pub fn npv(flows: &[f64], rate: f64) -> f64 {
    flows
        .iter()
        .enumerate()
        .map(|(t, f)| f / (1.0 + rate).powi(t as i32))
        .sum()
}

/// Present value of 1 per year at `t = 0..n`.
pub fn annuity_factor(rate: f64, n: u32) -> f64 {
    (0..n).map(|t| (1.0 + rate).powi(-(t as i32))).sum()
}

/// NPV over the first `service_yr` offsets spread as a level real monthly amount
/// over the same offsets. A constant annual flow `A` levelizes to `A / 12`.
pub fn levelize_monthly(flows: &[f64], rate: f64, service_yr: u32) -> Result<f64> {
    let n = service_yr as usize;
    if n == 0 || n > flows.len() {
        return Err(Error::domain(format!(
            "service time {service_yr} yr must be within 1..={} yr of the series",
            flows.len()
        )));
    }
    Ok(npv(&flows[..n], rate) / annuity_factor(rate, service_yr) / 12.0)
}

/// One year of real-dollar flows. Every money field is a non-negative magnitude;
/// `interest_tax_shield`, `export_credit` and `gasoline_offset` are credits.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CashflowYear {
    pub year_offset: u32,
    pub calendar_year: i32,
    pub capital_out: f64,
    pub loan_payment: f64,
    pub interest_tax_shield: f64,
    pub replacement_out: f64,
    pub om_out: f64,
    pub grid_purchase: f64,
    pub export_credit: f64,
    pub gasoline_offset: f64,
    pub pv_generation_kwh: f64,
    pub grid_import_kwh: f64,
    pub export_kwh: f64,
    /// Usable wall-battery energy this year (zero without a wall battery).
    pub battery_usable_kwh: f64,
}

impl CashflowYear {
    pub fn costs(&self) -> f64 {
        self.capital_out + self.loan_payment + self.replacement_out + self.om_out + self.grid_purchase
    }

    pub fn credits(&self) -> f64 {
        self.interest_tax_shield + self.export_credit + self.gasoline_offset
    }

    /// Credits minus costs.
    pub fn net(&self) -> f64 {
        self.credits() - self.costs()
    }

    /// Cost of owning the system, excluding energy bills and fuel.
    pub fn system_cost(&self) -> f64 {
        self.capital_out + self.loan_payment + self.replacement_out + self.om_out - self.interest_tax_shield
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CapitalBreakdown {
    pub pv_usd: f64,
    pub wall_battery_usd: f64,
    pub charger_usd: f64,
    pub gross_usd: f64,
    pub itc_usd: f64,
    pub net_usd: f64,
    pub down_payment_usd: f64,
    pub loan_principal_usd: f64,
    /// Level nominal loan payment.
    pub loan_payment_usd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplacementKind {
    Battery,
    Inverter,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replacement {
    pub year_offset: u32,
    pub kind: ReplacementKind,
    pub cost_usd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CashflowSeries {
    pub install_year: i32,
    pub years: Vec<CashflowYear>,
    pub capital: CapitalBreakdown,
    pub replacements: Vec<Replacement>,
    pub warnings: Vec<String>,
}

impl CashflowSeries {
    pub fn net_flows(&self) -> Vec<f64> {
        self.years.iter().map(CashflowYear::net).collect()
    }

    pub fn system_cost_flows(&self) -> Vec<f64> {
        self.years.iter().map(CashflowYear::system_cost).collect()
    }

    pub fn generation_kwh(&self) -> Vec<f64> {
        self.years.iter().map(|y| y.pv_generation_kwh).collect()
    }

    /// Net flows re-inflated to current dollars.
    pub fn nominal_net_flows(&self, inflation: f64) -> Vec<f64> {
        self.years
            .iter()
            .map(|y| y.net() * (1.0 + inflation).powi(y.year_offset as i32))
            .collect()
    }

    pub fn npv(&self, real_discount: f64) -> f64 {
        npv(&self.net_flows(), real_discount)
    }

    pub fn levelized_monthly(&self, real_discount: f64, service_yr: u32) -> Result<f64> {
        levelize_monthly(&self.net_flows(), real_discount, service_yr)
    }
}

/// Retail price multiplier for calendar `year` under real escalation.
fn escalation(s: &Scenario, year: i32) -> f64 {
    (1.0 + s.finance.real_elec_escalation).powi(year - defaults::PRICE_BASE_YEAR)
}

/// Builds the real-dollar cash-flow series of `s` installed in `install_year`.
///
/// Energy balance, per year: the home load plus EV charging is `L`. The share
/// of `L` served on site is
/// `daytime_load_fraction + (1 - daytime_load_fraction) * storage_fraction`,
/// capped by the design (first-year) PV output. The rest
/// is bought at retail; PV output beyond the on-site share is exported. With
/// full storage the home is grid independent.
pub fn cashflow_series(s: &Scenario, install_year: i32, costs: &CostTrajectory) -> Result<CashflowSeries> {
    let sys = &s.system;
    let fin = &s.finance;
    let period = fin.analysis_period_yr;
    let mut warnings = Vec::new();
    if !costs.covers(install_year) {
        warnings.push(format!(
            "install year {install_year} outside cost table {}..={}; costs clamped to nearest row",
            costs.first_year(),
            costs.last_year()
        ));
    }

    let pv_w = sys.pv_kw * 1000.0;
    let wall_kwh = sys.wall_battery_kwh();
    let pv_usd = pv_w * costs.capex_at(install_year, CostComponent::Pv);
    let wall_battery_usd = wall_kwh * costs.capex_at(install_year, CostComponent::Battery);
    let charger_usd = sys.v2h.as_ref().map_or(0.0, |v| v.charger_cost_usd);
    let gross_usd = pv_usd + wall_battery_usd + charger_usd;
    let net_usd = apply_itc(gross_usd, fin.itc_rate, s.flags.itc_enabled);
    let down_payment_usd = net_usd * fin.down_payment_fraction;
    let loan_principal_usd = net_usd - down_payment_usd;
    let loan = amortization_schedule(loan_principal_usd, fin.loan_rate, fin.loan_term_yr)?;

    let mut years: Vec<CashflowYear> = (0..period)
        .map(|t| CashflowYear {
            year_offset: t,
            calendar_year: install_year + t as i32,
            ..Default::default()
        })
        .collect();
    years[0].capital_out = down_payment_usd;

    let tax_rate = if fin.interest_tax_deductible {
        fin.marginal_tax_rate
    } else {
        0.0
    };
    for (row, y) in loan.rows.iter().zip(years.iter_mut()) {
        let deflator = (1.0 + fin.inflation).powi(y.year_offset as i32);
        y.loan_payment = row.payment / deflator;
        y.interest_tax_shield = tax_rate * row.interest / deflator;
    }

    let mut replacements = Vec::new();
    if wall_kwh > 0.0 {
        for t in replacement_years(sys.battery_life_yr, period) {
            let cost = wall_kwh * costs.capex_at(install_year + t as i32, CostComponent::Battery);
            replacements.push(Replacement {
                year_offset: t,
                kind: ReplacementKind::Battery,
                cost_usd: cost,
            });
        }
    }
    if pv_w > 0.0 {
        for t in replacement_years(sys.inverter_life_yr, period) {
            let cost = pv_w * sys.inverter_cost_usd_per_w;
            replacements.push(Replacement {
                year_offset: t,
                kind: ReplacementKind::Inverter,
                cost_usd: cost,
            });
        }
    }
    replacements.sort_by_key(|r| r.year_offset);
    for r in &replacements {
        years[r.year_offset as usize].replacement_out += r.cost_usd;
    }

    let load = s.home_load_kwh() + s.ev_load_kwh();
    let design_generation = sys.pv_kw * s.home.specific_yield_kwh_per_kw;
    let daytime = s.home.daytime_load_fraction;
    let coverage = daytime + (1.0 - daytime) * sys.storage_fraction;
    let on_site = coverage * load.min(design_generation);
    let imports = load - on_site;
    let gasoline = if s.flags.annual_ev_miles > 0.0 {
        s.flags.annual_ev_miles / s.tariff.gasoline_mpg * s.tariff.gasoline_price_usd_per_gal
    } else {
        0.0
    };

    for y in years.iter_mut() {
        let t = y.year_offset;
        let esc = escalation(s, y.calendar_year);
        let generation = pv_energy_year(
            sys.pv_kw,
            s.home.specific_yield_kwh_per_kw,
            sys.pv_degradation_per_yr,
            t,
        );
        let exports = (generation - on_site).max(0.0);
        y.pv_generation_kwh = generation;
        y.grid_import_kwh = imports;
        y.export_kwh = exports;
        y.grid_purchase = imports * s.tariff.retail_price_usd_per_kwh * esc;
        y.export_credit = exports * s.tariff.export_credit_usd_per_kwh * esc;
        y.om_out = sys.pv_kw * costs.capex_at(y.calendar_year, CostComponent::Om);
        y.gasoline_offset = gasoline;
        if wall_kwh > 0.0 {
            y.battery_usable_kwh = battery_usable_kwh(
                wall_kwh,
                sys.battery_roundtrip_eff,
                sys.battery_degradation_per_yr,
                age_at(t, sys.battery_life_yr),
                sys.battery_life_yr,
            )?;
        }
    }

    Ok(CashflowSeries {
        install_year,
        years,
        capital: CapitalBreakdown {
            pv_usd,
            wall_battery_usd,
            charger_usd,
            gross_usd,
            itc_usd: gross_usd - net_usd,
            net_usd,
            down_payment_usd,
            loan_principal_usd,
            loan_payment_usd: loan.payment(),
        },
        replacements,
        warnings,
    })
}

/// Grid-only reference: the home's pre-improvement consumption bought at retail.
pub fn baseline_series(s: &Scenario, install_year: i32) -> CashflowSeries {
    let years = (0..s.finance.analysis_period_yr)
        .map(|t| {
            let calendar_year = install_year + t as i32;
            let kwh = s.home.annual_consumption_kwh;
            CashflowYear {
                year_offset: t,
                calendar_year,
                grid_import_kwh: kwh,
                grid_purchase: kwh * s.tariff.retail_price_usd_per_kwh * escalation(s, calendar_year),
                ..Default::default()
            }
        })
        .collect();
    CashflowSeries {
        install_year,
        years,
        capital: CapitalBreakdown::default(),
        replacements: Vec::new(),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::load_cost_table;
    use crate::scenario::V2hSpec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn costs() -> CostTrajectory {
        load_cost_table(
            "year,pv_capex_usd_per_w,battery_capex_usd_per_kwh,fixed_om_usd_per_kw_yr\n2020,2.5,400,20\n2050,0.8,100,10\n",
        )
        .unwrap()
    }

    #[test]
    fn fisher() {
        assert!(close(real_rate(0.045, 0.025), 0.019512, 1e-6));
        assert_eq!(real_rate(0.025, 0.025), 0.0);
        assert!(close(real_rate(0.0, 0.025), -0.02439, 1e-5));
    }

    #[test]
    fn amortization_examples() {
        let s = amortization_schedule(1000.0, 0.0, 10).unwrap();
        assert!(s.rows.iter().all(|r| r.payment == 100.0 && r.interest == 0.0));
        let s = amortization_schedule(10_000.0, 0.045, 25).unwrap();
        assert!(close(s.payment(), 674.39, 0.005));
        assert_eq!(s.rows.len(), 25);
        assert!(close(s.rows[24].remaining_balance, 0.0, 0.01));
        let s = amortization_schedule(0.0, 0.045, 25).unwrap();
        assert!(s.rows.iter().all(|r| r.payment == 0.0 && r.remaining_balance == 0.0));
        assert!(amortization_schedule(1.0, -1.0, 5).is_err());
        assert!(amortization_schedule(1.0, 0.05, 0).is_err());
    }

    #[test]
    fn itc() {
        assert!(close(apply_itc(20_000.0, 0.30, true), 14_000.0, 1e-9));
        assert_eq!(apply_itc(20_000.0, 0.30, false), 20_000.0);
        assert_eq!(apply_itc(0.0, 0.30, true), 0.0);
    }

    #[test]
    fn npv_examples() {
        assert_eq!(npv(&[0.0; 30], 0.0195), 0.0);
        assert_eq!(npv(&[-100.0, 0.0], 0.07), -100.0);
        assert!(close(npv(&[0.0, -100.0], 0.0195), -98.09, 0.005));
    }

    #[test]
    fn levelize_examples() {
        assert_eq!(levelize_monthly(&[0.0; 25], 0.0195, 25).unwrap(), 0.0);
        let mut flows = vec![0.0; 25];
        flows[0] = -12_000.0;
        assert!(close(levelize_monthly(&flows, 0.0, 25).unwrap(), -40.0, 1e-9));
        // Annuity-due factor Σ_{t<25} 1.0195^-t = 20.0215 (brute-force sum).
        assert!(close(levelize_monthly(&flows, 0.0195, 25).unwrap(), -49.95, 0.005));
        assert!(levelize_monthly(&flows, 0.0195, 26).is_err());
        assert!(levelize_monthly(&flows, 0.0195, 0).is_err());
    }

    #[test]
    fn full_storage_buys_no_grid_energy() {
        let s = Scenario::reference();
        let series = cashflow_series(&s, 2020, &costs()).unwrap();
        assert_eq!(series.years.len(), 30);
        assert!(series.years.iter().all(|y| y.grid_purchase == 0.0));
        assert!(series.years.iter().skip(1).all(|y| y.capital_out == 0.0));
        assert!(series.years.iter().skip(25).all(|y| y.loan_payment == 0.0));
        let battery: Vec<_> = series
            .replacements
            .iter()
            .filter(|r| r.kind == ReplacementKind::Battery)
            .map(|r| r.year_offset)
            .collect();
        assert_eq!(battery, vec![10, 20]);
        assert!(series.warnings.is_empty());
    }

    #[test]
    fn zero_system_pays_full_bill() {
        let mut s = Scenario::reference();
        s.system.pv_kw = 0.0;
        s.system.battery_nameplate_kwh = 0.0;
        let series = cashflow_series(&s, 2020, &costs()).unwrap();
        for y in &series.years {
            assert!(close(y.grid_purchase, 1502.9, 1e-9));
            assert_eq!(y.system_cost(), 0.0);
            assert_eq!(y.export_credit, 0.0);
        }
        assert!(series.replacements.is_empty());
    }

    #[test]
    fn v2h_prices_charger_not_wall_battery() {
        let mut s = Scenario::reference();
        s.system.v2h = Some(V2hSpec::default());
        s.system.battery_nameplate_kwh = 0.0;
        s.flags.itc_enabled = false;
        let series = cashflow_series(&s, 2020, &costs()).unwrap();
        assert_eq!(series.capital.charger_usd, 6000.0);
        assert_eq!(series.capital.wall_battery_usd, 0.0);
        assert!(close(series.capital.gross_usd, 9500.0 * 2.5 + 6000.0, 1e-9));
        assert!(series.replacements.iter().all(|r| r.kind != ReplacementKind::Battery));
        assert!(series.years.iter().all(|y| y.gasoline_offset == 0.0));

        s.flags.annual_ev_miles = 10_000.0;
        let series = cashflow_series(&s, 2020, &costs()).unwrap();
        assert!(close(series.years[3].gasoline_offset, 1305.785, 1e-3));
    }

    #[test]
    fn clamped_install_year_warns() {
        let series = cashflow_series(&Scenario::reference(), 2060, &costs()).unwrap();
        assert_eq!(series.warnings.len(), 1);
        assert!(close(series.capital.pv_usd, 9500.0 * 0.8, 1e-9));
    }

    #[test]
    fn loan_disabled_by_full_down_payment() {
        let mut s = Scenario::reference();
        s.finance.down_payment_fraction = 1.0;
        let series = cashflow_series(&s, 2020, &costs()).unwrap();
        assert!(close(series.years[0].capital_out, series.capital.net_usd, 1e-9));
        assert!(series
            .years
            .iter()
            .all(|y| y.loan_payment == 0.0 && y.interest_tax_shield == 0.0));
    }
}
