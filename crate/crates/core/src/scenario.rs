//! Scenario configuration: domain types, JSON loading and validation.
//!
//! A scenario document is a single JSON object with the top-level blocks
//! `home`, `system`, `finance`, `tariff` and `flags`. `home` and `system` are
//! required; the other blocks default to the reference parameter set. Inside
//! every block, omitted keys take their reference defaults and unknown keys
//! are rejected.
//!
//! All money is real 2020 USD. Rates are fractions, not percent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::finance::real_rate;
use crate::production::ev_efficiency;
use crate::sizing::netzero_pv_kw;

/// Reference parameter set for an average existing Florida home.
pub mod defaults {
    pub const ANNUAL_CONSUMPTION_KWH: f64 = 13_300.0;
    pub const SPECIFIC_YIELD_KWH_PER_KW: f64 = 1_400.0;
    pub const DAYTIME_LOAD_FRACTION: f64 = 0.5;

    pub const EXISTING_HOME_PV_KW: f64 = 9.5;
    pub const REFERENCE_BATTERY_KWH: f64 = 42.21;
    pub const BATTERY_ROUNDTRIP_EFF: f64 = 0.95;
    pub const BATTERY_DEGRADATION_PER_YR: f64 = 0.035;
    pub const BATTERY_LIFE_YR: u32 = 10;
    pub const PV_DEGRADATION_PER_YR: f64 = 0.005;
    pub const INVERTER_COST_USD_PER_W: f64 = 0.10;
    pub const INVERTER_LIFE_YR: u32 = 15;

    pub const EV_BATTERY_KWH: f64 = 68.7;
    pub const EV_RANGE_MI: f64 = 220.0;
    pub const BIDIRECTIONAL_CHARGER_USD: f64 = 6_000.0;

    pub const INFLATION: f64 = 0.025;
    pub const NOMINAL_DISCOUNT: f64 = 0.045;
    pub const REAL_DISCOUNT: f64 = 0.0195;
    pub const NOMINAL_ELEC_ESCALATION: f64 = 0.025;
    pub const REAL_ELEC_ESCALATION: f64 = 0.0;
    pub const DOWN_PAYMENT_FRACTION: f64 = 0.10;
    pub const MARGINAL_TAX_RATE: f64 = 0.20;
    pub const ITC_RATE: f64 = 0.30;
    pub const ANALYSIS_PERIOD_YR: u32 = 30;
    pub const SERVICE_TIME_YR: u32 = 25;

    pub const RETAIL_PRICE_USD_PER_KWH: f64 = 0.113;
    pub const GASOLINE_PRICE_USD_PER_GAL: f64 = 3.16;
    pub const GASOLINE_MPG: f64 = 24.2;

    pub const EFFICIENCY_IMPROVEMENT: f64 = 0.317;

    /// Calendar year that real prices are expressed in.
    pub const PRICE_BASE_YEAR: i32 = 2020;
}

/// Tolerance for checking a stated real discount rate against the Fisher identity.
pub const DISCOUNT_CONSISTENCY_TOL: f64 = 1e-4;
/// Relative tolerance for system sizes of efficiency-improved homes.
pub const IMPROVEMENT_SIZE_TOL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HomeKind {
    Existing,
    New,
    Improved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomeProfile {
    /// Consumption before any efficiency improvement, kWh/yr.
    pub annual_consumption_kwh: f64,
    pub specific_yield_kwh_per_kw: f64,
    pub home_kind: HomeKind,
    /// Share of annual load coincident with PV production (served without storage).
    pub daytime_load_fraction: f64,
}

impl Default for HomeProfile {
    fn default() -> Self {
        Self {
            annual_consumption_kwh: defaults::ANNUAL_CONSUMPTION_KWH,
            specific_yield_kwh_per_kw: defaults::SPECIFIC_YIELD_KWH_PER_KW,
            home_kind: HomeKind::Existing,
            daytime_load_fraction: defaults::DAYTIME_LOAD_FRACTION,
        }
    }
}

/// Vehicle-to-home: the EV traction battery serves as home storage through a
/// bidirectional charger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct V2hSpec {
    pub ev_battery_kwh: f64,
    pub ev_range_mi: f64,
    pub charger_cost_usd: f64,
}

impl Default for V2hSpec {
    fn default() -> Self {
        Self {
            ev_battery_kwh: defaults::EV_BATTERY_KWH,
            ev_range_mi: defaults::EV_RANGE_MI,
            charger_cost_usd: defaults::BIDIRECTIONAL_CHARGER_USD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSpec {
    pub pv_kw: f64,
    /// Wall battery nameplate. Must be zero when `v2h` is present.
    pub battery_nameplate_kwh: f64,
    /// Nameplate that makes the average home grid independent (100 % storage).
    pub reference_battery_kwh: f64,
    pub battery_roundtrip_eff: f64,
    pub battery_degradation_per_yr: f64,
    pub battery_life_yr: u32,
    pub pv_degradation_per_yr: f64,
    pub inverter_cost_usd_per_w: f64,
    pub inverter_life_yr: u32,
    pub storage_fraction: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v2h: Option<V2hSpec>,
}

impl Default for SystemSpec {
    fn default() -> Self {
        Self {
            pv_kw: defaults::EXISTING_HOME_PV_KW,
            battery_nameplate_kwh: defaults::REFERENCE_BATTERY_KWH,
            reference_battery_kwh: defaults::REFERENCE_BATTERY_KWH,
            battery_roundtrip_eff: defaults::BATTERY_ROUNDTRIP_EFF,
            battery_degradation_per_yr: defaults::BATTERY_DEGRADATION_PER_YR,
            battery_life_yr: defaults::BATTERY_LIFE_YR,
            pv_degradation_per_yr: defaults::PV_DEGRADATION_PER_YR,
            inverter_cost_usd_per_w: defaults::INVERTER_COST_USD_PER_W,
            inverter_life_yr: defaults::INVERTER_LIFE_YR,
            storage_fraction: 1.0,
            v2h: None,
        }
    }
}

impl SystemSpec {
    /// Wall battery that is actually purchased (none for V2H systems).
    pub fn wall_battery_kwh(&self) -> f64 {
        if self.v2h.is_some() {
            0.0
        } else {
            self.battery_nameplate_kwh
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FinancialParams {
    pub inflation: f64,
    pub nominal_discount: f64,
    /// Optional stated real rate, checked against the Fisher identity. The
    /// engine always discounts at the rate derived from `nominal_discount`
    /// and `inflation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_discount: Option<f64>,
    pub nominal_elec_escalation: f64,
    pub real_elec_escalation: f64,
    pub down_payment_fraction: f64,
    pub loan_rate: f64,
    pub loan_term_yr: u32,
    pub marginal_tax_rate: f64,
    pub interest_tax_deductible: bool,
    pub itc_rate: f64,
    pub analysis_period_yr: u32,
    pub service_time_yr: u32,
}

impl Default for FinancialParams {
    fn default() -> Self {
        Self {
            inflation: defaults::INFLATION,
            nominal_discount: defaults::NOMINAL_DISCOUNT,
            real_discount: Some(defaults::REAL_DISCOUNT),
            nominal_elec_escalation: defaults::NOMINAL_ELEC_ESCALATION,
            real_elec_escalation: defaults::REAL_ELEC_ESCALATION,
            down_payment_fraction: defaults::DOWN_PAYMENT_FRACTION,
            loan_rate: defaults::NOMINAL_DISCOUNT,
            loan_term_yr: defaults::SERVICE_TIME_YR,
            marginal_tax_rate: defaults::MARGINAL_TAX_RATE,
            interest_tax_deductible: true,
            itc_rate: defaults::ITC_RATE,
            analysis_period_yr: defaults::ANALYSIS_PERIOD_YR,
            service_time_yr: defaults::SERVICE_TIME_YR,
        }
    }
}

impl FinancialParams {
    /// Real discount rate derived from the nominal rate and inflation.
    pub fn real_discount_rate(&self) -> f64 {
        real_rate(self.nominal_discount, self.inflation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridTariff {
    pub retail_price_usd_per_kwh: f64,
    /// Credit for exported PV energy. Defaults to the retail price (net metering).
    pub export_credit_usd_per_kwh: f64,
    pub gasoline_price_usd_per_gal: f64,
    pub gasoline_mpg: f64,
}

impl Default for GridTariff {
    fn default() -> Self {
        Self {
            retail_price_usd_per_kwh: defaults::RETAIL_PRICE_USD_PER_KWH,
            export_credit_usd_per_kwh: defaults::RETAIL_PRICE_USD_PER_KWH,
            gasoline_price_usd_per_gal: defaults::GASOLINE_PRICE_USD_PER_GAL,
            gasoline_mpg: defaults::GASOLINE_MPG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioFlags {
    pub itc_enabled: bool,
    pub improvement_fraction: f64,
    pub annual_ev_miles: f64,
}

impl Default for ScenarioFlags {
    fn default() -> Self {
        Self {
            itc_enabled: true,
            improvement_fraction: 0.0,
            annual_ev_miles: 0.0,
        }
    }
}

/// One complete analysis case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub home: HomeProfile,
    pub system: SystemSpec,
    #[serde(default)]
    pub finance: FinancialParams,
    #[serde(default)]
    pub tariff: GridTariff,
    #[serde(default)]
    pub flags: ScenarioFlags,
}

/// Raw document shape; `home` and `system` are checked for presence after parsing
/// so that a missing block is reported as a validation error.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    home: Option<HomeProfile>,
    system: Option<SystemSpec>,
    finance: Option<FinancialParams>,
    tariff: Option<GridTariff>,
    flags: Option<ScenarioFlags>,
}

impl Scenario {
    /// Reference existing home: 9.5 kW PV with the 42.21 kWh battery.
    pub fn reference() -> Self {
        Self {
            home: HomeProfile::default(),
            system: SystemSpec::default(),
            finance: FinancialParams::default(),
            tariff: GridTariff::default(),
            flags: ScenarioFlags::default(),
        }
    }

    /// Consumption after the efficiency improvement, kWh/yr.
    pub fn home_load_kwh(&self) -> f64 {
        self.home.annual_consumption_kwh * (1.0 - self.flags.improvement_fraction)
    }

    /// EV efficiency used for driving energy: the V2H vehicle if present,
    /// otherwise the reference average EV.
    pub fn ev_mi_per_kwh(&self) -> f64 {
        let (range, kwh) = match &self.system.v2h {
            Some(v) => (v.ev_range_mi, v.ev_battery_kwh),
            None => (defaults::EV_RANGE_MI, defaults::EV_BATTERY_KWH),
        };
        ev_efficiency(range, kwh).unwrap_or(0.0)
    }

    /// Annual EV charging energy, kWh/yr.
    pub fn ev_load_kwh(&self) -> f64 {
        let eff = self.ev_mi_per_kwh();
        if self.flags.annual_ev_miles <= 0.0 || eff <= 0.0 {
            0.0
        } else {
            self.flags.annual_ev_miles / eff
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(document: &str) -> Result<Scenario> {
    let text = if document.trim().is_empty() { "{}" } else { document };
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        Error::MalformedConfig {
            key: if key == "." { "<document>".into() } else { key },
            message: e.into_inner().to_string(),
        }
    })?;

    let mut missing = Vec::new();
    if doc.home.is_none() {
        missing.push(Violation::new("home", "<missing>", "home profile block is required"));
    }
    if doc.system.is_none() {
        missing.push(Violation::new("system", "<missing>", "system block is required"));
    }
    if !missing.is_empty() {
        return Err(Error::InvalidScenario(missing));
    }

    let scenario = Scenario {
        home: doc.home.unwrap_or_default(),
        system: doc.system.unwrap_or_default(),
        finance: doc.finance.unwrap_or_default(),
        tariff: doc.tariff.unwrap_or_default(),
        flags: doc.flags.unwrap_or_default(),
    };
    let violations = validate(&scenario);
    if violations.is_empty() {
        Ok(scenario)
    } else {
        Err(Error::InvalidScenario(violations))
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn check(&mut self, ok: bool, field: &str, value: impl std::fmt::Display, constraint: &str) {
        if !ok {
            self.out.push(Violation::new(field, value, constraint));
        }
    }

    /// Finite and within `[lo, hi]`.
    fn range(&mut self, field: &str, v: f64, lo: f64, hi: f64) {
        if !v.is_finite() {
            self.out.push(Violation::new(field, v, "must be finite"));
        } else if v < lo || v > hi {
            self.out
                .push(Violation::new(field, v, format!("must be within [{lo}, {hi}]")));
        }
    }

    fn non_negative(&mut self, field: &str, v: f64) {
        self.range(field, v, 0.0, f64::INFINITY);
    }

    fn rate(&mut self, field: &str, v: f64) {
        if !v.is_finite() {
            self.out.push(Violation::new(field, v, "must be finite"));
        } else if v <= -1.0 {
            self.out.push(Violation::new(field, v, "must be greater than -1"));
        }
    }
}

/// Checks every scenario invariant; an empty list means the scenario is valid.
pub fn validate(s: &Scenario) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };

    let h = &s.home;
    if !h.annual_consumption_kwh.is_finite() {
        c.check(
            false,
            "home.annual_consumption_kwh",
            h.annual_consumption_kwh,
            "must be finite",
        );
    } else {
        c.check(
            h.annual_consumption_kwh > 0.0,
            "home.annual_consumption_kwh",
            h.annual_consumption_kwh,
            "must be > 0",
        );
    }
    c.range(
        "home.specific_yield_kwh_per_kw",
        h.specific_yield_kwh_per_kw,
        500.0,
        2500.0,
    );
    c.range("home.daytime_load_fraction", h.daytime_load_fraction, 0.0, 1.0);

    let sys = &s.system;
    c.non_negative("system.pv_kw", sys.pv_kw);
    c.non_negative("system.battery_nameplate_kwh", sys.battery_nameplate_kwh);
    c.non_negative("system.reference_battery_kwh", sys.reference_battery_kwh);
    if !sys.battery_roundtrip_eff.is_finite() {
        c.check(
            false,
            "system.battery_roundtrip_eff",
            sys.battery_roundtrip_eff,
            "must be finite",
        );
    } else {
        c.check(
            sys.battery_roundtrip_eff > 0.0 && sys.battery_roundtrip_eff <= 1.0,
            "system.battery_roundtrip_eff",
            sys.battery_roundtrip_eff,
            "must be within (0, 1]",
        );
    }
    c.range(
        "system.battery_degradation_per_yr",
        sys.battery_degradation_per_yr,
        0.0,
        0.999_999,
    );
    c.range(
        "system.pv_degradation_per_yr",
        sys.pv_degradation_per_yr,
        0.0,
        0.999_999,
    );
    c.check(
        sys.battery_life_yr >= 1,
        "system.battery_life_yr",
        sys.battery_life_yr,
        "must be >= 1",
    );
    c.check(
        sys.inverter_life_yr >= 1,
        "system.inverter_life_yr",
        sys.inverter_life_yr,
        "must be >= 1",
    );
    c.non_negative("system.inverter_cost_usd_per_w", sys.inverter_cost_usd_per_w);
    c.range("system.storage_fraction", sys.storage_fraction, 0.0, 1.0);
    if let Some(v) = &sys.v2h {
        if !v.ev_battery_kwh.is_finite() || v.ev_battery_kwh <= 0.0 {
            c.check(false, "system.v2h.ev_battery_kwh", v.ev_battery_kwh, "must be > 0");
        }
        c.non_negative("system.v2h.ev_range_mi", v.ev_range_mi);
        c.non_negative("system.v2h.charger_cost_usd", v.charger_cost_usd);
        c.check(
            sys.battery_nameplate_kwh == 0.0,
            "system.battery_nameplate_kwh",
            sys.battery_nameplate_kwh,
            "must be 0 when v2h is present (the EV battery is the storage)",
        );
    }

    let f = &s.finance;
    c.rate("finance.inflation", f.inflation);
    c.rate("finance.nominal_discount", f.nominal_discount);
    c.rate("finance.nominal_elec_escalation", f.nominal_elec_escalation);
    c.rate("finance.real_elec_escalation", f.real_elec_escalation);
    c.rate("finance.loan_rate", f.loan_rate);
    if let Some(stated) = f.real_discount {
        c.rate("finance.real_discount", stated);
        if stated.is_finite() && f.nominal_discount.is_finite() && f.inflation.is_finite() && f.inflation > -1.0 {
            let derived = real_rate(f.nominal_discount, f.inflation);
            c.check(
                (derived - stated).abs() < DISCOUNT_CONSISTENCY_TOL,
                "finance.real_discount",
                stated,
                &format!(
                    "inconsistent with (1 + nominal_discount)/(1 + inflation) - 1 = {derived:.6} (tolerance {DISCOUNT_CONSISTENCY_TOL})"
                ),
            );
        }
    }
    c.range("finance.down_payment_fraction", f.down_payment_fraction, 0.0, 1.0);
    c.range("finance.marginal_tax_rate", f.marginal_tax_rate, 0.0, 1.0);
    if !f.itc_rate.is_finite() || f.itc_rate < 0.0 || f.itc_rate >= 1.0 {
        c.check(false, "finance.itc_rate", f.itc_rate, "must be within [0, 1)");
    }
    c.check(
        f.loan_term_yr >= 1,
        "finance.loan_term_yr",
        f.loan_term_yr,
        "must be >= 1",
    );
    c.check(
        f.service_time_yr >= 1,
        "finance.service_time_yr",
        f.service_time_yr,
        "must be >= 1",
    );
    c.check(
        f.analysis_period_yr >= f.service_time_yr,
        "finance.analysis_period_yr",
        f.analysis_period_yr,
        "must be >= service_time_yr",
    );

    let t = &s.tariff;
    c.non_negative("tariff.retail_price_usd_per_kwh", t.retail_price_usd_per_kwh);
    c.non_negative("tariff.export_credit_usd_per_kwh", t.export_credit_usd_per_kwh);
    c.non_negative("tariff.gasoline_price_usd_per_gal", t.gasoline_price_usd_per_gal);
    c.non_negative("tariff.gasoline_mpg", t.gasoline_mpg);

    let fl = &s.flags;
    if !fl.improvement_fraction.is_finite() || fl.improvement_fraction < 0.0 || fl.improvement_fraction >= 1.0 {
        c.check(
            false,
            "flags.improvement_fraction",
            fl.improvement_fraction,
            "must be within [0, 1)",
        );
    }
    c.non_negative("flags.annual_ev_miles", fl.annual_ev_miles);
    if fl.annual_ev_miles > 0.0 {
        c.check(
            t.gasoline_mpg > 0.0,
            "tariff.gasoline_mpg",
            t.gasoline_mpg,
            "must be > 0 when annual_ev_miles > 0",
        );
    }

    // Size consistency only makes sense once the inputs it depends on are sane.
    if c.out.is_empty() && fl.improvement_fraction > 0.0 {
        check_improved_sizes(s, &mut c);
    }

    c.out
}

/// An improved home must be sized to its reduced load: the net-zero PV for the
/// improved home load plus any PV added for EV driving, and a wall battery scaled
/// from the reference by the same factor.
fn check_improved_sizes(s: &Scenario, c: &mut Checker) {
    let scale = 1.0 - s.flags.improvement_fraction;
    let yield_ = s.home.specific_yield_kwh_per_kw;
    let expected_pv =
        netzero_pv_kw(s.home.annual_consumption_kwh, yield_) * scale + netzero_pv_kw(s.ev_load_kwh(), yield_);
    let close = |actual: f64, expected: f64| {
        if expected == 0.0 {
            actual == 0.0
        } else {
            ((actual - expected) / expected).abs() <= IMPROVEMENT_SIZE_TOL
        }
    };
    c.check(
        close(s.system.pv_kw, expected_pv),
        "system.pv_kw",
        s.system.pv_kw,
        &format!("improved home expects {expected_pv:.3} kW within 0.5%"),
    );
    if s.system.v2h.is_none() {
        let expected_batt = s.system.reference_battery_kwh * scale * s.system.storage_fraction;
        c.check(
            close(s.system.battery_nameplate_kwh, expected_batt),
            "system.battery_nameplate_kwh",
            s.system.battery_nameplate_kwh,
            &format!("improved home expects {expected_batt:.3} kWh within 0.5%"),
        );
    }
}
