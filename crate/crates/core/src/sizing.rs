//! Net-zero PV sizing and efficiency-improvement scaling.

use crate::error::{Error, Result};
use crate::scenario::SystemSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct SizingResult {
    pub pv_kw: f64,
    pub battery_nameplate_kwh: f64,
    pub notes: String,
}

/// PV capacity whose annual output matches `annual_kwh`.
pub fn netzero_pv_kw(annual_kwh: f64, specific_yield: f64) -> f64 {
    annual_kwh / specific_yield
}

/// Scales PV and wall battery by `1 - fraction`; everything else is unchanged.
pub fn apply_efficiency_improvement(spec: &SystemSpec, fraction: f64) -> Result<SystemSpec> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::domain(format!(
            "improvement fraction must be within [0, 1), got {fraction}"
        )));
    }
    let scale = 1.0 - fraction;
    Ok(SystemSpec {
        pv_kw: spec.pv_kw * scale,
        battery_nameplate_kwh: spec.battery_nameplate_kwh * scale,
        ..spec.clone()
    })
}

pub fn battery_for_fraction(reference_kwh: f64, storage_fraction: f64) -> f64 {
    reference_kwh * storage_fraction
}

/// Net-zero sizing for a home: PV for the (improved) home load plus EV charging
/// energy, and a wall battery at `storage_fraction` of the reference scaled by
/// the same improvement.
pub fn size_netzero(
    annual_consumption_kwh: f64,
    specific_yield: f64,
    reference_battery_kwh: f64,
    storage_fraction: f64,
    improvement_fraction: f64,
    ev_load_kwh: f64,
) -> SizingResult {
    let scale = 1.0 - improvement_fraction;
    let home_pv = netzero_pv_kw(annual_consumption_kwh * scale, specific_yield);
    let ev_pv = netzero_pv_kw(ev_load_kwh, specific_yield);
    let battery = battery_for_fraction(reference_battery_kwh * scale, storage_fraction);
    let mut notes = format!(
        "{home_pv:.3} kW for {:.0} kWh/yr home load",
        annual_consumption_kwh * scale
    );
    if ev_pv > 0.0 {
        notes.push_str(&format!(" + {ev_pv:.3} kW for {ev_load_kwh:.0} kWh/yr EV charging"));
    }
    notes.push_str(&format!(
        "; battery {:.0}% of {:.2} kWh",
        storage_fraction * 100.0,
        reference_battery_kwh * scale
    ));
    SizingResult {
        pv_kw: home_pv + ev_pv,
        battery_nameplate_kwh: battery,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn netzero() {
        assert_eq!(netzero_pv_kw(13_300.0, 1400.0), 9.5);
        assert_eq!(netzero_pv_kw(0.0, 1400.0), 0.0);
        let improved = netzero_pv_kw(13_300.0 * 0.683, 1400.0);
        assert!(rel(improved, 6.48) < 0.005 && (improved - 6.4885).abs() < 1e-9);
    }

    #[test]
    fn improvement_scaling() {
        let spec = SystemSpec {
            pv_kw: 9.5,
            battery_nameplate_kwh: 42.21,
            ..SystemSpec::default()
        };
        let out = apply_efficiency_improvement(&spec, 0.317).unwrap();
        assert!((out.pv_kw - 6.4885).abs() < 1e-12);
        assert!(rel(out.pv_kw, 6.48) < 0.005);
        assert!(rel(out.battery_nameplate_kwh, 28.82) < 0.001);
        assert_eq!(out.battery_life_yr, spec.battery_life_yr);
        assert_eq!(apply_efficiency_improvement(&spec, 0.0).unwrap(), spec);
        let new_home = SystemSpec {
            pv_kw: 8.6,
            battery_nameplate_kwh: 38.3,
            ..SystemSpec::default()
        };
        assert_eq!(apply_efficiency_improvement(&new_home, 0.0).unwrap(), new_home);
        assert!(apply_efficiency_improvement(&spec, 1.0).is_err());
    }

    #[test]
    fn fractions() {
        assert_eq!(battery_for_fraction(42.21, 1.0), 42.21);
        assert_eq!(battery_for_fraction(42.21, 0.5), 21.105);
        assert_eq!(battery_for_fraction(42.21, 0.0), 0.0);
    }

    #[test]
    fn sizing_with_ev() {
        let r = size_netzero(13_300.0, 1400.0, 42.21, 0.0, 0.317, 10_000.0 / (220.0 / 68.7));
        assert!((r.pv_kw - 8.719).abs() < 1e-3, "{}", r.pv_kw);
        assert_eq!(r.battery_nameplate_kwh, 0.0);
        assert!(r.notes.contains("EV"));
    }
}
