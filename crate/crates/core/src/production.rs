//! Physical schedules: PV output with degradation, battery usable capacity,
//! replacement calendars and EV efficiency. Year offsets `t` start at 0 for the
//! first operating year.

use crate::error::{Error, Result};

/// Annual PV energy, kWh, with geometric degradation.
pub fn pv_energy_year(pv_kw: f64, specific_yield: f64, degradation: f64, t: u32) -> f64 {
    pv_kw * specific_yield * (1.0 - degradation).powi(t as i32)
}

/// Usable battery energy after roundtrip derate and aging. `age` counts years
/// since the battery (or its latest replacement) was installed.
pub fn battery_usable_kwh(nameplate: f64, roundtrip_eff: f64, degradation: f64, age: u32, life: u32) -> Result<f64> {
    if age >= life {
        return Err(Error::OutOfLife { age, life });
    }
    Ok(nameplate * roundtrip_eff * (1.0 - degradation).powi(age as i32))
}

/// Offsets at which a component with `life_yr` must be replaced: multiples of
/// the life strictly inside the analysis period.
pub fn replacement_years(life_yr: u32, analysis_period_yr: u32) -> Vec<u32> {
    if life_yr == 0 {
        return Vec::new();
    }
    (1..)
        .map(|k| k * life_yr)
        .take_while(|&t| t < analysis_period_yr)
        .collect()
}

/// Age of a periodically replaced component at offset `t`.
pub fn age_at(t: u32, life_yr: u32) -> u32 {
    if life_yr == 0 {
        t
    } else {
        t % life_yr
    }
}

/// Miles per kWh.
pub fn ev_efficiency(range_mi: f64, battery_kwh: f64) -> Result<f64> {
    if battery_kwh.is_nan() || battery_kwh <= 0.0 {
        return Err(Error::domain(format!("EV battery must be > 0 kWh, got {battery_kwh}")));
    }
    Ok(range_mi / battery_kwh)
}

/// Per-year energy over an analysis period.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySchedule {
    pub kwh: Vec<f64>,
}

impl EnergySchedule {
    pub fn pv(pv_kw: f64, specific_yield: f64, degradation: f64, period_yr: u32) -> Self {
        Self {
            kwh: (0..period_yr)
                .map(|t| pv_energy_year(pv_kw, specific_yield, degradation, t))
                .collect(),
        }
    }

    /// Usable battery capacity by year, resetting at each replacement.
    pub fn battery_usable(nameplate: f64, roundtrip_eff: f64, degradation: f64, life: u32, period_yr: u32) -> Self {
        Self {
            kwh: (0..period_yr)
                .map(|t| {
                    battery_usable_kwh(nameplate, roundtrip_eff, degradation, age_at(t, life), life)
                        .expect("age_at is always below life")
                })
                .collect(),
        }
    }

    pub fn total(&self) -> f64 {
        self.kwh.iter().sum()
    }
}
