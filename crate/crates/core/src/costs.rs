//! Per-year capital and O&M cost trajectories, loaded from CSV and linearly
//! interpolated between rows. Values are real 2020 USD.

use crate::error::{Error, Result};

pub const COST_TABLE_HEADER: [&str; 4] = [
    "year",
    "pv_capex_usd_per_w",
    "battery_capex_usd_per_kwh",
    "fixed_om_usd_per_kw_yr",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostRow {
    pub year: i32,
    pub pv_capex_usd_per_w: f64,
    pub battery_capex_usd_per_kwh: f64,
    pub fixed_om_usd_per_kw_yr: f64,
}

impl CostRow {
    fn get(&self, component: CostComponent) -> f64 {
        match component {
            CostComponent::Pv => self.pv_capex_usd_per_w,
            CostComponent::Battery => self.battery_capex_usd_per_kwh,
            CostComponent::Om => self.fixed_om_usd_per_kw_yr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostComponent {
    /// Installed PV, $/W DC.
    Pv,
    /// Installed battery, $/kWh.
    Battery,
    /// Fixed PV O&M, $/kW/yr.
    Om,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostTrajectory {
    rows: Vec<CostRow>,
}

impl CostTrajectory {
    /// Builds a trajectory, checking ordering, signs and row count. Errors carry
    /// the 1-based data row index.
    pub fn from_rows(rows: Vec<CostRow>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            let row = i + 1;
            for (name, v) in [
                (COST_TABLE_HEADER[1], r.pv_capex_usd_per_w),
                (COST_TABLE_HEADER[2], r.battery_capex_usd_per_kwh),
                (COST_TABLE_HEADER[3], r.fixed_om_usd_per_kw_yr),
            ] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::CostTable {
                        row,
                        message: format!("{name} must be a finite non-negative number, got {v}"),
                    });
                }
            }
            if i > 0 {
                let prev = rows[i - 1].year;
                if r.year == prev {
                    return Err(Error::CostTable {
                        row,
                        message: format!("duplicate year {}", r.year),
                    });
                }
                if r.year < prev {
                    return Err(Error::CostTable {
                        row,
                        message: format!(
                            "year {} is not after previous year {prev}; years must be strictly increasing",
                            r.year
                        ),
                    });
                }
            }
        }
        if rows.len() < 2 {
            return Err(Error::CostTable {
                row: rows.len(),
                message: "at least 2 rows required".into(),
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[CostRow] {
        &self.rows
    }

    pub fn first_year(&self) -> i32 {
        self.rows[0].year
    }

    pub fn last_year(&self) -> i32 {
        self.rows[self.rows.len() - 1].year
    }

    pub fn covers(&self, year: i32) -> bool {
        (self.first_year()..=self.last_year()).contains(&year)
    }

    /// Linear interpolation between the bracketing rows, clamped to the end rows
    /// outside the covered range. Node years return the stored value exactly.
    pub fn capex_at(&self, year: i32, component: CostComponent) -> f64 {
        let first = &self.rows[0];
        let last = &self.rows[self.rows.len() - 1];
        if year <= first.year {
            return first.get(component);
        }
        if year >= last.year {
            return last.get(component);
        }
        // First row with year >= query; guaranteed to exist and be > 0 here.
        let hi = self.rows.partition_point(|r| r.year < year);
        let (a, b) = (&self.rows[hi - 1], &self.rows[hi]);
        if b.year == year {
            return b.get(component);
        }
        let w = f64::from(year - a.year) / f64::from(b.year - a.year);
        let (va, vb) = (a.get(component), b.get(component));
        va + (vb - va) * w
    }
}

/// Parses a cost table. The header row must match [`COST_TABLE_HEADER`] exactly.
pub fn load_cost_table(text: &str) -> Result<CostTrajectory> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => {
            return Err(Error::CostTable {
                row: 0,
                message: e.to_string(),
            })
        }
        None => {
            return Err(Error::CostTable {
                row: 0,
                message: "empty cost table; header row required".into(),
            })
        }
    };
    if header.iter().ne(COST_TABLE_HEADER.iter().copied()) {
        let missing: Vec<_> = COST_TABLE_HEADER
            .iter()
            .filter(|c| !header.iter().any(|h| h == **c))
            .collect();
        let message = if missing.is_empty() {
            format!("header must be exactly `{}`", COST_TABLE_HEADER.join(","))
        } else {
            format!(
                "missing column(s) {:?}; header must be exactly `{}`",
                missing,
                COST_TABLE_HEADER.join(",")
            )
        };
        return Err(Error::CostTable { row: 0, message });
    }

    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::CostTable {
            row,
            message: e.to_string(),
        })?;
        if rec.len() != COST_TABLE_HEADER.len() {
            return Err(Error::CostTable {
                row,
                message: format!("expected {} columns, found {}", COST_TABLE_HEADER.len(), rec.len()),
            });
        }
        let num = |col: usize| -> Result<f64> {
            let cell = &rec[col];
            cell.parse::<f64>().map_err(|_| Error::CostTable {
                row,
                message: format!("non-numeric {} value `{cell}`", COST_TABLE_HEADER[col]),
            })
        };
        let year = rec[0].parse::<i32>().map_err(|_| Error::CostTable {
            row,
            message: format!("non-numeric year `{}`", &rec[0]),
        })?;
        rows.push(CostRow {
            year,
            pv_capex_usd_per_w: num(1)?,
            battery_capex_usd_per_kwh: num(2)?,
            fixed_om_usd_per_kw_yr: num(3)?,
        });
    }
    CostTrajectory::from_rows(rows)
}
