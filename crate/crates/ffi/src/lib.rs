//! C ABI over the `nzeb` engine.
//!
//! Scenarios and cost tables cross the boundary as opaque handles created by
//! `*_from_*` constructors and released with the matching `*_free`. Fallible
//! calls return an [`NzebStatus`] and write results through out-pointers; the
//! message for the most recent failure on the calling thread is available from
//! [`nzeb_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nzeb::costs::{load_cost_table, CostTrajectory};
use nzeb::metrics::SavingsPoint;
use nzeb::scenario::{load_scenario, Scenario};
use nzeb::sweep::Variant;
use nzeb::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NzebStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    MalformedConfig = 3,
    InvalidScenario = 4,
    CostTable = 5,
    Domain = 6,
    UnknownVariant = 7,
    Panic = 8,
}

impl From<&Error> for NzebStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::MalformedConfig { .. } => NzebStatus::MalformedConfig,
            Error::InvalidScenario(_) => NzebStatus::InvalidScenario,
            Error::CostTable { .. } => NzebStatus::CostTable,
            Error::UnknownVariant(_) => NzebStatus::UnknownVariant,
            _ => NzebStatus::Domain,
        }
    }
}

/// Opaque scenario handle.
pub struct NzebScenario(Scenario);

/// Opaque cost table handle.
pub struct NzebCostTable(CostTrajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NzebDrivingSavings {
    pub gas_cost_yr: f64,
    pub ev_cost_yr: f64,
    pub savings_yr: f64,
    pub savings_month: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(NzebStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(NzebStatus::from(&e), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> NzebStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NzebStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_last_error(format!("panic: {msg}"));
            NzebStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(NzebStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(NzebStatus::InvalidUtf8, format!("{what} is not UTF-8: {e}")))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next `nzeb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn nzeb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nzeb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a scenario JSON document.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_scenario_from_json(json: *const c_char, out: *mut *mut NzebScenario) -> NzebStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = load_scenario(text)?;
        write_out(out, Box::into_raw(Box::new(NzebScenario(s))), "out")
    })
}

/// Scenario with every field at its reference value.
#[no_mangle]
pub extern "C" fn nzeb_scenario_reference() -> *mut NzebScenario {
    Box::into_raw(Box::new(NzebScenario(Scenario::reference())))
}

/// # Safety
/// `scenario` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nzeb_scenario_free(scenario: *mut NzebScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// New scenario with a variant label such as `itc` or `storage-50+no-itc`
/// applied to `base`.
///
/// # Safety
/// Pointer arguments must be null or valid as described for the other calls.
#[no_mangle]
pub unsafe extern "C" fn nzeb_scenario_apply_variant(
    base: *const NzebScenario,
    label: *const c_char,
    out: *mut *mut NzebScenario,
) -> NzebStatus {
    guard(|| {
        let base = borrow(base, "base")?;
        let label = read_str(label, "label")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = Variant::parse(label)?.apply(&base.0)?;
        write_out(out, Box::into_raw(Box::new(NzebScenario(s))), "out")
    })
}

/// Canonical JSON for the scenario. Release the string with `nzeb_string_free`.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_scenario_to_json(scenario: *const NzebScenario, out: *mut *mut c_char) -> NzebStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let json = CString::new(s.0.to_json()).map_err(|e| Failure(NzebStatus::Domain, e.to_string()))?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_out(out, json.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nzeb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a cost trajectory CSV.
///
/// # Safety
/// `csv` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_cost_table_from_csv(csv: *const c_char, out: *mut *mut NzebCostTable) -> NzebStatus {
    guard(|| {
        let text = read_str(csv, "csv")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let t = load_cost_table(text)?;
        write_out(out, Box::into_raw(Box::new(NzebCostTable(t))), "out")
    })
}

/// # Safety
/// `table` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nzeb_cost_table_free(table: *mut NzebCostTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Levelized real monthly savings for one install year.
///
/// # Safety
/// Handles must be live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_monthly_savings(
    scenario: *const NzebScenario,
    costs: *const NzebCostTable,
    install_year: i32,
    out: *mut f64,
) -> NzebStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let t = borrow(costs, "costs")?;
        let p = nzeb::monthly_savings(&s.0, install_year, &t.0, "")?;
        write_out(out, p.monthly_savings_usd, "out")
    })
}

/// Lifetime system cost per kWh of PV output for one install year.
///
/// # Safety
/// Handles must be live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_scenario_lcoe(
    scenario: *const NzebScenario,
    costs: *const NzebCostTable,
    install_year: i32,
    out: *mut f64,
) -> NzebStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let t = borrow(costs, "costs")?;
        write_out(out, nzeb::scenario_lcoe(&s.0, install_year, &t.0)?, "out")
    })
}

/// First install year in `[from, to]` with non-negative savings. `*found` is
/// false and `*year` untouched when savings stay negative throughout.
///
/// # Safety
/// Handles must be live; `year` and `found` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_crossover_year(
    scenario: *const NzebScenario,
    costs: *const NzebCostTable,
    from: i32,
    to: i32,
    year: *mut i32,
    found: *mut bool,
) -> NzebStatus {
    guard(|| {
        let s = borrow(scenario, "scenario")?;
        let t = borrow(costs, "costs")?;
        if year.is_null() || found.is_null() {
            return Err(null("year/found"));
        }
        let points = (from..=to)
            .map(|y| nzeb::monthly_savings(&s.0, y, &t.0, ""))
            .collect::<nzeb::Result<Vec<SavingsPoint>>>()?;
        match nzeb::crossover_year(&points)? {
            Some(y) => {
                year.write(y);
                found.write(true);
            }
            None => found.write(false),
        }
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn nzeb_real_rate(nominal: f64, inflation: f64) -> f64 {
    nzeb::real_rate(nominal, inflation)
}

#[no_mangle]
pub extern "C" fn nzeb_netzero_pv_kw(annual_kwh: f64, specific_yield: f64) -> f64 {
    nzeb::netzero_pv_kw(annual_kwh, specific_yield)
}

#[no_mangle]
pub extern "C" fn nzeb_monthly_grid_bill(annual_kwh: f64, price_usd_per_kwh: f64) -> f64 {
    nzeb::monthly_grid_bill(annual_kwh, price_usd_per_kwh)
}

#[no_mangle]
pub extern "C" fn nzeb_gas_equivalent(price_usd_per_kwh: f64, mpg: f64, ev_mi_per_kwh: f64) -> f64 {
    nzeb::gas_equivalent(price_usd_per_kwh, mpg, ev_mi_per_kwh)
}

#[no_mangle]
pub extern "C" fn nzeb_statewide_outflow(total_spend_usd: f64, import_share: f64) -> f64 {
    nzeb::statewide_outflow(total_spend_usd, import_share)
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_ev_efficiency(range_mi: f64, battery_kwh: f64, out: *mut f64) -> NzebStatus {
    guard(|| write_out(out, nzeb::ev_efficiency(range_mi, battery_kwh)?, "out"))
}

/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_driving_savings(
    annual_mi: f64,
    mpg: f64,
    gas_usd_per_gal: f64,
    ev_mi_per_kwh: f64,
    elec_usd_per_kwh: f64,
    out: *mut NzebDrivingSavings,
) -> NzebStatus {
    guard(|| {
        let d = nzeb::driving_savings(annual_mi, mpg, gas_usd_per_gal, ev_mi_per_kwh, elec_usd_per_kwh);
        let d = NzebDrivingSavings {
            gas_cost_yr: d.gas_cost_yr,
            ev_cost_yr: d.ev_cost_yr,
            savings_yr: d.savings_yr,
            savings_month: d.savings_month,
        };
        write_out(out, d, "out")
    })
}

/// LCOE of `len` yearly costs and energies over the first `service_yr` years.
///
/// # Safety
/// `costs` and `energy` must each point to `len` readable doubles; `out` must
/// be null or writable.
#[no_mangle]
pub unsafe extern "C" fn nzeb_lcoe(
    costs: *const f64,
    energy: *const f64,
    len: usize,
    real_discount: f64,
    service_yr: u32,
    out: *mut f64,
) -> NzebStatus {
    guard(|| {
        if costs.is_null() || energy.is_null() {
            return Err(null("costs/energy"));
        }
        let c = std::slice::from_raw_parts(costs, len);
        let e = std::slice::from_raw_parts(energy, len);
        write_out(out, nzeb::lcoe(c, e, real_discount, service_yr)?, "out")
    })
}
