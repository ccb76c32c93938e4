#ifndef NZEB_H
#define NZEB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum NzebStatus {
  NZEB_STATUS_OK = 0,
  NZEB_STATUS_NULL_POINTER = 1,
  NZEB_STATUS_INVALID_UTF8 = 2,
  NZEB_STATUS_MALFORMED_CONFIG = 3,
  NZEB_STATUS_INVALID_SCENARIO = 4,
  NZEB_STATUS_COST_TABLE = 5,
  NZEB_STATUS_DOMAIN = 6,
  NZEB_STATUS_UNKNOWN_VARIANT = 7,
  NZEB_STATUS_PANIC = 8,
} NzebStatus;

/**
 * Opaque cost table handle.
 */
typedef struct NzebCostTable NzebCostTable;

/**
 * Opaque scenario handle.
 */
typedef struct NzebScenario NzebScenario;

typedef struct NzebDrivingSavings {
  double gas_cost_yr;
  double ev_cost_yr;
  double savings_yr;
  double savings_month;
} NzebDrivingSavings;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer stays
 * valid until the next `nzeb_*` call on the same thread.
 */
const char *nzeb_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nzeb_version(void);

/**
 * Parses and validates a scenario JSON document.
 *
 * # Safety
 * `json` must be null or a NUL-terminated string; `out` must be null or
 * writable.
 */
enum NzebStatus nzeb_scenario_from_json(const char *json, struct NzebScenario **out);

/**
 * Scenario with every field at its reference value.
 */
struct NzebScenario *nzeb_scenario_reference(void);

/**
 * # Safety
 * `scenario` must be null or a handle from this library that has not been freed.
 */
void nzeb_scenario_free(struct NzebScenario *scenario);

/**
 * New scenario with a variant label such as `itc` or `storage-50+no-itc`
 * applied to `base`.
 *
 * # Safety
 * Pointer arguments must be null or valid as described for the other calls.
 */
enum NzebStatus nzeb_scenario_apply_variant(const struct NzebScenario *base,
                                            const char *label,
                                            struct NzebScenario **out);

/**
 * Canonical JSON for the scenario. Release the string with `nzeb_string_free`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be null or writable.
 */
enum NzebStatus nzeb_scenario_to_json(const struct NzebScenario *scenario, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library that has not been freed.
 */
void nzeb_string_free(char *s);

/**
 * Parses a cost trajectory CSV.
 *
 * # Safety
 * `csv` must be null or a NUL-terminated string; `out` must be null or writable.
 */
enum NzebStatus nzeb_cost_table_from_csv(const char *csv, struct NzebCostTable **out);

/**
 * # Safety
 * `table` must be null or a handle from this library that has not been freed.
 */
void nzeb_cost_table_free(struct NzebCostTable *table);

/**
 * Levelized real monthly savings for one install year.
 *
 * # Safety
 * Handles must be live; `out` must be null or writable.
 */
enum NzebStatus nzeb_monthly_savings(const struct NzebScenario *scenario,
                                     const struct NzebCostTable *costs,
                                     int32_t install_year,
                                     double *out);

/**
 * Lifetime system cost per kWh of PV output for one install year.
 *
 * # Safety
 * Handles must be live; `out` must be null or writable.
 */
enum NzebStatus nzeb_scenario_lcoe(const struct NzebScenario *scenario,
                                   const struct NzebCostTable *costs,
                                   int32_t install_year,
                                   double *out);

/**
 * First install year in `[from, to]` with non-negative savings. `*found` is
 * false and `*year` untouched when savings stay negative throughout.
 *
 * # Safety
 * Handles must be live; `year` and `found` must be null or writable.
 */
enum NzebStatus nzeb_crossover_year(const struct NzebScenario *scenario,
                                    const struct NzebCostTable *costs,
                                    int32_t from,
                                    int32_t to,
                                    int32_t *year,
                                    bool *found);

double nzeb_real_rate(double nominal, double inflation);

double nzeb_netzero_pv_kw(double annual_kwh, double specific_yield);

double nzeb_monthly_grid_bill(double annual_kwh, double price_usd_per_kwh);

double nzeb_gas_equivalent(double price_usd_per_kwh, double mpg, double ev_mi_per_kwh);

double nzeb_statewide_outflow(double total_spend_usd, double import_share);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum NzebStatus nzeb_ev_efficiency(double range_mi, double battery_kwh, double *out);

/**
 * # Safety
 * `out` must be null or writable.
 */
enum NzebStatus nzeb_driving_savings(double annual_mi,
                                     double mpg,
                                     double gas_usd_per_gal,
                                     double ev_mi_per_kwh,
                                     double elec_usd_per_kwh,
                                     struct NzebDrivingSavings *out);

/**
 * LCOE of `len` yearly costs and energies over the first `service_yr` years.
 *
 * # Safety
 * `costs` and `energy` must each point to `len` readable doubles; `out` must
 * be null or writable.
 */
enum NzebStatus nzeb_lcoe(const double *costs,
                          const double *energy,
                          size_t len,
                          double real_discount,
                          uint32_t service_yr,
                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NZEB_H */
