#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "nzeb.h"

#define CHECK(cond)                                                   \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                       \
    }                                                                 \
  } while (0)

static const char *COSTS =
    "year,pv_capex_usd_per_w,battery_capex_usd_per_kwh,fixed_om_usd_per_kw_yr\n"
    "2020,2.761,481.0,20.0\n"
    "2025,2.071,264.6,18.0\n"
    "2030,1.657,192.4,16.0\n"
    "2035,1.436,163.5,15.0\n"
    "2040,1.270,144.3,14.0\n"
    "2045,1.160,134.7,13.0\n"
    "2050,1.104,125.1,12.0\n";

int main(void) {
  CHECK(fabs(nzeb_real_rate(0.045, 0.025) - 0.01951) < 1e-4);
  CHECK(nzeb_netzero_pv_kw(13300.0, 1400.0) == 9.5);

  NzebCostTable *costs = NULL;
  CHECK(nzeb_cost_table_from_csv(COSTS, &costs) == NZEB_STATUS_OK);

  NzebScenario *base = nzeb_scenario_reference();
  NzebScenario *itc = NULL;
  CHECK(nzeb_scenario_apply_variant(base, "itc", &itc) == NZEB_STATUS_OK);

  double savings = 0.0;
  CHECK(nzeb_monthly_savings(itc, costs, 2020, &savings) == NZEB_STATUS_OK);
  CHECK(fabs(savings + 65.0) < 0.01);

  int32_t year = 0;
  bool found = false;
  CHECK(nzeb_crossover_year(itc, costs, 2020, 2050, &year, &found) == NZEB_STATUS_OK);
  CHECK(found && year == 2029);

  NzebScenario *bad = NULL;
  CHECK(nzeb_scenario_apply_variant(base, "turbo", &bad) == NZEB_STATUS_UNKNOWN_VARIANT);
  CHECK(bad == NULL);
  CHECK(strstr(nzeb_last_error(), "turbo") != NULL);

  char *json = NULL;
  CHECK(nzeb_scenario_to_json(itc, &json) == NZEB_STATUS_OK);
  NzebScenario *copy = NULL;
  CHECK(nzeb_scenario_from_json(json, &copy) == NZEB_STATUS_OK);
  nzeb_string_free(json);

  NzebDrivingSavings d;
  CHECK(nzeb_driving_savings(10000.0, 24.2, 3.16, 3.2023, 0.040, &d) == NZEB_STATUS_OK);
  CHECK(fabs(d.savings_month - 98.40) < 0.10);

  nzeb_scenario_free(copy);
  nzeb_scenario_free(itc);
  nzeb_scenario_free(base);
  nzeb_cost_table_free(costs);
  printf("ok %s\n", nzeb_version());
  return 0;
}
