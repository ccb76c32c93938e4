use nzeb::costs::{CostComponent, CostRow, CostTrajectory};
use nzeb::finance::{amortization_schedule, cashflow_series, npv, real_rate};
use nzeb::metrics::{crossover_year, gas_equivalent, lcoe, monthly_grid_bill, monthly_savings, SavingsPoint};
use nzeb::production::{age_at, pv_energy_year, replacement_years};
use nzeb::scenario::{load_scenario, validate, Scenario, V2hSpec};
use nzeb::sizing::{apply_efficiency_improvement, netzero_pv_kw};
use proptest::prelude::*;

fn declining_costs() -> impl Strategy<Value = CostTrajectory> {
    (
        1.0f64..4.0,
        200.0f64..900.0,
        5.0f64..30.0,
        prop::collection::vec((0.0f64..0.3, 0.0f64..0.3), 2..8),
    )
        .prop_map(|(pv, batt, om, steps)| {
            let mut rows = vec![CostRow {
                year: 2020,
                pv_capex_usd_per_w: pv,
                battery_capex_usd_per_kwh: batt,
                fixed_om_usd_per_kw_yr: om,
            }];
            for (i, (dp, db)) in steps.into_iter().enumerate() {
                let prev = rows[i];
                rows.push(CostRow {
                    year: prev.year + 5,
                    pv_capex_usd_per_w: prev.pv_capex_usd_per_w * (1.0 - dp),
                    battery_capex_usd_per_kwh: prev.battery_capex_usd_per_kwh * (1.0 - db),
                    fixed_om_usd_per_kw_yr: prev.fixed_om_usd_per_kw_yr * (1.0 - dp),
                });
            }
            CostTrajectory::from_rows(rows).unwrap()
        })
}

fn system_scenario() -> impl Strategy<Value = Scenario> {
    (
        3.0f64..15.0,
        prop_oneof![Just(0.0), Just(0.5), Just(1.0)],
        any::<bool>(),
        0.0f64..1.0,
    )
        .prop_map(|(pv, frac, v2h, daytime)| {
            let mut s = Scenario::reference();
            s.system.pv_kw = pv;
            s.system.storage_fraction = frac;
            s.home.daytime_load_fraction = daytime;
            if v2h {
                s.system.v2h = Some(V2hSpec::default());
                s.system.battery_nameplate_kwh = 0.0;
            } else {
                s.system.battery_nameplate_kwh = s.system.reference_battery_kwh * frac;
            }
            s
        })
}

proptest! {
    #[test]
    fn scenario_json_round_trip(pv in 0.0f64..20.0, frac in 0.0f64..=1.0, itc in any::<bool>(), miles in 0.0f64..20_000.0) {
        let mut s = Scenario::reference();
        s.system.pv_kw = pv;
        s.system.storage_fraction = frac;
        s.flags.itc_enabled = itc;
        s.flags.annual_ev_miles = miles;
        let back = load_scenario(&s.to_json()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn stated_fisher_rate_always_consistent(nominal in -0.05f64..0.2, inflation in -0.05f64..0.2) {
        let mut s = Scenario::reference();
        s.finance.nominal_discount = nominal;
        s.finance.inflation = inflation;
        s.finance.real_discount = Some(real_rate(nominal, inflation));
        prop_assert!(validate(&s).is_empty());
        prop_assert!((s.finance.real_discount_rate() - (1.0 + nominal) / (1.0 + inflation) + 1.0).abs() < 1e-6);
    }

    #[test]
    fn validation_is_total(vals in prop::collection::vec(prop_oneof![any::<f64>(), -1e6f64..1e6], 8), lives in prop::collection::vec(0u32..50, 4)) {
        let mut s = Scenario::reference();
        s.home.annual_consumption_kwh = vals[0];
        s.system.pv_kw = vals[1];
        s.system.storage_fraction = vals[2];
        s.system.battery_roundtrip_eff = vals[3];
        s.finance.nominal_discount = vals[4];
        s.finance.inflation = vals[5];
        s.flags.improvement_fraction = vals[6];
        s.flags.annual_ev_miles = vals[7];
        s.system.battery_life_yr = lives[0];
        s.finance.analysis_period_yr = lives[1];
        s.finance.service_time_yr = lives[2];
        s.finance.loan_term_yr = lives[3];
        let _ = validate(&s);
    }

    #[test]
    fn interpolation_monotone_and_exact_at_nodes(t in declining_costs(), probe in 2000i32..2080) {
        for r in t.rows() {
            prop_assert_eq!(t.capex_at(r.year, CostComponent::Pv), r.pv_capex_usd_per_w);
            prop_assert_eq!(t.capex_at(r.year, CostComponent::Battery), r.battery_capex_usd_per_kwh);
        }
        for c in [CostComponent::Pv, CostComponent::Battery, CostComponent::Om] {
            prop_assert!(t.capex_at(probe + 1, c) <= t.capex_at(probe, c) + 1e-12);
        }
    }

    #[test]
    fn pv_decay_strictly_decreasing(kw in 0.1f64..50.0, yield_ in 500.0f64..2500.0, d in 0.0001f64..0.5, t in 0u32..40) {
        prop_assert!(pv_energy_year(kw, yield_, d, t + 1) < pv_energy_year(kw, yield_, d, t));
    }

    #[test]
    fn pv_energy_additive(a in 0.0f64..20.0, b in 0.0f64..20.0, d in 0.0f64..0.05, t in 0u32..30) {
        let sum = pv_energy_year(a, 1400.0, d, t) + pv_energy_year(b, 1400.0, d, t);
        prop_assert!((pv_energy_year(a + b, 1400.0, d, t) - sum).abs() <= 1e-9 * sum.max(1.0));
    }

    #[test]
    fn replacements_keep_age_below_life(life in 1u32..40, period in 1u32..60) {
        let reps = replacement_years(life, period);
        for t in 0..period {
            let latest = reps.iter().copied().filter(|&r| r <= t).max().unwrap_or(0);
            prop_assert!(t - latest < life);
            prop_assert_eq!(t - latest, age_at(t, life));
        }
    }

    #[test]
    fn amortization_conserves_principal(principal in 0.0f64..1e6, rate in 0.0f64..0.15, term in 1u32..40) {
        let s = amortization_schedule(principal, rate, term).unwrap();
        let repaid: f64 = s.rows.iter().map(|r| r.principal).sum();
        prop_assert!((repaid - principal).abs() <= 0.01);
        prop_assert!(s.rows.last().unwrap().remaining_balance.abs() <= 0.01);
        for r in &s.rows {
            prop_assert!((r.interest + r.principal - r.payment).abs() <= 1e-9 * r.payment.max(1.0));
            prop_assert_eq!(r.payment, s.rows[0].payment);
        }
    }

    #[test]
    fn nominal_and_real_discounting_agree(s in system_scenario(), t in declining_costs(), year in 2020i32..2050) {
        let series = cashflow_series(&s, year, &t).unwrap();
        let real = npv(&series.net_flows(), s.finance.real_discount_rate());
        let nominal = npv(&series.nominal_net_flows(s.finance.inflation), s.finance.nominal_discount);
        prop_assert!((real - nominal).abs() <= 1e-9 * real.abs().max(1.0));
    }

    #[test]
    fn itc_always_helps(s in system_scenario(), t in declining_costs(), year in 2020i32..2050) {
        let mut on = s.clone();
        on.flags.itc_enabled = true;
        let mut off = s;
        off.flags.itc_enabled = false;
        let a = monthly_savings(&on, year, &t, "on").unwrap().monthly_savings_usd;
        let b = monthly_savings(&off, year, &t, "off").unwrap().monthly_savings_usd;
        prop_assert!(a > b);
    }

    #[test]
    fn zero_system_saves_nothing(t in declining_costs(), year in 2000i32..2080, price in 0.01f64..0.5, kwh in 1000.0f64..40_000.0) {
        let mut s = Scenario::reference();
        s.system.pv_kw = 0.0;
        s.system.battery_nameplate_kwh = 0.0;
        s.tariff.retail_price_usd_per_kwh = price;
        s.home.annual_consumption_kwh = kwh;
        let p = monthly_savings(&s, year, &t, "zero").unwrap();
        prop_assert!(p.monthly_savings_usd.abs() <= 1e-9 * monthly_grid_bill(kwh, price));
    }

    #[test]
    fn lcoe_homogeneous(costs in prop::collection::vec(0.0f64..1e4, 25), energy in prop::collection::vec(1.0f64..2e4, 25), k in 0.01f64..100.0, r in 0.0f64..0.1) {
        let base = lcoe(&costs, &energy, r, 25).unwrap();
        let scaled_c: Vec<f64> = costs.iter().map(|c| c * k).collect();
        let scaled_e: Vec<f64> = energy.iter().map(|e| e * k).collect();
        let tol = 1e-9 * base.abs().max(1e-12);
        prop_assert!((lcoe(&scaled_c, &energy, r, 25).unwrap() - k * base).abs() <= tol * k);
        prop_assert!((lcoe(&costs, &scaled_e, r, 25).unwrap() - base / k).abs() <= tol / k);
    }

    #[test]
    fn gas_equivalent_linear(p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let eff = 220.0 / 68.7;
        let lhs = gas_equivalent(p + q, 24.2, eff);
        prop_assert!((lhs - gas_equivalent(p, 24.2, eff) - gas_equivalent(q, 24.2, eff)).abs() < 1e-12);
    }

    #[test]
    fn crossover_stable_under_relabel_and_append(vals in prop::collection::vec(-100.0f64..100.0, 1..30), scale in 1i32..5, shift in -50i32..50, extra in prop::collection::vec(-100.0f64..100.0, 0..10)) {
        let pts = |v: &[f64], f: &dyn Fn(i32) -> i32| -> Vec<SavingsPoint> {
            v.iter().enumerate().map(|(i, x)| SavingsPoint { install_year: f(i as i32), monthly_savings_usd: *x, scenario_label: "p".into() }).collect()
        };
        let plain = crossover_year(&pts(&vals, &|i| 2020 + i)).unwrap();
        let relabeled = crossover_year(&pts(&vals, &|i| scale * (2020 + i) + shift)).unwrap();
        prop_assert_eq!(plain.map(|y| scale * y + shift), relabeled);
        if plain.is_some() {
            let mut longer = vals.clone();
            longer.extend(extra);
            prop_assert_eq!(crossover_year(&pts(&longer, &|i| 2020 + i)).unwrap(), plain);
        }
    }

    #[test]
    fn improvement_preserves_battery_pv_ratio(pv in 0.1f64..20.0, batt in 0.1f64..80.0, f in 0.0f64..0.99) {
        let mut spec = Scenario::reference().system;
        spec.pv_kw = pv;
        spec.battery_nameplate_kwh = batt;
        let out = apply_efficiency_improvement(&spec, f).unwrap();
        prop_assert!((out.battery_nameplate_kwh / out.pv_kw - batt / pv).abs() <= 1e-12 * (batt / pv));
    }

    #[test]
    fn netzero_round_trip(pv in 0.01f64..50.0, yield_ in 500.0f64..2500.0) {
        prop_assert!((netzero_pv_kw(pv * yield_, yield_) - pv).abs() <= 1e-12 * pv);
    }
}
