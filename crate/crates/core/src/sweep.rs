//! Install-year sweeps over scenario variants, CSV emission and the per-year
//! cash-flow report behind `nzeb --explain`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::costs::{load_cost_table, CostTrajectory};
use crate::error::{Error, Result};
use crate::finance::{baseline_series, cashflow_series, ReplacementKind};
use crate::metrics::{crossover_year, gas_equivalent, monthly_savings, scenario_lcoe, SavingsPoint};
use crate::scenario::{defaults, load_scenario, validate, Scenario};

pub const SAVINGS_HEADER: &str = "install_year,scenario_label,monthly_savings_usd";
pub const LCOE_HEADER: &str = "install_year,scenario_label,lcoe_usd_per_kwh,gas_equiv_usd_per_gal";
pub const CROSSOVER_HEADER: &str = "scenario_label,crossover_year";

/// One modification of the loaded scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modifier {
    /// Scenario as loaded.
    Base,
    Itc,
    NoItc,
    /// Storage at this percentage of the reference battery.
    Storage(u32),
    /// Reference efficiency improvement with PV and battery resized to match.
    Improved,
}

impl Modifier {
    fn parse(token: &str) -> Option<Self> {
        match token {
            "base" => Some(Modifier::Base),
            "itc" => Some(Modifier::Itc),
            "no-itc" => Some(Modifier::NoItc),
            "improved" => Some(Modifier::Improved),
            _ => {
                let pct: u32 = token.strip_prefix("storage-")?.parse().ok()?;
                (pct <= 100).then_some(Modifier::Storage(pct))
            }
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Modifier::Base => 0,
            Modifier::Improved => 1,
            Modifier::Storage(_) => 2,
            Modifier::Itc | Modifier::NoItc => 3,
        }
    }
}

/// A labelled scenario variant such as `itc`, `no-itc` or `storage-50+itc`.
/// Modifiers joined by `+` apply in a fixed order: improvement, storage, ITC.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    modifiers: Vec<Modifier>,
}

impl Variant {
    pub fn parse(label: &str) -> Result<Self> {
        let label = label.trim();
        if label.is_empty() {
            return Err(Error::UnknownVariant(label.to_string()));
        }
        let mut modifiers = label
            .split('+')
            .map(|t| Modifier::parse(t.trim()).ok_or_else(|| Error::UnknownVariant(label.to_string())))
            .collect::<Result<Vec<_>>>()?;
        modifiers.sort_by_key(Modifier::rank);
        Ok(Self {
            label: label.to_string(),
            modifiers,
        })
    }

    pub fn parse_list(list: &[String]) -> Result<Vec<Self>> {
        let mut out: Vec<Self> = Vec::new();
        for label in list {
            let v = Self::parse(label)?;
            if !out.iter().any(|o| o.label == v.label) {
                out.push(v);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, base: &Scenario) -> Result<Scenario> {
        let mut s = base.clone();
        for m in &self.modifiers {
            match *m {
                Modifier::Base => {}
                Modifier::Itc => s.flags.itc_enabled = true,
                Modifier::NoItc => s.flags.itc_enabled = false,
                Modifier::Storage(pct) => {
                    let f = f64::from(pct) / 100.0;
                    s.system.storage_fraction = f;
                    if s.system.v2h.is_none() {
                        s.system.battery_nameplate_kwh =
                            s.system.reference_battery_kwh * (1.0 - s.flags.improvement_fraction) * f;
                    }
                }
                Modifier::Improved => {
                    if s.flags.improvement_fraction == 0.0 {
                        let scale = 1.0 - defaults::EFFICIENCY_IMPROVEMENT;
                        let ev_pv = s.ev_load_kwh() / s.home.specific_yield_kwh_per_kw;
                        s.system.pv_kw = (s.system.pv_kw - ev_pv).max(0.0) * scale + ev_pv;
                        s.system.battery_nameplate_kwh *= scale;
                        s.flags.improvement_fraction = defaults::EFFICIENCY_IMPROVEMENT;
                    }
                }
            }
        }
        let violations = validate(&s);
        if violations.is_empty() {
            Ok(s)
        } else {
            Err(Error::InvalidScenario(violations))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Long-format result tables.
    Csv,
    /// Wide tables, one column per scenario label, for column charts.
    PlotData,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "plotdata" => Ok(OutputFormat::PlotData),
            other => Err(format!("unknown output format `{other}` (expected csv or plotdata)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub scenario_path: PathBuf,
    pub costs_path: PathBuf,
    pub start_year: i32,
    pub end_year: i32,
    pub out_dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
    pub variants: Vec<String>,
    pub explain_year: Option<i32>,
}

impl SweepRequest {
    pub fn check(&self) -> Result<()> {
        if self.start_year > self.end_year {
            return Err(Error::domain(format!(
                "start year {} is after end year {}",
                self.start_year, self.end_year
            )));
        }
        if self.scenario_path.as_os_str().is_empty() || self.costs_path.as_os_str().is_empty() {
            return Err(Error::domain("scenario and cost table paths must be non-empty"));
        }
        if matches!(&self.out_dir, Some(p) if p.as_os_str().is_empty()) {
            return Err(Error::domain("output directory must be non-empty"));
        }
        if self.variants.is_empty() {
            return Err(Error::domain("at least one scenario variant is required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcoeRow {
    pub install_year: i32,
    pub scenario_label: String,
    /// `None` when the variant has no PV output to levelize over.
    pub lcoe_usd_per_kwh: Option<f64>,
    pub gas_equiv_usd_per_gal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverRow {
    pub scenario_label: String,
    pub crossover_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTables {
    pub savings: Vec<SavingsPoint>,
    pub lcoe: Vec<LcoeRow>,
    pub crossovers: Vec<CrossoverRow>,
    pub warnings: Vec<String>,
}

struct YearResult {
    savings: SavingsPoint,
    lcoe: LcoeRow,
    warnings: Vec<String>,
}

fn evaluate(s: &Scenario, label: &str, year: i32, costs: &CostTrajectory) -> Result<YearResult> {
    let savings = monthly_savings(s, year, costs, label)?;
    let warnings = cashflow_series(s, year, costs)?.warnings;
    let lcoe = if s.system.pv_kw > 0.0 {
        Some(scenario_lcoe(s, year, costs)?)
    } else {
        None
    };
    let gas = lcoe.map(|p| gas_equivalent(p, s.tariff.gasoline_mpg, s.ev_mi_per_kwh()));
    Ok(YearResult {
        savings,
        lcoe: LcoeRow {
            install_year: year,
            scenario_label: label.to_string(),
            lcoe_usd_per_kwh: lcoe,
            gas_equiv_usd_per_gal: gas,
        },
        warnings,
    })
}

/// Evaluates every (variant, install year) pair. Rows come back sorted by label
/// then year regardless of `parallel`.
pub fn compute_sweep(
    base: &Scenario,
    costs: &CostTrajectory,
    start_year: i32,
    end_year: i32,
    variants: &[Variant],
    parallel: bool,
) -> Result<SweepTables> {
    let scenarios = variants
        .iter()
        .map(|v| v.apply(base).map(|s| (v.label.as_str(), s)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&str, &Scenario, i32)> = scenarios
        .iter()
        .flat_map(|(label, s)| (start_year..=end_year).map(move |y| (*label, s, y)))
        .collect();

    let results: Vec<YearResult> = if parallel {
        jobs.par_iter()
            .map(|(label, s, y)| evaluate(s, label, *y, costs))
            .collect::<Result<_>>()?
    } else {
        jobs.iter()
            .map(|(label, s, y)| evaluate(s, label, *y, costs))
            .collect::<Result<_>>()?
    };

    let mut savings = Vec::with_capacity(results.len());
    let mut lcoe = Vec::with_capacity(results.len());
    let mut warnings: Vec<String> = Vec::new();
    for r in results {
        savings.push(r.savings);
        lcoe.push(r.lcoe);
        for w in r.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    savings.sort_by(|a, b| (&a.scenario_label, a.install_year).cmp(&(&b.scenario_label, b.install_year)));
    lcoe.sort_by(|a, b| (&a.scenario_label, a.install_year).cmp(&(&b.scenario_label, b.install_year)));
    warnings.sort();

    let mut labels: Vec<&str> = variants.iter().map(|v| v.label.as_str()).collect();
    labels.sort_unstable();
    let crossovers = labels
        .iter()
        .map(|label| {
            let points: Vec<SavingsPoint> = savings.iter().filter(|p| p.scenario_label == *label).cloned().collect();
            Ok(CrossoverRow {
                scenario_label: label.to_string(),
                crossover_year: crossover_year(&points)?,
            })
        })
        .collect::<Result<_>>()?;

    Ok(SweepTables {
        savings,
        lcoe,
        crossovers,
        warnings,
    })
}

/// Fixed-point formatting without a negative zero.
pub fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "NA".to_string(), |x| fmt_fixed(x, decimals))
}

impl SweepTables {
    pub fn savings_csv(&self) -> String {
        let mut out = format!("{SAVINGS_HEADER}\n");
        for p in &self.savings {
            let _ = writeln!(
                out,
                "{},{},{}",
                p.install_year,
                p.scenario_label,
                fmt_fixed(p.monthly_savings_usd, 2)
            );
        }
        out
    }

    pub fn lcoe_csv(&self) -> String {
        let mut out = format!("{LCOE_HEADER}\n");
        for r in &self.lcoe {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.install_year,
                r.scenario_label,
                fmt_opt(r.lcoe_usd_per_kwh, 4),
                fmt_opt(r.gas_equiv_usd_per_gal, 2)
            );
        }
        out
    }

    pub fn crossover_csv(&self) -> String {
        let mut out = format!("{CROSSOVER_HEADER}\n");
        for r in &self.crossovers {
            let year = r.crossover_year.map_or_else(|| "none".to_string(), |y| y.to_string());
            let _ = writeln!(out, "{},{}", r.scenario_label, year);
        }
        out
    }

    fn labels(&self) -> Vec<&str> {
        self.crossovers.iter().map(|r| r.scenario_label.as_str()).collect()
    }

    fn years(&self) -> Vec<i32> {
        let mut years: Vec<i32> = self.savings.iter().map(|p| p.install_year).collect();
        years.sort_unstable();
        years.dedup();
        years
    }

    fn wide<F: Fn(i32, &str) -> String>(&self, cell: F) -> String {
        let labels = self.labels();
        let mut out = String::from("install_year");
        for l in &labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for y in self.years() {
            out.push_str(&y.to_string());
            for l in &labels {
                out.push(',');
                out.push_str(&cell(y, l));
            }
            out.push('\n');
        }
        out
    }

    /// Savings by year, one column per label.
    pub fn savings_plot_csv(&self) -> String {
        self.wide(|y, l| {
            self.savings
                .iter()
                .find(|p| p.install_year == y && p.scenario_label == l)
                .map_or_else(|| "NA".into(), |p| fmt_fixed(p.monthly_savings_usd, 2))
        })
    }

    pub fn lcoe_plot_csv(&self) -> String {
        self.wide(|y, l| {
            self.lcoe
                .iter()
                .find(|r| r.install_year == y && r.scenario_label == l)
                .map_or_else(|| "NA".into(), |r| fmt_opt(r.lcoe_usd_per_kwh, 4))
        })
    }

    /// File name and content of every output for the requested formats.
    pub fn render(&self, formats: &[OutputFormat]) -> Vec<(&'static str, String)> {
        let mut files = Vec::new();
        if formats.contains(&OutputFormat::Csv) {
            files.push(("savings.csv", self.savings_csv()));
            files.push(("lcoe.csv", self.lcoe_csv()));
            files.push(("crossover.csv", self.crossover_csv()));
        }
        if formats.contains(&OutputFormat::PlotData) {
            files.push(("savings_plot.csv", self.savings_plot_csv()));
            files.push(("lcoe_plot.csv", self.lcoe_plot_csv()));
        }
        files
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{0}")]
    Input(#[from] Error),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl SweepError {
    /// 1 for bad configuration or cost data, 2 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Input(_) => 1,
            SweepError::Output { .. } => 2,
        }
    }
}

/// Writes `files` into `dir`. On any failure, files already written by this
/// call are removed.
pub fn write_outputs(dir: &Path, files: &[(&str, String)]) -> std::result::Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(dir).map_err(|source| SweepError::Output {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        if let Err(source) = fs::write(&path, content) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            let _ = fs::remove_file(&path);
            return Err(SweepError::Output { path, source });
        }
        written.push(path);
    }
    Ok(written)
}

struct Inputs {
    scenario: Scenario,
    costs: CostTrajectory,
    variants: Vec<Variant>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))
}

fn load_inputs(req: &SweepRequest) -> Result<Inputs> {
    req.check()?;
    let scenario = load_scenario(&read_text(&req.scenario_path)?)?;
    let costs = load_cost_table(&read_text(&req.costs_path)?)?;
    let variants = Variant::parse_list(&req.variants)?;
    Ok(Inputs {
        scenario,
        costs,
        variants,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub files: Vec<PathBuf>,
    pub tables: SweepTables,
}

/// Loads inputs, sweeps install years and writes the requested outputs.
pub fn run_sweep(req: &SweepRequest) -> std::result::Result<SweepSummary, SweepError> {
    let inputs = load_inputs(req)?;
    let out_dir = req
        .out_dir
        .as_ref()
        .ok_or_else(|| Error::domain("an output directory is required for a sweep"))?;
    let tables = compute_sweep(
        &inputs.scenario,
        &inputs.costs,
        req.start_year,
        req.end_year,
        &inputs.variants,
        true,
    )?;
    let files = write_outputs(out_dir, &tables.render(&req.formats))?;
    Ok(SweepSummary { files, tables })
}

/// Per-year cash-flow breakdown for the explain year (or the start year) of
/// every requested variant.
pub fn explain_run(req: &SweepRequest) -> std::result::Result<String, SweepError> {
    let inputs = load_inputs(req)?;
    let year = req.explain_year.unwrap_or(req.start_year);
    let mut out = String::new();
    for v in &inputs.variants {
        let s = v.apply(&inputs.scenario)?;
        out.push_str(&explain(&s, &v.label, year, &inputs.costs)?);
        out.push('\n');
    }
    Ok(out)
}

const REPORT_COLUMNS: [&str; 9] = [
    "capital",
    "loan",
    "tax_shield",
    "replacement",
    "o&m",
    "grid",
    "export",
    "gasoline",
    "net",
];

/// Text report of one scenario's cash flows.
pub fn explain(s: &Scenario, label: &str, install_year: i32, costs: &CostTrajectory) -> Result<String> {
    let series = cashflow_series(s, install_year, costs)?;
    let rate = s.finance.real_discount_rate();
    let service = s.finance.service_time_yr;
    let mut out = String::new();
    let _ = writeln!(out, "== {label}: install year {install_year} (real 2020 USD) ==");
    let _ = writeln!(
        out,
        "system: {} kW PV, {}, storage {}%, ITC {}",
        fmt_fixed(s.system.pv_kw, 2),
        match &s.system.v2h {
            Some(v) => format!("V2H with {} kWh EV", fmt_fixed(v.ev_battery_kwh, 1)),
            None => format!("{} kWh wall battery", fmt_fixed(s.system.battery_nameplate_kwh, 2)),
        },
        fmt_fixed(s.system.storage_fraction * 100.0, 0),
        if s.flags.itc_enabled { "on" } else { "off" }
    );
    for w in &series.warnings {
        let _ = writeln!(out, "warning: {w}");
    }

    let c = &series.capital;
    if c.gross_usd > 0.0 {
        let _ = writeln!(out, "capital:");
        if c.pv_usd > 0.0 {
            let _ = writeln!(out, "  PV array                 {:>12}", fmt_fixed(c.pv_usd, 2));
        }
        if c.wall_battery_usd > 0.0 {
            let _ = writeln!(
                out,
                "  wall battery             {:>12}",
                fmt_fixed(c.wall_battery_usd, 2)
            );
        }
        if c.charger_usd > 0.0 {
            let _ = writeln!(out, "  bidirectional charger    {:>12}", fmt_fixed(c.charger_usd, 2));
        }
        if c.itc_usd > 0.0 {
            let _ = writeln!(out, "  ITC credit               {:>12}", fmt_fixed(-c.itc_usd, 2));
        }
        let _ = writeln!(out, "  net capital              {:>12}", fmt_fixed(c.net_usd, 2));
        let _ = writeln!(
            out,
            "  down payment             {:>12}",
            fmt_fixed(c.down_payment_usd, 2)
        );
        if c.loan_principal_usd > 0.0 {
            let _ = writeln!(
                out,
                "  loan {} at {}% over {} yr, nominal payment {}/yr",
                fmt_fixed(c.loan_principal_usd, 2),
                fmt_fixed(s.finance.loan_rate * 100.0, 2),
                s.finance.loan_term_yr,
                fmt_fixed(c.loan_payment_usd, 2)
            );
        }
    }
    if !series.replacements.is_empty() {
        let _ = writeln!(out, "replacements:");
        for r in &series.replacements {
            let kind = match r.kind {
                ReplacementKind::Battery => "battery",
                ReplacementKind::Inverter => "inverter",
            };
            let _ = writeln!(
                out,
                "  {kind} at offset {} ({}): {}",
                r.year_offset,
                install_year + r.year_offset as i32,
                fmt_fixed(r.cost_usd, 2)
            );
        }
    }

    let values = |y: &crate::finance::CashflowYear| -> [f64; 9] {
        [
            -y.capital_out,
            -y.loan_payment,
            y.interest_tax_shield,
            -y.replacement_out,
            -y.om_out,
            -y.grid_purchase,
            y.export_credit,
            y.gasoline_offset,
            y.net(),
        ]
    };
    // Only columns with any activity are shown; `net` always is.
    let shown: Vec<usize> = (0..REPORT_COLUMNS.len())
        .filter(|&i| i == REPORT_COLUMNS.len() - 1 || series.years.iter().any(|y| values(y)[i] != 0.0))
        .collect();
    let _ = write!(out, "{:>4} {:>6}", "t", "year");
    for &i in &shown {
        let _ = write!(out, " {:>12}", REPORT_COLUMNS[i]);
    }
    out.push('\n');
    for y in &series.years {
        let v = values(y);
        let _ = write!(out, "{:>4} {:>6}", y.year_offset, y.calendar_year);
        for &i in &shown {
            let _ = write!(out, " {:>12}", fmt_fixed(v[i], 2));
        }
        out.push('\n');
    }

    let system = series.levelized_monthly(rate, service)?;
    let baseline = baseline_series(s, install_year).levelized_monthly(rate, service)?;
    let _ = writeln!(
        out,
        "NPV over {} yr at {}% real: {}",
        s.finance.analysis_period_yr,
        fmt_fixed(rate * 100.0, 4),
        fmt_fixed(series.npv(rate), 2)
    );
    let _ = writeln!(
        out,
        "levelized monthly cost with system ({service} yr): {}",
        fmt_fixed(-system, 2)
    );
    let _ = writeln!(out, "levelized monthly grid-only bill: {}", fmt_fixed(-baseline, 2));
    let _ = writeln!(out, "monthly savings: {}", fmt_fixed(system - baseline, 2));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_parsing() {
        assert!(Variant::parse("storage-50+itc").is_ok());
        assert!(Variant::parse("itc+improved").is_ok());
        assert!(matches!(Variant::parse("storage-150"), Err(Error::UnknownVariant(_))));
        assert!(matches!(Variant::parse("solar"), Err(Error::UnknownVariant(_))));
        assert!(Variant::parse("").is_err());
        let list = Variant::parse_list(&["itc".into(), "itc".into(), "no-itc".into()]).unwrap();
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn variant_application() {
        let base = Scenario::reference();
        let s = Variant::parse("storage-50+no-itc").unwrap().apply(&base).unwrap();
        assert_eq!(s.system.storage_fraction, 0.5);
        assert_eq!(s.system.battery_nameplate_kwh, 21.105);
        assert!(!s.flags.itc_enabled);
        // Improvement applies before storage regardless of label order.
        let s = Variant::parse("storage-100+improved").unwrap().apply(&base).unwrap();
        assert!((s.system.pv_kw - 6.4885).abs() < 1e-9);
        assert!((s.system.battery_nameplate_kwh - 42.21 * 0.683).abs() < 1e-9);
    }

    #[test]
    fn negative_zero_is_suppressed() {
        assert_eq!(fmt_fixed(-0.001, 2), "0.00");
        assert_eq!(fmt_fixed(-0.006, 2), "-0.01");
        assert_eq!(fmt_fixed(1.5, 4), "1.5000");
    }

    #[test]
    fn request_checks() {
        let mut req = SweepRequest {
            scenario_path: "a.json".into(),
            costs_path: "b.csv".into(),
            start_year: 2030,
            end_year: 2020,
            out_dir: Some("out".into()),
            formats: vec![OutputFormat::Csv],
            variants: vec!["itc".into()],
            explain_year: None,
        };
        assert!(req.check().is_err());
        req.end_year = 2050;
        assert!(req.check().is_ok());
        req.costs_path = PathBuf::new();
        assert!(req.check().is_err());
    }
}
