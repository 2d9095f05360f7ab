//! Report rendering and analysis series.
//!
//! Reports are views: every number is computed once into a
//! [`SystemAssessment`] and the renderers only format what is stored, so a
//! re-render is byte-identical. Series files are plain delimited text with a
//! single header row carrying the parameter name, unit, and column names.

use crate::config::{ResolutionRecord, ResolvedFlow};
use crate::flows::{self, FlowScenario, Placement, Preference};
use crate::power::Location;
use crate::quantity::Quantity;
use crate::workload::{intensity_table, ComponentIntensity, SystemHardware};
use crate::ModelError;

type Q = Quantity<f64>;

/// Formats a value with six significant digits, fixed decimal notation.
/// Deterministic and locale-independent.
pub fn format_significant(value: f64) -> String {
    const DIGITS: i32 = 6;
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = DIGITS - 1 - magnitude;
    if decimals >= 0 {
        format!("{value:.*}", decimals as usize)
    } else {
        let step = 10f64.powi(-decimals);
        format!("{:.0}", (value / step).round() * step)
    }
}

/// Everything a per-system report shows, computed once from the models.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemAssessment {
    pub name: String,
    pub mission_time: Q,
    pub technology_name: String,
    pub deployment: &'static str,
    pub launch_intensity: Q,
    pub reentry_intensity: Q,
    pub combined_intensity: Q,
    pub battery_energy_intensity: Q,
    pub solar_energy_intensity: Q,
    pub system_energy_intensity: Q,
    pub table: Vec<ComponentIntensity<f64>>,
    pub defaults: ResolutionRecord,
}

impl SystemAssessment {
    pub fn evaluate(
        name: impl Into<String>,
        hardware: &SystemHardware<f64>,
        defaults: ResolutionRecord,
    ) -> Self {
        let technology = &hardware.technology;
        let reentry = &hardware.reentry;
        Self {
            name: name.into(),
            mission_time: hardware.mission_time.clone(),
            technology_name: technology.name().to_string(),
            deployment: match hardware.solar.location() {
                Location::Earth => "Earth",
                Location::Orbit => "Orbit",
            },
            launch_intensity: technology
                .launch_intensity()
                .displayed_as("kgCO2e/kg")
                .expect("carbon per mass"),
            reentry_intensity: technology
                .reentry_intensity(reentry)
                .displayed_as("kgCO2e/kg")
                .expect("carbon per mass"),
            combined_intensity: technology
                .combined_intensity(reentry)
                .displayed_as("kgCO2e/kg")
                .expect("carbon per mass"),
            battery_energy_intensity: hardware.battery.energy_intensity(technology, reentry),
            solar_energy_intensity: hardware.solar.energy_intensity(
                technology,
                reentry,
                &hardware.mission_time,
            ),
            system_energy_intensity: hardware.energy_intensity(),
            table: intensity_table(hardware),
            defaults,
        }
    }
}

/// Renders one system's report as a markdown document.
pub fn render_report(assessment: &SystemAssessment) -> String {
    let mut out = String::new();
    out.push_str(&format!("# System Report: {}\n\n", assessment.name));

    out.push_str("| Parameter | Value |\n|---|---|\n");
    out.push_str(&format!("| Mission time | {} |\n", assessment.mission_time));
    out.push_str(&format!(
        "| Launch technology | {} |\n",
        assessment.technology_name
    ));
    out.push_str(&format!("| Deployment | {} |\n\n", assessment.deployment));

    out.push_str("## Launch & Re-Entry\n\n| Intensity | Value [kgCO2e/kg] |\n|---|---|\n");
    for (label, value) in [
        ("Launch", &assessment.launch_intensity),
        ("Re-entry", &assessment.reentry_intensity),
        ("Combined", &assessment.combined_intensity),
    ] {
        out.push_str(&format!(
            "| {label} | {} |\n",
            format_significant(value.value())
        ));
    }

    out.push_str("\n## Energy\n\n| Source | Intensity [gCO2e/kWh] |\n|---|---|\n");
    for (label, value) in [
        ("Battery", &assessment.battery_energy_intensity),
        ("Solar array", &assessment.solar_energy_intensity),
        ("Total", &assessment.system_energy_intensity),
    ] {
        out.push_str(&format!(
            "| {label} | {} |\n",
            format_significant(value.value())
        ));
    }

    out.push_str(
        "\n## Component Intensities\n\n\
         | Component | Unit | Idle (M) | Operational (O) | Full load (O+M) |\n\
         |---|---|---|---|---|\n",
    );
    for row in &assessment.table {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            row.component.name(),
            row.unit.label(),
            format_significant(row.split.embodied().value_in(&row.unit).unwrap()),
            format_significant(row.split.operational().value_in(&row.unit).unwrap()),
            format_significant(row.split.total().value_in(&row.unit).unwrap()),
        ));
    }

    out.push_str("\n## Resolved Defaults\n\n| Parameter | Value | Provenance |\n|---|---|---|\n");
    for entry in &assessment.defaults.entries {
        out.push_str(&format!(
            "| {} | {} | {} |\n",
            entry.field,
            entry.value,
            entry.provenance.as_str()
        ));
    }
    out
}

/// Renders several systems side by side.
pub fn render_comparison(assessments: &[SystemAssessment]) -> String {
    let names: Vec<&str> = assessments.iter().map(|a| a.name.as_str()).collect();
    let mut out = String::new();
    out.push_str(&format!("# System Comparison: {}\n\n", names.join(" vs ")));

    let header = |out: &mut String, first: &str| {
        out.push_str(&format!("| {first} |"));
        for name in &names {
            out.push_str(&format!(" {name} |"));
        }
        out.push('\n');
        out.push_str(&"|---".repeat(names.len() + 1));
        out.push_str("|\n");
    };

    header(&mut out, "Parameter");
    for (label, value_of) in [
        ("Mission time", 0usize),
        ("Launch technology", 1),
        ("Deployment", 2),
    ] {
        out.push_str(&format!("| {label} |"));
        for a in assessments {
            let value = match value_of {
                0 => a.mission_time.to_string(),
                1 => a.technology_name.clone(),
                _ => a.deployment.to_string(),
            };
            out.push_str(&format!(" {value} |"));
        }
        out.push('\n');
    }

    out.push_str("\n## Launch & Re-Entry [kgCO2e/kg]\n\n");
    header(&mut out, "Intensity");
    for (label, pick) in [("Launch", 0usize), ("Re-entry", 1), ("Combined", 2)] {
        out.push_str(&format!("| {label} |"));
        for a in assessments {
            let value = match pick {
                0 => &a.launch_intensity,
                1 => &a.reentry_intensity,
                _ => &a.combined_intensity,
            };
            out.push_str(&format!(" {} |", format_significant(value.value())));
        }
        out.push('\n');
    }

    out.push_str("\n## Energy [gCO2e/kWh]\n\n");
    header(&mut out, "Source");
    for (label, pick) in [("Battery", 0usize), ("Solar array", 1), ("Total", 2)] {
        out.push_str(&format!("| {label} |"));
        for a in assessments {
            let value = match pick {
                0 => &a.battery_energy_intensity,
                1 => &a.solar_energy_intensity,
                _ => &a.system_energy_intensity,
            };
            out.push_str(&format!(" {} |", format_significant(value.value())));
        }
        out.push('\n');
    }

    out.push_str("\n## Component Intensities\n\n");
    out.push_str("| Component | Unit | SCI |");
    for name in &names {
        out.push_str(&format!(" {name} |"));
    }
    out.push('\n');
    out.push_str(&"|---".repeat(names.len() + 3));
    out.push_str("|\n");
    if let Some(first) = assessments.first() {
        for (index, row) in first.table.iter().enumerate() {
            for (sci, total) in [("M", false), ("O+M", true)] {
                out.push_str(&format!(
                    "| {} | {} | {sci} |",
                    row.component.name(),
                    row.unit.label()
                ));
                for a in assessments {
                    let r = &a.table[index];
                    let value = if total {
                        r.split.total().value_in(&r.unit).unwrap()
                    } else {
                        r.split.embodied().value_in(&r.unit).unwrap()
                    };
                    out.push_str(&format!(" {} |", format_significant(value)));
                }
                out.push('\n');
            }
        }
    }
    out
}

/// Emits intensity tables as delimited text, one row per component and
/// system: component, unit, M, O, O+M, technology.
pub fn emit_table(assessments: &[SystemAssessment]) -> String {
    let mut out = String::from("component,unit,M,O,O+M,technology\n");
    for a in assessments {
        for row in &a.table {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.component.name(),
                row.unit.label(),
                format_significant(row.split.embodied().value_in(&row.unit).unwrap()),
                format_significant(row.split.operational().value_in(&row.unit).unwrap()),
                format_significant(row.split.total().value_in(&row.unit).unwrap()),
                a.technology_name,
            ));
        }
    }
    out
}

/// A swept parameter with one value column per system or placement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    parameter: String,
    parameter_unit: String,
    value_unit: String,
    samples: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
}

impl SweepSeries {
    pub fn new(
        parameter: impl Into<String>,
        parameter_unit: impl Into<String>,
        value_unit: impl Into<String>,
        samples: Vec<f64>,
        columns: Vec<(String, Vec<f64>)>,
    ) -> Result<Self, ModelError> {
        if !samples.windows(2).all(|w| w[0] < w[1]) {
            return Err(ModelError::invalid(
                "series",
                "sample points must be strictly increasing",
            ));
        }
        if columns
            .iter()
            .any(|(_, values)| values.len() != samples.len())
        {
            return Err(ModelError::invalid(
                "series",
                "columns must have one value per sample",
            ));
        }
        Ok(Self {
            parameter: parameter.into(),
            parameter_unit: parameter_unit.into(),
            value_unit: value_unit.into(),
            samples,
            columns,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, label: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(name, _)| name == label)
            .map(|(_, values)| values.as_slice())
    }

    /// Appends a constant reference-level column.
    pub fn push_level(&mut self, label: &str, value: f64) {
        self.columns
            .push((label.to_string(), vec![value; self.samples.len()]));
    }
}

/// Emits a series as delimited text: one header row with parameter name,
/// unit, and column names, then one row per sample. Newline-terminated.
pub fn emit_series(series: &SweepSeries) -> String {
    let mut out = format!("{}[{}]", series.parameter, series.parameter_unit);
    for (label, _) in &series.columns {
        out.push_str(&format!(",{label}[{}]", series.value_unit));
    }
    out.push('\n');
    for (index, sample) in series.samples.iter().enumerate() {
        out.push_str(&format_significant(*sample));
        for (_, values) in &series.columns {
            out.push(',');
            out.push_str(&format_significant(values[index]));
        }
        out.push('\n');
    }
    out
}

/// A validated mission-time sweep range in years.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    from_years: f64,
    to_years: f64,
    steps: usize,
}

impl SweepRange {
    pub const MAX_YEARS: f64 = 50.0;

    pub fn new(from_years: f64, to_years: f64, steps: usize) -> Result<Self, ModelError> {
        if !(from_years > 0.0 && to_years > from_years && to_years <= Self::MAX_YEARS) {
            return Err(ModelError::invalid(
                "sweep range",
                format!(
                    "bounds must satisfy 0 < from < to <= {}, got {from_years}..{to_years}",
                    Self::MAX_YEARS
                ),
            ));
        }
        if steps < 2 {
            return Err(ModelError::invalid("sweep range", "need at least 2 steps"));
        }
        Ok(Self {
            from_years,
            to_years,
            steps,
        })
    }

    pub fn samples(&self) -> Vec<f64> {
        let span = self.to_years - self.from_years;
        (0..self.steps)
            .map(|i| self.from_years + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// The mission-time sweep: energy, CPU, and DRAM intensity curves, one
/// column per system.
pub fn sweep_mission_time(
    systems: &[(String, SystemHardware<f64>)],
    range: &SweepRange,
) -> Result<[SweepSeries; 3], ModelError> {
    if systems.is_empty() {
        return Err(ModelError::invalid("sweep", "need at least one system"));
    }
    let samples = range.samples();
    let mut energy_columns = Vec::new();
    let mut cpu_columns = Vec::new();
    let mut dram_columns = Vec::new();
    for (label, hardware) in systems {
        let mut energy = Vec::with_capacity(samples.len());
        let mut cpu = Vec::with_capacity(samples.len());
        let mut dram = Vec::with_capacity(samples.len());
        for &years in &samples {
            let system = hardware.with_mission_time(Q::of(years, "yrs"));
            let table = intensity_table(&system);
            energy.push(
                system
                    .energy_intensity()
                    .value_as("gCO2e/kWh")
                    .expect("energy intensity"),
            );
            cpu.push(table[0].split.total().value_in(&table[0].unit).unwrap());
            dram.push(table[1].split.total().value_in(&table[1].unit).unwrap());
        }
        energy_columns.push((label.clone(), energy));
        cpu_columns.push((label.clone(), cpu));
        dram_columns.push((label.clone(), dram));
    }
    Ok([
        SweepSeries::new(
            "mission_time",
            "yrs",
            "gCO2e/kWh",
            samples.clone(),
            energy_columns,
        )?,
        SweepSeries::new(
            "mission_time",
            "yrs",
            "µgCO2e/s",
            samples.clone(),
            cpu_columns,
        )?,
        SweepSeries::new("mission_time", "yrs", "µgCO2e/GB/s", samples, dram_columns)?,
    ])
}

/// Emits a placement-preference grid: rows in the aggregation grid's order,
/// columns in the hop grid's order, cells O/G/T.
pub fn emit_frontier_grid(
    aggregation_grid: &[f64],
    hop_grid: &[u32],
    cells: &[Vec<Preference>],
) -> String {
    let mut out = String::from("f_Aggr/n_Hops");
    for hops in hop_grid {
        out.push_str(&format!(",{hops}"));
    }
    out.push('\n');
    for (row, aggregation) in cells.iter().zip(aggregation_grid) {
        out.push_str(&format_significant(*aggregation));
        for cell in row {
            out.push(',');
            out.push(cell.letter());
        }
        out.push('\n');
    }
    out
}

/// Flow intensity over hop count at the configured fixed aggregation rate,
/// one Ground and one Orbit column per technology.
pub fn flow_hops_series(resolved: &ResolvedFlow) -> Result<SweepSeries, ModelError> {
    let samples: Vec<f64> = (0..=resolved.series_max_hops).map(f64::from).collect();
    let mut columns = Vec::new();
    for (name, costs) in &resolved.technologies {
        for placement in [Placement::Ground, Placement::Orbit] {
            let values = (0..=resolved.series_max_hops)
                .map(|hops| {
                    let scenario =
                        FlowScenario::new(costs.clone(), resolved.series_aggregation, hops)?;
                    Ok(flows::flow_intensity(placement, &scenario)
                        .value_as("gCO2e/GB")
                        .expect("flow intensities are carbon per data"))
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            let side = match placement {
                Placement::Ground => "Ground",
                Placement::Orbit => "Orbit",
            };
            columns.push((format!("{side}-{name}"), values));
        }
    }
    SweepSeries::new("n_Hops", "1", "gCO2e/GB", samples, columns)
}

/// Flow intensity over the aggregation rate at the configured fixed hop
/// count, ascending.
pub fn flow_aggregation_series(resolved: &ResolvedFlow) -> Result<SweepSeries, ModelError> {
    let mut rates = resolved.aggregation_grid.clone();
    rates.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
    rates.dedup();
    let mut columns = Vec::new();
    for (name, costs) in &resolved.technologies {
        for placement in [Placement::Ground, Placement::Orbit] {
            let values = rates
                .iter()
                .map(|&rate| {
                    let scenario = FlowScenario::new(costs.clone(), rate, resolved.series_hops)?;
                    Ok(flows::flow_intensity(placement, &scenario)
                        .value_as("gCO2e/GB")
                        .expect("flow intensities are carbon per data"))
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            let side = match placement {
                Placement::Ground => "Ground",
                Placement::Orbit => "Orbit",
            };
            columns.push((format!("{side}-{name}"), values));
        }
    }
    SweepSeries::new("f_Aggr", "1", "gCO2e/GB", rates, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_system_config, resolve};
    use crate::launch::TechnologyRegistry;

    const REFERENCE_CONFIG: &str = r#"
mission_time = 5.0 # yrs
launch = "None"

[solar_array]
area = 2.0 # m^2
panels = 1 # 1

[battery]
capacity = 4.0 # kWh
cycles = 5000  # 1

[transceiver]
mass = 24.5      # g
power = 1        # W
data_rate = 38.4 # Kbps

[cpu]
mass = 100          # g
area = 1137.5       # mm^2
max_power = 28.0    # W

[dram]
capacity = 16.0          # GB
power_per_memory = 0.020 # W/GB

[ssd]
capacity = 4.0      # TB
average_power = 3.0 # W
"#;

    fn assessment(launch: &str) -> SystemAssessment {
        let registry = TechnologyRegistry::builtin();
        let text = REFERENCE_CONFIG.replace("launch = \"None\"", &format!("launch = \"{launch}\""));
        let config = parse_system_config(&text, "sys.toml", true).unwrap();
        let (hardware, record) = resolve(&config, &registry).unwrap();
        SystemAssessment::evaluate(format!("sys-{launch}"), &hardware, record)
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(34.031485), "34.0315");
        assert_eq!(format_significant(0.000264689), "0.000264689");
        assert_eq!(format_significant(157788000.0), "157788000");
        assert_eq!(format_significant(1.0), "1.00000");
        assert_eq!(format_significant(-2.5), "-2.50000");
    }

    #[test]
    fn report_is_deterministic() {
        let a = assessment("Falcon9");
        assert_eq!(render_report(&a), render_report(&a));
    }

    #[test]
    fn report_numbers_are_the_library_values() {
        let a = assessment("None");
        let report = render_report(&a);
        // The energy total and the CPU idle cell appear exactly as computed.
        assert!(report.contains(&format_significant(a.system_energy_intensity.value())));
        let cpu = &a.table[0];
        assert!(report.contains(&format_significant(
            cpu.split.embodied().value_in(&cpu.unit).unwrap()
        )));
        assert!(report.contains("default-calibrated"));
    }

    #[test]
    fn technology_reports_share_structure() {
        let strip_numbers = |text: &str| -> String {
            text.chars()
                .filter(|c| !c.is_ascii_digit() && *c != '.' && *c != '-')
                .collect::<String>()
                .replace("Falcon", "T")
                .replace("Starship", "T")
                .replace("Orbit", "L")
                .replace("Earth", "L")
                .replace("None", "T")
        };
        let f9 = strip_numbers(&render_report(&assessment("Falcon9")));
        let stsh = strip_numbers(&render_report(&assessment("Starship")));
        assert_eq!(f9, stsh);
    }

    #[test]
    fn two_point_series_emits_three_lines() {
        let series = SweepSeries::new(
            "mission_time",
            "yrs",
            "gCO2e/kWh",
            vec![1.0, 2.0],
            vec![("sysE".to_string(), vec![100.0, 50.0])],
        )
        .unwrap();
        let text = emit_series(&series);
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("mission_time[yrs],sysE[gCO2e/kWh]\n"));
        assert!(text.ends_with('\n'));
        assert_eq!(emit_series(&series), text);
    }

    #[test]
    fn series_require_increasing_samples_and_equal_columns() {
        assert!(SweepSeries::new("x", "1", "1", vec![2.0, 1.0], vec![]).is_err());
        assert!(
            SweepSeries::new("x", "1", "1", vec![1.0, 2.0], vec![("a".into(), vec![1.0])]).is_err()
        );
    }

    #[test]
    fn sweep_reproduces_reference_point_and_monotonicity() {
        let registry = TechnologyRegistry::builtin();
        let mut systems = Vec::new();
        for launch in ["None", "Falcon9", "Starship"] {
            let text = REFERENCE_CONFIG.replace("launch = \"None\"", &format!("launch = \"{launch}\""));
            let config = parse_system_config(&text, "sys.toml", true).unwrap();
            let (hardware, _) = resolve(&config, &registry).unwrap();
            systems.push((launch.to_string(), hardware));
        }
        let range = SweepRange::new(1.0, 21.0, 21).unwrap();
        let [energy, cpu, dram] = sweep_mission_time(&systems, &range).unwrap();

        // The 5-year sample of the Earth energy curve is the reference value.
        let five = energy.samples().iter().position(|&t| t == 5.0).unwrap();
        let earth = energy.column("None").unwrap();
        assert!((earth[five] - 34.0).abs() < 0.5);

        // Every curve strictly decreases with mission time, and the gap
        // between the launch technologies persists across the whole range.
        for series in [&energy, &cpu, &dram] {
            for (label, values) in series.columns() {
                assert!(
                    values.windows(2).all(|w| w[1] < w[0]),
                    "{label} not strictly decreasing"
                );
            }
            let f9 = series.column("Falcon9").unwrap();
            let stsh = series.column("Starship").unwrap();
            assert!(f9.iter().zip(stsh).all(|(f, s)| f > s));
        }
    }

    #[test]
    fn sweep_range_validation() {
        assert!(SweepRange::new(0.0, 10.0, 5).is_err());
        assert!(SweepRange::new(1.0, 51.0, 5).is_err());
        assert!(SweepRange::new(1.0, 10.0, 1).is_err());
        assert!(SweepRange::new(5.0, 1.0, 5).is_err());
    }

    #[test]
    fn reference_levels_append_constant_columns() {
        let mut series = SweepSeries::new(
            "mission_time",
            "yrs",
            "gCO2e/kWh",
            vec![1.0, 2.0, 3.0],
            vec![("sysE".to_string(), vec![3.0, 2.0, 1.0])],
        )
        .unwrap();
        series.push_level("Solar", 41.0);
        let text = emit_series(&series);
        assert!(text.contains("Solar[gCO2e/kWh]"));
        assert!(text.lines().skip(1).all(|l| l.ends_with("41.0000")));
    }
}
