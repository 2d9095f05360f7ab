//! Command-line estimator: reads system and flow configs, runs the models,
//! and emits reports, tables, and analysis series.
//!
//! Exit codes: 0 on success, 1 on config or validation errors (one
//! diagnostic line per error on stderr), 2 on command-line usage errors.
//! Output files are written atomically; a failing run leaves no outputs.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orbitsci_core::config::{
    self, parse_flow_config, parse_system_config, resolve, resolve_flow, ResolutionRecord,
};
use orbitsci_core::flows::placement_frontier;
use orbitsci_core::launch::TechnologyRegistry;
use orbitsci_core::report::{
    emit_frontier_grid, emit_series, emit_table, flow_aggregation_series, flow_hops_series,
    render_comparison, render_report, sweep_mission_time, SweepRange, SystemAssessment,
};
use orbitsci_core::SystemHardware;

#[derive(Parser)]
#[command(
    name = "orbitsci",
    version,
    about = "Lifecycle carbon intensity estimator for terrestrial and orbital computing systems"
)]
struct Cli {
    /// Directory output files are written to
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Technology registry file replacing the built-in registry
    #[arg(long, global = true)]
    registry: Option<PathBuf>,

    /// Reject unknown config keys and sections (the default)
    #[arg(long, global = true, conflicts_with = "no_strict")]
    strict: bool,

    /// Permit unknown config keys and sections
    #[arg(long, global = true)]
    no_strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a report document and intensity table per system
    Report {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Render one side-by-side comparison document for several systems
    Compare {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Emit the combined machine-readable intensity table
    Table {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Sweep a parameter and emit energy, CPU, and DRAM intensity series
    Sweep {
        /// Parameter to sweep
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Start of the range (years)
        #[arg(long)]
        from: f64,
        /// End of the range (years)
        #[arg(long)]
        to: f64,
        /// Number of samples (at least 2)
        #[arg(long)]
        steps: usize,
        /// Reference-levels file appended to the energy series as constants
        #[arg(long)]
        reference_levels: Option<PathBuf>,
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Evaluate a flow scenario: placement frontier grids and series
    Frontier { flow_config: PathBuf },
}

#[derive(ValueEnum, Clone, Copy)]
enum SweepParam {
    MissionTime,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(errors) => {
            for error in errors {
                eprintln!("error: {error}");
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Vec<String>> {
    let strict = !cli.no_strict;
    let registry = load_registry(cli.registry.as_deref()).map_err(|e| vec![e])?;

    let outputs = match &cli.command {
        Command::Report { configs } => {
            let assessments = assess_all(configs, &registry, strict)?;
            let mut outputs = Vec::new();
            for assessment in &assessments {
                outputs.push((
                    format!("{}-report.md", assessment.name),
                    render_report(assessment),
                ));
                outputs.push((
                    format!("{}-table.csv", assessment.name),
                    emit_table(std::slice::from_ref(assessment)),
                ));
            }
            outputs
        }
        Command::Compare { configs } => {
            let assessments = assess_all(configs, &registry, strict)?;
            let stems: Vec<&str> = assessments.iter().map(|a| a.name.as_str()).collect();
            vec![(
                format!("{}-compare.md", stems.join("-")),
                render_comparison(&assessments),
            )]
        }
        Command::Table { configs } => {
            let assessments = assess_all(configs, &registry, strict)?;
            let stems: Vec<&str> = assessments.iter().map(|a| a.name.as_str()).collect();
            vec![(
                format!("{}-table.csv", stems.join("-")),
                emit_table(&assessments),
            )]
        }
        Command::Sweep {
            param: SweepParam::MissionTime,
            from,
            to,
            steps,
            reference_levels,
            configs,
        } => {
            let range = SweepRange::new(*from, *to, *steps).map_err(|e| vec![e.to_string()])?;
            let systems = load_all(configs, &registry, strict)?;
            let named: Vec<(String, SystemHardware)> = systems
                .into_iter()
                .map(|(name, hardware, _)| (name, hardware))
                .collect();
            let [mut energy, cpu, dram] =
                sweep_mission_time(&named, &range).map_err(|e| vec![e.to_string()])?;
            if let Some(path) = reference_levels {
                let text = read(path)?;
                let levels = config::parse_reference_levels(&text, &display_name(path))
                    .map_err(|e| vec![e.to_string()])?;
                for (label, value) in levels {
                    energy.push_level(&label, value);
                }
            }
            vec![
                (
                    "sweep-mission-time-energy.csv".to_string(),
                    emit_series(&energy),
                ),
                ("sweep-mission-time-cpu.csv".to_string(), emit_series(&cpu)),
                (
                    "sweep-mission-time-dram.csv".to_string(),
                    emit_series(&dram),
                ),
            ]
        }
        Command::Frontier { flow_config } => {
            let text = read(flow_config)?;
            let name = display_name(flow_config);
            let stem = stem_of(flow_config);
            let parsed = parse_flow_config(&text, &name).map_err(|e| vec![e.to_string()])?;
            let resolved = resolve_flow(&parsed, &registry).map_err(|e| vec![e.to_string()])?;
            let mut outputs = Vec::new();
            for (tech, costs) in &resolved.technologies {
                let cells =
                    placement_frontier(&resolved.aggregation_grid, &resolved.hop_grid, costs)
                        .map_err(|e| vec![e.to_string()])?;
                outputs.push((
                    format!("{stem}-frontier-{tech}.csv"),
                    emit_frontier_grid(&resolved.aggregation_grid, &resolved.hop_grid, &cells),
                ));
            }
            let hops = flow_hops_series(&resolved).map_err(|e| vec![e.to_string()])?;
            let aggregation =
                flow_aggregation_series(&resolved).map_err(|e| vec![e.to_string()])?;
            outputs.push((format!("{stem}-hops-series.csv"), emit_series(&hops)));
            outputs.push((
                format!("{stem}-aggregation-series.csv"),
                emit_series(&aggregation),
            ));
            outputs
        }
    };

    output::write_all(&cli.out_dir, &outputs).map_err(|e| vec![e])
}

fn load_registry(path: Option<&Path>) -> Result<TechnologyRegistry<f64>, String> {
    match path {
        None => Ok(TechnologyRegistry::builtin()),
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            config::parse_registry_str(&text, &display_name(path)).map_err(|e| e.to_string())
        }
    }
}

type LoadedSystem = (String, SystemHardware, ResolutionRecord);

/// Parses and resolves every config, reporting one diagnostic per failure.
fn load_all(
    configs: &[PathBuf],
    registry: &TechnologyRegistry<f64>,
    strict: bool,
) -> Result<Vec<LoadedSystem>, Vec<String>> {
    let mut systems = Vec::new();
    let mut errors = Vec::new();
    for path in configs {
        match load_one(path, registry, strict) {
            Ok(system) => systems.push(system),
            Err(error) => errors.push(error),
        }
    }
    if errors.is_empty() {
        Ok(systems)
    } else {
        Err(errors)
    }
}

fn load_one(
    path: &Path,
    registry: &TechnologyRegistry<f64>,
    strict: bool,
) -> Result<LoadedSystem, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let config =
        parse_system_config(&text, &display_name(path), strict).map_err(|e| e.to_string())?;
    let (hardware, record) = resolve(&config, registry).map_err(|e| e.to_string())?;
    Ok((stem_of(path), hardware, record))
}

/// Estimation is pure, so systems are assessed concurrently; emission order
/// follows the command line.
fn assess_all(
    configs: &[PathBuf],
    registry: &TechnologyRegistry<f64>,
    strict: bool,
) -> Result<Vec<SystemAssessment>, Vec<String>> {
    let systems = load_all(configs, registry, strict)?;
    let assessments = std::thread::scope(|scope| {
        let handles: Vec<_> = systems
            .iter()
            .map(|(name, hardware, record)| {
                scope.spawn(move || SystemAssessment::evaluate(name, hardware, record.clone()))
            })
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("assessment does not panic"))
            .collect::<Vec<_>>()
    });
    Ok(assessments)
}

fn read(path: &Path) -> Result<String, Vec<String>> {
    std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string())
}
