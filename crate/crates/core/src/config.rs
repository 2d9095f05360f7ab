//! Ingestion of system, registry, flow-scenario, and reference-level files.
//!
//! All files share one declarative TOML layout with a fixed unit per key.
//! Parsing is strict by default: unknown keys and sections are rejected, and
//! every diagnostic names the file, section, and key, because a silently
//! ignored typo in an emissions model corrupts results invisibly.

use toml::{Table, Value};

use crate::flows::FlowCosts;
use crate::launch::{
    FuelLoad, LaunchTechnology, Propellant, ReentryModel, RocketTechnology, TechnologyRegistry,
    GROUND_NAME,
};
use crate::power::{Battery, Location, SolarArray};
use crate::quantity::Quantity;
use crate::workload::{defaults, CpuSpec, DramSpec, SsdSpec, SystemHardware, TransceiverSpec};
use crate::{flows, ModelError};

type Q = Quantity<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{file}: {message}")]
    Syntax { file: String, message: String },
    #[error("{file}: missing section [{section}]")]
    MissingSection { file: String, section: String },
    #[error("{file}: {section}missing key `{key}`", section = section_prefix(.section))]
    MissingKey {
        file: String,
        section: String,
        key: String,
    },
    #[error("{file}: {section}unknown key `{key}`", section = section_prefix(.section))]
    UnknownKey {
        file: String,
        section: String,
        key: String,
    },
    #[error("{file}: unknown section [{section}]")]
    UnknownSection { file: String, section: String },
    #[error("{file}: {section}key `{key}` must be {expected}", section = section_prefix(.section))]
    WrongType {
        file: String,
        section: String,
        key: String,
        expected: &'static str,
    },
    #[error("{file}: {section}`{key}` {message}", section = section_prefix(.section))]
    InvalidValue {
        file: String,
        section: String,
        key: String,
        message: String,
    },
    #[error("{file}: unknown launch technology `{name}` (registry has: {available})")]
    UnknownTechnology {
        file: String,
        name: String,
        available: String,
    },
    #[error("{file}: {source}")]
    Model {
        file: String,
        #[source]
        source: Box<ModelError>,
    },
}

fn section_prefix(section: &str) -> String {
    if section.is_empty() {
        String::new()
    } else {
        format!("[{section}] ")
    }
}

/// A parsed system configuration: raw values in the units fixed per key.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub source: String,
    pub mission_time_years: f64,
    pub launch: String,
    pub solar_array: SolarArraySection,
    pub battery: BatterySection,
    pub transceiver: TransceiverSection,
    pub cpu: CpuSection,
    pub dram: DramSection,
    pub ssd: SsdSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolarArraySection {
    pub area_m2: f64,
    pub panels: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatterySection {
    pub capacity_kwh: f64,
    pub cycles: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverSection {
    pub mass_g: f64,
    pub power_w: f64,
    pub data_rate_kbps: f64,
    pub production_gco2e: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpuSection {
    pub mass_g: f64,
    pub area_mm2: f64,
    pub max_power_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DramSection {
    pub capacity_gb: f64,
    pub power_per_memory_w_per_gb: f64,
    pub mass_g: Option<f64>,
    pub production_gco2e_per_gb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsdSection {
    pub capacity_tb: f64,
    pub average_power_w: f64,
    pub mass_g: Option<f64>,
    pub production_gco2e_per_gb: Option<f64>,
}

/// Where a resolved parameter's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    DefaultCalibrated,
    UserSupplied,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::DefaultCalibrated => "default-calibrated",
            Provenance::UserSupplied => "user-supplied",
        }
    }
}

/// Record of every parameter the config left to a calibrated default.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolutionRecord {
    pub entries: Vec<ResolvedDefault>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedDefault {
    pub field: &'static str,
    pub value: String,
    pub provenance: Provenance,
}

const TOP_KEYS: &[&str] = &["mission_time", "launch"];
const TOP_SECTIONS: &[&str] = &[
    "solar_array",
    "battery",
    "transceiver",
    "cpu",
    "dram",
    "ssd",
];

/// Parses a system configuration document.
pub fn parse_system_config(
    text: &str,
    file: &str,
    strict: bool,
) -> Result<SystemConfig, ConfigError> {
    let root = parse_toml(text, file)?;
    check_top_level(&root, file, TOP_KEYS, TOP_SECTIONS, strict)?;

    let top = Ctx::top(file, &root);
    let mission_time_years = top.positive_number("mission_time")?;
    let launch = top.string("launch")?;

    let solar = Ctx::section(file, &root, "solar_array")?;
    solar.check_keys(&["area", "panels"], strict)?;
    let solar_array = SolarArraySection {
        area_m2: solar.positive_number("area")?,
        panels: solar.integer_min("panels", 1)?,
    };

    let battery = Ctx::section(file, &root, "battery")?;
    battery.check_keys(&["capacity", "cycles"], strict)?;
    let battery = BatterySection {
        capacity_kwh: battery.positive_number("capacity")?,
        cycles: battery.integer_min("cycles", 1)?,
    };

    let transceiver = Ctx::section(file, &root, "transceiver")?;
    transceiver.check_keys(
        &["mass", "power", "data_rate", "production_emissions"],
        strict,
    )?;
    let transceiver = TransceiverSection {
        mass_g: transceiver.positive_number("mass")?,
        power_w: transceiver.non_negative_number("power")?,
        data_rate_kbps: transceiver.positive_number("data_rate")?,
        production_gco2e: transceiver.optional_non_negative("production_emissions")?,
    };

    let cpu = Ctx::section(file, &root, "cpu")?;
    cpu.check_keys(&["mass", "area", "max_power"], strict)?;
    let cpu = CpuSection {
        mass_g: cpu.positive_number("mass")?,
        area_mm2: cpu.positive_number("area")?,
        max_power_w: cpu.non_negative_number("max_power")?,
    };

    let dram = Ctx::section(file, &root, "dram")?;
    dram.check_keys(
        &[
            "capacity",
            "power_per_memory",
            "mass",
            "production_emissions",
        ],
        strict,
    )?;
    let dram = DramSection {
        capacity_gb: dram.positive_number("capacity")?,
        power_per_memory_w_per_gb: dram.non_negative_number("power_per_memory")?,
        mass_g: dram.optional_positive("mass")?,
        production_gco2e_per_gb: dram.optional_non_negative("production_emissions")?,
    };

    let ssd = Ctx::section(file, &root, "ssd")?;
    ssd.check_keys(
        &["capacity", "average_power", "mass", "production_emissions"],
        strict,
    )?;
    let ssd = SsdSection {
        capacity_tb: ssd.positive_number("capacity")?,
        average_power_w: ssd.non_negative_number("average_power")?,
        mass_g: ssd.optional_positive("mass")?,
        production_gco2e_per_gb: ssd.optional_non_negative("production_emissions")?,
    };

    Ok(SystemConfig {
        source: file.to_string(),
        mission_time_years,
        launch,
        solar_array,
        battery,
        transceiver,
        cpu,
        dram,
        ssd,
    })
}

/// Binds a parsed config against a technology registry, filling calibrated
/// defaults. Deterministic: identical inputs produce an identical system and
/// record.
pub fn resolve(
    config: &SystemConfig,
    registry: &TechnologyRegistry<f64>,
) -> Result<(SystemHardware<f64>, ResolutionRecord), ConfigError> {
    let file = &config.source;
    let technology = registry
        .technology(&config.launch)
        .ok_or_else(|| ConfigError::UnknownTechnology {
            file: file.clone(),
            name: config.launch.clone(),
            available: registry.technology_names().collect::<Vec<_>>().join(", "),
        })?
        .clone();
    let location = if technology.is_ground() {
        Location::Earth
    } else {
        Location::Orbit
    };

    let mut entries = Vec::new();
    let mut pick = |field: &'static str, value: Option<f64>, default: f64, unit: &str| {
        let (magnitude, provenance) = match value {
            Some(v) => (v, Provenance::UserSupplied),
            None => (default, Provenance::DefaultCalibrated),
        };
        entries.push(ResolvedDefault {
            field,
            value: format!("{magnitude} {unit}"),
            provenance,
        });
        magnitude
    };

    let dram_mass = pick("dram.mass", config.dram.mass_g, defaults::DRAM_MASS, "g");
    let dram_production = pick(
        "dram.production_emissions",
        config.dram.production_gco2e_per_gb,
        defaults::DRAM_PRODUCTION_PER_GB,
        "gCO2e/GB",
    );
    let ssd_mass = pick("ssd.mass", config.ssd.mass_g, defaults::SSD_MASS, "g");
    let ssd_production = pick(
        "ssd.production_emissions",
        config.ssd.production_gco2e_per_gb,
        defaults::SSD_PRODUCTION_PER_GB,
        "gCO2e/GB",
    );
    let transceiver_production = pick(
        "transceiver.production_emissions",
        config.transceiver.production_gco2e,
        defaults::TRANSCEIVER_PRODUCTION,
        "gCO2e",
    );

    let model = |source: ModelError| ConfigError::Model {
        file: file.clone(),
        source: Box::new(source),
    };

    let hardware = SystemHardware {
        mission_time: Q::of(config.mission_time_years, "yrs"),
        reentry: registry.reentry().clone(),
        solar: SolarArray::new(
            Q::of(config.solar_array.area_m2, "m^2"),
            config.solar_array.panels,
            location,
        )
        .map_err(model)?,
        battery: Battery::new(
            Q::of(config.battery.capacity_kwh, "kWh"),
            config.battery.cycles,
        )
        .map_err(model)?,
        cpu: CpuSpec::new(
            Q::of(config.cpu.mass_g, "g"),
            Q::of(config.cpu.area_mm2, "mm^2"),
            Q::of(config.cpu.max_power_w, "W"),
        )
        .map_err(model)?,
        dram: DramSpec::new(
            Q::of(config.dram.capacity_gb, "GB"),
            Q::of(config.dram.power_per_memory_w_per_gb, "W/GB"),
            Q::of(dram_mass, "g"),
            Q::of(dram_production, "gCO2e/GB"),
        )
        .map_err(model)?,
        ssd: SsdSpec::new(
            Q::of(config.ssd.capacity_tb, "TB"),
            Q::of(config.ssd.average_power_w, "W"),
            Q::of(ssd_mass, "g"),
            Q::of(ssd_production, "gCO2e/GB"),
        )
        .map_err(model)?,
        transceiver: TransceiverSpec::new(
            Q::of(config.transceiver.mass_g, "g"),
            Q::of(config.transceiver.power_w, "W"),
            Q::of(config.transceiver.data_rate_kbps, "Kbps"),
            Q::of(transceiver_production, "gCO2e"),
        )
        .map_err(model)?,
        technology,
    };

    Ok((hardware, ResolutionRecord { entries }))
}

/// Emits a resolved system back into the config layout, every default made
/// explicit. Re-parsing and re-resolving the emitted text reproduces the
/// system, and re-emitting reproduces the bytes.
pub fn emit_resolved_config(hardware: &SystemHardware<f64>) -> String {
    let mut out = String::new();
    let field = |out: &mut String, key: &str, quantity: &Q, unit: &str| {
        let value = if quantity.unit().label() == unit {
            quantity.value()
        } else {
            quantity
                .value_as(unit)
                .expect("schema unit matches field dimension")
        };
        out.push_str(&format!("{key} = {value} # {unit}\n"));
    };

    field(&mut out, "mission_time", &hardware.mission_time, "yrs");
    out.push_str(&format!("launch = \"{}\"\n", hardware.technology.name()));

    out.push_str("\n[solar_array]\n");
    field(&mut out, "area", hardware.solar.panel_area(), "m^2");
    out.push_str(&format!("panels = {} # 1\n", hardware.solar.panels()));

    out.push_str("\n[battery]\n");
    field(&mut out, "capacity", hardware.battery.capacity(), "kWh");
    out.push_str(&format!("cycles = {} # 1\n", hardware.battery.cycles()));

    out.push_str("\n[transceiver]\n");
    field(&mut out, "mass", hardware.transceiver.mass(), "g");
    field(&mut out, "power", hardware.transceiver.power(), "W");
    field(
        &mut out,
        "data_rate",
        hardware.transceiver.data_rate(),
        "Kbps",
    );
    field(
        &mut out,
        "production_emissions",
        hardware.transceiver.production_emissions(),
        "gCO2e",
    );

    out.push_str("\n[cpu]\n");
    field(&mut out, "mass", hardware.cpu.mass(), "g");
    field(&mut out, "area", hardware.cpu.die_area(), "mm^2");
    field(&mut out, "max_power", hardware.cpu.max_power(), "W");

    out.push_str("\n[dram]\n");
    field(&mut out, "capacity", hardware.dram.capacity(), "GB");
    field(
        &mut out,
        "power_per_memory",
        hardware.dram.power_per_capacity(),
        "W/GB",
    );
    field(&mut out, "mass", hardware.dram.mass(), "g");
    let dram_production = &hardware.dram.production_emissions() / hardware.dram.capacity();
    field(
        &mut out,
        "production_emissions",
        &dram_production,
        "gCO2e/GB",
    );

    out.push_str("\n[ssd]\n");
    field(&mut out, "capacity", hardware.ssd.capacity(), "TB");
    field(&mut out, "average_power", hardware.ssd.average_power(), "W");
    field(&mut out, "mass", hardware.ssd.mass(), "g");
    let ssd_production = &hardware.ssd.production_emissions() / hardware.ssd.capacity();
    field(
        &mut out,
        "production_emissions",
        &ssd_production,
        "gCO2e/GB",
    );

    out
}

/// Parses a technology registry document.
pub fn parse_registry_str(text: &str, file: &str) -> Result<TechnologyRegistry<f64>, ConfigError> {
    let root = parse_toml(text, file)?;
    check_top_level(
        &root,
        file,
        &[],
        &["reentry", "propellants", "technologies"],
        true,
    )?;

    let reentry_ctx = Ctx::section(file, &root, "reentry")?;
    reentry_ctx.check_keys(&["nox_yield", "nox_gwp_factor"], true)?;
    let reentry = ReentryModel::new(
        Q::of(reentry_ctx.non_negative_number("nox_yield")?, "kg/kg"),
        Q::of(
            reentry_ctx.non_negative_number("nox_gwp_factor")?,
            "gCO2e/g",
        ),
    )
    .map_err(|source| ConfigError::Model {
        file: file.to_string(),
        source: Box::new(source),
    })?;

    let mut propellants = Vec::new();
    if root.contains_key("propellants") {
        let ctx = Ctx::section(file, &root, "propellants")?;
        for key in ctx.table.keys() {
            let intensity = ctx.non_negative_number(key)?;
            propellants.push(
                Propellant::new(key.clone(), Q::of(intensity, "kgCO2e/kg")).map_err(|source| {
                    ConfigError::Model {
                        file: file.to_string(),
                        source: Box::new(source),
                    }
                })?,
            );
        }
    }

    let mut technologies = Vec::new();
    if root.contains_key("technologies") {
        let techs = Ctx::section(file, &root, "technologies")?;
        for (name, value) in techs.table.iter() {
            let table = value.as_table().ok_or_else(|| ConfigError::WrongType {
                file: file.to_string(),
                section: "technologies".to_string(),
                key: name.clone(),
                expected: "a table",
            })?;
            if name == GROUND_NAME {
                return Err(ConfigError::InvalidValue {
                    file: file.to_string(),
                    section: "technologies".to_string(),
                    key: name.clone(),
                    message: "is reserved for the built-in no-launch technology".to_string(),
                });
            }
            technologies.push(parse_technology(file, name, table, &propellants)?);
        }
    }

    TechnologyRegistry::new(reentry, propellants, technologies).map_err(|source| {
        ConfigError::Model {
            file: file.to_string(),
            source: Box::new(source),
        }
    })
}

fn parse_technology(
    file: &str,
    name: &str,
    table: &Table,
    propellants: &[Propellant<f64>],
) -> Result<LaunchTechnology<f64>, ConfigError> {
    let section = format!("technologies.{name}");
    let ctx = Ctx {
        file,
        section: section.clone(),
        table,
    };
    ctx.check_keys(
        &[
            "production_first",
            "production_second",
            "payload_capacity",
            "reuse_first",
            "reuse_second",
            "reentry_extra_mass",
            "fuel_emissions",
            "fuel",
        ],
        true,
    )?;

    let aggregate = ctx.optional_non_negative("fuel_emissions")?;
    let manifest = match table.get("fuel") {
        None => None,
        Some(Value::Table(fuel_table)) => {
            let fuel_section = format!("{section}.fuel");
            let fuel_ctx = Ctx {
                file,
                section: fuel_section.clone(),
                table: fuel_table,
            };
            let mut entries = Vec::new();
            for key in fuel_table.keys() {
                let mass = fuel_ctx.non_negative_number(key)?;
                let propellant = propellants
                    .iter()
                    .find(|p| p.name() == key)
                    .ok_or_else(|| ConfigError::InvalidValue {
                        file: file.to_string(),
                        section: fuel_section.clone(),
                        key: key.clone(),
                        message: "names a propellant missing from [propellants]".to_string(),
                    })?;
                entries.push((propellant.clone(), Q::of(mass, "t")));
            }
            Some(entries)
        }
        Some(_) => {
            return Err(ConfigError::WrongType {
                file: file.to_string(),
                section,
                key: "fuel".to_string(),
                expected: "a table of propellant masses",
            })
        }
    };

    let fuel = match (aggregate, manifest) {
        (Some(total), None) => FuelLoad::Aggregate(Q::of(total, "tCO2e")),
        (None, Some(entries)) => FuelLoad::Manifest(entries),
        (Some(_), Some(_)) => {
            return Err(ConfigError::InvalidValue {
                file: file.to_string(),
                section,
                key: "fuel_emissions".to_string(),
                message: "conflicts with the [.fuel] manifest; give one or the other".to_string(),
            })
        }
        (None, None) => {
            return Err(ConfigError::MissingKey {
                file: file.to_string(),
                section,
                key: "fuel_emissions (or a [.fuel] manifest)".to_string(),
            })
        }
    };

    RocketTechnology::new(
        name,
        Q::of(ctx.non_negative_number("production_first")?, "tCO2e"),
        Q::of(ctx.non_negative_number("production_second")?, "tCO2e"),
        fuel,
        Q::of(ctx.positive_number("payload_capacity")?, "t"),
        ctx.integer_min("reuse_first", 1)?,
        ctx.integer_min("reuse_second", 1)?,
        Q::of(ctx.non_negative_number("reentry_extra_mass")?, "t"),
    )
    .map(|rocket| LaunchTechnology::Rocket(Box::new(rocket)))
    .map_err(|source| ConfigError::Model {
        file: file.to_string(),
        source: Box::new(source),
    })
}

/// A parsed flow-scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub source: String,
    pub mission_time_years: f64,
    pub technologies: Vec<String>,
    pub solar_array: SolarArraySection,
    pub battery: BatterySection,
    pub cpu: CpuSection,
    pub cpu_time_per_gb_s: f64,
    pub isl: LinkSection,
    pub gsl: LinkSection,
    pub aggregation_grid: Vec<f64>,
    pub hop_grid: Vec<u32>,
    pub series_aggregation: f64,
    pub series_hops: u32,
    pub series_max_hops: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSection {
    pub mass_g: f64,
    pub power_w: f64,
    pub data_rate_kbps: f64,
    pub production_gco2e: f64,
}

/// Parses a flow-scenario document.
pub fn parse_flow_config(text: &str, file: &str) -> Result<FlowConfig, ConfigError> {
    let root = parse_toml(text, file)?;
    check_top_level(
        &root,
        file,
        &["mission_time", "technologies"],
        &[
            "solar_array",
            "battery",
            "cpu",
            "processing",
            "isl",
            "gsl",
            "grid",
            "series",
        ],
        true,
    )?;

    let top = Ctx::top(file, &root);
    let mission_time_years = top.positive_number("mission_time")?;
    let technologies = top.string_array("technologies")?;
    if technologies.is_empty() {
        return Err(ConfigError::InvalidValue {
            file: file.to_string(),
            section: String::new(),
            key: "technologies".to_string(),
            message: "must name at least one launch technology".to_string(),
        });
    }

    let solar = Ctx::section(file, &root, "solar_array")?;
    solar.check_keys(&["area", "panels"], true)?;
    let solar_array = SolarArraySection {
        area_m2: solar.positive_number("area")?,
        panels: solar.integer_min("panels", 1)?,
    };

    let battery = Ctx::section(file, &root, "battery")?;
    battery.check_keys(&["capacity", "cycles"], true)?;
    let battery = BatterySection {
        capacity_kwh: battery.positive_number("capacity")?,
        cycles: battery.integer_min("cycles", 1)?,
    };

    let cpu = Ctx::section(file, &root, "cpu")?;
    cpu.check_keys(&["mass", "area", "max_power"], true)?;
    let cpu = CpuSection {
        mass_g: cpu.positive_number("mass")?,
        area_mm2: cpu.positive_number("area")?,
        max_power_w: cpu.non_negative_number("max_power")?,
    };

    let processing = Ctx::section(file, &root, "processing")?;
    processing.check_keys(&["cpu_time_per_gb"], true)?;
    let cpu_time_per_gb_s = processing.non_negative_number("cpu_time_per_gb")?;

    let parse_link = |name: &str| -> Result<LinkSection, ConfigError> {
        let ctx = Ctx::section(file, &root, name)?;
        ctx.check_keys(
            &["mass", "power", "data_rate", "production_emissions"],
            true,
        )?;
        Ok(LinkSection {
            mass_g: ctx.positive_number("mass")?,
            power_w: ctx.non_negative_number("power")?,
            data_rate_kbps: ctx.positive_number("data_rate")?,
            production_gco2e: ctx.non_negative_number("production_emissions")?,
        })
    };
    let isl = parse_link("isl")?;
    let gsl = parse_link("gsl")?;

    let grid = Ctx::section(file, &root, "grid")?;
    grid.check_keys(&["aggregation_rates", "hop_counts"], true)?;
    let aggregation_grid = grid.number_array("aggregation_rates")?;
    if aggregation_grid.is_empty() || aggregation_grid.iter().any(|&f| f <= 0.0 || f > 1.0) {
        return Err(ConfigError::InvalidValue {
            file: file.to_string(),
            section: "grid".to_string(),
            key: "aggregation_rates".to_string(),
            message: "must be a non-empty list of rates in (0, 1]".to_string(),
        });
    }
    let hop_grid = grid.integer_array("hop_counts")?;
    if hop_grid.is_empty() {
        return Err(ConfigError::InvalidValue {
            file: file.to_string(),
            section: "grid".to_string(),
            key: "hop_counts".to_string(),
            message: "must be a non-empty list of hop counts".to_string(),
        });
    }

    let series = Ctx::section(file, &root, "series")?;
    series.check_keys(&["aggregation", "hops", "max_hops"], true)?;
    let series_aggregation = series.positive_number("aggregation")?;
    if series_aggregation > 1.0 {
        return Err(ConfigError::InvalidValue {
            file: file.to_string(),
            section: "series".to_string(),
            key: "aggregation".to_string(),
            message: "must be in (0, 1]".to_string(),
        });
    }
    let series_hops = series.integer_min("hops", 0)?;
    let series_max_hops = series.integer_min("max_hops", 1)?;

    Ok(FlowConfig {
        source: file.to_string(),
        mission_time_years,
        technologies,
        solar_array,
        battery,
        cpu,
        cpu_time_per_gb_s,
        isl,
        gsl,
        aggregation_grid,
        hop_grid,
        series_aggregation,
        series_hops,
        series_max_hops,
    })
}

/// A flow config bound to a registry: per-technology cost templates plus the
/// evaluation grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedFlow {
    pub technologies: Vec<(String, FlowCosts<f64>)>,
    pub aggregation_grid: Vec<f64>,
    pub hop_grid: Vec<u32>,
    pub series_aggregation: f64,
    pub series_hops: u32,
    pub series_max_hops: u32,
}

/// Derives each listed technology's flow costs from the component models:
/// link intensities from the transceiver model (orbital hardware, launched
/// with the technology) and processing intensities from the CPU model in
/// orbit and on the ground.
pub fn resolve_flow(
    config: &FlowConfig,
    registry: &TechnologyRegistry<f64>,
) -> Result<ResolvedFlow, ConfigError> {
    let file = &config.source;
    let model = |source: ModelError| ConfigError::Model {
        file: file.clone(),
        source: Box::new(source),
    };

    let mission = Q::of(config.mission_time_years, "yrs");
    let battery = Battery::new(
        Q::of(config.battery.capacity_kwh, "kWh"),
        config.battery.cycles,
    )
    .map_err(model)?;
    let cpu = CpuSpec::new(
        Q::of(config.cpu.mass_g, "g"),
        Q::of(config.cpu.area_mm2, "mm^2"),
        Q::of(config.cpu.max_power_w, "W"),
    )
    .map_err(model)?;
    let time_per_volume = Q::of(config.cpu_time_per_gb_s, "s/GB");
    let link_spec = |link: &LinkSection| -> Result<TransceiverSpec<f64>, ConfigError> {
        TransceiverSpec::new(
            Q::of(link.mass_g, "g"),
            Q::of(link.power_w, "W"),
            Q::of(link.data_rate_kbps, "Kbps"),
            Q::of(link.production_gco2e, "gCO2e"),
        )
        .map_err(model)
    };
    let isl = link_spec(&config.isl)?;
    let gsl = link_spec(&config.gsl)?;

    let solar_at = |location: Location| -> Result<SolarArray<f64>, ConfigError> {
        SolarArray::new(
            Q::of(config.solar_array.area_m2, "m^2"),
            config.solar_array.panels,
            location,
        )
        .map_err(model)
    };

    // The ground side is launch-independent: Earth hardware, no launch.
    let ground = LaunchTechnology::Ground;
    let reentry = registry.reentry();
    let energy_ground = crate::power::system_energy_intensity(
        &battery,
        &solar_at(Location::Earth)?,
        &ground,
        reentry,
        &mission,
    );
    let processing_ground = flows::processing_intensity(
        &cpu,
        &energy_ground,
        &ground,
        reentry,
        &mission,
        &time_per_volume,
    )
    .map_err(model)?;

    let mut technologies = Vec::new();
    for name in &config.technologies {
        let technology = registry
            .technology(name)
            .ok_or_else(|| ConfigError::UnknownTechnology {
                file: file.clone(),
                name: name.clone(),
                available: registry.technology_names().collect::<Vec<_>>().join(", "),
            })?
            .clone();
        let location = if technology.is_ground() {
            Location::Earth
        } else {
            Location::Orbit
        };
        let energy_orbit = crate::power::system_energy_intensity(
            &battery,
            &solar_at(location)?,
            &technology,
            reentry,
            &mission,
        );
        let processing_orbit = flows::processing_intensity(
            &cpu,
            &energy_orbit,
            &technology,
            reentry,
            &mission,
            &time_per_volume,
        )
        .map_err(model)?;
        let isl_intensity =
            flows::link_intensity(&isl, &energy_orbit, &technology, reentry, &mission);
        let gsl_intensity =
            flows::link_intensity(&gsl, &energy_orbit, &technology, reentry, &mission);
        let costs = FlowCosts::new(
            isl_intensity,
            gsl_intensity,
            processing_orbit,
            processing_ground.clone(),
        )
        .map_err(model)?;
        technologies.push((name.clone(), costs));
    }

    Ok(ResolvedFlow {
        technologies,
        aggregation_grid: config.aggregation_grid.clone(),
        hop_grid: config.hop_grid.clone(),
        series_aggregation: config.series_aggregation,
        series_hops: config.series_hops,
        series_max_hops: config.series_max_hops,
    })
}

/// Parses a reference-levels document: named horizontal intensities in
/// gCO2e/kWh, ordered by name.
pub fn parse_reference_levels(text: &str, file: &str) -> Result<Vec<(String, f64)>, ConfigError> {
    let root = parse_toml(text, file)?;
    check_top_level(&root, file, &[], &["levels"], true)?;
    let ctx = Ctx::section(file, &root, "levels")?;
    let mut levels = Vec::new();
    for key in ctx.table.keys() {
        levels.push((key.clone(), ctx.non_negative_number(key)?));
    }
    Ok(levels)
}

fn parse_toml(text: &str, file: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>().map_err(|e| ConfigError::Syntax {
        file: file.to_string(),
        message: e.to_string(),
    })
}

fn check_top_level(
    root: &Table,
    file: &str,
    keys: &[&str],
    sections: &[&str],
    strict: bool,
) -> Result<(), ConfigError> {
    for (key, value) in root.iter() {
        let is_key = keys.contains(&key.as_str());
        let is_section = sections.contains(&key.as_str());
        if !is_key && !is_section {
            if !strict {
                continue;
            }
            return Err(if value.is_table() {
                ConfigError::UnknownSection {
                    file: file.to_string(),
                    section: key.clone(),
                }
            } else {
                ConfigError::UnknownKey {
                    file: file.to_string(),
                    section: String::new(),
                    key: key.clone(),
                }
            });
        }
        if is_section && !value.is_table() {
            return Err(ConfigError::WrongType {
                file: file.to_string(),
                section: String::new(),
                key: key.clone(),
                expected: "a [section]",
            });
        }
    }
    Ok(())
}

/// Cursor into one section (or the top level) of a parsed document.
struct Ctx<'a> {
    file: &'a str,
    section: String,
    table: &'a Table,
}

impl<'a> Ctx<'a> {
    fn top(file: &'a str, table: &'a Table) -> Self {
        Self {
            file,
            section: String::new(),
            table,
        }
    }

    fn section(file: &'a str, root: &'a Table, name: &str) -> Result<Self, ConfigError> {
        match root.get(name) {
            Some(Value::Table(table)) => Ok(Self {
                file,
                section: name.to_string(),
                table,
            }),
            Some(_) => Err(ConfigError::WrongType {
                file: file.to_string(),
                section: String::new(),
                key: name.to_string(),
                expected: "a [section]",
            }),
            None => Err(ConfigError::MissingSection {
                file: file.to_string(),
                section: name.to_string(),
            }),
        }
    }

    fn check_keys(&self, allowed: &[&str], strict: bool) -> Result<(), ConfigError> {
        if !strict {
            return Ok(());
        }
        for key in self.table.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(self.unknown_key(key));
            }
        }
        Ok(())
    }

    fn unknown_key(&self, key: &str) -> ConfigError {
        ConfigError::UnknownKey {
            file: self.file.to_string(),
            section: self.section.clone(),
            key: key.to_string(),
        }
    }

    fn missing(&self, key: &str) -> ConfigError {
        ConfigError::MissingKey {
            file: self.file.to_string(),
            section: self.section.clone(),
            key: key.to_string(),
        }
    }

    fn wrong_type(&self, key: &str, expected: &'static str) -> ConfigError {
        ConfigError::WrongType {
            file: self.file.to_string(),
            section: self.section.clone(),
            key: key.to_string(),
            expected,
        }
    }

    fn invalid(&self, key: &str, message: &str) -> ConfigError {
        ConfigError::InvalidValue {
            file: self.file.to_string(),
            section: self.section.clone(),
            key: key.to_string(),
            message: message.to_string(),
        }
    }

    fn raw_number(&self, key: &str, value: &Value) -> Result<f64, ConfigError> {
        match value {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            _ => Err(self.wrong_type(key, "a number")),
        }
    }

    fn number(&self, key: &str) -> Result<f64, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        self.raw_number(key, value)
    }

    fn positive_number(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.number(key)?;
        if !v.is_finite() || v <= 0.0 {
            return Err(self.invalid(key, "must be > 0"));
        }
        Ok(v)
    }

    fn non_negative_number(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.number(key)?;
        if !v.is_finite() || v < 0.0 {
            return Err(self.invalid(key, "must be >= 0"));
        }
        Ok(v)
    }

    fn optional_positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        if self.table.contains_key(key) {
            Ok(Some(self.positive_number(key)?))
        } else {
            Ok(None)
        }
    }

    fn optional_non_negative(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        if self.table.contains_key(key) {
            Ok(Some(self.non_negative_number(key)?))
        } else {
            Ok(None)
        }
    }

    fn integer_min(&self, key: &str, min: i64) -> Result<u32, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        let i = value
            .as_integer()
            .ok_or_else(|| self.wrong_type(key, "an integer"))?;
        if i < min || i > i64::from(u32::MAX) {
            return Err(self.invalid(key, &format!("must be an integer >= {min}")));
        }
        Ok(i as u32)
    }

    fn string(&self, key: &str) -> Result<String, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        value
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| self.wrong_type(key, "a string"))
    }

    fn string_array(&self, key: &str) -> Result<Vec<String>, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        let array = value
            .as_array()
            .ok_or_else(|| self.wrong_type(key, "an array of strings"))?;
        array
            .iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| self.wrong_type(key, "an array of strings"))
            })
            .collect()
    }

    fn number_array(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        let array = value
            .as_array()
            .ok_or_else(|| self.wrong_type(key, "an array of numbers"))?;
        array.iter().map(|v| self.raw_number(key, v)).collect()
    }

    fn integer_array(&self, key: &str) -> Result<Vec<u32>, ConfigError> {
        let value = self.table.get(key).ok_or_else(|| self.missing(key))?;
        let array = value
            .as_array()
            .ok_or_else(|| self.wrong_type(key, "an array of integers"))?;
        array
            .iter()
            .map(|v| {
                let i = v
                    .as_integer()
                    .ok_or_else(|| self.wrong_type(key, "an array of integers"))?;
                if !(0..=i64::from(u32::MAX)).contains(&i) {
                    return Err(self.invalid(key, "entries must be integers >= 0"));
                }
                Ok(i as u32)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE_CONFIG: &str = r#"# sysX.toml

mission_time = 5.0 # yrs
launch = "None" # or "Falcon9" or "Starship"

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

    fn config_with_launch(launch: &str) -> String {
        REFERENCE_CONFIG.replace("launch = \"None\"", &format!("launch = \"{launch}\""))
    }

    #[test]
    fn reference_config_parses() {
        let config = parse_system_config(REFERENCE_CONFIG, "sysE.toml", true).unwrap();
        assert_eq!(config.mission_time_years, 5.0);
        assert_eq!(config.launch, "None");
        assert_eq!(config.transceiver.power_w, 1.0);
        assert_eq!(config.dram.mass_g, None);
    }

    #[test]
    fn launch_selector_switches_technology() {
        let registry = TechnologyRegistry::builtin();
        for launch in ["None", "Falcon9", "Starship"] {
            let text = config_with_launch(launch);
            let config = parse_system_config(&text, "sys.toml", true).unwrap();
            let (hardware, _) = resolve(&config, &registry).unwrap();
            assert_eq!(hardware.technology.name(), launch);
            let expected = if launch == "None" {
                Location::Earth
            } else {
                Location::Orbit
            };
            assert_eq!(hardware.solar.location(), expected);
        }
    }

    #[test]
    fn zero_mission_time_names_the_key() {
        let text = REFERENCE_CONFIG.replace("mission_time = 5.0", "mission_time = 0.0");
        let err = parse_system_config(&text, "sys.toml", true).unwrap_err();
        assert!(err.to_string().contains("mission_time"), "{err}");
    }

    #[test]
    fn misspelled_key_named_in_diagnostic() {
        let text = REFERENCE_CONFIG.replace("capacity = 4.0", "capacityy = 4.0");
        let err = parse_system_config(&text, "sys.toml", true).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("capacityy"), "{msg}");
        assert!(msg.contains("battery"), "{msg}");
        assert!(msg.contains("sys.toml"), "{msg}");
    }

    #[test]
    fn non_strict_permits_unknown_keys() {
        let text = format!("{REFERENCE_CONFIG}\n[battery2]\nx = 1\n");
        assert!(parse_system_config(&text, "sys.toml", true).is_err());
        assert!(parse_system_config(&text, "sys.toml", false).is_ok());
    }

    #[test]
    fn missing_section_reported() {
        let text = REFERENCE_CONFIG.replace("[battery]", "[battery_]");
        let err = parse_system_config(&text, "sys.toml", false).unwrap_err();
        assert!(
            matches!(err, ConfigError::MissingSection { ref section, .. } if section == "battery")
        );
    }

    #[test]
    fn wrong_type_reported() {
        let text = REFERENCE_CONFIG.replace("cycles = 5000", "cycles = \"many\"");
        let err = parse_system_config(&text, "sys.toml", true).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cycles") && msg.contains("integer"), "{msg}");
    }

    #[test]
    fn unknown_technology_rejected() {
        let registry = TechnologyRegistry::builtin();
        let text = config_with_launch("Foo");
        let config = parse_system_config(&text, "sys.toml", true).unwrap();
        let err = resolve(&config, &registry).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Foo") && msg.contains("Falcon9"), "{msg}");
    }

    #[test]
    fn defaults_flagged_calibrated_and_overrides_user_supplied() {
        let registry = TechnologyRegistry::builtin();
        let config = parse_system_config(REFERENCE_CONFIG, "sys.toml", true).unwrap();
        let (_, record) = resolve(&config, &registry).unwrap();
        assert_eq!(record.entries.len(), 5);
        assert!(record
            .entries
            .iter()
            .all(|e| e.provenance == Provenance::DefaultCalibrated));
        let dram = record
            .entries
            .iter()
            .find(|e| e.field == "dram.production_emissions")
            .unwrap();
        assert_eq!(dram.value, "473 gCO2e/GB");

        let text = REFERENCE_CONFIG.replace(
            "capacity = 16.0          # GB",
            "capacity = 16.0\nproduction_emissions = 500.0",
        );
        let config = parse_system_config(&text, "sys.toml", true).unwrap();
        let (_, record) = resolve(&config, &registry).unwrap();
        let dram = record
            .entries
            .iter()
            .find(|e| e.field == "dram.production_emissions")
            .unwrap();
        assert_eq!(dram.provenance, Provenance::UserSupplied);
    }

    #[test]
    fn round_trip_is_identical_and_byte_stable() {
        let registry = TechnologyRegistry::builtin();
        for launch in ["None", "Falcon9", "Starship"] {
            let text = config_with_launch(launch);
            let config = parse_system_config(&text, "sys.toml", true).unwrap();
            let (hardware, _) = resolve(&config, &registry).unwrap();
            let emitted = emit_resolved_config(&hardware);
            let reparsed = parse_system_config(&emitted, "emitted.toml", true).unwrap();
            let (hardware2, record2) = resolve(&reparsed, &registry).unwrap();
            assert_eq!(hardware, hardware2, "{launch}");
            assert!(record2
                .entries
                .iter()
                .all(|e| e.provenance == Provenance::UserSupplied));
            let emitted2 = emit_resolved_config(&hardware2);
            assert_eq!(emitted, emitted2, "{launch}");
        }
    }

    #[test]
    fn builtin_registry_loads() {
        let registry = TechnologyRegistry::builtin();
        for name in ["None", "Falcon9", "Starship", "StarshipNonGreen"] {
            assert!(registry.technology(name).is_some(), "{name}");
        }
        assert!(registry.propellant("LOX").is_some());
    }

    #[test]
    fn registry_rejects_fuel_conflicts() {
        let text = r#"
[reentry]
nox_yield = 0.4
nox_gwp_factor = 298.0

[technologies.X]
production_first = 1.0
production_second = 1.0
payload_capacity = 1.0
reuse_first = 1
reuse_second = 1
reentry_extra_mass = 0.0
"#;
        let err = parse_registry_str(text, "reg.toml").unwrap_err();
        assert!(err.to_string().contains("fuel_emissions"), "{err}");

        let both = format!("{text}fuel_emissions = 1.0\n\n[technologies.X.fuel]\nLOX = 1.0\n\n[propellants]\nLOX = 0.41\n");
        let err = parse_registry_str(&both, "reg.toml").unwrap_err();
        assert!(err.to_string().contains("conflicts"), "{err}");
    }

    #[test]
    fn registry_rejects_unknown_manifest_propellant() {
        let text = r#"
[reentry]
nox_yield = 0.4
nox_gwp_factor = 298.0

[technologies.X]
production_first = 1.0
production_second = 1.0
payload_capacity = 1.0
reuse_first = 1
reuse_second = 1
reentry_extra_mass = 0.0

[technologies.X.fuel]
Kerosene = 100.0
"#;
        let err = parse_registry_str(text, "reg.toml").unwrap_err();
        assert!(err.to_string().contains("Kerosene"), "{err}");
    }

    #[test]
    fn reference_levels_parse_in_file_order() {
        let text = "[levels]\nSolar = 41.0\nGas = 490.0\n";
        let levels = parse_reference_levels(text, "ref.toml").unwrap();
        assert_eq!(levels.len(), 2);
        assert!(levels.iter().any(|(n, v)| n == "Solar" && *v == 41.0));
    }
}
