//! Lifecycle carbon intensity models for computing systems deployed on Earth
//! or in low-Earth orbit.
//!
//! The crate estimates operational (O) and embodied (M) carbon intensities of
//! a computing system — CPU, DRAM, SSD, and network transceiver — backed by a
//! solar array and battery, and amortizes production, launch, and re-entry
//! emissions over the mission. A flow model compares processing data in orbit
//! against downlinking raw data and processing it on the ground.
//!
//! The model modules are generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases at the crate root fix `f64`, which is what
//! the config, report, and CLI layers use.
//!
//! ```
//! use orbitsci_core::config::{parse_system_config, resolve};
//! use orbitsci_core::launch::TechnologyRegistry;
//! use orbitsci_core::workload::intensity_table;
//!
//! let text = r#"
//! mission_time = 5.0
//! launch = "Falcon9"
//!
//! [solar_array]
//! area = 2.0
//! panels = 1
//!
//! [battery]
//! capacity = 4.0
//! cycles = 5000
//!
//! [transceiver]
//! mass = 24.5
//! power = 1
//! data_rate = 38.4
//!
//! [cpu]
//! mass = 100
//! area = 1137.5
//! max_power = 28.0
//!
//! [dram]
//! capacity = 16.0
//! power_per_memory = 0.020
//!
//! [ssd]
//! capacity = 4.0
//! average_power = 3.0
//! "#;
//!
//! let registry = TechnologyRegistry::builtin();
//! let config = parse_system_config(text, "sysF.toml", true)?;
//! let (system, _defaults) = resolve(&config, &registry)?;
//!
//! let energy = system.energy_intensity().value_as("gCO2e/kWh")?;
//! assert!(energy > 150.0 && energy < 190.0);
//!
//! let cpu = &intensity_table(&system)[0];
//! let idle = cpu.split.embodied().value_in(&cpu.unit)?;
//! assert!(idle > 100.0 && idle < 160.0); // µgCO2e per second
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod config;
pub mod flows;
pub mod launch;
pub mod power;
pub mod quantity;
pub mod report;
pub mod scalar;
pub mod workload;

pub use quantity::{Dimension, QuantityError, Unit};
pub use scalar::Scalar;

/// Errors raised when model inputs violate a documented invariant.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{context}: {message}")]
    Invalid {
        context: &'static str,
        message: String,
    },
    #[error(transparent)]
    Quantity(#[from] QuantityError),
}

impl ModelError {
    pub(crate) fn invalid(context: &'static str, message: impl Into<String>) -> Self {
        Self::Invalid {
            context,
            message: message.into(),
        }
    }
}

pub type Quantity = quantity::Quantity<f64>;
pub type LaunchTechnology = launch::LaunchTechnology<f64>;
pub type RocketTechnology = launch::RocketTechnology<f64>;
pub type Propellant = launch::Propellant<f64>;
pub type ReentryModel = launch::ReentryModel<f64>;
pub type TechnologyRegistry = launch::TechnologyRegistry<f64>;
pub type Battery = power::Battery<f64>;
pub type SolarArray = power::SolarArray<f64>;
pub type CpuSpec = workload::CpuSpec<f64>;
pub type DramSpec = workload::DramSpec<f64>;
pub type SsdSpec = workload::SsdSpec<f64>;
pub type TransceiverSpec = workload::TransceiverSpec<f64>;
pub type SciSplit = workload::SciSplit<f64>;
pub type SystemHardware = workload::SystemHardware<f64>;
pub type FlowCosts = flows::FlowCosts<f64>;
pub type FlowScenario = flows::FlowScenario<f64>;
