//! Per-component workload intensities, split into embodied and operational
//! parts.
//!
//! Embodied intensity amortizes production plus launch and re-entry emissions
//! over the mission: per second of CPU time, per GB·s of held memory or
//! storage, per transmitted packet. Operational intensity is the component's
//! power draw times the system's energy carbon intensity. Idle hardware costs
//! M; hardware at full load costs O+M.

use crate::launch::{LaunchTechnology, ReentryModel};
use crate::power::{system_energy_intensity, Battery, SolarArray};
use crate::quantity::{known, Dimension, Quantity, Unit};
use crate::scalar::Scalar;
use crate::ModelError;

/// CPU production emissions per die area.
pub const CPU_PRODUCTION_PER_AREA: f64 = 250.0; // gCO2e/cm^2
/// Maximum transmission unit assumed for packet accounting.
pub const MTU_BYTES: f64 = 1500.0; // B

/// Calibrated defaults for parameters the config format leaves optional.
/// They reproduce the reference intensity table; override them in the config
/// when measured data is available.
pub mod defaults {
    /// DRAM production emissions per capacity.
    pub const DRAM_PRODUCTION_PER_GB: f64 = 473.0; // gCO2e/GB
    /// DRAM module mass.
    pub const DRAM_MASS: f64 = 15.0; // g
    /// SSD production emissions per capacity.
    pub const SSD_PRODUCTION_PER_GB: f64 = 6.3; // gCO2e/GB
    /// SSD mass.
    pub const SSD_MASS: f64 = 60.0; // g
    /// Transceiver production emissions.
    pub const TRANSCEIVER_PRODUCTION: f64 = 2120.0; // gCO2e
}

/// An intensity split into embodied (M) and operational (O) parts.
///
/// The total is always the exact sum of the two parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SciSplit<T: Scalar> {
    embodied: Quantity<T>,
    operational: Quantity<T>,
}

impl<T: Scalar> SciSplit<T> {
    pub fn new(embodied: Quantity<T>, operational: Quantity<T>) -> Result<Self, ModelError> {
        if embodied.dimension() != operational.dimension() {
            return Err(ModelError::invalid(
                "intensity split",
                format!(
                    "embodied ({}) and operational ({}) parts differ in dimension",
                    embodied.dimension(),
                    operational.dimension()
                ),
            ));
        }
        if embodied.canonical() < T::zero() || operational.canonical() < T::zero() {
            return Err(ModelError::invalid(
                "intensity split",
                "intensities must be non-negative",
            ));
        }
        Ok(Self {
            embodied,
            operational,
        })
    }

    /// Embodied part: what idle hardware costs.
    pub fn embodied(&self) -> &Quantity<T> {
        &self.embodied
    }

    /// Operational part: what running at the stated power adds.
    pub fn operational(&self) -> &Quantity<T> {
        &self.operational
    }

    /// Full-load intensity, O + M.
    pub fn total(&self) -> Quantity<T> {
        self.embodied
            .try_add(&self.operational)
            .expect("parts share a dimension")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpuSpec<T: Scalar> {
    mass: Quantity<T>,
    die_area: Quantity<T>,
    max_power: Quantity<T>,
    production_per_area: Quantity<T>,
}

impl<T: Scalar> CpuSpec<T> {
    pub fn new(
        mass: Quantity<T>,
        die_area: Quantity<T>,
        max_power: Quantity<T>,
    ) -> Result<Self, ModelError> {
        check("cpu", "mass", &mass, Dimension::MASS, Positivity::Strict)?;
        check(
            "cpu",
            "die area",
            &die_area,
            Dimension::AREA,
            Positivity::Strict,
        )?;
        check(
            "cpu",
            "max power",
            &max_power,
            Dimension::POWER,
            Positivity::NonNegative,
        )?;
        Ok(Self {
            mass,
            die_area,
            max_power,
            production_per_area: Quantity::of(T::of(CPU_PRODUCTION_PER_AREA), "gCO2e/cm^2"),
        })
    }

    pub fn mass(&self) -> &Quantity<T> {
        &self.mass
    }

    pub fn die_area(&self) -> &Quantity<T> {
        &self.die_area
    }

    pub fn max_power(&self) -> &Quantity<T> {
        &self.max_power
    }

    pub fn production_emissions(&self) -> Quantity<T> {
        &self.production_per_area * &self.die_area
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DramSpec<T: Scalar> {
    capacity: Quantity<T>,
    power_per_capacity: Quantity<T>,
    mass: Quantity<T>,
    production_per_capacity: Quantity<T>,
}

impl<T: Scalar> DramSpec<T> {
    pub fn new(
        capacity: Quantity<T>,
        power_per_capacity: Quantity<T>,
        mass: Quantity<T>,
        production_per_capacity: Quantity<T>,
    ) -> Result<Self, ModelError> {
        check(
            "dram",
            "capacity",
            &capacity,
            Dimension::DATA,
            Positivity::Strict,
        )?;
        check(
            "dram",
            "power per held memory",
            &power_per_capacity,
            Dimension::POWER.per(Dimension::DATA),
            Positivity::NonNegative,
        )?;
        check("dram", "mass", &mass, Dimension::MASS, Positivity::Strict)?;
        check(
            "dram",
            "production emissions",
            &production_per_capacity,
            Dimension::CARBON.per(Dimension::DATA),
            Positivity::NonNegative,
        )?;
        Ok(Self {
            capacity,
            power_per_capacity,
            mass,
            production_per_capacity,
        })
    }

    pub fn capacity(&self) -> &Quantity<T> {
        &self.capacity
    }

    pub fn power_per_capacity(&self) -> &Quantity<T> {
        &self.power_per_capacity
    }

    pub fn mass(&self) -> &Quantity<T> {
        &self.mass
    }

    pub fn production_emissions(&self) -> Quantity<T> {
        &self.production_per_capacity * &self.capacity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsdSpec<T: Scalar> {
    capacity: Quantity<T>,
    average_power: Quantity<T>,
    mass: Quantity<T>,
    production_per_capacity: Quantity<T>,
}

impl<T: Scalar> SsdSpec<T> {
    pub fn new(
        capacity: Quantity<T>,
        average_power: Quantity<T>,
        mass: Quantity<T>,
        production_per_capacity: Quantity<T>,
    ) -> Result<Self, ModelError> {
        check(
            "ssd",
            "capacity",
            &capacity,
            Dimension::DATA,
            Positivity::Strict,
        )?;
        check(
            "ssd",
            "average power",
            &average_power,
            Dimension::POWER,
            Positivity::NonNegative,
        )?;
        check("ssd", "mass", &mass, Dimension::MASS, Positivity::Strict)?;
        check(
            "ssd",
            "production emissions",
            &production_per_capacity,
            Dimension::CARBON.per(Dimension::DATA),
            Positivity::NonNegative,
        )?;
        Ok(Self {
            capacity,
            average_power,
            mass,
            production_per_capacity,
        })
    }

    pub fn capacity(&self) -> &Quantity<T> {
        &self.capacity
    }

    pub fn average_power(&self) -> &Quantity<T> {
        &self.average_power
    }

    pub fn mass(&self) -> &Quantity<T> {
        &self.mass
    }

    pub fn production_emissions(&self) -> Quantity<T> {
        &self.production_per_capacity * &self.capacity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverSpec<T: Scalar> {
    mass: Quantity<T>,
    power: Quantity<T>,
    data_rate: Quantity<T>,
    mtu: Quantity<T>,
    production: Quantity<T>,
}

impl<T: Scalar> TransceiverSpec<T> {
    pub fn new(
        mass: Quantity<T>,
        power: Quantity<T>,
        data_rate: Quantity<T>,
        production: Quantity<T>,
    ) -> Result<Self, ModelError> {
        check(
            "transceiver",
            "mass",
            &mass,
            Dimension::MASS,
            Positivity::Strict,
        )?;
        check(
            "transceiver",
            "power",
            &power,
            Dimension::POWER,
            Positivity::NonNegative,
        )?;
        check(
            "transceiver",
            "data rate",
            &data_rate,
            Dimension::DATA.per(Dimension::TIME),
            Positivity::Strict,
        )?;
        check(
            "transceiver",
            "production emissions",
            &production,
            Dimension::CARBON,
            Positivity::NonNegative,
        )?;
        Ok(Self {
            mass,
            power,
            data_rate,
            mtu: Quantity::of(T::of(MTU_BYTES), "B"),
            production,
        })
    }

    pub fn mass(&self) -> &Quantity<T> {
        &self.mass
    }

    pub fn power(&self) -> &Quantity<T> {
        &self.power
    }

    pub fn data_rate(&self) -> &Quantity<T> {
        &self.data_rate
    }

    pub fn mtu(&self) -> &Quantity<T> {
        &self.mtu
    }

    pub fn production_emissions(&self) -> &Quantity<T> {
        &self.production
    }

    /// Time on air for one MTU-sized packet.
    pub fn transmission_time(&self) -> Quantity<T> {
        &self.mtu / &self.data_rate
    }
}

/// Embodied emissions of a component: production plus launch and re-entry.
fn total_embodied<T: Scalar>(
    production: &Quantity<T>,
    mass: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
) -> Quantity<T> {
    let launch = technology
        .launch_emissions(reentry, mass)
        .expect("component masses are validated non-negative");
    production.try_add(&launch).expect("carbon masses")
}

/// CPU intensity per second of full-core usage.
pub fn cpu_intensity<T: Scalar>(
    cpu: &CpuSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> SciSplit<T> {
    let embodied =
        &total_embodied(&cpu.production_emissions(), &cpu.mass, technology, reentry) / mission_time;
    let operational = &cpu.max_power * energy_intensity;
    SciSplit::new(embodied, operational).expect("carbon per time")
}

/// DRAM intensity per GB held per second.
pub fn dram_intensity<T: Scalar>(
    dram: &DramSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> SciSplit<T> {
    let embodied = &(&total_embodied(
        &dram.production_emissions(),
        &dram.mass,
        technology,
        reentry,
    ) / mission_time)
        / &dram.capacity;
    let operational = &dram.power_per_capacity * energy_intensity;
    SciSplit::new(embodied, operational).expect("carbon per data per time")
}

/// SSD intensity per GB stored per second.
pub fn ssd_intensity<T: Scalar>(
    ssd: &SsdSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> SciSplit<T> {
    let embodied = &(&total_embodied(&ssd.production_emissions(), &ssd.mass, technology, reentry)
        / mission_time)
        / &ssd.capacity;
    let operational = &(&ssd.average_power / &ssd.capacity) * energy_intensity;
    SciSplit::new(embodied, operational).expect("carbon per data per time")
}

/// Transceiver intensity per transmitted packet.
///
/// The embodied part books the transmission-time share of the transceiver's
/// total embodied emissions to each packet, which presumes the link is busy
/// for the whole mission.
pub fn packet_intensity<T: Scalar>(
    transceiver: &TransceiverSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> SciSplit<T> {
    let one_packet: Quantity<T> = Quantity::of(T::one(), "pkt");
    let transmission = transceiver.transmission_time();
    let time_share = &transmission / mission_time;
    let total = total_embodied(
        &transceiver.production,
        &transceiver.mass,
        technology,
        reentry,
    );
    let embodied = &(&time_share * &total) / &one_packet;
    let packet_energy = &transmission * &transceiver.power;
    let operational = &(&packet_energy * energy_intensity) / &one_packet;
    SciSplit::new(embodied, operational).expect("carbon per packet")
}

/// The components of the intensity table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Cpu,
    Dram,
    Ssd,
    Transceiver,
}

impl Component {
    pub const ALL: [Component; 4] = [
        Component::Cpu,
        Component::Dram,
        Component::Ssd,
        Component::Transceiver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Cpu => "CPU",
            Component::Dram => "DRAM",
            Component::Ssd => "SSD",
            Component::Transceiver => "Transceiver",
        }
    }

    /// Unit the table reports this component in.
    pub fn table_unit(self) -> Unit {
        match self {
            Component::Cpu => known("µgCO2e/s"),
            Component::Dram | Component::Ssd => known("µgCO2e/GB/s"),
            Component::Transceiver => known("µgCO2e/pkt"),
        }
    }
}

/// One row of the intensity table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentIntensity<T: Scalar> {
    pub component: Component,
    pub unit: Unit,
    pub split: SciSplit<T>,
}

/// A fully resolved system: every hardware parameter bound, the launch
/// technology and re-entry constants attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemHardware<T: Scalar> {
    pub mission_time: Quantity<T>,
    pub technology: LaunchTechnology<T>,
    pub reentry: ReentryModel<T>,
    pub solar: SolarArray<T>,
    pub battery: Battery<T>,
    pub cpu: CpuSpec<T>,
    pub dram: DramSpec<T>,
    pub ssd: SsdSpec<T>,
    pub transceiver: TransceiverSpec<T>,
}

impl<T: Scalar> SystemHardware<T> {
    /// Energy carbon intensity of this system's power supply.
    pub fn energy_intensity(&self) -> Quantity<T> {
        system_energy_intensity(
            &self.battery,
            &self.solar,
            &self.technology,
            &self.reentry,
            &self.mission_time,
        )
    }

    /// The same hardware dimensioned for a different mission duration.
    pub fn with_mission_time(&self, mission_time: Quantity<T>) -> Self {
        let mut system = self.clone();
        system.mission_time = mission_time;
        system
    }

    pub fn cpu_intensity(&self, energy_intensity: &Quantity<T>) -> SciSplit<T> {
        cpu_intensity(
            &self.cpu,
            energy_intensity,
            &self.technology,
            &self.reentry,
            &self.mission_time,
        )
    }
}

/// One row per component with M and O+M in the table's units.
pub fn intensity_table<T: Scalar>(system: &SystemHardware<T>) -> Vec<ComponentIntensity<T>> {
    let energy = system.energy_intensity();
    Component::ALL
        .iter()
        .map(|&component| {
            let split = match component {
                Component::Cpu => cpu_intensity(
                    &system.cpu,
                    &energy,
                    &system.technology,
                    &system.reentry,
                    &system.mission_time,
                ),
                Component::Dram => dram_intensity(
                    &system.dram,
                    &energy,
                    &system.technology,
                    &system.reentry,
                    &system.mission_time,
                ),
                Component::Ssd => ssd_intensity(
                    &system.ssd,
                    &energy,
                    &system.technology,
                    &system.reentry,
                    &system.mission_time,
                ),
                Component::Transceiver => packet_intensity(
                    &system.transceiver,
                    &energy,
                    &system.technology,
                    &system.reentry,
                    &system.mission_time,
                ),
            };
            ComponentIntensity {
                component,
                unit: component.table_unit(),
                split,
            }
        })
        .collect()
}

enum Positivity {
    Strict,
    NonNegative,
}

fn check<T: Scalar>(
    component: &'static str,
    field: &str,
    quantity: &Quantity<T>,
    dimension: Dimension,
    positivity: Positivity,
) -> Result<(), ModelError> {
    if quantity.dimension() != dimension {
        return Err(ModelError::invalid(
            component,
            format!(
                "{field}: expected dimension {dimension}, got {}",
                quantity.dimension()
            ),
        ));
    }
    match positivity {
        Positivity::Strict if quantity.canonical() <= T::zero() => Err(ModelError::invalid(
            component,
            format!("{field} must be > 0"),
        )),
        Positivity::NonNegative if quantity.canonical() < T::zero() => Err(ModelError::invalid(
            component,
            format!("{field} must be >= 0"),
        )),
        _ => Ok(()),
    }
}
