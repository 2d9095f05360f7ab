//! Energy carbon intensity of the power supply: battery plus solar array.
//!
//! The battery amortizes its production and launch emissions over the total
//! energy cycled through it in its lifetime (cycles × capacity); the solar
//! array amortizes over the energy it can deliver across the mission at its
//! deployment site's irradiance. The system's energy intensity is the sum of
//! the two parts.

use crate::launch::{LaunchTechnology, ReentryModel};
use crate::quantity::{Dimension, Quantity, Unit};
use crate::scalar::Scalar;
use crate::ModelError;

/// Battery mass per unit capacity.
pub const BATTERY_MASS_PER_CAPACITY: f64 = 3.75; // kg/kWh
/// Battery cradle-to-gate production emissions per unit capacity.
pub const BATTERY_PRODUCTION_PER_CAPACITY: f64 = 100.0; // kgCO2e/kWh
/// Solar array mass per panel area.
pub const SOLAR_AREAL_MASS: f64 = 3.41; // kg/m^2
/// Fixed mass per panel (mounting, harness).
pub const SOLAR_PER_PANEL_MASS: f64 = 0.65; // kg
/// Fixed mass for central control, independent of panel count.
pub const SOLAR_FIXED_MASS: f64 = 0.4; // kg
/// Solar production emissions per unit of rated power.
pub const SOLAR_PRODUCTION_PER_POWER: f64 = 615.0; // kgCO2e/kW
/// Usable irradiance on the ground (atmosphere, weather-averaged).
pub const IRRADIANCE_EARTH: f64 = 400.0; // W/m^2
/// Irradiance in orbit, no atmosphere.
pub const IRRADIANCE_ORBIT: f64 = 1367.0; // W/m^2

/// Where the system operates; fixes the solar irradiance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Earth,
    Orbit,
}

impl Location {
    pub fn irradiance<T: Scalar>(self) -> Quantity<T> {
        match self {
            Location::Earth => Quantity::of(T::of(IRRADIANCE_EARTH), "W/m^2"),
            Location::Orbit => Quantity::of(T::of(IRRADIANCE_ORBIT), "W/m^2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Battery<T: Scalar> {
    capacity: Quantity<T>,
    cycles: u32,
    mass_per_capacity: Quantity<T>,
    production_per_capacity: Quantity<T>,
}

impl<T: Scalar> Battery<T> {
    pub fn new(capacity: Quantity<T>, cycles: u32) -> Result<Self, ModelError> {
        if capacity.dimension() != Dimension::ENERGY {
            return Err(ModelError::invalid(
                "battery",
                format!("capacity must be an energy, got {}", capacity.dimension()),
            ));
        }
        if capacity.canonical() <= T::zero() {
            return Err(ModelError::invalid("battery", "capacity must be > 0"));
        }
        if cycles < 1 {
            return Err(ModelError::invalid("battery", "cycles must be >= 1"));
        }
        Ok(Self {
            capacity,
            cycles,
            mass_per_capacity: Quantity::of(T::of(BATTERY_MASS_PER_CAPACITY), "kg/kWh"),
            production_per_capacity: Quantity::of(
                T::of(BATTERY_PRODUCTION_PER_CAPACITY),
                "kgCO2e/kWh",
            ),
        })
    }

    pub fn capacity(&self) -> &Quantity<T> {
        &self.capacity
    }

    pub fn cycles(&self) -> u32 {
        self.cycles
    }

    pub fn mass(&self) -> Quantity<T> {
        (&self.capacity * &self.mass_per_capacity)
            .displayed_as("kg")
            .expect("capacity times mass density is a mass")
    }

    /// Energy cycled through the battery over its whole life.
    pub fn lifetime_energy(&self) -> Quantity<T> {
        &self.capacity * T::of(f64::from(self.cycles))
    }

    pub fn production_emissions(&self) -> Quantity<T> {
        &self.capacity * &self.production_per_capacity
    }

    /// Carbon per unit of delivered energy, launch included. The time share
    /// lives in battery lifetime, not wall-clock time, so mission time does
    /// not appear.
    pub fn energy_intensity(
        &self,
        technology: &LaunchTechnology<T>,
        reentry: &ReentryModel<T>,
    ) -> Quantity<T> {
        let launch = technology
            .launch_emissions(reentry, &self.mass())
            .expect("battery mass is non-negative");
        let total = self
            .production_emissions()
            .try_add(&launch)
            .expect("carbon masses");
        (&total / &self.lifetime_energy())
            .displayed_as("gCO2e/kWh")
            .expect("carbon per energy")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolarArray<T: Scalar> {
    panel_area: Quantity<T>,
    panels: u32,
    location: Location,
    areal_mass: Quantity<T>,
    per_panel_mass: Quantity<T>,
    fixed_mass: Quantity<T>,
    production_per_power: Quantity<T>,
}

impl<T: Scalar> SolarArray<T> {
    pub fn new(
        panel_area: Quantity<T>,
        panels: u32,
        location: Location,
    ) -> Result<Self, ModelError> {
        if panel_area.dimension() != Dimension::AREA {
            return Err(ModelError::invalid(
                "solar array",
                format!("panel area must be an area, got {}", panel_area.dimension()),
            ));
        }
        if panel_area.canonical() <= T::zero() {
            return Err(ModelError::invalid("solar array", "panel area must be > 0"));
        }
        if panels < 1 {
            return Err(ModelError::invalid(
                "solar array",
                "panel count must be >= 1",
            ));
        }
        Ok(Self {
            panel_area,
            panels,
            location,
            areal_mass: Quantity::of(T::of(SOLAR_AREAL_MASS), "kg/m^2"),
            per_panel_mass: Quantity::of(T::of(SOLAR_PER_PANEL_MASS), "kg"),
            fixed_mass: Quantity::of(T::of(SOLAR_FIXED_MASS), "kg"),
            production_per_power: Quantity::of(T::of(SOLAR_PRODUCTION_PER_POWER), "kgCO2e/kW"),
        })
    }

    pub fn panel_area(&self) -> &Quantity<T> {
        &self.panel_area
    }

    pub fn panels(&self) -> u32 {
        self.panels
    }

    pub fn location(&self) -> Location {
        self.location
    }

    pub fn with_location(mut self, location: Location) -> Self {
        self.location = location;
        self
    }

    pub fn total_area(&self) -> Quantity<T> {
        &self.panel_area * T::of(f64::from(self.panels))
    }

    /// Per-panel areal and fixed masses plus the array-level fixed mass.
    pub fn mass(&self) -> Quantity<T> {
        let per_panel = (&self.areal_mass * &self.panel_area)
            .try_add(&self.per_panel_mass)
            .expect("masses");
        (&per_panel * T::of(f64::from(self.panels)))
            .try_add(&self.fixed_mass)
            .expect("masses")
            .displayed_as("kg")
            .expect("mass")
    }

    /// Power the array delivers at its deployment site.
    pub fn delivered_power(&self) -> Quantity<T> {
        (&self.location.irradiance() * &self.total_area())
            .displayed_as("W")
            .expect("irradiance times area is a power")
    }

    /// Production emissions are rated at terrestrial irradiance regardless of
    /// where the array is deployed: the hardware is the same panel.
    pub fn production_emissions(&self) -> Quantity<T> {
        let rated: Quantity<T> = &Location::Earth.irradiance() * &self.total_area();
        &rated * &self.production_per_power
    }

    /// Maximum energy the array can deliver over the mission.
    pub fn lifetime_energy(&self, mission_time: &Quantity<T>) -> Quantity<T> {
        assert!(
            mission_time.dimension() == Dimension::TIME && mission_time.canonical() > T::zero(),
            "mission time must be a positive duration"
        );
        &self.delivered_power() * mission_time
    }

    /// Carbon per unit of delivered energy, launch included.
    pub fn energy_intensity(
        &self,
        technology: &LaunchTechnology<T>,
        reentry: &ReentryModel<T>,
        mission_time: &Quantity<T>,
    ) -> Quantity<T> {
        let launch = technology
            .launch_emissions(reentry, &self.mass())
            .expect("array mass is non-negative");
        let total = self
            .production_emissions()
            .try_add(&launch)
            .expect("carbon masses");
        (&total / &self.lifetime_energy(mission_time))
            .displayed_as("gCO2e/kWh")
            .expect("carbon per energy")
    }
}

/// Energy intensity of the whole supply: battery part plus solar part.
pub fn system_energy_intensity<T: Scalar>(
    battery: &Battery<T>,
    solar: &SolarArray<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> Quantity<T> {
    battery
        .energy_intensity(technology, reentry)
        .try_add(&solar.energy_intensity(technology, reentry, mission_time))
        .expect("both are carbon per energy")
}

/// Unit in which energy intensities are reported.
pub fn energy_intensity_unit() -> Unit {
    crate::quantity::known("gCO2e/kWh")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::launch::TechnologyRegistry;

    type Q = Quantity<f64>;

    fn rel_err(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn registry() -> TechnologyRegistry<f64> {
        TechnologyRegistry::builtin()
    }

    fn reference_battery() -> Battery<f64> {
        Battery::new(Q::of(4.0, "kWh"), 5000).unwrap()
    }

    fn reference_solar(location: Location) -> SolarArray<f64> {
        SolarArray::new(Q::of(2.0, "m^2"), 1, location).unwrap()
    }

    fn five_years() -> Q {
        Q::of(5.0, "yrs")
    }

    #[test]
    fn battery_mass_examples() {
        assert_eq!(reference_battery().mass().value_as("kg").unwrap(), 15.0);
        let unit = Battery::new(Q::of(1.0, "kWh"), 1).unwrap();
        assert_eq!(unit.mass().value_as("kg").unwrap(), 3.75);
        assert!(Battery::new(Q::of(0.0, "kWh"), 100).is_err());
        assert!(Battery::new(Q::of(1.0, "kWh"), 0).is_err());
    }

    #[test]
    fn battery_intensity_on_earth() {
        // 400 kgCO2e over 20,000 kWh
        let i = reference_battery()
            .energy_intensity(&LaunchTechnology::Ground, registry().reentry())
            .value_as("gCO2e/kWh")
            .unwrap();
        assert!(rel_err(i, 400_000.0 / 20_000.0) < 1e-12);
        assert!((i - 20.0).abs() < 1e-9);
    }

    #[test]
    fn battery_intensity_on_falcon9() {
        let reg = registry();
        let f9 = reg.technology("Falcon9").unwrap();
        let combined = f9
            .combined_intensity(reg.reentry())
            .value_as("kgCO2e/kg")
            .unwrap();
        let i = reference_battery()
            .energy_intensity(f9, reg.reentry())
            .value_as("gCO2e/kWh")
            .unwrap();
        // (400 + 15 * combined) kgCO2e over 20,000 kWh
        let expected = (400.0 + 15.0 * combined) * 1000.0 / 20_000.0;
        assert!(rel_err(i, expected) < 1e-12);
        assert!((i - 154.0).abs() < 1.0, "{i}");
    }

    #[test]
    fn battery_intensity_amortizes_with_cycles() {
        let reg = registry();
        let few = Battery::new(Q::of(4.0, "kWh"), 100)
            .unwrap()
            .energy_intensity(&LaunchTechnology::Ground, reg.reentry());
        let many = Battery::new(Q::of(4.0, "kWh"), 100_000_000)
            .unwrap()
            .energy_intensity(&LaunchTechnology::Ground, reg.reentry());
        assert!(many.canonical() < few.canonical());
        assert!(many.value_as("gCO2e/kWh").unwrap() < 0.01);
    }

    #[test]
    fn solar_mass_examples() {
        // 1 panel, 2 m^2: 1*(3.41*2 + 0.65) + 0.4
        let one = reference_solar(Location::Earth)
            .mass()
            .value_as("kg")
            .unwrap();
        assert!(rel_err(one, 7.87) < 1e-12);
        // 2 panels, 1 m^2 each: 2*(3.41 + 0.65) + 0.4
        let two = SolarArray::new(Q::of(1.0, "m^2"), 2, Location::Earth)
            .unwrap()
            .mass()
            .value_as("kg")
            .unwrap();
        assert!(rel_err(two, 8.52) < 1e-12);
        assert!(SolarArray::new(Q::of(1.0, "m^2"), 0, Location::Earth).is_err());
    }

    #[test]
    fn solar_intensity_on_earth() {
        let reg = registry();
        let i = reference_solar(Location::Earth)
            .energy_intensity(&LaunchTechnology::Ground, reg.reentry(), &five_years())
            .value_as("gCO2e/kWh")
            .unwrap();
        assert!((i - 14.0).abs() < 0.1, "{i}");
    }

    #[test]
    fn solar_intensity_on_falcon9() {
        let reg = registry();
        let f9 = reg.technology("Falcon9").unwrap();
        let i = reference_solar(Location::Orbit)
            .energy_intensity(f9, reg.reentry(), &five_years())
            .value_as("gCO2e/kWh")
            .unwrap();
        assert!((i - 15.9).abs() < 0.1, "{i}");
    }

    #[test]
    fn system_intensity_reference_values() {
        let reg = registry();
        let battery = reference_battery();

        let earth = system_energy_intensity(
            &battery,
            &reference_solar(Location::Earth),
            &LaunchTechnology::Ground,
            reg.reentry(),
            &five_years(),
        );
        assert!((earth.value_as("gCO2e/kWh").unwrap() - 34.0).abs() < 0.5);

        let f9 = system_energy_intensity(
            &battery,
            &reference_solar(Location::Orbit),
            reg.technology("Falcon9").unwrap(),
            reg.reentry(),
            &five_years(),
        );
        assert!(rel_err(f9.value_as("gCO2e/kWh").unwrap(), 165.1) < 0.05);

        let stsh = system_energy_intensity(
            &battery,
            &reference_solar(Location::Orbit),
            reg.technology("Starship").unwrap(),
            reg.reentry(),
            &five_years(),
        );
        assert!(rel_err(stsh.value_as("gCO2e/kWh").unwrap(), 134.3) < 0.05);
    }

    #[test]
    fn system_intensity_is_exact_sum_of_parts() {
        let reg = registry();
        let f9 = reg.technology("Falcon9").unwrap();
        let battery = reference_battery();
        let solar = reference_solar(Location::Orbit);
        let total = system_energy_intensity(&battery, &solar, f9, reg.reentry(), &five_years());
        let sum = battery.energy_intensity(f9, reg.reentry()).canonical()
            + solar
                .energy_intensity(f9, reg.reentry(), &five_years())
                .canonical();
        assert_eq!(total.canonical(), sum);
    }

    #[test]
    fn solar_intensity_decreases_with_mission_time() {
        let reg = registry();
        let solar = reference_solar(Location::Orbit);
        let f9 = reg.technology("Falcon9").unwrap();
        let mut last = f64::INFINITY;
        for years in [1.0, 2.0, 5.0, 10.0, 20.0] {
            let i = solar
                .energy_intensity(f9, reg.reentry(), &Q::of(years, "yrs"))
                .canonical();
            assert!(i < last, "not strictly decreasing at {years} yrs");
            last = i;
        }
        // Amortization limit: a long enough mission makes the intensity
        // arbitrarily small.
        let distant = solar
            .energy_intensity(f9, reg.reentry(), &Q::of(1e9, "yrs"))
            .value_as("gCO2e/kWh")
            .unwrap();
        assert!(distant < 1e-3);
    }

    #[test]
    fn intensities_increase_with_launch_cost() {
        let reg = registry();
        let battery = reference_battery();
        let solar = reference_solar(Location::Orbit);
        let ground = LaunchTechnology::Ground;
        let stsh = reg.technology("Starship").unwrap();
        let f9 = reg.technology("Falcon9").unwrap();
        // Combined launch intensity orders Ground < Starship < Falcon9.
        let b = [
            battery.energy_intensity(&ground, reg.reentry()).canonical(),
            battery.energy_intensity(stsh, reg.reentry()).canonical(),
            battery.energy_intensity(f9, reg.reentry()).canonical(),
        ];
        assert!(b[0] < b[1] && b[1] < b[2]);
        let s = [
            solar
                .energy_intensity(&ground, reg.reentry(), &five_years())
                .canonical(),
            solar
                .energy_intensity(stsh, reg.reentry(), &five_years())
                .canonical(),
            solar
                .energy_intensity(f9, reg.reentry(), &five_years())
                .canonical(),
        ];
        assert!(s[0] < s[1] && s[1] < s[2]);
    }

    #[test]
    fn orbit_solar_beats_earth_under_starship_but_not_falcon9() {
        let reg = registry();
        let earth = reference_solar(Location::Earth)
            .energy_intensity(&LaunchTechnology::Ground, reg.reentry(), &five_years())
            .canonical();
        let stsh = reference_solar(Location::Orbit)
            .energy_intensity(
                reg.technology("Starship").unwrap(),
                reg.reentry(),
                &five_years(),
            )
            .canonical();
        let f9 = reference_solar(Location::Orbit)
            .energy_intensity(
                reg.technology("Falcon9").unwrap(),
                reg.reentry(),
                &five_years(),
            )
            .canonical();
        // The irradiance gain outweighs Starship's launch and re-entry cost.
        assert!(stsh < earth);
        // Under Falcon-9 it exceeds Earth, but by less than 15%.
        assert!(f9 > earth);
        assert!(f9 / earth < 1.15);
    }
}
