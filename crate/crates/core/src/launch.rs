//! Launch and re-entry carbon intensities per kilogram of payload.
//!
//! A two-stage rocket amortizes each stage's production emissions over its
//! reuse count and adds the fuel burn, normalized by payload capacity.
//! Re-entry ablation of the non-reusable mass produces reactive nitrogen;
//! its warming effect is charged per kilogram of re-entering mass (payload
//! plus any expendable hardware such as a second stage and fairing).
//!
//! Technologies are data, not code: the built-in registry ships as a bundled
//! file and user registries can define additional technologies.

use std::collections::BTreeMap;

use crate::quantity::{Dimension, Quantity};
use crate::scalar::Scalar;
use crate::ModelError;

/// Carbon intensity of burning one unit mass of a propellant.
#[derive(Debug, Clone, PartialEq)]
pub struct Propellant<T: Scalar> {
    name: String,
    intensity: Quantity<T>,
}

impl<T: Scalar> Propellant<T> {
    pub fn new(name: impl Into<String>, intensity: Quantity<T>) -> Result<Self, ModelError> {
        let name = name.into();
        expect_dimension("propellant intensity", &intensity, CARBON_PER_MASS)?;
        if intensity.canonical() < T::zero() {
            return Err(ModelError::invalid(
                "propellant",
                format!("`{name}` has negative intensity"),
            ));
        }
        Ok(Self { name, intensity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn intensity(&self) -> &Quantity<T> {
        &self.intensity
    }
}

/// Re-entry ablation constants: NOx released per kilogram of burned mass and
/// its warming potential in CO2-equivalents.
#[derive(Debug, Clone, PartialEq)]
pub struct ReentryModel<T: Scalar> {
    nox_yield: Quantity<T>,
    nox_gwp_factor: Quantity<T>,
}

impl<T: Scalar> ReentryModel<T> {
    pub fn new(nox_yield: Quantity<T>, nox_gwp_factor: Quantity<T>) -> Result<Self, ModelError> {
        expect_dimension("NOx yield", &nox_yield, Dimension::NONE)?;
        expect_dimension("NOx warming factor", &nox_gwp_factor, CARBON_PER_MASS)?;
        if nox_yield.canonical() < T::zero() || nox_gwp_factor.canonical() < T::zero() {
            return Err(ModelError::invalid(
                "re-entry model",
                "yield and warming factor must be non-negative",
            ));
        }
        Ok(Self {
            nox_yield,
            nox_gwp_factor,
        })
    }

    pub fn nox_yield(&self) -> &Quantity<T> {
        &self.nox_yield
    }

    pub fn nox_gwp_factor(&self) -> &Quantity<T> {
        &self.nox_gwp_factor
    }

    /// Carbon intensity per kilogram of re-entering mass (yield × warming
    /// factor; 119.2 kgCO2e/kg with the built-in constants).
    pub fn base_intensity(&self) -> Quantity<T> {
        &self.nox_yield * &self.nox_gwp_factor
    }
}

/// How a technology's fuel burn is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum FuelLoad<T: Scalar> {
    /// Per-propellant masses; emissions are the mass-weighted intensity sum.
    Manifest(Vec<(Propellant<T>, Quantity<T>)>),
    /// A single aggregate figure for the whole burn.
    Aggregate(Quantity<T>),
}

/// A two-stage launch vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct RocketTechnology<T: Scalar> {
    name: String,
    production_first: Quantity<T>,
    production_second: Quantity<T>,
    fuel: FuelLoad<T>,
    payload_capacity: Quantity<T>,
    reuse_first: u32,
    reuse_second: u32,
    reentry_extra_mass: Quantity<T>,
}

impl<T: Scalar> RocketTechnology<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        production_first: Quantity<T>,
        production_second: Quantity<T>,
        fuel: FuelLoad<T>,
        payload_capacity: Quantity<T>,
        reuse_first: u32,
        reuse_second: u32,
        reentry_extra_mass: Quantity<T>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let ctx = "launch technology";
        expect_dimension(
            "first-stage production emissions",
            &production_first,
            Dimension::CARBON,
        )?;
        expect_dimension(
            "second-stage production emissions",
            &production_second,
            Dimension::CARBON,
        )?;
        expect_dimension("payload capacity", &payload_capacity, Dimension::MASS)?;
        expect_dimension("re-entry extra mass", &reentry_extra_mass, Dimension::MASS)?;
        if production_first.canonical() < T::zero() || production_second.canonical() < T::zero() {
            return Err(ModelError::invalid(
                ctx,
                format!("`{name}`: production emissions must be >= 0"),
            ));
        }
        if payload_capacity.canonical() <= T::zero() {
            return Err(ModelError::invalid(
                ctx,
                format!("`{name}`: payload capacity must be > 0"),
            ));
        }
        if reuse_first < 1 || reuse_second < 1 {
            return Err(ModelError::invalid(
                ctx,
                format!("`{name}`: reuse counts must be >= 1"),
            ));
        }
        if reentry_extra_mass.canonical() < T::zero() {
            return Err(ModelError::invalid(
                ctx,
                format!("`{name}`: re-entry extra mass must be >= 0"),
            ));
        }
        match &fuel {
            FuelLoad::Manifest(entries) => {
                if entries.is_empty() {
                    return Err(ModelError::invalid(
                        ctx,
                        format!("`{name}`: fuel manifest is empty and no aggregate figure is set"),
                    ));
                }
                for (propellant, mass) in entries {
                    expect_dimension("fuel mass", mass, Dimension::MASS)?;
                    if mass.canonical() < T::zero() {
                        return Err(ModelError::invalid(
                            ctx,
                            format!(
                                "`{name}`: negative mass for propellant `{}`",
                                propellant.name()
                            ),
                        ));
                    }
                }
            }
            FuelLoad::Aggregate(total) => {
                expect_dimension("fuel emissions", total, Dimension::CARBON)?;
                if total.canonical() < T::zero() {
                    return Err(ModelError::invalid(
                        ctx,
                        format!("`{name}`: fuel emissions must be >= 0"),
                    ));
                }
            }
        }
        Ok(Self {
            name,
            production_first,
            production_second,
            fuel,
            payload_capacity,
            reuse_first,
            reuse_second,
            reentry_extra_mass,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn payload_capacity(&self) -> &Quantity<T> {
        &self.payload_capacity
    }

    pub fn reentry_extra_mass(&self) -> &Quantity<T> {
        &self.reentry_extra_mass
    }
}

/// A launch choice: stay on the ground, or ride a [`RocketTechnology`].
#[derive(Debug, Clone, PartialEq)]
pub enum LaunchTechnology<T: Scalar> {
    /// No launch: every launch-related intensity is exactly zero.
    Ground,
    Rocket(Box<RocketTechnology<T>>),
}

pub const GROUND_NAME: &str = "None";

impl<T: Scalar> LaunchTechnology<T> {
    pub fn name(&self) -> &str {
        match self {
            Self::Ground => GROUND_NAME,
            Self::Rocket(rocket) => rocket.name(),
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Self::Ground)
    }

    /// Total carbon emitted by one launch's fuel burn.
    pub fn fuel_emissions(&self) -> Quantity<T> {
        match self {
            Self::Ground => Quantity::zero(Dimension::CARBON),
            Self::Rocket(rocket) => match &rocket.fuel {
                FuelLoad::Aggregate(total) => total.clone(),
                FuelLoad::Manifest(entries) => {
                    let mut total = Quantity::zero(Dimension::CARBON);
                    for (propellant, mass) in entries {
                        total = total
                            .try_add(&(mass * propellant.intensity()))
                            .expect("manifest terms are carbon masses");
                    }
                    total
                }
            },
        }
    }

    /// Fuel burn normalized by payload capacity.
    pub fn fuel_intensity(&self) -> Quantity<T> {
        match self {
            Self::Ground => Quantity::zero(CARBON_PER_MASS),
            Self::Rocket(rocket) => &self.fuel_emissions() / &rocket.payload_capacity,
        }
    }

    /// Launch carbon per kilogram of payload: reuse-amortized stage
    /// production plus fuel, divided by payload capacity.
    pub fn launch_intensity(&self) -> Quantity<T> {
        match self {
            Self::Ground => Quantity::zero(CARBON_PER_MASS),
            Self::Rocket(rocket) => {
                let per_launch = (&rocket.production_first / T::of(f64::from(rocket.reuse_first)))
                    .try_add(&(&rocket.production_second / T::of(f64::from(rocket.reuse_second))))
                    .and_then(|c| c.try_add(&self.fuel_emissions()))
                    .expect("launch emission terms are carbon masses");
                &per_launch / &rocket.payload_capacity
            }
        }
    }

    /// Re-entry carbon per kilogram of payload. The payload always burns;
    /// any expendable extra mass (second stage, fairing) is charged on top,
    /// normalized by payload capacity.
    pub fn reentry_intensity(&self, reentry: &ReentryModel<T>) -> Quantity<T> {
        match self {
            Self::Ground => Quantity::zero(CARBON_PER_MASS),
            Self::Rocket(rocket) => {
                let reentering = rocket
                    .payload_capacity
                    .try_add(&rocket.reentry_extra_mass)
                    .expect("masses");
                let ratio = &reentering / &rocket.payload_capacity;
                &reentry.base_intensity() * ratio.canonical()
            }
        }
    }

    /// Combined launch + re-entry intensity per kilogram of payload.
    pub fn combined_intensity(&self, reentry: &ReentryModel<T>) -> Quantity<T> {
        self.launch_intensity()
            .try_add(&self.reentry_intensity(reentry))
            .expect("both are carbon per mass")
    }

    /// Launch + re-entry emissions attributed to a component of mass `m`.
    pub fn launch_emissions(
        &self,
        reentry: &ReentryModel<T>,
        mass: &Quantity<T>,
    ) -> Result<Quantity<T>, ModelError> {
        expect_dimension("component mass", mass, Dimension::MASS)?;
        if mass.canonical() < T::zero() {
            return Err(ModelError::invalid(
                "launch emissions",
                "component mass must be >= 0",
            ));
        }
        Ok(mass * &self.combined_intensity(reentry))
    }
}

/// Named launch technologies plus the shared propellant and re-entry
/// constants they reference. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnologyRegistry<T: Scalar> {
    reentry: ReentryModel<T>,
    propellants: BTreeMap<String, Propellant<T>>,
    technologies: BTreeMap<String, LaunchTechnology<T>>,
}

impl<T: Scalar> TechnologyRegistry<T> {
    pub fn new(
        reentry: ReentryModel<T>,
        propellants: Vec<Propellant<T>>,
        technologies: Vec<LaunchTechnology<T>>,
    ) -> Result<Self, ModelError> {
        let mut registry = Self {
            reentry,
            propellants: BTreeMap::new(),
            technologies: BTreeMap::new(),
        };
        registry
            .technologies
            .insert(GROUND_NAME.to_string(), LaunchTechnology::Ground);
        for propellant in propellants {
            if registry
                .propellants
                .insert(propellant.name().to_string(), propellant.clone())
                .is_some()
            {
                return Err(ModelError::invalid(
                    "registry",
                    format!("duplicate propellant `{}`", propellant.name()),
                ));
            }
        }
        for technology in technologies {
            let name = technology.name().to_string();
            if name == GROUND_NAME && !technology.is_ground() {
                return Err(ModelError::invalid(
                    "registry",
                    format!("`{GROUND_NAME}` is reserved for the no-launch technology"),
                ));
            }
            if registry
                .technologies
                .insert(name.clone(), technology)
                .is_some()
                && name != GROUND_NAME
            {
                return Err(ModelError::invalid(
                    "registry",
                    format!("duplicate technology `{name}`"),
                ));
            }
        }
        Ok(registry)
    }

    pub fn reentry(&self) -> &ReentryModel<T> {
        &self.reentry
    }

    pub fn propellant(&self, name: &str) -> Option<&Propellant<T>> {
        self.propellants.get(name)
    }

    pub fn technology(&self, name: &str) -> Option<&LaunchTechnology<T>> {
        self.technologies.get(name)
    }

    pub fn technology_names(&self) -> impl Iterator<Item = &str> {
        self.technologies.keys().map(String::as_str)
    }
}

impl TechnologyRegistry<f64> {
    /// The registry bundled with the crate: no-launch, Falcon9, Starship
    /// (green-methane manifest), and StarshipNonGreen (fossil methane).
    pub fn builtin() -> Self {
        crate::config::parse_registry_str(BUILTIN_REGISTRY, "<builtin registry>")
            .expect("bundled registry is valid")
    }
}

const BUILTIN_REGISTRY: &str = include_str!("../data/registry.toml");

const CARBON_PER_MASS: Dimension = Dimension::CARBON.per(Dimension::MASS);

fn expect_dimension<T: Scalar>(
    what: &'static str,
    quantity: &Quantity<T>,
    dimension: Dimension,
) -> Result<(), ModelError> {
    if quantity.dimension() != dimension {
        return Err(ModelError::invalid(
            what,
            format!(
                "expected dimension {dimension}, got {} (`{}`)",
                quantity.dimension(),
                quantity.unit().label()
            ),
        ));
    }
    Ok(())
}
