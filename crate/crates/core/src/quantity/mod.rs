//! Unit-checked quantities.
//!
//! Every value flowing through the models is a [`Quantity`]: a magnitude bound
//! to a [`Dimension`] and a display [`Unit`]. Dimensions are integer exponent
//! vectors over seven base dimensions. Carbon mass (CO2-equivalent) and data
//! volume are deliberately distinct from physical mass: converting grams to
//! grams of CO2e without an explicit intensity factor is a dimension error,
//! not a silent unit slip.
//!
//! Magnitudes are stored twice: normalized to canonical units (g, m, s, J,
//! gCO2e, B, pkt) for arithmetic, and verbatim in the display unit so that
//! emitting a parsed value reproduces its original text.

mod units;

pub use units::{known, Unit};

use std::fmt;
use std::ops::{Div, Mul};

use crate::scalar::Scalar;

/// Integer exponents over the base dimensions.
///
/// Multiplication adds exponents, division subtracts them; the arithmetic is
/// exact. `carbon` (gCO2e) and `mass` (g) are independent axes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Dimension {
    pub mass: i32,
    pub length: i32,
    pub time: i32,
    pub energy: i32,
    pub carbon: i32,
    pub data: i32,
    pub packets: i32,
}

impl Dimension {
    pub const NONE: Self = Self {
        mass: 0,
        length: 0,
        time: 0,
        energy: 0,
        carbon: 0,
        data: 0,
        packets: 0,
    };
    pub const MASS: Self = Self {
        mass: 1,
        ..Self::NONE
    };
    pub const LENGTH: Self = Self {
        length: 1,
        ..Self::NONE
    };
    pub const TIME: Self = Self {
        time: 1,
        ..Self::NONE
    };
    pub const ENERGY: Self = Self {
        energy: 1,
        ..Self::NONE
    };
    pub const CARBON: Self = Self {
        carbon: 1,
        ..Self::NONE
    };
    pub const DATA: Self = Self {
        data: 1,
        ..Self::NONE
    };
    pub const PACKETS: Self = Self {
        packets: 1,
        ..Self::NONE
    };
    pub const AREA: Self = Self {
        length: 2,
        ..Self::NONE
    };
    pub const POWER: Self = Self {
        energy: 1,
        time: -1,
        ..Self::NONE
    };

    pub const fn times(self, other: Self) -> Self {
        Self {
            mass: self.mass + other.mass,
            length: self.length + other.length,
            time: self.time + other.time,
            energy: self.energy + other.energy,
            carbon: self.carbon + other.carbon,
            data: self.data + other.data,
            packets: self.packets + other.packets,
        }
    }

    pub const fn per(self, other: Self) -> Self {
        Self {
            mass: self.mass - other.mass,
            length: self.length - other.length,
            time: self.time - other.time,
            energy: self.energy - other.energy,
            carbon: self.carbon - other.carbon,
            data: self.data - other.data,
            packets: self.packets - other.packets,
        }
    }

    pub const fn pow(self, n: i32) -> Self {
        Self {
            mass: self.mass * n,
            length: self.length * n,
            time: self.time * n,
            energy: self.energy * n,
            carbon: self.carbon * n,
            data: self.data * n,
            packets: self.packets * n,
        }
    }

    pub fn is_none(&self) -> bool {
        *self == Self::NONE
    }

    fn components(&self) -> [(&'static str, i32); 7] {
        [
            ("mass", self.mass),
            ("length", self.length),
            ("time", self.time),
            ("energy", self.energy),
            ("carbon-mass", self.carbon),
            ("data-volume", self.data),
            ("packet-count", self.packets),
        ]
    }
}

impl Mul for Dimension {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.times(rhs)
    }
}

impl Div for Dimension {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.per(rhs)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_none() {
            return write!(f, "dimensionless");
        }
        let mut parts = Vec::new();
        for (name, exp) in self.components() {
            match exp {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{exp}")),
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Errors from unit lookup and dimension checks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantityError {
    #[error("unknown unit `{0}`")]
    UnknownUnit(String),
    #[error(
        "dimension mismatch: `{found_unit}` has dimension {found}, \
         but `{expected_unit}` has dimension {expected}"
    )]
    DimensionMismatch {
        expected: Dimension,
        expected_unit: String,
        found: Dimension,
        found_unit: String,
    },
}

impl QuantityError {
    fn mismatch(expected: &Unit, found: &Unit) -> Self {
        Self::DimensionMismatch {
            expected: expected.dimension(),
            expected_unit: expected.label().to_string(),
            found: found.dimension(),
            found_unit: found.label().to_string(),
        }
    }
}

/// A magnitude bound to a dimension and a display unit.
#[derive(Debug, Clone)]
pub struct Quantity<T: Scalar> {
    canonical: T,
    value: T,
    unit: Unit,
}

impl<T: Scalar> Quantity<T> {
    /// Binds `value`, expressed in `unit`, normalizing to canonical units.
    pub fn new(value: T, unit: &Unit) -> Self {
        Self {
            canonical: value * T::of(unit.scale()),
            value,
            unit: unit.clone(),
        }
    }

    /// Shorthand for statically known unit labels.
    ///
    /// Panics on an unknown label; use [`Unit::parse`] for untrusted input.
    #[track_caller]
    pub fn of(value: T, label: &str) -> Self {
        Self::new(value, &known(label))
    }

    /// A zero magnitude of the given dimension, displayed in canonical units.
    pub fn zero(dimension: Dimension) -> Self {
        Self {
            canonical: T::zero(),
            value: T::zero(),
            unit: Unit::canonical(dimension),
        }
    }

    pub fn dimensionless(value: T) -> Self {
        Self {
            canonical: value,
            value,
            unit: Unit::canonical(Dimension::NONE),
        }
    }

    /// Magnitude in the display unit.
    pub fn value(&self) -> T {
        self.value
    }

    /// Magnitude in canonical units (g, m, s, J, gCO2e, B, pkt).
    pub fn canonical(&self) -> T {
        self.canonical
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn dimension(&self) -> Dimension {
        self.unit.dimension()
    }

    /// Magnitude expressed in `unit`, which must share this dimension.
    pub fn value_in(&self, unit: &Unit) -> Result<T, QuantityError> {
        if unit.dimension() != self.dimension() {
            return Err(QuantityError::mismatch(unit, &self.unit));
        }
        Ok(self.canonical / T::of(unit.scale()))
    }

    /// Like [`Quantity::value_in`] for statically known labels.
    #[track_caller]
    pub fn value_as(&self, label: &str) -> Result<T, QuantityError> {
        self.value_in(&known(label))
    }

    /// Re-expresses the quantity in `unit` without changing its magnitude.
    pub fn convert(&self, unit: &Unit) -> Result<Self, QuantityError> {
        let value = self.value_in(unit)?;
        Ok(Self {
            canonical: self.canonical,
            value,
            unit: unit.clone(),
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, QuantityError> {
        if self.dimension() != other.dimension() {
            return Err(QuantityError::mismatch(&self.unit, &other.unit));
        }
        Ok(Self {
            canonical: self.canonical + other.canonical,
            value: (self.canonical + other.canonical) / T::of(self.unit.scale()),
            unit: self.unit.clone(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, QuantityError> {
        if self.dimension() != other.dimension() {
            return Err(QuantityError::mismatch(&self.unit, &other.unit));
        }
        Ok(Self {
            canonical: self.canonical - other.canonical,
            value: (self.canonical - other.canonical) / T::of(self.unit.scale()),
            unit: self.unit.clone(),
        })
    }

    /// Rebinds the display unit of an arithmetic result.
    #[track_caller]
    pub fn displayed_as(&self, label: &str) -> Result<Self, QuantityError> {
        self.convert(&known(label))
    }

    fn combined(canonical: T, dimension: Dimension) -> Self {
        Self {
            canonical,
            value: canonical,
            unit: Unit::canonical(dimension),
        }
    }
}

impl<T: Scalar> PartialEq for Quantity<T> {
    /// Equality is by dimension and canonical magnitude; display units are
    /// presentation only.
    fn eq(&self, other: &Self) -> bool {
        self.dimension() == other.dimension() && self.canonical == other.canonical
    }
}

impl<T: Scalar> Mul for &Quantity<T> {
    type Output = Quantity<T>;
    fn mul(self, rhs: Self) -> Quantity<T> {
        Quantity::combined(
            self.canonical * rhs.canonical,
            self.dimension().times(rhs.dimension()),
        )
    }
}

impl<T: Scalar> Div for &Quantity<T> {
    type Output = Quantity<T>;
    fn div(self, rhs: Self) -> Quantity<T> {
        Quantity::combined(
            self.canonical / rhs.canonical,
            self.dimension().per(rhs.dimension()),
        )
    }
}

impl<T: Scalar> Mul<T> for &Quantity<T> {
    type Output = Quantity<T>;
    fn mul(self, rhs: T) -> Quantity<T> {
        Quantity {
            canonical: self.canonical * rhs,
            value: self.value * rhs,
            unit: self.unit.clone(),
        }
    }
}

impl<T: Scalar> Div<T> for &Quantity<T> {
    type Output = Quantity<T>;
    fn div(self, rhs: T) -> Quantity<T> {
        Quantity {
            canonical: self.canonical / rhs,
            value: self.value / rhs,
            unit: self.unit.clone(),
        }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Quantity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.label())
    }
}

/// Operator selector for [`combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineOp {
    Mul,
    Div,
}

/// Combines two quantities; dimension exponents are added or subtracted.
pub fn combine<T: Scalar>(a: &Quantity<T>, b: &Quantity<T>, op: CombineOp) -> Quantity<T> {
    match op {
        CombineOp::Mul => a * b,
        CombineOp::Div => a / b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
        if b == 0.0 {
            return a == 0.0;
        }
        ((a - b) / b).abs() <= tol
    }

    #[test]
    fn kilowatt_hour_to_joule() {
        let q = Quantity::of(1.0, "kWh");
        assert_eq!(q.value_as("J").unwrap(), 3.6e6);
    }

    #[test]
    fn five_years_in_seconds() {
        // 5 * 365.25 * 86400
        let q = Quantity::of(5.0, "yrs");
        assert_eq!(q.value_as("s").unwrap(), 157_788_000.0);
    }

    #[test]
    fn like_prefixed_intensity_ratio() {
        let q = Quantity::of(178.8, "kgCO2e/kg");
        assert!(rel_eq(q.value_as("gCO2e/g").unwrap(), 178.8, 1e-12));
    }

    #[test]
    fn power_times_energy_intensity() {
        let p = Quantity::of(28.0, "W");
        let i = Quantity::of(34.0, "gCO2e/kWh");
        let rate = (&p * &i).displayed_as("gCO2e/s").unwrap();
        // 28 * 34.0 / 3.6e6
        assert!(rel_eq(rate.value(), 952.0 / 3.6e6, 1e-12));
    }

    #[test]
    fn mass_times_launch_intensity() {
        let m = Quantity::of(0.1, "kg");
        let i = Quantity::of(178.8, "kgCO2e/kg");
        let e = combine(&m, &i, CombineOp::Mul);
        assert!(rel_eq(e.value_as("kgCO2e").unwrap(), 17.88, 1e-12));
    }

    #[test]
    fn self_division_is_dimensionless_one() {
        let x = Quantity::of(42.0, "GB");
        let r = &x / &x;
        assert!(r.dimension().is_none());
        assert_eq!(r.value(), 1.0);
    }

    #[test]
    fn carbon_and_physical_mass_do_not_mix() {
        let m = Quantity::of(1.0, "kg");
        let c = Quantity::of(1.0, "kgCO2e");
        let err = m.try_add(&c).unwrap_err();
        match &err {
            QuantityError::DimensionMismatch {
                expected, found, ..
            } => {
                assert_eq!(*expected, Dimension::MASS);
                assert_eq!(*found, Dimension::CARBON);
            }
            other => panic!("unexpected error: {other:?}"),
        }
        let msg = err.to_string();
        assert!(
            msg.contains("mass"),
            "diagnostic names both dimensions: {msg}"
        );
        assert!(msg.contains("carbon-mass"), "{msg}");
        assert!(m.convert(&known("kgCO2e")).is_err());
    }

    #[test]
    fn unknown_unit_is_reported() {
        let err = Unit::parse("furlong").unwrap_err();
        assert_eq!(err, QuantityError::UnknownUnit("furlong".into()));
    }

    #[test]
    fn compound_labels_parse() {
        for label in [
            "kgCO2e/kg",
            "gCO2e/kWh",
            "W/GB",
            "kg/kWh",
            "W/m^2",
            "kgCO2e/kW",
            "kg/m^2",
            "gCO2e/cm^2",
            "µgCO2e/GB/s",
            "µgCO2e/pkt",
            "s/GB",
            "kg/kg",
        ] {
            Unit::parse(label).unwrap_or_else(|e| panic!("{label}: {e}"));
        }
    }

    #[test]
    fn generic_scalar_f32() {
        let q: Quantity<f32> = Quantity::of(1.0, "kWh");
        assert_eq!(q.value_as("J").unwrap(), 3.6e6_f32);
    }

    fn arb_unit() -> impl Strategy<Value = Unit> {
        prop::sample::select(vec![
            "g", "kg", "t", "s", "min", "h", "d", "yr", "J", "kWh", "Wh", "W", "kW", "gCO2e",
            "kgCO2e", "tCO2e", "µgCO2e", "B", "KB", "GB", "TB", "bit", "Kbps", "Mbps", "m", "mm",
            "m^2", "mm^2", "pkt",
        ])
        .prop_map(|label| known(label))
    }

    proptest! {
        #[test]
        fn convert_round_trip_within_1e12(
            value in -1e9_f64..1e9,
            unit in arb_unit(),
        ) {
            // Round trip through every same-dimension unit in the table.
            let q = Quantity::new(value, &unit);
            for other in Unit::all_known() {
                if other.dimension() == unit.dimension() {
                    let there = q.convert(&other).unwrap();
                    let back = there.convert(&unit).unwrap();
                    prop_assert!(rel_eq(back.value(), value, 1e-12),
                        "{value} {} -> {} -> back: {}", unit.label(), other.label(), back.value());
                }
            }
        }

        #[test]
        fn dimension_algebra_commutative_associative(
            a in arb_dimension(), b in arb_dimension(), c in arb_dimension(),
        ) {
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * Dimension::NONE, a);
            prop_assert_eq!(a / a, Dimension::NONE);
        }
    }

    fn arb_dimension() -> impl Strategy<Value = Dimension> {
        let e = -3i32..=3;
        (
            e.clone(),
            e.clone(),
            e.clone(),
            e.clone(),
            e.clone(),
            e.clone(),
            e,
        )
            .prop_map(
                |(mass, length, time, energy, carbon, data, packets)| Dimension {
                    mass,
                    length,
                    time,
                    energy,
                    carbon,
                    data,
                    packets,
                },
            )
    }
}
