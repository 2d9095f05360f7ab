//! Unit vocabulary and label parsing.
//!
//! Labels follow the notation used in configs and reports: `kgCO2e`, `kWh`,
//! `W`, `GB`, `TB`, `Kbps`, `mm^2`, `m^2`, `yrs`, `pkt`, `1`. Compound labels
//! chain divisions left to right, so `µgCO2e/GB/s` is µgCO2e per (GB·s).

use std::borrow::Cow;
use std::fmt;

use super::{Dimension, QuantityError};

/// Seconds in one year: 365.25 days. This calendar convention is part of the
/// model's published constants (5 yrs = 157,788,000 s).
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

const D: Dimension = Dimension::NONE;
const MASS: Dimension = Dimension::MASS;
const TIME: Dimension = Dimension::TIME;
const ENERGY: Dimension = Dimension::ENERGY;
const CARBON: Dimension = Dimension::CARBON;
const DATA: Dimension = Dimension::DATA;
const PACKETS: Dimension = Dimension::PACKETS;
const LENGTH: Dimension = Dimension::LENGTH;
const AREA: Dimension = Dimension::AREA;
const POWER: Dimension = Dimension::POWER;
const DATA_RATE: Dimension = DATA.per(TIME);

/// Atomic labels: (label, dimension, scale to canonical units).
const ATOMS: &[(&str, Dimension, f64)] = &[
    // mass (canonical: g)
    ("g", MASS, 1.0),
    ("mg", MASS, 1e-3),
    ("kg", MASS, 1e3),
    ("t", MASS, 1e6),
    // length / area (canonical: m)
    ("m", LENGTH, 1.0),
    ("cm", LENGTH, 1e-2),
    ("mm", LENGTH, 1e-3),
    ("m^2", AREA, 1.0),
    ("cm^2", AREA, 1e-4),
    ("mm^2", AREA, 1e-6),
    // time (canonical: s)
    ("s", TIME, 1.0),
    ("min", TIME, 60.0),
    ("h", TIME, 3600.0),
    ("d", TIME, 86_400.0),
    ("yr", TIME, SECONDS_PER_YEAR),
    ("yrs", TIME, SECONDS_PER_YEAR),
    // energy (canonical: J)
    ("J", ENERGY, 1.0),
    ("kJ", ENERGY, 1e3),
    ("MJ", ENERGY, 1e6),
    ("Wh", ENERGY, 3600.0),
    ("kWh", ENERGY, 3.6e6),
    // power
    ("W", POWER, 1.0),
    ("mW", POWER, 1e-3),
    ("kW", POWER, 1e3),
    // carbon mass (canonical: gCO2e)
    ("gCO2e", CARBON, 1.0),
    ("µgCO2e", CARBON, 1e-6),
    ("ugCO2e", CARBON, 1e-6),
    ("mgCO2e", CARBON, 1e-3),
    ("kgCO2e", CARBON, 1e3),
    ("tCO2e", CARBON, 1e6),
    // data volume (canonical: B; decimal prefixes, as in link-rate usage)
    ("B", DATA, 1.0),
    ("KB", DATA, 1e3),
    ("MB", DATA, 1e6),
    ("GB", DATA, 1e9),
    ("TB", DATA, 1e12),
    ("bit", DATA, 0.125),
    // data rate
    ("bps", DATA_RATE, 0.125),
    ("Kbps", DATA_RATE, 125.0),
    ("Mbps", DATA_RATE, 125e3),
    ("Gbps", DATA_RATE, 125e6),
    // packets
    ("pkt", PACKETS, 1.0),
    // dimensionless counts and ratios
    ("1", D, 1.0),
];

/// A named unit: a label, its dimension, and its scale to canonical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    label: Cow<'static, str>,
    dimension: Dimension,
    scale: f64,
}

impl Unit {
    /// Resolves a label, atomic or compound (`a/b/c` = a per b per c).
    pub fn parse(label: &str) -> Result<Self, QuantityError> {
        let mut parts = label.split('/');
        let first = parts.next().unwrap_or_default();
        let (mut dimension, mut scale) = atom(first, label)?;
        for part in parts {
            let (d, s) = atom(part, label)?;
            dimension = dimension.per(d);
            scale /= s;
        }
        Ok(Self {
            label: Cow::Owned(label.to_string()),
            dimension,
            scale,
        })
    }

    /// The canonical composite unit of a dimension (scale 1), labelled from
    /// the base symbols, e.g. `gCO2e/J` for carbon per energy.
    pub fn canonical(dimension: Dimension) -> Self {
        Self {
            label: Cow::Owned(canonical_label(dimension)),
            dimension,
            scale: 1.0,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    /// Canonical units per one of this unit.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Every atomic unit in the vocabulary, for enumeration in tests.
    pub fn all_known() -> impl Iterator<Item = Unit> {
        ATOMS.iter().map(|(label, dimension, scale)| Unit {
            label: Cow::Borrowed(label),
            dimension: *dimension,
            scale: *scale,
        })
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn atom(part: &str, whole: &str) -> Result<(Dimension, f64), QuantityError> {
    ATOMS
        .iter()
        .find(|(label, _, _)| *label == part)
        .map(|(_, d, s)| (*d, *s))
        .ok_or_else(|| QuantityError::UnknownUnit(whole.to_string()))
}

/// Resolves a label known at compile time, panicking if it is not in the
/// vocabulary. For untrusted input use [`Unit::parse`].
#[track_caller]
pub fn known(label: &str) -> Unit {
    Unit::parse(label).unwrap_or_else(|e| panic!("{e}"))
}

type ExponentOf = fn(&Dimension) -> i32;

fn canonical_label(dimension: Dimension) -> String {
    const SYMBOLS: [(&str, ExponentOf); 7] = [
        ("g", |d| d.mass),
        ("m", |d| d.length),
        ("s", |d| d.time),
        ("J", |d| d.energy),
        ("gCO2e", |d| d.carbon),
        ("B", |d| d.data),
        ("pkt", |d| d.packets),
    ];
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for (symbol, exp_of) in SYMBOLS {
        let exp = exp_of(&dimension);
        if exp > 0 {
            numer.push(powered(symbol, exp));
        } else if exp < 0 {
            denom.push(powered(symbol, -exp));
        }
    }
    let numer = if numer.is_empty() {
        "1".to_string()
    } else {
        numer.join("*")
    };
    if denom.is_empty() {
        numer
    } else {
        format!("{numer}/{}", denom.join("/"))
    }
}

fn powered(symbol: &str, exp: i32) -> String {
    if exp == 1 {
        symbol.to_string()
    } else {
        format!("{symbol}^{exp}")
    }
}
