//! Orbit-vs-ground placement of a data-processing flow.
//!
//! Space-native data is produced at a satellite, crosses `n` inter-satellite
//! links and one ground-station link, and is processed either in orbit
//! (before the link crossings, shrinking the traffic to a fraction `f` of
//! the raw volume) or on the ground (raw data crosses the links unreduced).
//! All intensities here are per unit of raw data volume.
//!
//! The orbit-minus-ground difference is linear in the hop count with slope
//! `(f - 1) * isl <= 0`, so each fixed aggregation rate has at most one
//! crossing and the preference frontier over an (f, n) grid is a staircase.

use crate::launch::{LaunchTechnology, ReentryModel};
use crate::quantity::{Dimension, Quantity};
use crate::scalar::Scalar;
use crate::workload::{cpu_intensity, packet_intensity, CpuSpec, TransceiverSpec};
use crate::ModelError;

/// Relative tolerance under which the two placements count as tied.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-9;

const CARBON_PER_DATA: Dimension = Dimension::CARBON.per(Dimension::DATA);

/// Per-unit-of-raw-data cost template: link intensities and processing
/// intensities for both placements. Aggregation rate and hop count vary on
/// top of this.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowCosts<T: Scalar> {
    isl: Quantity<T>,
    gsl: Quantity<T>,
    processing_orbit: Quantity<T>,
    processing_ground: Quantity<T>,
}

impl<T: Scalar> FlowCosts<T> {
    pub fn new(
        isl: Quantity<T>,
        gsl: Quantity<T>,
        processing_orbit: Quantity<T>,
        processing_ground: Quantity<T>,
    ) -> Result<Self, ModelError> {
        for (name, q) in [
            ("inter-satellite link intensity", &isl),
            ("ground-station link intensity", &gsl),
            ("orbit processing intensity", &processing_orbit),
            ("ground processing intensity", &processing_ground),
        ] {
            if q.dimension() != CARBON_PER_DATA {
                return Err(ModelError::invalid(
                    "flow scenario",
                    format!(
                        "{name} must be carbon per data volume, got {}",
                        q.dimension()
                    ),
                ));
            }
            if q.canonical() < T::zero() {
                return Err(ModelError::invalid(
                    "flow scenario",
                    format!("{name} must be >= 0"),
                ));
            }
        }
        Ok(Self {
            isl,
            gsl,
            processing_orbit,
            processing_ground,
        })
    }

    pub fn isl(&self) -> &Quantity<T> {
        &self.isl
    }

    pub fn gsl(&self) -> &Quantity<T> {
        &self.gsl
    }

    pub fn processing_orbit(&self) -> &Quantity<T> {
        &self.processing_orbit
    }

    pub fn processing_ground(&self) -> &Quantity<T> {
        &self.processing_ground
    }
}

/// A cost template bound to one aggregation rate and hop count.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowScenario<T: Scalar> {
    costs: FlowCosts<T>,
    aggregation: T,
    hops: u32,
}

impl<T: Scalar> FlowScenario<T> {
    pub fn new(costs: FlowCosts<T>, aggregation: T, hops: u32) -> Result<Self, ModelError> {
        check_aggregation(aggregation)?;
        Ok(Self {
            costs,
            aggregation,
            hops,
        })
    }

    pub fn costs(&self) -> &FlowCosts<T> {
        &self.costs
    }

    pub fn aggregation(&self) -> T {
        self.aggregation
    }

    pub fn hops(&self) -> u32 {
        self.hops
    }
}

/// Where the processing runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Orbit,
    Ground,
}

/// Frontier cell: the placement with strictly smaller flow intensity, or a
/// tie within [`TIE_RELATIVE_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Orbit,
    Ground,
    Tie,
}

impl Preference {
    /// Single-letter cell label for grid files.
    pub fn letter(self) -> char {
        match self {
            Preference::Orbit => 'O',
            Preference::Ground => 'G',
            Preference::Tie => 'T',
        }
    }
}

/// Link cost of shipping one unit of raw data reduced to `aggregation` of
/// its volume across `hops` inter-satellite links and one downlink.
pub fn network_intensity<T: Scalar>(
    aggregation: T,
    hops: u32,
    isl: &Quantity<T>,
    gsl: &Quantity<T>,
) -> Result<Quantity<T>, ModelError> {
    check_aggregation(aggregation)?;
    let per_hop = (isl * T::of(f64::from(hops))).try_add(gsl)?;
    Ok(&per_hop * aggregation)
}

/// Flow intensity of one placement: processing plus network. Ground
/// placement ships the raw volume, so its network term does not shrink.
pub fn flow_intensity<T: Scalar>(placement: Placement, scenario: &FlowScenario<T>) -> Quantity<T> {
    let costs = &scenario.costs;
    let network_rate = match placement {
        Placement::Orbit => scenario.aggregation,
        Placement::Ground => T::one(),
    };
    let network = network_intensity(network_rate, scenario.hops, &costs.isl, &costs.gsl)
        .expect("rate is 1 or an already validated aggregation");
    let processing = match placement {
        Placement::Orbit => &costs.processing_orbit,
        Placement::Ground => &costs.processing_ground,
    };
    processing.try_add(&network).expect("carbon per data")
}

/// Which placement each (aggregation, hops) grid cell prefers.
pub fn placement_frontier<T: Scalar>(
    aggregation_grid: &[T],
    hop_grid: &[u32],
    costs: &FlowCosts<T>,
) -> Result<Vec<Vec<Preference>>, ModelError> {
    if aggregation_grid.is_empty() || hop_grid.is_empty() {
        return Err(ModelError::invalid("frontier", "grids must be non-empty"));
    }
    aggregation_grid
        .iter()
        .map(|&aggregation| {
            hop_grid
                .iter()
                .map(|&hops| {
                    let scenario = FlowScenario::new(costs.clone(), aggregation, hops)?;
                    Ok(prefer(
                        flow_intensity(Placement::Orbit, &scenario).canonical(),
                        flow_intensity(Placement::Ground, &scenario).canonical(),
                    ))
                })
                .collect()
        })
        .collect()
}

fn prefer<T: Scalar>(orbit: T, ground: T) -> Preference {
    let scale = orbit.abs().max(ground.abs());
    if (orbit - ground).abs() <= T::of(TIE_RELATIVE_TOLERANCE) * scale {
        Preference::Tie
    } else if orbit < ground {
        Preference::Orbit
    } else {
        Preference::Ground
    }
}

/// Real-valued hop count at which orbit and ground placement break even for
/// a fixed aggregation rate, or `None` when no crossing exists at any
/// non-negative hop count (at `aggregation = 1` the difference is constant;
/// a negative root means one placement dominates everywhere).
pub fn inflection_hops<T: Scalar>(aggregation: T, costs: &FlowCosts<T>) -> Option<T> {
    if aggregation >= T::one() {
        return None;
    }
    let processing_gap = costs.processing_orbit.canonical() - costs.processing_ground.canonical();
    let crossing =
        (processing_gap / (T::one() - aggregation) - costs.gsl.canonical()) / costs.isl.canonical();
    (crossing.is_finite() && crossing >= T::zero()).then_some(crossing)
}

/// Real-valued aggregation rate at which the placements break even for a
/// fixed hop count, or `None` when there is no crossing inside (0, 1].
pub fn inflection_aggregation<T: Scalar>(hops: u32, costs: &FlowCosts<T>) -> Option<T> {
    let link = costs.gsl.canonical() + T::of(f64::from(hops)) * costs.isl.canonical();
    if link == T::zero() {
        return None;
    }
    let processing_gap = costs.processing_orbit.canonical() - costs.processing_ground.canonical();
    let crossing = T::one() - processing_gap / link;
    (crossing.is_finite() && crossing > T::zero() && crossing <= T::one()).then_some(crossing)
}

/// Derives a link's per-raw-data intensity from the transceiver model: the
/// full-load per-packet intensity times the packets one data unit splits
/// into at the link's MTU.
pub fn link_intensity<T: Scalar>(
    link: &TransceiverSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
) -> Quantity<T> {
    let per_packet =
        packet_intensity(link, energy_intensity, technology, reentry, mission_time).total();
    let packets_per_volume = &Quantity::of(T::one(), "pkt") / link.mtu();
    &per_packet * &packets_per_volume
}

/// Derives a placement's processing intensity from the CPU model: the
/// full-load per-second intensity times the CPU seconds one data unit takes.
pub fn processing_intensity<T: Scalar>(
    cpu: &CpuSpec<T>,
    energy_intensity: &Quantity<T>,
    technology: &LaunchTechnology<T>,
    reentry: &ReentryModel<T>,
    mission_time: &Quantity<T>,
    time_per_volume: &Quantity<T>,
) -> Result<Quantity<T>, ModelError> {
    let expected = Dimension::TIME.per(Dimension::DATA);
    if time_per_volume.dimension() != expected {
        return Err(ModelError::invalid(
            "flow scenario",
            format!(
                "processing time must be time per data volume, got {}",
                time_per_volume.dimension()
            ),
        ));
    }
    if time_per_volume.canonical() < T::zero() {
        return Err(ModelError::invalid(
            "flow scenario",
            "processing time must be >= 0",
        ));
    }
    let per_second =
        cpu_intensity(cpu, energy_intensity, technology, reentry, mission_time).total();
    Ok(&per_second * time_per_volume)
}

fn check_aggregation<T: Scalar>(aggregation: T) -> Result<(), ModelError> {
    if aggregation <= T::zero() || aggregation > T::one() {
        return Err(ModelError::invalid(
            "flow scenario",
            "aggregation rate must be in (0, 1]",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Q = Quantity<f64>;

    fn costs(isl: f64, gsl: f64, orbit: f64, ground: f64) -> FlowCosts<f64> {
        FlowCosts::new(
            Q::of(isl, "gCO2e/GB"),
            Q::of(gsl, "gCO2e/GB"),
            Q::of(orbit, "gCO2e/GB"),
            Q::of(ground, "gCO2e/GB"),
        )
        .unwrap()
    }

    #[test]
    fn network_intensity_substitution() {
        let isl = Q::of(2.0, "gCO2e/GB");
        let gsl = Q::of(10.0, "gCO2e/GB");
        // f=1, n=0 is the bare downlink.
        let direct = network_intensity(1.0, 0, &isl, &gsl).unwrap();
        assert_eq!(direct, gsl);
        // f=0.5, n=3
        let half = network_intensity(0.5, 3, &isl, &gsl).unwrap();
        assert_eq!(half.value_as("gCO2e/GB").unwrap(), 0.5 * (10.0 + 3.0 * 2.0));
        // Tiny rates scale linearly.
        let tiny = network_intensity(0.001, 7, &isl, &gsl).unwrap();
        assert!((tiny.value_as("gCO2e/GB").unwrap() - 0.001 * 24.0).abs() < 1e-15);
        assert!(network_intensity(0.0, 0, &isl, &gsl).is_err());
        assert!(network_intensity(1.5, 0, &isl, &gsl).is_err());
    }

    #[test]
    fn no_aggregation_difference_is_processing_gap() {
        let c = costs(1.0, 10.0, 7.0, 3.0);
        let scenario = FlowScenario::new(c, 1.0, 4).unwrap();
        let orbit = flow_intensity(Placement::Orbit, &scenario);
        let ground = flow_intensity(Placement::Ground, &scenario);
        let diff = orbit.try_sub(&ground).unwrap();
        assert!((diff.value_as("gCO2e/GB").unwrap() - 4.0).abs() < 1e-12);
        assert!(orbit.canonical() > ground.canonical());
    }

    #[test]
    fn ground_constant_in_aggregation_orbit_increasing() {
        let c = costs(0.5, 5.0, 8.0, 2.0);
        let mut last_orbit = 0.0;
        let ground_reference = flow_intensity(
            Placement::Ground,
            &FlowScenario::new(c.clone(), 1.0, 3).unwrap(),
        );
        for f in [0.001, 0.01, 0.1, 0.5, 1.0] {
            let scenario = FlowScenario::new(c.clone(), f, 3).unwrap();
            let orbit = flow_intensity(Placement::Orbit, &scenario).canonical();
            assert!(orbit > last_orbit);
            last_orbit = orbit;
            assert_eq!(
                flow_intensity(Placement::Ground, &scenario),
                ground_reference
            );
        }
        // Orbit intensity is also non-decreasing in the hop count.
        let mut last = 0.0;
        for hops in 0..10 {
            let scenario = FlowScenario::new(c.clone(), 0.5, hops).unwrap();
            let orbit = flow_intensity(Placement::Orbit, &scenario).canonical();
            assert!(orbit >= last);
            last = orbit;
        }
    }

    #[test]
    fn inflection_matches_sign_change() {
        let c = costs(1.0, 10.0, 20.0, 5.0);
        // Crossing at ((20-5)/(1-0.5) - 10) / 1 = 20 hops.
        let crossing = inflection_hops(0.5, &c).unwrap();
        assert!((crossing - 20.0).abs() < 1e-12);
        for (hops, better) in [(19, Placement::Ground), (21, Placement::Orbit)] {
            let scenario = FlowScenario::new(c.clone(), 0.5, hops).unwrap();
            let orbit = flow_intensity(Placement::Orbit, &scenario).canonical();
            let ground = flow_intensity(Placement::Ground, &scenario).canonical();
            match better {
                Placement::Orbit => assert!(orbit < ground),
                Placement::Ground => assert!(orbit > ground),
            }
        }
    }

    #[test]
    fn no_crossing_without_aggregation() {
        let c = costs(1.0, 10.0, 20.0, 5.0);
        assert_eq!(inflection_hops(1.0, &c), None);
    }

    #[test]
    fn equal_processing_favors_orbit_everywhere() {
        let c = costs(1.0, 10.0, 5.0, 5.0);
        // The root is negative: aggregation saves link cost at every hop count.
        assert_eq!(inflection_hops(0.5, &c), None);
        for hops in [0, 1, 5] {
            let scenario = FlowScenario::new(c.clone(), 0.5, hops).unwrap();
            assert!(
                flow_intensity(Placement::Orbit, &scenario).canonical()
                    < flow_intensity(Placement::Ground, &scenario).canonical()
            );
        }
    }

    #[test]
    fn frontier_corners() {
        // Orbit processing strictly dirtier.
        let c = costs(0.05, 1.85, 1.3, 0.3);
        let grid = placement_frontier(
            &[1.0, 0.5, 0.1, 0.02, 0.01, 0.001],
            &[0, 1, 3, 5, 7, 10],
            &c,
        )
        .unwrap();
        // Full volume, no hops: orbit adds cost and saves nothing.
        assert_eq!(grid[0][0], Preference::Ground);
        // Strong aggregation over many hops: orbit wins.
        assert_eq!(grid[2][5], Preference::Orbit);
    }

    #[test]
    fn identical_flows_tie() {
        let c = costs(1.0, 5.0, 2.0, 2.0);
        let grid = placement_frontier(&[1.0], &[0, 3, 10], &c).unwrap();
        assert!(grid[0].iter().all(|&p| p == Preference::Tie));
    }

    #[test]
    fn empty_grid_rejected() {
        let c = costs(1.0, 5.0, 2.0, 2.0);
        assert!(placement_frontier(&[], &[0], &c).is_err());
        assert!(placement_frontier(&[1.0], &[], &c).is_err());
    }

    /// No Orbit cell may sit above-left of a Ground cell when rows are
    /// ordered by decreasing aggregation and columns by increasing hops.
    pub(crate) fn assert_staircase(grid: &[Vec<Preference>]) {
        for (r, row) in grid.iter().enumerate() {
            for (c, &cell) in row.iter().enumerate() {
                if cell == Preference::Orbit {
                    let clean = grid[r..]
                        .iter()
                        .all(|below| below[c..].iter().all(|&p| p != Preference::Ground));
                    assert!(clean, "Ground below-right of Orbit at ({r},{c})");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn orbit_ground_difference_strictly_decreasing_in_hops(
            isl in 0.01f64..10.0,
            gsl in 0.0f64..100.0,
            orbit_proc in 0.0f64..100.0,
            ground_proc in 0.0f64..100.0,
            f in 0.001f64..0.999,
        ) {
            let c = costs(isl, gsl, orbit_proc, ground_proc);
            let mut last = f64::INFINITY;
            let mut crossings = 0;
            let mut previous_sign = 0i8;
            for hops in 0..30 {
                let scenario = FlowScenario::new(c.clone(), f, hops).unwrap();
                let diff = flow_intensity(Placement::Orbit, &scenario).canonical()
                    - flow_intensity(Placement::Ground, &scenario).canonical();
                prop_assert!(diff < last);
                last = diff;
                let sign = if diff > 0.0 { 1 } else { -1 };
                if previous_sign != 0 && sign != previous_sign {
                    crossings += 1;
                }
                previous_sign = sign;
            }
            prop_assert!(crossings <= 1);
        }

        #[test]
        fn frontier_is_monotone_staircase(
            isl in 0.01f64..10.0,
            gsl in 0.0f64..100.0,
            orbit_proc in 0.0f64..100.0,
            ground_proc in 0.0f64..100.0,
        ) {
            let c = costs(isl, gsl, orbit_proc, ground_proc);
            // Rows in decreasing aggregation order, columns increasing hops.
            let grid = placement_frontier(
                &[1.0, 0.5, 0.1, 0.02, 0.01, 0.001],
                &[0, 1, 3, 5, 7, 10],
                &c,
            ).unwrap();
            assert_staircase(&grid);
        }
    }
}
