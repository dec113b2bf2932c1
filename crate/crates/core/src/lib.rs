//! Zone-level estimation of daily mobility flows.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! 1. [`spatial`] + [`demand`]: living clusters are expanded by a travel-energy
//!    margin into a target area, discretized into square zones, and each zone
//!    receives its population and a rank-weighted POI opportunity mass (WPO).
//! 2. [`potential`]: an extended radiation model turns the WPO field into a
//!    dense origin/destination potential matrix.
//! 3. [`tripgen`]: daily round trips are grown zone by zone from every
//!    populated zone and scored by the product of radiation, Lévy step,
//!    travel-energy and motif factors ([`behavior`]).
//! 4. [`assign`]: surviving trips become path flows, routed on shortest paths
//!    over the road network and summed into segment loads.
//!
//! [`io`] holds the scenario file format, readers/writers for every data file,
//! the synthetic scenario generator and the pipeline driver used by the
//! `mobflow` binary.

pub mod assign;
pub mod behavior;
pub mod demand;
mod error;
pub mod io;
pub mod potential;
pub mod spatial;
pub mod tripgen;

pub use error::{Error, Result};

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
