//! Daily trip evolution.
//!
//! Starting from a populated home zone, a trip grows one zone at a time.
//! After every step its realisticity is the product of four factors:
//!
//! * `p_er`: product of potential-graph entries over consecutive legs,
//! * `p_lf`: product of per-leg Lévy factors,
//! * `p_pte`: travel-energy factor of the whole path for the trip's mode,
//! * `p_motif`: motif weight of the trip's exploration ratio.
//!
//! `p_er` and `p_lf` are carried over from the previous step; the other two
//! depend on the whole path and are recomputed. Steps falling below
//! `p_trip_min` end the branch. Every accepted prefix is closed by a return
//! leg home and kept when the closed trip still passes the threshold.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::behavior::{
    exploration_ratio, levy_pdf, motif_weight, LevyParams, ModalityProfile, MotifParams, PteDistribution, Visit,
};
use crate::error::{Error, Result};
use crate::potential::PotentialGraph;
use crate::spatial::ZoneGrid;

/// How a per-leg Lévy density becomes a dimensionless factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyFactor {
    /// Density times the zone side length.
    ZoneBin,
    /// Density times a fixed width in km.
    FixedBin { width_km: f64 },
}

/// How the travel-energy density becomes a factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PteFactor {
    /// Probability that the daily budget covers the trip: `1 - CDF(E)`.
    Survival,
    /// Density at the trip energy times a fixed width in kJ.
    DensityBin { width_kj: f64 },
}

/// Behavior models used to score trips.
#[derive(Debug, Clone)]
pub struct BehaviorModel {
    pub levy: LevyParams,
    pub levy_factor: LevyFactor,
    pub pte: PteDistribution,
    pub pte_factor: PteFactor,
    pub motif: MotifParams,
}

impl Default for BehaviorModel {
    fn default() -> Self {
        BehaviorModel {
            levy: LevyParams::default(),
            levy_factor: LevyFactor::ZoneBin,
            pte: PteDistribution::default(),
            pte_factor: PteFactor::Survival,
            motif: MotifParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub p_trip_min: f64,
    pub max_intermediate_zones: usize,
    /// Independent evolution chains started from each origin.
    pub candidates_per_origin: usize,
    pub rng_seed: u64,
    /// `k` of the exploration ratio.
    pub k_for_sk: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            p_trip_min: 1e-6,
            max_intermediate_zones: 5,
            candidates_per_origin: 64,
            rng_seed: 0,
            k_for_sk: 2,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_trip_min > 0.0 && self.p_trip_min <= 1.0) {
            return Err(Error::param(
                "evolution.p_trip_min",
                format!("must lie in (0, 1], got {}", self.p_trip_min),
            ));
        }
        if self.max_intermediate_zones == 0 {
            return Err(Error::param("evolution.max_intermediate_zones", "must be >= 1"));
        }
        if self.candidates_per_origin == 0 {
            return Err(Error::param("evolution.candidates_per_origin", "must be >= 1"));
        }
        if self.k_for_sk == 0 {
            return Err(Error::param("evolution.k_for_sk", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TripFactors {
    pub p_pte: f64,
    pub p_motif: f64,
    pub p_er: f64,
    pub p_lf: f64,
}

impl TripFactors {
    pub fn product(&self) -> f64 {
        self.p_pte * self.p_motif * self.p_er * self.p_lf
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    pub origin_zone: usize,
    pub zone_sequence: Vec<usize>,
    pub closed: bool,
    pub factors: TripFactors,
    pub p_trip: f64,
    pub modality: String,
    pub total_distance_km: f64,
}

impl Trip {
    /// An unscored trip over `zone_sequence`; `closed` when it returns to its first zone.
    pub fn new(zone_sequence: Vec<usize>, modality: impl Into<String>) -> Self {
        let origin_zone = zone_sequence.first().copied().unwrap_or_default();
        let closed = zone_sequence.len() > 1 && zone_sequence.last() == Some(&origin_zone);
        Trip {
            origin_zone,
            zone_sequence,
            closed,
            factors: TripFactors::default(),
            p_trip: 0.0,
            modality: modality.into(),
            total_distance_km: 0.0,
        }
    }

    /// Number of distinct zones visited, home included.
    pub fn distinct_locations(&self) -> usize {
        let mut seen: Vec<usize> = self.zone_sequence.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Everything needed to score a trip.
#[derive(Debug, Clone, Copy)]
pub struct TripScorer<'a> {
    pub grid: &'a ZoneGrid,
    pub gwpc: &'a PotentialGraph,
    pub behavior: &'a BehaviorModel,
    pub k_for_sk: usize,
}

impl<'a> TripScorer<'a> {
    pub fn new(grid: &'a ZoneGrid, gwpc: &'a PotentialGraph, behavior: &'a BehaviorModel, k_for_sk: usize) -> Result<Self> {
        if gwpc.n_zones != grid.len() {
            return Err(Error::Input(format!(
                "potential graph covers {} zones, grid has {}",
                gwpc.n_zones,
                grid.len()
            )));
        }
        Ok(TripScorer {
            grid,
            gwpc,
            behavior,
            k_for_sk,
        })
    }

    /// Lévy factor of a single leg, capped at 1. Legs not longer than `mu` score 0.
    pub fn leg_levy_factor(&self, distance_km: f64) -> f64 {
        let width = match self.behavior.levy_factor {
            LevyFactor::ZoneBin => self.grid.side_length_km,
            LevyFactor::FixedBin { width_km } => width_km,
        };
        levy_pdf(distance_km, &self.behavior.levy)
            .map(|d| (d * width).min(1.0))
            .unwrap_or(0.0)
    }

    pub fn energy_factor(&self, energy_kj: f64) -> f64 {
        match self.behavior.pte_factor {
            PteFactor::Survival => self.behavior.pte.survival(energy_kj),
            PteFactor::DensityBin { width_kj } => (self.behavior.pte.density(energy_kj) * width_kj).min(1.0),
        }
    }

    /// Exploration ratio of a zone sequence, counting each position as a visit.
    pub fn sequence_exploration_ratio(&self, zones: &[usize]) -> Result<f64> {
        let mut visits: Vec<(usize, u32)> = Vec::new();
        for &z in zones {
            match visits.iter_mut().find(|(zone, _)| *zone == z) {
                Some((_, n)) => *n += 1,
                None => visits.push((z, 1)),
            }
        }
        let locations: Vec<Visit> = visits
            .iter()
            .map(|&(z, n)| Visit::new(self.grid.zones[z].centroid, n))
            .collect();
        exploration_ratio(&locations, self.k_for_sk)
    }

    fn finish(&self, path: &PathState, modality: &ModalityProfile) -> Result<Trip> {
        let s_k = self.sequence_exploration_ratio(&path.zones)?;
        let factors = TripFactors {
            p_pte: self.energy_factor(modality.energy_kj(path.distance_km)),
            p_motif: motif_weight(s_k, &self.behavior.motif),
            p_er: path.p_er,
            p_lf: path.p_lf,
        };
        let mut trip = Trip::new(path.zones.clone(), modality.name.clone());
        trip.factors = factors;
        trip.p_trip = factors.product();
        trip.total_distance_km = path.distance_km;
        Ok(trip)
    }

    fn check_sequence(&self, zones: &[usize]) -> Result<()> {
        if zones.len() < 2 {
            return Err(Error::Input("a trip needs at least two zones".into()));
        }
        if let Some(&z) = zones.iter().find(|&&z| z >= self.grid.len()) {
            return Err(Error::Input(format!("zone index {z} out of range (grid has {})", self.grid.len())));
        }
        if zones.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("a trip cannot stay in the same zone for consecutive steps".into()));
        }
        Ok(())
    }
}

/// Products carried from one evolution step to the next.
#[derive(Debug, Clone)]
struct PathState {
    zones: Vec<usize>,
    p_er: f64,
    p_lf: f64,
    distance_km: f64,
}

impl PathState {
    fn start(origin: usize) -> Self {
        PathState {
            zones: vec![origin],
            p_er: 1.0,
            p_lf: 1.0,
            distance_km: 0.0,
        }
    }

    fn extended(&self, next: usize, scorer: &TripScorer<'_>) -> Self {
        let last = *self.zones.last().expect("path starts with its origin");
        let d = scorer.grid.distance_km(last, next);
        let mut zones = Vec::with_capacity(self.zones.len() + 1);
        zones.extend_from_slice(&self.zones);
        zones.push(next);
        PathState {
            zones,
            p_er: self.p_er * scorer.gwpc.get(last, next),
            p_lf: self.p_lf * scorer.leg_levy_factor(d),
            distance_km: self.distance_km + d,
        }
    }

    fn intermediates(&self) -> usize {
        self.zones.len() - 1
    }
}

/// Scores `trip` from scratch, leg by leg.
pub fn trip_realisticity(trip: &Trip, scorer: &TripScorer<'_>, modality: &ModalityProfile) -> Result<Trip> {
    scorer.check_sequence(&trip.zone_sequence)?;
    let mut path = PathState::start(trip.zone_sequence[0]);
    for &z in &trip.zone_sequence[1..] {
        path = path.extended(z, scorer);
    }
    let mut scored = scorer.finish(&path, modality)?;
    scored.closed = trip.closed;
    Ok(scored)
}

/// Random-number substream for one (origin, modality) pair.
pub fn substream(seed: u64, origin: usize, modality_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((origin as u64) << 16) | (modality_index as u64 & 0xffff));
    rng
}

/// Grows `cfg.candidates_per_origin` evolution chains from `origin` and
/// returns the distinct closed trips that passed the threshold, ordered by
/// zone sequence.
///
/// Next zones are drawn in proportion to the potential-graph row of the
/// current zone, among active zones not yet in the trip (home included).
pub fn evolve_trips(
    origin: usize,
    scorer: &TripScorer<'_>,
    cfg: &EvolutionConfig,
    modality: &ModalityProfile,
    modality_index: usize,
) -> Result<Vec<Trip>> {
    cfg.validate()?;
    let grid = scorer.grid;
    let home = grid
        .zones
        .get(origin)
        .ok_or_else(|| Error::Input(format!("origin zone {origin} out of range")))?;
    if !home.active || !(home.population > 0.0) {
        return Err(Error::Input(format!("origin zone {origin} is inactive or unpopulated")));
    }
    let mut rng = substream(cfg.rng_seed, origin, modality_index);
    let mut found: BTreeMap<Vec<usize>, Trip> = BTreeMap::new();

    for _ in 0..cfg.candidates_per_origin {
        let mut path = PathState::start(origin);
        while path.intermediates() < cfg.max_intermediate_zones {
            let current = *path.zones.last().expect("non-empty path");
            let (candidates, weights): (Vec<usize>, Vec<f64>) = scorer
                .gwpc
                .row(current)
                .iter()
                .enumerate()
                .filter(|&(j, &p)| p > 0.0 && grid.zones[j].active && !path.zones.contains(&j))
                .map(|(j, &p)| (j, p))
                .unzip();
            if candidates.is_empty() {
                break;
            }
            let pick = WeightedIndex::new(&weights)
                .map_err(|e| Error::Domain(format!("candidate weights: {e}")))?
                .sample(&mut rng);
            let next = path.extended(candidates[pick], scorer);
            let open = scorer.finish(&next, modality)?;
            if open.p_trip < cfg.p_trip_min {
                break;
            }
            let closed_path = next.extended(origin, scorer);
            if !found.contains_key(&closed_path.zones) {
                let mut closed = scorer.finish(&closed_path, modality)?;
                closed.closed = true;
                if closed.p_trip >= cfg.p_trip_min {
                    found.insert(closed_path.zones, closed);
                }
            }
            path = next;
        }
    }
    Ok(found.into_values().collect())
}

/// Runs [`evolve_trips`] for every populated zone and modality, in parallel.
///
/// Every populated zone is a key, possibly with no trips. Trips of one origin
/// are ordered by modality, then zone sequence.
pub fn generate_all(
    scorer: &TripScorer<'_>,
    cfg: &EvolutionConfig,
    modalities: &[ModalityProfile],
) -> Result<BTreeMap<usize, Vec<Trip>>> {
    cfg.validate()?;
    let origins = scorer.grid.populated_zones();
    if origins.is_empty() {
        return Err(Error::Input("no populated zone to start trips from".into()));
    }
    let pairs: Vec<(usize, usize)> = origins
        .iter()
        .flat_map(|&o| (0..modalities.len()).map(move |m| (o, m)))
        .collect();
    let results: Vec<Vec<Trip>> = pairs
        .par_iter()
        .map(|&(origin, m)| evolve_trips(origin, scorer, cfg, &modalities[m], m))
        .collect::<Result<_>>()?;
    let mut out: BTreeMap<usize, Vec<Trip>> = origins.iter().map(|&o| (o, Vec::new())).collect();
    for (&(origin, _), trips) in pairs.iter().zip(results) {
        out.get_mut(&origin).expect("origin key").extend(trips);
    }
    Ok(out)
}
