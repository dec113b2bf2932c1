//! Synthetic desk-scale scenarios.
//!
//! Living clusters are random axis-aligned rectangles stretched to fill the
//! central half of an `n x n` grid, the outer half being the walking margin.
//! The zone side length is the target-area extent over `n`, so the scenario
//! discretizes into exactly `n x n` zones. Every populated zone
//! receives at least one POI; the remaining POIs go to random active zones.
//! The road network is a lattice over all zone centroids.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assign::{Node, RoadNetwork, Segment};
use crate::behavior::{ModalityProfile, PteDistribution};
use crate::demand::Poi;
use crate::error::{Error, Result};
use crate::io::config::ScenarioConfig;
use crate::io::formats;
use crate::spatial::{assign_population, build_target_area, make_grid, pte_margin, GeoPoint, LivingCluster, ZoneGrid};

/// RNG stream reserved for scenario synthesis.
const SYNTH_STREAM: u64 = u64::MAX;

pub const CATEGORIES: [&str; 6] = ["grocery", "school", "workplace", "health", "park", "leisure"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NetworkStyle {
    /// 4-neighbour lattice.
    #[default]
    Grid,
    /// Lattice plus both diagonals of every cell.
    GridDiagonals,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub zones_per_side: usize,
    pub population: f64,
    /// POIs placed on top of the one guaranteed per populated zone.
    pub extra_pois: usize,
    pub clusters: usize,
    pub network: NetworkStyle,
    pub seed: u64,
}

impl SynthSpec {
    /// Defaults scaled to the grid: `2 n^2` extra POIs and `1 + n/3` clusters.
    pub fn new(zones_per_side: usize, seed: u64) -> Self {
        SynthSpec {
            zones_per_side,
            population: 10_000.0,
            extra_pois: 2 * zones_per_side * zones_per_side,
            clusters: 1 + zones_per_side / 3,
            network: NetworkStyle::Grid,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.zones_per_side < 3 {
            return Err(Error::param("zones_per_side", format!("must be >= 3, got {}", self.zones_per_side)));
        }
        if !(self.population.is_finite() && self.population > 0.0) {
            return Err(Error::param("population", format!("must be finite and > 0, got {}", self.population)));
        }
        if self.clusters == 0 {
            return Err(Error::param("clusters", "must be >= 1"));
        }
        Ok(())
    }
}

/// A generated scenario held in memory.
#[derive(Debug, Clone)]
pub struct SyntheticScenario {
    pub clusters: Vec<LivingCluster>,
    pub pois: Vec<Poi>,
    pub network: RoadNetwork,
    /// Scenario settings; input paths use the default file names.
    pub config: ScenarioConfig,
    /// Grid the scenario discretizes into, with populations assigned.
    pub grid: ZoneGrid,
}

pub fn build_synthetic(spec: &SynthSpec) -> Result<SyntheticScenario> {
    spec.validate()?;
    let n = spec.zones_per_side;
    let walk = ModalityProfile::defaults()
        .into_iter()
        .find(|m| m.name == "walk")
        .expect("default modalities include walk");
    let margin = pte_margin(&PteDistribution::default(), &walk)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(SYNTH_STREAM);

    let clusters = random_clusters(&mut rng, spec, margin)?;
    let area = build_target_area(&clusters, margin)?;
    // Round joins put the extent a hair beyond 4 * margin, so measure it.
    let (lo, hi) = area.bounding_box().ok_or_else(|| Error::Domain("empty synthetic target area".into()))?;
    let side_m = (hi.x - lo.x).max(hi.y - lo.y) / n as f64;
    let grid = make_grid(&area, side_m / 1000.0)?;
    if grid.n_cols != n || grid.n_rows != n {
        return Err(Error::Domain(format!(
            "synthetic target area discretized into {}x{} zones, expected {n}x{n}",
            grid.n_cols, grid.n_rows
        )));
    }
    let grid = assign_population(&grid, &clusters)?;

    let mut pois = Vec::new();
    let mut place = |rng: &mut ChaCha8Rng, zone: usize| {
        let (lo, hi) = grid.cell_bounds(zone);
        let inset = 0.05 * side_m;
        let location = GeoPoint::new(
            rng.random_range(lo.x + inset..hi.x - inset),
            rng.random_range(lo.y + inset..hi.y - inset),
        );
        let category = CATEGORIES[rng.random_range(0..CATEGORIES.len())].to_string();
        pois.push(Poi { location, category });
    };
    for zone in grid.populated_zones() {
        place(&mut rng, zone);
    }
    let active: Vec<usize> = grid.zones.iter().filter(|z| z.active).map(|z| z.index).collect();
    for _ in 0..spec.extra_pois {
        let zone = active[rng.random_range(0..active.len())];
        place(&mut rng, zone);
    }

    let network = lattice_network(&grid, spec.network)?;

    let mut config = ScenarioConfig::default();
    config.rng_seed = spec.seed;
    config.grid.side_length_km = side_m / 1000.0;
    config.spatial.margin_modality = Some("walk".into());
    config.demand.category_ranks = CATEGORIES.iter().map(|c| c.to_string()).collect();

    Ok(SyntheticScenario {
        clusters,
        pois,
        network,
        config,
        grid,
    })
}

/// Rectangles with random extents, then stretched so their joint bounding
/// box is the square `[margin, 3 margin]^2`.
fn random_clusters(rng: &mut ChaCha8Rng, spec: &SynthSpec, margin: f64) -> Result<Vec<LivingCluster>> {
    let rects: Vec<[f64; 4]> = (0..spec.clusters)
        .map(|_| {
            let (w, h) = (rng.random_range(0.15..0.6), rng.random_range(0.15..0.6));
            let (x, y) = (rng.random_range(0.0..1.0 - w), rng.random_range(0.0..1.0 - h));
            [x, y, x + w, y + h]
        })
        .collect();
    let weights: Vec<f64> = (0..spec.clusters).map(|_| rng.random_range(0.5..1.5)).collect();
    let total_weight: f64 = weights.iter().sum();

    let fold = |f: fn(f64, f64) -> f64, i: usize, init: f64| rects.iter().map(|r| r[i]).fold(init, f);
    let (x0, y0) = (fold(f64::min, 0, f64::INFINITY), fold(f64::min, 1, f64::INFINITY));
    let (x1, y1) = (fold(f64::max, 2, f64::NEG_INFINITY), fold(f64::max, 3, f64::NEG_INFINITY));
    let span = 2.0 * margin;
    let map_x = |v: f64| margin + (v - x0) / (x1 - x0) * span;
    let map_y = |v: f64| margin + (v - y0) / (y1 - y0) * span;

    rects
        .iter()
        .zip(&weights)
        .map(|(r, w)| {
            let (ax, ay, bx, by) = (map_x(r[0]), map_y(r[1]), map_x(r[2]), map_y(r[3]));
            LivingCluster::new(
                vec![GeoPoint::new(ax, ay), GeoPoint::new(bx, ay), GeoPoint::new(bx, by), GeoPoint::new(ax, by)],
                spec.population * w / total_weight,
            )
        })
        .collect()
}

/// Nodes at every zone centroid (id = zone index + 1), bidirectional
/// segments between lattice neighbours.
pub fn lattice_network(grid: &ZoneGrid, style: NetworkStyle) -> Result<RoadNetwork> {
    let nodes: Vec<Node> = grid
        .zones
        .iter()
        .map(|z| Node {
            id: z.index as u64 + 1,
            location: z.centroid,
        })
        .collect();
    let side = grid.side_length_m();
    let mut segments = Vec::new();
    let mut link = |a: usize, b: usize, length_m: f64| {
        segments.push(Segment {
            id: segments.len() as u64 + 1,
            from: a as u64 + 1,
            to: b as u64 + 1,
            length_m,
            bidirectional: true,
        });
    };
    for row in 0..grid.n_rows {
        for col in 0..grid.n_cols {
            let here = grid.index_of(col, row);
            if col + 1 < grid.n_cols {
                link(here, grid.index_of(col + 1, row), side);
            }
            if row + 1 < grid.n_rows {
                link(here, grid.index_of(col, row + 1), side);
            }
            if style == NetworkStyle::GridDiagonals && col + 1 < grid.n_cols && row + 1 < grid.n_rows {
                let diagonal = side * std::f64::consts::SQRT_2;
                link(here, grid.index_of(col + 1, row + 1), diagonal);
                link(grid.index_of(col + 1, row), grid.index_of(col, row + 1), diagonal);
            }
        }
    }
    RoadNetwork::new(nodes, segments)
}

/// Writes the scenario files and `scenario.toml` into `dir`; returns the
/// config path.
pub fn write_synthetic(scenario: &SyntheticScenario, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let inputs = &scenario.config.inputs;
    formats::write_clusters(&dir.join(&inputs.clusters), &scenario.clusters)?;
    formats::write_pois(&dir.join(&inputs.pois), &scenario.pois)?;
    formats::write_network(&dir.join(&inputs.nodes), &dir.join(&inputs.segments), &scenario.network)?;
    let path = dir.join("scenario.toml");
    std::fs::write(&path, scenario.config.to_toml()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn synth_scenario(spec: &SynthSpec, dir: &Path) -> Result<PathBuf> {
    write_synthetic(&build_synthetic(spec)?, dir)
}
