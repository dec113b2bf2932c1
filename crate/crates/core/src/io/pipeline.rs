//! Stage orchestration, output files and the run report.
//!
//! Output directory layout:
//!
//! ```text
//! grid.csv            zones with population and WPO
//! gwpc.csv            potential graph dump
//! cache/gwpc-<key>.bin  binary potential graph keyed by a content hash
//! trips.csv           every kept trip with its factors
//! loads.csv           flow per segment
//! loads.geojson       the same as a LineString layer
//! report.json         timings, counts, diagnostics, conservation checks
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::assign::{self, FlowPlan, LoadMap, RoadNetwork, RoutedFlows};
use crate::demand::{aggregate_wpo, categorize_pois, PoiRejects};
use crate::error::{Error, Result};
use crate::io::config::ScenarioConfig;
use crate::io::formats::{self, GwpcHeader};
use crate::potential::{build_gwpc, radiation_probability, PotentialGraph, Radiation, RadiationParams};
use crate::spatial::{assign_population, build_target_area, make_grid, pte_margin, ZoneGrid};
use crate::tripgen::{generate_all, Trip, TripScorer};

/// Relative tolerance of every conservation check.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

/// Bumped whenever the binary cache layout or the potential model changes.
const GWPC_CACHE_VERSION: &[u8] = b"gwpc-cache-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Spatial,
    Demand,
    Potential,
    Tripgen,
    Assign,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Spatial => "spatial",
            Stage::Demand => "demand",
            Stage::Potential => "potential",
            Stage::Tripgen => "tripgen",
            Stage::Assign => "assign",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Counts {
    pub clusters: usize,
    pub zones: usize,
    pub active_zones: usize,
    pub populated_zones: usize,
    pub pois: usize,
    pub poi_rejects: PoiRejects,
    pub gwpc_pairs: usize,
    pub saturated_origins: usize,
    pub trips: usize,
    pub trips_by_modality: BTreeMap<String, usize>,
    pub routed_trips: usize,
    pub dropped_trips: usize,
    pub segments: usize,
    pub network_components: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservationCheck {
    pub name: String,
    pub passed: bool,
    /// Measured relative residual.
    pub residual: f64,
    pub tolerance: f64,
}

impl ConservationCheck {
    fn relative(name: &str, measured: f64, expected: f64) -> Self {
        let residual = if expected == 0.0 {
            measured.abs()
        } else {
            ((measured - expected) / expected).abs()
        };
        ConservationCheck {
            name: name.to_string(),
            passed: residual <= CONSERVATION_TOLERANCE,
            residual,
            tolerance: CONSERVATION_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub margin_m: f64,
    pub total_population: f64,
    pub total_wpo: f64,
    /// Persons/day on trips with an unroutable leg.
    pub dropped_flow: f64,
    /// Persons/day at origins whose trips all have zero realisticity or
    /// that produced no trip.
    pub unserved_demand: f64,
    pub unserved_origins: usize,
    /// Person-meters over all routed paths.
    pub person_distance_m: f64,
    /// Travel time implied by the median daily energy, per modality.
    pub median_travel_time_h: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub stages: Vec<StageTiming>,
    pub counts: Counts,
    pub gwpc_cache_hit: Option<bool>,
    pub gwpc_cache_key: Option<String>,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
    pub checks: Vec<ConservationCheck>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ConservationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn timed<T>(&mut self, stage: Stage, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self).map_err(|e| e.in_stage(stage.name()));
        self.stages.push(StageTiming {
            stage,
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

/// Zones with population and WPO assigned.
#[derive(Debug, Clone)]
pub struct ZoneStage {
    pub grid: ZoneGrid,
    pub margin_m: f64,
    pub cluster_population: f64,
}

/// Result of the assignment stage.
#[derive(Debug, Clone)]
pub struct AssignStage {
    pub network: RoadNetwork,
    pub plan: FlowPlan,
    pub routed: RoutedFlows,
    pub loads: LoadMap,
}

/// Everything computed by one pipeline invocation.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: RunReport,
    pub zones: ZoneStage,
    pub gwpc: Option<PotentialGraph>,
    pub trips: Option<BTreeMap<usize, Vec<Trip>>>,
    pub assignment: Option<AssignStage>,
}

/// Where the stage-4 trips come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TripSource {
    /// Run stages 2 and 3.
    Generate,
    /// Read a trip dump and skip stages 2 and 3.
    Dump(PathBuf),
}

/// Full pipeline: all stages, all outputs.
pub fn run_pipeline(cfg: &ScenarioConfig) -> Result<PipelineRun> {
    run_stages(cfg, Stage::Assign, &TripSource::Generate)
}

/// Runs stages up to and including `through`, writing their outputs and
/// `report.json`.
pub fn run_stages(cfg: &ScenarioConfig, through: Stage, source: &TripSource) -> Result<PipelineRun> {
    let out_dir = cfg.output_path();
    std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let mut report = RunReport::default();

    let zones = zone_stage(cfg, &mut report)?;
    write_output(&mut report, &out_dir, "grid.csv", |p| formats::write_grid(p, &zones.grid))?;

    let mut run = PipelineRun {
        report: RunReport::default(),
        zones,
        gwpc: None,
        trips: None,
        assignment: None,
    };

    match source {
        TripSource::Generate if through >= Stage::Potential => {
            let gwpc = potential_stage(cfg, &run.zones.grid, &out_dir, &mut report)?;
            if through >= Stage::Tripgen {
                let trips = report.timed(Stage::Tripgen, |r| {
                    let trips = trip_stage(cfg, &run.zones.grid, &gwpc)?;
                    record_trips(r, &trips);
                    Ok(trips)
                })?;
                write_output(&mut report, &out_dir, "trips.csv", |p| formats::write_trips(p, &trips))?;
                run.trips = Some(trips);
            }
            run.gwpc = Some(gwpc);
        }
        TripSource::Generate => {}
        TripSource::Dump(path) => {
            let trips = formats::read_trips(path).map_err(|e| e.in_stage(Stage::Tripgen.name()))?;
            record_trips(&mut report, &trips);
            run.trips = Some(trips);
        }
    }

    if through >= Stage::Assign {
        let trips = run.trips.as_ref().expect("trips available before assignment");
        let stage = report.timed(Stage::Assign, |r| assign_stage(cfg, &run.zones.grid, trips, r))?;
        write_output(&mut report, &out_dir, "loads.csv", |p| formats::write_loads_csv(p, &stage.loads))?;
        write_output(&mut report, &out_dir, "loads.geojson", |p| {
            formats::write_loads_geojson(p, &stage.loads, &stage.network)
        })?;
        run.assignment = Some(stage);
    }

    report.outputs.push("report.json".into());
    let report_path = out_dir.join("report.json");
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::format(&report_path, e))?;
    std::fs::write(&report_path, json + "\n").map_err(|e| Error::io(&report_path, e))?;
    run.report = report;
    Ok(run)
}

fn write_output(report: &mut RunReport, dir: &Path, name: &str, f: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    f(&dir.join(name))?;
    report.outputs.push(name.to_string());
    Ok(())
}

fn record_trips(report: &mut RunReport, trips: &BTreeMap<usize, Vec<Trip>>) {
    let mut by_modality: BTreeMap<String, usize> = BTreeMap::new();
    for t in trips.values().flatten() {
        *by_modality.entry(t.modality.clone()).or_default() += 1;
    }
    report.counts.trips = by_modality.values().sum();
    report.counts.trips_by_modality = by_modality;
    if report.counts.trips == 0 {
        report.warnings.push("no trip reached evolution.p_trip_min; all flows are zero".into());
    }
}

/// Stages 1a and 1b: target area, grid, population, WPO.
pub fn zone_stage(cfg: &ScenarioConfig, report: &mut RunReport) -> Result<ZoneStage> {
    let (grid, margin_m, cluster_population) = report.timed(Stage::Spatial, |r| {
        let clusters = formats::read_clusters(&cfg.clusters_path())?;
        let margin_m = match cfg.spatial.margin_m {
            Some(m) => m,
            None => pte_margin(&cfg.behavior_model()?.pte, &cfg.margin_modality()?)?,
        };
        let area = build_target_area(&clusters, margin_m)?;
        let grid = assign_population(&make_grid(&area, cfg.grid.side_length_km)?, &clusters)?;
        let cluster_population = crate::compensated_sum(clusters.iter().map(|c| c.population()));
        r.counts.clusters = clusters.len();
        r.checks.push(ConservationCheck::relative(
            "population",
            grid.total_population(),
            cluster_population,
        ));
        Ok((grid, margin_m, cluster_population))
    })?;

    let grid = report.timed(Stage::Demand, |r| {
        let pois = formats::read_pois(&cfg.pois_path())?;
        let (categories, mut rejects) = categorize_pois(&grid, &pois, &cfg.demand.category_ranks)?;
        let (grid, more) = aggregate_wpo(&grid, &categories, &cfg.demand_weights()?)?;
        rejects.outside_grid += more.outside_grid;
        rejects.inactive_zone += more.inactive_zone;
        rejects.unranked_category += more.unranked_category;
        if rejects.total() > 0 {
            r.warnings.push(format!("{} POIs ignored (see counts.poi_rejects)", rejects.total()));
        }
        r.counts.pois = pois.len();
        r.counts.poi_rejects = rejects;
        Ok(grid)
    })?;

    report.counts.zones = grid.len();
    report.counts.active_zones = grid.active_count();
    report.counts.populated_zones = grid.populated_zones().len();
    report.diagnostics.margin_m = margin_m;
    report.diagnostics.total_population = grid.total_population();
    report.diagnostics.total_wpo = grid.total_wpo();
    let unserved_homes = grid.populated_zones().iter().filter(|&&z| grid.zones[z].wpo == 0.0).count();
    if unserved_homes > 0 {
        report.warnings.push(format!(
            "{unserved_homes} populated zones hold no POI; their trips cannot return home"
        ));
    }
    Ok(ZoneStage {
        grid,
        margin_m,
        cluster_population,
    })
}

/// Content hash of everything the potential graph depends on.
pub fn gwpc_cache_key(grid: &ZoneGrid, params: &RadiationParams) -> String {
    let mut h = Sha256::new();
    h.update(GWPC_CACHE_VERSION);
    for v in [grid.n_cols as u64, grid.n_rows as u64, params.z_zones as u64] {
        h.update(v.to_le_bytes());
    }
    for v in [grid.side_length_km, grid.origin.x, grid.origin.y, params.alpha, params.n_total, params.n_avg] {
        h.update(v.to_bits().to_le_bytes());
    }
    for z in &grid.zones {
        h.update(z.wpo.to_bits().to_le_bytes());
        h.update([u8::from(z.active)]);
    }
    h.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect()
}

/// Stage 2, reusing a cached graph when the content hash matches.
pub fn potential_stage(
    cfg: &ScenarioConfig,
    grid: &ZoneGrid,
    out_dir: &Path,
    report: &mut RunReport,
) -> Result<PotentialGraph> {
    let params = RadiationParams::from_grid(grid).map_err(|e| e.in_stage(Stage::Potential.name()))?;
    let key = gwpc_cache_key(grid, &params);
    let cache_name = format!("cache/gwpc-{key}.bin");
    let cache_path = out_dir.join(&cache_name);
    let header = GwpcHeader {
        n_zones: grid.len(),
        side_length_km: cfg.grid.side_length_km,
        alpha: params.alpha,
    };
    let (gwpc, hit) = report.timed(Stage::Potential, |r| {
        let cached = cache_path
            .is_file()
            .then(|| formats::read_gwpc_binary(&cache_path).ok())
            .flatten()
            .filter(|(h, _)| *h == header);
        let (gwpc, hit) = match cached {
            Some((_, mut gwpc)) => {
                gwpc.pairs_evaluated = 0;
                gwpc.saturated_origins = saturated_origins(grid, &params)?;
                (gwpc, true)
            }
            None => (build_gwpc(grid, &params)?, false),
        };
        r.counts.gwpc_pairs = gwpc.pairs_evaluated;
        r.counts.saturated_origins = gwpc.saturated_origins.len();
        if !gwpc.saturated_origins.is_empty() {
            r.warnings.push(format!(
                "{} origins hold all opportunity mass; their potential rows are zero",
                gwpc.saturated_origins.len()
            ));
        }
        Ok((gwpc, hit))
    })?;
    if !hit {
        write_output(report, out_dir, &cache_name, |p| formats::write_gwpc_binary(p, &header, &gwpc))?;
    } else {
        report.outputs.push(cache_name);
    }
    write_output(report, out_dir, "gwpc.csv", |p| formats::write_gwpc_csv(p, &header, &gwpc))?;
    report.gwpc_cache_hit = Some(hit);
    report.gwpc_cache_key = Some(key);
    Ok(gwpc)
}

fn saturated_origins(grid: &ZoneGrid, params: &RadiationParams) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for z in &grid.zones {
        if radiation_probability(z.wpo, 0.0, 0.0, params)? == Radiation::SaturatedOrigin {
            out.push(z.index);
        }
    }
    Ok(out)
}

/// Stage 3: trips for every populated zone and modality.
pub fn trip_stage(cfg: &ScenarioConfig, grid: &ZoneGrid, gwpc: &PotentialGraph) -> Result<BTreeMap<usize, Vec<Trip>>> {
    let behavior = cfg.behavior_model()?;
    let evolution = cfg.evolution();
    let scorer = TripScorer::new(grid, gwpc, &behavior, evolution.k_for_sk)?;
    generate_all(&scorer, &evolution, &cfg.modalities()?)
}

/// Stage 4 with its conservation checks recorded in `report`.
pub fn assign_stage(
    cfg: &ScenarioConfig,
    grid: &ZoneGrid,
    trips: &BTreeMap<usize, Vec<Trip>>,
    report: &mut RunReport,
) -> Result<AssignStage> {
    let network = formats::read_network(&cfg.nodes_path(), &cfg.segments_path())?;
    let modalities = cfg.modalities()?;
    let plan = assign::path_flows(trips, grid, &modalities)?;
    let routed = assign::route_flows(&plan, trips, grid, &network)?;
    let loads = assign::accumulate_loads(&routed.paths, &network);

    report.counts.segments = network.segments().len();
    report.counts.network_components = network.component_count();
    if report.counts.network_components > 1 {
        report.warnings.push(format!(
            "road network has {} weakly connected components",
            report.counts.network_components
        ));
    }
    report.counts.routed_trips = routed.paths.len();
    report.counts.dropped_trips = routed.dropped.len();
    if !routed.dropped.is_empty() {
        report.warnings.push(format!("{} trips dropped for unroutable legs", routed.dropped.len()));
    }

    let pte = cfg.behavior_model()?.pte;
    for m in &modalities {
        report
            .diagnostics
            .median_travel_time_h
            .insert(m.name.clone(), m.travel_time_budget_h(pte.median_kj()));
    }

    // Populated origins with no trip in the dump still owe their demand.
    let mut balances = plan.balances.clone();
    for z in grid.populated_zones() {
        if !trips.contains_key(&z) {
            for m in &modalities {
                balances.push(assign::OriginBalance {
                    origin: z,
                    modality: m.name.clone(),
                    demand: m.share * grid.zones[z].population,
                    p_origin: 0.0,
                    trip_count: 0,
                });
            }
        }
    }

    let mut by_pair: BTreeMap<(usize, &str), crate::CompensatedSum> = BTreeMap::new();
    for f in &plan.flows {
        by_pair.entry((f.origin, f.modality.as_str())).or_default().add(f.flow);
    }
    let mut worst = ConservationCheck::relative("flow_per_origin", 0.0, 0.0);
    for b in balances.iter().filter(|b| b.unserved() == 0.0) {
        let sum = by_pair.get(&(b.origin, b.modality.as_str())).map_or(0.0, |s| s.value());
        let check = ConservationCheck::relative("flow_per_origin", sum, b.demand);
        if !(check.residual <= worst.residual) {
            worst = check;
        }
    }
    report.checks.push(worst);

    let routed_flow = crate::compensated_sum(routed.paths.iter().map(|p| p.flow));
    let dropped_flow = crate::compensated_sum(routed.dropped.iter().map(|d| d.flow));
    let unserved = crate::compensated_sum(balances.iter().map(|b| b.unserved()));
    let demand = crate::compensated_sum(balances.iter().map(|b| b.demand));
    report.diagnostics.dropped_flow = dropped_flow;
    report.diagnostics.unserved_demand = unserved;
    report.diagnostics.unserved_origins = balances.iter().filter(|b| b.unserved() > 0.0).count();
    report.checks.push(ConservationCheck::relative(
        "flow_reconciliation",
        crate::compensated_sum([routed_flow, dropped_flow, unserved]),
        demand,
    ));

    let path_distance = assign::path_distance(&routed.paths);
    report.diagnostics.person_distance_m = path_distance;
    report.checks.push(ConservationCheck::relative(
        "vehicle_km",
        assign::load_distance(&loads, &network),
        path_distance,
    ));

    Ok(AssignStage {
        network,
        plan,
        routed,
        loads,
    })
}

/// Reads every input and builds the zone grid without writing anything.
/// Returns human-readable findings.
pub fn check_scenario(cfg: &ScenarioConfig) -> Result<Vec<String>> {
    let mut report = RunReport::default();
    let zones = zone_stage(cfg, &mut report)?;
    let network = formats::read_network(&cfg.nodes_path(), &cfg.segments_path())?;
    cfg.behavior_model()?;
    let mut lines = vec![
        format!(
            "grid: {}x{} zones ({} active, {} populated), side {} km, margin {:.1} m",
            zones.grid.n_cols,
            zones.grid.n_rows,
            report.counts.active_zones,
            report.counts.populated_zones,
            cfg.grid.side_length_km,
            zones.margin_m
        ),
        format!(
            "pois: {} read, {} ignored; clusters: {}",
            report.counts.pois,
            report.counts.poi_rejects.total(),
            report.counts.clusters
        ),
        format!(
            "network: {} nodes, {} segments, {} components",
            network.nodes().len(),
            network.segments().len(),
            network.component_count()
        ),
    ];
    lines.extend(report.warnings.into_iter().map(|w| format!("warning: {w}")));
    Ok(lines)
}

/// Runs `f` on a dedicated pool of `threads` workers (0 = rayon default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::{load_scenario, load_scenario_with};
    use crate::io::synth::{synth_scenario, SynthSpec};

    fn scenario(n: usize) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = synth_scenario(&SynthSpec::new(n, 5), dir.path()).unwrap();
        (dir, path)
    }

    #[test]
    fn five_by_five_passes_all_checks() {
        let (_d, path) = scenario(5);
        let cfg = load_scenario(&path).unwrap();
        let run = run_pipeline(&cfg).unwrap();
        let r = &run.report;
        assert!(r.all_checks_pass(), "{:#?}", r.checks);
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["population", "flow_per_origin", "flow_reconciliation", "vehicle_km"]);
        assert!(r.counts.trips > 0);
        assert_eq!(r.gwpc_cache_hit, Some(false));
        for f in ["grid.csv", "gwpc.csv", "trips.csv", "loads.csv", "loads.geojson", "report.json"] {
            assert!(cfg.output_path().join(f).is_file(), "{f}");
        }
        assert_eq!(r.stages.len(), 5);
    }

    #[test]
    fn cached_rerun_is_identical() {
        let (_d, path) = scenario(4);
        let cfg = load_scenario(&path).unwrap();
        let first = run_pipeline(&cfg).unwrap();
        let out = cfg.output_path();
        let read = |f: &str| std::fs::read(out.join(f)).unwrap();
        let (trips, loads, gwpc) = (read("trips.csv"), read("loads.csv"), read("gwpc.csv"));
        let second = run_pipeline(&cfg).unwrap();
        assert_eq!(second.report.gwpc_cache_hit, Some(true));
        assert_eq!(first.gwpc.unwrap().as_slice(), second.gwpc.unwrap().as_slice());
        assert_eq!(read("trips.csv"), trips);
        assert_eq!(read("loads.csv"), loads);
        assert_eq!(read("gwpc.csv"), gwpc);
    }

    #[test]
    fn threshold_one_gives_zero_flows_and_warning() {
        let (_d, path) = scenario(4);
        let cfg = load_scenario_with(&path, &["evolution.p_trip_min=1.0".parse().unwrap()]).unwrap();
        let run = run_pipeline(&cfg).unwrap();
        assert_eq!(run.report.counts.trips, 0);
        assert!(run.report.warnings.iter().any(|w| w.contains("p_trip_min")));
        assert!(run.assignment.unwrap().loads.loads.values().all(|&v| v == 0.0));
        assert!(run.report.all_checks_pass());
        let d = &run.report.diagnostics;
        assert!((d.unserved_demand - d.total_population).abs() < 1e-6);
    }

    #[test]
    fn assign_from_dump_matches_full_run() {
        let (_d, path) = scenario(4);
        let cfg = load_scenario(&path).unwrap();
        let full = run_pipeline(&cfg).unwrap();
        let loads = std::fs::read(cfg.output_path().join("loads.csv")).unwrap();
        let dump = cfg.output_path().join("trips.csv");
        let copy = cfg.output_path().join("trips-copy.csv");
        std::fs::copy(&dump, &copy).unwrap();
        let again = run_stages(&cfg, Stage::Assign, &TripSource::Dump(copy)).unwrap();
        assert_eq!(std::fs::read(cfg.output_path().join("loads.csv")).unwrap(), loads);
        assert_eq!(full.assignment.unwrap().loads, again.assignment.unwrap().loads);
        assert!(again.report.gwpc_cache_hit.is_none());
    }

    #[test]
    fn partial_runs_stop_early() {
        let (_d, path) = scenario(4);
        let cfg = load_scenario(&path).unwrap();
        let run = run_stages(&cfg, Stage::Potential, &TripSource::Generate).unwrap();
        assert!(run.gwpc.is_some() && run.trips.is_none());
        assert!(!cfg.output_path().join("trips.csv").exists());
        let run = run_stages(&cfg, Stage::Tripgen, &TripSource::Generate).unwrap();
        assert!(run.trips.is_some() && run.assignment.is_none());
    }

    #[test]
    fn stage_errors_are_attributed() {
        let (d, path) = scenario(4);
        let cfg = load_scenario(&path).unwrap();
        std::fs::write(d.path().join("pois.csv"), "x,y,category\nnot-a-number,1,grocery\n").unwrap();
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(err.to_string().contains("stage `demand`"), "{err}");
        assert!(err.is_validation());
    }

    #[test]
    fn check_summarizes_inputs() {
        let (_d, path) = scenario(4);
        let lines = check_scenario(&load_scenario(&path).unwrap()).unwrap();
        assert!(lines[0].starts_with("grid: 4x4 zones"), "{lines:?}");
        assert!(lines[2].contains("24 segments"));
    }
}
