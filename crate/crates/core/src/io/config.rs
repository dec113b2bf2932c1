//! Scenario configuration file.
//!
//! A scenario is one TOML document. Every key has a default except
//! `demand.category_ranks`; input paths are resolved against the directory
//! holding the file. Values given with [`Override`] (the CLI's `--set`)
//! replace file values before validation, so precedence is
//! flag > file > default.
//!
//! ```toml
//! rng_seed = 7
//! output_dir = "out"
//!
//! [inputs]
//! clusters = "clusters.geojson"
//! pois = "pois.csv"
//! nodes = "nodes.csv"
//! segments = "segments.csv"
//!
//! [grid]
//! side_length_km = 0.5
//!
//! [demand]
//! alpha_poi = 1.0
//! top_k = 10
//! category_ranks = ["grocery", "school", "park"]
//!
//! [behavior.levy]
//! mu = 0.0
//! c = 1.0
//!
//! [[behavior.modalities]]
//! name = "walk"
//! energy_rate = 200.0
//! share = 1.0
//! speed = 5.0
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::behavior::{LevyParams, ModalityProfile, MotifParams, PteDistribution, PteFamily, DEFAULT_PTE_MEDIAN_KJ};
use crate::demand::{normalize_weights, DemandWeights};
use crate::error::{Error, Result};
use crate::tripgen::{BehaviorModel, EvolutionConfig, LevyFactor, PteFactor};

/// One problem found while loading a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigIssue {
    /// Dotted key path, or the file path for I/O problems.
    pub key: String,
    pub message: String,
}

impl ConfigIssue {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigIssue {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub rng_seed: u64,
    pub output_dir: PathBuf,
    pub inputs: InputPaths,
    pub grid: GridConfig,
    pub spatial: SpatialConfig,
    pub demand: DemandConfig,
    pub behavior: BehaviorConfig,
    pub evolution: EvolutionSection,
    pub assignment: AssignmentConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            rng_seed: 0,
            output_dir: PathBuf::from("out"),
            inputs: InputPaths::default(),
            grid: GridConfig::default(),
            spatial: SpatialConfig::default(),
            demand: DemandConfig::default(),
            behavior: BehaviorConfig::default(),
            evolution: EvolutionSection::default(),
            assignment: AssignmentConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InputPaths {
    pub clusters: PathBuf,
    pub pois: PathBuf,
    pub nodes: PathBuf,
    pub segments: PathBuf,
}

impl Default for InputPaths {
    fn default() -> Self {
        InputPaths {
            clusters: "clusters.geojson".into(),
            pois: "pois.csv".into(),
            nodes: "nodes.csv".into(),
            segments: "segments.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub side_length_km: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { side_length_km: 1.0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpatialConfig {
    /// Modality whose energy rate sets the target-area margin. Defaults to
    /// the modality with the largest share.
    pub margin_modality: Option<String>,
    /// Fixed margin in meters; takes precedence over `margin_modality`.
    pub margin_m: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemandConfig {
    pub alpha_poi: f64,
    pub top_k: usize,
    /// Category names, most important first.
    pub category_ranks: Vec<String>,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            alpha_poi: 1.0,
            top_k: 10,
            category_ranks: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BehaviorConfig {
    pub levy: LevyConfig,
    pub pte: PteConfig,
    pub motif: MotifConfig,
    pub modalities: Vec<ModalityConfig>,
}

impl Default for BehaviorConfig {
    fn default() -> Self {
        BehaviorConfig {
            levy: LevyConfig::default(),
            pte: PteConfig::default(),
            motif: MotifConfig::default(),
            modalities: ModalityProfile::defaults().into_iter().map(ModalityConfig::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevyFactorKind {
    ZoneBin,
    FixedBin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LevyConfig {
    pub mu: f64,
    pub c: f64,
    pub factor: LevyFactorKind,
    /// Bin width for `factor = "fixed_bin"`.
    pub bin_width_km: Option<f64>,
}

impl Default for LevyConfig {
    fn default() -> Self {
        LevyConfig {
            mu: 0.0,
            c: 1.0,
            factor: LevyFactorKind::ZoneBin,
            bin_width_km: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PteFamilyKind {
    Exponential,
    LogNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PteFactorKind {
    Survival,
    DensityBin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PteConfig {
    pub family: PteFamilyKind,
    pub median_kj: f64,
    /// Log-space standard deviation, lognormal only.
    pub sigma: Option<f64>,
    pub factor: PteFactorKind,
    /// Bin width for `factor = "density_bin"`.
    pub bin_width_kj: Option<f64>,
}

impl Default for PteConfig {
    fn default() -> Self {
        PteConfig {
            family: PteFamilyKind::Exponential,
            median_kj: DEFAULT_PTE_MEDIAN_KJ,
            sigma: None,
            factor: PteFactorKind::Survival,
            bin_width_kj: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotifConfig {
    pub p_e: f64,
    pub gamma_r: f64,
    pub gamma_e: f64,
}

impl Default for MotifConfig {
    fn default() -> Self {
        let m = MotifParams::default();
        MotifConfig {
            p_e: m.p_e,
            gamma_r: m.gamma_r,
            gamma_e: m.gamma_e,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityConfig {
    pub name: String,
    /// kJ per km.
    pub energy_rate: f64,
    pub share: f64,
    /// km/h.
    pub speed: f64,
}

impl From<ModalityProfile> for ModalityConfig {
    fn from(p: ModalityProfile) -> Self {
        ModalityConfig {
            name: p.name,
            energy_rate: p.energy_rate_kj_per_km,
            share: p.share,
            speed: p.speed_km_h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionSection {
    pub p_trip_min: f64,
    pub max_intermediate_zones: usize,
    pub candidates_per_origin: usize,
    pub k_for_sk: usize,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        let e = EvolutionConfig::default();
        EvolutionSection {
            p_trip_min: e.p_trip_min,
            max_intermediate_zones: e.max_intermediate_zones,
            candidates_per_origin: e.candidates_per_origin,
            k_for_sk: e.k_for_sk,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssignmentConfig {
    /// Per-modality shares replacing `behavior.modalities[].share`.
    pub modality_shares: BTreeMap<String, f64>,
}

/// A `key=value` replacement applied on top of the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub key: String,
    pub value: toml::Value,
}

impl std::str::FromStr for Override {
    type Err = String;

    /// Parses `dotted.key=value`. The value is read as a TOML value and
    /// falls back to a plain string.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (key, raw) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("empty key in `{s}`"));
        }
        let raw = raw.trim();
        let value = format!("v = {raw}")
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        Ok(Override {
            key: key.to_string(),
            value,
        })
    }
}

/// Reads, overrides, and validates a scenario file. On failure the error
/// lists every problem found.
pub fn load_scenario(path: &Path) -> Result<ScenarioConfig> {
    load_scenario_with(path, &[])
}

pub fn load_scenario_with(path: &Path, overrides: &[Override]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scenario(&text, &base, overrides)
}

/// Parses scenario text; relative paths resolve against `base_dir`.
pub fn parse_scenario(text: &str, base_dir: &Path, overrides: &[Override]) -> Result<ScenarioConfig> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![ConfigIssue::new("<document>", e.message())]))?;
    let mut issues = Vec::new();
    for o in overrides {
        if let Err(msg) = apply_override(&mut table, o) {
            issues.push(ConfigIssue::new(&o.key, msg));
        }
    }

    let mut unknown = Vec::new();
    let parsed: std::result::Result<ScenarioConfig, _> =
        serde_ignored::deserialize(toml::Value::Table(table), |p| unknown.push(p.to_string()));
    let known = known_keys();
    for key in unknown {
        let message = match suggest(&key, &known) {
            Some(s) => format!("unknown key (did you mean `{s}`?)"),
            None => "unknown key".to_string(),
        };
        issues.push(ConfigIssue::new(key, message));
    }
    let mut cfg = match parsed {
        Ok(cfg) => cfg,
        Err(e) => {
            issues.push(ConfigIssue::new("<schema>", e.message()));
            return Err(Error::Config(issues));
        }
    };
    cfg.base_dir = base_dir.to_path_buf();
    issues.extend(cfg.validate());
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(issues))
    }
}

fn apply_override(table: &mut toml::Table, o: &Override) -> std::result::Result<(), String> {
    let parts: Vec<&str> = o.key.split('.').collect();
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut cur = table;
    for part in parents {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| format!("`{part}` is not a table"))?;
    }
    cur.insert(last.to_string(), o.value.clone());
    Ok(())
}

/// Every dotted key the format accepts, array indices elided.
pub fn known_keys() -> BTreeSet<String> {
    let mut full = ScenarioConfig::default();
    full.spatial = SpatialConfig {
        margin_modality: Some(String::new()),
        margin_m: Some(0.0),
    };
    full.behavior.levy.bin_width_km = Some(0.0);
    full.behavior.pte.sigma = Some(0.0);
    full.behavior.pte.bin_width_kj = Some(0.0);
    let value = toml::Value::try_from(&full).expect("config serializes");
    let mut keys = BTreeSet::new();
    collect_keys(&value, "", &mut keys);
    keys.insert("assignment.modality_shares".into());
    keys
}

fn collect_keys(v: &toml::Value, prefix: &str, out: &mut BTreeSet<String>) {
    match v {
        toml::Value::Table(t) => {
            for (k, child) in t {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                out.insert(key.clone());
                collect_keys(child, &key, out);
            }
        }
        toml::Value::Array(items) => {
            for item in items {
                collect_keys(item, prefix, out);
            }
        }
        _ => {}
    }
}

/// Closest known key within edit distance 2, comparing paths with array
/// indices removed.
fn suggest(unknown: &str, known: &BTreeSet<String>) -> Option<String> {
    let normalized: Vec<&str> = unknown.split('.').filter(|p| p.parse::<usize>().is_err()).collect();
    let normalized = normalized.join(".");
    known
        .iter()
        .map(|k| (strsim::levenshtein(&normalized, k), k))
        .filter(|(d, _)| *d <= 2)
        .min()
        .map(|(_, k)| k.clone())
}

impl ScenarioConfig {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn clusters_path(&self) -> PathBuf {
        self.resolve(&self.inputs.clusters)
    }

    pub fn pois_path(&self) -> PathBuf {
        self.resolve(&self.inputs.pois)
    }

    pub fn nodes_path(&self) -> PathBuf {
        self.resolve(&self.inputs.nodes)
    }

    pub fn segments_path(&self) -> PathBuf {
        self.resolve(&self.inputs.segments)
    }

    pub fn output_path(&self) -> PathBuf {
        self.resolve(&self.output_dir)
    }

    /// All range and consistency problems, empty when valid.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut issues = Vec::new();
        let mut check = |key: &str, ok: bool, msg: &str| {
            if !ok {
                issues.push(ConfigIssue::new(key, msg));
            }
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;

        check("grid.side_length_km", positive(self.grid.side_length_km), "must be finite and > 0");
        if let Some(m) = self.spatial.margin_m {
            check("spatial.margin_m", m.is_finite() && m >= 0.0, "must be finite and >= 0");
        }
        check("demand.alpha_poi", positive(self.demand.alpha_poi), "must be finite and > 0");
        check("demand.top_k", self.demand.top_k >= 1, "must be >= 1");
        check("demand.category_ranks", !self.demand.category_ranks.is_empty(), "must list at least one category");
        let unique: BTreeSet<&String> = self.demand.category_ranks.iter().collect();
        check(
            "demand.category_ranks",
            unique.len() == self.demand.category_ranks.len(),
            "contains duplicate categories",
        );

        let b = &self.behavior;
        check("behavior.levy.mu", b.levy.mu.is_finite() && b.levy.mu >= 0.0, "must be finite and >= 0");
        check("behavior.levy.c", positive(b.levy.c), "must be finite and > 0");
        if b.levy.factor == LevyFactorKind::FixedBin {
            check(
                "behavior.levy.bin_width_km",
                b.levy.bin_width_km.is_some_and(positive),
                "required and > 0 when factor = \"fixed_bin\"",
            );
        }
        check("behavior.pte.median_kj", positive(b.pte.median_kj), "must be finite and > 0");
        if b.pte.family == PteFamilyKind::LogNormal {
            check(
                "behavior.pte.sigma",
                b.pte.sigma.is_some_and(positive),
                "required and > 0 when family = \"log_normal\"",
            );
        }
        if b.pte.factor == PteFactorKind::DensityBin {
            check(
                "behavior.pte.bin_width_kj",
                b.pte.bin_width_kj.is_some_and(positive),
                "required and > 0 when factor = \"density_bin\"",
            );
        }
        check("behavior.motif.p_e", b.motif.p_e > 0.0 && b.motif.p_e < 1.0, "must lie in (0, 1)");
        check("behavior.motif.gamma_r", positive(b.motif.gamma_r), "must be finite and > 0");
        check("behavior.motif.gamma_e", positive(b.motif.gamma_e), "must be finite and > 0");

        check("behavior.modalities", !b.modalities.is_empty(), "at least one modality is required");
        let names: BTreeSet<&str> = b.modalities.iter().map(|m| m.name.as_str()).collect();
        check("behavior.modalities", names.len() == b.modalities.len(), "modality names must be unique");
        for (i, m) in b.modalities.iter().enumerate() {
            let key = |f: &str| format!("behavior.modalities.{i}.{f}");
            check(&key("name"), !m.name.is_empty(), "must not be empty");
            check(&key("energy_rate"), positive(m.energy_rate), "must be finite and > 0");
            check(&key("speed"), positive(m.speed), "must be finite and > 0");
            check(&key("share"), (0.0..=1.0).contains(&m.share), "must lie in [0, 1]");
        }
        for (name, share) in &self.assignment.modality_shares {
            let key = format!("assignment.modality_shares.{name}");
            check(&key, names.contains(name.as_str()), "names no configured modality");
            check(&key, (0.0..=1.0).contains(share), "must lie in [0, 1]");
        }
        if !b.modalities.is_empty() {
            let total: f64 = self.shares().iter().sum();
            check(
                "behavior.modalities",
                (total - 1.0).abs() <= 1e-9,
                &format!("shares sum to {total}, expected 1"),
            );
        }
        if let Some(name) = &self.spatial.margin_modality {
            check("spatial.margin_modality", names.contains(name.as_str()), "names no configured modality");
        }

        let e = &self.evolution;
        check("evolution.p_trip_min", e.p_trip_min > 0.0 && e.p_trip_min <= 1.0, "must lie in (0, 1]");
        check("evolution.max_intermediate_zones", e.max_intermediate_zones >= 1, "must be >= 1");
        check("evolution.candidates_per_origin", e.candidates_per_origin >= 1, "must be >= 1");
        check("evolution.k_for_sk", e.k_for_sk >= 1, "must be >= 1");

        for (key, path) in [
            ("inputs.clusters", self.clusters_path()),
            ("inputs.pois", self.pois_path()),
            ("inputs.nodes", self.nodes_path()),
            ("inputs.segments", self.segments_path()),
        ] {
            check(key, path.is_file(), &format!("file not found: {}", path.display()));
        }
        issues
    }

    fn shares(&self) -> Vec<f64> {
        self.behavior
            .modalities
            .iter()
            .map(|m| self.assignment.modality_shares.get(&m.name).copied().unwrap_or(m.share))
            .collect()
    }

    /// Modality profiles with assignment share overrides applied.
    pub fn modalities(&self) -> Result<Vec<ModalityProfile>> {
        self.behavior
            .modalities
            .iter()
            .zip(self.shares())
            .map(|(m, share)| ModalityProfile::new(m.name.clone(), m.energy_rate, share, m.speed))
            .collect()
    }

    pub fn behavior_model(&self) -> Result<BehaviorModel> {
        let b = &self.behavior;
        let family = match b.pte.family {
            PteFamilyKind::Exponential => PteFamily::Exponential,
            PteFamilyKind::LogNormal => PteFamily::LogNormal {
                sigma: b.pte.sigma.ok_or_else(|| Error::param("pte.sigma", "required for log_normal"))?,
            },
        };
        Ok(BehaviorModel {
            levy: LevyParams::new(b.levy.mu, b.levy.c)?,
            levy_factor: match b.levy.factor {
                LevyFactorKind::ZoneBin => LevyFactor::ZoneBin,
                LevyFactorKind::FixedBin => LevyFactor::FixedBin {
                    width_km: b.levy.bin_width_km.unwrap_or(0.0),
                },
            },
            pte: PteDistribution::new(family, b.pte.median_kj)?,
            pte_factor: match b.pte.factor {
                PteFactorKind::Survival => PteFactor::Survival,
                PteFactorKind::DensityBin => PteFactor::DensityBin {
                    width_kj: b.pte.bin_width_kj.unwrap_or(0.0),
                },
            },
            motif: MotifParams::new(b.motif.p_e, b.motif.gamma_r, b.motif.gamma_e)?,
        })
    }

    pub fn evolution(&self) -> EvolutionConfig {
        EvolutionConfig {
            p_trip_min: self.evolution.p_trip_min,
            max_intermediate_zones: self.evolution.max_intermediate_zones,
            candidates_per_origin: self.evolution.candidates_per_origin,
            rng_seed: self.rng_seed,
            k_for_sk: self.evolution.k_for_sk,
        }
    }

    pub fn demand_weights(&self) -> Result<DemandWeights> {
        normalize_weights(self.demand.alpha_poi, self.demand.top_k)
    }

    /// Modality used to size the target-area margin.
    pub fn margin_modality(&self) -> Result<ModalityProfile> {
        let modalities = self.modalities()?;
        let chosen = match &self.spatial.margin_modality {
            Some(name) => modalities.iter().find(|m| &m.name == name),
            None => modalities
                .iter()
                .fold(None, |best: Option<&ModalityProfile>, m| match best {
                    Some(b) if b.share >= m.share => Some(b),
                    _ => Some(m),
                }),
        };
        chosen
            .cloned()
            .ok_or_else(|| Error::param("spatial.margin_modality", "names no configured modality"))
    }

    /// Serializes the scenario as TOML.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
