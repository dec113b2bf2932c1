//! POI importance ranking and weighted opportunity (WPO) aggregation.
//!
//! Each POI category has an importance rank `z >= 1`. Its commutation
//! probability follows a rank-size law `c * z^-(1 + 1/alpha)`, normalized over
//! the `top_k` most important categories. A zone's WPO is the probability
//! weighted count of the POIs it contains.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::spatial::{GeoPoint, ZoneGrid};

pub const DEFAULT_ALPHA_POI: f64 = 1.0;
pub const DEFAULT_TOP_K: usize = 10;

/// `c * rank^-(1 + 1/alpha)`.
pub fn poi_probability(rank: i64, alpha_poi: f64, c_poi: f64) -> Result<f64> {
    if rank < 1 {
        return Err(Error::param("rank", format!("must be >= 1, got {rank}")));
    }
    ensure_positive("alpha_poi", alpha_poi)?;
    ensure_positive("c_poi", c_poi)?;
    Ok(c_poi * (rank as f64).powf(-(1.0 + 1.0 / alpha_poi)))
}

/// Unnormalized visiting frequency `rank^-alpha`.
pub fn visiting_frequency(rank: i64, alpha: f64) -> Result<f64> {
    if rank < 1 {
        return Err(Error::param("rank", format!("must be >= 1, got {rank}")));
    }
    ensure_positive("alpha", alpha)?;
    Ok((rank as f64).powf(-alpha))
}

/// Normalized rank weights. Ranks beyond `top_k` weigh zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandWeights {
    pub alpha_poi: f64,
    pub c_poi: f64,
    pub top_k: usize,
    /// `probabilities[z - 1]` for ranks `1..=top_k`.
    pub probabilities: Vec<f64>,
}

impl DemandWeights {
    pub fn weight(&self, rank: usize) -> f64 {
        match rank {
            0 => 0.0,
            r => self.probabilities.get(r - 1).copied().unwrap_or(0.0),
        }
    }
}

pub fn normalize_weights(alpha_poi: f64, top_k: usize) -> Result<DemandWeights> {
    ensure_positive("alpha_poi", alpha_poi)?;
    if top_k == 0 {
        return Err(Error::param("top_k", "must be >= 1"));
    }
    let raw: Vec<f64> = (1..=top_k as i64)
        .map(|z| poi_probability(z, alpha_poi, 1.0))
        .collect::<Result<_>>()?;
    let c_poi = 1.0 / crate::compensated_sum(raw.iter().copied());
    let probabilities = (1..=top_k as i64)
        .map(|z| poi_probability(z, alpha_poi, c_poi))
        .collect::<Result<_>>()?;
    Ok(DemandWeights {
        alpha_poi,
        c_poi,
        top_k,
        probabilities,
    })
}

/// A single point of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct Poi {
    pub location: GeoPoint,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoiCategory {
    pub name: String,
    pub rank: usize,
    pub count_per_zone: BTreeMap<usize, u64>,
}

impl PoiCategory {
    pub fn total_count(&self) -> u64 {
        self.count_per_zone.values().sum()
    }
}

/// POIs that did not contribute to any zone.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PoiRejects {
    pub outside_grid: usize,
    pub inactive_zone: usize,
    pub unranked_category: usize,
}

impl PoiRejects {
    pub fn total(&self) -> usize {
        self.outside_grid + self.inactive_zone + self.unranked_category
    }
}

/// Bins POIs into per-category zone counts. `ranking[i]` is the category of rank `i + 1`.
pub fn categorize_pois(grid: &ZoneGrid, pois: &[Poi], ranking: &[String]) -> Result<(Vec<PoiCategory>, PoiRejects)> {
    let mut rank_of = BTreeMap::new();
    for (i, name) in ranking.iter().enumerate() {
        if rank_of.insert(name.as_str(), i + 1).is_some() {
            return Err(Error::Input(format!("category `{name}` ranked twice")));
        }
    }
    let mut categories: Vec<PoiCategory> = ranking
        .iter()
        .enumerate()
        .map(|(i, name)| PoiCategory {
            name: name.clone(),
            rank: i + 1,
            count_per_zone: BTreeMap::new(),
        })
        .collect();
    let mut rejects = PoiRejects::default();
    for poi in pois {
        let Some(&rank) = rank_of.get(poi.category.as_str()) else {
            rejects.unranked_category += 1;
            continue;
        };
        match grid.zone_at(&poi.location) {
            None => rejects.outside_grid += 1,
            Some(z) if !grid.zones[z].active => rejects.inactive_zone += 1,
            Some(z) => *categories[rank - 1].count_per_zone.entry(z).or_default() += 1,
        }
    }
    Ok((categories, rejects))
}

/// Sets every active zone's WPO to `sum_c weight(rank_c) * count_c(zone)`.
///
/// Counts recorded for out-of-range or inactive zones are ignored and
/// reported in the returned rejects.
pub fn aggregate_wpo(grid: &ZoneGrid, categories: &[PoiCategory], weights: &DemandWeights) -> Result<(ZoneGrid, PoiRejects)> {
    if let Some(c) = categories.iter().find(|c| c.rank == 0) {
        return Err(Error::param("rank", format!("category `{}` has rank 0", c.name)));
    }
    let mut out = grid.clone();
    for zone in &mut out.zones {
        zone.wpo = 0.0;
    }
    let mut rejects = PoiRejects::default();
    let mut sorted: Vec<&PoiCategory> = categories.iter().collect();
    sorted.sort_by_key(|c| c.rank);
    for category in sorted {
        let w = weights.weight(category.rank);
        for (&zone, &count) in &category.count_per_zone {
            match out.zones.get_mut(zone) {
                None => rejects.outside_grid += count as usize,
                Some(z) if !z.active => rejects.inactive_zone += count as usize,
                Some(z) => z.wpo += w * count as f64,
            }
        }
    }
    Ok((out, rejects))
}
