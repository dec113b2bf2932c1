//! Target-area delimitation and zone discretization.
//!
//! All coordinates are planar and pre-projected, in meters east/north of a
//! local origin. Grid side lengths are given in kilometers.

use geo::algorithm::buffer::{BufferStyle, LineJoin};
use geo::{Area, BooleanOps, Buffer, BoundingRect, Coord, Intersects, LineString, MultiPolygon, Point, Polygon};
use serde::{Deserialize, Serialize};

use crate::behavior::{ModalityProfile, PteDistribution};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Angular step (radians) used to approximate round buffer joins.
const ROUND_JOIN_STEP: f64 = 0.01;

/// Probability mass a traveller's round trip stays inside the target area.
pub const TARGET_AREA_QUANTILE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeoPoint {
    pub x: f64,
    pub y: f64,
}

impl GeoPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        GeoPoint { x, y }
    }

    pub fn distance(&self, other: &GeoPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<GeoPoint> for Coord<f64> {
    fn from(p: GeoPoint) -> Self {
        Coord { x: p.x, y: p.y }
    }
}

impl From<Coord<f64>> for GeoPoint {
    fn from(c: Coord<f64>) -> Self {
        GeoPoint { x: c.x, y: c.y }
    }
}

/// A populated settlement polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct LivingCluster {
    boundary: Vec<GeoPoint>,
    population: f64,
}

impl LivingCluster {
    /// Validates the ring (open or closed) and population.
    ///
    /// The ring must have at least three distinct vertices, be simple and
    /// enclose a positive area.
    pub fn new(mut boundary: Vec<GeoPoint>, population: f64) -> Result<Self> {
        ensure_non_negative("population", population)?;
        if boundary.len() > 1 && boundary.first() == boundary.last() {
            boundary.pop();
        }
        if boundary.len() < 3 {
            return Err(Error::Input(format!(
                "cluster polygon needs >= 3 vertices, got {}",
                boundary.len()
            )));
        }
        if let Some(p) = boundary.iter().find(|p| !p.is_finite()) {
            return Err(Error::Input(format!("non-finite cluster vertex {p:?}")));
        }
        if ring_area(&boundary).abs() <= 0.0 {
            return Err(Error::Input("cluster polygon has zero area".into()));
        }
        if !ring_is_simple(&boundary) {
            return Err(Error::Input("cluster polygon is self-intersecting".into()));
        }
        Ok(LivingCluster { boundary, population })
    }

    /// Ring vertices without the closing repeat.
    pub fn boundary(&self) -> &[GeoPoint] {
        &self.boundary
    }

    pub fn population(&self) -> f64 {
        self.population
    }

    pub fn area(&self) -> f64 {
        ring_area(&self.boundary).abs()
    }

    pub fn to_polygon(&self) -> Polygon<f64> {
        let mut coords: Vec<Coord<f64>> = self.boundary.iter().map(|&p| p.into()).collect();
        coords.push(coords[0]);
        Polygon::new(LineString::from(coords), vec![])
    }

    fn bounds(&self) -> (GeoPoint, GeoPoint) {
        bounds_of(self.boundary.iter().copied())
    }
}

/// Living clusters expanded by the travel-energy margin.
#[derive(Debug, Clone)]
pub struct TargetArea {
    pub boundary: MultiPolygon<f64>,
    pub margin_m: f64,
}

impl TargetArea {
    /// Point membership, boundary included.
    pub fn contains(&self, p: &GeoPoint) -> bool {
        self.boundary.intersects(&Point::new(p.x, p.y))
    }

    pub fn area_m2(&self) -> f64 {
        self.boundary.unsigned_area()
    }

    /// Number of disjoint polygons in the boundary.
    pub fn component_count(&self) -> usize {
        self.boundary.0.len()
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounding_box(&self) -> Option<(GeoPoint, GeoPoint)> {
        self.boundary
            .bounding_rect()
            .map(|r| (r.min().into(), r.max().into()))
    }
}

/// One square cell of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub index: usize,
    pub col: usize,
    pub row: usize,
    pub centroid: GeoPoint,
    pub population: f64,
    /// Weighted POI opportunity mass.
    pub wpo: f64,
    /// Centroid inside the target area. Inactive zones carry no mass.
    pub active: bool,
}

/// Axis-aligned grid of square zones, indexed row-major from the south-west corner.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneGrid {
    pub origin: GeoPoint,
    pub side_length_km: f64,
    pub n_cols: usize,
    pub n_rows: usize,
    pub zones: Vec<Zone>,
}

impl ZoneGrid {
    /// Builds a bare grid with every zone active and no mass.
    pub fn new(origin: GeoPoint, side_length_km: f64, n_cols: usize, n_rows: usize) -> Result<Self> {
        ensure_positive("side_length_km", side_length_km)?;
        if n_cols == 0 || n_rows == 0 {
            return Err(Error::Input("grid needs at least one column and row".into()));
        }
        let side = side_length_km * 1000.0;
        let zones = (0..n_rows)
            .flat_map(|row| (0..n_cols).map(move |col| (col, row)))
            .enumerate()
            .map(|(index, (col, row))| Zone {
                index,
                col,
                row,
                centroid: GeoPoint::new(
                    origin.x + (col as f64 + 0.5) * side,
                    origin.y + (row as f64 + 0.5) * side,
                ),
                population: 0.0,
                wpo: 0.0,
                active: true,
            })
            .collect();
        Ok(ZoneGrid {
            origin,
            side_length_km,
            n_cols,
            n_rows,
            zones,
        })
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn side_length_m(&self) -> f64 {
        self.side_length_km * 1000.0
    }

    pub fn index_of(&self, col: usize, row: usize) -> usize {
        row * self.n_cols + col
    }

    /// Zone whose cell contains `p`. Points on the outer north/east edge
    /// belong to the last column/row.
    pub fn zone_at(&self, p: &GeoPoint) -> Option<usize> {
        let side = self.side_length_m();
        let fx = (p.x - self.origin.x) / side;
        let fy = (p.y - self.origin.y) / side;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= self.n_cols as f64 && fy <= self.n_rows as f64) {
            return None;
        }
        let col = (fx.floor() as usize).min(self.n_cols - 1);
        let row = (fy.floor() as usize).min(self.n_rows - 1);
        Some(self.index_of(col, row))
    }

    /// Squared centroid offset in cell units (exact integer arithmetic).
    pub fn offset_sq(&self, a: usize, b: usize) -> u64 {
        let (za, zb) = (&self.zones[a], &self.zones[b]);
        let dc = za.col.abs_diff(zb.col) as u64;
        let dr = za.row.abs_diff(zb.row) as u64;
        dc * dc + dr * dr
    }

    /// Euclidean centroid distance in kilometers.
    pub fn distance_km(&self, a: usize, b: usize) -> f64 {
        self.side_length_km * (self.offset_sq(a, b) as f64).sqrt()
    }

    /// `(min corner, max corner)` of a zone's cell.
    pub fn cell_bounds(&self, index: usize) -> (GeoPoint, GeoPoint) {
        let z = &self.zones[index];
        let side = self.side_length_m();
        let min = GeoPoint::new(
            self.origin.x + z.col as f64 * side,
            self.origin.y + z.row as f64 * side,
        );
        (min, GeoPoint::new(min.x + side, min.y + side))
    }

    pub fn active_count(&self) -> usize {
        self.zones.iter().filter(|z| z.active).count()
    }

    pub fn total_population(&self) -> f64 {
        crate::compensated_sum(self.zones.iter().map(|z| z.population))
    }

    pub fn total_wpo(&self) -> f64 {
        crate::compensated_sum(self.zones.iter().map(|z| z.wpo))
    }

    /// Indices of active zones with positive population, ascending.
    pub fn populated_zones(&self) -> Vec<usize> {
        self.zones
            .iter()
            .filter(|z| z.active && z.population > 0.0)
            .map(|z| z.index)
            .collect()
    }
}

/// Outward distance (meters) such that a round trip of twice that distance
/// stays within the 95% quantile of the daily travel-energy distribution.
pub fn pte_margin(pte: &PteDistribution, modality: &ModalityProfile) -> Result<f64> {
    let rate = modality.energy_rate_kj_per_km;
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::param(
            "energy_rate_kj_per_km",
            format!("must be > 0, got {rate}"),
        ));
    }
    let q = pte.quantile(TARGET_AREA_QUANTILE)?;
    Ok(q / (2.0 * rate) * 1000.0)
}

/// Union of the cluster polygons, buffered outward by `margin_m` with round joins.
pub fn build_target_area(clusters: &[LivingCluster], margin_m: f64) -> Result<TargetArea> {
    ensure_non_negative("margin_m", margin_m)?;
    if clusters.is_empty() {
        return Err(Error::Input("target area needs at least one living cluster".into()));
    }
    let polygons = MultiPolygon(clusters.iter().map(LivingCluster::to_polygon).collect());
    let boundary = if margin_m == 0.0 {
        polygons
            .0
            .iter()
            .skip(1)
            .fold(MultiPolygon(vec![polygons.0[0].clone()]), |acc, p| acc.union(p))
    } else {
        polygons.buffer_with_style(
            BufferStyle::new(margin_m).line_join(LineJoin::Round(ROUND_JOIN_STEP)),
        )
    };
    Ok(TargetArea { boundary, margin_m })
}

/// Covers the area's bounding box with square cells of side `side_length_km`.
///
/// Cells whose centroid falls outside the area are kept but marked inactive.
pub fn make_grid(area: &TargetArea, side_length_km: f64) -> Result<ZoneGrid> {
    ensure_positive("side_length_km", side_length_km)?;
    let (min, max) = area
        .bounding_box()
        .ok_or_else(|| Error::Input("target area is empty".into()))?;
    let (width, height) = (max.x - min.x, max.y - min.y);
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::Input(format!(
            "target area has zero extent ({width} x {height} m)"
        )));
    }
    let side = side_length_km * 1000.0;
    let n_cols = cells_to_cover(width, side);
    let n_rows = cells_to_cover(height, side);
    let mut grid = ZoneGrid::new(min, side_length_km, n_cols, n_rows)?;
    for zone in &mut grid.zones {
        zone.active = area.contains(&zone.centroid);
    }
    Ok(grid)
}

// Relative slack absorbs rounding when the extent is an exact multiple of the side.
fn cells_to_cover(extent: f64, side: f64) -> usize {
    ((extent / side) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Spreads each cluster's population over the active cells it overlaps,
/// proportionally to the overlap area. Totals are conserved.
pub fn assign_population(grid: &ZoneGrid, clusters: &[LivingCluster]) -> Result<ZoneGrid> {
    let mut out = grid.clone();
    let side = grid.side_length_m();
    for (ci, cluster) in clusters.iter().enumerate() {
        let (lo, hi) = cluster.bounds();
        let col_range = cell_span(lo.x - grid.origin.x, hi.x - grid.origin.x, side, grid.n_cols);
        let row_range = cell_span(lo.y - grid.origin.y, hi.y - grid.origin.y, side, grid.n_rows);
        let mut overlaps = Vec::new();
        if let (Some((c0, c1)), Some((r0, r1))) = (col_range, row_range) {
            for row in r0..=r1 {
                for col in c0..=c1 {
                    let idx = grid.index_of(col, row);
                    if !grid.zones[idx].active {
                        continue;
                    }
                    let (cmin, cmax) = grid.cell_bounds(idx);
                    let a = clipped_area(cluster.boundary(), cmin, cmax);
                    if a > 0.0 {
                        overlaps.push((idx, a));
                    }
                }
            }
        }
        let covered = crate::compensated_sum(overlaps.iter().map(|&(_, a)| a));
        if covered <= 0.0 {
            return Err(Error::Input(format!(
                "living cluster {ci} does not overlap any active grid cell"
            )));
        }
        for (idx, a) in overlaps {
            out.zones[idx].population += cluster.population * (a / covered);
        }
    }
    Ok(out)
}

fn cell_span(lo: f64, hi: f64, side: f64, n: usize) -> Option<(usize, usize)> {
    let first = (lo / side).floor().max(0.0);
    let last = (hi / side).floor().min(n as f64 - 1.0);
    if hi < 0.0 || first > last {
        return None;
    }
    Some((first as usize, last as usize))
}

fn bounds_of(points: impl Iterator<Item = GeoPoint>) -> (GeoPoint, GeoPoint) {
    points.fold(
        (
            GeoPoint::new(f64::INFINITY, f64::INFINITY),
            GeoPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        ),
        |(lo, hi), p| {
            (
                GeoPoint::new(lo.x.min(p.x), lo.y.min(p.y)),
                GeoPoint::new(hi.x.max(p.x), hi.y.max(p.y)),
            )
        },
    )
}

/// Signed shoelace area, counter-clockwise positive.
pub(crate) fn ring_area(ring: &[GeoPoint]) -> f64 {
    let n = ring.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice / 2.0
}

fn ring_is_simple(ring: &[GeoPoint]) -> bool {
    let n = ring.len();
    let edge = |i: usize| geo::Line::new(Coord::from(ring[i]), Coord::from(ring[(i + 1) % n]));
    for i in 0..n {
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges may only share their common vertex; a
                // zero-length or folded-back edge would overlap.
                if ring[i] == ring[(i + 1) % n] {
                    return false;
                }
                continue;
            }
            if edge(i).intersects(&edge(j)) {
                return false;
            }
        }
    }
    true
}

/// Area of the part of a simple polygon inside an axis-aligned rectangle
/// (Sutherland-Hodgman against the four half-planes).
fn clipped_area(ring: &[GeoPoint], min: GeoPoint, max: GeoPoint) -> f64 {
    let mut poly: Vec<GeoPoint> = ring.to_vec();
    let planes: [(fn(&GeoPoint, f64) -> f64, f64); 4] = [
        (|p, v| p.x - v, min.x),
        (|p, v| v - p.x, max.x),
        (|p, v| p.y - v, min.y),
        (|p, v| v - p.y, max.y),
    ];
    for (side, value) in planes {
        if poly.is_empty() {
            return 0.0;
        }
        let mut next = Vec::with_capacity(poly.len() + 4);
        for i in 0..poly.len() {
            let cur = poly[i];
            let prev = poly[(i + poly.len() - 1) % poly.len()];
            let (dc, dp) = (side(&cur, value), side(&prev, value));
            if dc >= 0.0 {
                if dp < 0.0 {
                    next.push(intersect(prev, cur, dp, dc));
                }
                next.push(cur);
            } else if dp >= 0.0 {
                next.push(intersect(prev, cur, dp, dc));
            }
        }
        poly = next;
    }
    if poly.len() < 3 {
        0.0
    } else {
        ring_area(&poly).abs()
    }
}

fn intersect(a: GeoPoint, b: GeoPoint, da: f64, db: f64) -> GeoPoint {
    let t = da / (da - db);
    GeoPoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{PteDistribution, PteFamily};

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64, pop: f64) -> LivingCluster {
        LivingCluster::new(
            vec![
                GeoPoint::new(x0, y0),
                GeoPoint::new(x1, y0),
                GeoPoint::new(x1, y1),
                GeoPoint::new(x0, y1),
            ],
            pop,
        )
        .unwrap()
    }

    fn walker(rate: f64) -> ModalityProfile {
        ModalityProfile::new("walk", rate, 1.0, 5.0).unwrap()
    }

    #[test]
    fn cluster_validation() {
        assert!(LivingCluster::new(vec![GeoPoint::new(0.0, 0.0), GeoPoint::new(1.0, 0.0)], 1.0).is_err());
        let bowtie = vec![
            GeoPoint::new(0.0, 0.0),
            GeoPoint::new(1.0, 1.0),
            GeoPoint::new(1.0, 0.0),
            GeoPoint::new(0.0, 1.0),
        ];
        assert!(LivingCluster::new(bowtie, 1.0).is_err());
        let collinear = vec![GeoPoint::new(0.0, 0.0), GeoPoint::new(1.0, 0.0), GeoPoint::new(2.0, 0.0)];
        assert!(LivingCluster::new(collinear, 1.0).is_err());
        assert!(LivingCluster::new(rect(0.0, 0.0, 1.0, 1.0, 1.0).boundary().to_vec(), -1.0).is_err());
        // Closed rings are accepted and normalized.
        let closed = vec![
            GeoPoint::new(0.0, 0.0),
            GeoPoint::new(1.0, 0.0),
            GeoPoint::new(0.0, 1.0),
            GeoPoint::new(0.0, 0.0),
        ];
        assert_eq!(LivingCluster::new(closed, 1.0).unwrap().boundary().len(), 3);
    }

    #[test]
    fn margin_scales_inversely_with_energy_rate() {
        let pte = PteDistribution::default();
        let m1 = pte_margin(&pte, &walker(10.0)).unwrap();
        let m2 = pte_margin(&pte, &walker(20.0)).unwrap();
        assert_eq!(m1, 2.0 * m2);
        let mut frozen = walker(1.0);
        frozen.energy_rate_kj_per_km = f64::INFINITY;
        assert_eq!(pte_margin(&pte, &frozen).unwrap(), 0.0);
        let mut bad = walker(1.0);
        bad.energy_rate_kj_per_km = 0.0;
        assert!(pte_margin(&pte, &bad).is_err());
    }

    #[test]
    fn margin_matches_trapezoid_quantile_oracle() {
        // Oracle: trapezoid-integrate the exponential density on a fine grid
        // and bisect the running integral for 0.95.
        let lambda = 615.0 / std::f64::consts::LN_2;
        let density = |e: f64| (-e / lambda).exp() / lambda;
        let cdf = |x: f64| {
            let n = 200_000;
            let h = x / n as f64;
            let inner: f64 = (1..n).map(|i| density(i as f64 * h)).sum();
            h * (0.5 * (density(0.0) + density(x)) + inner)
        };
        let (mut lo, mut hi) = (0.0, 20.0 * lambda);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < 0.95 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q95 = 0.5 * (lo + hi);
        let margin_km = pte_margin(&PteDistribution::default(), &walker(10.0)).unwrap() / 1000.0;
        assert!((margin_km - q95 / 20.0).abs() < 1e-6 * q95 / 20.0, "{margin_km} vs {}", q95 / 20.0);
    }

    #[test]
    fn margin_grows_with_distribution_quantile() {
        let narrow = PteDistribution::new(PteFamily::Exponential, 500.0).unwrap();
        let wide = PteDistribution::new(PteFamily::Exponential, 800.0).unwrap();
        assert!(pte_margin(&narrow, &walker(10.0)).unwrap() < pte_margin(&wide, &walker(10.0)).unwrap());
    }

    #[test]
    fn zero_margin_is_union() {
        let a = rect(0.0, 0.0, 2.0, 2.0, 1.0);
        let b = rect(1.0, 1.0, 3.0, 3.0, 1.0);
        let area = build_target_area(&[a, b], 0.0).unwrap();
        assert!((area.area_m2() - 7.0).abs() < 1e-6);
        assert_eq!(area.component_count(), 1);
        assert!(build_target_area(&[], 1.0).is_err());
    }

    #[test]
    fn square_buffer_area_is_minkowski_sum() {
        let sq = rect(0.0, 0.0, 1.0, 1.0, 1.0);
        for m in [0.25, 0.5, 2.0] {
            let area = build_target_area(std::slice::from_ref(&sq), m).unwrap();
            let exact = 1.0 + 4.0 * m + std::f64::consts::PI * m * m;
            assert!(((area.area_m2() - exact) / exact).abs() < 1e-4, "m={m}: {} vs {exact}", area.area_m2());
        }
    }

    #[test]
    fn buffer_merges_clusters_when_margin_spans_gap() {
        let a = rect(0.0, 0.0, 1.0, 1.0, 1.0);
        let b = rect(3.0, 0.0, 4.0, 1.0, 1.0);
        // Gap 2 m: margins beyond 1 m on each side touch.
        let apart = build_target_area(&[a.clone(), b.clone()], 0.9).unwrap();
        assert_eq!(apart.component_count(), 2);
        let joined = build_target_area(&[a.clone(), b.clone()], 1.1).unwrap();
        assert_eq!(joined.component_count(), 1);
        // Geometric oracle: the midpoint of the gap is within 1.1 m of both squares.
        assert!(joined.contains(&GeoPoint::new(2.0, 0.5)));
        assert!(!apart.contains(&GeoPoint::new(2.0, 0.5)));
    }

    #[test]
    fn grid_counts() {
        let area = build_target_area(&[rect(0.0, 0.0, 10_000.0, 10_000.0, 1.0)], 0.0).unwrap();
        let g = make_grid(&area, 1.0).unwrap();
        assert_eq!((g.n_cols, g.n_rows, g.len()), (10, 10, 100));
        assert_eq!(g.active_count(), 100);
        let one = make_grid(&area, 25.0).unwrap();
        assert_eq!(one.len(), 1);
        let uneven = make_grid(&area, 3.0).unwrap();
        assert_eq!(uneven.len(), 16);
        assert!(make_grid(&area, 0.0).is_err());
    }

    #[test]
    fn l_shaped_area_marks_outside_cells_inactive() {
        let l_shape = LivingCluster::new(
            vec![
                GeoPoint::new(0.0, 0.0),
                GeoPoint::new(3000.0, 0.0),
                GeoPoint::new(3000.0, 1000.0),
                GeoPoint::new(1000.0, 1000.0),
                GeoPoint::new(1000.0, 3000.0),
                GeoPoint::new(0.0, 3000.0),
            ],
            900.0,
        )
        .unwrap();
        let area = build_target_area(std::slice::from_ref(&l_shape), 0.0).unwrap();
        let grid = make_grid(&area, 1.0).unwrap();
        assert_eq!(grid.len(), 9);
        let poly = l_shape.to_polygon();
        for z in &grid.zones {
            let inside = poly.intersects(&Point::new(z.centroid.x, z.centroid.y));
            assert_eq!(z.active, inside, "zone {}", z.index);
        }
        assert_eq!(grid.active_count(), 5);
        let populated = assign_population(&grid, &[l_shape]).unwrap();
        for z in populated.zones.iter().filter(|z| !z.active) {
            assert_eq!(z.population, 0.0);
            assert_eq!(z.wpo, 0.0);
        }
        assert!((populated.total_population() - 900.0).abs() < 1e-9);
    }

    #[test]
    fn population_split_by_overlap() {
        let grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, 2, 1).unwrap();
        let exact = assign_population(&grid, &[rect(0.0, 0.0, 1000.0, 1000.0, 50.0)]).unwrap();
        assert_eq!(exact.zones[0].population, 50.0);
        assert_eq!(exact.zones[1].population, 0.0);
        let half = assign_population(&grid, &[rect(500.0, 0.0, 1500.0, 1000.0, 80.0)]).unwrap();
        assert_eq!(half.zones[0].population, 40.0);
        assert_eq!(half.zones[1].population, 40.0);
        let outside = rect(5000.0, 5000.0, 6000.0, 6000.0, 1.0);
        assert!(assign_population(&grid, &[outside]).is_err());
    }

    #[test]
    fn zone_lookup_and_distances() {
        let grid = ZoneGrid::new(GeoPoint::new(100.0, 200.0), 0.5, 4, 3).unwrap();
        assert_eq!(grid.zone_at(&GeoPoint::new(100.0, 200.0)), Some(0));
        assert_eq!(grid.zone_at(&GeoPoint::new(2100.0, 1700.0)), Some(11));
        assert_eq!(grid.zone_at(&GeoPoint::new(99.0, 200.0)), None);
        assert_eq!(grid.zone_at(&GeoPoint::new(600.0, 700.0)), Some(5));
        assert_eq!(grid.offset_sq(0, 11), 9 + 4);
        assert!((grid.distance_km(0, 1) - 0.5).abs() < 1e-15);
        let c = grid.zones[5].centroid;
        assert_eq!((c.x, c.y), (850.0, 950.0));
    }

    #[test]
    fn clip_area_of_triangle() {
        let tri = [GeoPoint::new(0.0, 0.0), GeoPoint::new(2.0, 0.0), GeoPoint::new(0.0, 2.0)];
        let a = clipped_area(&tri, GeoPoint::new(0.0, 0.0), GeoPoint::new(1.0, 1.0));
        assert!((a - 1.0).abs() < 1e-12);
        let b = clipped_area(&tri, GeoPoint::new(1.0, 1.0), GeoPoint::new(2.0, 2.0));
        assert_eq!(b, 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn population_is_conserved(
                x0 in 0.0..4000.0f64, y0 in 0.0..4000.0f64,
                w in 10.0..3000.0f64, h in 10.0..3000.0f64,
                pop in 0.0..1e6f64,
            ) {
                let grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 0.7, 11, 11).unwrap();
                let cluster = rect(x0, y0, x0 + w, y0 + h, pop);
                let out = assign_population(&grid, &[cluster]).unwrap();
                let total = out.total_population();
                prop_assert!((total - pop).abs() <= 1e-9 * pop.max(1.0));
            }

            #[test]
            fn buffered_area_contains_cluster_vertices(
                pts in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..4),
                margin in 0.0..50.0f64,
            ) {
                let clusters: Vec<_> = pts
                    .iter()
                    .map(|&(u, v)| rect(u * 1000.0, v * 1000.0, u * 1000.0 + 120.0, v * 1000.0 + 80.0, 1.0))
                    .collect();
                let area = build_target_area(&clusters, margin).unwrap();
                for c in &clusters {
                    for p in c.boundary() {
                        prop_assert!(area.contains(p));
                    }
                }
            }
        }
    }
}
