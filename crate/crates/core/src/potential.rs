//! Extended radiation model over the zone grid, and the gravity baseline.
//!
//! The potential graph holds, for every ordered zone pair, the probability
//! that a trip from the origin picks a location in the destination given the
//! WPO passed on the way (`s_track`).

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::spatial::ZoneGrid;

/// Scale exponent for zones of side `side_length_km`: `(l / 36)^1.33`.
pub fn radiation_alpha(side_length_km: f64) -> f64 {
    (side_length_km / 36.0).powf(1.33)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiationParams {
    pub alpha: f64,
    /// Total WPO in the target area.
    pub n_total: f64,
    /// Average WPO per zone.
    pub n_avg: f64,
    pub z_zones: usize,
}

impl RadiationParams {
    pub fn new(side_length_km: f64, n_total: f64, z_zones: usize) -> Result<Self> {
        ensure_positive("side_length_km", side_length_km)?;
        ensure_non_negative("n_total", n_total)?;
        if z_zones == 0 {
            return Err(Error::param("z_zones", "must be >= 1"));
        }
        Ok(RadiationParams {
            alpha: radiation_alpha(side_length_km),
            n_total,
            n_avg: n_total / z_zones as f64,
            z_zones,
        })
    }

    pub fn from_grid(grid: &ZoneGrid) -> Result<Self> {
        RadiationParams::new(grid.side_length_km, grid.total_wpo(), grid.len())
    }

    fn survival_term(&self, x: f64) -> f64 {
        1.0 / (1.0 + x.powf(self.alpha))
    }
}

/// Normalized survival function of opportunity mass.
///
/// `x` is clamped to `[n_avg, n_total]`, so the result is 1 at or below the
/// average zone mass and 0 at or above the total.
pub fn p_greater(x: f64, params: &RadiationParams) -> Result<f64> {
    let (lo, hi) = (params.n_avg, params.n_total);
    let tail = params.survival_term(hi);
    let denom = params.survival_term(lo) - tail;
    if !(denom > 0.0) {
        return Err(Error::DegenerateNormalization(hi));
    }
    let x = if x.is_nan() { lo } else { x.clamp(lo, hi) };
    Ok((params.survival_term(x) - tail) / denom)
}

/// Outcome of a single radiation evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radiation {
    Probability(f64),
    /// The origin alone already holds the total mass; nothing can be chosen.
    SaturatedOrigin,
}

impl Radiation {
    pub fn value(self) -> f64 {
        match self {
            Radiation::Probability(p) => p,
            Radiation::SaturatedOrigin => 0.0,
        }
    }
}

/// `[P>(n_oz + s) - P>(n_oz + n_dz + s)] / P>(n_oz)`.
pub fn radiation_probability(n_oz: f64, n_dz: f64, s_track: f64, params: &RadiationParams) -> Result<Radiation> {
    ensure_non_negative("n_oz", n_oz)?;
    ensure_non_negative("n_dz", n_dz)?;
    ensure_non_negative("s_track", s_track)?;
    let base = p_greater(n_oz, params)?;
    if base <= 0.0 {
        return Ok(Radiation::SaturatedOrigin);
    }
    let near = p_greater(n_oz + s_track, params)?;
    let far = p_greater(n_oz + n_dz + s_track, params)?;
    Ok(Radiation::Probability(((near - far) / base).clamp(0.0, 1.0)))
}

/// WPO of zones whose centroid lies strictly inside the disk around the
/// origin's centroid reaching the destination's centroid, excluding both ends.
pub fn s_track(grid: &ZoneGrid, origin: usize, dest: usize) -> f64 {
    let radius = grid.offset_sq(origin, dest);
    crate::compensated_sum(
        grid.zones
            .iter()
            .filter(|z| z.index != origin && z.index != dest && grid.offset_sq(origin, z.index) < radius)
            .map(|z| z.wpo),
    )
}

/// Dense origin x destination matrix of radiation probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGraph {
    pub n_zones: usize,
    p_er: Vec<f64>,
    /// Origins whose own mass saturates the normalization (rows are zero).
    pub saturated_origins: Vec<usize>,
    /// Ordered pairs evaluated while building.
    pub pairs_evaluated: usize,
}

impl PotentialGraph {
    /// Wraps a row-major matrix, checking shape, range and zero diagonal.
    pub fn from_dense(n_zones: usize, p_er: Vec<f64>) -> Result<Self> {
        if p_er.len() != n_zones * n_zones {
            return Err(Error::Input(format!(
                "potential matrix has {} entries, expected {}",
                p_er.len(),
                n_zones * n_zones
            )));
        }
        if let Some(v) = p_er.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Input(format!("potential entry {v} outside [0, 1]")));
        }
        if (0..n_zones).any(|i| p_er[i * n_zones + i] != 0.0) {
            return Err(Error::Input("potential matrix diagonal must be 0".into()));
        }
        Ok(PotentialGraph {
            n_zones,
            p_er,
            saturated_origins: Vec::new(),
            pairs_evaluated: 0,
        })
    }

    pub fn get(&self, origin: usize, dest: usize) -> f64 {
        self.p_er[origin * self.n_zones + dest]
    }

    pub fn row(&self, origin: usize) -> &[f64] {
        &self.p_er[origin * self.n_zones..(origin + 1) * self.n_zones]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p_er
    }
}

/// Evaluates the radiation probability for every ordered pair of distinct zones.
///
/// Rows are computed in parallel. For each origin the other zones are sorted
/// by exact squared cell offset, so the intervening mass of all zones at a
/// given distance is one prefix sum.
pub fn build_gwpc(grid: &ZoneGrid, params: &RadiationParams) -> Result<PotentialGraph> {
    let active_with_mass = grid.zones.iter().filter(|z| z.active).count();
    if active_with_mass < 2 {
        return Err(Error::Input(format!(
            "potential graph needs >= 2 active zones, found {active_with_mass}"
        )));
    }
    if !(params.n_total > 0.0) {
        return Err(Error::Input("potential graph needs positive total WPO".into()));
    }
    // Surfaces the degenerate case before fanning out.
    p_greater(params.n_avg, params)?;

    let n = grid.len();
    let rows: Vec<(Vec<f64>, bool)> = (0..n)
        .into_par_iter()
        .map(|origin| gwpc_row(grid, params, origin))
        .collect::<Result<_>>()?;

    let mut p_er = Vec::with_capacity(n * n);
    let mut saturated_origins = Vec::new();
    for (origin, (row, saturated)) in rows.into_iter().enumerate() {
        if saturated {
            saturated_origins.push(origin);
        }
        p_er.extend(row);
    }
    Ok(PotentialGraph {
        n_zones: n,
        p_er,
        saturated_origins,
        pairs_evaluated: n * (n - 1),
    })
}

fn gwpc_row(grid: &ZoneGrid, params: &RadiationParams, origin: usize) -> Result<(Vec<f64>, bool)> {
    let n = grid.len();
    let mut others: Vec<(u64, usize)> = (0..n)
        .filter(|&j| j != origin)
        .map(|j| (grid.offset_sq(origin, j), j))
        .collect();
    others.sort_unstable();
    let n_oz = grid.zones[origin].wpo;
    let mut row = vec![0.0; n];
    let mut saturated = false;
    let mut inside = crate::CompensatedSum::default();
    let mut start = 0;
    while start < others.len() {
        let d = others[start].0;
        let end = start + others[start..].iter().take_while(|(dd, _)| *dd == d).count();
        let s = inside.value();
        for &(_, dest) in &others[start..end] {
            match radiation_probability(n_oz, grid.zones[dest].wpo, s, params)? {
                Radiation::Probability(p) => row[dest] = p,
                Radiation::SaturatedOrigin => saturated = true,
            }
        }
        for &(_, j) in &others[start..end] {
            inside.add(grid.zones[j].wpo);
        }
        start = end;
    }
    Ok((row, saturated))
}

/// Gravity baseline `p_i * p_j * exp(-beta * d_ij)`, unnormalized.
pub fn gravity_probability(pop_i: f64, pop_j: f64, d_ij_km: f64, beta: f64) -> f64 {
    pop_i * pop_j * (-beta * d_ij_km).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::GeoPoint;

    fn params(alpha: f64, n_avg: f64, n_total: f64) -> RadiationParams {
        RadiationParams {
            alpha,
            n_total,
            n_avg,
            z_zones: 1,
        }
    }

    fn grid_with(cols: usize, rows: usize, wpo: &[f64]) -> ZoneGrid {
        let mut g = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, cols, rows).unwrap();
        for (z, &w) in g.zones.iter_mut().zip(wpo) {
            z.wpo = w;
        }
        g
    }

    #[test]
    fn alpha_values() {
        assert_eq!(radiation_alpha(36.0), 1.0);
        assert!((radiation_alpha(1.0) - (-1.33 * 36f64.ln()).exp()).abs() < 1e-15);
        assert!((radiation_alpha(1.0) - 8.52e-3).abs() < 1e-5);
        assert!(radiation_alpha(2.0) > radiation_alpha(1.0));
    }

    #[test]
    fn p_greater_examples() {
        let p = params(1.0, 1.0, 9.0);
        assert_eq!(p_greater(1.0, &p).unwrap(), 1.0);
        assert_eq!(p_greater(9.0, &p).unwrap(), 0.0);
        assert!((p_greater(4.0, &p).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(p_greater(0.2, &p).unwrap(), 1.0);
        assert_eq!(p_greater(50.0, &p).unwrap(), 0.0);
        assert!(matches!(p_greater(1.0, &params(1.0, 3.0, 3.0)), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn radiation_examples() {
        let p = params(1.0, 1.0, 9.0);
        assert_eq!(radiation_probability(1.0, 0.0, 2.0, &p).unwrap().value(), 0.0);
        assert!((radiation_probability(1.0, 3.0, 0.0, &p).unwrap().value() - 0.75).abs() < 1e-15);
        // Destination holds all the remaining mass: the far term vanishes.
        let near = p_greater(1.0 + 3.0, &p).unwrap();
        let r = radiation_probability(1.0, 5.0, 3.0, &p).unwrap().value();
        assert!((r - near / p_greater(1.0, &p).unwrap()).abs() < 1e-15);
        assert_eq!(radiation_probability(9.0, 1.0, 0.0, &p).unwrap(), Radiation::SaturatedOrigin);
    }

    #[test]
    fn s_track_examples() {
        let row = grid_with(3, 1, &[1.0, 1.0, 1.0]);
        assert_eq!(s_track(&row, 0, 1), 0.0);
        assert_eq!(s_track(&row, 0, 2), 1.0);
        // Diagonal neighbour: the two edge neighbours are strictly closer.
        let sq = grid_with(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s_track(&sq, 0, 3), 5.0);
    }

    #[test]
    fn gwpc_degenerate_inputs() {
        let mut g = grid_with(2, 1, &[3.0, 0.0]);
        g.zones[1].active = false;
        assert!(build_gwpc(&g, &RadiationParams::from_grid(&g).unwrap()).is_err());
        let zero = grid_with(2, 2, &[0.0; 4]);
        assert!(build_gwpc(&zero, &RadiationParams::from_grid(&zero).unwrap()).is_err());
    }

    #[test]
    fn gwpc_two_zone_symmetry() {
        let g = grid_with(2, 1, &[2.0, 2.0]);
        let m = build_gwpc(&g, &RadiationParams::from_grid(&g).unwrap()).unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.pairs_evaluated, 2);
    }

    #[test]
    fn gwpc_matches_pairwise_evaluation() {
        let wpo: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64 + 0.5).collect();
        let g = grid_with(4, 3, &wpo);
        let p = RadiationParams::from_grid(&g).unwrap();
        let m = build_gwpc(&g, &p).unwrap();
        for i in 0..g.len() {
            for j in 0..g.len() {
                let expected = if i == j {
                    0.0
                } else {
                    radiation_probability(g.zones[i].wpo, g.zones[j].wpo, s_track(&g, i, j), &p).unwrap().value()
                };
                assert!((m.get(i, j) - expected).abs() < 1e-12);
            }
        }
        assert_eq!(m.pairs_evaluated, 12 * 11);
    }

    #[test]
    fn gwpc_uniform_square_is_rotation_invariant() {
        let n = 5;
        let g = grid_with(n, n, &vec![1.0; n * n]);
        let m = build_gwpc(&g, &RadiationParams::from_grid(&g).unwrap()).unwrap();
        let rot = |i: usize| {
            let (c, r) = (i % n, i / n);
            (n - 1 - r) + c * n
        };
        for i in 0..n * n {
            for j in 0..n * n {
                assert_eq!(m.get(i, j), m.get(rot(i), rot(j)));
            }
        }
    }

    #[test]
    fn dense_wrapper_validates() {
        assert!(PotentialGraph::from_dense(2, vec![0.0, 0.5, 0.5, 0.0]).is_ok());
        assert!(PotentialGraph::from_dense(2, vec![0.1, 0.5, 0.5, 0.0]).is_err());
        assert!(PotentialGraph::from_dense(2, vec![0.0, 1.5, 0.5, 0.0]).is_err());
        assert!(PotentialGraph::from_dense(2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn gravity_examples() {
        assert_eq!(gravity_probability(3.0, 4.0, 0.0, 0.7), 12.0);
        assert!((gravity_probability(1.0, 1.0, 1.0, 1.0) - 0.3679).abs() < 5e-5);
        let beta = 0.4;
        let d = std::f64::consts::LN_2 / beta;
        assert!((gravity_probability(1.0, 1.0, d, 2.0 * beta) - 0.25).abs() < 1e-15);
        assert!((gravity_probability(1.0, 1.0, d, beta) - 0.5).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn radiation_params() -> impl Strategy<Value = RadiationParams> {
            (0.01..3.0f64, 0.1..50.0f64, 2usize..400).prop_map(|(alpha, n_avg, z)| RadiationParams {
                alpha,
                n_avg,
                n_total: n_avg * z as f64,
                z_zones: z,
            })
        }

        proptest! {
            #[test]
            fn p_greater_decreases(p in radiation_params(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assume!(hi - lo > 1e-6);
                let x = |t: f64| p.n_avg + t * (p.n_total - p.n_avg);
                prop_assert!(p_greater(x(lo), &p).unwrap() > p_greater(x(hi), &p).unwrap());
            }

            #[test]
            fn radiation_in_unit_interval(p in radiation_params(), o in 0.0..1e4f64, d in 0.0..1e4f64, s in 0.0..1e4f64) {
                let v = radiation_probability(o, d, s, &p).unwrap().value();
                prop_assert!((0.0..=1.0).contains(&v));
            }

            #[test]
            fn radiation_non_increasing_in_s(p in radiation_params(), o in 0.0..100.0f64, d in 0.0..100.0f64, s in 0.0..100.0f64, ds in 0.0..100.0f64) {
                // Holds where 1/(1+x^alpha) is convex (alpha <= 1) and the
                // origin mass is not clamped up to n_avg.
                prop_assume!(p.alpha <= 1.0);
                let o = p.n_avg + o;
                let a = radiation_probability(o, d, s, &p).unwrap().value();
                let b = radiation_probability(o, d, s + ds, &p).unwrap().value();
                prop_assert!(b <= a + 1e-15);
            }

            #[test]
            fn s_track_grows_with_distance(wpo in proptest::collection::vec(0.0..10.0f64, 16), origin in 0usize..16) {
                let g = grid_with(4, 4, &wpo);
                let mut dests: Vec<usize> = (0..16).filter(|&j| j != origin).collect();
                dests.sort_by_key(|&j| g.offset_sq(origin, j));
                for pair in dests.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    // Equal-distance destinations exclude each other's own mass.
                    if g.offset_sq(origin, a) < g.offset_sq(origin, b) {
                        prop_assert!(s_track(&g, origin, b) + 1e-12 >= s_track(&g, origin, a));
                    }
                }
            }
        }
    }
}
