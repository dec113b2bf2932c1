//! Per-trip probability factors: Lévy step lengths, daily travel-energy
//! budget, radius of gyration / exploration ratio and the motif weight.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::spatial::GeoPoint;

/// Median daily travel energy (kJ) reported for the majority of commuters.
pub const DEFAULT_PTE_MEDIAN_KJ: f64 = 615.0;

const PTE_GRID_INTERVALS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyParams {
    /// Location (km).
    pub mu: f64,
    /// Scale (km).
    pub c: f64,
}

impl Default for LevyParams {
    fn default() -> Self {
        LevyParams { mu: 0.0, c: 1.0 }
    }
}

impl LevyParams {
    pub fn new(mu: f64, c: f64) -> Result<Self> {
        ensure_non_negative("levy.mu", mu)?;
        ensure_positive("levy.c", c)?;
        Ok(LevyParams { mu, c })
    }
}

/// Lévy density of a single trip of length `r` km.
pub fn levy_pdf(r: f64, params: &LevyParams) -> Result<f64> {
    let LevyParams { mu, c } = *params;
    let dx = r - mu;
    if !(dx > 0.0) {
        return Err(Error::Domain(format!("levy density needs r > mu, got r={r}, mu={mu}")));
    }
    Ok((c / (2.0 * std::f64::consts::PI)).sqrt() * (-c / (2.0 * dx)).exp() / dx.powf(1.5))
}

/// Shape of the daily travel-energy density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PteFamily {
    Exponential,
    LogNormal { sigma: f64 },
}

/// Daily physical-travel-energy distribution, parameterized by its median.
///
/// The CDF is tabulated once by trapezoid integration of the density and is
/// immutable afterwards; `cdf` and `quantile` interpolate inside a grid cell
/// by integrating the linearly interpolated density. Exponential grids are
/// uniform; lognormal grids are uniform in log-energy.
#[derive(Debug, Clone)]
pub struct PteDistribution {
    family: PteFamily,
    median_kj: f64,
    nodes: Vec<f64>,
    density_grid: Vec<f64>,
    cdf_grid: Vec<f64>,
    /// Integral of the density over the tabulated support before renormalization.
    raw_mass: f64,
}

impl Default for PteDistribution {
    fn default() -> Self {
        PteDistribution::new(PteFamily::Exponential, DEFAULT_PTE_MEDIAN_KJ)
            .expect("default travel-energy distribution is valid")
    }
}

impl PteDistribution {
    pub fn new(family: PteFamily, median_kj: f64) -> Result<Self> {
        ensure_positive("pte.median_kj", median_kj)?;
        let n = PTE_GRID_INTERVALS;
        let nodes: Vec<f64> = match family {
            PteFamily::Exponential => {
                let step = 40.0 * median_kj / std::f64::consts::LN_2 / n as f64;
                (0..=n).map(|i| i as f64 * step).collect()
            }
            PteFamily::LogNormal { sigma } => {
                ensure_positive("pte.sigma", sigma)?;
                let (lo, hi) = (median_kj.ln() - 9.0 * sigma, median_kj.ln() + 9.0 * sigma);
                let step = (hi - lo) / (n - 1) as f64;
                std::iter::once(0.0)
                    .chain((0..n).map(|i| (lo + i as f64 * step).exp()))
                    .collect()
            }
        };
        let density_grid: Vec<f64> = nodes.iter().map(|&e| raw_density(family, median_kj, e)).collect();
        let mut cdf_grid = Vec::with_capacity(nodes.len());
        let mut acc = crate::CompensatedSum::default();
        cdf_grid.push(0.0);
        for i in 1..nodes.len() {
            acc.add(0.5 * (nodes[i] - nodes[i - 1]) * (density_grid[i - 1] + density_grid[i]));
            cdf_grid.push(acc.value());
        }
        let raw_mass = acc.value();
        if (raw_mass - 1.0).abs() > 1e-6 {
            return Err(Error::param(
                "pte.family",
                format!("density integrates to {raw_mass} on its support, expected 1"),
            ));
        }
        for v in &mut cdf_grid {
            *v /= raw_mass;
        }
        let density_grid = density_grid.into_iter().map(|d| d / raw_mass).collect();
        Ok(PteDistribution {
            family,
            median_kj,
            nodes,
            density_grid,
            cdf_grid,
            raw_mass,
        })
    }

    pub fn family(&self) -> PteFamily {
        self.family
    }

    pub fn median_kj(&self) -> f64 {
        self.median_kj
    }

    pub fn support_kj(&self) -> f64 {
        *self.nodes.last().expect("non-empty grid")
    }

    /// Integral of the analytic density over the tabulated support.
    pub fn tabulated_mass(&self) -> f64 {
        self.raw_mass
    }

    pub fn density(&self, energy_kj: f64) -> f64 {
        if energy_kj < 0.0 {
            return 0.0;
        }
        raw_density(self.family, self.median_kj, energy_kj) / self.raw_mass
    }

    pub fn cdf(&self, energy_kj: f64) -> f64 {
        if !(energy_kj > 0.0) {
            return 0.0;
        }
        if energy_kj >= self.support_kj() {
            return 1.0;
        }
        let k = self.nodes.partition_point(|&x| x <= energy_kj) - 1;
        self.cdf_grid[k] + self.partial_cell(k, energy_kj - self.nodes[k])
    }

    pub fn survival(&self, energy_kj: f64) -> f64 {
        (1.0 - self.cdf(energy_kj)).max(0.0)
    }

    /// Smallest energy whose CDF reaches `p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::UnboundedQuantile(p));
        }
        let last = *self.cdf_grid.last().expect("non-empty grid");
        if p > last {
            return Err(Error::UnboundedQuantile(p));
        }
        // First grid point with cdf >= p, then bisect inside the cell before it.
        let hi_idx = self.cdf_grid.partition_point(|&c| c < p);
        if hi_idx == 0 {
            return Ok(0.0);
        }
        let k = hi_idx - 1;
        let target = p - self.cdf_grid[k];
        let (mut lo, mut hi) = (0.0, self.nodes[k + 1] - self.nodes[k]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.partial_cell(k, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(self.nodes[k] + 0.5 * (lo + hi))
    }

    // Integral of the linearly interpolated density over [x_k, x_k + t].
    fn partial_cell(&self, k: usize, t: f64) -> f64 {
        let (f0, f1) = (self.density_grid[k], self.density_grid[k + 1]);
        let width = self.nodes[k + 1] - self.nodes[k];
        t * f0 + (f1 - f0) * t * t / (2.0 * width)
    }
}

fn raw_density(family: PteFamily, median: f64, e: f64) -> f64 {
    if e < 0.0 {
        return 0.0;
    }
    match family {
        PteFamily::Exponential => {
            let lambda = median / std::f64::consts::LN_2;
            (-e / lambda).exp() / lambda
        }
        PteFamily::LogNormal { sigma } => {
            if e == 0.0 {
                return 0.0;
            }
            let z = (e.ln() - median.ln()) / sigma;
            (-0.5 * z * z).exp() / (e * sigma * (2.0 * std::f64::consts::PI).sqrt())
        }
    }
}

/// Mode-specific travel parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityProfile {
    pub name: String,
    pub energy_rate_kj_per_km: f64,
    /// Share of the population using this mode.
    pub share: f64,
    pub speed_km_h: f64,
}

impl ModalityProfile {
    pub fn new(name: impl Into<String>, energy_rate_kj_per_km: f64, share: f64, speed_km_h: f64) -> Result<Self> {
        let profile = ModalityProfile {
            name: name.into(),
            energy_rate_kj_per_km,
            share,
            speed_km_h,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("modality.energy_rate", self.energy_rate_kj_per_km)?;
        ensure_positive("modality.speed", self.speed_km_h)?;
        if !(0.0..=1.0).contains(&self.share) {
            return Err(Error::param("modality.share", format!("must lie in [0, 1], got {}", self.share)));
        }
        Ok(())
    }

    /// Energy (kJ) spent covering `distance_km`.
    pub fn energy_kj(&self, distance_km: f64) -> f64 {
        self.energy_rate_kj_per_km * distance_km
    }

    /// Daily travel time (hours) that spends `energy_kj` at this mode's
    /// energy-per-hour rate. Travel time is inversely proportional to the rate
    /// of energy expenditure; diagnostic only.
    pub fn travel_time_budget_h(&self, energy_kj: f64) -> f64 {
        energy_kj / (self.energy_rate_kj_per_km * self.speed_km_h)
    }

    /// Placeholder calibration: walk, bicycle and car.
    pub fn defaults() -> Vec<ModalityProfile> {
        vec![
            ModalityProfile {
                name: "walk".into(),
                energy_rate_kj_per_km: 200.0,
                share: 0.25,
                speed_km_h: 5.0,
            },
            ModalityProfile {
                name: "bicycle".into(),
                energy_rate_kj_per_km: 65.0,
                share: 0.15,
                speed_km_h: 15.0,
            },
            ModalityProfile {
                name: "car".into(),
                energy_rate_kj_per_km: 6.0,
                share: 0.6,
                speed_km_h: 40.0,
            },
        ]
    }
}

/// Checks that modality shares form a distribution.
pub fn validate_shares(profiles: &[ModalityProfile]) -> Result<()> {
    if profiles.is_empty() {
        return Err(Error::Input("at least one modality is required".into()));
    }
    let total: f64 = profiles.iter().map(|p| p.share).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param("modality.share", format!("shares sum to {total}, expected 1")));
    }
    Ok(())
}

/// A visited location and how often it was visited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visit {
    pub location: GeoPoint,
    pub count: u32,
}

impl Visit {
    pub fn new(location: GeoPoint, count: u32) -> Self {
        Visit { location, count }
    }
}

/// Radius of gyration over the `k` most visited locations (all when `None`),
/// in the coordinate unit of the input.
///
/// The visit-weighted squared deviations are normalized by the number of
/// locations considered. Ties in visit count keep input order.
pub fn radius_of_gyration(locations: &[Visit], k: Option<usize>) -> Result<f64> {
    if locations.is_empty() {
        return Err(Error::Input("radius of gyration needs at least one location".into()));
    }
    if let Some(v) = locations.iter().find(|v| v.count == 0) {
        return Err(Error::Input(format!("visit count must be >= 1 at {:?}", v.location)));
    }
    let top = top_visited(locations, k);
    let weight: f64 = top.iter().map(|v| v.count as f64).sum();
    let cx = top.iter().map(|v| v.count as f64 * v.location.x).sum::<f64>() / weight;
    let cy = top.iter().map(|v| v.count as f64 * v.location.y).sum::<f64>() / weight;
    let spread: f64 = top
        .iter()
        .map(|v| {
            let (dx, dy) = (v.location.x - cx, v.location.y - cy);
            v.count as f64 * (dx * dx + dy * dy)
        })
        .sum();
    Ok((spread / top.len() as f64).sqrt())
}

fn top_visited(locations: &[Visit], k: Option<usize>) -> Vec<Visit> {
    let mut sorted = locations.to_vec();
    sorted.sort_by(|a, b| b.count.cmp(&a.count));
    if let Some(k) = k {
        sorted.truncate(k.max(1));
    }
    sorted
}

/// `r_g(k) / r_g`. Co-located visits (0/0) count as a pure returner, 1.
pub fn exploration_ratio(locations: &[Visit], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "must be >= 1"));
    }
    let total = radius_of_gyration(locations, None)?;
    let top = radius_of_gyration(locations, Some(k))?;
    if total == 0.0 {
        return Ok(1.0);
    }
    Ok(top / total)
}

/// Returner/explorer mixture: `(1 - p_e) s^gamma_r + p_e (1 - s)^gamma_e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotifParams {
    pub p_e: f64,
    pub gamma_r: f64,
    pub gamma_e: f64,
}

impl Default for MotifParams {
    fn default() -> Self {
        MotifParams {
            p_e: 0.2,
            gamma_r: 2.0,
            gamma_e: 2.0,
        }
    }
}

impl MotifParams {
    pub fn new(p_e: f64, gamma_r: f64, gamma_e: f64) -> Result<Self> {
        let params = MotifParams { p_e, gamma_r, gamma_e };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_e > 0.0 && self.p_e < 1.0) {
            return Err(Error::param("motif.p_e", format!("must lie in (0, 1), got {}", self.p_e)));
        }
        ensure_positive("motif.gamma_r", self.gamma_r)?;
        ensure_positive("motif.gamma_e", self.gamma_e)
    }
}

/// Weight of a daily pattern with exploration ratio `s_k` (clamped to `[0, 1]`).
pub fn motif_weight(s_k: f64, params: &MotifParams) -> f64 {
    let s = if s_k.is_nan() { 1.0 } else { s_k.clamp(0.0, 1.0) };
    (1.0 - params.p_e) * s.powf(params.gamma_r) + params.p_e * (1.0 - s).powf(params.gamma_e)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson, used as an independent quadrature oracle.
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, depth)
    }

    fn levy_mass(params: &LevyParams, upper: f64) -> f64 {
        // Split geometrically so each panel sees a smooth piece of the tail.
        let f = |r: f64| if r <= params.mu { 0.0 } else { levy_pdf(r, params).unwrap() };
        let mut total = 0.0;
        let mut a = params.mu;
        let mut b = params.mu + 1e-3 * params.c;
        while a < upper {
            let hi = b.min(upper);
            total += simpson(&f, a, hi, 1e-13, 40);
            a = hi;
            b = params.mu + (b - params.mu) * 4.0;
        }
        total
    }

    #[test]
    fn levy_density_values() {
        let p = LevyParams::default();
        let expected = (1.0 / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5f64).exp();
        assert!((levy_pdf(1.0, &p).unwrap() - expected).abs() < 1e-10);
        assert!((levy_pdf(1.0, &p).unwrap() - 0.2420).abs() < 5e-5);
        assert!(levy_pdf(1e-4, &p).unwrap() < 1e-100);
        assert!(levy_pdf(0.0, &p).is_err());
        assert!(levy_pdf(-1.0, &LevyParams::new(0.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn levy_truncated_mass_matches_closed_form() {
        // The mass beyond mu + R*c is erf(sqrt(1/(2R))); for R = 1e6 it is
        // ~7.98e-4, so the truncated integral sits at 0.9992021.
        for params in [LevyParams::default(), LevyParams::new(0.0, 0.3).unwrap(), LevyParams::new(2.0, 5.0).unwrap()] {
            let upper = params.mu + 1e6 * params.c;
            let mass = levy_mass(&params, upper);
            assert!((mass - 0.999_202_115_572_18).abs() < 1e-6, "{params:?}: {mass}");
        }
    }

    #[test]
    fn levy_is_unimodal_with_mode_at_c_over_three() {
        let p = LevyParams::new(1.0, 3.0).unwrap();
        let mode = p.mu + p.c / 3.0;
        let at = |r: f64| levy_pdf(r, &p).unwrap();
        let mut prev = 0.0;
        let mut r = p.mu + 1e-3;
        while r < mode {
            assert!(at(r) >= prev);
            prev = at(r);
            r += 1e-3;
        }
        while r < 50.0 {
            assert!(at(r) <= prev + 1e-15);
            prev = at(r);
            r += 1e-2;
        }
    }

    #[test]
    fn pte_default_calibration() {
        let pte = PteDistribution::default();
        assert!((pte.cdf(615.0) - 0.5).abs() < 1e-6);
        assert!((pte.quantile(0.5).unwrap() - 615.0).abs() < 1e-3);
        let lambda = 615.0 / std::f64::consts::LN_2;
        assert!((lambda - 887.3).abs() < 0.05);
        assert!((pte.tabulated_mass() - 1.0).abs() < 1e-6);
        assert_eq!(pte.cdf(0.0), 0.0);
        assert_eq!(pte.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn pte_unit_exponential_density() {
        let pte = PteDistribution::new(PteFamily::Exponential, std::f64::consts::LN_2).unwrap();
        // Density is rescaled by the tabulated mass, which is 1 to within ~3e-8.
        assert!((pte.density(0.0) - 1.0).abs() < 1e-7);
        assert!((pte.cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn pte_quantile_inverts_cdf() {
        for pte in [
            PteDistribution::default(),
            PteDistribution::new(PteFamily::LogNormal { sigma: 0.6 }, 615.0).unwrap(),
        ] {
            for i in 1..200 {
                let x = i as f64 * 17.3;
                let q = pte.quantile(pte.cdf(x)).unwrap();
                assert!((q - x).abs() < 1e-6, "{:?} x={x} q={q}", pte.family());
            }
            let mut prev = 0.0;
            for i in 0..2000 {
                let c = pte.cdf(i as f64 * 5.0);
                assert!(c >= prev);
                prev = c;
            }
        }
    }

    #[test]
    fn pte_lognormal_median() {
        let pte = PteDistribution::new(PteFamily::LogNormal { sigma: 0.8 }, 615.0).unwrap();
        assert!((pte.cdf(615.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn pte_quantile_bounds() {
        let pte = PteDistribution::default();
        assert!(matches!(pte.quantile(1.0), Err(Error::UnboundedQuantile(_))));
        assert_eq!(pte.quantile(0.0).unwrap(), 0.0);
        assert!(PteDistribution::new(PteFamily::Exponential, 0.0).is_err());
    }

    #[test]
    fn gyration_examples() {
        let single = [Visit::new(GeoPoint::new(3.0, 4.0), 5)];
        assert_eq!(radius_of_gyration(&single, None).unwrap(), 0.0);
        let pair = [Visit::new(GeoPoint::new(0.0, 0.0), 1), Visit::new(GeoPoint::new(2.0, 0.0), 1)];
        assert_eq!(radius_of_gyration(&pair, None).unwrap(), 1.0);
        assert!(radius_of_gyration(&[], None).is_err());
        assert!(radius_of_gyration(&[Visit::new(GeoPoint::default(), 0)], None).is_err());
    }

    #[test]
    fn gyration_normalizes_by_location_count() {
        // Visit-weighted centroid (1.5, 0); weighted squares 3*0.25 + 1*2.25 = 3,
        // divided by N_k = 2 locations.
        let v = [Visit::new(GeoPoint::new(1.0, 0.0), 3), Visit::new(GeoPoint::new(3.0, 0.0), 1)];
        assert!((radius_of_gyration(&v, None).unwrap() - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exploration_ratio_cases() {
        let v = [
            Visit::new(GeoPoint::new(0.0, 0.0), 10),
            Visit::new(GeoPoint::new(100.0, 0.0), 8),
            Visit::new(GeoPoint::new(5000.0, 9000.0), 1),
        ];
        assert_eq!(exploration_ratio(&v, 3).unwrap(), 1.0);
        assert_eq!(exploration_ratio(&v, 7).unwrap(), 1.0);
        let explorer = [Visit::new(GeoPoint::new(0.0, 0.0), 20), Visit::new(GeoPoint::new(40_000.0, 0.0), 1)];
        assert!(exploration_ratio(&explorer, 1).unwrap() < 1e-12);
        let k2 = exploration_ratio(&v, 2).unwrap();
        assert!(k2 > 0.0 && k2 < 0.1);
        let colocated = [Visit::new(GeoPoint::new(1.0, 1.0), 2), Visit::new(GeoPoint::new(1.0, 1.0), 1)];
        assert_eq!(exploration_ratio(&colocated, 1).unwrap(), 1.0);
        assert!(exploration_ratio(&v, 0).is_err());
    }

    #[test]
    fn motif_weight_defaults() {
        let p = MotifParams::default();
        assert!((motif_weight(1.0, &p) - 0.8).abs() < 1e-15);
        assert!((motif_weight(0.0, &p) - 0.2).abs() < 1e-15);
        assert_eq!(motif_weight(1.3, &p), motif_weight(1.0, &p));
        for i in 0..=1000 {
            let w = motif_weight(i as f64 / 1000.0, &p);
            assert!(w > 0.0 && w <= 1.0);
        }
        assert!(MotifParams::new(0.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn modality_shares() {
        assert!(validate_shares(&ModalityProfile::defaults()).is_ok());
        let mut m = ModalityProfile::defaults();
        m[0].share = 0.5;
        assert!(validate_shares(&m).is_err());
        assert!(ModalityProfile::new("x", -1.0, 0.5, 3.0).is_err());
        let walk = &ModalityProfile::defaults()[0];
        assert!((walk.travel_time_budget_h(1000.0) - 1.0).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn visits() -> impl Strategy<Value = Vec<Visit>> {
            proptest::collection::vec(((-1e4..1e4f64), (-1e4..1e4f64), 1u32..20), 1..12)
                .prop_map(|v| v.into_iter().map(|(x, y, n)| Visit::new(GeoPoint::new(x, y), n)).collect())
        }

        proptest! {
            #[test]
            fn gyration_is_rigid_motion_invariant(v in visits(), dx in -1e4..1e4f64, dy in -1e4..1e4f64, theta in 0.0..6.3f64) {
                let base = radius_of_gyration(&v, None).unwrap();
                let (s, c) = theta.sin_cos();
                let moved: Vec<_> = v.iter().map(|p| Visit::new(
                    GeoPoint::new(c * p.location.x - s * p.location.y + dx, s * p.location.x + c * p.location.y + dy),
                    p.count,
                )).collect();
                prop_assert!((radius_of_gyration(&moved, None).unwrap() - base).abs() <= 1e-9 * base.max(1.0));
            }

            #[test]
            fn exploration_ratio_is_scale_free(v in visits(), k in 1usize..6, scale in 0.01..100.0f64) {
                let scaled: Vec<_> = v.iter().map(|p| Visit::new(GeoPoint::new(p.location.x * scale, p.location.y * scale), p.count)).collect();
                let a = exploration_ratio(&v, k).unwrap();
                let b = exploration_ratio(&scaled, k).unwrap();
                prop_assert!((a - b).abs() < 1e-9);
            }

            #[test]
            fn gyration_scales_linearly(v in visits(), scale in 0.01..100.0f64) {
                let scaled: Vec<_> = v.iter().map(|p| Visit::new(GeoPoint::new(p.location.x * scale, p.location.y * scale), p.count)).collect();
                let a = radius_of_gyration(&v, None).unwrap();
                let b = radius_of_gyration(&scaled, None).unwrap();
                prop_assert!((b - scale * a).abs() <= 1e-9 * (scale * a).max(1.0));
            }
        }
    }
}
