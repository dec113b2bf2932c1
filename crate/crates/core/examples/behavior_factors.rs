//! The per-trip behavior factors: Lévy step density, travel-energy budget,
//! radius of gyration and the returner/explorer motif weight.

use mobility_flow::behavior::{
    exploration_ratio, levy_pdf, motif_weight, radius_of_gyration, LevyParams, ModalityProfile, MotifParams,
    PteDistribution, PteFamily, Visit,
};
use mobility_flow::spatial::GeoPoint;

fn main() -> mobility_flow::Result<()> {
    let levy = LevyParams::default();
    println!("Levy step density (mu {}, c {}):", levy.mu, levy.c);
    for r in [0.5, 1.0, 2.0, 5.0, 20.0] {
        println!("  r {r:>5} km  {:.5}", levy_pdf(r, &levy)?);
    }

    let exp = PteDistribution::default();
    let lognormal = PteDistribution::new(PteFamily::LogNormal { sigma: 0.6 }, 615.0)?;
    println!("\ndaily energy budget, P(budget > E):");
    for e in [200.0, 615.0, 1_500.0, 3_000.0] {
        println!("  E {e:>6} kJ  exponential {:.4}  lognormal {:.4}", exp.survival(e), lognormal.survival(e));
    }
    println!("95th percentile {:.0} kJ", exp.quantile(0.95)?);
    for m in ModalityProfile::defaults() {
        let reach = exp.quantile(0.95)? / m.energy_rate_kj_per_km;
        println!("  {:<8} covers {:>7.1} km on that budget", m.name, reach);
    }

    // Home visited four times, work twice, one far-off leisure trip.
    let visits = [
        Visit::new(GeoPoint::new(0.0, 0.0), 4),
        Visit::new(GeoPoint::new(3_000.0, 0.0), 2),
        Visit::new(GeoPoint::new(0.0, 25_000.0), 1),
    ];
    println!("\nr_g all {:.0} m, top-2 {:.0} m", radius_of_gyration(&visits, None)?, radius_of_gyration(&visits, Some(2))?);
    let motif = MotifParams::default();
    for k in 1..=3 {
        let s = exploration_ratio(&visits, k)?;
        println!("  k {k}: s_k {s:.4}, motif weight {:.4}", motif_weight(s, &motif));
    }
    Ok(())
}
