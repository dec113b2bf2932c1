//! Living clusters -> target area -> zone grid with population.
//!
//! The margin is how far a walker gets on a 95th-percentile energy budget,
//! out and back.

use mobility_flow::behavior::{ModalityProfile, PteDistribution};
use mobility_flow::spatial::{assign_population, build_target_area, make_grid, pte_margin, GeoPoint, LivingCluster};

fn square(x0: f64, y0: f64, side: f64, population: f64) -> LivingCluster {
    let ring = vec![
        GeoPoint::new(x0, y0),
        GeoPoint::new(x0 + side, y0),
        GeoPoint::new(x0 + side, y0 + side),
        GeoPoint::new(x0, y0 + side),
    ];
    LivingCluster::new(ring, population).unwrap()
}

fn main() -> mobility_flow::Result<()> {
    let clusters = vec![square(0.0, 0.0, 800.0, 4_000.0), square(3_000.0, 1_500.0, 500.0, 1_500.0)];

    let pte = PteDistribution::default();
    for m in ModalityProfile::defaults() {
        println!("{:<8} margin {:>9.0} m", m.name, pte_margin(&pte, &m)?);
    }
    let walk = ModalityProfile::defaults().into_iter().find(|m| m.name == "walk").unwrap();
    let margin = pte_margin(&pte, &walk)?;

    let area = build_target_area(&clusters, margin)?;
    println!(
        "target area {:.2} km^2 in {} component(s)",
        area.area_m2() / 1e6,
        area.component_count()
    );

    let grid = assign_population(&make_grid(&area, 1.0)?, &clusters)?;
    println!(
        "{}x{} zones, {} active, {} populated, population {:.0}",
        grid.n_cols,
        grid.n_rows,
        grid.active_count(),
        grid.populated_zones().len(),
        grid.total_population()
    );
    for row in (0..grid.n_rows).rev() {
        let line: String = (0..grid.n_cols)
            .map(|col| {
                let z = &grid.zones[grid.index_of(col, row)];
                match (z.active, z.population > 0.0) {
                    (false, _) => ' ',
                    (true, false) => '.',
                    (true, true) => '#',
                }
            })
            .collect();
        println!("|{line}|");
    }
    Ok(())
}
