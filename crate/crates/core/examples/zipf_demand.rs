//! Rank-weighted POI opportunity mass (WPO) per zone.

use mobility_flow::demand::{aggregate_wpo, categorize_pois, normalize_weights, Poi};
use mobility_flow::spatial::{GeoPoint, ZoneGrid};

fn main() -> mobility_flow::Result<()> {
    for alpha in [0.5, 1.0, 2.0] {
        let w = normalize_weights(alpha, 4)?;
        let ranks: Vec<String> = (1..=4).map(|r| format!("{:.3}", w.weight(r))).collect();
        println!("alpha {alpha}: weights by rank {}", ranks.join(" "));
    }

    let mut grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, 3, 1)?;
    for z in &mut grid.zones {
        z.active = true;
    }
    let poi = |x: f64, category: &str| Poi {
        location: GeoPoint::new(x, 500.0),
        category: category.into(),
    };
    let pois = vec![
        poi(100.0, "grocery"),
        poi(200.0, "grocery"),
        poi(1_500.0, "school"),
        poi(2_500.0, "park"),
        poi(2_600.0, "cinema"),
        poi(9_000.0, "grocery"),
    ];
    let ranking: Vec<String> = ["grocery", "school", "park"].iter().map(|s| s.to_string()).collect();

    let (categories, rejects) = categorize_pois(&grid, &pois, &ranking)?;
    println!(
        "categories {}, rejected: {} outside grid, {} unranked",
        categories.len(),
        rejects.outside_grid,
        rejects.unranked_category
    );
    let (grid, _) = aggregate_wpo(&grid, &categories, &normalize_weights(1.0, ranking.len())?)?;
    for z in &grid.zones {
        println!("zone {} wpo {:.4}", z.index, z.wpo);
    }
    Ok(())
}
