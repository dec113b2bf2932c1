//! Extended radiation potential between zones, compared with a gravity baseline.

use mobility_flow::potential::{build_gwpc, gravity_probability, radiation_alpha, s_track, RadiationParams};
use mobility_flow::spatial::{GeoPoint, ZoneGrid};

fn main() -> mobility_flow::Result<()> {
    for l in [0.25, 1.0, 6.0, 36.0] {
        println!("side {l:>5} km -> alpha {:.4}", radiation_alpha(l));
    }

    let mut grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, 5, 5)?;
    for z in &mut grid.zones {
        z.active = true;
        // A dense center fading outwards.
        let (dc, dr) = (z.col as f64 - 2.0, z.row as f64 - 2.0);
        z.wpo = 10.0 / (1.0 + dc * dc + dr * dr);
        z.population = z.wpo * 100.0;
    }
    let params = RadiationParams::from_grid(&grid)?;
    let gwpc = build_gwpc(&grid, &params)?;

    let origin = grid.index_of(0, 0);
    println!("\nfrom the south-west corner:");
    println!("{:>5} {:>8} {:>8} {:>10} {:>10}", "dest", "d_km", "s_track", "radiation", "gravity*");
    for col in 1..5 {
        let dest = grid.index_of(col, col);
        println!(
            "{:>5} {:>8.3} {:>8.3} {:>10.6} {:>10.6}",
            dest,
            grid.distance_km(origin, dest),
            s_track(&grid, origin, dest),
            gwpc.get(origin, dest),
            gravity_probability(grid.zones[origin].population, grid.zones[dest].population, grid.distance_km(origin, dest), 2.0)
        );
    }
    let row_sum: f64 = gwpc.row(origin).iter().sum();
    println!("row sum {row_sum:.4}; each entry is its own probability");
    println!("* unnormalized p_i p_j exp(-beta d), beta = 2 per km");
    Ok(())
}
