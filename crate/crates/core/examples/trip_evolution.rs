//! Growing scored round trips from one home zone.

use mobility_flow::behavior::ModalityProfile;
use mobility_flow::potential::{build_gwpc, RadiationParams};
use mobility_flow::spatial::{GeoPoint, ZoneGrid};
use mobility_flow::tripgen::{evolve_trips, trip_realisticity, BehaviorModel, EvolutionConfig, Trip, TripScorer};

fn main() -> mobility_flow::Result<()> {
    let mut grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.5, 4, 4)?;
    for z in &mut grid.zones {
        z.active = true;
        z.wpo = 1.0 + ((z.col * 7 + z.row * 3) % 5) as f64;
    }
    let home = grid.index_of(1, 1);
    grid.zones[home].population = 1_000.0;

    let gwpc = build_gwpc(&grid, &RadiationParams::from_grid(&grid)?)?;
    let behavior = BehaviorModel::default();
    let cfg = EvolutionConfig {
        p_trip_min: 1e-5,
        max_intermediate_zones: 3,
        candidates_per_origin: 32,
        rng_seed: 7,
        ..EvolutionConfig::default()
    };
    let scorer = TripScorer::new(&grid, &gwpc, &behavior, cfg.k_for_sk)?;

    for (i, modality) in ModalityProfile::defaults().iter().enumerate() {
        let mut trips = evolve_trips(home, &scorer, &cfg, modality, i)?;
        trips.sort_by(|a, b| b.p_trip.total_cmp(&a.p_trip));
        println!("{}: {} trips above {:e}", modality.name, trips.len(), cfg.p_trip_min);
        for t in trips.iter().take(3) {
            let f = t.factors;
            println!(
                "  {:?} {:.1} km  p_trip {:.3e} = pte {:.3} * motif {:.3} * er {:.3e} * lf {:.3e}",
                t.zone_sequence, t.total_distance_km, t.p_trip, f.p_pte, f.p_motif, f.p_er, f.p_lf
            );
        }
    }

    // Any closed sequence can be scored directly.
    let walk = &ModalityProfile::defaults()[0];
    let manual = Trip::new(vec![home, grid.index_of(2, 1), grid.index_of(2, 2), home], walk.name.clone());
    let scored = trip_realisticity(&manual, &scorer, walk)?;
    println!("\nhand-written {:?} on foot: p_trip {:.3e}", scored.zone_sequence, scored.p_trip);
    Ok(())
}
