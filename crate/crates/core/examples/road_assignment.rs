//! Turning scored trips into segment loads on a small road network.

use std::collections::BTreeMap;

use mobility_flow::assign::{
    accumulate_loads, load_distance, path_distance, path_flows, route_flows, shortest_path, Node, RoadNetwork, Segment,
};
use mobility_flow::behavior::ModalityProfile;
use mobility_flow::spatial::{GeoPoint, ZoneGrid};
use mobility_flow::tripgen::Trip;

fn segment(id: u64, from: u64, to: u64, length_m: f64, bidirectional: bool) -> Segment {
    Segment {
        id,
        from,
        to,
        length_m,
        bidirectional,
    }
}

fn main() -> mobility_flow::Result<()> {
    // Three zones in a row; one road node per zone plus a bypass node.
    let mut grid = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, 3, 1)?;
    for z in &mut grid.zones {
        z.active = true;
    }
    grid.zones[0].population = 1_000.0;

    let node = |id, x| Node {
        id,
        location: GeoPoint::new(x, 500.0),
    };
    let net = RoadNetwork::new(
        vec![node(10, 500.0), node(20, 1_500.0), node(30, 2_500.0), node(40, 1_500.0)],
        vec![
            segment(1, 10, 20, 1_000.0, true),
            segment(2, 20, 30, 1_000.0, true),
            // One-way bypass exactly as long as the main road: the tie goes
            // to the lexicographically smaller node sequence.
            segment(3, 10, 40, 1_200.0, false),
            segment(4, 40, 30, 800.0, false),
        ],
    )?;
    for (a, b) in [(10, 30), (30, 10), (40, 10)] {
        match shortest_path(&net, a, b)? {
            Some(r) => println!("{a} -> {b}: nodes {:?} segments {:?} {} m", r.nodes, r.segments, r.length_m),
            None => println!("{a} -> {b}: unreachable"),
        }
    }

    let walk = ModalityProfile::new("walk", 200.0, 1.0, 5.0)?;
    let scored = |seq: Vec<usize>, p| {
        let mut t = Trip::new(seq, "walk");
        t.p_trip = p;
        t
    };
    let trips = BTreeMap::from([(0, vec![scored(vec![0, 1, 0], 0.6), scored(vec![0, 2, 0], 0.2)])]);

    let plan = path_flows(&trips, &grid, std::slice::from_ref(&walk))?;
    let routed = route_flows(&plan, &trips, &grid, &net)?;
    for p in &routed.paths {
        println!("trip {:?}: {:.0} persons/day over {:.0} m", trips[&p.origin][p.trip_index].zone_sequence, p.flow, p.route_length_m());
    }
    let loads = accumulate_loads(&routed.paths, &net);
    for s in net.segments() {
        println!("segment {} load {:.0}", s.id, loads.get(s.id));
    }
    println!(
        "person-km by segment {:.1}, by path {:.1}",
        load_distance(&loads, &net) / 1000.0,
        path_distance(&routed.paths) / 1000.0
    );
    Ok(())
}
