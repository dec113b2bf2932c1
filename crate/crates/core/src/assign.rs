//! Road-load assignment.
//!
//! Trip realisticities are normalized per (origin, modality) into path flows,
//! each leg is routed on the shortest road path between the nodes nearest to
//! the zone centroids, and flows are summed per segment.
//!
//! Routing is risk-neutral and uses free-flow lengths only. [`CostUpdate`] is
//! the slot for capacity-aware equilibria.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::behavior::ModalityProfile;
use crate::error::{Error, Result};
use crate::spatial::{GeoPoint, Zone, ZoneGrid};
use crate::tripgen::Trip;
use crate::CompensatedSum;

pub type NodeId = u64;
pub type SegmentId = u64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub location: GeoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub id: SegmentId,
    pub from: NodeId,
    pub to: NodeId,
    pub length_m: f64,
    pub bidirectional: bool,
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    head: usize,
    segment: usize,
}

/// Directed road graph with validated references.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    segments: Vec<Segment>,
    node_index: HashMap<NodeId, usize>,
    /// Outgoing arcs per node, ordered by (head id, segment id).
    forward: Vec<Vec<Arc>>,
    /// Incoming arcs per node (head is the tail of the arc).
    backward: Vec<Vec<Arc>>,
}

impl RoadNetwork {
    pub fn new(nodes: Vec<Node>, segments: Vec<Segment>) -> Result<Self> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !n.location.is_finite() {
                return Err(Error::Input(format!("node {} has non-finite coordinates", n.id)));
            }
            if node_index.insert(n.id, i).is_some() {
                return Err(Error::Input(format!("duplicate node id {}", n.id)));
            }
        }
        let mut forward = vec![Vec::new(); nodes.len()];
        let mut backward = vec![Vec::new(); nodes.len()];
        let mut seen_segments = HashMap::with_capacity(segments.len());
        for (si, s) in segments.iter().enumerate() {
            if seen_segments.insert(s.id, si).is_some() {
                return Err(Error::Input(format!("duplicate segment id {}", s.id)));
            }
            if !(s.length_m.is_finite() && s.length_m > 0.0) {
                return Err(Error::Input(format!("segment {} has non-positive length {}", s.id, s.length_m)));
            }
            let lookup = |id: NodeId| {
                node_index
                    .get(&id)
                    .copied()
                    .ok_or_else(|| Error::Input(format!("segment {} references unknown node {id}", s.id)))
            };
            let (a, b) = (lookup(s.from)?, lookup(s.to)?);
            forward[a].push(Arc { head: b, segment: si });
            backward[b].push(Arc { head: a, segment: si });
            if s.bidirectional {
                forward[b].push(Arc { head: a, segment: si });
                backward[a].push(Arc { head: b, segment: si });
            }
        }
        let key = |arc: &Arc| (nodes[arc.head].id, segments[arc.segment].id);
        for list in forward.iter_mut().chain(backward.iter_mut()) {
            list.sort_by_key(key);
        }
        Ok(RoadNetwork {
            nodes,
            segments,
            node_index,
            forward,
            backward,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.node_index.get(&id).map(|&i| &self.nodes[i])
    }

    pub fn segment(&self, id: SegmentId) -> Option<&Segment> {
        self.segments.iter().find(|s| s.id == id)
    }

    /// Number of weakly connected components.
    pub fn component_count(&self) -> usize {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in &self.segments {
            let (a, b) = (find(&mut parent, self.node_index[&s.from]), find(&mut parent, self.node_index[&s.to]));
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    fn index_of(&self, id: NodeId) -> Result<usize> {
        self.node_index
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Input(format!("unknown node {id}")))
    }
}

/// Nearest node to the zone centroid; ties go to the smallest id.
pub fn snap_zone_to_node(zone: &Zone, net: &RoadNetwork) -> Result<NodeId> {
    nearest_node(&zone.centroid, net)
}

pub fn nearest_node(p: &GeoPoint, net: &RoadNetwork) -> Result<NodeId> {
    net.nodes
        .iter()
        .map(|n| {
            let (dx, dy) = (n.location.x - p.x, n.location.y - p.y);
            (dx * dx + dy * dy, n.id)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, id)| id)
        .ok_or_else(|| Error::Input("road network has no nodes".into()))
}

/// A routed path between two nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub segments: Vec<SegmentId>,
    pub length_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest distances from every node to one target.
#[derive(Debug, Clone)]
pub struct DistanceField {
    target: usize,
    to_target: Vec<f64>,
}

impl DistanceField {
    /// Dijkstra over reversed arcs from `target`.
    pub fn towards(net: &RoadNetwork, target: NodeId) -> Result<Self> {
        let t = net.index_of(target)?;
        let mut dist = vec![f64::INFINITY; net.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[t] = 0.0;
        heap.push(HeapEntry { dist: 0.0, node: t });
        while let Some(HeapEntry { dist: d, node }) = heap.pop() {
            if d > dist[node] {
                continue;
            }
            for arc in &net.backward[node] {
                let nd = d + net.segments[arc.segment].length_m;
                if nd < dist[arc.head] {
                    dist[arc.head] = nd;
                    heap.push(HeapEntry { dist: nd, node: arc.head });
                }
            }
        }
        Ok(DistanceField { target: t, to_target: dist })
    }

    /// Shortest route from `source`, or `None` when the target is unreachable.
    ///
    /// Among equally short routes the one with the lexicographically smallest
    /// node-id sequence wins (then the smallest segment id between two nodes).
    pub fn route_from(&self, net: &RoadNetwork, source: NodeId) -> Result<Option<Route>> {
        let mut u = net.index_of(source)?;
        if !self.to_target[u].is_finite() {
            return Ok(None);
        }
        let mut route = Route {
            nodes: vec![net.nodes[u].id],
            segments: Vec::new(),
            length_m: 0.0,
        };
        let mut length = CompensatedSum::default();
        while u != self.target {
            // Arcs are sorted by (head id, segment id), so the first tight arc
            // is the lexicographic choice.
            let arc = net.forward[u]
                .iter()
                .find(|arc| {
                    let w = net.segments[arc.segment].length_m;
                    let rest = self.to_target[arc.head];
                    rest < self.to_target[u] && w + rest == self.to_target[u]
                })
                .ok_or_else(|| Error::Domain("shortest-path tree is inconsistent".into()))?;
            let seg = &net.segments[arc.segment];
            route.segments.push(seg.id);
            length.add(seg.length_m);
            u = arc.head;
            route.nodes.push(net.nodes[u].id);
        }
        route.length_m = length.value();
        Ok(Some(route))
    }
}

/// Minimal-length route from `from` to `to`; `None` when unreachable.
pub fn shortest_path(net: &RoadNetwork, from: NodeId, to: NodeId) -> Result<Option<Route>> {
    net.index_of(from)?;
    DistanceField::towards(net, to)?.route_from(net, from)
}

/// Realisticity-proportional flow of one trip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripFlow {
    pub origin: usize,
    pub modality: String,
    /// Position of the trip in its origin's list.
    pub trip_index: usize,
    /// Persons per day.
    pub flow: f64,
}

/// Per (origin, modality) demand bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginBalance {
    pub origin: usize,
    pub modality: String,
    /// `share * population`.
    pub demand: f64,
    /// Sum of realisticities of the origin's trips in this modality.
    pub p_origin: f64,
    pub trip_count: usize,
}

impl OriginBalance {
    /// Demand left without any trip to carry it.
    pub fn unserved(&self) -> f64 {
        if self.p_origin > 0.0 {
            0.0
        } else {
            self.demand
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FlowPlan {
    pub flows: Vec<TripFlow>,
    pub balances: Vec<OriginBalance>,
}

/// Path flows `p_trip / p_origin * share * population`, with `p_origin`
/// summed per origin and modality.
pub fn path_flows(
    trips: &BTreeMap<usize, Vec<Trip>>,
    grid: &ZoneGrid,
    modalities: &[ModalityProfile],
) -> Result<FlowPlan> {
    let mut plan = FlowPlan::default();
    for (&origin, list) in trips {
        let zone = grid
            .zones
            .get(origin)
            .ok_or_else(|| Error::Input(format!("trip origin {origin} outside grid")))?;
        if let Some(t) = list.iter().find(|t| t.origin_zone != origin) {
            return Err(Error::Input(format!("trip from zone {} filed under origin {origin}", t.origin_zone)));
        }
        if let Some(t) = list.iter().find(|t| !modalities.iter().any(|m| m.name == t.modality)) {
            return Err(Error::Input(format!("trip uses unknown modality `{}`", t.modality)));
        }
        for modality in modalities {
            let members: Vec<(usize, &Trip)> = list
                .iter()
                .enumerate()
                .filter(|(_, t)| t.modality == modality.name)
                .collect();
            let p_origin = crate::compensated_sum(members.iter().map(|(_, t)| t.p_trip));
            let demand = modality.share * zone.population;
            plan.balances.push(OriginBalance {
                origin,
                modality: modality.name.clone(),
                demand,
                p_origin,
                trip_count: members.len(),
            });
            for (trip_index, trip) in members {
                let flow = if p_origin > 0.0 { trip.p_trip / p_origin * demand } else { 0.0 };
                plan.flows.push(TripFlow {
                    origin,
                    modality: modality.name.clone(),
                    trip_index,
                    flow,
                });
            }
        }
    }
    Ok(plan)
}

/// A trip flow with its routed legs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathFlow {
    pub origin: usize,
    pub modality: String,
    pub trip_index: usize,
    pub legs: Vec<Route>,
    pub flow: f64,
}

impl PathFlow {
    pub fn route_length_m(&self) -> f64 {
        crate::compensated_sum(self.legs.iter().map(|l| l.length_m))
    }
}

/// A trip whose legs could not all be routed; its flow is excluded from loads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedFlow {
    pub origin: usize,
    pub modality: String,
    pub trip_index: usize,
    pub flow: f64,
    pub unroutable_legs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RoutedFlows {
    pub paths: Vec<PathFlow>,
    pub dropped: Vec<DroppedFlow>,
}

/// Routes every trip leg between the nodes snapped to its zones.
pub fn route_flows(
    plan: &FlowPlan,
    trips: &BTreeMap<usize, Vec<Trip>>,
    grid: &ZoneGrid,
    net: &RoadNetwork,
) -> Result<RoutedFlows> {
    let snapped: Vec<NodeId> = grid
        .zones
        .iter()
        .map(|z| snap_zone_to_node(z, net))
        .collect::<Result<_>>()?;

    let mut targets: Vec<NodeId> = plan
        .flows
        .iter()
        .flat_map(|f| trips[&f.origin][f.trip_index].zone_sequence[1..].iter().map(|&z| snapped[z]))
        .collect();
    targets.sort_unstable();
    targets.dedup();
    let fields: HashMap<NodeId, DistanceField> = targets
        .par_iter()
        .map(|&t| DistanceField::towards(net, t).map(|f| (t, f)))
        .collect::<Result<_>>()?;

    let routed: Vec<std::result::Result<PathFlow, DroppedFlow>> = plan
        .flows
        .par_iter()
        .map(|f| {
            let trip = &trips[&f.origin][f.trip_index];
            let mut legs = Vec::with_capacity(trip.zone_sequence.len() - 1);
            let mut unroutable = 0;
            for w in trip.zone_sequence.windows(2) {
                let (a, b) = (snapped[w[0]], snapped[w[1]]);
                match fields[&b].route_from(net, a)? {
                    Some(route) => legs.push(route),
                    None => unroutable += 1,
                }
            }
            Ok(if unroutable == 0 {
                Ok(PathFlow {
                    origin: f.origin,
                    modality: f.modality.clone(),
                    trip_index: f.trip_index,
                    legs,
                    flow: f.flow,
                })
            } else {
                Err(DroppedFlow {
                    origin: f.origin,
                    modality: f.modality.clone(),
                    trip_index: f.trip_index,
                    flow: f.flow,
                    unroutable_legs: unroutable,
                })
            })
        })
        .collect::<Result<_>>()?;

    let mut out = RoutedFlows::default();
    for r in routed {
        match r {
            Ok(p) => out.paths.push(p),
            Err(d) => out.dropped.push(d),
        }
    }
    Ok(out)
}

/// Flow per segment, persons/day.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadMap {
    pub loads: BTreeMap<SegmentId, f64>,
}

impl LoadMap {
    pub fn get(&self, segment: SegmentId) -> f64 {
        self.loads.get(&segment).copied().unwrap_or(0.0)
    }
}

/// Sums path flows over the segments of their legs. A segment used by `k`
/// legs of one path receives `k` times its flow. Every network segment
/// appears in the map.
pub fn accumulate_loads(paths: &[PathFlow], net: &RoadNetwork) -> LoadMap {
    let mut acc: BTreeMap<SegmentId, CompensatedSum> =
        net.segments.iter().map(|s| (s.id, CompensatedSum::default())).collect();
    for path in paths {
        for seg in path.legs.iter().flat_map(|l| &l.segments) {
            acc.entry(*seg).or_default().add(path.flow);
        }
    }
    LoadMap {
        loads: acc.into_iter().map(|(k, v)| (k, v.value())).collect(),
    }
}

/// `sum(load * length)` over segments, in person-meters.
pub fn load_distance(loads: &LoadMap, net: &RoadNetwork) -> f64 {
    crate::compensated_sum(net.segments.iter().map(|s| loads.get(s.id) * s.length_m))
}

/// `sum(flow * route length)` over paths, in person-meters.
pub fn path_distance(paths: &[PathFlow]) -> f64 {
    let mut acc = CompensatedSum::default();
    for p in paths {
        for leg in &p.legs {
            acc.add(p.flow * leg.length_m);
        }
    }
    acc.value()
}

/// Capacity-aware cost update for iterative equilibria.
///
/// Given the current loads, return one traversal cost per segment (same
/// order as [`RoadNetwork::segments`], same unit as `length_m`, each > 0).
/// A driver would re-route with the returned costs until loads converge.
pub trait CostUpdate {
    fn segment_costs(&self, net: &RoadNetwork, loads: &LoadMap) -> Vec<f64>;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(id: NodeId, x: f64, y: f64) -> Node {
        Node {
            id,
            location: GeoPoint::new(x, y),
        }
    }

    fn seg(id: SegmentId, from: NodeId, to: NodeId, length_m: f64, bidirectional: bool) -> Segment {
        Segment {
            id,
            from,
            to,
            length_m,
            bidirectional,
        }
    }

    fn triangle() -> RoadNetwork {
        RoadNetwork::new(
            vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0), node(3, 2.0, 0.0)],
            vec![seg(10, 1, 2, 1.0, true), seg(11, 2, 3, 1.0, true), seg(12, 1, 3, 3.0, true)],
        )
        .unwrap()
    }

    #[test]
    fn network_validation() {
        assert!(RoadNetwork::new(vec![node(1, 0.0, 0.0)], vec![seg(1, 1, 2, 1.0, true)]).is_err());
        assert!(RoadNetwork::new(vec![node(1, 0.0, 0.0), node(1, 1.0, 0.0)], vec![]).is_err());
        assert!(RoadNetwork::new(vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0)], vec![seg(1, 1, 2, 0.0, true)]).is_err());
        let split = RoadNetwork::new(vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0), node(3, 5.0, 5.0)], vec![seg(1, 1, 2, 1.0, false)]).unwrap();
        assert_eq!(split.component_count(), 2);
        assert_eq!(triangle().component_count(), 1);
    }

    #[test]
    fn snapping() {
        let net = RoadNetwork::new(vec![node(7, 1.0, 0.0), node(3, -1.0, 0.0), node(5, 4.0, 4.0)], vec![]).unwrap();
        let zone = |x, y| Zone {
            index: 0,
            col: 0,
            row: 0,
            centroid: GeoPoint::new(x, y),
            population: 0.0,
            wpo: 0.0,
            active: true,
        };
        assert_eq!(snap_zone_to_node(&zone(4.0, 4.0), &net).unwrap(), 5);
        assert_eq!(snap_zone_to_node(&zone(0.0, 0.0), &net).unwrap(), 3);
        let empty = RoadNetwork::new(vec![], vec![]).unwrap();
        assert!(snap_zone_to_node(&zone(0.0, 0.0), &empty).is_err());
    }

    #[test]
    fn triangle_prefers_two_short_segments() {
        let net = triangle();
        let r = shortest_path(&net, 1, 3).unwrap().unwrap();
        assert_eq!(r.segments, vec![10, 11]);
        assert_eq!(r.nodes, vec![1, 2, 3]);
        assert_eq!(r.length_m, 2.0);
        let same = shortest_path(&net, 2, 2).unwrap().unwrap();
        assert!(same.segments.is_empty());
        assert_eq!(same.length_m, 0.0);
        assert!(shortest_path(&net, 1, 99).is_err());
    }

    #[test]
    fn one_way_segments_and_unreachable() {
        let net = RoadNetwork::new(vec![node(1, 0.0, 0.0), node(2, 1.0, 0.0)], vec![seg(1, 1, 2, 1.0, false)]).unwrap();
        assert!(shortest_path(&net, 1, 2).unwrap().is_some());
        assert!(shortest_path(&net, 2, 1).unwrap().is_none());
    }

    #[test]
    fn tie_break_prefers_smaller_node_ids() {
        // Two routes of length 2 from 1 to 4: via 3 and via 2.
        let net = RoadNetwork::new(
            vec![node(1, 0.0, 0.0), node(3, 1.0, 1.0), node(2, 1.0, -1.0), node(4, 2.0, 0.0)],
            vec![seg(1, 1, 3, 1.0, true), seg(2, 3, 4, 1.0, true), seg(3, 1, 2, 1.0, true), seg(4, 2, 4, 1.0, true), seg(0, 1, 2, 1.0, true)],
        )
        .unwrap();
        let r = shortest_path(&net, 1, 4).unwrap().unwrap();
        assert_eq!(r.nodes, vec![1, 2, 4]);
        assert_eq!(r.segments, vec![0, 4]);
    }

    fn trip(origin: usize, seq: Vec<usize>, p: f64, modality: &str) -> Trip {
        let mut t = Trip::new(seq, modality);
        t.origin_zone = origin;
        t.p_trip = p;
        t
    }

    fn line_grid() -> ZoneGrid {
        let mut g = ZoneGrid::new(GeoPoint::new(0.0, 0.0), 1.0, 3, 1).unwrap();
        g.zones[0].population = 1000.0;
        g
    }

    fn modality(share: f64) -> ModalityProfile {
        ModalityProfile::new("car", 6.0, share, 40.0).unwrap()
    }

    #[test]
    fn flow_examples() {
        let grid = line_grid();
        let single = BTreeMap::from([(0, vec![trip(0, vec![0, 1, 0], 0.3, "car")])]);
        let plan = path_flows(&single, &grid, &[modality(0.8)]).unwrap();
        assert_eq!(plan.flows[0].flow, 800.0);

        let pair = BTreeMap::from([(0, vec![trip(0, vec![0, 1, 0], 0.3, "car"), trip(0, vec![0, 2, 0], 0.3, "car")])]);
        let plan = path_flows(&pair, &grid, &[modality(1.0)]).unwrap();
        assert_eq!(plan.flows[0].flow, 500.0);
        assert_eq!(plan.flows[1].flow, 500.0);

        let three = BTreeMap::from([(
            0,
            vec![trip(0, vec![0, 1, 0], 0.5, "car"), trip(0, vec![0, 2, 0], 0.3, "car"), trip(0, vec![0, 1, 2, 0], 0.2, "car")],
        )]);
        let plan = path_flows(&three, &grid, &[modality(0.8)]).unwrap();
        let flows: Vec<f64> = plan.flows.iter().map(|f| f.flow).collect();
        for (got, want) in flows.iter().zip([400.0, 240.0, 160.0]) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!((plan.balances[0].demand - 800.0).abs() < 1e-12);
    }

    #[test]
    fn zero_realisticity_origin_is_unserved() {
        let grid = line_grid();
        let trips = BTreeMap::from([(0, vec![trip(0, vec![0, 1, 0], 0.0, "car")])]);
        let plan = path_flows(&trips, &grid, &[modality(1.0)]).unwrap();
        assert_eq!(plan.flows[0].flow, 0.0);
        assert_eq!(plan.balances[0].unserved(), 1000.0);
        let unknown = BTreeMap::from([(0, vec![trip(0, vec![0, 1, 0], 0.5, "boat")])]);
        assert!(path_flows(&unknown, &grid, &[modality(1.0)]).is_err());
    }

    #[test]
    fn loads_and_identity() {
        let net = triangle();
        assert!(accumulate_loads(&[], &net).loads.values().all(|&v| v == 0.0));
        let route = shortest_path(&net, 1, 3).unwrap().unwrap();
        let back = shortest_path(&net, 3, 1).unwrap().unwrap();
        let p = PathFlow {
            origin: 0,
            modality: "car".into(),
            trip_index: 0,
            legs: vec![route.clone()],
            flow: 7.5,
        };
        let loads = accumulate_loads(std::slice::from_ref(&p), &net);
        assert_eq!(loads.get(10), 7.5);
        assert_eq!(loads.get(11), 7.5);
        assert_eq!(loads.get(12), 0.0);
        let round = PathFlow {
            legs: vec![route, back],
            ..p
        };
        let loads = accumulate_loads(std::slice::from_ref(&round), &net);
        assert_eq!(loads.get(10), 15.0);
        assert_eq!(load_distance(&loads, &net), path_distance(&[round]));
    }

    #[test]
    fn unroutable_trip_is_dropped_whole() {
        let net = RoadNetwork::new(
            vec![node(1, 500.0, 500.0), node(2, 1500.0, 500.0), node(3, 2500.0, 500.0)],
            vec![seg(1, 1, 2, 1000.0, true), seg(2, 2, 3, 1000.0, false)],
        )
        .unwrap();
        let grid = line_grid();
        let trips = BTreeMap::from([(0, vec![trip(0, vec![0, 1, 0], 0.5, "car"), trip(0, vec![0, 2, 0], 0.5, "car")])]);
        let plan = path_flows(&trips, &grid, &[modality(1.0)]).unwrap();
        let routed = route_flows(&plan, &trips, &grid, &net).unwrap();
        assert_eq!(routed.paths.len(), 1);
        assert_eq!(routed.dropped.len(), 1);
        assert_eq!(routed.dropped[0].unroutable_legs, 1);
        let total: f64 = routed.paths.iter().map(|p| p.flow).chain(routed.dropped.iter().map(|d| d.flow)).sum();
        assert_eq!(total, 1000.0);
    }
}
