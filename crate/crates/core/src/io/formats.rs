//! Readers and writers for every scenario input and pipeline output.
//!
//! Floats are written in Rust's shortest round-trip form, so each writer's
//! output reads back bit-identically through the matching reader.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::assign::{LoadMap, Node, RoadNetwork, Segment};
use crate::demand::Poi;
use crate::error::{Error, Result};
use crate::potential::PotentialGraph;
use crate::spatial::{GeoPoint, LivingCluster, ZoneGrid};
use crate::tripgen::{Trip, TripFactors};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(path)?))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::format(path, e))?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_json(path: &Path) -> Result<Value> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::format(path, e))
}

// ---- living clusters (GeoJSON) ----

/// Reads a FeatureCollection of Polygon features carrying a numeric
/// `population` property. Only outer rings are used.
pub fn read_clusters(path: &Path) -> Result<Vec<LivingCluster>> {
    let doc = read_json(path)?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::format(path, "expected a FeatureCollection"))?;
    features
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let bad = |msg: &str| Error::format(path, format!("feature {i}: {msg}"));
            let geometry = f.get("geometry").ok_or_else(|| bad("missing geometry"))?;
            if geometry.get("type").and_then(Value::as_str) != Some("Polygon") {
                return Err(bad("geometry must be a Polygon"));
            }
            let outer = geometry
                .get("coordinates")
                .and_then(Value::as_array)
                .and_then(|rings| rings.first())
                .and_then(Value::as_array)
                .ok_or_else(|| bad("polygon has no outer ring"))?;
            let ring = outer
                .iter()
                .map(|c| match c.as_array().map(|xy| xy.as_slice()) {
                    Some([x, y, ..]) => match (x.as_f64(), y.as_f64()) {
                        (Some(x), Some(y)) => Ok(GeoPoint::new(x, y)),
                        _ => Err(bad("non-numeric coordinate")),
                    },
                    _ => Err(bad("coordinate must be [x, y]")),
                })
                .collect::<Result<Vec<_>>>()?;
            let population = f
                .pointer("/properties/population")
                .and_then(Value::as_f64)
                .ok_or_else(|| bad("missing numeric `population` property"))?;
            LivingCluster::new(ring, population).map_err(|e| bad(&e.to_string()))
        })
        .collect()
}

pub fn write_clusters(path: &Path, clusters: &[LivingCluster]) -> Result<()> {
    let features: Vec<Value> = clusters
        .iter()
        .map(|c| {
            let mut ring: Vec<Value> = c.boundary().iter().map(|p| json!([p.x, p.y])).collect();
            ring.push(ring[0].clone());
            json!({
                "type": "Feature",
                "properties": { "population": c.population() },
                "geometry": { "type": "Polygon", "coordinates": [ring] },
            })
        })
        .collect();
    write_json(path, &json!({ "type": "FeatureCollection", "features": features }))
}

// ---- POIs ----

#[derive(Deserialize)]
struct PoiRow {
    x: f64,
    y: f64,
    category: String,
}

pub fn read_pois(path: &Path) -> Result<Vec<Poi>> {
    let mut rdr = csv_reader(path)?;
    rdr.deserialize::<PoiRow>()
        .map(|row| {
            let row = row.map_err(csv_err(path))?;
            Ok(Poi {
                location: GeoPoint::new(row.x, row.y),
                category: row.category,
            })
        })
        .collect()
}

pub fn write_pois(path: &Path, pois: &[Poi]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["x", "y", "category"]).map_err(&err)?;
    for p in pois {
        w.write_record([p.location.x.to_string(), p.location.y.to_string(), p.category.clone()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

// ---- road network ----

#[derive(Deserialize)]
struct NodeRow {
    node_id: u64,
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct SegmentRow {
    segment_id: u64,
    from: u64,
    to: u64,
    length_m: f64,
    oneway: u8,
}

pub fn read_network(nodes_path: &Path, segments_path: &Path) -> Result<RoadNetwork> {
    let nodes = csv_reader(nodes_path)?
        .deserialize::<NodeRow>()
        .map(|r| {
            let r = r.map_err(csv_err(nodes_path))?;
            Ok(Node {
                id: r.node_id,
                location: GeoPoint::new(r.x, r.y),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let segments = csv_reader(segments_path)?
        .deserialize::<SegmentRow>()
        .map(|r| {
            let r = r.map_err(csv_err(segments_path))?;
            if r.oneway > 1 {
                return Err(Error::format(segments_path, format!("segment {}: oneway must be 0 or 1", r.segment_id)));
            }
            Ok(Segment {
                id: r.segment_id,
                from: r.from,
                to: r.to,
                length_m: r.length_m,
                bidirectional: r.oneway == 0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RoadNetwork::new(nodes, segments)
}

pub fn write_network(nodes_path: &Path, segments_path: &Path, net: &RoadNetwork) -> Result<()> {
    let mut w = csv_writer(nodes_path)?;
    let err = csv_err(nodes_path);
    w.write_record(["node_id", "x", "y"]).map_err(&err)?;
    for n in net.nodes() {
        w.write_record([n.id.to_string(), n.location.x.to_string(), n.location.y.to_string()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(nodes_path, e))?;

    let mut w = csv_writer(segments_path)?;
    let err = csv_err(segments_path);
    w.write_record(["segment_id", "from", "to", "length_m", "oneway"]).map_err(&err)?;
    for s in net.segments() {
        let oneway = if s.bidirectional { "0" } else { "1" };
        w.write_record([
            s.id.to_string(),
            s.from.to_string(),
            s.to.to_string(),
            s.length_m.to_string(),
            oneway.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(segments_path, e))
}

// ---- zone grid ----

#[derive(Deserialize)]
struct GridRow {
    zone_index: usize,
    col: usize,
    row: usize,
    centroid_x: f64,
    centroid_y: f64,
    population: f64,
    wpo: f64,
    active: u8,
}

/// Writes one row per zone. `active` is 1 for zones inside the target area.
pub fn write_grid(path: &Path, grid: &ZoneGrid) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["zone_index", "col", "row", "centroid_x", "centroid_y", "population", "wpo", "active"])
        .map_err(&err)?;
    for z in &grid.zones {
        w.write_record([
            z.index.to_string(),
            z.col.to_string(),
            z.row.to_string(),
            z.centroid.x.to_string(),
            z.centroid.y.to_string(),
            z.population.to_string(),
            z.wpo.to_string(),
            u8::from(z.active).to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Rebuilds a grid from its CSV, given the side length it was made with.
pub fn read_grid(path: &Path, side_length_km: f64) -> Result<ZoneGrid> {
    let rows = csv_reader(path)?
        .deserialize::<GridRow>()
        .map(|r| r.map_err(csv_err(path)))
        .collect::<Result<Vec<_>>>()?;
    let first = rows.first().ok_or_else(|| Error::format(path, "grid has no zones"))?;
    let half = side_length_km * 500.0;
    let origin = GeoPoint::new(
        first.centroid_x - (first.col as f64 * 2.0 + 1.0) * half,
        first.centroid_y - (first.row as f64 * 2.0 + 1.0) * half,
    );
    let n_cols = rows.iter().map(|r| r.col + 1).max().unwrap_or(0);
    let n_rows = rows.iter().map(|r| r.row + 1).max().unwrap_or(0);
    let mut grid = ZoneGrid::new(origin, side_length_km, n_cols, n_rows)?;
    if rows.len() != grid.len() {
        return Err(Error::format(path, format!("expected {} zones, found {}", grid.len(), rows.len())));
    }
    for r in rows {
        let zone = grid
            .zones
            .get_mut(r.zone_index)
            .filter(|z| z.col == r.col && z.row == r.row)
            .ok_or_else(|| Error::format(path, format!("zone {} does not match its col/row", r.zone_index)))?;
        zone.centroid = GeoPoint::new(r.centroid_x, r.centroid_y);
        zone.population = r.population;
        zone.wpo = r.wpo;
        zone.active = r.active != 0;
    }
    Ok(grid)
}

// ---- potential graph ----

const GWPC_MAGIC: &[u8; 8] = b"GWPC\x00\x00\x00\x01";

/// Header stored with every potential-graph dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwpcHeader {
    pub n_zones: usize,
    pub side_length_km: f64,
    pub alpha: f64,
}

/// Little-endian binary dump: magic, header, then the row-major matrix.
pub fn write_gwpc_binary(path: &Path, header: &GwpcHeader, gwpc: &PotentialGraph) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    w.write_all(GWPC_MAGIC).map_err(io)?;
    w.write_all(&(header.n_zones as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&header.side_length_km.to_le_bytes()).map_err(io)?;
    w.write_all(&header.alpha.to_le_bytes()).map_err(io)?;
    for v in gwpc.as_slice() {
        w.write_all(&v.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_gwpc_binary(path: &Path) -> Result<(GwpcHeader, PotentialGraph)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    if bytes.len() < 32 || &bytes[..8] != GWPC_MAGIC {
        return Err(Error::format(path, "not a potential-graph dump"));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 + 8 * i..16 + 8 * i].try_into().expect("8 bytes") };
    let n = u64::from_le_bytes(word(0)) as usize;
    let header = GwpcHeader {
        n_zones: n,
        side_length_km: f64::from_le_bytes(word(1)),
        alpha: f64::from_le_bytes(word(2)),
    };
    let body = &bytes[32..];
    if Some(body.len()) != n.checked_mul(n).and_then(|c| c.checked_mul(8)) {
        return Err(Error::format(path, "matrix size does not match header"));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok((header, PotentialGraph::from_dense(n, data)?))
}

/// CSV dump: a header record `n_zones,side_length_km,alpha`, its values,
/// then one record per origin row.
pub fn write_gwpc_csv(path: &Path, header: &GwpcHeader, gwpc: &PotentialGraph) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(create(path)?);
    let err = csv_err(path);
    w.write_record(["n_zones", "side_length_km", "alpha"]).map_err(&err)?;
    w.write_record([
        header.n_zones.to_string(),
        header.side_length_km.to_string(),
        header.alpha.to_string(),
    ])
    .map_err(&err)?;
    for i in 0..gwpc.n_zones {
        w.write_record(gwpc.row(i).iter().map(|v| v.to_string())).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_gwpc_csv(path: &Path) -> Result<(GwpcHeader, PotentialGraph)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).has_headers(true).from_reader(file);
    let mut records = rdr.records();
    let bad = |m: &str| Error::format(path, m);
    let meta = records.next().ok_or_else(|| bad("missing header values"))?.map_err(csv_err(path))?;
    let num = |i: usize| -> Result<f64> {
        meta.get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("malformed header values"))
    };
    let header = GwpcHeader {
        n_zones: meta.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("malformed n_zones"))?,
        side_length_km: num(1)?,
        alpha: num(2)?,
    };
    let mut data = Vec::with_capacity(header.n_zones * header.n_zones);
    for rec in records {
        let rec = rec.map_err(csv_err(path))?;
        for field in rec.iter() {
            data.push(field.parse::<f64>().map_err(|e| Error::format(path, e))?);
        }
    }
    Ok((header, PotentialGraph::from_dense(header.n_zones, data)?))
}

// ---- trips ----

#[derive(Deserialize)]
struct TripRow {
    origin: usize,
    modality: String,
    zone_sequence: String,
    distance_km: f64,
    p_pte: f64,
    p_motif: f64,
    p_er: f64,
    p_lf: f64,
    p_trip: f64,
}

/// One row per trip, origins ascending, in generation order within an origin.
pub fn write_trips(path: &Path, trips: &BTreeMap<usize, Vec<Trip>>) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record([
        "origin",
        "modality",
        "zone_sequence",
        "distance_km",
        "p_pte",
        "p_motif",
        "p_er",
        "p_lf",
        "p_trip",
    ])
    .map_err(&err)?;
    for (origin, list) in trips {
        for t in list {
            let seq: Vec<String> = t.zone_sequence.iter().map(usize::to_string).collect();
            w.write_record([
                origin.to_string(),
                t.modality.clone(),
                seq.join(";"),
                t.total_distance_km.to_string(),
                t.factors.p_pte.to_string(),
                t.factors.p_motif.to_string(),
                t.factors.p_er.to_string(),
                t.factors.p_lf.to_string(),
                t.p_trip.to_string(),
            ])
            .map_err(&err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trips(path: &Path) -> Result<BTreeMap<usize, Vec<Trip>>> {
    let mut out: BTreeMap<usize, Vec<Trip>> = BTreeMap::new();
    for row in csv_reader(path)?.deserialize::<TripRow>() {
        let row = row.map_err(csv_err(path))?;
        let seq = row
            .zone_sequence
            .split(';')
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::format(path, format!("zone_sequence `{}`: {e}", row.zone_sequence)))?;
        if seq.first() != Some(&row.origin) {
            return Err(Error::format(path, format!("trip `{}` does not start at origin {}", row.zone_sequence, row.origin)));
        }
        let mut trip = Trip::new(seq, row.modality);
        trip.total_distance_km = row.distance_km;
        trip.factors = TripFactors {
            p_pte: row.p_pte,
            p_motif: row.p_motif,
            p_er: row.p_er,
            p_lf: row.p_lf,
        };
        trip.p_trip = row.p_trip;
        out.entry(row.origin).or_default().push(trip);
    }
    Ok(out)
}

// ---- segment loads ----

#[derive(Deserialize)]
struct LoadRow {
    segment_id: u64,
    flow_per_day: f64,
}

pub fn write_loads_csv(path: &Path, loads: &LoadMap) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["segment_id", "flow_per_day"]).map_err(&err)?;
    for (id, flow) in &loads.loads {
        w.write_record([id.to_string(), flow.to_string()]).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_loads_csv(path: &Path) -> Result<LoadMap> {
    let mut loads = BTreeMap::new();
    for row in csv_reader(path)?.deserialize::<LoadRow>() {
        let row = row.map_err(csv_err(path))?;
        if loads.insert(row.segment_id, row.flow_per_day).is_some() {
            return Err(Error::format(path, format!("duplicate segment {}", row.segment_id)));
        }
    }
    Ok(LoadMap { loads })
}

/// LineString layer, one feature per segment, with `segment_id` and `flow`.
pub fn write_loads_geojson(path: &Path, loads: &LoadMap, net: &RoadNetwork) -> Result<()> {
    let features: Vec<Value> = net
        .segments()
        .iter()
        .map(|s| {
            let coord = |id| {
                let p = net.node(id).expect("validated network").location;
                json!([p.x, p.y])
            };
            json!({
                "type": "Feature",
                "properties": { "segment_id": s.id, "flow": loads.get(s.id) },
                "geometry": { "type": "LineString", "coordinates": [coord(s.from), coord(s.to)] },
            })
        })
        .collect();
    write_json(path, &json!({ "type": "FeatureCollection", "features": features }))
}

pub fn read_loads_geojson(path: &Path) -> Result<LoadMap> {
    let doc = read_json(path)?;
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::format(path, "expected a FeatureCollection"))?;
    let mut loads = BTreeMap::new();
    for f in features {
        let id = f.pointer("/properties/segment_id").and_then(Value::as_u64);
        let flow = f.pointer("/properties/flow").and_then(Value::as_f64);
        match (id, flow) {
            (Some(id), Some(flow)) => {
                loads.insert(id, flow);
            }
            _ => return Err(Error::format(path, "feature without segment_id/flow")),
        }
    }
    Ok(LoadMap { loads })
}
