//! CSV ingestion and space-time normalization.
//!
//! Two files feed the compiler:
//!
//! ```text
//! character_id,name,t,x,z,impact,scenario_id        (impact column optional)
//! event_id,name,t_start,t_end,x,z,scenario_id,importance,predecessors
//! ```
//!
//! The last two event columns are optional; `predecessors` is a `;`-separated
//! list of event ids. Time is mapped onto one shared vertical axis
//! `[0, time_height]`; each scenario's ground coordinates are centered on the
//! scenario's own origin and scaled uniformly so its longer side spans
//! `map_size` world units.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::model::{
    assign_character_colors, derive_event_impact, event_center, CharacterTrack, EventRecord,
    NormalizedDataset, NormalizedEvent, NormalizedPoint, RadiusClamp, Scenario,
    SpatioTemporalPoint, Thresholds,
};

pub const CHARACTER_COLUMNS: [&str; 7] = ["character_id", "name", "t", "x", "z", "impact", "scenario_id"];
pub const EVENT_COLUMNS: [&str; 9] = [
    "event_id",
    "name",
    "t_start",
    "t_end",
    "x",
    "z",
    "scenario_id",
    "importance",
    "predecessors",
];
const REQUIRED_EVENT_COLUMNS: usize = 7;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("MissingHeader: expected `{expected}`, found `{found}`")]
    MissingHeader { expected: String, found: String },
    #[error("MalformedRow({line}): {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("DuplicateEventId({0})")]
    DuplicateEventId(String),
    #[error("DegenerateTimeRange: all timestamps equal {0}")]
    DegenerateTimeRange(f64),
    #[error("EmptyDataset: no character or event records")]
    EmptyDataset,
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("Csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Overview/detail cut-off: a fixed value or the median of the impacts it applies to.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Threshold {
    #[default]
    AutoMedian,
    Fixed(f64),
}

impl Threshold {
    pub fn resolve(&self, impacts: &[f64]) -> f64 {
        match *self {
            Threshold::Fixed(v) => v,
            Threshold::AutoMedian => median(impacts),
        }
    }
}

impl std::str::FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto-median" {
            return Ok(Threshold::AutoMedian);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Threshold::Fixed(v)),
            _ => Err(format!("expected a number or `auto-median`, got `{s}`")),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::AutoMedian => f.write_str("auto-median"),
            Threshold::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Threshold::AutoMedian => s.serialize_str("auto-median"),
            Threshold::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct ThresholdVisitor;
        impl Visitor<'_> for ThresholdVisitor {
            type Value = Threshold;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"auto-median\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Threshold, E> {
                Ok(Threshold::Fixed(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Threshold, E> {
                Ok(Threshold::Fixed(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Threshold, E> {
                Ok(Threshold::Fixed(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Threshold, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(ThresholdVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// World height of the time axis.
    pub time_height: f64,
    /// Longer side of every normalized map, in world units.
    pub map_size: f64,
    /// Margin added around each map's content.
    pub map_padding: f64,
    /// Event radius per world unit of duration.
    pub radius_scale: f64,
    pub radius_clamp: RadiusClamp,
    pub xi_c_thre: Threshold,
    pub xi_e_thre: Threshold,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            time_height: 10.0,
            map_size: 4.0,
            map_padding: 0.5,
            radius_scale: 0.5,
            radius_clamp: RadiusClamp::default(),
            xi_c_thre: Threshold::AutoMedian,
            xi_e_thre: Threshold::AutoMedian,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |msg: &str| Err(IngestError::InvalidConfig(msg.to_owned()));
        if !(self.time_height > 0.0 && self.time_height.is_finite()) {
            return bad("time height must be positive");
        }
        if !(self.map_size > 0.0 && self.map_size.is_finite()) {
            return bad("map size must be positive");
        }
        if !(self.map_padding >= 0.0 && self.map_padding.is_finite()) {
            return bad("map padding must be non-negative");
        }
        if !(self.radius_scale > 0.0 && self.radius_scale.is_finite()) {
            return bad("radius scale must be positive");
        }
        let RadiusClamp { min, max } = self.radius_clamp;
        if !(min >= 0.0 && min <= max && max.is_finite()) {
            return bad("radius clamp needs 0 <= r_min <= r_max");
        }
        for t in [self.xi_c_thre, self.xi_e_thre] {
            if let Threshold::Fixed(v) = t {
                if !v.is_finite() {
                    return bad("fixed thresholds must be finite");
                }
            }
        }
        Ok(())
    }
}

fn reader(text: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn number(record: &csv::StringRecord, idx: usize, field: &str) -> Result<f64, IngestError> {
    let raw = &record[idx];
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(IngestError::MalformedRow {
            line: line_of(record),
            reason: format!("{field} is not a finite number: `{raw}`"),
        }),
    }
}

fn check_arity(record: &csv::StringRecord, expected: usize) -> Result<(), IngestError> {
    if record.len() != expected {
        return Err(IngestError::MalformedRow {
            line: line_of(record),
            reason: format!("expected {expected} fields, found {}", record.len()),
        });
    }
    Ok(())
}

fn header_mismatch(expected: &[&str], found: &csv::StringRecord) -> IngestError {
    IngestError::MissingHeader {
        expected: expected.join(","),
        found: found.iter().collect::<Vec<_>>().join(","),
    }
}

/// Parses the characters file into raw point records in file order.
pub fn parse_characters_csv(text: &[u8]) -> Result<Vec<SpatioTemporalPoint>, IngestError> {
    let mut rdr = reader(text);
    let header = rdr.headers()?.clone();
    let names: Vec<&str> = header.iter().collect();
    let without_impact: Vec<&str> =
        CHARACTER_COLUMNS.iter().copied().filter(|c| *c != "impact").collect();
    let has_impact = if names == CHARACTER_COLUMNS {
        true
    } else if names == without_impact {
        false
    } else {
        return Err(header_mismatch(&CHARACTER_COLUMNS, &header));
    };

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        check_arity(&record, header.len())?;
        let impact = if has_impact && !record[5].is_empty() {
            number(&record, 5, "impact")?
        } else {
            1.0
        };
        out.push(SpatioTemporalPoint {
            character_id: record[0].to_owned(),
            name: record[1].to_owned(),
            t: number(&record, 2, "t")?,
            x: number(&record, 3, "x")?,
            z: number(&record, 4, "z")?,
            impact,
            scenario_id: record[header.len() - 1].to_owned(),
        });
    }
    Ok(out)
}

/// Parses the events file. Ids must be unique; time ordering is left to validation.
pub fn parse_events_csv(text: &[u8]) -> Result<Vec<EventRecord>, IngestError> {
    let mut rdr = reader(text);
    let header = rdr.headers()?.clone();
    let n = header.len();
    if !(REQUIRED_EVENT_COLUMNS..=EVENT_COLUMNS.len()).contains(&n)
        || !header.iter().eq(EVENT_COLUMNS[..n].iter().copied())
    {
        return Err(header_mismatch(&EVENT_COLUMNS, &header));
    }

    let mut out: Vec<EventRecord> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for record in rdr.records() {
        let record = record?;
        check_arity(&record, n)?;
        let importance = match record.get(7) {
            Some(v) if !v.is_empty() => Some(number(&record, 7, "importance")?),
            _ => None,
        };
        let predecessors = record
            .get(8)
            .map(|v| {
                v.split(';')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_owned)
                    .collect()
            })
            .unwrap_or_default();
        let event_id = record[0].to_owned();
        if !seen.insert(event_id.clone()) {
            return Err(IngestError::DuplicateEventId(event_id));
        }
        out.push(EventRecord {
            event_id,
            name: record[1].to_owned(),
            t_start: number(&record, 2, "t_start")?,
            t_end: number(&record, 3, "t_end")?,
            x: number(&record, 4, "x")?,
            z: number(&record, 5, "z")?,
            scenario_id: record[6].to_owned(),
            importance,
            predecessors,
        });
    }
    Ok(out)
}

/// Writes points in the full seven-column layout.
pub fn write_characters_csv(points: &[SpatioTemporalPoint]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(CHARACTER_COLUMNS).expect("in-memory write");
    for p in points {
        w.write_record([
            p.character_id.clone(),
            p.name.clone(),
            p.t.to_string(),
            p.x.to_string(),
            p.z.to_string(),
            p.impact.to_string(),
            p.scenario_id.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn write_events_csv(events: &[EventRecord]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(EVENT_COLUMNS).expect("in-memory write");
    for e in events {
        w.write_record([
            e.event_id.clone(),
            e.name.clone(),
            e.t_start.to_string(),
            e.t_end.to_string(),
            e.x.to_string(),
            e.z.to_string(),
            e.scenario_id.clone(),
            e.importance.map(|v| v.to_string()).unwrap_or_default(),
            e.predecessors.join(";"),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    min: [f64; 2],
    max: [f64; 2],
}

impl Bounds {
    fn empty() -> Self {
        Self { min: [f64::INFINITY; 2], max: [f64::NEG_INFINITY; 2] }
    }

    fn include(&mut self, x: f64, z: f64) {
        self.min = [self.min[0].min(x), self.min[1].min(z)];
        self.max = [self.max[0].max(x), self.max[1].max(z)];
    }
}

/// Maps raw records into world units and resolves impact thresholds.
///
/// Records are assumed to have passed [`crate::model::validate_dataset`];
/// per-character points are re-sorted by time regardless.
pub fn normalize_space_time(
    points: &[SpatioTemporalPoint],
    events: &[EventRecord],
    cfg: &IngestConfig,
) -> Result<NormalizedDataset, IngestError> {
    cfg.validate()?;
    if points.is_empty() && events.is_empty() {
        return Err(IngestError::EmptyDataset);
    }

    let (t_min, t_max) = points
        .iter()
        .map(|p| p.t)
        .chain(events.iter().flat_map(|e| [e.t_start, e.t_end]))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    if t_min == t_max {
        return Err(IngestError::DegenerateTimeRange(t_min));
    }
    let span = t_max - t_min;
    let height = cfg.time_height;
    let to_y = |t: f64| (t - t_min) / span * height;

    let mut bounds: BTreeMap<&str, Bounds> = BTreeMap::new();
    for p in points {
        bounds.entry(&p.scenario_id).or_insert_with(Bounds::empty).include(p.x, p.z);
    }
    for e in events {
        bounds.entry(&e.scenario_id).or_insert_with(Bounds::empty).include(e.x, e.z);
    }
    let mut scenarios: BTreeMap<&str, Scenario> = bounds
        .into_iter()
        .map(|(id, b)| {
            let w = b.max[0] - b.min[0];
            let d = b.max[1] - b.min[1];
            let longest = w.max(d);
            let scale = if longest > 0.0 { cfg.map_size / longest } else { 1.0 };
            let scenario = Scenario {
                id: id.to_owned(),
                raw_center: [(b.min[0] + b.max[0]) / 2.0, (b.min[1] + b.max[1]) / 2.0],
                scale,
                half_extent: [
                    w * scale / 2.0 + cfg.map_padding,
                    d * scale / 2.0 + cfg.map_padding,
                ],
                events: Vec::new(),
                points: Vec::new(),
            };
            (id, scenario)
        })
        .collect();
    let local = |s: &Scenario, x: f64, z: f64| {
        [(x - s.raw_center[0]) * s.scale, (z - s.raw_center[1]) * s.scale]
    };

    let mut by_character: BTreeMap<&str, Vec<&SpatioTemporalPoint>> = BTreeMap::new();
    for p in points {
        by_character.entry(&p.character_id).or_default().push(p);
    }
    let palette = assign_character_colors(by_character.keys().copied());
    let mut tracks = Vec::with_capacity(by_character.len());
    for (character_id, mut recs) in by_character {
        recs.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut track_points = Vec::with_capacity(recs.len());
        for (k, p) in recs.into_iter().enumerate() {
            let node_id = point_node_id(character_id, k);
            let scenario = scenarios.get_mut(p.scenario_id.as_str()).expect("scenario collected above");
            let [x, z] = local(scenario, p.x, p.z);
            scenario.points.push(node_id.clone());
            track_points.push(NormalizedPoint {
                node_id,
                record: p.clone(),
                position: [x, to_y(p.t), z],
            });
        }
        tracks.push(CharacterTrack {
            character_id: character_id.to_owned(),
            display_name: track_points[0].record.name.clone(),
            color: palette[character_id],
            points: track_points,
        });
    }

    let mut norm_events = Vec::with_capacity(events.len());
    for e in events {
        let node_id = event_node_id(&e.event_id);
        let scenario = scenarios.get_mut(e.scenario_id.as_str()).expect("scenario collected above");
        let [x, z] = local(scenario, e.x, e.z);
        scenario.events.push(node_id.clone());
        let duration = (e.t_end - e.t_start) / span * height;
        norm_events.push(NormalizedEvent {
            node_id,
            record: e.clone(),
            position: [x, to_y(event_center(e)), z],
            radius: derive_event_impact(e, duration, cfg.radius_scale, cfg.radius_clamp),
        });
    }
    norm_events.sort_by(|a, b| {
        a.center_y()
            .total_cmp(&b.center_y())
            .then_with(|| a.record.event_id.cmp(&b.record.event_id))
    });

    let point_impacts: Vec<f64> = points.iter().map(|p| p.impact).collect();
    let event_impacts: Vec<f64> = norm_events.iter().map(|e| e.radius).collect();
    let thresholds = Thresholds {
        character: cfg.xi_c_thre.resolve(&point_impacts),
        event: cfg.xi_e_thre.resolve(&event_impacts),
    };

    Ok(NormalizedDataset {
        tracks,
        events: norm_events,
        scenarios: scenarios.into_values().collect(),
        time_height: height,
        time_range: (t_min, t_max),
        thresholds,
    })
}

pub fn point_node_id(character_id: &str, index: usize) -> String {
    format!("c:{character_id}:{index}")
}

pub fn event_node_id(event_id: &str) -> String {
    format!("e:{event_id}")
}
