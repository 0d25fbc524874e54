//! Scene assembly: the four view variants, map placements, palette and tooltips.
//!
//! A variant is one (perspective, level of detail) pair. Both perspectives
//! of a level share its visible subset and its time layout; the
//! characters perspective renders points and travel lines, the events
//! perspective renders spheres and sequence lines.
//!
//! Overview positions are world positions: each map's local coordinates are
//! offset by the map's polar placement. Detail positions stay in the local
//! frame of their own map, which sits at the origin, so every detail node
//! and line carries its scenario id.

mod chain;
mod json;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    clip_polyline_to_sphere, cubic_spline, dedup_controls, distance, GeometryError,
    DEFAULT_SAMPLES_PER_SEGMENT,
};
use crate::ingest::IngestConfig;
use crate::layout::geomap::{place_map_detail, place_maps_overview, GeomapConfig, GeomapError, MapPlacement};
use crate::layout::time::{optimize_time_layout, LayoutEvent, LayoutPoint, TimeLayoutParams, TimeLayoutResult};
use crate::model::{Hsl, NormalizedDataset, Thresholds, Vec3};

pub use chain::{build_event_chain, ChainEvent};
pub use json::{export_scene_json, parse_scene_json, SceneParseError};

pub const SCENE_VERSION: &str = "3dsl-scene/1";
pub const EVENT_LINE_COLOR: Hsl = Hsl(0.0, 0.0, 0.75);

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("CyclicEventLinks: declared predecessors form a cycle through {0}")]
    CyclicEventLinks(String),
    #[error("UnknownEvent({0})")]
    UnknownEvent(String),
    #[error(transparent)]
    Geomap(#[from] GeomapError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    Characters,
    Events,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lod {
    Overview,
    Detail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariantKey {
    pub perspective: Perspective,
    pub lod: Lod,
}

impl VariantKey {
    pub const ALL: [VariantKey; 4] = [
        VariantKey { perspective: Perspective::Characters, lod: Lod::Overview },
        VariantKey { perspective: Perspective::Characters, lod: Lod::Detail },
        VariantKey { perspective: Perspective::Events, lod: Lod::Overview },
        VariantKey { perspective: Perspective::Events, lod: Lod::Detail },
    ];

    pub fn new(perspective: Perspective, lod: Lod) -> Self {
        Self { perspective, lod }
    }

    pub fn as_str(&self) -> &'static str {
        match (self.perspective, self.lod) {
            (Perspective::Characters, Lod::Overview) => "characters_overview",
            (Perspective::Characters, Lod::Detail) => "characters_detail",
            (Perspective::Events, Lod::Overview) => "events_overview",
            (Perspective::Events, Lod::Detail) => "events_detail",
        }
    }
}

/// Overview keeps impacts strictly above the threshold, detail keeps the rest.
pub fn is_visible(impact: f64, threshold: f64, lod: Lod) -> bool {
    match lod {
        Lod::Overview => impact > threshold,
        Lod::Detail => impact <= threshold,
    }
}

/// Indices of the items visible at `lod`.
pub fn filter_visibility<T>(items: &[T], impact: impl Fn(&T) -> f64, threshold: f64, lod: Lod) -> Vec<usize> {
    items
        .iter()
        .enumerate()
        .filter(|(_, it)| is_visible(impact(it), threshold, lod))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneConfig {
    pub samples_per_segment: usize,
    /// Radius of the small balls drawn for character points.
    pub point_radius: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self { samples_per_segment: DEFAULT_SAMPLES_PER_SEGMENT, point_radius: 0.04 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub ingest: IngestConfig,
    pub time: TimeLayoutParams,
    pub geomap: GeomapConfig,
    pub scene: SceneConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMeta {
    pub name: String,
    pub version: String,
    pub config: ConfigEcho,
    pub thresholds: Thresholds,
    pub time_range: [f64; 2],
    pub time_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMaps {
    pub overview: Vec<MapPlacement>,
    pub detail: BTreeMap<String, MapPlacement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointNode {
    pub id: String,
    pub position: Vec3,
    pub radius: f64,
    pub character_id: String,
    pub scenario_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventNode {
    pub id: String,
    pub position: Vec3,
    pub radius: f64,
    pub scenario_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Character,
    EventChain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneLine {
    /// Character id, or `chain:<first event id>` for sequence lines.
    pub source_id: String,
    pub kind: LineKind,
    pub color: Hsl,
    /// Set on detail lines, which never leave their map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_id: Option<String>,
    /// Node ids of the spline controls, in order.
    pub controls: Vec<String>,
    pub samples: Vec<Vec3>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LayoutedView {
    pub point_nodes: Vec<PointNode>,
    pub event_nodes: Vec<EventNode>,
    pub polylines: Vec<SceneLine>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Point,
    Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tooltip {
    pub kind: NodeKind,
    pub name: String,
    /// `[t]` for points, `[t_start, t_end]` for events, raw units.
    pub time: Vec<f64>,
    /// Raw `[x, z]`.
    pub geo: [f64; 2],
    pub scenario_id: String,
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    pub meta: SceneMeta,
    pub palette: BTreeMap<String, Hsl>,
    pub maps: SceneMaps,
    pub variants: BTreeMap<String, LayoutedView>,
    pub tooltips: BTreeMap<String, Tooltip>,
}

impl SceneDocument {
    pub fn variant(&self, key: VariantKey) -> Option<&LayoutedView> {
        self.variants.get(key.as_str())
    }

    pub fn polyline_count(&self) -> usize {
        self.variants.values().map(|v| v.polylines.len()).sum()
    }
}

/// Everything that shapes a scene apart from the input records.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompileConfig {
    pub ingest: IngestConfig,
    pub time: TimeLayoutParams,
    pub geomap: GeomapConfig,
    pub scene: SceneConfig,
}

impl CompileConfig {
    /// Checks the parameters that are not covered by the ingest config.
    pub fn validate_layout(&self) -> Result<(), SceneError> {
        self.geomap.validate()?;
        let TimeLayoutParams { delta_e, y0 } = self.time;
        if !(delta_e >= 0.0 && delta_e.is_finite()) {
            return Err(SceneError::InvalidConfig("delta_e must be a non-negative number".into()));
        }
        if !y0.is_finite() {
            return Err(SceneError::InvalidConfig("y0 must be finite".into()));
        }
        if self.scene.samples_per_segment == 0 {
            return Err(GeometryError::InvalidSampling.into());
        }
        if !(self.scene.point_radius > 0.0 && self.scene.point_radius.is_finite()) {
            return Err(SceneError::InvalidConfig("point radius must be positive".into()));
        }
        Ok(())
    }
}

/// One level of detail after filtering and time layout.
pub struct LodLayout {
    pub lod: Lod,
    /// `(track index, point index)` of each visible point.
    pub points: Vec<(usize, usize)>,
    /// Indices into `dataset.events` of the visible events.
    pub events: Vec<usize>,
    pub result: TimeLayoutResult,
}

/// Filters one level of detail and runs the time layout on what remains.
pub fn layout_lod(dataset: &NormalizedDataset, params: &TimeLayoutParams, lod: Lod) -> LodLayout {
    let Thresholds { character, event } = dataset.thresholds;
    let events = filter_visibility(&dataset.events, |e| e.radius, event, lod);
    let points: Vec<(usize, usize)> = dataset
        .tracks
        .iter()
        .enumerate()
        .flat_map(|(ti, t)| t.points.iter().enumerate().map(move |(pi, p)| ((ti, pi), p)))
        .filter(|(_, p)| is_visible(p.impact(), character, lod))
        .map(|(ix, _)| ix)
        .collect();

    let layout_events: Vec<LayoutEvent<'_>> = events
        .iter()
        .map(|&i| {
            let e = &dataset.events[i];
            LayoutEvent {
                id: &e.record.event_id,
                scenario: &e.record.scenario_id,
                center: e.position,
                radius: e.radius,
            }
        })
        .collect();
    let layout_points: Vec<LayoutPoint<'_>> = points
        .iter()
        .map(|&(ti, pi)| {
            let p = &dataset.tracks[ti].points[pi];
            LayoutPoint {
                character_id: &p.record.character_id,
                scenario: &p.record.scenario_id,
                t: p.record.t,
                position: p.position,
            }
        })
        .collect();
    let result = optimize_time_layout(&layout_events, &layout_points, params);
    LodLayout { lod, points, events, result }
}

fn spline_line(
    source_id: String,
    kind: LineKind,
    color: Hsl,
    scenario_id: Option<String>,
    nodes: &[(String, Vec3)],
    samples_per_segment: usize,
) -> Result<Option<SceneLine>, SceneError> {
    let positions: Vec<Vec3> = nodes.iter().map(|n| n.1).collect();
    let kept = dedup_controls(&positions);
    if kept.len() < 2 {
        return Ok(None);
    }
    let controls: Vec<Vec3> = kept.iter().map(|&i| positions[i]).collect();
    let polyline = cubic_spline(&source_id, &controls, samples_per_segment)?;
    Ok(Some(SceneLine {
        source_id,
        kind,
        color,
        scenario_id,
        controls: kept.iter().map(|&i| nodes[i].0.clone()).collect(),
        samples: polyline.samples,
    }))
}

/// Splits a sequence into maximal runs sharing a key.
fn runs_by<T, K: PartialEq>(items: Vec<T>, key: impl Fn(&T) -> K) -> Vec<Vec<T>> {
    let mut runs: Vec<Vec<T>> = Vec::new();
    for item in items {
        match runs.last_mut() {
            Some(run) if key(&run[0]) == key(&item) => run.push(item),
            _ => runs.push(vec![item]),
        }
    }
    runs
}

fn build_variant(
    dataset: &NormalizedDataset,
    layout: &LodLayout,
    perspective: Perspective,
    offsets: &BTreeMap<String, [f64; 2]>,
    scene_cfg: &SceneConfig,
) -> Result<LayoutedView, SceneError> {
    let detail = layout.lod == Lod::Detail;
    let place = |scenario: &str, local: Vec3, y: f64| {
        let [ox, oz] = if detail { [0.0, 0.0] } else { offsets[scenario] };
        [ox + local[0], y, oz + local[2]]
    };
    let mut view = LayoutedView::default();

    match perspective {
        Perspective::Characters => {
            let mut per_track: BTreeMap<usize, Vec<(String, Vec3, String)>> = BTreeMap::new();
            for (k, &(ti, pi)) in layout.points.iter().enumerate() {
                let p = &dataset.tracks[ti].points[pi];
                let position = place(&p.record.scenario_id, p.position, layout.result.point_y[k]);
                view.point_nodes.push(PointNode {
                    id: p.node_id.clone(),
                    position,
                    radius: scene_cfg.point_radius,
                    character_id: p.record.character_id.clone(),
                    scenario_id: p.record.scenario_id.clone(),
                });
                per_track.entry(ti).or_default().push((p.node_id.clone(), position, p.record.scenario_id.clone()));
            }
            for (ti, nodes) in per_track {
                let track = &dataset.tracks[ti];
                let runs = if detail { runs_by(nodes, |n| n.2.clone()) } else { vec![nodes] };
                for run in runs {
                    let scenario = detail.then(|| run[0].2.clone());
                    let controls: Vec<(String, Vec3)> = run.into_iter().map(|(id, pos, _)| (id, pos)).collect();
                    let line = spline_line(
                        track.character_id.clone(),
                        LineKind::Character,
                        track.color,
                        scenario,
                        &controls,
                        scene_cfg.samples_per_segment,
                    )?;
                    view.polylines.extend(line);
                }
            }
        }
        Perspective::Events => {
            let mut nodes: Vec<(String, Vec3)> = Vec::with_capacity(layout.events.len());
            for (k, &ei) in layout.events.iter().enumerate() {
                let e = &dataset.events[ei];
                let position = place(&e.record.scenario_id, e.position, layout.result.event_y[k]);
                view.event_nodes.push(EventNode {
                    id: e.node_id.clone(),
                    position,
                    radius: e.radius,
                    scenario_id: e.record.scenario_id.clone(),
                });
                nodes.push((e.node_id.clone(), position));
            }
            let groups: Vec<Vec<usize>> = if detail {
                let mut by_scenario: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
                for (k, &ei) in layout.events.iter().enumerate() {
                    by_scenario.entry(&dataset.events[ei].record.scenario_id).or_default().push(k);
                }
                by_scenario.into_values().collect()
            } else {
                vec![(0..layout.events.len()).collect()]
            };
            for group in groups {
                let chain_input: Vec<ChainEvent<'_>> = group
                    .iter()
                    .map(|&k| {
                        let e = &dataset.events[layout.events[k]];
                        ChainEvent {
                            id: &e.record.event_id,
                            center_y: e.center_y(),
                            predecessors: &e.record.predecessors,
                        }
                    })
                    .collect();
                for chain in build_event_chain(&chain_input)? {
                    if chain.len() < 2 {
                        continue;
                    }
                    let controls: Vec<(String, Vec3)> = chain.iter().map(|&c| nodes[group[c]].clone()).collect();
                    let first = &dataset.events[layout.events[group[chain[0]]]];
                    let line = spline_line(
                        format!("chain:{}", first.record.event_id),
                        LineKind::EventChain,
                        EVENT_LINE_COLOR,
                        detail.then(|| first.record.scenario_id.clone()),
                        &controls,
                        scene_cfg.samples_per_segment,
                    )?;
                    view.polylines.extend(line);
                }
            }
        }
    }
    Ok(view)
}

fn tooltips(dataset: &NormalizedDataset) -> BTreeMap<String, Tooltip> {
    let mut out = BTreeMap::new();
    for track in &dataset.tracks {
        for p in &track.points {
            out.insert(
                p.node_id.clone(),
                Tooltip {
                    kind: NodeKind::Point,
                    name: p.record.name.clone(),
                    time: vec![p.record.t],
                    geo: [p.record.x, p.record.z],
                    scenario_id: p.record.scenario_id.clone(),
                    impact: p.record.impact,
                },
            );
        }
    }
    for e in &dataset.events {
        out.insert(
            e.node_id.clone(),
            Tooltip {
                kind: NodeKind::Event,
                name: e.record.name.clone(),
                time: vec![e.record.t_start, e.record.t_end],
                geo: [e.record.x, e.record.z],
                scenario_id: e.record.scenario_id.clone(),
                impact: e.radius,
            },
        );
    }
    out
}

/// Compiles a normalized dataset into the four-variant scene document.
pub fn build_scene(dataset: &NormalizedDataset, name: &str, cfg: &CompileConfig) -> Result<SceneDocument, SceneError> {
    cfg.validate_layout()?;
    if let Some(id) = crate::model::find_link_cycle(
        &dataset.events.iter().map(|e| e.record.clone()).collect::<Vec<_>>(),
    ) {
        return Err(SceneError::CyclicEventLinks(id));
    }
    let overview = place_maps_overview(dataset, &cfg.geomap)?;
    let offsets: BTreeMap<String, [f64; 2]> =
        overview.iter().map(|m| (m.scenario_id.clone(), m.center)).collect();
    let detail = dataset.scenarios.iter().map(|s| (s.id.clone(), place_map_detail(s))).collect();

    let mut variants = BTreeMap::new();
    for lod in [Lod::Overview, Lod::Detail] {
        let layout = layout_lod(dataset, &cfg.time, lod);
        for perspective in [Perspective::Characters, Perspective::Events] {
            let view = build_variant(dataset, &layout, perspective, &offsets, &cfg.scene)?;
            variants.insert(VariantKey::new(perspective, lod).as_str().to_owned(), view);
        }
    }

    Ok(SceneDocument {
        meta: SceneMeta {
            name: name.to_owned(),
            version: SCENE_VERSION.to_owned(),
            config: ConfigEcho {
                ingest: cfg.ingest.clone(),
                time: cfg.time,
                geomap: cfg.geomap,
                scene: cfg.scene,
            },
            thresholds: dataset.thresholds,
            time_range: [dataset.time_range.0, dataset.time_range.1],
            time_height: dataset.time_height,
        },
        palette: dataset.palette(),
        maps: SceneMaps { overview, detail },
        variants,
        tooltips: tooltips(dataset),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSegment {
    pub source_id: String,
    pub color: Hsl,
    pub samples: Vec<Vec3>,
}

/// Characters-perspective content enclosed by one event sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalView {
    pub event_id: String,
    pub lod: Lod,
    pub center: Vec3,
    pub radius: f64,
    pub points: Vec<PointNode>,
    pub segments: Vec<LocalSegment>,
}

/// Character points and line pieces inside the sphere of `event_id`.
///
/// The sphere is taken from whichever events variant shows the event; the
/// content comes from the characters variant of the same level of detail.
pub fn local_character_view(scene: &SceneDocument, event_id: &str) -> Result<LocalView, SceneError> {
    let node_id = crate::ingest::event_node_id(event_id);
    let found = [Lod::Overview, Lod::Detail].into_iter().find_map(|lod| {
        scene
            .variant(VariantKey::new(Perspective::Events, lod))
            .and_then(|v| v.event_nodes.iter().find(|n| n.id == node_id))
            .map(|n| (lod, n))
    });
    let Some((lod, sphere)) = found else {
        return Err(SceneError::UnknownEvent(event_id.to_owned()));
    };
    let characters = scene
        .variant(VariantKey::new(Perspective::Characters, lod))
        .ok_or_else(|| SceneError::UnknownEvent(event_id.to_owned()))?;
    let same_frame = |scenario: Option<&str>| lod == Lod::Overview || scenario == Some(sphere.scenario_id.as_str());

    let points = characters
        .point_nodes
        .iter()
        .filter(|p| same_frame(Some(&p.scenario_id)) && distance(p.position, sphere.position) <= sphere.radius)
        .cloned()
        .collect();
    let mut segments = Vec::new();
    for line in characters.polylines.iter().filter(|l| same_frame(l.scenario_id.as_deref())) {
        for piece in clip_polyline_to_sphere(&line.samples, sphere.position, sphere.radius) {
            segments.push(LocalSegment {
                source_id: line.source_id.clone(),
                color: scene.palette.get(&line.source_id).copied().unwrap_or(line.color),
                samples: piece,
            });
        }
    }
    Ok(LocalView {
        event_id: event_id.to_owned(),
        lod,
        center: sphere.position,
        radius: sphere.radius,
        points,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{normalize_space_time, Threshold};
    use crate::model::fixtures::{event, point};

    #[test]
    fn visibility_examples() {
        let xi = [1.0, 2.0, 3.0];
        assert_eq!(filter_visibility(&xi, |v| *v, 2.0, Lod::Overview), vec![2]);
        assert_eq!(filter_visibility(&xi, |v| *v, 2.0, Lod::Detail), vec![0, 1]);
        assert_eq!(filter_visibility(&xi, |v| *v, f64::NEG_INFINITY, Lod::Overview), vec![0, 1, 2]);
    }

    fn toy_config() -> CompileConfig {
        CompileConfig {
            ingest: IngestConfig {
                xi_c_thre: Threshold::Fixed(0.5),
                xi_e_thre: Threshold::Fixed(0.0),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    pub(crate) fn toy_dataset(cfg: &CompileConfig) -> NormalizedDataset {
        let pts = vec![
            point("loki", 0.0, 0.0, 0.0, 1.0, "tva"),
            point("loki", 4.0, 1.0, 0.0, 0.2, "tva"),
            point("loki", 6.0, 2.0, 1.0, 0.2, "tva"),
            point("loki", 10.0, 2.0, 2.0, 1.0, "tva"),
            point("sylvie", 1.0, 0.0, 2.0, 1.0, "tva"),
            point("sylvie", 5.0, 1.0, 1.0, 0.2, "tva"),
            point("sylvie", 9.0, 2.0, 0.0, 1.0, "tva"),
        ];
        let evs = vec![event("heist", 4.0, 6.0, 1.0, 1.0, "tva")];
        normalize_space_time(&pts, &evs, &cfg.ingest).unwrap()
    }

    #[test]
    fn toy_scene_counts() {
        let cfg = toy_config();
        let ds = toy_dataset(&cfg);
        let scene = build_scene(&ds, "toy", &cfg).unwrap();
        assert_eq!(scene.variants.len(), 4);
        let co = scene.variant(VariantKey::new(Perspective::Characters, Lod::Overview)).unwrap();
        assert_eq!(co.polylines.len(), 2);
        assert!(co.event_nodes.is_empty());
        let eo = scene.variant(VariantKey::new(Perspective::Events, Lod::Overview)).unwrap();
        assert_eq!(eo.event_nodes.len(), 1);
        assert!(eo.point_nodes.is_empty());
        assert!(eo.polylines.is_empty());
        let cd = scene.variant(VariantKey::new(Perspective::Characters, Lod::Detail)).unwrap();
        assert_eq!(cd.point_nodes.len(), 3);
        assert_eq!(cd.polylines.len(), 1);
        assert_eq!(scene.polyline_count(), 3);
        assert_eq!(scene.tooltips.len(), 8);
    }

    #[test]
    fn polyline_controls_are_node_positions() {
        let cfg = toy_config();
        let scene = build_scene(&toy_dataset(&cfg), "toy", &cfg).unwrap();
        let spp = cfg.scene.samples_per_segment;
        for view in scene.variants.values() {
            let positions: BTreeMap<&str, Vec3> = view
                .point_nodes
                .iter()
                .map(|n| (n.id.as_str(), n.position))
                .chain(view.event_nodes.iter().map(|n| (n.id.as_str(), n.position)))
                .collect();
            for line in &view.polylines {
                for (k, id) in line.controls.iter().enumerate() {
                    assert_eq!(line.samples[k * spp], positions[id.as_str()]);
                }
            }
        }
    }

    #[test]
    fn empty_detail_partition() {
        let mut cfg = toy_config();
        cfg.ingest.xi_c_thre = Threshold::Fixed(-1.0);
        cfg.ingest.xi_e_thre = Threshold::Fixed(-1.0);
        let scene = build_scene(&toy_dataset(&cfg), "toy", &cfg).unwrap();
        for lod_key in ["characters_detail", "events_detail"] {
            let v = &scene.variants[lod_key];
            assert!(v.point_nodes.is_empty() && v.event_nodes.is_empty() && v.polylines.is_empty());
        }
    }

    #[test]
    fn local_view_of_event() {
        let cfg = CompileConfig {
            ingest: IngestConfig {
                xi_c_thre: Threshold::Fixed(0.0),
                xi_e_thre: Threshold::Fixed(0.0),
                radius_clamp: crate::model::RadiusClamp { min: 0.05, max: 5.0 },
                ..Default::default()
            },
            ..Default::default()
        };
        // three points of two characters gather at the event location
        let pts = vec![
            point("loki", 0.0, -10.0, 0.0, 1.0, "tva"),
            point("loki", 49.0, 0.0, 0.0, 1.0, "tva"),
            point("loki", 51.0, 0.0, 0.0, 1.0, "tva"),
            point("loki", 100.0, 10.0, 0.0, 1.0, "tva"),
            point("sylvie", 50.0, 0.0, 0.0, 1.0, "tva"),
            point("sylvie", 90.0, 0.0, 10.0, 1.0, "tva"),
        ];
        let mut heist = event("heist", 40.0, 60.0, 0.0, 0.0, "tva");
        heist.importance = Some(1.0);
        let mut empty = event("empty", 0.0, 1.0, 10.0, 10.0, "tva");
        empty.importance = Some(0.1);
        let ds = normalize_space_time(&pts, &[heist, empty], &cfg.ingest).unwrap();
        let scene = build_scene(&ds, "local", &cfg).unwrap();

        let view = local_character_view(&scene, "heist").unwrap();
        assert_eq!(view.lod, Lod::Overview);
        assert_eq!(view.points.len(), 3);
        assert_eq!(view.segments.len(), 2);
        assert_eq!(view.segments.iter().filter(|s| s.source_id == "loki").count(), 1);

        let none = local_character_view(&scene, "empty").unwrap();
        assert!(none.points.is_empty() && none.segments.is_empty());
        assert!(matches!(local_character_view(&scene, "nope"), Err(SceneError::UnknownEvent(_))));
    }

    #[test]
    fn cyclic_links_fail_the_build() {
        let cfg = toy_config();
        let pts = vec![point("a", 0.0, 0.0, 0.0, 1.0, "s"), point("a", 5.0, 1.0, 0.0, 1.0, "s")];
        let mut a = event("e0", 0.0, 1.0, 0.0, 0.0, "s");
        let mut b = event("e1", 2.0, 3.0, 0.0, 0.0, "s");
        a.predecessors = vec!["e1".into()];
        b.predecessors = vec!["e0".into()];
        let ds = normalize_space_time(&pts, &[a, b], &cfg.ingest).unwrap();
        assert!(matches!(build_scene(&ds, "c", &cfg), Err(SceneError::CyclicEventLinks(_))));
    }
}
