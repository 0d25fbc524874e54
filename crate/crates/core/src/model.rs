//! Domain records, derived quantities and dataset validation.
//!
//! Raw records come straight from the CSV inputs and carry raw time and
//! geo-coordinates. The normalized types at the bottom of this module hold
//! world-unit positions: `x`/`z` on the ground plane and `y` along the time
//! axis.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// A world-space position `[x, y, z]`, with `y` the time axis.
pub type Vec3 = [f64; 3];

/// One observation of a character: where it was, when, and how much it matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatioTemporalPoint {
    pub character_id: String,
    pub name: String,
    pub t: f64,
    pub x: f64,
    pub z: f64,
    /// Impact factor of this observation; decides overview vs detail.
    pub impact: f64,
    pub scenario_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub event_id: String,
    pub name: String,
    pub t_start: f64,
    pub t_end: f64,
    pub x: f64,
    pub z: f64,
    pub scenario_id: String,
    /// Explicit importance; when present it replaces the duration-derived radius.
    pub importance: Option<f64>,
    pub predecessors: Vec<String>,
}

impl EventRecord {
    /// Center time of the event in raw units.
    pub fn center_time(&self) -> f64 {
        event_center(self)
    }
}

/// Midpoint of the event's time interval, in raw time units.
pub fn event_center(e: &EventRecord) -> f64 {
    (e.t_start + e.t_end) / 2.0
}

/// Lower and upper bound for event sphere radii, in world units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusClamp {
    pub min: f64,
    pub max: f64,
}

impl RadiusClamp {
    pub fn apply(&self, v: f64) -> f64 {
        v.max(self.min).min(self.max)
    }
}

impl Default for RadiusClamp {
    fn default() -> Self {
        Self { min: 0.05, max: 2.0 }
    }
}

/// Impact factor (and sphere radius) of an event.
///
/// `normalized_duration` is the event's length measured on the world time
/// axis. An explicit importance takes precedence over the duration; either
/// way the result is clamped into `clamp`.
pub fn derive_event_impact(
    e: &EventRecord,
    normalized_duration: f64,
    scale: f64,
    clamp: RadiusClamp,
) -> f64 {
    match e.importance {
        Some(importance) => clamp.apply(importance),
        None => clamp.apply(scale * normalized_duration),
    }
}

/// A color in HSL space, serialized as `[h, s, l]` with `h` in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hsl(pub f64, pub f64, pub f64);

impl Hsl {
    pub fn hue(&self) -> f64 {
        self.0
    }
}

pub const GOLDEN_ANGLE_DEG: f64 = 137.508;
const PALETTE_SATURATION: f64 = 0.65;
const PALETTE_LIGHTNESS: f64 = 0.55;

/// Golden-angle categorical palette keyed by character id.
///
/// Ids are sorted and deduplicated first, so the palette only depends on the
/// set of ids.
pub fn assign_character_colors<'a, I>(ids: I) -> BTreeMap<String, Hsl>
where
    I: IntoIterator<Item = &'a str>,
{
    let sorted: BTreeSet<&str> = ids.into_iter().collect();
    sorted
        .into_iter()
        .enumerate()
        .map(|(k, id)| {
            let hue = (k as f64 * GOLDEN_ANGLE_DEG) % 360.0;
            (id.to_owned(), Hsl(hue, PALETTE_SATURATION, PALETTE_LIGHTNESS))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IssueKind {
    EmptyDataset,
    EmptyId { what: &'static str, record: usize },
    DuplicateEventId(String),
    EventTimeReversed { event_id: String, t_start: f64, t_end: f64 },
    DuplicateTimestamp { character_id: String, t: f64 },
    UnsortedTimestamps { character_id: String, t: f64, previous: f64 },
    UnknownScenario { what: String },
    UnknownPredecessor { event_id: String, predecessor: String },
    CyclicEventLinks { event_id: String },
    NonFinite { what: String, field: &'static str },
    NegativeImpact { what: String, value: f64 },
    DegenerateTimeRange(f64),
    InconsistentName { character_id: String },
}

impl IssueKind {
    pub fn severity(&self) -> Severity {
        match self {
            IssueKind::InconsistentName { .. } => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::EmptyDataset => write!(f, "empty dataset: no character or event records"),
            IssueKind::EmptyId { what, record } => write!(f, "empty {what} id in record {record}"),
            IssueKind::DuplicateEventId(id) => write!(f, "duplicate event id: {id}"),
            IssueKind::EventTimeReversed { event_id, t_start, t_end } => write!(
                f,
                "event time reversed: {event_id} has t_start {t_start} > t_end {t_end}"
            ),
            IssueKind::DuplicateTimestamp { character_id, t } => {
                write!(f, "duplicate timestamp: character {character_id} at t={t}")
            }
            IssueKind::UnsortedTimestamps { character_id, t, previous } => write!(
                f,
                "unsorted timestamps: character {character_id} has t={t} after t={previous}"
            ),
            IssueKind::UnknownScenario { what } => {
                write!(f, "unknown scenario reference: {what} has no scenario id")
            }
            IssueKind::UnknownPredecessor { event_id, predecessor } => write!(
                f,
                "unknown predecessor: event {event_id} links to missing event {predecessor}"
            ),
            IssueKind::CyclicEventLinks { event_id } => {
                write!(f, "cyclic event links through event {event_id}")
            }
            IssueKind::NonFinite { what, field } => {
                write!(f, "non-finite value: {field} of {what}")
            }
            IssueKind::NegativeImpact { what, value } => {
                write!(f, "negative impact: {what} has {value}")
            }
            IssueKind::DegenerateTimeRange(t) => {
                write!(f, "degenerate time range: every timestamp equals {t}")
            }
            IssueKind::InconsistentName { character_id } => {
                write!(f, "character {character_id} uses more than one display name")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<IssueKind>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &IssueKind> {
        self.issues.iter().filter(|i| i.severity() == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &IssueKind> {
        self.issues.iter().filter(|i| i.severity() == Severity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            let tag = match issue.severity() {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{tag}: {issue}")?;
        }
        Ok(())
    }
}

/// Checks every record-level invariant and reports all violations at once.
///
/// An empty report means the records can be normalized and compiled into a
/// scene.
pub fn validate_dataset(points: &[SpatioTemporalPoint], events: &[EventRecord]) -> ValidationReport {
    let mut issues = Vec::new();

    if points.is_empty() && events.is_empty() {
        issues.push(IssueKind::EmptyDataset);
        return ValidationReport { issues };
    }

    let mut last_t: HashMap<&str, f64> = HashMap::new();
    let mut names: HashMap<&str, &str> = HashMap::new();
    let mut name_conflicts: BTreeSet<&str> = BTreeSet::new();
    for (i, p) in points.iter().enumerate() {
        let what = || format!("point {} of {}", i, p.character_id);
        if p.character_id.is_empty() {
            issues.push(IssueKind::EmptyId { what: "character", record: i });
        }
        if p.scenario_id.is_empty() {
            issues.push(IssueKind::UnknownScenario { what: what() });
        }
        for (field, v) in [("t", p.t), ("x", p.x), ("z", p.z), ("impact", p.impact)] {
            if !v.is_finite() {
                issues.push(IssueKind::NonFinite { what: what(), field });
            }
        }
        if p.impact < 0.0 {
            issues.push(IssueKind::NegativeImpact { what: what(), value: p.impact });
        }
        if p.t.is_finite() {
            if let Some(&prev) = last_t.get(p.character_id.as_str()) {
                if p.t == prev {
                    issues.push(IssueKind::DuplicateTimestamp {
                        character_id: p.character_id.clone(),
                        t: p.t,
                    });
                } else if p.t < prev {
                    issues.push(IssueKind::UnsortedTimestamps {
                        character_id: p.character_id.clone(),
                        t: p.t,
                        previous: prev,
                    });
                }
            }
            last_t.insert(&p.character_id, p.t);
        }
        match names.get(p.character_id.as_str()) {
            Some(&n) if n != p.name => {
                name_conflicts.insert(&p.character_id);
            }
            Some(_) => {}
            None => {
                names.insert(&p.character_id, &p.name);
            }
        }
    }
    issues.extend(name_conflicts.into_iter().map(|c| IssueKind::InconsistentName {
        character_id: c.to_owned(),
    }));

    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, e) in events.iter().enumerate() {
        let what = || format!("event {}", e.event_id);
        if e.event_id.is_empty() {
            issues.push(IssueKind::EmptyId { what: "event", record: i });
        }
        if seen.insert(&e.event_id, i).is_some() {
            issues.push(IssueKind::DuplicateEventId(e.event_id.clone()));
        }
        if e.scenario_id.is_empty() {
            issues.push(IssueKind::UnknownScenario { what: what() });
        }
        for (field, v) in [("t_start", e.t_start), ("t_end", e.t_end), ("x", e.x), ("z", e.z)] {
            if !v.is_finite() {
                issues.push(IssueKind::NonFinite { what: what(), field });
            }
        }
        if let Some(imp) = e.importance {
            if !imp.is_finite() {
                issues.push(IssueKind::NonFinite { what: what(), field: "importance" });
            } else if imp < 0.0 {
                issues.push(IssueKind::NegativeImpact { what: what(), value: imp });
            }
        }
        if e.t_start > e.t_end {
            issues.push(IssueKind::EventTimeReversed {
                event_id: e.event_id.clone(),
                t_start: e.t_start,
                t_end: e.t_end,
            });
        }
    }
    for e in events {
        for p in &e.predecessors {
            if !seen.contains_key(p.as_str()) {
                issues.push(IssueKind::UnknownPredecessor {
                    event_id: e.event_id.clone(),
                    predecessor: p.clone(),
                });
            }
        }
    }
    if let Some(event_id) = find_link_cycle(events) {
        issues.push(IssueKind::CyclicEventLinks { event_id });
    }

    let times = points
        .iter()
        .map(|p| p.t)
        .chain(events.iter().flat_map(|e| [e.t_start, e.t_end]))
        .filter(|t| t.is_finite());
    let (lo, hi) = times.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
        (lo.min(t), hi.max(t))
    });
    if lo == hi {
        issues.push(IssueKind::DegenerateTimeRange(lo));
    }

    ValidationReport { issues }
}

/// Returns an event on a predecessor cycle, if the declared links have one.
pub(crate) fn find_link_cycle(events: &[EventRecord]) -> Option<String> {
    let index: HashMap<&str, usize> =
        events.iter().enumerate().map(|(i, e)| (e.event_id.as_str(), i)).collect();
    let succ: Vec<Vec<usize>> = {
        let mut s = vec![Vec::new(); events.len()];
        for (i, e) in events.iter().enumerate() {
            for p in &e.predecessors {
                if let Some(&j) = index.get(p.as_str()) {
                    s[j].push(i);
                }
            }
        }
        s
    };
    let mut indeg = vec![0usize; events.len()];
    for targets in &succ {
        for &t in targets {
            indeg[t] += 1;
        }
    }
    let mut queue: Vec<usize> = (0..events.len()).filter(|&i| indeg[i] == 0).collect();
    let mut removed = 0;
    while let Some(n) = queue.pop() {
        removed += 1;
        for &t in &succ[n] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                queue.push(t);
            }
        }
    }
    if removed == events.len() {
        return None;
    }
    events
        .iter()
        .enumerate()
        .filter(|(i, _)| indeg[*i] > 0)
        .map(|(_, e)| e.event_id.clone())
        .min()
}

/// A character observation after normalization into world units.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedPoint {
    pub node_id: String,
    pub record: SpatioTemporalPoint,
    /// Scenario-local `[x, y, z]`.
    pub position: Vec3,
}

impl NormalizedPoint {
    pub fn impact(&self) -> f64 {
        self.record.impact
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTrack {
    pub character_id: String,
    pub display_name: String,
    /// Strictly increasing in `record.t`.
    pub points: Vec<NormalizedPoint>,
    pub color: Hsl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedEvent {
    pub node_id: String,
    pub record: EventRecord,
    /// Scenario-local `[x, center_y, z]`.
    pub position: Vec3,
    /// Impact factor, also the bounding-sphere radius.
    pub radius: f64,
}

impl NormalizedEvent {
    pub fn center_y(&self) -> f64 {
        self.position[1]
    }
}

/// One geo-map and the transform that took its raw coordinates to local world units.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    /// Raw-coordinate center of the scenario bounding box.
    pub raw_center: [f64; 2],
    /// Raw units to world units.
    pub scale: f64,
    /// Half-size of the map quad, including padding.
    pub half_extent: [f64; 2],
    pub events: Vec<String>,
    pub points: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub character: f64,
    pub event: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDataset {
    /// Sorted by character id.
    pub tracks: Vec<CharacterTrack>,
    /// Sorted by center time, ties by event id.
    pub events: Vec<NormalizedEvent>,
    /// Sorted by scenario id.
    pub scenarios: Vec<Scenario>,
    pub time_height: f64,
    pub time_range: (f64, f64),
    pub thresholds: Thresholds,
}

impl NormalizedDataset {
    pub fn points(&self) -> impl Iterator<Item = &NormalizedPoint> {
        self.tracks.iter().flat_map(|t| t.points.iter())
    }

    pub fn point_count(&self) -> usize {
        self.tracks.iter().map(|t| t.points.len()).sum()
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn event(&self, id: &str) -> Option<&NormalizedEvent> {
        self.events.iter().find(|e| e.record.event_id == id)
    }

    pub fn palette(&self) -> BTreeMap<String, Hsl> {
        self.tracks.iter().map(|t| (t.character_id.clone(), t.color)).collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn point(c: &str, t: f64, x: f64, z: f64, impact: f64, scenario: &str) -> SpatioTemporalPoint {
        SpatioTemporalPoint {
            character_id: c.into(),
            name: c.to_uppercase(),
            t,
            x,
            z,
            impact,
            scenario_id: scenario.into(),
        }
    }

    pub fn event(id: &str, t_start: f64, t_end: f64, x: f64, z: f64, scenario: &str) -> EventRecord {
        EventRecord {
            event_id: id.into(),
            name: id.to_uppercase(),
            t_start,
            t_end,
            x,
            z,
            scenario_id: scenario.into(),
            importance: None,
            predecessors: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{event, point};
    use super::*;

    #[test]
    fn event_center_examples() {
        assert_eq!(event_center(&event("a", 2.0, 4.0, 0.0, 0.0, "s")), 3.0);
        assert_eq!(event_center(&event("a", 5.0, 5.0, 0.0, 0.0, "s")), 5.0);
        assert_eq!(event_center(&event("a", 0.0, 10.0, 0.0, 0.0, "s")), 5.0);
    }

    #[test]
    fn event_impact_examples() {
        let clamp = RadiusClamp { min: 0.05, max: 2.0 };
        let mut e = event("a", 0.0, 1.0, 0.0, 0.0, "s");
        assert_eq!(derive_event_impact(&e, 0.4, 1.0, clamp), 0.4);
        assert_eq!(derive_event_impact(&e, 0.0, 1.0, clamp), 0.05);
        e.importance = Some(1.5);
        assert_eq!(derive_event_impact(&e, 0.0, 1.0, clamp), 1.5);
        e.importance = Some(7.0);
        assert_eq!(derive_event_impact(&e, 0.0, 1.0, clamp), 2.0);
    }

    #[test]
    fn golden_angle_palette() {
        let one = assign_character_colors(["loki"]);
        assert_eq!(one["loki"].hue(), 0.0);
        let two = assign_character_colors(["sylvie", "loki"]);
        assert_eq!(two["loki"].hue(), 0.0);
        assert_eq!(two["sylvie"].hue(), 137.508);
        assert_eq!(two, assign_character_colors(["loki", "sylvie", "loki"]));
    }

    #[test]
    fn palette_hues_distinct_below_one_hundred() {
        let ids: Vec<String> = (0..100).map(|k| format!("c{k:03}")).collect();
        let pal = assign_character_colors(ids.iter().map(String::as_str));
        let mut hues: Vec<f64> = pal.values().map(|c| c.hue()).collect();
        hues.sort_by(f64::total_cmp);
        assert!(hues.windows(2).all(|w| w[1] - w[0] > 1e-6));
    }

    fn toy() -> (Vec<SpatioTemporalPoint>, Vec<EventRecord>) {
        (
            vec![
                point("loki", 1.0, 0.0, 0.0, 1.0, "tva"),
                point("loki", 2.0, 1.0, 0.0, 1.0, "tva"),
                point("sylvie", 1.5, 0.0, 1.0, 1.0, "tva"),
            ],
            vec![event("e1", 1.0, 2.0, 0.5, 0.5, "tva")],
        )
    }

    #[test]
    fn well_formed_dataset_has_empty_report() {
        let (p, e) = toy();
        assert!(validate_dataset(&p, &e).is_empty());
    }

    #[test]
    fn reversed_event_time_reported() {
        let (p, mut e) = toy();
        e[0].t_start = 9.0;
        e[0].t_end = 3.0;
        let report = validate_dataset(&p, &e);
        assert_eq!(report.errors().count(), 1);
        assert!(report.to_string().contains("event time reversed"));
    }

    #[test]
    fn duplicate_timestamp_reported() {
        let (mut p, e) = toy();
        p[1].t = 1.0;
        let report = validate_dataset(&p, &e);
        assert!(report.to_string().contains("duplicate timestamp"));
        assert!(report.has_errors());
    }

    #[test]
    fn assorted_violations() {
        let (mut p, mut e) = toy();
        p[0].scenario_id.clear();
        p[2].impact = f64::NAN;
        e.push(e[0].clone());
        e[0].predecessors = vec!["ghost".into()];
        let report = validate_dataset(&p, &e);
        let kinds: Vec<_> = report.issues.iter().map(|i| format!("{i}")).collect();
        assert!(kinds.iter().any(|k| k.starts_with("unknown scenario")));
        assert!(kinds.iter().any(|k| k.starts_with("non-finite")));
        assert!(kinds.iter().any(|k| k.starts_with("duplicate event id")));
        assert!(kinds.iter().any(|k| k.starts_with("unknown predecessor")));
    }

    #[test]
    fn cycle_and_degenerate_range() {
        let mut a = event("a", 0.0, 0.0, 0.0, 0.0, "s");
        let mut b = event("b", 0.0, 0.0, 0.0, 0.0, "s");
        a.predecessors = vec!["b".into()];
        b.predecessors = vec!["a".into()];
        let report = validate_dataset(&[], &[a, b]);
        let text = report.to_string();
        assert!(text.contains("cyclic event links through event a"), "{text}");
        assert!(text.contains("degenerate time range"), "{text}");
    }

    #[test]
    fn name_change_is_only_a_warning() {
        let (mut p, e) = toy();
        p[1].name = "Variant".into();
        let report = validate_dataset(&p, &e);
        assert!(!report.has_errors());
        assert_eq!(report.warnings().count(), 1);
    }

    #[test]
    fn empty_input_reported() {
        assert_eq!(validate_dataset(&[], &[]).issues, vec![IssueKind::EmptyDataset]);
    }
}
