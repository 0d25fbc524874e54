//! Seeded synthetic narrative datasets.
//!
//! Defaults match the scale of a single TV episode: 411 character records
//! and 95 events. Roughly 60% of the character records are drawn inside an
//! event's time window and near its location so that sphere membership is
//! not trivially empty.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{EventRecord, SpatioTemporalPoint};

const NAMES: [&str; 12] = [
    "Loki", "Sylvie", "Mobius", "Ravonna", "Hunter B-15", "Miss Minutes", "Casey", "Kang",
    "Classic Loki", "Kid Loki", "Alligator Loki", "Boastful Loki",
];
const TIME_SPAN: f64 = 1000.0;
const MAP_SIDE: f64 = 100.0;
const ATTACH_PROBABILITY: f64 = 0.6;
const LINK_PROBABILITY: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_points: usize,
    pub n_events: usize,
    pub n_characters: usize,
    pub n_scenarios: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { seed: 7, n_points: 411, n_events: 95, n_characters: 12, n_scenarios: 3 }
    }
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

struct Draft {
    t_start: f64,
    t_end: f64,
    scenario: usize,
    loc: [f64; 2],
    importance: Option<f64>,
}

/// Generates character records (grouped by character, time-sorted) and events.
///
/// Counts of zero for characters or scenarios are treated as one.
pub fn generate(spec: &SyntheticSpec) -> (Vec<SpatioTemporalPoint>, Vec<EventRecord>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_scenarios = spec.n_scenarios.max(1);
    let n_characters = spec.n_characters.max(1).min(spec.n_points.max(1));
    let scenario_ids: Vec<String> = (0..n_scenarios).map(|k| format!("sc{k}")).collect();
    // each scenario keeps its own raw coordinate frame
    let origin = |s: usize| [s as f64 * 10.0 * MAP_SIDE, -(s as f64) * 3.0 * MAP_SIDE];

    let mut drafts: Vec<Draft> = (0..spec.n_events)
        .map(|_| {
            let center = rng.random_range(0.0..TIME_SPAN);
            let duration = rng.random_range(2.0..30.0);
            let s = rng.random_range(0..n_scenarios);
            let o = origin(s);
            let loc = [
                round3(o[0] + rng.random_range(0.0..MAP_SIDE)),
                round3(o[1] + rng.random_range(0.0..MAP_SIDE)),
            ];
            let importance = rng.random_bool(0.1).then(|| round2(rng.random_range(0.1..1.0)));
            Draft {
                t_start: round3(center - duration / 2.0),
                t_end: round3(center + duration / 2.0),
                scenario: s,
                loc,
                importance,
            }
        })
        .collect();
    drafts.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));

    let mut last_in_scenario: Vec<Option<String>> = vec![None; n_scenarios];
    let mut events = Vec::with_capacity(drafts.len());
    for (j, Draft { t_start, t_end, scenario: s, loc, importance }) in drafts.into_iter().enumerate() {
        let event_id = format!("ev{j:03}");
        let predecessors = match &last_in_scenario[s] {
            Some(prev) if rng.random_bool(LINK_PROBABILITY) => vec![prev.clone()],
            _ => Vec::new(),
        };
        last_in_scenario[s] = Some(event_id.clone());
        events.push(EventRecord {
            name: format!("Event {j}"),
            event_id,
            t_start,
            t_end,
            x: loc[0],
            z: loc[1],
            scenario_id: scenario_ids[s].clone(),
            importance,
            predecessors,
        });
    }

    let mut per_character: Vec<Vec<SpatioTemporalPoint>> = vec![Vec::new(); n_characters];
    for i in 0..spec.n_points {
        let c = i % n_characters;
        let impact = round2(rng.random_range(0.1..2.0));
        let (t, x, z, s) = if !events.is_empty() && rng.random_bool(ATTACH_PROBABILITY) {
            let e = &events[rng.random_range(0..events.len())];
            let d = e.t_end - e.t_start;
            let t = e.t_start + d * rng.random_range(0.2..0.8);
            let x = e.x + rng.random_range(-1.0..1.0);
            let z = e.z + rng.random_range(-1.0..1.0);
            let s = scenario_ids.iter().position(|id| *id == e.scenario_id).expect("known scenario");
            (t, x, z, s)
        } else {
            let s = rng.random_range(0..n_scenarios);
            let o = origin(s);
            (
                rng.random_range(0.0..TIME_SPAN),
                o[0] + rng.random_range(0.0..MAP_SIDE),
                o[1] + rng.random_range(0.0..MAP_SIDE),
                s,
            )
        };
        let character_id = format!("ch{c:02}");
        let name = NAMES.get(c).map_or_else(|| format!("Character {c}"), |n| (*n).to_owned());
        per_character[c].push(SpatioTemporalPoint {
            character_id,
            name,
            t: round3(t),
            x: round3(x),
            z: round3(z),
            impact,
            scenario_id: scenario_ids[s].clone(),
        });
    }

    let mut points = Vec::with_capacity(spec.n_points);
    for mut track in per_character {
        track.sort_by(|a, b| a.t.total_cmp(&b.t));
        let mut prev = f64::NEG_INFINITY;
        for p in &mut track {
            if p.t <= prev {
                p.t = round3(prev + 0.001);
            }
            prev = p.t;
        }
        points.extend(track);
    }
    (points, events)
}
