//! Geo-map placement.
//!
//! In detail mode a single map sits at the origin. In overview mode maps are
//! arranged around the viewer in polar coordinates: more important maps get
//! a smaller radius, and angles come from a 1D repulsion relaxation on the
//! circle that pushes apart maps whose angular footprints are too close.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{NormalizedDataset, Scenario};

pub const GOLDEN_ANGLE_RAD: f64 = 2.39996;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomapError {
    #[error(
        "InfeasibleAngularBudget: maps need {required:.4} rad of the circle including margins \
         (available {available:.4}); raise --rho-min/--rho-step or lower --margin-deg"
    )]
    InfeasibleAngularBudget { required: f64, available: f64 },
    #[error("UnknownScenario({0})")]
    UnknownScenario(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomapConfig {
    pub rho_min: f64,
    pub rho_step: f64,
    /// Minimum angular gap between neighbouring map footprints, radians.
    pub margin: f64,
    pub max_iter: usize,
    /// Step factor of the first relaxation sweep.
    pub initial_step: f64,
    /// Per-sweep decay of the step factor.
    pub cooling: f64,
    /// Relaxation stops once no map moves more than this, radians.
    pub tolerance: f64,
}

impl Default for GeomapConfig {
    fn default() -> Self {
        Self {
            rho_min: 2.0,
            rho_step: 1.5,
            margin: 5f64.to_radians(),
            max_iter: 200,
            initial_step: 1.0,
            cooling: 0.9,
            tolerance: 1e-4,
        }
    }
}

impl GeomapConfig {
    pub fn validate(&self) -> Result<(), GeomapError> {
        let bad = |m: &str| Err(GeomapError::InvalidConfig(m.to_owned()));
        if !(self.rho_min > 0.0 && self.rho_min.is_finite()) {
            return bad("rho-min must be positive");
        }
        if !(self.rho_step > 0.0 && self.rho_step.is_finite()) {
            return bad("rho-step must be positive");
        }
        if !(self.margin >= 0.0 && self.margin < TAU) {
            return bad("margin must lie in [0, 360) degrees");
        }
        if !(self.cooling > 0.0 && self.cooling <= 1.0) {
            return bad("cooling factor must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlacementMode {
    Overview,
    Detail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapPlacement {
    pub scenario_id: String,
    pub mode: PlacementMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub center: [f64; 2],
    pub half_extent: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub importance: Option<f64>,
}

/// Sum of event impacts and point impacts inside a scenario.
pub fn map_importance(scenario_id: &str, dataset: &NormalizedDataset) -> f64 {
    let events: f64 = dataset
        .events
        .iter()
        .filter(|e| e.record.scenario_id == scenario_id)
        .map(|e| e.radius)
        .sum();
    let points: f64 = dataset
        .points()
        .filter(|p| p.record.scenario_id == scenario_id)
        .map(|p| p.record.impact)
        .sum();
    events + points
}

/// Importance ranks: 0 for the most important, ties to the smaller id.
pub fn importance_ranks(items: &[(&str, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[b].1.total_cmp(&items[a].1).then_with(|| items[a].0.cmp(items[b].0)));
    let mut ranks = vec![0; items.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank;
    }
    ranks
}

/// `ρ = rho_min + rank * rho_step` per `(scenario id, importance)` item.
pub fn assign_radial_distance(items: &[(&str, f64)], cfg: &GeomapConfig) -> Vec<f64> {
    importance_ranks(items)
        .into_iter()
        .map(|rank| cfg.rho_min + rank as f64 * cfg.rho_step)
        .collect()
}

fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Signed shortest rotation from `a` to `b`, in `(-π, π]`.
fn signed_delta(a: f64, b: f64) -> f64 {
    let d = (b - a).rem_euclid(TAU);
    if d > std::f64::consts::PI {
        d - TAU
    } else {
        d
    }
}

/// Gap between the angular footprints of two maps, negative when they overlap.
pub fn angular_gap(theta_a: f64, extent_a: f64, theta_b: f64, extent_b: f64) -> f64 {
    signed_delta(theta_a, theta_b).abs() - (extent_a + extent_b) / 2.0
}

/// Smallest pairwise footprint gap; `+∞` for fewer than two maps.
pub fn min_angular_gap(thetas: &[f64], extents: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..thetas.len() {
        for j in i + 1..thetas.len() {
            min = min.min(angular_gap(thetas[i], extents[i], thetas[j], extents[j]));
        }
    }
    min
}

/// Angles for maps given in importance-rank order.
///
/// Starts from golden-angle positions and relaxes with pairwise repulsion:
/// every pair whose gap is below `margin` is pushed apart symmetrically by
/// the violation times the current step factor, which cools geometrically.
/// If the relaxation ends above tolerance, the maps are re-spaced in their
/// current circular order so that every gap meets the margin.
pub fn force_directed_theta(extents: &[f64], cfg: &GeomapConfig) -> Result<Vec<f64>, GeomapError> {
    let required: f64 = extents.iter().map(|a| a + cfg.margin).sum();
    if extents.len() > 1 && required > TAU {
        return Err(GeomapError::InfeasibleAngularBudget { required, available: TAU });
    }
    let n = extents.len();
    let mut theta: Vec<f64> = (0..n).map(|k| wrap_angle(k as f64 * GOLDEN_ANGLE_RAD)).collect();
    if n < 2 {
        return Ok(theta);
    }

    let mut step = cfg.initial_step;
    for _ in 0..cfg.max_iter {
        let mut max_move: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let delta = signed_delta(theta[i], theta[j]);
                let gap = delta.abs() - (extents[i] + extents[j]) / 2.0;
                if gap >= cfg.margin {
                    continue;
                }
                let push = step * (cfg.margin - gap) / 2.0;
                // j moves away from i along the shorter arc; coincident maps split by index
                let dir = if delta >= 0.0 { 1.0 } else { -1.0 };
                theta[i] = wrap_angle(theta[i] - dir * push);
                theta[j] = wrap_angle(theta[j] + dir * push);
                max_move = max_move.max(push);
            }
        }
        step *= cfg.cooling;
        if max_move < cfg.tolerance {
            break;
        }
    }

    if min_angular_gap(&theta, extents) < cfg.margin - 1e-4 {
        log::debug!("angular relaxation stalled; re-spacing maps in circular order");
        respace_in_order(&mut theta, extents, cfg.margin);
    }
    Ok(theta)
}

/// Places maps around the circle in their current angular order, each gap
/// receiving the margin plus an equal share of the spare angle.
fn respace_in_order(theta: &mut [f64], extents: &[f64], margin: f64) {
    let n = theta.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]).then(a.cmp(&b)));
    let needed: f64 = extents.iter().map(|a| a + margin).sum();
    let spare = (TAU - needed).max(0.0) / n as f64;
    let mut at = theta[order[0]];
    for w in order.windows(2) {
        at += (extents[w[0]] + extents[w[1]]) / 2.0 + margin + spare;
        theta[w[1]] = wrap_angle(at);
    }
}

/// Angular footprint of a map seen from the origin at distance `rho`.
pub fn angular_extent(half_extent: [f64; 2], rho: f64) -> f64 {
    let half_diagonal = half_extent[0].hypot(half_extent[1]);
    2.0 * (half_diagonal / rho).atan()
}

/// Polar overview placement of every scenario, sorted by scenario id.
pub fn place_maps_overview(
    dataset: &NormalizedDataset,
    cfg: &GeomapConfig,
) -> Result<Vec<MapPlacement>, GeomapError> {
    cfg.validate()?;
    let scenarios = &dataset.scenarios;
    if scenarios.is_empty() {
        return Ok(Vec::new());
    }
    let importance: Vec<(&str, f64)> = scenarios
        .iter()
        .map(|s| (s.id.as_str(), map_importance(&s.id, dataset)))
        .collect();
    let ranks = importance_ranks(&importance);
    let rhos = assign_radial_distance(&importance, cfg);

    let mut by_rank: Vec<usize> = (0..scenarios.len()).collect();
    by_rank.sort_by_key(|&i| ranks[i]);
    let extents: Vec<f64> = by_rank
        .iter()
        .map(|&i| angular_extent(scenarios[i].half_extent, rhos[i]))
        .collect();
    let thetas = force_directed_theta(&extents, cfg)?;

    let mut out: Vec<MapPlacement> = Vec::with_capacity(scenarios.len());
    for (k, &i) in by_rank.iter().enumerate() {
        let (rho, theta) = (rhos[i], thetas[k]);
        out.push(MapPlacement {
            scenario_id: scenarios[i].id.clone(),
            mode: PlacementMode::Overview,
            rho: Some(rho),
            theta: Some(theta),
            center: [rho * theta.cos(), rho * theta.sin()],
            half_extent: scenarios[i].half_extent,
            angular_extent: Some(extents[k]),
            importance: Some(importance[i].1),
        });
    }
    out.sort_by(|a, b| a.scenario_id.cmp(&b.scenario_id));
    Ok(out)
}

/// Detail placement: the map alone at the origin, unrotated.
pub fn place_map_detail(scenario: &Scenario) -> MapPlacement {
    MapPlacement {
        scenario_id: scenario.id.clone(),
        mode: PlacementMode::Detail,
        rho: None,
        theta: None,
        center: [0.0, 0.0],
        half_extent: scenario.half_extent,
        angular_extent: None,
        importance: None,
    }
}

pub fn place_map_detail_by_id(dataset: &NormalizedDataset, id: &str) -> Result<MapPlacement, GeomapError> {
    dataset
        .scenario(id)
        .map(place_map_detail)
        .ok_or_else(|| GeomapError::UnknownScenario(id.to_owned()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{normalize_space_time, IngestConfig};
    use crate::model::fixtures::{event, point};

    #[test]
    fn radial_distance_by_rank() {
        let cfg = GeomapConfig::default();
        let rho = assign_radial_distance(&[("A", 7.0), ("B", 3.0), ("C", 5.0)], &cfg);
        assert_eq!(rho, vec![2.0, 5.0, 3.5]);
        assert_eq!(assign_radial_distance(&[("only", 0.0)], &cfg), vec![2.0]);
        let tied = assign_radial_distance(&[("B", 4.0), ("A", 4.0)], &cfg);
        assert_eq!(tied, vec![3.5, 2.0]);
    }

    #[test]
    fn single_map_stays_at_zero() {
        let theta = force_directed_theta(&[1.0], &GeomapConfig::default()).unwrap();
        assert_eq!(theta, vec![0.0]);
        assert!(force_directed_theta(&[], &GeomapConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn two_maps_separated_by_margin() {
        let cfg = GeomapConfig { margin: 10f64.to_radians(), ..Default::default() };
        let ext = [30f64.to_radians(); 2];
        let theta = force_directed_theta(&ext, &cfg).unwrap();
        assert!(min_angular_gap(&theta, &ext) >= cfg.margin - 1e-3);
        assert_eq!(theta, force_directed_theta(&ext, &cfg).unwrap());
    }

    #[test]
    fn crowded_maps_still_meet_margin() {
        let cfg = GeomapConfig { margin: 0.05, ..Default::default() };
        let ext = [1.2, 1.1, 1.0, 0.9, 0.9, 0.6];
        let theta = force_directed_theta(&ext, &cfg).unwrap();
        assert!(min_angular_gap(&theta, &ext) >= cfg.margin - 1e-3);
        assert!(theta.iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn infeasible_budget_rejected() {
        let cfg = GeomapConfig::default();
        let err = force_directed_theta(&[3.0, 3.0, 1.0], &cfg).unwrap_err();
        assert!(matches!(err, GeomapError::InfeasibleAngularBudget { .. }));
        assert!(err.to_string().starts_with("InfeasibleAngularBudget"));
    }

    #[test]
    fn importance_sums_events_and_points() {
        let pts = vec![point("a", 0.0, 0.0, 0.0, 1.0, "s"), point("a", 10.0, 1.0, 0.0, 1.0, "s")];
        let mut e1 = event("e1", 0.0, 1.0, 0.0, 0.0, "s");
        e1.importance = Some(2.0);
        let mut e2 = event("e2", 1.0, 2.0, 0.0, 0.0, "s");
        e2.importance = Some(3.0);
        let mut e3 = event("e3", 1.0, 2.0, 0.0, 0.0, "empty");
        e3.importance = Some(0.0);
        let cfg = IngestConfig { radius_clamp: crate::model::RadiusClamp { min: 0.0, max: 5.0 }, ..Default::default() };
        let ds = normalize_space_time(&pts, &[e1, e2, e3], &cfg).unwrap();
        assert_eq!(map_importance("s", &ds), 7.0);
        assert_eq!(map_importance("empty", &ds), 0.0);
        assert_eq!(map_importance("missing", &ds), 0.0);
    }

    #[test]
    fn overview_single_scenario_and_detail() {
        let pts = vec![point("a", 0.0, 0.0, 0.0, 1.0, "tva"), point("a", 1.0, 1.0, 1.0, 1.0, "tva")];
        let ds = normalize_space_time(&pts, &[], &IngestConfig::default()).unwrap();
        let placed = place_maps_overview(&ds, &GeomapConfig::default()).unwrap();
        assert_eq!(placed.len(), 1);
        assert_eq!(placed[0].rho, Some(2.0));
        assert_eq!(placed[0].theta, Some(0.0));
        assert_eq!(placed[0].center, [2.0, 0.0]);

        let detail = place_map_detail_by_id(&ds, "tva").unwrap();
        assert_eq!(detail.center, [0.0, 0.0]);
        assert_eq!(detail.mode, PlacementMode::Detail);
        assert_eq!(detail.half_extent, ds.scenarios[0].half_extent);
        assert_eq!(
            place_map_detail_by_id(&ds, "nope"),
            Err(GeomapError::UnknownScenario("nope".into()))
        );
    }
}
