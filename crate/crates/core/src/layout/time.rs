//! Time-axis relayout of event spheres and character points.
//!
//! The layout runs in three steps:
//!
//! 1. Event spheres are re-spaced so that the gap between the boundaries of
//!    consecutive spheres is exactly `delta_e`.
//! 2. Points inside a sphere follow their sphere, then are spread evenly
//!    along the sphere's vertical diameter in time order.
//! 3. Points outside every sphere are moved by a monotone piecewise-linear
//!    map built from the old and new sphere centers.
//!
//! Only `y` changes; ground coordinates are never touched.

use serde::{Deserialize, Serialize};

use crate::geometry::{resolve_membership, Sphere};
use crate::model::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeLayoutParams {
    /// Gap between the boundaries of consecutive spheres.
    pub delta_e: f64,
    /// New center of the earliest sphere.
    pub y0: f64,
}

impl Default for TimeLayoutParams {
    fn default() -> Self {
        Self { delta_e: 0.2, y0: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutEvent<'a> {
    pub id: &'a str,
    pub scenario: &'a str,
    pub center: Vec3,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutPoint<'a> {
    pub character_id: &'a str,
    pub scenario: &'a str,
    /// Raw time, used to order points that share a sphere.
    pub t: f64,
    pub position: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeLayoutResult {
    /// New center `y` per input event.
    pub event_y: Vec<f64>,
    /// Final `y` per input point.
    pub point_y: Vec<f64>,
    /// `y` after following the sphere, before the in-sphere spreading; members only.
    pub shifted_y: Vec<Option<f64>>,
    /// Index of the containing event per input point.
    pub membership: Vec<Option<usize>>,
    pub anchors: AnchorMap,
}

/// Chronological order of events: by center `y`, ties by id.
pub fn event_order(events: &[LayoutEvent<'_>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&a, &b| {
        events[a].center[1]
            .total_cmp(&events[b].center[1])
            .then_with(|| events[a].id.cmp(events[b].id))
    });
    order
}

/// New sphere centers for radii given in chronological order.
///
/// `y'_j = y0 + Σ_{τ<j} (Δe + ξ_τ + ξ_{τ+1})`, so consecutive boundaries are
/// exactly `delta_e` apart.
pub fn reposition_event_spheres(radii: &[f64], params: &TimeLayoutParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(radii.len());
    let mut acc = 0.0;
    for (j, _) in radii.iter().enumerate() {
        if j > 0 {
            acc += params.delta_e + radii[j - 1] + radii[j];
        }
        out.push(params.y0 + acc);
    }
    out
}

/// Moves a member point by the displacement of its sphere.
pub fn shift_member_point(y: f64, old_center: f64, new_center: f64) -> f64 {
    y + (new_center - old_center)
}

/// Shifts every member point; non-members map to `None`.
pub fn shift_member_points(
    ys: &[f64],
    membership: &[Option<usize>],
    old_centers: &[f64],
    new_centers: &[f64],
) -> Vec<Option<f64>> {
    ys.iter()
        .zip(membership)
        .map(|(&y, m)| m.map(|e| shift_member_point(y, old_centers[e], new_centers[e])))
        .collect()
}

/// Spreads `members` (raw time, character id) evenly inside a sphere.
///
/// Members are ranked by time, then character id, then input position; the
/// member of rank `k` lands at `center + (k - (N-1)/2) * 2ξ/N`. The output
/// is aligned with the input.
pub fn sequentialize_points_in_sphere(center: f64, radius: f64, members: &[(f64, &str)]) -> Vec<f64> {
    let n = members.len();
    let mut rank: Vec<usize> = (0..n).collect();
    rank.sort_by(|&a, &b| {
        members[a]
            .0
            .total_cmp(&members[b].0)
            .then_with(|| members[a].1.cmp(members[b].1))
    });
    let step = 2.0 * radius / n as f64;
    let mid = (n as f64 - 1.0) / 2.0;
    let mut out = vec![0.0; n];
    for (k, &i) in rank.iter().enumerate() {
        out[i] = center + (k as f64 - mid) * step;
    }
    out
}

/// Monotone piecewise-linear map from old to new `y`.
///
/// Outside the anchor range the map continues with slope one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnchorMap {
    anchors: Vec<(f64, f64)>,
}

impl AnchorMap {
    /// Builds the map from `(old, new)` pairs sorted by `old`.
    ///
    /// Pairs sharing an `old` value collapse into one anchor at the mean of
    /// their `new` values.
    pub fn from_sorted_pairs(pairs: &[(f64, f64)]) -> Self {
        let mut anchors: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
        let mut i = 0;
        while i < pairs.len() {
            let old = pairs[i].0;
            let mut sum = 0.0;
            let mut count = 0usize;
            while i < pairs.len() && pairs[i].0 == old {
                sum += pairs[i].1;
                count += 1;
                i += 1;
            }
            anchors.push((old, sum / count as f64));
        }
        Self { anchors }
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    pub fn eval(&self, y: f64) -> f64 {
        let (Some(first), Some(last)) = (self.anchors.first(), self.anchors.last()) else {
            return y;
        };
        let i = self.anchors.partition_point(|a| a.0 <= y);
        if i == 0 {
            return y + (first.1 - first.0);
        }
        let (old, new) = self.anchors[i - 1];
        if old == y {
            return new;
        }
        if i == self.anchors.len() {
            return y + (last.1 - last.0);
        }
        let (old1, new1) = self.anchors[i];
        new + (y - old) * (new1 - new) / (old1 - old)
    }
}

pub fn shift_unaffiliated_points(ys: &[f64], map: &AnchorMap) -> Vec<f64> {
    ys.iter().map(|&y| map.eval(y)).collect()
}

/// Membership of each point: nearest containing sphere of the same scenario.
pub fn assign_membership(events: &[LayoutEvent<'_>], points: &[LayoutPoint<'_>]) -> Vec<Option<usize>> {
    let mut by_scenario: std::collections::HashMap<&str, (Vec<usize>, Vec<Sphere<'_>>)> =
        std::collections::HashMap::new();
    for (i, e) in events.iter().enumerate() {
        let entry = by_scenario.entry(e.scenario).or_default();
        entry.0.push(i);
        entry.1.push(Sphere { id: e.id, center: e.center, radius: e.radius });
    }
    points
        .iter()
        .map(|p| {
            let (idx, spheres) = by_scenario.get(p.scenario)?;
            resolve_membership(p.position, spheres).map(|k| idx[k])
        })
        .collect()
}

/// Runs the full three-step layout on one view's events and points.
pub fn optimize_time_layout(
    events: &[LayoutEvent<'_>],
    points: &[LayoutPoint<'_>],
    params: &TimeLayoutParams,
) -> TimeLayoutResult {
    let membership = assign_membership(events, points);

    let order = event_order(events);
    let radii: Vec<f64> = order.iter().map(|&i| events[i].radius).collect();
    let placed = reposition_event_spheres(&radii, params);
    let old_centers: Vec<f64> = events.iter().map(|e| e.center[1]).collect();
    let mut event_y = vec![0.0; events.len()];
    for (&i, &y) in order.iter().zip(&placed) {
        event_y[i] = y;
    }

    let ys: Vec<f64> = points.iter().map(|p| p.position[1]).collect();
    let shifted_y = shift_member_points(&ys, &membership, &old_centers, &event_y);

    let mut point_y = ys.clone();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); events.len()];
    for (p, m) in membership.iter().enumerate() {
        if let Some(e) = m {
            members[*e].push(p);
        }
    }
    for (e, group) in members.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        let keys: Vec<(f64, &str)> = group.iter().map(|&p| (points[p].t, points[p].character_id)).collect();
        let spread = sequentialize_points_in_sphere(event_y[e], events[e].radius, &keys);
        for (&p, y) in group.iter().zip(spread) {
            point_y[p] = y;
        }
    }

    let pairs: Vec<(f64, f64)> = order.iter().map(|&i| (old_centers[i], event_y[i])).collect();
    let anchors = AnchorMap::from_sorted_pairs(&pairs);
    for (p, m) in membership.iter().enumerate() {
        if m.is_none() {
            point_y[p] = anchors.eval(ys[p]);
        }
    }

    TimeLayoutResult { event_y, point_y, shifted_y, membership, anchors }
}
