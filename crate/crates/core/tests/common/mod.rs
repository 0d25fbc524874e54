//! Independent reference implementations and random instance generators
//! shared by the acceptance suite and the property tests.
//!
//! The oracles below are deliberately naive: all-pairs scans, selection
//! instead of sorting, and counting instead of ranking.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use threedsl_core::layout::time::{LayoutEvent, LayoutPoint};

#[derive(Debug, Clone)]
pub struct Ev {
    pub id: String,
    pub scenario: String,
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct Pt {
    pub character: String,
    pub scenario: String,
    pub t: f64,
    pub pos: [f64; 3],
}

pub fn layout_events(events: &[Ev]) -> Vec<LayoutEvent<'_>> {
    events
        .iter()
        .map(|e| LayoutEvent { id: &e.id, scenario: &e.scenario, center: e.center, radius: e.radius })
        .collect()
}

pub fn layout_points(points: &[Pt]) -> Vec<LayoutPoint<'_>> {
    points
        .iter()
        .map(|p| LayoutPoint { character_id: &p.character, scenario: &p.scenario, t: p.t, position: p.pos })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleLayout {
    pub event_y: Vec<f64>,
    pub point_y: Vec<f64>,
    pub membership: Vec<Option<usize>>,
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// All-pairs membership: the nearest same-scenario sphere whose boundary
/// contains the point, ties broken by the smaller event id.
pub fn oracle_membership(events: &[Ev], points: &[Pt]) -> Vec<Option<usize>> {
    let mut out = Vec::with_capacity(points.len());
    for p in points {
        let mut best: Option<(f64, usize)> = None;
        for (j, e) in events.iter().enumerate() {
            if e.scenario != p.scenario {
                continue;
            }
            let d = dist(p.pos, e.center);
            if d > e.radius {
                continue;
            }
            best = match best {
                None => Some((d, j)),
                Some((bd, bj)) => {
                    if d < bd || (d == bd && e.id < events[bj].id) {
                        Some((d, j))
                    } else {
                        Some((bd, bj))
                    }
                }
            };
        }
        out.push(best.map(|(_, j)| j));
    }
    out
}

/// Chronological order by selection: smallest (center y, id) first.
pub fn oracle_event_order(events: &[Ev]) -> Vec<usize> {
    let mut used = vec![false; events.len()];
    let mut order = Vec::with_capacity(events.len());
    for _ in 0..events.len() {
        let mut pick: Option<usize> = None;
        for j in 0..events.len() {
            if used[j] {
                continue;
            }
            pick = match pick {
                None => Some(j),
                Some(k) => {
                    let (a, b) = (events[j].center[1], events[k].center[1]);
                    if a < b || (a == b && events[j].id < events[k].id) {
                        Some(j)
                    } else {
                        Some(k)
                    }
                }
            };
        }
        let j = pick.unwrap();
        used[j] = true;
        order.push(j);
    }
    order
}

/// Brute-force time layout written directly from the sum formulas.
pub fn oracle_layout(events: &[Ev], points: &[Pt], delta_e: f64, y0: f64) -> OracleLayout {
    let order = oracle_event_order(events);
    let m = order.len();

    // new centers: y0 plus the running sum of gap + both radii
    let mut event_y = vec![0.0; events.len()];
    for j in 0..m {
        let mut s = 0.0;
        for tau in 0..j {
            s += delta_e + events[order[tau]].radius + events[order[tau + 1]].radius;
        }
        event_y[order[j]] = y0 + s;
    }

    let membership = oracle_membership(events, points);
    let mut point_y = vec![0.0; points.len()];

    for (p, m) in membership.iter().enumerate() {
        let Some(e) = *m else { continue };
        let xi = events[e].radius;
        let count = membership.iter().filter(|q| **q == Some(e)).count();
        let mut index = 0usize;
        for (q, mq) in membership.iter().enumerate() {
            if *mq != Some(e) || q == p {
                continue;
            }
            let (a, b) = (&points[q], &points[p]);
            let before = a.t < b.t || (a.t == b.t && (a.character < b.character || (a.character == b.character && q < p)));
            if before {
                index += 1;
            }
        }
        let step = 2.0 * xi / count as f64;
        let mid = (count as f64 - 1.0) / 2.0;
        point_y[p] = event_y[e] + (index as f64 - mid) * step;
    }

    // anchors in chronological order, equal old centers averaged
    let mut anchors: Vec<(f64, f64)> = Vec::new();
    let mut k = 0;
    while k < m {
        let old = events[order[k]].center[1];
        let mut sum = 0.0;
        let mut n = 0;
        while k < m && events[order[k]].center[1] == old {
            sum += event_y[order[k]];
            n += 1;
            k += 1;
        }
        anchors.push((old, sum / n as f64));
    }
    for (p, mem) in membership.iter().enumerate() {
        if mem.is_some() {
            continue;
        }
        point_y[p] = oracle_anchor_eval(&anchors, points[p].pos[1]);
    }

    OracleLayout { event_y, point_y, membership }
}

/// Piecewise-linear interpolation through `(old, new)` knots, slope one outside.
pub fn oracle_anchor_eval(anchors: &[(f64, f64)], y: f64) -> f64 {
    if anchors.is_empty() {
        return y;
    }
    for &(old, new) in anchors {
        if old == y {
            return new;
        }
    }
    let first = anchors[0];
    let last = anchors[anchors.len() - 1];
    if y < first.0 {
        return y + (first.1 - first.0);
    }
    if y > last.0 {
        return y + (last.1 - last.0);
    }
    for w in anchors.windows(2) {
        let ((o0, n0), (o1, n1)) = (w[0], w[1]);
        if o0 < y && y < o1 {
            return n0 + (y - o0) * (n1 - n0) / (o1 - o0);
        }
    }
    unreachable!("y lies between two anchors")
}

fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    // multiples of 1/8 keep sums and boundary distances exact
    let steps = ((hi - lo) * 8.0) as i64;
    lo + rng.random_range(0..=steps) as f64 / 8.0
}

fn coord(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if rng.random_bool(0.5) {
        grid(rng, lo, hi)
    } else {
        rng.random_range(lo..hi)
    }
}

/// Random layout instance with boundary and tie cases mixed in.
///
/// Points are drawn inside spheres, exactly on a sphere surface along an
/// axis, at the midpoint of two mirrored sphere centers, or anywhere.
pub fn random_instance(rng: &mut ChaCha8Rng, max_events: usize, max_points: usize) -> (Vec<Ev>, Vec<Pt>) {
    let n_events = rng.random_range(0..=max_events);
    let n_points = rng.random_range(0..=max_points.saturating_sub(max_events / 2));
    let scenarios = ["s0", "s1"];
    let mut events: Vec<Ev> = Vec::with_capacity(n_events);
    while events.len() < n_events {
        let scenario = scenarios[rng.random_range(0..2)].to_string();
        let center = [coord(rng, -2.0, 2.0), coord(rng, 0.0, 10.0), coord(rng, -2.0, 2.0)];
        let radius = if rng.random_bool(0.5) { grid(rng, 0.125, 1.5) } else { rng.random_range(0.05..1.5) };
        if rng.random_bool(0.2) && events.len() + 2 <= n_events {
            // mirrored pair around the center along x
            let a = grid(rng, 0.125, 1.0);
            for (sign, suffix) in [(-1.0, "a"), (1.0, "b")] {
                events.push(Ev {
                    id: format!("e{}{}", events.len(), suffix),
                    scenario: scenario.clone(),
                    center: [center[0] + sign * a, center[1], center[2]],
                    radius: radius.max(a),
                });
            }
            continue;
        }
        events.push(Ev { id: format!("e{}", events.len()), scenario, center, radius });
    }

    let characters = ["ana", "bo", "cy"];
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let character = characters[rng.random_range(0..3)].to_string();
        let t = if rng.random_bool(0.3) { rng.random_range(0..5) as f64 } else { rng.random_range(0.0..100.0) };
        let roll: f64 = rng.random();
        let (scenario, pos) = if events.is_empty() || roll < 0.25 {
            let s = scenarios[rng.random_range(0..2)].to_string();
            (s, [coord(rng, -3.0, 3.0), coord(rng, -1.0, 11.0), coord(rng, -3.0, 3.0)])
        } else {
            let e = &events[rng.random_range(0..events.len())];
            let c = e.center;
            let pos = if roll < 0.6 {
                let u = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let scale = e.radius * rng.random_range(0.0..1.0) / 3f64.sqrt();
                [c[0] + u[0] * scale, c[1] + u[1] * scale, c[2] + u[2] * scale]
            } else if roll < 0.85 {
                let axis = rng.random_range(0..3);
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let mut p = c;
                p[axis] += sign * e.radius;
                p
            } else {
                c
            };
            (e.scenario.clone(), pos)
        };
        points.push(Pt { character, scenario, t, pos });
    }
    // mirrored-pair midpoints: equidistant from both centers
    let pairs: Vec<(usize, usize)> = (0..events.len())
        .filter(|&i| events[i].id.ends_with('a'))
        .map(|i| (i, i + 1))
        .collect();
    for (i, j) in pairs {
        if rng.random_bool(0.7) {
            let (a, b) = (events[i].center, events[j].center);
            points.push(Pt {
                character: "tie".into(),
                scenario: events[i].scenario.clone(),
                t: 1.0,
                pos: [(a[0] + b[0]) / 2.0, a[1], a[2]],
            });
        }
    }
    (events, points)
}

/// Radii in `[0, max]`, with exact zeros and grid values mixed in.
pub fn random_radii(rng: &mut ChaCha8Rng, n: usize, max: f64) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.random_range(0..4) {
            0 => 0.0,
            1 => grid(rng, 0.0, max),
            _ => rng.random_range(0.0..=max),
        })
        .collect()
}
