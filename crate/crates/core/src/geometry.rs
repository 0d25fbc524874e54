//! Sphere membership and spline polylines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Vec3;

pub const DEFAULT_SAMPLES_PER_SEGMENT: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("DegenerateControls: controls {index} and {} coincide", index + 1)]
    DegenerateControls { index: usize },
    #[error("TooFewControls: need at least 2 controls, got {0}")]
    TooFewControls(usize),
    #[error("InvalidSampling: samples per segment must be at least 1")]
    InvalidSampling,
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// True iff `p` lies in the closed ball of `radius` around `center`.
pub fn point_event_membership(p: Vec3, center: Vec3, radius: f64) -> bool {
    distance(p, center) <= radius
}

/// A candidate bounding sphere for [`resolve_membership`].
#[derive(Debug, Clone, Copy)]
pub struct Sphere<'a> {
    pub id: &'a str,
    pub center: Vec3,
    pub radius: f64,
}

/// Picks the containing sphere whose center is nearest, ties to the smaller id.
///
/// Returns the index into `spheres`.
pub fn resolve_membership(p: Vec3, spheres: &[Sphere<'_>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in spheres.iter().enumerate() {
        let d = distance(p, s.center);
        if d > s.radius {
            continue;
        }
        best = match best {
            Some((j, bd)) if bd < d || (bd == d && spheres[j].id <= s.id) => Some((j, bd)),
            _ => Some((i, d)),
        };
    }
    best.map(|(i, _)| i)
}

/// One coordinate of a natural cubic spline over a shared knot vector.
#[derive(Debug, Clone)]
struct CubicPieces {
    // per segment: value, first, second and third coefficient
    coeffs: Vec<[f64; 4]>,
}

impl CubicPieces {
    /// Natural end conditions; `knots` strictly increasing, `values.len() == knots.len() >= 2`.
    fn fit(knots: &[f64], values: &[f64]) -> Self {
        let n = knots.len();
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        // Second derivatives at the knots; zero at both ends.
        let mut m = vec![0.0; n];
        if n > 2 {
            let inner = n - 2;
            let mut diag = vec![0.0; inner];
            let mut rhs = vec![0.0; inner];
            for i in 0..inner {
                let k = i + 1;
                diag[i] = 2.0 * (h[k - 1] + h[k]);
                rhs[i] = 6.0 * ((values[k + 1] - values[k]) / h[k] - (values[k] - values[k - 1]) / h[k - 1]);
            }
            // Thomas algorithm; off-diagonals are h[k-1] below and h[k] above.
            for i in 1..inner {
                let w = h[i] / diag[i - 1];
                diag[i] -= w * h[i];
                rhs[i] -= w * rhs[i - 1];
            }
            m[inner] = rhs[inner - 1] / diag[inner - 1];
            for i in (0..inner - 1).rev() {
                m[i + 1] = (rhs[i] - h[i + 1] * m[i + 2]) / diag[i];
            }
        }
        let coeffs = (0..n - 1)
            .map(|i| {
                let a = values[i];
                let b = (values[i + 1] - values[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
                let c = m[i] / 2.0;
                let d = (m[i + 1] - m[i]) / (6.0 * h[i]);
                [a, b, c, d]
            })
            .collect();
        Self { coeffs }
    }

    fn eval(&self, segment: usize, ds: f64) -> f64 {
        let [a, b, c, d] = self.coeffs[segment];
        a + ds * (b + ds * (c + ds * d))
    }
}

/// Natural cubic spline through 3D controls, parameterized by cumulative chord length.
#[derive(Debug, Clone)]
pub struct NaturalSpline3 {
    knots: Vec<f64>,
    axes: [CubicPieces; 3],
}

impl NaturalSpline3 {
    pub fn new(controls: &[Vec3]) -> Result<Self, GeometryError> {
        if controls.len() < 2 {
            return Err(GeometryError::TooFewControls(controls.len()));
        }
        let mut knots = Vec::with_capacity(controls.len());
        knots.push(0.0);
        for (i, w) in controls.windows(2).enumerate() {
            let chord = distance(w[0], w[1]);
            if chord == 0.0 {
                return Err(GeometryError::DegenerateControls { index: i });
            }
            knots.push(knots[i] + chord);
        }
        let axis = |k: usize| {
            let values: Vec<f64> = controls.iter().map(|c| c[k]).collect();
            CubicPieces::fit(&knots, &values)
        };
        Ok(Self { axes: [axis(0), axis(1), axis(2)], knots })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn length_parameter(&self) -> f64 {
        *self.knots.last().expect("at least two knots")
    }

    /// Evaluates at chord-length parameter `s`, clamped to the knot range.
    pub fn eval(&self, s: f64) -> Vec3 {
        let s = s.clamp(0.0, self.length_parameter());
        let seg = match self.knots.partition_point(|&k| k <= s) {
            0 => 0,
            i => (i - 1).min(self.knots.len() - 2),
        };
        self.eval_segment(seg, s - self.knots[seg])
    }

    fn eval_segment(&self, seg: usize, ds: f64) -> Vec3 {
        [self.axes[0].eval(seg, ds), self.axes[1].eval(seg, ds), self.axes[2].eval(seg, ds)]
    }
}

/// Sampled rendering of a character or event line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline3D {
    pub source_id: String,
    pub samples: Vec<Vec3>,
}

/// Samples a natural cubic spline through `controls`.
///
/// Produces `(n - 1) * samples_per_segment + 1` samples for `n` controls; the
/// sample at every knot is the control point itself.
pub fn cubic_spline(
    source_id: &str,
    controls: &[Vec3],
    samples_per_segment: usize,
) -> Result<Polyline3D, GeometryError> {
    if samples_per_segment == 0 {
        return Err(GeometryError::InvalidSampling);
    }
    let spline = NaturalSpline3::new(controls)?;
    let mut samples = Vec::with_capacity((controls.len() - 1) * samples_per_segment + 1);
    for (seg, control) in controls.iter().enumerate().take(controls.len() - 1) {
        samples.push(*control);
        let h = spline.knots[seg + 1] - spline.knots[seg];
        for k in 1..samples_per_segment {
            let ds = h * k as f64 / samples_per_segment as f64;
            samples.push(spline.eval_segment(seg, ds));
        }
    }
    samples.push(*controls.last().expect("at least two controls"));
    Ok(Polyline3D { source_id: source_id.to_owned(), samples })
}

/// Drops controls that coincide with their predecessor; returns the kept indices.
pub fn dedup_controls(controls: &[Vec3]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::with_capacity(controls.len());
    for (i, c) in controls.iter().enumerate() {
        match kept.last() {
            Some(&j) if distance(controls[j], *c) == 0.0 => {
                log::warn!("merging coincident spline control {i} into {j}");
            }
            _ => kept.push(i),
        }
    }
    kept
}

/// Portions of a polyline inside a closed ball, as separate pieces.
///
/// Segment ends are cut at the sphere boundary; pieces shorter than two
/// distinct points are dropped.
pub fn clip_polyline_to_sphere(samples: &[Vec3], center: Vec3, radius: f64) -> Vec<Vec<Vec3>> {
    let mut pieces: Vec<Vec<Vec3>> = Vec::new();
    let mut current: Vec<Vec3> = Vec::new();
    let lerp = |a: Vec3, b: Vec3, s: f64| {
        [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s, a[2] + (b[2] - a[2]) * s]
    };
    let mut flush = |current: &mut Vec<Vec3>| {
        let piece = std::mem::take(current);
        if piece.len() >= 2 && piece.windows(2).any(|w| w[0] != w[1]) {
            pieces.push(piece);
        }
    };
    for w in samples.windows(2) {
        let (a, b) = (w[0], w[1]);
        let Some((s0, s1)) = segment_ball_interval(a, b, center, radius) else {
            flush(&mut current);
            continue;
        };
        let start = if s0 <= 0.0 { a } else { lerp(a, b, s0) };
        let end = if s1 >= 1.0 { b } else { lerp(a, b, s1) };
        if s0 > 0.0 {
            flush(&mut current);
        }
        if current.last() != Some(&start) {
            current.push(start);
        }
        current.push(end);
        if s1 < 1.0 {
            flush(&mut current);
        }
    }
    flush(&mut current);
    pieces
}

/// Parameter range `[s0, s1] ⊂ [0, 1]` of segment `a→b` inside the ball.
fn segment_ball_interval(a: Vec3, b: Vec3, c: Vec3, r: f64) -> Option<(f64, f64)> {
    let d = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let f = [a[0] - c[0], a[1] - c[1], a[2] - c[2]];
    let qa = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    let qb = 2.0 * (f[0] * d[0] + f[1] * d[1] + f[2] * d[2]);
    let qc = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] - r * r;
    if qa == 0.0 {
        return (qc <= 0.0).then_some((0.0, 1.0));
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let s0 = ((-qb - root) / (2.0 * qa)).max(0.0);
    let s1 = ((-qb + root) / (2.0 * qa)).min(1.0);
    (s0 <= s1).then_some((s0, s1))
}
