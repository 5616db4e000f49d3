//! Euclidean circle packings of triangulated disks.
//!
//! A stage is opened at one face, every other non-triangular face is starred
//! from a new centre vertex, and interior radii are adjusted until each
//! interior angle sum is 2π. Boundary radii stay fixed.

mod svg;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tiling::Tiling;

pub use svg::{render_svg, EdgeStyle, SvgStyle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PackError {
    #[error("tiling is not a sphere (components {components}, Euler characteristic {chi})")]
    NotASphere { components: usize, chi: i64 },
    #[error("face {0} does not exist")]
    NoSuchFace(usize),
    #[error("complex is not a triangulated disk: {0}")]
    NotADisk(String),
    #[error("interior vertex {vertex} has valence {valence}; at least 3 is required")]
    Valence { vertex: usize, valence: usize },
    #[error("no convergence after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("boundary radius of vertex {0} must be positive")]
    BadRadius(usize),
    #[error("packing is empty")]
    Empty,
}

/// Where a vertex of the packing complex comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "id")]
pub enum Origin {
    Vertex(usize),
    Centre(usize),
}

/// A triangulated disk with fixed boundary radii.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingProblem {
    /// Counter-clockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary vertices in cyclic order.
    pub boundary: Vec<usize>,
    pub boundary_radius: Vec<f64>,
    pub origin: Vec<Origin>,
    /// Edges of the source tiling, as packing vertex pairs.
    pub tiling_edges: Vec<(usize, usize)>,
    interior: Vec<bool>,
    /// Petals of every interior vertex as an open or closed fan.
    petals: Vec<Vec<usize>>,
}

impl PackingProblem {
    /// Builds a problem from counter-clockwise triangles. Boundary radii
    /// default to 1.
    pub fn new(vertex_count: usize, triangles: Vec<[usize; 3]>) -> Result<Self, PackError> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, t) in triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || t.iter().any(|&v| v >= vertex_count) {
                return Err(PackError::NotADisk(format!("triangle {i} is degenerate")));
            }
            for k in 0..3 {
                if directed.insert((t[k], t[(k + 1) % 3]), i).is_some() {
                    return Err(PackError::NotADisk(format!(
                        "edge {}-{} is used twice in one direction",
                        t[k],
                        t[(k + 1) % 3]
                    )));
                }
            }
        }
        let mut next_on_boundary: BTreeMap<usize, usize> = BTreeMap::new();
        for &(u, v) in directed.keys() {
            if !directed.contains_key(&(v, u)) && next_on_boundary.insert(v, u).is_some() {
                return Err(PackError::NotADisk(format!("boundary pinches at vertex {v}")));
            }
        }
        let Some((&start, _)) = next_on_boundary.iter().next() else {
            return Err(PackError::NotADisk("no boundary".into()));
        };
        let mut boundary = vec![start];
        let mut v = next_on_boundary[&start];
        while v != start {
            boundary.push(v);
            v = next_on_boundary[&v];
        }
        if boundary.len() != next_on_boundary.len() {
            return Err(PackError::NotADisk("boundary has several components".into()));
        }
        let used: std::collections::BTreeSet<usize> = triangles.iter().flatten().copied().collect();
        if used.len() != vertex_count {
            return Err(PackError::NotADisk("isolated vertex".into()));
        }
        let edges = (directed.len() + boundary.len()) / 2;
        let chi = vertex_count as i64 - edges as i64 + triangles.len() as i64;
        if chi != 1 {
            return Err(PackError::NotADisk(format!("Euler characteristic {chi}")));
        }

        let mut interior = vec![true; vertex_count];
        for &b in &boundary {
            interior[b] = false;
        }
        // Walk the fan around each vertex: w follows u when (v, u, w) is a triangle.
        let mut after: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                after.insert((t[k], t[(k + 1) % 3]), t[(k + 2) % 3]);
            }
        }
        let mut first_petal: Vec<Option<usize>> = vec![None; vertex_count];
        for t in &triangles {
            for k in 0..3 {
                first_petal[t[k]].get_or_insert(t[(k + 1) % 3]);
            }
        }
        for (i, &b) in boundary.iter().enumerate() {
            first_petal[b] = Some(boundary[(i + boundary.len() - 1) % boundary.len()]);
        }
        let mut petals = vec![Vec::new(); vertex_count];
        for v in 0..vertex_count {
            let start = first_petal[v].expect("every vertex lies on a triangle");
            let mut fan = vec![start];
            let mut u = start;
            while let Some(&w) = after.get(&(v, u)) {
                if w == start {
                    break;
                }
                fan.push(w);
                u = w;
            }
            if interior[v] && fan.len() < 3 {
                return Err(PackError::Valence { vertex: v, valence: fan.len() });
            }
            petals[v] = fan;
        }
        Ok(PackingProblem {
            triangles,
            boundary_radius: vec![1.0; vertex_count],
            origin: (0..vertex_count).map(Origin::Vertex).collect(),
            tiling_edges: Vec::new(),
            boundary,
            interior,
            petals,
        })
    }

    /// One interior vertex surrounded by `k` boundary vertices.
    pub fn flower(k: usize) -> Result<Self, PackError> {
        let triangles = (0..k).map(|i| [0, 1 + i, 1 + (i + 1) % k]).collect();
        PackingProblem::new(k + 1, triangles)
    }

    pub fn vertex_count(&self) -> usize {
        self.interior.len()
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| self.interior[v])
    }

    /// Neighbours of `v` in rotational order.
    pub fn petals(&self, v: usize) -> &[usize] {
        &self.petals[v]
    }

    pub fn set_boundary_radius(&mut self, v: usize, r: f64) -> Result<(), PackError> {
        if !(r > 0.0) || self.interior[v] {
            return Err(PackError::BadRadius(v));
        }
        self.boundary_radius[v] = r;
        Ok(())
    }

    /// Sum of the angles at `v` of the triangles around it.
    pub fn angle_sum(&self, radii: &[f64], v: usize) -> f64 {
        let fan = &self.petals[v];
        let closed = self.interior[v];
        let pairs = if closed { fan.len() } else { fan.len() - 1 };
        (0..pairs).map(|i| corner_angle(radii[v], radii[fan[i]], radii[fan[(i + 1) % fan.len()]])).sum()
    }
}

/// Angle at the circle of radius `r` in the triangle of mutually tangent
/// circles with radii `r`, `a`, `b`.
pub fn corner_angle(r: f64, a: f64, b: f64) -> f64 {
    let c = 1.0 - 2.0 * a * b / ((r + a) * (r + b));
    c.clamp(-1.0, 1.0).acos()
}

/// Opens the sphere `t` at `removed_face` and triangulates what is left.
pub fn triangulate(t: &Tiling, removed_face: usize) -> Result<PackingProblem, PackError> {
    if !t.is_sphere() {
        return Err(PackError::NotASphere { components: t.component_count(), chi: t.euler_characteristic() });
    }
    if removed_face >= t.face_count() {
        return Err(PackError::NoSuchFace(removed_face));
    }
    let mut origin: Vec<Origin> = (0..t.vertex_count()).map(Origin::Vertex).collect();
    let mut triangles = Vec::new();
    for f in (0..t.face_count()).filter(|&f| f != removed_face) {
        let vs = t.face_vertices(f);
        if vs.len() == 3 {
            triangles.push([vs[0], vs[1], vs[2]]);
            continue;
        }
        let c = origin.len();
        origin.push(Origin::Centre(f));
        for i in 0..vs.len() {
            triangles.push([vs[i], vs[(i + 1) % vs.len()], c]);
        }
    }
    let mut p = PackingProblem::new(origin.len(), triangles)?;
    p.origin = origin;
    p.tiling_edges = (0..t.edge_count()).map(|e| t.edge_endpoints(e)).collect();
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackedCircle {
    pub vertex: usize,
    pub radius: f64,
    pub x: f64,
    pub y: f64,
}

/// Radii and centres of a packing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingLabel {
    pub radii: Vec<f64>,
    pub centers: Vec<[f64; 2]>,
    /// Largest |angle sum - 2π| over interior vertices.
    pub residual: f64,
    pub iterations: usize,
}

impl PackingLabel {
    pub fn circles(&self) -> Vec<PackedCircle> {
        self.radii
            .iter()
            .zip(&self.centers)
            .enumerate()
            .map(|(vertex, (&radius, c))| PackedCircle { vertex, radius, x: c[0], y: c[1] })
            .collect()
    }

    /// Largest deviation of a triangle side from the sum of its radii.
    pub fn tangency_error(&self, p: &PackingProblem) -> f64 {
        let mut worst: f64 = 0.0;
        for t in &p.triangles {
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let d = (self.centers[u][0] - self.centers[v][0]).hypot(self.centers[u][1] - self.centers[v][1]);
                worst = worst.max((d - self.radii[u] - self.radii[v]).abs());
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PackOptions {
    pub tolerance: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor applied to log-radius updates.
    pub relaxation: f64,
    /// Newton steps taken after the sweeps converge, to tighten the layout.
    pub polish_steps: usize,
}

impl Default for PackOptions {
    fn default() -> Self {
        PackOptions { tolerance: 1e-8, max_sweeps: 1_000_000, relaxation: 1.8, polish_steps: 8 }
    }
}

fn residual(p: &PackingProblem, radii: &[f64]) -> f64 {
    p.interior_vertices().map(|v| (p.angle_sum(radii, v) - 2.0 * PI).abs()).fold(0.0, f64::max)
}

/// Packs `p` with the default options and the given tolerance.
pub fn pack(p: &PackingProblem, tolerance: f64) -> Result<PackingLabel, PackError> {
    pack_with(p, PackOptions { tolerance, ..PackOptions::default() })
}

pub fn pack_with(p: &PackingProblem, opts: PackOptions) -> Result<PackingLabel, PackError> {
    if !(opts.tolerance > 0.0) {
        return Err(PackError::Tolerance(opts.tolerance));
    }
    let mut radii = p.boundary_radius.clone();
    let interior: Vec<usize> = p.interior_vertices().collect();
    let mut sweeps = 0;
    let mut res = residual(p, &radii);
    while res > opts.tolerance {
        if sweeps == opts.max_sweeps {
            return Err(PackError::NotConverged { iterations: sweeps, residual: res });
        }
        for &v in &interior {
            let k = p.petals[v].len() as f64;
            let theta = p.angle_sum(&radii, v);
            // Radius a ring of k equal neighbours would need to reproduce
            // theta, then the radius that ring needs for 2π.
            let beta = (theta / (2.0 * k)).sin();
            let delta = (PI / k).sin();
            let uniform = radii[v] * beta / (1.0 - beta);
            let target = uniform * (1.0 - delta) / delta;
            let step = opts.relaxation * (target.ln() - radii[v].ln());
            let candidate = (radii[v].ln() + step).exp();
            radii[v] = if candidate.is_finite() && candidate > 0.0 { candidate } else { target };
        }
        sweeps += 1;
        res = residual(p, &radii);
    }
    for _ in 0..opts.polish_steps {
        if res < 1e-14 {
            break;
        }
        let Some(next) = newton_step(p, &radii) else { break };
        let next_res = residual(p, &next);
        if !(next_res < res) {
            break;
        }
        radii = next;
        res = next_res;
    }
    let centers = layout(p, &radii);
    Ok(PackingLabel { radii, centers, residual: res, iterations: sweeps })
}

/// Derivatives of the angle at circle `r` with respect to the log radii
/// of `r`, `a` and `b`.
fn corner_gradient(r: f64, a: f64, b: f64) -> [f64; 3] {
    let p = (r + a) * (r + b);
    let sin = corner_angle(r, a, b).sin().max(1e-300);
    let dr = 2.0 * a * b * (2.0 * r + a + b) / (p * p);
    let da = -2.0 * r * b / (p * (r + a));
    let db = -2.0 * r * a / (p * (r + b));
    [-r * dr / sin, -a * da / sin, -b * db / sin]
}

/// One Newton step on the interior log radii, solved by conjugate gradients.
fn newton_step(p: &PackingProblem, radii: &[f64]) -> Option<Vec<f64>> {
    let interior: Vec<usize> = p.interior_vertices().collect();
    let mut slot = vec![usize::MAX; p.vertex_count()];
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }
    let n = interior.len();
    // Negated Jacobian rows as (column, value) lists.
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, &v) in interior.iter().enumerate() {
        let fan = &p.petals[v];
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for k in 0..fan.len() {
            let (a, b) = (fan[k], fan[(k + 1) % fan.len()]);
            let g = corner_gradient(radii[v], radii[a], radii[b]);
            for (w, d) in [(v, g[0]), (a, g[1]), (b, g[2])] {
                if slot[w] != usize::MAX {
                    *acc.entry(slot[w]).or_default() -= d;
                }
            }
        }
        rows[i] = acc.into_iter().collect();
    }
    let rhs: Vec<f64> = interior.iter().map(|&v| p.angle_sum(radii, v) - 2.0 * PI).collect();
    let apply = |x: &[f64]| -> Vec<f64> { rows.iter().map(|row| row.iter().map(|&(j, a)| a * x[j]).sum()).collect() };
    let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let target = rr * 1e-28;
    for _ in 0..(4 * n).max(50) {
        if rr <= target {
            break;
        }
        let ad = apply(&d);
        let dad = dot(&d, &ad);
        if !(dad > 0.0) {
            return None;
        }
        let alpha = rr / dad;
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        let next = dot(&r, &r);
        let beta = next / rr;
        rr = next;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    let mut out = radii.to_vec();
    for (i, &v) in interior.iter().enumerate() {
        out[v] = radii[v] * x[i].exp();
    }
    out.iter().all(|r| r.is_finite() && *r > 0.0).then_some(out)
}

/// Places triangles breadth-first from triangle 0.
fn layout(p: &PackingProblem, radii: &[f64]) -> Vec<[f64; 2]> {
    let n = p.vertex_count();
    let mut centers: Vec<Option<[f64; 2]>> = vec![None; n];
    let Some(first) = p.triangles.first() else {
        return Vec::new();
    };
    let [a, b, _] = *first;
    centers[a] = Some([0.0, 0.0]);
    centers[b] = Some([radii[a] + radii[b], 0.0]);
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, t) in p.triangles.iter().enumerate() {
        for k in 0..3 {
            by_edge.insert((t[k], t[(k + 1) % 3]), i);
        }
    }
    let mut done = vec![false; p.triangles.len()];
    let mut queue = VecDeque::from([0usize]);
    done[0] = true;
    while let Some(i) = queue.pop_front() {
        let t = p.triangles[i];
        for k in 0..3 {
            let (u, v, w) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            if centers[w].is_none() {
                if let (Some(cu), Some(cv)) = (centers[u], centers[v]) {
                    centers[w] = Some(third_center(cu, cv, radii[u], radii[v], radii[w]));
                }
            }
        }
        for k in 0..3 {
            if let Some(&j) = by_edge.get(&(t[(k + 1) % 3], t[k])) {
                if !done[j] {
                    done[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    centers.into_iter().map(|c| c.unwrap_or([0.0, 0.0])).collect()
}

/// Centre of the circle tangent to the circles at `cu` and `cv`, on the
/// left of the direction from `cu` to `cv`.
fn third_center(cu: [f64; 2], cv: [f64; 2], ru: f64, rv: f64, rw: f64) -> [f64; 2] {
    let alpha = corner_angle(ru, rv, rw);
    let (dx, dy) = (cv[0] - cu[0], cv[1] - cu[1]);
    let len = dx.hypot(dy);
    let (ux, uy) = (dx / len, dy / len);
    let (s, c) = alpha.sin_cos();
    let d = ru + rw;
    [cu[0] + d * (ux * c - uy * s), cu[1] + d * (ux * s + uy * c)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_angle_of_equal_circles() {
        assert!((corner_angle(1.0, 1.0, 1.0) - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn flower_petals_are_fans() {
        let p = PackingProblem::flower(5).unwrap();
        assert_eq!(p.petals(0).len(), 5);
        assert!(p.is_interior(0));
        assert_eq!(p.boundary.len(), 5);
        assert_eq!(p.petals(1).len(), 3);
    }

    #[test]
    fn small_disks() {
        let tris = vec![[0, 1, 3], [3, 1, 2], [0, 3, 2]];
        let p = PackingProblem::new(4, tris).unwrap();
        assert!(p.is_interior(3));
        let bad = PackingProblem::new(4, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        assert!(!bad.is_interior(0));
    }
}
