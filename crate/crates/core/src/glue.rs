//! Gluing specifications: a polyhedron together with a pairing of its faces.
//!
//! The text format is line based. `#` starts a comment.
//!
//! ```text
//! polyhedron cube
//!   face x0 sq v000 v001 v011 v010
//!   face x1 sq v100 v110 v111 v101
//!   ...
//! end
//! pair x0 x1 v000=v100 v001=v101 v011=v111 v010=v110 orientation=preserving
//! expect-cycle v000 v100 4
//! ```
//!
//! Face vertex cycles are read as outward oriented. In a `pair` line every
//! vertex of the first face is sent to a vertex of the second. The optional
//! orientation flag is checked against the correspondence: `preserving`
//! means the map reverses the two outward cycles, as gluings of an orientable
//! manifold do, and `reversing` means it carries one cycle onto the other.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tiling::{Tiling, TilingBuilder, TilingError};
use crate::unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GlueError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown face `{0}`")]
    UnknownFace(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("face `{0}` is paired more than once")]
    NotInvolutive(String),
    #[error("face `{0}` is not paired")]
    NotTotal(String),
    #[error("face `{0}` is paired with itself")]
    SelfPaired(String),
    #[error("pairing {a} -> {b} is not a cellular map of the face boundaries")]
    NonCellular { a: String, b: String },
    #[error("pairing {a} -> {b} declared {declared} but the correspondence is {actual}")]
    OrientationMismatch { a: String, b: String, declared: Orientation, actual: Orientation },
    #[error("identification is ill-defined on edge {0}: it is glued to itself reversed")]
    IllDefinedEdge(String),
    #[error("edge {edge} has cycle length {actual}, expected {expected}")]
    CycleMismatch { edge: String, expected: u32, actual: u32 },
    #[error("no edge joins {0} and {1}")]
    UnknownEdge(String, String),
    #[error("polyhedron boundary is not a closed surface")]
    Boundary(#[from] TilingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Preserving => "preserving",
            Orientation::Reversing => "reversing",
        })
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "preserving" => Ok(Orientation::Preserving),
            "reversing" => Ok(Orientation::Reversing),
            other => Err(format!("unknown orientation `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFace {
    pub name: String,
    pub label: String,
    pub vertices: Vec<usize>,
    /// `edges[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub edges: Vec<usize>,
}

/// How face `f` is glued to its partner: vertex `i` of `f` goes to vertex
/// `(offset + i) mod n` of the partner, or `(offset - i) mod n` when `reversed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceMap {
    pub partner: usize,
    pub offset: usize,
    pub reversed: bool,
}

impl FaceMap {
    pub fn image(&self, i: usize, n: usize) -> usize {
        if self.reversed {
            (self.offset + n - i % n) % n
        } else {
            (self.offset + i) % n
        }
    }

    /// Image of the side from vertex `i` to vertex `i + 1`, as a side index of the partner.
    pub fn side_image(&self, i: usize, n: usize) -> usize {
        if self.reversed {
            (self.image(i, n) + n - 1) % n
        } else {
            self.image(i, n)
        }
    }

    pub fn orientation(&self) -> Orientation {
        if self.reversed {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingSpec {
    pub name: String,
    pub vertex_names: Vec<String>,
    pub faces: Vec<PolyFace>,
    pub edges: Vec<(usize, usize)>,
    pub maps: Vec<FaceMap>,
    /// Orbit id of each polyhedron edge.
    pub edge_orbit: Vec<usize>,
    /// Cycle length of each orbit.
    pub orbit_cycle: Vec<u32>,
    /// Class id of each polyhedron vertex in the quotient.
    pub vertex_class: Vec<usize>,
}

impl GluingSpec {
    pub fn parse(text: &str) -> Result<Self, GlueError> {
        let mut name = String::new();
        let mut vertex_names: Vec<String> = Vec::new();
        let mut vertex_ids: HashMap<String, usize> = HashMap::new();
        let mut faces: Vec<(String, String, Vec<usize>)> = Vec::new();
        let mut pairs: Vec<(usize, Vec<String>)> = Vec::new();
        let mut expects: Vec<(usize, String, String, u32)> = Vec::new();
        let mut in_block = false;
        let mut saw_block = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let syntax = |message: &str| GlueError::Syntax { line, message: message.to_string() };
            match toks[0] {
                "polyhedron" => {
                    if saw_block {
                        return Err(syntax("only one polyhedron block is allowed"));
                    }
                    name = toks.get(1).map(|s| s.to_string()).unwrap_or_default();
                    in_block = true;
                    saw_block = true;
                }
                "end" => {
                    if !in_block {
                        return Err(syntax("`end` outside a polyhedron block"));
                    }
                    in_block = false;
                }
                "face" => {
                    if !in_block {
                        return Err(syntax("`face` outside a polyhedron block"));
                    }
                    if toks.len() < 5 {
                        return Err(syntax("expected `face <name> <label> <v1> <v2> <v3> ...`"));
                    }
                    if faces.iter().any(|f| f.0 == toks[1]) {
                        return Err(syntax(&format!("duplicate face `{}`", toks[1])));
                    }
                    let verts = toks[3..]
                        .iter()
                        .map(|v| {
                            *vertex_ids.entry(v.to_string()).or_insert_with(|| {
                                vertex_names.push(v.to_string());
                                vertex_names.len() - 1
                            })
                        })
                        .collect::<Vec<_>>();
                    faces.push((toks[1].to_string(), toks[2].to_string(), verts));
                }
                "pair" => {
                    if in_block {
                        return Err(syntax("`pair` inside the polyhedron block"));
                    }
                    if toks.len() < 3 {
                        return Err(syntax("expected `pair <faceA> <faceB> a=b ...`"));
                    }
                    pairs.push((line, toks[1..].iter().map(|s| s.to_string()).collect()));
                }
                "expect-cycle" => {
                    let [_, u, v, l] = toks[..] else {
                        return Err(syntax("expected `expect-cycle <u> <v> <length>`"));
                    };
                    let l = l.parse().map_err(|_| syntax("cycle length must be a positive integer"))?;
                    expects.push((line, u.to_string(), v.to_string(), l));
                }
                other => return Err(syntax(&format!("unknown directive `{other}`"))),
            }
        }
        if in_block {
            return Err(GlueError::Syntax {
                line: text.lines().count(),
                message: "unterminated polyhedron block".into(),
            });
        }

        // Polyhedron edges and boundary check.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut poly_faces = Vec::with_capacity(faces.len());
        let mut builder = TilingBuilder::new(0);
        for (fname, label, verts) in &faces {
            let n = verts.len();
            let mut fe = Vec::with_capacity(n);
            for i in 0..n {
                let (u, v) = (verts[i], verts[(i + 1) % n]);
                let key = (u.min(v), u.max(v));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push((u, v));
                    edges.len() - 1
                });
                fe.push(id);
            }
            builder.add_face_by_vertices(label.clone(), verts)?;
            poly_faces.push(PolyFace { name: fname.clone(), label: label.clone(), vertices: verts.clone(), edges: fe });
        }
        builder.ensure_vertices(vertex_names.len());
        builder.build()?;

        let face_ids: HashMap<&str, usize> = poly_faces.iter().enumerate().map(|(i, f)| (f.name.as_str(), i)).collect();
        let mut maps: Vec<Option<FaceMap>> = vec![None; poly_faces.len()];
        for (line, toks) in &pairs {
            let a = *face_ids.get(toks[0].as_str()).ok_or_else(|| GlueError::UnknownFace(toks[0].clone()))?;
            let b = *face_ids.get(toks[1].as_str()).ok_or_else(|| GlueError::UnknownFace(toks[1].clone()))?;
            if a == b {
                return Err(GlueError::SelfPaired(toks[0].clone()));
            }
            for f in [a, b] {
                if maps[f].is_some() {
                    return Err(GlueError::NotInvolutive(poly_faces[f].name.clone()));
                }
            }
            let mut declared = None;
            let mut corr: HashMap<usize, usize> = HashMap::new();
            for tok in &toks[2..] {
                let (lhs, rhs) = tok.split_once('=').ok_or_else(|| GlueError::Syntax {
                    line: *line,
                    message: format!("expected `a=b`, found `{tok}`"),
                })?;
                if lhs == "orientation" {
                    declared =
                        Some(rhs.parse::<Orientation>().map_err(|message| GlueError::Syntax { line: *line, message })?);
                    continue;
                }
                let u = *vertex_ids.get(lhs).ok_or_else(|| GlueError::UnknownVertex(lhs.to_string()))?;
                let v = *vertex_ids.get(rhs).ok_or_else(|| GlueError::UnknownVertex(rhs.to_string()))?;
                corr.insert(u, v);
            }
            let map = face_map(&poly_faces[a], &poly_faces[b], &corr, b)
                .ok_or_else(|| GlueError::NonCellular { a: toks[0].clone(), b: toks[1].clone() })?;
            if let Some(d) = declared {
                if d != map.orientation() {
                    return Err(GlueError::OrientationMismatch {
                        a: toks[0].clone(),
                        b: toks[1].clone(),
                        declared: d,
                        actual: map.orientation(),
                    });
                }
            }
            let n = poly_faces[a].vertices.len();
            let inverse = if map.reversed {
                FaceMap { partner: a, offset: map.offset, reversed: true }
            } else {
                FaceMap { partner: a, offset: (n - map.offset) % n, reversed: false }
            };
            maps[a] = Some(map);
            maps[b] = Some(inverse);
        }
        let maps = maps
            .into_iter()
            .enumerate()
            .map(|(f, m)| m.ok_or_else(|| GlueError::NotTotal(poly_faces[f].name.clone())))
            .collect::<Result<Vec<_>, _>>()?;

        // Edge orbits with a parity bit recording relative direction.
        let mut orbit = ParityUnionFind::new(edges.len());
        let mut vuf = UnionFind::new(vertex_names.len());
        for (a, face) in poly_faces.iter().enumerate() {
            let map = maps[a];
            let other = &poly_faces[map.partner];
            let n = face.vertices.len();
            for i in 0..n {
                vuf.union(face.vertices[i], other.vertices[map.image(i, n)]);
                let e = face.edges[i];
                let (u, _) = edges[e];
                let from = face.vertices[i];
                let e_forward = u == from;
                let j = map.side_image(i, n);
                let f_e = other.edges[j];
                let img_from = other.vertices[map.image(i, n)];
                let f_forward = edges[f_e].0 == img_from;
                let parity = e_forward != f_forward;
                if !orbit.union(e, f_e, parity) {
                    let (u, v) = edges[e];
                    return Err(GlueError::IllDefinedEdge(format!("{}-{}", vertex_names[u], vertex_names[v])));
                }
            }
        }
        let mut orbit_ids: HashMap<usize, usize> = HashMap::new();
        let mut edge_orbit = Vec::with_capacity(edges.len());
        let mut orbit_cycle = Vec::new();
        for e in 0..edges.len() {
            let root = orbit.find(e).0;
            let id = *orbit_ids.entry(root).or_insert_with(|| {
                orbit_cycle.push(0);
                orbit_cycle.len() - 1
            });
            orbit_cycle[id] += 1;
            edge_orbit.push(id);
        }
        let mut class_ids: HashMap<usize, usize> = HashMap::new();
        let vertex_class = (0..vertex_names.len())
            .map(|v| {
                let root = vuf.find(v);
                let next = class_ids.len();
                *class_ids.entry(root).or_insert(next)
            })
            .collect();

        let spec =
            GluingSpec { name, vertex_names, faces: poly_faces, edges, maps, edge_orbit, orbit_cycle, vertex_class };
        for (_, u, v, l) in &expects {
            let e = spec.edge_between(u, v)?;
            let actual = spec.cycle_of_edge(e);
            if actual != *l {
                return Err(GlueError::CycleMismatch { edge: format!("{u}-{v}"), expected: *l, actual });
            }
        }
        Ok(spec)
    }

    pub fn edge_between(&self, u: &str, v: &str) -> Result<usize, GlueError> {
        let find = |name: &str| {
            self.vertex_names.iter().position(|n| n == name).ok_or_else(|| GlueError::UnknownVertex(name.to_string()))
        };
        let (a, b) = (find(u)?, find(v)?);
        self.edges
            .iter()
            .position(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b))
            .ok_or_else(|| GlueError::UnknownEdge(u.to_string(), v.to_string()))
    }

    pub fn cycle_of_edge(&self, e: usize) -> u32 {
        self.orbit_cycle[self.edge_orbit[e]]
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_cycle.len()
    }

    pub fn vertex_class_count(&self) -> usize {
        self.vertex_class.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Euler characteristic of the quotient complex, counting the single 3-cell.
    pub fn quotient_euler_characteristic(&self) -> i64 {
        self.vertex_class_count() as i64 - self.orbit_count() as i64 + (self.faces.len() / 2) as i64 - 1
    }

    pub fn face_by_name(&self, name: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.name == name)
    }

    /// The boundary of one copy of the polyhedron: every edge touches one
    /// cell, so statuses follow from incidence 1.
    pub fn polyhedron_boundary(&self) -> Tiling {
        let mut b = TilingBuilder::new(1);
        b.ensure_vertices(self.vertex_names.len());
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            let cycle = self.cycle_of_edge(e);
            b.add_edge(u, v, crate::EdgeStatus::from_incidence(1, cycle), cycle, false);
        }
        for f in &self.faces {
            let n = f.vertices.len();
            let sides = (0..n)
                .map(|i| crate::Side { edge: f.edges[i], forward: self.edges[f.edges[i]].0 == f.vertices[i] })
                .collect();
            b.add_face(f.label.clone(), sides);
        }
        b.build().expect("checked during parsing")
    }
}

fn face_map(a: &PolyFace, b: &PolyFace, corr: &HashMap<usize, usize>, partner: usize) -> Option<FaceMap> {
    let n = a.vertices.len();
    if b.vertices.len() != n || corr.len() != n {
        return None;
    }
    let images: Vec<usize> = a.vertices.iter().map(|v| corr.get(v).copied()).collect::<Option<_>>()?;
    let offset = b.vertices.iter().position(|&v| v == images[0])?;
    for reversed in [false, true] {
        let m = FaceMap { partner, offset, reversed };
        if (0..n).all(|i| b.vertices[m.image(i, n)] == images[i]) {
            return Some(m);
        }
    }
    None
}

struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parity[x] ^= p;
        self.parent[x] = root;
        (root, self.parity[x])
    }

    /// Records that `x` and `y` differ by `parity`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, parity: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return (px ^ py) == parity;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ parity;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUBE: &str = include_str!("../data/cube.glue");

    #[test]
    fn cube_has_three_orbits_of_length_four() {
        let spec = GluingSpec::parse(CUBE).unwrap();
        assert_eq!(spec.orbit_count(), 3);
        assert!(spec.orbit_cycle.iter().all(|&l| l == 4));
        assert_eq!(spec.vertex_class_count(), 1);
        assert_eq!(spec.quotient_euler_characteristic(), 0);
    }

    #[test]
    fn unpaired_face_is_rejected() {
        let text: String = CUBE.lines().filter(|l| !l.starts_with("pair z0")).map(|l| format!("{l}\n")).collect();
        assert!(matches!(GluingSpec::parse(&text), Err(GlueError::NotTotal(_))));
    }

    #[test]
    fn double_pairing_is_rejected() {
        let text = format!("{CUBE}\npair x0 y1 v000=v010 v001=v011 v011=v111 v010=v110\n");
        assert!(matches!(GluingSpec::parse(&text), Err(GlueError::NotInvolutive(_))));
    }

    #[test]
    fn wrong_expectation_is_reported() {
        let text = format!("{CUBE}\nexpect-cycle v000 v100 3\n");
        assert!(matches!(GluingSpec::parse(&text), Err(GlueError::CycleMismatch { expected: 3, actual: 4, .. })));
    }

    #[test]
    fn scrambled_correspondence_is_not_cellular() {
        let text = CUBE.replace("v000=v100 v001=v101 v011=v111 v010=v110", "v000=v100 v001=v111 v011=v101 v010=v110");
        assert!(matches!(GluingSpec::parse(&text), Err(GlueError::NonCellular { .. })));
    }

    #[test]
    fn declared_orientation_is_checked() {
        let text = CUBE.replace("v010=v110 orientation=preserving", "v010=v110 orientation=reversing");
        assert!(matches!(GluingSpec::parse(&text), Err(GlueError::OrientationMismatch { .. })));
    }

    #[test]
    fn edge_folded_onto_itself_is_ill_defined() {
        // A square pillow whose top is glued to the bottom by a half turn
        // composed with a reflection that flips the edge 0-1 end to end.
        let text = "polyhedron pillow\n face top sq 0 1 2 3\n face bot sq 0 3 2 1\nend\npair top bot 0=1 1=0 2=3 3=2\n";
        assert!(matches!(GluingSpec::parse(text), Err(GlueError::IllDefinedEdge(_))));
    }

    #[test]
    fn face_map_inverse_round_trips() {
        let spec = GluingSpec::parse(CUBE).unwrap();
        for (f, face) in spec.faces.iter().enumerate() {
            let m = spec.maps[f];
            let back = spec.maps[m.partner];
            assert_eq!(back.partner, f);
            let n = face.vertices.len();
            for i in 0..n {
                assert_eq!(back.image(m.image(i, n), n), i);
            }
        }
    }
}
