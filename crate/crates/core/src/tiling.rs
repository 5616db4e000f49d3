//! Labeled tilings of closed surfaces stored as oriented combinatorial maps.
//!
//! A [`Tiling`] is the concrete form of a boundary stage: faces carry a tile
//! label, edges carry a status (plain, loaded, fragile) and the edge cycle
//! length of the cover edge they came from, and vertices are flagged loaded
//! when every incident cover edge is loaded.
//!
//! Faces own a contiguous run of half-edges, so `next`/`prev` are index
//! arithmetic and only `twin` needs to be stored.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EdgeStatus {
    #[default]
    Plain,
    Loaded,
    Fragile,
}

impl EdgeStatus {
    /// Status of a boundary edge touched by `incidence` cells out of `cycle`.
    ///
    /// `cycle == 0` means the edge is not a cover edge and is always plain.
    pub fn from_incidence(incidence: u32, cycle: u32) -> Self {
        if cycle == 0 {
            EdgeStatus::Plain
        } else if incidence + 1 == cycle {
            EdgeStatus::Loaded
        } else if incidence >= 1 && incidence + 2 == cycle {
            EdgeStatus::Fragile
        } else {
            EdgeStatus::Plain
        }
    }

    /// Inverse of [`EdgeStatus::from_incidence`] when it is unambiguous.
    ///
    /// A plain edge only pins down its incidence when `cycle <= 4`; larger
    /// cycle lengths leave several counts that all read as plain.
    pub fn incidence(self, cycle: u32) -> Option<u32> {
        match self {
            EdgeStatus::Loaded if cycle >= 2 => Some(cycle - 1),
            EdgeStatus::Fragile if cycle >= 3 => Some(cycle - 2),
            EdgeStatus::Plain if cycle == 4 => Some(1),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeStatus::Plain => "plain",
            EdgeStatus::Loaded => "loaded",
            EdgeStatus::Fragile => "fragile",
        }
    }
}

impl fmt::Display for EdgeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TilingError {
    #[error("edge {edge} has {uses} incident face sides, expected 2")]
    NonManifoldEdge { edge: usize, uses: usize },
    #[error("edge {edge} is traversed twice in the same direction")]
    InconsistentOrientation { edge: usize },
    #[error("vertex {vertex} is not on any face")]
    DanglingVertex { vertex: usize },
    #[error("rotation at vertex {vertex} splits into more than one cycle")]
    InconsistentRotation { vertex: usize },
    #[error("face {face}: {reason}")]
    MalformedFace { face: usize, reason: String },
    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: usize },
    #[error("faces cannot be oriented consistently")]
    NotOrientable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub label: String,
    first: usize,
    len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub status: EdgeStatus,
    /// Edge cycle length of the underlying cover edge, 0 when unknown.
    pub cycle: u32,
    /// True for lines added only to make a stage refine its predecessor.
    pub added: bool,
    /// `half[0]` runs from `endpoints().0` to `endpoints().1`.
    half: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub loaded: bool,
    rotation: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct HalfEdge {
    origin: usize,
    face: usize,
    edge: usize,
    twin: usize,
}

/// A validated closed-surface tiling. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    stage: u32,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    half_edges: Vec<HalfEdge>,
}

/// One side of a face: an edge and whether the face walks it from
/// `ends.0` to `ends.1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Side {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Clone, Debug)]
struct EdgeSpec {
    ends: (usize, usize),
    status: EdgeStatus,
    cycle: u32,
    added: bool,
}

#[derive(Clone, Debug)]
struct FaceSpec {
    label: String,
    sides: Vec<Side>,
}

/// Incremental description of a tiling; [`TilingBuilder::build`] validates it.
#[derive(Clone, Debug, Default)]
pub struct TilingBuilder {
    stage: u32,
    vertex_count: usize,
    edges: Vec<EdgeSpec>,
    faces: Vec<FaceSpec>,
    by_ends: HashMap<(usize, usize), usize>,
    default_cycle: u32,
}

impl TilingBuilder {
    pub fn new(stage: u32) -> Self {
        Self { stage, ..Self::default() }
    }

    /// Cycle length given to edges created implicitly by [`Self::add_face_by_vertices`].
    pub fn default_cycle(mut self, cycle: u32) -> Self {
        self.default_cycle = cycle;
        self
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn ensure_vertices(&mut self, count: usize) {
        self.vertex_count = self.vertex_count.max(count);
    }

    pub fn add_edge(&mut self, u: usize, v: usize, status: EdgeStatus, cycle: u32, added: bool) -> usize {
        self.ensure_vertices(u.max(v) + 1);
        self.edges.push(EdgeSpec { ends: (u, v), status, cycle, added });
        let id = self.edges.len() - 1;
        self.by_ends.entry((u.min(v), u.max(v))).or_insert(id);
        id
    }

    pub fn set_edge_status(&mut self, edge: usize, status: EdgeStatus) {
        self.edges[edge].status = status;
    }

    pub fn add_face(&mut self, label: impl Into<String>, sides: Vec<Side>) -> usize {
        self.faces.push(FaceSpec { label: label.into(), sides });
        self.faces.len() - 1
    }

    /// Adds a face from its vertex cycle, creating edges keyed by endpoint
    /// pairs. Only suitable for complexes without loops or parallel edges.
    pub fn add_face_by_vertices(&mut self, label: impl Into<String>, cycle: &[usize]) -> Result<usize, TilingError> {
        let face = self.faces.len();
        let mut sides = Vec::with_capacity(cycle.len());
        for i in 0..cycle.len() {
            let (u, v) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            if u == v {
                return Err(TilingError::MalformedFace { face, reason: "loop edges need explicit edge ids".into() });
            }
            let key = (u.min(v), u.max(v));
            let edge = match self.by_ends.get(&key) {
                Some(&e) => e,
                None => self.add_edge(u, v, EdgeStatus::Plain, self.default_cycle, false),
            };
            sides.push(Side { edge, forward: self.edges[edge].ends == (u, v) });
        }
        Ok(self.add_face(label, sides))
    }

    pub fn build(self) -> Result<Tiling, TilingError> {
        let TilingBuilder { stage, vertex_count, edges, faces, .. } = self;
        let mut half_edges = Vec::new();
        let mut out_faces = Vec::with_capacity(faces.len());
        let mut uses: Vec<[Option<usize>; 2]> = vec![[None, None]; edges.len()];
        let mut use_count = vec![0usize; edges.len()];

        for (fi, face) in faces.iter().enumerate() {
            if face.sides.is_empty() {
                return Err(TilingError::MalformedFace { face: fi, reason: "no sides".into() });
            }
            let first = half_edges.len();
            let n = face.sides.len();
            for (i, side) in face.sides.iter().enumerate() {
                let spec = edges.get(side.edge).ok_or(TilingError::UnknownId { kind: "edge", id: side.edge })?;
                let (from, to) = if side.forward { spec.ends } else { (spec.ends.1, spec.ends.0) };
                let next = face.sides[(i + 1) % n];
                let nspec = edges.get(next.edge).ok_or(TilingError::UnknownId { kind: "edge", id: next.edge })?;
                let nfrom = if next.forward { nspec.ends.0 } else { nspec.ends.1 };
                if to != nfrom {
                    return Err(TilingError::MalformedFace {
                        face: fi,
                        reason: format!("side {i} ends at vertex {to} but side {} starts at {nfrom}", (i + 1) % n),
                    });
                }
                let h = half_edges.len();
                half_edges.push(HalfEdge { origin: from, face: fi, edge: side.edge, twin: usize::MAX });
                use_count[side.edge] += 1;
                if use_count[side.edge] > 2 {
                    return Err(TilingError::NonManifoldEdge { edge: side.edge, uses: use_count[side.edge] });
                }
                let slot = if side.forward { 0 } else { 1 };
                if uses[side.edge][slot].is_some() {
                    return Err(TilingError::InconsistentOrientation { edge: side.edge });
                }
                uses[side.edge][slot] = Some(h);
            }
            out_faces.push(Face { label: face.label.clone(), first, len: n });
        }

        let mut out_edges = Vec::with_capacity(edges.len());
        for (ei, spec) in edges.iter().enumerate() {
            if use_count[ei] != 2 {
                return Err(TilingError::NonManifoldEdge { edge: ei, uses: use_count[ei] });
            }
            let (mut a, mut b) = match uses[ei] {
                [Some(a), Some(b)] => (a, b),
                _ => return Err(TilingError::InconsistentOrientation { edge: ei }),
            };
            if spec.ends.0 == spec.ends.1 && a > b {
                std::mem::swap(&mut a, &mut b);
            }
            half_edges[a].twin = b;
            half_edges[b].twin = a;
            out_edges.push(Edge { status: spec.status, cycle: spec.cycle, added: spec.added, half: [a, b] });
        }

        let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
        for (h, he) in half_edges.iter().enumerate() {
            if he.origin >= vertex_count {
                return Err(TilingError::UnknownId { kind: "vertex", id: he.origin });
            }
            outgoing[he.origin].push(h);
        }

        let mut tiling = Tiling { stage, faces: out_faces, edges: out_edges, vertices: Vec::new(), half_edges };
        let mut vertices = Vec::with_capacity(vertex_count);
        for (v, outs) in outgoing.iter().enumerate() {
            let Some(&start) = outs.first() else {
                return Err(TilingError::DanglingVertex { vertex: v });
            };
            let mut rotation = vec![start];
            let mut h = tiling.rotate(start);
            while h != start {
                if rotation.len() > outs.len() {
                    return Err(TilingError::InconsistentRotation { vertex: v });
                }
                rotation.push(h);
                h = tiling.rotate(h);
            }
            if rotation.len() != outs.len() {
                return Err(TilingError::InconsistentRotation { vertex: v });
            }
            let mut structural =
                rotation.iter().map(|&h| &tiling.edges[tiling.half_edges[h].edge]).filter(|e| !e.added).peekable();
            let loaded = structural.peek().is_some() && structural.all(|e| e.status == EdgeStatus::Loaded);
            vertices.push(Vertex { loaded, rotation });
        }
        tiling.vertices = vertices;
        Ok(tiling)
    }
}

impl Tiling {
    /// The tiling with no cells, used for the empty boundary of a finite group.
    pub fn empty(stage: u32) -> Self {
        Tiling { stage, faces: Vec::new(), edges: Vec::new(), vertices: Vec::new(), half_edges: Vec::new() }
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn with_stage(mut self, stage: u32) -> Self {
        self.stage = stage;
        self
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.half_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn face_label(&self, f: usize) -> &str {
        &self.faces[f].label
    }

    pub fn face_len(&self, f: usize) -> usize {
        self.faces[f].len
    }

    pub fn face_half_edges(&self, f: usize) -> Range<usize> {
        let face = &self.faces[f];
        face.first..face.first + face.len
    }

    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.face_half_edges(f).map(|h| self.half_edges[h].origin).collect()
    }

    pub fn face_sides(&self, f: usize) -> Vec<Side> {
        self.face_half_edges(f)
            .map(|h| {
                let e = self.half_edges[h].edge;
                Side { edge: e, forward: self.edges[e].half[0] == h }
            })
            .collect()
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edges[e].half;
        (self.half_edges[a].origin, self.half_edges[b].origin)
    }

    pub fn edge_half_edges(&self, e: usize) -> [usize; 2] {
        self.edges[e].half
    }

    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        let [a, b] = self.edges[e].half;
        [self.half_edges[a].face, self.half_edges[b].face]
    }

    pub fn origin(&self, h: usize) -> usize {
        self.half_edges[h].origin
    }

    pub fn target(&self, h: usize) -> usize {
        self.half_edges[self.next(h)].origin
    }

    pub fn twin(&self, h: usize) -> usize {
        self.half_edges[h].twin
    }

    pub fn half_edge_face(&self, h: usize) -> usize {
        self.half_edges[h].face
    }

    pub fn half_edge_edge(&self, h: usize) -> usize {
        self.half_edges[h].edge
    }

    pub fn next(&self, h: usize) -> usize {
        let face = &self.faces[self.half_edges[h].face];
        face.first + (h - face.first + 1) % face.len
    }

    pub fn prev(&self, h: usize) -> usize {
        let face = &self.faces[self.half_edges[h].face];
        face.first + (h - face.first + face.len - 1) % face.len
    }

    /// Next outgoing half-edge around the origin of `h`.
    pub fn rotate(&self, h: usize) -> usize {
        self.next(self.half_edges[h].twin)
    }

    /// Outgoing half-edges at `v` in rotation order.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.vertices[v].rotation
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].rotation.len()
    }

    pub fn loaded_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].status == EdgeStatus::Loaded).collect()
    }

    pub fn fragile_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.edges[e].status == EdgeStatus::Fragile).collect()
    }

    pub fn loaded_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].loaded).collect()
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Connected components as lists of face ids, ordered by smallest face.
    pub fn component_faces(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.faces.len());
        for e in &self.edges {
            uf.union(self.half_edges[e.half[0]].face, self.half_edges[e.half[1]].face);
        }
        let mut by_root: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        for f in 0..self.faces.len() {
            let root = uf.find(f);
            let idx = *by_root.entry(root).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[idx].push(f);
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.component_faces().len()
    }

    /// True iff the tiling is connected with Euler characteristic 2.
    pub fn is_sphere(&self) -> bool {
        !self.faces.is_empty() && self.component_count() == 1 && self.euler_characteristic() == 2
    }

    /// Splits the tiling into its connected pieces, each renumbered densely.
    pub fn components(&self) -> Vec<Tiling> {
        self.component_faces().iter().map(|faces| self.restrict(faces)).collect()
    }

    fn restrict(&self, faces: &[usize]) -> Tiling {
        let mut b = TilingBuilder::new(self.stage);
        let mut vmap: HashMap<usize, usize> = HashMap::new();
        let mut emap: HashMap<usize, usize> = HashMap::new();
        for &f in faces {
            for h in self.face_half_edges(f) {
                let v = self.half_edges[h].origin;
                let next_id = vmap.len();
                vmap.entry(v).or_insert(next_id);
            }
        }
        b.ensure_vertices(vmap.len());
        for &f in faces {
            let mut sides = Vec::new();
            for h in self.face_half_edges(f) {
                let e = self.half_edges[h].edge;
                let id = match emap.get(&e) {
                    Some(&id) => id,
                    None => {
                        let (u, v) = self.edge_endpoints(e);
                        let edge = &self.edges[e];
                        let id = b.add_edge(vmap[&u], vmap[&v], edge.status, edge.cycle, edge.added);
                        emap.insert(e, id);
                        id
                    }
                };
                sides.push(Side { edge: id, forward: self.edges[e].half[0] == h });
            }
            b.add_face(self.faces[f].label.clone(), sides);
        }
        b.build().expect("restriction of a valid tiling is valid")
    }

    /// Copies this tiling into a builder so it can be edited and rebuilt.
    pub fn to_builder(&self) -> TilingBuilder {
        let mut b = TilingBuilder::new(self.stage);
        b.ensure_vertices(self.vertices.len());
        for e in 0..self.edges.len() {
            let (u, v) = self.edge_endpoints(e);
            let edge = &self.edges[e];
            b.add_edge(u, v, edge.status, edge.cycle, edge.added);
        }
        for f in 0..self.faces.len() {
            b.add_face(self.faces[f].label.clone(), self.face_sides(f));
        }
        b
    }

    /// The same tiling with every face cycle reversed.
    pub fn mirrored(&self) -> Tiling {
        let mut b = TilingBuilder::new(self.stage);
        b.ensure_vertices(self.vertices.len());
        for e in 0..self.edges.len() {
            let (u, v) = self.edge_endpoints(e);
            let edge = &self.edges[e];
            b.add_edge(u, v, edge.status, edge.cycle, edge.added);
        }
        for f in 0..self.faces.len() {
            let sides =
                self.face_sides(f).into_iter().rev().map(|s| Side { edge: s.edge, forward: !s.forward }).collect();
            b.add_face(self.faces[f].label.clone(), sides);
        }
        b.build().expect("mirror of a valid tiling is valid")
    }

    /// Removes every added line, merging the faces on either side of it.
    /// Merged faces are relabeled by `label_of`, which sees the labels of the
    /// faces being merged.
    pub fn erase_added_lines(&self, label_of: impl Fn(&[&str]) -> String) -> Tiling {
        let mut uf = UnionFind::new(self.faces.len());
        for e in &self.edges {
            if e.added {
                uf.union(self.half_edges[e.half[0]].face, self.half_edges[e.half[1]].face);
            }
        }
        let mut b = TilingBuilder::new(self.stage);
        let mut vmap: HashMap<usize, usize> = HashMap::new();
        let mut emap: HashMap<usize, usize> = HashMap::new();
        let mut done = vec![false; self.faces.len()];
        for f in 0..self.faces.len() {
            let root = uf.find(f);
            if done[root] {
                continue;
            }
            done[root] = true;
            let members: Vec<usize> = (0..self.faces.len()).filter(|&g| uf.find(g) == root).collect();
            let labels: Vec<&str> = members.iter().map(|&g| self.faces[g].label.as_str()).collect();
            let label = if members.len() == 1 { self.faces[f].label.clone() } else { label_of(&labels) };
            // Walk the outer boundary of the merged region.
            let start = members
                .iter()
                .flat_map(|&g| self.face_half_edges(g))
                .find(|&h| !self.edges[self.half_edges[h].edge].added)
                .expect("merged region has a boundary");
            let mut sides = Vec::new();
            let mut h = start;
            loop {
                let e = self.half_edges[h].edge;
                let id = match emap.get(&e) {
                    Some(&id) => id,
                    None => {
                        let (u, v) = self.edge_endpoints(e);
                        for x in [u, v] {
                            let n = vmap.len();
                            vmap.entry(x).or_insert(n);
                        }
                        let edge = &self.edges[e];
                        let id = b.add_edge(vmap[&u], vmap[&v], edge.status, edge.cycle, false);
                        emap.insert(e, id);
                        id
                    }
                };
                sides.push(Side { edge: id, forward: self.edges[e].half[0] == h });
                let mut n = self.next(h);
                while self.edges[self.half_edges[n].edge].added {
                    n = self.next(self.half_edges[n].twin);
                }
                h = n;
                if h == start {
                    break;
                }
            }
            b.add_face(label, sides);
        }
        b.build().expect("erasing added lines keeps a valid tiling")
    }
}

/// Serialized form of a tiling. Field names are part of the CLI contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingDoc {
    pub stage: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_count: Option<usize>,
    pub faces: Vec<FaceDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(default)]
    pub loaded_vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDoc {
    pub id: usize,
    #[serde(rename = "type")]
    pub label: String,
    pub vertices: Vec<usize>,
    /// Boundary edge ids aligned with `vertices`; needed for loops and parallel edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: usize,
    #[serde(default)]
    pub status: EdgeStatus,
    pub endpoints: [usize; 2],
    #[serde(default)]
    pub cycle: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub added: bool,
}

impl Tiling {
    pub fn to_doc(&self) -> TilingDoc {
        TilingDoc {
            stage: self.stage,
            vertex_count: Some(self.vertices.len()),
            faces: (0..self.faces.len())
                .map(|f| FaceDoc {
                    id: f,
                    label: self.faces[f].label.clone(),
                    vertices: self.face_vertices(f),
                    edges: Some(self.face_half_edges(f).map(|h| self.half_edges[h].edge).collect()),
                })
                .collect(),
            edges: (0..self.edges.len())
                .map(|e| {
                    let (u, v) = self.edge_endpoints(e);
                    let edge = &self.edges[e];
                    EdgeDoc { id: e, status: edge.status, endpoints: [u, v], cycle: edge.cycle, added: edge.added }
                })
                .collect(),
            loaded_vertices: self.loaded_vertices(),
        }
    }

    pub fn from_doc(doc: &TilingDoc) -> Result<Tiling, TilingError> {
        let mut b = TilingBuilder::new(doc.stage);
        if let Some(n) = doc.vertex_count {
            b.ensure_vertices(n);
        }
        let mut edge_ids = HashMap::new();
        for (i, e) in doc.edges.iter().enumerate() {
            edge_ids.insert(e.id, i);
            b.add_edge(e.endpoints[0], e.endpoints[1], e.status, e.cycle, e.added);
        }
        for (fi, face) in doc.faces.iter().enumerate() {
            for &v in &face.vertices {
                b.ensure_vertices(v + 1);
            }
            match &face.edges {
                None => {
                    b.add_face_by_vertices(face.label.clone(), &face.vertices)?;
                }
                Some(es) => {
                    if es.len() != face.vertices.len() {
                        return Err(TilingError::MalformedFace {
                            face: fi,
                            reason: "edges and vertices differ in length".into(),
                        });
                    }
                    let mut sides = Vec::with_capacity(es.len());
                    for (i, id) in es.iter().enumerate() {
                        let &e = edge_ids.get(id).ok_or(TilingError::UnknownId { kind: "edge", id: *id })?;
                        let [a, c] = doc.edges[e].endpoints;
                        let (u, v) = (face.vertices[i], face.vertices[(i + 1) % es.len()]);
                        let forward = if a == c {
                            // Loop: first use walks it forward, second backward.
                            !(b.faces_use(e) || sides.iter().any(|s: &Side| s.edge == e))
                        } else if (a, c) == (u, v) {
                            true
                        } else if (c, a) == (u, v) {
                            false
                        } else {
                            return Err(TilingError::MalformedFace {
                                face: fi,
                                reason: format!("edge {id} does not join vertices {u} and {v}"),
                            });
                        };
                        sides.push(Side { edge: e, forward });
                    }
                    b.add_face(face.label.clone(), sides);
                }
            }
        }
        b.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("tiling serializes")
    }

    pub fn from_json(text: &str) -> Result<Tiling, crate::Error> {
        let doc: TilingDoc = serde_json::from_str(text)?;
        Ok(Tiling::from_doc(&doc)?)
    }
}

impl TilingBuilder {
    fn faces_use(&self, edge: usize) -> bool {
        self.faces.iter().any(|f| f.sides.iter().any(|s| s.edge == edge && s.forward))
    }
}

/// Data of a subdivision map restricted to one stage: where each coarse
/// cell lands in the fine tiling.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementWitness {
    pub vertex_map: Vec<Option<usize>>,
    /// Fine edges from the image of the first endpoint to the image of the second.
    pub edge_map: Vec<Vec<usize>>,
    pub face_map: Vec<Vec<usize>>,
}

impl RefinementWitness {
    pub fn identity(t: &Tiling) -> Self {
        RefinementWitness {
            vertex_map: (0..t.vertex_count()).map(Some).collect(),
            edge_map: (0..t.edge_count()).map(|e| vec![e]).collect(),
            face_map: (0..t.face_count()).map(|f| vec![f]).collect(),
        }
    }
}

/// True iff `w` embeds the coarse complex cell-by-cell into the fine one:
/// vertices injectively, each edge onto a simple path between the images of
/// its endpoints, and each face onto a connected set of fine faces bounded
/// exactly by the paths of its sides. A witness that is not total yields false.
pub fn refinement_check(coarse: &Tiling, fine: &Tiling, w: &RefinementWitness) -> Result<bool, TilingError> {
    for v in w.vertex_map.iter().flatten() {
        if *v >= fine.vertex_count() {
            return Err(TilingError::UnknownId { kind: "vertex", id: *v });
        }
    }
    for &e in w.edge_map.iter().flatten() {
        if e >= fine.edge_count() {
            return Err(TilingError::UnknownId { kind: "edge", id: e });
        }
    }
    for &f in w.face_map.iter().flatten() {
        if f >= fine.face_count() {
            return Err(TilingError::UnknownId { kind: "face", id: f });
        }
    }
    if w.vertex_map.len() != coarse.vertex_count()
        || w.edge_map.len() != coarse.edge_count()
        || w.face_map.len() != coarse.face_count()
    {
        return Ok(false);
    }
    let Some(vmap) = w.vertex_map.iter().copied().collect::<Option<Vec<usize>>>() else {
        return Ok(false);
    };
    let mut image_of_vertex = vec![false; fine.vertex_count()];
    for &v in &vmap {
        if image_of_vertex[v] {
            return Ok(false);
        }
        image_of_vertex[v] = true;
    }

    let mut edge_used = vec![false; fine.edge_count()];
    let mut inner_vertex_used = vec![false; fine.vertex_count()];
    for (ce, chain) in w.edge_map.iter().enumerate() {
        if chain.is_empty() {
            return Ok(false);
        }
        let (cu, cv) = coarse.edge_endpoints(ce);
        let (start, end) = (vmap[cu], vmap[cv]);
        let mut at = start;
        let mut seen = vec![start];
        for (i, &fe) in chain.iter().enumerate() {
            if edge_used[fe] {
                return Ok(false);
            }
            edge_used[fe] = true;
            let (a, b) = fine.edge_endpoints(fe);
            at = if a == at {
                b
            } else if b == at {
                a
            } else {
                return Ok(false);
            };
            let last = i + 1 == chain.len();
            if !last {
                if image_of_vertex[at] || inner_vertex_used[at] || seen.contains(&at) {
                    return Ok(false);
                }
                inner_vertex_used[at] = true;
                seen.push(at);
            }
        }
        if at != end {
            return Ok(false);
        }
    }

    let mut owner = vec![usize::MAX; fine.face_count()];
    for (cf, set) in w.face_map.iter().enumerate() {
        if set.is_empty() {
            return Ok(false);
        }
        for &f in set {
            if owner[f] != usize::MAX {
                return Ok(false);
            }
            owner[f] = cf;
        }
    }
    if owner.contains(&usize::MAX) {
        return Ok(false);
    }

    for (cf, set) in w.face_map.iter().enumerate() {
        let mut side_uses: HashMap<usize, usize> = HashMap::new();
        for s in coarse.face_sides(cf) {
            *side_uses.entry(s.edge).or_default() += 1;
        }
        let mut expected: Vec<usize> =
            side_uses.iter().filter(|(_, &n)| n == 1).flat_map(|(&ce, _)| w.edge_map[ce].iter().copied()).collect();
        expected.sort_unstable();
        let mut boundary = Vec::new();
        let mut uf = UnionFind::new(set.len());
        let index: HashMap<usize, usize> = set.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        for e in 0..fine.edge_count() {
            let [fa, fb] = fine.edge_faces(e);
            match (owner[fa] == cf, owner[fb] == cf) {
                (true, false) | (false, true) => boundary.push(e),
                (true, true) => {
                    uf.union(index[&fa], index[&fb]);
                }
                _ => {}
            }
        }
        boundary.sort_unstable();
        if boundary != expected {
            return Ok(false);
        }
        if (0..set.len()).any(|i| !uf.same(i, 0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cube() -> Tiling {
        let mut b = TilingBuilder::new(1).default_cycle(4);
        for face in [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]] {
            b.add_face_by_vertices("sq", &face).unwrap();
        }
        b.build().unwrap()
    }

    pub(crate) fn torus() -> Tiling {
        let mut b = TilingBuilder::new(0);
        let v = b.add_vertex();
        let a = b.add_edge(v, v, EdgeStatus::Plain, 0, false);
        let c = b.add_edge(v, v, EdgeStatus::Plain, 0, false);
        b.add_face(
            "sq",
            vec![
                Side { edge: a, forward: true },
                Side { edge: c, forward: true },
                Side { edge: a, forward: false },
                Side { edge: c, forward: false },
            ],
        );
        b.build().unwrap()
    }

    #[test]
    fn cube_boundary_is_a_sphere() {
        let t = cube();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (8, 12, 6));
        assert_eq!(t.euler_characteristic(), 2);
        assert!(t.is_sphere());
        for v in 0..8 {
            assert_eq!(t.degree(v), 3);
        }
    }

    #[test]
    fn one_square_torus() {
        let t = torus();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (1, 2, 1));
        assert_eq!(t.euler_characteristic(), 0);
        assert!(!t.is_sphere());
        assert_eq!(t.degree(0), 4);
    }

    #[test]
    fn two_cubes_are_not_a_sphere() {
        let mut b = TilingBuilder::new(1);
        for off in [0, 8] {
            for face in [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]] {
                let shifted: Vec<usize> = face.iter().map(|v| v + off).collect();
                b.add_face_by_vertices("sq", &shifted).unwrap();
            }
        }
        let t = b.build().unwrap();
        assert_eq!(t.euler_characteristic(), 4);
        assert_eq!(t.component_count(), 2);
        assert!(!t.is_sphere());
        let parts = t.components();
        assert!(parts.iter().all(Tiling::is_sphere));
    }

    #[test]
    fn three_faces_on_one_edge_is_rejected() {
        let mut b = TilingBuilder::new(0);
        b.add_face_by_vertices("t", &[0, 1, 2]).unwrap();
        b.add_face_by_vertices("t", &[1, 0, 3]).unwrap();
        b.add_face_by_vertices("t", &[0, 1, 4]).unwrap();
        assert_eq!(b.build().unwrap_err(), TilingError::NonManifoldEdge { edge: 0, uses: 3 });
    }

    #[test]
    fn open_disk_is_rejected() {
        let mut b = TilingBuilder::new(0);
        b.add_face_by_vertices("t", &[0, 1, 2]).unwrap();
        assert_eq!(b.build().unwrap_err(), TilingError::NonManifoldEdge { edge: 0, uses: 1 });
    }

    #[test]
    fn dangling_vertex_is_rejected() {
        let mut b = TilingBuilder::new(0);
        b.add_face_by_vertices("t", &[0, 1, 2]).unwrap();
        b.add_face_by_vertices("t", &[0, 2, 1]).unwrap();
        b.ensure_vertices(4);
        assert_eq!(b.build().unwrap_err(), TilingError::DanglingVertex { vertex: 3 });
    }

    #[test]
    fn pinched_vertex_is_rejected() {
        // Two tetrahedra sharing only vertex 0.
        let mut b = TilingBuilder::new(0);
        for base in [1, 4] {
            let (a, c, d) = (base, base + 1, base + 2);
            for face in [[0, c, a], [0, d, c], [0, a, d], [a, c, d]] {
                b.add_face_by_vertices("t", &face).unwrap();
            }
        }
        assert_eq!(b.build().unwrap_err(), TilingError::InconsistentRotation { vertex: 0 });
    }

    #[test]
    fn json_round_trip_preserves_structure() {
        let t = torus();
        let back = Tiling::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let c = cube();
        let doc = c.to_doc();
        assert_eq!(doc.faces.len(), 6);
        assert_eq!(Tiling::from_doc(&doc).unwrap(), c);
    }

    #[test]
    fn json_without_face_edges_builds_by_vertices() {
        let text = r#"{"stage":1,"faces":[
            {"id":0,"type":"t","vertices":[0,1,2]},
            {"id":1,"type":"t","vertices":[0,3,1]},
            {"id":2,"type":"t","vertices":[1,3,2]},
            {"id":3,"type":"t","vertices":[2,3,0]}],
            "edges":[]}"#;
        let t = Tiling::from_json(text).unwrap();
        assert!(t.is_sphere());
        assert_eq!(t.edge_count(), 6);
    }

    #[test]
    fn status_incidence_round_trip() {
        for cycle in 2..=4 {
            for k in 1..cycle {
                let s = EdgeStatus::from_incidence(k, cycle);
                assert_eq!(s.incidence(cycle), Some(k), "cycle {cycle} incidence {k}");
            }
        }
        assert_eq!(EdgeStatus::Plain.incidence(6), None);
        assert_eq!(EdgeStatus::from_incidence(1, 3), EdgeStatus::Fragile);
        assert_eq!(EdgeStatus::from_incidence(3, 4), EdgeStatus::Loaded);
    }

    #[test]
    fn identity_witness_refines() {
        for t in [cube(), torus()] {
            assert!(refinement_check(&t, &t, &RefinementWitness::identity(&t)).unwrap());
        }
    }

    #[test]
    fn witness_with_unknown_ids_is_an_error() {
        let t = cube();
        let mut w = RefinementWitness::identity(&t);
        w.edge_map[0] = vec![99];
        assert!(refinement_check(&t, &t, &w).is_err());
    }

    #[test]
    fn partial_witness_does_not_refine() {
        let t = cube();
        let mut w = RefinementWitness::identity(&t);
        w.edge_map[3].clear();
        assert!(!refinement_check(&t, &t, &w).unwrap());
        let mut w = RefinementWitness::identity(&t);
        w.face_map.swap(0, 1);
        assert!(!refinement_check(&t, &t, &w).unwrap());
    }

    #[test]
    fn erasing_added_lines_merges_faces() {
        // Square pillow with one diagonal added on the top face.
        let mut b = TilingBuilder::new(0).default_cycle(4);
        b.add_face_by_vertices("tri", &[0, 1, 2]).unwrap();
        b.add_face_by_vertices("tri", &[0, 2, 3]).unwrap();
        b.add_face_by_vertices("sq", &[0, 3, 2, 1]).unwrap();
        let mut t = b.clone().build().unwrap();
        let diag =
            (0..t.edge_count()).find(|&e| t.edge_endpoints(e) == (2, 0) || t.edge_endpoints(e) == (0, 2)).unwrap();
        let mut b2 = t.to_builder();
        b2.edges[diag].added = true;
        t = b2.build().unwrap();
        let merged = t.erase_added_lines(|_| "sq".into());
        assert_eq!(merged.face_count(), 2);
        assert_eq!(merged.edge_count(), 4);
        assert!(merged.faces().iter().all(|f| f.label == "sq"));
    }
}
