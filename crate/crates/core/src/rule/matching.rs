use crate::tiling::Tiling;

use super::{Group, ReplacementRule, RuleError};

/// A placement of a group's pattern onto a tiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Match {
    pub group: usize,
    /// Tiling face of each pattern face.
    pub faces: Vec<usize>,
    /// Tiling vertex of each pattern name.
    pub vertices: Vec<usize>,
    /// Tiling edge of each pattern edge.
    pub edges: Vec<usize>,
    /// Half-edge under the first listed use of each pattern edge.
    pub halves: Vec<usize>,
    /// True when the pattern cycles run against the tiling's orientation.
    pub mirrored: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Placement {
    face: usize,
    rot: usize,
}

impl Group {
    pub fn pattern_name_count(&self) -> usize {
        self.pattern.iter().flat_map(|f| f.names.iter()).max().map_or(0, |&m| m + 1)
    }
}

fn side_half_edge(t: &Tiling, p: Placement, side: usize, n: usize, mirrored: bool) -> usize {
    let first = t.face_half_edges(p.face).start;
    let idx = if mirrored { (p.rot + 2 * n - side - 1) % n } else { (p.rot + side) % n };
    first + idx
}

fn corner_vertex(t: &Tiling, p: Placement, corner: usize, n: usize, mirrored: bool) -> usize {
    let first = t.face_half_edges(p.face).start;
    let idx = if mirrored { (p.rot + n - corner % n) % n } else { (p.rot + corner) % n };
    t.origin(first + idx)
}

/// Tries to place `g` with its first pattern face on `anchor`. Placements
/// are tried rotation by rotation, direct orientation before mirrored.
pub fn match_at(t: &Tiling, g: &Group, anchor: usize) -> Option<Match> {
    let p0 = &g.pattern[0];
    let n0 = p0.names.len();
    if t.face_label(anchor) != p0.label || t.face_len(anchor) != n0 {
        return None;
    }
    for mirrored in [false, true] {
        for rot in 0..n0 {
            if let Some(m) = try_place(t, g, Placement { face: anchor, rot }, mirrored) {
                return Some(m);
            }
        }
    }
    None
}

fn try_place(t: &Tiling, g: &Group, start: Placement, mirrored: bool) -> Option<Match> {
    let np = g.pattern.len();
    let mut placed: Vec<Option<Placement>> = vec![None; np];
    placed[0] = Some(start);
    let mut stack = vec![0usize];
    while let Some(p) = stack.pop() {
        let pl = placed[p].unwrap();
        let n = g.pattern[p].names.len();
        for side in 0..n {
            let (u, v) = (g.pattern[p].names[side], g.pattern[p].names[(side + 1) % n]);
            let pe = g.pattern_edge(u, v).expect("pattern edge exists");
            let Some(&(q, j)) = g.pattern_edges[pe].uses.iter().find(|&&(f, s)| (f, s) != (p, side)) else {
                continue;
            };
            let h = side_half_edge(t, pl, side, n, mirrored);
            let tw = t.twin(h);
            let gface = t.half_edge_face(tw);
            let qn = g.pattern[q].names.len();
            if t.face_label(gface) != g.pattern[q].label || t.face_len(gface) != qn {
                return None;
            }
            let k = tw - t.face_half_edges(gface).start;
            let rot = if mirrored { (k + j + 1) % qn } else { (k + qn - j % qn) % qn };
            let want = Placement { face: gface, rot };
            match placed[q] {
                None => {
                    placed[q] = Some(want);
                    stack.push(q);
                }
                Some(existing) if existing != want => return None,
                _ => {}
            }
        }
    }
    let placed: Vec<Placement> = placed.into_iter().collect::<Option<_>>()?;
    let faces: Vec<usize> = placed.iter().map(|p| p.face).collect();
    {
        let mut sorted = faces.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
    }

    let names = g.pattern_name_count();
    let mut vertices: Vec<Option<usize>> = vec![None; names];
    for (p, pl) in placed.iter().enumerate() {
        let n = g.pattern[p].names.len();
        for c in 0..n {
            let v = corner_vertex(t, *pl, c, n, mirrored);
            let name = g.pattern[p].names[c];
            match vertices[name] {
                None => vertices[name] = Some(v),
                Some(w) if w != v => return None,
                _ => {}
            }
        }
    }
    let vertices: Vec<usize> = vertices.into_iter().collect::<Option<_>>()?;
    {
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
    }

    let mut edges = Vec::with_capacity(g.pattern_edges.len());
    let mut halves = Vec::with_capacity(g.pattern_edges.len());
    for pe in &g.pattern_edges {
        let (p, side) = pe.uses[0];
        let n = g.pattern[p].names.len();
        let h = side_half_edge(t, placed[p], side, n, mirrored);
        let e = t.half_edge_edge(h);
        if pe.uses.len() == 1 {
            let other = t.half_edge_face(t.twin(h));
            if faces.contains(&other) {
                return None;
            }
        }
        let edge = t.edge(e);
        if !pe.status.accepts(edge) {
            return None;
        }
        if let Some(c) = pe.cycle {
            if edge.cycle != c {
                return None;
            }
        }
        edges.push(e);
        halves.push(h);
    }
    Some(Match { group: usize::MAX, faces, vertices, edges, halves, mirrored })
}

/// Partitions the faces of `t` into pattern matches, trying groups in
/// declared order and anchor faces by increasing id.
pub fn find_matches(t: &Tiling, rule: &ReplacementRule) -> Result<Vec<Match>, RuleError> {
    let mut owner: Vec<Option<usize>> = vec![None; t.face_count()];
    let mut out = Vec::new();
    for (gi, g) in rule.groups.iter().enumerate() {
        for anchor in 0..t.face_count() {
            if owner[anchor].is_some() {
                continue;
            }
            let Some(mut m) = match_at(t, g, anchor) else { continue };
            if m.faces.iter().any(|&f| owner[f].is_some()) {
                continue;
            }
            for &f in &m.faces {
                owner[f] = Some(out.len());
            }
            m.group = gi;
            out.push(m);
        }
    }
    if let Some(face) = owner.iter().position(Option::is_none) {
        return Err(RuleError::UnmatchedFace { face, label: t.face_label(face).to_string() });
    }
    Ok(out)
}
