use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::unionfind::UnionFind;

use super::{Group, NamedFace, ReplacementRule, Rule, SubdivisionRule, TileType};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    TooFewVertices,
    NotADisk,
    BoundaryMismatch,
    NameClash,
    Refine,
    Partition,
}

/// One problem found by [`validate_rule`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Tile label or group name the problem was found in.
    pub item: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.item, self.message)
    }
}

fn violation(kind: ViolationKind, item: &str, message: impl Into<String>) -> Violation {
    Violation { kind, item: item.to_string(), message: message.into() }
}

/// Checks that `faces` form an oriented disk and returns its boundary as
/// directed edges, or a reason why it is not a disk.
fn disk_boundary(faces: &[NamedFace]) -> Result<Vec<(usize, usize)>, String> {
    if faces.is_empty() {
        return Err("has no faces".into());
    }
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for f in faces {
        let n = f.names.len();
        if n < 2 {
            return Err(format!("face `{}` has fewer than two sides", f.label));
        }
        let distinct: HashSet<usize> = f.names.iter().copied().collect();
        if distinct.len() != n {
            return Err(format!("face `{}` repeats a vertex", f.label));
        }
        for i in 0..n {
            *directed.entry((f.names[i], f.names[(i + 1) % n])).or_default() += 1;
        }
    }
    if let Some(((u, v), _)) = directed.iter().find(|(_, &c)| c > 1) {
        return Err(format!("edge {u}-{v} is traversed twice in the same direction"));
    }
    let boundary: Vec<(usize, usize)> =
        directed.keys().copied().filter(|&(u, v)| !directed.contains_key(&(v, u))).collect();
    if boundary.is_empty() {
        return Err("is closed, not a disk".into());
    }

    let verts: BTreeSet<usize> = faces.iter().flat_map(|f| f.names.iter().copied()).collect();
    let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(verts.len());
    for &(u, v) in directed.keys() {
        uf.union(index[&u], index[&v]);
    }
    if (0..verts.len()).any(|i| !uf.same(i, 0)) {
        return Err("is not connected".into());
    }
    let edges = directed.keys().filter(|&&(u, v)| u < v || !directed.contains_key(&(v, u))).count();
    let chi = verts.len() as i64 - edges as i64 + faces.len() as i64;
    if chi != 1 {
        return Err(format!("has Euler characteristic {chi}, a disk has 1"));
    }
    let mut succ: HashMap<usize, usize> = HashMap::new();
    for &(u, v) in &boundary {
        if succ.insert(u, v).is_some() {
            return Err("boundary touches itself".into());
        }
    }
    let start = boundary[0].0;
    let mut walk = 0;
    let mut v = start;
    loop {
        v = succ[&v];
        walk += 1;
        if v == start {
            break;
        }
    }
    if walk != boundary.len() {
        return Err("boundary has more than one component".into());
    }
    Ok(boundary)
}

fn check_tile(tile: &TileType, out: &mut Vec<Violation>) {
    let item = &tile.label;
    if tile.corners.len() < 3 {
        out.push(violation(
            ViolationKind::TooFewVertices,
            item,
            format!("has {} boundary vertices; a tile type must have at least three vertices", tile.corners.len()),
        ));
    }
    let mut boundary_names: Vec<usize> = tile.sides.iter().flat_map(|s| s[..s.len() - 1].iter().copied()).collect();
    let count = boundary_names.len();
    boundary_names.sort_unstable();
    boundary_names.dedup();
    if boundary_names.len() != count {
        out.push(violation(ViolationKind::BoundaryMismatch, item, "side chains revisit a boundary vertex"));
    }
    match disk_boundary(&tile.faces) {
        Err(reason) => out.push(violation(ViolationKind::NotADisk, item, format!("template {reason}"))),
        Ok(found) => {
            let expected: HashSet<(usize, usize)> =
                tile.sides.iter().flat_map(|s| s.windows(2).map(|w| (w[0], w[1]))).collect();
            let found: HashSet<(usize, usize)> = found.into_iter().collect();
            if expected != found {
                out.push(violation(
                    ViolationKind::BoundaryMismatch,
                    item,
                    "template boundary is not the tile boundary cut along its side chains",
                ));
            }
        }
    }
}

fn check_group(g: &Group, out: &mut Vec<Violation>) {
    let item = &g.name;
    let pattern_boundary = match disk_boundary(&g.pattern) {
        Ok(b) => b,
        Err(reason) => {
            out.push(violation(ViolationKind::NotADisk, item, format!("pattern {reason}")));
            return;
        }
    };
    if g.pattern.iter().any(|f| f.names.len() < 3) {
        out.push(violation(ViolationKind::TooFewVertices, item, "pattern face has fewer than three vertices"));
    }
    match disk_boundary(&g.template) {
        Err(reason) => out.push(violation(ViolationKind::NotADisk, item, format!("template {reason}"))),
        Ok(found) => {
            let a: HashSet<(usize, usize)> = pattern_boundary.iter().copied().collect();
            let b: HashSet<(usize, usize)> = found.into_iter().collect();
            if a != b {
                out.push(violation(
                    ViolationKind::BoundaryMismatch,
                    item,
                    "template boundary differs from pattern boundary",
                ));
            }
        }
    }
    let pattern_names = g.pattern_name_count();
    let boundary: HashSet<usize> = g.boundary_names().into_iter().collect();
    for f in &g.template {
        if let Some(&n) = f.names.iter().find(|&&n| n < pattern_names && !boundary.contains(&n)) {
            out.push(violation(
                ViolationKind::NameClash,
                item,
                format!("template reuses interior pattern vertex `{}`", g.names[n]),
            ));
            break;
        }
    }
    if let Some(refine) = &g.refine {
        let template_vertices: HashSet<usize> = g.template.iter().flat_map(|f| f.names.iter().copied()).collect();
        let image = |n: usize| -> Option<usize> {
            if boundary.contains(&n) {
                return Some(n);
            }
            refine.vertices.iter().find(|(c, _)| *c == n).map(|&(_, v)| v)
        };
        for n in 0..pattern_names {
            if !boundary.contains(&n) && image(n).is_none() {
                out.push(violation(
                    ViolationKind::Refine,
                    item,
                    format!("interior vertex `{}` has no image", g.names[n]),
                ));
            }
        }
        for &(c, v) in &refine.vertices {
            if !template_vertices.contains(&v) {
                out.push(violation(ViolationKind::Refine, item, format!("`{}` maps outside the template", g.names[c])));
            }
        }
        for (pe, e) in g.pattern_edges.iter().enumerate() {
            if g.is_boundary_pattern_edge(pe) {
                continue;
            }
            let Some((_, path)) = refine.edges.iter().find(|((a, b), _)| (*a, *b) == e.ends || (*b, *a) == e.ends)
            else {
                out.push(violation(
                    ViolationKind::Refine,
                    item,
                    format!("interior edge {}-{} has no image path", g.names[e.ends.0], g.names[e.ends.1]),
                ));
                continue;
            };
            for w in path.windows(2) {
                let ok = g.template_edge(w[0], w[1]).is_some()
                    || g.pattern_edge(w[0], w[1]).is_some_and(|p| g.is_boundary_pattern_edge(p));
                if !ok {
                    out.push(violation(
                        ViolationKind::Refine,
                        item,
                        format!("image path step {}-{} is not a template edge", g.names[w[0]], g.names[w[1]]),
                    ));
                }
            }
        }
    }
}

fn check_partition(rule: &ReplacementRule, out: &mut Vec<Violation>) {
    let mut labels: BTreeSet<&str> = BTreeSet::new();
    for g in &rule.groups {
        labels.extend(g.pattern.iter().map(|f| f.label.as_str()));
        labels.extend(g.template.iter().map(|f| f.label.as_str()));
    }
    for label in labels {
        if rule.fragments.iter().any(|f| f == label) {
            continue;
        }
        let single = rule.groups.iter().any(|g| g.pattern.len() == 1 && g.pattern[0].label == label);
        if !single {
            out.push(violation(
                ViolationKind::Partition,
                &rule.name,
                format!("a face labelled `{label}` outside every larger group is covered by no pattern"),
            ));
        }
    }
}

/// Lists every structural problem with a rule; an empty list means valid.
pub fn validate_rule(rule: &Rule) -> Vec<Violation> {
    let mut out = Vec::new();
    match rule {
        Rule::Subdivision(SubdivisionRule { tiles, .. }) => {
            for tile in tiles {
                check_tile(tile, &mut out);
            }
        }
        Rule::Replacement(r) => {
            for g in &r.groups {
                check_group(g, &mut out);
            }
            check_partition(r, &mut out);
        }
    }
    out
}
