use std::collections::{HashMap, HashSet, VecDeque};

use crate::tiling::{EdgeStatus, RefinementWitness, Side, Tiling, TilingBuilder};
use crate::unionfind::UnionFind;

use super::matching::{find_matches, Match};
use super::{Group, ReplacementRule, RuleError};

/// Output of one application of a replacement rule.
#[derive(Clone, Debug)]
pub struct Replacement {
    pub tiling: Tiling,
    /// Maps the input into the output. Only total when every group carries
    /// refine data and nothing collapsed.
    pub witness: RefinementWitness,
    pub matches: Vec<Match>,
    /// Number of face pairs identified while closing saturated edges.
    pub collapses: usize,
}

#[derive(Clone, Debug)]
struct SoupEdge {
    cycle: u32,
    added: bool,
    incidence: u32,
}

#[derive(Clone, Debug)]
struct SoupFace {
    label: String,
    verts: Vec<usize>,
    edges: Vec<usize>,
    region: usize,
}

struct Soup {
    vertex_count: usize,
    edges: Vec<SoupEdge>,
    edge_live: Vec<bool>,
    faces: Vec<SoupFace>,
}

/// Per-match bookkeeping kept for the witness.
struct RegionData {
    names: Vec<usize>,
    fresh_edges: Vec<usize>,
    faces: std::ops::Range<usize>,
}

fn boundary_half(t: &Tiling, g: &Group, m: &Match, x: usize, y: usize, pe: usize) -> usize {
    let (p, side) = g.pattern_edges[pe].uses[0];
    let names = &g.pattern[p].names;
    let a = names[side];
    let b = names[(side + 1) % names.len()];
    let same = (x, y) == (a, b);
    let h = m.halves[pe];
    if same != m.mirrored {
        h
    } else {
        t.twin(h)
    }
}

fn build_soup(t: &Tiling, rule: &ReplacementRule, matches: &[Match]) -> Result<(Soup, Vec<RegionData>), RuleError> {
    let mut edges: Vec<SoupEdge> = (0..t.edge_count())
        .map(|e| {
            let edge = t.edge(e);
            SoupEdge { cycle: edge.cycle, added: edge.added, incidence: 0 }
        })
        .collect();
    let mut edge_live = vec![true; t.edge_count()];
    for m in matches {
        let g = &rule.groups[m.group];
        for (pe, &e) in g.pattern_edges.iter().zip(&m.edges) {
            if pe.uses.len() == 2 {
                edge_live[e] = false;
            }
        }
    }
    for e in 0..t.edge_count() {
        if !edge_live[e] {
            continue;
        }
        let edge = t.edge(e);
        if edge.added {
            continue;
        }
        edges[e].incidence = edge.status.incidence(edge.cycle).ok_or(RuleError::AmbiguousIncidence {
            edge: e,
            status: edge.status,
            cycle: edge.cycle,
        })?;
    }

    let mut vertex_count = t.vertex_count();
    let mut faces = Vec::new();
    let mut regions = Vec::with_capacity(matches.len());
    for (ri, m) in matches.iter().enumerate() {
        let g = &rule.groups[m.group];
        let pattern_names = g.pattern_name_count();
        let names: Vec<usize> = (0..g.names.len())
            .map(|n| {
                if n < pattern_names {
                    m.vertices[n]
                } else {
                    vertex_count += 1;
                    vertex_count - 1
                }
            })
            .collect();
        let fresh_edges: Vec<usize> = g
            .template_edges
            .iter()
            .map(|te| {
                edges.push(SoupEdge {
                    cycle: if te.added { 0 } else { te.cycle },
                    added: te.added,
                    incidence: if te.added { 0 } else { 1 },
                });
                edge_live.push(true);
                edges.len() - 1
            })
            .collect();
        let first_face = faces.len();
        for tf in &g.template {
            let mut cyc = tf.names.clone();
            if m.mirrored {
                cyc.reverse();
            }
            let n = cyc.len();
            let mut face_edges = Vec::with_capacity(n);
            for i in 0..n {
                let (x, y) = (cyc[i], cyc[(i + 1) % n]);
                if let Some(te) = g.template_edge(x, y) {
                    face_edges.push(fresh_edges[te]);
                    continue;
                }
                let pe = g.pattern_edge(x, y).filter(|&pe| g.is_boundary_pattern_edge(pe)).ok_or_else(|| {
                    RuleError::Parse(format!(
                        "group `{}`: template side {}-{} is unknown",
                        g.name, g.names[x], g.names[y]
                    ))
                })?;
                let h = boundary_half(t, g, m, x, y, pe);
                let e = t.half_edge_edge(h);
                edges[e].incidence += 1;
                face_edges.push(e);
            }
            faces.push(SoupFace {
                label: tf.label.clone(),
                verts: cyc.iter().map(|&x| names[x]).collect(),
                edges: face_edges,
                region: ri,
            });
        }
        regions.push(RegionData { names, fresh_edges, faces: first_face..faces.len() });
    }
    Ok((Soup { vertex_count, edges, edge_live, faces }, regions))
}

struct Collapse<'s> {
    soup: &'s Soup,
    verts: UnionFind,
    edges: UnionFind,
    incidence: Vec<u32>,
    flanks: Vec<Vec<usize>>,
    face_live: Vec<bool>,
    count: usize,
}

impl<'s> Collapse<'s> {
    fn new(soup: &'s Soup) -> Self {
        let mut flanks = vec![Vec::new(); soup.edges.len()];
        for (fi, f) in soup.faces.iter().enumerate() {
            for &e in &f.edges {
                flanks[e].push(fi);
            }
        }
        Collapse {
            soup,
            verts: UnionFind::new(soup.vertex_count),
            edges: UnionFind::new(soup.edges.len()),
            incidence: soup.edges.iter().map(|e| e.incidence).collect(),
            flanks,
            face_live: vec![true; soup.faces.len()],
            count: 0,
        }
    }

    fn live_flanks(&self, root: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.flanks[root].iter().copied().filter(|&f| self.face_live[f]).collect();
        out.dedup();
        out
    }

    fn check_overflow(&self, root: usize) -> Result<(), RuleError> {
        let cycle = self.soup.edges[root].cycle;
        if cycle > 0 && self.incidence[root] > cycle {
            return Err(RuleError::IncidenceOverflow { incidence: self.incidence[root], cycle });
        }
        Ok(())
    }

    fn run(&mut self, refining: bool) -> Result<(), RuleError> {
        let mut queue: VecDeque<usize> = (0..self.soup.edges.len()).filter(|&e| self.soup.edge_live[e]).collect();
        while let Some(e) = queue.pop_front() {
            let r = self.edges.find(e);
            self.check_overflow(r)?;
            let cycle = self.soup.edges[r].cycle;
            if cycle == 0 || self.incidence[r] != cycle {
                continue;
            }
            let live = self.live_flanks(r);
            match live.len() {
                0 => continue,
                2 => {}
                n => return Err(RuleError::NotClosed(n)),
            }
            if refining {
                return Err(RuleError::CollapseInRefinement);
            }
            self.zip(live[0], live[1], r, &mut queue)?;
        }
        Ok(())
    }

    fn zip(&mut self, f1: usize, f2: usize, r: usize, queue: &mut VecDeque<usize>) -> Result<(), RuleError> {
        let soup = self.soup;
        let (a, b) = (&soup.faces[f1], &soup.faces[f2]);
        let mismatch = |reason: String| RuleError::FlapMismatch { edge: r, reason };
        if a.region == b.region {
            return Err(mismatch("both faces belong to the same new cell".into()));
        }
        if a.label != b.label || a.verts.len() != b.verts.len() {
            return Err(mismatch(format!(
                "`{}` ({} sides) against `{}` ({} sides)",
                a.label,
                a.verts.len(),
                b.label,
                b.verts.len()
            )));
        }
        let n = a.verts.len();
        let i = (0..n).find(|&i| self.edges.find(a.edges[i]) == r).expect("flank uses edge");
        let j = (0..n).find(|&j| self.edges.find(b.edges[j]) == r).expect("flank uses edge");
        let (u, v) = (self.verts.find(a.verts[i]), self.verts.find(a.verts[(i + 1) % n]));
        if self.verts.find(b.verts[j]) != v || self.verts.find(b.verts[(j + 1) % n]) != u {
            return Err(mismatch("the flanking faces run the shared edge in the same direction".into()));
        }
        for t in 0..n {
            let e1 = self.edges.find(a.edges[(i + t) % n]);
            let e2 = self.edges.find(b.edges[(j + n - t) % n]);
            let (s1, s2) = (&soup.edges[e1], &soup.edges[e2]);
            if e1 != e2 && (s1.cycle != s2.cycle || s1.added != s2.added) {
                return Err(mismatch(format!("paired sides have cycle lengths {} and {}", s1.cycle, s2.cycle)));
            }
        }
        self.face_live[f1] = false;
        self.face_live[f2] = false;
        self.count += 1;
        for t in 0..n {
            self.verts.union(a.verts[(i + 1 + t) % n], b.verts[(j + n - t) % n]);
            let e1 = self.edges.find(a.edges[(i + t) % n]);
            let e2 = self.edges.find(b.edges[(j + n - t) % n]);
            if e1 != e2 {
                let sum = self.incidence[e1] + self.incidence[e2];
                let mut fl = std::mem::take(&mut self.flanks[e1]);
                fl.append(&mut self.flanks[e2]);
                self.edges.union(e1, e2);
                let root = self.edges.find(e1);
                self.incidence[root] = sum;
                self.flanks[root] = fl;
            }
            queue.push_back(self.edges.find(e1));
        }
        Ok(())
    }
}

/// Applies a replacement rule: partitions `t` into pattern matches, swaps
/// each region for its template, updates incidences and closes every edge
/// that becomes saturated by identifying its two flanking faces.
pub fn apply_replacement(rule: &ReplacementRule, t: &Tiling) -> Result<Replacement, RuleError> {
    let matches = find_matches(t, rule)?;
    let (soup, regions) = build_soup(t, rule, &matches)?;
    let mut col = Collapse::new(&soup);
    col.run(rule.refines())?;

    let mut vmap: HashMap<usize, usize> = HashMap::new();
    let mut emap: HashMap<usize, usize> = HashMap::new();
    let mut fmap: Vec<Option<usize>> = vec![None; soup.faces.len()];
    let mut edge_ends: Vec<(usize, usize)> = Vec::new();
    let mut edge_root: Vec<usize> = Vec::new();
    let mut loop_uses: Vec<u32> = Vec::new();
    let mut face_sides: Vec<(String, Vec<Side>)> = Vec::new();
    for (fi, f) in soup.faces.iter().enumerate() {
        if !col.face_live[fi] {
            continue;
        }
        let n = f.verts.len();
        let mut sides = Vec::with_capacity(n);
        for i in 0..n {
            let from = col.verts.find(f.verts[i]);
            let to = col.verts.find(f.verts[(i + 1) % n]);
            let next_v = vmap.len();
            let from = *vmap.entry(from).or_insert(next_v);
            let next_v = vmap.len();
            let to = *vmap.entry(to).or_insert(next_v);
            let r = col.edges.find(f.edges[i]);
            let id = match emap.get(&r) {
                Some(&id) => id,
                None => {
                    emap.insert(r, edge_ends.len());
                    edge_ends.push((from, to));
                    edge_root.push(r);
                    loop_uses.push(0);
                    edge_ends.len() - 1
                }
            };
            let forward = if from == to {
                loop_uses[id] += 1;
                loop_uses[id] == 1
            } else {
                edge_ends[id] == (from, to)
            };
            sides.push(Side { edge: id, forward });
        }
        fmap[fi] = Some(face_sides.len());
        face_sides.push((f.label.clone(), sides));
    }
    for &r in &edge_root {
        let live = col.live_flanks(r).len();
        if live != 2 {
            return Err(RuleError::NotClosed(live));
        }
    }

    let mut b = TilingBuilder::new(t.stage() + 1);
    b.ensure_vertices(vmap.len());
    for (id, &(u, v)) in edge_ends.iter().enumerate() {
        let r = edge_root[id];
        let se = &soup.edges[r];
        let status = if se.added { EdgeStatus::Plain } else { EdgeStatus::from_incidence(col.incidence[r], se.cycle) };
        b.add_edge(u, v, status, se.cycle, se.added);
    }
    for (label, sides) in face_sides {
        b.add_face(label, sides);
    }
    let tiling = b.build()?;

    let vertex_of = |col: &mut Collapse, v: usize| vmap.get(&col.verts.find(v)).copied();
    let mut witness = RefinementWitness {
        vertex_map: vec![None; t.vertex_count()],
        edge_map: vec![Vec::new(); t.edge_count()],
        face_map: vec![Vec::new(); t.face_count()],
    };
    for v in 0..t.vertex_count() {
        witness.vertex_map[v] = vertex_of(&mut col, v);
    }
    for e in 0..t.edge_count() {
        if soup.edge_live[e] {
            if let Some(&id) = emap.get(&col.edges.find(e)) {
                witness.edge_map[e] = vec![id];
            }
        }
    }
    for (m, region) in matches.iter().zip(&regions) {
        let g = &rule.groups[m.group];
        let pattern_names = g.pattern_name_count();
        let internal: HashSet<usize> = (0..pattern_names).filter(|n| !g.boundary_names().contains(n)).collect();
        for &n in &internal {
            witness.vertex_map[m.vertices[n]] = None;
        }
        if let Some(refine) = &g.refine {
            for &(c, n) in &refine.vertices {
                if c < pattern_names {
                    witness.vertex_map[m.vertices[c]] = vertex_of(&mut col, region.names[n]);
                }
            }
            for ((a, bn), path) in &refine.edges {
                let Some(pe) = g.pattern_edge(*a, *bn) else { continue };
                let mut chain = Vec::with_capacity(path.len() - 1);
                for w in path.windows(2) {
                    let soup_edge = match g.template_edge(w[0], w[1]) {
                        Some(te) => Some(region.fresh_edges[te]),
                        None => {
                            g.pattern_edge(w[0], w[1]).filter(|&p| g.is_boundary_pattern_edge(p)).map(|p| m.edges[p])
                        }
                    };
                    match soup_edge.and_then(|se| emap.get(&col.edges.find(se))) {
                        Some(&id) => chain.push(id),
                        None => {
                            chain.clear();
                            break;
                        }
                    }
                }
                witness.edge_map[m.edges[pe]] = chain;
            }
        }
        for (p, fine) in region_face_map(g, region, &fmap).into_iter().enumerate() {
            witness.face_map[m.faces[p]] = fine;
        }
    }

    Ok(Replacement { tiling, witness, matches, collapses: col.count })
}

/// Assigns the template faces of one region to the pattern faces they
/// subdivide. Template faces are grouped into components separated by the
/// images of internal pattern edges; each component goes to the pattern face
/// whose boundary seeds it.
fn region_face_map(g: &Group, region: &RegionData, fmap: &[Option<usize>]) -> Vec<Vec<usize>> {
    let nt = g.template.len();
    let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
    for (ti, tf) in g.template.iter().enumerate() {
        let n = tf.names.len();
        for i in 0..n {
            directed.insert((tf.names[i], tf.names[(i + 1) % n]), ti);
        }
    }
    let mut cut: HashSet<(usize, usize)> = HashSet::new();
    let mut paths: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    if let Some(refine) = &g.refine {
        for ((a, b), path) in &refine.edges {
            for w in path.windows(2) {
                cut.insert((w[0].min(w[1]), w[0].max(w[1])));
            }
            paths.insert((*a, *b), path.clone());
            let mut rev = path.clone();
            rev.reverse();
            paths.insert((*b, *a), rev);
        }
    }
    let mut uf = UnionFind::new(nt);
    for te in &g.template_edges {
        let (a, b) = te.ends;
        if cut.contains(&(a.min(b), a.max(b))) {
            continue;
        }
        if let (Some(&x), Some(&y)) = (directed.get(&(a, b)), directed.get(&(b, a))) {
            uf.union(x, y);
        }
    }
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (p, pf) in g.pattern.iter().enumerate() {
        let n = pf.names.len();
        for s in 0..n {
            let (u, v) = (pf.names[s], pf.names[(s + 1) % n]);
            let Some(pe) = g.pattern_edge(u, v) else { continue };
            let step = if g.is_boundary_pattern_edge(pe) {
                Some((u, v))
            } else {
                paths.get(&(u, v)).map(|path| (path[0], path[1]))
            };
            if let Some(&tf) = step.and_then(|st| directed.get(&st)) {
                owner.entry(uf.find(tf)).or_insert(p);
            }
        }
    }
    let mut out = vec![Vec::new(); g.pattern.len()];
    for ti in 0..nt {
        if let Some(&p) = owner.get(&uf.find(ti)) {
            if let Some(fine) = fmap[region.faces.start + ti] {
                out[p].push(fine);
            }
        }
    }
    out
}
