//! Balls B(n) in the universal cover of a glued polyhedron.
//!
//! Cells are copies of the polyhedron. Vertices and edges of the cover are
//! classes of `(cell, local id)` pairs, merged with union-find whenever two
//! face slots are glued. The incidence of a cover edge is the number of
//! cells in its class, which is what decides loaded and fragile status on
//! the boundary.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::glue::GluingSpec;
use crate::tiling::{EdgeStatus, Side, Tiling, TilingBuilder, TilingError};
use crate::unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("fold mismatch: slots ({0}, {1}) and ({2}, {3}) flank a saturated edge but are not partner faces")]
    FoldMismatch(usize, usize, usize, usize),
    #[error("two open faces of a new cell want the same face of its neighbour")]
    SlotConflict,
    #[error("cover edge incidence {incidence} exceeds cycle length {cycle}")]
    IncidenceOverflow { incidence: usize, cycle: u32 },
    #[error("cell {0} has two of its own vertices or edges identified")]
    SelfIdentified(usize),
    #[error("boundary is not a closed surface: cover edge has {0} open faces around it")]
    NotClosed(usize),
    #[error("cell limit {0} exceeded")]
    CellLimit(usize),
    #[error("boundary tiling is invalid")]
    Boundary(#[from] TilingError),
}

/// Order in which saturated edges are folded. The result must not depend on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FoldOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Clone)]
pub struct CoverState<'a> {
    spec: &'a GluingSpec,
    radius: u32,
    cells: usize,
    /// Per `cell * faces + face`: the glued slot, if any.
    slots: Vec<Option<usize>>,
    vertices: UnionFind,
    edges: UnionFind,
    cell_limit: usize,
    fold_order: FoldOrder,
}

impl<'a> CoverState<'a> {
    /// B(1): a single cell with every face open.
    pub fn new(spec: &'a GluingSpec) -> Self {
        let nf = spec.faces.len();
        CoverState {
            spec,
            radius: 1,
            cells: 1,
            slots: vec![None; nf],
            vertices: UnionFind::new(spec.vertex_names.len()),
            edges: UnionFind::new(spec.edges.len()),
            cell_limit: 1_000_000,
            fold_order: FoldOrder::Ascending,
        }
    }

    pub fn with_cell_limit(mut self, limit: usize) -> Self {
        self.cell_limit = limit;
        self
    }

    pub fn with_fold_order(mut self, order: FoldOrder) -> Self {
        self.fold_order = order;
        self
    }

    pub fn spec(&self) -> &GluingSpec {
        self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    fn nf(&self) -> usize {
        self.spec.faces.len()
    }

    fn nv(&self) -> usize {
        self.spec.vertex_names.len()
    }

    fn ne(&self) -> usize {
        self.spec.edges.len()
    }

    pub fn open_slots(&self) -> Vec<(usize, usize)> {
        let nf = self.nf();
        (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).map(|s| (s / nf, s % nf)).collect()
    }

    fn edge_key(&self, slot: usize, side: usize) -> usize {
        let nf = self.nf();
        let (cell, face) = (slot / nf, slot % nf);
        cell * self.ne() + self.spec.faces[face].edges[side]
    }

    fn vertex_key(&self, slot: usize, corner: usize) -> usize {
        let nf = self.nf();
        let (cell, face) = (slot / nf, slot % nf);
        cell * self.nv() + self.spec.faces[face].vertices[corner]
    }

    fn edge_cycle_of_key(&self, key: usize) -> u32 {
        self.spec.cycle_of_edge(key % self.ne())
    }

    /// Cover-edge incidence of the class containing `(cell, local edge)`.
    pub fn incidence(&mut self, cell: usize, edge: usize) -> usize {
        let key = cell * self.ne() + edge;
        self.edges.class_size(key)
    }

    fn add_cell(&mut self) -> Result<usize, CoverError> {
        if self.cells >= self.cell_limit {
            return Err(CoverError::CellLimit(self.cell_limit));
        }
        let c = self.cells;
        self.cells += 1;
        self.slots.extend(std::iter::repeat_n(None, self.nf()));
        self.vertices.grow(self.nv());
        self.edges.grow(self.ne());
        Ok(c)
    }

    /// Glues `slot` to `other`, which must be its partner face, and merges
    /// the corresponding vertex and edge classes. Returns the merged edge roots.
    fn glue(&mut self, slot: usize, other: usize) -> Vec<usize> {
        let nf = self.nf();
        let face = slot % nf;
        let map = self.spec.maps[face];
        debug_assert_eq!(map.partner, other % nf);
        self.slots[slot] = Some(other);
        self.slots[other] = Some(slot);
        let n = self.spec.faces[face].vertices.len();
        let mut touched = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.vertex_key(slot, i);
            let b = self.vertex_key(other, map.image(i, n));
            self.vertices.union(a, b);
            let ea = self.edge_key(slot, i);
            let eb = self.edge_key(other, map.side_image(i, n));
            self.edges.union(ea, eb);
            touched.push(self.edges.find(ea));
        }
        touched
    }

    /// Open slots grouped by the new cell each will receive in the next
    /// expansion: slots joined across loaded edges share one cell.
    pub fn pending_groups(&mut self) -> Vec<Vec<(usize, usize)>> {
        let nf = self.nf();
        self.groups().into_iter().map(|g| g.into_iter().map(|s| (s / nf, s % nf)).collect()).collect()
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        let open: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).collect();
        let flanks = self.flank_map(&open);
        let index: HashMap<usize, usize> = open.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut groups = UnionFind::new(open.len());
        for (&root, fl) in &flanks {
            let incidence = self.edges.class_size(root);
            let cycle = self.edge_cycle_of_key(root);
            if incidence as u32 + 1 == cycle && fl.len() == 2 {
                groups.union(index[&fl[0]], index[&fl[1]]);
            }
        }
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut group_of: HashMap<usize, usize> = HashMap::new();
        for (i, &s) in open.iter().enumerate() {
            let g = *group_of.entry(groups.find(i)).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[g].push(s);
        }
        members
    }

    /// Grows B(n) into B(n+1).
    pub fn expand(&mut self) -> Result<(), CoverError> {
        let nf = self.nf();
        let members = self.groups();
        if members.is_empty() {
            self.radius += 1;
            return Ok(());
        }

        for group in members {
            let cell = self.add_cell()?;
            let mut used = vec![false; nf];
            for s in group {
                let partner = self.spec.maps[s % nf].partner;
                if used[partner] {
                    return Err(CoverError::SlotConflict);
                }
                used[partner] = true;
                self.glue(s, cell * nf + partner);
            }
        }

        self.fold()?;
        self.check()?;
        self.radius += 1;
        Ok(())
    }

    fn flank_map(&mut self, open: &[usize]) -> HashMap<usize, Vec<usize>> {
        let mut flanks: HashMap<usize, Vec<usize>> = HashMap::new();
        for &s in open {
            let len = self.spec.faces[s % self.nf()].vertices.len();
            for i in 0..len {
                let key = self.edge_key(s, i);
                let root = self.edges.find(key);
                flanks.entry(root).or_default().push(s);
            }
        }
        flanks
    }

    fn fold(&mut self) -> Result<(), CoverError> {
        let nf = self.nf();
        let open: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).collect();
        let mut flanks = self.flank_map(&open);
        // Work queue keyed by class minimum so the order is independent of
        // union-find internals.
        let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &root in flanks.keys() {
            if self.is_saturated(root) {
                queue.insert((self.edges.class_min(root), root));
            }
        }
        loop {
            let next = match self.fold_order {
                FoldOrder::Ascending => queue.pop_first(),
                FoldOrder::Descending => queue.pop_last(),
            };
            let Some((_, root)) = next else { break };
            if self.edges.find(root) != root {
                continue;
            }
            let open_flanks: Vec<usize> = flanks
                .get(&root)
                .map(|fl| fl.iter().copied().filter(|&s| self.slots[s].is_none()).collect())
                .unwrap_or_default();
            match open_flanks.len() {
                0 => continue,
                2 => {}
                n => return Err(CoverError::NotClosed(n)),
            }
            let (a, b) = (open_flanks[0], open_flanks[1]);
            if self.spec.maps[a % nf].partner != b % nf || a / nf == b / nf {
                return Err(CoverError::FoldMismatch(a / nf, a % nf, b / nf, b % nf));
            }
            let before: Vec<usize> = {
                let len = self.spec.faces[a % nf].vertices.len();
                let mut roots: Vec<usize> = (0..len).map(|i| self.edge_key(a, i)).collect();
                let lb = self.spec.faces[b % nf].vertices.len();
                roots.extend((0..lb).map(|i| self.edge_key(b, i)));
                roots.iter().map(|&k| self.edges.find(k)).collect()
            };
            let after = self.glue(a, b);
            // Merge flank lists of classes that were joined.
            for old in before {
                let new = self.edges.find(old);
                if old != new {
                    if let Some(list) = flanks.remove(&old) {
                        flanks.entry(new).or_default().extend(list);
                    }
                }
            }
            for root in after {
                let root = self.edges.find(root);
                let size = self.edges.class_size(root) as u32;
                let cycle = self.edge_cycle_of_key(root);
                if size > cycle {
                    return Err(CoverError::IncidenceOverflow { incidence: size as usize, cycle });
                }
                if size == cycle {
                    queue.insert((self.edges.class_min(root), root));
                }
            }
        }
        Ok(())
    }

    fn is_saturated(&mut self, root: usize) -> bool {
        self.edges.class_size(root) as u32 >= self.edge_cycle_of_key(root)
    }

    fn check(&mut self) -> Result<(), CoverError> {
        let (nv, ne) = (self.nv(), self.ne());
        for cell in 0..self.cells {
            let mut seen = HashMap::new();
            for v in 0..nv {
                if seen.insert(self.vertices.find(cell * nv + v), ()).is_some() {
                    return Err(CoverError::SelfIdentified(cell));
                }
            }
            let mut seen = HashMap::new();
            for e in 0..ne {
                let root = self.edges.find(cell * ne + e);
                if seen.insert(root, ()).is_some() {
                    return Err(CoverError::SelfIdentified(cell));
                }
                let size = self.edges.class_size(root);
                let cycle = self.spec.cycle_of_edge(e);
                if size as u32 > cycle {
                    return Err(CoverError::IncidenceOverflow { incidence: size, cycle });
                }
            }
        }
        let open: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).collect();
        for (_, fl) in self.flank_map(&open) {
            if fl.len() != 2 {
                return Err(CoverError::NotClosed(fl.len()));
            }
        }
        Ok(())
    }

    /// For each vertex of [`Self::boundary`], in the same numbering, one
    /// `(cell, polyhedron vertex)` pair lying over it.
    pub fn boundary_vertex_cells(&mut self) -> Vec<(usize, usize)> {
        let nv = self.nv();
        let open: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for &s in &open {
            for i in 0..self.spec.faces[s % self.nf()].vertices.len() {
                let key = self.vertex_key(s, i);
                if seen.insert(self.vertices.find(key)) {
                    out.push((key / nv, key % nv));
                }
            }
        }
        out
    }

    /// Whether two `(cell, polyhedron vertex)` pairs are the same cover vertex.
    pub fn same_vertex(&mut self, a: (usize, usize), b: (usize, usize)) -> bool {
        let nv = self.nv();
        self.vertices.same(a.0 * nv + a.1, b.0 * nv + b.1)
    }

    /// The boundary S(n) with statuses from incidence counts. Face cycles
    /// are re-oriented consistently per component, since copies glued by
    /// orientation-reversing pairings are mirror images.
    pub fn boundary(&mut self) -> Result<Tiling, CoverError> {
        self.boundary_with_keys().map(|(t, _)| t)
    }

    /// Like [`Self::boundary`], also returning for each boundary face its
    /// `(cell, polyhedron face)` slot.
    pub fn boundary_with_keys(&mut self) -> Result<(Tiling, Vec<(usize, usize)>), CoverError> {
        let nf = self.nf();
        let open: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s].is_none()).collect();
        let mut vid: HashMap<usize, usize> = HashMap::new();
        let mut eid: HashMap<usize, usize> = HashMap::new();
        let mut edge_info: Vec<(usize, usize, usize)> = Vec::new();
        let mut cycles: Vec<Vec<(usize, usize)>> = Vec::with_capacity(open.len());
        for &s in &open {
            let n = self.spec.faces[s % nf].vertices.len();
            let mut cyc = Vec::with_capacity(n);
            for i in 0..n {
                let vroot = self.vertices.find(self.vertex_key(s, i));
                let next_v = vid.len();
                let v = *vid.entry(vroot).or_insert(next_v);
                let key = self.edge_key(s, i);
                let eroot = self.edges.find(key);
                let next_e = eid.len();
                let e = *eid.entry(eroot).or_insert_with(|| {
                    edge_info.push((eroot, usize::MAX, usize::MAX));
                    next_e
                });
                cyc.push((v, e));
            }
            cycles.push(cyc);
        }
        // Fill endpoints from the first face that uses each edge.
        for cyc in &cycles {
            let n = cyc.len();
            for i in 0..n {
                let e = cyc[i].1;
                if edge_info[e].1 == usize::MAX {
                    edge_info[e].1 = cyc[i].0;
                    edge_info[e].2 = cyc[(i + 1) % n].0;
                }
            }
        }
        let flip = orient_cycles(&cycles, edge_info.len()).ok_or(CoverError::Boundary(TilingError::NotOrientable))?;

        let mut b = TilingBuilder::new(self.radius);
        b.ensure_vertices(vid.len());
        for &(root, u, v) in &edge_info {
            let cycle = self.edge_cycle_of_key(root);
            let k = self.edges.class_size(root) as u32;
            b.add_edge(u, v, EdgeStatus::from_incidence(k, cycle), cycle, false);
        }
        for (fi, cyc) in cycles.iter().enumerate() {
            let n = cyc.len();
            let mut sides: Vec<Side> = (0..n)
                .map(|i| {
                    let (u, e) = cyc[i];
                    Side { edge: e, forward: edge_info[e].1 == u && (edge_info[e].1 != edge_info[e].2) }
                })
                .collect();
            if flip[fi] {
                sides.reverse();
                for s in &mut sides {
                    s.forward = !s.forward;
                }
            }
            b.add_face(self.spec.faces[open[fi] % nf].label.clone(), sides);
        }
        let keys = open.iter().map(|&s| (s / nf, s % nf)).collect();
        Ok((b.build()?, keys))
    }
}

/// Chooses a flip per face so that every edge is used once in each
/// direction. Faces are vertex/edge cycles. None if impossible.
pub(crate) fn orient_cycles(cycles: &[Vec<(usize, usize)>], edge_count: usize) -> Option<Vec<bool>> {
    // For each edge: the (face, direction-agrees-with-first-endpoint) uses.
    let mut uses: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); edge_count];
    for (f, cyc) in cycles.iter().enumerate() {
        let n = cyc.len();
        for i in 0..n {
            uses[cyc[i].1].push((f, cyc[i].0, cyc[(i + 1) % n].0));
        }
    }
    let mut flip: Vec<Option<bool>> = vec![None; cycles.len()];
    for start in 0..cycles.len() {
        if flip[start].is_some() {
            continue;
        }
        flip[start] = Some(false);
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            let ff = flip[f].unwrap();
            let n = cycles[f].len();
            for i in 0..n {
                let e = cycles[f][i].1;
                let (u, v) = (cycles[f][i].0, cycles[f][(i + 1) % n].0);
                let my_dir = if ff { (v, u) } else { (u, v) };
                for &(g, gu, gv) in &uses[e] {
                    if g == f && (gu, gv) == (u, v) {
                        continue;
                    }
                    // The other use must run the opposite way after flipping.
                    let need_flip = if gu == gv {
                        continue;
                    } else {
                        (gu, gv) == my_dir
                    };
                    match flip[g] {
                        None => {
                            flip[g] = Some(need_flip);
                            stack.push(g);
                        }
                        Some(x) if x != need_flip => return None,
                        _ => {}
                    }
                }
            }
        }
    }
    Some(flip.into_iter().map(|f| f.unwrap_or(false)).collect())
}

/// Face counts of S(1), ..., S(n_max).
pub fn face_count_series(spec: &GluingSpec, n_max: u32) -> Result<Vec<usize>, CoverError> {
    let mut state = CoverState::new(spec);
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        if n > 1 {
            state.expand()?;
        }
        out.push(state.open_slots().len());
    }
    Ok(out)
}

/// B(n) for `n >= 1`.
pub fn ball(spec: &GluingSpec, n: u32) -> Result<CoverState<'_>, CoverError> {
    let mut state = CoverState::new(spec);
    for _ in 1..n {
        state.expand()?;
    }
    Ok(state)
}
