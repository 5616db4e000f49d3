use std::collections::HashMap;

use crate::tiling::{EdgeStatus, RefinementWitness, Side, Tiling, TilingBuilder};

use super::{RuleError, SubdivisionRule, TileType};

struct Split {
    /// Vertices along the edge from `ends.0` to `ends.1`, endpoints included.
    path: Vec<usize>,
    /// Fine edge ids of the pieces, in the same order.
    pieces: Vec<usize>,
}

/// Replaces every face of `t` by its tile type's template. Coarse edges are
/// cut once, by whichever face reaches them first, and the other face must
/// agree on the number of pieces.
pub fn apply_subdivision(rule: &SubdivisionRule, t: &Tiling) -> Result<(Tiling, RefinementWitness), RuleError> {
    let mut tiles: Vec<&TileType> = Vec::with_capacity(t.face_count());
    for f in 0..t.face_count() {
        let label = t.face_label(f);
        let tile = rule.tile(label).ok_or_else(|| RuleError::UnknownLabel { face: f, label: label.to_string() })?;
        if tile.corners.len() != t.face_len(f) {
            return Err(RuleError::LengthMismatch {
                face: f,
                label: label.to_string(),
                expected: tile.corners.len(),
                found: t.face_len(f),
            });
        }
        tiles.push(tile);
    }

    let mut b = TilingBuilder::new(t.stage() + 1);
    b.ensure_vertices(t.vertex_count());
    let mut splits: Vec<Option<Split>> = (0..t.edge_count()).map(|_| None).collect();
    for f in 0..t.face_count() {
        let tile = tiles[f];
        for (i, h) in t.face_half_edges(f).enumerate() {
            let e = t.half_edge_edge(h);
            let pieces = tile.sides[i].len() - 1;
            match &splits[e] {
                Some(s) if s.pieces.len() != pieces => {
                    return Err(RuleError::SharedEdgeMismatch { edge: e, a: s.pieces.len(), b: pieces });
                }
                Some(_) => {}
                None => {
                    let (u, v) = t.edge_endpoints(e);
                    let mut path = vec![u];
                    path.extend((1..pieces).map(|_| b.add_vertex()));
                    path.push(v);
                    let coarse = t.edge(e);
                    let ids = path
                        .windows(2)
                        .map(|w| b.add_edge(w[0], w[1], coarse.status, coarse.cycle, coarse.added))
                        .collect();
                    splits[e] = Some(Split { path, pieces: ids });
                }
            }
        }
    }
    let splits: Vec<Split> = splits.into_iter().map(|s| s.expect("every edge lies on a face")).collect();

    let mut face_map = vec![Vec::new(); t.face_count()];
    for f in 0..t.face_count() {
        let tile = tiles[f];
        let mut vertex_of: Vec<Option<usize>> = vec![None; tile.names.len()];
        // (from name, to name) -> side
        let mut boundary: HashMap<(usize, usize), Side> = HashMap::new();
        for (i, h) in t.face_half_edges(f).enumerate() {
            let e = t.half_edge_edge(h);
            let forward = h == t.edge_half_edges(e)[0];
            let chain = &tile.sides[i];
            let split = &splits[e];
            let k = split.pieces.len();
            for (j, &name) in chain.iter().enumerate() {
                let idx = if forward { j } else { k - j };
                vertex_of[name] = Some(split.path[idx]);
            }
            for j in 0..k {
                let side = if forward {
                    Side { edge: split.pieces[j], forward: true }
                } else {
                    Side { edge: split.pieces[k - 1 - j], forward: false }
                };
                boundary.insert((chain[j], chain[j + 1]), side);
            }
        }
        for v in vertex_of.iter_mut().filter(|v| v.is_none()) {
            *v = Some(b.add_vertex());
        }
        let vertex_of: Vec<usize> = vertex_of.into_iter().map(Option::unwrap).collect();
        let mut interior: HashMap<(usize, usize), usize> = HashMap::new();
        for face in &tile.faces {
            let n = face.names.len();
            let mut sides = Vec::with_capacity(n);
            for i in 0..n {
                let (x, y) = (face.names[i], face.names[(i + 1) % n]);
                if let Some(&side) = boundary.get(&(x, y)) {
                    sides.push(side);
                    continue;
                }
                let key = (x.min(y), x.max(y));
                let edge = *interior.entry(key).or_insert_with(|| {
                    b.add_edge(vertex_of[key.0], vertex_of[key.1], EdgeStatus::Plain, tile.interior_cycle, false)
                });
                sides.push(Side { edge, forward: x == key.0 });
            }
            face_map[f].push(b.add_face(face.label.clone(), sides));
        }
    }

    let tiling = b.build()?;
    let witness = RefinementWitness {
        vertex_map: (0..t.vertex_count()).map(Some).collect(),
        edge_map: splits.into_iter().map(|s| s.pieces).collect(),
        face_map,
    };
    Ok((tiling, witness))
}
