//! Isomorphism of labeled tilings.
//!
//! Two tilings are isomorphic when a bijection of darts commutes with
//! `next` and `twin` and preserves face labels, edge statuses, edge cycle
//! lengths and the added-line flag. Mirror images count as isomorphic.
//!
//! The canonical form is the lexicographically least breadth-first
//! relabeling code, taken over starting darts in the rarest colour class of
//! a few rounds of colour refinement, and over both orientations.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, VecDeque};
use std::hash::{Hash, Hasher};

use crate::tiling::{EdgeStatus, Tiling};

/// One dart of the canonical code: new ids of `next` and `twin`, then
/// attributes of its face and edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DartCode {
    pub next: u32,
    pub twin: u32,
    pub label: u32,
    pub status: EdgeStatus,
    pub cycle: u32,
    pub added: bool,
}

/// Canonical form of a connected tiling; disconnected tilings are
/// represented by the sorted list of their component forms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    pub labels: Vec<String>,
    pub components: Vec<Vec<DartCode>>,
}

pub fn canonical_form(t: &Tiling) -> CanonicalForm {
    let mut labels: Vec<String> = t.faces().iter().map(|f| f.label.clone()).collect();
    labels.sort();
    labels.dedup();
    let mut components: Vec<Vec<DartCode>> = t
        .components()
        .iter()
        .map(|c| {
            let mirror = c.mirrored();
            let a = connected_form(c, &labels);
            let b = connected_form(&mirror, &labels);
            a.min(b)
        })
        .collect();
    components.sort();
    CanonicalForm { labels, components }
}

pub fn is_isomorphic(a: &Tiling, b: &Tiling) -> bool {
    if a.face_count() != b.face_count() || a.edge_count() != b.edge_count() || a.vertex_count() != b.vertex_count() {
        return false;
    }
    if a.component_count() == 1 && b.component_count() == 1 {
        return connected_isomorphic(a, b);
    }
    canonical_form(a) == canonical_form(b)
}

fn hash_of<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

/// Isomorphism-invariant colours of darts after a few refinement rounds.
fn dart_colors(t: &Tiling) -> Vec<u64> {
    let n = t.half_edge_count();
    let mut color: Vec<u64> = (0..n)
        .map(|h| {
            let f = t.half_edge_face(h);
            let e = t.edge(t.half_edge_edge(h));
            hash_of(&(
                t.face_label(f),
                t.face_len(f),
                e.status,
                e.cycle,
                e.added,
                t.degree(t.origin(h)),
                t.degree(t.target(h)),
            ))
        })
        .collect();
    for _ in 0..3 {
        color = (0..n).map(|h| hash_of(&(color[h], color[t.next(h)], color[t.prev(h)], color[t.twin(h)]))).collect();
    }
    color
}

fn rarest_class(colors: &[u64]) -> (u64, Vec<usize>) {
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for &c in colors {
        *counts.entry(c).or_default() += 1;
    }
    let (&best, _) = counts.iter().min_by_key(|(&c, &n)| (n, c)).expect("nonempty");
    let members = (0..colors.len()).filter(|&h| colors[h] == best).collect();
    (best, members)
}

fn code_from(t: &Tiling, start: usize, labels: &[String], bound: Option<&[DartCode]>) -> Option<Vec<DartCode>> {
    let n = t.half_edge_count();
    let mut id = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    id[start] = 0;
    order.push(start);
    queue.push_back(start);
    let mut code = Vec::with_capacity(n);
    let mut tight = bound.is_some();
    let mut next_pos = 0;
    while let Some(h) = queue.pop_front() {
        for nb in [t.next(h), t.twin(h)] {
            if id[nb] == u32::MAX {
                id[nb] = order.len() as u32;
                order.push(nb);
                queue.push_back(nb);
            }
        }
        let e = t.edge(t.half_edge_edge(h));
        let label =
            labels.binary_search_by(|l| l.as_str().cmp(t.face_label(t.half_edge_face(h)))).expect("label known") as u32;
        let dc = DartCode {
            next: id[t.next(h)],
            twin: id[t.twin(h)],
            label,
            status: e.status,
            cycle: e.cycle,
            added: e.added,
        };
        if tight {
            let b = &bound.unwrap()[next_pos];
            match dc.cmp(b) {
                std::cmp::Ordering::Greater => return None,
                std::cmp::Ordering::Less => tight = false,
                std::cmp::Ordering::Equal => {}
            }
        }
        next_pos += 1;
        code.push(dc);
    }
    Some(code)
}

fn connected_form(t: &Tiling, labels: &[String]) -> Vec<DartCode> {
    if t.half_edge_count() == 0 {
        return Vec::new();
    }
    let colors = dart_colors(t);
    let (_, starts) = rarest_class(&colors);
    let mut best: Option<Vec<DartCode>> = None;
    for s in starts {
        if let Some(code) = code_from(t, s, labels, best.as_deref()) {
            if best.as_ref().is_none_or(|b| code < *b) {
                best = Some(code);
            }
        }
    }
    best.unwrap_or_default()
}

fn connected_isomorphic(a: &Tiling, b: &Tiling) -> bool {
    let mut labels: Vec<String> = a.faces().iter().chain(b.faces()).map(|f| f.label.clone()).collect();
    labels.sort();
    labels.dedup();
    let ca = dart_colors(a);
    let (color, starts) = rarest_class(&ca);
    let start = starts[0];
    let target = code_from(a, start, &labels, None).expect("unbounded");
    for candidate in [b.clone(), b.mirrored()] {
        let cb = dart_colors(&candidate);
        for h in (0..cb.len()).filter(|&h| cb[h] == color) {
            if code_from(&candidate, h, &labels, Some(&target)).is_some_and(|c| c == target) {
                return true;
            }
        }
    }
    false
}
