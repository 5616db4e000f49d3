//! Word-metric experiments in Cayley graphs: balls, almost convexity and
//! finite-depth cone types.
//!
//! Elements of every built-in group are integer triples. [`GroupSpec`]
//! multiplies them in normal form, so a ball is a plain breadth-first search
//! from the identity.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use petgraph::graph::UnGraph;
use serde::Serialize;
use thiserror::Error;

use crate::library::{LibraryError, Mode, RuleCatalogEntry};

pub type Elem = [i64; 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error("unknown group `{0}` (known: Z, Z3, heis, sol)")]
    UnknownGroup(String),
    #[error("ball exceeds the element limit of {0}")]
    Cap(usize),
    #[error("`{0}` is not a generator")]
    BadLetter(char),
    #[error("{0}")]
    Argument(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GroupKind {
    Z,
    Z3,
    Heis,
    Sol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub letter: char,
    pub elem: Elem,
    /// Index of the inverse generator.
    pub inverse: usize,
}

/// A finitely generated group with a normal form and a symmetric
/// generating set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSpec {
    pub name: String,
    pub kind: GroupKind,
    pub generators: Vec<Generator>,
}

type Mat = [[i64; 2]; 2];

fn mat_mul(a: Mat, b: Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Powers of the monodromy `[[2, 1], [1, 1]]`, negative powers included.
fn sol_power(k: i64) -> Mat {
    let step = if k >= 0 { [[2, 1], [1, 1]] } else { [[1, -1], [-1, 2]] };
    (0..k.unsigned_abs()).fold([[1, 0], [0, 1]], |acc, _| mat_mul(acc, step))
}

fn pairs(letters: &str, elems: &[Elem]) -> Vec<Generator> {
    let mut out = Vec::new();
    for (i, (c, e)) in letters.chars().zip(elems).enumerate() {
        out.push(Generator { letter: c, elem: *e, inverse: 2 * i + 1 });
        out.push(Generator { letter: c.to_ascii_uppercase(), elem: [-e[0], -e[1], -e[2]], inverse: 2 * i });
    }
    out
}

impl GroupSpec {
    /// `Z`, `Z3`, `heis` (generators x, y) or `sol` (generators a, b, t).
    pub fn builtin(name: &str) -> Result<Self, CayleyError> {
        let (kind, generators) = match name {
            "Z" | "z" => (GroupKind::Z, pairs("a", &[[1, 0, 0]])),
            "Z3" | "z3" => (GroupKind::Z3, pairs("abc", &[[1, 0, 0], [0, 1, 0], [0, 0, 1]])),
            "heis" | "nil" => (GroupKind::Heis, pairs("xy", &[[1, 0, 0], [0, 1, 0]])),
            "sol" => (GroupKind::Sol, pairs("abt", &[[1, 0, 0], [0, 1, 0], [0, 0, 1]])),
            other => return Err(CayleyError::UnknownGroup(other.to_string())),
        };
        let name = match kind {
            GroupKind::Z => "Z",
            GroupKind::Z3 => "Z3",
            GroupKind::Heis => "heis",
            GroupKind::Sol => "sol",
        };
        Ok(GroupSpec { name: name.into(), kind, generators })
    }

    pub fn identity(&self) -> Elem {
        [0, 0, 0]
    }

    pub fn multiply(&self, x: Elem, y: Elem) -> Elem {
        match self.kind {
            GroupKind::Z | GroupKind::Z3 => [x[0] + y[0], x[1] + y[1], x[2] + y[2]],
            // Upper unitriangular matrices: (a, b, c) has a, b above the
            // diagonal and c in the corner.
            GroupKind::Heis => [x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]],
            GroupKind::Sol => {
                let m = sol_power(x[2]);
                [x[0] + m[0][0] * y[0] + m[0][1] * y[1], x[1] + m[1][0] * y[0] + m[1][1] * y[1], x[2] + y[2]]
            }
        }
    }

    pub fn inverse(&self, x: Elem) -> Elem {
        match self.kind {
            GroupKind::Z | GroupKind::Z3 => [-x[0], -x[1], -x[2]],
            GroupKind::Heis => [-x[0], -x[1], -x[2] + x[0] * x[1]],
            GroupKind::Sol => {
                let m = sol_power(-x[2]);
                [-(m[0][0] * x[0] + m[0][1] * x[1]), -(m[1][0] * x[0] + m[1][1] * x[1]), -x[2]]
            }
        }
    }

    pub fn letter(&self, c: char) -> Option<usize> {
        self.generators.iter().position(|g| g.letter == c)
    }

    /// Normal form of a word in the generator letters.
    pub fn eval(&self, word: &str) -> Result<Elem, CayleyError> {
        word.chars().try_fold(self.identity(), |acc, c| {
            let g = self.letter(c).ok_or(CayleyError::BadLetter(c))?;
            Ok(self.multiply(acc, self.generators[g].elem))
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: String = self.generators.iter().map(|g| g.letter).collect();
        write!(f, "{} <{}>", self.name, letters)
    }
}

/// Default cap on ball sizes.
pub const DEFAULT_ELEMENT_LIMIT: usize = 1_000_000;

/// The ball of radius `radius` around the identity.
#[derive(Clone, Debug)]
pub struct BallData {
    pub radius: u32,
    /// Sorted by `(length, element)`.
    pub elements: Vec<Elem>,
    pub lengths: Vec<u32>,
    /// `adjacency[i][g]`: index of `elements[i] * generator g`, when inside the ball.
    pub adjacency: Vec<Vec<Option<usize>>>,
    index: HashMap<Elem, usize>,
}

impl BallData {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &Elem) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn length_of(&self, x: &Elem) -> Option<u32> {
        self.index_of(x).map(|i| self.lengths[i])
    }

    /// Indices of the sphere of radius `k`.
    pub fn sphere(&self, k: u32) -> std::ops::Range<usize> {
        let start = self.lengths.partition_point(|&l| l < k);
        let end = self.lengths.partition_point(|&l| l <= k);
        start..end
    }

    /// Size of the ball of radius `k <= radius`.
    pub fn ball_size(&self, k: u32) -> usize {
        self.lengths.partition_point(|&l| l <= k)
    }
}

pub fn ball(g: &GroupSpec, radius: u32) -> Result<BallData, CayleyError> {
    ball_with_limit(g, radius, DEFAULT_ELEMENT_LIMIT)
}

pub fn ball_with_limit(g: &GroupSpec, radius: u32, limit: usize) -> Result<BallData, CayleyError> {
    let mut dist: HashMap<Elem, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(g.identity(), 0);
    queue.push_back(g.identity());
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d == radius {
            continue;
        }
        for s in &g.generators {
            let y = g.multiply(x, s.elem);
            if !dist.contains_key(&y) {
                if dist.len() >= limit {
                    return Err(CayleyError::Cap(limit));
                }
                dist.insert(y, d + 1);
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<(u32, Elem)> = dist.into_iter().map(|(e, d)| (d, e)).collect();
    elements.sort_unstable();
    let index: HashMap<Elem, usize> = elements.iter().enumerate().map(|(i, &(_, e))| (e, i)).collect();
    let adjacency = elements
        .iter()
        .map(|&(_, x)| g.generators.iter().map(|s| index.get(&g.multiply(x, s.elem)).copied()).collect())
        .collect();
    Ok(BallData {
        radius,
        lengths: elements.iter().map(|&(d, _)| d).collect(),
        elements: elements.into_iter().map(|(_, e)| e).collect(),
        adjacency,
        index,
    })
}

/// One row of an almost convexity table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcRow {
    pub n: u32,
    /// Unordered pairs in S(n) at distance at most m.
    pub pairs: usize,
    /// Longest shortest path inside B(n) over those pairs; `None` when
    /// there are no pairs. Disconnected pairs count as `u32::MAX`.
    pub k: Option<u32>,
    /// Maximum of `k` over radii up to `n`.
    pub running_max: Option<u32>,
}

/// K(m, n) for n = 1..=n_max.
pub fn almost_convexity_profile(g: &GroupSpec, n_max: u32, m: u32) -> Result<Vec<AcRow>, CayleyError> {
    almost_convexity_profile_with_limit(g, n_max, m, DEFAULT_ELEMENT_LIMIT)
}

pub fn almost_convexity_profile_with_limit(
    g: &GroupSpec,
    n_max: u32,
    m: u32,
    limit: usize,
) -> Result<Vec<AcRow>, CayleyError> {
    if m < 1 {
        return Err(CayleyError::Argument("m must be at least 1".into()));
    }
    let big = ball_with_limit(g, n_max, limit)?;
    let mut rows = Vec::new();
    let mut running: Option<u32> = None;
    for n in 1..=n_max {
        let sphere = big.sphere(n);
        let inside = big.ball_size(n);
        let mut k: Option<u32> = None;
        let mut pairs = 0;
        for i in sphere.clone() {
            let targets = near_sphere_points(g, &big, i, n, m);
            let targets: Vec<usize> = targets.into_iter().filter(|&j| j > i).collect();
            if targets.is_empty() {
                continue;
            }
            pairs += targets.len();
            let dist = restricted_bfs(&big, i, inside, &targets);
            for j in targets {
                let d = dist.get(&j).copied().unwrap_or(u32::MAX);
                k = Some(k.map_or(d, |x| x.max(d)));
            }
        }
        if let Some(v) = k {
            running = Some(running.map_or(v, |r| r.max(v)));
        }
        rows.push(AcRow { n, pairs, k, running_max: running });
    }
    Ok(rows)
}

/// Sphere points within word distance `m` of `elements[i]`, measured in
/// the whole group.
fn near_sphere_points(g: &GroupSpec, ball: &BallData, i: usize, n: u32, m: u32) -> Vec<usize> {
    let start = ball.elements[i];
    let mut seen: HashSet<Elem> = HashSet::from([start]);
    let mut frontier = vec![start];
    let mut out = Vec::new();
    for _ in 0..m {
        let mut next = Vec::new();
        for x in frontier {
            for s in &g.generators {
                let y = g.multiply(x, s.elem);
                if seen.insert(y) {
                    if let Some(j) = ball.index_of(&y) {
                        if ball.lengths[j] == n {
                            out.push(j);
                        }
                    }
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    out.sort_unstable();
    out
}

/// Distances from `src` to `targets`, moving only through the first
/// `inside` elements of the ball.
fn restricted_bfs(ball: &BallData, src: usize, inside: usize, targets: &[usize]) -> HashMap<usize, u32> {
    let wanted: HashSet<usize> = targets.iter().copied().collect();
    let mut dist: HashMap<usize, u32> = HashMap::from([(src, 0)]);
    let mut found = HashMap::new();
    let mut queue = VecDeque::from([src]);
    while let Some(x) = queue.pop_front() {
        if found.len() == wanted.len() {
            break;
        }
        for &y in ball.adjacency[x].iter().flatten() {
            if y < inside && !dist.contains_key(&y) {
                let d = dist[&x] + 1;
                dist.insert(y, d);
                if wanted.contains(&y) {
                    found.insert(y, d);
                }
                queue.push_back(y);
            }
        }
    }
    found
}

/// When two shadows count as the same cone type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeEquivalence {
    /// Isomorphism preserving the base point and every generator label.
    #[default]
    Labeled,
    /// As `Labeled`, after optionally swapping each generator with its
    /// inverse throughout.
    UpToInversion,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeTypeReport {
    pub group: String,
    pub radius: u32,
    pub depth: u32,
    pub equivalence: ConeEquivalence,
    /// Number of elements classified.
    pub population: usize,
    pub classes: usize,
    /// One element per class, in order of first appearance on the sphere.
    pub representatives: Vec<Elem>,
    pub class_sizes: Vec<usize>,
}

/// Elements `w` of B(depth) with `|v w| = |v| + |w|`: the part of the
/// shadow of `v` within `depth` steps, translated back to the identity.
fn shadow(g: &GroupSpec, big: &BallData, small: &BallData, v: Elem, n: u32) -> HashSet<Elem> {
    small
        .elements
        .iter()
        .zip(&small.lengths)
        .filter(|(w, &lw)| big.length_of(&g.multiply(v, **w)) == Some(n + lw))
        .map(|(w, _)| *w)
        .collect()
}

/// Breadth-first code of a based, generator-labeled graph; `relabel[s]` is
/// the label generator `s` is read as.
fn shadow_code(g: &GroupSpec, set: &HashSet<Elem>, relabel: &[usize]) -> Vec<Option<u32>> {
    let ng = g.generators.len();
    let mut order: Vec<Elem> = vec![g.identity()];
    let mut number: HashMap<Elem, u32> = HashMap::from([(g.identity(), 0)]);
    let mut code = Vec::with_capacity(set.len() * ng);
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        let mut row = vec![None; ng];
        for (s, gen) in g.generators.iter().enumerate() {
            let y = g.multiply(x, gen.elem);
            if !set.contains(&y) {
                continue;
            }
            let id = *number.entry(y).or_insert_with(|| {
                order.push(y);
                order.len() as u32 - 1
            });
            row[relabel[s]] = Some(id);
        }
        code.extend(row);
    }
    code
}

fn relabelings(g: &GroupSpec, eq: ConeEquivalence) -> Vec<Vec<usize>> {
    let ng = g.generators.len();
    match eq {
        ConeEquivalence::Labeled => vec![(0..ng).collect()],
        ConeEquivalence::UpToInversion => {
            let pairs = ng / 2;
            (0..1u32 << pairs)
                .map(|mask| {
                    (0..ng).map(|s| if mask >> (s / 2) & 1 == 1 { g.generators[s].inverse } else { s }).collect()
                })
                .collect()
        }
    }
}

/// Classifies S(n) by depth-`k` shadows.
pub fn cone_type_count(g: &GroupSpec, n: u32, k: u32, eq: ConeEquivalence) -> Result<ConeTypeReport, CayleyError> {
    cone_type_count_with_limit(g, n, k, eq, DEFAULT_ELEMENT_LIMIT)
}

pub fn cone_type_count_with_limit(
    g: &GroupSpec,
    n: u32,
    k: u32,
    eq: ConeEquivalence,
    limit: usize,
) -> Result<ConeTypeReport, CayleyError> {
    if n < 1 || k < 1 {
        return Err(CayleyError::Argument("radius and depth must be at least 1".into()));
    }
    classify_shadows(g, n, n, k, eq, limit)
}

/// Classifies every element of B(n - 1) by depth-`k` shadows, the
/// identity included.
pub fn interior_cone_type_count(
    g: &GroupSpec,
    n: u32,
    k: u32,
    eq: ConeEquivalence,
) -> Result<ConeTypeReport, CayleyError> {
    if n < 1 || k < 1 {
        return Err(CayleyError::Argument("radius and depth must be at least 1".into()));
    }
    classify_shadows(g, 0, n - 1, k, eq, DEFAULT_ELEMENT_LIMIT)
}

fn classify_shadows(
    g: &GroupSpec,
    lo: u32,
    hi: u32,
    k: u32,
    eq: ConeEquivalence,
    limit: usize,
) -> Result<ConeTypeReport, CayleyError> {
    let big = ball_with_limit(g, hi + k, limit)?;
    let small = ball_with_limit(g, k, limit)?;
    let maps = relabelings(g, eq);
    let mut classes: BTreeMap<Vec<Option<u32>>, usize> = BTreeMap::new();
    let mut representatives = Vec::new();
    let mut class_sizes: Vec<usize> = Vec::new();
    let range = big.sphere(lo).start..big.sphere(hi).end;
    for i in range.clone() {
        let v = big.elements[i];
        let set = shadow(g, &big, &small, v, big.lengths[i]);
        let code = maps.iter().map(|m| shadow_code(g, &set, m)).min().expect("at least one relabeling");
        match classes.get(&code) {
            Some(&c) => class_sizes[c] += 1,
            None => {
                classes.insert(code, representatives.len());
                representatives.push(v);
                class_sizes.push(1);
            }
        }
    }
    Ok(ConeTypeReport {
        group: g.name.clone(),
        radius: hi,
        depth: k,
        equivalence: eq,
        population: range.len(),
        classes: representatives.len(),
        representatives,
        class_sizes,
    })
}

/// The Cayley graph restricted to B(radius).
pub fn ball_graph(b: &BallData) -> UnGraph<(), ()> {
    let mut graph = UnGraph::new_undirected();
    let nodes: Vec<_> = (0..b.len()).map(|_| graph.add_node(())).collect();
    for (i, row) in b.adjacency.iter().enumerate() {
        for &j in row.iter().flatten() {
            if i < j {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    graph
}

/// Cells of the cover rebuilt from a replacement rule: one cell for the
/// starting complex, one per matched group at each step. A new cell is
/// joined to the owners of the tiles it covers, and to the cell on the other
/// side of every face pair a collapse identifies.
pub fn rule_cell_graph(entry: &RuleCatalogEntry, steps: u32) -> Result<UnGraph<(), ()>, LibraryError> {
    let rule = entry
        .replacement
        .as_ref()
        .ok_or_else(|| LibraryError::ModeUnavailable { name: entry.name.clone(), mode: Mode::Replacement })?;
    let mut graph = UnGraph::new_undirected();
    let root = graph.add_node(());
    let mut t = entry.initial.clone();
    let mut owner = vec![root; t.face_count()];
    for _ in 0..steps {
        let r = crate::rule::apply_replacement(rule, &t)?;
        let mut next = vec![None; r.tiling.face_count()];
        for m in &r.matches {
            let cell = graph.add_node(());
            let mut neighbours: Vec<_> = m.faces.iter().map(|&f| owner[f]).collect();
            neighbours.sort();
            neighbours.dedup();
            for nb in neighbours {
                graph.add_edge(nb, cell, ());
            }
            for &f in &m.faces {
                for &fine in &r.witness.face_map[f] {
                    next[fine] = Some(cell);
                }
            }
        }
        if r.collapses > 0 || next.iter().any(Option::is_none) {
            return Err(LibraryError::Load {
                path: entry.name.clone(),
                message: "cell graph reconstruction needs a collapse-free rule".into(),
            });
        }
        owner = next.into_iter().map(Option::unwrap).collect();
        t = r.tiling;
    }
    Ok(graph)
}

/// Whether the cells produced while building S(1), ..., S(n) with the
/// entry's replacement rule form the Cayley graph of `g` on B(n - 1).
pub fn rule_matches_cayley_ball(entry: &RuleCatalogEntry, g: &GroupSpec, n: u32) -> Result<bool, crate::Error> {
    if n < 1 {
        return Err(CayleyError::Argument("stage must be at least 1".into()).into());
    }
    let cells = rule_cell_graph(entry, n - 1)?;
    let cayley = ball_graph(&ball(g, n - 1)?);
    Ok(petgraph::algo::is_isomorphic(&cells, &cayley))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_and_words() {
        for name in ["Z", "Z3", "heis", "sol"] {
            let g = GroupSpec::builtin(name).unwrap();
            let x = g.eval("abAB".chars().filter(|c| g.letter(*c).is_some()).collect::<String>().as_str()).unwrap();
            assert_eq!(g.multiply(x, g.inverse(x)), g.identity());
            for s in &g.generators {
                assert_eq!(g.multiply(s.elem, g.generators[s.inverse].elem), g.identity());
            }
        }
    }

    #[test]
    fn heisenberg_commutator_is_central() {
        let g = GroupSpec::builtin("heis").unwrap();
        let c = g.eval("xyXY").unwrap();
        assert_ne!(c, g.identity());
        assert_eq!(g.multiply(c, g.eval("x").unwrap()), g.multiply(g.eval("x").unwrap(), c));
    }

    #[test]
    fn small_balls() {
        assert_eq!(ball(&GroupSpec::builtin("Z").unwrap(), 3).unwrap().len(), 7);
        assert_eq!(ball(&GroupSpec::builtin("Z3").unwrap(), 2).unwrap().len(), 25);
        assert_eq!(ball(&GroupSpec::builtin("heis").unwrap(), 2).unwrap().len(), 17);
    }

    #[test]
    fn cap_is_enforced() {
        let g = GroupSpec::builtin("sol").unwrap();
        assert_eq!(ball_with_limit(&g, 6, 100).unwrap_err(), CayleyError::Cap(100));
    }
}
