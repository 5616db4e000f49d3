//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use std::collections::HashSet;

use subdiv_core::{EdgeStatus, Side, Tiling, TilingBuilder};

pub type Cell = [i64; 3];

/// Unit cubes of the cubical lattice whose L¹ index norm is below `n`:
/// the cells of the cube cover after `n` stages.
pub fn lattice_ball(n: u32) -> HashSet<Cell> {
    let r = n as i64 - 1;
    let mut out = HashSet::new();
    for x in -r..=r {
        for y in -r..=r {
            for z in -r..=r {
                if x.abs() + y.abs() + z.abs() <= r {
                    out.insert([x, y, z]);
                }
            }
        }
    }
    out
}

const DIRS: [Cell; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];

fn add(a: Cell, b: Cell) -> Cell {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Faces of the ball that touch a cell outside it.
pub fn exposed_faces(ball: &HashSet<Cell>) -> usize {
    ball.iter().map(|&c| DIRS.iter().filter(|&&d| !ball.contains(&add(c, d))).count()).sum()
}

/// Number of ball cells around every lattice edge, keyed by the edge's
/// lower endpoint and axis. Lattice point p is the corner shared by cells
/// p - (0|1, 0|1, 0|1).
fn edge_incidences(ball: &HashSet<Cell>) -> Vec<(Cell, usize, usize)> {
    let mut edges = HashSet::new();
    for &c in ball {
        for axis in 0..3 {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            for da in 0..2 {
                for db in 0..2 {
                    let mut p = c;
                    p[a] += da;
                    p[b] += db;
                    edges.insert((p, axis));
                }
            }
        }
    }
    let mut out: Vec<(Cell, usize, usize)> = edges
        .into_iter()
        .map(|(p, axis)| {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut count = 0;
            for da in 0..2 {
                for db in 0..2 {
                    let mut c = p;
                    c[a] -= da;
                    c[b] -= db;
                    count += ball.contains(&c) as usize;
                }
            }
            (p, axis, count)
        })
        .collect();
    out.sort();
    out
}

/// Boundary edges touching exactly three ball cells.
pub fn loaded_edge_count(ball: &HashSet<Cell>) -> usize {
    edge_incidences(ball).iter().filter(|e| e.2 == 3).count()
}

/// Boundary vertices all of whose boundary edges touch three cells.
pub fn loaded_vertex_count(ball: &HashSet<Cell>) -> usize {
    let edges = edge_incidences(ball);
    let mut by_point: std::collections::HashMap<Cell, Vec<usize>> = std::collections::HashMap::new();
    for &(p, axis, count) in &edges {
        let mut q = p;
        q[axis] += 1;
        for end in [p, q] {
            by_point.entry(end).or_default().push(count);
        }
    }
    by_point
        .values()
        .filter(|counts| {
            let boundary: Vec<usize> = counts.iter().copied().filter(|&c| (1..4).contains(&c)).collect();
            !boundary.is_empty() && boundary.iter().all(|&c| c == 3)
        })
        .count()
}

/// (vertices, edges, faces) of the boundary surface of the ball.
pub fn boundary_counts(ball: &HashSet<Cell>) -> (usize, usize, usize) {
    let mut vertices = HashSet::new();
    let mut edges = 0;
    for (p, axis, count) in edge_incidences(ball) {
        if (1..4).contains(&count) {
            edges += 1;
            let mut q = p;
            q[axis] += 1;
            vertices.insert(p);
            vertices.insert(q);
        }
    }
    (vertices.len(), edges, exposed_faces(ball))
}

/// Size of the L¹ ball of radius r in Z³, by the closed form
/// Σ_k 2^k C(3, k) C(r, k).
pub fn l1_ball_size(r: u64) -> u64 {
    fn choose(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    (0..=3).map(|k| (1 << k) * choose(3, k) * choose(r, k)).sum()
}

/// Exposed faces of the cube cover at stage n, in closed form.
pub fn cube_face_count(n: u64) -> u64 {
    12 * (n - 1) * (n - 1) + 12 * (n - 1) + 6
}

pub fn cube() -> Tiling {
    let mut b = TilingBuilder::new(1).default_cycle(4);
    for face in [[0, 3, 2, 1], [4, 5, 6, 7], [0, 1, 5, 4], [1, 2, 6, 5], [2, 3, 7, 6], [3, 0, 4, 7]] {
        b.add_face_by_vertices("sq", &face).unwrap();
    }
    b.build().unwrap()
}

pub fn tetrahedron() -> Tiling {
    let mut b = TilingBuilder::new(1);
    for face in [[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]] {
        b.add_face_by_vertices("tri", &face).unwrap();
    }
    b.build().unwrap()
}

/// One square with opposite sides identified.
pub fn square_torus() -> Tiling {
    let mut b = TilingBuilder::new(1);
    let v = b.add_vertex();
    let a = b.add_edge(v, v, EdgeStatus::Plain, 4, false);
    let c = b.add_edge(v, v, EdgeStatus::Plain, 4, false);
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

/// Root of 10·asin(1/(1+r)) = 2π by bisection.
pub fn five_flower_radius() -> f64 {
    let f = |r: f64| 10.0 * (1.0 / (1.0 + r)).asin() - 2.0 * std::f64::consts::PI;
    let (mut lo, mut hi) = (1e-6, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of Z³ cone types on the sphere of radius n, by brute force over
/// integer vectors: the depth-k shadow of v is the set of w with |w| ≤ k and
/// |v + w| = |v| + |w| in the L¹ norm.
pub fn z3_cone_classes(n: i64, k: i64) -> usize {
    let norm = |p: Cell| p[0].abs() + p[1].abs() + p[2].abs();
    let mut small = Vec::new();
    for x in -k..=k {
        for y in -k..=k {
            for z in -k..=k {
                if norm([x, y, z]) <= k {
                    small.push([x, y, z]);
                }
            }
        }
    }
    small.sort();
    let mut classes = HashSet::new();
    for x in -n..=n {
        for y in -n..=n {
            for z in -n..=n {
                let v = [x, y, z];
                if norm(v) != n {
                    continue;
                }
                let key: Vec<Cell> = small.iter().copied().filter(|&w| norm(add(v, w)) == n + norm(w)).collect();
                classes.insert(key);
            }
        }
    }
    classes.len()
}
