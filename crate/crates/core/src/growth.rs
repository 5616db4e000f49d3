//! Stage statistics and growth classification.
//!
//! Classification works on exact integer finite differences first. Only a
//! series that no difference table explains is called exponential, with the
//! ratio estimated from its tail.

use serde::Serialize;
use thiserror::Error;

use crate::library::{LibraryError, Mode, RuleCatalogEntry};
use crate::tiling::Tiling;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error("series has {0} entries; at least 4 are needed")]
    TooShort(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Growth {
    Empty,
    Constant { value: u64 },
    Polynomial { degree: usize },
    Exponential { ratio: f64 },
}

/// Tables a classification can be re-derived from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    /// `differences[d]` is the d-th finite difference of the series.
    pub differences: Vec<Vec<i128>>,
    /// Consecutive ratios `a[i+1] / a[i]`; `None` where `a[i] == 0`.
    pub ratios: Vec<Option<f64>>,
}

const MAX_DEGREE: usize = 4;
const TAIL: usize = 3;

/// True when the last `min(TAIL, len)` entries agree and there are at least two.
fn eventually_constant(xs: &[i128]) -> Option<i128> {
    let k = TAIL.min(xs.len());
    if k < 2 {
        return None;
    }
    let tail = &xs[xs.len() - k..];
    tail.iter().all(|&x| x == tail[0]).then_some(tail[0])
}

fn evidence(series: &[u64]) -> Evidence {
    let mut differences = vec![series.iter().map(|&x| x as i128).collect::<Vec<_>>()];
    for _ in 0..MAX_DEGREE {
        let last = differences.last().unwrap();
        if last.len() < 2 {
            break;
        }
        let next = last.windows(2).map(|w| w[1] - w[0]).collect();
        differences.push(next);
    }
    let ratios = series.windows(2).map(|w| (w[0] != 0).then(|| w[1] as f64 / w[0] as f64)).collect();
    Evidence { differences, ratios }
}

fn classify_evidence(series: &[u64], ev: &Evidence) -> Growth {
    if series.iter().all(|&x| x == 0) {
        return Growth::Empty;
    }
    if let Some(v) = eventually_constant(&ev.differences[0]) {
        return Growth::Constant { value: v as u64 };
    }
    for d in 1..ev.differences.len() {
        if let Some(v) = eventually_constant(&ev.differences[d]) {
            if v != 0 {
                return Growth::Polynomial { degree: d };
            }
        }
    }
    let n = series.len();
    let (a, b) = (series[n - 4] as f64, series[n - 1] as f64);
    let ratio = if a > 0.0 { (b / a).powf(1.0 / 3.0) } else { f64::INFINITY };
    Growth::Exponential { ratio }
}

/// Classifies a count series of length at least 4.
pub fn classify_growth(series: &[u64]) -> Result<(Growth, Evidence), GrowthError> {
    if series.len() < 4 {
        return Err(GrowthError::TooShort(series.len()));
    }
    let ev = evidence(series);
    Ok((classify_evidence(series, &ev), ev))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageCounts {
    pub stage: u32,
    pub faces: usize,
    pub edges: usize,
    pub vertices: usize,
    pub loaded_edges: usize,
    pub fragile_edges: usize,
    pub loaded_vertices: usize,
    pub components: usize,
    pub euler_characteristic: i64,
}

impl StageCounts {
    pub fn of(t: &Tiling) -> Self {
        StageCounts {
            stage: t.stage(),
            faces: t.face_count(),
            edges: t.edge_count(),
            vertices: t.vertex_count(),
            loaded_edges: t.loaded_edges().len(),
            fragile_edges: t.fragile_edges().len(),
            loaded_vertices: t.loaded_vertices().len(),
            components: t.component_count(),
            euler_characteristic: t.euler_characteristic(),
        }
    }
}

/// Where stages come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Engine(Mode),
    Cover,
}

/// How finely the faces of S(1) have been cut by a given stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeshStat {
    pub stage: u32,
    pub min_descendants: usize,
    pub max_descendants: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub rule: String,
    pub source: Source,
    pub series: Vec<StageCounts>,
    pub classification: Growth,
    pub evidence: Evidence,
    /// Present only when every step produced a total refinement witness.
    pub mesh: Option<Vec<MeshStat>>,
}

impl GrowthReport {
    pub fn face_counts(&self) -> Vec<u64> {
        self.series.iter().map(|s| s.faces as u64).collect()
    }

    /// Re-derives the classification from the evidence table.
    pub fn recheck(&self) -> bool {
        let series: Vec<u64> = self.evidence.differences[0].iter().map(|&x| x as u64).collect();
        series == self.face_counts() && classify_evidence(&series, &self.evidence) == self.classification
    }
}

/// Stage counts for stages 1..=n.
pub fn growth_series(entry: &RuleCatalogEntry, n: u32, source: Source) -> Result<Vec<StageCounts>, LibraryError> {
    let stages = match source {
        Source::Engine(mode) => entry.stages(n, mode)?,
        Source::Cover => entry.oracle_stages(n)?,
    };
    Ok(stages.iter().map(StageCounts::of).collect())
}

fn mesh_statistics(entry: &RuleCatalogEntry, n: u32, mode: Mode) -> Result<Option<Vec<MeshStat>>, LibraryError> {
    let mut t = entry.initial.clone();
    let roots = t.face_count();
    // Origin face in S(1) of every face of the current stage.
    let mut origin: Vec<usize> = (0..roots).collect();
    let tally = |origin: &[usize], stage: u32| {
        let mut counts = vec![0usize; roots];
        for &o in origin {
            counts[o] += 1;
        }
        MeshStat {
            stage,
            min_descendants: counts.iter().copied().min().unwrap_or(0),
            max_descendants: counts.iter().copied().max().unwrap_or(0),
        }
    };
    let mut out = vec![tally(&origin, t.stage())];
    for _ in 1..n {
        let step = entry.step(&t, mode)?;
        let mut next = vec![usize::MAX; step.tiling.face_count()];
        for (coarse, fine) in step.witness.face_map.iter().enumerate() {
            for &f in fine {
                next[f] = origin[coarse];
            }
        }
        if next.contains(&usize::MAX) {
            return Ok(None);
        }
        origin = next;
        t = step.tiling;
        out.push(tally(&origin, t.stage()));
    }
    Ok(Some(out))
}

/// Full report over stages 1..=n (n >= 4).
pub fn growth_report(entry: &RuleCatalogEntry, n: u32, source: Source) -> Result<GrowthReport, crate::Error> {
    let series = growth_series(entry, n, source)?;
    let faces: Vec<u64> = series.iter().map(|s| s.faces as u64).collect();
    let (classification, evidence) = classify_growth(&faces)?;
    let mesh = match source {
        Source::Engine(mode) => mesh_statistics(entry, n, mode)?,
        Source::Cover => None,
    };
    Ok(GrowthReport { rule: entry.name.clone(), source, series, classification, evidence, mesh })
}
