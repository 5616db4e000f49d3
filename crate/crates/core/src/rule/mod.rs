//! Finite subdivision rules and finite replacement rules.
//!
//! Rules are data. A [`SubdivisionRule`] gives, per tile label, a disk
//! template whose boundary is the tile's boundary with each side cut into a
//! chain. A [`ReplacementRule`] is an ordered list of [`Group`]s: a pattern
//! of faces that is combined into one region, and the disk that replaces
//! that region. Statuses of the result are computed from edge incidences, and
//! saturated edges close up by identifying the two faces that flank them.
//!
//! Both kinds are read from TOML; see [`Rule::from_toml`].

mod matching;
mod parse;
mod replace;
mod subdivide;
mod validate;

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::tiling::TilingError;

pub use matching::{find_matches, Match};
pub use replace::{apply_replacement, Replacement};
pub use subdivide::apply_subdivision;
pub use validate::{validate_rule, Violation, ViolationKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("rule file: {0}")]
    Parse(String),
    #[error("face {face} has label `{label}`, which the rule does not know")]
    UnknownLabel { face: usize, label: String },
    #[error("face {face} has {found} sides but tile `{label}` has {expected}")]
    LengthMismatch { face: usize, label: String, expected: usize, found: usize },
    #[error("templates disagree on how edge {edge} is subdivided ({a} vs {b} pieces)")]
    SharedEdgeMismatch { edge: usize, a: usize, b: usize },
    #[error("face {face} (`{label}`) is not covered by any pattern")]
    UnmatchedFace { face: usize, label: String },
    #[error("edge {edge} has status {status} with cycle length {cycle}, which does not determine its incidence")]
    AmbiguousIncidence { edge: usize, status: crate::EdgeStatus, cycle: u32 },
    #[error("collapse across edge {edge} would identify mismatched flaps: {reason}")]
    FlapMismatch { edge: usize, reason: String },
    #[error("edge incidence {incidence} exceeds cycle length {cycle}")]
    IncidenceOverflow { incidence: u32, cycle: u32 },
    #[error("collapse left an edge with {0} faces around it")]
    NotClosed(usize),
    #[error("collapse happened in a rule that must refine its input")]
    CollapseInRefinement,
    #[error(transparent)]
    Tiling(#[from] TilingError),
}

/// A face of a pattern or template: a label and a cycle of names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedFace {
    pub label: String,
    pub names: Vec<usize>,
}

/// What a pattern requires of the edge it is matched onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StatusReq {
    Any,
    /// Loaded, or an added line.
    Connecting,
    NotConnecting,
    Loaded,
    Fragile,
    Plain,
    Added,
}

impl StatusReq {
    pub fn accepts(self, edge: &crate::tiling::Edge) -> bool {
        use crate::EdgeStatus::*;
        let connecting = edge.added || edge.status == Loaded;
        match self {
            StatusReq::Any => true,
            StatusReq::Connecting => connecting,
            StatusReq::NotConnecting => !connecting,
            StatusReq::Loaded => !edge.added && edge.status == Loaded,
            StatusReq::Fragile => !edge.added && edge.status == Fragile,
            StatusReq::Plain => !edge.added && edge.status == Plain,
            StatusReq::Added => edge.added,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternEdge {
    pub ends: (usize, usize),
    /// `(pattern face, side)` uses; two for interior edges, one on the boundary.
    pub uses: Vec<(usize, usize)>,
    pub status: StatusReq,
    pub cycle: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TemplateEdge {
    pub ends: (usize, usize),
    pub cycle: u32,
    pub added: bool,
}

/// Where an interior part of the pattern lands inside the template, for
/// rules that must refine their input.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Refine {
    pub vertices: Vec<(usize, usize)>,
    /// Pattern edge (by endpoint names) to a path of template names.
    pub edges: Vec<((usize, usize), Vec<usize>)>,
}

/// One local combination: matched faces are merged and replaced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Group {
    pub name: String,
    pub names: Vec<String>,
    pub pattern: Vec<NamedFace>,
    pub pattern_edges: Vec<PatternEdge>,
    pub template: Vec<NamedFace>,
    /// Template edges not on the pattern boundary.
    pub template_edges: Vec<TemplateEdge>,
    pub refine: Option<Refine>,
}

impl Group {
    pub fn name_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn pattern_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.pattern_edges.iter().position(|e| e.ends == (u, v) || e.ends == (v, u))
    }

    pub fn template_edge(&self, u: usize, v: usize) -> Option<usize> {
        self.template_edges.iter().position(|e| e.ends == (u, v) || e.ends == (v, u))
    }

    pub fn is_boundary_pattern_edge(&self, e: usize) -> bool {
        self.pattern_edges[e].uses.len() == 1
    }

    /// Pattern names that lie on the boundary of the pattern disk.
    pub fn boundary_names(&self) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.pattern_edges.iter().filter(|e| e.uses.len() == 1).flat_map(|e| [e.ends.0, e.ends.1]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReplacementRule {
    pub name: String,
    pub groups: Vec<Group>,
    /// Labels that only occur as parts of larger groups.
    pub fragments: Vec<String>,
}

impl ReplacementRule {
    /// True when every group says where its interior goes, so applications
    /// produce a refinement witness.
    pub fn refines(&self) -> bool {
        !self.groups.is_empty() && self.groups.iter().all(|g| g.refine.is_some())
    }

    /// The rule used on a single-square complex: one square becomes the five
    /// remaining faces of a cube glued onto it.
    pub fn single_face_subdivision() -> SubdivisionRule {
        Rule::from_toml(include_str!("../../data/rules/square.toml"))
            .and_then(|r| match r {
                Rule::Subdivision(s) => Ok(s),
                Rule::Replacement(_) => Err(RuleError::Parse("expected a subdivision rule".into())),
            })
            .expect("bundled rule parses")
    }
}

/// Subdivision template for one tile label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TileType {
    pub label: String,
    pub names: Vec<String>,
    pub corners: Vec<usize>,
    /// Chain of names along each side, from corner `i` to corner `i + 1`.
    pub sides: Vec<Vec<usize>>,
    pub faces: Vec<NamedFace>,
    pub interior_cycle: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionRule {
    pub name: String,
    pub tiles: Vec<TileType>,
}

impl SubdivisionRule {
    pub fn tile(&self, label: &str) -> Option<&TileType> {
        self.tiles.iter().find(|t| t.label == label)
    }

    /// The rule with no tile types, which maps the empty complex to itself.
    pub fn empty(name: &str) -> Self {
        SubdivisionRule { name: name.to_string(), tiles: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Rule {
    Subdivision(SubdivisionRule),
    Replacement(ReplacementRule),
}

impl Rule {
    pub fn from_toml(text: &str) -> Result<Rule, RuleError> {
        parse::parse_rule(text)
    }

    pub fn name(&self) -> &str {
        match self {
            Rule::Subdivision(r) => &r.name,
            Rule::Replacement(r) => &r.name,
        }
    }
}

pub(crate) fn name_table(names: &mut Vec<String>, index: &mut HashMap<String, usize>, name: &str) -> usize {
    if let Some(&i) = index.get(name) {
        return i;
    }
    names.push(name.to_string());
    index.insert(name.to_string(), names.len() - 1);
    names.len() - 1
}
