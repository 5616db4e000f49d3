//! Named built-in rules with their initial complexes.
//!
//! Every entry bundles the rule files it needs (see `data/rules`) and the
//! stage S(1) it starts from. Entries that come from a polyhedral gluing name
//! that gluing as their companion, so stages can be checked against the
//! cover directly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::Serialize;
use thiserror::Error;

use crate::cover::{CoverError, CoverState};
use crate::glue::{GlueError, GluingSpec};
use crate::rule::{apply_replacement, apply_subdivision, ReplacementRule, Rule, RuleError, SubdivisionRule};
use crate::tiling::{RefinementWitness, Tiling, TilingBuilder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Geometry {
    E3,
    H2xR,
    SL2R,
    S2xR,
    S3,
    Demo,
    User,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Geometry::E3 => "E3",
            Geometry::H2xR => "H2xR",
            Geometry::SL2R => "SL2R",
            Geometry::S2xR => "S2xR",
            Geometry::S3 => "S3",
            Geometry::Demo => "demo",
            Geometry::User => "user",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Groups are combined and replaced; old edges may disappear.
    Replacement,
    /// Every stage refines the previous one.
    Subdivision,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Replacement => "replacement",
            Mode::Subdivision => "subdivision",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "replacement" => Ok(Mode::Replacement),
            "subdivision" => Ok(Mode::Subdivision),
            other => Err(format!("unknown mode `{other}`, expected replacement or subdivision")),
        }
    }
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("unknown rule `{name}`{}", suggest(.suggestions))]
    UnknownRule { name: String, suggestions: Vec<String> },
    #[error("unknown gluing spec `{name}`{}", suggest(.suggestions))]
    UnknownSpec { name: String, suggestions: Vec<String> },
    #[error("rule `{name}` has no {mode} mode")]
    ModeUnavailable { name: String, mode: Mode },
    #[error("rule `{name}` has no companion gluing spec")]
    NoSpec { name: String },
    #[error("{path}: {message}")]
    Load { path: String, message: String },
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

fn suggest(names: &[String]) -> String {
    if names.is_empty() {
        String::new()
    } else {
        format!(" (did you mean {}?)", names.join(", "))
    }
}

/// Names in `known` close enough to `name` to be worth suggesting.
pub fn suggestions<'a>(name: &str, known: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = known
        .into_iter()
        .map(|k| (strsim::levenshtein(name, k), k))
        .filter(|&(d, k)| d <= 2.max(k.len() / 3) || k.starts_with(name) || name.starts_with(k))
        .collect();
    scored.sort();
    scored.into_iter().map(|(_, k)| k.to_string()).collect()
}

const SPECS: [(&str, &str); 4] = [
    ("cube", include_str!("../data/cube.glue")),
    ("prism12", include_str!("../data/prism12.glue")),
    ("s2", include_str!("../data/s2.glue")),
    ("utn", include_str!("../data/utn.glue")),
];

/// Names of the bundled gluing specs.
pub fn spec_names() -> Vec<&'static str> {
    SPECS.iter().map(|(n, _)| *n).collect()
}

/// Text of a bundled gluing spec.
pub fn builtin_spec_text(name: &str) -> Option<&'static str> {
    SPECS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Parses a bundled gluing spec by name.
pub fn builtin_spec(name: &str) -> Result<GluingSpec, LibraryError> {
    let text = builtin_spec_text(name).ok_or_else(|| LibraryError::UnknownSpec {
        name: name.to_string(),
        suggestions: suggestions(name, spec_names()),
    })?;
    Ok(GluingSpec::parse(text)?)
}

/// One application of an entry's rule.
#[derive(Clone, Debug)]
pub struct Step {
    pub tiling: Tiling,
    pub witness: RefinementWitness,
    pub collapses: usize,
}

#[derive(Clone, Debug)]
pub struct RuleCatalogEntry {
    pub name: String,
    pub geometry: Geometry,
    pub description: String,
    pub replacement: Option<Arc<ReplacementRule>>,
    /// A replacement rule that carries refine data and added lines.
    pub refining: Option<Arc<ReplacementRule>>,
    pub subdivision: Option<Arc<SubdivisionRule>>,
    pub initial: Tiling,
    /// Name of the gluing spec whose cover this entry reproduces.
    pub spec: Option<String>,
}

impl RuleCatalogEntry {
    pub fn modes(&self) -> Vec<Mode> {
        let mut out = Vec::new();
        if self.replacement.is_some() {
            out.push(Mode::Replacement);
        }
        if self.refining.is_some() || self.subdivision.is_some() {
            out.push(Mode::Subdivision);
        }
        out
    }

    /// Every rule object held by the entry.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        if let Some(r) = &self.replacement {
            out.push(Rule::Replacement((**r).clone()));
        }
        if let Some(r) = &self.refining {
            out.push(Rule::Replacement((**r).clone()));
        }
        if let Some(r) = &self.subdivision {
            out.push(Rule::Subdivision((**r).clone()));
        }
        out
    }

    pub fn companion_spec(&self) -> Result<GluingSpec, LibraryError> {
        let name = self.spec.as_deref().ok_or_else(|| LibraryError::NoSpec { name: self.name.clone() })?;
        builtin_spec(name)
    }

    /// Applies the entry's rule once. A pure subdivision rule serves both
    /// modes, since it combines nothing.
    pub fn step(&self, t: &Tiling, mode: Mode) -> Result<Step, LibraryError> {
        let replacement = match mode {
            Mode::Replacement => self.replacement.as_ref(),
            Mode::Subdivision => self.refining.as_ref(),
        };
        if let Some(rule) = replacement {
            let r = apply_replacement(rule, t)?;
            return Ok(Step { tiling: r.tiling, witness: r.witness, collapses: r.collapses });
        }
        if let Some(rule) = &self.subdivision {
            let (tiling, witness) = apply_subdivision(rule, t)?;
            return Ok(Step { tiling, witness, collapses: 0 });
        }
        Err(LibraryError::ModeUnavailable { name: self.name.clone(), mode })
    }

    /// Stages S(1), ..., S(n).
    pub fn stages(&self, n: u32, mode: Mode) -> Result<Vec<Tiling>, LibraryError> {
        let mut out = vec![self.initial.clone()];
        while out.len() < n as usize {
            let next = self.step(out.last().unwrap(), mode)?.tiling;
            out.push(next);
        }
        out.truncate(n as usize);
        Ok(out)
    }

    /// Stages S(1), ..., S(n) of the companion cover.
    pub fn oracle_stages(&self, n: u32) -> Result<Vec<Tiling>, LibraryError> {
        let spec = self.companion_spec()?;
        let mut state = CoverState::new(&spec);
        let mut out = Vec::with_capacity(n as usize);
        for k in 1..=n {
            if k > 1 {
                state.expand()?;
            }
            out.push(state.boundary()?);
        }
        Ok(out)
    }
}

/// Catalog row returned by [`Catalog::list`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleSummary {
    pub name: String,
    pub geometry: Geometry,
    pub modes: Vec<Mode>,
    pub spec: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, RuleCatalogEntry>,
}

fn bundled(text: &str) -> Rule {
    Rule::from_toml(text).expect("bundled rule parses")
}

fn replacement(text: &str) -> Arc<ReplacementRule> {
    match bundled(text) {
        Rule::Replacement(r) => Arc::new(r),
        Rule::Subdivision(_) => panic!("bundled rule is not a replacement rule"),
    }
}

fn subdivision(text: &str) -> Arc<SubdivisionRule> {
    match bundled(text) {
        Rule::Subdivision(r) => Arc::new(r),
        Rule::Replacement(_) => panic!("bundled rule is not a subdivision rule"),
    }
}

fn first_stage(spec: &str) -> Tiling {
    let spec = builtin_spec(spec).expect("bundled spec parses");
    CoverState::new(&spec).boundary().expect("bundled spec has a closed boundary")
}

/// Two triangles glued along their boundary.
pub fn triangle_pillow() -> Tiling {
    let mut b = TilingBuilder::new(1);
    b.add_face_by_vertices("tri", &[0, 1, 2]).expect("distinct vertices");
    b.add_face_by_vertices("tri", &[0, 2, 1]).expect("distinct vertices");
    b.build().expect("pillow is a sphere")
}

impl Catalog {
    pub fn builtin() -> Self {
        let torus = replacement(include_str!("../data/rules/torus3.toml"));
        let torus_lines = replacement(include_str!("../data/rules/torus3-lines.toml"));
        let nxs1 = replacement(include_str!("../data/rules/nxs1.toml"));
        let entries = [
            RuleCatalogEntry {
                name: "barycentric".into(),
                geometry: Geometry::Demo,
                description: "Barycentric subdivision of triangles.".into(),
                replacement: None,
                refining: None,
                subdivision: Some(subdivision(include_str!("../data/rules/barycentric.toml"))),
                initial: triangle_pillow(),
                spec: None,
            },
            RuleCatalogEntry {
                name: "torus3".into(),
                geometry: Geometry::E3,
                description: "Cube tiling of the 3-torus cover.".into(),
                replacement: Some(torus),
                refining: Some(torus_lines),
                subdivision: None,
                initial: first_stage("cube"),
                spec: Some("cube".into()),
            },
            RuleCatalogEntry {
                name: "nxs1".into(),
                geometry: Geometry::H2xR,
                description: "Dodecagonal prisms for a circle bundle over a nonorientable genus-2 surface.".into(),
                replacement: Some(Arc::clone(&nxs1)),
                refining: None,
                subdivision: None,
                initial: first_stage("prism12"),
                spec: Some("prism12".into()),
            },
            RuleCatalogEntry {
                name: "sl2r".into(),
                geometry: Geometry::SL2R,
                description: "The nxs1 rule on the unit tangent bundle gluing of the same prism.".into(),
                replacement: Some(nxs1),
                refining: None,
                subdivision: None,
                initial: first_stage("utn"),
                spec: Some("utn".into()),
            },
            RuleCatalogEntry {
                name: "s2xr".into(),
                geometry: Geometry::S2xR,
                description: "Thickened sphere; the inner and outer boundary never change.".into(),
                replacement: None,
                refining: None,
                subdivision: Some(subdivision(include_str!("../data/rules/s2xr.toml"))),
                initial: first_stage("s2"),
                spec: Some("s2".into()),
            },
            RuleCatalogEntry {
                name: "s3".into(),
                geometry: Geometry::S3,
                description: "Finite fundamental group, empty boundary.".into(),
                replacement: None,
                refining: None,
                subdivision: Some(subdivision(include_str!("../data/rules/s3.toml"))),
                initial: Tiling::empty(1),
                spec: None,
            },
        ];
        Catalog { entries: entries.into_iter().map(|e| (e.name.clone(), e)).collect() }
    }

    pub fn get(&self, name: &str) -> Result<&RuleCatalogEntry, LibraryError> {
        self.entries.get(name).ok_or_else(|| LibraryError::UnknownRule {
            name: name.to_string(),
            suggestions: suggestions(name, self.entries.keys().map(String::as_str)),
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = &RuleCatalogEntry> {
        self.entries.values()
    }

    /// Catalog rows ordered by name.
    pub fn list(&self) -> Vec<RuleSummary> {
        self.entries
            .values()
            .map(|e| RuleSummary { name: e.name.clone(), geometry: e.geometry, modes: e.modes(), spec: e.spec.clone() })
            .collect()
    }

    /// Adds the rules in `dir`. Each `NAME.toml` needs a starting complex
    /// beside it: `NAME.glue` (its first boundary stage) or `NAME.json`
    /// (a serialized tiling). Returns the number of entries added.
    pub fn add_dir(&mut self, dir: &Path) -> Result<usize, LibraryError> {
        let load_err = |path: &Path, message: String| LibraryError::Load { path: path.display().to_string(), message };
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| load_err(dir, e.to_string()))?
            .filter_map(|d| d.ok().map(|d| d.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        files.sort();
        let mut added = 0;
        for path in files {
            let text = std::fs::read_to_string(&path).map_err(|e| load_err(&path, e.to_string()))?;
            let rule = Rule::from_toml(&text).map_err(|e| load_err(&path, e.to_string()))?;
            let glue = path.with_extension("glue");
            let json = path.with_extension("json");
            let initial = if glue.exists() {
                let text = std::fs::read_to_string(&glue).map_err(|e| load_err(&glue, e.to_string()))?;
                let spec = GluingSpec::parse(&text).map_err(|e| load_err(&glue, e.to_string()))?;
                CoverState::new(&spec).boundary().map_err(|e| load_err(&glue, e.to_string()))?
            } else if json.exists() {
                let text = std::fs::read_to_string(&json).map_err(|e| load_err(&json, e.to_string()))?;
                Tiling::from_json(&text).map_err(|e| load_err(&json, e.to_string()))?
            } else {
                return Err(load_err(&path, "no starting complex (.glue or .json) beside the rule".into()));
            };
            let name = rule.name().to_string();
            let mut entry = RuleCatalogEntry {
                name: name.clone(),
                geometry: Geometry::User,
                description: String::new(),
                replacement: None,
                refining: None,
                subdivision: None,
                initial,
                spec: None,
            };
            match rule {
                Rule::Subdivision(s) => entry.subdivision = Some(Arc::new(s)),
                Rule::Replacement(r) if r.refines() => entry.refining = Some(Arc::new(r)),
                Rule::Replacement(r) => entry.replacement = Some(Arc::new(r)),
            }
            self.entries.insert(name, entry);
            added += 1;
        }
        Ok(added)
    }
}

fn shared() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::builtin)
}

/// Looks up a built-in entry.
pub fn get_rule(name: &str) -> Result<&'static RuleCatalogEntry, LibraryError> {
    shared().get(name)
}

/// Built-in entries ordered by name.
pub fn list_rules() -> Vec<RuleSummary> {
    shared().list()
}
