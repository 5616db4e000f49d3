use std::collections::HashMap;

use serde::Deserialize;

use super::{
    name_table, Group, NamedFace, PatternEdge, Refine, ReplacementRule, Rule, RuleError, StatusReq, SubdivisionRule,
    TemplateEdge, TileType,
};

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Subdivision,
    Replacement,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleFile {
    name: String,
    kind: Kind,
    #[serde(default, rename = "description")]
    _description: String,
    #[serde(default)]
    fragments: Vec<String>,
    #[serde(default)]
    default_cycle: u32,
    #[serde(default)]
    group: Vec<GroupFile>,
    #[serde(default)]
    tile: Vec<TileFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    name: String,
    pattern: Vec<String>,
    #[serde(default)]
    constraints: Vec<String>,
    template: Vec<String>,
    #[serde(default)]
    cycles: Vec<String>,
    #[serde(default)]
    added: Vec<String>,
    refine: Option<RefineFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RefineFile {
    #[serde(default)]
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TileFile {
    label: String,
    corners: Vec<String>,
    #[serde(default)]
    sides: Vec<String>,
    faces: Vec<String>,
    #[serde(default)]
    interior_cycle: u32,
}

fn err(msg: impl Into<String>) -> RuleError {
    RuleError::Parse(msg.into())
}

/// `"label: a b c"` into a label and name ids.
fn parse_face(s: &str, names: &mut Vec<String>, index: &mut HashMap<String, usize>) -> Result<NamedFace, RuleError> {
    let (label, rest) =
        s.split_once(':').ok_or_else(|| err(format!("face `{s}` needs the form `label: v1 v2 ...`")))?;
    let label = label.trim();
    if label.is_empty() {
        return Err(err(format!("face `{s}` has an empty label")));
    }
    let ids: Vec<usize> = rest.split_whitespace().map(|n| name_table(names, index, n)).collect();
    if ids.len() < 2 {
        return Err(err(format!("face `{s}` has fewer than two vertices")));
    }
    Ok(NamedFace { label: label.to_string(), names: ids })
}

fn lookup(index: &HashMap<String, usize>, name: &str, ctx: &str) -> Result<usize, RuleError> {
    index.get(name).copied().ok_or_else(|| err(format!("{ctx}: unknown vertex name `{name}`")))
}

/// An undirected edge and its (face, side) uses.
type EdgeUses = ((usize, usize), Vec<(usize, usize)>);

fn face_edges(faces: &[NamedFace]) -> Vec<EdgeUses> {
    let mut out: Vec<EdgeUses> = Vec::new();
    for (fi, f) in faces.iter().enumerate() {
        let n = f.names.len();
        for i in 0..n {
            let (u, v) = (f.names[i], f.names[(i + 1) % n]);
            match out.iter_mut().find(|(ends, _)| *ends == (u, v) || *ends == (v, u)) {
                Some((_, uses)) => uses.push((fi, i)),
                None => out.push(((u, v), vec![(fi, i)])),
            }
        }
    }
    out
}

fn parse_group(g: GroupFile, default_cycle: u32) -> Result<Group, RuleError> {
    let ctx = format!("group `{}`", g.name);
    let mut names = Vec::new();
    let mut index = HashMap::new();
    let pattern = g.pattern.iter().map(|s| parse_face(s, &mut names, &mut index)).collect::<Result<Vec<_>, _>>()?;
    if pattern.is_empty() {
        return Err(err(format!("{ctx}: empty pattern")));
    }
    let pattern_names = names.len();
    let mut pattern_edges: Vec<PatternEdge> = face_edges(&pattern)
        .into_iter()
        .map(|(ends, uses)| {
            let status = if uses.len() >= 2 { StatusReq::Connecting } else { StatusReq::NotConnecting };
            PatternEdge { ends, uses, status, cycle: None }
        })
        .collect();
    if let Some(e) = pattern_edges.iter().find(|e| e.uses.len() > 2) {
        return Err(err(format!(
            "{ctx}: pattern edge {}-{} is used by more than two faces",
            names[e.ends.0], names[e.ends.1]
        )));
    }
    for c in &g.constraints {
        let toks: Vec<&str> = c.split_whitespace().collect();
        if toks.len() < 3 {
            return Err(err(format!("{ctx}: constraint `{c}` needs `u v requirement...`")));
        }
        let (u, v) = (lookup(&index, toks[0], &ctx)?, lookup(&index, toks[1], &ctx)?);
        let e = pattern_edges
            .iter()
            .position(|e| e.ends == (u, v) || e.ends == (v, u))
            .ok_or_else(|| err(format!("{ctx}: constraint `{c}` names a non-edge")))?;
        for t in &toks[2..] {
            if let Some(n) = t.strip_prefix("cycle=") {
                pattern_edges[e].cycle = Some(n.parse().map_err(|_| err(format!("{ctx}: bad cycle in `{c}`")))?);
                continue;
            }
            pattern_edges[e].status = match *t {
                "any" => StatusReq::Any,
                "connecting" => StatusReq::Connecting,
                "unconnecting" => StatusReq::NotConnecting,
                "loaded" => StatusReq::Loaded,
                "fragile" => StatusReq::Fragile,
                "plain" => StatusReq::Plain,
                "added" => StatusReq::Added,
                other => return Err(err(format!("{ctx}: unknown requirement `{other}`"))),
            };
        }
    }

    let template = g.template.iter().map(|s| parse_face(s, &mut names, &mut index)).collect::<Result<Vec<_>, _>>()?;
    let mut template_edges: Vec<TemplateEdge> = Vec::new();
    for (ends, _) in face_edges(&template) {
        let on_boundary =
            pattern_edges.iter().any(|e| (e.ends == ends || e.ends == (ends.1, ends.0)) && e.uses.len() == 1);
        if !on_boundary {
            template_edges.push(TemplateEdge { ends, cycle: default_cycle, added: false });
        }
    }
    let find_template_edge =
        |template_edges: &[TemplateEdge], spec: &str, index: &HashMap<String, usize>| -> Result<usize, RuleError> {
            let toks: Vec<&str> = spec.split_whitespace().collect();
            if toks.len() < 2 {
                return Err(err(format!("{ctx}: `{spec}` must start with two vertex names")));
            }
            let (u, v) = (lookup(index, toks[0], &ctx)?, lookup(index, toks[1], &ctx)?);
            template_edges
                .iter()
                .position(|e| e.ends == (u, v) || e.ends == (v, u))
                .ok_or_else(|| err(format!("{ctx}: `{spec}` is not an interior template edge")))
        };
    for c in &g.cycles {
        let e = find_template_edge(&template_edges, c, &index)?;
        let n = c.split_whitespace().nth(2).ok_or_else(|| err(format!("{ctx}: `{c}` needs a cycle length")))?;
        template_edges[e].cycle = n.parse().map_err(|_| err(format!("{ctx}: bad cycle length in `{c}`")))?;
    }
    for a in &g.added {
        let e = find_template_edge(&template_edges, a, &index)?;
        template_edges[e].added = true;
        template_edges[e].cycle = 0;
    }

    let refine = match g.refine {
        None => None,
        Some(r) => {
            let mut out = Refine::default();
            for v in &r.vertices {
                let (a, b) =
                    v.split_once("->").ok_or_else(|| err(format!("{ctx}: refine vertex `{v}` needs `old -> new`")))?;
                out.vertices.push((lookup(&index, a.trim(), &ctx)?, lookup(&index, b.trim(), &ctx)?));
            }
            for e in &r.edges {
                let (a, b) =
                    e.split_once("->").ok_or_else(|| err(format!("{ctx}: refine edge `{e}` needs `u v -> path`")))?;
                let ends: Vec<usize> =
                    a.split_whitespace().map(|n| lookup(&index, n, &ctx)).collect::<Result<_, _>>()?;
                let path: Vec<usize> =
                    b.split_whitespace().map(|n| lookup(&index, n, &ctx)).collect::<Result<_, _>>()?;
                if ends.len() != 2 || path.len() < 2 {
                    return Err(err(format!("{ctx}: refine edge `{e}` is malformed")));
                }
                out.edges.push(((ends[0], ends[1]), path));
            }
            Some(out)
        }
    };
    if names[..pattern_names].iter().any(|n| n.is_empty()) {
        return Err(err(format!("{ctx}: empty vertex name")));
    }
    Ok(Group { name: g.name, names, pattern, pattern_edges, template, template_edges, refine })
}

fn parse_tile(t: TileFile) -> Result<TileType, RuleError> {
    let ctx = format!("tile `{}`", t.label);
    let mut names = Vec::new();
    let mut index = HashMap::new();
    let corners: Vec<usize> = t.corners.iter().map(|n| name_table(&mut names, &mut index, n)).collect();
    let sides: Vec<Vec<usize>> = if t.sides.is_empty() {
        (0..corners.len()).map(|i| vec![corners[i], corners[(i + 1) % corners.len()]]).collect()
    } else {
        t.sides.iter().map(|s| s.split_whitespace().map(|n| name_table(&mut names, &mut index, n)).collect()).collect()
    };
    if sides.len() != corners.len() {
        return Err(err(format!("{ctx}: {} sides for {} corners", sides.len(), corners.len())));
    }
    for (i, s) in sides.iter().enumerate() {
        let (a, b) = (corners[i], corners[(i + 1) % corners.len()]);
        if s.len() < 2 || s[0] != a || *s.last().unwrap() != b {
            return Err(err(format!("{ctx}: side {i} must run from corner {} to corner {}", names[a], names[b])));
        }
    }
    let faces = t.faces.iter().map(|s| parse_face(s, &mut names, &mut index)).collect::<Result<Vec<_>, _>>()?;
    Ok(TileType { label: t.label, names, corners, sides, faces, interior_cycle: t.interior_cycle })
}

pub(super) fn parse_rule(text: &str) -> Result<Rule, RuleError> {
    let file: RuleFile = toml::from_str(text).map_err(|e| err(e.to_string()))?;
    match file.kind {
        Kind::Subdivision => {
            if !file.group.is_empty() {
                return Err(err("subdivision rules take `tile` tables, not `group`"));
            }
            let tiles = file.tile.into_iter().map(parse_tile).collect::<Result<Vec<_>, _>>()?;
            Ok(Rule::Subdivision(SubdivisionRule { name: file.name, tiles }))
        }
        Kind::Replacement => {
            if !file.tile.is_empty() {
                return Err(err("replacement rules take `group` tables, not `tile`"));
            }
            let groups =
                file.group.into_iter().map(|g| parse_group(g, file.default_cycle)).collect::<Result<Vec<_>, _>>()?;
            Ok(Rule::Replacement(ReplacementRule { name: file.name, groups, fragments: file.fragments }))
        }
    }
}
