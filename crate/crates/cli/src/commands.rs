use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use subdiv_core::cayley::{
    almost_convexity_profile_with_limit, cone_type_count_with_limit, interior_cone_type_count, CayleyError, GroupSpec,
};
use subdiv_core::cover::CoverState;
use subdiv_core::glue::GluingSpec;
use subdiv_core::growth::{growth_report, Source, StageCounts};
use subdiv_core::iso::is_isomorphic;
use subdiv_core::library::{builtin_spec, suggestions, Catalog, Mode};
use subdiv_core::pack::{pack, render_svg, triangulate, EdgeStyle, PackingProblem, SvgStyle};
use subdiv_core::{refinement_check, Tiling};

use crate::args::{
    CatalogArgs, CayleyArgs, CoverArgs, EdgesArg, GrowthArgs, PackArgs, SourceArg, SubdivideArgs, VerifyArgs,
};

const GROUPS: [&str; 4] = ["Z", "Z3", "heis", "sol"];

fn catalog(args: &CatalogArgs) -> Result<Catalog> {
    let mut catalog = Catalog::builtin();
    if let Some(dir) = &args.rules_dir {
        catalog.add_dir(dir)?;
    }
    Ok(catalog)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `text` to `dest`, where `-` is standard output.
fn emit(dest: &str, text: &str) -> Result<()> {
    if dest == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
        Ok(())
    } else {
        write_file(Path::new(dest), text)
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn stage_table(stages: &[StageCounts]) -> String {
    let mut out = String::from("stage     faces     edges  vertices  loaded_e  loaded_v  comps  chi\n");
    for s in stages {
        writeln!(
            out,
            "{:>5} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6} {:>4}",
            s.stage,
            s.faces,
            s.edges,
            s.vertices,
            s.loaded_edges,
            s.loaded_vertices,
            s.components,
            s.euler_characteristic
        )
        .unwrap();
    }
    out
}

fn packed_svg(t: &Tiling, open: usize, tolerance: f64, edges: EdgeStyle) -> Result<String> {
    let problem = triangulate(t, open)?;
    let label = pack(&problem, tolerance)?;
    Ok(render_svg(&label, &problem, &SvgStyle { edges, ..SvgStyle::default() })?)
}

pub fn rules_list(args: &CatalogArgs, as_json: bool) -> Result<()> {
    let rows = catalog(args)?.list();
    if as_json {
        return emit("-", &json(&rows)?);
    }
    let mut out = String::from("name         geometry  modes                    spec\n");
    for r in &rows {
        let modes: Vec<String> = r.modes.iter().map(Mode::to_string).collect();
        writeln!(
            out,
            "{:<12} {:<9} {:<24} {}",
            r.name,
            r.geometry.to_string(),
            modes.join(","),
            r.spec.as_deref().unwrap_or("-")
        )
        .unwrap();
    }
    emit("-", &out)
}

#[derive(Serialize)]
struct SubdivideStats<'a> {
    rule: &'a str,
    mode: Mode,
    steps: u32,
    face_counts: Vec<usize>,
    /// Whether step k (from stage k to k+1) refines; `null` when the
    /// witness could not be checked.
    refines: Vec<Option<bool>>,
    collapses: Vec<usize>,
    stages: Vec<StageCounts>,
}

pub fn subdivide(args: &SubdivideArgs) -> Result<()> {
    let catalog = catalog(&args.catalog)?;
    let entry = catalog.get(&args.rule)?;
    let mode = Mode::from(args.mode);
    let mut current = entry.initial.clone();
    let mut stages = vec![StageCounts::of(&current)];
    let mut refines = Vec::new();
    let mut collapses = Vec::new();
    for _ in 1..args.steps {
        let step = entry.step(&current, mode)?;
        if step.tiling.face_count() > args.cap {
            bail!("stage {} has {} faces, over the cap of {}", step.tiling.stage(), step.tiling.face_count(), args.cap);
        }
        refines.push(refinement_check(&current, &step.tiling, &step.witness).ok());
        collapses.push(step.collapses);
        stages.push(StageCounts::of(&step.tiling));
        current = step.tiling;
    }
    let stats = SubdivideStats {
        rule: &entry.name,
        mode,
        steps: args.steps,
        face_counts: stages.iter().map(|s| s.faces).collect(),
        refines,
        collapses,
        stages,
    };
    match args.stats.as_deref() {
        Some(dest) => {
            emit(dest, &json(&stats)?)?;
            if dest != "-" {
                emit("-", &stage_table(&stats.stages))?;
            }
        }
        None => emit("-", &stage_table(&stats.stages))?,
    }
    if let Some(path) = &args.out {
        write_file(path, &(current.to_json() + "\n"))?;
    }
    if let Some(path) = &args.svg {
        let svg = packed_svg(&current, 0, args.tolerance, EdgeStyle::Tiling)?;
        write_file(path, &svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CoverStats {
    spec: String,
    steps: u32,
    cells: Vec<usize>,
    stages: Vec<StageCounts>,
}

fn load_spec(name: &str) -> Result<GluingSpec> {
    let path = Path::new(name);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return GluingSpec::parse(&text).with_context(|| format!("parsing {}", path.display()));
    }
    Ok(builtin_spec(name)?)
}

pub fn cover(args: &CoverArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let mut state = CoverState::new(&spec).with_cell_limit(args.cap);
    let mut cells = Vec::new();
    let mut stages = Vec::new();
    let mut last = None;
    for k in 1..=args.steps {
        if k > 1 {
            state.expand()?;
        }
        let t = state.boundary()?;
        cells.push(state.cell_count());
        stages.push(StageCounts::of(&t));
        last = Some(t);
    }
    let stats = CoverStats { spec: spec.name.clone(), steps: args.steps, cells, stages };
    if args.stats {
        emit("-", &json(&stats)?)?;
    } else {
        emit("-", &stage_table(&stats.stages))?;
    }
    if let (Some(path), Some(t)) = (&args.out, last) {
        write_file(path, &(t.to_json() + "\n"))?;
    }
    Ok(())
}

pub fn growth(args: &GrowthArgs) -> Result<()> {
    let catalog = catalog(&args.catalog)?;
    let entry = catalog.get(&args.rule)?;
    let source = match args.source {
        SourceArg::Cover => Source::Cover,
        SourceArg::Engine => {
            let mode = match args.mode {
                Some(m) => Mode::from(m),
                None => *entry.modes().first().context("rule has no modes")?,
            };
            Source::Engine(mode)
        }
    };
    let report = growth_report(entry, args.steps, source)?;
    emit("-", &json(&report)?)
}

fn group(name: &str) -> Result<GroupSpec> {
    match GroupSpec::builtin(name) {
        Err(CayleyError::UnknownGroup(_)) => {
            let close = suggestions(name, GROUPS);
            if close.is_empty() {
                bail!("unknown group `{name}` (known: {})", GROUPS.join(", "));
            }
            bail!("unknown group `{name}` (did you mean {}?)", close.join(", "));
        }
        other => Ok(other?),
    }
}

fn show(k: Option<u32>) -> String {
    match k {
        Some(u32::MAX) => "inf".into(),
        Some(k) => k.to_string(),
        None => "-".into(),
    }
}

pub fn cayley(args: &CayleyArgs) -> Result<()> {
    let g = group(&args.group)?;
    if args.ac2 {
        let rows = almost_convexity_profile_with_limit(&g, args.radius, args.m, args.cap)?;
        if args.json {
            return emit("-", &json(&rows)?);
        }
        let mut out = format!("group {}, m = {}\n", g.name, args.m);
        let head = format!("K({},n)", args.m);
        writeln!(out, "{:>4} {:>10} {:>8} {:>8}", "n", "pairs", head, "max").unwrap();
        for r in &rows {
            writeln!(out, "{:>4} {:>10} {:>8} {:>8}", r.n, r.pairs, show(r.k), show(r.running_max)).unwrap();
        }
        return emit("-", &out);
    }
    let depth = args.depth.context("--cones needs --depth")?;
    let eq = args.equivalence.into();
    let report = if args.interior {
        interior_cone_type_count(&g, args.radius, depth, eq)?
    } else {
        cone_type_count_with_limit(&g, args.radius, depth, eq, args.cap)?
    };
    if args.json {
        return emit("-", &json(&report)?);
    }
    let scope = if args.interior { "ball" } else { "sphere" };
    let mut out = format!(
        "group {}, {scope} radius {}, depth {}: {} cone types over {} elements\n",
        g.name, report.radius, report.depth, report.classes, report.population
    );
    writeln!(out, "{:>5} {:>8}  representative", "class", "size").unwrap();
    for (i, (rep, size)) in report.representatives.iter().zip(&report.class_sizes).enumerate() {
        writeln!(out, "{:>5} {:>8}  ({}, {}, {})", i, size, rep[0], rep[1], rep[2]).unwrap();
    }
    emit("-", &out)
}

#[derive(Serialize)]
struct PackSummary {
    vertices: usize,
    triangles: usize,
    interior: usize,
    iterations: usize,
    residual: f64,
    tangency_error: f64,
}

impl PackSummary {
    fn new(p: &PackingProblem, label: &subdiv_core::pack::PackingLabel) -> Self {
        PackSummary {
            vertices: p.vertex_count(),
            triangles: p.triangles.len(),
            interior: p.interior_vertices().count(),
            iterations: label.iterations,
            residual: label.residual,
            tangency_error: label.tangency_error(p),
        }
    }
}

pub fn pack_cmd(args: &PackArgs) -> Result<()> {
    let text = fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let t = Tiling::from_json(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let problem = triangulate(&t, args.open)?;
    let label = pack(&problem, args.tolerance)?;
    if let Some(path) = &args.svg {
        let edges = match args.edges {
            EdgesArg::None => EdgeStyle::None,
            EdgesArg::Tiling => EdgeStyle::Tiling,
            EdgesArg::Triangulation => EdgeStyle::Triangulation,
        };
        write_file(path, &render_svg(&label, &problem, &SvgStyle { edges, ..SvgStyle::default() })?)?;
    }
    if let Some(path) = &args.circles {
        write_file(path, &json(&label.circles())?)?;
    }
    emit("-", &json(&PackSummary::new(&problem, &label))?)
}

pub fn verify(args: &VerifyArgs) -> Result<()> {
    let catalog = catalog(&args.catalog)?;
    let entry = catalog.get(&args.rule)?;
    let mode = *entry.modes().first().context("rule has no modes")?;
    let stages = entry.stages(args.steps, mode)?;
    let oracle = entry.oracle_stages(args.steps)?;
    let mut out = String::new();
    let mut failed = Vec::new();
    for (s, o) in stages.iter().zip(&oracle) {
        let same = is_isomorphic(s, o);
        writeln!(
            out,
            "stage {}: {} faces, oracle {} faces, {}",
            s.stage(),
            s.face_count(),
            o.face_count(),
            if same { "isomorphic" } else { "DIFFERENT" }
        )
        .unwrap();
        if !same {
            failed.push(s.stage());
        }
    }
    emit("-", &out)?;
    if !failed.is_empty() {
        bail!("{} {mode} stages {failed:?} differ from the {} cover", entry.name, entry.spec.as_deref().unwrap_or("?"));
    }
    Ok(())
}
