use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subdiv_core::cayley::ConeEquivalence;
use subdiv_core::library::Mode;

/// Default cap on cells, faces or group elements.
pub const DEFAULT_CAP: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "subdiv",
    version,
    about = "Boundary tilings of growing balls in universal covers, and the rules that generate them"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Inspect the rule catalog.
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
    /// Apply a catalog rule repeatedly and report each stage.
    Subdivide(SubdivideArgs),
    /// Grow a ball in the universal cover of a polyhedral gluing.
    Cover(CoverArgs),
    /// Classify how fast a rule's face counts grow.
    Growth(GrowthArgs),
    /// Almost convexity and cone types of a Cayley graph.
    Cayley(CayleyArgs),
    /// Circle-pack a sphere tiling opened at one face.
    Pack(PackArgs),
    /// Check a rule's stages against the cover they should reproduce.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
pub enum RulesAction {
    /// One line per catalog entry.
    List {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CatalogArgs {
    /// Extra directory of user rules to load next to the built-in ones.
    #[arg(long, value_name = "DIR")]
    pub rules_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Replacement,
    Subdivision,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Replacement => Mode::Replacement,
            ModeArg::Subdivision => Mode::Subdivision,
        }
    }
}

#[derive(Args, Debug)]
pub struct SubdivideArgs {
    #[arg(long)]
    pub rule: String,
    /// Number of stages to produce, starting from S(1).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Write stage statistics as JSON; `-` means standard output.
    #[arg(long, value_name = "PATH")]
    pub stats: Option<String>,
    /// Circle-pack the last stage and draw it.
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Write the last stage as a tiling document.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Largest number of faces allowed in any stage.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[command(flatten)]
    pub catalog: CatalogArgs,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    /// Built-in gluing name or path to a gluing file.
    #[arg(long)]
    pub spec: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    /// Print per-stage statistics as JSON.
    #[arg(long)]
    pub stats: bool,
    /// Write the last boundary as a tiling document.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Largest number of cells allowed.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SourceArg {
    Engine,
    Cover,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..))]
    pub steps: u32,
    /// Defaults to the first mode the rule offers.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value = "engine")]
    pub source: SourceArg,
    #[command(flatten)]
    pub catalog: CatalogArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EquivalenceArg {
    Labeled,
    UpToInversion,
}

impl From<EquivalenceArg> for ConeEquivalence {
    fn from(e: EquivalenceArg) -> ConeEquivalence {
        match e {
            EquivalenceArg::Labeled => ConeEquivalence::Labeled,
            EquivalenceArg::UpToInversion => ConeEquivalence::UpToInversion,
        }
    }
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("table").required(true).args(["ac2", "cones"]))]
pub struct CayleyArgs {
    /// One of Z, Z3, heis, sol.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub radius: u32,
    /// Table of K(m, n) for n up to the radius.
    #[arg(long)]
    pub ac2: bool,
    /// Pair distance for the almost convexity table.
    #[arg(long, default_value_t = 2, requires = "ac2")]
    pub m: u32,
    /// Count cone types on the sphere of the given radius.
    #[arg(long, requires = "depth")]
    pub cones: bool,
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_enum, default_value = "labeled")]
    pub equivalence: EquivalenceArg,
    /// Classify every element of the ball of radius one less, not just the sphere.
    #[arg(long, requires = "cones")]
    pub interior: bool,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Largest number of group elements enumerated.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EdgesArg {
    None,
    Tiling,
    Triangulation,
}

#[derive(Args, Debug)]
pub struct PackArgs {
    /// Tiling document of a sphere.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Face removed to open the sphere into a disk.
    #[arg(long, value_name = "FACE")]
    pub open: usize,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Write every radius and centre as JSON.
    #[arg(long, value_name = "PATH")]
    pub circles: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tiling")]
    pub edges: EdgesArg,
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub rule: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub steps: u32,
    #[command(flatten)]
    pub catalog: CatalogArgs,
}
