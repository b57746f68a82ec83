//! `logharm`: build, verify, render and explore log-harmonic mappings.
//!
//! Exit status: 0 when everything checked passes, 1 when a checked property
//! fails, 2 on usage or input errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "logharm", version, about = "Log-harmonic mappings of the unit disk", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// List the catalog, or describe one map.
    Catalog(CatalogArgs),
    /// Shear a starlike function against a dilatation.
    Construct(ConstructArgs),
    /// Coefficient bound certificate, or the sufficient starlikeness condition.
    Coeffs(CoeffsArgs),
    /// Starlike, convex, Jacobian or identity margins on a grid.
    Verify(VerifyArgs),
    /// V(r, θ) of the non-convex example at the three reference points, as CSV.
    Table1(Table1Args),
    /// Growth and distortion bounds for the class with φ = z/(1-z).
    Bounds(BoundsArgs),
    /// Image of a circle |z| = r and its minimum modulus.
    Trace(TraceArgs),
    /// Deformed polar grid as SVG, or a filled mask as PPM.
    Render(RenderArgs),
    /// Monte-Carlo scan for counterexamples; one JSON line per trial.
    Explore(ExploreArgs),
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Common {
    /// JSON file whose keys mirror flag names; command-line flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Machine-readable output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MapArgs {
    /// Catalog name (see `logharm catalog`).
    #[arg(long)]
    pub map: Option<String>,
    /// Starlike function to shear instead: catalog name or Herglotz JSON.
    #[arg(long)]
    pub phi: Option<String>,
    /// Dilatation used with --phi: 0, z, z^k or Blaschke JSON.
    #[arg(long)]
    pub mu: Option<String>,
    /// Order parameter of the catalog families and of the checks.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// λ of the polynomial family, `re` or `re,im`.
    #[arg(long, default_value = "0.25", allow_hyphen_values = true)]
    pub lambda: String,
    /// Exponent p of the polynomial family.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GridArgs {
    /// Comma-separated radii in (0, 1) [default: 0.1,...,0.9,0.95].
    #[arg(long)]
    pub radii: Option<String>,
    /// Equispaced angles per radius.
    #[arg(long, default_value_t = 720)]
    pub angles: usize,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CatalogArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Number of logarithmic coefficients shown for a log-harmonic map.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Series,
    Quadrature,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ConstructArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Starlike function: catalog name or Herglotz JSON.
    #[arg(long)]
    pub phi: String,
    /// Dilatation: 0, z, z^k or Blaschke JSON.
    #[arg(long, default_value = "0")]
    pub mu: String,
    #[arg(long, default_value_t = 48)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = Method::Series)]
    pub method: Method,
    /// Parameters for catalog names given to --phi.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Largest radius of the dilatation round-trip check.
    #[arg(long, default_value_t = 0.6)]
    pub check_radius: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoeffsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    /// Coefficients a_1, a_2, ... as a JSON array of [re, im] pairs; checks
    /// the sufficient condition together with --b.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Starlike,
    Convex,
    Jacobian,
    /// Re(Df/f) = Re(Dφ/φ) for log-harmonic maps; D²f/Df = D²φ/Dφ for the
    /// polynomial family.
    Identity,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct VerifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Check::Starlike)]
    pub check: Check,
    /// Allowed negative margin, or allowed identity deviation
    /// [default: 1e-6 for margins, 1e-9 for identities].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Table1Args {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Dilatation: 0, z, z^k or Blaschke JSON.
    #[arg(long, default_value = "z")]
    pub mu: String,
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Also list the six margins at the real points z = r.
    #[arg(long)]
    pub real_axis: bool,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct TraceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 0.999)]
    pub r: f64,
    #[arg(long, default_value_t = 2048)]
    pub angles: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Svg,
    Ppm,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RenderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value_t = 0.97)]
    pub r_max: f64,
    #[arg(long, default_value_t = 12)]
    pub circles: usize,
    #[arg(long, default_value_t = 24)]
    pub rays: usize,
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// `x_min,x_max,y_min,y_max` [default: bounding box of the samples].
    #[arg(long, allow_hyphen_values = true)]
    pub viewport: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Svg)]
    pub format: Format,
    /// Raster size `WIDTHxHEIGHT`.
    #[arg(long, default_value = "512x512")]
    pub resolution: String,
    #[arg(long, default_value_t = 1.0)]
    pub circle_width: f64,
    #[arg(long, default_value_t = 0.75)]
    pub ray_width: f64,
}

#[derive(Args, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExploreArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Herglotz nodes of each random starlike function.
    #[arg(long, default_value_t = 3)]
    pub k_phi: usize,
    /// Blaschke zeros of each random dilatation.
    #[arg(long, default_value_t = 2)]
    pub k_mu: usize,
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    #[arg(long, default_value_t = 0.99)]
    pub r_cover: f64,
    #[arg(long, default_value_t = 720)]
    pub angles: usize,
    /// Trial t uses seed + t, so a run can be resumed by seed range.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Catalog(a) => &a.common,
            Command::Construct(a) => &a.common,
            Command::Coeffs(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Table1(a) => &a.common,
            Command::Bounds(a) => &a.common,
            Command::Trace(a) => &a.common,
            Command::Render(a) => &a.common,
            Command::Explore(a) => &a.common,
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let run = || commands::run(&cli.command);
    let outcome = match cli.command.common().workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(e.into()),
        },
        None => run(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
