//! Command-line front end: `depth`, `eval`, `tile`, `synth`, `fetch`, `align`.
//!
//! Exit codes: 0 success, 1 bad input or contract violation (including
//! usage errors), 2 I/O or transport failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dem_fetch::{self, BoundingBox, DemClient, FetchRequest};
use crate::error::{Error, Result};
use crate::eval;
use crate::hydro::{self, DepthConfig};
use crate::mask::{self, ClassMap};
use crate::raster::{self, CodeRaster, Resampling, ScalarRaster};
use crate::synth::{self, TerrainKind, TerrainParams};
use crate::tiling::{self, TilingOptions};

#[derive(Debug, Parser)]
#[command(name = "flood-depth", version, about = "Flood depth from semantic flood masks and DEMs")]
pub struct Cli {
    /// More log output (repeat for trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    /// Seed for anything random.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate per-pixel flood depth from a semantic mask and an aligned DEM.
    Depth(DepthArgs),
    /// Score predicted depth against a reference depth raster.
    Eval(EvalArgs),
    /// Cut building-centered tiles from a raster.
    Tile(TileArgs),
    /// Generate an analytic flood scene with known truth.
    Synth(SynthArgs),
    /// Download a DEM from OpenTopography.
    Fetch(FetchArgs),
    /// Resample a DEM onto a mask's grid.
    Align(AlignArgs),
}

#[derive(Debug, Args)]
pub struct ClassMapArg {
    /// Class map for raw segmentation codes: a file path or `floodnet`.
    /// Without it the mask must already hold 0=background, 1=flood, 2=building.
    #[arg(long)]
    pub class_map: Option<String>,
}

impl ClassMapArg {
    fn load(&self) -> Result<Option<ClassMap>> {
        match self.class_map.as_deref() {
            None => Ok(None),
            Some(s) if s.eq_ignore_ascii_case("floodnet") => Ok(Some(ClassMap::floodnet())),
            Some(path) => {
                require(Path::new(path))?;
                ClassMap::load(path).map(Some)
            }
        }
    }

    fn semantic(&self, path: &Path) -> Result<CodeRaster> {
        let sem = raster::read_semantic_grid(path)?;
        Ok(match self.load()? {
            Some(map) => mask::aggregate_classes(&sem, &map),
            None => sem,
        })
    }
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub dem: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = hydro::DEFAULT_PERCENTILE)]
    pub percentile: f64,
    #[arg(long, default_value_t = 1)]
    pub min_component: usize,
    /// Write the per-component water level table here.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub classes: ClassMapArg,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, required_unless_present = "manifest")]
    pub pred: Option<PathBuf>,
    #[arg(long = "ref", required_unless_present = "manifest")]
    pub reference: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pub mask: Option<PathBuf>,
    /// Lines of `tile_id pred ref mask` for multi-tile evaluation.
    #[arg(long, conflicts_with_all = ["pred", "reference", "mask"])]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub classes: ClassMapArg,
}

#[derive(Debug, Args)]
pub struct TileArgs {
    #[arg(long)]
    pub src: PathBuf,
    #[arg(long)]
    pub buildings: PathBuf,
    #[arg(long, default_value_t = tiling::DEFAULT_TILE_SIZE)]
    pub size: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Allowed hurricane events (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub events: Option<Vec<String>>,
    #[arg(long, default_value_t = 0.0)]
    pub max_void: f64,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// plane, pyramid_bowl or two_basins
    #[arg(long, default_value = "two_basins")]
    pub kind: String,
    #[arg(long, default_value_t = 129)]
    pub size: usize,
    #[arg(long, default_value_t = 0.1)]
    pub slope: f64,
    #[arg(long, default_value_t = 0.0)]
    pub base: f64,
    #[arg(long, default_value_t = 5.0)]
    pub ridge: f64,
    /// One water level per basin (comma-separated, meters).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.5])]
    pub levels: Vec<f64>,
    /// Standard deviation of Gaussian DEM noise, meters.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    #[arg(long, allow_negative_numbers = true, requires_all = ["south", "east", "north"])]
    pub west: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub south: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub east: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub north: Option<f64>,
    /// Take the bounding box from a geographic raster instead.
    #[arg(long, conflicts_with_all = ["west", "south", "east", "north"], required_unless_present = "west")]
    pub like: Option<PathBuf>,
    #[arg(long, default_value = dem_fetch::DEFAULT_DEM_TYPE)]
    pub dem_type: String,
    #[arg(long, env = dem_fetch::ENDPOINT_ENV, default_value = dem_fetch::DEFAULT_ENDPOINT)]
    pub endpoint: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub dem: PathBuf,
    /// Raster whose grid the DEM is resampled onto.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// bilinear or nearest
    #[arg(long, default_value = "bilinear")]
    pub method: String,
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingInput(path.to_path_buf()))
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn init_logging(verbose: u8, quiet: bool) {
    let level = if quiet {
        log::LevelFilter::Error
    } else {
        match verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    // A logger installed by an earlier call keeps its filter; honour this run's.
    log::set_max_level(level);
}

/// Parses `argv` (program name first), runs the subcommand, and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose, cli.quiet);
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Depth(a) => depth(a),
        Command::Eval(a) => evaluate(a),
        Command::Tile(a) => tile(a),
        Command::Synth(a) => synthesize(a, cli.seed),
        Command::Fetch(a) => fetch(a),
        Command::Align(a) => align(a),
    }
}

fn depth(a: &DepthArgs) -> Result<()> {
    require(&a.mask)?;
    require(&a.dem)?;
    let sem = a.classes.semantic(&a.mask)?;
    let dem = raster::read_ascii_grid(&a.dem)?;
    let cfg = DepthConfig {
        percentile: a.percentile,
        min_component_size: a.min_component.max(1),
    };
    let est = hydro::estimate_depth(&sem, &dem, &cfg)?;

    let ok = est.levels.rows.iter().filter(|r| r.status == hydro::LevelStatus::Ok).count();
    log::info!(
        "{} flood components, {ok} with a water level, {} without",
        est.labels.count,
        est.levels.len() - ok
    );
    for r in &est.levels.rows {
        match r.z_water {
            Some(z) => log::info!("component {}: z_water {z:.3} m from {} waterline pixels", r.label, r.n_boundary),
            None => log::info!("component {}: {}", r.label, r.status),
        }
    }
    raster::write_ascii_grid(&est.depth, &a.out)?;
    if let Some(table) = &a.table {
        est.levels.write(table)?;
    }
    Ok(())
}

fn score_tile(
    classes: &ClassMapArg,
    tile_id: &str,
    pred: &Path,
    reference: &Path,
    sem: &Path,
) -> Result<eval::TileScore> {
    let pred = raster::read_ascii_grid(pred)?;
    let reference = raster::read_ascii_grid(reference)?;
    let sem = classes.semantic(sem)?;
    let open = eval::open_flood_mask(&sem, &reference)?;
    eval::tile_mse(&pred, &reference, &open, tile_id)
}

fn evaluate(a: &EvalArgs) -> Result<()> {
    let mut scores = Vec::new();
    if let Some(manifest) = &a.manifest {
        require(manifest)?;
        let tiles = eval::read_eval_manifest(manifest)?;
        for t in &tiles {
            for p in [&t.pred, &t.reference, &t.mask] {
                require(p)?;
            }
        }
        for t in &tiles {
            match score_tile(&a.classes, &t.tile_id, &t.pred, &t.reference, &t.mask) {
                Ok(s) => scores.push(s),
                Err(Error::EmptyTile(id)) => log::warn!("tile {id}: no scorable pixels, skipped"),
                Err(e) => return Err(e),
            }
        }
    } else {
        let (pred, reference, sem) = (
            a.pred.as_deref().expect("clap enforces --pred"),
            a.reference.as_deref().expect("clap enforces --ref"),
            a.mask.as_deref().expect("clap enforces --mask"),
        );
        for p in [pred, reference, sem] {
            require(p)?;
        }
        let id = pred.file_stem().map_or_else(|| "tile".into(), |s| s.to_string_lossy().into_owned());
        scores.push(score_tile(&a.classes, &id, pred, reference, sem)?);
    }
    let report = eval::aggregate(&scores)?;
    report.write(&a.report)?;
    println!(
        "tiles {} pixels {} mse {} sqrt_mse {} rmse_bar {}",
        report.tile_count, report.total_pixels, report.mse_weighted, report.sqrt_mse, report.rmse_bar
    );
    Ok(())
}

fn file_safe(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

fn tile(a: &TileArgs) -> Result<()> {
    require(&a.src)?;
    require(&a.buildings)?;
    if a.size == 0 {
        return Err(Error::Contract("tile size must be positive".into()));
    }
    if !(0.0..=1.0).contains(&a.max_void) {
        return Err(Error::Contract(format!("--max-void {} outside [0, 1]", a.max_void)));
    }
    let src = raster::read_ascii_grid(&a.src)?;
    let candidates = tiling::read_buildings(&a.buildings)?;
    let mut opts = TilingOptions {
        size: a.size,
        max_void_fraction: a.max_void,
        ..TilingOptions::default()
    };
    if let Some(events) = &a.events {
        opts.events = events.iter().map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect();
    }
    ensure_dir(&a.out_dir)?;
    let manifest = tiling::tile_candidates(&src, &candidates, &opts, |entry, t: ScalarRaster| {
        raster::write_ascii_grid(&t, a.out_dir.join(format!("{}.asc", file_safe(&entry.tile_id))))
    })?;
    manifest.write(&a.manifest)
}

fn synthesize(a: &SynthArgs, seed: u64) -> Result<()> {
    let kind: TerrainKind = a.kind.parse()?;
    let params = TerrainParams {
        base: a.base,
        ridge_height: a.ridge,
        ..TerrainParams::square(a.size, a.slope)
    };
    let terrain = synth::gen_terrain(kind, &params)?;
    let scene = synth::make_scene(&terrain, &a.levels, a.noise, seed)?;
    ensure_dir(&a.out_dir)?;
    raster::write_ascii_grid(&scene.dem, a.out_dir.join("dem.asc"))?;
    raster::write_code_grid(&scene.truth_mask, a.out_dir.join("mask.asc"))?;
    raster::write_ascii_grid(&scene.truth_depth, a.out_dir.join("truth_depth.asc"))?;
    let levels: String = scene
        .truth_levels
        .iter()
        .enumerate()
        .map(|(b, l)| format!("{}\t{l}\n", b + 1))
        .collect();
    let path = a.out_dir.join("levels.tsv");
    std::fs::write(&path, format!("basin\tlevel\n{levels}")).map_err(|e| Error::io(&path, e))?;
    log::info!("{kind} scene with {} flooded pixels written to {}", scene.truth_mask.count(1), a.out_dir.display());
    Ok(())
}

fn fetch(a: &FetchArgs) -> Result<()> {
    let bbox = match (&a.like, a.west, a.south, a.east, a.north) {
        (Some(like), ..) => {
            require(like)?;
            dem_fetch::bbox_of(&raster::read_ascii_grid(like)?.grid)
        }
        (None, Some(west), Some(south), Some(east), Some(north)) => BoundingBox { west, south, east, north },
        _ => return Err(Error::Contract("give --west/--south/--east/--north or --like".into())),
    };
    let mut req = FetchRequest::from_env(bbox)?;
    req.dem_type = a.dem_type.clone();
    let dem = DemClient::new(a.endpoint.clone())?.fetch_dem(&req)?;
    raster::write_ascii_grid(&dem, &a.out)
}

fn align(a: &AlignArgs) -> Result<()> {
    require(&a.dem)?;
    require(&a.mask)?;
    let method: Resampling = a.method.parse()?;
    let dem = raster::read_ascii_grid(&a.dem)?;
    let target = raster::read_ascii_grid(&a.mask)?.grid;
    let out = raster::resample_to_grid(&dem, &target, method)?;
    raster::write_ascii_grid(&out, &a.out)
}
