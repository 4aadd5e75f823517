//! Batch command surface over the core library: algebra inspection, skeleton
//! enumeration, chart equations, point checks, module realization, and
//! unipotent degenerations. Outputs are deterministic given identical inputs
//! and seed; a manifest is written beside every output file.

mod formats;
mod manifest;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use quivergrass_core::cancel::CancelToken;
use quivergrass_core::degeneration::{unipotent_degenerate, DominanceVerdict};
use quivergrass_core::equations::{big_presentation, evaluate_membership, sigma_ideal};
use quivergrass_core::layering::{dominates, validate_sequence, SemisimpleSequence};
use quivergrass_core::linalg::row_space;
use quivergrass_core::quiver::VertexId;
use quivergrass_core::realize::{realize_point, relations_check, IsoVerdict};
use quivergrass_core::skeleta::{
    compatible_sequence, critical_data, enumerate_skeleta, is_skeleton, ProjectiveContext,
    Setting, Skeleton,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "quivergrass", version, about = "Module skeleta, chart equations, and degenerations for quivers with relations")]
struct Cli {
    /// Worker threads for parallel enumeration and reduction.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
    /// Seed for randomized probes; QUIVERGRASS_SEED overrides.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file and print its basic invariants.
    Info(InfoArgs),
    /// Enumerate the skeleta compatible with a layering.
    Skeleta(SkeletaArgs),
    /// Emit the chart ideal of a skeleton.
    Equations(EquationsArgs),
    /// Check whether a point satisfies a skeleton's chart ideal.
    CheckPoint(PointArgs),
    /// Realize a chart point as an explicit module.
    Realize(RealizeArgs),
    /// Apply unipotent curves to a submodule and compute the limits.
    Degenerate(DegenerateArgs),
    /// Compare two layerings under the dominance order.
    Dominance(DominanceArgs),
}

#[derive(Args)]
struct InfoArgs {
    algebra: PathBuf,
}

#[derive(Args)]
struct SkeletaArgs {
    algebra: PathBuf,
    /// Layering literal, e.g. [[2,0],[0,3]].
    #[arg(long)]
    sequence: String,
    #[arg(long, default_value = "small")]
    setting: SettingArg,
    /// Keep one representative per slot permutation fixing vertices.
    #[arg(long)]
    dedupe: bool,
    /// Exit with code 3 when no skeleton exists.
    #[arg(long)]
    require_nonempty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EquationsArgs {
    algebra: PathBuf,
    #[arg(long)]
    skeleton: PathBuf,
    /// Which skeleton block of the file to use (0-based).
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, default_value = "small")]
    setting: SettingArg,
    /// Sort generators by total degree in the text output.
    #[arg(long)]
    degree_sorted: bool,
    #[arg(long, default_value = "text")]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    algebra: PathBuf,
    #[arg(long)]
    skeleton: PathBuf,
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, default_value = "small")]
    setting: SettingArg,
    #[arg(long)]
    point: PathBuf,
}

#[derive(Args)]
struct RealizeArgs {
    algebra: PathBuf,
    #[arg(long)]
    skeleton: PathBuf,
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, default_value = "small")]
    setting: SettingArg,
    #[arg(long)]
    point: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DegenerateArgs {
    algebra: PathBuf,
    /// Submodule file: a `slots:` header plus generator lines.
    #[arg(long)]
    submodule: PathBuf,
    /// Curve file: blocks separated by `--` lines.
    #[arg(long)]
    curve: PathBuf,
    /// How many curve blocks to apply successively (default: all).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DominanceArgs {
    #[arg(long)]
    seq_a: String,
    #[arg(long)]
    seq_b: String,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SettingArg {
    Small,
    Big,
}

impl From<SettingArg> for Setting {
    fn from(value: SettingArg) -> Setting {
        match value {
            SettingArg::Small => Setting::Small,
            SettingArg::Big => Setting::Big,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn main() {
    let outcome = std::panic::catch_unwind(run);
    let code = match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            2
        }
        Err(_) => {
            eprintln!("error: internal assertion failed");
            4
        }
    };
    std::process::exit(code);
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    let seed = std::env::var("QUIVERGRASS_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(cli.seed);
    let threads = cli.parallel.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot build the worker pool")?;
    pool.install(|| dispatch(&cli.command, seed))
}

fn dispatch(command: &Command, seed: u64) -> Result<i32> {
    match command {
        Command::Info(args) => cmd_info(args),
        Command::Skeleta(args) => cmd_skeleta(args, seed),
        Command::Equations(args) => cmd_equations(args, seed),
        Command::CheckPoint(args) => cmd_check_point(args),
        Command::Realize(args) => cmd_realize(args, seed),
        Command::Degenerate(args) => cmd_degenerate(args, seed),
        Command::Dominance(args) => cmd_dominance(args),
    }
}

fn read_algebra(path: &Path) -> Result<quivergrass_core::algebra::AlgebraPresentation> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let algebra = formats::parse_algebra(&text)?;
    algebra
        .validate()
        .map_err(|e| anyhow!("invalid algebra: {e}"))?;
    Ok(algebra)
}

fn parse_layering(text: &str, vertex_count: usize, loewy_bound: usize) -> Result<SemisimpleSequence> {
    let raw = formats::parse_sequence(text)?;
    if raw.iter().any(|l| l.len() != vertex_count) {
        bail!("each layer needs {vertex_count} entries");
    }
    let mut layers = raw;
    while layers.len() < loewy_bound + 1 {
        layers.push(vec![0; vertex_count]);
    }
    if layers.len() != loewy_bound + 1 {
        bail!(
            "expected at most {} layers for Loewy bound {}",
            loewy_bound + 1,
            loewy_bound
        );
    }
    Ok(SemisimpleSequence::from_counts(layers))
}

fn cmd_info(args: &InfoArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.algebra)
        .with_context(|| format!("cannot read {}", args.algebra.display()))?;
    let algebra = formats::parse_algebra(&text)?;
    let report = algebra
        .validate()
        .map_err(|e| anyhow!("invalid algebra: {e}"))?;
    let quiver = &algebra.quiver;
    println!("vertices: {}", quiver.vertex_count());
    println!("arrows: {}", quiver.arrow_count());
    println!("loewy bound: {}", algebra.loewy_bound);
    println!(
        "effective relations: {} user, {} composite, {} boundary, {} total",
        report.user_relations,
        report.composite_relations,
        report.boundary_relations,
        report.effective_total
    );
    for v in quiver.vertices() {
        let model = quivergrass_core::algebra::truncated_module_basis(&algebra, &[v])
            .map_err(|e| anyhow!("{e}"))?;
        let layers = model.layer_dims(quiver, algebra.loewy_bound);
        let layer_text: Vec<String> = layers
            .iter()
            .map(|l| l.iter().sum::<usize>().to_string())
            .collect();
        println!(
            "dim Lambda e_{} = {}; layers {}",
            quiver.vertex_name(v),
            model.dimension(),
            layer_text.join(",")
        );
        // Per-vertex-pair dimensions e_i Lambda e_j.
        let per_vertex = model.vertex_layout(quiver);
        let pair_text: Vec<String> = quiver
            .vertices()
            .map(|i| {
                format!(
                    "e_{} . = {}",
                    quiver.vertex_name(i),
                    per_vertex[i.0].len()
                )
            })
            .collect();
        println!("  {}", pair_text.join("; "));
    }
    Ok(0)
}

fn skeleta_context<'a>(
    algebra: &'a quivergrass_core::algebra::AlgebraPresentation,
    sequence: &SemisimpleSequence,
    setting: SettingArg,
) -> ProjectiveContext<'a> {
    match setting {
        SettingArg::Small => ProjectiveContext::small_cover(algebra, sequence.top()),
        SettingArg::Big => ProjectiveContext::big_cover(algebra, &sequence.total()),
    }
}

fn cmd_skeleta(args: &SkeletaArgs, seed: u64) -> Result<i32> {
    let start = Instant::now();
    let algebra = read_algebra(&args.algebra)?;
    let sequence = parse_layering(&args.sequence, algebra.quiver.vertex_count(), algebra.loewy_bound)?;
    let check = validate_sequence(&sequence, &algebra);
    if !check.ok {
        bail!(
            "invalid sequence: {}",
            check.reason.unwrap_or_else(|| "unknown".into())
        );
    }
    let ctx = skeleta_context(&algebra, &sequence, args.setting);
    let skeleta = enumerate_skeleta(&ctx, &sequence, args.dedupe);
    if skeleta.is_empty() && args.require_nonempty {
        eprintln!("no skeleton is compatible with the sequence");
        return Ok(3);
    }
    let mut body = format!(
        "slots: {}\n",
        ctx.slots
            .iter()
            .map(|&v| algebra.quiver.vertex_name(v))
            .collect::<Vec<_>>()
            .join(",")
    );
    body.push_str(&formats::render_skeleta(&algebra.quiver, &skeleta));
    match &args.out {
        Some(out) => {
            std::fs::write(out, &body)?;
            manifest::write_manifest(
                out,
                &manifest::RunManifest {
                    command: format!(
                        "skeleta --sequence {} --setting {} {}",
                        args.sequence,
                        match args.setting {
                            SettingArg::Small => "small",
                            SettingArg::Big => "big",
                        },
                        if args.dedupe { "--dedupe" } else { "" }
                    ),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    seed,
                    inputs: vec![manifest::digest_file(&args.algebra)?],
                    wall_ms: start.elapsed().as_millis(),
                },
            )?;
            println!("{} skeleta written to {}", skeleta.len(), out.display());
        }
        None => print!("{body}"),
    }
    Ok(0)
}

struct LoadedSkeleton<'a> {
    ctx: ProjectiveContext<'a>,
    skeleton: Skeleton,
}

fn load_skeleton<'a>(
    algebra: &'a quivergrass_core::algebra::AlgebraPresentation,
    path: &Path,
    index: usize,
    setting: SettingArg,
) -> Result<LoadedSkeleton<'a>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    // The slots header fixes the ambient cover; default to the cover implied
    // by the first skeleton's top when absent.
    let mut slots: Option<Vec<VertexId>> = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.trim().strip_prefix("slots:") {
            let parsed: Result<Vec<VertexId>> = rest
                .split(',')
                .map(|name| {
                    algebra
                        .quiver
                        .vertex_by_name(name.trim())
                        .map_err(|e| anyhow!("{e}"))
                })
                .collect();
            slots = Some(parsed?);
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    let slots = slots.ok_or_else(|| anyhow!("skeleton file is missing its `slots:` header"))?;
    let ctx = ProjectiveContext::new(algebra, slots, setting.into());
    let skeleta = formats::parse_skeleta(&ctx, &body)?;
    let skeleton = skeleta
        .get(index)
        .cloned()
        .ok_or_else(|| anyhow!("skeleton index {index} out of range ({} blocks)", skeleta.len()))?;
    if !is_skeleton(&skeleton.paths, &ctx) {
        bail!("block {index} is not a skeleton for the declared cover and setting");
    }
    Ok(LoadedSkeleton { ctx, skeleton })
}

fn cmd_equations(args: &EquationsArgs, seed: u64) -> Result<i32> {
    let start = Instant::now();
    let algebra = read_algebra(&args.algebra)?;
    let loaded = load_skeleton(&algebra, &args.skeleton, args.index, args.setting)?;
    let data = critical_data(&loaded.skeleton, &loaded.ctx);
    let ideal = match args.setting {
        SettingArg::Small => sigma_ideal(&loaded.skeleton, &loaded.ctx, &data),
        SettingArg::Big => big_presentation(&loaded.skeleton, &loaded.ctx, &data),
    };
    let body = match args.format {
        FormatArg::Text => {
            formats::render_ideal_text(&algebra.quiver, &ideal, &data, args.degree_sorted)
        }
        FormatArg::Json => formats::render_ideal_json(&algebra.quiver, &ideal),
    };
    match &args.out {
        Some(out) => {
            std::fs::write(out, &body)?;
            manifest::write_manifest(
                out,
                &manifest::RunManifest {
                    command: format!("equations --index {}", args.index),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    seed,
                    inputs: vec![
                        manifest::digest_file(&args.algebra)?,
                        manifest::digest_file(&args.skeleton)?,
                    ],
                    wall_ms: start.elapsed().as_millis(),
                },
            )?;
            println!(
                "{} generators in {} variables written to {}",
                ideal.generators.len(),
                ideal.variable_count(),
                out.display()
            );
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn cmd_check_point(args: &PointArgs) -> Result<i32> {
    let algebra = read_algebra(&args.algebra)?;
    let loaded = load_skeleton(&algebra, &args.skeleton, args.index, args.setting)?;
    let data = critical_data(&loaded.skeleton, &loaded.ctx);
    let ideal = sigma_ideal(&loaded.skeleton, &loaded.ctx, &data);
    let point_text = std::fs::read_to_string(&args.point)
        .with_context(|| format!("cannot read {}", args.point.display()))?;
    let point = formats::parse_point(&loaded.ctx, &data, &point_text)?;
    let member = evaluate_membership(&ideal, &point.values).map_err(|e| anyhow!("{e}"))?;
    println!("on-chart: {member}");
    if !member {
        for (i, g) in ideal.generators.iter().enumerate() {
            let value = g.evaluate(&point.values).map_err(|e| anyhow!("{e}"))?;
            if !num::Zero::is_zero(&value) {
                println!(
                    "first failing generator: {} (value {})",
                    i,
                    quivergrass_core::scalar::format_rational(&value)
                );
                break;
            }
        }
    }
    Ok(0)
}

fn cmd_realize(args: &RealizeArgs, seed: u64) -> Result<i32> {
    let start = Instant::now();
    let algebra = read_algebra(&args.algebra)?;
    let loaded = load_skeleton(&algebra, &args.skeleton, args.index, args.setting)?;
    let data = critical_data(&loaded.skeleton, &loaded.ctx);
    let point_text = std::fs::read_to_string(&args.point)
        .with_context(|| format!("cannot read {}", args.point.display()))?;
    let point = formats::parse_point(&loaded.ctx, &data, &point_text)?;
    let module = realize_point(&loaded.skeleton, &data, &loaded.ctx, &point)
        .map_err(|e| anyhow!("{e}"))?;
    let check = relations_check(&module, &algebra);
    let mut body = formats::render_module(&algebra.quiver, &module);
    body.push_str(&format!(
        "relations: {}\n",
        match &check.failure {
            None => "pass".to_string(),
            Some(witness) => format!("fail ({witness})"),
        }
    ));
    let layering = quivergrass_core::layering::layering_of_unchecked(&module, &algebra);
    body.push_str(&format!("layering: {}\n", render_layering(&layering)));
    body.push_str(&format!(
        "compatible: {}\n",
        layering == compatible_sequence(&loaded.skeleton, &loaded.ctx)
    ));
    match &args.out {
        Some(out) => {
            std::fs::write(out, &body)?;
            manifest::write_manifest(
                out,
                &manifest::RunManifest {
                    command: format!("realize --index {}", args.index),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    seed,
                    inputs: vec![
                        manifest::digest_file(&args.algebra)?,
                        manifest::digest_file(&args.skeleton)?,
                        manifest::digest_file(&args.point)?,
                    ],
                    wall_ms: start.elapsed().as_millis(),
                },
            )?;
            println!("module written to {}", out.display());
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn render_layering(seq: &SemisimpleSequence) -> String {
    let layers: Vec<String> = seq
        .layers
        .iter()
        .map(|l| {
            format!(
                "[{}]",
                l.0.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        })
        .collect();
    format!("[{}]", layers.join(","))
}

fn cmd_degenerate(args: &DegenerateArgs, seed: u64) -> Result<i32> {
    let start = Instant::now();
    let algebra = read_algebra(&args.algebra)?;
    let sub_text = std::fs::read_to_string(&args.submodule)
        .with_context(|| format!("cannot read {}", args.submodule.display()))?;
    let (slots, generator_lines) = formats::parse_submodule_file(&algebra, &sub_text)?;
    let ctx = ProjectiveContext::new(&algebra, slots, Setting::Big);
    let mut submodule = formats::parse_generators(&ctx, &generator_lines)?;
    let curve_text = std::fs::read_to_string(&args.curve)
        .with_context(|| format!("cannot read {}", args.curve.display()))?;
    let curves = formats::parse_curves(&ctx, &curve_text)?;
    let steps = args.steps.unwrap_or(curves.len()).min(curves.len());
    let cancel = CancelToken::never();
    let mut body = String::new();
    for (i, curve) in curves.iter().take(steps).enumerate() {
        let report = unipotent_degenerate(&ctx, &submodule, curve, seed, &cancel)
            .map_err(|e| anyhow!("step {}: {e}", i + 1))?;
        body.push_str(&format!("step {}\n", i + 1));
        body.push_str(&format!("family generic rank: {}\n", report.family_rank));
        body.push_str("limit:\n");
        let reduced = row_space(&report.limit.generators, report.limit.ambient_dim);
        for row in reduced.rows_vec() {
            body.push_str(&format!(
                "{}\n",
                formats::render_ambient_vector(&ctx, &row)
            ));
        }
        body.push_str(&format!(
            "module layering: {}\n",
            render_layering(&report.layering)
        ));
        body.push_str(&format!(
            "limit layering: {}\n",
            render_layering(&report.limit_layering)
        ));
        body.push_str(&format!(
            "dominance: {}\n",
            match report.verdict {
                DominanceVerdict::Equal => "equal",
                DominanceVerdict::StrictlyDominates => "strictly-dominates",
                DominanceVerdict::Violates => "violates",
            }
        ));
        body.push_str(&format!(
            "iso: {}\n",
            match &report.iso {
                IsoVerdict::Isomorphic(_) => "isomorphic".to_string(),
                IsoVerdict::NotIsomorphic(reason) => format!("not-isomorphic ({reason})"),
                IsoVerdict::Inconclusive => "inconclusive".to_string(),
            }
        ));
        if i + 1 < steps {
            body.push_str("--\n");
        }
        submodule = quivergrass_core::realize::SubmodulePresentation::new(
            reduced.rows_vec(),
            report.limit.ambient_dim,
        );
    }
    match &args.out {
        Some(out) => {
            std::fs::write(out, &body)?;
            manifest::write_manifest(
                out,
                &manifest::RunManifest {
                    command: format!("degenerate --steps {steps}"),
                    version: env!("CARGO_PKG_VERSION").to_string(),
                    seed,
                    inputs: vec![
                        manifest::digest_file(&args.algebra)?,
                        manifest::digest_file(&args.submodule)?,
                        manifest::digest_file(&args.curve)?,
                    ],
                    wall_ms: start.elapsed().as_millis(),
                },
            )?;
            println!("{steps} degeneration steps written to {}", out.display());
        }
        None => print!("{body}"),
    }
    Ok(0)
}

fn cmd_dominance(args: &DominanceArgs) -> Result<i32> {
    let a_raw = formats::parse_sequence(&args.seq_a)?;
    let b_raw = formats::parse_sequence(&args.seq_b)?;
    let a = SemisimpleSequence::from_counts(a_raw);
    let b = SemisimpleSequence::from_counts(b_raw);
    let ab = dominates(&a, &b).map_err(|e| anyhow!("{e}"))?;
    let ba = dominates(&b, &a).map_err(|e| anyhow!("{e}"))?;
    println!("dominates(a, b): {ab}");
    println!("dominates(b, a): {ba}");
    println!(
        "verdict: {}",
        match (ab, ba) {
            (true, true) => "equal",
            (true, false) => "a-strictly-dominates",
            (false, true) => "b-strictly-dominates",
            (false, false) => "incomparable",
        }
    );
    Ok(0)
}
