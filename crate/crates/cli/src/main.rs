use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use threedsl_core::ingest::{write_characters_csv, write_events_csv};
use threedsl_core::layout::geomap::place_maps_overview;
use threedsl_core::model::RadiusClamp;
use threedsl_core::scene::{layout_lod, SceneConfig};
use threedsl_core::synth::{generate, SyntheticSpec};
use threedsl_core::{
    compile_scene, export_scene_json, load_dataset, parse_and_validate, CompileConfig, Lod, Threshold, VariantKey,
};

#[derive(Debug, Parser)]
#[command(name = "threedsl", version, about = "Compile narrative data into 3D storyline scenes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a dataset and print every issue found.
    Validate(Inputs),
    /// Compile a dataset into a scene JSON file.
    #[command(allow_negative_numbers = true)]
    Layout {
        #[command(flatten)]
        inputs: Inputs,
        /// Output scene file.
        #[arg(short, long, default_value = "scene.json")]
        out: PathBuf,
        /// Scene name stored in the document.
        #[arg(long, default_value = "scene")]
        name: String,
        #[command(flatten)]
        params: LayoutFlags,
    },
    /// Print dataset and layout statistics.
    #[command(allow_negative_numbers = true)]
    Stats {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        params: LayoutFlags,
    },
    /// Write a seeded synthetic dataset.
    GenSynthetic {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 411, value_parser = positive)]
        n_points: usize,
        #[arg(long, default_value_t = 95, value_parser = positive)]
        n_events: usize,
        #[arg(long, default_value_t = 12, value_parser = positive)]
        n_characters: usize,
        #[arg(long, default_value_t = 3, value_parser = positive)]
        n_scenarios: usize,
        /// Directory receiving characters.csv and events.csv.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Serve a scene and the viewer over HTTP.
    #[command(allow_negative_numbers = true)]
    Serve {
        /// Previously compiled scene file.
        #[arg(long, conflicts_with_all = ["characters", "events"])]
        scene: Option<PathBuf>,
        /// Characters CSV, compiled on start-up.
        #[arg(requires = "events")]
        characters: Option<PathBuf>,
        /// Events CSV.
        events: Option<PathBuf>,
        #[arg(long, default_value = "scene")]
        name: String,
        /// Directory with static viewer files.
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[command(flatten)]
        params: LayoutFlags,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a count of at least 1, got `{s}`")),
    }
}

#[derive(Debug, Args)]
struct Inputs {
    /// Characters CSV.
    characters: PathBuf,
    /// Events CSV.
    events: PathBuf,
}

/// Layout parameters; anything left out keeps its default.
#[derive(Debug, Args)]
struct LayoutFlags {
    /// Gap between consecutive event spheres.
    #[arg(long)]
    delta_e: Option<f64>,
    /// New center of the earliest sphere.
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    time_height: Option<f64>,
    #[arg(long)]
    map_size: Option<f64>,
    #[arg(long)]
    map_padding: Option<f64>,
    /// Sphere radius per world unit of event duration.
    #[arg(long)]
    radius_scale: Option<f64>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// Character impact threshold: a number or `auto-median`.
    #[arg(long)]
    xi_c_thre: Option<Threshold>,
    /// Event impact threshold: a number or `auto-median`.
    #[arg(long)]
    xi_e_thre: Option<Threshold>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    rho_step: Option<f64>,
    /// Minimum angular gap between overview maps, degrees.
    #[arg(long)]
    margin_deg: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    samples_per_segment: Option<usize>,
    #[arg(long)]
    point_radius: Option<f64>,
}

impl LayoutFlags {
    fn config(&self) -> CompileConfig {
        let mut cfg = CompileConfig::default();
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.time.delta_e, self.delta_e);
        set(&mut cfg.time.y0, self.y0);
        set(&mut cfg.ingest.time_height, self.time_height);
        set(&mut cfg.ingest.map_size, self.map_size);
        set(&mut cfg.ingest.map_padding, self.map_padding);
        set(&mut cfg.ingest.radius_scale, self.radius_scale);
        let RadiusClamp { min, max } = cfg.ingest.radius_clamp;
        cfg.ingest.radius_clamp = RadiusClamp { min: self.r_min.unwrap_or(min), max: self.r_max.unwrap_or(max) };
        if let Some(t) = self.xi_c_thre {
            cfg.ingest.xi_c_thre = t;
        }
        if let Some(t) = self.xi_e_thre {
            cfg.ingest.xi_e_thre = t;
        }
        set(&mut cfg.geomap.rho_min, self.rho_min);
        set(&mut cfg.geomap.rho_step, self.rho_step);
        set(&mut cfg.geomap.margin, self.margin_deg.map(f64::to_radians));
        if let Some(n) = self.max_iter {
            cfg.geomap.max_iter = n;
        }
        let SceneConfig { samples_per_segment, point_radius } = cfg.scene;
        cfg.scene = SceneConfig {
            samples_per_segment: self.samples_per_segment.unwrap_or(samples_per_segment),
            point_radius: self.point_radius.unwrap_or(point_radius),
        };
        cfg
    }

    fn validated(&self) -> Result<CompileConfig, Failure> {
        let cfg = self.config();
        cfg.ingest.validate().map_err(|e| Failure::usage(anyhow!(e)))?;
        cfg.validate_layout().map_err(|e| Failure::usage(anyhow!(e)))?;
        Ok(cfg)
    }
}

/// An error together with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn domain(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 1, error: error.into() }
    }

    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::usage)
}

fn read_inputs(inputs: &Inputs) -> Result<(Vec<u8>, Vec<u8>), Failure> {
    Ok((read(&inputs.characters)?, read(&inputs.events)?))
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn cmd_validate(inputs: &Inputs) -> Outcome {
    let (chars, events) = read_inputs(inputs)?;
    let raw = parse_and_validate(&chars, &events).map_err(Failure::domain)?;
    if !raw.report.is_empty() {
        print!("{}", raw.report);
    }
    if raw.report.has_errors() {
        return Err(Failure::domain(anyhow!("ValidationFailed: {}", plural(raw.report.errors().count(), "error"))));
    }
    let characters: BTreeSet<&str> = raw.points.iter().map(|p| p.character_id.as_str()).collect();
    println!("OK ({}, {})", plural(characters.len(), "character"), plural(raw.events.len(), "event"));
    Ok(())
}

fn compile(inputs: &Inputs, name: &str, params: &LayoutFlags) -> Result<(Vec<u8>, Vec<String>), Failure> {
    let cfg = params.validated()?;
    let (chars, events) = read_inputs(inputs)?;
    let start = Instant::now();
    let scene = compile_scene(&chars, &events, name, &cfg).map_err(Failure::domain)?;
    let json = export_scene_json(&scene);
    let elapsed = start.elapsed();

    let mut lines = Vec::new();
    for key in VariantKey::ALL {
        let v = scene.variant(key).expect("every variant is built");
        lines.push(format!(
            "{:<20} {:>5} points {:>5} events {:>5} polylines",
            key.as_str(),
            v.point_nodes.len(),
            v.event_nodes.len(),
            v.polylines.len()
        ));
    }
    lines.push(format!("compiled in {:.1} ms", elapsed.as_secs_f64() * 1e3));
    lines.push(format!("{}, {}", plural(scene.variants.len(), "variant"), plural(scene.polyline_count(), "polyline")));
    Ok((json, lines))
}

fn cmd_layout(inputs: &Inputs, out: &Path, name: &str, params: &LayoutFlags) -> Outcome {
    let (json, lines) = compile(inputs, name, params)?;
    fs::write(out, &json).with_context(|| format!("cannot write {}", out.display())).map_err(Failure::usage)?;
    for line in lines {
        println!("{line}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_stats(inputs: &Inputs, params: &LayoutFlags) -> Outcome {
    let cfg = params.validated()?;
    let (chars, events) = read_inputs(inputs)?;
    let dataset = load_dataset(&chars, &events, &cfg.ingest).map_err(Failure::domain)?;
    println!(
        "{}, {}, {}, {}",
        plural(dataset.tracks.len(), "character"),
        plural(dataset.point_count(), "point"),
        plural(dataset.events.len(), "event"),
        plural(dataset.scenarios.len(), "scenario"),
    );
    println!("time range {} .. {}", dataset.time_range.0, dataset.time_range.1);
    println!("thresholds: character {}, event {}", dataset.thresholds.character, dataset.thresholds.event);
    for lod in [Lod::Overview, Lod::Detail] {
        let layout = layout_lod(&dataset, &cfg.time, lod);
        let members = layout.result.membership.iter().flatten().count();
        let height = layout
            .result
            .event_y
            .iter()
            .zip(&layout.events)
            .map(|(y, &i)| y + dataset.events[i].radius)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{lod:?}: {}, {}, {members} inside spheres, top of last sphere at {}",
            plural(layout.points.len(), "point"),
            plural(layout.events.len(), "event"),
            if height.is_finite() { format!("{height:.3}") } else { "-".into() },
        );
    }
    let maps = place_maps_overview(&dataset, &cfg.geomap).map_err(Failure::domain)?;
    for m in maps {
        println!(
            "map {}: importance {:.3}, rho {:.3}, theta {:.2} deg",
            m.scenario_id,
            m.importance.unwrap_or_default(),
            m.rho.unwrap_or_default(),
            m.theta.unwrap_or_default().to_degrees()
        );
    }
    Ok(())
}

fn cmd_gen_synthetic(spec: SyntheticSpec, out_dir: &Path) -> Outcome {
    let (points, events) = generate(&spec);
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .map_err(Failure::usage)?;
    let write = |file: &str, text: String| {
        let path = out_dir.join(file);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display())).map_err(Failure::usage)
    };
    write("characters.csv", write_characters_csv(&points))?;
    write("events.csv", write_events_csv(&events))?;
    println!(
        "wrote {} and {} to {}",
        plural(points.len(), "character record"),
        plural(events.len(), "event"),
        out_dir.display()
    );
    Ok(())
}

struct ServeArgs<'a> {
    scene: Option<&'a Path>,
    inputs: Option<Inputs>,
    name: &'a str,
    assets: Option<PathBuf>,
    host: &'a str,
    port: u16,
    params: &'a LayoutFlags,
}

fn cmd_serve(args: ServeArgs<'_>) -> Outcome {
    let json = match (args.scene, &args.inputs) {
        (Some(path), _) => {
            let bytes = read(path)?;
            threedsl_core::parse_scene_json(&bytes).map_err(Failure::domain)?;
            bytes
        }
        (None, Some(inputs)) => compile(inputs, args.name, args.params)?.0,
        (None, None) => return Err(Failure::usage(anyhow!("serve needs --scene or a characters/events pair"))),
    };
    if let Some(dir) = &args.assets {
        if !dir.is_dir() {
            return Err(Failure::usage(anyhow!("asset directory {} does not exist", dir.display())));
        }
    }
    let runtime = tokio::runtime::Runtime::new().context("cannot start runtime").map_err(Failure::usage)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host, args.port))
            .await
            .with_context(|| format!("cannot bind {}:{}", args.host, args.port))
            .map_err(Failure::usage)?;
        let addr = listener.local_addr().map_err(Failure::usage)?;
        println!("serving on http://{addr}");
        log::info!("scene is {} bytes", json.len());
        axum::serve(listener, threedsl_cli::router(json, args.assets))
            .await
            .context("server stopped")
            .map_err(Failure::usage)
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(inputs) => cmd_validate(&inputs),
        Command::Layout { inputs, out, name, params } => cmd_layout(&inputs, &out, &name, &params),
        Command::Stats { inputs, params } => cmd_stats(&inputs, &params),
        Command::GenSynthetic { seed, n_points, n_events, n_characters, n_scenarios, out_dir } => {
            let spec = SyntheticSpec { seed, n_points, n_events, n_characters, n_scenarios };
            cmd_gen_synthetic(spec, &out_dir)
        }
        Command::Serve { scene, characters, events, name, assets, host, port, params } => {
            let inputs = characters.zip(events).map(|(characters, events)| Inputs { characters, events });
            cmd_serve(ServeArgs {
                scene: scene.as_deref(),
                inputs,
                name: &name,
                assets,
                host: &host,
                port,
                params: &params,
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("THREEDSL_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
