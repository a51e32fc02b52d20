use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use glint::annotate::RemapTable;
use glint::eval::{report_csv, write_report, DEFAULT_THRESHOLDS};
use glint::{evaluate, generate, inspect, write_patches, GenerateOptions, Protocol, ProtocolConfig};

#[derive(Parser)]
#[command(name = "glint", version, about = "Synthetic reflective-object detection datasets")]
struct Cli {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a dataset: images, instance-ID buffers and a manifest.
    Generate {
        /// Protocol configuration (TOML).
        #[arg(long, required_unless_present = "protocol")]
        config: Option<PathBuf>,
        /// Use a built-in preset instead of a configuration file.
        #[arg(long, conflicts_with = "config")]
        protocol: Option<Protocol>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of frames.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Path tracer samples per pixel.
        #[arg(long)]
        spp: Option<u32>,
        /// Also write linear radiance dumps for path-traced frames.
        #[arg(long)]
        float_dump: bool,
    },
    /// Score a detections file against a dataset's annotations.
    Evaluate {
        /// Dataset directory or manifest file.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        detections: PathBuf,
        /// Comma-separated IoU thresholds.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THRESHOLDS.to_vec())]
        thresholds: Vec<f64>,
        /// Class remap table (JSON object), or `external` for the built-in
        /// sink/toilet table.
        #[arg(long)]
        remap: Option<String>,
        /// Directory for report.json and report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print dataset statistics and audit randomized values.
    Inspect {
        /// Dataset directory or manifest file.
        dataset: PathBuf,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Cut object-centered 200x200 patches for every annotation.
    Patch {
        /// Dataset directory or manifest file.
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a protocol's default configuration as TOML.
    Preset { protocol: Protocol },
}

fn load_remap(arg: &str) -> Result<RemapTable> {
    if arg == "external" {
        return Ok(RemapTable::external_validation());
    }
    Ok(RemapTable::load(arg.as_ref())?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate {
            config,
            protocol,
            seed,
            count,
            out,
            spp,
            float_dump,
        } => {
            let mut cfg = match (&config, protocol) {
                (Some(path), _) => ProtocolConfig::load(path)?,
                (None, Some(p)) => ProtocolConfig::preset(p),
                (None, None) => bail!("either --config or --protocol is required"),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = count {
                cfg.frames = n;
            }
            if let Some(o) = out {
                cfg.output = Some(o);
            }
            if let Some(s) = spp {
                cfg.render.spp = s;
            }
            cfg.validate()?;
            let mut options = GenerateOptions::from_config(&cfg)?;
            options.float_dump = float_dump;
            let started = std::time::Instant::now();
            let (manifest, stats) = generate(&cfg, &options)?;
            println!(
                "{} {}: {} frames ({} rendered, {} reused), {} annotations, seed {} -> {} [{:.1}s]",
                manifest.protocol,
                manifest.dataset_id,
                manifest.frames.len(),
                stats.rendered,
                stats.reused,
                manifest.annotations.len(),
                manifest.master_seed,
                options.out.display(),
                started.elapsed().as_secs_f64()
            );
        }
        Command::Evaluate {
            manifest,
            detections,
            thresholds,
            remap,
            out,
        } => {
            let table = remap.as_deref().map(load_remap).transpose()?;
            let report = evaluate(&manifest, &detections, &thresholds, table.as_ref())?;
            print!("{}", report_csv(&report));
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                write_report(&report, &dir.join("report.json"), &dir.join("report.csv"))?;
            }
        }
        Command::Inspect { dataset, json } => {
            let r = inspect(&dataset)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                println!(
                    "dataset {} ({}): {} frames, {} annotations",
                    r.dataset_id, r.protocol, r.frames, r.annotations
                );
                println!("classes:");
                for (c, n) in &r.class_counts {
                    println!("  {c:<24} {n}");
                }
                println!("sub-classes ({}):", r.sub_class_counts.len());
                for (c, n) in &r.sub_class_counts {
                    println!("  {c:<24} {n}");
                }
                println!("visibility:");
                for (i, n) in r.visibility_histogram.iter().enumerate() {
                    println!("  ({:.1}, {:.1}] {n}", i as f64 / 10.0, (i + 1) as f64 / 10.0);
                }
                println!("range violations: {}", r.violations.len());
                for v in &r.violations {
                    println!("  frame {}: {} = {}", v.frame_id, v.field, v.value);
                }
            }
            if !r.violations.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Command::Patch { dataset, out } => {
            let written = write_patches(&dataset, &out)?;
            println!("{} patches -> {}", written.len(), out.display());
        }
        Command::Preset { protocol } => {
            print!("{}", ProtocolConfig::preset(protocol).to_toml_string());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::FAILURE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
