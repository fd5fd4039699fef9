//! Argument parsing and dispatch. [`run`] returns the process exit code.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use eyescore_core::synth::Preset;

use crate::commands::{cmd_detect, cmd_eval, cmd_maskdump, cmd_stream, cmd_synth, DatasetKind, SynthOptions};
use crate::config::{RoiModeKind, RunConfig, Settings};
use crate::datasets::load_roi_file;
use crate::error::{AppError, AppResult};
use crate::pipeline::RoiSource;

#[derive(Debug, Parser)]
#[command(name = "eyescore", version, about = "Iris and pupil localization in low-resolution eye images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect irises and pupils in images; one record per frame.
    Detect {
        /// Image files or directories of images.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        sources: RoiArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Keep the most confident frame per window of a frame list read from stdin.
    Stream {
        /// Read the frame list from this file instead of stdin.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        sources: RoiArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate against an annotated dataset.
    Eval {
        dataset: PathBuf,
        /// bioid, pupil-csv or synth-manifest.
        #[arg(long)]
        kind: String,
        /// ROI sidecar CSV for --roi-mode file.
        #[arg(long)]
        roi_file: Option<PathBuf>,
        /// Also write per-sample records to this file.
        #[arg(long)]
        records: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate synthetic two-eye images with exact ground truth.
    Synth {
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// clean or noisy.
        #[arg(long, default_value = "clean")]
        preset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Put a one-pixel reflection inside every pupil.
        #[arg(long)]
        highlight: bool,
        #[arg(long, default_value_t = 96)]
        eye_width: u32,
        #[arg(long, default_value_t = 64)]
        eye_height: u32,
        #[arg(long, default_value_t = 6)]
        iris_min: u32,
        #[arg(long, default_value_t = 14)]
        iris_max: u32,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the label grid of the radius-R mask.
    Maskdump { r: u32 },
}

/// Where eye regions come from, besides --roi-mode.
#[derive(Debug, Args)]
pub struct RoiArgs {
    /// `.eye` directory, annotation CSV or synthetic truth CSV. Without it,
    /// annotations are looked up next to each image.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// ROI sidecar CSV `sample_id,x,y,w,h,side` for --roi-mode file.
    #[arg(long)]
    pub roi_file: Option<PathBuf>,
}

/// Settings shared by the processing commands. Unset flags fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat key=value file using the long flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// centered, jittered, file or halves.
    #[arg(long)]
    pub roi_mode: Option<String>,
    #[arg(long)]
    pub roi_pad: Option<String>,
    #[arg(long)]
    pub jitter_seed: Option<String>,
    #[arg(long)]
    pub r_min: Option<String>,
    #[arg(long)]
    pub r_max: Option<String>,
    /// Center grid step in pixels.
    #[arg(long)]
    pub stride: Option<String>,
    /// Process every k-th frame.
    #[arg(long)]
    pub frame_stride: Option<String>,
    /// Pupil center search half-width in pixels.
    #[arg(long)]
    pub neighborhood: Option<String>,
    /// Frames per selection window (0 = until reset or end of input).
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub workers: Option<String>,
    /// csv or jsonl.
    #[arg(long)]
    pub format: Option<String>,
    /// Comma-separated tolerance thresholds.
    #[arg(long)]
    pub tolerances: Option<String>,
    /// column-tables or one-pass.
    #[arg(long)]
    pub engine: Option<String>,
}

impl RunArgs {
    pub fn resolve(&self) -> AppResult<RunConfig> {
        let mut flags = Settings::default();
        for (k, v) in [
            ("roi-mode", &self.roi_mode),
            ("roi-pad", &self.roi_pad),
            ("jitter-seed", &self.jitter_seed),
            ("r-min", &self.r_min),
            ("r-max", &self.r_max),
            ("stride", &self.stride),
            ("frame-stride", &self.frame_stride),
            ("neighborhood", &self.neighborhood),
            ("window", &self.window),
            ("workers", &self.workers),
            ("format", &self.format),
            ("tolerances", &self.tolerances),
            ("engine", &self.engine),
        ] {
            flags.set(k, v.clone());
        }
        let file = match &self.config {
            Some(p) => Settings::parse_file(p)?,
            None => Settings::default(),
        };
        flags.over(&file).resolve()
    }
}

fn roi_source(cfg: &RunConfig, args: &RoiArgs) -> AppResult<RoiSource> {
    if cfg.roi_mode == RoiModeKind::File {
        let path = args
            .roi_file
            .as_ref()
            .ok_or_else(|| AppError::Usage("--roi-mode file needs --roi-file".into()))?;
        return Ok(RoiSource::with_boxes(load_roi_file(path)?));
    }
    match &args.annotations {
        Some(p) => Ok(RoiSource::with_annotations(RoiSource::load_annotations(p)?)),
        None => Ok(RoiSource::default()),
    }
}

fn dispatch<R: BufRead, W: Write + Send>(cli: Cli, stdin: R, stdout: W) -> AppResult<()> {
    match cli.command {
        Command::Detect { inputs, sources, run } => {
            let cfg = run.resolve()?;
            cmd_detect(&inputs, &roi_source(&cfg, &sources)?, &cfg, stdout)
        }
        Command::Stream { input, sources, run } => {
            let cfg = run.resolve()?;
            let roi = roi_source(&cfg, &sources)?;
            match input {
                Some(p) => {
                    let f = std::fs::File::open(&p).map_err(|e| AppError::unreadable(&p, e))?;
                    cmd_stream(std::io::BufReader::new(f), &roi, &cfg, stdout)
                }
                None => cmd_stream(stdin, &roi, &cfg, stdout),
            }
        }
        Command::Eval { dataset, kind, roi_file, records, run } => {
            let cfg = run.resolve()?;
            let kind = DatasetKind::parse(&kind).ok_or_else(|| AppError::Usage(format!("unknown dataset kind '{kind}'")))?;
            cmd_eval(&dataset, kind, roi_file.as_deref(), &cfg, stdout, records.as_deref())
        }
        Command::Synth { count, preset, seed, out, highlight, eye_width, eye_height, iris_min, iris_max, workers } => {
            let preset = Preset::parse(&preset).ok_or_else(|| AppError::Usage(format!("unknown preset '{preset}'")))?;
            let opts = SynthOptions {
                count,
                preset,
                seed,
                eye_width,
                eye_height,
                radii: (iris_min, iris_max),
                highlight,
            };
            let workers = workers.unwrap_or_else(|| RunConfig::default().workers).max(1);
            cmd_synth(&opts, &out, workers)
        }
        Command::Maskdump { r } => cmd_maskdump(r, stdout),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Errors are printed to `stderr` as a single `error: CODE: message` line.
pub fn run<I, T, R, W, E>(args: I, stdin: R, stdout: W, mut stderr: E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    R: BufRead,
    W: Write + Send,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = AppError::Usage(first.trim_start_matches("error: ").to_string());
            let _ = writeln!(stderr, "{}", err.render());
            return err.exit_class() as i32;
        }
    };
    match dispatch(cli, stdin, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.render());
            e.exit_class() as i32
        }
    }
}
