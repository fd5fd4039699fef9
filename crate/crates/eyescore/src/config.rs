//! Run configuration: built-in defaults, a flat `key=value` file, and flags.
//!
//! Precedence is flags over file over defaults. Keys in the file use the long
//! flag names without the leading dashes, e.g. `r-min = 5`.

use std::collections::BTreeMap;
use std::path::Path;

use eyescore_core::iris::ScanEngine;
use eyescore_core::RadiusPolicy;

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoiModeKind {
    /// Boxes centered on annotated eye centers.
    Centered,
    /// Annotated centers displaced by seeded jitter.
    Jittered,
    /// Boxes read from a sidecar CSV.
    File,
    /// Left and right halves of the frame; needs no annotations.
    Halves,
}

impl RoiModeKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "centered" => Self::Centered,
            "jittered" => Self::Jittered,
            "file" => Self::File,
            "halves" => Self::Halves,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub radius: RadiusPolicy,
    pub stride: u32,
    pub engine: ScanEngine,
    /// Pupil center search half-width; `None` picks it from the iris radius.
    pub neighborhood: Option<u32>,
    /// Frames per selection window; 0 disables window expiry.
    pub window: u64,
    pub roi_mode: RoiModeKind,
    pub roi_pad: u32,
    pub jitter_seed: u64,
    pub frame_stride: u32,
    pub workers: usize,
    pub format: OutputFormat,
    pub tolerances: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            radius: RadiusPolicy::Proportional,
            stride: 1,
            engine: ScanEngine::ColumnTables,
            neighborhood: None,
            window: 300,
            roi_mode: RoiModeKind::Centered,
            roi_pad: 0,
            jitter_seed: 0,
            frame_stride: 1,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            format: OutputFormat::Csv,
            tolerances: vec![0.05, 0.1, 0.25],
        }
    }
}

pub const KEYS: [&str; 13] = [
    "roi-mode",
    "roi-pad",
    "jitter-seed",
    "r-min",
    "r-max",
    "stride",
    "frame-stride",
    "neighborhood",
    "window",
    "workers",
    "format",
    "tolerances",
    "engine",
];

/// Raw settings keyed by long flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(pub BTreeMap<String, String>);

impl Settings {
    pub fn parse_file(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::unreadable(path, e))?;
        Self::parse_str(&text).map_err(|m| AppError::Config(format!("{}: {m}", path.display())))
    }

    pub fn parse_str(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let k = k.trim();
            if !KEYS.contains(&k) {
                return Err(format!("line {}: unknown key '{k}'", n + 1));
            }
            map.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self(map))
    }

    /// `self` wins over `lower`.
    pub fn over(mut self, lower: &Settings) -> Self {
        for (k, v) in &lower.0 {
            self.0.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }

    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v);
        }
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> AppResult<Option<T>> {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| AppError::Config(format!("{key}: cannot parse '{v}'"))))
            .transpose()
    }

    fn positive(&self, key: &str) -> AppResult<Option<u64>> {
        match self.num::<u64>(key)? {
            Some(0) => Err(AppError::Config(format!("{key} must be positive"))),
            v => Ok(v),
        }
    }

    /// Resolves against the built-in defaults.
    pub fn resolve(&self) -> AppResult<RunConfig> {
        let mut c = RunConfig::default();
        match (self.num::<u32>("r-min")?, self.num::<u32>("r-max")?) {
            (Some(lo), Some(hi)) if lo >= 2 && lo <= hi => c.radius = RadiusPolicy::Fixed { r_min: lo, r_max: hi },
            (Some(lo), Some(hi)) => return Err(AppError::Config(format!("radius range {lo}..{hi} needs 2 <= r-min <= r-max"))),
            (None, None) => {}
            _ => return Err(AppError::Config("r-min and r-max must be given together".into())),
        }
        if let Some(v) = self.positive("stride")? {
            c.stride = v as u32;
        }
        if let Some(v) = self.positive("frame-stride")? {
            c.frame_stride = v as u32;
        }
        if let Some(v) = self.num::<u32>("neighborhood")? {
            c.neighborhood = Some(v);
        }
        if let Some(v) = self.num::<u64>("window")? {
            c.window = v;
        }
        if let Some(v) = self.positive("workers")? {
            c.workers = v as usize;
        }
        if let Some(v) = self.num::<u32>("roi-pad")? {
            c.roi_pad = v;
        }
        if let Some(v) = self.num::<u64>("jitter-seed")? {
            c.jitter_seed = v;
        }
        if let Some(v) = self.0.get("roi-mode") {
            c.roi_mode = RoiModeKind::parse(v).ok_or_else(|| AppError::Config(format!("roi-mode: unknown '{v}'")))?;
        }
        if let Some(v) = self.0.get("format") {
            c.format = match v.as_str() {
                "csv" => OutputFormat::Csv,
                "jsonl" => OutputFormat::Jsonl,
                _ => return Err(AppError::Config(format!("format: unknown '{v}'"))),
            };
        }
        if let Some(v) = self.0.get("engine") {
            c.engine = match v.as_str() {
                "column-tables" => ScanEngine::ColumnTables,
                "one-pass" => ScanEngine::OnePass,
                _ => return Err(AppError::Config(format!("engine: unknown '{v}'"))),
            };
        }
        if let Some(v) = self.0.get("tolerances") {
            let ts: Result<Vec<f64>, _> = v.split(',').map(|t| t.trim().parse::<f64>()).collect();
            match ts {
                Ok(ts) if !ts.is_empty() && ts.iter().all(|t| *t > 0.0 && t.is_finite()) => c.tolerances = ts,
                _ => return Err(AppError::Config(format!("tolerances: expected positive comma-separated numbers, got '{v}'"))),
            }
        }
        Ok(c)
    }
}
