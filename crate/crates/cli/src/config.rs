//! Flag and config-file overlay: builtin preset defaults, then the config
//! file, then explicit command-line flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use simsmooth::{Measure, ModelKind, Preset, SmoothingConfig};

/// A neighbor cap: a count or `inf` for S(w1) = V1.
#[derive(Debug, Clone, Copy)]
pub struct KArg(pub Option<usize>);

impl std::str::FromStr for KArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_k(s).map(KArg)
    }
}

/// A parameter grid: `a,b,c` or `start:stop:step`.
#[derive(Debug, Clone)]
pub struct GridArg(pub Vec<f64>);

impl std::str::FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grid(s).map(GridArg)
    }
}

/// A threshold: a positive value or `inf`.
#[derive(Debug, Clone, Copy)]
pub struct TArg(pub f64);

impl std::str::FromStr for TArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_t(s).map(TArg)
    }
}

/// Smoothing parameters shared by the model-building commands.
#[derive(Debug, Clone, Args)]
pub struct ModelFlags {
    /// Similarity measure: kl, js, l1, conf
    #[arg(long)]
    pub measure: Option<Measure>,
    /// Base model for similarity values: mle, katz
    #[arg(long)]
    pub base: Option<ModelKind>,
    /// Base model for the evidence inside the similarity estimate
    #[arg(long)]
    pub evidence_base: Option<ModelKind>,
    /// Weight-scale parameter (lm preset: 4)
    #[arg(long)]
    pub beta: Option<f64>,
    /// Unigram interpolation weight (lm preset: 0.15, wsd preset: 0)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Neighbor cap: a count or `inf` (lm preset: 60, wsd preset: inf)
    #[arg(long)]
    pub k: Option<KArg>,
    /// Dissimilarity threshold: a value or `inf` (lm preset: 2.5)
    #[arg(long)]
    pub t: Option<TArg>,
    /// Good-Turing discount threshold (counts at or above keep their value)
    #[arg(long)]
    pub gt_threshold: Option<u64>,
    /// Parameter preset: `lm` (language modeling) or `wsd` (disambiguation)
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Flat key=value config file (keys: measure, base, evidence_base,
    /// beta, gamma, k, t, seed); flags override file values
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

pub fn parse_k(s: &str) -> Result<Option<usize>, String> {
    if s == "inf" {
        return Ok(None);
    }
    s.parse::<usize>()
        .map(Some)
        .map_err(|e| format!("bad k {s:?}: {e}"))
}

pub fn parse_t(s: &str) -> Result<f64, String> {
    if s == "inf" {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>().map_err(|e| format!("bad t {s:?}: {e}"))
}

#[derive(Debug, Default)]
pub struct FileOverlay {
    pub measure: Option<Measure>,
    pub base: Option<ModelKind>,
    pub evidence_base: Option<ModelKind>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub k: Option<Option<usize>>,
    pub t: Option<f64>,
    pub seed: Option<u64>,
}

pub fn load_config_file(path: &Path) -> Result<FileOverlay> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut overlay = FileOverlay::default();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value, got {line:?}", path.display(), idx + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |e: String| anyhow::anyhow!("{}:{}: {e}", path.display(), idx + 1);
        match key {
            "measure" => overlay.measure = Some(value.parse().map_err(parse_err)?),
            "base" => overlay.base = Some(value.parse().map_err(parse_err)?),
            "evidence_base" => overlay.evidence_base = Some(value.parse().map_err(parse_err)?),
            "beta" => overlay.beta = Some(value.parse()?),
            "gamma" => overlay.gamma = Some(value.parse()?),
            "k" => overlay.k = Some(parse_k(value).map_err(parse_err)?),
            "t" => overlay.t = Some(parse_t(value).map_err(parse_err)?),
            "seed" => overlay.seed = Some(value.parse()?),
            other => bail!(
                "{}:{}: unknown config key {other:?}",
                path.display(),
                idx + 1
            ),
        }
    }
    Ok(overlay)
}

/// Resolves the effective smoothing configuration:
/// command default preset < --preset < config file < explicit flags.
/// Also returns the seed from the file, if any (flags override it later).
pub fn resolve(default_preset: Preset, flags: &ModelFlags) -> Result<(SmoothingConfig, Option<u64>)> {
    let mut config = flags.preset.unwrap_or(default_preset).config();
    let mut file_seed = None;
    if let Some(path) = &flags.config {
        let overlay = load_config_file(path)?;
        apply_overlay(&mut config, &overlay);
        file_seed = overlay.seed;
    }
    let flag_overlay = FileOverlay {
        measure: flags.measure,
        base: flags.base,
        evidence_base: flags.evidence_base,
        beta: flags.beta,
        gamma: flags.gamma,
        k: flags.k.map(|k| k.0),
        t: flags.t.map(|t| t.0),
        seed: None,
    };
    apply_overlay(&mut config, &flag_overlay);
    if let Some(gt) = flags.gt_threshold {
        config.gt_threshold = gt;
    }
    config.validate()?;
    Ok((config, file_seed))
}

fn apply_overlay(config: &mut SmoothingConfig, overlay: &FileOverlay) {
    if let Some(m) = overlay.measure {
        config.measure = m;
        // keep the measure/base pairing legal unless the base is set explicitly
        if overlay.base.is_none() {
            match m {
                Measure::Kl => config.sim_base = ModelKind::Katz,
                Measure::Confusion => config.sim_base = ModelKind::Mle,
                _ => {}
            }
        }
    }
    if let Some(b) = overlay.base {
        config.sim_base = b;
    }
    if let Some(b) = overlay.evidence_base {
        config.evidence_base = b;
    }
    if let Some(v) = overlay.beta {
        config.beta = v;
    }
    if let Some(v) = overlay.gamma {
        config.gamma = v;
    }
    if let Some(v) = overlay.k {
        config.k = v;
    }
    if let Some(v) = overlay.t {
        config.t = v;
    }
}

/// Comma-separated float list, or `start:stop:step` ranges.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some((start, rest)) = s.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .ok_or_else(|| format!("expected start:stop:step, got {s:?}"))?;
        let (start, stop, step): (f64, f64, f64) = (
            start.parse().map_err(|e| format!("{e}"))?,
            stop.parse().map_err(|e| format!("{e}"))?,
            step.parse().map_err(|e| format!("{e}"))?,
        );
        if step <= 0.0 || stop < start {
            return Err(format!("bad range {s:?}"));
        }
        let mut out = Vec::new();
        let mut x = start;
        let mut i = 0;
        while x <= stop + 1e-9 {
            out.push(x);
            i += 1;
            x = start + step * i as f64;
        }
        Ok(out)
    } else {
        s.split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{e}")))
            .collect()
    }
}
