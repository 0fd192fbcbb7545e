//! Run configuration: JSON schema, overrides, and resolution into the
//! library's runtime objects.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use lil_core::distmodel::{DistributionSpec, TailTable};
use lil_core::klass::KlassEval;
use lil_core::normalizer::{construct_psi_from_phi, Normalizer, PsiConstruction, SlowFunction, SlowTable};
use lil_core::seq::NormSeq;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DistBlock {
    Rademacher,
    Gaussian { sigma: f64 },
    SymPareto { beta: f64, xmin: f64 },
    FellerPruitt,
    TailTable { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum PhiBlock {
    LoglogPower { p: f64 },
    LogPower { r: f64 },
    Stretched { q: f64 },
    FellerPruittPhi2,
    Constant { c: f64 },
    Custom { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum NormalizerBlock {
    LoglogPower { p: f64 },
    LogPower { r: f64 },
    Stretched { q: f64 },
    FellerPruittPhi2,
    Constant { c: f64 },
    Custom { path: PathBuf },
    Gamma,
    ConstructFromPhi { phi: Box<PhiBlock> },
    Scaled { base: Box<NormalizerBlock>, factor: f64 },
    Explicit { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct AnalysisBlock {
    /// klass-seq: explicit n values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<u64>>,
    /// check-conditions: closed-form condition family.
    #[serde(rename = "closed-form", skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<FamilyBlock>,
    /// alpha0: truncation constant δ (σ_n² = H(δ c_n)).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// alpha0: constant-σ² test policy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_constant: Option<f64>,
    /// alpha0: explicit truncation sequence d_n (two-column `n c` file);
    /// must satisfy d_n <= c_n and log(c_n/d_n)/LLn -> 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_truncation: Option<PathBuf>,
    /// alpha0: dyadic evidence range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmax: Option<u64>,
    /// simulate: horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    /// simulate: number of paths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_first: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint_ratio: Option<f64>,
    /// simulate: "plain" or "compensated".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summation: Option<String>,
    /// simulate: histogram bins.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    /// simulate: checkpoints dropped before histogramming.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum FamilyBlock {
    LoglogPower { p: f64 },
    LogPower { r: f64 },
    Stretched { q: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OutputBlock {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { dir: PathBuf::from("out"), formats: default_formats() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub struct GridBlock {
    /// depth exponent: the diagnostic grid reaches ln x = 10^decades.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decades: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points_per_decade: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub distribution: Option<DistBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<NormalizerBlock>,
    #[serde(default)]
    pub analysis: AnalysisBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub grid: GridBlock,
}

fn default_seed() -> u64 {
    42
}

fn default_tol() -> f64 {
    1e-10
}

impl RunConfig {
    /// Load from a config file (or a manifest: the `config` field of a
    /// manifest is accepted transparently), then apply overrides.
    pub fn load(path: &Path, sets: &[(String, serde_json::Value)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .with_context(|| format!("config {} is not valid JSON", path.display()))?;
        // manifests embed the resolved config under "config"
        if let Some(inner) = value.get("config") {
            if inner.is_object() && value.get("manifest-version").is_some() {
                value = inner.clone();
            }
        }
        for (key, v) in sets {
            set_path(&mut value, key, v.clone())?;
        }
        let cfg: RunConfig = serde_json::from_value(value)
            .with_context(|| format!("config {}: schema error", path.display()))?;
        Ok(cfg)
    }

    pub fn grid(&self) -> lil_core::grid::AsymptoticGrid {
        lil_core::grid::AsymptoticGrid::deep(
            self.grid.decades.unwrap_or(300.0),
            self.grid.points_per_decade.unwrap_or(4),
        )
    }

    pub fn resolve_dist(&self, base: &Path) -> Result<DistributionSpec> {
        let block = self
            .distribution
            .as_ref()
            .ok_or_else(|| anyhow!("config is missing the distribution block"))?;
        Ok(match block {
            DistBlock::Rademacher => DistributionSpec::Rademacher,
            DistBlock::Gaussian { sigma } => DistributionSpec::gaussian(*sigma)?,
            DistBlock::SymPareto { beta, xmin } => DistributionSpec::sym_pareto(*beta, *xmin)?,
            DistBlock::FellerPruitt => DistributionSpec::feller_pruitt(),
            DistBlock::TailTable { path } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("cannot read tail table {}", full.display()))?;
                DistributionSpec::TailTable(TailTable::parse(&text)?)
            }
        })
    }

    fn resolve_phi(block: &PhiBlock, base: &Path) -> Result<SlowFunction> {
        Ok(match block {
            PhiBlock::LoglogPower { p } => SlowFunction::loglog_power(*p)?,
            PhiBlock::LogPower { r } => SlowFunction::log_power(*r)?,
            PhiBlock::Stretched { q } => SlowFunction::stretched(*q)?,
            PhiBlock::FellerPruittPhi2 => SlowFunction::FellerPruittPhi2,
            PhiBlock::Constant { c } => SlowFunction::constant(*c)?,
            PhiBlock::Custom { path } => {
                let full = base.join(path);
                let text = std::fs::read_to_string(&full)
                    .with_context(|| format!("cannot read slow-function table {}", full.display()))?;
                SlowFunction::Table(SlowTable::parse(&text)?)
            }
        })
    }

    /// Resolve the normalizer block into a sequence (and the construction
    /// report when the envelope recipe ran).
    pub fn resolve_normalizer(
        &self,
        dist: &DistributionSpec,
        base: &Path,
    ) -> Result<(NormSeq, Option<PsiConstruction>)> {
        let block = self
            .normalizer
            .as_ref()
            .ok_or_else(|| anyhow!("config is missing the normalizer block"))?;
        resolve_normalizer_block(block, dist, base)
    }
}

fn resolve_normalizer_block(
    block: &NormalizerBlock,
    dist: &DistributionSpec,
    base: &Path,
) -> Result<(NormSeq, Option<PsiConstruction>)> {
    Ok(match block {
        NormalizerBlock::LoglogPower { p } => {
            (NormSeq::psi(Normalizer::new(SlowFunction::loglog_power(*p)?)?), None)
        }
        NormalizerBlock::LogPower { r } => {
            (NormSeq::psi(Normalizer::new(SlowFunction::log_power(*r)?)?), None)
        }
        NormalizerBlock::Stretched { q } => {
            (NormSeq::psi(Normalizer::new(SlowFunction::stretched(*q)?)?), None)
        }
        NormalizerBlock::FellerPruittPhi2 => {
            (NormSeq::psi(Normalizer::new(SlowFunction::FellerPruittPhi2)?), None)
        }
        NormalizerBlock::Constant { c } => {
            (NormSeq::psi(Normalizer::new(SlowFunction::constant(*c)?)?), None)
        }
        NormalizerBlock::Custom { path } => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .with_context(|| format!("cannot read slow-function table {}", full.display()))?;
            (NormSeq::psi(Normalizer::new(SlowFunction::Table(SlowTable::parse(&text)?))?), None)
        }
        NormalizerBlock::Gamma => {
            (NormSeq::gamma(Arc::new(KlassEval::new(dist.clone())?)), None)
        }
        NormalizerBlock::ConstructFromPhi { phi } => {
            let phi = RunConfig::resolve_phi(phi, base)?;
            let construction = construct_psi_from_phi(dist, &phi)?;
            let seq = NormSeq::psi(construction.normalizer.clone());
            (seq, Some(construction))
        }
        NormalizerBlock::Scaled { base: inner, factor } => {
            let (seq, c) = resolve_normalizer_block(inner, dist, base)?;
            (NormSeq::scaled(seq, *factor)?, c)
        }
        NormalizerBlock::Explicit { path } => {
            let full = base.join(path);
            let text = std::fs::read_to_string(&full)
                .with_context(|| format!("cannot read explicit sequence {}", full.display()))?;
            let mut points = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let mut it = line.split_whitespace();
                let n: u64 = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| anyhow!("{}:{}: bad n", full.display(), i + 1))?;
                let c: f64 = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| anyhow!("{}:{}: bad c", full.display(), i + 1))?;
                points.push((n, c));
            }
            (NormSeq::table(points)?, None)
        }
    })
}

/// Apply a dotted-path override onto the raw config JSON (overrides win).
fn set_path(value: &mut serde_json::Value, path: &str, v: serde_json::Value) -> Result<()> {
    let mut cur = value;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if i + 1 == parts.len() {
            match cur {
                serde_json::Value::Object(map) => {
                    map.insert((*part).to_string(), v);
                    return Ok(());
                }
                _ => bail!("override path {path}: parent is not an object"),
            }
        }
        if !cur.is_object() {
            bail!("override path {path}: {part} is not an object");
        }
        cur = cur
            .as_object_mut()
            .unwrap()
            .entry((*part).to_string())
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
    }
    Ok(())
}

/// Parse `--set key=value` (value parsed as JSON, falling back to string).
pub fn parse_set(s: &str) -> Result<(String, serde_json::Value)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("--set expects key.path=value, got {s}"))?;
    let value = serde_json::from_str(v).unwrap_or(serde_json::Value::String(v.to_string()));
    Ok((k.to_string(), value))
}
