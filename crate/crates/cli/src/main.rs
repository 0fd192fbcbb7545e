//! `lil` — analysis pipelines for iterated-logarithm normalization of
//! heavy-tailed partial sums.
//!
//! Verbs: `analyze`, `check-conditions`, `klass-seq`, `alpha0`, `simulate`,
//! `construct-normalizer`.  Every run echoes a manifest next to its outputs;
//! re-running a manifest reproduces the outputs byte for byte.
//!
//! Exit codes: 0 success/conclusive, 2 configuration error, 3 inconclusive
//! verdict, 4 numeric non-convergence.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{parse_set, FamilyBlock, RunConfig};
use lil_core::alpha0::{alpha0_estimate, Alpha0Options, SigmaPolicy};
use lil_core::conditions::{
    closed_form_check, evaluate_conditions, ClosedFormFamily, ConditionReport, LimitValue,
};
use lil_core::klass::KlassEval;
use lil_core::logscale::ll;
use lil_core::mcsim::{cluster_histogram, run_sim, SimConfig, Summation};
use lil_core::seq::NormSeq;
use lil_core::series::SeriesVerdict;

#[derive(Parser)]
#[command(name = "lil", about = "Iterated-logarithm normalization toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Run configuration (JSON); a previously written manifest.json is
    /// accepted as well.
    #[arg(long)]
    config: PathBuf,

    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Output formats, comma separated (csv,json).
    #[arg(long)]
    format: Option<String>,

    /// Diagnostic grid depth: the grid reaches ln x = 10^N.
    #[arg(long)]
    grid_decades: Option<f64>,

    /// Numeric tolerance override.
    #[arg(long)]
    tol: Option<f64>,

    /// Arbitrary config override: --set key.path=value (JSON value),
    /// applied after the file is read; overrides win.
    #[arg(long = "set", value_parser = parse_set)]
    sets: Vec<(String, serde_json::Value)>,
}

#[derive(Subcommand)]
enum Command {
    /// Limsup/moment condition analysis for (distribution, normalizer).
    Analyze(CommonArgs),
    /// Closed-form family condition check (analyze with a named family).
    CheckConditions(CommonArgs),
    /// Tabulate γ_n, K(n/LLn) and a_n over a list of n.
    KlassSeq {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated n values (falls back to analysis.n-list).
        #[arg(long)]
        n: Option<String>,
    },
    /// Cluster-radius estimation for S_n/c_n.
    Alpha0(CommonArgs),
    /// Streaming Monte Carlo of S_n/a_n.
    Simulate(CommonArgs),
    /// Build Ψ from an envelope φ of H and emit the normalizer table.
    ConstructNormalizer(CommonArgs),
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("LIL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(c) => run_verb("analyze", c, None, verb_analyze),
        Command::CheckConditions(c) => run_verb("check-conditions", c, None, verb_check_conditions),
        Command::KlassSeq { common, n } => run_verb("klass-seq", common, n.clone(), verb_klass_seq),
        Command::Alpha0(c) => run_verb("alpha0", c, None, verb_alpha0),
        Command::Simulate(c) => run_verb("simulate", c, None, verb_simulate),
        Command::ConstructNormalizer(c) => run_verb("construct-normalizer", c, None, verb_construct),
    };
    match outcome {
        Ok(conclusive) => {
            if conclusive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<lil_core::Error>()
                .map(|e| match e {
                    lil_core::Error::NonConvergence { .. } | lil_core::Error::BracketFailure { .. } => 4u8,
                    _ => 2u8,
                })
                .unwrap_or(2);
            ExitCode::from(code)
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    base: PathBuf,
    out_dir: PathBuf,
    want_json: bool,
    want_csv: bool,
    extra: Option<String>,
}

impl Ctx {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let is_json = name.ends_with(".json");
        if is_json && !self.want_json {
            return Ok(());
        }
        if !is_json && !self.want_csv {
            return Ok(());
        }
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        self.write(name, &format!("{}\n", serde_json::to_string_pretty(value)?))
    }
}

/// Shared verb scaffolding: load config, apply overrides, write the
/// manifest, run, and report conclusiveness.
fn run_verb(
    verb: &str,
    common: &CommonArgs,
    extra: Option<String>,
    body: fn(&Ctx) -> Result<bool>,
) -> Result<bool> {
    let mut sets = common.sets.clone();
    if let Some(seed) = common.seed {
        sets.push(("seed".into(), serde_json::json!(seed)));
    }
    if let Some(tol) = common.tol {
        sets.push(("tol".into(), serde_json::json!(tol)));
    }
    if let Some(d) = common.grid_decades {
        sets.push(("grid.decades".into(), serde_json::json!(d)));
    }
    if let Some(out) = &common.out {
        sets.push(("output.dir".into(), serde_json::json!(out)));
    }
    if let Some(fmt) = &common.format {
        let formats: Vec<String> = fmt.split(',').map(|s| s.trim().to_string()).collect();
        sets.push(("output.formats".into(), serde_json::json!(formats)));
    }
    let cfg = RunConfig::load(&common.config, &sets)?;
    let base = common
        .config
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = if cfg.output.dir.is_absolute() {
        cfg.output.dir.clone()
    } else {
        base.join(&cfg.output.dir)
    };
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;
    let want_json = cfg.output.formats.iter().any(|f| f == "json");
    let want_csv = cfg.output.formats.iter().any(|f| f == "csv");
    let manifest = serde_json::json!({
        "manifest-version": 1,
        "verb": verb,
        "tool-version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.seed,
        "config": serde_json::to_value(&cfg)?,
    });
    let ctx = Ctx { cfg, base, out_dir, want_json, want_csv, extra };
    std::fs::write(
        ctx.out_dir.join("manifest.json"),
        format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;
    body(&ctx)
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    verdict: &'a str,
    lambda_hat: &'a LimitValue,
    lambda_interval: Option<(f64, f64)>,
    window_sup: f64,
    trend: lil_core::conditions::TrendClass,
    mean_zero: bool,
    moment_verdict: SeriesVerdict,
    q: f64,
    evidence_table: &'a [(f64, f64)],
    detail: &'a ConditionReport,
}

fn condition_verdict(rep: &ConditionReport) -> &'static str {
    if rep.moment.verdict == SeriesVerdict::Inconclusive {
        return "inconclusive";
    }
    if rep.moment.verdict == SeriesVerdict::Infinite || rep.lambda_hat == LimitValue::Divergent {
        return "unbounded";
    }
    match rep.lambda_hat {
        LimitValue::Finite(0.0) => "stability",
        LimitValue::Finite(_) => "two-sided-lil",
        LimitValue::Divergent => "unbounded",
    }
}

fn verb_analyze(ctx: &Ctx) -> Result<bool> {
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let (seq, _) = ctx.cfg.resolve_normalizer(&dist, &ctx.base)?;
    let nm = match &seq {
        NormSeq::Psi(nm) => nm.as_ref().clone(),
        _ => {
            return Err(anyhow!(
                "analyze needs a Ψ-type normalizer (γ and explicit sequences are handled by alpha0)"
            ))
        }
    };
    let grid = ctx.cfg.grid();
    let rep = evaluate_conditions(&dist, &nm, &grid)?;
    let verdict = condition_verdict(&rep);
    let report = AnalyzeReport {
        verdict,
        lambda_hat: &rep.lambda_hat,
        lambda_interval: rep.implied_bounds,
        window_sup: rep.limsup.window_sup,
        trend: rep.limsup.trend,
        mean_zero: rep.mean_zero,
        moment_verdict: rep.moment.verdict,
        q: rep.q,
        evidence_table: &rep.limsup.evidence,
        detail: &rep,
    };
    ctx.write_json("analyze.json", &report)?;
    let mut csv = String::from("ln_x,functional\n");
    for (u, v) in &rep.limsup.evidence {
        csv.push_str(&format!("{u},{v}\n"));
    }
    ctx.write("analyze_evidence.csv", &csv)?;
    println!(
        "analyze: verdict={verdict} lambda_hat={:?} trend={:?}",
        rep.lambda_hat, rep.limsup.trend
    );
    Ok(verdict != "inconclusive")
}

fn verb_check_conditions(ctx: &Ctx) -> Result<bool> {
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let family = match ctx
        .cfg
        .analysis
        .closed_form
        .as_ref()
        .ok_or_else(|| anyhow!("check-conditions needs analysis.closed-form"))?
    {
        FamilyBlock::LoglogPower { p } => ClosedFormFamily::LogLogPower { p: *p },
        FamilyBlock::LogPower { r } => ClosedFormFamily::LogPower { r: *r },
        FamilyBlock::Stretched { q } => ClosedFormFamily::Stretched { q: *q },
    };
    let grid = ctx.cfg.grid();
    let rep = closed_form_check(&dist, family, &grid)?;
    ctx.write_json("check_conditions.json", &rep)?;
    let mut csv = String::from("ln_x,functional\n");
    for (u, v) in &rep.limsup.evidence {
        csv.push_str(&format!("{u},{v}\n"));
    }
    ctx.write("check_conditions_evidence.csv", &csv)?;
    println!(
        "check-conditions: lambda_hat={:?} moment={:?}",
        rep.lambda_hat, rep.moment_verdict
    );
    Ok(rep.moment_verdict != SeriesVerdict::Inconclusive)
}

fn verb_klass_seq(ctx: &Ctx) -> Result<bool> {
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let klass = KlassEval::new(dist.clone())?;
    let ns: Vec<u64> = if let Some(spec) = &ctx.extra {
        spec.split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|e| anyhow!("bad n '{s}': {e}")))
            .collect::<Result<_>>()?
    } else {
        ctx.cfg
            .analysis
            .n_list
            .clone()
            .ok_or_else(|| anyhow!("klass-seq needs --n or analysis.n-list"))?
    };
    if ns.is_empty() || ns.contains(&0) {
        return Err(anyhow!("klass-seq needs a nonempty list of n >= 1"));
    }
    // a_n columns appear only when a normalizer is configured
    let seq = match ctx.cfg.normalizer.as_ref() {
        Some(_) => Some(ctx.cfg.resolve_normalizer(&dist, &ctx.base)?.0),
        None => None,
    };
    let mut csv = String::from(if seq.is_some() {
        "n,gamma_n,k_n_over_lln,a_n,a_n_over_gamma_n\n"
    } else {
        "n,gamma_n,k_n_over_lln\n"
    });
    for &n in &ns {
        let gamma = klass.gamma_n(n)?;
        let lln = ll(n as f64)?;
        let k = klass.k(n as f64 / lln)?;
        match &seq {
            Some(s) => {
                let a = s.c(n)?;
                csv.push_str(&format!("{n},{gamma},{k},{a},{}\n", a / gamma));
            }
            None => csv.push_str(&format!("{n},{gamma},{k}\n")),
        }
    }
    ctx.write("klass_seq.csv", &csv)?;
    println!("klass-seq: {} rows", ns.len());
    Ok(true)
}

fn verb_alpha0(ctx: &Ctx) -> Result<bool> {
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let (seq, _) = ctx.cfg.resolve_normalizer(&dist, &ctx.base)?;
    let policy = if let Some(path) = &ctx.cfg.analysis.sigma_truncation {
        let full = ctx.base.join(path);
        let text = std::fs::read_to_string(&full)
            .with_context(|| format!("cannot read truncation sequence {}", full.display()))?;
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
            let d: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| anyhow!("{}:{}: bad d", full.display(), i + 1))?;
            points.push((n, d));
        }
        SigmaPolicy::Truncation(NormSeq::table(points)?)
    } else {
        match (ctx.cfg.analysis.sigma_constant, ctx.cfg.analysis.delta) {
            (Some(s2), _) => SigmaPolicy::Constant(s2),
            (None, d) => SigmaPolicy::Delta(d.unwrap_or(1.0)),
        }
    };
    let mut opts = Alpha0Options::default();
    if let Some(nmax) = ctx.cfg.analysis.nmax {
        opts.nmax = nmax;
    }
    let rep = alpha0_estimate(&dist, &seq, &policy, &opts)?;
    ctx.write_json("alpha0.json", &rep)?;
    let mut csv = String::from("alpha,j,block_sum\n");
    for probe in &rep.probes {
        for (j, b) in probe.blocks.iter().enumerate() {
            csv.push_str(&format!("{},{j},{b}\n", probe.alpha));
        }
    }
    ctx.write("alpha0_blocks.csv", &csv)?;
    match (&rep.bracket, rep.infinite) {
        (Some((lo, hi)), _) => {
            println!("alpha0: bracket [{lo}, {hi}]");
            Ok(true)
        }
        (None, true) => {
            println!("alpha0: infinite (divergent at every probed alpha)");
            Ok(true)
        }
        (None, false) => {
            println!("alpha0: inconclusive");
            Ok(false)
        }
    }
}

#[derive(Serialize)]
struct SimulateSummary {
    seed: u64,
    dist: String,
    normalizer: String,
    n_max: u64,
    paths: u32,
    pooled_running_max: f64,
    per_path_running_max: Vec<f64>,
    histogram_symmetry: f64,
    histogram_occupancy: f64,
}

fn verb_simulate(ctx: &Ctx) -> Result<bool> {
    let a = &ctx.cfg.analysis;
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let (seq, _) = ctx.cfg.resolve_normalizer(&dist, &ctx.base)?;
    let paths = a.paths.unwrap_or(8);
    if paths == 0 {
        return Err(anyhow!("simulate needs paths >= 1"));
    }
    let mut cfg = SimConfig::new(dist.clone(), seq, a.n_max.unwrap_or(1_000_000), paths, ctx.cfg.seed);
    if let Some(first) = a.checkpoint_first {
        cfg.checkpoint_first = first;
    }
    if let Some(r) = a.checkpoint_ratio {
        cfg.checkpoint_ratio = r;
    }
    if let Some(s) = &a.summation {
        cfg.summation = match s.as_str() {
            "plain" => Summation::Plain,
            "compensated" => Summation::Compensated,
            other => return Err(anyhow!("unknown summation mode '{other}'")),
        };
    }
    let res = run_sim(&cfg)?;
    ctx.write("simulate.csv", &res.to_csv())?;
    let hist = cluster_histogram(&res, a.bins.unwrap_or(32), a.burn_in.unwrap_or(5))?;
    ctx.write("simulate_histogram.csv", &hist.to_csv())?;
    let summary = SimulateSummary {
        seed: res.seed,
        dist: res.dist.clone(),
        normalizer: res.normalizer.clone(),
        n_max: res.n_max,
        paths,
        pooled_running_max: res.pooled_max(),
        per_path_running_max: res.paths.iter().map(|p| p.running_max).collect(),
        histogram_symmetry: hist.symmetry,
        histogram_occupancy: hist.occupancy,
    };
    ctx.write_json("simulate.json", &summary)?;
    println!("simulate: pooled running max {}", res.pooled_max());
    Ok(true)
}

#[derive(Serialize)]
struct ConstructReportOut {
    normalizer: String,
    emitted_table: String,
    envelope_sup: f64,
    envelope_warning: bool,
    moment_verdict: SeriesVerdict,
    fixed_point_max_iterations: usize,
    closed_form: Option<String>,
}

fn verb_construct(ctx: &Ctx) -> Result<bool> {
    let dist = ctx.cfg.resolve_dist(&ctx.base)?;
    let (_, construction) = ctx.cfg.resolve_normalizer(&dist, &ctx.base)?;
    let construction = construction
        .ok_or_else(|| anyhow!("construct-normalizer needs normalizer.family = construct-from-phi"))?;
    // emit the usable h(x) table: the closed form when the envelope admits
    // one, otherwise the fixed-point h itself
    let emitted = construction
        .report
        .closed_form
        .as_ref()
        .unwrap_or(&construction.normalizer);
    let h = emitted.h();
    let mut table = String::from("# lil-slowfn v1\n");
    for k in 1..=300 {
        let x = 10f64.powi(k);
        let v = h.eval(x);
        if v.is_finite() {
            table.push_str(&format!("{x} {v}\n"));
        }
    }
    // the table is csv-independent output: write it regardless of formats
    std::fs::write(ctx.out_dir.join("normalizer_table.txt"), &table)?;
    let rep = ConstructReportOut {
        normalizer: construction.normalizer.label(),
        emitted_table: emitted.label(),
        envelope_sup: construction.report.envelope_sup,
        envelope_warning: construction.report.envelope_warning,
        moment_verdict: construction.report.moment_verdict,
        fixed_point_max_iterations: construction.report.fixed_point_max_iters,
        closed_form: construction.report.closed_form.as_ref().map(|p| p.label()),
    };
    ctx.write_json("construct_normalizer.json", &rep)?;
    println!(
        "construct-normalizer: moment verdict {:?}, envelope sup {:.4}",
        rep.moment_verdict, rep.envelope_sup
    );
    Ok(rep.moment_verdict != SeriesVerdict::Inconclusive)
}
