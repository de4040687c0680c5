//! Full pipeline: ingest, normalize, lag selection, OLS and BVAR fits,
//! stability, impulse responses, effect verdicts, and atomic output of the
//! report bundle.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use bvar_core::{
    build_design, classify_effect, fit_bvar, fit_ols, irf, normalize, select_lag, stability,
    Criterion, EffectVerdict, ImpulseResponse, MinnesotaHyper, SelectionTable, SeriesPanel,
    StabilityReport, VarEstimate, VarSpec,
};
use serde_json::json;
use thiserror::Error;

use crate::config::RunConfig;

/// Pipeline stage, used to pick the process exit code on failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingestion,
    Estimation,
    Diagnostics,
    Io,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Ingestion => 3,
            Stage::Estimation => 4,
            Stage::Diagnostics => 5,
            Stage::Io => 6,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Ingestion => "ingestion",
            Stage::Estimation => "estimation",
            Stage::Diagnostics => "diagnostics",
            Stage::Io => "io",
        }
    }
}

/// A module error wrapped with the pipeline stage it occurred in.
#[derive(Debug, Error)]
#[error("[{}] {message}", stage.label())]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    pub fn new(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, message: message.into() }
    }
}

fn wrap<E: std::fmt::Display>(stage: Stage) -> impl Fn(E) -> PipelineError + Copy {
    move |e| PipelineError::new(stage, e.to_string())
}

/// Everything a `report` run produces, before serialization.
#[derive(Debug)]
pub struct ReportBundle {
    pub panel: SeriesPanel,
    pub selection: SelectionTable,
    pub chosen_d: usize,
    pub ols: Result<VarEstimate, String>,
    pub bvar: VarEstimate,
    pub ols_stability: Option<StabilityReport>,
    pub bvar_stability: StabilityReport,
    pub irf: ImpulseResponse,
    pub verdicts: Vec<EffectVerdict>,
    /// Headline contrast flag: classical fit unstable while the BVAR is stable.
    pub headline_contrast: bool,
}

/// Load, validate and (optionally) normalize the input panel.
pub fn ingest(config: &RunConfig) -> Result<SeriesPanel, PipelineError> {
    let bytes = fs::read(&config.input).map_err(|e| {
        PipelineError::new(Stage::Io, format!("reading {}: {e}", config.input.display()))
    })?;
    let panel = bvar_core::load_panel(bytes.as_slice()).map_err(wrap(Stage::Ingestion))?;
    if panel.var_index(&config.target).is_none() {
        return Err(PipelineError::new(
            Stage::Config,
            format!("invalid `target`: variable `{}` not in input header", config.target),
        ));
    }
    if config.normalize {
        let (normalized, _) = normalize(&panel).map_err(wrap(Stage::Ingestion))?;
        Ok(normalized)
    } else {
        Ok(panel)
    }
}

/// Run the full ordered pipeline in memory.
pub fn run(config: &RunConfig) -> Result<ReportBundle, PipelineError> {
    config.validate()?;
    let panel = ingest(config)?;
    let target = panel.var_index(&config.target).expect("checked in ingest");

    let base = VarSpec::new(1, config.constant, panel.names().to_vec())
        .map_err(wrap(Stage::Estimation))?;
    let selection =
        select_lag(&panel, &base, config.d_max).map_err(wrap(Stage::Estimation))?;
    // a VAR needs at least one lag; an AIC winner of 0 is floored
    let chosen_d = config.d.unwrap_or_else(|| selection.winner(Criterion::Aic).max(1));

    let spec = VarSpec::new(chosen_d, config.constant, panel.names().to_vec())
        .map_err(wrap(Stage::Estimation))?;
    let design = build_design(&panel, chosen_d, config.constant, None)
        .map_err(wrap(Stage::Estimation))?;
    let ols = fit_ols(&design, &spec).map_err(|e| e.to_string());
    let hyper = MinnesotaHyper::from(&config.hyper);
    let (bvar, _posterior) =
        fit_bvar(&panel, &spec, &hyper).map_err(wrap(Stage::Estimation))?;

    let ols_stability = match &ols {
        Ok(est) => Some(stability(est).map_err(wrap(Stage::Diagnostics))?),
        Err(_) => None,
    };
    let bvar_stability = stability(&bvar).map_err(wrap(Stage::Diagnostics))?;
    let headline_contrast =
        ols_stability.as_ref().map_or(false, |s| !s.stable) && bvar_stability.stable;

    let ir = irf(&bvar, config.horizon, config.orthogonalized)
        .map_err(wrap(Stage::Diagnostics))?;
    let verdicts: Vec<EffectVerdict> = (0..panel.n_vars())
        .filter(|&source| source != target)
        .map(|source| classify_effect(&ir, target, source, config.settle_tolerance))
        .collect();

    Ok(ReportBundle {
        panel,
        selection,
        chosen_d,
        ols,
        bvar,
        ols_stability,
        bvar_stability,
        irf: ir,
        verdicts,
        headline_contrast,
    })
}

/// Shortest round-trip decimal rendering; Rust's Display for f64.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn selection_csv(table: &SelectionTable) -> String {
    let mut out = String::from("lag,logL,lr,fpe,aic,sic,hqic");
    for c in Criterion::ALL {
        let _ = write!(out, ",winner_{}", c.label());
    }
    out.push('\n');
    for row in &table.rows {
        let lr = row.lr.map(num).unwrap_or_default();
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            row.lag,
            num(row.log_l),
            lr,
            num(row.fpe),
            num(row.aic),
            num(row.sic),
            num(row.hqic)
        );
        for c in Criterion::ALL {
            let _ = write!(out, ",{}", table.winner(c) == row.lag);
        }
        out.push('\n');
    }
    out
}

/// Transposed presentation: rows are regressors, columns are equations,
/// with fit-statistic rows appended.
pub fn coefficients_csv(estimate: &VarEstimate) -> String {
    let names = &estimate.spec.variable_order;
    let n = names.len();
    let mut out = String::from("regressor");
    for name in names {
        let _ = write!(out, ",{name}");
    }
    out.push('\n');
    if estimate.spec.constant {
        out.push('c');
        for i in 0..n {
            let _ = write!(out, ",{}", num(estimate.c[i]));
        }
        out.push('\n');
    }
    for k in 1..=estimate.spec.d {
        for (j, reg_name) in names.iter().enumerate() {
            let _ = write!(out, "{reg_name}.l{k}");
            for i in 0..n {
                let _ = write!(out, ",{}", num(estimate.a[k - 1][(i, j)]));
            }
            out.push('\n');
        }
    }
    out.push_str("R-squared");
    for stats in &estimate.per_equation {
        let _ = write!(out, ",{}", num(stats.r_squared));
    }
    out.push('\n');
    out.push_str("S.E-equation");
    for stats in &estimate.per_equation {
        let _ = write!(out, ",{}", num(stats.se_equation));
    }
    out.push('\n');
    out
}

pub fn roots_csv(report: &StabilityReport) -> String {
    let mut out = String::from("index,real,imaginary,modulus\n");
    let mut indexed: Vec<_> = report.roots.iter().collect();
    // deterministic order: descending modulus, then real, then imaginary
    indexed.sort_by(|a, b| {
        b.norm()
            .partial_cmp(&a.norm())
            .unwrap()
            .then(a.re.partial_cmp(&b.re).unwrap())
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    for (i, z) in indexed.iter().enumerate() {
        let _ = writeln!(out, "{},{},{},{}", i, num(z.re), num(z.im), num(z.norm()));
    }
    out
}

pub fn irf_csv(ir: &ImpulseResponse, names: &[String]) -> String {
    let mut out = String::from("h,impulse,response,value,cumulative,orthogonalized\n");
    for h in 0..=ir.horizon {
        for (j, impulse) in names.iter().enumerate() {
            for (i, response) in names.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    h,
                    impulse,
                    response,
                    num(ir.psi[h][(i, j)]),
                    num(ir.cumulative[h][(i, j)]),
                    ir.orthogonalized
                );
            }
        }
    }
    out
}

pub fn verdicts_csv(verdicts: &[EffectVerdict], names: &[String]) -> String {
    let mut out = String::from("source,direction,share_positive,peak_period,settle_period\n");
    for v in verdicts {
        let settle = v.settle_period.map(|s| s.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            names[v.source],
            v.direction.label(),
            num(v.share_positive),
            v.peak_period,
            settle
        );
    }
    out
}

pub fn describe_csv(panel: &SeriesPanel) -> String {
    let mut out = String::from("variable,mean,median,min,max,sd\n");
    for s in bvar_core::describe(panel) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.name,
            num(s.mean),
            num(s.median),
            num(s.min),
            num(s.max),
            num(s.sd)
        );
    }
    out
}

fn estimate_json(estimate: &VarEstimate) -> serde_json::Value {
    json!({
        "source": match estimate.source {
            bvar_core::EstimateSource::Ols => "ols",
            bvar_core::EstimateSource::BvarPosteriorMean => "bvar_posterior_mean",
        },
        "d": estimate.spec.d,
        "constant": estimate.spec.constant,
        "t_eff": estimate.t_eff,
        "log_likelihood": estimate.log_l,
        "r_squared": estimate.per_equation.iter().map(|s| s.r_squared).collect::<Vec<_>>(),
        "se_equation": estimate.per_equation.iter().map(|s| s.se_equation).collect::<Vec<_>>(),
    })
}

/// Write the full bundle to `out_dir`, atomically: everything lands in a
/// temporary sibling directory first and is renamed into place on success.
pub fn write_report(
    config: &RunConfig,
    bundle: &ReportBundle,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, PipelineError> {
    let io = wrap::<std::io::Error>(Stage::Io);

    let names = bundle.panel.names();
    let mut files: Vec<(&str, String)> = vec![
        ("selection.csv", selection_csv(&bundle.selection)),
        ("coefficients_bvar.csv", coefficients_csv(&bundle.bvar)),
        ("roots_bvar.csv", roots_csv(&bundle.bvar_stability)),
        ("irf.csv", irf_csv(&bundle.irf, names)),
        ("verdicts.csv", verdicts_csv(&bundle.verdicts, names)),
    ];
    if let Ok(ols) = &bundle.ols {
        files.push(("coefficients_ols.csv", coefficients_csv(ols)));
    }
    if let Some(rep) = &bundle.ols_stability {
        files.push(("roots_ols.csv", roots_csv(rep)));
    }

    let mut manifest: Vec<String> = files.iter().map(|(n, _)| n.to_string()).collect();
    manifest.push("report.json".to_string());
    manifest.sort();

    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = json!({
        "provenance": {
            "tool": "bvar",
            "version": env!("CARGO_PKG_VERSION"),
            "unix_timestamp": timestamp,
            "config": config,
        },
        "manifest": manifest,
        "chosen_d": bundle.chosen_d,
        "selection_winners": bundle.selection.winners.iter()
            .map(|(c, lag)| (c.label().to_string(), lag))
            .collect::<std::collections::BTreeMap<_, _>>(),
        "ols": match &bundle.ols {
            Ok(est) => estimate_json(est),
            Err(msg) => json!({"error": msg}),
        },
        "bvar": estimate_json(&bundle.bvar),
        "stability": {
            "ols": bundle.ols_stability.as_ref().map(|s| json!({
                "stable": s.stable,
                "max_modulus": s.max_modulus(),
            })),
            "bvar": {
                "stable": bundle.bvar_stability.stable,
                "max_modulus": bundle.bvar_stability.max_modulus(),
            },
            "headline_contrast_ols_unstable_bvar_stable": bundle.headline_contrast,
        },
        "verdicts": bundle.verdicts.iter().map(|v| json!({
            "source": names[v.source],
            "target": names[v.target],
            "direction": v.direction.label(),
            "share_positive": v.share_positive,
            "peak_period": v.peak_period,
            "settle_period": v.settle_period,
        })).collect::<Vec<_>>(),
    });
    let report_text = serde_json::to_string_pretty(&report)
        .map_err(|e| PipelineError::new(Stage::Io, e.to_string()))?;
    files.push(("report.json", report_text));

    // stage in a sibling temp directory, then rename into place
    let parent = out_dir.parent().unwrap_or_else(|| Path::new("."));
    if !parent.as_os_str().is_empty() {
        fs::create_dir_all(parent).map_err(io)?;
    }
    let staging = parent.join(format!(
        ".{}.tmp-{}",
        out_dir.file_name().and_then(|n| n.to_str()).unwrap_or("bvar-out"),
        std::process::id()
    ));
    let _ = fs::remove_dir_all(&staging);
    fs::create_dir_all(&staging).map_err(io)?;
    let result = (|| -> std::io::Result<()> {
        for (name, text) in &files {
            fs::write(staging.join(name), text)?;
        }
        if out_dir.exists() && fs::read_dir(out_dir)?.next().is_none() {
            fs::remove_dir(out_dir)?;
        }
        fs::rename(&staging, out_dir)
    })();
    if let Err(e) = result {
        let _ = fs::remove_dir_all(&staging);
        return Err(PipelineError::new(
            Stage::Io,
            format!("writing {}: {e}", out_dir.display()),
        ));
    }
    Ok(files.iter().map(|(n, _)| out_dir.join(n)).collect())
}

/// Run the pipeline and write all artifacts. Returns the written paths.
pub fn run_pipeline(config: &RunConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let bundle = run(config)?;
    write_report(config, &bundle, &config.output)
}
