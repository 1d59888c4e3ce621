//! Subcommand implementations.

use std::path::{Path, PathBuf};

use uqcal::analysis::{detection_study, normalize_across_datasets, rank_agreement, TargetSource};
use uqcal::metrics::{evaluate_all, evaluate_intervals, MetricConfig};
use uqcal::rng::derive_seed;
use uqcal::synth::{apply_scenario, Scenario, SynthTarget};

use crate::error::{CliError, CliResult};
use crate::files::{self, FileFormat};
use crate::report::{ConfigEcho, NormalizedSection, ReportFile, VerdictCounts};
use crate::{BenchmarkArgs, EvaluateArgs, MetricFlags, PerturbArgs, RankArgs};

impl MetricFlags {
    pub fn to_config(&self) -> CliResult<MetricConfig> {
        let cfg = MetricConfig {
            n_bins: self.bins,
            nominal_level: self.confidence,
            eta: self.eta,
            alpha: self.alpha,
            ..MetricConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn write_output(path: Option<&PathBuf>, body: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| CliError::Data(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn evaluate(args: &EvaluateArgs, seed: Option<u64>) -> CliResult<()> {
    let text = files::read_to_string(&args.input)?;
    let detected = files::detect_format(&text)?;
    if let Some(flag) = args.format.as_deref() {
        let requested = match flag {
            "gaussian" => FileFormat::Gaussian,
            "interval" => FileFormat::Interval,
            other => return Err(CliError::Usage(format!("unknown format '{other}'"))),
        };
        if requested != detected {
            return Err(CliError::Data(format!(
                "--format {requested} was requested but the file header is {detected}-format"
            )));
        }
    }
    let cfg = args.metric_flags.to_config()?;

    let mut report = ReportFile::skeleton("evaluate", ConfigEcho::new(&cfg, seed, None));
    report.input_format = Some(detected.to_string());
    match detected {
        FileFormat::Gaussian => {
            let set = files::parse_gaussian(&text)?;
            let metrics = evaluate_all(&set, &cfg)?;
            report.n_samples = Some(metrics.n_samples);
            report.metrics = Some(metrics.values);
        }
        FileFormat::Interval => {
            let set = files::parse_interval(&text, cfg.nominal_level)?;
            let metrics = evaluate_intervals(&set, &cfg)?;
            report.n_samples = Some(metrics.n_samples);
            report.metrics = Some(metrics.values);
        }
    }
    write_output(args.output.as_ref(), &report.to_json())
}

pub fn perturb(args: &PerturbArgs) -> CliResult<()> {
    let scenario: Scenario = args
        .scenario
        .parse()
        .map_err(|e: uqcal::Error| CliError::Usage(e.to_string()))?;
    let text = files::read_to_string(&args.input)?;
    if files::detect_format(&text)? == FileFormat::Interval {
        return Err(CliError::Usage(
            "perturb supports only gaussian-format input (header 'y,y_hat,sigma'); \
             interval files carry no standard deviations to perturb"
                .into(),
        ));
    }
    let set = files::parse_gaussian(&text)?;
    let perturbed = apply_scenario(&set, scenario);
    write_output(args.output.as_ref(), &files::write_gaussian(&perturbed))
}

/// Resolve one --targets value: either `synthetic:<name>:<n>` or a path to
/// a single-column CSV of targets. Synthetic targets are sampled once from
/// a stream derived from the base seed and the spec string.
fn target_source(spec: &str, base_seed: u64) -> CliResult<TargetSource> {
    if let Some(rest) = spec.strip_prefix("synthetic:") {
        let (name, count) = rest.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("expected synthetic:<name>:<n>, got '{spec}'"))
        })?;
        let target: SynthTarget = name
            .parse()
            .map_err(|e: uqcal::Error| CliError::Usage(e.to_string()))?;
        let n: usize = count
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid sample count '{count}' in '{spec}'")))?;
        if n < 2 {
            return Err(CliError::Usage(format!(
                "synthetic targets need at least 2 samples, got {n}"
            )));
        }
        let y = target.sample_targets(n, derive_seed(base_seed, 0, &format!("targets:{spec}")));
        Ok(TargetSource {
            id: spec.to_string(),
            y,
        })
    } else {
        let path = Path::new(spec);
        let text = files::read_to_string(path)?;
        let y = files::parse_targets(&text)?;
        if y.len() < 2 {
            return Err(CliError::Data(format!(
                "{spec}: need at least 2 targets, got {}",
                y.len()
            )));
        }
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(spec)
            .to_string();
        Ok(TargetSource { id, y })
    }
}

/// Run under a rayon pool capped by UQCAL_THREADS when set. Results are
/// thread-count invariant; the cap only limits parallelism.
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match std::env::var("UQCAL_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(f()),
        Err(e) => Err(CliError::Usage(format!("UQCAL_THREADS: {e}"))),
        Ok(raw) => {
            let threads: usize = raw.trim().parse().map_err(|_| {
                CliError::Usage(format!(
                    "UQCAL_THREADS must be a positive integer, got '{raw}'"
                ))
            })?;
            if threads == 0 {
                return Err(CliError::Usage(
                    "UQCAL_THREADS must be a positive integer".into(),
                ));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn benchmark(args: &BenchmarkArgs, base_seed: u64) -> CliResult<()> {
    let cfg = args.metric_flags.to_config()?;
    if !(args.threshold > 0.0 && args.threshold.is_finite()) {
        return Err(CliError::Usage(format!(
            "--threshold must be positive, got {}",
            args.threshold
        )));
    }
    if args.repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let scenario: Scenario = args
        .scenario
        .parse()
        .map_err(|e: uqcal::Error| CliError::Usage(e.to_string()))?;
    if args.targets.is_empty() {
        return Err(CliError::Usage(
            "at least one --targets is required (a CSV of y values or synthetic:<name>:<n>)".into(),
        ));
    }
    let sources: Vec<TargetSource> = args
        .targets
        .iter()
        .map(|spec| target_source(spec, base_seed))
        .collect::<CliResult<_>>()?;

    let summary = with_thread_cap(|| {
        detection_study(
            &sources,
            scenario,
            args.repeats,
            base_seed,
            &cfg,
            args.threshold,
        )
    })?
    .map_err(|e| CliError::Data(e.to_string()))?;

    let mut report = ReportFile::skeleton(
        "benchmark",
        ConfigEcho::new(&cfg, Some(base_seed), Some(args.threshold)),
    );
    report.scenario = Some(scenario.id().to_string());
    report.repeats = Some(summary.repeats);
    report.datasets = Some(summary.datasets);
    report.metric_names = Some(summary.metrics);
    report.detection_frequency = Some(summary.frequencies);
    report.verdict_counts = Some(VerdictCounts {
        degraded: summary.degraded,
        improved: summary.improved,
        negligible: summary.negligible,
    });
    write_output(args.output.as_ref(), &report.to_json())
}

pub fn rank(args: &RankArgs) -> CliResult<()> {
    let dir = &args.input;
    let entries = std::fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("cannot read directory {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!(
            "no .json reports found in {}",
            dir.display()
        )));
    }

    let mut stems = Vec::with_capacity(paths.len());
    let mut parsed = Vec::with_capacity(paths.len());
    for path in &paths {
        let text = files::read_to_string(path)?;
        let file = ReportFile::from_json(&text)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        if file.metrics.is_none() {
            return Err(CliError::Data(format!(
                "{}: not an evaluate report (missing metrics section)",
                path.display()
            )));
        }
        stems.push(
            path.file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("report")
                .to_string(),
        );
        parsed.push(file);
    }

    let reference = parsed[0].config.clone();
    let offenders: Vec<&str> = stems
        .iter()
        .zip(&parsed)
        .filter(|(_, file)| !(file.config.comparable_key() == reference.comparable_key()))
        .map(|(stem, _)| stem.as_str())
        .collect();
    if !offenders.is_empty() {
        return Err(CliError::Data(format!(
            "reports disagree on configuration: {}",
            offenders.join(", ")
        )));
    }

    let cfg = reference.to_metric_config()?;
    let reports = parsed
        .iter()
        .map(ReportFile::to_metric_report)
        .collect::<CliResult<Vec<_>>>()?;
    let table = normalize_across_datasets(&reports, cfg.nominal_level)
        .map_err(|e| CliError::Data(e.to_string()))?;
    let agreement = if reports.len() >= 3 {
        Some(
            rank_agreement(&table)
                .map_err(|e| CliError::Data(e.to_string()))?
                .into(),
        )
    } else {
        None
    };

    let mut report = ReportFile::skeleton("rank", ConfigEcho::new(&cfg, None, None));
    report.datasets = Some(stems.clone());
    report.normalized = Some(NormalizedSection::new(stems, table));
    report.rank_agreement = agreement;
    write_output(args.output.as_ref(), &report.to_json())
}
