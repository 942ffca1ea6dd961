use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use topicsim::corpus::{filter_single_label, label_histogram, write_corpus};
use topicsim::harness::{self, GtMode, SimulationPlan};
use topicsim::metrics::METRIC_NAMES;
use topicsim::reuters::{convert_reuters, TextParts};

#[derive(Parser)]
#[command(name = "topicsim", version, about = "Simulate user actions on an LDA pipeline and score their impact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GtModeArg {
    Labels,
    BaselineAsGt,
}

impl From<GtModeArg> for GtMode {
    fn from(m: GtModeArg) -> Self {
        match m {
            GtModeArg::Labels => GtMode::Labels,
            GtModeArg::BaselineAsGt => GtMode::BaselineAsGt,
        }
    }
}

#[derive(clap::Args)]
struct PlanArgs {
    /// Plan file (TOML).
    plan: PathBuf,
    /// Master seed; overrides the plan.
    #[arg(long)]
    seed: Option<u64>,
    /// Reference labels; overrides the plan.
    #[arg(long, value_enum)]
    gt_mode: Option<GtModeArg>,
    /// Output directory; overrides the plan.
    #[arg(long, env = harness::OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
}

impl PlanArgs {
    fn load(&self) -> Result<SimulationPlan> {
        let mut plan = SimulationPlan::load(&self.plan).with_context(|| format!("loading {}", self.plan.display()))?;
        if let Some(seed) = self.seed {
            plan.master_seed = seed;
        }
        if let Some(mode) = self.gt_mode {
            plan.gt_mode = mode.into();
        }
        if let Some(dir) = &self.output_dir {
            plan.output_dir = dir.clone();
        }
        Ok(plan)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run and score the baseline pipeline only.
    Baseline {
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Run the baseline and every sampled action.
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Also write the report.
        #[arg(long)]
        report: bool,
    },
    /// List scored runs of a sweep by impact, largest first.
    Rank {
        sweep_dir: PathBuf,
        /// Show only the first N runs.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Write SVG/HTML views of a sweep into <sweep-dir>/report.
    Report { sweep_dir: PathBuf },
    /// Convert Reuters-21578 (NLTK or SGML layout) to a JSON-lines corpus.
    ConvertReuters {
        src: PathBuf,
        dst: PathBuf,
        /// Keep only documents with exactly one category.
        #[arg(long)]
        single_label: bool,
        /// Use the body text only, without the title.
        #[arg(long)]
        body_only: bool,
        /// Keep the N most frequent classes (implies --single-label).
        #[arg(long)]
        top_classes: Option<usize>,
        /// Keep at most this many documents, in corpus order.
        #[arg(long)]
        max_docs: Option<usize>,
    },
}

fn print_metrics(record: &harness::RunRecord) {
    match record.metrics {
        Some(m) => {
            for (name, v) in METRIC_NAMES.iter().zip(m.to_array()) {
                println!("  {name:<20} {v:.4}");
            }
        }
        None => println!("  (no metrics)"),
    }
}

fn baseline(args: &PlanArgs) -> Result<()> {
    let plan = args.load()?;
    let baseline = harness::run_baseline(&plan)?;
    harness::write_baseline(&plan.output_dir, &plan, &baseline.record)?;
    println!(
        "baseline: {} documents, {} terms, {} topics",
        baseline.record.n_docs, baseline.record.n_terms, baseline.record.n_topics
    );
    print_metrics(&baseline.record);
    println!("written to {}", plan.output_dir.display());
    Ok(())
}

fn sweep(args: &PlanArgs, jobs: Option<usize>, report: bool) -> Result<()> {
    let plan = args.load()?;
    if jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    let baseline = harness::run_baseline(&plan)?;
    let sweep = harness::run_sweep(&plan, &baseline, jobs)?;
    let ok = sweep.runs.iter().filter(|r| r.status.is_ok()).count();
    println!("{} runs ({} ok) written to {}", sweep.runs.len(), ok, plan.output_dir.display());
    if report {
        let index = topicsim::report::write_report(&plan.output_dir)?;
        println!("report: {}", index.display());
    }
    Ok(())
}

fn rank(dir: &Path, top: Option<usize>) -> Result<()> {
    let sweep = harness::load_sweep(dir)?;
    let ranked = harness::rank_actions(&sweep.runs);
    println!("{:<32} {:<24} {:>10}", "run_id", "kind", "s_r");
    for r in ranked.iter().take(top.unwrap_or(usize::MAX)) {
        println!("{:<32} {:<24} {:>10.6}", r.run_id, r.kind(), r.s_r.unwrap_or(0.0));
    }
    Ok(())
}

fn convert(src: &Path, dst: &Path, single: bool, body_only: bool, top: Option<usize>, max_docs: Option<usize>) -> Result<()> {
    let parts = if body_only { TextParts::BodyOnly } else { TextParts::TitleAndBody };
    let mut corpus = convert_reuters(src, parts)?;
    if let Some(n) = top {
        corpus = corpus.top_classes_subset(n, max_docs.unwrap_or(usize::MAX));
    } else {
        if single {
            corpus = filter_single_label(&corpus);
        }
        if let Some(m) = max_docs {
            let mut seen = 0;
            corpus = corpus.retain(|_| {
                seen += 1;
                seen <= m
            });
        }
    }
    write_corpus(&corpus, dst)?;
    println!(
        "{} documents, {} classes written to {}",
        corpus.len(),
        label_histogram(&corpus).len(),
        dst.display()
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Baseline { plan } => baseline(plan),
        Command::Sweep { plan, jobs, report } => sweep(plan, *jobs, *report),
        Command::Rank { sweep_dir, top } => rank(sweep_dir, *top),
        Command::Report { sweep_dir } => {
            let index = topicsim::report::write_report(sweep_dir)?;
            println!("report: {}", index.display());
            Ok(())
        }
        Command::ConvertReuters { src, dst, single_label, body_only, top_classes, max_docs } => {
            convert(src, dst, *single_label, *body_only, *top_classes, *max_docs)
        }
    }
}
