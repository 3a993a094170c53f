//! Subcommands of the `isct` binary: `cluster`, `explain`, `eval`, `synth`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use isct_core::{fit_predict, nmi, pairwise_f1, purity, TreeConfig};
use serde::Serialize;

use crate::export::{TreeDoc, TreeFormat};
use crate::io::{self, InputFormat};
use crate::synth::{self, SignatureLayout, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "isct",
    version,
    about = "Interpretable sequence clustering trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a sequence file and fit the explaining tree.
    Cluster(RunConfig),
    /// Render a fitted tree JSON as text or DOT.
    Explain(ExplainArgs),
    /// Score an assignments file against ground-truth labels.
    Eval(EvalArgs),
    /// Generate a planted-signature dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "tokens")]
    pub format: InputFormat,
    /// Ground-truth labels, one per sequence; enables metrics.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, overrides_with = "no_boost")]
    pub boost: bool,
    /// Build without re-clustering at each node.
    #[arg(long = "no-boost", overrides_with = "boost")]
    pub no_boost: bool,
    #[arg(long, default_value_t = 2048)]
    pub num_patterns: usize,
    /// Longest random and mined pattern; default is 5 when every sequence
    /// has at least 10 items, else the shortest sequence length.
    #[arg(long)]
    pub max_pattern_len: Option<usize>,
    /// Frequent patterns mined per cluster.
    #[arg(long, default_value_t = 512)]
    pub top_frequent: usize,
    #[arg(long, default_value_t = 5)]
    pub min_split: usize,
    /// Defaults to standard output.
    #[arg(long)]
    pub out_assignments: Option<PathBuf>,
    #[arg(long)]
    pub out_tree: Option<PathBuf>,
    #[arg(long)]
    pub out_dot: Option<PathBuf>,
    #[arg(long)]
    pub out_metrics: Option<PathBuf>,
}

impl RunConfig {
    pub fn boost_enabled(&self) -> bool {
        !self.no_boost
    }

    pub fn tree_config(&self) -> TreeConfig {
        let mut cfg = TreeConfig::new(self.k);
        cfg.boost = self.boost_enabled();
        cfg.min_split = self.min_split;
        cfg.seed = self.seed;
        cfg.projection.num_patterns = self.num_patterns;
        cfg.projection.max_random_len = self.max_pattern_len;
        cfg.projection.seed = self.seed;
        cfg.mining.max_patterns_per_cluster = self.top_frequent;
        cfg.mining.max_pattern_len = self.max_pattern_len;
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TreeFormat,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub assignments: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out_metrics: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub per_cluster: usize,
    #[arg(long)]
    pub alphabet_size: usize,
    #[arg(long)]
    pub noise_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tokens file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Labels file; defaults to `<out>.labels`.
    #[arg(long)]
    pub out_labels: Option<PathBuf>,
    /// Draw signatures as ordered triples from a shared pool of this many
    /// symbols instead of private triples.
    #[arg(long)]
    pub overlap_pool: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub purity: f64,
    pub nmi: f64,
    pub f1: f64,
    pub leaf_count: usize,
    pub k_requested: usize,
    pub seed: u64,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub purity: f64,
    pub nmi: f64,
    pub f1: f64,
    pub n: usize,
}

/// Everything `cluster` produced, also written to the requested paths.
#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub assignments: String,
    pub tree_json: String,
    pub dot: String,
    pub metrics: Option<Metrics>,
    pub warnings: Vec<String>,
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn write_out(path: &Path, contents: &str) -> anyhow::Result<()> {
    io::write_atomic(path, contents)
        .with_context(|| format!("cannot write output {}", path.display()))
}

pub fn cmd_cluster(cfg: &RunConfig) -> anyhow::Result<ClusterOutput> {
    if cfg.k == 0 {
        bail!("invalid k = 0: k must be at least 1");
    }
    if cfg.num_patterns == 0 {
        bail!("--num-patterns must be at least 1");
    }
    let start = Instant::now();
    let loaded = io::load(&cfg.input, cfg.format).context("cannot read input")?;
    for w in &loaded.warnings {
        log::warn!("{w}");
    }
    let db = &loaded.database;
    log::info!(
        "loaded {} sequences over {} symbols",
        db.len(),
        db.alphabet().len()
    );
    let truth = match &cfg.labels {
        Some(path) => {
            let labels = io::load_labels(path).context("cannot read labels")?;
            if labels.ids.len() != db.len() {
                bail!(
                    "labels file has {} entries but input has {} sequences",
                    labels.ids.len(),
                    db.len()
                );
            }
            Some(labels)
        }
        None => None,
    };

    let tree_cfg = cfg.tree_config();
    let (tree, clustering) = fit_predict(db, &tree_cfg, &mut tree_cfg.rng())?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    log::info!(
        "fitted {} leaves with {} patterns in {runtime_ms} ms",
        tree.leaf_count,
        tree.patterns_used.len()
    );

    let doc = TreeDoc::from_tree(&tree);
    let out = ClusterOutput {
        assignments: io::format_assignments(clustering.labels()),
        tree_json: doc.to_json(),
        dot: doc.to_dot(),
        metrics: match &truth {
            Some(t) => Some(Metrics {
                purity: purity(clustering.labels(), &t.ids)?,
                nmi: nmi(clustering.labels(), &t.ids)?,
                f1: pairwise_f1(clustering.labels(), &t.ids)?,
                leaf_count: tree.leaf_count,
                k_requested: tree.k_requested,
                seed: cfg.seed,
                runtime_ms,
            }),
            None => None,
        },
        warnings: loaded.warnings.clone(),
    };

    match &cfg.out_assignments {
        Some(p) => write_out(p, &out.assignments)?,
        None => print!("{}", out.assignments),
    }
    if let Some(p) = &cfg.out_tree {
        write_out(p, &out.tree_json)?;
    }
    if let Some(p) = &cfg.out_dot {
        write_out(p, &out.dot)?;
    }
    if let Some(p) = &cfg.out_metrics {
        match &out.metrics {
            Some(m) => write_out(p, &to_json(m))?,
            None => bail!("--out-metrics needs --labels"),
        }
    }
    Ok(out)
}

pub fn cmd_explain(args: &ExplainArgs) -> anyhow::Result<String> {
    let text = std::fs::read_to_string(&args.tree)
        .with_context(|| format!("cannot read {}", args.tree.display()))?;
    let doc = TreeDoc::from_json(&text)?;
    Ok(doc.render(args.format))
}

pub fn cmd_eval(args: &EvalArgs) -> anyhow::Result<EvalReport> {
    let pred = io::load_assignments(&args.assignments)?;
    let truth = io::load_labels(&args.labels)?;
    if pred.len() != truth.ids.len() {
        bail!(
            "assignments cover {} sequences but labels cover {}",
            pred.len(),
            truth.ids.len()
        );
    }
    let report = EvalReport {
        purity: purity(&pred, &truth.ids)?,
        nmi: nmi(&pred, &truth.ids)?,
        f1: pairwise_f1(&pred, &truth.ids)?,
        n: pred.len(),
    };
    if let Some(p) = &args.out_metrics {
        write_out(p, &to_json(&report))?;
    }
    Ok(report)
}

pub fn cmd_synth(args: &SynthArgs) -> anyhow::Result<synth::SynthData> {
    let cfg = SynthConfig {
        k: args.k,
        per_cluster: args.per_cluster,
        alphabet_size: args.alphabet_size,
        noise_len: args.noise_len,
        seed: args.seed,
        layout: match args.overlap_pool {
            Some(pool) => SignatureLayout::Overlapping { pool },
            None => SignatureLayout::Disjoint,
        },
    };
    let data = synth::generate(&cfg)?;
    let labels_path = args.out_labels.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".labels");
        PathBuf::from(p)
    });
    write_out(&args.out, &io::format_tokens(&data.database))?;
    write_out(&labels_path, &synth::format_labels(&data.labels))?;
    Ok(data)
}

/// Runs one parsed command, printing its primary output to standard output.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Cluster(cfg) => {
            let out = cmd_cluster(&cfg)?;
            if let (Some(m), None) = (&out.metrics, &cfg.out_metrics) {
                eprint!("{}", to_json(m));
            }
        }
        Command::Explain(args) => print!("{}", cmd_explain(&args)?),
        Command::Eval(args) => {
            let report = cmd_eval(&args)?;
            if args.out_metrics.is_none() {
                print!("{}", to_json(&report));
            }
        }
        Command::Synth(args) => {
            let data = cmd_synth(&args)?;
            eprintln!(
                "wrote {} sequences in {} clusters to {}",
                data.database.len(),
                data.signatures.len(),
                args.out.display()
            );
        }
    }
    Ok(())
}
