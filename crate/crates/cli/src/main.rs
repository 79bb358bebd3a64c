//! `simsmooth` — similarity-based smoothing toolkit for sparse bigram
//! cooccurrence data.

mod commands;
mod config;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};
use simsmooth::{Measure, Method, Preset};

use commands::EvalModel;
use config::{GridArg, KArg, ModelFlags};

#[derive(Parser)]
#[command(
    name = "simsmooth",
    version,
    about = "Similarity-based smoothing for sparse bigram cooccurrence models",
    long_about = "Estimates probabilities of unseen word pairs from distributionally similar \
                  words and evaluates the estimates by test-set perplexity and pseudo-word \
                  disambiguation.\n\nPair files are UTF-8 lines `w1<TAB>w2[<TAB>count]`; lines \
                  starting with `#` are ignored."
)]
struct Cli {
    /// Thread-pool size for similarity-matrix construction (outputs do not
    /// depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate a pair file into a count table and print corpus totals
    Ingest {
        /// Input pair file
        input: PathBuf,
        /// Output path for the aggregated table (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Delete pairs that occur exactly once before writing
        #[arg(long)]
        drop_singletons: bool,
    },
    /// Print the closest words to a conditioning word
    #[command(
        long_about = "Prints the rank-ordered neighbor table of one conditioning word, \
                      including the word's own row for reference.\n\nDefault parameters follow \
                      the wsd preset (measure js over an mle base, k inf so S(w1) = V1, t inf); \
                      `--preset lm` switches to the language-model configuration (kl over katz, \
                      beta 4, k 60, t 2.5)."
    )]
    Neighbors {
        /// Aggregated pair/count file
        table: PathBuf,
        /// The conditioning word to look up
        #[arg(long)]
        word: String,
        #[command(flatten)]
        model: ModelFlags,
    },
    /// Score a held-out pair file: overall and unseen-only perplexity
    #[command(
        long_about = "Builds a model over the training pairs and reports overall perplexity, \
                      perplexity restricted to pairs unseen in training, and the unseen \
                      fraction.\n\nDefault parameters follow the lm preset: measure kl over a \
                      katz base, beta 4, gamma 0.15, k 60, t 2.5. With `--gamma 1` the \
                      similarity model reduces exactly to Katz back-off."
    )]
    Perplexity {
        /// Training pair file
        #[arg(long)]
        train: PathBuf,
        /// Test pair file
        #[arg(long)]
        test: PathBuf,
        /// Model to evaluate: mle, katz, or sim (the smoothed model)
        #[arg(long, default_value = "sim")]
        model: EvalModel,
        /// Delete training singletons before building the model
        #[arg(long)]
        drop_singletons: bool,
        #[command(flatten)]
        flags: ModelFlags,
    },
    /// Pseudo-word disambiguation experiment with cross-validation
    #[command(
        long_about = "Splits the pairs 80/20, keeps the unseen test pairs, folds them for \
                      cross-validation, builds frequency-matched pseudo-words, and compares the \
                      configured methods. Writes report.json plus `param,fold,error` CSV sweeps \
                      into --out.\n\nSimilarity methods run in the wsd configuration: gamma 0, \
                      S(w1) = V1, MLE base and evidence (kl uses a katz base for its values)."
    )]
    Disambig {
        /// Pair file
        pairs: PathBuf,
        /// Methods to compare (repeatable): mle, katz, rand, conf, l1, js, kl
        #[arg(long = "measure", value_name = "METHOD")]
        measures: Vec<Method>,
        /// Cross-validation folds
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// Master seed; per-stage seeds derive from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Held-out fraction of pair instances
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        /// Delete training singletons before building models
        #[arg(long)]
        drop_singletons: bool,
        /// Good-Turing discount threshold
        #[arg(long, default_value_t = 5)]
        gt_threshold: u64,
        /// Beta grid override for the tuned measures: `a,b,c` or `start:stop:step`
        #[arg(long)]
        beta_grid: Option<GridArg>,
        /// Also evaluate the unweighted neighbor-voting scheme
        #[arg(long)]
        voting: bool,
        /// Neighbor counts for the voting sweep (with --voting)
        #[arg(long, value_delimiter = ',')]
        voting_k: Option<Vec<usize>>,
        /// Report directory
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Cross-validated grid search for one similarity measure
    #[command(
        long_about = "Tunes beta (and optionally gamma, k, t) for one measure by grid search \
                      on the tuning folds, reporting per-fold selections and errors. Grids are \
                      `a,b,c` lists or `start:stop:step` ranges; defaults bracket each \
                      measure's useful range (js: 1..30, l1/kl: 0.5..8)."
    )]
    Tune {
        /// Pair file
        pairs: PathBuf,
        /// Measure to tune: js, l1, or kl
        #[arg(long)]
        measure: Measure,
        #[arg(long)]
        beta_grid: Option<GridArg>,
        #[arg(long)]
        gamma_grid: Option<GridArg>,
        /// Comma-separated neighbor caps (numbers or `inf`)
        #[arg(long, value_delimiter = ',')]
        k_grid: Option<Vec<KArg>>,
        #[arg(long)]
        t_grid: Option<GridArg>,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long)]
        drop_singletons: bool,
        #[arg(long, default_value_t = 5)]
        gt_threshold: u64,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    match cli.command {
        Command::Ingest {
            input,
            out,
            drop_singletons,
        } => commands::cmd_ingest(&input, out.as_deref(), drop_singletons),
        Command::Neighbors { table, word, model } => {
            let (config, _) = config::resolve(Preset::Wsd, &model)?;
            commands::cmd_neighbors(&table, &word, &config)
        }
        Command::Perplexity {
            train,
            test,
            model,
            drop_singletons,
            flags,
        } => {
            let (config, _) = config::resolve(Preset::Lm, &flags)?;
            commands::cmd_perplexity(&train, &test, model, &config, drop_singletons)
        }
        Command::Disambig {
            pairs,
            measures,
            folds,
            seed,
            test_fraction,
            drop_singletons,
            gt_threshold,
            beta_grid,
            voting,
            voting_k,
            out,
        } => {
            let methods = if measures.is_empty() {
                vec![
                    Method::Mle,
                    Method::Katz,
                    Method::Rand,
                    Method::Sim(Measure::Confusion),
                    Method::Sim(Measure::L1),
                    Method::Sim(Measure::Js),
                ]
            } else {
                measures
            };
            let voting_ks = if voting {
                Some(voting_k.unwrap_or_else(|| vec![1, 2, 3, 5, 7, 10, 20, 50]))
            } else {
                None
            };
            commands::cmd_disambig(
                &pairs,
                &methods,
                folds,
                seed,
                test_fraction,
                drop_singletons,
                gt_threshold,
                beta_grid.map(|g| g.0),
                voting_ks,
                &out,
            )
        }
        Command::Tune {
            pairs,
            measure,
            beta_grid,
            gamma_grid,
            k_grid,
            t_grid,
            folds,
            seed,
            test_fraction,
            drop_singletons,
            gt_threshold,
        } => commands::cmd_tune(
            &pairs,
            measure,
            beta_grid.map(|g| g.0),
            gamma_grid.map(|g| g.0),
            k_grid.map(|ks| ks.into_iter().map(|k| k.0).collect()),
            t_grid.map(|g| g.0),
            folds,
            seed,
            test_fraction,
            drop_singletons,
            gt_threshold,
        ),
    }
}
