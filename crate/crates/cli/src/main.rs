use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use retweet_lens::config::RunConfig;
use retweet_lens::graph::build_graph;
use retweet_lens::pipeline::{write_json, Perspective, Session};
use retweet_lens::report::{DatasetSummary, GroupingSummary};
use retweet_lens::synth::{Preset, Scale};
use retweet_lens::{Error, ErrorClass, Result};

#[derive(Parser)]
#[command(name = "retweet-lens", version, about = "Group interference analysis for retweet networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load the dataset and write its summary and weighted edge list.
    Ingest(Common),
    /// Score users and write the group assignment.
    Groups(Common),
    /// Group cardinalities against the grand mean.
    Stats(Common),
    /// Graph properties as groups are added, and per-group node attributes.
    Network(Common),
    /// Metric decay as each group is removed.
    Robustness(Common),
    /// PageRank, HITS and eigenvector centrality by group.
    Influence(Common),
    /// Group presence in each k-shell.
    Structure(Common),
    /// Per-day or per-hour traffic shares.
    Temporal(Common),
    /// Cascades, influencers and topics.
    Virality(Common),
    /// Every perspective in order, plus the combined report.
    All {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of perspectives to run.
        #[arg(long, value_delimiter = ',')]
        perspective: Vec<String>,
    },
    /// Write a synthetic scenario with planted ground truth.
    Synth {
        /// null, heavy, core, bursty or fast.
        #[arg(long, default_value = "null")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = Scale::default().users)]
        users: usize,
        #[arg(long, default_value_t = Scale::default().interactions)]
        interactions: usize,
        #[arg(long, default_value_t = Scale::default().days)]
        days: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the global tolerance and drops per-perspective overrides.
    #[arg(long)]
    epsilon: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.override_seed(seed);
        }
        if let Some(eps) = self.epsilon {
            cfg.override_epsilon(eps);
            cfg.validate()?;
        }
        let out = self.out.clone().unwrap_or_else(|| cfg.output_dir());
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok((cfg, out))
    }
}

fn run_perspectives(common: &Common, perspectives: &[Perspective]) -> Result<()> {
    let (cfg, out) = common.load()?;
    let session = Session::open(cfg)?;
    let report = session.run_many(perspectives, &out)?;
    print!("{}", report.text_table());
    Ok(())
}

fn ingest(common: &Common) -> Result<()> {
    let (cfg, out) = common.load()?;
    let ds = Session::load_dataset(&cfg)?;
    let g = build_graph(&ds)?;
    write_json(&out.join("dataset.json"), &DatasetSummary::of(&ds, &cfg))?;
    write_json(&out.join("graph.json"), &g.properties())?;
    g.write_edge_list(&out.join("edges.tsv"))?;
    let p = g.properties();
    println!(
        "{} interactions ({} dropped), {} users, {} edges, total weight {}",
        ds.len(),
        ds.dropped_count,
        p.order,
        p.size,
        p.total_weight
    );
    Ok(())
}

fn groups(common: &Common) -> Result<()> {
    let (cfg, out) = common.load()?;
    let ds = Session::load_dataset(&cfg)?;
    let a = Session::group(&cfg, &ds)?;
    a.write_csv(&out.join("groups.csv"))?;
    write_json(&out.join("grouping.json"), &GroupingSummary::of(&a))?;
    for info in &a.groups {
        println!("{}\t{}", info.name, info.size);
    }
    println!("unknown\t{}", a.unknown);
    Ok(())
}

fn synth(scenario: &str, seed: u64, out: &Path, scale: Scale) -> Result<()> {
    let preset: Preset = scenario.parse()?;
    let s = preset.generate(seed, scale)?;
    s.write(out)?;
    println!(
        "{}: {} interactions, {} users written to {}",
        preset.name(),
        s.dataset.len(),
        s.scores.len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let one = |c: &Common, p| run_perspectives(c, &[p]);
    match &cli.command {
        Command::Ingest(c) => ingest(c),
        Command::Groups(c) => groups(c),
        Command::Stats(c) => one(c, Perspective::Statistical),
        Command::Network(c) => one(c, Perspective::Network),
        Command::Robustness(c) => one(c, Perspective::Robustness),
        Command::Influence(c) => one(c, Perspective::Influence),
        Command::Structure(c) => one(c, Perspective::Structure),
        Command::Temporal(c) => one(c, Perspective::Temporal),
        Command::Virality(c) => one(c, Perspective::Virality),
        Command::All { common, perspective } => {
            let mut selected = perspective
                .iter()
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<Perspective>>>()?;
            if selected.is_empty() {
                selected = Perspective::ALL.to_vec();
            }
            selected.sort();
            selected.dedup();
            run_perspectives(common, &selected)
        }
        Command::Synth {
            scenario,
            seed,
            out,
            users,
            interactions,
            days,
        } => synth(
            scenario,
            *seed,
            out,
            Scale {
                users: *users,
                interactions: *interactions,
                days: *days,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage mistakes count as configuration errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Config => 1,
                ErrorClass::Data => 2,
                ErrorClass::Computation => 3,
            })
        }
    }
}
