//! Runs perspectives from a [`RunConfig`] and writes their artifacts.
//!
//! The graph and node attributes are built lazily and shared between
//! perspectives of one [`Session`].

use std::cell::OnceCell;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::composition::{global_composition, node_composition, GlobalComposition, NodeComposition};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::{build_graph, node_attributes, NodeAttributes, SocialGraph};
use crate::grouping::{assign_groups, categorize, GroupAssignment};
use crate::influence::{influence_analysis, InfluenceReport, InfluenceScores};
use crate::interactions::{load_dataset, sample_dataset, InteractionDataset};
use crate::robustness::{robustness_analysis, RobustnessReport};
use crate::stats::{statistical_analysis, DistributionReport};
use crate::structure::{kshell_decomposition, structure_analysis, StructureReport};
use crate::temporal::{temporal_analysis, TemporalSeries};
use crate::virality::{
    extract_cascades, topic_profiles, virality_analysis, write_cascades_csv, Cascade, TopicReport, ViralityReport,
};

/// The analysis perspectives, in the order `all` runs them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    Statistical,
    Network,
    Robustness,
    Influence,
    Structure,
    Temporal,
    Virality,
}

impl Perspective {
    pub const ALL: [Perspective; 7] = [
        Perspective::Statistical,
        Perspective::Network,
        Perspective::Robustness,
        Perspective::Influence,
        Perspective::Structure,
        Perspective::Temporal,
        Perspective::Virality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Perspective::Statistical => "statistical",
            Perspective::Network => "network",
            Perspective::Robustness => "robustness",
            Perspective::Influence => "influence",
            Perspective::Structure => "structure",
            Perspective::Temporal => "temporal",
            Perspective::Virality => "virality",
        }
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Perspective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stats" => return Ok(Perspective::Statistical),
            "composition" => return Ok(Perspective::Network),
            _ => {}
        }
        Perspective::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown perspective `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkOutput {
    pub global: GlobalComposition,
    pub node: NodeComposition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViralityOutput {
    pub cascades: usize,
    pub virality: ViralityReport,
    /// `None` when no interaction carries a topic.
    pub topics: Option<TopicReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PerspectiveOutput {
    Statistical(DistributionReport),
    Network(NetworkOutput),
    Robustness(RobustnessReport),
    Influence(InfluenceReport),
    Structure(StructureReport),
    Temporal(TemporalSeries),
    Virality(ViralityOutput),
}

/// A finished perspective together with the files it wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct PerspectiveResult {
    pub perspective: Perspective,
    pub epsilon: f64,
    pub output: PerspectiveOutput,
    pub artifacts: Vec<String>,
}

pub struct Session {
    pub config: RunConfig,
    pub dataset: InteractionDataset,
    pub assignment: GroupAssignment,
    graph: OnceCell<SocialGraph>,
    attributes: OnceCell<Vec<NodeAttributes>>,
    influence: OnceCell<InfluenceScores>,
    cascades: OnceCell<Vec<Cascade>>,
}

impl Session {
    /// Loads, samples and groups the configured dataset.
    pub fn open(config: RunConfig) -> Result<Self> {
        let dataset = Self::load_dataset(&config)?;
        let assignment = Self::group(&config, &dataset)?;
        Ok(Self::from_parts(config, dataset, assignment))
    }

    pub fn load_dataset(config: &RunConfig) -> Result<InteractionDataset> {
        let ds = load_dataset(config.dataset_path(), config.dataset_format(), config.dataset.on_error)?;
        if config.dataset.sample_fraction < 1.0 {
            sample_dataset(&ds, config.dataset.sample_fraction, config.dataset.sample_seed)
        } else {
            Ok(ds)
        }
    }

    pub fn group(config: &RunConfig, dataset: &InteractionDataset) -> Result<GroupAssignment> {
        let spec = config.groups.spec()?;
        let source = config.score_source()?;
        let users = dataset.users();
        let results = categorize(&users, source.as_ref())?;
        assign_groups(&results, &spec)
    }

    pub fn from_parts(config: RunConfig, dataset: InteractionDataset, assignment: GroupAssignment) -> Self {
        Session {
            config,
            dataset,
            assignment,
            graph: OnceCell::new(),
            attributes: OnceCell::new(),
            influence: OnceCell::new(),
            cascades: OnceCell::new(),
        }
    }

    pub fn graph(&self) -> Result<&SocialGraph> {
        if let Some(g) = self.graph.get() {
            return Ok(g);
        }
        let g = build_graph(&self.dataset)?;
        Ok(self.graph.get_or_init(|| g))
    }

    fn attributes(&self) -> Result<&[NodeAttributes]> {
        if let Some(a) = self.attributes.get() {
            return Ok(a);
        }
        let a = node_attributes(self.graph()?, self.config.betweenness_mode())?;
        Ok(self.attributes.get_or_init(|| a))
    }

    pub fn influence_scores(&self) -> Result<&InfluenceScores> {
        if let Some(s) = self.influence.get() {
            return Ok(s);
        }
        let s = InfluenceScores::compute(self.graph()?, &self.config.iteration_params())?;
        Ok(self.influence.get_or_init(|| s))
    }

    pub fn cascades(&self) -> Result<&[Cascade]> {
        if let Some(c) = self.cascades.get() {
            return Ok(c);
        }
        let c = extract_cascades(&self.dataset)?;
        Ok(self.cascades.get_or_init(|| c))
    }

    /// Runs one perspective without writing anything.
    pub fn run(&self, p: Perspective) -> Result<PerspectiveOutput> {
        self.compute(p).map_err(|e| e.in_perspective(p.name()))
    }

    fn compute(&self, p: Perspective) -> Result<PerspectiveOutput> {
        let cfg = &self.config;
        let eps = cfg.epsilon_for(p);
        let a = &self.assignment;
        Ok(match p {
            Perspective::Statistical => PerspectiveOutput::Statistical(statistical_analysis(a, eps)?),
            Perspective::Network => {
                let g = self.graph()?;
                PerspectiveOutput::Network(NetworkOutput {
                    global: global_composition(g, a, cfg.betweenness_mode(), eps)?,
                    node: node_composition(g, a, self.attributes()?, eps)?,
                })
            }
            Perspective::Robustness => {
                PerspectiveOutput::Robustness(robustness_analysis(self.graph()?, a, cfg.removal_order()?, eps)?)
            }
            Perspective::Influence => PerspectiveOutput::Influence(influence_analysis(
                self.graph()?,
                a,
                self.influence_scores()?,
                cfg.iteration_params(),
                eps,
            )?),
            Perspective::Structure => {
                let g = self.graph()?;
                let mask: Vec<bool> = a.node_groups(g).iter().map(Option::is_some).collect();
                let shells = kshell_decomposition(&g.induced_by_mask(&mask));
                PerspectiveOutput::Structure(structure_analysis(&shells, a, eps)?)
            }
            Perspective::Temporal => PerspectiveOutput::Temporal(temporal_analysis(
                &self.dataset,
                a,
                cfg.temporal.unit,
                eps,
                cfg.temporal.include_uncategorized,
            )?),
            Perspective::Virality => {
                let cascades = self.cascades()?;
                let topics = match topic_profiles(&self.dataset, a, cfg.virality.top_k, cfg.virality.jaccard_threshold) {
                    Ok(t) => Some(t),
                    Err(Error::NoTopics) => None,
                    Err(e) => return Err(e),
                };
                PerspectiveOutput::Virality(ViralityOutput {
                    cascades: cascades.len(),
                    virality: virality_analysis(cascades, a, eps, cfg.influencer_thresholds())?,
                    topics,
                })
            }
        })
    }

    /// Runs one perspective and writes its tables into `out`.
    pub fn run_and_write(&self, p: Perspective, out: &Path) -> Result<PerspectiveResult> {
        let output = self.run(p)?;
        let artifacts = self.write(&output, out).map_err(|e| e.in_perspective(p.name()))?;
        Ok(PerspectiveResult {
            perspective: p,
            epsilon: self.config.epsilon_for(p),
            output,
            artifacts,
        })
    }

    fn write(&self, output: &PerspectiveOutput, out: &Path) -> Result<Vec<String>> {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let mut written = Vec::new();
        let mut file = |name: &str| -> PathBuf {
            written.push(name.to_owned());
            out.join(name)
        };
        match output {
            PerspectiveOutput::Statistical(r) => write_json(&file("statistical.json"), r)?,
            PerspectiveOutput::Network(n) => {
                n.global.write_csv(&file("network_stages.csv"))?;
                n.node.write_csv(&file("network_groups.csv"))?;
            }
            PerspectiveOutput::Robustness(r) => r.write_csv(&file("robustness.csv"))?,
            PerspectiveOutput::Influence(_) => {
                self.influence_scores()?
                    .write_csv(&file("influence_nodes.csv"), self.graph()?, &self.assignment)?;
            }
            PerspectiveOutput::Structure(s) => s.write_csv(&file("structure.csv"))?,
            PerspectiveOutput::Temporal(t) => t.write_csv(&file("temporal.csv"))?,
            PerspectiveOutput::Virality(v) => {
                write_cascades_csv(&file("cascades.csv"), self.cascades()?, &self.assignment)?;
                v.virality.write_curves_csv(&file("curves.csv"))?;
                if let Some(t) = &v.topics {
                    t.write_csv(&file("topics.csv"))?;
                }
            }
        }
        Ok(written)
    }

    /// Runs `perspectives` in order, writing every artifact plus
    /// `report.json` and `report.txt` into `out`.
    pub fn run_many(&self, perspectives: &[Perspective], out: &Path) -> Result<crate::report::Report> {
        let mut results = Vec::new();
        for &p in perspectives {
            results.push(self.run_and_write(p, out)?);
        }
        let report = crate::report::assemble_report(self, &results)?;
        report.write(out)?;
        Ok(report)
    }

    pub fn run_all(&self, out: &Path) -> Result<crate::report::Report> {
        self.run_many(&Perspective::ALL, out)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
