//! The overall verdict table and its JSON and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::BetweennessMode;
use crate::config::RunConfig;
use crate::grouping::{GroupAssignment, GroupInfo};
use crate::interactions::{format_timestamp, InteractionDataset};
use crate::pipeline::{write_json, Perspective, PerspectiveOutput, PerspectiveResult, Session};
use crate::verdict::Stimulation;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub source: String,
    pub interactions: usize,
    pub dropped: usize,
    pub users: usize,
    pub window_start: String,
    pub window_end: String,
    pub sample_fraction: f64,
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupingSummary {
    pub groups: Vec<GroupInfo>,
    pub thresholds: Vec<Option<f64>>,
    pub categorized: usize,
    pub unknown: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub epsilon: f64,
    pub analysis_seed: u64,
    pub betweenness: BetweennessMode,
    pub removal_order: String,
}

/// One perspective's slot in the report.
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    NotRun,
    Ran {
        epsilon: f64,
        artifacts: Vec<String>,
        result: PerspectiveOutput,
    },
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Entry::NotRun => s.serialize_str("not run"),
            Entry::Ran {
                epsilon,
                artifacts,
                result,
            } => {
                let mut m = s.serialize_map(Some(4))?;
                m.serialize_entry("status", "ok")?;
                m.serialize_entry("epsilon", epsilon)?;
                m.serialize_entry("artifacts", artifacts)?;
                m.serialize_entry("result", result)?;
                m.end()
            }
        }
    }
}

/// One cell of the verdict table; `scope` is a group name or `overall`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub perspective: Perspective,
    pub scope: String,
    pub verdict: String,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub dataset: DatasetSummary,
    pub grouping: GroupingSummary,
    pub settings: Settings,
    /// Keyed by perspective name, in run order.
    #[serde(serialize_with = "ordered")]
    pub perspectives: Vec<(Perspective, Entry)>,
    pub table: Vec<Row>,
}

fn ordered<S: Serializer>(v: &[(Perspective, Entry)], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(v.len()))?;
    for (p, e) in v {
        m.serialize_entry(p.name(), e)?;
    }
    m.end()
}

const OVERALL: &str = "overall";

fn rows_for(r: &PerspectiveResult) -> Vec<Row> {
    let row = |scope: &str, verdict: String| Row {
        perspective: r.perspective,
        scope: scope.to_owned(),
        verdict,
        epsilon: r.epsilon,
    };
    match &r.output {
        PerspectiveOutput::Statistical(s) => vec![row(OVERALL, s.verdict.to_string())],
        PerspectiveOutput::Network(n) => {
            let mut rows: Vec<Row> = n
                .global
                .stages
                .iter()
                .map(|s| row(&s.name, s.verdict.to_string()))
                .collect();
            rows.push(row(OVERALL, n.node.verdict.to_string()));
            rows
        }
        PerspectiveOutput::Robustness(rb) => rb.groups.iter().map(|g| row(&g.name, g.verdict.to_string())).collect(),
        PerspectiveOutput::Influence(i) => vec![row(OVERALL, i.verdict.to_string())],
        PerspectiveOutput::Structure(s) => match s.core_verdicts() {
            Some(core) => s
                .groups
                .iter()
                .zip(core)
                .map(|(g, v)| row(g, format!("{v} (core k={})", s.max_k)))
                .collect(),
            None => Vec::new(),
        },
        PerspectiveOutput::Temporal(t) => t
            .groups
            .iter()
            .enumerate()
            .map(|(g, name)| {
                let mut tally: BTreeMap<Stimulation, usize> = BTreeMap::new();
                for b in &t.buckets {
                    if let Some(v) = b.verdicts[g] {
                        *tally.entry(v).or_default() += 1;
                    }
                }
                let text = tally
                    .iter()
                    .map(|(v, c)| format!("{v} x{c}"))
                    .collect::<Vec<_>>()
                    .join(", ");
                row(name, text)
            })
            .collect(),
        PerspectiveOutput::Virality(v) => {
            let mut rows: Vec<Row> = v
                .virality
                .groups
                .iter()
                .filter_map(|g| g.influencer.map(|i| row(&g.name, i.to_string())))
                .collect();
            rows.push(row(OVERALL, v.virality.verdict.to_string()));
            if let Some(t) = &v.topics {
                rows.push(row(OVERALL, t.verdict.to_string()));
            }
            rows
        }
    }
}

impl DatasetSummary {
    pub fn of(ds: &InteractionDataset, cfg: &RunConfig) -> Self {
        DatasetSummary {
            source: ds.source_path.clone(),
            interactions: ds.len(),
            dropped: ds.dropped_count,
            users: ds.users().len(),
            window_start: format_timestamp(ds.window_start),
            window_end: format_timestamp(ds.window_end),
            sample_fraction: cfg.dataset.sample_fraction,
            sample_seed: cfg.dataset.sample_seed,
        }
    }
}

impl GroupingSummary {
    pub fn of(a: &GroupAssignment) -> Self {
        GroupingSummary {
            groups: a.groups.clone(),
            thresholds: a.thresholds.clone(),
            categorized: a.categorized(),
            unknown: a.unknown,
        }
    }
}

/// Collects finished perspectives into a report; perspectives not in
/// `results` are marked as not run.
pub fn assemble_report(session: &Session, results: &[PerspectiveResult]) -> Result<Report> {
    if results.is_empty() {
        return Err(Error::NoResults);
    }
    let cfg = &session.config;
    let ds = &session.dataset;
    let a = &session.assignment;
    let perspectives = Perspective::ALL
        .into_iter()
        .map(|p| {
            let entry = results
                .iter()
                .find(|r| r.perspective == p)
                .map_or(Entry::NotRun, |r| Entry::Ran {
                    epsilon: r.epsilon,
                    artifacts: r.artifacts.clone(),
                    result: r.output.clone(),
                });
            (p, entry)
        })
        .collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        dataset: DatasetSummary::of(ds, cfg),
        grouping: GroupingSummary::of(a),
        settings: Settings {
            epsilon: cfg.analysis.epsilon,
            analysis_seed: cfg.analysis.seed,
            betweenness: cfg.betweenness_mode(),
            removal_order: cfg.robustness.order.clone(),
        },
        perspectives,
        table: results.iter().flat_map(rows_for).collect(),
    })
}

impl Report {
    pub fn entry(&self, p: Perspective) -> &Entry {
        &self.perspectives.iter().find(|(q, _)| *q == p).expect("every perspective has an entry").1
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Perspectives as rows, group names as columns, plus an `overall`
    /// column for verdicts about the whole population.
    pub fn text_table(&self) -> String {
        let mut columns: Vec<String> = self.grouping.groups.iter().map(|g| g.name.clone()).collect();
        columns.push(OVERALL.to_owned());
        let mut lines: Vec<Vec<String>> = vec![std::iter::once("perspective".to_owned()).chain(columns.iter().cloned()).collect()];
        for (p, e) in &self.perspectives {
            let mut line = vec![p.name().to_owned()];
            if matches!(e, Entry::NotRun) {
                line.push("not run".to_owned());
                line.resize(columns.len() + 1, String::new());
            } else {
                for c in &columns {
                    let cell: Vec<&str> = self
                        .table
                        .iter()
                        .filter(|r| r.perspective == *p && &r.scope == c)
                        .map(|r| r.verdict.as_str())
                        .collect();
                    line.push(cell.join("; "));
                }
            }
            lines.push(line);
        }
        let widths: Vec<usize> = (0..=columns.len())
            .map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (n, l) in lines.iter().enumerate() {
            let cells: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
            if n == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "{}", rule.join("-+-"));
            }
        }
        out
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("report.json"), self)?;
        let txt = dir.join("report.txt");
        std::fs::write(&txt, self.text_table()).map_err(|e| Error::io(&txt, e))
    }
}

/// Checks a serialized report: the schema version must be present and
/// every perspective key must be known.
pub fn check_report(json: &str) -> Result<()> {
    let v: serde_json::Value = serde_json::from_str(json)?;
    let version = v.get("schema_version").and_then(|x| x.as_u64());
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(Error::Config(format!("unsupported report schema version {version:?}")));
    }
    let Some(p) = v.get("perspectives").and_then(|x| x.as_object()) else {
        return Err(Error::Config("report has no perspectives".into()));
    };
    for key in p.keys() {
        if !Perspective::ALL.iter().any(|q| q.name() == key) {
            return Err(Error::Config(format!("unknown perspective `{key}` in report")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::grouping::GroupAssignment;
    use crate::interactions::{Interaction, InteractionDataset};

    fn session() -> Session {
        let cfg = RunConfig::from_toml("[dataset]\npath = \"x.ndjson\"\n[scores]\nsource = \"constant\"\nvalue = 0.5\n").unwrap();
        let ds = InteractionDataset::from_interactions(vec![
            Interaction::new("a", "b", "t1", ["vote"], 0),
            Interaction::new("b", "c", "t2", ["vote"], 60),
            Interaction::new("c", "a", "t3", ["vote"], 120),
        ]);
        let a = GroupAssignment::from_membership(["humans", "bots"], [("a", Some(0)), ("b", Some(0)), ("c", Some(1))]);
        Session::from_parts(cfg, ds, a)
    }

    #[test]
    fn only_stats() {
        let s = session();
        let dir = tempfile::tempdir().unwrap();
        let r = s.run_many(&[Perspective::Statistical], dir.path()).unwrap();
        assert_eq!(r.table.len(), 1);
        assert_eq!(r.table[0].verdict, "Unevenly distributed");
        assert_eq!(r.entry(Perspective::Influence), &Entry::NotRun);
        let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        check_report(&json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["perspectives"]["virality"], "not run");
        assert_eq!(v["perspectives"]["statistical"]["status"], "ok");
        assert!(dir.path().join("statistical.json").exists());
        assert!(std::fs::read_to_string(dir.path().join("report.txt")).unwrap().contains("not run"));
    }

    #[test]
    fn nothing_ran() {
        assert!(matches!(assemble_report(&session(), &[]), Err(Error::NoResults)));
    }

    #[test]
    fn rejects_unknown_perspectives() {
        let good = r#"{"schema_version":1,"perspectives":{"temporal":"not run"}}"#;
        check_report(good).unwrap();
        let bad = r#"{"schema_version":1,"perspectives":{"sentiment":"not run"}}"#;
        assert!(check_report(bad).is_err());
        assert!(check_report(r#"{"perspectives":{}}"#).is_err());
    }

    #[test]
    fn full_run_is_reproducible() {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let r1 = session().run_all(d1.path()).unwrap();
        session().run_all(d2.path()).unwrap();
        assert_eq!(r1.perspectives.iter().filter(|(_, e)| matches!(e, Entry::Ran { .. })).count(), 7);
        for f in std::fs::read_dir(d1.path()).unwrap() {
            let name = f.unwrap().file_name();
            let a = std::fs::read(d1.path().join(&name)).unwrap();
            let b = std::fs::read(d2.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name:?}");
        }
    }
}
