//! Seeded synthetic scenarios with planted group behaviour.
//!
//! Every group emits an exact number of retweets per day. Each retweet
//! slot picks the group of the user it targets, and slots aimed at one
//! group are chained into cascades whose size and duration follow that
//! group's cascade profile. Authors inside a group are drawn by
//! preferential attachment, except in the designated core group where
//! they are drawn uniformly so the core stays dense.

use std::collections::{BTreeMap, VecDeque};
use std::io::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{DatasetConfig, GroupsConfig, RunConfig, ScoresConfig};
use crate::error::{Error, Result};
use crate::interactions::{Interaction, InteractionDataset, UserId};
use crate::pipeline::{Perspective, PerspectiveOutput};
use crate::report::{Entry, Report};
use crate::verdict::{Behaviour, Discussion, Distribution, Ecosystem, Influence, Influencer, Presence, Stability, Stimulation, Virality};

const DAY: i64 = 86_400;
/// 2019-10-01T00:00:00Z.
pub const DEFAULT_START: i64 = 1_569_888_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeProfile {
    pub mean_size: f64,
    pub mean_duration_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub users: usize,
    /// `[lo, hi)` range the group's scores are drawn from.
    pub score_range: [f64; 2],
    /// Retweets emitted per day by the whole group.
    pub daily_emission: usize,
    /// Day index to emission count, replacing `daily_emission`.
    #[serde(default)]
    pub emission_overrides: BTreeMap<usize, usize>,
    /// Probability of targeting each group, in group order.
    pub targets: Vec<f64>,
    pub cascade: CascadeProfile,
    /// Share of this group's retweets routed to the core group.
    #[serde(default)]
    pub core_bias: f64,
    pub topics: Vec<String>,
}

impl GroupSpec {
    pub fn emission_on(&self, day: usize) -> usize {
        self.emission_overrides.get(&day).copied().unwrap_or(self.daily_emission)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub seed: u64,
    pub days: usize,
    /// Epoch seconds of the first day's midnight (UTC).
    pub start: i64,
    pub core_group: Option<usize>,
    pub groups: Vec<GroupSpec>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.groups.is_empty() || self.days == 0 {
            return bad("a scenario needs at least one group and one day".into());
        }
        if self.start.rem_euclid(DAY) != 0 {
            return bad("start must be a UTC midnight".into());
        }
        if let Some(c) = self.core_group {
            if c >= self.groups.len() {
                return bad(format!("core group {c} does not exist"));
            }
        }
        let mut prev_hi = 0.0;
        for (i, g) in self.groups.iter().enumerate() {
            if g.users == 0 {
                return bad(format!("group `{}` has no users", g.name));
            }
            let [lo, hi] = g.score_range;
            if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) || (i > 0 && lo < prev_hi) {
                return bad(format!("score ranges must be ordered, disjoint and inside [0, 1] (`{}`)", g.name));
            }
            prev_hi = hi;
            if g.targets.len() != self.groups.len()
                || g.targets.iter().any(|p| *p < 0.0)
                || (g.targets.iter().sum::<f64>() - 1.0).abs() > 1e-9
            {
                return bad(format!("targets of `{}` must be a distribution over the groups", g.name));
            }
            if !(0.0..=1.0).contains(&g.core_bias) || (g.core_bias > 0.0 && self.core_group.is_none()) {
                return bad(format!("core_bias of `{}` needs a core group and must lie in [0, 1]", g.name));
            }
            let total: usize = (0..self.days).map(|d| g.emission_on(d)).sum();
            if total < g.users {
                return bad(format!("group `{}` emits fewer retweets than it has users", g.name));
            }
            if g.emission_overrides.keys().any(|d| *d >= self.days) {
                return bad(format!("emission override outside the scenario for `{}`", g.name));
            }
            if g.topics.is_empty() || g.cascade.mean_size < 1.0 || g.cascade.mean_duration_h < 0.0 {
                return bad(format!("group `{}` needs topics and a sensible cascade profile", g.name));
            }
        }
        Ok(())
    }

    fn user_name(&self, g: usize, i: usize) -> String {
        format!("g{g}u{i:05}")
    }
}

/// What the generator planted, recounted from the emitted data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub scenario: String,
    pub seed: u64,
    pub groups: Vec<String>,
    pub user_counts: Vec<usize>,
    /// Retweets emitted per group, by day.
    pub daily_emissions: Vec<Vec<usize>>,
    /// Share of all retweet weight emitted by each group.
    pub emitted_weight_share: Vec<f64>,
    pub expect: Expectations,
}

/// Verdicts a correct analysis must reproduce. Absent entries are not
/// planted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Expectations {
    pub distribution: Option<Distribution>,
    pub ecosystem: BTreeMap<String, Ecosystem>,
    pub behaviour: Option<Behaviour>,
    pub stability: BTreeMap<String, Stability>,
    pub influence: Option<Influence>,
    /// Verdict of each group in the innermost shell.
    pub core: BTreeMap<String, Presence>,
    /// When set, every shell row must be this for every group.
    pub all_shells: Option<Presence>,
    /// `(group, day label)` to verdict.
    pub stimulation: Vec<(String, String, Stimulation)>,
    /// Verdict for every bucket not listed in `stimulation`.
    pub stimulation_elsewhere: Option<Stimulation>,
    pub discussion: Option<Discussion>,
    pub virality: Option<Virality>,
    pub influencer: BTreeMap<String, Influencer>,
}

pub struct Scenario {
    pub spec: ScenarioSpec,
    pub dataset: InteractionDataset,
    pub scores: Vec<(UserId, f64)>,
    pub truth: GroundTruth,
}

/// Draws from a discrete distribution.
fn pick(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let mut x = rng.random::<f64>() * weights.iter().sum::<f64>();
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

/// Generates the scenario. Expectations are left empty; the presets fill
/// them in.
pub fn generate(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_groups = spec.groups.len();
    let days = spec.days;

    // retweeters: every user once, the rest uniformly, shuffled, then cut
    // into days by the emission schedule
    let mut daily_retweeters: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n_groups);
    for g in &spec.groups {
        let total: usize = (0..days).map(|d| g.emission_on(d)).sum();
        let mut pool: Vec<usize> = (0..g.users).collect();
        pool.extend((g.users..total).map(|_| rng.random_range(0..g.users)));
        pool.shuffle(&mut rng);
        let mut it = pool.into_iter();
        daily_retweeters.push((0..days).map(|d| it.by_ref().take(g.emission_on(d)).collect()).collect());
    }

    // queues[target group][day] of (retweeter group, retweeter)
    let mut queues: Vec<Vec<VecDeque<(usize, usize)>>> = vec![vec![VecDeque::new(); days]; n_groups];
    for (g, spec_g) in spec.groups.iter().enumerate() {
        for (d, retweeters) in daily_retweeters[g].iter().enumerate() {
            for &u in retweeters {
                let target = match spec.core_group {
                    Some(c) if rng.random::<f64>() < spec_g.core_bias => c,
                    _ => pick(&mut rng, &spec_g.targets),
                };
                queues[target][d].push_back((g, u));
            }
        }
    }

    let mut urns: Vec<Vec<usize>> = spec.groups.iter().map(|g| (0..g.users).collect()).collect();
    let mut interactions = Vec::new();
    let mut tweet_no = 0usize;
    for d in 0..days {
        for a in 0..n_groups {
            let profile = spec.groups[a].cascade;
            while !queues[a][d].is_empty() {
                let author = if Some(a) == spec.core_group {
                    rng.random_range(0..spec.groups[a].users)
                } else {
                    let x = urns[a][rng.random_range(0..urns[a].len())];
                    urns[a].push(x);
                    x
                };
                let author_id = spec.user_name(a, author);
                let lo = (profile.mean_size / 2.0).ceil().max(1.0) as usize;
                let hi = (profile.mean_size * 1.5).floor().max(lo as f64) as usize;
                let size = rng.random_range(lo..=hi);
                let duration = (profile.mean_duration_h * 3600.0 * rng.random_range(0.5..1.5)) as i64;
                let start = spec.start + d as i64 * DAY + rng.random_range(0..DAY);
                let mut offsets: Vec<i64> = (0..size.saturating_sub(2)).map(|_| rng.random_range(0..=duration)).collect();
                offsets.push(0);
                if size > 1 {
                    offsets.push(duration);
                }
                offsets.sort_unstable();
                let topics = &spec.groups[a].topics;
                let n_topics = rng.random_range(1..=topics.len().min(3));
                let tweet_topics: Vec<&str> = (0..n_topics)
                    .map(|_| {
                        // earlier topics in the vocabulary are more popular
                        let weights: Vec<f64> = (0..topics.len()).map(|i| 1.0 / (i + 1) as f64).collect();
                        topics[pick(&mut rng, &weights)].as_str()
                    })
                    .collect();
                let tweet = format!("{}-{tweet_no:07}", spec.name);
                tweet_no += 1;
                for off in offsets {
                    let ts = start + off;
                    let day = (ts - spec.start).div_euclid(DAY) as usize;
                    if day >= days {
                        break;
                    }
                    let q = &mut queues[a][day];
                    // avoid retweeting oneself when another slot is waiting
                    if q.front() == Some(&(a, author)) && q.len() > 1 {
                        q.swap(0, 1);
                    }
                    let Some((g, u)) = q.pop_front() else {
                        break;
                    };
                    interactions.push(Interaction::new(
                        spec.user_name(g, u),
                        author_id.clone(),
                        tweet.clone(),
                        tweet_topics.iter().copied(),
                        ts,
                    ));
                }
            }
        }
    }
    interactions.sort_by(|x, y| (x.timestamp, &x.tweet, &x.retweeter).cmp(&(y.timestamp, &y.tweet, &y.retweeter)));

    let mut scores = Vec::new();
    for (g, gs) in spec.groups.iter().enumerate() {
        let [lo, hi] = gs.score_range;
        for u in 0..gs.users {
            let s = if hi > lo { rng.random_range(lo..hi) } else { lo };
            scores.push((UserId::from(spec.user_name(g, u)), (s * 1e6).round() / 1e6));
        }
    }

    let group_of = |id: &str| -> usize { id[1..id.find('u').unwrap_or(1)].parse().unwrap_or(0) };
    let mut daily_emissions = vec![vec![0usize; days]; n_groups];
    let mut weight = vec![0usize; n_groups];
    for t in &interactions {
        let g = group_of(t.retweeter.as_str());
        daily_emissions[g][((t.timestamp - spec.start) / DAY) as usize] += 1;
        if t.retweeter != t.retweeted {
            weight[g] += 1;
        }
    }
    let total_weight: usize = weight.iter().sum();
    let truth = GroundTruth {
        scenario: spec.name.clone(),
        seed: spec.seed,
        groups: spec.groups.iter().map(|g| g.name.clone()).collect(),
        user_counts: spec.groups.iter().map(|g| g.users).collect(),
        daily_emissions,
        emitted_weight_share: weight.iter().map(|&w| w as f64 / total_weight.max(1) as f64).collect(),
        expect: Expectations::default(),
    };
    let mut dataset = InteractionDataset::from_interactions(interactions);
    dataset.source_path = format!("synth:{}", spec.name);
    Ok(Scenario {
        spec: spec.clone(),
        dataset,
        scores,
        truth,
    })
}

impl Scenario {
    /// A config that recovers the planted groups exactly from the score
    /// file, via thresholds at each group's lower score bound.
    pub fn run_config(&self) -> RunConfig {
        let mut cfg = RunConfig::from_toml(
            "[dataset]\npath = \"dataset.ndjson\"\n[scores]\nsource = \"file\"\npath = \"scores.csv\"\n",
        )
        .expect("static config parses");
        cfg.dataset = DatasetConfig {
            path: "dataset.ndjson".into(),
            format: None,
            on_error: Default::default(),
            sample_fraction: 1.0,
            sample_seed: self.spec.seed,
        };
        cfg.scores = ScoresConfig::File {
            path: "scores.csv".into(),
        };
        cfg.groups = GroupsConfig {
            fractions: None,
            thresholds: Some(self.spec.groups[1..].iter().map(|g| g.score_range[0]).collect()),
            names: self.spec.groups.iter().map(|g| g.name.clone()).collect(),
        };
        cfg.analysis.seed = self.spec.seed;
        cfg.robustness.seed = self.spec.seed;
        cfg
    }

    /// Writes `dataset.ndjson`, `scores.csv`, `ground_truth.json` and
    /// `config.toml` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.dataset.write_ndjson(&dir.join("dataset.ndjson"))?;
        let path = dir.join("scores.csv");
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        let mut body = String::from("user,score\n");
        for (u, s) in &self.scores {
            body.push_str(&format!("{u},{s}\n"));
        }
        f.write_all(body.as_bytes()).map_err(|e| Error::io(&path, e))?;
        f.flush().map_err(|e| Error::io(&path, e))?;
        crate::pipeline::write_json(&dir.join("ground_truth.json"), &self.truth)?;
        let cfg = dir.join("config.toml");
        std::fs::write(&cfg, self.run_config().to_toml()?).map_err(|e| Error::io(&cfg, e))
    }
}

/// The five built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// One homogeneous group.
    Null,
    /// 10% of users emit 40% of the retweets, all aimed at the rest.
    Heavy,
    /// A 10% group forms a dense core that everyone leans toward.
    Core,
    /// A 20% group doubles its share of traffic on the third day.
    Bursty,
    /// Cascades of about 100 within an hour against about 5 over three days.
    Fast,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "null" => Preset::Null,
            "heavy" => Preset::Heavy,
            "core" => Preset::Core,
            "bursty" => Preset::Bursty,
            "fast" => Preset::Fast,
            other => return Err(Error::Config(format!("unknown scenario `{other}`"))),
        })
    }
}

/// Size of a preset scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub users: usize,
    pub interactions: usize,
    pub days: usize,
}

impl Default for Scale {
    fn default() -> Self {
        Scale {
            users: 5_000,
            interactions: 100_000,
            days: 20,
        }
    }
}

fn vocabulary(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

const SHARED_TOPICS: [&str; 10] = [
    "electionday",
    "debate",
    "vote",
    "polls",
    "economy",
    "healthcare",
    "campaign",
    "candidates",
    "turnout",
    "results",
];

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Null, Preset::Heavy, Preset::Core, Preset::Bursty, Preset::Fast];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Null => "null",
            Preset::Heavy => "heavy",
            Preset::Core => "core",
            Preset::Bursty => "bursty",
            Preset::Fast => "fast",
        }
    }

    pub fn spec(self, seed: u64, scale: Scale) -> ScenarioSpec {
        let per_day = scale.interactions / scale.days;
        let share = |f: f64| (f * scale.users as f64).round() as usize;
        let daily = |f: f64| (f * per_day as f64).round() as usize;
        let plain = CascadeProfile {
            mean_size: 5.0,
            mean_duration_h: 12.0,
        };
        let group = |name: &str, users: usize, range: [f64; 2], emission: usize, targets: Vec<f64>| GroupSpec {
            name: name.to_owned(),
            users,
            score_range: range,
            daily_emission: emission,
            emission_overrides: BTreeMap::new(),
            targets,
            cascade: plain,
            core_bias: 0.0,
            topics: vocabulary(&SHARED_TOPICS),
        };
        let (groups, core_group) = match self {
            Preset::Null => (vec![group("Everyone", scale.users, [0.0, 1.0], per_day, vec![1.0])], None),
            Preset::Heavy => {
                let bots = share(0.1);
                (
                    vec![
                        group("Humans", scale.users - bots, [0.0, 0.5], daily(0.6), vec![1.0, 0.0]),
                        group("Bots", bots, [0.5, 1.0], daily(0.4), vec![1.0, 0.0]),
                    ],
                    None,
                )
            }
            Preset::Core => {
                let core = share(0.1);
                let mut humans = group("Periphery", scale.users - core, [0.0, 0.5], daily(0.8), vec![1.0, 0.0]);
                humans.core_bias = 0.2;
                let mut c = group("Core", core, [0.5, 1.0], daily(0.2), vec![0.0, 1.0]);
                c.core_bias = 1.0;
                (vec![humans, c], Some(1))
            }
            Preset::Bursty => {
                let b = share(0.2);
                let a_daily = daily(0.8);
                let mut burst = group("Bursty", b, [0.5, 1.0], daily(0.2), vec![0.5, 0.5]);
                // 40% of day three: b / (a + b) = 0.4
                burst.emission_overrides.insert(2, (a_daily as f64 * 0.4 / 0.6).round() as usize);
                (
                    vec![group("Steady", scale.users - b, [0.0, 0.5], a_daily, vec![0.8, 0.2]), burst],
                    None,
                )
            }
            Preset::Fast => {
                let f = share(0.1);
                let mut slow = group("Slow", scale.users - f, [0.0, 0.5], daily(0.9), vec![0.5, 0.5]);
                slow.cascade = CascadeProfile {
                    mean_size: 5.0,
                    mean_duration_h: 72.0,
                };
                let mut fast = group("Fast", f, [0.5, 1.0], daily(0.1), vec![0.5, 0.5]);
                fast.cascade = CascadeProfile {
                    mean_size: 100.0,
                    mean_duration_h: 1.0,
                };
                (vec![slow, fast], None)
            }
        };
        ScenarioSpec {
            name: self.name().to_owned(),
            seed,
            days: scale.days,
            start: DEFAULT_START,
            core_group,
            groups,
        }
    }

    /// Generates the scenario and records what it planted.
    pub fn generate(self, seed: u64, scale: Scale) -> Result<Scenario> {
        let spec = self.spec(seed, scale);
        let mut s = generate(&spec)?;
        let names: Vec<String> = spec.groups.iter().map(|g| g.name.clone()).collect();
        let day_label = |d: usize| {
            chrono::DateTime::from_timestamp(spec.start + d as i64 * DAY, 0)
                .unwrap_or_default()
                .format("%Y-%m-%d")
                .to_string()
        };
        let e = &mut s.truth.expect;
        match self {
            Preset::Null => {
                let all = &names[0];
                e.distribution = Some(Distribution::EquallyDistributed);
                e.ecosystem.insert(all.clone(), Ecosystem::Maintainer);
                e.behaviour = Some(Behaviour::BehaveSimilarly);
                e.stability.insert(all.clone(), Stability::NonDestabilizing);
                e.influence = Some(Influence::InfluenceSimilarly);
                e.all_shells = Some(Presence::Proportionate);
                e.stimulation_elsewhere = Some(Stimulation::Normal);
                e.discussion = Some(Discussion::DiscussSimilarly);
                e.virality = Some(Virality::EquallyViral);
            }
            Preset::Heavy => {
                e.distribution = Some(Distribution::UnevenlyDistributed);
                e.ecosystem.insert(names[1].clone(), Ecosystem::Changer);
                e.stability.insert(names[1].clone(), Stability::Destabilizing);
            }
            Preset::Core => {
                e.core.insert(names[0].clone(), Presence::Depopulated);
                e.core.insert(names[1].clone(), Presence::HighlyPopulated);
            }
            Preset::Bursty => {
                e.stimulation.push((names[1].clone(), day_label(2), Stimulation::Over));
                e.stimulation.push((names[0].clone(), day_label(2), Stimulation::Under));
                e.stimulation_elsewhere = Some(Stimulation::Normal);
            }
            Preset::Fast => {
                e.virality = Some(Virality::UnevenlyViral);
                e.influencer.insert(names[1].clone(), Influencer::Influencer);
                e.influencer.insert(names[0].clone(), Influencer::NonInfluencer);
            }
        }
        Ok(s)
    }
}

/// One planted verdict compared against an analysis result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub what: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

/// Compares a report against the planted expectations. Perspectives that
/// did not run produce failing checks.
pub fn check(expect: &Expectations, report: &Report) -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |what: String, expected: String, observed: Option<String>| {
        let observed = observed.unwrap_or_else(|| "missing".into());
        out.push(Check {
            pass: expected == observed,
            what,
            expected,
            observed,
        });
    };
    let ran = |p: Perspective| match report.entry(p) {
        Entry::Ran { result, .. } => Some(result),
        Entry::NotRun => None,
    };
    if let Some(v) = expect.distribution {
        let got = match ran(Perspective::Statistical) {
            Some(PerspectiveOutput::Statistical(s)) => Some(s.verdict.to_string()),
            _ => None,
        };
        push("statistical".into(), v.to_string(), got);
    }
    let network = match ran(Perspective::Network) {
        Some(PerspectiveOutput::Network(n)) => Some(n),
        _ => None,
    };
    for (name, v) in &expect.ecosystem {
        let got = network.and_then(|n| n.global.stages.iter().find(|s| &s.name == name)).map(|s| s.verdict.to_string());
        push(format!("network stage {name}"), v.to_string(), got);
    }
    if let Some(v) = expect.behaviour {
        push("network groups".into(), v.to_string(), network.map(|n| n.node.verdict.to_string()));
    }
    for (name, v) in &expect.stability {
        let got = match ran(Perspective::Robustness) {
            Some(PerspectiveOutput::Robustness(r)) => {
                r.groups.iter().find(|g| &g.name == name).map(|g| g.verdict.to_string())
            }
            _ => None,
        };
        push(format!("robustness {name}"), v.to_string(), got);
    }
    if let Some(v) = expect.influence {
        let got = match ran(Perspective::Influence) {
            Some(PerspectiveOutput::Influence(i)) => Some(i.verdict.to_string()),
            _ => None,
        };
        push("influence".into(), v.to_string(), got);
    }
    let structure = match ran(Perspective::Structure) {
        Some(PerspectiveOutput::Structure(s)) => Some(s),
        _ => None,
    };
    for (name, v) in &expect.core {
        let got = structure.and_then(|s| {
            let g = s.groups.iter().position(|n| n == name)?;
            s.core_verdicts().map(|c| c[g].to_string())
        });
        push(format!("core {name}"), v.to_string(), got);
    }
    if let Some(v) = expect.all_shells {
        let got = structure.map(|s| {
            s.shells
                .iter()
                .flat_map(|row| row.verdicts.iter().map(move |x| (row.k, x)))
                .find(|(_, x)| **x != v)
                .map_or_else(|| v.to_string(), |(k, x)| format!("{x} in shell {k}"))
        });
        push("every shell".into(), v.to_string(), got);
    }
    let temporal = match ran(Perspective::Temporal) {
        Some(PerspectiveOutput::Temporal(t)) => Some(t),
        _ => None,
    };
    for (name, label, v) in &expect.stimulation {
        let got = temporal.and_then(|t| {
            let g = t.groups.iter().position(|n| n == name)?;
            let b = t.buckets.iter().find(|b| &b.label == label)?;
            b.verdicts[g].map(|x| x.to_string())
        });
        push(format!("temporal {name} {label}"), v.to_string(), got);
    }
    if let Some(v) = expect.stimulation_elsewhere {
        let got = temporal.map(|t| {
            let mut off = Vec::new();
            for b in &t.buckets {
                for (g, x) in b.verdicts.iter().enumerate() {
                    let listed = expect.stimulation.iter().any(|(n, l, _)| n == &t.groups[g] && l == &b.label);
                    if !listed && *x != Some(v) {
                        off.push(format!("{} {}", t.groups[g], b.label));
                    }
                }
            }
            if off.is_empty() {
                v.to_string()
            } else {
                format!("off at {}", off.join(", "))
            }
        });
        push("temporal elsewhere".into(), v.to_string(), got);
    }
    let virality = match ran(Perspective::Virality) {
        Some(PerspectiveOutput::Virality(v)) => Some(v),
        _ => None,
    };
    if let Some(v) = expect.discussion {
        let got = virality.and_then(|x| x.topics.as_ref()).map(|t| t.verdict.to_string());
        push("topics".into(), v.to_string(), got);
    }
    if let Some(v) = expect.virality {
        push("virality".into(), v.to_string(), virality.map(|x| x.virality.verdict.to_string()));
    }
    for (name, v) in &expect.influencer {
        let got = virality
            .and_then(|x| x.virality.groups.iter().find(|g| &g.name == name))
            .and_then(|g| g.influencer)
            .map(|i| i.to_string());
        push(format!("influencer {name}"), v.to_string(), got);
    }
    out
}
