//! User categorization and group assignment.
//!
//! A [`ScoreSource`] yields either a numeric score in `[0, 1]` or a label
//! for each user. Labels become groups directly (one per distinct label, in
//! lexicographic order). Scores are split into groups either at explicit
//! thresholds or at empirical percentiles of the available scores.
//!
//! Percentile cut points use the nearest-rank rule: for cumulative fraction
//! `F` over `m` sorted scores `s`, the cut is `s[round(F * m)]`, the first
//! score that belongs to the next group. A user whose score equals a cut
//! point joins the higher group, so tied scores never straddle a boundary.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::interactions::UserId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryValue {
    Score(f64),
    Label(String),
}

/// Outcome of categorizing one user; `value` is `None` when the source had
/// nothing for them.
#[derive(Debug, Clone, PartialEq)]
pub struct CategorizationResult {
    pub user: UserId,
    pub value: Option<CategoryValue>,
}

impl CategorizationResult {
    pub fn is_available(&self) -> bool {
        self.value.is_some()
    }
}

/// Anything that can categorize users.
pub trait ScoreSource {
    /// One entry per requested user, in request order.
    fn lookup(&self, users: &[UserId]) -> Result<Vec<Option<CategoryValue>>>;
}

/// Categorizes each distinct user once, in sorted order.
pub fn categorize<'a, I>(users: I, source: &dyn ScoreSource) -> Result<Vec<CategorizationResult>>
where
    I: IntoIterator<Item = &'a UserId>,
{
    let users: Vec<UserId> = users.into_iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let values = source.lookup(&users)?;
    assert_eq!(values.len(), users.len(), "score source returned the wrong number of results");
    users
        .into_iter()
        .zip(values)
        .map(|(user, value)| {
            if let Some(CategoryValue::Score(s)) = value {
                if !(0.0..=1.0).contains(&s) {
                    return Err(Error::MalformedScore {
                        user: user.to_string(),
                        value: s,
                    });
                }
            }
            Ok(CategorizationResult { user, value })
        })
        .collect()
}

/// Same score for everybody.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource(pub f64);

impl ScoreSource for ConstantSource {
    fn lookup(&self, users: &[UserId]) -> Result<Vec<Option<CategoryValue>>> {
        Ok(vec![Some(CategoryValue::Score(self.0)); users.len()])
    }
}

/// Scores read from a `user,score` CSV or `{"user":..,"score":..}` NDJSON
/// file. Non-numeric values are treated as labels.
#[derive(Debug, Clone, Default)]
pub struct ScoreFile {
    values: HashMap<UserId, CategoryValue>,
}

impl ScoreFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let is_csv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut values = HashMap::new();
        if is_csv {
            let mut reader = csv::Reader::from_reader(file);
            let headers = reader.headers()?.clone();
            let col = |name: &str| {
                headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::Parse {
                    row: 0,
                    reason: format!("score file header lacks `{name}`"),
                })
            };
            let (ucol, scol) = (col("user")?, col("score")?);
            for (i, rec) in reader.records().enumerate() {
                let rec = rec?;
                let user = rec.get(ucol).unwrap_or("").trim();
                let raw = rec.get(scol).unwrap_or("").trim();
                if user.is_empty() {
                    return Err(Error::Parse {
                        row: i + 1,
                        reason: "empty user".into(),
                    });
                }
                if raw.is_empty() {
                    continue;
                }
                let value = match raw.parse::<f64>() {
                    Ok(s) => CategoryValue::Score(s),
                    Err(_) => CategoryValue::Label(raw.to_owned()),
                };
                values.insert(UserId::from(user), value);
            }
        } else {
            #[derive(Deserialize)]
            struct Row {
                user: String,
                score: Option<CategoryValue>,
            }
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let row: Row = serde_json::from_str(&line).map_err(|e| Error::Parse {
                    row: i + 1,
                    reason: e.to_string(),
                })?;
                if let Some(v) = row.score {
                    values.insert(UserId::from(row.user), v);
                }
            }
        }
        Ok(ScoreFile { values })
    }

    pub fn from_scores<I, U>(scores: I) -> Self
    where
        I: IntoIterator<Item = (U, f64)>,
        U: Into<UserId>,
    {
        ScoreFile {
            values: scores
                .into_iter()
                .map(|(u, s)| (u.into(), CategoryValue::Score(s)))
                .collect(),
        }
    }

    pub fn from_labels<I, U, L>(labels: I) -> Self
    where
        I: IntoIterator<Item = (U, L)>,
        U: Into<UserId>,
        L: Into<String>,
    {
        ScoreFile {
            values: labels
                .into_iter()
                .map(|(u, l)| (u.into(), CategoryValue::Label(l.into())))
                .collect(),
        }
    }
}

impl ScoreSource for ScoreFile {
    fn lookup(&self, users: &[UserId]) -> Result<Vec<Option<CategoryValue>>> {
        Ok(users.iter().map(|u| self.values.get(u).cloned()).collect())
    }
}

/// Generic HTTP scorer: `GET {base_url}/{user}` answering `{"score": x}`.
///
/// 404 means the user is unavailable. 5xx and transport failures are
/// retried with exponential backoff. Responses (including 404s) are cached
/// on disk, one file per user, when `cache_dir` is set.
#[derive(Debug, Clone)]
pub struct HttpSource {
    pub base_url: String,
    pub token: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub parallelism: usize,
    pub max_retries: u32,
    pub backoff: Duration,
    pub timeout: Duration,
}

impl HttpSource {
    pub fn new(base_url: impl Into<String>) -> Self {
        HttpSource {
            base_url: base_url.into(),
            token: None,
            cache_dir: None,
            parallelism: 4,
            max_retries: 3,
            backoff: Duration::from_millis(200),
            timeout: Duration::from_secs(10),
        }
    }

    /// Reads the bearer token from the named environment variable.
    pub fn with_token_env(mut self, var: &str) -> Self {
        self.token = std::env::var(var).ok().filter(|t| !t.is_empty());
        self
    }

    fn cache_path(&self, user: &UserId) -> Option<PathBuf> {
        let hex: String = user.as_str().bytes().map(|b| format!("{b:02x}")).collect();
        self.cache_dir.as_ref().map(|d| d.join(format!("{hex}.json")))
    }

    fn fetch(&self, agent: &ureq::Agent, user: &UserId) -> Result<Option<CategoryValue>> {
        if let Some(p) = self.cache_path(user) {
            if let Ok(body) = std::fs::read_to_string(&p) {
                return parse_score_body(&body, user);
            }
        }
        let url = format!("{}/{}", self.base_url.trim_end_matches('/'), percent_encode(user.as_str()));
        let mut attempt = 0;
        let body = loop {
            let mut req = agent.get(&url);
            if let Some(t) = &self.token {
                req = req.header("Authorization", &format!("Bearer {t}"));
            }
            let failure = match req.call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    match status {
                        200..=299 => {
                            break resp
                                .body_mut()
                                .read_to_string()
                                .map_err(|e| Error::SourceUnreachable(format!("{url}: {e}")))?;
                        }
                        404 => break "{\"score\":null}".to_owned(),
                        500..=599 | 429 => format!("{url}: HTTP {status}"),
                        _ => return Err(Error::SourceUnreachable(format!("{url}: HTTP {status}"))),
                    }
                }
                Err(e) => format!("{url}: {e}"),
            };
            if attempt >= self.max_retries {
                return Err(Error::SourceUnreachable(failure));
            }
            std::thread::sleep(self.backoff * 2u32.pow(attempt));
            attempt += 1;
        };
        let value = parse_score_body(&body, user)?;
        if let Some(p) = self.cache_path(user) {
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(&p, &body).map_err(|e| Error::io(&p, e))?;
        }
        Ok(value)
    }
}

fn parse_score_body(body: &str, user: &UserId) -> Result<Option<CategoryValue>> {
    #[derive(Deserialize)]
    struct Body {
        score: Option<CategoryValue>,
    }
    serde_json::from_str::<Body>(body)
        .map(|b| b.score)
        .map_err(|e| Error::SourceUnreachable(format!("bad response for `{user}`: {e}")))
}

fn percent_encode(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

impl ScoreSource for HttpSource {
    fn lookup(&self, users: &[UserId]) -> Result<Vec<Option<CategoryValue>>> {
        use rayon::prelude::*;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.parallelism.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        pool.install(|| users.par_iter().map(|u| self.fetch(&agent, u)).collect())
    }
}

/// How scores are cut into groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Group shares, lowest scores first; must be positive and sum to 1.
    Percentiles(Vec<f64>),
    /// Strictly increasing cut points in `[0, 1]`; `k` cuts make `k + 1` groups.
    Thresholds(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupingSpec {
    pub rule: SplitRule,
    /// Optional group names, lowest scores first.
    #[serde(default)]
    pub names: Vec<String>,
}

impl GroupingSpec {
    pub fn percentiles(fractions: impl Into<Vec<f64>>) -> Self {
        GroupingSpec {
            rule: SplitRule::Percentiles(fractions.into()),
            names: Vec::new(),
        }
    }

    pub fn thresholds(cuts: impl Into<Vec<f64>>) -> Self {
        GroupingSpec {
            rule: SplitRule::Thresholds(cuts.into()),
            names: Vec::new(),
        }
    }

    pub fn named<S: Into<String>>(mut self, names: impl IntoIterator<Item = S>) -> Self {
        self.names = names.into_iter().map(Into::into).collect();
        self
    }

    /// The 70/20/10 botscore split: Likely Humans, Likely Semi-Bots,
    /// Likely Bots.
    pub fn likely_automation() -> Self {
        Self::percentiles([0.7, 0.2, 0.1]).named(["Likely Humans", "Likely Semi-Bots", "Likely Bots"])
    }

    fn group_count(&self) -> usize {
        match &self.rule {
            SplitRule::Percentiles(f) => f.len(),
            SplitRule::Thresholds(c) => c.len() + 1,
        }
    }

    fn validate(&self) -> Result<()> {
        match &self.rule {
            SplitRule::Percentiles(f) => {
                if f.is_empty() || f.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(Error::InvalidSpec("fractions must be positive".into()));
                }
                let sum: f64 = f.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpec(format!("fractions sum to {sum}, not 1")));
                }
            }
            SplitRule::Thresholds(c) => {
                if c.iter().any(|x| !(0.0..=1.0).contains(x)) {
                    return Err(Error::InvalidSpec("thresholds must lie in [0, 1]".into()));
                }
                if c.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidSpec("thresholds must be strictly increasing".into()));
                }
            }
        }
        if !self.names.is_empty() && self.names.len() != self.group_count() {
            return Err(Error::InvalidSpec(format!(
                "{} names given for {} groups",
                self.names.len(),
                self.group_count()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupInfo {
    pub name: String,
    /// `[lo, hi)` score range; the last group's range is closed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub score_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub size: usize,
}

/// Users partitioned into groups, plus those the source could not
/// categorize (`None` membership).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAssignment {
    pub groups: Vec<GroupInfo>,
    pub membership: BTreeMap<UserId, Option<usize>>,
    /// Raw scores, kept for score-binned views.
    pub scores: BTreeMap<UserId, f64>,
    /// `|N_g|` over categorized users.
    pub fractions: Vec<f64>,
    /// Cut points between consecutive groups; `None` when no user reaches
    /// the upper group.
    pub thresholds: Vec<Option<f64>>,
    pub unknown: usize,
}

impl GroupAssignment {
    /// Writes `user,score,group` rows; unknown users get empty fields.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["user", "score", "group"])?;
        for (user, g) in &self.membership {
            let score = self.scores.get(user).map(|s| s.to_string()).unwrap_or_default();
            let group = g.map(|g| self.groups[g].name.clone()).unwrap_or_default();
            w.write_record([user.as_str(), score.as_str(), group.as_str()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Builds an assignment from explicit memberships; useful when groups
    /// are known up front.
    pub fn from_membership<I, U, S>(names: impl IntoIterator<Item = S>, members: I) -> Self
    where
        I: IntoIterator<Item = (U, Option<usize>)>,
        U: Into<UserId>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let membership: BTreeMap<UserId, Option<usize>> =
            members.into_iter().map(|(u, g)| (u.into(), g)).collect();
        Self::assemble(names, membership, BTreeMap::new(), Vec::new(), None)
    }

    fn assemble(
        names: Vec<String>,
        membership: BTreeMap<UserId, Option<usize>>,
        scores: BTreeMap<UserId, f64>,
        thresholds: Vec<Option<f64>>,
        labels: Option<Vec<String>>,
    ) -> Self {
        let mut sizes = vec![0usize; names.len()];
        let mut unknown = 0;
        for g in membership.values() {
            match g {
                Some(g) => sizes[*g] += 1,
                None => unknown += 1,
            }
        }
        let categorized: usize = sizes.iter().sum();
        let fractions = sizes
            .iter()
            .map(|&s| if categorized == 0 { 0.0 } else { s as f64 / categorized as f64 })
            .collect();
        let n = names.len();
        let groups = names
            .into_iter()
            .enumerate()
            .map(|(g, name)| GroupInfo {
                score_range: if thresholds.len() + 1 == n && labels.is_none() && !scores.is_empty() {
                    let lo = if g == 0 { 0.0 } else { thresholds[g - 1].unwrap_or(1.0) };
                    let hi = if g + 1 == n { 1.0 } else { thresholds[g].unwrap_or(1.0) };
                    Some([lo, hi])
                } else {
                    None
                },
                label: labels.as_ref().map(|l| l[g].clone()),
                name,
                size: sizes[g],
            })
            .collect();
        GroupAssignment {
            groups,
            membership,
            scores,
            fractions,
            thresholds,
            unknown,
        }
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.size).collect()
    }

    pub fn categorized(&self) -> usize {
        self.groups.iter().map(|g| g.size).sum()
    }

    pub fn group_of(&self, user: &str) -> Option<usize> {
        self.membership.get(user).copied().flatten()
    }

    pub fn score_of(&self, user: &str) -> Option<f64> {
        self.scores.get(user).copied()
    }

    pub fn members(&self, group: usize) -> impl Iterator<Item = &UserId> + '_ {
        self.membership
            .iter()
            .filter(move |(_, g)| **g == Some(group))
            .map(|(u, _)| u)
    }

    pub fn name(&self, group: usize) -> &str {
        &self.groups[group].name
    }

    /// Group of every graph node, in node index order.
    pub fn node_groups(&self, g: &SocialGraph) -> Vec<Option<usize>> {
        g.users().iter().map(|u| self.group_of(u.as_str())).collect()
    }

    /// Raw score of every graph node, in node index order.
    pub fn node_scores(&self, g: &SocialGraph) -> Vec<Option<f64>> {
        g.users().iter().map(|u| self.score_of(u.as_str())).collect()
    }
}

/// Maps categorization results to groups.
pub fn assign_groups(results: &[CategorizationResult], spec: &GroupingSpec) -> Result<GroupAssignment> {
    let labels: BTreeSet<&str> = results
        .iter()
        .filter_map(|r| match &r.value {
            Some(CategoryValue::Label(l)) => Some(l.as_str()),
            _ => None,
        })
        .collect();
    let has_scores = results.iter().any(|r| matches!(r.value, Some(CategoryValue::Score(_))));
    if !labels.is_empty() && has_scores {
        return Err(Error::InvalidSpec("source mixes labels and scores".into()));
    }
    if labels.is_empty() && !has_scores {
        return Err(Error::NoScores);
    }

    if !labels.is_empty() {
        let names: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        let membership = results
            .iter()
            .map(|r| {
                let g = match &r.value {
                    Some(CategoryValue::Label(l)) => names.binary_search(l).ok(),
                    _ => None,
                };
                (r.user.clone(), g)
            })
            .collect();
        return Ok(GroupAssignment::assemble(
            names.clone(),
            membership,
            BTreeMap::new(),
            Vec::new(),
            Some(names),
        ));
    }

    spec.validate()?;
    let scores: BTreeMap<UserId, f64> = results
        .iter()
        .filter_map(|r| match r.value {
            Some(CategoryValue::Score(s)) => Some((r.user.clone(), s)),
            _ => None,
        })
        .collect();
    let thresholds: Vec<Option<f64>> = match &spec.rule {
        SplitRule::Thresholds(c) => c.iter().copied().map(Some).collect(),
        SplitRule::Percentiles(fractions) => {
            let mut sorted: Vec<f64> = scores.values().copied().collect();
            sorted.sort_by(f64::total_cmp);
            let m = sorted.len();
            let mut cumulative = 0.0;
            fractions[..fractions.len() - 1]
                .iter()
                .map(|f| {
                    cumulative += f;
                    let k = (cumulative * m as f64).round() as usize;
                    sorted.get(k).copied()
                })
                .collect()
        }
    };
    let group_for = |s: f64| {
        thresholds
            .iter()
            .take_while(|c| matches!(c, Some(c) if *c <= s))
            .count()
    };
    let membership = results
        .iter()
        .map(|r| {
            let g = match r.value {
                Some(CategoryValue::Score(s)) => Some(group_for(s)),
                _ => None,
            };
            (r.user.clone(), g)
        })
        .collect();
    let names = if spec.names.is_empty() {
        (1..=spec.group_count()).map(|i| format!("group {i}")).collect()
    } else {
        spec.names.clone()
    };
    Ok(GroupAssignment::assemble(names, membership, scores, thresholds, None))
}

/// Decile bin of a score, counting each user toward the nearest upper
/// decile: `(0, 0.1] -> 0`, ..., `(0.9, 1.0] -> 9`, with `0.0` in bin 0.
pub fn decile_bin(score: f64) -> usize {
    let b = (score * 10.0 - 1e-9).ceil() as i64 - 1;
    b.clamp(0, 9) as usize
}

/// Upper edge of a decile bin, as used for labelling.
pub fn decile_label(bin: usize) -> f64 {
    (bin + 1) as f64 / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scored(scores: &[(&str, f64)]) -> Vec<CategorizationResult> {
        categorize(
            &scores.iter().map(|(u, _)| UserId::from(*u)).collect::<Vec<_>>(),
            &ScoreFile::from_scores(scores.iter().map(|(u, s)| (*u, *s))),
        )
        .unwrap()
    }

    #[test]
    fn file_source_marks_missing_users_unavailable() {
        let src = ScoreFile::from_scores([("A", 0.1), ("B", 0.5)]);
        let users = [UserId::from("A"), UserId::from("B"), UserId::from("C")];
        let r = categorize(&users, &src).unwrap();
        assert_eq!(r[0].value, Some(CategoryValue::Score(0.1)));
        assert_eq!(r[1].value, Some(CategoryValue::Score(0.5)));
        assert!(!r[2].is_available());
    }

    #[test]
    fn constant_source_and_duplicates() {
        let users = [UserId::from("x"), UserId::from("y"), UserId::from("x")];
        let r = categorize(&users, &ConstantSource(0.0)).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|c| c.value == Some(CategoryValue::Score(0.0))));
    }

    #[test]
    fn out_of_range_score_is_malformed() {
        let src = ScoreFile::from_scores([("A", 1.7)]);
        assert!(matches!(
            categorize(&[UserId::from("A")], &src),
            Err(Error::MalformedScore { value, .. }) if value == 1.7
        ));
    }

    #[test]
    fn seventy_twenty_ten_on_ten_points() {
        let names: Vec<String> = (0..10).map(|i| format!("u{i}")).collect();
        let pairs: Vec<(&str, f64)> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i as f64 / 10.0)).collect();
        let a = assign_groups(&scored(&pairs), &GroupingSpec::likely_automation()).unwrap();
        assert_eq!(a.sizes(), vec![7, 2, 1]);
        assert_eq!(a.thresholds, vec![Some(0.7), Some(0.9)]);
        assert_eq!(a.group_of("u6"), Some(0));
        assert_eq!(a.group_of("u7"), Some(1));
        assert_eq!(a.group_of("u9"), Some(2));
        assert_eq!(a.groups[2].name, "Likely Bots");
        assert_eq!(a.groups[1].score_range, Some([0.7, 0.9]));
        let total: f64 = a.fractions.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_group_takes_everyone() {
        let r = scored(&[("a", 0.3), ("b", 0.9), ("c", 0.0)]);
        let a = assign_groups(&r, &GroupingSpec::percentiles([1.0])).unwrap();
        assert_eq!(a.sizes(), vec![3]);
        assert!(a.thresholds.is_empty());
    }

    #[test]
    fn ties_at_a_cut_go_up() {
        let r = scored(&[("a", 0.1), ("b", 0.5), ("c", 0.5), ("d", 0.5)]);
        let a = assign_groups(&r, &GroupingSpec::percentiles([0.5, 0.5])).unwrap();
        // cut = s[2] = 0.5, so all three 0.5 scores land in the upper group
        assert_eq!(a.thresholds, vec![Some(0.5)]);
        assert_eq!(a.sizes(), vec![1, 3]);
    }

    #[test]
    fn explicit_thresholds_and_unknowns() {
        let mut r = scored(&[("a", 0.0), ("b", 0.19), ("c", 0.37), ("d", 1.0)]);
        r.push(CategorizationResult {
            user: UserId::from("e"),
            value: None,
        });
        let a = assign_groups(&r, &GroupingSpec::thresholds([0.19, 0.37])).unwrap();
        assert_eq!(a.sizes(), vec![1, 1, 2]);
        assert_eq!(a.unknown, 1);
        assert_eq!(a.categorized() + a.unknown, 5);
        assert_eq!(a.group_of("e"), None);
        assert_eq!(a.fractions, vec![0.25, 0.25, 0.5]);
    }

    #[test]
    fn labels_bypass_quantiles() {
        let src = ScoreFile::from_labels([("a", "right"), ("b", "left"), ("c", "left")]);
        let users: Vec<UserId> = ["a", "b", "c", "d"].into_iter().map(UserId::from).collect();
        let r = categorize(&users, &src).unwrap();
        let a = assign_groups(&r, &GroupingSpec::percentiles([0.5, 0.5])).unwrap();
        assert_eq!(a.groups.iter().map(|g| g.name.as_str()).collect::<Vec<_>>(), vec!["left", "right"]);
        assert_eq!(a.sizes(), vec![2, 1]);
        assert_eq!(a.unknown, 1);
    }

    #[test]
    fn invalid_specs() {
        let r = scored(&[("a", 0.5)]);
        for spec in [
            GroupingSpec::percentiles([0.5, 0.4]),
            GroupingSpec::percentiles([1.2, -0.2]),
            GroupingSpec::thresholds([0.5, 0.5]),
            GroupingSpec::thresholds([1.5]),
            GroupingSpec::percentiles([0.5, 0.5]).named(["only one"]),
        ] {
            assert!(matches!(assign_groups(&r, &spec), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
        let none = vec![CategorizationResult {
            user: UserId::from("a"),
            value: None,
        }];
        assert!(matches!(
            assign_groups(&none, &GroupingSpec::percentiles([1.0])),
            Err(Error::NoScores)
        ));
    }

    #[test]
    fn deciles() {
        assert_eq!(decile_bin(0.0), 0);
        assert_eq!(decile_bin(0.05), 0);
        assert_eq!(decile_bin(0.1), 0);
        assert_eq!(decile_bin(0.15), 1);
        assert_eq!(decile_bin(0.3), 2);
        assert_eq!(decile_bin(0.95), 9);
        assert_eq!(decile_bin(1.0), 9);
        assert_eq!(decile_label(decile_bin(0.15)), 0.2);
    }

    #[test]
    fn score_files_in_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("s.csv");
        std::fs::write(&csv, "user,score\na,0.25\nb,bot\nc,\n").unwrap();
        let f = ScoreFile::load(&csv).unwrap();
        let users: Vec<UserId> = ["a", "b", "c"].into_iter().map(UserId::from).collect();
        assert_eq!(
            f.lookup(&users).unwrap(),
            vec![Some(CategoryValue::Score(0.25)), Some(CategoryValue::Label("bot".into())), None]
        );
        let nd = dir.path().join("s.ndjson");
        std::fs::write(&nd, "{\"user\":\"a\",\"score\":0.5}\n{\"user\":\"b\",\"score\":null}\n").unwrap();
        let f = ScoreFile::load(&nd).unwrap();
        assert_eq!(f.lookup(&users).unwrap(), vec![Some(CategoryValue::Score(0.5)), None, None]);
        assert!(matches!(ScoreFile::load(dir.path().join("missing.csv")), Err(Error::FileNotFound(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn percentile_assignment_is_monotone(scores in prop::collection::vec(0u32..=20, 1..120)) {
                let names: Vec<String> = (0..scores.len()).map(|i| format!("u{i:03}")).collect();
                let pairs: Vec<(&str, f64)> = names.iter().zip(&scores).map(|(n, s)| (n.as_str(), *s as f64 / 20.0)).collect();
                let a = assign_groups(&scored(&pairs), &GroupingSpec::likely_automation()).unwrap();
                for (u, su) in &pairs {
                    for (v, sv) in &pairs {
                        if su <= sv {
                            prop_assert!(a.group_of(u) <= a.group_of(v));
                        }
                    }
                }
                let again = assign_groups(&scored(&pairs), &GroupingSpec::likely_automation()).unwrap();
                prop_assert_eq!(a, again);
            }
        }
    }
}
