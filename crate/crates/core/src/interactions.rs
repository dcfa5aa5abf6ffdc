//! Interaction records and dataset loading.
//!
//! An interaction is one retweet: `retweeter` shared a tweet authored by
//! `retweeted`. Datasets are read from NDJSON or CSV, validated row by row,
//! and kept immutable afterwards.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque user identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UserId(String);

impl UserId {
    pub fn new(id: impl Into<String>) -> Self {
        UserId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for UserId {
    fn from(s: &str) -> Self {
        UserId(s.to_owned())
    }
}

impl From<String> for UserId {
    fn from(s: String) -> Self {
        UserId(s)
    }
}

impl std::borrow::Borrow<str> for UserId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Opaque tweet identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TweetId(String);

impl TweetId {
    pub fn new(id: impl Into<String>) -> Self {
        TweetId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TweetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TweetId {
    fn from(s: &str) -> Self {
        TweetId(s.to_owned())
    }
}

impl From<String> for TweetId {
    fn from(s: String) -> Self {
        TweetId(s)
    }
}

/// One retweet event. `timestamp` is UTC epoch seconds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interaction {
    pub retweeter: UserId,
    pub retweeted: UserId,
    pub tweet: TweetId,
    pub topics: Vec<String>,
    pub timestamp: i64,
}

impl Interaction {
    /// Builds an interaction, normalizing the topic list.
    pub fn new<I, S>(
        retweeter: impl Into<UserId>,
        retweeted: impl Into<UserId>,
        tweet: impl Into<TweetId>,
        topics: I,
        timestamp: i64,
    ) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Interaction {
            retweeter: retweeter.into(),
            retweeted: retweeted.into(),
            tweet: tweet.into(),
            topics: normalize_topics(topics),
            timestamp,
        }
    }
}

/// Lowercases, strips one leading `#`, drops empties and duplicates while
/// keeping first-seen order.
pub fn normalize_topics<I, S>(topics: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out: Vec<String> = Vec::new();
    for raw in topics {
        let t = raw.as_ref().trim();
        let t = t.strip_prefix('#').unwrap_or(t).trim().to_lowercase();
        if !t.is_empty() && !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// Parses an ISO-8601 instant (offset optional, UTC assumed) or integer
/// epoch seconds.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(secs) = s.parse::<i64>() {
        return Some(secs);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Some(d.and_hms_opt(0, 0, 0)?.and_utc().timestamp());
    }
    None
}

/// RFC 3339 rendering with second precision and a `Z` suffix.
pub fn format_timestamp(ts: i64) -> String {
    match DateTime::<Utc>::from_timestamp(ts, 0) {
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::Secs, true),
        None => ts.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Ndjson,
    Csv,
}

impl DatasetFormat {
    /// Guesses the format from the file extension, defaulting to NDJSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => DatasetFormat::Csv,
            _ => DatasetFormat::Ndjson,
        }
    }
}

/// What to do with a malformed row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OnError {
    #[default]
    Skip,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionDataset {
    pub interactions: Vec<Interaction>,
    pub window_start: i64,
    pub window_end: i64,
    pub source_path: String,
    pub dropped_count: usize,
}

impl InteractionDataset {
    /// Wraps in-memory interactions; the window spans their timestamps.
    pub fn from_interactions(interactions: Vec<Interaction>) -> Self {
        let (start, end) = time_span(&interactions).unwrap_or((0, 0));
        InteractionDataset {
            interactions,
            window_start: start,
            window_end: end,
            source_path: String::new(),
            dropped_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.interactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interactions.is_empty()
    }

    /// Every user appearing on either side of an interaction.
    pub fn users(&self) -> BTreeSet<UserId> {
        let mut users = BTreeSet::new();
        for t in &self.interactions {
            users.insert(t.retweeter.clone());
            users.insert(t.retweeted.clone());
        }
        users
    }

    pub fn write_ndjson(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for t in &self.interactions {
            let rec = RecordOut {
                retweeter: t.retweeter.as_str(),
                retweeted: t.retweeted.as_str(),
                tweet: t.tweet.as_str(),
                topics: &t.topics,
                timestamp: format_timestamp(t.timestamp),
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(FIELDS)?;
        for t in &self.interactions {
            w.write_record([
                t.retweeter.as_str(),
                t.retweeted.as_str(),
                t.tweet.as_str(),
                &t.topics.join(";"),
                &format_timestamp(t.timestamp),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn time_span(interactions: &[Interaction]) -> Option<(i64, i64)> {
    let min = interactions.iter().map(|t| t.timestamp).min()?;
    let max = interactions.iter().map(|t| t.timestamp).max()?;
    Some((min, max))
}

const FIELDS: [&str; 5] = ["retweeter", "retweeted", "tweet", "topics", "timestamp"];

#[derive(Serialize)]
struct RecordOut<'a> {
    retweeter: &'a str,
    retweeted: &'a str,
    tweet: &'a str,
    topics: &'a [String],
    timestamp: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    retweeter: String,
    retweeted: String,
    tweet: serde_json::Value,
    topics: Vec<String>,
    timestamp: serde_json::Value,
}

fn validate(
    retweeter: String,
    retweeted: String,
    tweet: String,
    topics: Vec<String>,
    timestamp: Option<i64>,
) -> std::result::Result<Interaction, String> {
    if retweeter.trim().is_empty() {
        return Err("empty retweeter".into());
    }
    if retweeted.trim().is_empty() {
        return Err("empty retweeted".into());
    }
    if tweet.trim().is_empty() {
        return Err("empty tweet id".into());
    }
    let timestamp = timestamp.ok_or_else(|| "missing or invalid timestamp".to_string())?;
    Ok(Interaction {
        retweeter: UserId(retweeter),
        retweeted: UserId(retweeted),
        tweet: TweetId(tweet),
        topics: normalize_topics(topics),
        timestamp,
    })
}

fn parse_ndjson_line(line: &str) -> std::result::Result<Interaction, String> {
    let rec: RecordIn = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let tweet = match rec.tweet {
        serde_json::Value::String(s) => s,
        serde_json::Value::Number(n) => n.to_string(),
        other => return Err(format!("tweet id must be a string, got {other}")),
    };
    let timestamp = match &rec.timestamp {
        serde_json::Value::String(s) => parse_timestamp(s),
        serde_json::Value::Number(n) => n.as_i64(),
        _ => None,
    };
    validate(rec.retweeter, rec.retweeted, tweet, rec.topics, timestamp)
}

/// Loads an interaction file. Rows are numbered from 1: NDJSON by line,
/// CSV by data record (the header is not counted).
pub fn load_dataset(
    path: impl AsRef<Path>,
    format: DatasetFormat,
    on_error: OnError,
) -> Result<InteractionDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut interactions = Vec::new();
    let mut dropped = 0usize;
    let mut reject = |row: usize, reason: String| -> Result<()> {
        match on_error {
            OnError::Fail => Err(Error::Parse { row, reason }),
            OnError::Skip => {
                dropped += 1;
                Ok(())
            }
        }
    };

    match format {
        DatasetFormat::Ndjson => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match parse_ndjson_line(&line) {
                    Ok(t) => interactions.push(t),
                    Err(reason) => reject(i + 1, reason)?,
                }
            }
        }
        DatasetFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
            let headers = reader.headers()?.clone();
            let mut columns = [0usize; 5];
            for (slot, name) in columns.iter_mut().zip(FIELDS) {
                *slot = headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
                    Error::Parse {
                        row: 0,
                        reason: format!("header lacks column `{name}`"),
                    }
                })?;
            }
            if headers.len() != FIELDS.len() {
                return Err(Error::Parse {
                    row: 0,
                    reason: format!("expected exactly {} columns", FIELDS.len()),
                });
            }
            for (i, record) in reader.records().enumerate() {
                let row = i + 1;
                let record = match record {
                    Ok(r) => r,
                    Err(e) => {
                        reject(row, e.to_string())?;
                        continue;
                    }
                };
                let field = |k: usize| record.get(columns[k]).unwrap_or("").to_owned();
                let topics: Vec<String> = field(3).split(';').map(str::to_owned).collect();
                let parsed = validate(
                    field(0),
                    field(1),
                    field(2),
                    topics,
                    parse_timestamp(&field(4)),
                );
                match parsed {
                    Ok(t) => interactions.push(t),
                    Err(reason) => reject(row, reason)?,
                }
            }
        }
    }

    if interactions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let (window_start, window_end) = time_span(&interactions).expect("non-empty");
    Ok(InteractionDataset {
        interactions,
        window_start,
        window_end,
        source_path: path.display().to_string(),
        dropped_count: dropped,
    })
}

/// Draws `floor(fraction * n)` interactions uniformly without replacement.
///
/// Interactions are first put in canonical order (timestamp, tweet,
/// retweeter, retweeted) so that the draw depends only on the dataset's
/// content and the seed, never on file row order. The sample is returned in
/// canonical order and keeps the parent's time window.
pub fn sample_dataset(
    ds: &InteractionDataset,
    fraction: f64,
    seed: u64,
) -> Result<InteractionDataset> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    if fraction == 1.0 {
        return Ok(ds.clone());
    }
    let n = ds.interactions.len();
    let mut canonical: Vec<usize> = (0..n).collect();
    canonical.sort_by(|&a, &b| {
        let (x, y) = (&ds.interactions[a], &ds.interactions[b]);
        (x.timestamp, &x.tweet, &x.retweeter, &x.retweeted, &x.topics)
            .cmp(&(y.timestamp, &y.tweet, &y.retweeter, &y.retweeted, &y.topics))
    });
    let take = ((fraction * n as f64) + 1e-9).floor() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, n, take.min(n)).into_vec();
    picked.sort_unstable();
    let interactions = picked
        .into_iter()
        .map(|i| ds.interactions[canonical[i]].clone())
        .collect();
    Ok(InteractionDataset {
        interactions,
        window_start: ds.window_start,
        window_end: ds.window_end,
        source_path: ds.source_path.clone(),
        dropped_count: ds.dropped_count,
    })
}
