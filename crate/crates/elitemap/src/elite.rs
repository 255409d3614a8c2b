//! Elite user extraction from tweet engagement records.
//!
//! A tweet's popularity score is `likes + replies + retweets` (retweets
//! counted including quotes). Users enter the elite set under one of three
//! criteria: at least one tweet at or above a score threshold, at least `k`
//! such tweets, or a cumulative score across all their tweets. Thresholds
//! are inclusive: a score exactly equal to the threshold qualifies.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io;

use chrono::DateTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EliteError {
    #[error("row {row}: {problem}")]
    Malformed { row: usize, problem: String },
    #[error("tweet {tweet_id}: unparseable timestamp `{raw}`")]
    BadTimestamp { tweet_id: String, raw: String },
    #[error("{0}")]
    Domain(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

/// One engagement row. `created_at` is kept verbatim (RFC 3339) and parsed
/// on demand so that records built in memory go through the same validation
/// as records read from disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub author: String,
    pub likes: u64,
    pub replies: u64,
    pub retweets: u64,
    pub language: String,
    pub created_at: String,
}

impl TweetRecord {
    /// Calendar month of `created_at` as `YYYY-MM` (no timezone conversion).
    pub fn month(&self) -> Result<String, EliteError> {
        let dt = DateTime::parse_from_rfc3339(&self.created_at).map_err(|_| {
            EliteError::BadTimestamp {
                tweet_id: self.tweet_id.clone(),
                raw: self.created_at.clone(),
            }
        })?;
        Ok(dt.format("%Y-%m").to_string())
    }
}

/// Sum of likes, replies, and retweets (retweets including quotes).
pub fn popularity_score(t: &TweetRecord) -> u64 {
    t.likes + t.replies + t.retweets
}

/// Rule mapping tweet records to an elite user set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EliteCriterion {
    /// At least one tweet with popularity score >= threshold.
    SingleTweetThreshold(u64),
    /// At least `min_count` tweets with popularity score >= threshold.
    MinCountAtThreshold { min_count: usize, threshold: u64 },
    /// Summed popularity score across all tweets >= threshold.
    CumulativeThreshold(u64),
}

impl EliteCriterion {
    pub fn validate(&self) -> Result<(), EliteError> {
        let ok = match *self {
            EliteCriterion::SingleTweetThreshold(t) => t > 0,
            EliteCriterion::MinCountAtThreshold { min_count, threshold } => {
                min_count >= 1 && threshold > 0
            }
            EliteCriterion::CumulativeThreshold(c) => c > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(EliteError::Domain(format!("invalid criterion {self:?}")))
        }
    }

    /// Short identifier used in file names and sweep reports.
    pub fn id(&self) -> String {
        match *self {
            EliteCriterion::SingleTweetThreshold(t) => format!("single-{t}"),
            EliteCriterion::MinCountAtThreshold { min_count, threshold } => {
                format!("count{min_count}-{threshold}")
            }
            EliteCriterion::CumulativeThreshold(c) => format!("cumulative-{c}"),
        }
    }
}

/// Result of applying an [`EliteCriterion`] to a record set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EliteSelection {
    /// Elite author labels, sorted.
    pub authors: Vec<String>,
    /// Tweets that triggered inclusion, in input order. For the threshold
    /// variants these are the tweets at or above the threshold; for the
    /// cumulative variant, every tweet of an included author.
    pub qualifying_tweet_ids: Vec<String>,
}

impl EliteSelection {
    pub fn author_set(&self) -> BTreeSet<&str> {
        self.authors.iter().map(String::as_str).collect()
    }
}

/// Deduplicate by `tweet_id`, keeping the first occurrence.
fn dedup_records(records: &[TweetRecord]) -> Vec<&TweetRecord> {
    let mut seen = HashSet::new();
    records
        .iter()
        .filter(|r| seen.insert(r.tweet_id.as_str()))
        .collect()
}

/// Apply an elite criterion to a record set.
pub fn select_elites(
    records: &[TweetRecord],
    criterion: EliteCriterion,
) -> Result<EliteSelection, EliteError> {
    criterion.validate()?;
    if records.is_empty() {
        return Err(EliteError::Domain("empty record list".into()));
    }
    let records = dedup_records(records);

    let mut authors: BTreeSet<String> = BTreeSet::new();
    let mut qualifying: Vec<String> = Vec::new();
    match criterion {
        EliteCriterion::SingleTweetThreshold(threshold) => {
            for r in &records {
                if popularity_score(r) >= threshold {
                    authors.insert(r.author.clone());
                    qualifying.push(r.tweet_id.clone());
                }
            }
        }
        EliteCriterion::MinCountAtThreshold { min_count, threshold } => {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for r in &records {
                if popularity_score(r) >= threshold {
                    *counts.entry(r.author.as_str()).or_default() += 1;
                }
            }
            for (author, c) in &counts {
                if *c >= min_count {
                    authors.insert((*author).to_string());
                }
            }
            for r in &records {
                if popularity_score(r) >= threshold && authors.contains(r.author.as_str()) {
                    qualifying.push(r.tweet_id.clone());
                }
            }
        }
        EliteCriterion::CumulativeThreshold(cutoff) => {
            let mut totals: HashMap<&str, u64> = HashMap::new();
            for r in &records {
                *totals.entry(r.author.as_str()).or_default() += popularity_score(r);
            }
            for (author, total) in &totals {
                if *total >= cutoff {
                    authors.insert((*author).to_string());
                }
            }
            for r in &records {
                if authors.contains(r.author.as_str()) {
                    qualifying.push(r.tweet_id.clone());
                }
            }
        }
    }

    Ok(EliteSelection {
        authors: authors.into_iter().collect(),
        qualifying_tweet_ids: qualifying,
    })
}

/// Count qualifying tweets per calendar month (`YYYY-MM` keys).
pub fn monthly_counts(
    records: &[TweetRecord],
    qualifying_ids: &[String],
) -> Result<BTreeMap<String, usize>, EliteError> {
    let wanted: HashSet<&str> = qualifying_ids.iter().map(String::as_str).collect();
    let mut counts = BTreeMap::new();
    for r in dedup_records(records) {
        if wanted.contains(r.tweet_id.as_str()) {
            *counts.entry(r.month()?).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Authors ranked by number of qualifying tweets, descending; ties broken
/// lexicographically by author label.
pub fn author_tweet_leaderboard(
    records: &[TweetRecord],
    selection: &EliteSelection,
    top_n: usize,
) -> Vec<(String, usize)> {
    let qualifying: HashSet<&str> = selection
        .qualifying_tweet_ids
        .iter()
        .map(String::as_str)
        .collect();
    let elite: HashSet<&str> = selection.authors.iter().map(String::as_str).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in dedup_records(records) {
        if qualifying.contains(r.tweet_id.as_str()) && elite.contains(r.author.as_str()) {
            *counts.entry(r.author.as_str()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, usize)> = counts
        .into_iter()
        .map(|(a, c)| (a.to_string(), c))
        .collect();
    // BTreeMap iteration is lexicographic, so a stable sort by count gives
    // the documented tie-break for free.
    ranked.sort_by(|a, b| b.1.cmp(&a.1));
    ranked.truncate(top_n);
    ranked
}

/// Read records from CSV with header
/// `tweet_id,author,likes,replies,retweets,language,created_at`.
///
/// Counts must be non-negative integers and timestamps RFC 3339; violations
/// are reported with their 1-based row number.
pub fn read_records_csv<R: io::Read>(reader: R) -> Result<Vec<TweetRecord>, EliteError> {
    const HEADER: [&str; 7] = [
        "tweet_id",
        "author",
        "likes",
        "replies",
        "retweets",
        "language",
        "created_at",
    ];
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    {
        let headers = rdr.headers()?;
        let got: Vec<&str> = headers.iter().map(str::trim).collect();
        if got != HEADER {
            return Err(EliteError::Malformed {
                row: 1,
                problem: format!(
                    "expected header `{}`, got `{}`",
                    HEADER.join(","),
                    got.join(",")
                ),
            });
        }
    }
    let mut out = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 2;
        if record.len() != 7 {
            return Err(EliteError::Malformed {
                row,
                problem: format!("expected 7 fields, got {}", record.len()),
            });
        }
        let count = |idx: usize, name: &str| -> Result<u64, EliteError> {
            record[idx].trim().parse().map_err(|_| EliteError::Malformed {
                row,
                problem: format!("{name} is not a non-negative integer: `{}`", &record[idx]),
            })
        };
        let rec = TweetRecord {
            tweet_id: record[0].trim().to_string(),
            author: record[1].trim().to_string(),
            likes: count(2, "likes")?,
            replies: count(3, "replies")?,
            retweets: count(4, "retweets")?,
            language: record[5].trim().to_string(),
            created_at: record[6].trim().to_string(),
        };
        if rec.tweet_id.is_empty() || rec.author.is_empty() {
            return Err(EliteError::Malformed {
                row,
                problem: "empty tweet_id or author".into(),
            });
        }
        if DateTime::parse_from_rfc3339(&rec.created_at).is_err() {
            return Err(EliteError::Malformed {
                row,
                problem: format!("created_at is not RFC 3339: `{}`", rec.created_at),
            });
        }
        out.push(rec);
    }
    Ok(out)
}
