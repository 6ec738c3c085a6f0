//! Corpus entities and their line-oriented file formats.
//!
//! Users, tweets and interactions are JSON lines; the follow graph is a
//! two-column CSV with header `followee_id,follower_id`. Unknown JSON fields
//! are ignored and a tweet's `label` may be absent.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::LoadError;

pub type Timestamp = DateTime<Utc>;

/// Abuse level of a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbuseLabel {
    Abusive,
    Hate,
    Spam,
    Normal,
}

impl AbuseLabel {
    /// Fixed class order, also used for tie-breaking.
    pub const ALL: [AbuseLabel; 4] = [
        AbuseLabel::Abusive,
        AbuseLabel::Hate,
        AbuseLabel::Spam,
        AbuseLabel::Normal,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AbuseLabel::Abusive => "abusive",
            AbuseLabel::Hate => "hate",
            AbuseLabel::Spam => "spam",
            AbuseLabel::Normal => "normal",
        }
    }

    /// Abusive and hate together form the offensive class.
    pub fn is_offensive(self) -> bool {
        matches!(self, AbuseLabel::Abusive | AbuseLabel::Hate)
    }
}

impl fmt::Display for AbuseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AbuseLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abusive" => Ok(AbuseLabel::Abusive),
            "hate" => Ok(AbuseLabel::Hate),
            "spam" => Ok(AbuseLabel::Spam),
            "normal" => Ok(AbuseLabel::Normal),
            other => Err(format!("unknown abuse label `{other}`")),
        }
    }
}

/// How a receiver responded to a message it was exposed to.
///
/// Variants are ordered by strength; `None` records an exposure without a
/// reaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reaction {
    None,
    Like,
    Reply,
    Quote,
    Retweet,
}

impl Reaction {
    pub const ALL: [Reaction; 5] = [
        Reaction::None,
        Reaction::Like,
        Reaction::Reply,
        Reaction::Quote,
        Reaction::Retweet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Reaction::None => "none",
            Reaction::Like => "like",
            Reaction::Reply => "reply",
            Reaction::Quote => "quote",
            Reaction::Retweet => "retweet",
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub followers_count: u64,
    pub friends_count: u64,
    pub verified: bool,
    pub has_profile_url: bool,
    pub has_description: bool,
    pub status_count: u64,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub author_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<AbuseLabel>,
    pub created_at: Timestamp,
    pub is_retweet: bool,
    pub retweet_count: u64,
    pub favorited_count: u64,
    pub quoted_status: bool,
    pub hashtags: u64,
    pub urls: u64,
    pub media: u64,
    pub mentions: u64,
}

/// `followee_id` is the spreading side, `follower_id` the receiving side.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FollowEdge {
    pub followee_id: String,
    pub follower_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub message_id: String,
    pub spreader_id: String,
    pub receiver_id: String,
    pub reaction: Reaction,
    pub timestamp: Timestamp,
}

const USER_FIELDS: &[&str] = &[
    "user_id",
    "followers_count",
    "friends_count",
    "verified",
    "has_profile_url",
    "has_description",
    "status_count",
    "created_at",
];

const TWEET_FIELDS: &[&str] = &[
    "tweet_id",
    "author_id",
    "text",
    "created_at",
    "is_retweet",
    "retweet_count",
    "favorited_count",
    "quoted_status",
    "hashtags",
    "urls",
    "media",
    "mentions",
];

const INTERACTION_FIELDS: &[&str] = &[
    "message_id",
    "spreader_id",
    "receiver_id",
    "reaction",
    "timestamp",
];

/// An immutable collection of users, tweets, follow edges and interactions.
#[derive(Debug, Clone)]
pub struct Corpus {
    users: Vec<UserRecord>,
    tweets: Vec<TweetRecord>,
    follows: Vec<FollowEdge>,
    interactions: Vec<InteractionEvent>,
    snapshot_time: Timestamp,
    user_index: HashMap<String, usize>,
    tweet_index: HashMap<String, usize>,
    follow_set: HashSet<(String, String)>,
}

impl Corpus {
    pub fn new(
        users: Vec<UserRecord>,
        tweets: Vec<TweetRecord>,
        follows: Vec<FollowEdge>,
        interactions: Vec<InteractionEvent>,
        snapshot_time: Timestamp,
    ) -> Self {
        let mut user_index = HashMap::with_capacity(users.len());
        for (i, u) in users.iter().enumerate() {
            user_index.entry(u.user_id.clone()).or_insert(i);
        }
        let mut tweet_index = HashMap::with_capacity(tweets.len());
        for (i, t) in tweets.iter().enumerate() {
            tweet_index.entry(t.tweet_id.clone()).or_insert(i);
        }
        let follow_set = follows
            .iter()
            .map(|f| (f.followee_id.clone(), f.follower_id.clone()))
            .collect();
        Self {
            users,
            tweets,
            follows,
            interactions,
            snapshot_time,
            user_index,
            tweet_index,
            follow_set,
        }
    }

    pub fn users(&self) -> &[UserRecord] {
        &self.users
    }

    pub fn tweets(&self) -> &[TweetRecord] {
        &self.tweets
    }

    pub fn follows(&self) -> &[FollowEdge] {
        &self.follows
    }

    pub fn interactions(&self) -> &[InteractionEvent] {
        &self.interactions
    }

    pub fn snapshot_time(&self) -> Timestamp {
        self.snapshot_time
    }

    pub fn user(&self, id: &str) -> Option<&UserRecord> {
        self.user_index.get(id).map(|&i| &self.users[i])
    }

    pub fn tweet(&self, id: &str) -> Option<&TweetRecord> {
        self.tweet_index.get(id).map(|&i| &self.tweets[i])
    }

    pub fn is_follow_edge(&self, followee: &str, follower: &str) -> bool {
        self.follow_set
            .contains(&(followee.to_owned(), follower.to_owned()))
    }

    /// Tweets grouped by author, in corpus order.
    pub fn tweets_by_author(&self) -> HashMap<&str, Vec<&TweetRecord>> {
        let mut map: HashMap<&str, Vec<&TweetRecord>> = HashMap::new();
        for t in &self.tweets {
            map.entry(t.author_id.as_str()).or_default().push(t);
        }
        map
    }

    /// Count of labeled tweets per abuse level, plus the unlabeled count.
    pub fn label_distribution(&self) -> LabelDistribution {
        let mut counts = [0usize; 4];
        let mut unlabeled = 0;
        for t in &self.tweets {
            match t.label {
                Some(l) => counts[l.index()] += 1,
                None => unlabeled += 1,
            }
        }
        LabelDistribution { counts, unlabeled }
    }

    /// Order-independent view of the corpus content, for equality checks.
    pub fn canonical(&self) -> CanonicalCorpus {
        let mut users = self.users.clone();
        users.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        let mut tweets = self.tweets.clone();
        tweets.sort_by(|a, b| a.tweet_id.cmp(&b.tweet_id));
        let mut follows = self.follows.clone();
        follows.sort();
        let mut interactions = self.interactions.clone();
        interactions.sort_by(|a, b| {
            (&a.message_id, &a.spreader_id, &a.receiver_id, a.timestamp, a.reaction).cmp(&(
                &b.message_id,
                &b.spreader_id,
                &b.receiver_id,
                b.timestamp,
                b.reaction,
            ))
        });
        CanonicalCorpus {
            users,
            tweets,
            follows,
            interactions,
            snapshot_time: self.snapshot_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalCorpus {
    pub users: Vec<UserRecord>,
    pub tweets: Vec<TweetRecord>,
    pub follows: Vec<FollowEdge>,
    pub interactions: Vec<InteractionEvent>,
    pub snapshot_time: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelDistribution {
    /// Indexed by [`AbuseLabel::index`].
    pub counts: [usize; 4],
    pub unlabeled: usize,
}

impl LabelDistribution {
    pub fn labeled(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn proportion(&self, label: AbuseLabel) -> f64 {
        let n = self.labeled();
        if n == 0 {
            0.0
        } else {
            self.counts[label.index()] as f64 / n as f64
        }
    }
}

impl fmt::Display for LabelDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in AbuseLabel::ALL.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(
                f,
                "{}={} ({:.1}%)",
                label,
                self.counts[label.index()],
                100.0 * self.proportion(*label)
            )?;
        }
        write!(f, " unlabeled={}", self.unlabeled)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityKind {
    User,
    Tweet,
    Follow,
    Interaction,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::User => "user",
            EntityKind::Tweet => "tweet",
            EntityKind::Follow => "follow",
            EntityKind::Interaction => "interaction",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    EmptyId,
    DuplicateId,
    /// The named field points at an entity that does not exist.
    Dangling { field: &'static str, target: String },
    SelfLoop,
    DuplicateEdge,
    NotAFollowEdge,
    AfterSnapshot,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::EmptyId => f.write_str("id must be nonempty"),
            Rule::DuplicateId => f.write_str("duplicate id"),
            Rule::Dangling { field, target } => {
                write!(f, "{field} `{target}` does not resolve")
            }
            Rule::SelfLoop => f.write_str("no self-loop"),
            Rule::DuplicateEdge => f.write_str("duplicate follow edge"),
            Rule::NotAFollowEdge => f.write_str("(spreader, receiver) is not a follow edge"),
            Rule::AfterSnapshot => f.write_str("created_at is after the snapshot time"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: EntityKind,
    pub id: String,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.kind, self.id, self.rule)
    }
}

/// Checks every corpus invariant. An empty result means the corpus is valid.
pub fn validate_corpus(c: &Corpus) -> Vec<Violation> {
    let mut out = Vec::new();
    let snapshot = c.snapshot_time;

    let mut seen = HashSet::new();
    for u in &c.users {
        if u.user_id.is_empty() {
            out.push(violation(EntityKind::User, "", Rule::EmptyId));
        } else if !seen.insert(u.user_id.as_str()) {
            out.push(violation(EntityKind::User, &u.user_id, Rule::DuplicateId));
        }
        if u.created_at > snapshot {
            out.push(violation(EntityKind::User, &u.user_id, Rule::AfterSnapshot));
        }
    }

    let mut seen = HashSet::new();
    for t in &c.tweets {
        if t.tweet_id.is_empty() {
            out.push(violation(EntityKind::Tweet, "", Rule::EmptyId));
        } else if !seen.insert(t.tweet_id.as_str()) {
            out.push(violation(EntityKind::Tweet, &t.tweet_id, Rule::DuplicateId));
        }
        if c.user(&t.author_id).is_none() {
            out.push(dangling(EntityKind::Tweet, &t.tweet_id, "author", &t.author_id));
        }
        if t.created_at > snapshot {
            out.push(violation(EntityKind::Tweet, &t.tweet_id, Rule::AfterSnapshot));
        }
    }

    let mut seen = HashSet::new();
    for f in &c.follows {
        let id = format!("({},{})", f.followee_id, f.follower_id);
        for (field, target) in [("followee", &f.followee_id), ("follower", &f.follower_id)] {
            if c.user(target).is_none() {
                out.push(dangling(EntityKind::Follow, &id, field, target));
            }
        }
        if f.followee_id == f.follower_id {
            out.push(violation(EntityKind::Follow, &id, Rule::SelfLoop));
        } else if !seen.insert((f.followee_id.as_str(), f.follower_id.as_str())) {
            out.push(violation(EntityKind::Follow, &id, Rule::DuplicateEdge));
        }
    }

    for (i, e) in c.interactions.iter().enumerate() {
        let id = format!(
            "#{i} ({} {}->{})",
            e.message_id, e.spreader_id, e.receiver_id
        );
        if c.tweet(&e.message_id).is_none() {
            out.push(dangling(EntityKind::Interaction, &id, "message", &e.message_id));
        }
        let mut endpoints_ok = true;
        for (field, target) in [("spreader", &e.spreader_id), ("receiver", &e.receiver_id)] {
            if c.user(target).is_none() {
                endpoints_ok = false;
                out.push(dangling(EntityKind::Interaction, &id, field, target));
            }
        }
        if endpoints_ok && !c.is_follow_edge(&e.spreader_id, &e.receiver_id) {
            out.push(violation(EntityKind::Interaction, &id, Rule::NotAFollowEdge));
        }
    }
    out
}

fn violation(kind: EntityKind, id: &str, rule: Rule) -> Violation {
    Violation {
        kind,
        id: id.to_owned(),
        rule,
    }
}

fn dangling(kind: EntityKind, id: &str, field: &'static str, target: &str) -> Violation {
    violation(
        kind,
        id,
        Rule::Dangling {
            field,
            target: target.to_owned(),
        },
    )
}

/// Locations of the four corpus files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPaths {
    pub users: PathBuf,
    pub tweets: PathBuf,
    pub follows: PathBuf,
    pub interactions: PathBuf,
}

impl CorpusPaths {
    /// The conventional file names inside `dir`.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        Self {
            users: dir.join("users.jsonl"),
            tweets: dir.join("tweets.jsonl"),
            follows: dir.join("follows.csv"),
            interactions: dir.join("interactions.jsonl"),
        }
    }
}

/// Parses all four files without checking cross-entity invariants.
pub fn read_corpus(paths: &CorpusPaths, snapshot_time: Timestamp) -> Result<Corpus, LoadError> {
    let users = read_jsonl::<UserRecord>(&paths.users, USER_FIELDS)?;
    let tweets = read_jsonl::<TweetRecord>(&paths.tweets, TWEET_FIELDS)?;
    let follows = read_follows(&paths.follows)?;
    let interactions = read_jsonl::<InteractionEvent>(&paths.interactions, INTERACTION_FIELDS)?;
    Ok(Corpus::new(users, tweets, follows, interactions, snapshot_time))
}

/// Reads and validates a corpus. Dangling references are reported first,
/// any other violation as [`LoadError::Invalid`].
pub fn load_corpus(paths: &CorpusPaths, snapshot_time: Timestamp) -> Result<Corpus, LoadError> {
    let corpus = read_corpus(paths, snapshot_time)?;
    let violations = validate_corpus(&corpus);
    if let Some(v) = violations.iter().find(|v| matches!(v.rule, Rule::Dangling { .. })) {
        if let Rule::Dangling { field, target } = &v.rule {
            return Err(LoadError::DanglingReference {
                kind: (*field).to_owned(),
                id: target.clone(),
            });
        }
    }
    if !violations.is_empty() {
        return Err(LoadError::Invalid(violations));
    }
    Ok(corpus)
}

fn open(path: &Path) -> Result<BufReader<File>, LoadError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path, required: &[&str]) -> Result<Vec<T>, LoadError> {
    let reader = open(path)?;
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| LoadError::Io {
            path: path.to_owned(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| LoadError::MalformedLine {
            file: path.to_owned(),
            line: line_no,
            reason,
        };
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| malformed("expected a JSON object".into()))?;
        if let Some(field) = required.iter().find(|f| !obj.contains_key(**f)) {
            return Err(LoadError::MissingField {
                file: path.to_owned(),
                line: line_no,
                field: (*field).to_owned(),
            });
        }
        out.push(serde_json::from_value(value).map_err(|e| malformed(e.to_string()))?);
    }
    Ok(out)
}

fn read_follows(path: &Path) -> Result<Vec<FollowEdge>, LoadError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(open(path)?);
    let headers = reader
        .headers()
        .map_err(|e| LoadError::MalformedLine {
            file: path.to_owned(),
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    if headers.len() < 2 || &headers[0] != "followee_id" || &headers[1] != "follower_id" {
        return Err(LoadError::MalformedLine {
            file: path.to_owned(),
            line: 1,
            reason: "expected header `followee_id,follower_id`".into(),
        });
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let line = i + 2;
        let record = record.map_err(|e| LoadError::MalformedLine {
            file: path.to_owned(),
            line,
            reason: e.to_string(),
        })?;
        let field = |idx: usize, name: &str| -> Result<String, LoadError> {
            match record.get(idx).map(str::trim) {
                Some(v) if !v.is_empty() => Ok(v.to_owned()),
                _ => Err(LoadError::MissingField {
                    file: path.to_owned(),
                    line,
                    field: name.to_owned(),
                }),
            }
        };
        out.push(FollowEdge {
            followee_id: field(0, "followee_id")?,
            follower_id: field(1, "follower_id")?,
        });
    }
    Ok(out)
}

/// Writes the four corpus files in the format [`load_corpus`] reads.
pub fn write_corpus(c: &Corpus, paths: &CorpusPaths) -> std::io::Result<()> {
    write_jsonl(&paths.users, &c.users)?;
    write_jsonl(&paths.tweets, &c.tweets)?;
    write_jsonl(&paths.interactions, &c.interactions)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&paths.follows)?));
    w.write_record(["followee_id", "follower_id"])?;
    for f in &c.follows {
        w.write_record([&f.followee_id, &f.follower_id])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Label counts keyed by label name, for JSON reports.
pub fn label_counts_map(dist: &LabelDistribution) -> BTreeMap<String, usize> {
    AbuseLabel::ALL
        .iter()
        .map(|l| (l.as_str().to_owned(), dist.counts[l.index()]))
        .collect()
}
