//! Network, interaction and message features, assembled per propagation edge.
//!
//! Each user contributes 16 values, each message 11, and an edge vector is
//! `spreader ⊕ receiver ⊕ message ⊕ diffused` (44 values). Raw counts are
//! emitted untransformed; scaling belongs to the model.

pub mod persona;
pub mod sentiment;

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::datamodel::{Corpus, Timestamp, TweetRecord, UserRecord};
use crate::graph::PropagationEdge;

pub use persona::{discriminator_class, persona_scores, Discriminator, PersonaScores};
pub use sentiment::{sentiment_score, Lexicon};

pub const USER_DIM: usize = 16;
pub const MESSAGE_DIM: usize = 11;
pub const EDGE_DIM: usize = 2 * USER_DIM + MESSAGE_DIM + 1;
/// Author features followed by message features.
pub const BASELINE_DIM: usize = USER_DIM + MESSAGE_DIM;

pub const USER_FEATURE_NAMES: [&str; USER_DIM] = [
    "followers_count",
    "friends_count",
    "followers_friends_ratio",
    "directed_tweets_ratio",
    "retweet_to_tweet_ratio",
    "hashtag_tweet_ratio",
    "url_tweet_ratio",
    "media_tweet_ratio",
    "avg_favorite_per_tweet",
    "avg_tweets_per_day",
    "has_profile_url",
    "has_description",
    "is_verified",
    "status_count",
    "account_age_days",
    "dialogue",
];

pub const MESSAGE_FEATURE_NAMES: [&str; MESSAGE_DIM] = [
    "quoted_status",
    "is_retweet",
    "retweet_count",
    "retweet_status",
    "favorited_count",
    "has_hashtag",
    "has_url",
    "has_mentions",
    "has_media",
    "avg_tweet_length",
    "sentiment_score",
];

/// Raw count features; the model applies `log1p` to these before scaling.
pub const COUNT_FEATURES: [&str; 5] = [
    "followers_count",
    "friends_count",
    "status_count",
    "retweet_count",
    "favorited_count",
];

pub const MAX_TWEET_LENGTH: f64 = 280.0;

/// Names of the 44 edge-vector coordinates, in vector order.
pub fn edge_feature_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut v = Vec::with_capacity(EDGE_DIM);
        v.extend(USER_FEATURE_NAMES.iter().map(|n| format!("spreader_{n}")));
        v.extend(USER_FEATURE_NAMES.iter().map(|n| format!("receiver_{n}")));
        v.extend(MESSAGE_FEATURE_NAMES.iter().map(|n| format!("msg_{n}")));
        v.push("diffused".to_owned());
        v
    })
}

/// Names of the 27 baseline coordinates: author features then message features.
pub fn baseline_feature_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut v = Vec::with_capacity(BASELINE_DIM);
        v.extend(USER_FEATURE_NAMES.iter().map(|n| format!("author_{n}")));
        v.extend(MESSAGE_FEATURE_NAMES.iter().map(|n| format!("msg_{n}")));
        v
    })
}

/// True when `name` (possibly prefixed) refers to a raw count feature.
pub fn is_count_feature(name: &str) -> bool {
    COUNT_FEATURES
        .iter()
        .any(|c| name == *c || name.ends_with(&format!("_{c}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UserFeatures {
    pub followers_count: f64,
    pub friends_count: f64,
    pub followers_friends_ratio: f64,
    pub directed_tweets_ratio: f64,
    pub retweet_to_tweet_ratio: f64,
    pub hashtag_tweet_ratio: f64,
    pub url_tweet_ratio: f64,
    pub media_tweet_ratio: f64,
    pub avg_favorite_per_tweet: f64,
    pub avg_tweets_per_day: f64,
    pub has_profile_url: f64,
    pub has_description: f64,
    pub is_verified: f64,
    pub status_count: f64,
    pub account_age_days: f64,
    pub dialogue: f64,
}

impl UserFeatures {
    pub fn to_array(&self) -> [f64; USER_DIM] {
        [
            self.followers_count,
            self.friends_count,
            self.followers_friends_ratio,
            self.directed_tweets_ratio,
            self.retweet_to_tweet_ratio,
            self.hashtag_tweet_ratio,
            self.url_tweet_ratio,
            self.media_tweet_ratio,
            self.avg_favorite_per_tweet,
            self.avg_tweets_per_day,
            self.has_profile_url,
            self.has_description,
            self.is_verified,
            self.status_count,
            self.account_age_days,
            self.dialogue,
        ]
    }

    pub fn with_dialogue(mut self, history: usize) -> Self {
        self.dialogue = flag(history > 0);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MessageFeatures {
    pub quoted_status: f64,
    /// Whether the post has been retweeted by anyone.
    pub is_retweet: f64,
    pub retweet_count: f64,
    /// Whether the post itself is a retweet.
    pub retweet_status: f64,
    pub favorited_count: f64,
    pub has_hashtag: f64,
    pub has_url: f64,
    pub has_mentions: f64,
    pub has_media: f64,
    pub avg_tweet_length: f64,
    pub sentiment_score: f64,
}

impl MessageFeatures {
    pub fn to_array(&self) -> [f64; MESSAGE_DIM] {
        [
            self.quoted_status,
            self.is_retweet,
            self.retweet_count,
            self.retweet_status,
            self.favorited_count,
            self.has_hashtag,
            self.has_url,
            self.has_mentions,
            self.has_media,
            self.avg_tweet_length,
            self.sentiment_score,
        ]
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Whole days between `from` and `to`, never less than one.
pub fn account_age_days(created_at: Timestamp, snapshot: Timestamp) -> f64 {
    (snapshot - created_at).num_days().max(1) as f64
}

pub fn user_features(
    u: &UserRecord,
    authored: &[&TweetRecord],
    receiver_to_spreader_history: usize,
    snapshot: Timestamp,
) -> UserFeatures {
    let n = authored.len();
    let ratio = |pred: fn(&TweetRecord) -> bool| {
        if n == 0 {
            0.0
        } else {
            authored.iter().filter(|t| pred(t)).count() as f64 / n as f64
        }
    };
    let avg_favorite = if n == 0 {
        0.0
    } else {
        authored.iter().map(|t| t.favorited_count as f64).sum::<f64>() / n as f64
    };
    let age = account_age_days(u.created_at, snapshot);
    UserFeatures {
        followers_count: u.followers_count as f64,
        friends_count: u.friends_count as f64,
        followers_friends_ratio: u.followers_count as f64 / u.friends_count.max(1) as f64,
        directed_tweets_ratio: ratio(|t| t.mentions > 0 && !t.is_retweet),
        retweet_to_tweet_ratio: ratio(|t| t.is_retweet),
        hashtag_tweet_ratio: ratio(|t| t.hashtags > 0),
        url_tweet_ratio: ratio(|t| t.urls > 0),
        media_tweet_ratio: ratio(|t| t.media > 0),
        avg_favorite_per_tweet: avg_favorite,
        avg_tweets_per_day: u.status_count as f64 / age,
        has_profile_url: flag(u.has_profile_url),
        has_description: flag(u.has_description),
        is_verified: flag(u.verified),
        status_count: u.status_count as f64,
        account_age_days: age,
        dialogue: flag(receiver_to_spreader_history > 0),
    }
}

pub fn message_features(t: &TweetRecord, lexicon: &Lexicon) -> MessageFeatures {
    let chars = t.text.chars().count() as f64;
    MessageFeatures {
        quoted_status: flag(t.quoted_status),
        is_retweet: flag(t.retweet_count > 0),
        retweet_count: t.retweet_count as f64,
        retweet_status: flag(t.is_retweet),
        favorited_count: t.favorited_count as f64,
        has_hashtag: flag(t.hashtags > 0),
        has_url: flag(t.urls > 0),
        has_mentions: flag(t.mentions > 0),
        has_media: flag(t.media > 0),
        avg_tweet_length: (chars / MAX_TWEET_LENGTH).min(1.0),
        sentiment_score: sentiment_score(&t.text, lexicon),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeFeatureVector(pub [f64; EDGE_DIM]);

impl EdgeFeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn diffused(&self) -> bool {
        self.0[EDGE_DIM - 1] == 1.0
    }
}

pub fn assemble_edge_vector(
    spreader: &UserFeatures,
    receiver: &UserFeatures,
    msg: &MessageFeatures,
    diffused: bool,
) -> EdgeFeatureVector {
    let mut v = [0.0; EDGE_DIM];
    v[..USER_DIM].copy_from_slice(&spreader.to_array());
    v[USER_DIM..2 * USER_DIM].copy_from_slice(&receiver.to_array());
    v[2 * USER_DIM..2 * USER_DIM + MESSAGE_DIM].copy_from_slice(&msg.to_array());
    v[EDGE_DIM - 1] = flag(diffused);
    EdgeFeatureVector(v)
}

pub fn assemble_baseline_vector(author: &UserFeatures, msg: &MessageFeatures) -> [f64; BASELINE_DIM] {
    let mut v = [0.0; BASELINE_DIM];
    v[..USER_DIM].copy_from_slice(&author.to_array());
    v[USER_DIM..].copy_from_slice(&msg.to_array());
    v
}

/// Precomputed per-user and per-message features for one corpus.
pub struct FeatureTable<'c> {
    corpus: &'c Corpus,
    users: HashMap<&'c str, UserFeatures>,
    messages: HashMap<&'c str, MessageFeatures>,
    /// (spreader, receiver) → sorted timestamps of diffused events.
    reactions: HashMap<(&'c str, &'c str), Vec<Timestamp>>,
}

impl<'c> FeatureTable<'c> {
    pub fn new(corpus: &'c Corpus, lexicon: &Lexicon) -> Self {
        let by_author = corpus.tweets_by_author();
        let snapshot = corpus.snapshot_time();
        let users = corpus
            .users()
            .iter()
            .map(|u| {
                let authored = by_author
                    .get(u.user_id.as_str())
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
                (u.user_id.as_str(), user_features(u, authored, 0, snapshot))
            })
            .collect();
        let messages = corpus
            .tweets()
            .iter()
            .map(|t| (t.tweet_id.as_str(), message_features(t, lexicon)))
            .collect();
        let mut reactions: HashMap<(&str, &str), Vec<Timestamp>> = HashMap::new();
        for e in corpus.interactions() {
            if crate::graph::label_diffusion(e.reaction) {
                reactions
                    .entry((e.spreader_id.as_str(), e.receiver_id.as_str()))
                    .or_default()
                    .push(e.timestamp);
            }
        }
        for v in reactions.values_mut() {
            v.sort_unstable();
        }
        Self {
            corpus,
            users,
            messages,
            reactions,
        }
    }

    pub fn corpus(&self) -> &'c Corpus {
        self.corpus
    }

    /// Features of `user` with the dialogue flag cleared.
    pub fn user(&self, user: &str) -> Option<&UserFeatures> {
        self.users.get(user)
    }

    pub fn message(&self, tweet: &str) -> Option<&MessageFeatures> {
        self.messages.get(tweet)
    }

    /// Diffused events where `reactor` reacted to a post spread by `source`
    /// strictly before `before`.
    pub fn prior_reactions(&self, reactor: &str, source: &str, before: Timestamp) -> usize {
        self.reactions
            .get(&(source, reactor))
            .map_or(0, |ts| ts.partition_point(|t| *t < before))
    }

    /// Edge vector with pairwise dialogue flags filled in.
    ///
    /// Panics if an endpoint or the message is missing from the corpus.
    pub fn edge_vector(&self, edge: &PropagationEdge) -> EdgeFeatureVector {
        let s = &edge.spreader_id;
        let r = &edge.receiver_id;
        let spreader = self.users[s.as_str()]
            .with_dialogue(self.prior_reactions(s, r, edge.timestamp));
        let receiver = self.users[r.as_str()]
            .with_dialogue(self.prior_reactions(r, s, edge.timestamp));
        assemble_edge_vector(
            &spreader,
            &receiver,
            &self.messages[edge.message_id.as_str()],
            edge.diffused,
        )
    }

    /// Author ⊕ message vector for the non-crowdsourced baseline.
    pub fn baseline_vector(&self, tweet: &TweetRecord) -> [f64; BASELINE_DIM] {
        assemble_baseline_vector(
            &self.users[tweet.author_id.as_str()],
            &self.messages[tweet.tweet_id.as_str()],
        )
    }
}

/// One row of `features.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFeatureRecord {
    pub message_id: String,
    pub spreader_id: String,
    pub receiver_id: String,
    pub features: serde_json::Map<String, serde_json::Value>,
}

impl EdgeFeatureRecord {
    pub fn new(edge: &PropagationEdge, v: &EdgeFeatureVector) -> Self {
        let features = edge_feature_names()
            .iter()
            .zip(v.0.iter())
            .map(|(n, x)| (n.clone(), serde_json::json!(x)))
            .collect();
        Self {
            message_id: edge.message_id.clone(),
            spreader_id: edge.spreader_id.clone(),
            receiver_id: edge.receiver_id.clone(),
            features,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, TimeZone, Utc};
    use std::collections::HashSet;

    fn snapshot() -> Timestamp {
        Utc.with_ymd_and_hms(2021, 6, 1, 0, 0, 0).unwrap()
    }

    fn user() -> UserRecord {
        UserRecord {
            user_id: "u".into(),
            followers_count: 100,
            friends_count: 50,
            verified: true,
            has_profile_url: false,
            has_description: true,
            status_count: 300,
            created_at: snapshot() - Duration::days(100) - Duration::hours(5),
        }
    }

    fn tweet(text: &str) -> TweetRecord {
        TweetRecord {
            tweet_id: "t".into(),
            author_id: "u".into(),
            text: text.into(),
            label: None,
            created_at: snapshot(),
            is_retweet: false,
            retweet_count: 0,
            favorited_count: 0,
            quoted_status: false,
            hashtags: 0,
            urls: 0,
            media: 0,
            mentions: 0,
        }
    }

    #[test]
    fn network_ratio_and_profile_flags() {
        let f = user_features(&user(), &[], 0, snapshot());
        assert_eq!(f.followers_friends_ratio, 2.0);
        assert_eq!(f.account_age_days, 100.0);
        assert_eq!(f.avg_tweets_per_day, 3.0);
        assert_eq!((f.is_verified, f.has_profile_url, f.has_description), (1.0, 0.0, 1.0));
        assert_eq!(f.dialogue, 0.0);
    }

    #[test]
    fn zero_friends_uses_unit_denominator() {
        let mut u = user();
        u.friends_count = 0;
        assert_eq!(user_features(&u, &[], 0, snapshot()).followers_friends_ratio, 100.0);
    }

    #[test]
    fn zero_tweets_gives_zero_ratios() {
        let f = user_features(&user(), &[], 0, snapshot());
        for v in [
            f.directed_tweets_ratio,
            f.retweet_to_tweet_ratio,
            f.hashtag_tweet_ratio,
            f.url_tweet_ratio,
            f.media_tweet_ratio,
            f.avg_favorite_per_tweet,
        ] {
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn hashtag_ratio_three_of_four() {
        let tweets: Vec<TweetRecord> = (0..4)
            .map(|i| {
                let mut t = tweet("x");
                t.hashtags = u64::from(i < 3);
                t.favorited_count = i;
                t.mentions = u64::from(i == 0);
                t.is_retweet = i == 1;
                t
            })
            .collect();
        let refs: Vec<&TweetRecord> = tweets.iter().collect();
        let f = user_features(&user(), &refs, 2, snapshot());
        assert_eq!(f.hashtag_tweet_ratio, 0.75);
        assert_eq!(f.avg_favorite_per_tweet, 1.5);
        assert_eq!(f.directed_tweets_ratio, 0.25);
        assert_eq!(f.retweet_to_tweet_ratio, 0.25);
        assert_eq!(f.dialogue, 1.0);
    }

    #[test]
    fn account_age_floor_is_one_day() {
        let mut u = user();
        u.created_at = snapshot() - Duration::hours(3);
        let f = user_features(&u, &[], 0, snapshot());
        assert_eq!(f.account_age_days, 1.0);
        assert_eq!(f.avg_tweets_per_day, 300.0);
    }

    #[test]
    fn tweet_length_normalization() {
        let lex = Lexicon::bundled();
        assert_eq!(message_features(&tweet(&"a".repeat(140)), &lex).avg_tweet_length, 0.5);
        assert_eq!(message_features(&tweet(&"a".repeat(300)), &lex).avg_tweet_length, 1.0);
        // characters, not bytes
        assert_eq!(message_features(&tweet(&"é".repeat(140)), &lex).avg_tweet_length, 0.5);
    }

    #[test]
    fn message_flags_follow_counts() {
        let mut t = tweet("");
        t.mentions = 2;
        t.retweet_count = 4;
        t.is_retweet = true;
        let m = message_features(&t, &Lexicon::bundled());
        assert_eq!(m.has_mentions, 1.0);
        assert_eq!(m.is_retweet, 1.0);
        assert_eq!(m.retweet_status, 1.0);
        assert_eq!(m.retweet_count, 4.0);
        assert_eq!((m.has_hashtag, m.has_url, m.has_media), (0.0, 0.0, 0.0));
    }

    #[test]
    fn edge_vector_layout() {
        let s = user_features(&user(), &[], 0, snapshot());
        let m = message_features(&tweet("good"), &Lexicon::bundled());
        let v = assemble_edge_vector(&s, &UserFeatures::default(), &m, true);
        assert_eq!(v.0.len(), 44);
        assert_eq!(v.0[43], 1.0);
        assert!(v.diffused());
        assert_eq!(v.0[0], 100.0);
        assert_eq!(v.0[USER_DIM], 0.0);
        let z = assemble_edge_vector(
            &UserFeatures::default(),
            &UserFeatures::default(),
            &MessageFeatures::default(),
            false,
        );
        assert!(z.0.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn feature_names_unique_and_complete() {
        let names = edge_feature_names();
        assert_eq!(names.len(), 16 + 16 + 11 + 1);
        assert_eq!(names.iter().collect::<HashSet<_>>().len(), names.len());
        assert_eq!(baseline_feature_names().len(), 27);
        assert_eq!(names[43], "diffused");
    }

    #[test]
    fn count_feature_detection() {
        assert!(is_count_feature("receiver_followers_count"));
        assert!(is_count_feature("msg_retweet_count"));
        assert!(!is_count_feature("receiver_followers_friends_ratio"));
        assert!(!is_count_feature("msg_is_retweet"));
        let n = edge_feature_names().iter().filter(|n| is_count_feature(n)).count();
        assert_eq!(n, 3 + 3 + 2);
    }
}
