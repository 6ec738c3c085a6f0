//! Seeded synthetic corpora with a controllable label–diffusion signal.
//!
//! All randomness comes from one ChaCha8 stream (`rand_chacha::ChaCha8Rng`,
//! the 8-round ChaCha block function used as a counter-based generator)
//! seeded with `SynthConfig::seed`, so a config always produces the same
//! files on every platform.
//!
//! Generation steps:
//!
//! 1. Users get independent profiles and a hidden reaction propensity `h`
//!    (log-normal with mean 1 and spread `heterogeneity`).
//! 2. A preferential-attachment follow graph: user `v` follows
//!    `follows_per_user` earlier users picked proportionally to their
//!    follower count + 1; each new follow is reciprocated with probability
//!    `reciprocity`.
//! 3. Messages get labels from `label_priors`, uniformly chosen authors, and
//!    text mixing label-specific lexicon words (rate `text_signal`) with
//!    generic filler.
//! 4. Each message is shown to up to `max_fanout` followers of its author;
//!    followers who react pass it on to up to `max_fanout` of their own
//!    followers (two hops at most). A receiver `r` reacts with probability
//!
//!    ```text
//!    clip(β₀ · (1 + s(λ_label − 1)) · h_r · (1 + s(c(ff_r) − 1)), 0, 1)
//!    c(ff) = 2 ff / (1 + ff)
//!    ```
//!
//!    where `ff_r` is the receiver's followers/friends ratio and `s` the
//!    signal strength. With `s = 0` diffusion ignores both the label and the
//!    ratio.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Duration, TimeZone, Utc};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::datamodel::{
    write_corpus, AbuseLabel, Corpus, CorpusPaths, FollowEdge, InteractionEvent, Reaction,
    Timestamp, TweetRecord, UserRecord,
};
use crate::error::SynthError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_users: usize,
    /// Preferential-attachment follows made by each new user.
    pub follows_per_user: usize,
    pub reciprocity: f64,
    pub n_messages: usize,
    /// Abusive, hate, spam, normal.
    pub label_priors: [f64; 4],
    /// β₀, the reaction probability of an average receiver to a normal post.
    pub base_rate: f64,
    /// λ per label (abusive, hate, spam, normal).
    pub multipliers: [f64; 4],
    /// Log-normal σ of the per-user reaction propensity.
    pub heterogeneity: f64,
    /// `s` in [0, 1].
    pub signal_strength: f64,
    /// Probability that a message token is drawn from its label's word pool.
    pub text_signal: f64,
    /// Exposures per spreader per message.
    pub max_fanout: usize,
    pub snapshot: Timestamp,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_users: 1000,
            follows_per_user: 8,
            reciprocity: 0.3,
            n_messages: 2000,
            label_priors: [0.20, 0.04, 0.14, 0.62],
            base_rate: 0.25,
            multipliers: [3.0, 3.5, 0.5, 1.0],
            heterogeneity: 0.2,
            signal_strength: 1.0,
            text_signal: 0.05,
            max_fanout: 20,
            snapshot: Utc.with_ymd_and_hms(2020, 6, 1, 0, 0, 0).unwrap(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidConfig(m.to_owned()));
        let sum: f64 = self.label_priors.iter().sum();
        if self.label_priors.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return bad("label_priors must be nonnegative and sum to 1");
        }
        if !(self.base_rate > 0.0 && self.base_rate < 1.0) {
            return bad("base_rate must lie in (0, 1)");
        }
        if self.multipliers.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return bad("multipliers must be finite and ≥ 0");
        }
        if !(0.0..=1.0).contains(&self.signal_strength) {
            return bad("signal_strength must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.text_signal) {
            return bad("text_signal must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.reciprocity) {
            return bad("reciprocity must lie in [0, 1]");
        }
        if !self.heterogeneity.is_finite() || self.heterogeneity < 0.0 {
            return bad("heterogeneity must be finite and ≥ 0");
        }
        if self.n_messages > 0 && self.n_users == 0 {
            return bad("messages need at least one user");
        }
        Ok(())
    }

    /// Parses a TOML key-value file; unspecified keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::InvalidConfig(e.to_string()))
    }
}

/// Exact totals of a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: SynthConfig,
    pub n_users: usize,
    pub n_tweets: usize,
    pub n_follows: usize,
    pub n_interactions: usize,
    /// Messages per label name.
    pub label_counts: BTreeMap<String, usize>,
    /// Followers of each user in the generated graph.
    pub out_degrees: BTreeMap<String, usize>,
    pub diffused_edges: usize,
    pub not_diffused_edges: usize,
    /// Exposure edges per message label.
    pub exposures_by_label: BTreeMap<String, usize>,
    pub diffused_by_label: BTreeMap<String, usize>,
    /// Pearson correlation between the receiver's `ln(followers/friends)`
    /// and the diffusion outcome over all exposure edges.
    pub ratio_diffusion_correlation: f64,
}

pub struct Generated {
    pub corpus: Corpus,
    pub manifest: Manifest,
}

impl Generated {
    /// Writes the four corpus files and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), SynthError> {
        let io = |source| SynthError::Io {
            path: dir.to_owned(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        write_corpus(&self.corpus, &CorpusPaths::in_dir(dir)).map_err(io)?;
        let manifest = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), manifest + "\n").map_err(io)
    }
}

const FILLER: &[&str] = &[
    "the", "a", "this", "that", "today", "people", "just", "really", "so", "what", "about",
    "time", "with", "you", "they", "we", "it", "is", "was", "new", "here", "all", "when",
    "going", "think", "know", "see", "now", "your", "our", "some", "more", "one", "again",
];
const POSITIVE: &[&str] = &[
    "love", "great", "good", "happy", "thanks", "nice", "awesome", "beautiful", "wonderful",
    "fun", "enjoy", "glad", "best", "amazing", "friends", "kind", "proud", "excited", "cool",
    "congrats", "welcome", "hope", "smile", "peace", "lovely", "grateful", "celebrate",
];
const PROMO: &[&str] = &[
    "free", "win", "deal", "offer", "bonus", "prize", "exclusive", "discount", "winner",
    "guaranteed", "easy", "save", "instant", "gift", "reward",
];
const INSULT: &[&str] = &[
    "stupid", "idiot", "loser", "pathetic", "trash", "fool", "liar", "moron", "jerk",
    "disgusting", "useless", "clown", "dumb", "nasty", "ridiculous", "shame", "crap",
];
const HATEFUL: &[&str] = &[
    "vermin", "filth", "subhuman", "scum", "parasites", "savages", "inferior", "invaders",
    "exterminate", "plague", "degenerate", "deport",
];
const MILD_NEGATIVE: &[&str] = &[
    "bad", "sad", "angry", "annoying", "boring", "wrong", "worse", "awful", "terrible",
    "sick", "hurt", "fail", "lazy",
];

fn pool(label: AbuseLabel) -> &'static [&'static str] {
    match label {
        AbuseLabel::Abusive => INSULT,
        AbuseLabel::Hate => HATEFUL,
        AbuseLabel::Spam => PROMO,
        AbuseLabel::Normal => POSITIVE,
    }
}

fn pick<'a, R: Rng>(rng: &mut R, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

fn draw_label<R: Rng>(rng: &mut R, priors: &[f64; 4]) -> AbuseLabel {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (l, p) in AbuseLabel::ALL.iter().zip(priors) {
        acc += p;
        if u < acc {
            return *l;
        }
    }
    // rounding slack in the cumulative sum
    *AbuseLabel::ALL
        .iter()
        .zip(priors)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(l, _)| l)
        .unwrap_or(&AbuseLabel::Normal)
}

fn message_text<R: Rng>(rng: &mut R, label: AbuseLabel, text_signal: f64, urls: u64, hashtags: u64, mentions: u64) -> String {
    let len = rng.random_range(8..=22);
    let mut words: Vec<String> = Vec::with_capacity(len + 6);
    for _ in 0..mentions {
        words.push(format!("@user{}", rng.random_range(0..10_000)));
    }
    for _ in 0..len {
        let w = if rng.random::<f64>() < text_signal {
            pick(rng, pool(label))
        } else {
            match rng.random_range(0..10) {
                0 | 1 => pick(rng, POSITIVE),
                2 | 3 => pick(rng, MILD_NEGATIVE),
                _ => pick(rng, FILLER),
            }
        };
        if rng.random::<f64>() < 0.03 {
            words.push("not".to_owned());
        }
        words.push(w.to_owned());
    }
    for _ in 0..hashtags {
        words.push(format!("#{}", pick(rng, FILLER)));
    }
    for _ in 0..urls {
        words.push(format!("https://t.co/{:08x}", rng.random::<u32>()));
    }
    words.join(" ")
}

fn count<R: Rng>(rng: &mut R, p_any: f64, max: u64) -> u64 {
    if rng.random::<f64>() < p_any {
        rng.random_range(1..=max)
    } else {
        0
    }
}

/// Per-user state the cascade simulation needs.
struct Agent {
    propensity: f64,
    ff_ratio: f64,
    followers: Vec<usize>,
}

fn reaction_kind<R: Rng>(rng: &mut R) -> Reaction {
    match rng.random_range(0..10) {
        0..=3 => Reaction::Like,
        4..=6 => Reaction::Retweet,
        7 | 8 => Reaction::Reply,
        _ => Reaction::Quote,
    }
}

/// Reaction probability for a receiver with propensity `h` and
/// followers/friends ratio `ff`.
pub fn reaction_probability(config: &SynthConfig, label: AbuseLabel, h: f64, ff: f64) -> f64 {
    let s = config.signal_strength;
    let lambda = 1.0 + s * (config.multipliers[label.index()] - 1.0);
    let coupling = 1.0 + s * (2.0 * ff / (1.0 + ff) - 1.0);
    (config.base_rate * lambda * h * coupling).clamp(0.0, 1.0)
}

pub fn generate(config: &SynthConfig) -> Result<Generated, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let snapshot = config.snapshot;
    let n = config.n_users;
    let width = n.max(1).to_string().len().max(5);
    let uid = |i: usize| format!("u{i:0width$}");

    let propensity = LogNormal::new(-config.heterogeneity.powi(2) / 2.0, config.heterogeneity)
        .expect("finite heterogeneity");
    let followers_dist = LogNormal::<f64>::new(5.0, 1.5).expect("valid");
    let friends_dist = LogNormal::<f64>::new(5.0, 1.0).expect("valid");
    let status_dist = LogNormal::<f64>::new(6.5, 1.2).expect("valid");

    let mut users = Vec::with_capacity(n);
    let mut agents = Vec::with_capacity(n);
    for i in 0..n {
        let followers_count = followers_dist.sample(&mut rng).round() as u64;
        let friends_count = friends_dist.sample(&mut rng).round() as u64;
        let age_days = rng.random_range(30..3650);
        users.push(UserRecord {
            user_id: uid(i),
            followers_count,
            friends_count,
            verified: rng.random::<f64>() < 0.03,
            has_profile_url: rng.random::<f64>() < 0.4,
            has_description: rng.random::<f64>() < 0.75,
            status_count: status_dist.sample(&mut rng).round() as u64,
            created_at: snapshot - Duration::days(age_days) - Duration::seconds(rng.random_range(0..86_400)),
        });
        agents.push(Agent {
            propensity: propensity.sample(&mut rng),
            ff_ratio: followers_count as f64 / friends_count.max(1) as f64,
            followers: Vec::new(),
        });
    }

    // Preferential attachment: `urn` holds each user once plus once per follower.
    let mut follows = Vec::new();
    let mut urn: Vec<usize> = Vec::new();
    let mut has_edge = std::collections::HashSet::new();
    for v in 0..n {
        let k = config.follows_per_user.min(v);
        let mut chosen = Vec::with_capacity(k);
        while chosen.len() < k {
            let u = if urn.is_empty() { 0 } else { urn[rng.random_range(0..urn.len())] };
            if u != v && !chosen.contains(&u) {
                chosen.push(u);
            }
        }
        for u in chosen {
            // v follows u
            if has_edge.insert((u, v)) {
                agents[u].followers.push(v);
                follows.push((u, v));
                urn.push(u);
            }
            if rng.random::<f64>() < config.reciprocity && has_edge.insert((v, u)) {
                agents[v].followers.push(u);
                follows.push((v, u));
                urn.push(v);
            }
        }
        urn.push(v);
    }

    let mut tweets = Vec::with_capacity(config.n_messages);
    let mut interactions = Vec::new();
    let mut exposures_by_label = [0usize; 4];
    let mut diffused_by_label = [0usize; 4];
    let mut label_counts = [0usize; 4];
    let mut corr = Moments::default();
    let sentinel = usize::MAX;
    let mut exposed_in = vec![sentinel; n];
    let twidth = config.n_messages.max(1).to_string().len().max(6);
    let horizon = Duration::days(365).num_seconds();

    for m in 0..config.n_messages {
        let label = draw_label(&mut rng, &config.label_priors);
        label_counts[label.index()] += 1;
        let author = rng.random_range(0..n);
        let spam = label == AbuseLabel::Spam;
        let offensive = label.is_offensive();
        let urls = count(&mut rng, if spam { 0.8 } else { 0.25 }, 2);
        let hashtags = count(&mut rng, if spam { 0.7 } else { 0.25 }, 3);
        let mentions = count(&mut rng, if offensive { 0.5 } else { 0.3 }, 2);
        let text = message_text(&mut rng, label, config.text_signal, urls, hashtags, mentions);
        let created_at = snapshot
            - Duration::days(2)
            - Duration::seconds(rng.random_range(0..horizon));
        let tweet_id = format!("t{m:0twidth$}");
        let retweet_count = count(&mut rng, 0.4, 50);
        tweets.push(TweetRecord {
            tweet_id: tweet_id.clone(),
            author_id: uid(author),
            text,
            label: Some(label),
            created_at,
            is_retweet: rng.random::<f64>() < 0.15,
            retweet_count,
            favorited_count: count(&mut rng, 0.6, 80),
            quoted_status: rng.random::<f64>() < 0.05,
            hashtags,
            urls,
            media: count(&mut rng, 0.2, 2),
            mentions,
        });

        exposed_in[author] = m;
        let mut frontier = vec![(author, created_at)];
        for _hop in 0..2 {
            let mut next = Vec::new();
            for &(spreader, at) in &frontier {
                let fol = &agents[spreader].followers;
                let k = config.max_fanout.min(fol.len());
                for pos in sample(&mut rng, fol.len(), k).iter() {
                    let receiver = fol[pos];
                    if exposed_in[receiver] == m {
                        continue;
                    }
                    exposed_in[receiver] = m;
                    let a = &agents[receiver];
                    let p = reaction_probability(config, label, a.propensity, a.ff_ratio);
                    let diffused = rng.random::<f64>() < p;
                    let reaction = if diffused { reaction_kind(&mut rng) } else { Reaction::None };
                    let timestamp = at + Duration::seconds(rng.random_range(60..21_600));
                    exposures_by_label[label.index()] += 1;
                    if diffused {
                        diffused_by_label[label.index()] += 1;
                        next.push((receiver, timestamp));
                    }
                    corr.push(a.ff_ratio.max(1e-9).ln(), f64::from(u8::from(diffused)));
                    interactions.push(InteractionEvent {
                        message_id: tweet_id.clone(),
                        spreader_id: uid(spreader),
                        receiver_id: uid(receiver),
                        reaction,
                        timestamp,
                    });
                }
            }
            frontier = next;
        }
    }

    let out_degrees = agents
        .iter()
        .enumerate()
        .map(|(i, a)| (uid(i), a.followers.len()))
        .collect();
    let by_label = |arr: [usize; 4]| -> BTreeMap<String, usize> {
        AbuseLabel::ALL
            .iter()
            .map(|l| (l.as_str().to_owned(), arr[l.index()]))
            .collect()
    };
    let diffused_edges: usize = diffused_by_label.iter().sum();
    let total_edges: usize = exposures_by_label.iter().sum();
    let follows: Vec<FollowEdge> = follows
        .into_iter()
        .map(|(u, v)| FollowEdge {
            followee_id: uid(u),
            follower_id: uid(v),
        })
        .collect();
    let manifest = Manifest {
        config: config.clone(),
        n_users: users.len(),
        n_tweets: tweets.len(),
        n_follows: follows.len(),
        n_interactions: interactions.len(),
        label_counts: by_label(label_counts),
        out_degrees,
        diffused_edges,
        not_diffused_edges: total_edges - diffused_edges,
        exposures_by_label: by_label(exposures_by_label),
        diffused_by_label: by_label(diffused_by_label),
        ratio_diffusion_correlation: corr.correlation(),
    };
    let corpus = Corpus::new(users, tweets, follows, interactions, snapshot);
    Ok(Generated { corpus, manifest })
}

#[derive(Default)]
struct Moments {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Moments {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    fn correlation(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        let cov = self.sxy - self.sx * self.sy / self.n;
        let vx = self.sxx - self.sx * self.sx / self.n;
        let vy = self.syy - self.sy * self.sy / self.n;
        if vx <= 0.0 || vy <= 0.0 {
            0.0
        } else {
            cov / (vx * vy).sqrt()
        }
    }
}

/// Realized diffusion for one label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelEffect {
    pub label: AbuseLabel,
    pub exposures: usize,
    pub diffused: usize,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub rate_stderr: f64,
    /// `rate / rate(normal)`; absent without normal exposures.
    pub ratio_to_normal: Option<f64>,
    /// Delta-method standard error of `ratio_to_normal`.
    pub ratio_stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantReport {
    pub signal_strength: f64,
    pub effects: Vec<LabelEffect>,
    pub ratio_diffusion_correlation: f64,
}

/// Realized per-label diffusion rates and the planted ratio coupling.
/// Empty when the corpus has no exposures.
pub fn plant_report(manifest: &Manifest) -> PlantReport {
    let stats = |l: AbuseLabel| {
        let e = manifest.exposures_by_label.get(l.as_str()).copied().unwrap_or(0);
        let d = manifest.diffused_by_label.get(l.as_str()).copied().unwrap_or(0);
        let rate = if e == 0 { 0.0 } else { d as f64 / e as f64 };
        let se = if e == 0 { 0.0 } else { (rate * (1.0 - rate) / e as f64).sqrt() };
        (e, d, rate, se)
    };
    let (ne, _, nrate, nse) = stats(AbuseLabel::Normal);
    let effects = AbuseLabel::ALL
        .iter()
        .filter_map(|&l| {
            let (e, d, rate, se) = stats(l);
            if e == 0 {
                return None;
            }
            let has_ref = ne > 0 && nrate > 0.0;
            let ratio = has_ref.then(|| rate / nrate);
            let ratio_stderr = ratio.map(|r| r * ((se / rate.max(1e-12)).powi(2) + (nse / nrate).powi(2)).sqrt());
            Some(LabelEffect {
                label: l,
                exposures: e,
                diffused: d,
                rate,
                rate_stderr: se,
                ratio_to_normal: ratio,
                ratio_stderr,
            })
        })
        .collect();
    PlantReport {
        signal_strength: manifest.config.signal_strength,
        effects,
        ratio_diffusion_correlation: manifest.ratio_diffusion_correlation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::validate_corpus;

    fn small(seed: u64) -> SynthConfig {
        SynthConfig {
            n_users: 200,
            n_messages: 300,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn output_is_valid() {
        let g = generate(&small(1)).unwrap();
        assert_eq!(validate_corpus(&g.corpus), vec![]);
        assert_eq!(g.manifest.n_tweets, 300);
        assert_eq!(g.manifest.n_users, 200);
        assert_eq!(g.manifest.n_interactions, g.corpus.interactions().len());
        assert_eq!(
            g.manifest.diffused_edges + g.manifest.not_diffused_edges,
            g.manifest.n_interactions
        );
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(&small(4)).unwrap();
        let b = generate(&small(4)).unwrap();
        assert_eq!(a.corpus.canonical(), b.corpus.canonical());
        assert_eq!(a.manifest, b.manifest);
        let c = generate(&small(5)).unwrap();
        assert_ne!(a.corpus.canonical(), c.corpus.canonical());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small(0);
        c.label_priors = [0.5, 0.5, 0.5, 0.0];
        assert!(generate(&c).is_err());
        let mut c = small(0);
        c.base_rate = 1.5;
        assert!(generate(&c).is_err());
        let mut c = small(0);
        c.signal_strength = -0.1;
        assert!(generate(&c).is_err());
        let mut c = small(0);
        c.multipliers[0] = -1.0;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn probabilities_are_clipped() {
        let c = SynthConfig::default();
        assert_eq!(reaction_probability(&c, AbuseLabel::Hate, 10.0, 100.0), 1.0);
        assert!(reaction_probability(&c, AbuseLabel::Spam, 0.0, 1.0) == 0.0);
        let flat = SynthConfig {
            signal_strength: 0.0,
            ..Default::default()
        };
        let p = reaction_probability(&flat, AbuseLabel::Hate, 1.0, 50.0);
        assert_eq!(p, reaction_probability(&flat, AbuseLabel::Normal, 1.0, 0.01));
        assert_eq!(p, flat.base_rate);
    }

    #[test]
    fn toml_overrides_defaults() {
        let c = SynthConfig::from_toml("n_users = 50\nsignal_strength = 0.0\nseed = 3\n").unwrap();
        assert_eq!(c.n_users, 50);
        assert_eq!(c.signal_strength, 0.0);
        assert_eq!(c.n_messages, SynthConfig::default().n_messages);
        assert!(SynthConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn empty_config_gives_empty_report() {
        let g = generate(&SynthConfig {
            n_messages: 0,
            n_users: 20,
            ..Default::default()
        })
        .unwrap();
        assert!(plant_report(&g.manifest).effects.is_empty());
    }

    #[test]
    fn cascades_are_rooted() {
        let g = generate(&small(8)).unwrap();
        for c in crate::graph::derive_cascades(&g.corpus) {
            let author = &g.corpus.tweet(&c.message_id).unwrap().author_id;
            assert!(c.unrooted_edges(author).is_empty());
        }
    }
}
