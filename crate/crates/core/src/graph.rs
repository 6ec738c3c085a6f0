//! Follower graph and per-message propagation edges.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::datamodel::{AbuseLabel, Corpus, Reaction, Timestamp};

/// Adjacency from each user to the set of users following them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FollowGraph {
    followers: BTreeMap<String, BTreeSet<String>>,
}

impl FollowGraph {
    pub fn followers(&self, user: &str) -> impl Iterator<Item = &str> {
        self.followers
            .get(user)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn out_degree(&self, user: &str) -> usize {
        self.followers.get(user).map_or(0, BTreeSet::len)
    }

    pub fn edge_count(&self) -> usize {
        self.followers.values().map(BTreeSet::len).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.followers.keys().map(String::as_str)
    }
}

/// Builds followee → followers adjacency. Every user appears as a node.
pub fn build_follow_graph(c: &Corpus) -> FollowGraph {
    let mut followers: BTreeMap<String, BTreeSet<String>> = c
        .users()
        .iter()
        .map(|u| (u.user_id.clone(), BTreeSet::new()))
        .collect();
    for f in c.follows() {
        followers
            .entry(f.followee_id.clone())
            .or_default()
            .insert(f.follower_id.clone());
    }
    FollowGraph { followers }
}

/// An edge is diffused iff the receiver reacted in any way.
pub fn label_diffusion(reaction: Reaction) -> bool {
    !matches!(reaction, Reaction::None)
}

/// One (spreader, receiver) link a message travelled along.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationEdge {
    pub message_id: String,
    pub spreader_id: String,
    pub receiver_id: String,
    pub diffused: bool,
    pub reaction: Reaction,
    /// Earliest event time observed on this link.
    pub timestamp: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageCascade {
    pub message_id: String,
    pub label: Option<AbuseLabel>,
    pub edges: Vec<PropagationEdge>,
}

impl MessageCascade {
    /// Edges whose spreader is neither `author` nor a receiver that
    /// diffused the message on some edge.
    pub fn unrooted_edges(&self, author: &str) -> Vec<&PropagationEdge> {
        let diffusers: HashSet<&str> = self
            .edges
            .iter()
            .filter(|e| e.diffused)
            .map(|e| e.receiver_id.as_str())
            .collect();
        self.edges
            .iter()
            .filter(|e| e.spreader_id != author && !diffusers.contains(e.spreader_id.as_str()))
            .collect()
    }

    pub fn diffused_count(&self) -> usize {
        self.edges.iter().filter(|e| e.diffused).count()
    }
}

/// Collapses interaction events into one cascade per message.
///
/// Repeated events on a link keep the strongest reaction and the earliest
/// timestamp. Edges are ordered by (timestamp, receiver, spreader) and
/// cascades by message id.
pub fn derive_cascades(c: &Corpus) -> Vec<MessageCascade> {
    type Link<'a> = (&'a str, &'a str);
    let mut per_message: BTreeMap<&str, HashMap<Link<'_>, (Reaction, Timestamp)>> =
        BTreeMap::new();
    for e in c.interactions() {
        let links = per_message.entry(e.message_id.as_str()).or_default();
        links
            .entry((e.spreader_id.as_str(), e.receiver_id.as_str()))
            .and_modify(|(reaction, ts)| {
                *reaction = (*reaction).max(e.reaction);
                *ts = (*ts).min(e.timestamp);
            })
            .or_insert((e.reaction, e.timestamp));
    }

    per_message
        .into_iter()
        .map(|(message_id, links)| {
            let mut edges: Vec<PropagationEdge> = links
                .into_iter()
                .map(|((spreader, receiver), (reaction, timestamp))| PropagationEdge {
                    message_id: message_id.to_owned(),
                    spreader_id: spreader.to_owned(),
                    receiver_id: receiver.to_owned(),
                    diffused: label_diffusion(reaction),
                    reaction,
                    timestamp,
                })
                .collect();
            edges.sort_by(|a, b| {
                (a.timestamp, &a.receiver_id, &a.spreader_id).cmp(&(
                    b.timestamp,
                    &b.receiver_id,
                    &b.spreader_id,
                ))
            });
            MessageCascade {
                message_id: message_id.to_owned(),
                label: c.tweet(message_id).and_then(|t| t.label),
                edges,
            }
        })
        .collect()
}

/// Wire form of a cascade in `cascades.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeRecord {
    pub message_id: String,
    pub label: Option<AbuseLabel>,
    pub edges: Vec<CascadeEdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeEdgeRecord {
    pub spreader_id: String,
    pub receiver_id: String,
    pub reaction: Reaction,
    pub diffused: bool,
}

impl From<&MessageCascade> for CascadeRecord {
    fn from(c: &MessageCascade) -> Self {
        CascadeRecord {
            message_id: c.message_id.clone(),
            label: c.label,
            edges: c
                .edges
                .iter()
                .map(|e| CascadeEdgeRecord {
                    spreader_id: e.spreader_id.clone(),
                    receiver_id: e.receiver_id.clone(),
                    reaction: e.reaction,
                    diffused: e.diffused,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::{FollowEdge, InteractionEvent, TweetRecord, UserRecord};
    use chrono::{Duration, TimeZone, Utc};

    fn t0() -> Timestamp {
        Utc.with_ymd_and_hms(2021, 3, 1, 12, 0, 0).unwrap()
    }

    fn user(id: &str) -> UserRecord {
        UserRecord {
            user_id: id.into(),
            followers_count: 1,
            friends_count: 1,
            verified: false,
            has_profile_url: false,
            has_description: false,
            status_count: 1,
            created_at: t0() - Duration::days(30),
        }
    }

    fn corpus(follows: &[(&str, &str)], events: Vec<InteractionEvent>) -> Corpus {
        let users = ["u1", "u2", "u3", "u4"].map(user).to_vec();
        let tweets = vec![TweetRecord {
            tweet_id: "m1".into(),
            author_id: "u1".into(),
            text: String::new(),
            label: Some(AbuseLabel::Abusive),
            created_at: t0(),
            is_retweet: false,
            retweet_count: 0,
            favorited_count: 0,
            quoted_status: false,
            hashtags: 0,
            urls: 0,
            media: 0,
            mentions: 0,
        }];
        let follows = follows
            .iter()
            .map(|(a, b)| FollowEdge {
                followee_id: (*a).into(),
                follower_id: (*b).into(),
            })
            .collect();
        Corpus::new(users, tweets, follows, events, t0() + Duration::days(1))
    }

    fn ev(s: &str, r: &str, reaction: Reaction, minutes: i64) -> InteractionEvent {
        InteractionEvent {
            message_id: "m1".into(),
            spreader_id: s.into(),
            receiver_id: r.into(),
            reaction,
            timestamp: t0() + Duration::minutes(minutes),
        }
    }

    #[test]
    fn follow_graph_neighbors() {
        let g = build_follow_graph(&corpus(&[("u1", "u2"), ("u1", "u3")], vec![]));
        assert_eq!(g.followers("u1").collect::<Vec<_>>(), ["u2", "u3"]);
        assert_eq!(g.followers("u2").count(), 0);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn empty_follows_gives_empty_neighborhoods() {
        let g = build_follow_graph(&corpus(&[], vec![]));
        assert_eq!(g.nodes().count(), 4);
        assert!(g.nodes().all(|n| g.out_degree(n) == 0));
    }

    #[test]
    fn reaction_and_exposure_edges() {
        let c = corpus(
            &[("u1", "u2"), ("u1", "u3")],
            vec![ev("u1", "u2", Reaction::Retweet, 1), ev("u1", "u3", Reaction::None, 2)],
        );
        let cascades = derive_cascades(&c);
        assert_eq!(cascades.len(), 1);
        let e = &cascades[0].edges;
        assert_eq!((e[0].receiver_id.as_str(), e[0].diffused), ("u2", true));
        assert_eq!((e[1].receiver_id.as_str(), e[1].diffused), ("u3", false));
        assert_eq!(cascades[0].label, Some(AbuseLabel::Abusive));
    }

    #[test]
    fn no_events_no_cascade() {
        assert!(derive_cascades(&corpus(&[("u1", "u2")], vec![])).is_empty());
    }

    #[test]
    fn duplicates_collapse_to_strongest() {
        let events = vec![ev("u1", "u2", Reaction::Like, 5), ev("u1", "u2", Reaction::None, 1)];
        let c = corpus(&[("u1", "u2")], events);
        let cascades = derive_cascades(&c);
        assert_eq!(cascades[0].edges.len(), 1);
        let e = &cascades[0].edges[0];
        assert!(e.diffused);
        assert_eq!(e.reaction, Reaction::Like);
        assert_eq!(e.timestamp, t0() + Duration::minutes(1));
    }

    #[test]
    fn diffusion_labels() {
        assert!(label_diffusion(Reaction::Reply));
        assert!(label_diffusion(Reaction::Like));
        assert!(label_diffusion(Reaction::Retweet));
        assert!(label_diffusion(Reaction::Quote));
        assert!(!label_diffusion(Reaction::None));
    }

    #[test]
    fn unrooted_edges_detects_orphan_spreaders() {
        let c = corpus(
            &[("u1", "u2"), ("u2", "u3"), ("u3", "u4")],
            vec![
                ev("u1", "u2", Reaction::Reply, 1),
                ev("u2", "u3", Reaction::None, 2),
                ev("u3", "u4", Reaction::Like, 3),
            ],
        );
        let cascade = &derive_cascades(&c)[0];
        let orphans = cascade.unrooted_edges("u1");
        assert_eq!(orphans.len(), 1);
        assert_eq!(orphans[0].spreader_id, "u3");
    }
}
