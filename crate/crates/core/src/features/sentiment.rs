//! Lexicon polarity scorer.

use std::collections::HashMap;
use std::path::Path;

use crate::error::LexiconError;

const BUNDLED: &str = include_str!("../../data/lexicon.tsv");
const NEGATORS: [&str; 3] = ["not", "no", "never"];

/// Token → polarity in [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    polarity: HashMap<String, f64>,
}

impl Lexicon {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled lexicon is well-formed")
    }

    pub fn from_path(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses `token<TAB>polarity` lines; blank lines and `#` comments are
    /// skipped. Tokens are lowercased.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut polarity = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| LexiconError::BadLine {
                line: i + 1,
                reason: reason.to_owned(),
            };
            let mut cols = line.split('\t');
            let token = cols.next().map(str::trim).filter(|t| !t.is_empty());
            let value = cols.next().map(str::trim);
            let (Some(token), Some(value)) = (token, value) else {
                return Err(bad("expected `token<TAB>polarity`"));
            };
            let value: f64 = value.parse().map_err(|_| bad("polarity is not a number"))?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(bad("polarity outside [-1, 1]"));
            }
            polarity.insert(token.to_lowercase(), value);
        }
        Ok(Self { polarity })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Self {
            polarity: pairs
                .into_iter()
                .map(|(t, v)| (t.to_lowercase(), v.clamp(-1.0, 1.0)))
                .collect(),
        }
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.polarity.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.polarity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarity.is_empty()
    }

    /// Tokens sorted by name, for deterministic iteration.
    pub fn entries(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<_> = self.polarity.iter().map(|(k, &p)| (k.as_str(), p)).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }
}

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Mean polarity of the lexicon tokens in `text`, 0.0 when none match.
/// A negator directly before a matched token flips its sign.
pub fn sentiment_score(text: &str, lexicon: &Lexicon) -> f64 {
    let mut sum = 0.0;
    let mut matched = 0usize;
    let mut negate = false;
    for token in tokenize(text) {
        if let Some(p) = lexicon.get(&token) {
            sum += if negate { -p } else { p };
            matched += 1;
        }
        negate = NEGATORS.contains(&token.as_str());
    }
    if matched == 0 {
        0.0
    } else {
        (sum / matched as f64).clamp(-1.0, 1.0)
    }
}
