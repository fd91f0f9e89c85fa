//! Seeded generator of labeled forum-style posts with planted,
//! label-correlated vocabulary.
//!
//! Most planted words sit outside the bundled lexicons, so n-gram features
//! separate the labels far better than lexicon counts do. Emotion words
//! from the lexicons appear in every label with a mild label-dependent bias.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{LabeledPost, TriageLabel};

/// Label shares, indexed by [`TriageLabel::index`].
pub const LABEL_SHARES: [f64; 4] = [0.54, 0.235, 0.12, 0.105];

const GREEN: &[&str] = &[
    "thanks",
    "welcome",
    "weekend",
    "garden",
    "recipe",
    "music",
    "walk",
    "sunny",
    "cheers",
    "community",
    "holiday",
    "football",
    "baking",
];
const AMBER: &[&str] = &[
    "appointment",
    "medication",
    "therapist",
    "waiting",
    "prescription",
    "doses",
    "referral",
    "sessions",
    "assessment",
    "exams",
    "deadline",
];
const RED: &[&str] = &[
    "spiraling",
    "emergency",
    "relapse",
    "ambulance",
    "shaking",
    "hospital",
    "breathe",
    "urgent",
    "collapsed",
    "meltdown",
    "blackout",
];
const CRISIS: &[&str] = &[
    "goodbye",
    "tonight",
    "pills",
    "overdose",
    "rope",
    "bridge",
    "letter",
    "final",
    "kill myself",
    "end my life",
    "want to die",
    "i don't want to live",
];
const FILLER: &[&str] = &[
    "i", "the", "and", "it", "was", "to", "a", "my", "of", "about", "just", "some", "really",
    "day", "week", "time", "people", "things", "think", "know", "went", "been", "still", "bit",
    "much", "here", "everyone", "lately", "again", "with", "at", "on", "so", "me",
];
const NEGATIVE: &[&str] = &[
    "sad",
    "tired",
    "lonely",
    "awful",
    "anxious",
    "stressed",
    "hopeless",
    "worthless",
    "scared",
    "upset",
    "miserable",
    "empty",
];
const POSITIVE: &[&str] = &[
    "happy", "good", "glad", "calm", "grateful", "hopeful", "proud", "relieved",
];
const RANKS: &[&str] = &[
    "New Member",
    "Member",
    "Frequent Visitor",
    "Community Champion",
    "Moderator",
];

fn pool(label: TriageLabel) -> &'static [&'static str] {
    match label {
        TriageLabel::Green => GREEN,
        TriageLabel::Amber => AMBER,
        TriageLabel::Red => RED,
        TriageLabel::Crisis => CRISIS,
    }
}

/// Chance that an emotion word is negative, per label.
fn negative_bias(label: TriageLabel) -> f64 {
    match label {
        TriageLabel::Green => 0.35,
        TriageLabel::Amber => 0.6,
        TriageLabel::Red => 0.7,
        TriageLabel::Crisis => 0.8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub train: usize,
    pub test: usize,
    pub seed: u64,
    /// Per-token chance of a planted word from the post's own label.
    pub signal: f64,
    /// Per-token chance of a planted word from a different label.
    pub confusion: f64,
    /// Per-token chance of a lexicon emotion word.
    pub emotion: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            train: 1200,
            test: 400,
            seed: 7,
            signal: 0.12,
            confusion: 0.03,
            emotion: 0.1,
        }
    }
}

/// Labels in the configured shares, shuffled.
fn label_sequence(n: usize, rng: &mut ChaCha8Rng) -> Vec<TriageLabel> {
    let mut counts = LABEL_SHARES.map(|s| (s * n as f64).round() as usize);
    let assigned: usize = counts[1..].iter().sum();
    counts[0] = n.saturating_sub(assigned);
    let mut labels: Vec<TriageLabel> = TriageLabel::ALL
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, counts[l.index()]))
        .take(n)
        .collect();
    labels.shuffle(rng);
    labels
}

fn sentence(label: TriageLabel, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(5..=11);
    let mut words: Vec<&str> = Vec::with_capacity(len);
    for _ in 0..len {
        let roll: f64 = rng.gen();
        let word = if roll < cfg.signal {
            *pool(label).choose(rng).unwrap()
        } else if roll < cfg.signal + cfg.confusion {
            let other = TriageLabel::ALL[rng.gen_range(0..4)];
            *pool(other).choose(rng).unwrap()
        } else if roll < cfg.signal + cfg.confusion + cfg.emotion {
            let list = if rng.gen_bool(negative_bias(label)) {
                NEGATIVE
            } else {
                POSITIVE
            };
            *list.choose(rng).unwrap()
        } else {
            *FILLER.choose(rng).unwrap()
        };
        words.push(word);
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        s.replace_range(..1, &first.to_uppercase());
    }
    s.push(*['.', '.', '.', '!', '?'].choose(rng).unwrap());
    s
}

fn post(id: String, label: TriageLabel, cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> LabeledPost {
    let sentences: Vec<String> = (0..rng.gen_range(2..=5))
        .map(|_| sentence(label, cfg, rng))
        .collect();
    let mut body = sentences.join(" ");
    if rng.gen_bool(0.05) {
        body.push_str(" www.example.org/thread");
    }
    let rank = *RANKS.choose(rng).unwrap();
    LabeledPost::new(id, rank, body, Some(label))
}

/// `n` posts with ids `{prefix}-{i}`.
pub fn generate(
    n: usize,
    prefix: &str,
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<LabeledPost> {
    label_sequence(n, rng)
        .into_iter()
        .enumerate()
        .map(|(i, label)| post(format!("{prefix}-{i}"), label, cfg, rng))
        .collect()
}

/// Train and test corpora drawn from one seeded stream.
pub fn synthetic_split(cfg: &SynthConfig) -> (Vec<LabeledPost>, Vec<LabeledPost>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let train = generate(cfg.train, "train", cfg, &mut rng);
    let test = generate(cfg.test, "test", cfg, &mut rng);
    (train, test)
}
