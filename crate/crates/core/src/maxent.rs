//! Maximum entropy per unit weight, input sources and input processes.
//!
//! For a finite set of weighted strings the entropy per average weight is
//! maximised by `q(z) = e^{-w(z) R}`, where `R` is the positive root of
//! `sum_z e^{-w(z) s} = 1`; the maximum equals `R`. An input source is a
//! sequence of supports that are nonempty, accepted by the system and
//! pairwise disjoint. An IID block process is an input process when the
//! concatenations of positive-probability block tuples form such a source;
//! otherwise the same string is produced by tuples of different lengths and
//! its probability is counted twice.
//!
//! All entropies are in nats.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::Matcher;
use crate::dsl::{DslError, SystemDef};
use crate::exec::Execution;
use crate::genfun::{bisect_threshold, check_tol, GenFunError, DEFAULT_MAX_ITER};

/// Tolerance on `sum p = 1` for a PMF.
pub const PROB_SUM_TOL: f64 = 1e-9;
/// Default cap on concatenations materialised by [`validate_input_process`].
pub const DEFAULT_MAX_TUPLES: u64 = 1_000_000;
/// Relative tolerance when comparing a declared weight with the additive one.
const WEIGHT_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaxentError {
    #[error("support is empty")]
    EmptySupport,
    #[error("string `{0}` appears twice in one support")]
    DuplicateWord(String),
    #[error("string `{word}` has invalid weight {weight}")]
    BadWeight { word: String, weight: f64 },
    #[error("invalid probabilities: {0}")]
    BadProbabilities(String),
    #[error("support/PMF line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Solver(#[from] GenFunError),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

/// A string as a sequence of symbol labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<String>);

impl Word {
    /// Parses text without an alphabet: `.` separates labels if present,
    /// otherwise each character is a label. `eps` is the empty word.
    pub fn parse_plain(text: &str) -> Word {
        let text = text.trim();
        if text.is_empty() || text == "eps" {
            Word::default()
        } else if text.contains('.') {
            Word(text.split('.').map(str::to_string).collect())
        } else {
            Word(text.chars().map(String::from).collect())
        }
    }

    /// Parses text against a system alphabet.
    pub fn parse_in(system: &SystemDef, text: &str) -> Result<Word, DslError> {
        Ok(Word::from_indices(system, &system.parse_word(text)?))
    }

    pub fn from_indices(system: &SystemDef, word: &[usize]) -> Word {
        Word(
            word.iter()
                .map(|&i| system.alphabet[i].label.clone())
                .collect(),
        )
    }

    /// Symbol indices in `system`; `None` if a label is not in the alphabet.
    pub fn indices(&self, system: &SystemDef) -> Option<Vec<usize>> {
        self.0.iter().map(|l| system.symbol_index(l)).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("eps")
        } else if self.0.iter().all(|l| l.chars().count() == 1) {
            f.write_str(&self.0.concat())
        } else {
            f.write_str(&self.0.join("."))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportItem {
    pub word: Word,
    pub weight: f64,
}

/// Nonempty finite set of distinct strings with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSupport {
    items: Vec<SupportItem>,
}

impl WeightedSupport {
    pub fn new(items: Vec<SupportItem>) -> Result<Self, MaxentError> {
        if items.is_empty() {
            return Err(MaxentError::EmptySupport);
        }
        let mut seen = HashSet::new();
        for it in &items {
            if !(it.weight > 0.0 && it.weight.is_finite()) {
                return Err(MaxentError::BadWeight {
                    word: it.word.to_string(),
                    weight: it.weight,
                });
            }
            if !seen.insert(&it.word) {
                return Err(MaxentError::DuplicateWord(it.word.to_string()));
            }
        }
        Ok(WeightedSupport { items })
    }

    /// Support from words over `system`, each weighted additively.
    pub fn from_system(system: &SystemDef, words: &[&str]) -> Result<Self, MaxentError> {
        let items = words
            .iter()
            .map(|t| {
                let idx = system.parse_word(t)?;
                Ok(SupportItem {
                    word: Word::from_indices(system, &idx),
                    weight: system.word_weight(&idx),
                })
            })
            .collect::<Result<Vec<_>, MaxentError>>()?;
        Self::new(items)
    }

    /// Support given only by weights; words are `z1`, `z2`, ...
    pub fn from_weights(weights: &[f64]) -> Result<Self, MaxentError> {
        Self::new(
            weights
                .iter()
                .enumerate()
                .map(|(i, &w)| SupportItem {
                    word: Word(vec![format!("z{}", i + 1)]),
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn items(&self) -> &[SupportItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.items.iter().map(|i| i.weight).collect()
    }
}

/// Probability mass function on a weighted support.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    support: WeightedSupport,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(support: WeightedSupport, probs: Vec<f64>) -> Result<Self, MaxentError> {
        if probs.len() != support.len() {
            return Err(MaxentError::BadProbabilities(format!(
                "{} probabilities for {} strings",
                probs.len(),
                support.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(MaxentError::BadProbabilities(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(MaxentError::BadProbabilities(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Pmf { support, probs })
    }

    pub fn support(&self) -> &WeightedSupport {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Entropy in nats; zero-probability items contribute nothing.
    pub fn entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.ln())
            .sum()
    }

    pub fn mean_weight(&self) -> f64 {
        self.probs
            .iter()
            .zip(self.support.items())
            .map(|(p, it)| p * it.weight)
            .sum()
    }

    /// Items with positive probability.
    pub fn positive_items(&self) -> impl Iterator<Item = (&SupportItem, f64)> {
        self.support
            .items()
            .iter()
            .zip(self.probs.iter().copied())
            .filter(|(_, p)| *p > 0.0)
    }

    /// The PMF restricted to its positive-probability items.
    pub fn truncated(&self) -> Pmf {
        let (items, probs): (Vec<_>, Vec<_>) =
            self.positive_items().map(|(it, p)| (it.clone(), p)).unzip();
        Pmf {
            support: WeightedSupport { items },
            probs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    /// Maximum entropy per average weight, nats per weight unit.
    pub rate: f64,
    /// `sum e^{-w rate} - 1`.
    pub residual: f64,
    /// Entropy of the maximising PMF.
    pub entropy: f64,
    /// Average weight under the maximising PMF.
    pub mean_weight: f64,
    /// Single-item support: the only PMF is deterministic and the rate is 0.
    pub degenerate: bool,
}

fn partition_sum(weights: &[f64], s: f64) -> f64 {
    weights.iter().map(|w| (-w * s).exp()).sum()
}

/// Positive root `R` of `sum e^{-w s} = 1` by bisection.
///
/// The left side falls strictly from `|support| >= 2` at `s = 0`. The upper
/// bracket end is returned, where the sum is just below 1.
pub fn solve_rate(support: &WeightedSupport, tol: f64) -> Result<RateResult, MaxentError> {
    check_tol(tol)?;
    if support.len() == 1 {
        return Ok(RateResult {
            rate: 0.0,
            residual: 0.0,
            entropy: 0.0,
            mean_weight: support.items[0].weight,
            degenerate: true,
        });
    }
    let weights = support.weights();
    let (_, rate, _) = bisect_threshold(0.0, tol, DEFAULT_MAX_ITER, |s| {
        partition_sum(&weights, s) < 1.0
    })?;
    let z = partition_sum(&weights, rate);
    let (mut entropy, mut mean_weight) = (0.0, 0.0);
    for &w in &weights {
        let p = (-w * rate).exp() / z;
        mean_weight += p * w;
        if p > 0.0 {
            entropy -= p * p.ln();
        }
    }
    Ok(RateResult {
        rate,
        residual: z - 1.0,
        entropy,
        mean_weight,
        degenerate: false,
    })
}

/// `q(z) = e^{-w(z) R}`, renormalised to absorb the bisection residual.
pub fn maxentropic_pmf(support: &WeightedSupport, tol: f64) -> Result<Pmf, MaxentError> {
    let r = solve_rate(support, tol)?;
    let raw: Vec<f64> = support
        .items()
        .iter()
        .map(|it| (-it.weight * r.rate).exp())
        .collect();
    let z: f64 = raw.iter().sum();
    Pmf::new(support.clone(), raw.into_iter().map(|q| q / z).collect())
}

/// `H(p) / E_p[w]` in nats per weight unit.
pub fn entropy_per_weight(p: &Pmf) -> f64 {
    p.entropy() / p.mean_weight()
}

/// Why a sequence of supports is not an input source.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyLevel {
        level: usize,
    },
    Rejected {
        level: usize,
        word: Word,
    },
    /// The same string lies in two levels.
    Overlap {
        first: usize,
        second: usize,
        word: Word,
    },
    /// Declared weight disagrees with the additive weight in the system.
    WeightMismatch {
        level: usize,
        word: Word,
        declared: f64,
        additive: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub verdict: Verdict,
    /// Levels actually examined; the verdict holds up to this depth only.
    pub verified_depth: usize,
    pub requested_depth: usize,
    /// The tuple budget ran out before `requested_depth`.
    pub partial: bool,
    /// Distinct strings per examined level.
    pub level_sizes: Vec<usize>,
    /// Block tuples whose concatenation repeats another tuple of the same
    /// length (harmless for the source property, reported for information).
    pub same_level_collisions: u64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.verdict == Verdict::Valid
    }

    /// The shared string for an overlap or the offending string otherwise.
    pub fn witness(&self) -> Option<&Word> {
        match &self.verdict {
            Verdict::Valid => None,
            Verdict::Invalid(v) => match v {
                Violation::EmptyLevel { .. } => None,
                Violation::Rejected { word, .. }
                | Violation::Overlap { word, .. }
                | Violation::WeightMismatch { word, .. } => Some(word),
            },
        }
    }

    /// One machine-readable line, e.g. `verdict: INVALID overlap levels=1,2 witness=01`.
    pub fn verdict_line(&self) -> String {
        let scope = if self.partial {
            format!("depth={} partial", self.verified_depth)
        } else {
            format!("depth={}", self.verified_depth)
        };
        match &self.verdict {
            Verdict::Valid => format!("verdict: VALID {scope}"),
            Verdict::Invalid(v) => {
                let detail = match v {
                    Violation::EmptyLevel { level } => format!("empty level={level}"),
                    Violation::Rejected { level, word } => {
                        format!("rejected level={level} witness={word}")
                    }
                    Violation::Overlap {
                        first,
                        second,
                        word,
                    } => format!("overlap levels={first},{second} witness={word}"),
                    Violation::WeightMismatch {
                        level,
                        word,
                        declared,
                        additive,
                    } => format!(
                        "weight level={level} witness={word} declared={declared} additive={additive}"
                    ),
                };
                format!("verdict: INVALID {detail} {scope}")
            }
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "requested_depth: {}", self.requested_depth)?;
        writeln!(f, "verified_depth: {}", self.verified_depth)?;
        let sizes: Vec<String> = self.level_sizes.iter().map(usize::to_string).collect();
        writeln!(f, "level_sizes: {}", sizes.join(","))?;
        writeln!(f, "same_level_collisions: {}", self.same_level_collisions)?;
        writeln!(f, "{}", self.verdict_line())
    }
}

/// Checks the input-source conditions on the given prefix of levels:
/// every level nonempty, every string accepted with its additive weight,
/// and no string shared between two levels. Level numbers in the report
/// are 1-based.
pub fn validate_input_source(supports: &[WeightedSupport], system: &SystemDef) -> ValidationReport {
    let sizes = supports.iter().map(WeightedSupport::len).collect();
    let verdict = check_levels(
        supports
            .iter()
            .map(|s| s.items().iter().map(|it| (&it.word, it.weight))),
        system,
    );
    ValidationReport {
        verdict,
        verified_depth: supports.len(),
        requested_depth: supports.len(),
        partial: false,
        level_sizes: sizes,
        same_level_collisions: 0,
    }
}

fn check_levels<'a, L, I>(levels: L, system: &SystemDef) -> Verdict
where
    L: IntoIterator<Item = I>,
    I: IntoIterator<Item = (&'a Word, f64)>,
{
    let matcher = Matcher::new(system);
    let mut first_level: HashMap<&Word, usize> = HashMap::new();
    for (i, items) in levels.into_iter().enumerate() {
        let level = i + 1;
        let mut any = false;
        for (word, declared) in items {
            any = true;
            let Some(idx) = word.indices(system) else {
                return Verdict::Invalid(Violation::Rejected {
                    level,
                    word: word.clone(),
                });
            };
            if !matcher.accepts(&idx) {
                return Verdict::Invalid(Violation::Rejected {
                    level,
                    word: word.clone(),
                });
            }
            let additive = system.word_weight(&idx);
            if (declared - additive).abs() > WEIGHT_MATCH_TOL * additive.max(1.0) {
                return Verdict::Invalid(Violation::WeightMismatch {
                    level,
                    word: word.clone(),
                    declared,
                    additive,
                });
            }
            match first_level.get(word) {
                Some(&first) if first != level => {
                    return Verdict::Invalid(Violation::Overlap {
                        first,
                        second: level,
                        word: word.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    first_level.insert(word, level);
                }
            }
        }
        if !any {
            return Verdict::Invalid(Violation::EmptyLevel { level });
        }
    }
    Verdict::Valid
}

/// Truncated supports `X_1..X_depth` of an IID block process: the distinct
/// concatenations of `l` positive-probability blocks. Stops early once the
/// number of concatenations formed would exceed `max_tuples`; the returned
/// flag is true in that case.
pub fn truncated_supports(
    pmf: &Pmf,
    depth: usize,
    max_tuples: u64,
) -> (Vec<WeightedSupport>, u64, bool) {
    let blocks: Vec<&SupportItem> = pmf.positive_items().map(|(it, _)| it).collect();
    let mut levels: Vec<WeightedSupport> = Vec::new();
    let mut formed = 0u64;
    let mut collisions = 0u64;
    let mut prev: Vec<SupportItem> = vec![SupportItem {
        word: Word::default(),
        weight: 0.0,
    }];
    for _ in 0..depth {
        let cost = prev.len() as u64 * blocks.len() as u64;
        if formed + cost > max_tuples {
            return (levels, collisions, true);
        }
        formed += cost;
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for x in &prev {
            for y in &blocks {
                let word = x.word.concat(&y.word);
                if seen.insert(word.clone()) {
                    next.push(SupportItem {
                        word,
                        weight: x.weight + y.weight,
                    });
                } else {
                    collisions += 1;
                }
            }
        }
        levels.push(WeightedSupport {
            items: next.clone(),
        });
        prev = next;
    }
    (levels, collisions, false)
}

/// Materialises the truncated supports to `depth` and checks that they form
/// an input source of `system`. A budget stop yields a verdict on the levels
/// built so far, flagged partial.
pub fn validate_input_process(
    pmf: &Pmf,
    system: &SystemDef,
    depth: usize,
    max_tuples: u64,
) -> Result<ValidationReport, MaxentError> {
    if depth == 0 {
        return Err(MaxentError::BadParameter("depth must be at least 1".into()));
    }
    let (levels, collisions, partial) = truncated_supports(pmf, depth, max_tuples);
    let mut report = validate_input_source(&levels, system);
    report.requested_depth = depth;
    report.partial = partial;
    report.same_level_collisions = collisions;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateBound {
    /// Largest per-level rate seen.
    pub bound: f64,
    /// Per-level rates `R_{X_1}, R_{X_2}, ...`.
    pub sequence: Vec<f64>,
}

/// Per-level maximum rates of a source prefix and their maximum, the
/// finite-depth stand-in for the limsup.
pub fn rate_bound(supports: &[WeightedSupport], tol: f64) -> Result<RateBound, MaxentError> {
    if supports.is_empty() {
        return Err(MaxentError::EmptySupport);
    }
    let sequence = supports
        .iter()
        .map(|s| solve_rate(s, tol).map(|r| r.rate))
        .collect::<Result<Vec<_>, _>>()?;
    let bound = sequence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RateBound { bound, sequence })
}

/// Phrase alphabet `(0|...|0^k)(1|...|1^j)` of the `(j,k)` system: a run of
/// zeros followed by a run of ones, weighted by length.
pub fn jk_phrase_support(j: usize, k: usize) -> Result<WeightedSupport, MaxentError> {
    if j == 0 || k == 0 {
        return Err(DslError::InvalidRunLength { j, k }.into());
    }
    let mut items = Vec::with_capacity(j * k);
    for zeros in 1..=k {
        for ones in 1..=j {
            let mut labels = vec!["0".to_string(); zeros];
            labels.extend(std::iter::repeat_n("1".to_string(), ones));
            items.push(SupportItem {
                word: Word(labels),
                weight: (zeros + ones) as f64,
            });
        }
    }
    WeightedSupport::new(items)
}

/// Levels `X_l = Y^l` of the phrase source, `l = 1..=depth`.
pub fn jk_source_levels(
    j: usize,
    k: usize,
    depth: usize,
) -> Result<Vec<WeightedSupport>, MaxentError> {
    let phrases = jk_phrase_support(j, k)?;
    let uniform = vec![1.0 / phrases.len() as f64; phrases.len()];
    let pmf = Pmf::new(phrases, uniform)?;
    Ok(truncated_supports(&pmf, depth, u64::MAX).0)
}

/// Result of drawing IID blocks from a PMF.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub blocks: usize,
    pub seed: u64,
    /// Concatenation of the drawn blocks.
    pub word: Word,
    /// Exact per-block entropy `H(Y)` from the PMF.
    pub entropy: f64,
    /// Exact `E[w(Y)]` from the PMF.
    pub mean_weight: f64,
    /// `entropy / mean_weight`.
    pub rate: f64,
    /// Plug-in entropy of the observed block frequencies.
    pub empirical_entropy: f64,
    /// Observed average block weight.
    pub empirical_mean_weight: f64,
    pub empirical_rate: f64,
    /// Delta-method standard error of the plug-in rate under the exact PMF.
    pub rate_std_error: f64,
    /// Membership of the concatenation, when a system was supplied.
    pub accepted: Option<bool>,
}

/// Draws `n_blocks` IID blocks with a ChaCha8 generator seeded by `seed`.
pub fn sample_process(
    pmf: &Pmf,
    n_blocks: usize,
    seed: u64,
    system: Option<&SystemDef>,
) -> Result<SampleReport, MaxentError> {
    if n_blocks == 0 {
        return Err(MaxentError::BadParameter("at least one block".into()));
    }
    let items = pmf.support().items();
    let dist = WeightedIndex::new(pmf.probs())
        .map_err(|e| MaxentError::BadProbabilities(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; items.len()];
    let mut labels = Vec::new();
    for _ in 0..n_blocks {
        let i = dist.sample(&mut rng);
        counts[i] += 1;
        labels.extend(items[i].word.0.iter().cloned());
    }
    let word = Word(labels);

    let n = n_blocks as f64;
    let (mut emp_h, mut emp_w) = (0.0, 0.0);
    for (c, it) in counts.iter().zip(items) {
        if *c > 0 {
            let f = *c as f64 / n;
            emp_h -= f * f.ln();
            emp_w += f * it.weight;
        }
    }

    let entropy = pmf.entropy();
    let mean_weight = pmf.mean_weight();
    let rate = entropy / mean_weight;
    // influence function of H/W: (-ln p - H)/W - H (w - W)/W^2
    let variance: f64 = pmf
        .positive_items()
        .map(|(it, p)| {
            let psi = (-p.ln() - entropy) / mean_weight
                - entropy * (it.weight - mean_weight) / (mean_weight * mean_weight);
            p * psi * psi
        })
        .sum();

    let accepted = system.map(|sys| {
        word.indices(sys)
            .is_some_and(|idx| Matcher::new(sys).accepts(&idx))
    });
    Ok(SampleReport {
        blocks: n_blocks,
        seed,
        word,
        entropy,
        mean_weight,
        rate,
        empirical_entropy: emp_h,
        empirical_mean_weight: emp_w,
        empirical_rate: emp_h / emp_w,
        rate_std_error: (variance / n).sqrt(),
        accepted,
    })
}

/// Independent replicas, one per seed, in seed order.
pub fn sample_replicas(
    pmf: &Pmf,
    n_blocks: usize,
    seeds: &[u64],
    system: Option<&SystemDef>,
    exec: Execution,
) -> Result<Vec<SampleReport>, MaxentError> {
    exec.map(seeds, |&seed| sample_process(pmf, n_blocks, seed, system))
        .into_iter()
        .collect()
}

/// Reads `string weight [prob]` lines (`#` comments allowed). Strings are
/// parsed against `system` when given, otherwise with [`Word::parse_plain`].
/// With a system the weight column may be `-` to use the additive weight.
/// Returns the support and, if every line had one, the probability column.
pub fn parse_support_text(
    text: &str,
    system: Option<&SystemDef>,
) -> Result<(WeightedSupport, Option<Vec<f64>>), MaxentError> {
    let mut items = Vec::new();
    let mut probs = Vec::new();
    let mut with_prob = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let bad = |message: String| MaxentError::Parse { line, message };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(bad("expected `string weight [prob]`".into()));
        }
        let (word, additive) = match system {
            Some(sys) => {
                let idx = sys.parse_word(fields[0]).map_err(|e| bad(e.to_string()))?;
                (Word::from_indices(sys, &idx), Some(sys.word_weight(&idx)))
            }
            None => (Word::parse_plain(fields[0]), None),
        };
        let weight = match (fields[1], additive) {
            ("-", Some(w)) => w,
            (raw, _) => raw
                .parse::<f64>()
                .map_err(|_| bad(format!("bad weight `{raw}`")))?,
        };
        if let Some(p) = fields.get(2) {
            probs.push(
                p.parse::<f64>()
                    .map_err(|_| bad(format!("bad probability `{p}`")))?,
            );
            with_prob += 1;
        }
        items.push(SupportItem { word, weight });
    }
    if with_prob != 0 && with_prob != items.len() {
        return Err(MaxentError::Parse {
            line: 0,
            message: "probability column must be given on every line or none".into(),
        });
    }
    let support = WeightedSupport::new(items)?;
    Ok((support, (with_prob > 0).then_some(probs)))
}

/// Reads a PMF file: `string weight prob` on every line.
pub fn parse_pmf_text(text: &str, system: Option<&SystemDef>) -> Result<Pmf, MaxentError> {
    match parse_support_text(text, system)? {
        (support, Some(probs)) => Pmf::new(support, probs),
        (_, None) => Err(MaxentError::Parse {
            line: 0,
            message: "PMF file needs a probability column".into(),
        }),
    }
}

/// Writes `string weight prob` lines.
pub fn write_pmf(pmf: &Pmf) -> String {
    pmf.support()
        .items()
        .iter()
        .zip(pmf.probs())
        .map(|(it, p)| format!("{} {} {}\n", it.word, it.weight, p))
        .collect()
}
