//! Weight spectrum of a system by explicit enumeration, and the finite-horizon
//! capacity estimators built on it.
//!
//! Enumeration runs a best-first search, lightest string first, over the
//! trimmed DFA of the system. The search is split into shards by fixed-length
//! prefixes; shards are disjoint, run independently (in parallel when
//! requested) and their weight histograms are merged and binned. Strings are
//! deduplicated by exact label sequence within each weight group. The DFA
//! already gives one path per string, so any duplicate found is reported as
//! an anomaly count rather than silently dropped.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{AutomatonError, Dfa};
use crate::dsl::SystemDef;
use crate::exec::Execution;
use crate::genfun::{abscissa, eval_real, CapacityKind, GenExpr, GenFunError, DEFAULT_TOL};

pub const DEFAULT_WEIGHT_EPSILON: f64 = 1e-9;
/// Enumeration splits into at least this many prefix shards when the
/// language allows it.
const TARGET_SHARDS: usize = 64;
const MAX_SHARD_DEPTH: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("estimator needs at least 2 spectrum entries, got {0}")]
    TooFewEntries(usize),
    #[error("generating function diverges at s = {0}")]
    Divergent(f64),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("spectrum file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    GenFun(#[from] GenFunError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub nu: f64,
    pub count: u64,
}

/// Distinct positive string weights `nu_1 < nu_2 < ...` with the number of
/// distinct accepted strings at each, up to a horizon.
///
/// The empty string (weight 0) is not an entry; `contains_empty` records it.
/// An incomplete spectrum (enumeration budget exhausted) holds only the
/// prefix of bins known to be complete, and `horizon` is then the exclusive
/// weight bound of that prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpectrum {
    entries: Vec<SpectrumEntry>,
    cumulative: Vec<u64>,
    weight_epsilon: f64,
    horizon: f64,
    complete: bool,
    contains_empty: bool,
    /// Candidate strings visited by the search (0 for synthetic spectra).
    pub visited: u64,
    /// Duplicate label sequences met during enumeration.
    pub duplicates: u64,
}

impl WeightSpectrum {
    /// Bins `(weight, count)` pairs: sorted weights closer than `epsilon` to
    /// their predecessor share a bin, labelled by its smallest weight.
    /// Zero counts and non-positive weights are rejected.
    pub fn from_weighted_counts(
        mut pairs: Vec<(f64, u64)>,
        weight_epsilon: f64,
        horizon: f64,
        contains_empty: bool,
    ) -> Result<Self, SpectrumError> {
        if weight_epsilon.is_nan() || weight_epsilon < 0.0 {
            return Err(SpectrumError::BadParameter(format!(
                "weight epsilon {weight_epsilon}"
            )));
        }
        if let Some(&(w, c)) = pairs
            .iter()
            .find(|(w, c)| w.is_nan() || *w <= 0.0 || *c == 0)
        {
            return Err(SpectrumError::BadParameter(format!(
                "spectrum pair ({w}, {c}) needs positive weight and count"
            )));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let bins = bin_sorted(&pairs, weight_epsilon);
        Ok(Self::from_bins(
            bins,
            weight_epsilon,
            horizon,
            true,
            contains_empty,
        ))
    }

    fn from_bins(
        bins: Vec<Bin>,
        weight_epsilon: f64,
        horizon: f64,
        complete: bool,
        contains_empty: bool,
    ) -> Self {
        let entries: Vec<SpectrumEntry> = bins
            .iter()
            .map(|b| SpectrumEntry {
                nu: b.nu,
                count: b.count,
            })
            .collect();
        let cumulative = entries
            .iter()
            .scan(0u64, |acc, e| {
                *acc += e.count;
                Some(*acc)
            })
            .collect();
        WeightSpectrum {
            entries,
            cumulative,
            weight_epsilon,
            horizon,
            complete,
            contains_empty,
            visited: 0,
            duplicates: 0,
        }
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn cumulative(&self) -> &[u64] {
        &self.cumulative
    }

    pub fn weight_epsilon(&self) -> f64 {
        self.weight_epsilon
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn contains_empty(&self) -> bool {
        self.contains_empty
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Count at weight `nu` (within the binning epsilon), 0 if absent.
    pub fn count_at(&self, nu: f64) -> u64 {
        self.entries
            .iter()
            .find(|e| (e.nu - nu).abs() <= self.weight_epsilon.max(1e-12))
            .map_or(0, |e| e.count)
    }

    /// The spectrum cut to entries with `nu <= horizon`.
    pub fn truncated(&self, horizon: f64) -> WeightSpectrum {
        let n = self.entries.partition_point(|e| e.nu <= horizon);
        WeightSpectrum {
            entries: self.entries[..n].to_vec(),
            cumulative: self.cumulative[..n].to_vec(),
            horizon: horizon.min(self.horizon),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bin {
    nu: f64,
    max: f64,
    count: u64,
}

fn bin_sorted(pairs: &[(f64, u64)], eps: f64) -> Vec<Bin> {
    let mut bins: Vec<Bin> = Vec::new();
    for &(w, c) in pairs {
        match bins.last_mut() {
            Some(b) if w - b.max <= eps => {
                b.max = w;
                b.count += c;
            }
            _ => bins.push(Bin {
                nu: w,
                max: w,
                count: c,
            }),
        }
    }
    bins
}

/// Heap key ordering by weight, then insertion order for determinism.
#[derive(Debug, Clone, Copy)]
struct Key {
    weight: f64,
    node: u32,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight
            .total_cmp(&other.weight)
            .then(self.node.cmp(&other.node))
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: u32,
    symbol: u32,
    state: u32,
}

#[derive(Debug, Clone)]
struct ShardRoot {
    prefix: Vec<usize>,
    state: usize,
    weight: f64,
}

#[derive(Debug, Default)]
struct ShardOutcome {
    /// `(weight, count)` with distinct exact weights in increasing order.
    groups: Vec<(f64, u64)>,
    /// All strings lighter than this were visited; `None` when exhausted.
    complete_below: Option<f64>,
    visited: u64,
    duplicates: u64,
}

fn word_of(arena: &[Node], mut id: u32, prefix: &[usize], out: &mut Vec<usize>) {
    out.clear();
    while id != 0 {
        let n = arena[id as usize];
        out.push(n.symbol as usize);
        id = n.parent;
    }
    out.extend(prefix.iter().rev());
    out.reverse();
}

/// Best-first search below one prefix. Calls `on_accept` for every accepted
/// string in nondecreasing weight order.
fn search_shard(
    dfa: &Dfa,
    weights: &[f64],
    root: &ShardRoot,
    limit: f64,
    budget: u64,
    mut on_accept: impl FnMut(&[usize], f64),
) -> ShardOutcome {
    let mut out = ShardOutcome::default();
    // node 0 stands for the whole prefix
    let mut arena = vec![Node {
        parent: 0,
        symbol: 0,
        state: root.state as u32,
    }];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Key {
        weight: root.weight,
        node: 0,
    }));
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut group_weight = f64::NAN;
    let mut word = Vec::new();

    while let Some(Reverse(key)) = heap.pop() {
        if out.visited >= budget {
            out.complete_below = Some(key.weight);
            break;
        }
        out.visited += 1;
        let node = arena[key.node as usize];
        let state = node.state as usize;
        if dfa.is_accepting(state) {
            word_of(&arena, key.node, &root.prefix, &mut word);
            if key.weight.to_bits() != group_weight.to_bits() {
                seen.clear();
                group_weight = key.weight;
                out.groups.push((key.weight, 0));
            }
            if seen.insert(word.clone()) {
                out.groups.last_mut().expect("group opened above").1 += 1;
                on_accept(&word, key.weight);
            } else {
                out.duplicates += 1;
            }
        }
        for (a, &w) in weights.iter().enumerate() {
            let Some(t) = dfa.next(state, a) else {
                continue;
            };
            let nw = key.weight + w;
            if nw > limit {
                continue;
            }
            let id = arena.len() as u32;
            arena.push(Node {
                parent: key.node,
                symbol: a as u32,
                state: t as u32,
            });
            heap.push(Reverse(Key {
                weight: nw,
                node: id,
            }));
        }
    }
    out
}

/// Everything the enumeration needs besides the search itself.
struct Plan {
    dfa: Dfa,
    weights: Vec<f64>,
    limit: f64,
    contains_empty: bool,
    /// Accepted strings shorter than the shard depth, found while splitting.
    short: Vec<(Vec<usize>, f64)>,
    roots: Vec<ShardRoot>,
}

fn plan(system: &SystemDef, max_weight: f64, eps: f64) -> Result<Plan, SpectrumError> {
    if !(max_weight > 0.0 && max_weight.is_finite()) {
        return Err(SpectrumError::BadParameter(format!(
            "max weight {max_weight}"
        )));
    }
    let dfa = Dfa::from_system(system)?;
    let weights = system.weights();
    let limit = max_weight + eps;
    let mut short = Vec::new();
    let mut contains_empty = false;
    let mut frontier = Vec::new();
    if let Some(start) = dfa.start() {
        contains_empty = dfa.is_accepting(start);
        frontier.push(ShardRoot {
            prefix: Vec::new(),
            state: start,
            weight: 0.0,
        });
    }
    let mut depth = 0;
    while !frontier.is_empty() && frontier.len() < TARGET_SHARDS && depth < MAX_SHARD_DEPTH {
        let mut next = Vec::new();
        for r in &frontier {
            if depth > 0 && dfa.is_accepting(r.state) {
                short.push((r.prefix.clone(), r.weight));
            }
            for (a, &w) in weights.iter().enumerate() {
                let Some(t) = dfa.next(r.state, a) else {
                    continue;
                };
                let nw = r.weight + w;
                if nw > limit {
                    continue;
                }
                let mut prefix = r.prefix.clone();
                prefix.push(a);
                next.push(ShardRoot {
                    prefix,
                    state: t,
                    weight: nw,
                });
            }
        }
        frontier = next;
        depth += 1;
    }
    Ok(Plan {
        dfa,
        weights,
        limit,
        contains_empty,
        short,
        roots: frontier,
    })
}

/// Enumerates all distinct accepted strings of weight at most `max_weight`
/// and bins them by weight.
///
/// `max_strings` bounds the candidate strings (accepted or not) that any one
/// search shard visits. When a shard runs out of budget the result keeps only
/// the bins lighter than the lightest unvisited candidate of any shard and is
/// flagged incomplete.
pub fn enumerate_spectrum(
    system: &SystemDef,
    max_weight: f64,
    max_strings: u64,
) -> Result<WeightSpectrum, SpectrumError> {
    enumerate_spectrum_with(
        system,
        max_weight,
        max_strings,
        DEFAULT_WEIGHT_EPSILON,
        Execution::default(),
    )
}

pub fn enumerate_spectrum_with(
    system: &SystemDef,
    max_weight: f64,
    max_strings: u64,
    weight_epsilon: f64,
    exec: Execution,
) -> Result<WeightSpectrum, SpectrumError> {
    if max_strings == 0 || max_strings >= u32::MAX as u64 {
        return Err(SpectrumError::BadParameter(format!(
            "max strings {max_strings} outside 1..{}",
            u32::MAX
        )));
    }
    let p = plan(system, max_weight, weight_epsilon)?;
    let outcomes = exec.map(&p.roots, |root| {
        search_shard(&p.dfa, &p.weights, root, p.limit, max_strings, |_, _| {})
    });

    let mut pairs: Vec<(f64, u64)> = p.short.iter().map(|(_, w)| (*w, 1)).collect();
    let mut complete_below: Option<f64> = None;
    let mut visited = p.short.len() as u64;
    let mut duplicates = 0;
    for o in outcomes {
        pairs.extend(o.groups.iter().filter(|g| g.1 > 0));
        visited += o.visited;
        duplicates += o.duplicates;
        if let Some(w) = o.complete_below {
            complete_below = Some(complete_below.map_or(w, |c: f64| c.min(w)));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bins = bin_sorted(&pairs, weight_epsilon);
    let (horizon, complete) = match complete_below {
        None => (max_weight, true),
        Some(h) => {
            bins.retain(|b| b.max < h - weight_epsilon);
            (h, false)
        }
    };
    let mut sp =
        WeightSpectrum::from_bins(bins, weight_epsilon, horizon, complete, p.contains_empty);
    sp.visited = visited;
    sp.duplicates = duplicates;
    Ok(sp)
}

/// All distinct accepted strings of weight at most `max_weight`, lightest
/// first (ties in search order). Sequential; meant for small cases.
pub fn enumerate_strings(
    system: &SystemDef,
    max_weight: f64,
    max_strings: u64,
) -> Result<Vec<(Vec<usize>, f64)>, SpectrumError> {
    let p = plan(system, max_weight, DEFAULT_WEIGHT_EPSILON)?;
    let mut out: Vec<(Vec<usize>, f64)> = Vec::new();
    if p.contains_empty {
        out.push((Vec::new(), 0.0));
    }
    out.extend(p.short.iter().cloned());
    for root in &p.roots {
        let o = search_shard(&p.dfa, &p.weights, root, p.limit, max_strings, |w, x| {
            out.push((w.to_vec(), x))
        });
        if o.complete_below.is_some() {
            return Err(SpectrumError::BadParameter(format!(
                "string budget {max_strings} exhausted"
            )));
        }
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// A finite-horizon estimator sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorTrace {
    /// `(nu_k, estimate_k)` for every entry.
    pub points: Vec<(f64, f64)>,
    /// Estimate at the last entry.
    pub at_horizon: f64,
    /// Running maximum over the entries in the last half of the horizon,
    /// a finite stand-in for the limsup.
    pub tail_max: f64,
}

fn trace(
    sp: &WeightSpectrum,
    value: impl Fn(usize) -> f64,
) -> Result<EstimatorTrace, SpectrumError> {
    if sp.len() < 2 {
        return Err(SpectrumError::TooFewEntries(sp.len()));
    }
    let points: Vec<(f64, f64)> = (0..sp.len())
        .map(|i| (sp.entries[i].nu, value(i) / sp.entries[i].nu))
        .collect();
    let last_nu = points.last().expect("len >= 2").0;
    let tail_max = points
        .iter()
        .filter(|(nu, _)| *nu >= 0.5 * last_nu)
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EstimatorTrace {
        at_horizon: points.last().expect("len >= 2").1,
        points,
        tail_max,
    })
}

/// `ln(N(nu_1) + ... + N(nu_k)) / nu_k` along the spectrum.
pub fn capacity_estimate(sp: &WeightSpectrum) -> Result<EstimatorTrace, SpectrumError> {
    trace(sp, |i| (sp.cumulative[i] as f64).ln())
}

/// `ln N(nu_k) / nu_k` along the spectrum.
pub fn c0_estimate(sp: &WeightSpectrum) -> Result<EstimatorTrace, SpectrumError> {
    trace(sp, |i| (sp.entries[i].count as f64).ln())
}

/// Outcome of checking `max_{nu_k < n} k <= L n^K` over a finite range of `n`.
///
/// Passing is evidence, not proof: the property is asymptotic and only
/// integers up to the spectrum horizon are examined.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub satisfied: bool,
    pub l: f64,
    pub k: f64,
    /// First violating `n`; when satisfied, the `n` with the tightest ratio.
    pub worst_n: u64,
    /// Largest `n` examined.
    pub checked_up_to: u64,
}

pub fn density_check(sp: &WeightSpectrum, l: f64, k: f64) -> DensityReport {
    let top = if sp.horizon.is_finite() && sp.horizon > 0.0 {
        sp.horizon.floor() as u64
    } else {
        0
    };
    let mut worst = (0u64, f64::NEG_INFINITY);
    for n in 0..=top {
        let index = sp.entries.partition_point(|e| e.nu < n as f64) as f64;
        let bound = l * (n as f64).powf(k);
        if index > bound {
            return DensityReport {
                satisfied: false,
                l,
                k,
                worst_n: n,
                checked_up_to: n,
            };
        }
        if index > 0.0 {
            let ratio = index / bound;
            if ratio > worst.1 {
                worst = (n, ratio);
            }
        }
    }
    DensityReport {
        satisfied: true,
        l,
        k,
        worst_n: worst.0,
        checked_up_to: top,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossVerdict {
    /// Difference within the analytic tail bound.
    Consistent,
    /// The series exceeds the enumeration by more than any tail can explain:
    /// the regex counts some string more than once.
    Ambiguous,
    /// The enumeration exceeds the series, which a faithful compilation
    /// cannot produce.
    Undercount,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub s: f64,
    pub partial_sum: f64,
    pub gf_value: f64,
    /// `|gf_value - partial_sum|`.
    pub difference: f64,
    /// Upper bound on the series mass above the spectrum horizon.
    pub tail_bound: f64,
    pub verdict: CrossVerdict,
}

/// Compares the enumerated partial sum `sum N(nu_k) e^{-nu_k s}` with the
/// compiled series at `s`.
///
/// For any `s'` between the abscissa and `s`, the mass above horizon `H` is
/// at most `e^{-H (s - s')} Φ(s')`; the bound used is the minimum over a grid
/// of such `s'`. It holds for the series' own coefficients, so a gap larger
/// than it proves the series overcounts inside the horizon.
pub fn cross_check_gf(
    sp: &WeightSpectrum,
    g: &GenExpr,
    s: f64,
) -> Result<CrossCheck, SpectrumError> {
    let gf_value = eval_real(g, s).value().ok_or(SpectrumError::Divergent(s))?;
    let partial_sum = f64::from(u8::from(sp.contains_empty))
        + sp.entries
            .iter()
            .map(|e| e.count as f64 * (-e.nu * s).exp())
            .sum::<f64>();

    let cap = abscissa(g, DEFAULT_TOL)?;
    let lower = match cap.kind {
        CapacityKind::Finite => cap.q,
        _ => s - 10.0,
    };
    let h = sp.horizon;
    let tail_bound = (1..=32)
        .filter_map(|i| {
            let sp_ = lower + (s - lower) * i as f64 / 33.0;
            eval_real(g, sp_)
                .value()
                .map(|v| (-h * (s - sp_)).exp() * v)
        })
        .fold(gf_value, f64::min);

    let gap = gf_value - partial_sum;
    let roundoff = 1e-12 * gf_value.max(partial_sum).max(1.0);
    let verdict = if gap > tail_bound + roundoff {
        CrossVerdict::Ambiguous
    } else if -gap > roundoff {
        CrossVerdict::Undercount
    } else {
        CrossVerdict::Consistent
    };
    Ok(CrossCheck {
        s,
        partial_sum,
        gf_value,
        difference: gap.abs(),
        tail_bound,
        verdict,
    })
}

/// Delimited text export: `#` header lines, then `nu count cumulative`.
pub fn write_spectrum(sp: &WeightSpectrum) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# epsilon {:e}", sp.weight_epsilon);
    let _ = writeln!(out, "# horizon {}", sp.horizon);
    let _ = writeln!(out, "# complete {}", sp.complete);
    let _ = writeln!(out, "# empty_string {}", sp.contains_empty);
    let _ = writeln!(out, "# nu count cumulative");
    for (e, c) in sp.entries.iter().zip(&sp.cumulative) {
        let _ = writeln!(out, "{} {} {}", e.nu, e.count, c);
    }
    out
}

/// Reads the format written by [`write_spectrum`].
pub fn parse_spectrum(text: &str) -> Result<WeightSpectrum, SpectrumError> {
    let mut eps = DEFAULT_WEIGHT_EPSILON;
    let mut horizon = None;
    let mut complete = true;
    let mut empty = false;
    let mut bins = Vec::new();
    let bad = |line: usize, message: &str| SpectrumError::Parse {
        line,
        message: message.to_string(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(header) = raw.strip_prefix('#') {
            let mut it = header.split_whitespace();
            let (key, value) = (it.next(), it.next());
            match (key, value) {
                (Some("epsilon"), Some(v)) => {
                    eps = v.parse().map_err(|_| bad(line, "bad epsilon"))?
                }
                (Some("horizon"), Some(v)) => {
                    horizon = Some(v.parse().map_err(|_| bad(line, "bad horizon"))?)
                }
                (Some("complete"), Some(v)) => {
                    complete = v.parse().map_err(|_| bad(line, "bad complete flag"))?
                }
                (Some("empty_string"), Some(v)) => {
                    empty = v.parse().map_err(|_| bad(line, "bad empty_string flag"))?
                }
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(line, "expected `nu count cumulative`"));
        }
        let nu: f64 = fields[0].parse().map_err(|_| bad(line, "bad nu"))?;
        let count: u64 = fields[1].parse().map_err(|_| bad(line, "bad count"))?;
        let cum: u64 = fields[2].parse().map_err(|_| bad(line, "bad cumulative"))?;
        let prev: u64 = bins.iter().map(|b: &Bin| b.count).sum();
        if prev + count != cum {
            return Err(bad(line, "cumulative does not match counts"));
        }
        if nu.is_nan()
            || nu <= 0.0
            || count == 0
            || bins.last().is_some_and(|b: &Bin| nu - b.nu <= eps)
        {
            return Err(bad(
                line,
                "weights must be positive and strictly increasing",
            ));
        }
        bins.push(Bin { nu, max: nu, count });
    }
    let horizon = horizon.or_else(|| bins.last().map(|b| b.nu)).unwrap_or(0.0);
    Ok(WeightSpectrum::from_bins(
        bins, eps, horizon, complete, empty,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Matcher;
    use crate::dsl::{build_jk_system, parse_system};
    use crate::genfun::system_gf;
    use crate::runlength::{brute_force_counts, satisfies_run_length};

    fn sbin() -> SystemDef {
        parse_system("sym 0=1 1=1; expr: (0|1)*").unwrap()
    }

    fn counts(sp: &WeightSpectrum) -> Vec<u64> {
        sp.entries().iter().map(|e| e.count).collect()
    }

    #[test]
    fn sbin_counts_are_powers_of_two() {
        let sp = enumerate_spectrum(&sbin(), 10.0, 1 << 20).unwrap();
        assert!(sp.is_complete());
        assert!(sp.contains_empty());
        let expected: Vec<u64> = (1..=10).map(|n| 1u64 << n).collect();
        assert_eq!(counts(&sp), expected);
        let nus: Vec<f64> = sp.entries().iter().map(|e| e.nu).collect();
        assert_eq!(nus, (1..=10).map(f64::from).collect::<Vec<_>>());
        assert_eq!(sp.duplicates, 0);
    }

    #[test]
    fn jk11_has_two_per_length() {
        let sp = enumerate_spectrum(&build_jk_system(1, 1).unwrap(), 10.0, 1 << 20).unwrap();
        assert_eq!(counts(&sp), vec![2; 10]);
        assert!(!sp.contains_empty());
    }

    #[test]
    fn jk22_matches_predicate_filter() {
        let sp = enumerate_spectrum(&build_jk_system(2, 2).unwrap(), 20.0, 1 << 22).unwrap();
        let oracle = brute_force_counts(2, 2, 20, Execution::Parallel);
        assert_eq!(counts(&sp), oracle);
        // successive ratios approach the golden ratio
        let ratio = oracle[19] as f64 / oracle[18] as f64;
        assert!((ratio - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-4);
    }

    #[test]
    fn enumeration_equals_predicate_filter_for_small_binary_systems() {
        for j in 1..=4 {
            for k in 1..=4 {
                let sys = build_jk_system(j, k).unwrap();
                let sp = enumerate_spectrum(&sys, 14.0, 1 << 20).unwrap();
                assert_eq!(
                    counts(&sp),
                    brute_force_counts(j, k, 14, Execution::Sequential)
                );
            }
        }
    }

    #[test]
    fn enumerated_strings_are_distinct_and_accepted() {
        let sys = build_jk_system(2, 3).unwrap();
        let words = enumerate_strings(&sys, 12.0, 1 << 20).unwrap();
        let m = Matcher::new(&sys);
        let mut seen = HashSet::new();
        for (w, weight) in &words {
            assert!(m.accepts(w));
            assert!(seen.insert(w.clone()));
            assert_eq!(*weight, w.len() as f64);
            let bits = w.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            assert!(satisfies_run_length(bits, w.len(), 2, 3));
        }
        let total: u64 = brute_force_counts(2, 3, 12, Execution::Sequential)
            .iter()
            .sum();
        assert_eq!(words.len() as u64, total);
    }

    #[test]
    fn ambiguous_regex_enumerates_distinct_strings() {
        let sys = parse_system("sym a=1; expr: (a|a)*").unwrap();
        let sp = enumerate_spectrum(&sys, 8.0, 1000).unwrap();
        assert_eq!(counts(&sp), vec![1; 8]);
    }

    #[test]
    fn real_weights_bin_separately() {
        let sys = parse_system("sym a=1 b=1.5; expr: (a|b)*").unwrap();
        let sp = enumerate_spectrum(&sys, 3.0, 1000).unwrap();
        let got: Vec<(f64, u64)> = sp.entries().iter().map(|e| (e.nu, e.count)).collect();
        // a, b, aa, ab|ba, aaa|bb
        assert_eq!(got, vec![(1.0, 1), (1.5, 1), (2.0, 1), (2.5, 2), (3.0, 2)]);
    }

    #[test]
    fn near_equal_weights_share_a_bin() {
        let sys = parse_system("sym a=0.1 b=0.2 c=0.3; expr: a b | c").unwrap();
        let sp = enumerate_spectrum(&sys, 1.0, 100).unwrap();
        // 0.1 + 0.2 != 0.3 in binary floating point, but within epsilon
        assert_eq!(sp.len(), 1);
        assert_eq!(sp.entries()[0].count, 2);
    }

    #[test]
    fn budget_exhaustion_keeps_complete_prefix() {
        let full = enumerate_spectrum(&sbin(), 16.0, 1 << 22).unwrap();
        let part = enumerate_spectrum(&sbin(), 16.0, 200).unwrap();
        assert!(!part.is_complete());
        assert!(part.horizon() < 16.0);
        assert!(!part.is_empty());
        for (e, f) in part.entries().iter().zip(full.entries()) {
            assert_eq!(e, f);
            assert!(e.nu < part.horizon());
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let sys = build_jk_system(3, 2).unwrap();
        let a = enumerate_spectrum_with(&sys, 15.0, 5000, 1e-9, Execution::Sequential).unwrap();
        let b = enumerate_spectrum_with(&sys, 15.0, 5000, 1e-9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bad_parameters() {
        assert!(enumerate_spectrum(&sbin(), 0.0, 10).is_err());
        assert!(enumerate_spectrum(&sbin(), 5.0, 0).is_err());
        assert!(WeightSpectrum::from_weighted_counts(vec![(0.0, 1)], 1e-9, 1.0, false).is_err());
    }

    #[test]
    fn estimators_on_sbin() {
        let sp = enumerate_spectrum(&sbin(), 20.0, 1 << 22).unwrap();
        let c = capacity_estimate(&sp).unwrap();
        let expected = ((1u64 << 21) as f64 - 2.0).ln() / 20.0;
        assert!((c.at_horizon - expected).abs() < 1e-12);
        assert!((c.at_horizon - 0.7279).abs() < 1e-4);
        let c0 = c0_estimate(&sp).unwrap();
        for (_, v) in &c0.points {
            assert!((v - std::f64::consts::LN_2).abs() < 1e-12);
        }
        for (a, b) in c0.points.iter().zip(&c.points) {
            assert!(a.1 <= b.1);
        }
    }

    #[test]
    fn estimators_on_jk11_decay() {
        let sp = enumerate_spectrum(&build_jk_system(1, 1).unwrap(), 16.0, 1 << 20).unwrap();
        let c = capacity_estimate(&sp).unwrap();
        let c0 = c0_estimate(&sp).unwrap();
        for (i, ((nu, v), (_, v0))) in c.points.iter().zip(&c0.points).enumerate() {
            let n = (i + 1) as f64;
            assert_eq!(*nu, n);
            assert!((v - (2.0 * n).ln() / n).abs() < 1e-12);
            assert!((v0 - 2f64.ln() / n).abs() < 1e-12);
        }
    }

    #[test]
    fn jk22_capacity_estimate_at_twenty() {
        // frozen from the run-length oracle: cumulative = 57310 at length 20
        let oracle = brute_force_counts(2, 2, 20, Execution::Parallel);
        let cum: u64 = oracle.iter().sum();
        assert_eq!(cum, 57310);
        let sp = enumerate_spectrum(&build_jk_system(2, 2).unwrap(), 20.0, 1 << 22).unwrap();
        let est = capacity_estimate(&sp).unwrap().at_horizon;
        assert!((est - (57310f64).ln() / 20.0).abs() < 1e-12);
        assert!((est - 0.547811).abs() < 1e-5);
    }

    #[test]
    fn estimators_need_two_entries() {
        let sp = WeightSpectrum::from_weighted_counts(vec![(1.0, 3)], 1e-9, 1.0, false).unwrap();
        assert_eq!(capacity_estimate(&sp), Err(SpectrumError::TooFewEntries(1)));
        assert!(c0_estimate(&sp).is_err());
    }

    #[test]
    fn density_examples() {
        let sp = enumerate_spectrum(&build_jk_system(2, 2).unwrap(), 12.0, 1 << 20).unwrap();
        let r = density_check(&sp, 1.0, 2.0);
        assert!(r.satisfied);
        assert_eq!(r.checked_up_to, 12);

        // nu_k = ln(k + 1): the index grows exponentially in the weight
        let synthetic: Vec<(f64, u64)> = (1..=2000).map(|k| (((k + 1) as f64).ln(), 1)).collect();
        let sp =
            WeightSpectrum::from_weighted_counts(synthetic, 1e-12, (2001f64).ln(), false).unwrap();
        let r = density_check(&sp, 1.0, 2.0);
        assert!(!r.satisfied);
        assert_eq!(r.worst_n, 2);

        let single =
            WeightSpectrum::from_weighted_counts(vec![(1.0, 1)], 1e-9, 1.0, false).unwrap();
        assert!(density_check(&single, 1.0, 2.0).satisfied);
    }

    #[test]
    fn cross_check_sbin() {
        let sys = sbin();
        let g = system_gf(&sys);
        let sp = enumerate_spectrum(&sys, 20.0, 1 << 22).unwrap();
        let r = cross_check_gf(&sp, &g, 1.0).unwrap();
        let closed = 1.0 / (1.0 - 2.0 * (-1f64).exp());
        assert!((r.gf_value - closed).abs() < 1e-12);
        assert!((closed - 3.784).abs() < 1e-3);
        assert!(r.partial_sum < r.gf_value);
        assert!(r.difference <= r.tail_bound);
        assert_eq!(r.verdict, CrossVerdict::Consistent);
        assert!(cross_check_gf(&sp, &g, 0.5).is_err());
    }

    #[test]
    fn cross_check_jk22_within_tail() {
        let sys = build_jk_system(2, 2).unwrap();
        let g = system_gf(&sys);
        let sp = enumerate_spectrum(&sys, 18.0, 1 << 22).unwrap();
        let r = cross_check_gf(&sp, &g, 1.0).unwrap();
        assert!(r.partial_sum <= r.gf_value);
        assert!(r.gf_value - r.partial_sum <= r.tail_bound);
        assert_eq!(r.verdict, CrossVerdict::Consistent);
    }

    #[test]
    fn cross_check_flags_ambiguity() {
        let sys = parse_system("sym a=1; expr: a|a").unwrap();
        let g = system_gf(&sys);
        let sp = enumerate_spectrum(&sys, 10.0, 100).unwrap();
        let r = cross_check_gf(&sp, &g, 1.0).unwrap();
        assert_eq!(r.verdict, CrossVerdict::Ambiguous);
        assert!((r.gf_value / r.partial_sum - 2.0).abs() < 1e-12);

        let sys = parse_system("sym a=1; expr: (a|a)*").unwrap();
        let g = system_gf(&sys);
        let sp = enumerate_spectrum(&sys, 20.0, 100).unwrap();
        let r = cross_check_gf(&sp, &g, 1.0).unwrap();
        assert_eq!(r.verdict, CrossVerdict::Ambiguous);
    }

    #[test]
    fn export_round_trip() {
        let sp = enumerate_spectrum(&build_jk_system(2, 2).unwrap(), 10.0, 1 << 20).unwrap();
        let text = write_spectrum(&sp);
        assert!(text.starts_with("# epsilon 1e-9\n# horizon 10\n"));
        assert!(text.contains("\n1 2 2\n2 4 6\n3 6 12\n"));
        let back = parse_spectrum(&text).unwrap();
        assert_eq!(back.entries(), sp.entries());
        assert_eq!(back.cumulative(), sp.cumulative());
        assert_eq!(back.horizon(), sp.horizon());
        assert!(parse_spectrum("1 2 3\n").is_err());
    }
}
