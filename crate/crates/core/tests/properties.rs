use std::f64::consts::LN_2;

use proptest::prelude::*;

use cscap_core::automaton::Matcher;
use cscap_core::dsl::{build_jk_system, parse_system, Regex, SymbolDecl, SystemDef};
use cscap_core::genfun::{capacity_jk, DEFAULT_TOL};
use cscap_core::maxent::{
    entropy_per_weight, jk_phrase_support, maxentropic_pmf, solve_rate, truncated_supports, Pmf,
    SupportItem, WeightedSupport, Word,
};
use cscap_core::runlength::satisfies_run_length;

const LABELS: [&str; 4] = ["a", "b", "c", "xy"];

fn regex() -> impl Strategy<Value = Regex> {
    let leaf = prop_oneof![
        4 => (0..LABELS.len()).prop_map(|i| Regex::sym(LABELS[i])),
        1 => Just(Regex::Epsilon),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Regex::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Regex::union(a, b)),
            inner.prop_map(Regex::star),
        ]
    })
}

fn system() -> impl Strategy<Value = SystemDef> {
    (regex(), prop::collection::vec(1u32..40, LABELS.len())).prop_map(|(expr, w)| {
        let alphabet = LABELS
            .iter()
            .zip(w)
            .map(|(l, w)| SymbolDecl {
                label: l.to_string(),
                weight: f64::from(w) / 4.0,
            })
            .collect();
        SystemDef::new("gen", alphabet, expr).unwrap()
    })
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-3f64..=5.0, 2..=8)
}

proptest! {
    #[test]
    fn display_round_trips(sys in system()) {
        let text = sys.to_string();
        let back = parse_system(&text).unwrap();
        prop_assert_eq!(back, sys, "{}", text);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,60}") {
        let _ = parse_system(&text);
    }

    #[test]
    fn parser_never_panics_on_near_miss(text in "(sym|expr|name|[a-c01=;:|()*. 0-9#\n-]){0,40}") {
        let _ = parse_system(&text);
    }

    #[test]
    fn jk_membership_matches_predicate(j in 1usize..=4, k in 1usize..=4, len in 1usize..=12, bits: u64) {
        let bits = bits & ((1 << len) - 1);
        let sys = build_jk_system(j, k).unwrap();
        let word: Vec<usize> = (0..len).rev().map(|i| ((bits >> i) & 1) as usize).collect();
        prop_assert_eq!(Matcher::new(&sys).accepts(&word), satisfies_run_length(bits, len, j, k));
    }

    #[test]
    fn capacity_monotone_symmetric_bounded(j in 1usize..=20, k in 1usize..=20) {
        let c = capacity_jk(j, k, DEFAULT_TOL).unwrap();
        prop_assert!((c - capacity_jk(k, j, DEFAULT_TOL).unwrap()).abs() <= 2.0 * DEFAULT_TOL);
        prop_assert!(capacity_jk(j + 1, k, DEFAULT_TOL).unwrap() >= c - 2.0 * DEFAULT_TOL);
        prop_assert!(capacity_jk(j, k + 1, DEFAULT_TOL).unwrap() >= c - 2.0 * DEFAULT_TOL);
        prop_assert!(c <= LN_2 + DEFAULT_TOL);
        prop_assert!(c >= 0.0);
    }

    #[test]
    fn maxentropic_attains_rate(w in weights()) {
        let s = WeightedSupport::from_weights(&w).unwrap();
        let r = solve_rate(&s, DEFAULT_TOL).unwrap();
        let q = maxentropic_pmf(&s, DEFAULT_TOL).unwrap();
        prop_assert!((entropy_per_weight(&q) - r.rate).abs() <= 1e-9);
        prop_assert!(r.residual.abs() < 1e-9);
    }

    #[test]
    fn no_pmf_beats_the_rate(w in weights(), raw in prop::collection::vec(0.0f64..1.0, 8)) {
        let s = WeightedSupport::from_weights(&w).unwrap();
        let raw = &raw[..w.len()];
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let p = Pmf::new(s.clone(), raw.iter().map(|x| x / total).collect()).unwrap();
        let r = solve_rate(&s, DEFAULT_TOL).unwrap().rate;
        prop_assert!(entropy_per_weight(&p) <= r + 1e-9);
    }

    #[test]
    fn perturbing_maxentropic_pmf_loses_rate(w in weights(), dir in prop::collection::vec(-1.0f64..1.0, 8)) {
        let s = WeightedSupport::from_weights(&w).unwrap();
        let q = maxentropic_pmf(&s, DEFAULT_TOL).unwrap();
        let n = w.len();
        let mean = dir[..n].iter().sum::<f64>() / n as f64;
        let d: Vec<f64> = dir[..n].iter().map(|x| x - mean).collect();
        let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let p: Vec<f64> = q.probs().iter().zip(&d).map(|(q, d)| q + 1e-3 * d / norm).collect();
        prop_assume!(p.iter().all(|&x| x >= 0.0));
        let p = Pmf::new(s, p).unwrap();
        prop_assert!(entropy_per_weight(&p) < entropy_per_weight(&q));
    }

    #[test]
    fn truncation_drops_zero_probability_blocks(raw in prop::collection::vec(0.0f64..1.0, 2..=6), zero_mask: u8, depth in 1usize..=3) {
        let n = raw.len();
        let mask = u32::from(zero_mask) & ((1 << n) - 2);
        let items = (0..n)
            .map(|i| SupportItem { word: Word(vec![format!("y{i}")]), weight: 1.0 + i as f64 })
            .collect();
        let s = WeightedSupport::new(items).unwrap();
        let kept: Vec<f64> = raw.iter().enumerate()
            .map(|(i, &x)| if mask >> i & 1 == 1 { 0.0 } else { x + 1e-3 })
            .collect();
        let total: f64 = kept.iter().sum();
        let pmf = Pmf::new(s, kept.iter().map(|x| x / total).collect()).unwrap();
        let (levels, _, partial) = truncated_supports(&pmf, depth, 1_000_000);
        prop_assert!(!partial);
        for level in &levels {
            for item in level.items() {
                for label in &item.word.0 {
                    let i: usize = label[1..].parse().unwrap();
                    prop_assert!(mask >> i & 1 == 0, "zero-probability block {} in {}", label, item.word);
                }
            }
        }
    }
}

#[test]
fn phrase_alphabet_rate_is_capacity() {
    for j in 1..=3 {
        for k in 1..=3 {
            let r = solve_rate(&jk_phrase_support(j, k).unwrap(), DEFAULT_TOL)
                .unwrap()
                .rate;
            let c = capacity_jk(j, k, DEFAULT_TOL).unwrap();
            assert!((r - c).abs() <= 2.0 * DEFAULT_TOL, "({j},{k}): {r} vs {c}");
        }
    }
}
