//! Finite automata for membership tests and string enumeration.
//!
//! [`Nfa`] is a Thompson construction over symbol indices and is used for
//! matching. [`Dfa`] is the subset construction of that NFA with dead states
//! removed; every accepted string has exactly one path through it, which the
//! spectrum enumerator relies on.

use std::collections::HashMap;

use thiserror::Error;

use crate::dsl::{DslError, Regex, SystemDef};

/// Upper bound on subset-construction states.
pub const MAX_DFA_STATES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("subset construction exceeded {limit} states")]
    TooManyStates { limit: usize },
}

#[derive(Debug, Clone, Default)]
struct NfaState {
    eps: Vec<usize>,
    moves: Vec<(usize, usize)>,
}

/// Thompson NFA with a single start and a single accepting state.
#[derive(Debug, Clone)]
pub struct Nfa {
    states: Vec<NfaState>,
    start: usize,
    accept: usize,
    symbols: usize,
}

impl Nfa {
    pub fn from_system(system: &SystemDef) -> Self {
        let index: HashMap<&str, usize> = system
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, d)| (d.label.as_str(), i))
            .collect();
        let mut nfa = Nfa {
            states: Vec::new(),
            start: 0,
            accept: 0,
            symbols: system.alphabet.len(),
        };
        let (start, accept) = nfa.fragment(&system.expr, &index);
        nfa.start = start;
        nfa.accept = accept;
        nfa
    }

    fn add(&mut self) -> usize {
        self.states.push(NfaState::default());
        self.states.len() - 1
    }

    fn fragment(&mut self, re: &Regex, index: &HashMap<&str, usize>) -> (usize, usize) {
        match re {
            Regex::Symbol(label) => {
                let (s, e) = (self.add(), self.add());
                self.states[s].moves.push((index[label.as_str()], e));
                (s, e)
            }
            Regex::Epsilon => {
                let (s, e) = (self.add(), self.add());
                self.states[s].eps.push(e);
                (s, e)
            }
            Regex::Concat(a, b) => {
                let (as_, ae) = self.fragment(a, index);
                let (bs, be) = self.fragment(b, index);
                self.states[ae].eps.push(bs);
                (as_, be)
            }
            Regex::Union(a, b) => {
                let s = self.add();
                let (as_, ae) = self.fragment(a, index);
                let (bs, be) = self.fragment(b, index);
                let e = self.add();
                self.states[s].eps.extend([as_, bs]);
                self.states[ae].eps.push(e);
                self.states[be].eps.push(e);
                (s, e)
            }
            Regex::Star(c) => {
                let s = self.add();
                let (cs, ce) = self.fragment(c, index);
                let e = self.add();
                self.states[s].eps.extend([cs, e]);
                self.states[ce].eps.extend([cs, e]);
                (s, e)
            }
        }
    }

    fn closure(&self, set: &mut Vec<usize>, mark: &mut [bool]) {
        let mut stack = set.clone();
        while let Some(q) = stack.pop() {
            for &n in &self.states[q].eps {
                if !mark[n] {
                    mark[n] = true;
                    set.push(n);
                    stack.push(n);
                }
            }
        }
    }

    fn start_set(&self) -> Vec<usize> {
        let mut mark = vec![false; self.states.len()];
        mark[self.start] = true;
        let mut set = vec![self.start];
        self.closure(&mut set, &mut mark);
        set.sort_unstable();
        set
    }

    fn step(&self, set: &[usize], symbol: usize) -> Vec<usize> {
        let mut mark = vec![false; self.states.len()];
        let mut next = Vec::new();
        for &q in set {
            for &(a, to) in &self.states[q].moves {
                if a == symbol && !mark[to] {
                    mark[to] = true;
                    next.push(to);
                }
            }
        }
        self.closure(&mut next, &mut mark);
        next.sort_unstable();
        next
    }

    /// True iff the string of symbol indices is in the language.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut set = self.start_set();
        for &a in word {
            if a >= self.symbols {
                return false;
            }
            set = self.step(&set, a);
            if set.is_empty() {
                return false;
            }
        }
        set.contains(&self.accept)
    }
}

/// Deterministic automaton over symbol indices, trimmed of dead states.
#[derive(Debug, Clone)]
pub struct Dfa {
    /// `next[state][symbol]`, `None` where the move leads nowhere useful.
    next: Vec<Vec<Option<usize>>>,
    accepting: Vec<bool>,
    start: Option<usize>,
}

impl Dfa {
    pub fn from_system(system: &SystemDef) -> Result<Self, AutomatonError> {
        Self::from_nfa(&Nfa::from_system(system))
    }

    pub fn from_nfa(nfa: &Nfa) -> Result<Self, AutomatonError> {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut sets = vec![nfa.start_set()];
        ids.insert(sets[0].clone(), 0);
        let mut next: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = vec![None; nfa.symbols];
            for (a, slot) in row.iter_mut().enumerate() {
                let target = nfa.step(&sets[i], a);
                if target.is_empty() {
                    continue;
                }
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= MAX_DFA_STATES {
                            return Err(AutomatonError::TooManyStates {
                                limit: MAX_DFA_STATES,
                            });
                        }
                        ids.insert(target.clone(), sets.len());
                        sets.push(target);
                        sets.len() - 1
                    }
                };
                *slot = Some(id);
            }
            next.push(row);
            i += 1;
        }
        let accepting: Vec<bool> = sets.iter().map(|s| s.contains(&nfa.accept)).collect();

        // Live states: those from which an accepting state is reachable.
        let n = sets.len();
        let mut reverse = vec![Vec::new(); n];
        for (q, row) in next.iter().enumerate() {
            for t in row.iter().flatten() {
                reverse[*t].push(q);
            }
        }
        let mut live = accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &reverse[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        for row in &mut next {
            for slot in row.iter_mut() {
                if matches!(slot, Some(t) if !live[*t]) {
                    *slot = None;
                }
            }
        }
        Ok(Dfa {
            next,
            accepting,
            start: live[0].then_some(0),
        })
    }

    /// `None` when the language is empty.
    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn next(&self, state: usize, symbol: usize) -> Option<usize> {
        self.next[state][symbol]
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.next.first().map_or(0, Vec::len)
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut q = match self.start {
            Some(q) => q,
            None => return false,
        };
        for &a in word {
            match self
                .next
                .get(q)
                .and_then(|row| row.get(a))
                .copied()
                .flatten()
            {
                Some(t) => q = t,
                None => return false,
            }
        }
        self.accepting[q]
    }
}

/// Compiled membership test for one system.
#[derive(Debug, Clone)]
pub struct Matcher<'a> {
    system: &'a SystemDef,
    nfa: Nfa,
}

impl<'a> Matcher<'a> {
    pub fn new(system: &'a SystemDef) -> Self {
        Matcher {
            system,
            nfa: Nfa::from_system(system),
        }
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.nfa.accepts(word)
    }

    pub fn matches_str(&self, text: &str) -> Result<bool, DslError> {
        Ok(self.accepts(&self.system.parse_word(text)?))
    }
}

/// Membership of `text` (labels, see [`SystemDef::parse_word`]) in the system.
pub fn matches(system: &SystemDef, text: &str) -> Result<bool, DslError> {
    Matcher::new(system).matches_str(text)
}
