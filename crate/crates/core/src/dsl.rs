//! Textual description of a constrained system.
//!
//! A system document declares a weighted symbol alphabet and a regular
//! expression over it:
//!
//! ```text
//! # unconstrained binary sequences
//! name: sbin;
//! sym 0=1 1=1;
//! expr: (0|1)*
//! ```
//!
//! * `sym <label>=<weight> ...;` declares symbols. Labels are runs of
//!   `[A-Za-z0-9_]` and may be longer than one character; weights are
//!   positive decimal reals. Several `sym` statements may appear.
//! * `expr:` gives the regular expression, terminated by `;` or end of input.
//!   `|` is union, juxtaposition (whitespace-separated) is concatenation,
//!   postfix `*` is the Kleene star, `eps` is the empty string and
//!   `x{n,m}` / `x{n}` expand to the union of the `n..=m` fold concatenations
//!   of `x`. Precedence is star > concatenation > union; both binary
//!   operators associate to the left.
//! * `name: <ident>;` is optional.
//! * `#` starts a comment running to the end of the line.
//!
//! Weights are stored as `f64`; parsing a decimal weight rounds it to the
//! nearest double, and every downstream computation works on that double.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Largest `m` accepted in a bounded repetition `x{n,m}`.
pub const MAX_REPETITION: usize = 4096;

/// Position in a system document, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("syntax error at {at}: {message}")]
    Syntax { at: Position, message: String },
    #[error("undeclared symbol `{label}` at {at}")]
    UndeclaredSymbol { label: String, at: Position },
    #[error("symbol `{label}` at {at} has non-positive weight {weight}")]
    NonPositiveWeight {
        label: String,
        weight: f64,
        at: Position,
    },
    #[error("symbol `{label}` declared twice (second declaration at {at})")]
    DuplicateSymbol { label: String, at: Position },
    #[error("system declares no symbols")]
    EmptyAlphabet,
    #[error("system has no `expr:` clause")]
    MissingExpr,
    #[error("run-length parameters must be positive, got j={j}, k={k}")]
    InvalidRunLength { j: usize, k: usize },
    #[error("`{text}` is not a string over the alphabet (stuck at byte {offset})")]
    NotInAlphabet { text: String, offset: usize },
}

/// One alphabet symbol with its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolDecl {
    pub label: String,
    pub weight: f64,
}

/// Regular expression over symbol labels.
#[derive(Debug, Clone, PartialEq)]
pub enum Regex {
    Symbol(String),
    Epsilon,
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn sym(label: impl Into<String>) -> Self {
        Regex::Symbol(label.into())
    }

    pub fn concat(left: Regex, right: Regex) -> Self {
        Regex::Concat(Box::new(left), Box::new(right))
    }

    pub fn union(left: Regex, right: Regex) -> Self {
        Regex::Union(Box::new(left), Box::new(right))
    }

    pub fn star(child: Regex) -> Self {
        Regex::Star(Box::new(child))
    }

    /// Left-folded concatenation; `Epsilon` for an empty sequence.
    pub fn concat_all(parts: impl IntoIterator<Item = Regex>) -> Self {
        parts
            .into_iter()
            .reduce(Regex::concat)
            .unwrap_or(Regex::Epsilon)
    }

    /// Left-folded union. Panics on an empty sequence, which has no regex.
    pub fn union_all(parts: impl IntoIterator<Item = Regex>) -> Self {
        parts
            .into_iter()
            .reduce(Regex::union)
            .expect("union of zero alternatives")
    }

    /// `child` concatenated with itself `times` times (`Epsilon` for zero).
    pub fn power(child: &Regex, times: usize) -> Self {
        Regex::concat_all(std::iter::repeat_n(child.clone(), times))
    }

    /// Union of `child^n` for `n` in `min..=max`.
    pub fn repeat(child: &Regex, min: usize, max: usize) -> Self {
        Regex::union_all((min..=max).map(|n| Regex::power(child, n)))
    }

    /// Every symbol label referenced, in left-to-right order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Regex::Symbol(l) => out.push(l),
            Regex::Epsilon => {}
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Regex::Star(c) => c.collect_labels(out),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let own = match self {
            Regex::Union(..) => 0,
            Regex::Concat(..) => 1,
            _ => 2,
        };
        if own < prec {
            f.write_str("(")?;
        }
        match self {
            Regex::Symbol(l) => f.write_str(l)?,
            Regex::Epsilon => f.write_str("eps")?,
            Regex::Union(a, b) => {
                a.fmt_prec(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)?;
            }
            Regex::Concat(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" ")?;
                b.fmt_prec(f, 2)?;
            }
            Regex::Star(c) => {
                c.fmt_prec(f, 2)?;
                f.write_str("*")?;
            }
        }
        if own < prec {
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Prints in the concrete syntax; the output reparses to the same tree.
impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A constrained system: weighted alphabet plus the regex of accepted strings.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemDef {
    pub name: String,
    pub alphabet: Vec<SymbolDecl>,
    pub expr: Regex,
}

impl SystemDef {
    /// Builds a system after checking the alphabet and every label in `expr`.
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<SymbolDecl>,
        expr: Regex,
    ) -> Result<Self, DslError> {
        let origin = Position { line: 0, column: 0 };
        if alphabet.is_empty() {
            return Err(DslError::EmptyAlphabet);
        }
        let mut seen = HashMap::new();
        for decl in &alphabet {
            if !(decl.weight > 0.0 && decl.weight.is_finite()) {
                return Err(DslError::NonPositiveWeight {
                    label: decl.label.clone(),
                    weight: decl.weight,
                    at: origin,
                });
            }
            if seen.insert(decl.label.as_str(), ()).is_some() {
                return Err(DslError::DuplicateSymbol {
                    label: decl.label.clone(),
                    at: origin,
                });
            }
        }
        for label in expr.labels() {
            if !seen.contains_key(label) {
                return Err(DslError::UndeclaredSymbol {
                    label: label.to_string(),
                    at: origin,
                });
            }
        }
        Ok(SystemDef {
            name: name.into(),
            alphabet,
            expr,
        })
    }

    pub fn symbol_index(&self, label: &str) -> Option<usize> {
        self.alphabet.iter().position(|d| d.label == label)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.alphabet.iter().map(|d| d.weight).collect()
    }

    /// Additive weight of a string given as symbol indices.
    pub fn word_weight(&self, word: &[usize]) -> f64 {
        word.iter().map(|&i| self.alphabet[i].weight).sum()
    }

    /// Splits `text` into symbol indices.
    ///
    /// `.` separates labels explicitly; otherwise labels are matched greedily,
    /// longest first. `eps` and the empty text denote the empty string.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, DslError> {
        let text = text.trim();
        if text.is_empty() || text == "eps" {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut offset = 0;
        for piece in text.split('.') {
            let mut rest = piece;
            while !rest.is_empty() {
                let best = self
                    .alphabet
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| rest.starts_with(d.label.as_str()))
                    .max_by_key(|(_, d)| d.label.len());
                match best {
                    Some((i, d)) => {
                        out.push(i);
                        rest = &rest[d.label.len()..];
                        offset += d.label.len();
                    }
                    None => {
                        return Err(DslError::NotInAlphabet {
                            text: text.to_string(),
                            offset,
                        })
                    }
                }
            }
            offset += 1;
        }
        Ok(out)
    }

    /// Renders symbol indices back to text accepted by [`SystemDef::parse_word`].
    pub fn format_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "eps".to_string();
        }
        let single = self.alphabet.iter().all(|d| d.label.chars().count() == 1);
        let labels: Vec<&str> = word
            .iter()
            .map(|&i| self.alphabet[i].label.as_str())
            .collect();
        if single {
            labels.concat()
        } else {
            labels.join(".")
        }
    }
}

impl fmt::Display for SystemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {};", self.name)?;
        f.write_str("sym")?;
        for d in &self.alphabet {
            write!(f, " {}={}", d.label, d.weight)?;
        }
        writeln!(f, ";")?;
        writeln!(f, "expr: {};", self.expr)
    }
}

/// Parses a system document. See the module docs for the grammar.
pub fn parse_system(text: &str) -> Result<SystemDef, DslError> {
    Parser::new(text).document()
}

/// The `(j,k)` run-length system: at most `j` consecutive `1`s and at most
/// `k` consecutive `0`s, unit weights. The expression has two branches, one
/// per leading bit, each alternating bounded runs under a star.
pub fn build_jk_system(j: usize, k: usize) -> Result<SystemDef, DslError> {
    if j == 0 || k == 0 {
        return Err(DslError::InvalidRunLength { j, k });
    }
    let ones = || Regex::repeat(&Regex::sym("1"), 1, j);
    let zeros = || Regex::repeat(&Regex::sym("0"), 1, k);
    let tail = |runs: Regex| Regex::union(Regex::Epsilon, runs);

    let lead_one = Regex::concat_all([
        ones(),
        Regex::star(Regex::concat(zeros(), ones())),
        tail(zeros()),
    ]);
    let lead_zero = Regex::concat_all([
        zeros(),
        Regex::star(Regex::concat(ones(), zeros())),
        tail(ones()),
    ]);
    SystemDef::new(
        format!("S({j},{k})"),
        vec![
            SymbolDecl {
                label: "0".into(),
                weight: 1.0,
            },
            SymbolDecl {
                label: "1".into(),
                weight: 1.0,
            },
        ],
        Regex::union(lead_one, lead_zero),
    )
}

fn is_label_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn here(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, DslError> {
        Err(DslError::Syntax {
            at: self.here(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn expect(&mut self, want: char) -> Result<(), DslError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => self.syntax(format!("expected `{want}`, found `{c}`")),
            None => self.syntax(format!("expected `{want}`, found end of input")),
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_label_char(c)) {
            self.bump();
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    fn document(mut self) -> Result<SystemDef, DslError> {
        let mut alphabet: Vec<SymbolDecl> = Vec::new();
        let mut index: HashMap<String, ()> = HashMap::new();
        let mut name = None;
        let mut expr = None;
        let mut refs = Vec::new();

        loop {
            self.skip_trivia();
            if self.peek().is_none() {
                break;
            }
            let at = self.here();
            let keyword = self.word();
            match keyword {
                Some("sym") => self.symbol_decls(&mut alphabet, &mut index)?,
                Some("name") => {
                    self.expect(':')?;
                    self.skip_trivia();
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if is_label_char(c) || "-.()," .contains(c))
                    {
                        self.bump();
                    }
                    if self.pos == start {
                        return self.syntax("expected a system name");
                    }
                    name = Some(self.src[start..self.pos].to_string());
                    self.optional_semicolon();
                }
                Some("expr") => {
                    if expr.is_some() {
                        return Err(DslError::Syntax {
                            at,
                            message: "second `expr:` clause".into(),
                        });
                    }
                    self.expect(':')?;
                    expr = Some(self.union(&mut refs)?);
                    self.skip_trivia();
                    match self.peek() {
                        None => {}
                        Some(';') => {
                            self.bump();
                        }
                        Some(c) => return self.syntax(format!("unexpected `{c}` in expression")),
                    }
                }
                Some(other) => {
                    return Err(DslError::Syntax {
                        at,
                        message: format!("expected `sym`, `name` or `expr`, found `{other}`"),
                    })
                }
                None => {
                    let c = self.peek().unwrap_or(' ');
                    return self.syntax(format!("unexpected `{c}`"));
                }
            }
        }

        let expr = expr.ok_or(DslError::MissingExpr)?;
        if alphabet.is_empty() {
            return Err(DslError::EmptyAlphabet);
        }
        for (label, at) in refs {
            if !index.contains_key(&label) {
                return Err(DslError::UndeclaredSymbol { label, at });
            }
        }
        Ok(SystemDef {
            name: name.unwrap_or_else(|| "system".to_string()),
            alphabet,
            expr,
        })
    }

    fn optional_semicolon(&mut self) {
        self.skip_trivia();
        if self.peek() == Some(';') {
            self.bump();
        }
    }

    fn symbol_decls(
        &mut self,
        alphabet: &mut Vec<SymbolDecl>,
        index: &mut HashMap<String, ()>,
    ) -> Result<(), DslError> {
        let mut count = 0;
        loop {
            self.skip_trivia();
            if self.peek() == Some(';') {
                self.bump();
                if count == 0 {
                    return self.syntax("`sym` needs at least one declaration");
                }
                return Ok(());
            }
            let at = self.here();
            let Some(label) = self.word() else {
                return match self.peek() {
                    Some(c) => self.syntax(format!("expected a symbol label, found `{c}`")),
                    None => self.syntax("unterminated `sym` statement (missing `;`)"),
                };
            };
            if label == "eps" {
                return Err(DslError::Syntax {
                    at,
                    message: "`eps` is reserved for the empty string".into(),
                });
            }
            self.expect('=')?;
            self.skip_trivia();
            let num_at = self.here();
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit() || "+-.eE".contains(c)) {
                self.bump();
            }
            let raw = &self.src[start..self.pos];
            let weight: f64 = raw.parse().map_err(|_| DslError::Syntax {
                at: num_at,
                message: format!("invalid weight `{raw}`"),
            })?;
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(DslError::NonPositiveWeight {
                    label: label.to_string(),
                    weight,
                    at: num_at,
                });
            }
            if index.insert(label.to_string(), ()).is_some() {
                return Err(DslError::DuplicateSymbol {
                    label: label.to_string(),
                    at,
                });
            }
            alphabet.push(SymbolDecl {
                label: label.to_string(),
                weight,
            });
            count += 1;
        }
    }

    fn union(&mut self, refs: &mut Vec<(String, Position)>) -> Result<Regex, DslError> {
        let mut left = self.concat(refs)?;
        loop {
            self.skip_trivia();
            if self.peek() != Some('|') {
                return Ok(left);
            }
            self.bump();
            let right = self.concat(refs)?;
            left = Regex::union(left, right);
        }
    }

    fn starts_atom(&mut self) -> bool {
        self.skip_trivia();
        matches!(self.peek(), Some(c) if c == '(' || is_label_char(c))
    }

    fn concat(&mut self, refs: &mut Vec<(String, Position)>) -> Result<Regex, DslError> {
        if !self.starts_atom() {
            return match self.peek() {
                Some(c) => self.syntax(format!("expected an expression, found `{c}`")),
                None => self.syntax("expected an expression, found end of input"),
            };
        }
        let mut left = self.postfix(refs)?;
        while self.starts_atom() {
            let right = self.postfix(refs)?;
            left = Regex::concat(left, right);
        }
        Ok(left)
    }

    fn postfix(&mut self, refs: &mut Vec<(String, Position)>) -> Result<Regex, DslError> {
        let mut node = self.atom(refs)?;
        loop {
            self.skip_trivia();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    node = Regex::star(node);
                }
                Some('{') => {
                    self.bump();
                    let (min, max) = self.bounds()?;
                    node = Regex::repeat(&node, min, max);
                }
                _ => return Ok(node),
            }
        }
    }

    fn count(&mut self) -> Result<usize, DslError> {
        self.skip_trivia();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return self.syntax("expected a repetition count");
        }
        self.src[start..self.pos]
            .parse()
            .or_else(|_| self.syntax("repetition count out of range"))
    }

    fn bounds(&mut self) -> Result<(usize, usize), DslError> {
        let at = self.here();
        let min = self.count()?;
        self.skip_trivia();
        let max = if self.peek() == Some(',') {
            self.bump();
            self.count()?
        } else {
            min
        };
        self.expect('}')?;
        if min > max || max == 0 || max > MAX_REPETITION {
            return Err(DslError::Syntax {
                at,
                message: format!("invalid repetition bounds {{{min},{max}}}"),
            });
        }
        Ok((min, max))
    }

    fn atom(&mut self, refs: &mut Vec<(String, Position)>) -> Result<Regex, DslError> {
        self.skip_trivia();
        let at = self.here();
        if self.peek() == Some('(') {
            self.bump();
            let inner = self.union(refs)?;
            self.expect(')')?;
            return Ok(inner);
        }
        match self.word() {
            Some("eps") => Ok(Regex::Epsilon),
            Some(label) => {
                refs.push((label.to_string(), at));
                Ok(Regex::sym(label))
            }
            None => self.syntax("expected a symbol, `eps` or `(`"),
        }
    }
}
