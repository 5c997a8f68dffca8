//! Generating functions of constrained systems on the real axis.
//!
//! A regex compiles structurally into a sum of exponentials `e^{-w s}`:
//! symbols become terms, union becomes a sum, concatenation a product and the
//! star a geometric series. For an unambiguous regex the Dirichlet
//! coefficients of the result are exactly the string counts per weight, and
//! the abscissa of convergence of the series is the combinatorial capacity.
//! Ambiguous regexes overcount; [`crate::spectrum::cross_check_gf`] detects
//! that against an explicit enumeration.

use thiserror::Error;

use crate::dsl::{Regex, SystemDef};
use crate::exec::Execution;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;
/// Doublings of the upper bracket before giving up on finding convergence.
const MAX_GROWTH: usize = 64;
pub const MAX_JK: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenFunError {
    #[error(
        "bisection did not reach tolerance {tol} in {iterations} iterations (bracket [{lo}, {hi}])"
    )]
    NotConverged {
        lo: f64,
        hi: f64,
        tol: f64,
        iterations: usize,
    },
    #[error("generating function diverges for every real s up to {probed}")]
    DivergesEverywhere { probed: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("run-length parameters must lie in 1..={max}, got j={j}, k={k}")]
    InvalidRunLength { j: usize, k: usize, max: usize },
}

/// Generating-function expression tree. `Term(w)` stands for `e^{-w s}`.
#[derive(Debug, Clone, PartialEq)]
pub enum GenExpr {
    Term(f64),
    Sum(Vec<GenExpr>),
    Product(Vec<GenExpr>),
    StarClosure(Box<GenExpr>),
}

/// Value of a generating function at a real point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalOutcome {
    Value(f64),
    Divergent,
}

impl EvalOutcome {
    pub fn value(self) -> Option<f64> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            EvalOutcome::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, EvalOutcome::Divergent)
    }
}

/// How the abscissa search ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityKind {
    /// The series has a finite abscissa `Q >= 0`.
    Finite,
    /// The series converges at `s = 0`: the language is finite and has
    /// capacity 0. `Q` is reported as 0 rather than `-inf`.
    FiniteLanguage,
    /// The series is identically zero.
    EmptyLanguage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub q: f64,
    pub kind: CapacityKind,
    /// Largest probed point where the series diverges.
    pub bracket_lo: f64,
    /// Smallest probed point where it converges; `q` equals this.
    pub bracket_hi: f64,
    /// `1 / Φ(bracket_hi)`; close to zero when `bracket_hi` sits on the pole.
    pub residual: f64,
    pub iterations: usize,
}

/// Structural translation of a regex; one node per regex node.
pub fn compile_gf(expr: &Regex, system: &SystemDef) -> GenExpr {
    match expr {
        Regex::Symbol(label) => {
            let i = system
                .symbol_index(label)
                .expect("regex validated against its alphabet");
            GenExpr::Term(system.alphabet[i].weight)
        }
        Regex::Epsilon => GenExpr::Term(0.0),
        Regex::Union(a, b) => GenExpr::Sum(vec![compile_gf(a, system), compile_gf(b, system)]),
        Regex::Concat(a, b) => GenExpr::Product(vec![compile_gf(a, system), compile_gf(b, system)]),
        Regex::Star(c) => GenExpr::StarClosure(Box::new(compile_gf(c, system))),
    }
}

/// Generating function of a whole system.
pub fn system_gf(system: &SystemDef) -> GenExpr {
    compile_gf(&system.expr, system)
}

impl GenExpr {
    pub fn eval(&self, s: f64) -> EvalOutcome {
        eval_real(self, s)
    }
}

/// Evaluates the series at real `s`. Non-finite intermediate values count as
/// divergence.
pub fn eval_real(g: &GenExpr, s: f64) -> EvalOutcome {
    use EvalOutcome::*;
    let out = match g {
        GenExpr::Term(w) => {
            if *w == 0.0 {
                Value(1.0)
            } else {
                Value((-w * s).exp())
            }
        }
        GenExpr::Sum(children) => {
            let mut total = 0.0;
            for c in children {
                match eval_real(c, s) {
                    Value(v) => total += v,
                    Divergent => return Divergent,
                }
            }
            Value(total)
        }
        GenExpr::Product(children) => {
            let mut total = 1.0;
            let mut divergent = false;
            for c in children {
                match eval_real(c, s) {
                    // an empty factor empties the whole product
                    Value(0.0) => return Value(0.0),
                    Value(v) => total *= v,
                    Divergent => divergent = true,
                }
            }
            if divergent {
                Divergent
            } else {
                Value(total)
            }
        }
        GenExpr::StarClosure(c) => match eval_real(c, s) {
            Value(v) if v < 1.0 => Value(1.0 / (1.0 - v)),
            _ => Divergent,
        },
    };
    match out {
        Value(v) if !v.is_finite() => Divergent,
        other => other,
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<(), GenFunError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(GenFunError::BadTolerance(tol))
    }
}

/// Shared bisection for a predicate that is false (divergent side) below the
/// root and true above it. Starts from `lo`, which must be on the false side,
/// and grows `hi` by doubling from `lo + 1`. Returns `(lo, hi, iterations)`
/// with `hi - lo <= tol`.
pub(crate) fn bisect_threshold(
    mut lo: f64,
    tol: f64,
    max_iter: usize,
    converges: impl Fn(f64) -> bool,
) -> Result<(f64, f64, usize), GenFunError> {
    let mut step = 1.0;
    let mut hi = lo + step;
    let mut grown = 0;
    while !converges(hi) {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        grown += 1;
        if grown > MAX_GROWTH {
            return Err(GenFunError::DivergesEverywhere { probed: hi });
        }
    }
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations >= max_iter {
            return Err(GenFunError::NotConverged {
                lo,
                hi,
                tol,
                iterations,
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Err(GenFunError::NotConverged {
                lo,
                hi,
                tol,
                iterations,
            });
        }
        if converges(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok((lo, hi, iterations))
}

/// Abscissa of convergence with the default iteration cap.
pub fn abscissa(g: &GenExpr, tol: f64) -> Result<CapacityResult, GenFunError> {
    abscissa_with(g, tol, DEFAULT_MAX_ITER)
}

/// Infimum of the real `s` where `g` converges, by bisection.
///
/// Divergence is downward closed and the series is non-increasing in `s`
/// because every exponent is `-w s` with `w >= 0`. With positive weights an
/// infinite language diverges at `s = 0`, so the search starts from `lo = 0`.
pub fn abscissa_with(
    g: &GenExpr,
    tol: f64,
    max_iter: usize,
) -> Result<CapacityResult, GenFunError> {
    check_tol(tol)?;
    if let EvalOutcome::Value(v) = eval_real(g, 0.0) {
        let kind = if v == 0.0 {
            CapacityKind::EmptyLanguage
        } else {
            CapacityKind::FiniteLanguage
        };
        return Ok(CapacityResult {
            q: 0.0,
            kind,
            bracket_lo: 0.0,
            bracket_hi: 0.0,
            residual: if v == 0.0 { f64::INFINITY } else { 1.0 / v },
            iterations: 0,
        });
    }
    let (lo, hi, iterations) =
        bisect_threshold(0.0, tol, max_iter, |s| !eval_real(g, s).is_divergent())?;
    let at_hi = eval_real(g, hi)
        .value()
        .expect("hi is on the convergent side");
    Ok(CapacityResult {
        q: hi,
        kind: CapacityKind::Finite,
        bracket_lo: lo,
        bracket_hi: hi,
        residual: 1.0 / at_hi,
        iterations,
    })
}

/// `e^{-s} + e^{-2s} + ... + e^{-n s}`.
fn run_sum(n: usize, s: f64) -> f64 {
    let x = (-s).exp();
    let mut term = 1.0;
    let mut total = 0.0;
    for _ in 0..n {
        term *= x;
        total += term;
    }
    total
}

/// Capacity of the `(j,k)` run-length constraint: the largest real root of
/// `(e^{-s}+...+e^{-js})(e^{-s}+...+e^{-ks}) = 1`, found by bisection on the
/// strictly decreasing left-hand side. Reports the upper bracket end, like
/// [`abscissa`], so both agree within `tol` when both succeed.
pub fn capacity_jk(j: usize, k: usize, tol: f64) -> Result<f64, GenFunError> {
    if j == 0 || k == 0 || j > MAX_JK || k > MAX_JK {
        return Err(GenFunError::InvalidRunLength { j, k, max: MAX_JK });
    }
    check_tol(tol)?;
    let (_, hi, _) = bisect_threshold(0.0, tol, DEFAULT_MAX_ITER, |s| {
        run_sum(j, s) * run_sum(k, s) < 1.0
    })?;
    Ok(hi)
}

/// `table[j-1][k-1] = capacity_jk(j, k)` for `j <= j_max`, `k <= k_max`.
pub fn jk_table(
    j_max: usize,
    k_max: usize,
    tol: f64,
    exec: Execution,
) -> Result<Vec<Vec<f64>>, GenFunError> {
    if j_max == 0 || k_max == 0 || j_max > MAX_JK || k_max > MAX_JK {
        return Err(GenFunError::InvalidRunLength {
            j: j_max,
            k: k_max,
            max: MAX_JK,
        });
    }
    let cells = exec.map_range(0..j_max * k_max, |i| {
        capacity_jk(i / k_max + 1, i % k_max + 1, tol)
    });
    let flat: Vec<f64> = cells.into_iter().collect::<Result<_, _>>()?;
    Ok(flat.chunks(k_max).map(<[f64]>::to_vec).collect())
}
