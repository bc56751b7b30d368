//! AST and substitution machinery for the formula language: atoms over
//! predicate symbols, conjunction, disjunction, guarded universal implication
//! `all x.. (A -> B)`, and existential quantification, with numeric constants
//! as the only non-variable terms.
//!
//! Implication exists only under a (possibly empty) universal block; a bare
//! `A -> B` is the empty block `all (A -> B)` and there is no separate node
//! for it.

mod parse;

pub use parse::{parse_formula, parse_sequent, parse_signature, ParseError};

use crate::numbering::Nat;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Variable identifier: ASCII letter followed by alphanumerics.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(String);

impl VarName {
    pub fn new(s: impl Into<String>) -> VarName {
        VarName(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> VarName {
        VarName(s.to_string())
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Predicate symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredName(String);

impl PredName {
    pub fn new(s: impl Into<String>) -> PredName {
        PredName(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for PredName {
    fn from(s: &str) -> PredName {
        PredName(s.to_string())
    }
}

impl fmt::Display for PredName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Predicate symbols with their declared arities. Undeclared symbols are
/// parse-time errors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    preds: BTreeMap<PredName, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn declare(&mut self, name: impl Into<PredName>, arity: usize) {
        self.preds.insert(name.into(), arity);
    }

    pub fn arity(&self, name: &PredName) -> Option<usize> {
        self.preds.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PredName, usize)> {
        self.preds.iter().map(|(n, &a)| (n, a))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sep = "";
        for (name, arity) in self.iter() {
            write!(f, "{sep}{name}/{arity}")?;
            sep = ", ";
        }
        Ok(())
    }
}

/// Term: a variable or a numeric constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LTerm {
    Var(VarName),
    Num(Nat),
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LTerm::Var(v) => write!(f, "{v}"),
            LTerm::Num(k) => write!(f, "{k}"),
        }
    }
}

/// Formula of the guarded language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Top,
    Atom(PredName, Vec<LTerm>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `all x1 .. xn (ant -> cons)`; the variable list may be empty.
    AllImp(Vec<VarName>, Box<Formula>, Box<Formula>),
    Exists(VarName, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn all_imp(vars: Vec<VarName>, ant: Formula, cons: Formula) -> Formula {
        Formula::AllImp(vars, Box::new(ant), Box::new(cons))
    }

    pub fn exists(var: VarName, body: Formula) -> Formula {
        Formula::Exists(var, Box::new(body))
    }

    pub fn atom(name: impl Into<PredName>, args: Vec<LTerm>) -> Formula {
        Formula::Atom(name.into(), args)
    }

    /// Variables with a free occurrence. `AllImp` binds its list in both the
    /// antecedent and the consequent; `Exists` binds its variable in the body.
    pub fn free_vars(&self) -> BTreeSet<VarName> {
        fn go(f: &Formula, bound: &mut Vec<VarName>, acc: &mut BTreeSet<VarName>) {
            match f {
                Formula::Bot | Formula::Top => {}
                Formula::Atom(_, args) => {
                    for t in args {
                        if let LTerm::Var(v) = t {
                            if !bound.contains(v) {
                                acc.insert(v.clone());
                            }
                        }
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, acc);
                    go(b, bound, acc);
                }
                Formula::AllImp(vars, ant, cons) => {
                    let depth = bound.len();
                    bound.extend(vars.iter().cloned());
                    go(ant, bound, acc);
                    go(cons, bound, acc);
                    bound.truncate(depth);
                }
                Formula::Exists(v, body) => {
                    bound.push(v.clone());
                    go(body, bound, acc);
                    bound.pop();
                }
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut Vec::new(), &mut acc);
        acc
    }

    /// All variable names occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<VarName> {
        fn go(f: &Formula, acc: &mut BTreeSet<VarName>) {
            match f {
                Formula::Bot | Formula::Top => {}
                Formula::Atom(_, args) => {
                    for t in args {
                        if let LTerm::Var(v) = t {
                            acc.insert(v.clone());
                        }
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, acc);
                    go(b, acc);
                }
                Formula::AllImp(vars, ant, cons) => {
                    acc.extend(vars.iter().cloned());
                    go(ant, acc);
                    go(cons, acc);
                }
                Formula::Exists(v, body) => {
                    acc.insert(v.clone());
                    go(body, acc);
                }
            }
        }
        let mut acc = BTreeSet::new();
        go(self, &mut acc);
        acc
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }
}

fn needs_parens_in_and(f: &Formula) -> bool {
    matches!(f, Formula::Or(..) | Formula::Exists(..))
}

fn needs_parens_in_or(f: &Formula) -> bool {
    matches!(f, Formula::Exists(..))
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bot => write!(f, "bot"),
            Formula::Top => write!(f, "top"),
            Formula::Atom(p, args) => {
                write!(f, "{p}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, t) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{t}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::And(a, b) => {
                if needs_parens_in_and(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " & ")?;
                if needs_parens_in_and(b) || matches!(**b, Formula::And(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::Or(a, b) => {
                if needs_parens_in_or(a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " | ")?;
                if needs_parens_in_or(b) || matches!(**b, Formula::Or(..)) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Formula::AllImp(vars, ant, cons) => {
                if !vars.is_empty() {
                    write!(f, "all ")?;
                    for v in vars {
                        write!(f, "{v} ")?;
                    }
                }
                write!(f, "({ant} -> {cons})")
            }
            Formula::Exists(v, body) => {
                // The existential operand is a quantifier-level unit; binary
                // connectives in the body need parentheses.
                if matches!(**body, Formula::And(..) | Formula::Or(..)) {
                    write!(f, "ex {v} ({body})")
                } else {
                    write!(f, "ex {v} {body}")
                }
            }
        }
    }
}

/// Sequent `lhs => rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(lhs: Formula, rhs: Formula) -> Sequent {
        Sequent { lhs, rhs }
    }

    pub fn free_vars(&self) -> BTreeSet<VarName> {
        let mut fv = self.lhs.free_vars();
        fv.extend(self.rhs.free_vars());
        fv
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}", self.lhs, self.rhs)
    }
}

/// Error from [`VarList::new`] or [`substitute`].
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("variable list contains a duplicate: {0}")]
    DuplicateVar(VarName),
    #[error("substitution expects {vars} terms, got {terms}")]
    SubstLength { vars: usize, terms: usize },
}

/// Duplicate-free list of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VarList(Vec<VarName>);

impl VarList {
    pub fn new(vars: Vec<VarName>) -> Result<VarList, SyntaxError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(SyntaxError::DuplicateVar(v.clone()));
            }
        }
        Ok(VarList(vars))
    }

    pub fn empty() -> VarList {
        VarList(Vec::new())
    }

    pub fn vars(&self) -> &[VarName] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: &VarName) -> bool {
        self.0.contains(v)
    }

    pub fn position(&self, v: &VarName) -> Option<usize> {
        self.0.iter().position(|w| w == v)
    }

    /// True iff every free variable of both sides of `s` occurs in the list.
    pub fn is_admissible_for(&self, s: &Sequent) -> bool {
        s.free_vars().iter().all(|v| self.contains(v))
    }
}

impl fmt::Display for VarList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// True iff `xs` covers all free variables of the sequent.
pub fn is_admissible(xs: &VarList, s: &Sequent) -> bool {
    xs.is_admissible_for(s)
}

fn term_var(t: &LTerm) -> Option<&VarName> {
    match t {
        LTerm::Var(v) => Some(v),
        LTerm::Num(_) => None,
    }
}

/// Smallest unused numeric suffix: `x1`, `x2`, ... for base `x`.
fn fresh_name(base: &VarName, avoid: &BTreeSet<VarName>) -> VarName {
    let mut i = 1u64;
    loop {
        let cand = VarName::new(format!("{}{}", base.as_str(), i));
        if !avoid.contains(&cand) {
            return cand;
        }
        i += 1;
    }
}

/// Simultaneous capture-avoiding substitution of `ts` for the free
/// occurrences of `xs`. Bound variables are renamed (smallest unused numeric
/// suffix) exactly when a replacement term would otherwise be captured, so
/// the output is deterministic.
pub fn substitute(formula: &Formula, xs: &VarList, ts: &[LTerm]) -> Result<Formula, SyntaxError> {
    if xs.len() != ts.len() {
        return Err(SyntaxError::SubstLength {
            vars: xs.len(),
            terms: ts.len(),
        });
    }
    let map: BTreeMap<VarName, LTerm> = xs
        .vars()
        .iter()
        .cloned()
        .zip(ts.iter().cloned())
        .collect();
    Ok(subst_rec(formula, &map))
}

fn subst_rec(formula: &Formula, map: &BTreeMap<VarName, LTerm>) -> Formula {
    match formula {
        Formula::Bot => Formula::Bot,
        Formula::Top => Formula::Top,
        Formula::Atom(p, args) => Formula::Atom(
            p.clone(),
            args.iter()
                .map(|t| match t {
                    LTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
                    LTerm::Num(_) => t.clone(),
                })
                .collect(),
        ),
        Formula::And(a, b) => Formula::and(subst_rec(a, map), subst_rec(b, map)),
        Formula::Or(a, b) => Formula::or(subst_rec(a, map), subst_rec(b, map)),
        Formula::AllImp(vars, ant, cons) => {
            let mut free_body = ant.free_vars();
            free_body.extend(cons.free_vars());
            let (new_vars, inner) = adjust_binder(vars, map, &free_body);
            Formula::all_imp(new_vars, subst_rec(ant, &inner), subst_rec(cons, &inner))
        }
        Formula::Exists(v, body) => {
            let free_body = body.free_vars();
            let (mut new_vars, inner) =
                adjust_binder(std::slice::from_ref(v), map, &free_body);
            Formula::exists(new_vars.remove(0), subst_rec(body, &inner))
        }
    }
}

/// Handles a binder during substitution: drops map entries shadowed by the
/// binder and renames bound variables that would capture a replacement term.
/// Returns the adjusted binder names and the map to use inside the scope.
fn adjust_binder(
    vars: &[VarName],
    map: &BTreeMap<VarName, LTerm>,
    free_body: &BTreeSet<VarName>,
) -> (Vec<VarName>, BTreeMap<VarName, LTerm>) {
    // Active entries: substituted variables free in the body, not shadowed.
    let mut inner: BTreeMap<VarName, LTerm> = map
        .iter()
        .filter(|(x, _)| free_body.contains(*x) && !vars.contains(x))
        .map(|(x, t)| (x.clone(), t.clone()))
        .collect();

    // Fresh names must avoid everything visible here.
    let mut avoid: BTreeSet<VarName> = free_body.clone();
    for t in inner.values() {
        if let Some(v) = term_var(t) {
            avoid.insert(v.clone());
        }
    }
    avoid.extend(vars.iter().cloned());

    let mut new_vars = Vec::with_capacity(vars.len());
    for v in vars {
        let captured = inner.values().any(|t| term_var(t).is_some_and(|w| w == v));
        if captured {
            let fresh = fresh_name(v, &avoid);
            avoid.insert(fresh.clone());
            inner.insert(v.clone(), LTerm::Var(fresh.clone()));
            new_vars.push(fresh);
        } else {
            inner.remove(v);
            new_vars.push(v.clone());
        }
    }
    (new_vars, inner)
}

/// Alpha-equivalence: equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    fn go(
        a: &Formula,
        b: &Formula,
        env_a: &mut Vec<VarName>,
        env_b: &mut Vec<VarName>,
    ) -> bool {
        match (a, b) {
            (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| match (x, y) {
                        (LTerm::Num(m), LTerm::Num(n)) => m == n,
                        (LTerm::Var(v), LTerm::Var(w)) => {
                            let ia = env_a.iter().rposition(|u| u == v);
                            let ib = env_b.iter().rposition(|u| u == w);
                            match (ia, ib) {
                                (Some(i), Some(j)) => i == j,
                                (None, None) => v == w,
                                _ => false,
                            }
                        }
                        _ => false,
                    })
            }
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2)) => {
                go(a1, b1, env_a, env_b) && go(a2, b2, env_a, env_b)
            }
            (Formula::AllImp(vs, a1, a2), Formula::AllImp(ws, b1, b2)) => {
                if vs.len() != ws.len() {
                    return false;
                }
                let depth = env_a.len();
                env_a.extend(vs.iter().cloned());
                env_b.extend(ws.iter().cloned());
                let ok = go(a1, b1, env_a, env_b) && go(a2, b2, env_a, env_b);
                env_a.truncate(depth);
                env_b.truncate(depth);
                ok
            }
            (Formula::Exists(v, a1), Formula::Exists(w, b1)) => {
                env_a.push(v.clone());
                env_b.push(w.clone());
                let ok = go(a1, b1, env_a, env_b);
                env_a.pop();
                env_b.pop();
                ok
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Alpha-equivalence of sequents, componentwise.
pub fn alpha_eq_sequent(a: &Sequent, b: &Sequent) -> bool {
    alpha_eq(&a.lhs, &b.lhs) && alpha_eq(&a.rhs, &b.rhs)
}
