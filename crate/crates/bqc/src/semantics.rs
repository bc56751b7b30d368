//! Realizability over finite domains, as a decision procedure.
//!
//! An [`Evaluation`] pins a finite domain and, for every predicate symbol, a
//! finite realizer set per argument tuple. For implication-free, `top`-free
//! closed formulas the realizer set is finite and computed exactly by
//! [`real_set`]. Everywhere else [`check`] decides membership structurally;
//! antecedents of implications whose realizer sets are not exactly
//! enumerable are either swept up to a bound (three-valued result) or
//! iterated over caller-supplied witness sets
//! ([`check_with_witnesses`]).
//!
//! Over the empty domain every universally guarded implication holds and
//! every atom or existential check fails.

use crate::numbering::{self, eval, in_index_set, unpair, EvalOutcome, Nat};
use crate::syntax::{substitute, Formula, LTerm, PredName, Sequent, VarList, VarName};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Finite generalized predicate: realizer sets per argument tuple. Tuples
/// without an entry have the empty realizer set (the map is total).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredTable {
    rows: BTreeMap<Vec<Nat>, BTreeSet<Nat>>,
}

impl PredTable {
    pub fn new() -> PredTable {
        PredTable::default()
    }

    pub fn insert(&mut self, args: Vec<Nat>, realizers: BTreeSet<Nat>) {
        self.rows.insert(args, realizers);
    }

    pub fn get(&self, args: &[Nat]) -> Option<&BTreeSet<Nat>> {
        self.rows.get(args)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&Vec<Nat>, &BTreeSet<Nat>)> {
        self.rows.iter()
    }
}

/// A finite domain plus a table for each predicate symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evaluation {
    pub domain: BTreeSet<Nat>,
    pub preds: BTreeMap<PredName, PredTable>,
}

impl Evaluation {
    pub fn new(domain: BTreeSet<Nat>) -> Evaluation {
        Evaluation {
            domain,
            preds: BTreeMap::new(),
        }
    }

    fn realizers(&self, pred: &PredName, args: &[Nat]) -> Option<&BTreeSet<Nat>> {
        self.preds.get(pred).and_then(|t| t.get(args))
    }
}

/// Input-level failure of the checker (distinct from a `Fails` verdict).
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SemanticsError {
    #[error("constant {0} lies outside the domain")]
    ConstantOutsideDomain(Nat),
    #[error("formula has a free variable {0}")]
    FreeVariable(VarName),
    #[error("realizer sets are only enumerable for implication-free formulas")]
    RankPositive,
    #[error("realizer sets of top are not finite")]
    ContainsTop,
    #[error("variable list not admissible for the sequent")]
    InadmissibleList,
    #[error("quantifier binds a duplicate variable {0}")]
    DuplicateBinder(VarName),
    #[error("no witness set supplied for implication antecedent at {path} with values ({values})")]
    MissingWitness { path: FormulaPath, values: String },
}

/// Step into a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathStep {
    AndL,
    AndR,
    OrL,
    OrR,
    Body,
    Ant,
    Cons,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PathStep::AndL => "left",
            PathStep::AndR => "right",
            PathStep::OrL => "left",
            PathStep::OrR => "right",
            PathStep::Body => "body",
            PathStep::Ant => "ant",
            PathStep::Cons => "cons",
        };
        write!(f, "{s}")
    }
}

/// Path from the root formula to a subformula occurrence; the root is the
/// empty path, printed as `.`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct FormulaPath(pub Vec<PathStep>);

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, ".");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Parses a path rendered by [`FormulaPath::fmt`]: `.` or `ant.left.cons`.
pub fn parse_path(s: &str) -> Option<FormulaPath> {
    let s = s.trim();
    if s == "." || s.is_empty() {
        return Some(FormulaPath::default());
    }
    let mut steps = Vec::new();
    for part in s.split('.') {
        steps.push(match part {
            "left" => PathStep::AndL,
            "right" => PathStep::AndR,
            "body" => PathStep::Body,
            "ant" => PathStep::Ant,
            "cons" => PathStep::Cons,
            _ => return None,
        });
    }
    Some(FormulaPath(steps))
}

/// Witness sets for implication-antecedent positions, keyed by the path to
/// the implication node and the domain values bound on the way to (and at)
/// that node, in binding order.
pub type WitnessMap = BTreeMap<(FormulaPath, Vec<Nat>), BTreeSet<Nat>>;

/// Replayable record of the violated implication obligation: running
/// [`eval`] on `code` and `args` reproduces `outcome`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplWitness {
    pub code: Nat,
    pub args: Vec<Nat>,
    pub outcome: EvalOutcome,
}

/// Counterexample trace: decomposition frames from the root to the violated
/// obligation, plus the innermost implication replay when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailTrace {
    pub frames: Vec<String>,
    pub witness: Option<ImplWitness>,
}

impl FailTrace {
    fn leaf(reason: impl Into<String>) -> FailTrace {
        FailTrace {
            frames: vec![reason.into()],
            witness: None,
        }
    }

    fn framed(mut self, frame: String) -> FailTrace {
        self.frames.insert(0, frame);
        self
    }
}

impl fmt::Display for FailTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, frame) in self.frames.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:indent$}{frame}", "", indent = i * 2)?;
        }
        Ok(())
    }
}

/// Three-valued outcome of bounded realizability checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(FailTrace),
    /// Every checked obligation held, but some antecedent sweep was cut off
    /// at the recorded bound.
    Unknown(u64),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails(_) => write!(f, "fails"),
            Verdict::Unknown(b) => write!(f, "unknown (bound {b})"),
        }
    }
}

/// Implication-nesting rank: 0 iff the formula is implication-free.
pub fn rank(f: &Formula) -> u32 {
    match f {
        Formula::Bot | Formula::Top | Formula::Atom(..) => 0,
        Formula::And(a, b) | Formula::Or(a, b) => rank(a).max(rank(b)),
        Formula::Exists(_, body) => rank(body),
        Formula::AllImp(_, ant, cons) => (1 + rank(ant)).max(rank(cons)),
    }
}

/// True iff `top` occurs anywhere in the formula.
pub fn contains_top(f: &Formula) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot | Formula::Atom(..) => false,
        Formula::And(a, b) | Formula::Or(a, b) => contains_top(a) || contains_top(b),
        Formula::Exists(_, body) => contains_top(body),
        Formula::AllImp(_, ant, cons) => contains_top(ant) || contains_top(cons),
    }
}

/// True iff the realizer set of the formula is finite and exactly
/// computable over a finite evaluation: implication-free and `top`-free.
pub fn exactly_enumerable(f: &Formula) -> bool {
    rank(f) == 0 && !contains_top(f)
}

fn formula_constants(f: &Formula, acc: &mut BTreeSet<Nat>) {
    match f {
        Formula::Bot | Formula::Top => {}
        Formula::Atom(_, args) => {
            for t in args {
                if let LTerm::Num(k) = t {
                    acc.insert(k.clone());
                }
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            formula_constants(a, acc);
            formula_constants(b, acc);
        }
        Formula::Exists(_, body) => formula_constants(body, acc),
        Formula::AllImp(_, ant, cons) => {
            formula_constants(ant, acc);
            formula_constants(cons, acc);
        }
    }
}

fn require_constants_in_domain(f: &Formula, ev: &Evaluation) -> Result<(), SemanticsError> {
    let mut consts = BTreeSet::new();
    formula_constants(f, &mut consts);
    for k in consts {
        if !ev.domain.contains(&k) {
            return Err(SemanticsError::ConstantOutsideDomain(k));
        }
    }
    Ok(())
}

fn require_closed(f: &Formula) -> Result<(), SemanticsError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(SemanticsError::FreeVariable(v));
    }
    Ok(())
}

fn atom_args(args: &[LTerm]) -> Result<Vec<Nat>, SemanticsError> {
    args.iter()
        .map(|t| match t {
            LTerm::Num(k) => Ok(k.clone()),
            LTerm::Var(v) => Err(SemanticsError::FreeVariable(v.clone())),
        })
        .collect()
}

/// The exact, finite realizer set of a closed, implication-free, `top`-free
/// formula.
pub fn real_set(formula: &Formula, ev: &Evaluation) -> Result<BTreeSet<Nat>, SemanticsError> {
    require_closed(formula)?;
    if rank(formula) > 0 {
        return Err(SemanticsError::RankPositive);
    }
    if contains_top(formula) {
        return Err(SemanticsError::ContainsTop);
    }
    require_constants_in_domain(formula, ev)?;
    real_set_rec(formula, ev)
}

fn real_set_rec(formula: &Formula, ev: &Evaluation) -> Result<BTreeSet<Nat>, SemanticsError> {
    match formula {
        Formula::Bot => Ok(BTreeSet::new()),
        Formula::Top => Err(SemanticsError::ContainsTop),
        Formula::Atom(p, args) => {
            let args = atom_args(args)?;
            for a in &args {
                if !ev.domain.contains(a) {
                    return Err(SemanticsError::ConstantOutsideDomain(a.clone()));
                }
            }
            Ok(ev.realizers(p, &args).cloned().unwrap_or_default())
        }
        Formula::And(a, b) => {
            let sa = real_set_rec(a, ev)?;
            let sb = real_set_rec(b, ev)?;
            let mut out = BTreeSet::new();
            for x in &sa {
                for y in &sb {
                    out.insert(numbering::pair(x, y));
                }
            }
            Ok(out)
        }
        Formula::Or(a, b) => {
            let sa = real_set_rec(a, ev)?;
            let sb = real_set_rec(b, ev)?;
            let mut out = BTreeSet::new();
            for x in &sa {
                out.insert(numbering::pair(&Nat::zero(), x));
            }
            for y in &sb {
                out.insert(numbering::pair(&Nat::one(), y));
            }
            Ok(out)
        }
        Formula::Exists(x, body) => {
            let xs = VarList::new(vec![x.clone()])
                .map_err(|_| SemanticsError::DuplicateBinder(x.clone()))?;
            let mut out = BTreeSet::new();
            for m in &ev.domain {
                let inst = substitute(body, &xs, &[LTerm::Num(m.clone())])
                    .expect("arity 1 substitution");
                for s in real_set_rec(&inst, ev)? {
                    out.insert(numbering::pair(m, &s));
                }
            }
            Ok(out)
        }
        Formula::AllImp(..) => Err(SemanticsError::RankPositive),
    }
}

enum AntecedentMode<'w> {
    Bounded(u64),
    Witnessed(&'w WitnessMap),
}

struct Checker<'a> {
    ev: &'a Evaluation,
    fuel: u64,
    mode: AntecedentMode<'a>,
}

/// Whether an antecedent sweep covered the whole realizer set.
#[derive(PartialEq)]
enum Coverage {
    Exact,
    Bounded,
}

impl<'a> Checker<'a> {
    fn check(
        &self,
        e: &Nat,
        formula: &Formula,
        path: &mut Vec<PathStep>,
        bound_vals: &mut Vec<Nat>,
    ) -> Result<Verdict, SemanticsError> {
        match formula {
            Formula::Top => Ok(Verdict::Holds),
            Formula::Bot => Ok(Verdict::Fails(FailTrace::leaf(format!(
                "{e} cannot realize bot"
            )))),
            Formula::Atom(p, args) => {
                if self.ev.domain.is_empty() {
                    return Ok(Verdict::Fails(FailTrace::leaf(format!(
                        "atom {p} over the empty domain"
                    ))));
                }
                let vals = atom_args(args)?;
                for a in &vals {
                    if !self.ev.domain.contains(a) {
                        return Err(SemanticsError::ConstantOutsideDomain(a.clone()));
                    }
                }
                let member = self
                    .ev
                    .realizers(p, &vals)
                    .map(|s| s.contains(e))
                    .unwrap_or(false);
                if member {
                    Ok(Verdict::Holds)
                } else {
                    Ok(Verdict::Fails(FailTrace::leaf(format!(
                        "{e} is not a realizer of {}",
                        Formula::Atom(p.clone(), args.clone())
                    ))))
                }
            }
            Formula::And(a, b) => {
                let (ea, eb) = unpair(e);
                path.push(PathStep::AndL);
                let va = self.check(&ea, a, path, bound_vals)?;
                path.pop();
                if let Verdict::Fails(tr) = va {
                    return Ok(Verdict::Fails(tr.framed(format!(
                        "first component {ea} of {e} fails on {a}"
                    ))));
                }
                path.push(PathStep::AndR);
                let vb = self.check(&eb, b, path, bound_vals)?;
                path.pop();
                match vb {
                    Verdict::Fails(tr) => Ok(Verdict::Fails(tr.framed(format!(
                        "second component {eb} of {e} fails on {b}"
                    )))),
                    Verdict::Unknown(k) => Ok(Verdict::Unknown(k)),
                    Verdict::Holds => Ok(va),
                }
            }
            Formula::Or(a, b) => {
                let (tag, inner) = unpair(e);
                if tag.is_zero() {
                    path.push(PathStep::OrL);
                    let v = self.check(&inner, a, path, bound_vals)?;
                    path.pop();
                    Ok(match v {
                        Verdict::Fails(tr) => Verdict::Fails(
                            tr.framed(format!("{e} selects the left branch with {inner}")),
                        ),
                        other => other,
                    })
                } else if tag.is_one() {
                    path.push(PathStep::OrR);
                    let v = self.check(&inner, b, path, bound_vals)?;
                    path.pop();
                    Ok(match v {
                        Verdict::Fails(tr) => Verdict::Fails(
                            tr.framed(format!("{e} selects the right branch with {inner}")),
                        ),
                        other => other,
                    })
                } else {
                    Ok(Verdict::Fails(FailTrace::leaf(format!(
                        "disjunction tag of {e} is {tag}, not 0 or 1"
                    ))))
                }
            }
            Formula::Exists(x, body) => {
                if self.ev.domain.is_empty() {
                    return Ok(Verdict::Fails(FailTrace::leaf(
                        "existential over the empty domain",
                    )));
                }
                let (m, inner) = unpair(e);
                if !self.ev.domain.contains(&m) {
                    return Ok(Verdict::Fails(FailTrace::leaf(format!(
                        "witness {m} of {e} lies outside the domain"
                    ))));
                }
                let xs = VarList::new(vec![x.clone()])
                    .map_err(|_| SemanticsError::DuplicateBinder(x.clone()))?;
                let inst =
                    substitute(body, &xs, &[LTerm::Num(m.clone())]).expect("arity 1 substitution");
                path.push(PathStep::Body);
                bound_vals.push(m.clone());
                let v = self.check(&inner, &inst, path, bound_vals)?;
                bound_vals.pop();
                path.pop();
                Ok(match v {
                    Verdict::Fails(tr) =>

                        Verdict::Fails(tr.framed(format!("{e} picks witness {m} with {inner}"))),
                    other => other,
                })
            }
            Formula::AllImp(vars, ant, cons) => {
                if self.ev.domain.is_empty() {
                    // Universally guarded clauses hold vacuously over M = {}.
                    return Ok(Verdict::Holds);
                }
                self.check_impl(e, vars, ant, cons, path, bound_vals)
            }
        }
    }

    fn check_impl(
        &self,
        e: &Nat,
        vars: &[VarName],
        ant: &Formula,
        cons: &Formula,
        path: &mut Vec<PathStep>,
        bound_vals: &mut Vec<Nat>,
    ) -> Result<Verdict, SemanticsError> {
        let n = vars.len();
        if !in_index_set(e, n + 1) {
            return Ok(Verdict::Fails(FailTrace::leaf(format!(
                "{e} is not an index of arity {}",
                n + 1
            ))));
        }
        let xs = VarList::new(vars.to_vec()).map_err(|e| match e {
            crate::syntax::SyntaxError::DuplicateVar(v) => SemanticsError::DuplicateBinder(v),
            _ => SemanticsError::InadmissibleList,
        })?;
        let domain: Vec<Nat> = self.ev.domain.iter().cloned().collect();
        let mut saw_bounded = false;
        let mut tuple = vec![Nat::zero(); n];
        let mut unknown_bound = 0u64;

        // Lexicographic sweep over domain tuples.
        let mut counters = vec![0usize; n];
        loop {
            for (i, &c) in counters.iter().enumerate() {
                tuple[i] = domain[c].clone();
            }
            let terms: Vec<LTerm> = tuple.iter().cloned().map(LTerm::Num).collect();
            let ant_inst = substitute(ant, &xs, &terms).map_err(|_| {
                SemanticsError::DuplicateBinder(vars[0].clone())
            })?;
            let cons_inst = substitute(cons, &xs, &terms)
                .map_err(|_| SemanticsError::DuplicateBinder(vars[0].clone()))?;

            let (candidates, coverage) =
                self.antecedent_candidates(&ant_inst, path, bound_vals, &tuple)?;
            if coverage == Coverage::Bounded {
                saw_bounded = true;
                if let AntecedentMode::Bounded(b) = self.mode {
                    unknown_bound = b;
                }
            }

            for s in candidates {
                let mut args = tuple.clone();
                args.push(s.clone());
                let outcome = eval(e, &args, self.fuel);
                let v = match outcome.value() {
                    Some(v) => v.clone(),
                    None => {
                        return Ok(Verdict::Fails(FailTrace {
                            frames: vec![format!(
                                "obligation at values ({}) with antecedent realizer {s}: \
                                 eval is undefined",
                                join_nats(&tuple)
                            )],
                            witness: Some(ImplWitness {
                                code: e.clone(),
                                args,
                                outcome,
                            }),
                        }));
                    }
                };
                path.push(PathStep::Cons);
                bound_vals.extend(tuple.iter().cloned());
                let sub = self.check(&v, &cons_inst, path, bound_vals)?;
                bound_vals.truncate(bound_vals.len() - n);
                path.pop();
                match sub {
                    Verdict::Holds => {}
                    Verdict::Unknown(k) => {
                        saw_bounded = true;
                        unknown_bound = unknown_bound.max(k);
                    }
                    Verdict::Fails(tr) => {
                        let mut tr = tr.framed(format!(
                            "obligation at values ({}) with antecedent realizer {s}: \
                             eval yields {v}, which fails the consequent",
                            join_nats(&tuple)
                        ));
                        if tr.witness.is_none() {
                            tr.witness = Some(ImplWitness {
                                code: e.clone(),
                                args,
                                outcome,
                            });
                        }
                        return Ok(Verdict::Fails(tr));
                    }
                }
            }

            // Advance the tuple counter; n == 0 has exactly one tuple.
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                counters[i - 1] += 1;
                if counters[i - 1] < domain.len() {
                    break;
                }
                counters[i - 1] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
        }

        if saw_bounded {
            Ok(Verdict::Unknown(unknown_bound))
        } else {
            Ok(Verdict::Holds)
        }
    }

    /// The antecedent realizer candidates for one closed antecedent instance,
    /// in ascending order, plus whether the sweep is exact.
    fn antecedent_candidates(
        &self,
        ant_inst: &Formula,
        path: &mut Vec<PathStep>,
        bound_vals: &mut Vec<Nat>,
        tuple: &[Nat],
    ) -> Result<(Vec<Nat>, Coverage), SemanticsError> {
        if exactly_enumerable(ant_inst) {
            let set = real_set(ant_inst, self.ev)?;
            return Ok((set.into_iter().collect(), Coverage::Exact));
        }
        match self.mode {
            AntecedentMode::Bounded(bound) => {
                let mut kept = Vec::new();
                let mut s = Nat::zero();
                while s <= Nat::from(bound) {
                    path.push(PathStep::Ant);
                    let v = self.check(&s, ant_inst, path, bound_vals)?;
                    path.pop();
                    if !v.fails() {
                        kept.push(s.clone());
                    }
                    s += 1u32;
                }
                Ok((kept, Coverage::Bounded))
            }
            AntecedentMode::Witnessed(map) => {
                let mut key_vals = bound_vals.clone();
                key_vals.extend(tuple.iter().cloned());
                let key = (FormulaPath(path.clone()), key_vals);
                let Some(set) = map.get(&key) else {
                    return Err(SemanticsError::MissingWitness {
                        path: key.0,
                        values: join_nats(&key.1),
                    });
                };
                let mut kept = Vec::new();
                for s in set {
                    path.push(PathStep::Ant);
                    let v = self.check(s, ant_inst, path, bound_vals)?;
                    path.pop();
                    if !v.fails() {
                        kept.push(s.clone());
                    }
                }
                // Supplied witnesses are all that is claimed; the sweep
                // counts as covering them exactly.
                Ok((kept, Coverage::Exact))
            }
        }
    }
}

fn join_nats(ns: &[Nat]) -> String {
    ns.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Decides whether `e` realizes the closed formula over the evaluation.
/// Antecedent positions without exactly enumerable realizer sets are swept
/// up to `bound`.
pub fn check(
    e: &Nat,
    formula: &Formula,
    ev: &Evaluation,
    bound: u64,
    fuel: u64,
) -> Result<Verdict, SemanticsError> {
    require_closed(formula)?;
    require_constants_in_domain(formula, ev)?;
    let checker = Checker {
        ev,
        fuel,
        mode: AntecedentMode::Bounded(bound),
    };
    checker.check(e, formula, &mut Vec::new(), &mut Vec::new())
}

/// Realizability of a sequent over an admissible list: `e` must realize
/// `all rs (lhs -> rhs)`.
pub fn check_sequent(
    e: &Nat,
    sequent: &Sequent,
    rs: &VarList,
    ev: &Evaluation,
    bound: u64,
    fuel: u64,
) -> Result<Verdict, SemanticsError> {
    let formula = sequent_formula(sequent, rs)?;
    check(e, &formula, ev, bound, fuel)
}

/// Like [`check_sequent`], but antecedent positions that are not exactly
/// enumerable draw candidates from the supplied witness sets (each candidate
/// is first verified not to Fail its antecedent). `Holds` means "realizes
/// against all supplied witnesses"; a missing entry is an error.
pub fn check_with_witnesses(
    e: &Nat,
    sequent: &Sequent,
    rs: &VarList,
    ev: &Evaluation,
    witnesses: &WitnessMap,
    fuel: u64,
) -> Result<Verdict, SemanticsError> {
    let formula = sequent_formula(sequent, rs)?;
    check_formula_with_witnesses(e, &formula, ev, witnesses, fuel)
}

/// Witness-mode check of a closed formula; paths in the witness map are
/// relative to this formula.
pub fn check_formula_with_witnesses(
    e: &Nat,
    formula: &Formula,
    ev: &Evaluation,
    witnesses: &WitnessMap,
    fuel: u64,
) -> Result<Verdict, SemanticsError> {
    require_closed(formula)?;
    require_constants_in_domain(formula, ev)?;
    let checker = Checker {
        ev,
        fuel,
        mode: AntecedentMode::Witnessed(witnesses),
    };
    checker.check(e, formula, &mut Vec::new(), &mut Vec::new())
}

/// The universally guarded implication a sequent denotes over a list.
pub fn sequent_formula(sequent: &Sequent, rs: &VarList) -> Result<Formula, SemanticsError> {
    if !rs.is_admissible_for(sequent) {
        return Err(SemanticsError::InadmissibleList);
    }
    Ok(Formula::all_imp(
        rs.vars().to_vec(),
        sequent.lhs.clone(),
        sequent.rhs.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nat;
    use crate::numbering::{build_compose, build_const, build_proj, pair};
    use crate::syntax::{parse_formula, parse_signature, parse_sequent, Signature};

    const FUEL: u64 = 1_000_000;

    fn sig() -> Signature {
        parse_signature("P/1, Q/1, R/0, S/0").unwrap()
    }

    fn fml(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn ev(domain: &[u64]) -> Evaluation {
        Evaluation::new(domain.iter().map(|&d| nat(d)).collect())
    }

    fn table(ev: &mut Evaluation, pred: &str, rows: &[(&[u64], &[u64])]) {
        let mut t = PredTable::new();
        for (args, rs) in rows {
            t.insert(
                args.iter().map(|&a| nat(a)).collect(),
                rs.iter().map(|&r| nat(r)).collect(),
            );
        }
        ev.preds.insert(PredName::from(pred), t);
    }

    #[test]
    fn real_set_bot_is_empty() {
        let f = ev(&[0]);
        assert!(real_set(&Formula::Bot, &f).unwrap().is_empty());
    }

    #[test]
    fn real_set_exists_example() {
        let mut f = ev(&[1, 2]);
        table(&mut f, "P", &[(&[1], &[3]), (&[2], &[])]);
        let got = real_set(&fml("ex x P(x)"), &f).unwrap();
        assert_eq!(got, BTreeSet::from([pair(&nat(1), &nat(3))]));
    }

    #[test]
    fn real_set_conjunction_product() {
        let mut f = ev(&[1]);
        table(&mut f, "P", &[(&[1], &[3, 4])]);
        let got = real_set(&fml("P(1) & P(1)"), &f).unwrap();
        assert_eq!(got.len(), 4);
        for a in [3u64, 4] {
            for b in [3u64, 4] {
                assert!(got.contains(&pair(&nat(a), &nat(b))));
            }
        }
    }

    #[test]
    fn real_set_rejects_top_rank_and_free_vars() {
        let f = ev(&[0]);
        assert_eq!(real_set(&Formula::Top, &f), Err(SemanticsError::ContainsTop));
        assert_eq!(
            real_set(&fml("(R -> S)"), &f),
            Err(SemanticsError::RankPositive)
        );
        assert!(matches!(
            real_set(&fml("P(x)"), &f),
            Err(SemanticsError::FreeVariable(_))
        ));
    }

    #[test]
    fn check_top_and_or_delegation() {
        let f = ev(&[0]);
        assert!(check(&nat(12345), &Formula::Top, &f, 8, FUEL).unwrap().holds());
        let mut f = ev(&[0]);
        table(&mut f, "P", &[(&[0], &[7])]);
        // pair(0, 7) realizes P(0) | bot; pair(1, 7) does not.
        let left = pair(&nat(0), &nat(7));
        let right = pair(&nat(1), &nat(7));
        assert!(check(&left, &fml("P(0) | bot"), &f, 8, FUEL).unwrap().holds());
        assert!(check(&right, &fml("P(0) | bot"), &f, 8, FUEL).unwrap().fails());
        // A tag other than 0/1 fails.
        let bad = pair(&nat(2), &nat(7));
        assert!(check(&bad, &fml("P(0) | P(0)"), &f, 8, FUEL).unwrap().fails());
    }

    #[test]
    fn check_implication_exact_example() {
        // M = {1}, P(1) = {5}, Q(1) = {9}: the constant-9 code realizes
        // all x (P(x) -> Q(x)); the constant-8 variant fails with a witness.
        let mut f = ev(&[1]);
        table(&mut f, "P", &[(&[1], &[5])]);
        table(&mut f, "Q", &[(&[1], &[9])]);
        let const9 = build_compose(build_const(&nat(9)).code(), &[], &[]).unwrap();
        let v = check(&const9.code().clone(), &fml("all x (P(x) -> Q(x))"), &f, 8, FUEL).unwrap();
        assert!(v.holds(), "got {v:?}");
        let const8 = build_const(&nat(8));
        let v = check(&const8.code().clone(), &fml("all x (P(x) -> Q(x))"), &f, 8, FUEL).unwrap();
        let Verdict::Fails(tr) = v else {
            panic!("expected fails, got {v:?}");
        };
        let w = tr.witness.expect("witness");
        assert_eq!(w.args, vec![nat(1), nat(5)]);
        assert_eq!(w.outcome, EvalOutcome::Value(nat(8)));
        // Replay: eval on the stored witness reproduces the outcome.
        assert_eq!(eval(&w.code, &w.args, FUEL), w.outcome);
    }

    #[test]
    fn check_sequent_identity_realizer() {
        let mut f = ev(&[0, 1]);
        table(&mut f, "P", &[(&[0], &[2]), (&[1], &[])]);
        let rs = VarList::new(vec![VarName::from("x")]).unwrap();
        let s = parse_sequent("P(x) => P(x)", &sig()).unwrap();
        let e = build_proj(2, 2).unwrap();
        assert!(check_sequent(e.code(), &s, &rs, &f, 8, FUEL).unwrap().holds());
    }

    #[test]
    fn check_sequent_bot_consequent_fails() {
        let mut f = ev(&[0]);
        table(&mut f, "P", &[(&[0], &[2])]);
        let rs = VarList::new(vec![VarName::from("x")]).unwrap();
        let s = parse_sequent("P(x) => bot", &sig()).unwrap();
        let e = build_const(&nat(0));
        assert!(check_sequent(e.code(), &s, &rs, &f, 8, FUEL).unwrap().fails());
    }

    #[test]
    fn vacuity_over_empty_domain() {
        let f = ev(&[]);
        let imp = fml("all x (P(x) -> Q(x))");
        assert!(check(&nat(999_999), &imp, &f, 8, FUEL).unwrap().holds());
        let s = parse_sequent("R => S", &sig()).unwrap();
        assert!(check_sequent(&nat(7), &s, &VarList::empty(), &f, 8, FUEL)
            .unwrap()
            .holds());
        assert!(check(&nat(0), &fml("R"), &f, 8, FUEL).unwrap().fails());
        assert!(check(&nat(0), &fml("ex x P(x)"), &f, 8, FUEL).unwrap().fails());
    }

    #[test]
    fn constant_outside_domain_is_an_error() {
        let f = ev(&[0, 1]);
        assert!(matches!(
            check(&nat(0), &fml("P(7)"), &f, 8, FUEL),
            Err(SemanticsError::ConstantOutsideDomain(_))
        ));
    }

    #[test]
    fn agreement_with_real_set_on_rank0() {
        // For rank-0 closed formulas, check agrees with real_set membership.
        let mut f = ev(&[0, 1]);
        table(&mut f, "P", &[(&[0], &[1, 3]), (&[1], &[0])]);
        table(&mut f, "Q", &[(&[0], &[]), (&[1], &[2])]);
        for text in ["P(0) & Q(1)", "P(0) | Q(0)", "ex x P(x)", "ex x (P(x) & Q(x))"] {
            let formula = fml(text);
            let set = real_set(&formula, &f).unwrap();
            let max = set.iter().max().cloned().unwrap_or_else(|| nat(0));
            let limit = max + nat(12);
            let mut e = nat(0);
            while e <= limit {
                let v = check(&e, &formula, &f, 8, FUEL).unwrap();
                assert_eq!(
                    v.holds(),
                    set.contains(&e),
                    "mismatch at {e} for {text}"
                );
                assert!(!matches!(v, Verdict::Unknown(_)));
                e += 1u32;
            }
        }
    }

    #[test]
    fn bounded_sweep_reports_unknown() {
        // top => R over an evaluation where R holds for everything produced:
        // the antecedent top is not exactly enumerable, so the verdict is
        // Unknown even though every checked obligation holds.
        let mut f = ev(&[0]);
        table(&mut f, "R", &[(&[], &[5])]);
        let s = parse_sequent("top => R", &sig()).unwrap();
        let e = build_const(&nat(5));
        let v = check_sequent(e.code(), &s, &VarList::empty(), &f, 8, FUEL).unwrap();
        assert_eq!(v, Verdict::Unknown(8));
    }

    #[test]
    fn witness_mode_examples() {
        // (R -> S) => S: the root antecedent is an implication, so its
        // candidates come from the witness map.
        let mut f = ev(&[0]);
        table(&mut f, "R", &[(&[], &[2])]);
        table(&mut f, "S", &[(&[], &[6])]);
        let s = parse_sequent("(R -> S) => S", &sig()).unwrap();
        // const-6 genuinely realizes (R -> S) here.
        let witness = build_const(&nat(6));
        let mut w: WitnessMap = BTreeMap::new();
        w.insert(
            (FormulaPath::default(), vec![]),
            BTreeSet::from([witness.code().clone()]),
        );
        let e = build_const(&nat(6));
        let v = check_with_witnesses(e.code(), &s, &VarList::empty(), &f, &w, FUEL).unwrap();
        assert!(v.holds(), "got {v:?}");
        // Wrong output: Fails with a trace.
        let bad = build_const(&nat(7));
        let v = check_with_witnesses(bad.code(), &s, &VarList::empty(), &f, &w, FUEL).unwrap();
        assert!(v.fails());
        // Empty witness set: vacuously Holds.
        let mut w: WitnessMap = BTreeMap::new();
        w.insert((FormulaPath::default(), vec![]), BTreeSet::new());
        let v = check_with_witnesses(&nat(0), &s, &VarList::empty(), &f, &w, FUEL).unwrap();
        assert!(v.holds());
        // Missing entry is an error.
        let w: WitnessMap = BTreeMap::new();
        assert!(matches!(
            check_with_witnesses(e.code(), &s, &VarList::empty(), &f, &w, FUEL),
            Err(SemanticsError::MissingWitness { .. })
        ));
    }

    #[test]
    fn bound_monotonicity_on_samples() {
        let mut f = ev(&[0]);
        table(&mut f, "R", &[(&[], &[5])]);
        table(&mut f, "S", &[(&[], &[3])]);
        let s = parse_sequent("(R -> S) => (R -> S)", &sig()).unwrap();
        let id = build_proj(1, 1).unwrap();
        let mut last: Option<Verdict> = None;
        for bound in [2u64, 8, 32] {
            let v = check_sequent(id.code(), &s, &VarList::empty(), &f, bound, FUEL).unwrap();
            match (&last, &v) {
                (Some(Verdict::Holds), x) => assert!(x.holds()),
                (Some(Verdict::Fails(_)), x) => assert!(x.fails()),
                _ => {}
            }
            last = Some(v);
        }
    }
}
