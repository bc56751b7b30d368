//! Representation and checking of derivations.
//!
//! A derivation node carries its conclusion plus a justification: an axiom
//! tag or a rule tag with premises, together with explicit instantiation data
//! (the schema's formula metavariables `A`, `B`, `C`, the variable lists
//! `xs`/`ys`, and the quantified variable `x` where applicable). Checking
//! instantiates the schema with the supplied data and compares against the
//! stated conclusions modulo alpha-equivalence, then verifies every side
//! condition.
//!
//! R6 is printed in the source calculus with an arrow in the conclusion; this
//! checker reads it as the sequent `[ys/xs]A => [ys/xs]B`, consistent with
//! every other rule.

use crate::syntax::{
    alpha_eq_sequent, substitute, Formula, LTerm, Sequent, SyntaxError, VarList, VarName,
};
use std::fmt;

/// Axiom schemas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomTag {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    A11,
}

/// Rule schemas; the two projections of R3 and R5 are separate tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    R1,
    R2,
    R3a,
    R3b,
    R4,
    R5a,
    R5b,
    R6,
    R7,
    R8,
    R9,
}

impl RuleTag {
    /// Number of premises the rule takes.
    pub fn premise_count(&self) -> usize {
        match self {
            RuleTag::R1 | RuleTag::R2 | RuleTag::R4 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for AxiomTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// Axiom or rule tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    Axiom(AxiomTag),
    Rule(RuleTag),
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Axiom(t) => write!(f, "{t}"),
            Tag::Rule(t) => write!(f, "{t}"),
        }
    }
}

/// Parses "A1".."A11" / "R1".."R9" with the a/b variants.
pub fn parse_tag(s: &str) -> Option<Tag> {
    let axiom = |t| Some(Tag::Axiom(t));
    let rule = |t| Some(Tag::Rule(t));
    match s {
        "A1" => axiom(AxiomTag::A1),
        "A2" => axiom(AxiomTag::A2),
        "A3" => axiom(AxiomTag::A3),
        "A4" => axiom(AxiomTag::A4),
        "A5" => axiom(AxiomTag::A5),
        "A6" => axiom(AxiomTag::A6),
        "A7" => axiom(AxiomTag::A7),
        "A8" => axiom(AxiomTag::A8),
        "A9" => axiom(AxiomTag::A9),
        "A10" => axiom(AxiomTag::A10),
        "A11" => axiom(AxiomTag::A11),
        "R1" => rule(RuleTag::R1),
        "R2" => rule(RuleTag::R2),
        "R3a" => rule(RuleTag::R3a),
        "R3b" => rule(RuleTag::R3b),
        "R4" => rule(RuleTag::R4),
        "R5a" => rule(RuleTag::R5a),
        "R5b" => rule(RuleTag::R5b),
        "R6" => rule(RuleTag::R6),
        "R7" => rule(RuleTag::R7),
        "R8" => rule(RuleTag::R8),
        "R9" => rule(RuleTag::R9),
        _ => None,
    }
}

/// Explicit instantiation data for a schema. Only the fields the tag needs
/// are consulted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstData {
    pub formula_a: Option<Formula>,
    pub formula_b: Option<Formula>,
    pub formula_c: Option<Formula>,
    pub vars_x: Option<Vec<VarName>>,
    pub vars_y: Option<Vec<VarName>>,
    pub var: Option<VarName>,
}

/// Justification of a derivation node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomTag, InstData),
    Rule(RuleTag, InstData, Vec<Derivation>),
}

/// Tree of axiom instances and rule applications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Sequent,
    pub justification: Justification,
}

impl Derivation {
    pub fn axiom(tag: AxiomTag, data: InstData, conclusion: Sequent) -> Derivation {
        Derivation {
            conclusion,
            justification: Justification::Axiom(tag, data),
        }
    }

    pub fn rule(
        tag: RuleTag,
        data: InstData,
        premises: Vec<Derivation>,
        conclusion: Sequent,
    ) -> Derivation {
        Derivation {
            conclusion,
            justification: Justification::Rule(tag, data, premises),
        }
    }

    pub fn node_count(&self) -> usize {
        match &self.justification {
            Justification::Axiom(..) => 1,
            Justification::Rule(_, _, premises) => {
                1 + premises.iter().map(|p| p.node_count()).sum::<usize>()
            }
        }
    }
}

/// Path into a derivation tree: premise indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreePath(pub Vec<usize>);

impl fmt::Display for TreePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        for (i, ix) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{ix}")?;
        }
        Ok(())
    }
}

/// One rejected obligation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: TreePath,
    pub reason: String,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.path, self.reason)
    }
}

/// Outcome of checking; ok iff no failures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            for (i, failure) in self.failures.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{failure}")?;
            }
            Ok(())
        }
    }
}

struct Obligations {
    reasons: Vec<String>,
}

impl Obligations {
    fn new() -> Obligations {
        Obligations {
            reasons: Vec::new(),
        }
    }

    fn fail(&mut self, reason: impl Into<String>) {
        self.reasons.push(reason.into());
    }

    fn formula<'d>(&mut self, field: &str, slot: &'d Option<Formula>) -> Option<&'d Formula> {
        if slot.is_none() {
            self.fail(format!("missing instantiation formula {field}"));
        }
        slot.as_ref()
    }

    fn var_list(&mut self, field: &str, slot: &Option<Vec<VarName>>) -> Option<VarList> {
        let Some(vars) = slot else {
            self.fail(format!("missing instantiation list {field}"));
            return None;
        };
        match VarList::new(vars.clone()) {
            Ok(l) => Some(l),
            Err(SyntaxError::DuplicateVar(v)) => {
                self.fail(format!("list {field} repeats variable {v}"));
                None
            }
            Err(e) => {
                self.fail(e.to_string());
                None
            }
        }
    }

    fn var<'d>(&mut self, field: &str, slot: &'d Option<VarName>) -> Option<&'d VarName> {
        if slot.is_none() {
            self.fail(format!("missing instantiation variable {field}"));
        }
        slot.as_ref()
    }

    fn not_free_in(&mut self, x: &VarName, f: &Formula, desc: &str) {
        if f.free_vars().contains(x) {
            self.fail(format!("{x} is free in {desc}"));
        }
    }

    fn conclusion_matches(&mut self, tag: &str, expected: &Sequent, given: &Sequent) {
        if !alpha_eq_sequent(expected, given) {
            self.fail(format!(
                "conclusion does not match the {tag} schema: expected {expected}"
            ));
        }
    }

    fn premise_matches(&mut self, tag: &str, i: usize, expected: &Sequent, given: &Sequent) {
        if !alpha_eq_sequent(expected, given) {
            self.fail(format!(
                "premise {i} does not match the {tag} schema: expected {expected}"
            ));
        }
    }
}

fn subst_formula(obl: &mut Obligations, f: &Formula, xs: &VarList, ys: &[VarName]) -> Formula {
    let terms: Vec<LTerm> = ys.iter().cloned().map(LTerm::Var).collect();
    match substitute(f, xs, &terms) {
        Ok(g) => g,
        Err(e) => {
            obl.fail(e.to_string());
            f.clone()
        }
    }
}

/// Checks one axiom instance: schema match modulo alpha plus side conditions.
pub fn check_axiom(tag: AxiomTag, data: &InstData, conclusion: &Sequent) -> CheckReport {
    let mut obl = Obligations::new();
    check_axiom_inner(tag, data, conclusion, &mut obl);
    CheckReport {
        failures: obl
            .reasons
            .into_iter()
            .map(|reason| CheckFailure {
                path: TreePath::default(),
                reason,
            })
            .collect(),
    }
}

fn check_axiom_inner(tag: AxiomTag, data: &InstData, conclusion: &Sequent, obl: &mut Obligations) {
    match tag {
        AxiomTag::A1 => {
            if let Some(a) = obl.formula("A", &data.formula_a) {
                let expected = Sequent::new(a.clone(), a.clone());
                obl.conclusion_matches("A1", &expected, conclusion);
            }
        }
        AxiomTag::A2 => {
            if let Some(a) = obl.formula("A", &data.formula_a) {
                let expected = Sequent::new(a.clone(), Formula::Top);
                obl.conclusion_matches("A2", &expected, conclusion);
            }
        }
        AxiomTag::A3 => {
            if let Some(a) = obl.formula("A", &data.formula_a) {
                let expected = Sequent::new(Formula::Bot, a.clone());
                obl.conclusion_matches("A3", &expected, conclusion);
            }
        }
        AxiomTag::A4 => {
            let (Some(a), Some(b), Some(x)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var("x", &data.var).cloned(),
            ) else {
                return;
            };
            obl.not_free_in(&x, &a, "A");
            let expected = Sequent::new(
                Formula::and(a.clone(), Formula::exists(x.clone(), b.clone())),
                Formula::exists(x.clone(), Formula::and(a, b)),
            );
            obl.conclusion_matches("A4", &expected, conclusion);
        }
        AxiomTag::A5 => {
            let (Some(a), Some(b), Some(c)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
            ) else {
                return;
            };
            let expected = Sequent::new(
                Formula::and(a.clone(), Formula::or(b.clone(), c.clone())),
                Formula::or(Formula::and(a.clone(), b), Formula::and(a, c)),
            );
            obl.conclusion_matches("A5", &expected, conclusion);
        }
        AxiomTag::A6 | AxiomTag::A7 | AxiomTag::A8 => {
            let (Some(a), Some(b), Some(c), Some(xs)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
                obl.var_list("xs", &data.vars_x),
            ) else {
                return;
            };
            let vars = xs.vars().to_vec();
            let imp = |ant: Formula, cons: Formula| Formula::all_imp(vars.clone(), ant, cons);
            let (name, expected) = match tag {
                AxiomTag::A6 => (
                    "A6",
                    Sequent::new(
                        Formula::and(imp(a.clone(), b.clone()), imp(b.clone(), c.clone())),
                        imp(a, c),
                    ),
                ),
                AxiomTag::A7 => (
                    "A7",
                    Sequent::new(
                        Formula::and(imp(a.clone(), b.clone()), imp(a.clone(), c.clone())),
                        imp(a, Formula::and(b, c)),
                    ),
                ),
                _ => (
                    "A8",
                    Sequent::new(
                        Formula::and(imp(b.clone(), a.clone()), imp(c.clone(), a.clone())),
                        imp(Formula::or(b, c), a),
                    ),
                ),
            };
            obl.conclusion_matches(name, &expected, conclusion);
        }
        AxiomTag::A9 => {
            let (Some(a), Some(b), Some(xs), Some(ys)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var_list("xs", &data.vars_x),
                obl.var_list("ys", &data.vars_y),
            ) else {
                return;
            };
            if xs.len() != ys.len() {
                obl.fail("lists xs and ys must have equal length");
                return;
            }
            let sub_a = subst_formula(obl, &a, &xs, ys.vars());
            let sub_b = subst_formula(obl, &b, &xs, ys.vars());
            let vars = xs.vars().to_vec();
            let expected = Sequent::new(
                Formula::all_imp(vars.clone(), a, b),
                Formula::all_imp(vars, sub_a, sub_b),
            );
            obl.conclusion_matches("A9", &expected, conclusion);
        }
        AxiomTag::A10 => {
            let (Some(a), Some(b), Some(xs), Some(ys)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var_list("xs", &data.vars_x),
                obl.var_list("ys", &data.vars_y),
            ) else {
                return;
            };
            if xs.len() != ys.len() {
                obl.fail("lists xs and ys must have equal length");
                return;
            }
            let lhs = Formula::all_imp(xs.vars().to_vec(), a.clone(), b.clone());
            for y in ys.vars() {
                obl.not_free_in(y, &lhs, "the quantified premise formula");
            }
            let expected = Sequent::new(lhs, Formula::all_imp(ys.vars().to_vec(), a, b));
            obl.conclusion_matches("A10", &expected, conclusion);
        }
        AxiomTag::A11 => {
            let (Some(a), Some(b), Some(xs), Some(x)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var_list("xs", &data.vars_x),
                obl.var("x", &data.var).cloned(),
            ) else {
                return;
            };
            if xs.contains(&x) {
                obl.fail(format!("{x} repeats a variable of xs"));
                return;
            }
            obl.not_free_in(&x, &a, "A");
            let mut lhs_vars = xs.vars().to_vec();
            lhs_vars.push(x.clone());
            let expected = Sequent::new(
                Formula::all_imp(lhs_vars, b.clone(), a.clone()),
                Formula::all_imp(xs.vars().to_vec(), Formula::exists(x, b), a),
            );
            obl.conclusion_matches("A11", &expected, conclusion);
        }
    }
}

/// Checks one rule application: premises and conclusion against the schema,
/// plus side conditions.
pub fn check_rule(
    tag: RuleTag,
    data: &InstData,
    premises: &[&Sequent],
    conclusion: &Sequent,
) -> CheckReport {
    let mut obl = Obligations::new();
    if premises.len() != tag.premise_count() {
        obl.fail(format!(
            "{tag} takes {} premise(s), got {}",
            tag.premise_count(),
            premises.len()
        ));
    } else {
        check_rule_inner(tag, data, premises, conclusion, &mut obl);
    }
    CheckReport {
        failures: obl
            .reasons
            .into_iter()
            .map(|reason| CheckFailure {
                path: TreePath::default(),
                reason,
            })
            .collect(),
    }
}

fn check_rule_inner(
    tag: RuleTag,
    data: &InstData,
    premises: &[&Sequent],
    conclusion: &Sequent,
    obl: &mut Obligations,
) {
    match tag {
        RuleTag::R1 | RuleTag::R2 | RuleTag::R4 => {
            let (Some(a), Some(b), Some(c)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
            ) else {
                return;
            };
            let (name, p1, p2, expected) = match tag {
                RuleTag::R1 => (
                    "R1",
                    Sequent::new(a.clone(), b.clone()),
                    Sequent::new(b, c.clone()),
                    Sequent::new(a, c),
                ),
                RuleTag::R2 => (
                    "R2",
                    Sequent::new(a.clone(), b.clone()),
                    Sequent::new(a.clone(), c.clone()),
                    Sequent::new(a, Formula::and(b, c)),
                ),
                _ => (
                    "R4",
                    Sequent::new(b.clone(), a.clone()),
                    Sequent::new(c.clone(), a.clone()),
                    Sequent::new(Formula::or(b, c), a),
                ),
            };
            obl.premise_matches(name, 0, &p1, premises[0]);
            obl.premise_matches(name, 1, &p2, premises[1]);
            obl.conclusion_matches(name, &expected, conclusion);
        }
        RuleTag::R3a | RuleTag::R3b => {
            let (Some(a), Some(b), Some(c)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
            ) else {
                return;
            };
            let premise = Sequent::new(a.clone(), Formula::and(b.clone(), c.clone()));
            let (name, expected) = if tag == RuleTag::R3a {
                ("R3a", Sequent::new(a, b))
            } else {
                ("R3b", Sequent::new(a, c))
            };
            obl.premise_matches(name, 0, &premise, premises[0]);
            obl.conclusion_matches(name, &expected, conclusion);
        }
        RuleTag::R5a | RuleTag::R5b => {
            let (Some(a), Some(b), Some(c)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
            ) else {
                return;
            };
            let premise = Sequent::new(Formula::or(b.clone(), c.clone()), a.clone());
            let (name, expected) = if tag == RuleTag::R5a {
                ("R5a", Sequent::new(b, a))
            } else {
                ("R5b", Sequent::new(c, a))
            };
            obl.premise_matches(name, 0, &premise, premises[0]);
            obl.conclusion_matches(name, &expected, conclusion);
        }
        RuleTag::R6 => {
            let (Some(a), Some(b), Some(xs), Some(ys)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var_list("xs", &data.vars_x),
                obl.var_list("ys", &data.vars_y),
            ) else {
                return;
            };
            if xs.len() != ys.len() {
                obl.fail("lists xs and ys must have equal length");
                return;
            }
            let premise = Sequent::new(a.clone(), b.clone());
            let expected = Sequent::new(
                subst_formula(obl, &a, &xs, ys.vars()),
                subst_formula(obl, &b, &xs, ys.vars()),
            );
            obl.premise_matches("R6", 0, &premise, premises[0]);
            obl.conclusion_matches("R6", &expected, conclusion);
        }
        RuleTag::R7 => {
            let (Some(a), Some(b), Some(x)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var("x", &data.var).cloned(),
            ) else {
                return;
            };
            obl.not_free_in(&x, &a, "A");
            let premise = Sequent::new(b.clone(), a.clone());
            let expected = Sequent::new(Formula::exists(x, b), a);
            obl.premise_matches("R7", 0, &premise, premises[0]);
            obl.conclusion_matches("R7", &expected, conclusion);
        }
        RuleTag::R8 => {
            let (Some(a), Some(b), Some(x)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.var("x", &data.var).cloned(),
            ) else {
                return;
            };
            obl.not_free_in(&x, &a, "A");
            let premise = Sequent::new(Formula::exists(x, b.clone()), a.clone());
            let expected = Sequent::new(b, a);
            obl.premise_matches("R8", 0, &premise, premises[0]);
            obl.conclusion_matches("R8", &expected, conclusion);
        }
        RuleTag::R9 => {
            let (Some(a), Some(b), Some(c), Some(xs)) = (
                obl.formula("A", &data.formula_a).cloned(),
                obl.formula("B", &data.formula_b).cloned(),
                obl.formula("C", &data.formula_c).cloned(),
                obl.var_list("xs", &data.vars_x),
            ) else {
                return;
            };
            for x in xs.vars() {
                obl.not_free_in(x, &a, "A");
            }
            let premise = Sequent::new(Formula::and(a.clone(), b.clone()), c.clone());
            let expected = Sequent::new(a, Formula::all_imp(xs.vars().to_vec(), b, c));
            obl.premise_matches("R9", 0, &premise, premises[0]);
            obl.conclusion_matches("R9", &expected, conclusion);
        }
    }
}

/// Depth-first check of the whole tree; failures carry tree paths.
pub fn check_derivation(d: &Derivation) -> CheckReport {
    let mut failures = Vec::new();
    check_node(d, &mut Vec::new(), &mut failures);
    CheckReport { failures }
}

fn check_node(d: &Derivation, path: &mut Vec<usize>, failures: &mut Vec<CheckFailure>) {
    let report = match &d.justification {
        Justification::Axiom(tag, data) => check_axiom(*tag, data, &d.conclusion),
        Justification::Rule(tag, data, premises) => {
            for (i, p) in premises.iter().enumerate() {
                path.push(i);
                check_node(p, path, failures);
                path.pop();
            }
            let concls: Vec<&Sequent> = premises.iter().map(|p| &p.conclusion).collect();
            check_rule(*tag, data, &concls, &d.conclusion)
        }
    };
    failures.extend(report.failures.into_iter().map(|f| CheckFailure {
        path: TreePath(path.clone()),
        reason: f.reason,
    }));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent, parse_signature, Signature};

    fn sig() -> Signature {
        parse_signature("P/1, Q/1, Q2/2, R/1, S/0, T/0").unwrap()
    }

    fn fml(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    fn seq(s: &str) -> Sequent {
        parse_sequent(s, &sig()).unwrap()
    }

    fn v(s: &str) -> VarName {
        VarName::from(s)
    }

    #[test]
    fn a1_ok() {
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            ..Default::default()
        };
        assert!(check_axiom(AxiomTag::A1, &data, &seq("P(x) => P(x)")).ok());
        assert!(!check_axiom(AxiomTag::A1, &data, &seq("P(x) => P(y)")).ok());
    }

    #[test]
    fn a4_freshness_violation() {
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("Q(x)")),
            var: Some(v("x")),
            ..Default::default()
        };
        let report = check_axiom(
            AxiomTag::A4,
            &data,
            &seq("P(x) & ex x Q(x) => ex x (P(x) & Q(x))"),
        );
        assert!(!report.ok());
        assert!(report.failures.iter().any(|f| f.reason.contains("free in A")));
        // With a fresh variable the same shape is fine.
        let data = InstData {
            formula_a: Some(fml("P(y)")),
            formula_b: Some(fml("Q(x)")),
            var: Some(v("x")),
            ..Default::default()
        };
        assert!(check_axiom(
            AxiomTag::A4,
            &data,
            &seq("P(y) & ex x Q(x) => ex x (P(y) & Q(x))"),
        )
        .ok());
    }

    #[test]
    fn a6_schema_instantiation() {
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("Q(x)")),
            formula_c: Some(fml("R(x)")),
            vars_x: Some(vec![v("x")]),
            ..Default::default()
        };
        let ok = seq("all x (P(x) -> Q(x)) & all x (Q(x) -> R(x)) => all x (P(x) -> R(x))");
        assert!(check_axiom(AxiomTag::A6, &data, &ok).ok());
    }

    #[test]
    fn a9_alpha_matching() {
        // Conclusion bound variables may be renamed by the substitution.
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("ex y Q2(x,y)")),
            vars_x: Some(vec![v("x")]),
            vars_y: Some(vec![v("y")]),
            ..Default::default()
        };
        let concl = seq("all x (P(x) -> ex y Q2(x,y)) => all x (P(y) -> ex u Q2(y,u))");
        assert!(check_axiom(AxiomTag::A9, &data, &concl).ok());
    }

    #[test]
    fn a10_side_condition() {
        let data = InstData {
            formula_a: Some(fml("S")),
            formula_b: Some(fml("T")),
            vars_x: Some(vec![v("x")]),
            vars_y: Some(vec![v("y")]),
            ..Default::default()
        };
        assert!(check_axiom(
            AxiomTag::A10,
            &data,
            &seq("all x (S -> T) => all y (S -> T)"),
        )
        .ok());
        // y free in the premise formula is rejected.
        let data = InstData {
            formula_a: Some(fml("P(y)")),
            formula_b: Some(fml("T")),
            vars_x: Some(vec![v("x")]),
            vars_y: Some(vec![v("y")]),
            ..Default::default()
        };
        let report = check_axiom(
            AxiomTag::A10,
            &data,
            &seq("all x (P(y) -> T) => all y (P(y) -> T)"),
        );
        assert!(report.failures.iter().any(|f| f.reason.contains("free in")));
    }

    #[test]
    fn r2_ok() {
        let data = InstData {
            formula_a: Some(fml("S")),
            formula_b: Some(fml("T")),
            formula_c: Some(fml("S")),
            ..Default::default()
        };
        let p1 = seq("S => T");
        let p2 = seq("S => S");
        assert!(check_rule(RuleTag::R2, &data, &[&p1, &p2], &seq("S => T & S")).ok());
    }

    #[test]
    fn r9_freshness() {
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("Q2(x,y)")),
            formula_c: Some(fml("R(y)")),
            vars_x: Some(vec![v("y")]),
            ..Default::default()
        };
        let premise = seq("P(x) & Q2(x,y) => R(y)");
        let good = seq("P(x) => all y (Q2(x,y) -> R(y))");
        assert!(check_rule(RuleTag::R9, &data, &[&premise], &good).ok());

        // Binding x instead: x is free in A.
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("Q2(x,y)")),
            formula_c: Some(fml("R(y)")),
            vars_x: Some(vec![v("x")]),
            ..Default::default()
        };
        let bad = seq("P(x) => all x (Q2(x,y) -> R(y))");
        let report = check_rule(RuleTag::R9, &data, &[&premise], &bad);
        assert!(report.failures.iter().any(|f| f.reason.contains("free in A")));
    }

    #[test]
    fn r6_substitution_instance() {
        let data = InstData {
            formula_a: Some(fml("P(x)")),
            formula_b: Some(fml("Q(x)")),
            vars_x: Some(vec![v("x")]),
            vars_y: Some(vec![v("y")]),
            ..Default::default()
        };
        let premise = seq("P(x) => Q(x)");
        assert!(check_rule(RuleTag::R6, &data, &[&premise], &seq("P(y) => Q(y)")).ok());
    }

    #[test]
    fn derivation_tree_checks() {
        // Single A2 node.
        let d = Derivation::axiom(
            AxiomTag::A2,
            InstData {
                formula_a: Some(fml("P(x)")),
                ..Default::default()
            },
            seq("P(x) => top"),
        );
        assert!(check_derivation(&d).ok());

        // A1 followed by R3b.
        let a1 = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(fml("S & T")),
                ..Default::default()
            },
            seq("S & T => S & T"),
        );
        let d = Derivation::rule(
            RuleTag::R3b,
            InstData {
                formula_a: Some(fml("S & T")),
                formula_b: Some(fml("S")),
                formula_c: Some(fml("T")),
                ..Default::default()
            },
            vec![a1.clone()],
            seq("S & T => T"),
        );
        assert!(check_derivation(&d).ok());

        // R1 with swapped premises fails at the root.
        let ab = Derivation::axiom(
            AxiomTag::A2,
            InstData {
                formula_a: Some(fml("S")),
                ..Default::default()
            },
            seq("S => top"),
        );
        let bc = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(fml("top")),
                ..Default::default()
            },
            seq("top => top"),
        );
        let data = InstData {
            formula_a: Some(fml("S")),
            formula_b: Some(fml("top")),
            formula_c: Some(fml("top")),
            ..Default::default()
        };
        let good = Derivation::rule(
            RuleTag::R1,
            data.clone(),
            vec![ab.clone(), bc.clone()],
            seq("S => top"),
        );
        assert!(check_derivation(&good).ok());
        let swapped = Derivation::rule(RuleTag::R1, data, vec![bc, ab], seq("S => top"));
        let report = check_derivation(&swapped);
        assert!(!report.ok());
        assert!(report.failures.iter().all(|f| f.path.0.is_empty()));
    }

    #[test]
    fn failure_paths_are_accurate() {
        // Premise 0 of the root is a bad axiom instance.
        let bad_a1 = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(fml("S")),
                ..Default::default()
            },
            seq("S => T"),
        );
        let d = Derivation::rule(
            RuleTag::R3a,
            InstData {
                formula_a: Some(fml("S")),
                formula_b: Some(fml("T")),
                formula_c: Some(fml("S")),
                ..Default::default()
            },
            vec![bad_a1],
            seq("S => T"),
        );
        let report = check_derivation(&d);
        // The premise failure sits at path 0.
        assert!(report.failures.iter().any(|f| f.path.0 == vec![0]));
    }
}
