//! Realizer extraction: maps a checked derivation plus an admissible variable
//! list to an index realizing the sequent, by induction on the derivation.
//!
//! Axiom instances are realized directly over the requested list. Rule
//! applications realize their premises over a canonical intermediate list
//! (the sorted union of the free variables of every sequent in the rule
//! instance, minus the variables the case binds), build the conclusion's
//! realizer from the premise realizers, then reindex: first to the minimal
//! admissible list of the conclusion, then to the requested list. Funneling
//! through the minimal list makes extraction extensionally independent of
//! the requested list (extract-then-adapt agrees with extracting over the
//! other list outright).
//!
//! Where a substituted or bound variable has no position in the relevant
//! list (it occurs nowhere free, so its value is irrelevant), the
//! construction feeds it the same-indexed argument of its own block, which
//! is always a domain value.

use crate::calculus::{
    check_derivation, AxiomTag, CheckReport, Derivation, InstData, Justification, RuleTag,
};
use crate::numbering::{
    build_cond, build_const, build_perm, build_smn, encode, eval, BuildError, BuilderTag,
    EvalOutcome, Index, Nat, ProgTerm,
};
use crate::syntax::{Formula, Sequent, Signature, VarList, VarName};
use num_traits::Zero;
use std::collections::BTreeSet;

/// Target list and signature for an extraction run.
#[derive(Clone, Debug)]
pub struct ExtractionContext {
    pub target_list: VarList,
    pub signature: Signature,
}

/// A sequent together with a list and an index realizing it over that list.
#[derive(Clone, Debug)]
pub struct RealizedSequent {
    pub sequent: Sequent,
    pub list: VarList,
    pub index: Index,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("derivation does not check:\n{0}")]
    Check(CheckReport),
    #[error("list ({list}) is not admissible for {sequent}")]
    Inadmissible { list: VarList, sequent: Sequent },
    #[error("instantiation data is missing field {0}")]
    MissingData(&'static str),
    #[error("premise realizer {index} is not over the expected list ({expected})")]
    PremiseList { index: usize, expected: VarList },
    #[error("index construction failed: {0}")]
    Build(#[from] BuildError),
    #[error("atom {pred} has {got} argument(s), signature says {expected}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("conclusion is not of the form top => A with A closed")]
    NotASentence,
    #[error("applying the extracted index to 0 is undefined ({0})")]
    SentenceEval(EvalOutcome),
}

fn arg(i: usize) -> ProgTerm {
    ProgTerm::Arg(i)
}

fn arg_code(i: usize) -> Nat {
    encode(&arg(i)).into_code()
}

fn const_term(n: Nat) -> ProgTerm {
    ProgTerm::Const(n)
}

/// `pair(arg 1, arg 2)` as a code: the binary pairing function.
fn pair2_code() -> Nat {
    encode(&ProgTerm::Pair(Box::new(arg(1)), Box::new(arg(2)))).into_code()
}

fn fst1_code() -> Nat {
    encode(&ProgTerm::Fst(Box::new(arg(1)))).into_code()
}

fn snd1_code() -> Nat {
    encode(&ProgTerm::Snd(Box::new(arg(1)))).into_code()
}

/// Codes of the projections `I^1_n .. I^p_n` (the arity is implicit).
fn proj_codes(p: usize) -> Vec<Nat> {
    (1..=p).map(arg_code).collect()
}

/// Inlined composition of a known outer code with known inner codes.
fn compose_meta(outer: &Nat, inners: &[Nat], arity: usize) -> Result<Index, BuildError> {
    let ms = vec![arity; inners.len()];
    crate::numbering::build_compose(outer, inners, &ms)
}

/// Realizes one axiom instance over the admissible list `rs`. The instance
/// must already have passed the checker.
pub fn realize_axiom(
    tag: AxiomTag,
    data: &InstData,
    conclusion: &Sequent,
    rs: &VarList,
) -> Result<Index, ExtractError> {
    if !rs.is_admissible_for(conclusion) {
        return Err(ExtractError::Inadmissible {
            list: rs.clone(),
            sequent: conclusion.clone(),
        });
    }
    let l = rs.len();
    let d_arg = || arg(l + 1);
    match tag {
        // The realizer returns its last argument.
        AxiomTag::A1 | AxiomTag::A2 => Ok(encode(&arg(l + 1))),
        // No realizer of bot exists, so any index works; the constant 0 code
        // is the canonical pick (it lies in every index set).
        AxiomTag::A3 => Ok(build_const(&Nat::zero())),
        // c(p1 p2 d, c(p1 d, p2 p2 d))
        AxiomTag::A4 | AxiomTag::A5 => {
            let d = d_arg();
            let term = ProgTerm::Pair(
                Box::new(ProgTerm::Fst(Box::new(ProgTerm::Snd(Box::new(d.clone()))))),
                Box::new(ProgTerm::Pair(
                    Box::new(ProgTerm::Fst(Box::new(d.clone()))),
                    Box::new(ProgTerm::Snd(Box::new(ProgTerm::Snd(Box::new(d))))),
                )),
            );
            Ok(encode(&term))
        }
        AxiomTag::A6 => {
            let n = vars_x(data)?.len();
            // Sequential composition: feed the output of p1 d into p2 d,
            // keeping the quantified arguments.
            let mut args = Vec::with_capacity(n + 2);
            args.push(ProgTerm::Snd(Box::new(d_arg())));
            for code in proj_codes(n) {
                args.push(const_term(code));
            }
            args.push(ProgTerm::Fst(Box::new(d_arg())));
            let term = ProgTerm::Build(
                BuilderTag::Compose {
                    arities: vec![n + 1; n + 1],
                },
                args,
            );
            Ok(encode(&term))
        }
        AxiomTag::A7 => {
            let n = vars_x(data)?.len();
            // Pair the outputs of the two component realizers.
            let term = ProgTerm::Build(
                BuilderTag::Compose {
                    arities: vec![n + 1; 2],
                },
                vec![
                    const_term(pair2_code()),
                    ProgTerm::Fst(Box::new(d_arg())),
                    ProgTerm::Snd(Box::new(d_arg())),
                ],
            );
            Ok(encode(&term))
        }
        AxiomTag::A8 => {
            let n = vars_x(data)?.len();
            // Precompose each branch with p2 of the last argument, then
            // dispatch on the disjunction tag.
            let snd_last = encode(&ProgTerm::Snd(Box::new(arg(n + 1)))).into_code();
            let branch = |selected: ProgTerm| {
                let mut args = Vec::with_capacity(n + 2);
                args.push(selected);
                for code in proj_codes(n) {
                    args.push(const_term(code));
                }
                args.push(const_term(snd_last.clone()));
                ProgTerm::Build(
                    BuilderTag::Compose {
                        arities: vec![n + 1; n + 1],
                    },
                    args,
                )
            };
            let term = ProgTerm::Build(
                BuilderTag::Cond { arity: n },
                vec![
                    branch(ProgTerm::Fst(Box::new(d_arg()))),
                    branch(ProgTerm::Snd(Box::new(d_arg()))),
                ],
            );
            Ok(encode(&term))
        }
        AxiomTag::A9 => {
            let xs = vars_x(data)?;
            let ys = vars_y(data)?;
            let n = xs.len();
            // Position of each substituted variable in the argument layout
            // (quantified values, realizer, list values).
            let positions: Vec<usize> = ys
                .iter()
                .enumerate()
                .map(|(i, y)| position_of(y, xs, rs, n + 1, i))
                .collect();
            Ok(encode(&subst_realizer_term(&positions, n, n, l)))
        }
        AxiomTag::A10 => {
            let xs = vars_x(data)?;
            let ys = vars_y(data)?;
            let n = xs.len();
            let p = ys.len();
            let positions: Vec<usize> = xs
                .iter()
                .enumerate()
                .map(|(i, x)| position_of(x, ys, rs, p + 1, i))
                .collect();
            Ok(encode(&subst_realizer_term(&positions, n, p, l)))
        }
        AxiomTag::A11 => {
            let n = vars_x(data)?.len();
            // Uncurry: split the last argument into a witness and a realizer.
            let mut inners = Vec::with_capacity(n + 3);
            inners.push(d_arg());
            for code in proj_codes(n) {
                inners.push(const_term(code));
            }
            inners.push(const_term(
                encode(&ProgTerm::Fst(Box::new(arg(n + 1)))).into_code(),
            ));
            inners.push(const_term(
                encode(&ProgTerm::Snd(Box::new(arg(n + 1)))).into_code(),
            ));
            let term = ProgTerm::Build(
                BuilderTag::Compose {
                    arities: vec![n + 1; n + 2],
                },
                inners,
            );
            Ok(encode(&term))
        }
    }
}

fn vars_x(data: &InstData) -> Result<&Vec<VarName>, ExtractError> {
    data.vars_x.as_ref().ok_or(ExtractError::MissingData("xs"))
}

fn vars_y(data: &InstData) -> Result<&Vec<VarName>, ExtractError> {
    data.vars_y.as_ref().ok_or(ExtractError::MissingData("ys"))
}

fn the_var(data: &InstData) -> Result<&VarName, ExtractError> {
    data.var.as_ref().ok_or(ExtractError::MissingData("x"))
}

/// Position (1-based) of `v` in the argument layout (block of `block`
/// quantified values, the realizer at `block_len`, then the list values):
/// its index in the binder block if bound, `offset + j` for list variable
/// `j`, and the same-indexed binder position when the variable occurs
/// nowhere (its value is irrelevant but must be a domain element).
fn position_of(
    v: &VarName,
    block: &[VarName],
    rs: &VarList,
    offset: usize,
    same_index: usize,
) -> usize {
    if let Some(j) = block.iter().position(|w| w == v) {
        j + 1
    } else if let Some(j) = rs.position(v) {
        offset + j + 1
    } else {
        same_index + 1
    }
}

/// Term of the A9/A10 realizer: at run time, compose the incoming realizer
/// with argument projections (the substitution map), then specialize the
/// trailing list values by s-m-n.
///
/// `n` is the premise binder width, `p` the conclusion binder width, `l` the
/// list width; `positions[i]` addresses the layout (p values, realizer slot,
/// l values).
fn subst_realizer_term(positions: &[usize], n: usize, p: usize, l: usize) -> ProgTerm {
    let mut inners = Vec::with_capacity(n + 2);
    inners.push(arg(l + 1));
    for &q in positions {
        inners.push(const_term(arg_code(q)));
    }
    inners.push(const_term(arg_code(p + 1)));
    let composed = ProgTerm::Build(
        BuilderTag::Compose {
            arities: vec![p + l + 1; n + 1],
        },
        inners,
    );
    let mut smn_args = Vec::with_capacity(l + 1);
    smn_args.push(composed);
    for j in 1..=l {
        smn_args.push(arg(j));
    }
    ProgTerm::Build(
        BuilderTag::Smn {
            keep: p + 1,
            fixed: l,
        },
        smn_args,
    )
}

/// Realizes a rule application from premise realizers. Premises must be
/// realized over the list the case requires (see [`premise_lists`]); the
/// result is reindexed onto `rs`.
pub fn realize_rule(
    tag: RuleTag,
    data: &InstData,
    premises: &[RealizedSequent],
    conclusion: &Sequent,
    rs: &VarList,
) -> Result<Index, ExtractError> {
    if !rs.is_admissible_for(conclusion) {
        return Err(ExtractError::Inadmissible {
            list: rs.clone(),
            sequent: conclusion.clone(),
        });
    }
    let (index, list) = realize_rule_core(tag, data, premises, conclusion)?;
    let realized = RealizedSequent {
        sequent: conclusion.clone(),
        list,
        index,
    };
    // Funnel through the minimal admissible list; see the module docs.
    let minimal = minimal_list(conclusion);
    let at_min = adapt_list(&realized, &minimal)?;
    Ok(adapt_list(&at_min, rs)?.index)
}

/// Sorted free variables of a sequent: its minimal admissible list.
pub fn minimal_list(s: &Sequent) -> VarList {
    VarList::new(s.free_vars().into_iter().collect()).expect("sets are duplicate-free")
}

fn expect_list(
    premises: &[RealizedSequent],
    index: usize,
    expected: &VarList,
) -> Result<(), ExtractError> {
    if premises[index].list != *expected {
        return Err(ExtractError::PremiseList {
            index,
            expected: expected.clone(),
        });
    }
    Ok(())
}

fn realize_rule_core(
    tag: RuleTag,
    data: &InstData,
    premises: &[RealizedSequent],
    conclusion: &Sequent,
) -> Result<(Index, VarList), ExtractError> {
    let lists = premise_lists(tag, data, premises, conclusion)?;
    for (i, expected) in lists.iter().enumerate() {
        expect_list(premises, i, expected)?;
    }
    match tag {
        RuleTag::R1 => {
            let shared = &lists[0];
            let p = shared.len();
            let a = premises[0].index.code();
            let b = premises[1].index.code();
            let mut inners = proj_codes(p);
            inners.push(a.clone());
            let c = compose_meta(b, &inners, p + 1)?;
            Ok((c, shared.clone()))
        }
        RuleTag::R2 => {
            let shared = &lists[0];
            let p = shared.len();
            let b = premises[0].index.code();
            let c = premises[1].index.code();
            let a = compose_meta(&pair2_code(), &[b.clone(), c.clone()], p + 1)?;
            Ok((a, shared.clone()))
        }
        RuleTag::R3a | RuleTag::R3b => {
            let shared = &lists[0];
            let p = shared.len();
            let a = premises[0].index.code();
            let head = if tag == RuleTag::R3a {
                fst1_code()
            } else {
                snd1_code()
            };
            let b = compose_meta(&head, &[a.clone()], p + 1)?;
            Ok((b, shared.clone()))
        }
        RuleTag::R4 => {
            let shared = &lists[0];
            let p = shared.len();
            let snd_last = encode(&ProgTerm::Snd(Box::new(arg(p + 1)))).into_code();
            let precompose = |e: &Nat| -> Result<Index, BuildError> {
                let mut inners = proj_codes(p);
                inners.push(snd_last.clone());
                compose_meta(e, &inners, p + 1)
            };
            let b = precompose(premises[0].index.code())?;
            let c = precompose(premises[1].index.code())?;
            let a = build_cond(b.code(), c.code(), p)?;
            Ok((a, shared.clone()))
        }
        RuleTag::R5a | RuleTag::R5b => {
            let shared = &lists[0];
            let p = shared.len();
            let a = premises[0].index.code();
            let tag_value = if tag == RuleTag::R5a { 0u32 } else { 1u32 };
            let inject = encode(&ProgTerm::Pair(
                Box::new(const_term(Nat::from(tag_value))),
                Box::new(arg(p + 1)),
            ))
            .into_code();
            let mut inners = proj_codes(p);
            inners.push(inject);
            let b = compose_meta(a, &inners, p + 1)?;
            Ok((b, shared.clone()))
        }
        RuleTag::R6 => {
            let shared = &lists[0];
            let p = shared.len();
            let xs = vars_x(data)?;
            let ys = vars_y(data)?;
            let a = premises[0].index.code();
            // Feed the premise realizer the values of [ys/xs]u for each u in
            // the shared list; a shared variable that disappears under the
            // substitution keeps its own position (its value is irrelevant).
            let mut inners = Vec::with_capacity(p + 1);
            for (i, u) in shared.vars().iter().enumerate() {
                let image = match xs.iter().position(|x| x == u) {
                    Some(j) => &ys[j],
                    None => u,
                };
                let q = match shared.position(image) {
                    Some(k) => k + 1,
                    None => i + 1,
                };
                inners.push(arg_code(q));
            }
            inners.push(arg_code(p + 1));
            let b = compose_meta(a, &inners, p + 1)?;
            Ok((b, shared.clone()))
        }
        RuleTag::R7 => {
            // Premise realized over (u, x); split the last argument into the
            // existential witness and the realizer.
            let premise_list = &lists[0];
            let p = premise_list.len() - 1;
            let a = premises[0].index.code();
            let mut inners = proj_codes(p);
            inners.push(encode(&ProgTerm::Fst(Box::new(arg(p + 1)))).into_code());
            inners.push(encode(&ProgTerm::Snd(Box::new(arg(p + 1)))).into_code());
            let b = compose_meta(a, &inners, p + 1)?;
            let out_list = VarList::new(premise_list.vars()[..p].to_vec())
                .expect("prefix of a duplicate-free list");
            Ok((b, out_list))
        }
        RuleTag::R8 => {
            // Premise realized over u; the conclusion goes over (u, x) and
            // re-pairs the witness with the realizer.
            let premise_list = &lists[0];
            let p = premise_list.len();
            let x = the_var(data)?;
            let a = premises[0].index.code();
            let mut inners = proj_codes(p);
            // Projections are evaluated at arity p + 2 now.
            inners.push(
                encode(&ProgTerm::Pair(Box::new(arg(p + 1)), Box::new(arg(p + 2))))
                    .into_code(),
            );
            let b = compose_meta(a, &inners, p + 2)?;
            let mut out_vars = premise_list.vars().to_vec();
            out_vars.push(x.clone());
            let out_list = VarList::new(out_vars).expect("x not in the premise list");
            Ok((b, out_list))
        }
        RuleTag::R9 => {
            // Premise realized over (xs, u). Build a code which, given the
            // list values and a realizer of the lhs, specializes the premise
            // realizer by s-m-n into a realizer of the guarded implication.
            let premise_list = &lists[0];
            let xs = vars_x(data)?;
            let n = xs.len();
            let p = premise_list.len() - n;
            let c = premises[0].index.code();
            // c' (m.., k.., d, b) = c(m.., k.., pair(d, b))
            let mut inners = proj_codes(n + p);
            inners.push(
                encode(&ProgTerm::Pair(
                    Box::new(arg(n + p + 1)),
                    Box::new(arg(n + p + 2)),
                ))
                .into_code(),
            );
            let c1 = compose_meta(c, &inners, n + p + 2)?;
            // c'' (m.., b, k.., d) = c'(m.., k.., d, b)
            let mut sigma = Vec::with_capacity(n + p + 2);
            for j in 1..=n {
                sigma.push(j);
            }
            for i in 1..=p {
                sigma.push(n + 1 + i);
            }
            sigma.push(n + p + 2);
            sigma.push(n + 1);
            let c2 = build_perm(c1.code(), &sigma)?;
            // Realizer term: specialize (k.., d) at run time.
            let mut smn_args = Vec::with_capacity(p + 2);
            smn_args.push(const_term(c2.into_code()));
            for j in 1..=(p + 1) {
                smn_args.push(arg(j));
            }
            let term = ProgTerm::Build(
                BuilderTag::Smn {
                    keep: n + 1,
                    fixed: p + 1,
                },
                smn_args,
            );
            let out_list = VarList::new(premise_list.vars()[n..].to_vec())
                .expect("suffix of a duplicate-free list");
            Ok((encode(&term), out_list))
        }
    }
}

/// The list each premise must be realized over for the given rule instance:
/// the sorted union of the free variables of all sequents in the instance,
/// minus the variables the case binds, arranged as the case requires.
pub fn premise_lists(
    tag: RuleTag,
    data: &InstData,
    premises: &[RealizedSequent],
    conclusion: &Sequent,
) -> Result<Vec<VarList>, ExtractError> {
    let premise_seqs: Vec<&Sequent> = premises.iter().map(|p| &p.sequent).collect();
    premise_lists_for(tag, data, &premise_seqs, conclusion)
}

fn premise_lists_for(
    tag: RuleTag,
    data: &InstData,
    premises: &[&Sequent],
    conclusion: &Sequent,
) -> Result<Vec<VarList>, ExtractError> {
    let mut all_frees: BTreeSet<VarName> = conclusion.free_vars();
    for p in premises {
        all_frees.extend(p.free_vars());
    }
    match tag {
        RuleTag::R1 | RuleTag::R2 | RuleTag::R4 => {
            let shared = VarList::new(all_frees.into_iter().collect()).expect("set");
            Ok(vec![shared.clone(), shared])
        }
        RuleTag::R3a | RuleTag::R3b | RuleTag::R5a | RuleTag::R5b | RuleTag::R6 => {
            Ok(vec![VarList::new(all_frees.into_iter().collect()).expect("set")])
        }
        RuleTag::R7 => {
            let x = the_var(data)?;
            let mut vars: Vec<VarName> = all_frees.into_iter().filter(|v| v != x).collect();
            vars.push(x.clone());
            Ok(vec![VarList::new(vars).expect("x filtered out")])
        }
        RuleTag::R8 => {
            let x = the_var(data)?;
            let vars: Vec<VarName> = all_frees.into_iter().filter(|v| v != x).collect();
            Ok(vec![VarList::new(vars).expect("set")])
        }
        RuleTag::R9 => {
            let xs = vars_x(data)?;
            let mut vars: Vec<VarName> = xs.clone();
            vars.extend(all_frees.into_iter().filter(|v| !xs.contains(v)));
            Ok(vec![
                VarList::new(vars).map_err(|_| ExtractError::MissingData("xs"))?
            ])
        }
    }
}

/// Reindexes a realizer onto another admissible list: permute the shared
/// variables forward, fix the dropped ones to 0, then embed into the target
/// order (added variables are dummies).
pub fn adapt_list(r: &RealizedSequent, target: &VarList) -> Result<RealizedSequent, ExtractError> {
    if !target.is_admissible_for(&r.sequent) {
        return Err(ExtractError::Inadmissible {
            list: target.clone(),
            sequent: r.sequent.clone(),
        });
    }
    if !r.list.is_admissible_for(&r.sequent) {
        return Err(ExtractError::Inadmissible {
            list: r.list.clone(),
            sequent: r.sequent.clone(),
        });
    }
    let source = r.list.vars();
    let n1 = source.len();
    let shared: Vec<VarName> = source
        .iter()
        .filter(|v| target.contains(v))
        .cloned()
        .collect();
    let dropped: Vec<VarName> = source
        .iter()
        .filter(|v| !target.contains(v))
        .cloned()
        .collect();
    let q = shared.len();
    let u = dropped.len();
    let m = target.len();

    // Step 1: reorder the arguments to (shared, realizer, dropped).
    let mut sigma1 = Vec::with_capacity(n1 + 1);
    for v in source {
        let pos = match shared.iter().position(|w| w == v) {
            Some(k) => k + 1,
            None => q + 1 + 1 + dropped.iter().position(|w| w == v).unwrap(),
        };
        sigma1.push(pos);
    }
    sigma1.push(q + 1);
    let e1 = build_perm(r.index.code(), &sigma1)?;

    // Step 2: fix the dropped trailing values to 0.
    let zeros = vec![Nat::zero(); u];
    let e2 = build_smn(e1.code(), &zeros, q + 1)?;

    // Step 3: embed into the target order; unused target positions are
    // dummy arguments.
    let mut sigma3 = Vec::with_capacity(m + 1);
    let mut taken = vec![false; m + 2];
    for v in &shared {
        let k = target.position(v).unwrap() + 1;
        sigma3.push(k);
        taken[k] = true;
    }
    sigma3.push(m + 1);
    taken[m + 1] = true;
    // Argument positions the reindexed code never reads take the leftover
    // target positions, in any fixed order.
    let mut free_slots: Vec<usize> = (1..=m).filter(|&k| !taken[k]).collect();
    for _ in (q + 2)..=(m + 1) {
        sigma3.push(free_slots.pop().expect("leftover target positions"));
    }
    let e3 = build_perm(e2.code(), &sigma3)?;

    Ok(RealizedSequent {
        sequent: r.sequent.clone(),
        list: target.clone(),
        index: e3,
    })
}

/// Extracts a realizer for the conclusion of a checked derivation over the
/// admissible list `rs`.
pub fn extract(d: &Derivation, rs: &VarList) -> Result<Index, ExtractError> {
    let report = check_derivation(d);
    if !report.ok() {
        return Err(ExtractError::Check(report));
    }
    extract_checked(d, rs)
}

fn extract_checked(d: &Derivation, rs: &VarList) -> Result<Index, ExtractError> {
    if !rs.is_admissible_for(&d.conclusion) {
        return Err(ExtractError::Inadmissible {
            list: rs.clone(),
            sequent: d.conclusion.clone(),
        });
    }
    match &d.justification {
        Justification::Axiom(tag, data) => realize_axiom(*tag, data, &d.conclusion, rs),
        Justification::Rule(tag, data, premises) => {
            let premise_seqs: Vec<&Sequent> = premises.iter().map(|p| &p.conclusion).collect();
            let lists = premise_lists_for(*tag, data, &premise_seqs, &d.conclusion)?;
            let mut realized = Vec::with_capacity(premises.len());
            for (premise, list) in premises.iter().zip(&lists) {
                let index = extract_checked(premise, list)?;
                realized.push(RealizedSequent {
                    sequent: premise.conclusion.clone(),
                    list: list.clone(),
                    index,
                });
            }
            realize_rule(*tag, data, &realized, &d.conclusion, rs)
        }
    }
}

impl ExtractionContext {
    pub fn new(target_list: VarList, signature: Signature) -> ExtractionContext {
        ExtractionContext {
            target_list,
            signature,
        }
    }

    /// Checks atom arities against the signature, then extracts over the
    /// context's target list.
    pub fn extract(&self, d: &Derivation) -> Result<Index, ExtractError> {
        self.validate(d)?;
        extract(d, &self.target_list)
    }

    fn validate(&self, d: &Derivation) -> Result<(), ExtractError> {
        validate_arities(&d.conclusion.lhs, &self.signature)?;
        validate_arities(&d.conclusion.rhs, &self.signature)?;
        if let Justification::Rule(_, _, premises) = &d.justification {
            for p in premises {
                self.validate(p)?;
            }
        }
        Ok(())
    }
}

fn validate_arities(f: &Formula, sig: &Signature) -> Result<(), ExtractError> {
    match f {
        Formula::Bot | Formula::Top => Ok(()),
        Formula::Atom(p, args) => {
            let expected = sig.arity(p).unwrap_or(args.len());
            if args.len() != expected {
                return Err(ExtractError::ArityMismatch {
                    pred: p.to_string(),
                    expected,
                    got: args.len(),
                });
            }
            Ok(())
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            validate_arities(a, sig)?;
            validate_arities(b, sig)
        }
        Formula::Exists(_, body) => validate_arities(body, sig),
        Formula::AllImp(_, ant, cons) => {
            validate_arities(ant, sig)?;
            validate_arities(cons, sig)
        }
    }
}

/// Realizer of a sentence derived as `top => A`: extract over the empty
/// list and apply the index to the single argument 0.
pub fn sentence_realizer(d: &Derivation, fuel: u64) -> Result<Nat, ExtractError> {
    if d.conclusion.lhs != Formula::Top || !d.conclusion.rhs.is_closed() {
        return Err(ExtractError::NotASentence);
    }
    let e = extract(d, &VarList::empty())?;
    match eval(e.code(), &[Nat::zero()], fuel) {
        EvalOutcome::Value(v) => Ok(v),
        other => Err(ExtractError::SentenceEval(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{AxiomTag, Derivation, InstData, RuleTag};
    use crate::nat;
    use crate::numbering::{first, pair, second, unpair};
    use crate::syntax::{parse_formula, parse_sequent, parse_signature, Signature};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FUEL: u64 = 10_000_000;

    fn sig() -> Signature {
        parse_signature("P/0, Q/0, P1/1, Q1/1, Q2/2").unwrap()
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

    fn vl(names: &[&str]) -> VarList {
        VarList::new(names.iter().map(|s| VarName::from(*s)).collect()).unwrap()
    }

    fn ev_nat(e: &Index, args: &[Nat]) -> Nat {
        match eval(e.code(), args, FUEL) {
            EvalOutcome::Value(v) => v,
            other => panic!("expected a value, got {other}"),
        }
    }

    /// P & Q => Q & P via A1, R3b, R3a, R2.
    pub fn swap_derivation() -> Derivation {
        let pq = fml("P & Q");
        let a1 = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(pq.clone()),
                ..Default::default()
            },
            seq("P & Q => P & Q"),
        );
        let to_q = Derivation::rule(
            RuleTag::R3b,
            InstData {
                formula_a: Some(pq.clone()),
                formula_b: Some(fml("P")),
                formula_c: Some(fml("Q")),
                ..Default::default()
            },
            vec![a1.clone()],
            seq("P & Q => Q"),
        );
        let to_p = Derivation::rule(
            RuleTag::R3a,
            InstData {
                formula_a: Some(pq.clone()),
                formula_b: Some(fml("P")),
                formula_c: Some(fml("Q")),
                ..Default::default()
            },
            vec![a1],
            seq("P & Q => P"),
        );
        Derivation::rule(
            RuleTag::R2,
            InstData {
                formula_a: Some(pq),
                formula_b: Some(fml("Q")),
                formula_c: Some(fml("P")),
                ..Default::default()
            },
            vec![to_q, to_p],
            seq("P & Q => Q & P"),
        )
    }

    #[test]
    fn a1_realizer_returns_last_argument() {
        let data = InstData {
            formula_a: Some(fml("P1(x)")),
            ..Default::default()
        };
        let e = realize_axiom(AxiomTag::A1, &data, &seq("P1(x) => P1(x)"), &vl(&["x"])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let k = nat(rng.gen_range(0..100u64));
            let d = nat(rng.gen_range(0..10_000u64));
            assert_eq!(ev_nat(&e, &[k, d.clone()]), d);
        }
    }

    #[test]
    fn a4_realizer_equation() {
        let data = InstData {
            formula_a: Some(fml("P")),
            formula_b: Some(fml("Q1(x)")),
            var: Some(v("x")),
            ..Default::default()
        };
        let e = realize_axiom(
            AxiomTag::A4,
            &data,
            &seq("P & ex x Q1(x) => ex x (P & Q1(x))"),
            &VarList::empty(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let d = nat(rng.gen_range(0..50_000u64));
            let expected = pair(
                &first(&second(&d)),
                &pair(&first(&d), &second(&second(&d))),
            );
            assert_eq!(ev_nat(&e, &[d]), expected);
        }
    }

    #[test]
    fn swap_extraction_pairs_swapped() {
        let d = swap_derivation();
        let e = extract(&d, &VarList::empty()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dd = nat(rng.gen_range(0..100_000u64));
            let expected = pair(&second(&dd), &first(&dd));
            assert_eq!(ev_nat(&e, &[dd]), expected);
        }
    }

    #[test]
    fn extract_arity_matches_list() {
        let d = swap_derivation();
        for list in [vl(&[]), vl(&["x"]), vl(&["x", "y"])] {
            let e = extract(&d, &list).unwrap();
            assert!(e.member_of(list.len() + 1));
        }
    }

    #[test]
    fn adapt_identity_is_extensionally_transparent() {
        let e = encode(&ProgTerm::Arg(3));
        let r = RealizedSequent {
            sequent: seq("Q2(x,y) => Q2(x,y)"),
            list: vl(&["x", "y"]),
            index: e.clone(),
        };
        let same = adapt_list(&r, &vl(&["x", "y"])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let args = vec![
                nat(rng.gen_range(0..50u64)),
                nat(rng.gen_range(0..50u64)),
                nat(rng.gen_range(0..1000u64)),
            ];
            assert_eq!(ev_nat(&same.index, &args), ev_nat(&e, &args));
        }
    }

    #[test]
    fn adapt_reorder_swaps_positions() {
        // A realizer returning its first list argument, adapted to the
        // reversed list, returns its second.
        let r = RealizedSequent {
            sequent: seq("Q2(x,y) => Q2(x,y)"),
            list: vl(&["x", "y"]),
            index: encode(&ProgTerm::Arg(1)),
        };
        let adapted = adapt_list(&r, &vl(&["y", "x"])).unwrap();
        assert_eq!(
            ev_nat(&adapted.index, &[nat(4), nat(9), nat(0)]),
            nat(9)
        );
    }

    #[test]
    fn adapt_drop_then_readd_roundtrip() {
        // z is not free in the sequent; dropping and re-adding it keeps the
        // behavior on all inputs.
        let original = encode(&ProgTerm::Pair(
            Box::new(ProgTerm::Arg(1)),
            Box::new(ProgTerm::Arg(3)),
        ));
        let r = RealizedSequent {
            sequent: seq("P1(x) => P1(x)"),
            list: vl(&["x", "z"]),
            index: original.clone(),
        };
        let narrowed = adapt_list(&r, &vl(&["x"])).unwrap();
        let widened = adapt_list(&narrowed, &vl(&["x", "z"])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let k = nat(rng.gen_range(0..100u64));
            let z = nat(rng.gen_range(0..100u64));
            let d = nat(rng.gen_range(0..10_000u64));
            // The original ignores z, so both agree on every input.
            assert_eq!(
                ev_nat(&widened.index, &[k.clone(), z, d.clone()]),
                ev_nat(&original, &[k.clone(), nat(0), d])
            );
        }
    }

    #[test]
    fn r9_sentence_realizer_swaps() {
        // top => (P & Q -> Q & P), curried from the swap derivation.
        let d = swap_sentence_derivation();
        let report = check_derivation(&d);
        assert!(report.ok(), "{report}");
        let e_prime = sentence_realizer(&d, FUEL).unwrap();
        // The sentence realizer is a unary code swapping pair components.
        let t = crate::numbering::decode(&e_prime).unwrap();
        assert!(t.max_arg() <= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let s = nat(rng.gen_range(0..10_000u64));
            let (a, b) = unpair(&s);
            let got = eval(&e_prime, &[s], FUEL);
            assert_eq!(got, EvalOutcome::Value(pair(&b, &a)));
        }
    }

    /// top => (P & Q -> Q & P) via R9 over R1(R3b(A1), swap).
    pub fn swap_sentence_derivation() -> Derivation {
        let tpq = fml("top & (P & Q)");
        let a1 = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(tpq.clone()),
                ..Default::default()
            },
            Sequent::new(tpq.clone(), tpq.clone()),
        );
        let to_pq = Derivation::rule(
            RuleTag::R3b,
            InstData {
                formula_a: Some(tpq.clone()),
                formula_b: Some(Formula::Top),
                formula_c: Some(fml("P & Q")),
                ..Default::default()
            },
            vec![a1],
            Sequent::new(tpq.clone(), fml("P & Q")),
        );
        let chained = Derivation::rule(
            RuleTag::R1,
            InstData {
                formula_a: Some(tpq.clone()),
                formula_b: Some(fml("P & Q")),
                formula_c: Some(fml("Q & P")),
                ..Default::default()
            },
            vec![to_pq, swap_derivation()],
            Sequent::new(tpq, fml("Q & P")),
        );
        Derivation::rule(
            RuleTag::R9,
            InstData {
                formula_a: Some(Formula::Top),
                formula_b: Some(fml("P & Q")),
                formula_c: Some(fml("Q & P")),
                vars_x: Some(vec![]),
                ..Default::default()
            },
            vec![chained],
            seq("top => (P & Q -> Q & P)"),
        )
    }

    #[test]
    fn sentence_realizer_rejects_open_formulas() {
        let d = Derivation::axiom(
            AxiomTag::A2,
            InstData {
                formula_a: Some(fml("P1(x)")),
                ..Default::default()
            },
            seq("P1(x) => top"),
        );
        assert!(matches!(
            sentence_realizer(&d, FUEL),
            Err(ExtractError::NotASentence)
        ));
    }

    #[test]
    fn extract_rejects_unchecked_derivations() {
        let bogus = Derivation::axiom(
            AxiomTag::A1,
            InstData {
                formula_a: Some(fml("P")),
                ..Default::default()
            },
            seq("P => Q"),
        );
        assert!(matches!(
            extract(&bogus, &VarList::empty()),
            Err(ExtractError::Check(_))
        ));
    }
}
