//! A concrete countable family of total number-theoretic functions, presented
//! as a Gödel-numbered term language with an interpreter.
//!
//! A program is a [`ProgTerm`]; its code is a natural number produced by
//! [`encode`]. A code `e` denotes an `n`-ary function whenever `e` decodes and
//! its largest argument index is at most `n` (see [`in_index_set`]); the same
//! code then denotes an `m`-ary function for every `m >= n`, with surplus
//! arguments ignored. [`eval`] implements the value relation.
//!
//! Besides the data constructors (constants, argument projections, pairing,
//! unpairing, and a conditional on the first pair component), the language has
//! builder primitives ([`BuilderTag`]) that compute *new codes* from
//! code-valued arguments at run time: composition, constant indices,
//! conditionals, argument permutation, dummy arguments, and s-m-n
//! specialization. The same constructions are available at build time through
//! [`build_proj`], [`build_compose`], [`build_const`], [`build_cond`],
//! [`build_perm`], [`build_dummy`], and [`build_smn`].


use num_traits::{ToPrimitive, Zero};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

/// Unbounded natural number. Pairing codes grow quadratically and program
/// codes grow fast, so fixed-width integers are insufficient.
pub type Nat = num_bigint::BigUint;

/// Convenience constructor for small naturals.
pub fn nat(v: u64) -> Nat {
    Nat::from(v)
}

/// Cantor pairing `c(a, b) = (a + b)(a + b + 1)/2 + b`, a bijection N^2 -> N.
pub fn pair(a: &Nat, b: &Nat) -> Nat {
    let s = a + b;
    (&s * (&s + 1u32)) / 2u32 + b
}

/// Inverse of [`pair`]; total on all naturals.
pub fn unpair(n: &Nat) -> (Nat, Nat) {
    // w = floor((sqrt(8n + 1) - 1) / 2) is the anti-diagonal index.
    let w = ((n * 8u32 + 1u32).sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let b = n - t;
    let a = w - &b;
    (a, b)
}

/// First component of the Cantor pair.
pub fn first(n: &Nat) -> Nat {
    unpair(n).0
}

/// Second component of the Cantor pair.
pub fn second(n: &Nat) -> Nat {
    unpair(n).1
}

/// Builder primitives. Each tag fixes its own run-time argument count and
/// carries its arity parameters; applied to values that fail to decode as
/// indices of the stated arity, the whole evaluation is undefined.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BuilderTag {
    /// `Compose { arities }` takes an outer code plus `arities.len()` inner
    /// codes; inner code `j` must lie in `I_{arities[j]}`.
    Compose { arities: Vec<usize> },
    /// Takes a value `k` and yields an index of the 0-ary constant `k`.
    ConstIndex,
    /// Takes two codes in `I_{arity+1}` and yields the code dispatching on
    /// whether the first pair component of the last argument is zero.
    Cond { arity: usize },
    /// Takes a code in `I_{perm.len()}` and permutes its arguments.
    Perm { perm: Vec<usize> },
    /// Takes a code in `I_{arity}` and yields it as a member of `I_{arity+1}`.
    Dummy { arity: usize },
    /// Takes a code in `I_{keep+fixed}` plus `fixed` values and specializes
    /// the trailing arguments, yielding a code in `I_{keep}`.
    Smn { keep: usize, fixed: usize },
}

impl BuilderTag {
    /// Number of run-time arguments the builder consumes.
    pub fn arg_count(&self) -> usize {
        match self {
            BuilderTag::Compose { arities } => arities.len() + 1,
            BuilderTag::ConstIndex => 1,
            BuilderTag::Cond { .. } => 2,
            BuilderTag::Perm { .. } => 1,
            BuilderTag::Dummy { .. } => 1,
            BuilderTag::Smn { fixed, .. } => fixed + 1,
        }
    }

    fn id(&self) -> u8 {
        match self {
            BuilderTag::Compose { .. } => 0,
            BuilderTag::ConstIndex => 1,
            BuilderTag::Cond { .. } => 2,
            BuilderTag::Perm { .. } => 3,
            BuilderTag::Dummy { .. } => 4,
            BuilderTag::Smn { .. } => 5,
        }
    }
}

/// Term of the program language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProgTerm {
    /// Literal natural number.
    Const(Nat),
    /// `i`-th argument, 1-based.
    Arg(usize),
    /// Cantor pair of the two child values.
    Pair(Box<ProgTerm>, Box<ProgTerm>),
    /// First pair component of the child value.
    Fst(Box<ProgTerm>),
    /// Second pair component of the child value.
    Snd(Box<ProgTerm>),
    /// `then` branch when the first pair component of the scrutinee is zero,
    /// `else` branch otherwise.
    IfZFst(Box<ProgTerm>, Box<ProgTerm>, Box<ProgTerm>),
    /// Builder primitive applied to evaluated arguments.
    Build(BuilderTag, Vec<ProgTerm>),
}

impl ProgTerm {
    /// Largest argument index referenced, 0 for closed terms. A term denotes
    /// an `n`-ary function for every `n >= max_arg`.
    pub fn max_arg(&self) -> usize {
        match self {
            ProgTerm::Const(_) => 0,
            ProgTerm::Arg(i) => *i,
            ProgTerm::Pair(l, r) => l.max_arg().max(r.max_arg()),
            ProgTerm::Fst(t) | ProgTerm::Snd(t) => t.max_arg(),
            ProgTerm::IfZFst(s, a, b) => s.max_arg().max(a.max_arg()).max(b.max_arg()),
            ProgTerm::Build(_, args) => args.iter().map(|a| a.max_arg()).max().unwrap_or(0),
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            ProgTerm::Const(_) | ProgTerm::Arg(_) => 1,
            ProgTerm::Pair(l, r) => 1 + l.size() + r.size(),
            ProgTerm::Fst(t) | ProgTerm::Snd(t) => 1 + t.size(),
            ProgTerm::IfZFst(s, a, b) => 1 + s.size() + a.size() + b.size(),
            ProgTerm::Build(_, args) => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
        }
    }

    /// Replaces every `Arg(i)` by `map(i)`. The substitution is simultaneous.
    fn substitute_args(&self, map: &impl Fn(usize) -> ProgTerm) -> ProgTerm {
        match self {
            ProgTerm::Const(k) => ProgTerm::Const(k.clone()),
            ProgTerm::Arg(i) => map(*i),
            ProgTerm::Pair(l, r) => ProgTerm::Pair(
                Box::new(l.substitute_args(map)),
                Box::new(r.substitute_args(map)),
            ),
            ProgTerm::Fst(t) => ProgTerm::Fst(Box::new(t.substitute_args(map))),
            ProgTerm::Snd(t) => ProgTerm::Snd(Box::new(t.substitute_args(map))),
            ProgTerm::IfZFst(s, a, b) => ProgTerm::IfZFst(
                Box::new(s.substitute_args(map)),
                Box::new(a.substitute_args(map)),
                Box::new(b.substitute_args(map)),
            ),
            ProgTerm::Build(tag, args) => ProgTerm::Build(
                tag.clone(),
                args.iter().map(|a| a.substitute_args(map)).collect(),
            ),
        }
    }
}

impl fmt::Display for ProgTerm {
    /// Prefix debug rendering, e.g. `(pair (arg 1) (const 4))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgTerm::Const(k) => write!(f, "(const {k})"),
            ProgTerm::Arg(i) => write!(f, "(arg {i})"),
            ProgTerm::Pair(l, r) => write!(f, "(pair {l} {r})"),
            ProgTerm::Fst(t) => write!(f, "(fst {t})"),
            ProgTerm::Snd(t) => write!(f, "(snd {t})"),
            ProgTerm::IfZFst(s, a, b) => write!(f, "(ifzfst {s} {a} {b})"),
            ProgTerm::Build(tag, args) => {
                match tag {
                    BuilderTag::Compose { arities } => {
                        write!(f, "(build-compose[")?;
                        for (j, m) in arities.iter().enumerate() {
                            if j > 0 {
                                write!(f, ",")?;
                            }
                            write!(f, "{m}")?;
                        }
                        write!(f, "]")?;
                    }
                    BuilderTag::ConstIndex => write!(f, "(build-const")?,
                    BuilderTag::Cond { arity } => write!(f, "(build-cond[{arity}]")?,
                    BuilderTag::Perm { perm } => {
                        write!(f, "(build-perm[")?;
                        for (j, p) in perm.iter().enumerate() {
                            if j > 0 {
                                write!(f, ",")?;
                            }
                            write!(f, "{p}")?;
                        }
                        write!(f, "]")?;
                    }
                    BuilderTag::Dummy { arity } => write!(f, "(build-dummy[{arity}]")?,
                    BuilderTag::Smn { keep, fixed } => write!(f, "(build-smn[{keep},{fixed}]")?,
                }
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Why a code failed to decode.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("constructor tag {0} out of range")]
    BadTag(u64),
    #[error("argument index must be >= 1")]
    ZeroArgIndex,
    #[error("embedded number too large for this machine")]
    Oversized,
    #[error("builder id {0} out of range")]
    BadBuilder(u64),
    #[error("embedded permutation is not a permutation of 1..=n")]
    BadPermutation,
    #[error("term nesting exceeds the decoder depth limit")]
    TooDeep,
}

/// Why a build operation was rejected.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("argument does not decode: {0}")]
    Decode(#[from] DecodeError),
    #[error("code needs arity {needed} but only {given} is available")]
    Arity { needed: usize, given: usize },
    #[error("projection index {i} not in 1..={n}")]
    BadProjection { i: usize, n: usize },
    #[error("not a permutation of 1..={0}")]
    BadPermutation(usize),
    #[error("builder expects {expected} arguments, got {got}")]
    ArgCount { expected: usize, got: usize },
}

/// Index of a program in the numbering: a code that is known to decode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Index(Nat);

impl Index {
    /// Wraps a raw code without validation. Prefer the builders or [`encode`].
    pub fn from_code(code: Nat) -> Index {
        Index(code)
    }

    pub fn code(&self) -> &Nat {
        &self.0
    }

    pub fn into_code(self) -> Nat {
        self.0
    }

    /// Membership in `I_n`: the code decodes and references at most `n`
    /// arguments. A member of `I_n` is a member of `I_m` for all `m >= n`.
    pub fn member_of(&self, n: usize) -> bool {
        in_index_set(&self.0, n)
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Decidable membership in `I_n`.
pub fn in_index_set(code: &Nat, n: usize) -> bool {
    match decode(code) {
        Ok(t) => t.max_arg() <= n,
        Err(_) => false,
    }
}

const DECODE_DEPTH_LIMIT: usize = 10_000;

fn nest_codes(codes: &[Nat]) -> Nat {
    // Right-nested pairs; the empty list is 0 and a singleton is the element
    // itself. Unambiguous because every use site knows the length.
    match codes.len() {
        0 => Nat::zero(),
        1 => codes[0].clone(),
        _ => pair(&codes[0], &nest_codes(&codes[1..])),
    }
}

fn unnest_codes(n: &Nat, len: usize) -> Vec<Nat> {
    match len {
        0 => Vec::new(),
        1 => vec![n.clone()],
        _ => {
            let (head, rest) = unpair(n);
            let mut out = vec![head];
            out.extend(unnest_codes(&rest, len - 1));
            out
        }
    }
}

fn usizes_to_nats(v: &[usize]) -> Vec<Nat> {
    v.iter().map(|&u| Nat::from(u)).collect()
}

fn nat_to_usize(n: &Nat) -> Result<usize, DecodeError> {
    n.to_usize().ok_or(DecodeError::Oversized)
}

fn encode_builder(tag: &BuilderTag) -> Nat {
    let params = match tag {
        BuilderTag::Compose { arities } => pair(
            &Nat::from(arities.len()),
            &nest_codes(&usizes_to_nats(arities)),
        ),
        BuilderTag::ConstIndex => Nat::zero(),
        BuilderTag::Cond { arity } => Nat::from(*arity),
        BuilderTag::Perm { perm } => {
            pair(&Nat::from(perm.len()), &nest_codes(&usizes_to_nats(perm)))
        }
        BuilderTag::Dummy { arity } => Nat::from(*arity),
        BuilderTag::Smn { keep, fixed } => pair(&Nat::from(*keep), &Nat::from(*fixed)),
    };
    pair(&Nat::from(tag.id()), &params)
}

fn decode_builder(op: &Nat) -> Result<BuilderTag, DecodeError> {
    let (id, params) = unpair(op);
    match id.to_u64().ok_or(DecodeError::Oversized)? {
        0 => {
            let (len, rest) = unpair(&params);
            let len = nat_to_usize(&len)?;
            let arities = unnest_codes(&rest, len)
                .iter()
                .map(nat_to_usize)
                .collect::<Result<Vec<_>, _>>()?;
            Ok(BuilderTag::Compose { arities })
        }
        1 => Ok(BuilderTag::ConstIndex),
        2 => Ok(BuilderTag::Cond {
            arity: nat_to_usize(&params)?,
        }),
        3 => {
            let (len, rest) = unpair(&params);
            let len = nat_to_usize(&len)?;
            let perm = unnest_codes(&rest, len)
                .iter()
                .map(nat_to_usize)
                .collect::<Result<Vec<_>, _>>()?;
            if !is_permutation(&perm) {
                return Err(DecodeError::BadPermutation);
            }
            Ok(BuilderTag::Perm { perm })
        }
        4 => Ok(BuilderTag::Dummy {
            arity: nat_to_usize(&params)?,
        }),
        5 => {
            let (keep, fixed) = unpair(&params);
            Ok(BuilderTag::Smn {
                keep: nat_to_usize(&keep)?,
                fixed: nat_to_usize(&fixed)?,
            })
        }
        other => Err(DecodeError::BadBuilder(other)),
    }
}

fn is_permutation(perm: &[usize]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return false;
        }
        seen[p - 1] = true;
    }
    true
}

/// Injective numbering of terms: `code = pair(tag, payload)` with tags 0..=6
/// for the seven constructors; child lists are right-nested pairs.
pub fn encode(t: &ProgTerm) -> Index {
    Index(encode_nat(t))
}

fn encode_nat(t: &ProgTerm) -> Nat {
    let (tag, payload) = match t {
        ProgTerm::Const(k) => (0u8, k.clone()),
        ProgTerm::Arg(i) => (1, Nat::from(*i)),
        ProgTerm::Pair(l, r) => (2, pair(&encode_nat(l), &encode_nat(r))),
        ProgTerm::Fst(t) => (3, encode_nat(t)),
        ProgTerm::Snd(t) => (4, encode_nat(t)),
        ProgTerm::IfZFst(s, a, b) => (
            5,
            pair(&encode_nat(s), &pair(&encode_nat(a), &encode_nat(b))),
        ),
        ProgTerm::Build(op, args) => {
            let args: Vec<Nat> = args.iter().map(encode_nat).collect();
            (6, pair(&encode_builder(op), &nest_codes(&args)))
        }
    };
    pair(&Nat::from(tag), &payload)
}

/// Inverse of [`encode`] where defined. Not every natural decodes; failure is
/// a distinct outcome, never a silent fallback.
pub fn decode(code: &Nat) -> Result<ProgTerm, DecodeError> {
    decode_rc(code).map(|rc| (*rc).clone())
}

thread_local! {
    static DECODE_CACHE: RefCell<HashMap<Nat, Result<Rc<ProgTerm>, DecodeError>>> =
        RefCell::new(HashMap::new());
}

const DECODE_CACHE_CAP: usize = 4096;

pub(crate) fn decode_rc(code: &Nat) -> Result<Rc<ProgTerm>, DecodeError> {
    if let Some(hit) = DECODE_CACHE.with(|c| c.borrow().get(code).cloned()) {
        return hit;
    }
    let result = decode_depth(code, 0).map(Rc::new);
    DECODE_CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= DECODE_CACHE_CAP {
            c.clear();
        }
        c.insert(code.clone(), result.clone());
    });
    result
}

fn decode_depth(code: &Nat, depth: usize) -> Result<ProgTerm, DecodeError> {
    if depth > DECODE_DEPTH_LIMIT {
        return Err(DecodeError::TooDeep);
    }
    let (tag, payload) = unpair(code);
    match tag.to_u64().ok_or(DecodeError::Oversized)? {
        0 => Ok(ProgTerm::Const(payload)),
        1 => {
            if payload.is_zero() {
                return Err(DecodeError::ZeroArgIndex);
            }
            Ok(ProgTerm::Arg(nat_to_usize(&payload)?))
        }
        2 => {
            let (l, r) = unpair(&payload);
            Ok(ProgTerm::Pair(
                Box::new(decode_depth(&l, depth + 1)?),
                Box::new(decode_depth(&r, depth + 1)?),
            ))
        }
        3 => Ok(ProgTerm::Fst(Box::new(decode_depth(&payload, depth + 1)?))),
        4 => Ok(ProgTerm::Snd(Box::new(decode_depth(&payload, depth + 1)?))),
        5 => {
            let (s, rest) = unpair(&payload);
            let (a, b) = unpair(&rest);
            Ok(ProgTerm::IfZFst(
                Box::new(decode_depth(&s, depth + 1)?),
                Box::new(decode_depth(&a, depth + 1)?),
                Box::new(decode_depth(&b, depth + 1)?),
            ))
        }
        6 => {
            let (op, rest) = unpair(&payload);
            let tag = decode_builder(&op)?;
            let arg_codes = unnest_codes(&rest, tag.arg_count());
            let args = arg_codes
                .iter()
                .map(|c| decode_depth(c, depth + 1))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProgTerm::Build(tag, args))
        }
        other => Err(DecodeError::BadTag(other)),
    }
}

/// Why an evaluation has no value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UndefinedReason {
    /// The code (or a code consumed by a builder at run time) does not decode
    /// as an index of the required arity.
    DecodeFailure,
    /// The fuel budget ran out before evaluation finished. The language is
    /// total: with fuel at least term size times builder nesting, evaluation
    /// always yields `Value` or `DecodeFailure`.
    FuelExhausted,
}

/// Outcome of evaluating a code on an argument vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalOutcome {
    Value(Nat),
    Undefined(UndefinedReason),
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            EvalOutcome::Value(v) => Some(v),
            EvalOutcome::Undefined(_) => None,
        }
    }
}

impl fmt::Display for EvalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalOutcome::Value(v) => write!(f, "value {v}"),
            EvalOutcome::Undefined(UndefinedReason::DecodeFailure) => {
                write!(f, "undefined (decode failure)")
            }
            EvalOutcome::Undefined(UndefinedReason::FuelExhausted) => {
                write!(f, "undefined (fuel exhausted)")
            }
        }
    }
}

struct EvalBudget {
    fuel: u64,
}

enum EvalAbort {
    Decode,
    Fuel,
}

impl EvalBudget {
    fn spend(&mut self, cost: u64) -> Result<(), EvalAbort> {
        if self.fuel < cost {
            self.fuel = 0;
            return Err(EvalAbort::Fuel);
        }
        self.fuel -= cost;
        Ok(())
    }
}

/// Evaluates `code` on `args`. One fuel unit is charged per term node visited
/// and per node processed inside a builder application.
pub fn eval(code: &Nat, args: &[Nat], fuel: u64) -> EvalOutcome {
    let term = match decode_rc(code) {
        Ok(t) => t,
        Err(_) => return EvalOutcome::Undefined(UndefinedReason::DecodeFailure),
    };
    if term.max_arg() > args.len() {
        return EvalOutcome::Undefined(UndefinedReason::DecodeFailure);
    }
    let mut budget = EvalBudget { fuel };
    match eval_term(&term, args, &mut budget) {
        Ok(v) => EvalOutcome::Value(v),
        Err(EvalAbort::Decode) => EvalOutcome::Undefined(UndefinedReason::DecodeFailure),
        Err(EvalAbort::Fuel) => EvalOutcome::Undefined(UndefinedReason::FuelExhausted),
    }
}

/// Evaluates an in-memory term directly; used by [`eval`] and the builders.
fn eval_term(term: &ProgTerm, args: &[Nat], budget: &mut EvalBudget) -> Result<Nat, EvalAbort> {
    budget.spend(1)?;
    match term {
        ProgTerm::Const(k) => Ok(k.clone()),
        ProgTerm::Arg(i) => args.get(i - 1).cloned().ok_or(EvalAbort::Decode),
        ProgTerm::Pair(l, r) => {
            let lv = eval_term(l, args, budget)?;
            let rv = eval_term(r, args, budget)?;
            Ok(pair(&lv, &rv))
        }
        ProgTerm::Fst(t) => Ok(first(&eval_term(t, args, budget)?)),
        ProgTerm::Snd(t) => Ok(second(&eval_term(t, args, budget)?)),
        ProgTerm::IfZFst(s, a, b) => {
            let sv = eval_term(s, args, budget)?;
            if first(&sv).is_zero() {
                eval_term(a, args, budget)
            } else {
                eval_term(b, args, budget)
            }
        }
        ProgTerm::Build(tag, arg_terms) => {
            let mut vals = Vec::with_capacity(arg_terms.len());
            for t in arg_terms {
                vals.push(eval_term(t, args, budget)?);
            }
            let built = apply_builder(tag, &vals).map_err(|_| EvalAbort::Decode)?;
            budget.spend(built.1 as u64)?;
            Ok(built.0.into_code())
        }
    }
}

/// Applies a builder primitive to fully evaluated arguments, returning the
/// new index and the node count of the constructed term (its build cost).
pub fn apply_builder(tag: &BuilderTag, vals: &[Nat]) -> Result<(Index, usize), BuildError> {
    let expected = tag.arg_count();
    if vals.len() != expected {
        return Err(BuildError::ArgCount {
            expected,
            got: vals.len(),
        });
    }
    let term = match tag {
        BuilderTag::Compose { arities } => {
            compose_term(&vals[0], &vals[1..], arities)?
        }
        BuilderTag::ConstIndex => ProgTerm::Const(vals[0].clone()),
        BuilderTag::Cond { arity } => cond_term(&vals[0], &vals[1], *arity)?,
        BuilderTag::Perm { perm } => perm_term(&vals[0], perm)?,
        BuilderTag::Dummy { arity } => {
            let t = decode_of_arity(&vals[0], *arity)?;
            (*t).clone()
        }
        BuilderTag::Smn { keep, fixed } => smn_term(&vals[0], &vals[1..], *keep, *fixed)?,
    };
    let size = term.size();
    Ok((encode(&term), size))
}

fn decode_of_arity(code: &Nat, n: usize) -> Result<Rc<ProgTerm>, BuildError> {
    let t = decode_rc(code)?;
    if t.max_arg() > n {
        return Err(BuildError::Arity {
            needed: t.max_arg(),
            given: n,
        });
    }
    Ok(t)
}

fn compose_term(outer: &Nat, inners: &[Nat], arities: &[usize]) -> Result<ProgTerm, BuildError> {
    if inners.len() != arities.len() {
        return Err(BuildError::ArgCount {
            expected: arities.len(),
            got: inners.len(),
        });
    }
    let outer_term = decode_of_arity(outer, inners.len())?;
    let inner_terms = inners
        .iter()
        .zip(arities)
        .map(|(c, &m)| decode_of_arity(c, m))
        .collect::<Result<Vec<_>, _>>()?;
    // Composition by inlining: sound because the language is total and pure.
    Ok(outer_term.substitute_args(&|i| (*inner_terms[i - 1]).clone()))
}

fn cond_term(on_zero: &Nat, on_nonzero: &Nat, n: usize) -> Result<ProgTerm, BuildError> {
    let t1 = decode_of_arity(on_zero, n + 1)?;
    let t2 = decode_of_arity(on_nonzero, n + 1)?;
    Ok(ProgTerm::IfZFst(
        Box::new(ProgTerm::Arg(n + 1)),
        Box::new((*t1).clone()),
        Box::new((*t2).clone()),
    ))
}

fn perm_term(code: &Nat, perm: &[usize]) -> Result<ProgTerm, BuildError> {
    if !is_permutation(perm) {
        return Err(BuildError::BadPermutation(perm.len()));
    }
    let t = decode_of_arity(code, perm.len())?;
    Ok(t.substitute_args(&|i| ProgTerm::Arg(perm[i - 1])))
}

fn smn_term(code: &Nat, ks: &[Nat], keep: usize, fixed: usize) -> Result<ProgTerm, BuildError> {
    if ks.len() != fixed {
        return Err(BuildError::ArgCount {
            expected: fixed,
            got: ks.len(),
        });
    }
    let t = decode_of_arity(code, keep + fixed)?;
    Ok(t.substitute_args(&|i| {
        if i <= keep {
            ProgTerm::Arg(i)
        } else {
            ProgTerm::Const(ks[i - keep - 1].clone())
        }
    }))
}

/// Index of the projection `I^i_n`; requires `1 <= i <= n`.
pub fn build_proj(i: usize, n: usize) -> Result<Index, BuildError> {
    if i == 0 || i > n {
        return Err(BuildError::BadProjection { i, n });
    }
    Ok(encode(&ProgTerm::Arg(i)))
}

/// Index of the composition of `outer` (in `I_{es.len()}`) with `es`, where
/// `es[j]` lies in `I_{ms[j]}`; the result lies in `I_{max(ms)}`.
pub fn build_compose(outer: &Nat, es: &[Nat], ms: &[usize]) -> Result<Index, BuildError> {
    compose_term(outer, es, ms).map(|t| encode(&t))
}

/// Index of the 0-ary constant function `k`; lies in every `I_n`.
pub fn build_const(k: &Nat) -> Index {
    encode(&ProgTerm::Const(k.clone()))
}

/// Index in `I_{n+1}` dispatching between `e1` and `e2` (both in `I_{n+1}`)
/// on whether the first pair component of the last argument is zero.
pub fn build_cond(e1: &Nat, e2: &Nat, n: usize) -> Result<Index, BuildError> {
    cond_term(e1, e2, n).map(|t| encode(&t))
}

/// Index in `I_n` evaluating `e` with arguments permuted by `p`.
pub fn build_perm(e: &Nat, p: &[usize]) -> Result<Index, BuildError> {
    perm_term(e, p).map(|t| encode(&t))
}

/// Index in `I_{n+1}` ignoring its last argument and evaluating `e` in `I_n`.
pub fn build_dummy(e: &Nat, n: usize) -> Result<Index, BuildError> {
    let t = decode_of_arity(e, n)?;
    Ok(encode(&t))
}

/// Index in `I_n` specializing the trailing `ks.len()` arguments of
/// `e` (in `I_{n + ks.len()}`) to the constants `ks`.
pub fn build_smn(e: &Nat, ks: &[Nat], n: usize) -> Result<Index, BuildError> {
    smn_term(e, ks, n, ks.len()).map(|t| encode(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big_fuel() -> u64 {
        1_000_000
    }

    fn ev(code: &Index, args: &[u64]) -> EvalOutcome {
        let args: Vec<Nat> = args.iter().map(|&a| nat(a)).collect();
        eval(code.code(), &args, big_fuel())
    }

    #[test]
    fn cantor_pairing_examples() {
        assert_eq!(pair(&nat(0), &nat(0)), nat(0));
        assert_eq!(pair(&nat(1), &nat(2)), nat(8));
        assert_eq!(unpair(&nat(0)), (nat(0), nat(0)));
        assert_eq!(unpair(&nat(8)), (nat(1), nat(2)));
    }

    #[test]
    fn pairing_roundtrip_small_exhaustive() {
        for a in 0u64..256 {
            for b in 0u64..256 {
                let n = pair(&nat(a), &nat(b));
                assert_eq!(unpair(&n), (nat(a), nat(b)));
            }
        }
        for n in 0u64..65536 {
            let (a, b) = unpair(&nat(n));
            assert_eq!(pair(&a, &b), nat(n));
        }
    }

    #[test]
    fn encode_const_zero_is_zero() {
        assert_eq!(encode(&ProgTerm::Const(nat(0))).code(), &nat(0));
    }

    #[test]
    fn decode_encode_roundtrip_basic() {
        let t = ProgTerm::Arg(1);
        assert_eq!(decode(encode(&t).code()).unwrap(), t);
        let t = ProgTerm::IfZFst(
            Box::new(ProgTerm::Arg(2)),
            Box::new(ProgTerm::Pair(
                Box::new(ProgTerm::Const(nat(7))),
                Box::new(ProgTerm::Snd(Box::new(ProgTerm::Arg(1)))),
            )),
            Box::new(ProgTerm::Fst(Box::new(ProgTerm::Arg(3)))),
        );
        assert_eq!(decode(encode(&t).code()).unwrap(), t);
        let t = ProgTerm::Build(
            BuilderTag::Smn { keep: 2, fixed: 1 },
            vec![ProgTerm::Arg(1), ProgTerm::Const(nat(9))],
        );
        assert_eq!(decode(encode(&t).code()).unwrap(), t);
    }

    #[test]
    fn decode_random_nats_reencode_or_fail() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = nat(rng.gen_range(0..1_000_000_000u64));
            if let Ok(t) = decode(&n) {
                assert_eq!(encode(&t).code(), &n);
            }
        }
    }

    #[test]
    fn eval_projection_and_pair() {
        assert_eq!(ev(&encode(&ProgTerm::Arg(3)), &[5, 7, 9]), EvalOutcome::Value(nat(9)));
        let t = ProgTerm::Pair(Box::new(ProgTerm::Arg(1)), Box::new(ProgTerm::Const(nat(4))));
        // pair(2, 4) = 25 by the Cantor formula.
        assert_eq!(ev(&encode(&t), &[2]), EvalOutcome::Value(nat(25)));
    }

    #[test]
    fn eval_missing_argument_is_decode_failure() {
        assert_eq!(
            ev(&encode(&ProgTerm::Arg(2)), &[5]),
            EvalOutcome::Undefined(UndefinedReason::DecodeFailure)
        );
    }

    #[test]
    fn eval_fuel_exhaustion_and_monotonicity() {
        let t = ProgTerm::Pair(
            Box::new(ProgTerm::Pair(
                Box::new(ProgTerm::Const(nat(1))),
                Box::new(ProgTerm::Const(nat(2))),
            )),
            Box::new(ProgTerm::Const(nat(3))),
        );
        let e = encode(&t);
        assert_eq!(
            eval(e.code(), &[], 2),
            EvalOutcome::Undefined(UndefinedReason::FuelExhausted)
        );
        let full = eval(e.code(), &[], 5);
        assert!(matches!(full, EvalOutcome::Value(_)));
        // Raising fuel never changes a Value outcome.
        assert_eq!(eval(e.code(), &[], 50), full);
        assert_eq!(eval(e.code(), &[], 5_000), full);
    }

    #[test]
    fn proj_builder_examples() {
        assert_eq!(ev(&build_proj(1, 1).unwrap(), &[42]), EvalOutcome::Value(nat(42)));
        assert_eq!(ev(&build_proj(2, 3).unwrap(), &[4, 5, 6]), EvalOutcome::Value(nat(5)));
        let e = build_proj(1, 2).unwrap();
        assert!(e.member_of(2));
        assert!(e.member_of(3));
        assert!(!e.member_of(0));
        assert!(build_proj(0, 1).is_err());
        assert!(build_proj(3, 2).is_err());
    }

    #[test]
    fn compose_builder_examples() {
        let id = build_proj(1, 1).unwrap();
        let c = build_compose(id.code(), &[id.code().clone()], &[1]).unwrap();
        for x in 0u64..100 {
            assert_eq!(ev(&c, &[x]), EvalOutcome::Value(nat(x)));
        }
        let swap = encode(&ProgTerm::Pair(
            Box::new(ProgTerm::Snd(Box::new(ProgTerm::Arg(1)))),
            Box::new(ProgTerm::Fst(Box::new(ProgTerm::Arg(1)))),
        ));
        let c = build_compose(swap.code(), &[id.code().clone()], &[1]).unwrap();
        let d = pair(&nat(3), &nat(4));
        assert_eq!(
            eval(c.code(), &[d], big_fuel()),
            EvalOutcome::Value(pair(&nat(4), &nat(3)))
        );
    }

    #[test]
    fn const_builder_examples() {
        assert_eq!(ev(&build_const(&nat(0)), &[]), EvalOutcome::Value(nat(0)));
        assert_eq!(ev(&build_const(&nat(7)), &[1, 2, 3]), EvalOutcome::Value(nat(7)));
        for k in 0u64..1000 {
            assert_eq!(decode(build_const(&nat(k)).code()).unwrap(), ProgTerm::Const(nat(k)));
        }
    }

    #[test]
    fn cond_builder_examples() {
        let e1 = build_const(&nat(1));
        let e2 = build_const(&nat(2));
        let c = build_cond(e1.code(), e2.code(), 0).unwrap();
        let d0 = pair(&nat(0), &nat(5));
        let d3 = pair(&nat(3), &nat(5));
        assert_eq!(eval(c.code(), &[d0], big_fuel()), EvalOutcome::Value(nat(1)));
        assert_eq!(eval(c.code(), &[d3], big_fuel()), EvalOutcome::Value(nat(2)));

        // Equal branches: extensionally equal to either branch.
        let id = build_proj(1, 1).unwrap();
        let c = build_cond(id.code(), id.code(), 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let d = nat(rng.gen_range(0..10_000u64));
            assert_eq!(
                eval(c.code(), &[d.clone()], big_fuel()),
                eval(id.code(), &[d], big_fuel())
            );
        }
    }

    #[test]
    fn perm_builder_examples() {
        let e = encode(&ProgTerm::Arg(1));
        let p = build_perm(e.code(), &[2, 1]).unwrap();
        assert_eq!(ev(&p, &[4, 9]), EvalOutcome::Value(nat(9)));
        assert!(build_perm(e.code(), &[1, 1]).is_err());
        let idp = build_perm(e.code(), &[1, 2]).unwrap();
        assert_eq!(ev(&idp, &[4, 9]), EvalOutcome::Value(nat(4)));
    }

    #[test]
    fn dummy_builder_examples() {
        let d = build_dummy(build_const(&nat(5)).code(), 0).unwrap();
        assert_eq!(ev(&d, &[99]), EvalOutcome::Value(nat(5)));
        let d = build_dummy(build_proj(1, 1).unwrap().code(), 1).unwrap();
        assert_eq!(ev(&d, &[3, 8]), EvalOutcome::Value(nat(3)));
    }

    #[test]
    fn smn_builder_examples() {
        let e = encode(&ProgTerm::Arg(2));
        let s = build_smn(e.code(), &[nat(7)], 1).unwrap();
        assert_eq!(ev(&s, &[3]), EvalOutcome::Value(nat(7)));
        // m = 0 specialization is extensionally the original.
        let s = build_smn(e.code(), &[], 2).unwrap();
        assert_eq!(ev(&s, &[3, 4]), ev(&e, &[3, 4]));
    }

    #[test]
    fn runtime_builder_inside_term() {
        // Build(smn) computing an index at run time, then checked by eval.
        let inner = encode(&ProgTerm::Arg(2));
        let t = ProgTerm::Build(
            BuilderTag::Smn { keep: 1, fixed: 1 },
            vec![ProgTerm::Const(inner.into_code()), ProgTerm::Arg(1)],
        );
        let built = ev(&encode(&t), &[7]);
        let code = built.value().expect("builder yields a code").clone();
        assert_eq!(eval(&code, &[nat(0)], big_fuel()), EvalOutcome::Value(nat(7)));
    }

    #[test]
    fn runtime_builder_on_garbage_is_undefined() {
        // 1 decodes as Arg-with-zero-payload? pair(1, 0) is... use a number
        // that genuinely fails to decode as an index of arity 1: Arg(2).
        let bad = encode(&ProgTerm::Arg(2)).into_code();
        let t = ProgTerm::Build(
            BuilderTag::Dummy { arity: 1 },
            vec![ProgTerm::Const(bad)],
        );
        assert_eq!(
            ev(&encode(&t), &[]),
            EvalOutcome::Undefined(UndefinedReason::DecodeFailure)
        );
    }

    #[test]
    fn surplus_arguments_are_ignored() {
        let e = encode(&ProgTerm::Pair(
            Box::new(ProgTerm::Arg(1)),
            Box::new(ProgTerm::Arg(2)),
        ));
        let v1 = ev(&e, &[3, 4]);
        let v2 = ev(&e, &[3, 4, 99, 100]);
        assert_eq!(v1, v2);
    }
}
