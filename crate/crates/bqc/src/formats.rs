//! Text file formats. The exact grammars live in FORMATS.md at the crate
//! root; briefly:
//!
//! Derivation files: a `sig:` line declaring predicate arities, then one
//! nested block per node with fields in order — `rule:`, `conclusion:`,
//! optional `with:` (instantiation data `A`/`B`/`C`/`xs`/`ys`/`x`), zero or
//! more `premise:` blocks, and a closing `end`.
//!
//! Evaluation files: a `sig:` line, a `domain: [..]` line, then per-predicate
//! tables `P: {(args): [realizers]; ...}`. Missing tuples have empty
//! realizer sets.
//!
//! Witness files: lines `witness: <path> @ (values) -> [realizers]` keyed by
//! the implication position and the domain values bound on the way there.
//!
//! `#` starts a comment anywhere; blank lines are ignored.

use crate::calculus::{parse_tag, Derivation, InstData, Justification, Tag};
use crate::numbering::Nat;
use crate::semantics::{parse_path, Evaluation, PredTable, WitnessMap};
use crate::syntax::{
    parse_formula, parse_sequent, parse_signature, PredName, Signature, VarName,
};
use std::collections::BTreeSet;
use std::fmt;

/// Failure while reading a structured input file.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Parsed derivation file: the declared signature and the proof tree.
#[derive(Clone, Debug)]
pub struct DerivationFile {
    pub signature: Signature,
    pub derivation: Derivation,
}

/// Parsed evaluation file.
#[derive(Clone, Debug)]
pub struct EvaluationFile {
    pub signature: Signature,
    pub evaluation: Evaluation,
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let items = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let line = match raw.find('#') {
                    Some(ix) => &raw[..ix],
                    None => raw,
                };
                let line = line.trim();
                if line.is_empty() {
                    None
                } else {
                    Some((i + 1, line))
                }
            })
            .collect();
        Lines { items, pos: 0 }
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.peek();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn last_line(&self) -> usize {
        self.items.last().map(|(n, _)| *n).unwrap_or(0)
    }
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError {
        line,
        message: message.into(),
    }
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(':'))
        .map(str::trim)
}

/// Reads a derivation file.
pub fn parse_derivation_file(text: &str) -> Result<DerivationFile, FormatError> {
    let mut lines = Lines::new(text);
    let (n, first) = lines
        .peek()
        .ok_or_else(|| err(1, "empty derivation file"))?;
    let Some(sig_text) = field(first, "sig") else {
        return Err(err(n, "expected a 'sig:' line first"));
    };
    let signature =
        parse_signature(sig_text).map_err(|e| err(n, format!("bad signature: {e}")))?;
    lines.next();
    let derivation = parse_block(&mut lines, &signature)?;
    if let Some((n, extra)) = lines.peek() {
        return Err(err(n, format!("unexpected content after the root block: '{extra}'")));
    }
    Ok(DerivationFile {
        signature,
        derivation,
    })
}

fn parse_block(lines: &mut Lines, sig: &Signature) -> Result<Derivation, FormatError> {
    let (n, line) = lines
        .next()
        .ok_or_else(|| err(lines.last_line(), "expected 'rule:'"))?;
    let Some(tag_text) = field(line, "rule") else {
        return Err(err(n, format!("expected 'rule:', found '{line}'")));
    };
    let tag = parse_tag(tag_text)
        .ok_or_else(|| err(n, format!("unknown rule or axiom tag '{tag_text}'")))?;

    let (n, line) = lines
        .next()
        .ok_or_else(|| err(lines.last_line(), "expected 'conclusion:'"))?;
    let Some(concl_text) = field(line, "conclusion") else {
        return Err(err(n, format!("expected 'conclusion:', found '{line}'")));
    };
    let conclusion =
        parse_sequent(concl_text, sig).map_err(|e| err(n, format!("bad conclusion: {e}")))?;

    let mut data = InstData::default();
    if let Some((n, line)) = lines.peek() {
        if let Some(with_text) = field(line, "with") {
            data = parse_inst_data(with_text, sig, n)?;
            lines.next();
        }
    }

    let mut premises = Vec::new();
    loop {
        let (n, line) = lines
            .peek()
            .ok_or_else(|| err(lines.last_line(), "unterminated block: expected 'end'"))?;
        if line == "end" {
            lines.next();
            break;
        }
        if line == "premise:" || line == "premise" {
            lines.next();
            premises.push(parse_block(lines, sig)?);
        } else {
            return Err(err(n, format!("expected 'premise:' or 'end', found '{line}'")));
        }
    }

    let justification = match tag {
        Tag::Axiom(t) => {
            if !premises.is_empty() {
                return Err(err(n, format!("axiom {t} takes no premises")));
            }
            Justification::Axiom(t, data)
        }
        Tag::Rule(t) => Justification::Rule(t, data, premises),
    };
    Ok(Derivation {
        conclusion,
        justification,
    })
}

fn parse_var_names(text: &str, line: usize) -> Result<Vec<VarName>, FormatError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            let part = part.trim();
            let ok = !part.is_empty()
                && part.chars().next().unwrap().is_ascii_alphabetic()
                && part.chars().all(|c| c.is_ascii_alphanumeric());
            if ok {
                Ok(VarName::new(part))
            } else {
                Err(err(line, format!("bad variable name '{part}'")))
            }
        })
        .collect()
}

fn parse_inst_data(text: &str, sig: &Signature, line: usize) -> Result<InstData, FormatError> {
    let mut data = InstData::default();
    for binding in text.split(';') {
        let binding = binding.trim();
        if binding.is_empty() {
            continue;
        }
        let Some((key, value)) = binding.split_once('=') else {
            return Err(err(line, format!("bad binding '{binding}', expected 'key = value'")));
        };
        let key = key.trim();
        let value = value.trim();
        let parse_f = |value: &str| {
            parse_formula(value, sig).map_err(|e| err(line, format!("bad formula: {e}")))
        };
        match key {
            "A" => data.formula_a = Some(parse_f(value)?),
            "B" => data.formula_b = Some(parse_f(value)?),
            "C" => data.formula_c = Some(parse_f(value)?),
            "xs" => data.vars_x = Some(parse_var_names(value, line)?),
            "ys" => data.vars_y = Some(parse_var_names(value, line)?),
            "x" => {
                let mut names = parse_var_names(value, line)?;
                if names.len() != 1 {
                    return Err(err(line, "binding 'x' takes exactly one variable"));
                }
                data.var = Some(names.remove(0));
            }
            other => return Err(err(line, format!("unknown binding key '{other}'"))),
        }
    }
    Ok(data)
}

fn parse_nat(text: &str, line: usize) -> Result<Nat, FormatError> {
    let text = text.trim();
    if text.is_empty() || !text.chars().all(|c| c.is_ascii_digit()) {
        return Err(err(line, format!("expected a natural number, found '{text}'")));
    }
    Ok(text.parse().expect("digits"))
}

/// Parses `[a, b, c]` (possibly empty).
fn parse_nat_list(text: &str, line: usize) -> Result<Vec<Nat>, FormatError> {
    let text = text.trim();
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| err(line, format!("expected '[..]', found '{text}'")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|p| parse_nat(p, line)).collect()
}

/// Parses `(a, b, c)` (possibly empty).
fn parse_nat_tuple(text: &str, line: usize) -> Result<Vec<Nat>, FormatError> {
    let text = text.trim();
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| err(line, format!("expected '(..)', found '{text}'")))?;
    let inner = inner.trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|p| parse_nat(p, line)).collect()
}

/// Reads an evaluation file.
pub fn parse_evaluation_file(text: &str) -> Result<EvaluationFile, FormatError> {
    let mut lines = Lines::new(text);
    let (n, first) = lines.next().ok_or_else(|| err(1, "empty evaluation file"))?;
    let Some(sig_text) = field(first, "sig") else {
        return Err(err(n, "expected a 'sig:' line first"));
    };
    let signature =
        parse_signature(sig_text).map_err(|e| err(n, format!("bad signature: {e}")))?;

    let (n, second) = lines
        .next()
        .ok_or_else(|| err(lines.last_line(), "expected a 'domain:' line"))?;
    let Some(domain_text) = field(second, "domain") else {
        return Err(err(n, "expected a 'domain:' line after the signature"));
    };
    let domain: BTreeSet<Nat> = parse_nat_list(domain_text, n)?.into_iter().collect();
    let mut evaluation = Evaluation::new(domain);

    while let Some((n, line)) = lines.next() {
        let Some((name, table_text)) = line.split_once(':') else {
            return Err(err(n, format!("expected 'P: {{..}}', found '{line}'")));
        };
        let pred = PredName::new(name.trim());
        let Some(arity) = signature.arity(&pred) else {
            return Err(err(n, format!("predicate '{pred}' is not declared in the signature")));
        };
        let table = parse_pred_table(table_text.trim(), arity, &evaluation, n)?;
        evaluation.preds.insert(pred, table);
    }
    Ok(EvaluationFile {
        signature,
        evaluation,
    })
}

fn parse_pred_table(
    text: &str,
    arity: usize,
    evaluation: &Evaluation,
    line: usize,
) -> Result<PredTable, FormatError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| err(line, format!("expected '{{..}}', found '{text}'")))?;
    let mut table = PredTable::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let close = rest
            .find(')')
            .ok_or_else(|| err(line, "expected '(args): [realizers]'"))?;
        let tuple = parse_nat_tuple(&rest[..=close], line)?;
        if tuple.len() != arity {
            return Err(err(
                line,
                format!("tuple has {} value(s), predicate arity is {arity}", tuple.len()),
            ));
        }
        for v in &tuple {
            if !evaluation.domain.contains(v) {
                return Err(err(line, format!("tuple value {v} lies outside the domain")));
            }
        }
        rest = rest[close + 1..].trim_start();
        rest = rest
            .strip_prefix(':')
            .ok_or_else(|| err(line, "expected ':' after the tuple"))?
            .trim_start();
        let close = rest
            .find(']')
            .ok_or_else(|| err(line, "expected '[realizers]'"))?;
        let realizers: BTreeSet<Nat> = parse_nat_list(&rest[..=close], line)?.into_iter().collect();
        table.insert(tuple, realizers);
        rest = rest[close + 1..].trim_start();
        rest = rest.strip_prefix([';', ',']).unwrap_or(rest).trim_start();
    }
    Ok(table)
}

/// Reads a witness file: one `witness: <path> @ (values) -> [realizers]`
/// per line.
pub fn parse_witness_file(text: &str) -> Result<WitnessMap, FormatError> {
    let mut map = WitnessMap::new();
    let mut lines = Lines::new(text);
    while let Some((n, line)) = lines.next() {
        let Some(body) = field(line, "witness") else {
            return Err(err(n, format!("expected 'witness:', found '{line}'")));
        };
        let Some((pos, rhs)) = body.split_once("->") else {
            return Err(err(n, "expected '->' in the witness entry"));
        };
        let Some((path_text, tuple_text)) = pos.split_once('@') else {
            return Err(err(n, "expected '<path> @ (values)'"));
        };
        let path = parse_path(path_text)
            .ok_or_else(|| err(n, format!("bad path '{}'", path_text.trim())))?;
        let values = parse_nat_tuple(tuple_text, n)?;
        let realizers: BTreeSet<Nat> = parse_nat_list(rhs, n)?.into_iter().collect();
        map.insert((path, values), realizers);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_derivation, AxiomTag, RuleTag};
    use crate::nat;
    use crate::semantics::FormulaPath;

    #[test]
    fn derivation_file_roundtrip() {
        let text = "\
# conjunction swap
sig: P/0, Q/0
rule: R2
conclusion: P & Q => Q & P
with: A = P & Q; B = Q; C = P
premise:
  rule: R3b
  conclusion: P & Q => Q
  with: A = P & Q; B = P; C = Q
  premise:
    rule: A1
    conclusion: P & Q => P & Q
    with: A = P & Q
  end
end
premise:
  rule: R3a
  conclusion: P & Q => P
  with: A = P & Q; B = P; C = Q
  premise:
    rule: A1
    conclusion: P & Q => P & Q
    with: A = P & Q
  end
end
end
";
        let file = parse_derivation_file(text).unwrap();
        assert!(check_derivation(&file.derivation).ok());
        assert_eq!(file.derivation.node_count(), 5);
        match &file.derivation.justification {
            Justification::Rule(RuleTag::R2, _, premises) => {
                assert_eq!(premises.len(), 2);
                assert!(matches!(
                    premises[0].justification,
                    Justification::Rule(RuleTag::R3b, _, _)
                ));
            }
            other => panic!("unexpected root: {other:?}"),
        }
    }

    #[test]
    fn derivation_file_errors_carry_lines() {
        let text = "sig: P/0\nrule: A1\nwith: A = P\nend\n";
        let e = parse_derivation_file(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("conclusion"));

        let text = "sig: P/0\nrule: A0\nconclusion: P => P\nend\n";
        let e = parse_derivation_file(text).unwrap_err();
        assert!(e.message.contains("A0"));
    }

    #[test]
    fn axiom_with_premises_is_rejected() {
        let text = "\
sig: P/0
rule: A1
conclusion: P => P
with: A = P
premise:
  rule: A1
  conclusion: P => P
  with: A = P
end
end
";
        let e = parse_derivation_file(text).unwrap_err();
        assert!(e.message.contains("no premises"));
    }

    #[test]
    fn evaluation_file_basic() {
        let text = "\
sig: P/1, Q/2, R/0
domain: [0, 1, 2]
P: {(0): [1, 2]; (1): []}
Q: {(0, 1): [3], (2, 2): [0, 4]}
R: {(): [7]}
";
        let file = parse_evaluation_file(text).unwrap();
        let ev = &file.evaluation;
        assert_eq!(ev.domain.len(), 3);
        let p = &ev.preds[&PredName::from("P")];
        assert_eq!(
            p.get(&[nat(0)]).unwrap(),
            &BTreeSet::from([nat(1), nat(2)])
        );
        assert_eq!(p.get(&[nat(1)]).unwrap(), &BTreeSet::new());
        assert!(p.get(&[nat(2)]).is_none());
        let q = &ev.preds[&PredName::from("Q")];
        assert_eq!(q.get(&[nat(2), nat(2)]).unwrap().len(), 2);
        let r = &ev.preds[&PredName::from("R")];
        assert_eq!(r.get(&[]).unwrap(), &BTreeSet::from([nat(7)]));
    }

    #[test]
    fn evaluation_file_rejects_bad_rows() {
        let outside = "sig: P/1\ndomain: [0]\nP: {(3): [1]}\n";
        assert!(parse_evaluation_file(outside).unwrap_err().message.contains("outside"));
        let arity = "sig: P/1\ndomain: [0]\nP: {(0, 0): [1]}\n";
        assert!(parse_evaluation_file(arity).unwrap_err().message.contains("arity"));
        let undeclared = "sig: P/1\ndomain: [0]\nZ: {(0): [1]}\n";
        assert!(parse_evaluation_file(undeclared)
            .unwrap_err()
            .message
            .contains("not declared"));
    }

    #[test]
    fn witness_file_basic() {
        let text = "\
witness: . @ (1, 2) -> [5, 9]
witness: ant.left @ () -> [3]
";
        let map = parse_witness_file(text).unwrap();
        assert_eq!(
            map[&(FormulaPath::default(), vec![nat(1), nat(2)])],
            BTreeSet::from([nat(5), nat(9)])
        );
        assert_eq!(map.len(), 2);
    }
}
