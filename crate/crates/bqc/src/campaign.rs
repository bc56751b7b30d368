//! Randomized soundness validation: extract a realizer from every proof in a
//! corpus and check it against seeded random finite evaluations over at
//! least two admissible lists.
//!
//! All randomness is derived from one user seed plus stable per-proof,
//! per-list, per-trial mixing, so a run is reproducible regardless of
//! traversal order.

use crate::calculus::check_derivation;
use crate::extraction::{extract, minimal_list};
use crate::formats::{parse_derivation_file, DerivationFile};
use crate::numbering::Nat;
use crate::semantics::{check_sequent, exactly_enumerable, Evaluation, PredTable, Verdict};
use crate::syntax::{Formula, Sequent, Signature, VarList, VarName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

/// Knobs of a validation run.
#[derive(Clone, Copy, Debug)]
pub struct CampaignConfig {
    pub trials: u64,
    pub seed: u64,
    pub bound: u64,
    pub fuel: u64,
}

impl Default for CampaignConfig {
    fn default() -> CampaignConfig {
        CampaignConfig {
            trials: 50,
            seed: 0,
            bound: 16,
            fuel: 100_000_000,
        }
    }
}

/// Per-proof tally of a campaign.
#[derive(Clone, Debug)]
pub struct ProofSummary {
    pub name: String,
    pub nodes: usize,
    pub lists: usize,
    pub trials_per_list: u64,
    pub holds: u64,
    pub unknown: u64,
    pub fails: u64,
    /// True when every implication antecedent in the checked formula is
    /// exactly enumerable, so no Unknown verdict is possible.
    pub exact_expected: bool,
    pub failures: Vec<String>,
}

/// Outcome of a whole campaign, ordered by proof name.
#[derive(Clone, Debug, Default)]
pub struct CampaignOutcome {
    pub proofs: Vec<ProofSummary>,
}

impl CampaignOutcome {
    pub fn total_fails(&self) -> u64 {
        self.proofs.iter().map(|p| p.fails).sum()
    }

    pub fn total_unknown(&self) -> u64 {
        self.proofs.iter().map(|p| p.unknown).sum()
    }

    /// Zero Fails everywhere and zero Unknown wherever exactness is
    /// expected.
    pub fn sound(&self) -> bool {
        self.proofs
            .iter()
            .all(|p| p.fails == 0 && (!p.exact_expected || p.unknown == 0))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{path}: {message}")]
    Proof { path: PathBuf, message: String },
}

impl fmt::Display for ProofSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: nodes {}, lists {}, trials {}, holds {}, unknown {}, fails {}",
            self.name,
            self.nodes,
            self.lists,
            self.trials_per_list,
            self.holds,
            self.unknown,
            self.fails
        )
    }
}

fn fnv1a(text: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in text.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stable per-(proof, list, trial) seed.
pub fn trial_seed(seed: u64, proof: &str, list_idx: usize, trial: u64) -> u64 {
    seed ^ fnv1a(proof)
        ^ (list_idx as u64).wrapping_mul(0x9e3779b97f4a7c15)
        ^ trial.wrapping_mul(0xd1b54a32d192ed03)
}

/// A seeded random finite evaluation for the signature: domain of size 1..=4
/// drawn from 0..8, realizer sets of size 0..=4 with values below 32.
pub fn random_evaluation(rng: &mut impl Rng, sig: &Signature) -> Evaluation {
    let size = rng.gen_range(1..=4usize);
    let mut domain: BTreeSet<Nat> = BTreeSet::new();
    while domain.len() < size {
        domain.insert(Nat::from(rng.gen_range(0..8u64)));
    }
    let mut ev = Evaluation::new(domain.clone());
    let elements: Vec<Nat> = domain.into_iter().collect();
    for (pred, arity) in sig.iter() {
        let mut table = PredTable::new();
        for tuple in tuples(&elements, arity) {
            let mut set = BTreeSet::new();
            for _ in 0..rng.gen_range(0..=4usize) {
                set.insert(Nat::from(rng.gen_range(0..32u64)));
            }
            table.insert(tuple, set);
        }
        ev.preds.insert(pred.clone(), table);
    }
    ev
}

fn tuples(elements: &[Nat], arity: usize) -> Vec<Vec<Nat>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * elements.len());
        for prefix in &out {
            for e in elements {
                let mut t = prefix.clone();
                t.push(e.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Two distinct admissible lists for a sequent: the minimal one, plus its
/// reversal (or a one-longer list with a fresh variable when the minimal
/// list is too short to reorder).
pub fn admissible_lists(s: &Sequent) -> Vec<VarList> {
    let minimal = minimal_list(s);
    let variant = if minimal.len() >= 2 {
        let mut vars = minimal.vars().to_vec();
        vars.reverse();
        VarList::new(vars).expect("reversal keeps distinctness")
    } else {
        let mut all: BTreeSet<VarName> = s.lhs.all_vars();
        all.extend(s.rhs.all_vars());
        let mut i = 0u64;
        let fresh = loop {
            let cand = if i == 0 {
                VarName::new("w")
            } else {
                VarName::new(format!("w{i}"))
            };
            if !all.contains(&cand) && !minimal.contains(&cand) {
                break cand;
            }
            i += 1;
        };
        let mut vars = minimal.vars().to_vec();
        vars.push(fresh);
        VarList::new(vars).expect("fresh variable")
    };
    vec![minimal, variant]
}

/// True when checking the sequent over the list can never report Unknown:
/// every implication antecedent position is exactly enumerable.
pub fn expects_exact(s: &Sequent, rs: &VarList) -> bool {
    let formula = Formula::all_imp(rs.vars().to_vec(), s.lhs.clone(), s.rhs.clone());
    antecedents_enumerable(&formula)
}

fn antecedents_enumerable(f: &Formula) -> bool {
    match f {
        Formula::Bot | Formula::Top | Formula::Atom(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) => {
            antecedents_enumerable(a) && antecedents_enumerable(b)
        }
        Formula::Exists(_, body) => antecedents_enumerable(body),
        Formula::AllImp(_, ant, cons) => {
            exactly_enumerable(ant) && antecedents_enumerable(cons)
        }
    }
}

/// Loads every `*.bqc` file directly inside `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<(String, DerivationFile)>, CampaignError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "bqc"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let file = parse_derivation_file(&text).map_err(|e| CampaignError::Proof {
            path: path.clone(),
            message: e.to_string(),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.push((name, file));
    }
    Ok(out)
}

/// Validates one proof: extract over each admissible list and check against
/// `trials` random evaluations per list.
pub fn validate_proof(
    name: &str,
    file: &DerivationFile,
    config: &CampaignConfig,
) -> Result<ProofSummary, CampaignError> {
    let derivation = &file.derivation;
    let report = check_derivation(derivation);
    if !report.ok() {
        return Err(CampaignError::Proof {
            path: PathBuf::from(name),
            message: format!("derivation does not check: {report}"),
        });
    }
    let lists = admissible_lists(&derivation.conclusion);
    let exact_expected = lists
        .iter()
        .all(|l| expects_exact(&derivation.conclusion, l));
    let mut summary = ProofSummary {
        name: name.to_string(),
        nodes: derivation.node_count(),
        lists: lists.len(),
        trials_per_list: config.trials,
        holds: 0,
        unknown: 0,
        fails: 0,
        exact_expected,
        failures: Vec::new(),
    };
    for (list_idx, list) in lists.iter().enumerate() {
        let index = extract(derivation, list).map_err(|e| CampaignError::Proof {
            path: PathBuf::from(name),
            message: format!("extraction failed: {e}"),
        })?;
        for trial in 0..config.trials {
            let seed = trial_seed(config.seed, name, list_idx, trial);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ev = random_evaluation(&mut rng, &file.signature);
            let verdict = check_sequent(
                index.code(),
                &derivation.conclusion,
                list,
                &ev,
                config.bound,
                config.fuel,
            )
            .map_err(|e| CampaignError::Proof {
                path: PathBuf::from(name),
                message: format!("checker error: {e}"),
            })?;
            match verdict {
                Verdict::Holds => summary.holds += 1,
                Verdict::Unknown(_) => summary.unknown += 1,
                Verdict::Fails(trace) => {
                    summary.fails += 1;
                    if summary.failures.len() < 3 {
                        summary.failures.push(format!(
                            "proof {name}, list ({}), trial {trial} (seed {seed}): {trace}",
                            list
                        ));
                    }
                }
            }
        }
    }
    Ok(summary)
}

/// Runs the whole campaign over a corpus directory.
pub fn validate_corpus(
    dir: &Path,
    config: &CampaignConfig,
) -> Result<CampaignOutcome, CampaignError> {
    let corpus = load_corpus(dir)?;
    let mut outcome = CampaignOutcome::default();
    for (name, file) in &corpus {
        outcome.proofs.push(validate_proof(name, file, config)?);
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_sequent, parse_signature};

    #[test]
    fn random_evaluations_are_reproducible() {
        let sig = parse_signature("P/1, Q/2").unwrap();
        let mut rng1 = ChaCha8Rng::seed_from_u64(42);
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        assert_eq!(
            random_evaluation(&mut rng1, &sig),
            random_evaluation(&mut rng2, &sig)
        );
    }

    #[test]
    fn random_evaluation_respects_limits() {
        let sig = parse_signature("P/1").unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ev = random_evaluation(&mut rng, &sig);
            assert!((1..=4).contains(&ev.domain.len()));
            for (_, table) in &ev.preds {
                for (tuple, set) in table.rows() {
                    assert!(tuple.iter().all(|v| ev.domain.contains(v)));
                    assert!(set.len() <= 4);
                    assert!(set.iter().all(|v| *v < Nat::from(32u32)));
                }
            }
        }
    }

    #[test]
    fn admissible_lists_are_distinct_and_admissible() {
        let sig = parse_signature("P/1, Q/2").unwrap();
        for text in ["P(x) => Q(x,y)", "P(x) => P(x)", "ex x P(x) => top"] {
            let s = parse_sequent(text, &sig).unwrap();
            let lists = admissible_lists(&s);
            assert_eq!(lists.len(), 2);
            assert_ne!(lists[0], lists[1]);
            for l in lists {
                assert!(l.is_admissible_for(&s));
            }
        }
    }

    #[test]
    fn exactness_prediction() {
        let sig = parse_signature("P/1, Q/1, R/0").unwrap();
        let s = parse_sequent("P(x) => Q(x)", &sig).unwrap();
        let lists = admissible_lists(&s);
        assert!(expects_exact(&s, &lists[0]));
        let s = parse_sequent("top => R", &sig).unwrap();
        assert!(!expects_exact(&s, &VarList::empty()));
        let s = parse_sequent("P(x) => all y (Q(y) -> Q(y))", &sig).unwrap();
        let lists = admissible_lists(&s);
        assert!(expects_exact(&s, &lists[0]));
        let s = parse_sequent("(R -> R) => R", &sig).unwrap();
        assert!(!expects_exact(&s, &VarList::empty()));
    }
}
