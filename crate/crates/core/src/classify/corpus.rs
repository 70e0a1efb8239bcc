//! Seeded random corpora of reduced words and conjugacy classes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subgroups::SubgroupSystem;
use crate::words::{CyclicWord, Letter, ReducedWord};

/// Attempts allowed per requested word before giving up.
pub const RETRIES_PER_WORD: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            seed: 1,
            count: 40,
            min_len: 2,
            max_len: 10,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Constraints<'a> {
    pub cyclically_reduced: bool,
    pub not_carried_by: Option<&'a SubgroupSystem>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub attempts: usize,
    pub rejected_not_cyclically_reduced: usize,
    pub rejected_carried: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("empty length range {0}..={1}")]
    EmptyRange(usize, usize),
    #[error("constraints unsatisfiable within {0} attempts")]
    Exhausted(usize),
}

/// A uniformly random reduced word of length `n`.
pub fn random_reduced(rng: &mut ChaCha8Rng, rank: usize, n: usize) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    while letters.len() < n {
        let l = Letter::from_code(rng.gen_range(0..2 * rank));
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    ReducedWord::from_letters(letters)
}

pub fn corpus_generate(
    rank: usize,
    spec: &CorpusSpec,
    constraints: &Constraints<'_>,
) -> Result<(Vec<ReducedWord>, GenerationLog), CorpusError> {
    if spec.min_len > spec.max_len || spec.max_len == 0 {
        return Err(CorpusError::EmptyRange(spec.min_len, spec.max_len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut log = GenerationLog::default();
    let budget = spec.count * RETRIES_PER_WORD;
    let mut out = Vec::with_capacity(spec.count);
    while out.len() < spec.count {
        if log.attempts >= budget {
            return Err(CorpusError::Exhausted(budget));
        }
        log.attempts += 1;
        let n = rng.gen_range(spec.min_len.max(1)..=spec.max_len);
        let w = random_reduced(&mut rng, rank, n);
        if constraints.cyclically_reduced && !w.is_cyclically_reduced() {
            log.rejected_not_cyclically_reduced += 1;
            continue;
        }
        if let Some(s) = constraints.not_carried_by {
            if s.carries_conjugacy_class(&CyclicWord::from_word(&w)) {
                log.rejected_carried += 1;
                continue;
            }
        }
        out.push(w);
    }
    Ok((out, log))
}

/// Cyclically reduced corpus read as conjugacy classes.
pub fn class_corpus(
    rank: usize,
    spec: &CorpusSpec,
    not_carried_by: Option<&SubgroupSystem>,
) -> Result<(Vec<CyclicWord>, GenerationLog), CorpusError> {
    let c = Constraints {
        cyclically_reduced: true,
        not_carried_by,
    };
    let (words, log) = corpus_generate(rank, spec, &c)?;
    Ok((words.iter().map(CyclicWord::from_word).collect(), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroups::FoldedImmersion;
    use crate::words::Basis;

    #[test]
    fn fixed_seed_snapshot() {
        let spec = CorpusSpec {
            seed: 1,
            count: 3,
            min_len: 2,
            max_len: 4,
        };
        let (w, log) = corpus_generate(2, &spec, &Constraints::default()).unwrap();
        let b = Basis::standard(2);
        let shown: Vec<String> = w.iter().map(|x| b.format(x)).collect();
        assert_eq!(shown, SNAPSHOT);
        assert_eq!(log.attempts, 3);
    }

    const SNAPSHOT: [&str; 3] = ["a b a'", "b' a a a", "b a'"];

    #[test]
    fn avoids_carried_classes() {
        let c = SubgroupSystem::new(vec![FoldedImmersion::from_generators(&[&[3]], 3).unwrap()]);
        let spec = CorpusSpec {
            seed: 7,
            count: 300,
            min_len: 1,
            max_len: 3,
        };
        let (classes, log) = class_corpus(3, &spec, Some(&c)).unwrap();
        assert!(log.rejected_carried > 0);
        assert!(classes
            .iter()
            .all(|k| k.letters().iter().any(|l| l.generator() != 3)));
    }

    #[test]
    fn empty_and_deterministic() {
        let spec = CorpusSpec {
            seed: 5,
            count: 0,
            min_len: 2,
            max_len: 4,
        };
        assert!(corpus_generate(2, &spec, &Constraints::default())
            .unwrap()
            .0
            .is_empty());
        let spec = CorpusSpec { count: 50, ..spec };
        let c = Constraints {
            cyclically_reduced: true,
            not_carried_by: None,
        };
        let a = corpus_generate(3, &spec, &c).unwrap();
        assert_eq!(a, corpus_generate(3, &spec, &c).unwrap());
        assert!(a
            .0
            .iter()
            .all(|w| w.is_cyclically_reduced() && (2..=4).contains(&w.len())));
    }

    #[test]
    fn unsatisfiable_is_reported() {
        let c = SubgroupSystem::new(vec![FoldedImmersion::from_generators(&[&[1]], 1).unwrap()]);
        let spec = CorpusSpec {
            seed: 1,
            count: 1,
            min_len: 1,
            max_len: 2,
        };
        assert_eq!(
            class_corpus(1, &spec, Some(&c)),
            Err(CorpusError::Exhausted(RETRIES_PER_WORD))
        );
        let spec = CorpusSpec {
            seed: 1,
            count: 1,
            min_len: 3,
            max_len: 2,
        };
        assert!(matches!(
            corpus_generate(1, &spec, &Constraints::default()),
            Err(CorpusError::EmptyRange(3, 2))
        ));
    }
}
