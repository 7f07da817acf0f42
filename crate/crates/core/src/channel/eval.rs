//! Side-by-side substitution attacks on plain English and on text passed
//! through the language-mixing layer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cipher::{mono_substitute, CharMap, SubstitutionAlphabet, UnmappedPolicy};
use crate::cryptanalysis::stats::count_letters;
use crate::cryptanalysis::{break_monoalphabetic, char_accuracy, HillClimbBudget, LanguageModel};
use crate::nl::{translate_mix, Direction, MixLexicon};

pub const MIN_SENTENCES: usize = 20;
pub const MIN_TRIALS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("corpus has {0} sentences; at least {MIN_SENTENCES} are needed")]
    CorpusTooSmall(usize),
    #[error("{0} trials requested; at least {MIN_TRIALS} are needed")]
    TooFewTrials(usize),
    #[error("corpus has no letters")]
    NoLetters,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalOptions {
    pub trials: usize,
    pub seed: u64,
    /// Each trial samples consecutive sentences until this many letters.
    pub letters_per_trial: usize,
    pub budget: HillClimbBudget,
    /// Names used in the reproduction command.
    pub lexicon_label: String,
    pub charmap_label: Option<String>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            trials: MIN_TRIALS,
            seed: 7,
            letters_per_trial: 800,
            budget: HillClimbBudget {
                restarts: 20,
                max_stale: 1000,
            },
            lexicon_label: "spanglish.json".into(),
            charmap_label: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmResult {
    pub accuracy: f64,
    pub dict_hit_rate: f64,
    pub letters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialPair {
    pub trial: usize,
    pub first_sentence: usize,
    pub plain: ArmResult,
    pub mixed: ArmResult,
    /// Fraction of tokens the lexicon translated.
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSummary {
    pub median_accuracy: f64,
    pub median_dict_hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub options: EvalOptions,
    pub lexicon_entries: usize,
    pub charmap_pairs: usize,
    pub median_coverage: f64,
    pub plain: ArmSummary,
    pub mixed: ArmSummary,
    /// Plain minus mixed.
    pub accuracy_difference: f64,
    pub dict_hit_difference: f64,
    pub reproduce: String,
    pub trials: Vec<TrialPair>,
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Seed of trial `i`: independent of thread scheduling.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial as u64)
}

fn sample_text(corpus: &[String], start: usize, letters: usize) -> String {
    let mut text = String::new();
    let mut n = 0;
    let mut i = start;
    while n < letters {
        let s = &corpus[i % corpus.len()];
        if !text.is_empty() {
            text.push(' ');
        }
        text.push_str(s);
        n += count_letters(s);
        i += 1;
    }
    text
}

fn attack_arm(text: &str, key: &SubstitutionAlphabet, model: &LanguageModel, opts: &EvalOptions, seed: u64) -> ArmResult {
    let ct = mono_substitute(text, key);
    let found = break_monoalphabetic(&ct, &model.profile, &model.quadgrams, opts.budget, seed);
    ArmResult {
        accuracy: char_accuracy(&found.plaintext, text),
        dict_hit_rate: model.dictionary_hit_rate(&found.plaintext),
        letters: found.letters,
    }
}

pub fn evaluate_nl_layer(
    corpus: &[String],
    lexicon: &MixLexicon,
    charmap: Option<&CharMap>,
    model: &LanguageModel,
    opts: &EvalOptions,
) -> Result<ComparisonReport, EvalError> {
    if corpus.len() < MIN_SENTENCES {
        return Err(EvalError::CorpusTooSmall(corpus.len()));
    }
    if opts.trials < MIN_TRIALS {
        return Err(EvalError::TooFewTrials(opts.trials));
    }
    if corpus.iter().all(|s| count_letters(s) == 0) {
        return Err(EvalError::NoLetters);
    }
    let trials: Vec<TrialPair> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(opts.seed, trial));
            let first_sentence = rng.gen_range(0..corpus.len());
            let plain = sample_text(corpus, first_sentence, opts.letters_per_trial);
            let mut mixed = translate_mix(&plain, lexicon, Direction::Forward).0;
            if let Some(map) = charmap {
                mixed = map
                    .apply(&mixed, UnmappedPolicy::Passthrough)
                    .expect("passthrough never fails");
            }
            let key = SubstitutionAlphabet::random(&mut rng);
            let attack_seed = rng.gen();
            TrialPair {
                trial,
                first_sentence,
                coverage: lexicon.coverage(&plain),
                plain: attack_arm(&plain, &key, model, opts, attack_seed),
                mixed: attack_arm(&mixed, &key, model, opts, attack_seed),
            }
        })
        .collect();

    let summary = |arm: fn(&TrialPair) -> &ArmResult| ArmSummary {
        median_accuracy: median(&trials.iter().map(|t| arm(t).accuracy).collect::<Vec<_>>()),
        median_dict_hit_rate: median(&trials.iter().map(|t| arm(t).dict_hit_rate).collect::<Vec<_>>()),
    };
    let plain = summary(|t| &t.plain);
    let mixed = summary(|t| &t.mixed);
    let mut reproduce = format!(
        "cipherlab evaluate --lexicon {} --trials {} --seed {} --letters {} --restarts {} --max-stale {}",
        opts.lexicon_label,
        opts.trials,
        opts.seed,
        opts.letters_per_trial,
        opts.budget.restarts,
        opts.budget.max_stale
    );
    if let Some(c) = &opts.charmap_label {
        reproduce.push_str(&format!(" --charmap {c}"));
    }
    Ok(ComparisonReport {
        options: opts.clone(),
        lexicon_entries: lexicon.len(),
        charmap_pairs: charmap.map_or(0, CharMap::len),
        median_coverage: median(&trials.iter().map(|t| t.coverage).collect::<Vec<_>>()),
        accuracy_difference: plain.median_accuracy - mixed.median_accuracy,
        dict_hit_difference: plain.median_dict_hit_rate - mixed.median_dict_hit_rate,
        plain,
        mixed,
        reproduce,
        trials,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "trials {}  seed {}  letters/trial {}  lexicon entries {}  charmap pairs {}  median coverage {:.3}\n",
            self.options.trials,
            self.options.seed,
            self.options.letters_per_trial,
            self.lexicon_entries,
            self.charmap_pairs,
            self.median_coverage
        ));
        out.push_str("arm     median accuracy  median dict-hit\n");
        out.push_str(&format!(
            "plain   {:>15.3}  {:>15.3}\n",
            self.plain.median_accuracy, self.plain.median_dict_hit_rate
        ));
        out.push_str(&format!(
            "mixed   {:>15.3}  {:>15.3}\n",
            self.mixed.median_accuracy, self.mixed.median_dict_hit_rate
        ));
        out.push_str(&format!(
            "diff    {:>15.3}  {:>15.3}\n",
            self.accuracy_difference, self.dict_hit_difference
        ));
        out.push_str(&format!("reproduce: {}\n", self.reproduce));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{bundled, bundled_model, sentences, SPANGLISH};

    fn quick() -> EvalOptions {
        EvalOptions {
            letters_per_trial: 400,
            budget: HillClimbBudget {
                restarts: 4,
                max_stale: 600,
            },
            ..Default::default()
        }
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn preconditions() {
        let corpus: Vec<String> = (0..5).map(|i| format!("sentence {i}.")).collect();
        let lex = MixLexicon::default();
        let m = bundled_model();
        assert_eq!(
            evaluate_nl_layer(&corpus, &lex, None, m, &quick()),
            Err(EvalError::CorpusTooSmall(5))
        );
        let corpus = sentences(bundled().heldout());
        let opts = EvalOptions { trials: 3, ..quick() };
        assert_eq!(
            evaluate_nl_layer(&corpus, &lex, None, m, &opts),
            Err(EvalError::TooFewTrials(3))
        );
    }

    #[test]
    fn empty_lexicon_gives_equal_arms_and_is_deterministic() {
        let corpus = sentences(bundled().heldout());
        let lex = MixLexicon::default();
        let a = evaluate_nl_layer(&corpus, &lex, None, bundled_model(), &quick()).unwrap();
        assert_eq!(a.plain, a.mixed);
        assert_eq!(a.dict_hit_difference, 0.0);
        let b = evaluate_nl_layer(&corpus, &lex, None, bundled_model(), &quick()).unwrap();
        assert_eq!(a, b);
        assert!(a.render_table().contains("reproduce: cipherlab evaluate"));
    }

    #[test]
    fn spanglish_lowers_dictionary_hits() {
        let corpus = sentences(bundled().heldout());
        let lex = bundled().lexicon(SPANGLISH).unwrap();
        let r = evaluate_nl_layer(&corpus, &lex, None, bundled_model(), &quick()).unwrap();
        assert!(r.median_coverage >= 0.30);
        assert!(r.mixed.median_dict_hit_rate < r.plain.median_dict_hit_rate);
    }
}
