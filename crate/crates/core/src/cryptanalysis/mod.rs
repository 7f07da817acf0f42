//! Attacks: frequency statistics, substitution breaking, keystream reuse,
//! the Geffe correlation attack, Berlekamp-Massey and replay detection.

pub mod bm;
pub mod correlation;
pub mod mono;
pub mod quadgram;
pub mod replay;
pub mod report;
pub mod reuse;
pub mod stats;

use std::collections::HashSet;

pub use bm::{berlekamp_massey, LinearComplexity};
pub use correlation::{correlation_attack_geffe, CorrelationInput, CorrelationOptions, CorrelationOutcome};
pub use mono::{break_monoalphabetic, HillClimbBudget, MonoBreak};
pub use quadgram::{QuadgramCounts, QuadgramModel};
pub use replay::{detect_replay, payload_digest, ReplayFlag, ReplayReason};
pub use report::{char_accuracy, AttackReport, AttackStatus};
pub use reuse::{keystream_reuse_attack, CribCandidate, ReuseOutcome};
pub use stats::{chi_squared, index_of_coincidence, letter_frequency, FrequencyProfile, StatsError};

/// Reference statistics an attacker uses to recognize English.
#[derive(Debug, Clone)]
pub struct LanguageModel {
    pub profile: FrequencyProfile,
    pub quadgrams: QuadgramModel,
    pub wordlist: HashSet<String>,
}

impl LanguageModel {
    pub fn new(profile: FrequencyProfile, quadgrams: QuadgramModel, wordlist: &str) -> Self {
        LanguageModel {
            profile,
            quadgrams,
            wordlist: wordlist
                .lines()
                .map(|w| w.trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// Fraction of whitespace tokens whose word (punctuation stripped,
    /// case folded) is in the wordlist. Tokens without letters are skipped.
    pub fn dictionary_hit_rate(&self, text: &str) -> f64 {
        let (mut hits, mut total) = (0usize, 0usize);
        for token in text.split_whitespace() {
            let word = word_core(token);
            if word.is_empty() {
                continue;
            }
            total += 1;
            hits += self.wordlist.contains(&word.to_lowercase()) as usize;
        }
        if total == 0 {
            0.0
        } else {
            hits as f64 / total as f64
        }
    }
}

/// Token with leading and trailing non-alphanumeric characters removed.
pub fn word_core(token: &str) -> &str {
    token.trim_matches(|c: char| !c.is_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictionary_hits() {
        let m = LanguageModel::new(FrequencyProfile::uniform(), QuadgramModel::from_text(""), "the\ncat\nsat\n");
        assert_eq!(m.dictionary_hit_rate("The cat, sat!"), 1.0);
        assert_eq!(m.dictionary_hit_rate("the dog -- sat"), 2.0 / 3.0);
        assert_eq!(m.dictionary_hit_rate(""), 0.0);
        assert_eq!(word_core("\"don't,\""), "don't");
    }
}
