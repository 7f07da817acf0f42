//! Mono-alphabetic substitution breaking: frequency-rank start, then hill
//! climbing over key swaps scored by the quadgram model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::quadgram::{letter_indices, QuadgramModel};
use super::report::{AttackReport, AttackStatus};
use super::stats::{letter_counts, FrequencyProfile};
use crate::cipher::SubstitutionAlphabet;

/// Below this many letters the attack still runs but warns.
pub const MIN_MONO_LETTERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HillClimbBudget {
    pub restarts: usize,
    /// A climb stops after this many consecutive non-improving swaps.
    pub max_stale: usize,
}

impl Default for HillClimbBudget {
    fn default() -> Self {
        HillClimbBudget {
            restarts: 50,
            max_stale: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonoBreak {
    /// Maps ciphertext letters to recovered plaintext letters.
    pub decryption_key: SubstitutionAlphabet,
    pub plaintext: String,
    pub score: f64,
    pub letters: usize,
    pub restarts: usize,
    pub swaps_tried: u64,
    pub warning: Option<String>,
}

impl MonoBreak {
    /// Recovered encryption key, in the same form as a key passed to
    /// [`crate::cipher::mono_substitute`].
    pub fn encryption_key(&self) -> SubstitutionAlphabet {
        self.decryption_key.invert()
    }

    pub fn report(&self, truth: Option<&str>) -> AttackReport {
        let mut r = AttackReport::new("break-mono", AttackStatus::Ok)
            .detail("letters", self.letters)
            .detail("restarts", self.restarts)
            .detail("swaps_tried", self.swaps_tried);
        r.candidate = Some(self.plaintext.clone());
        r.key = Some(self.encryption_key().to_string());
        r.score = Some(self.score);
        r.warnings.extend(self.warning.clone());
        match truth {
            Some(t) => r.with_accuracy(&self.plaintext, t),
            None => r,
        }
    }
}

/// Decryption key aligning ciphertext letter ranks with reference ranks.
pub fn frequency_rank_key(ciphertext: &str, reference: &FrequencyProfile) -> [u8; 26] {
    let ct_profile = FrequencyProfile::from_weights(letter_counts(ciphertext).map(|c| c as f64 + 1e-9))
        .expect("positive weights");
    let ct_rank = ct_profile.rank_order();
    let ref_rank = reference.rank_order();
    let mut key = [0u8; 26];
    for (c, p) in ct_rank.iter().zip(ref_rank.iter()) {
        key[*c as usize] = *p;
    }
    key
}

fn score_key(ct: &[u8], key: &[u8; 26], model: &QuadgramModel, buf: &mut Vec<u8>) -> f64 {
    buf.clear();
    buf.extend(ct.iter().map(|&c| key[c as usize]));
    model.score_indices(buf)
}

fn climb(
    ct: &[u8],
    mut key: [u8; 26],
    model: &QuadgramModel,
    max_stale: usize,
    rng: &mut ChaCha8Rng,
    swaps: &mut u64,
) -> ([u8; 26], f64) {
    let mut buf = Vec::with_capacity(ct.len());
    let mut best = score_key(ct, &key, model, &mut buf);
    let mut stale = 0;
    while stale < max_stale {
        let a = rng.gen_range(0..26);
        let mut b = rng.gen_range(0..25);
        if b >= a {
            b += 1;
        }
        key.swap(a, b);
        *swaps += 1;
        let s = score_key(ct, &key, model, &mut buf);
        if s > best {
            best = s;
            stale = 0;
        } else {
            key.swap(a, b);
            stale += 1;
        }
    }
    (key, best)
}

pub fn break_monoalphabetic(
    ciphertext: &str,
    reference: &FrequencyProfile,
    model: &QuadgramModel,
    budget: HillClimbBudget,
    seed: u64,
) -> MonoBreak {
    let ct = letter_indices(ciphertext);
    let warning = (ct.len() < MIN_MONO_LETTERS).then(|| {
        format!(
            "only {} letters; results below {MIN_MONO_LETTERS} letters are unreliable",
            ct.len()
        )
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut swaps = 0u64;
    let start = frequency_rank_key(ciphertext, reference);
    let (mut best_key, mut best_score) = climb(&ct, start, model, budget.max_stale, &mut rng, &mut swaps);
    for _ in 1..budget.restarts.max(1) {
        let mut key: [u8; 26] = std::array::from_fn(|i| i as u8);
        rand::seq::SliceRandom::shuffle(&mut key[..], &mut rng);
        let (k, s) = climb(&ct, key, model, budget.max_stale, &mut rng, &mut swaps);
        if s > best_score {
            best_key = k;
            best_score = s;
        }
    }
    let decryption_key =
        SubstitutionAlphabet::from_indices(best_key).expect("swaps preserve the permutation");
    MonoBreak {
        plaintext: decryption_key.apply(ciphertext),
        decryption_key,
        score: best_score,
        letters: ct.len(),
        restarts: budget.restarts.max(1),
        swaps_tried: swaps,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::mono_substitute;
    use crate::cryptanalysis::report::char_accuracy;
    use crate::cryptanalysis::stats::letter_frequency;

    const TEXT: &str = "it was the best of times and the worst of times, the season of light \
        and the season of darkness, when everything seemed possible and nothing was certain. \
        we had everything before us and we had nothing before us, and the people who lived \
        through those years spoke of them with the same mixture of hope and fear that every \
        generation feels when it looks back on its youth and wonders how it ever survived.";

    fn model() -> (FrequencyProfile, QuadgramModel) {
        let corpus = crate::data::bundled().corpus();
        (letter_frequency(corpus).unwrap(), QuadgramModel::from_text(corpus))
    }

    #[test]
    fn rank_key_maps_most_common_letters() {
        let (profile, _) = model();
        let key = frequency_rank_key("xxxx yyy z", &profile);
        assert_eq!(key[(b'X' - b'A') as usize], profile.rank_order()[0]);
        assert_eq!(key[(b'Y' - b'A') as usize], profile.rank_order()[1]);
        let mut sorted = key;
        sorted.sort_unstable();
        assert_eq!(sorted, std::array::from_fn(|i| i as u8));
    }

    #[test]
    fn identity_key_recovers_ciphertext() {
        let (profile, quad) = model();
        let found = break_monoalphabetic(TEXT, &profile, &quad, HillClimbBudget { restarts: 8, max_stale: 1500 }, 1);
        assert_eq!(found.plaintext, TEXT);
        assert_eq!(found.encryption_key(), SubstitutionAlphabet::identity());
        assert!(found.warning.is_none());
    }

    #[test]
    fn random_key_is_broken_and_reported() {
        let (profile, quad) = model();
        let key = SubstitutionAlphabet::parse("QWERTYUIOPASDFGHJKLZXCVBNM").unwrap();
        let ct = mono_substitute(TEXT, &key);
        let found = break_monoalphabetic(&ct, &profile, &quad, HillClimbBudget { restarts: 8, max_stale: 1500 }, 2);
        assert!(char_accuracy(&found.plaintext, TEXT) > 0.95);
        let report = found.report(Some(TEXT));
        assert_eq!(report.method, "break-mono");
        assert!(report.accuracy.unwrap() > 0.95);
    }

    #[test]
    fn short_input_warns_and_is_deterministic() {
        let (profile, quad) = model();
        let b = HillClimbBudget { restarts: 2, max_stale: 200 };
        let a = break_monoalphabetic("hello world", &profile, &quad, b, 9);
        assert!(a.warning.is_some());
        assert_eq!(a, break_monoalphabetic("hello world", &profile, &quad, b, 9));
        let empty = break_monoalphabetic("", &profile, &quad, b, 9);
        assert_eq!(empty.plaintext, "");
    }
}
