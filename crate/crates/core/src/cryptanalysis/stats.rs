//! Letter statistics: frequency profiles, chi-squared distance and index of
//! coincidence.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("text contains no letters")]
    NoLetters,
    #[error("need at least 2 letters, got {0}")]
    TooFewLetters(usize),
    #[error("reference frequency for {0} is not positive")]
    ZeroReference(char),
    #[error("invalid frequency profile: {0}")]
    BadProfile(String),
}

/// Case-insensitive counts of A-Z. Other characters are ignored.
pub fn letter_counts(text: &str) -> [u64; 26] {
    let mut counts = [0u64; 26];
    for b in text.bytes() {
        if b.is_ascii_alphabetic() {
            counts[(b.to_ascii_uppercase() - b'A') as usize] += 1;
        }
    }
    counts
}

pub fn count_letters(text: &str) -> usize {
    text.bytes().filter(u8::is_ascii_alphabetic).count()
}

/// Relative letter frequencies. Serialized as `{"A": 0.08, ...}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyProfile {
    freq: [f64; 26],
}

impl FrequencyProfile {
    pub fn from_counts(counts: &[u64; 26]) -> Result<Self, StatsError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(StatsError::NoLetters);
        }
        let mut freq = [0.0; 26];
        for (f, &c) in freq.iter_mut().zip(counts) {
            *f = c as f64 / total as f64;
        }
        Ok(FrequencyProfile { freq })
    }

    /// Normalizes arbitrary nonnegative weights.
    pub fn from_weights(weights: [f64; 26]) -> Result<Self, StatsError> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(StatsError::BadProfile("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(StatsError::BadProfile("weights sum to zero".into()));
        }
        Ok(FrequencyProfile {
            freq: weights.map(|w| w / total),
        })
    }

    pub fn uniform() -> Self {
        FrequencyProfile { freq: [1.0 / 26.0; 26] }
    }

    pub fn as_array(&self) -> &[f64; 26] {
        &self.freq
    }

    /// Frequency of `letter` (either case); 0 for non-letters.
    pub fn get(&self, letter: char) -> f64 {
        if letter.is_ascii_alphabetic() {
            self.freq[(letter.to_ascii_uppercase() as u8 - b'A') as usize]
        } else {
            0.0
        }
    }

    /// Most frequent letter; the alphabetically first one on ties.
    pub fn argmax(&self) -> char {
        let mut best = 0;
        for i in 1..26 {
            if self.freq[i] > self.freq[best] {
                best = i;
            }
        }
        (b'A' + best as u8) as char
    }

    /// Letter indices sorted by decreasing frequency, ties alphabetical.
    pub fn rank_order(&self) -> [u8; 26] {
        let mut order: [u8; 26] = std::array::from_fn(|i| i as u8);
        order.sort_by(|&a, &b| {
            self.freq[b as usize]
                .total_cmp(&self.freq[a as usize])
                .then(a.cmp(&b))
        });
        order
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(doc: &str) -> Result<Self, StatsError> {
        serde_json::from_str(doc).map_err(|e| StatsError::BadProfile(e.to_string()))
    }
}

impl Serialize for FrequencyProfile {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = (0..26)
            .map(|i| (((b'A' + i as u8) as char).to_string(), self.freq[i]))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FrequencyProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        let mut weights = [0.0; 26];
        for (k, v) in map {
            let mut chars = k.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_alphabetic() => {
                    weights[(c.to_ascii_uppercase() as u8 - b'A') as usize] = v;
                }
                _ => return Err(D::Error::custom(format!("bad letter key {k:?}"))),
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(D::Error::custom(format!("frequencies sum to {total}, expected 1")));
        }
        FrequencyProfile::from_weights(weights).map_err(D::Error::custom)
    }
}

pub fn letter_frequency(text: &str) -> Result<FrequencyProfile, StatsError> {
    FrequencyProfile::from_counts(&letter_counts(text))
}

/// Pearson statistic of `n` letters distributed as `observed` against `reference`.
pub fn chi_squared(
    observed: &FrequencyProfile,
    reference: &FrequencyProfile,
    n: usize,
) -> Result<f64, StatsError> {
    let n = n as f64;
    let mut total = 0.0;
    for i in 0..26 {
        let r = reference.freq[i];
        if r <= 0.0 {
            return Err(StatsError::ZeroReference((b'A' + i as u8) as char));
        }
        let diff = n * observed.freq[i] - n * r;
        total += diff * diff / (n * r);
    }
    Ok(total)
}

/// Chi-squared of a text's letters against `reference`.
pub fn chi_squared_text(text: &str, reference: &FrequencyProfile) -> Result<f64, StatsError> {
    let counts = letter_counts(text);
    let n: u64 = counts.iter().sum();
    chi_squared(&FrequencyProfile::from_counts(&counts)?, reference, n as usize)
}

pub fn index_of_coincidence(text: &str) -> Result<f64, StatsError> {
    let counts = letter_counts(text);
    let n: u64 = counts.iter().sum();
    if n < 2 {
        return Err(StatsError::TooFewLetters(n as usize));
    }
    let same: u64 = counts.iter().map(|&c| c * c.saturating_sub(1)).sum();
    Ok(same as f64 / (n * (n - 1)) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{mono_substitute, SubstitutionAlphabet};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frequency_examples() {
        let p = letter_frequency("AAAA").unwrap();
        assert_eq!(p.get('A'), 1.0);
        assert_eq!(p.get('b'), 0.0);
        let p = letter_frequency("ABab, 12").unwrap();
        assert_eq!((p.get('A'), p.get('B')), (0.5, 0.5));
        assert_eq!(letter_frequency("123 !"), Err(StatsError::NoLetters));
        assert_eq!(letter_frequency("zzA").unwrap().argmax(), 'Z');
    }

    #[test]
    fn chi_squared_examples() {
        let p = letter_frequency("the quick brown fox").unwrap();
        let u = FrequencyProfile::uniform();
        assert_eq!(chi_squared(&u, &u, 1000).unwrap(), 0.0);
        assert!(chi_squared(&p, &u, 16).unwrap() > 0.0);
        assert_eq!(chi_squared(&u, &p, 10), Err(StatsError::ZeroReference('A')));
        // Hand-computed: counts A=2,B=0 against A=B=0.5 over two letters.
        let mut w = [0.0; 26];
        w[0] = 1.0;
        w[1] = 1.0;
        let half = FrequencyProfile::from_weights(w).unwrap();
        let mut obs = [0u64; 26];
        obs[0] = 2;
        let obs = FrequencyProfile::from_counts(&obs).unwrap();
        let mut r = [1e-300; 26];
        r[0] = 0.5;
        r[1] = 0.5;
        let r = FrequencyProfile::from_weights(r).unwrap();
        let x = chi_squared(&obs, &r, 2).unwrap();
        assert!((x - 2.0).abs() < 1e-9, "{x}");
        assert!(chi_squared(&obs, &half, 2).is_err());
    }

    #[test]
    fn ioc_examples() {
        assert_eq!(index_of_coincidence("AAAA").unwrap(), 1.0);
        assert_eq!(index_of_coincidence("AB").unwrap(), 0.0);
        assert_eq!(index_of_coincidence("a"), Err(StatsError::TooFewLetters(1)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let text: String = (0..200_000).map(|_| (b'A' + rng.gen_range(0..26)) as char).collect();
        let ioc = index_of_coincidence(&text).unwrap();
        assert!((ioc - 1.0 / 26.0).abs() < 0.003, "{ioc}");
    }

    #[test]
    fn rank_order_is_by_frequency() {
        let p = letter_frequency("ccc bb a").unwrap();
        assert_eq!(&p.rank_order()[..4], &[2, 1, 0, 3]);
    }

    #[test]
    fn profile_json_roundtrip_and_validation() {
        let p = letter_frequency("hello world").unwrap();
        let back = FrequencyProfile::from_json(&p.to_json()).unwrap();
        for i in 0..26 {
            assert!((back.as_array()[i] - p.as_array()[i]).abs() < 1e-15);
        }
        assert!(FrequencyProfile::from_json(r#"{"A":0.5}"#).is_err());
        assert!(FrequencyProfile::from_json(r#"{"AB":1.0}"#).is_err());
        assert!(FrequencyProfile::from_json(r#"{"A":1.5,"B":-0.5}"#).is_err());
    }

    proptest! {
        #[test]
        fn frequencies_sum_to_one(text in "[a-zA-Z ,.]{1,200}") {
            prop_assume!(count_letters(&text) > 0);
            let p = letter_frequency(&text).unwrap();
            let sum: f64 = p.as_array().iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(p.as_array().iter().all(|f| *f >= 0.0));
        }

        #[test]
        fn chi_squared_self_is_zero(w in proptest::array::uniform26(0.001f64..1.0), n in 1usize..10_000) {
            let p = FrequencyProfile::from_weights(w).unwrap();
            prop_assert_eq!(chi_squared(&p, &p, n).unwrap(), 0.0);
        }

        #[test]
        fn ioc_invariant_under_substitution(text in "[a-z ]{2,300}", seed in any::<u64>()) {
            prop_assume!(count_letters(&text) >= 2);
            let key = SubstitutionAlphabet::random(&mut ChaCha8Rng::seed_from_u64(seed));
            let a = index_of_coincidence(&text).unwrap();
            let b = index_of_coincidence(&mono_substitute(&text, &key)).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
