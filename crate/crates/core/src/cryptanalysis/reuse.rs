//! Keystream reuse: XOR two ciphertexts to cancel the keystream, then drag a
//! crib across the result.

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use super::quadgram::QuadgramModel;
use super::report::{AttackReport, AttackStatus};
use super::stats::FrequencyProfile;

/// Candidates whose text fraction reaches this are treated as plausible text.
pub const TEXT_FRACTION_THRESHOLD: f64 = 0.85;

/// How many ranked candidates a report lists.
pub const REPORTED_CANDIDATES: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReuseError {
    #[error("ciphertexts have no overlapping bytes")]
    NoOverlap,
    #[error("crib is empty")]
    EmptyCrib,
    #[error("crib ({crib} bytes) is longer than the overlap ({overlap} bytes)")]
    CribTooLong { crib: usize, overlap: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CribCandidate {
    pub offset: usize,
    #[serde(serialize_with = "as_hex")]
    pub bytes: Vec<u8>,
    /// Printable rendering; bytes outside ASCII 0x20..0x7E shown as '.'.
    pub text: String,
    /// Fraction of bytes that are ASCII letters or spaces.
    pub text_fraction: f64,
    /// Log10 likelihood under a unigram English character model.
    pub likelihood: f64,
    /// Mean quadgram log probability over the candidate's letters, if it has four.
    pub quadgram: Option<f64>,
}

fn as_hex<S: serde::Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode_upper(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReuseOutcome {
    pub overlap: usize,
    /// The ciphertexts were identical over the overlap, so every offset
    /// trivially yields the crib.
    pub degenerate: bool,
    /// All offsets, best first.
    pub candidates: Vec<CribCandidate>,
}

impl ReuseOutcome {
    pub fn best(&self) -> &CribCandidate {
        &self.candidates[0]
    }

    /// Candidates at or above [`TEXT_FRACTION_THRESHOLD`].
    pub fn plausible(&self) -> impl Iterator<Item = &CribCandidate> {
        self.candidates
            .iter()
            .filter(|c| c.text_fraction >= TEXT_FRACTION_THRESHOLD)
    }

    pub fn report(&self) -> AttackReport {
        let top: Vec<_> = self.candidates.iter().take(REPORTED_CANDIDATES).collect();
        let best = self.best();
        let mut r = if self.degenerate {
            let mut r = AttackReport::new("reuse", AttackStatus::Ok);
            r.warnings.push("ciphertexts identical over the overlap; every offset yields the crib".into());
            r
        } else if best.text_fraction >= TEXT_FRACTION_THRESHOLD {
            AttackReport::new("reuse", AttackStatus::Ok)
        } else {
            AttackReport::failed(
                "reuse",
                format!("no offset reaches text fraction {TEXT_FRACTION_THRESHOLD}"),
            )
        };
        r.candidate = Some(best.text.clone());
        r.score = Some(best.text_fraction);
        r.detail("offset", best.offset)
            .detail("overlap", self.overlap)
            .detail("degenerate", self.degenerate)
            .detail("candidates", top)
    }
}

/// Unigram model of English text characters, used to rank crib candidates.
pub fn char_log_likelihood(bytes: &[u8], reference: &FrequencyProfile) -> f64 {
    bytes
        .iter()
        .map(|&b| {
            let p = match b {
                b' ' => 0.17,
                b'a'..=b'z' => 0.78 * reference.get(b as char),
                b'A'..=b'Z' => 0.03 * reference.get(b as char),
                b'.' | b',' | b'\'' | b'-' | b'?' | b'!' | b';' | b':' | b'"' => 0.002,
                0x21..=0x7E => 0.0002,
                _ => 1e-6,
            };
            p.max(1e-6).log10()
        })
        .sum()
}

fn text_fraction(bytes: &[u8]) -> f64 {
    let good = bytes
        .iter()
        .filter(|b| b.is_ascii_alphabetic() || **b == b' ')
        .count();
    good as f64 / bytes.len() as f64
}

fn printable(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|&b| if (0x20..0x7F).contains(&b) { b as char } else { '.' })
        .collect()
}

fn rank(a: &CribCandidate, b: &CribCandidate) -> Ordering {
    b.text_fraction
        .total_cmp(&a.text_fraction)
        .then(b.likelihood.total_cmp(&a.likelihood))
        .then(a.offset.cmp(&b.offset))
}

pub fn keystream_reuse_attack(
    c1: &[u8],
    c2: &[u8],
    crib: &[u8],
    reference: &FrequencyProfile,
    quadgrams: &QuadgramModel,
) -> Result<ReuseOutcome, ReuseError> {
    let overlap = c1.len().min(c2.len());
    if overlap == 0 {
        return Err(ReuseError::NoOverlap);
    }
    if crib.is_empty() {
        return Err(ReuseError::EmptyCrib);
    }
    if crib.len() > overlap {
        return Err(ReuseError::CribTooLong {
            crib: crib.len(),
            overlap,
        });
    }
    let d: Vec<u8> = c1.iter().zip(c2).map(|(a, b)| a ^ b).collect();
    let degenerate = d.iter().all(|&b| b == 0);
    let mut candidates: Vec<CribCandidate> = (0..=overlap - crib.len())
        .map(|offset| {
            let bytes: Vec<u8> = d[offset..offset + crib.len()]
                .iter()
                .zip(crib)
                .map(|(x, c)| x ^ c)
                .collect();
            let text = printable(&bytes);
            CribCandidate {
                offset,
                text_fraction: text_fraction(&bytes),
                likelihood: char_log_likelihood(&bytes, reference),
                quadgram: quadgrams.mean_score(&text),
                text,
                bytes,
            }
        })
        .collect();
    candidates.sort_by(rank);
    Ok(ReuseOutcome {
        overlap,
        degenerate,
        candidates,
    })
}

/// XOR of two equal-prefix byte strings, truncated to the shorter one.
pub fn xor_overlap(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::xor_with;
    use crate::keystream::{GeneratorSpec, LfsrConfig};
    use proptest::prelude::*;
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn models() -> (FrequencyProfile, QuadgramModel) {
        let corpus = crate::data::bundled().corpus();
        (
            crate::cryptanalysis::stats::letter_frequency(corpus).unwrap(),
            QuadgramModel::from_text(corpus),
        )
    }

    fn encrypt(p: &[u8], g: &GeneratorSpec) -> Vec<u8> {
        let (ks, _) = g.build().unwrap().keystream_bytes(p.len());
        xor_with(p, &ks).unwrap()
    }

    #[test]
    fn attack_at_dawn() {
        let (profile, quad) = models();
        let g = GeneratorSpec::rc4(b"Secret", 0);
        let c1 = encrypt(b"attack at dawn", &g);
        let c2 = encrypt(b"defend the hill", &g);
        let out = keystream_reuse_attack(&c1, &c2, b" the ", &profile, &quad).unwrap();
        assert_eq!(out.overlap, 14);
        assert!(!out.degenerate);
        assert_eq!(out.best().offset, 6);
        assert_eq!(out.best().text, " at d");
        // Direct check: the keystream cancels.
        assert_eq!(xor_overlap(&c1, &c2), xor_overlap(b"attack at dawn", b"defend the hill"));
        let report = out.report();
        assert!(report.is_ok());
        assert_eq!(report.details["offset"], 6);
    }

    #[test]
    fn identical_ciphertexts_are_degenerate() {
        let (profile, quad) = models();
        let c = encrypt(b"same message here", &GeneratorSpec::rc4(b"k", 0));
        let out = keystream_reuse_attack(&c, &c, b"crib", &profile, &quad).unwrap();
        assert!(out.degenerate);
        assert!(out.candidates.iter().all(|c| c.bytes == b"crib"));
        assert!(!out.report().warnings.is_empty());
    }

    #[test]
    fn errors() {
        let (profile, quad) = models();
        assert_eq!(
            keystream_reuse_attack(b"", b"ab", b"a", &profile, &quad),
            Err(ReuseError::NoOverlap)
        );
        assert_eq!(
            keystream_reuse_attack(b"ab", b"ab", b"", &profile, &quad),
            Err(ReuseError::EmptyCrib)
        );
        assert!(matches!(
            keystream_reuse_attack(b"ab", b"abc", b"abc", &profile, &quad),
            Err(ReuseError::CribTooLong { crib: 3, overlap: 2 })
        ));
    }

    #[test]
    fn independent_keystreams_stay_below_threshold() {
        let (profile, quad) = models();
        let p1 = b"meet me by the old mill after the evening bell rings";
        let p2 = b"bring the maps and the lantern and tell no one at all";
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut k1 = [0u8; 16];
            let mut k2 = [0u8; 16];
            rng.fill_bytes(&mut k1);
            rng.fill_bytes(&mut k2);
            let c1 = encrypt(p1, &GeneratorSpec::rc4(&k1, 0));
            let c2 = encrypt(p2, &GeneratorSpec::rc4(&k2, 0));
            let out = keystream_reuse_attack(&c1, &c2, b" the ", &profile, &quad).unwrap();
            assert!(
                out.best().text_fraction < TEXT_FRACTION_THRESHOLD,
                "seed {seed}: {:?}",
                out.best()
            );
            assert!(!out.report().is_ok());
        }
    }

    proptest! {
        #[test]
        fn cancellation_is_generator_independent(
            p1 in proptest::collection::vec(any::<u8>(), 1..64),
            p2 in proptest::collection::vec(any::<u8>(), 1..64),
            key in proptest::collection::vec(any::<u8>(), 1..16),
            seed in 1u64..(1 << 9),
        ) {
            let lfsr = GeneratorSpec::Lfsr(LfsrConfig {
                length: 9,
                taps: vec![9, 5],
                seed: format!("{seed:09b}"),
            });
            let rc4 = GeneratorSpec::rc4(&key, 0);
            let expected = xor_overlap(&p1, &p2);
            for g in [lfsr, rc4] {
                prop_assert_eq!(xor_overlap(&encrypt(&p1, &g), &encrypt(&p2, &g)), expected.clone());
            }
        }
    }
}
