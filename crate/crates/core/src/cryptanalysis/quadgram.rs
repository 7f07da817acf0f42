//! Quadgram log-probability model used to score candidate English text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::StatsError;

const TABLE: usize = 26 * 26 * 26 * 26;

/// On-disk form: raw counts of observed quadgrams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadgramCounts {
    pub total: u64,
    pub counts: BTreeMap<String, u64>,
}

impl QuadgramCounts {
    /// Counts overlapping quadgrams of the letter stream of `text`
    /// (non-letters removed, case folded).
    pub fn from_text(text: &str) -> Self {
        let letters = letter_indices(text);
        let mut dense = vec![0u64; TABLE];
        for w in letters.windows(4) {
            dense[quad_index(w)] += 1;
        }
        let mut counts = BTreeMap::new();
        let mut total = 0;
        for (i, &c) in dense.iter().enumerate() {
            if c > 0 {
                counts.insert(quad_string(i), c);
                total += c;
            }
        }
        QuadgramCounts { total, counts }
    }
}

/// Dense table of `log10((count + 1) / (total + 26^4))`.
#[derive(Clone)]
pub struct QuadgramModel {
    logp: Vec<f32>,
    total: u64,
}

impl std::fmt::Debug for QuadgramModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadgramModel").field("total", &self.total).finish()
    }
}

impl QuadgramModel {
    pub fn from_counts(counts: &QuadgramCounts) -> Result<Self, StatsError> {
        let mut dense = vec![0u64; TABLE];
        let mut total = 0u64;
        for (q, &c) in &counts.counts {
            let b = q.as_bytes();
            if b.len() != 4 || !b.iter().all(u8::is_ascii_alphabetic) {
                return Err(StatsError::BadProfile(format!("bad quadgram {q:?}")));
            }
            let idx: Vec<u8> = b.iter().map(|x| x.to_ascii_uppercase() - b'A').collect();
            dense[quad_index(&idx)] += c;
            total += c;
        }
        if total != counts.total {
            return Err(StatsError::BadProfile(format!(
                "quadgram total {} does not match sum of counts {total}",
                counts.total
            )));
        }
        let denom = (total + TABLE as u64) as f64;
        let logp = dense
            .iter()
            .map(|&c| ((c + 1) as f64 / denom).log10() as f32)
            .collect();
        Ok(QuadgramModel { logp, total })
    }

    pub fn from_text(text: &str) -> Self {
        Self::from_counts(&QuadgramCounts::from_text(text)).expect("counts from text are valid")
    }

    pub fn from_json(doc: &str) -> Result<Self, StatsError> {
        let counts: QuadgramCounts =
            serde_json::from_str(doc).map_err(|e| StatsError::BadProfile(e.to_string()))?;
        Self::from_counts(&counts)
    }

    pub fn training_total(&self) -> u64 {
        self.total
    }

    /// Log probability of one quadgram given as four letter indices.
    #[inline]
    pub fn logp(&self, q: &[u8]) -> f32 {
        self.logp[quad_index(q)]
    }

    /// Sum of quadgram log probabilities over a letter-index stream.
    pub fn score_indices(&self, letters: &[u8]) -> f64 {
        letters
            .windows(4)
            .map(|w| self.logp[quad_index(w)] as f64)
            .sum()
    }

    pub fn score(&self, text: &str) -> f64 {
        self.score_indices(&letter_indices(text))
    }

    /// Mean log probability per quadgram, or `None` for fewer than four letters.
    pub fn mean_score(&self, text: &str) -> Option<f64> {
        let letters = letter_indices(text);
        (letters.len() >= 4).then(|| self.score_indices(&letters) / (letters.len() - 3) as f64)
    }
}

/// Letters of `text` as indices 0..26, non-letters dropped.
pub fn letter_indices(text: &str) -> Vec<u8> {
    text.bytes()
        .filter(u8::is_ascii_alphabetic)
        .map(|b| b.to_ascii_uppercase() - b'A')
        .collect()
}

#[inline]
fn quad_index(q: &[u8]) -> usize {
    ((q[0] as usize * 26 + q[1] as usize) * 26 + q[2] as usize) * 26 + q[3] as usize
}

fn quad_string(mut i: usize) -> String {
    let mut out = [0u8; 4];
    for slot in out.iter_mut().rev() {
        *slot = b'A' + (i % 26) as u8;
        i /= 26;
    }
    String::from_utf8(out.to_vec()).expect("ascii")
}
