//! Berlekamp-Massey over GF(2).

use serde::Serialize;

use super::report::{AttackReport, AttackStatus};
use crate::keystream::{KeystreamError, LfsrSpec};

/// Shortest LFSR generating a sequence.
///
/// `connection[i]` is the coefficient `c_i` of `C(x) = 1 + c_1 x + ... + c_L x^L`,
/// so that `s[t] = XOR of s[t - i]` over `i` with `c_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearComplexity {
    #[serde(rename = "L")]
    pub length: usize,
    pub connection: Vec<u8>,
}

impl LinearComplexity {
    /// Indices `i` with `c_i = 1`, in descending order. These are the tap
    /// positions of an equivalent register in this crate's convention.
    pub fn taps(&self) -> Vec<usize> {
        (1..=self.length)
            .rev()
            .filter(|&i| self.connection.get(i) == Some(&1))
            .collect()
    }

    /// Continues `prefix` (at least `L` bits) to `n` bits with the recurrence.
    pub fn regenerate(&self, prefix: &[u8], n: usize) -> Vec<u8> {
        assert!(prefix.len() >= self.length, "prefix shorter than the recurrence");
        let mut out: Vec<u8> = prefix.iter().take(n).copied().collect();
        let taps = self.taps();
        while out.len() < n {
            let t = out.len();
            out.push(taps.iter().fold(0, |acc, &i| acc ^ out[t - i]));
        }
        out
    }

    /// The equivalent register, if `c_L = 1` (always true unless the
    /// sequence has a transient prefix).
    pub fn lfsr_spec(&self) -> Result<LfsrSpec, KeystreamError> {
        LfsrSpec::new(self.length, &self.taps())
    }

    /// Polynomial in the usual `1 + x^a + ...` notation.
    pub fn polynomial(&self) -> String {
        let mut terms = vec!["1".to_string()];
        for i in 1..self.connection.len() {
            if self.connection[i] == 1 {
                terms.push(if i == 1 { "x".into() } else { format!("x^{i}") });
            }
        }
        terms.join(" + ")
    }

    pub fn report(&self, bits: usize) -> AttackReport {
        let mut r = AttackReport::new("bm", AttackStatus::Ok);
        r.key = Some(self.polynomial());
        r.detail("L", self.length)
            .detail("taps", self.taps())
            .detail("connection", &self.connection)
            .detail("bits", bits)
    }
}

/// Standard discrepancy-driven synthesis. Digits other than 0/1 are read
/// modulo 2.
pub fn berlekamp_massey(bits: &[u8]) -> LinearComplexity {
    let n = bits.len();
    let s: Vec<u8> = bits.iter().map(|b| b & 1).collect();
    let mut c = vec![0u8; n + 1];
    let mut b = vec![0u8; n + 1];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    let mut m: isize = -1;
    for t in 0..n {
        let mut d = s[t];
        for i in 1..=l {
            d ^= c[i] & s[t - i];
        }
        if d == 1 {
            let prev = c.clone();
            let shift = (t as isize - m) as usize;
            for i in 0..=n - shift {
                c[i + shift] ^= b[i];
            }
            if 2 * l <= t {
                l = t + 1 - l;
                m = t as isize;
                b = prev;
            }
        }
    }
    c.truncate(l + 1);
    LinearComplexity {
        length: l,
        connection: c,
    }
}
