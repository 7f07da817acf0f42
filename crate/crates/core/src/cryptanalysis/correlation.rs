//! Correlation attack on the Geffe generator.
//!
//! Each tap register agrees with the output on about 3/4 of the bits, so its
//! seed can be found by exhausting that register alone. With both tap seeds
//! known, the selector is exhausted against an exact match.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::report::{AttackReport, AttackStatus};
use crate::keystream::{Combiner, GeffeSpec, KeyStream, KeystreamError, LfsrSpec, LfsrState};

pub const DEFAULT_THRESHOLD: f64 = 0.70;

/// Longest register the attack will exhaust.
pub const MAX_ENUMERATED_LENGTH: usize = 26;

/// Recommended keystream length as a multiple of the longest register.
pub const MIN_BITS_PER_STAGE: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationError {
    #[error("keystream is empty")]
    EmptyKeystream,
    #[error("keystream digit {0} at index {1} is not a bit")]
    NotBits(u8, usize),
    #[error("keystream must be a string of 0 and 1")]
    BadBitString,
    #[error(transparent)]
    Spec(KeystreamError),
    #[error("register length {0} exceeds the enumeration limit of {MAX_ENUMERATED_LENGTH}")]
    TooLong(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOptions {
    pub threshold: f64,
}

impl Default for CorrelationOptions {
    fn default() -> Self {
        CorrelationOptions {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegisterRecovery {
    pub length: usize,
    /// Best-scoring seed as a register value; set even when below threshold.
    pub best_seed: u64,
    pub best_seed_bits: String,
    pub agreement: f64,
    pub recovered: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationOutcome {
    pub bits: usize,
    pub tap_a: RegisterRecovery,
    pub tap_b: RegisterRecovery,
    /// Selector seed reproducing the keystream exactly, if one was found.
    pub selector: Option<u64>,
    pub selector_bits: Option<String>,
    pub warnings: Vec<String>,
}

impl CorrelationOutcome {
    pub fn succeeded(&self) -> bool {
        self.tap_a.recovered && self.tap_b.recovered && self.selector.is_some()
    }

    /// Recovered seeds as (selector, tap_a, tap_b).
    pub fn seeds(&self) -> Option<(u64, u64, u64)> {
        self.succeeded()
            .then(|| (self.selector.unwrap(), self.tap_a.best_seed, self.tap_b.best_seed))
    }

    pub fn report(&self) -> AttackReport {
        let mut r = if self.succeeded() {
            AttackReport::new("correlation", AttackStatus::Ok)
        } else {
            let mut failed = Vec::new();
            if !self.tap_a.recovered {
                failed.push(format!("tap_a best agreement {:.3}", self.tap_a.agreement));
            }
            if !self.tap_b.recovered {
                failed.push(format!("tap_b best agreement {:.3}", self.tap_b.agreement));
            }
            if failed.is_empty() {
                failed.push("no selector seed reproduces the keystream".into());
            }
            AttackReport::failed(
                "correlation",
                format!("{} (threshold not met or no exact match)", failed.join(", ")),
            )
        };
        r.warnings.extend(self.warnings.iter().cloned());
        r.score = Some(self.tap_a.agreement.min(self.tap_b.agreement));
        r.detail("bits", self.bits)
            .detail("tap_a", &self.tap_a)
            .detail("tap_b", &self.tap_b)
            .detail("selector", &self.selector_bits)
    }
}

/// Public shape of one register: length and taps, no seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterShape {
    pub length: usize,
    pub taps: Vec<usize>,
}

impl RegisterShape {
    pub fn spec(&self) -> Result<LfsrSpec, KeystreamError> {
        LfsrSpec::new(self.length, &self.taps)
    }

    pub fn of(spec: LfsrSpec) -> Self {
        RegisterShape {
            length: spec.length(),
            taps: spec.taps(),
        }
    }
}

/// An observed Geffe keystream with the public register shapes, as stored in
/// a challenge file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationInput {
    pub selector: RegisterShape,
    pub tap_a: RegisterShape,
    pub tap_b: RegisterShape,
    /// Keystream as a string of '0' and '1'.
    pub bits: String,
}

impl CorrelationInput {
    pub fn keystream(&self) -> Result<KeyStream, CorrelationError> {
        KeyStream::parse_bits(&self.bits).ok_or(CorrelationError::BadBitString)
    }

    pub fn run(&self, opts: CorrelationOptions) -> Result<CorrelationOutcome, CorrelationError> {
        let ks = self.keystream()?;
        correlation_attack_geffe(
            ks.digits(),
            self.tap_a.spec().map_err(CorrelationError::Spec)?,
            self.tap_b.spec().map_err(CorrelationError::Spec)?,
            self.selector.spec().map_err(CorrelationError::Spec)?,
            opts,
        )
    }
}

/// Fraction of positions where the register seeded with `seed` matches `bits`.
fn agreement_count(spec: LfsrSpec, seed: u64, bits: &[u8]) -> usize {
    let mut state = LfsrState::new(spec, seed).expect("nonzero seed in range");
    bits.iter().filter(|&&b| state.next_bit() == b).count()
}

/// Highest-agreement seed; ties go to the lowest seed so the parallel
/// reduction is order-independent.
fn best_seed(spec: LfsrSpec, bits: &[u8]) -> (u64, usize) {
    (1..=spec.register_mask())
        .into_par_iter()
        .map(|seed| (seed, agreement_count(spec, seed, bits)))
        .reduce(
            || (u64::MAX, 0),
            |a, b| match a.1.cmp(&b.1) {
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Equal => {
                    if a.0 <= b.0 {
                        a
                    } else {
                        b
                    }
                }
            },
        )
}

fn recover_register(spec: LfsrSpec, bits: &[u8], threshold: f64) -> RegisterRecovery {
    let (seed, count) = best_seed(spec, bits);
    let agreement = count as f64 / bits.len() as f64;
    let state = LfsrState::new(spec, seed).expect("enumerated seed is valid");
    RegisterRecovery {
        length: spec.length(),
        best_seed: seed,
        best_seed_bits: state.register_bits(),
        agreement,
        recovered: agreement >= threshold,
    }
}

pub fn correlation_attack_geffe(
    keystream: &[u8],
    spec_a: LfsrSpec,
    spec_b: LfsrSpec,
    spec_sel: LfsrSpec,
    opts: CorrelationOptions,
) -> Result<CorrelationOutcome, CorrelationError> {
    if keystream.is_empty() {
        return Err(CorrelationError::EmptyKeystream);
    }
    if let Some((i, &b)) = keystream.iter().enumerate().find(|(_, &b)| b > 1) {
        return Err(CorrelationError::NotBits(b, i));
    }
    for spec in [spec_a, spec_b, spec_sel] {
        if spec.length() > MAX_ENUMERATED_LENGTH {
            return Err(CorrelationError::TooLong(spec.length()));
        }
    }
    let mut warnings = Vec::new();
    let longest = spec_a.length().max(spec_b.length()).max(spec_sel.length());
    if keystream.len() < MIN_BITS_PER_STAGE * longest {
        warnings.push(format!(
            "{} bits is below the recommended {} for registers up to length {longest}",
            keystream.len(),
            MIN_BITS_PER_STAGE * longest
        ));
    }

    let tap_a = recover_register(spec_a, keystream, opts.threshold);
    let tap_b = recover_register(spec_b, keystream, opts.threshold);
    let selector = if tap_a.recovered && tap_b.recovered {
        let a = LfsrState::new(spec_a, tap_a.best_seed).expect("valid");
        let b = LfsrState::new(spec_b, tap_b.best_seed).expect("valid");
        (1..=spec_sel.register_mask()).into_par_iter().find_first(|&seed| {
            let sel = LfsrState::new(spec_sel, seed).expect("valid");
            let mut g = GeffeSpec::relaxed(sel, a, b, Combiner::GEFFE);
            keystream.iter().all(|&bit| g.next_bit() == bit)
        })
    } else {
        None
    };
    let selector_bits = selector.map(|s| LfsrState::new(spec_sel, s).expect("valid").register_bits());
    Ok(CorrelationOutcome {
        bits: keystream.len(),
        tap_a,
        tap_b,
        selector,
        selector_bits,
        warnings,
    })
}
