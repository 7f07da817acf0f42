//! Replay detection over (sequence number, payload digest) frame identities.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::report::{AttackReport, AttackStatus};

pub type PayloadDigest = [u8; 32];

pub fn payload_digest(payload: &[u8]) -> PayloadDigest {
    Sha256::digest(payload).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplayReason {
    /// Same sequence number and payload as an earlier frame.
    Replay,
    /// Sequence number seen before with a different payload.
    SeqReuse,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayFlag {
    pub index: usize,
    pub seq: u64,
    pub reason: ReplayReason,
    /// Index of the first frame with the same sequence number.
    pub first_index: usize,
}

pub fn detect_replay(frames: &[(u64, PayloadDigest)]) -> Vec<ReplayFlag> {
    let mut seen: HashSet<(u64, PayloadDigest)> = HashSet::new();
    let mut first_by_seq: HashMap<u64, usize> = HashMap::new();
    let mut flags = Vec::new();
    for (index, &(seq, digest)) in frames.iter().enumerate() {
        let first_index = *first_by_seq.entry(seq).or_insert(index);
        let reason = if !seen.insert((seq, digest)) {
            Some(ReplayReason::Replay)
        } else if first_index != index {
            Some(ReplayReason::SeqReuse)
        } else {
            None
        };
        if let Some(reason) = reason {
            flags.push(ReplayFlag {
                index,
                seq,
                reason,
                first_index,
            });
        }
    }
    flags
}

pub fn replay_report(frames: usize, flags: &[ReplayFlag]) -> AttackReport {
    let replays = flags.iter().filter(|f| f.reason == ReplayReason::Replay).count();
    let mut r = AttackReport::new("replay", AttackStatus::Ok);
    r.score = Some(replays as f64);
    r.detail("frames", frames)
        .detail("replays", replays)
        .detail("seq_reuse", flags.len() - replays)
        .detail("flags", flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frames(items: &[(u64, &[u8])]) -> Vec<(u64, PayloadDigest)> {
        items.iter().map(|(s, p)| (*s, payload_digest(p))).collect()
    }

    #[test]
    fn examples() {
        assert!(detect_replay(&frames(&[(1, b"a"), (2, b"b"), (3, b"c")])).is_empty());
        let flags = detect_replay(&frames(&[(1, b"a"), (2, b"b"), (3, b"c"), (2, b"b")]));
        assert_eq!(
            flags,
            vec![ReplayFlag { index: 3, seq: 2, reason: ReplayReason::Replay, first_index: 1 }]
        );
        let flags = detect_replay(&frames(&[(1, b"a"), (2, b"b"), (2, b"B")]));
        assert_eq!(flags.len(), 1);
        assert_eq!(flags[0].reason, ReplayReason::SeqReuse);
        assert!(detect_replay(&[]).is_empty());
    }

    #[test]
    fn replay_after_reuse_is_still_replay() {
        let flags = detect_replay(&frames(&[(1, b"a"), (1, b"x"), (1, b"a"), (1, b"x")]));
        let reasons: Vec<_> = flags.iter().map(|f| (f.index, f.reason)).collect();
        assert_eq!(
            reasons,
            vec![(1, ReplayReason::SeqReuse), (2, ReplayReason::Replay), (3, ReplayReason::Replay)]
        );
        let r = replay_report(4, &flags);
        assert_eq!(r.details["replays"], 2);
        assert_eq!(r.details["flags"][0]["reason"], "seq-reuse");
    }
}
