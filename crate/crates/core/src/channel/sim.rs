//! Sender, noisy channel and receiver, with a passive eavesdropper and a
//! replay attacker.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::Ciphertext;
use crate::cryptanalysis::replay::{detect_replay, payload_digest, ReplayReason};
use crate::cryptanalysis::reuse::keystream_reuse_attack;
use crate::cryptanalysis::{break_monoalphabetic, char_accuracy, HillClimbBudget, LanguageModel};
use crate::keystream::{GeneratorSpec, KeystreamError};
use crate::nl::{
    nl_decrypt, nl_encrypt, pre_encode_text, translate_mix, Direction, Freshness, NlError,
    PipelineConfig, SessionLog,
};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("no messages to send")]
    NoMessages,
    #[error("corruption rate {0} is outside [0, 1]")]
    BadRate(f64),
    #[error("IV space must be between 1 and 2^24, got {0}")]
    BadIvSpace(u32),
    #[error("frame {index}: {source}")]
    Frame { index: usize, source: NlError },
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
    #[error("unknown profile {0:?}; expected fresh, reused or weak-wep")]
    UnknownProfile(String),
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
}

/// How per-frame key material is derived from the configured generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum KeyPolicy {
    /// Nonce is the 8-byte big-endian sequence number.
    Fresh,
    /// Every frame uses the same keystream.
    Reused,
    /// A 3-byte IV drawn uniformly from `0..iv_space` is prepended to the key.
    WeakWep { iv_space: u32 },
}

pub const WEP_IV_BYTES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    pub name: String,
    pub pipeline: PipelineConfig,
    pub policy: KeyPolicy,
    pub corruption_rate: f64,
}

impl ChannelProfile {
    pub fn new(
        name: &str,
        pipeline: PipelineConfig,
        policy: KeyPolicy,
        corruption_rate: f64,
    ) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&corruption_rate) {
            return Err(ChannelError::BadRate(corruption_rate));
        }
        if let KeyPolicy::WeakWep { iv_space } = policy {
            if iv_space == 0 || iv_space > 1 << 24 {
                return Err(ChannelError::BadIvSpace(iv_space));
            }
        }
        Ok(ChannelProfile {
            name: name.to_string(),
            pipeline,
            policy,
            corruption_rate,
        })
    }

    /// One of the named profiles `fresh`, `reused` or `weak-wep` over `pipeline`.
    /// The weak-WEP profile uses the full 24-bit IV space unless `iv_space` is given.
    pub fn named(
        name: &str,
        pipeline: PipelineConfig,
        iv_space: Option<u32>,
    ) -> Result<Self, ChannelError> {
        let policy = match name {
            "fresh" => KeyPolicy::Fresh,
            "reused" => KeyPolicy::Reused,
            "weak-wep" => KeyPolicy::WeakWep {
                iv_space: iv_space.unwrap_or(1 << 24),
            },
            other => return Err(ChannelError::UnknownProfile(other.to_string())),
        };
        Self::new(name, pipeline, policy, 0.0)
    }

    pub fn with_corruption(mut self, rate: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(ChannelError::BadRate(rate));
        }
        self.corruption_rate = rate;
        Ok(self)
    }

    /// Key-derivation nonce the receiver (and any eavesdropper) computes
    /// from a frame's public fields.
    pub fn nonce(&self, seq: u64, iv: &[u8]) -> Vec<u8> {
        match self.policy {
            KeyPolicy::Fresh => seq.to_be_bytes().to_vec(),
            KeyPolicy::Reused => Vec::new(),
            KeyPolicy::WeakWep { .. } => iv.to_vec(),
        }
    }

    pub fn frame_generator(&self, seq: u64, iv: &[u8]) -> Result<GeneratorSpec, KeystreamError> {
        self.pipeline.generator().rekeyed(&self.nonce(seq, iv))
    }
}

pub const PROFILE_NAMES: [&str; 3] = ["fresh", "reused", "weak-wep"];

/// A frame on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub seq: u64,
    #[serde(rename = "iv-hex", with = "hex_bytes")]
    pub iv: Vec<u8>,
    #[serde(rename = "payload-hex", with = "hex_bytes")]
    pub payload: Vec<u8>,
}

mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode_upper(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(s).map_err(serde::de::Error::custom)
    }
}

/// What the sender knew about a frame, kept for scoring attacks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrameTruth {
    pub seq: u64,
    pub message: String,
    /// Text after the mix stage.
    pub mixed: String,
    /// Text after the mix and charsub stages.
    pub pre_encode: String,
    /// Bytes fed to the stream-xor stage.
    #[serde(with = "hex_bytes")]
    pub pre_stream: Vec<u8>,
    pub key_digest: String,
    /// True for frames added by [`inject_replays`].
    pub replayed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReceiverEntry {
    pub seq: u64,
    pub plaintext: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionTrace {
    pub profile: String,
    pub frames: Vec<Frame>,
    pub receiver: Vec<ReceiverEntry>,
    pub truth: Vec<FrameTruth>,
    /// Sender-side key reuse warnings.
    pub warnings: Vec<String>,
}

impl SessionTrace {
    pub fn write_jsonl<W: Write>(&self, out: W) -> std::io::Result<()> {
        write_frames(&self.frames, out)
    }
}

pub fn write_frames<W: Write>(frames: &[Frame], mut out: W) -> std::io::Result<()> {
    for f in frames {
        serde_json::to_writer(&mut out, f)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_frames<R: BufRead>(input: R) -> Result<Vec<Frame>, ChannelError> {
    let mut frames = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| ChannelError::Trace {
            line: i + 1,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(serde_json::from_str(&line).map_err(|e| ChannelError::Trace {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(frames)
}

fn corrupt(payload: &mut [u8], rate: f64, rng: &mut ChaCha8Rng) {
    if rate == 0.0 {
        return;
    }
    for b in payload.iter_mut() {
        if rng.gen_bool(rate) {
            *b ^= 1 << rng.gen_range(0..8);
        }
    }
}

/// Receiver side: derive the frame key from its public fields and decrypt.
pub fn receive(profile: &ChannelProfile, frame: &Frame) -> ReceiverEntry {
    let result = profile
        .frame_generator(frame.seq, &frame.iv)
        .map_err(NlError::from)
        .and_then(|g| nl_decrypt(&Ciphertext(frame.payload.clone()), &profile.pipeline.with_generator(g)));
    match result {
        Ok(text) => ReceiverEntry {
            seq: frame.seq,
            plaintext: Some(text),
            error: None,
        },
        Err(e) => ReceiverEntry {
            seq: frame.seq,
            plaintext: None,
            error: Some(e.to_string()),
        },
    }
}

/// Intermediate texts of the sender: after mix, after charsub, and the
/// bytes entering the stream-xor stage.
fn sender_stages(text: &str, cfg: &PipelineConfig) -> Result<(String, String, Vec<u8>), NlError> {
    let mixed = match cfg.lexicon() {
        Some(lex) => translate_mix(text, lex, Direction::Forward).0,
        None => text.to_string(),
    };
    let pre = pre_encode_text(text, cfg)?;
    let bytes = match cfg.parallel_key() {
        Some(k) => k.apply(pre.as_bytes()),
        None => pre.as_bytes().to_vec(),
    };
    Ok((mixed, pre, bytes))
}

pub fn run_session(
    profile: &ChannelProfile,
    messages: &[String],
    seed: u64,
) -> Result<SessionTrace, ChannelError> {
    if messages.is_empty() {
        return Err(ChannelError::NoMessages);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut log = SessionLog::new();
    let mut trace = SessionTrace {
        profile: profile.name.clone(),
        frames: Vec::with_capacity(messages.len()),
        receiver: Vec::with_capacity(messages.len()),
        truth: Vec::with_capacity(messages.len()),
        warnings: Vec::new(),
    };
    for (index, message) in messages.iter().enumerate() {
        let seq = index as u64;
        let iv = match profile.policy {
            KeyPolicy::WeakWep { iv_space } => {
                rng.gen_range(0..iv_space).to_be_bytes()[4 - WEP_IV_BYTES..].to_vec()
            }
            _ => Vec::new(),
        };
        let generator = profile.frame_generator(seq, &iv)?;
        let fp = generator.fingerprint();
        if log.record(fp.clone()) == Freshness::Repeated {
            trace
                .warnings
                .push(format!("frame {seq}: keystream identity {} reused", &fp.seed_digest[..16]));
        }
        let cfg = profile.pipeline.with_generator(generator);
        let frame_err = |source| ChannelError::Frame { index, source };
        let mut payload = nl_encrypt(message, &cfg).map_err(frame_err)?.0;
        let (mixed, pre_encode, pre_stream) = sender_stages(message, &cfg).map_err(frame_err)?;
        corrupt(&mut payload, profile.corruption_rate, &mut rng);
        let frame = Frame { seq, iv, payload };
        trace.receiver.push(receive(profile, &frame));
        trace.frames.push(frame);
        trace.truth.push(FrameTruth {
            seq,
            message: message.clone(),
            mixed,
            pre_encode,
            pre_stream,
            key_digest: fp.seed_digest,
            replayed: false,
        });
    }
    Ok(trace)
}

/// Re-sends `k` earlier frames at random later positions. Returns the
/// indices of the inserted copies in the new trace.
pub fn inject_replays(trace: &mut SessionTrace, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..k {
        let n = trace.frames.len();
        let source = rng.gen_range(0..n);
        let at = rng.gen_range(source + 1..=n);
        let frame = trace.frames[source].clone();
        let mut truth = trace.truth[source].clone();
        truth.replayed = true;
        let receiver = trace.receiver[source].clone();
        trace.frames.insert(at, frame);
        trace.truth.insert(at, truth);
        trace.receiver.insert(at, receiver);
    }
    trace
        .truth
        .iter()
        .enumerate()
        .filter(|(_, t)| t.replayed)
        .map(|(i, _)| i)
        .collect()
}

// ---------------------------------------------------------------------------
// Eavesdropper
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub profile: String,
    pub attack: String,
    pub accuracy: f64,
    pub dict_hit_rate: f64,
    pub frames_observed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackSuite {
    pub crib: String,
    pub reuse: bool,
    pub mono: bool,
    pub replay: bool,
    pub budget: HillClimbBudget,
    pub seed: u64,
    pub timing: bool,
}

impl Default for AttackSuite {
    fn default() -> Self {
        AttackSuite {
            crib: " the ".into(),
            reuse: true,
            mono: true,
            replay: true,
            budget: HillClimbBudget {
                restarts: 10,
                max_stale: 1000,
            },
            seed: 0,
            timing: false,
        }
    }
}

/// Groups frame indices by the key-derivation nonce an eavesdropper can
/// compute from public fields. Replayed copies are excluded.
fn key_groups(profile: &ChannelProfile, frames: &[Frame]) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    let mut seen = std::collections::HashSet::new();
    for (i, f) in frames.iter().enumerate() {
        if !seen.insert((f.seq, payload_digest(&f.payload))) {
            continue;
        }
        groups.entry(profile.nonce(f.seq, &f.iv)).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() >= 2).collect()
}

fn byte_accuracy(candidate: &[u8], truth: &[u8]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = candidate.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Runs the selected attacks against a trace and scores them with the
/// sender's ground truth.
///
/// The substitution attack assumes known plaintext: the eavesdropper holds
/// the pre-stream bytes of the first frame in each key group, strips the
/// shared keystream from the other frames and attacks what remains.
pub fn eavesdrop_and_attack(
    profile: &ChannelProfile,
    trace: &SessionTrace,
    model: &LanguageModel,
    suite: &AttackSuite,
) -> Vec<TrialResult> {
    let frames = &trace.frames;
    let groups = key_groups(profile, frames);
    let mut results = Vec::new();
    let result = |attack: &str, accuracy: f64, dict: f64, observed: usize, reason: Option<String>, t: Instant| {
        TrialResult {
            profile: profile.name.clone(),
            attack: attack.to_string(),
            accuracy,
            dict_hit_rate: dict,
            frames_observed: observed,
            reason,
            wall_time_ms: suite.timing.then(|| t.elapsed().as_secs_f64() * 1e3),
        }
    };

    if suite.reuse {
        let t = Instant::now();
        let mut accs = Vec::new();
        let mut texts = Vec::new();
        for g in &groups {
            let (a, b) = (g[0], g[1]);
            let (c1, c2) = (&frames[a].payload, &frames[b].payload);
            let Ok(out) = keystream_reuse_attack(c1, c2, suite.crib.as_bytes(), &model.profile, &model.quadgrams)
            else {
                continue;
            };
            let best = out.best();
            let window = best.offset..best.offset + best.bytes.len();
            let truth_of = |i: usize| trace.truth[i].pre_stream.get(window.clone()).unwrap_or(&[]).to_vec();
            accs.push(byte_accuracy(&best.bytes, &truth_of(a)).max(byte_accuracy(&best.bytes, &truth_of(b))));
            texts.push(best.text.clone());
        }
        results.push(if accs.is_empty() {
            result("reuse", 0.0, 0.0, frames.len(), Some("no reuse".into()), t)
        } else {
            let acc = accs.iter().sum::<f64>() / accs.len() as f64;
            let dict = model.dictionary_hit_rate(&texts.join(" "));
            result("reuse", acc, dict, frames.len(), None, t)
        });
    }

    if suite.mono {
        let t = Instant::now();
        let mut stripped_text = String::new();
        let mut truth = String::new();
        for g in &groups {
            let known = g[0];
            let ks: Vec<u8> = frames[known]
                .payload
                .iter()
                .zip(&trace.truth[known].pre_stream)
                .map(|(c, p)| c ^ p)
                .collect();
            for &i in &g[1..] {
                let stripped: Vec<u8> = frames[i].payload.iter().zip(&ks).map(|(c, k)| c ^ k).collect();
                let mixed = trace.truth[i].mixed.as_bytes();
                stripped_text.push_str(&String::from_utf8_lossy(&stripped));
                stripped_text.push('\n');
                truth.push_str(&String::from_utf8_lossy(&mixed[..stripped.len().min(mixed.len())]));
                truth.push('\n');
            }
        }
        results.push(if stripped_text.is_empty() {
            result("break-mono", 0.0, 0.0, frames.len(), Some("no reuse".into()), t)
        } else {
            let found = break_monoalphabetic(&stripped_text, &model.profile, &model.quadgrams, suite.budget, suite.seed);
            let acc = char_accuracy(&found.plaintext, &truth);
            result("break-mono", acc, model.dictionary_hit_rate(&found.plaintext), frames.len(), None, t)
        });
    }

    if suite.replay {
        let t = Instant::now();
        let ids: Vec<_> = frames.iter().map(|f| (f.seq, payload_digest(&f.payload))).collect();
        let flags = detect_replay(&ids);
        let flagged: Vec<usize> = flags
            .iter()
            .filter(|f| f.reason == ReplayReason::Replay)
            .map(|f| f.index)
            .collect();
        let injected: Vec<usize> = trace
            .truth
            .iter()
            .enumerate()
            .filter(|(_, t)| t.replayed)
            .map(|(i, _)| i)
            .collect();
        let acc = if flagged == injected {
            1.0
        } else {
            let hit = flagged.iter().filter(|i| injected.contains(i)).count();
            hit as f64 / injected.len().max(flagged.len()) as f64
        };
        let reason = Some(format!("{} flagged, {} injected", flagged.len(), injected.len()));
        results.push(result("replay", acc, 0.0, frames.len(), reason, t));
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::UnmappedPolicy;
    use crate::data::{bundled, bundled_model, sentences, PAPER_PIPELINE};
    use crate::nl::derive_parallel_key;

    fn plain_pipeline() -> PipelineConfig {
        PipelineConfig::new(None, None, UnmappedPolicy::Passthrough, None, GeneratorSpec::rc4(b"shared", 0))
            .unwrap()
    }

    fn messages(n: usize) -> Vec<String> {
        sentences(bundled().heldout()).into_iter().cycle().take(n).collect()
    }

    #[test]
    fn round_trip_every_profile() {
        let pipelines = [plain_pipeline(), bundled().pipeline(PAPER_PIPELINE).unwrap()];
        let msgs = vec!["bob is a joker".to_string(), "Is a joke a joke?".to_string(), "bébé, Bob!".to_string()];
        for pipeline in pipelines {
            for name in PROFILE_NAMES {
                let profile = ChannelProfile::named(name, pipeline.clone(), Some(4)).unwrap();
                let trace = run_session(&profile, &msgs, 1).unwrap();
                for (r, m) in trace.receiver.iter().zip(&msgs) {
                    assert_eq!(r.plaintext.as_deref(), Some(m.as_str()), "{name}");
                }
            }
        }
    }

    #[test]
    fn deterministic_trace_and_jsonl_roundtrip() {
        let profile = ChannelProfile::named("weak-wep", plain_pipeline(), Some(16)).unwrap()
            .with_corruption(0.05)
            .unwrap();
        let msgs = messages(30);
        let a = run_session(&profile, &msgs, 7).unwrap();
        let b = run_session(&profile, &msgs, 7).unwrap();
        let (mut ja, mut jb) = (Vec::new(), Vec::new());
        a.write_jsonl(&mut ja).unwrap();
        b.write_jsonl(&mut jb).unwrap();
        assert_eq!(ja, jb);
        assert_ne!(run_session(&profile, &msgs, 8).unwrap().frames, a.frames);
        assert_eq!(read_frames(&ja[..]).unwrap(), a.frames);
        let line = String::from_utf8(ja).unwrap();
        let first: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
        assert_eq!(first["iv-hex"].as_str().unwrap().len(), 2 * WEP_IV_BYTES);
        assert!(read_frames(&b"{\"seq\":1}\n"[..]).is_err());
    }

    #[test]
    fn corruption_is_bounded_to_affected_bytes() {
        let profile = ChannelProfile::named("fresh", plain_pipeline(), None).unwrap().with_corruption(1.0).unwrap();
        let clean = ChannelProfile::named("fresh", plain_pipeline(), None).unwrap();
        let msgs = messages(5);
        let noisy = run_session(&profile, &msgs, 3).unwrap();
        let good = run_session(&clean, &msgs, 3).unwrap();
        for (n, g) in noisy.frames.iter().zip(&good.frames) {
            assert!(n.payload.iter().zip(&g.payload).all(|(a, b)| (a ^ b).count_ones() == 1));
        }
        assert!(ChannelProfile::named("fresh", plain_pipeline(), None).unwrap().with_corruption(1.5).is_err());
        assert!(ChannelProfile::named("nope", plain_pipeline(), None).is_err());
        assert!(ChannelProfile::named("weak-wep", plain_pipeline(), Some(0)).is_err());
        assert!(matches!(run_session(&clean, &[], 0), Err(ChannelError::NoMessages)));
    }

    #[test]
    fn weak_wep_collides_and_warns() {
        let profile = ChannelProfile::named("weak-wep", plain_pipeline(), Some(16)).unwrap();
        let trace = run_session(&profile, &messages(100), 5).unwrap();
        let mut ivs: Vec<_> = trace.frames.iter().map(|f| f.iv.clone()).collect();
        ivs.sort();
        ivs.dedup();
        assert!(ivs.len() <= 16);
        assert!(!trace.warnings.is_empty());
        let fresh = run_session(&ChannelProfile::named("fresh", plain_pipeline(), None).unwrap(), &messages(100), 5).unwrap();
        assert!(fresh.warnings.is_empty());
    }

    #[test]
    fn replays_are_flagged_exactly() {
        let profile = ChannelProfile::named("fresh", plain_pipeline(), None).unwrap();
        for k in [0, 1, 5] {
            let mut trace = run_session(&profile, &messages(20), 2).unwrap();
            let injected = inject_replays(&mut trace, k, 9);
            assert_eq!(injected.len(), k);
            let ids: Vec<_> = trace.frames.iter().map(|f| (f.seq, payload_digest(&f.payload))).collect();
            let flagged: Vec<_> = detect_replay(&ids).into_iter().map(|f| f.index).collect();
            assert_eq!(flagged, injected);
            let suite = AttackSuite { reuse: false, mono: false, ..Default::default() };
            let results = eavesdrop_and_attack(&profile, &trace, bundled_model(), &suite);
            assert_eq!(results[0].attack, "replay");
            assert_eq!(results[0].accuracy, 1.0);
        }
    }

    #[test]
    fn eavesdropper_on_fresh_and_reused_keys() {
        let m = bundled_model();
        let long = |s: &str| s.repeat(1);
        let msgs = vec![
            long("The committee will meet in the hall after the evening meal to discuss the harvest plans."),
            long("Bring the ledgers and the maps, and tell the others that the meeting starts at seven sharp."),
        ];
        assert!(msgs.iter().all(|m| m.len() >= 64));
        let fresh = ChannelProfile::named("fresh", plain_pipeline(), None).unwrap();
        let trace = run_session(&fresh, &msgs, 1).unwrap();
        let results = eavesdrop_and_attack(&fresh, &trace, m, &AttackSuite::default());
        let reuse = results.iter().find(|r| r.attack == "reuse").unwrap();
        assert_eq!(reuse.accuracy, 0.0);
        assert_eq!(reuse.reason.as_deref(), Some("no reuse"));

        let reused = ChannelProfile::named("reused", plain_pipeline(), None).unwrap();
        let trace = run_session(&reused, &msgs, 1).unwrap();
        let results = eavesdrop_and_attack(&reused, &trace, m, &AttackSuite::default());
        let reuse = results.iter().find(|r| r.attack == "reuse").unwrap();
        assert!(reuse.accuracy > 0.0, "{reuse:?}");
        let mono = results.iter().find(|r| r.attack == "break-mono").unwrap();
        assert!(mono.frames_observed == 2);
        assert!(mono.accuracy > 0.0);
    }

    #[test]
    fn parallel_key_defeats_known_plaintext_stripping() {
        let m = bundled_model();
        let pipeline = plain_pipeline();
        let with_key = PipelineConfig::new(
            None,
            None,
            UnmappedPolicy::Passthrough,
            Some(derive_parallel_key("Spanglish").unwrap()),
            GeneratorSpec::rc4(b"shared", 0),
        )
        .unwrap();
        let msgs = messages(12);
        let run = |p: PipelineConfig| {
            let profile = ChannelProfile::named("reused", p, None).unwrap();
            let trace = run_session(&profile, &msgs, 4).unwrap();
            let suite = AttackSuite { reuse: false, replay: false, ..Default::default() };
            eavesdrop_and_attack(&profile, &trace, m, &suite)[0].clone()
        };
        // Stripping the keystream leaves parallel-xored bytes, not text.
        let plain = run(pipeline);
        let keyed = run(with_key);
        assert!(plain.accuracy > 0.9, "{plain:?}");
        assert!(keyed.accuracy < 0.2, "{keyed:?}");
    }
}
