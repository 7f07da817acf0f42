//! Natural-language obfuscation layer.
//!
//! A pipeline runs up to five stages in a fixed order:
//!
//! 1. `mix`: word-level substitution into a second language via a [`MixLexicon`]
//! 2. `charsub`: partial letter substitution via a [`CharMap`]
//! 3. `encode`: UTF-8 encoding of the text
//! 4. `parallel-xor`: XOR with a shared [`ParallelKey`] cycled to length
//! 5. `stream-xor`: XOR with the configured keystream generator
//!
//! Decryption inverts the stages in reverse order.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::{xor_with, CharMap, CipherError, Ciphertext, UnmappedPolicy};
use crate::keystream::{GeneratorSpec, KeyFingerprint, KeystreamError};

#[derive(Debug, Error)]
pub enum NlError {
    #[error("malformed lexicon: {0}")]
    LexiconFormat(String),
    #[error("lexicon entry {0:?} is empty or contains whitespace")]
    LexiconToken(String),
    #[error("lexicon collision: {first:?} and {second:?} both map to {image:?}")]
    LexiconCollision {
        first: String,
        second: String,
        image: String,
    },
    #[error("lexicon lists {0:?} twice")]
    LexiconDuplicate(String),
    #[error("parallel key phrase is empty")]
    EmptyPhrase,
    #[error("invalid pipeline: {0}")]
    Pipeline(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    ConfigFile { path: PathBuf, message: String },
    #[error("decrypted bytes are not valid UTF-8 (key or config mismatch): {0}")]
    Decode(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
}

impl NlError {
    /// True for errors raised while decrypting data under the wrong key or
    /// configuration, as opposed to a malformed configuration.
    pub fn is_crypto_mismatch(&self) -> bool {
        matches!(
            self,
            NlError::Decode(_) | NlError::Cipher(CipherError::UnmappedLetter { .. })
        )
    }
}

// ---------------------------------------------------------------------------
// Lexicon and word mixing
// ---------------------------------------------------------------------------

/// An injective word map from a source language into a mixed language.
/// Words are stored lower-case and matched case-insensitively.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MixLexicon {
    pub source: String,
    pub mix: String,
    forward: HashMap<String, String>,
    reverse: HashMap<String, String>,
}

#[derive(Deserialize)]
struct LexiconDocument {
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    mix: Option<String>,
    entries: serde_json::Map<String, serde_json::Value>,
}

impl MixLexicon {
    pub fn new<I, K, V>(source: &str, mix: &str, entries: I) -> Result<Self, NlError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut lex = MixLexicon {
            source: source.to_string(),
            mix: mix.to_string(),
            ..Default::default()
        };
        for (k, v) in entries {
            let (k, v) = (k.as_ref(), v.as_ref());
            for token in [k, v] {
                if token.is_empty() || token.chars().any(char::is_whitespace) {
                    return Err(NlError::LexiconToken(token.to_string()));
                }
            }
            let (k, v) = (k.to_lowercase(), v.to_lowercase());
            if lex.forward.contains_key(&k) {
                return Err(NlError::LexiconDuplicate(k));
            }
            if let Some(first) = lex.reverse.get(&v) {
                return Err(NlError::LexiconCollision {
                    first: first.clone(),
                    second: k,
                    image: v,
                });
            }
            lex.reverse.insert(v.clone(), k.clone());
            lex.forward.insert(k, v);
        }
        Ok(lex)
    }

    /// Accepts either `{"source":..,"mix":..,"entries":{word:word}}` or a
    /// bare `{word:word}` object.
    pub fn from_json(doc: &str) -> Result<Self, NlError> {
        let value: serde_json::Value =
            serde_json::from_str(doc).map_err(|e| NlError::LexiconFormat(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| NlError::LexiconFormat("expected a JSON object".into()))?;
        let (source, mix, entries) = if obj.get("entries").is_some_and(|e| e.is_object()) {
            let d: LexiconDocument = serde_json::from_value(value.clone())
                .map_err(|e| NlError::LexiconFormat(e.to_string()))?;
            (d.source.unwrap_or_default(), d.mix.unwrap_or_default(), d.entries)
        } else {
            (String::new(), String::new(), obj.clone())
        };
        let mut pairs = Vec::with_capacity(entries.len());
        for (k, v) in entries {
            let v = v
                .as_str()
                .ok_or_else(|| NlError::LexiconFormat(format!("value for {k:?} is not a string")))?
                .to_string();
            pairs.push((k, v));
        }
        Self::new(&source, &mix, pairs)
    }

    pub fn to_json(&self) -> String {
        let entries: std::collections::BTreeMap<_, _> = self.forward.iter().collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "source": self.source,
            "mix": self.mix,
            "entries": entries,
        }))
        .expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn lookup(&self, word: &str, direction: Direction) -> Option<&str> {
        let table = match direction {
            Direction::Forward => &self.forward,
            Direction::Reverse => &self.reverse,
        };
        table.get(&word.to_lowercase()).map(String::as_str)
    }

    /// Fraction of word tokens in `text` that have a forward entry.
    pub fn coverage(&self, text: &str) -> f64 {
        let (mut hit, mut total) = (0usize, 0usize);
        for token in text.split_whitespace() {
            let (_, core, _) = split_punctuation(token);
            if core.is_empty() {
                continue;
            }
            total += 1;
            hit += self.forward.contains_key(&core.to_lowercase()) as usize;
        }
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

/// Distinct tokens that had no lexicon entry, in order of first appearance.
pub type OovReport = Vec<String>;

/// Splits a whitespace token into leading punctuation, core word and
/// trailing punctuation.
fn split_punctuation(token: &str) -> (&str, &str, &str) {
    let is_word = |c: char| c.is_alphanumeric();
    let start = token.find(is_word).unwrap_or(token.len());
    let end = token.rfind(is_word).map_or(start, |i| {
        i + token[i..].chars().next().map_or(0, char::len_utf8)
    });
    (&token[..start], &token[start..end], &token[end..])
}

/// Applies the case pattern of `template` to `word`: all-caps (for
/// multi-letter templates), capitalised, or lower-case.
fn match_case(template: &str, word: &str) -> String {
    let letters: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    let all_upper = letters.len() > 1 && letters.iter().all(|c| c.is_uppercase());
    if all_upper {
        return word.to_uppercase();
    }
    let mut chars = word.chars();
    match (template.chars().next(), chars.next()) {
        (Some(t), Some(first)) if t.is_uppercase() => {
            first.to_uppercase().chain(chars).collect()
        }
        _ => word.to_string(),
    }
}

/// Word-level translation. Whitespace runs and punctuation attached to a
/// word are kept exactly; unknown words pass through and are reported.
pub fn translate_mix(text: &str, lex: &MixLexicon, direction: Direction) -> (String, OovReport) {
    let mut out = String::with_capacity(text.len());
    let mut oov = Vec::new();
    let mut seen = HashSet::new();
    let mut rest = text;
    while !rest.is_empty() {
        let ws_end = rest.find(|c: char| !c.is_whitespace()).unwrap_or(rest.len());
        out.push_str(&rest[..ws_end]);
        rest = &rest[ws_end..];
        if rest.is_empty() {
            break;
        }
        let tok_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let token = &rest[..tok_end];
        rest = &rest[tok_end..];

        let (lead, core, trail) = split_punctuation(token);
        out.push_str(lead);
        match lex.lookup(core, direction) {
            Some(image) if !core.is_empty() => out.push_str(&match_case(core, image)),
            _ => {
                out.push_str(core);
                if !core.is_empty() && seen.insert(core.to_string()) {
                    oov.push(core.to_string());
                }
            }
        }
        out.push_str(trail);
    }
    (out, oov)
}

// ---------------------------------------------------------------------------
// Parallel key
// ---------------------------------------------------------------------------

/// Shared secret of the language layer, XORed cyclically over the encoded text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParallelKey(Vec<u8>);

impl ParallelKey {
    pub fn new(bytes: Vec<u8>) -> Result<Self, NlError> {
        if bytes.is_empty() {
            return Err(NlError::EmptyPhrase);
        }
        Ok(ParallelKey(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn apply(&self, data: &[u8]) -> Vec<u8> {
        data.iter()
            .zip(self.0.iter().cycle())
            .map(|(d, k)| d ^ k)
            .collect()
    }
}

/// Key bytes are the UTF-8 encoding of the phrase, e.g. the name of the
/// mixed language.
pub fn derive_parallel_key(phrase: &str) -> Result<ParallelKey, NlError> {
    ParallelKey::new(phrase.as_bytes().to_vec())
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Mix,
    Charsub,
    Encode,
    ParallelXor,
    StreamXor,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Mix => "mix",
            Stage::Charsub => "charsub",
            Stage::Encode => "encode",
            Stage::ParallelXor => "parallel-xor",
            Stage::StreamXor => "stream-xor",
        }
    }
}

/// Validated pipeline. Build with [`PipelineConfig::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    stages: Vec<Stage>,
    lexicon: Option<MixLexicon>,
    charmap: Option<CharMap>,
    unmapped: UnmappedPolicy,
    parallel_key: Option<ParallelKey>,
    generator: GeneratorSpec,
}

impl PipelineConfig {
    /// Stages are derived from which optional parts are supplied; `encode`
    /// and `stream-xor` are always present.
    pub fn new(
        lexicon: Option<MixLexicon>,
        charmap: Option<CharMap>,
        unmapped: UnmappedPolicy,
        parallel_key: Option<ParallelKey>,
        generator: GeneratorSpec,
    ) -> Result<Self, NlError> {
        let mut stages = Vec::new();
        if lexicon.is_some() {
            stages.push(Stage::Mix);
        }
        if charmap.is_some() {
            stages.push(Stage::Charsub);
        }
        stages.push(Stage::Encode);
        if parallel_key.is_some() {
            stages.push(Stage::ParallelXor);
        }
        stages.push(Stage::StreamXor);
        Self::with_stages(stages, lexicon, charmap, unmapped, parallel_key, generator)
    }

    /// Checks an explicit stage list against the supplied parts.
    pub fn with_stages(
        stages: Vec<Stage>,
        lexicon: Option<MixLexicon>,
        charmap: Option<CharMap>,
        unmapped: UnmappedPolicy,
        parallel_key: Option<ParallelKey>,
        generator: GeneratorSpec,
    ) -> Result<Self, NlError> {
        if stages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(NlError::Pipeline(
                "stages must appear once each, in the order mix, charsub, encode, parallel-xor, stream-xor"
                    .into(),
            ));
        }
        let has = |s: Stage| stages.contains(&s);
        if !has(Stage::StreamXor) {
            return Err(NlError::Pipeline("stream-xor stage is required".into()));
        }
        if !has(Stage::Encode) {
            return Err(NlError::Pipeline(
                "encode stage is required before the XOR stages".into(),
            ));
        }
        for (stage, supplied, what) in [
            (Stage::Mix, lexicon.is_some(), "lexicon"),
            (Stage::Charsub, charmap.is_some(), "charmap"),
            (Stage::ParallelXor, parallel_key.is_some(), "parallel key"),
        ] {
            if has(stage) != supplied {
                return Err(NlError::Pipeline(format!(
                    "stage {} is {} but a {what} is {}",
                    stage.name(),
                    if has(stage) { "listed" } else { "absent" },
                    if supplied { "supplied" } else { "missing" },
                )));
            }
        }
        generator.build()?;
        Ok(PipelineConfig {
            stages,
            lexicon,
            charmap,
            unmapped,
            parallel_key,
            generator,
        })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn lexicon(&self) -> Option<&MixLexicon> {
        self.lexicon.as_ref()
    }

    pub fn charmap(&self) -> Option<&CharMap> {
        self.charmap.as_ref()
    }

    pub fn parallel_key(&self) -> Option<&ParallelKey> {
        self.parallel_key.as_ref()
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    /// Same pipeline with a different keystream generator.
    pub fn with_generator(&self, generator: GeneratorSpec) -> Self {
        PipelineConfig {
            generator,
            ..self.clone()
        }
    }

    /// Same pipeline with a different parallel key. Fails if the pipeline
    /// has no parallel-xor stage.
    pub fn with_parallel_key(&self, key: ParallelKey) -> Result<Self, NlError> {
        if self.parallel_key.is_none() {
            return Err(NlError::Pipeline("pipeline has no parallel-xor stage".into()));
        }
        Ok(PipelineConfig {
            parallel_key: Some(key),
            ..self.clone()
        })
    }

    /// Loads a pipeline file. Lexicon and charmap paths are resolved
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, NlError> {
        let text = read_file(path)?;
        let file: PipelineFile = serde_json::from_str(&text).map_err(|e| NlError::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        file.resolve(base)
    }
}

fn read_file(path: &Path) -> Result<String, NlError> {
    std::fs::read_to_string(path).map_err(|e| NlError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parallel key as written in a pipeline file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParallelKeySource {
    Phrase(String),
    Hex(String),
}

/// On-disk pipeline description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineFile {
    /// Optional explicit stage list; derived from the other fields when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<Stage>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charmap: Option<PathBuf>,
    #[serde(default)]
    pub unmapped: UnmappedPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_key: Option<ParallelKeySource>,
    pub generator: GeneratorSpec,
}

impl PipelineFile {
    pub fn resolve(&self, base: &Path) -> Result<PipelineConfig, NlError> {
        self.resolve_with(|p| read_file(&base.join(p)))
    }

    /// Resolves lexicon and charmap references through `read`, which maps a
    /// referenced path to the file's contents.
    pub fn resolve_with<F>(&self, read: F) -> Result<PipelineConfig, NlError>
    where
        F: Fn(&Path) -> Result<String, NlError>,
    {
        let bad = |p: &Path, e: &dyn std::fmt::Display| NlError::ConfigFile {
            path: p.to_path_buf(),
            message: e.to_string(),
        };
        let lexicon = match &self.lexicon {
            Some(p) => Some(MixLexicon::from_json(&read(p)?).map_err(|e| bad(p, &e))?),
            None => None,
        };
        let charmap = match &self.charmap {
            Some(p) => Some(CharMap::from_json(&read(p)?).map_err(|e| bad(p, &e))?),
            None => None,
        };
        let parallel_key = match &self.parallel_key {
            Some(ParallelKeySource::Phrase(p)) => Some(derive_parallel_key(p)?),
            Some(ParallelKeySource::Hex(h)) => Some(ParallelKey::new(
                hex::decode(h).map_err(|e| NlError::Pipeline(format!("parallel key hex: {e}")))?,
            )?),
            None => None,
        };
        match &self.stages {
            Some(stages) => PipelineConfig::with_stages(
                stages.clone(),
                lexicon,
                charmap,
                self.unmapped,
                parallel_key,
                self.generator.clone(),
            ),
            None => PipelineConfig::new(
                lexicon,
                charmap,
                self.unmapped,
                parallel_key,
                self.generator.clone(),
            ),
        }
    }
}

/// Intermediate value after one pipeline stage, for the debug trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageTrace {
    pub stage: String,
    pub hex: String,
    /// Present when the bytes are valid UTF-8.
    pub text: Option<String>,
}

impl StageTrace {
    fn new(stage: &str, bytes: &[u8]) -> Self {
        StageTrace {
            stage: stage.to_string(),
            hex: hex::encode_upper(bytes),
            text: std::str::from_utf8(bytes).ok().map(str::to_string),
        }
    }
}

fn stream_xor(data: &[u8], generator: &GeneratorSpec) -> Result<Vec<u8>, NlError> {
    let (ks, _) = generator.build()?.keystream_bytes(data.len());
    Ok(xor_with(data, &ks)?)
}

/// Runs the text stages (mix, charsub) only.
pub fn pre_encode_text(plaintext: &str, cfg: &PipelineConfig) -> Result<String, NlError> {
    let mut text = plaintext.to_string();
    if let Some(lex) = &cfg.lexicon {
        text = translate_mix(&text, lex, Direction::Forward).0;
    }
    if let Some(map) = &cfg.charmap {
        text = map.apply(&text, cfg.unmapped)?;
    }
    Ok(text)
}

/// Encrypts and records every intermediate value.
pub fn nl_encrypt_traced(
    plaintext: &str,
    cfg: &PipelineConfig,
) -> Result<(Ciphertext, Vec<StageTrace>), NlError> {
    let mut trace = vec![StageTrace::new("input", plaintext.as_bytes())];
    let mut text = plaintext.to_string();
    if let Some(lex) = &cfg.lexicon {
        text = translate_mix(&text, lex, Direction::Forward).0;
        trace.push(StageTrace::new(Stage::Mix.name(), text.as_bytes()));
    }
    if let Some(map) = &cfg.charmap {
        text = map.apply(&text, cfg.unmapped)?;
        trace.push(StageTrace::new(Stage::Charsub.name(), text.as_bytes()));
    }
    let mut bytes = text.into_bytes();
    trace.push(StageTrace::new(Stage::Encode.name(), &bytes));
    if let Some(key) = &cfg.parallel_key {
        bytes = key.apply(&bytes);
        trace.push(StageTrace::new(Stage::ParallelXor.name(), &bytes));
    }
    bytes = stream_xor(&bytes, &cfg.generator)?;
    trace.push(StageTrace::new(Stage::StreamXor.name(), &bytes));
    Ok((Ciphertext(bytes), trace))
}

pub fn nl_encrypt(plaintext: &str, cfg: &PipelineConfig) -> Result<Ciphertext, NlError> {
    nl_encrypt_traced(plaintext, cfg).map(|(ct, _)| ct)
}

/// Decrypts and records every intermediate value, in decryption order.
pub fn nl_decrypt_traced(
    ct: &Ciphertext,
    cfg: &PipelineConfig,
) -> Result<(String, Vec<StageTrace>), NlError> {
    let mut trace = vec![StageTrace::new("input", &ct.0)];
    let mut bytes = stream_xor(&ct.0, &cfg.generator)?;
    trace.push(StageTrace::new(Stage::StreamXor.name(), &bytes));
    if let Some(key) = &cfg.parallel_key {
        bytes = key.apply(&bytes);
        trace.push(StageTrace::new(Stage::ParallelXor.name(), &bytes));
    }
    let mut text = String::from_utf8(bytes).map_err(|e| NlError::Decode(e.to_string()))?;
    trace.push(StageTrace::new(Stage::Encode.name(), text.as_bytes()));
    if let Some(map) = &cfg.charmap {
        text = map.inverse().apply(&text, cfg.unmapped)?;
        trace.push(StageTrace::new(Stage::Charsub.name(), text.as_bytes()));
    }
    if let Some(lex) = &cfg.lexicon {
        text = translate_mix(&text, lex, Direction::Reverse).0;
        trace.push(StageTrace::new(Stage::Mix.name(), text.as_bytes()));
    }
    Ok((text, trace))
}

pub fn nl_decrypt(ct: &Ciphertext, cfg: &PipelineConfig) -> Result<String, NlError> {
    nl_decrypt_traced(ct, cfg).map(|(text, _)| text)
}

// ---------------------------------------------------------------------------
// Key reuse guard
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Freshness {
    Fresh,
    Repeated,
}

/// Keystream identities issued so far in a session. Only digests of the
/// secret material are stored. The caller owns persistence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLog {
    issued: HashSet<KeyFingerprint>,
}

impl SessionLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `fp` and reports whether it had been issued before.
    pub fn record(&mut self, fp: KeyFingerprint) -> Freshness {
        if self.issued.insert(fp) {
            Freshness::Fresh
        } else {
            Freshness::Repeated
        }
    }

    pub fn len(&self) -> usize {
        self.issued.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issued.is_empty()
    }
}

pub fn key_reuse_guard(log: &SessionLog, fp: &KeyFingerprint) -> Freshness {
    if log.issued.contains(fp) {
        Freshness::Repeated
    } else {
        Freshness::Fresh
    }
}
