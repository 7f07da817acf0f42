//! Encryption modes over keystreams and the classical letter substitutions.
//!
//! XOR modes work on octets; bit keystreams are packed most-significant bit
//! first (see [`KeyStream::packed_bytes`]). Substitution tables are
//! case-insensitive and preserve the case of the input letter.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::keystream::{KeyStream, KeystreamError, Rc4State, SecretKey, MAX_RC4_KEY_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CipherError {
    #[error("insufficient running key: need {needed} bytes, keystream has {available}")]
    InsufficientKeystream { needed: usize, available: usize },
    #[error("substitution key must contain each letter A-Z exactly once: {0}")]
    BadAlphabet(String),
    #[error("char map entry {0:?} is not a single ASCII letter")]
    BadCharMapEntry(String),
    #[error("char map sends both {first:?} and {second:?} to {image:?}")]
    CharMapCollision { first: char, second: char, image: char },
    #[error("char map lists {0:?} twice")]
    CharMapDuplicate(char),
    #[error("letter {letter:?} at position {position} has no mapping")]
    UnmappedLetter { letter: char, position: usize },
    #[error("self-synchronous window must be at least 1")]
    ZeroWindow,
    #[error("IV has {got} bytes, window is {window}")]
    IvLength { got: usize, window: usize },
    #[error("key of {key} bytes plus window {window} exceeds {MAX_RC4_KEY_LEN} bytes")]
    KeyWindowTooLong { key: usize, window: usize },
    #[error(transparent)]
    Keystream(#[from] KeystreamError),
    #[error("malformed char map document: {0}")]
    CharMapJson(String),
}

/// Plaintext octets `M_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Message(pub Vec<u8>);

/// Ciphertext octets `C_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ciphertext(pub Vec<u8>);

impl Message {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl Ciphertext {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode_upper(&self.0)
    }
}

impl From<&str> for Message {
    fn from(s: &str) -> Self {
        Message(s.as_bytes().to_vec())
    }
}

impl From<Vec<u8>> for Message {
    fn from(v: Vec<u8>) -> Self {
        Message(v)
    }
}

impl From<Vec<u8>> for Ciphertext {
    fn from(v: Vec<u8>) -> Self {
        Ciphertext(v)
    }
}

// ---------------------------------------------------------------------------
// Synchronous XOR
// ---------------------------------------------------------------------------

/// XORs `data` with the leading bytes of `keystream`.
pub fn xor_with(data: &[u8], keystream: &[u8]) -> Result<Vec<u8>, CipherError> {
    if keystream.len() < data.len() {
        return Err(CipherError::InsufficientKeystream {
            needed: data.len(),
            available: keystream.len(),
        });
    }
    Ok(data.iter().zip(keystream).map(|(d, k)| d ^ k).collect())
}

/// `C_j = M_j XOR Z_j`.
pub fn xor_encrypt(msg: &Message, ks: &KeyStream) -> Result<Ciphertext, CipherError> {
    xor_with(&msg.0, &ks.packed_bytes()).map(Ciphertext)
}

/// Same operation as [`xor_encrypt`]; XOR is its own inverse.
pub fn xor_decrypt(ct: &Ciphertext, ks: &KeyStream) -> Result<Message, CipherError> {
    xor_with(&ct.0, &ks.packed_bytes()).map(Message)
}

// ---------------------------------------------------------------------------
// Self-synchronous mode
// ---------------------------------------------------------------------------

/// Ciphertext-feedback stream mode. The keystream byte for position `j` is
/// the first RC4 output byte under the key `key || R`, where `R` holds the
/// previous `window` ciphertext bytes (the IV before any have been sent).
/// This is a teaching construction, not a secure one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfSyncSpec {
    window: usize,
    iv: Vec<u8>,
    key: SecretKey,
}

impl SelfSyncSpec {
    pub fn new(window: usize, iv: Vec<u8>, key: SecretKey) -> Result<Self, CipherError> {
        if window == 0 {
            return Err(CipherError::ZeroWindow);
        }
        if iv.len() != window {
            return Err(CipherError::IvLength {
                got: iv.len(),
                window,
            });
        }
        if key.len() + window > MAX_RC4_KEY_LEN {
            return Err(CipherError::KeyWindowTooLong {
                key: key.len(),
                window,
            });
        }
        Ok(SelfSyncSpec { window, iv, key })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    fn keystream_byte(&self, register: &[u8], scratch: &mut Vec<u8>) -> u8 {
        scratch.clear();
        scratch.extend_from_slice(self.key.as_bytes());
        scratch.extend_from_slice(register);
        Rc4State::ksa_bytes(scratch).next_byte()
    }

    fn run(&self, input: &[u8], encrypt: bool) -> Vec<u8> {
        let mut register = self.iv.clone();
        let mut scratch = Vec::with_capacity(self.key.len() + self.window);
        let mut out = Vec::with_capacity(input.len());
        for &b in input {
            let z = self.keystream_byte(&register, &mut scratch);
            let o = b ^ z;
            let c = if encrypt { o } else { b };
            register.remove(0);
            register.push(c);
            out.push(o);
        }
        out
    }
}

pub fn selfsync_encrypt(msg: &Message, spec: &SelfSyncSpec) -> Ciphertext {
    Ciphertext(spec.run(&msg.0, true))
}

/// The register is fed with received ciphertext, so a corrupted byte only
/// disturbs the next `window` outputs.
pub fn selfsync_decrypt(ct: &Ciphertext, spec: &SelfSyncSpec) -> Message {
    Message(spec.run(&ct.0, false))
}

// ---------------------------------------------------------------------------
// Letter substitution
// ---------------------------------------------------------------------------

fn letter_index(c: char) -> Option<usize> {
    c.is_ascii_alphabetic()
        .then(|| (c.to_ascii_uppercase() as u8 - b'A') as usize)
}

fn with_case_of(template: char, upper_image: u8) -> char {
    let c = upper_image as char;
    if template.is_ascii_lowercase() {
        c.to_ascii_lowercase()
    } else {
        c
    }
}

/// A bijection on A-Z; entry `k` is the image of the `k`-th letter.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubstitutionAlphabet([u8; 26]);

impl SubstitutionAlphabet {
    pub fn identity() -> Self {
        SubstitutionAlphabet(std::array::from_fn(|k| b'A' + k as u8))
    }

    /// Parses a 26-letter key string (either case).
    pub fn parse(key: &str) -> Result<Self, CipherError> {
        let bad = || CipherError::BadAlphabet(key.to_string());
        let letters: Vec<u8> = key.trim().bytes().map(|b| b.to_ascii_uppercase()).collect();
        if letters.len() != 26 {
            return Err(bad());
        }
        let mut seen = [false; 26];
        for &b in &letters {
            if !b.is_ascii_uppercase() || std::mem::replace(&mut seen[(b - b'A') as usize], true) {
                return Err(bad());
            }
        }
        Ok(SubstitutionAlphabet(letters.try_into().expect("26 letters")))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut key = Self::identity().0;
        key.shuffle(rng);
        SubstitutionAlphabet(key)
    }

    /// Builds the key from `images[k]` = image of letter `k`, as indices 0..26.
    pub fn from_indices(images: [u8; 26]) -> Result<Self, CipherError> {
        let s: String = images.iter().map(|&i| char::from(b'A' + (i % 26))).collect();
        if images.iter().any(|&i| i >= 26) {
            return Err(CipherError::BadAlphabet(s));
        }
        Self::parse(&s)
    }

    pub fn image(&self, letter_index: usize) -> u8 {
        self.0[letter_index]
    }

    pub fn invert(&self) -> Self {
        let mut inv = [0u8; 26];
        for (k, &img) in self.0.iter().enumerate() {
            inv[(img - b'A') as usize] = b'A' + k as u8;
        }
        SubstitutionAlphabet(inv)
    }

    pub fn apply(&self, text: &str) -> String {
        text.chars()
            .map(|c| match letter_index(c) {
                Some(k) => with_case_of(c, self.0[k]),
                None => c,
            })
            .collect()
    }
}

impl fmt::Display for SubstitutionAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(std::str::from_utf8(&self.0).expect("ASCII"))
    }
}

impl fmt::Debug for SubstitutionAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubstitutionAlphabet({self})")
    }
}

impl Serialize for SubstitutionAlphabet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SubstitutionAlphabet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SubstitutionAlphabet::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub fn mono_substitute(text: &str, key: &SubstitutionAlphabet) -> String {
    key.apply(text)
}

pub fn mono_invert(key: &SubstitutionAlphabet) -> SubstitutionAlphabet {
    key.invert()
}

/// What to do with a letter that a partial [`CharMap`] does not cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnmappedPolicy {
    #[default]
    Passthrough,
    Reject,
}

/// A partial, injective letter-to-letter map such as `b=a, o=c`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CharMap {
    forward: [Option<u8>; 26],
}

impl CharMap {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds the map from `(from, to)` letter pairs, rejecting duplicate
    /// sources and two sources sharing an image.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, CipherError>
    where
        I: IntoIterator<Item = (char, char)>,
    {
        let mut forward = [None; 26];
        let mut preimage: [Option<char>; 26] = [None; 26];
        for (from, to) in pairs {
            let fi = letter_index(from)
                .ok_or_else(|| CipherError::BadCharMapEntry(from.to_string()))?;
            let ti = letter_index(to).ok_or_else(|| CipherError::BadCharMapEntry(to.to_string()))?;
            let from = from.to_ascii_lowercase();
            if forward[fi].is_some() {
                return Err(CipherError::CharMapDuplicate(from));
            }
            if let Some(first) = preimage[ti] {
                return Err(CipherError::CharMapCollision {
                    first,
                    second: from,
                    image: to.to_ascii_lowercase(),
                });
            }
            forward[fi] = Some(ti as u8);
            preimage[ti] = Some(from);
        }
        Ok(CharMap { forward })
    }

    /// Parses the `b=a, o=c, i=r` notation.
    pub fn parse_pairs(text: &str) -> Result<Self, CipherError> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (l, r) = item
                .split_once('=')
                .ok_or_else(|| CipherError::BadCharMapEntry(item.to_string()))?;
            pairs.push((single_letter(l.trim())?, single_letter(r.trim())?));
        }
        Self::from_pairs(pairs)
    }

    /// Parses a JSON object of single-letter keys and values.
    pub fn from_json(doc: &str) -> Result<Self, CipherError> {
        let raw: BTreeMap<String, String> =
            serde_json::from_str(doc).map_err(|e| CipherError::CharMapJson(e.to_string()))?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (k, v) in &raw {
            pairs.push((single_letter(k)?, single_letter(v)?));
        }
        Self::from_pairs(pairs)
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, String> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        serde_json::to_string(&map).expect("string map")
    }

    /// Lower-case `(from, to)` pairs in alphabetical order of `from`.
    pub fn pairs(&self) -> Vec<(char, char)> {
        self.forward
            .iter()
            .enumerate()
            .filter_map(|(k, t)| t.map(|t| ((b'a' + k as u8) as char, (b'a' + t) as char)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.forward.iter().filter(|t| t.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn covers(&self, letter: char) -> bool {
        letter_index(letter).is_some_and(|k| self.forward[k].is_some())
    }

    pub fn inverse(&self) -> CharMap {
        let mut forward = [None; 26];
        for (k, t) in self.forward.iter().enumerate() {
            if let Some(t) = t {
                forward[*t as usize] = Some(k as u8);
            }
        }
        CharMap { forward }
    }

    pub fn apply(&self, text: &str, policy: UnmappedPolicy) -> Result<String, CipherError> {
        let mut out = String::with_capacity(text.len());
        for (position, c) in text.chars().enumerate() {
            match letter_index(c) {
                Some(k) => match self.forward[k] {
                    Some(t) => out.push(with_case_of(c, b'A' + t)),
                    None if policy == UnmappedPolicy::Passthrough => out.push(c),
                    None => return Err(CipherError::UnmappedLetter { letter: c, position }),
                },
                None => out.push(c),
            }
        }
        Ok(out)
    }
}

fn single_letter(s: &str) -> Result<char, CipherError> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_alphabetic() => Ok(c),
        _ => Err(CipherError::BadCharMapEntry(s.to_string())),
    }
}

impl fmt::Debug for CharMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.pairs().iter().map(|(a, b)| format!("{a}={b}")).collect();
        write!(f, "CharMap({})", body.join(", "))
    }
}

impl Serialize for CharMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CharMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        let mut pairs = Vec::with_capacity(raw.len());
        for (k, v) in &raw {
            pairs.push((
                single_letter(k).map_err(serde::de::Error::custom)?,
                single_letter(v).map_err(serde::de::Error::custom)?,
            ));
        }
        CharMap::from_pairs(pairs).map_err(serde::de::Error::custom)
    }
}

pub fn char_substitute(
    text: &str,
    map: &CharMap,
    unmapped: UnmappedPolicy,
) -> Result<String, CipherError> {
    map.apply(text, unmapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PAPER_KEY: &str = "QWERTYUIOPASDFGHJKLZXCVBNM";

    fn paper9() -> CharMap {
        CharMap::parse_pairs("b=a, o=c, i=r, s=z, a=q, j=g, k=e, e=x, r=t").unwrap()
    }

    fn paper11() -> CharMap {
        CharMap::parse_pairs("b=a, o=c, i=r, s=z, a=q, j=g, k=e, e=x, r=t, u=h, n=l").unwrap()
    }

    fn sskey() -> SecretKey {
        SecretKey::new(b"self-sync key".to_vec()).unwrap()
    }

    #[test]
    fn xor_examples() {
        let msg = Message::from("HI");
        let ks = KeyStream::from_bytes(vec![0xFF, 0x00]);
        assert_eq!(xor_encrypt(&msg, &ks).unwrap().0, vec![0xB7, 0x49]);

        let zero = KeyStream::from_bytes(vec![0; 5]);
        assert_eq!(xor_encrypt(&Message::from("hello"), &zero).unwrap().0, b"hello");

        let bits = KeyStream::from_bits(vec![1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(xor_encrypt(&msg, &bits).unwrap().0, vec![0xB7, 0x49]);
    }

    #[test]
    fn short_keystream_is_an_error() {
        let err = xor_encrypt(&Message::from("abc"), &KeyStream::from_bytes(vec![1, 2])).unwrap_err();
        assert_eq!(err, CipherError::InsufficientKeystream { needed: 3, available: 2 });
        // 12 bits pack to a single byte.
        let err = xor_encrypt(&Message::from("ab"), &KeyStream::from_bits(vec![0; 12])).unwrap_err();
        assert_eq!(err, CipherError::InsufficientKeystream { needed: 2, available: 1 });
    }

    #[test]
    fn selfsync_spec_validation() {
        assert_eq!(SelfSyncSpec::new(0, vec![], sskey()), Err(CipherError::ZeroWindow));
        assert_eq!(
            SelfSyncSpec::new(2, vec![1], sskey()),
            Err(CipherError::IvLength { got: 1, window: 2 })
        );
        let big = SecretKey::new(vec![7; 250]).unwrap();
        assert!(SelfSyncSpec::new(6, vec![0; 6], big.clone()).is_ok());
        assert!(SelfSyncSpec::new(7, vec![0; 7], big).is_err());
    }

    #[test]
    fn selfsync_empty_and_roundtrip() {
        let spec = SelfSyncSpec::new(4, vec![1, 2, 3, 4], sskey()).unwrap();
        assert!(selfsync_encrypt(&Message::default(), &spec).0.is_empty());
        let msg = Message::from("the quick brown fox jumps over the lazy dog");
        let ct = selfsync_encrypt(&msg, &spec);
        assert_ne!(ct.0, msg.0);
        assert_eq!(selfsync_decrypt(&ct, &spec), msg);
    }

    #[test]
    fn selfsync_recovers_after_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [1usize, 4, 8] {
            let spec = SelfSyncSpec::new(m, (0..m as u8).collect(), sskey()).unwrap();
            let msg: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
            let mut ct = selfsync_encrypt(&Message(msg.clone()), &spec);
            let p = 20;
            ct.0[p] ^= 0x5A;
            let out = selfsync_decrypt(&ct, &spec).0;
            assert!(out[..p] == msg[..p]);
            assert_ne!(out[p], msg[p]);
            assert!(out[p + m + 1..] == msg[p + m + 1..], "m={m}");
            let differing = out.iter().zip(&msg).filter(|(a, b)| a != b).count();
            assert!(differing <= m + 1);
        }
    }

    #[test]
    fn mono_paper_examples() {
        let key = SubstitutionAlphabet::parse(PAPER_KEY).unwrap();
        assert_eq!(mono_substitute("ATTACK", &key), "QZZQEA");
        assert_eq!(mono_substitute("hello", &key), "itssg");
        assert_eq!(mono_substitute("Attack, at dawn!", &key), "Qzzqea, qz rqvf!");
        let id = SubstitutionAlphabet::identity();
        assert_eq!(mono_substitute("Any text 123.", &id), "Any text 123.");
    }

    #[test]
    fn mono_inverse_of_paper_key() {
        let inv = mono_invert(&SubstitutionAlphabet::parse(PAPER_KEY).unwrap());
        let img = |c: char| inv.image((c as u8 - b'A') as usize) as char;
        assert_eq!(img('Q'), 'A');
        assert_eq!(img('Z'), 'T');
        assert_eq!(img('E'), 'C');
        assert_eq!(img('A'), 'K');
        assert_eq!(mono_invert(&SubstitutionAlphabet::identity()), SubstitutionAlphabet::identity());
    }

    #[test]
    fn alphabet_parse_errors() {
        assert!(SubstitutionAlphabet::parse("ABC").is_err());
        assert!(SubstitutionAlphabet::parse("AACDEFGHIJKLMNOPQRSTUVWXYZ").is_err());
        assert!(SubstitutionAlphabet::parse("ABCDEFGHIJKLMNOPQRSTUVWXY1").is_err());
        assert_eq!(
            SubstitutionAlphabet::parse(&PAPER_KEY.to_lowercase()).unwrap().to_string(),
            PAPER_KEY
        );
    }

    #[test]
    fn charmap_paper_examples() {
        assert_eq!(
            char_substitute("bob is a joker", &paper9(), UnmappedPolicy::Passthrough).unwrap(),
            "aca rz q gcext"
        );
        assert_eq!(
            char_substitute("bob es un joker", &paper11(), UnmappedPolicy::Passthrough).unwrap(),
            "aca xz hl gcext"
        );
        assert_eq!(
            char_substitute("any text", &CharMap::empty(), UnmappedPolicy::Passthrough).unwrap(),
            "any text"
        );
    }

    #[test]
    fn charmap_reject_policy_names_letter_and_position() {
        let err = char_substitute("bob is a joker", &paper9(), UnmappedPolicy::Reject);
        assert!(err.is_ok());
        let err = char_substitute("bob is fun", &paper9(), UnmappedPolicy::Reject).unwrap_err();
        assert_eq!(err, CipherError::UnmappedLetter { letter: 'f', position: 7 });
    }

    #[test]
    fn charmap_rejects_collisions() {
        assert_eq!(
            CharMap::parse_pairs("a=x, b=x").unwrap_err(),
            CipherError::CharMapCollision { first: 'a', second: 'b', image: 'x' }
        );
        assert_eq!(
            CharMap::parse_pairs("a=x, A=y").unwrap_err(),
            CipherError::CharMapDuplicate('a')
        );
        assert!(CharMap::parse_pairs("ab=x").is_err());
        assert!(CharMap::from_json(r#"{"a":"b","c":"b"}"#).is_err());
        assert!(CharMap::from_json("[1]").is_err());
    }

    #[test]
    fn charmap_json_roundtrip_and_case() {
        let m = CharMap::from_json(r#"{"b":"a","O":"c"}"#).unwrap();
        assert_eq!(m.pairs(), vec![('b', 'a'), ('o', 'c')]);
        assert_eq!(CharMap::from_json(&m.to_json()).unwrap(), m);
        assert_eq!(m.apply("Bob", UnmappedPolicy::Passthrough).unwrap(), "Aca");
        let inv = paper11().inverse();
        assert_eq!(inv.apply("aca xz hl gcext", UnmappedPolicy::Reject).unwrap(), "bob es un joker");
    }

    proptest! {
        #[test]
        fn xor_is_an_involution(msg in proptest::collection::vec(any::<u8>(), 0..200), extra in 0usize..8, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ks = KeyStream::from_bytes((0..msg.len() + extra).map(|_| rng.gen()).collect());
            let m = Message(msg);
            let ct = xor_encrypt(&m, &ks).unwrap();
            prop_assert_eq!(ct.0.len(), m.0.len());
            prop_assert_eq!(xor_decrypt(&ct, &ks).unwrap(), m);
        }

        #[test]
        fn mono_roundtrip_preserves_shape(text in "[ -~]{0,80}", seed in any::<u64>()) {
            let key = SubstitutionAlphabet::random(&mut ChaCha8Rng::seed_from_u64(seed));
            let ct = mono_substitute(&text, &key);
            prop_assert_eq!(ct.len(), text.len());
            for (a, b) in ct.chars().zip(text.chars()) {
                prop_assert_eq!(a.is_ascii_uppercase(), b.is_ascii_uppercase());
                prop_assert_eq!(a.is_ascii_alphabetic(), b.is_ascii_alphabetic());
            }
            prop_assert_eq!(mono_substitute(&ct, &mono_invert(&key)), text);
            prop_assert_eq!(key.invert().invert(), key);
        }

        #[test]
        fn charsub_never_touches_non_letters(text in "\\PC{0,60}") {
            let out = char_substitute(&text, &paper11(), UnmappedPolicy::Passthrough).unwrap();
            prop_assert_eq!(out.chars().count(), text.chars().count());
            for (a, b) in out.chars().zip(text.chars()) {
                if !b.is_ascii_alphabetic() {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
