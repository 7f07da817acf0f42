//! Worked examples as an executable conformance check.

use serde::Serialize;

use crate::cipher::{mono_substitute, CharMap, SubstitutionAlphabet, UnmappedPolicy};
use crate::data::{DataSet, PAPER_CHARMAP_11, PAPER_CHARMAP_9, PAPER_LEXICON, PAPER_PIPELINE};
use crate::keystream::geffe_combine;
use crate::nl::{nl_decrypt, nl_encrypt, pre_encode_text, translate_mix, Direction};

pub const MONO_KEY: &str = "QWERTYUIOPASDFGHJKLZXCVBNM";

/// Output column of the Boolean table, rows (x1, x2, x3) = 000 to 111.
pub const GEFFE_TABLE: [u8; 8] = [0, 1, 0, 1, 0, 0, 1, 1];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoCase {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl DemoCase {
    fn new(name: &str, expected: &str, actual: Result<String, String>) -> Self {
        let actual = actual.unwrap_or_else(|e| format!("error: {e}"));
        DemoCase {
            name: name.to_string(),
            passed: actual == expected,
            expected: expected.to_string(),
            actual,
        }
    }
}

fn charmap(data: &DataSet, name: &str) -> Result<CharMap, String> {
    let doc = data.get(name).map_err(|e| e.to_string())?;
    CharMap::from_json(doc).map_err(|e| e.to_string())
}

/// Runs every example against the files in `data`.
pub fn run_demo(data: &DataSet) -> Vec<DemoCase> {
    let mut cases = Vec::new();

    let key = SubstitutionAlphabet::parse(MONO_KEY).map_err(|e| e.to_string());
    cases.push(DemoCase::new(
        "mono-substitution ATTACK",
        "QZZQEA",
        key.clone().map(|k| mono_substitute("ATTACK", &k)),
    ));
    cases.push(DemoCase::new(
        "mono-substitution inverse",
        "ATTACK",
        key.map(|k| mono_substitute("QZZQEA", &k.invert())),
    ));

    let map9 = charmap(data, PAPER_CHARMAP_9);
    cases.push(DemoCase::new(
        "charsub 9 pairs",
        "aca rz q gcext",
        map9.and_then(|m| m.apply("bob is a joker", UnmappedPolicy::Passthrough).map_err(|e| e.to_string())),
    ));

    let lexicon = data.lexicon(PAPER_LEXICON).map_err(|e| e.to_string());
    cases.push(DemoCase::new(
        "mix forward",
        "bob es un joker",
        lexicon
            .clone()
            .map(|l| translate_mix("bob is a joker", &l, Direction::Forward).0),
    ));
    cases.push(DemoCase::new(
        "mix reverse",
        "bob is a joker",
        lexicon.map(|l| translate_mix("bob es un joker", &l, Direction::Reverse).0),
    ));

    let map11 = charmap(data, PAPER_CHARMAP_11);
    cases.push(DemoCase::new(
        "charsub 11 pairs",
        "aca xz hl gcext",
        map11.and_then(|m| m.apply("bob es un joker", UnmappedPolicy::Passthrough).map_err(|e| e.to_string())),
    ));

    let pipeline = data.pipeline(PAPER_PIPELINE).map_err(|e| e.to_string());
    cases.push(DemoCase::new(
        "pipeline pre-encode text",
        "aca xz hl gcext",
        pipeline
            .clone()
            .and_then(|cfg| pre_encode_text("bob is a joker", &cfg).map_err(|e| e.to_string())),
    ));
    cases.push(DemoCase::new(
        "pipeline round trip",
        "bob is a joker",
        pipeline.and_then(|cfg| {
            let ct = nl_encrypt("bob is a joker", &cfg).map_err(|e| e.to_string())?;
            nl_decrypt(&ct, &cfg).map_err(|e| e.to_string())
        }),
    ));

    let expected: String = GEFFE_TABLE.iter().map(|b| char::from(b'0' + b)).collect();
    let actual: String = (0..8u8)
        .map(|row| char::from(b'0' + geffe_combine(row >> 2 & 1, row >> 1 & 1, row & 1)))
        .collect();
    cases.push(DemoCase::new("geffe boolean table", &expected, Ok(actual)));
    cases
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_cases_pass_on_bundled_data() {
        let cases = run_demo(crate::data::bundled());
        assert_eq!(cases.len(), 9);
        for c in &cases {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn broken_data_is_reported_not_panicked() {
        let dir = std::env::temp_dir().join(format!("cipherlab-demo-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join(PAPER_CHARMAP_9), r#"{"b":"z"}"#).unwrap();
        std::fs::write(dir.join(PAPER_LEXICON), "not json").unwrap();
        let data = DataSet::load_dir(&dir).unwrap();
        let cases = run_demo(&data);
        let failed: Vec<_> = cases.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"charsub 9 pairs"));
        assert!(failed.contains(&"mix forward"));
        assert!(failed.contains(&"pipeline round trip"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
