//! Bundled reference data, the `CIPHERLAB_DATA` override and the generators
//! for the derived files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use thiserror::Error;

use crate::cryptanalysis::correlation::{CorrelationInput, RegisterShape};
use crate::cryptanalysis::{letter_frequency, word_core, LanguageModel, QuadgramCounts, QuadgramModel};
use crate::keystream::{GeffeSpec, GeneratorSpec, LfsrConfig, LfsrSpec, LfsrState};
use crate::nl::{MixLexicon, NlError, PipelineConfig, PipelineFile};

pub const DATA_ENV: &str = "CIPHERLAB_DATA";

pub const CORPUS: &str = "english_corpus.txt";
pub const HELDOUT: &str = "english_heldout.txt";
pub const PROFILE: &str = "english_profile.json";
pub const QUADGRAMS: &str = "quadgrams.json";
pub const WORDLIST: &str = "wordlist.txt";
pub const SPANGLISH: &str = "spanglish.json";
pub const PAPER_LEXICON: &str = "lexicon_paper.json";
pub const PAPER_CHARMAP_9: &str = "charmap_paper9.json";
pub const PAPER_CHARMAP_11: &str = "charmap_paper11.json";
pub const PAPER_PIPELINE: &str = "pipeline_paper.json";
pub const GEFFE_DEMO: &str = "geffe_demo.json";
pub const GEFFE_DEMO_TRUTH: &str = "geffe_demo_truth.json";

/// Files produced by [`regenerate`] from the corpus files.
pub const DERIVED: [&str; 5] = [PROFILE, QUADGRAMS, WORDLIST, GEFFE_DEMO, GEFFE_DEMO_TRUTH];

macro_rules! bundle {
    ($($name:expr),* $(,)?) => {
        [$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $name)))),*]
    };
}

const BUNDLED: [(&str, &str); 12] = bundle!(
    "english_corpus.txt",
    "english_heldout.txt",
    "english_profile.json",
    "quadgrams.json",
    "wordlist.txt",
    "spanglish.json",
    "lexicon_paper.json",
    "charmap_paper9.json",
    "charmap_paper11.json",
    "pipeline_paper.json",
    "geffe_demo.json",
    "geffe_demo_truth.json",
);

/// Source directory of the bundled files, for regeneration in a checkout.
pub fn source_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{name}: {message}")]
    Parse { name: String, message: String },
    #[error("no data file named {0}")]
    Missing(String),
}

/// A named collection of data files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataSet {
    files: BTreeMap<String, String>,
    origin: Option<PathBuf>,
}

impl DataSet {
    fn from_bundle() -> Self {
        DataSet {
            files: BUNDLED
                .iter()
                .map(|(n, c)| (n.to_string(), c.to_string()))
                .collect(),
            origin: None,
        }
    }

    /// Bundled files overlaid with any same-named files found in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, DataError> {
        if !dir.is_dir() {
            return Err(DataError::Io {
                path: dir.to_path_buf(),
                message: "not a directory".into(),
            });
        }
        let mut set = Self::from_bundle();
        for (name, _) in BUNDLED {
            let path = dir.join(name);
            if path.exists() {
                let text = std::fs::read_to_string(&path).map_err(|e| DataError::Io {
                    path: path.clone(),
                    message: e.to_string(),
                })?;
                set.files.insert(name.to_string(), text);
            }
        }
        set.origin = Some(dir.to_path_buf());
        Ok(set)
    }

    /// The directory named by `CIPHERLAB_DATA` if set, else the bundled data.
    pub fn from_env() -> Result<Self, DataError> {
        match std::env::var_os(DATA_ENV) {
            Some(dir) if !dir.is_empty() => Self::load_dir(Path::new(&dir)),
            _ => Ok(bundled().clone()),
        }
    }

    pub fn origin(&self) -> Option<&Path> {
        self.origin.as_deref()
    }

    pub fn get(&self, name: &str) -> Result<&str, DataError> {
        self.files
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| DataError::Missing(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    pub fn corpus(&self) -> &str {
        &self.files[CORPUS]
    }

    pub fn heldout(&self) -> &str {
        &self.files[HELDOUT]
    }

    pub fn language_model(&self) -> Result<LanguageModel, DataError> {
        let parse = |name: &str, e: &dyn std::fmt::Display| DataError::Parse {
            name: name.to_string(),
            message: e.to_string(),
        };
        let profile = crate::cryptanalysis::FrequencyProfile::from_json(self.get(PROFILE)?)
            .map_err(|e| parse(PROFILE, &e))?;
        let quadgrams =
            QuadgramModel::from_json(self.get(QUADGRAMS)?).map_err(|e| parse(QUADGRAMS, &e))?;
        Ok(LanguageModel::new(profile, quadgrams, self.get(WORDLIST)?))
    }

    pub fn lexicon(&self, name: &str) -> Result<MixLexicon, DataError> {
        MixLexicon::from_json(self.get(name)?).map_err(|e| DataError::Parse {
            name: name.to_string(),
            message: e.to_string(),
        })
    }

    /// Resolves a pipeline file whose references name other files in this set.
    pub fn pipeline(&self, name: &str) -> Result<PipelineConfig, NlError> {
        let text = self.get(name).map_err(|e| NlError::Pipeline(e.to_string()))?;
        let file: PipelineFile = serde_json::from_str(text).map_err(|e| NlError::ConfigFile {
            path: name.into(),
            message: e.to_string(),
        })?;
        file.resolve_with(|p| {
            self.get(&p.to_string_lossy())
                .map(str::to_string)
                .map_err(|e| NlError::Io {
                    path: p.to_path_buf(),
                    message: e.to_string(),
                })
        })
    }

    /// Writes every file to `dir`.
    pub fn export(&self, dir: &Path) -> Result<Vec<PathBuf>, DataError> {
        write_files(dir, self.files.iter().map(|(n, c)| (n.as_str(), c.clone())))
    }
}

/// The data compiled into the library.
pub fn bundled() -> &'static DataSet {
    static SET: OnceLock<DataSet> = OnceLock::new();
    SET.get_or_init(DataSet::from_bundle)
}

/// Language model built from the bundled data.
pub fn bundled_model() -> &'static LanguageModel {
    static MODEL: OnceLock<LanguageModel> = OnceLock::new();
    MODEL.get_or_init(|| bundled().language_model().expect("bundled data is valid"))
}

/// Sentences of a text: split after '.', '!' or '?' followed by whitespace,
/// trimmed, empty pieces dropped.
pub fn sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        current.push(c);
        let ends = matches!(c, '.' | '!' | '?')
            && chars.peek().map_or(true, |n| n.is_whitespace());
        if ends {
            let s = current.split_whitespace().collect::<Vec<_>>().join(" ");
            if !s.is_empty() {
                out.push(s);
            }
            current.clear();
        }
    }
    let s = current.split_whitespace().collect::<Vec<_>>().join(" ");
    if !s.is_empty() {
        out.push(s);
    }
    out
}

// ---------------------------------------------------------------------------
// Regeneration of derived files
// ---------------------------------------------------------------------------

pub fn generate_profile(corpus: &str) -> String {
    letter_frequency(corpus)
        .expect("corpus has letters")
        .to_json()
        + "\n"
}

pub fn generate_quadgrams(corpus: &str) -> String {
    serde_json::to_string(&QuadgramCounts::from_text(corpus)).expect("serializable") + "\n"
}

/// Distinct lower-case words made only of letters, apostrophes and hyphens,
/// one per line, sorted.
pub fn generate_wordlist(texts: &[&str]) -> String {
    let mut words = BTreeSet::new();
    for text in texts {
        for token in text.split_whitespace() {
            let w = word_core(token).to_lowercase();
            if w.chars().any(|c| c.is_ascii_alphabetic())
                && w.chars().all(|c| c.is_ascii_alphabetic() || c == '\'' || c == '-')
            {
                words.insert(w);
            }
        }
    }
    words.into_iter().map(|w| w + "\n").collect()
}

fn demo_registers() -> (LfsrState, LfsrState, LfsrState) {
    let state = |l: usize, taps: &[usize], fill: &str| {
        LfsrState::from_bits(LfsrSpec::new(l, taps).expect("valid spec"), fill).expect("valid fill")
    };
    (
        state(5, &[5, 3], "10110"),
        state(7, &[7, 6], "1100101"),
        state(9, &[9, 5], "101001110"),
    )
}

pub const GEFFE_DEMO_BITS: usize = 1000;

/// The Geffe challenge: public shapes and 1000 output bits.
pub fn generate_geffe_demo() -> (String, String) {
    let (sel, a, b) = demo_registers();
    let g = GeffeSpec::new(sel, a, b).expect("distinct lengths");
    let (ks, _) = g.keystream(GEFFE_DEMO_BITS);
    let challenge = CorrelationInput {
        selector: RegisterShape::of(sel.spec()),
        tap_a: RegisterShape::of(a.spec()),
        tap_b: RegisterShape::of(b.spec()),
        bits: ks.render(),
    };
    let truth = GeneratorSpec::Geffe {
        selector: LfsrConfig::from_state(&sel),
        tap_a: LfsrConfig::from_state(&a),
        tap_b: LfsrConfig::from_state(&b),
        combiner: None,
    };
    (
        serde_json::to_string_pretty(&challenge).expect("serializable") + "\n",
        serde_json::to_string_pretty(&truth).expect("serializable") + "\n",
    )
}

/// Contents of every derived file, computed from the corpus files of `set`.
pub fn regenerate(set: &DataSet) -> Vec<(&'static str, String)> {
    let (demo, truth) = generate_geffe_demo();
    vec![
        (PROFILE, generate_profile(set.corpus())),
        (QUADGRAMS, generate_quadgrams(set.corpus())),
        (WORDLIST, generate_wordlist(&[set.corpus(), set.heldout()])),
        (GEFFE_DEMO, demo),
        (GEFFE_DEMO_TRUTH, truth),
    ]
}

fn write_files<'a>(
    dir: &Path,
    files: impl Iterator<Item = (&'a str, String)>,
) -> Result<Vec<PathBuf>, DataError> {
    let io = |path: &Path, e: std::io::Error| DataError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Regenerates the derived files from the corpus files in `dir` (bundled
/// corpus if absent) and writes them back into `dir`.
pub fn regenerate_dir(dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    let set = if dir.is_dir() {
        DataSet::load_dir(dir)?
    } else {
        bundled().clone()
    };
    write_files(dir, regenerate(&set).into_iter())
}
