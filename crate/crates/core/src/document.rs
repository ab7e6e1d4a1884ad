//! Versioned JSON model documents shared by every trainable model.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported document version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("document kind `{found}` does not match expected `{expected}`")]
    Kind { expected: String, found: String },
    #[error("vocabulary hash mismatch: document says {stated}, parameters hash to {actual}")]
    VocabularyHash { stated: String, actual: String },
}

/// Implemented by models that can be wrapped in a [`ModelDocument`].
pub trait Documented {
    fn kind(&self) -> &'static str;
    /// Fingerprint of the input vocabulary or feature map the parameters are tied to.
    fn vocabulary_hash(&self) -> Option<String>;
    fn seed(&self) -> Option<u64> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument<M> {
    pub format_version: u32,
    pub kind: String,
    pub seed: Option<u64>,
    pub vocabulary_hash: Option<String>,
    pub model: M,
}

impl<M: Documented + Serialize + DeserializeOwned> ModelDocument<M> {
    pub fn new(model: M) -> Self {
        ModelDocument {
            format_version: FORMAT_VERSION,
            kind: model.kind().to_string(),
            seed: model.seed(),
            vocabulary_hash: model.vocabulary_hash(),
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model documents hold only finite values")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let doc: ModelDocument<M> = serde_json::from_str(text)?;
        if doc.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(doc.format_version));
        }
        if doc.kind != doc.model.kind() {
            return Err(DocumentError::Kind {
                expected: doc.model.kind().to_string(),
                found: doc.kind,
            });
        }
        let actual = doc.model.vocabulary_hash();
        if doc.vocabulary_hash != actual {
            return Err(DocumentError::VocabularyHash {
                stated: doc.vocabulary_hash.unwrap_or_default(),
                actual: actual.unwrap_or_default(),
            });
        }
        Ok(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DocumentError> {
        let path = path.as_ref();
        fs::write(path, self.to_json() + "\n").map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DocumentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}
