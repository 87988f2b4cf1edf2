//! Reading systems, nets and words from disk.

use std::fs;
use std::path::{Path, PathBuf};

use ctslab_core::format::parse_system;
use ctslab_core::petri::{parse_pn, PetriNet};
use ctslab_core::{CompiledSystem, CtsSystem, ParseError};
use thiserror::Error;

#[derive(Error, Debug)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: ctslab_core::Error,
    },
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses without validating.
pub fn load_system(path: &Path) -> Result<CtsSystem, IoError> {
    parse_system(&read_text(path)?).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_compiled(path: &Path) -> Result<CompiledSystem, IoError> {
    load_system(path)?.compile().map_err(|source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_net(path: &Path) -> Result<PetriNet, IoError> {
    parse_pn(&read_text(path)?).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Whitespace-separated terminal tokens; `#` starts a comment.
pub fn read_word_tokens(path: &Path) -> Result<Vec<String>, IoError> {
    Ok(read_text(path)?
        .lines()
        .flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace())
        .map(str::to_string)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_files_ignore_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.txt");
        fs::write(&p, "aa b # trailing\n\n~ c\n").unwrap();
        assert_eq!(read_word_tokens(&p).unwrap(), ["aa", "b", "~", "c"]);
    }

    #[test]
    fn missing_files_name_the_path() {
        let e = load_system(Path::new("/nonexistent/x.cts")).unwrap_err();
        assert!(e.to_string().starts_with("/nonexistent/x.cts"));
    }
}
