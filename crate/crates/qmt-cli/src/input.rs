//! Input documents and the inline spectrum shorthand.
//!
//! Documents are TOML with top-level fields `d` (dimension), `spectra`
//! (list of value lists), and optional `labels`:
//!
//! ```toml
//! d = 2
//! spectra = [[1.0, 0.0], [0.0, 1.0]]
//! labels = ["up", "down"]
//! ```
//!
//! A single spectrum can be passed inline on the command line as
//! `"[1, 0.5]"`.

use std::path::Path;

use serde::Deserialize;

use qmt::spectrum::SingularSpectrum;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectraDoc {
    d: usize,
    spectra: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

/// Parsed input: one labeled spectrum per outcome.
#[derive(Debug)]
pub struct LabeledSpectra {
    pub dim: usize,
    pub spectra: Vec<SingularSpectrum>,
    pub labels: Vec<String>,
}

#[derive(Debug)]
pub enum InputError {
    Io(std::io::Error),
    Parse(String),
    Validation(qmt::Error),
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InputError::Io(e) => write!(f, "cannot read input: {e}"),
            InputError::Parse(msg) => write!(f, "parse error: {msg}"),
            InputError::Validation(e) => write!(f, "invalid spectrum: {e}"),
        }
    }
}

impl std::error::Error for InputError {}

fn build_spectrum(values: Vec<f64>, auto_rescale: bool) -> Result<SingularSpectrum, InputError> {
    let result = if auto_rescale {
        SingularSpectrum::new_rescaled(values)
    } else {
        SingularSpectrum::new(values)
    };
    result.map_err(InputError::Validation)
}

/// Reads a TOML spectra document from disk.
pub fn read_document(path: &Path, auto_rescale: bool) -> Result<LabeledSpectra, InputError> {
    let text = std::fs::read_to_string(path).map_err(InputError::Io)?;
    let doc: SpectraDoc =
        toml::from_str(&text).map_err(|e| InputError::Parse(e.to_string()))?;
    if doc.spectra.is_empty() {
        return Err(InputError::Parse("document lists no spectra".into()));
    }
    for (i, row) in doc.spectra.iter().enumerate() {
        if row.len() != doc.d {
            return Err(InputError::Parse(format!(
                "spectrum {} has {} values, document says d = {}",
                i + 1,
                row.len(),
                doc.d
            )));
        }
    }
    let labels = match doc.labels {
        Some(labels) => {
            if labels.len() != doc.spectra.len() {
                return Err(InputError::Parse(format!(
                    "{} labels for {} spectra",
                    labels.len(),
                    doc.spectra.len()
                )));
            }
            labels
        }
        None => (1..=doc.spectra.len()).map(|i| format!("m{i}")).collect(),
    };
    let spectra = doc
        .spectra
        .into_iter()
        .map(|values| build_spectrum(values, auto_rescale))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LabeledSpectra {
        dim: doc.d,
        spectra,
        labels,
    })
}

/// Parses the inline shorthand `[v1, v2, ...]`.
pub fn parse_inline(text: &str, auto_rescale: bool) -> Result<SingularSpectrum, InputError> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| {
            InputError::Parse(format!(
                "inline spectrum must look like [1, 0.5], got {trimmed:?}"
            ))
        })?;
    let values = inner
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| InputError::Parse(format!("not a number: {tok:?}")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    build_spectrum(values, auto_rescale)
}

/// Accepts either an inline spectrum or a document path. Arguments starting
/// with `[` are inline; anything else is a path.
pub fn spectra_from_arg(
    arg: &str,
    auto_rescale: bool,
) -> Result<LabeledSpectra, InputError> {
    if arg.trim_start().starts_with('[') {
        let s = parse_inline(arg, auto_rescale)?;
        Ok(LabeledSpectra {
            dim: s.dim(),
            labels: vec!["m1".to_string()],
            spectra: vec![s],
        })
    } else {
        read_document(Path::new(arg), auto_rescale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_parses_and_sorts() {
        let s = parse_inline("[0.5, 1.0]", false).unwrap();
        assert_eq!(s.values(), &[1.0, 0.5]);
        assert!(parse_inline("1, 0.5", false).is_err());
        assert!(parse_inline("[1, abc]", false).is_err());
        assert!(parse_inline("[1.5, 0.5]", false).is_err());
        assert!(parse_inline("[1.5, 0.5]", true).is_ok());
    }

    #[test]
    fn document_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("set.toml");
        std::fs::write(
            &path,
            "d = 2\nspectra = [[1.0, 0.0], [0.0, 1.0]]\nlabels = [\"a\", \"b\"]\n",
        )
        .unwrap();
        let doc = read_document(&path, false).unwrap();
        assert_eq!(doc.dim, 2);
        assert_eq!(doc.labels, vec!["a", "b"]);
        assert_eq!(doc.spectra.len(), 2);
    }

    #[test]
    fn document_rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "d = 2\nspectra = [[1.0, 0.0, 0.0]]\n").unwrap();
        assert!(matches!(
            read_document(&path, false),
            Err(InputError::Parse(_))
        ));
    }
}
