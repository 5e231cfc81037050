use std::collections::HashMap;
use std::path::Path;

use crate::uri::LabeledUri;

#[derive(Debug, thiserror::Error)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} dimensions, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("embedding file has no vectors")]
    Empty,
    #[error("label {0:?} has no tokens")]
    EmptyLabel(String),
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("vectors of dimension {0} and {1}")]
    DimensionDiffers(usize, usize),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub dimension: usize,
    pub vectors: HashMap<String, Vec<f64>>,
    pub idf: HashMap<String, f64>,
    /// Component-wise mean of all vectors.
    pub default_vector: Vec<f64>,
    /// Largest idf in the idf file (1.0 if it is empty).
    pub default_idf: f64,
}

fn read(path: &Path) -> Result<String, EmbeddingError> {
    std::fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_embeddings(
    vectors_path: impl AsRef<Path>,
    idf_path: impl AsRef<Path>,
) -> Result<EmbeddingTable, EmbeddingError> {
    EmbeddingTable::parse(&read(vectors_path.as_ref())?, &read(idf_path.as_ref())?)
}

impl EmbeddingTable {
    /// Vectors: `word v1 … vD` per line. A leading word2vec-style header
    /// (`count dimension`) is skipped. IDF: `word idf` per line, idf > 0.
    pub fn parse(vectors: &str, idf: &str) -> Result<Self, EmbeddingError> {
        let mut dimension = None;
        let mut table: HashMap<String, Vec<f64>> = HashMap::new();
        for (i, line) in vectors.lines().enumerate() {
            let line_no = i + 1;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if i == 0
                && rest.len() == 1
                && word.parse::<u64>().is_ok()
                && rest[0].parse::<u64>().is_ok()
            {
                continue;
            }
            let values = rest
                .iter()
                .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| EmbeddingError::ParseError {
                    line: line_no,
                    message: format!("non-numeric component for {word:?}"),
                })?;
            if values.is_empty() {
                return Err(EmbeddingError::ParseError {
                    line: line_no,
                    message: format!("no components for {word:?}"),
                });
            }
            match dimension {
                None => dimension = Some(values.len()),
                Some(d) if d != values.len() => {
                    return Err(EmbeddingError::DimensionMismatch {
                        line: line_no,
                        expected: d,
                        found: values.len(),
                    })
                }
                Some(_) => {}
            }
            table.insert(word.to_string(), values);
        }
        let dimension = dimension.ok_or(EmbeddingError::Empty)?;

        let mut idf_table = HashMap::new();
        for (i, line) in idf.lines().enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                [word, value] => match value.parse::<f64>() {
                    Ok(v) if v > 0.0 && v.is_finite() => {
                        idf_table.insert(word.to_string(), v);
                    }
                    _ => {
                        return Err(EmbeddingError::ParseError {
                            line: i + 1,
                            message: format!("idf for {word:?} must be a positive number"),
                        })
                    }
                },
                _ => {
                    return Err(EmbeddingError::ParseError {
                        line: i + 1,
                        message: "expected `word idf`".into(),
                    })
                }
            }
        }

        // Sum in sorted word order so the mean does not depend on hash order.
        let mut words: Vec<&String> = table.keys().collect();
        words.sort();
        let mut default_vector = vec![0.0; dimension];
        for w in &words {
            for (d, x) in default_vector.iter_mut().zip(&table[*w]) {
                *d += x;
            }
        }
        for d in &mut default_vector {
            *d /= words.len() as f64;
        }
        let default_idf = idf_table
            .values()
            .copied()
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));

        Ok(EmbeddingTable {
            dimension,
            vectors: table,
            idf: idf_table,
            default_vector,
            default_idf: default_idf.unwrap_or(1.0),
        })
    }

    pub fn vector(&self, word: &str) -> &[f64] {
        self.vectors.get(word).unwrap_or(&self.default_vector)
    }

    pub fn idf(&self, word: &str) -> f64 {
        self.idf.get(word).copied().unwrap_or(self.default_idf)
    }

    /// IDF-weighted average of the token vectors.
    pub fn embed_label(&self, label: &str) -> Result<Vec<f64>, EmbeddingError> {
        let tokens = tokenize(label);
        if tokens.is_empty() {
            return Err(EmbeddingError::EmptyLabel(label.to_string()));
        }
        let mut sum = vec![0.0; self.dimension];
        let mut weight = 0.0;
        for t in &tokens {
            let w = self.idf(t);
            for (s, x) in sum.iter_mut().zip(self.vector(t)) {
                *s += w * x;
            }
            weight += w;
        }
        for s in &mut sum {
            *s /= weight;
        }
        Ok(sum)
    }
}

/// Lowercases, drops punctuation and splits on whitespace.
pub fn tokenize(label: &str) -> Vec<String> {
    label
        .to_lowercase()
        .chars()
        .filter(|c| !c.is_ascii_punctuation())
        .collect::<String>()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

pub fn embed_uri(labeled: &LabeledUri, table: &EmbeddingTable) -> Result<Vec<f64>, EmbeddingError> {
    table.embed_label(&labeled.label)
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionDiffers(a.len(), b.len()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok(dot / (na * nb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_words() {
        let t = EmbeddingTable::parse("a 1 0 0\nb 0 1 0\n", "a 1\nb 2\n").unwrap();
        assert_eq!(t.dimension, 3);
        assert_eq!(t.vectors.len(), 2);
        assert_eq!(t.default_idf, 2.0);
    }

    #[test]
    fn dimension_mismatch_line() {
        let e = EmbeddingTable::parse("a 1 0 0\nb 0 1 0 1\n", "").unwrap_err();
        assert!(matches!(
            e,
            EmbeddingError::DimensionMismatch {
                line: 2,
                expected: 3,
                found: 4
            }
        ));
        let e = EmbeddingTable::parse("a 1 x\n", "").unwrap_err();
        assert!(matches!(e, EmbeddingError::ParseError { line: 1, .. }));
        let e = EmbeddingTable::parse("a 1\n", "a 0\n").unwrap_err();
        assert!(matches!(e, EmbeddingError::ParseError { line: 1, .. }));
    }

    #[test]
    fn mean_default_vector() {
        let t = EmbeddingTable::parse("2 2\nx 1 0\ny 0 1\n", "x 1\n").unwrap();
        assert_eq!(t.default_vector, vec![0.5, 0.5]);
        assert_eq!(t.embed_label("unknown").unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn weighted_average() {
        let t = EmbeddingTable::parse("x 1 0\ny 0 1\n", "x 1\ny 3\n").unwrap();
        assert_eq!(t.embed_label("X").unwrap(), vec![1.0, 0.0]);
        assert_eq!(t.embed_label("x y").unwrap(), vec![0.25, 0.75]);
        assert_eq!(
            t.embed_label("y, x").unwrap(),
            t.embed_label("x y").unwrap()
        );
        assert!(matches!(
            t.embed_label(" - "),
            Err(EmbeddingError::EmptyLabel(_))
        ));
    }

    #[test]
    fn cosine_values() {
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(EmbeddingError::ZeroVector)
        ));
    }
}
