//! The descriptor file format: line-oriented `key = value` records with `#`
//! comments, and the whitespace-separated matrix file format.
//!
//! The format is flat on purpose: descriptors diff cleanly and the canonical
//! serialization is specified bit-exactly. Unknown and duplicate keys are
//! rejected; booleans are exactly `true` or `false`; Betti vectors are
//! comma-separated integers with `?` for unknown entries.

use thiserror::Error;

use crate::charclass::LaiPairingData;
use crate::descriptor::{EmbeddingData, ManifoldDescriptor};
use crate::groups::{parse_presentation, PresentationError};
use crate::homology::{Betti, BettiTable};
use crate::matrix::IntegerMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: {source}")]
    Presentation {
        line: usize,
        source: PresentationError,
    },
    #[error("matrix file: {0}")]
    Matrix(String),
}

/// Every legal key, in canonical serialization order.
const KEYS: [&str; 18] = [
    "dim",
    "closed",
    "orientable",
    "betti_z",
    "betti_z2",
    "simply_connected",
    "torsion_free",
    "stably_parallelizable",
    "w2_zero",
    "bockstein_w2_zero",
    "c1_zero",
    "p1_zero",
    "c_top_pairing",
    "embeds_codim",
    "embeds_evidence",
    "pi1",
    "lai.n",
    "lai.pairings",
];

struct Record {
    key: &'static str,
    line: usize,
    value: String,
}

fn scan(text: &str) -> Result<Vec<Record>, FormatError> {
    let mut records: Vec<Record> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let eq = content.find('=').ok_or_else(|| FormatError::Syntax {
            line,
            message: "expected `key = value`".into(),
        })?;
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim().to_string();
        let canonical = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| FormatError::UnknownKey {
                line,
                key: key.to_string(),
            })?;
        if records.iter().any(|r| r.key == *canonical) {
            return Err(FormatError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        records.push(Record {
            key: canonical,
            line,
            value,
        });
    }
    Ok(records)
}

fn parse_bool(r: &Record) -> Result<bool, FormatError> {
    match r.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(FormatError::Syntax {
            line: r.line,
            message: format!("boolean must be `true` or `false`, got `{other}`"),
        }),
    }
}

fn parse_betti_list(r: &Record, expected_len: usize) -> Result<Vec<Betti>, FormatError> {
    let entries: Vec<Betti> = r
        .value
        .split(',')
        .map(|item| {
            let item = item.trim();
            if item == "?" {
                Ok(Betti::Unknown)
            } else {
                item.parse::<i64>()
                    .map_err(|_| FormatError::Syntax {
                        line: r.line,
                        message: format!("Betti entry `{item}` is not an integer or `?`"),
                    })
                    .and_then(|v| {
                        if v < 0 {
                            Err(FormatError::Syntax {
                                line: r.line,
                                message: format!("negative Betti entry {v}"),
                            })
                        } else {
                            Ok(Betti::Known(v))
                        }
                    })
            }
        })
        .collect::<Result<_, _>>()?;
    if entries.len() != expected_len {
        return Err(FormatError::Syntax {
            line: r.line,
            message: format!(
                "expected {expected_len} entries (dim + 1), got {}",
                entries.len()
            ),
        });
    }
    Ok(entries)
}

fn parse_int_list(r: &Record) -> Result<Vec<i64>, FormatError> {
    r.value
        .split(',')
        .map(|item| {
            item.trim().parse::<i64>().map_err(|_| FormatError::Syntax {
                line: r.line,
                message: format!("`{}` is not an integer", item.trim()),
            })
        })
        .collect()
}

/// Parse a descriptor from its file text.
pub fn read_descriptor_str(text: &str) -> Result<ManifoldDescriptor, FormatError> {
    let records = scan(text)?;
    let get = |key: &str| records.iter().find(|r| r.key == key);

    let dim_rec = get("dim").ok_or(FormatError::MissingKey("dim"))?;
    let dim: usize = dim_rec.value.parse().map_err(|_| FormatError::Syntax {
        line: dim_rec.line,
        message: format!("`{}` is not a dimension", dim_rec.value),
    })?;

    let closed = get("closed").map(parse_bool).transpose()?.unwrap_or(true);
    let orientable = get("orientable").map(parse_bool).transpose()?.unwrap_or(true);
    let z = match get("betti_z") {
        Some(r) => parse_betti_list(r, dim + 1)?,
        None => vec![Betti::Unknown; dim + 1],
    };
    let z2 = match get("betti_z2") {
        Some(r) => parse_betti_list(r, dim + 1)?,
        None => vec![Betti::Unknown; dim + 1],
    };
    let betti = BettiTable::new(dim, z, z2, closed, orientable).map_err(|e| {
        FormatError::Syntax {
            line: dim_rec.line,
            message: e.to_string(),
        }
    })?;
    let mut m = ManifoldDescriptor::new(betti);

    if let Some(r) = get("simply_connected") {
        m.simply_connected = parse_bool(r)?;
    }
    if let Some(r) = get("torsion_free") {
        m.torsion_free_homology = parse_bool(r)?;
    }
    if let Some(r) = get("stably_parallelizable") {
        m.stably_parallelizable = parse_bool(r)?;
    }
    if let Some(r) = get("w2_zero") {
        m.w2_zero = parse_bool(r)?;
    }
    if let Some(r) = get("bockstein_w2_zero") {
        m.bockstein_w2_zero = parse_bool(r)?;
    }
    if let Some(r) = get("c1_zero") {
        m.char_data.c1_zero = parse_bool(r)?;
    }
    if let Some(r) = get("p1_zero") {
        m.char_data.p1_zero = parse_bool(r)?;
    }
    if let Some(r) = get("c_top_pairing") {
        m.char_data.c_top_pairing =
            Some(r.value.parse::<i64>().map_err(|_| FormatError::Syntax {
                line: r.line,
                message: format!("`{}` is not an integer", r.value),
            })?);
    }

    match (get("embeds_codim"), get("embeds_evidence")) {
        (Some(codim_rec), evidence_rec) => {
            let codim: u32 = codim_rec.value.parse().map_err(|_| FormatError::Syntax {
                line: codim_rec.line,
                message: format!("`{}` is not a codimension", codim_rec.value),
            })?;
            let evidence = match evidence_rec {
                Some(r) => r.value.parse().map_err(|e: String| FormatError::Syntax {
                    line: r.line,
                    message: e,
                })?,
                None => crate::descriptor::EmbeddingEvidence::Asserted,
            };
            m.embeds = Some(EmbeddingData { codim, evidence });
        }
        (None, Some(r)) => {
            return Err(FormatError::Syntax {
                line: r.line,
                message: "embeds_evidence without embeds_codim".into(),
            });
        }
        (None, None) => {}
    }

    if let Some(r) = get("pi1") {
        let p = parse_presentation(&r.value).map_err(|source| FormatError::Presentation {
            line: r.line,
            source,
        })?;
        m.pi1 = Some(p);
    }

    match (get("lai.n"), get("lai.pairings")) {
        (Some(n_rec), Some(p_rec)) => {
            let n: usize = n_rec.value.parse().map_err(|_| FormatError::Syntax {
                line: n_rec.line,
                message: format!("`{}` is not a non-negative integer", n_rec.value),
            })?;
            let pairings = parse_int_list(p_rec)?;
            let lai = LaiPairingData::new(n, pairings).map_err(|e| FormatError::Syntax {
                line: p_rec.line,
                message: e.to_string(),
            })?;
            m.lai = Some(lai);
        }
        (Some(r), None) | (None, Some(r)) => {
            return Err(FormatError::Syntax {
                line: r.line,
                message: "lai.n and lai.pairings must appear together".into(),
            });
        }
        (None, None) => {}
    }

    Ok(m)
}

fn betti_list_string(entries: &[Betti]) -> String {
    entries
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical serialization: keys in the fixed order, `key = value` with
/// single spaces, optional keys present only when the data is.
pub fn write_descriptor(m: &ManifoldDescriptor) -> String {
    let mut out = String::new();
    let mut push = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    push("dim", m.dim().to_string());
    push("closed", m.betti.closed().to_string());
    push("orientable", m.betti.orientable().to_string());
    push("betti_z", betti_list_string(m.betti.z()));
    push("betti_z2", betti_list_string(m.betti.z2()));
    push("simply_connected", m.simply_connected.to_string());
    push("torsion_free", m.torsion_free_homology.to_string());
    push(
        "stably_parallelizable",
        m.stably_parallelizable.to_string(),
    );
    push("w2_zero", m.w2_zero.to_string());
    push("bockstein_w2_zero", m.bockstein_w2_zero.to_string());
    push("c1_zero", m.char_data.c1_zero.to_string());
    push("p1_zero", m.char_data.p1_zero.to_string());
    if let Some(c) = m.char_data.c_top_pairing {
        push("c_top_pairing", c.to_string());
    }
    if let Some(e) = m.embeds {
        push("embeds_codim", e.codim.to_string());
        push("embeds_evidence", e.evidence.to_string());
    }
    if let Some(p) = &m.pi1 {
        push("pi1", p.to_string());
    }
    if let Some(lai) = &m.lai {
        push("lai.n", lai.n().to_string());
        push(
            "lai.pairings",
            lai.pairings()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    }
    out
}

/// Matrix file: `rows cols` then row-major entries, whitespace-separated.
pub fn read_matrix_str(text: &str) -> Result<IntegerMatrix, FormatError> {
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize, FormatError> {
        tokens
            .next()
            .ok_or_else(|| FormatError::Matrix(format!("missing {what}")))?
            .parse::<usize>()
            .map_err(|_| FormatError::Matrix(format!("{what} is not a non-negative integer")))
    };
    let rows = next_usize("row count")?;
    let cols = next_usize("column count")?;
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows * cols {
        let tok = tokens
            .next()
            .ok_or_else(|| FormatError::Matrix(format!("expected {} entries, found {i}", rows * cols)))?;
        let v: i128 = tok
            .parse()
            .map_err(|_| FormatError::Matrix(format!("entry `{tok}` is not an integer")))?;
        entries.push(v);
    }
    if tokens.next().is_some() {
        return Err(FormatError::Matrix(format!(
            "trailing data after {} entries",
            rows * cols
        )));
    }
    IntegerMatrix::new(rows, cols, entries).map_err(|e| FormatError::Matrix(e.to_string()))
}
