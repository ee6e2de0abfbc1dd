//! Serialization of rings and module lists.
//!
//! Rings use JSON `{name, labels, unit, dual, N}`. Module lists come in a
//! JSON form and a plain text form:
//!
//! ```text
//! ring <name> hash <sha256 of canonical ring JSON> count <n>
//!
//! module 1 rank 2
//! <rank rows of M[0]>
//! <rank rows of M[1]>
//! ...
//!
//! module 2 rank 3
//! ...
//! ```
//!
//! Every load re-validates rings and modules.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::module::{FusionModule, ModuleViolation};
use crate::ring::{FusionRing, RingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("ring hash mismatch: file has {found}, ring has {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("module {index} is invalid: {violation}")]
    InvalidModule { index: usize, violation: ModuleViolation },
    #[error("declared count {declared} but found {found} modules")]
    Count { declared: usize, found: usize },
}

#[derive(Serialize, Deserialize)]
struct RingJson {
    name: String,
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    #[serde(rename = "N")]
    n: Vec<Vec<Vec<u32>>>,
}

fn ring_json(r: &FusionRing) -> RingJson {
    RingJson {
        name: r.name().to_string(),
        labels: r.labels().to_vec(),
        unit: r.unit(),
        dual: r.duals().to_vec(),
        n: r.table(),
    }
}

/// Compact canonical JSON of a ring.
pub fn ring_to_canonical_json(r: &FusionRing) -> String {
    serde_json::to_string(&ring_json(r)).expect("ring serializes")
}

/// Hex SHA-256 of the canonical ring JSON.
pub fn ring_hash(r: &FusionRing) -> String {
    hex::encode(Sha256::digest(ring_to_canonical_json(r).as_bytes()))
}

pub fn save_ring(r: &FusionRing) -> String {
    let mut s = serde_json::to_string_pretty(&ring_json(r)).expect("ring serializes");
    s.push('\n');
    s
}

/// Parse and validate a ring.
pub fn load_ring(src: &str) -> Result<FusionRing, IoError> {
    let j: RingJson = serde_json::from_str(src).map_err(|e| IoError::Json(e.to_string()))?;
    Ok(FusionRing::new(j.name, j.labels, j.unit, j.dual, &j.n)?)
}

#[derive(Serialize, Deserialize)]
struct ModuleEntry {
    index: usize,
    rank: usize,
    matrices: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct ModuleListJson {
    ring: String,
    ring_hash: String,
    count: usize,
    modules: Vec<ModuleEntry>,
}

pub fn save_modules_json(ring: &FusionRing, modules: &[FusionModule]) -> String {
    let j = ModuleListJson {
        ring: ring.name().to_string(),
        ring_hash: ring_hash(ring),
        count: modules.len(),
        modules: modules
            .iter()
            .enumerate()
            .map(|(k, m)| ModuleEntry {
                index: k + 1,
                rank: m.rank(),
                matrices: m.matrices().to_vec(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&j).expect("module list serializes");
    s.push('\n');
    s
}

fn check_hash(ring: &FusionRing, found: &str) -> Result<(), IoError> {
    let expected = ring_hash(ring);
    if expected != found {
        return Err(IoError::HashMismatch {
            expected,
            found: found.to_string(),
        });
    }
    Ok(())
}

fn build_module(ring: &Arc<FusionRing>, index: usize, mats: Vec<Matrix>) -> Result<FusionModule, IoError> {
    FusionModule::new(ring.clone(), mats).map_err(|e| match e {
        crate::module::ModuleError::Invalid(violation) => IoError::InvalidModule { index, violation },
        other => IoError::Json(other.to_string()),
    })
}

pub fn load_modules_json(ring: &Arc<FusionRing>, src: &str) -> Result<Vec<FusionModule>, IoError> {
    let j: ModuleListJson = serde_json::from_str(src).map_err(|e| IoError::Json(e.to_string()))?;
    check_hash(ring, &j.ring_hash)?;
    if j.count != j.modules.len() {
        return Err(IoError::Count {
            declared: j.count,
            found: j.modules.len(),
        });
    }
    j.modules
        .into_iter()
        .map(|e| {
            if e.matrices.iter().any(|m| m.dim() != e.rank) {
                return Err(IoError::InvalidModule {
                    index: e.index,
                    violation: ModuleViolation::Shape(format!("expected rank {}", e.rank)),
                });
            }
            build_module(ring, e.index, e.matrices)
        })
        .collect()
}

pub fn save_modules_text(ring: &FusionRing, modules: &[FusionModule]) -> String {
    let mut s = format!("ring {} hash {} count {}\n", ring.name(), ring_hash(ring), modules.len());
    for (k, m) in modules.iter().enumerate() {
        s.push('\n');
        s.push_str(&format!("module {} rank {}\n", k + 1, m.rank()));
        for mat in m.matrices() {
            for r in 0..mat.dim() {
                let row: Vec<String> = mat.row(r).iter().map(u32::to_string).collect();
                s.push_str(&row.join(" "));
                s.push('\n');
            }
        }
    }
    s
}

pub fn load_modules_text(ring: &Arc<FusionRing>, src: &str) -> Result<Vec<FusionModule>, IoError> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, msg: &str| IoError::Parse {
        line,
        msg: msg.to_string(),
    };
    let (ln, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let w = words.len();
    if w < 6 || words[0] != "ring" || words[w - 4] != "hash" || words[w - 2] != "count" {
        return Err(err(ln, "expected 'ring <name> hash <hex> count <n>'"));
    }
    check_hash(ring, words[w - 3])?;
    let count: usize = words[w - 1].parse().map_err(|_| err(ln, "bad count"))?;
    let mut out = Vec::new();
    while let Some((ln, line)) = lines.next() {
        let words: Vec<&str> = line.split_whitespace().collect();
        let (index, rank) = match words.as_slice() {
            ["module", k, "rank", r] => (
                k.parse::<usize>().map_err(|_| err(ln, "bad module index"))?,
                r.parse::<usize>().map_err(|_| err(ln, "bad rank"))?,
            ),
            _ => return Err(err(ln, "expected 'module <k> rank <r>'")),
        };
        let mut mats = Vec::with_capacity(ring.rank());
        for _ in 0..ring.rank() {
            let mut rows = Vec::with_capacity(rank);
            for _ in 0..rank {
                let (ln, row) = lines.next().ok_or_else(|| err(ln, "truncated matrix block"))?;
                let row: Vec<u32> = row
                    .split_whitespace()
                    .map(|x| x.parse::<u32>().map_err(|_| err(ln, "bad matrix entry")))
                    .collect::<Result<_, _>>()?;
                if row.len() != rank {
                    return Err(err(ln, "row length differs from rank"));
                }
                rows.push(row);
            }
            mats.push(Matrix::from_rows(&rows).expect("square by construction"));
        }
        out.push(build_module(ring, index, mats)?);
    }
    if out.len() != count {
        return Err(IoError::Count {
            declared: count,
            found: out.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::catalog::{catalog_names, catalog_ring};

    #[test]
    fn ring_round_trip() {
        for name in catalog_names() {
            let r = catalog_ring(name).unwrap().ring;
            let back = load_ring(&save_ring(&r)).unwrap();
            assert_eq!(&back, r.as_ref());
            assert_eq!(ring_hash(&back), ring_hash(&r));
        }
    }

    #[test]
    fn ring_load_errors() {
        let r = catalog_ring("HI-Z4").unwrap().ring;
        let s = save_ring(&r);
        assert!(matches!(load_ring(&s[..s.len() / 2]), Err(IoError::Json(_))));
        let mut j: serde_json::Value = serde_json::from_str(&s).unwrap();
        j["N"][4][4][4] = serde_json::json!(2);
        assert!(matches!(load_ring(&j.to_string()), Err(IoError::Ring(RingError::Invalid(_)))));
    }

    #[test]
    fn module_round_trip_and_errors() {
        let r = catalog_ring("HI-Z4").unwrap().ring;
        let k = FusionModule::regular(r.clone());
        let mods = vec![k.clone(), k.permuted(&[1, 2, 3, 0, 5, 6, 7, 4])];
        let text = save_modules_text(&r, &mods);
        assert_eq!(load_modules_text(&r, &text).unwrap(), mods);
        let json = save_modules_json(&r, &mods);
        assert_eq!(load_modules_json(&r, &json).unwrap(), mods);

        let empty = save_modules_text(&r, &[]);
        assert!(empty.contains("count 0"));
        assert!(load_modules_text(&r, &empty).unwrap().is_empty());

        let other = catalog_ring("HI-Z2xZ2").unwrap().ring;
        assert!(matches!(load_modules_text(&other, &text), Err(IoError::HashMismatch { .. })));

        // corrupt one entry of the second module's x1 block
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let at = lines.iter().position(|l| l == "module 2 rank 8").unwrap() + 9;
        lines[at] = lines[at].replacen('0', "3", 1);
        let bad = lines.join("\n");
        assert!(matches!(
            load_modules_text(&r, &bad),
            Err(IoError::InvalidModule { index: 2, .. })
        ));
        assert!(matches!(load_modules_text(&r, &text[..text.len() - 4]), Err(IoError::Parse { .. })));
    }
}
