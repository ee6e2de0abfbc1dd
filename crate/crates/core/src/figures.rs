//! Transcribed algebra tables for the modules over `HI-Z2xZ2`, `4442` and
//! `HI-Z4`, and matching of those tables against enumerated modules by
//! content.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::{parse_object, ExprError};
use crate::module::FusionModule;
use crate::ring::FusionRing;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FigureError {
    #[error("no transcribed table for ring {0:?}")]
    UnknownRing(String),
    #[error("row {row}: {source}")]
    Expr {
        row: String,
        #[source]
        source: ExprError,
    },
}

/// One row of an algebra table: internal ends with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureRow {
    pub label: String,
    pub ends: Vec<(String, usize)>,
}

impl FigureRow {
    fn new(label: impl Into<String>, ends: &[(&str, usize)]) -> Self {
        FigureRow {
            label: label.into(),
            ends: ends.iter().map(|&(e, n)| (e.to_string(), n)).collect(),
        }
    }

    /// Total number of module basis elements described by the row.
    pub fn rank(&self) -> usize {
        self.ends.iter().map(|(_, n)| n).sum()
    }
}

/// Ring names with a transcribed table.
pub fn figure_rings() -> &'static [&'static str] {
    &["HI-Z2xZ2", "4442", "HI-Z4"]
}

/// The transcribed rows for `ring_name`.
pub fn figure_rows(ring_name: &str) -> Result<Vec<FigureRow>, FigureError> {
    match ring_name {
        "HI-Z2xZ2" => Ok(calgs()),
        "4442" => Ok(c1algs()),
        "HI-Z4" => Ok(z4algs()),
        other => Err(FigureError::UnknownRing(other.to_string())),
    }
}

fn a(g: usize) -> String {
    if g == 0 {
        "1".into()
    } else {
        format!("a{g}")
    }
}

fn ar(g: usize) -> String {
    if g == 0 {
        "r".into()
    } else {
        format!("a{g}*r")
    }
}

fn calgs() -> Vec<FigureRow> {
    let mut rows = vec![
        FigureRow::new("1", &[("Gamma", 1), ("Gamma*(1+4*r)", 1)]),
        FigureRow::new("2", &[("Gamma*(1+r)", 1), ("Gamma*(1+3*r)", 1)]),
    ];
    for g in 1..4 {
        let first = format!("1+{}", a(g));
        let second = format!("1+{}+2*Gamma*r", a(g));
        rows.push(FigureRow::new(format!("3_{g}"), &[(&first, 2), (&second, 2)]));
    }
    // the first nonzero group element outside {0, g}
    let other = |g: usize| (1..4).find(|&k| k != g).expect("three nonzero elements");
    for g in 1..4 {
        for h in 1..4 {
            for k in [0, other(g)] {
                for l in [0, other(h)] {
                    let first = format!("(1+{})*(1+{})", a(g), ar(k));
                    let second = format!("(1+{})*(1+{})+Gamma*r", a(h), ar(l));
                    rows.push(FigureRow::new(
                        format!("4_{g},{h},{k},{l}"),
                        &[(&first, 2), (&second, 2)],
                    ));
                }
            }
        }
    }
    for g in 0..4 {
        let first = format!("1+{}", ar(g));
        rows.push(FigureRow::new(format!("5_{g}"), &[(&first, 4), ("Gamma*(1+3*r)", 1)]));
    }
    for g in 0..4 {
        let rest: Vec<String> = (0..4).filter(|&k| k != g).map(a).collect();
        let first = format!("1+({})*r", rest.join("+"));
        rows.push(FigureRow::new(format!("6_{g}"), &[(&first, 4), ("Gamma*(1+r)", 1)]));
    }
    rows.push(FigureRow::new("7", &[("1", 4), ("1+Gamma*r", 4)]));
    rows
}

fn c1algs() -> Vec<FigureRow> {
    let l3b = "(Lambda+3*b)";
    vec![
        FigureRow::new("1", &[("Lambda+3*b", 1), (&format!("{l3b}*(1+4*x)"), 1)]),
        FigureRow::new("2", &[(&format!("{l3b}*(1+x)"), 1), (&format!("{l3b}*(1+3*x)"), 1)]),
        FigureRow::new("3", &[("Lambda+b", 2), ("Lambda*(1+2*x)+b*(1+6*x)", 2)]),
        FigureRow::new("4", &[("(Lambda+b)*(1+x)", 2), ("Lambda*(1+2*x)+b*(1+4*x)", 2)]),
        FigureRow::new("5", &[("(Lambda+b)*(1+x)", 2), ("Lambda*(1+x)+b*(1+5*x)", 2)]),
        FigureRow::new("6", &[("Lambda+b+2*b*x", 2), ("Lambda*(1+2*x)+b*(1+4*x)", 2)]),
        FigureRow::new("7", &[("Lambda+b+2*b*x", 2), ("Lambda*(1+x)+b*(1+5*x)", 2)]),
        FigureRow::new("8", &[("Lambda*(1+x)", 4), (&format!("{l3b}*(1+3*x)"), 1)]),
        FigureRow::new(
            "9",
            &[("Lambda*(1+x)", 2), ("Lambda+b*x", 2), (&format!("{l3b}*(1+3*x)"), 1)],
        ),
        FigureRow::new("10", &[("Lambda+b*x", 4), (&format!("{l3b}*(1+3*x)"), 1)]),
        FigureRow::new("11", &[("Lambda*(1+x)+2*b*x", 4), (&format!("{l3b}*(1+x)"), 1)]),
        FigureRow::new(
            "12",
            &[("Lambda*(1+x)+2*b*x", 2), ("Lambda+3*b*x", 2), (&format!("{l3b}*(1+x)"), 1)],
        ),
        FigureRow::new("13", &[("Lambda+3*b*x", 4), (&format!("{l3b}*(1+x)"), 1)]),
        FigureRow::new("14", &[("1+b", 3), ("1+(1+Lambda)*x+b*(1+4*x)", 3)]),
        FigureRow::new("15", &[("(1+b)*(1+x)", 3), ("1+Lambda*x+b*(1+3*x)", 3)]),
        FigureRow::new(
            "16",
            &[("1+x", 3), ("(Lambda+2*b)*(1+x)", 1), ("1+Lambda*x+b*(1+3*x)", 3)],
        ),
        FigureRow::new(
            "17",
            &[("1+b*x", 3), ("(1+b)*(1+x)", 3), ("Lambda*(1+2*x)+b*(2+7*x)", 1)],
        ),
        FigureRow::new(
            "18",
            &[("1", 3), ("1+x+b*x", 3), ("Lambda*(1+3*x)+b*(2+9*x)", 1), ("Lambda+2*b", 1)],
        ),
        FigureRow::new("19", &[("Lambda", 4), ("Lambda*(1+x)+3*b*x", 4)]),
    ]
}

fn z4algs() -> Vec<FigureRow> {
    let phi = "(1+a2)";
    let f = |s: &str| s.replace("Phi", phi);
    let row = |label: &str, ends: &[(&str, usize)]| {
        let owned: Vec<(String, usize)> = ends.iter().map(|&(e, n)| (f(e), n)).collect();
        FigureRow {
            label: label.to_string(),
            ends: owned,
        }
    };
    vec![
        row("1", &[("Pi", 1), ("Pi*(1+4*r)", 1)]),
        row("2", &[("Pi*(1+r)", 1), ("Pi*(1+3*r)", 1)]),
        row("3", &[("Phi", 2), ("Phi+2*Pi*r", 2)]),
        row("4", &[("Phi*(1+r)", 2), ("Phi*(1+r)+Pi*r", 2)]),
        row("5", &[("Phi*(1+r)", 2), ("Phi*(1+a1*r)+Pi*r", 2)]),
        row("6", &[("Phi*(1+a1*r)", 2), ("Phi*(1+r)+Pi*r", 2)]),
        row("7", &[("Phi*(1+a1*r)", 2), ("Phi*(1+a1*r)+Pi*r", 2)]),
        row("8", &[("1+a1*r", 2), ("1+a3*r", 2), ("Pi*(1+3*r)", 1)]),
        row("9", &[("1+r", 2), ("1+a2*r", 2), ("Pi*(1+3*r)", 1)]),
        row("10", &[("1+r+Phi*a1*r", 2), ("1+a2*r+Phi*a1*r", 2), ("Pi*(1+r)", 1)]),
        row("11", &[("1+a1*r+Phi*r", 2), ("1+a3*r+Phi*r", 2), ("Pi*(1+r)", 1)]),
        row("12", &[("1", 4), ("1+Pi*r", 4)]),
    ]
}

/// A row's table as a sorted multiset of `(coefficients, multiplicity)`.
pub type TableKey = Vec<(Vec<u32>, usize)>;

/// Parse a row into its table key over `ring`.
pub fn row_key(ring: &Arc<FusionRing>, row: &FigureRow) -> Result<TableKey, FigureError> {
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (e, n) in &row.ends {
        let x = parse_object(ring, e).map_err(|source| FigureError::Expr {
            row: row.label.clone(),
            source,
        })?;
        *counts.entry(x.coeffs().to_vec()).or_default() += n;
    }
    Ok(counts.into_iter().collect())
}

/// The table key of a module.
pub fn module_key(k: &FusionModule) -> TableKey {
    let mut key: TableKey = k
        .algebra_table()
        .into_iter()
        .map(|(x, n)| (x.coeffs().to_vec(), n))
        .collect();
    key.sort();
    key
}

fn relabel_key(key: &TableKey, phi: &[usize]) -> TableKey {
    let mut out: TableKey = key
        .iter()
        .map(|(c, n)| {
            let mut d = vec![0; c.len()];
            for (i, &x) in c.iter().enumerate() {
                d[phi[i]] = x;
            }
            (d, *n)
        })
        .collect();
    out.sort();
    out
}

/// Result of matching every row of a table against a module list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureMatch {
    /// Ring automorphism applied to the transcribed rows.
    pub automorphism: Vec<usize>,
    /// For each row, the positions of the modules with that table.
    pub hits: Vec<Vec<usize>>,
}

impl FigureMatch {
    /// True when every row names exactly one module and no module is
    /// named twice.
    pub fn is_bijective(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.hits.iter().all(|h| h.len() == 1 && seen.insert(h[0]))
    }

    /// The matched module for each row, when unique.
    pub fn unique(&self) -> Option<Vec<usize>> {
        self.hits.iter().map(|h| (h.len() == 1).then(|| h[0])).collect()
    }
}

/// Match `rows` against `modules` under each automorphism of the ring,
/// returning the first bijective match or else the match under the
/// identity.
pub fn match_figure(
    ring: &Arc<FusionRing>,
    rows: &[FigureRow],
    modules: &[FusionModule],
) -> Result<FigureMatch, FigureError> {
    let keys: Vec<TableKey> = rows.iter().map(|r| row_key(ring, r)).collect::<Result<_, _>>()?;
    let module_keys: Vec<TableKey> = modules.iter().map(module_key).collect();
    let attempt = |phi: &[usize]| FigureMatch {
        automorphism: phi.to_vec(),
        hits: keys
            .iter()
            .map(|k| {
                let k = relabel_key(k, phi);
                (0..modules.len()).filter(|&m| module_keys[m] == k).collect()
            })
            .collect(),
    };
    let identity: Vec<usize> = (0..ring.rank()).collect();
    let first = attempt(&identity);
    if first.is_bijective() {
        return Ok(first);
    }
    for phi in ring.automorphisms() {
        let m = attempt(&phi);
        if m.is_bijective() {
            return Ok(m);
        }
    }
    Ok(first)
}

/// The position of the module whose table is that of row `label`, matched
/// under the first automorphism that makes the whole table bijective.
pub fn module_for_row(
    ring: &Arc<FusionRing>,
    modules: &[FusionModule],
    label: &str,
) -> Result<Option<usize>, FigureError> {
    let rows = figure_rows(ring.name())?;
    let m = match_figure(ring, &rows, modules)?;
    Ok(rows
        .iter()
        .position(|r| r.label == label)
        .and_then(|x| (m.hits[x].len() == 1).then(|| m.hits[x][0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::catalog::catalog_ring;

    #[test]
    fn row_counts() {
        assert_eq!(calgs().len(), 50);
        assert_eq!(c1algs().len(), 19);
        assert_eq!(z4algs().len(), 12);
        assert!(figure_rows("Fib").is_err());
    }

    #[test]
    fn rows_parse_and_have_consistent_dimensions() {
        for name in figure_rings() {
            let ring = catalog_ring(name).unwrap().ring;
            let gdim = ring.global_dim().unwrap().clone();
            for row in figure_rows(name).unwrap() {
                let key = row_key(&ring, &row).unwrap();
                assert_eq!(key.iter().map(|(_, n)| n).sum::<usize>(), row.rank());
                // each end has unit coefficient one
                assert!(key.iter().all(|(c, _)| c[0] == 1), "row {}", row.label);
                // end dimensions over the module basis sum to the global dimension
                let total = key.iter().fold(crate::QuadNumber::zero(), |acc, (c, n)| {
                    let x = crate::ring::ObjectVector::new(ring.clone(), c.clone()).unwrap();
                    &acc + &(&x.dim().unwrap() * *n as i64)
                });
                assert_eq!(total, gdim, "row {}", row.label);
            }
        }
    }

    #[test]
    fn regular_module_matches_its_row() {
        let ring = catalog_ring("HI-Z4").unwrap().ring;
        let k = FusionModule::regular(ring.clone());
        let rows = figure_rows("HI-Z4").unwrap();
        let m = match_figure(&ring, &rows, &[k]).unwrap();
        assert_eq!(m.hits[11], vec![0]);
        assert!(m.hits[..11].iter().all(|h| h.is_empty()));
    }
}
