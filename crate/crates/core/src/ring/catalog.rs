//! Named fusion rings with their shorthand objects.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{FusionRing, Grading, RingError};

/// A catalog ring with the named shorthands understood by the expression
/// parser and, when known, its natural grading.
#[derive(Debug, Clone)]
pub struct CatalogRing {
    pub ring: Arc<FusionRing>,
    pub shorthands: Vec<(String, Vec<u32>)>,
    pub grading: Option<Grading>,
}

const NAMES: &[&str] = &[
    "HI-Z4", "HI-Z2xZ2", "4442", "2D2", "C2", "RepA4", "VecZ2", "VecZ3", "VecZ4", "VecZ2xZ2",
    "VecA4", "Fib", "trivial",
];

pub fn catalog_names() -> &'static [&'static str] {
    NAMES
}

/// Look up a ring by name. Rings are built once per process and shared.
pub fn catalog_ring(name: &str) -> Result<CatalogRing, RingError> {
    static CACHE: OnceLock<Mutex<HashMap<String, CatalogRing>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().expect("catalog cache").get(name) {
        return Ok(c.clone());
    }
    let built = build(name)?;
    Ok(cache
        .lock()
        .expect("catalog cache")
        .entry(name.to_string())
        .or_insert(built)
        .clone())
}

fn build(name: &str) -> Result<CatalogRing, RingError> {
    let plain = |ring: FusionRing| CatalogRing {
        ring: Arc::new(ring),
        shorthands: Vec::new(),
        grading: None,
    };
    Ok(match name {
        "HI-Z4" => {
            let (ring, sh) = haagerup_izumi(name, &[4]);
            let mut phi = vec![0; 8];
            phi[0] = 1;
            phi[2] = 1;
            let mut sh = sh;
            sh.push(("Phi".into(), phi));
            CatalogRing {
                ring: Arc::new(ring),
                shorthands: sh,
                grading: None,
            }
        }
        "HI-Z2xZ2" => {
            let (ring, sh) = haagerup_izumi(name, &[2, 2]);
            CatalogRing {
                ring: Arc::new(ring),
                shorthands: sh,
                grading: None,
            }
        }
        "4442" => {
            let ring = central_extension(name, &rep_a4(), "x", &[1, 0, 0, 0], &[1, 0, 0, 1]);
            CatalogRing {
                ring: Arc::new(ring),
                shorthands: vec![("Lambda".into(), vec![1, 1, 1, 0, 0, 0, 0, 0])],
                grading: None,
            }
        }
        "2D2" => plain(central_extension(
            name,
            &group_ring("VecZ2", &["1", "a"], &cyclic_table(2)),
            "r",
            &[1, 0],
            &[2, 2],
        )),
        "C2" => {
            let (base, _) = haagerup_izumi("HI-Z2xZ2", &[2, 2]);
            // cyclic permutation of the three nontrivial group elements
            let theta = [0, 2, 3, 1, 4, 6, 7, 5];
            let (ring, grading) = base
                .crossed_product(&theta, 3)
                .expect("the order-three rotation is an automorphism");
            let mut gamma = vec![0; 24];
            gamma[..4].fill(1);
            CatalogRing {
                ring: Arc::new(ring.with_name(name)),
                shorthands: vec![("Gamma".into(), gamma.clone()), ("Pi".into(), gamma)],
                grading: Some(grading),
            }
        }
        "RepA4" => CatalogRing {
            ring: Arc::new(rep_a4()),
            shorthands: vec![("Lambda".into(), vec![1, 1, 1, 0])],
            grading: None,
        },
        "VecZ2" => plain(group_ring(name, &["1", "g"], &cyclic_table(2))),
        "VecZ3" => plain(group_ring(name, &["1", "g", "g2"], &cyclic_table(3))),
        "VecZ4" => plain(group_ring(name, &["1", "g", "g2", "g3"], &cyclic_table(4))),
        "VecZ2xZ2" => {
            let t = abelian_table(&[2, 2]);
            plain(group_ring(name, &["1", "a1", "a2", "a3"], &t))
        }
        "VecA4" => {
            let (labels, table) = a4_table();
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            plain(group_ring(name, &labels, &table))
        }
        "Fib" => plain(
            FusionRing::new(
                name,
                vec!["1".into(), "t".into()],
                0,
                vec![0, 1],
                &[
                    vec![vec![1, 0], vec![0, 1]],
                    vec![vec![0, 1], vec![1, 1]],
                ],
            )
            .expect("Fibonacci ring is valid"),
        ),
        "trivial" => plain(
            FusionRing::new(name, vec!["1".into()], 0, vec![0], &[vec![vec![1]]])
                .expect("trivial ring is valid"),
        ),
        _ => {
            return Err(RingError::UnknownRing {
                name: name.to_string(),
                known: NAMES.join(", "),
            })
        }
    })
}

/// Multiplication table of `Z/f1 × … × Z/ft`, elements in mixed radix
/// with the first factor varying fastest.
fn abelian_table(factors: &[usize]) -> Vec<Vec<usize>> {
    let n: usize = factors.iter().product();
    let digits = |mut x: usize| {
        factors
            .iter()
            .map(|&f| {
                let d = x % f;
                x /= f;
                d
            })
            .collect::<Vec<_>>()
    };
    let encode = |ds: &[usize]| {
        ds.iter()
            .zip(factors)
            .rev()
            .fold(0, |acc, (&d, &f)| acc * f + d)
    };
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s: Vec<usize> = digits(a)
                        .iter()
                        .zip(digits(b))
                        .zip(factors)
                        .map(|((x, y), f)| (x + y) % f)
                        .collect();
                    encode(&s)
                })
                .collect()
        })
        .collect()
}

fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
    abelian_table(&[n])
}

/// Group ring of a finite group given by its multiplication table with
/// the identity at index 0.
pub fn group_ring(name: &str, labels: &[&str], table: &[Vec<usize>]) -> FusionRing {
    let n = table.len();
    let mut t = vec![0; n * n * n];
    let mut dual = vec![0; n];
    for a in 0..n {
        for b in 0..n {
            t[(a * n + b) * n + table[a][b]] = 1;
            if table[a][b] == 0 {
                dual[a] = b;
            }
        }
    }
    FusionRing::from_flat(name, labels.iter().map(|s| s.to_string()).collect(), 0, dual, t)
        .expect("group table defines a valid ring")
}

fn a4_table() -> (Vec<String>, Vec<Vec<usize>>) {
    // even permutations of four points, identity first
    let mut perms: Vec<[usize; 4]> = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    let inversions = (0..4)
                        .map(|i| (i + 1..4).filter(|&j| p[i] > p[j]).count())
                        .sum::<usize>();
                    if distinct && inversions % 2 == 0 {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let index = |p: [usize; 4]| perms.iter().position(|q| *q == p).expect("closed");
    let table = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| index([p[q[0]], p[q[1]], p[q[2]], p[q[3]]]))
                .collect()
        })
        .collect();
    let labels = perms
        .iter()
        .enumerate()
        .map(|(i, _)| if i == 0 { "1".to_string() } else { format!("g{i}") })
        .collect();
    (labels, table)
}

/// The representation ring of the alternating group on four letters.
fn rep_a4() -> FusionRing {
    let labels = ["1", "al", "al2", "b"];
    let mut t = vec![0; 64];
    let mut set = |i: usize, j: usize, k: usize, v: u32| t[(i * 4 + j) * 4 + k] = v;
    for g in 0..3 {
        for h in 0..3 {
            set(g, h, (g + h) % 3, 1);
        }
        set(g, 3, 3, 1);
        set(3, g, 3, 1);
        set(3, 3, g, 1);
    }
    set(3, 3, 3, 2);
    FusionRing::from_flat("RepA4", labels.iter().map(|s| s.to_string()).collect(), 0, vec![0, 2, 1, 3], t)
        .expect("RepA4 is valid")
}

/// Basis `a_g`, `a_g r` for an abelian group `G` given by cyclic factors,
/// with `a_g a_h = a_{g+h}`, `a_g · a_h r = a_{g+h} r`,
/// `a_g r · a_h = a_{g-h} r` and `a_g r · a_h r = a_{g-h} + Σ_k a_k r`.
fn haagerup_izumi(name: &str, factors: &[usize]) -> (FusionRing, Vec<(String, Vec<u32>)>) {
    let table = abelian_table(factors);
    let g = table.len();
    let neg: Vec<usize> = (0..g).map(|a| (0..g).find(|&b| table[a][b] == 0).expect("group")).collect();
    let n = 2 * g;
    let mut t = vec![0; n * n * n];
    let mut set = |i: usize, j: usize, k: usize, v: u32| t[(i * n + j) * n + k] += v;
    for a in 0..g {
        for b in 0..g {
            set(a, b, table[a][b], 1);
            set(a, g + b, g + table[a][b], 1);
            set(g + a, b, g + table[a][neg[b]], 1);
            set(g + a, g + b, table[a][neg[b]], 1);
            for k in 0..g {
                set(g + a, g + b, g + k, 1);
            }
        }
    }
    let mut labels: Vec<String> = (0..g).map(|a| format!("a{a}")).collect();
    labels.push("r".into());
    labels.extend((1..g).map(|a| format!("a{a}r")));
    let mut dual = neg.clone();
    dual.extend(g..n);
    let ring = FusionRing::from_flat(name, labels, 0, dual, t).expect("Haagerup-Izumi ring is valid");
    let mut gamma = vec![0; n];
    gamma[..g].fill(1);
    (ring, vec![("Gamma".into(), gamma.clone()), ("Pi".into(), gamma)])
}

/// Adjoin a central self-dual `x` to `base` with `x² = c0 + c1·x`, where
/// `c0`, `c1` are coefficient vectors over the basis of `base`. Basis
/// element `u x^e` has index `e·rank + u`.
fn central_extension(name: &str, base: &FusionRing, x: &str, c0: &[u32], c1: &[u32]) -> FusionRing {
    let m = base.rank();
    let n = 2 * m;
    let mut t = vec![0; n * n * n];
    for e in 0..2 {
        for f in 0..2 {
            for u in 0..m {
                for v in 0..m {
                    for (w, k) in base.product(u, v) {
                        if e + f < 2 {
                            t[((e * m + u) * n + f * m + v) * n + (e + f) * m + w] += k;
                        } else {
                            for (part, coeffs) in [(0, c0), (1, c1)] {
                                for (c, &cc) in coeffs.iter().enumerate().filter(|(_, c)| **c > 0) {
                                    for (z, k2) in base.product(w, c) {
                                        t[((m + u) * n + m + v) * n + part * m + z] += k * cc * k2;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut labels = base.labels().to_vec();
    for u in 0..m {
        labels.push(if u == base.unit() {
            x.to_string()
        } else {
            format!("{}{x}", base.label(u))
        });
    }
    let mut dual = base.duals().to_vec();
    dual.extend(base.duals().iter().map(|&d| d + m));
    FusionRing::from_flat(name, labels, base.unit(), dual, t).expect("central extension is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_and_ranks() {
        let z4 = catalog_ring("HI-Z4").unwrap();
        assert_eq!(z4.ring.labels(), ["a0", "a1", "a2", "a3", "r", "a1r", "a2r", "a3r"]);
        let c1 = catalog_ring("4442").unwrap();
        assert_eq!(c1.ring.labels(), ["1", "al", "al2", "b", "x", "alx", "al2x", "bx"]);
        let d2 = catalog_ring("2D2").unwrap();
        assert_eq!(d2.ring.labels(), ["1", "a", "r", "ar"]);
        assert_eq!(catalog_ring("VecA4").unwrap().ring.rank(), 12);
        assert!(matches!(catalog_ring("nope"), Err(RingError::UnknownRing { .. })));
    }

    #[test]
    fn defining_products() {
        let c1 = catalog_ring("4442").unwrap().ring;
        let x = c1.index_of("x").unwrap();
        // x² = 1 + x + bx
        assert_eq!(c1.product(x, x), vec![(0, 1), (4, 1), (7, 1)]);
        let d2 = catalog_ring("2D2").unwrap().ring;
        assert_eq!(d2.product(2, 2), vec![(0, 1), (2, 2), (3, 2)]);
        let k = catalog_ring("HI-Z2xZ2").unwrap().ring;
        // a1 r · a2 = a3 r
        assert_eq!(k.product(5, 2), vec![(7, 1)]);
    }
}
