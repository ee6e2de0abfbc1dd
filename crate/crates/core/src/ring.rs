//! Fusion rings: based rings with a duality involution and nonnegative
//! integer structure constants.

pub mod catalog;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::arith::{ArithError, QuadNumber, RECOGNITION_TOL};
use crate::matrix::{perron_vector, Matrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("invalid fusion ring: {0}")]
    Invalid(Violation),
    #[error("Frobenius-Perron dimension of basis element {index} ({label}) is not in Q(sqrt5)")]
    Recognition { index: usize, label: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("map is not a ring automorphism: {0}")]
    NotAutomorphism(String),
    #[error("index set is not a subring: {0}")]
    NotSubring(String),
    #[error("unknown ring {name:?}; catalog contains: {known}")]
    UnknownRing { name: String, known: String },
}

/// The first identity a candidate ring fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    DuplicateLabel(String),
    DualNotInvolution { index: usize },
    UnitNotSelfDual,
    UnitLaw { i: usize, j: usize, k: usize },
    Duality { i: usize, j: usize },
    Associativity {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        left: u64,
        right: u64,
    },
    FrobeniusReciprocity { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape mismatch: {s}"),
            Violation::DuplicateLabel(s) => write!(f, "duplicate label {s:?}"),
            Violation::DualNotInvolution { index } => {
                write!(f, "duality is not an involution at index {index}")
            }
            Violation::UnitNotSelfDual => write!(f, "unit is not self-dual"),
            Violation::UnitLaw { i, j, k } => write!(f, "unit law fails at N[{i}][{j}][{k}]"),
            Violation::Duality { i, j } => {
                write!(f, "duality fails: unit multiplicity in x{i}*x{j} is wrong")
            }
            Violation::Associativity {
                i,
                j,
                k,
                l,
                left,
                right,
            } => write!(
                f,
                "associativity fails: coefficient of x{l} in (x{i}x{j})x{k} is {left} but in x{i}(x{j}x{k}) is {right}"
            ),
            Violation::FrobeniusReciprocity { i, j, k } => {
                write!(f, "Frobenius reciprocity fails at N[{i}][{j}][{k}]")
            }
        }
    }
}

/// Exact Frobenius–Perron data of a ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpData {
    pub dims: Vec<QuadNumber>,
    pub global: QuadNumber,
}

#[derive(Clone)]
pub struct FusionRing {
    name: String,
    labels: Vec<String>,
    unit: usize,
    dual: Vec<usize>,
    rank: usize,
    tensor: Vec<u32>,
    fp: OnceLock<FpData>,
}

impl PartialEq for FusionRing {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.labels == other.labels
            && self.unit == other.unit
            && self.dual == other.dual
            && self.tensor == other.tensor
    }
}

impl Eq for FusionRing {}

impl fmt::Debug for FusionRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FusionRing")
            .field("name", &self.name)
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

impl FusionRing {
    /// Build without validating. Use [`FusionRing::validate`] or
    /// [`FusionRing::new`] before trusting the result.
    pub fn from_parts_unchecked(
        name: impl Into<String>,
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        tensor: Vec<u32>,
    ) -> Self {
        let rank = labels.len();
        FusionRing {
            name: name.into(),
            labels,
            unit,
            dual,
            rank,
            tensor,
            fp: OnceLock::new(),
        }
    }

    /// Build from a nested `N[i][j][k]` table and validate.
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        table: &[Vec<Vec<u32>>],
    ) -> Result<Self, RingError> {
        let rank = labels.len();
        let shape_ok = table.len() == rank
            && table
                .iter()
                .all(|r| r.len() == rank && r.iter().all(|c| c.len() == rank));
        if !shape_ok {
            return Err(RingError::Invalid(Violation::Shape(format!(
                "expected a {rank}x{rank}x{rank} tensor"
            ))));
        }
        let tensor = table.iter().flatten().flatten().copied().collect();
        let ring = FusionRing::from_parts_unchecked(name, labels, unit, dual, tensor);
        ring.validate().map_err(RingError::Invalid)?;
        Ok(ring)
    }

    pub(crate) fn from_flat(
        name: impl Into<String>,
        labels: Vec<String>,
        unit: usize,
        dual: Vec<usize>,
        tensor: Vec<u32>,
    ) -> Result<Self, RingError> {
        let ring = FusionRing::from_parts_unchecked(name, labels, unit, dual, tensor);
        ring.validate().map_err(RingError::Invalid)?;
        Ok(ring)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    #[inline]
    pub fn n(&self, i: usize, j: usize, k: usize) -> u32 {
        self.tensor[(i * self.rank + j) * self.rank + k]
    }

    pub fn tensor(&self) -> &[u32] {
        &self.tensor
    }

    pub fn table(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| (0..self.rank).map(|k| self.n(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    /// Nonzero terms `(k, N[i][j][k])` of `x_i · x_j`.
    pub fn product(&self, i: usize, j: usize) -> Vec<(usize, u32)> {
        (0..self.rank)
            .filter_map(|k| {
                let m = self.n(i, j, k);
                (m > 0).then_some((k, m))
            })
            .collect()
    }

    /// Basis element `k` if `x_i · x_j = x_k` exactly.
    pub fn simple_product(&self, i: usize, j: usize) -> Option<usize> {
        match self.product(i, j).as_slice() {
            [(k, 1)] => Some(*k),
            _ => None,
        }
    }

    /// Right-multiplication matrix: entry `(a, b)` is `N[a][i][b]`.
    pub fn right_mult(&self, i: usize) -> Matrix {
        let mut m = Matrix::zeros(self.rank);
        for a in 0..self.rank {
            for b in 0..self.rank {
                m.set(a, b, self.n(a, i, b));
            }
        }
        m
    }

    /// Left-multiplication matrix: entry `(a, b)` is `N[i][a][b]`.
    pub fn left_mult(&self, i: usize) -> Matrix {
        let mut m = Matrix::zeros(self.rank);
        for a in 0..self.rank {
            for b in 0..self.rank {
                m.set(a, b, self.n(i, a, b));
            }
        }
        m
    }

    /// Check every based-ring axiom; the report names the first failure.
    pub fn validate(&self) -> Result<(), Violation> {
        let r = self.rank;
        if self.tensor.len() != r * r * r {
            return Err(Violation::Shape(format!(
                "tensor has {} entries, expected {}",
                self.tensor.len(),
                r * r * r
            )));
        }
        if self.dual.len() != r {
            return Err(Violation::Shape(format!(
                "dual has {} entries, expected {r}",
                self.dual.len()
            )));
        }
        if self.unit >= r {
            return Err(Violation::Shape(format!("unit index {} out of range", self.unit)));
        }
        let mut seen = BTreeSet::new();
        for l in &self.labels {
            if !seen.insert(l) {
                return Err(Violation::DuplicateLabel(l.clone()));
            }
        }
        for i in 0..r {
            if self.dual[i] >= r || self.dual[self.dual[i]] != i {
                return Err(Violation::DualNotInvolution { index: i });
            }
        }
        if self.dual[self.unit] != self.unit {
            return Err(Violation::UnitNotSelfDual);
        }
        let u = self.unit;
        for j in 0..r {
            for k in 0..r {
                let want = (j == k) as u32;
                if self.n(u, j, k) != want {
                    return Err(Violation::UnitLaw { i: u, j, k });
                }
                if self.n(j, u, k) != want {
                    return Err(Violation::UnitLaw { i: j, j: u, k });
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                let want = (j == self.dual[i]) as u32;
                if self.n(i, j, u) != want {
                    return Err(Violation::Duality { i, j });
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let left: u64 = (0..r)
                            .map(|m| self.n(i, j, m) as u64 * self.n(m, k, l) as u64)
                            .sum();
                        let right: u64 = (0..r)
                            .map(|m| self.n(j, k, m) as u64 * self.n(i, m, l) as u64)
                            .sum();
                        if left != right {
                            return Err(Violation::Associativity {
                                i,
                                j,
                                k,
                                l,
                                left,
                                right,
                            });
                        }
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let x = self.n(i, j, k);
                    if x != self.n(self.dual[i], k, j) || x != self.n(k, self.dual[j], i) {
                        return Err(Violation::FrobeniusReciprocity { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Floating-point FP dimensions from the Perron eigenvector of the
    /// regular representation, normalised so the unit has dimension 1.
    pub fn fp_dims_approx(&self) -> Vec<f64> {
        let r = self.rank;
        let mut sum = vec![0.0; r * r];
        for i in 0..r {
            for a in 0..r {
                for b in 0..r {
                    sum[a * r + b] += self.n(a, i, b) as f64;
                }
            }
        }
        let (_, v) = perron_vector(&sum, r);
        let norm = v[self.unit];
        v.into_iter().map(|x| x / norm).collect()
    }

    /// Exact Frobenius–Perron dimensions and global dimension.
    pub fn fp_data(&self) -> Result<&FpData, RingError> {
        if let Some(fp) = self.fp.get() {
            return Ok(fp);
        }
        let approx = self.fp_dims_approx();
        let mut dims = Vec::with_capacity(self.rank);
        for (index, &x) in approx.iter().enumerate() {
            let q = QuadNumber::recognize(x, RECOGNITION_TOL)?
                .filter(|q| q.is_positive())
                .ok_or_else(|| RingError::Recognition {
                    index,
                    label: self.labels[index].clone(),
                })?;
            dims.push(q);
        }
        // exact homomorphism check
        for i in 0..self.rank {
            for j in 0..self.rank {
                let lhs = &dims[i] * &dims[j];
                let rhs: QuadNumber = self
                    .product(i, j)
                    .into_iter()
                    .map(|(k, m)| &dims[k] * m as i64)
                    .sum();
                if lhs != rhs {
                    return Err(RingError::Recognition {
                        index: i,
                        label: self.labels[i].clone(),
                    });
                }
            }
        }
        let global = dims.iter().map(|x| x * x).sum();
        let _ = self.fp.set(FpData { dims, global });
        Ok(self.fp.get().expect("just set"))
    }

    pub fn fp_dims(&self) -> Result<&[QuadNumber], RingError> {
        Ok(&self.fp_data()?.dims)
    }

    pub fn global_dim(&self) -> Result<&QuadNumber, RingError> {
        Ok(&self.fp_data()?.global)
    }

    pub fn is_invertible(&self, i: usize) -> bool {
        self.product(i, self.dual[i]).len() == 1
    }

    pub fn invertibles(&self) -> Vec<usize> {
        (0..self.rank).filter(|&i| self.is_invertible(i)).collect()
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.rank).all(|i| (0..self.rank).all(|j| self.product(i, j) == self.product(j, i)))
    }

    /// The ring with reversed multiplication.
    pub fn opposite(&self) -> FusionRing {
        let r = self.rank;
        let mut t = vec![0; r * r * r];
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    t[(i * r + j) * r + k] = self.n(j, i, k);
                }
            }
        }
        FusionRing::from_parts_unchecked(
            format!("{}^op", self.name),
            self.labels.clone(),
            self.unit,
            self.dual.clone(),
            t,
        )
    }

    /// Check that `idx` is unit-containing, dual-closed and closed under
    /// multiplication.
    pub fn check_subring(&self, idx: &[usize]) -> Result<(), RingError> {
        let set: BTreeSet<usize> = idx.iter().copied().collect();
        if set.iter().any(|&i| i >= self.rank) {
            return Err(RingError::NotSubring("index out of range".into()));
        }
        if !set.contains(&self.unit) {
            return Err(RingError::NotSubring("does not contain the unit".into()));
        }
        if let Some(&i) = set.iter().find(|&&i| !set.contains(&self.dual[i])) {
            return Err(RingError::NotSubring(format!(
                "dual of {} is missing",
                self.labels[i]
            )));
        }
        for &i in &set {
            for &j in &set {
                if let Some((k, _)) = self.product(i, j).into_iter().find(|(k, _)| !set.contains(k)) {
                    return Err(RingError::NotSubring(format!(
                        "{}*{} contains {}",
                        self.labels[i], self.labels[j], self.labels[k]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The based subring spanned by `idx`, with the sorted index list that
    /// maps its basis back into `self`.
    pub fn subring(&self, idx: &[usize]) -> Result<(FusionRing, Vec<usize>), RingError> {
        self.check_subring(idx)?;
        let sorted: Vec<usize> = idx.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let pos: BTreeMap<usize, usize> = sorted.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let s = sorted.len();
        let mut t = vec![0; s * s * s];
        for (a, &i) in sorted.iter().enumerate() {
            for (b, &j) in sorted.iter().enumerate() {
                for (c, &k) in sorted.iter().enumerate() {
                    t[(a * s + b) * s + c] = self.n(i, j, k);
                }
            }
        }
        let ring = FusionRing::from_flat(
            format!("{}|sub", self.name),
            sorted.iter().map(|&i| self.labels[i].clone()).collect(),
            pos[&self.unit],
            sorted.iter().map(|&i| pos[&self.dual[i]]).collect(),
            t,
        )?;
        Ok((ring, sorted))
    }

    /// Crossed product by a cyclic group `Z/n` acting through the ring
    /// automorphism `theta`. Basis element `x_i γ^k` has index `k·rank + i`.
    pub fn crossed_product(
        &self,
        theta: &[usize],
        n: usize,
    ) -> Result<(FusionRing, Grading), RingError> {
        let r = self.rank;
        self.check_automorphism(theta)?;
        if n == 0 {
            return Err(RingError::NotAutomorphism("group order must be positive".into()));
        }
        // powers of theta
        let mut powers: Vec<Vec<usize>> = vec![(0..r).collect()];
        for k in 1..=n {
            let prev = &powers[k - 1];
            powers.push((0..r).map(|i| theta[prev[i]]).collect());
        }
        if powers[n] != powers[0] {
            return Err(RingError::NotAutomorphism(format!("theta^{n} is not the identity")));
        }
        let big = r * n;
        let idx = |k: usize, i: usize| k * r + i;
        let mut t = vec![0; big * big * big];
        for k in 0..n {
            for i in 0..r {
                for l in 0..n {
                    for j in 0..r {
                        let tj = powers[k][j];
                        let m = (k + l) % n;
                        for s in 0..r {
                            t[(idx(k, i) * big + idx(l, j)) * big + idx(m, s)] = self.n(i, tj, s);
                        }
                    }
                }
            }
        }
        let mut labels = Vec::with_capacity(big);
        let mut dual = Vec::with_capacity(big);
        for k in 0..n {
            for i in 0..r {
                labels.push(match (k, i == self.unit) {
                    (0, _) => self.labels[i].clone(),
                    (_, true) => format!("g{k}"),
                    (_, false) => format!("{}_g{k}", self.labels[i]),
                });
                let kinv = (n - k) % n;
                dual.push(idx(kinv, powers[kinv][self.dual[i]]));
            }
        }
        let ring = FusionRing::from_flat(format!("{}x|Z{n}", self.name), labels, self.unit, dual, t)?;
        let grading = Grading {
            factors: vec![n],
            degree: (0..big).map(|x| vec![x / r]).collect(),
        };
        Ok((ring, grading))
    }

    pub fn check_automorphism(&self, theta: &[usize]) -> Result<(), RingError> {
        let r = self.rank;
        if theta.len() != r || theta.iter().collect::<BTreeSet<_>>().len() != r || theta.iter().any(|&x| x >= r) {
            return Err(RingError::NotAutomorphism("not a permutation of the basis".into()));
        }
        if theta[self.unit] != self.unit {
            return Err(RingError::NotAutomorphism("does not fix the unit".into()));
        }
        for i in 0..r {
            if theta[self.dual[i]] != self.dual[theta[i]] {
                return Err(RingError::NotAutomorphism(format!(
                    "does not commute with duality at {}",
                    self.labels[i]
                )));
            }
            for j in 0..r {
                for k in 0..r {
                    if self.n(i, j, k) != self.n(theta[i], theta[j], theta[k]) {
                        return Err(RingError::NotAutomorphism(format!(
                            "does not preserve N[{i}][{j}][{k}]"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Grading whose trivial component is `trivial`, if one exists.
    pub fn grading_from_subring(&self, trivial: &[usize]) -> Result<Option<Grading>, RingError> {
        self.check_subring(trivial)?;
        let r = self.rank;
        let triv: BTreeSet<usize> = trivial.iter().copied().collect();
        // i ~ j iff x_i x_j* meets the trivial part
        let mut comp: Vec<usize> = (0..r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut y = x;
            while p[y] != y {
                y = p[y];
            }
            p[x] = y;
            y
        }
        for i in 0..r {
            for j in 0..r {
                if self.product(i, self.dual[j]).iter().any(|(k, _)| triv.contains(k)) {
                    let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                    if a != b {
                        comp[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let roots: Vec<usize> = (0..r).map(|i| find(&mut comp, i)).collect();
        let classes: Vec<usize> = roots.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let class_of: Vec<usize> = roots
            .iter()
            .map(|x| classes.binary_search(x).expect("root present"))
            .collect();
        let g = classes.len();
        let unit_class = class_of[self.unit];
        let unit_members: BTreeSet<usize> = (0..r).filter(|&i| class_of[i] == unit_class).collect();
        if unit_members != triv {
            return Ok(None);
        }
        // induced product on classes
        let mut table = vec![vec![usize::MAX; g]; g];
        for i in 0..r {
            for j in 0..r {
                for (k, _) in self.product(i, j) {
                    let slot = &mut table[class_of[i]][class_of[j]];
                    if *slot == usize::MAX {
                        *slot = class_of[k];
                    } else if *slot != class_of[k] {
                        return Ok(None);
                    }
                }
            }
        }
        let Some(group) = AbelianGroup::from_table(&table, unit_class) else {
            return Ok(None);
        };
        let degree = class_of.iter().map(|&c| group.coords[c].clone()).collect();
        Ok(Some(Grading {
            factors: group.factors,
            degree,
        }))
    }

    /// Some basis bijection `self → other` preserving unit, duality and
    /// structure constants.
    pub fn find_isomorphism(&self, other: &FusionRing) -> Option<Vec<usize>> {
        let mut found = None;
        IsoSearch::new(self, other).run(&mut |phi| {
            found = Some(phi.to_vec());
            false
        });
        found
    }

    /// First isomorphism `phi` (index of `self` to index of `other`)
    /// accepted by `pred`.
    pub fn find_isomorphism_where(
        &self,
        other: &FusionRing,
        mut pred: impl FnMut(&[usize]) -> bool,
    ) -> Option<Vec<usize>> {
        let mut found = None;
        IsoSearch::new(self, other).run(&mut |phi| {
            if pred(phi) {
                found = Some(phi.to_vec());
                false
            } else {
                true
            }
        });
        found
    }

    /// Every basis bijection `self → other` that is a ring isomorphism.
    pub fn all_isomorphisms(&self, other: &FusionRing) -> Vec<Vec<usize>> {
        let mut all = Vec::new();
        IsoSearch::new(self, other).run(&mut |phi| {
            all.push(phi.to_vec());
            true
        });
        all.sort();
        all
    }

    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        self.all_isomorphisms(self)
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn content_hash(&self) -> String {
        crate::io::ring_hash(self)
    }
}

/// A faithful grading by a finite abelian group `Z/f1 × … × Z/ft`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    /// Cyclic factor orders (invariant factors, each dividing the next).
    pub factors: Vec<usize>,
    /// Group element of each basis index, as coordinates in the factors.
    pub degree: Vec<Vec<usize>>,
}

impl Grading {
    pub fn trivial(rank: usize) -> Self {
        Grading {
            factors: Vec::new(),
            degree: vec![Vec::new(); rank],
        }
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn identity(&self) -> Vec<usize> {
        vec![0; self.factors.len()]
    }

    pub fn add(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        self.factors
            .iter()
            .zip(x.iter().zip(y))
            .map(|(&f, (&a, &b))| (a + b) % f)
            .collect()
    }

    pub fn neg(&self, x: &[usize]) -> Vec<usize> {
        self.factors
            .iter()
            .zip(x)
            .map(|(&f, &a)| (f - a % f) % f)
            .collect()
    }

    /// Check the grading axioms against `ring`.
    pub fn is_valid_for(&self, ring: &FusionRing) -> bool {
        let r = ring.rank();
        if self.degree.len() != r || self.degree[ring.unit()] != self.identity() {
            return false;
        }
        (0..r).all(|i| {
            self.degree[ring.dual(i)] == self.neg(&self.degree[i])
                && (0..r).all(|j| {
                    let want = self.add(&self.degree[i], &self.degree[j]);
                    ring.product(i, j).iter().all(|(k, _)| self.degree[*k] == want)
                })
        })
    }

    /// Basis indices grouped by degree, in lexicographic degree order.
    pub fn components(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut out: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, d) in self.degree.iter().enumerate() {
            out.entry(d.clone()).or_default().push(i);
        }
        out
    }
}

/// A finite abelian group given by a Cayley table, identified with a
/// product of cyclic groups.
struct AbelianGroup {
    factors: Vec<usize>,
    coords: Vec<Vec<usize>>,
}

impl AbelianGroup {
    fn from_table(table: &[Vec<usize>], e: usize) -> Option<Self> {
        let n = table.len();
        if table.iter().any(|row| row.iter().any(|&x| x >= n)) {
            return None;
        }
        for a in 0..n {
            if table[e][a] != a || table[a][e] != a {
                return None;
            }
            for b in 0..n {
                if table[a][b] != table[b][a] {
                    return None;
                }
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return None;
                    }
                }
            }
            if !(0..n).any(|b| table[a][b] == e) {
                return None;
            }
        }
        let order = |a: usize| {
            let mut x = a;
            let mut k = 1;
            while x != e {
                x = table[x][a];
                k += 1;
            }
            k
        };
        let orders: Vec<usize> = (0..n).map(order).collect();
        let pow = |a: usize, k: usize| (0..k).fold(e, |x, _| table[x][a]);
        // try invariant factor lists in order until generators are found
        for factors in invariant_factor_lists(n) {
            let t = factors.len();
            let mut chosen = vec![e; t];
            if Self::pick(table, e, &orders, &factors, 0, &mut chosen, &pow) {
                let mut coords = vec![Vec::new(); n];
                let mut idx = vec![0usize; t];
                loop {
                    let mut x = e;
                    for (g, &k) in chosen.iter().zip(&idx) {
                        x = table[x][pow(*g, k)];
                    }
                    coords[x] = idx.clone();
                    let mut p = 0;
                    while p < t {
                        idx[p] += 1;
                        if idx[p] < factors[p] {
                            break;
                        }
                        idx[p] = 0;
                        p += 1;
                    }
                    if p == t {
                        break;
                    }
                }
                return Some(AbelianGroup { factors, coords });
            }
        }
        None
    }

    fn pick(
        table: &[Vec<usize>],
        e: usize,
        orders: &[usize],
        factors: &[usize],
        depth: usize,
        chosen: &mut Vec<usize>,
        pow: &dyn Fn(usize, usize) -> usize,
    ) -> bool {
        if depth == factors.len() {
            // check the map from the product group is a bijection
            let n = table.len();
            let mut hit = vec![false; n];
            let mut idx = vec![0usize; factors.len()];
            loop {
                let mut x = e;
                for (g, &k) in chosen.iter().zip(&idx) {
                    x = table[x][pow(*g, k)];
                }
                if hit[x] {
                    return false;
                }
                hit[x] = true;
                let mut p = 0;
                while p < factors.len() {
                    idx[p] += 1;
                    if idx[p] < factors[p] {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == factors.len() {
                    return true;
                }
            }
        }
        for g in 0..table.len() {
            if orders[g] == factors[depth] {
                chosen[depth] = g;
                if Self::pick(table, e, orders, factors, depth + 1, chosen, pow) {
                    return true;
                }
            }
        }
        false
    }
}

/// All lists `f1 | f2 | … | ft` with product `n` and every `fi > 1`.
fn invariant_factor_lists(n: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, last: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 1 {
            out.push(acc.clone());
            return;
        }
        for f in 2..=rem {
            if rem % f == 0 && (last == 0 || f % last == 0) {
                acc.push(f);
                go(rem / f, f, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, 0, &mut Vec::new(), &mut out);
    out
}

/// Backtracking search for basis bijections between two rings.
struct IsoSearch<'a> {
    r: &'a FusionRing,
    s: &'a FusionRing,
    class_r: Vec<u64>,
    class_s: Vec<u64>,
}

fn ring_invariants(ring: &FusionRing) -> Vec<u64> {
    let dims = ring.fp_dims_approx();
    (0..ring.rank())
        .map(|i| {
            let d = (dims[i] * 1e6).round() as u64;
            let di = ring.dual(i);
            let sq: u64 = ring.product(i, di).iter().map(|(_, m)| (*m as u64).pow(2)).sum();
            let sq2: u64 = ring.product(i, i).iter().map(|(_, m)| (*m as u64).pow(2)).sum();
            let terms = ring.product(i, i).len() as u64;
            d.wrapping_mul(1_000_003)
                .wrapping_add((di == i) as u64)
                .wrapping_mul(1_000_003)
                .wrapping_add(sq)
                .wrapping_mul(1_000_003)
                .wrapping_add(sq2)
                .wrapping_mul(1_000_003)
                .wrapping_add(terms)
        })
        .collect()
}

impl<'a> IsoSearch<'a> {
    fn new(r: &'a FusionRing, s: &'a FusionRing) -> Self {
        IsoSearch {
            r,
            s,
            class_r: ring_invariants(r),
            class_s: ring_invariants(s),
        }
    }

    fn run(&self, visit: &mut dyn FnMut(&[usize]) -> bool) {
        let n = self.r.rank();
        if n != self.s.rank() {
            return;
        }
        let mut a = self.class_r.clone();
        let mut b = self.class_s.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return;
        }
        let mut phi = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if !self.assign(self.r.unit(), self.s.unit(), &mut phi, &mut used) {
            return;
        }
        self.step(&mut phi, &mut used, visit);
    }

    /// Map `i → t` together with the forced `dual(i) → dual(t)`.
    fn assign(&self, i: usize, t: usize, phi: &mut [usize], used: &mut [bool]) -> bool {
        if self.class_r[i] != self.class_s[t] || used[t] {
            return false;
        }
        let di = self.r.dual(i);
        let dt = self.s.dual(t);
        if (di == i) != (dt == t) {
            return false;
        }
        phi[i] = t;
        used[t] = true;
        if di != i {
            if phi[di] != usize::MAX || used[dt] {
                phi[i] = usize::MAX;
                used[t] = false;
                return false;
            }
            phi[di] = dt;
            used[dt] = true;
        }
        if self.consistent(phi, &[i, di]) {
            true
        } else {
            self.unassign(i, phi, used);
            false
        }
    }

    fn unassign(&self, i: usize, phi: &mut [usize], used: &mut [bool]) {
        let di = self.r.dual(i);
        used[phi[i]] = false;
        phi[i] = usize::MAX;
        if di != i {
            used[phi[di]] = false;
            phi[di] = usize::MAX;
        }
    }

    fn consistent(&self, phi: &[usize], fresh: &[usize]) -> bool {
        let assigned: Vec<usize> = (0..phi.len()).filter(|&x| phi[x] != usize::MAX).collect();
        for &f in fresh {
            for &x in &assigned {
                for &y in &assigned {
                    for (p, q, w) in [(f, x, y), (x, f, y), (x, y, f)] {
                        if self.r.n(p, q, w) != self.s.n(phi[p], phi[q], phi[w]) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    fn step(&self, phi: &mut [usize], used: &mut [bool], visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let n = phi.len();
        // pick the unassigned index with the fewest consistent images
        let mut best: Option<(usize, Vec<usize>)> = None;
        let open: Vec<usize> = (0..n).filter(|&i| phi[i] == usize::MAX).collect();
        for i in open {
            let mut cands = Vec::new();
            for t in 0..n {
                if self.assign(i, t, phi, used) {
                    cands.push(t);
                    self.unassign(i, phi, used);
                }
            }
            if best.as_ref().map_or(true, |(_, c)| cands.len() < c.len()) {
                let empty = cands.is_empty();
                best = Some((i, cands));
                if empty {
                    break;
                }
            }
        }
        let Some((i, cands)) = best else {
            return visit(phi);
        };
        for t in cands {
            if self.assign(i, t, phi, used) {
                let go_on = self.step(phi, used, visit);
                self.unassign(i, phi, used);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// A nonnegative integer combination of basis elements of a ring.
#[derive(Clone)]
pub struct ObjectVector {
    ring: Arc<FusionRing>,
    coeffs: Vec<u32>,
}

impl PartialEq for ObjectVector {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
    }
}

impl Eq for ObjectVector {}

impl fmt::Debug for ObjectVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ObjectVector({})", crate::expr::format_object(self))
    }
}

impl fmt::Display for ObjectVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::expr::format_object(self))
    }
}

impl ObjectVector {
    pub fn new(ring: Arc<FusionRing>, coeffs: Vec<u32>) -> Result<Self, RingError> {
        if coeffs.len() != ring.rank() {
            return Err(RingError::Invalid(Violation::Shape(format!(
                "object vector has {} coefficients, ring has rank {}",
                coeffs.len(),
                ring.rank()
            ))));
        }
        Ok(ObjectVector { ring, coeffs })
    }

    pub fn zero(ring: Arc<FusionRing>) -> Self {
        let r = ring.rank();
        ObjectVector {
            ring,
            coeffs: vec![0; r],
        }
    }

    pub fn basis(ring: Arc<FusionRing>, i: usize) -> Self {
        let mut v = ObjectVector::zero(ring);
        v.coeffs[i] = 1;
        v
    }

    pub fn unit(ring: Arc<FusionRing>) -> Self {
        let u = ring.unit();
        ObjectVector::basis(ring, u)
    }

    pub fn ring(&self) -> &Arc<FusionRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn same_ring(&self, other: &ObjectVector) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring
    }

    pub fn add(&self, other: &ObjectVector) -> ObjectVector {
        ObjectVector {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: u32) -> ObjectVector {
        ObjectVector {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// Ring product `self · other`.
    pub fn mul(&self, other: &ObjectVector) -> ObjectVector {
        let r = self.ring.rank();
        let mut out = vec![0u32; r];
        for (i, &a) in self.coeffs.iter().enumerate().filter(|(_, a)| **a > 0) {
            for (j, &b) in other.coeffs.iter().enumerate().filter(|(_, b)| **b > 0) {
                for (k, m) in self.ring.product(i, j) {
                    out[k] += a * b * m;
                }
            }
        }
        ObjectVector {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    pub fn dual(&self) -> ObjectVector {
        let mut out = vec![0; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[self.ring.dual(i)] = a;
        }
        ObjectVector {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }

    pub fn is_self_dual(&self) -> bool {
        (0..self.coeffs.len()).all(|i| self.coeffs[i] == self.coeffs[self.ring.dual(i)])
    }

    /// Unit coefficient exactly 1 and self-dual.
    pub fn is_algebra_candidate(&self) -> bool {
        self.coeffs[self.ring.unit()] == 1 && self.is_self_dual()
    }

    pub fn dim(&self) -> Result<QuadNumber, RingError> {
        let dims = self.ring.fp_dims()?;
        Ok(self
            .coeffs
            .iter()
            .zip(dims)
            .map(|(&c, d)| d * c as i64)
            .sum())
    }

    /// Apply a basis relabeling `phi` (index `i` goes to `phi[i]`).
    pub fn relabeled(&self, phi: &[usize]) -> ObjectVector {
        let mut out = vec![0; self.coeffs.len()];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[phi[i]] = a;
        }
        ObjectVector {
            ring: self.ring.clone(),
            coeffs: out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::catalog_ring;
    use super::*;

    fn hi4() -> Arc<FusionRing> {
        catalog_ring("HI-Z4").unwrap().ring
    }

    #[test]
    fn catalog_rings_validate() {
        for name in catalog::catalog_names() {
            let c = catalog_ring(name).unwrap();
            assert_eq!(c.ring.validate(), Ok(()), "{name}");
        }
    }

    #[test]
    fn perturbed_tensor_breaks_associativity() {
        let r = hi4();
        let rho = r.index_of("r").unwrap();
        let mut t = r.tensor().to_vec();
        let rk = r.rank();
        t[(rho * rk + rho) * rk + rho] = 2;
        let bad = FusionRing::from_parts_unchecked("bad", r.labels().to_vec(), 0, r.duals().to_vec(), t);
        assert!(matches!(bad.validate(), Err(Violation::Associativity { .. })));
    }

    #[test]
    fn wrong_duality_is_reported() {
        // Z/2 group ring with x*x lacking the unit
        let labels = vec!["1".to_string(), "x".to_string()];
        let t = vec![1, 0, 0, 1, 0, 1, 0, 1];
        let bad = FusionRing::from_parts_unchecked("bad", labels, 0, vec![0, 1], t);
        assert!(matches!(bad.validate(), Err(Violation::Duality { .. })));
    }

    #[test]
    fn fp_dims_examples() {
        let d = QuadNumber::d();
        let one = QuadNumber::one();
        let fp = hi4().fp_data().unwrap().clone();
        assert_eq!(fp.dims[..4], vec![one.clone(); 4][..]);
        assert_eq!(fp.dims[4..], vec![d.clone(); 4][..]);
        assert_eq!(fp.global, &QuadNumber::from_int(4) + &(&(&d * &d) * 4));

        let c1 = catalog_ring("4442").unwrap().ring;
        let three = QuadNumber::from_int(3);
        let want = vec![
            one.clone(),
            one.clone(),
            one.clone(),
            three.clone(),
            d.clone(),
            d.clone(),
            d.clone(),
            &three * &d,
        ];
        assert_eq!(c1.fp_dims().unwrap(), &want[..]);
        assert_eq!(c1.global_dim().unwrap(), &(QuadNumber::from_int(12) + &(&d * &d) * 12));

        let triv = catalog_ring("trivial").unwrap().ring;
        assert_eq!(triv.fp_dims().unwrap(), &[one.clone()][..]);
        assert_eq!(triv.global_dim().unwrap(), &one);
    }

    #[test]
    fn crossed_product_examples() {
        let c2 = catalog_ring("C2").unwrap().ring;
        assert_eq!(c2.rank(), 24);
        assert_eq!(c2.invertibles().len(), 12);
        let base = catalog_ring("HI-Z2xZ2").unwrap().ring;
        assert_eq!(
            c2.global_dim().unwrap(),
            &(base.global_dim().unwrap() * 3)
        );

        let id: Vec<usize> = (0..base.rank()).collect();
        let (same, g) = base.crossed_product(&id, 1).unwrap();
        assert_eq!(same.tensor(), base.tensor());
        assert_eq!(g.order(), 1);

        let z2 = catalog_ring("VecZ2").unwrap().ring;
        let (z2z2, g) = z2.crossed_product(&[0, 1], 2).unwrap();
        let klein = catalog_ring("VecZ2xZ2").unwrap().ring;
        assert!(z2z2.find_isomorphism(&klein).is_some());
        assert!(g.is_valid_for(&z2z2));

        // a non-automorphism is rejected
        let bad: Vec<usize> = vec![0, 1, 2, 3, 5, 4, 6, 7];
        assert!(hi4().crossed_product(&bad, 2).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let r = hi4();
        let phi = r.find_isomorphism(&r).unwrap();
        r.check_automorphism(&phi).unwrap();
        let k = catalog_ring("HI-Z2xZ2").unwrap().ring;
        assert!(r.find_isomorphism(&k).is_none());
        assert!(k.find_isomorphism(&k.opposite()).is_some());
        // every automorphism is a genuine one, and the list contains the identity
        let autos = k.automorphisms();
        assert!(autos.contains(&(0..8).collect::<Vec<_>>()));
        for a in &autos {
            k.check_automorphism(a).unwrap();
        }
        assert_eq!(autos.len(), 24);
    }

    #[test]
    fn grading_examples() {
        let c = catalog_ring("C2").unwrap();
        let trivial: Vec<usize> = (0..8).collect();
        let g = c.ring.grading_from_subring(&trivial).unwrap().unwrap();
        assert_eq!(g.factors, vec![3]);
        assert!(g.is_valid_for(&c.ring));
        assert!(g.components().values().all(|v| v.len() == 8));

        let r = hi4();
        let all: Vec<usize> = (0..8).collect();
        let g = r.grading_from_subring(&all).unwrap().unwrap();
        assert_eq!(g.order(), 1);

        let k = catalog_ring("HI-Z2xZ2").unwrap().ring;
        assert_eq!(k.grading_from_subring(&[0, 1, 2, 3]).unwrap(), None);
        assert!(k.grading_from_subring(&[0, 4]).is_err());

        let a4 = catalog_ring("VecA4").unwrap().ring;
        // the Klein four subgroup: identity and the three involutions
        let klein: Vec<usize> = (0..12).filter(|&i| a4.product(i, i) == vec![(0, 1)]).collect();
        assert_eq!(klein.len(), 4);
        let g = a4.grading_from_subring(&klein).unwrap().unwrap();
        assert_eq!(g.factors, vec![3]);
        let z2z2 = catalog_ring("VecZ2xZ2").unwrap().ring;
        let g = z2z2.grading_from_subring(&[0]).unwrap().unwrap();
        assert_eq!(g.factors, vec![2, 2]);
        assert!(g.is_valid_for(&z2z2));
    }

    #[test]
    fn subring_of_4442_is_rep_a4() {
        let c1 = catalog_ring("4442").unwrap().ring;
        let (sub, idx) = c1.subring(&[0, 1, 2, 3]).unwrap();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        let a4 = catalog_ring("RepA4").unwrap().ring;
        assert!(sub.find_isomorphism(&a4).is_some());
        assert!(c1.subring(&[0, 4]).is_err());
    }

    #[test]
    fn object_vector_ops() {
        let r = hi4();
        let rho = ObjectVector::basis(r.clone(), 4);
        let sq = rho.mul(&rho);
        assert_eq!(sq.coeffs(), &[1, 0, 0, 0, 1, 1, 1, 1]);
        assert!(sq.is_algebra_candidate());
        assert_eq!(sq.dim().unwrap(), QuadNumber::in_d(1, 4));
        assert!(ObjectVector::new(r, vec![1]).is_err());
    }
}
