//! Right fusion modules over a fusion ring.
//!
//! `M[i][a][b]` is the multiplicity of `m_b` in `m_a · x_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::QuadNumber;
use crate::matrix::{support_components, Matrix};
use crate::ring::{FusionRing, Grading, ObjectVector, RingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuleError {
    #[error("invalid fusion module: {0}")]
    Invalid(ModuleViolation),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("dimension vector of the module is not consistent: {0}")]
    Dimension(String),
    #[error("modules are over different rings")]
    RingMismatch,
}

/// The first module axiom a candidate fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleViolation {
    Shape(String),
    Unit,
    Frobenius { i: usize },
    Associativity { i: usize, j: usize },
    Decomposable { components: usize },
}

impl fmt::Display for ModuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleViolation::Shape(s) => write!(f, "shape mismatch: {s}"),
            ModuleViolation::Unit => write!(f, "the unit does not act as the identity"),
            ModuleViolation::Frobenius { i } => {
                write!(f, "Frobenius reciprocity fails: M[dual({i})] is not the transpose of M[{i}]")
            }
            ModuleViolation::Associativity { i, j } => {
                write!(f, "associativity fails: M[{i}]M[{j}] differs from the expansion of x{i}x{j}")
            }
            ModuleViolation::Decomposable { components } => {
                write!(f, "module is decomposable into {components} components")
            }
        }
    }
}

#[derive(Clone)]
pub struct FusionModule {
    ring: Arc<FusionRing>,
    rank: usize,
    mats: Vec<Matrix>,
}

impl PartialEq for FusionModule {
    fn eq(&self, other: &Self) -> bool {
        self.mats == other.mats && (Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring)
    }
}

impl Eq for FusionModule {}

impl fmt::Debug for FusionModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FusionModule")
            .field("ring", &self.ring.name())
            .field("rank", &self.rank)
            .field("mats", &self.mats)
            .finish()
    }
}

impl FusionModule {
    pub fn from_parts_unchecked(ring: Arc<FusionRing>, mats: Vec<Matrix>) -> Self {
        let rank = mats.first().map_or(0, Matrix::dim);
        FusionModule { ring, rank, mats }
    }

    /// Build and validate.
    pub fn new(ring: Arc<FusionRing>, mats: Vec<Matrix>) -> Result<Self, ModuleError> {
        let m = FusionModule::from_parts_unchecked(ring, mats);
        m.validate().map_err(ModuleError::Invalid)?;
        Ok(m)
    }

    /// The regular module: `M[i]` is right multiplication by `x_i`.
    pub fn regular(ring: Arc<FusionRing>) -> Self {
        let mats = (0..ring.rank()).map(|i| ring.right_mult(i)).collect();
        FusionModule::from_parts_unchecked(ring, mats)
    }

    /// Block-diagonal direct sum, which is never indecomposable.
    pub fn direct_sum(&self, other: &FusionModule) -> FusionModule {
        let n = self.rank + other.rank;
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = Matrix::zeros(n);
                for r in 0..self.rank {
                    for c in 0..self.rank {
                        m.set(r, c, a.get(r, c));
                    }
                }
                for r in 0..other.rank {
                    for c in 0..other.rank {
                        m.set(self.rank + r, self.rank + c, b.get(r, c));
                    }
                }
                m
            })
            .collect();
        FusionModule::from_parts_unchecked(self.ring.clone(), mats)
    }

    pub fn ring(&self) -> &Arc<FusionRing> {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn matrix(&self, i: usize) -> &Matrix {
        &self.mats[i]
    }

    /// Relabel the module basis: new index `r` is old index `perm[r]`.
    pub fn permuted(&self, perm: &[usize]) -> FusionModule {
        FusionModule {
            ring: self.ring.clone(),
            rank: self.rank,
            mats: self.mats.iter().map(|m| m.permuted(perm)).collect(),
        }
    }

    /// Check the module axioms; the report names the first failure.
    pub fn validate(&self) -> Result<(), ModuleViolation> {
        let ring = &self.ring;
        let n = self.rank;
        if self.mats.len() != ring.rank() {
            return Err(ModuleViolation::Shape(format!(
                "{} matrices for a ring of rank {}",
                self.mats.len(),
                ring.rank()
            )));
        }
        if n == 0 || self.mats.iter().any(|m| m.dim() != n) {
            return Err(ModuleViolation::Shape("matrices must be square of equal positive size".into()));
        }
        if self.mats[ring.unit()] != Matrix::identity(n) {
            return Err(ModuleViolation::Unit);
        }
        for i in 0..ring.rank() {
            if self.mats[ring.dual(i)] != self.mats[i].transpose() {
                return Err(ModuleViolation::Frobenius { i });
            }
        }
        for i in 0..ring.rank() {
            for j in 0..ring.rank() {
                let lhs = self.mats[i].mul_wide(&self.mats[j]);
                let mut rhs = vec![0u64; n * n];
                for (k, m) in ring.product(i, j) {
                    for (x, &y) in rhs.iter_mut().zip(self.mats[k].as_slice()) {
                        *x += m as u64 * y as u64;
                    }
                }
                if lhs != rhs {
                    return Err(ModuleViolation::Associativity { i, j });
                }
            }
        }
        let comps = support_components(n, &self.mats);
        if comps.len() > 1 {
            return Err(ModuleViolation::Decomposable {
                components: comps.len(),
            });
        }
        Ok(())
    }

    /// Internal end of `m_a`: coefficient of `x_i` is `M[i][a][a]`.
    pub fn internal_end(&self, a: usize) -> ObjectVector {
        let coeffs = self.mats.iter().map(|m| m.get(a, a)).collect();
        ObjectVector::new(self.ring.clone(), coeffs).expect("one coefficient per ring index")
    }

    /// Internal ends grouped by equality, with multiplicities, sorted by
    /// dimension and then by coefficients.
    pub fn algebra_table(&self) -> Vec<(ObjectVector, usize)> {
        let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for a in 0..self.rank {
            *counts.entry(self.internal_end(a).coeffs().to_vec()).or_default() += 1;
        }
        let dims = self.ring.fp_dims_approx();
        let mut rows: Vec<(f64, Vec<u32>, usize)> = counts
            .into_iter()
            .map(|(c, k)| {
                let d = c.iter().zip(&dims).map(|(&x, y)| x as f64 * y).sum();
                (d, c, k)
            })
            .collect();
        rows.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
        rows.into_iter()
            .map(|(_, c, k)| (ObjectVector::new(self.ring.clone(), c).expect("rank matches"), k))
            .collect()
    }

    /// Exact dimension data.
    pub fn dim_vector(&self) -> Result<DimVector, ModuleError> {
        let dims = self.ring.fp_dims()?;
        let n = self.rank;
        // Σ_i dims_i M_i equals d dᵀ
        let mut p = vec![QuadNumber::zero(); n * n];
        for (m, di) in self.mats.iter().zip(dims) {
            for (x, &y) in p.iter_mut().zip(m.as_slice()) {
                if y > 0 {
                    *x += &(di * y as i64);
                }
            }
        }
        let s0 = p[0].clone();
        if !s0.is_positive() {
            return Err(ModuleError::Dimension("first diagonal entry is not positive".into()));
        }
        let ratios: Vec<QuadNumber> = (0..n)
            .map(|a| p[a].checked_div(&s0).expect("nonzero"))
            .collect();
        for a in 0..n {
            for b in 0..n {
                if p[a * n + b] != &(&s0 * &ratios[a]) * &ratios[b] {
                    return Err(ModuleError::Dimension(format!("entry ({a}, {b}) breaks the rank-one identity")));
                }
            }
        }
        for (m, di) in self.mats.iter().zip(dims) {
            for a in 0..n {
                let lhs: QuadNumber = (0..n)
                    .filter(|&b| m.get(a, b) > 0)
                    .map(|b| &ratios[b] * m.get(a, b) as i64)
                    .sum();
                if lhs != di * &ratios[a] {
                    return Err(ModuleError::Dimension(format!("not an eigenvector at row {a}")));
                }
            }
        }
        let dv = DimVector {
            scale_sq: s0,
            ratios,
        };
        let total: QuadNumber = dv.squares().into_iter().sum();
        if &total != self.ring.global_dim()? {
            return Err(ModuleError::Dimension("squares do not sum to the global dimension".into()));
        }
        Ok(dv)
    }

    /// Some `perm` with `other = self.permuted(perm)`, if one exists.
    pub fn equivalent_to(&self, other: &FusionModule) -> Option<Vec<usize>> {
        modules_equivalent(self, other)
    }
}

/// Module dimensions `d_a = sqrt(scale_sq) · ratios[a]`. The ratios and
/// the squared scale lie in Q(√5); the dimensions themselves need not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimVector {
    pub scale_sq: QuadNumber,
    pub ratios: Vec<QuadNumber>,
}

impl DimVector {
    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// `d_a · d_b`, always in Q(√5).
    pub fn gram(&self, a: usize, b: usize) -> QuadNumber {
        &(&self.scale_sq * &self.ratios[a]) * &self.ratios[b]
    }

    /// `d_a²` for every index.
    pub fn squares(&self) -> Vec<QuadNumber> {
        (0..self.len()).map(|a| self.gram(a, a)).collect()
    }

    /// `d_a` itself when it lies in Q(√5).
    pub fn value(&self, a: usize) -> Option<QuadNumber> {
        self.gram(a, a).sqrt()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let s = self.scale_sq.to_f64().sqrt();
        self.ratios.iter().map(|r| s * r.to_f64()).collect()
    }

    /// Human-readable entries: `3+3d`, or `sqrt(1+d)` when irrational.
    pub fn to_strings(&self) -> Vec<String> {
        (0..self.len())
            .map(|a| match self.value(a) {
                Some(v) => v.to_d_string(),
                None => format!("sqrt({})", self.gram(a, a).to_d_string()),
            })
            .collect()
    }
}

/// A deterministic representative of the equivalence class of a module,
/// with the relabeling that produces it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub rank: usize,
    /// Row-major entries of every matrix of the relabeled module.
    pub key: Vec<u32>,
}

/// Canonical relabeling: `(perm, form)` with `K.permuted(perm)` having
/// entries `form.key`.
pub fn canonical_form(k: &FusionModule) -> (Vec<usize>, CanonicalForm) {
    let n = k.rank();
    let init: Vec<Vec<u32>> = (0..n).map(|a| k.internal_end(a).coeffs().to_vec()).collect();
    let colors = refine(k, rank_keys(&init));
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    search_leaves(k, colors, &mut best);
    let (key, perm) = best.expect("at least one leaf");
    (perm, CanonicalForm { rank: n, key })
}

fn rank_keys<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|x| sorted.binary_search(x).expect("present"))
        .collect()
}

/// Iterated color refinement with label-independent signatures.
fn refine(k: &FusionModule, mut colors: Vec<usize>) -> Vec<usize> {
    let n = k.rank();
    let mut classes = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
    loop {
        let sigs: Vec<(usize, Vec<(usize, u32, usize)>)> = (0..n)
            .map(|a| {
                let mut s: Vec<(usize, u32, usize)> = Vec::new();
                for (i, m) in k.matrices().iter().enumerate() {
                    for b in 0..n {
                        let x = m.get(a, b);
                        if x > 0 {
                            s.push((i, x, colors[b]));
                        }
                    }
                }
                s.sort_unstable();
                (colors[a], s)
            })
            .collect();
        let next = rank_keys(&sigs);
        let c = next.iter().collect::<std::collections::BTreeSet<_>>().len();
        colors = next;
        if c == classes {
            return colors;
        }
        classes = c;
    }
}

fn search_leaves(k: &FusionModule, colors: Vec<usize>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
    let n = k.rank();
    let mut sizes = vec![0usize; n];
    for &c in &colors {
        sizes[c] += 1;
    }
    let Some(cell) = (0..n).find(|&c| sizes[c] > 1) else {
        // discrete: vertex a goes to position colors[a]
        let mut perm = vec![0; n];
        for (a, &c) in colors.iter().enumerate() {
            perm[c] = a;
        }
        let key: Vec<u32> = k
            .matrices()
            .iter()
            .flat_map(|m| m.permuted(&perm).as_slice().to_vec())
            .collect();
        if best.as_ref().map_or(true, |(b, _)| key < *b) {
            *best = Some((key, perm));
        }
        return;
    };
    for v in (0..n).filter(|&a| colors[a] == cell) {
        let split: Vec<(usize, bool)> = (0..n).map(|a| (colors[a], a != v)).collect();
        let next = refine(k, rank_keys(&split));
        search_leaves(k, next, best);
    }
}

/// A module-basis permutation `perm` with `l = k.permuted(perm)`.
pub fn modules_equivalent(k: &FusionModule, l: &FusionModule) -> Option<Vec<usize>> {
    if k.rank() != l.rank() || k.mats.len() != l.mats.len() {
        return None;
    }
    let (pk, fk) = canonical_form(k);
    let (pl, fl) = canonical_form(l);
    if fk != fl {
        return None;
    }
    let mut inv_l = vec![0; pl.len()];
    for (r, &x) in pl.iter().enumerate() {
        inv_l[x] = r;
    }
    Some((0..k.rank()).map(|x| pk[inv_l[x]]).collect())
}

/// Restrict the action to a subring and split into indecomposable
/// components, ordered by rank and canonical form.
pub fn restrict_and_decompose(k: &FusionModule, sub: &[usize]) -> Result<Vec<FusionModule>, ModuleError> {
    let (subring, idx) = k.ring().subring(sub)?;
    let subring = Arc::new(subring);
    let mats: Vec<&Matrix> = idx.iter().map(|&i| k.matrix(i)).collect();
    let comps = support_components(k.rank(), mats.iter().copied());
    let mut out: Vec<(CanonicalForm, FusionModule)> = comps
        .into_iter()
        .map(|c| {
            let m = FusionModule::from_parts_unchecked(
                subring.clone(),
                mats.iter().map(|m| m.submatrix(&c)).collect(),
            );
            m.validate().map_err(ModuleError::Invalid)?;
            let (_, f) = canonical_form(&m);
            Ok((f, m))
        })
        .collect::<Result<_, ModuleError>>()?;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out.into_iter().map(|(_, m)| m).collect())
}

/// Label each module index by a group element so that `M[i][a][b] > 0`
/// forces `label(b) = label(a) + degree(i)`, with index 0 labeled by the
/// identity. `None` if no such labeling exists.
pub fn grade_module(k: &FusionModule, g: &Grading) -> Option<Vec<Vec<usize>>> {
    let n = k.rank();
    let mut label: Vec<Option<Vec<usize>>> = vec![None; n];
    label[0] = Some(g.identity());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        let la = label[a].clone().expect("queued indices are labeled");
        for (i, m) in k.matrices().iter().enumerate() {
            for b in 0..n {
                if m.get(a, b) == 0 {
                    continue;
                }
                let want = g.add(&la, &g.degree[i]);
                match &label[b] {
                    Some(lb) if *lb != want => return None,
                    Some(_) => {}
                    None => {
                        label[b] = Some(want);
                        queue.push_back(b);
                    }
                }
            }
        }
    }
    label.into_iter().collect()
}

/// Module indices grouped by their grading label.
pub fn grading_blocks(labels: &[Vec<usize>]) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut out: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (a, l) in labels.iter().enumerate() {
        out.entry(l.clone()).or_default().push(a);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_object;
    use crate::ring::catalog::catalog_ring;
    use proptest::prelude::*;

    fn ring(name: &str) -> Arc<FusionRing> {
        catalog_ring(name).unwrap().ring
    }

    #[test]
    fn regular_modules_validate() {
        for name in crate::ring::catalog::catalog_names() {
            let k = FusionModule::regular(ring(name));
            assert_eq!(k.validate(), Ok(()), "{name}");
            let dv = k.dim_vector().unwrap();
            let fp = k.ring().fp_dims().unwrap().to_vec();
            let vals: Vec<QuadNumber> = (0..k.rank()).map(|a| dv.value(a).unwrap()).collect();
            assert_eq!(vals, fp, "{name}");
        }
    }

    #[test]
    fn violations() {
        let r = ring("HI-Z4");
        let k = FusionModule::regular(r.clone());
        let mut mats = k.matrices().to_vec();
        let mut m = mats[1].clone();
        m.set(0, 0, m.get(0, 0) + 1);
        mats[1] = m;
        let bad = FusionModule::from_parts_unchecked(r.clone(), mats);
        assert!(matches!(bad.validate(), Err(ModuleViolation::Frobenius { .. })));
        let sum = k.direct_sum(&k);
        assert_eq!(sum.validate(), Err(ModuleViolation::Decomposable { components: 2 }));
    }

    #[test]
    fn internal_ends_of_regular_module() {
        let r = ring("HI-Z2xZ2");
        let k = FusionModule::regular(r.clone());
        let rho = r.index_of("r").unwrap();
        assert_eq!(k.internal_end(rho), parse_object(&r, "1+Gamma*r").unwrap());
        assert_eq!(k.internal_end(r.unit()), parse_object(&r, "1").unwrap());
        let table = k.algebra_table();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0], (parse_object(&r, "1").unwrap(), 4));
        assert_eq!(table[1], (parse_object(&r, "1+Gamma*r").unwrap(), 4));
        let t = FusionModule::regular(ring("trivial"));
        assert_eq!(t.algebra_table().len(), 1);
        assert_eq!(t.dim_vector().unwrap().to_strings(), vec!["1"]);
    }

    #[test]
    fn restriction_of_crossed_product() {
        let c2 = ring("C2");
        let k = FusionModule::regular(c2);
        let parts = restrict_and_decompose(&k, &(0..8).collect::<Vec<_>>()).unwrap();
        assert_eq!(parts.len(), 3);
        let base = FusionModule::regular(Arc::new(parts[0].ring().as_ref().clone()));
        for p in &parts {
            assert!(modules_equivalent(p, &base).is_some());
        }
        let all: Vec<usize> = (0..24).collect();
        let whole = restrict_and_decompose(&k, &all).unwrap();
        assert_eq!(whole.len(), 1);
        assert!(modules_equivalent(&whole[0], &k).is_some());
        assert!(restrict_and_decompose(&k, &[0, 4]).is_err());

        let c1 = FusionModule::regular(ring("4442"));
        let parts = restrict_and_decompose(&c1, &[0, 1, 2, 3]).unwrap();
        assert_eq!(parts.len(), 2);
        let a4 = ring("RepA4");
        assert!(parts[0].ring().find_isomorphism(&a4).is_some());
    }

    #[test]
    fn grading_of_crossed_product_module() {
        let c = catalog_ring("C2").unwrap();
        let k = FusionModule::regular(c.ring.clone());
        let labels = grade_module(&k, c.grading.as_ref().unwrap()).unwrap();
        let blocks = grading_blocks(&labels);
        assert_eq!(blocks.len(), 3);
        assert!(blocks.values().all(|b| b.len() == 8));

        let z4 = FusionModule::regular(ring("HI-Z4"));
        let labels = grade_module(&z4, &Grading::trivial(8)).unwrap();
        assert_eq!(grading_blocks(&labels).len(), 1);

        // the rank-one module of VecZ2 fixes m under g, which has degree 1
        let z2r = ring("VecZ2");
        let one = Matrix::identity(1);
        let z2 = FusionModule::new(z2r.clone(), vec![one.clone(), one]).unwrap();
        let bad = z2r.grading_from_subring(&[0]).unwrap().unwrap();
        assert!(grade_module(&z2, &bad).is_none());
    }

    fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..n).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn equivalence_finds_witness(perm in shuffled(8)) {
            let k = FusionModule::regular(ring("HI-Z4"));
            let l = k.permuted(&perm);
            let w = modules_equivalent(&k, &l).unwrap();
            prop_assert_eq!(k.permuted(&w), l.clone());
            let back = modules_equivalent(&l, &k).unwrap();
            prop_assert_eq!(l.permuted(&back), k);
        }

        #[test]
        fn ends_are_algebra_candidates(perm in shuffled(8)) {
            let k = FusionModule::regular(ring("4442")).permuted(&perm);
            let dv = k.dim_vector().unwrap();
            for a in 0..k.rank() {
                let e = k.internal_end(a);
                prop_assert!(e.is_algebra_candidate());
                prop_assert_eq!(e.dim().unwrap(), dv.gram(a, a));
            }
        }
    }
}
