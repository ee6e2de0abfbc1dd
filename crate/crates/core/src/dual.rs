//! Dual fusion rings of a fusion module.
//!
//! A dual basis element acts on the module basis by a nonnegative integer
//! matrix `L_j` commuting with every action matrix `M_i`. These matrices
//! satisfy
//!
//! ```text
//! Σ_i M_i[a][b] M_i[c][e] = Σ_j L_j[a][c] L_j[b][e]
//! ```
//!
//! so the vectors `vec(L_j)` decompose the positive semidefinite integer
//! matrix `Q[(a,c)][(b,e)] = Σ_i M_i[a][b] M_i[c][e]` into rank-one terms.
//! The search below enumerates all such decompositions by nonnegative
//! integer vectors in the commutant, then reads off structure constants
//! from `L_j L_k = Σ_l N'[j][k][l] L_l`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::QuadNumber;
use crate::matrix::Matrix;
use crate::module::{FusionModule, ModuleError};
use crate::ring::{FusionRing, RingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("no dual ring candidate exists for this module")]
    NoCandidate,
    #[error("search limit of {0} decompositions exceeded")]
    Limit(usize),
    #[error("completion search exceeded {0} nodes")]
    CompletionLimit(usize),
    #[error("entries too large for the integer search")]
    Overflow,
}

/// A dual ring together with the matrices by which it acts on the module.
#[derive(Debug, Clone)]
pub struct DualRingCandidate {
    pub ring: Arc<FusionRing>,
    /// `l[j]` is the action of dual basis element `j`.
    pub l: Vec<Matrix>,
}

impl DualRingCandidate {
    /// The module basis seen as a right module over the dual ring.
    pub fn as_module(&self) -> Result<FusionModule, ModuleError> {
        FusionModule::new(self.ring.clone(), self.l.clone())
    }
}

/// Basis of all rational matrices commuting with every action matrix, as
/// row-major vectors. The basis is the reduced null space of the
/// commutation equations.
pub fn commutant_basis(k: &FusionModule) -> Vec<Vec<BigRational>> {
    let sys = CommutantSystem::new(k);
    let nv = sys.nvars;
    sys.free
        .iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); nv];
            v[f] = BigRational::one();
            for (row, &p) in sys.rref.iter().zip(&sys.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn commutant_dim(k: &FusionModule) -> usize {
    CommutantSystem::new(k).free.len()
}

/// Reduced row echelon form of the commutation equations.
struct CommutantSystem {
    nvars: usize,
    rref: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl CommutantSystem {
    fn new(k: &FusionModule) -> Self {
        let n = k.rank();
        let nv = n * n;
        let mut rows: Vec<Vec<BigRational>> = Vec::new();
        for m in k.matrices() {
            for a in 0..n {
                for b in 0..n {
                    // (L M)[a][b] - (M L)[a][b] = 0
                    let mut eq = vec![BigRational::zero(); nv];
                    let mut nonzero = false;
                    for c in 0..n {
                        let x = m.get(c, b);
                        if x > 0 {
                            eq[a * n + c] += BigRational::from_integer(x.into());
                            nonzero = true;
                        }
                        let y = m.get(a, c);
                        if y > 0 {
                            eq[c * n + b] -= BigRational::from_integer(y.into());
                            nonzero = true;
                        }
                    }
                    if nonzero && eq.iter().any(|x| !x.is_zero()) {
                        rows.push(eq);
                    }
                }
            }
        }
        let (rref, pivots) = rref(rows, nv);
        let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
        let free = (0..nv).filter(|v| !pivot_set.contains(v)).collect();
        CommutantSystem {
            nvars: nv,
            rref,
            pivots,
            free,
        }
    }
}

fn rref(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Integer form of the pivot equations: `den · x_p = -Σ_f num_f · x_f`
/// over free variables `f > p`.
struct PivotEq {
    den: i128,
    terms: Vec<(usize, i128)>,
}

struct Decomposer {
    n: usize,
    nv: usize,
    /// `pivot_of[v]` is the equation determining variable `v`, if any.
    pivot_of: Vec<Option<PivotEq>>,
    limit: usize,
}

impl Decomposer {
    fn new(k: &FusionModule, limit: usize) -> Result<Self, DualError> {
        let sys = CommutantSystem::new(k);
        let mut pivot_of: Vec<Option<PivotEq>> = (0..sys.nvars).map(|_| None).collect();
        for (row, &p) in sys.rref.iter().zip(&sys.pivots) {
            let den = row
                .iter()
                .filter(|x| !x.is_zero())
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let mut terms = Vec::new();
            for (f, x) in row.iter().enumerate() {
                if f != p && !x.is_zero() {
                    let scaled = (x * BigRational::from_integer(den.clone())).to_integer();
                    terms.push((f, scaled.to_i128().ok_or(DualError::Overflow)?));
                }
            }
            pivot_of[p] = Some(PivotEq {
                den: den.to_i128().ok_or(DualError::Overflow)?,
                terms,
            });
        }
        Ok(Decomposer {
            n: k.rank(),
            nv: sys.nvars,
            pivot_of,
            limit,
        })
    }

    /// All nonnegative integer commutant vectors `v` with `v vᵀ ≤ r`
    /// entrywise and `v[p] >= 1`.
    fn vectors(&self, r: &[i64], p: usize, upper: Option<&[i64]>) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut v = vec![0i64; self.nv];
        self.assign(r, p, upper, self.nv, &mut v, &mut out);
        out
    }

    fn assign(&self, r: &[i64], p: usize, upper: Option<&[i64]>, q: usize, v: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if q == 0 {
            out.push(v.clone());
            return;
        }
        let q = q - 1;
        let nv = self.nv;
        let diag = r[q * nv + q].max(0);
        let mut hi = (diag as f64).sqrt().floor() as i64;
        while (hi + 1) * (hi + 1) <= diag {
            hi += 1;
        }
        while hi * hi > diag {
            hi -= 1;
        }
        if let Some(u) = upper {
            hi = hi.min(u[q]);
        }
        let lo = if q == p { 1 } else { 0 };
        let fits = |x: i64, v: &[i64]| {
            if x == 0 {
                return true;
            }
            (q + 1..nv).all(|s| v[s] == 0 || x * v[s] <= r[q * nv + s])
        };
        match &self.pivot_of[q] {
            Some(eq) => {
                let s: i128 = eq.terms.iter().map(|&(f, c)| c * v[f] as i128).sum();
                if (-s) % eq.den != 0 {
                    return;
                }
                let x = (-s / eq.den) as i64;
                if x < lo || x > hi || !fits(x, v) {
                    return;
                }
                v[q] = x;
                self.assign(r, p, upper, q, v, out);
                v[q] = 0;
            }
            None => {
                for x in lo..=hi {
                    if !fits(x, v) {
                        break;
                    }
                    v[q] = x;
                    self.assign(r, p, upper, q, v, out);
                }
                v[q] = 0;
            }
        }
    }

    fn transpose_vec(&self, v: &[i64]) -> Vec<i64> {
        let n = self.n;
        (0..self.nv).map(|x| v[(x % n) * n + x / n]).collect()
    }

    fn subtract(&self, r: &mut [i64], v: &[i64], sign: i64) {
        let nv = self.nv;
        for a in (0..nv).filter(|&a| v[a] != 0) {
            for b in (0..nv).filter(|&b| v[b] != 0) {
                r[a * nv + b] -= sign * v[a] * v[b];
            }
        }
    }

    /// Enumerate every decomposition of `r` into terms `v vᵀ` with
    /// transpose-closed vector sets.
    fn decompose(
        &self,
        r: &mut Vec<i64>,
        chosen: &mut Vec<Vec<i64>>,
        last: Option<(usize, Vec<i64>)>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) -> Result<(), DualError> {
        let nv = self.nv;
        let Some(p) = (0..nv).find(|&q| r[q * nv + q] > 0) else {
            if r.iter().all(|&x| x == 0) {
                if out.len() >= self.limit {
                    return Err(DualError::Limit(self.limit));
                }
                out.push(chosen.clone());
            }
            return Ok(());
        };
        if r.iter().enumerate().any(|(x, &y)| y < 0 && x / nv != x % nv) {
            return Ok(());
        }
        for v in self.vectors(r, p, None) {
            let vt = self.transpose_vec(&v);
            let pair = vt != v;
            if pair && vt[p] >= 1 && vt > v {
                continue;
            }
            if let Some((lp, lv)) = &last {
                if *lp == p && v > *lv {
                    continue;
                }
            }
            self.subtract(r, &v, 1);
            if pair {
                self.subtract(r, &vt, 1);
            }
            let ok = (0..nv).all(|q| r[q * nv + q] >= 0);
            if ok {
                chosen.push(v.clone());
                if pair {
                    chosen.push(vt.clone());
                }
                self.decompose(r, chosen, Some((p, v.clone())), out)?;
                chosen.pop();
                if pair {
                    chosen.pop();
                }
            }
            self.subtract(r, &v, -1);
            if pair {
                self.subtract(r, &vt, -1);
            }
        }
        Ok(())
    }
}

/// Default cap on the number of decompositions explored.
pub const DEFAULT_DECOMPOSITION_LIMIT: usize = 10_000;

/// Every dual ring candidate of `k`, up to relabeling of the dual basis.
pub fn dual_rings(k: &FusionModule) -> Result<Vec<DualRingCandidate>, DualError> {
    dual_rings_with_limit(k, DEFAULT_DECOMPOSITION_LIMIT)
}

pub fn dual_rings_with_limit(k: &FusionModule, limit: usize) -> Result<Vec<DualRingCandidate>, DualError> {
    let dv = k.dim_vector()?;
    let mut out = Vec::new();
    let mut budget = DEFAULT_COMPLETION_LIMIT;
    for mats in action_decompositions(k, limit)? {
        out.extend(build_candidates(k, &dv, mats, &mut budget)?);
    }
    if out.is_empty() {
        return Err(DualError::NoCandidate);
    }
    Ok(out)
}

/// Every multiset of nonnegative integer commutant matrices
/// `L_j`, containing the identity and closed under transpose, with
/// `Σ_i M_i[a][b] M_i[c][e] = Σ_j L_j[a][c] L_j[b][e]`. Each multiset is
/// sorted.
pub fn action_decompositions(k: &FusionModule, limit: usize) -> Result<Vec<Vec<Matrix>>, DualError> {
    k.validate().map_err(|v| DualError::Module(ModuleError::Invalid(v)))?;
    let n = k.rank();
    let nv = n * n;
    let mut r = vec![0i64; nv * nv];
    for m in k.matrices() {
        let flat = m.as_slice();
        for x in (0..nv).filter(|&x| flat[x] > 0) {
            let (a, b) = (x / n, x % n);
            for y in (0..nv).filter(|&y| flat[y] > 0) {
                let (c, e) = (y / n, y % n);
                r[(a * n + c) * nv + (b * n + e)] += flat[x] as i64 * flat[y] as i64;
            }
        }
    }
    let dec = Decomposer::new(k, limit)?;
    let id: Vec<i64> = (0..nv).map(|x| (x / n == x % n) as i64).collect();
    dec.subtract(&mut r, &id, 1);
    let mut found = Vec::new();
    dec.decompose(&mut r, &mut Vec::new(), None, &mut found)?;

    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    let mut out = Vec::new();
    for mut vs in found {
        vs.push(id.clone());
        vs.sort();
        if !seen.insert(vs.clone()) {
            continue;
        }
        let mut mats: Vec<Matrix> = vs
            .iter()
            .map(|v| Matrix::from_flat(n, v.iter().map(|&x| x as u32).collect()))
            .collect();
        mats.sort();
        out.push(mats);
    }
    Ok(out)
}

/// Default cap on the number of search nodes spent completing
/// structure constants, shared by all decompositions of one module.
pub const DEFAULT_COMPLETION_LIMIT: usize = 2_000_000;

/// All dual rings whose basis acts by the matrices `mats`, up to
/// relabeling preserving the action.
fn build_candidates(
    k: &FusionModule,
    dv: &crate::module::DimVector,
    mats: Vec<Matrix>,
    budget: &mut usize,
) -> Result<Vec<DualRingCandidate>, DualError> {
    let n = k.rank();
    // dimensions from L u = d' u
    let dim_of = |m: &Matrix| -> Option<QuadNumber> {
        let d = (0..n)
            .filter(|&b| m.get(0, b) > 0)
            .map(|b| &dv.ratios[b] * m.get(0, b) as i64)
            .sum::<QuadNumber>()
            .checked_div(&dv.ratios[0])
            .expect("positive ratio");
        (0..n)
            .all(|a| {
                let lhs: QuadNumber = (0..n)
                    .filter(|&b| m.get(a, b) > 0)
                    .map(|b| &dv.ratios[b] * m.get(a, b) as i64)
                    .sum();
                lhs == &d * &dv.ratios[a]
            })
            .then_some(d)
    };
    let Some(dims) = mats.iter().map(dim_of).collect::<Option<Vec<_>>>() else {
        return Ok(Vec::new());
    };
    let total: QuadNumber = dims.iter().map(|d| d * d).sum();
    if &total != k.ring().global_dim()? {
        return Ok(Vec::new());
    }
    // basis order: unit, then by dimension, then by matrix entries
    let identity = Matrix::identity(n);
    let mut order: Vec<usize> = (0..mats.len()).collect();
    order.sort_by(|&x, &y| {
        dims[x]
            .cmp(&dims[y])
            .then_with(|| (mats[x] != identity).cmp(&(mats[y] != identity)))
            .then_with(|| mats[x].cmp(&mats[y]))
    });
    let mats: Vec<Matrix> = order.iter().map(|&x| mats[x].clone()).collect();
    let r = mats.len();
    // classes of equal matrices
    let mut distinct: Vec<Matrix> = Vec::new();
    let mut class = vec![0; r];
    for (j, m) in mats.iter().enumerate() {
        class[j] = match distinct.iter().position(|x| x == m) {
            Some(c) => c,
            None => {
                distinct.push(m.clone());
                distinct.len() - 1
            }
        };
    }
    let nc = distinct.len();
    let members: Vec<Vec<usize>> = (0..nc).map(|c| (0..r).filter(|&j| class[j] == c).collect()).collect();
    let Some(transpose): Option<Vec<usize>> = distinct
        .iter()
        .map(|m| {
            let t = m.transpose();
            distinct.iter().position(|x| *x == t)
        })
        .collect()
    else {
        return Ok(Vec::new());
    };
    if (0..nc).any(|c| members[c].len() != members[transpose[c]].len()) {
        return Ok(Vec::new());
    }
    // every product of two actions must be a nonnegative combination
    for x in &distinct {
        for y in &distinct {
            if nonneg_combinations(&distinct, &x.mul_wide(y), 1).is_empty() {
                return Ok(Vec::new());
            }
        }
    }
    let mut out: Vec<DualRingCandidate> = Vec::new();
    let labels: Vec<String> = (0..r)
        .map(|j| if j == 0 { "1".to_string() } else { format!("y{j}") })
        .collect();
    let name = format!("dual of {} module", k.ring().name());
    for dual in dual_maps(&members, &transpose) {
        let Some(mut problem) = Completion::new(&dual, &mats) else { continue };
        problem.solve(budget, &mut |tensor| {
            let ring = FusionRing::from_parts_unchecked(name.clone(), labels.clone(), 0, dual.clone(), tensor.to_vec());
            if ring.validate().is_err() {
                return;
            }
            let seen = out.iter().any(|c| {
                c.ring
                    .find_isomorphism_where(&ring, |phi| (0..r).all(|j| c.l[j] == mats[phi[j]]))
                    .is_some()
            });
            if !seen && ring.fp_data().is_ok() {
                out.push(DualRingCandidate {
                    ring: Arc::new(ring),
                    l: mats.clone(),
                });
            }
        });
    }
    if *budget == 0 {
        return Err(DualError::CompletionLimit(DEFAULT_COMPLETION_LIMIT));
    }
    Ok(out)
}

/// Duality maps compatible with transposition of classes: members of a
/// class and its transpose are paired in order, and a self-transposed
/// class fixes its first `f` members and pairs the rest, for every `f` of
/// the right parity. The unit is always fixed.
fn dual_maps(members: &[Vec<usize>], transpose: &[usize]) -> Vec<Vec<usize>> {
    let r: usize = members.iter().map(|m| m.len()).sum();
    let mut base = vec![usize::MAX; r];
    let mut flexible = Vec::new();
    for (c, ms) in members.iter().enumerate() {
        let t = transpose[c];
        if t != c {
            for (x, y) in ms.iter().zip(&members[t]) {
                base[*x] = *y;
            }
        } else {
            flexible.push(c);
        }
    }
    let mut out = Vec::new();
    let mut choice: Vec<usize> = vec![0; flexible.len()];
    let options: Vec<Vec<usize>> = flexible
        .iter()
        .map(|&c| {
            let m = members[c].len();
            let min = usize::from(members[c].contains(&0));
            (min..=m).filter(|f| (m - f) % 2 == 0).collect()
        })
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return out;
    }
    loop {
        let mut d = base.clone();
        for (x, &c) in flexible.iter().enumerate() {
            let ms = &members[c];
            let f = options[x][choice[x]];
            for &j in &ms[..f] {
                d[j] = j;
            }
            for pair in ms[f..].chunks(2) {
                d[pair[0]] = pair[1];
                d[pair[1]] = pair[0];
            }
        }
        out.push(d);
        let mut x = 0;
        while x < choice.len() {
            choice[x] += 1;
            if choice[x] < options[x].len() {
                break;
            }
            choice[x] = 0;
            x += 1;
        }
        if x == choice.len() {
            return out;
        }
    }
}

/// Structure constants `N[j][k][l]` with `Σ_l N[j][k][l] L_l = L_j L_k`,
/// shared along Frobenius reciprocity orbits.
struct Completion {
    r: usize,
    /// Orbit of each triple `(j, k, l)`.
    orbit_of: Vec<usize>,
    /// Value forced by the unit axioms, if any.
    values: Vec<Option<u32>>,
    /// Linear constraints: `Σ coeff · orbit = target`.
    cons: Vec<(Vec<(usize, u32)>, u32)>,
    /// Constraints containing each orbit.
    by_orbit: Vec<Vec<usize>>,
    /// Associativity equations as products of orbit pairs on each side.
    assoc: Vec<[Vec<(usize, usize)>; 2]>,
    /// Slots `(equation, side)` in which each orbit occurs, once per
    /// occurrence.
    assoc_by: Vec<Vec<(usize, usize)>>,
}

/// Largest rank for which associativity is checked during the search.
const ASSOC_RANK: usize = 16;

impl Completion {
    fn new(dual: &[usize], mats: &[Matrix]) -> Option<Self> {
        let r = mats.len();
        let n = mats[0].dim();
        let idx = |j: usize, k: usize, l: usize| (j * r + k) * r + l;
        let mut parent: Vec<usize> = (0..r * r * r).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut y = x;
            while p[y] != y {
                p[y] = p[p[y]];
                y = p[y];
            }
            y
        }
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let t = idx(j, k, l);
                    for u in [idx(dual[j], l, k), idx(l, dual[k], j), idx(dual[k], dual[j], dual[l])] {
                        let (a, b) = (find(&mut parent, t), find(&mut parent, u));
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
            }
        }
        let mut ids = vec![usize::MAX; r * r * r];
        let mut orbit_of = vec![0; r * r * r];
        let mut count = 0;
        for t in 0..r * r * r {
            let root = find(&mut parent, t);
            if ids[root] == usize::MAX {
                ids[root] = count;
                count += 1;
            }
            orbit_of[t] = ids[root];
        }
        let mut values: Vec<Option<u32>> = vec![None; count];
        let mut fix = |o: usize, v: u32| -> bool {
            match values[o] {
                Some(w) => w == v,
                None => {
                    values[o] = Some(v);
                    true
                }
            }
        };
        for j in 0..r {
            for k in 0..r {
                if j == 0 || k == 0 {
                    let other = if j == 0 { k } else { j };
                    for l in 0..r {
                        if !fix(orbit_of[idx(j, k, l)], u32::from(l == other)) {
                            return None;
                        }
                    }
                }
            }
        }
        let mut cons: BTreeSet<(Vec<(usize, u32)>, u32)> = BTreeSet::new();
        for j in 1..r {
            for k in 1..r {
                let prod = mats[j].mul_wide(&mats[k]);
                for a in 0..n {
                    for b in 0..n {
                        let mut terms: BTreeMap<usize, u32> = BTreeMap::new();
                        for l in (0..r).filter(|&l| mats[l].get(a, b) > 0) {
                            *terms.entry(orbit_of[idx(j, k, l)]).or_default() += mats[l].get(a, b);
                        }
                        let target = u32::try_from(prod[a * n + b]).ok()?;
                        if terms.is_empty() && target == 0 {
                            continue;
                        }
                        cons.insert((terms.into_iter().collect(), target));
                    }
                }
            }
        }
        let cons: Vec<(Vec<(usize, u32)>, u32)> = cons.into_iter().collect();
        let mut by_orbit: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (x, (terms, _)) in cons.iter().enumerate() {
            for &(o, _) in terms {
                by_orbit[o].push(x);
            }
        }
        let mut assoc = Vec::new();
        let mut assoc_by: Vec<Vec<(usize, usize)>> = vec![Vec::new(); count];
        if r <= ASSOC_RANK {
            let zero = |o: usize| values[o] == Some(0);
            for a in 1..r {
                for b in 1..r {
                    for c in 1..r {
                        for e in 0..r {
                            let lhs: Vec<(usize, usize)> = (0..r)
                                .map(|l| (orbit_of[idx(a, b, l)], orbit_of[idx(l, c, e)]))
                                .filter(|&(x, y)| !zero(x) && !zero(y))
                                .collect();
                            let rhs: Vec<(usize, usize)> = (0..r)
                                .map(|l| (orbit_of[idx(a, l, e)], orbit_of[idx(b, c, l)]))
                                .filter(|&(x, y)| !zero(x) && !zero(y))
                                .collect();
                            if lhs.is_empty() && rhs.is_empty() {
                                continue;
                            }
                            let x = assoc.len();
                            for (side, terms) in [&lhs, &rhs].into_iter().enumerate() {
                                for &(p, q) in terms {
                                    assoc_by[p].push((x, side));
                                    assoc_by[q].push((x, side));
                                }
                            }
                            assoc.push([lhs, rhs]);
                        }
                    }
                }
            }
        }
        Some(Completion {
            r,
            orbit_of,
            values,
            cons,
            by_orbit,
            assoc,
            assoc_by,
        })
    }

    /// Unit propagation over the linear constraints. Returns false on a
    /// contradiction.
    fn propagate(&self, vals: &mut [Option<u32>], trail: &mut Vec<usize>, mut queue: Vec<usize>) -> bool {
        while let Some(x) = queue.pop() {
            let (terms, target) = &self.cons[x];
            let mut sum = 0u32;
            let mut open = Vec::new();
            for &(o, c) in terms {
                match vals[o] {
                    Some(v) => sum += c * v,
                    None => open.push((o, c)),
                }
            }
            if sum > *target {
                return false;
            }
            let rest = target - sum;
            let forced: Vec<(usize, u32)> = match open[..] {
                [] if rest != 0 => return false,
                [(o, c)] => {
                    if rest % c != 0 {
                        return false;
                    }
                    vec![(o, rest / c)]
                }
                _ if rest == 0 => open.iter().map(|&(o, _)| (o, 0)).collect(),
                _ => Vec::new(),
            };
            for (o, v) in forced {
                vals[o] = Some(v);
                trail.push(o);
                queue.extend(&self.by_orbit[o]);
            }
        }
        true
    }

    /// Record the orbits in `changed` as assigned and check every
    /// associativity equation with a side that became fully assigned.
    fn close(&self, vals: &[Option<u32>], open: &mut [[u32; 2]], changed: &[usize]) -> bool {
        let mut hit = Vec::new();
        for &o in changed {
            for &(x, side) in &self.assoc_by[o] {
                open[x][side] -= 1;
                if open[x][side] == 0 {
                    hit.push(x);
                }
            }
        }
        let side = |terms: &[(usize, usize)]| -> (u64, bool) {
            let mut sum = 0u64;
            let mut open = false;
            for &(p, q) in terms {
                match (vals[p], vals[q]) {
                    (Some(x), Some(y)) => sum += x as u64 * y as u64,
                    (Some(0), None) | (None, Some(0)) => {}
                    _ => open = true,
                }
            }
            (sum, open)
        };
        hit.into_iter().all(|x| {
            let [lhs, rhs] = &self.assoc[x];
            let (l, lo) = side(lhs);
            let (r, ro) = side(rhs);
            match (lo, ro) {
                (false, false) => l == r,
                (false, true) => r <= l,
                (true, false) => l <= r,
                (true, true) => true,
            }
        })
    }

    /// Undo [`Completion::close`].
    fn reopen(&self, open: &mut [[u32; 2]], changed: &[usize]) {
        for &o in changed {
            for &(x, side) in &self.assoc_by[o] {
                open[x][side] += 1;
            }
        }
    }

    /// Largest value allowed for an open orbit.
    fn upper(&self, vals: &[Option<u32>], o: usize) -> u32 {
        self.by_orbit[o]
            .iter()
            .map(|&x| {
                let (terms, target) = &self.cons[x];
                let used: u32 = terms.iter().filter_map(|&(p, c)| vals[p].map(|v| c * v)).sum();
                let c = terms.iter().find(|&&(p, _)| p == o).map(|&(_, c)| c).unwrap_or(1);
                target.saturating_sub(used) / c
            })
            .min()
            .unwrap_or(0)
    }

    fn solve(&mut self, budget: &mut usize, emit: &mut dyn FnMut(&[u32])) {
        let mut vals = self.values.clone();
        let mut trail = Vec::new();
        let mut open = vec![[0u32; 2]; self.assoc.len()];
        for (o, slots) in self.assoc_by.iter().enumerate() {
            if vals[o].is_none() {
                for &(x, side) in slots {
                    open[x][side] += 1;
                }
            }
        }
        let all = (0..self.cons.len()).collect();
        if self.propagate(&mut vals, &mut trail, all) && self.close(&vals, &mut open, &trail) {
            self.branch(&mut vals, &mut open, budget, emit);
        }
    }

    fn branch(
        &self,
        vals: &mut Vec<Option<u32>>,
        open_slots: &mut Vec<[u32; 2]>,
        budget: &mut usize,
        emit: &mut dyn FnMut(&[u32]),
    ) {
        if *budget == 0 {
            return;
        }
        *budget -= 1;
        let open = (0..vals.len())
            .filter(|&o| vals[o].is_none())
            .map(|o| (self.upper(vals, o), o))
            .min();
        let Some((hi, o)) = open else {
            let r = self.r;
            let tensor: Vec<u32> = (0..r * r * r).map(|t| vals[self.orbit_of[t]].unwrap_or(0)).collect();
            emit(&tensor);
            return;
        };
        for v in (0..=hi).rev() {
            let mut trail = vec![o];
            vals[o] = Some(v);
            if self.propagate(vals, &mut trail, self.by_orbit[o].clone()) {
                if self.close(vals, open_slots, &trail) {
                    self.branch(vals, open_slots, budget, emit);
                }
                self.reopen(open_slots, &trail);
            }
            for x in trail {
                vals[x] = None;
            }
        }
    }
}

/// Nonnegative integer vectors `c` with `Σ_l c_l · mats[l] = target`.
fn nonneg_combinations(mats: &[Matrix], target: &[u64], limit: usize) -> Vec<Vec<u32>> {
    fn go(
        mats: &[Matrix],
        l: usize,
        rem: &mut Vec<i64>,
        c: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if l == mats.len() {
            if rem.iter().all(|&x| x == 0) {
                out.push(c.clone());
            }
            return;
        }
        let m = mats[l].as_slice();
        let max = m
            .iter()
            .zip(rem.iter())
            .filter(|(x, _)| **x > 0)
            .map(|(x, r)| r / *x as i64)
            .min()
            .unwrap_or(0)
            .max(0);
        for k in (0..=max).rev() {
            for (r, &x) in rem.iter_mut().zip(m) {
                *r -= k * x as i64;
            }
            c[l] = k as u32;
            if rem.iter().all(|&x| x >= 0) {
                go(mats, l + 1, rem, c, out, limit);
            }
            for (r, &x) in rem.iter_mut().zip(m) {
                *r += k * x as i64;
            }
        }
        c[l] = 0;
    }
    let mut rem: Vec<i64> = target.iter().map(|&x| x as i64).collect();
    let mut out = Vec::new();
    go(mats, 0, &mut rem, &mut vec![0; mats.len()], &mut out, limit);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::catalog::catalog_ring;

    fn regular(name: &str) -> FusionModule {
        FusionModule::regular(catalog_ring(name).unwrap().ring)
    }

    #[test]
    fn commutant_dimensions() {
        assert_eq!(commutant_dim(&regular("trivial")), 1);
        assert_eq!(commutant_dim(&regular("HI-Z4")), 8);
        let basis = commutant_basis(&regular("Fib"));
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn dual_of_regular_module_is_opposite_ring() {
        for name in ["Fib", "HI-Z4", "HI-Z2xZ2", "RepA4", "2D2"] {
            let k = regular(name);
            let cands = dual_rings(&k).unwrap();
            let op = k.ring().opposite();
            assert!(
                cands.iter().any(|c| c.ring.find_isomorphism(&op).is_some()),
                "{name}"
            );
            for c in &cands {
                for l in &c.l {
                    for m in k.matrices() {
                        assert_eq!(l.mul(m), m.mul(l));
                    }
                }
                // the dual of the dual recovers the ring
                let back = dual_rings(&c.as_module().unwrap()).unwrap();
                assert!(back.iter().any(|b| b.ring.find_isomorphism(k.ring()).is_some()), "{name}");
            }
        }
    }
}
