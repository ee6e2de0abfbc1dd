//! Exhaustive enumeration of fusion modules over a fusion ring.
//!
//! The default search runs in two phases. First the admissible dimension
//! data is listed: every `d_a²` is the dimension of an internal end, which
//! is a self-dual object with unit coefficient 1, and the ratios `d_a/d_0`
//! lie in Q(√5). Then, for every candidate ratio vector `u`, the action
//! matrices are searched with the Perron identity `M_i u = dims_i u`
//! pruning partial rows and columns.
//!
//! Matrices are filled in the order fixed by a [`Plan`]: a matrix is
//! derived from a product `x_i x_j` whenever only one summand is unknown,
//! and searched otherwise. Found modules are deduplicated by canonical form
//! and emitted sorted by rank and canonical entries.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::integer::Roots;
use num::{BigInt, ToPrimitive};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{common_denominator, QuadNumber, ScaledInt, RECOGNITION_TOL};
use crate::matrix::{perron_vector, support_components, Matrix};
use crate::module::{canonical_form, CanonicalForm, FusionModule};
use crate::ring::{FusionRing, RingError};

const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Largest module rank searched; defaults to the floor of the global
    /// dimension, tightened by the candidate dimension vectors.
    pub max_rank: Option<usize>,
    /// Worker threads; `None` uses the global pool.
    pub worker_count: Option<usize>,
    /// Enumerate dimension vectors before matrices. When off, ratio
    /// vectors are read from the Perron vectors of directly enumerated
    /// matrices, which is feasible only for very small rings and ranks.
    pub dim_prefilter: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            max_rank: None,
            worker_count: None,
            dim_prefilter: true,
        }
    }
}

/// A candidate dimension vector: ascending squares `d_a²` and the exact
/// ratios `d_a / d_0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CandidateVector {
    pub squares: Vec<QuadNumber>,
    pub ratios: Vec<QuadNumber>,
}

impl CandidateVector {
    pub fn rank(&self) -> usize {
        self.squares.len()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate ratio vectors searched.
    pub ratio_vectors: usize,
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Complete solutions before deduplication.
    pub raw_solutions: u64,
}

#[derive(Debug, Clone)]
pub struct EnumerationOutput {
    pub modules: Vec<FusionModule>,
    pub stats: SearchStats,
}

/// Exact numbers of the form `(p + q√5) / den` over a shared denominator.
struct Scaled {
    den: BigInt,
}

impl Scaled {
    fn of(&self, x: &QuadNumber) -> Result<ScaledInt, EnumError> {
        ScaledInt::from_quad(x, &self.den)
            .ok_or_else(|| EnumError::Internal(format!("{x} does not fit the shared denominator")))
    }
}

fn sign_of(x: ScaledInt) -> i32 {
    // sign of p + q√5
    let (p, q) = (x.p, x.q);
    match (p.signum(), q.signum()) {
        (0, s) | (s, 0) => s as i32,
        (1, 1) => 1,
        (-1, -1) => -1,
        (sp, _) => {
            let lhs = p * p;
            let rhs = 5 * q * q;
            if lhs == rhs {
                0
            } else if lhs > rhs {
                sp as i32
            } else {
                -(sp as i32)
            }
        }
    }
}

fn add(x: ScaledInt, y: ScaledInt) -> ScaledInt {
    ScaledInt {
        p: x.p + y.p,
        q: x.q + y.q,
    }
}

fn sub(x: ScaledInt, y: ScaledInt) -> ScaledInt {
    ScaledInt {
        p: x.p - y.p,
        q: x.q - y.q,
    }
}

fn to_f(x: ScaledInt, den: f64) -> f64 {
    (x.p as f64 + x.q as f64 * 5f64.sqrt()) / den
}

/// Whether `x = α + β·d` with `α, β >= 0`, where `d = 2 + √5`. When all
/// parts lie in this cone, so must every partial remainder.
fn in_d_cone(x: ScaledInt) -> bool {
    x.q >= 0 && x.p - 2 * x.q >= 0
}

/// Signed squarefree part of an integer.
fn squarefree(mut n: i128) -> i128 {
    let sign = n.signum();
    n = n.abs();
    let mut out = 1i128;
    let mut f = 2i128;
    while f * f <= n {
        let mut k = 0;
        while n % f == 0 {
            n /= f;
            k += 1;
        }
        if k % 2 == 1 {
            out *= f;
        }
        f += 1;
    }
    sign * out * n
}

/// Every value `1 + Σ c_o·o` not exceeding the global dimension, where `o`
/// runs over the dimensions of the non-unit dual orbits (a non-self-dual
/// pair contributes twice the dimension). These are the possible
/// dimensions of self-dual objects with unit coefficient 1.
pub fn admissible_end_dims(ring: &FusionRing) -> Result<Vec<QuadNumber>, EnumError> {
    let fp = ring.fp_data()?;
    let orbit_dims: Vec<QuadNumber> = (0..ring.rank())
        .filter(|&i| i != ring.unit() && i <= ring.dual(i))
        .map(|i| {
            if ring.dual(i) == i {
                fp.dims[i].clone()
            } else {
                &fp.dims[i] * 2
            }
        })
        .collect();
    let mut all = orbit_dims.clone();
    all.push(fp.global.clone());
    all.push(QuadNumber::one());
    let sc = Scaled {
        den: common_denominator(all.iter()),
    };
    let den = sc.den.to_f64().unwrap_or(f64::MAX);
    let g = sc.of(&fp.global)?;
    let orbs: Vec<ScaledInt> = orbit_dims.iter().map(|o| sc.of(o)).collect::<Result<_, _>>()?;
    let start = sc.of(&QuadNumber::one())?;
    let mut seen: BTreeSet<(i128, i128)> = BTreeSet::new();
    let mut stack = vec![start];
    seen.insert((start.p, start.q));
    while let Some(s) = stack.pop() {
        for &o in &orbs {
            let t = add(s, o);
            if to_f(t, den) > to_f(g, den) + 1.0 || sign_of(sub(g, t)) < 0 {
                continue;
            }
            if seen.insert((t.p, t.q)) {
                stack.push(t);
            }
        }
    }
    let d = sc.den.clone();
    let mut out: Vec<QuadNumber> = seen
        .into_iter()
        .map(|(p, q)| {
            QuadNumber::new(
                num::BigRational::new(BigInt::from(p), d.clone()),
                num::BigRational::new(BigInt::from(q), d.clone()),
            )
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Whether the product of two scaled values is a square in Q(√5). A
/// nonzero `P + Q√5` with integer `P`, `Q` has a square root `p + q√5`
/// only if `P² - 5Q² = m²` and `(P ± m)/2 = p²` for a rational `p`.
fn is_square_scaled(x: ScaledInt, y: ScaledInt) -> bool {
    let p = x.p * y.p + 5 * x.q * y.q;
    let q = x.p * y.q + x.q * y.p;
    let norm = p * p - 5 * q * q;
    if norm < 0 {
        return false;
    }
    let m = norm.sqrt();
    if m * m != norm {
        return false;
    }
    [p + m, p - m].into_iter().any(|w| {
        let t = 2 * w;
        t > 0 && t.sqrt() * t.sqrt() == t || (w == 0 && q == 0)
    })
}

/// All multisets of admissible squares `d_a²` summing to the global
/// dimension whose pairwise ratios are squares in Q(√5), sorted by rank
/// and then entrywise.
pub fn candidate_dimension_vectors(
    ring: &FusionRing,
    max_rank: Option<usize>,
) -> Result<Vec<CandidateVector>, EnumError> {
    let vals = admissible_end_dims(ring)?;
    let global = ring.global_dim()?.clone();
    let mut all = vals.clone();
    all.push(global.clone());
    let sc = Scaled {
        den: common_denominator(all.iter()),
    };
    let den = sc.den.to_f64().unwrap_or(f64::MAX);
    let scaled: Vec<ScaledInt> = vals.iter().map(|v| sc.of(v)).collect::<Result<_, _>>()?;
    let g = sc.of(&global)?;
    let cap = max_rank.unwrap_or_else(|| global.to_f64().floor() as usize);
    // group by the class of the norm modulo squares
    let mut classes: HashMap<i128, Vec<usize>> = HashMap::new();
    for (k, s) in scaled.iter().enumerate() {
        let norm = s.p * s.p - 5 * s.q * s.q;
        if norm != 0 {
            classes.entry(squarefree(norm)).or_default().push(k);
        }
    }
    let mut out = Vec::new();
    for (k0, s0) in vals.iter().enumerate() {
        let norm = scaled[k0].p * scaled[k0].p - 5 * scaled[k0].q * scaled[k0].q;
        if norm == 0 {
            continue;
        }
        let mut allowed: Vec<(usize, QuadNumber)> = Vec::new();
        for &k in &classes[&squarefree(norm)] {
            if k < k0 || !is_square_scaled(scaled[k], scaled[k0]) {
                continue;
            }
            let q = vals[k].checked_div(s0).expect("positive");
            if let Some(r) = q.sqrt() {
                allowed.push((k, r));
            }
        }
        allowed.sort_by(|a, b| vals[a.0].cmp(&vals[b.0]));
        // allowed[0] is s0 itself
        let mut chosen = vec![0usize];
        let rem = sub(g, scaled[k0]);
        let cone = allowed.iter().all(|&(k, _)| in_d_cone(scaled[k]));
        multisets(&allowed, &scaled, rem, den, cone, 0, cap, &mut chosen, &mut |picks| {
            out.push(CandidateVector {
                squares: picks.iter().map(|&p| vals[allowed[p].0].clone()).collect(),
                ratios: picks.iter().map(|&p| allowed[p].1.clone()).collect(),
            });
        });
    }
    out.sort_by(|a, b| a.rank().cmp(&b.rank()).then_with(|| a.squares.cmp(&b.squares)));
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn multisets(
    allowed: &[(usize, QuadNumber)],
    scaled: &[ScaledInt],
    rem: ScaledInt,
    den: f64,
    cone: bool,
    from: usize,
    cap: usize,
    chosen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if rem.p == 0 && rem.q == 0 {
        emit(chosen);
        return;
    }
    if chosen.len() >= cap {
        return;
    }
    let rf = to_f(rem, den);
    for p in from..allowed.len() {
        let s = scaled[allowed[p].0];
        if to_f(s, den) > rf + 1e-6 {
            break;
        }
        let next = sub(rem, s);
        if sign_of(next) < 0 || (cone && !in_d_cone(next)) {
            continue;
        }
        chosen.push(p);
        multisets(allowed, scaled, next, den, cone, p, cap, chosen, emit);
        chosen.pop();
    }
}

/// Order in which action matrices are determined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// Search `M_i`; `M_{dual(i)}` is its transpose.
    Search(usize),
    /// `M_k` from `M_i M_j = Σ_l N[i][j][l] M_l`.
    Derive { i: usize, j: usize, k: usize },
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub steps: Vec<Step>,
    /// Products `(i, j)` whose identity becomes checkable after each step.
    pub checks: Vec<Vec<(usize, usize)>>,
}

impl Plan {
    pub fn for_ring(ring: &FusionRing) -> Plan {
        let dims = ring.fp_dims_approx();
        Plan::build(ring, |known| {
            (0..ring.rank()).filter(|&i| !known[i]).min_by(|&a, &b| {
                (!ring.is_invertible(a))
                    .cmp(&!ring.is_invertible(b))
                    .then(((dims[a] * 1e6).round() as i64).cmp(&((dims[b] * 1e6).round() as i64)))
                    .then(a.cmp(&b))
            })
        })
    }

    /// Plan searching the given elements in order whenever no derivation
    /// applies.
    pub fn with_search_order(ring: &FusionRing, order: &[usize]) -> Plan {
        Plan::build(ring, |known| {
            order
                .iter()
                .copied()
                .find(|&i| !known[i])
                .or_else(|| (0..ring.rank()).find(|&i| !known[i]))
        })
    }

    fn build(ring: &FusionRing, choose: impl Fn(&[bool]) -> Option<usize>) -> Plan {
        let r = ring.rank();
        let mut known = vec![false; r];
        known[ring.unit()] = true;
        let mut steps = Vec::new();
        let mut checks = Vec::new();
        let mut checked: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mark = |known: &mut Vec<bool>, k: usize| {
            known[k] = true;
            known[ring.dual(k)] = true;
        };
        let newly_checkable = |known: &[bool], checked: &mut BTreeSet<(usize, usize)>| {
            let mut out = Vec::new();
            for i in (0..r).filter(|&i| known[i] && i != ring.unit()) {
                for j in (0..r).filter(|&j| known[j] && j != ring.unit()) {
                    if ring.product(i, j).iter().all(|(k, _)| known[*k]) && checked.insert((i, j)) {
                        out.push((i, j));
                    }
                }
            }
            out
        };
        loop {
            let mut progress = true;
            while progress {
                progress = false;
                'outer: for i in (0..r).filter(|&i| known[i] && i != ring.unit()) {
                    for j in (0..r).filter(|&j| known[j] && j != ring.unit()) {
                        let unknown: Vec<usize> = ring
                            .product(i, j)
                            .into_iter()
                            .map(|(k, _)| k)
                            .filter(|&k| !known[k])
                            .collect();
                        if let [k] = unknown[..] {
                            steps.push(Step::Derive { i, j, k });
                            mark(&mut known, k);
                            checks.push(newly_checkable(&known, &mut checked));
                            progress = true;
                            break 'outer;
                        }
                    }
                }
            }
            match choose(&known) {
                Some(i) => {
                    steps.push(Step::Search(i));
                    mark(&mut known, i);
                    checks.push(newly_checkable(&known, &mut checked));
                }
                None => break,
            }
        }
        Plan { steps, checks }
    }
}

/// Search all modules whose ratio vector is `ratios` (ascending).
struct Core<'a> {
    ring: &'a FusionRing,
    plan: &'a Plan,
    n: usize,
    uf: Vec<f64>,
    ux: Vec<ScaledInt>,
    tf: Vec<Vec<f64>>,
    tx: Vec<Vec<ScaledInt>>,
    block: Vec<usize>,
    /// Frobenius-Perron dimensions of the ring.
    df: Vec<f64>,
    /// Target of `Σ_i dims_i M_i`, row-major.
    pf: Vec<f64>,
    /// Common unit of the dimensions still unknown after each step.
    step_unit: Vec<Option<f64>>,
    nodes: u64,
    raw: u64,
    found: BTreeMap<CanonicalForm, FusionModule>,
    ring_arc: Arc<FusionRing>,
}

impl<'a> Core<'a> {
    fn new(ring_arc: &Arc<FusionRing>, ring: &'a FusionRing, plan: &'a Plan, ratios: &[QuadNumber]) -> Result<Self, EnumError> {
        let dims = ring.fp_dims()?;
        let n = ratios.len();
        let targets: Vec<Vec<QuadNumber>> = dims
            .iter()
            .map(|d| ratios.iter().map(|u| d * u).collect())
            .collect();
        let sc = Scaled {
            den: common_denominator(ratios.iter().chain(targets.iter().flatten())),
        };
        let den = sc.den.to_f64().unwrap_or(f64::MAX);
        let ux: Vec<ScaledInt> = ratios.iter().map(|u| sc.of(u)).collect::<Result<_, _>>()?;
        let tx: Vec<Vec<ScaledInt>> = targets
            .iter()
            .map(|row| row.iter().map(|t| sc.of(t)).collect())
            .collect::<Result<_, _>>()?;
        let mut block = vec![0; n];
        for a in 1..n {
            block[a] = if ratios[a] == ratios[a - 1] { block[a - 1] } else { block[a - 1] + 1 };
        }
        let df: Vec<f64> = dims.iter().map(|d| d.to_f64()).collect();
        let uf: Vec<f64> = ux.iter().map(|&x| to_f(x, den)).collect();
        let s0 = ring.global_dim()?.to_f64() / uf.iter().map(|u| u * u).sum::<f64>();
        let pf = (0..n * n).map(|x| s0 * uf[x / n] * uf[x % n]).collect();
        let mut known = vec![false; ring.rank()];
        known[ring.unit()] = true;
        let step_unit = plan
            .steps
            .iter()
            .map(|st| {
                let k = match *st {
                    Step::Search(i) => i,
                    Step::Derive { k, .. } => k,
                };
                known[k] = true;
                known[ring.dual(k)] = true;
                let rest: Vec<f64> = (0..ring.rank()).filter(|&k| !known[k]).map(|k| df[k]).collect();
                let unit = rest.iter().copied().fold(f64::INFINITY, f64::min);
                if rest.is_empty() {
                    Some(f64::INFINITY)
                } else if rest.iter().all(|d| ((d / unit) - (d / unit).round()).abs() < 1e-6) {
                    Some(unit)
                } else {
                    None
                }
            })
            .collect();
        Ok(Core {
            ring,
            plan,
            n,
            df,
            pf,
            step_unit,
            uf,
            tf: tx.iter().map(|r| r.iter().map(|&x| to_f(x, den)).collect()).collect(),
            ux,
            tx,
            block,
            nodes: 0,
            raw: 0,
            found: BTreeMap::new(),
            ring_arc: ring_arc.clone(),
        })
    }

    fn run(&mut self, step: usize, mats: &mut Vec<Option<Matrix>>) {
        self.nodes += 1;
        if step == self.plan.steps.len() {
            self.leaf(mats);
            return;
        }
        match self.plan.steps[step].clone() {
            Step::Derive { i, j, k } => {
                if let Some(m) = self.derive(mats, i, j, k) {
                    self.place(mats, k, m);
                    if self.identities_hold(step, mats) && self.residual_ok(step, mats) {
                        self.run(step + 1, mats);
                    }
                    self.clear(mats, k);
                }
            }
            Step::Search(i) => {
                let first = !self.plan.steps[..step].iter().any(|s| matches!(s, Step::Search(_)));
                if first && self.ring.is_invertible(i) {
                    for m in self.canonical_permutations(self.ring.dual(i) == i) {
                        self.try_matrix(step, i, m, mats);
                    }
                } else {
                    self.search_matrix(step, i, mats);
                }
            }
        }
    }

    fn try_matrix(&mut self, step: usize, i: usize, m: Matrix, mats: &mut Vec<Option<Matrix>>) {
        self.place(mats, i, m);
        if self.identities_hold(step, mats) && self.residual_ok(step, mats) {
            self.run(step + 1, mats);
        }
        self.clear(mats, i);
    }

    fn place(&self, mats: &mut [Option<Matrix>], k: usize, m: Matrix) {
        let dk = self.ring.dual(k);
        if dk != k {
            mats[dk] = Some(m.transpose());
        }
        mats[k] = Some(m);
    }

    fn clear(&self, mats: &mut [Option<Matrix>], k: usize) {
        mats[k] = None;
        mats[self.ring.dual(k)] = None;
    }

    fn derive(&self, mats: &[Option<Matrix>], i: usize, j: usize, k: usize) -> Option<Matrix> {
        let n = self.n;
        let mi = mats[i].as_ref()?;
        let mj = mats[j].as_ref()?;
        let mut acc: Vec<i64> = mi.mul_wide(mj).into_iter().map(|x| x as i64).collect();
        let mut nk = 0i64;
        for (l, m) in self.ring.product(i, j) {
            if l == k {
                nk = m as i64;
                continue;
            }
            let ml = mats[l].as_ref()?;
            for (x, &y) in acc.iter_mut().zip(ml.as_slice()) {
                *x -= m as i64 * y as i64;
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for x in acc {
            if x < 0 || x % nk != 0 {
                return None;
            }
            data.push((x / nk) as u32);
        }
        let m = Matrix::from_flat(n, data);
        if self.ring.dual(k) == k && !m.is_symmetric() {
            return None;
        }
        Some(m)
    }

    fn identities_hold(&self, step: usize, mats: &[Option<Matrix>]) -> bool {
        let n = self.n;
        self.plan.checks[step].iter().all(|&(i, j)| {
            let lhs = mats[i].as_ref().expect("known").mul_wide(mats[j].as_ref().expect("known"));
            let mut rhs = vec![0u64; n * n];
            for (k, m) in self.ring.product(i, j) {
                for (x, &y) in rhs.iter_mut().zip(mats[k].as_ref().expect("known").as_slice()) {
                    *x += m as u64 * y as u64;
                }
            }
            lhs == rhs
        })
    }

    /// `T - Σ_known dims_k M_k`, row-major.
    fn residual(&self, mats: &[Option<Matrix>]) -> Vec<f64> {
        let mut r = self.pf.clone();
        for (k, m) in mats.iter().enumerate() {
            if let Some(m) = m {
                for (x, &y) in r.iter_mut().zip(m.as_slice()) {
                    if y > 0 {
                        *x -= self.df[k] * y as f64;
                    }
                }
            }
        }
        r
    }

    /// The residual must be a nonnegative combination of the unknown
    /// dimensions.
    fn residual_ok(&self, step: usize, mats: &[Option<Matrix>]) -> bool {
        let unit = self.step_unit[step];
        self.residual(mats).into_iter().all(|r| match unit {
            _ if r < -1e-6 => false,
            Some(u) if u.is_infinite() => r.abs() < 1e-6,
            Some(u) => ((r / u) - (r / u).round()).abs() < 1e-6,
            None => true,
        })
    }

    fn leaf(&mut self, mats: &[Option<Matrix>]) {
        self.raw += 1;
        let mats: Vec<Matrix> = mats.iter().map(|m| m.clone().expect("all known")).collect();
        if support_components(self.n, &mats).len() != 1 {
            return;
        }
        let k = FusionModule::from_parts_unchecked(self.ring_arc.clone(), mats);
        debug_assert_eq!(k.validate(), Ok(()));
        let (perm, form) = canonical_form(&k);
        self.found.entry(form).or_insert_with(|| k.permuted(&perm));
    }

    /// One permutation per cycle type inside each block of equal ratios.
    fn canonical_permutations(&self, involution: bool) -> Vec<Matrix> {
        let n = self.n;
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            if a == 0 || self.block[a] != self.block[a - 1] {
                blocks.push(Vec::new());
            }
            blocks.last_mut().expect("pushed").push(a);
        }
        let per_block: Vec<Vec<Vec<usize>>> = blocks
            .iter()
            .map(|b| partitions(b.len(), if involution { 2 } else { b.len() }))
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; blocks.len()];
        loop {
            let mut pi: Vec<usize> = (0..n).collect();
            for (b, members) in blocks.iter().enumerate() {
                let mut at = 0;
                for &len in &per_block[b][choice[b]] {
                    for t in 0..len {
                        pi[members[at + t]] = members[at + (t + 1) % len];
                    }
                    at += len;
                }
            }
            let mut m = Matrix::zeros(n);
            for a in 0..n {
                m.set(a, pi[a], 1);
            }
            out.push(m);
            let mut b = 0;
            while b < blocks.len() {
                choice[b] += 1;
                if choice[b] < per_block[b].len() {
                    break;
                }
                choice[b] = 0;
                b += 1;
            }
            if b == blocks.len() {
                break;
            }
        }
        out
    }

    /// All matrices `X` for ring element `i` satisfying the Perron row and
    /// column identities, symmetric when `i` is self-dual, and equivariant
    /// under the known invertible actions.
    fn search_matrix(&mut self, step: usize, i: usize, mats: &mut Vec<Option<Matrix>>) {
        let n = self.n;
        let self_dual = self.ring.dual(i) == i;
        // orbits of positions
        let mut parent: Vec<usize> = (0..n * n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let union = |p: &mut Vec<usize>, x: usize, y: usize| {
            let (a, b) = (find(p, x), find(p, y));
            if a != b {
                p[a.max(b)] = a.min(b);
            }
        };
        if self_dual {
            for a in 0..n {
                for c in 0..n {
                    union(&mut parent, a * n + c, c * n + a);
                }
            }
        }
        let perm_of = |m: &Matrix| -> Vec<usize> {
            (0..n)
                .map(|a| (0..n).find(|&c| m.get(a, c) == 1).expect("permutation"))
                .collect()
        };
        let invertibles: Vec<(usize, Vec<usize>)> = (0..self.ring.rank())
            .filter(|&g| g != self.ring.unit() && self.ring.is_invertible(g))
            .filter_map(|g| mats[g].as_ref().map(|m| (g, perm_of(m))))
            .collect();
        for (g, pg) in &invertibles {
            let Some(gi) = self.ring.simple_product(*g, i) else { continue };
            for (h, ph) in &invertibles {
                if self.ring.simple_product(i, *h) == Some(gi) {
                    for a in 0..n {
                        for c in 0..n {
                            union(&mut parent, a * n + c, pg[a] * n + ph[c]);
                        }
                    }
                }
            }
        }
        let delta_f = self.tf[i][0] / self.uf[0];
        let res = self.residual(mats);
        let mut bound = vec![u32::MAX; n * n];
        for a in 0..n {
            for c in 0..n {
                let b1 = delta_f * self.uf[a] / self.uf[c];
                let b2 = delta_f * self.uf[c] / self.uf[a];
                let b3 = res[a * n + c].min(res[c * n + a]) / self.df[i];
                let b = (b1.min(b2).min(b3) + 1e-6).floor().max(0.0) as u32;
                let r = find(&mut parent, a * n + c);
                bound[r] = bound[r].min(b);
            }
        }
        let mut orbits: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for pos in 0..n * n {
            let r = find(&mut parent, pos);
            orbits.entry(r).or_default().push((pos / n, pos % n));
        }
        let vars: Vec<(u32, Vec<(usize, usize)>)> = orbits.into_iter().map(|(r, ps)| (bound[r], ps)).collect();
        let di = self.ring.dual(i);
        let row_gram = self.gram_terms(i, self.ring.product(i, di), mats);
        let col_gram = if self_dual {
            None
        } else {
            self.gram_terms(i, self.ring.product(di, i), mats)
        };
        let mut st = FillState {
            row_gram,
            col_gram,
            x: Matrix::zeros(n),
            row_sum: vec![0.0; n],
            col_sum: vec![0.0; n],
            row_left: vec![n; n],
            col_left: vec![n; n],
            row_cap: vec![0.0; n],
            col_cap: vec![0.0; n],
        };
        for (b, ps) in &vars {
            for &(a, c) in ps {
                st.row_cap[a] += *b as f64 * self.uf[c];
                st.col_cap[c] += *b as f64 * self.uf[a];
            }
        }
        self.fill(step, i, &vars, 0, &mut st, mats, !self_dual);
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &mut self,
        step: usize,
        i: usize,
        vars: &[(u32, Vec<(usize, usize)>)],
        v: usize,
        st: &mut FillState,
        mats: &mut Vec<Option<Matrix>>,
        cols: bool,
    ) {
        self.nodes += 1;
        if v == vars.len() {
            let m = st.x.clone();
            self.try_matrix(step, i, m, mats);
            return;
        }
        let (bound, ps) = &vars[v];
        for &(a, c) in ps {
            st.row_left[a] -= 1;
            st.col_left[c] -= 1;
            st.row_cap[a] -= *bound as f64 * self.uf[c];
            st.col_cap[c] -= *bound as f64 * self.uf[a];
        }
        for val in 0..=*bound {
            for &(a, c) in ps {
                st.x.set(a, c, val);
            }
            let mut over = false;
            let mut ok = true;
            for &(a, c) in ps {
                let rs: f64 = (0..self.n).map(|b| st.x.get(a, b) as f64 * self.uf[b]).sum();
                st.row_sum[a] = rs;
                if rs > self.tf[i][a] + EPS {
                    over = true;
                }
                if cols {
                    let cs: f64 = (0..self.n).map(|b| st.x.get(b, c) as f64 * self.uf[b]).sum();
                    st.col_sum[c] = cs;
                    if cs > self.tf[i][c] + EPS {
                        over = true;
                    }
                }
            }
            if over {
                break;
            }
            for &(a, c) in ps {
                if !self.line_ok(i, st, a, true) || (cols && !self.line_ok(i, st, c, false)) {
                    ok = false;
                    break;
                }
            }
            if ok && !self.gram_ok(i, st, ps, mats) {
                ok = false;
            }
            if ok {
                self.fill(step, i, vars, v + 1, st, mats, cols);
            }
        }
        for &(a, c) in ps {
            st.x.set(a, c, 0);
            st.row_left[a] += 1;
            st.col_left[c] += 1;
            st.row_cap[a] += *bound as f64 * self.uf[c];
            st.col_cap[c] += *bound as f64 * self.uf[a];
        }
        for &(a, c) in ps {
            st.row_sum[a] = (0..self.n).map(|b| st.x.get(a, b) as f64 * self.uf[b]).sum();
            st.col_sum[c] = (0..self.n).map(|b| st.x.get(b, c) as f64 * self.uf[b]).sum();
        }
    }

    /// Express each summand of `prod` through `X = M_i` and known matrices.
    fn gram_terms(&self, i: usize, prod: Vec<(usize, u32)>, mats: &[Option<Matrix>]) -> Option<Vec<(Term, u32)>> {
        let di = self.ring.dual(i);
        let known: Vec<usize> = (0..self.ring.rank()).filter(|&g| mats[g].is_some()).collect();
        prod.into_iter()
            .map(|(k, m)| {
                let term = if k == i {
                    Term::X
                } else if k == di {
                    Term::Xt
                } else if mats[k].is_some() {
                    Term::Known(k)
                } else {
                    known.iter().find_map(|&g| {
                        if self.ring.simple_product(g, i) == Some(k) {
                            Some(Term::Left(g, false))
                        } else if self.ring.simple_product(g, di) == Some(k) {
                            Some(Term::Left(g, true))
                        } else if self.ring.simple_product(i, g) == Some(k) {
                            Some(Term::Right(g, false))
                        } else if self.ring.simple_product(di, g) == Some(k) {
                            Some(Term::Right(g, true))
                        } else {
                            None
                        }
                    })?
                };
                Some((term, m))
            })
            .collect()
    }

    /// Inner products of completed rows (and columns) of the matrix being
    /// filled against the product identities with the dual element.
    fn gram_ok(&self, i: usize, st: &FillState, ps: &[(usize, usize)], mats: &[Option<Matrix>]) -> bool {
        let n = self.n;
        let self_dual = self.ring.dual(i) == i;
        let x = |a: usize, c: usize, t: bool| if t { st.x.get(c, a) } else { st.x.get(a, c) } as u64;
        let rhs = |prod: &[(Term, u32)], a: usize, c: usize| -> u64 {
            prod.iter()
                .map(|&(term, m)| {
                    let v = match term {
                        Term::Known(k) => mats[k].as_ref().expect("known").get(a, c) as u64,
                        Term::X => x(a, c, false),
                        Term::Xt => x(a, c, true),
                        Term::Left(g, t) => {
                            let mg = mats[g].as_ref().expect("known");
                            (0..n).map(|e| mg.get(a, e) as u64 * x(e, c, t)).sum()
                        }
                        Term::Right(g, t) => {
                            let mg = mats[g].as_ref().expect("known");
                            (0..n).map(|e| x(a, e, t) * mg.get(e, c) as u64).sum()
                        }
                    };
                    m as u64 * v
                })
                .sum()
        };
        let done = |a: usize| st.row_left[a] == 0 && (self_dual || st.col_left[a] == 0);
        for (prod, rows) in [(&st.row_gram, true), (&st.col_gram, false)] {
            let Some(prod) = prod else { continue };
            for &(p, q) in ps {
                let a = if rows { p } else { q };
                if !done(a) {
                    continue;
                }
                for c in (0..n).filter(|&c| done(c)) {
                    let dot: u64 = (0..n)
                        .map(|e| if rows { x(a, e, false) * x(c, e, false) } else { x(e, a, false) * x(e, c, false) })
                        .sum();
                    if dot != rhs(prod, a, c) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Feasibility of row `a` (or column `a`) of the matrix being filled.
    fn line_ok(&self, i: usize, st: &FillState, a: usize, row: bool) -> bool {
        let (sum, left, cap) = if row {
            (st.row_sum[a], st.row_left[a], st.row_cap[a])
        } else {
            (st.col_sum[a], st.col_left[a], st.col_cap[a])
        };
        let target = self.tf[i][a];
        if left > 0 {
            return sum + cap >= target - EPS;
        }
        let mut acc = ScaledInt { p: 0, q: 0 };
        for b in 0..self.n {
            let x = if row { st.x.get(a, b) } else { st.x.get(b, a) } as i128;
            if x > 0 {
                acc.p += x * self.ux[b].p;
                acc.q += x * self.ux[b].q;
            }
        }
        acc == self.tx[i][a]
    }
}

/// A term of a product identity, written in terms of the matrix `X`
/// being filled and known matrices.
#[derive(Debug, Clone, Copy)]
enum Term {
    Known(usize),
    X,
    Xt,
    /// `M_g X` or `M_g Xᵀ`.
    Left(usize, bool),
    /// `X M_g` or `Xᵀ M_g`.
    Right(usize, bool),
}

struct FillState {
    /// `M_i M_{i*}` expanded, when every term is expressible.
    row_gram: Option<Vec<(Term, u32)>>,
    /// `M_{i*} M_i` expanded, when every term is expressible.
    col_gram: Option<Vec<(Term, u32)>>,
    x: Matrix,
    row_sum: Vec<f64>,
    col_sum: Vec<f64>,
    row_left: Vec<usize>,
    col_left: Vec<usize>,
    row_cap: Vec<f64>,
    col_cap: Vec<f64>,
}

/// Partitions of `n` into parts of size at most `max_part`, parts in
/// nonincreasing order.
fn partitions(n: usize, max_part: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for p in (1..=max.min(n)).rev() {
            acc.push(p);
            go(n - p, p, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, max_part, &mut Vec::new(), &mut out);
    out
}

/// Search every module with the given ascending ratio vector.
pub fn modules_with_ratios(
    ring: &Arc<FusionRing>,
    plan: &Plan,
    ratios: &[QuadNumber],
) -> Result<(Vec<FusionModule>, SearchStats), EnumError> {
    modules_with_seed(ring, plan, None, ratios)
}

/// An indecomposable module over a subring, with positions sorted by
/// ascending ratio and ratios scaled so that the first is 1.
#[derive(Debug, Clone)]
struct Piece {
    ratios: Vec<QuadNumber>,
    mats: Vec<Matrix>,
}

/// The subring closed by the first plan steps, with all of its
/// indecomposable modules. The action of the subring on a module is a
/// direct sum of these pieces.
#[derive(Debug, Clone)]
pub struct Seed {
    /// Number of plan steps the seed replaces.
    pub steps: usize,
    /// Ring indices of the subring basis.
    pub idx: Vec<usize>,
    pieces: Vec<Piece>,
}

impl Seed {
    /// Seed for the longest proper plan prefix closing a subring, if any.
    pub fn for_plan(ring: &FusionRing, plan: &Plan, max_rank: usize) -> Result<Option<Seed>, EnumError> {
        let mut known = BTreeSet::from([ring.unit()]);
        let mut best = None;
        for (s, st) in plan.steps.iter().enumerate() {
            let k = match *st {
                Step::Search(i) => i,
                Step::Derive { k, .. } => k,
            };
            known.insert(k);
            known.insert(ring.dual(k));
            if known.len() < ring.rank() && ring.check_subring(&known.iter().copied().collect::<Vec<_>>()).is_ok() {
                best = Some(s + 1);
            }
        }
        let Some(steps) = best else { return Ok(None) };
        let mut idx = vec![ring.unit()];
        for st in &plan.steps[..steps] {
            let k = match *st {
                Step::Search(i) => i,
                Step::Derive { k, .. } => k,
            };
            idx.extend([k, ring.dual(k)]);
        }
        let (sub, idx) = ring.subring(&idx)?;
        let cfg = EnumerationConfig {
            max_rank: Some(max_rank),
            worker_count: Some(1),
            dim_prefilter: true,
        };
        let out = enumerate_modules(&Arc::new(sub), &cfg)?;
        let mut pieces = Vec::new();
        for m in out.modules {
            let dv = m.dim_vector().map_err(|e| EnumError::Internal(e.to_string()))?;
            let mut perm: Vec<usize> = (0..m.rank()).collect();
            perm.sort_by(|&a, &b| dv.ratios[a].cmp(&dv.ratios[b]));
            let base = dv.ratios[perm[0]].clone();
            let ratios = perm
                .iter()
                .map(|&a| dv.ratios[a].checked_div(&base).expect("positive ratio"))
                .collect();
            pieces.push(Piece {
                ratios,
                mats: m.permuted(&perm).matrices().to_vec(),
            });
        }
        Ok(Some(Seed { steps, idx, pieces }))
    }

    /// Every way of covering the ratio vector `u` (ascending) by pieces,
    /// as lists of `(piece, positions)`, up to permuting equal ratios.
    /// Pieces anchored at equal ratios are taken in nondecreasing order.
    fn arrangements(&self, u: &[QuadNumber]) -> Vec<Vec<(usize, Vec<usize>)>> {
        fn go(
            seed: &Seed,
            u: &[QuadNumber],
            used: &mut Vec<bool>,
            acc: &mut Vec<(usize, Vec<usize>)>,
            out: &mut Vec<Vec<(usize, Vec<usize>)>>,
        ) {
            let Some(p) = used.iter().position(|&x| !x) else {
                out.push(acc.clone());
                return;
            };
            let from = match acc.last() {
                Some((t, ps)) if u[ps[0]] == u[p] => *t,
                _ => 0,
            };
            for (t, piece) in seed.pieces.iter().enumerate().skip(from) {
                // piece ratios start at 1
                let lambda = &u[p];
                let mut ps = vec![p];
                used[p] = true;
                let mut ok = true;
                for r in &piece.ratios[1..] {
                    let want = lambda * r;
                    match (0..u.len()).find(|&q| !used[q] && u[q] == want) {
                        Some(q) => {
                            used[q] = true;
                            ps.push(q);
                        }
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    acc.push((t, ps.clone()));
                    go(seed, u, used, acc, out);
                    acc.pop();
                }
                for &q in &ps {
                    used[q] = false;
                }
            }
        }
        let mut out = Vec::new();
        go(self, u, &mut vec![false; u.len()], &mut Vec::new(), &mut out);
        out
    }
}

/// Search every module with the given ascending ratio vector, starting
/// from direct sums of subring modules when a seed is given.
pub fn modules_with_seed(
    ring: &Arc<FusionRing>,
    plan: &Plan,
    seed: Option<&Seed>,
    ratios: &[QuadNumber],
) -> Result<(Vec<FusionModule>, SearchStats), EnumError> {
    let mut core = Core::new(ring, ring, plan, ratios)?;
    let n = ratios.len();
    let mut mats: Vec<Option<Matrix>> = vec![None; ring.rank()];
    mats[ring.unit()] = Some(Matrix::identity(n));
    match seed {
        None => core.run(0, &mut mats),
        Some(seed) => {
            for arr in seed.arrangements(ratios) {
                for (s, &g) in seed.idx.iter().enumerate() {
                    let mut m = Matrix::zeros(n);
                    for (t, ps) in &arr {
                        let pm = &seed.pieces[*t].mats[s];
                        for (a, &pa) in ps.iter().enumerate() {
                            for (c, &pc) in ps.iter().enumerate() {
                                m.set(pa, pc, pm.get(a, c));
                            }
                        }
                    }
                    mats[g] = Some(m);
                }
                if core.residual_ok(seed.steps - 1, &mats) {
                    core.run(seed.steps, &mut mats);
                }
            }
        }
    }
    let stats = SearchStats {
        ratio_vectors: 1,
        nodes: core.nodes,
        raw_solutions: core.raw,
    };
    Ok((core.found.into_values().collect(), stats))
}

/// Ratio vectors read off directly enumerated matrices: `Y = Σ_{i≠1} M_i`
/// is symmetric, irreducible, with Perron eigenvalue `Σ_{i≠1} dims_i`.
fn ratio_vectors_single_phase(ring: &FusionRing, max_rank: usize) -> Result<Vec<Vec<QuadNumber>>, EnumError> {
    let dims = ring.fp_dims()?;
    let lambda: QuadNumber = (0..ring.rank())
        .filter(|&i| i != ring.unit())
        .map(|i| dims[i].clone())
        .sum();
    let lf = lambda.to_f64();
    let bound = (lf + EPS).floor() as u32;
    let mut found: BTreeSet<Vec<QuadNumber>> = BTreeSet::new();
    if ring.rank() == 1 {
        found.insert(vec![QuadNumber::one()]);
        return Ok(found.into_iter().collect());
    }
    for n in 1..=max_rank {
        let mut y = vec![0u32; n * n];
        let cells: Vec<(usize, usize)> = (0..n).flat_map(|c| (0..=c).map(move |a| (a, c))).collect();
        single_phase_fill(ring, &lambda, lf, bound, n, &cells, 0, &mut y, &mut found)?;
    }
    Ok(found.into_iter().collect())
}

#[allow(clippy::too_many_arguments)]
fn single_phase_fill(
    ring: &FusionRing,
    lambda: &QuadNumber,
    lf: f64,
    bound: u32,
    n: usize,
    cells: &[(usize, usize)],
    at: usize,
    y: &mut Vec<u32>,
    found: &mut BTreeSet<Vec<QuadNumber>>,
) -> Result<(), EnumError> {
    if at == cells.len() {
        let m = Matrix::from_flat(n, y.clone());
        if support_components(n, [&m]).len() != 1 {
            return Ok(());
        }
        let f: Vec<f64> = y.iter().map(|&x| x as f64).collect();
        let (ev, v) = perron_vector(&f, n);
        if (ev - lf).abs() > 1e-7 || v.iter().any(|&x| x <= 0.0) {
            return Ok(());
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut ratios = Vec::with_capacity(n);
        for &a in &order {
            match QuadNumber::recognize(v[a] / v[order[0]], RECOGNITION_TOL * 100.0) {
                Ok(Some(q)) => ratios.push(q),
                _ => return Ok(()),
            }
        }
        // exact eigenvector check
        for (r, &a) in order.iter().enumerate() {
            let lhs: QuadNumber = order
                .iter()
                .enumerate()
                .filter(|(_, &b)| y[a * n + b] > 0)
                .map(|(s, &b)| &ratios[s] * y[a * n + b] as i64)
                .sum();
            if lhs != lambda * &ratios[r] {
                return Ok(());
            }
        }
        if ratios.windows(2).any(|w| w[0] > w[1]) {
            return Ok(());
        }
        found.insert(ratios);
        return Ok(());
    }
    let (a, c) = cells[at];
    for val in 0..=bound {
        y[a * n + c] = val;
        y[c * n + a] = val;
        if a == c {
            // leading principal block complete: interlacing bound
            let k = c + 1;
            let sub: Vec<f64> = (0..k)
                .flat_map(|r| (0..k).map(move |s| (r, s)))
                .map(|(r, s)| y[r * n + s] as f64)
                .collect();
            let (ev, _) = perron_vector(&sub, k);
            if ev > lf + 1e-7 {
                continue;
            }
        }
        single_phase_fill(ring, lambda, lf, bound, n, cells, at + 1, y, found)?;
    }
    y[a * n + c] = 0;
    y[c * n + a] = 0;
    Ok(())
}

/// Every fusion module over `ring` up to equivalence, canonically sorted.
pub fn enumerate_modules(ring: &Arc<FusionRing>, cfg: &EnumerationConfig) -> Result<EnumerationOutput, EnumError> {
    ring.validate().map_err(|v| EnumError::Ring(RingError::Invalid(v)))?;
    let global = ring.global_dim()?;
    let cap = cfg.max_rank.unwrap_or_else(|| global.to_f64().floor() as usize);
    let ratio_vectors: Vec<Vec<QuadNumber>> = if cfg.dim_prefilter {
        let cands = candidate_dimension_vectors(ring, Some(cap))?;
        let set: BTreeSet<Vec<QuadNumber>> = cands.into_iter().map(|c| c.ratios).collect();
        set.into_iter().collect()
    } else {
        ratio_vectors_single_phase(ring, cap)?
    };
    let plan = Plan::for_ring(ring);
    let seed = Seed::for_plan(ring, &plan, cap)?;
    let work = || -> Result<Vec<(Vec<FusionModule>, SearchStats)>, EnumError> {
        ratio_vectors
            .par_iter()
            .map(|u| modules_with_seed(ring, &plan, seed.as_ref(), u))
            .collect()
    };
    let results = match cfg.worker_count {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| EnumError::Internal(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let nodes = AtomicU64::new(0);
    let mut stats = SearchStats {
        ratio_vectors: ratio_vectors.len(),
        ..Default::default()
    };
    let mut all: BTreeMap<CanonicalForm, FusionModule> = BTreeMap::new();
    for (mods, s) in results {
        nodes.fetch_add(s.nodes, Ordering::Relaxed);
        stats.raw_solutions += s.raw_solutions;
        for m in mods {
            let (_, f) = canonical_form(&m);
            all.entry(f).or_insert(m);
        }
    }
    stats.nodes = nodes.into_inner();
    Ok(EnumerationOutput {
        modules: all.into_values().collect(),
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::catalog::catalog_ring;

    fn ring(name: &str) -> Arc<FusionRing> {
        catalog_ring(name).unwrap().ring
    }

    #[test]
    fn scaled_signs() {
        let s = |p, q| sign_of(ScaledInt { p, q });
        assert_eq!(s(-2, 1), 1);
        assert_eq!(s(3, -1), 1);
        assert_eq!(s(2, -1), -1);
        assert_eq!(s(0, 0), 0);
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree(12), 3);
        assert_eq!(squarefree(-50), -2);
        assert_eq!(squarefree(1), 1);
    }

    #[test]
    fn candidate_vectors_small_rings() {
        let fib = ring("Fib");
        let c = candidate_dimension_vectors(&fib, None).unwrap();
        assert_eq!(c.len(), 1);
        let phi = QuadNumber::half(1, 1);
        assert_eq!(c[0].squares, vec![QuadNumber::one(), &phi * &phi]);
        assert_eq!(c[0].ratios, vec![QuadNumber::one(), phi]);

        let t = candidate_dimension_vectors(&ring("trivial"), None).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].squares, vec![QuadNumber::one()]);

        let k = ring("HI-Z2xZ2");
        let c = candidate_dimension_vectors(&k, None).unwrap();
        let d = QuadNumber::d();
        let one = QuadNumber::one();
        let want = vec![one.clone(), one.clone(), one.clone(), one.clone(), &d * &d, &d * &d, &d * &d, &d * &d];
        assert!(c.iter().any(|v| v.squares == want));
    }

    #[test]
    fn plan_for_haagerup_izumi() {
        let r = ring("HI-Z4");
        let plan = Plan::for_ring(&r);
        let searched: Vec<usize> = plan
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::Search(i) => Some(*i),
                _ => None,
            })
            .collect();
        assert_eq!(searched, vec![1, 4]);
        let total: usize = plan.checks.iter().map(Vec::len).sum();
        assert_eq!(total, 7 * 7);
    }

    #[test]
    fn small_ring_counts() {
        let cfg = EnumerationConfig::default();
        let t = enumerate_modules(&ring("trivial"), &cfg).unwrap();
        assert_eq!(t.modules.len(), 1);
        let f = enumerate_modules(&ring("Fib"), &cfg).unwrap();
        assert_eq!(f.modules.len(), 1);
        assert_eq!(f.modules[0].matrix(1).rows(), vec![vec![0, 1], vec![1, 1]]);
        // subgroups of Z4 up to conjugacy: 1, Z2, Z4
        assert_eq!(enumerate_modules(&ring("VecZ4"), &cfg).unwrap().modules.len(), 3);
        assert_eq!(enumerate_modules(&ring("VecZ2xZ2"), &cfg).unwrap().modules.len(), 5);
    }

    #[test]
    fn single_phase_agrees_on_small_rings() {
        for name in ["trivial", "Fib", "VecZ2", "VecZ3"] {
            let r = ring(name);
            let two = enumerate_modules(&r, &EnumerationConfig::default()).unwrap();
            let one = enumerate_modules(
                &r,
                &EnumerationConfig {
                    dim_prefilter: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(one.modules, two.modules, "{name}");
        }
    }
}
