//! The reproduction suite: every quantitative check on the catalog rings,
//! collected into a [`VerificationReport`].

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Serialize;

use crate::arith::QuadNumber;
use crate::compat::{division_dim, easycomp_filter, hom_dim, CompatQuery};
use crate::dual::{dual_rings, DualRingCandidate};
use crate::enumerate::{enumerate_modules, EnumerationConfig};
use crate::expr::{format_object, parse_object};
use crate::figures::{figure_rings, figure_rows, match_figure, module_for_row};
use crate::io::{load_modules_json, load_modules_text, load_ring, save_modules_json, save_modules_text, save_ring};
use crate::module::{modules_equivalent, restrict_and_decompose, FusionModule};
use crate::ring::catalog::{catalog_names, catalog_ring};
use crate::ring::FusionRing;

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Every check.
    Paper,
    /// The checks that avoid full enumerations over rank-8 rings.
    Quick,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Paper => "paper",
            Suite::Quick => "quick",
        }
    }

    /// Check ids in running order.
    pub fn ids(&self) -> &'static [&'static str] {
        match self {
            Suite::Paper => &[
                "R0", "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13",
            ],
            Suite::Quick => &["R0", "A4", "A8", "A11", "A13"],
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    /// True when every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// A fixed-width table, one line per check.
    pub fn to_table(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<4} {:>8.2}s  {}\n       expected: {}\n       actual:   {}\n",
                c.id,
                if c.pass { "PASS" } else { "FAIL" },
                c.seconds,
                c.description,
                c.expected,
                c.actual
            ));
        }
        out.push_str(&format!(
            "{} checks, {} passed, {} failed\n",
            self.summary.total, self.summary.passed, self.summary.failed
        ));
        out
    }
}

/// Rings and cached enumerations shared by the checks.
pub struct Context {
    rings: BTreeMap<String, Arc<FusionRing>>,
    modules: Mutex<BTreeMap<String, Arc<Vec<FusionModule>>>>,
    workers: Option<usize>,
}

impl Default for Context {
    fn default() -> Self {
        Self::new()
    }
}

impl Context {
    /// Catalog rings with enumeration on the global pool.
    pub fn new() -> Self {
        let rings = catalog_names()
            .iter()
            .map(|&n| (n.to_string(), catalog_ring(n).expect("catalog name").ring))
            .collect();
        Context {
            rings,
            modules: Mutex::new(BTreeMap::new()),
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: Option<usize>) -> Self {
        self.workers = workers;
        self
    }

    /// Replace the catalog ring `name`.
    pub fn with_ring(mut self, name: &str, ring: FusionRing) -> Self {
        self.rings.insert(name.to_string(), Arc::new(ring.with_name(name)));
        self
    }

    pub fn ring(&self, name: &str) -> Arc<FusionRing> {
        self.rings[name].clone()
    }

    /// All fusion modules over `name`, enumerated once.
    pub fn modules(&self, name: &str) -> Result<Arc<Vec<FusionModule>>, String> {
        let mut cache = self.modules.lock().expect("cache lock");
        if let Some(m) = cache.get(name) {
            return Ok(m.clone());
        }
        let cfg = EnumerationConfig {
            worker_count: self.workers,
            ..EnumerationConfig::default()
        };
        let out = enumerate_modules(&self.ring(name), &cfg).map_err(|e| e.to_string())?;
        let list = Arc::new(out.modules);
        cache.insert(name.to_string(), list.clone());
        Ok(list)
    }

    fn row_module(&self, ring: &str, row: &str) -> Result<FusionModule, String> {
        let modules = self.modules(ring)?;
        let x = module_for_row(&self.ring(ring), &modules, row)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no unique module for row {row} over {ring}"))?;
        Ok(modules[x].clone())
    }
}

/// Run every check of `suite` in order.
pub fn run_suite(suite: Suite, ctx: &Context) -> VerificationReport {
    let checks: Vec<Check> = suite.ids().iter().map(|id| run_check(id, ctx)).collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    VerificationReport {
        suite: suite.name().to_string(),
        summary: Summary {
            total: checks.len(),
            passed,
            failed: checks.len() - passed,
        },
        checks,
    }
}

struct Outcome {
    expected: String,
    actual: String,
    pass: bool,
}

fn outcome(expected: impl ToString, actual: impl ToString, pass: bool) -> Result<Outcome, String> {
    Ok(Outcome {
        expected: expected.to_string(),
        actual: actual.to_string(),
        pass,
    })
}

/// Description of check `id`.
pub fn describe(id: &str) -> &'static str {
    match id {
        "R0" => "every catalog ring validates and has exact FP data",
        "A1" => "HI-Z2xZ2 has exactly 50 fusion modules",
        "A2" => "4442 has exactly 19 fusion modules",
        "A3" => "HI-Z4 has exactly 12 fusion modules",
        "A4" => "2D2 has exactly 7 fusion modules",
        "A5" => "transcribed algebra tables match enumerated modules one to one",
        "A6" => "HI-Z4 row 9 module has a dual with dims {1,1,d,d,d-1,d+1}",
        "A7" => "no module over that dual has an end of dimension 4+16d",
        "A8" => "2D2 module with a (d+1) end has dual Q2 with three modules",
        "A9" => "4442 row 17 module has a dual isomorphic to 4442",
        "A10" => "4442 row 19 module has a dual isomorphic to C2",
        "A11" => "hom and dimension fixtures",
        "A12" => "easycomp queries over the 4442 modules",
        "A13" => "ring, module, io and expression properties",
        _ => "unknown check",
    }
}

/// Run a single check by id.
pub fn run_check(id: &str, ctx: &Context) -> Check {
    let start = Instant::now();
    let result = match id {
        "R0" => check_rings(ctx),
        "A1" => check_count(ctx, "HI-Z2xZ2", 50),
        "A2" => check_count(ctx, "4442", 19),
        "A3" => check_count(ctx, "HI-Z4", 12),
        "A4" => check_count(ctx, "2D2", 7),
        "A5" => check_figures(ctx),
        "A6" => check_p2_dual(ctx).map(|(o, _)| o),
        "A7" => check_p2_modules(ctx),
        "A8" => check_q2(ctx),
        "A9" => check_dual_iso(ctx, "17", "4442"),
        "A10" => check_dual_iso(ctx, "19", "C2"),
        "A11" => check_hom_fixtures(ctx),
        "A12" => check_easycomp(ctx),
        "A13" => check_properties(ctx),
        other => Err(format!("unknown check {other}")),
    };
    let (expected, actual, pass) = match result {
        Ok(o) => (o.expected, o.actual, o.pass),
        Err(e) => ("no error".to_string(), format!("error: {e}"), false),
    };
    Check {
        id: id.to_string(),
        description: describe(id).to_string(),
        expected,
        actual,
        pass,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn check_rings(ctx: &Context) -> Result<Outcome, String> {
    let mut bad = Vec::new();
    for (name, r) in &ctx.rings {
        if let Err(v) = r.validate() {
            bad.push(format!("{name}: {v}"));
        } else if let Err(e) = r.fp_data() {
            bad.push(format!("{name}: {e}"));
        }
    }
    outcome("all valid", if bad.is_empty() { "all valid".into() } else { bad.join("; ") }, bad.is_empty())
}

fn check_count(ctx: &Context, ring: &str, n: usize) -> Result<Outcome, String> {
    let modules = ctx.modules(ring)?;
    let invalid = modules.iter().filter(|m| m.validate().is_err()).count();
    outcome(
        format!("{n} valid modules"),
        format!("{} modules, {invalid} invalid", modules.len()),
        modules.len() == n && invalid == 0,
    )
}

fn check_figures(ctx: &Context) -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut pass = true;
    for &name in figure_rings() {
        let rows = figure_rows(name).map_err(|e| e.to_string())?;
        let modules = ctx.modules(name)?;
        let m = match_figure(&ctx.ring(name), &rows, &modules).map_err(|e| e.to_string())?;
        let matched = m.hits.iter().filter(|h| h.len() == 1).count();
        let ok = m.is_bijective() && rows.len() == modules.len();
        pass &= ok;
        parts.push(format!("{name}: {matched}/{} rows unique", rows.len()));
    }
    outcome("every row names exactly one module", parts.join(", "), pass)
}

fn dims_string(r: &FusionRing) -> Result<String, String> {
    let dims = r.fp_dims().map_err(|e| e.to_string())?;
    let mut v: Vec<QuadNumber> = dims.to_vec();
    v.sort();
    Ok(format!(
        "{{{}}}",
        v.iter().map(|x| x.to_d_string()).collect::<Vec<_>>().join(", ")
    ))
}

fn sorted_dims(r: &FusionRing) -> Option<Vec<QuadNumber>> {
    let mut v = r.fp_dims().ok()?.to_vec();
    v.sort();
    Some(v)
}

fn sorted(mut v: Vec<QuadNumber>) -> Vec<QuadNumber> {
    v.sort();
    v
}

fn describe_candidates(cands: &[DualRingCandidate]) -> String {
    cands
        .iter()
        .map(|c| dims_string(&c.ring).unwrap_or_else(|e| e))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn check_p2_dual(ctx: &Context) -> Result<(Outcome, Option<Arc<FusionRing>>), String> {
    let k = ctx.row_module("HI-Z4", "9")?;
    let cands = dual_rings(&k).map_err(|e| e.to_string())?;
    let d = QuadNumber::in_d(0, 1);
    let want = sorted(vec![
        QuadNumber::one(),
        QuadNumber::one(),
        d.clone(),
        d.clone(),
        QuadNumber::in_d(-1, 1),
        QuadNumber::in_d(1, 1),
    ]);
    let hit = cands.iter().find(|c| sorted_dims(&c.ring).as_ref() == Some(&want));
    let o = outcome(
        "a candidate with dims {1, 1, -1+d, d, d, 1+d}",
        describe_candidates(&cands),
        hit.is_some(),
    )?;
    Ok((o, hit.map(|c| c.ring.clone())))
}

fn check_p2_modules(ctx: &Context) -> Result<Outcome, String> {
    let (_, p2) = check_p2_dual(ctx)?;
    let p2 = p2.ok_or("no dual with the required dimensions")?;
    let modules = enumerate_modules(
        &p2,
        &EnumerationConfig {
            worker_count: ctx.workers,
            ..EnumerationConfig::default()
        },
    )
    .map_err(|e| e.to_string())?
    .modules;
    let target = QuadNumber::in_d(4, 16);
    let mut found = 0;
    for k in modules.iter() {
        for a in 0..k.rank() {
            if k.internal_end(a).dim().map_err(|e| e.to_string())? == target {
                found += 1;
            }
        }
    }
    outcome(
        "no end of dimension 4+16d",
        format!("{} modules, {found} ends of dimension 4+16d", modules.len()),
        found == 0 && !modules.is_empty(),
    )
}

fn check_q2(ctx: &Context) -> Result<Outcome, String> {
    let modules = ctx.modules("2D2")?;
    let target = QuadNumber::in_d(1, 1);
    let with_end: Vec<&FusionModule> = modules
        .iter()
        .filter(|k| (0..k.rank()).any(|a| k.internal_end(a).dim().ok().as_ref() == Some(&target)))
        .collect();
    let two = QuadNumber::from_int(2);
    let d = QuadNumber::in_d(0, 1);
    let dm = QuadNumber::in_d(-1, 1).checked_div(&two).map_err(|e| e.to_string())?;
    let dp = QuadNumber::in_d(1, 1).checked_div(&two).map_err(|e| e.to_string())?;
    let want = sorted(vec![QuadNumber::one(), dm.clone(), dm, dp.clone(), dp, d]);
    let mut seen = Vec::new();
    let mut found = None;
    for k in &with_end {
        let cands = dual_rings(k).map_err(|e| e.to_string())?;
        seen.push(describe_candidates(&cands));
        if let Some(c) = cands.into_iter().find(|c| sorted_dims(&c.ring).as_ref() == Some(&want)) {
            found = Some(c);
            break;
        }
    }
    let Some(q2) = found else {
        return outcome("a candidate with Q2 dimensions", seen.join(" || "), false);
    };
    let over = enumerate_modules(
        &q2.ring,
        &EnumerationConfig {
            worker_count: ctx.workers,
            ..EnumerationConfig::default()
        },
    )
    .map_err(|e| e.to_string())?
    .modules;
    let regular = FusionModule::regular(q2.ring.clone());
    let graph = q2.as_module().map_err(|e| e.to_string())?;
    let others: Vec<&FusionModule> = over
        .iter()
        .filter(|m| modules_equivalent(m, &regular).is_none() && modules_equivalent(m, &graph).is_none())
        .collect();
    let ends = |m: &FusionModule| -> Vec<String> {
        sorted(
            (0..m.rank())
                .filter_map(|a| m.internal_end(a).dim().ok())
                .collect(),
        )
        .iter()
        .map(|x| x.to_d_string())
        .collect()
    };
    let want_ends = sorted(vec![
        &QuadNumber::in_d(-1, 1) * &QuadNumber::in_d(-1, 1),
        &QuadNumber::in_d(1, 1) * &QuadNumber::in_d(1, 1),
    ]);
    let pass = over.len() == 3
        && others.len() == 1
        && others[0].rank() == 2
        && sorted((0..2).filter_map(|a| others[0].internal_end(a).dim().ok()).collect()) == want_ends;
    outcome(
        "3 modules; the third has basis dims d-1, d+1 (ends (d-1)^2, (d+1)^2)",
        format!(
            "{} modules; other modules' end dims: {}",
            over.len(),
            others.iter().map(|m| format!("[{}]", ends(m).join(", "))).collect::<Vec<_>>().join(" ")
        ),
        pass,
    )
}

fn check_dual_iso(ctx: &Context, row: &str, target: &str) -> Result<Outcome, String> {
    let k = ctx.row_module("4442", row)?;
    let cands = dual_rings(&k).map_err(|e| e.to_string())?;
    let want = ctx.ring(target);
    let hit = cands
        .iter()
        .any(|c| c.ring.rank() == want.rank() && c.ring.find_isomorphism(&want).is_some());
    outcome(
        format!("a candidate isomorphic to {target}"),
        format!("{} candidates: {}", cands.len(), describe_candidates(&cands)),
        hit,
    )
}

fn check_hom_fixtures(ctx: &Context) -> Result<Outcome, String> {
    let e = |x: crate::expr::ExprError| x.to_string();
    let c = |x: crate::compat::CompatError| x.to_string();
    let k = ctx.ring("HI-Z2xZ2");
    let mut got = Vec::new();
    let mut want = Vec::new();
    for g in 1..4 {
        for h in (1..4).filter(|&h| h != g) {
            let x = parse_object(&k, &format!("1+a{g}*r")).map_err(e)?;
            let y = parse_object(&k, &format!("1+a{h}*r")).map_err(e)?;
            got.push(hom_dim(&x, &y).map_err(c)?.to_string());
            want.push("1".to_string());
        }
    }
    let c1 = ctx.ring("4442");
    let one_xi = parse_object(&c1, "1+x").map_err(e)?;
    for (src, n) in [("Lambda*(1+x)", "2"), ("Lambda+b*x", "1")] {
        got.push(hom_dim(&parse_object(&c1, src).map_err(e)?, &one_xi).map_err(c)?.to_string());
        want.push(n.to_string());
    }
    let c2 = ctx.ring("C2");
    let gamma = parse_object(&c2, "Gamma").map_err(e)?;
    got.push(hom_dim(&gamma, &gamma).map_err(c)?.to_string());
    want.push("4".to_string());
    got.push(gamma.dim().map_err(|x| x.to_string())?.to_d_string());
    want.push("4".to_string());
    for (a, b, q) in [((4, 12), 4, (1, 3)), ((3, 3), 3, (1, 1))] {
        let x = division_dim(&QuadNumber::in_d(a.0, a.1), &QuadNumber::from_int(b)).map_err(c)?;
        got.push(x.to_d_string());
        want.push(QuadNumber::in_d(q.0, q.1).to_d_string());
    }
    let x = parse_object(&c1, "Lambda*(1+x)").map_err(e)?;
    got.push(x.dim().map_err(|x| x.to_string())?.to_d_string());
    want.push(QuadNumber::in_d(3, 3).to_d_string());
    outcome(want.join(","), got.join(","), got == want)
}

fn check_easycomp(ctx: &Context) -> Result<Outcome, String> {
    let modules = ctx.modules("4442")?;
    let ring = ctx.ring("4442");
    let rows = figure_rows("4442").map_err(|e| e.to_string())?;
    let m = match_figure(&ring, &rows, &modules).map_err(|e| e.to_string())?;
    let row_of = |label: &str| -> Option<usize> {
        let x = rows.iter().position(|r| r.label == label)?;
        (m.hits[x].len() == 1).then(|| m.hits[x][0])
    };
    let one_d = QuadNumber::in_d(1, 1);
    let sq = &one_d * &one_d;
    let mut got = Vec::new();
    let mut want = Vec::new();
    for (s, label) in [(sq.clone(), "18"), (&sq * 3, "19")] {
        let q = CompatQuery::new(s, 2).map_err(|e| e.to_string())?;
        let hits = easycomp_filter(&modules, &q).map_err(|e| e.to_string())?;
        got.push(format!("{:?}", hits.iter().map(|h| h.index).collect::<Vec<_>>()));
        want.push(format!("{:?}", row_of(label).into_iter().collect::<Vec<_>>()));
    }
    let pass = got == want && row_of("18").is_some() && row_of("19").is_some();
    outcome(
        format!("regular module {} then row 19 module {}", want[0], want[1]),
        got.join(" then "),
        pass,
    )
}

fn check_properties(ctx: &Context) -> Result<Outcome, String> {
    let mut failures: Vec<String> = Vec::new();
    let mut fail = |msg: String| failures.push(msg);
    // rings: homomorphism and global dimension
    for (name, r) in &ctx.rings {
        let Ok(dims) = r.fp_dims() else {
            fail(format!("{name}: no FP data"));
            continue;
        };
        let n = r.rank();
        for i in 0..n {
            for j in 0..n {
                let rhs: QuadNumber = r.product(i, j).into_iter().map(|(k, c)| &dims[k] * c as i64).sum();
                if &dims[i] * &dims[j] != rhs {
                    fail(format!("{name}: dims not multiplicative at {i},{j}"));
                }
            }
        }
        let total: QuadNumber = dims.iter().map(|d| d * d).sum();
        if Ok(&total) != r.global_dim() {
            fail(format!("{name}: global dimension mismatch"));
        }
        match load_ring(&save_ring(r)) {
            Ok(back) if back == **r => {}
            _ => fail(format!("{name}: ring io round trip")),
        }
    }
    // modules over 2D2: axioms, ends, io, determinism
    let ring = ctx.ring("2D2");
    let modules = ctx.modules("2D2")?;
    for (x, k) in modules.iter().enumerate() {
        if k.validate().is_err() {
            fail(format!("2D2 module {x} invalid"));
        }
        let dv = k.dim_vector().map_err(|e| e.to_string())?;
        for a in 0..k.rank() {
            let end = k.internal_end(a);
            if end.coeffs()[ring.unit()] != 1 || !end.is_self_dual() {
                fail(format!("2D2 module {x} end {a} is not a unital self-dual object"));
            }
            if end.dim().ok().as_ref() != Some(&dv.squares()[a]) {
                fail(format!("2D2 module {x} end {a} dimension"));
            }
            match parse_object(&ring, &format_object(&end)) {
                Ok(back) if back == end => {}
                _ => fail(format!("2D2 module {x} end {a} expression round trip")),
            }
        }
    }
    let json = load_modules_json(&ring, &save_modules_json(&ring, &modules)).map_err(|e| e.to_string())?;
    let text = load_modules_text(&ring, &save_modules_text(&ring, &modules)).map_err(|e| e.to_string())?;
    if json != *modules || text != *modules {
        fail("2D2 module io round trip".into());
    }
    for w in [1, 2] {
        let cfg = EnumerationConfig {
            worker_count: Some(w),
            ..EnumerationConfig::default()
        };
        let again = enumerate_modules(&ring, &cfg).map_err(|e| e.to_string())?.modules;
        if again != *modules {
            fail(format!("2D2 enumeration differs with {w} workers"));
        }
    }
    // crossed product and restriction
    let base = ctx.ring("HI-Z2xZ2");
    let c2 = ctx.ring("C2");
    let base_gd = base.global_dim().map_err(|e| e.to_string())?;
    let d = QuadNumber::in_d(0, 1);
    let twelve = QuadNumber::from_int(12);
    let want = &twelve + &(&(&d * &d) * 12);
    if c2.global_dim().map_err(|e| e.to_string())? != &want || base_gd * 3 != want {
        fail("crossed product global dimension".into());
    }
    let trivial: Vec<usize> = (0..base.rank()).collect();
    let parts = restrict_and_decompose(&FusionModule::regular(c2.clone()), &trivial).map_err(|e| e.to_string())?;
    let regular_parts = parts
        .iter()
        .filter(|m| modules_equivalent(m, &FusionModule::regular(m.ring().clone())).is_some())
        .count();
    if parts.len() != 3 || regular_parts != 3 {
        fail(format!("C2 restriction gave {} parts, {regular_parts} regular", parts.len()));
    }
    let pass = failures.is_empty();
    outcome(
        "all properties hold",
        if pass { "all properties hold".to_string() } else { failures.join("; ") },
        pass,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_ids_are_a_strict_subset() {
        let paper = Suite::Paper.ids();
        assert!(Suite::Quick.ids().iter().all(|id| paper.contains(id)));
        assert!(Suite::Quick.ids().len() < paper.len());
    }

    #[test]
    fn hom_fixtures_pass() {
        let c = run_check("A11", &Context::new());
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn corrupted_ring_fails_validation_first() {
        let good = catalog_ring("4442").unwrap().ring;
        let mut t = good.tensor().to_vec();
        t[good.rank() * good.rank() + 1] += 1;
        let bad = FusionRing::from_parts_unchecked(
            "4442",
            good.labels().to_vec(),
            good.unit(),
            good.duals().to_vec(),
            t,
        );
        let ctx = Context::new().with_ring("4442", bad);
        let c = run_check("R0", &ctx);
        assert!(!c.pass);
        assert!(c.actual.contains("4442"));
        assert_eq!(Suite::Paper.ids()[0], "R0");
    }

    #[test]
    fn report_serializes() {
        let report = VerificationReport {
            suite: "quick".into(),
            checks: vec![Check {
                id: "A0".into(),
                description: "d".into(),
                expected: "e".into(),
                actual: "a".into(),
                pass: true,
                seconds: 0.5,
            }],
            summary: Summary {
                total: 1,
                passed: 1,
                failed: 0,
            },
        };
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(v["checks"][0]["id"], "A0");
        assert!(report.pass());
        assert!(report.to_table().contains("A0   PASS"));
    }
}
