//! Acceptance criteria A1 to A13, one test per criterion. Each test prints
//! a single `PASS` or `FAIL` line with the observed value.

use std::sync::LazyLock;

use fusionmod::verify::{run_check, Context};

static CONTEXT: LazyLock<Context> = LazyLock::new(Context::new);

fn criterion(id: &str) {
    let c = run_check(id, &CONTEXT);
    println!(
        "{} {} ({:.1}s): {} | expected {} | actual {}",
        c.id,
        if c.pass { "PASS" } else { "FAIL" },
        c.seconds,
        c.description,
        c.expected,
        c.actual
    );
    assert!(c.pass, "{id} failed: {}", c.actual);
}

#[test]
fn a01_hi_z2xz2_has_50_modules() {
    criterion("A1");
}

#[test]
fn a02_4442_has_19_modules() {
    criterion("A2");
}

#[test]
fn a03_hi_z4_has_12_modules() {
    criterion("A3");
}

#[test]
fn a04_2d2_has_7_modules() {
    criterion("A4");
}

#[test]
fn a05_algebra_tables_match() {
    criterion("A5");
}

#[test]
fn a06_p2_dual_dimensions() {
    criterion("A6");
}

#[test]
fn a07_p2_has_no_large_division_algebra() {
    criterion("A7");
}

#[test]
fn a08_q2_dual_and_its_modules() {
    criterion("A8");
}

#[test]
fn a09_row_17_dual_is_4442() {
    criterion("A9");
}

#[test]
fn a10_row_19_dual_is_c2() {
    criterion("A10");
}

#[test]
fn a11_hom_and_dimension_fixtures() {
    criterion("A11");
}

#[test]
fn a12_easycomp_fixtures() {
    criterion("A12");
}

#[test]
fn a13_property_suite() {
    criterion("A13");
}
