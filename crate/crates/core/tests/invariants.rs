//! Invariants of the public API checked across the catalog rings.

use std::sync::{Arc, LazyLock};

use fusionmod::compat::hom_dim;
use fusionmod::dual::dual_rings;
use fusionmod::enumerate::{enumerate_modules, EnumerationConfig};
use fusionmod::expr::{format_object, parse_object};
use fusionmod::io::{load_modules_json, load_modules_text, save_modules_json, save_modules_text};
use fusionmod::module::modules_equivalent;
use fusionmod::{catalog_ring, FusionModule, FusionRing, ObjectVector};
use proptest::prelude::*;

const RINGS: [&str; 4] = ["HI-Z4", "HI-Z2xZ2", "4442", "2D2"];

static MODULES: LazyLock<Vec<(Arc<FusionRing>, Vec<FusionModule>)>> = LazyLock::new(|| {
    RINGS
        .iter()
        .map(|name| {
            let ring = catalog_ring(name).unwrap().ring;
            let modules = enumerate_modules(&ring, &EnumerationConfig::default()).unwrap().modules;
            (ring, modules)
        })
        .collect()
});

fn object(ring: &Arc<FusionRing>, coeffs: &[u32]) -> ObjectVector {
    ObjectVector::new(ring.clone(), coeffs[..ring.rank()].to_vec()).unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..3, 8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_reciprocity(r in 0..RINGS.len(), x in coeffs(), y in coeffs(), z in coeffs()) {
        let ring = catalog_ring(RINGS[r]).unwrap().ring;
        let (x, y, z) = (object(&ring, &x), object(&ring, &y), object(&ring, &z));
        let lhs = hom_dim(&x.mul(&y), &z).unwrap();
        prop_assert_eq!(lhs, hom_dim(&x, &z.mul(&y.dual())).unwrap());
        prop_assert_eq!(lhs, hom_dim(&y, &x.dual().mul(&z)).unwrap());
    }

    #[test]
    fn dimension_is_a_ring_homomorphism(r in 0..RINGS.len(), x in coeffs(), y in coeffs()) {
        let ring = catalog_ring(RINGS[r]).unwrap().ring;
        let (x, y) = (object(&ring, &x), object(&ring, &y));
        let (dx, dy) = (x.dim().unwrap(), y.dim().unwrap());
        prop_assert_eq!(x.mul(&y).dim().unwrap(), &dx * &dy);
        prop_assert_eq!(x.add(&y).dim().unwrap(), &dx + &dy);
        prop_assert_eq!(x.dual().dim().unwrap(), dx);
    }

    #[test]
    fn formatted_objects_parse_back(r in 0..RINGS.len(), x in coeffs()) {
        let ring = catalog_ring(RINGS[r]).unwrap().ring;
        let x = object(&ring, &x);
        prop_assert_eq!(parse_object(&ring, &format_object(&x)).unwrap(), x);
    }

    #[test]
    fn relabeled_modules_are_equivalent(r in 0..RINGS.len(), pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let (_, modules) = &MODULES[r];
        let k = &modules[pick.index(modules.len())];
        let mut perm: Vec<usize> = (0..k.rank()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let p = k.permuted(&perm);
        prop_assert!(p.validate().is_ok());
        prop_assert!(modules_equivalent(k, &p).is_some());
        prop_assert_eq!(p.algebra_table(), k.algebra_table());
        let matches = modules.iter().filter(|m| modules_equivalent(m, &p).is_some()).count();
        prop_assert_eq!(matches, 1);
    }
}

#[test]
fn module_files_round_trip() {
    for (ring, modules) in MODULES.iter() {
        let json = load_modules_json(ring, &save_modules_json(ring, modules)).unwrap();
        let text = load_modules_text(ring, &save_modules_text(ring, modules)).unwrap();
        assert_eq!(&json, modules, "{}", ring.name());
        assert_eq!(&text, modules, "{}", ring.name());
    }
}

#[test]
fn module_ends_are_self_dual_unital_algebras() {
    for (ring, modules) in MODULES.iter() {
        let gdim = ring.global_dim().unwrap().clone();
        for k in modules {
            let squares = k.dim_vector().unwrap().squares();
            let mut total = fusionmod::QuadNumber::zero();
            for a in 0..k.rank() {
                let end = k.internal_end(a);
                assert_eq!(end.coeffs()[ring.unit()], 1);
                assert!(end.is_self_dual());
                let d = end.dim().unwrap();
                assert_eq!(d, squares[a]);
                total = &total + &d;
            }
            assert_eq!(total, gdim, "{}", ring.name());
        }
    }
}

/// Independent check of the double commutant identity
/// sum_i M_i[a][b] M_i[c][e] = sum_j L_j[a][c] L_j[b][e].
#[test]
fn dual_candidates_satisfy_the_commutant_identity() {
    let (_, modules) = &MODULES[3];
    for k in modules {
        let cands = dual_rings(k).unwrap();
        assert!(!cands.is_empty());
        let n = k.rank();
        for c in &cands {
            for a in 0..n {
                for b in 0..n {
                    for x in 0..n {
                        for e in 0..n {
                            let lhs: u32 = k.matrices().iter().map(|m| m.get(a, b) * m.get(x, e)).sum();
                            let rhs: u32 = c.l.iter().map(|l| l.get(a, x) * l.get(b, e)).sum();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
            let back = c.as_module().unwrap();
            assert!(back.validate().is_ok());
            assert_eq!(c.ring.global_dim().unwrap(), k.ring().global_dim().unwrap());
        }
    }
}

#[test]
fn row_17_commutant_is_smaller_than_its_dual() {
    let (ring, modules) = &MODULES[2];
    let rows = fusionmod::figures::figure_rows("4442").unwrap();
    let x = fusionmod::figures::module_for_row(ring, modules, "17").unwrap().unwrap();
    let k = &modules[x];
    assert_eq!(fusionmod::dual::commutant_dim(k), 7);
    let cands = dual_rings(k).unwrap();
    assert!(cands.iter().all(|c| c.ring.rank() == 8));
    assert_eq!(rows.len(), modules.len());
}
