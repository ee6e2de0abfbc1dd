//! Compatibility arithmetic between objects and modules: hom counts, exact
//! dimensions, the composite-object filter and algebra lookup.

use thiserror::Error;

use crate::arith::{ArithError, QuadNumber};
use crate::module::{FusionModule, ModuleError};
use crate::ring::{ObjectVector, RingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompatError {
    #[error("objects live over different rings")]
    RingMismatch,
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("squared dimension must be positive")]
    NonPositive,
}

/// Target data for a composite object `M`: `dim(M)² = s` and
/// `dim Hom(M, M) = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatQuery {
    pub s: QuadNumber,
    pub n: u32,
}

impl CompatQuery {
    pub fn new(s: QuadNumber, n: u32) -> Result<Self, CompatError> {
        if !s.is_positive() {
            return Err(CompatError::NonPositive);
        }
        Ok(CompatQuery { s, n })
    }
}

/// A module kept by [`easycomp_filter`] with a witness object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EasycompHit {
    /// Position of the module in the input list.
    pub index: usize,
    /// Multiplicities over the module basis.
    pub witness: Vec<u32>,
}

/// `dim Hom(X, Y)` as the coefficient pairing `Σ_i X[i]·Y[i]`.
pub fn hom_dim(x: &ObjectVector, y: &ObjectVector) -> Result<u64, CompatError> {
    if !x.same_ring(y) {
        return Err(CompatError::RingMismatch);
    }
    Ok(x.coeffs()
        .iter()
        .zip(y.coeffs())
        .map(|(&a, &b)| a as u64 * b as u64)
        .sum())
}

/// Exact Frobenius-Perron dimension `Σ_i X[i]·dims_i`.
pub fn object_dim(x: &ObjectVector) -> Result<QuadNumber, CompatError> {
    Ok(x.dim()?)
}

/// The dimension `dim(A) / dim(A_0)` of the quotient division algebra.
pub fn division_dim(dim_a: &QuadNumber, dim_a0: &QuadNumber) -> Result<QuadNumber, CompatError> {
    Ok(dim_a.checked_div(dim_a0)?)
}

/// Modules containing an object `M = Σ c_a m_a` with `Σ c_a² = q.n` and
/// `dim(M)² = q.s`, each with the first witness found.
pub fn easycomp_filter(modules: &[FusionModule], q: &CompatQuery) -> Result<Vec<EasycompHit>, CompatError> {
    let mut out = Vec::new();
    for (index, k) in modules.iter().enumerate() {
        let dv = k.dim_vector()?;
        let mut c = vec![0u32; k.rank()];
        if witness(&dv, q, 0, q.n, &mut c) {
            out.push(EasycompHit { index, witness: c });
        }
    }
    Ok(out)
}

fn witness(dv: &crate::module::DimVector, q: &CompatQuery, a: usize, left: u32, c: &mut [u32]) -> bool {
    if left == 0 {
        let mut total = QuadNumber::zero();
        for x in (0..c.len()).filter(|&x| c[x] > 0) {
            for y in (0..c.len()).filter(|&y| c[y] > 0) {
                total += &(&dv.gram(x, y) * (c[x] as i64 * c[y] as i64));
            }
        }
        return total == q.s;
    }
    if a == c.len() {
        return false;
    }
    let mut v = 0u32;
    while v * v <= left {
        c[a] = v;
        if witness(dv, q, a + 1, left - v * v, c) {
            return true;
        }
        v += 1;
    }
    c[a] = 0;
    false
}

/// Positions of the modules having `x` as an internal end.
pub fn modules_with_algebra(modules: &[FusionModule], x: &ObjectVector) -> Vec<usize> {
    modules
        .iter()
        .enumerate()
        .filter(|(_, k)| (0..k.rank()).any(|a| k.internal_end(a).coeffs() == x.coeffs()))
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_object;
    use crate::ring::catalog::catalog_ring;
    use proptest::prelude::*;

    #[test]
    fn hom_counts() {
        let r = catalog_ring("HI-Z2xZ2").unwrap().ring;
        let x = parse_object(&r, "1+a1r").unwrap();
        let y = parse_object(&r, "1+a2r").unwrap();
        assert_eq!(hom_dim(&x, &y).unwrap(), 1);
        let u = parse_object(&r, "1").unwrap();
        assert_eq!(hom_dim(&u, &u).unwrap(), 1);
        let other = parse_object(&catalog_ring("Fib").unwrap().ring, "1").unwrap();
        assert_eq!(hom_dim(&u, &other), Err(CompatError::RingMismatch));
    }

    #[test]
    fn dimensions() {
        let r = catalog_ring("HI-Z2xZ2").unwrap().ring;
        let x = parse_object(&r, "1+Gamma*r").unwrap();
        assert_eq!(object_dim(&x).unwrap(), QuadNumber::in_d(1, 4));
        let z4 = catalog_ring("HI-Z4").unwrap().ring;
        let y = parse_object(&z4, "Pi*(1+r)").unwrap();
        assert_eq!(object_dim(&y).unwrap(), QuadNumber::in_d(4, 4));
        assert_eq!(
            division_dim(&QuadNumber::in_d(4, 12), &QuadNumber::from_int(4)).unwrap(),
            QuadNumber::in_d(1, 3)
        );
        assert!(division_dim(&QuadNumber::one(), &QuadNumber::zero()).is_err());
    }

    #[test]
    fn easycomp_on_regular_module() {
        let r = catalog_ring("Fib").unwrap().ring;
        let k = FusionModule::regular(r);
        let phi2 = QuadNumber::half(3, 1);
        let hits = easycomp_filter(&[k.clone()], &CompatQuery::new(phi2, 1).unwrap()).unwrap();
        assert_eq!(hits, vec![EasycompHit { index: 0, witness: vec![0, 1] }]);
        let none = easycomp_filter(&[k], &CompatQuery::new(QuadNumber::from_int(2), 1).unwrap()).unwrap();
        assert!(none.is_empty());
    }

    fn arb_object() -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0u32..3, 8)
    }

    proptest! {
        #[test]
        fn hom_is_symmetric(a in arb_object(), b in arb_object()) {
            let r = catalog_ring("HI-Z4").unwrap().ring;
            let x = ObjectVector::new(r.clone(), a).unwrap();
            let y = ObjectVector::new(r, b).unwrap();
            prop_assert_eq!(hom_dim(&x, &y).unwrap(), hom_dim(&y, &x).unwrap());
        }

        #[test]
        fn dimension_is_multiplicative(a in arb_object(), b in arb_object()) {
            let r = catalog_ring("4442").unwrap().ring;
            let x = ObjectVector::new(r.clone(), a).unwrap();
            let y = ObjectVector::new(r, b).unwrap();
            let lhs = object_dim(&x.mul(&y)).unwrap();
            prop_assert_eq!(lhs, &object_dim(&x).unwrap() * &object_dim(&y).unwrap());
        }

        #[test]
        fn division_by_one_is_identity(a in arb_object()) {
            let r = catalog_ring("HI-Z2xZ2").unwrap().ring;
            let x = ObjectVector::new(r, a).unwrap();
            let d = object_dim(&x).unwrap();
            prop_assert_eq!(division_dim(&d, &QuadNumber::one()).unwrap(), d);
        }
    }
}
