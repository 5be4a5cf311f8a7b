//! Truncated universal elements of the braided monoidal structure on
//! modules over the enveloping algebra: the invariant trivector, the
//! associativity constraint, the braiding, and the fusion element,
//! together with the six-leg coherence check.
//!
//! Everything is universal through second order in the deformation
//! parameter; beyond that the coefficients depend on a concrete
//! associator and must be supplied externally.

use crate::algebra::{
    identity_perm, insert_legs, LieAlgebraSpec, TensorSeries, UniversalMorphism,
};
use crate::error::CoreError;
use crate::rational::{ratio, Rational};
use num_traits::One;
use std::sync::Arc;

/// The invariant trivector `(1/4)[t^{1,2}, t^{2,3}]` on three legs,
/// parameter-free, with every term straightened. Totally antisymmetric
/// and invariant for any valid spec.
pub fn phi_element(spec: &Arc<LieAlgebraSpec>) -> Result<TensorSeries, CoreError> {
    let t12 = TensorSeries::casimir_insertion(spec, 3, 0, 0, 1, &Rational::one());
    let t23 = TensorSeries::casimir_insertion(spec, 3, 0, 1, 2, &Rational::one());
    let comm = t12.mul(&t23)?.sub(&t23.mul(&t12)?)?;
    Ok(comm.scale(&ratio(1, 4)))
}

/// Associativity constraint truncated at `order`, on three legs.
#[derive(Debug, Clone)]
pub struct TruncatedAssociator {
    pub spec: Arc<LieAlgebraSpec>,
    pub order: usize,
    pub series: TensorSeries,
}

/// `1 + (h^2/6) phi` plus any externally supplied higher terms. Orders
/// three and up without supplied coefficients are rejected.
pub fn associator_truncate(
    spec: &Arc<LieAlgebraSpec>,
    order: usize,
    higher: Option<&TensorSeries>,
) -> Result<TruncatedAssociator, CoreError> {
    if order >= 3 && higher.is_none() {
        return Err(CoreError::UnsupportedOrder(order));
    }
    let mut series = TensorSeries::one(spec, 3, order);
    if order >= 2 {
        let phi = phi_element(spec)?;
        let mut phi_at_order = TensorSeries::zero(spec, 3, order);
        for (_, level) in &phi.coeffs {
            for (tuple, c) in level {
                phi_at_order.add_term(2, tuple.clone(), c * &ratio(1, 6));
            }
        }
        series = series.add(&phi_at_order)?;
    }
    if let Some(h) = higher {
        for (&p, level) in &h.coeffs {
            if p < 3 {
                return Err(CoreError::MalformedSpec(
                    "supplied higher associator terms must start at power 3".into(),
                ));
            }
            for (tuple, c) in level {
                series.add_term(p, tuple.clone(), c.clone());
            }
        }
    }
    Ok(TruncatedAssociator { spec: spec.clone(), order, series })
}

/// Braiding on two legs: swap composed with the exponential of half the
/// casimir insertion.
pub fn braiding(spec: &Arc<LieAlgebraSpec>, order: usize) -> Result<UniversalMorphism, CoreError> {
    let half_t = TensorSeries::casimir_insertion(spec, 2, order, 0, 1, &ratio(1, 2)).shift_power(1);
    Ok(UniversalMorphism { perm: vec![1, 0], elem: half_t.exp()? })
}

/// Fusion element on four legs.
///
/// Legs are ordered (first copy on the first argument, second copy on
/// the first argument, first copy on the second argument, second copy
/// on the second argument); the order-1 term couples legs 2 and 3.
#[derive(Debug, Clone)]
pub struct FusionElement {
    pub spec: Arc<LieAlgebraSpec>,
    pub order: usize,
    pub series: TensorSeries,
}

impl FusionElement {
    pub fn term(&self, power: usize) -> TensorSeries {
        self.series.at_power(power)
    }
}

/// Builds the fusion element by composing the five re-bracketing moves
/// that realize the monoidal structure map: two associator moves out,
/// one braiding on the middle pair, two associator moves back. The net
/// leg permutation is the middle swap; it is stripped and the residual
/// series is returned.
pub fn fusion_element(spec: &Arc<LieAlgebraSpec>, order: usize) -> Result<FusionElement, CoreError> {
    fusion_element_with(&associator_truncate(spec, order, None)?)
}

pub fn fusion_element_with(assoc: &TruncatedAssociator) -> Result<FusionElement, CoreError> {
    let spec = &assoc.spec;
    let order = assoc.order;
    let phi = &assoc.series;
    let phi_inv = phi.inverse()?;
    let on4 = |x: &TensorSeries, slots: &[Vec<usize>]| insert_legs(x, slots, 4);

    let step = |elem: TensorSeries| UniversalMorphism { perm: identity_perm(4), elem };
    let s1 = step(on4(&phi_inv, &[vec![0, 1], vec![2], vec![3]])?);
    let s2 = step(on4(phi, &[vec![0], vec![1], vec![2]])?);
    let braid = braiding(spec, order)?;
    let s3 = UniversalMorphism {
        perm: vec![0, 2, 1, 3],
        elem: on4(&braid.elem, &[vec![1], vec![2]])?,
    };
    let s4 = step(on4(&phi_inv, &[vec![0], vec![1], vec![2]])?);
    let s5 = step(on4(phi, &[vec![0, 1], vec![2], vec![3]])?);

    let total = s5.compose(&s4)?.compose(&s3)?.compose(&s2)?.compose(&s1)?;
    debug_assert_eq!(total.perm, vec![0, 2, 1, 3]);
    Ok(FusionElement { spec: spec.clone(), order, series: total.elem })
}

/// Left side minus right side of the six-leg coherence identity obeyed
/// by the fusion element and the associator, truncated at `order`; the
/// result must vanish.
pub fn fusion_coherence_defect(spec: &Arc<LieAlgebraSpec>, order: usize) -> Result<TensorSeries, CoreError> {
    let assoc = associator_truncate(spec, order, None)?;
    let j = fusion_element_with(&assoc)?.series;
    let phi = &assoc.series;
    let on6 = |x: &TensorSeries, slots: &[Vec<usize>]| insert_legs(x, slots, 6);

    let lhs = on6(phi, &[vec![0], vec![2], vec![4]])?
        .mul(&on6(phi, &[vec![1], vec![3], vec![5]])?)?
        .mul(&on6(&j, &[vec![0, 2], vec![1, 3], vec![4], vec![5]])?)?
        .mul(&on6(&j, &[vec![0], vec![1], vec![2], vec![3]])?)?;
    let rhs = on6(&j, &[vec![0], vec![1], vec![2, 4], vec![3, 5]])?
        .mul(&on6(&j, &[vec![2], vec![3], vec![4], vec![5]])?)?
        .mul(&on6(phi, &[vec![0, 1], vec![2, 3], vec![4, 5]])?)?;
    lhs.sub(&rhs)
}

/// All six leg permutations of a three-leg series, paired with signs.
pub fn three_leg_permutations() -> [(Vec<usize>, i64); 6] {
    [
        (vec![0, 1, 2], 1),
        (vec![1, 0, 2], -1),
        (vec![0, 2, 1], -1),
        (vec![2, 1, 0], -1),
        (vec![1, 2, 0], 1),
        (vec![2, 0, 1], 1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::insert_legs;
    use crate::bundled;
    use crate::rational::{rat, ratio};

    #[test]
    fn phi_vanishes_for_abelian_or_zero_casimir() {
        assert!(phi_element(&bundled::abelian2()).unwrap().is_zero());
        let aff = bundled::aff1(); // zero casimir
        assert!(phi_element(&aff).unwrap().is_zero());
    }

    #[test]
    fn phi_gl2_matches_structure_constant_expansion() {
        let gl2 = bundled::gl2();
        let phi = phi_element(&gl2).unwrap();
        assert!(!phi.is_zero());
        // independent route: phi = (1/4) sum t^{ab} t^{cd} c^k_{bc} e_a (x) e_k (x) e_d
        let mut expect = TensorSeries::zero(&gl2, 3, 0);
        for (a, b, tab) in gl2.casimir_pairs() {
            for (c, d, tcd) in gl2.casimir_pairs() {
                for (k, ck) in gl2.bracket_of(b, c) {
                    expect.add_term(
                        0,
                        vec![vec![a], vec![k], vec![d]],
                        &(&tab * &tcd) * &ck * ratio(1, 4),
                    );
                }
            }
        }
        assert_eq!(phi, expect);
    }

    #[test]
    fn phi_total_antisymmetry_and_invariance() {
        let gl2 = bundled::gl2();
        let phi = phi_element(&gl2).unwrap();
        for (perm, sign) in three_leg_permutations() {
            let permuted = phi.permute_legs(&perm);
            assert_eq!(permuted, phi.scale(&rat(sign)), "permutation {perm:?}");
        }
        // invariance: [xi^(1)+xi^(2)+xi^(3), phi] = 0 for each basis xi
        for i in 0..gl2.dim as u8 {
            let mut xi = TensorSeries::zero(&gl2, 1, 0);
            xi.add_term(0, vec![vec![i]], rat(1));
            let mut total = TensorSeries::zero(&gl2, 3, 0);
            for leg in 0..3 {
                total = total.add(&insert_legs(&xi, &[vec![leg]], 3).unwrap()).unwrap();
            }
            let comm = total.mul(&phi).unwrap().sub(&phi.mul(&total).unwrap()).unwrap();
            assert!(comm.is_zero(), "phi not invariant under basis element {i}");
        }
    }

    #[test]
    fn associator_orders() {
        let gl2 = bundled::gl2();
        let a0 = associator_truncate(&gl2, 0, None).unwrap();
        assert_eq!(a0.series, TensorSeries::one(&gl2, 3, 0));
        let a1 = associator_truncate(&gl2, 1, None).unwrap();
        assert_eq!(a1.series, TensorSeries::one(&gl2, 3, 1));
        let a2 = associator_truncate(&gl2, 2, None).unwrap();
        let phi = phi_element(&gl2).unwrap();
        let mut expect = TensorSeries::one(&gl2, 3, 2);
        for (_, level) in &phi.coeffs {
            for (tuple, c) in level {
                expect.add_term(2, tuple.clone(), c * &ratio(1, 6));
            }
        }
        assert_eq!(a2.series, expect);
        assert!(matches!(
            associator_truncate(&gl2, 3, None),
            Err(CoreError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn associator_accepts_supplied_higher_terms() {
        let gl2 = bundled::gl2();
        let mut higher = TensorSeries::zero(&gl2, 3, 3);
        higher.add_term(3, vec![vec![0], vec![1], vec![2]], rat(7));
        let a3 = associator_truncate(&gl2, 3, Some(&higher)).unwrap();
        assert_eq!(a3.series.at_power(3), higher.at_power(3));
        // terms below power 3 are not the caller's to supply
        let mut low = TensorSeries::zero(&gl2, 3, 3);
        low.add_term(1, vec![vec![0], vec![1], vec![2]], rat(1));
        assert!(associator_truncate(&gl2, 3, Some(&low)).is_err());
    }

    #[test]
    fn associator_even_at_order_two() {
        let gl2 = bundled::gl2();
        let plain = associator_truncate(&gl2, 2, None).unwrap();
        let barred = associator_truncate(&crate::algebra::bar(&gl2), 2, None).unwrap();
        assert_eq!(plain.series.coeffs, barred.series.coeffs);
    }

    #[test]
    fn braiding_examples() {
        // zero casimir: plain swap
        let aff = bundled::aff1();
        let b = braiding(&aff, 2).unwrap();
        assert_eq!(b.perm, vec![1, 0]);
        assert_eq!(b.elem, TensorSeries::one(&aff, 2, 2));

        // 1-dim abelian, t = e (x) e, order 2
        let ab = bundled::abelian1();
        let b = braiding(&ab, 2).unwrap();
        let mut expect = TensorSeries::one(&ab, 2, 2);
        expect.add_term(1, vec![vec![0], vec![0]], ratio(1, 2));
        expect.add_term(2, vec![vec![0, 0], vec![0, 0]], ratio(1, 8));
        assert_eq!(b.elem, expect);
    }

    #[test]
    fn fusion_element_low_orders() {
        let gl2 = bundled::gl2();
        let j = fusion_element(&gl2, 2).unwrap();
        assert_eq!(j.term(0), TensorSeries::one(&gl2, 4, 2));
        let expect = TensorSeries::casimir_insertion(&gl2, 4, 2, 1, 2, &ratio(1, 2));
        assert_eq!(j.term(1), expect);
    }

    #[test]
    fn fusion_element_abelian_is_exponential() {
        let ab = bundled::abelian1();
        let j = fusion_element(&ab, 2).unwrap();
        let expect = TensorSeries::casimir_insertion(&ab, 4, 2, 1, 2, &ratio(1, 2))
            .shift_power(1)
            .exp()
            .unwrap();
        assert_eq!(j.series, expect);
        // order-2 coefficient is (1/8)(t^{2,3})^2
        let t23 = TensorSeries::casimir_insertion(&ab, 4, 2, 1, 2, &rat(1));
        let sq = t23.mul(&t23).unwrap().scale(&ratio(1, 8));
        assert_eq!(j.term(2), sq.at_power(0));
    }

    #[test]
    fn coherence_defect_abelian_and_order_one() {
        assert!(fusion_coherence_defect(&bundled::abelian2(), 2).unwrap().is_zero());
        assert!(fusion_coherence_defect(&bundled::gl2(), 1).unwrap().is_zero());
    }
}
