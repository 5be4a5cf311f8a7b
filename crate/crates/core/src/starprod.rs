//! Deformation quantization along a fusion program: bidifferential star
//! products built by acting with the fusion element at every fusion step
//! and restricting to invariants at every reduction, with the
//! associativity defect and the semiclassical limit as checks.

use crate::algebra::{bar, Word};
use crate::associator::{fusion_element_with, associator_truncate, FusionElement, TruncatedAssociator};
use crate::error::CoreError;
use crate::funalg::{PointAction, PolyFun, QuasiPoissonAlgebra, Sign};
use crate::moduli::{assemble, FusionProgram, Step};
use crate::rational::{ratio, Rational};
use num_traits::One;
use std::collections::BTreeMap;

/// One derivation applied inside a bidifferential operator, labeled by
/// the marked point and basis chain it came from.
#[derive(Debug, Clone)]
pub struct LabeledOp {
    pub point: String,
    pub word: Word,
    action: PointAction,
}

impl LabeledOp {
    fn apply(&self, f: &PolyFun) -> PolyFun {
        self.action.apply_word(&self.word, f)
    }
}

/// `coeff * (ops on slot 1)(f) * (ops on slot 2)(g)`; op lists apply
/// right-to-left, the enveloping-word convention.
#[derive(Debug, Clone)]
pub struct StarTerm {
    pub coeff: Rational,
    pub left: Vec<LabeledOp>,
    pub right: Vec<LabeledOp>,
}

fn apply_ops(ops: &[LabeledOp], f: &PolyFun) -> PolyFun {
    let mut out = f.clone();
    for op in ops.iter().rev() {
        out = op.apply(&out);
    }
    out
}

/// Star product truncated at `order`: one bidifferential operator per
/// parameter power, over a carrier algebra.
#[derive(Debug, Clone)]
pub struct StarProduct {
    pub base: QuasiPoissonAlgebra,
    pub order: usize,
    pub terms: BTreeMap<usize, Vec<StarTerm>>,
}

impl StarProduct {
    /// Undeformed product on the carrier.
    pub fn undeformed(base: QuasiPoissonAlgebra, order: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(0, vec![StarTerm { coeff: Rational::one(), left: Vec::new(), right: Vec::new() }]);
        Self { base, order, terms }
    }

    /// One parameter power of `f * g`.
    pub fn eval_at(&self, power: usize, f: &PolyFun, g: &PolyFun) -> PolyFun {
        let mut out = PolyFun::zero();
        if let Some(terms) = self.terms.get(&power) {
            for term in terms {
                out = out.add(&apply_ops(&term.left, f).mul(&apply_ops(&term.right, g)).scale(&term.coeff));
            }
        }
        out
    }

    /// All powers of `f * g` through the truncation order.
    pub fn eval(&self, f: &PolyFun, g: &PolyFun) -> BTreeMap<usize, PolyFun> {
        (0..=self.order)
            .map(|p| (p, self.eval_at(p, f, g)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    /// Antisymmetrized first-order part: the bracket the star product
    /// degenerates to.
    pub fn semiclassical_bracket(&self, f: &PolyFun, g: &PolyFun) -> PolyFun {
        self.eval_at(1, f, g).sub(&self.eval_at(1, g, f))
    }

    /// Structural audit: every term at every power is a pair of
    /// derivation composites, and power zero is the bare product.
    pub fn is_bidifferential(&self) -> bool {
        match self.terms.get(&0) {
            Some(terms) => {
                terms.len() == 1
                    && terms[0].coeff.is_one()
                    && terms[0].left.is_empty()
                    && terms[0].right.is_empty()
            }
            None => false,
        }
    }
}

/// Applies the fusion element at two same-signed points: the four legs
/// act as (first point on slot 1, second point on slot 1, first point on
/// slot 2, second point on slot 2), then the existing operators apply.
pub fn quantize_fusion(
    star: &StarProduct,
    p: &str,
    q: &str,
    merged: &str,
    fusion: &FusionElement,
) -> Result<StarProduct, CoreError> {
    if fusion.order != star.order {
        return Err(CoreError::MismatchedShape(format!(
            "fusion element order {} vs star product order {}",
            fusion.order, star.order
        )));
    }
    let pa = star.base.points.get(p).ok_or_else(|| CoreError::UnknownPoint(p.into()))?.clone();
    let qa = star.base.points.get(q).ok_or_else(|| CoreError::UnknownPoint(q.into()))?.clone();
    let base = star.base.fuse(p, q, merged)?;
    let mut terms: BTreeMap<usize, Vec<StarTerm>> = BTreeMap::new();
    for (&jp, level) in &fusion.series.coeffs {
        for (tuple, c) in level {
            // leg order: p@slot1, q@slot1, p@slot2, q@slot2
            let slot1: Vec<LabeledOp> = [(p, &pa, &tuple[0]), (q, &qa, &tuple[1])]
                .into_iter()
                .filter(|(_, _, w)| !w.is_empty())
                .map(|(name, action, w)| LabeledOp { point: name.into(), word: w.clone(), action: (*action).clone() })
                .collect();
            let slot2: Vec<LabeledOp> = [(p, &pa, &tuple[2]), (q, &qa, &tuple[3])]
                .into_iter()
                .filter(|(_, _, w)| !w.is_empty())
                .map(|(name, action, w)| LabeledOp { point: name.into(), word: w.clone(), action: (*action).clone() })
                .collect();
            for (&mp, mterms) in &star.terms {
                if mp + jp > star.order {
                    continue;
                }
                for mt in mterms {
                    let mut left = mt.left.clone();
                    left.extend(slot1.iter().cloned());
                    let mut right = mt.right.clone();
                    right.extend(slot2.iter().cloned());
                    terms
                        .entry(mp + jp)
                        .or_default()
                        .push(StarTerm { coeff: &mt.coeff * c, left, right });
                }
            }
        }
    }
    Ok(StarProduct { base, order: star.order, terms })
}

/// The quantized program: the star product after every step.
#[derive(Debug, Clone)]
pub struct Quantization {
    pub stages: Vec<(String, StarProduct)>,
}

impl Quantization {
    pub fn final_product(&self) -> &StarProduct {
        &self.stages.last().expect("at least the disk stage").1
    }
}

/// Replays the program in the quantum regime: disk blocks start
/// undeformed, fusions act by the fusion element of the signed algebra,
/// reductions restrict the carrier to invariants.
pub fn quantize_program(program: &FusionProgram, order: usize) -> Result<Quantization, CoreError> {
    if order >= 3 {
        return Err(CoreError::UnsupportedOrder(order));
    }
    let assembly = assemble(program)?;
    let spec = &program.model.spec;
    let fusion_plus = crate::associator::fusion_element(spec, order)?;
    let fusion_minus = fusion_element_with(&associator_truncate(&bar(spec), order, None)?)?;
    let mut star = StarProduct::undeformed(assembly.stages[0].1.clone(), order);
    let mut stages = vec![("disks".to_string(), star.clone())];
    for (idx, step) in program.steps.iter().enumerate() {
        let label = assembly.trace[idx + 1].step.clone();
        match step {
            Step::Fuse { p, q, merged } => {
                let sign = star
                    .base
                    .points
                    .get(p)
                    .ok_or_else(|| CoreError::UnknownPoint(p.clone()))?
                    .sign;
                let fusion = match sign {
                    Sign::Plus => &fusion_plus,
                    Sign::Minus => &fusion_minus,
                };
                star = quantize_fusion(&star, p, q, merged, fusion)?;
            }
            _ => {
                // reductions and sign views keep the operators; the
                // carrier moves to the matching assembly stage
                star = StarProduct {
                    base: assembly.stages[idx + 1].1.clone(),
                    order,
                    terms: star.terms.clone(),
                };
            }
        }
        stages.push((label, star.clone()));
    }
    Ok(Quantization { stages })
}

/// Per-power associativity defect
/// `m(m(f,g),h) - m(f, m(applied associativity constraint)(g,h))`;
/// the constraint acts through the total action of the carrier's
/// surviving points, so reduced-away factors contribute nothing.
pub fn associativity_defect(
    star: &StarProduct,
    assoc: &TruncatedAssociator,
    f: &PolyFun,
    g: &PolyFun,
    h: &PolyFun,
) -> BTreeMap<usize, PolyFun> {
    let mut defect: BTreeMap<usize, PolyFun> = BTreeMap::new();
    let add = |power: usize, value: PolyFun, defect: &mut BTreeMap<usize, PolyFun>| {
        if value.is_zero() {
            return;
        }
        let slot = defect.entry(power).or_insert_with(PolyFun::zero);
        *slot = slot.add(&value);
        if slot.is_zero() {
            defect.remove(&power);
        }
    };
    let fg: Vec<PolyFun> = (0..=star.order).map(|j| star.eval_at(j, f, g)).collect();
    let gh: Vec<PolyFun> = (0..=star.order).map(|j| star.eval_at(j, g, h)).collect();
    for p in 0..=star.order {
        for i in 0..=p {
            let j = p - i;
            add(p, star.eval_at(i, &fg[j], h), &mut defect);
            add(p, star.eval_at(i, f, &gh[j]).scale(&-Rational::one()), &mut defect);
        }
    }
    // the constraint's correction terms, one point at a time
    for (&q, level) in &assoc.series.coeffs {
        if q == 0 {
            continue;
        }
        for (tuple, c) in level {
            for action in star.base.points.values() {
                let tf = action.apply_word(&tuple[0], f);
                let tg = action.apply_word(&tuple[1], g);
                let th = action.apply_word(&tuple[2], h);
                for p in 0..=star.order.saturating_sub(q) {
                    for i in 0..=p {
                        let j = p - i;
                        let rhs = star.eval_at(i, &tf, &star.eval_at(j, &tg, &th));
                        add(p + q, rhs.scale(&-c.clone()), &mut defect);
                    }
                }
            }
        }
    }
    defect
}

/// Convenience wrapper asserting the defect vanishes through the
/// truncation order; returns the first nonzero record otherwise.
pub fn associativity_defect_is_zero(
    star: &StarProduct,
    assoc: &TruncatedAssociator,
    f: &PolyFun,
    g: &PolyFun,
    h: &PolyFun,
) -> Result<(), (usize, PolyFun)> {
    let defect = associativity_defect(star, assoc, f, g, h);
    match defect.into_iter().next() {
        None => Ok(()),
        Some((p, v)) => Err((p, v)),
    }
}

/// The semiclassical comparison: the antisymmetrized first-order part
/// of the star product against the assembled bracket, on a list of
/// elements. Returns the first mismatch.
pub fn semiclassical_mismatch(
    star: &StarProduct,
    elements: &[PolyFun],
) -> Option<(usize, usize, PolyFun)> {
    for (i, f) in elements.iter().enumerate() {
        for (j, g) in elements.iter().enumerate() {
            let quantum = star.semiclassical_bracket(f, g);
            let classical = star.base.bracket_eval(f, g);
            let diff = quantum.sub(&classical);
            if !diff.is_zero() {
                return Some((i, j, diff));
            }
        }
    }
    None
}

/// Order-one increment of a single fusion on the undeformed disk:
/// `(1/2) sum t^{ab} (second-point e_a f) (first-point e_b g)`,
/// independently of the fusion element machinery. Used as an oracle.
pub fn fusion_first_order_oracle(
    pre_fusion: &QuasiPoissonAlgebra,
    p: &str,
    q: &str,
    f: &PolyFun,
    g: &PolyFun,
) -> PolyFun {
    let pa = &pre_fusion.points[p];
    let qa = &pre_fusion.points[q];
    let sign = pa.sign.factor();
    let mut out = PolyFun::zero();
    for (a, b, t) in pre_fusion.model.spec.casimir_pairs() {
        let term = qa.fields[a as usize]
            .apply(f)
            .mul(&pa.fields[b as usize].apply(g));
        out = out.add(&term.scale(&(&(&t * &sign) * &ratio(1, 2))));
    }
    out
}
