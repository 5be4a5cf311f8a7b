//! Lie algebra data and exact noncommutative algebra in tensor powers of
//! the enveloping algebra.
//!
//! Enveloping-algebra elements are kept in PBW normal form: every
//! monomial is a weakly increasing word in the fixed basis order, and a
//! descent `e_j e_i` (j > i) is straightened through
//! `e_j e_i = e_i e_j + [e_j, e_i]`. Formal-parameter series live in
//! [`TensorSeries`]: one term map per power of the deformation parameter,
//! truncated at a chosen order.

use crate::error::CoreError;
use crate::rational::{self, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Word of basis indices. Normal form means weakly increasing.
pub type Word = Vec<u8>;

/// One leg monomial per tensor factor.
pub type LegTuple = Vec<Word>;

/// A finite-dimensional Lie algebra given by structure constants plus a
/// symmetric invariant two-tensor (the casimir).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub dim: usize,
    pub basis_names: Vec<String>,
    /// `c[k](i,j)` with `[e_i, e_j] = sum_k c^k_{ij} e_k`; only nonzero
    /// entries are stored.
    pub structure_constants: BTreeMap<(u8, u8, u8), Rational>,
    /// Dense symmetric matrix `t^{ab}`.
    pub casimir: Vec<Vec<Rational>>,
}

/// A single violated identity with witness indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub identity: String,
    pub witness: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {:?}", self.identity, self.witness)
    }
}

impl LieAlgebraSpec {
    pub fn new(
        name: impl Into<String>,
        basis_names: Vec<String>,
        brackets: impl IntoIterator<Item = ((u8, u8, u8), Rational)>,
        casimir: Vec<Vec<Rational>>,
    ) -> Result<Arc<Self>, CoreError> {
        let dim = basis_names.len();
        let mut structure_constants = BTreeMap::new();
        for ((i, j, k), c) in brackets {
            if i as usize >= dim || j as usize >= dim || k as usize >= dim {
                return Err(CoreError::MalformedSpec(format!(
                    "structure constant index ({i},{j},{k}) out of range for dim {dim}"
                )));
            }
            if !c.is_zero() {
                let slot = structure_constants.entry((i, j, k)).or_insert_with(Rational::zero);
                *slot = &*slot + &c;
            }
        }
        structure_constants.retain(|_, c| !c.is_zero());
        if casimir.len() != dim || casimir.iter().any(|row| row.len() != dim) {
            return Err(CoreError::MalformedSpec(format!(
                "casimir of `{}` must be {dim}x{dim}",
                basis_names.join(",")
            )));
        }
        Ok(Arc::new(Self {
            name: name.into(),
            dim,
            basis_names,
            structure_constants,
            casimir,
        }))
    }

    pub fn structure_constant(&self, i: u8, j: u8, k: u8) -> Rational {
        self.structure_constants
            .get(&(i, j, k))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `[e_i, e_j]` as a sparse vector of `(k, coefficient)`.
    pub fn bracket_of(&self, i: u8, j: u8) -> Vec<(u8, Rational)> {
        (0..self.dim as u8)
            .filter_map(|k| {
                let c = self.structure_constant(i, j, k);
                (!c.is_zero()).then_some((k, c))
            })
            .collect()
    }

    /// Nonzero casimir entries `(a, b, t^{ab})`.
    pub fn casimir_pairs(&self) -> Vec<(u8, u8, Rational)> {
        let mut out = Vec::new();
        for (a, row) in self.casimir.iter().enumerate() {
            for (b, t) in row.iter().enumerate() {
                if !t.is_zero() {
                    out.push((a as u8, b as u8, t.clone()));
                }
            }
        }
        out
    }

    /// Checks antisymmetry, the Jacobi identity, casimir symmetry and
    /// casimir invariance. Empty report iff the data is a valid input.
    pub fn validate(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        let d = self.dim as u8;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let sum = self.structure_constant(i, j, k) + self.structure_constant(j, i, k);
                    if !sum.is_zero() {
                        report.push(Violation {
                            identity: "antisymmetry".into(),
                            witness: vec![i as usize, j as usize, k as usize],
                        });
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut sum = Rational::zero();
                        for m in 0..d {
                            sum = sum
                                + self.structure_constant(i, j, m) * self.structure_constant(m, k, l)
                                + self.structure_constant(j, k, m) * self.structure_constant(m, i, l)
                                + self.structure_constant(k, i, m) * self.structure_constant(m, j, l);
                        }
                        if !sum.is_zero() {
                            report.push(Violation {
                                identity: "jacobi".into(),
                                witness: vec![i as usize, j as usize, k as usize, l as usize],
                            });
                        }
                    }
                }
            }
        }
        for a in 0..self.dim {
            for b in 0..self.dim {
                if self.casimir[a][b] != self.casimir[b][a] {
                    report.push(Violation {
                        identity: "casimir symmetry".into(),
                        witness: vec![a, b],
                    });
                }
            }
        }
        for x in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let mut sum = Rational::zero();
                    for m in 0..d {
                        sum = sum
                            + self.structure_constant(x, m, a) * &self.casimir[m as usize][b as usize]
                            + self.structure_constant(x, m, b) * &self.casimir[a as usize][m as usize];
                    }
                    if !sum.is_zero() {
                        report.push(Violation {
                            identity: "casimir invariance".into(),
                            witness: vec![x as usize, a as usize, b as usize],
                        });
                    }
                }
            }
        }
        report
    }
}

/// Same brackets, casimir negated.
pub fn bar(spec: &Arc<LieAlgebraSpec>) -> Arc<LieAlgebraSpec> {
    Arc::new(LieAlgebraSpec {
        name: format!("bar({})", spec.name),
        dim: spec.dim,
        basis_names: spec.basis_names.clone(),
        structure_constants: spec.structure_constants.clone(),
        casimir: spec
            .casimir
            .iter()
            .map(|row| row.iter().map(|t| -t).collect())
            .collect(),
    })
}

/// Block sum: bases concatenate, cross brackets vanish, casimirs sit in
/// diagonal blocks.
pub fn direct_sum(a: &Arc<LieAlgebraSpec>, b: &Arc<LieAlgebraSpec>) -> Arc<LieAlgebraSpec> {
    let dim = a.dim + b.dim;
    let mut basis_names: Vec<String> = a.basis_names.iter().map(|n| format!("l.{n}")).collect();
    basis_names.extend(b.basis_names.iter().map(|n| format!("r.{n}")));
    let mut structure_constants = a.structure_constants.clone();
    let off = a.dim as u8;
    for (&(i, j, k), c) in &b.structure_constants {
        structure_constants.insert((i + off, j + off, k + off), c.clone());
    }
    let mut casimir = vec![vec![Rational::zero(); dim]; dim];
    for i in 0..a.dim {
        for j in 0..a.dim {
            casimir[i][j] = a.casimir[i][j].clone();
        }
    }
    for i in 0..b.dim {
        for j in 0..b.dim {
            casimir[a.dim + i][a.dim + j] = b.casimir[i][j].clone();
        }
    }
    Arc::new(LieAlgebraSpec {
        name: format!("{}+{}", a.name, b.name),
        dim,
        basis_names,
        structure_constants,
        casimir,
    })
}

fn straighten_into(word: &[u8], coeff: Rational, spec: &LieAlgebraSpec, out: &mut BTreeMap<Word, Rational>) {
    if let Some(pos) = word.windows(2).position(|w| w[0] > w[1]) {
        let (j, i) = (word[pos], word[pos + 1]);
        let mut swapped = word.to_vec();
        swapped.swap(pos, pos + 1);
        straighten_into(&swapped, coeff.clone(), spec, out);
        for (k, c) in spec.bracket_of(j, i) {
            let mut contracted = Vec::with_capacity(word.len() - 1);
            contracted.extend_from_slice(&word[..pos]);
            contracted.push(k);
            contracted.extend_from_slice(&word[pos + 2..]);
            straighten_into(&contracted, &coeff * &c, spec, out);
        }
    } else {
        let slot = out.entry(word.to_vec()).or_insert_with(Rational::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            out.remove(word);
        }
    }
}

/// An enveloping-algebra element in PBW normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvElement {
    pub spec: Arc<LieAlgebraSpec>,
    pub terms: BTreeMap<Word, Rational>,
}

impl EnvElement {
    pub fn zero(spec: &Arc<LieAlgebraSpec>) -> Self {
        Self { spec: spec.clone(), terms: BTreeMap::new() }
    }

    pub fn one(spec: &Arc<LieAlgebraSpec>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Rational::one());
        Self { spec: spec.clone(), terms }
    }

    pub fn basis(spec: &Arc<LieAlgebraSpec>, i: u8) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![i], Rational::one());
        Self { spec: spec.clone(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Word, coeff: Rational) {
        let slot = self.terms.entry(word.clone()).or_insert_with(Rational::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            self.terms.remove(&word);
        }
    }
}

/// Normal form of an arbitrary word with a coefficient.
pub fn pbw_normalize(word: &[u8], coeff: Rational, spec: &Arc<LieAlgebraSpec>) -> Result<EnvElement, CoreError> {
    if let Some(&i) = word.iter().find(|&&i| i as usize >= spec.dim) {
        return Err(CoreError::MalformedSpec(format!(
            "basis index {i} out of range for `{}` (dim {})",
            spec.name, spec.dim
        )));
    }
    let mut out = EnvElement::zero(spec);
    if !coeff.is_zero() {
        straighten_into(word, coeff, spec, &mut out.terms);
    }
    Ok(out)
}

/// Product of two normal-form monomials as a term map.
fn pbw_mul_words(a: &[u8], b: &[u8], spec: &LieAlgebraSpec) -> BTreeMap<Word, Rational> {
    let mut concat = Vec::with_capacity(a.len() + b.len());
    concat.extend_from_slice(a);
    concat.extend_from_slice(b);
    let mut out = BTreeMap::new();
    straighten_into(&concat, Rational::one(), spec, &mut out);
    out
}

/// PBW product. Errors when the operands reference different algebras.
pub fn env_mul(a: &EnvElement, b: &EnvElement) -> Result<EnvElement, CoreError> {
    if a.spec != b.spec {
        return Err(CoreError::MismatchedAlgebras(a.spec.name.clone(), b.spec.name.clone()));
    }
    let mut out = EnvElement::zero(&a.spec);
    for (wa, ca) in &a.terms {
        for (wb, cb) in &b.terms {
            let c = ca * cb;
            for (w, k) in pbw_mul_words(wa, wb, &a.spec) {
                out.add_term(w, &c * &k);
            }
        }
    }
    Ok(out)
}

/// Truncated series in the deformation parameter with values in a fixed
/// tensor power of the enveloping algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSeries {
    pub spec: Arc<LieAlgebraSpec>,
    pub legs: usize,
    pub order: usize,
    /// power -> leg tuple -> coefficient
    pub coeffs: BTreeMap<usize, BTreeMap<LegTuple, Rational>>,
}

impl TensorSeries {
    pub fn zero(spec: &Arc<LieAlgebraSpec>, legs: usize, order: usize) -> Self {
        Self { spec: spec.clone(), legs, order, coeffs: BTreeMap::new() }
    }

    pub fn one(spec: &Arc<LieAlgebraSpec>, legs: usize, order: usize) -> Self {
        let mut s = Self::zero(spec, legs, order);
        s.add_term(0, vec![Vec::new(); legs], Rational::one());
        s
    }

    /// `sum_ab t^{ab} e_a@i e_b@j` at parameter power 0, with an overall
    /// scalar. `i`, `j` are 0-based leg positions.
    pub fn casimir_insertion(
        spec: &Arc<LieAlgebraSpec>,
        legs: usize,
        order: usize,
        i: usize,
        j: usize,
        scale: &Rational,
    ) -> Self {
        let mut s = Self::zero(spec, legs, order);
        assert!(i != j && i < legs && j < legs, "casimir legs must be distinct and in range");
        for (a, b, t) in spec.casimir_pairs() {
            let mut tuple = vec![Vec::new(); legs];
            tuple[i] = vec![a];
            tuple[j] = vec![b];
            s.add_term(0, tuple, scale * &t);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, power: usize, tuple: LegTuple, coeff: Rational) {
        if power > self.order || coeff.is_zero() {
            return;
        }
        debug_assert_eq!(tuple.len(), self.legs);
        let level = self.coeffs.entry(power).or_default();
        let slot = level.entry(tuple.clone()).or_insert_with(Rational::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            level.remove(&tuple);
            if self.coeffs.get(&power).is_some_and(BTreeMap::is_empty) {
                self.coeffs.remove(&power);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, CoreError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (&p, level) in &other.coeffs {
            for (tuple, c) in level {
                out.add_term(p, tuple.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CoreError> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = Self::zero(&self.spec, self.legs, self.order);
        if k.is_zero() {
            return out;
        }
        for (&p, level) in &self.coeffs {
            for (tuple, c) in level {
                out.add_term(p, tuple.clone(), c * k);
            }
        }
        out
    }

    /// Multiplies by the deformation parameter to the k-th power,
    /// dropping everything pushed past the truncation order.
    pub fn shift_power(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.spec, self.legs, self.order);
        for (&p, level) in &self.coeffs {
            if p + k > self.order {
                continue;
            }
            for (tuple, c) in level {
                out.add_term(p + k, tuple.clone(), c.clone());
            }
        }
        out
    }

    fn compatible(&self, other: &Self) -> Result<(), CoreError> {
        if self.spec != other.spec {
            return Err(CoreError::MismatchedAlgebras(self.spec.name.clone(), other.spec.name.clone()));
        }
        if self.legs != other.legs || self.order != other.order {
            return Err(CoreError::MismatchedShape(format!(
                "legs {}/{}, order {}/{}",
                self.legs, other.legs, self.order, other.order
            )));
        }
        Ok(())
    }

    /// Legwise PBW product; parameter powers add and truncate.
    pub fn mul(&self, other: &Self) -> Result<Self, CoreError> {
        self.compatible(other)?;
        let mut out = Self::zero(&self.spec, self.legs, self.order);
        for (&pa, la) in &self.coeffs {
            for (&pb, lb) in &other.coeffs {
                if pa + pb > self.order {
                    continue;
                }
                for (ta, ca) in la {
                    for (tb, cb) in lb {
                        let base = ca * cb;
                        // per-leg straightened products, then the cartesian
                        // combination across legs
                        let mut partial: Vec<(LegTuple, Rational)> =
                            vec![(Vec::with_capacity(self.legs), base)];
                        for leg in 0..self.legs {
                            let products = pbw_mul_words(&ta[leg], &tb[leg], &self.spec);
                            let mut next = Vec::with_capacity(partial.len() * products.len());
                            for (prefix, c) in &partial {
                                for (w, k) in &products {
                                    let mut tuple = prefix.clone();
                                    tuple.push(w.clone());
                                    next.push((tuple, c * k));
                                }
                            }
                            partial = next;
                        }
                        for (tuple, c) in partial {
                            out.add_term(pa + pb, tuple, c);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exponential of a series with no constant term.
    pub fn exp(&self) -> Result<Self, CoreError> {
        if self.coeffs.contains_key(&0) {
            return Err(CoreError::MalformedSpec("exp needs a series with zero constant term".into()));
        }
        let mut out = Self::one(&self.spec, self.legs, self.order);
        let mut power = Self::one(&self.spec, self.legs, self.order);
        let mut factorial = Rational::one();
        for k in 1..=self.order {
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            factorial = factorial * Rational::from_integer(k.into());
            out = out.add(&power.scale(&factorial.recip()))?;
        }
        Ok(out)
    }

    /// Series inverse when the constant term is the unit.
    pub fn inverse(&self) -> Result<Self, CoreError> {
        let unit = Self::one(&self.spec, self.legs, self.order);
        let rest = self.sub(&unit)?;
        if rest.coeffs.contains_key(&0) {
            return Err(CoreError::MalformedSpec("series inverse needs constant term 1".into()));
        }
        let mut out = unit.clone();
        let mut power = unit;
        for _ in 1..=self.order {
            power = power.mul(&rest)?.scale(&-Rational::one());
            if power.is_zero() {
                break;
            }
            out = out.add(&power)?;
        }
        Ok(out)
    }

    /// Reorders legs: the factor on leg `l` moves to `perm[l]`.
    pub fn permute_legs(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.legs);
        let mut out = Self::zero(&self.spec, self.legs, self.order);
        for (&p, level) in &self.coeffs {
            for (tuple, c) in level {
                let mut moved = vec![Vec::new(); self.legs];
                for (l, w) in tuple.iter().enumerate() {
                    moved[perm[l]] = w.clone();
                }
                out.add_term(p, moved, c.clone());
            }
        }
        out
    }

    /// Extracts one parameter power as a fresh series concentrated at
    /// power 0.
    pub fn at_power(&self, p: usize) -> Self {
        let mut out = Self::zero(&self.spec, self.legs, self.order);
        if let Some(level) = self.coeffs.get(&p) {
            for (tuple, c) in level {
                out.add_term(0, tuple.clone(), c.clone());
            }
        }
        out
    }

    /// Canonical text form: terms sorted by (power, leg monomials).
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut lines = Vec::new();
        for (&p, level) in &self.coeffs {
            for (tuple, c) in level {
                let legs: Vec<String> = tuple
                    .iter()
                    .map(|w| {
                        if w.is_empty() {
                            "1".into()
                        } else {
                            w.iter()
                                .map(|&i| self.spec.basis_names[i as usize].clone())
                                .collect::<Vec<_>>()
                                .join(".")
                        }
                    })
                    .collect();
                lines.push(format!("h^{p} * {} * [{}]", rational::render(c), legs.join("|")));
            }
        }
        lines.join("\n")
    }
}

/// Splits one PBW word over `parts` ordered slots via the iterated
/// coproduct; basis letters are primitive, so each letter lands in
/// exactly one slot with relative order kept.
fn coproduct_splits(word: &[u8], parts: usize) -> Vec<Vec<Word>> {
    let mut acc: Vec<Vec<Word>> = vec![vec![Vec::new(); parts]];
    for &letter in word {
        let mut next = Vec::with_capacity(acc.len() * parts);
        for split in &acc {
            for slot in 0..parts {
                let mut grown = split.clone();
                grown[slot].push(letter);
                next.push(grown);
            }
        }
        acc = next;
    }
    acc
}

/// Superscript calculus: places the k legs of `x` into an m-leg series.
/// Singleton slots copy the leg; multi-element slots apply the iterated
/// coproduct and distribute the factors over the listed positions (given
/// 0-based, strictly increasing within each slot). Unused positions get
/// the unit.
pub fn insert_legs(x: &TensorSeries, slots: &[Vec<usize>], target_legs: usize) -> Result<TensorSeries, CoreError> {
    if slots.len() != x.legs {
        return Err(CoreError::MalformedSpec(format!(
            "slot assignment has {} entries for {} legs",
            slots.len(),
            x.legs
        )));
    }
    let mut seen = vec![false; target_legs];
    for slot in slots {
        if slot.is_empty() {
            return Err(CoreError::MalformedSpec("empty slot in leg insertion".into()));
        }
        for &pos in slot {
            if pos >= target_legs {
                return Err(CoreError::MalformedSpec(format!(
                    "slot position {pos} out of range for {target_legs} legs"
                )));
            }
            if seen[pos] {
                return Err(CoreError::MalformedSpec(format!("overlapping slot position {pos}")));
            }
            seen[pos] = true;
        }
    }
    let mut out = TensorSeries::zero(&x.spec, target_legs, x.order);
    for (&p, level) in &x.coeffs {
        for (tuple, c) in level {
            // per-leg split options, combined across legs
            let mut partial: Vec<(LegTuple, Rational)> = vec![(vec![Vec::new(); target_legs], c.clone())];
            for (leg, slot) in slots.iter().enumerate() {
                if slot.len() == 1 {
                    for (t, _) in partial.iter_mut() {
                        t[slot[0]] = tuple[leg].clone();
                    }
                } else {
                    let splits = coproduct_splits(&tuple[leg], slot.len());
                    let mut next = Vec::with_capacity(partial.len() * splits.len());
                    for (t, k) in &partial {
                        for split in &splits {
                            let mut grown = t.clone();
                            for (part, &pos) in split.iter().zip(slot) {
                                grown[pos] = part.clone();
                            }
                            next.push((grown, k.clone()));
                        }
                    }
                    partial = next;
                }
            }
            for (tuple, k) in partial {
                out.add_term(p, tuple, k);
            }
        }
    }
    Ok(out)
}

/// Morphism of tensor powers: a leg permutation composed with left
/// multiplication by a series. `(perm, elem)` acts as
/// `x -> perm(elem * x)`.
#[derive(Debug, Clone)]
pub struct UniversalMorphism {
    pub perm: Vec<usize>,
    pub elem: TensorSeries,
}

pub fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

impl UniversalMorphism {
    pub fn identity(spec: &Arc<LieAlgebraSpec>, legs: usize, order: usize) -> Self {
        Self { perm: identity_perm(legs), elem: TensorSeries::one(spec, legs, order) }
    }

    /// `self ∘ rhs`: rhs acts first. The element picked up from `self`
    /// is pulled back through rhs's permutation.
    pub fn compose(&self, rhs: &Self) -> Result<Self, CoreError> {
        let pulled = self.elem.permute_legs(&invert_perm(&rhs.perm));
        Ok(Self {
            perm: rhs.perm.iter().map(|&b| self.perm[b]).collect::<Vec<_>>(),
            elem: pulled.mul(&rhs.elem)?,
        })
    }
}

// The total permutation composes as perm[l] = self.perm[rhs.perm[l]]:
// a leg first moves through rhs, then through self.
