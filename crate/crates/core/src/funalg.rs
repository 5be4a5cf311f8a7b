//! Polynomial function algebras on products of matrix groups, invariant
//! vector fields, marked-point actions, quasi-Poisson brackets, the
//! quasi-Jacobi defect, coisotropy checking, invariants and reduction.
//!
//! Functions are polynomials in the free coordinates of the group
//! pattern, one copy per edge. The pattern marks which matrix entries
//! vary on the group and which are pinned constants; for the full matrix
//! group every entry is a coordinate, and polynomial identity checks are
//! sound because the group is dense in the pattern's affine space.

use crate::algebra::{LieAlgebraSpec, TensorSeries, Word};
use crate::error::CoreError;
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

// ---------------------------------------------------------------------
// Matrix group model

/// One matrix cell of the group pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Const(Rational),
    Coord,
}

/// A Lie algebra represented by matrices, together with the pattern of
/// its group closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixGroupModel {
    pub spec: Arc<LieAlgebraSpec>,
    pub rep_dim: usize,
    pub rep: Vec<Matrix>,
    pub pattern: Vec<Vec<Cell>>,
}

impl MatrixGroupModel {
    /// Builds the model and infers the pattern: a cell is a coordinate
    /// exactly where the associative envelope of the representation has
    /// support; elsewhere the identity matrix pins a constant.
    pub fn new(spec: &Arc<LieAlgebraSpec>, rep: Vec<Matrix>) -> Result<Arc<Self>, CoreError> {
        if rep.len() != spec.dim {
            return Err(CoreError::InvalidModel(format!(
                "representation of `{}` needs {} matrices, got {}",
                spec.name,
                spec.dim,
                rep.len()
            )));
        }
        let n = rep.first().map_or(0, |m| m.len());
        if n == 0 || rep.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(CoreError::InvalidModel("representation matrices must be square and same-sized".into()));
        }

        // homomorphism check
        for i in 0..spec.dim {
            for j in 0..spec.dim {
                let comm = linalg::mat_sub(&linalg::mat_mul(&rep[i], &rep[j]), &linalg::mat_mul(&rep[j], &rep[i]));
                let mut expected = linalg::zeros(n, n);
                for (k, c) in spec.bracket_of(i as u8, j as u8) {
                    for r in 0..n {
                        for s in 0..n {
                            expected[r][s] = &expected[r][s] + &(&c * &rep[k as usize][r][s]);
                        }
                    }
                }
                if !linalg::mat_is_zero(&linalg::mat_sub(&comm, &expected)) {
                    return Err(CoreError::InvalidModel(format!(
                        "matrices do not represent the bracket of basis elements {i}, {j}"
                    )));
                }
            }
        }

        // injectivity via rank of flattened matrices
        let flattened: Matrix = rep
            .iter()
            .map(|m| m.iter().flatten().cloned().collect())
            .collect();
        if linalg::rank(&flattened) != spec.dim {
            return Err(CoreError::InvalidModel("representation is not injective".into()));
        }

        // associative envelope of the image, saturated under products
        let mut envelope: Vec<Vec<Rational>> = Vec::new();
        let mut env_mats: Vec<Matrix> = Vec::new();
        let add = |m: Matrix, envelope: &mut Vec<Vec<Rational>>, env_mats: &mut Vec<Matrix>| {
            let flat: Vec<Rational> = m.iter().flatten().cloned().collect();
            let mut probe = envelope.clone();
            probe.push(flat.clone());
            if linalg::rank(&probe) > envelope.len() {
                envelope.push(flat);
                env_mats.push(m);
                true
            } else {
                false
            }
        };
        for m in &rep {
            add(m.clone(), &mut envelope, &mut env_mats);
        }
        loop {
            let snapshot = env_mats.clone();
            let mut grew = false;
            for a in &snapshot {
                for b in &snapshot {
                    grew |= add(linalg::mat_mul(a, b), &mut envelope, &mut env_mats);
                }
            }
            if !grew {
                break;
            }
        }
        if env_mats.len() != spec.dim {
            return Err(CoreError::InvalidModel(format!(
                "associative envelope of the representation has dimension {} but the algebra has dimension {}; \
                 the free polynomial model would not be the group's coordinate ring",
                env_mats.len(),
                spec.dim
            )));
        }

        let mut pattern = vec![vec![Cell::Const(Rational::zero()); n]; n];
        for m in &env_mats {
            for (r, row) in m.iter().enumerate() {
                for (s, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        pattern[r][s] = Cell::Coord;
                    }
                }
            }
        }
        for (r, row) in pattern.iter_mut().enumerate() {
            for (s, cell) in row.iter_mut().enumerate() {
                if matches!(cell, Cell::Const(_)) && r == s {
                    *cell = Cell::Const(Rational::one());
                }
            }
        }

        let model = Self { spec: spec.clone(), rep_dim: n, rep, pattern };
        model.check_tangency()?;
        Ok(Arc::new(model))
    }

    /// Both translates of the pattern matrix must vanish identically on
    /// constant cells, otherwise the invariant fields would not restrict
    /// to the coordinate ring.
    fn check_tangency(&self) -> Result<(), CoreError> {
        for i in 0..self.spec.dim {
            for side in [true, false] {
                let moved = self.translate_pattern(i, side);
                for (r, row) in self.pattern.iter().enumerate() {
                    for (s, cell) in row.iter().enumerate() {
                        if matches!(cell, Cell::Const(_)) && !moved[r][s].is_zero() {
                            return Err(CoreError::InvalidModel(format!(
                                "translate of basis element {i} leaves the pattern at cell ({r},{s})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Pattern * rho(e_i) (left-invariant direction, `right = false`) or
    /// rho(e_i) * pattern, with pattern coordinates as symbols over a
    /// dummy edge.
    fn translate_pattern(&self, i: usize, right: bool) -> Vec<Vec<PolyFun>> {
        let n = self.rep_dim;
        let x = |r: usize, s: usize| match &self.pattern[r][s] {
            Cell::Const(c) => PolyFun::constant(c.clone()),
            Cell::Coord => PolyFun::generator(Gen { edge: 0, row: r as u8, col: s as u8 }),
        };
        let mut out = vec![vec![PolyFun::zero(); n]; n];
        for r in 0..n {
            for s in 0..n {
                let mut acc = PolyFun::zero();
                for k in 0..n {
                    let term = if right {
                        x(k, s).scale(&self.rep[i][r][k])
                    } else {
                        x(r, k).scale(&self.rep[i][k][s])
                    };
                    acc = acc.add(&term);
                }
                out[r][s] = acc;
            }
        }
        out
    }

    /// Coordinate cells in row-major order.
    pub fn coordinates(&self) -> Vec<(u8, u8)> {
        let mut out = Vec::new();
        for (r, row) in self.pattern.iter().enumerate() {
            for (s, cell) in row.iter().enumerate() {
                if matches!(cell, Cell::Coord) {
                    out.push((r as u8, s as u8));
                }
            }
        }
        out
    }
}

// ---------------------------------------------------------------------
// Polynomial functions

/// A matrix-entry symbol on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Gen {
    pub edge: u32,
    pub row: u8,
    pub col: u8,
}

/// Commutative monomial: sorted generator/exponent pairs.
pub type Monomial = Vec<(Gen, u32)>;

/// Polynomial in matrix-entry generators, exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PolyFun {
    pub terms: BTreeMap<Monomial, Rational>,
}

impl PolyFun {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn generator(g: Gen) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![(g, 1)], Rational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        *slot = &*slot + &coeff;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(merge_monomials(ma, mb), ca * cb);
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&(_, e)| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Coefficient map restricted to monomials of the given total degree.
    pub fn homogeneous_part(&self, degree: usize) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().map(|&(_, e)| e as usize).sum::<usize>() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Canonical text: monomials sorted by (edge label, row, column,
    /// exponent); needs the edge-label table for naming.
    pub fn render(&self, edges: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut pieces = Vec::new();
        for (m, c) in &self.terms {
            let (sign, mag) = rational::render_signed(c);
            let body = if m.is_empty() {
                mag
            } else {
                let vars: Vec<String> = m
                    .iter()
                    .map(|&(g, e)| {
                        let name = format!("x_{}_{}{}", edges[g.edge as usize], g.row + 1, g.col + 1);
                        if e == 1 {
                            name
                        } else {
                            format!("{name}^{e}")
                        }
                    })
                    .collect();
                if mag == "1" {
                    vars.join("*")
                } else {
                    format!("{mag}*{}", vars.join("*"))
                }
            };
            if pieces.is_empty() && sign == '+' {
                pieces.push(body);
            } else {
                pieces.push(format!("{sign} {body}"));
            }
        }
        pieces.join(" ")
    }
}

impl fmt::Display for PolyFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // debugging view with bare edge indices
        let labels: Vec<String> = (0..=self.max_edge()).map(|e| format!("e{e}")).collect();
        f.write_str(&self.render(&labels))
    }
}

impl PolyFun {
    fn max_edge(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|&(g, _)| g.edge))
            .max()
            .unwrap_or(0)
    }
}

fn merge_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out: Monomial = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

// ---------------------------------------------------------------------
// Derivations

/// A derivation of the polynomial algebra, stored by its values on
/// generators and extended by the Leibniz rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub on_gens: BTreeMap<Gen, PolyFun>,
}

impl Derivation {
    pub fn zero() -> Self {
        Self { on_gens: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.on_gens.values().all(PolyFun::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, p) in &other.on_gens {
            let slot = out.on_gens.entry(*g).or_insert_with(PolyFun::zero);
            *slot = slot.add(p);
        }
        out.on_gens.retain(|_, p| !p.is_zero());
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self {
            on_gens: self.on_gens.iter().map(|(g, p)| (*g, p.scale(k))).collect(),
        }
    }

    pub fn apply(&self, f: &PolyFun) -> PolyFun {
        let mut out = PolyFun::zero();
        for (mono, coeff) in &f.terms {
            for (idx, &(g, e)) in mono.iter().enumerate() {
                let Some(image) = self.on_gens.get(&g) else { continue };
                if image.is_zero() {
                    continue;
                }
                // coeff * e * g^(e-1) * rest * image
                let mut rest: Monomial = Vec::with_capacity(mono.len());
                for (j, &(h, eh)) in mono.iter().enumerate() {
                    if j == idx {
                        if eh > 1 {
                            rest.push((h, eh - 1));
                        }
                    } else {
                        rest.push((h, eh));
                    }
                }
                let factor = coeff * Rational::from_integer(e.into());
                let mut base = PolyFun::zero();
                base.add_term(rest, factor);
                out = out.add(&base.mul(image));
            }
        }
        out
    }

    /// Commutator `[self, other]` as a derivation, evaluated on the
    /// given generator set (enough to determine it).
    pub fn commutator_on(&self, other: &Self, gens: &[Gen]) -> Self {
        let mut on_gens = BTreeMap::new();
        for &g in gens {
            let gp = PolyFun::generator(g);
            let value = self.apply(&other.apply(&gp)).sub(&other.apply(&self.apply(&gp)));
            if !value.is_zero() {
                on_gens.insert(g, value);
            }
        }
        Self { on_gens }
    }
}

/// Left-invariant field on one edge: sends the edge matrix `x` to
/// `x * rho(xi)` entrywise and every other edge's generators to zero.
pub fn left_invariant_field(model: &MatrixGroupModel, xi: &[Rational], edge: u32) -> Derivation {
    invariant_field(model, xi, edge, false)
}

/// Right-invariant field: `x -> rho(xi) * x` entrywise.
pub fn right_invariant_field(model: &MatrixGroupModel, xi: &[Rational], edge: u32) -> Derivation {
    invariant_field(model, xi, edge, true)
}

fn invariant_field(model: &MatrixGroupModel, xi: &[Rational], edge: u32, right: bool) -> Derivation {
    let n = model.rep_dim;
    let mut moved = vec![vec![PolyFun::zero(); n]; n];
    for (i, c) in xi.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let part = model.translate_pattern(i, right);
        for r in 0..n {
            for s in 0..n {
                moved[r][s] = moved[r][s].add(&part[r][s].scale(c));
            }
        }
    }
    let mut on_gens = BTreeMap::new();
    for (r, s) in model.coordinates() {
        let mut value = PolyFun::zero();
        for (mono, c) in &moved[r as usize][s as usize].terms {
            let retagged: Monomial = mono.iter().map(|&(g, e)| (Gen { edge, ..g }, e)).collect();
            value.add_term(retagged, c.clone());
        }
        if !value.is_zero() {
            on_gens.insert(Gen { edge, row: r, col: s }, value);
        }
    }
    Derivation { on_gens }
}

// ---------------------------------------------------------------------
// Quasi-Poisson algebras

/// Whether a marked point's casimir is taken with a plus or minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> Rational {
        match self {
            Sign::Plus => Rational::one(),
            Sign::Minus => -Rational::one(),
        }
    }
}

/// The action of the Lie algebra at one marked point: one derivation
/// per basis element, plus the sign of the casimir carried there.
#[derive(Debug, Clone)]
pub struct PointAction {
    pub sign: Sign,
    pub fields: Vec<Derivation>,
}

impl PointAction {
    /// Applies a basis word (composition, leftmost applied last).
    pub fn apply_word(&self, word: &Word, f: &PolyFun) -> PolyFun {
        let mut out = f.clone();
        for &i in word.iter().rev() {
            out = self.fields[i as usize].apply(&out);
        }
        out
    }
}

/// One oriented edge of the skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub source: String,
    pub target: String,
}

/// A bracket summand: `coeff * (d1 f * d2 g - d1 g * d2 f)` after
/// antisymmetrization.
#[derive(Debug, Clone)]
pub struct BracketTerm {
    pub coeff: Rational,
    pub d1: Derivation,
    pub d2: Derivation,
}

/// After a reduction, the algebra is carried by the span of invariant
/// polynomials up to a degree bound.
#[derive(Debug, Clone)]
pub struct Window {
    pub degree_bound: usize,
    /// echelonized invariant basis, constants excluded
    pub basis: Vec<PolyFun>,
}

/// Polynomial function algebra on the edge matrices with marked-point
/// actions and an antisymmetric biderivation bracket.
#[derive(Debug, Clone)]
pub struct QuasiPoissonAlgebra {
    pub model: Arc<MatrixGroupModel>,
    /// sorted by label; `Gen::edge` indexes into this list
    pub edges: Vec<Edge>,
    pub points: BTreeMap<String, PointAction>,
    pub bracket: Vec<BracketTerm>,
    pub window: Option<Window>,
}

impl QuasiPoissonAlgebra {
    /// Tensor product of one disk block per edge: zero bracket, and at
    /// each endpoint the invariant-field action (minus the right field
    /// at the source, the left field at the target). Every endpoint
    /// must be a distinct point; shared marked points arise later by
    /// fusion.
    pub fn disk_blocks(model: &Arc<MatrixGroupModel>, edges: Vec<Edge>) -> Result<Self, CoreError> {
        let mut sorted = edges;
        sorted.sort_by(|a, b| a.label.cmp(&b.label));
        for w in sorted.windows(2) {
            if w[0].label == w[1].label {
                return Err(CoreError::InvalidProgram(format!("duplicate edge label `{}`", w[0].label)));
            }
        }
        let dim = model.spec.dim;
        let mut points: BTreeMap<String, PointAction> = BTreeMap::new();
        for (idx, edge) in sorted.iter().enumerate() {
            if edge.source == edge.target {
                return Err(CoreError::InvalidProgram(format!(
                    "edge `{}` needs two distinct marked points",
                    edge.label
                )));
            }
            for (name, is_source) in [(&edge.source, true), (&edge.target, false)] {
                if points.contains_key(name.as_str()) {
                    return Err(CoreError::InvalidProgram(format!(
                        "marked point `{name}` used by more than one edge endpoint; merge points with fuse steps"
                    )));
                }
                let mut fields = Vec::with_capacity(dim);
                for i in 0..dim {
                    let mut xi = vec![Rational::zero(); dim];
                    xi[i] = Rational::one();
                    let field = if is_source {
                        right_invariant_field(model, &xi, idx as u32).scale(&-Rational::one())
                    } else {
                        left_invariant_field(model, &xi, idx as u32)
                    };
                    fields.push(field);
                }
                points.insert(name.clone(), PointAction { sign: Sign::Plus, fields });
            }
        }
        Ok(Self { model: model.clone(), edges: sorted, points, bracket: Vec::new(), window: None })
    }

    pub fn edge_labels(&self) -> Vec<String> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    /// All coordinate generators over all edges, row-major per edge.
    pub fn generators(&self) -> Vec<Gen> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() as u32 {
            for (r, c) in self.model.coordinates() {
                out.push(Gen { edge: e, row: r, col: c });
            }
        }
        out
    }

    /// Degree-one elements: the window basis when reduced, otherwise the
    /// coordinate generators.
    pub fn degree_one_elements(&self) -> Vec<PolyFun> {
        match &self.window {
            Some(w) => w.basis.iter().filter(|p| p.degree() == 1).cloned().collect(),
            None => self.generators().into_iter().map(PolyFun::generator).collect(),
        }
    }

    /// Re-declares the casimir sign carried at a point.
    pub fn set_sign(&mut self, point: &str, sign: Sign) -> Result<(), CoreError> {
        let action = self
            .points
            .get_mut(point)
            .ok_or_else(|| CoreError::UnknownPoint(point.into()))?;
        action.sign = sign;
        Ok(())
    }

    pub fn bracket_eval(&self, f: &PolyFun, g: &PolyFun) -> PolyFun {
        let mut out = PolyFun::zero();
        for term in &self.bracket {
            let a = term.d1.apply(f).mul(&term.d2.apply(g));
            let b = term.d1.apply(g).mul(&term.d2.apply(f));
            out = out.add(&a.sub(&b).scale(&term.coeff));
        }
        out
    }

    /// Merges the actions at two same-signed points into a diagonal
    /// action and adds the casimir correction to the bracket.
    pub fn fuse(&self, p: &str, q: &str, merged: &str) -> Result<Self, CoreError> {
        if p == q {
            return Err(CoreError::SelfFusion(p.into()));
        }
        let pa = self.points.get(p).ok_or_else(|| CoreError::UnknownPoint(p.into()))?;
        let qa = self.points.get(q).ok_or_else(|| CoreError::UnknownPoint(q.into()))?;
        if pa.sign != qa.sign {
            return Err(CoreError::SignMismatch(p.into(), q.into()));
        }
        if self.points.contains_key(merged) && merged != p && merged != q {
            return Err(CoreError::InvalidProgram(format!("point `{merged}` already exists")));
        }
        let sign = pa.sign;
        let mut bracket = self.bracket.clone();
        let half = rational::ratio(1, 2);
        for (a, b, t) in self.model.spec.casimir_pairs() {
            bracket.push(BracketTerm {
                coeff: &(&half * &t) * &sign.factor(),
                d1: qa.fields[a as usize].clone(),
                d2: pa.fields[b as usize].clone(),
            });
        }
        let merged_action = PointAction {
            sign,
            fields: pa
                .fields
                .iter()
                .zip(&qa.fields)
                .map(|(x, y)| x.add(y))
                .collect(),
        };
        let mut points = self.points.clone();
        points.remove(p);
        points.remove(q);
        points.insert(merged.to_string(), merged_action);
        Ok(Self { points, bracket, ..self.clone() })
    }

    /// The quasi-Jacobi defect
    /// `{f1,{f2,f3}} + cyclic + m3(phi . (f1 (x) f2 (x) f3))`,
    /// with the trivector acting through the total action of all
    /// surviving points. Zero for every algebra assembled here.
    pub fn quasi_jacobi_defect(
        &self,
        phi: &TensorSeries,
        f1: &PolyFun,
        f2: &PolyFun,
        f3: &PolyFun,
    ) -> PolyFun {
        let mut out = self.bracket_eval(f1, &self.bracket_eval(f2, f3));
        out = out.add(&self.bracket_eval(f2, &self.bracket_eval(f3, f1)));
        out = out.add(&self.bracket_eval(f3, &self.bracket_eval(f1, f2)));
        for action in self.points.values() {
            if let Some(level) = phi.coeffs.get(&0) {
                for (tuple, c) in level {
                    let a = action.apply_word(&tuple[0], f1);
                    let b = action.apply_word(&tuple[1], f2);
                    let d = action.apply_word(&tuple[2], f3);
                    out = out.add(&a.mul(&b).mul(&d).scale(c));
                }
            }
        }
        out
    }

    /// Basis of polynomials annihilated by the span's action at the
    /// given points, through total degree `bound`, deterministically
    /// echelonized. The span vectors live in the direct sum of the
    /// points' algebras (dim * points entries).
    pub fn invariants_of(
        &self,
        points: &[&str],
        span: &[Vec<Rational>],
        bound: usize,
    ) -> Result<Vec<PolyFun>, CoreError> {
        let dim = self.model.spec.dim;
        let mut actions = Vec::new();
        for &name in points {
            actions.push(self.points.get(name).ok_or_else(|| CoreError::UnknownPoint(name.into()))?);
        }
        // candidate space: current window basis, or all monomials of
        // degree 1..=bound
        let candidates: Vec<PolyFun> = match &self.window {
            Some(w) => {
                if w.degree_bound < bound {
                    return Err(CoreError::DegreeOverflow(format!(
                        "window holds degree <= {}, requested {}",
                        w.degree_bound, bound
                    )));
                }
                w.basis.iter().filter(|p| p.degree() <= bound).cloned().collect()
            }
            None => monomials_up_to(&self.generators(), bound)
                .into_iter()
                .map(|m| {
                    let mut p = PolyFun::zero();
                    p.add_term(m, Rational::one());
                    p
                })
                .collect(),
        };
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        // derivations of the span
        let mut span_fields: Vec<Derivation> = Vec::new();
        for v in span {
            if v.len() != dim * points.len() {
                return Err(CoreError::MalformedSpec(format!(
                    "span vector length {} but expected {}",
                    v.len(),
                    dim * points.len()
                )));
            }
            let mut d = Derivation::zero();
            for (pi, action) in actions.iter().enumerate() {
                for i in 0..dim {
                    let c = &v[pi * dim + i];
                    if !c.is_zero() {
                        d = d.add(&action.fields[i].scale(c));
                    }
                }
            }
            span_fields.push(d);
        }
        // linear system over the candidate coefficients
        let images: Vec<Vec<PolyFun>> = candidates
            .iter()
            .map(|p| span_fields.iter().map(|d| d.apply(p)).collect())
            .collect();
        let mut monomial_index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for imgs in &images {
            for img in imgs {
                for m in img.terms.keys() {
                    let next = monomial_index.len();
                    monomial_index.entry(m.clone()).or_insert(next);
                }
            }
        }
        let rows = span_fields.len() * monomial_index.len().max(1);
        let mut system = linalg::zeros(rows.max(1), candidates.len());
        for (j, imgs) in images.iter().enumerate() {
            for (k, img) in imgs.iter().enumerate() {
                for (m, c) in &img.terms {
                    let row = k * monomial_index.len() + monomial_index[m];
                    system[row][j] = c.clone();
                }
            }
        }
        let kernel = linalg::nullspace(&system);
        // echelonized combinations of the candidates
        let mut basis: Vec<PolyFun> = kernel
            .iter()
            .map(|v| {
                let mut p = PolyFun::zero();
                for (j, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        p = p.add(&candidates[j].scale(c));
                    }
                }
                p
            })
            .filter(|p| !p.is_zero())
            .collect();
        for p in basis.iter_mut() {
            let lead = p.terms.values().next().cloned().expect("nonzero poly");
            *p = p.scale(&lead.recip());
        }
        basis.sort();
        Ok(basis)
    }

    /// Reduction at one point by a coisotropic subalgebra: passes to the
    /// invariants through the degree bound and drops the point. The
    /// restricted bracket is verified to stay invariant.
    pub fn reduce(&self, point: &str, span: &[Vec<Rational>], bound: usize) -> Result<Self, CoreError> {
        let report = coisotropic_check(&self.model.spec, span);
        if !report.is_empty() {
            return Err(CoreError::NotCoisotropic(report[0].to_string()));
        }
        self.reduce_by_fields(&[point], span, bound)
    }

    /// Joint reduction of two oppositely signed points by the diagonal
    /// subalgebra `{(v, v)}` of the pair of actions.
    pub fn reduce_diagonal(&self, p: &str, q: &str, bound: usize) -> Result<Self, CoreError> {
        let pa = self.points.get(p).ok_or_else(|| CoreError::UnknownPoint(p.into()))?;
        let qa = self.points.get(q).ok_or_else(|| CoreError::UnknownPoint(q.into()))?;
        if pa.sign == qa.sign {
            return Err(CoreError::NotCoisotropic(format!(
                "diagonal across `{p}` and `{q}` needs opposite casimir signs"
            )));
        }
        let dim = self.model.spec.dim;
        let mut span = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut v = vec![Rational::zero(); 2 * dim];
            v[i] = Rational::one();
            v[dim + i] = Rational::one();
            span.push(v);
        }
        self.reduce_by_fields(&[p, q], &span, bound)
    }

    fn reduce_by_fields(&self, points: &[&str], span: &[Vec<Rational>], bound: usize) -> Result<Self, CoreError> {
        let basis = self.invariants_of(points, span, bound)?;
        let span_fields = self.span_fields(points, span)?;
        let mut out = self.clone();
        for &p in points {
            out.points.remove(p);
        }
        out.window = Some(Window { degree_bound: bound, basis });
        out.verify_bracket_closure(&span_fields)?;
        Ok(out)
    }

    fn span_fields(&self, points: &[&str], span: &[Vec<Rational>]) -> Result<Vec<Derivation>, CoreError> {
        let dim = self.model.spec.dim;
        let mut actions = Vec::new();
        for &name in points {
            actions.push(self.points.get(name).ok_or_else(|| CoreError::UnknownPoint(name.into()))?);
        }
        let mut out = Vec::with_capacity(span.len());
        for v in span {
            let mut d = Derivation::zero();
            for (pi, action) in actions.iter().enumerate() {
                for i in 0..dim {
                    let c = &v[pi * dim + i];
                    if !c.is_zero() {
                        d = d.add(&action.fields[i].scale(c));
                    }
                }
            }
            out.push(d);
        }
        Ok(out)
    }

    /// Brackets of invariants must stay invariant; verified rather than
    /// assumed. Representability inside the degree window is only
    /// demanded where the degrees allow it.
    fn verify_bracket_closure(&self, span_fields: &[Derivation]) -> Result<(), CoreError> {
        let window = self.window.as_ref().expect("called after reduction");
        let basis = &window.basis;
        for (i, f) in basis.iter().enumerate() {
            for g in basis.iter().skip(i + 1) {
                let b = self.bracket_eval(f, g);
                if b.is_zero() {
                    continue;
                }
                for d in span_fields {
                    if !d.apply(&b).is_zero() {
                        return Err(CoreError::NotCoisotropic(format!(
                            "bracket of invariants is not invariant (pair {i})"
                        )));
                    }
                }
                if f.degree() + g.degree() <= window.degree_bound && self.express_in_window(&b).is_none() {
                    return Err(CoreError::DegreeOverflow(format!(
                        "bracket of invariants leaves the invariant span at degree {}",
                        b.degree()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Writes a polynomial as constant + combination of the window
    /// basis; `None` when it escapes the window.
    pub fn express_in_window(&self, f: &PolyFun) -> Option<(Rational, Vec<Rational>)> {
        let window = self.window.as_ref()?;
        if f.degree() > window.degree_bound {
            return None;
        }
        let mut monomial_index: BTreeMap<Monomial, usize> = BTreeMap::new();
        let collect = |p: &PolyFun, monomial_index: &mut BTreeMap<Monomial, usize>| {
            for m in p.terms.keys() {
                if !m.is_empty() {
                    let next = monomial_index.len();
                    monomial_index.entry(m.clone()).or_insert(next);
                }
            }
        };
        collect(f, &mut monomial_index);
        for b in &window.basis {
            collect(b, &mut monomial_index);
        }
        let to_vec = |p: &PolyFun| {
            let mut v = vec![Rational::zero(); monomial_index.len()];
            for (m, c) in &p.terms {
                if !m.is_empty() {
                    v[monomial_index[m]] = c.clone();
                }
            }
            v
        };
        let cols: Vec<Vec<Rational>> = window.basis.iter().map(to_vec).collect();
        let target = to_vec(f);
        let sol = linalg::express_in_span(&cols, &target)?;
        // constant part must match too
        let mut residual = f.clone();
        for (b, c) in window.basis.iter().zip(&sol) {
            residual = residual.sub(&b.scale(c));
        }
        if residual.terms.keys().any(|m| !m.is_empty()) {
            return None;
        }
        let constant = residual.terms.get(&Vec::new()).cloned().unwrap_or_else(Rational::zero);
        Some((constant, sol))
    }
}

/// All monomials of total degree 1..=bound over the generator list.
pub fn monomials_up_to(gens: &[Gen], bound: usize) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = Vec::new();
    let mut current: Vec<Monomial> = vec![Vec::new()];
    for _ in 0..bound {
        let mut next = Vec::new();
        for m in &current {
            let start = m.last().map(|&(g, _)| g);
            for &g in gens {
                if let Some(s) = start {
                    if g < s {
                        continue;
                    }
                }
                let mut grown = m.clone();
                if let Some(last) = grown.last_mut() {
                    if last.0 == g {
                        last.1 += 1;
                    } else {
                        grown.push((g, 1));
                    }
                } else {
                    grown.push((g, 1));
                }
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        current = next;
    }
    out.sort();
    out.dedup();
    out
}

/// Checks (i) closure of the span under the bracket and (ii) vanishing
/// of the casimir against the span's annihilator. Empty report means
/// coisotropic.
pub fn coisotropic_check(spec: &Arc<LieAlgebraSpec>, span: &[Vec<Rational>]) -> Vec<crate::algebra::Violation> {
    use crate::algebra::Violation;
    let dim = spec.dim;
    let mut report = Vec::new();
    let span_rows: Matrix = span.to_vec();
    for (i, u) in span.iter().enumerate() {
        for (j, v) in span.iter().enumerate().skip(i + 1) {
            // [u, v] in coordinates
            let mut w = vec![Rational::zero(); dim];
            for a in 0..dim as u8 {
                for b in 0..dim as u8 {
                    let c = &u[a as usize] * &v[b as usize];
                    if c.is_zero() {
                        continue;
                    }
                    for (k, ck) in spec.bracket_of(a, b) {
                        w[k as usize] = &w[k as usize] + &(&c * &ck);
                    }
                }
            }
            if linalg::express_in_span(&span_rows, &w).is_none() {
                report.push(Violation {
                    identity: "subalgebra closure".into(),
                    witness: vec![i, j],
                });
            }
        }
    }
    // annihilator of the span; a zero row keeps the column count when
    // the span is empty
    let mut padded = span_rows.clone();
    if padded.is_empty() {
        padded.push(vec![Rational::zero(); dim]);
    }
    let ann = linalg::nullspace(&padded);
    for (i, alpha) in ann.iter().enumerate() {
        for (j, beta) in ann.iter().enumerate() {
            let mut pairing = Rational::zero();
            for (a, b, t) in spec.casimir_pairs() {
                pairing = pairing + &(&alpha[a as usize] * &beta[b as usize]) * &t;
            }
            if !pairing.is_zero() {
                report.push(Violation {
                    identity: "casimir image in the quotient".into(),
                    witness: vec![i, j],
                });
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use crate::rational::{rat, ratio};

    fn basis_vec(dim: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        v[i] = Rational::one();
        v
    }

    #[test]
    fn left_field_on_gl2_entries() {
        let model = bundled::gl2_model();
        // xi = E12: x * rho(E12) moves column 1 into column 2
        let d = left_invariant_field(&model, &basis_vec(4, 1), 0);
        let x11 = Gen { edge: 0, row: 0, col: 0 };
        let x12 = Gen { edge: 0, row: 0, col: 1 };
        assert!(d.on_gens.get(&x11).is_none());
        assert_eq!(d.on_gens[&x12], PolyFun::generator(x11));
        // zero vector gives the zero derivation
        let z = left_invariant_field(&model, &vec![Rational::zero(); 4], 0);
        assert!(z.is_zero());
    }

    #[test]
    fn left_fields_are_a_homomorphism_right_fields_anti() {
        let model = bundled::gl2_model();
        let spec = &model.spec;
        let gens: Vec<Gen> = model
            .coordinates()
            .into_iter()
            .map(|(r, c)| Gen { edge: 0, row: r, col: c })
            .collect();
        for i in 0..4u8 {
            for j in 0..4u8 {
                let li = left_invariant_field(&model, &basis_vec(4, i as usize), 0);
                let lj = left_invariant_field(&model, &basis_vec(4, j as usize), 0);
                let comm = li.commutator_on(&lj, &gens);
                let mut expect = Derivation::zero();
                for (k, c) in spec.bracket_of(i, j) {
                    expect = expect.add(&left_invariant_field(&model, &basis_vec(4, k as usize), 0).scale(&c));
                }
                for &g in &gens {
                    assert_eq!(comm.apply(&PolyFun::generator(g)), expect.apply(&PolyFun::generator(g)));
                }
                // right fields: [xi^R, eta^R] = -([xi,eta])^R
                let ri = right_invariant_field(&model, &basis_vec(4, i as usize), 0);
                let rj = right_invariant_field(&model, &basis_vec(4, j as usize), 0);
                let comm = ri.commutator_on(&rj, &gens);
                let mut expect = Derivation::zero();
                for (k, c) in spec.bracket_of(i, j) {
                    expect = expect.add(&right_invariant_field(&model, &basis_vec(4, k as usize), 0).scale(&-c));
                }
                for &g in &gens {
                    assert_eq!(comm.apply(&PolyFun::generator(g)), expect.apply(&PolyFun::generator(g)));
                }
            }
        }
    }

    #[test]
    fn disk_endpoint_actions_commute() {
        let model = bundled::gl2_model();
        let alg = QuasiPoissonAlgebra::disk_blocks(
            &model,
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        let gens = alg.generators();
        let p = &alg.points["P"];
        let q = &alg.points["Q"];
        for i in 0..4 {
            for j in 0..4 {
                let comm = p.fields[i].commutator_on(&q.fields[j], &gens);
                assert!(comm.is_zero());
            }
        }
    }

    #[test]
    fn bracket_basics() {
        let model = bundled::gl2_model();
        let alg = QuasiPoissonAlgebra::disk_blocks(
            &model,
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        let fused = alg.fuse("P", "Q", "R").unwrap();
        let gens = fused.generators();
        let f = PolyFun::generator(gens[0]);
        // derivations kill constants
        assert!(fused.bracket_eval(&f, &PolyFun::one()).is_zero());
        // antisymmetry by construction
        for &a in &gens {
            for &b in &gens {
                let pa = PolyFun::generator(a);
                let pb = PolyFun::generator(b);
                let fg = fused.bracket_eval(&pa, &pb);
                let gf = fused.bracket_eval(&pb, &pa);
                assert_eq!(fg, gf.scale(&rat(-1)));
            }
        }
    }

    #[test]
    fn annulus_bracket_matches_direct_expansion() {
        // {f,g} computed through fuse vs the displayed formula
        // (1/2) sum t^{ab} (Q_a f P_b g - Q_a g P_b f)
        let model = bundled::gl2_model();
        let alg = QuasiPoissonAlgebra::disk_blocks(
            &model,
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        let fused = alg.fuse("P", "Q", "R").unwrap();
        let pa = &alg.points["P"];
        let qa = &alg.points["Q"];
        let gens = fused.generators();
        for &x in &gens {
            for &y in &gens {
                let f = PolyFun::generator(x);
                let g = PolyFun::generator(y);
                let mut expect = PolyFun::zero();
                for (a, b, t) in model.spec.casimir_pairs() {
                    let forward = qa.fields[a as usize].apply(&f).mul(&pa.fields[b as usize].apply(&g));
                    let backward = qa.fields[a as usize].apply(&g).mul(&pa.fields[b as usize].apply(&f));
                    expect = expect.add(&forward.sub(&backward).scale(&(&t * &ratio(1, 2))));
                }
                assert_eq!(fused.bracket_eval(&f, &g), expect);
            }
        }
    }

    #[test]
    fn fuse_with_zero_casimir_keeps_bracket() {
        let spec = bundled::aff1();
        let mut e1 = vec![vec![Rational::zero(); 2]; 2];
        e1[0][0] = rat(1);
        let mut e2 = vec![vec![Rational::zero(); 2]; 2];
        e2[0][1] = rat(1);
        let model = MatrixGroupModel::new(&spec, vec![e1, e2]).unwrap();
        let alg = QuasiPoissonAlgebra::disk_blocks(
            &model,
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        let fused = alg.fuse("P", "Q", "R").unwrap();
        for &x in &fused.generators() {
            for &y in &fused.generators() {
                assert!(fused
                    .bracket_eval(&PolyFun::generator(x), &PolyFun::generator(y))
                    .is_zero());
            }
        }
    }

    #[test]
    fn fusing_oppositely_signed_points_is_rejected() {
        let model = bundled::gl2_model();
        let mut alg = QuasiPoissonAlgebra::disk_blocks(
            &model,
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        alg.set_sign("Q", Sign::Minus).unwrap();
        assert!(matches!(alg.fuse("P", "Q", "R"), Err(CoreError::SignMismatch(_, _))));
        assert!(matches!(alg.fuse("P", "P", "R"), Err(CoreError::SelfFusion(_))));
        // matching signs after re-declaring both
        alg.set_sign("P", Sign::Minus).unwrap();
        assert!(alg.fuse("P", "Q", "R").is_ok());
    }

    #[test]
    fn coisotropy_examples() {
        let gl2 = bundled::gl2();
        // c = g: quotient is zero
        let full: Vec<Vec<Rational>> = (0..4).map(|i| basis_vec(4, i)).collect();
        assert!(coisotropic_check(&gl2, &full).is_empty());
        // c = 0 with the trace casimir: not coisotropic
        assert!(!coisotropic_check(&gl2, &[]).is_empty());
        // diagonal in gl2 + bar(gl2)
        let sum = crate::algebra::direct_sum(&gl2, &crate::algebra::bar(&gl2));
        let diag: Vec<Vec<Rational>> = (0..4)
            .map(|i| {
                let mut v = vec![Rational::zero(); 8];
                v[i] = Rational::one();
                v[4 + i] = Rational::one();
                v
            })
            .collect();
        assert!(coisotropic_check(&sum, &diag).is_empty());
        // same diagonal inside gl2 + gl2 is NOT coisotropic
        let sum2 = crate::algebra::direct_sum(&gl2, &gl2);
        assert!(!coisotropic_check(&sum2, &diag).is_empty());
    }

    #[test]
    fn invariants_examples() {
        let model = bundled::gl2_model();
        let edge = Edge { label: "a".into(), source: "P".into(), target: "Q".into() };
        let alg = QuasiPoissonAlgebra::disk_blocks(&model, vec![edge]).unwrap();
        // c = 0: all monomials up to the bound survive
        let all = alg.invariants_of(&["Q"], &[], 2).unwrap();
        assert_eq!(all.len(), 4 + 10);
        // full algebra acting by left fields at Q: no degree-1 invariants
        let full: Vec<Vec<Rational>> = (0..4).map(|i| basis_vec(4, i)).collect();
        let inv = alg.invariants_of(&["Q"], &full, 1).unwrap();
        assert!(inv.is_empty());
        // annulus with merged conjugation-type action: degree-1 invariants
        // are spanned by the trace x11 + x22
        let fused = alg.fuse("P", "Q", "R").unwrap();
        let inv = fused.invariants_of(&["R"], &full, 1).unwrap();
        assert_eq!(inv.len(), 1);
        let x11 = Gen { edge: 0, row: 0, col: 0 };
        let x22 = Gen { edge: 0, row: 1, col: 1 };
        let trace = PolyFun::generator(x11).add(&PolyFun::generator(x22));
        assert_eq!(inv[0], trace);
    }

    #[test]
    fn reduce_by_zero_keeps_everything_and_degree_overflow_reporting() {
        // zero casimir, so the zero subalgebra is coisotropic
        let spec = bundled::aff1();
        let mut e1 = vec![vec![Rational::zero(); 2]; 2];
        e1[0][0] = rat(1);
        let mut e2 = vec![vec![Rational::zero(); 2]; 2];
        e2[0][1] = rat(1);
        let model = MatrixGroupModel::new(&spec, vec![e1, e2]).unwrap();
        let edge = Edge { label: "a".into(), source: "P".into(), target: "Q".into() };
        let alg = QuasiPoissonAlgebra::disk_blocks(&model, vec![edge]).unwrap();
        let reduced = alg.reduce("Q", &[], 2).unwrap();
        assert!(reduced.window.is_some());
        // 2 coordinates: 2 monomials of degree 1 plus 3 of degree 2
        assert_eq!(reduced.window.as_ref().unwrap().basis.len(), 5);
        assert!(!reduced.points.contains_key("Q"));
        // express_in_window refuses degrees beyond the bound
        let g = Gen { edge: 0, row: 0, col: 0 };
        let mut cubic = PolyFun::zero();
        cubic.add_term(vec![(g, 3)], rat(1));
        assert!(reduced.express_in_window(&cubic).is_none());
        let linear = PolyFun::generator(g);
        assert!(reduced.express_in_window(&linear).is_some());
        // the coisotropy gate rejects the zero subalgebra when the
        // casimir does not vanish
        let gl2 = QuasiPoissonAlgebra::disk_blocks(
            &bundled::gl2_model(),
            vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        )
        .unwrap();
        assert!(matches!(gl2.reduce("Q", &[], 2), Err(CoreError::NotCoisotropic(_))));
    }

    #[test]
    fn model_rejects_envelope_dimension_mismatch() {
        // sl2-like span inside 2x2 matrices: envelope is all of gl2,
        // dimension 4 > 3
        let spec = crate::algebra::LieAlgebraSpec::new(
            "sl2",
            vec!["h".into(), "e".into(), "f".into()],
            vec![
                ((0u8, 1u8, 1u8), rat(2)),
                ((1, 0, 1), rat(-2)),
                ((0, 2, 2), rat(-2)),
                ((2, 0, 2), rat(2)),
                ((1, 2, 0), rat(1)),
                ((2, 1, 0), rat(-1)),
            ],
            vec![vec![Rational::zero(); 3]; 3],
        )
        .unwrap();
        let h = vec![vec![rat(1), rat(0)], vec![rat(0), rat(-1)]];
        let e = vec![vec![rat(0), rat(1)], vec![rat(0), rat(0)]];
        let f = vec![vec![rat(0), rat(0)], vec![rat(1), rat(0)]];
        let err = MatrixGroupModel::new(&spec, vec![h, e, f]);
        assert!(matches!(err, Err(CoreError::InvalidModel(_))));
    }
}
