//! Marked-surface combinatorics: skeleton graphs, fusion programs and
//! their validation, assembly into quasi-Poisson algebras, Manin-triple
//! data, and the built-in Poisson-Lie constructions.
//!
//! A program is a skeleton (one disk block per edge, each endpoint a
//! fresh marked point) plus an ordered schedule of fusions, reductions
//! and sign re-declarations. The schedule, not a surface, is the source
//! of truth; it is echoed into every assembly trace.

use crate::algebra::{LieAlgebraSpec, Violation};
use crate::error::CoreError;
use crate::funalg::{coisotropic_check, Edge, MatrixGroupModel, QuasiPoissonAlgebra, Sign};
use crate::linalg::{self};
use crate::rational::Rational;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::sync::Arc;

pub use crate::funalg::Window;

/// Skeleton: marked points and oriented labeled edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub edges: Vec<Edge>,
}

impl SkeletonGraph {
    pub fn vertices(&self) -> BTreeSet<String> {
        self.edges
            .iter()
            .flat_map(|e| [e.source.clone(), e.target.clone()])
            .collect()
    }
}

/// A named subspace of the program's Lie algebra, given by spanning
/// vectors in basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub name: String,
    pub span: Vec<Vec<Rational>>,
}

/// One schedule entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Fuse { p: String, q: String, merged: String },
    Reduce { point: String, subspace: Subspace, degree_bound: usize },
    /// Joint reduction of two oppositely signed points by the diagonal.
    ReduceDiagonal { p: String, q: String, degree_bound: usize },
    /// Re-declare the casimir sign carried at a point.
    BarView { point: String, sign: Sign },
}

/// Skeleton plus schedule, with an optional initial sign split.
#[derive(Debug, Clone)]
pub struct FusionProgram {
    pub name: String,
    pub model: Arc<MatrixGroupModel>,
    pub skeleton: SkeletonGraph,
    pub steps: Vec<Step>,
    pub plus_points: Vec<String>,
    pub minus_points: Vec<String>,
}

/// One record of the assembly trace.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub step: String,
    pub surviving_points: Vec<String>,
    pub window_dim: Option<usize>,
}

/// The assembled algebra together with every intermediate stage (the
/// stage after each step, starting with the disk product).
#[derive(Debug, Clone)]
pub struct Assembly {
    pub algebra: QuasiPoissonAlgebra,
    pub stages: Vec<(String, QuasiPoissonAlgebra)>,
    pub trace: Vec<TraceRecord>,
}

/// Structural validation; one violation per problem, each naming the
/// step index (or `usize::MAX` for skeleton-level problems).
pub fn validate_program(program: &FusionProgram) -> Vec<(usize, String)> {
    let mut report = Vec::new();
    let spec = &program.model.spec;
    let mut endpoint_names: BTreeSet<String> = BTreeSet::new();
    let mut labels: BTreeSet<String> = BTreeSet::new();
    if program.skeleton.edges.is_empty() {
        report.push((usize::MAX, "skeleton has no edges".to_string()));
    }
    for e in &program.skeleton.edges {
        if !labels.insert(e.label.clone()) {
            report.push((usize::MAX, format!("duplicate edge label `{}`", e.label)));
        }
        if e.source == e.target {
            report.push((usize::MAX, format!("edge `{}` has equal endpoints", e.label)));
        }
        for name in [&e.source, &e.target] {
            if !endpoint_names.insert(name.clone()) {
                report.push((
                    usize::MAX,
                    format!("marked point `{name}` is an endpoint of two edge ends; use a fuse step"),
                ));
            }
        }
    }
    for name in program.plus_points.iter().chain(&program.minus_points) {
        if !endpoint_names.contains(name) {
            report.push((usize::MAX, format!("split names unknown point `{name}`")));
        }
    }

    // replay point bookkeeping
    let mut alive: BTreeSet<String> = endpoint_names;
    for (i, step) in program.steps.iter().enumerate() {
        match step {
            Step::Fuse { p, q, merged } => {
                if p == q {
                    report.push((i, format!("fusing `{p}` with itself")));
                }
                for name in [p, q] {
                    if !alive.contains(name) {
                        report.push((i, format!("unknown point `{name}`")));
                    }
                }
                if alive.contains(merged) && merged != p && merged != q {
                    report.push((i, format!("merged name `{merged}` already in use")));
                }
                alive.remove(p);
                alive.remove(q);
                alive.insert(merged.clone());
            }
            Step::Reduce { point, subspace, .. } => {
                if !alive.remove(point) {
                    report.push((i, format!("unknown point `{point}`")));
                }
                if subspace.span.iter().any(|v| v.len() != spec.dim) {
                    report.push((i, format!("subspace `{}` has vectors of wrong length", subspace.name)));
                } else {
                    for v in coisotropic_check(spec, &subspace.span) {
                        report.push((i, format!("subspace `{}` not coisotropic: {v}", subspace.name)));
                    }
                }
            }
            Step::ReduceDiagonal { p, q, .. } => {
                for name in [p, q] {
                    if !alive.remove(name) {
                        report.push((i, format!("unknown point `{name}`")));
                    }
                }
            }
            Step::BarView { point, .. } => {
                if !alive.contains(point) {
                    report.push((i, format!("unknown point `{point}`")));
                }
            }
        }
    }

    // sign bookkeeping for fusions: replay with signs
    if report.is_empty() {
        let mut signs: std::collections::BTreeMap<String, Sign> = Default::default();
        for e in &program.skeleton.edges {
            signs.insert(e.source.clone(), Sign::Plus);
            signs.insert(e.target.clone(), Sign::Plus);
        }
        for name in &program.minus_points {
            signs.insert(name.clone(), Sign::Minus);
        }
        for (i, step) in program.steps.iter().enumerate() {
            match step {
                Step::Fuse { p, q, merged } => {
                    let (sp, sq) = (signs[p], signs[q]);
                    if sp != sq {
                        report.push((i, format!(
                            "fusion joins `{p}` and `{q}` with differently signed casimirs; re-declare one side first"
                        )));
                    }
                    signs.remove(p);
                    signs.remove(q);
                    signs.insert(merged.clone(), sp);
                }
                Step::ReduceDiagonal { p, q, .. } => {
                    if signs[p] == signs[q] {
                        report.push((i, format!(
                            "diagonal reduction across `{p}` and `{q}` needs opposite casimir signs"
                        )));
                    }
                    signs.remove(p);
                    signs.remove(q);
                }
                Step::Reduce { point, .. } => {
                    signs.remove(point);
                }
                Step::BarView { point, sign } => {
                    signs.insert(point.clone(), *sign);
                }
            }
        }
    }
    report
}

/// Runs the program: disk blocks, then the schedule in order.
pub fn assemble(program: &FusionProgram) -> Result<Assembly, CoreError> {
    let violations = validate_program(program);
    if let Some((i, msg)) = violations.first() {
        return Err(CoreError::InvalidProgram(if *i == usize::MAX {
            msg.clone()
        } else {
            format!("step {i}: {msg}")
        }));
    }
    let mut algebra = QuasiPoissonAlgebra::disk_blocks(&program.model, program.skeleton.edges.clone())?;
    for name in &program.minus_points {
        algebra.set_sign(name, Sign::Minus)?;
    }
    let mut stages = vec![("disks".to_string(), algebra.clone())];
    let mut trace = vec![TraceRecord {
        step: "disks".into(),
        surviving_points: algebra.points.keys().cloned().collect(),
        window_dim: None,
    }];
    for step in &program.steps {
        let label;
        match step {
            Step::Fuse { p, q, merged } => {
                label = format!("fuse {p} {q} -> {merged}");
                algebra = algebra.fuse(p, q, merged)?;
            }
            Step::Reduce { point, subspace, degree_bound } => {
                label = format!("reduce {point} by {} deg {degree_bound}", subspace.name);
                algebra = algebra.reduce(point, &subspace.span, *degree_bound)?;
            }
            Step::ReduceDiagonal { p, q, degree_bound } => {
                label = format!("reduce-diagonal {p} {q} deg {degree_bound}");
                algebra = algebra.reduce_diagonal(p, q, *degree_bound)?;
            }
            Step::BarView { point, sign } => {
                label = format!(
                    "bar {point} -> {}",
                    if matches!(sign, Sign::Minus) { "minus" } else { "plus" }
                );
                algebra.set_sign(point, *sign)?;
            }
        }
        stages.push((label.clone(), algebra.clone()));
        trace.push(TraceRecord {
            step: label,
            surviving_points: algebra.points.keys().cloned().collect(),
            window_dim: algebra.window.as_ref().map(|w| w.basis.len()),
        });
    }
    Ok(Assembly { algebra, stages, trace })
}

// ---------------------------------------------------------------------
// Manin triples

/// A Lie algebra with nondegenerate casimir split into two transverse
/// Lagrangian subalgebras, with an optional twist.
#[derive(Debug, Clone)]
pub struct ManinTripleData {
    pub spec: Arc<LieAlgebraSpec>,
    pub h: Vec<Vec<Rational>>,
    pub h_star: Vec<Vec<Rational>>,
    pub twist: Option<Vec<Vec<Rational>>>,
}

impl ManinTripleData {
    pub fn new(
        spec: &Arc<LieAlgebraSpec>,
        h: Vec<Vec<Rational>>,
        h_star: Vec<Vec<Rational>>,
        twist: Option<Vec<Vec<Rational>>>,
    ) -> Result<Self, CoreError> {
        let data = Self { spec: spec.clone(), h, h_star, twist };
        let report = manin_validate(&data)?;
        if let Some(v) = report.first() {
            return Err(CoreError::MalformedSpec(format!("invalid Manin triple: {v}")));
        }
        Ok(data)
    }
}

/// Checks subalgebra closure, isotropy under the inverse pairing,
/// half-dimensionality and transversality for both halves (and the
/// twist when present). Errors when the casimir is singular.
pub fn manin_validate(data: &ManinTripleData) -> Result<Vec<Violation>, CoreError> {
    let spec = &data.spec;
    let dim = spec.dim;
    if linalg::rank(&spec.casimir) != dim {
        return Err(CoreError::MalformedSpec(format!(
            "casimir of `{}` is singular; Manin data needs a nondegenerate casimir",
            spec.name
        )));
    }
    // inverse pairing <u, v> = u^T t^{-1} v, computed by solving t x = v
    let pairing = |u: &[Rational], v: &[Rational]| -> Rational {
        let mut aug: linalg::Matrix = spec.casimir.clone();
        for (i, row) in aug.iter_mut().enumerate() {
            row.push(v[i].clone());
        }
        linalg::rref(&mut aug);
        let x: Vec<Rational> = aug.iter().map(|row| row[dim].clone()).collect();
        u.iter().zip(&x).map(|(a, b)| a * b).sum()
    };
    let mut report = Vec::new();
    let check_half = |name: &str, span: &Vec<Vec<Rational>>, report: &mut Vec<Violation>| {
        if linalg::rank(span) * 2 != dim {
            report.push(Violation { identity: format!("{name} is not half-dimensional"), witness: vec![] });
        }
        for (i, u) in span.iter().enumerate() {
            for (j, v) in span.iter().enumerate() {
                if !pairing(u, v).is_zero() {
                    report.push(Violation {
                        identity: format!("{name} is not isotropic"),
                        witness: vec![i, j],
                    });
                }
            }
        }
        // closure under the bracket
        for (i, u) in span.iter().enumerate() {
            for (j, v) in span.iter().enumerate().skip(i + 1) {
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
                if linalg::express_in_span(span, &w).is_none() {
                    report.push(Violation {
                        identity: format!("{name} is not a subalgebra"),
                        witness: vec![i, j],
                    });
                }
            }
        }
    };
    check_half("h", &data.h, &mut report);
    check_half("h_star", &data.h_star, &mut report);
    // transversality of h and h_star
    let mut joint = data.h.clone();
    joint.extend(data.h_star.iter().cloned());
    if linalg::rank(&joint) != dim {
        report.push(Violation { identity: "h + h_star does not span".into(), witness: vec![] });
    }
    if let Some(twist) = &data.twist {
        check_half("twist", twist, &mut report);
        let mut joint = data.h.clone();
        joint.extend(twist.iter().cloned());
        if linalg::rank(&joint) != dim {
            report.push(Violation { identity: "twist meets h".into(), witness: vec![] });
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------
// Built-in programs

/// The built-in constructions over a Manin triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    PoissonLieTriangle,
    AltPoissonLieTriangle,
    TwistTriangle,
    DoubleSquare,
    HeisenbergSquare,
}

impl BuiltinKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "poisson_lie_triangle" => Some(Self::PoissonLieTriangle),
            "alt_poisson_lie_triangle" => Some(Self::AltPoissonLieTriangle),
            "twist_triangle" => Some(Self::TwistTriangle),
            "double_square" => Some(Self::DoubleSquare),
            "heisenberg_square" => Some(Self::HeisenbergSquare),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PoissonLieTriangle => "poisson_lie_triangle",
            Self::AltPoissonLieTriangle => "alt_poisson_lie_triangle",
            Self::TwistTriangle => "twist_triangle",
            Self::DoubleSquare => "double_square",
            Self::HeisenbergSquare => "heisenberg_square",
        }
    }
}

fn edge(label: &str, source: &str, target: &str) -> Edge {
    Edge { label: label.into(), source: source.into(), target: target.into() }
}

fn named(name: &str, span: &[Vec<Rational>]) -> Subspace {
    Subspace { name: name.into(), span: span.to_vec() }
}

/// Emits the fusion/reduction schedule of a built-in construction.
///
/// Triangles use two disk blocks with edges oriented from the to-be-fused
/// bottom points to the reduced top corners; squares use four blocks as
/// two fused triangles, the upper one re-declared over the opposite sign,
/// with a final diagonal reduction.
pub fn builtin_program(
    name: &str,
    kind: BuiltinKind,
    manin: &ManinTripleData,
    model: &Arc<MatrixGroupModel>,
    degree_bound: usize,
) -> Result<FusionProgram, CoreError> {
    if model.spec != manin.spec {
        return Err(CoreError::MismatchedAlgebras(model.spec.name.clone(), manin.spec.name.clone()));
    }
    let h = named("h", &manin.h);
    let hs = named("hstar", &manin.h_star);
    let k = degree_bound;
    let (edges, steps, minus): (Vec<Edge>, Vec<Step>, Vec<String>) = match kind {
        BuiltinKind::PoissonLieTriangle | BuiltinKind::AltPoissonLieTriangle | BuiltinKind::TwistTriangle => {
            let right = if kind == BuiltinKind::AltPoissonLieTriangle { hs.clone() } else { h.clone() };
            let bottom = match kind {
                BuiltinKind::AltPoissonLieTriangle => h.clone(),
                BuiltinKind::TwistTriangle => {
                    let twist = manin.twist.as_ref().ok_or_else(|| {
                        CoreError::MalformedSpec("twist_triangle needs a Manin triple with a twist".into())
                    })?;
                    named("twist", twist)
                }
                _ => hs.clone(),
            };
            (
                vec![edge("u", "B1", "L"), edge("v", "B2", "R")],
                vec![
                    Step::Reduce { point: "L".into(), subspace: hs.clone(), degree_bound: k },
                    Step::Reduce { point: "R".into(), subspace: right, degree_bound: k },
                    Step::Fuse { p: "B1".into(), q: "B2".into(), merged: "B".into() },
                    Step::Reduce { point: "B".into(), subspace: bottom, degree_bound: k },
                ],
                vec![],
            )
        }
        BuiltinKind::DoubleSquare | BuiltinKind::HeisenbergSquare => {
            let (tr, tl) = if kind == BuiltinKind::DoubleSquare {
                (h.clone(), hs.clone())
            } else {
                (hs.clone(), h.clone())
            };
            (
                vec![
                    edge("e1", "A1", "BL"),
                    edge("e2", "A2", "BR"),
                    edge("e3", "A3", "TR"),
                    edge("e4", "A4", "TL"),
                ],
                vec![
                    Step::Reduce { point: "BL".into(), subspace: hs.clone(), degree_bound: k },
                    Step::Reduce { point: "BR".into(), subspace: h.clone(), degree_bound: k },
                    Step::Fuse { p: "A1".into(), q: "A2".into(), merged: "Mlow".into() },
                    Step::Reduce { point: "TR".into(), subspace: tr, degree_bound: k },
                    Step::Reduce { point: "TL".into(), subspace: tl, degree_bound: k },
                    Step::Fuse { p: "A3".into(), q: "A4".into(), merged: "Mup".into() },
                    Step::ReduceDiagonal { p: "Mlow".into(), q: "Mup".into(), degree_bound: k },
                ],
                vec!["A3".into(), "A4".into()],
            )
        }
    };
    let plus = edges
        .iter()
        .flat_map(|e| [e.source.clone(), e.target.clone()])
        .filter(|p| !minus.contains(p))
        .collect();
    Ok(FusionProgram {
        name: name.into(),
        model: model.clone(),
        skeleton: SkeletonGraph { edges },
        steps,
        plus_points: plus,
        minus_points: minus,
    })
}



#[cfg(test)]
mod degeneration_tests {
    use super::*;
    use crate::bundled;

    /// Abelian degeneration: the triangle over the hyperbolic triple
    /// reduces to a commutative bracket, while the fused stage is not
    /// commutative.
    #[test]
    fn hyperbolic_triangle_reduces_to_zero_bracket() {
        let manin = bundled::hyperbolic_manin().unwrap();
        let model = bundled::hyperbolic_model();
        let program =
            builtin_program("plt", BuiltinKind::PoissonLieTriangle, &manin, &model, 2).unwrap();
        let assembly = assemble(&program).unwrap();
        let fused = &assembly
            .stages
            .iter()
            .find(|(label, _)| label.starts_with("fuse"))
            .unwrap()
            .1;
        let window = fused.window.as_ref().unwrap();
        let noncommutative = window
            .basis
            .iter()
            .any(|f| window.basis.iter().any(|g| !fused.bracket_eval(f, g).is_zero()));
        assert!(noncommutative, "the fused stage carries a nonzero bracket");
        let final_algebra = &assembly.algebra;
        let basis = &final_algebra.window.as_ref().unwrap().basis;
        assert!(!basis.is_empty());
        for f in basis {
            for g in basis {
                assert!(final_algebra.bracket_eval(f, g).is_zero());
            }
        }
    }
}
