//! Desk-scale Lie algebras, representations and Manin data used by the
//! built-in programs, the test suites and the CLI fixtures.

use crate::algebra::LieAlgebraSpec;
use crate::error::CoreError;
use crate::funalg::MatrixGroupModel;
use crate::linalg::Matrix;
use crate::moduli::ManinTripleData;
use crate::rational::{rat, Rational};
use num_traits::Zero;
use std::sync::Arc;

/// Abelian algebra of the given dimension with zero casimir.
pub fn abelian(dim: usize) -> Arc<LieAlgebraSpec> {
    LieAlgebraSpec::new(
        format!("abelian{dim}"),
        (1..=dim).map(|i| format!("e{i}")).collect(),
        Vec::new(),
        vec![vec![Rational::zero(); dim]; dim],
    )
    .expect("abelian spec is well-formed")
}

pub fn abelian2() -> Arc<LieAlgebraSpec> {
    let mut casimir = vec![vec![Rational::zero(); 2]; 2];
    casimir[0][0] = rat(1);
    casimir[1][1] = rat(1);
    LieAlgebraSpec::new(
        "abelian2",
        vec!["e1".into(), "e2".into()],
        Vec::new(),
        casimir,
    )
    .expect("abelian spec is well-formed")
}

/// One-dimensional abelian algebra with `t = e (x) e`.
pub fn abelian1() -> Arc<LieAlgebraSpec> {
    LieAlgebraSpec::new("abelian1", vec!["e".into()], Vec::new(), vec![vec![rat(1)]])
        .expect("abelian spec is well-formed")
}

/// `aff(1)`: `[e1, e2] = e2`, zero casimir.
pub fn aff1() -> Arc<LieAlgebraSpec> {
    LieAlgebraSpec::new(
        "aff1",
        vec!["e1".into(), "e2".into()],
        vec![((0, 1, 1), rat(1)), ((1, 0, 1), rat(-1))],
        vec![vec![Rational::zero(); 2]; 2],
    )
    .expect("aff(1) spec is well-formed")
}

/// `gl2` in the matrix-unit basis E11, E12, E21, E22, with the casimir
/// inverse to the trace form: `t = sum E_ij (x) E_ji`.
pub fn gl2() -> Arc<LieAlgebraSpec> {
    let units = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
    let idx = |r: usize, c: usize| units.iter().position(|&u| u == (r, c)).unwrap() as u8;
    let mut brackets = Vec::new();
    for (p, &(i, j)) in units.iter().enumerate() {
        for (q, &(k, l)) in units.iter().enumerate() {
            // [E_ij, E_kl] = d_jk E_il - d_li E_kj
            if j == k {
                brackets.push(((p as u8, q as u8, idx(i, l)), rat(1)));
            }
            if l == i {
                brackets.push(((p as u8, q as u8, idx(k, j)), rat(-1)));
            }
        }
    }
    let mut casimir = vec![vec![Rational::zero(); 4]; 4];
    for (p, &(i, j)) in units.iter().enumerate() {
        casimir[p][idx(j, i) as usize] = rat(1);
    }
    LieAlgebraSpec::new(
        "gl2",
        vec!["E11".into(), "E12".into(), "E21".into(), "E22".into()],
        brackets,
        casimir,
    )
    .expect("gl2 spec is well-formed")
}

/// Defining representation of `gl2`.
pub fn gl2_model() -> Arc<MatrixGroupModel> {
    let spec = gl2();
    let unit = |r: usize, c: usize| -> Matrix {
        let mut m = vec![vec![Rational::zero(); 2]; 2];
        m[r][c] = rat(1);
        m
    };
    MatrixGroupModel::new(&spec, vec![unit(0, 0), unit(0, 1), unit(1, 0), unit(1, 1)])
        .expect("gl2 defining representation is valid")
}

/// The cotangent Manin triple: `d = aff(1) x| aff(1)*` with basis
/// e1, e2 (the affine part, `[e1,e2] = e2`) and f1, f2 (the abelian
/// dual, coadjoint action), casimir inverse to the duality pairing.
pub fn cotangent() -> Arc<LieAlgebraSpec> {
    let brackets = vec![
        // [e1, e2] = e2
        ((0u8, 1u8, 1u8), rat(1)),
        ((1, 0, 1), rat(-1)),
        // [e1, f2] = -f2
        ((0, 3, 3), rat(-1)),
        ((3, 0, 3), rat(1)),
        // [e2, f2] = f1
        ((1, 3, 2), rat(1)),
        ((3, 1, 2), rat(-1)),
    ];
    let mut casimir = vec![vec![Rational::zero(); 4]; 4];
    casimir[0][2] = rat(1);
    casimir[2][0] = rat(1);
    casimir[1][3] = rat(1);
    casimir[3][1] = rat(1);
    LieAlgebraSpec::new(
        "cotangent_aff1",
        vec!["e1".into(), "e2".into(), "f1".into(), "f2".into()],
        brackets,
        casimir,
    )
    .expect("cotangent triple spec is well-formed")
}

/// Faithful 3x3 block representation of the cotangent algebra; its group
/// is the solvable subgroup with pattern
/// `[[1, b, c], [0, a, d], [0, 0, 1]]`, `a` invertible.
pub fn cotangent_model() -> Arc<MatrixGroupModel> {
    let spec = cotangent();
    let z = || vec![vec![Rational::zero(); 3]; 3];
    let mut e1 = z();
    e1[1][1] = rat(-1);
    let mut e2 = z();
    e2[0][1] = rat(1);
    let mut f1 = z();
    f1[0][2] = rat(1);
    let mut f2 = z();
    f2[1][2] = rat(1);
    MatrixGroupModel::new(&spec, vec![e1, e2, f1, f2]).expect("cotangent representation is valid")
}

/// Manin data for the cotangent triple: `h` is the abelian dual
/// (spanned by f1, f2), `h*` the affine half (e1, e2), and the twist is
/// the transverse Lagrangian spanned by `e1 + f2` and `e2 - f1`.
pub fn cotangent_manin() -> Result<ManinTripleData, CoreError> {
    let spec = cotangent();
    let basis = |idx: &[(usize, i64)]| {
        let mut v = vec![Rational::zero(); 4];
        for &(i, c) in idx {
            v[i] = rat(c);
        }
        v
    };
    ManinTripleData::new(
        &spec,
        vec![basis(&[(2, 1)]), basis(&[(3, 1)])],
        vec![basis(&[(0, 1)]), basis(&[(1, 1)])],
        Some(vec![basis(&[(0, 1), (3, 1)]), basis(&[(1, 1), (2, -1)])]),
    )
}

/// Hyperbolic abelian triple of dimension two: `t` the standard
/// hyperbolic form, the two isotropic lines as the Lagrangian halves.
pub fn hyperbolic_manin() -> Result<ManinTripleData, CoreError> {
    let mut casimir = vec![vec![Rational::zero(); 2]; 2];
    casimir[0][1] = rat(1);
    casimir[1][0] = rat(1);
    let spec = LieAlgebraSpec::new(
        "hyperbolic2",
        vec!["u".into(), "v".into()],
        Vec::new(),
        casimir,
    )?;
    ManinTripleData::new(
        &spec,
        vec![vec![rat(1), rat(0)]],
        vec![vec![rat(0), rat(1)]],
        None,
    )
}

/// Diagonal 2x2 torus model for the hyperbolic abelian triple.
pub fn hyperbolic_model() -> Arc<MatrixGroupModel> {
    let manin = hyperbolic_manin().expect("bundled hyperbolic data is valid");
    let mut u = vec![vec![Rational::zero(); 2]; 2];
    u[0][0] = rat(1);
    let mut v = vec![vec![Rational::zero(); 2]; 2];
    v[1][1] = rat(1);
    MatrixGroupModel::new(&manin.spec, vec![u, v]).expect("torus representation is valid")
}

/// Single gl2 edge with no steps: the disk.
pub fn gl2_disk_program() -> crate::moduli::FusionProgram {
    use crate::funalg::Edge;
    crate::moduli::FusionProgram {
        name: "gl2_disk".into(),
        model: gl2_model(),
        skeleton: crate::moduli::SkeletonGraph {
            edges: vec![Edge { label: "a".into(), source: "P".into(), target: "Q".into() }],
        },
        steps: vec![],
        plus_points: vec!["P".into(), "Q".into()],
        minus_points: vec![],
    }
}

/// One gl2 edge with its endpoints fused: the annulus.
pub fn gl2_annulus_program() -> crate::moduli::FusionProgram {
    use crate::moduli::Step;
    let mut p = gl2_disk_program();
    p.name = "gl2_annulus".into();
    p.steps = vec![Step::Fuse { p: "P".into(), q: "Q".into(), merged: "R".into() }];
    p
}

/// Two disjoint gl2 edges, no steps.
pub fn gl2_two_disks_program() -> crate::moduli::FusionProgram {
    use crate::funalg::Edge;
    crate::moduli::FusionProgram {
        name: "gl2_two_disks".into(),
        model: gl2_model(),
        skeleton: crate::moduli::SkeletonGraph {
            edges: vec![
                Edge { label: "a".into(), source: "P1".into(), target: "Q1".into() },
                Edge { label: "b".into(), source: "P2".into(), target: "Q2".into() },
            ],
        },
        steps: vec![],
        plus_points: vec![],
        minus_points: vec![],
    }
}

/// Two gl2 edges joined at one fused point: a path skeleton.
pub fn gl2_path_program() -> crate::moduli::FusionProgram {
    use crate::moduli::Step;
    let mut p = gl2_two_disks_program();
    p.name = "gl2_path".into();
    p.steps = vec![Step::Fuse { p: "Q1".into(), q: "P2".into(), merged: "M".into() }];
    p
}

/// Every bundled program: the gl2 disk, two-disk, annulus and path
/// programs plus all built-in constructions over the cotangent triple.
pub fn bundled_programs() -> Vec<crate::moduli::FusionProgram> {
    use crate::moduli::{builtin_program, BuiltinKind};
    let mut out = vec![
        gl2_disk_program(),
        gl2_two_disks_program(),
        gl2_annulus_program(),
        gl2_path_program(),
    ];
    let manin = cotangent_manin().expect("bundled Manin data is valid");
    let model = cotangent_model();
    for kind in [
        BuiltinKind::PoissonLieTriangle,
        BuiltinKind::AltPoissonLieTriangle,
        BuiltinKind::TwistTriangle,
        BuiltinKind::DoubleSquare,
        BuiltinKind::HeisenbergSquare,
    ] {
        out.push(builtin_program(kind.name(), kind, &manin, &model, 2).expect("builtin over the bundled triple"));
    }
    out
}
