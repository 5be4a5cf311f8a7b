//! Command dispatch over a parsed document: validate, assemble, bracket,
//! quantize, check.

use crate::parser::Document;
use crate::report::Report;
use starfuse_core::funalg::{Gen, PolyFun, QuasiPoissonAlgebra};
use starfuse_core::moduli::manin_validate;
use starfuse_core::starprod::{associativity_defect, quantize_program, StarProduct};
use starfuse_core::{assemble, associator_truncate, fusion_coherence_defect, phi_element, validate_program, FusionProgram};

#[derive(Debug, Clone)]
pub enum Command {
    Validate,
    Assemble,
    Bracket { f: String, g: String },
    Quantize,
    Check,
}

impl Command {
    pub fn echo(&self) -> String {
        match self {
            Command::Validate => "validate".into(),
            Command::Assemble => "assemble".into(),
            Command::Bracket { f, g } => format!("bracket {f} {g}"),
            Command::Quantize => "quantize".into(),
            Command::Check => "check".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Flags {
    pub order: usize,
    pub degree_bound: usize,
    pub program: Option<String>,
}

impl Default for Flags {
    fn default() -> Self {
        Self { order: 2, degree_bound: 2, program: None }
    }
}

fn selected_programs<'a>(doc: &'a Document, flags: &Flags) -> Result<Vec<&'a FusionProgram>, String> {
    match &flags.program {
        Some(name) => doc
            .program(name)
            .map(|p| vec![p])
            .ok_or_else(|| format!("unknown program `{name}`")),
        None => Ok(doc.programs.iter().collect()),
    }
}

/// Names degree-one elements for bracket tables: generators by their
/// coordinate symbol, window elements by their polynomial.
fn element_name(algebra: &QuasiPoissonAlgebra, poly: &PolyFun) -> String {
    let labels = algebra.edge_labels();
    if let Some((mono, c)) = poly.terms.iter().next() {
        if poly.terms.len() == 1 && c == &starfuse_core::rational::rat(1) && mono.len() == 1 && mono[0].1 == 1 {
            let g = mono[0].0;
            return format!("x_{}_{}{}", labels[g.edge as usize], g.row + 1, g.col + 1);
        }
    }
    format!("({})", poly.render(&labels))
}

fn parse_generator(algebra: &QuasiPoissonAlgebra, name: &str) -> Result<Gen, String> {
    let rest = name
        .strip_prefix("x_")
        .ok_or_else(|| format!("generator `{name}` should look like x_<edge>_<row><col>"))?;
    let (edge_label, rc) = rest
        .rsplit_once('_')
        .ok_or_else(|| format!("generator `{name}` should look like x_<edge>_<row><col>"))?;
    let edge = algebra
        .edges
        .iter()
        .position(|e| e.label == edge_label)
        .ok_or_else(|| format!("unknown edge `{edge_label}` in generator `{name}`"))?;
    let digits: Vec<u32> = rc.chars().filter_map(|c| c.to_digit(10)).collect();
    if digits.len() != 2 || rc.len() != 2 {
        return Err(format!("generator `{name}` needs two digit indices"));
    }
    let gen = Gen { edge: edge as u32, row: (digits[0] - 1) as u8, col: (digits[1] - 1) as u8 };
    if !algebra.generators().contains(&gen) {
        return Err(format!("`{name}` is not a coordinate of the group pattern"));
    }
    Ok(gen)
}

fn render_star(star: &StarProduct) -> Vec<String> {
    let spec = &star.base.model.spec;
    let mut lines = Vec::new();
    for (&p, terms) in &star.terms {
        let mut rendered: Vec<String> = terms
            .iter()
            .map(|t| {
                let chain = |ops: &[starfuse_core::starprod::LabeledOp]| -> String {
                    if ops.is_empty() {
                        "1".to_string()
                    } else {
                        ops.iter()
                            .map(|op| {
                                let names: Vec<String> = op
                                    .word
                                    .iter()
                                    .map(|&i| spec.basis_names[i as usize].clone())
                                    .collect();
                                format!("{}:{}", op.point, names.join("."))
                            })
                            .collect::<Vec<_>>()
                            .join(" ")
                    }
                };
                format!(
                    "h^{p} {} [{} | {}]",
                    starfuse_core::rational::render(&t.coeff),
                    chain(&t.left),
                    chain(&t.right)
                )
            })
            .collect();
        rendered.sort();
        lines.extend(rendered);
    }
    lines
}

/// Quasi-Jacobi, coherence, associativity and semiclassical records for
/// one program, appended to the report.
fn check_program(report: &mut Report, program: &FusionProgram, flags: &Flags) {
    let name = &program.name;
    let violations = validate_program(program);
    if !violations.is_empty() {
        let (step, msg) = &violations[0];
        report.fail(format!("{name}: program structure"), format!("step {step}: {msg}"));
        return;
    }
    report.pass(format!("{name}: program structure"));

    let spec = &program.model.spec;
    let quant = match quantize_program(program, flags.order) {
        Ok(q) => q,
        Err(e) => {
            report.fail(format!("{name}: quantize"), e.to_string());
            return;
        }
    };
    let phi = match phi_element(spec) {
        Ok(p) => p,
        Err(e) => {
            report.fail(format!("{name}: trivector"), e.to_string());
            return;
        }
    };
    let assoc = match associator_truncate(spec, flags.order, None) {
        Ok(a) => a,
        Err(e) => {
            report.fail(format!("{name}: associativity constraint"), e.to_string());
            return;
        }
    };

    let last_label = quant.stages.last().map(|(l, _)| l.clone()).unwrap_or_default();
    for (label, star) in &quant.stages {
        let is_last = label == &last_label;
        if !label.starts_with("fuse") && !is_last {
            continue;
        }
        let algebra = &star.base;
        let deg1 = algebra.degree_one_elements();
        let labels = algebra.edge_labels();

        let mut jacobi_witness = None;
        'jacobi: for i in 0..deg1.len() {
            for j in i..deg1.len() {
                for k in j..deg1.len() {
                    let d = algebra.quasi_jacobi_defect(&phi, &deg1[i], &deg1[j], &deg1[k]);
                    if !d.is_zero() {
                        jacobi_witness = Some(format!("triple ({i},{j},{k}): {}", truncate(&d.render(&labels))));
                        break 'jacobi;
                    }
                }
            }
        }
        report.record(format!("{name} [{label}]: quasi-jacobi"), jacobi_witness);

        let mut sc_witness = None;
        for (i, f) in deg1.iter().enumerate() {
            for (j, g) in deg1.iter().enumerate() {
                let diff = star.semiclassical_bracket(f, g).sub(&algebra.bracket_eval(f, g));
                if !diff.is_zero() {
                    sc_witness = Some(format!("pair ({i},{j}): {}", truncate(&diff.render(&labels))));
                }
            }
        }
        if !star.is_bidifferential() {
            sc_witness = Some("order-0 term differs from the undeformed product".into());
        }
        report.record(format!("{name} [{label}]: semiclassical limit"), sc_witness);

        let mut assoc_witness = None;
        'assoc: for i in 0..deg1.len() {
            for j in 0..deg1.len() {
                for k in 0..deg1.len() {
                    let d = associativity_defect(star, &assoc, &deg1[i], &deg1[j], &deg1[k]);
                    if let Some((p, v)) = d.iter().next() {
                        assoc_witness =
                            Some(format!("triple ({i},{j},{k}) power {p}: {}", truncate(&v.render(&labels))));
                        break 'assoc;
                    }
                }
            }
        }
        report.record(format!("{name} [{label}]: star associativity"), assoc_witness);
    }
}

fn truncate(text: &str) -> String {
    const LIMIT: usize = 160;
    if text.len() <= LIMIT {
        text.to_string()
    } else {
        format!("{}...", &text[..LIMIT])
    }
}

pub fn run(command: &Command, doc: &Document, flags: &Flags) -> Result<Report, String> {
    let start = std::time::Instant::now();
    let mut report = Report::new(command.echo());
    match command {
        Command::Validate => {
            for (name, spec) in &doc.algebras {
                let violations = spec.validate();
                report.record(
                    format!("lie_algebra {name}"),
                    violations.first().map(|v| v.to_string()),
                );
            }
            for (name, _, _) in &doc.models {
                // construction already checked homomorphism, injectivity
                // and the group pattern
                report.pass(format!("rep {name}"));
            }
            for (name, _, data) in &doc.manins {
                match manin_validate(data) {
                    Ok(violations) => {
                        report.record(format!("manin {name}"), violations.first().map(|v| v.to_string()))
                    }
                    Err(e) => report.fail(format!("manin {name}"), e.to_string()),
                }
            }
            for program in selected_programs(doc, flags)? {
                let violations = validate_program(program);
                report.record(
                    format!("program {}", program.name),
                    violations.first().map(|(i, m)| if *i == usize::MAX {
                        m.clone()
                    } else {
                        format!("step {i}: {m}")
                    }),
                );
            }
        }
        Command::Assemble => {
            for program in selected_programs(doc, flags)? {
                match assemble(program) {
                    Err(e) => report.fail(format!("assemble {}", program.name), e.to_string()),
                    Ok(assembly) => {
                        report.pass(format!("assemble {}", program.name));
                        let algebra = &assembly.algebra;
                        let labels = algebra.edge_labels();
                        for record in &assembly.trace {
                            report.say(format!(
                                "{}: [{}] points {:?}{}",
                                program.name,
                                record.step,
                                record.surviving_points,
                                record
                                    .window_dim
                                    .map(|d| format!(", invariant basis {d}"))
                                    .unwrap_or_default()
                            ));
                        }
                        let deg1 = algebra.degree_one_elements();
                        for f in &deg1 {
                            for g in &deg1 {
                                let b = algebra.bracket_eval(f, g);
                                report.say(format!(
                                    "{}: {{{}, {}}} = {}",
                                    program.name,
                                    element_name(algebra, f),
                                    element_name(algebra, g),
                                    b.render(&labels)
                                ));
                            }
                        }
                    }
                }
            }
        }
        Command::Bracket { f, g } => {
            for program in selected_programs(doc, flags)? {
                match assemble(program) {
                    Err(e) => report.fail(format!("assemble {}", program.name), e.to_string()),
                    Ok(assembly) => {
                        let algebra = &assembly.algebra;
                        let gf = parse_generator(algebra, f)?;
                        let gg = parse_generator(algebra, g)?;
                        let value = algebra.bracket_eval(&PolyFun::generator(gf), &PolyFun::generator(gg));
                        report.pass(format!("bracket {}", program.name));
                        report.say(format!(
                            "{}: {{{f}, {g}}} = {}",
                            program.name,
                            value.render(&algebra.edge_labels())
                        ));
                    }
                }
            }
        }
        Command::Quantize => {
            for program in selected_programs(doc, flags)? {
                match quantize_program(program, flags.order) {
                    Err(e) => report.fail(format!("quantize {}", program.name), e.to_string()),
                    Ok(quant) => {
                        report.pass(format!("quantize {}", program.name));
                        let star = quant.final_product();
                        for line in render_star(star) {
                            report.say(format!("{}: {}", program.name, line));
                        }
                    }
                }
            }
        }
        Command::Check => {
            let mut broken_algebras = std::collections::BTreeSet::new();
            for (name, spec) in &doc.algebras {
                let violations = spec.validate();
                if !violations.is_empty() {
                    broken_algebras.insert(name.clone());
                }
                report.record(
                    format!("lie_algebra {name}"),
                    violations.first().map(|v| v.to_string()),
                );
            }
            for (name, _, data) in &doc.manins {
                match manin_validate(data) {
                    Ok(violations) => {
                        report.record(format!("manin {name}"), violations.first().map(|v| v.to_string()))
                    }
                    Err(e) => report.fail(format!("manin {name}"), e.to_string()),
                }
            }
            let programs = selected_programs(doc, flags)?;
            let mut coherent_algebras = std::collections::BTreeSet::new();
            for program in &programs {
                let spec = &program.model.spec;
                if broken_algebras.contains(&spec.name) || !coherent_algebras.insert(spec.name.clone()) {
                    continue;
                }
                match fusion_coherence_defect(spec, flags.order) {
                    Ok(defect) if defect.is_zero() => {
                        report.pass(format!("lie_algebra {}: fusion coherence", spec.name))
                    }
                    Ok(defect) => report.fail(
                        format!("lie_algebra {}: fusion coherence", spec.name),
                        truncate(&defect.render()),
                    ),
                    Err(e) => report.fail(format!("lie_algebra {}: fusion coherence", spec.name), e.to_string()),
                }
            }
            for program in programs {
                if broken_algebras.contains(&program.model.spec.name) {
                    report.fail(
                        format!("{}: identity suite", program.name),
                        format!("skipped: lie_algebra `{}` failed validation", program.model.spec.name),
                    );
                    continue;
                }
                check_program(&mut report, program, flags);
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}
