//! Iterable inference: start with every integer and string variable
//! iterable, type-check, demote the variables the checker blames, and repeat.
//! A program that checks is polynomial-time; one that cannot be repaired by
//! demotion is reported as unknown.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::syntax::{FunDef, Param, Program, Stmt, StmtKind, TypeAnnot};
use crate::typecheck::{check_program, check_program_with, CheckOptions, TypeError, TypeErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Poly,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Poly => "poly",
            Verdict::Unknown => "unknown",
        })
    }
}

/// One round of demotions and the diagnostics that caused it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Demotion {
    pub demoted: Vec<String>,
    pub errors: Vec<TypeError>,
}

/// Iterability of every annotated name (variables, parameters and function
/// results), keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnnotationState {
    pub assignment: BTreeMap<String, bool>,
    pub history: Vec<Demotion>,
}

impl AnnotationState {
    /// Every integer or string name of `p` marked iterable.
    pub fn initial(p: &Program) -> Self {
        let mut assignment = BTreeMap::new();
        let mut note = |x: &str, t: &TypeAnnot| {
            if is_annotatable(t) {
                assignment.insert(x.to_string(), true);
            }
        };
        for q in &p.params {
            note(&q.name, &q.ty);
        }
        p.walk_stmts(&mut |s| match &s.kind {
            StmtKind::Decl(t, x) => note(x, t),
            StmtKind::FunDef(fd) => {
                note(&fd.name, &fd.ret);
                fd.params.iter().for_each(|q| note(&q.name, &q.ty));
            }
            _ => {}
        });
        AnnotationState { assignment, history: Vec::new() }
    }

    pub fn is_iterable(&self, x: &str) -> bool {
        self.assignment.get(x).copied().unwrap_or(false)
    }

    /// Names currently iterable.
    pub fn iterable(&self) -> Vec<&str> {
        self.assignment.iter().filter(|(_, &it)| it).map(|(x, _)| x.as_str()).collect()
    }
}

fn is_annotatable(t: &TypeAnnot) -> bool {
    matches!(t, TypeAnnot::Int | TypeAnnot::IInt | TypeAnnot::Str | TypeAnnot::IStr)
}

fn with_iterability(t: &TypeAnnot, iterable: bool) -> TypeAnnot {
    match (t, iterable) {
        (TypeAnnot::Int | TypeAnnot::IInt, true) => TypeAnnot::IInt,
        (TypeAnnot::Int | TypeAnnot::IInt, false) => TypeAnnot::Int,
        (TypeAnnot::Str | TypeAnnot::IStr, true) => TypeAnnot::IStr,
        (TypeAnnot::Str | TypeAnnot::IStr, false) => TypeAnnot::Str,
        (other, _) => other.clone(),
    }
}

/// Demotes the variables blamed by iterable-assignment/declaration errors,
/// callee parameters receiving non-iterable arguments, and function results
/// returning non-iterable values. Other errors change nothing.
pub fn demote_step(state: &AnnotationState, errors: &[TypeError]) -> AnnotationState {
    let mut next = state.clone();
    let mut demoted = Vec::new();
    for e in errors {
        let blamable = matches!(
            e.kind,
            TypeErrorKind::IterableAssignmentInLoop
                | TypeErrorKind::IterableDeclInLoop
                | TypeErrorKind::ParamSubtypeViolation
                | TypeErrorKind::BadReturnType
        );
        if !blamable {
            continue;
        }
        for x in &e.vars {
            if let Some(it) = next.assignment.get_mut(x) {
                if *it {
                    *it = false;
                    demoted.push(x.clone());
                }
            }
        }
    }
    if !demoted.is_empty() {
        next.history.push(Demotion { demoted, errors: errors.to_vec() });
    }
    next
}

/// `p` with every annotatable name typed according to `state`. The result
/// type of `main` is made non-iterable.
pub fn annotate(p: &Program, state: &AnnotationState) -> Program {
    let ty = |x: &str, t: &TypeAnnot| with_iterability(t, state.is_iterable(x));
    let params = |ps: &[Param]| ps.iter().map(|q| Param::new(ty(&q.name, &q.ty), &q.name)).collect::<Vec<_>>();
    fn stmt(s: &Stmt, f: &dyn Fn(&str, &TypeAnnot) -> TypeAnnot, ps: &dyn Fn(&[Param]) -> Vec<Param>) -> Stmt {
        let kind = match &s.kind {
            StmtKind::Decl(t, x) => StmtKind::Decl(f(x, t), x.clone()),
            StmtKind::Block(ss) => StmtKind::Block(ss.iter().map(|s| stmt(s, f, ps)).collect()),
            StmtKind::If(c, a, b) => StmtKind::If(
                c.clone(),
                Box::new(stmt(a, f, ps)),
                b.as_ref().map(|b| Box::new(stmt(b, f, ps))),
            ),
            StmtKind::For { counter, bound, body } => {
                StmtKind::For { counter: counter.clone(), bound: bound.clone(), body: Box::new(stmt(body, f, ps)) }
            }
            StmtKind::FunDef(fd) => StmtKind::FunDef(FunDef {
                ret: f(&fd.name, &fd.ret),
                name: fd.name.clone(),
                params: ps(&fd.params),
                body: fd.body.iter().map(|s| stmt(s, f, ps)).collect(),
                ret_expr: fd.ret_expr.clone(),
            }),
            _ => return s.clone(),
        };
        Stmt::at(kind, s.pos)
    }
    Program {
        ret: with_iterability(&p.ret, false),
        params: params(&p.params),
        body: p.body.iter().map(|s| stmt(s, &ty, &params)).collect(),
        ret_expr: p.ret_expr.clone(),
    }
}

/// Drops every iterability annotation (all integers become `int`, all strings `string`).
pub fn erase_annotations(p: &Program) -> Program {
    let all_plain = AnnotationState::default();
    annotate(p, &all_plain)
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub verdict: Verdict,
    pub state: AnnotationState,
    /// The program annotated with the final state; it type-checks when the verdict is poly.
    #[serde(skip)]
    pub annotated: Program,
    /// Diagnostics of the last failed round (empty for poly).
    pub remaining: Vec<TypeError>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("program is ill-typed regardless of iterability: {}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct IllTyped(pub Vec<TypeError>);

/// Runs the inference on `p`, whose existing iterability annotations are ignored.
pub fn poly_check(p: &Program) -> Result<Analysis, IllTyped> {
    if let Err(errs) = check_program_with(p, CheckOptions { ignore_iterability: true }) {
        return Err(IllTyped(errs));
    }
    let mut state = AnnotationState::initial(p);
    loop {
        let annotated = annotate(p, &state);
        let errors = match check_program(&annotated) {
            Ok(_) => return Ok(Analysis { verdict: Verdict::Poly, state, annotated, remaining: Vec::new() }),
            Err(errors) => errors,
        };
        let next = demote_step(&state, &errors);
        if next.history.len() == state.history.len() {
            return Ok(Analysis { verdict: Verdict::Unknown, state, annotated, remaining: errors });
        }
        state = next;
    }
}
