//! Glue from a parsed program to its completed ground form, and the
//! declaration regimes used when comparing semantics.

use crate::completion::{complete, CompletedProgram};
use crate::founded::{linear_lfp, FiringOrder, FoundedRun};
use crate::grounder::{ground, GroundProgram};
use crate::language::{
    may_be_certain, resolve_declarations, scc_order, Certainty, DeclarationError, PredicateDecl,
    Program,
};

/// A resolved program with everything needed for evaluation.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub program: Program,
    pub ground: GroundProgram,
    pub completed: CompletedProgram,
    pub sccs: Vec<Vec<String>>,
}

impl Prepared {
    pub fn new(program: &Program) -> Result<Self, DeclarationError> {
        let program = resolve_declarations(program)?;
        let ground = ground(&program);
        let completed = complete(&ground, &program.decls);
        let sccs = scc_order(&program);
        Ok(Prepared { program, ground, completed, sccs })
    }

    pub fn founded(&self) -> FoundedRun {
        linear_lfp(&self.completed, &self.sccs, FiringOrder::Fifo)
    }
}

/// Every predicate uncertain; completeness declarations are kept.
pub fn all_uncertain(program: &Program) -> Program {
    let mut out = program.clone();
    for p in program.predicates() {
        let d = out.decls.entry(p).or_default();
        d.certainty = Some(Certainty::Uncertain);
    }
    out
}

/// Every predicate certain, or `None` if some predicate may not be.
pub fn all_certain(program: &Program) -> Option<Program> {
    let preds = program.predicates();
    if !preds.iter().all(|p| may_be_certain(program, p)) {
        return None;
    }
    let mut out = program.clone();
    out.decls = preds
        .into_iter()
        .map(|p| {
            (p, PredicateDecl { certainty: Some(Certainty::Certain), completeness: None, closed: false })
        })
        .collect();
    Some(out)
}

/// Default declarations with every uncertain complete predicate closed.
pub fn all_closed(program: &Program) -> Result<Program, DeclarationError> {
    let mut plain = program.clone();
    plain.decls.clear();
    Ok(close_all(&resolve_declarations(&plain)?))
}

/// Close every uncertain complete predicate of a resolved program.
pub fn close_all(resolved: &Program) -> Program {
    let mut out = resolved.clone();
    for d in out.decls.values_mut() {
        if !d.is_certain() && d.is_complete() {
            d.closed = true;
        }
    }
    out
}

/// Every conclusion predicate uncertain and complete (incomplete with
/// `complete == false`); predicates concluding no rule stay certain.
pub fn conclusions_uncertain(program: &Program, complete: bool) -> Program {
    use crate::language::Completeness;
    let mut out = program.clone();
    out.decls.clear();
    for p in program.conclusion_predicates() {
        out.decls.insert(
            p,
            PredicateDecl {
                certainty: Some(Certainty::Uncertain),
                completeness: Some(if complete { Completeness::Complete } else { Completeness::Incomplete }),
                closed: false,
            },
        );
    }
    out
}
