//! Self-false atoms of closed predicates, and the iteration of founded
//! evaluation with self-false atoms made false.

use std::collections::BTreeSet;

use crate::completion::CompletedProgram;
use crate::founded::{eval3, linear_lfp, FiringOrder, Interpretation, TruthValue};
use crate::grounder::GroundExpr;
use crate::language::GroundAtom;
use crate::pipeline::Prepared;

pub type SelfFalseSet = BTreeSet<GroundAtom>;

/// Kleene evaluation where positive occurrences of atoms in `assumed` read false.
fn eval_assuming(e: &GroundExpr, itp: &Interpretation, assumed: &SelfFalseSet) -> TruthValue {
    match e {
        GroundExpr::Lit(l) if l.positive && assumed.contains(&l.atom) => TruthValue::False,
        GroundExpr::And(xs) => xs
            .iter()
            .fold(TruthValue::True, |acc, x| acc.and(eval_assuming(x, itp, assumed))),
        GroundExpr::Or(xs) => xs
            .iter()
            .fold(TruthValue::False, |acc, x| acc.or(eval_assuming(x, itp, assumed))),
        GroundExpr::Not(_) => panic!("self-false analysis needs a renamed program"),
        other => eval3(other, itp),
    }
}

/// The greatest set `S` of non-false atoms of closed predicates such that
/// the combined body of every member is false once the members of `S` are
/// read as false. With `itp` a founded model all members are undefined;
/// with `itp` a 2-valued model, true members show the model unstable.
pub fn self_false(itp: &Interpretation, cp: &CompletedProgram) -> SelfFalseSet {
    let bodies = cp.combined_bodies();
    let mut set: SelfFalseSet = bodies
        .keys()
        .filter(|a| cp.decl(&a.predicate).closed && itp.get(a) != TruthValue::False)
        .map(|a| (*a).clone())
        .collect();
    loop {
        let drop: Vec<GroundAtom> = set
            .iter()
            .filter(|a| eval_assuming(bodies[a], itp, &set) != TruthValue::False)
            .cloned()
            .collect();
        if drop.is_empty() {
            return set;
        }
        for a in drop {
            set.remove(&a);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureRun {
    pub interpretation: Interpretation,
    /// Rounds that found new self-false atoms.
    pub iterations: usize,
    pub self_false: Vec<GroundAtom>,
}

/// Alternate founded evaluation and self-false detection until no undefined
/// atom of a closed predicate is self-false.
pub fn wfs_by_closure(prepared: &Prepared) -> ClosureRun {
    let mut cp = prepared.completed.clone();
    let mut iterations = 0;
    loop {
        let itp = linear_lfp(&cp, &prepared.sccs, FiringOrder::Fifo).interpretation;
        let found: Vec<GroundAtom> = self_false(&itp, &cp)
            .into_iter()
            .filter(|a| itp.get(a) == TruthValue::Undefined)
            .collect();
        if found.is_empty() || !itp.is_consistent() {
            return ClosureRun { interpretation: itp, iterations, self_false: cp.assumed_false };
        }
        iterations += 1;
        cp.assumed_false.extend(found);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::language::resolve_declarations;
    use crate::pipeline::close_all;

    fn closed(text: &str) -> Prepared {
        let resolved = resolve_declarations(&parse_program(text).unwrap()).unwrap();
        Prepared::new(&close_all(&resolved)).unwrap()
    }

    fn atom(p: &str) -> GroundAtom {
        GroundAtom::prop(p)
    }

    #[test]
    fn positive_loop_is_self_false() {
        let p = closed("uncertain q. q <- q.");
        let itp = p.founded().interpretation;
        assert_eq!(itp.get(&atom("q")), TruthValue::Undefined);
        assert_eq!(self_false(&itp, &p.completed), [atom("q")].into());
        assert_eq!(wfs_by_closure(&p).interpretation.get(&atom("q")), TruthValue::False);
    }

    #[test]
    fn negative_loop_is_not_self_false() {
        let p = closed("q <- not q.");
        let itp = p.founded().interpretation;
        assert!(self_false(&itp, &p.completed).is_empty());
        let run = wfs_by_closure(&p);
        assert_eq!(run.interpretation.get(&atom("q")), TruthValue::Undefined);
        assert_eq!(run.iterations, 0);
    }

    #[test]
    fn program8_becomes_false() {
        let run = wfs_by_closure(&closed("q <- not q and q."));
        assert_eq!(run.interpretation.get(&atom("q")), TruthValue::False);
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn program7_stays_undefined() {
        let run = wfs_by_closure(&closed("q <- not q. q <- q."));
        assert_eq!(run.interpretation.get(&atom("q")), TruthValue::Undefined);
    }

    #[test]
    fn two_valued_founded_has_no_self_false() {
        let p = closed("p. q <- p.");
        assert!(self_false(&p.founded().interpretation, &p.completed).is_empty());
    }

    #[test]
    fn without_closed_predicates_nothing_changes() {
        let p = Prepared::new(&parse_program("q <- q and not r. r <- not r.").unwrap()).unwrap();
        let run = wfs_by_closure(&p);
        assert_eq!(run.iterations, 0);
        assert_eq!(run.interpretation, p.founded().interpretation);
    }

    #[test]
    fn greatest_set_is_maximal() {
        // p and q support each other; r needs not p; s is independent.
        let p = closed("p <- q and not s. q <- p. r <- not r and not p. s <- not t. t <- not s.");
        let itp = p.founded().interpretation;
        let set = self_false(&itp, &p.completed);
        assert!(set.contains(&atom("p")) && set.contains(&atom("q")));
        let bodies = p.completed.combined_bodies();
        for a in itp.undefined() {
            if set.contains(a) {
                continue;
            }
            let mut bigger = set.clone();
            bigger.insert(a.clone());
            let holds = bigger.iter().all(|b| eval_assuming(bodies[b], &itp, &bigger) == TruthValue::False);
            assert!(!holds, "{a} could be added");
        }
    }

    #[test]
    fn even_chain_after_closure_equals_founded() {
        let text = "even(n) <- succ(m,n) and not even(m). even(0). succ(0,1). succ(1,2). succ(2,3).";
        let p = closed(text);
        let run = wfs_by_closure(&p);
        assert_eq!(run.interpretation, p.founded().interpretation);
    }
}
