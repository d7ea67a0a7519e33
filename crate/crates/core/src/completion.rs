//! Program completion at the ground level.
//!
//! For every ground atom `A` of an uncertain, complete predicate the given
//! positive rules and facts concluding `A` are combined into a single rule
//! `A <- B1 or .. or Bm`, and an inverse rule `not A <- dual(B1 or .. or Bm)`
//! defines the negation explicitly. Negative facts and rules, and rules of
//! predicates that are not complete, are copied unchanged. Finally negation
//! is pushed down to literals so that `not p(c)` can be read as a positive
//! atom `n.p(c)` of a doubled predicate space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::grounder::{atoms_over, GroundExpr, GroundLiteral, GroundProgram, GroundRule};
use crate::language::{Constant, GroundAtom, PredicateDecl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Combined,
    Inverse,
    Passthrough,
}

impl RuleKind {
    fn prefix(self) -> &'static str {
        match self {
            RuleKind::Combined => "c",
            RuleKind::Inverse => "i",
            RuleKind::Passthrough => "p",
        }
    }
}

/// Identifies one rule of a completed program, e.g. `c3` or `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId {
    pub kind: RuleKind,
    pub index: usize,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

/// A positive or negated ground atom, `p(c)` or `n.p(c)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DoubledAtom {
    pub atom: GroundAtom,
    pub negated: bool,
}

impl fmt::Display for DoubledAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("n.")?;
        }
        self.atom.fmt(f)
    }
}

/// The bijection between negative literals and `n.`-atoms.
pub struct NegRenaming;

impl NegRenaming {
    pub fn rename(lit: &GroundLiteral) -> DoubledAtom {
        DoubledAtom { atom: lit.atom.clone(), negated: !lit.positive }
    }

    pub fn restore(atom: &DoubledAtom) -> GroundLiteral {
        GroundLiteral { atom: atom.atom.clone(), positive: !atom.negated }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletedProgram {
    /// One rule per ground atom of each complete predicate.
    pub combined: Vec<GroundRule>,
    /// Heads are negative literals (`n.`-atoms), parallel to `combined`.
    pub inverse: Vec<GroundRule>,
    pub passthrough: Vec<GroundRule>,
    /// Positive facts of predicates that are not complete, and all negative facts.
    pub facts: Vec<GroundLiteral>,
    /// Atoms of closed predicates made false as self-false.
    pub assumed_false: Vec<GroundAtom>,
    pub decls: BTreeMap<String, PredicateDecl>,
    pub domain: Vec<Constant>,
    pub predicates: BTreeMap<String, usize>,
    /// Set once every body is negation-free over the doubled atom space.
    pub renamed: bool,
}

impl CompletedProgram {
    pub fn decl(&self, predicate: &str) -> PredicateDecl {
        self.decls.get(predicate).copied().unwrap_or_default()
    }

    pub fn rules(&self) -> impl Iterator<Item = (RuleId, &GroundRule)> {
        let tag = |kind| move |(index, r)| (RuleId { kind, index }, r);
        self.combined
            .iter()
            .enumerate()
            .map(tag(RuleKind::Combined))
            .chain(self.inverse.iter().enumerate().map(tag(RuleKind::Inverse)))
            .chain(self.passthrough.iter().enumerate().map(tag(RuleKind::Passthrough)))
    }

    pub fn rule(&self, id: RuleId) -> &GroundRule {
        match id.kind {
            RuleKind::Combined => &self.combined[id.index],
            RuleKind::Inverse => &self.inverse[id.index],
            RuleKind::Passthrough => &self.passthrough[id.index],
        }
    }

    pub fn atoms_of(&self, predicate: &str) -> Vec<GroundAtom> {
        atoms_over(&self.domain, predicate, self.predicates.get(predicate).copied().unwrap_or(0))
    }

    pub fn herbrand_base(&self) -> Vec<GroundAtom> {
        self.predicates.keys().flat_map(|p| self.atoms_of(p)).collect()
    }

    /// Combined rule bodies keyed by head atom.
    pub fn combined_bodies(&self) -> BTreeMap<&GroundAtom, &GroundExpr> {
        self.combined.iter().map(|r| (&r.head.atom, &r.body)).collect()
    }

    /// Node count; once renamed, an `n.`-atom counts as a single literal.
    pub fn size(&self) -> usize {
        fn expr(e: &GroundExpr, renamed: bool) -> usize {
            match e {
                GroundExpr::Lit(_) if renamed => 1,
                GroundExpr::And(xs) | GroundExpr::Or(xs) => {
                    1 + xs.iter().map(|x| expr(x, renamed)).sum::<usize>()
                }
                GroundExpr::Not(x) => 1 + expr(x, renamed),
                other => other.size(),
            }
        }
        let lit = |l: &GroundLiteral| expr(&GroundExpr::Lit(l.clone()), self.renamed);
        self.rules().map(|(_, r)| lit(&r.head) + expr(&r.body, self.renamed)).sum::<usize>()
            + self.facts.iter().map(lit).sum::<usize>()
    }

    /// Text in the rule grammar, with `n.`-prefixed names once renamed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            let text = if self.renamed { f.renamed() } else { f.to_string() };
            out.push_str(&format!("{text}.\n"));
        }
        for (id, r) in self.rules() {
            out.push_str(&format!("{} % {id}\n", r.render(self.renamed)));
        }
        out
    }
}

/// Build one combined rule per ground atom of every complete predicate.
pub fn combine(gp: &GroundProgram, decls: &BTreeMap<String, PredicateDecl>) -> CompletedProgram {
    let complete: BTreeSet<&String> =
        decls.iter().filter(|(_, d)| d.is_complete()).map(|(p, _)| p).collect();
    let is_complete = |p: &String| complete.contains(p);

    let mut bodies: BTreeMap<&GroundAtom, Vec<GroundExpr>> = BTreeMap::new();
    let mut passthrough = Vec::new();
    for r in &gp.rules {
        if r.head.positive && is_complete(&r.head.atom.predicate) {
            bodies.entry(&r.head.atom).or_default().push(r.body.clone());
        } else {
            passthrough.push(r.clone());
        }
    }
    let mut facts = Vec::new();
    for f in &gp.facts {
        if f.positive && is_complete(&f.atom.predicate) {
            bodies.entry(&f.atom).or_default().push(GroundExpr::Const(true));
        } else {
            facts.push(f.clone());
        }
    }

    let mut combined = Vec::new();
    for p in &complete {
        for atom in atoms_over(&gp.domain, p, gp.predicates.get(*p).copied().unwrap_or(0)) {
            let mut parts = bodies.remove(&atom).unwrap_or_default();
            let body = if parts.len() == 1 && parts[0] != GroundExpr::Const(true) {
                parts.pop().unwrap()
            } else {
                GroundExpr::or(parts)
            };
            combined.push(GroundRule { head: GroundLiteral::pos(atom), body, source: None });
        }
    }

    CompletedProgram {
        combined,
        inverse: Vec::new(),
        passthrough,
        facts,
        assumed_false: Vec::new(),
        decls: decls.clone(),
        domain: gp.domain.clone(),
        predicates: gp.predicates.clone(),
        renamed: false,
    }
}

/// De Morgan dual: swaps conjunction and disjunction, `true` and `false`,
/// and flips the sign of every literal. `dual(dual(b)) == b`.
pub fn dual(e: &GroundExpr) -> GroundExpr {
    match e {
        GroundExpr::Const(b) => GroundExpr::Const(!b),
        GroundExpr::Lit(l) => GroundExpr::Lit(l.negate()),
        GroundExpr::And(xs) => GroundExpr::Or(xs.iter().map(dual).collect()),
        GroundExpr::Or(xs) => GroundExpr::And(xs.iter().map(dual).collect()),
        GroundExpr::Not(x) => GroundExpr::Not(Box::new(dual(x))),
    }
}

/// Add `not A <- dual(B)` for every combined rule `A <- B`.
pub fn add_inverse_rules(mut cp: CompletedProgram) -> CompletedProgram {
    cp.inverse = cp
        .combined
        .iter()
        .map(|r| GroundRule { head: r.head.negate(), body: dual(&r.body), source: None })
        .collect();
    cp
}

/// Negation normal form: `not` nodes pushed down into literal signs.
pub fn push_negation(e: &GroundExpr, positive: bool) -> GroundExpr {
    match e {
        GroundExpr::Const(b) => GroundExpr::Const(*b == positive),
        GroundExpr::Lit(l) => GroundExpr::Lit(if positive { l.clone() } else { l.negate() }),
        GroundExpr::And(xs) => {
            let ys = xs.iter().map(|x| push_negation(x, positive)).collect();
            if positive {
                GroundExpr::And(ys)
            } else {
                GroundExpr::Or(ys)
            }
        }
        GroundExpr::Or(xs) => {
            let ys = xs.iter().map(|x| push_negation(x, positive)).collect();
            if positive {
                GroundExpr::Or(ys)
            } else {
                GroundExpr::And(ys)
            }
        }
        GroundExpr::Not(x) => push_negation(x, !positive),
    }
}

/// Eliminate `not` nodes everywhere, so each negative literal stands for its
/// `n.`-atom and the program is positive over the doubled atom space.
pub fn rename_negations(mut cp: CompletedProgram) -> CompletedProgram {
    for r in cp.combined.iter_mut().chain(cp.inverse.iter_mut()).chain(cp.passthrough.iter_mut()) {
        if r.body.has_not() {
            r.body = push_negation(&r.body, true);
        }
    }
    cp.renamed = true;
    cp
}

/// Combine, add inverse rules and rename negation.
pub fn complete(gp: &GroundProgram, decls: &BTreeMap<String, PredicateDecl>) -> CompletedProgram {
    rename_negations(add_inverse_rules(combine(gp, decls)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::ground;
    use crate::language::resolve_declarations;
    use crate::parser::parse_program;

    fn completed(text: &str) -> CompletedProgram {
        let p = resolve_declarations(&parse_program(text).unwrap()).unwrap();
        complete(&ground(&p), &p.decls)
    }

    fn lines(cp: &CompletedProgram, kind: RuleKind) -> Vec<String> {
        cp.rules().filter(|(id, _)| id.kind == kind).map(|(_, r)| r.render(cp.renamed)).collect()
    }

    #[test]
    fn program7_combined() {
        let cp = completed("q <- not q. q <- q.");
        assert_eq!(lines(&cp, RuleKind::Combined), vec!["q <- n.q or q."]);
        assert_eq!(lines(&cp, RuleKind::Inverse), vec!["n.q <- q and n.q."]);
    }

    #[test]
    fn atom_without_rules_is_false() {
        let cp = completed("p(1) <- not p(1). p(2) <- p(2) and not p(1). q(3).");
        let c = lines(&cp, RuleKind::Combined);
        assert!(c.contains(&"p(3) <- false.".to_string()), "{c:?}");
        assert!(lines(&cp, RuleKind::Inverse).contains(&"n.p(3) <- true.".to_string()));
    }

    #[test]
    fn barber_inverse() {
        let cp = completed("shave('barber',x) <- man(x) and not shave(x,x). man('barber').");
        assert_eq!(
            lines(&cp, RuleKind::Inverse),
            vec!["n.shave('barber','barber') <- n.man('barber') or shave('barber','barber')."]
        );
    }

    #[test]
    fn reachability_combined_and_inverse() {
        let cp = completed("uncertain reach. source(1). edge(1,2). reach(x) <- source(x). reach(y) <- edge(x,y) and reach(x).");
        let c = lines(&cp, RuleKind::Combined);
        assert_eq!(
            c,
            vec![
                "reach(1) <- source(1) or edge(1,1) and reach(1) or edge(2,1) and reach(2).",
                "reach(2) <- source(2) or edge(1,2) and reach(1) or edge(2,2) and reach(2).",
            ]
        );
        assert_eq!(
            lines(&cp, RuleKind::Inverse)[0],
            "n.reach(1) <- n.source(1) and (n.edge(1,1) or n.reach(1)) and (n.edge(2,1) or n.reach(2))."
        );
    }

    #[test]
    fn facts_fold_into_combined() {
        let cp = completed("even(n) <- succ(m,n) and not even(m). even(0). succ(0,1).");
        let c = lines(&cp, RuleKind::Combined);
        assert_eq!(c[0], "even(0) <- true.");
        assert!(cp.facts.iter().all(|f| f.atom.predicate == "succ"));
    }

    #[test]
    fn negative_facts_and_rules_pass_through() {
        let cp = completed(
            "uncertain alive, loaded. incomplete alive, loaded. alive(0). not loaded(0). \
             loaded(1) <- true. not alive(3) <- loaded(2).",
        );
        assert!(cp.combined.is_empty() && cp.inverse.is_empty());
        let facts: Vec<String> = cp.facts.iter().map(|f| f.renamed()).collect();
        assert!(facts.contains(&"n.loaded(0)".to_string()));
        let p = lines(&cp, RuleKind::Passthrough);
        assert!(p.contains(&"n.alive(3) <- loaded(2).".to_string()));
    }

    #[test]
    fn negative_rule_of_complete_predicate_not_combined() {
        let cp = completed("q <- not q. not q <- r. r.");
        assert_eq!(lines(&cp, RuleKind::Combined), vec!["q <- n.q."]);
        assert_eq!(lines(&cp, RuleKind::Passthrough), vec!["n.q <- r."]);
    }

    #[test]
    fn positive_program_unchanged_by_renaming() {
        let p = resolve_declarations(&parse_program("p(1). q(x) <- p(x).").unwrap()).unwrap();
        let before = add_inverse_rules(combine(&ground(&p), &p.decls));
        let after = rename_negations(before.clone());
        assert_eq!(before.passthrough, after.passthrough);
        assert!(before.combined.is_empty());
    }

    #[test]
    fn nested_not_eliminated() {
        let cp = completed("uncertain q. q <- not (p and not r). p. r.");
        assert!(cp.rules().all(|(_, r)| !r.body.has_not()));
        assert_eq!(lines(&cp, RuleKind::Combined), vec!["q <- n.p or r."]);
    }

    #[test]
    fn one_pair_per_atom() {
        let cp = completed("move(1,2). move(2,3). win(x) <- move(x,y) and not win(y).");
        assert_eq!(cp.combined.len(), 3);
        assert_eq!(cp.inverse.len(), 3);
        for (c, i) in cp.combined.iter().zip(&cp.inverse) {
            assert_eq!(c.head.atom, i.head.atom);
            assert_eq!(i.body, dual(&c.body));
        }
    }
}
