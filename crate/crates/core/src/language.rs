//! Abstract syntax for rules, facts and predicate declarations, together with
//! declaration resolution and the predicate dependency graph.
//!
//! A program is a finite set of rules `Q(X..) <- body`, ground facts, and
//! per-predicate declarations. Each predicate is either *certain* (two-valued)
//! or *uncertain* (three-valued); an uncertain predicate that concludes some
//! rule is *complete* or *incomplete*; an uncertain complete predicate may in
//! addition be *closed*.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// A constant symbol. Numerals order before quoted strings, numerals
/// numerically and strings lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constant {
    Num(u64),
    Str(String),
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Num(n) => write!(f, "{n}"),
            Constant::Str(s) => write!(f, "'{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(Constant),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    /// The ground atom, if every argument is a constant.
    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom { predicate: self.predicate.clone(), args })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        write_args(f, &self.args)
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        a.fmt(f)?;
    }
    f.write_str(")")
}

/// A variable-free atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<Constant>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<Constant>) -> Self {
        GroundAtom { predicate: predicate.into(), args }
    }

    /// Zero-arity atom.
    pub fn prop(predicate: impl Into<String>) -> Self {
        GroundAtom { predicate: predicate.into(), args: Vec::new() }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        write_args(f, &self.args)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        self.atom.fmt(f)
    }
}

/// Rule hypothesis: literals combined with connectives and quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HypExpr {
    Const(bool),
    Lit(Literal),
    And(Vec<HypExpr>),
    Or(Vec<HypExpr>),
    Not(Box<HypExpr>),
    Exists(Vec<String>, Box<HypExpr>),
    Forall(Vec<String>, Box<HypExpr>),
}

impl HypExpr {
    /// Free variables, sorted.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            HypExpr::Const(_) => {}
            HypExpr::Lit(l) => {
                for t in &l.atom.args {
                    if let Term::Var(v) = t {
                        if !bound.contains(v) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            HypExpr::And(xs) | HypExpr::Or(xs) => {
                xs.iter().for_each(|x| x.collect_free(bound, out));
            }
            HypExpr::Not(x) => x.collect_free(bound, out),
            HypExpr::Exists(vs, x) | HypExpr::Forall(vs, x) => {
                let depth = bound.len();
                bound.extend(vs.iter().cloned());
                x.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    /// Visit every literal together with its effective polarity: a literal is
    /// effectively positive when its own sign and the enclosing `not` nodes
    /// cancel out.
    pub fn for_each_literal<'a>(&'a self, f: &mut impl FnMut(&'a Literal, bool)) {
        self.walk_literals(true, f);
    }

    fn walk_literals<'a>(&'a self, polarity: bool, f: &mut impl FnMut(&'a Literal, bool)) {
        match self {
            HypExpr::Const(_) => {}
            HypExpr::Lit(l) => f(l, l.positive == polarity),
            HypExpr::And(xs) | HypExpr::Or(xs) => {
                xs.iter().for_each(|x| x.walk_literals(polarity, f));
            }
            HypExpr::Not(x) => x.walk_literals(!polarity, f),
            HypExpr::Exists(_, x) | HypExpr::Forall(_, x) => x.walk_literals(polarity, f),
        }
    }

    /// Variables bound by a quantifier while already in scope.
    fn collect_shadowing(&self, scope: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            HypExpr::Const(_) | HypExpr::Lit(_) => {}
            HypExpr::And(xs) | HypExpr::Or(xs) => {
                xs.iter().for_each(|x| x.collect_shadowing(scope, out));
            }
            HypExpr::Not(x) => x.collect_shadowing(scope, out),
            HypExpr::Exists(vs, x) | HypExpr::Forall(vs, x) => {
                out.extend(vs.iter().filter(|v| scope.contains(v)).cloned());
                let depth = scope.len();
                scope.extend(vs.iter().cloned());
                x.collect_shadowing(scope, out);
                scope.truncate(depth);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Literal,
    pub body: HypExpr,
}

impl Rule {
    pub fn new(head: Literal, body: HypExpr) -> Self {
        Rule { head, body }
    }

    /// Variables of the conclusion that do not occur free in the body.
    pub fn unbound_head_vars(&self) -> Vec<String> {
        let free = self.body.free_vars();
        let mut out = Vec::new();
        for t in &self.head.atom.args {
            if let Term::Var(v) = t {
                if !free.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Number of free variables; the grounder instantiates each over the domain.
    pub fn num_vars(&self) -> usize {
        self.body.free_vars().len()
    }
}

/// A ground fact, possibly negative.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub atom: GroundAtom,
    pub positive: bool,
}

impl Fact {
    pub fn pos(atom: GroundAtom) -> Self {
        Fact { atom, positive: true }
    }

    pub fn neg(atom: GroundAtom) -> Self {
        Fact { atom, positive: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Certainty {
    Certain,
    Uncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Completeness {
    Complete,
    Incomplete,
    NotApplicable,
}

/// Declarations for one predicate. `None` means "use the default"; after
/// [`resolve_declarations`] both options are filled in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct PredicateDecl {
    pub certainty: Option<Certainty>,
    pub completeness: Option<Completeness>,
    pub closed: bool,
}

impl PredicateDecl {
    pub fn is_certain(&self) -> bool {
        self.certainty == Some(Certainty::Certain)
    }

    pub fn is_complete(&self) -> bool {
        self.completeness == Some(Completeness::Complete)
    }

    pub fn is_resolved(&self) -> bool {
        self.certainty.is_some() && self.completeness.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub decls: BTreeMap<String, PredicateDecl>,
    pub rules: Vec<Rule>,
    pub facts: Vec<Fact>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeclarationError {
    #[error("predicate {predicate} is used with arities {first} and {second}")]
    ArityMismatch { predicate: String, first: usize, second: usize },
    #[error("predicate {0} is declared but never used in a rule or fact")]
    UnknownPredicate(String),
    #[error("predicate {0} cannot be certain: it is defined transitively using its own negation")]
    CertainSelfNegation(String),
    #[error("predicate {predicate} cannot be certain: it is defined using uncertain predicate {uses}")]
    CertainUsesUncertain { predicate: String, uses: String },
    #[error("predicate {0} is declared both certain and uncertain")]
    ConflictingCertainty(String),
    #[error("predicate {0} may be declared complete or incomplete only if it is uncertain and concludes some rule")]
    CompletenessNotApplicable(String),
    #[error("predicate {0} may be declared closed only if it is uncertain and complete")]
    ClosedRequiresComplete(String),
    #[error("rule concluding {predicate} uses variable {var} that does not occur in its hypotheses")]
    UnboundHeadVariable { predicate: String, var: String },
}

impl Program {
    /// Predicate arities in first-use order checked for consistency.
    pub fn arities(&self) -> Result<BTreeMap<String, usize>, DeclarationError> {
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        let mut record = |p: &str, n: usize| match out.get(p) {
            Some(&m) if m != n => Err(DeclarationError::ArityMismatch {
                predicate: p.to_string(),
                first: m,
                second: n,
            }),
            Some(_) => Ok(()),
            None => {
                out.insert(p.to_string(), n);
                Ok(())
            }
        };
        for f in &self.facts {
            record(&f.atom.predicate, f.atom.args.len())?;
        }
        for r in &self.rules {
            record(&r.head.atom.predicate, r.head.atom.args.len())?;
            let mut err = Ok(());
            r.body.for_each_literal(&mut |l, _| {
                if err.is_ok() {
                    err = record(&l.atom.predicate, l.atom.args.len());
                }
            });
            err?;
        }
        Ok(out)
    }

    /// Every predicate mentioned in a rule or fact.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in &self.facts {
            out.insert(f.atom.predicate.clone());
        }
        for r in &self.rules {
            out.insert(r.head.atom.predicate.clone());
            r.body.for_each_literal(&mut |l, _| {
                out.insert(l.atom.predicate.clone());
            });
        }
        out
    }

    /// Predicates concluding at least one rule (of either sign). Facts do not count.
    pub fn conclusion_predicates(&self) -> BTreeSet<String> {
        self.rules.iter().map(|r| r.head.atom.predicate.clone()).collect()
    }

    pub fn decl(&self, predicate: &str) -> PredicateDecl {
        self.decls.get(predicate).copied().unwrap_or_default()
    }

    pub fn is_resolved(&self) -> bool {
        self.predicates().iter().all(|p| self.decl(p).is_resolved())
    }

    /// Warnings for quantified variables that shadow a variable already in scope.
    pub fn shadowing_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rules {
            let mut scope: Vec<String> = r
                .head
                .atom
                .args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(v.clone()),
                    _ => None,
                })
                .collect();
            scope.extend(r.body.free_vars());
            let mut shadowed = Vec::new();
            r.body.collect_shadowing(&mut scope, &mut shadowed);
            for v in shadowed {
                out.push(format!(
                    "quantified variable {v} shadows an outer variable in a rule concluding {}",
                    r.head.atom.predicate
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Edges run from each hypothesis predicate to the conclusion predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: Vec<String>,
    pub edges: BTreeSet<(String, String, Polarity)>,
}

impl DependencyGraph {
    pub fn new(program: &Program) -> Self {
        let nodes: Vec<String> = program.predicates().into_iter().collect();
        let mut edges = BTreeSet::new();
        for r in &program.rules {
            let head = &r.head.atom.predicate;
            r.body.for_each_literal(&mut |l, effective_positive| {
                // A negative conclusion counts as a negative dependency on every hypothesis.
                let polarity = if effective_positive && r.head.positive {
                    Polarity::Positive
                } else {
                    Polarity::Negative
                };
                edges.insert((l.atom.predicate.clone(), head.clone(), polarity));
            });
        }
        DependencyGraph { nodes, edges }
    }

    fn index(&self) -> BTreeMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, Polarity)>> {
        let idx = self.index();
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (from, to, pol) in &self.edges {
            adj[idx[from.as_str()]].push((idx[to.as_str()], *pol));
        }
        adj
    }

    /// Strongly connected components, topologically sorted so that every
    /// component precedes the components depending on it. Among components
    /// whose dependencies are all placed, the one with the least predicate
    /// name goes first.
    pub fn scc_order(&self) -> Vec<Vec<String>> {
        let adj = self.adjacency();
        let succ: Vec<Vec<usize>> =
            adj.iter().map(|es| es.iter().map(|&(t, _)| t).collect()).collect();
        let comps = tarjan(&succ);
        let mut comp_of = vec![0; self.nodes.len()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                comp_of[v] = c;
            }
        }
        let mut indegree = vec![0usize; comps.len()];
        let mut out_edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
        for (v, ts) in succ.iter().enumerate() {
            for &t in ts {
                let (a, b) = (comp_of[v], comp_of[t]);
                if a != b && out_edges[a].insert(b) {
                    indegree[b] += 1;
                }
            }
        }
        // Node indices follow the sorted node names, so the least member index
        // is the least predicate name.
        let key: Vec<usize> = comps.iter().map(|m| *m.iter().min().unwrap()).collect();
        let mut ready: BTreeSet<(usize, usize)> =
            (0..comps.len()).filter(|&c| indegree[c] == 0).map(|c| (key[c], c)).collect();
        let mut order = Vec::with_capacity(comps.len());
        while let Some((_, c)) = ready.pop_first() {
            for &d in &out_edges[c] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.insert((key[d], d));
                }
            }
            let mut members: Vec<String> =
                comps[c].iter().map(|&v| self.nodes[v].clone()).collect();
            members.sort();
            order.push(members);
        }
        order
    }
}

/// Iterative Tarjan; returns components in discovery order.
fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// The transitive "defined using" relation: `(p, q) -> through_negation`
/// holds when `p` is defined using `q`, with the flag set when some
/// dependency path from `q` to `p` passes through a negative edge.
pub type DefinedUsing = BTreeMap<(String, String), bool>;

pub fn defined_using(program: &Program) -> DefinedUsing {
    let graph = DependencyGraph::new(program);
    let adj = graph.adjacency();
    let mut out = BTreeMap::new();
    for (src, _) in graph.nodes.iter().enumerate() {
        // States: (node, seen negative edge).
        let mut seen = vec![[false; 2]; graph.nodes.len()];
        let mut queue = VecDeque::new();
        for &(t, pol) in &adj[src] {
            let neg = (pol == Polarity::Negative) as usize;
            if !seen[t][neg] {
                seen[t][neg] = true;
                queue.push_back((t, neg));
            }
        }
        while let Some((v, neg)) = queue.pop_front() {
            for &(t, pol) in &adj[v] {
                let n2 = neg | (pol == Polarity::Negative) as usize;
                if !seen[t][n2] {
                    seen[t][n2] = true;
                    queue.push_back((t, n2));
                }
            }
        }
        for (t, s) in seen.iter().enumerate() {
            if s[0] || s[1] {
                out.insert((graph.nodes[t].clone(), graph.nodes[src].clone()), s[1]);
            }
        }
    }
    out
}

pub fn scc_order(program: &Program) -> Vec<Vec<String>> {
    DependencyGraph::new(program).scc_order()
}

/// Fill in every predicate's declarations, applying defaults and rejecting
/// declarations that violate the certainty and completeness restrictions.
///
/// Defaults: certain when allowed; complete for uncertain predicates that
/// conclude a rule; open. A `complete`, `incomplete` or `closed` declaration
/// without a certainty declaration implies `uncertain`.
pub fn resolve_declarations(program: &Program) -> Result<Program, DeclarationError> {
    program.arities()?;
    let preds = program.predicates();
    for p in program.decls.keys() {
        if !preds.contains(p) {
            return Err(DeclarationError::UnknownPredicate(p.clone()));
        }
    }
    for r in &program.rules {
        if let Some(var) = r.unbound_head_vars().into_iter().next() {
            return Err(DeclarationError::UnboundHeadVariable {
                predicate: r.head.atom.predicate.clone(),
                var,
            });
        }
    }
    let using = defined_using(program);
    let conclusions = program.conclusion_predicates();

    let implied_uncertain = |d: &PredicateDecl| {
        d.certainty == Some(Certainty::Uncertain)
            || matches!(d.completeness, Some(Completeness::Complete | Completeness::Incomplete))
            || d.closed
    };
    let self_negative = |p: &String| using.get(&(p.clone(), p.clone())) == Some(&true);

    for p in &preds {
        let d = program.decl(p);
        if d.certainty == Some(Certainty::Certain) {
            if self_negative(p) {
                return Err(DeclarationError::CertainSelfNegation(p.clone()));
            }
            if implied_uncertain(&d) {
                return Err(DeclarationError::ConflictingCertainty(p.clone()));
            }
        }
    }

    let mut uncertain: BTreeSet<String> = preds
        .iter()
        .filter(|p| implied_uncertain(&program.decl(p)) || self_negative(p))
        .cloned()
        .collect();
    // Anything defined using an uncertain predicate is uncertain too. The
    // relation is transitive, so one pass over the seeds suffices.
    let seeds: Vec<String> = uncertain.iter().cloned().collect();
    for (p, q) in using.keys() {
        if seeds.contains(q) && !uncertain.contains(p) {
            if program.decl(p).certainty == Some(Certainty::Certain) {
                return Err(DeclarationError::CertainUsesUncertain {
                    predicate: p.clone(),
                    uses: q.clone(),
                });
            }
            uncertain.insert(p.clone());
        }
    }

    let mut decls = BTreeMap::new();
    for p in &preds {
        let d = program.decl(p);
        let certainty =
            if uncertain.contains(p) { Certainty::Uncertain } else { Certainty::Certain };
        let eligible = certainty == Certainty::Uncertain && conclusions.contains(p);
        let completeness = match d.completeness {
            Some(c @ (Completeness::Complete | Completeness::Incomplete)) => {
                if !eligible {
                    return Err(DeclarationError::CompletenessNotApplicable(p.clone()));
                }
                c
            }
            _ if eligible => Completeness::Complete,
            _ => Completeness::NotApplicable,
        };
        if d.closed && completeness != Completeness::Complete {
            return Err(DeclarationError::ClosedRequiresComplete(p.clone()));
        }
        decls.insert(
            p.clone(),
            PredicateDecl {
                certainty: Some(certainty),
                completeness: Some(completeness),
                closed: d.closed,
            },
        );
    }
    Ok(Program { decls, rules: program.rules.clone(), facts: program.facts.clone() })
}

/// Whether `predicate` could legally be declared certain in `program`.
pub fn may_be_certain(program: &Program, predicate: &str) -> bool {
    let using = defined_using(program);
    let self_neg = |p: &str| using.get(&(p.to_string(), p.to_string())) == Some(&true);
    if self_neg(predicate) {
        return false;
    }
    !using.keys().any(|(p, q)| p == predicate && self_neg(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn resolved(text: &str) -> Program {
        resolve_declarations(&parse_program(text).unwrap()).unwrap()
    }

    const WIN: &str = "move(1,2). move(2,3). win(x) <- move(x,y) and not win(y).";
    const REACH: &str = "source(1). edge(1,2). reach(x) <- source(x). reach(y) <- edge(x,y) and reach(x).";

    #[test]
    fn win_defaults() {
        let p = resolved(WIN);
        assert_eq!(p.decl("move").certainty, Some(Certainty::Certain));
        assert_eq!(p.decl("move").completeness, Some(Completeness::NotApplicable));
        let win = p.decl("win");
        assert_eq!(win.certainty, Some(Certainty::Uncertain));
        assert_eq!(win.completeness, Some(Completeness::Complete));
        assert!(!win.closed);
    }

    #[test]
    fn reachability_defaults_all_certain() {
        let p = resolved(REACH);
        for q in ["source", "edge", "reach"] {
            assert!(p.decl(q).is_certain(), "{q}");
        }
    }

    #[test]
    fn certain_self_negation_rejected() {
        let p = parse_program("certain q. q <- not q.").unwrap();
        assert_eq!(
            resolve_declarations(&p),
            Err(DeclarationError::CertainSelfNegation("q".into()))
        );
    }

    #[test]
    fn certain_using_uncertain_rejected() {
        let p = parse_program("certain r. q <- not q. r <- q.").unwrap();
        assert!(matches!(
            resolve_declarations(&p),
            Err(DeclarationError::CertainUsesUncertain { .. })
        ));
    }

    #[test]
    fn completeness_requires_conclusion() {
        let p = parse_program("uncertain p. complete p. q <- not p.").unwrap();
        assert_eq!(
            resolve_declarations(&p),
            Err(DeclarationError::CompletenessNotApplicable("p".into()))
        );
    }

    #[test]
    fn closed_requires_complete() {
        let p = parse_program("incomplete q. closed q. q <- q.").unwrap();
        assert_eq!(resolve_declarations(&p), Err(DeclarationError::ClosedRequiresComplete("q".into())));
        let p = resolved("closed q. q <- q.");
        assert_eq!(p.decl("q").certainty, Some(Certainty::Uncertain));
        assert!(p.decl("q").is_complete());
    }

    #[test]
    fn unknown_declared_predicate() {
        let p = parse_program("certain foo. q <- q.").unwrap();
        assert_eq!(resolve_declarations(&p), Err(DeclarationError::UnknownPredicate("foo".into())));
    }

    #[test]
    fn resolve_is_idempotent() {
        for text in [WIN, REACH, "q <- not p. p <- not q.", "closed q. q <- q and not q."] {
            let once = resolved(text);
            assert_eq!(resolve_declarations(&once).unwrap(), once);
        }
    }

    #[test]
    fn defined_using_examples() {
        let p = resolved(WIN);
        let du = defined_using(&p);
        assert_eq!(du.get(&("win".into(), "win".into())), Some(&true));
        // move reaches win directly, and also through win's own negation.
        assert_eq!(du.get(&("win".into(), "move".into())), Some(&true));
        let du = defined_using(&resolved("p(1). q(x) <- p(x). r(x) <- q(x) and not p(x)."));
        assert_eq!(du.get(&("q".into(), "p".into())), Some(&false));
        assert_eq!(du.get(&("r".into(), "p".into())), Some(&true));

        let du = defined_using(&resolved("q <- not p. p <- not q."));
        assert_eq!(du.get(&("q".into(), "q".into())), Some(&true));
        assert_eq!(resolved("q <- not p. p <- not q.").decl("q").certainty, Some(Certainty::Uncertain));

        let du = defined_using(&resolved(REACH));
        assert_eq!(du.get(&("reach".into(), "reach".into())), Some(&false));
    }

    #[test]
    fn scc_order_examples() {
        let order = scc_order(&resolved(REACH));
        assert_eq!(order.len(), 3);
        assert_eq!(order.last().unwrap(), &vec!["reach".to_string()]);

        let yale = "uncertain alive, loaded. incomplete alive, loaded. alive(0). not loaded(0). \
                    loaded(1) <- true. not alive(3) <- loaded(2).";
        let order = scc_order(&resolved(yale));
        assert_eq!(order, vec![vec!["loaded".to_string()], vec!["alive".to_string()]]);

        assert_eq!(scc_order(&resolved("q <- q.")), vec![vec!["q".to_string()]]);
        assert_eq!(
            scc_order(&resolved("q <- not p. p <- not q.")),
            vec![vec!["p".to_string(), "q".to_string()]]
        );
    }

    #[test]
    fn double_negation_is_positive_dependency() {
        let p = resolved("q <- not (not q).");
        assert!(p.decl("q").is_certain());
    }

    #[test]
    fn shadowing_warns() {
        let p = parse_program("p(x) <- q(x) and (some x | q(x)).").unwrap();
        assert_eq!(p.shadowing_warnings().len(), 1);
        let p = parse_program("p(x) <- q(x) and (some y | q(y)).").unwrap();
        assert!(p.shadowing_warnings().is_empty());
    }

    #[test]
    fn may_be_certain_check() {
        let p = parse_program("shave('barber',x) <- man(x) and not shave(x,x). man('barber').").unwrap();
        assert!(may_be_certain(&p, "man"));
        assert!(!may_be_certain(&p, "shave"));
    }
}
