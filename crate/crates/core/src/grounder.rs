//! Naive grounding over the constant domain.
//!
//! Every rule is instantiated once per assignment of its free variables to
//! domain constants; quantifiers become finite disjunctions/conjunctions.
//! The only simplification is folding of the constants `true`/`false`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::language::{Constant, GroundAtom, HypExpr, Literal, Program, Term};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn pos(atom: GroundAtom) -> Self {
        GroundLiteral { atom, positive: true }
    }

    pub fn neg(atom: GroundAtom) -> Self {
        GroundLiteral { atom, positive: false }
    }

    pub fn negate(&self) -> Self {
        GroundLiteral { atom: self.atom.clone(), positive: !self.positive }
    }

    /// `n.p(..)` for negative literals, as in a completed program with
    /// negation renamed away.
    pub fn renamed(&self) -> String {
        if self.positive {
            self.atom.to_string()
        } else {
            format!("n.{}", self.atom)
        }
    }

    fn size(&self) -> usize {
        if self.positive {
            1
        } else {
            2
        }
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("not ")?;
        }
        self.atom.fmt(f)
    }
}

/// Variable-free hypothesis tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroundExpr {
    Const(bool),
    Lit(GroundLiteral),
    And(Vec<GroundExpr>),
    Or(Vec<GroundExpr>),
    Not(Box<GroundExpr>),
}

impl GroundExpr {
    /// Conjunction with `true` operands dropped and `false` absorbing.
    pub fn and(children: Vec<GroundExpr>) -> GroundExpr {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match c {
                GroundExpr::Const(true) => {}
                GroundExpr::Const(false) => return GroundExpr::Const(false),
                other => kept.push(other),
            }
        }
        if kept.is_empty() {
            GroundExpr::Const(true)
        } else {
            GroundExpr::And(kept)
        }
    }

    /// Disjunction with `false` operands dropped and `true` absorbing.
    pub fn or(children: Vec<GroundExpr>) -> GroundExpr {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match c {
                GroundExpr::Const(false) => {}
                GroundExpr::Const(true) => return GroundExpr::Const(true),
                other => kept.push(other),
            }
        }
        if kept.is_empty() {
            GroundExpr::Const(false)
        } else {
            GroundExpr::Or(kept)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: GroundExpr) -> GroundExpr {
        match child {
            GroundExpr::Const(b) => GroundExpr::Const(!b),
            other => GroundExpr::Not(Box::new(other)),
        }
    }

    /// Node count: literals (a negative literal counts its negation node),
    /// constants, and connectives.
    pub fn size(&self) -> usize {
        match self {
            GroundExpr::Const(_) => 1,
            GroundExpr::Lit(l) => l.size(),
            GroundExpr::And(xs) | GroundExpr::Or(xs) => 1 + xs.iter().map(GroundExpr::size).sum::<usize>(),
            GroundExpr::Not(x) => 1 + x.size(),
        }
    }

    pub fn for_each_literal<'a>(&'a self, f: &mut impl FnMut(&'a GroundLiteral)) {
        match self {
            GroundExpr::Const(_) => {}
            GroundExpr::Lit(l) => f(l),
            GroundExpr::And(xs) | GroundExpr::Or(xs) => xs.iter().for_each(|x| x.for_each_literal(f)),
            GroundExpr::Not(x) => x.for_each_literal(f),
        }
    }

    pub fn has_not(&self) -> bool {
        match self {
            GroundExpr::Const(_) | GroundExpr::Lit(_) => false,
            GroundExpr::And(xs) | GroundExpr::Or(xs) => xs.iter().any(GroundExpr::has_not),
            GroundExpr::Not(_) => true,
        }
    }

    /// Text in the rule grammar; with `renamed`, negative literals print as `n.p`.
    pub fn render(&self, renamed: bool) -> String {
        match self {
            GroundExpr::Or(xs) if xs.len() > 1 => xs
                .iter()
                .map(|x| match x {
                    GroundExpr::Or(_) => format!("({})", x.render(renamed)),
                    _ => x.render(renamed),
                })
                .collect::<Vec<_>>()
                .join(" or "),
            GroundExpr::And(xs) if xs.len() > 1 => {
                xs.iter().map(|x| x.render_unit(renamed)).collect::<Vec<_>>().join(" and ")
            }
            GroundExpr::And(xs) | GroundExpr::Or(xs) if xs.len() == 1 => xs[0].render(renamed),
            _ => self.render_unit(renamed),
        }
    }

    fn render_unit(&self, renamed: bool) -> String {
        match self {
            GroundExpr::Const(b) => b.to_string(),
            GroundExpr::Lit(l) if renamed => l.renamed(),
            GroundExpr::Lit(l) => l.to_string(),
            GroundExpr::Not(x) => format!("not ({})", x.render(renamed)),
            GroundExpr::And(xs) if xs.is_empty() => "true".into(),
            GroundExpr::Or(xs) if xs.is_empty() => "false".into(),
            _ => format!("({})", self.render(renamed)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRule {
    pub head: GroundLiteral,
    pub body: GroundExpr,
    /// Index of the source rule in the program; `None` for rules built by completion.
    pub source: Option<usize>,
}

impl GroundRule {
    pub fn size(&self) -> usize {
        self.head.size() + self.body.size()
    }

    pub fn render(&self, renamed: bool) -> String {
        let head = if renamed { self.head.renamed() } else { self.head.to_string() };
        format!("{head} <- {}.", self.body.render(renamed))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: Vec<GroundRule>,
    pub facts: Vec<GroundLiteral>,
    pub domain: Vec<Constant>,
    /// Arity of every predicate in the program.
    pub predicates: BTreeMap<String, usize>,
    pub size: usize,
}

impl GroundProgram {
    pub fn recompute_size(&self) -> usize {
        self.rules.iter().map(GroundRule::size).sum::<usize>()
            + self.facts.iter().map(GroundLiteral::size).sum::<usize>()
    }

    /// All ground atoms of `predicate` over the domain, in sorted order.
    pub fn atoms_of(&self, predicate: &str) -> Vec<GroundAtom> {
        let arity = self.predicates.get(predicate).copied().unwrap_or(0);
        atoms_over(&self.domain, predicate, arity)
    }

    /// The Herbrand base, sorted.
    pub fn herbrand_base(&self) -> Vec<GroundAtom> {
        self.predicates.keys().flat_map(|p| self.atoms_of(p)).collect()
    }

    pub fn herbrand_size(&self) -> usize {
        self.predicates
            .values()
            .map(|&a| self.domain.len().checked_pow(a as u32).unwrap_or(usize::MAX))
            .fold(0usize, |acc, n| acc.saturating_add(n))
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&format!("{f}.\n"));
        }
        for r in &self.rules {
            out.push_str(&r.render(false));
            out.push('\n');
        }
        out
    }
}

/// All atoms of `predicate` with the given arity over `domain`, sorted.
pub fn atoms_over(domain: &[Constant], predicate: &str, arity: usize) -> Vec<GroundAtom> {
    let mut out = Vec::new();
    for_each_tuple(domain, arity, |args| {
        out.push(GroundAtom { predicate: predicate.to_string(), args: args.to_vec() });
    });
    out
}

/// Calls `f` with every tuple in `domain^arity`, lexicographically.
fn for_each_tuple(domain: &[Constant], arity: usize, mut f: impl FnMut(&[Constant])) {
    if arity == 0 {
        f(&[]);
        return;
    }
    if domain.is_empty() {
        return;
    }
    let mut idx = vec![0usize; arity];
    let mut tuple: Vec<Constant> = vec![domain[0].clone(); arity];
    loop {
        f(&tuple);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < domain.len() {
                tuple[k] = domain[idx[k]].clone();
                break;
            }
            idx[k] = 0;
            tuple[k] = domain[0].clone();
        }
    }
}

/// Every constant occurring in facts and rules, sorted.
pub fn constant_domain(program: &Program) -> Vec<Constant> {
    let mut out = BTreeSet::new();
    for f in &program.facts {
        out.extend(f.atom.args.iter().cloned());
    }
    let mut add_atom = |args: &[Term]| {
        for t in args {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        }
    };
    for r in &program.rules {
        add_atom(&r.head.atom.args);
        r.body.for_each_literal(&mut |l, _| add_atom(&l.atom.args));
    }
    out.into_iter().collect()
}

struct Env<'a> {
    bindings: Vec<(&'a str, Constant)>,
}

impl<'a> Env<'a> {
    fn lookup(&self, v: &str) -> &Constant {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| *n == v)
            .map(|(_, c)| c)
            .unwrap_or_else(|| panic!("unbound variable {v} during grounding"))
    }

    fn literal(&self, l: &Literal) -> GroundLiteral {
        let args = l
            .atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => c.clone(),
                Term::Var(v) => self.lookup(v).clone(),
            })
            .collect();
        GroundLiteral {
            atom: GroundAtom { predicate: l.atom.predicate.clone(), args },
            positive: l.positive,
        }
    }
}

fn ground_expr<'a>(e: &'a HypExpr, env: &mut Env<'a>, domain: &[Constant]) -> GroundExpr {
    match e {
        HypExpr::Const(b) => GroundExpr::Const(*b),
        HypExpr::Lit(l) => GroundExpr::Lit(env.literal(l)),
        HypExpr::And(xs) => GroundExpr::and(xs.iter().map(|x| ground_expr(x, env, domain)).collect()),
        HypExpr::Or(xs) => GroundExpr::or(xs.iter().map(|x| ground_expr(x, env, domain)).collect()),
        HypExpr::Not(x) => GroundExpr::not(ground_expr(x, env, domain)),
        HypExpr::Exists(vs, body) | HypExpr::Forall(vs, body) => {
            let mut instances = Vec::new();
            let depth = env.bindings.len();
            for_each_tuple(domain, vs.len(), |tuple| {
                env.bindings.truncate(depth);
                env.bindings.extend(vs.iter().map(String::as_str).zip(tuple.iter().cloned()));
                instances.push(ground_expr(body, env, domain));
            });
            env.bindings.truncate(depth);
            if matches!(e, HypExpr::Exists(..)) {
                GroundExpr::or(instances)
            } else {
                GroundExpr::and(instances)
            }
        }
    }
}

/// Instantiate every rule over the constant domain.
pub fn ground(program: &Program) -> GroundProgram {
    let domain = constant_domain(program);
    let predicates = program.arities().unwrap_or_default();
    let mut rules = Vec::new();
    for (source, rule) in program.rules.iter().enumerate() {
        let vars: Vec<String> = rule.body.free_vars().into_iter().collect();
        for_each_tuple(&domain, vars.len(), |tuple| {
            let mut env = Env {
                bindings: vars.iter().map(String::as_str).zip(tuple.iter().cloned()).collect(),
            };
            let head = env.literal(&rule.head);
            let body = ground_expr(&rule.body, &mut env, &domain);
            rules.push(GroundRule { head, body, source: Some(source) });
        });
    }
    let facts: Vec<GroundLiteral> = program
        .facts
        .iter()
        .map(|f| GroundLiteral { atom: f.atom.clone(), positive: f.positive })
        .collect();
    let mut gp = GroundProgram { rules, facts, domain, predicates, size: 0 };
    gp.size = gp.recompute_size();
    gp
}

pub fn ground_size(gp: &GroundProgram) -> usize {
    gp.size
}
