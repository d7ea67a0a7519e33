//! Constraint models: 2-valued extensions of the founded model that satisfy
//! every given rule as an implication and, for complete predicates, every
//! atom's equivalence with its combined body.

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt;

use crate::closed::self_false;
use crate::completion::CompletedProgram;
use crate::founded::{Interpretation, TruthValue};
use crate::grounder::{GroundExpr, GroundProgram};
use crate::language::GroundAtom;


#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoValuedModel {
    pub values: BTreeMap<GroundAtom, bool>,
}

impl TwoValuedModel {
    pub fn true_atoms(&self) -> Vec<&GroundAtom> {
        self.values.iter().filter(|(_, v)| **v).map(|(a, _)| a).collect()
    }

    pub fn get(&self, atom: &GroundAtom) -> bool {
        self.values.get(atom).copied().unwrap_or(false)
    }

    pub fn interpretation(&self) -> Interpretation {
        Interpretation {
            values: self.values.iter().map(|(a, v)| (a.clone(), TruthValue::from_bool(*v))).collect(),
            conflicts: Vec::new(),
        }
    }

    /// Whether this model agrees with every true and false atom of `itp`.
    pub fn extends(&self, itp: &Interpretation) -> bool {
        itp.values.iter().all(|(a, v)| match v {
            TruthValue::True => self.get(a),
            TruthValue::False => !self.get(a),
            TruthValue::Undefined => true,
        })
    }

    fn key(&self) -> Vec<&GroundAtom> {
        self.true_atoms()
    }
}

/// Compact notation: `{p, ¬q}`.
impl fmt::Display for TwoValuedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .values
            .iter()
            .map(|(a, v)| if *v { a.to_string() } else { format!("¬{a}") })
            .collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Models in canonical order: by their sorted lists of true atoms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelSet {
    pub models: Vec<TwoValuedModel>,
    /// Number of models found; may exceed `models.len()` under a limit.
    pub count: usize,
    /// False when `count` is only a lower bound.
    pub exact: bool,
}

impl ModelSet {
    pub fn from_models(mut models: Vec<TwoValuedModel>) -> Self {
        models.sort_by(|a, b| a.key().cmp(&b.key()));
        models.dedup();
        ModelSet { count: models.len(), models, exact: true }
    }
}

/// Body over dense atom indices.
#[derive(Debug, Clone)]
enum Expr {
    Const(bool),
    Lit(usize, bool),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    fn compile(e: &GroundExpr, index: &HashMap<&GroundAtom, usize>) -> Expr {
        match e {
            GroundExpr::Const(b) => Expr::Const(*b),
            GroundExpr::Lit(l) => Expr::Lit(index[&l.atom], l.positive),
            GroundExpr::And(xs) => Expr::And(xs.iter().map(|x| Expr::compile(x, index)).collect()),
            GroundExpr::Or(xs) => Expr::Or(xs.iter().map(|x| Expr::compile(x, index)).collect()),
            GroundExpr::Not(x) => Expr::Not(Box::new(Expr::compile(x, index))),
        }
    }

    fn eval(&self, vals: &[TruthValue]) -> TruthValue {
        match self {
            Expr::Const(b) => TruthValue::from_bool(*b),
            Expr::Lit(i, true) => vals[*i],
            Expr::Lit(i, false) => vals[*i].not(),
            Expr::And(xs) => {
                let mut acc = TruthValue::True;
                for x in xs {
                    acc = acc.and(x.eval(vals));
                    if acc == TruthValue::False {
                        break;
                    }
                }
                acc
            }
            Expr::Or(xs) => {
                let mut acc = TruthValue::False;
                for x in xs {
                    acc = acc.or(x.eval(vals));
                    if acc == TruthValue::True {
                        break;
                    }
                }
                acc
            }
            Expr::Not(x) => x.eval(vals).not(),
        }
    }

    fn atoms(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Lit(i, _) => out.push(*i),
            Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| x.atoms(out)),
            Expr::Not(x) => x.atoms(out),
        }
    }
}

enum Constraint {
    /// Body true forces the head literal.
    Implies(Expr, usize, bool),
    /// Atom equals its combined body.
    Iff(usize, Expr),
}

impl Constraint {
    fn violated(&self, vals: &[TruthValue]) -> bool {
        match self {
            Constraint::Implies(body, head, positive) => {
                let h = if *positive { vals[*head] } else { vals[*head].not() };
                h == TruthValue::False && body.eval(vals) == TruthValue::True
            }
            Constraint::Iff(atom, body) => {
                let a = vals[*atom];
                a != TruthValue::Undefined && {
                    let b = body.eval(vals);
                    b != TruthValue::Undefined && a != b
                }
            }
        }
    }

    fn atoms(&self) -> Vec<usize> {
        let mut out = Vec::new();
        match self {
            Constraint::Implies(body, head, _) => {
                out.push(*head);
                body.atoms(&mut out);
            }
            Constraint::Iff(atom, body) => {
                out.push(*atom);
                body.atoms(&mut out);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerationLimit {
    /// Keep at most this many models (the canonically least ones when the
    /// count is exact).
    pub max_models: Option<usize>,
    /// With more undefined atoms than this and a model limit, enumeration
    /// stops at the limit and the count is only a lower bound.
    pub exact_count_max_undefined: usize,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        EnumerationLimit { max_models: None, exact_count_max_undefined: 30 }
    }
}

struct Search {
    atoms: Vec<GroundAtom>,
    vals: Vec<TruthValue>,
    order: Vec<usize>,
    constraints: Vec<Constraint>,
    watching: Vec<Vec<usize>>,
    limit: EnumerationLimit,
    exhaustive: bool,
    found: BinaryHeap<Vec<usize>>,
    count: usize,
}

impl Search {
    fn consistent_after(&self, atom: usize) -> bool {
        self.watching[atom].iter().all(|&c| !self.constraints[c].violated(&self.vals))
    }

    /// Returns false when enumeration should stop.
    fn go(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            self.count += 1;
            let key: Vec<usize> =
                (0..self.vals.len()).filter(|&i| self.vals[i] == TruthValue::True).collect();
            self.found.push(key);
            if let Some(max) = self.limit.max_models {
                if self.found.len() > max {
                    self.found.pop();
                }
                if !self.exhaustive && self.count >= max {
                    return false;
                }
            }
            return true;
        }
        let atom = self.order[depth];
        for v in [TruthValue::False, TruthValue::True] {
            self.vals[atom] = v;
            if self.consistent_after(atom) && !self.go(depth + 1) {
                self.vals[atom] = TruthValue::Undefined;
                return false;
            }
        }
        self.vals[atom] = TruthValue::Undefined;
        true
    }
}

fn enumerate(
    cp: &CompletedProgram,
    gp: &GroundProgram,
    founded: &Interpretation,
    with_completion: bool,
    limit: EnumerationLimit,
) -> ModelSet {
    if !founded.is_consistent() {
        return ModelSet { models: Vec::new(), count: 0, exact: true };
    }
    let atoms = gp.herbrand_base();
    let index: HashMap<&GroundAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let mut constraints = Vec::new();
    for r in &gp.rules {
        constraints.push(Constraint::Implies(
            Expr::compile(&r.body, &index),
            index[&r.head.atom],
            r.head.positive,
        ));
    }
    for f in &gp.facts {
        constraints.push(Constraint::Implies(Expr::Const(true), index[&f.atom], f.positive));
    }
    if with_completion {
        for r in &cp.combined {
            constraints.push(Constraint::Iff(index[&r.head.atom], Expr::compile(&r.body, &index)));
        }
    }
    let mut watching = vec![Vec::new(); atoms.len()];
    for (c, k) in constraints.iter().enumerate() {
        for a in k.atoms() {
            watching[a].push(c);
        }
    }
    let vals: Vec<TruthValue> = atoms.iter().map(|a| founded.get(a)).collect();
    let order: Vec<usize> = (0..atoms.len()).filter(|&i| vals[i] == TruthValue::Undefined).collect();
    let exhaustive = limit.max_models.is_none() || order.len() <= limit.exact_count_max_undefined;
    let mut search = Search {
        vals,
        order,
        constraints,
        watching,
        limit,
        exhaustive,
        found: BinaryHeap::new(),
        count: 0,
        atoms,
    };
    let root_ok = search.constraints.iter().all(|c| !c.violated(&search.vals));
    let complete = !root_ok || search.go(0);
    let keys = search.found.into_sorted_vec();
    let atoms = search.atoms;
    let models = keys
        .into_iter()
        .map(|key| {
            let mut values: BTreeMap<GroundAtom, bool> = atoms.iter().map(|a| (a.clone(), false)).collect();
            for i in key {
                values.insert(atoms[i].clone(), true);
            }
            TwoValuedModel { values }
        })
        .collect();
    ModelSet { models, count: search.count, exact: complete }
}

/// Extensions of `founded` satisfying the given rules and, for complete
/// predicates, the completion equivalences.
pub fn constraint_models(
    cp: &CompletedProgram,
    gp: &GroundProgram,
    founded: &Interpretation,
    limit: EnumerationLimit,
) -> ModelSet {
    enumerate(cp, gp, founded, true, limit)
}

/// Extensions of `founded` satisfying the given rules only.
pub fn constraint_models_incomplete(
    gp: &GroundProgram,
    founded: &Interpretation,
    limit: EnumerationLimit,
) -> ModelSet {
    let cp = CompletedProgram {
        combined: Vec::new(),
        inverse: Vec::new(),
        passthrough: Vec::new(),
        facts: Vec::new(),
        assumed_false: Vec::new(),
        decls: BTreeMap::new(),
        domain: gp.domain.clone(),
        predicates: gp.predicates.clone(),
        renamed: true,
    };
    enumerate(&cp, gp, founded, false, limit)
}

/// Drop every model in which some atom that is self-false with respect to
/// the model itself is true.
pub fn sms_filter(models: &ModelSet, cp: &CompletedProgram) -> ModelSet {
    let kept: Vec<TwoValuedModel> = models
        .models
        .iter()
        .filter(|m| self_false(&m.interpretation(), cp).iter().all(|a| !m.get(a)))
        .cloned()
        .collect();
    let exact = models.exact && models.count == models.models.len();
    ModelSet { count: kept.len(), models: kept, exact }
}

/// Whether `model` satisfies every ground rule as an implication and every fact.
pub fn satisfies_rules(gp: &GroundProgram, model: &TwoValuedModel) -> bool {
    fn eval(e: &GroundExpr, m: &TwoValuedModel) -> bool {
        match e {
            GroundExpr::Const(b) => *b,
            GroundExpr::Lit(l) => m.get(&l.atom) == l.positive,
            GroundExpr::And(xs) => xs.iter().all(|x| eval(x, m)),
            GroundExpr::Or(xs) => xs.iter().any(|x| eval(x, m)),
            GroundExpr::Not(x) => !eval(x, m),
        }
    }
    gp.rules.iter().all(|r| !eval(&r.body, model) || model.get(&r.head.atom) == r.head.positive)
        && gp.facts.iter().all(|f| model.get(&f.atom) == f.positive)
}
