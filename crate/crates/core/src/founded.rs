//! Founded model evaluation.
//!
//! A completed, renamed program is positive over the doubled atom space, so
//! the founded model is a least fixed point reached by forward chaining.
//! Components of the predicate dependency graph are finished in order; once
//! a component of certain predicates is quiescent, every atom it did not
//! derive becomes false. Atoms of uncertain predicates derived on neither
//! side remain undefined.
//!
//! [`founded_model`] is a direct iteration used as a reference;
//! [`linear_lfp`] compiles bodies into a gate network where every node
//! fires at most once, giving a step count linear in the program size.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::completion::{CompletedProgram, DoubledAtom, RuleId};
use crate::grounder::{GroundExpr, GroundLiteral};
use crate::language::GroundAtom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TruthValue {
    False,
    Undefined,
    True,
}

impl TruthValue {
    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Undefined => TruthValue::Undefined,
        }
    }

    pub fn and(self, other: Self) -> Self {
        self.min(other)
    }

    pub fn or(self, other: Self) -> Self {
        self.max(other)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// The JSON spelling: `"true"`, `"false"` or `"undefined"`.
    pub fn name(self) -> &'static str {
        match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Undefined => "undefined",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            TruthValue::True => "T",
            TruthValue::False => "F",
            TruthValue::Undefined => "U",
        }
    }
}

/// A 3-valued interpretation, total over the Herbrand base it was built for.
///
/// Atoms derived both true and false are listed in `conflicts` and read as
/// undefined in `values`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interpretation {
    pub values: BTreeMap<GroundAtom, TruthValue>,
    pub conflicts: Vec<GroundAtom>,
}

impl Interpretation {
    pub fn get(&self, atom: &GroundAtom) -> TruthValue {
        self.values.get(atom).copied().unwrap_or(TruthValue::Undefined)
    }

    pub fn literal(&self, lit: &GroundLiteral) -> TruthValue {
        let v = self.get(&lit.atom);
        if lit.positive {
            v
        } else {
            v.not()
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn is_two_valued(&self) -> bool {
        self.values.values().all(|v| *v != TruthValue::Undefined)
    }

    pub fn atoms_with(&self, value: TruthValue) -> Vec<&GroundAtom> {
        self.values.iter().filter(|(_, v)| **v == value).map(|(a, _)| a).collect()
    }

    pub fn undefined(&self) -> Vec<&GroundAtom> {
        self.atoms_with(TruthValue::Undefined)
    }
}

/// Compact notation: `{p, ¬q, U r}`, with `¬` for false and `U` for undefined.
impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .values
            .iter()
            .map(|(a, v)| match v {
                TruthValue::True => a.to_string(),
                TruthValue::False => format!("¬{a}"),
                TruthValue::Undefined => format!("U {a}"),
            })
            .collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Kleene evaluation of a variable-free body.
pub fn eval3(body: &GroundExpr, itp: &Interpretation) -> TruthValue {
    match body {
        GroundExpr::Const(b) => TruthValue::from_bool(*b),
        GroundExpr::Lit(l) => itp.literal(l),
        GroundExpr::And(xs) => {
            xs.iter().fold(TruthValue::True, |acc, x| acc.and(eval3(x, itp)))
        }
        GroundExpr::Or(xs) => {
            xs.iter().fold(TruthValue::False, |acc, x| acc.or(eval3(x, itp)))
        }
        GroundExpr::Not(x) => eval3(x, itp).not(),
    }
}

/// Dense numbering of the doubled atom space: `2*i` is atom `i`, `2*i + 1`
/// is `n.` atom `i`.
pub(crate) struct AtomIndex {
    pub atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, usize>,
}

impl AtomIndex {
    pub fn new(cp: &CompletedProgram) -> Self {
        let atoms = cp.herbrand_base();
        let index = atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        AtomIndex { atoms, index }
    }

    pub fn atom(&self, a: &GroundAtom) -> usize {
        self.index[a]
    }

    pub fn doubled(&self, lit: &GroundLiteral) -> usize {
        2 * self.atom(&lit.atom) + usize::from(!lit.positive)
    }

    pub fn doubled_atom(&self, id: usize) -> DoubledAtom {
        DoubledAtom { atom: self.atoms[id / 2].clone(), negated: id % 2 == 1 }
    }

    /// Read off the interpretation from derived flags over the doubled space.
    pub fn interpretation(&self, derived: &[bool]) -> Interpretation {
        let mut itp = Interpretation::default();
        for (i, a) in self.atoms.iter().enumerate() {
            let v = match (derived[2 * i], derived[2 * i + 1]) {
                (true, true) => {
                    itp.conflicts.push(a.clone());
                    TruthValue::Undefined
                }
                (true, false) => TruthValue::True,
                (false, true) => TruthValue::False,
                (false, false) => TruthValue::Undefined,
            };
            itp.values.insert(a.clone(), v);
        }
        itp
    }
}

/// Components in evaluation order, with a flag for certain components.
fn components(cp: &CompletedProgram, sccs: &[Vec<String>]) -> Vec<(Vec<String>, bool)> {
    sccs.iter()
        .map(|scc| {
            let certain = scc.iter().all(|p| cp.decl(p).is_certain());
            (scc.clone(), certain)
        })
        .collect()
}

fn holds(e: &GroundExpr, idx: &AtomIndex, derived: &[bool]) -> bool {
    match e {
        GroundExpr::Const(b) => *b,
        GroundExpr::Lit(l) => derived[idx.doubled(l)],
        GroundExpr::And(xs) => xs.iter().all(|x| holds(x, idx, derived)),
        GroundExpr::Or(xs) => xs.iter().any(|x| holds(x, idx, derived)),
        GroundExpr::Not(_) => panic!("founded evaluation needs a renamed program"),
    }
}

/// Seeds: given facts and atoms assumed false by closure.
fn seeds(cp: &CompletedProgram) -> impl Iterator<Item = (GroundLiteral, Justification)> + '_ {
    cp.facts
        .iter()
        .map(|f| (f.clone(), Justification::Fact))
        .chain(cp.assumed_false.iter().map(|a| (GroundLiteral::neg(a.clone()), Justification::SelfFalse)))
}

/// Reference evaluation: iterate every component's rules until nothing changes.
pub fn founded_model(cp: &CompletedProgram, sccs: &[Vec<String>]) -> Interpretation {
    assert!(cp.renamed, "founded evaluation needs a renamed program");
    let idx = AtomIndex::new(cp);
    let mut derived = vec![false; 2 * idx.atoms.len()];
    for (lit, _) in seeds(cp) {
        derived[idx.doubled(&lit)] = true;
    }
    let mut by_pred: BTreeMap<&str, Vec<RuleId>> = BTreeMap::new();
    for (id, r) in cp.rules() {
        by_pred.entry(r.head.atom.predicate.as_str()).or_default().push(id);
    }
    for (scc, certain) in components(cp, sccs) {
        let rules: Vec<RuleId> =
            scc.iter().flat_map(|p| by_pred.get(p.as_str()).cloned().unwrap_or_default()).collect();
        loop {
            let mut changed = false;
            for &id in &rules {
                let r = cp.rule(id);
                let h = idx.doubled(&r.head);
                if !derived[h] && holds(&r.body, &idx, &derived) {
                    derived[h] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if certain {
            for p in &scc {
                for a in cp.atoms_of(p) {
                    let i = idx.atom(&a);
                    if !derived[2 * i] {
                        derived[2 * i + 1] = true;
                    }
                }
            }
        }
    }
    idx.interpretation(&derived)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiringOrder {
    /// First-in first-out from sorted seeds; reproducible traces.
    Fifo,
    /// Pick the next node to fire uniformly at random.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    Fact,
    Rule(RuleId),
    /// Made false after its component of certain predicates was finished.
    Closure,
    /// Made false as a self-false atom of a closed predicate.
    SelfFalse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub atom: DoubledAtom,
    pub justification: Justification,
    /// Values of the body literals when the rule fired, in body order.
    pub hypotheses: Vec<(DoubledAtom, TruthValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DerivationTrace {
    /// In derivation order.
    pub derivations: Vec<Derivation>,
    pub steps: usize,
}

impl DerivationTrace {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.derivations {
            let why = match d.justification {
                Justification::Fact => "fact".to_string(),
                Justification::Rule(id) => id.to_string(),
                Justification::Closure => "closure".to_string(),
                Justification::SelfFalse => "self-false".to_string(),
            };
            let hyps: Vec<String> =
                d.hypotheses.iter().map(|(a, v)| format!("{a}={}", v.symbol())).collect();
            out.push_str(&format!("{} <= {why} [{}]\n", d.atom, hyps.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoundedRun {
    pub interpretation: Interpretation,
    pub trace: DerivationTrace,
}

#[derive(Debug, Clone, Copy)]
enum NodeKind {
    Atom,
    And,
    Or,
    Rule(RuleId),
}

struct Network {
    kinds: Vec<NodeKind>,
    /// Unsatisfied inputs of `And` nodes.
    remaining: Vec<usize>,
    outputs: Vec<Vec<usize>>,
    /// Nodes true from the start: constant-true bodies and inputs.
    initially_true: Vec<usize>,
}

impl Network {
    fn add(&mut self, kind: NodeKind) -> usize {
        self.kinds.push(kind);
        self.remaining.push(0);
        self.outputs.push(Vec::new());
        self.kinds.len() - 1
    }

    /// Node whose firing means `e` is true; `None` if `e` can never be true.
    fn compile(&mut self, e: &GroundExpr, idx: &AtomIndex) -> Option<usize> {
        match e {
            GroundExpr::Const(true) => {
                let n = self.add(NodeKind::And);
                self.initially_true.push(n);
                Some(n)
            }
            GroundExpr::Const(false) => None,
            GroundExpr::Lit(l) => Some(idx.doubled(l)),
            GroundExpr::And(xs) => {
                let n = self.add(NodeKind::And);
                let mut inputs = Vec::with_capacity(xs.len());
                for x in xs {
                    inputs.push(self.compile(x, idx)?);
                }
                self.remaining[n] = inputs.len();
                for i in inputs {
                    self.outputs[i].push(n);
                }
                if xs.is_empty() {
                    self.initially_true.push(n);
                }
                Some(n)
            }
            GroundExpr::Or(xs) => {
                let n = self.add(NodeKind::Or);
                let mut any = false;
                for x in xs {
                    if let Some(i) = self.compile(x, idx) {
                        self.outputs[i].push(n);
                        any = true;
                    }
                }
                any.then_some(n)
            }
            GroundExpr::Not(_) => panic!("founded evaluation needs a renamed program"),
        }
    }
}

struct State {
    net: Network,
    fired: Vec<bool>,
    /// Step at which each doubled atom was derived.
    step_of: Vec<usize>,
    justification: Vec<Option<Justification>>,
    derived_order: Vec<usize>,
    steps: usize,
    queue: VecDeque<usize>,
    rng: Option<StdRng>,
}

impl State {
    fn pop(&mut self) -> Option<usize> {
        match &mut self.rng {
            None => self.queue.pop_front(),
            Some(_) if self.queue.is_empty() => None,
            Some(rng) => {
                let k = rng.gen_range(0..self.queue.len());
                self.queue.swap_remove_back(k)
            }
        }
    }

    fn activate(&mut self, node: usize) {
        if !self.fired[node] {
            self.fired[node] = true;
            self.queue.push_back(node);
        }
    }

    fn derive(&mut self, atom: usize, why: Justification) {
        if !self.fired[atom] {
            self.step_of[atom] = self.steps;
            self.justification[atom] = Some(why);
            self.derived_order.push(atom);
            self.activate(atom);
        }
    }

    fn run(&mut self) {
        while let Some(node) = self.pop() {
            self.steps += 1;
            for k in 0..self.net.outputs[node].len() {
                let out = self.net.outputs[node][k];
                self.steps += 1;
                match self.net.kinds[out] {
                    NodeKind::Atom => {
                        let NodeKind::Rule(id) = self.net.kinds[node] else {
                            unreachable!("atoms are fed by rule nodes only")
                        };
                        self.derive(out, Justification::Rule(id));
                    }
                    NodeKind::And => {
                        self.net.remaining[out] -= 1;
                        if self.net.remaining[out] == 0 {
                            self.activate(out);
                        }
                    }
                    NodeKind::Or | NodeKind::Rule(_) => self.activate(out),
                }
            }
        }
    }
}

/// Linear-time evaluation over a gate network. Yields the same
/// interpretation as [`founded_model`] for every firing order.
pub fn linear_lfp(cp: &CompletedProgram, sccs: &[Vec<String>], order: FiringOrder) -> FoundedRun {
    assert!(cp.renamed, "founded evaluation needs a renamed program");
    let idx = AtomIndex::new(cp);
    let n_doubled = 2 * idx.atoms.len();
    let mut net = Network {
        kinds: vec![NodeKind::Atom; n_doubled],
        remaining: vec![0; n_doubled],
        outputs: vec![Vec::new(); n_doubled],
        initially_true: Vec::new(),
    };
    for (id, r) in cp.rules() {
        if let Some(body) = net.compile(&r.body, &idx) {
            let rule = net.add(NodeKind::Rule(id));
            net.outputs[body].push(rule);
            net.outputs[rule].push(idx.doubled(&r.head));
        }
    }

    let n = net.kinds.len();
    let initially_true = std::mem::take(&mut net.initially_true);
    let mut st = State {
        net,
        fired: vec![false; n],
        step_of: vec![usize::MAX; n_doubled],
        justification: vec![None; n_doubled],
        derived_order: Vec::new(),
        steps: 0,
        queue: VecDeque::new(),
        rng: match order {
            FiringOrder::Fifo => None,
            FiringOrder::Random(seed) => Some(StdRng::seed_from_u64(seed)),
        },
    };
    for (lit, why) in seeds(cp) {
        st.steps += 1;
        st.derive(idx.doubled(&lit), why);
    }
    for g in initially_true {
        st.activate(g);
    }
    st.run();
    for (scc, certain) in components(cp, sccs) {
        if !certain {
            continue;
        }
        for p in &scc {
            for a in cp.atoms_of(p) {
                let i = idx.atom(&a);
                if !st.fired[2 * i] {
                    st.steps += 1;
                    st.derive(2 * i + 1, Justification::Closure);
                }
            }
        }
        st.run();
    }

    let interpretation = idx.interpretation(&st.fired[..n_doubled]);
    let derivations = st
        .derived_order
        .iter()
        .map(|&a| {
            let why = st.justification[a].expect("derived atoms are justified");
            let mut hypotheses = Vec::new();
            if let Justification::Rule(id) = why {
                cp.rule(id).body.for_each_literal(&mut |l| {
                    let d = idx.doubled(l);
                    let value = if st.step_of[d] < st.step_of[a] {
                        TruthValue::True
                    } else if st.step_of[d ^ 1] < st.step_of[a] {
                        TruthValue::False
                    } else {
                        TruthValue::Undefined
                    };
                    hypotheses.push((idx.doubled_atom(d), value));
                });
            }
            Derivation { atom: idx.doubled_atom(a), justification: why, hypotheses }
        })
        .collect();
    FoundedRun { interpretation, trace: DerivationTrace { derivations, steps: st.steps } }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::pipeline::Prepared;
    use TruthValue::{False as F, True as T, Undefined as U};

    fn prepared(text: &str) -> Prepared {
        Prepared::new(&parse_program(text).unwrap()).unwrap()
    }

    fn zero(p: &str) -> GroundAtom {
        GroundAtom::new(p, vec![])
    }

    fn lit(p: &str, positive: bool) -> GroundExpr {
        GroundExpr::Lit(GroundLiteral { atom: zero(p), positive })
    }

    #[test]
    fn kleene_connectives() {
        assert_eq!(U.not(), U);
        assert_eq!(T.and(U), U);
        assert_eq!(F.and(U), F);
        assert_eq!(T.or(U), T);
        assert_eq!(F.or(U), U);
    }

    #[test]
    fn eval3_on_undefined_q() {
        let itp = Interpretation { values: [(zero("q"), U)].into(), conflicts: vec![] };
        let either = GroundExpr::Or(vec![lit("q", false), lit("q", true)]);
        let both = GroundExpr::And(vec![lit("q", false), lit("q", true)]);
        assert_eq!(eval3(&either, &itp), U);
        assert_eq!(eval3(&both, &itp), U);
        assert_eq!(eval3(&GroundExpr::Not(Box::new(lit("q", true))), &itp), U);
        assert_eq!(eval3(&GroundExpr::Const(true), &itp), T);
    }

    #[test]
    fn certain_components_close_with_false() {
        let p = prepared("p <- q. r <- not p. s.");
        let itp = p.founded().interpretation;
        assert_eq!([itp.get(&zero("p")), itp.get(&zero("q")), itp.get(&zero("r")), itp.get(&zero("s"))], [F, F, T, T]);
    }

    #[test]
    fn uncertain_cycles_stay_undefined() {
        for text in ["q <- not q.", "q <- not q or q.", "q <- not q and q.", "q <- not p. p <- not q."] {
            let itp = prepared(text).founded().interpretation;
            assert!(itp.values.values().all(|v| *v == U), "{text}: {itp}");
        }
    }

    #[test]
    fn complete_uncertain_positive_loop_follows_completion() {
        // p is false, so q's only support vanishes.
        let itp = prepared("uncertain q. q <- q and p.").founded().interpretation;
        assert_eq!(itp.get(&zero("q")), F);
    }

    #[test]
    fn conflicting_negative_conclusion_reads_undefined() {
        let itp = prepared("uncertain p. incomplete p. p. not p <- true.").founded().interpretation;
        assert!(!itp.is_consistent());
        assert_eq!(itp.get(&zero("p")), U);
    }

    #[test]
    fn naive_and_linear_agree() {
        for text in [
            "win(x) <- move(x,y) and not win(y). move(1,2). move(2,3). move(3,1). move(4,5).",
            "reach(x) <- source(x). reach(y) <- edge(x,y) and reach(x). uncertain reach. source(1). edge(1,2). edge(3,4). edge(4,3).",
            "shave('barber',x) <- man(x) and not shave(x,x). man('barber'). man('al').",
        ] {
            let p = prepared(text);
            let naive = founded_model(&p.completed, &p.sccs);
            assert_eq!(naive, p.founded().interpretation, "{text}");
            for seed in 0..10 {
                let run = linear_lfp(&p.completed, &p.sccs, FiringOrder::Random(seed));
                assert_eq!(run.interpretation, naive, "{text} seed {seed}");
            }
        }
    }

    #[test]
    fn trace_is_well_founded() {
        let p = prepared("win(x) <- move(x,y) and not win(y). move(1,2). move(2,3). move(4,4).");
        let run = p.founded();
        let mut seen: Vec<&DoubledAtom> = Vec::new();
        for d in &run.trace.derivations {
            assert!(!seen.contains(&&d.atom), "{} derived twice", d.atom);
            if let Justification::Rule(id) = d.justification {
                let body = &p.completed.rule(id).body;
                let earlier = |l: &GroundLiteral| {
                    seen.iter().any(|a| a.atom == l.atom && a.negated != l.positive)
                };
                assert!(holds_given(body, &earlier), "{} fired before its body held", d.atom);
                for (a, v) in &d.hypotheses {
                    assert_eq!(*v == T, seen.contains(&a), "{a} recorded as {v:?}");
                }
            }
            seen.push(&d.atom);
        }
        assert!(run.trace.render().contains("win(2) <= c"));
        assert!(run.trace.steps >= run.trace.derivations.len());
    }

    fn holds_given(e: &GroundExpr, lit: &impl Fn(&GroundLiteral) -> bool) -> bool {
        match e {
            GroundExpr::Const(b) => *b,
            GroundExpr::Lit(l) => lit(l),
            GroundExpr::And(xs) => xs.iter().all(|x| holds_given(x, lit)),
            GroundExpr::Or(xs) => xs.iter().any(|x| holds_given(x, lit)),
            GroundExpr::Not(_) => unreachable!("completed bodies are negation-free"),
        }
    }

    #[test]
    fn display_uses_compact_notation() {
        let itp = prepared("uncertain q. p. q <- not q. r <- not p.").founded().interpretation;
        assert_eq!(itp.to_string(), "{p, U q, ¬r}");
    }
}
