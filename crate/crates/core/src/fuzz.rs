//! Random small programs checked against the reference semantics.
//!
//! Each program is evaluated under four declaration regimes and compared
//! with the oracle expected to coincide with it:
//!
//! * all predicates certain: founded model = stratified model, and the
//!   constraint semantics has exactly that model;
//! * conclusion predicates uncertain and complete, others certain:
//!   founded = Fitting, constraint = supported models;
//! * default declarations with every uncertain complete predicate closed:
//!   founded with self-false closure = WFS, self-false filtered constraint
//!   models = stable models;
//! * everything uncertain, conclusions incomplete: constraint models =
//!   first-order models extending the founded model.
//!
//! Every founded model is also checked for consistency, for agreement
//! between the reference and linear evaluators, and the grounding for its
//! size bound.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::closed::wfs_by_closure;
use crate::constraint::{
    constraint_models, constraint_models_incomplete, satisfies_rules, sms_filter, EnumerationLimit, ModelSet,
};
use crate::founded::{founded_model, linear_lfp, FiringOrder, Interpretation, TruthValue};
use crate::grounder::constant_domain;
use crate::language::{Atom, Constant, Fact, HypExpr, Literal, Program, Rule, Term};
use crate::oracles::{
    fitting_oracle, fo_oracle, sms_oracle, stratified_oracle, supported_oracle, wfs_oracle, OracleBudget,
    OracleError,
};
use crate::parser::render_program;
use crate::pipeline::{all_certain, all_closed, all_uncertain, conclusions_uncertain, Prepared};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    /// Generate only stratified programs (negation on strictly earlier predicates).
    pub stratified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: &'static str,
    /// Minimized program text.
    pub program: String,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counterexample to {}: {}", self.property, self.detail)?;
        for line in self.program.lines() {
            writeln!(f, "    {line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FuzzReport {
    pub programs: usize,
    /// Programs for which the all-certain regime applied.
    pub all_certain: usize,
    pub counterexamples: Vec<Counterexample>,
}

const PREDICATES: [&str; 3] = ["p", "q", "r"];
const VARIABLES: [&str; 2] = ["x", "y"];
const MAX_CLAUSES: usize = 6;
const MAX_HERBRAND: usize = 16;

struct Generator {
    rng: StdRng,
    stratified: bool,
}

impl Generator {
    fn term(&mut self, constants: &[u64], vars: &[&str]) -> Term {
        if !vars.is_empty() && self.rng.gen_bool(0.7) {
            Term::Var(vars[self.rng.gen_range(0..vars.len())].to_string())
        } else {
            Term::Const(Constant::Num(constants[self.rng.gen_range(0..constants.len())]))
        }
    }

    fn atom(&mut self, pred: usize, arities: &[usize], constants: &[u64], vars: &[&str]) -> Atom {
        let args = (0..arities[pred]).map(|_| self.term(constants, vars)).collect();
        Atom::new(PREDICATES[pred], args)
    }

    /// A hypothesis for a rule concluding predicate `head`.
    fn body(&mut self, head: usize, arities: &[usize], constants: &[u64]) -> HypExpr {
        let n = self.rng.gen_range(1..=3);
        let mut parts = Vec::new();
        for _ in 0..n {
            let positive = self.rng.gen_bool(0.6);
            let limit = if !self.stratified {
                arities.len()
            } else if positive {
                head + 1
            } else {
                head
            };
            if limit == 0 {
                parts.push(HypExpr::Const(true));
                continue;
            }
            let pred = self.rng.gen_range(0..limit);
            let atom = self.atom(pred, arities, constants, &VARIABLES);
            let lit = HypExpr::Lit(Literal { atom, positive });
            let wrapped = match self.rng.gen_range(0..10) {
                0 if !self.stratified => HypExpr::Not(Box::new(HypExpr::Not(Box::new(lit)))),
                1 if arities[pred] > 0 => {
                    // Quantify a fresh variable in the first argument position.
                    let mut atom = self.atom(pred, arities, constants, &VARIABLES);
                    atom.args[0] = Term::Var("z".into());
                    let inner = HypExpr::Lit(Literal { atom, positive });
                    if self.rng.gen_bool(0.5) {
                        HypExpr::Exists(vec!["z".into()], Box::new(inner))
                    } else {
                        HypExpr::Forall(vec!["z".into()], Box::new(inner))
                    }
                }
                _ => lit,
            };
            parts.push(wrapped);
        }
        if parts.len() > 1 && self.rng.gen_bool(0.2) {
            HypExpr::Or(parts)
        } else if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            HypExpr::And(parts)
        }
    }

    fn program(&mut self) -> Program {
        loop {
            let n_preds = self.rng.gen_range(1..=PREDICATES.len());
            let arities: Vec<usize> = (0..n_preds).map(|_| self.rng.gen_range(0..=2)).collect();
            let n_consts = self.rng.gen_range(1..=3);
            let constants: Vec<u64> = (1..=n_consts).collect();
            let n_clauses = self.rng.gen_range(1..=MAX_CLAUSES);
            let mut program = Program::default();
            for _ in 0..n_clauses {
                let pred = self.rng.gen_range(0..n_preds);
                if self.rng.gen_bool(0.35) {
                    let atom = self.atom(pred, &arities, &constants, &[]);
                    program.facts.push(Fact::pos(atom.to_ground().expect("facts are ground")));
                } else {
                    let body = self.body(pred, &arities, &constants);
                    let bound: Vec<String> = body.free_vars().into_iter().collect();
                    let bound: Vec<&str> = bound.iter().map(String::as_str).collect();
                    let head = self.atom(pred, &arities, &constants, &bound);
                    program.rules.push(Rule::new(Literal::pos(head), body));
                }
            }
            let n = constant_domain(&program).len();
            let herbrand: usize = program
                .arities()
                .expect("generated arities are consistent")
                .values()
                .map(|&a| n.pow(a as u32))
                .sum();
            if herbrand <= MAX_HERBRAND {
                return program;
            }
        }
    }
}

/// Outcome of one property on one program: `Err` describes a violation.
type Check = Result<(), String>;

fn same_interpretation(what: &str, ours: &Interpretation, theirs: &Interpretation) -> Check {
    if ours.values == theirs.values {
        Ok(())
    } else {
        Err(format!("{what}: ours {ours}, reference {theirs}"))
    }
}

fn same_models(what: &str, ours: &ModelSet, theirs: &ModelSet) -> Check {
    if ours.models == theirs.models && ours.count == theirs.count {
        Ok(())
    } else {
        let show = |m: &ModelSet| m.models.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        Err(format!("{what}: ours [{}], reference [{}]", show(ours), show(theirs)))
    }
}

fn oracle<T>(r: Result<T, OracleError>) -> Result<T, String> {
    r.map_err(|e| format!("oracle failed: {e}"))
}

/// Evaluator agreement, consistency, and the grounding bound.
fn check_evaluation(prepared: &Prepared, seed: u64) -> Check {
    let naive = founded_model(&prepared.completed, &prepared.sccs);
    let linear = prepared.founded().interpretation;
    if naive != linear {
        return Err(format!("reference evaluator {naive}, linear evaluator {linear}"));
    }
    let shuffled = linear_lfp(&prepared.completed, &prepared.sccs, FiringOrder::Random(seed)).interpretation;
    if shuffled != linear {
        return Err(format!("firing order changed the result: {shuffled} vs {linear}"));
    }
    if !linear.is_consistent() {
        return Err(format!("conflicts on {:?}", linear.conflicts));
    }
    // A variable-free rule has one instance even over an empty domain.
    let n = prepared.ground.domain.len().max(1);
    let k = prepared.program.rules.iter().map(|r| r.body.free_vars().len()).max().unwrap_or(0);
    let bound = n.pow(k as u32) * prepared.program.rules.len();
    if prepared.ground.rules.len() > bound {
        return Err(format!("{} ground rules exceed n^k*r = {bound}", prepared.ground.rules.len()));
    }
    Ok(())
}

fn check_models(prepared: &Prepared, founded: &Interpretation, models: &ModelSet) -> Check {
    for m in &models.models {
        if !m.extends(founded) {
            return Err(format!("model {m} does not extend founded model {founded}"));
        }
        if !satisfies_rules(&prepared.ground, m) {
            return Err(format!("model {m} violates a rule"));
        }
    }
    Ok(())
}

fn check_certain(program: &Program, seed: u64) -> Option<Check> {
    let certain = all_certain(program)?;
    Some((|| {
        let prepared = Prepared::new(&certain).map_err(|e| e.to_string())?;
        check_evaluation(&prepared, seed)?;
        let founded = prepared.founded().interpretation;
        let stratified = oracle(stratified_oracle(&prepared.ground, OracleBudget::default()))?;
        same_interpretation("founded vs stratified", &founded, &stratified)?;
        let models = constraint_models(&prepared.completed, &prepared.ground, &founded, EnumerationLimit::default());
        if models.count != 1 || models.models[0].interpretation().values != founded.values {
            return Err(format!("constraint models {:?} differ from the single founded model", models.count));
        }
        Ok(())
    })())
}

fn check_fitting(program: &Program, seed: u64) -> Check {
    let prepared = Prepared::new(&conclusions_uncertain(program, true)).map_err(|e| e.to_string())?;
    check_evaluation(&prepared, seed)?;
    let founded = prepared.founded().interpretation;
    let fitting = oracle(fitting_oracle(&prepared.ground, OracleBudget::default()))?;
    same_interpretation("founded vs Fitting", &founded, &fitting)?;
    let models = constraint_models(&prepared.completed, &prepared.ground, &founded, EnumerationLimit::default());
    check_models(&prepared, &founded, &models)?;
    let supported = oracle(supported_oracle(&prepared.ground, OracleBudget::default()))?;
    same_models("constraint vs supported", &models, &supported)
}

fn check_closed(program: &Program, seed: u64) -> Check {
    let prepared = Prepared::new(&all_closed(program).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check_evaluation(&prepared, seed)?;
    let wfs = wfs_by_closure(&prepared).interpretation;
    let reference = oracle(wfs_oracle(&prepared.ground, OracleBudget::default()))?;
    same_interpretation("closure vs WFS", &wfs, &reference)?;
    let founded = prepared.founded().interpretation;
    let models = constraint_models(&prepared.completed, &prepared.ground, &founded, EnumerationLimit::default());
    let stable = sms_filter(&models, &prepared.completed);
    let reference = oracle(sms_oracle(&prepared.ground, OracleBudget::default()))?;
    same_models("self-false filtered constraint vs stable", &stable, &reference)
}

fn check_incomplete(program: &Program, seed: u64) -> Check {
    let decls = all_uncertain(&conclusions_uncertain(program, false));
    let prepared = Prepared::new(&decls).map_err(|e| e.to_string())?;
    check_evaluation(&prepared, seed)?;
    let founded = prepared.founded().interpretation;
    let models = constraint_models_incomplete(&prepared.ground, &founded, EnumerationLimit::default());
    check_models(&prepared, &founded, &models)?;
    let fo = oracle(fo_oracle(&prepared.ground, OracleBudget::default()))?;
    let extending = ModelSet::from_models(fo.models.into_iter().filter(|m| m.extends(&founded)).collect());
    same_models("incomplete constraint vs first-order", &models, &extending)
}

/// With every predicate uncertain the founded model knows no more than
/// Fitting's; under default declarations it knows at least as much.
fn check_containment(program: &Program, seed: u64) -> Check {
    let uncertain = Prepared::new(&all_uncertain(program)).map_err(|e| e.to_string())?;
    let default = Prepared::new(program).map_err(|e| e.to_string())?;
    check_evaluation(&default, seed)?;
    let fitting = oracle(fitting_oracle(&default.ground, OracleBudget::default()))?;
    let (weak, strong) = (uncertain.founded().interpretation, default.founded().interpretation);
    for (atom, &v) in &fitting.values {
        let w = weak.get(atom);
        if w != TruthValue::Undefined && w != v {
            return Err(format!("all-uncertain founded has {atom} {}, Fitting {}", w.name(), v.name()));
        }
        let s = strong.get(atom);
        if v != TruthValue::Undefined && s != v {
            return Err(format!("default founded has {atom} {}, Fitting {}", s.name(), v.name()));
        }
    }
    Ok(())
}

/// Names of the checked properties, in checking order.
pub const PROPERTIES: [&str; 5] =
    ["all-certain", "fitting-supported", "closed-wfs-sms", "incomplete-fo", "fitting-containment"];

fn run_property(property: &str, program: &Program, seed: u64) -> Option<Check> {
    match property {
        "all-certain" => check_certain(program, seed),
        "fitting-supported" => Some(check_fitting(program, seed)),
        "closed-wfs-sms" => Some(check_closed(program, seed)),
        "incomplete-fo" => Some(check_incomplete(program, seed)),
        "fitting-containment" => Some(check_containment(program, seed)),
        _ => unreachable!("unknown property {property}"),
    }
}

fn fails(property: &str, program: &Program, seed: u64) -> bool {
    matches!(run_property(property, program, seed), Some(Err(_)))
}

/// Greedily drop clauses and conjuncts while the property still fails.
pub fn minimize(property: &str, program: &Program, seed: u64) -> Program {
    let mut current = program.clone();
    loop {
        let mut candidates = Vec::new();
        for i in 0..current.facts.len() {
            let mut p = current.clone();
            p.facts.remove(i);
            candidates.push(p);
        }
        for i in 0..current.rules.len() {
            let mut p = current.clone();
            p.rules.remove(i);
            candidates.push(p);
            if let HypExpr::And(xs) | HypExpr::Or(xs) = &current.rules[i].body {
                for j in 0..xs.len() {
                    let mut p = current.clone();
                    let mut rest = xs.clone();
                    rest.remove(j);
                    p.rules[i].body = if rest.len() == 1 { rest.pop().unwrap() } else { HypExpr::And(rest) };
                    if matches!(current.rules[i].body, HypExpr::Or(_)) {
                        if let HypExpr::And(ys) = &p.rules[i].body {
                            p.rules[i].body = HypExpr::Or(ys.clone());
                        }
                    }
                    candidates.push(p);
                }
            }
        }
        let valid = |p: &Program| {
            p.rules.iter().all(|r| r.unbound_head_vars().is_empty()) && p.arities().is_ok()
        };
        match candidates.into_iter().find(|p| valid(p) && fails(property, p, seed)) {
            Some(smaller) => current = smaller,
            None => return current,
        }
    }
}

/// Check `config.count` generated programs.
pub fn fuzz(config: FuzzConfig) -> FuzzReport {
    let mut generator = Generator { rng: StdRng::seed_from_u64(config.seed), stratified: config.stratified };
    let mut report = FuzzReport::default();
    for i in 0..config.count {
        let program = generator.program();
        let seed = config.seed.wrapping_add(i as u64);
        report.programs += 1;
        for property in PROPERTIES {
            match run_property(property, &program, seed) {
                None => {}
                Some(Ok(())) => {
                    if property == "all-certain" {
                        report.all_certain += 1;
                    }
                }
                Some(Err(_)) => {
                    let small = minimize(property, &program, seed);
                    let detail = match run_property(property, &small, seed) {
                        Some(Err(d)) => d,
                        _ => unreachable!("minimization keeps the failure"),
                    };
                    report.counterexamples.push(Counterexample {
                        property,
                        program: render_program(&small),
                        detail,
                    });
                }
            }
        }
    }
    report
}

/// A fuzzed program for external property tests.
pub fn generate(seed: u64, stratified: bool) -> Program {
    Generator { rng: StdRng::seed_from_u64(seed), stratified }.program()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_programs_fit_the_budget() {
        for seed in 0..50 {
            let p = generate(seed, false);
            let prepared = Prepared::new(&p).unwrap();
            assert!(prepared.ground.herbrand_size() <= MAX_HERBRAND);
            assert!(p.facts.len() + p.rules.len() <= MAX_CLAUSES);
            assert!(p.facts.iter().all(|f| f.positive) && p.rules.iter().all(|r| r.head.positive));
        }
    }

    #[test]
    fn stratified_programs_are_all_certain() {
        for seed in 0..50 {
            assert!(all_certain(&generate(seed, true)).is_some());
        }
    }

    #[test]
    fn small_run_is_clean() {
        let report = fuzz(FuzzConfig { seed: 7, count: 100, stratified: false });
        assert_eq!(report.programs, 100);
        assert!(report.counterexamples.is_empty(), "{}", report.counterexamples[0]);
    }

    #[test]
    fn zero_count_is_empty() {
        assert_eq!(fuzz(FuzzConfig { seed: 1, count: 0, stratified: false }), FuzzReport::default());
    }

    #[test]
    fn minimize_drops_irrelevant_clauses() {
        // Pretend property: fails while the program still has a rule for q.
        let p = crate::parser::parse_program("p(1). q <- not q. r <- p(1).").unwrap();
        let small = minimize("all-certain", &p, 0);
        // all-certain does not apply (q is self-negative), so nothing fails and nothing shrinks.
        assert_eq!(small, p);
    }
}
