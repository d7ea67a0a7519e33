//! Brute-force reference semantics over small ground programs.
//!
//! These share nothing with the founded and constraint evaluators beyond the
//! ground program itself: each builds its own Clark completion and
//! works on bitmask interpretations, so the Herbrand base is capped at 64
//! atoms and by [`OracleBudget`].

use std::collections::BTreeMap;

use thiserror::Error;

use crate::constraint::{ModelSet, TwoValuedModel};
use crate::founded::{Interpretation, TruthValue};
use crate::grounder::{GroundExpr, GroundProgram};
use crate::language::GroundAtom;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_ground_atoms: usize,
    pub max_models_examined: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_ground_atoms: 16, max_models_examined: 1 << 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("program is not stratified: {0} depends negatively on itself")]
    NotStratified(String),
    #[error("unsupported by reference semantics: {0}")]
    Unsupported(String),
}

type Mask = u64;

/// Body in negation normal form over atom bit positions.
#[derive(Debug, Clone)]
enum Body {
    Const(bool),
    Lit(usize, bool),
    And(Vec<Body>),
    Or(Vec<Body>),
}

impl Body {
    fn build(e: &GroundExpr, positive: bool, index: &BTreeMap<&GroundAtom, usize>) -> Body {
        match e {
            GroundExpr::Const(b) => Body::Const(*b == positive),
            GroundExpr::Lit(l) => Body::Lit(index[&l.atom], l.positive == positive),
            GroundExpr::And(xs) | GroundExpr::Or(xs) => {
                let ys = xs.iter().map(|x| Body::build(x, positive, index)).collect();
                if matches!(e, GroundExpr::And(_)) == positive {
                    Body::And(ys)
                } else {
                    Body::Or(ys)
                }
            }
            GroundExpr::Not(x) => Body::build(x, !positive, index),
        }
    }

    /// 2-valued truth in `m`.
    fn holds(&self, m: Mask) -> bool {
        match self {
            Body::Const(b) => *b,
            Body::Lit(i, pos) => (m >> i & 1 == 1) == *pos,
            Body::And(xs) => xs.iter().all(|x| x.holds(m)),
            Body::Or(xs) => xs.iter().any(|x| x.holds(m)),
        }
    }

    /// Kleene value in the 3-valued interpretation `(t, f)`.
    fn value(&self, t: Mask, f: Mask) -> TruthValue {
        match self {
            Body::Const(b) => TruthValue::from_bool(*b),
            Body::Lit(i, pos) => {
                let v = if t >> i & 1 == 1 {
                    TruthValue::True
                } else if f >> i & 1 == 1 {
                    TruthValue::False
                } else {
                    TruthValue::Undefined
                };
                if *pos {
                    v
                } else {
                    v.not()
                }
            }
            Body::And(xs) => xs.iter().fold(TruthValue::True, |a, x| a.and(x.value(t, f))),
            Body::Or(xs) => xs.iter().fold(TruthValue::False, |a, x| a.or(x.value(t, f))),
        }
    }

    /// Truth in the reduct sense: positive literals read `current`, negative
    /// literals are true iff the atom is outside `guess`.
    fn reduct_holds(&self, current: Mask, guess: Mask) -> bool {
        match self {
            Body::Const(b) => *b,
            Body::Lit(i, true) => current >> i & 1 == 1,
            Body::Lit(i, false) => guess >> i & 1 == 0,
            Body::And(xs) => xs.iter().all(|x| x.reduct_holds(current, guess)),
            Body::Or(xs) => xs.iter().any(|x| x.reduct_holds(current, guess)),
        }
    }

    fn literals(&self, out: &mut Vec<(usize, bool)>) {
        match self {
            Body::Const(_) => {}
            Body::Lit(i, p) => out.push((*i, *p)),
            Body::And(xs) | Body::Or(xs) => xs.iter().for_each(|x| x.literals(out)),
        }
    }
}

/// A ground program over at most 64 atoms, with rule bodies in normal form.
struct Small {
    atoms: Vec<GroundAtom>,
    rules: Vec<(usize, Body)>,
    facts: Mask,
    /// Per atom: the bodies of its rules, with facts as `true`.
    defs: Vec<Vec<Body>>,
    budget: OracleBudget,
}

impl Small {
    fn new(gp: &GroundProgram, budget: OracleBudget) -> Result<Self, OracleError> {
        let atoms = gp.herbrand_base();
        if atoms.len() > budget.max_ground_atoms.min(64) {
            return Err(OracleError::BudgetExceeded(format!(
                "{} ground atoms, limit {}",
                atoms.len(),
                budget.max_ground_atoms.min(64)
            )));
        }
        if let Some(f) = gp.facts.iter().find(|f| !f.positive) {
            return Err(OracleError::Unsupported(format!("negative fact {f}")));
        }
        if let Some(r) = gp.rules.iter().find(|r| !r.head.positive) {
            return Err(OracleError::Unsupported(format!("negative conclusion {}", r.head)));
        }
        let index: BTreeMap<&GroundAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let rules: Vec<(usize, Body)> =
            gp.rules.iter().map(|r| (index[&r.head.atom], Body::build(&r.body, true, &index))).collect();
        let mut facts = 0;
        let mut defs = vec![Vec::new(); atoms.len()];
        for f in &gp.facts {
            facts |= 1 << index[&f.atom];
            defs[index[&f.atom]].push(Body::Const(true));
        }
        for (h, b) in &rules {
            defs[*h].push(b.clone());
        }
        Ok(Small { atoms, rules, facts, defs, budget })
    }

    fn all(&self) -> Mask {
        if self.atoms.len() == 64 {
            Mask::MAX
        } else {
            (1 << self.atoms.len()) - 1
        }
    }

    fn interpretation(&self, t: Mask, f: Mask) -> Interpretation {
        let values = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let v = if t >> i & 1 == 1 {
                    TruthValue::True
                } else if f >> i & 1 == 1 {
                    TruthValue::False
                } else {
                    TruthValue::Undefined
                };
                (a.clone(), v)
            })
            .collect();
        Interpretation { values, conflicts: Vec::new() }
    }

    fn model(&self, m: Mask) -> TwoValuedModel {
        TwoValuedModel {
            values: self.atoms.iter().enumerate().map(|(i, a)| (a.clone(), m >> i & 1 == 1)).collect(),
        }
    }

    /// Every `m` with `base ⊆ m ⊆ base | free`, in increasing order of the free bits.
    fn enumerate(&self, base: Mask, free: Mask, mut keep: impl FnMut(Mask) -> bool) -> Result<ModelSet, OracleError> {
        let bits: Vec<usize> = (0..self.atoms.len()).filter(|i| free >> i & 1 == 1).collect();
        let total = 1u64.checked_shl(bits.len() as u32).unwrap_or(u64::MAX);
        if total > self.budget.max_models_examined {
            return Err(OracleError::BudgetExceeded(format!(
                "{} candidate interpretations, limit {}",
                total, self.budget.max_models_examined
            )));
        }
        let mut models = Vec::new();
        for k in 0..total {
            let mut m = base;
            for (j, &b) in bits.iter().enumerate() {
                if k >> j & 1 == 1 {
                    m |= 1 << b;
                }
            }
            if keep(m) {
                models.push(self.model(m));
            }
        }
        Ok(ModelSet::from_models(models))
    }

    /// Kripke–Kleene least fixed point of the completion.
    fn fitting(&self) -> (Mask, Mask) {
        let (mut t, mut f) = (0, 0);
        loop {
            let (mut nt, mut nf) = (0, 0);
            for (i, bodies) in self.defs.iter().enumerate() {
                let v = bodies.iter().fold(TruthValue::False, |a, b| a.or(b.value(t, f)));
                match v {
                    TruthValue::True => nt |= 1 << i,
                    TruthValue::False => nf |= 1 << i,
                    TruthValue::Undefined => {}
                }
            }
            if (nt, nf) == (t, f) {
                return (t, f);
            }
            t = nt;
            f = nf;
        }
    }

    /// Least model of the reduct by `guess`.
    fn gamma(&self, guess: Mask) -> Mask {
        let mut m = self.facts;
        loop {
            let mut next = m;
            for (h, b) in &self.rules {
                if b.reduct_holds(m, guess) {
                    next |= 1 << h;
                }
            }
            if next == m {
                return m;
            }
            m = next;
        }
    }

    /// Alternating fixpoint: true atoms and possibly true atoms.
    fn wfs(&self) -> (Mask, Mask) {
        let mut t = 0;
        loop {
            let next = self.gamma(self.gamma(t));
            if next == t {
                return (t, self.gamma(t));
            }
            t = next;
        }
    }

    fn supported(&self, m: Mask) -> bool {
        self.defs.iter().enumerate().all(|(i, bodies)| (m >> i & 1 == 1) == bodies.iter().any(|b| b.holds(m)))
    }
}

/// Least 3-valued fixed point of the completion's consequence operator,
/// every atom being completed.
pub fn fitting_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<Interpretation, OracleError> {
    let s = Small::new(gp, budget)?;
    let (t, f) = s.fitting();
    Ok(s.interpretation(t, f))
}

/// 2-valued fixed points of the completion. Each extends the Fitting model,
/// so only its undefined atoms are enumerated.
pub fn supported_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<ModelSet, OracleError> {
    let s = Small::new(gp, budget)?;
    let (t, f) = s.fitting();
    s.enumerate(t, s.all() & !(t | f), |m| s.supported(m))
}

/// Well-founded model by the alternating fixpoint of the reduct operator.
pub fn wfs_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<Interpretation, OracleError> {
    let s = Small::new(gp, budget)?;
    let (t, possible) = s.wfs();
    Ok(s.interpretation(t, s.all() & !possible))
}

/// Stable models: fixed points of the reduct operator. Each extends the
/// well-founded model, so only its undefined atoms are enumerated.
pub fn sms_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<ModelSet, OracleError> {
    let s = Small::new(gp, budget)?;
    let (t, possible) = s.wfs();
    s.enumerate(t, possible & !t, |m| s.gamma(m) == m)
}

/// Iterated least models over predicate strata.
pub fn stratified_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<Interpretation, OracleError> {
    let s = Small::new(gp, budget)?;
    let preds: Vec<&String> = gp.predicates.keys().collect();
    let pred_of = |i: usize| preds.iter().position(|p| **p == s.atoms[i].predicate).unwrap();
    // (from, to, negative)
    let mut edges = Vec::new();
    for (h, b) in &s.rules {
        let mut lits = Vec::new();
        b.literals(&mut lits);
        for (i, pos) in lits {
            edges.push((pred_of(i), pred_of(*h), !pos));
        }
    }
    let mut stratum = vec![0usize; preds.len()];
    loop {
        let mut changed = false;
        for &(from, to, neg) in &edges {
            let need = stratum[from] + usize::from(neg);
            if stratum[to] < need {
                stratum[to] = need;
                changed = true;
                if need > preds.len() {
                    return Err(OracleError::NotStratified(preds[to].clone()));
                }
            }
        }
        if !changed {
            break;
        }
    }
    let top = stratum.iter().copied().max().unwrap_or(0);
    let mut m = s.facts;
    for level in 0..=top {
        loop {
            let mut next = m;
            for (h, b) in &s.rules {
                if stratum[pred_of(*h)] == level && b.holds(m) {
                    next |= 1 << h;
                }
            }
            if next == m {
                break;
            }
            m = next;
        }
    }
    Ok(s.interpretation(m, s.all() & !m))
}

/// Every interpretation satisfying the facts and each rule as an implication.
pub fn fo_oracle(gp: &GroundProgram, budget: OracleBudget) -> Result<ModelSet, OracleError> {
    let s = Small::new(gp, budget)?;
    s.enumerate(s.facts, s.all() & !s.facts, |m| {
        s.rules.iter().all(|(h, b)| m >> h & 1 == 1 || !b.holds(m))
    })
}
