//! Side-by-side results of one program under several declaration regimes
//! and reference semantics, in the notation `{p, ¬q, U r}`.

use std::fmt;

use crate::closed::wfs_by_closure;
use crate::constraint::{constraint_models, sms_filter, EnumerationLimit, ModelSet};
use crate::founded::Interpretation;
use crate::language::{DeclarationError, Program};
use crate::oracles::{fitting_oracle, supported_oracle, OracleBudget, OracleError};
use crate::pipeline::{all_certain, all_closed, all_uncertain, Prepared};

/// Model sets larger than this are summarized by their size.
pub const MAX_LISTED_MODELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Column {
    FoundedUncertain,
    FoundedCertain,
    Wfs,
    Fitting,
    ConstraintUncertain,
    ConstraintCertain,
    Sms,
    Supported,
}

impl Column {
    pub const ALL: [Column; 8] = [
        Column::FoundedUncertain,
        Column::FoundedCertain,
        Column::Wfs,
        Column::Fitting,
        Column::ConstraintUncertain,
        Column::ConstraintCertain,
        Column::Sms,
        Column::Supported,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Column::FoundedUncertain => "founded-uncertain",
            Column::FoundedCertain => "founded-certain",
            Column::Wfs => "wfs",
            Column::Fitting => "fitting",
            Column::ConstraintUncertain => "constraint-uncertain",
            Column::ConstraintCertain => "constraint-certain",
            Column::Sms => "sms",
            Column::Supported => "supported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Interpretation(Interpretation),
    Models(ModelSet),
    NotApplicable(Option<String>),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Interpretation(itp) if !itp.is_consistent() => {
                let atoms: Vec<String> = itp.conflicts.iter().map(|a| a.to_string()).collect();
                write!(f, "{itp} inconsistent on {}", atoms.join(", "))
            }
            Cell::Interpretation(itp) => write!(f, "{itp}"),
            Cell::Models(ms) => f.write_str(&render_models(ms)),
            Cell::NotApplicable(None) => f.write_str("N/A"),
            Cell::NotApplicable(Some(why)) => write!(f, "N/A ({why})"),
        }
    }
}

pub fn render_models(ms: &ModelSet) -> String {
    if ms.count == 0 && ms.exact {
        "no model".into()
    } else if !ms.exact {
        format!("≥ {} models", ms.count)
    } else if ms.count > MAX_LISTED_MODELS || ms.models.len() < ms.count {
        format!("{} models", ms.count)
    } else {
        ms.models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub cells: Vec<(Column, Cell)>,
}

impl ReportRow {
    pub fn get(&self, column: Column) -> &Cell {
        &self.cells.iter().find(|(c, _)| *c == column).expect("every column is filled").1
    }

    /// One `name: cell` line per column, names padded to a common width.
    pub fn render(&self) -> String {
        let width = Column::ALL.iter().map(|c| c.name().len()).max().unwrap_or(0) + 1;
        self.cells
            .iter()
            .map(|(c, cell)| format!("{:width$} {cell}\n", format!("{}:", c.name())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CompareOptions {
    pub budget: OracleBudget,
    /// Undefined-atom count up to which constraint models are counted exactly.
    pub exact_count_max_undefined: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            budget: OracleBudget { max_ground_atoms: 64, max_models_examined: 1 << 20 },
            exact_count_max_undefined: 20,
        }
    }
}

fn founded_and_models(prepared: &Prepared, opts: &CompareOptions) -> (Cell, Cell) {
    let itp = prepared.founded().interpretation;
    let models = if itp.is_consistent() {
        let limit = EnumerationLimit {
            max_models: Some(MAX_LISTED_MODELS + 1),
            exact_count_max_undefined: opts.exact_count_max_undefined,
        };
        Cell::Models(constraint_models(&prepared.completed, &prepared.ground, &itp, limit))
    } else {
        Cell::NotApplicable(Some("inconsistent founded model".into()))
    };
    (Cell::Interpretation(itp), models)
}

fn oracle_cell<T>(r: Result<T, OracleError>, wrap: impl Fn(T) -> Cell) -> Cell {
    match r {
        Ok(v) => wrap(v),
        Err(OracleError::BudgetExceeded(_)) => Cell::NotApplicable(Some("over oracle budget".into())),
        Err(OracleError::Unsupported(_)) => {
            Cell::NotApplicable(Some("negative facts or conclusions".into()))
        }
        Err(e @ OracleError::NotStratified(_)) => Cell::NotApplicable(Some(e.to_string())),
    }
}

pub fn compare(program: &Program, opts: &CompareOptions) -> Result<ReportRow, DeclarationError> {
    let mut cells = Vec::new();
    let uncertain = Prepared::new(&all_uncertain(program))?;
    let (fu, cu) = founded_and_models(&uncertain, opts);
    let (fc, cc) = match all_certain(program) {
        Some(p) => founded_and_models(&Prepared::new(&p)?, opts),
        None => (Cell::NotApplicable(None), Cell::NotApplicable(None)),
    };

    let has_negative = program.facts.iter().any(|f| !f.positive)
        || program.rules.iter().any(|r| !r.head.positive);
    let (wfs, sms) = if has_negative {
        let na = || Cell::NotApplicable(Some("negative facts or conclusions".into()));
        (na(), na())
    } else {
        let closed = Prepared::new(&all_closed(program)?)?;
        let itp = wfs_by_closure(&closed).interpretation;
        let limit = EnumerationLimit {
            max_models: None,
            exact_count_max_undefined: opts.exact_count_max_undefined,
        };
        let models = constraint_models(&closed.completed, &closed.ground, &itp, limit);
        (Cell::Interpretation(itp), Cell::Models(sms_filter(&models, &closed.completed)))
    };
    let fitting = oracle_cell(fitting_oracle(&uncertain.ground, opts.budget), Cell::Interpretation);
    let supported = oracle_cell(supported_oracle(&uncertain.ground, opts.budget), Cell::Models);

    for column in Column::ALL {
        let cell = match column {
            Column::FoundedUncertain => fu.clone(),
            Column::FoundedCertain => fc.clone(),
            Column::Wfs => wfs.clone(),
            Column::Fitting => fitting.clone(),
            Column::ConstraintUncertain => cu.clone(),
            Column::ConstraintCertain => cc.clone(),
            Column::Sms => sms.clone(),
            Column::Supported => supported.clone(),
        };
        cells.push((column, cell));
    }
    Ok(ReportRow { cells })
}
