//! First-order Goedel logics with truth values in realized closed sets.

mod eval;
pub(crate) mod formula;
mod sets;

pub use eval::{
    connective, cut_off, evaluate, evaluate_with, imp, induced_valuation, subformula_values, truncate_valuation, Connective,
    Valuation,
};
pub use formula::{format_formula, parse_formula, Arg, Formula};
pub use sets::{
    cantor_map, falsify, gs_extend, logic_subset_evidence, pin_term, pinned_labeled, realized_map, Bounds,
    GoedelSet, LogicEvidence,
};
