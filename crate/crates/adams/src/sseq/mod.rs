//! Spectral-sequence deduction over presented chart algebras.
//!
//! A chart region of an E_r page is loaded as a finite presented algebra;
//! imported facts (differentials, Massey products, hidden extensions) are
//! closed under the Leibniz rule in both directions and under the higher
//! Leibniz rule for 3-fold brackets. The engine records every deduction with
//! its rule and premises, flags contradictions instead of throwing, turns
//! pages over a chosen region, and reads off group-theoretic consequences of
//! an E-infinity chart.

mod chart;
mod engine;
mod facts;
mod groups;
mod page;
mod state;

pub use chart::{
    load_chart, parse_chart, ChartAlgebra, ChartError, ChartGenerator, ChartMetadata, Expression,
    ProductValue, TriDegree,
};
pub use engine::{
    assert_differential, closure, moss_constraint, propagate, BracketEval, BracketOracle,
    FactBracketOracle,
};
pub use facts::{
    DifferentialFact, ExtensionFact, ExtensionStatus, Facts, FactsFile, MasseyFact,
};
pub use groups::{stem_group_possibilities, stem_order, GroupDescriptor, GroupError};
pub use page::{turn_page, PageError};
pub use state::{Contradiction, Deduction, DiffKnowledge, DifferentialState};
