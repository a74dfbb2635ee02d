//! Knowledge about one page's differential, per chart basis element.
//!
//! Each element's `d_r` value is tracked as an affine subspace of the target
//! group: the full space when nothing is known, a single point when the value
//! is pinned, the empty set when facts contradict each other. Elements whose
//! target degree lies outside the chart's census cannot carry coordinates;
//! for those only "unknown" and "known zero" are representable.

use serde::Serialize;

use crate::f2::{AffineSubspace, BitVec};

use super::chart::{ChartAlgebra, Expression, TriDegree};

/// What is known about `d_r(x)` for one basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffKnowledge {
    /// Target degree outside the census; nothing known.
    Unknown,
    /// Known zero at a degree without census coordinates.
    Zero,
    /// Affine subspace of the target group's coordinates.
    Space(AffineSubspace),
}

impl DiffKnowledge {
    pub fn is_point(&self) -> bool {
        match self {
            DiffKnowledge::Unknown => false,
            DiffKnowledge::Zero => true,
            DiffKnowledge::Space(s) => s.is_point(),
        }
    }

    pub fn is_contradictory(&self) -> bool {
        matches!(self, DiffKnowledge::Space(s) if s.is_empty())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Contradiction {
    pub subject: String,
    pub detail: String,
}

/// One entry of the deduction log.
#[derive(Clone, Debug, Serialize)]
pub struct Deduction {
    pub rule: String,
    pub page: u32,
    pub subject: String,
    pub result: String,
    pub premises: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

/// Differential knowledge for one page over one chart.
#[derive(Clone, Debug)]
pub struct DifferentialState {
    pub page: u32,
    knowledge: Vec<DiffKnowledge>,
    pub contradictions: Vec<Contradiction>,
    pub log: Vec<Deduction>,
}

impl DifferentialState {
    /// Fresh state: full spaces inside the census (which the degree law may
    /// already collapse to zero), `Unknown` outside it.
    pub fn new(chart: &ChartAlgebra, page: u32) -> Self {
        let mut knowledge = Vec::with_capacity(chart.generators().len());
        let mut log = Vec::new();
        for (i, g) in chart.generators().iter().enumerate() {
            let target = g.degree.d_target(page);
            if chart.census_contains(target.stem) {
                let dim = chart.basis(&target).len();
                let k = if dim == 0 {
                    log.push(Deduction {
                        rule: "degree_forced".to_string(),
                        page,
                        subject: g.name.clone(),
                        result: format!("d{}({}) = 0", page, g.name),
                        premises: vec![format!("target {target} is an empty census degree")],
                        citation: None,
                    });
                    DiffKnowledge::Space(AffineSubspace::point(BitVec::zeros(0)))
                } else {
                    DiffKnowledge::Space(AffineSubspace::full(dim))
                };
                knowledge.push(k);
            } else {
                knowledge.push(DiffKnowledge::Unknown);
            }
            debug_assert_eq!(knowledge.len(), i + 1);
        }
        DifferentialState {
            page,
            knowledge,
            contradictions: Vec::new(),
            log,
        }
    }

    pub fn knowledge(&self, gen: usize) -> &DiffKnowledge {
        &self.knowledge[gen]
    }

    pub fn has_contradiction(&self) -> bool {
        !self.contradictions.is_empty()
    }

    /// The known point value of `d(gen)` as an expression, when pinned.
    pub fn point_value(&self, chart: &ChartAlgebra, gen: usize) -> Option<Expression> {
        let target = chart.generator(gen).degree.d_target(self.page);
        match &self.knowledge[gen] {
            DiffKnowledge::Zero => Some(Expression::zero()),
            DiffKnowledge::Space(s) if s.is_point() => Some(
                chart.expression_from_coords(s.basepoint().expect("point"), &target),
            ),
            _ => None,
        }
    }

    /// The known point value of `d` on a (possibly multi-term) expression.
    pub fn point_value_of_expression(
        &self,
        chart: &ChartAlgebra,
        e: &Expression,
    ) -> Option<Expression> {
        let mut acc = Expression::zero();
        for &g in e.terms() {
            acc = acc.add(&self.point_value(chart, g)?);
        }
        Some(acc)
    }

    /// True when `d(e) = 0` is known.
    pub fn known_zero(&self, chart: &ChartAlgebra, e: &Expression) -> bool {
        self.point_value_of_expression(chart, e)
            .map(|v| v.is_zero())
            .unwrap_or(false)
    }

    /// Meets the knowledge for `gen` with an affine subspace of its target
    /// coordinates. Returns true when the knowledge strictly shrank; records
    /// a contradiction when the meet is empty.
    pub fn meet(
        &mut self,
        chart: &ChartAlgebra,
        gen: usize,
        with: &AffineSubspace,
        deduction: Deduction,
    ) -> bool {
        let current = &self.knowledge[gen];
        let new = match current {
            DiffKnowledge::Space(s) => {
                let met = s.meet(with);
                if &met == s {
                    return false;
                }
                met
            }
            DiffKnowledge::Zero => {
                // Zero is representation-free; compatible iff 0 is in `with`.
                let dim = with.ambient_dim();
                if with.contains(&BitVec::zeros(dim)) {
                    return false;
                }
                AffineSubspace::empty(dim)
            }
            DiffKnowledge::Unknown => with.clone(),
        };
        if new.is_empty() {
            self.contradictions.push(Contradiction {
                subject: chart.generator(gen).name.clone(),
                detail: format!(
                    "{} conflicts with prior knowledge of d{}({})",
                    deduction.result, self.page, chart.generator(gen).name
                ),
            });
        }
        self.knowledge[gen] = DiffKnowledge::Space(new);
        self.log.push(deduction);
        true
    }

    /// Records `d(gen) = 0` for an out-of-census target.
    pub fn set_zero(&mut self, chart: &ChartAlgebra, gen: usize, deduction: Deduction) -> bool {
        match &self.knowledge[gen] {
            DiffKnowledge::Unknown => {
                self.knowledge[gen] = DiffKnowledge::Zero;
                self.log.push(deduction);
                true
            }
            DiffKnowledge::Zero => false,
            DiffKnowledge::Space(s) => {
                let dim = s.ambient_dim();
                self.meet(chart, gen, &AffineSubspace::point(BitVec::zeros(dim)), deduction)
            }
        }
    }

    /// Dimension-weighted measure of remaining uncertainty; strictly drops
    /// with every successful meet, so closure terminates.
    pub fn uncertainty(&self) -> usize {
        self.knowledge
            .iter()
            .map(|k| match k {
                DiffKnowledge::Unknown => 1_000,
                DiffKnowledge::Zero => 0,
                DiffKnowledge::Space(s) => s.dim().map(|d| d + 1).unwrap_or(0),
            })
            .sum()
    }

    /// Summary of every element whose differential is not pinned yet.
    pub fn unresolved(&self, chart: &ChartAlgebra) -> Vec<String> {
        self.knowledge
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_point())
            .map(|(i, k)| {
                let name = &chart.generator(i).name;
                match k {
                    DiffKnowledge::Unknown => format!("{name} (unknown)"),
                    DiffKnowledge::Space(s) => {
                        format!("{name} ({}-dimensional subspace)", s.dim().unwrap_or(0))
                    }
                    DiffKnowledge::Zero => unreachable!("zero is a point"),
                }
            })
            .collect()
    }
}

/// Helper: the target degree of `d_page` on a generator.
pub fn target_degree(chart: &ChartAlgebra, gen: usize, page: u32) -> TriDegree {
    chart.generator(gen).degree.d_target(page)
}
