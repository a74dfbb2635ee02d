//! The deduction engine: closes a fact base under the Leibniz rule (forwards
//! and backwards) and the higher Leibniz rule for 3-fold Massey products.
//!
//! Soundness over completeness: a rule only fires when every product it needs
//! is listed in the chart, and a Moss candidate is eliminated only when its
//! bracket is provably undefined or provably misses the required value.
//! Contradictions are recorded in the state, never thrown.

use crate::f2::{AffineSubspace, BitVec};

use super::chart::{ChartAlgebra, Expression, ProductValue, TriDegree};
use super::facts::{DifferentialFact, Facts, MasseyFact};
use super::state::{Deduction, DiffKnowledge, DifferentialState};

/// Candidate subspaces larger than this are not enumerated by the Moss rule.
const MOSS_ENUMERATION_CAP: usize = 14;

/// What a bracket oracle can report about `<a, b, v>`.
#[derive(Clone, Debug, Default)]
pub struct BracketEval {
    /// A provably contained element.
    pub member: Option<Expression>,
    /// A spanning set of the indeterminacy, when fully computable from the
    /// chart; `None` means unknown.
    pub indeterminacy: Option<Vec<Expression>>,
    /// How the member was obtained, for the log.
    pub route: Option<String>,
}

/// Evaluates chart-level brackets from imported facts plus the juggling rule
/// `<a, b, c> * d  ⊆  <a, b, c d>`.
pub trait BracketOracle {
    fn evaluate(
        &self,
        chart: &ChartAlgebra,
        a: &Expression,
        b: &Expression,
        v: &Expression,
        v_degree: TriDegree,
    ) -> BracketEval;
}

/// The standard oracle over a list of imported Massey facts.
pub struct FactBracketOracle<'a> {
    pub facts: &'a [MasseyFact],
}

impl FactBracketOracle<'_> {
    /// Indeterminacy span of `<a, b, v>`: `a*H + H*v` where the `H` slots sit
    /// at the sub-bracket degrees. `None` when the chart cannot decide it.
    fn indeterminacy(
        &self,
        chart: &ChartAlgebra,
        a: &Expression,
        b: &Expression,
        v: &Expression,
        v_degree: TriDegree,
    ) -> Option<Vec<Expression>> {
        let da = chart.degree_of(a)?;
        let db = chart.degree_of(b)?;
        let mut span = Vec::new();
        // a * H at deg(b) + deg(v) + (1, -1).
        let right_filt = (db.filt + v_degree.filt).checked_sub(1);
        if let Some(filt) = right_filt {
            let degree = TriDegree {
                stem: db.stem + v_degree.stem + 1,
                filt,
                weight: match (db.weight, v_degree.weight) {
                    (Some(x), Some(y)) => Some(x + y),
                    _ => None,
                },
            };
            if !chart.census_contains(degree.stem) {
                return None;
            }
            for &g in chart.basis(&degree) {
                match chart.multiply(a, &Expression::single(g)) {
                    ProductValue::Known(p) => {
                        if !p.is_zero() {
                            span.push(p);
                        }
                    }
                    ProductValue::Unknown => return None,
                }
            }
        }
        // H * v at deg(a) + deg(b) + (1, -1); multiplication by zero needs no
        // group knowledge.
        if !v.is_zero() {
            let left_filt = (da.filt + db.filt).checked_sub(1);
            if let Some(filt) = left_filt {
                let degree = TriDegree {
                    stem: da.stem + db.stem + 1,
                    filt,
                    weight: match (da.weight, db.weight) {
                        (Some(x), Some(y)) => Some(x + y),
                        _ => None,
                    },
                };
                if !chart.census_contains(degree.stem) {
                    return None;
                }
                for &g in chart.basis(&degree) {
                    match chart.multiply(&Expression::single(g), v) {
                        ProductValue::Known(p) => {
                            if !p.is_zero() {
                                span.push(p);
                            }
                        }
                        ProductValue::Unknown => return None,
                    }
                }
            }
        }
        Some(span)
    }
}

impl BracketOracle for FactBracketOracle<'_> {
    fn evaluate(
        &self,
        chart: &ChartAlgebra,
        a: &Expression,
        b: &Expression,
        v: &Expression,
        v_degree: TriDegree,
    ) -> BracketEval {
        let mut eval = BracketEval {
            indeterminacy: self.indeterminacy(chart, a, b, v, v_degree),
            ..Default::default()
        };
        if v.is_zero() {
            eval.member = Some(Expression::zero());
            eval.route = Some("bracket with a zero slot contains 0".to_string());
            return eval;
        }
        for fact in self.facts {
            if &fact.a != a || &fact.b != b {
                continue;
            }
            // Exact match.
            if &fact.c == v {
                eval.member = Some(fact.value.clone());
                eval.route = Some(format!(
                    "imported bracket <{}, {}, {}> = {}",
                    chart.render(a),
                    chart.render(b),
                    chart.render(&fact.c),
                    chart.render(&fact.value)
                ));
                if fact.strict && eval.indeterminacy.is_none() {
                    eval.indeterminacy = Some(Vec::new());
                }
                return eval;
            }
            // Juggling: find d with (fact.c) * d = v; then value * d is in
            // <a, b, v>.
            let Some(c_degree) = chart.degree_of(&fact.c) else {
                continue;
            };
            for (d_idx, d_gen) in chart.generators().iter().enumerate() {
                let sum = c_degree.plus(&d_gen.degree);
                if (sum.stem, sum.filt) != (v_degree.stem, v_degree.filt) {
                    continue;
                }
                let d_expr = Expression::single(d_idx);
                let ProductValue::Known(cd) = chart.multiply(&fact.c, &d_expr) else {
                    continue;
                };
                if &cd != v {
                    continue;
                }
                let ProductValue::Known(wd) = chart.multiply(&fact.value, &d_expr) else {
                    continue;
                };
                eval.member = Some(wd.clone());
                eval.route = Some(format!(
                    "juggling: <{}, {}, {}> * {} = {}",
                    chart.render(a),
                    chart.render(b),
                    chart.render(&fact.c),
                    d_gen.name,
                    chart.render(&wd)
                ));
                return eval;
            }
        }
        eval
    }
}

fn render_knowledge(chart: &ChartAlgebra, page: u32, gen: usize, k: &AffineSubspace, target: &TriDegree) -> String {
    let name = &chart.generator(gen).name;
    if k.is_empty() {
        return format!("d{page}({name}) has no consistent value");
    }
    let base = chart.render(&chart.expression_from_coords(k.basepoint().unwrap(), target));
    match k.dim() {
        Some(0) => format!("d{page}({name}) = {base}"),
        Some(d) => format!("d{page}({name}) in {base} + ({d}-dimensional subspace)"),
        None => unreachable!(),
    }
}

/// Applies one differential fact (or keeps a multi-term source pending until
/// only one summand is unknown). Returns true on change.
pub fn assert_differential(
    chart: &ChartAlgebra,
    state: &mut DifferentialState,
    fact: &DifferentialFact,
) -> bool {
    if fact.page != state.page {
        return false;
    }
    let terms = fact.source.terms().to_vec();
    let unknown: Vec<usize> = terms
        .iter()
        .copied()
        .filter(|&g| !state.knowledge(g).is_point())
        .collect();
    match unknown.len() {
        0 => {
            // Consistency check of a fully known sum.
            let mut sum = Expression::zero();
            for &g in &terms {
                sum = sum.add(&state.point_value(chart, g).expect("known"));
            }
            if sum != fact.value {
                // Re-meet one term to record the contradiction.
                let g = terms[0];
                let target = chart.generator(g).degree.d_target(state.page);
                let mut rhs = fact.value.clone();
                for &other in &terms[1..] {
                    rhs = rhs.add(&state.point_value(chart, other).expect("known"));
                }
                let point = AffineSubspace::point(chart.coords(&rhs, &target));
                return state.meet(
                    chart,
                    g,
                    &point,
                    Deduction {
                        rule: "assert".to_string(),
                        page: state.page,
                        subject: chart.generator(g).name.clone(),
                        result: format!(
                            "asserted d{}({}) = {}",
                            state.page,
                            chart.render(&fact.source),
                            chart.render(&fact.value)
                        ),
                        premises: vec!["imported fact".to_string()],
                        citation: fact.citation.clone(),
                    },
                );
            }
            false
        }
        1 => {
            let g = unknown[0];
            let mut rhs = fact.value.clone();
            for &other in &terms {
                if other != g {
                    rhs = rhs.add(&state.point_value(chart, other).expect("known"));
                }
            }
            let target = chart.generator(g).degree.d_target(state.page);
            let deduction = Deduction {
                rule: "assert".to_string(),
                page: state.page,
                subject: chart.generator(g).name.clone(),
                result: format!("d{}({}) = {}", state.page, chart.generator(g).name, chart.render(&rhs)),
                premises: vec![format!(
                    "asserted d{}({}) = {}",
                    state.page,
                    chart.render(&fact.source),
                    chart.render(&fact.value)
                )],
                citation: fact.citation.clone(),
            };
            if chart.census_contains(target.stem) {
                let point = AffineSubspace::point(chart.coords(&rhs, &target));
                state.meet(chart, g, &point, deduction)
            } else if rhs.is_zero() {
                state.set_zero(chart, g, deduction)
            } else {
                false
            }
        }
        _ => false,
    }
}

/// Forward Leibniz on one product entry: when `d(x)` and `d(y)` are pinned,
/// the sum of `d` over the product's terms is pinned too.
fn forward_rule(
    chart: &ChartAlgebra,
    state: &mut DifferentialState,
    x: usize,
    y: usize,
    value: &Expression,
) -> bool {
    let Some(dx) = state.point_value(chart, x) else {
        return false;
    };
    let Some(dy) = state.point_value(chart, y) else {
        return false;
    };
    let ProductValue::Known(t1) = chart.multiply(&dx, &Expression::single(y)) else {
        return false;
    };
    let ProductValue::Known(t2) = chart.multiply(&Expression::single(x), &dy) else {
        return false;
    };
    let rhs = t1.add(&t2);
    let unknown: Vec<usize> = value
        .terms()
        .iter()
        .copied()
        .filter(|&g| !state.knowledge(g).is_point())
        .collect();
    match unknown.len() {
        0 => {
            let mut sum = Expression::zero();
            for &g in value.terms() {
                sum = sum.add(&state.point_value(chart, g).expect("known"));
            }
            if sum != rhs {
                state.contradictions.push(super::state::Contradiction {
                    subject: format!(
                        "{} * {}",
                        chart.generator(x).name,
                        chart.generator(y).name
                    ),
                    detail: format!(
                        "Leibniz gives d{}({}) = {} but the summands' differentials add to {}",
                        state.page,
                        chart.render(value),
                        chart.render(&rhs),
                        chart.render(&sum)
                    ),
                });
                return true;
            }
            false
        }
        1 => {
            let g = unknown[0];
            let mut point_val = rhs;
            for &other in value.terms() {
                if other != g {
                    point_val = point_val.add(&state.point_value(chart, other).expect("known"));
                }
            }
            let target = chart.generator(g).degree.d_target(state.page);
            let deduction = Deduction {
                rule: "leibniz_forward".to_string(),
                page: state.page,
                subject: chart.generator(g).name.clone(),
                result: format!(
                    "d{}({}) = {}",
                    state.page,
                    chart.generator(g).name,
                    chart.render(&point_val)
                ),
                premises: vec![format!(
                    "{} * {} = {}; d({}) = {}; d({}) = {}",
                    chart.generator(x).name,
                    chart.generator(y).name,
                    chart.render(value),
                    chart.generator(x).name,
                    chart.render(&dx),
                    chart.generator(y).name,
                    chart.render(&dy)
                )],
                citation: None,
            };
            if chart.census_contains(target.stem) {
                let point = AffineSubspace::point(chart.coords(&point_val, &target));
                state.meet(chart, g, &point, deduction)
            } else if point_val.is_zero() {
                state.set_zero(chart, g, deduction)
            } else {
                false
            }
        }
        _ => false,
    }
}

/// Backward Leibniz: with `d` known on the product and on `y`, `d(x)` is
/// confined to the solution set of `u * y = d(product) + x * d(y)`.
fn backward_rule(
    chart: &ChartAlgebra,
    state: &mut DifferentialState,
    x: usize,
    y: usize,
    value: &Expression,
) -> bool {
    if state.knowledge(x).is_point() {
        return false;
    }
    let Some(dy) = state.point_value(chart, y) else {
        return false;
    };
    let mut w = Expression::zero();
    for &g in value.terms() {
        let Some(dg) = state.point_value(chart, g) else {
            return false;
        };
        w = w.add(&dg);
    }
    let ProductValue::Known(xdy) = chart.multiply(&Expression::single(x), &dy) else {
        return false;
    };
    let rhs = w.add(&xdy);
    let dx_target = chart.generator(x).degree.d_target(state.page);
    if !chart.census_contains(dx_target.stem) {
        return false;
    }
    let dx_basis = chart.basis(&dx_target);
    if dx_basis.is_empty() {
        return false; // already forced to zero at construction
    }
    let row_degree = dx_target.plus(&chart.generator(y).degree);
    let row_basis_len = chart.basis(&row_degree).len();
    let mut matrix = crate::f2::BitMatrix::zeros(row_basis_len, dx_basis.len());
    for (j, &u) in dx_basis.iter().enumerate() {
        let ProductValue::Known(uy) =
            chart.multiply(&Expression::single(u), &Expression::single(y))
        else {
            return false;
        };
        let coords = chart.coords(&uy, &row_degree);
        for i in coords.iter_set() {
            matrix.set(i, j, true);
        }
    }
    let rhs_coords = if rhs.is_zero() {
        BitVec::zeros(row_basis_len)
    } else {
        chart.coords(&rhs, &row_degree)
    };
    let solution = match matrix.solve(&rhs_coords) {
        Some(x0) => AffineSubspace::new(x0, &matrix.kernel_basis()),
        None => AffineSubspace::empty(dx_basis.len()),
    };
    let rendered = render_knowledge(chart, state.page, x, &solution, &dx_target);
    state.meet(
        chart,
        x,
        &solution,
        Deduction {
            rule: "leibniz_backward".to_string(),
            page: state.page,
            subject: chart.generator(x).name.clone(),
            result: rendered,
            premises: vec![format!(
                "{} * {} = {}; d({}) = {}; d of the product = {}",
                chart.generator(x).name,
                chart.generator(y).name,
                chart.render(value),
                chart.generator(y).name,
                chart.render(&dy),
                chart.render(&w)
            )],
            citation: None,
        },
    )
}

/// Imposes `d_r(value) in <a, b, d_r(c)>` by screening every candidate for
/// `d_r(c)`: a candidate survives unless its bracket is provably undefined
/// (`b * v` nonzero) or provably misses the known `d_r(value)`.
pub fn moss_constraint(
    chart: &ChartAlgebra,
    state: &mut DifferentialState,
    fact: &MasseyFact,
    oracle: &dyn BracketOracle,
) -> bool {
    if fact.page != state.page {
        return false;
    }
    if !state.known_zero(chart, &fact.a) || !state.known_zero(chart, &fact.b) {
        return false;
    }
    let Some(dv) = state.point_value_of_expression(chart, &fact.value) else {
        return false;
    };
    // The specialization handled here: c is a single basis element.
    let &[c_gen] = fact.c.terms() else {
        return false;
    };
    let DiffKnowledge::Space(space) = state.knowledge(c_gen) else {
        return false;
    };
    if space.is_empty() || space.is_point() {
        return false;
    }
    if space.dim().unwrap_or(usize::MAX) > MOSS_ENUMERATION_CAP {
        return false;
    }
    let c_target = chart.generator(c_gen).degree.d_target(state.page);
    let bracket_degree = {
        let dvd = chart
            .degree_of(&fact.value)
            .expect("fact value is nonzero by degree law")
            .d_target(state.page);
        dvd
    };
    let mut survivors: Vec<BitVec> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    for candidate in space.points() {
        let v = chart.expression_from_coords(&candidate, &c_target);
        let vname = chart.render(&v);
        // (i) Definedness screening: b * v must be able to vanish.
        if let ProductValue::Known(bv) = chart.multiply(&fact.b, &v) {
            if !bv.is_zero() {
                notes.push(format!(
                    "eliminated {vname}: {} * {vname} = {} is nonzero, bracket undefined",
                    chart.render(&fact.b),
                    chart.render(&bv)
                ));
                continue;
            }
        }
        // (ii) Bracket evaluation.
        let eval = oracle.evaluate(chart, &fact.a, &fact.b, &v, c_target);
        let mut excluded = false;
        if let (Some(member), Some(indet)) = (&eval.member, &eval.indeterminacy) {
            if chart.census_contains(bracket_degree.stem) {
                let basis_len = chart.basis(&bracket_degree).len();
                let member_coords = if member.is_zero() {
                    BitVec::zeros(basis_len)
                } else {
                    chart.coords(member, &bracket_degree)
                };
                let dirs: Vec<BitVec> = indet
                    .iter()
                    .map(|e| {
                        if e.is_zero() {
                            BitVec::zeros(basis_len)
                        } else {
                            chart.coords(e, &bracket_degree)
                        }
                    })
                    .collect();
                let coset = AffineSubspace::new(member_coords, &dirs);
                let dv_coords = if dv.is_zero() {
                    BitVec::zeros(basis_len)
                } else {
                    chart.coords(&dv, &bracket_degree)
                };
                if !coset.contains(&dv_coords) {
                    excluded = true;
                    notes.push(format!(
                        "eliminated {vname}: bracket value {} (indeterminacy dim {}) cannot equal {}",
                        chart.render(member),
                        coset.dim().unwrap_or(0),
                        chart.render(&dv)
                    ));
                }
            }
        }
        if excluded {
            continue;
        }
        if let (Some(member), Some(route)) = (&eval.member, &eval.route) {
            if member == &dv {
                notes.push(format!("kept {vname}: {route}"));
            }
        }
        survivors.push(candidate);
    }
    let hull = if survivors.is_empty() {
        AffineSubspace::empty(space.ambient_dim())
    } else {
        AffineSubspace::hull(&survivors)
    };
    let rendered = render_knowledge(chart, state.page, c_gen, &hull, &c_target);
    let mut premises = vec![format!(
        "Moss: d{}({}) lies in <{}, {}, d{}({})>; d{}({}) = {}",
        state.page,
        chart.render(&fact.value),
        chart.render(&fact.a),
        chart.render(&fact.b),
        state.page,
        chart.render(&fact.c),
        state.page,
        chart.render(&fact.value),
        chart.render(&dv)
    )];
    premises.extend(notes);
    state.meet(
        chart,
        c_gen,
        &hull,
        Deduction {
            rule: "moss".to_string(),
            page: state.page,
            subject: chart.generator(c_gen).name.clone(),
            result: rendered,
            premises,
            citation: fact.citation.clone(),
        },
    )
}

/// Tiny deterministic shuffle (xorshift) so the confluence test can permute
/// rule order without pulling in an RNG dependency.
fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).max(1);
    let mut next = || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s
    };
    for i in (1..items.len()).rev() {
        let j = (next() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

/// Runs Leibniz (both directions) and Moss rules to a fixpoint.
///
/// `shuffle_seed` permutes rule application order; the final state must not
/// depend on it (checked by the confluence tests).
pub fn closure(
    chart: &ChartAlgebra,
    state: &mut DifferentialState,
    facts: &Facts,
    shuffle_seed: Option<u64>,
) {
    let oracle = FactBracketOracle {
        facts: &facts.massey,
    };
    let mut entries: Vec<(usize, usize, Expression)> = chart
        .product_entries()
        .map(|(a, b, e)| (a, b, e.clone()))
        .collect();
    let mut diff_facts: Vec<&DifferentialFact> = facts.differentials.iter().collect();
    let mut massey_facts: Vec<&MasseyFact> = facts.massey.iter().collect();
    if let Some(seed) = shuffle_seed {
        shuffle(&mut entries, seed);
        shuffle(&mut diff_facts, seed.wrapping_add(1));
        shuffle(&mut massey_facts, seed.wrapping_add(2));
    }
    loop {
        let before = (
            state.uncertainty(),
            state.log.len(),
            state.contradictions.len(),
        );
        for fact in &diff_facts {
            assert_differential(chart, state, fact);
        }
        for (x, y, value) in &entries {
            forward_rule(chart, state, *x, *y, value);
            backward_rule(chart, state, *x, *y, value);
            if x != y {
                backward_rule(chart, state, *y, *x, value);
            }
        }
        for fact in &massey_facts {
            moss_constraint(chart, state, fact, &oracle);
        }
        let after = (
            state.uncertainty(),
            state.log.len(),
            state.contradictions.len(),
        );
        if after == before {
            break;
        }
    }
}

/// Seeds a fresh state from the facts and closes it.
pub fn propagate(
    chart: &ChartAlgebra,
    facts: &Facts,
    page: u32,
    shuffle_seed: Option<u64>,
) -> DifferentialState {
    let mut state = DifferentialState::new(chart, page);
    closure(chart, &mut state, facts, shuffle_seed);
    state
}
