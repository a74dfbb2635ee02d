//! Page turning: homology of a chart region with respect to a fully known
//! differential.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::f2::{quotient_representatives, BitMatrix, BitVec};

use super::chart::{ChartAlgebra, ChartGenerator, ChartMetadata, Expression, ProductValue, TriDegree};
use super::state::DifferentialState;

#[derive(Debug, Error)]
pub enum PageError {
    #[error("cannot turn page {page}: unresolved differentials on {}", .unresolved.join(", "))]
    Unresolved { page: u32, unresolved: Vec<String> },
    #[error("chart error: {0}")]
    Chart(#[from] super::chart::ChartError),
}

/// Computes the next page over `region` (an inclusive stem range).
///
/// Requires a pinned `d_r` for every generator with stem in
/// `region.start() ..= region.end() + 1` — those are exactly the elements
/// whose differentials touch the region. The new chart's census shrinks to
/// the region; products are induced where the old table decides them and
/// dropped (unknown) elsewhere.
pub fn turn_page(
    chart: &ChartAlgebra,
    state: &DifferentialState,
    region: RangeInclusive<i32>,
) -> Result<(ChartAlgebra, DifferentialState), PageError> {
    let page = state.page;
    let (lo, hi) = (*region.start(), *region.end());
    let mut unresolved = Vec::new();
    for (i, g) in chart.generators().iter().enumerate() {
        if g.degree.stem >= lo && g.degree.stem <= hi + 1 && !state.knowledge(i).is_point() {
            unresolved.push(g.name.clone());
        }
    }
    if !unresolved.is_empty() {
        return Err(PageError::Unresolved { page, unresolved });
    }

    // Degrees of the new chart: those in the region hosting generators.
    let mut degrees: Vec<TriDegree> = chart
        .generators()
        .iter()
        .map(|g| g.degree)
        .filter(|d| d.stem >= lo && d.stem <= hi)
        .collect();
    degrees.sort_by_key(|d| (d.stem, d.filt, d.weight));
    degrees.dedup();

    // Survivor representatives per degree, as expressions in old generators.
    let mut survivors: BTreeMap<TriDegree, Vec<Expression>> = BTreeMap::new();
    for &degree in &degrees {
        let basis = chart.basis(&degree);
        let n = basis.len();
        // Kernel of d_r at this degree.
        let target = degree.d_target(page);
        let target_len = chart.basis(&target).len();
        let mut d_matrix = BitMatrix::zeros(target_len, n);
        for (j, &g) in basis.iter().enumerate() {
            let dv = state
                .point_value(chart, g)
                .expect("pinned by the unresolved check");
            if !dv.is_zero() {
                for i in chart.coords(&dv, &target).iter_set() {
                    d_matrix.set(i, j, true);
                }
            }
        }
        let kernel = d_matrix.kernel_basis();
        // Image of d_r landing here.
        let mut boundaries: Vec<BitVec> = Vec::new();
        if degree.filt >= page {
            let source = TriDegree {
                stem: degree.stem + 1,
                filt: degree.filt - page,
                weight: degree.weight,
            };
            for &g in chart.basis(&source) {
                let dv = state
                    .point_value(chart, g)
                    .expect("pinned by the unresolved check");
                if !dv.is_zero() {
                    boundaries.push(chart.coords(&dv, &degree));
                }
            }
        }
        let reps = quotient_representatives(&boundaries, &kernel, n)
            .expect("boundaries are cycles by d o d = 0");
        let exprs: Vec<Expression> = reps
            .iter()
            .map(|v| chart.expression_from_coords(v, &degree))
            .collect();
        if !exprs.is_empty() {
            survivors.insert(degree, exprs);
        }
    }

    // Build the new generator list. A survivor equal to a single old
    // generator keeps its name; sums get bracketed names.
    let mut generators = Vec::new();
    let mut class_of: BTreeMap<TriDegree, Vec<(Expression, usize)>> = BTreeMap::new();
    for (&degree, exprs) in &survivors {
        for e in exprs {
            let name = if e.terms().len() == 1 {
                chart.generator(e.terms()[0]).name.clone()
            } else {
                format!("[{}]", chart.render(e))
            };
            let idx = generators.len();
            generators.push(ChartGenerator { name, degree });
            class_of.entry(degree).or_default().push((e.clone(), idx));
        }
    }

    // Induced products: multiply representatives in the old chart, then
    // express the class of the result in the new basis.
    let mut products: Vec<(String, String, Vec<String>)> = Vec::new();
    let flat: Vec<(TriDegree, Expression, usize)> = class_of
        .iter()
        .flat_map(|(&d, v)| v.iter().map(move |(e, i)| (d, e.clone(), *i)))
        .collect();
    for (pos_a, (da, ea, new_a)) in flat.iter().enumerate() {
        for (db, eb, new_b) in flat.iter().skip(pos_a) {
            let product_degree = da.plus(db);
            let ProductValue::Known(w) = chart.multiply(ea, eb) else {
                continue;
            };
            let Some(new_classes) = class_of.get(&product_degree) else {
                continue;
            };
            // Reduce w modulo boundaries at the product degree, then solve in
            // the survivor representatives.
            let n = chart.basis(&product_degree).len();
            let mut boundaries: Vec<BitVec> = Vec::new();
            if product_degree.filt >= page {
                let source = TriDegree {
                    stem: product_degree.stem + 1,
                    filt: product_degree.filt - page,
                    weight: product_degree.weight,
                };
                for &g in chart.basis(&source) {
                    let dv = match state.point_value(chart, g) {
                        Some(v) => v,
                        None => continue,
                    };
                    if !dv.is_zero() {
                        boundaries.push(chart.coords(&dv, &product_degree));
                    }
                }
            }
            let rref = crate::f2::span_rref(&boundaries, n);
            let w_coords = if w.is_zero() {
                BitVec::zeros(n)
            } else {
                rref.reduce(&chart.coords(&w, &product_degree))
            };
            let mut m = BitMatrix::zeros(n, new_classes.len());
            for (j, (rep, _)) in new_classes.iter().enumerate() {
                let reduced = rref.reduce(&chart.coords(rep, &product_degree));
                for i in reduced.iter_set() {
                    m.set(i, j, true);
                }
            }
            let Some(sol) = m.solve(&w_coords) else {
                continue;
            };
            let value: Vec<String> = sol
                .iter_set()
                .map(|j| generators[new_classes[j].1].name.clone())
                .collect();
            products.push((
                generators[*new_a].name.clone(),
                generators[*new_b].name.clone(),
                value,
            ));
        }
    }

    let tau_name = chart
        .tau()
        .and_then(|t| {
            let d = chart.generator(t).degree;
            survivors.get(&d).and_then(|exprs| {
                exprs
                    .iter()
                    .find(|e| e.terms() == [t])
                    .map(|_| chart.generator(t).name.clone())
            })
        });

    let old_census = chart.metadata.complete_stems;
    let census = match old_census {
        Some((clo, chi)) => Some((lo.max(clo), hi.min(chi))),
        None => Some((lo, hi)),
    };
    let new_chart = ChartAlgebra::build(
        generators,
        products,
        tau_name,
        ChartMetadata {
            name: chart
                .metadata
                .name
                .as_ref()
                .map(|n| format!("{n} (page {})", page + 1)),
            notes: chart.metadata.notes.clone(),
            complete_stems: census,
        },
    )?;
    let new_state = DifferentialState::new(&new_chart, page + 1);
    Ok((new_chart, new_state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sseq::chart::ChartMetadata;
    use crate::sseq::facts::Facts;

    fn gen(name: &str, stem: i32, filt: u32) -> ChartGenerator {
        ChartGenerator {
            name: name.to_string(),
            degree: TriDegree::new(stem, filt),
        }
    }

    #[test]
    fn all_zero_differential_keeps_the_chart() {
        let chart = ChartAlgebra::build(
            vec![gen("a", 10, 2), gen("b", 11, 3), gen("ab", 21, 5)],
            vec![("a".into(), "b".into(), vec!["ab".into()])],
            None,
            ChartMetadata {
                complete_stems: Some((8, 24)),
                ..Default::default()
            },
        )
        .unwrap();
        // All targets are empty census degrees, so d_2 = 0 is forced.
        let state = DifferentialState::new(&chart, 2);
        let (next, next_state) = turn_page(&chart, &state, 8..=24).unwrap();
        assert_eq!(next.generators().len(), 3);
        let a = next.index_of("a").unwrap();
        let b = next.index_of("b").unwrap();
        let ab = next.index_of("ab").unwrap();
        assert_eq!(
            next.product_of_generators(a, b),
            ProductValue::Known(Expression::single(ab))
        );
        assert_eq!(next_state.page, 3);
    }

    #[test]
    fn killed_classes_disappear() {
        // d4(D1) = gn kills both classes on page 5.
        let chart = ChartAlgebra::build(
            vec![gen("D1", 52, 5), gen("gn", 51, 9), gen("x", 51, 5)],
            vec![],
            None,
            ChartMetadata {
                complete_stems: Some((50, 53)),
                ..Default::default()
            },
        )
        .unwrap();
        let mut state = DifferentialState::new(&chart, 4);
        let facts: Facts = Default::default();
        let d1 = chart.index_of("D1").unwrap();
        let target = chart.generator(d1).degree.d_target(4);
        let gn_expr = Expression::single(chart.index_of("gn").unwrap());
        state.meet(
            &chart,
            d1,
            &crate::f2::AffineSubspace::point(chart.coords(&gn_expr, &target)),
            crate::sseq::state::Deduction {
                rule: "assert".into(),
                page: 4,
                subject: "D1".into(),
                result: "d4(D1) = gn".into(),
                premises: vec![],
                citation: None,
            },
        );
        crate::sseq::engine::closure(&chart, &mut state, &facts, None);
        let (next, _) = turn_page(&chart, &state, 51..=52).unwrap();
        assert!(next.index_of("gn").is_none());
        assert!(next.index_of("D1").is_none());
        assert!(next.index_of("x").is_some());
    }

    #[test]
    fn unresolved_region_is_an_error() {
        let chart = ChartAlgebra::build(
            vec![gen("a", 10, 2), gen("t", 9, 4)],
            vec![],
            None,
            ChartMetadata {
                complete_stems: Some((8, 10)),
                ..Default::default()
            },
        )
        .unwrap();
        // d_2(a) lands in (9, 4), a nonempty degree: not forced, not known.
        // d_2(t) lands in (8, 6), empty in the census, so it is forced.
        let state = DifferentialState::new(&chart, 2);
        let err = turn_page(&chart, &state, 9..=10).unwrap_err();
        match err {
            PageError::Unresolved { unresolved, .. } => {
                assert_eq!(unresolved, vec!["a".to_string()]);
            }
            other => panic!("expected Unresolved, got {other}"),
        }
    }

    #[test]
    fn exactness_dimension_count() {
        // dim E_{r+1} = dim ker - rank of the incoming map, checked against a
        // direct matrix computation.
        let chart = ChartAlgebra::build(
            vec![
                gen("x1", 20, 3),
                gen("x2", 20, 3),
                gen("y", 19, 5),
                gen("z", 21, 1),
            ],
            vec![],
            None,
            ChartMetadata {
                complete_stems: Some((18, 22)),
                ..Default::default()
            },
        )
        .unwrap();
        let mut state = DifferentialState::new(&chart, 2);
        // d2(x1) = y, d2(x2) = y, d2(z) = x1 + x2 is NOT allowed (degree law:
        // z at (21,1) targets (20,3)); use it.
        let x1 = chart.index_of("x1").unwrap();
        let x2 = chart.index_of("x2").unwrap();
        let z = chart.index_of("z").unwrap();
        let y_expr = Expression::single(chart.index_of("y").unwrap());
        let ty = chart.generator(x1).degree.d_target(2);
        for g in [x1, x2] {
            state.meet(
                &chart,
                g,
                &crate::f2::AffineSubspace::point(chart.coords(&y_expr, &ty)),
                crate::sseq::state::Deduction {
                    rule: "assert".into(),
                    page: 2,
                    subject: chart.generator(g).name.clone(),
                    result: String::new(),
                    premises: vec![],
                    citation: None,
                },
            );
        }
        let tz = chart.generator(z).degree.d_target(2);
        let x_sum = Expression::from_terms(vec![x1, x2]);
        state.meet(
            &chart,
            z,
            &crate::f2::AffineSubspace::point(chart.coords(&x_sum, &tz)),
            crate::sseq::state::Deduction {
                rule: "assert".into(),
                page: 2,
                subject: "z".into(),
                result: String::new(),
                premises: vec![],
                citation: None,
            },
        );
        let (next, _) = turn_page(&chart, &state, 19..=21).unwrap();
        // At (20,3): kernel = {x1+x2} (1-dim), image from z = {x1+x2}: E3 = 0.
        // At (19,5): kernel = {y}, image = {y}: E3 = 0.
        // At (21,1): kernel = 0.
        assert_eq!(next.generators().len(), 0);
    }
}
