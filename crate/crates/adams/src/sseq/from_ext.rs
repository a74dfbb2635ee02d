//! Builds a presented chart algebra from a computed Ext table.
//!
//! Generators are the homology classes through `max_t`, named from the
//! catalog when identified and positionally (`x{stem}_{s}_{i}`) otherwise.
//! Products are computed exactly from cochain representatives wherever the
//! target lands inside the computed range, and omitted (unknown) beyond it.
//!
//! The census covers stems `1 ..= (2*max_t - 3)/3`: through that stem every
//! filtration that can carry a class is inside the computed range, by the
//! vanishing line above which only the stem-0 tower lives. Stem 0 itself is
//! never census-complete (its tower climbs forever), so it is excluded.

use crate::ext::{standard_catalog, ExtEngine, ExtError};
use crate::lambda::product;

use super::chart::{ChartAlgebra, ChartError, ChartGenerator, ChartMetadata, TriDegree};

#[derive(Debug, thiserror::Error)]
pub enum FromExtError {
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Largest stem whose column is complete when everything with `t <= max_t`
/// has been computed.
pub fn census_limit(max_t: u32) -> i32 {
    ((2 * max_t).saturating_sub(3) / 3) as i32
}

pub fn chart_from_ext(engine: &ExtEngine, max_t: u32) -> Result<ChartAlgebra, FromExtError> {
    engine.compute_through(max_t)?;
    engine.identify(&standard_catalog(), max_t)?;

    let mut generators = Vec::new();
    let mut reps = Vec::new();
    for t in 0..=max_t {
        let slice = engine.slice(t)?;
        for (s, classes) in slice.classes.iter().enumerate() {
            for (i, class) in classes.iter().enumerate() {
                let stem = t - s as u32;
                let name = class
                    .name
                    .clone()
                    .unwrap_or_else(|| format!("x{stem}_{s}_{i}"));
                generators.push(ChartGenerator {
                    name,
                    degree: TriDegree::new(stem as i32, s as u32),
                });
                reps.push(class.representative.clone());
            }
        }
    }

    let mut products = Vec::new();
    for i in 0..generators.len() {
        for j in i..generators.len() {
            let target = reps[i].bidegree();
            let other = reps[j].bidegree();
            if target.t + other.t > max_t {
                continue;
            }
            let p = product(&reps[i], &reps[j]).map_err(ExtError::from)?;
            let coords = engine
                .class_coordinates(&p)?
                .expect("products of cycles are cycles");
            let target_classes = engine.homology_basis(p.bidegree().s, p.bidegree().t)?;
            let value: Vec<String> = coords
                .iter_set()
                .map(|k| {
                    let c = &target_classes[k];
                    let stem = c.bidegree.t - c.bidegree.s;
                    c.name
                        .clone()
                        .unwrap_or_else(|| format!("x{stem}_{}_{k}", c.bidegree.s))
                })
                .collect();
            products.push((generators[i].name.clone(), generators[j].name.clone(), value));
        }
    }

    let chart = ChartAlgebra::build(
        generators,
        products,
        None,
        ChartMetadata {
            name: Some(format!("classical E2 through t = {max_t}")),
            notes: Some("computed from the Lambda complex".to_string()),
            complete_stems: Some((1, census_limit(max_t))),
        },
    )?;
    Ok(chart)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sseq::{propagate, FactsFile};

    #[test]
    fn census_limit_values() {
        assert_eq!(census_limit(24), 15);
        assert_eq!(census_limit(18), 11);
    }

    /// Nothing lives above the census filtration bound in positive stems:
    /// checked against the independent resolution oracle a few degrees past
    /// the chart range.
    #[test]
    fn census_is_honest_against_oracle() {
        let max_t = 18;
        let dims = crate::oracle::minres::minres_ext_dims(max_t + 6, max_t + 6);
        for (&(s, t), _) in &dims {
            let stem = (t - s) as i32;
            if stem >= 1 && stem <= census_limit(max_t) && t > max_t {
                panic!("class at stem {stem}, s {s}, t {t} escapes the chart range");
            }
        }
    }

    #[test]
    fn chart_products_match_known_structure() {
        let engine = ExtEngine::in_memory();
        let chart = chart_from_ext(&engine, 12).unwrap();
        let h1 = chart.index_of("h1").unwrap();
        let h2 = chart.index_of("h2").unwrap();
        // h1 h2 = 0 (adjacent), listed as a genuine zero.
        match chart.product_of_generators(h1, h2) {
            super::super::chart::ProductValue::Known(e) => assert!(e.is_zero()),
            other => panic!("expected known zero, got {other:?}"),
        }
        // h0 h2 is the nonzero class at (2, 5).
        let h0 = chart.index_of("h0").unwrap();
        match chart.product_of_generators(h0, h2) {
            super::super::chart::ProductValue::Known(e) => {
                assert_eq!(e.terms().len(), 1);
                let g = chart.generator(e.terms()[0]);
                assert_eq!((g.degree.stem, g.degree.filt), (3, 2));
            }
            other => panic!("expected known class, got {other:?}"),
        }
    }

    /// The squaring-operation seed differential propagates over the
    /// computed chart: d2(h4) = h0 h3^2 forces d2 on the h0-tower above h4.
    #[test]
    fn classical_seed_propagation() {
        let engine = ExtEngine::in_memory();
        let chart = chart_from_ext(&engine, 18).unwrap();
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../data/classical_facts.json");
        let facts_file = FactsFile::load(&path).unwrap();
        let facts = facts_file.resolve(&chart).unwrap();
        let state = propagate(&chart, &facts, 2, None);
        assert!(!state.has_contradiction());
        // d2(h4) is the asserted seed; the closure must also pin d2 of the
        // product class h0 h4 at (15, 2) via the forward rule.
        let h4 = chart.index_of("h4").unwrap();
        let v = state.point_value(&chart, h4).expect("asserted");
        assert_eq!(chart.render(&v), "h0h3^2");
        let h0h4 = chart
            .generators()
            .iter()
            .position(|g| (g.degree.stem, g.degree.filt) == (15, 2))
            .expect("h0 h4 class exists");
        let v = state.point_value(&chart, h0h4).expect("deduced");
        // h0 * h0h3^2 = 0 in Ext, so the tower element is a d2-cycle.
        assert!(v.is_zero());
        assert!(state
            .log
            .iter()
            .any(|d| d.rule == "leibniz_forward" && d.subject == chart.generator(h0h4).name));
    }
}
