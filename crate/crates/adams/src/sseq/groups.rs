//! Group-theoretic reading of an E-infinity stem.
//!
//! Each dot contributes a factor of 2 to the order. The group structure is
//! assembled from towers: `h0`-multiplications chain dots into cyclic
//! 2-groups, and hidden 2-extension facts splice towers together. Extension
//! facts with status `unknown` branch the answer; the curated fact list is
//! trusted to name every undetermined extension, so unlisted extensions are
//! treated as absent.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::chart::{ChartAlgebra, Expression, ProductValue};
use super::facts::{ExtensionFact, ExtensionStatus};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("stem {0} is outside the chart's census; the chart cannot answer")]
    IncompleteStem(i32),
    #[error("chart has no h0 generator, towers cannot be read")]
    NoH0,
    #[error("h0 * {0} is not listed; the stem's tower structure is incomplete")]
    UnknownTower(String),
}

/// An abelian 2-group as a multiset of cyclic orders, e.g. `Z/8 + Z/4 + Z/2`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct GroupDescriptor {
    /// Exponents of the cyclic factors (`k` meaning `Z/2^k`), descending.
    pub exponents: Vec<u32>,
}

impl GroupDescriptor {
    pub fn order(&self) -> u64 {
        1u64 << self.exponents.iter().sum::<u32>()
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|k| format!("Z/{}", 1u64 << k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// 2-power order of the stem: `2^(number of dots)`.
pub fn stem_order(chart: &ChartAlgebra, stem: i32) -> Result<u64, GroupError> {
    if !chart.census_contains(stem) {
        return Err(GroupError::IncompleteStem(stem));
    }
    let dots = dots_of_stem(chart, stem);
    Ok(1u64 << dots.len())
}

fn dots_of_stem(chart: &ChartAlgebra, stem: i32) -> Vec<usize> {
    let mut dots: Vec<usize> = chart
        .generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree.stem == stem)
        .map(|(i, _)| i)
        .collect();
    dots.sort_by_key(|&i| chart.generator(i).degree.filt);
    dots
}

/// The h0-successor of a dot, when the product is listed and a single dot.
fn h0_successor(chart: &ChartAlgebra, h0: usize, dot: usize) -> Result<Option<usize>, GroupError> {
    match chart.product_of_generators(h0, dot) {
        ProductValue::Unknown => Err(GroupError::UnknownTower(
            chart.generator(dot).name.clone(),
        )),
        ProductValue::Known(e) if e.is_zero() => Ok(None),
        ProductValue::Known(e) => match e.terms() {
            [single] => Ok(Some(*single)),
            _ => Err(GroupError::UnknownTower(chart.generator(dot).name.clone())),
        },
    }
}

fn assemble(
    chart: &ChartAlgebra,
    dots: &[usize],
    h0: usize,
    hidden: &[(usize, usize)],
) -> Result<GroupDescriptor, GroupError> {
    // successor = h0 product, with hidden extensions spliced in at tower tops.
    let mut successor: Vec<Option<usize>> = Vec::new();
    for &d in dots {
        successor.push(h0_successor(chart, h0, d)?);
    }
    let pos = |g: usize| dots.iter().position(|&d| d == g);
    for &(from, to) in hidden {
        if let Some(p) = pos(from) {
            if successor[p].is_none() {
                successor[p] = Some(to);
            }
        }
    }
    let mut has_predecessor: BTreeSet<usize> = BTreeSet::new();
    for s in successor.iter().flatten() {
        has_predecessor.insert(*s);
    }
    let mut exponents = Vec::new();
    for (i, &d) in dots.iter().enumerate() {
        if has_predecessor.contains(&d) {
            continue;
        }
        // Walk the chain.
        let mut len = 1u32;
        let mut cur = i;
        while let Some(next) = successor[cur] {
            let Some(p) = pos(next) else { break };
            len += 1;
            cur = p;
        }
        exponents.push(len);
    }
    exponents.sort_unstable_by(|a, b| b.cmp(a));
    Ok(GroupDescriptor { exponents })
}

/// All group structures consistent with the chart and the extension facts.
///
/// `present` extensions always splice; `unknown` ones branch; `absent` ones
/// are inert. The output is deduplicated and sorted.
pub fn stem_group_possibilities(
    chart: &ChartAlgebra,
    extensions: &[ExtensionFact],
    stem: i32,
) -> Result<Vec<GroupDescriptor>, GroupError> {
    if !chart.census_contains(stem) {
        return Err(GroupError::IncompleteStem(stem));
    }
    let dots = dots_of_stem(chart, stem);
    if dots.is_empty() {
        return Ok(vec![GroupDescriptor { exponents: vec![] }]);
    }
    let h0 = chart.index_of("h0").ok_or(GroupError::NoH0)?;
    let relevant: Vec<&ExtensionFact> = extensions.iter().filter(|e| e.stem == stem).collect();
    let always: Vec<(usize, usize)> = relevant
        .iter()
        .filter(|e| e.status == ExtensionStatus::Present)
        .map(|e| (e.from, e.to))
        .collect();
    let branching: Vec<(usize, usize)> = relevant
        .iter()
        .filter(|e| e.status == ExtensionStatus::Unknown)
        .map(|e| (e.from, e.to))
        .collect();
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << branching.len()) {
        let mut hidden = always.clone();
        for (j, &ext) in branching.iter().enumerate() {
            if (mask >> j) & 1 == 1 {
                hidden.push(ext);
            }
        }
        out.insert(assemble(chart, &dots, h0, &hidden)?);
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sseq::chart::{ChartGenerator, ChartMetadata, TriDegree};

    fn gen(name: &str, stem: i32, filt: u32) -> ChartGenerator {
        ChartGenerator {
            name: name.to_string(),
            degree: TriDegree::new(stem, filt),
        }
    }

    fn single_dot_chart() -> ChartAlgebra {
        ChartAlgebra::build(
            vec![gen("h0", 0, 1), gen("x", 5, 2)],
            vec![("h0".into(), "x".into(), vec![])],
            None,
            ChartMetadata {
                complete_stems: Some((4, 6)),
                ..Default::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn single_dot_is_z2() {
        let chart = single_dot_chart();
        assert_eq!(stem_order(&chart, 5).unwrap(), 2);
        let groups = stem_group_possibilities(&chart, &[], 5).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].to_string(), "Z/2");
    }

    #[test]
    fn empty_stem_is_trivial() {
        let chart = single_dot_chart();
        assert_eq!(stem_order(&chart, 6).unwrap(), 1);
        let groups = stem_group_possibilities(&chart, &[], 6).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].to_string(), "0");
        assert_eq!(groups[0].order(), 1);
    }

    #[test]
    fn census_guard() {
        let chart = single_dot_chart();
        assert!(matches!(
            stem_order(&chart, 30),
            Err(GroupError::IncompleteStem(30))
        ));
    }

    #[test]
    fn tower_of_three_is_z8() {
        let chart = ChartAlgebra::build(
            vec![
                gen("h0", 0, 1),
                gen("x", 5, 2),
                gen("h0x", 5, 3),
                gen("h0^2x", 5, 4),
            ],
            vec![
                ("h0".into(), "x".into(), vec!["h0x".into()]),
                ("h0".into(), "h0x".into(), vec!["h0^2x".into()]),
                ("h0".into(), "h0^2x".into(), vec![]),
            ],
            None,
            ChartMetadata {
                complete_stems: Some((5, 5)),
                ..Default::default()
            },
        )
        .unwrap();
        let groups = stem_group_possibilities(&chart, &[], 5).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].to_string(), "Z/8");
        assert_eq!(stem_order(&chart, 5).unwrap(), 8);
    }

    #[test]
    fn missing_h0_product_is_an_error() {
        let chart = ChartAlgebra::build(
            vec![gen("h0", 0, 1), gen("x", 5, 2)],
            vec![],
            None,
            ChartMetadata {
                complete_stems: Some((5, 5)),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            stem_group_possibilities(&chart, &[], 5),
            Err(GroupError::UnknownTower(_))
        ));
    }
}
